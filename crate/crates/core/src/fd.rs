//! Central finite differences with one Richardson extrapolation step.
//!
//! Functions map a real coordinate vector to a flat vector of real outputs.

use crate::error::Result;

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(a, d) in moves {
        y[a] += d;
    }
    y
}

fn combine(parts: &[(f64, Vec<f64>)], scale: f64) -> Vec<f64> {
    let len = parts[0].1.len();
    (0..len)
        .map(|i| parts.iter().map(|(w, v)| w * v[i]).sum::<f64>() * scale)
        .collect()
}

fn richardson(coarse: Vec<f64>, fine: Vec<f64>) -> Vec<f64> {
    coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}

/// `d f / d x_a`, fourth-order accurate.
pub fn first_partial<F>(f: &F, x: &[f64], a: usize, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let d = |h: f64| -> Result<Vec<f64>> {
        let up = f(&shifted(x, &[(a, h)]))?;
        let dn = f(&shifted(x, &[(a, -h)]))?;
        Ok(combine(&[(1.0, up), (-1.0, dn)], 0.5 / h))
    };
    Ok(richardson(d(h)?, d(0.5 * h)?))
}

/// `d^2 f / dx_a dx_b`, fourth-order accurate.
pub fn second_partial<F>(f: &F, x: &[f64], a: usize, b: usize, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let d = |h: f64| -> Result<Vec<f64>> {
        if a == b {
            let up = f(&shifted(x, &[(a, h)]))?;
            let mid = f(x)?;
            let dn = f(&shifted(x, &[(a, -h)]))?;
            Ok(combine(&[(1.0, up), (-2.0, mid), (1.0, dn)], 1.0 / (h * h)))
        } else {
            let pp = f(&shifted(x, &[(a, h), (b, h)]))?;
            let pm = f(&shifted(x, &[(a, h), (b, -h)]))?;
            let mp = f(&shifted(x, &[(a, -h), (b, h)]))?;
            let mm = f(&shifted(x, &[(a, -h), (b, -h)]))?;
            Ok(combine(
                &[(1.0, pp), (-1.0, pm), (-1.0, mp), (1.0, mm)],
                0.25 / (h * h),
            ))
        }
    };
    Ok(richardson(d(h)?, d(0.5 * h)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_a_smooth_function() {
        let f = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![x[0].sin() * x[1].exp(), x[0] * x[0]]) };
        let x = [0.7, -0.3];
        let d0 = first_partial(&f, &x, 0, 1e-3).unwrap();
        assert!((d0[0] - 0.7f64.cos() * (-0.3f64).exp()).abs() < 1e-11);
        assert!((d0[1] - 1.4).abs() < 1e-11);
        let d01 = second_partial(&f, &x, 0, 1, 1e-3).unwrap();
        assert!((d01[0] - 0.7f64.cos() * (-0.3f64).exp()).abs() < 1e-9);
        let d00 = second_partial(&f, &x, 0, 0, 1e-3).unwrap();
        assert!((d00[1] - 2.0).abs() < 1e-8);
    }
}
