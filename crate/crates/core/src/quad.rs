//! Fixed-order Gauss–Legendre quadrature.

const NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss–Legendre rule over `panels` equal panels of `[a, b]`.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        let mut acc = 0.0;
        for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
            acc += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += acc * half;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // degree 15 is exact for 8 nodes
        let v = gauss_legendre(|x| x.powi(15) + 3.0 * x.powi(2), 0.0, 2.0, 1);
        assert!((v - (2f64.powi(16) / 16.0 + 8.0)).abs() < 1e-10);
    }

    #[test]
    fn integrates_exp() {
        let v = gauss_legendre(f64::exp, 0.0, 1.0, 4);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-15);
    }
}
