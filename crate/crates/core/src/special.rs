//! Scalar special functions used by the shipped potentials.

use std::f64::consts::PI;

/// Below this argument `ln(1+t)/t` is evaluated by its Taylor series.
pub const LOG1P_RATIO_SERIES_T: f64 = 1e-4;
/// Below this argument the derivatives of `ln(1+t)/t` use the Taylor series;
/// the closed forms lose roughly `t^-k` digits in the k-th derivative.
pub const LOG1P_RATIO_DERIV_SERIES_T: f64 = 0.5;

/// `ln(1+t)/t` with its removable singularity at `t = 0` filled in.
pub fn log1p_ratio(t: f64) -> f64 {
    if t.abs() < LOG1P_RATIO_SERIES_T {
        // 1 - t/2 + t^2/3 - t^3/4 + t^4/5
        1.0 + t * (-0.5 + t * (1.0 / 3.0 + t * (-0.25 + t * 0.2)))
    } else {
        t.ln_1p() / t
    }
}

/// Derivatives `L^(k)(t)`, `k = 0..=3`, of `L(t) = ln(1+t)/t` for `t >= 0`.
pub fn log1p_ratio_derivs(t: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    if t < LOG1P_RATIO_DERIV_SERIES_T {
        // L(t) = sum_m (-1)^m t^m / (m+1)
        for (k, slot) in out.iter_mut().enumerate() {
            let mut sum = 0.0;
            for m in k..400 {
                let falling: f64 = ((m - k + 1)..=m).map(|x| x as f64).product();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let term = sign * falling * t.powi((m - k) as i32) / (m + 1) as f64;
                sum += term;
                if m > k + 4 && term.abs() <= 1e-18 * sum.abs().max(1e-300) {
                    break;
                }
            }
            *slot = sum;
        }
        out[0] = log1p_ratio(t);
        return out;
    }
    // Leibniz rule on ln(1+t) * t^-1.
    let lp = t.ln_1p();
    let log_deriv = |k: usize| -> f64 {
        if k == 0 {
            lp
        } else {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * factorial(k - 1) / (1.0 + t).powi(k as i32)
        }
    };
    let inv_deriv = |j: usize| -> f64 {
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * factorial(j) / t.powi(j as i32 + 1)
    };
    for (m, slot) in out.iter_mut().enumerate() {
        *slot = (0..=m)
            .map(|k| binomial(m, k) * log_deriv(k) * inv_deriv(m - k))
            .sum();
    }
    out
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

pub fn binomial(m: usize, k: usize) -> f64 {
    factorial(m) / (factorial(k) * factorial(m - k))
}

/// Real dilogarithm `Li2(x) = -int_0^x ln(1-u)/u du` for `x <= 1`.
///
/// Returns NaN for `x > 1`, where the real branch ends.
pub fn dilog(x: f64) -> f64 {
    if x.is_nan() || x > 1.0 {
        return f64::NAN;
    }
    if x == 1.0 {
        return PI * PI / 6.0;
    }
    if x < -1.0 {
        // inversion
        let l = (-x).ln();
        return -PI * PI / 6.0 - 0.5 * l * l - dilog(1.0 / x);
    }
    if x < 0.0 {
        // Landen: maps [-1, 0) onto [0, 1/2)
        let l = (-x).ln_1p();
        return -dilog_series(x / (x - 1.0)) - 0.5 * l * l;
    }
    if x <= 0.5 {
        return dilog_series(x);
    }
    // reflection
    PI * PI / 6.0 - x.ln() * (1.0 - x).ln() - dilog_series(1.0 - x)
}

fn dilog_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = x;
    for k in 1..200 {
        let term = pow / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        pow *= x;
    }
    sum
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln(1 + e^x)`.
pub fn softplus(x: f64) -> f64 {
    if x > 35.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}
