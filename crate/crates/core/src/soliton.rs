//! The radial soliton profile `u(t)`, `t = ln ||z||^2`.
//!
//! The profile solves `(u')^{n-1} u'' e^{u'} = e^{nt}` with `u'(t) ~ e^t` as
//! `t -> -inf`. Writing `F_n(p) = int_0^p s^{n-1} e^s ds`, the left side is
//! `d/dt F_n(u')`, and the boundary behaviour fixes the integration constant,
//! so `u'(t) = F_n^{-1}(e^{nt}/n)`. Higher derivatives follow from the ODE:
//!
//! ```text
//! u''  = e^{nt} / ((u')^{n-1} e^{u'})
//! u''' = u'' (n - u'' - (n-1) u''/u')
//! ```
//!
//! Near the origin (`s = e^t` small) the potential derivatives
//! `u'/s, (u''-u')/s^2, ...` cancel catastrophically, so there the profile is
//! evaluated from the power series `u'(t) = s g(s)`, whose coefficients are
//! generated once per profile from `g^{n-1} (g + s g') e^{s g} = 1`, `g(0) = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::{Jet, KahlerPotential, ModelDescriptor, RadialCoordinates};
use crate::quad::gauss_legendre;
use crate::special::factorial;

/// Below this `s = e^t` the profile is evaluated from its power series.
pub const SERIES_S: f64 = 0.25;
const SERIES_TERMS: usize = 48;
pub const DEFAULT_NEWTON_TOL: f64 = 1e-13;
const MAX_NEWTON_ITERS: usize = 400;

/// `F_n(p) = int_0^p s^{n-1} e^s ds`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FIntegral {
    n: u32,
}

impl FIntegral {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("F_n needs n >= 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The recurrence `F_n = p^{n-1} e^p - (n-1) F_{n-1}` cancels for small
    /// `p`; below this the (all-positive) power series is used.
    fn series_cutoff(&self) -> f64 {
        if self.n <= 4 {
            0.5
        } else {
            self.n as f64
        }
    }

    fn series(&self, p: f64) -> f64 {
        let n = self.n as f64;
        let mut sum = 0.0;
        let mut pk_over_kfact = 1.0;
        for k in 0..1000 {
            let term = pk_over_kfact / (n + k as f64);
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
            pk_over_kfact *= p / (k + 1) as f64;
        }
        p.powi(self.n as i32) * sum
    }

    /// `F_n(p) = e^p poly(p) + c` from the recurrence.
    fn closed_parts(&self, p: f64) -> (f64, f64) {
        let (mut poly, mut c) = (1.0, -1.0);
        for m in 2..=self.n {
            let m1 = (m - 1) as f64;
            poly = p.powi(m as i32 - 1) - m1 * poly;
            c *= -m1;
        }
        (poly, c)
    }

    pub fn eval(&self, p: f64) -> Result<f64> {
        if !(p >= 0.0) {
            return Err(Error::Domain(format!("F_n argument {p} < 0")));
        }
        if p < self.series_cutoff() {
            return Ok(self.series(p));
        }
        let (poly, c) = self.closed_parts(p);
        let v = p.exp() * poly + c;
        if !v.is_finite() {
            return Err(Error::Range(format!("F_{}({p}) overflows", self.n)));
        }
        Ok(v)
    }

    /// `ln F_n(p)`, finite for every `p > 0`.
    pub fn ln_eval(&self, p: f64) -> Result<f64> {
        if !(p >= 0.0) || p.is_infinite() {
            return Err(Error::Domain(format!("F_n argument {p} out of range")));
        }
        if p < self.series_cutoff() {
            return Ok(self.series(p).ln());
        }
        let (poly, c) = self.closed_parts(p);
        Ok(p + (poly + c * (-p).exp()).ln())
    }

    /// `F_n'(p) = p^{n-1} e^p`.
    pub fn derivative(&self, p: f64) -> f64 {
        p.powi(self.n as i32 - 1) * p.exp()
    }
}

pub fn f_eval(f: &FIntegral, p: f64) -> Result<f64> {
    f.eval(p)
}

/// Solve `ln F_n(p) = ln_target` by safeguarded Newton iteration.
///
/// Newton steps that leave the current sign bracket are replaced by
/// bisection. Converges when the relative residual `|F_n(p)/target - 1|`
/// (to first order, `|ln F_n(p) - ln_target|`) is below `tol`, or when the
/// bracket has collapsed to rounding level.
pub fn invert_f(f: &FIntegral, ln_target: f64, tol: f64, guess: f64) -> Result<f64> {
    if !ln_target.is_finite() {
        return Err(Error::Domain(format!("ln target {ln_target} not finite")));
    }
    let nm1 = f.n as f64 - 1.0;
    let g = |p: f64| -> Result<f64> { Ok(f.ln_eval(p)? - ln_target) };

    let mut lo = 0.0f64;
    let mut hi = guess.max(1.0) + 10.0;
    while g(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Solver(format!("no bracket for ln target {ln_target}")));
        }
    }
    let mut p = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    for _ in 0..MAX_NEWTON_ITERS {
        let lnf = f.ln_eval(p)?;
        let r = lnf - ln_target;
        let slope = (nm1 * p.ln() + p - lnf).exp();
        if r.abs() <= tol {
            // one polishing step; quadratic convergence takes it to rounding level
            let polished = p - r / slope;
            return Ok(if polished > lo && polished < hi { polished } else { p });
        }
        if r < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(p);
        }
        let next = p - r / slope;
        p = if next.is_finite() && next > lo && next < hi {
            next
        } else if lo == 0.0 {
            0.5 * hi
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::Solver(format!(
        "F_{} inversion did not converge for ln target {ln_target}",
        f.n
    )))
}

/// The profile `u` of the complex-dimension-`n` soliton.
#[derive(Clone, Debug, PartialEq)]
pub struct SolitonProfile {
    f: FIntegral,
    newton_tol: f64,
    a0: f64,
    /// Taylor coefficients of `g(s) = u'(ln s)/s`.
    series: Vec<f64>,
}

impl SolitonProfile {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::Descriptor(format!("soliton dimension {n} not in 1..=64")));
        }
        let f = FIntegral::new(n as u32)?;
        Ok(Self {
            f,
            newton_tol: DEFAULT_NEWTON_TOL,
            a0: 0.0,
            series: profile_series(n as u32, SERIES_TERMS),
        })
    }

    pub fn with_newton_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1e-3) {
            return Err(Error::Descriptor(format!("newton_tol {tol} not in (0, 1e-3)")));
        }
        self.newton_tol = tol;
        Ok(self)
    }

    pub fn with_a0(mut self, a0: f64) -> Self {
        self.a0 = a0;
        self
    }

    pub fn n(&self) -> usize {
        self.f.n as usize
    }

    pub fn newton_tol(&self) -> f64 {
        self.newton_tol
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn f_integral(&self) -> FIntegral {
        self.f
    }

    pub fn series_coefficients(&self) -> &[f64] {
        &self.series
    }

    fn newton_guess(&self, t: f64) -> f64 {
        let n = self.n() as f64;
        if t <= 0.0 {
            t.exp()
        } else if t > 1.0 {
            n * t - n.ln()
        } else {
            // blend the two regimes on (0, 1]
            (1.0 - t) * t.exp() + t * (n * t - n.ln()).max(t.exp())
        }
    }

    /// `u'(t)` by Newton inversion of `F_n(u') = e^{nt}/n`, whatever `t`.
    pub fn u_prime_newton(&self, t: f64) -> Result<f64> {
        let n = self.n() as f64;
        invert_f(&self.f, n * t - n.ln(), self.newton_tol, self.newton_guess(t))
    }

    pub fn u_prime(&self, t: f64) -> Result<f64> {
        Ok(self.derivs(t)?[0])
    }

    pub fn u_second(&self, t: f64) -> Result<f64> {
        Ok(self.derivs(t)?[1])
    }

    pub fn u_third(&self, t: f64) -> Result<f64> {
        Ok(self.derivs(t)?[2])
    }

    pub fn u_fourth(&self, t: f64) -> Result<f64> {
        Ok(self.derivs(t)?[3])
    }

    /// `[u', u'', u''', u'''']` at `t`.
    pub fn derivs(&self, t: f64) -> Result<[f64; 4]> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("profile parameter t = {t} not finite")));
        }
        let s = t.exp();
        if s < SERIES_S {
            let g = self.g_derivs(s);
            return Ok([
                s * g[0],
                s * (g[0] + s * g[1]),
                s * (g[0] + s * (3.0 * g[1] + s * g[2])),
                s * (g[0] + s * (7.0 * g[1] + s * (6.0 * g[2] + s * g[3]))),
            ]);
        }
        let n = self.n() as f64;
        let u1 = self.u_prime_newton(t)?;
        let u2 = (n * t - (n - 1.0) * u1.ln() - u1).exp();
        let q = n - u2 - (n - 1.0) * u2 / u1;
        let u3 = u2 * q;
        let dq = -u3 - (n - 1.0) * (u3 * u1 - u2 * u2) / (u1 * u1);
        let u4 = u3 * q + u2 * dq;
        Ok([u1, u2, u3, u4])
    }

    /// `g^(k)(s)`, `k = 0..=3`, from the stored series.
    fn g_derivs(&self, s: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for m in (k..self.series.len()).rev() {
                let falling = factorial(m) / factorial(m - k);
                acc = acc * s + self.series[m] * falling;
            }
            *slot = acc;
        }
        out
    }

    /// `H^(m)(s)`, `m = 1..=4`, where `Phi = H(s)`, `s = ||z||^2`.
    ///
    /// `H' = u'/s`, `H'' = (u'' - u')/s^2`, `H''' = (u''' - 3u'' + 2u')/s^3`,
    /// `H'''' = (u'''' - 6u''' + 11u'' - 6u')/s^4`.
    pub fn potential_derivs(&self, s: f64) -> Result<[f64; 4]> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("s = {s} < 0")));
        }
        if s < SERIES_S {
            return Ok(self.g_derivs(s));
        }
        let [u1, u2, u3, u4] = self.derivs(s.ln())?;
        Ok([
            u1 / s,
            (u2 - u1) / (s * s),
            (u3 - 3.0 * u2 + 2.0 * u1) / (s * s * s),
            (u4 - 6.0 * u3 + 11.0 * u2 - 6.0 * u1) / (s * s * s * s),
        ])
    }

    /// `H(s) = a0 + int_0^s H'(r) dr`, integrated in the variable `p = u'`
    /// where the integrand `p F_n'(p) / (n F_n(p))` is smooth and bounded.
    pub fn potential_value(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("s = {s} < 0")));
        }
        if s == 0.0 {
            return Ok(self.a0);
        }
        let p_end = self.u_prime(s.ln())?;
        let n = self.n() as f64;
        let nm1 = n - 1.0;
        let f = self.f;
        let panels = (p_end / 0.25).ceil() as usize;
        let integral = gauss_legendre(
            |p| {
                let lnf = f.ln_eval(p).unwrap_or(f64::NAN);
                p * (nm1 * p.ln() + p - lnf).exp() / n
            },
            0.0,
            p_end,
            panels,
        );
        if !integral.is_finite() {
            return Err(Error::Domain(format!("potential value at s = {s} not finite")));
        }
        Ok(self.a0 + integral)
    }

    /// Relative residual `|(u')^{n-1} u'' e^{u'} - e^{nt}| / e^{nt}` with
    /// `u''` obtained by differentiating the inverted `u'` numerically, so
    /// the check does not reuse the ODE that produced `u''`.
    pub fn ode_residual(&self, t: f64) -> Result<f64> {
        const H: f64 = 0.02;
        const STENCIL: [(f64, f64); 6] = [
            (-3.0, -1.0),
            (-2.0, 9.0),
            (-1.0, -45.0),
            (1.0, 45.0),
            (2.0, -9.0),
            (3.0, 1.0),
        ];
        let mut acc = 0.0;
        for (off, w) in STENCIL {
            acc += w * self.u_prime(t + off * H)?;
        }
        let u2 = acc / (60.0 * H);
        let u1 = self.u_prime(t)?;
        let n = self.n() as f64;
        let lhs_over_rhs = ((n - 1.0) * u1.ln() + u1 - n * t).exp() * u2;
        Ok((lhs_over_rhs - 1.0).abs())
    }

    /// Table of `(t, u', u'', ode_residual)` on an even grid.
    pub fn table(&self, t_min: f64, t_max: f64, points: usize) -> Result<Vec<ProfileRow>> {
        if points < 2 || !(t_max > t_min) {
            return Err(Error::Domain("profile table needs t_max > t_min and >= 2 points".into()));
        }
        (0..points)
            .map(|i| {
                let t = t_min + (t_max - t_min) * i as f64 / (points - 1) as f64;
                let d = self.derivs(t)?;
                Ok(ProfileRow {
                    t,
                    u_prime: d[0],
                    u_second: d[1],
                    ode_residual: self.ode_residual(t)?,
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub t: f64,
    pub u_prime: f64,
    pub u_second: f64,
    pub ode_residual: f64,
}

/// Taylor coefficients of `g` solving `g^{n-1} (g + s g') e^{s g} = 1`.
///
/// The coefficient of `s^m` on the left is `(n + m) a_m` plus terms in
/// `a_0..a_{m-1}`, so each `a_m` follows from the lower ones.
fn profile_series(n: u32, terms: usize) -> Vec<f64> {
    let mut a = vec![0.0; terms];
    a[0] = 1.0;
    for m in 1..terms {
        let c = lhs_coefficient(&a[..=m], n, m);
        a[m] = -c / (n as f64 + m as f64);
    }
    a
}

fn mul_trunc(x: &[f64], y: &[f64], deg: usize) -> Vec<f64> {
    let mut out = vec![0.0; deg + 1];
    for (i, xi) in x.iter().enumerate().take(deg + 1) {
        for (j, yj) in y.iter().enumerate().take(deg + 1 - i) {
            out[i + j] += xi * yj;
        }
    }
    out
}

fn lhs_coefficient(a: &[f64], n: u32, m: usize) -> f64 {
    let mut gp = vec![0.0; m + 1];
    gp[0] = 1.0;
    for _ in 1..n {
        gp = mul_trunc(&gp, a, m);
    }
    let q: Vec<f64> = a.iter().enumerate().map(|(k, ak)| (k + 1) as f64 * ak).collect();
    // exp(s g): e' = (s g)' e
    let sg: Vec<f64> = (0..=m).map(|k| if k == 0 { 0.0 } else { a[k - 1] }).collect();
    let mut e = vec![0.0; m + 1];
    e[0] = 1.0;
    for k in 1..=m {
        e[k] = (1..=k).map(|j| j as f64 * sg[j] * e[k - j]).sum::<f64>() / k as f64;
    }
    let prod = mul_trunc(&mul_trunc(&gp, &q, m), &e, m);
    prod[m]
}

/// The soliton metric's radial potential `Phi(z) = u(ln ||z||^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolitonPotential {
    profile: SolitonProfile,
}

impl SolitonPotential {
    pub fn new(profile: SolitonProfile) -> Self {
        Self { profile }
    }

    pub fn profile(&self) -> &SolitonProfile {
        &self.profile
    }
}

pub fn soliton_potential(p: SolitonProfile) -> SolitonPotential {
    SolitonPotential::new(p)
}

impl KahlerPotential for SolitonPotential {
    fn dim(&self) -> usize {
        self.profile.n()
    }

    fn value(&self, t: &RadialCoordinates) -> Result<f64> {
        check(self.dim(), t)?;
        self.profile.potential_value(t.sum())
    }

    fn jet(&self, t: &RadialCoordinates, order: usize) -> Result<Jet> {
        check(self.dim(), t)?;
        let h = self.profile.potential_derivs(t.sum())?;
        Ok(Jet::radial(self.dim(), order, &h))
    }

    fn is_radial(&self) -> bool {
        true
    }

    fn flux_from_log(&self, log_t: &[f64]) -> Result<f64> {
        if log_t.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: log_t.len(),
            });
        }
        let m = log_t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let log_s = m + log_t.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
        self.profile.u_prime(log_s)
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::Soliton {
            n: self.dim(),
            newton_tol: Some(self.profile.newton_tol),
            a0: self.profile.a0,
        }
    }
}

fn check(n: usize, t: &RadialCoordinates) -> Result<()> {
    if t.dim() == n {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: n,
            got: t.dim(),
        })
    }
}
