//! Totally geodesic complex submanifolds through the origin of a product of
//! cigars, and the tools that test them.
//!
//! The catalog consists of linear subspaces `w_j = alpha_j p_{sigma(j)}`:
//! each coordinate is either identically zero or a unit-phase copy of one of
//! the `k` parameters. For a holomorphic curve `(f_1, f_2)` in the product of
//! two cigars, the Gauss-equation defect between the induced curvature and
//! the ambient one equals `-|A|^2 / D`, where
//!
//! ```text
//! A = (f2'' f1' - f1'' f2') N1 N2 + f1'^2 f2' conj(f1) N2 - f2'^2 f1' conj(f2) N1
//! D = (|f1'|^2 N2 + |f2'|^2 N1) N1^2 N2^2,      N_j = 1 + |f_j|^2
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::darboux::DarbouxMap;
use crate::error::{Error, Result};
use crate::geodesic::{geodesic_integrate, GeodesicState, StepControl};
use crate::potential::{ComplexVector, KahlerPotential};
use crate::sampling;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Phase tolerance for catalog membership.
pub const UNIT_PHASE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseBlockEmbedding {
    n: usize,
    k: usize,
    sigma: Vec<usize>,
    alpha: Vec<C>,
}

impl PhaseBlockEmbedding {
    /// `sigma[j] = 0` pins coordinate `j` to zero; `sigma[j] = a >= 1` makes
    /// it `alpha[j] * p_a`. Every label `1..=k` must occur.
    pub fn new(sigma: Vec<usize>, alpha: Vec<C>) -> Result<Self> {
        let n = sigma.len();
        if alpha.len() != n {
            return Err(Error::Dimension { expected: n, got: alpha.len() });
        }
        let k = sigma.iter().copied().max().unwrap_or(0);
        if k == 0 {
            return Err(Error::Domain("embedding has no free parameter".into()));
        }
        if let Some(a) = (1..=k).find(|a| !sigma.contains(a)) {
            return Err(Error::Domain(format!("parameter {a} of {k} unused in sigma {sigma:?}")));
        }
        for (j, (&s, a)) in sigma.iter().zip(&alpha).enumerate() {
            if s != 0 && (a.norm() - 1.0).abs() > UNIT_PHASE_TOL {
                return Err(Error::Domain(format!("alpha_{j} = {a} is not a unit phase")));
            }
        }
        Ok(Self { n, k, sigma, alpha })
    }

    /// The standard block `C^k x {0}`.
    pub fn coordinate_block(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Domain(format!("block dimension {k} not in 1..={n}")));
        }
        let sigma = (0..n).map(|j| if j < k { j + 1 } else { 0 }).collect();
        Self::new(sigma, vec![C::new(1.0, 0.0); n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn alpha(&self) -> &[C] {
        &self.alpha
    }

    /// Same submanifold family with `alpha_j` multiplied by `phase`.
    pub fn rotate_phase(&self, j: usize, phase: C) -> Result<Self> {
        let mut alpha = self.alpha.clone();
        alpha[j] *= phase;
        Self::new(self.sigma.clone(), alpha)
    }

    pub fn embed(&self, p: &[C]) -> Result<ComplexVector> {
        if p.len() != self.k {
            return Err(Error::Dimension { expected: self.k, got: p.len() });
        }
        ComplexVector::new(
            self.sigma
                .iter()
                .zip(&self.alpha)
                .map(|(&s, &a)| if s == 0 { ZERO } else { a * p[s - 1] })
                .collect(),
        )
    }

    /// Orthonormal complex basis of the image, one vector per parameter.
    pub fn basis(&self) -> Vec<Vec<C>> {
        (1..=self.k)
            .map(|a| {
                let count = self.sigma.iter().filter(|&&s| s == a).count() as f64;
                self.sigma
                    .iter()
                    .zip(&self.alpha)
                    .map(|(&s, &al)| if s == a { al / count.sqrt() } else { ZERO })
                    .collect()
            })
            .collect()
    }

    pub fn distance_to_image(&self, z: &[C]) -> f64 {
        distance_to_span(z, &self.basis())
    }
}

fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean distance from `z` to the complex span of an orthonormal set.
pub fn distance_to_span(z: &[C], basis: &[Vec<C>]) -> f64 {
    let mut r = z.to_vec();
    for b in basis {
        let c = inner(b, z);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= c * bi;
        }
    }
    r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn gram_schmidt(vs: &[Vec<C>]) -> Vec<Vec<C>> {
    let mut out: Vec<Vec<C>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for b in &out {
            let c = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
        let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-14 {
            out.push(w.into_iter().map(|c| c / norm).collect());
        }
    }
    out
}

/// Every catalog shape in dimension `n`, with seeded random unit phases.
///
/// Shapes are the labelings `sigma` with labels in first-occurrence order,
/// at least one nonzero; there are `Bell(n+1) - 1` of them.
pub fn catalog(n: usize, seed: u64) -> Vec<PhaseBlockEmbedding> {
    fn rec(pos: usize, max: usize, cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if pos == n {
            if max > 0 {
                out.push(cur.clone());
            }
            return;
        }
        for label in 0..=max + 1 {
            cur.push(label);
            rec(pos + 1, max.max(label), cur, n, out);
            cur.pop();
        }
    }
    let mut shapes = Vec::new();
    rec(0, 0, &mut Vec::new(), n, &mut shapes);
    let mut rng = sampling::rng(seed);
    shapes
        .into_iter()
        .map(|sigma| {
            let alpha = (0..n).map(|_| sampling::unit_phase(&mut rng)).collect();
            PhaseBlockEmbedding::new(sigma, alpha).expect("valid catalog shape")
        })
        .collect()
}

/// Launch a geodesic at `embed(p0)` with velocity `embed(direction)` and
/// return the largest Euclidean distance from the image subspace.
pub fn total_geodesy_residual<P: KahlerPotential + ?Sized>(
    model: &P,
    s: &PhaseBlockEmbedding,
    p0: &[C],
    direction: &[C],
    length: f64,
    ctrl: &StepControl,
) -> Result<f64> {
    let start = GeodesicState::new(
        s.embed(p0)?.into_inner(),
        s.embed(direction)?.into_inner(),
    )?;
    let tr = geodesic_integrate(model, &start, length, ctrl)?;
    Ok(tr
        .samples
        .iter()
        .map(|smp| s.distance_to_image(&smp.z))
        .fold(0.0, f64::max))
}

/// A polynomial `sum_m c_m z^m` with `c_0 = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HoloPoly {
    coeffs: Vec<C>,
}

impl HoloPoly {
    /// From the coefficients of `z, z^2, ...`.
    pub fn from_tail(tail: &[C]) -> Self {
        let mut coeffs = vec![ZERO];
        coeffs.extend_from_slice(tail);
        Self { coeffs }
    }

    pub fn new(coeffs: Vec<C>) -> Result<Self> {
        match coeffs.first() {
            Some(c0) if *c0 != ZERO => Err(Error::Domain(format!(
                "curve must pass through the origin, constant term {c0}"
            ))),
            _ => Ok(Self { coeffs }),
        }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// `f^(k)(z)`.
    pub fn eval_deriv(&self, k: usize, z: C) -> C {
        let mut acc = ZERO;
        for m in (k..self.coeffs.len()).rev() {
            let falling: f64 = ((m - k + 1)..=m).map(|x| x as f64).product();
            acc = acc * z + self.coeffs[m] * falling;
        }
        acc
    }

    pub fn eval(&self, z: C) -> C {
        self.eval_deriv(0, z)
    }
}

/// A holomorphic curve `z -> (f1(z), f2(z))` in `C^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HoloCurvePair {
    pub f1: HoloPoly,
    pub f2: HoloPoly,
}

impl HoloCurvePair {
    pub fn new(f1: HoloPoly, f2: HoloPoly) -> Self {
        Self { f1, f2 }
    }

    /// The graph `z -> (z, z^2)`, which is not totally geodesic.
    pub fn parabola() -> Self {
        let one = C::new(1.0, 0.0);
        Self::new(HoloPoly::from_tail(&[one]), HoloPoly::from_tail(&[ZERO, one]))
    }

    pub fn point(&self, z: C) -> [C; 2] {
        [self.f1.eval(z), self.f2.eval(z)]
    }

    pub fn tangent(&self, z: C) -> [C; 2] {
        [self.f1.eval_deriv(1, z), self.f2.eval_deriv(1, z)]
    }

    fn jets(&self, z: C) -> [[C; 3]; 2] {
        let j = |f: &HoloPoly| [f.eval(z), f.eval_deriv(1, z), f.eval_deriv(2, z)];
        [j(&self.f1), j(&self.f2)]
    }
}

pub fn a_obstruction(pair: &HoloCurvePair, z: C) -> C {
    let [[f1, f1p, f1pp], [f2, f2p, f2pp]] = pair.jets(z);
    let n1 = 1.0 + f1.norm_sqr();
    let n2 = 1.0 + f2.norm_sqr();
    (f2pp * f1p - f1pp * f2p) * (n1 * n2) + f1p * f1p * f2p * f1.conj() * n2
        - f2p * f2p * f1p * f2.conj() * n1
}

/// Induced metric `g(z) = sum_j |f_j'|^2 / (1 + |f_j|^2)` with its Wirtinger
/// derivatives, computed from the polynomial jets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InducedMetric1D {
    pub g: f64,
    pub dz: C,
    pub dzdzbar: f64,
}

impl InducedMetric1D {
    pub fn at(pair: &HoloCurvePair, z: C) -> Self {
        let mut g = 0.0;
        let mut dz = ZERO;
        let mut ddz = ZERO;
        for [b, a, ap] in pair.jets(z) {
            let nn = 1.0 + b.norm_sqr();
            let a2 = a.norm_sqr();
            g += a2 / nn;
            dz += ap * a.conj() / nn - a * a * a.conj() * b.conj() / (nn * nn);
            ddz += ap.norm_sqr() / nn
                - (ap * a.conj() * a.conj() * b + a * a * ap.conj() * b.conj() + a2 * a2) / (nn * nn)
                + 2.0 * a2 * a2 * b.norm_sqr() / (nn * nn * nn);
        }
        Self { g, dz, dzdzbar: ddz.re }
    }

    /// `R(d/dz, d/dzbar, d/dz, d/dzbar) = -g_{z zbar} + |g_z|^2 / g`.
    pub fn curvature(&self) -> f64 {
        -self.dzdzbar + self.dz.norm_sqr() / self.g
    }
}

/// Ambient curvature of the product of two cigars on the tangent `f'(z)`.
pub fn ambient_curvature(pair: &HoloCurvePair, z: C) -> f64 {
    pair.jets(z)
        .iter()
        .map(|[b, a, _]| a.norm_sqr().powi(2) / (1.0 + b.norm_sqr()).powi(3))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DefectPair {
    /// Induced minus ambient curvature.
    pub direct: f64,
    /// `-|A|^2 / D`.
    pub via_a: f64,
}

pub fn curvature_defect(pair: &HoloCurvePair, z: C) -> Result<DefectPair> {
    let [[f1, f1p, _], [f2, f2p, _]] = pair.jets(z);
    if f1p == ZERO && f2p == ZERO {
        return Err(Error::DegenerateTangent(z));
    }
    let direct = InducedMetric1D::at(pair, z).curvature() - ambient_curvature(pair, z);
    let n1 = 1.0 + f1.norm_sqr();
    let n2 = 1.0 + f2.norm_sqr();
    let d = (f1p.norm_sqr() * n2 + f2p.norm_sqr() * n1) * n1 * n1 * n2 * n2;
    let via_a = -a_obstruction(pair, z).norm_sqr() / d;
    Ok(DefectPair { direct, via_a })
}

fn distance_to_curve(pair: &HoloCurvePair, q: &[C], guess: C) -> (f64, C) {
    let dist = |w: C| {
        let p = pair.point(w);
        ((p[0] - q[0]).norm_sqr() + (p[1] - q[1]).norm_sqr()).sqrt()
    };
    let radius = 2.0 + 2.0 * (q[0].norm() + q[1].norm());
    const GRID: usize = 61;
    let mut starts = vec![guess];
    let mut best_grid = (f64::INFINITY, ZERO);
    for a in 0..GRID {
        for b in 0..GRID {
            let w = C::new(
                -radius + 2.0 * radius * a as f64 / (GRID - 1) as f64,
                -radius + 2.0 * radius * b as f64 / (GRID - 1) as f64,
            );
            let d = dist(w);
            if d < best_grid.0 {
                best_grid = (d, w);
            }
        }
    }
    starts.push(best_grid.1);
    let mut best = (f64::INFINITY, guess);
    for mut w in starts {
        // Gauss-Newton on |f(w) - q|^2; f is holomorphic so the step is complex-linear
        for _ in 0..50 {
            let p = pair.point(w);
            let jac = pair.tangent(w);
            let r = [p[0] - q[0], p[1] - q[1]];
            let jj = jac[0].norm_sqr() + jac[1].norm_sqr();
            if jj < 1e-300 {
                break;
            }
            let step = -(jac[0].conj() * r[0] + jac[1].conj() * r[1]) / jj;
            w += step;
            if step.norm() < 1e-15 * (1.0 + w.norm()) {
                break;
            }
        }
        let d = dist(w);
        if d < best.0 {
            best = (d, w);
        }
    }
    best
}

/// As [`total_geodesy_residual`] for the curve `pair` in the product of two
/// cigars: launch at `f(p0)` along `f'(p0)` and track the distance to the
/// curve's image.
pub fn curve_geodesy_residual<P: KahlerPotential + ?Sized>(
    model: &P,
    pair: &HoloCurvePair,
    p0: C,
    length: f64,
    ctrl: &StepControl,
) -> Result<f64> {
    if model.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: model.dim() });
    }
    let start = GeodesicState::new(pair.point(p0).to_vec(), pair.tangent(p0).to_vec())?;
    let tr = geodesic_integrate(model, &start, length, ctrl)?;
    let mut w = p0;
    let mut worst = 0.0f64;
    for smp in &tr.samples {
        let (d, w_new) = distance_to_curve(pair, &smp.z, w);
        w = w_new;
        worst = worst.max(d);
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct CirizaReport {
    pub samples: usize,
    pub max_residual: f64,
    pub rank: usize,
    pub expected_rank: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Relative singular-value cutoff for the numerical complex rank.
pub const RANK_TOL: f64 = 1e-9;

/// Complex rank of the matrix whose rows are `rows`.
pub fn complex_rank(rows: &[Vec<C>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let sv = m.svd(false, false).singular_values;
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Push `embed(s, p_i)` through the Darboux map and measure how far the
/// images are from the complex span of the mapped tangent frame at 0.
pub fn ciriza_image_check<P: KahlerPotential>(
    map: &DarbouxMap<P>,
    s: &PhaseBlockEmbedding,
    params: &[Vec<C>],
    tolerance: f64,
) -> Result<CirizaReport> {
    if map.dim() != s.dim() {
        return Err(Error::Dimension { expected: map.dim(), got: s.dim() });
    }
    let jac0 = map.jacobian(&ComplexVector::zeros(s.dim()))?;
    let frame = gram_schmidt(&s.basis().iter().map(|b| jac0.apply(b)).collect::<Vec<_>>());
    let mut images = Vec::with_capacity(params.len());
    let mut worst = 0.0f64;
    for p in params {
        let w = map.map_point(&s.embed(p)?)?.into_inner();
        worst = worst.max(distance_to_span(&w, &frame));
        images.push(w);
    }
    let rank = complex_rank(&images);
    Ok(CirizaReport {
        samples: params.len(),
        max_residual: worst,
        rank,
        expected_rank: s.k(),
        tolerance,
        pass: worst <= tolerance && rank == s.k(),
    })
}

/// Complex rank of the Darboux images of points on a curve.
pub fn curve_image_rank<P: KahlerPotential>(
    map: &DarbouxMap<P>,
    pair: &HoloCurvePair,
    params: &[C],
) -> Result<usize> {
    let images = params
        .iter()
        .map(|&p| Ok(map.map_point(&ComplexVector::new(pair.point(p).to_vec())?)?.into_inner()))
        .collect::<Result<Vec<_>>>()?;
    Ok(complex_rank(&images))
}

/// `count` parameter vectors in the polydisc of radius `radius` in `C^k`.
pub fn sample_params(k: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<C>> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| (0..k).map(|_| sampling::disc_point(&mut rng, radius)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialModel;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn embed_examples() {
        let s = PhaseBlockEmbedding::new(vec![1, 0], vec![c(1.0, 0.0); 2]).unwrap();
        let w = s.embed(&[c(2.0, -1.0)]).unwrap();
        assert_eq!(w.as_slice(), &[c(2.0, -1.0), ZERO]);
        let s = PhaseBlockEmbedding::new(vec![1, 1], vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let w = s.embed(&[c(2.0, -1.0)]).unwrap();
        assert_eq!(w.as_slice(), &[c(2.0, -1.0), c(1.0, 2.0)]);
        assert_eq!(s.embed(&[ZERO]).unwrap().norm(), 0.0);
    }

    #[test]
    fn invalid_embeddings() {
        assert!(PhaseBlockEmbedding::new(vec![0, 0], vec![c(1.0, 0.0); 2]).is_err());
        assert!(PhaseBlockEmbedding::new(vec![2, 0], vec![c(1.0, 0.0); 2]).is_err());
        assert!(PhaseBlockEmbedding::new(vec![1, 1], vec![c(1.0, 0.0), c(2.0, 0.0)]).is_err());
        // phase of a pinned coordinate is ignored
        assert!(PhaseBlockEmbedding::new(vec![1, 0], vec![c(1.0, 0.0), c(2.0, 0.0)]).is_ok());
    }

    #[test]
    fn catalog_sizes_are_bell_numbers() {
        // Bell(n+1) - 1
        assert_eq!(catalog(1, 0).len(), 1);
        assert_eq!(catalog(2, 0).len(), 4);
        assert_eq!(catalog(3, 0).len(), 14);
        assert_eq!(catalog(4, 0).len(), 51);
    }

    #[test]
    fn image_contains_embedded_points() {
        for s in catalog(3, 9) {
            let p: Vec<C> = (0..s.k()).map(|i| c(0.3 * i as f64 + 0.1, -0.7)).collect();
            let w = s.embed(&p).unwrap();
            assert!(s.distance_to_image(w.as_slice()) < 1e-15);
        }
    }

    #[test]
    fn a_obstruction_examples() {
        let one = c(1.0, 0.0);
        let diag = HoloCurvePair::new(HoloPoly::from_tail(&[one]), HoloPoly::from_tail(&[one]));
        let axis = HoloCurvePair::new(HoloPoly::from_tail(&[one]), HoloPoly::from_tail(&[]));
        for z in [c(0.0, 0.0), c(1.0, 2.0), c(-0.4, 0.1)] {
            assert_eq!(a_obstruction(&diag, z), ZERO);
            assert_eq!(a_obstruction(&axis, z), ZERO);
        }
        let a = a_obstruction(&HoloCurvePair::parabola(), one);
        assert!((a - c(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn defect_of_parabola_at_one() {
        let d = curvature_defect(&HoloCurvePair::parabola(), c(1.0, 0.0)).unwrap();
        assert!((d.via_a + 0.1).abs() < 1e-15);
        assert!((d.direct + 0.1).abs() < 1e-14);
    }

    #[test]
    fn defect_vanishes_on_phase_diagonal() {
        let one = c(1.0, 0.0);
        let al = C::from_polar(1.0, 2.1);
        let pair = HoloCurvePair::new(HoloPoly::from_tail(&[one]), HoloPoly::from_tail(&[al]));
        let z = c(0.6, -1.2);
        let d = curvature_defect(&pair, z).unwrap();
        assert!(d.direct.abs() < 1e-15 && d.via_a.abs() < 1e-30);
        assert!(a_obstruction(&pair, z).norm() < 1e-15);
    }

    #[test]
    fn induced_metric_matches_finite_differences() {
        let pair = HoloCurvePair::new(
            HoloPoly::from_tail(&[c(0.5, 1.0), c(-0.2, 0.3)]),
            HoloPoly::from_tail(&[c(1.0, 0.0), c(0.0, 0.0), c(0.4, -0.1)]),
        );
        let z = c(0.3, -0.5);
        let g = |w: C| InducedMetric1D::at(&pair, w).g;
        let h = 1e-4;
        let gx = (g(z + h) - g(z - h)) / (2.0 * h);
        let gy = (g(z + c(0.0, h)) - g(z - c(0.0, h))) / (2.0 * h);
        let lap = (g(z + h) + g(z - h) + g(z + c(0.0, h)) + g(z - c(0.0, h)) - 4.0 * g(z)) / (h * h);
        let m = InducedMetric1D::at(&pair, z);
        assert!((m.dz - c(0.5 * gx, -0.5 * gy)).norm() < 1e-7);
        assert!((m.dzdzbar - 0.25 * lap).abs() < 1e-5);
    }

    #[test]
    fn degenerate_tangent_is_reported() {
        let pair = HoloCurvePair::new(
            HoloPoly::from_tail(&[ZERO, c(1.0, 0.0)]),
            HoloPoly::from_tail(&[ZERO, c(1.0, 0.0)]),
        );
        assert!(matches!(curvature_defect(&pair, ZERO), Err(Error::DegenerateTangent(_))));
        assert!(HoloPoly::new(vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn axis_geodesic_stays_on_axis() {
        let m = PotentialModel::cigar(2).unwrap();
        let s = PhaseBlockEmbedding::coordinate_block(2, 1).unwrap();
        let r = total_geodesy_residual(&m, &s, &[c(0.3, 0.1)], &[c(0.6, 0.8)], 10.0, &StepControl::default())
            .unwrap();
        assert!(r <= 1e-9, "{r}");
    }

    #[test]
    fn ciriza_block_images_have_zeros() {
        let map = DarbouxMap::new(PotentialModel::cigar(3).unwrap());
        let s = PhaseBlockEmbedding::coordinate_block(3, 2).unwrap();
        let params = sample_params(2, 20, 4.0, 1);
        for p in &params {
            let w = map.map_point(&s.embed(p).unwrap()).unwrap();
            assert_eq!(w[2], ZERO);
        }
        let rep = ciriza_image_check(&map, &s, &params, 1e-9).unwrap();
        assert!(rep.pass && rep.rank == 2);
    }

    #[test]
    fn parabola_images_span_two_dimensions() {
        let map = DarbouxMap::new(PotentialModel::cigar(2).unwrap());
        let params: Vec<C> = sample_params(1, 30, 2.0, 4).into_iter().map(|p| p[0]).collect();
        assert_eq!(curve_image_rank(&map, &HoloCurvePair::parabola(), &params).unwrap(), 2);
    }
}
