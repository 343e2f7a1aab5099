//! Rotation-invariant Kähler potentials `Phi(t_1, ..., t_n)` with `t_j = |z_j|^2`.
//!
//! A potential is exposed through its partial derivatives in the `t`
//! variables (a [`Jet`]); everything geometric (metric, Kähler form,
//! curvature, the Darboux map) is assembled from those by the chain rule
//!
//! ```text
//! g_{j kbar} = d^2 Phi / dz_j dzbar_k = delta_jk Phi_j + zbar_j z_k Phi_jk
//! ```
//!
//! The Kähler form is normalized as `omega = (i/2) ddbar Phi`, so the flat
//! potential `sum_j t_j` produces the standard form `sum_j dx_j ^ dy_j`.

use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::PolydiscSampler;
use crate::soliton::{SolitonPotential, SolitonProfile};
use crate::special;

/// A point `z = (z_1, ..., z_n)` of `C^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(format!("coordinates {coords:?}")));
        }
        Ok(Self(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_real(xy: &[f64]) -> Result<Self> {
        if !xy.len().is_multiple_of(2) {
            return Err(Error::Dimension {
                expected: xy.len() + 1,
                got: xy.len(),
            });
        }
        Self::new(
            xy.chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Real coordinates in the order `(x_1, y_1, ..., x_n, y_n)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|c| c * s).collect())
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// The moduli `t_j = |z_j|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialCoordinates(Vec<f64>);

impl RadialCoordinates {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if let Some(bad) = t.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::Domain(format!("radial coordinate {bad} is not >= 0")));
        }
        Ok(Self(t))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub fn radial_coords(z: &ComplexVector) -> RadialCoordinates {
    RadialCoordinates(z.as_slice().iter().map(|c| c.norm_sqr()).collect())
}

/// Partial derivatives of a potential in `t`, orders `1..=order` (`order <= 4`).
///
/// The order-`m` block is stored densely with `n^m` entries in row-major
/// multi-index order.
#[derive(Clone, Debug)]
pub struct Jet {
    n: usize,
    order: usize,
    blocks: Vec<Vec<f64>>,
}

pub const MAX_JET_ORDER: usize = 4;

impl Jet {
    pub fn zeros(n: usize, order: usize) -> Self {
        assert!((1..=MAX_JET_ORDER).contains(&order), "jet order {order}");
        let blocks = (1..=order).map(|m| vec![0.0; n.pow(m as u32)]).collect();
        Self { n, order, blocks }
    }

    /// Build a jet entry by entry from a function of the multi-index.
    pub fn from_fn(n: usize, order: usize, f: impl Fn(&[usize]) -> f64) -> Self {
        let mut jet = Self::zeros(n, order);
        for m in 1..=order {
            let mut idx = vec![0usize; m];
            for slot in jet.blocks[m - 1].iter_mut() {
                *slot = f(&idx);
                // odometer increment
                for pos in (0..m).rev() {
                    idx[pos] += 1;
                    if idx[pos] < n {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        jet
    }

    /// A radial potential `Phi = H(t_1 + ... + t_n)`: every order-`m`
    /// derivative equals `H^(m)`; `h[m-1]` holds `H^(m)`.
    pub fn radial(n: usize, order: usize, h: &[f64]) -> Self {
        Self::from_fn(n, order, |idx| h[idx.len() - 1])
    }

    /// A separable potential `Phi = sum_j H_j(t_j)`; `per[j][m-1]` holds `H_j^(m)`.
    pub fn separable(order: usize, per: &[[f64; 4]]) -> Self {
        Self::from_fn(per.len(), order, |idx| {
            if idx.iter().all(|&i| i == idx[0]) {
                per[idx[0]][idx.len() - 1]
            } else {
                0.0
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let m = idx.len();
        assert!(m >= 1 && m <= self.order, "derivative order {m} not in jet");
        let off = idx.iter().fold(0, |acc, &i| acc * self.n + i);
        self.blocks[m - 1][off]
    }

    pub fn d1(&self, j: usize) -> f64 {
        self.blocks[0][j]
    }

    pub fn d2(&self, j: usize, k: usize) -> f64 {
        self.blocks[1][j * self.n + k]
    }

    pub fn d3(&self, j: usize, k: usize, l: usize) -> f64 {
        self.blocks[2][(j * self.n + k) * self.n + l]
    }

    pub fn d4(&self, j: usize, k: usize, l: usize, m: usize) -> f64 {
        self.blocks[3][((j * self.n + k) * self.n + l) * self.n + m]
    }

    fn ensure_finite(self, t: &RadialCoordinates) -> Result<Self> {
        if self.blocks.iter().flatten().all(|x| x.is_finite()) {
            Ok(self)
        } else {
            Err(Error::Domain(format!(
                "non-finite potential derivative at t = {:?}",
                t.as_slice()
            )))
        }
    }
}

/// A rotation-invariant Kähler potential on `C^n`.
pub trait KahlerPotential: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// `Phi(t)`.
    fn value(&self, t: &RadialCoordinates) -> Result<f64>;

    /// Derivatives in `t` up to `order` (at most 4).
    fn jet(&self, t: &RadialCoordinates, order: usize) -> Result<Jet>;

    fn is_radial(&self) -> bool {
        false
    }

    fn is_separable(&self) -> bool {
        false
    }

    fn deriv(&self, index: &[usize], t: &RadialCoordinates) -> Result<f64> {
        Ok(self.jet(t, index.len())?.get(index))
    }

    /// `sum_j Phi_j t_j` evaluated from `ln t_j`, the quantity whose growth
    /// makes the Darboux map proper. Models whose flux grows only
    /// logarithmically override this to stay finite for huge `t`.
    fn flux_from_log(&self, log_t: &[f64]) -> Result<f64> {
        let t = RadialCoordinates::new(log_t.iter().map(|l| l.exp()).collect())?;
        let jet = self.jet(&t, 1)?;
        Ok((0..self.dim()).map(|j| jet.d1(j) * t.as_slice()[j]).sum())
    }

    fn descriptor(&self) -> ModelDescriptor;
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

/// Product of `n` cigar solitons: `Phi_j = ln(1+t_j)/t_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CigarProduct {
    n: usize,
}

impl CigarProduct {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Descriptor("cigar product needs n >= 1".into()));
        }
        Ok(Self { n })
    }
}

impl KahlerPotential for CigarProduct {
    fn dim(&self) -> usize {
        self.n
    }

    /// `sum_j -Li2(-t_j)`, i.e. `sum_j 2 int_0^{|z_j|} ln(1+s^2)/s ds`.
    fn value(&self, t: &RadialCoordinates) -> Result<f64> {
        check_dim(self.n, t.dim())?;
        Ok(t.as_slice().iter().map(|&tj| -special::dilog(-tj)).sum())
    }

    fn jet(&self, t: &RadialCoordinates, order: usize) -> Result<Jet> {
        check_dim(self.n, t.dim())?;
        let per: Vec<[f64; 4]> = t
            .as_slice()
            .iter()
            .map(|&tj| {
                let mut d = if order > 1 {
                    special::log1p_ratio_derivs(tj)
                } else {
                    [0.0; 4]
                };
                d[0] = special::log1p_ratio(tj);
                d
            })
            .collect();
        Jet::separable(order, &per).ensure_finite(t)
    }

    fn is_separable(&self) -> bool {
        true
    }

    fn flux_from_log(&self, log_t: &[f64]) -> Result<f64> {
        check_dim(self.n, log_t.len())?;
        Ok(log_t.iter().map(|&l| special::softplus(l)).sum())
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::Cigar { n: self.n }
    }
}

/// One term `coef * t_1^pow[0] * ... * t_n^pow[n-1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub pow: Vec<u32>,
}

/// A polynomial potential in `t_1, ..., t_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyPotential {
    n: usize,
    terms: Vec<Monomial>,
}

impl PolyPotential {
    pub fn new(n: usize, terms: Vec<Monomial>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Descriptor("poly potential needs n >= 1".into()));
        }
        for m in &terms {
            if m.pow.len() != n {
                return Err(Error::Descriptor(format!(
                    "monomial {:?} has {} exponents, expected {n}",
                    m.pow,
                    m.pow.len()
                )));
            }
            if !m.coef.is_finite() {
                return Err(Error::Descriptor(format!("coefficient {} not finite", m.coef)));
            }
        }
        Ok(Self { n, terms })
    }

    /// `Phi = sum_j t_j`, whose metric is the Euclidean one.
    pub fn flat(n: usize) -> Self {
        let terms = (0..n)
            .map(|j| {
                let mut pow = vec![0; n];
                pow[j] = 1;
                Monomial { coef: 1.0, pow }
            })
            .collect();
        Self { n, terms }
    }

    /// `Phi = t_1 t_2 + t_1 + t_2`, a coupled (neither radial nor separable) model.
    pub fn coupled_test() -> Self {
        Self {
            n: 2,
            terms: vec![
                Monomial { coef: 1.0, pow: vec![1, 1] },
                Monomial { coef: 1.0, pow: vec![1, 0] },
                Monomial { coef: 1.0, pow: vec![0, 1] },
            ],
        }
    }

    fn monomial_deriv(&self, m: &Monomial, idx: &[usize], t: &[f64]) -> f64 {
        let mut counts = vec![0u32; self.n];
        for &i in idx {
            counts[i] += 1;
        }
        let mut acc = m.coef;
        for j in 0..self.n {
            let (p, c) = (m.pow[j], counts[j]);
            if c > p {
                return 0.0;
            }
            let falling: f64 = ((p - c + 1)..=p).map(f64::from).product();
            acc *= falling * t[j].powi((p - c) as i32);
        }
        acc
    }
}

impl KahlerPotential for PolyPotential {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, t: &RadialCoordinates) -> Result<f64> {
        check_dim(self.n, t.dim())?;
        Ok(self
            .terms
            .iter()
            .map(|m| self.monomial_deriv(m, &[], t.as_slice()))
            .sum())
    }

    fn jet(&self, t: &RadialCoordinates, order: usize) -> Result<Jet> {
        check_dim(self.n, t.dim())?;
        Jet::from_fn(self.n, order, |idx| {
            self.terms
                .iter()
                .map(|m| self.monomial_deriv(m, idx, t.as_slice()))
                .sum()
        })
        .ensure_finite(t)
    }

    fn is_separable(&self) -> bool {
        self.terms
            .iter()
            .all(|m| m.pow.iter().filter(|&&p| p > 0).count() <= 1)
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::Poly {
            n: self.n,
            terms: self.terms.clone(),
        }
    }
}

/// JSON description of a model, e.g. `{"kind": "cigar", "n": 2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelDescriptor {
    Cigar {
        n: usize,
    },
    Soliton {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        newton_tol: Option<f64>,
        #[serde(default)]
        a0: f64,
    },
    Poly {
        n: usize,
        terms: Vec<Monomial>,
    },
}

impl ModelDescriptor {
    pub fn build(&self) -> Result<PotentialModel> {
        PotentialModel::from_descriptor(self)
    }

    /// Parse a descriptor; errors name the line and column of the offending value.
    pub fn from_json(text: &str) -> Result<Self> {
        let located = |e: serde_json::Error| Error::Descriptor(e.to_string());
        let err = match serde_json::from_str::<Self>(text) {
            Ok(d) => return Ok(d),
            Err(e) if e.line() > 0 => return Err(located(e)),
            Err(e) => e,
        };
        // the tagged form loses positions, so re-read the named variant alone
        #[derive(Deserialize)]
        struct Kind {
            kind: String,
        }
        #[allow(dead_code)]
        #[derive(Deserialize)]
        struct Cigar {
            n: usize,
        }
        #[allow(dead_code)]
        #[derive(Deserialize)]
        struct Soliton {
            n: usize,
            newton_tol: Option<f64>,
            #[serde(default)]
            a0: f64,
        }
        #[allow(dead_code)]
        #[derive(Deserialize)]
        struct Poly {
            n: usize,
            terms: Vec<Monomial>,
        }
        let positioned = match serde_json::from_str::<Kind>(text).map(|k| k.kind) {
            Ok(k) if k == "cigar" => serde_json::from_str::<Cigar>(text).err(),
            Ok(k) if k == "soliton" => serde_json::from_str::<Soliton>(text).err(),
            Ok(k) if k == "poly" => serde_json::from_str::<Poly>(text).err(),
            Ok(_) => None,
            Err(e) => Some(e),
        };
        Err(match positioned {
            Some(e) if e.line() > 0 => located(e),
            _ => Error::Descriptor(err.to_string()),
        })
    }

    /// Short human label such as `cigar(n=2)`.
    pub fn label(&self) -> String {
        match self {
            Self::Cigar { n } => format!("cigar(n={n})"),
            Self::Soliton { n, .. } => format!("soliton(n={n})"),
            Self::Poly { n, terms } => format!("poly(n={n}, terms={})", terms.len()),
        }
    }
}

/// The shipped models behind one type.
#[derive(Clone, Debug)]
pub enum PotentialModel {
    Cigar(CigarProduct),
    Soliton(SolitonPotential),
    Poly(PolyPotential),
}

impl PotentialModel {
    pub fn cigar(n: usize) -> Result<Self> {
        Ok(Self::Cigar(CigarProduct::new(n)?))
    }

    pub fn soliton(n: usize) -> Result<Self> {
        Ok(Self::Soliton(SolitonPotential::new(SolitonProfile::new(n)?)))
    }

    pub fn flat(n: usize) -> Self {
        Self::Poly(PolyPotential::flat(n))
    }

    pub fn from_descriptor(d: &ModelDescriptor) -> Result<Self> {
        match d {
            ModelDescriptor::Cigar { n } => Self::cigar(*n),
            ModelDescriptor::Soliton { n, newton_tol, a0 } => {
                let mut profile = SolitonProfile::new(*n)?.with_a0(*a0);
                if let Some(tol) = newton_tol {
                    profile = profile.with_newton_tol(*tol)?;
                }
                Ok(Self::Soliton(SolitonPotential::new(profile)))
            }
            ModelDescriptor::Poly { n, terms } => {
                Ok(Self::Poly(PolyPotential::new(*n, terms.clone())?))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_descriptor(&ModelDescriptor::from_json(text)?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn inner(&self) -> &dyn KahlerPotential {
        match self {
            Self::Cigar(m) => m,
            Self::Soliton(m) => m,
            Self::Poly(m) => m,
        }
    }
}

impl KahlerPotential for PotentialModel {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn value(&self, t: &RadialCoordinates) -> Result<f64> {
        self.inner().value(t)
    }
    fn jet(&self, t: &RadialCoordinates, order: usize) -> Result<Jet> {
        self.inner().jet(t, order)
    }
    fn is_radial(&self) -> bool {
        self.inner().is_radial()
    }
    fn is_separable(&self) -> bool {
        self.inner().is_separable()
    }
    fn flux_from_log(&self, log_t: &[f64]) -> Result<f64> {
        self.inner().flux_from_log(log_t)
    }
    fn descriptor(&self) -> ModelDescriptor {
        self.inner().descriptor()
    }
}

/// The matrix `G[j][k] = g_{j kbar}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMetric(DMatrix<Complex64>);

impl HermitianMetric {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.0[(j, k)]
    }

    /// `max |G - G^H|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                worst = worst.max((self.0[(j, k)] - self.0[(k, j)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        // Hermitianize first: the eigen-solver reads only one triangle.
        let h = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().min()
    }

    /// `g(v, wbar) = sum_jk g_{j kbar} v_j conj(w_k)`.
    pub fn pair(&self, v: &[Complex64], w: &[Complex64]) -> Complex64 {
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += self.0[(j, k)] * v[j] * w[k].conj();
            }
        }
        acc
    }

    /// Squared length of a complex tangent vector.
    pub fn norm_sqr(&self, v: &[Complex64]) -> f64 {
        self.pair(v, v).re
    }

    /// Real `2n x 2n` matrix of `omega = (i/2) g_{j kbar} dz_j ^ dzbar_k`
    /// in the ordering `(x_1, y_1, ..., x_n, y_n)`.
    pub fn two_form(&self) -> TwoFormMatrix {
        let n = self.dim();
        let mut om = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let g = self.0[(j, k)];
                om[(2 * j, 2 * k)] = -g.im;
                om[(2 * j, 2 * k + 1)] = g.re;
                om[(2 * j + 1, 2 * k)] = -g.re;
                om[(2 * j + 1, 2 * k + 1)] = -g.im;
            }
        }
        TwoFormMatrix(om)
    }
}

/// A real 2-form as the antisymmetric matrix `omega(X, Y) = X^T Omega Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormMatrix(DMatrix<f64>);

impl TwoFormMatrix {
    pub fn new(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    /// The standard form `omega_0 = sum_j dx_j ^ dy_j`.
    pub fn standard(n: usize) -> Self {
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            m[(2 * j, 2 * j + 1)] = 1.0;
            m[(2 * j + 1, 2 * j)] = -1.0;
        }
        Self(m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.0.nrows();
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += x[a] * self.0[(a, b)] * y[b];
            }
        }
        acc
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        (&self.0 + self.0.transpose()).amax()
    }
}

/// The standard complex structure on real vectors: `J d/dx = d/dy`.
pub fn complex_structure(x: &[f64]) -> Vec<f64> {
    x.chunks_exact(2).flat_map(|p| [-p[1], p[0]]).collect()
}

pub(crate) fn metric_from_jet(z: &ComplexVector, jet: &Jet) -> HermitianMetric {
    let n = z.dim();
    let zs = z.as_slice();
    let g = DMatrix::from_fn(n, n, |j, k| {
        let diag = if j == k { jet.d1(j) } else { 0.0 };
        Complex64::new(diag, 0.0) + zs[j].conj() * zs[k] * jet.d2(j, k)
    });
    HermitianMetric(g)
}

pub fn metric_at<P: KahlerPotential + ?Sized>(model: &P, z: &ComplexVector) -> Result<HermitianMetric> {
    check_dim(model.dim(), z.dim())?;
    let jet = model.jet(&radial_coords(z), 2)?;
    Ok(metric_from_jet(z, &jet))
}

pub fn two_form_at<P: KahlerPotential + ?Sized>(model: &P, z: &ComplexVector) -> Result<TwoFormMatrix> {
    Ok(metric_at(model, z)?.two_form())
}

/// Result of scanning the positivity condition `dPhi/dt_j >= 0`.
#[derive(Clone, Debug, Serialize)]
pub struct Cond0Report {
    pub samples: usize,
    pub min_per_coordinate: Vec<f64>,
    pub min: f64,
    /// `t` at which the overall minimum was attained.
    pub argmin: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluate every `Phi_j` at the origin plus the sampler's points.
pub fn cond0_scan<P: KahlerPotential + ?Sized>(
    model: &P,
    region: &PolydiscSampler,
    tolerance: f64,
) -> Result<Cond0Report> {
    let n = model.dim();
    let mut mins = vec![f64::INFINITY; n];
    let mut min = f64::INFINITY;
    let mut argmin = vec![0.0; n];
    let points = std::iter::once(ComplexVector::zeros(n)).chain(region.points(n));
    let mut samples = 0;
    for z in points {
        let t = radial_coords(&z);
        let jet = model.jet(&t, 1)?;
        for (j, slot) in mins.iter_mut().enumerate() {
            let v = jet.d1(j);
            *slot = slot.min(v);
            if v < min {
                min = v;
                argmin = t.as_slice().to_vec();
            }
        }
        samples += 1;
    }
    Ok(Cond0Report {
        samples,
        min_per_coordinate: mins,
        min,
        argmin,
        tolerance,
        pass: min >= -tolerance,
    })
}
