//! Christoffel symbols and the curvature tensor of the Kähler metric of a
//! potential, computed two ways: analytically from the order-4 jet of the
//! potential, and by finite differences of [`metric_at`].
//!
//! Conventions, with `d_k = d/dz_k` and `dbar_l = d/dzbar_l`:
//!
//! ```text
//! Gamma^m_ij = g^{m lbar} d_j g_{i lbar}
//! R_{i jbar k lbar} = -d_k dbar_l g_{i jbar} + g^{p qbar} (d_k g_{i qbar}) (dbar_l g_{p jbar})
//! ```
//!
//! With this sign the cigar has `R = 1/(1+|z|^2)^3 > 0`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd;
use crate::potential::{metric_at, metric_from_jet, radial_coords, ComplexVector, KahlerPotential};

type C = Complex64;

/// Real-coordinate step for the finite-difference path (scaled by `max(1, |z|)`).
pub const FD_CURVATURE_STEP: f64 = 2e-3;

/// Metric, `d_k g` and `d_k dbar_l g` at one point.
#[derive(Clone, Debug)]
pub struct MetricDerivatives {
    pub g: DMatrix<C>,
    /// `dg[k][(i, j)] = d_k g_{i jbar}`
    pub dg: Vec<DMatrix<C>>,
    /// `ddg[k * n + l][(i, j)] = d_k dbar_l g_{i jbar}`; empty when not computed.
    pub ddg: Vec<DMatrix<C>>,
}

impl MetricDerivatives {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `dbar_l g_{i jbar} = conj(d_l g_{j ibar})`.
    fn dbar(&self, l: usize, i: usize, j: usize) -> C {
        self.dg[l][(j, i)].conj()
    }

    /// `H` with `H[p][q] = g^{p qbar}`, i.e. `(G^T)^{-1}`.
    fn inverse(&self, z: &ComplexVector) -> Result<DMatrix<C>> {
        self.g
            .transpose()
            .try_inverse()
            .filter(|h| h.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
            .ok_or_else(|| Error::SingularMetric(z.as_slice().to_vec()))
    }
}

/// Analytic metric derivatives from the potential jet; `with_second`
/// requests `d dbar g`, which needs fourth derivatives of the potential.
pub fn analytic_metric_derivatives<P: KahlerPotential + ?Sized>(
    model: &P,
    z: &ComplexVector,
    with_second: bool,
) -> Result<MetricDerivatives> {
    let n = model.dim();
    if z.dim() != n {
        return Err(Error::Dimension { expected: n, got: z.dim() });
    }
    let jet = model.jet(&radial_coords(z), if with_second { 4 } else { 3 })?;
    let zs = z.as_slice();
    let zb: Vec<C> = zs.iter().map(|c| c.conj()).collect();
    let d = |i: usize, j: usize| -> f64 { if i == j { 1.0 } else { 0.0 } };
    let g = metric_from_jet(z, &jet).matrix().clone();

    // d_k g_ij = delta_ij Phi_ik zb_k + zb_i z_j zb_k Phi_ijk + delta_jk zb_i Phi_ij
    let dg: Vec<DMatrix<C>> = (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                zb[k] * (d(i, j) * jet.d2(i, k))
                    + zb[i] * zs[j] * zb[k] * jet.d3(i, j, k)
                    + zb[i] * (d(j, k) * jet.d2(i, j))
            })
        })
        .collect();

    let mut ddg = Vec::new();
    if with_second {
        for k in 0..n {
            for l in 0..n {
                ddg.push(DMatrix::from_fn(n, n, |i, j| {
                    let t1 = zb[k] * zs[l] * (d(i, j) * jet.d3(i, k, l))
                        + C::new(d(i, j) * d(k, l) * jet.d2(i, k), 0.0);
                    let t2 = zs[j] * zb[k] * (d(i, l) * jet.d3(i, j, k))
                        + zb[i] * zs[j] * (d(k, l) * jet.d3(i, j, k))
                        + zb[i] * zs[j] * zb[k] * zs[l] * jet.d4(i, j, k, l);
                    let t3 = C::new(d(j, k) * d(i, l) * jet.d2(i, j), 0.0)
                        + zb[i] * zs[l] * (d(j, k) * jet.d3(i, j, l));
                    t1 + t2 + t3
                }));
            }
        }
    }
    Ok(MetricDerivatives { g, dg, ddg })
}

/// Metric derivatives by central differences of [`metric_at`] in the real
/// coordinates, converted with `d_k = (d/dx_k - i d/dy_k)/2`.
pub fn fd_metric_derivatives<P: KahlerPotential + ?Sized>(
    model: &P,
    z: &ComplexVector,
    step: f64,
) -> Result<MetricDerivatives> {
    let n = model.dim();
    let g = metric_at(model, z)?.matrix().clone();
    let x = z.to_real();
    let h = step * z.norm().max(1.0);
    let f = |xs: &[f64]| -> Result<Vec<f64>> {
        let m = metric_at(model, &ComplexVector::from_real(xs)?)?;
        Ok(m.matrix().iter().flat_map(|c| [c.re, c.im]).collect())
    };
    let unflat = |v: &[f64]| -> DMatrix<C> {
        // nalgebra iterates column-major
        DMatrix::from_iterator(n, n, v.chunks_exact(2).map(|p| C::new(p[0], p[1])))
    };
    let mut first = Vec::with_capacity(2 * n);
    for a in 0..2 * n {
        first.push(unflat(&fd::first_partial(&f, &x, a, h)?));
    }
    let half = C::new(0.5, 0.0);
    let i = C::new(0.0, 1.0);
    let dg = (0..n)
        .map(|k| (&first[2 * k] - &first[2 * k + 1] * i) * half)
        .collect();
    let mut second = vec![vec![DMatrix::zeros(n, n); 2 * n]; 2 * n];
    for a in 0..2 * n {
        for b in a..2 * n {
            let m = unflat(&fd::second_partial(&f, &x, a, b, h)?);
            second[b][a] = m.clone();
            second[a][b] = m;
        }
    }
    let quarter = C::new(0.25, 0.0);
    let mut ddg = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            let (xk, yk, xl, yl) = (2 * k, 2 * k + 1, 2 * l, 2 * l + 1);
            let re = &second[xk][xl] + &second[yk][yl];
            let im = &second[xk][yl] - &second[yk][xl];
            ddg.push((re + im * i) * quarter);
        }
    }
    Ok(MetricDerivatives { g, dg, ddg })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChristoffelTensor {
    n: usize,
    data: Vec<C>,
}

impl ChristoffelTensor {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Gamma^m_ij`
    pub fn get(&self, m: usize, i: usize, j: usize) -> C {
        self.data[(m * self.n + i) * self.n + j]
    }

    /// `Gamma^m_ij v^i v^j` for each `m`.
    pub fn contract(&self, v: &[C]) -> Vec<C> {
        (0..self.n)
            .map(|m| {
                let mut acc = C::new(0.0, 0.0);
                for i in 0..self.n {
                    for j in 0..self.n {
                        acc += self.get(m, i, j) * v[i] * v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in 0..self.n {
            for i in 0..self.n {
                for j in 0..self.n {
                    worst = worst.max((self.get(m, i, j) - self.get(m, j, i)).norm());
                }
            }
        }
        worst
    }
}

pub fn christoffel_from(md: &MetricDerivatives, z: &ComplexVector) -> Result<ChristoffelTensor> {
    let n = md.dim();
    let h = md.inverse(z)?;
    let mut data = vec![C::new(0.0, 0.0); n * n * n];
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                data[(m * n + i) * n + j] = (0..n).map(|l| h[(m, l)] * md.dg[j][(i, l)]).sum();
            }
        }
    }
    Ok(ChristoffelTensor { n, data })
}

pub fn christoffel_at<P: KahlerPotential + ?Sized>(model: &P, z: &ComplexVector) -> Result<ChristoffelTensor> {
    christoffel_from(&analytic_metric_derivatives(model, z, false)?, z)
}

pub fn christoffel_fd<P: KahlerPotential + ?Sized>(model: &P, z: &ComplexVector) -> Result<ChristoffelTensor> {
    christoffel_from(&fd_metric_derivatives(model, z, FD_CURVATURE_STEP)?, z)
}

/// `R_{i jbar k lbar}` stored densely.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureTensor {
    n: usize,
    data: Vec<C>,
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C {
        self.data[((i * self.n + j) * self.n + k) * self.n + l]
    }

    pub fn components(&self) -> &[C] {
        &self.data
    }

    /// `R(v, vbar, v, vbar)`.
    pub fn contract(&self, v: &[C]) -> C {
        let n = self.n;
        let mut acc = C::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        acc += self.get(i, j, k, l) * v[i] * v[j].conj() * v[k] * v[l].conj();
                    }
                }
            }
        }
        acc
    }

    /// Largest violation of `R_ijkl = R_kjil = R_ilkj` and `conj(R_ijkl) = R_jilk`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r - self.get(k, j, i, l)).norm())
                            .max((r - self.get(i, l, k, j)).norm())
                            .max((r.conj() - self.get(j, i, l, k)).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest component whose indices are not all equal.
    pub fn max_mixed(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        if !(i == j && j == k && k == l) {
                            worst = worst.max(self.get(i, j, k, l).norm());
                        }
                    }
                }
            }
        }
        worst
    }
}

pub fn curvature_from(md: &MetricDerivatives, z: &ComplexVector) -> Result<CurvatureTensor> {
    let n = md.dim();
    assert_eq!(md.ddg.len(), n * n, "second metric derivatives missing");
    let h = md.inverse(z)?;
    let mut data = vec![C::new(0.0, 0.0); n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = -md.ddg[k * n + l][(i, j)];
                    for p in 0..n {
                        for q in 0..n {
                            acc += h[(p, q)] * md.dg[k][(i, q)] * md.dbar(l, p, j);
                        }
                    }
                    data[((i * n + j) * n + k) * n + l] = acc;
                }
            }
        }
    }
    Ok(CurvatureTensor { n, data })
}

pub fn curvature_at<P: KahlerPotential + ?Sized>(model: &P, z: &ComplexVector) -> Result<CurvatureTensor> {
    curvature_from(&analytic_metric_derivatives(model, z, true)?, z)
}

pub fn curvature_fd<P: KahlerPotential + ?Sized>(model: &P, z: &ComplexVector) -> Result<CurvatureTensor> {
    curvature_from(&fd_metric_derivatives(model, z, FD_CURVATURE_STEP)?, z)
}

/// `R(v, vbar, v, vbar) / g(v, vbar)^2`.
pub fn holomorphic_sectional<P: KahlerPotential + ?Sized>(
    model: &P,
    z: &ComplexVector,
    v: &[C],
) -> Result<f64> {
    if v.len() != model.dim() {
        return Err(Error::Dimension { expected: model.dim(), got: v.len() });
    }
    if v.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(Error::Domain("holomorphic sectional curvature of the zero vector".into()));
    }
    let g = metric_at(model, z)?;
    let r = curvature_at(model, z)?;
    Ok(r.contract(v).re / g.norm_sqr(v).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{PolyPotential, PotentialModel};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn flat_is_flat() {
        let m = PotentialModel::flat(2);
        let z = ComplexVector::new(vec![c(0.5, 1.0), c(-2.0, 0.1)]).unwrap();
        assert_eq!(christoffel_at(&m, &z).unwrap().max_abs_diff(&ChristoffelTensor { n: 2, data: vec![c(0.0, 0.0); 8] }), 0.0);
        assert_eq!(curvature_at(&m, &z).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn cigar_christoffel_closed_form() {
        let m = PotentialModel::cigar(1).unwrap();
        let z = ComplexVector::new(vec![c(0.7, -1.3)]).unwrap();
        let t = z[0].norm_sqr();
        let want = -z[0].conj() / (1.0 + t);
        let got = christoffel_at(&m, &z).unwrap().get(0, 0, 0);
        assert!((got - want).norm() < 1e-14);
        let fd = christoffel_fd(&m, &z).unwrap().get(0, 0, 0);
        assert!((fd - want).norm() < 1e-8);
    }

    #[test]
    fn product_cigar_has_no_mixed_christoffels() {
        let m = PotentialModel::cigar(2).unwrap();
        let z = ComplexVector::new(vec![c(0.7, -1.3), c(2.0, 0.4)]).unwrap();
        let g = christoffel_at(&m, &z).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for e in 0..2 {
                    if !(a == b && b == e) {
                        assert_eq!(g.get(a, b, e).norm(), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn cigar_curvature_values() {
        let m = PotentialModel::cigar(1).unwrap();
        let r0 = curvature_at(&m, &ComplexVector::zeros(1)).unwrap().get(0, 0, 0, 0);
        assert!((r0 - c(1.0, 0.0)).norm() < 1e-15);
        let z1 = ComplexVector::new(vec![c(0.0, 1.0)]).unwrap();
        let r1 = curvature_at(&m, &z1).unwrap().get(0, 0, 0, 0);
        assert!((r1 - c(0.125, 0.0)).norm() < 1e-14);
        let fd = curvature_fd(&m, &z1).unwrap().get(0, 0, 0, 0);
        assert!((fd - c(0.125, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn product_cigar_mixed_components_vanish() {
        let m = PotentialModel::cigar(2).unwrap();
        let z = ComplexVector::new(vec![c(0.3, 0.1), c(-1.0, 0.5)]).unwrap();
        let r = curvature_at(&m, &z).unwrap();
        assert_eq!(r.get(0, 0, 1, 1).norm(), 0.0);
        assert_eq!(r.max_mixed(), 0.0);
    }

    #[test]
    fn coupled_model_curvature_paths_agree() {
        let m = PolyPotential::coupled_test();
        let z = ComplexVector::new(vec![c(0.3, -0.4), c(0.9, 0.2)]).unwrap();
        let a = curvature_at(&m, &z).unwrap();
        let f = curvature_fd(&m, &z).unwrap();
        assert!(a.max_abs_diff(&f) < 1e-6 * a.max_abs().max(1.0));
        assert!(a.symmetry_defect() < 1e-12);
        let ga = christoffel_at(&m, &z).unwrap();
        assert!(ga.symmetry_defect() < 1e-13);
        assert!(ga.max_abs_diff(&christoffel_fd(&m, &z).unwrap()) < 1e-7);
    }

    #[test]
    fn holomorphic_sectional_examples() {
        let m1 = PotentialModel::cigar(1).unwrap();
        let h = holomorphic_sectional(&m1, &ComplexVector::zeros(1), &[c(1.0, 0.0)]).unwrap();
        assert!((h - 1.0).abs() < 1e-15);
        let m2 = PotentialModel::cigar(2).unwrap();
        let o = ComplexVector::zeros(2);
        let h = holomorphic_sectional(&m2, &o, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((h - 1.0).abs() < 1e-15);
        let s = 1.0 / 2f64.sqrt();
        let h = holomorphic_sectional(&m2, &o, &[c(s, 0.0), c(s, 0.0)]).unwrap();
        assert!((h - 0.5).abs() < 1e-15);
        assert!(holomorphic_sectional(&m2, &o, &[c(0.0, 0.0); 2]).is_err());
    }
}
