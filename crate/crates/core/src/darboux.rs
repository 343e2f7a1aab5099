//! The explicit symplectomorphism `Psi(z) = (psi_1 z_1, ..., psi_n z_n)`,
//! `psi_j = sqrt(dPhi/dt_j)`, and the checks that it pulls the standard form
//! back to the Kähler form of the potential.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd;
use crate::potential::{
    metric_from_jet, radial_coords, ComplexVector, KahlerPotential, PotentialModel, TwoFormMatrix,
};
use crate::sampling;

/// Step for the finite-difference Jacobian.
pub const FD_JACOBIAN_STEP: f64 = 1e-4;

/// The constant matrix of `omega_0 = sum_j dx_j ^ dy_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StdSymplectic {
    n: usize,
}

impl StdSymplectic {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn form(&self) -> TwoFormMatrix {
        TwoFormMatrix::standard(self.n)
    }
}

/// Real `2n x 2n` Jacobian of `Psi` in the ordering `(x_1, y_1, ..., x_n, y_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianMatrix(DMatrix<f64>);

impl JacobianMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// `J^T Omega_0 J`, the matrix of `Psi^* omega_0`.
    pub fn pullback_of_standard(&self) -> DMatrix<f64> {
        let n = self.0.nrows() / 2;
        self.0.transpose() * TwoFormMatrix::standard(n).matrix() * &self.0
    }

    /// Apply to a complex tangent vector, read as a real vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let x: Vec<f64> = v.iter().flat_map(|c| [c.re, c.im]).collect();
        let y = &self.0 * nalgebra::DVector::from_vec(x);
        y.as_slice()
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct DarbouxMap<P = PotentialModel> {
    model: P,
}

impl<P: KahlerPotential> DarbouxMap<P> {
    pub fn new(model: P) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &P {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    fn check(&self, z: &ComplexVector) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: z.dim(),
            });
        }
        Ok(())
    }

    /// The radial factors `psi_j(z)`.
    pub fn psi(&self, z: &ComplexVector) -> Result<Vec<f64>> {
        self.check(z)?;
        let t = radial_coords(z);
        let jet = self.model.jet(&t, 1)?;
        (0..self.dim())
            .map(|j| {
                let v = jet.d1(j);
                if v < 0.0 {
                    Err(Error::NegativeGradient {
                        index: j,
                        value: v,
                        location: t.as_slice().to_vec(),
                    })
                } else {
                    Ok(v.sqrt())
                }
            })
            .collect()
    }

    pub fn map_point(&self, z: &ComplexVector) -> Result<ComplexVector> {
        let psi = self.psi(z)?;
        ComplexVector::new(z.as_slice().iter().zip(psi).map(|(c, p)| c * p).collect())
    }

    /// Analytic Jacobian by the chain rule:
    /// `d psi_j / dx_k = Phi_jk x_k / psi_j`, likewise for `y_k`.
    pub fn jacobian(&self, z: &ComplexVector) -> Result<JacobianMatrix> {
        self.check(z)?;
        let n = self.dim();
        let t = radial_coords(z);
        let jet = self.model.jet(&t, 2)?;
        let psi = self.psi(z)?;
        let x = z.to_real();
        let mut jac = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            jac[(2 * j, 2 * j)] += psi[j];
            jac[(2 * j + 1, 2 * j + 1)] += psi[j];
            // zero z_j kills the chain-rule row, whatever psi_j is
            if z[j].norm_sqr() == 0.0 {
                continue;
            }
            if psi[j] == 0.0 {
                return Err(Error::Domain(format!(
                    "psi_{j} = 0 at z_{j} != 0; map not differentiable"
                )));
            }
            let (xj, yj) = (x[2 * j], x[2 * j + 1]);
            for k in 0..n {
                let c = jet.d2(j, k) / psi[j];
                let (xk, yk) = (x[2 * k], x[2 * k + 1]);
                jac[(2 * j, 2 * k)] += c * xk * xj;
                jac[(2 * j, 2 * k + 1)] += c * yk * xj;
                jac[(2 * j + 1, 2 * k)] += c * xk * yj;
                jac[(2 * j + 1, 2 * k + 1)] += c * yk * yj;
            }
        }
        Ok(JacobianMatrix(jac))
    }

    /// Central-difference Jacobian of [`Self::map_point`].
    pub fn jacobian_fd(&self, z: &ComplexVector) -> Result<JacobianMatrix> {
        self.check(z)?;
        let n = self.dim();
        let x = z.to_real();
        let f = |xs: &[f64]| -> Result<Vec<f64>> {
            Ok(self.map_point(&ComplexVector::from_real(xs)?)?.to_real())
        };
        let scale = z.norm().max(1.0);
        let mut jac = DMatrix::zeros(2 * n, 2 * n);
        for a in 0..2 * n {
            let col = fd::first_partial(&f, &x, a, FD_JACOBIAN_STEP * scale)?;
            for (r, v) in col.into_iter().enumerate() {
                jac[(r, a)] = v;
            }
        }
        Ok(JacobianMatrix(jac))
    }

    fn residual_of(&self, z: &ComplexVector, jac: &JacobianMatrix) -> Result<f64> {
        let jet = self.model.jet(&radial_coords(z), 2)?;
        let omega = metric_from_jet(z, &jet).two_form();
        Ok((jac.pullback_of_standard() - omega.matrix()).amax())
    }

    /// `max |J^T Omega_0 J - Omega_Phi|` with the full analytic Jacobian.
    pub fn pullback_residual(&self, z: &ComplexVector) -> Result<f64> {
        let jac = self.jacobian(z)?;
        self.residual_of(z, &jac)
    }

    /// As [`Self::pullback_residual`] with the finite-difference Jacobian.
    pub fn pullback_residual_fd(&self, z: &ComplexVector) -> Result<f64> {
        let jac = self.jacobian_fd(z)?;
        self.residual_of(z, &jac)
    }

    /// Track `S = sum_j Phi_j t_j` outward along rays `z = e^rho d`.
    ///
    /// Each ray stops at the first radius where `S` exceeds `threshold`; a
    /// ray passes when the recorded values are strictly increasing and the
    /// last one is past the threshold.
    pub fn properness_scan(
        &self,
        directions: &[Vec<Complex64>],
        log_radii: &[f64],
        threshold: f64,
    ) -> Result<PropernessReport> {
        if log_radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("properness radii must be strictly increasing".into()));
        }
        let mut rays = Vec::with_capacity(directions.len());
        for d in directions {
            if d.len() != self.dim() {
                return Err(Error::Dimension {
                    expected: self.dim(),
                    got: d.len(),
                });
            }
            let ln_mod: Vec<f64> = d.iter().map(|c| c.norm_sqr().ln()).collect();
            let mut radii = Vec::new();
            let mut values = Vec::new();
            for &rho in log_radii {
                let lt: Vec<f64> = ln_mod.iter().map(|l| l + 2.0 * rho).collect();
                let s = self.model.flux_from_log(&lt)?;
                radii.push(rho);
                values.push(s);
                if s > threshold {
                    break;
                }
            }
            let increasing = values.windows(2).all(|w| w[1] > w[0]);
            let final_value = values.last().copied().unwrap_or(f64::NAN);
            rays.push(RayTrace {
                direction: d.clone(),
                log_radii: radii,
                values,
                strictly_increasing: increasing,
                final_value,
                pass: increasing && final_value > threshold,
            });
        }
        let pass = rays.iter().all(|r| r.pass);
        Ok(PropernessReport {
            threshold,
            rays,
            pass,
        })
    }

    /// Spot-check global injectivity on a grid of the cube `[-R, R]^{2n}`.
    ///
    /// Looks for points where `Phi_j < 0`, for a non-positive Jacobian
    /// determinant, and for pairs of grid points with images closer than
    /// `tol`. A pass means no counterexample was found, nothing more.
    pub fn injectivity_probe(&self, grid: &GridSpec, tol: f64) -> Result<InjectivityReport> {
        let pts = grid.points(self.dim())?;
        let mut images: Vec<(Vec<f64>, usize)> = Vec::with_capacity(pts.len());
        let mut min_det = f64::INFINITY;
        let mut gradient_violation = None;
        let mut fold = None;
        for (i, z) in pts.iter().enumerate() {
            match self.map_point(z) {
                Ok(w) => images.push((w.to_real(), i)),
                Err(Error::NegativeGradient { .. }) => {
                    gradient_violation.get_or_insert_with(|| z.as_slice().to_vec());
                    continue;
                }
                Err(e) => return Err(e),
            }
            let det = self.jacobian(z)?.determinant();
            if det < min_det {
                min_det = det;
                if det <= 0.0 {
                    fold = Some(z.as_slice().to_vec());
                }
            }
        }
        // closest pair by a sweep along the first real coordinate
        images.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]));
        let mut best = f64::INFINITY;
        let mut pair = None;
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if images[j].0[0] - images[i].0[0] >= best {
                    break;
                }
                let d = images[i]
                    .0
                    .iter()
                    .zip(&images[j].0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if d < best {
                    best = d;
                    pair = Some((images[i].1, images[j].1));
                }
            }
        }
        let collision = pair
            .filter(|_| best <= tol)
            .map(|(a, b)| (pts[a].as_slice().to_vec(), pts[b].as_slice().to_vec()));
        let pass = gradient_violation.is_none() && fold.is_none() && collision.is_none();
        Ok(InjectivityReport {
            points: pts.len(),
            min_image_separation: best,
            min_det,
            gradient_violation,
            fold,
            collision,
            pass,
        })
    }
}

/// `count` deterministic unit rays: the coordinate axes, the diagonal,
/// then seeded random directions.
pub fn default_rays(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rays = Vec::with_capacity(count);
    for j in 0..n.min(count) {
        let mut d = vec![Complex64::new(0.0, 0.0); n];
        d[j] = Complex64::new(1.0, 0.0);
        rays.push(d);
    }
    if rays.len() < count && n > 1 {
        rays.push(vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]);
    }
    let mut rng = sampling::rng(seed);
    while rays.len() < count {
        rays.push(sampling::unit_direction(&mut rng, n));
    }
    rays
}

/// Log-radii `-3, -2.5, ..., 600`; enough for `S` to pass `1e3` for every shipped model.
pub fn default_log_radii() -> Vec<f64> {
    (0..=1206).map(|i| -3.0 + 0.5 * i as f64).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RayTrace {
    pub direction: Vec<Complex64>,
    pub log_radii: Vec<f64>,
    pub values: Vec<f64>,
    pub strictly_increasing: bool,
    pub final_value: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropernessReport {
    pub threshold: f64,
    pub rays: Vec<RayTrace>,
    pub pass: bool,
}

/// A regular grid with `per_axis` points on each real axis of `[-radius, radius]^{2n}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub radius: f64,
    pub per_axis: usize,
}

pub const MAX_GRID_POINTS: usize = 50_000;

impl GridSpec {
    pub fn points(&self, n: usize) -> Result<Vec<ComplexVector>> {
        let dims = 2 * n as u32;
        let total = self
            .per_axis
            .checked_pow(dims)
            .filter(|&t| t <= MAX_GRID_POINTS && self.per_axis >= 2)
            .ok_or_else(|| {
                Error::Config(format!(
                    "grid of {}^{dims} points is empty or exceeds {MAX_GRID_POINTS}",
                    self.per_axis
                ))
            })?;
        let axis: Vec<f64> = (0..self.per_axis)
            .map(|i| -self.radius + 2.0 * self.radius * i as f64 / (self.per_axis - 1) as f64)
            .collect();
        (0..total)
            .map(|mut idx| {
                let xs: Vec<f64> = (0..dims)
                    .map(|_| {
                        let v = axis[idx % self.per_axis];
                        idx /= self.per_axis;
                        v
                    })
                    .collect();
                ComplexVector::from_real(&xs)
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InjectivityReport {
    pub points: usize,
    pub min_image_separation: f64,
    pub min_det: f64,
    /// First grid point where some `Phi_j < 0`.
    pub gradient_violation: Option<Vec<Complex64>>,
    /// A grid point where `det J <= 0`.
    pub fold: Option<Vec<Complex64>>,
    pub collision: Option<(Vec<Complex64>, Vec<Complex64>)>,
    pub pass: bool,
}
