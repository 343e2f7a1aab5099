//! Python module `kahler_darboux`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use darboux_core::curvature::{christoffel_at, curvature_at, holomorphic_sectional};
use darboux_core::geodesic::{geodesic_integrate, GeodesicState, StepControl};
use darboux_core::potential::{metric_at, two_form_at, PolyPotential};
use darboux_core::submanifold::{self, HoloCurvePair, HoloPoly, PhaseBlockEmbedding};
use darboux_core::suite::{self, RunConfig};
use darboux_core::{ComplexVector, KahlerPotential, PotentialModel, RadialCoordinates};

fn err(e: darboux_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector(z: Vec<Complex64>) -> PyResult<ComplexVector> {
    ComplexVector::new(z).map_err(err)
}

fn rows<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// A rotation-invariant Kahler potential.
#[pyclass(name = "Model", module = "kahler_darboux", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModel(PotentialModel);

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn cigar(n: usize) -> PyResult<Self> {
        PotentialModel::cigar(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn soliton(n: usize) -> PyResult<Self> {
        PotentialModel::soliton(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn flat(n: usize) -> Self {
        Self(PotentialModel::flat(n))
    }

    /// `t1 t2 + t1 + t2` on `C^2`.
    #[staticmethod]
    fn coupled_test() -> Self {
        Self(PotentialModel::Poly(PolyPotential::coupled_test()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        PotentialModel::from_json(text).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn descriptor_json(&self) -> String {
        serde_json::to_string(&self.0.descriptor()).expect("descriptor serializes")
    }

    fn label(&self) -> String {
        self.0.descriptor().label()
    }

    /// Potential at moduli squared `t`.
    fn value(&self, t: Vec<f64>) -> PyResult<f64> {
        let t = RadialCoordinates::new(t).map_err(err)?;
        self.0.value(&t).map_err(err)
    }

    /// Hermitian matrix `g_{j kbar}` at `z`.
    fn metric(&self, z: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(metric_at(&self.0, &vector(z)?).map_err(err)?.matrix()))
    }

    /// Real antisymmetric matrix of the Kahler form in `(x1, y1, ..., xn, yn)`.
    fn two_form(&self, z: Vec<Complex64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(two_form_at(&self.0, &vector(z)?).map_err(err)?.matrix()))
    }

    fn __repr__(&self) -> String {
        format!("Model({})", self.label())
    }
}

/// Profile `u'(t)` of the radial soliton on `C^n`.
#[pyclass(name = "SolitonProfile", module = "kahler_darboux", frozen)]
struct PySolitonProfile(darboux_core::SolitonProfile);

#[pymethods]
impl PySolitonProfile {
    #[new]
    #[pyo3(signature = (n, newton_tol = None))]
    fn new(n: usize, newton_tol: Option<f64>) -> PyResult<Self> {
        let mut p = darboux_core::SolitonProfile::new(n).map_err(err)?;
        if let Some(tol) = newton_tol {
            p = p.with_newton_tol(tol).map_err(err)?;
        }
        Ok(Self(p))
    }

    fn u_prime(&self, t: f64) -> PyResult<f64> {
        self.0.u_prime(t).map_err(err)
    }

    /// `[u', u'', u''', u'''']` at `t`.
    fn derivs(&self, t: f64) -> PyResult<Vec<f64>> {
        self.0.derivs(t).map(|d| d.to_vec()).map_err(err)
    }

    fn ode_residual(&self, t: f64) -> PyResult<f64> {
        self.0.ode_residual(t).map_err(err)
    }

    /// Rows `(t, u', u'', ode_residual)`.
    fn table(&self, t_min: f64, t_max: f64, points: usize) -> PyResult<Vec<(f64, f64, f64, f64)>> {
        Ok(self
            .0
            .table(t_min, t_max, points)
            .map_err(err)?
            .into_iter()
            .map(|r| (r.t, r.u_prime, r.u_second, r.ode_residual))
            .collect())
    }
}

/// The map `z_j -> sqrt(dPhi/dt_j) z_j`.
#[pyclass(name = "DarbouxMap", module = "kahler_darboux", frozen)]
struct PyDarbouxMap(darboux_core::DarbouxMap);

#[pymethods]
impl PyDarbouxMap {
    #[new]
    fn new(model: &PyModel) -> Self {
        Self(darboux_core::DarbouxMap::new(model.0.clone()))
    }

    fn map_point(&self, z: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        Ok(self.0.map_point(&vector(z)?).map_err(err)?.into_inner())
    }

    /// Real `2n x 2n` Jacobian.
    #[pyo3(signature = (z, fd = false))]
    fn jacobian(&self, z: Vec<Complex64>, fd: bool) -> PyResult<Vec<Vec<f64>>> {
        let z = vector(z)?;
        let j = if fd { self.0.jacobian_fd(&z) } else { self.0.jacobian(&z) }.map_err(err)?;
        Ok(rows(j.matrix()))
    }

    /// `max |J^T Omega_0 J - Omega|` at `z`.
    #[pyo3(signature = (z, fd = false))]
    fn pullback_residual(&self, z: Vec<Complex64>, fd: bool) -> PyResult<f64> {
        let z = vector(z)?;
        if fd { self.0.pullback_residual_fd(&z) } else { self.0.pullback_residual(&z) }.map_err(err)
    }
}

/// Curvature components `R[i][j][k][l]` flattened in row-major order.
#[pyfunction]
fn curvature(model: &PyModel, z: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    Ok(curvature_at(&model.0, &vector(z)?).map_err(err)?.components().to_vec())
}

/// Christoffel symbols `Gamma^m_{ij}` flattened as `[m][i][j]`.
#[pyfunction]
fn christoffel(model: &PyModel, z: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let g = christoffel_at(&model.0, &vector(z)?).map_err(err)?;
    let n = g.dim();
    Ok((0..n * n * n).map(|idx| g.get(idx / (n * n), (idx / n) % n, idx % n)).collect())
}

#[pyfunction]
#[pyo3(name = "holomorphic_sectional")]
fn holo_sectional(model: &PyModel, z: Vec<Complex64>, v: Vec<Complex64>) -> PyResult<f64> {
    holomorphic_sectional(&model.0, &vector(z)?, &v).map_err(err)
}

/// Samples `(tau, z, energy_drift)` of the geodesic with the given start and arclength.
#[pyfunction]
fn geodesic(
    model: &PyModel,
    z: Vec<Complex64>,
    v: Vec<Complex64>,
    length: f64,
) -> PyResult<Vec<(f64, Vec<Complex64>, f64)>> {
    let start = GeodesicState::new(z, v).map_err(err)?;
    let tr = geodesic_integrate(&model.0, &start, length, &StepControl::default()).map_err(err)?;
    Ok(tr.samples.into_iter().map(|s| (s.tau, s.z, s.energy_drift)).collect())
}

fn pair(f1: Vec<Complex64>, f2: Vec<Complex64>) -> HoloCurvePair {
    HoloCurvePair::new(HoloPoly::from_tail(&f1), HoloPoly::from_tail(&f2))
}

/// `A(f1, f2)` at `z`; `f1`, `f2` list the coefficients of `z, z^2, ...`.
#[pyfunction]
fn a_obstruction(f1: Vec<Complex64>, f2: Vec<Complex64>, z: Complex64) -> Complex64 {
    submanifold::a_obstruction(&pair(f1, f2), z)
}

/// `(direct, via_a)` curvature defect of the curve `(f1, f2)` at `z`.
#[pyfunction]
fn curvature_defect(f1: Vec<Complex64>, f2: Vec<Complex64>, z: Complex64) -> PyResult<(f64, f64)> {
    let d = submanifold::curvature_defect(&pair(f1, f2), z).map_err(err)?;
    Ok((d.direct, d.via_a))
}

/// Map sampled points of a phase-block subspace of the cigar product and
/// return the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (sigma, alpha = None, samples = 50, radius = 3.0, seed = 0, tol = 1e-9))]
fn ciriza_check(
    sigma: Vec<usize>,
    alpha: Option<Vec<Complex64>>,
    samples: usize,
    radius: f64,
    seed: u64,
    tol: f64,
) -> PyResult<String> {
    let n = sigma.len();
    let alpha = alpha.unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); n]);
    let s = PhaseBlockEmbedding::new(sigma, alpha).map_err(err)?;
    let map = darboux_core::DarbouxMap::new(PotentialModel::cigar(n).map_err(err)?);
    let params = submanifold::sample_params(s.k(), samples, radius, seed);
    let rep = submanifold::ciriza_image_check(&map, &s, &params, tol).map_err(err)?;
    Ok(serde_json::to_string(&rep).expect("report serializes"))
}

/// Run the verification suite; returns `(report_json, all_passed)`.
#[pyfunction]
#[pyo3(signature = (config_json = None))]
fn run_suite(py: Python<'_>, config_json: Option<&str>) -> PyResult<(String, bool)> {
    let cfg = match config_json {
        Some(text) => RunConfig::from_json(text).map_err(err)?,
        None => RunConfig::default(),
    };
    let run = py.detach(|| suite::run_suite(&cfg)).map_err(err)?;
    Ok((run.body_json(), run.pass()))
}

#[pymodule]
fn kahler_darboux(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PySolitonProfile>()?;
    m.add_class::<PyDarbouxMap>()?;
    m.add_function(wrap_pyfunction!(curvature, m)?)?;
    m.add_function(wrap_pyfunction!(christoffel, m)?)?;
    m.add_function(wrap_pyfunction!(holo_sectional, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(a_obstruction, m)?)?;
    m.add_function(wrap_pyfunction!(curvature_defect, m)?)?;
    m.add_function(wrap_pyfunction!(ciriza_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
