//! Geodesics of a Kähler potential: `z''^m + Gamma^m_ij z'^i z'^j = 0`,
//! integrated with classical RK4 and step halving on energy drift.

use num_complex::Complex64;
use serde::Serialize;

use crate::curvature::christoffel_at;
use crate::error::{Error, Result};
use crate::potential::{metric_at, ComplexVector, KahlerPotential};

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicState {
    pub z: Vec<C>,
    pub v: Vec<C>,
}

impl GeodesicState {
    pub fn new(z: Vec<C>, v: Vec<C>) -> Result<Self> {
        if z.len() != v.len() {
            return Err(Error::Dimension { expected: z.len(), got: v.len() });
        }
        Ok(Self { z, v })
    }

    fn axpy(&self, h: f64, d: &(Vec<C>, Vec<C>)) -> Self {
        Self {
            z: self.z.iter().zip(&d.0).map(|(a, b)| a + b * h).collect(),
            v: self.v.iter().zip(&d.1).map(|(a, b)| a + b * h).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepControl {
    pub step: f64,
    pub min_step: f64,
    /// Largest relative energy change accepted in one step.
    pub per_step_drift: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            step: 0.01,
            min_step: 1e-7,
            per_step_drift: 5e-11,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub tau: f64,
    pub z: Vec<C>,
    /// `|E(tau) - E(0)| / E(0)`.
    pub energy_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub max_drift: f64,
    pub arclength: f64,
}

/// `g(v, vbar)` at `z`.
pub fn energy<P: KahlerPotential + ?Sized>(model: &P, s: &GeodesicState) -> Result<f64> {
    Ok(metric_at(model, &ComplexVector::new(s.z.clone())?)?.norm_sqr(&s.v))
}

fn rhs<P: KahlerPotential + ?Sized>(model: &P, s: &GeodesicState) -> Result<(Vec<C>, Vec<C>)> {
    let gamma = christoffel_at(model, &ComplexVector::new(s.z.clone())?)?;
    let acc = gamma.contract(&s.v).into_iter().map(|a| -a).collect();
    Ok((s.v.clone(), acc))
}

fn rk4_step<P: KahlerPotential + ?Sized>(model: &P, s: &GeodesicState, h: f64) -> Result<GeodesicState> {
    let k1 = rhs(model, s)?;
    let k2 = rhs(model, &s.axpy(0.5 * h, &k1))?;
    let k3 = rhs(model, &s.axpy(0.5 * h, &k2))?;
    let k4 = rhs(model, &s.axpy(h, &k3))?;
    let combo = |i: usize| -> Vec<C> {
        let pick = |k: &(Vec<C>, Vec<C>)| if i == 0 { k.0.clone() } else { k.1.clone() };
        let (a, b, c, d) = (pick(&k1), pick(&k2), pick(&k3), pick(&k4));
        (0..a.len())
            .map(|m| (a[m] + b[m] * 2.0 + c[m] * 2.0 + d[m]) / 6.0)
            .collect()
    };
    Ok(s.axpy(h, &(combo(0), combo(1))))
}

/// Integrate from `start` for arclength `length`.
///
/// The velocity is used as given; the parameter runs over
/// `[0, length / |v|]`, so a unit-speed start gives `tau` = arclength.
pub fn geodesic_integrate<P: KahlerPotential + ?Sized>(
    model: &P,
    start: &GeodesicState,
    length: f64,
    ctrl: &StepControl,
) -> Result<Trajectory> {
    if !(length > 0.0) {
        return Err(Error::Domain(format!("geodesic length {length} must be positive")));
    }
    if start.z.len() != model.dim() {
        return Err(Error::Dimension { expected: model.dim(), got: start.z.len() });
    }
    let e0 = energy(model, start)?;
    if !(e0 > 0.0) {
        return Err(Error::Domain("initial velocity has zero length".into()));
    }
    let tau_end = length / e0.sqrt();
    let mut state = start.clone();
    let mut tau = 0.0;
    let mut samples = vec![TrajectorySample {
        tau,
        z: state.z.clone(),
        energy_drift: 0.0,
    }];
    let mut e_prev = e0;
    let mut max_drift = 0.0f64;
    while tau < tau_end {
        let mut h = ctrl.step.min(tau_end - tau);
        let (next, e_next) = loop {
            let cand = rk4_step(model, &state, h)?;
            let e = energy(model, &cand)?;
            if (e - e_prev).abs() <= ctrl.per_step_drift * e0 {
                break (cand, e);
            }
            h *= 0.5;
            if h < ctrl.min_step {
                return Err(Error::StepUnderflow {
                    tau,
                    last: Box::new(state),
                });
            }
        };
        tau = if tau_end - tau <= h { tau_end } else { tau + h };
        state = next;
        e_prev = e_next;
        let drift = (e_next - e0).abs() / e0;
        max_drift = max_drift.max(drift);
        samples.push(TrajectorySample {
            tau,
            z: state.z.clone(),
            energy_drift: drift,
        });
    }
    Ok(Trajectory {
        samples,
        max_drift,
        arclength: length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialModel;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn flat_geodesics_are_lines() {
        let m = PotentialModel::flat(2);
        let s = GeodesicState::new(vec![c(1.0, 0.5), c(-0.2, 0.0)], vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let tr = geodesic_integrate(&m, &s, 3.0, &StepControl::default()).unwrap();
        for smp in &tr.samples {
            for k in 0..2 {
                let want = s.z[k] + s.v[k] * smp.tau;
                assert!((smp.z[k] - want).norm() < 1e-13);
            }
        }
        assert!((tr.samples.last().unwrap().tau - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cigar_radial_geodesic_keeps_argument() {
        let m = PotentialModel::cigar(1).unwrap();
        let v = C::from_polar(1.0, 0.7);
        let s = GeodesicState::new(vec![c(0.0, 0.0)], vec![v]).unwrap();
        let tr = geodesic_integrate(&m, &s, 10.0, &StepControl::default()).unwrap();
        for smp in tr.samples.iter().skip(1) {
            assert!((smp.z[0].arg() - 0.7).abs() < 1e-10);
        }
        assert!(tr.max_drift < 1e-7);
    }

    #[test]
    fn energy_conserved_off_axis() {
        let m = PotentialModel::soliton(2).unwrap();
        let s = GeodesicState::new(vec![c(0.5, 0.2), c(-0.3, 1.0)], vec![c(0.3, -0.7), c(0.5, 0.4)]).unwrap();
        let tr = geodesic_integrate(&m, &s, 10.0, &StepControl::default()).unwrap();
        assert!(tr.max_drift < 1e-7, "{}", tr.max_drift);
    }

    #[test]
    fn rejects_bad_input() {
        let m = PotentialModel::cigar(1).unwrap();
        let s = GeodesicState::new(vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]).unwrap();
        assert!(geodesic_integrate(&m, &s, 1.0, &StepControl::default()).is_err());
        let s = GeodesicState::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        assert!(geodesic_integrate(&m, &s, -1.0, &StepControl::default()).is_err());
    }

    #[test]
    fn underflow_reports_last_state() {
        let m = PotentialModel::cigar(1).unwrap();
        let s = GeodesicState::new(vec![c(1.0, 0.0)], vec![c(3.0, 0.0)]).unwrap();
        let ctrl = StepControl { step: 0.5, min_step: 0.4, per_step_drift: 1e-30 };
        match geodesic_integrate(&m, &s, 1.0, &ctrl) {
            Err(Error::StepUnderflow { tau, last }) => {
                assert_eq!(tau, 0.0);
                assert_eq!(*last, s);
            }
            other => panic!("expected underflow, got {other:?}"),
        }
    }
}
