//! CSV data files for plotting. Every file starts with a header row and
//! numbers are written in shortest round-trip form.
//!
//! | kind               | columns                                           |
//! |--------------------|---------------------------------------------------|
//! | `profile`          | `t, u_prime, u_second, ode_residual`              |
//! | `geodesic`         | `tau, re_z1, im_z1, ..., re_zn, im_zn, energy_drift` |
//! | `residual-heatmap` | `re_z1, im_z1, residual`                          |

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::darboux::DarbouxMap;
use crate::error::{Error, Result};
use crate::geodesic::Trajectory;
use crate::potential::{ComplexVector, KahlerPotential, PotentialModel};
use crate::soliton::ProfileRow;

#[derive(Clone, Debug)]
pub enum PlotKind {
    Profile { n: usize, t_min: f64, t_max: f64, points: usize },
    Geodesic(Trajectory),
    /// Pullback residual over a grid of the first coordinate disc; the other
    /// coordinates are held at `base`.
    ResidualHeatmap { model: PotentialModel, radius: f64, per_axis: usize, base: Vec<Complex64> },
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut s = String::from("t,u_prime,u_second,ode_residual\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", num(r.t), num(r.u_prime), num(r.u_second), num(r.ode_residual));
    }
    s
}

pub fn trajectory_csv(tr: &Trajectory) -> String {
    let n = tr.samples.first().map_or(0, |s| s.z.len());
    let mut s = String::from("tau");
    for j in 1..=n {
        let _ = write!(s, ",re_z{j},im_z{j}");
    }
    s.push_str(",energy_drift\n");
    for smp in &tr.samples {
        s.push_str(&num(smp.tau));
        for c in &smp.z {
            let _ = write!(s, ",{},{}", num(c.re), num(c.im));
        }
        let _ = writeln!(s, ",{}", num(smp.energy_drift));
    }
    s
}

pub fn heatmap_csv(model: &PotentialModel, radius: f64, per_axis: usize, base: &[Complex64]) -> Result<String> {
    let n = model.dim();
    if base.len() + 1 != n {
        return Err(Error::Dimension { expected: n - 1, got: base.len() });
    }
    if per_axis < 2 || !(radius > 0.0) {
        return Err(Error::Domain("heatmap needs radius > 0 and at least 2 points per axis".into()));
    }
    let map = DarbouxMap::new(model.clone());
    let mut s = String::from("re_z1,im_z1,residual\n");
    let step = 2.0 * radius / (per_axis - 1) as f64;
    for a in 0..per_axis {
        for b in 0..per_axis {
            let z1 = Complex64::new(-radius + step * a as f64, -radius + step * b as f64);
            let mut z = vec![z1];
            z.extend_from_slice(base);
            let r = map.pullback_residual(&ComplexVector::new(z)?)?;
            let _ = writeln!(s, "{},{},{}", num(z1.re), num(z1.im), num(r));
        }
    }
    Ok(s)
}

pub fn emit_plot_data(kind: &PlotKind, path: impl AsRef<Path>) -> Result<()> {
    let body = match kind {
        PlotKind::Profile { n, t_min, t_max, points } => {
            profile_csv(&crate::soliton::SolitonProfile::new(*n)?.table(*t_min, *t_max, *points)?)
        }
        PlotKind::Geodesic(tr) => trajectory_csv(tr),
        PlotKind::ResidualHeatmap { model, radius, per_axis, base } => heatmap_csv(model, *radius, *per_axis, base)?,
    };
    std::fs::write(path, body)?;
    Ok(())
}
