//! Named verification claims, the JSON run configuration, and report assembly.
//!
//! Report bodies carry no timestamps or timings, so two runs with the same
//! configuration serialize to identical bytes. Timings are kept in a
//! separate document.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_at, curvature_fd};
use crate::darboux::{default_log_radii, default_rays, DarbouxMap};
use crate::error::{Error, Result};
use crate::geodesic::StepControl;
use crate::potential::{cond0_scan, radial_coords, KahlerPotential, ModelDescriptor, PotentialModel};
use crate::sampling::{self, PolydiscSampler};
use crate::soliton::SolitonProfile;
use crate::submanifold::{
    a_obstruction, catalog, ciriza_image_check, curvature_defect, curve_geodesy_residual, curve_image_rank,
    sample_params, total_geodesy_residual, HoloCurvePair, HoloPoly,
};

type C = Complex64;

/// Claim ids with their default tolerances, in report order.
pub const CLAIMS: &[(&str, f64)] = &[
    ("catalog-geodesy", 1e-7),
    ("catalog-linear-images", 1e-9),
    ("cigar-curvature", 1e-8),
    ("cigar-curvature-fd", 1e-5),
    ("cigar-pullback", 1e-8),
    ("cigar-pullback-fd", 1e-5),
    ("curve-defect-identity", 1e-8),
    ("flux-properness", 0.5),
    ("gradient-positivity", 1e-12),
    ("model-pullback", 1e-8),
    ("model-pullback-fd", 1e-5),
    ("profile-asymptotics", 0.05),
    ("profile-ode", 1e-9),
    ("soliton-cigar-consistency", 1e-10),
    ("soliton-pullback", 1e-8),
    ("soliton-pullback-fd", 1e-5),
];

fn default_seed() -> u64 {
    20_260_101
}

fn default_radius() -> f64 {
    5.0
}

fn default_points() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Path to a model descriptor, resolved against the config's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_file: Option<PathBuf>,
    /// Inline descriptor; used when `model_file` is absent. Defaults to `cigar(n=2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelDescriptor>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Polydisc radius for sampled points.
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Subset of claim ids to run; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claims: Option<Vec<String>>,
    /// Per-claim tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model_file: None,
            model: None,
            seed: default_seed(),
            radius: default_radius(),
            points: default_points(),
            claims: None,
            tolerances: BTreeMap::new(),
            report: None,
            timings: None,
        }
    }
}

fn line_of(text: &str, needle: &str) -> usize {
    text.lines().position(|l| l.contains(needle)).map_or(0, |i| i + 1)
}

fn is_claim(id: &str) -> bool {
    CLAIMS.iter().any(|(c, _)| *c == id)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(e.to_string()))?;
        for (id, &tol) in &cfg.tolerances {
            let line = line_of(text, &format!("\"{id}\""));
            if !is_claim(id) {
                return Err(Error::Config(format!("line {line}: unknown claim `{id}`")));
            }
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(Error::Config(format!(
                    "line {line}: tolerance for `{id}` must be positive and finite, got {tol}"
                )));
            }
        }
        for id in cfg.claims.iter().flatten() {
            if !is_claim(id) {
                let line = line_of(text, &format!("\"{id}\""));
                return Err(Error::Config(format!("line {line}: unknown claim `{id}`")));
            }
        }
        if !(cfg.radius > 0.0) || !cfg.radius.is_finite() {
            let line = line_of(text, "\"radius\"");
            return Err(Error::Config(format!("line {line}: radius must be positive")));
        }
        if cfg.points == 0 {
            let line = line_of(text, "\"points\"");
            return Err(Error::Config(format!("line {line}: points must be at least 1")));
        }
        Ok(cfg)
    }

    /// Reads a config file; a relative `model_file` is resolved against its directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        if let (Some(mf), Some(dir)) = (&cfg.model_file, path.parent()) {
            if mf.is_relative() {
                cfg.model_file = Some(dir.join(mf));
            }
        }
        Ok(cfg)
    }

    pub fn descriptor(&self) -> Result<ModelDescriptor> {
        match (&self.model_file, &self.model) {
            (Some(p), _) => {
                ModelDescriptor::from_json(&std::fs::read_to_string(p)?)
                    .map_err(|e| Error::Descriptor(format!("{}: {e}", p.display())))
            }
            (None, Some(d)) => Ok(d.clone()),
            (None, None) => Ok(ModelDescriptor::Cigar { n: 2 }),
        }
    }

    pub fn tolerance(&self, id: &str) -> f64 {
        self.tolerances
            .get(id)
            .copied()
            .or_else(|| CLAIMS.iter().find(|(c, _)| *c == id).map(|(_, t)| *t))
            .unwrap_or(f64::NAN)
    }

    pub fn enabled(&self) -> Vec<&'static str> {
        CLAIMS
            .iter()
            .map(|(c, _)| *c)
            .filter(|c| self.claims.as_ref().is_none_or(|sel| sel.iter().any(|s| s == c)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub model: String,
    pub samples: usize,
    pub seed: u64,
    /// `None` when the check could not produce a residual; see `error`.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// What a claim computes before it is judged against its tolerance.
struct Outcome {
    model: String,
    samples: usize,
    residual: Result<f64>,
}

impl Outcome {
    fn new(model: impl Into<String>, samples: usize, residual: Result<f64>) -> Self {
        Self { model: model.into(), samples, residual }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRun {
    pub reports: Vec<VerificationReport>,
}

#[derive(Serialize)]
struct Timing<'a> {
    claim: &'a str,
    seconds: f64,
}

impl SuiteRun {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    /// The deterministic report document.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn timings_json(&self) -> String {
        let t: Vec<Timing> = self
            .reports
            .iter()
            .map(|r| Timing { claim: &r.claim, seconds: r.wall_time.as_secs_f64() })
            .collect();
        serde_json::to_string_pretty(&t).expect("timings serialize")
    }

    pub fn total_time(&self) -> Duration {
        self.reports.iter().map(|r| r.wall_time).sum()
    }
}

/// Run every enabled claim; claims run on separate threads and the reports
/// come back in claim-id order.
pub fn run_suite(cfg: &RunConfig) -> Result<SuiteRun> {
    let descriptor = cfg.descriptor()?;
    let model = descriptor.build()?;
    let label = descriptor.label();
    let ids = cfg.enabled();
    let reports = std::thread::scope(|scope| {
        let handles: Vec<_> = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| {
                let (model, label) = (&model, &label);
                let seed = cfg.seed.wrapping_add(i as u64);
                scope.spawn(move || {
                    let start = Instant::now();
                    let out = run_claim(id, cfg, model, label, seed);
                    let tol = cfg.tolerance(id);
                    let (max_residual, error) = match out.residual {
                        Ok(r) => (Some(r), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    VerificationReport {
                        claim: id.to_string(),
                        model: out.model,
                        samples: out.samples,
                        seed,
                        max_residual,
                        tolerance: tol,
                        pass: max_residual.is_some_and(|r| r <= tol),
                        error,
                        wall_time: start.elapsed(),
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("claim thread panicked"))
            .collect::<Vec<_>>()
    });
    Ok(SuiteRun { reports })
}

fn max_over<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for it in items {
        let r = f(it)?;
        if r.is_nan() {
            return Err(Error::NonFinite("residual is NaN".into()));
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

fn pullback_families(id: &str) -> Vec<PotentialModel> {
    if id.starts_with("soliton") {
        (1..=3).map(|n| PotentialModel::soliton(n).expect("shipped model")).collect()
    } else {
        let mut v: Vec<PotentialModel> = (1..=4).map(|n| PotentialModel::cigar(n).expect("shipped model")).collect();
        v.push(PotentialModel::Poly(crate::potential::PolyPotential::coupled_test()));
        v
    }
}

fn pullback_residual(models: &[PotentialModel], cfg: &RunConfig, seed: u64, fd: bool) -> Result<f64> {
    max_over(models, |m| {
        let map = DarbouxMap::new(m.clone());
        let pts = PolydiscSampler::new(cfg.radius, cfg.points, seed).points(m.dim());
        max_over(&pts, |z| if fd { map.pullback_residual_fd(z) } else { map.pullback_residual(z) })
    })
}

fn run_claim(id: &str, cfg: &RunConfig, model: &PotentialModel, label: &str, seed: u64) -> Outcome {
    match id {
        "model-pullback" | "model-pullback-fd" => Outcome::new(
            label,
            cfg.points,
            pullback_residual(std::slice::from_ref(model), cfg, seed, id.ends_with("fd")),
        ),
        "soliton-pullback" | "soliton-pullback-fd" | "cigar-pullback" | "cigar-pullback-fd" => {
            let models = pullback_families(id);
            let family = if id.starts_with("soliton") { "soliton(n=1..3)" } else { "cigar(n=1..4)+coupled(n=2)" };
            Outcome::new(
                family,
                models.len() * cfg.points,
                pullback_residual(&models, cfg, seed, id.ends_with("fd")),
            )
        }
        "gradient-positivity" => {
            let region = PolydiscSampler::new(cfg.radius, cfg.points, seed);
            Outcome::new(
                label,
                cfg.points + 1,
                cond0_scan(model, &region, 0.0).map(|r| (-r.min).max(0.0)),
            )
        }
        "flux-properness" => {
            let rays = default_rays(model.dim(), 8, seed);
            let map = DarbouxMap::new(model.clone());
            let res = map
                .properness_scan(&rays, &default_log_radii(), 1e3)
                .map(|r| r.rays.iter().filter(|t| !t.pass).count() as f64);
            Outcome::new(label, rays.len(), res)
        }
        "profile-ode" => {
            let res = max_over(1..=3, |n| {
                let p = SolitonProfile::new(n)?;
                max_over(0..200, |i| p.ode_residual(-10.0 + 20.0 * i as f64 / 199.0))
            });
            Outcome::new("soliton(n=1..3)", 600, res)
        }
        "soliton-cigar-consistency" => {
            let res = SolitonProfile::new(1).and_then(|p| {
                max_over(0..=400, |i| {
                    let t = -20.0 + 0.1 * i as f64;
                    Ok((p.u_prime(t)? - t.exp().ln_1p()).abs())
                })
            });
            Outcome::new("soliton(n=1) vs cigar(n=1)", 401, res)
        }
        "profile-asymptotics" => Outcome::new("soliton(n=1..3)", 9, asymptotic_limits()),
        "cigar-curvature" | "cigar-curvature-fd" => {
            let fd = id.ends_with("fd");
            let res = max_over(1..=3, |n| {
                let m = PotentialModel::cigar(n)?;
                let pts = PolydiscSampler::new(cfg.radius, cfg.points, seed).points(n);
                max_over(&pts, |z| {
                    let r = curvature_at(&m, z)?;
                    if fd {
                        return Ok(curvature_fd(&m, z)?.max_abs_diff(&r));
                    }
                    let t = radial_coords(z);
                    let diag = max_over(0..n, |j| {
                        Ok((r.get(j, j, j, j).re * (1.0 + t.as_slice()[j]).powi(3) - 1.0).abs())
                    })?;
                    Ok(diag.max(r.max_mixed()))
                })
            });
            Outcome::new("cigar(n=1..3)", 3 * cfg.points, res)
        }
        "curve-defect-identity" => Outcome::new("cigar(n=2)", 20 * 50 + 20, defect_identity(seed)),
        "catalog-geodesy" => {
            let (count, res) = geodesy(seed);
            Outcome::new("cigar(n=1..3)", count, res)
        }
        "catalog-linear-images" => {
            let (count, res) = ciriza_all(seed);
            Outcome::new("cigar(n=1..4)", count, res)
        }
        other => Outcome::new(label, 0, Err(Error::Config(format!("unknown claim `{other}`")))),
    }
}

/// `max_n max(|u'(t)/t - n| / n, |u''(t) - n|)` at `t = 200`; errors unless
/// neither quantity grows along `t = 50, 100, 200`.
fn asymptotic_limits() -> Result<f64> {
    max_over(1..=3, |n| {
        let p = SolitonProfile::new(n)?;
        let nf = n as f64;
        let errs = [50.0, 100.0, 200.0]
            .iter()
            .map(|&t| {
                let d = p.derivs(t)?;
                Ok(((d[0] / t - nf).abs() / nf, (d[1] - nf).abs()))
            })
            .collect::<Result<Vec<_>>>()?;
        let monotone = errs.windows(2).all(|w| w[1].0 <= w[0].0 && w[1].1 <= w[0].1);
        if !monotone {
            return Err(Error::Solver(format!("n={n}: asymptotic errors not decreasing: {errs:?}")));
        }
        Ok(errs[2].0.max(errs[2].1))
    })
}

pub fn random_poly<R: rand::Rng>(rng: &mut R, max_degree: usize) -> HoloPoly {
    let deg = rng.random_range(1..=max_degree);
    let tail: Vec<C> = (0..deg).map(|_| sampling::disc_point(rng, 1.0)).collect();
    HoloPoly::from_tail(&tail)
}

/// Relative disagreement of the two defect paths over random cubic pairs,
/// combined with `|A(z, alpha z)|` scaled by its natural size.
fn defect_identity(seed: u64) -> Result<f64> {
    let mut rng = sampling::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let pair = HoloCurvePair::new(random_poly(&mut rng, 3), random_poly(&mut rng, 3));
        for _ in 0..50 {
            let z = sampling::disc_point(&mut rng, 1.5);
            let d = match curvature_defect(&pair, z) {
                Err(Error::DegenerateTangent(_)) => continue,
                r => r?,
            };
            worst = worst.max((d.direct - d.via_a).abs() / d.direct.abs().max(1.0));
        }
    }
    let one = C::new(1.0, 0.0);
    for _ in 0..20 {
        let alpha = sampling::unit_phase(&mut rng);
        let pair = HoloCurvePair::new(HoloPoly::from_tail(&[one]), HoloPoly::from_tail(&[alpha]));
        let z = sampling::disc_point(&mut rng, 2.0);
        let scale = (1.0 + z.norm()).powi(3);
        worst = worst.max(a_obstruction(&pair, z).norm() / scale);
    }
    Ok(worst)
}

/// Two launches per catalog embedding of the cigar products `n = 1..3`, plus
/// the parabola, which must leave its curve by more than `1e-2`.
fn geodesy(seed: u64) -> (usize, Result<f64>) {
    let ctrl = StepControl::default();
    let mut rng = sampling::rng(seed);
    let mut launches = 0;
    let res = (|| {
        let mut worst = 0.0f64;
        for n in 1..=3 {
            let m = PotentialModel::cigar(n)?;
            for s in catalog(n, seed.wrapping_add(n as u64)) {
                for _ in 0..2 {
                    let p0: Vec<C> = (0..s.k()).map(|_| sampling::disc_point(&mut rng, 1.0)).collect();
                    let dir = sampling::unit_direction(&mut rng, s.k());
                    worst = worst.max(total_geodesy_residual(&m, &s, &p0, &dir, 10.0, &ctrl)?);
                    launches += 1;
                }
            }
        }
        let m = PotentialModel::cigar(2)?;
        let mut off = 0.0f64;
        for p0 in [C::new(0.5, 0.0), C::new(1.0, 0.0), C::new(0.3, 0.4)] {
            off = off.max(curve_geodesy_residual(&m, &HoloCurvePair::parabola(), p0, 10.0, &ctrl)?);
            launches += 1;
        }
        if off <= 1e-2 {
            return Err(Error::Solver(format!(
                "non-geodesic parabola stayed within {off:e} of its curve"
            )));
        }
        Ok(worst)
    })();
    (launches, res)
}

/// Projector residual over every catalog embedding with `n <= 4`; errors on a
/// rank mismatch or when the parabola's image set is not of rank 2.
fn ciriza_all(seed: u64) -> (usize, Result<f64>) {
    let mut samples = 0;
    let res = (|| {
        let mut worst = 0.0f64;
        for n in 1..=4 {
            let map = DarbouxMap::new(PotentialModel::cigar(n)?);
            for s in catalog(n, seed.wrapping_add(n as u64)) {
                let params = sample_params(s.k(), 50, 3.0, seed ^ samples as u64);
                let rep = ciriza_image_check(&map, &s, &params, 1e-9)?;
                if rep.rank != rep.expected_rank {
                    return Err(Error::Solver(format!(
                        "sigma {:?}: image rank {} != {}",
                        s.sigma(),
                        rep.rank,
                        rep.expected_rank
                    )));
                }
                worst = worst.max(rep.max_residual);
                samples += params.len();
            }
        }
        let map = DarbouxMap::new(PotentialModel::cigar(2)?);
        let params: Vec<C> = sample_params(1, 50, 2.0, seed).into_iter().map(|p| p[0]).collect();
        let rank = curve_image_rank(&map, &HoloCurvePair::parabola(), &params)?;
        samples += params.len();
        if rank <= 1 {
            return Err(Error::Solver("parabola image set has complex rank 1".into()));
        }
        Ok(worst)
    })();
    (samples, res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_tolerance_rejected_with_line() {
        let text = "{\n  \"seed\": 1,\n  \"tolerances\": {\n    \"soliton-pullback\": 0\n  }\n}";
        let err = RunConfig::from_json(text).unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
    }

    #[test]
    fn unknown_fields_and_claims_rejected() {
        assert!(RunConfig::from_json("{\"sede\": 1}").is_err());
        assert!(RunConfig::from_json("{\"claims\": [\"no-such-claim\"]}").is_err());
        let err = RunConfig::from_json("{\n\"seed\": \"x\"}").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.descriptor().unwrap(), ModelDescriptor::Cigar { n: 2 });
        assert_eq!(cfg.enabled().len(), CLAIMS.len());
        assert_eq!(cfg.tolerance("profile-ode"), 1e-9);
    }

    #[test]
    fn claim_table_is_sorted() {
        assert!(CLAIMS.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn subset_run_is_ordered_and_passes() {
        let cfg = RunConfig::from_json(
            r#"{"points": 10, "claims": ["soliton-cigar-consistency", "model-pullback", "gradient-positivity"]}"#,
        )
        .unwrap();
        let run = run_suite(&cfg).unwrap();
        let ids: Vec<&str> = run.reports.iter().map(|r| r.claim.as_str()).collect();
        assert_eq!(ids, ["gradient-positivity", "model-pullback", "soliton-cigar-consistency"]);
        assert!(run.pass(), "{}", run.body_json());
    }

    #[test]
    fn tight_tolerance_fails() {
        let cfg = RunConfig::from_json(
            r#"{"points": 5, "claims": ["profile-asymptotics"], "tolerances": {"profile-asymptotics": 1e-6}}"#,
        )
        .unwrap();
        let run = run_suite(&cfg).unwrap();
        assert!(!run.pass());
        assert!(!run.body_json().contains("seconds"));
    }
}
