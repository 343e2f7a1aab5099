use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use darboux_core::curvature::{curvature_at, holomorphic_sectional};
use darboux_core::geodesic::{geodesic_integrate, GeodesicState, StepControl};
use darboux_core::plot::{self, PlotKind};
use darboux_core::sampling::PolydiscSampler;
use darboux_core::submanifold::{
    a_obstruction, ciriza_image_check, curvature_defect, sample_params, HoloCurvePair, HoloPoly,
    PhaseBlockEmbedding,
};
use darboux_core::suite::{run_suite, RunConfig};
use darboux_core::{ComplexVector, DarbouxMap, KahlerPotential, PotentialModel, SolitonProfile};

#[derive(Parser)]
#[command(name = "darboux", version, about = "Darboux coordinates for rotation-invariant Kahler potentials")]
struct Cli {
    /// Directory for relative or omitted output paths.
    #[arg(long, env = "DARBOUX_OUT_DIR", global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that the map pulls the standard form back to the model's form.
    VerifyPullback {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the finite-difference Jacobian.
        #[arg(long)]
        fd: bool,
        /// Defaults to 1e-8, or 1e-5 with --fd.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "pullback.json")]
        out: PathBuf,
    },
    /// Tabulate the soliton profile: t, u_prime, u_second, ode_residual.
    SolitonProfile {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long, default_value = "profile.csv")]
        out: PathBuf,
    },
    /// Integrate a geodesic; writes tau, coordinates, energy drift.
    Geodesic {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated complex coordinates, e.g. `0.5+1i,0`.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, allow_hyphen_values = true)]
        vel: String,
        /// Arclength.
        #[arg(long, default_value_t = 10.0)]
        length: f64,
        #[arg(long, default_value = "traj.csv")]
        out: PathBuf,
    },
    /// Dump the curvature tensor at a point.
    Curvature {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "tensor.json")]
        out: PathBuf,
    },
    /// Check that a phase-block subspace of a cigar product maps into a complex subspace.
    Ciriza {
        #[arg(long)]
        n: usize,
        /// e.g. `sigma=1:1:0,alpha=1:0+1i:1`; alpha defaults to all ones.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 3.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value = "ciriza.json")]
        out: PathBuf,
    },
    /// Compare the two curvature-defect computations for a curve `(f1, f2)`.
    Defect {
        /// Comma-separated coefficients of z, z^2, ...
        #[arg(long, allow_hyphen_values = true)]
        f1: String,
        #[arg(long, allow_hyphen_values = true)]
        f2: String,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 1.5)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Writes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite; exits nonzero if any claim fails.
    Suite {
        /// JSON run configuration; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write CSV data for plotting.
    PlotData {
        #[command(subcommand)]
        kind: PlotCmd,
    },
}

#[derive(Subcommand)]
enum PlotCmd {
    Profile {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long, default_value = "profile.csv")]
        out: PathBuf,
    },
    Geodesic {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, allow_hyphen_values = true)]
        vel: String,
        #[arg(long, default_value_t = 10.0)]
        length: f64,
        #[arg(long, default_value = "geodesic.csv")]
        out: PathBuf,
    },
    ResidualHeatmap {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
        #[arg(long, default_value_t = 41)]
        per_axis: usize,
        /// Remaining coordinates, comma-separated; zeros when omitted.
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        #[arg(long, default_value = "heatmap.csv")]
        out: PathBuf,
    },
}

fn parse_complex(s: &str) -> anyhow::Result<Complex64> {
    s.trim()
        .parse::<Complex64>()
        .map_err(|e| anyhow!("bad complex number `{s}`: {e:?}"))
}

fn parse_complex_list(s: &str, sep: char) -> anyhow::Result<Vec<Complex64>> {
    s.split(sep).filter(|p| !p.trim().is_empty()).map(parse_complex).collect()
}

fn parse_block_spec(n: usize, spec: &str) -> anyhow::Result<PhaseBlockEmbedding> {
    let mut sigma = None;
    let mut alpha = None;
    for part in spec.split(',') {
        let (key, val) = part.split_once('=').ok_or_else(|| anyhow!("expected key=value in `{part}`"))?;
        match key.trim() {
            "sigma" => {
                sigma = Some(
                    val.split(':')
                        .map(|v| v.trim().parse::<usize>().with_context(|| format!("bad sigma entry `{v}`")))
                        .collect::<anyhow::Result<Vec<_>>>()?,
                )
            }
            "alpha" => alpha = Some(parse_complex_list(val, ':')?),
            other => bail!("unknown spec key `{other}`"),
        }
    }
    let sigma = sigma.ok_or_else(|| anyhow!("spec needs sigma=..."))?;
    if sigma.len() != n {
        bail!("sigma has {} entries, expected {n}", sigma.len());
    }
    let alpha = alpha.unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); n]);
    Ok(PhaseBlockEmbedding::new(sigma, alpha)?)
}

fn resolve(out_dir: &Option<PathBuf>, p: &Path) -> PathBuf {
    match out_dir {
        Some(d) if p.is_relative() => d.join(p),
        _ => p.to_path_buf(),
    }
}

fn write(path: &Path, body: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn load_model(path: &Path) -> anyhow::Result<PotentialModel> {
    PotentialModel::from_file(path).with_context(|| format!("loading model {}", path.display()))
}

#[derive(Serialize)]
struct PullbackReport {
    model: String,
    n: usize,
    max_residual: f64,
    points_checked: usize,
    pass: bool,
}

#[derive(Serialize)]
struct TensorEntry {
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct TensorDump {
    model: String,
    n: usize,
    point: Vec<Complex64>,
    components: Vec<TensorEntry>,
    /// Holomorphic sectional curvature along each coordinate axis.
    axis_sectional: Vec<f64>,
}

#[derive(Serialize)]
struct DefectSummary {
    points: usize,
    skipped_degenerate: usize,
    max_relative_gap: f64,
    max_direct: f64,
    max_abs_a: f64,
    tolerance: f64,
    pass: bool,
}

fn trajectory(model: &PotentialModel, start: &str, vel: &str, length: f64) -> anyhow::Result<String> {
    let state = GeodesicState::new(parse_complex_list(start, ',')?, parse_complex_list(vel, ',')?)?;
    let tr = geodesic_integrate(model, &state, length, &StepControl::default())?;
    Ok(plot::trajectory_csv(&tr))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let od = cli.out_dir;
    match cli.cmd {
        Cmd::VerifyPullback { model, points, radius, seed, fd, tol, out } => {
            let m = load_model(&model)?;
            let map = DarbouxMap::new(m.clone());
            let tol = tol.unwrap_or(if fd { 1e-5 } else { 1e-8 });
            let pts = PolydiscSampler::new(radius, points, seed).points(m.dim());
            let mut worst = 0.0f64;
            for z in &pts {
                let r = if fd { map.pullback_residual_fd(z)? } else { map.pullback_residual(z)? };
                worst = worst.max(r);
            }
            let rep = PullbackReport {
                model: m.descriptor().label(),
                n: m.dim(),
                max_residual: worst,
                points_checked: pts.len(),
                pass: worst <= tol,
            };
            write(&resolve(&od, &out), &serde_json::to_string_pretty(&rep)?)?;
            println!("max residual {worst:e} over {} points: {}", pts.len(), if rep.pass { "PASS" } else { "FAIL" });
            Ok(rep.pass)
        }
        Cmd::SolitonProfile { n, t_min, t_max, points, out } => {
            let rows = SolitonProfile::new(n)?.table(t_min, t_max, points)?;
            write(&resolve(&od, &out), &plot::profile_csv(&rows))?;
            Ok(true)
        }
        Cmd::Geodesic { model, start, vel, length, out } => {
            let m = load_model(&model)?;
            write(&resolve(&od, &out), &trajectory(&m, &start, &vel, length)?)?;
            Ok(true)
        }
        Cmd::Curvature { model, point, out } => {
            let m = load_model(&model)?;
            let z = ComplexVector::new(parse_complex_list(&point, ',')?)?;
            let r = curvature_at(&m, &z)?;
            let n = m.dim();
            let mut components = Vec::with_capacity(n.pow(4));
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let c = r.get(i, j, k, l);
                            components.push(TensorEntry { i, j, k, l, re: c.re, im: c.im });
                        }
                    }
                }
            }
            let axis_sectional = (0..n)
                .map(|j| {
                    let mut v = vec![Complex64::new(0.0, 0.0); n];
                    v[j] = Complex64::new(1.0, 0.0);
                    holomorphic_sectional(&m, &z, &v)
                })
                .collect::<darboux_core::Result<Vec<_>>>()?;
            let dump = TensorDump {
                model: m.descriptor().label(),
                n,
                point: z.as_slice().to_vec(),
                components,
                axis_sectional,
            };
            write(&resolve(&od, &out), &serde_json::to_string_pretty(&dump)?)?;
            Ok(true)
        }
        Cmd::Ciriza { n, spec, samples, radius, seed, tol, out } => {
            let s = parse_block_spec(n, &spec)?;
            let map = DarbouxMap::new(PotentialModel::cigar(n)?);
            let params = sample_params(s.k(), samples, radius, seed);
            let rep = ciriza_image_check(&map, &s, &params, tol)?;
            write(&resolve(&od, &out), &serde_json::to_string_pretty(&rep)?)?;
            println!(
                "residual {:e}, rank {} (expected {}): {}",
                rep.max_residual,
                rep.rank,
                rep.expected_rank,
                if rep.pass { "PASS" } else { "FAIL" }
            );
            Ok(rep.pass)
        }
        Cmd::Defect { f1, f2, points, radius, seed, tol, out } => {
            let pair = HoloCurvePair::new(
                HoloPoly::from_tail(&parse_complex_list(&f1, ',')?),
                HoloPoly::from_tail(&parse_complex_list(&f2, ',')?),
            );
            let mut rng = darboux_core::sampling::rng(seed);
            let mut sum = DefectSummary {
                points,
                skipped_degenerate: 0,
                max_relative_gap: 0.0,
                max_direct: f64::NEG_INFINITY,
                max_abs_a: 0.0,
                tolerance: tol,
                pass: false,
            };
            for _ in 0..points {
                let z = darboux_core::sampling::disc_point(&mut rng, radius);
                match curvature_defect(&pair, z) {
                    Ok(d) => {
                        sum.max_relative_gap = sum.max_relative_gap.max((d.direct - d.via_a).abs() / d.direct.abs().max(1.0));
                        sum.max_direct = sum.max_direct.max(d.direct);
                        sum.max_abs_a = sum.max_abs_a.max(a_obstruction(&pair, z).norm());
                    }
                    Err(darboux_core::Error::DegenerateTangent(_)) => sum.skipped_degenerate += 1,
                    Err(e) => return Err(e.into()),
                }
            }
            sum.pass = sum.max_relative_gap <= tol;
            let body = serde_json::to_string_pretty(&sum)?;
            match out {
                Some(p) => write(&resolve(&od, &p), &body)?,
                None => println!("{body}"),
            }
            Ok(sum.pass)
        }
        Cmd::Suite { config, seed } => {
            let mut cfg = match &config {
                Some(p) => RunConfig::from_file(p).with_context(|| format!("reading {}", p.display()))?,
                None => RunConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let run = run_suite(&cfg)?;
            for r in &run.reports {
                let res = r.max_residual.map_or("n/a".to_string(), |x| format!("{x:e}"));
                println!(
                    "{:<24} {} residual {res} tol {:e} ({:.2}s){}",
                    r.claim,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.tolerance,
                    r.wall_time.as_secs_f64(),
                    r.error.as_ref().map_or(String::new(), |e| format!(" [{e}]"))
                );
            }
            let report = cfg.report.clone().unwrap_or_else(|| "report.json".into());
            let timings = cfg.timings.clone().unwrap_or_else(|| "timings.json".into());
            write(&resolve(&od, &report), &run.body_json())?;
            write(&resolve(&od, &timings), &run.timings_json())?;
            Ok(run.pass())
        }
        Cmd::PlotData { kind } => {
            let (kind, out) = match kind {
                PlotCmd::Profile { n, t_min, t_max, points, out } => {
                    (PlotKind::Profile { n, t_min, t_max, points }, out)
                }
                PlotCmd::Geodesic { model, start, vel, length, out } => {
                    let m = load_model(&model)?;
                    let state = GeodesicState::new(parse_complex_list(&start, ',')?, parse_complex_list(&vel, ',')?)?;
                    let tr = geodesic_integrate(&m, &state, length, &StepControl::default())?;
                    (PlotKind::Geodesic(tr), out)
                }
                PlotCmd::ResidualHeatmap { model, radius, per_axis, base, out } => {
                    let m = load_model(&model)?;
                    let base = match base {
                        Some(b) => parse_complex_list(&b, ',')?,
                        None => vec![Complex64::new(0.0, 0.0); m.dim() - 1],
                    };
                    (PlotKind::ResidualHeatmap { model: m, radius, per_axis, base }, out)
                }
            };
            let path = resolve(&od, &out);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            plot::emit_plot_data(&kind, &path)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
