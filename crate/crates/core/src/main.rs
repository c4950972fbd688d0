use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ldp_core::audit::{
    channel_pmf, halfspace_expectation_cube, hemisphere_mean_quadrature, monte_carlo_unbias,
    verify_dp,
};
use ldp_core::bounds::{
    density_rate_with, logistic_lower_with, mean_rate_with, median_rate_with,
    sparse_mean_lower_with, RateForm,
};
use ldp_core::experiment::{
    fmt_float, preset, run_experiment, summarize, write_csv, write_summary_csv, ExperimentSpec,
    RunRecord, PRESET_NAMES,
};
use ldp_core::mechanisms::{cube_halfspace_factor, sphere_halfspace_factor};
use ldp_core::{Channel, Error, LaplaceSensitivity, MomentAssumption, PrivacyLevel, Rng};

#[derive(Parser)]
#[command(name = "ldp", version, about = "Locally private estimation: sampling, experiments and audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Privacy level ε (overrides the config value).
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// RNG seed (overrides the config value).
    #[arg(long, env = "LDP_SEED", global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw privatized views of one input.
    MechSample(MechSample),
    /// Run experiments from a JSON config (one spec or an array).
    Estimate(Estimate),
    /// Run shipped experiment presets.
    Bench(Bench),
    /// Run the enumeration and Monte Carlo audits.
    Audit(Audit),
    /// Evaluate reference rate curves.
    Rates(Rates),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mechanism {
    TruncatedLaplace,
    L2Ball,
    LinfBall,
    SignRr,
    LaplaceL1,
    LaplaceL2,
    NaiveMedian,
}

#[derive(Args)]
struct MechSample {
    #[arg(long, value_enum)]
    mechanism: Mechanism,
    /// Input record, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    x: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Moment order for the truncated Laplace channel ("inf" for bounded data).
    #[arg(long, default_value_t = f64::INFINITY)]
    k: f64,
    /// Sample size that sets the truncation level.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Estimate {
    #[arg(long)]
    config: PathBuf,
    /// Also write per-cell summaries here.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Bench {
    /// Preset name, repeatable; "all" runs every preset.
    #[arg(long, required_unless_present = "config")]
    preset: Vec<String>,
    /// Extra experiments from a JSON config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Larger grids and replicate counts.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Write the reference rate curves here.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Audit {
    /// Largest dimension for the ℓ∞ enumeration checks (at most 8).
    #[arg(long, default_value_t = 4)]
    max_dim: usize,
    /// Monte Carlo draws per unbiasedness check.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum RateKind {
    Mean,
    SparseLower,
    Density,
    LogisticLower,
    Median,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Eps2,
    Expm1,
}

#[derive(Args)]
struct Rates {
    #[arg(long, value_enum)]
    kind: RateKind,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 2.0)]
    k: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Effective privacy factor; defaults to the usual form of each rate.
    #[arg(long, value_enum)]
    form: Option<Form>,
    #[command(flatten)]
    common: Common,
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_err(path: &Path, source: io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn out_label(path: &Option<PathBuf>) -> PathBuf {
    path.clone().unwrap_or_else(|| PathBuf::from("<stdout>"))
}

fn level(eps: Option<f64>) -> Result<PrivacyLevel, Error> {
    PrivacyLevel::new(eps.unwrap_or(1.0)).map_err(|e| Error::Config(e.to_string()))
}

fn mech_sample(a: MechSample) -> Result<(), Error> {
    let level = level(a.common.eps)?;
    let d = a.x.len();
    let channel = match a.mechanism {
        Mechanism::TruncatedLaplace => {
            Channel::truncated_laplace(&MomentAssumption::new(a.k, a.radius)?, a.n, level)?
        }
        Mechanism::L2Ball => Channel::l2_ball(d, a.radius, level)?,
        Mechanism::LinfBall => Channel::linf_ball(d, a.radius, level)?,
        Mechanism::SignRr => Channel::sign_rr(level),
        Mechanism::LaplaceL1 => Channel::laplace_vector(d, a.radius, level, LaplaceSensitivity::L1)?,
        Mechanism::LaplaceL2 => Channel::laplace_vector(d, a.radius, level, LaplaceSensitivity::L2Paper)?,
        Mechanism::NaiveMedian => Channel::naive_median(a.radius, level)?,
    };
    let mut rng = Rng::new(a.common.seed.unwrap_or(0));
    let label = out_label(&a.common.out);
    let mut out = open_out(&a.common.out)?;
    let header: Vec<String> = (1..=channel.dim()).map(|j| format!("z{j}")).collect();
    writeln!(out, "{}", header.join(",")).map_err(|e| io_err(&label, e))?;
    for _ in 0..a.samples {
        let z = channel.privatize(&a.x, &mut rng)?;
        let row: Vec<String> = z.into_iter().map(fmt_float).collect();
        writeln!(out, "{}", row.join(",")).map_err(|e| io_err(&label, e))?;
    }
    out.flush().map_err(|e| io_err(&label, e))
}

fn load_specs(path: &Path) -> Result<Vec<ExperimentSpec>, Error> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let parsed = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|s| vec![s])
    };
    parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn apply_overrides(specs: &mut [ExperimentSpec], common: &Common) {
    for s in specs {
        if let Some(eps) = common.eps {
            s.eps = eps;
        }
        if let Some(seed) = common.seed {
            s.seed = seed;
        }
    }
}

fn run_all(specs: &[ExperimentSpec]) -> Result<Vec<RunRecord>, Error> {
    let mut records = Vec::new();
    for s in specs {
        log::info!("running {} / {}", s.name, s.mechanism);
        records.extend(run_experiment(s)?);
    }
    Ok(records)
}

fn write_outputs(
    records: &[RunRecord],
    out: &Option<PathBuf>,
    summary: &Option<PathBuf>,
) -> Result<(), Error> {
    let label = out_label(out);
    write_csv(records, open_out(out)?).map_err(|e| io_err(&label, e))?;
    if let Some(p) = summary {
        let f = fs::File::create(p).map_err(|e| io_err(p, e))?;
        write_summary_csv(&summarize(records), io::BufWriter::new(f)).map_err(|e| io_err(p, e))?;
    }
    Ok(())
}

fn estimate(a: Estimate) -> Result<(), Error> {
    let mut specs = load_specs(&a.config)?;
    apply_overrides(&mut specs, &a.common);
    let records = run_all(&specs)?;
    write_outputs(&records, &a.common.out, &a.summary)
}

fn bench(a: Bench) -> Result<(), Error> {
    let seed = a.common.seed.unwrap_or(0);
    let names: Vec<&str> = if a.preset.iter().any(|p| p == "all") {
        PRESET_NAMES.to_vec()
    } else {
        a.preset.iter().map(String::as_str).collect()
    };
    let mut specs = Vec::new();
    let mut references = Vec::new();
    for name in names {
        let p = preset(name, a.full, seed)?;
        specs.extend(p.specs);
        references.extend(p.references);
    }
    if let Some(cfg) = &a.config {
        specs.extend(load_specs(cfg)?);
    }
    apply_overrides(&mut specs, &a.common);
    let records = run_all(&specs)?;
    write_outputs(&records, &a.common.out, &a.summary)?;
    if let Some(p) = &a.reference {
        let mut text = String::from("curve,n,value\n");
        for c in &references {
            for (n, v) in &c.points {
                text.push_str(&format!("{},{n},{}\n", c.label, fmt_float(*v)));
            }
        }
        fs::write(p, text).map_err(|e| io_err(p, e))?;
    }
    Ok(())
}

/// Runs the audits, printing one line per check; returns whether all passed.
fn audit(a: Audit) -> Result<bool, Error> {
    let level = level(a.common.eps)?;
    let max_dim = a.max_dim.clamp(1, 8);
    let mut rng = Rng::new(a.common.seed.unwrap_or(0));
    let label = out_label(&a.common.out);
    let mut out = open_out(&a.common.out)?;
    let mut all = true;
    let mut report = |ok: bool, name: String, out: &mut dyn Write| -> Result<(), Error> {
        all &= ok;
        writeln!(out, "{} {name}", if ok { "PASS" } else { "FAIL" }).map_err(|e| io_err(&label, e))
    };

    for d in 1..=10 {
        let c = cube_halfspace_factor(d)?;
        let e = halfspace_expectation_cube(&vec![1.0; d])?;
        let worst = e.iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
        report(worst < 1e-9, format!("cube halfspace mean d={d} err={worst:.2e}"), &mut *out)?;
    }
    for d in 2..=8 {
        let q = hemisphere_mean_quadrature(d, 1 << 12)?;
        let err = (q - sphere_halfspace_factor(d)?).abs();
        report(err < 1e-8, format!("sphere halfspace quadrature d={d} err={err:.2e}"), &mut *out)?;
    }
    let rr = Channel::sign_rr(level);
    let ratio = verify_dp(&rr, &[[1.0], [-1.0]])?;
    report((ratio - level.epsilon()).abs() < 1e-9, format!("sign RR log-ratio {ratio:.12}"), &mut *out)?;
    for d in 1..=max_dim {
        let ch = Channel::linf_ball(d, 1.0, level)?;
        let grid = cube_grid(d, 1.0);
        let ratio = verify_dp(&ch, &grid)?;
        let mut bias = 0.0f64;
        for x in &grid {
            let pmf = channel_pmf(&ch, x)?;
            bias = pmf.mean().iter().zip(x).map(|(m, v)| (m - v).abs()).fold(bias, f64::max);
        }
        report(
            ratio <= level.epsilon() + 1e-9 && bias < 1e-9,
            format!("ℓ∞ channel d={d} log-ratio={ratio:.12} max|bias|={bias:.2e}"),
            &mut *out,
        )?;
    }
    for (name, ch, x) in [
        ("ℓ2 channel", Channel::l2_ball(2, 1.0, level)?, vec![0.3, 0.4]),
        ("ℓ∞ channel d=27", Channel::linf_ball(27, 1.0, level)?, vec![0.0; 27]),
        ("sign RR", Channel::sign_rr(level), vec![-1.0]),
    ] {
        let (mean, se) = monte_carlo_unbias(&ch, &x, a.samples.max(1000), &mut rng)?;
        let worst = mean
            .iter()
            .zip(&se)
            .zip(&x)
            .map(|((m, s), v)| (m - v).abs() / s.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        report(worst <= 5.0, format!("{name} Monte Carlo max z={worst:.2}"), &mut *out)?;
    }
    out.flush().map_err(|e| io_err(&label, e))?;
    Ok(all)
}

/// All points of {-r, 0, r}^d.
fn cube_grid(d: usize, r: f64) -> Vec<Vec<f64>> {
    let mut grid = vec![vec![]];
    for _ in 0..d {
        grid = grid
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                [-r, 0.0, r].map(|v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    grid
}

fn rates(a: Rates) -> Result<(), Error> {
    let eps = a.common.eps.unwrap_or(1.0);
    let form = |default: RateForm| match a.form {
        Some(Form::Eps2) => RateForm::EpsSquared,
        Some(Form::Expm1) => RateForm::ExpMinusOneSquared,
        None => default,
    };
    let label = out_label(&a.common.out);
    let mut out = open_out(&a.common.out)?;
    writeln!(out, "n,value").map_err(|e| io_err(&label, e))?;
    for &n in &a.n {
        let v = match a.kind {
            RateKind::Mean => mean_rate_with(form(RateForm::EpsSquared), a.k, n, eps)?,
            RateKind::SparseLower => sparse_mean_lower_with(form(RateForm::ExpMinusOneSquared), a.d, n, eps)?,
            RateKind::Density => density_rate_with(form(RateForm::EpsSquared), a.beta, n, eps)?,
            RateKind::LogisticLower => logistic_lower_with(form(RateForm::ExpMinusOneSquared), a.d, n, eps)?,
            RateKind::Median => median_rate_with(form(RateForm::EpsSquared), a.radius, n, eps)?,
        };
        writeln!(out, "{n},{}", fmt_float(v)).map_err(|e| io_err(&label, e))?;
    }
    out.flush().map_err(|e| io_err(&label, e))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::MechSample(a) => mech_sample(a).map(|_| true),
        Command::Estimate(a) => estimate(a).map(|_| true),
        Command::Bench(a) => bench(a).map(|_| true),
        Command::Audit(a) => audit(a),
        Command::Rates(a) => rates(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
