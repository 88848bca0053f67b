//! Command-line front end: wave-plate scans, the thermal-noise study,
//! sampling experiments, and the analytic-vs-Fock oracle check.
//!
//! Angles are degrees at this boundary (radians internally). Exit codes:
//! 0 success, 2 configuration error, 3 numeric degeneracy, 4 oracle-check
//! failure.

mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_outputs, FileConfig, ScanOutput};
use output::Table;
use polsqueeze::*;
// the glob brings in polsqueeze::Result; command plumbing uses std's
use std::result::Result;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    OracleFail(String),
    Io(String),
}

impl From<polsqueeze::Error> for CliError {
    fn from(e: polsqueeze::Error) -> Self {
        match e {
            Error::NumericDegeneracy(m) => CliError::Numeric(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::OracleFail(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Numeric(m)
            | CliError::OracleFail(m)
            | CliError::Io(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "polsqueeze",
    about = "Click-counting simulation and certification of nonlinear polarization squeezing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wave-plate scan of the nonclassicality witnesses.
    Scan(ScanArgs),
    /// Thermal-noise robustness study of the linear vs nonlinear criteria.
    NoiseStudy(NoiseArgs),
    /// Finite-shot sampling experiment at a single setting.
    Sample(SampleArgs),
    /// Analytic-vs-Fock-oracle equivalence check.
    OracleCheck(OracleArgs),
}

/// Flags shared by every subcommand; each overrides its config-file key.
#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file (flags override its keys).
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// Squeezing amplitude |lambda| < 1.
    #[arg(long)]
    lambda: Option<f64>,
    /// Bell-state phase in degrees (0 symmetric, 180 antisymmetric).
    #[arg(long)]
    phi_deg: Option<f64>,
    /// Number of detection bins N.
    #[arg(long)]
    bins: Option<usize>,
    /// Overall quantum efficiency in [0, 1].
    #[arg(long)]
    efficiency: Option<f64>,
    /// CSV destination (stdout if omitted).
    #[arg(long)]
    out: Option<String>,
    /// JSON mirror destination.
    #[arg(long)]
    json: Option<String>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<FileConfig, CliError> {
        let mut cfg = FileConfig::load(self.config.as_deref())?;
        if let Some(v) = self.lambda {
            cfg.state.lambda = v;
        }
        if let Some(v) = self.phi_deg {
            cfg.state.phi_deg = v;
        }
        if let Some(v) = self.bins {
            cfg.detector.bins = v;
        }
        if let Some(v) = self.efficiency {
            cfg.detector.efficiency = v;
        }
        if let Some(v) = &self.out {
            cfg.output.csv = Some(v.clone());
        }
        if let Some(v) = &self.json {
            cfg.output.json = Some(v.clone());
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Scan axis: qwp or hwp.
    #[arg(long)]
    axis: Option<String>,
    /// Angle of the fixed wave plate, degrees.
    #[arg(long)]
    fixed_deg: Option<f64>,
    #[arg(long)]
    start_deg: Option<f64>,
    #[arg(long)]
    stop_deg: Option<f64>,
    #[arg(long)]
    step_deg: Option<f64>,
    /// Comma-separated outputs: second-order,mprime-mineig,s-nl-moments.
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    /// Shot count; switches the scan to sampling mode.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Bootstrap resamples for the M' uncertainty.
    #[arg(long)]
    resamples: Option<usize>,
}

#[derive(Args)]
struct NoiseArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    cos_theta_start: Option<f64>,
    #[arg(long)]
    cos_theta_stop: Option<f64>,
    #[arg(long)]
    cos_theta_step: Option<f64>,
    #[arg(long)]
    nbar_start: Option<f64>,
    #[arg(long)]
    nbar_stop: Option<f64>,
    #[arg(long)]
    nbar_step: Option<f64>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    qwp_deg: Option<f64>,
    #[arg(long)]
    hwp_deg: Option<f64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    resamples: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated wave-plate grid in degrees.
    #[arg(long, value_delimiter = ',')]
    angles_deg: Option<Vec<f64>>,
    /// Fock cutoff (0 = automatic tail bound).
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Test hook: skew the oracle path's efficiency by this factor.
    #[arg(long)]
    oracle_eta_factor: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scan(args) => run_scan(args),
        Command::NoiseStudy(args) => run_noise_study(args),
        Command::Sample(args) => run_sample(args),
        Command::OracleCheck(args) => run_oracle_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn build_state(cfg: &FileConfig) -> Result<BellStateParams, CliError> {
    Ok(BellStateParams::from_real(cfg.state.lambda, cfg.state.phi_deg.to_radians())?)
}

fn build_detector(cfg: &FileConfig) -> Result<DetectorConfig, CliError> {
    Ok(DetectorConfig::new(cfg.detector.bins, cfg.detector.efficiency)?)
}

fn angle_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) {
        return Err(CliError::Config(format!("step {step} must be positive")));
    }
    if stop < start {
        return Err(CliError::Config(format!("empty range [{start}, {stop}]")));
    }
    let mut grid = Vec::new();
    let mut i = 0usize;
    loop {
        let v = start + i as f64 * step;
        if v > stop + 1e-9 {
            break;
        }
        grid.push(v);
        i += 1;
    }
    Ok(grid)
}

fn run_scan(args: ScanArgs) -> Result<(), CliError> {
    let mut cfg = args.common.resolve()?;
    if let Some(v) = &args.axis {
        cfg.scan.axis = v.clone();
    }
    if let Some(v) = args.fixed_deg {
        cfg.scan.fixed_deg = v;
    }
    if let Some(v) = args.start_deg {
        cfg.scan.start_deg = v;
    }
    if let Some(v) = args.stop_deg {
        cfg.scan.stop_deg = v;
    }
    if let Some(v) = args.step_deg {
        cfg.scan.step_deg = v;
    }
    if let Some(v) = &args.outputs {
        cfg.scan.outputs = v.clone();
    }
    if let Some(v) = args.shots {
        cfg.sampling.shots = Some(v);
    }
    if let Some(v) = args.seed {
        cfg.sampling.seed = v;
    }
    if let Some(v) = args.resamples {
        cfg.sampling.resamples = v;
    }

    let qwp_axis = match cfg.scan.axis.as_str() {
        "qwp" => true,
        "hwp" => false,
        "nbar" => {
            return Err(CliError::Config(
                "axis 'nbar' belongs to the noise-study subcommand".into(),
            ))
        }
        other => return Err(CliError::Config(format!("unknown scan axis '{other}'"))),
    };
    let outputs = parse_outputs(&cfg.scan.outputs)?;
    let want = |o: ScanOutput| outputs.contains(&o);
    let state = build_state(&cfg)?;
    let det = build_detector(&cfg)?;
    let grid = angle_grid(cfg.scan.start_deg, cfg.scan.stop_deg, cfg.scan.step_deg)?;
    let sampling = cfg.sampling.shots;

    let mut columns = vec![
        "angle_deg",
        "witness_2nd",
        "witness_2nd_sigma",
        "mprime_mineig",
        "mprime_mineig_sigma",
        "s0nl_mean",
        "snl_mean",
    ];
    if sampling.is_some() {
        columns.extend([
            "witness_2nd_significance",
            "mprime_significance",
            "witness_2nd_analytic",
            "mprime_mineig_analytic",
        ]);
    }
    let mut table = Table::new(columns);

    for (index, &angle) in grid.iter().enumerate() {
        let (q, h) = if qwp_axis {
            (angle, cfg.scan.fixed_deg)
        } else {
            (cfg.scan.fixed_deg, angle)
        };
        let setting = compose_setting(q.to_radians(), h.to_radians())?;
        let moments = pi_moments_analytic(&state, &setting, &det)?;
        let witness_analytic = if want(ScanOutput::SecondOrder) {
            Some(second_order_witness(&moments, &det)?.value)
        } else {
            None
        };
        let mprime_analytic = if want(ScanOutput::MprimeMineig) {
            Some(moment_matrix_mprime(&moments, &det)?.min_eigenvalue)
        } else {
            None
        };

        let mut row: Vec<Option<f64>> = vec![Some(angle)];
        match sampling {
            None => {
                let (s0, s1) = if want(ScanOutput::SNlMoments) {
                    (
                        Some(s0_nl_moments(&moments, &det, 1)?[1]),
                        Some(s_nl_moments(&moments, &det, 1)?[1]),
                    )
                } else {
                    (None, None)
                };
                row.extend([witness_analytic, None, mprime_analytic, None, s0, s1]);
            }
            Some(shots) => {
                let probs = click_probabilities_analytic(&state, &setting, &det)?;
                let run = sample(&probs, shots, cfg.sampling.seed.wrapping_add(index as u64))?;
                let est = estimate_witnesses(&run, &det, cfg.sampling.resamples)?;
                let sampled_moments = moments_from_statistics(&run.frequencies()?, &det)?;
                let (s0, s1) = if want(ScanOutput::SNlMoments) {
                    (
                        Some(s0_nl_moments(&sampled_moments, &det, 1)?[1]),
                        Some(s_nl_moments(&sampled_moments, &det, 1)?[1]),
                    )
                } else {
                    (None, None)
                };
                let w = want(ScanOutput::SecondOrder);
                let mp = want(ScanOutput::MprimeMineig);
                row.extend([
                    w.then_some(est.second_order.value),
                    w.then_some(est.second_order.sigma),
                    mp.then_some(est.mprime_min_eig.value),
                    mp.then_some(est.mprime_min_eig.sigma),
                    s0,
                    s1,
                    w.then_some(est.second_order.significance),
                    mp.then_some(est.mprime_min_eig.significance),
                    witness_analytic,
                    mprime_analytic,
                ]);
            }
        }
        table.push(row);
    }

    emit(&cfg, "scan", &table)
}

fn run_noise_study(args: NoiseArgs) -> Result<(), CliError> {
    let mut cfg = args.common.resolve()?;
    if let Some(v) = args.common.bins {
        cfg.noise.bins = v;
    }
    if let Some(v) = args.cos_theta_start {
        cfg.noise.cos_theta_start = v;
    }
    if let Some(v) = args.cos_theta_stop {
        cfg.noise.cos_theta_stop = v;
    }
    if let Some(v) = args.cos_theta_step {
        cfg.noise.cos_theta_step = v;
    }
    if let Some(v) = args.nbar_start {
        cfg.noise.nbar_start = v;
    }
    if let Some(v) = args.nbar_stop {
        cfg.noise.nbar_stop = v;
    }
    if let Some(v) = args.nbar_step {
        cfg.noise.nbar_step = v;
    }

    let n = &cfg.noise;
    let cos_grid = angle_grid(n.cos_theta_start, n.cos_theta_stop, n.cos_theta_step)?;
    let nbar_grid = angle_grid(n.nbar_start, n.nbar_stop, n.nbar_step)?;
    for c in &cos_grid {
        if !(-1.0..=1.0).contains(c) {
            return Err(CliError::Config(format!("cos_theta {c} outside [-1, 1]")));
        }
    }

    let mut table = Table::new(vec![
        "cos_theta",
        "nbar",
        "nl_variance",
        "linear_variance",
        "nbar_threshold_linear",
        "nbar_threshold_nonlinear",
    ]);
    for &cos_theta in &cos_grid {
        let theta = cos_theta.acos();
        let (thr_lin, thr_nl) = if cos_theta.abs() < 1e-12 {
            (None, None)
        } else {
            (
                Some(noise_threshold(Criterion::Linear, theta, n.bins)?),
                Some(noise_threshold(Criterion::Nonlinear, theta, n.bins)?),
            )
        };
        for &nbar in &nbar_grid {
            let probe = NoisySingleProbe::new(theta, nbar, n.bins)?;
            table.push(vec![
                Some(cos_theta),
                Some(nbar),
                Some(nonlinear_noisy_variance(&probe)?),
                Some(linear_noisy_variance(&probe)),
                thr_lin,
                thr_nl,
            ]);
        }
    }
    emit(&cfg, "noise-study", &table)
}

fn run_sample(args: SampleArgs) -> Result<(), CliError> {
    let mut cfg = args.common.resolve()?;
    if let Some(v) = args.shots {
        cfg.sampling.shots = Some(v);
    }
    if let Some(v) = args.seed {
        cfg.sampling.seed = v;
    }
    if let Some(v) = args.resamples {
        cfg.sampling.resamples = v;
    }
    let qwp = args.qwp_deg.unwrap_or(0.0);
    let hwp = args.hwp_deg.unwrap_or(0.0);
    let shots = cfg
        .sampling
        .shots
        .ok_or_else(|| CliError::Config("sample requires --shots".into()))?;

    let state = build_state(&cfg)?;
    let det = build_detector(&cfg)?;
    let setting = compose_setting(qwp.to_radians(), hwp.to_radians())?;
    let probs = click_probabilities_analytic(&state, &setting, &det)?;
    let run = sample(&probs, shots, cfg.sampling.seed)?;
    let est = estimate_witnesses(&run, &det, cfg.sampling.resamples)?;
    let analytic = pi_moments_analytic(&state, &setting, &det)?;

    let mut table = Table::new(vec![
        "qwp_deg",
        "hwp_deg",
        "shots",
        "seed",
        "witness_2nd",
        "witness_2nd_sigma",
        "witness_2nd_significance",
        "witness_2nd_boot_sigma",
        "mprime_mineig",
        "mprime_mineig_sigma",
        "mprime_significance",
        "witness_2nd_analytic",
        "mprime_mineig_analytic",
    ]);
    table.push(vec![
        Some(qwp),
        Some(hwp),
        Some(shots as f64),
        Some(cfg.sampling.seed as f64),
        Some(est.second_order.value),
        Some(est.second_order.sigma),
        Some(est.second_order.significance),
        Some(est.second_order_bootstrap.sigma),
        Some(est.mprime_min_eig.value),
        Some(est.mprime_min_eig.sigma),
        Some(est.mprime_min_eig.significance),
        Some(second_order_witness(&analytic, &det)?.value),
        Some(moment_matrix_mprime(&analytic, &det)?.min_eigenvalue),
    ]);
    emit(&cfg, "sample", &table)
}

fn run_oracle_check(args: OracleArgs) -> Result<(), CliError> {
    let mut cfg = args.common.resolve()?;
    if let Some(v) = &args.angles_deg {
        cfg.oracle.angles_deg = v.clone();
    }
    if let Some(v) = args.cutoff {
        cfg.oracle.cutoff = v;
    }
    if let Some(v) = args.tolerance {
        cfg.oracle.tolerance = v;
    }
    if let Some(v) = args.oracle_eta_factor {
        cfg.oracle.eta_factor = v;
    }

    let state = build_state(&cfg)?;
    let det = build_detector(&cfg)?;
    let oracle_det = DetectorConfig::new(
        det.bins(),
        (det.efficiency() * cfg.oracle.eta_factor).clamp(0.0, 1.0),
    )?;
    let cutoff = if cfg.oracle.cutoff == 0 {
        default_cutoff(cfg.state.lambda)
    } else {
        cfg.oracle.cutoff
    };

    let mut table = Table::new(vec!["qwp_deg", "hwp_deg", "max_abs_dev"]);
    let mut worst = 0.0f64;
    for &q in &cfg.oracle.angles_deg {
        for &h in &cfg.oracle.angles_deg {
            let setting = compose_setting(q.to_radians(), h.to_radians())?;
            let analytic = click_probabilities_analytic(&state, &setting, &det)?;
            let oracle = oracle_click_statistics(&state, &setting, &oracle_det, cutoff)?;
            let dev = analytic.max_abs_difference(&oracle)?;
            worst = worst.max(dev);
            table.push(vec![Some(q), Some(h), Some(dev)]);
        }
    }
    emit(&cfg, "oracle-check", &table)?;

    if worst < cfg.oracle.tolerance {
        eprintln!("oracle check: PASS (max deviation {worst:.3e} < {:.1e})", cfg.oracle.tolerance);
        Ok(())
    } else {
        Err(CliError::OracleFail(format!(
            "oracle check FAILED: max deviation {worst:.3e} >= {:.1e}",
            cfg.oracle.tolerance
        )))
    }
}

fn emit(cfg: &FileConfig, command: &str, table: &Table) -> Result<(), CliError> {
    output::write_csv(cfg.output.csv.as_deref(), command, &cfg.echo_lines(), table)?;
    if let Some(path) = &cfg.output.json {
        output::write_json(path, command, cfg, table)?;
    }
    Ok(())
}
