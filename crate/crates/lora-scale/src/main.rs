//! Command-line front end: success-probability sweeps, coverage sweeps,
//! contour grids and Monte Carlo validation, emitted as CSV.
//!
//! Exit codes: 0 success, 1 validation exceeded tolerance, 2 bad
//! configuration or arguments, 3 I/O failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lora_scale::config::{load_config, RunConfig};
use lora_scale::coverage::{contour_grid, coverage_sweep, Preset};
use lora_scale::error::Error;
use lora_scale::montecarlo::{simulate_success, SimSpec};

#[derive(Parser)]
#[command(
    name = "lora-scale",
    version,
    about = "Analytical uplink success and coverage probabilities for a single-cell LoRa network"
)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file (sectioned key=value); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write CSV here (atomically) instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Override the Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the Monte Carlo trial count.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Override the SF allocation scheme (eib, eab, plb).
    #[arg(long, global = true)]
    scheme: Option<String>,

    /// Override the cell radius in meters.
    #[arg(long, global = true)]
    radius: Option<f64>,

    /// Override the mean number of deployed devices.
    #[arg(long, global = true)]
    devices: Option<f64>,

    /// Override the duty cycle (fraction in (0, 1]).
    #[arg(long = "duty-cycle", global = true)]
    duty_cycle: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Success probabilities versus distance from the gateway.
    Success {
        /// Also run the Monte Carlo simulator at each grid point and append
        /// its estimates and confidence half-widths.
        #[arg(long)]
        validate: bool,
    },
    /// Coverage probabilities versus mean device count.
    Coverage,
    /// Joint coverage over a (cell radius, device count) grid for a
    /// regulatory sub-band preset.
    Contour {
        /// Sub-band preset: h1.4, h1.5 or h1.6.
        #[arg(long, default_value = "h1.4")]
        preset: String,
    },
    /// Compare the analytic curves against Monte Carlo on a distance grid
    /// and fail if any discrepancy exceeds max(0.01, CI half-width).
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: &Cli) -> lora_scale::Result<ExitCode> {
    let mut cfg = match &cli.common.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    apply_overrides(&mut cfg, &cli.common)?;
    cfg.validate()?;

    match &cli.command {
        Command::Success { validate } => {
            let csv = success_csv(&cfg, *validate)?;
            emit(&csv, cli.common.output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Coverage => {
            let csv = coverage_csv(&cfg)?;
            emit(&csv, cli.common.output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Contour { preset } => {
            let preset: Preset = preset.parse()?;
            let csv = contour_csv(&cfg, preset)?;
            emit(&csv, cli.common.output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate => {
            let (csv, passed) = validate_report(&cfg)?;
            emit(&csv, cli.common.output.as_deref())?;
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn apply_overrides(cfg: &mut RunConfig, common: &Common) -> lora_scale::Result<()> {
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if let Some(scheme) = &common.scheme {
        cfg.scheme = scheme.parse()?;
    }
    if let Some(radius) = common.radius {
        cfg.radius_m = radius;
    }
    if let Some(devices) = common.devices {
        cfg.n_bar = devices;
    }
    if let Some(alpha) = common.duty_cycle {
        cfg.radio.duty_cycle = alpha;
    }
    Ok(())
}

fn sim_spec(cfg: &RunConfig) -> SimSpec {
    SimSpec {
        trials: cfg.trials,
        seed: cfg.seed,
        capture_mode: cfg.capture_mode,
    }
}

fn success_csv(cfg: &RunConfig, validate: bool) -> lora_scale::Result<String> {
    let scenario = cfg.scenario()?;
    let points = scenario.success_sweep(cfg.success_points)?;
    let mut out = String::from("distance_m,annulus,sf,p_snr,p_sir_dom,p_sir_cosf,p_sir_joint");
    if validate {
        out.push_str(
            ",mc_snr,mc_snr_ci,mc_sir_dom,mc_sir_dom_ci,mc_sir_cosf,mc_sir_cosf_ci,mc_sir_joint,mc_sir_joint_ci",
        );
    }
    out.push('\n');
    let spec = sim_spec(cfg);
    for p in &points {
        // annulus is reported 1-based to match the SF ring numbering
        write!(
            out,
            "{},{},{},{},{},{},{}",
            p.distance_m,
            p.annulus + 1,
            p.sf.as_u8(),
            p.p_snr,
            p.p_sir_dom,
            p.p_sir_cosf,
            p.p_sir_joint
        )
        .expect("write to string");
        if validate {
            let est = simulate_success(&scenario, p.distance_m, &spec)?;
            write!(
                out,
                ",{},{},{},{},{},{},{},{}",
                est.snr.estimate,
                est.snr.ci_half_width,
                est.sir_dom.estimate,
                est.sir_dom.ci_half_width,
                est.sir_cosf.estimate,
                est.sir_cosf.ci_half_width,
                est.sir_joint.estimate,
                est.sir_joint.ci_half_width
            )
            .expect("write to string");
        }
        out.push('\n');
    }
    Ok(out)
}

fn coverage_csv(cfg: &RunConfig) -> lora_scale::Result<String> {
    let scenario = cfg.scenario()?;
    let results = coverage_sweep(&scenario, &cfg.coverage_devices)?;
    let mut out = String::from("n_bar,pc_snr,pc_sir_dom,pc_sir_cosf,pc_sir_joint,pc_joint\n");
    for r in &results {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n_bar, r.pc_snr, r.pc_sir_dom, r.pc_sir_cosf, r.pc_sir_joint, r.pc_joint
        )
        .expect("write to string");
    }
    Ok(out)
}

fn contour_csv(cfg: &RunConfig, preset: Preset) -> lora_scale::Result<String> {
    let radio = preset.apply(cfg.radio.clone());
    let snr = lora_scale::SnrThresholds::new(cfg.snr_thresholds_db)?;
    let sir = lora_scale::SirMatrix::new(cfg.sir_matrix_db)?;
    let grid = contour_grid(
        &radio,
        &snr,
        &sir,
        cfg.scheme,
        &cfg.contour_radii_m,
        &cfg.contour_devices,
    )?;
    let mut out = String::from("radius_m,n_bar,pc_joint\n");
    for (ri, &r) in grid.radii_m.iter().enumerate() {
        for (ni, &n) in grid.device_counts.iter().enumerate() {
            writeln!(out, "{},{},{}", r, n, grid.values[ri][ni]).expect("write to string");
        }
    }
    Ok(out)
}

/// Run analytic vs Monte Carlo on a distance grid. Returns the per-point CSV
/// and whether every metric stayed within max(0.01, CI half-width).
fn validate_report(cfg: &RunConfig) -> lora_scale::Result<(String, bool)> {
    let scenario = cfg.scenario()?;
    let grid = scenario.sweep_grid(cfg.validation_points)?;
    let spec = sim_spec(cfg);
    let mut out = String::from(
        "distance_m,annulus,sf,p_snr,p_sir_dom,p_sir_cosf,p_sir_joint,mc_snr,mc_snr_ci,mc_sir_dom,mc_sir_dom_ci,mc_sir_cosf,mc_sir_cosf_ci,mc_sir_joint,mc_sir_joint_ci\n",
    );
    let metrics = ["p_snr", "p_sir_dom", "p_sir_cosf", "p_sir_joint"];
    let mut max_gap = [0.0f64; 4];
    let mut passed = true;
    for &x in &grid {
        let p = scenario.success_at(x)?;
        let est = simulate_success(&scenario, x, &spec)?;
        let pairs = [
            (p.p_snr, &est.snr),
            (p.p_sir_dom, &est.sir_dom),
            (p.p_sir_cosf, &est.sir_cosf),
            (p.p_sir_joint, &est.sir_joint),
        ];
        for (k, (analytic, mc)) in pairs.iter().enumerate() {
            let gap = (analytic - mc.estimate).abs();
            max_gap[k] = max_gap[k].max(gap);
            if gap > 0.01f64.max(mc.ci_half_width) {
                passed = false;
            }
        }
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.distance_m,
            p.annulus + 1,
            p.sf.as_u8(),
            p.p_snr,
            p.p_sir_dom,
            p.p_sir_cosf,
            p.p_sir_joint,
            est.snr.estimate,
            est.snr.ci_half_width,
            est.sir_dom.estimate,
            est.sir_dom.ci_half_width,
            est.sir_cosf.estimate,
            est.sir_cosf.ci_half_width,
            est.sir_joint.estimate,
            est.sir_joint.ci_half_width
        )
        .expect("write to string");
    }
    for (name, gap) in metrics.iter().zip(max_gap) {
        eprintln!("validate: max |analytic - mc| for {name} = {gap:.6}");
    }
    eprintln!(
        "validate: {} ({} points, {} trials each)",
        if passed { "PASS" } else { "FAIL" },
        grid.len(),
        cfg.trials
    );
    Ok((out, passed))
}

/// Write to stdout, or atomically to `path` via a sibling temp file.
fn emit(csv: &str, path: Option<&Path>) -> lora_scale::Result<()> {
    let Some(path) = path else {
        print!("{csv}");
        return Ok(());
    };
    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(io_err)?;
    tmp.write_all(csv.as_bytes()).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
