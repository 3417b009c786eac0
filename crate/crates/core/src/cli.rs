//! The `pointer-lab` command line.
//!
//! ```text
//! pointer-lab <mirror|compton|sweep|ensemble> --config <path>
//!     [--set key=value]... [--seed N] [--out path] [--format csv|jsonl]
//! ```
//!
//! Records go to `--out` (or `output.path`) with the summary table on
//! stdout; without an output path the records go to stdout and the summary
//! to stderr.
//!
//! Exit status: 0 success, 1 I/O failure while writing, 2 malformed command
//! line or config, 3 physical-invariant violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::compton::{self, SweepRecord};
use crate::config::{EnsembleSource, Entries, Experiment, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::mirror::{self, ScanPoint};
use crate::output::{emit_all, format_f64};
use crate::ssb::{self, EnsembleStats};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pointer-lab", version, about = "Pointer-state measurement simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Photon and movable half-silvered mirror: regime scan over momentum transfer
    Mirror(RunArgs),
    /// Compton scattering at a single angle
    Compton(RunArgs),
    /// Compton scattering over an angle grid
    Sweep(RunArgs),
    /// Collapse ensemble of the Compton or mirror state
    Ensemble(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Key-value config file
    #[arg(long)]
    config: PathBuf,
    /// Override a config key, applied after the file
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file for the records
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

/// Result of one run: serialized records and a human-readable summary.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: String,
    pub summary: String,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_INVARIANT,
    }
}

/// Parses arguments, runs the experiment and writes the output. Returns the
/// process exit status.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let (experiment, args) = match cli.command {
        Command::Mirror(a) => (Experiment::Mirror, a),
        Command::Compton(a) => (Experiment::Compton, a),
        Command::Sweep(a) => (Experiment::Sweep, a),
        Command::Ensemble(a) => (Experiment::Ensemble, a),
    };

    let cfg = match load(experiment, &args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(stderr, "pointer-lab: {e}");
            return exit_code(&e);
        }
    };
    let output = match run(&cfg) {
        Ok(out) => out,
        Err(e) => {
            let _ = writeln!(stderr, "pointer-lab: {e}");
            return exit_code(&e);
        }
    };

    let written = match &cfg.output_path {
        Some(path) => std::fs::write(path, &output.records)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))
            .and_then(|_| stdout.write_all(output.summary.as_bytes()).map_err(|e| e.to_string())),
        None => stdout
            .write_all(output.records.as_bytes())
            .and_then(|_| stderr.write_all(output.summary.as_bytes()))
            .map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            let _ = writeln!(stderr, "pointer-lab: {msg}");
            EXIT_IO
        }
    }
}

fn load(experiment: Experiment, args: &RunArgs) -> Result<RunConfig> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut entries = Entries::parse(&text)?;
    for assignment in &args.set {
        entries.apply_override(assignment)?;
    }
    let mut cfg = RunConfig::from_entries(experiment, &entries)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_path = Some(out.clone());
    }
    if let Some(format) = args.format {
        cfg.output_format = format;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs a validated configuration.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.experiment {
        Experiment::Mirror => run_mirror(cfg),
        Experiment::Compton => {
            let records = compton::sweep(&cfg.compton, &[cfg.compton.angle_phi], cfg.n_ensemble, cfg.seed)?;
            let mut summary = sweep_summary(cfg, &records);
            let c = &cfg.compton;
            let k = compton::kinematics(c.wavelength, c.angle_phi, &c.constants)?;
            let max = compton::solve_max_parameters(c.ratio_threshold, &c.constants)?;
            let h = c.constants.planck;
            let _ = writeln!(summary, "incoming momentum     {} kg m/s", format_f64(k.p_in));
            let _ = writeln!(summary, "scattered momentum    {} kg m/s", format_f64(k.p_out));
            let _ = writeln!(
                summary,
                "uncertainty product   {} h",
                format_f64(k.uncertainty_product / h)
            );
            let _ = writeln!(
                summary,
                "lambda_max {} m, delta_lambda_max {} m, phi_max {} rad",
                format_f64(max.lambda_max),
                format_f64(max.delta_lambda_max),
                format_f64(max.phi_max)
            );
            Ok(RunOutput {
                records: emit_all(&records, cfg.output_format)?,
                summary,
            })
        }
        Experiment::Sweep => {
            let records = compton::sweep(&cfg.compton, &cfg.phi_grid, cfg.n_ensemble, cfg.seed)?;
            Ok(RunOutput {
                records: emit_all(&records, cfg.output_format)?,
                summary: sweep_summary(cfg, &records),
            })
        }
        Experiment::Ensemble => run_ensemble(cfg),
    }
}

fn run_mirror(cfg: &RunConfig) -> Result<RunOutput> {
    let grid = cfg.dp_grid.clone().unwrap_or_else(|| vec![cfg.mirror.momentum_transfer]);
    let points: Vec<ScanPoint> = mirror::regime_scan(&cfg.mirror, &grid, cfg.k)?;
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "mirror mass {} kg, sigma {} m, tau {} s, k = {}",
        format_f64(cfg.mirror.mirror_mass),
        format_f64(cfg.mirror.mirror_sigma_x),
        format_f64(cfg.mirror.interaction_time),
        format_f64(cfg.k)
    );
    let _ = writeln!(summary, "{:>24} {:>24} {:>14} {:>24}", "dp [kg m/s]", "|overlap|", "regime", "visibility");
    for p in &points {
        let _ = writeln!(
            summary,
            "{:>24} {:>24} {:>14} {:>24}",
            format_f64(p.dp_kgms),
            format_f64(p.pointer_overlap),
            p.regime.as_str(),
            format_f64(p.visibility)
        );
    }
    Ok(RunOutput {
        records: emit_all(&points, cfg.output_format)?,
        summary,
    })
}

fn run_ensemble(cfg: &RunConfig) -> Result<RunOutput> {
    let (state, consts) = match cfg.ensemble_source {
        EnsembleSource::Compton => (compton::build_entangled_state(&cfg.compton)?, cfg.compton.constants),
        EnsembleSource::Mirror => (mirror::evolve_interaction(&cfg.mirror)?, cfg.mirror.constants),
    };
    let stats: EnsembleStats = ssb::run_ensemble(&state, cfg.trials, cfg.k, cfg.seed, &consts)?;
    let mut summary = String::new();
    let _ = writeln!(summary, "regime      {}", stats.regime);
    let _ = writeln!(summary, "trials      {}", stats.n_total);
    let _ = writeln!(summary, "{:<11} {}", state.first().label, stats.n_branch1);
    let _ = writeln!(summary, "{:<11} {}", state.second().label, stats.n_branch2);
    match stats.fraction1 {
        Some(f) => {
            let _ = writeln!(summary, "fraction1   {f:.6}");
        }
        None => {
            let _ = writeln!(summary, "no collapse: pointer packets still interfere strongly");
        }
    }
    Ok(RunOutput {
        records: emit_all(std::slice::from_ref(&stats), cfg.output_format)?,
        summary,
    })
}

fn sweep_summary(cfg: &RunConfig, records: &[SweepRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "lambda {} m, seed {}, {} photons per angle",
        format_f64(cfg.compton.wavelength),
        cfg.seed,
        cfg.n_ensemble
    );
    let _ = writeln!(
        s,
        "{:>10} {:>12} {:>14} {:>12} {:>8} {:>10} {:>10}",
        "phi [deg]", "dl/l", "regime", "visibility", "f_mix", "n_branch1", "n_branch2"
    );
    for r in records {
        let _ = writeln!(
            s,
            "{:>10.4} {:>12.4e} {:>14} {:>12.4e} {:>8.3} {:>10} {:>10}",
            r.phi_rad.to_degrees(),
            r.ratio,
            r.regime.as_str(),
            r.visibility,
            r.f_mix,
            r.n_branch1,
            r.n_branch2
        );
    }
    let _ = writeln!(
        s,
        "f_mix follows the {} crossover model (extrapolation inside the intermediate band)",
        cfg.compton.crossover_model.as_str()
    );
    s
}
