use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use uca_somp::codebook::{
    build_angular_codebook, build_polar_codebook, build_spherical_codebook, coherence_stats,
    distance_grid, elevation_grid, write_binary, write_metadata, PairStats, SphericalCodebook,
};
use uca_somp::harness::{
    apply_config_text, emit_csv, run_trial, sweep_pilot, sweep_snr, to_csv_string,
    ExperimentConfig, Profile, SweepResult,
};
use uca_somp::numerics::first_j0_zero;
use uca_somp::{Error, Result};

/// Antenna count from which runs are gated behind `--slow`.
const SLOW_ANTENNAS: usize = 512;

#[derive(Parser, Debug)]
#[command(name = "uca-somp", version, about = "Near-field UCA channel estimation experiments")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// `key = value` file overriding the profile
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output path (CSV for sweeps, metadata for `codebook build`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated subset of S_SOMP,P_SOMP,ANGULAR_SOMP,LS,ORACLE
    #[arg(long, global = true)]
    methods: Option<String>,
    #[arg(long, global = true, default_value = "desk")]
    profile: String,
    /// Allow runs with 512 or more antennas
    #[arg(long, global = true)]
    slow: bool,
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build or inspect a codebook
    Codebook {
        #[command(subcommand)]
        action: CodebookAction,
    },
    /// Monte Carlo NMSE sweeps
    Sweep {
        #[command(subcommand)]
        kind: SweepKind,
    },
    /// Run a single trial and print per-method NMSE
    Trial {
        #[arg(long, value_enum, default_value = "snr")]
        sweep: SweepArg,
        /// SNR in dB (snr sweep) or pilot length (pilot sweep)
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        value: f64,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
}

#[derive(Subcommand, Debug)]
enum CodebookAction {
    /// Write grid metadata (and optionally the raw matrix)
    Build {
        #[arg(long, value_enum, default_value = "spherical")]
        kind: KindArg,
        /// Little-endian binary of the matrix
        #[arg(long)]
        binary: Option<PathBuf>,
    },
    /// Print grid sizes and coherence summary
    Stats {
        #[arg(long, value_enum, default_value = "spherical")]
        kind: KindArg,
        /// Random column pairs to sample
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SweepKind {
    Snr,
    Pilot,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SweepArg {
    Snr,
    Pilot,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Spherical,
    Polar,
    Angular,
}

fn load_config(common: &CommonArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::profile(common.profile.parse::<Profile>()?);
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        apply_config_text(&mut cfg, &text)?;
    }
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if let Some(methods) = &common.methods {
        cfg.set("methods", methods)?;
    }
    if let Some(workers) = common.workers {
        cfg.workers = workers;
    }
    if cfg.system.num_antennas >= SLOW_ANTENNAS && !common.slow {
        return Err(Error::Config(format!(
            "{} antennas is a paper-scale run; pass --slow to allow it",
            cfg.system.num_antennas
        )));
    }
    Ok(cfg)
}

fn build_codebook(cfg: &ExperimentConfig, kind: KindArg) -> Result<SphericalCodebook> {
    match kind {
        KindArg::Spherical => build_spherical_codebook(&cfg.system, cfg.delta, cfg.r_min),
        KindArg::Polar => build_polar_codebook(&cfg.system, cfg.delta, cfg.r_min),
        KindArg::Angular => build_angular_codebook(&cfg.system),
    }
}

fn print_pairs(label: &str, stats: &Option<PairStats>) {
    match stats {
        Some(s) => println!(
            "{label:<10} pairs={:<8} max={:.4} mean={:.4} median={:.4} p95={:.4}",
            s.count, s.max, s.mean, s.median, s.p95
        ),
        None => println!("{label:<10} pairs=0"),
    }
}

fn codebook_stats(cfg: &ExperimentConfig, kind: KindArg, budget: usize) -> Result<()> {
    let cb = build_codebook(cfg, kind)?;
    println!("columns G = {}", cb.num_columns());
    println!("antennas N = {}", cb.num_antennas());
    let elevations: BTreeSet<usize> = cb.grid.iter().map(|p| p.indices.t).collect();
    let max_azimuths = cb.grid.iter().map(|p| p.indices.s).max().unwrap_or(0) + 1;
    let max_rings = cb.grid.iter().map(|p| p.indices.z).max().unwrap_or(0) + 1;
    println!("elevation samples = {}", elevations.len());
    println!("max azimuth samples = {max_azimuths}");
    println!("max distance rings (incl. far field) = {max_rings}");
    if let Some(p) = cb.params {
        let geom = cfg.system.geometry()?;
        let lambda = cfg.system.wavelength();
        println!(
            "delta = {} alpha = {:.12} beta_delta = {:.12} z_cap = {:.6} m r_min = {} m",
            p.delta, p.alpha, p.beta_delta, p.z_cap, p.r_min
        );
        println!(
            "elevation grid T = {}",
            elevation_grid(geom.radius_m, lambda, first_j0_zero()).len() - 1
        );
        println!(
            "rings at theta = pi/2: {}",
            distance_grid(FRAC_PI_2, p.z_cap, p.r_min).len()
        );
    }
    let report = coherence_stats(&cb, budget, cfg.master_seed);
    print_pairs("elevation", &report.elevation);
    print_pairs("azimuth", &report.azimuth);
    print_pairs("distance", &report.distance);
    print_pairs("sampled", &report.sampled);
    Ok(())
}

fn report(result: &SweepResult, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            emit_csv(result, path)?;
            for r in &result.rows {
                eprintln!(
                    "{:>8} {:<13} {:>9.3} dB  ({} trials, {:.2} s)",
                    r.sweep_value, r.method, r.mean_nmse_db, r.trial_count, r.wall_time_s
                );
            }
        }
        None => print!("{}", to_csv_string(result)),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli.common)?;
    match cli.command {
        Command::Codebook { action } => match action {
            CodebookAction::Build { kind, binary } => {
                let cb = build_codebook(&cfg, kind)?;
                let meta = cli
                    .common
                    .out
                    .unwrap_or_else(|| PathBuf::from("codebook.txt"));
                write_metadata(&meta, &cb)?;
                if let Some(bin) = binary {
                    write_binary(&bin, &cb)?;
                }
                eprintln!(
                    "wrote {} x {} codebook metadata to {}",
                    cb.num_antennas(),
                    cb.num_columns(),
                    meta.display()
                );
                Ok(())
            }
            CodebookAction::Stats { kind, budget } => codebook_stats(&cfg, kind, budget),
        },
        Command::Sweep { kind } => {
            let result = match kind {
                SweepKind::Snr => sweep_snr(&cfg.snr_spec()?)?,
                SweepKind::Pilot => sweep_pilot(&cfg.pilot_spec()?)?,
            };
            report(&result, cli.common.out.as_ref())
        }
        Command::Trial { sweep, value, index } => {
            let spec = match sweep {
                SweepArg::Snr => cfg.snr_spec()?,
                SweepArg::Pilot => cfg.pilot_spec()?,
            };
            let record = run_trial(&spec, value, index)?;
            for o in &record.outcomes {
                match &o.nmse {
                    Ok(v) => println!(
                        "{:<13} nmse={:.6e} ({:.3} dB) {:.3} s",
                        o.method,
                        v,
                        10.0 * v.log10(),
                        o.elapsed_s
                    ),
                    Err(e) => println!("{:<13} error: {e}", o.method),
                }
            }
            if record.outcomes.iter().all(|o| o.nmse.is_err()) {
                return Err(Error::Numerical("every method failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

