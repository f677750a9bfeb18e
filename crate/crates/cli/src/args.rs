//! Command-line surface.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sagin_core::SchemeId;

use crate::{
    cmd_convergence, cmd_gen_scenario, cmd_heatmap, cmd_solve, cmd_sweep, load_options,
    load_scenario, CliResult, HeatmapGrid, SweepParam, SweepSpec, OPTS_ENV,
};

#[derive(Parser)]
#[command(
    name = "sagin-psc",
    version,
    about = "Energy minimization for satellite-UAV-ground semantic delivery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Solver options JSON file.
    #[arg(long, env = OPTS_ENV)]
    opts: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write a JSON report.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = SchemeId::SaginPsc)]
        scheme: SchemeId,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a scenario for each value of one parameter and write CSV rows.
    ///
    /// Units: data_bits in KB per terminal, sat_beam_gain in dB,
    /// sat_uav_distance in km, latency_budget in s, sat_cpu in GHz.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        /// Comma-separated schemes; all four when omitted.
        #[arg(long = "scheme", value_delimiter = ',')]
        schemes: Vec<SchemeId>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Access-link energy over a grid of UAV positions after a prior solve.
    Heatmap {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = SchemeId::SaginPsc)]
        scheme: SchemeId,
        /// Half-width of the square grid in meters.
        #[arg(long, default_value_t = HeatmapGrid::default().extent)]
        extent: f64,
        /// Points per axis.
        #[arg(long, default_value_t = HeatmapGrid::default().points)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Objective per outer iteration for several satellite CPU frequencies.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Comma-separated satellite CPU frequencies in Hz.
        #[arg(
            long = "sat-cpu",
            value_delimiter = ',',
            default_value = "0.5e9,1e9,2e9"
        )]
        sat_cpu: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a reference scenario with randomly placed terminals.
    GenScenario {
        #[arg(long, default_value_t = 4)]
        num_gts: usize,
        /// Radius of the terminal disk in meters.
        #[arg(long, default_value_t = 300.0)]
        radius: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve {
            common,
            scheme,
            out,
        } => {
            let cfg = load_scenario(&common.scenario)?;
            let opts = load_options(common.opts.as_deref())?;
            let outcome = cmd_solve(&cfg, scheme, &opts, common.seed, out.as_deref())?;
            println!(
                "{} total {} J after {} iterations",
                scheme,
                outcome.energy.total,
                outcome.iterations()
            );
        }
        Command::Sweep {
            common,
            param,
            values,
            schemes,
            jobs,
            out,
        } => {
            let cfg = load_scenario(&common.scenario)?;
            let opts = load_options(common.opts.as_deref())?;
            let schemes = if schemes.is_empty() {
                SchemeId::ALL.to_vec()
            } else {
                schemes
            };
            let spec = SweepSpec {
                param,
                values,
                schemes,
                seed: common.seed,
            };
            let rows = cmd_sweep(&cfg, &spec, &opts, jobs, &out)?;
            let infeasible = rows.iter().filter(|r| !r.feasible).count();
            println!("{} rows written, {infeasible} infeasible", rows.len());
        }
        Command::Heatmap {
            common,
            scheme,
            extent,
            points,
            out,
        } => {
            let cfg = load_scenario(&common.scenario)?;
            let opts = load_options(common.opts.as_deref())?;
            let map = cmd_heatmap(
                &cfg,
                scheme,
                &opts,
                common.seed,
                HeatmapGrid { extent, points },
                &out,
            )?;
            if let Some(c) = map.argmin() {
                println!("minimum {} J at ({}, {})", c.objective, c.x, c.y);
            }
            if map.argmin_feasible().is_none() {
                println!("no grid point is admissible");
            }
        }
        Command::Convergence {
            common,
            sat_cpu,
            out,
        } => {
            let cfg = load_scenario(&common.scenario)?;
            let opts = load_options(common.opts.as_deref())?;
            let points = cmd_convergence(&cfg, &sat_cpu, &opts, common.seed, &out)?;
            println!("{} points written", points.len());
        }
        Command::GenScenario {
            num_gts,
            radius,
            seed,
            out,
        } => {
            cmd_gen_scenario(num_gts, radius, seed, &out)?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 success, 1 input or usage error, 2 infeasible model.
pub fn run_cli<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
