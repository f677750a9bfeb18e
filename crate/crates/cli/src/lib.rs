//! Experiment runner behind the `sagin-psc` binary. Every subcommand is a
//! plain function here so tests can drive it without spawning a process.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use sagin_core::algorithm::best_effort;
use sagin_core::subsolvers::{solve_location, LocationLandscape};
use sagin_core::{
    check_feasibility, run_scheme, scenario::db_to_linear, EnergyBreakdown, Error as CoreError,
    FeasibilityReport, LatencyBreakdown, ScenarioConfig, SchemeId, SolutionState, SolveOutcome,
    SolverOptions,
};
use serde::Serialize;

mod args;

pub use args::run_cli;

/// Environment variable naming a default solver-options file.
pub const OPTS_ENV: &str = "SAGIN_PSC_OPTS";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed files.
    Input(String),
    /// The model has no admissible solution.
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Infeasible(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_infeasible() {
            CliError::Infeasible(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn load_scenario(path: &Path) -> CliResult<ScenarioConfig> {
    ScenarioConfig::load(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Options from `explicit`, else from the file named by [`OPTS_ENV`], else
/// the defaults.
pub fn load_options(explicit: Option<&Path>) -> CliResult<SolverOptions> {
    let path = explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OPTS_ENV).map(PathBuf::from));
    match path {
        Some(p) => {
            SolverOptions::load(&p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
        }
        None => Ok(SolverOptions::default()),
    }
}

/// Result document written by `solve`.
#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub scheme: SchemeId,
    pub seed: u64,
    pub feasible: bool,
    pub state: SolutionState,
    pub energy: EnergyBreakdown,
    pub latency: LatencyBreakdown,
    pub feasibility: FeasibilityReport,
    pub trace: sagin_core::IterationTrace,
}

/// Solves one scenario and writes the JSON report. Returns the outcome so
/// callers can print a summary; an infeasible run still writes its
/// best-effort report before the error is returned.
pub fn cmd_solve(
    cfg: &ScenarioConfig,
    scheme: SchemeId,
    opts: &SolverOptions,
    seed: u64,
    out: Option<&Path>,
) -> CliResult<SolveOutcome> {
    let outcome = best_effort(run_scheme(cfg, scheme, opts, seed))?;
    let report = SolveReport {
        scheme,
        seed,
        feasible: outcome.feasible,
        state: outcome.state.clone(),
        energy: outcome.energy,
        latency: outcome.latency.clone(),
        feasibility: check_feasibility(cfg, &outcome.state),
        trace: outcome.trace.clone(),
    };
    if let Some(path) = out {
        let text =
            serde_json::to_string_pretty(&report).map_err(|e| CliError::Input(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
    }
    if outcome.feasible {
        Ok(outcome)
    } else {
        Err(CliError::Infeasible(format!(
            "best effort total {} J misses the constraints",
            outcome.energy.total
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    /// Per-terminal data size in KB, applied to every terminal.
    DataBits,
    /// Satellite beam gain in dB.
    SatBeamGain,
    /// Satellite-UAV distance in km.
    SatUavDistance,
    /// Latency budget in seconds.
    LatencyBudget,
    /// Satellite CPU frequency in GHz.
    SatCpu,
}

impl SweepParam {
    pub const ALL: [SweepParam; 5] = [
        SweepParam::DataBits,
        SweepParam::SatBeamGain,
        SweepParam::SatUavDistance,
        SweepParam::LatencyBudget,
        SweepParam::SatCpu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::DataBits => "data_bits",
            SweepParam::SatBeamGain => "sat_beam_gain",
            SweepParam::SatUavDistance => "sat_uav_distance",
            SweepParam::LatencyBudget => "latency_budget",
            SweepParam::SatCpu => "sat_cpu",
        }
    }

    /// Copy of `base` with this parameter set to `value` (in sweep units).
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut cfg = base.clone();
        match self {
            SweepParam::DataBits => cfg.data_bits.iter_mut().for_each(|d| *d = value * 8192.0),
            SweepParam::SatBeamGain => cfg.sat_beam_gain = db_to_linear(value),
            SweepParam::SatUavDistance => cfg.sat_uav_distance = value * 1e3,
            SweepParam::LatencyBudget => cfg.latency_budget = value,
            SweepParam::SatCpu => cfg.sat_cpu = value * 1e9,
        }
        cfg
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SweepParam::ALL.iter().map(|p| p.name()).collect();
                format!(
                    "unknown parameter `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub schemes: Vec<SchemeId>,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.values.is_empty() {
            return Err(CliError::Input("sweep needs at least one value".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(CliError::Input(format!(
                "sweep value {v} must be finite and positive"
            )));
        }
        if self.schemes.is_empty() {
            return Err(CliError::Input("sweep needs at least one scheme".into()));
        }
        Ok(())
    }
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scheme: SchemeId,
    pub param: &'static str,
    pub value: f64,
    #[serde(rename = "e_S")]
    pub e_s: f64,
    #[serde(rename = "e_SU")]
    pub e_su: f64,
    #[serde(rename = "e_U")]
    pub e_u: f64,
    #[serde(rename = "e_UG")]
    pub e_ug: f64,
    pub total: f64,
    pub iters: usize,
    pub feasible: bool,
}

fn sweep_row(
    base: &ScenarioConfig,
    spec: &SweepSpec,
    opts: &SolverOptions,
    scheme: SchemeId,
    value: f64,
) -> SweepRow {
    let cfg = spec.param.apply(base, value);
    let outcome = best_effort(run_scheme(&cfg, scheme, opts, spec.seed));
    let mut row = SweepRow {
        scheme,
        param: spec.param.name(),
        value,
        e_s: f64::NAN,
        e_su: f64::NAN,
        e_u: f64::NAN,
        e_ug: f64::NAN,
        total: f64::NAN,
        iters: 0,
        feasible: false,
    };
    if let Ok(out) = outcome {
        let e = out.energy;
        row.e_s = e.sat_compute;
        row.e_su = e.sat_uav_comm;
        row.e_u = e.uav_compute;
        row.e_ug = e.uav_gt_comm;
        row.total = e.total;
        row.iters = out.iterations();
        row.feasible = out.feasible;
    }
    row
}

/// Runs every (scheme, value) pair on up to `jobs` threads (0 picks the
/// machine's parallelism). Rows come back ordered by scheme, then value.
pub fn run_sweep(
    base: &ScenarioConfig,
    spec: &SweepSpec,
    opts: &SolverOptions,
    jobs: usize,
) -> CliResult<Vec<SweepRow>> {
    spec.validate()?;
    base.validate()?;
    opts.validate()?;
    let mut schemes = spec.schemes.clone();
    schemes.sort();
    schemes.dedup();
    let mut values = spec.values.clone();
    values.sort_by(f64::total_cmp);
    let jobs_list: Vec<(SchemeId, f64)> = schemes
        .iter()
        .flat_map(|&s| values.iter().map(move |&v| (s, v)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(pool.install(|| {
        jobs_list
            .par_iter()
            .map(|&(s, v)| sweep_row(base, spec, opts, s, v))
            .collect()
    }))
}

pub fn write_csv<T: Serialize>(rows: &[T], out: &Path) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(out)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_sweep(
    base: &ScenarioConfig,
    spec: &SweepSpec,
    opts: &SolverOptions,
    jobs: usize,
    out: &Path,
) -> CliResult<Vec<SweepRow>> {
    let rows = run_sweep(base, spec, opts, jobs)?;
    write_csv(&rows, out)?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapCell {
    pub x: f64,
    pub y: f64,
    pub objective: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapGrid {
    /// Half-width of the square grid, centered on the origin, in meters.
    pub extent: f64,
    pub points: usize,
}

impl Default for HeatmapGrid {
    fn default() -> Self {
        HeatmapGrid {
            extent: 400.0,
            points: 81,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Heatmap {
    pub cells: Vec<HeatmapCell>,
    /// State of the prior solve whose non-location variables are held fixed.
    pub prior: SolveOutcome,
    /// Position the location block picks in that landscape, if any.
    pub optimum: Option<[f64; 2]>,
}

impl Heatmap {
    /// Cheapest grid cell, admissible or not; the lowest index wins ties.
    pub fn argmin(&self) -> Option<&HeatmapCell> {
        self.cells
            .iter()
            .reduce(|a, b| if b.objective < a.objective { b } else { a })
    }

    /// Cheapest admissible grid cell.
    pub fn argmin_feasible(&self) -> Option<&HeatmapCell> {
        self.cells.iter().filter(|c| c.feasible).reduce(|a, b| {
            if b.objective < a.objective {
                b
            } else {
                a
            }
        })
    }
}

/// Access-link energy over a square grid of UAV positions, with every other
/// variable taken from a prior solve of `scheme`.
pub fn run_heatmap(
    cfg: &ScenarioConfig,
    scheme: SchemeId,
    opts: &SolverOptions,
    seed: u64,
    grid: HeatmapGrid,
) -> CliResult<Heatmap> {
    if !(grid.extent.is_finite() && grid.extent > 0.0) {
        return Err(CliError::Input(
            "heatmap extent must be finite and positive".into(),
        ));
    }
    if grid.points < 2 {
        return Err(CliError::Input(
            "heatmap needs at least two points per axis".into(),
        ));
    }
    let prior = best_effort(run_scheme(cfg, scheme, opts, seed))?;
    let land = LocationLandscape::new(cfg, &prior.state)?;
    let step = 2.0 * grid.extent / (grid.points - 1) as f64;
    let mut cells = Vec::with_capacity(grid.points * grid.points);
    for i in 0..grid.points {
        for j in 0..grid.points {
            let xy = [
                -grid.extent + i as f64 * step,
                -grid.extent + j as f64 * step,
            ];
            cells.push(HeatmapCell {
                x: xy[0],
                y: xy[1],
                objective: land.objective(xy),
                feasible: land.feasible(xy),
            });
        }
    }
    let optimum = solve_location(cfg, &prior.state, opts)
        .ok()
        .map(|r| r.uav_xy);
    Ok(Heatmap {
        cells,
        prior,
        optimum,
    })
}

pub fn cmd_heatmap(
    cfg: &ScenarioConfig,
    scheme: SchemeId,
    opts: &SolverOptions,
    seed: u64,
    grid: HeatmapGrid,
    out: &Path,
) -> CliResult<Heatmap> {
    let map = run_heatmap(cfg, scheme, opts, seed, grid)?;
    write_csv(&map.cells, out)?;
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergencePoint {
    #[serde(rename = "F_S")]
    pub sat_cpu: f64,
    pub iteration: usize,
    pub objective: f64,
}

/// Objective after every outer iteration of the full scheme for each
/// satellite CPU frequency (Hz). Iteration 0 is the starting point. The
/// flag is false when some run never reached feasibility.
pub fn run_convergence(
    base: &ScenarioConfig,
    sat_cpus: &[f64],
    opts: &SolverOptions,
    seed: u64,
) -> CliResult<(Vec<ConvergencePoint>, bool)> {
    if sat_cpus.is_empty() {
        return Err(CliError::Input("need at least one F_S value".into()));
    }
    let mut points = Vec::new();
    let mut all_feasible = true;
    for &f in sat_cpus {
        if !(f.is_finite() && f > 0.0) {
            return Err(CliError::Input(format!(
                "F_S = {f} must be finite and positive"
            )));
        }
        let mut cfg = base.clone();
        cfg.sat_cpu = f;
        let out = best_effort(run_scheme(&cfg, SchemeId::SaginPsc, opts, seed))?;
        all_feasible &= out.feasible;
        points.push(ConvergencePoint {
            sat_cpu: f,
            iteration: 0,
            objective: out.trace.initial_objective,
        });
        for (i, it) in out.trace.iterations.iter().enumerate() {
            points.push(ConvergencePoint {
                sat_cpu: f,
                iteration: i + 1,
                objective: it.objective,
            });
        }
    }
    Ok((points, all_feasible))
}

pub fn cmd_convergence(
    base: &ScenarioConfig,
    sat_cpus: &[f64],
    opts: &SolverOptions,
    seed: u64,
    out: &Path,
) -> CliResult<Vec<ConvergencePoint>> {
    let (points, feasible) = run_convergence(base, sat_cpus, opts, seed)?;
    write_csv(&points, out)?;
    if feasible {
        Ok(points)
    } else {
        Err(CliError::Infeasible(
            "at least one F_S value never reached a feasible state".into(),
        ))
    }
}

/// Reference scenario with `num_gts` terminals in a disk of `radius` meters.
pub fn cmd_gen_scenario(
    num_gts: usize,
    radius: f64,
    seed: u64,
    out: &Path,
) -> CliResult<ScenarioConfig> {
    let positions = sagin_core::generate_gt_positions(num_gts, radius, seed)?;
    let cfg = ScenarioConfig::reference(positions);
    cfg.validate()?;
    std::fs::write(out, cfg.to_json() + "\n")?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn scenario(dir: &TempDir) -> PathBuf {
        let path = dir.path().join("scenario.json");
        cmd_gen_scenario(4, 300.0, 7, &path).unwrap();
        path
    }

    fn run(args: &[&str]) -> u8 {
        run_cli(std::iter::once("sagin-psc").chain(args.iter().copied()))
    }

    #[test]
    fn solve_writes_report_and_exits_zero() {
        let dir = TempDir::new().unwrap();
        let s = scenario(&dir);
        let out = dir.path().join("report.json");
        assert_eq!(
            run(&[
                "solve",
                "--scenario",
                s.to_str().unwrap(),
                "--out",
                out.to_str().unwrap()
            ]),
            0
        );
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
        assert_eq!(doc["scheme"], "sagin_psc");
        assert_eq!(doc["feasible"], true);
        let iters = doc["trace"]["iterations"].as_array().unwrap().len();
        assert!((1..=10).contains(&iters));
        let e = &doc["energy"];
        let parts = ["sat_compute", "sat_uav_comm", "uav_compute", "uav_gt_comm"]
            .iter()
            .map(|k| e[*k].as_f64().unwrap())
            .sum::<f64>();
        assert!((parts - e["total"].as_f64().unwrap()).abs() <= 1e-12 * parts);
    }

    #[test]
    fn tiny_latency_budget_exits_two() {
        let dir = TempDir::new().unwrap();
        let mut cfg = load_scenario(&scenario(&dir)).unwrap();
        cfg.latency_budget = 1e-3;
        let path = dir.path().join("tight.json");
        std::fs::write(&path, cfg.to_json()).unwrap();
        let out = dir.path().join("report.json");
        assert_eq!(
            run(&[
                "solve",
                "--scenario",
                path.to_str().unwrap(),
                "--out",
                out.to_str().unwrap()
            ]),
            2
        );
        // The best-effort report is still written.
        assert!(out.exists());
    }

    #[test]
    fn input_errors_exit_one() {
        let dir = TempDir::new().unwrap();
        let s = scenario(&dir);
        let s = s.to_str().unwrap();
        let out = dir.path().join("x.csv");
        let out = out.to_str().unwrap();
        assert_eq!(
            run(&["solve", "--scenario", "/nonexistent/scenario.json"]),
            1
        );
        assert_eq!(
            run(&[
                "sweep",
                "--scenario",
                s,
                "--param",
                "data_bits",
                "--values",
                "--out",
                out
            ]),
            1
        );
        assert_eq!(
            run(&[
                "sweep",
                "--scenario",
                s,
                "--param",
                "colour",
                "--values",
                "1",
                "--out",
                out
            ]),
            1
        );
        assert_eq!(
            run(&[
                "sweep",
                "--scenario",
                s,
                "--param",
                "data_bits",
                "--values",
                "-4",
                "--out",
                out
            ]),
            1
        );
        assert_eq!(
            run(&[
                "convergence",
                "--scenario",
                s,
                "--sat-cpu",
                "0",
                "--out",
                out
            ]),
            1
        );
        assert_eq!(run(&["solve", "--scenario", s, "--scheme", "greedy"]), 1);
        assert_eq!(run(&["frobnicate"]), 1);
    }

    #[test]
    fn options_file_overrides_defaults() {
        let dir = TempDir::new().unwrap();
        let s = scenario(&dir);
        let opts = dir.path().join("opts.json");
        std::fs::write(&opts, r#"{"max_outer_iters": 1}"#).unwrap();
        let loaded = load_options(Some(&opts)).unwrap();
        assert_eq!(loaded.max_outer_iters, 1);
        let out = dir.path().join("report.json");
        let args = [
            "solve",
            "--scenario",
            s.to_str().unwrap(),
            "--opts",
            opts.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        assert_eq!(run(&args), 0);
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
        assert_eq!(doc["trace"]["iterations"].as_array().unwrap().len(), 1);
        std::fs::write(&opts, r#"{"max_outer_iters": 0}"#).unwrap();
        assert_eq!(
            run(&[
                "solve",
                "--scenario",
                s.to_str().unwrap(),
                "--opts",
                opts.to_str().unwrap()
            ]),
            1
        );
    }

    #[test]
    fn sweep_rows_are_ordered_and_complete() {
        let dir = TempDir::new().unwrap();
        let cfg = load_scenario(&scenario(&dir)).unwrap();
        let spec = SweepSpec {
            param: SweepParam::SatUavDistance,
            values: vec![400.0, 100.0, 200.0],
            schemes: vec![SchemeId::FixedLocation, SchemeId::NonSemantic],
            seed: 7,
        };
        let out = dir.path().join("sweep.csv");
        let rows = cmd_sweep(&cfg, &spec, &SolverOptions::default(), 2, &out).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.scheme, r.value)).collect();
        assert_eq!(
            keys,
            [
                (SchemeId::NonSemantic, 100.0),
                (SchemeId::NonSemantic, 200.0),
                (SchemeId::NonSemantic, 400.0),
                (SchemeId::FixedLocation, 100.0),
                (SchemeId::FixedLocation, 200.0),
                (SchemeId::FixedLocation, 400.0),
            ]
        );
        let text = std::fs::read_to_string(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("scheme,param,value,e_S,e_SU,e_U,e_UG,total,iters,feasible")
        );
        assert_eq!(lines.count(), 6);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn sweep_output_does_not_depend_on_thread_count() {
        let dir = TempDir::new().unwrap();
        let cfg = load_scenario(&scenario(&dir)).unwrap();
        let spec = SweepSpec {
            param: SweepParam::DataBits,
            values: vec![16.0, 64.0, 256.0],
            schemes: SchemeId::ALL.to_vec(),
            seed: 3,
        };
        let one = run_sweep(&cfg, &spec, &SolverOptions::default(), 1).unwrap();
        let four = run_sweep(&cfg, &spec, &SolverOptions::default(), 4).unwrap();
        assert_eq!(format!("{one:?}"), format!("{four:?}"));
    }

    #[test]
    fn heatmap_minimum_sits_on_a_lone_terminal() {
        let gt = [40.0, -30.0];
        let cfg = ScenarioConfig::reference(vec![gt]);
        let grid = HeatmapGrid::default();
        let map =
            run_heatmap(&cfg, SchemeId::SaginPsc, &SolverOptions::default(), 7, grid).unwrap();
        assert_eq!(map.cells.len(), grid.points * grid.points);
        let best = map.argmin().unwrap();
        let half = grid.extent / (grid.points - 1) as f64;
        assert!(
            (best.x - gt[0]).abs() <= half && (best.y - gt[1]).abs() <= half,
            "{best:?}"
        );
    }

    #[test]
    fn heatmap_flags_rather_than_drops_infeasible_points() {
        let dir = TempDir::new().unwrap();
        let cfg = load_scenario(&scenario(&dir)).unwrap();
        let out = dir.path().join("heat.csv");
        let grid = HeatmapGrid {
            extent: 400.0,
            points: 21,
        };
        let map = cmd_heatmap(
            &cfg,
            SchemeId::SaginPsc,
            &SolverOptions::default(),
            7,
            grid,
            &out,
        )
        .unwrap();
        assert!(map.cells.iter().any(|c| !c.feasible));
        let opt = map.optimum.unwrap();
        let here = map.cells.iter().min_by(|a, b| {
            let d = |c: &HeatmapCell| (c.x - opt[0]).hypot(c.y - opt[1]);
            d(a).total_cmp(&d(b))
        });
        assert!(here.unwrap().objective.is_finite());
        let text = std::fs::read_to_string(out).unwrap();
        assert_eq!(text.lines().next(), Some("x,y,objective,feasible"));
        assert_eq!(text.lines().count(), 1 + 21 * 21);
    }

    #[test]
    fn convergence_series_do_not_increase() {
        let dir = TempDir::new().unwrap();
        let cfg = load_scenario(&scenario(&dir)).unwrap();
        let out = dir.path().join("conv.csv");
        let points =
            cmd_convergence(&cfg, &[0.5e9, 1e9, 2e9], &SolverOptions::default(), 7, &out).unwrap();
        for f in [0.5e9, 1e9, 2e9] {
            let series: Vec<f64> = points
                .iter()
                .filter(|p| p.sat_cpu == f)
                .map(|p| p.objective)
                .collect();
            assert!(series.len() >= 2);
            assert!(series.windows(2).all(|w| w[1] <= w[0]));
            let (a, b) = (series[series.len() - 2], series[series.len() - 1]);
            assert!((a - b).abs() / a < SolverOptions::default().outer_tolerance);
        }
        let text = std::fs::read_to_string(out).unwrap();
        assert_eq!(text.lines().next(), Some("F_S,iteration,objective"));
    }

    #[test]
    fn generated_scenario_loads_back() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("s.json");
        assert_eq!(
            run(&[
                "gen-scenario",
                "--num-gts",
                "6",
                "--seed",
                "3",
                "--out",
                path.to_str().unwrap()
            ]),
            0
        );
        let cfg = load_scenario(&path).unwrap();
        assert_eq!(cfg.num_gts(), 6);
        assert_eq!(
            cfg,
            ScenarioConfig::reference(sagin_core::generate_gt_positions(6, 300.0, 3).unwrap())
        );
    }
}
