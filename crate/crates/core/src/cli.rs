//! The `capedu` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid scenario, 3
//! numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::analysis::{basic_report, controlled_equilibrium, EquilibriumReport};
use crate::chaos::{running_average, simulate_ne9};
use crate::control::find_tipping;
use crate::error::Error;
use crate::integrator::IntegratorSettings;
use crate::model::{DriverState, NE9_DEFAULT_B};
use crate::scenario_io::{
    fmt_num, load_scenario, phase_portrait, read_csv_table, render_svg_labeled, run_scenario,
    run_sweep, sweep_csv, write_trajectory_csv, PhaseGrid, Scenario, Series, SweepParam, SweepSpec,
};
use crate::simulation::ScenarioKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExitStatus {
    pub code: i32,
}

impl ExitStatus {
    pub const SUCCESS: Self = Self { code: 0 };
    pub const USAGE: Self = Self { code: 1 };
    pub const INVALID_SCENARIO: Self = Self { code: 2 };
    pub const NUMERIC: Self = Self { code: 3 };
}

#[derive(Debug, Parser)]
#[command(
    name = "capedu",
    version,
    about = "Simulate and analyse the capital-education growth model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario and write its trajectory as CSV.
    Simulate(SimulateArgs),
    /// Print the equilibrium, Jacobian, eigenvalues and stability class.
    Equilibrium(EquilibriumArgs),
    /// Vary one parameter and report Y and C at a fixed time.
    Sweep(SweepArgs),
    /// Locate the consumption target at which output stops growing.
    Tipping(TippingArgs),
    /// Integrate the NE9 driver and print its running average.
    Chaos(ChaosArgs),
    /// Sample the (K, E) vector field and orbits of a basic scenario.
    Phase(PhaseArgs),
    /// Draw columns of one or more CSV files as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output CSV path (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG chart of Y(t) to this path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EquilibriumArgs {
    /// Scenario JSON file (basic or controlled).
    #[arg(long)]
    scenario: PathBuf,
    /// Output path (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Base scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Parameter to vary: s_k, s_r, delta_k, delta_r, alpha, beta, p or c.
    #[arg(long)]
    param: String,
    /// Comma-separated values.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    values: Vec<f64>,
    /// Report time (defaults to the scenario horizon).
    #[arg(long)]
    at: Option<f64>,
    /// Worker threads (defaults to the number of processors).
    #[arg(long, env = "CAPEDU_JOBS")]
    jobs: Option<usize>,
    /// Output CSV path (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TippingArgs {
    /// Controlled scenario JSON file; supplies parameters, start and horizon.
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    p_min: f64,
    #[arg(long)]
    p_max: f64,
    /// Bracket width at which bisection stops.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Horizon for the growth test (defaults to the scenario horizon).
    #[arg(long)]
    horizon: Option<f64>,
    /// Output path (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ChaosArgs {
    #[arg(long, default_value_t = 100.0)]
    horizon: f64,
    /// Dissipation constant of the driver.
    #[arg(long, default_value_t = NE9_DEFAULT_B, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    y0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    z0: f64,
    #[arg(long, default_value_t = crate::chaos::CHAOS_SAMPLE_STEP)]
    sample_step: f64,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Write the series t,x,y,z,A as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PhaseArgs {
    /// Basic scenario JSON file; supplies parameters and integrator settings.
    #[arg(long)]
    scenario: PathBuf,
    /// K window as MIN,MAX.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 8.0])]
    k_range: Vec<f64>,
    /// E window as MIN,MAX.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 2.0])]
    e_range: Vec<f64>,
    /// Field grid as NK,NE.
    #[arg(long, value_delimiter = ',', default_values_t = [10, 10])]
    grid: Vec<usize>,
    /// Orbit length (defaults to the scenario horizon).
    #[arg(long)]
    horizon: Option<f64>,
    /// Field samples CSV (K,E,dK,dE); standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Orbit CSV (orbit,t,K,E).
    #[arg(long)]
    trajectories: Option<PathBuf>,
    /// SVG of the orbits in the (K, E) plane.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Input CSV file; repeat for several files.
    #[arg(long = "csv", required = true)]
    inputs: Vec<PathBuf>,
    /// Columns to draw.
    #[arg(long, value_delimiter = ',', default_value = "Y")]
    columns: Vec<String>,
    /// Column used as the horizontal axis.
    #[arg(long, default_value = "t")]
    x: String,
    #[arg(long, default_value = "")]
    title: String,
    /// Output SVG path (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) | CliError::Io(_) => ExitStatus::USAGE,
            CliError::Core(e) => match e.root() {
                Error::Parse(_) | Error::Validation { .. } => ExitStatus::INVALID_SCENARIO,
                _ if e.is_numeric() => ExitStatus::NUMERIC,
                _ => ExitStatus::USAGE,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    ExitStatus::SUCCESS
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    ExitStatus::USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a, stdout, stderr),
        Command::Equilibrium(a) => equilibrium(a, stdout, stderr),
        Command::Sweep(a) => sweep(a, stdout, stderr),
        Command::Tipping(a) => tipping(a, stdout, stderr),
        Command::Chaos(a) => chaos(a, stdout),
        Command::Phase(a) => phase(a, stdout, stderr),
        Command::Plot(a) => plot(a, stdout),
    };
    match result {
        Ok(()) => ExitStatus::SUCCESS,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.status()
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn read_scenario(path: &Path, stderr: &mut dyn Write) -> CliResult<Scenario> {
    let s = load_scenario(&read_text(path)?)?;
    for w in s.warnings() {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(s)
}

/// Writes `content` to `path` via a temporary file in the same directory, or
/// to `stdout` when no path is given.
fn emit(path: Option<&Path>, content: &str, stdout: &mut dyn Write) -> CliResult<()> {
    let Some(path) = path else {
        return writeln!(stdout, "{content}").map_err(|e| CliError::Io(e.to_string()));
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(content.as_bytes()).map_err(io)?;
    if !content.ends_with('\n') {
        tmp.write_all(b"\n").map_err(io)?;
    }
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn simulate(a: SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let scenario = read_scenario(&a.scenario, stderr)?;
    let tr = run_scenario(&scenario)?;
    if tr.flags.constraint_violation {
        let _ = writeln!(
            stderr,
            "warning: s_r left [s_r_floor, 1 - s_k] during the run"
        );
    }
    if let Some(min) = tr.flags.min_effective_sk {
        let _ = writeln!(stderr, "min effective s_k = {}", fmt_num(min));
    }
    let csv = write_trajectory_csv(&tr);
    let svg = match &a.svg {
        Some(_) => {
            let title = a
                .scenario
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Some(render_svg_labeled(
                &[Series::new("Y", tr.times.clone(), tr.output.clone())],
                &title,
                "t",
                "Y",
            )?)
        }
        None => None,
    };
    emit(a.out.as_deref(), &csv, stdout)?;
    if let (Some(path), Some(svg)) = (a.svg.as_deref(), svg) {
        emit(Some(path), &svg, stdout)?;
    }
    Ok(())
}

fn fmt_complex(l: &Complex64) -> String {
    if l.im == 0.0 {
        fmt_num(l.re)
    } else {
        format!(
            "{}{}{}i",
            fmt_num(l.re),
            if l.im < 0.0 { "-" } else { "+" },
            fmt_num(l.im.abs())
        )
    }
}

fn format_report(r: &EquilibriumReport) -> String {
    let mut lines = vec![
        format!("K0 = {}", fmt_num(r.k0)),
        format!("E0 = {}", fmt_num(r.e0)),
        format!("Y0 = {}", fmt_num(r.y0)),
        format!("s_r = {}", fmt_num(r.s_r)),
    ];
    for row in &r.jacobian {
        let cells: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
        lines.push(format!("jacobian = [{}]", cells.join(", ")));
    }
    let eig: Vec<String> = r.eigenvalues.iter().map(fmt_complex).collect();
    lines.push(format!("eigenvalues = {}", eig.join(", ")));
    lines.push(format!("class = {}", r.classification));
    lines.join("\n")
}

fn equilibrium(
    a: EquilibriumArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let scenario = read_scenario(&a.scenario, stderr)?;
    let report = match (scenario.kind, scenario.control) {
        (ScenarioKind::Controlled, Some(c)) => controlled_equilibrium(&scenario.params, c.p)?,
        (ScenarioKind::Basic, _) => basic_report(&scenario.params)?,
        (kind, _) => {
            return Err(CliError::Usage(format!(
                "equilibrium is not defined for {kind} scenarios"
            )));
        }
    };
    emit(a.out.as_deref(), &format_report(&report), stdout)
}

fn sweep(a: SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let base = read_scenario(&a.scenario, stderr)?;
    let param: SweepParam = a
        .param
        .parse()
        .map_err(|e: Error| CliError::Usage(e.to_string()))?;
    let jobs = a.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let spec = SweepSpec {
        report_time: a.at.unwrap_or(base.horizon),
        base,
        param,
        values: a.values,
    };
    let rows = run_sweep(&spec, jobs)?;
    for r in rows.iter().filter(|r| r.error.is_some()) {
        let _ = writeln!(
            stderr,
            "row {}: {}",
            fmt_num(r.value),
            r.error.as_deref().unwrap_or_default()
        );
    }
    emit(a.out.as_deref(), &sweep_csv(&rows), stdout)
}

fn tipping(a: TippingArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let scenario = read_scenario(&a.scenario, stderr)?;
    let control = scenario
        .control
        .ok_or_else(|| CliError::Usage("tipping needs a controlled scenario".into()))?;
    let horizon = a.horizon.unwrap_or(scenario.horizon);
    let r = find_tipping(
        &scenario.params,
        scenario.initial,
        control.s_r0,
        horizon,
        a.p_min,
        a.p_max,
        a.tol,
        &scenario.integrator,
    )?;
    let text = [
        format!("p_star = {}", fmt_num(r.p_star)),
        format!(
            "bracket = {}, {}",
            fmt_num(r.bracket.0),
            fmt_num(r.bracket.1)
        ),
        format!(
            "growth_at_bracket = {}, {}",
            fmt_num(r.growth_at_bracket.0),
            fmt_num(r.growth_at_bracket.1)
        ),
        format!("horizon = {}", fmt_num(r.horizon_used)),
        format!("evaluations = {}", r.evaluations),
    ]
    .join("\n");
    emit(a.out.as_deref(), &text, stdout)
}

fn chaos(a: ChaosArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let settings = IntegratorSettings::default().with_tolerances(a.rel_tol, a.abs_tol);
    let tr = simulate_ne9(
        a.b,
        DriverState::new(a.x0, a.y0, a.z0),
        a.horizon,
        &settings,
        a.sample_step,
    )?;
    let avg = running_average(&tr.times, &tr.component(0))?;
    let (t, value) = avg.last().expect("at least one average");
    if let Some(path) = a.out.as_deref() {
        let mut lines = vec!["t,x,y,z,A".to_string()];
        for (i, s) in tr.states.iter().enumerate() {
            // The average over an empty window is taken as its limit x(0).
            let a_col = if i == 0 { s[0] } else { avg.values[i - 1] };
            lines.push(format!(
                "{},{},{},{},{}",
                fmt_num(tr.times[i]),
                fmt_num(s[0]),
                fmt_num(s[1]),
                fmt_num(s[2]),
                fmt_num(a_col)
            ));
        }
        emit(Some(path), &lines.join("\n"), stdout)?;
    }
    writeln!(stdout, "A({}) = {}", fmt_num(t), fmt_num(value))
        .map_err(|e| CliError::Io(e.to_string()))
}

fn phase(a: PhaseArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let scenario = read_scenario(&a.scenario, stderr)?;
    if scenario.kind != ScenarioKind::Basic {
        return Err(CliError::Usage("phase needs a basic scenario".into()));
    }
    for (name, len) in [
        ("--k-range", a.k_range.len()),
        ("--e-range", a.e_range.len()),
        ("--grid", a.grid.len()),
    ] {
        if len != 2 {
            return Err(CliError::Usage(format!(
                "{name} takes exactly two comma-separated values"
            )));
        }
    }
    let grid = PhaseGrid {
        k_range: (a.k_range[0], a.k_range[1]),
        e_range: (a.e_range[0], a.e_range[1]),
        counts: (a.grid[0], a.grid[1]),
        horizon: a.horizon.unwrap_or(scenario.horizon),
    };
    let portrait = phase_portrait(
        &scenario.params,
        &grid,
        &scenario.integrator,
        scenario.sample_step,
    )?;
    for t in portrait.trajectories.iter().filter(|t| t.error.is_some()) {
        let _ = writeln!(
            stderr,
            "orbit from ({}, {}): {}",
            fmt_num(t.start.k),
            fmt_num(t.start.e),
            t.error.as_deref().unwrap_or_default()
        );
    }
    let svg = match a.svg {
        Some(_) => Some(portrait.to_svg("phase plane")?),
        None => None,
    };
    emit(a.out.as_deref(), &portrait.field_csv(), stdout)?;
    if let Some(path) = a.trajectories.as_deref() {
        emit(Some(path), &portrait.trajectories_csv(), stdout)?;
    }
    if let (Some(path), Some(svg)) = (a.svg.as_deref(), svg) {
        emit(Some(path), &svg, stdout)?;
    }
    Ok(())
}

fn plot(a: PlotArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let mut series = Vec::new();
    for path in &a.inputs {
        let table = read_csv_table(&read_text(path)?)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let x = table
            .column(&a.x)
            .ok_or_else(|| CliError::Usage(format!("{}: no column {:?}", path.display(), a.x)))?;
        for col in &a.columns {
            let y = table
                .column(col)
                .ok_or_else(|| CliError::Usage(format!("{}: no column {col:?}", path.display())))?;
            let label = if a.inputs.len() > 1 {
                format!("{stem} {col}")
            } else {
                col.clone()
            };
            series.push(Series::new(label, x.clone(), y));
        }
    }
    let y_label = if a.columns.len() == 1 {
        a.columns[0].as_str()
    } else {
        ""
    };
    let svg = render_svg_labeled(&series, &a.title, &a.x, y_label)?;
    emit(a.out.as_deref(), &svg, stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (ExitStatus, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let status = run(
            std::iter::once("capedu").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            status,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn help_exits_zero() {
        for sub in [
            "simulate",
            "equilibrium",
            "sweep",
            "tipping",
            "chaos",
            "phase",
            "plot",
        ] {
            let (status, out, _) = run_args(&[sub, "--help"]);
            assert_eq!(status, ExitStatus::SUCCESS, "{sub}");
            assert!(out.contains("--"), "{sub}: {out}");
        }
        let (status, _, _) = run_args(&["--help"]);
        assert_eq!(status, ExitStatus::SUCCESS);
    }

    #[test]
    fn usage_errors() {
        let (status, _, err) = run_args(&["frobnicate"]);
        assert_eq!(status, ExitStatus::USAGE);
        assert!(!err.is_empty());
        let (status, _, err) = run_args(&["simulate", "--scenario", "/nonexistent/x.json"]);
        assert_eq!(status, ExitStatus::USAGE);
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn chaos_prints_average() {
        let (status, out, _) = run_args(&["chaos", "--horizon", "1e1", "--sample-step", "0.05"]);
        assert_eq!(status, ExitStatus::SUCCESS);
        assert!(out.starts_with("A(10) = "), "{out}");
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(fmt_complex(&Complex64::new(-0.5, 0.0)), "-0.5");
        assert_eq!(fmt_complex(&Complex64::new(-0.5, -0.25)), "-0.5-0.25i");
    }
}
