//! Command-line front end. Inputs and outputs are in nm, W, Hz, rad and
//! days; every column header names its unit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::data::{
    builtin_crystals, builtin_detectors, find_crystal, find_detector, load_crystals, load_detectors,
};
use crate::dispersion::{CrystalModel, DerivVariable, Polarization};
use crate::error::Error;
use crate::numeric::DerivOrder;
use crate::oracle::{audit_config, jacobian_mc_check, AuditGrid, McTestFunction, QuadratureSpec};
use crate::phasematch::{
    find_pm_angle, pm_map, taylor, MapGrid, PhaseMatchSetup, PmType, TaylorCoefficients,
};
use crate::planner::{
    plan, ChannelTime, DetectorModel, ExperimentPlan, PlanConfig, SplitterConfig, DEFAULT_T_FACTOR,
};
use crate::rates::{total_rate_with_chi3, DetectionWindow, ModeStructure, RateResult};
use crate::table1::{evaluate, ROWS};
use crate::units::{mm_to_cm, nm_to_cm, omega_from_nm};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "tospdc",
    version,
    about = "Three-photon SPDC rates and measurement planning"
)]
pub struct Cli {
    /// Crystal data file or directory of `*.json` files (default: built-in).
    #[arg(long, global = true)]
    pub crystals: Option<PathBuf>,
    /// Detector data file (default: built-in).
    #[arg(long, global = true)]
    pub detectors: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Seed for Monte-Carlo checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Refractive index and wave vector, optionally with ω derivatives.
    Index(IndexArgs),
    /// Collinear phase-matching angle and Taylor coefficients.
    Pm(PmArgs),
    /// Total triplet rate R_T.
    Rate(RateArgs),
    /// Measurement times for one detector.
    Plan(PlanArgs),
    /// Recompute the ten published configurations.
    Table1(Table1Args),
    /// Closed form vs quadrature, Taylor audit and Jacobian Monte-Carlo.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub crystal: String,
    /// `o` or `e`.
    #[arg(long)]
    pub pol: Polarization,
    #[arg(long)]
    pub lambda_nm: f64,
    /// Angle between propagation and optic axis.
    #[arg(long, default_value_t = 0.0)]
    pub theta_deg: f64,
    /// Also print dk/dω and d²k/dω².
    #[arg(long)]
    pub derivatives: bool,
}

#[derive(Debug, Args)]
pub struct SetupArgs {
    #[arg(long)]
    pub crystal: String,
    #[arg(long)]
    pub pump_nm: f64,
    /// e.g. `e->ooe`, `o->eee`.
    #[arg(long = "type")]
    pub pm_type: PmType,
    #[arg(long, default_value_t = 1.0)]
    pub length_mm: f64,
}

#[derive(Debug, Args)]
pub struct PmArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    /// Write `<PREFIX>_map.csv` and `<PREFIX>_locus.csv`.
    #[arg(long, value_name = "PREFIX")]
    pub map: Option<PathBuf>,
    #[arg(long, default_value_t = 201)]
    pub map_points: usize,
    /// Frequency extent of the map, rad/s (default: 5 % of ω_p/3).
    #[arg(long)]
    pub map_omega_max: Option<f64>,
    /// Transverse extent of the map, rad/cm (default: 1.5× the locus at the frequency edge).
    #[arg(long)]
    pub map_q_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Detector whose range and mode structure set the window.
    #[arg(long)]
    pub detector: Option<String>,
    #[arg(long, requires = "lambda_max_nm")]
    pub lambda_min_nm: Option<f64>,
    #[arg(long, requires = "lambda_min_nm")]
    pub lambda_max_nm: Option<f64>,
    #[arg(long, value_enum)]
    pub modes: Option<Modes>,
    /// Override the angular acceptance, rad.
    #[arg(long)]
    pub theta_max_rad: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Modes {
    Single,
    Multi,
}

impl From<Modes> for ModeStructure {
    fn from(m: Modes) -> Self {
        match m {
            Modes::Single => ModeStructure::Single,
            Modes::Multi => ModeStructure::Multi,
        }
    }
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub wp_w: f64,
    /// Pump-intensity enhancement ε.
    #[arg(long)]
    pub cavity: Option<f64>,
    /// χ(3)_eff in esu (default: crystal data).
    #[arg(long)]
    pub chi3_esu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub rate: RateArgs,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub xi3: Option<f64>,
    #[arg(long)]
    pub xi2: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_T_FACTOR)]
    pub t_factor: f64,
    /// Use this R_T (Hz) instead of computing it.
    #[arg(long)]
    pub rt_override: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Also integrate each window numerically.
    #[arg(long)]
    pub with_oracle: bool,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Table 1 rows to audit (default: all).
    #[arg(long, value_delimiter = ',')]
    pub rows: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub mc_samples: usize,
    #[arg(long, value_enum, default_value_t = McFunction::Gaussian)]
    pub mc_function: McFunction,
    #[arg(long)]
    pub skip_mc: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McFunction {
    Box,
    Gaussian,
}

/// Failure with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_)
            | Error::MissingChi3 { .. }
            | Error::WavelengthMismatch { .. } => CliError::Input(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(s) if s.contains([',', '"']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn pretty(&self) -> String {
        match self {
            Cell::Num(x) if *x == 0.0 || (1e-3..1e5).contains(&x.abs()) => {
                let s = format!("{x:.6}");
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            }
            Cell::Num(x) => format!("{x:.4e}"),
            Cell::Text(s) => s.clone(),
            Cell::Missing => "-".into(),
        }
    }
}

fn num(x: f64) -> Cell {
    Cell::Num(x)
}

fn text(s: impl ToString) -> Cell {
    Cell::Text(s.to_string())
}

fn opt(x: Option<f64>) -> Cell {
    x.map_or(Cell::Missing, Cell::Num)
}

/// One block of tabular output.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Section {
    fn new(title: &str, columns: &[&str]) -> Self {
        Section {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Single-record section from (column, cell) pairs.
    fn record(title: &str, fields: Vec<(&str, Cell)>) -> Self {
        let (cols, row): (Vec<_>, Vec<_>) = fields.into_iter().unzip();
        let mut s = Section::new(title, &cols);
        s.push(row);
        s
    }
}

/// Command output: JSON document plus its tabular rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    pub sections: Vec<Section>,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut out = Vec::new();
                for sec in &self.sections {
                    let mut lines = vec![sec.columns.join(",")];
                    for r in &sec.rows {
                        lines.push(r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                    }
                    out.push(lines.join("\n") + "\n");
                }
                out.join("\n")
            }
            Format::Table => self
                .sections
                .iter()
                .map(render_section)
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }
}

fn render_section(sec: &Section) -> String {
    let mut s = String::new();
    if !sec.title.is_empty() {
        s.push_str(&format!("# {}\n", sec.title));
    }
    let cells: Vec<Vec<String>> = sec
        .rows
        .iter()
        .map(|r| r.iter().map(Cell::pretty).collect())
        .collect();
    if sec.rows.len() == 1 {
        let w = sec
            .columns
            .iter()
            .map(|c| c.chars().count())
            .max()
            .unwrap_or(0);
        for (c, v) in sec.columns.iter().zip(&cells[0]) {
            s.push_str(&format!("{c:<w$}  {v}\n"));
        }
        return s;
    }
    let widths: Vec<usize> = (0..sec.columns.len())
        .map(|j| {
            cells
                .iter()
                .map(|r| r[j].chars().count())
                .chain([sec.columns[j].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |vals: Vec<&str>| {
        vals.iter()
            .zip(&widths)
            .map(|(v, w)| format!("{v:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            + "\n"
    };
    s.push_str(&line(sec.columns.iter().map(String::as_str).collect()));
    for r in &cells {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    s
}

struct Context {
    crystals: Vec<CrystalModel>,
    detectors: Vec<DetectorModel>,
    seed: u64,
}

impl Context {
    fn load(cli: &Cli) -> CliResult<Self> {
        let crystals = match &cli.crystals {
            Some(p) => load_crystals(p)?,
            None => builtin_crystals(),
        };
        let detectors = match &cli.detectors {
            Some(p) => load_detectors(p)?,
            None => builtin_detectors(),
        };
        Ok(Context {
            crystals,
            detectors,
            seed: cli.seed,
        })
    }

    fn crystal(&self, name: &str) -> CliResult<CrystalModel> {
        Ok(find_crystal(&self.crystals, name)?)
    }

    fn detector(&self, name: &str) -> CliResult<DetectorModel> {
        Ok(find_detector(&self.detectors, name)?)
    }

    fn setup(&self, a: &SetupArgs) -> CliResult<PhaseMatchSetup> {
        positive("pump wavelength (nm)", a.pump_nm)?;
        positive("crystal length (mm)", a.length_mm)?;
        let crystal = self.crystal(&a.crystal)?;
        Ok(PhaseMatchSetup::phase_matched(
            crystal,
            a.pump_nm,
            a.pm_type,
            mm_to_cm(a.length_mm),
        )?)
    }
}

fn positive(what: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Input(format!("{what} must be positive, got {x}")))
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn cmd_index(ctx: &Context, a: &IndexArgs) -> CliResult<Output> {
    positive("wavelength (nm)", a.lambda_nm)?;
    let c = ctx.crystal(&a.crystal)?;
    let theta = a.theta_deg.to_radians();
    let n = c.refractive_index(a.pol, nm_to_cm(a.lambda_nm), theta)?;
    let omega = omega_from_nm(a.lambda_nm);
    let k = c.wavevector(a.pol, omega, theta)?;
    let mut fields = vec![
        ("crystal", text(&c.name)),
        ("pol", text(a.pol)),
        ("lambda_nm", num(a.lambda_nm)),
        ("theta_rad", num(theta)),
        ("n", num(n)),
        ("k_rad_per_cm", num(k)),
    ];
    let mut json = json!({
        "crystal": c.name, "pol": a.pol.to_string(), "lambda_nm": a.lambda_nm,
        "theta_rad": theta, "n": n, "k_rad_per_cm": k,
    });
    if a.derivatives {
        let d = |order| c.k_derivative(a.pol, theta, omega, order, DerivVariable::Omega, [0.0; 2]);
        let d1 = d(DerivOrder::First)?;
        let d2 = d(DerivOrder::Second)?;
        fields.push(("dk_domega_s_per_cm", num(d1.value)));
        fields.push(("d2k_domega2_s2_per_cm", num(d2.value)));
        json["dk_domega_s_per_cm"] = json!(d1.value);
        json["d2k_domega2_s2_per_cm"] = json!(d2.value);
    }
    Ok(Output {
        json,
        sections: vec![Section::record("", fields)],
    })
}

fn taylor_fields(t: &TaylorCoefficients) -> Vec<(&'static str, Cell)> {
    match t {
        TaylorCoefficients::TypeI(t) => vec![
            ("alpha_cm", num(t.alpha)),
            ("alpha_curvature_cm", num(t.alpha_curvature)),
            ("beta_s2_per_cm", num(t.beta)),
            ("beta_index_form_s2_per_cm", num(t.beta_index_form)),
        ],
        TaylorCoefficients::TypeII(t) => vec![
            ("beta_o_s_per_cm", num(t.beta_o)),
            ("beta_e_s_per_cm", num(t.beta_e)),
            ("alpha_e", num(t.alpha_e)),
            ("gamma_cm", num(t.gamma)),
            ("gamma_oy_cm", num(t.gamma_oy)),
            ("gamma_ey_cm", num(t.gamma_ey)),
            ("gamma_warning", text(t.gamma_warning)),
            ("beta_plus_s_per_cm", num(t.beta_plus)),
            ("alpha_plus", num(t.alpha_plus)),
            ("l_min_cm", num(t.l_min())),
        ],
    }
}

fn cmd_pm(ctx: &Context, a: &PmArgs) -> CliResult<Output> {
    let s = &a.setup;
    positive("pump wavelength (nm)", s.pump_nm)?;
    let crystal = ctx.crystal(&s.crystal)?;
    let angle = find_pm_angle(&crystal, s.pump_nm, s.pm_type)?;
    let setup = ctx.setup(s)?;
    let coeffs = taylor(&setup)?;
    let mut fields = vec![
        ("crystal", text(&crystal.name)),
        ("pm_type", text(s.pm_type)),
        ("pump_nm", num(s.pump_nm)),
        ("theta_pm_deg", num(angle.theta.to_degrees())),
        ("theta_pm_rad", num(angle.theta)),
        ("residual_rad_per_cm", num(angle.residual)),
        ("k_p_rad_per_cm", num(angle.k_p)),
        ("angle_independent", text(angle.degenerate)),
    ];
    fields.extend(taylor_fields(&coeffs));
    let mut json = json!({
        "crystal": crystal.name, "pm_type": s.pm_type, "pump_nm": s.pump_nm,
        "theta_pm_rad": angle.theta, "theta_pm_deg": angle.theta.to_degrees(),
        "residual_rad_per_cm": angle.residual, "k_p_rad_per_cm": angle.k_p,
        "angle_independent": angle.degenerate, "taylor": to_json(&coeffs),
    });
    if let Some(prefix) = &a.map {
        let omega_max = a.map_omega_max.unwrap_or(0.05 * setup.omega_0());
        let slope = match &coeffs {
            TaylorCoefficients::TypeI(t) => t.locus_slope()?,
            TaylorCoefficients::TypeII(t) => (t.beta_plus / t.alpha_plus).abs(),
        };
        let grid = MapGrid {
            n_omega: a.map_points,
            n_q: a.map_points,
            omega_max,
            q_max: a.map_q_max.unwrap_or(1.5 * slope * omega_max),
        };
        let map = pm_map(&setup, &grid)?;
        let map_path = suffixed(prefix, "_map.csv");
        let locus_path = suffixed(prefix, "_locus.csv");
        map.write_csv(BufWriter::new(create(&map_path)?))?;
        map.write_locus_csv(BufWriter::new(create(&locus_path)?))?;
        fields.push(("map_csv", text(map_path.display())));
        fields.push(("locus_csv", text(locus_path.display())));
        json["map"] = json!({
            "map_csv": map_path.display().to_string(),
            "locus_csv": locus_path.display().to_string(),
            "omega_max_rad_s": grid.omega_max,
            "q_max_rad_per_cm": grid.q_max,
            "points": a.map_points,
        });
    }
    Ok(Output {
        json,
        sections: vec![Section::record("", fields)],
    })
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> CliResult<File> {
    File::create(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn window(ctx: &Context, setup: &PhaseMatchSetup, a: &WindowArgs) -> CliResult<DetectionWindow> {
    let det = a.detector.as_deref().map(|d| ctx.detector(d)).transpose()?;
    let range = match (a.lambda_min_nm, a.lambda_max_nm, &det) {
        (Some(lo), Some(hi), _) => (lo, hi),
        (_, _, Some(d)) => d.lambda_range_nm,
        _ => {
            return Err(CliError::Input(
                "give --detector or --lambda-min-nm/--lambda-max-nm".into(),
            ))
        }
    };
    let modes = match (a.modes, &det) {
        (Some(m), _) => m.into(),
        (None, Some(d)) => d.modes,
        (None, None) => ModeStructure::Multi,
    };
    let w = DetectionWindow::for_setup(setup, range, modes);
    Ok(match a.theta_max_rad {
        Some(t) => w.with_theta_max(t),
        None => w,
    })
}

fn rate_fields(r: &RateResult) -> Vec<(&'static str, Cell)> {
    vec![
        ("crystal", text(&r.crystal)),
        ("pm_type", text(r.pm_type)),
        ("pump_nm", num(r.pump_nm)),
        ("theta_pm_rad", num(r.theta_pm_rad)),
        ("length_cm", num(r.length_cm)),
        ("chi3_esu", num(r.chi3_esu)),
        ("pump_power_w", num(r.pump_power_w)),
        ("cavity_factor", num(r.cavity_factor)),
        ("gamma_cgs", num(r.gamma_cgs)),
        ("integral_i_cgs", num(r.integral_i_cgs)),
        ("R_T_hz", num(r.r_t_hz)),
        ("omega_max_rad_s", num(r.omega_max_rad_s)),
        (
            "limiting_factor",
            text(to_json(&r.limiting_factor).as_str().unwrap_or("")),
        ),
        ("theta_max_rad", num(r.theta_max_rad)),
        (
            "mode_structure",
            text(to_json(&r.mode_structure).as_str().unwrap_or("")),
        ),
        ("extrapolated_geometry", text(r.extrapolated_geometry)),
    ]
}

fn compute_rate(
    ctx: &Context,
    a: &RateArgs,
) -> CliResult<(PhaseMatchSetup, DetectionWindow, RateResult)> {
    let setup = ctx.setup(&a.setup)?;
    let w = window(ctx, &setup, &a.window)?;
    let chi3 = match a.chi3_esu {
        Some(c) => c,
        None => setup.crystal.chi3(setup.pump_nm, setup.pm_type)?,
    };
    let r = total_rate_with_chi3(&setup, &w, a.wp_w, a.cavity, chi3)?;
    Ok((setup, w, r))
}

fn cmd_rate(ctx: &Context, a: &RateArgs) -> CliResult<Output> {
    let (_, _, r) = compute_rate(ctx, a)?;
    Ok(Output {
        json: to_json(&r),
        sections: vec![Section::record("", rate_fields(&r))],
    })
}

fn channel_cells(c: &ChannelTime) -> Vec<Cell> {
    vec![
        num(c.order as f64),
        num(c.signal_hz),
        num(c.noise_hz),
        opt(c.seconds),
        opt(c.days),
        text(c.feasibility.word()),
    ]
}

const CHANNEL_COLUMNS: [&str; 6] = [
    "order",
    "signal_hz",
    "noise_hz",
    "time_s",
    "time_days",
    "feasibility",
];

fn plan_sections(p: &ExperimentPlan) -> Vec<Section> {
    let summary = Section::record(
        "plan",
        vec![
            ("crystal", text(&p.crystal)),
            ("pm_type", text(p.pm_type)),
            ("pump_nm", num(p.pump_nm)),
            ("chi3_esu", opt(p.chi3_esu)),
            ("pump_power_w", num(p.pump_power_w)),
            ("cavity_factor", num(p.cavity_factor)),
            ("length_mm", num(p.length_mm)),
            ("detector", text(&p.detector)),
            ("eta", num(p.eta)),
            ("xi3", num(p.splitter.xi3)),
            ("xi2", num(p.splitter.xi2)),
            ("t_factor", num(p.t_factor)),
            ("R_T_hz", num(p.r_t_hz)),
            ("R_T_overridden", text(p.rt_overridden)),
        ],
    );
    let mut channels = Section::new("channels", &CHANNEL_COLUMNS);
    for c in [&p.t1, &p.t2, &p.t3] {
        channels.push(channel_cells(c));
    }
    vec![summary, channels]
}

fn cmd_plan(ctx: &Context, a: &PlanArgs) -> CliResult<Output> {
    let r = &a.rate;
    let name = r
        .window
        .detector
        .as_deref()
        .ok_or_else(|| CliError::Input("plan needs --detector".into()))?;
    let mut detector = ctx.detector(name)?;
    if let Some(eta) = a.eta {
        detector = detector.with_eta(eta)?;
    }
    let default = SplitterConfig::default();
    let splitter = SplitterConfig::new(a.xi3.unwrap_or(default.xi3), a.xi2.unwrap_or(default.xi2))?;
    let setup = ctx.setup(&r.setup)?;
    let mut cfg = PlanConfig::new(setup.clone(), detector, r.wp_w);
    cfg.cavity = r.cavity;
    cfg.splitter = splitter;
    cfg.t_factor = a.t_factor;
    cfg.rt_override_hz = a.rt_override;
    let has_window_override = r.window.lambda_min_nm.is_some()
        || r.window.modes.is_some()
        || r.window.theta_max_rad.is_some();
    if has_window_override {
        cfg.window = Some(window(ctx, &setup, &r.window)?);
    }
    let mut p = if a.rt_override.is_none() && r.chi3_esu.is_some() {
        // rate with an explicit χ(3), then plan on that rate
        let (_, _, rate) = compute_rate(ctx, r)?;
        cfg.rt_override_hz = Some(rate.r_t_hz);
        let mut p = plan(&cfg)?;
        p.chi3_esu = Some(rate.chi3_esu);
        p.rt_overridden = false;
        p.rate = Some(rate);
        p
    } else {
        plan(&cfg)?
    };
    if a.rt_override.is_some() {
        p.rate = None;
    }
    Ok(Output {
        json: to_json(&p),
        sections: plan_sections(&p),
    })
}

fn cmd_table1(ctx: &Context, a: &Table1Args) -> CliResult<Output> {
    let spec = QuadratureSpec::default();
    let rows = evaluate(
        &ctx.crystals,
        &ctx.detectors,
        a.with_oracle.then_some(&spec),
    )?;
    let mut cols = vec![
        "row",
        "pump_nm",
        "crystal",
        "pm_type",
        "chi3_1e-15_esu",
        "wp_w",
        "detector",
        "length_mm",
        "cavity",
        "R_T_hz",
        "R_T_paper_hz",
        "R_T_ratio",
        "T3_days",
        "T3_paper_days",
        "T3_ratio",
        "T2_days",
        "T2_paper_days",
        "T2_ratio",
        "T3_class",
        "T3_paper_class",
        "T2_class",
        "T2_paper_class",
        "T3_days_paper_rate",
        "T2_days_paper_rate",
    ];
    if a.with_oracle {
        cols.extend(["integral_i_numeric_cgs", "closed_over_numeric"]);
    }
    let mut sec = Section::new("table 1", &cols);
    for r in &rows {
        let row = &r.row;
        let c = &r.computed;
        let mut cells = vec![
            num(row.id as f64),
            num(row.pump_nm),
            text(row.crystal),
            text(row.pm_type),
            num(row.paper.chi3_esu * 1e15),
            num(row.pump_power_w),
            text(row.detector),
            num(row.length_mm),
            text(if row.cavity { "+" } else { "-" }),
            num(c.r_t_hz),
            num(row.paper.r_t_hz),
            num(r.ratios.r_t),
            opt(c.t3.days),
            num(row.paper.t3_days),
            num(r.ratios.t3),
            opt(c.t2.days),
            num(row.paper.t2_days),
            num(r.ratios.t2),
            text(c.t3.feasibility.word()),
            text(row.paper_t3_feasibility().word()),
            text(c.t2.feasibility.word()),
            text(row.paper_t2_feasibility().word()),
            opt(r.from_paper_rate.t3.days),
            opt(r.from_paper_rate.t2.days),
        ];
        if a.with_oracle {
            cells.push(opt(r.numeric_i_cgs));
            cells.push(opt(r.closed_over_numeric));
        }
        sec.push(cells);
    }
    Ok(Output {
        json: to_json(&rows),
        sections: vec![sec],
    })
}

fn cmd_audit(ctx: &Context, a: &AuditArgs) -> CliResult<Output> {
    let ids: Vec<usize> = if a.rows.is_empty() {
        ROWS.iter().map(|r| r.id).collect()
    } else {
        a.rows.clone()
    };
    let spec = QuadratureSpec::default();
    let grid = AuditGrid::default();
    let mut reports = Vec::new();
    let mut sec = Section::new(
        "closed form vs quadrature",
        &[
            "config_id",
            "closed_form_cgs",
            "numeric_cgs",
            "ratio",
            "self_convergence",
            "max_taylor_dev_2pi_over_l",
            "median_taylor_dev_2pi_over_l",
            "max_taylor_rel_dev",
            "median_taylor_rel_dev",
        ],
    );
    for id in ids {
        let row = ROWS
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| CliError::Input(format!("no Table 1 row {id} (rows are 1-10)")))?;
        let cfg = row.plan_config(&ctx.crystals, &ctx.detectors)?;
        let w = cfg.detector.window(&cfg.setup);
        let r = audit_config(format!("table1-row{id}"), &cfg.setup, &w, &spec, &grid)?;
        sec.push(vec![
            text(&r.config_id),
            num(r.closed_form),
            num(r.numeric),
            num(r.ratio),
            num(r.self_convergence),
            num(r.max_taylor_dev),
            num(r.median_taylor_dev),
            num(r.max_taylor_rel_dev),
            num(r.median_taylor_rel_dev),
        ]);
        reports.push(r);
    }
    let mut json = json!({ "reports": to_json(&reports) });
    let mut sections = vec![sec];
    if !a.skip_mc {
        let f = match a.mc_function {
            McFunction::Box => McTestFunction::Box,
            McFunction::Gaussian => McTestFunction::Gaussian,
        };
        let j = jacobian_mc_check(a.mc_samples, f, ctx.seed)?;
        sections.push(Section::record(
            "jacobian monte-carlo",
            vec![
                (
                    "test_function",
                    text(to_json(&j.test_function).as_str().unwrap_or("")),
                ),
                ("n_samples", num(j.n_samples as f64)),
                ("seed", text(j.seed)),
                ("original", num(j.original)),
                ("original_se", num(j.original_se)),
                ("polar", num(j.polar)),
                ("polar_se", num(j.polar_se)),
                ("rel_discrepancy", num(j.rel_discrepancy)),
                ("z_score", num(j.z_score)),
            ],
        ));
        json["jacobian"] = to_json(&j);
    }
    Ok(Output { json, sections })
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let ctx = Context::load(cli)?;
    match &cli.command {
        Command::Index(a) => cmd_index(&ctx, a),
        Command::Pm(a) => cmd_pm(&ctx, a),
        Command::Rate(a) => cmd_rate(&ctx, a),
        Command::Plan(a) => cmd_plan(&ctx, a),
        Command::Table1(a) => cmd_table1(&ctx, a),
        Command::Audit(a) => cmd_audit(&ctx, a),
    }
}

/// Parses `args`, runs the command, writes to `out`/`err` and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            if out.write_all(o.render(cli.format).as_bytes()).is_err() {
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
