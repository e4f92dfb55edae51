//! Coincidence statistics: noise and signal rates, minimal measurement
//! times and feasibility classes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::phasematch::{PhaseMatchSetup, PmType};
use crate::rates::{total_rate, DetectionWindow, ModeStructure, RateResult};
use crate::units::{seconds_to_days, CM_PER_MM};

/// A single-photon detector class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorModel {
    pub name: String,
    pub lambda_range_nm: (f64, f64),
    pub modes: ModeStructure,
    pub eta: f64,
    pub eta_range: (f64, f64),
    pub dark_rate_hz: f64,
    /// Timing jitter δτ in s.
    pub jitter_s: f64,
}

impl DetectorModel {
    pub fn new(
        name: impl Into<String>,
        lambda_range_nm: (f64, f64),
        modes: ModeStructure,
        eta: f64,
        eta_range: (f64, f64),
        dark_rate_hz: f64,
        jitter_s: f64,
    ) -> Result<Self> {
        let name = name.into();
        let bad = |m: String| Err(Error::InvalidInput(format!("detector {name}: {m}")));
        if !(lambda_range_nm.0 > 0.0 && lambda_range_nm.1 > lambda_range_nm.0) {
            return bad(format!("range {lambda_range_nm:?} nm"));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return bad(format!("η = {eta} outside (0, 1]"));
        }
        if !(eta_range.0 > 0.0 && eta_range.0 <= eta_range.1 && eta_range.1 <= 1.0) {
            return bad(format!("η range {eta_range:?}"));
        }
        if !(dark_rate_hz >= 0.0) {
            return bad(format!("dark rate {dark_rate_hz} Hz"));
        }
        if !(jitter_s > 0.0) {
            return bad(format!("jitter {jitter_s} s"));
        }
        Ok(DetectorModel {
            name,
            lambda_range_nm,
            modes,
            eta,
            eta_range,
            dark_rate_hz,
            jitter_s,
        })
    }

    /// Same detector with another efficiency; must lie inside `eta_range`.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        if !(eta >= self.eta_range.0 && eta <= self.eta_range.1) {
            return Err(Error::InvalidInput(format!(
                "η = {eta} outside {}'s range [{}, {}]",
                self.name, self.eta_range.0, self.eta_range.1
            )));
        }
        let mut d = self.clone();
        d.eta = eta;
        Ok(d)
    }

    pub fn covers(&self, lambda_nm: f64) -> bool {
        lambda_nm >= self.lambda_range_nm.0 && lambda_nm <= self.lambda_range_nm.1
    }

    /// Detection window this detector gives for the setup.
    pub fn window(&self, setup: &PhaseMatchSetup) -> DetectionWindow {
        DetectionWindow::for_setup(setup, self.lambda_range_nm, self.modes)
    }
}

/// Beam-splitter throughput factors for the two- and three-fold channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitterConfig {
    pub xi3: f64,
    pub xi2: f64,
}

impl Default for SplitterConfig {
    /// 30/70 followed by 50/50.
    fn default() -> Self {
        SplitterConfig {
            xi3: 0.22,
            xi2: 0.75,
        }
    }
}

impl SplitterConfig {
    pub fn new(xi3: f64, xi2: f64) -> Result<Self> {
        if !(xi3 > 0.0 && xi3 <= 0.25) || !(xi2 > 0.0 && xi2 <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "splitter factors ξ₃ = {xi3}, ξ₂ = {xi2} must satisfy 0 < ξ₃ ≤ 1/4, 0 < ξ₂ ≤ 1"
            )));
        }
        Ok(SplitterConfig { xi3, xi2 })
    }

    /// Identity splitter (ξ = 1) for analysis; bypasses the three-way bound.
    pub fn ideal() -> Self {
        SplitterConfig { xi3: 1.0, xi2: 1.0 }
    }

    fn xi(&self, order: Order) -> f64 {
        match order {
            Order::One => 1.0,
            Order::Two => self.xi2,
            Order::Three => self.xi3,
        }
    }
}

pub const DEFAULT_T_FACTOR: f64 = 3.0;

/// Coincidence order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Order {
    One = 1,
    Two = 2,
    Three = 3,
}

impl Order {
    pub fn from_u8(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Order::One),
            2 => Ok(Order::Two),
            3 => Ok(Order::Three),
            _ => Err(Error::InvalidInput(format!(
                "coincidence order {k} not in 1..=3"
            ))),
        }
    }

    fn k(self) -> i32 {
        self as i32
    }
}

/// Accidental k-fold rate R_n⁽ᵏ⁾ = (R_n⁽¹⁾)ᵏ δτᵏ⁻¹.
pub fn noise_rate(order: Order, detector: &DetectorModel) -> f64 {
    let k = order.k();
    detector.dark_rate_hz.powi(k) * detector.jitter_s.powi(k - 1)
}

pub fn noise_triple_rate(detector: &DetectorModel) -> f64 {
    noise_rate(Order::Three, detector)
}

/// Detected signal rate R_s⁽ᵏ⁾ = ξ_k R_T ηᵏ.
pub fn signal_rate(
    order: Order,
    r_t: f64,
    detector: &DetectorModel,
    splitter: &SplitterConfig,
) -> f64 {
    splitter.xi(order) * r_t * detector.eta.powi(order.k())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalRates {
    pub triple_hz: f64,
    pub double_hz: f64,
    pub single_hz: f64,
}

pub fn signal_rates(r_t: f64, detector: &DetectorModel, splitter: &SplitterConfig) -> SignalRates {
    SignalRates {
        triple_hz: signal_rate(Order::Three, r_t, detector, splitter),
        double_hz: signal_rate(Order::Two, r_t, detector, splitter),
        single_hz: signal_rate(Order::One, r_t, detector, splitter),
    }
}

/// T = t²(2R_n + R_s)/R_s², in s.
pub fn time_from_rates(signal_hz: f64, noise_hz: f64, t_factor: f64) -> Result<f64> {
    if !(signal_hz > 0.0) {
        return Err(Error::ZeroSignal);
    }
    Ok(t_factor * t_factor * (2.0 * noise_hz + signal_hz) / (signal_hz * signal_hz))
}

pub fn measurement_time(
    order: Order,
    r_t: f64,
    detector: &DetectorModel,
    splitter: &SplitterConfig,
    t_factor: f64,
) -> Result<f64> {
    if !(r_t >= 0.0) || !(t_factor > 0.0) {
        return Err(Error::InvalidInput(format!(
            "R_T = {r_t} Hz, t = {t_factor}"
        )));
    }
    time_from_rates(
        signal_rate(order, r_t, detector, splitter),
        noise_rate(order, detector),
        t_factor,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Feasibility {
    Green,
    Yellow,
    Red,
}

impl Feasibility {
    pub fn word(self) -> &'static str {
        match self {
            Feasibility::Green => "green",
            Feasibility::Yellow => "yellow",
            Feasibility::Red => "red",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityThresholds {
    pub green_max_days: f64,
    pub red_min_days: f64,
}

impl Default for FeasibilityThresholds {
    fn default() -> Self {
        FeasibilityThresholds {
            green_max_days: 1.0,
            red_min_days: 3e4,
        }
    }
}

impl FeasibilityThresholds {
    /// `None` means the time is unbounded.
    pub fn classify(&self, t_days: Option<f64>) -> Feasibility {
        match t_days {
            Some(t) if t <= self.green_max_days => Feasibility::Green,
            Some(t) if t < self.red_min_days => Feasibility::Yellow,
            _ => Feasibility::Red,
        }
    }
}

pub fn feasibility(t_days: Option<f64>) -> Feasibility {
    FeasibilityThresholds::default().classify(t_days)
}

/// Rates and time for one coincidence order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelTime {
    pub order: u8,
    pub signal_hz: f64,
    pub noise_hz: f64,
    /// `None` when the signal rate is zero.
    pub seconds: Option<f64>,
    pub days: Option<f64>,
    pub feasibility: Feasibility,
}

fn channel(
    order: Order,
    r_t: f64,
    detector: &DetectorModel,
    splitter: &SplitterConfig,
    t_factor: f64,
    thresholds: &FeasibilityThresholds,
) -> Result<ChannelTime> {
    let seconds = match measurement_time(order, r_t, detector, splitter, t_factor) {
        Ok(t) => Some(t),
        Err(Error::ZeroSignal) => None,
        Err(e) => return Err(e),
    };
    let days = seconds.map(seconds_to_days);
    Ok(ChannelTime {
        order: order.k() as u8,
        signal_hz: signal_rate(order, r_t, detector, splitter),
        noise_hz: noise_rate(order, detector),
        seconds,
        days,
        feasibility: thresholds.classify(days),
    })
}

/// Everything needed for an end-to-end plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanConfig {
    pub setup: PhaseMatchSetup,
    pub detector: DetectorModel,
    /// Defaults to the detector's own window.
    pub window: Option<DetectionWindow>,
    pub pump_power_w: f64,
    pub cavity: Option<f64>,
    pub splitter: SplitterConfig,
    pub t_factor: f64,
    /// Use this R_T instead of computing it.
    pub rt_override_hz: Option<f64>,
    pub thresholds: FeasibilityThresholds,
}

impl PlanConfig {
    pub fn new(setup: PhaseMatchSetup, detector: DetectorModel, pump_power_w: f64) -> Self {
        PlanConfig {
            setup,
            detector,
            window: None,
            pump_power_w,
            cavity: None,
            splitter: SplitterConfig::default(),
            t_factor: DEFAULT_T_FACTOR,
            rt_override_hz: None,
            thresholds: FeasibilityThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentPlan {
    pub crystal: String,
    pub pm_type: PmType,
    pub pump_nm: f64,
    pub chi3_esu: Option<f64>,
    pub pump_power_w: f64,
    pub cavity_factor: f64,
    pub length_mm: f64,
    pub detector: String,
    pub eta: f64,
    pub splitter: SplitterConfig,
    pub t_factor: f64,
    #[serde(rename = "R_T_hz")]
    pub r_t_hz: f64,
    pub rt_overridden: bool,
    pub rate: Option<RateResult>,
    pub t1: ChannelTime,
    pub t2: ChannelTime,
    pub t3: ChannelTime,
}

pub fn plan(cfg: &PlanConfig) -> Result<ExperimentPlan> {
    let setup = &cfg.setup;
    let triplet_nm = 3.0 * setup.pump_nm;
    let det = &cfg.detector;
    if !det.covers(triplet_nm) {
        return Err(Error::WavelengthMismatch {
            detector: det.name.clone(),
            triplet_nm,
            min_nm: det.lambda_range_nm.0,
            max_nm: det.lambda_range_nm.1,
        });
    }
    if !(cfg.t_factor > 0.0) {
        return Err(Error::InvalidInput(format!(
            "t factor {} must be > 0",
            cfg.t_factor
        )));
    }
    let (r_t, rate) = match cfg.rt_override_hz {
        Some(r) if !(r >= 0.0) => return Err(Error::InvalidInput(format!("R_T override {r} Hz"))),
        Some(r) => (r, None),
        None => {
            let window = cfg.window.unwrap_or_else(|| det.window(setup));
            let rate = total_rate(setup, &window, cfg.pump_power_w, cfg.cavity)?;
            (rate.r_t_hz, Some(rate))
        }
    };
    let ch = |o| channel(o, r_t, det, &cfg.splitter, cfg.t_factor, &cfg.thresholds);
    Ok(ExperimentPlan {
        crystal: setup.crystal.name.clone(),
        pm_type: setup.pm_type,
        pump_nm: setup.pump_nm,
        chi3_esu: setup.crystal.chi3(setup.pump_nm, setup.pm_type).ok(),
        pump_power_w: cfg.pump_power_w,
        cavity_factor: cfg.cavity.unwrap_or(1.0),
        length_mm: setup.length_cm / CM_PER_MM,
        detector: det.name.clone(),
        eta: det.eta,
        splitter: cfg.splitter,
        t_factor: cfg.t_factor,
        r_t_hz: r_t,
        rt_overridden: cfg.rt_override_hz.is_some(),
        rate,
        t1: ch(Order::One)?,
        t2: ch(Order::Two)?,
        t3: ch(Order::Three)?,
    })
}

fn days_cell(c: &ChannelTime) -> String {
    match c.days {
        Some(d) => format!("{d:.2e}"),
        None => "unbounded".into(),
    }
}

/// Fixed-width text table with one line per plan.
pub fn render_table(plans: &[ExperimentPlan]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>8} {:<16} {:>12} {:>7} {:<17} {:>8} {:>6} {:>10} {:>10} {:>10} {:>7} {:>7}",
        "λp(nm)",
        "medium",
        "χ3(1e-15esu)",
        "Wp(W)",
        "detector",
        "l(mm)",
        "cavity",
        "R_T(Hz)",
        "T3(days)",
        "T2(days)",
        "T3",
        "T2"
    );
    for p in plans {
        let chi = p
            .chi3_esu
            .map_or("-".to_string(), |c| format!("{:.2}", c * 1e15));
        let _ = writeln!(
            s,
            "{:>8.1} {:<16} {:>12} {:>7} {:<17} {:>8.3} {:>6} {:>10.2e} {:>10} {:>10} {:>7} {:>7}",
            p.pump_nm,
            format!("{} ({})", p.crystal, p.pm_type),
            chi,
            p.pump_power_w,
            p.detector,
            p.length_mm,
            if p.cavity_factor > 1.0 { "+" } else { "-" },
            p.r_t_hz,
            days_cell(&p.t3),
            days_cell(&p.t2),
            p.t3.feasibility.word(),
            p.t2.feasibility.word(),
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{builtin_crystal, builtin_detectors, find_detector, CALCITE};
    use crate::units::SECONDS_PER_DAY;

    fn det(name: &str) -> DetectorModel {
        find_detector(&builtin_detectors(), name).unwrap()
    }

    #[test]
    fn triple_noise_arithmetic() {
        assert!((noise_triple_rate(&det("si")) / 1.225e-13 - 1.0).abs() < 1e-12);
        assert!((noise_triple_rate(&det("pmd")) / 6.125e-7 - 1.0).abs() < 1e-12);
        let quiet = DetectorModel::new(
            "q",
            (400.0, 900.0),
            ModeStructure::Multi,
            0.5,
            (0.5, 0.5),
            0.0,
            1e-9,
        )
        .unwrap();
        assert_eq!(noise_triple_rate(&quiet), 0.0);
    }

    #[test]
    fn signal_arithmetic() {
        let s = signal_rates(4.0e-2, &det("si"), &SplitterConfig::default());
        assert!((s.triple_hz - 1.1e-3).abs() < 1e-12);
        let ideal = DetectorModel::new(
            "i",
            (400.0, 900.0),
            ModeStructure::Multi,
            1.0,
            (1.0, 1.0),
            0.0,
            1e-9,
        )
        .unwrap();
        let s = signal_rates(2.0, &ideal, &SplitterConfig::ideal());
        assert_eq!(s.triple_hz, 2.0);
        assert_eq!(
            signal_rates(0.0, &ideal, &SplitterConfig::ideal()).single_hz,
            0.0
        );
    }

    #[test]
    fn cavity_row_times() {
        let d = det("si");
        let sp = SplitterConfig::default();
        let t3 = measurement_time(Order::Three, 4.0e-2, &d, &sp, 3.0).unwrap() / SECONDS_PER_DAY;
        let t2 = measurement_time(Order::Two, 4.0e-2, &d, &sp, 3.0).unwrap() / SECONDS_PER_DAY;
        assert!((t3 / 9.4e-2 - 1.0).abs() < 0.1, "{t3}");
        assert!((t2 / 1.4e-2 - 1.0).abs() < 0.1, "{t2}");
        assert_eq!(
            measurement_time(Order::Three, 0.0, &d, &sp, 3.0),
            Err(Error::ZeroSignal)
        );
    }

    #[test]
    fn classes() {
        assert_eq!(feasibility(Some(9.4e-2)), Feasibility::Green);
        assert_eq!(feasibility(Some(18000.0)), Feasibility::Yellow);
        assert_eq!(feasibility(Some(6.6e4)), Feasibility::Red);
        assert_eq!(feasibility(None), Feasibility::Red);
    }

    #[test]
    fn plan_errors() {
        let setup = PhaseMatchSetup::phase_matched(
            builtin_crystal(CALCITE).unwrap(),
            266.0,
            PmType::E_OOE,
            0.01,
        )
        .unwrap();
        let cfg = PlanConfig::new(setup.clone(), det("pmd"), 10.0);
        assert!(matches!(plan(&cfg), Err(Error::WavelengthMismatch { .. })));
        let cfg = PlanConfig::new(setup, det("si"), 0.0);
        let p = plan(&cfg).unwrap();
        assert!(p.t3.seconds.is_none() && p.t2.seconds.is_none() && p.t1.seconds.is_none());
        assert_eq!(p.t3.feasibility, Feasibility::Red);
    }

    #[test]
    fn eta_range_enforced() {
        let d = det("si");
        assert_eq!(d.with_eta(0.7).unwrap().eta, 0.7);
        assert!(d.with_eta(0.8).is_err());
        assert!(SplitterConfig::new(0.3, 0.75).is_err());
    }
}
