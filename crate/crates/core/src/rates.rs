//! Coupling constant, differential and total triplet rates, and crystal
//! length selection.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::dispersion::OpticalMode;
use crate::error::{Error, Result};
use crate::numeric::sinc2;
use crate::phasematch::{
    delta_kz_exact, taylor_type1, taylor_type2, PhaseMatchSetup, PmKind, PmType,
};
use crate::units::{omega_from_nm, watts_to_cgs, CM_PER_NM, C_CGS, HBAR_CGS};

/// Whether a detector collects one spatial mode or many.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeStructure {
    Single,
    Multi,
}

/// Spectral and angular acceptance of the detection arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionWindow {
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    /// Half-angle in rad.
    pub theta_max: f64,
    pub mode_structure: ModeStructure,
    /// Pump waist in cm; single-mode only.
    pub pump_waist_cm: Option<f64>,
    /// Set when the angular range lies outside the small-angle model.
    pub extrapolated_geometry: bool,
}

impl DetectionWindow {
    /// All emitted light is collected: θ_max = π/2.
    pub fn multi_mode(lambda_min_nm: f64, lambda_max_nm: f64) -> Self {
        DetectionWindow {
            lambda_min_nm,
            lambda_max_nm,
            theta_max: FRAC_PI_2,
            mode_structure: ModeStructure::Multi,
            pump_waist_cm: None,
            extrapolated_geometry: true,
        }
    }

    /// Gaussian-mode divergence θ_max = λ/(πw).
    pub fn single_mode(
        lambda_min_nm: f64,
        lambda_max_nm: f64,
        lambda_cm: f64,
        waist_cm: f64,
    ) -> Self {
        DetectionWindow {
            lambda_min_nm,
            lambda_max_nm,
            theta_max: lambda_cm / (PI * waist_cm),
            mode_structure: ModeStructure::Single,
            pump_waist_cm: Some(waist_cm),
            extrapolated_geometry: false,
        }
    }

    /// Window of a detector class for this setup. Single-mode windows take
    /// the largest waist walk-off allows, w = ρl, at the triplet wavelength.
    pub fn for_setup(
        setup: &PhaseMatchSetup,
        lambda_range_nm: (f64, f64),
        modes: ModeStructure,
    ) -> Self {
        match modes {
            ModeStructure::Multi => Self::multi_mode(lambda_range_nm.0, lambda_range_nm.1),
            ModeStructure::Single => Self::single_mode(
                lambda_range_nm.0,
                lambda_range_nm.1,
                3.0 * setup.pump_lambda_cm(),
                setup.crystal.walk_off_rho * setup.length_cm,
            ),
        }
    }

    pub fn with_theta_max(mut self, theta_max: f64) -> Self {
        self.theta_max = theta_max;
        self.extrapolated_geometry = theta_max > 0.1;
        self
    }

    /// Detuning allowed on each side of ω_p/3: (blue side, red side), rad/s.
    pub fn spectral_bounds(&self, pump_nm: f64) -> (f64, f64) {
        let w0 = omega_from_nm(pump_nm) / 3.0;
        (
            2.0 * PI * C_CGS / (self.lambda_min_nm * CM_PER_NM) - w0,
            w0 - 2.0 * PI * C_CGS / (self.lambda_max_nm * CM_PER_NM),
        )
    }

    fn validate(&self, setup: &PhaseMatchSetup) -> Result<()> {
        let l3 = 3.0 * setup.pump_nm;
        if !(self.lambda_min_nm < l3 && l3 < self.lambda_max_nm) {
            return Err(Error::EmptyWindow(format!(
                "{l3} nm not inside ({}, {}) nm",
                self.lambda_min_nm, self.lambda_max_nm
            )));
        }
        if !(self.theta_max >= 0.0 && self.theta_max <= FRAC_PI_2) {
            return Err(Error::InvalidInput(format!(
                "θ_max = {} rad outside [0, π/2]",
                self.theta_max
            )));
        }
        if let Some(w) = self.pump_waist_cm {
            let limit = setup.crystal.walk_off_rho * setup.length_cm;
            if w > limit * (1.0 + 1e-12) {
                return Err(Error::InvalidInput(format!(
                    "pump waist {w:e} cm exceeds walk-off limit ρl = {limit:e} cm"
                )));
            }
        }
        Ok(())
    }
}

/// Which window edge sets the integration bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitingFactor {
    /// λ_min edge.
    SpectralLow,
    /// λ_max edge.
    SpectralHigh,
    Angular,
}

/// Value of the rate integral I with the active frequency bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowIntegral {
    pub value: f64,
    /// Ω_Σmax (type-I) or Ω_max (type-II), rad/s.
    pub omega_max: f64,
    pub limiting_factor: LimitingFactor,
}

/// Γ = ħχ²ω₁ω₂ω₃ / (c⁴(2π)² n₁n₂n₃n_p), CGS.
pub fn gamma_coefficient(chi3_eff: f64, omegas: [f64; 3], indices: [f64; 4]) -> Result<f64> {
    if !(chi3_eff >= 0.0) || omegas.iter().chain(indices.iter()).any(|x| !(*x > 0.0)) {
        return Err(Error::InvalidInput(
            "Γ needs χ ≥ 0 and positive frequencies and indices".into(),
        ));
    }
    let [w1, w2, w3] = omegas;
    let [n1, n2, n3, np] = indices;
    Ok(HBAR_CGS * chi3_eff * chi3_eff * w1 * w2 * w3
        / (C_CGS.powi(4) * (2.0 * PI).powi(2) * n1 * n2 * n3 * np))
}

/// Γ at the degenerate point of the setup.
pub fn setup_gamma(setup: &PhaseMatchSetup, chi3_eff: f64) -> Result<f64> {
    let w = setup.omega_0();
    gamma_coefficient(chi3_eff, [w; 3], setup.degenerate_indices()?)
}

/// Γ l² W_p sinc²(Δk_z l/2) for three modes on the conservation manifold.
pub fn differential_rate(
    setup: &PhaseMatchSetup,
    modes: &[OpticalMode; 3],
    chi3_eff: f64,
    pump_power_w: f64,
) -> Result<f64> {
    let dk = delta_kz_exact(setup, modes)?;
    let l = setup.length_cm;
    Ok(setup_gamma(setup, chi3_eff)? * l * l * watts_to_cgs(pump_power_w) * sinc2(dk * l / 2.0))
}

fn pick_min(bounds: &[(f64, LimitingFactor)]) -> (f64, LimitingFactor) {
    bounds
        .iter()
        .copied()
        .fold((f64::INFINITY, LimitingFactor::SpectralLow), |acc, b| {
            if b.0 < acc.0 {
                b
            } else {
                acc
            }
        })
}

/// Normalization of the δ-resolved type-I variables, 1/(3√3).
pub const TYPE1_DELTA_FACTOR: f64 = 0.19245008972987526;

/// Type-I closed form I = π⁴βΩ_Σmax⁴ / (3√3 α² l).
pub fn integral_i_type1(
    setup: &PhaseMatchSetup,
    window: &DetectionWindow,
) -> Result<WindowIntegral> {
    window.validate(setup)?;
    let t = taylor_type1(setup)?;
    let slope = t.locus_slope()?;
    let (blue, red) = window.spectral_bounds(setup.pump_nm);
    let angular = t.k_p * window.theta_max / 3.0 / slope;
    let (omega_max, limiting_factor) = pick_min(&[
        (blue, LimitingFactor::SpectralLow),
        (red, LimitingFactor::SpectralHigh),
        (angular, LimitingFactor::Angular),
    ]);
    if !(omega_max >= 0.0) {
        return Err(Error::EmptyWindow(format!("Ω_Σmax = {omega_max:e} rad/s")));
    }
    let value = TYPE1_DELTA_FACTOR * PI.powi(4) * t.beta * omega_max.powi(4)
        / (t.alpha * t.alpha * setup.length_cm);
    Ok(WindowIntegral {
        value,
        omega_max,
        limiting_factor,
    })
}

/// Geometry of the type-II integral shared with the numeric oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Type2Geometry {
    /// Spectral half-width Ω_m and angular bound q_m = k_p θ_max.
    pub omega_m: f64,
    pub q_m: f64,
    pub beta_plus: f64,
    pub alpha_plus: f64,
    pub gamma: f64,
    pub omega_max: f64,
    pub limiting_factor: LimitingFactor,
}

pub fn type2_geometry(setup: &PhaseMatchSetup, window: &DetectionWindow) -> Result<Type2Geometry> {
    window.validate(setup)?;
    let t = taylor_type2(setup)?;
    if t.alpha_e.abs() < 1e-12 {
        return Err(Error::DegenerateWalkoff(t.alpha_e));
    }
    let (blue, red) = window.spectral_bounds(setup.pump_nm);
    let q_m = t.k_p * window.theta_max;
    let s = (t.beta_plus / t.alpha_plus).abs();
    let omega_q = if s > 0.0 { q_m / s } else { f64::INFINITY };
    let (omega_m, spectral) = pick_min(&[
        (blue, LimitingFactor::SpectralLow),
        (red, LimitingFactor::SpectralHigh),
    ]);
    let (omega_max, limiting_factor) =
        pick_min(&[(omega_m, spectral), (omega_q, LimitingFactor::Angular)]);
    if !(omega_max >= 0.0) {
        return Err(Error::EmptyWindow(format!("Ω_max = {omega_max:e} rad/s")));
    }
    Ok(Type2Geometry {
        omega_m,
        q_m,
        beta_plus: t.beta_plus,
        alpha_plus: t.alpha_plus,
        gamma: t.gamma,
        omega_max,
        limiting_factor,
    })
}

/// Type-II closed form: the q₊ integral is replaced by the sinc² width
/// 2π/(|α₊|l) on the locus q₊ = (β₊/α₊)Ω₊, and the remaining Ω₊ integral
/// of the Ω₋, q₋ range lengths is done exactly.
pub fn integral_i_type2(
    setup: &PhaseMatchSetup,
    window: &DetectionWindow,
) -> Result<WindowIntegral> {
    let g = type2_geometry(setup, window)?;
    let l = setup.length_cm;
    let a = SQRT_2 * g.omega_m;
    let b = SQRT_2 * g.q_m;
    let s = (g.beta_plus / g.alpha_plus).abs();
    let x = SQRT_2 * g.omega_max;
    let poly = a * b * x - (a * s + b) * x * x / 2.0 + s * x.powi(3) / 3.0;
    let width = 2.0 * PI / (g.alpha_plus.abs() * l);
    let value = 2.0 * PI / (l * g.gamma.abs()) * 4.0 * width * 2.0 * poly;
    Ok(WindowIntegral {
        value,
        omega_max: g.omega_max,
        limiting_factor: g.limiting_factor,
    })
}

pub fn integral_i(setup: &PhaseMatchSetup, window: &DetectionWindow) -> Result<WindowIntegral> {
    match setup.pm_type.kind() {
        PmKind::TypeI => integral_i_type1(setup, window),
        PmKind::TypeII => integral_i_type2(setup, window),
    }
}

/// Total-rate computation output; field names carry units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult {
    pub crystal: String,
    pub pump_nm: f64,
    pub pm_type: PmType,
    pub theta_pm_rad: f64,
    pub length_cm: f64,
    pub chi3_esu: f64,
    pub pump_power_w: f64,
    pub cavity_factor: f64,
    pub gamma_cgs: f64,
    pub integral_i_cgs: f64,
    #[serde(rename = "R_T_hz")]
    pub r_t_hz: f64,
    pub omega_max_rad_s: f64,
    pub limiting_factor: LimitingFactor,
    pub theta_max_rad: f64,
    pub mode_structure: ModeStructure,
    pub extrapolated_geometry: bool,
}

/// R_T = I Γ l² ε W_p using the crystal's tabulated χ(3)_eff.
pub fn total_rate(
    setup: &PhaseMatchSetup,
    window: &DetectionWindow,
    pump_power_w: f64,
    cavity: Option<f64>,
) -> Result<RateResult> {
    let chi3 = setup.crystal.chi3(setup.pump_nm, setup.pm_type)?;
    total_rate_with_chi3(setup, window, pump_power_w, cavity, chi3)
}

pub fn total_rate_with_chi3(
    setup: &PhaseMatchSetup,
    window: &DetectionWindow,
    pump_power_w: f64,
    cavity: Option<f64>,
    chi3_esu: f64,
) -> Result<RateResult> {
    if !(pump_power_w >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "pump power {pump_power_w} W must be ≥ 0"
        )));
    }
    let eps = match cavity {
        Some(_) if !setup.crystal.cavity_allowed => {
            return Err(Error::CavityNotAllowed(setup.crystal.name.clone()));
        }
        Some(e) if !(e >= 1.0) => {
            return Err(Error::InvalidInput(format!(
                "cavity factor {e} must be ≥ 1"
            )));
        }
        Some(e) => e,
        None => 1.0,
    };
    let integral = integral_i(setup, window)?;
    let gamma = setup_gamma(setup, chi3_esu)?;
    let l = setup.length_cm;
    let r_t = integral.value * gamma * l * l * eps * watts_to_cgs(pump_power_w);
    Ok(RateResult {
        crystal: setup.crystal.name.clone(),
        pump_nm: setup.pump_nm,
        pm_type: setup.pm_type,
        theta_pm_rad: setup.theta_pm,
        length_cm: l,
        chi3_esu,
        pump_power_w,
        cavity_factor: eps,
        gamma_cgs: gamma,
        integral_i_cgs: integral.value,
        r_t_hz: r_t,
        omega_max_rad_s: integral.omega_max,
        limiting_factor: integral.limiting_factor,
        theta_max_rad: window.theta_max,
        mode_structure: window.mode_structure,
        extrapolated_geometry: window.extrapolated_geometry,
    })
}

/// Rule used by [`optimal_length`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthRule {
    /// Type-II: twice the walk-off length 4π|γ|/α_e².
    TwiceLmin,
    /// Type-I multi-mode: longest practical crystal.
    MultiModeCap,
    /// Type-I single-mode: angular and spectral bounds coincide.
    SingleModeBalance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalLength {
    pub length_cm: f64,
    pub rule: LengthRule,
}

pub const MULTI_MODE_LENGTH_CAP_CM: f64 = 10.0;

/// Crystal length giving the largest rate for this setup and detector mode.
pub fn optimal_length(setup: &PhaseMatchSetup, window: &DetectionWindow) -> Result<OptimalLength> {
    match setup.pm_type.kind() {
        PmKind::TypeII => {
            let t = taylor_type2(setup)?;
            if t.alpha_e.abs() < 1e-12 {
                return Err(Error::DegenerateWalkoff(t.alpha_e));
            }
            Ok(OptimalLength {
                length_cm: 2.0 * t.l_min(),
                rule: LengthRule::TwiceLmin,
            })
        }
        PmKind::TypeI => match window.mode_structure {
            ModeStructure::Multi => Ok(OptimalLength {
                length_cm: MULTI_MODE_LENGTH_CAP_CM,
                rule: LengthRule::MultiModeCap,
            }),
            ModeStructure::Single => {
                let t = taylor_type1(setup)?;
                let slope = t.locus_slope()?;
                let (blue, red) = window.spectral_bounds(setup.pump_nm);
                let spectral = blue.min(red);
                if !(spectral > 0.0) {
                    return Err(Error::EmptyWindow(format!(
                        "spectral bound {spectral:e} rad/s"
                    )));
                }
                let lambda = 3.0 * setup.pump_lambda_cm();
                let length_cm =
                    t.k_p * lambda / (3.0 * PI * setup.crystal.walk_off_rho) / slope / spectral;
                Ok(OptimalLength {
                    length_cm,
                    rule: LengthRule::SingleModeBalance,
                })
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{builtin_crystal, CALCITE, RUTILE};

    fn calcite266() -> PhaseMatchSetup {
        PhaseMatchSetup::phase_matched(
            builtin_crystal(CALCITE).unwrap(),
            266.0,
            PmType::E_OOE,
            0.01,
        )
        .unwrap()
    }

    fn rutile(l: f64) -> PhaseMatchSetup {
        PhaseMatchSetup::phase_matched(builtin_crystal(RUTILE).unwrap(), 532.0, PmType::O_EEE, l)
            .unwrap()
    }

    #[test]
    fn gamma_hand_evaluation() {
        let s = calcite266();
        let g = setup_gamma(&s, 0.32e-15).unwrap();
        let [n1, n2, n3, np] = s.degenerate_indices().unwrap();
        let w = 2.0 * PI * 2.9979e10 / (3.0 * 266e-7);
        let hand = 1.0546e-27 * (0.32e-15f64).powi(2) * w.powi(3)
            / (2.9979e10f64.powi(4) * 4.0 * PI * PI * n1 * n2 * n3 * np);
        assert!((g / hand - 1.0).abs() < 1e-3, "{g:e} vs {hand:e}");
        assert_eq!(setup_gamma(&s, 0.0).unwrap(), 0.0);
        let g2 = setup_gamma(&s, 0.64e-15).unwrap();
        assert!((g2 / g - 4.0).abs() < 1e-12);
    }

    #[test]
    fn differential_rate_peak_and_zero() {
        let s = calcite266();
        let modes = s.degenerate_modes();
        let peak = differential_rate(&s, &modes, 1e-15, 1.0).unwrap();
        let g = setup_gamma(&s, 1e-15).unwrap();
        assert!((peak / (g * 1e-4 * 1e7) - 1.0).abs() < 1e-6);
        let s2 = s.with_length(0.02).unwrap();
        let peak2 = differential_rate(&s2, &modes, 1e-15, 1.0).unwrap();
        assert!((peak2 / peak - 4.0).abs() < 1e-6);
    }

    #[test]
    fn calcite_first_row_rate() {
        let s = calcite266();
        let w = DetectionWindow::for_setup(&s, (400.0, 1040.0), ModeStructure::Multi);
        let r = total_rate(&s, &w, 10.0, None).unwrap();
        assert!(
            r.r_t_hz > 4.0e-5 / 5.0 && r.r_t_hz < 4.0e-5 * 5.0,
            "{:e}",
            r.r_t_hz
        );
        let rc = total_rate(&s, &w, 10.0, Some(1000.0)).unwrap();
        assert!((rc.r_t_hz / r.r_t_hz - 1000.0).abs() < 1e-9);
        assert!(total_rate(&s, &w, 0.0, None).unwrap().r_t_hz == 0.0);
    }

    #[test]
    fn rutile_rejects_cavity() {
        let s = rutile(10.0);
        let w = DetectionWindow::for_setup(&s, (950.0, 1700.0), ModeStructure::Multi);
        assert!(matches!(
            total_rate(&s, &w, 10.0, Some(1000.0)),
            Err(Error::CavityNotAllowed(_))
        ));
    }

    #[test]
    fn type1_length_scaling() {
        let s = rutile(10.0);
        let w = DetectionWindow::for_setup(&s, (950.0, 1700.0), ModeStructure::Multi);
        let a = integral_i_type1(&s, &w).unwrap();
        let b = integral_i_type1(&s.with_length(5.0).unwrap(), &w).unwrap();
        assert!((b.value / a.value - 2.0).abs() < 1e-12);
        assert_eq!(a.limiting_factor, LimitingFactor::SpectralHigh);
    }

    #[test]
    fn empty_window() {
        let s = calcite266();
        let w = DetectionWindow::multi_mode(900.0, 1040.0);
        assert!(matches!(
            integral_i_type2(&s, &w),
            Err(Error::EmptyWindow(_))
        ));
    }

    #[test]
    fn optimal_lengths() {
        let s = calcite266();
        let w = DetectionWindow::for_setup(&s, (400.0, 1040.0), ModeStructure::Multi);
        let o = optimal_length(&s, &w).unwrap();
        assert_eq!(o.rule, LengthRule::TwiceLmin);
        assert!(o.length_cm > 0.005 && o.length_cm < 0.05, "{}", o.length_cm);
        let r = rutile(10.0);
        let wm = DetectionWindow::for_setup(&r, (950.0, 1700.0), ModeStructure::Multi);
        assert_eq!(optimal_length(&r, &wm).unwrap().length_cm, 10.0);
        let ws = DetectionWindow::for_setup(&r, (600.0, 1700.0), ModeStructure::Single);
        let os = optimal_length(&r, &ws).unwrap();
        assert_eq!(os.rule, LengthRule::SingleModeBalance);
        // at that length the angular and spectral bounds coincide
        let rs = r.with_length(os.length_cm).unwrap();
        let ws = DetectionWindow::for_setup(&rs, (600.0, 1700.0), ModeStructure::Single);
        let t = taylor_type1(&rs).unwrap();
        let angular = t.k_p * ws.theta_max / 3.0 / t.locus_slope().unwrap();
        let (blue, red) = ws.spectral_bounds(532.0);
        assert!((angular / blue.min(red) - 1.0).abs() < 1e-9);
    }
}
