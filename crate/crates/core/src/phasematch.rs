//! Collinear degenerate phase matching: angle solver, exact longitudinal
//! mismatch and the second-order (type-I) and first-order (type-II) Taylor
//! forms, plus sinc² map export.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dispersion::{CrystalModel, DerivVariable, OpticalMode, Polarization};
use crate::error::{Error, Result};
use crate::numeric::{bisect, sinc2, DerivOrder};
use crate::units::{omega_from_nm, CM_PER_NM, CM_PER_UM, C_CGS};

/// Residual bound for a phase-matching angle, relative to k_p.
pub const PM_RESIDUAL_REL: f64 = 1e-6;
/// Relative spread of γ_oy and γ_ey above which the common-γ model is flagged.
pub const GAMMA_SPREAD_WARN: f64 = 0.2;

/// Pump polarization and the polarizations of the three generated photons.
///
/// Generated polarizations are stored ordinary-first so `e→oeo` and `e→ooe`
/// compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PmType {
    pump: Polarization,
    generated: [Polarization; 3],
}

/// Broad class of a [`PmType`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PmKind {
    /// All generated photons share one polarization.
    TypeI,
    /// Two photons share a polarization, the third differs.
    TypeII,
}

impl PmType {
    pub const E_OOO: PmType =
        PmType::from_parts(Polarization::Extraordinary, [Polarization::Ordinary; 3]);
    pub const E_OOE: PmType = PmType::from_parts(
        Polarization::Extraordinary,
        [
            Polarization::Ordinary,
            Polarization::Ordinary,
            Polarization::Extraordinary,
        ],
    );
    pub const E_OEE: PmType = PmType::from_parts(
        Polarization::Extraordinary,
        [
            Polarization::Ordinary,
            Polarization::Extraordinary,
            Polarization::Extraordinary,
        ],
    );
    pub const O_EEE: PmType =
        PmType::from_parts(Polarization::Ordinary, [Polarization::Extraordinary; 3]);

    const fn from_parts(pump: Polarization, generated: [Polarization; 3]) -> Self {
        PmType { pump, generated }
    }

    pub fn new(pump: Polarization, mut generated: [Polarization; 3]) -> Self {
        generated.sort_by_key(|p| matches!(p, Polarization::Extraordinary));
        PmType { pump, generated }
    }

    pub fn pump(&self) -> Polarization {
        self.pump
    }

    pub fn generated(&self) -> [Polarization; 3] {
        self.generated
    }

    pub fn kind(&self) -> PmKind {
        let g = self.generated;
        if g[0] == g[1] && g[1] == g[2] {
            PmKind::TypeI
        } else {
            PmKind::TypeII
        }
    }

    /// No wave is extraordinary, so the mismatch does not depend on angle.
    pub fn is_angle_independent(&self) -> bool {
        self.pump == Polarization::Ordinary
            && self.generated.iter().all(|p| *p == Polarization::Ordinary)
    }

    /// For type-II: (polarization shared by two photons, the odd one).
    pub fn pair_and_single(&self) -> Option<(Polarization, Polarization)> {
        match self.kind() {
            PmKind::TypeI => None,
            PmKind::TypeII => {
                let g = self.generated;
                if g[0] == g[1] {
                    Some((g[0], g[2]))
                } else {
                    Some((g[1], g[0]))
                }
            }
        }
    }
}

impl fmt::Display for PmType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: String = self.generated.iter().map(|p| p.letter()).collect();
        write!(f, "{}->{}", self.pump.letter(), g)
    }
}

impl FromStr for PmType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace('→', "->");
        let bad = || {
            Error::InvalidInput(format!(
                "phase-matching type {s:?} is not of the form e->ooe"
            ))
        };
        let (pump, gen) = t.split_once("->").ok_or_else(bad)?;
        let mut pump_chars = pump.trim().chars();
        let pump = pump_chars
            .next()
            .and_then(Polarization::from_letter)
            .ok_or_else(bad)?;
        if pump_chars.next().is_some() {
            return Err(bad());
        }
        let gen: Vec<Polarization> = gen
            .trim()
            .chars()
            .map(Polarization::from_letter)
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        let gen: [Polarization; 3] = gen.try_into().map_err(|_| bad())?;
        Ok(PmType::new(pump, gen))
    }
}

impl Serialize for PmType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PmType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A crystal cut and pumped for one phase-matching type.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatchSetup {
    pub crystal: CrystalModel,
    pub pump_nm: f64,
    pub pm_type: PmType,
    pub theta_pm: f64,
    pub length_cm: f64,
}

impl PhaseMatchSetup {
    pub fn new(
        crystal: CrystalModel,
        pump_nm: f64,
        pm_type: PmType,
        theta_pm: f64,
        length_cm: f64,
    ) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta_pm) {
            return Err(Error::InvalidInput(format!(
                "cut angle {theta_pm} rad outside [0, π/2]"
            )));
        }
        if !(length_cm > 0.0) || !length_cm.is_finite() {
            return Err(Error::InvalidInput(format!(
                "crystal length {length_cm} cm must be > 0"
            )));
        }
        if !(pump_nm > 0.0) {
            return Err(Error::InvalidInput(format!(
                "pump wavelength {pump_nm} nm must be > 0"
            )));
        }
        let (lo, hi) = crystal.transparency_um();
        for um in [pump_nm * 1e-3, 3.0 * pump_nm * 1e-3] {
            if um < lo || um > hi {
                return Err(Error::OutOfRange {
                    lambda_um: um,
                    min_um: lo,
                    max_um: hi,
                });
            }
        }
        Ok(PhaseMatchSetup {
            crystal,
            pump_nm,
            pm_type,
            theta_pm,
            length_cm,
        })
    }

    /// Solves for the phase-matching angle and builds the setup there.
    pub fn phase_matched(
        crystal: CrystalModel,
        pump_nm: f64,
        pm_type: PmType,
        length_cm: f64,
    ) -> Result<Self> {
        let angle = find_pm_angle(&crystal, pump_nm, pm_type)?;
        Self::new(crystal, pump_nm, pm_type, angle.theta, length_cm)
    }

    pub fn with_length(&self, length_cm: f64) -> Result<Self> {
        Self::new(
            self.crystal.clone(),
            self.pump_nm,
            self.pm_type,
            self.theta_pm,
            length_cm,
        )
    }

    pub fn omega_p(&self) -> f64 {
        omega_from_nm(self.pump_nm)
    }

    /// Degenerate frequency ω_p/3.
    pub fn omega_0(&self) -> f64 {
        self.omega_p() / 3.0
    }

    pub fn pump_lambda_cm(&self) -> f64 {
        self.pump_nm * CM_PER_NM
    }

    pub fn k_p(&self) -> Result<f64> {
        self.crystal
            .wavevector(self.pm_type.pump, self.omega_p(), self.theta_pm)
    }

    /// The three collinear photons at ω_p/3.
    pub fn degenerate_modes(&self) -> [OpticalMode; 3] {
        let w = self.omega_0();
        self.pm_type.generated.map(|p| OpticalMode::collinear(w, p))
    }

    /// Wave number of each degenerate photon, in the order of `generated()`.
    pub fn degenerate_k(&self) -> Result<[f64; 3]> {
        let w = self.omega_0();
        let g = self.pm_type.generated;
        Ok([
            self.crystal.wavevector(g[0], w, self.theta_pm)?,
            self.crystal.wavevector(g[1], w, self.theta_pm)?,
            self.crystal.wavevector(g[2], w, self.theta_pm)?,
        ])
    }

    /// Degenerate-point indices (n₁, n₂, n₃, n_p).
    pub fn degenerate_indices(&self) -> Result<[f64; 4]> {
        let g = self.pm_type.generated;
        let l3 = 3.0 * self.pump_lambda_cm();
        let c = &self.crystal;
        Ok([
            c.refractive_index(g[0], l3, self.theta_pm)?,
            c.refractive_index(g[1], l3, self.theta_pm)?,
            c.refractive_index(g[2], l3, self.theta_pm)?,
            c.refractive_index(self.pm_type.pump, self.pump_lambda_cm(), self.theta_pm)?,
        ])
    }

    fn check_phase_matched(&self) -> Result<f64> {
        let kp = self.k_p()?;
        let r = delta_kz_exact(self, &self.degenerate_modes())?;
        if r.abs() > PM_RESIDUAL_REL * kp {
            return Err(Error::NotPhaseMatched { residual: r.abs() });
        }
        Ok(kp)
    }
}

/// Exact Δk_z = k_z1 + k_z2 + k_z3 − k_p for three generated modes.
///
/// The modes may come in any order but must carry the setup's generated
/// polarizations and conserve energy and transverse momentum.
pub fn delta_kz_exact(setup: &PhaseMatchSetup, modes: &[OpticalMode; 3]) -> Result<f64> {
    let wp = setup.omega_p();
    let kp = setup.k_p()?;
    let w_sum: f64 = modes.iter().map(|m| m.omega).sum();
    if (w_sum - wp).abs() > 1e-9 * wp {
        return Err(Error::ConservationViolated(format!(
            "Σω = {w_sum:e} rad/s differs from ω_p = {wp:e} rad/s"
        )));
    }
    let qx: f64 = modes.iter().map(|m| m.q[0]).sum();
    let qy: f64 = modes.iter().map(|m| m.q[1]).sum();
    let q_scale = modes
        .iter()
        .map(|m| m.q[0].hypot(m.q[1]))
        .fold(0.0, f64::max)
        .max(kp * 1e-12);
    if qx.hypot(qy) > 1e-9 * q_scale {
        return Err(Error::ConservationViolated(format!(
            "Σq = ({qx:e}, {qy:e}) rad/cm is not zero"
        )));
    }
    let mut pols = modes.map(|m| m.polarization);
    pols.sort_by_key(|p| matches!(p, Polarization::Extraordinary));
    if pols != setup.pm_type.generated {
        return Err(Error::InvalidInput(format!(
            "mode polarizations do not match {}",
            setup.pm_type
        )));
    }
    let mut sum = 0.0;
    for m in modes {
        sum += setup.crystal.kz(m, setup.theta_pm)?;
    }
    Ok(sum - kp)
}

fn collinear_mismatch(
    crystal: &CrystalModel,
    pump_nm: f64,
    pm_type: PmType,
    theta: f64,
) -> Result<f64> {
    let wp = omega_from_nm(pump_nm);
    let w = wp / 3.0;
    let mut sum = 0.0;
    for p in pm_type.generated {
        sum += crystal.wavevector(p, w, theta)?;
    }
    Ok(sum - crystal.wavevector(pm_type.pump, wp, theta)?)
}

/// Result of [`find_pm_angle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PmAngle {
    pub theta: f64,
    /// |Δk_z| at the returned angle, rad/cm.
    pub residual: f64,
    pub k_p: f64,
    /// Set when the mismatch does not depend on the angle.
    pub degenerate: bool,
}

/// Collinear degenerate phase-matching angle by bisection on [0, π/2].
pub fn find_pm_angle(crystal: &CrystalModel, pump_nm: f64, pm_type: PmType) -> Result<PmAngle> {
    let no_match = || Error::NoPhaseMatch {
        crystal: crystal.name.clone(),
        pump_nm,
        pm_type: pm_type.to_string(),
    };
    let f = |t: f64| collinear_mismatch(crystal, pump_nm, pm_type, t);
    let kp_at = |t: f64| crystal.wavevector(pm_type.pump, omega_from_nm(pump_nm), t);
    if pm_type.is_angle_independent() {
        let r = f(0.0)?;
        let kp = kp_at(0.0)?;
        if r.abs() <= PM_RESIDUAL_REL * kp {
            return Ok(PmAngle {
                theta: 0.0,
                residual: r.abs(),
                k_p: kp,
                degenerate: true,
            });
        }
        return Err(no_match());
    }
    let f0 = f(0.0)?;
    let f1 = f(FRAC_PI_2)?;
    if f0.signum() == f1.signum() && f0 != 0.0 && f1 != 0.0 {
        return Err(no_match());
    }
    let theta = bisect(f, 0.0, FRAC_PI_2, 1e-15)?;
    let residual = f(theta)?.abs();
    let kp = kp_at(theta)?;
    if residual > PM_RESIDUAL_REL * kp {
        return Err(no_match());
    }
    Ok(PmAngle {
        theta,
        residual,
        k_p: kp,
        degenerate: false,
    })
}

/// Type-I expansion Δk_z ≈ βΩ_Σ² − αq_Σ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorType1 {
    /// cm (3/(2k_p)).
    pub alpha: f64,
    /// −½ × mean of ∂²k_z/∂q_y² over the generated photons, cm.
    pub alpha_curvature: f64,
    /// ½ ∂²k/∂ω², s²/cm.
    pub beta: f64,
    /// λ³ n''(λ) / (4πc²), s²/cm.
    pub beta_index_form: f64,
    pub k_p: f64,
}

impl TaylorType1 {
    pub fn delta_kz(&self, omega_sigma: f64, q_sigma: f64) -> f64 {
        self.beta * omega_sigma * omega_sigma - self.alpha * q_sigma * q_sigma
    }

    /// √(β/α); errors when the locus does not exist.
    pub fn locus_slope(&self) -> Result<f64> {
        let ratio = self.beta / self.alpha;
        if !(ratio > 0.0) {
            return Err(Error::NoLocus { ratio });
        }
        Ok(ratio.sqrt())
    }
}

pub fn taylor_type1(setup: &PhaseMatchSetup) -> Result<TaylorType1> {
    if setup.pm_type.kind() != PmKind::TypeI {
        return Err(Error::WrongPmKind {
            expected: "type-I",
            got: setup.pm_type.to_string(),
        });
    }
    let kp = setup.check_phase_matched()?;
    let pol = setup.pm_type.generated[0];
    let w = setup.omega_0();
    let c = &setup.crystal;
    let k2 = c.k_derivative(
        pol,
        setup.theta_pm,
        w,
        DerivOrder::Second,
        DerivVariable::Omega,
        [0.0; 2],
    )?;
    let lam = 3.0 * setup.pump_lambda_cm();
    let n2 = c.index_curvature(pol, lam, setup.theta_pm)?;
    let mut curv = 0.0;
    for p in setup.pm_type.generated {
        curv += c
            .k_derivative(
                p,
                setup.theta_pm,
                w,
                DerivOrder::Second,
                DerivVariable::Qy,
                [0.0; 2],
            )?
            .value;
    }
    Ok(TaylorType1 {
        alpha: 1.5 / kp,
        alpha_curvature: -0.5 * curv / 3.0,
        beta: 0.5 * k2.value,
        beta_index_form: lam.powi(3) * n2.value / (4.0 * std::f64::consts::PI * C_CGS * C_CGS),
        k_p: kp,
    })
}

/// Type-II expansion Δk_z ≈ β₊Ω₊ − α₊q₊ + quadratic transverse terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorType2 {
    /// ∂k/∂ω of the ordinary and extraordinary degenerate photons, s/cm.
    pub beta_o: f64,
    pub beta_e: f64,
    /// ∂k_z/∂q_x of the odd photon minus that of the pair (walk-off slope).
    pub alpha_e: f64,
    /// ∂²k_z/∂q_y² of the ordinary and extraordinary photons, cm.
    pub gamma_oy: f64,
    pub gamma_ey: f64,
    /// Mean of `gamma_oy` and `gamma_ey`.
    pub gamma: f64,
    pub gamma_spread: f64,
    pub gamma_warning: bool,
    pub beta_plus: f64,
    pub alpha_plus: f64,
    pub pair: Polarization,
    pub single: Polarization,
    pub k_p: f64,
}

impl TaylorType2 {
    pub fn delta_kz(&self, omega_plus: f64, q_plus: f64) -> f64 {
        self.beta_plus * omega_plus - self.alpha_plus * q_plus
    }

    /// Walk-off-limited length 4π|γ|/α_e², cm.
    pub fn l_min(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.gamma.abs() / (self.alpha_e * self.alpha_e)
    }
}

pub fn taylor_type2(setup: &PhaseMatchSetup) -> Result<TaylorType2> {
    let (pair, single) = setup
        .pm_type
        .pair_and_single()
        .ok_or_else(|| Error::WrongPmKind {
            expected: "type-II",
            got: setup.pm_type.to_string(),
        })?;
    let kp = setup.check_phase_matched()?;
    let c = &setup.crystal;
    let w = setup.omega_0();
    let th = setup.theta_pm;
    let d = |p: Polarization, order, var| {
        c.k_derivative(p, th, w, order, var, [0.0; 2])
            .map(|d| d.value)
    };
    let beta_o = d(
        Polarization::Ordinary,
        DerivOrder::First,
        DerivVariable::Omega,
    )?;
    let beta_e = d(
        Polarization::Extraordinary,
        DerivOrder::First,
        DerivVariable::Omega,
    )?;
    let slope = |p: Polarization| -> Result<f64> {
        match p {
            Polarization::Ordinary => Ok(0.0),
            Polarization::Extraordinary => d(p, DerivOrder::First, DerivVariable::Qx),
        }
    };
    let alpha_e = slope(single)? - slope(pair)?;
    let gamma_oy = d(
        Polarization::Ordinary,
        DerivOrder::Second,
        DerivVariable::Qy,
    )?;
    let gamma_ey = d(
        Polarization::Extraordinary,
        DerivOrder::Second,
        DerivVariable::Qy,
    )?;
    let gamma = 0.5 * (gamma_oy + gamma_ey);
    let gamma_spread = (gamma_oy - gamma_ey).abs() / gamma.abs();
    let (beta_pair, beta_single) = match pair {
        Polarization::Ordinary => (beta_o, beta_e),
        Polarization::Extraordinary => (beta_e, beta_o),
    };
    Ok(TaylorType2 {
        beta_o,
        beta_e,
        alpha_e,
        gamma_oy,
        gamma_ey,
        gamma,
        gamma_spread,
        gamma_warning: gamma_spread > GAMMA_SPREAD_WARN,
        beta_plus: SQRT_2 * (beta_pair - beta_single),
        alpha_plus: SQRT_2 * alpha_e,
        pair,
        single,
        k_p: kp,
    })
}

/// Either expansion, chosen by the setup's phase-matching kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TaylorCoefficients {
    TypeI(TaylorType1),
    TypeII(TaylorType2),
}

pub fn taylor(setup: &PhaseMatchSetup) -> Result<TaylorCoefficients> {
    match setup.pm_type.kind() {
        PmKind::TypeI => taylor_type1(setup).map(TaylorCoefficients::TypeI),
        PmKind::TypeII => taylor_type2(setup).map(TaylorCoefficients::TypeII),
    }
}

/// Grid for [`pm_map`]. Type-I axes run over [0, max]; type-II over [−max, max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapGrid {
    pub n_omega: usize,
    pub n_q: usize,
    /// rad/s
    pub omega_max: f64,
    /// rad/cm
    pub q_max: f64,
}

/// sinc²(Δk_z l/2) over (Ω_Σ, q_Σ) or (Ω₊, q₊), with the Δk_z = 0 locus.
#[derive(Debug, Clone, PartialEq)]
pub struct PmMap {
    pub kind: PmKind,
    pub omega: Vec<f64>,
    pub q: Vec<f64>,
    /// Row-major, one row per Ω node.
    pub values: Vec<f64>,
    pub locus: Vec<(f64, f64)>,
}

fn axis(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn pm_map(setup: &PhaseMatchSetup, grid: &MapGrid) -> Result<PmMap> {
    if grid.n_omega < 2 || grid.n_q < 2 || !(grid.omega_max > 0.0) || !(grid.q_max > 0.0) {
        return Err(Error::InvalidInput(
            "map grid needs ≥ 2 nodes and positive extents".into(),
        ));
    }
    let l = setup.length_cm;
    #[allow(clippy::type_complexity)]
    let (kind, omega, q, dk, locus): (_, _, _, Box<dyn Fn(f64, f64) -> f64>, Vec<(f64, f64)>) =
        match taylor(setup)? {
            TaylorCoefficients::TypeI(t) => {
                let slope = t.locus_slope()?;
                let omega = axis(grid.n_omega, 0.0, grid.omega_max);
                let locus = omega
                    .iter()
                    .map(|&w| (w, w * slope))
                    .filter(|&(_, q)| q <= grid.q_max)
                    .collect();
                (
                    PmKind::TypeI,
                    omega,
                    axis(grid.n_q, 0.0, grid.q_max),
                    Box::new(move |w, q| t.delta_kz(w, q)),
                    locus,
                )
            }
            TaylorCoefficients::TypeII(t) => {
                let omega = axis(grid.n_omega, -grid.omega_max, grid.omega_max);
                let locus = if t.alpha_plus == 0.0 {
                    Vec::new()
                } else {
                    omega
                        .iter()
                        .map(|&w| (w, t.beta_plus * w / t.alpha_plus))
                        .filter(|&(_, q)| q.abs() <= grid.q_max)
                        .collect()
                };
                (
                    PmKind::TypeII,
                    omega,
                    axis(grid.n_q, -grid.q_max, grid.q_max),
                    Box::new(move |w, q| t.delta_kz(w, q)),
                    locus,
                )
            }
        };
    let mut values = Vec::with_capacity(omega.len() * q.len());
    for &w in &omega {
        for &qq in &q {
            values.push(sinc2(dk(w, qq) * l / 2.0));
        }
    }
    Ok(PmMap {
        kind,
        omega,
        q,
        values,
        locus,
    })
}

impl PmMap {
    pub fn value(&self, i_omega: usize, i_q: usize) -> f64 {
        self.values[i_omega * self.q.len() + i_q]
    }

    /// `omega_var,q_var,sinc2` with Ω in rad/s and q in rad/cm.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "omega_var,q_var,sinc2")?;
        for (i, w) in self.omega.iter().enumerate() {
            for (j, q) in self.q.iter().enumerate() {
                writeln!(out, "{w:e},{q:e},{:e}", self.value(i, j))?;
            }
        }
        Ok(())
    }

    pub fn write_locus_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "omega_var,q_var")?;
        for (w, q) in &self.locus {
            writeln!(out, "{w:e},{q:e}")?;
        }
        Ok(())
    }
}

/// Vacuum wavelength of the degenerate photons in µm.
pub fn triplet_wavelength_um(pump_nm: f64) -> f64 {
    3.0 * pump_nm * CM_PER_NM / CM_PER_UM
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{builtin_crystal, CALCITE, RUTILE};
    use crate::dispersion::SellmeierFit;

    fn calcite_setup(pump: f64) -> PhaseMatchSetup {
        PhaseMatchSetup::phase_matched(builtin_crystal(CALCITE).unwrap(), pump, PmType::E_OOE, 0.01)
            .unwrap()
    }

    #[test]
    fn pm_type_parsing() {
        assert_eq!("e->ooe".parse::<PmType>().unwrap(), PmType::E_OOE);
        assert_eq!("e→oeo".parse::<PmType>().unwrap(), PmType::E_OOE);
        assert_eq!("o->eee".parse::<PmType>().unwrap(), PmType::O_EEE);
        assert_eq!(PmType::E_OEE.to_string(), "e->oee");
        assert!("x->ooe".parse::<PmType>().is_err());
        assert!("e->oo".parse::<PmType>().is_err());
        assert_eq!(PmType::O_EEE.kind(), PmKind::TypeI);
        assert_eq!(
            PmType::E_OEE.pair_and_single(),
            Some((Polarization::Extraordinary, Polarization::Ordinary))
        );
    }

    #[test]
    fn calcite_266_angle_matches_grid_scan() {
        let calcite = builtin_crystal(CALCITE).unwrap();
        let a = find_pm_angle(&calcite, 266.0, PmType::E_OOE).unwrap();
        assert!(a.residual <= PM_RESIDUAL_REL * a.k_p);
        // brute-force sign scan on a 1e-4 rad grid
        let mut prev = collinear_mismatch(&calcite, 266.0, PmType::E_OOE, 0.0).unwrap();
        let mut bracket = None;
        for i in 1..=15_708 {
            let t = i as f64 * 1e-4;
            let v = collinear_mismatch(&calcite, 266.0, PmType::E_OOE, t).unwrap();
            if v.signum() != prev.signum() {
                bracket = Some((t - 1e-4, t));
                break;
            }
            prev = v;
        }
        let (lo, hi) = bracket.unwrap();
        assert!(
            a.theta >= lo && a.theta <= hi,
            "{} not in [{lo}, {hi}]",
            a.theta
        );
    }

    #[test]
    fn calcite_all_types_match_at_532() {
        let calcite = builtin_crystal(CALCITE).unwrap();
        for t in [PmType::E_OOO, PmType::E_OOE, PmType::E_OEE] {
            let a = find_pm_angle(&calcite, 532.0, t).unwrap();
            assert!(a.residual <= PM_RESIDUAL_REL * a.k_p, "{t}");
        }
    }

    #[test]
    fn all_ordinary_is_degenerate_or_unmatched() {
        let calcite = builtin_crystal(CALCITE).unwrap();
        let t = PmType::new(Polarization::Ordinary, [Polarization::Ordinary; 3]);
        assert!(matches!(
            find_pm_angle(&calcite, 532.0, t),
            Err(Error::NoPhaseMatch { .. })
        ));
        let flat = CrystalModel::new(
            "flat",
            SellmeierFit::constant(1.5, (0.2, 3.0)).unwrap(),
            SellmeierFit::constant(1.6, (0.2, 3.0)).unwrap(),
            vec![],
            0.1,
            true,
        )
        .unwrap();
        let a = find_pm_angle(&flat, 532.0, t).unwrap();
        assert!(a.degenerate);
    }

    #[test]
    fn exact_mismatch_zero_at_root() {
        let s = calcite_setup(266.0);
        let r = delta_kz_exact(&s, &s.degenerate_modes()).unwrap();
        assert!(r.abs() <= PM_RESIDUAL_REL * s.k_p().unwrap());
    }

    #[test]
    fn conservation_enforced() {
        let s = calcite_setup(266.0);
        let mut m = s.degenerate_modes();
        m[0].omega *= 1.001;
        assert!(matches!(
            delta_kz_exact(&s, &m),
            Err(Error::ConservationViolated(_))
        ));
        let mut m = s.degenerate_modes();
        m[0].q = [10.0, 0.0];
        assert!(matches!(
            delta_kz_exact(&s, &m),
            Err(Error::ConservationViolated(_))
        ));
    }

    #[test]
    fn alpha_identity_and_beta_forms() {
        let rutile = builtin_crystal(RUTILE).unwrap();
        let s = PhaseMatchSetup::phase_matched(rutile, 532.0, PmType::O_EEE, 10.0).unwrap();
        let t = taylor_type1(&s).unwrap();
        assert!((t.alpha * t.k_p - 1.5).abs() <= 2.0 * f64::EPSILON);
        assert!((t.beta_index_form / t.beta - 1.0).abs() < 1e-3);
        assert!((t.alpha_curvature / t.alpha - 1.0).abs() < 0.2);
    }

    #[test]
    fn dispersionless_beta_vanishes() {
        let flat = CrystalModel::new(
            "flat",
            SellmeierFit::constant(1.5, (0.2, 3.0)).unwrap(),
            SellmeierFit::constant(1.5, (0.2, 3.0)).unwrap(),
            vec![],
            0.1,
            true,
        )
        .unwrap();
        let s = PhaseMatchSetup::new(flat, 532.0, PmType::E_OOO, 0.3, 1.0).unwrap();
        let t = taylor_type1(&s).unwrap();
        // real crystals sit near 1e-28 s²/cm
        assert!(t.beta.abs() < 1e-33, "{:e}", t.beta);
    }

    #[test]
    fn type2_coefficients_calcite() {
        let s = calcite_setup(532.0);
        let t = taylor_type2(&s).unwrap();
        assert!(t.alpha_e > 0.0);
        assert!(!t.gamma_warning);
        // group-velocity mismatch with a different step
        let w = s.omega_0();
        let h = 3e-4 * w;
        let k = |p, x| s.crystal.wavevector(p, x, s.theta_pm).unwrap();
        let gvm = (k(Polarization::Ordinary, w + h)
            - k(Polarization::Ordinary, w - h)
            - k(Polarization::Extraordinary, w + h)
            + k(Polarization::Extraordinary, w - h))
            / (2.0 * h);
        assert!(((t.beta_o - t.beta_e) / gvm - 1.0).abs() < 1e-5);
    }

    #[test]
    fn walkoff_vanishes_on_principal_axes() {
        for theta in [0.0, FRAC_PI_2] {
            let calcite = builtin_crystal(CALCITE).unwrap();
            let w = omega_from_nm(798.0);
            let d = calcite
                .k_derivative(
                    Polarization::Extraordinary,
                    theta,
                    w,
                    DerivOrder::First,
                    DerivVariable::Qx,
                    [0.0; 2],
                )
                .unwrap();
            let k = calcite
                .wavevector(Polarization::Extraordinary, w, theta)
                .unwrap();
            assert!(d.value.abs() < 1e-9, "θ={theta}: {} (k={k})", d.value);
        }
    }

    #[test]
    fn wrong_kind_rejected() {
        let s = calcite_setup(532.0);
        assert!(matches!(taylor_type1(&s), Err(Error::WrongPmKind { .. })));
        let off = PhaseMatchSetup::new(
            s.crystal.clone(),
            532.0,
            PmType::E_OOE,
            s.theta_pm + 0.01,
            0.01,
        )
        .unwrap();
        assert!(matches!(
            taylor_type2(&off),
            Err(Error::NotPhaseMatched { .. })
        ));
    }

    #[test]
    fn map_locus_is_unity() {
        let rutile = builtin_crystal(RUTILE).unwrap();
        let s = PhaseMatchSetup::phase_matched(rutile, 532.0, PmType::O_EEE, 10.0).unwrap();
        let t = taylor_type1(&s).unwrap();
        let grid = MapGrid {
            n_omega: 21,
            n_q: 21,
            omega_max: 2e14,
            q_max: 2e14 * t.locus_slope().unwrap(),
        };
        let m = pm_map(&s, &grid).unwrap();
        assert_eq!(m.values.len(), 441);
        // the diagonal of this grid is the locus
        for i in 0..21 {
            assert!((m.value(i, i) - 1.0).abs() < 1e-9);
        }
        let mut csv = Vec::new();
        m.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv)
            .unwrap()
            .starts_with("omega_var,q_var,sinc2\n"));
    }

    #[test]
    fn type2_map_locus() {
        let s = calcite_setup(266.0);
        let t = taylor_type2(&s).unwrap();
        let grid = MapGrid {
            n_omega: 11,
            n_q: 11,
            omega_max: 1e13,
            q_max: 1e4,
        };
        let m = pm_map(&s, &grid).unwrap();
        for (w, q) in &m.locus {
            assert!(
                (t.beta_plus * w - t.alpha_plus * q).abs()
                    <= 1e-9 * (t.beta_plus * w).abs().max(1e-300)
            );
        }
    }
}
