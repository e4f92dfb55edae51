//! Uniaxial dispersion: Sellmeier-type fits, angle-dependent extraordinary
//! index, wave vectors and their finite-difference derivatives.

use std::cell::RefCell;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{central_richardson, DerivOrder, Derivative};
use crate::phasematch::PmType;
use crate::units::{wavelength_cm_from_omega, CM_PER_UM, C_CGS};

/// Functional form of a dispersion fit; λ is in µm in every form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitForm {
    /// n² = A + Σ Bᵢ λ² / (λ² − Cᵢ); coefficients `[A, B1, C1, B2, C2, …]`.
    Sellmeier,
    /// n² = A + Σ Bᵢ / (λ² − Cᵢ); coefficients `[A, B1, C1, …]`.
    Pole,
    /// n = Σ aᵢ λⁱ; coefficients `[a0, a1, …]`. Used for synthetic media.
    Polynomial,
}

/// A dispersion fit restricted to the wavelength range it was made for.
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierFit {
    form: FitForm,
    coefficients: Vec<f64>,
    valid_range_um: (f64, f64),
}

impl SellmeierFit {
    pub fn new(form: FitForm, coefficients: Vec<f64>, valid_range_um: (f64, f64)) -> Result<Self> {
        let (lo, hi) = valid_range_um;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::InvalidInput(format!(
                "valid range [{lo}, {hi}] µm is not an increasing positive interval"
            )));
        }
        let n = coefficients.len();
        let ok = match form {
            FitForm::Sellmeier | FitForm::Pole => n >= 1 && n % 2 == 1,
            FitForm::Polynomial => n >= 1,
        };
        if !ok || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "{n} coefficients do not fit the {form:?} form"
            )));
        }
        let fit = SellmeierFit {
            form,
            coefficients,
            valid_range_um,
        };
        // n > 1 across the whole range
        for i in 0..=256 {
            let lambda = lo + (hi - lo) * i as f64 / 256.0;
            let n = fit.index(lambda)?;
            if n <= 1.0 {
                return Err(Error::NonPhysicalIndex {
                    lambda_um: lambda,
                    n_squared: n * n,
                });
            }
        }
        Ok(fit)
    }

    /// Wavelength-independent index, handy for test media.
    pub fn constant(n: f64, valid_range_um: (f64, f64)) -> Result<Self> {
        Self::new(FitForm::Polynomial, vec![n], valid_range_um)
    }

    pub fn form(&self) -> FitForm {
        self.form
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn valid_range_um(&self) -> (f64, f64) {
        self.valid_range_um
    }

    pub fn contains(&self, lambda_um: f64) -> bool {
        lambda_um >= self.valid_range_um.0 && lambda_um <= self.valid_range_um.1
    }

    /// Refractive index at `lambda_um`; never extrapolates.
    pub fn index(&self, lambda_um: f64) -> Result<f64> {
        if !self.contains(lambda_um) {
            return Err(Error::OutOfRange {
                lambda_um,
                min_um: self.valid_range_um.0,
                max_um: self.valid_range_um.1,
            });
        }
        let c = &self.coefficients;
        let l2 = lambda_um * lambda_um;
        let n_squared = match self.form {
            FitForm::Sellmeier => {
                c[0] + c[1..]
                    .chunks(2)
                    .map(|bc| bc[0] * l2 / (l2 - bc[1]))
                    .sum::<f64>()
            }
            FitForm::Pole => c[0] + c[1..].chunks(2).map(|bc| bc[0] / (l2 - bc[1])).sum::<f64>(),
            FitForm::Polynomial => {
                let n = c.iter().rev().fold(0.0, |acc, a| acc * lambda_um + a);
                n * n
            }
        };
        if !(n_squared > 0.0) || !n_squared.is_finite() {
            return Err(Error::NonPhysicalIndex {
                lambda_um,
                n_squared,
            });
        }
        Ok(n_squared.sqrt())
    }
}

/// Polarization eigenmode of a uniaxial crystal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "o")]
    Ordinary,
    #[serde(rename = "e")]
    Extraordinary,
}

impl Polarization {
    pub fn letter(self) -> char {
        match self {
            Polarization::Ordinary => 'o',
            Polarization::Extraordinary => 'e',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'o' | 'O' => Some(Polarization::Ordinary),
            'e' | 'E' => Some(Polarization::Extraordinary),
            _ => None,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "o" | "ordinary" => Ok(Polarization::Ordinary),
            "e" | "extraordinary" => Ok(Polarization::Extraordinary),
            other => Err(Error::InvalidInput(format!(
                "unknown polarization {other:?}"
            ))),
        }
    }
}

/// One plane-wave mode inside the crystal: frequency, polarization and the
/// wave-vector component transverse to the pump axis z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalMode {
    pub omega: f64,
    pub polarization: Polarization,
    /// (q_x, q_y) in rad/cm; the optic axis lies in the xz plane.
    pub q: [f64; 2],
}

impl OpticalMode {
    pub fn collinear(omega: f64, polarization: Polarization) -> Self {
        OpticalMode {
            omega,
            polarization,
            q: [0.0, 0.0],
        }
    }
}

/// Variable for [`CrystalModel::k_derivative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivVariable {
    Omega,
    Qx,
    Qy,
}

/// Tabulated effective χ(3) for one pump wavelength and polarization set.
#[derive(Debug, Clone, PartialEq)]
pub struct Chi3Entry {
    pub pump_nm: f64,
    pub pm_type: PmType,
    pub value_esu: f64,
}

/// A uniaxial crystal: two principal dispersion fits plus nonlinear and
/// geometric data.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalModel {
    pub name: String,
    pub n_o: SellmeierFit,
    pub n_e_principal: SellmeierFit,
    pub chi3_eff: Vec<Chi3Entry>,
    pub walk_off_rho: f64,
    pub cavity_allowed: bool,
}

/// Base relative step for first derivatives.
pub const FIRST_DERIV_STEP: f64 = 1e-5;
/// Base relative step for second derivatives; smaller steps lose the
/// curvature to round-off.
pub const SECOND_DERIV_STEP: f64 = 1e-2;
pub const RICHARDSON_LEVELS: usize = 2;
pub const DERIV_REL_TOL: f64 = 1e-6;

impl CrystalModel {
    pub fn new(
        name: impl Into<String>,
        n_o: SellmeierFit,
        n_e_principal: SellmeierFit,
        chi3_eff: Vec<Chi3Entry>,
        walk_off_rho: f64,
        cavity_allowed: bool,
    ) -> Result<Self> {
        if !(walk_off_rho > 0.0) {
            return Err(Error::InvalidInput(format!(
                "walk_off_rho = {walk_off_rho} must be > 0"
            )));
        }
        if let Some(bad) = chi3_eff
            .iter()
            .find(|e| !(e.value_esu >= 0.0) || !(e.pump_nm > 0.0))
        {
            return Err(Error::InvalidInput(format!(
                "χ(3) entry {} at {} nm must be non-negative",
                bad.value_esu, bad.pump_nm
            )));
        }
        Ok(CrystalModel {
            name: name.into(),
            n_o,
            n_e_principal,
            chi3_eff,
            walk_off_rho,
            cavity_allowed,
        })
    }

    /// Wavelength interval (µm) where both fits are valid.
    pub fn transparency_um(&self) -> (f64, f64) {
        let (a, b) = self.n_o.valid_range_um();
        let (c, d) = self.n_e_principal.valid_range_um();
        (a.max(c), b.min(d))
    }

    pub fn chi3(&self, pump_nm: f64, pm_type: PmType) -> Result<f64> {
        self.chi3_eff
            .iter()
            .find(|e| e.pm_type == pm_type && (e.pump_nm - pump_nm).abs() <= 0.5)
            .map(|e| e.value_esu)
            .ok_or_else(|| Error::MissingChi3 {
                crystal: self.name.clone(),
                pump_nm,
                pm_type: pm_type.to_string(),
            })
    }

    fn principal_indices(&self, lambda_cm: f64) -> Result<(f64, f64)> {
        let um = lambda_cm / CM_PER_UM;
        Ok((self.n_o.index(um)?, self.n_e_principal.index(um)?))
    }

    fn index_unchecked_angle(&self, pol: Polarization, lambda_cm: f64, theta: f64) -> Result<f64> {
        let um = lambda_cm / CM_PER_UM;
        match pol {
            Polarization::Ordinary => self.n_o.index(um),
            Polarization::Extraordinary => {
                let (no, ne) = self.principal_indices(lambda_cm)?;
                let (s, c) = theta.sin_cos();
                Ok((c * c / (no * no) + s * s / (ne * ne)).powf(-0.5))
            }
        }
    }

    /// Index for a wave travelling at `theta` to the optic axis.
    pub fn refractive_index(&self, pol: Polarization, lambda_cm: f64, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        self.index_unchecked_angle(pol, lambda_cm, theta)
    }

    pub fn index_at_omega(&self, pol: Polarization, omega: f64, theta: f64) -> Result<f64> {
        check_omega(omega)?;
        self.refractive_index(pol, wavelength_cm_from_omega(omega), theta)
    }

    /// k = n ω / c in rad/cm.
    pub fn wavevector(&self, pol: Polarization, omega: f64, theta: f64) -> Result<f64> {
        Ok(self.index_at_omega(pol, omega, theta)? * omega / C_CGS)
    }

    /// Longitudinal component k_z of a mode in a crystal whose optic axis
    /// sits at `theta_axis` from z inside the xz plane.
    ///
    /// The extraordinary index is evaluated at the actual propagation
    /// direction implied by q, which makes k_z the positive root of a
    /// quadratic (index ellipsoid).
    pub fn kz(&self, mode: &OpticalMode, theta_axis: f64) -> Result<f64> {
        check_omega(mode.omega)?;
        let (no, ne) = self.principal_indices(wavelength_cm_from_omega(mode.omega))?;
        let big_k = mode.omega / C_CGS;
        let [qx, qy] = mode.q;
        let q2 = qx * qx + qy * qy;
        let (a, b) = match mode.polarization {
            Polarization::Ordinary => (1.0 / (no * no), 1.0 / (no * no)),
            Polarization::Extraordinary => (1.0 / (no * no), 1.0 / (ne * ne)),
        };
        let (s, c) = theta_axis.sin_cos();
        let a2 = a * c * c + b * s * s;
        let b1 = 2.0 * (a - b) * s * c * qx;
        let c0 = (a - b) * qx * qx * s * s + b * q2 - big_k * big_k;
        let disc = b1 * b1 - 4.0 * a2 * c0;
        let k_axis = big_k / a2.sqrt();
        if disc < 0.0 {
            return Err(Error::EvanescentMode {
                q: q2.sqrt(),
                k: k_axis,
            });
        }
        let kz = (-b1 + disc.sqrt()) / (2.0 * a2);
        if !(kz > 0.0) {
            return Err(Error::EvanescentMode {
                q: q2.sqrt(),
                k: k_axis,
            });
        }
        Ok(kz)
    }

    /// Finite-difference derivative of k_z(ω, q) with two Richardson levels.
    ///
    /// Steps are relative: δω = s·ω for ω, δq = s·k for q, where s is
    /// [`FIRST_DERIV_STEP`] or [`SECOND_DERIV_STEP`].
    pub fn k_derivative(
        &self,
        pol: Polarization,
        theta_axis: f64,
        omega0: f64,
        order: DerivOrder,
        variable: DerivVariable,
        q0: [f64; 2],
    ) -> Result<Derivative> {
        check_theta(theta_axis)?;
        check_omega(omega0)?;
        let rel = match order {
            DerivOrder::First => FIRST_DERIV_STEP,
            DerivOrder::Second => SECOND_DERIV_STEP,
        };
        let mode = |omega: f64, q: [f64; 2]| OpticalMode {
            omega,
            polarization: pol,
            q,
        };
        let base = self.kz(&mode(omega0, q0), theta_axis)?;
        let (h, eval): (f64, Box<dyn Fn(f64) -> Result<f64> + '_>) = match variable {
            DerivVariable::Omega => {
                let h = rel * omega0;
                let (lo, hi) = self.transparency_um();
                let w_max = omega0 + 3.0 * h;
                let w_min = omega0 - 3.0 * h;
                let l_short = wavelength_cm_from_omega(w_max) / CM_PER_UM;
                let l_long = wavelength_cm_from_omega(w_min) / CM_PER_UM;
                if l_short < lo || l_long > hi {
                    return Err(Error::RangeTooNarrow {
                        needed_um: l_long - l_short,
                    });
                }
                (h, Box::new(move |w| self.kz(&mode(w, q0), theta_axis)))
            }
            DerivVariable::Qx => (
                rel * base,
                Box::new(move |x| self.kz(&mode(omega0, [x, q0[1]]), theta_axis)),
            ),
            DerivVariable::Qy => (
                rel * base,
                Box::new(move |y| self.kz(&mode(omega0, [q0[0], y]), theta_axis)),
            ),
        };
        let x0 = match variable {
            DerivVariable::Omega => omega0,
            DerivVariable::Qx => q0[0],
            DerivVariable::Qy => q0[1],
        };
        let first_err = RefCell::new(None);
        let d = central_richardson(
            |x| match eval(x) {
                Ok(v) => v,
                Err(e) => {
                    first_err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            x0,
            h,
            order,
            RICHARDSON_LEVELS,
        );
        if let Some(e) = first_err.into_inner() {
            return Err(e);
        }
        let power = match order {
            DerivOrder::First => 1,
            DerivOrder::Second => 2,
        };
        let roundoff = 1e3 * f64::EPSILON * base.abs() / h.powi(power);
        if !(d.error <= DERIV_REL_TOL * d.value.abs() + roundoff) {
            return Err(Error::NonConverged {
                what: "k derivative",
                estimate: d.value,
                error: d.error,
            });
        }
        Ok(d)
    }

    /// ∂²n/∂λ² in cm⁻² at vacuum wavelength `lambda_cm`.
    pub fn index_curvature(
        &self,
        pol: Polarization,
        lambda_cm: f64,
        theta: f64,
    ) -> Result<Derivative> {
        check_theta(theta)?;
        let h = SECOND_DERIV_STEP * lambda_cm;
        let (lo, hi) = self.transparency_um();
        if (lambda_cm - 3.0 * h) / CM_PER_UM < lo || (lambda_cm + 3.0 * h) / CM_PER_UM > hi {
            return Err(Error::RangeTooNarrow {
                needed_um: 6.0 * h / CM_PER_UM,
            });
        }
        let first_err = RefCell::new(None);
        let d = central_richardson(
            |l| match self.index_unchecked_angle(pol, l, theta) {
                Ok(v) => v,
                Err(e) => {
                    first_err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            lambda_cm,
            h,
            DerivOrder::Second,
            RICHARDSON_LEVELS,
        );
        match first_err.into_inner() {
            Some(e) => Err(e),
            None => Ok(d),
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::InvalidInput(format!(
            "angle to optic axis {theta} rad outside [0, π/2]"
        )));
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidInput(format!("ω = {omega} must be positive")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{builtin_crystal, CALCITE, RUTILE};
    use crate::units::{nm_to_cm, omega_from_nm};
    use std::f64::consts::PI;

    fn synthetic(no: f64, ne: f64) -> CrystalModel {
        CrystalModel::new(
            "synthetic",
            SellmeierFit::constant(no, (0.2, 3.0)).unwrap(),
            SellmeierFit::constant(ne, (0.2, 3.0)).unwrap(),
            vec![],
            0.1,
            true,
        )
        .unwrap()
    }

    #[test]
    fn calcite_ordinary_sodium_line() {
        // n² − 1 = 0.73358749 + 0.96464345 λ²/(λ² − 0.0194325203) + 1.82831454 λ²/(λ² − 120)
        let l2: f64 = 0.5893 * 0.5893;
        let hand = (1.0
            + 0.733_587_49
            + 0.964_643_45 * l2 / (l2 - 1.943_252_03e-2)
            + 1.828_314_54 * l2 / (l2 - 120.0))
            .sqrt();
        let calcite = builtin_crystal(CALCITE).unwrap();
        let n = calcite
            .refractive_index(Polarization::Ordinary, nm_to_cm(589.3), 0.7)
            .unwrap();
        assert!((n - hand).abs() < 1e-12);
        assert!((n - 1.658).abs() < 1e-3, "n_o(589.3) = {n}");
    }

    #[test]
    fn rutile_ordinary_1596_two_evaluations() {
        let rutile = builtin_crystal(RUTILE).unwrap();
        let n = rutile
            .refractive_index(Polarization::Ordinary, nm_to_cm(1596.0), 0.0)
            .unwrap();
        let l2: f64 = 1.596 * 1.596;
        let hand = (5.913 + 0.2441 / (l2 - 0.0803)).sqrt();
        assert!((n - hand).abs() < 1e-12, "{n} vs {hand}");
    }

    #[test]
    fn extraordinary_on_axis_is_ordinary() {
        for crystal in [
            builtin_crystal(CALCITE).unwrap(),
            builtin_crystal(RUTILE).unwrap(),
        ] {
            for nm in [600.0, 798.0, 1200.0] {
                let lam = nm_to_cm(nm);
                let o = crystal
                    .refractive_index(Polarization::Ordinary, lam, 0.0)
                    .unwrap();
                let e = crystal
                    .refractive_index(Polarization::Extraordinary, lam, 0.0)
                    .unwrap();
                assert!((o - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn out_of_range_is_an_error() {
        let calcite = builtin_crystal(CALCITE).unwrap();
        let err = calcite
            .refractive_index(Polarization::Ordinary, nm_to_cm(150.0), 0.0)
            .unwrap_err();
        assert!(matches!(err, Error::OutOfRange { .. }));
        assert!(calcite
            .refractive_index(Polarization::Ordinary, nm_to_cm(600.0), 2.0)
            .is_err());
    }

    #[test]
    fn wavevector_direct_formula() {
        let m = synthetic(1.5, 1.5);
        let w = omega_from_nm(600.0);
        let k = m.wavevector(Polarization::Ordinary, w, 0.3).unwrap();
        let want = 2.0 * PI * 1.5 / nm_to_cm(600.0);
        assert!((k / want - 1.0).abs() < 1e-14);
        assert!((k - 1.5708e5).abs() < 1e1);
        assert!(m.wavevector(Polarization::Ordinary, 0.0, 0.3).is_err());
    }

    #[test]
    fn calcite_wavevector_recomputed_from_parts() {
        let calcite = builtin_crystal(CALCITE).unwrap();
        let w = omega_from_nm(798.0);
        let k = calcite.wavevector(Polarization::Ordinary, w, 0.0).unwrap();
        let n = calcite
            .refractive_index(Polarization::Ordinary, nm_to_cm(798.0), 0.0)
            .unwrap();
        assert!((k / (n * w / C_CGS) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ordinary_qy_curvature_is_minus_inverse_k() {
        let calcite = builtin_crystal(CALCITE).unwrap();
        let w = omega_from_nm(798.0);
        let k = calcite.wavevector(Polarization::Ordinary, w, 0.8).unwrap();
        let d = calcite
            .k_derivative(
                Polarization::Ordinary,
                0.8,
                w,
                DerivOrder::Second,
                DerivVariable::Qy,
                [0.0, 0.0],
            )
            .unwrap();
        assert!((d.value * k + 1.0).abs() < 1e-8, "{}", d.value * k);
    }

    #[test]
    fn dispersionless_group_index() {
        let m = synthetic(1.7, 1.7);
        let w = omega_from_nm(800.0);
        let d = m
            .k_derivative(
                Polarization::Ordinary,
                0.0,
                w,
                DerivOrder::First,
                DerivVariable::Omega,
                [0.0, 0.0],
            )
            .unwrap();
        assert!((d.value * C_CGS / 1.7 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn polynomial_fit_matches_analytic_derivatives() {
        // n(λ) = 1.6 + 0.01 λ − 0.02 λ² (λ in µm), k(ω) = n(2πc/ω) ω / c
        let fit =
            SellmeierFit::new(FitForm::Polynomial, vec![1.6, 0.01, -0.02], (0.3, 2.5)).unwrap();
        let m = CrystalModel::new("poly", fit.clone(), fit, vec![], 0.1, false).unwrap();
        let w = omega_from_nm(900.0);
        let lam_um = 0.9;
        let n = 1.6 + 0.01 * lam_um - 0.02 * lam_um * lam_um;
        let dn_dlam = (0.01 - 0.04 * lam_um) / CM_PER_UM; // per cm
        let d2n_dlam2 = -0.04 / (CM_PER_UM * CM_PER_UM);
        let lam = lam_um * CM_PER_UM;
        // dk/dω = (n − λ dn/dλ)/c ; d²k/dω² = λ³/(2πc²) d²n/dλ²
        let k1 = (n - lam * dn_dlam) / C_CGS;
        let k2 = lam.powi(3) / (2.0 * PI * C_CGS * C_CGS) * d2n_dlam2;
        let d1 = m
            .k_derivative(
                Polarization::Ordinary,
                0.0,
                w,
                DerivOrder::First,
                DerivVariable::Omega,
                [0.0; 2],
            )
            .unwrap();
        let d2 = m
            .k_derivative(
                Polarization::Ordinary,
                0.0,
                w,
                DerivOrder::Second,
                DerivVariable::Omega,
                [0.0; 2],
            )
            .unwrap();
        assert!((d1.value / k1 - 1.0).abs() < 1e-8, "{} vs {}", d1.value, k1);
        assert!((d2.value / k2 - 1.0).abs() < 1e-8, "{} vs {}", d2.value, k2);
    }

    #[test]
    fn range_margin_enforced() {
        let m = synthetic(1.5, 1.5);
        // 2.999 µm sits within 3 steps of the 3.0 µm edge
        let w = crate::units::omega_from_wavelength_cm(2.999 * CM_PER_UM);
        let err = m
            .k_derivative(
                Polarization::Ordinary,
                0.0,
                w,
                DerivOrder::Second,
                DerivVariable::Omega,
                [0.0; 2],
            )
            .unwrap_err();
        assert!(matches!(err, Error::RangeTooNarrow { .. }));
    }

    #[test]
    fn kz_matches_tilted_index() {
        // a mode tilted by δ in the xz plane sees n_e(θ − δ) when the axis leans to +x
        let calcite = builtin_crystal(CALCITE).unwrap();
        let w = omega_from_nm(798.0);
        let theta = 0.8;
        let delta = 0.01;
        let n_tilt = calcite
            .index_at_omega(Polarization::Extraordinary, w, theta - delta)
            .unwrap();
        let k = n_tilt * w / C_CGS;
        let mode = OpticalMode {
            omega: w,
            polarization: Polarization::Extraordinary,
            q: [k * delta.sin(), 0.0],
        };
        let kz = calcite.kz(&mode, theta).unwrap();
        assert!((kz / (k * delta.cos()) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn evanescent_rejected() {
        let m = synthetic(1.5, 1.4);
        let w = omega_from_nm(800.0);
        let k = m.wavevector(Polarization::Ordinary, w, 0.0).unwrap();
        let mode = OpticalMode {
            omega: w,
            polarization: Polarization::Ordinary,
            q: [k * 1.01, 0.0],
        };
        assert!(matches!(
            m.kz(&mode, 0.3),
            Err(Error::EvanescentMode { .. })
        ));
    }

    #[test]
    fn nonphysical_fit_rejected() {
        assert!(SellmeierFit::constant(0.9, (0.4, 1.0)).is_err());
        assert!(SellmeierFit::new(FitForm::Sellmeier, vec![1.0, 2.0], (0.4, 1.0)).is_err());
        assert!(SellmeierFit::new(FitForm::Pole, vec![2.0], (1.0, 0.4)).is_err());
    }
}
