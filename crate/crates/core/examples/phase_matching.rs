//! Collinear phase-matching angles and Taylor coefficients for every crystal,
//! pump and polarization set listed in the crystal data.

use tospdc::data::builtin_crystals;
use tospdc::phasematch::{find_pm_angle, taylor, PhaseMatchSetup, TaylorCoefficients};

fn main() -> tospdc::Result<()> {
    for crystal in builtin_crystals() {
        for entry in &crystal.chi3_eff {
            let angle = find_pm_angle(&crystal, entry.pump_nm, entry.pm_type)?;
            println!(
                "{} {} at {} nm: θ_pm = {:.3}°, |Δk_z| = {:.1e} rad/cm",
                crystal.name,
                entry.pm_type,
                entry.pump_nm,
                angle.theta.to_degrees(),
                angle.residual
            );
            let setup = PhaseMatchSetup::new(
                crystal.clone(),
                entry.pump_nm,
                entry.pm_type,
                angle.theta,
                0.1,
            )?;
            match taylor(&setup)? {
                TaylorCoefficients::TypeI(t) => println!(
                    "    α = {:.4e} cm, β = {:.4e} s²/cm (index form {:.4e})",
                    t.alpha, t.beta, t.beta_index_form
                ),
                TaylorCoefficients::TypeII(t) => println!(
                    "    β_o − β_e = {:.4e} s/cm, α_e = {:.4}, γ = {:.4e} cm, l_min = {:.3} mm",
                    t.beta_o - t.beta_e,
                    t.alpha_e,
                    t.gamma,
                    t.l_min() * 10.0
                ),
            }
        }
    }
    Ok(())
}
