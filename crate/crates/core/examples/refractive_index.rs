//! Ordinary and extraordinary indices, group index and group-velocity
//! dispersion of the built-in crystals at the degenerate triplet wavelength.

use tospdc::data::builtin_crystals;
use tospdc::dispersion::{DerivVariable, Polarization};
use tospdc::numeric::DerivOrder;
use tospdc::units::{nm_to_cm, omega_from_nm, C_CGS};

fn main() -> tospdc::Result<()> {
    for crystal in builtin_crystals() {
        let (lo, hi) = crystal.transparency_um();
        println!("{} (fit valid {lo}-{hi} µm)", crystal.name);
        for lambda_nm in [589.3, 798.0, 1596.0] {
            let w = omega_from_nm(lambda_nm);
            for pol in [Polarization::Ordinary, Polarization::Extraordinary] {
                let n = crystal.refractive_index(
                    pol,
                    nm_to_cm(lambda_nm),
                    std::f64::consts::FRAC_PI_2,
                )?;
                let d1 = crystal.k_derivative(
                    pol,
                    std::f64::consts::FRAC_PI_2,
                    w,
                    DerivOrder::First,
                    DerivVariable::Omega,
                    [0.0; 2],
                )?;
                let d2 = crystal.k_derivative(
                    pol,
                    std::f64::consts::FRAC_PI_2,
                    w,
                    DerivOrder::Second,
                    DerivVariable::Omega,
                    [0.0; 2],
                )?;
                println!(
                    "  {lambda_nm:>7.1} nm  {pol}  n = {n:.5}  n_g = {:.5}  k'' = {:.3e} s²/cm",
                    d1.value * C_CGS,
                    d2.value
                );
            }
        }
    }
    Ok(())
}
