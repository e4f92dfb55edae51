//! Defines a crystal from JSON and phase-matches it.

use tospdc::data::parse_crystal;
use tospdc::phasematch::{find_pm_angle, PmType};

const BBO_LIKE: &str = r#"{
    "name": "bbo-like",
    "fit_form": "pole",
    "coefficients_o": [2.7405, 0.0184, 0.0179],
    "coefficients_e": [2.3730, 0.0128, 0.0156],
    "valid_range_um": [0.22, 1.2],
    "chi3_eff_esu": [],
    "walk_off_rho": 0.07,
    "cavity_allowed": true
}"#;

fn main() -> tospdc::Result<()> {
    let crystal = parse_crystal(BBO_LIKE)?;
    for pm_type in [PmType::E_OOO, PmType::E_OOE, PmType::E_OEE] {
        match find_pm_angle(&crystal, 355.0, pm_type) {
            Ok(a) => println!("{pm_type}: θ_pm = {:.2}°", a.theta.to_degrees()),
            Err(e) => println!("{pm_type}: {e}"),
        }
    }
    Ok(())
}
