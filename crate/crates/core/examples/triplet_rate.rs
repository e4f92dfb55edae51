//! Total triplet rate for calcite and rutile, its length dependence, and the
//! length chosen by the selection rules.

use tospdc::data::{builtin_crystal, builtin_detectors, find_detector, CALCITE, RUTILE};
use tospdc::phasematch::{PhaseMatchSetup, PmType};
use tospdc::rates::{optimal_length, total_rate};

fn main() -> tospdc::Result<()> {
    let detectors = builtin_detectors();
    let cases = [
        (CALCITE, 266.0, PmType::E_OOE, "Si APD"),
        (RUTILE, 532.0, PmType::O_EEE, "PMD"),
        (RUTILE, 532.0, PmType::O_EEE, "sc"),
    ];
    for (name, pump_nm, pm_type, det) in cases {
        let det = find_detector(&detectors, det)?;
        println!("{name} {pm_type} at {pump_nm} nm, {} window", det.name);
        for length_mm in [0.1, 1.0, 10.0] {
            let setup = PhaseMatchSetup::phase_matched(
                builtin_crystal(name)?,
                pump_nm,
                pm_type,
                length_mm / 10.0,
            )?;
            let r = total_rate(&setup, &det.window(&setup), 1.0, None)?;
            println!(
                "  l = {length_mm:>5} mm  R_T = {:.3e} Hz per W  (limited by {:?})",
                r.r_t_hz, r.limiting_factor
            );
        }
        let setup = PhaseMatchSetup::phase_matched(builtin_crystal(name)?, pump_nm, pm_type, 0.1)?;
        let best = optimal_length(&setup, &det.window(&setup))?;
        println!(
            "  chosen length {:.3} mm ({:?})",
            best.length_cm * 10.0,
            best.rule
        );
    }
    Ok(())
}
