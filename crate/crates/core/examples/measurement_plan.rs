//! Measurement times for single, double and triple coincidences, and how the
//! triple-coincidence time depends on detector efficiency.

use tospdc::data::{builtin_crystal, builtin_detectors, find_detector, CALCITE};
use tospdc::phasematch::{PhaseMatchSetup, PmType};
use tospdc::planner::{plan, render_table, PlanConfig};

fn main() -> tospdc::Result<()> {
    let setup =
        PhaseMatchSetup::phase_matched(builtin_crystal(CALCITE)?, 266.0, PmType::E_OOE, 0.01)?;
    let si = find_detector(&builtin_detectors(), "si")?;
    let mut plans = Vec::new();
    for eta in [0.1, 0.3, 0.5, 0.7] {
        let mut cfg = PlanConfig::new(setup.clone(), si.with_eta(eta)?, 10.0);
        cfg.cavity = Some(1000.0);
        let p = plan(&cfg)?;
        println!(
            "η = {eta}: T1 = {:.2e} s, T2 = {:.2e} s, T3 = {:.2e} s ({})",
            p.t1.seconds.unwrap_or(f64::INFINITY),
            p.t2.seconds.unwrap_or(f64::INFINITY),
            p.t3.seconds.unwrap_or(f64::INFINITY),
            p.t3.feasibility.word()
        );
        plans.push(p);
    }
    println!("\n{}", render_table(&plans));
    Ok(())
}
