//! Recomputes the ten published configurations and prints them next to the
//! published rates and measurement times.

use tospdc::data::{builtin_crystals, builtin_detectors};
use tospdc::oracle::QuadratureSpec;
use tospdc::table1::evaluate;

fn main() -> tospdc::Result<()> {
    let rows = evaluate(
        &builtin_crystals(),
        &builtin_detectors(),
        Some(&QuadratureSpec::default()),
    )?;
    println!(
        "{:>3} {:>10} {:>10} {:>7} {:>10} {:>10} {:>10} {:>10} {:>8}",
        "row", "R_T(Hz)", "paper", "ratio", "T3(days)", "paper", "T2(days)", "paper", "I/I_num"
    );
    for r in &rows {
        let p = &r.row.paper;
        println!(
            "{:>3} {:>10.2e} {:>10.2e} {:>7.3} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e} {:>8.3}",
            r.row.id,
            r.computed.r_t_hz,
            p.r_t_hz,
            r.ratios.r_t,
            r.computed.t3.days.unwrap_or(f64::INFINITY),
            p.t3_days,
            r.computed.t2.days.unwrap_or(f64::INFINITY),
            p.t2_days,
            r.closed_over_numeric.unwrap_or(f64::NAN),
        );
    }
    println!("\nplanner fed with the published R_T (T3 and T2 over published):");
    for r in &rows {
        println!(
            "{:>3} {:>7.3} {:>7.3}",
            r.row.id, r.planner_ratios.t3, r.planner_ratios.t2
        );
    }
    Ok(())
}
