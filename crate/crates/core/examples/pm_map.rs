//! Writes the sinc² phase-matching map of a 10 cm rutile crystal pumped at
//! 532 nm, with its exact-phase-matching locus, as CSV files.

use std::fs::File;
use std::io::BufWriter;

use tospdc::data::{builtin_crystal, RUTILE};
use tospdc::phasematch::{pm_map, taylor_type1, MapGrid, PhaseMatchSetup, PmType};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let setup =
        PhaseMatchSetup::phase_matched(builtin_crystal(RUTILE)?, 532.0, PmType::O_EEE, 10.0)?;
    let slope = taylor_type1(&setup)?.locus_slope()?;
    let omega_max = 0.02 * setup.omega_0();
    let grid = MapGrid {
        n_omega: 301,
        n_q: 301,
        omega_max,
        q_max: 1.5 * slope * omega_max,
    };
    let map = pm_map(&setup, &grid)?;
    let dir = std::env::temp_dir();
    let (m, l) = (dir.join("rutile_map.csv"), dir.join("rutile_locus.csv"));
    map.write_csv(BufWriter::new(File::create(&m)?))?;
    map.write_locus_csv(BufWriter::new(File::create(&l)?))?;
    println!("{} grid points -> {}", map.values.len(), m.display());
    println!("{} locus points -> {}", map.locus.len(), l.display());
    Ok(())
}
