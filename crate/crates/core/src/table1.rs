//! The ten published configurations and their recomputation.

use serde::Serialize;

use crate::data::{find_crystal, find_detector, CALCITE, RUTILE};
use crate::dispersion::CrystalModel;
use crate::error::Result;
use crate::oracle::{integral_i_numeric, QuadratureSpec};
use crate::phasematch::{PhaseMatchSetup, PmType};
use crate::planner::{
    plan, DetectorModel, ExperimentPlan, Feasibility, FeasibilityThresholds, PlanConfig,
};
use crate::units::mm_to_cm;

/// Pump-intensity enhancement used for the "+" cavity rows.
pub const CAVITY_FACTOR: f64 = 1000.0;

/// Published values for one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PaperValues {
    pub chi3_esu: f64,
    #[serde(rename = "R_T_hz")]
    pub r_t_hz: f64,
    pub t3_days: f64,
    pub t2_days: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub id: usize,
    pub pump_nm: f64,
    pub crystal: &'static str,
    pub pm_type: PmType,
    pub pump_power_w: f64,
    pub detector: &'static str,
    pub length_mm: f64,
    pub cavity: bool,
    pub paper: PaperValues,
}

#[allow(clippy::too_many_arguments)]
const fn row(
    id: usize,
    pump_nm: f64,
    crystal: &'static str,
    pm_type: PmType,
    pump_power_w: f64,
    detector: &'static str,
    length_mm: f64,
    cavity: bool,
    paper: [f64; 4],
) -> Table1Row {
    Table1Row {
        id,
        pump_nm,
        crystal,
        pm_type,
        pump_power_w,
        detector,
        length_mm,
        cavity,
        paper: PaperValues {
            chi3_esu: paper[0],
            r_t_hz: paper[1],
            t3_days: paper[2],
            t2_days: paper[3],
        },
    }
}

#[rustfmt::skip]
pub const ROWS: [Table1Row; 10] = [
    row(1, 266.0, CALCITE, PmType::E_OOE, 10.0, "Si APD", 0.1, false, [0.32e-15, 4.0e-5, 94.0, 15.0]),
    row(2, 266.0, CALCITE, PmType::E_OOE, 10.0, "Si APD", 0.1, true, [0.32e-15, 4.0e-2, 9.4e-2, 1.4e-2]),
    row(3, 325.0, CALCITE, PmType::E_OOE, 0.05, "Si APD", 0.1, true, [0.59e-15, 1.1e-5, 5200.0, 750.0]),
    row(4, 325.0, CALCITE, PmType::E_OOE, 0.05, "Super Conductive", 0.1, true, [0.59e-15, 3.4e-6, 18000.0, 1000.0]),
    row(5, 405.0, CALCITE, PmType::E_OOE, 0.5, "PMD", 0.1, true, [0.76e-15, 1.8e-4, 8.1e10, 2.0e11]),
    row(6, 405.0, CALCITE, PmType::E_OOE, 0.5, "Super Conductive", 0.1, true, [0.76e-15, 9.5e-6, 6200.0, 370.0]),
    row(7, 532.0, CALCITE, PmType::E_OOE, 10.0, "PMD", 0.1, true, [0.88e-15, 1.8e-4, 8.2e10, 2.0e11]),
    row(8, 532.0, CALCITE, PmType::E_OOE, 10.0, "Super Conductive", 0.1, true, [0.88e-15, 5.0e-6, 1200.0, 690.0]),
    row(9, 532.0, RUTILE, PmType::O_EEE, 10.0, "PMD", 100.0, false, [71.6e-15, 1.5e-2, 1.1e7, 2.8e7]),
    row(10, 532.0, RUTILE, PmType::O_EEE, 10.0, "Super Conductive", 0.77, false, [71.6e-15, 8.9e-7, 6.6e4, 3.9e3]),
];

impl Table1Row {
    pub fn setup(&self, crystals: &[CrystalModel]) -> Result<PhaseMatchSetup> {
        let crystal = find_crystal(crystals, self.crystal)?;
        PhaseMatchSetup::phase_matched(
            crystal,
            self.pump_nm,
            self.pm_type,
            mm_to_cm(self.length_mm),
        )
    }

    pub fn plan_config(
        &self,
        crystals: &[CrystalModel],
        detectors: &[DetectorModel],
    ) -> Result<PlanConfig> {
        let detector = find_detector(detectors, self.detector)?;
        let mut cfg = PlanConfig::new(self.setup(crystals)?, detector, self.pump_power_w);
        cfg.cavity = self.cavity.then_some(CAVITY_FACTOR);
        Ok(cfg)
    }

    pub fn paper_t3_feasibility(&self) -> Feasibility {
        FeasibilityThresholds::default().classify(Some(self.paper.t3_days))
    }

    pub fn paper_t2_feasibility(&self) -> Feasibility {
        FeasibilityThresholds::default().classify(Some(self.paper.t2_days))
    }
}

/// Computed / paper ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ratios {
    #[serde(rename = "R_T")]
    pub r_t: f64,
    pub t3: f64,
    pub t2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowResult {
    pub row: Table1Row,
    /// End-to-end plan from the dispersion data.
    pub computed: ExperimentPlan,
    /// Plan driven by the published R_T.
    pub from_paper_rate: ExperimentPlan,
    pub ratios: Ratios,
    /// Planner-only T₃, T₂ over the published values.
    pub planner_ratios: Ratios,
    /// Numeric window integral and closed form / numeric, when requested.
    pub numeric_i_cgs: Option<f64>,
    pub closed_over_numeric: Option<f64>,
}

fn days(p: &ExperimentPlan, order: u8) -> f64 {
    let c = if order == 3 { &p.t3 } else { &p.t2 };
    c.days.unwrap_or(f64::INFINITY)
}

pub fn evaluate_row(
    row: &Table1Row,
    crystals: &[CrystalModel],
    detectors: &[DetectorModel],
    quadrature: Option<&QuadratureSpec>,
) -> Result<RowResult> {
    let cfg = row.plan_config(crystals, detectors)?;
    let computed = plan(&cfg)?;
    let from_paper_rate = plan(&PlanConfig {
        rt_override_hz: Some(row.paper.r_t_hz),
        ..cfg.clone()
    })?;
    let (numeric_i_cgs, closed_over_numeric) = match quadrature {
        Some(spec) => {
            let window = cfg.detector.window(&cfg.setup);
            let numeric = integral_i_numeric(&cfg.setup, &window, spec)?;
            let closed = computed
                .rate
                .as_ref()
                .map_or(f64::NAN, |r| r.integral_i_cgs);
            (Some(numeric), Some(closed / numeric))
        }
        None => (None, None),
    };
    let p = &row.paper;
    Ok(RowResult {
        row: *row,
        ratios: Ratios {
            r_t: computed.r_t_hz / p.r_t_hz,
            t3: days(&computed, 3) / p.t3_days,
            t2: days(&computed, 2) / p.t2_days,
        },
        planner_ratios: Ratios {
            r_t: 1.0,
            t3: days(&from_paper_rate, 3) / p.t3_days,
            t2: days(&from_paper_rate, 2) / p.t2_days,
        },
        computed,
        from_paper_rate,
        numeric_i_cgs,
        closed_over_numeric,
    })
}

pub fn evaluate(
    crystals: &[CrystalModel],
    detectors: &[DetectorModel],
    quadrature: Option<&QuadratureSpec>,
) -> Result<Vec<RowResult>> {
    ROWS.iter()
        .map(|r| evaluate_row(r, crystals, detectors, quadrature))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{builtin_crystals, builtin_detectors};

    #[test]
    fn rows_use_tabulated_chi3() {
        let crystals = builtin_crystals();
        for r in &ROWS {
            let c = find_crystal(&crystals, r.crystal).unwrap();
            assert_eq!(
                c.chi3(r.pump_nm, r.pm_type).unwrap(),
                r.paper.chi3_esu,
                "row {}",
                r.id
            );
        }
    }

    #[test]
    fn paper_colors() {
        use Feasibility::*;
        let t3: Vec<_> = ROWS.iter().map(|r| r.paper_t3_feasibility()).collect();
        assert_eq!(
            t3,
            [Yellow, Green, Yellow, Yellow, Red, Yellow, Red, Yellow, Red, Red]
        );
    }

    #[test]
    fn first_rows_planner_exact() {
        let res = evaluate(&builtin_crystals(), &builtin_detectors(), None).unwrap();
        for r in &res[..2] {
            assert!(
                (r.planner_ratios.t3 - 1.0).abs() < 0.1,
                "{:?}",
                r.planner_ratios
            );
        }
        assert!((res[1].planner_ratios.t2 - 1.0).abs() < 0.1);
    }
}
