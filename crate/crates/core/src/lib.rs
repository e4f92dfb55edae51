//! Three-photon generation rates for third-order spontaneous parametric
//! down-conversion in bulk uniaxial crystals, and the measurement times needed
//! to see the triplets over detector noise.
//!
//! Internally everything is Gaussian CGS (cm, s, erg, esu); SI units appear
//! only in function names and fields that say so (`_nm`, `_w`, `_hz`, `_days`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod data;
pub mod dispersion;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod phasematch;
pub mod planner;
pub mod rates;
pub mod table1;
pub mod units;

pub use dispersion::{CrystalModel, OpticalMode, Polarization, SellmeierFit};
pub use error::{Error, Result};
pub use phasematch::{PhaseMatchSetup, PmKind, PmType};
pub use planner::{DetectorModel, ExperimentPlan, PlanConfig, SplitterConfig};
pub use rates::{DetectionWindow, ModeStructure, RateResult};
