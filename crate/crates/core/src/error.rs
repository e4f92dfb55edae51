use thiserror::Error;

/// Errors raised by the physics and planning layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("wavelength {lambda_um:.6} µm outside fit range [{min_um}, {max_um}] µm")]
    OutOfRange {
        lambda_um: f64,
        min_um: f64,
        max_um: f64,
    },
    #[error("dispersion fit gives non-physical index n² = {n_squared} at {lambda_um} µm")]
    NonPhysicalIndex { lambda_um: f64, n_squared: f64 },
    #[error("finite-difference stencil needs {needed_um:.6} µm of margin inside the fit range")]
    RangeTooNarrow { needed_um: f64 },
    #[error("{what} did not converge (estimate {estimate:e}, error {error:e})")]
    NonConverged {
        what: &'static str,
        estimate: f64,
        error: f64,
    },
    #[error("transverse wave vector {q:e} rad/cm does not propagate (k = {k:e} rad/cm)")]
    EvanescentMode { q: f64, k: f64 },
    #[error("conservation violated: {0}")]
    ConservationViolated(String),
    #[error("no collinear phase matching for {pm_type} at {pump_nm} nm in {crystal}")]
    NoPhaseMatch {
        crystal: String,
        pump_nm: f64,
        pm_type: String,
    },
    #[error("setup is not at its phase-matching angle (|Δk_z| = {residual:e} rad/cm)")]
    NotPhaseMatched { residual: f64 },
    #[error("β/α = {ratio:e} < 0: no exact phase-matching locus")]
    NoLocus { ratio: f64 },
    #[error("expected a {expected} phase-matching type, got {got}")]
    WrongPmKind { expected: &'static str, got: String },
    #[error("walk-off slope |α_e| = {0:e} too small for the thin-crystal width formula")]
    DegenerateWalkoff(f64),
    #[error("detection window is empty: {0}")]
    EmptyWindow(String),
    #[error("crystal {0} does not allow a pump cavity")]
    CavityNotAllowed(String),
    #[error("no χ(3)_eff entry for {pm_type} at {pump_nm} nm in {crystal}")]
    MissingChi3 {
        crystal: String,
        pump_nm: f64,
        pm_type: String,
    },
    #[error("signal rate is zero: measurement time unbounded")]
    ZeroSignal,
    #[error("triplet wavelength {triplet_nm} nm outside detector {detector} range [{min_nm}, {max_nm}] nm")]
    WavelengthMismatch {
        detector: String,
        triplet_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
