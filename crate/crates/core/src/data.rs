//! Crystal and detector data files, plus the built-in copies compiled into
//! the library.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dispersion::{Chi3Entry, CrystalModel, FitForm, SellmeierFit};
use crate::error::{Error, Result};
use crate::phasematch::PmType;
use crate::planner::DetectorModel;
use crate::rates::ModeStructure;
use crate::units::SECONDS_PER_PS;

pub const CALCITE: &str = "calcite";
pub const RUTILE: &str = "rutile";

const CALCITE_JSON: &str = include_str!("../data/crystals/calcite.json");
const RUTILE_JSON: &str = include_str!("../data/crystals/rutile.json");
const DETECTORS_JSON: &str = include_str!("../data/detectors.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chi3Record {
    pub pump_nm: f64,
    pub pm_type: PmType,
    pub value: f64,
}

/// On-disk crystal description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalFile {
    pub name: String,
    pub fit_form: FitForm,
    pub coefficients_o: Vec<f64>,
    pub coefficients_e: Vec<f64>,
    pub valid_range_um: [f64; 2],
    pub chi3_eff_esu: Vec<Chi3Record>,
    pub walk_off_rho: f64,
    pub cavity_allowed: bool,
}

impl CrystalFile {
    pub fn into_model(self) -> Result<CrystalModel> {
        let range = (self.valid_range_um[0], self.valid_range_um[1]);
        let n_o = SellmeierFit::new(self.fit_form, self.coefficients_o, range)?;
        let n_e = SellmeierFit::new(self.fit_form, self.coefficients_e, range)?;
        let chi3 = self
            .chi3_eff_esu
            .into_iter()
            .map(|r| Chi3Entry {
                pump_nm: r.pump_nm,
                pm_type: r.pm_type,
                value_esu: r.value,
            })
            .collect();
        CrystalModel::new(
            self.name,
            n_o,
            n_e,
            chi3,
            self.walk_off_rho,
            self.cavity_allowed,
        )
    }
}

pub fn parse_crystal(json: &str) -> Result<CrystalModel> {
    let file: CrystalFile = serde_json::from_str(json)
        .map_err(|e| Error::InvalidInput(format!("crystal file: {e}")))?;
    file.into_model()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn load_crystal(path: &Path) -> Result<CrystalModel> {
    parse_crystal(&read(path)?).map_err(|e| match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Loads one crystal file, or every `*.json` in a directory (sorted by name).
pub fn load_crystals(path: &Path) -> Result<Vec<CrystalModel>> {
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        files.iter().map(|p| load_crystal(p)).collect()
    } else {
        Ok(vec![load_crystal(path)?])
    }
}

pub fn builtin_crystals() -> Vec<CrystalModel> {
    [CALCITE_JSON, RUTILE_JSON]
        .iter()
        .map(|s| parse_crystal(s).expect("built-in crystal data is valid"))
        .collect()
}

pub fn builtin_crystal(name: &str) -> Result<CrystalModel> {
    find_crystal(&builtin_crystals(), name)
}

pub fn find_crystal(crystals: &[CrystalModel], name: &str) -> Result<CrystalModel> {
    crystals
        .iter()
        .find(|c| c.name.eq_ignore_ascii_case(name))
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("unknown crystal {name:?}")))
}

/// On-disk detector description; jitter in ps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorRecord {
    pub name: String,
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    pub modes: ModeStructure,
    pub eta: f64,
    pub eta_range: [f64; 2],
    pub dark_rate_hz: f64,
    pub jitter_ps: f64,
}

impl DetectorRecord {
    pub fn into_model(self) -> Result<DetectorModel> {
        DetectorModel::new(
            self.name,
            (self.lambda_min_nm, self.lambda_max_nm),
            self.modes,
            self.eta,
            (self.eta_range[0], self.eta_range[1]),
            self.dark_rate_hz,
            self.jitter_ps * SECONDS_PER_PS,
        )
    }
}

pub fn parse_detectors(json: &str) -> Result<Vec<DetectorModel>> {
    let records: Vec<DetectorRecord> = serde_json::from_str(json)
        .map_err(|e| Error::InvalidInput(format!("detector file: {e}")))?;
    records
        .into_iter()
        .map(DetectorRecord::into_model)
        .collect()
}

pub fn load_detectors(path: &Path) -> Result<Vec<DetectorModel>> {
    parse_detectors(&read(path)?).map_err(|e| match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn builtin_detectors() -> Vec<DetectorModel> {
    parse_detectors(DETECTORS_JSON).expect("built-in detector data is valid")
}

fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Finds a detector by name, ignoring case and punctuation. `sc`, `si` and
/// `ingaas` are accepted as short names.
pub fn find_detector(detectors: &[DetectorModel], key: &str) -> Result<DetectorModel> {
    let k = match normalize(key).as_str() {
        "sc" | "sspd" | "superconducting" | "supercond" => "superconductive".to_string(),
        "si" => "siapd".to_string(),
        "ingaas" => "ingaasapd".to_string(),
        other => other.to_string(),
    };
    detectors
        .iter()
        .find(|d| normalize(&d.name) == k)
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("unknown detector {key:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load() {
        let c = builtin_crystals();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].name, CALCITE);
        assert!(c[0].cavity_allowed && !c[1].cavity_allowed);
        assert_eq!(builtin_detectors().len(), 4);
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = CALCITE_JSON.replacen("\"walk_off_rho\"", "\"colour\": 1, \"walk_off_rho\"", 1);
        assert!(matches!(parse_crystal(&bad), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn chi3_lookup() {
        let c = builtin_crystal(CALCITE).unwrap();
        assert_eq!(c.chi3(266.0, PmType::E_OOE).unwrap(), 0.32e-15);
        assert!(matches!(
            c.chi3(266.0, PmType::E_OOO),
            Err(Error::MissingChi3 { .. })
        ));
        assert!(matches!(
            c.chi3(300.0, PmType::E_OOE),
            Err(Error::MissingChi3 { .. })
        ));
    }

    #[test]
    fn detector_aliases() {
        let d = builtin_detectors();
        assert_eq!(find_detector(&d, "sc").unwrap().name, "Super Conductive");
        assert_eq!(find_detector(&d, "si-apd").unwrap().name, "Si APD");
        assert_eq!(find_detector(&d, "PMD").unwrap().dark_rate_hz, 5e4);
        assert!(find_detector(&d, "bolometer").is_err());
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_crystal(Path::new("/nonexistent/x.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.json"));
    }
}
