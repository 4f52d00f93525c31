//! `diagnose`: restricted eigenvalues, restricted correlations and the
//! sufficient conditions of a CSV design.

use gfr_core::diagnostics::{
    check_coverage_condition, check_recovery_condition, restricted_correlation, restricted_eigenvalues,
    ConditionCheck, RecoveryCheck, RestrictedCorrelation,
};
use serde::{Deserialize, Serialize};

use crate::args::DiagnoseArgs;
use crate::error::{CliError, Result};
use crate::screen::{load_dataset, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub s: usize,
    pub phi: f64,
    #[serde(rename = "Phi")]
    pub phi_max: f64,
    /// `max(Phi(s) - 1, 1 - phi(s))`
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub p0: usize,
    pub j: usize,
    pub k0: usize,
    pub beta_min: f64,
    #[serde(flatten)]
    pub check: ConditionCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryEntry {
    pub p0: usize,
    pub j: usize,
    pub eta: f64,
    #[serde(flatten)]
    pub check: RecoveryCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseReport {
    pub schema_version: u32,
    pub data: String,
    pub n: usize,
    pub p: usize,
    pub standardize: bool,
    pub spectra: Vec<SpectrumEntry>,
    pub correlations: Vec<RestrictedCorrelation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coverage: Option<CoverageEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub recovery: Option<RecoveryEntry>,
}

pub fn cmd_diagnose(args: &DiagnoseArgs) -> Result<DiagnoseReport> {
    let dataset = load_dataset(&args.data, args.response.as_deref(), args.standardize)?;
    let x = &dataset.x;
    if args.s == 0 {
        return Err(CliError::Usage("--s must be positive".into()));
    }
    let spectra = (1..=args.s.min(x.p()))
        .map(|s| {
            let r = restricted_eigenvalues(x, s)?;
            Ok(SpectrumEntry {
                s,
                phi: r.phi,
                phi_max: r.phi_max,
                delta: (r.phi_max - 1.0).max(1.0 - r.phi),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let correlations = args
        .theta
        .iter()
        .map(|&(s1, s2)| Ok(restricted_correlation(x, s1, s2)?))
        .collect::<Result<Vec<_>>>()?;

    let coverage = match (args.k0, args.beta_min) {
        (None, None) => None,
        (Some(k0), Some(beta_min)) => {
            let p0 = args.p0.ok_or_else(|| CliError::Usage("--k0 needs --p0".into()))?;
            let y = dataset
                .y
                .as_ref()
                .ok_or_else(|| CliError::Usage("the coverage check needs --response".into()))?;
            Some(CoverageEntry {
                p0,
                j: args.j,
                k0,
                beta_min,
                check: check_coverage_condition(x, y, beta_min, p0, args.j, k0)?,
            })
        }
        _ => return Err(CliError::Usage("--k0 and --beta-min go together".into())),
    };
    let recovery = match args.eta {
        None => None,
        Some(eta) => {
            let p0 = args.p0.ok_or_else(|| CliError::Usage("--eta needs --p0".into()))?;
            Some(RecoveryEntry {
                p0,
                j: args.j,
                eta,
                check: check_recovery_condition(x, p0, args.j, eta)?,
            })
        }
    };
    Ok(DiagnoseReport {
        schema_version: SCHEMA_VERSION,
        data: args.data.display().to_string(),
        n: x.n(),
        p: x.p(),
        standardize: args.standardize,
        spectra,
        correlations,
        coverage,
        recovery,
    })
}
