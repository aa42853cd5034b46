//! Parameter scans and analyses built on the spectral and dynamics layers.

mod classify;
mod localization;
mod profiles;
mod scan;
mod sweep;

pub use classify::{classify_central, classify_ep_structure, scan_q, EpClassification, EpStructure, FoundEp, QScanEntry};
pub use localization::{
    fit_localization_length, fit_localization_length_unchecked, map_gamma_to_v, GammaVMap, LocFit,
};
pub use profiles::{dump_eigenstate_profiles, participation_ratio, ProfileDump};
pub use scan::{extract_gamma_star, scan_gamma_star, scan_rta, GammaStarPoint, RtaDiagnostics, RtaScan, ScanPoint};
pub use sweep::{spectrum_sweep, SpectrumSweep};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanVariable {
    Gamma,
    K,
    Q,
    L,
}

/// Values of one scanned parameter; strictly increasing and non-empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub variable: ScanVariable,
    values: Vec<f64>,
}

impl ScanGrid {
    pub fn new(variable: ScanVariable, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("scan grid is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("scan grid must be finite and strictly increasing".into()));
        }
        Ok(Self { variable, values })
    }

    /// `n` evenly spaced points from `lo` to `hi` inclusive.
    pub fn linspace(variable: ScanVariable, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 1 {
            return Self::new(variable, vec![lo]);
        }
        let values = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        Self::new(variable, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
