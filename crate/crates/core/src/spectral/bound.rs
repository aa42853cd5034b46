//! The impurity-bound eigenstate split off from the band.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{occupancies, Spectrum};
use crate::experiments::{fit_localization_length, LocFit};
use crate::{Error, Result};

/// `|Re λ|` below this counts as purely imaginary.
const AXIS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateInfo {
    pub eigenvalue: Complex64,
    pub index: usize,
    /// Normalised site occupancies `|ψ_j|^2`.
    pub profile: Vec<f64>,
    pub fit: LocFit,
}

impl BoundStateInfo {
    pub fn alpha(&self) -> f64 {
        self.fit.alpha
    }
}

/// Index of the bound state.
///
/// Absorbing impurity (`γ > 2`): the most negative `Im λ` among eigenvalues
/// on the imaginary axis. Real impurity: the eigenvalue furthest outside
/// `[-2, 2]`.
pub fn select_bound_state(spec: &Spectrum) -> Result<usize> {
    let u = spec.params.impurity;
    let ev = &spec.eigenvalues;
    if spec.params.is_real() {
        ev.iter()
            .enumerate()
            .filter(|(_, z)| z.re.abs() > 2.0)
            .max_by(|a, b| a.1.re.abs().total_cmp(&b.1.re.abs()))
            .map(|(i, _)| i)
            .ok_or(Error::NoBoundState)
    } else {
        if -u.im <= 2.0 {
            return Err(Error::NoBoundState);
        }
        ev.iter()
            .enumerate()
            .filter(|(_, z)| z.re.abs() < AXIS_TOL)
            .min_by(|a, b| a.1.im.total_cmp(&b.1.im))
            .map(|(i, _)| i)
            .ok_or(Error::NoBoundState)
    }
}

/// Bound state with its occupancy profile and fitted localisation length.
/// Needs eigenvectors.
pub fn bound_state(spec: &Spectrum) -> Result<BoundStateInfo> {
    let vecs = spec
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("bound state needs eigenvectors".into()))?;
    let index = select_bound_state(spec)?;
    let profile = occupancies(&vecs[index]);
    let fit = fit_localization_length(&profile, spec.params.q)?;
    Ok(BoundStateInfo { eigenvalue: spec.eigenvalues[index], index, profile, fit })
}
