//! Site occupancies of selected eigenstates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::LatticeParams;
use crate::spectral::{occupancies, order_eigenpairs, solve_dense};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDump {
    /// Positions in the (Re, Im)-ordered spectrum.
    pub indices: Vec<usize>,
    pub eigenvalues: Vec<Complex64>,
    /// `profiles[i][j] = |⟨j|φ_i⟩|²`, normalised to unit sum.
    pub profiles: Vec<Vec<f64>>,
    pub participation: Vec<f64>,
    /// Interior local minima of each profile, a proxy for nodes.
    pub nodes: Vec<usize>,
}

/// `1 / Σ p_j²` for a normalised occupancy vector: about `L` for extended
/// states, order one for localised ones.
pub fn participation_ratio(p: &[f64]) -> f64 {
    1.0 / p.iter().map(|x| x * x).sum::<f64>()
}

fn count_minima(p: &[f64]) -> usize {
    p.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count()
}

/// Profiles of the ordered eigenstates at `indices`, or of all of them.
pub fn dump_eigenstate_profiles(
    l: usize,
    q: usize,
    gamma: f64,
    indices: Option<&[usize]>,
) -> Result<ProfileDump> {
    let spec = order_eigenpairs(&solve_dense(&LatticeParams::absorbing(l, q, gamma)?, true)?);
    let all: Vec<usize> = (0..l).collect();
    let indices = indices.unwrap_or(&all).to_vec();
    if let Some(&bad) = indices.iter().find(|&&i| i >= l) {
        return Err(Error::InvalidParameter(format!("eigenstate index {bad} not in [0, {l})")));
    }
    let vecs = spec.eigenvectors.as_ref().expect("vectors requested");
    let profiles: Vec<Vec<f64>> = indices.iter().map(|&i| occupancies(&vecs[i])).collect();
    Ok(ProfileDump {
        eigenvalues: indices.iter().map(|&i| spec.eigenvalues[i]).collect(),
        participation: profiles.iter().map(|p| participation_ratio(p)).collect(),
        nodes: profiles.iter().map(|p| count_minima(p)).collect(),
        indices,
        profiles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn participation_extremes() {
        assert!((participation_ratio(&[0.25; 4]) - 4.0).abs() < 1e-15);
        assert_eq!(participation_ratio(&[1.0, 0.0, 0.0]), 1.0);
    }

    #[test]
    fn rejects_bad_index() {
        assert!(dump_eigenstate_profiles(10, 5, 1.0, Some(&[10])).is_err());
    }
}
