//! Exponential fits to bound-state profiles and the `γ ↔ V` correspondence.

use serde::{Deserialize, Serialize};

use crate::lattice::{central_site, LatticeParams};
use crate::spectral::{occupancies, select_bound_state, solve_dense};
use crate::{Error, Result};

/// Sites within this distance of `q` are excluded (kink at the impurity).
const NEAR_Q: usize = 2;
/// Sites within this distance of either end are excluded.
const NEAR_EDGE: usize = 5;
const MIN_SITES_PER_SIDE: usize = 4;
/// Occupancies below this fraction of the peak are rounding noise.
const NOISE_FLOOR: f64 = 1e-20;
const MIN_R_SQUARED: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocFit {
    /// Amplitude decay length, `|ψ_j| ∝ e^{-|j-q|/α}`. Infinite when the
    /// profile does not decay.
    pub alpha: f64,
    pub r_squared: f64,
    /// First and last site (1-based) inside the window.
    pub window: (usize, usize),
    pub sites_left: usize,
    pub sites_right: usize,
}

/// Least-squares line through `ln |ψ_j|²` against `|j-q|`.
pub fn fit_localization_length(profile: &[f64], q: usize) -> Result<LocFit> {
    let fit = fit_localization_length_unchecked(profile, q)?;
    if fit.r_squared < MIN_R_SQUARED || !fit.alpha.is_finite() {
        return Err(Error::PoorFit { r_squared: fit.r_squared });
    }
    Ok(fit)
}

/// As [`fit_localization_length`] but without the goodness-of-fit check.
pub fn fit_localization_length_unchecked(profile: &[f64], q: usize) -> Result<LocFit> {
    let l = profile.len();
    if q < 1 || q > l {
        return Err(Error::InvalidQ { q, l });
    }
    let peak = profile.iter().copied().fold(0.0, f64::max);
    let floor = NOISE_FLOOR * peak;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let (mut left, mut right) = (0, 0);
    let (mut first, mut last) = (usize::MAX, 0);
    for j in (NEAR_EDGE + 1)..=l.saturating_sub(NEAR_EDGE) {
        let d = j.abs_diff(q);
        let w = profile[j - 1];
        if d <= NEAR_Q || !(w > floor) {
            continue;
        }
        if j < q {
            left += 1;
        } else {
            right += 1;
        }
        first = first.min(j);
        last = last.max(j);
        xs.push(d as f64);
        ys.push(w.ln());
    }
    if left < MIN_SITES_PER_SIDE || right < MIN_SITES_PER_SIDE {
        return Err(Error::WindowTooSmall { left, right });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };
    let alpha = if slope < 0.0 { -2.0 / slope } else { f64::INFINITY };
    Ok(LocFit { alpha, r_squared, window: (first, last), sites_left: left, sites_right: right })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaVMap {
    pub l: usize,
    /// `(γ, V)` with equal bound-state localisation lengths.
    pub pairs: Vec<(f64, f64)>,
}

const V_LO: f64 = 1e-6;
const V_TOL: f64 = 1e-8;

fn bound_alpha(params: &LatticeParams) -> Result<f64> {
    let spec = solve_dense(params, true)?;
    let i = if params.is_real() {
        // The top state, followed continuously down to V -> 0 where it
        // stops being separated from the band.
        let ev = &spec.eigenvalues;
        (0..ev.len()).max_by(|&a, &b| ev[a].re.total_cmp(&ev[b].re)).expect("non-empty spectrum")
    } else {
        select_bound_state(&spec)?
    };
    let vecs = spec.eigenvectors.as_ref().expect("vectors requested");
    Ok(fit_localization_length_unchecked(&occupancies(&vecs[i]), params.q)?.alpha)
}

/// For each `γ > 2`, the real impurity `V ∈ [1e-6, γ]` whose bound state at
/// the central site has the same `α` as the absorbing one.
pub fn map_gamma_to_v(gammas: &[f64], l: usize) -> Result<GammaVMap> {
    use rayon::prelude::*;
    if let Some(g) = gammas.iter().find(|g| !(**g > 2.0 && g.is_finite())) {
        return Err(Error::InvalidParameter(format!("gamma = {g} must exceed 2")));
    }
    let q = central_site(l);
    LatticeParams::absorbing(l, q, 0.0)?;
    let pairs = gammas
        .par_iter()
        .map(|&g| {
            let target = bound_alpha(&LatticeParams::absorbing(l, q, g)?)?;
            let alpha_v = |v: f64| bound_alpha(&LatticeParams::real(l, q, v)?);
            // α decreases with V: find the crossing by bisection.
            let (mut lo, mut hi) = (V_LO, g);
            if alpha_v(lo)? <= target {
                return Ok((g, lo));
            }
            if alpha_v(hi)? >= target {
                return Ok((g, hi));
            }
            while hi - lo > V_TOL {
                let mid = 0.5 * (lo + hi);
                if alpha_v(mid)? > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok((g, 0.5 * (lo + hi)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaVMap { l, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(l: usize, q: usize, alpha: f64) -> Vec<f64> {
        (1..=l).map(|j| (-2.0 * j.abs_diff(q) as f64 / alpha).exp()).collect()
    }

    #[test]
    fn recovers_planted_decay() {
        let fit = fit_localization_length(&planted(60, 30, 3.0), 30).unwrap();
        assert!((fit.alpha - 3.0).abs() < 1e-10);
        assert!(fit.r_squared > 0.999_999);
        assert_eq!(fit.window, (6, 55));
    }

    #[test]
    fn edge_impurity_has_no_left_window() {
        assert!(matches!(
            fit_localization_length(&planted(40, 1, 3.0), 1),
            Err(Error::WindowTooSmall { left: 0, .. })
        ));
    }

    #[test]
    fn flat_profile_is_a_poor_fit() {
        let noisy: Vec<f64> = (0..40).map(|j| 1.0 + 0.5 * ((j * 7919) % 13) as f64 / 13.0).collect();
        assert!(matches!(fit_localization_length(&noisy, 20), Err(Error::PoorFit { .. })));
    }

    #[test]
    fn map_requires_gamma_above_two() {
        assert!(map_gamma_to_v(&[1.5], 42).is_err());
    }
}
