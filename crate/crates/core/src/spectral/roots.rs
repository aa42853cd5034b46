//! Aberth–Ehrlich simultaneous iteration on `P_{L,q}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Backend, Spectrum};
use crate::charpoly::{charpoly_eval_scaled, newton_ratio, CharPolyParams};
use crate::{Error, Result};

pub const CHARPOLY_MAX_L: usize = 200;

const SEED_RADIUS: f64 = 2.2;
const MAX_SWEEPS: usize = 2000;
const ATTEMPTS: usize = 4;
const POLISH_STEPS: usize = 3;

/// All `L` roots of the characteristic polynomial. Eigenvectors are not
/// produced on this route.
pub fn solve_charpoly(params: &CharPolyParams) -> Result<Spectrum> {
    let p = CharPolyParams::new(params.l, params.q, params.gamma)?;
    if p.l > CHARPOLY_MAX_L {
        return Err(Error::InvalidParameter(format!(
            "characteristic-polynomial backend limited to L <= {CHARPOLY_MAX_L}, got {}",
            p.l
        )));
    }
    let mut best = 0;
    for attempt in 0..ATTEMPTS {
        let mut z = seeds(&p, attempt);
        let converged = aberth(&p, &mut z);
        if converged == p.l && trace_consistent(&p, &z) {
            polish(&p, &mut z);
            return Ok(Spectrum {
                eigenvalues: z,
                eigenvectors: None,
                backend: Backend::CharpolyRoots,
                params: p.lattice(),
                near_defective: Vec::new(),
            });
        }
        best = best.max(converged);
    }
    Err(Error::RootCountMismatch { converged: best, expected: p.l })
}

/// `L-1` points on a circle enclosing the band, one deep on the negative
/// imaginary axis where the absorbed state sits at large `γ`.
fn seeds(p: &CharPolyParams, attempt: usize) -> Vec<Complex64> {
    let n = p.l;
    let deep = Complex64::new(0.0, -p.gamma.abs().max(2.0));
    if n == 1 {
        return vec![deep];
    }
    let m = n - 1;
    // Irrational offset keeps seeds off symmetry lines; rotate per attempt.
    let offset = 0.4 + 0.7 * attempt as f64;
    let mut z: Vec<_> = (0..m)
        .map(|k| Complex64::from_polar(SEED_RADIUS, 2.0 * PI * (k as f64 + offset) / m as f64))
        .collect();
    z.push(deep);
    z
}

/// Gauss–Seidel Aberth sweeps; returns the number of converged roots.
fn aberth(p: &CharPolyParams, z: &mut [Complex64]) -> usize {
    let n = z.len();
    let mut done = vec![false; n];
    let mut last_step = vec![f64::INFINITY; n];
    for sweep in 0..MAX_SWEEPS {
        let mut active = false;
        for k in 0..n {
            if done[k] {
                continue;
            }
            active = true;
            let ratio = newton_ratio(p, z[k]);
            if !ratio.is_finite() {
                // P' vanished; nudge off the critical point.
                z[k] += Complex64::new(1e-7, 1e-7) * (1.0 + z[k].norm());
                continue;
            }
            let repulsion: Complex64 =
                (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            let size = step.norm();
            let scale = 1.0 + z[k].norm();
            // Multiple roots converge linearly and stall at a noise floor
            // near sqrt(eps); accept once progress stops there.
            let stalled = sweep > 20 && size < 1e-6 * scale && size > 0.9 * last_step[k];
            if size <= 4.0 * f64::EPSILON * scale || stalled {
                done[k] = true;
            }
            last_step[k] = size;
        }
        if !active {
            break;
        }
    }
    done.iter().filter(|&&d| d).count()
}

/// The roots must sum to `trace(H) = -iγ`.
fn trace_consistent(p: &CharPolyParams, z: &[Complex64]) -> bool {
    let sum: Complex64 = z.iter().sum();
    let tol = 1e-6 * p.l as f64 * (1.0 + p.gamma.abs());
    z.iter().all(|v| v.is_finite()) && (sum - Complex64::new(0.0, -p.gamma)).norm() <= tol
}

/// Newton refinement, kept only where it lowers `|P|` without jumping
/// toward a neighbour.
fn polish(p: &CharPolyParams, z: &mut [Complex64]) {
    for k in 0..z.len() {
        for _ in 0..POLISH_STEPS {
            let ratio = newton_ratio(p, z[k]);
            if !ratio.is_finite() || ratio.norm() == 0.0 {
                break;
            }
            let nearest = (0..z.len())
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).norm())
                .fold(f64::INFINITY, f64::min);
            if ratio.norm() >= 0.5 * nearest {
                break;
            }
            let cand = z[k] - ratio;
            if charpoly_eval_scaled(p, cand).ln_abs() < charpoly_eval_scaled(p, z[k]).ln_abs() {
                z[k] = cand;
            } else {
                break;
            }
        }
    }
}
