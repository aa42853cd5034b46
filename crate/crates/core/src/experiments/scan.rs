//! Scattering scans over `γ` and the absorption maximum `γ*(k)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{scatter_once, RtaPoint, WavepacketSpec};
use crate::{Error, Result};

#[derive(Debug)]
pub struct ScanPoint {
    pub gamma: f64,
    pub outcome: Result<RtaPoint>,
}

/// Shape checks on a scan, reported rather than enforced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtaDiagnostics {
    /// Largest drop of `R` between consecutive points (zero if nondecreasing).
    pub max_r_drop: f64,
    /// Largest rise of `T` between consecutive points.
    pub max_t_rise: f64,
    /// Strict interior local maxima of `A`.
    pub a_interior_maxima: usize,
    pub a_argmax: usize,
    pub failures: usize,
}

impl RtaDiagnostics {
    pub fn r_nondecreasing(&self, slack: f64) -> bool {
        self.max_r_drop <= slack
    }

    pub fn t_nonincreasing(&self, slack: f64) -> bool {
        self.max_t_rise <= slack
    }

    pub fn a_unimodal(&self) -> bool {
        self.a_interior_maxima == 1
    }
}

#[derive(Debug)]
pub struct RtaScan {
    pub points: Vec<ScanPoint>,
    pub diagnostics: RtaDiagnostics,
}

impl RtaScan {
    /// Successful points in grid order.
    pub fn ok_points(&self) -> Vec<RtaPoint> {
        self.points.iter().filter_map(|p| p.outcome.as_ref().ok().copied()).collect()
    }
}

/// Runs [`scatter_once`] at every `γ` in parallel; results keep grid order.
pub fn scan_rta(gammas: &[f64], l: usize, q: usize, spec: &WavepacketSpec, tol: f64) -> RtaScan {
    let points: Vec<ScanPoint> = gammas
        .par_iter()
        .map(|&gamma| ScanPoint { gamma, outcome: scatter_once(l, q, spec, gamma, tol) })
        .collect();
    let ok: Vec<RtaPoint> = points.iter().filter_map(|p| p.outcome.as_ref().ok().copied()).collect();
    let diagnostics = diagnose(&ok, points.len() - ok.len());
    RtaScan { points, diagnostics }
}

fn diagnose(pts: &[RtaPoint], failures: usize) -> RtaDiagnostics {
    let max_r_drop = pts.windows(2).map(|w| w[0].r - w[1].r).fold(0.0, f64::max);
    let max_t_rise = pts.windows(2).map(|w| w[1].t - w[0].t).fold(0.0, f64::max);
    let a: Vec<f64> = pts.iter().map(|p| p.a).collect();
    let a_argmax = argmax(&a).unwrap_or(0);
    let maxima = a.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count();
    RtaDiagnostics { max_r_drop, max_t_rise, a_interior_maxima: maxima, a_argmax, failures }
}

fn argmax(v: &[f64]) -> Option<usize> {
    v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i)
}

/// `γ` of maximal absorption: vertex of the parabola through the discrete
/// maximum and its two neighbours.
pub fn extract_gamma_star(points: &[RtaPoint]) -> Result<f64> {
    if points.len() < 7 {
        return Err(Error::InvalidParameter(format!(
            "need at least 7 scan points, got {}",
            points.len()
        )));
    }
    let a: Vec<f64> = points.iter().map(|p| p.a).collect();
    let i = argmax(&a).expect("non-empty");
    if i == 0 || i + 1 == points.len() {
        return Err(Error::MaxAtBoundary { index: i });
    }
    let (x0, x1, x2) = (points[i - 1].gamma, points[i].gamma, points[i + 1].gamma);
    let (y0, y1, y2) = (a[i - 1], a[i], a[i + 1]);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        return Ok(x1);
    }
    Ok((x1 - 0.5 * num / den).clamp(x0, x2))
}

#[derive(Debug)]
pub struct GammaStarPoint {
    pub k: f64,
    pub gamma_star: Result<f64>,
    pub diagnostics: RtaDiagnostics,
}

/// `γ*(k)`: one `γ` scan per wavevector, packet centred at `L/4`.
pub fn scan_gamma_star(
    ks: &[f64],
    gammas: &[f64],
    l: usize,
    q: usize,
    sigma: f64,
    tol: f64,
) -> Vec<GammaStarPoint> {
    ks.iter()
        .map(|&k| {
            let spec = WavepacketSpec::for_chain(l, sigma, k);
            let scan = scan_rta(gammas, l, q, &spec, tol);
            let gamma_star = match scan.points.iter().find_map(|p| p.outcome.as_ref().err()) {
                Some(e) => Err(Error::InvalidParameter(format!("scan at k = {k} failed: {e}"))),
                None => extract_gamma_star(&scan.ok_points()),
            };
            GammaStarPoint { k, gamma_star, diagnostics: scan.diagnostics }
        })
        .collect()
}
