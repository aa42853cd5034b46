//! Eigenvalue pairing and exceptional-point search.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{solve_dense, Spectrum};
use crate::lattice::LatticeParams;
use crate::linalg::parallel_defect;
use crate::{Error, Result};

/// Two eigenvalues closer than this may form an EP.
pub const EP_GAP_THRESHOLD: f64 = 1e-5;
/// ... provided their eigenvectors satisfy `1 - |⟨a|b⟩| <` this.
pub const EP_OVERLAP_THRESHOLD: f64 = 1e-3;

/// Real parts within this of zero count as "on the imaginary axis" for the
/// members of an EP pair (they sit at `±δ` with `δ ~ gap/2`).
const AXIS_TOL_PAIR: f64 = EP_GAP_THRESHOLD;
/// The mirror-pinned eigenvalue of an odd chain is zero to rounding.
const AXIS_TOL_PINNED: f64 = 1e-8;

const SAMPLES: usize = 64;
const GOLDEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub a: usize,
    pub b: usize,
    pub gap: f64,
    /// `1 - |⟨v_a|v_b⟩|`; `None` without eigenvectors.
    pub vector_overlap: Option<f64>,
}

impl EigenPair {
    pub fn is_ep(&self) -> bool {
        self.gap < EP_GAP_THRESHOLD && self.vector_overlap.map_or(true, |d| d < EP_OVERLAP_THRESHOLD)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpClass {
    /// Every eigenvalue sits in an EP pair.
    AllPairedEp,
    /// Some, not all, eigenvalues form EP pairs.
    SingleExtraEp,
    /// An EP pair on the imaginary axis meets the pinned zero-real-part state.
    ThirdOrderEp,
    NoEp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpReport {
    /// Greedy minimum-gap matching; each index appears at most once.
    pub pairs: Vec<EigenPair>,
    pub unpaired: Vec<usize>,
    pub classification: EpClass,
    pub gamma_at_detection: f64,
    /// Hausdorff distance between the spectrum and its mirror `-λ*`.
    pub symmetry_residual: f64,
}

impl EpReport {
    pub fn ep_pairs(&self) -> impl Iterator<Item = &EigenPair> {
        self.pairs.iter().filter(|p| p.is_ep())
    }
}

/// Pairs eigenvalues greedily by smallest gap and classifies the EP content.
pub fn detect_pairs(spec: &Spectrum) -> EpReport {
    let ev = &spec.eigenvalues;
    let n = ev.len();
    let mut candidates = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            candidates.push((i, j, (ev[i] - ev[j]).norm()));
        }
    }
    candidates.sort_by(|x, y| x.2.total_cmp(&y.2).then((x.0, x.1).cmp(&(y.0, y.1))));

    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    for (a, b, gap) in candidates {
        if used[a] || used[b] {
            continue;
        }
        used[a] = true;
        used[b] = true;
        let vector_overlap =
            spec.eigenvectors.as_ref().map(|vs| parallel_defect(&vs[a], &vs[b]));
        pairs.push(EigenPair { a, b, gap, vector_overlap });
    }
    let unpaired = (0..n).filter(|&i| !used[i]).collect();
    let classification = classify(ev, &pairs);
    EpReport {
        pairs,
        unpaired,
        classification,
        gamma_at_detection: spec.params.gamma(),
        symmetry_residual: spec.reflection_defect(),
    }
}

fn classify(ev: &[Complex64], pairs: &[EigenPair]) -> EpClass {
    let eps: Vec<_> = pairs.iter().filter(|p| p.is_ep()).collect();
    if eps.is_empty() {
        return EpClass::NoEp;
    }
    if ev.len() % 2 == 0 && eps.len() == ev.len() / 2 {
        return EpClass::AllPairedEp;
    }
    let on_axis_pair = eps.iter().find(|p| {
        ev[p.a].re.abs() < AXIS_TOL_PAIR && ev[p.b].re.abs() < AXIS_TOL_PAIR
    });
    if let Some(p) = on_axis_pair {
        let pinned = (0..ev.len())
            .any(|i| i != p.a && i != p.b && ev[i].re.abs() < AXIS_TOL_PINNED);
        if pinned {
            return EpClass::ThirdOrderEp;
        }
    }
    EpClass::SingleExtraEp
}

/// Smallest distance between any two eigenvalues.
pub fn min_pair_gap(ev: &[Complex64]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            g = g.min((ev[i] - ev[j]).norm());
        }
    }
    g
}

/// Distance between the two eigenvalues with the smallest `|Re λ|`.
pub fn central_pair_gap(ev: &[Complex64]) -> f64 {
    if ev.len() < 2 {
        return f64::INFINITY;
    }
    let mut idx: Vec<usize> = (0..ev.len()).collect();
    idx.sort_by(|&i, &j| ev[i].re.abs().total_cmp(&ev[j].re.abs()));
    (ev[idx[0]] - ev[idx[1]]).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapMetric {
    MinPair,
    CentralPair,
}

impl GapMetric {
    pub fn eval(self, ev: &[Complex64]) -> f64 {
        match self {
            GapMetric::MinPair => min_pair_gap(ev),
            GapMetric::CentralPair => central_pair_gap(ev),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpLocation {
    pub gamma_c: f64,
    pub min_gap: f64,
    pub report: EpReport,
}

/// Minimises `f` over `[lo, hi]`: sample, take the deepest interior local
/// minimum, then golden-section search between its neighbours.
///
/// Returns `(x, f(x))`, or [`Error::NoMinimum`] if every sampled minimum is
/// on the boundary.
pub fn locate_minimum<F>(f: F, lo: f64, hi: f64, samples: usize, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    use rayon::prelude::*;
    if !(lo < hi) || samples < 3 {
        return Err(Error::InvalidParameter(format!("bad search window [{lo}, {hi}]")));
    }
    let xs: Vec<f64> =
        (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect();
    let fs: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let best = (1..samples - 1)
        .filter(|&i| fs[i] <= fs[i - 1] && fs[i] <= fs[i + 1])
        .min_by(|&i, &j| fs[i].total_cmp(&fs[j]))
        .ok_or(Error::NoMinimum { lo, hi })?;
    golden(&f, xs[best - 1], xs[best + 1], tol)
}

fn golden<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// Locates the `γ` in `window` minimising the smallest eigenvalue gap and
/// reports the pairing there.
pub fn locate_ep(l: usize, q: usize, window: (f64, f64)) -> Result<EpLocation> {
    locate_ep_with(l, q, window, GapMetric::MinPair)
}

pub fn locate_ep_with(l: usize, q: usize, window: (f64, f64), metric: GapMetric) -> Result<EpLocation> {
    LatticeParams::absorbing(l, q, window.0)?;
    let (lo, hi) = window;
    if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad gamma window [{lo}, {hi}]")));
    }
    let gap = |g: f64| -> Result<f64> {
        let spec = solve_dense(&LatticeParams::absorbing(l, q, g)?, false)?;
        Ok(metric.eval(&spec.eigenvalues))
    };
    let (gamma_c, min_gap) = locate_minimum(gap, lo, hi, SAMPLES, GOLDEN_TOL)?;
    let spec = solve_dense(&LatticeParams::absorbing(l, q, gamma_c)?, true)?;
    Ok(EpLocation { gamma_c, min_gap, report: detect_pairs(&spec) })
}
