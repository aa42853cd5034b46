//! EP taxonomy across chain lengths and impurity positions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{build_hamiltonian, central_site, LatticeParams};
use crate::spectral::{
    dense_eigenvalues, detect_pairs, locate_ep_with, locate_minimum, solve_dense,
    EpClass, GapMetric,
};
use crate::{Error, Result};

const SCAN_LO: f64 = 1.0;
const SCAN_HI: f64 = 4.0;
const SCAN_STEP: f64 = 0.0025;
const REFINE_TOL: f64 = 1e-12;
/// Distance from `γ = 2` within which an all-paired EP counts as "at 2".
const AT_TWO: f64 = 1e-3;
/// Where the unpaired zero-real-part state is looked for when no EP exists.
const PROBE_GAMMA: f64 = 3.0;
const AXIS_TOL: f64 = 1e-8;
/// Refined minima closer than this are the same EP.
const DEDUP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum EpStructure {
    /// All eigenvalues coalesce pairwise at `γ_c ≈ 2`.
    AllPaired { gamma_c: f64 },
    /// As above plus one further pair EP at `γ₁ > 2`.
    ExtraEp { gamma_c: f64, gamma1: f64 },
    /// A pair EP on the imaginary axis meeting the pinned zero-real-part state.
    ThirdOrder { gamma_c: f64 },
    /// No EP; one eigenvalue stays on the imaginary axis, unpaired.
    NoEp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoundEp {
    pub gamma: f64,
    pub gap: f64,
    pub ep_pairs: usize,
    pub class: EpClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpClassification {
    pub l: usize,
    pub q: usize,
    pub structure: EpStructure,
    /// Every refined gap minimum that met the EP criteria.
    pub found: Vec<FoundEp>,
}

/// Scans `γ ∈ [1, 4]` for minima of the smallest eigenvalue gap, refines
/// each, keeps those meeting the EP criteria and classifies the pattern.
pub fn classify_ep_structure(l: usize, q: usize) -> Result<EpClassification> {
    let found = find_eps(l, q)?;
    let structure = structure_from(l, q, &found)?;
    Ok(EpClassification { l, q, structure, found })
}

/// [`classify_ep_structure`] at the central site.
pub fn classify_central(l: usize) -> Result<EpClassification> {
    classify_ep_structure(l, central_site(l))
}

fn gaps_at(l: usize, q: usize, g: f64) -> Result<[f64; 2]> {
    let op = build_hamiltonian(&LatticeParams::absorbing(l, q, g)?)?;
    let ev = dense_eigenvalues(&op)?;
    Ok([GapMetric::MinPair.eval(&ev), GapMetric::CentralPair.eval(&ev)])
}

/// Minima of either gap metric: the smallest gap alone hides an EP of the
/// central pair while other pairs are still close after the collective EP.
fn find_eps(l: usize, q: usize) -> Result<Vec<FoundEp>> {
    LatticeParams::absorbing(l, q, 0.0)?;
    let n = ((SCAN_HI - SCAN_LO) / SCAN_STEP).round() as usize + 1;
    let gs: Vec<f64> = (0..n).map(|i| SCAN_LO + SCAN_STEP * i as f64).collect();
    let fs: Vec<[f64; 2]> = gs.par_iter().map(|&g| gaps_at(l, q, g)).collect::<Result<_>>()?;
    let mut minima = Vec::new();
    for (m, metric) in [GapMetric::MinPair, GapMetric::CentralPair].into_iter().enumerate() {
        minima.extend((1..n - 1).filter(|&i| fs[i][m] < fs[i - 1][m] && fs[i][m] < fs[i + 1][m]).map(|i| (i, metric)));
    }
    let refined: Vec<Option<FoundEp>> = minima
        .par_iter()
        .map(|&(i, metric)| {
            let gap_at = |g| Ok(metric.eval(&dense_eigenvalues(&build_hamiltonian(&LatticeParams::absorbing(l, q, g)?)?)?));
            let (gamma, gap) = match locate_minimum(gap_at, gs[i - 1], gs[i + 1], 3, REFINE_TOL) {
                Ok(m) => m,
                // A kink or plateau of the gap, not a coalescence.
                Err(Error::NoMinimum { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let report = detect_pairs(&solve_dense(&LatticeParams::absorbing(l, q, gamma)?, true)?);
            let ep_pairs = report.ep_pairs().count();
            Ok((ep_pairs > 0).then_some(FoundEp { gamma, gap, ep_pairs, class: report.classification }))
        })
        .collect::<Result<_>>()?;
    // Both metrics usually find the same EP.
    let mut found: Vec<FoundEp> = Vec::new();
    for f in refined.into_iter().flatten() {
        match found.iter_mut().find(|e| (e.gamma - f.gamma).abs() < DEDUP) {
            Some(e) if f.gap < e.gap => *e = f,
            Some(_) => {}
            None => found.push(f),
        }
    }
    found.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    Ok(found)
}

fn structure_from(l: usize, q: usize, found: &[FoundEp]) -> Result<EpStructure> {
    let describe = || {
        let list: Vec<String> =
            found.iter().map(|f| format!("{:?} at {:.6} (gap {:.2e})", f.class, f.gamma, f.gap)).collect();
        format!("L = {l}, q = {q}: [{}]", list.join(", "))
    };
    let paired: Vec<_> = found
        .iter()
        .filter(|f| f.class == EpClass::AllPairedEp && (f.gamma - 2.0).abs() < AT_TWO)
        .collect();
    let others: Vec<_> = found
        .iter()
        .filter(|f| !(f.class == EpClass::AllPairedEp && (f.gamma - 2.0).abs() < AT_TWO))
        .collect();
    match (paired.as_slice(), others.as_slice()) {
        ([p], []) => Ok(EpStructure::AllPaired { gamma_c: p.gamma }),
        ([p], [e]) if e.gamma > 2.0 + AT_TWO && e.class == EpClass::SingleExtraEp => {
            Ok(EpStructure::ExtraEp { gamma_c: p.gamma, gamma1: e.gamma })
        }
        ([], [e]) if e.class == EpClass::ThirdOrderEp => Ok(EpStructure::ThirdOrder { gamma_c: e.gamma }),
        ([], []) => {
            let spec = solve_dense(&LatticeParams::absorbing(l, q, PROBE_GAMMA)?, false)?;
            let report = detect_pairs(&spec);
            let on_axis = report.unpaired.iter().any(|&i| spec.eigenvalues[i].re.abs() < AXIS_TOL);
            if on_axis {
                Ok(EpStructure::NoEp)
            } else {
                Err(Error::Unclassifiable(describe()))
            }
        }
        _ => Err(Error::Unclassifiable(describe())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QScanEntry {
    pub q: usize,
    pub gamma_c: f64,
    pub min_gap: f64,
    /// `γ_c < 2` for odd `q`, `> 2` for even `q`, `≈ 2` at the centre.
    pub parity_consistent: bool,
}

const Q_WINDOW: (f64, f64) = (0.5, 4.0);

/// EP of the two eigenvalues closest to the imaginary axis, per impurity site.
pub fn scan_q(l: usize, qs: &[usize]) -> Result<Vec<QScanEntry>> {
    if l % 4 != 2 {
        return Err(Error::InvalidParameter(format!("scan_q needs L mod 4 = 2, got L = {l}")));
    }
    let centre = central_site(l);
    qs.par_iter()
        .map(|&q| {
            let loc = locate_ep_with(l, q, Q_WINDOW, GapMetric::CentralPair)?;
            let g = loc.gamma_c;
            let parity_consistent = if q == centre || q == l + 1 - centre {
                (g - 2.0).abs() < AT_TWO
            } else {
                // Mirror-equivalent sites share γ_c; parity is that of the
                // distance to the nearer end.
                let d = q.min(l + 1 - q);
                if d % 2 == 1 { g < 2.0 } else { g > 2.0 }
            };
            Ok(QScanEntry { q, gamma_c: g, min_gap: loc.min_gap, parity_consistent })
        })
        .collect()
}
