//! Spectra along a `γ` grid with branch tracking.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{build_hamiltonian, LatticeParams};
use crate::spectral::{dense_eigenvalues, order_permutation};
use crate::Result;

/// Within this distance of `γ = 2` branches follow pair identity instead of
/// nearest values.
const PAIR_WINDOW: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSweep {
    pub gammas: Vec<f64>,
    /// `ordered[g]`: eigenvalues at `gammas[g]` by (Re, Im).
    pub ordered: Vec<Vec<Complex64>>,
    /// `branches[g][b]`: branch `b` at `gammas[g]`, continuous in `γ`.
    pub branches: Vec<Vec<Complex64>>,
    /// True where the assignment from the previous grid point was not clear-cut.
    pub ambiguous: Vec<bool>,
}

impl SpectrumSweep {
    /// Values of branch `b` along the grid.
    pub fn branch(&self, b: usize) -> Vec<Complex64> {
        self.branches.iter().map(|row| row[b]).collect()
    }
}

pub fn spectrum_sweep(gammas: &[f64], l: usize, q: usize) -> Result<SpectrumSweep> {
    LatticeParams::absorbing(l, q, 0.0)?;
    let ordered: Vec<Vec<Complex64>> = gammas
        .par_iter()
        .map(|&g| {
            let op = build_hamiltonian(&LatticeParams::absorbing(l, q, g)?)?;
            let ev = dense_eigenvalues(&op)?;
            Ok(order_permutation(&ev).into_iter().map(|i| ev[i]).collect())
        })
        .collect::<Result<_>>()?;

    let mut branches: Vec<Vec<Complex64>> = Vec::with_capacity(ordered.len());
    let mut ambiguous = Vec::with_capacity(ordered.len());
    for (gi, cur) in ordered.iter().enumerate() {
        if gi == 0 {
            branches.push(cur.clone());
            ambiguous.push(false);
            continue;
        }
        let prev = &branches[gi - 1];
        let (next, amb) = if (gammas[gi] - 2.0).abs() < PAIR_WINDOW {
            (match_pairs(prev, cur), true)
        } else {
            match_nearest(prev, cur)
        };
        branches.push(next);
        ambiguous.push(amb);
    }
    Ok(SpectrumSweep { gammas: gammas.to_vec(), ordered, branches, ambiguous })
}

/// Greedy minimum-distance assignment of `cur` to the slots of `prev`.
/// Ambiguous when some slot's runner-up candidate is within twice its match.
fn match_nearest(prev: &[Complex64], cur: &[Complex64]) -> (Vec<Complex64>, bool) {
    let assign = greedy(prev, cur);
    let mut out = vec![Complex64::new(0.0, 0.0); prev.len()];
    let mut ambiguous = false;
    for (slot, &c) in assign.iter().enumerate() {
        out[slot] = cur[c];
        let best = (prev[slot] - cur[c]).norm();
        let runner_up = (0..cur.len())
            .filter(|&j| j != c)
            .map(|j| (prev[slot] - cur[j]).norm())
            .fold(f64::INFINITY, f64::min);
        if runner_up < 2.0 * best {
            ambiguous = true;
        }
    }
    (out, ambiguous)
}

/// `assign[i]` = index into `cur` for slot `i` of `prev`.
fn greedy(prev: &[Complex64], cur: &[Complex64]) -> Vec<usize> {
    let n = prev.len();
    let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, p) in prev.iter().enumerate() {
        for (j, c) in cur.iter().enumerate() {
            cand.push(((p - c).norm(), i, j));
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut assign = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, i, j) in cand {
        if assign[i] == usize::MAX && !taken[j] {
            assign[i] = j;
            taken[j] = true;
        }
    }
    assign
}

/// Pairs both spectra by minimum gap, matches pairs by centroid, then
/// assigns members within each matched pair by nearest value.
fn match_pairs(prev: &[Complex64], cur: &[Complex64]) -> Vec<Complex64> {
    let pp = pair_up(prev);
    let cp = pair_up(cur);
    let centroid = |v: &[Complex64], p: &[usize]| -> Complex64 {
        p.iter().map(|&i| v[i]).sum::<Complex64>() / p.len() as f64
    };
    let pc: Vec<_> = pp.iter().map(|p| centroid(prev, p)).collect();
    let cc: Vec<_> = cp.iter().map(|p| centroid(cur, p)).collect();
    let group_assign = if pp.iter().map(Vec::len).eq(cp.iter().map(Vec::len)) {
        greedy(&pc, &cc)
    } else {
        return match_nearest(prev, cur).0;
    };
    let mut out = vec![Complex64::new(0.0, 0.0); prev.len()];
    for (gi, slots) in pp.iter().enumerate() {
        let members = &cp[group_assign[gi]];
        if slots.len() != members.len() {
            return match_nearest(prev, cur).0;
        }
        let sv: Vec<_> = slots.iter().map(|&i| prev[i]).collect();
        let mv: Vec<_> = members.iter().map(|&j| cur[j]).collect();
        for (k, j) in greedy(&sv, &mv).into_iter().enumerate() {
            out[slots[k]] = mv[j];
        }
    }
    out
}

/// Greedy minimum-gap pairing; an odd leftover forms a singleton group.
fn pair_up(v: &[Complex64]) -> Vec<Vec<usize>> {
    let n = v.len();
    let mut cand = Vec::with_capacity(n * n / 2);
    for i in 0..n {
        for j in i + 1..n {
            cand.push(((v[i] - v[j]).norm(), i, j));
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut used = vec![false; n];
    let mut groups = Vec::new();
    for (_, i, j) in cand {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            groups.push(vec![i, j]);
        }
    }
    groups.extend((0..n).filter(|&i| !used[i]).map(|i| vec![i]));
    groups
}
