//! Complex spectra of the chain Hamiltonian from two independent routes:
//! shifted QR on the (tridiagonal, hence Hessenberg) matrix, and simultaneous
//! root finding on the characteristic polynomial.

mod bound;
mod ep;
mod roots;

pub use bound::{bound_state, select_bound_state, BoundStateInfo};
pub use ep::{
    central_pair_gap, detect_pairs, locate_ep, locate_ep_with, locate_minimum, min_pair_gap, EigenPair, EpClass,
    EpLocation, EpReport, GapMetric, EP_GAP_THRESHOLD, EP_OVERLAP_THRESHOLD,
};
pub use roots::solve_charpoly;

use std::cmp::Ordering;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::{build_hamiltonian, LatticeParams, TridiagOperator};
use crate::linalg::{hessenberg_eigenvalues, norm2, normalize, TridiagLu};
use crate::{Error, Result};

/// Largest chain the dense backend accepts.
pub const DENSE_MAX_L: usize = 2000;

/// Seed for inverse-iteration start vectors unless one is given.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    DenseQr,
    CharpolyRoots,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm right eigenvectors, one per eigenvalue, when requested.
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    pub backend: Backend,
    pub params: LatticeParams,
    /// Indices whose inverse iteration stagnated (expected at EPs).
    pub near_defective: Vec<usize>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }

    /// `|Σλ - trace(H)|`.
    pub fn trace_defect(&self) -> f64 {
        (self.sum() - self.params.impurity).norm()
    }

    /// Hausdorff distance between the spectrum and its mirror `λ → -λ*`.
    pub fn reflection_defect(&self) -> f64 {
        let mirrored: Vec<_> = self.eigenvalues.iter().map(|z| -z.conj()).collect();
        crate::linalg::hausdorff(&self.eigenvalues, &mirrored)
    }

    /// `max_i ‖H v_i - λ_i v_i‖` over the stored eigenpairs.
    pub fn max_residual(&self) -> Option<f64> {
        let vecs = self.eigenvectors.as_ref()?;
        let op = build_hamiltonian(&self.params).ok()?;
        Some(
            self.eigenvalues
                .iter()
                .zip(vecs)
                .map(|(&lam, v)| residual(&op, lam, v))
                .fold(0.0, f64::max),
        )
    }
}

/// `‖H v - λ v‖`.
pub fn residual(op: &TridiagOperator, lambda: Complex64, v: &[Complex64]) -> f64 {
    let mut hv = vec![Complex64::new(0.0, 0.0); v.len()];
    op.apply_into(v, &mut hv);
    hv.iter().zip(v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt()
}

pub fn solve_dense(params: &LatticeParams, want_vectors: bool) -> Result<Spectrum> {
    solve_dense_seeded(params, want_vectors, DEFAULT_SEED)
}

/// All eigenvalues by Hessenberg QR; eigenvectors by inverse iteration on the
/// tridiagonal `H - λI` from seeded random starts.
pub fn solve_dense_seeded(params: &LatticeParams, want_vectors: bool, seed: u64) -> Result<Spectrum> {
    params.validate()?;
    if params.l > DENSE_MAX_L {
        return Err(Error::InvalidParameter(format!(
            "dense backend limited to L <= {DENSE_MAX_L}, got {}",
            params.l
        )));
    }
    let op = build_hamiltonian(params)?;
    let eigenvalues = dense_eigenvalues(&op)?;
    let mut near_defective = Vec::new();
    let eigenvectors = if want_vectors {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vecs = Vec::with_capacity(eigenvalues.len());
        for (i, &lam) in eigenvalues.iter().enumerate() {
            let (v, stagnated) = inverse_iteration(&op, lam, &mut rng);
            if stagnated {
                near_defective.push(i);
            }
            vecs.push(v);
        }
        Some(vecs)
    } else {
        None
    };
    Ok(Spectrum { eigenvalues, eigenvectors, backend: Backend::DenseQr, params: *params, near_defective })
}

pub fn dense_eigenvalues(op: &TridiagOperator) -> Result<Vec<Complex64>> {
    let n = op.dim();
    let mut h = op.to_dense();
    hessenberg_eigenvalues(&mut h, n)
}

const INVERSE_ITERATIONS: usize = 2;
const EXTRA_ITERATIONS: usize = 3;

/// Returns a unit vector and whether the residual stayed above the noise level.
fn inverse_iteration(op: &TridiagOperator, lambda: Complex64, rng: &mut ChaCha8Rng) -> (Vec<Complex64>, bool) {
    let n = op.dim();
    let scale = op.norm_inf().max(1.0);
    let shifted: Vec<_> = op.diag().iter().map(|d| d - lambda).collect();
    let lu = TridiagLu::factor(op.offdiag(), &shifted, op.offdiag(), f64::EPSILON * scale);

    let mut v: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    normalize(&mut v);

    let target = 1e-12 * scale;
    let mut res = f64::INFINITY;
    for it in 0..INVERSE_ITERATIONS + EXTRA_ITERATIONS {
        lu.solve_in_place(&mut v);
        if normalize(&mut v) == 0.0 || v.iter().any(|z| !z.is_finite()) {
            // Degenerate solve: restart from a fresh direction.
            v = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
            normalize(&mut v);
            continue;
        }
        res = residual(op, lambda, &v);
        if it + 1 >= INVERSE_ITERATIONS && res <= target {
            break;
        }
    }
    fix_phase(&mut v);
    (v, res > 1e-8 * scale)
}

/// Rotates the largest component onto the positive real axis.
pub(crate) fn fix_phase(v: &mut [Complex64]) {
    let Some(big) = v.iter().copied().max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr())) else {
        return;
    };
    if big.norm() > 0.0 {
        let phase = big.conj() / big.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Eigenvector for (approximate) eigenvalue `λ` from the forward recursion
/// `x_0 = 0, x_1 = 1, o_j x_{j+1} = (λ - d_j) x_j - o_{j-1} x_{j-1}`.
///
/// Fails with [`Error::LargeResidual`] when `λ` is not an eigenvalue to
/// relative residual `1e-6`.
pub fn eigenvector_transfer(op: &TridiagOperator, lambda: Complex64) -> Result<Vec<Complex64>> {
    let n = op.dim();
    let d = op.diag();
    let o = op.offdiag();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[0] = Complex64::new(1.0, 0.0);
    for j in 0..n - 1 {
        let prev = if j > 0 { o[j - 1] * x[j - 1] } else { Complex64::new(0.0, 0.0) };
        x[j + 1] = ((lambda - d[j]) * x[j] - prev) / o[j];
    }
    let norm = norm2(&x);
    let rel = residual(op, lambda, &x) / norm;
    const THRESHOLD: f64 = 1e-6;
    if !(rel <= THRESHOLD) {
        return Err(Error::LargeResidual { residual: rel, threshold: THRESHOLD });
    }
    x.iter_mut().for_each(|z| *z /= norm);
    fix_phase(&mut x);
    Ok(x)
}

/// Real parts closer than this compare equal when ordering.
const ORDER_RE_TOL: f64 = 1e-9;

fn order_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    let tol = ORDER_RE_TOL * (1.0 + a.re.abs().max(b.re.abs()));
    if (a.re - b.re).abs() <= tol {
        a.im.total_cmp(&b.im)
    } else {
        a.re.total_cmp(&b.re)
    }
}

/// Sorts by real part, then imaginary part, ascending (`1-2i` before `1+2i`),
/// permuting eigenvectors alongside.
pub fn order_eigenpairs(spec: &Spectrum) -> Spectrum {
    let perm = order_permutation(&spec.eigenvalues);
    let eigenvalues = perm.iter().map(|&i| spec.eigenvalues[i]).collect();
    let eigenvectors =
        spec.eigenvectors.as_ref().map(|vs| perm.iter().map(|&i| vs[i].clone()).collect());
    let near_defective = spec
        .near_defective
        .iter()
        .map(|old| perm.iter().position(|p| p == old).unwrap_or(*old))
        .collect();
    Spectrum { eigenvalues, eigenvectors, backend: spec.backend, params: spec.params, near_defective }
}

pub fn order_permutation(values: &[Complex64]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&i, &j| order_cmp(&values[i], &values[j]));
    perm
}

pub fn occupancies(v: &[Complex64]) -> Vec<f64> {
    let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    v.iter().map(|z| z.norm_sqr() / total).collect()
}
