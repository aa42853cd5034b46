//! Dense reference computations, written independently of the crate's
//! linear algebra. Slow and simple on purpose; only for small chains.
#![allow(dead_code)]

use nhlatt_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<Complex64>>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= s);
    v
}

/// Open chain, hopping -1, impurity `u` on site `q` (1-based).
pub fn chain(l: usize, q: usize, u: Complex64) -> Mat {
    let mut h = vec![vec![ZERO; l]; l];
    for j in 0..l.saturating_sub(1) {
        h[j][j + 1] = -ONE;
        h[j + 1][j] = -ONE;
    }
    h[q - 1][q - 1] = u;
    h
}

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { ONE } else { ZERO }).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut c = vec![vec![ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn matvec(a: &Mat, v: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn scale(a: &Mat, s: Complex64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

fn norm1(a: &Mat) -> f64 {
    let n = a.len();
    (0..n).map(|j| (0..n).map(|i| a[i][j].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting.
pub fn det(mut a: Mat) -> Complex64 {
    let n = a.len();
    let mut d = ONE;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm())).unwrap();
        if a[p][c] == ZERO {
            return ZERO;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let t = a[c][k];
                a[r][k] -= f * t;
            }
        }
    }
    d
}

/// `det(λI - H)`.
pub fn charpoly(h: &Mat, lambda: Complex64) -> Complex64 {
    let n = h.len();
    let a = (0..n)
        .map(|i| (0..n).map(|j| if i == j { lambda - h[i][j] } else { -h[i][j] }).collect())
        .collect();
    det(a)
}

pub fn solve(mut a: Mat, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm())).unwrap();
        a.swap(p, c);
        b.swap(p, c);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let t = a[c][k];
                a[r][k] -= f * t;
            }
            let t = b[c];
            b[r] -= f * t;
        }
    }
    for r in (0..n).rev() {
        let s: Complex64 = (r + 1..n).map(|k| a[r][k] * b[k]).sum();
        b[r] = (b[r] - s) / a[r][r];
    }
    b
}

/// `exp(A)` by scaling and squaring with a degree-20 Taylor polynomial.
pub fn expm(a: &Mat) -> Mat {
    let n = a.len();
    let nrm = norm1(a);
    let s = if nrm > 0.25 { (nrm / 0.25).log2().ceil() as i32 } else { 0 };
    let b = scale(a, Complex64::new(0.5f64.powi(s), 0.0));
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..=20 {
        term = scale(&matmul(&term, &b), Complex64::new(1.0 / k as f64, 0.0));
        sum = add(&sum, &term);
    }
    for _ in 0..s {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// `exp(-iHt) ψ`.
pub fn evolve_expm(h: &Mat, psi: &[Complex64], t: f64) -> Vec<Complex64> {
    matvec(&expm(&scale(h, Complex64::new(0.0, -t))), psi)
}

/// `Σ c_n e^{-iλ_n t} v_n` with `c` from solving `V c = ψ`.
pub fn evolve_spectral(values: &[Complex64], vectors: &[Vec<Complex64>], psi: &[Complex64], t: f64) -> Vec<Complex64> {
    let n = psi.len();
    let v: Mat = (0..n).map(|i| (0..n).map(|m| vectors[m][i]).collect()).collect();
    let c = solve(v, psi.to_vec());
    (0..n)
        .map(|i| (0..n).map(|m| c[m] * (-Complex64::i() * values[m] * t).exp() * vectors[m][i]).sum())
        .collect()
}

pub fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one = |x: &[Complex64], y: &[Complex64]| {
        x.iter().map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}
