//! Small complex linear-algebra kernels: pivoted tridiagonal LU, shifted
//! Hessenberg QR for eigenvalues, and vector helpers.

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
pub(crate) fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Scales `v` to unit 2-norm and returns the old norm.
pub fn normalize(v: &mut [Complex64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
    n
}

/// `1 - |⟨a|b⟩|` for unit vectors, clamped to `[0, 1]`.
pub fn parallel_defect(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na = norm2(a);
    let nb = norm2(b);
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    (1.0 - dot(a, b).norm() / (na * nb)).clamp(0.0, 1.0)
}

/// Symmetric Hausdorff distance between two point sets in the complex plane.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|r| (p - r).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// LU factorization of a general complex tridiagonal matrix with partial
/// pivoting (the row interchanges create a second superdiagonal).
#[derive(Debug, Clone)]
pub struct TridiagLu {
    dl: Vec<Complex64>,
    /// Reciprocals of the pivots.
    d: Vec<Complex64>,
    du: Vec<Complex64>,
    du2: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    /// Factors the matrix with sub-diagonal `sub`, diagonal `diag` and
    /// super-diagonal `sup`. Exactly zero pivots are replaced by `zero_pivot`.
    pub fn factor(
        sub: &[Complex64],
        diag: &[Complex64],
        sup: &[Complex64],
        zero_pivot: f64,
    ) -> Self {
        let n = diag.len();
        debug_assert!(n >= 1 && sub.len() + 1 == n && sup.len() + 1 == n);
        let mut dl = sub.to_vec();
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![ZERO; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        for i in 0..n.saturating_sub(1) {
            if cabs1(d[i]) >= cabs1(dl[i]) {
                if cabs1(d[i]) == 0.0 {
                    d[i] = Complex64::new(zero_pivot, 0.0);
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if cabs1(d[n - 1]) == 0.0 {
            d[n - 1] = Complex64::new(zero_pivot, 0.0);
        }
        // Reciprocal pivots: back substitution then multiplies instead of dividing.
        let d = d.iter().map(|p| p.inv()).collect();
        Self { dl, d, du, du2, swapped }
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Overwrites `b` with the solution of `A x = b`.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.d.len();
        debug_assert_eq!(b.len(), n);
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                let t = self.dl[i] * b[i];
                b[i + 1] -= t;
            }
        }
        b[n - 1] *= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) * self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) * self.d[i];
        }
    }
}

/// Complex plane rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
#[derive(Debug, Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    fn zeroing(x: Complex64, y: Complex64) -> (Self, Complex64) {
        let ax = x.norm();
        let ay = y.norm();
        if ay == 0.0 {
            return (Self { c: 1.0, s: ZERO }, x);
        }
        if ax == 0.0 {
            return (Self { c: 0.0, s: y.conj() / ay }, Complex64::new(ay, 0.0));
        }
        let rho = ax.hypot(ay);
        let phase = x / ax;
        let g = Self { c: ax / rho, s: phase * y.conj() / rho };
        (g, phase * rho)
    }
}

/// Eigenvalues of an upper Hessenberg matrix (row-major, overwritten) by
/// single-shift complex QR with Wilkinson shifts and deflation.
pub fn hessenberg_eigenvalues(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>> {
    debug_assert_eq!(h.len(), n * n);
    let idx = |i: usize, j: usize| i * n + j;
    let mut w = vec![ZERO; n];
    if n == 0 {
        return Ok(w);
    }
    let ulp = f64::EPSILON;
    let safmin = f64::MIN_POSITIVE;
    let smlnum = safmin * (n as f64 / ulp);
    let itmax = 30 * n.max(10);

    let mut hi = n - 1;
    loop {
        let mut lo;
        let mut converged = false;
        for its in 0..=itmax {
            // Look for a negligible subdiagonal entry in the active block.
            let mut k = hi;
            while k > 0 {
                let sub = h[idx(k, k - 1)];
                if cabs1(sub) <= smlnum {
                    break;
                }
                let mut tst = cabs1(h[idx(k - 1, k - 1)]) + cabs1(h[idx(k, k)]);
                if tst == 0.0 {
                    if k >= 2 {
                        tst += h[idx(k - 1, k - 2)].re.abs();
                    }
                    if k + 1 <= hi {
                        tst += h[idx(k + 1, k)].re.abs();
                    }
                }
                if sub.re.abs() <= ulp * tst {
                    // Ahues & Tisseur conservative deflation test.
                    let ab = cabs1(sub).max(cabs1(h[idx(k - 1, k)]));
                    let ba = cabs1(sub).min(cabs1(h[idx(k - 1, k)]));
                    let diff = h[idx(k - 1, k - 1)] - h[idx(k, k)];
                    let aa = cabs1(h[idx(k, k)]).max(cabs1(diff));
                    let bb = cabs1(h[idx(k, k)]).min(cabs1(diff));
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            lo = k;
            if lo > 0 {
                h[idx(lo, lo - 1)] = ZERO;
            }
            if lo >= hi {
                converged = true;
                break;
            }

            let shift = if its > 0 && its % 10 == 0 {
                // Exceptional shift to break cycles.
                let (r, c) = if its % 20 == 0 { (hi, hi - 1) } else { (lo + 1, lo) };
                let base = if its % 20 == 0 { h[idx(hi, hi)] } else { h[idx(lo, lo)] };
                base + 0.75 * h[idx(r, c)].re.abs()
            } else {
                wilkinson_shift(
                    h[idx(hi - 1, hi - 1)],
                    h[idx(hi - 1, hi)],
                    h[idx(hi, hi - 1)],
                    h[idx(hi, hi)],
                )
            };

            // Implicit single-shift bulge chase over [lo, hi].
            for k in lo..hi {
                let (x, y) = if k == lo {
                    (h[idx(lo, lo)] - shift, h[idx(lo + 1, lo)])
                } else {
                    (h[idx(k, k - 1)], h[idx(k + 1, k - 1)])
                };
                let (g, r) = Givens::zeroing(x, y);
                let col0 = if k == lo {
                    lo
                } else {
                    h[idx(k, k - 1)] = r;
                    h[idx(k + 1, k - 1)] = ZERO;
                    k
                };
                for j in col0..=hi {
                    let a = h[idx(k, j)];
                    let b = h[idx(k + 1, j)];
                    h[idx(k, j)] = g.c * a + g.s * b;
                    h[idx(k + 1, j)] = -g.s.conj() * a + g.c * b;
                }
                let row_end = (k + 2).min(hi);
                for i in lo..=row_end {
                    let a = h[idx(i, k)];
                    let b = h[idx(i, k + 1)];
                    h[idx(i, k)] = a * g.c + b * g.s.conj();
                    h[idx(i, k + 1)] = -a * g.s + b * g.c;
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence { index: hi });
        }
        w[hi] = h[idx(hi, hi)];
        if hi == 0 {
            break;
        }
        hi -= 1;
    }
    Ok(w)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let t = (a - d) * 0.5;
    let bc = b * c;
    let mut disc = (t * t + bc).sqrt();
    if (t.conj() * disc).re < 0.0 {
        disc = -disc;
    }
    let big = t + disc;
    if big.norm() == 0.0 {
        d
    } else {
        d - bc / big
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_c(rng: &mut ChaCha8Rng) -> Complex64 {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn tridiag_solve_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 5, 17] {
            // Large sub-diagonal forces row interchanges.
            let sub: Vec<_> = (0..n - 1).map(|_| random_c(&mut rng) * 3.0).collect();
            let sup: Vec<_> = (0..n - 1).map(|_| random_c(&mut rng)).collect();
            let diag: Vec<_> = (0..n).map(|_| random_c(&mut rng) * 0.1).collect();
            let matvec = |x: &[Complex64]| -> Vec<Complex64> {
                (0..n)
                    .map(|i| {
                        let mut s = diag[i] * x[i];
                        if i > 0 {
                            s += sub[i - 1] * x[i - 1];
                        }
                        if i + 1 < n {
                            s += sup[i] * x[i + 1];
                        }
                        s
                    })
                    .collect()
            };
            let x: Vec<_> = (0..n).map(|_| random_c(&mut rng)).collect();
            let rhs = matvec(&x);
            let mut b = rhs.clone();
            TridiagLu::factor(&sub, &diag, &sup, 1e-300).solve_in_place(&mut b);
            // backward error: A x_hat reproduces the right-hand side
            let back = matvec(&b);
            let res: f64 = back.iter().zip(&rhs).map(|(a, r)| (a - r).norm()).fold(0.0, f64::max);
            assert!(res < 1e-13 * 5.0 * (1.0 + norm2(&b)), "n={n} residual={res}");
            if n <= 5 {
                for i in 0..n {
                    assert!((b[i] - x[i]).norm() < 1e-11, "n={n} i={i}");
                }
            }
        }
    }

    #[test]
    fn qr_on_triangular_and_companion() {
        // Upper triangular: eigenvalues are the diagonal.
        let n = 3;
        let mut h = vec![c(1.0, 1.0), c(2.0, 0.0), c(3.0, 0.0), ZERO, c(-2.0, 0.5), c(1.0, 0.0), ZERO, ZERO, c(0.5, 0.0)];
        let mut w = hessenberg_eigenvalues(&mut h, n).unwrap();
        w.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((w[0] - c(-2.0, 0.5)).norm() < 1e-14);
        assert!((w[1] - c(0.5, 0.0)).norm() < 1e-14);
        assert!((w[2] - c(1.0, 1.0)).norm() < 1e-14);

        // Companion of (z-1)(z-2i)(z+3) = z^3 + (2-2i) z^2 + (-3-4i) z + 6i.
        let mut h = vec![
            c(-2.0, 2.0), c(3.0, 4.0), c(0.0, -6.0),
            c(1.0, 0.0), ZERO, ZERO,
            ZERO, c(1.0, 0.0), ZERO,
        ];
        let w = hessenberg_eigenvalues(&mut h, 3).unwrap();
        for root in [c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)] {
            assert!(w.iter().any(|z| (z - root).norm() < 1e-12), "{root} missing from {w:?}");
        }
    }

    #[test]
    fn qr_eigenvalue_sum_and_product_random_hessenberg() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 12;
        let mut h = vec![ZERO; n * n];
        for i in 0..n {
            for j in i.saturating_sub(1)..n {
                h[i * n + j] = random_c(&mut rng);
            }
        }
        let trace: Complex64 = (0..n).map(|i| h[i * n + i]).sum();
        let w = hessenberg_eigenvalues(&mut h.clone(), n).unwrap();
        let sum: Complex64 = w.iter().sum();
        assert!((sum - trace).norm() < 1e-12);
    }

    #[test]
    fn givens_zeroes_second_component() {
        let (g, r) = Givens::zeroing(c(0.3, -1.2), c(2.0, 0.7));
        let x = c(0.3, -1.2);
        let y = c(2.0, 0.7);
        assert!((g.c * x + g.s * y - r).norm() < 1e-15);
        assert!((-g.s.conj() * x + g.c * y).norm() < 1e-15);
    }

    #[test]
    fn parallel_defect_bounds() {
        let a = [c(1.0, 0.0), c(0.0, 1.0)];
        let b = [c(0.0, -2.0), c(2.0, 0.0)];
        assert!(parallel_defect(&a, &b) < 1e-15);
        let e = [c(1.0, 0.0), ZERO];
        let f = [ZERO, c(1.0, 0.0)];
        assert_eq!(parallel_defect(&e, &f), 1.0);
    }

    #[test]
    fn hausdorff_basic() {
        let a = [c(0.0, 0.0), c(1.0, 0.0)];
        let b = [c(0.0, 0.1), c(1.0, 0.0), c(1.0, 0.3)];
        assert!((hausdorff(&a, &b) - 0.3).abs() < 1e-15);
    }
}
