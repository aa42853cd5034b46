//! Open-chain tight-binding Hamiltonian with one complex on-site impurity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Chain length, impurity site (1-based) and impurity value.
///
/// The hopping amplitude is fixed to one; energies and times are in units of it.
/// An absorbing impurity has a strictly negative imaginary part (`-iγ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub l: usize,
    pub q: usize,
    pub impurity: Complex64,
}

impl LatticeParams {
    pub fn new(l: usize, q: usize, impurity: Complex64) -> Result<Self> {
        let p = Self { l, q, impurity };
        p.validate()?;
        Ok(p)
    }

    /// Absorbing impurity `-iγ`.
    pub fn absorbing(l: usize, q: usize, gamma: f64) -> Result<Self> {
        Self::new(l, q, Complex64::new(0.0, -gamma))
    }

    /// Real impurity `V`.
    pub fn real(l: usize, q: usize, v: f64) -> Result<Self> {
        Self::new(l, q, Complex64::new(v, 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::InvalidL(self.l));
        }
        if self.q < 1 || self.q > self.l {
            return Err(Error::InvalidQ { q: self.q, l: self.l });
        }
        if !(self.impurity.re.is_finite() && self.impurity.im.is_finite()) {
            return Err(Error::InvalidParameter("impurity must be finite".into()));
        }
        Ok(())
    }

    /// `γ` for an absorbing impurity (minus the imaginary part).
    pub fn gamma(&self) -> f64 {
        -self.impurity.im
    }

    pub fn is_absorbing(&self) -> bool {
        self.impurity.im < 0.0
    }

    pub fn is_real(&self) -> bool {
        self.impurity.im == 0.0
    }

    pub fn with_impurity(self, impurity: Complex64) -> Self {
        Self { impurity, ..self }
    }
}

/// Central impurity site: `L/2` for even `L`, `(L+1)/2` for odd `L`.
pub fn central_site(l: usize) -> usize {
    if l % 2 == 0 {
        l / 2
    } else {
        (l + 1) / 2
    }
}

/// Complex symmetric tridiagonal matrix: one diagonal and one off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagOperator {
    diag: Vec<Complex64>,
    offdiag: Vec<Complex64>,
}

impl TridiagOperator {
    pub fn new(diag: Vec<Complex64>, offdiag: Vec<Complex64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len().saturating_sub(1),
                got: offdiag.len(),
            });
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[Complex64] {
        &self.offdiag
    }

    /// `H v` in O(dim).
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        self.apply_into(v, &mut out);
        Ok(out)
    }

    /// `out = H v`; both slices must have length `dim`.
    pub(crate) fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        for j in 0..n {
            let mut acc = self.diag[j] * v[j];
            if j > 0 {
                acc += self.offdiag[j - 1] * v[j - 1];
            }
            if j + 1 < n {
                acc += self.offdiag[j] * v[j + 1];
            }
            out[j] = acc;
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.diag.iter().sum()
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            m[j * n + j] = self.diag[j];
            if j + 1 < n {
                m[j * n + j + 1] = self.offdiag[j];
                m[(j + 1) * n + j] = self.offdiag[j];
            }
        }
        m
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j].norm();
                if j > 0 {
                    s += self.offdiag[j - 1].norm();
                }
                if j + 1 < n {
                    s += self.offdiag[j].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

/// The `L×L` chain Hamiltonian: `-1` on both off-diagonals, the impurity on site `q`.
pub fn build_hamiltonian(params: &LatticeParams) -> Result<TridiagOperator> {
    params.validate()?;
    let mut diag = vec![Complex64::new(0.0, 0.0); params.l];
    diag[params.q - 1] = params.impurity;
    let offdiag = vec![Complex64::new(-1.0, 0.0); params.l - 1];
    TridiagOperator::new(diag, offdiag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn builds_absorbing_chain() {
        let h = build_hamiltonian(&LatticeParams::absorbing(4, 2, 1.0).unwrap()).unwrap();
        assert_eq!(h.diag(), &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(h.offdiag(), &[c(-1.0, 0.0); 3]);
    }

    #[test]
    fn gamma_zero_is_hermitian_hopping() {
        let h = build_hamiltonian(&LatticeParams::absorbing(3, 1, 0.0).unwrap()).unwrap();
        let m = h.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[i * 3 + j], m[j * 3 + i].conj());
            }
        }
        assert!(h.diag().iter().all(|d| d.norm() == 0.0));
    }

    #[test]
    fn builds_real_impurity() {
        let h = build_hamiltonian(&LatticeParams::real(5, 3, 2.5).unwrap()).unwrap();
        let expected: Vec<_> = [0.0, 0.0, 2.5, 0.0, 0.0].iter().map(|&x| c(x, 0.0)).collect();
        assert_eq!(h.diag(), expected.as_slice());
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(matches!(LatticeParams::absorbing(4, 9, 1.0), Err(Error::InvalidQ { .. })));
        assert!(matches!(LatticeParams::absorbing(4, 0, 1.0), Err(Error::InvalidQ { .. })));
        assert!(matches!(LatticeParams::absorbing(1, 1, 1.0), Err(Error::InvalidL(1))));
        let raw = LatticeParams { l: 3, q: 4, impurity: c(0.0, 0.0) };
        assert!(build_hamiltonian(&raw).is_err());
    }

    #[test]
    fn apply_reads_column() {
        let h = build_hamiltonian(&LatticeParams::absorbing(3, 2, 2.0).unwrap()).unwrap();
        let e2 = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        assert_eq!(h.apply(&e2).unwrap(), vec![c(-1.0, 0.0), c(0.0, -2.0), c(-1.0, 0.0)]);
    }

    #[test]
    fn apply_open_chain_eigenvector() {
        let l = 5;
        let h = build_hamiltonian(&LatticeParams::absorbing(l, 3, 0.0).unwrap()).unwrap();
        let v: Vec<_> = (1..=l).map(|j| c((j as f64 * PI / (l + 1) as f64).sin(), 0.0)).collect();
        let hv = h.apply(&v).unwrap();
        // dense matvec as the oracle
        let m = h.to_dense();
        let lam = -2.0 * (PI / 6.0).cos();
        for i in 0..l {
            let dense: Complex64 = (0..l).map(|k| m[i * l + k] * v[k]).sum();
            assert!((dense - hv[i]).norm() < 1e-14);
            assert!((hv[i] - v[i] * lam).norm() < 1e-14);
        }
    }

    #[test]
    fn apply_zero_and_mismatch() {
        let h = build_hamiltonian(&LatticeParams::absorbing(4, 2, 1.0).unwrap()).unwrap();
        assert_eq!(h.apply(&[c(0.0, 0.0); 4]).unwrap(), vec![c(0.0, 0.0); 4]);
        assert!(matches!(
            h.apply(&[c(0.0, 0.0); 3]),
            Err(Error::DimensionMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn trace_is_impurity() {
        for (l, q, u) in [(14, 7, c(0.0, -2.0)), (8, 4, c(0.0, 0.0)), (42, 21, c(2.5, 0.0))] {
            let h = build_hamiltonian(&LatticeParams::new(l, q, u).unwrap()).unwrap();
            assert_eq!(h.trace(), u);
        }
    }

    #[test]
    fn central_site_convention() {
        assert_eq!(central_site(6), 3);
        assert_eq!(central_site(14), 7);
        assert_eq!(central_site(7), 4);
        assert_eq!(central_site(9), 5);
    }

    fn cvec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b)), n)
    }

    proptest! {
        #[test]
        fn apply_is_linear(
            (l, q) in (2usize..30).prop_flat_map(|l| (Just(l), 1..=l)),
            gamma in 0.0..10.0f64,
            seed in cvec(64),
            a in (-2.0..2.0f64, -2.0..2.0f64),
            b in (-2.0..2.0f64, -2.0..2.0f64),
        ) {
            let h = build_hamiltonian(&LatticeParams::absorbing(l, q, gamma).unwrap()).unwrap();
            let (a, b) = (c(a.0, a.1), c(b.0, b.1));
            let u = &seed[..l];
            let v = &seed[32..32 + l];
            let mix: Vec<_> = u.iter().zip(v).map(|(x, y)| a * x + b * y).collect();
            let lhs = h.apply(&mix).unwrap();
            let hu = h.apply(u).unwrap();
            let hv = h.apply(v).unwrap();
            for j in 0..l {
                prop_assert!((lhs[j] - (a * hu[j] + b * hv[j])).norm() < 1e-12);
            }
        }

        #[test]
        fn hermitian_without_impurity(l in 2usize..30, seed in cvec(64)) {
            let h = build_hamiltonian(&LatticeParams::absorbing(l, 1, 0.0).unwrap()).unwrap();
            let u = &seed[..l];
            let v = &seed[32..32 + l];
            let dot = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
                x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
            };
            // ⟨u, Hv⟩ = ⟨Hu, v⟩
            let lhs = dot(u, &h.apply(v).unwrap());
            let rhs = dot(&h.apply(u).unwrap(), v);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
