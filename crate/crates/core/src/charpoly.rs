//! Characteristic polynomial `P_{L,q}(λ) = det(λI - H)` of the chain with an
//! absorbing impurity `-iγ`, evaluated through the three-term sequence
//!
//! ```text
//! K_{-1} = 0,  K_0 = 1,  K_n = λ K_{n-1} - K_{n-2}
//! P_{L,q} = K_{q-1} K_{L-q+1} + (iγ K_{q-1} - K_{q-2}) K_{L-q}
//! ```
//!
//! `K_n(2cos θ) = sin((n+1)θ)/sin θ`, so the sequence is a Chebyshev polynomial
//! of the second kind in `λ/2`. Evaluation never forms square roots, so band
//! edges `λ = ±2` need no special handling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::LatticeParams;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Rescale once a running value exceeds `2^RESCALE_BITS`.
const RESCALE_BITS: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPolyParams {
    pub l: usize,
    pub q: usize,
    pub gamma: f64,
}

impl CharPolyParams {
    pub fn new(l: usize, q: usize, gamma: f64) -> Result<Self> {
        if l < 1 {
            return Err(Error::InvalidL(l));
        }
        if q < 1 || q > l {
            return Err(Error::InvalidQ { q, l });
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter("gamma must be finite".into()));
        }
        Ok(Self { l, q, gamma })
    }

    /// Only defined for purely imaginary impurities.
    pub fn from_lattice(p: &LatticeParams) -> Result<Self> {
        if p.impurity.re != 0.0 {
            return Err(Error::InvalidParameter(
                "characteristic-polynomial backend needs a purely imaginary impurity".into(),
            ));
        }
        Self::new(p.l, p.q, p.gamma())
    }

    pub fn lattice(&self) -> LatticeParams {
        LatticeParams { l: self.l, q: self.q, impurity: Complex64::new(0.0, -self.gamma) }
    }
}

/// A complex value stored as `mant * 2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mant: Complex64,
    pub exp2: i32,
}

impl Scaled {
    pub fn to_complex(self) -> Complex64 {
        self.mant * pow2(self.exp2)
    }

    /// Natural log of the magnitude; finite even when `to_complex` overflows.
    pub fn ln_abs(self) -> f64 {
        self.mant.norm().ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }
}

fn pow2(e: i32) -> f64 {
    // powi(2, e) overflows to inf / underflows to 0 naturally; split to avoid
    // intermediate overflow when the mantissa is tiny.
    if e.abs() <= 1000 {
        2f64.powi(e)
    } else if e > 0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// `(K_n, K_{n-1})` and their λ-derivatives, all scaled by `2^-exp2`.
#[derive(Debug, Clone, Copy)]
struct KPair {
    k: Complex64,
    k_prev: Complex64,
    dk: Complex64,
    dk_prev: Complex64,
    exp2: i32,
}

fn k_pair(n: i64, lambda: Complex64) -> KPair {
    if n < 0 {
        // K_{-1} = 0, K_{-2} = 0 (only reached for n = -1 when q = 1 asks for K_{q-2}).
        return KPair { k: ZERO, k_prev: ZERO, dk: ZERO, dk_prev: ZERO, exp2: 0 };
    }
    let mut p = KPair { k: ONE, k_prev: ZERO, dk: ZERO, dk_prev: ZERO, exp2: 0 };
    let threshold = 2f64.powi(RESCALE_BITS);
    let shrink = 2f64.powi(-RESCALE_BITS);
    for _ in 0..n {
        let k_next = lambda * p.k - p.k_prev;
        let dk_next = p.k + lambda * p.dk - p.dk_prev;
        p.k_prev = p.k;
        p.dk_prev = p.dk;
        p.k = k_next;
        p.dk = dk_next;
        let big = p.k.norm().max(p.dk.norm()).max(p.k_prev.norm());
        if big > threshold {
            p.k *= shrink;
            p.k_prev *= shrink;
            p.dk *= shrink;
            p.dk_prev *= shrink;
            p.exp2 += RESCALE_BITS;
        }
    }
    p
}

/// `K_n(λ)` by forward recurrence; zero for `n < 0`.
pub fn k_eval(n: i64, lambda: Complex64) -> Complex64 {
    if n < 0 {
        return ZERO;
    }
    let (mut prev, mut cur) = (ZERO, ONE);
    for _ in 0..n {
        let next = lambda * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `dK_n/dλ`, carried alongside the recurrence.
pub fn k_derivative(n: i64, lambda: Complex64) -> Complex64 {
    let p = k_pair(n, lambda);
    p.dk * pow2(p.exp2)
}

/// `P` and `dP/dλ` sharing one scale factor.
fn eval_scaled(params: &CharPolyParams, lambda: Complex64) -> (Scaled, Scaled) {
    let (l, q) = (params.l as i64, params.q as i64);
    let shift = Complex64::new(0.0, params.gamma);
    // left block carries (K_{q-1}, K_{q-2}); right block carries (K_{L-q+1}, K_{L-q})
    let a = k_pair(q - 1, lambda);
    let b = k_pair(l - q + 1, lambda);
    let coupling = shift * a.k - a.k_prev;
    let dcoupling = shift * a.dk - a.dk_prev;
    let p = a.k * b.k + coupling * b.k_prev;
    let dp = a.dk * b.k + a.k * b.dk + dcoupling * b.k_prev + coupling * b.dk_prev;
    let exp2 = a.exp2 + b.exp2;
    (Scaled { mant: p, exp2 }, Scaled { mant: dp, exp2 })
}

/// `P_{L,q}(λ)`; may overflow to infinity for very large `|λ|^L`, see
/// [`charpoly_eval_scaled`].
pub fn charpoly_eval(params: &CharPolyParams, lambda: Complex64) -> Complex64 {
    eval_scaled(params, lambda).0.to_complex()
}

pub fn charpoly_eval_scaled(params: &CharPolyParams, lambda: Complex64) -> Scaled {
    eval_scaled(params, lambda).0
}

pub fn charpoly_derivative(params: &CharPolyParams, lambda: Complex64) -> Complex64 {
    eval_scaled(params, lambda).1.to_complex()
}

/// Newton correction `P/P'`, free of overflow because both share one scale.
pub fn newton_ratio(params: &CharPolyParams, lambda: Complex64) -> Complex64 {
    let (p, dp) = eval_scaled(params, lambda);
    p.mant / dp.mant
}

/// `|P(-λ*) - (-1)^L P(λ)*|`; zero for an exact implementation.
pub fn symmetry_check(params: &CharPolyParams, lambda: Complex64) -> f64 {
    let mirrored = charpoly_eval(params, -lambda.conj());
    let sign = if params.l % 2 == 0 { 1.0 } else { -1.0 };
    (mirrored - sign * charpoly_eval(params, lambda).conj()).norm()
}

/// `(K_{L/2} + i K_{L/2-1})^2`, the closed form of `P_{L,L/2}` at `γ = 2`.
pub fn perfect_square(l: usize, lambda: Complex64) -> Complex64 {
    let half = (l / 2) as i64;
    let f = k_eval(half, lambda) + Complex64::i() * k_eval(half - 1, lambda);
    f * f
}
