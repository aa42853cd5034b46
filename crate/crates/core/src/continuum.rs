//! Plane-wave scattering off an imaginary delta potential `-iγ δ(x)` in the
//! continuum, the reference for the lattice absorption curve.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumParams {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for ContinuumParams {
    /// `ħ = 1`, `m = 1/2`, so `E = k²`.
    fn default() -> Self {
        Self { hbar: 1.0, mass: 0.5 }
    }
}

impl ContinuumParams {
    /// `ħ² k / m`, the strength at which absorption peaks.
    pub fn gamma_star(&self, k: f64) -> f64 {
        self.hbar * self.hbar * k / self.mass
    }

    fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.mass > 0.0) {
            return Err(Error::InvalidParameter("hbar and mass must be positive".into()));
        }
        Ok(())
    }
}

/// `(r, t)` amplitudes. Matching `ψ'` across the delta gives
/// `t = s/(s+γ)`, `r = -γ/(s+γ)` with `s = ħ²k/m`.
pub fn continuum_amplitudes(params: &ContinuumParams, gamma: f64, k: f64) -> Result<(Complex64, Complex64)> {
    params.validate()?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("k = {k} must be positive")));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be finite and >= 0")));
    }
    let s = params.gamma_star(k);
    let t = s / (s + gamma);
    let r = -gamma / (s + gamma);
    Ok((Complex64::new(r, 0.0), Complex64::new(t, 0.0)))
}

/// `(R, T, A)` with `A = 1 - R - T = 2sγ/(s+γ)²`.
pub fn continuum_rta(params: &ContinuumParams, gamma: f64, k: f64) -> Result<(f64, f64, f64)> {
    let (r, t) = continuum_amplitudes(params, gamma, k)?;
    let (rr, tt) = (r.norm_sqr(), t.norm_sqr());
    Ok((rr, tt, 1.0 - rr - tt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transparent_without_absorption() {
        let (r, t) = continuum_amplitudes(&ContinuumParams::default(), 0.0, 1.3).unwrap();
        assert_eq!(r.norm(), 0.0);
        assert_eq!(t, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn half_absorbed_at_peak() {
        let p = ContinuumParams::default();
        let k = 0.7;
        let (r, t, a) = continuum_rta(&p, p.gamma_star(k), k).unwrap();
        assert!((r - 0.25).abs() < 1e-15 && (t - 0.25).abs() < 1e-15 && (a - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = ContinuumParams::default();
        assert!(continuum_rta(&p, 1.0, 0.0).is_err());
        assert!(continuum_rta(&p, -1.0, 1.0).is_err());
        assert!(continuum_rta(&ContinuumParams { hbar: 1.0, mass: 0.0 }, 1.0, 1.0).is_err());
    }
}
