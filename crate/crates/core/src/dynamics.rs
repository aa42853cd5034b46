//! Gaussian wavepackets scattered off the impurity, propagated with
//! Crank–Nicolson and step-doubling error control.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::{build_hamiltonian, LatticeParams, TridiagOperator};
use crate::linalg::TridiagLu;
use crate::{Error, Result};

/// Default bound on the initial packet's weight at the edge and impurity sites.
pub const DEFAULT_MAX_OVERLAP: f64 = 1e-4;

/// Smallest step before giving up.
const MIN_DT: f64 = 1e-12;

/// Local error estimates below this are rounding noise.
const ROUNDOFF_FLOOR: f64 = 4.0 * f64::EPSILON;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketSpec {
    /// Centre site (1-based).
    pub j0: usize,
    pub sigma: f64,
    /// Carrier wavevector in `(0, π)`; the packet moves right.
    pub k: f64,
    pub max_overlap: f64,
}

impl WavepacketSpec {
    pub fn new(j0: usize, sigma: f64, k: f64) -> Self {
        Self { j0, sigma, k, max_overlap: DEFAULT_MAX_OVERLAP }
    }

    /// Centred a quarter of the way along the chain.
    pub fn for_chain(l: usize, sigma: f64, k: f64) -> Self {
        Self::new((l / 4).max(1), sigma, k)
    }

    /// Group velocity `2 sin k`.
    pub fn group_velocity(&self) -> f64 {
        2.0 * self.k.sin()
    }

    fn validate(&self, l: usize) -> Result<()> {
        if !(self.k > 0.0 && self.k < PI) {
            return Err(Error::InvalidParameter(format!("k = {} not in (0, pi)", self.k)));
        }
        if !(self.sigma > 1.0 && self.sigma < l as f64 / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma = {} not in (1, L/2) for L = {l}",
                self.sigma
            )));
        }
        if self.j0 < 1 || self.j0 > l {
            return Err(Error::InvalidParameter(format!("j0 = {} not in [1, {l}]", self.j0)));
        }
        if !(self.max_overlap > 0.0) {
            return Err(Error::InvalidParameter("max_overlap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl WaveState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn occupancies(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// `ψ_j ∝ exp(-(j-j0)²/2σ²) e^{ikj}`, unit norm.
///
/// Rejects packets whose weight on sites `1`, `L` and `q` exceeds
/// `spec.max_overlap`.
pub fn init_wavepacket(l: usize, q: usize, spec: &WavepacketSpec) -> Result<WaveState> {
    LatticeParams::absorbing(l, q, 0.0)?;
    spec.validate(l)?;
    let mut amplitudes: Vec<Complex64> = (1..=l)
        .map(|j| {
            let x = j as f64 - spec.j0 as f64;
            Complex64::from_polar((-x * x / (2.0 * spec.sigma * spec.sigma)).exp(), spec.k * j as f64)
        })
        .collect();
    crate::linalg::normalize(&mut amplitudes);
    let mut sites = vec![0, l - 1, q - 1];
    sites.dedup();
    let overlap: f64 = sites.iter().map(|&s| amplitudes[s].norm_sqr()).sum();
    if overlap > spec.max_overlap {
        return Err(Error::OverlapViolation { overlap, threshold: spec.max_overlap });
    }
    Ok(WaveState { amplitudes, time: 0.0 })
}

/// One Crank–Nicolson step of fixed size, factorised once.
struct CnStep {
    lu: TridiagLu,
    half: Complex64,
}

impl CnStep {
    fn new(op: &TridiagOperator, dt: f64) -> Self {
        // (I + i dt/2 H) ψ' = (I - i dt/2 H) ψ
        let half = Complex64::new(0.0, 0.5 * dt);
        let diag: Vec<_> = op.diag().iter().map(|d| Complex64::new(1.0, 0.0) + half * d).collect();
        let off: Vec<_> = op.offdiag().iter().map(|o| half * o).collect();
        let lu = TridiagLu::factor(&off, &diag, &off, 0.0);
        Self { lu, half }
    }

    fn apply(&self, op: &TridiagOperator, psi: &[Complex64], out: &mut [Complex64]) {
        // out = (I - i dt/2 H) psi, written directly from the bands
        let n = psi.len();
        let (d, o) = (op.diag(), op.offdiag());
        for j in 0..n {
            let mut h = d[j] * psi[j];
            if j > 0 {
                h += o[j - 1] * psi[j - 1];
            }
            if j + 1 < n {
                h += o[j] * psi[j + 1];
            }
            out[j] = psi[j] - self.half * h;
        }
        self.lu.solve_in_place(out);
    }
}

/// Caches factorisations by step size; adaptive steps only take values
/// `dt0 · 2^(k/4)` plus the final partial step, so the cache stays small.
struct StepCache<'a> {
    op: &'a TridiagOperator,
    steps: HashMap<u64, CnStep>,
}

impl<'a> StepCache<'a> {
    fn new(op: &'a TridiagOperator) -> Self {
        Self { op, steps: HashMap::new() }
    }

    fn step(&mut self, dt: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let op = self.op;
        let s = self.steps.entry(dt.to_bits()).or_insert_with(|| CnStep::new(op, dt));
        s.apply(op, psi, out);
    }
}

/// One accepted step: states at its start, midpoint and end, in the frame
/// rotating at the reference energy (occupancies are unaffected).
#[derive(Debug)]
pub struct StepRecord<'a> {
    pub t_start: f64,
    pub dt: f64,
    pub start: &'a [Complex64],
    pub mid: &'a [Complex64],
    pub end: &'a [Complex64],
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Sum of accepted local error estimates; bounds the global error since
    /// the propagator does not expand.
    pub error_estimate: f64,
    /// Largest relative per-step norm increase (zero for a monotone run).
    pub max_norm_increase: f64,
}

fn initial_dt(op: &TridiagOperator) -> f64 {
    let scale = op.diag().iter().map(|d| d.norm()).fold(1.0, f64::max);
    0.05 / scale
}

/// State at absolute time `t_final`, global error within about `tol` in the
/// 2-norm.
pub fn propagate(op: &TridiagOperator, state: &WaveState, t_final: f64, tol: f64) -> Result<WaveState> {
    propagate_with(op, state, t_final, tol, |_| {}).map(|(s, _)| s)
}

/// [`propagate`] with a callback on every accepted step.
///
/// Integrates `H - E0` with `E0 = Re⟨ψ|H|ψ⟩/⟨ψ|ψ⟩` and restores the exact
/// phase `e^{-iE0 t}` at the end: the bulk of the Crank–Nicolson phase error
/// of a narrow-band packet disappears, which allows much longer steps.
pub fn propagate_with<F>(
    op: &TridiagOperator,
    state: &WaveState,
    t_final: f64,
    tol: f64,
    mut on_step: F,
) -> Result<(WaveState, PropagationStats)>
where
    F: FnMut(&StepRecord<'_>),
{
    check_inputs(op, state, t_final)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be positive")));
    }
    let n = op.dim();
    let span = t_final - state.time;
    let mut stats = PropagationStats::default();
    let mut psi = state.amplitudes.clone();
    let mut t = state.time;
    if span == 0.0 {
        return Ok((WaveState { amplitudes: psi, time: t }, stats));
    }
    let mut norm = state.norm_sqr();
    let e0 = reference_energy(op, &psi, norm);
    let shifted = TridiagOperator::new(
        op.diag().iter().map(|d| d - e0).collect(),
        op.offdiag().to_vec(),
    )?;
    let mut cache = StepCache::new(&shifted);
    // Steps live on the ladder dt0 * 2^(rung/4) so that factorizations are reused.
    let dt0 = initial_dt(op);
    let mut rung: i32 = 0;
    let (mut full, mut mid, mut end) = (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);

    while t < t_final {
        let dt = dt0 * 2f64.powf(f64::from(rung) / 4.0);
        if dt < MIN_DT {
            return Err(Error::StepUnderflow { t });
        }
        let remaining = t_final - t;
        // Stretch the step slightly rather than leave a sliver at the end.
        let h = if remaining <= 1.01 * dt { remaining } else { dt };
        cache.step(h, &psi, &mut full);
        cache.step(0.5 * h, &psi, &mut mid);
        cache.step(0.5 * h, &mid, &mut end);
        let err = full.iter().zip(&end).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() / 3.0;
        let allowed = (tol * h / span).max(ROUNDOFF_FLOOR);
        // err / allowed scales as h^2: one rung changes it by sqrt(2).
        let rungs = 2.0 * (0.8 * allowed / err.max(f64::MIN_POSITIVE)).log2();
        if err <= allowed {
            on_step(&StepRecord { t_start: t, dt: h, start: &psi, mid: &mid, end: &end });
            let new_norm: f64 = end.iter().map(|z| z.norm_sqr()).sum();
            stats.max_norm_increase = stats.max_norm_increase.max((new_norm - norm) / norm.max(f64::MIN_POSITIVE));
            norm = new_norm;
            std::mem::swap(&mut psi, &mut end);
            t = if h == remaining { t_final } else { t + h };
            stats.accepted += 1;
            stats.error_estimate += err;
            if h == dt {
                rung += rungs.floor().clamp(0.0, 4.0) as i32;
            }
        } else {
            stats.rejected += 1;
            rung += rungs.floor().clamp(-8.0, -1.0) as i32;
        }
    }
    let phase = Complex64::from_polar(1.0, -e0 * span);
    psi.iter_mut().for_each(|z| *z *= phase);
    Ok((WaveState { amplitudes: psi, time: t_final }, stats))
}

fn reference_energy(op: &TridiagOperator, psi: &[Complex64], norm: f64) -> f64 {
    if norm == 0.0 {
        return 0.0;
    }
    let mut h_psi = vec![ZERO; psi.len()];
    op.apply_into(psi, &mut h_psi);
    crate::linalg::dot(psi, &h_psi).re / norm
}

/// Fixed-step Crank–Nicolson; the last step is shortened to land on `t_final`.
pub fn propagate_fixed(op: &TridiagOperator, state: &WaveState, t_final: f64, dt: f64) -> Result<WaveState> {
    check_inputs(op, state, t_final)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    let n = op.dim();
    let mut cache = StepCache::new(op);
    let mut psi = state.amplitudes.clone();
    let mut next = vec![ZERO; n];
    let steps = ((t_final - state.time) / dt).round() as usize;
    let mut t = state.time;
    for _ in 0..steps {
        let h = dt.min(t_final - t);
        if h <= 0.0 {
            break;
        }
        cache.step(h, &psi, &mut next);
        std::mem::swap(&mut psi, &mut next);
        t += h;
    }
    if t_final - t > 1e-12 * t_final.abs().max(1.0) {
        cache.step(t_final - t, &psi, &mut next);
        std::mem::swap(&mut psi, &mut next);
    }
    Ok(WaveState { amplitudes: psi, time: t_final })
}

fn check_inputs(op: &TridiagOperator, state: &WaveState, t_final: f64) -> Result<()> {
    if state.amplitudes.len() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: state.amplitudes.len() });
    }
    if !(t_final.is_finite() && t_final >= state.time) {
        return Err(Error::InvalidParameter(format!(
            "t_final = {t_final} precedes the state time {}",
            state.time
        )));
    }
    Ok(())
}

/// Reflected weight on sites `1..=q` and transmitted weight on `q+1..=L`.
pub fn measure_rt(state: &WaveState, q: usize) -> (f64, f64) {
    let occ = state.occupancies();
    let r = occ[..q].iter().sum();
    let t = occ[q..].iter().sum();
    (r, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtaPoint {
    pub gamma: f64,
    pub k: f64,
    pub r: f64,
    pub t: f64,
    /// `1 - R - T` at the observation time.
    pub a: f64,
    /// `‖ψ‖²` at the observation time.
    pub norm_final: f64,
    /// `2γ ∫ |ψ_q|² dt`; equals `a` up to the integration error.
    pub absorbed_integral: f64,
    pub t_obs: f64,
}

/// Observation time: the packet centre has passed the impurity by 0.8 of the
/// distance to the nearer wall, but no part of either fragment has come back
/// over the impurity yet.
pub fn observation_time(l: usize, q: usize, spec: &WavepacketSpec) -> Result<f64> {
    LatticeParams::absorbing(l, q, 0.0)?;
    spec.validate(l)?;
    if spec.j0 >= q {
        return Err(Error::NoValidWindow(format!(
            "packet centre j0 = {} must lie left of the impurity q = {q}",
            spec.j0
        )));
    }
    let v = spec.group_velocity();
    let approach = (q - spec.j0) as f64;
    let wall = (q - 1).min(l - q) as f64;
    let width = 3.0 * spec.sigma;
    let t_obs = ((approach + 0.8 * wall) / v).max((approach + width) / v);
    let t_return = (approach + 2.0 * wall - width) / v;
    if t_obs >= t_return {
        return Err(Error::NoValidWindow(format!(
            "packet (sigma = {}) too wide for a {l}-site chain: separation at t = {t_obs:.3}, return at t = {t_return:.3}",
            spec.sigma
        )));
    }
    Ok(t_obs)
}

/// One scattering run at absorption `γ`.
pub fn scatter_once(l: usize, q: usize, spec: &WavepacketSpec, gamma: f64, tol: f64) -> Result<RtaPoint> {
    scatter_detailed(l, q, spec, gamma, tol, None).map(|(p, _)| p)
}

/// [`scatter_once`] with an optional fixed observation time, also returning
/// step statistics.
pub fn scatter_detailed(
    l: usize,
    q: usize,
    spec: &WavepacketSpec,
    gamma: f64,
    tol: f64,
    t_obs: Option<f64>,
) -> Result<(RtaPoint, PropagationStats)> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be finite and >= 0")));
    }
    let params = LatticeParams::absorbing(l, q, gamma)?;
    let t_obs = match t_obs {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(Error::InvalidParameter(format!("t_obs = {t} must be positive"))),
        None => observation_time(l, q, spec)?,
    };
    let op = build_hamiltonian(&params)?;
    let psi0 = init_wavepacket(l, q, spec)?;
    let site = q - 1;
    let mut integral = 0.0;
    let (end, stats) = propagate_with(&op, &psi0, t_obs, tol, |s| {
        // trapezoid over both half steps
        let w = |v: &[Complex64]| v[site].norm_sqr();
        integral += 0.25 * s.dt * (w(s.start) + 2.0 * w(s.mid) + w(s.end));
    })?;
    let (r, t) = measure_rt(&end, q);
    let point = RtaPoint {
        gamma,
        k: spec.k,
        r,
        t,
        a: 1.0 - r - t,
        norm_final: end.norm_sqr(),
        absorbed_integral: 2.0 * gamma * integral,
        t_obs,
    };
    Ok((point, stats))
}

/// `(t, j, |ψ_j|²)` samples at `frames` evenly spaced times in `[0, t_final]`
/// and every `site_stride`-th site.
pub fn occupancy_trace(
    op: &TridiagOperator,
    state: &WaveState,
    t_final: f64,
    frames: usize,
    site_stride: usize,
    tol: f64,
) -> Result<Vec<(f64, usize, f64)>> {
    if frames < 2 || site_stride == 0 {
        return Err(Error::InvalidParameter("need frames >= 2 and site_stride >= 1".into()));
    }
    let mut out = Vec::new();
    let mut cur = state.clone();
    let t0 = state.time;
    let frame_tol = tol / (frames - 1) as f64;
    for f in 0..frames {
        let tf = t0 + (t_final - t0) * f as f64 / (frames - 1) as f64;
        if f > 0 {
            cur = propagate(op, &cur, tf, frame_tol)?;
        }
        for (j, w) in cur.occupancies().iter().enumerate().step_by(site_stride) {
            out.push((tf, j + 1, *w));
        }
    }
    Ok(out)
}
