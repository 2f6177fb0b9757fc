//! Brute-force integration of the exact coupled amplitude equations over the
//! truncated mode grid, in the rotating frame at the source-atom frequency.
//!
//! In that frame the huge optical carrier `m0·Δ_c` drops out and only the
//! detunings survive: the atomic amplitudes evolve with effective frequencies
//! `(0, -δ, 0)` and mode `m` with `m·Δ_c`,
//!
//! ```text
//! ċ₁ = -i·Σ_m g₁m b_m
//! ċ₂ = -i·(-δ·c₂ + Σ_m g₂m b_m)
//! ċ₃ = -i·Σ_m g₃m b_m
//! ḃ_m = -i·(m·Δ_c·b_m + Σ_j g*_jm c_j)
//! ```
//!
//! This module is the numerical oracle for every closed-form result. The
//! integrator is an adaptive Dormand-Prince 5(4) pair; a fixed-step RK4 is
//! provided for reproducibility runs. Causality fronts are resolved only to
//! ~`1/(M·Δ_c)`, so the turn-on times are exact only in the `M → ∞` limit.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // used for f64 math in no_std builds; shadowed when dev-deps link std
use num_traits::Float;

use crate::params::{Atom, SystemConfig};
use crate::trace::{AmplitudeTrace, ModeRecord, Provenance};

/// Tolerances and limits for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_end: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1e-2,
            t_end: 1.0,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> bool {
        self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0 && self.t_end > 0.0
    }
}

/// The single-excitation state at one instant: atomic amplitudes plus the
/// `2M + 1` mode amplitudes (indexed by `m + M`).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub t: f64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
    pub modes: Vec<Complex64>,
}

impl QuantumState {
    /// Total excitation number `|c₁|² + |c₂|² + |c₃|² + Σ|b_m|²`; conserved
    /// (= 1) by the unitary evolution up to integrator error.
    pub fn norm_sq(&self) -> f64 {
        self.c1.norm_sqr()
            + self.c2.norm_sqr()
            + self.c3.norm_sqr()
            + self.modes.iter().map(|b| b.norm_sqr()).sum::<f64>()
    }
}

/// `|ψ(0)⟩ = |e,g,g;0⟩`: only the source atom excited, no photons.
pub fn initial_state(cfg: &SystemConfig) -> QuantumState {
    QuantumState {
        t: 0.0,
        c1: Complex64::new(1.0, 0.0),
        c2: Complex64::new(0.0, 0.0),
        c3: Complex64::new(0.0, 0.0),
        modes: vec![Complex64::new(0.0, 0.0); cfg.mode_count()],
    }
}

/// Right-hand side of the coupled amplitude equations at `state`, in the
/// rotating frame. Returned as a state-shaped derivative (`t` carried over).
pub fn rhs(cfg: &SystemConfig, state: &QuantumState) -> QuantumState {
    let engine = Engine::new(cfg);
    let y = flatten(state);
    let mut dy = vec![Complex64::new(0.0, 0.0); y.len()];
    engine.rhs(&y, &mut dy);
    unflatten(state.t, &dy)
}

/// Energy expectation value in the rotating frame,
/// `-δ|c₂|² + Σ_m mΔ_c|b_m|² + 2Σ_{j,m} g_jm·Re(c_j* b_m)`;
/// constant under the exact evolution (Hermitian generator).
pub fn rotating_frame_energy(cfg: &SystemConfig, state: &QuantumState) -> f64 {
    let engine = Engine::new(cfg);
    let c = [state.c1, state.c2, state.c3];
    let mut energy = -cfg.delta * state.c2.norm_sqr();
    for (k, b) in state.modes.iter().enumerate() {
        energy += engine.freq[k] * b.norm_sqr();
        let coupling = engine.g1[k] * c[0] + engine.g2[k] * c[1] + engine.g3[k] * c[2];
        energy += 2.0 * (coupling.conj() * b).re;
    }
    energy
}

/// Integration failed before reaching `t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeError {
    /// Step size collapsed below the floating-point resolution of `t`.
    StepSizeCollapse { at: f64 },
    /// Step budget exhausted without reaching the requested tolerance.
    ToleranceFailure { at: f64 },
}

impl fmt::Display for OdeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OdeError::StepSizeCollapse { at } => {
                write!(f, "step size collapsed at t = {at}")
            }
            OdeError::ToleranceFailure { at } => {
                write!(f, "step budget exhausted at t = {at}")
            }
        }
    }
}

/// Output of [`evolve`]: the sampled trace plus integration diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub trace: AmplitudeTrace,
    /// Largest `|norm² - 1|` seen at any accepted step.
    pub norm_drift: f64,
    pub steps: usize,
    pub rhs_evals: usize,
}

struct Engine {
    delta: f64,
    g1: Vec<f64>,
    g2: Vec<f64>,
    g3: Vec<f64>,
    freq: Vec<f64>,
}

impl Engine {
    fn new(cfg: &SystemConfig) -> Self {
        Engine {
            delta: cfg.delta,
            g1: cfg.coupling_row(Atom::Source),
            g2: cfg.coupling_row(Atom::Scatterer),
            g3: cfg.coupling_row(Atom::Detector),
            freq: cfg.mode_offsets().map(|m| cfg.mode_detuning(m)).collect(),
        }
    }

    /// `dy = -i·H·y` over the flat layout `[c1, c2, c3, b_{-M} .. b_{+M}]`.
    /// The mode-sum reductions and the mode updates share one pass.
    fn rhs(&self, y: &[Complex64], dy: &mut [Complex64]) {
        #[inline(always)]
        fn neg_i(z: Complex64) -> Complex64 {
            Complex64::new(z.im, -z.re)
        }
        let (c, b) = y.split_at(3);
        let (dc, db) = dy.split_at_mut(3);
        let mut s1 = Complex64::new(0.0, 0.0);
        let mut s2 = Complex64::new(0.0, 0.0);
        let mut s3 = Complex64::new(0.0, 0.0);
        for k in 0..b.len() {
            let bk = b[k];
            s1 += self.g1[k] * bk;
            s2 += self.g2[k] * bk;
            s3 += self.g3[k] * bk;
            // Couplings are real sine-mode amplitudes, so g* = g here.
            db[k] = neg_i(self.freq[k] * bk + self.g1[k] * c[0] + self.g2[k] * c[1] + self.g3[k] * c[2]);
        }
        dc[0] = neg_i(s1);
        dc[1] = neg_i(-self.delta * c[1] + s2);
        dc[2] = neg_i(s3);
    }
}

fn flatten(state: &QuantumState) -> Vec<Complex64> {
    let mut y = Vec::with_capacity(3 + state.modes.len());
    y.push(state.c1);
    y.push(state.c2);
    y.push(state.c3);
    y.extend_from_slice(&state.modes);
    y
}

fn unflatten(t: f64, y: &[Complex64]) -> QuantumState {
    QuantumState {
        t,
        c1: y[0],
        c2: y[1],
        c3: y[2],
        modes: y[3..].to_vec(),
    }
}

fn norm_sq_flat(y: &[Complex64]) -> f64 {
    y.iter().map(|z| z.norm_sqr()).sum()
}

// Dormand-Prince 5(4) tableau.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 50_000_000;

/// Integrates the coupled amplitude equations from `|e,g,g;0⟩` and samples
/// the state at `sample_times` (sorted, within `[0, t_end]`).
///
/// Adaptive Dormand-Prince 5(4) with a PI-free standard controller; the step
/// is clamped to land exactly on each sample time. Records the largest norm
/// drift seen at accepted steps.
pub fn evolve(
    cfg: &SystemConfig,
    settings: &IntegratorSettings,
    sample_times: &[f64],
    record_modes: bool,
) -> Result<OdeSolution, OdeError> {
    debug_assert!(settings.validate());
    debug_assert!(sample_times.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(sample_times
        .iter()
        .all(|&t| (0.0..=settings.t_end).contains(&t)));

    let engine = Engine::new(cfg);
    let n = 3 + cfg.mode_count();
    let mut y = flatten(&initial_state(cfg));
    let mut t = 0.0_f64;

    let mut k: [Vec<Complex64>; 7] = core::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]);
    let mut ytmp = vec![Complex64::new(0.0, 0.0); n];
    let mut ynew = vec![Complex64::new(0.0, 0.0); n];

    let mut recorder = Recorder::new(cfg, sample_times, record_modes);
    recorder.record_if_due(t, &y);

    let omega_max = cfg.mode_half_width as f64 * cfg.delta_c;
    let mut h = settings
        .max_step
        .min(0.05 / omega_max.max(1.0))
        .min(settings.t_end / 10.0);

    engine.rhs(&y, &mut k[0]);
    let mut rhs_evals = 1usize;
    let mut steps = 0usize;
    let mut norm_drift = 0.0_f64;

    while t < settings.t_end {
        if steps >= MAX_STEPS {
            return Err(OdeError::ToleranceFailure { at: t });
        }
        if h <= 4.0 * f64::EPSILON * t.max(1.0) {
            return Err(OdeError::StepSizeCollapse { at: t });
        }
        // Clamp onto the next sample time (or the end) so samples are exact.
        let target = recorder.next_time().unwrap_or(settings.t_end);
        let landing = t + h >= target;
        let h_step = if landing { target - t } else { h };
        if landing && h_step <= 4.0 * f64::EPSILON * target.max(1.0) {
            // Gap below floating-point resolution: snap without integrating.
            t = target;
            recorder.record_if_due(t, &y);
            continue;
        }

        // Stages 2..6.
        stage(&mut ytmp, &y, h_step, &[(&k[0], A2[0])]);
        engine.rhs(&ytmp, &mut k[1]);
        stage(&mut ytmp, &y, h_step, &[(&k[0], A3[0]), (&k[1], A3[1])]);
        engine.rhs(&ytmp, &mut k[2]);
        stage(
            &mut ytmp,
            &y,
            h_step,
            &[(&k[0], A4[0]), (&k[1], A4[1]), (&k[2], A4[2])],
        );
        engine.rhs(&ytmp, &mut k[3]);
        stage(
            &mut ytmp,
            &y,
            h_step,
            &[(&k[0], A5[0]), (&k[1], A5[1]), (&k[2], A5[2]), (&k[3], A5[3])],
        );
        engine.rhs(&ytmp, &mut k[4]);
        stage(
            &mut ytmp,
            &y,
            h_step,
            &[
                (&k[0], A6[0]),
                (&k[1], A6[1]),
                (&k[2], A6[2]),
                (&k[3], A6[3]),
                (&k[4], A6[4]),
            ],
        );
        engine.rhs(&ytmp, &mut k[5]);
        // 5th-order solution and the FSAL stage.
        stage(
            &mut ynew,
            &y,
            h_step,
            &[
                (&k[0], B5[0]),
                (&k[2], B5[2]),
                (&k[3], B5[3]),
                (&k[4], B5[4]),
                (&k[5], B5[5]),
            ],
        );
        engine.rhs(&ynew, &mut k[6]);
        rhs_evals += 6;

        // Weighted RMS error over the embedded 4th-order difference.
        let mut err_sq = 0.0_f64;
        for i in 0..n {
            let e = h_step
                * (ERR[0] * k[0][i]
                    + ERR[2] * k[2][i]
                    + ERR[3] * k[3][i]
                    + ERR[4] * k[4][i]
                    + ERR[5] * k[5][i]
                    + ERR[6] * k[6][i]);
            let sc = settings.abs_tol + settings.rel_tol * y[i].norm().max(ynew[i].norm());
            let r = e.norm() / sc;
            err_sq += r * r;
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            // Land exactly on clamped targets so endpoint arithmetic cannot
            // leave a sub-epsilon residual gap.
            t = if landing { target } else { t + h_step };
            core::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6); // FSAL
            steps += 1;
            norm_drift = norm_drift.max((norm_sq_flat(&y) - 1.0).abs());
            recorder.record_if_due(t, &y);
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h_step * factor).min(settings.max_step);
    }

    Ok(OdeSolution {
        trace: recorder.finish(),
        norm_drift,
        steps,
        rhs_evals,
    })
}

/// Fixed-step classical RK4 over the same equations, for bit-reproducible
/// runs. Sample times are rounded down to the step grid.
pub fn evolve_rk4(
    cfg: &SystemConfig,
    step: f64,
    t_end: f64,
    sample_times: &[f64],
    record_modes: bool,
) -> OdeSolution {
    debug_assert!(step > 0.0 && t_end > 0.0);
    let engine = Engine::new(cfg);
    let n = 3 + cfg.mode_count();
    let mut y = flatten(&initial_state(cfg));
    let mut recorder = Recorder::new(cfg, sample_times, record_modes);
    recorder.record_if_due(0.0, &y);

    let mut k1 = vec![Complex64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut ytmp = k1.clone();

    let total = (t_end / step).ceil() as usize;
    let mut norm_drift = 0.0_f64;
    let mut rhs_evals = 0usize;
    for i in 0..total {
        let t = i as f64 * step;
        let h = step.min(t_end - t);
        engine.rhs(&y, &mut k1);
        stage(&mut ytmp, &y, h, &[(&k1, 0.5)]);
        engine.rhs(&ytmp, &mut k2);
        stage(&mut ytmp, &y, h, &[(&k2, 0.5)]);
        engine.rhs(&ytmp, &mut k3);
        stage(&mut ytmp, &y, h, &[(&k3, 1.0)]);
        engine.rhs(&ytmp, &mut k4);
        rhs_evals += 4;
        for j in 0..n {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let t_next = t + h;
        norm_drift = norm_drift.max((norm_sq_flat(&y) - 1.0).abs());
        recorder.record_if_due(t_next, &y);
    }

    OdeSolution {
        trace: recorder.finish(),
        norm_drift,
        steps: total,
        rhs_evals,
    }
}

fn stage(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(&Vec<Complex64>, f64)]) {
    for i in 0..y.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (kvec, a) in terms {
            acc += *a * kvec[i];
        }
        out[i] = y[i] + h * acc;
    }
}

struct Recorder<'a> {
    sample_times: &'a [f64],
    next: usize,
    record_modes: bool,
    half_width: i64,
    times: Vec<f64>,
    c1: Vec<Complex64>,
    c2: Vec<Complex64>,
    c3: Vec<Complex64>,
    norm_sq: Vec<f64>,
    mode_samples: Vec<Vec<Complex64>>,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &SystemConfig, sample_times: &'a [f64], record_modes: bool) -> Self {
        Recorder {
            sample_times,
            next: 0,
            record_modes,
            half_width: cfg.mode_half_width,
            times: Vec::with_capacity(sample_times.len()),
            c1: Vec::with_capacity(sample_times.len()),
            c2: Vec::with_capacity(sample_times.len()),
            c3: Vec::with_capacity(sample_times.len()),
            norm_sq: Vec::with_capacity(sample_times.len()),
            mode_samples: Vec::new(),
        }
    }

    fn next_time(&self) -> Option<f64> {
        self.sample_times.get(self.next).copied()
    }

    fn record_if_due(&mut self, t: f64, y: &[Complex64]) {
        while let Some(ts) = self.next_time() {
            // Exact landing is arranged by the step clamp; tolerate rounding.
            if t < ts - 1e-14 {
                break;
            }
            self.times.push(ts);
            self.c1.push(y[0]);
            self.c2.push(y[1]);
            self.c3.push(y[2]);
            self.norm_sq.push(norm_sq_flat(y));
            if self.record_modes {
                self.mode_samples.push(y[3..].to_vec());
            }
            self.next += 1;
        }
    }

    fn finish(self) -> AmplitudeTrace {
        AmplitudeTrace {
            provenance: Provenance::Ode,
            times: self.times,
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
            norm_sq: self.norm_sq,
            modes: self.record_modes.then_some(ModeRecord {
                half_width: self.half_width,
                samples: self.mode_samples,
            }),
        }
    }
}
