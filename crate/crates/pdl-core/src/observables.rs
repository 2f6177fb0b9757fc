//! Field-level quantities (quantum analytic signal, normally-ordered
//! intensity) and the delay observables, including the detuning sweeps that
//! compare classical phase/group delays with the quantum
//! temporal-center-of-gravity delays.
//!
//! Moments of the step-gated exponential envelopes are evaluated from exact
//! antiderivatives ([`crate::series`]): the anomalous-dispersion signal is a
//! small difference of large moments and would be drowned by quadrature
//! truncation otherwise. The overall normalization of the weak-scattering
//! superposition `c₃ = 𝒩(c₃⁰ + f·c₃ˢ)` cancels in every center-of-gravity
//! ratio, so `𝒩 = 1` throughout.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // used for f64 math in no_std builds; shadowed when dev-deps link std
use num_traits::Float;

use crate::analytic;
use crate::classical::{self, ClassicalMedium};
use crate::numerics::{self, exp_diff_ratio, QuadError};
use crate::params::SystemConfig;
use crate::series::{two_pole_series, MomentError, StepSeries, StepTerm};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A delay observable could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservableError {
    /// The weak-scattering superposition is only meaningful for `f ≤ 0.1`.
    WeakScatteringInvalid { f: f64 },
    Moment(MomentError),
    Quadrature(QuadError),
    /// The signal is identically zero; no arrival time exists.
    ZeroNorm,
}

impl From<MomentError> for ObservableError {
    fn from(e: MomentError) -> Self {
        match e {
            MomentError::ZeroNorm => ObservableError::ZeroNorm,
            other => ObservableError::Moment(other),
        }
    }
}

impl From<QuadError> for ObservableError {
    fn from(e: QuadError) -> Self {
        ObservableError::Quadrature(e)
    }
}

impl fmt::Display for ObservableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableError::WeakScatteringInvalid { f: fv } => {
                write!(f, "weak-scattering superposition requires f <= 0.1, got {fv}")
            }
            ObservableError::Moment(e) => write!(f, "{e}"),
            ObservableError::Quadrature(e) => write!(f, "{e}"),
            ObservableError::ZeroNorm => write!(f, "zero-norm signal has no arrival time"),
        }
    }
}

/// Prefactor `√(ω₁γ₁/2)` of the quantum analytic signal at `z = 3L/4`
/// (`(ħω₁γ₁π/2ε₀VΔ_c)^{1/2}` in natural units).
pub fn field_prefactor(cfg: &SystemConfig) -> f64 {
    (cfg.carrier_frequency() * cfg.gamma1 / 2.0).sqrt()
}

/// Quantum analytic signal at the detector position `z = 3L/4`:
/// `-iΘ(τ)·√(ω₁γ₁/2)·e^{-γ₁τ/2}` without the scatterer, and with it the
/// additional block `-iγ₂/[2δ - i(γ₁-γ₂)]·{e^{-γ₁τ/2} - e^{-(γ₂/2-iδ)τ}}`
/// inside the parentheses (`τ = t - 1/2`).
///
/// Uniformly stable through the degenerate denominator `2δ = i(γ₁-γ₂)`.
pub fn field_envelope(cfg: &SystemConfig, t: f64, with_scatterer: bool) -> Complex64 {
    let tau = t - 0.5;
    if tau <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let a = Complex64::new(0.5 * cfg.gamma1, 0.0);
    let free = Complex64::new((-0.5 * cfg.gamma1 * tau).exp(), 0.0);
    let inner = if with_scatterer && cfg.gamma2 > 0.0 {
        let b = Complex64::new(0.5 * cfg.gamma2, -cfg.delta);
        free - 0.5 * cfg.gamma2 * exp_diff_ratio(a, b, tau)
    } else {
        free
    };
    -I * field_prefactor(cfg) * inner
}

/// [`field_envelope`] as a step-term series (all terms turn on at `t = 1/2`),
/// with the scattering block scaled by `f_scale` (1 for the bare quantum
/// field, the forward-scattering fraction `f` for delay estimates).
pub fn field_series(cfg: &SystemConfig, with_scatterer: bool, f_scale: f64) -> StepSeries {
    let p = -I * field_prefactor(cfg);
    let a = Complex64::new(0.5 * cfg.gamma1, 0.0);
    let free = StepSeries::new(alloc::vec![StepTerm {
        turn_on: 0.5,
        coefficient: p,
        rate: a,
        order: 0,
    }]);
    if !with_scatterer || cfg.gamma2 == 0.0 || f_scale == 0.0 {
        return free;
    }
    let b = Complex64::new(0.5 * cfg.gamma2, -cfg.delta);
    let block = two_pole_series(
        -p * f_scale * cfg.gamma2 / 2.0,
        a,
        b,
        0.5,
        analytic::DEFAULT_CONFLUENCE_THRESHOLD,
    );
    free.concat(block)
}

/// Normally-ordered intensity expectation `⟨:𝓔²:⟩ = |𝓔_q.m.|²` at the
/// detector position, from the closed-form analytic signal.
pub fn intensity_expectation(cfg: &SystemConfig, t: f64, with_scatterer: bool) -> f64 {
    field_envelope(cfg, t, with_scatterer).norm_sqr()
}

/// The same intensity by the independent route: the truncated mode sum
/// `⟨:𝓔²:⟩ = 2ω₁·|Σ_m b_m·sin[(m0+m)πz]|²` at arbitrary position `z`, with
/// the `b`-vector taken from either solver (indexed by `m + M`).
pub fn intensity_from_modes(cfg: &SystemConfig, z: f64, modes: &[Complex64]) -> f64 {
    debug_assert_eq!(modes.len(), cfg.mode_count());
    let sum: Complex64 = cfg
        .mode_offsets()
        .zip(modes.iter())
        .map(|(m, b)| *b * cfg.mode_profile(m, z))
        .sum();
    2.0 * cfg.carrier_frequency() * sum.norm_sqr()
}

/// Temporal center of gravity `∫t·|x|²dt / ∫|x|²dt` of a step-term series,
/// from exact moments.
pub fn arrival_time_series(series: &StepSeries) -> Result<f64, ObservableError> {
    Ok(series.centroid()?)
}

/// Temporal center of gravity of a sampled non-negative signal
/// `t ↦ |a(t)|²`, by adaptive quadrature over doubling windows starting at
/// `start`; the tail is extended until it contributes less than `1e-8`
/// relative to both moments.
pub fn arrival_time_quad<F: Fn(f64) -> f64>(
    intensity: F,
    start: f64,
    initial_window: f64,
) -> Result<f64, ObservableError> {
    debug_assert!(initial_window > 0.0);
    // Step-gated envelopes can carry a boundary layer of arbitrary width at
    // the turn-on (e.g. the 1/γ₃ rise of a fast detector) that uniform
    // panels never sample. Split the first window geometrically toward
    // `start` so every scale down to ~2⁻⁵⁰·w is resolved.
    let window = |f: &dyn Fn(f64) -> f64, a: f64, w: f64, abs_tol: f64| {
        if abs_tol > 0.0 {
            // Tail windows only need accuracy relative to the accumulated
            // moments, not to their own (possibly denormal) magnitude.
            return numerics::integrate_real(f, a, a + w, 1e-10, abs_tol, 4000).map(|r| r.0);
        }
        // Top panel first; the ever-smaller panels below it then converge on
        // an absolute criterion anchored to the running subtotal (their
        // integrands can be pure cancellation noise in relative terms).
        let mut acc = 0.0;
        let mut hi = w;
        for _ in 0..50 {
            let lo = hi / 2.0;
            let floor = 1e-14 * acc.abs();
            acc += numerics::integrate_real(f, a + lo, a + hi, 1e-10, floor, 4000)?.0;
            hi = lo;
        }
        acc += numerics::integrate_real(f, a, a + hi, 1e-10, 1e-14 * acc.abs(), 4000)?.0;
        Ok(acc)
    };
    let mut a = start;
    let mut w = initial_window;
    let mut i0 = 0.0_f64;
    let mut i1 = 0.0_f64;
    for iter in 0..64 {
        let tol0 = if iter == 0 { 0.0 } else { 1e-14 * i0.abs() };
        let tol1 = if iter == 0 { 0.0 } else { 1e-14 * i1.abs() };
        let d0 = window(&|t| intensity(t), a, w, tol0)?;
        let d1 = window(&|t| t * intensity(t), a, w, tol1)?;
        i0 += d0;
        i1 += d1;
        a += w;
        w *= 2.0;
        if iter > 0 && i0 > 0.0 && d0 <= 1e-8 * i0 && d1.abs() <= 1e-8 * i1.abs() {
            return Ok(i1 / i0);
        }
    }
    if i0 <= 0.0 {
        return Err(ObservableError::ZeroNorm);
    }
    Err(ObservableError::Quadrature(QuadError {
        requested: 1e-8,
        achieved: f64::INFINITY,
    }))
}

/// Detector-excitation delay by exact moment integrals of the weak-scattering
/// superposition: the center of gravity of `|c₃⁰ + f·c₃ˢ|²` minus that of
/// `|c₃⁰|²`, exact in `f`.
pub fn delay_c3(cfg: &SystemConfig) -> Result<f64, ObservableError> {
    if cfg.f > 0.1 {
        return Err(ObservableError::WeakScatteringInvalid { f: cfg.f });
    }
    let free = analytic::c3_free_series(cfg);
    let with = free
        .clone()
        .concat(analytic::c3_scatter_series(cfg).scaled(Complex64::new(cfg.f, 0.0)));
    Ok(with.centroid()? - free.centroid()?)
}

/// The same delay to first order in `f`:
/// `2f·[∫τ·Re(c₃⁰c₃ˢ*)/∫|c₃⁰|² - ∫τ|c₃⁰|²·∫Re(c₃⁰c₃ˢ*)/(∫|c₃⁰|²)²]`.
pub fn delay_c3_first_order(cfg: &SystemConfig) -> Result<f64, ObservableError> {
    if cfg.f > 0.1 {
        return Err(ObservableError::WeakScatteringInvalid { f: cfg.f });
    }
    let free = analytic::c3_free_series(cfg);
    let scatter = analytic::c3_scatter_series(cfg);
    let (i0, i1) = free.intensity_moments()?;
    if !(i0 > 0.0) {
        return Err(ObservableError::ZeroNorm);
    }
    let (x0, x1) = free.cross_moments(&scatter)?;
    Ok(2.0 * cfg.f * (x1.re / i0 - i1 * x0.re / (i0 * i0)))
}

/// Closed-form quantum delay `Δt_{c₃} = 4fγ₂(4δ² - γ₂²)/(4δ² + γ₂²)²`,
/// valid in the regime `γ₃ ≫ γ₂ ≫ γ₁`, `f ≪ 1` (not enforced); identical in
/// functional form to the classical group delay and exactly twice it.
pub fn delay_c3_closed(cfg: &SystemConfig) -> f64 {
    if cfg.gamma2 == 0.0 {
        return 0.0;
    }
    let d2 = 4.0 * cfg.delta * cfg.delta;
    let g2 = cfg.gamma2 * cfg.gamma2;
    4.0 * cfg.f * cfg.gamma2 * (d2 - g2) / ((d2 + g2) * (d2 + g2))
}

/// Field-intensity delay: center of gravity of `⟨:𝓔(z=3L/4)²:⟩` with the
/// `f`-scaled scattering block minus the no-scatterer value, by exact
/// moments.
pub fn delay_field(cfg: &SystemConfig) -> Result<f64, ObservableError> {
    if cfg.f > 0.1 {
        return Err(ObservableError::WeakScatteringInvalid { f: cfg.f });
    }
    let without = field_series(cfg, false, 0.0);
    let with = field_series(cfg, true, cfg.f);
    Ok(with.centroid()? - without.centroid()?)
}

/// Outcome of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub enum DelayStatus {
    Ok,
    Failed(String),
}

impl fmt::Display for DelayStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelayStatus::Ok => write!(f, "ok"),
            DelayStatus::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

/// Delay observables at one detuning, with provenance parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayReport {
    pub delta: f64,
    /// Classical phase delay (closed form, `γ = γ₂`).
    pub dt_phase: f64,
    /// Classical group delay (closed form, `γ = γ₂`).
    pub dt_group: f64,
    /// Closed-form quantum delay.
    pub dt_c3_closed: f64,
    /// Moment-integral delay of `|c₃⁰ + f·c₃ˢ|²`; absent when the moments
    /// did not converge.
    pub dt_c3_quad: Option<f64>,
    /// Moment-integral delay of the field intensity; absent on failure.
    pub dt_field_quad: Option<f64>,
    pub f_used: f64,
    pub gamma: [f64; 3],
    pub status: DelayStatus,
}

/// Computes every delay observable at the given detuning (overriding
/// `cfg.delta`). Per-point failures are recorded in the report status rather
/// than aborting a sweep.
pub fn delay_report(cfg: &SystemConfig, delta: f64) -> DelayReport {
    let mut point = cfg.clone();
    point.delta = delta;
    let (dt_phase, dt_group) = if point.gamma2 > 0.0 {
        let med = ClassicalMedium::from_config(&point);
        (
            classical::phase_delay(&med, delta),
            classical::group_delay(&med, delta),
        )
    } else {
        (0.0, 0.0)
    };
    let mut status = DelayStatus::Ok;
    let mut fail = |msg: String| {
        if matches!(status, DelayStatus::Ok) {
            status = DelayStatus::Failed(msg);
        }
    };
    let dt_c3_quad = match delay_c3(&point) {
        Ok(v) => Some(v),
        Err(e) => {
            fail(alloc::format!("dt_c3_quad: {e}"));
            None
        }
    };
    let dt_field_quad = match delay_field(&point) {
        Ok(v) => Some(v),
        Err(e) => {
            fail(alloc::format!("dt_field_quad: {e}"));
            None
        }
    };
    DelayReport {
        delta,
        dt_phase,
        dt_group,
        dt_c3_closed: delay_c3_closed(&point),
        dt_c3_quad,
        dt_field_quad,
        f_used: point.f,
        gamma: [point.gamma1, point.gamma2, point.gamma3],
        status,
    }
}

/// One [`DelayReport`] per grid point, in grid order. The points are
/// independent pure computations; callers may parallelize and merge by
/// index.
pub fn sweep_detuning(cfg: &SystemConfig, delta_grid: &[f64]) -> Vec<DelayReport> {
    delta_grid.iter().map(|&d| delay_report(cfg, d)).collect()
}
