//! Closed-form amplitudes of the Laplace-transform solution, truncated at the
//! first turn-on of each atom, plus numerical verification hooks for the
//! transform-domain machinery.
//!
//! Working in the rotating frame at the source-atom frequency, every
//! amplitude is a sum of step-gated exponentials: the source amplitude decays
//! freely until scattered/reflected radiation returns at `t = 1/2`, the
//! scatterer turns on at `t = 1/4`, and the detector at `t = 1/2` (times in
//! `L/c`, atoms at `z = 1/4, 1/2, 3/4`). The omitted higher-order terms are
//! reflections and multiple scattering, which turn on later; the displayed
//! forms are therefore exact inside the validity windows
//! [`C1_WINDOW`]/[`C2_WINDOW`]/[`B_WINDOW`]/[`C3_WINDOW`].
//!
//! Removable singularities (rate confluences such as `γ₁ = γ₃`, or
//! `γ₁ - γ₂ + 2iδ = 0`) are handled by confluence-stable quotients in the
//! pointwise evaluators, and by explicit secular-term branches in the series
//! builders used for moment integrals.

use num_complex::Complex64;
#[allow(unused_imports)] // used for f64 math in no_std builds; shadowed when dev-deps link std
use num_traits::Float;

use crate::numerics::{exp_diff_ratio, phi2};
use crate::params::{Atom, ModeIndex, SystemConfig};
use crate::series::{three_pole_series, two_pole_series, StepSeries, StepTerm};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Validity window of the truncated source amplitude (next omitted term
/// turns on later; kept conservative).
pub const C1_WINDOW: f64 = 0.75;
/// Validity window of the truncated scatterer amplitude.
pub const C2_WINDOW: f64 = 0.75;
/// Validity window of the truncated mode amplitudes.
pub const B_WINDOW: f64 = 0.75;
/// Validity window of the truncated detector amplitude.
pub const C3_WINDOW: f64 = 1.0;

/// Relative pole-separation threshold below which the series builders switch
/// to the confluent (secular-term) branches.
pub const DEFAULT_CONFLUENCE_THRESHOLD: f64 = 1e-6;

/// Decay exponent of the source term, `A = γ₁/2`.
fn rate_a(cfg: &SystemConfig) -> Complex64 {
    Complex64::new(0.5 * cfg.gamma1, 0.0)
}

/// Decay exponent of the scatterer term in the rotating frame,
/// `B = γ₂/2 - iδ`.
fn rate_b(cfg: &SystemConfig) -> Complex64 {
    Complex64::new(0.5 * cfg.gamma2, -cfg.delta)
}

/// Decay exponent of the detector term, `C = γ₃/2`.
fn rate_c(cfg: &SystemConfig) -> Complex64 {
    Complex64::new(0.5 * cfg.gamma3, 0.0)
}

/// `D = γ₁ - γ₂ + 2iδ = 2(A - B)`, the recurring scattering denominator.
fn denom_d(cfg: &SystemConfig) -> Complex64 {
    Complex64::new(cfg.gamma1 - cfg.gamma2, 2.0 * cfg.delta)
}

/// Source-atom excitation amplitude `c₁(t)` (free decay plus the `Θ(t-1/2)`
/// re-excitation block with its secular `(t - 1/2)` factor).
///
/// Evaluated in a form that is uniformly stable through the degenerate
/// denominator `γ₁ - γ₂ + 2iδ = 0`:
/// `c₁ = e^{-γ₁t/2} + Θ(τ)·γ₁·e^{-γ₁τ/2}·[τ/2 + γ₂·τ²/4·φ₂(Dτ/2)]`,
/// which reproduces the displayed two-exponential block exactly for every
/// non-degenerate parameter set.
pub fn c1(cfg: &SystemConfig, t: f64) -> Complex64 {
    let free = Complex64::new((-0.5 * cfg.gamma1 * t).exp(), 0.0);
    let tau = t - 0.5;
    if tau <= 0.0 {
        return free;
    }
    let d = denom_d(cfg);
    let block = (-0.5 * cfg.gamma1 * tau).exp()
        * cfg.gamma1
        * (Complex64::new(0.5 * tau, 0.0) + cfg.gamma2 * tau * tau / 4.0 * phi2(d * tau / 2.0));
    free + block
}

/// Scattering-atom excitation amplitude
/// `c₂(t) = Θ(t-1/4)·√(γ₁γ₂)/D·{e^{-γ₁σ/2} - e^{-(γ₂/2-iδ)σ}}`,
/// evaluated through the confluence-stable quotient (the l'Hôpital limit
/// `-√(γ₁γ₂)·σ/2·e^{-γ₁σ/2}` emerges automatically as `D → 0`).
pub fn c2(cfg: &SystemConfig, t: f64) -> Complex64 {
    let sigma = t - 0.25;
    if sigma <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let root = (cfg.gamma1 * cfg.gamma2).sqrt();
    -0.5 * root * exp_diff_ratio(rate_a(cfg), rate_b(cfg), sigma)
}

/// Inverse transform of `(n1·s + n0)/[(s+q1)(s+q2)(s+q3)]` gated at
/// `turn_on`, with confluent branches for coinciding poles.
fn linear_three_pole_series(
    n1: Complex64,
    n0: Complex64,
    q1: Complex64,
    q2: Complex64,
    q3: Complex64,
    turn_on: f64,
    threshold: f64,
) -> StepSeries {
    let numer = |s: Complex64| n1 * s + n0;
    let scale = q1.norm().max(q2.norm()).max(q3.norm()).max(1e-300);
    let tol = threshold * scale;
    let near = |a: Complex64, b: Complex64| (a - b).norm() < tol;

    if near(q1, q2) && near(q2, q3) && near(q1, q3) {
        let q = (q1 + q2 + q3) / 3.0;
        return StepSeries::new(alloc::vec![
            StepTerm {
                turn_on,
                coefficient: 0.5 * numer(-q),
                rate: q,
                order: 2,
            },
            StepTerm {
                turn_on,
                coefficient: n1,
                rate: q,
                order: 1,
            },
        ]);
    }

    let (qa, qb, qc) = if near(q1, q2) {
        (q1, q2, q3)
    } else if near(q1, q3) {
        (q1, q3, q2)
    } else if near(q2, q3) {
        (q2, q3, q1)
    } else {
        let term = |qi: Complex64, qj: Complex64, qk: Complex64| StepTerm {
            turn_on,
            coefficient: numer(-qi) / ((qj - qi) * (qk - qi)),
            rate: qi,
            order: 0,
        };
        return StepSeries::new(alloc::vec![
            term(q1, q2, q3),
            term(q2, q1, q3),
            term(q3, q1, q2),
        ]);
    };

    // Double pole at q = (qa+qb)/2, simple pole at qc.
    let q = 0.5 * (qa + qb);
    let d = qc - q;
    StepSeries::new(alloc::vec![
        StepTerm {
            turn_on,
            coefficient: numer(-q) / d,
            rate: q,
            order: 1,
        },
        StepTerm {
            turn_on,
            coefficient: (n1 * d - numer(-q)) / (d * d),
            rate: q,
            order: 0,
        },
        StepTerm {
            turn_on,
            coefficient: numer(-qc) / (d * d),
            rate: qc,
            order: 0,
        },
    ])
}

/// Detector amplitude `c₃(t)` as a step-term series: the inverse transform of
/// `c̃₃(s) = -4e^{-s/2}√(γ₁γ₃)(s - iδ)/[(2s+γ₁)(2s+γ₃)(2s+γ₂-2iδ)]`,
/// i.e. the displayed three-exponential form with numerators `(γ₁ + 2iδ)`,
/// `γ₂`, `(γ₃ + 2iδ)`.
pub fn c3_series_with(cfg: &SystemConfig, threshold: f64) -> StepSeries {
    let k = -0.5 * (cfg.gamma1 * cfg.gamma3).sqrt();
    linear_three_pole_series(
        Complex64::new(k, 0.0),
        Complex64::new(0.0, -k * cfg.delta),
        rate_a(cfg),
        rate_c(cfg),
        rate_b(cfg),
        0.5,
        threshold,
    )
}

/// [`c3_series_with`] at the default confluence threshold.
pub fn c3_series(cfg: &SystemConfig) -> StepSeries {
    c3_series_with(cfg, DEFAULT_CONFLUENCE_THRESHOLD)
}

/// Detector amplitude with the scattering atom removed (`γ₂ = 0`):
/// `c₃⁰(t) = Θ(τ)·√(γ₁γ₃)/(γ₁-γ₃)·{e^{-γ₁τ/2} - e^{-γ₃τ/2}}`.
pub fn c3_free_series_with(cfg: &SystemConfig, threshold: f64) -> StepSeries {
    let k = Complex64::new(-0.5 * (cfg.gamma1 * cfg.gamma3).sqrt(), 0.0);
    two_pole_series(k, rate_a(cfg), rate_c(cfg), 0.5, threshold)
}

pub fn c3_free_series(cfg: &SystemConfig) -> StepSeries {
    c3_free_series_with(cfg, DEFAULT_CONFLUENCE_THRESHOLD)
}

/// The part of the detector amplitude attributable to scattering,
/// `c₃ˢ = c₃ - c₃⁰`: the inverse transform of
/// `γ₂√(γ₁γ₃)/4 / [(s+γ₁/2)(s+γ₃/2)(s+γ₂/2-iδ)]`, proportional to `γ₂`.
pub fn c3_scatter_series_with(cfg: &SystemConfig, threshold: f64) -> StepSeries {
    let k = Complex64::new(0.25 * cfg.gamma2 * (cfg.gamma1 * cfg.gamma3).sqrt(), 0.0);
    three_pole_series(k, rate_a(cfg), rate_c(cfg), rate_b(cfg), 0.5, threshold)
}

pub fn c3_scatter_series(cfg: &SystemConfig) -> StepSeries {
    c3_scatter_series_with(cfg, DEFAULT_CONFLUENCE_THRESHOLD)
}

/// Detector-atom excitation amplitude `c₃(t)`; zero for `t ≤ 1/2`.
pub fn c3(cfg: &SystemConfig, t: f64) -> Complex64 {
    c3_series(cfg).eval(t)
}

/// Detector amplitude in the absence of the scatterer.
pub fn c3_free(cfg: &SystemConfig, t: f64) -> Complex64 {
    c3_free_series(cfg).eval(t)
}

/// Scattering contribution to the detector amplitude,
/// `c₃ˢ(t) = c₃(t) - c₃⁰(t)` as an identity.
pub fn c3_scatter(cfg: &SystemConfig, t: f64) -> Complex64 {
    c3_scatter_series(cfg).eval(t)
}

/// Mode amplitude `b_m(t)` as a step-term series: the free-emission part
/// (turn-on at `t = 0`) plus the `Θ(t - 1/4)` scattering block.
///
/// `b̃_m(s) = 2i/[(s+imπ)(2s+γ₁)]·[e^{-s/4}√(γ₁γ₂)·g₂m/(2s+γ₂-2iδ) - g₁m]`,
/// which inverse-transforms to two poles for the free part and three for the
/// scattering block. Couplings are real (sine modes), so the conjugations in
/// the equations of motion are applied but inert.
///
/// The omitted higher-order contributions to `b_m` (detector back-action and
/// source re-excitation) already turn on at `t = 1/2`, so mode-resolved
/// oracle comparisons belong before that; position-summed quantities at the
/// detector stay accurate through the documented window because the missing
/// radiation has not yet propagated there.
pub fn b_m_series_with(cfg: &SystemConfig, m: ModeIndex, threshold: f64) -> StepSeries {
    let g1 = cfg.coupling(Atom::Source, m);
    let g2 = cfg.coupling(Atom::Scatterer, m);
    let mode = Complex64::new(0.0, cfg.mode_detuning(m));
    let mut series = StepSeries::default();
    if g1 != 0.0 {
        series = series.concat(two_pole_series(-I * g1, rate_a(cfg), mode, 0.0, threshold));
    }
    if g2 != 0.0 && cfg.gamma1 * cfg.gamma2 > 0.0 {
        let k = I * g2 * 0.5 * (cfg.gamma1 * cfg.gamma2).sqrt();
        series = series.concat(three_pole_series(
            k,
            mode,
            rate_a(cfg),
            rate_b(cfg),
            0.25,
            threshold,
        ));
    }
    series
}

pub fn b_m_series(cfg: &SystemConfig, m: ModeIndex) -> StepSeries {
    b_m_series_with(cfg, m, DEFAULT_CONFLUENCE_THRESHOLD)
}

/// Mode amplitude `b_m(t)`.
pub fn b_m(cfg: &SystemConfig, m: ModeIndex, t: f64) -> Complex64 {
    b_m_series(cfg, m).eval(t)
}

/// All mode amplitudes at one instant, indexed by `m + M`.
pub fn mode_amplitudes(cfg: &SystemConfig, t: f64) -> alloc::vec::Vec<Complex64> {
    cfg.mode_offsets().map(|m| b_m(cfg, m, t)).collect()
}

/// Excitation-number sum `Σ_j |c_j|² + Σ_m |b_m|²` over the truncated grid;
/// approaches 1 as `M → ∞` (the evolution is unitary).
pub fn truncated_norm_sq(cfg: &SystemConfig, t: f64) -> f64 {
    let atoms = c1(cfg, t).norm_sqr() + c2(cfg, t).norm_sqr() + c3(cfg, t).norm_sqr();
    let modes: f64 = cfg
        .mode_offsets()
        .map(|m| b_m(cfg, m, t).norm_sqr())
        .sum();
    atoms + modes
}

/// Truncated direct evaluation and hyperbolic closed form of the
/// dimensionless self-coupling sum
/// `f₁₁(s) = (1/Δ_c²)·Σ_m g₁m²/(is/Δ_c - m)`.
///
/// The closed form (positions `z = 1/4, 1/2, 3/4`, sum extended to all `m`)
/// is `-i(γ₁/4Δ_c)·sinh(3πs/4Δ_c)/[cosh(πs/4Δ_c)·cosh(πs/2Δ_c)]`, evaluated
/// here in the overflow-free equivalent `-i(γ₁/4Δ_c)·[tanh(πs/4Δ_c) +
/// tanh(πs/2Δ_c)]`.
pub fn f11_sum_check(cfg: &SystemConfig, s: Complex64) -> (Complex64, Complex64) {
    let dc = cfg.delta_c;
    let x = I * s / dc;
    let omega1_sq = cfg.gamma1; // Ω₁² = γ₁·Δ_c/π = γ₁ in natural units
    let direct: Complex64 = cfg
        .mode_offsets()
        .map(|m| {
            let g = cfg.mode_profile(m, cfg.z1);
            omega1_sq * g * g / (x - m.0 as f64)
        })
        .sum::<Complex64>()
        / (dc * dc);
    let u = core::f64::consts::PI * s / (4.0 * dc);
    let closed = -I * cfg.gamma1 / (4.0 * dc) * (u.tanh() + (2.0 * u).tanh());
    (direct, closed)
}

/// Pole too close for a meaningful transform-domain evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleProximityError {
    pub denominator_norm: f64,
}

impl core::fmt::Display for PoleProximityError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "Laplace evaluation too close to a pole: |denominator| = {:e}",
            self.denominator_norm
        )
    }
}

/// Leading-order Laplace transforms of the atomic amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceLeadingTerms {
    /// Free-decay term of `c̃₁`: `2/(2s + γ₁)`.
    pub c1_free: Complex64,
    /// Re-excitation term of `c̃₁`:
    /// `4e^{-s/2}γ₁(s + γ₂ - iδ)/[(2s+γ₁)²(2s+γ₂-2iδ)]`.
    pub c1_return: Complex64,
    /// `c̃₂ = -2e^{-s/4}√(γ₁γ₂)/[(2s+γ₁)(2s+γ₂-2iδ)]`.
    pub c2: Complex64,
    /// `c̃₃ = -4e^{-s/2}√(γ₁γ₃)(s-iδ)/[(2s+γ₁)(2s+γ₃)(2s+γ₂-2iδ)]`.
    pub c3: Complex64,
}

/// Evaluates the displayed leading-order transform expressions at `s`
/// (`Re(s) > 0`, away from poles). Used to verify that numerical Laplace
/// transforms of the time-domain amplitudes match the transform-domain
/// solution.
pub fn laplace_leading_terms(
    cfg: &SystemConfig,
    s: Complex64,
) -> Result<LaplaceLeadingTerms, PoleProximityError> {
    let p1 = 2.0 * s + cfg.gamma1;
    let p3 = 2.0 * s + cfg.gamma3;
    let p2 = 2.0 * s + Complex64::new(cfg.gamma2, -2.0 * cfg.delta);
    for p in [p1, p3, p2] {
        if p.norm() < 1e-9 {
            return Err(PoleProximityError {
                denominator_norm: p.norm(),
            });
        }
    }
    let root12 = (cfg.gamma1 * cfg.gamma2).sqrt();
    let root13 = (cfg.gamma1 * cfg.gamma3).sqrt();
    Ok(LaplaceLeadingTerms {
        c1_free: 2.0 / p1,
        c1_return: 4.0 * (-s / 2.0).exp() * cfg.gamma1 * (s + Complex64::new(cfg.gamma2, -cfg.delta))
            / (p1 * p1 * p2),
        c2: -2.0 * (-s / 4.0).exp() * root12 / (p1 * p2),
        c3: -4.0 * (-s / 2.0).exp() * root13 * (s - I * cfg.delta) / (p1 * p3 * p2),
    })
}
