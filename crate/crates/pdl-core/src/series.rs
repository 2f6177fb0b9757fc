//! Sums of step-function-gated exponential terms.
//!
//! Every closed-form amplitude in this model is a sum of terms
//! `Θ(t - t₀)·k·(t - t₀)^n·exp[-r·(t - t₀)]` that "turn on" at the light
//! travel times between the atoms. Keeping the terms explicit lets intensity
//! moments (and hence all center-of-gravity delays) be evaluated from exact
//! antiderivatives instead of truncated numerics: the negative-delay signal
//! is a small difference of large moments and is sensitive to tails.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // used for f64 math in no_std builds; shadowed when dev-deps link std
use num_traits::Float;
/// One gated term `Θ(t - turn_on)·coefficient·(t - turn_on)^order·
/// exp[-rate·(t - turn_on)]`.
///
/// `order` is 0 or 1 for the displayed amplitude formulas (the secular
/// `(t - 1/2)` factor of the source-atom re-excitation); confluent-limit
/// branches can introduce order 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTerm {
    pub turn_on: f64,
    pub coefficient: Complex64,
    pub rate: Complex64,
    pub order: u8,
}

impl StepTerm {
    pub fn eval(&self, t: f64) -> Complex64 {
        let tau = t - self.turn_on;
        if tau <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficient * tau.powi(self.order as i32) * (-self.rate * tau).exp()
    }
}

/// A sum of [`StepTerm`]s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepSeries {
    pub terms: Vec<StepTerm>,
}

/// Why a moment could not be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentError {
    /// Some product of terms decays with non-positive real rate, so the
    /// moment integral diverges.
    Divergent { rate_re: f64 },
    /// Terms turn on at different times; moments are only defined here for
    /// a common turn-on.
    MixedTurnOn,
    /// The series is identically zero (or numerically indistinguishable
    /// from it), so a temporal centroid is undefined.
    ZeroNorm,
}

impl fmt::Display for MomentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentError::Divergent { rate_re } => write!(
                f,
                "divergent moment: product term decays with Re(rate) = {rate_re} <= 0"
            ),
            MomentError::MixedTurnOn => write!(f, "terms have mixed turn-on times"),
            MomentError::ZeroNorm => write!(f, "zero-norm signal has no temporal centroid"),
        }
    }
}

const FACTORIAL: [f64; 8] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0];

impl StepSeries {
    pub fn new(terms: Vec<StepTerm>) -> Self {
        StepSeries { terms }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    /// The shared turn-on time, when all terms agree.
    pub fn common_turn_on(&self) -> Option<f64> {
        let first = self.terms.first()?.turn_on;
        self.terms
            .iter()
            .all(|t| t.turn_on == first)
            .then_some(first)
    }

    /// Scales every coefficient, e.g. by the forward-scattering fraction.
    pub fn scaled(&self, factor: Complex64) -> Self {
        StepSeries {
            terms: self
                .terms
                .iter()
                .map(|t| StepTerm {
                    coefficient: t.coefficient * factor,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn concat(mut self, other: StepSeries) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// Exact cross moments `∫₀^∞ τ^k a(τ)·conj(b(τ)) dτ` for `k = 0, 1`,
    /// with `τ` measured from the (common) turn-on.
    ///
    /// Uses `∫₀^∞ τ^n e^{-pτ} dτ = n!/p^{n+1}`, which converges iff
    /// `Re(p) > 0` for every pairwise product.
    pub fn cross_moments(&self, other: &StepSeries) -> Result<(Complex64, Complex64), MomentError> {
        if self.common_turn_on().is_none()
            || other.common_turn_on().is_none()
            || (!self.terms.is_empty()
                && !other.terms.is_empty()
                && self.terms[0].turn_on != other.terms[0].turn_on)
        {
            return Err(MomentError::MixedTurnOn);
        }
        let mut m0 = Complex64::new(0.0, 0.0);
        let mut m1 = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &other.terms {
                let p = a.rate + b.rate.conj();
                if p.re <= 0.0 {
                    return Err(MomentError::Divergent { rate_re: p.re });
                }
                let k = a.coefficient * b.coefficient.conj();
                let n = (a.order + b.order) as usize;
                let pn1 = p.powi(n as i32 + 1);
                m0 += k * FACTORIAL[n] / pn1;
                m1 += k * FACTORIAL[n + 1] / (pn1 * p);
            }
        }
        Ok((m0, m1))
    }

    /// Exact intensity moments `(∫|x|²dτ, ∫τ|x|²dτ)` about the turn-on.
    pub fn intensity_moments(&self) -> Result<(f64, f64), MomentError> {
        let (m0, m1) = self.cross_moments(self)?;
        Ok((m0.re, m1.re))
    }

    /// Temporal center of gravity of `|x(t)|²` in absolute time:
    /// `turn_on + ∫τ|x|²dτ / ∫|x|²dτ`.
    pub fn centroid(&self) -> Result<f64, MomentError> {
        let turn_on = self.common_turn_on().ok_or(MomentError::MixedTurnOn)?;
        let (i0, i1) = self.intensity_moments()?;
        if !(i0 > 0.0) || !i0.is_finite() {
            return Err(MomentError::ZeroNorm);
        }
        Ok(turn_on + i1 / i0)
    }
}

/// Inverse transform of `k/[(s + q1)(s + q2)]` gated at `turn_on`:
/// `k·(e^{-q1 τ} - e^{-q2 τ})/(q2 - q1)`, with the confluent branch
/// `k·τ·e^{-q τ}` when the poles coincide to within
/// `threshold·max(|q1|, |q2|)`.
pub fn two_pole_series(
    k: Complex64,
    q1: Complex64,
    q2: Complex64,
    turn_on: f64,
    threshold: f64,
) -> StepSeries {
    let scale = q1.norm().max(q2.norm()).max(1e-300);
    if (q1 - q2).norm() < threshold * scale {
        let q = 0.5 * (q1 + q2);
        return StepSeries::new(alloc::vec![StepTerm {
            turn_on,
            coefficient: k,
            rate: q,
            order: 1,
        }]);
    }
    let d = q2 - q1;
    StepSeries::new(alloc::vec![
        StepTerm {
            turn_on,
            coefficient: k / d,
            rate: q1,
            order: 0,
        },
        StepTerm {
            turn_on,
            coefficient: -k / d,
            rate: q2,
            order: 0,
        },
    ])
}

/// Inverse transform of `k/[(s + q1)(s + q2)(s + q3)]` gated at `turn_on`,
/// with confluent branches for every pole collision (pairwise or triple).
pub fn three_pole_series(
    k: Complex64,
    q1: Complex64,
    q2: Complex64,
    q3: Complex64,
    turn_on: f64,
    threshold: f64,
) -> StepSeries {
    let scale = q1.norm().max(q2.norm()).max(q3.norm()).max(1e-300);
    let tol = threshold * scale;
    let near = |a: Complex64, b: Complex64| (a - b).norm() < tol;

    if near(q1, q2) && near(q2, q3) && near(q1, q3) {
        // Triple pole: k·τ²/2·e^{-qτ}.
        let q = (q1 + q2 + q3) / 3.0;
        return StepSeries::new(alloc::vec![StepTerm {
            turn_on,
            coefficient: 0.5 * k,
            rate: q,
            order: 2,
        }]);
    }

    // Order the poles so any coinciding pair sits in (qa, qb).
    let (qa, qb, qc) = if near(q1, q2) {
        (q1, q2, q3)
    } else if near(q1, q3) {
        (q1, q3, q2)
    } else if near(q2, q3) {
        (q2, q3, q1)
    } else {
        let d21 = q2 - q1;
        let d31 = q3 - q1;
        let d32 = q3 - q2;
        return StepSeries::new(alloc::vec![
            StepTerm {
                turn_on,
                coefficient: k / (d21 * d31),
                rate: q1,
                order: 0,
            },
            StepTerm {
                turn_on,
                coefficient: -k / (d21 * d32),
                rate: q2,
                order: 0,
            },
            StepTerm {
                turn_on,
                coefficient: k / (d31 * d32),
                rate: q3,
                order: 0,
            },
        ]);
    };

    // Double pole at q with a distinct simple pole at qc:
    // k·[τ·e^{-qτ}/(qc - q) - e^{-qτ}/(qc - q)² + e^{-qc τ}/(qc - q)²].
    let q = 0.5 * (qa + qb);
    let d = qc - q;
    StepSeries::new(alloc::vec![
        StepTerm {
            turn_on,
            coefficient: k / d,
            rate: q,
            order: 1,
        },
        StepTerm {
            turn_on,
            coefficient: -k / (d * d),
            rate: q,
            order: 0,
        },
        StepTerm {
            turn_on,
            coefficient: k / (d * d),
            rate: qc,
            order: 0,
        },
    ])
}
