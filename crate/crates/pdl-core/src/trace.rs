//! Time series of the complex amplitudes, shared by the closed-form and
//! brute-force solvers.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::analytic;
use crate::params::SystemConfig;

/// Which solver produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Ode,
}

/// Full mode-amplitude record accompanying a trace; one vector of `2M + 1`
/// amplitudes per sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeRecord {
    pub half_width: i64,
    pub samples: Vec<Vec<Complex64>>,
}

/// Sampled atomic amplitudes and derived norms.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrace {
    pub provenance: Provenance,
    pub times: Vec<f64>,
    pub c1: Vec<Complex64>,
    pub c2: Vec<Complex64>,
    pub c3: Vec<Complex64>,
    /// Total excitation number over the truncated grid at each sample.
    pub norm_sq: Vec<f64>,
    pub modes: Option<ModeRecord>,
}

impl AmplitudeTrace {
    /// Samples the closed-form amplitudes on `times` (sorted ascending).
    /// The excitation-number column sums the truncated mode grid, so it
    /// approaches 1 only as `M → ∞`.
    pub fn from_analytic(cfg: &SystemConfig, times: &[f64], record_modes: bool) -> Self {
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        let n = times.len();
        let mut c1 = Vec::with_capacity(n);
        let mut c2 = Vec::with_capacity(n);
        let mut c3 = Vec::with_capacity(n);
        let mut norm_sq = Vec::with_capacity(n);
        let mut samples = Vec::new();
        let mode_series: Vec<_> = cfg
            .mode_offsets()
            .map(|m| analytic::b_m_series(cfg, m))
            .collect();
        for &t in times {
            let a1 = analytic::c1(cfg, t);
            let a2 = analytic::c2(cfg, t);
            let a3 = analytic::c3(cfg, t);
            let b: Vec<Complex64> = mode_series.iter().map(|s| s.eval(t)).collect();
            let total = a1.norm_sqr()
                + a2.norm_sqr()
                + a3.norm_sqr()
                + b.iter().map(|z| z.norm_sqr()).sum::<f64>();
            c1.push(a1);
            c2.push(a2);
            c3.push(a3);
            norm_sq.push(total);
            if record_modes {
                samples.push(b);
            }
        }
        AmplitudeTrace {
            provenance: Provenance::Analytic,
            times: times.to_vec(),
            c1,
            c2,
            c3,
            norm_sq,
            modes: record_modes.then_some(ModeRecord {
                half_width: cfg.mode_half_width,
                samples,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}
