use num_complex::Complex64;

use pdl_core::analytic;
use pdl_core::classical::{self, ClassicalMedium};
use pdl_core::observables::{
    arrival_time_quad, arrival_time_series, delay_c3, delay_c3_closed, delay_c3_first_order,
    delay_field, delay_report, field_envelope, field_prefactor, field_series,
    intensity_expectation, intensity_from_modes, sweep_detuning, DelayStatus, ObservableError,
};
use pdl_core::params::SystemConfig;

fn cfg(gamma1: f64, gamma2: f64, gamma3: f64, delta: f64, f: f64) -> SystemConfig {
    SystemConfig {
        gamma1,
        gamma2,
        gamma3,
        delta,
        f,
        ..SystemConfig::default()
    }
}

/// Closed-form-comparable regime: γ₃ ≫ γ₂ ≫ γ₁ and weak forward scattering.
fn regime(gamma2: f64, delta: f64) -> SystemConfig {
    cfg(1e-3 * gamma2, gamma2, 1e4 * gamma2, delta, 1e-3)
}

#[test]
fn field_envelope_is_causal_and_reduces_without_scatterer() {
    let p = cfg(4.0, 64.0, 1024.0, 99.84, 1.0);
    for t in [0.0, 0.25, 0.5] {
        assert_eq!(field_envelope(&p, t, true), Complex64::new(0.0, 0.0));
        assert_eq!(field_envelope(&p, t, false), Complex64::new(0.0, 0.0));
    }
    let no_scatter = cfg(4.0, 0.0, 1024.0, 99.84, 1.0);
    for t in [0.6, 0.9] {
        assert_eq!(
            field_envelope(&no_scatter, t, true),
            field_envelope(&no_scatter, t, false)
        );
    }
    // Without the scatterer: -i·√(ω₁γ₁/2)·e^{-γ₁τ/2}.
    let t = 0.75;
    let expect = -Complex64::new(0.0, 1.0)
        * field_prefactor(&p)
        * (-0.5 * p.gamma1 * (t - 0.5)).exp();
    assert!((field_envelope(&p, t, false) - expect).norm() < 1e-12 * expect.norm());
}

#[test]
fn quantum_scattering_block_equals_classical_scattered_envelope() {
    // The paper's central correspondence: (𝓔 - 𝓔⁰)/𝓔⁰ pointwise equals
    // 𝓔ˢ_cl/𝓔⁰_cl once C is matched (f = 1 on both sides here).
    let p = cfg(4.0, 64.0, 1024.0, 99.84, 1.0);
    let med = ClassicalMedium::from_config(&p);
    let mut worst = 0.0_f64;
    for i in 1..=1000 {
        let t = 0.5 + 0.5 * i as f64 / 1000.0;
        let quantum = (field_envelope(&p, t, true) - field_envelope(&p, t, false))
            / field_envelope(&p, t, false);
        let classical = classical::classical_scattered_field(&med, p.gamma1, p.delta, t)
            / classical::classical_free_field(p.gamma1, t);
        worst = worst.max((quantum - classical).norm());
    }
    assert!(worst <= 1e-12, "worst pointwise deviation {worst}");
}

#[test]
fn quantum_classical_correspondence_survives_degenerate_denominator() {
    let p = cfg(8.0, 8.0, 1024.0, 0.0, 1.0);
    let med = ClassicalMedium::from_config(&p);
    for i in 1..=100 {
        let t = 0.5 + i as f64 * 0.01;
        let quantum = field_envelope(&p, t, true) - field_envelope(&p, t, false);
        let classical = classical::classical_scattered_field(&med, p.gamma1, p.delta, t);
        // Ratio is the constant -i·√(ω₁γ₁/2) (C = 1, f = 1).
        let expect = -Complex64::new(0.0, 1.0) * field_prefactor(&p);
        assert!(
            (quantum / classical - expect).norm() < 1e-12 * expect.norm(),
            "t = {t}"
        );
    }
}

#[test]
fn intensity_routes_agree_on_detector_removed_system() {
    // Mode-sum route vs closed-form route. The closed-form field is derived
    // with the detector removed, so the comparison uses γ₃ = 0; the analytic
    // mode amplitudes then reproduce the field at z = 3/4 up to truncation.
    let p = SystemConfig {
        gamma3: 0.0,
        mode_half_width: 2048,
        ..cfg(4.0, 64.0, 0.0, 99.84, 1.0)
    };
    for t in [0.6, 0.7] {
        let closed = intensity_expectation(&p, t, true);
        let modes = analytic::mode_amplitudes(&p, t);
        let summed = intensity_from_modes(&p, p.z3, &modes);
        let rel = (summed - closed).abs() / closed;
        assert!(rel < 0.02, "t = {t}: rel {rel} (closed {closed}, sum {summed})");
    }
}

#[test]
fn intensity_zero_before_arrival_both_routes() {
    let p = SystemConfig {
        mode_half_width: 256,
        ..cfg(4.0, 64.0, 1024.0, 99.84, 1.0)
    };
    assert_eq!(intensity_expectation(&p, 0.4, true), 0.0);
    let modes = analytic::mode_amplitudes(&p, 0.4);
    let leak = intensity_from_modes(&p, p.z3, &modes);
    // The truncated mode sum only vanishes as M → ∞; compare against the
    // peak intensity scale.
    let peak = intensity_expectation(&p, 0.52, true);
    assert!(leak < 1e-2 * peak, "acausal leak {leak} vs peak {peak}");
}

#[test]
fn scatterer_interference_suppresses_early_intensity() {
    // On resonance with γ₂ ≫ γ₁ the re-radiated field interferes
    // destructively just after the front.
    let p = cfg(1.0, 50.0, 1024.0, 0.0, 1.0);
    let t = 0.52;
    assert!(intensity_expectation(&p, t, true) < intensity_expectation(&p, t, false));
}

#[test]
fn arrival_time_of_exponential_pulse() {
    // Θ(t-1/2)e^{-γ(t-1/2)} has centroid 1/2 + 1/γ.
    let gamma = 3.0;
    let arrival = arrival_time_quad(
        |t| if t > 0.5 { (-gamma * (t - 0.5)).exp() } else { 0.0 },
        0.5,
        1.0,
    )
    .unwrap();
    assert!((arrival - (0.5 + 1.0 / gamma)).abs() < 1e-6);
}

#[test]
fn arrival_time_of_symmetric_pulse_is_its_center() {
    let t0 = 2.0;
    let arrival = arrival_time_quad(|t| (-(t - t0) * (t - t0) / 0.02).exp(), 0.5, 1.0).unwrap();
    assert!((arrival - t0).abs() < 1e-6);
}

#[test]
fn arrival_time_of_free_detector_pulse_in_fast_detector_limit() {
    // |c₃⁰|² with γ₃ → ∞ (numerically 10⁴) approaches the exponential
    // centroid 1/2 + 1/γ₁.
    let p = cfg(1.0, 0.0, 1e4, 0.0, 0.0);
    let series = analytic::c3_free_series(&p);
    let quad = arrival_time_quad(|t| series.eval(t).norm_sqr(), 0.5, 1.0).unwrap();
    let exact = arrival_time_series(&series).unwrap();
    assert!((quad - 1.5).abs() / 1.5 < 0.01, "quad arrival {quad}");
    assert!((quad - exact).abs() < 1e-6, "quad {quad} vs moments {exact}");
}

#[test]
fn zero_signal_has_no_arrival_time() {
    let err = arrival_time_quad(|_| 0.0, 0.0, 1.0).unwrap_err();
    assert!(matches!(err, ObservableError::ZeroNorm));
}

#[test]
fn delay_vanishes_without_scattering() {
    let p = regime(16.0, 4.0);
    let off = SystemConfig { f: 0.0, ..p };
    assert_eq!(delay_c3(&off).unwrap(), 0.0);
    assert_eq!(delay_field(&off).unwrap(), 0.0);
}

#[test]
fn delay_rejects_strong_forward_scattering() {
    let p = SystemConfig { f: 0.5, ..regime(16.0, 0.0) };
    assert!(matches!(
        delay_c3(&p),
        Err(ObservableError::WeakScatteringInvalid { .. })
    ));
}

#[test]
fn first_order_delay_matches_exact_moments() {
    // The two displayed forms of the delay agree to O(f) at f = 10⁻³ at the
    // Fig.-4-like detunings (the relative O(f) curvature is ≈1.1·f on
    // resonance, so δ = 0 sits marginally above the 0.1% level by design of
    // the expansion, not by implementation error).
    for delta in [4.0, 12.0, 24.0, 30.0] {
        let p = cfg(1.0, 16.0, 256.0, delta, 1e-3);
        let exact = delay_c3(&p).unwrap();
        let first = delay_c3_first_order(&p).unwrap();
        assert!(
            ((exact - first) / exact).abs() < 1e-3,
            "delta = {delta}: exact {exact}, first-order {first}"
        );
    }
    // On resonance the agreement is still at the percent-of-a-percent level.
    let p = cfg(1.0, 16.0, 256.0, 0.0, 1e-3);
    let exact = delay_c3(&p).unwrap();
    let first = delay_c3_first_order(&p).unwrap();
    assert!(((exact - first) / exact).abs() < 2e-3);
}

#[test]
fn moment_delay_matches_closed_form_in_interpretive_regime() {
    let gamma2 = 16.0;
    for ratio in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let p = regime(gamma2, ratio * gamma2);
        let quad = delay_c3(&p).unwrap();
        let closed = delay_c3_closed(&p);
        let scale = (4.0 * p.f / gamma2).max(closed.abs());
        assert!(
            (quad - closed).abs() <= 0.02 * scale,
            "delta/gamma2 = {ratio}: quad {quad}, closed {closed}"
        );
    }
}

#[test]
fn closed_form_delay_values() {
    let p = regime(16.0, 0.0);
    assert!((delay_c3_closed(&p) + 4.0 * p.f / p.gamma2).abs() < 1e-18);
    // Zeros at the anomalous-dispersion boundary.
    assert_eq!(delay_c3_closed(&regime(16.0, 8.0)), 0.0);
    assert_eq!(delay_c3_closed(&regime(16.0, -8.0)), 0.0);
    // Exactly twice the classical group delay with γ → γ₂, at every detuning.
    for delta in [-30.0, -3.0, 0.0, 1.7, 8.0, 40.0] {
        let p = regime(16.0, delta);
        let med = ClassicalMedium::from_config(&p);
        let twice = 2.0 * classical::group_delay(&med, delta);
        assert!(
            (delay_c3_closed(&p) - twice).abs() <= 1e-12 * twice.abs().max(1e-12),
            "delta = {delta}"
        );
    }
}

#[test]
fn field_delay_matches_detector_delay_in_limits() {
    let gamma2 = 16.0;
    for ratio in [0.0, 0.3, 1.0] {
        let p = regime(gamma2, ratio * gamma2);
        let field = delay_field(&p).unwrap();
        let c3 = delay_c3(&p).unwrap();
        let scale = (4.0 * p.f / gamma2).max(c3.abs());
        assert!(
            (field - c3).abs() <= 0.02 * scale,
            "ratio {ratio}: field {field}, c3 {c3}"
        );
    }
}

#[test]
fn negative_delay_coexists_with_exact_causality() {
    // The headline claim: the delay is negative inside the anomalous region
    // while the detector amplitude stays identically zero before t = 1/2.
    let p = regime(16.0, 0.0);
    let delay = delay_c3(&p).unwrap();
    assert!(delay < 0.0, "on-resonance delay should be negative: {delay}");
    let series = analytic::c3_free_series(&p)
        .concat(analytic::c3_scatter_series(&p).scaled(Complex64::new(p.f, 0.0)));
    for t in [0.0, 0.2, 0.4999, 0.5] {
        assert_eq!(series.eval(t), Complex64::new(0.0, 0.0));
    }
}

#[test]
fn delay_scales_linearly_in_f() {
    // delay/f is f-independent at the percent level through f = 10⁻²; the
    // measured O(f) curvature of the ratio is ≈1.3·f on resonance, so the
    // uppermost point is held to a correspondingly honest bound.
    let gamma2 = 16.0;
    for ratio in [0.0, 0.8] {
        let base = regime(gamma2, ratio * gamma2);
        let per_f = |f: f64| delay_c3(&SystemConfig { f, ..base.clone() }).unwrap() / f;
        let tiny = per_f(1e-4);
        assert!(((per_f(1e-3) - tiny) / tiny).abs() < 0.01, "ratio {ratio}");
        assert!(((per_f(1e-2) - tiny) / tiny).abs() < 0.015, "ratio {ratio}");
    }
}

#[test]
fn delay_is_even_in_detuning_in_narrow_source_limit() {
    let gamma2 = 16.0;
    for ratio in [0.3, 1.0, 2.5] {
        let plus = delay_c3(&regime(gamma2, ratio * gamma2)).unwrap();
        let minus = delay_c3(&regime(gamma2, -ratio * gamma2)).unwrap();
        let scale = plus.abs().max(4.0 * 1e-3 / gamma2);
        assert!(
            (plus - minus).abs() < 0.01 * scale,
            "ratio {ratio}: {plus} vs {minus}"
        );
    }
}

#[test]
fn sweep_columns_have_the_documented_symmetries() {
    let gamma2 = 16.0;
    let base = regime(gamma2, 0.0);
    let grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.4 * gamma2).collect();
    let reports = sweep_detuning(&base, &grid);
    assert_eq!(reports.len(), grid.len());
    let n = reports.len();
    for i in 0..n / 2 {
        let a = &reports[i];
        let b = &reports[n - 1 - i];
        assert!((a.dt_group - b.dt_group).abs() < 1e-15);
        assert!((a.dt_phase + b.dt_phase).abs() < 1e-15);
    }
    for r in &reports {
        assert!(matches!(r.status, DelayStatus::Ok), "status {:?}", r.status);
        let med = ClassicalMedium { f: base.f, gamma: gamma2, omega0: base.carrier_frequency() };
        let twice = 2.0 * classical::group_delay(&med, r.delta);
        assert!((r.dt_c3_closed - twice).abs() <= 1e-12 * twice.abs().max(1e-12));
        let quad = r.dt_c3_quad.unwrap();
        let scale = (4.0 * base.f / gamma2).max(r.dt_c3_closed.abs());
        assert!(
            (quad - r.dt_c3_closed).abs() <= 0.05 * scale,
            "delta {}: quad {quad} vs closed {}",
            r.delta,
            r.dt_c3_closed
        );
        // Sign pattern: negative inside the anomalous region, positive outside.
        if r.delta.abs() < 0.45 * gamma2 {
            assert!(quad < 0.0, "delta {}: expected negative delay", r.delta);
        }
        if r.delta.abs() > 0.55 * gamma2 {
            assert!(quad > 0.0, "delta {}: expected positive delay", r.delta);
        }
    }
}

#[test]
fn sweep_records_per_point_failures_and_continues() {
    // f too large for the weak-scattering superposition: every point fails
    // the moment delays but the sweep still returns fully populated reports.
    let p = cfg(1.0, 16.0, 256.0, 0.0, 1.0);
    let reports = sweep_detuning(&p, &[-8.0, 0.0, 8.0]);
    assert_eq!(reports.len(), 3);
    for r in &reports {
        assert!(matches!(r.status, DelayStatus::Failed(_)));
        assert!(r.dt_c3_quad.is_none());
        assert!(r.dt_field_quad.is_none());
        assert!(r.dt_group.is_finite());
    }
}

#[test]
fn delay_report_carries_provenance() {
    let p = regime(16.0, 4.0);
    let r = delay_report(&p, 4.0);
    assert_eq!(r.f_used, 1e-3);
    assert_eq!(r.gamma, [16e-3, 16.0, 16e4]);
    assert_eq!(r.delta, 4.0);
}

#[test]
fn field_series_matches_pointwise_envelope() {
    let p = cfg(4.0, 64.0, 1024.0, 99.84, 1.0);
    let series = field_series(&p, true, 1.0);
    for i in 1..=50 {
        let t = 0.5 + i as f64 * 0.01;
        let diff = (series.eval(t) - field_envelope(&p, t, true)).norm();
        assert!(diff < 1e-12 * field_envelope(&p, t, true).norm().max(1e-12));
    }
}
