//! Core library for a fully-quantized model of single-photon emission,
//! scattering, and detection in a one-dimensional multimode cavity, together
//! with the classical charged-oscillator medium it is compared against.
//!
//! Everything is expressed in natural units: `c = L = ħ = ε₀ = V = 1`, so the
//! fundamental cavity frequency is `Δ_c = π` and time is measured in units of
//! the cavity transit time `L/c`. Three two-level atoms sit at fractions of
//! the cavity length (source, scatterer, detector; defaults `1/4, 1/2, 3/4`),
//! and the single excitation is shared between the atoms and `2M + 1` field
//! modes centred on the resonant index `m0`.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats, and the CLI
//! live in the companion `pdl-cli` crate.
//!
//! Module map:
//! - [`params`]: shared parameterization, couplings, decay-rate relations.
//! - [`classical`]: steady-state Lorentz-medium response and the transient
//!   driven-oscillator solution.
//! - [`ode`]: brute-force integration of the coupled amplitude equations on
//!   the truncated mode grid (the numerical oracle).
//! - [`analytic`]: closed-form amplitudes (first turn-on terms) and the
//!   Laplace-domain verification hooks.
//! - [`observables`]: field envelopes, intensities, arrival times, and every
//!   delay observable including detuning sweeps.
//! - [`numerics`], [`series`], [`trace`]: supporting machinery.

#![no_std]

extern crate alloc;

pub mod analytic;
pub mod classical;
pub mod numerics;
pub mod ode;
pub mod observables;
pub mod params;
pub mod series;
pub mod trace;

pub use num_complex::Complex64;

pub use params::{Atom, ModeIndex, SystemConfig, DELTA_C};
