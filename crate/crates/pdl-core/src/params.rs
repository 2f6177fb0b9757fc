//! Shared parameterization of the quantum model: decay rates, detuning, mode
//! grid, atom positions, and the coupling-constant relations.
//!
//! Natural units are fixed once and for all: `c = L = ħ = ε₀ = V = 1`. The
//! fundamental cavity frequency is then `Δ_c = π` and all rates and detunings
//! are in units of `c/L`, times in units of `L/c`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // used for f64 math in no_std builds; shadowed when dev-deps link std
use num_traits::Float;

/// Fundamental cavity frequency `Δ_c = π c/L` in natural units.
pub const DELTA_C: f64 = core::f64::consts::PI;

/// The three two-level atoms, by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    /// Atom 1, initially excited; the source of the photon.
    Source,
    /// Atom 2, the scatterer at the cavity midpoint.
    Scatterer,
    /// Atom 3, the detector.
    Detector,
}

impl Atom {
    pub const ALL: [Atom; 3] = [Atom::Source, Atom::Scatterer, Atom::Detector];

    /// One-based atom label (1, 2, 3).
    pub fn label(self) -> usize {
        match self {
            Atom::Source => 1,
            Atom::Scatterer => 2,
            Atom::Detector => 3,
        }
    }
}

/// Offset of a cavity mode from the resonant index `m0`.
///
/// The mode frequency is `(m0 + m)·Δ_c`; simulated modes satisfy `|m| ≤ M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex(pub i64);

/// Physical parameters of the quantum model, in natural units.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Spontaneous decay rate of the source atom.
    pub gamma1: f64,
    /// Spontaneous decay rate of the scattering atom.
    pub gamma2: f64,
    /// Spontaneous decay rate of the detector atom.
    pub gamma3: f64,
    /// Detuning `ω₁⁽ᵃᵗ⁾ − ω₂⁽ᵃᵗ⁾` between source and scatterer.
    pub delta: f64,
    /// Dimensionless forward-scattering strength, `0 ≤ f ≤ 1`.
    pub f: f64,
    /// Index of the resonant mode; must be divisible by 4 so that the
    /// optical path between any pair of atoms is an integer number of
    /// half-wavelengths of the resonant radiation.
    pub m0: i64,
    /// Half-width `M` of the simulated mode grid, `m ∈ [-M, +M]`.
    pub mode_half_width: i64,
    /// Source atom position as a fraction of the cavity length.
    pub z1: f64,
    /// Scattering atom position as a fraction of the cavity length.
    pub z2: f64,
    /// Detector atom position as a fraction of the cavity length.
    pub z3: f64,
    /// Fundamental cavity frequency; pinned to `π` by the unit convention.
    pub delta_c: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            gamma1: 4.0,
            gamma2: 64.0,
            gamma3: 1024.0,
            delta: 1.56 * 64.0,
            f: 1.0,
            m0: 1_000_000,
            mode_half_width: 2048,
            z1: 0.25,
            z2: 0.5,
            z3: 0.75,
            delta_c: DELTA_C,
        }
    }
}

/// Invariant violations found by [`SystemConfig::validate`], one entry per
/// violated invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for v in &self.violations {
            write!(f, " [{v}]")?;
        }
        Ok(())
    }
}

impl SystemConfig {
    /// Checks every invariant, reporting all violations by name.
    pub fn validate(&self) -> Result<(), ConfigError> {
        use alloc::format;
        let mut violations = Vec::new();
        for (name, g) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
        ] {
            if !(g >= 0.0) || !g.is_finite() {
                violations.push(format!("negative rate: {name} = {g}"));
            }
        }
        if !self.delta.is_finite() {
            violations.push(format!("non-finite detuning: delta = {}", self.delta));
        }
        if !(0.0..=1.0).contains(&self.f) || !self.f.is_finite() {
            violations.push(format!("f out of range [0, 1]: f = {}", self.f));
        }
        if self.m0 % 4 != 0 {
            violations.push(format!("m0 not divisible by 4: m0 = {}", self.m0));
        }
        if self.mode_half_width < 1 {
            violations.push(format!("M < 1: M = {}", self.mode_half_width));
        }
        if self.mode_half_width >= self.m0 {
            violations.push(format!(
                "M >= m0 (non-positive mode frequencies): M = {}, m0 = {}",
                self.mode_half_width, self.m0
            ));
        }
        let ordered = 0.0 < self.z1 && self.z1 < self.z2 && self.z2 < self.z3 && self.z3 < 1.0;
        if !ordered {
            violations.push(format!(
                "positions unordered: require 0 < z1 < z2 < z3 < 1, got ({}, {}, {})",
                self.z1, self.z2, self.z3
            ));
        }
        if (self.delta_c - DELTA_C).abs() > 1e-12 {
            violations.push(format!(
                "delta_c fixed to pi by the natural-unit convention, got {}",
                self.delta_c
            ));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations })
        }
    }

    /// Consuming form of [`validate`](Self::validate): returns the config
    /// unchanged when every invariant holds.
    pub fn validated(self) -> Result<Self, ConfigError> {
        self.validate()?;
        Ok(self)
    }

    /// Decay rate `γ_j` of the given atom.
    pub fn gamma(&self, atom: Atom) -> f64 {
        match atom {
            Atom::Source => self.gamma1,
            Atom::Scatterer => self.gamma2,
            Atom::Detector => self.gamma3,
        }
    }

    /// Position `z_j` of the given atom, as a fraction of the cavity length.
    pub fn position(&self, atom: Atom) -> f64 {
        match atom {
            Atom::Source => self.z1,
            Atom::Scatterer => self.z2,
            Atom::Detector => self.z3,
        }
    }

    /// Coupling amplitude `Ω_j = √γ_j` of the given atom.
    pub fn omega(&self, atom: Atom) -> f64 {
        omega_from_gamma(self.gamma(atom))
    }

    /// Coupling constant `g_jm = Ω_j sin[(m0 + m)·π·z_j]` of atom `j` to
    /// mode `m`.
    ///
    /// With standing-wave (sine) modes the couplings are purely real, so the
    /// conjugate `g*_jm` appearing in the equations of motion is the identity.
    pub fn coupling(&self, atom: Atom, m: ModeIndex) -> f64 {
        debug_assert!(m.0.abs() <= self.mode_half_width);
        self.omega(atom) * self.mode_profile(m, self.position(atom))
    }

    /// Standing-wave mode profile `sin[(m0 + m)·π·z]` at position `z`.
    pub fn mode_profile(&self, m: ModeIndex, z: f64) -> f64 {
        reduced_sine(self.m0 + m.0, z)
    }

    /// All couplings of one atom over the mode grid, indexed by `m + M`.
    pub fn coupling_row(&self, atom: Atom) -> Vec<f64> {
        self.mode_offsets().map(|m| self.coupling(atom, m)).collect()
    }

    /// Frequency `(m0 + m)·Δ_c` of mode `m`.
    pub fn mode_frequency(&self, m: ModeIndex) -> f64 {
        (self.m0 + m.0) as f64 * self.delta_c
    }

    /// Mode frequency relative to the rotating frame at `ω₁⁽ᵃᵗ⁾ = m0·Δ_c`,
    /// i.e. `m·Δ_c`.
    pub fn mode_detuning(&self, m: ModeIndex) -> f64 {
        m.0 as f64 * self.delta_c
    }

    /// Carrier frequency `ω₁⁽ᵃᵗ⁾ = m0·Δ_c` of the resonant mode.
    pub fn carrier_frequency(&self) -> f64 {
        self.m0 as f64 * self.delta_c
    }

    /// Iterator over the simulated mode offsets `m = -M ..= M`.
    pub fn mode_offsets(&self) -> impl Iterator<Item = ModeIndex> {
        (-self.mode_half_width..=self.mode_half_width).map(ModeIndex)
    }

    /// Number of simulated modes, `2M + 1`.
    pub fn mode_count(&self) -> usize {
        (2 * self.mode_half_width + 1) as usize
    }
}

/// `sin(n·π·z)` evaluated with the integer multiple of π reduced exactly, so
/// that large `n` (the resonant index is ~10⁶) does not lose precision.
fn reduced_sine(n: i64, z: f64) -> f64 {
    // n·z mod 2 is exact for the dyadic default positions 1/4, 1/2, 3/4
    // (where n·z and the subtraction are both representable); other z lose
    // only the usual argument-reduction accuracy.
    let nz = n as f64 * z;
    let frac = nz - 2.0 * (nz / 2.0).floor();
    if frac == 0.0 || frac == 1.0 {
        return 0.0; // node: sin of an exact integer multiple of π
    }
    (core::f64::consts::PI * frac).sin()
}

/// Coupling amplitude from a decay rate: `Ω_j = √γ_j` (natural units,
/// `γ_j = |Ω_j|²·L/c`).
pub fn omega_from_gamma(gamma: f64) -> f64 {
    gamma.sqrt()
}

/// Decay rate from a coupling amplitude: `γ_j = |Ω_j|²`.
pub fn gamma_from_omega(omega: f64) -> f64 {
    omega * omega
}
