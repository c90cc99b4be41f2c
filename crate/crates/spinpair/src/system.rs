//! Physical description of the spin pair.
//!
//! Everything downstream — spectral densities, superoperators, trajectories —
//! is parameterized by a handful of numbers: the two gyromagnetic ratios, the
//! static field, the internuclear distance, and the temperature. This module
//! bundles them into [`SpinPairSystem`], derives the Larmor and level
//! frequencies ([`EigenFrequencies`]), and computes the dipolar coupling
//! strength `kappa` that converts the dimensionless relaxation eigenvalues
//! into physical rates.
//!
//! # Conventions
//!
//! * The two spins are called `I` and `S`. They must be *unlike* spins
//!   (different gyromagnetic ratios); the like-spin case obeys different
//!   relaxation equations and is rejected at construction.
//! * Angular frequencies are in rad/s, fields in tesla, distances in metres,
//!   temperatures in kelvin.
//! * `kappa` carries one power of the reduced Planck constant:
//!   `kappa = (mu0/4pi * hbar * gamma_I * gamma_S / r^3)^2 * 3/4`, which has
//!   units of s^-2. A second power of `hbar` is sometimes seen in print but
//!   is dimensionally inconsistent with rates `R = kappa * J` (spectral
//!   densities `J` are in seconds); the single-`hbar` form reproduces the
//!   accepted H-F literature value of ~4.8e11 s^-2 at r = 96 pm.

use serde::Serialize;
use thiserror::Error;

/// Errors from constructing or using a spin-pair system description.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    /// A parameter that must be strictly positive was zero, negative, or not
    /// finite.
    #[error("parameter `{name}` must be strictly positive and finite, got {value}")]
    NotPositive {
        /// Name of the offending parameter.
        name: &'static str,
        /// Value that was rejected.
        value: f64,
    },
    /// A parameter that must be finite and nonzero was not.
    #[error("parameter `{name}` must be finite and nonzero, got {value}")]
    NotFiniteNonzero {
        /// Name of the offending parameter.
        name: &'static str,
        /// Value that was rejected.
        value: f64,
    },
    /// The two gyromagnetic ratios coincide, i.e. the pair is not an unlike
    /// pair. The closed forms in this crate assume distinct Larmor
    /// frequencies.
    #[error("gamma_i and gamma_s must differ (unlike-spin pair), both are {gamma}")]
    LikeSpins {
        /// The common gyromagnetic ratio.
        gamma: f64,
    },
}

/// Fundamental constants in SI units.
///
/// The [`codata`](Self::codata) constructor supplies 2018 CODATA values;
/// all fields are public so historical or rounded constant sets can be
/// substituted when reproducing older numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J*s.
    pub hbar: f64,
    /// Magnetic constant divided by 4 pi, T*m/A.
    pub mu0_over_4pi: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values (`mu0/4pi` reflects the post-2019 measured value of
    /// the magnetic constant; the deviation from exactly 1e-7 is 5.5e-10
    /// relative).
    pub const fn codata() -> Self {
        Self {
            hbar: 1.054_571_817e-34,
            mu0_over_4pi: 1.000_000_000_55e-7,
            k_b: 1.380_649e-23,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

/// Larmor frequencies of the two species and the four level frequencies of
/// the static Hamiltonian, all in rad/s.
///
/// The product basis is ordered `|1> = |up,up>`, `|2> = |up,down>`,
/// `|3> = |down,up>`, `|4> = |down,down>`, where the first arrow is spin `I`
/// and the second is spin `S`. The level frequencies satisfy
/// `omega_1 + omega_4 = 0` and `omega_2 + omega_3 = 0` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenFrequencies {
    /// Larmor frequency of spin I: `gamma_I * B0`, rad/s.
    pub omega_i: f64,
    /// Larmor frequency of spin S: `gamma_S * B0`, rad/s.
    pub omega_s: f64,
    /// Level frequency of `|up,up>`: `-(omega_I + omega_S)/2`.
    pub omega_1: f64,
    /// Level frequency of `|up,down>`: `-(omega_I - omega_S)/2`.
    pub omega_2: f64,
    /// Level frequency of `|down,up>`: `+(omega_I - omega_S)/2`.
    pub omega_3: f64,
    /// Level frequency of `|down,down>`: `+(omega_I + omega_S)/2`.
    pub omega_4: f64,
}

/// An unlike spin-1/2 pair in a static field.
///
/// Immutable once constructed; all parameters are validated by
/// [`new`](Self::new). Copyable and safe to share across threads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinPairSystem {
    gamma_i: f64,
    gamma_s: f64,
    b0: f64,
    r: f64,
    temperature: f64,
}

impl SpinPairSystem {
    /// Builds a validated system description.
    ///
    /// * `gamma_i`, `gamma_s` — gyromagnetic ratios, rad s^-1 T^-1. Must be
    ///   finite, nonzero, and distinct (negative values, e.g. nitrogen-15,
    ///   are fine).
    /// * `b0` — static field, T, strictly positive.
    /// * `r` — internuclear distance, m, strictly positive.
    /// * `temperature` — lattice temperature, K, strictly positive.
    pub fn new(
        gamma_i: f64,
        gamma_s: f64,
        b0: f64,
        r: f64,
        temperature: f64,
    ) -> Result<Self, SystemError> {
        for (name, value) in [("gamma_i", gamma_i), ("gamma_s", gamma_s)] {
            if !value.is_finite() || value == 0.0 {
                return Err(SystemError::NotFiniteNonzero { name, value });
            }
        }
        for (name, value) in [("b0", b0), ("r", r), ("temperature", temperature)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(SystemError::NotPositive { name, value });
            }
        }
        if gamma_i == gamma_s {
            return Err(SystemError::LikeSpins { gamma: gamma_i });
        }
        Ok(Self {
            gamma_i,
            gamma_s,
            b0,
            r,
            temperature,
        })
    }

    /// Gyromagnetic ratio of spin I, rad s^-1 T^-1.
    pub fn gamma_i(&self) -> f64 {
        self.gamma_i
    }

    /// Gyromagnetic ratio of spin S, rad s^-1 T^-1.
    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }

    /// Static field strength, T.
    pub fn b0(&self) -> f64 {
        self.b0
    }

    /// Internuclear distance, m.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Lattice temperature, K.
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Larmor frequencies `omega = gamma * B0` and the four level
    /// frequencies of the product basis.
    pub fn larmor_frequencies(&self) -> EigenFrequencies {
        let omega_i = self.gamma_i * self.b0;
        let omega_s = self.gamma_s * self.b0;
        EigenFrequencies {
            omega_i,
            omega_s,
            omega_1: -(omega_i + omega_s) / 2.0,
            omega_2: -(omega_i - omega_s) / 2.0,
            omega_3: (omega_i - omega_s) / 2.0,
            omega_4: (omega_i + omega_s) / 2.0,
        }
    }

    /// Dipolar coupling strength `kappa`, s^-2.
    ///
    /// `kappa = (mu0/4pi * hbar * gamma_I * gamma_S / r^3)^2 * s(s+1)` with
    /// `s = 1/2`, i.e. a factor 3/4. Physical relaxation rates are
    /// `R = kappa * iota` where `iota` are the spectral-density eigenvalue
    /// combinations (units s), so `kappa * iota` is in s^-1 as required.
    ///
    /// The value is invariant under swapping the two gyromagnetic ratios and
    /// independent of `B0` and temperature.
    pub fn dipolar_constant(&self, consts: &PhysicalConstants) -> f64 {
        let base = consts.mu0_over_4pi * consts.hbar * self.gamma_i * self.gamma_s
            / (self.r * self.r * self.r);
        base * base * 0.75
    }
}

/// Gyromagnetic ratios of common spin-1/2 nuclei, rad s^-1 T^-1.
///
/// Convenience table for front ends; the library itself treats the ratios as
/// plain inputs.
pub mod gyromagnetic {
    /// Hydrogen-1 (proton).
    pub const H1: f64 = 2.675_221_874_4e8;
    /// Fluorine-19.
    pub const F19: f64 = 2.518_148e8;
    /// Carbon-13.
    pub const C13: f64 = 6.728_284e7;
    /// Nitrogen-15 (negative ratio).
    pub const N15: f64 = -2.712_6e7;
}
