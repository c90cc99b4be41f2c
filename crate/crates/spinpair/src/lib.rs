//! Closed-form relaxation dynamics of a dipole-coupled pair of unlike
//! spin-1/2 nuclei.
//!
//! Two unlike spin-1/2 nuclei coupled by the fluctuating magnetic
//! dipole-dipole interaction relax toward thermal equilibrium with fully
//! solvable dynamics: the relaxation generator splits into independent
//! blocks by coherence order, each small enough to diagonalize in closed
//! form. This crate implements that solution end to end:
//!
//! * [`system`] — the physical description (gyromagnetic ratios, field,
//!   distance, temperature) and the dipolar coupling constant `kappa`;
//! * [`spectral`] — motional models (isotropic tumbling and the two-time
//!   model-free form) and their spectral-density samples at the five
//!   transition frequencies;
//! * [`superop`] — the relaxation generator blocks and the closed-form
//!   rate table (all eight relaxation rates as explicit spectral-density
//!   combinations);
//! * [`propagator`] — exact propagation of every density-matrix element as
//!   a superposition of at most four real exponentials, with a numerically
//!   stable evaluation of the mode amplitudes;
//! * [`experiment`] — the three classic preparation experiments
//!   (saturation, selective inversion, hard inversion), their normalized
//!   enhancement trajectories, and the transient-enhancement peak time;
//! * [`fitting`] — recovery of motional parameters from enhancement data
//!   by multi-start nonlinear least squares;
//! * [`oracle`] — a self-contained brute-force linear-algebra backend
//!   (matrix exponential, symmetric eigendecomposition) used to
//!   cross-check every closed form in the test suite.
//!
//! # Conventions
//!
//! All quantities are SI: angular frequencies in rad/s, times in seconds,
//! spectral densities in seconds, `kappa` in s^-2, relaxation rates
//! `R = kappa * iota` in s^-1. The product basis is ordered
//! `|1> = |up,up>`, `|2> = |up,down>`, `|3> = |down,up>`,
//! `|4> = |down,down>` with spin I first. Zero-quantum coherences are
//! handled in the interaction picture (see [`propagator`]).
//!
//! # Example
//!
//! Relaxation rates and the enhancement peak for a fluorine-proton pair
//! tumbling isotropically:
//!
//! ```
//! use spinpair::{
//!     experiment, spectral::SpectralDensityModel, superop,
//!     system::{gyromagnetic, PhysicalConstants, SpinPairSystem},
//! };
//!
//! let consts = PhysicalConstants::codata();
//! let system = SpinPairSystem::new(
//!     gyromagnetic::F19, // observed spin I
//!     gyromagnetic::H1,  // prepared spin S
//!     0.705,             // field, T
//!     96.098e-12,        // distance, m
//!     293.0,             // temperature, K
//! )?;
//! let kappa = system.dipolar_constant(&consts);
//!
//! let model = SpectralDensityModel::isotropic(0.2391e-12)?;
//! let samples = model.sample_at_transitions(&system.larmor_frequencies());
//! let rates = superop::closed_form_rates(&samples, kappa);
//!
//! // Longitudinal recovery is bi-exponential with rates R0_f and R0_g.
//! assert!(rates.r0_f > rates.r0_g);
//!
//! // The transient enhancement peaks a bit after one fast time constant.
//! let peak = experiment::enhancement_peak_time(kappa, &samples.collective_rates());
//! assert!(peak.t_m > 1.0 / rates.r0_f);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

#![warn(missing_docs)]
#![forbid(unsafe_code)]

pub mod experiment;
pub mod fitting;
pub mod oracle;
pub mod propagator;
pub mod spectral;
pub mod superop;
pub mod system;

pub use experiment::{ExperimentKind, Observables, PeakTime, Trajectory, TransverseTrajectory};
pub use fitting::{DataSet, FitResult, ModelFamily};
pub use propagator::{DensityState, HCoefficients};
pub use spectral::{CollectiveRates, SpectralDensityModel, SpectralSamples};
pub use superop::RateSet;
pub use system::{EigenFrequencies, PhysicalConstants, SpinPairSystem};

/// Compiled versions of the user-guide chapters (`book/src/*.md`).
///
/// Each chapter is included as a doc-test module so that every code
/// snippet in the guide is compiled and executed by `cargo test --doc`;
/// the prose cannot drift away from the library it describes.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/spin-system.md")]
    pub mod spin_system {}
    #[doc = include_str!("../../../book/src/spectral-densities.md")]
    pub mod spectral_densities {}
    #[doc = include_str!("../../../book/src/superoperators.md")]
    pub mod superoperators {}
    #[doc = include_str!("../../../book/src/propagation.md")]
    pub mod propagation {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
    #[doc = include_str!("../../../book/src/fitting.md")]
    pub mod fitting_guide {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
