//! The three classic cross-relaxation experiments and their closed-form
//! observables.
//!
//! All three experiments start from a diagonal (population-only) initial
//! state prepared out of thermal equilibrium, then relax freely. The
//! longitudinal magnetizations `<Iz>(t)` and `<Sz>(t)` follow the coupled
//! two-exponential (Solomon) dynamics; the natural report observables are
//! the normalized deviations
//!
//! ```text
//! Upsilon_I(t) = (<Iz>(t) - <Iz>_eq) / <Sz>_eq
//! Upsilon_S(t) = (<Sz>(t) - <Sz>_eq) / <Sz>_eq
//! ```
//!
//! (both normalized by the equilibrium `S` magnetization, the species acted
//! on by the preparation pulse). With `E_f = exp(-kappa iota0_f t)`,
//! `E_g = exp(-kappa iota0_g t)` and the `h` coefficients from
//! [`crate::propagator::h_coefficients`]:
//!
//! * saturation of S:
//!   `Upsilon_I = -h1 (E_g - E_f)`,
//!   `Upsilon_S = h2 (E_g - E_f) - (E_g + E_f)/2`;
//! * inversion of S: exactly twice the saturation responses;
//! * inversion of both spins:
//!   `Upsilon_I = -2 (omega_I h2 + omega_S h1)/omega_S (E_g - E_f)
//!                - (omega_I/omega_S) (E_g + E_f)`,
//!   `Upsilon_S = 2 (omega_S h2 + omega_I h3)/omega_S (E_g - E_f)
//!                - (E_g + E_f)`.
//!
//! `Upsilon_I` is the transient nuclear Overhauser enhancement; its
//! extremum time is [`enhancement_peak_time`].
//!
//! A brute-force verification path ([`longitudinal_trajectory_evolved`])
//! computes the same trajectories by propagating the full density matrix
//! and reading the observables back out; tests pin the two paths together.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::propagator::{
    self, DensityState, HCoefficients, PropagatorError,
};
use crate::spectral::{CollectiveRates, SpectralSamples};
use crate::superop::closed_form_rates;
use crate::system::{PhysicalConstants, SpinPairSystem};

/// Value of `hbar * max(|omega|) / (k_B T)` above which the linearized
/// equilibrium populations used throughout are no longer accurate to better
/// than about one part in 10^4; front ends should warn past this point.
pub const HIGH_TEMPERATURE_LIMIT: f64 = 0.01;

/// Errors from experiment-level operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    /// Trajectory time points must be finite and nonnegative.
    #[error("time points must be finite and nonnegative, got {t}")]
    InvalidTime {
        /// The rejected time value, s.
        t: f64,
    },
    /// Peak-time evaluation from time constants requires `0 < T1 < D1`.
    #[error("time constants must satisfy 0 < T1 < D1, got T1 = {t1}, D1 = {d1}")]
    InvalidTimeConstants {
        /// Fast time constant, s.
        t1: f64,
        /// Slow time constant, s.
        d1: f64,
    },
    /// A propagation step failed.
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
}

/// The initial preparation of a relaxation experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// `<Sz>(0) = 0`, `<Iz>(0)` at equilibrium (steady saturation of S
    /// released at `t = 0`).
    SaturationS,
    /// `<Sz>(0) = -<Sz>_eq`, `<Iz>(0)` at equilibrium (selective 180-degree
    /// pulse on S).
    InversionS,
    /// Both magnetizations inverted (hard 180-degree pulse on both
    /// species).
    InversionBoth,
}

/// Longitudinal and transverse expectation values of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    /// `<Iz> = (rho_11 + rho_22 - rho_33 - rho_44)/2`.
    pub i_z: f64,
    /// `<Sz> = (rho_11 - rho_22 + rho_33 - rho_44)/2`.
    pub s_z: f64,
    /// `<Ix> = Re(rho_13 + rho_24)`.
    pub i_x: f64,
    /// `<Sx> = Re(rho_12 + rho_34)`.
    pub s_x: f64,
}

/// Reads the four magnetization components off a density matrix.
pub fn expectation_values(state: &DensityState) -> Observables {
    let p = state.populations();
    Observables {
        i_z: (p[0] + p[1] - p[2] - p[3]) / 2.0,
        s_z: (p[0] - p[1] + p[2] - p[3]) / 2.0,
        i_x: (state.element(0, 2) + state.element(1, 3)).re,
        s_x: (state.element(0, 1) + state.element(2, 3)).re,
    }
}

/// The dimensionless thermal polarization parameters
/// `a = hbar omega_I / (2 k_B T)` and `b = hbar omega_S / (2 k_B T)`.
///
/// The equilibrium magnetizations are `<Iz>_eq = a/2` and `<Sz>_eq = b/2`.
pub fn thermal_polarizations(system: &SpinPairSystem, consts: &PhysicalConstants) -> (f64, f64) {
    let freqs = system.larmor_frequencies();
    let denom = 2.0 * consts.k_b * system.temperature();
    (
        consts.hbar * freqs.omega_i / denom,
        consts.hbar * freqs.omega_s / denom,
    )
}

/// The expansion parameter `hbar max(|omega_I|, |omega_S|) / (k_B T)` of the
/// linearized thermal state. Compare against [`HIGH_TEMPERATURE_LIMIT`].
pub fn high_temperature_parameter(system: &SpinPairSystem, consts: &PhysicalConstants) -> f64 {
    let freqs = system.larmor_frequencies();
    consts.hbar * freqs.omega_i.abs().max(freqs.omega_s.abs())
        / (consts.k_b * system.temperature())
}

/// The linearized thermal equilibrium state: diagonal with populations
/// `(1 + a + b, 1 + a - b, 1 - a + b, 1 - a - b)/4` where `(a, b)` are the
/// [`thermal_polarizations`]. Normalization `Z = 4` is exact at this order.
pub fn equilibrium_state(
    system: &SpinPairSystem,
    consts: &PhysicalConstants,
) -> Result<DensityState, ExperimentError> {
    let (a, b) = thermal_polarizations(system, consts);
    Ok(DensityState::from_populations([
        (1.0 + a + b) / 4.0,
        (1.0 + a - b) / 4.0,
        (1.0 - a + b) / 4.0,
        (1.0 - a - b) / 4.0,
    ])?)
}

/// The diagonal initial state of an experiment.
///
/// * [`ExperimentKind::SaturationS`]: `(1 + a, 1 + a, 1 - a, 1 - a)/4`
/// * [`ExperimentKind::InversionS`]: `(1 + a - b, 1 + a + b, 1 - a - b, 1 - a + b)/4`
/// * [`ExperimentKind::InversionBoth`]: `(1 - a - b, 1 - a + b, 1 + a - b, 1 + a + b)/4`
pub fn prepare_initial_state(
    kind: ExperimentKind,
    system: &SpinPairSystem,
    consts: &PhysicalConstants,
) -> Result<DensityState, ExperimentError> {
    let (a, b) = thermal_polarizations(system, consts);
    let populations = match kind {
        ExperimentKind::SaturationS => [1.0 + a, 1.0 + a, 1.0 - a, 1.0 - a],
        ExperimentKind::InversionS => [1.0 + a - b, 1.0 + a + b, 1.0 - a - b, 1.0 - a + b],
        ExperimentKind::InversionBoth => [1.0 - a - b, 1.0 - a + b, 1.0 + a - b, 1.0 + a + b],
    };
    Ok(DensityState::from_populations(
        populations.map(|p| p / 4.0),
    )?)
}

/// A sampled pair of normalized longitudinal deviations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// Sample times, s.
    pub times: Vec<f64>,
    /// `Upsilon_I` at each time.
    pub upsilon_i: Vec<f64>,
    /// `Upsilon_S` at each time.
    pub upsilon_s: Vec<f64>,
}

fn check_times(times: &[f64]) -> Result<(), ExperimentError> {
    for &t in times {
        if !t.is_finite() || t < 0.0 {
            return Err(ExperimentError::InvalidTime { t });
        }
    }
    Ok(())
}

fn closed_form_upsilons(
    kind: ExperimentKind,
    h: &HCoefficients,
    omega_i: f64,
    omega_s: f64,
    e_f: f64,
    e_g: f64,
) -> (f64, f64) {
    let diff = e_g - e_f;
    let sum = e_g + e_f;
    match kind {
        ExperimentKind::SaturationS => (-h.h1 * diff, h.h2 * diff - sum / 2.0),
        ExperimentKind::InversionS => (-2.0 * h.h1 * diff, 2.0 * h.h2 * diff - sum),
        ExperimentKind::InversionBoth => (
            -2.0 * ((omega_i * h.h2 + omega_s * h.h1) / omega_s) * diff
                - (omega_i / omega_s) * sum,
            2.0 * ((omega_s * h.h2 + omega_i * h.h3) / omega_s) * diff - sum,
        ),
    }
}

/// Evaluates the closed-form longitudinal trajectories of an experiment.
///
/// `samples` are the spectral-density values at the transition frequencies
/// of `system`, and `kappa` the dipolar coupling constant (pass
/// [`SpinPairSystem::dipolar_constant`], or any other value when
/// reproducing externally quoted rates). Times must be finite and
/// nonnegative (seconds).
///
/// If the mixed-mode algebra is degenerate (like-spin limit), the
/// trajectories are computed by full density-matrix propagation instead;
/// the result contract is unchanged.
pub fn longitudinal_trajectory(
    kind: ExperimentKind,
    system: &SpinPairSystem,
    consts: &PhysicalConstants,
    samples: &SpectralSamples,
    kappa: f64,
    times: &[f64],
) -> Result<Trajectory, ExperimentError> {
    check_times(times)?;
    let h = match propagator::h_coefficients_auto(samples) {
        Ok(h) => h,
        Err(PropagatorError::DegenerateSpectrum { .. }) => {
            return longitudinal_trajectory_evolved(kind, system, consts, samples, kappa, times)
        }
        Err(e) => return Err(e.into()),
    };
    let freqs = system.larmor_frequencies();
    let rates = closed_form_rates(samples, kappa);
    let mut upsilon_i = Vec::with_capacity(times.len());
    let mut upsilon_s = Vec::with_capacity(times.len());
    for &t in times {
        let e_f = (-rates.r0_f * t).exp();
        let e_g = (-rates.r0_g * t).exp();
        let (ui, us) = closed_form_upsilons(kind, &h, freqs.omega_i, freqs.omega_s, e_f, e_g);
        upsilon_i.push(ui);
        upsilon_s.push(us);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        upsilon_i,
        upsilon_s,
    })
}

/// Computes the same trajectories as [`longitudinal_trajectory`] by
/// propagating the full density matrix from the prepared initial state and
/// reading the magnetizations back out.
///
/// This is the redundant verification path: it exercises the 6-dimensional
/// population block machinery instead of the 2x2 magnetization algebra.
pub fn longitudinal_trajectory_evolved(
    kind: ExperimentKind,
    system: &SpinPairSystem,
    consts: &PhysicalConstants,
    samples: &SpectralSamples,
    kappa: f64,
    times: &[f64],
) -> Result<Trajectory, ExperimentError> {
    check_times(times)?;
    let equilibrium = equilibrium_state(system, consts)?;
    let initial = prepare_initial_state(kind, system, consts)?;
    let eq_obs = expectation_values(&equilibrium);
    let mut upsilon_i = Vec::with_capacity(times.len());
    let mut upsilon_s = Vec::with_capacity(times.len());
    for &t in times {
        let evolved =
            propagator::evolve_zero_order(&initial, &equilibrium, samples, kappa, t)?;
        let p = evolved.populations;
        let i_z = (p[0] + p[1] - p[2] - p[3]) / 2.0;
        let s_z = (p[0] - p[1] + p[2] - p[3]) / 2.0;
        upsilon_i.push((i_z - eq_obs.i_z) / eq_obs.s_z);
        upsilon_s.push((s_z - eq_obs.s_z) / eq_obs.s_z);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        upsilon_i,
        upsilon_s,
    })
}

/// A sampled pair of normalized transverse decays.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransverseTrajectory {
    /// Sample times, s.
    pub times: Vec<f64>,
    /// `<Ix>(t) / <Ix>(0)` at each time.
    pub i_x: Vec<f64>,
    /// `<Sx>(t) / <Sx>(0)` at each time.
    pub s_x: Vec<f64>,
}

/// Evaluates the normalized transverse decays after an ideal 90-degree
/// pulse: `<Ix>` decays mono-exponentially at `kappa * iota1_f` and `<Sx>`
/// at `kappa * iota1_a`.
pub fn transverse_trajectory(
    samples: &SpectralSamples,
    kappa: f64,
    times: &[f64],
) -> Result<TransverseTrajectory, ExperimentError> {
    check_times(times)?;
    let rates = closed_form_rates(samples, kappa);
    Ok(TransverseTrajectory {
        times: times.to_vec(),
        i_x: times.iter().map(|&t| (-rates.r1_f * t).exp()).collect(),
        s_x: times.iter().map(|&t| (-rates.r1_a * t).exp()).collect(),
    })
}

/// The time of the transient enhancement extremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakTime {
    /// Extremum time of `Upsilon_I`, s.
    pub t_m: f64,
    /// True when the two longitudinal mode rates are numerically
    /// indistinguishable and the confluent limit `t_m = 1/(kappa Jp)` was
    /// used instead of the general formula.
    pub degenerate_limit: bool,
}

/// The time at which the transient enhancement `Upsilon_I` of the
/// saturation and inversion experiments is extremal:
///
/// ```text
/// t_m = artanh(Jn / Jp) / (kappa Jn)
/// ```
///
/// with the confluent limit `t_m -> 1/(kappa Jp)` as `Jn -> 0` (flagged in
/// the result). If `Jn = Jp` (a vanishing slow rate), `t_m` is infinite.
pub fn enhancement_peak_time(kappa: f64, rates: &CollectiveRates) -> PeakTime {
    let ratio = rates.jn / rates.jp;
    if ratio < 1e-10 {
        PeakTime {
            t_m: 1.0 / (kappa * rates.jp),
            degenerate_limit: true,
        }
    } else {
        PeakTime {
            t_m: ratio.atanh() / (kappa * rates.jn),
            degenerate_limit: false,
        }
    }
}

/// [`enhancement_peak_time`] stated in terms of the two longitudinal time
/// constants `T1 = 1/(kappa (Jp + Jn))` and `D1 = 1/(kappa (Jp - Jn))`
/// (fast and slow):
///
/// ```text
/// t_m = ln(D1/T1) * T1 D1 / (D1 - T1)
/// ```
///
/// Requires `0 < T1 < D1`.
pub fn peak_time_from_time_constants(t1: f64, d1: f64) -> Result<PeakTime, ExperimentError> {
    if !(t1.is_finite() && d1.is_finite() && 0.0 < t1 && t1 < d1) {
        return Err(ExperimentError::InvalidTimeConstants { t1, d1 });
    }
    Ok(PeakTime {
        t_m: (d1 / t1).ln() * t1 * d1 / (d1 - t1),
        degenerate_limit: false,
    })
}
