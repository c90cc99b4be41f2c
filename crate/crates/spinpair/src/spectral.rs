//! Spectral-density models and their samples at the five transition
//! frequencies.
//!
//! The dipolar relaxation rates of the pair depend on the lattice motion only
//! through the spectral density `J(omega)` — the Fourier transform of the
//! orientation correlation function — evaluated at five frequencies: zero,
//! the two Larmor frequencies, and their sum and difference. This module
//! provides the two standard motional models and the bookkeeping types for
//! those five samples.
//!
//! # Models
//!
//! * **Isotropic** rotational diffusion with one correlation time `tau_c`:
//!   `J(omega) = 2 tau_c / (1 + (omega tau_c)^2)`.
//! * **Model-free** (Lipari–Szabo) with a squared order parameter `S^2`, a
//!   global time `tau_M` and an internal time `tau_e`:
//!   `J(omega) = 2 [ S^2 tau_M / (1 + (omega tau_M)^2)
//!   + (1 - S^2) tau / (1 + (omega tau)^2) ]` with
//!   `1/tau = 1/tau_M + 1/tau_e`.
//!
//! Both carry the same prefactor convention (a leading 2, no 2/5), so the
//! model-free form degenerates *exactly* to the isotropic one at `S^2 = 1`.
//! Any overall constant prefactor would be absorbed by rescaling the dipolar
//! constant and cancels in every dimensionless quantity (`Jn/Jp`, the `h`
//! coefficients, normalized trajectories).
//!
//! # Collective rates
//!
//! Longitudinal recovery is bi-exponential with rates `kappa (Jp +- Jn)`
//! where
//!
//! ```text
//! Jp = (jS + jI)/2 + (6 jPlus + jMinus)/3
//! Jn = sqrt( ((jS - jI)/2)^2 + ((6 jPlus - jMinus)/3)^2 )
//! ```
//!
//! `Jn <= Jp` always holds for nonnegative samples, so both rates are
//! nonnegative. In the extreme-narrowing limit (all samples equal to
//! `2 tau_c`) the ratio is exactly `Jn/Jp = 1/2`.

use serde::Serialize;
use thiserror::Error;

use crate::system::EigenFrequencies;

/// Errors from constructing a spectral-density model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    /// A correlation time was zero, negative, or not finite.
    #[error("correlation time `{name}` must be strictly positive and finite, got {value}")]
    NotPositive {
        /// Name of the offending parameter.
        name: &'static str,
        /// Value that was rejected.
        value: f64,
    },
    /// The squared order parameter was outside `(0, 1]`.
    #[error("order_param_sq must lie in (0, 1], got {value}")]
    OrderParamOutOfRange {
        /// Value that was rejected.
        value: f64,
    },
}

/// A motional model for the lattice, i.e. a parameterized spectral density.
///
/// Construct through [`isotropic`](Self::isotropic) or
/// [`model_free`](Self::model_free) to get parameter validation. The variant
/// fields are public for pattern matching and serialization; code that
/// fabricates values directly is responsible for the invariants (positive
/// times, `order_param_sq` in `(0, 1]`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SpectralDensityModel {
    /// Isotropic rotational diffusion with a single correlation time.
    Isotropic {
        /// Rotational correlation time, s.
        tau_c: f64,
    },
    /// Two-timescale model-free form.
    ModelFree {
        /// Squared generalized order parameter, dimensionless, in `(0, 1]`.
        order_param_sq: f64,
        /// Global (overall tumbling) correlation time, s.
        tau_m: f64,
        /// Effective internal correlation time, s.
        tau_e: f64,
    },
}

impl SpectralDensityModel {
    /// Isotropic model with correlation time `tau_c` (s, strictly positive).
    pub fn isotropic(tau_c: f64) -> Result<Self, SpectralError> {
        if !tau_c.is_finite() || tau_c <= 0.0 {
            return Err(SpectralError::NotPositive {
                name: "tau_c",
                value: tau_c,
            });
        }
        Ok(Self::Isotropic { tau_c })
    }

    /// Model-free form with squared order parameter `order_param_sq` in
    /// `(0, 1]` and strictly positive correlation times `tau_m`, `tau_e` (s).
    pub fn model_free(
        order_param_sq: f64,
        tau_m: f64,
        tau_e: f64,
    ) -> Result<Self, SpectralError> {
        if !order_param_sq.is_finite() || order_param_sq <= 0.0 || order_param_sq > 1.0 {
            return Err(SpectralError::OrderParamOutOfRange {
                value: order_param_sq,
            });
        }
        for (name, value) in [("tau_m", tau_m), ("tau_e", tau_e)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(SpectralError::NotPositive { name, value });
            }
        }
        Ok(Self::ModelFree {
            order_param_sq,
            tau_m,
            tau_e,
        })
    }

    /// Evaluates the spectral density at angular frequency `omega` (rad/s).
    ///
    /// The density is even in `omega`; negative frequencies are fine. The
    /// result is in seconds and is monotone nonincreasing in `|omega|` for
    /// both built-in models.
    pub fn evaluate(&self, omega: f64) -> f64 {
        fn lorentzian(omega: f64, tau: f64) -> f64 {
            let x = omega * tau;
            2.0 * tau / (1.0 + x * x)
        }
        match *self {
            Self::Isotropic { tau_c } => lorentzian(omega, tau_c),
            Self::ModelFree {
                order_param_sq,
                tau_m,
                tau_e,
            } => {
                let tau = 1.0 / (1.0 / tau_m + 1.0 / tau_e);
                order_param_sq * lorentzian(omega, tau_m)
                    + (1.0 - order_param_sq) * lorentzian(omega, tau)
            }
        }
    }

    /// Samples the density at the five frequencies that drive pair
    /// relaxation: 0, `omega_S`, `omega_I`, `omega_S + omega_I`, and
    /// `|omega_S - omega_I|`.
    pub fn sample_at_transitions(&self, freqs: &EigenFrequencies) -> SpectralSamples {
        SpectralSamples {
            j0: self.evaluate(0.0),
            j_s: self.evaluate(freqs.omega_s),
            j_i: self.evaluate(freqs.omega_i),
            j_plus: self.evaluate(freqs.omega_s + freqs.omega_i),
            j_minus: self.evaluate((freqs.omega_s - freqs.omega_i).abs()),
        }
    }
}

/// The five spectral-density samples that enter the relaxation
/// superoperators, all in seconds.
///
/// `j0 = J(0)`, `j_s = J(omega_S)`, `j_i = J(omega_I)`,
/// `j_plus = J(omega_S + omega_I)`, `j_minus = J(|omega_S - omega_I|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSamples {
    /// Zero-frequency sample `J(0)`, s.
    pub j0: f64,
    /// Sample at the S Larmor frequency, s.
    pub j_s: f64,
    /// Sample at the I Larmor frequency, s.
    pub j_i: f64,
    /// Sample at the sum frequency (double-quantum transition), s.
    pub j_plus: f64,
    /// Sample at the difference frequency (zero-quantum transition), s.
    pub j_minus: f64,
}

impl SpectralSamples {
    /// The collective rates `Jp` and `Jn` controlling bi-exponential
    /// longitudinal recovery.
    pub fn collective_rates(&self) -> CollectiveRates {
        let jp = (self.j_s + self.j_i) / 2.0 + (6.0 * self.j_plus + self.j_minus) / 3.0;
        let jn = f64::hypot(
            (self.j_s - self.j_i) / 2.0,
            (6.0 * self.j_plus - self.j_minus) / 3.0,
        );
        CollectiveRates { jp, jn }
    }
}

/// The symmetric/antisymmetric combinations of the longitudinal relaxation
/// channel, in seconds.
///
/// The two longitudinal decay rates are `kappa * (jp + jn)` (fast) and
/// `kappa * (jp - jn)` (slow). For nonnegative samples `0 <= jn <= jp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollectiveRates {
    /// Mean rate combination, s.
    pub jp: f64,
    /// Splitting combination (always nonnegative), s.
    pub jn: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::SpinPairSystem;

    fn hf_frequencies() -> EigenFrequencies {
        SpinPairSystem::new(2.518_148e8, 2.675_221_874_4e8, 0.705, 96.098e-12, 293.0)
            .unwrap()
            .larmor_frequencies()
    }

    #[test]
    fn isotropic_value_at_zero_frequency() {
        let model = SpectralDensityModel::isotropic(3.7e-12).unwrap();
        assert_eq!(model.evaluate(0.0), 2.0 * 3.7e-12);
    }

    #[test]
    fn isotropic_half_power_point() {
        // At omega * tau_c = 1 the Lorentzian drops to half its peak: J = tau_c.
        let tau_c = 5.0e-10;
        let model = SpectralDensityModel::isotropic(tau_c).unwrap();
        let j = model.evaluate(1.0 / tau_c);
        assert!((j - tau_c).abs() <= 1e-15 * tau_c);
    }

    #[test]
    fn narrow_limit_matches_two_tau_c() {
        // |omega tau_c| <= 1e-4 leaves J within 1e-8 of 2 tau_c; the H-F pair
        // at 0.705 T with tau_c = 0.2391 ps sits deep in this regime and the
        // sample value is 0.4782e-12 s.
        let tau_c = 0.2391e-12;
        let model = SpectralDensityModel::isotropic(tau_c).unwrap();
        let freqs = hf_frequencies();
        assert!((freqs.omega_i * tau_c).abs() <= 1e-4);
        let j = model.evaluate(freqs.omega_i);
        assert!((j - 0.4782e-12).abs() <= 1e-4 * 0.4782e-12);
    }

    #[test]
    fn evaluate_is_even_in_frequency() {
        let model = SpectralDensityModel::model_free(0.3, 2.0e-9, 40.0e-12).unwrap();
        for omega in [0.0, 1.0e7, 3.3e8, 9.9e9] {
            assert_eq!(model.evaluate(omega), model.evaluate(-omega));
        }
    }

    #[test]
    fn model_free_at_unit_order_parameter_equals_isotropic() {
        let tau = 1.7e-9;
        let mf = SpectralDensityModel::model_free(1.0, tau, 5.0e-12).unwrap();
        let iso = SpectralDensityModel::isotropic(tau).unwrap();
        for omega in [0.0, 1.0e8, 5.0e8, 2.0e9, 1.0e10] {
            assert_eq!(mf.evaluate(omega), iso.evaluate(omega));
        }
    }

    #[test]
    fn samples_pass_through_the_five_frequencies() {
        let model = SpectralDensityModel::isotropic(0.8e-9).unwrap();
        let freqs = hf_frequencies();
        let s = model.sample_at_transitions(&freqs);
        assert_eq!(s.j0, model.evaluate(0.0));
        assert_eq!(s.j_s, model.evaluate(freqs.omega_s));
        assert_eq!(s.j_i, model.evaluate(freqs.omega_i));
        assert_eq!(s.j_plus, model.evaluate(freqs.omega_s + freqs.omega_i));
        assert_eq!(s.j_minus, model.evaluate(freqs.omega_s - freqs.omega_i));
        // Monotone decay: the zero-frequency sample dominates.
        assert!(s.j0 >= s.j_s && s.j0 >= s.j_i && s.j0 >= s.j_plus && s.j0 >= s.j_minus);
    }

    #[test]
    fn slow_motion_sample_is_strongly_suppressed() {
        // omega_I tau_c >> 1 pushes j_i down to ~2/(omega_I^2 tau_c).
        let tau_c = 1.0e-6;
        let model = SpectralDensityModel::isotropic(tau_c).unwrap();
        let freqs = hf_frequencies();
        let j_i = model.evaluate(freqs.omega_i);
        let approx = 2.0 / (freqs.omega_i * freqs.omega_i * tau_c);
        assert!((j_i - approx).abs() <= 1e-4 * approx);
        assert!(j_i < model.evaluate(0.0));
    }

    #[test]
    fn extreme_narrowing_collective_rates() {
        // All samples -> 2 tau_c, so Jp = 20 tau_c / 3 and Jn = 10 tau_c / 3,
        // with printed anchors 1.5939 ps and 0.7970 ps at tau_c = 0.2391 ps.
        let tau_c = 0.2391e-12;
        let samples = SpectralDensityModel::isotropic(tau_c)
            .unwrap()
            .sample_at_transitions(&hf_frequencies());
        let rates = samples.collective_rates();
        assert!((rates.jp - 20.0 * tau_c / 3.0).abs() <= 1e-6 * rates.jp);
        assert!((rates.jn - 10.0 * tau_c / 3.0).abs() <= 1e-6 * rates.jn);
        assert!((rates.jp - 1.5939e-12).abs() <= 1e-4 * 1.5939e-12);
        assert!((rates.jn - 0.7970e-12).abs() <= 1e-4 * 0.7970e-12);
        assert!((rates.jn / rates.jp - 0.5).abs() <= 1e-6);
    }

    #[test]
    fn collective_splitting_vanishes_when_both_components_do() {
        // Exactly representable values with 6 * j_plus == j_minus.
        let samples = SpectralSamples {
            j0: 1.0,
            j_s: 0.4,
            j_i: 0.4,
            j_plus: 0.125,
            j_minus: 0.75,
        };
        let rates = samples.collective_rates();
        assert_eq!(rates.jn, 0.0);
        assert!(rates.jp > 0.0);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(SpectralDensityModel::isotropic(-1.0e-12).is_err());
        assert!(SpectralDensityModel::isotropic(0.0).is_err());
        assert!(SpectralDensityModel::isotropic(f64::NAN).is_err());
        assert!(SpectralDensityModel::model_free(0.0, 1e-9, 1e-12).is_err());
        assert!(SpectralDensityModel::model_free(1.2, 1e-9, 1e-12).is_err());
        assert!(SpectralDensityModel::model_free(0.5, -1e-9, 1e-12).is_err());
        assert!(SpectralDensityModel::model_free(0.5, 1e-9, 0.0).is_err());
    }
}
