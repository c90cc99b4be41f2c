//! Closed-form time evolution of the density matrix, block by block.
//!
//! Each coherence-order block of the relaxation generator is small enough to
//! diagonalize by hand, so every density-matrix element evolves as an
//! explicit superposition of at most four real exponentials. This module
//! implements those solutions:
//!
//! * the quartic spectral parameters `A`, `B`, `C`, `D` ([`abcd`]) that
//!   appear in the printed form of the zero-order mode amplitudes,
//! * the dimensionless `h1`, `h2`, `h3` shorthand ([`h_coefficients`]) used
//!   by the experiment formulas,
//! * the mode amplitudes `rho_A ... rho_J` and `rho_K ... rho_N`
//!   ([`zero_order_coefficients`], [`first_order_coefficients`]),
//! * the propagation operations [`evolve_zero_order`],
//!   [`evolve_first_order`], [`evolve_second_order`].
//!
//! # Numerical strategy
//!
//! The printed expressions for the zero-order amplitudes divide by
//! `4(AD - BC)`; near the like-spin limit (`j_s ~ j_i`) numerator and
//! denominator both vanish and the quotient loses digits catastrophically.
//! The implementation therefore evaluates the same amplitudes through the
//! algebraically equivalent *stable route*: the two mixed longitudinal modes
//! are the eigenvectors of a symmetric 2x2 block, computed with the standard
//! closed-form rotation (the same arrangement LAPACK's `dlaev2` uses), which
//! stays accurate at every parameter point. Equality of the two routes away
//! from the degeneracy is pinned by tests.
//!
//! Degeneracy is flagged per route ([`PropagatorError::DegenerateSpectrum`],
//! threshold [`DEGENERACY_THRESHOLD`]): the printed quartic algebra by the
//! conditioning of its shared denominator `AD - BC` ([`abcd`],
//! [`h_coefficients`]), the mode decomposition by the resolvability of the
//! fast/slow splitting, `Jn` against `Jp` ([`zero_order_coefficients`]).
//! The two regions are not the same: `AD - BC` also cancels when `j_plus`
//! dominates the other samples, where the mode basis is still perfectly
//! well conditioned. Inside their flagged regions, coefficient queries fail
//! fast and the evolve operations transparently fall back to the
//! brute-force matrix exponential from [`crate::oracle`] — the result
//! contract is unchanged.
//!
//! # Frames
//!
//! Zero-quantum coherences are stored and evolved in the interaction
//! picture, where the generator is real. Lab-frame values are produced only
//! by the explicit [`zero_quantum_lab_frame`] helper, which applies the
//! oscillatory phase `exp(-i (omega_S - omega_I) (t - t0))`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::oracle::{self, OracleError};
use crate::spectral::SpectralSamples;
use crate::superop::{build_zero_order, closed_form_rates};

/// Relative conditioning threshold below which a coefficient decomposition
/// is treated as degenerate (like-spin limit).
///
/// Two ratios are measured against it: `|AD - BC| / max(|AD|, |BC|)` for
/// the printed quartic algebra ([`abcd`], and [`h_coefficients`] built on
/// it) and `Jn / Jp` for the fast/slow mode splitting
/// ([`zero_order_coefficients`]).
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

/// Tolerance for the Hermiticity and unit-trace checks of
/// [`DensityState::new`].
pub const STATE_TOLERANCE: f64 = 1e-12;

/// Errors from propagator operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagatorError {
    /// The spectral samples sit at (or numerically indistinguishable from)
    /// the like-spin degeneracy, where the closed-form coefficient quotients
    /// are ill-defined. `ratio` is the relative magnitude that fell below
    /// the threshold.
    #[error(
        "degenerate spectral parameters (like-spin limit): conditioning ratio {ratio:e} below {DEGENERACY_THRESHOLD:e}"
    )]
    DegenerateSpectrum {
        /// The relative magnitude compared against [`DEGENERACY_THRESHOLD`].
        ratio: f64,
    },
    /// Evolution times must be finite and nonnegative; the closed forms are
    /// stated for forward propagation only.
    #[error("time step must be finite and nonnegative, got {dt}")]
    InvalidTimeStep {
        /// The rejected time step, s.
        dt: f64,
    },
    /// A density matrix failed the Hermiticity check.
    #[error("density matrix is not Hermitian: max deviation {deviation:e} exceeds {STATE_TOLERANCE:e}")]
    NotHermitian {
        /// Largest entry-wise deviation from the conjugate transpose.
        deviation: f64,
    },
    /// A density matrix failed the unit-trace check.
    #[error("density matrix trace must be 1, got {trace_re} + {trace_im}i")]
    WrongTrace {
        /// Real part of the trace.
        trace_re: f64,
        /// Imaginary part of the trace.
        trace_im: f64,
    },
    /// A density-matrix entry is NaN or infinite.
    #[error("density matrix entries must be finite")]
    NotFinite,
    /// The brute-force fallback propagation failed.
    #[error("oracle fallback failed: {0}")]
    Oracle(#[from] OracleError),
}

/// A 4x4 density matrix in the product basis
/// `(|1>, |2>, |3>, |4>) = (|up,up>, |up,down>, |down,up>, |down,down>)`
/// (first arrow spin I, second spin S).
///
/// Validated on construction: Hermitian and unit trace within
/// [`STATE_TOLERANCE`], all entries finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityState {
    rho: [[Complex64; 4]; 4],
}

impl DensityState {
    /// Builds a validated density matrix from its entries (row-major,
    /// 0-based indices for states `|1>..|4>`).
    pub fn new(rho: [[Complex64; 4]; 4]) -> Result<Self, PropagatorError> {
        let mut deviation: f64 = 0.0;
        for (i, row) in rho.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(PropagatorError::NotFinite);
                }
                deviation = deviation.max((v - rho[j][i].conj()).norm());
            }
        }
        if deviation > STATE_TOLERANCE {
            return Err(PropagatorError::NotHermitian { deviation });
        }
        let trace: Complex64 = (0..4).map(|i| rho[i][i]).sum();
        if (trace - Complex64::new(1.0, 0.0)).norm() > STATE_TOLERANCE {
            return Err(PropagatorError::WrongTrace {
                trace_re: trace.re,
                trace_im: trace.im,
            });
        }
        Ok(Self { rho })
    }

    /// Builds a diagonal (population-only) state. The populations must be
    /// finite and sum to 1 within [`STATE_TOLERANCE`].
    pub fn from_populations(populations: [f64; 4]) -> Result<Self, PropagatorError> {
        let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, &p) in populations.iter().enumerate() {
            rho[i][i] = Complex64::new(p, 0.0);
        }
        Self::new(rho)
    }

    /// The underlying matrix.
    pub fn rho(&self) -> &[[Complex64; 4]; 4] {
        &self.rho
    }

    /// Entry at row `i`, column `j` (0-based).
    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.rho[i][j]
    }

    /// The four diagonal populations (real parts).
    pub fn populations(&self) -> [f64; 4] {
        [
            self.rho[0][0].re,
            self.rho[1][1].re,
            self.rho[2][2].re,
            self.rho[3][3].re,
        ]
    }
}

/// Extracts the zero-order block vector
/// `(d_rho_11, d_rho_22, rho_23, rho_32, d_rho_33, d_rho_44)` of `state`
/// relative to `equilibrium` (population deviations; coherences absolute,
/// `equilibrium` is assumed diagonal).
pub fn zero_order_vector(state: &DensityState, equilibrium: &DensityState) -> [Complex64; 6] {
    [
        state.rho[0][0] - equilibrium.rho[0][0],
        state.rho[1][1] - equilibrium.rho[1][1],
        state.rho[1][2],
        state.rho[2][1],
        state.rho[2][2] - equilibrium.rho[2][2],
        state.rho[3][3] - equilibrium.rho[3][3],
    ]
}

/// The four quartic spectral parameters entering the printed zero-order
/// amplitude formulas, units s^4, plus the discriminant `AD - BC`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbcdParameters {
    /// Parameter `A`; carries an overall factor `(j_s - j_i)`.
    pub a: f64,
    /// Parameter `B`; carries an overall factor `(j_s - j_i)`.
    pub b: f64,
    /// Parameter `C`.
    pub c: f64,
    /// Parameter `D`.
    pub d: f64,
    /// The discriminant `AD - BC` (denominator scale of the amplitude
    /// quotients), units s^8.
    pub det_scale: f64,
}

fn raw_abcd(samples: &SpectralSamples) -> (f64, f64, f64, f64) {
    let SpectralSamples {
        j_s: js,
        j_i: ji,
        j_plus: jp,
        j_minus: jm,
        ..
    } = *samples;
    let sum = js + ji;
    let diff = js - ji;
    let six_minus = 6.0 * jp - jm;
    let six_plus = 6.0 * jp + jm;
    let rad = (diff * diff + (4.0 / 9.0) * six_minus * six_minus).sqrt();

    let a = diff
        * (27.0 * sum.powi(3)
            + six_plus * (12.0 * js * ji - 16.0 * six_minus * six_minus + 96.0 * (js * ji - jp * jm)));
    let b = 3.0
        * diff
        * (9.0 * sum * sum + 18.0 * js * ji - 8.0 * six_plus * six_plus + 48.0 * jp * jm)
        * rad;
    let c = 27.0 * sum * (js.powi(3) + ji.powi(3))
        + 18.0 * sum.powi(3) * six_minus
        - 288.0 * (js * js + ji * ji) * jp * jm
        + 108.0 * js * js * ji * ji
        - 12.0 * diff * diff * jm * jm
        + 9.0 * (32.0 * jp * six_plus + 24.0 * (js * ji - 16.0 * jp * jp) - 3.0 * diff * diff)
            * (16.0 * jp * jp - js * ji);
    let d = (27.0 * sum.powi(3) + 18.0 * (sum * sum + 4.0 * js * ji) * six_minus) * rad
        + 144.0 * (js * ji * jm - 48.0 * jp.powi(3) + 3.0 * js * ji * jp) * rad;
    (a, b, c, d)
}

/// Evaluates the quartic parameters `A`, `B`, `C`, `D`.
///
/// Fails with [`PropagatorError::DegenerateSpectrum`] when `|AD - BC|`
/// drops below [`DEGENERACY_THRESHOLD`] relative to `max(|AD|, |BC|)` — the
/// regime where every quotient built from these parameters is numerically
/// meaningless (exactly at `j_s = j_i`, both `A` and `B` vanish
/// identically).
pub fn abcd(samples: &SpectralSamples) -> Result<AbcdParameters, PropagatorError> {
    let (a, b, c, d) = raw_abcd(samples);
    let det_scale = a * d - b * c;
    let scale = (a * d).abs().max((b * c).abs()).max(f64::MIN_POSITIVE);
    let ratio = det_scale.abs() / scale;
    if ratio < DEGENERACY_THRESHOLD {
        return Err(PropagatorError::DegenerateSpectrum { ratio });
    }
    Ok(AbcdParameters {
        a,
        b,
        c,
        d,
        det_scale,
    })
}

/// The dimensionless shorthand coefficients `h1`, `h2`, `h3` of the
/// longitudinal experiment formulas.
///
/// `h3 = -h1` is an algebraic identity (both equal the product of the two
/// mixed-mode eigenvector components); it is exposed as a separate field to
/// mirror the conventional presentation and pinned by tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HCoefficients {
    /// Cross-relaxation amplitude coefficient.
    pub h1: f64,
    /// Auto-relaxation asymmetry coefficient.
    pub h2: f64,
    /// Mirror coefficient, always `-h1`.
    pub h3: f64,
}

impl HCoefficients {
    /// Evaluates the printed quotient formulas directly from the quartic
    /// parameters:
    ///
    /// ```text
    /// h1 = ((A-C)^2 - (B-D)^2) / (4 (AD - BC))
    /// h2 = (A^2 - B^2 - C^2 + D^2) / (4 (AD - BC))
    /// h3 = ((A+C)^2 - (B+D)^2) / (4 (AD - BC))
    /// ```
    ///
    /// Prefer [`h_coefficients`], which computes the same values through
    /// the numerically stable route; this form exists for cross-checking
    /// the printed algebra and loses accuracy as `j_s` approaches `j_i`.
    pub fn from_abcd(p: &AbcdParameters) -> Self {
        let den = 4.0 * p.det_scale;
        Self {
            h1: ((p.a - p.c).powi(2) - (p.b - p.d).powi(2)) / den,
            h2: (p.a * p.a - p.b * p.b - p.c * p.c + p.d * p.d) / den,
            h3: ((p.a + p.c).powi(2) - (p.b + p.d).powi(2)) / den,
        }
    }
}

/// The normalized mixed-mode eigenvector `(alpha, beta)`: the fast
/// longitudinal mode is `alpha * u_Iz + beta * u_Sz` where `u_Iz`, `u_Sz`
/// are the unit deviation patterns of `<Iz>` and `<Sz>`.
///
/// Computed with the stable symmetric-2x2 rotation; well-defined for every
/// sample set (at exact degeneracy any basis of the plane is valid and
/// `(1, 0)` is returned).
fn longitudinal_mode(samples: &SpectralSamples) -> (f64, f64) {
    let SpectralSamples {
        j_s,
        j_i,
        j_plus,
        j_minus,
        ..
    } = *samples;
    // Solomon 2x2 block of the generator in the (u_Iz, u_Sz) basis.
    let a = -(j_i + 2.0 * j_plus + j_minus / 3.0);
    let b = -(j_s + 2.0 * j_plus + j_minus / 3.0);
    let c = -(2.0 * j_plus - j_minus / 3.0);
    let rt = f64::hypot(a - b, 2.0 * c);
    // Smaller (more negative) eigenvalue = faster mode.
    let lm = 0.5 * (a + b) - 0.5 * rt;
    let (v0, v1) = if (lm - a).abs() >= (lm - b).abs() {
        (c, lm - a)
    } else {
        (lm - b, c)
    };
    let norm = f64::hypot(v0, v1);
    if norm == 0.0 {
        (1.0, 0.0)
    } else {
        (v0 / norm, v1 / norm)
    }
}

/// Evaluates `h1`, `h2`, `h3` through the stable rotation route.
///
/// Mathematically identical to [`HCoefficients::from_abcd`] wherever the
/// quartic algebra is well-conditioned, but immune to its cancellation. The
/// degeneracy gate is shared with [`abcd`]: inside the flagged region the
/// printed quotients are ill-defined, so this returns
/// [`PropagatorError::DegenerateSpectrum`] and callers may fall back to
/// [`h_coefficients_from_projectors`] (see [`h_coefficients_auto`]).
pub fn h_coefficients(samples: &SpectralSamples) -> Result<HCoefficients, PropagatorError> {
    abcd(samples)?;
    let (alpha, beta) = longitudinal_mode(samples);
    Ok(HCoefficients {
        h1: -(alpha * beta),
        h2: beta * beta - 0.5,
        h3: alpha * beta,
    })
}

/// Evaluates `h1`, `h2`, `h3` from the numerically diagonalized zero-order
/// generator (brute-force spectral projectors), independent of the analytic
/// eigenvector algebra.
///
/// Fails with [`PropagatorError::DegenerateSpectrum`] when the two mixed
/// longitudinal modes are numerically indistinguishable (`Jn ~ 0`), in
/// which case the coefficients are genuinely not unique.
pub fn h_coefficients_from_projectors(
    samples: &SpectralSamples,
) -> Result<HCoefficients, PropagatorError> {
    let eig = oracle::eig_symmetric(&build_zero_order(samples).to_small_matrix())?;
    let u_i = [0.5, 0.5, 0.0, 0.0, -0.5, -0.5];
    let u_s = [0.5, -0.5, 0.0, 0.0, 0.5, -0.5];
    let overlap = |k: usize, u: &[f64; 6]| -> f64 {
        eig.eigenvectors[k]
            .iter()
            .zip(u.iter())
            .map(|(v, w)| v * w)
            .sum()
    };
    // The two mixed longitudinal modes are the eigenvectors living in the
    // (u_Iz, u_Sz) plane: pick the two with the largest in-plane weight.
    let mut ranked: Vec<(usize, f64)> = (0..6)
        .map(|k| {
            let wi = overlap(k, &u_i);
            let ws = overlap(k, &u_s);
            (k, wi * wi + ws * ws)
        })
        .collect();
    ranked.sort_by(|x, y| y.1.partial_cmp(&x.1).expect("finite weights"));
    let (k1, k2) = (ranked[0].0, ranked[1].0);
    let spectral_scale = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, l| m.max(l.abs()))
        .max(f64::MIN_POSITIVE);
    let gap = (eig.eigenvalues[k1] - eig.eigenvalues[k2]).abs();
    if gap <= 1e-8 * spectral_scale {
        return Err(PropagatorError::DegenerateSpectrum {
            ratio: gap / spectral_scale,
        });
    }
    // Fast mode = more negative eigenvalue.
    let kf = if eig.eigenvalues[k1] <= eig.eigenvalues[k2] {
        k1
    } else {
        k2
    };
    let alpha = overlap(kf, &u_i);
    let beta = overlap(kf, &u_s);
    let norm = f64::hypot(alpha, beta);
    let (alpha, beta) = (alpha / norm, beta / norm);
    Ok(HCoefficients {
        h1: -(alpha * beta),
        h2: beta * beta - 0.5,
        h3: alpha * beta,
    })
}

/// Evaluates `h1`, `h2`, `h3` preferring the closed form, falling back to
/// the numeric projector route inside the flagged degenerate region.
pub fn h_coefficients_auto(samples: &SpectralSamples) -> Result<HCoefficients, PropagatorError> {
    match h_coefficients(samples) {
        Err(PropagatorError::DegenerateSpectrum { .. }) => {
            h_coefficients_from_projectors(samples)
        }
        other => other,
    }
}

/// The eight zero-order mode amplitudes.
///
/// The block solution is, with `E_x = exp(-kappa iota0_x (t - t0))`,
///
/// ```text
/// d_rho_11 =  E_b rho_B + rho_E - E_f rho_H - E_g rho_J
/// d_rho_22 = -E_b rho_B + rho_C + E_f rho_F + E_g rho_G
/// rho~_23  = -E_a rho_A - E_b rho_B - rho_C + rho_E
/// rho~_32  = +E_a rho_A - E_b rho_B - rho_C + rho_E
/// d_rho_33 = -E_b rho_B + rho_C - E_f rho_F - E_g rho_G
/// d_rho_44 =  E_b rho_B + rho_E + E_f rho_H + E_g rho_J
/// ```
///
/// `rho_C` and `rho_E` multiply the two conserved (zero-rate) modes and
/// survive to `t -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroOrderCoefficients {
    /// Antisymmetric zero-quantum amplitude `(rho_32 - rho_23)/2`; purely
    /// imaginary for Hermitian input.
    pub rho_a: Complex64,
    /// Alternating population amplitude.
    pub rho_b: Complex64,
    /// First conserved amplitude.
    pub rho_c: Complex64,
    /// Second conserved amplitude.
    pub rho_e: Complex64,
    /// Fast-mode amplitude on `d_rho_22`/`d_rho_33`.
    pub rho_f: Complex64,
    /// Slow-mode amplitude on `d_rho_22`/`d_rho_33`.
    pub rho_g: Complex64,
    /// Fast-mode amplitude on `d_rho_11`/`d_rho_44`.
    pub rho_h: Complex64,
    /// Slow-mode amplitude on `d_rho_11`/`d_rho_44`.
    pub rho_j: Complex64,
}

fn stable_zero_order_coefficients(
    x0: &[Complex64; 6],
    samples: &SpectralSamples,
) -> ZeroOrderCoefficients {
    let [d1, d2, r23, r32, d3, d4] = *x0;
    let rho_a = (r32 - r23) / 2.0;
    let rho_b = (d1 - d2 - r23 - r32 - d3 + d4) / 6.0;
    let rho_c = (d1 + 2.0 * d2 - r23 - r32 + 2.0 * d3 + d4) / 6.0;
    let rho_e = (2.0 * d1 + d2 + r23 + r32 + d3 + 2.0 * d4) / 6.0;

    let (alpha, beta) = longitudinal_mode(samples);
    let d_iz = (d1 + d2 - d3 - d4) / 2.0;
    let d_sz = (d1 - d2 + d3 - d4) / 2.0;
    let w_f = d_iz * alpha + d_sz * beta;
    let w_g = d_iz * (-beta) + d_sz * alpha;
    ZeroOrderCoefficients {
        rho_a,
        rho_b,
        rho_c,
        rho_e,
        rho_f: w_f * ((alpha - beta) / 2.0),
        rho_h: w_f * (-(alpha + beta) / 2.0),
        rho_g: w_g * (-(alpha + beta) / 2.0),
        rho_j: w_g * ((beta - alpha) / 2.0),
    }
}

/// Decomposes a zero-order block vector into the eight mode amplitudes.
///
/// Fails with [`PropagatorError::DegenerateSpectrum`] when the fast/slow
/// mode splitting is unresolved (`Jn` below [`DEGENERACY_THRESHOLD`]
/// relative to `Jp`): there the split of the longitudinal deviation into
/// the `F/G/H/J` amplitudes is genuinely not unique, because any rotation
/// of the two coincident modes is an equally valid basis. Everywhere else
/// the amplitudes are computed by the stable route and agree with the
/// printed quotient formulas wherever those are themselves
/// well-conditioned.
///
/// Note the gate is deliberately *not* the conditioning of the quartic
/// parameters ([`abcd`]): their discriminant `AD - BC` also cancels when
/// `j_plus` dominates the other samples, a regime where the mode basis is
/// perfectly well resolved and the stable amplitudes are accurate.
pub fn zero_order_coefficients(
    x0: &[Complex64; 6],
    samples: &SpectralSamples,
) -> Result<ZeroOrderCoefficients, PropagatorError> {
    let collective = samples.collective_rates();
    let ratio = if collective.jp > 0.0 {
        collective.jn / collective.jp
    } else {
        0.0
    };
    if ratio < DEGENERACY_THRESHOLD {
        return Err(PropagatorError::DegenerateSpectrum { ratio });
    }
    Ok(stable_zero_order_coefficients(x0, samples))
}

/// The four first-order (single-quantum) mode amplitudes:
/// `rho_12/rho_34` split into symmetric `rho_K` (rate `R1_a`) and
/// antisymmetric `rho_M` (rate `R1_b`); `rho_13/rho_24` into `rho_L`
/// (rate `R1_f`) and `rho_N` (rate `R1_g`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderCoefficients {
    /// Symmetric `rho_12/rho_34` amplitude, decays at `R1_a`.
    pub rho_k: Complex64,
    /// Symmetric `rho_13/rho_24` amplitude, decays at `R1_f`.
    pub rho_l: Complex64,
    /// Antisymmetric `rho_12/rho_34` amplitude, decays at `R1_b`.
    pub rho_m: Complex64,
    /// Antisymmetric `rho_13/rho_24` amplitude, decays at `R1_g`.
    pub rho_n: Complex64,
}

/// Decomposes a first-order block vector `(rho_12, rho_13, rho_24, rho_34)`
/// into its four bi-exponential amplitudes. Never degenerate.
pub fn first_order_coefficients(x0: &[Complex64; 4]) -> FirstOrderCoefficients {
    FirstOrderCoefficients {
        rho_k: (x0[0] + x0[3]) / 2.0,
        rho_l: (x0[1] + x0[2]) / 2.0,
        rho_m: (x0[0] - x0[3]) / 2.0,
        rho_n: (x0[1] - x0[2]) / 2.0,
    }
}

fn check_time_step(dt: f64) -> Result<(), PropagatorError> {
    if !dt.is_finite() || dt < 0.0 {
        return Err(PropagatorError::InvalidTimeStep { dt });
    }
    Ok(())
}

/// Evolves a raw zero-order block vector by `dt` seconds.
///
/// Uses the closed-form mode decomposition; inside the flagged degenerate
/// region it transparently falls back to the brute-force matrix exponential
/// (same result contract, tested to the same tolerance).
pub fn evolve_zero_order_vector(
    x0: &[Complex64; 6],
    samples: &SpectralSamples,
    kappa: f64,
    dt: f64,
) -> Result<[Complex64; 6], PropagatorError> {
    check_time_step(dt)?;
    match zero_order_coefficients(x0, samples) {
        Ok(c) => {
            let rates = closed_form_rates(samples, kappa);
            let e_a = (-rates.r0_a * dt).exp();
            let e_b = (-rates.r0_b * dt).exp();
            let e_f = (-rates.r0_f * dt).exp();
            let e_g = (-rates.r0_g * dt).exp();
            Ok([
                c.rho_b * e_b + c.rho_e - c.rho_h * e_f - c.rho_j * e_g,
                -c.rho_b * e_b + c.rho_c + c.rho_f * e_f + c.rho_g * e_g,
                -c.rho_a * e_a - c.rho_b * e_b - c.rho_c + c.rho_e,
                c.rho_a * e_a - c.rho_b * e_b - c.rho_c + c.rho_e,
                -c.rho_b * e_b + c.rho_c - c.rho_f * e_f - c.rho_g * e_g,
                c.rho_b * e_b + c.rho_e + c.rho_h * e_f + c.rho_j * e_g,
            ])
        }
        Err(PropagatorError::DegenerateSpectrum { .. }) => {
            let generator = build_zero_order(samples).to_small_matrix().scaled(kappa);
            let propagator = oracle::expm(&generator, dt)?;
            let out = propagator.mul_vec(x0.as_slice())?;
            Ok([out[0], out[1], out[2], out[3], out[4], out[5]])
        }
        Err(e) => Err(e),
    }
}

/// Result of zero-order propagation: absolute populations plus the
/// interaction-picture zero-quantum coherence pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroOrderState {
    /// Absolute populations `rho_11 .. rho_44` at the final time.
    pub populations: [f64; 4],
    /// Interaction-picture `rho~_23` at the final time.
    pub rho_23: Complex64,
    /// Interaction-picture `rho~_32` at the final time.
    pub rho_32: Complex64,
}

/// Evolves the populations and zero-quantum coherences of `state0` by `dt`
/// seconds, relative to the stationary `equilibrium` state.
///
/// Populations are returned as absolute values (deviation solution plus the
/// equilibrium populations); coherences stay in the interaction picture
/// (convert with [`zero_quantum_lab_frame`] if lab-frame values are
/// needed).
pub fn evolve_zero_order(
    state0: &DensityState,
    equilibrium: &DensityState,
    samples: &SpectralSamples,
    kappa: f64,
    dt: f64,
) -> Result<ZeroOrderState, PropagatorError> {
    let x0 = zero_order_vector(state0, equilibrium);
    let x = evolve_zero_order_vector(&x0, samples, kappa, dt)?;
    let eq = equilibrium.populations();
    debug_assert!(
        x.iter().all(|v| v.im.abs() < 1e-9) || x0.iter().any(|v| v.im.abs() > 1e-12),
        "population deviations must stay real for Hermitian inputs"
    );
    Ok(ZeroOrderState {
        populations: [
            x[0].re + eq[0],
            x[1].re + eq[1],
            x[4].re + eq[2],
            x[5].re + eq[3],
        ],
        rho_23: x[2],
        rho_32: x[3],
    })
}

/// Result of first-order propagation: the four single-quantum coherences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderState {
    /// `rho_12` at the final time.
    pub rho_12: Complex64,
    /// `rho_13` at the final time.
    pub rho_13: Complex64,
    /// `rho_24` at the final time.
    pub rho_24: Complex64,
    /// `rho_34` at the final time.
    pub rho_34: Complex64,
}

/// Evolves a raw first-order block vector `(rho_12, rho_13, rho_24,
/// rho_34)` by `dt` seconds. The closed form is bi-exponential and never
/// degenerate.
pub fn evolve_first_order_vector(
    x0: &[Complex64; 4],
    samples: &SpectralSamples,
    kappa: f64,
    dt: f64,
) -> Result<[Complex64; 4], PropagatorError> {
    check_time_step(dt)?;
    let c = first_order_coefficients(x0);
    let rates = closed_form_rates(samples, kappa);
    let e_a = (-rates.r1_a * dt).exp();
    let e_b = (-rates.r1_b * dt).exp();
    let e_f = (-rates.r1_f * dt).exp();
    let e_g = (-rates.r1_g * dt).exp();
    Ok([
        c.rho_k * e_a + c.rho_m * e_b,
        c.rho_l * e_f + c.rho_n * e_g,
        c.rho_l * e_f - c.rho_n * e_g,
        c.rho_k * e_a - c.rho_m * e_b,
    ])
}

/// Evolves the single-quantum coherences of `state0` by `dt` seconds.
pub fn evolve_first_order(
    state0: &DensityState,
    samples: &SpectralSamples,
    kappa: f64,
    dt: f64,
) -> Result<FirstOrderState, PropagatorError> {
    let x0 = [
        state0.element(0, 1),
        state0.element(0, 2),
        state0.element(1, 3),
        state0.element(2, 3),
    ];
    let x = evolve_first_order_vector(&x0, samples, kappa, dt)?;
    Ok(FirstOrderState {
        rho_12: x[0],
        rho_13: x[1],
        rho_24: x[2],
        rho_34: x[3],
    })
}

/// Evolves the double-quantum coherence `rho_14` by `dt` seconds:
/// a single exponential `exp(-R2_a dt)`.
pub fn evolve_second_order(
    rho14_0: Complex64,
    samples: &SpectralSamples,
    kappa: f64,
    dt: f64,
) -> Result<Complex64, PropagatorError> {
    check_time_step(dt)?;
    let rates = closed_form_rates(samples, kappa);
    Ok(rho14_0 * (-rates.r2_a * dt).exp())
}

/// Evolves a complete density matrix by `dt` seconds, combining all three
/// coherence-order blocks, and reassembles a valid (exactly Hermitian)
/// state from the upper triangle.
///
/// Zero-quantum coherences in the result are interaction-picture values.
pub fn evolve_state(
    state0: &DensityState,
    equilibrium: &DensityState,
    samples: &SpectralSamples,
    kappa: f64,
    dt: f64,
) -> Result<DensityState, PropagatorError> {
    let zero = evolve_zero_order(state0, equilibrium, samples, kappa, dt)?;
    let first = evolve_first_order(state0, samples, kappa, dt)?;
    let rho_14 = evolve_second_order(state0.element(0, 3), samples, kappa, dt)?;

    let p = zero.populations;
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    rho[0][0] = Complex64::new(p[0], 0.0);
    rho[1][1] = Complex64::new(p[1], 0.0);
    rho[2][2] = Complex64::new(p[2], 0.0);
    rho[3][3] = Complex64::new(p[3], 0.0);
    // For Hermitian input the evolved rho~_32 equals conj(rho~_23); rebuild
    // the lower triangle from the upper one so the output is exactly
    // Hermitian.
    rho[1][2] = zero.rho_23;
    rho[2][1] = zero.rho_23.conj();
    rho[0][1] = first.rho_12;
    rho[1][0] = first.rho_12.conj();
    rho[0][2] = first.rho_13;
    rho[2][0] = first.rho_13.conj();
    rho[1][3] = first.rho_24;
    rho[3][1] = first.rho_24.conj();
    rho[2][3] = first.rho_34;
    rho[3][2] = first.rho_34.conj();
    rho[0][3] = rho_14;
    rho[3][0] = rho_14.conj();
    DensityState::new(rho)
}

/// Converts an interaction-picture zero-quantum coherence `rho~_23` to the
/// lab frame: multiply by `exp(-i delta_omega dt)` where `delta_omega =
/// omega_S - omega_I` and `dt = t - t0` is the elapsed time since the phase
/// reference. Use the conjugate phase for `rho~_32`.
pub fn zero_quantum_lab_frame(rho_23_ip: Complex64, delta_omega: f64, dt: f64) -> Complex64 {
    rho_23_ip * Complex64::from_polar(1.0, -delta_omega * dt)
}
