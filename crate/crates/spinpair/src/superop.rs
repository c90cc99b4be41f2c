//! The relaxation superoperators, block by coherence order, and their
//! closed-form eigenvalues.
//!
//! Dipolar relaxation of the pair never mixes density-matrix elements of
//! different coherence order, so the full 16-dimensional Liouville space
//! splits into independent blocks:
//!
//! * **Zero order** (6x6): the four populations plus the zero-quantum
//!   coherence pair, ordered `(d_rho_11, d_rho_22, rho~_23, rho~_32,
//!   d_rho_33, d_rho_44)`. Populations enter as deviations from thermal
//!   equilibrium; the coherences are kept in the interaction picture
//!   (`rho~_23 = exp(+i (omega_S - omega_I) t) rho_23`), which removes the
//!   only imaginary entries and leaves a real symmetric matrix.
//! * **First order** (4x4): the single-quantum coherences
//!   `(rho_12, rho_13, rho_24, rho_34)`.
//! * **Second order** (scalar): the double-quantum coherence `rho_14`.
//!
//! Matrices are stored in units of seconds; the physical generator is
//! `kappa * m`, with `kappa` from
//! [`dipolar_constant`](crate::system::SpinPairSystem::dipolar_constant),
//! and the equation of motion is `d/dt x = kappa * m * x`. The eigenvalues
//! of `m` are `-iota` with the closed-form `iota >= 0` collected in
//! [`RateSet`]; physical decay rates are `R = kappa * iota`.

use serde::Serialize;

use crate::oracle::SmallMatrix;
use crate::spectral::SpectralSamples;

/// Zero-order (population + zero-quantum) relaxation generator, 6x6,
/// units of s.
///
/// Acts on `(d_rho_11, d_rho_22, rho~_23, rho~_32, d_rho_33, d_rho_44)`.
/// Exactly symmetric by construction, with two exact zero eigenvalues
/// (conserved population combinations) and four decaying modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroOrderSuperop {
    /// Matrix entries, row-major.
    pub m: [[f64; 6]; 6],
}

impl ZeroOrderSuperop {
    /// Copies the entries into an oracle matrix for numerical work.
    pub fn to_small_matrix(&self) -> SmallMatrix {
        let rows: Vec<Vec<f64>> = self.m.iter().map(|r| r.to_vec()).collect();
        SmallMatrix::from_real_rows(&rows).expect("6x6 real matrix is always valid")
    }
}

/// First-order (single-quantum) relaxation generator, 4x4, units of s.
///
/// Acts on `(rho_12, rho_13, rho_24, rho_34)`. Symmetric, with a constant
/// diagonal and only two off-diagonal couplings: `(1,4)` at `-j_i/2` and
/// `(2,3)` at `-j_s/2` (1-based positions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstOrderSuperop {
    /// Matrix entries, row-major.
    pub m: [[f64; 4]; 4],
}

impl FirstOrderSuperop {
    /// Copies the entries into an oracle matrix for numerical work.
    pub fn to_small_matrix(&self) -> SmallMatrix {
        let rows: Vec<Vec<f64>> = self.m.iter().map(|r| r.to_vec()).collect();
        SmallMatrix::from_real_rows(&rows).expect("4x4 real matrix is always valid")
    }
}

/// Second-order (double-quantum) relaxation generator: a single scalar,
/// units of s, always nonpositive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrderSuperop {
    /// The scalar generator entry.
    pub m: f64,
}

/// The eleven closed-form eigenvalue magnitudes `iota` (units s), the
/// dipolar constant `kappa` (s^-2), and the physical rates `R = kappa *
/// iota` (s^-1).
///
/// Naming: `iota0_*` belong to the zero-order block (`a`, `b` the pure
/// decay modes, `c`, `e` the two exact zeros, `f`, `g` the mixed
/// longitudinal modes `Jp +- Jn`), `iota1_*` to the first-order block, and
/// `iota2_a` to the double-quantum scalar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSet {
    /// Zero-order antisymmetric zero-quantum mode, s.
    pub iota0_a: f64,
    /// Zero-order alternating population mode, s.
    pub iota0_b: f64,
    /// First exact zero mode (conserved), s.
    pub iota0_c: f64,
    /// Second exact zero mode (conserved), s.
    pub iota0_e: f64,
    /// Fast longitudinal mode `Jp + Jn`, s.
    pub iota0_f: f64,
    /// Slow longitudinal mode `Jp - Jn`, s.
    pub iota0_g: f64,
    /// Symmetric `rho_12/rho_34` single-quantum mode, s.
    pub iota1_a: f64,
    /// Antisymmetric `rho_12/rho_34` single-quantum mode, s.
    pub iota1_b: f64,
    /// Symmetric `rho_13/rho_24` single-quantum mode, s.
    pub iota1_f: f64,
    /// Antisymmetric `rho_13/rho_24` single-quantum mode, s.
    pub iota1_g: f64,
    /// Double-quantum mode, s.
    pub iota2_a: f64,
    /// Dipolar constant used for the physical rates, s^-2.
    pub kappa: f64,
    /// Physical rate `kappa * iota0_a`, s^-1.
    pub r0_a: f64,
    /// Physical rate `kappa * iota0_b`, s^-1.
    pub r0_b: f64,
    /// Physical rate of the first zero mode (always 0), s^-1.
    pub r0_c: f64,
    /// Physical rate of the second zero mode (always 0), s^-1.
    pub r0_e: f64,
    /// Physical rate `kappa * iota0_f` (fast longitudinal, `1/T1`), s^-1.
    pub r0_f: f64,
    /// Physical rate `kappa * iota0_g` (slow longitudinal, `1/D1`), s^-1.
    pub r0_g: f64,
    /// Physical rate `kappa * iota1_a` (S-spin transverse, `1/T2_S`), s^-1.
    pub r1_a: f64,
    /// Physical rate `kappa * iota1_b`, s^-1.
    pub r1_b: f64,
    /// Physical rate `kappa * iota1_f` (I-spin transverse, `1/T2_I`), s^-1.
    pub r1_f: f64,
    /// Physical rate `kappa * iota1_g`, s^-1.
    pub r1_g: f64,
    /// Physical rate `kappa * iota2_a` (double-quantum), s^-1.
    pub r2_a: f64,
}

/// Builds the zero-order 6x6 generator from the five spectral samples.
///
/// The entries are fixed linear combinations of the samples; with
/// `q = (j_s + j_i)/4` and diagonal `d = -(3 j_s + 3 j_i + 2 j_minus)/6`
/// for the inner rows, the matrix reads
///
/// ```text
/// | -(js+ji+4j+)/2   js/2    q     q     ji/2    2j+           |
/// |  js/2            d      -q    -q     j-/3    ji/2          |
/// |  q              -q      d     j-/3  -q       q             |
/// |  q              -q      j-/3  d     -q       q             |
/// |  ji/2            j-/3  -q    -q     d        js/2          |
/// |  2j+             ji/2   q     q     js/2    -(js+ji+4j+)/2 |
/// ```
pub fn build_zero_order(samples: &SpectralSamples) -> ZeroOrderSuperop {
    let SpectralSamples {
        j_s,
        j_i,
        j_plus,
        j_minus,
        ..
    } = *samples;
    let q = (j_s + j_i) / 4.0;
    let d = -(3.0 * j_s + 3.0 * j_i + 2.0 * j_minus) / 6.0;
    let corner = -(j_s + j_i + 4.0 * j_plus) / 2.0;
    ZeroOrderSuperop {
        m: [
            [corner, j_s / 2.0, q, q, j_i / 2.0, 2.0 * j_plus],
            [j_s / 2.0, d, -q, -q, j_minus / 3.0, j_i / 2.0],
            [q, -q, d, j_minus / 3.0, -q, q],
            [q, -q, j_minus / 3.0, d, -q, q],
            [j_i / 2.0, j_minus / 3.0, -q, -q, d, j_s / 2.0],
            [2.0 * j_plus, j_i / 2.0, q, q, j_s / 2.0, corner],
        ],
    }
}

/// Builds the first-order 4x4 generator.
///
/// Constant diagonal `-(4 j0 + 3 j_s + 3 j_i + j_minus + 6 j_plus)/6`;
/// off-diagonal couplings `-j_i/2` between `rho_12` and `rho_34`, and
/// `-j_s/2` between `rho_13` and `rho_24`.
pub fn build_first_order(samples: &SpectralSamples) -> FirstOrderSuperop {
    let SpectralSamples {
        j0,
        j_s,
        j_i,
        j_plus,
        j_minus,
    } = *samples;
    let d = -(4.0 * j0 + 3.0 * j_s + 3.0 * j_i + j_minus + 6.0 * j_plus) / 6.0;
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = d;
    }
    m[0][3] = -j_i / 2.0;
    m[3][0] = -j_i / 2.0;
    m[1][2] = -j_s / 2.0;
    m[2][1] = -j_s / 2.0;
    FirstOrderSuperop { m }
}

/// Builds the second-order scalar generator `-(j_s + j_i + 4 j_plus)/2`.
pub fn build_second_order(samples: &SpectralSamples) -> SecondOrderSuperop {
    SecondOrderSuperop {
        m: -(samples.j_s + samples.j_i + 4.0 * samples.j_plus) / 2.0,
    }
}

/// Evaluates all eleven closed-form eigenvalue magnitudes and their
/// physical rates `R = kappa * iota`.
///
/// These are the analytic spectra of the three built generators; the test
/// suite verifies them against the numerical eigensolver over random
/// samples.
pub fn closed_form_rates(samples: &SpectralSamples, kappa: f64) -> RateSet {
    let SpectralSamples {
        j0,
        j_s,
        j_i,
        j_plus,
        j_minus,
    } = *samples;
    let collective = samples.collective_rates();

    let iota0_a = (3.0 * j_s + 3.0 * j_i + 4.0 * j_minus) / 6.0;
    let iota0_b = 1.5 * (j_s + j_i);
    let iota0_f = collective.jp + collective.jn;
    let iota0_g = collective.jp - collective.jn;

    let shared = (2.0 / 3.0) * j0 + j_minus / 6.0 + j_plus;
    let iota1_a = shared + j_s / 2.0 + j_i;
    let iota1_b = shared + j_s / 2.0;
    let iota1_f = shared + j_s + j_i / 2.0;
    let iota1_g = shared + j_i / 2.0;

    let iota2_a = (j_s + j_i + 4.0 * j_plus) / 2.0;

    RateSet {
        iota0_a,
        iota0_b,
        iota0_c: 0.0,
        iota0_e: 0.0,
        iota0_f,
        iota0_g,
        iota1_a,
        iota1_b,
        iota1_f,
        iota1_g,
        iota2_a,
        kappa,
        r0_a: kappa * iota0_a,
        r0_b: kappa * iota0_b,
        r0_c: 0.0,
        r0_e: 0.0,
        r0_f: kappa * iota0_f,
        r0_g: kappa * iota0_g,
        r1_a: kappa * iota1_a,
        r1_b: kappa * iota1_b,
        r1_f: kappa * iota1_f,
        r1_g: kappa * iota1_g,
        r2_a: kappa * iota2_a,
    }
}
