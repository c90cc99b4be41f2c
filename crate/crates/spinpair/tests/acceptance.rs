//! The acceptance gate for the whole crate: seven end-to-end criteria
//! covering the eigenvalue identities, oracle equivalence of the closed
//! forms, the extreme-narrowing limits, the dipolar-constant anchor, the
//! enhancement peak times, fit recovery, and the randomized structural
//! properties.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see one
//! pass/fail line per criterion; the single test fails if any criterion
//! fails its tolerance or its runtime budget.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use spinpair::experiment::{
    enhancement_peak_time, longitudinal_trajectory, peak_time_from_time_constants, ExperimentKind,
};
use spinpair::fitting::{
    default_time_grid, fit_with_dipolar_constant, generate_solomon_dataset, model_upsilon_batch,
    DataSet, ModelFamily,
};
use spinpair::oracle;
use spinpair::propagator::{
    evolve_state, h_coefficients_auto, zero_order_vector, DensityState,
};
use spinpair::spectral::{SpectralDensityModel, SpectralSamples};
use spinpair::superop::{
    build_first_order, build_second_order, build_zero_order, closed_form_rates,
};
use spinpair::system::{gyromagnetic, PhysicalConstants, SpinPairSystem};

/// Published dipolar constant for the reference fluorine-proton pair, s^-2.
const REFERENCE_KAPPA: f64 = 47.9898e10;
/// Published correlation time of the reference pair, s.
const REFERENCE_TAU_C: f64 = 0.2391e-12;

struct Outcome {
    number: usize,
    label: &'static str,
    pass: bool,
    detail: String,
    elapsed_s: f64,
}

fn reference_system() -> SpinPairSystem {
    SpinPairSystem::new(gyromagnetic::F19, gyromagnetic::H1, 0.705, 96.098e-12, 293.0)
        .expect("reference system is valid")
}

fn random_samples(rng: &mut ChaCha12Rng, zero_fraction: f64) -> SpectralSamples {
    let mut v = [0.0f64; 5];
    for x in &mut v {
        *x = if rng.gen_bool(zero_fraction) {
            0.0
        } else {
            10f64.powf(rng.gen_range(-14.0..-9.0))
        };
    }
    SpectralSamples {
        j0: v[0],
        j_s: v[1],
        j_i: v[2],
        j_plus: v[3],
        j_minus: v[4],
    }
}

fn random_density_state(rng: &mut ChaCha12Rng) -> DensityState {
    loop {
        let mut g = [[Complex64::new(0.0, 0.0); 4]; 4];
        for row in &mut g {
            for entry in row.iter_mut() {
                *entry = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = (0..4).map(|k| g[i][k] * g[j][k].conj()).sum();
            }
        }
        let trace: f64 = (0..4).map(|i| m[i][i].re).sum();
        if trace < 1e-3 {
            continue;
        }
        let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            rho[i][i] = Complex64::new(m[i][i].re / trace, 0.0);
            for j in (i + 1)..4 {
                let upper = (m[i][j] + m[j][i].conj()) / 2.0 / trace;
                rho[i][j] = upper;
                rho[j][i] = upper.conj();
            }
        }
        if let Ok(state) = DensityState::new(rho) {
            return state;
        }
    }
}

fn random_equilibrium(rng: &mut ChaCha12Rng) -> DensityState {
    let a = rng.gen_range(-1e-3..1e-3);
    let b = rng.gen_range(-1e-3..1e-3);
    DensityState::from_populations([
        (1.0 + a + b) / 4.0,
        (1.0 + a - b) / 4.0,
        (1.0 - a + b) / 4.0,
        (1.0 - a - b) / 4.0,
    ])
    .expect("small polarizations give a valid state")
}

fn random_system(rng: &mut ChaCha12Rng) -> SpinPairSystem {
    let lg = rng.gen_range(7.0..8.5);
    let sep = rng.gen_range(0.02..0.6);
    let small = 10f64.powf(lg);
    let large = 10f64.powf(lg + sep) * if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
    let (gamma_i, gamma_s) = if rng.gen_bool(0.5) {
        (large, small)
    } else {
        (small, large)
    };
    SpinPairSystem::new(
        gamma_i,
        gamma_s,
        rng.gen_range(0.1..20.0),
        rng.gen_range(0.8e-10..3e-10),
        rng.gen_range(100.0..400.0),
    )
    .expect("distinct gyromagnetic ratios give a valid system")
}

/// Criterion 1: for 10^4 random nonnegative sample sets, the numeric
/// eigenvalues of the built 6x6 and 4x4 generators match the closed-form
/// eigenvalue sets within 1e-10 of the spectral scale, including the two
/// exact zeros of the 6x6 block. Budget: 10 s.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    const SETS: usize = 10_000;

    for _ in 0..SETS {
        let samples = random_samples(&mut rng, 0.02);
        let rates = closed_form_rates(&samples, 1.0);

        let mut closed0 = [
            0.0,
            0.0,
            -rates.iota0_a,
            -rates.iota0_b,
            -rates.iota0_f,
            -rates.iota0_g,
        ];
        closed0.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut closed1 = [
            -rates.iota1_a,
            -rates.iota1_b,
            -rates.iota1_f,
            -rates.iota1_g,
        ];
        closed1.sort_by(|x, y| x.partial_cmp(y).unwrap());

        let scale = closed0
            .iter()
            .chain(closed1.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);

        let eig0 = oracle::eig_symmetric(&build_zero_order(&samples).to_small_matrix())
            .expect("6x6 eigendecomposition");
        let eig1 = oracle::eig_symmetric(&build_first_order(&samples).to_small_matrix())
            .expect("4x4 eigendecomposition");

        for (numeric, closed) in eig0
            .eigenvalues
            .iter()
            .zip(closed0.iter())
            .chain(eig1.eigenvalues.iter().zip(closed1.iter()))
        {
            let err = (numeric - closed).abs() / scale;
            worst = worst.max(err);
            if err > 1e-10 {
                failures += 1;
            }
            // Well-separated eigenvalues must also match in the strict
            // relative sense, not just against the matrix scale.
            if closed.abs() >= 0.1 * scale && (numeric - closed).abs() > 1e-10 * closed.abs() {
                failures += 1;
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    Outcome {
        number: 1,
        label: "eigenvalue identity, 10^4 random sample sets",
        pass: failures == 0 && elapsed < 10.0,
        detail: format!("worst scaled error {worst:.2e}, {failures} over tolerance"),
        elapsed_s: elapsed,
    }
}

/// Criterion 2: closed-form propagation of all three coherence blocks
/// matches matrix-exponential evolution for 100 random states x 10 random
/// correlation times, max per-element error <= 1e-10. Budget: 5 s.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(202);
    let system = reference_system();
    let consts = PhysicalConstants::codata();
    let kappa = system.dipolar_constant(&consts);
    let freqs = system.larmor_frequencies();
    let mut worst = 0.0f64;

    for _ in 0..10 {
        let tau_c = 10f64.powf(rng.gen_range(-13.0..-9.0));
        let model = SpectralDensityModel::isotropic(tau_c).expect("positive tau");
        let samples = model.sample_at_transitions(&freqs);
        let j0 = build_zero_order(&samples).to_small_matrix();
        let j1 = build_first_order(&samples).to_small_matrix();
        let j2 = build_second_order(&samples).m;

        for _ in 0..100 {
            let state = random_density_state(&mut rng);
            let eq = random_equilibrium(&mut rng);
            let dt = 10f64.powf(rng.gen_range(-3.0..1.0));

            let closed = evolve_state(&state, &eq, &samples, kappa, dt).expect("closed form");

            // Brute-force reference: exponentiate each block generator.
            let x0 = zero_order_vector(&state, &eq);
            let d = oracle::expm(&j0, kappa * dt)
                .expect("6x6 exponential")
                .mul_vec(&x0)
                .expect("vector product");
            let eq_pop = eq.populations();
            let c0 = [
                state.element(0, 1),
                state.element(0, 2),
                state.element(1, 3),
                state.element(2, 3),
            ];
            let c = oracle::expm(&j1, kappa * dt)
                .expect("4x4 exponential")
                .mul_vec(&c0)
                .expect("vector product");
            let rho14 = state.element(0, 3) * (j2 * kappa * dt).exp();

            let reference = [
                [
                    d[0] + eq_pop[0],
                    c[0],
                    c[1],
                    Complex64::new(0.0, 0.0) + rho14,
                ],
                [c[0].conj(), d[1] + eq_pop[1], d[2], c[2]],
                [c[1].conj(), d[3], d[4] + eq_pop[2], c[3]],
                [rho14.conj(), c[2].conj(), c[3].conj(), d[5] + eq_pop[3]],
            ];
            for i in 0..4 {
                for j in 0..4 {
                    worst = worst.max((closed.element(i, j) - reference[i][j]).norm());
                }
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    Outcome {
        number: 2,
        label: "oracle equivalence, 100 states x 10 correlation times",
        pass: worst <= 1e-10 && elapsed < 5.0,
        detail: format!("max per-element error {worst:.2e}"),
        elapsed_s: elapsed,
    }
}

/// Criterion 3: extreme-narrowing limits at the reference correlation
/// time: Jp = 20 tau/3 and Jn = 10 tau/3 (1.5939 ps and 0.7970 ps),
/// Jn/Jp = 1/2 within 1e-6, -h1 = 1/2 and h2 = 0 within 1e-4.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let system = reference_system();
    let freqs = system.larmor_frequencies();
    let model = SpectralDensityModel::isotropic(REFERENCE_TAU_C).expect("positive tau");
    let samples = model.sample_at_transitions(&freqs);
    let collective = samples.collective_rates();

    let omega_tau = freqs.omega_i.abs().max(freqs.omega_s.abs()) * REFERENCE_TAU_C;
    let jp_limit = 20.0 * REFERENCE_TAU_C / 3.0;
    let jn_limit = 10.0 * REFERENCE_TAU_C / 3.0;
    let h = h_coefficients_auto(&samples).expect("non-degenerate reference samples");

    let checks = [
        ("omega*tau <= 1e-4", omega_tau <= 1e-4),
        (
            "Jp -> 20tau/3",
            (collective.jp / jp_limit - 1.0).abs() <= 1e-6,
        ),
        (
            "Jn -> 10tau/3",
            (collective.jn / jn_limit - 1.0).abs() <= 1e-6,
        ),
        (
            "Jp anchor 1.5939 ps",
            (collective.jp / 1.5939e-12 - 1.0).abs() <= 1e-3,
        ),
        (
            "Jn anchor 0.7970 ps",
            (collective.jn / 0.7970e-12 - 1.0).abs() <= 1e-3,
        ),
        (
            "Jn/Jp = 1/2",
            (collective.jn / collective.jp - 0.5).abs() <= 1e-6,
        ),
        ("-h1 = 1/2", (-h.h1 - 0.5).abs() <= 1e-4),
        ("h2 = 0", h.h2.abs() <= 1e-4),
    ];
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| *name)
        .collect();

    let elapsed = start.elapsed().as_secs_f64();
    Outcome {
        number: 3,
        label: "extreme-narrowing limits",
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            format!(
                "Jn/Jp = {:.9}, -h1 = {:.6}, h2 = {:.2e}",
                collective.jn / collective.jp,
                -h.h1,
                h.h2
            )
        } else {
            format!("failed: {}", failed.join(", "))
        },
        elapsed_s: elapsed,
    }
}

/// Criterion 4: the CODATA dipolar constant of the reference pair matches
/// the published 47.9898e10 s^-2 within 0.5%.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let kappa = reference_system().dipolar_constant(&PhysicalConstants::codata());
    let rel = (kappa / REFERENCE_KAPPA - 1.0).abs();
    Outcome {
        number: 4,
        label: "dipolar constant anchor",
        pass: rel <= 5e-3,
        detail: format!("kappa = {kappa:.6e} s^-2, deviation {:.3}%", rel * 100.0),
        elapsed_s: start.elapsed().as_secs_f64(),
    }
}

/// Criterion 5: the enhancement peak times: 1.4363 s (isotropic reference
/// parameters, published kappa) and 1.7637 s (from T1 = 1.27 s,
/// D1 = 2.55 s, with Jn/Jp = 0.3351), both within 1e-3 s; and the
/// derivative of the inversion-recovery enhancement vanishes at the peak.
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let system = reference_system();
    let consts = PhysicalConstants::codata();
    let freqs = system.larmor_frequencies();
    let model = SpectralDensityModel::isotropic(REFERENCE_TAU_C).expect("positive tau");
    let samples = model.sample_at_transitions(&freqs);

    let peak_iso = enhancement_peak_time(REFERENCE_KAPPA, &samples.collective_rates());
    let peak_t1d1 = peak_time_from_time_constants(1.27, 2.55).expect("ordered time constants");
    let ratio_t1d1 = (2.55 - 1.27) / (2.55 + 1.27f64);

    // Flatness at the peak: symmetric finite difference of the
    // inversion-recovery I enhancement around t_m.
    let t_m = peak_iso.t_m;
    let delta = 1e-7 * t_m;
    let times = [t_m - delta, t_m, t_m + delta];
    let traj = longitudinal_trajectory(
        ExperimentKind::InversionS,
        &system,
        &consts,
        &samples,
        REFERENCE_KAPPA,
        &times,
    )
    .expect("trajectory");
    let peak_value = traj.upsilon_i[1];
    let derivative = (traj.upsilon_i[2] - traj.upsilon_i[0]) / (2.0 * delta);
    let flat = (derivative * t_m).abs() <= 1e-6 * peak_value.abs();
    let is_max = traj.upsilon_i[1] >= traj.upsilon_i[0] && traj.upsilon_i[1] >= traj.upsilon_i[2];

    let checks = [
        ("t_m = 1.4363 s", (peak_iso.t_m - 1.4363).abs() <= 1e-3),
        ("t_m = 1.7637 s", (peak_t1d1.t_m - 1.7637).abs() <= 1e-3),
        ("Jn/Jp = 0.3351", (ratio_t1d1 - 0.3351).abs() <= 1e-3),
        ("derivative vanishes at t_m", flat),
        ("t_m is a local maximum", is_max),
    ];
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| *name)
        .collect();

    let elapsed = start.elapsed().as_secs_f64();
    Outcome {
        number: 5,
        label: "enhancement peak times",
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            format!(
                "t_m = {:.5} s and {:.5} s, Jn/Jp = {:.5}, slope*t_m/peak = {:.1e}",
                peak_iso.t_m,
                peak_t1d1.t_m,
                ratio_t1d1,
                derivative * t_m / peak_value
            )
        } else {
            format!("failed: {}", failed.join(", "))
        },
        elapsed_s: elapsed,
    }
}

/// Criterion 6: fit recovery. A noise-free forward curve returns its
/// generating correlation time within 0.1%; the Solomon-style reference
/// dataset fits to 0.2391 ps within 2%; the model-free fit ends strictly
/// below the isotropic fit's residual. Budget: 60 s.
fn criterion_6() -> Outcome {
    let start = Instant::now();
    let system = reference_system();
    let consts = PhysicalConstants::codata();
    let kappa = system.dipolar_constant(&consts);
    let mut failed: Vec<String> = Vec::new();

    // Round trip at tau_c = 1e-12 s on 50 linearly spaced points.
    let tau_true = 1e-12;
    let model = SpectralDensityModel::isotropic(tau_true).expect("positive tau");
    let times: Vec<f64> = (0..50).map(|k| 10.0 * k as f64 / 49.0).collect();
    let values = model_upsilon_batch(&model, &system, kappa, &times);
    let data = DataSet::new(times, values).expect("valid dataset");
    let round =
        fit_with_dipolar_constant(&data, &system, kappa, ModelFamily::Isotropic).expect("fit");
    let tau_round = match round.model {
        SpectralDensityModel::Isotropic { tau_c } => tau_c,
        _ => unreachable!("isotropic family requested"),
    };
    if (tau_round / tau_true - 1.0).abs() > 1e-3 {
        failed.push(format!("round trip returned {tau_round:.4e}"));
    }

    // Reference dataset: bi-exponential with T1 = 1.27 s, D1 = 2.55 s.
    let reference =
        generate_solomon_dataset(1.27, 2.55, 0.5, &default_time_grid()).expect("dataset");
    let iso = fit_with_dipolar_constant(&reference, &system, kappa, ModelFamily::Isotropic)
        .expect("isotropic fit");
    let tau_ref = match iso.model {
        SpectralDensityModel::Isotropic { tau_c } => tau_c,
        _ => unreachable!("isotropic family requested"),
    };
    if (tau_ref / REFERENCE_TAU_C - 1.0).abs() > 0.02 {
        failed.push(format!("reference fit returned {tau_ref:.4e}"));
    }

    let mf = fit_with_dipolar_constant(&reference, &system, kappa, ModelFamily::ModelFree)
        .expect("model-free fit");
    if !(mf.sse < iso.sse) {
        failed.push(format!(
            "model-free sse {} not strictly below isotropic {}",
            mf.sse, iso.sse
        ));
    }

    let elapsed = start.elapsed().as_secs_f64();
    Outcome {
        number: 6,
        label: "fit recovery",
        pass: failed.is_empty() && elapsed < 60.0,
        detail: if failed.is_empty() {
            format!(
                "round trip {:.4e} s, reference {:.4e} s, sse {:.3e} < {:.3e}",
                tau_round, tau_ref, mf.sse, iso.sse
            )
        } else {
            format!("failed: {}", failed.join("; "))
        },
        elapsed_s: elapsed,
    }
}

/// Criterion 7: the six structural property suites, 1000 fresh random
/// cases each, zero failures allowed. (The same properties also run under
/// a shrinking property-test harness in `tests/properties.rs`.)
fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(707);
    let consts = PhysicalConstants::codata();
    const CASES: usize = 1000;
    let mut failures: Vec<String> = Vec::new();

    // Suites 1-4: conservation laws and flow structure of the full
    // propagator over random states, references, samples, and intervals.
    let mut trace_fail = 0usize;
    let mut herm_fail = 0usize;
    let mut fixed_fail = 0usize;
    let mut semi_fail = 0usize;
    for _ in 0..CASES {
        let state = random_density_state(&mut rng);
        let eq = random_equilibrium(&mut rng);
        let samples = random_samples(&mut rng, 0.0);
        let kappa = 10f64.powf(rng.gen_range(9.0..12.0));
        let t1 = 10f64.powf(rng.gen_range(-4.0..1.0));
        let t2 = 10f64.powf(rng.gen_range(-4.0..1.0));

        let out = evolve_state(&state, &eq, &samples, kappa, t1 + t2).expect("closed form");
        let trace: Complex64 = (0..4).map(|i| out.element(i, i)).sum();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            trace_fail += 1;
        }
        let mut herm_ok = true;
        for i in 0..4 {
            for j in i..4 {
                if (out.element(i, j) - out.element(j, i).conj()).norm() > 1e-12 {
                    herm_ok = false;
                }
            }
        }
        if !herm_ok {
            herm_fail += 1;
        }

        let eq_out = evolve_state(&eq, &eq, &samples, kappa, t1).expect("closed form");
        let mut eq_drift = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                eq_drift = eq_drift.max((eq_out.element(i, j) - eq.element(i, j)).norm());
            }
        }
        if eq_drift > 1e-12 {
            fixed_fail += 1;
        }

        let step = evolve_state(&state, &eq, &samples, kappa, t1).expect("closed form");
        let composed = evolve_state(&step, &eq, &samples, kappa, t2).expect("closed form");
        let mut semi_drift = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                semi_drift =
                    semi_drift.max((composed.element(i, j) - out.element(i, j)).norm());
            }
        }
        if semi_drift > 1e-10 {
            semi_fail += 1;
        }
    }
    for (name, count) in [
        ("trace preservation", trace_fail),
        ("hermiticity preservation", herm_fail),
        ("equilibrium fixed point", fixed_fail),
        ("semigroup property", semi_fail),
    ] {
        if count > 0 {
            failures.push(format!("{name}: {count}/{CASES}"));
        }
    }

    // Suites 5-6: protocol identities of the enhancement curves over
    // random physical systems and correlation times.
    let mut double_fail = 0usize;
    let mut start_fail = 0usize;
    for _ in 0..CASES {
        let system = random_system(&mut rng);
        let tau_c = 10f64.powf(rng.gen_range(-13.0..-8.0));
        let model = SpectralDensityModel::isotropic(tau_c).expect("positive tau");
        let samples = model.sample_at_transitions(&system.larmor_frequencies());
        let kappa = system.dipolar_constant(&consts);
        let t = 10f64.powf(rng.gen_range(-3.0..1.5));
        let times = [0.0, t, 2.0 * t];

        let sat = longitudinal_trajectory(
            ExperimentKind::SaturationS,
            &system,
            &consts,
            &samples,
            kappa,
            &times,
        )
        .expect("trajectory");
        let inv = longitudinal_trajectory(
            ExperimentKind::InversionS,
            &system,
            &consts,
            &samples,
            kappa,
            &times,
        )
        .expect("trajectory");
        let both = longitudinal_trajectory(
            ExperimentKind::InversionBoth,
            &system,
            &consts,
            &samples,
            kappa,
            &times,
        )
        .expect("trajectory");

        let mut doubles = true;
        for k in 0..times.len() {
            if (inv.upsilon_i[k] - 2.0 * sat.upsilon_i[k]).abs()
                > 1e-12 * sat.upsilon_i[k].abs().max(1.0)
                || (inv.upsilon_s[k] - 2.0 * sat.upsilon_s[k]).abs()
                    > 1e-12 * sat.upsilon_s[k].abs().max(1.0)
            {
                doubles = false;
            }
        }
        if !doubles {
            double_fail += 1;
        }
        if (both.upsilon_s[0] + 2.0).abs() > 1e-9 {
            start_fail += 1;
        }
    }
    for (name, count) in [
        ("inversion doubles saturation", double_fail),
        ("double inversion starts at -2", start_fail),
    ] {
        if count > 0 {
            failures.push(format!("{name}: {count}/{CASES}"));
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    Outcome {
        number: 7,
        label: "structural properties, six suites x 1000 cases",
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            "zero failures".to_string()
        } else {
            failures.join("; ")
        },
        elapsed_s: elapsed,
    }
}

#[test]
fn acceptance_criteria() {
    let outcomes = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
    ];
    let mut failed = Vec::new();
    for outcome in &outcomes {
        println!(
            "criterion {} [{}] {} — {} ({:.2} s)",
            outcome.number,
            if outcome.pass { "pass" } else { "FAIL" },
            outcome.label,
            outcome.detail,
            outcome.elapsed_s,
        );
        if !outcome.pass {
            failed.push(outcome.number);
        }
    }
    assert!(failed.is_empty(), "failed acceptance criteria: {failed:?}");
}
