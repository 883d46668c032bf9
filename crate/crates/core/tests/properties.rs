//! Cross-module invariants on randomized inputs.
//!
//! Everything random is seeded, so a failure reproduces exactly.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dephasing::channels::{
    apply_closed_form, build_kraus, channel_params, ChannelKind, NoiseRates, COMPLETENESS_TOL,
};
use dephasing::matrix::{tensor, ComplexMatrix};
use dephasing::metrics::{concurrence, pure_concurrence};
use dephasing::state::{pure_density, validate, DensityMatrix, PureState, Qubit};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_pure(rng: &mut ChaCha8Rng) -> PureState {
    loop {
        let mut amps = [Complex64::ZERO; 4];
        let mut norm_sq = 0.0;
        for a in amps.iter_mut() {
            *a = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            norm_sq += a.norm_sqr();
        }
        if norm_sq < 1e-3 {
            continue;
        }
        let norm = norm_sq.sqrt();
        for a in amps.iter_mut() {
            *a /= norm;
        }
        return PureState::new(amps).expect("normalized by construction");
    }
}

/// Random full-rank density matrix: ρ = G G† / Tr(G G†).
fn random_mixed(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    loop {
        let entries: Vec<Complex64> = (0..dim * dim)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let g = ComplexMatrix::from_slice(dim, &entries).unwrap();
        let gg = g.mul(&g.adjoint()).unwrap();
        let tr = gg.trace().re;
        if tr < 1e-6 {
            continue;
        }
        let m = gg.scale(c(1.0 / tr, 0.0));
        return DensityMatrix::new(m).expect("Gram matrix is a valid state");
    }
}

/// Haar-ish random U(2) from the standard three-angle parametrisation.
fn random_unitary_2x2(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let lam: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut u = ComplexMatrix::zeros(2);
    u.set(0, 0, c(ct, 0.0));
    u.set(0, 1, -c(0.0, lam).exp() * st);
    u.set(1, 0, c(0.0, phi).exp() * st);
    u.set(1, 1, c(0.0, phi + lam).exp() * ct);
    u
}

fn random_rates(rng: &mut ChaCha8Rng) -> NoiseRates {
    NoiseRates::new(
        rng.random_range(0.1..10.0),
        rng.random_range(0.1..10.0),
        rng.random_range(0.1..10.0),
    )
    .unwrap()
}

// --- matrix and state layer ---------------------------------------------

#[test]
fn partial_trace_recovers_product_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..200 {
        let rho_a = random_mixed(&mut rng, 2);
        let rho_b = random_mixed(&mut rng, 2);
        let joint = DensityMatrix::new(tensor(rho_a.matrix(), rho_b.matrix()).unwrap()).unwrap();
        let back_a = joint.partial_trace(Qubit::A).unwrap();
        let back_b = joint.partial_trace(Qubit::B).unwrap();
        assert!(back_a.matrix().max_abs_diff(rho_a.matrix()) < 1e-12);
        assert!(back_b.matrix().max_abs_diff(rho_b.matrix()) < 1e-12);
    }
}

#[test]
fn pure_density_always_validates() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..500 {
        let rho = pure_density(&random_pure(&mut rng));
        let report = validate(rho.matrix());
        assert!(report.is_valid(), "{report}");
    }
}

#[test]
fn density_eigenvalues_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..300 {
        let rho = random_mixed(&mut rng, 4);
        let sum: f64 = rho.eigenvalues().iter().sum();
        assert!((sum - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn tensor_is_bilinear(
        a in prop::array::uniform8(-1.0f64..1.0),
        b in prop::array::uniform8(-1.0f64..1.0),
        d in prop::array::uniform8(-1.0f64..1.0),
        s in -2.0f64..2.0,
    ) {
        let m2 = |v: &[f64; 8]| {
            let entries: Vec<Complex64> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
            ComplexMatrix::from_slice(2, &entries).unwrap()
        };
        let (a, b, d) = (m2(&a), m2(&b), m2(&d));
        let s = c(s, 0.0);
        // (a + s·d) ⊗ b = a⊗b + s·(d⊗b)
        let lhs = tensor(&a.add(&d.scale(s)).unwrap(), &b).unwrap();
        let rhs = tensor(&a, &b).unwrap().add(&tensor(&d, &b).unwrap().scale(s)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        // b ⊗ (a + s·d) likewise
        let lhs = tensor(&b, &a.add(&d.scale(s)).unwrap()).unwrap();
        let rhs = tensor(&b, &a).unwrap().add(&tensor(&b, &d).unwrap().scale(s)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn tensor_mixed_product_identity(
        a in prop::array::uniform8(-1.0f64..1.0),
        b in prop::array::uniform8(-1.0f64..1.0),
        e in prop::array::uniform8(-1.0f64..1.0),
        f in prop::array::uniform8(-1.0f64..1.0),
    ) {
        let m2 = |v: &[f64; 8]| {
            let entries: Vec<Complex64> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
            ComplexMatrix::from_slice(2, &entries).unwrap()
        };
        let (a, b, e, f) = (m2(&a), m2(&b), m2(&e), m2(&f));
        // (a⊗b)(e⊗f) = (ae)⊗(bf)
        let lhs = tensor(&a, &b).unwrap().mul(&tensor(&e, &f).unwrap()).unwrap();
        let rhs = tensor(&a.mul(&e).unwrap(), &b.mul(&f).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}

// --- channels --------------------------------------------------------------

#[test]
fn completeness_holds_across_log_grid() {
    let rates = NoiseRates::new(0.5, 1.0, 2.0).unwrap();
    let t_max = 20.0
        * [rates.t2(), rates.t2_a(), rates.t2_b()]
            .into_iter()
            .fold(0.0, f64::max);
    let mut grid = vec![0.0];
    for k in 0..49 {
        grid.push(1e-4 * (t_max / 1e-4).powf(k as f64 / 48.0));
    }
    for kind in ChannelKind::ALL {
        for &t in &grid {
            let params = channel_params(t, &rates).unwrap();
            let ch = build_kraus(kind, &params).unwrap();
            assert!(
                ch.completeness_residual() <= COMPLETENESS_TOL,
                "{kind} at t = {t}: residual {}",
                ch.completeness_residual()
            );
        }
    }
}

#[test]
fn apply_preserves_state_validity_and_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for _ in 0..1000 {
        let rates = random_rates(&mut rng);
        let t: f64 = rng.random_range(0.0..5.0);
        let kind = ChannelKind::ALL[rng.random_range(0..5)];
        let rho0 = random_mixed(&mut rng, 4);
        let params = channel_params(t, &rates).unwrap();
        let out = build_kraus(kind, &params).unwrap().apply(&rho0).unwrap();
        let report = out.validate();
        assert!(report.is_valid(), "{kind} at t = {t}: {report}");
        // Pure dephasing never moves populations.
        for i in 0..4 {
            assert!((out.matrix().get(i, i) - rho0.matrix().get(i, i)).norm() < 1e-13);
        }
    }
}

#[test]
fn operator_sum_agrees_with_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..500 {
        let rates = random_rates(&mut rng);
        let t: f64 = rng.random_range(0.0..8.0);
        let kind = ChannelKind::ALL[rng.random_range(0..5)];
        let rho0 = random_mixed(&mut rng, 4);
        let params = channel_params(t, &rates).unwrap();
        let via_kraus = build_kraus(kind, &params).unwrap().apply(&rho0).unwrap();
        let via_mask = apply_closed_form(kind, &params, &rho0).unwrap();
        assert!(
            via_kraus.matrix().max_abs_diff(via_mask.matrix()) < 1e-12,
            "{kind} at t = {t}"
        );
    }
}

#[test]
fn local_channels_compose_into_two_qubit_channel() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    for _ in 0..200 {
        let rates = random_rates(&mut rng);
        let t: f64 = rng.random_range(0.0..4.0);
        let rho0 = random_mixed(&mut rng, 4);
        let params = channel_params(t, &rates).unwrap();
        let a_then_b = build_kraus(ChannelKind::OneQubitB, &params)
            .unwrap()
            .apply(
                &build_kraus(ChannelKind::OneQubitA, &params)
                    .unwrap()
                    .apply(&rho0)
                    .unwrap(),
            )
            .unwrap();
        let b_then_a = build_kraus(ChannelKind::OneQubitA, &params)
            .unwrap()
            .apply(
                &build_kraus(ChannelKind::OneQubitB, &params)
                    .unwrap()
                    .apply(&rho0)
                    .unwrap(),
            )
            .unwrap();
        let joint = build_kraus(ChannelKind::TwoQubitLocal, &params)
            .unwrap()
            .apply(&rho0)
            .unwrap();
        assert!(a_then_b.matrix().max_abs_diff(joint.matrix()) < 1e-12);
        assert!(b_then_a.matrix().max_abs_diff(joint.matrix()) < 1e-12);
    }
}

#[test]
fn full_twelve_equals_sequential_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    for _ in 0..200 {
        let rates = random_rates(&mut rng);
        let t: f64 = rng.random_range(0.0..4.0);
        let rho0 = random_mixed(&mut rng, 4);
        let params = channel_params(t, &rates).unwrap();
        let full = build_kraus(ChannelKind::FullTwelve, &params)
            .unwrap()
            .apply(&rho0)
            .unwrap();
        for order in [
            [
                ChannelKind::OneQubitA,
                ChannelKind::OneQubitB,
                ChannelKind::Collective,
            ],
            [
                ChannelKind::Collective,
                ChannelKind::OneQubitB,
                ChannelKind::OneQubitA,
            ],
            [
                ChannelKind::OneQubitB,
                ChannelKind::Collective,
                ChannelKind::OneQubitA,
            ],
        ] {
            let mut acc = rho0.clone();
            for kind in order {
                acc = build_kraus(kind, &params).unwrap().apply(&acc).unwrap();
            }
            assert!(acc.matrix().max_abs_diff(full.matrix()) < 1e-12);
        }
    }
}

#[test]
fn channels_form_a_semigroup_in_time() {
    let mut rng = ChaCha8Rng::seed_from_u64(205);
    for _ in 0..200 {
        let rates = random_rates(&mut rng);
        let t1: f64 = rng.random_range(0.0..3.0);
        let t2: f64 = rng.random_range(0.0..3.0);
        let kind = ChannelKind::ALL[rng.random_range(0..5)];
        let rho0 = random_mixed(&mut rng, 4);
        let step1 = apply_closed_form(kind, &channel_params(t1, &rates).unwrap(), &rho0).unwrap();
        let step2 = apply_closed_form(kind, &channel_params(t2, &rates).unwrap(), &step1).unwrap();
        let direct =
            apply_closed_form(kind, &channel_params(t1 + t2, &rates).unwrap(), &rho0).unwrap();
        assert!(
            step2.matrix().max_abs_diff(direct.matrix()) < 1e-12,
            "{kind}"
        );
    }
}

// --- metrics ----------------------------------------------------------------

#[test]
fn concurrence_convexity_bound_under_local_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    for _ in 0..1000 {
        let rates = random_rates(&mut rng);
        let t: f64 = rng.random_range(0.0..3.0);
        let psi = random_pure(&mut rng);
        let rho0 = pure_density(&psi);
        let c0 = concurrence(&rho0).unwrap().c;
        let params = channel_params(t, &rates).unwrap();
        let ct =
            concurrence(&apply_closed_form(ChannelKind::TwoQubitLocal, &params, &rho0).unwrap())
                .unwrap()
                .c;
        assert!(
            ct <= params.gamma_a * params.gamma_b * c0 + 1e-9,
            "C(t) = {ct} exceeds bound {}",
            params.gamma_a * params.gamma_b * c0
        );
    }
}

#[test]
fn one_qubit_channel_bounds_on_mixed_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(302);
    for _ in 0..300 {
        let rates = random_rates(&mut rng);
        let t: f64 = rng.random_range(0.0..3.0);
        let rho0 = random_mixed(&mut rng, 4);
        let c0 = concurrence(&rho0).unwrap().c;
        let params = channel_params(t, &rates).unwrap();
        let ca = concurrence(&apply_closed_form(ChannelKind::OneQubitA, &params, &rho0).unwrap())
            .unwrap()
            .c;
        let cb = concurrence(&apply_closed_form(ChannelKind::OneQubitB, &params, &rho0).unwrap())
            .unwrap()
            .c;
        assert!(ca <= params.gamma_a * c0 + 1e-9);
        assert!(cb <= params.gamma_b * c0 + 1e-9);
    }
}

#[test]
fn concurrence_invariant_under_local_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..200 {
        let rho = random_mixed(&mut rng, 4);
        let u = tensor(&random_unitary_2x2(&mut rng), &random_unitary_2x2(&mut rng)).unwrap();
        let rotated =
            DensityMatrix::new(u.mul(rho.matrix()).unwrap().mul(&u.adjoint()).unwrap()).unwrap();
        let c0 = concurrence(&rho).unwrap().c;
        let c1 = concurrence(&rotated).unwrap().c;
        assert!(
            (c0 - c1).abs() < 1e-9,
            "C changed under local unitary: {c0} vs {c1}"
        );
    }
}

#[test]
fn pure_concurrence_agrees_with_general_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(304);
    for _ in 0..1000 {
        let psi = random_pure(&mut rng);
        let direct = pure_concurrence(&psi);
        let general = concurrence(&pure_density(&psi)).unwrap().c;
        assert!(
            (direct - general).abs() < 1e-10,
            "pure {direct} vs general {general}"
        );
    }
}

#[test]
fn spin_flip_spectrum_is_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(305);
    for _ in 0..300 {
        let rho = random_mixed(&mut rng, 4);
        let result = concurrence(&rho).unwrap();
        for l in result.lambdas {
            assert!(l >= 0.0);
            assert!(l.is_finite());
        }
        assert!((0.0..=1.0).contains(&result.c));
    }
}

#[test]
fn concurrence_decays_monotonically_for_tested_families() {
    let rates = NoiseRates::new(0.7, 1.0, 2.0).unwrap();
    let states = [
        PureState::bell_phi_plus(),
        PureState::from_reals_normalized([1.0, 1.0, 0.0, 1.0]).unwrap(),
        PureState::from_reals_normalized([1.0, 0.0, 1.0, 1.0]).unwrap(),
        PureState::from_reals_normalized([0.0, 1.0, 1.0, 0.0]).unwrap(),
    ];
    for kind in ChannelKind::ALL {
        for psi in &states {
            let rho0 = pure_density(psi);
            let mut last = f64::INFINITY;
            for k in 0..40 {
                let t = k as f64 * 0.25;
                let params = channel_params(t, &rates).unwrap();
                let c = concurrence(&apply_closed_form(kind, &params, &rho0).unwrap())
                    .unwrap()
                    .c;
                assert!(
                    c <= last + 1e-12,
                    "{kind}: C rose from {last} to {c} at t = {t}"
                );
                last = c;
            }
        }
    }
}
