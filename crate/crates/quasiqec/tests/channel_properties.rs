//! Ensemble invariants of the channel layer: Choi round trips, trace
//! preservation vs the Choi marginal, fidelity/trace-distance
//! sandwiches, agreement of the two subspace-TP predicates, and
//! monotonicity of the trace-preservation deviation.

use quasiqec::channels::{
    atp_deviation, choi_of, is_scptp, kraus_from_choi, omega, random_channel, random_unitary,
    ChoiMatrix, KrausMap, KRAUS_TRUNCATION_TOL,
};
use quasiqec::linalg::{cr, fidelity, identity, max_abs, trace_distance};
use quasiqec::qec::random_code;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[test]
fn choi_roundtrip_on_two_hundred_random_channels() {
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    for k in 0..200 {
        let dim = 2 + k % 3; // 2..4
        let rank = 1 + k % 6; // 1..6
        let map = random_channel(dim, dim, rank, &mut rng);
        let choi = choi_of(&map);
        let back = kraus_from_choi(&choi, KRAUS_TRUNCATION_TOL).unwrap();
        let choi2 = choi_of(&back);
        let dev = max_abs(&(&choi.matrix - &choi2.matrix));
        assert!(dev <= 1e-9, "sample {k}: round-trip deviation {dev:.3e}");
    }
}

#[test]
fn trace_preservation_iff_choi_marginal_is_maximally_mixed() {
    let mut rng = ChaCha12Rng::seed_from_u64(103);
    for k in 0..60 {
        let dim = 2 + k % 3;
        let tp = random_channel(dim, dim, 2 + k % 3, &mut rng);
        let choi = choi_of(&tp);
        let marg = choi.input_marginal();
        assert!(max_abs(&(marg - identity(dim) * cr(1.0 / dim as f64))) <= 1e-10);

        // break trace preservation and watch the marginal move
        let mut shrunk = tp.clone();
        shrunk.kraus[0] = &shrunk.kraus[0] * cr(0.7);
        assert!(!shrunk.is_tp(1e-10));
        let marg2 = choi_of(&shrunk).input_marginal();
        assert!(max_abs(&(marg2 - identity(dim) * cr(1.0 / dim as f64))) > 1e-6);
    }
}

#[test]
fn fidelity_trace_distance_sandwich() {
    let mut rng = ChaCha12Rng::seed_from_u64(107);
    for k in 0..80 {
        let dim = 2 + k % 3;
        let a = choi_of(&random_channel(dim, dim, 2, &mut rng)).matrix;
        let b = choi_of(&random_channel(dim, dim, 3, &mut rng)).matrix;
        let f = fidelity(&a, &b).clamp(0.0, 1.0);
        let dt = trace_distance(&a, &b);
        assert!(1.0 - f.sqrt() <= dt + 1e-9, "lower bound at sample {k}");
        assert!(dt <= (1.0 - f).sqrt() + 1e-9, "upper bound at sample {k}");

        // one state pure: unitary Choi vs channel Choi
        let u = random_unitary(dim, &mut rng);
        let pure = choi_of(&KrausMap::from_unitary(&u)).matrix;
        let f2 = fidelity(&pure, &b).clamp(0.0, 1.0);
        let dt2 = trace_distance(&pure, &b);
        assert!(1.0 - f2 <= dt2 + 1e-9, "pure lower bound at sample {k}");
    }
}

#[test]
fn scptp_predicates_agree_on_random_maps() {
    let mut rng = ChaCha12Rng::seed_from_u64(109);
    for k in 0..40 {
        let dim = 4 + k % 3;
        let code = random_code(dim, 2, &mut rng);
        let p = code.projector();
        // block-respecting map: unitary inside the code block plus a
        // phase outside commutes with P
        let u_small = random_unitary(2, &mut rng);
        let vhat = code.lowdin_isometry();
        let q = identity(dim) - &p;
        let logical_u = &vhat * u_small * vhat.adjoint() + &q;
        let rep = is_scptp(&KrausMap::from_unitary(&logical_u), &p, 1e-9).unwrap();
        assert!(rep.is_scptp, "sample {k} should be subspace-TP");
        assert!(rep.predicates_agree, "sample {k} predicates disagree");

        // generic random channel almost surely leaks
        let noisy = random_channel(dim, dim, 2, &mut rng);
        let rep = is_scptp(&noisy, &p, 1e-9).unwrap();
        assert!(!rep.is_scptp, "random channel at sample {k}");
        assert!(rep.predicates_agree, "sample {k} predicates disagree");
    }
}

#[test]
fn atp_deviation_vanishes_iff_tp_and_grows_monotonically() {
    let mut rng = ChaCha12Rng::seed_from_u64(113);
    for _ in 0..30 {
        let map = random_channel(3, 3, 2, &mut rng);
        assert!(atp_deviation(&map).choi_deviation <= 1e-12);
        let mut last = 0.0;
        for step in 0..=8 {
            let s = 0.2 * step as f64 / 8.0;
            let scaled = KrausMap::new(
                map.kraus
                    .iter()
                    .map(|kk| kk * cr((1.0 - s).sqrt()))
                    .collect(),
            )
            .unwrap();
            let dev = atp_deviation(&scaled).choi_deviation;
            assert!(
                dev + 1e-14 >= last,
                "deviation must grow with the shrink factor"
            );
            last = dev;
        }
    }
}

#[test]
fn rejecting_malformed_choi_and_weights() {
    // non-PSD Choi
    let mut m = omega(2);
    m[(3, 3)] = cr(-0.4);
    let bad = ChoiMatrix {
        dim_in: 2,
        dim_out: 2,
        matrix: m,
    };
    assert!(kraus_from_choi(&bad, KRAUS_TRUNCATION_TOL).is_err());
    // mixing weights must sum to one
    let id = KrausMap::identity(2);
    let r = quasiqec::channels::combine(
        quasiqec::channels::CombineKind::Mix,
        &[id.clone(), id],
        Some(&[0.7, 0.7]),
    );
    assert!(r.is_err());
}

#[test]
fn instruments_validate_their_branch_sum() {
    use quasiqec::channels::Instrument;
    let mut rng = ChaCha12Rng::seed_from_u64(127);
    let mix: Vec<(String, KrausMap)> = (0..3)
        .map(|i| {
            let u = random_unitary(2, &mut rng);
            let scaled = KrausMap::new(vec![&u * cr((1.0 / 3.0_f64).sqrt())]).unwrap();
            (format!("branch-{i}"), scaled)
        })
        .collect();
    let inst = Instrument::new(mix).unwrap();
    assert!(inst.branch_sum().is_tp(1e-12));

    // dropping a branch breaks trace preservation
    let broken = vec![(
        "only".to_string(),
        KrausMap::new(vec![identity(2) * cr(0.5)]).unwrap(),
    )];
    assert!(Instrument::new(broken).is_err());
}

#[test]
fn span_samples_are_deterministic_and_non_tp_inputs_are_flagged() {
    let base = KrausMap::new(vec![identity(2) * cr(0.8)]).unwrap();
    let s = quasiqec::qec::span_sample(&base, 5).unwrap();
    assert!(!s.tp_within_span);
    // trace-non-increasing: largest eigenvalue of ΣK†K at most 1
    let defect = s.map.tp_defect() + identity(2);
    let (vals, _) = quasiqec::linalg::herm_eigen(&defect);
    assert!(vals[0] <= 1.0 + 1e-12);

    let a = quasiqec::qec::span_sample(&base, 5).unwrap();
    let dev: f64 = a
        .map
        .kraus
        .iter()
        .zip(&s.map.kraus)
        .map(|(x, y)| max_abs(&(x - y)))
        .fold(0.0, f64::max);
    assert!(dev == 0.0, "same seed must give the same sample");
}
