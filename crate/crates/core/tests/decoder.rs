use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sweep_decoder::bits::QubitSet;
use sweep_decoder::causal::Direction;
use sweep_decoder::decoder::{is_logical_failure, sweep_decode, verdict, Decoder, DecoderConfig, DecoderError, Outcome};
use sweep_decoder::lattice::{Family, Lattice};
use sweep_decoder::noise::bernoulli_mask;
use sweep_decoder::sweep::{SweepState, Tables};

fn decode_error(dec: &mut Decoder<'_>, lat: &Lattice, err: &QubitSet, seed: u64) -> Outcome {
    let r = dec.decode(lat.boundary(err), seed);
    match r.outcome {
        Outcome::Corrected => verdict(lat, &err.xor(&r.correction)),
        o => o,
    }
}

#[test]
fn empty_syndrome_takes_no_steps() {
    let lat = Lattice::rhombic_open(3).unwrap();
    let tables = Tables::build(&lat).unwrap();
    let r = sweep_decode(&lat, &tables, lat.zero_checks(), &DecoderConfig::for_size(3), 0).unwrap();
    assert_eq!(r.outcome, Outcome::Corrected);
    assert_eq!(r.steps, 0);
    assert!(r.correction.is_zero());
}

/// A lone face is its own causal diamond, so one step in any direction removes it.
#[test]
fn single_face_removed_in_one_step() {
    for lat in [Lattice::cubic_periodic(4).unwrap(), Lattice::rhombic_periodic(4).unwrap()] {
        let tables = Tables::build(&lat).unwrap();
        let mut dec = Decoder::new(&lat, &tables, DecoderConfig::for_size(4)).unwrap();
        for f in 0..lat.num_faces() {
            let e = QubitSet::from_indices(lat.num_faces(), [f]);
            for d in Direction::ALL {
                let mut st = SweepState::new(&lat, lat.boundary(&e));
                dec.step(d, &mut st, 1);
                assert_eq!(st.correction, e, "face {f} direction {d} on {}", lat.family());
                assert!(st.syndrome.is_zero());
            }
        }
    }
}

#[test]
fn all_small_errors_on_tori_are_corrected() {
    for lat in [Lattice::cubic_periodic(4).unwrap(), Lattice::rhombic_periodic(4).unwrap()] {
        let tables = Tables::build(&lat).unwrap();
        let mut dec = Decoder::new(&lat, &tables, DecoderConfig::for_size(4)).unwrap();
        let n = lat.num_faces();
        for a in 0..n {
            for b in a + 1..n {
                let e = QubitSet::from_indices(n, [a, b]);
                assert_eq!(decode_error(&mut dec, &lat, &e, (a * n + b) as u64), Outcome::Corrected, "{a},{b}");
            }
        }
    }
}

#[test]
fn exhaustive_pairs_on_smallest_open_lattice() {
    let lat = Lattice::rhombic_open(3).unwrap();
    let tables = Tables::build(&lat).unwrap();
    let mut dec = Decoder::new(&lat, &tables, DecoderConfig::for_size(3)).unwrap();
    let n = lat.num_faces();
    let bad = (0..n)
        .flat_map(|a| (a..n).map(move |b| (a, b)))
        .filter(|&(a, b)| {
            let e = QubitSet::from_indices(n, [a, b]);
            decode_error(&mut dec, &lat, &e, 9) != Outcome::Corrected
        })
        .count();
    assert_eq!(bad, 0);
}

#[test]
fn logical_operator_is_a_logical_failure() {
    for fam in [Family::RhombicOpen, Family::CubicPeriodic] {
        let lat = fam.build(4).unwrap();
        let z = lat.logical_z()[0].clone();
        assert!(lat.boundary(&z).is_zero());
        assert!(is_logical_failure(&lat, &z).unwrap());
        assert_eq!(verdict(&lat, &z), Outcome::LogicalFailure);
        assert_eq!(verdict(&lat, &lat.zero_qubits()), Outcome::Corrected);
    }
}

#[test]
fn stabilizers_are_not_failures() {
    let lat = Lattice::rhombic_periodic(4).unwrap();
    for c in 0..lat.num_cells() {
        assert_eq!(verdict(&lat, &lat.cell_set(c)), Outcome::Corrected);
    }
}

#[test]
fn residual_with_syndrome_is_rejected() {
    let lat = Lattice::cubic_periodic(3).unwrap();
    let e = QubitSet::from_indices(lat.num_faces(), [0]);
    assert!(matches!(is_logical_failure(&lat, &e), Err(DecoderError::NonzeroSyndrome(4))));
    assert_eq!(verdict(&lat, &e), Outcome::SyndromeRemains);
}

#[test]
fn exhausted_budget_reports_remaining_syndrome() {
    let lat = Lattice::rhombic_periodic(6).unwrap();
    let tables = Tables::build(&lat).unwrap();
    let mut cfg = DecoderConfig::for_size(6);
    cfg.t_max = 1;
    cfg.perfect_period = 1;
    let e = bernoulli_mask(lat.num_faces(), 0.3, &mut ChaCha8Rng::seed_from_u64(2));
    let r = sweep_decode(&lat, &tables, lat.boundary(&e), &cfg, 0).unwrap();
    assert_eq!(r.outcome, Outcome::SyndromeRemains);
    assert_eq!(r.steps, cfg.budget());
    assert!(!r.residual_syndrome.is_zero());
}

#[test]
fn invalid_config_is_rejected() {
    let lat = Lattice::cubic_periodic(3).unwrap();
    let tables = Tables::build(&lat).unwrap();
    let mut cfg = DecoderConfig::for_size(3);
    cfg.order.pop();
    assert!(Decoder::new(&lat, &tables, cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// The correction's boundary accounts for exactly the syndrome that was removed.
    #[test]
    fn correction_explains_removed_syndrome(picks in prop::collection::vec(0usize..10_000, 1..12), seed in any::<u64>()) {
        let lat = Lattice::rhombic_open(4).unwrap();
        let tables = Tables::build(&lat).unwrap();
        let e = QubitSet::from_indices(lat.num_faces(), picks.iter().map(|&i| i % lat.num_faces()));
        let s = lat.boundary(&e);
        let r = sweep_decode(&lat, &tables, s.clone(), &DecoderConfig::for_size(4), seed).unwrap();
        prop_assert_eq!(lat.boundary(&r.correction).xor(&r.residual_syndrome), s);
        prop_assert_eq!(r.outcome == Outcome::Corrected, r.residual_syndrome.is_zero());
        prop_assert!(r.steps <= DecoderConfig::for_size(4).budget());
    }
}
