use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sweep_decoder::bits::{CheckSet, Faces};
use sweep_decoder::lattice::Lattice;
use sweep_decoder::noise::{
    bernoulli_mask, effective_rate, exact_marginal, sample_correlated, sample_measurement_flips, NeighborPairs,
};

/// |x - mean| within `k` standard deviations of a binomial(n, p) count.
fn within_binomial(x: usize, n: usize, p: f64, k: f64) -> bool {
    let mean = n as f64 * p;
    (x as f64 - mean).abs() <= k * (n as f64 * p * (1.0 - p)).sqrt()
}

#[test]
fn phase_flip_counts_are_binomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in [0.001, 0.05, 0.3, 0.7] {
        let n = 200_000;
        let w = bernoulli_mask::<Faces, _>(n, p, &mut rng).weight();
        assert!(within_binomial(w, n, p, 5.0), "p={p}: {w}");
    }
}

#[test]
fn measurement_flips_are_independent_of_syndrome() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 100_000;
    let s = CheckSet::from_indices(n, (0..n).step_by(3));
    let flipped = sample_measurement_flips(&s, 0.1, &mut rng).xor(&s);
    assert!(within_binomial(flipped.weight(), n, 0.1, 5.0));
    let on_marked = s.iter_ones().filter(|&i| flipped.get(i)).count();
    assert!(within_binomial(on_marked, s.weight(), 0.1, 5.0));
}

/// A single pair fires at rate p and then applies ZI, IZ, ZZ with equal weight.
#[test]
fn pair_outcomes_are_multinomial() {
    let pair = NeighborPairs::from_pairs(2, [(0, 1)]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (p, n) = (0.3, 300_000);
    let mut counts = [0usize; 4];
    for _ in 0..n {
        let e = sample_correlated(&pair, p, &mut rng);
        counts[e.get(0) as usize + 2 * e.get(1) as usize] += 1;
    }
    assert!(within_binomial(counts[0], n, 1.0 - p, 5.0));
    for &c in &counts[1..] {
        assert!(within_binomial(c, n, p / 3.0, 5.0), "{counts:?}");
    }
}

#[test]
fn marginal_matches_degree_formula_on_lattice() {
    let lat = Lattice::rhombic_periodic(4).unwrap();
    let pairs = NeighborPairs::edge_sharing(&lat);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (p, samples) = (0.02, 20_000);
    let mut hits = 0usize;
    for _ in 0..samples {
        hits += sample_correlated(&pairs, p, &mut rng).weight();
    }
    let total = samples * lat.num_faces();
    let expect = exact_marginal(p, 8);
    let se = (expect * (1.0 - expect) / total as f64).sqrt();
    assert!((hits as f64 / total as f64 - expect).abs() < 5.0 * se);
    assert!((pairs.mean_marginal(p) - expect).abs() < 1e-15);
}

#[test]
fn explicit_pairs_are_normalised() {
    let a = NeighborPairs::from_pairs(4, [(2, 1), (1, 2), (0, 3)]);
    assert_eq!(a.pairs(), &[(0, 3), (1, 2)]);
    assert_eq!(a.degrees(), vec![1, 1, 1, 1]);
}

#[test]
#[should_panic]
fn self_pairs_are_rejected() {
    NeighborPairs::from_pairs(3, [(1, 1)]);
}

proptest! {
    /// The closed form is the second-order expansion of the exact marginal for
    /// a qubit in three pairs, so the gap is bounded by the cubic term.
    #[test]
    fn effective_rate_is_second_order(p in 0.0f64..=0.375) {
        let gap = (effective_rate(p).unwrap() - exact_marginal(p, 3)).abs();
        prop_assert!(gap <= 32.0 / 27.0 * p * p * p + 1e-15);
    }

    #[test]
    fn exact_marginal_is_a_probability(p in 0.0f64..=0.75, n in 0usize..40) {
        let m = exact_marginal(p, n);
        prop_assert!((0.0..=0.5 + 1e-12).contains(&m));
    }
}
