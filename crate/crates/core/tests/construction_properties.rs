use lens_core::constructions::*;
use lens_core::sample::{random_permutation, random_rational_coupling, random_rational_target};
use lens_core::zoo::{bernoulli_system, odometer_system, IetSpec};
use lens_core::*;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// Independent oracle: push the midpoint of every subinterval through the
/// exchange as a point map and count `1/(kL)` of mass per subinterval into
/// (cell of image, cell of source).
fn mass_count(spec: &IetSpec, k: usize) -> Matrix<Rational> {
    let n = spec.n_intervals();
    let w = r(1, n as i64);
    let mut m = Matrix::<Rational>::zeros(k, k);
    for u in 0..n {
        let mid = r(2 * u as i64 + 1, 2 * n as i64);
        let image = spec.apply(&mid);
        let src = (mid * r(k as i64, 1)).floor().to_integer().to_usize().unwrap();
        let dst = (image * r(k as i64, 1)).floor().to_integer().to_usize().unwrap();
        let cur = m.get(dst, src).clone();
        m.set(dst, src, cur + &w);
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iet_realization_is_exact(k in 1usize..=5, mult in 1u64..=6, seed: u64) {
        let target = random_rational_target(k, k as u64 * mult, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let spec = realize_coupling_as_iet(&target).unwrap();
        prop_assert_eq!(spec.n_intervals() as u64, k as u64 * target.denominator());
        prop_assert_eq!(mass_count(&spec, k), target.to_coupling().into_matrix());
    }

    #[test]
    fn density_gap_bound(seed: u64, scale in 1u64..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..=4usize);
        let c = random_rational_coupling(k, 4, &mut rng).unwrap();
        let l = k as u64 * scale;
        let (target, dist) = density_gap(&c, l).unwrap();
        prop_assert!(dist <= r((k * k) as i64, l as i64));
        prop_assert_eq!(target.k(), k);
    }

    #[test]
    fn entropy_blocks_round_trip(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=8usize);
        let b = BlockTarget::new((0..n).map(|_| rng.gen_bool(0.5)).collect()).unwrap();
        let sys = bernoulli_system(2, n).unwrap();
        let f = entropy_factor_f(&sys, &realize_entropy_block(&b).unwrap(), n - 1).unwrap();
        prop_assert_eq!(f, b.values::<Rational>());
    }

    #[test]
    fn rigidity_is_periodic_for_exact_systems(k in 2usize..20, s in 0usize..20, n in 0u64..30, seed: u64) {
        let sys = zoo::rotation_system(k, s % k).unwrap();
        let tau = sys.cell_map().unwrap().clone();
        let shuffled = FiniteSystem::from_cell_map(&random_permutation(k, &mut ChaCha8Rng::seed_from_u64(seed))).unwrap();
        let blocks = contiguous_blocks(&distinct_block_sizes(k));
        for sys in [sys, shuffled] {
            let order = sys.cell_map().unwrap().order();
            prop_assert_eq!(rigidity_probe(&sys, &blocks, n).unwrap(), rigidity_probe(&sys, &blocks, n + order).unwrap());
        }
        let _ = tau;
    }
}

#[test]
fn iet_examples() {
    let t = RationalTarget::new(2, 4, vec![vec![1, 1], vec![1, 1]]).unwrap();
    let spec = realize_coupling_as_iet(&t).unwrap();
    assert_eq!(mass_count(&spec, 2), product_coupling::<Rational>(2).unwrap().into_matrix());
}

#[test]
fn density_gap_shrinks() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = random_rational_coupling(3, 5, &mut rng).unwrap().to_float();
    let mut last = f64::INFINITY;
    for l in [6u64, 60, 600] {
        let (_, d) = density_gap(&c, l).unwrap();
        assert!(d <= 9.0 / l as f64, "L={l}: {d}");
        assert!(d <= last);
        last = d;
    }
}

#[test]
fn entropy_all_short_blocks() {
    for n in 1..=3 {
        let sys = bernoulli_system(2, n).unwrap();
        for b in BlockTarget::all(n) {
            let lambda = realize_entropy_block::<Rational>(&b).unwrap();
            let f = entropy_factor_f(&sys, &lambda, n).unwrap();
            assert_eq!(&f[..n], &b.values::<Rational>()[..]);
            // F of the lens image is the shifted sequence.
            let shifted = entropy_factor_f(&sys, &lens_step(&sys, &lambda).unwrap(), n - 1).unwrap();
            assert_eq!(&shifted[..], &f[1..]);
        }
    }
    let sys = bernoulli_system(2, 3).unwrap();
    let (_, map) = refine(&make_uniform_partition(4).unwrap(), 2).unwrap();
    let diag = lift_coupling(&graph_coupling::<Rational>(&Permutation::identity(4)).unwrap(), &map).unwrap();
    assert_eq!(entropy_factor_f(&sys, &diag, 0).unwrap()[0], r(1, 2));
}

#[test]
fn witness_sampled_pairs_two_symbols_length_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let eps = r(1, 10_000);
    for _ in 0..10 {
        let sigma = random_permutation(4, &mut rng);
        let pi = random_permutation(4, &mut rng);
        let w = transitivity_witness(2, 2, &sigma, &pi, &eps).unwrap();
        assert_eq!(w.n, 2);
        assert!(w.check_source && w.check_image);
        assert!(w.source_gap.is_zero() && w.image_gap.is_zero());
        assert!(w.xi.is_valid());
    }
}

#[test]
fn rigidity_closed_form_for_bernoulli() {
    let sys = bernoulli_system(2, 3).unwrap();
    for sizes in [vec![1, 3, 4], vec![1, 2, 5], vec![3, 5]] {
        let blocks = contiguous_blocks(&sizes);
        let expected = sizes.iter().fold(Rational::zero(), |acc, &s| acc + r((s * s) as i64, 64));
        for n in 3..10 {
            assert_eq!(rigidity_probe(&sys, &blocks, n).unwrap(), expected);
        }
    }
}

#[test]
fn bernoulli_commuters_are_self_joinings() {
    for d in 2..=3 {
        for ell in 1..=2 {
            for len in 1..=2 {
                let c = bernoulli_cyclic_commuter(d, ell, len).unwrap();
                assert!(c.commutes && c.cycles_generator, "d={d} ell={ell} L={len}");
                assert!(c.lens_residual.is_zero());
                assert_eq!(c.permutation.order(), d as u64);
            }
        }
    }
}

#[test]
fn all_odometer_commuters_at_level_two() {
    let sys = odometer_system(3).unwrap();
    let tau4 = sys.cell_map().unwrap().pow(4);
    for pi in Permutation::all(4) {
        let c = odometer_commuter(&pi, 3).unwrap();
        assert!(c.commutes && c.power_residual.is_zero());
        // Direct check on the 8 cells.
        for v in 0..8 {
            assert_eq!(c.permutation.apply(tau4.apply(v)), tau4.apply(c.permutation.apply(v)));
        }
        let p = c.period.unwrap();
        assert_eq!(4 % p, 0);
    }
}
