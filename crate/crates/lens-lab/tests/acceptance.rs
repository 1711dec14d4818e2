//! Acceptance suite: twelve criteria, each with its own time limit. Prints
//! one PASS/FAIL line per criterion and exits non-zero if any fails.
//!
//! Expected values come from oracles written here (dense matrix products,
//! midpoint mass counts, hand-rolled group arithmetic) rather than from the
//! code under test.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lens_core::constructions::{
    bernoulli_cyclic_commuter, contiguous_blocks, distinct_block_sizes, entropy_factor_f, odometer_commuter,
    realize_coupling_as_iet, realize_entropy_block, rigidity_probe, transitivity_witness, BlockTarget,
};
use lens_core::sample::{random_permutation, random_rational_coupling, random_rational_target};
use lens_core::zoo::{
    bernoulli_system, group_rotation_conjugation, invariant_torus_step, odometer_system, rotation_system,
    skew_tbar_conjugation, skew_w_step, FiniteAbelianGroup, GroupAutomorphism, IetSpec, SystemSpec, TorusPoint,
};
use lens_core::{
    cesaro_average, coupling_distance, fixed_point_space, graph_coupling, lens_step, lens_step_inverse,
    one_sided_step, orbit, product_coupling, self_joining_residual, FiniteSystem, Matrix, OrbitMode, Permutation,
    Rational, Scalar,
};
use lens_lab::config::parse_pairs;
use lens_lab::{list_experiments, run_experiment, write_report, ExperimentConfig};
use num_traits::{Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Group moduli with a list of automorphism matrices.
type GroupCase = (Vec<u64>, Vec<Vec<Vec<i64>>>);
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    g.set_stream(stream);
    g
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Dense `QᵀCQ`, independent of the sparse and relabelling paths.
fn dense_lens(q: &Matrix<Rational>, c: &Matrix<Rational>) -> Matrix<Rational> {
    q.transpose().mul(c).unwrap().mul(q).unwrap()
}

/// `Q[a][τ(a)] = 1`.
fn perm_matrix(tau: &Permutation) -> Matrix<Rational> {
    let k = tau.len();
    Matrix::from_fn(k, k, |a, i| if tau.apply(a) == i { r(1, 1) } else { r(0, 1) })
}

/// Graph coupling from its definition: `1/k` at `(σ(j), j)`.
fn graph(sigma: &Permutation) -> Matrix<Rational> {
    let k = sigma.len();
    Matrix::from_fn(k, k, |i, j| if sigma.apply(j) == i { r(1, k as i64) } else { r(0, 1) })
}

/// De Bruijn transition of the full shift on `d` symbols, cylinders of length `len`.
fn de_bruijn(d: usize, len: usize) -> Matrix<Rational> {
    let k = d.pow(len as u32);
    Matrix::from_fn(k, k, |w, v| {
        let shifted = (w * d) % k;
        if v >= shifted && v < shifted + d {
            r(1, d as i64)
        } else {
            r(0, 1)
        }
    })
}

fn sums_are(m: &Matrix<Rational>, target: &Rational) -> bool {
    m.row_sums().iter().chain(m.col_sums().iter()).all(|s| s == target)
}

fn random_zoo_system(g: &mut ChaCha8Rng) -> (String, FiniteSystem) {
    let spec = match g.gen_range(0..4) {
        0 => {
            let k = g.gen_range(2..=32usize);
            format!("rot:k={k},s={}", g.gen_range(0..k))
        }
        1 => format!("odo:m={}", g.gen_range(1..=5)),
        2 => {
            let (d, len) = [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (3, 1), (3, 2), (3, 3), (4, 2), (5, 2)]
                [g.gen_range(0..10)];
            format!("bern:d={d},L={len}")
        }
        _ => {
            let k = g.gen_range(2..=32usize);
            let p: Vec<String> = random_permutation(k, g).as_slice().iter().map(usize::to_string).collect();
            format!("iet:perm={}", p.join(","))
        }
    };
    let sys = spec.parse::<SystemSpec>().unwrap().build().unwrap();
    (spec, sys)
}

fn polytope_and_affinity() -> Outcome {
    let mut g = rng(1, 0);
    let mut worst_float = 0.0f64;
    for case in 0..1000 {
        let (spec, sys) = random_zoo_system(&mut g);
        let k = sys.k();
        ensure(k <= 32, || format!("{spec} has k = {k}"))?;
        let a = random_rational_coupling(k, 3, &mut g).map_err(e)?;
        let b = random_rational_coupling(k, 3, &mut g).map_err(e)?;
        let t = r(g.gen_range(0..=10), 10);
        let la = lens_step(&sys, &a).map_err(e)?;
        let lb = lens_step(&sys, &b).map_err(e)?;
        ensure(sums_are(la.matrix(), &r(1, k as i64)), || format!("case {case} {spec}: marginals drift"))?;
        ensure(*la.matrix() == dense_lens(sys.q(), a.matrix()), || format!("case {case} {spec}: differs from dense QᵀCQ"))?;
        let mix = a.mix(&t, &b).map_err(e)?;
        let lhs = lens_step(&sys, &mix).map_err(e)?;
        let rhs = la.mix(&t, &lb).map_err(e)?;
        ensure(lhs == rhs, || format!("case {case} {spec}: not affine"))?;
        let lf = lens_step(&sys.to_float(), &a.to_float()).map_err(e)?;
        for (x, y) in lf.matrix().entries().iter().zip(la.matrix().entries()) {
            worst_float = worst_float.max((x - y.to_f64()).abs());
        }
        worst_float = worst_float.max(lf.marginal_deviation());
    }
    ensure(worst_float <= 1e-12, || format!("float deviation {worst_float:e} > 1e-12"))?;
    Ok(format!("1000 couplings, exact sums and affinity; float deviation {worst_float:e}"))
}

fn conjugation() -> Outcome {
    let mut pairs = 0;
    for k in 1..=4 {
        let perms: Vec<Permutation> = Permutation::all(k).collect();
        for tau in &perms {
            let sys = FiniteSystem::<Rational>::from_cell_map(tau).map_err(e)?;
            let q = perm_matrix(tau);
            // ρ is the cell map of T⁻¹; in that notation the lens is σ ↦ ρ⁻¹σρ.
            let rho = tau.inverse();
            for sigma in &perms {
                let img = lens_step(&sys, &graph_coupling(sigma).map_err(e)?).map_err(e)?;
                let expected = graph(&rho.inverse().compose(sigma).compose(&rho));
                ensure(*img.matrix() == expected, || format!("k={k} τ={tau} σ={sigma}: lens image"))?;
                ensure(dense_lens(&q, &graph(sigma)) == expected, || format!("k={k}: dense oracle disagrees"))?;
                let inv = lens_step_inverse(&sys, &graph_coupling(sigma).map_err(e)?).map_err(e)?;
                let expected_inv = graph(&tau.inverse().compose(sigma).compose(tau));
                ensure(*inv.matrix() == expected_inv, || format!("k={k} τ={tau} σ={sigma}: inverse lens"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "{pairs} (τ, σ) pairs with k ≤ 4: T̃Δ_σ = Δ_(ρ⁻¹σρ), ρ the cell map of T⁻¹ (= Δ_(τστ⁻¹) for the forward map τ)"
    ))
}

/// Midpoint of each subinterval pushed through the exchange.
fn mass_count(spec: &IetSpec, k: usize) -> Matrix<Rational> {
    let n = spec.n_intervals() as i64;
    let mut m = Matrix::<Rational>::zeros(k, k);
    for u in 0..n {
        let mid = r(2 * u + 1, 2 * n);
        let image = spec.apply(&mid);
        let src = num_traits::ToPrimitive::to_usize(&(&mid * r(k as i64, 1)).floor().to_integer()).unwrap();
        let dst = num_traits::ToPrimitive::to_usize(&(&image * r(k as i64, 1)).floor().to_integer()).unwrap();
        let cur = m.get(dst, src).clone();
        m.set(dst, src, cur + r(1, n));
    }
    m
}

fn iet() -> Outcome {
    let mut g = rng(3, 0);
    for case in 0..200 {
        let k = g.gen_range(1..=5usize);
        let l = k as u64 * g.gen_range(1..=30 / k as u64);
        let target = random_rational_target(k, l, &mut g).map_err(e)?;
        let spec = realize_coupling_as_iet(&target).map_err(e)?;
        let expected = Matrix::from_fn(k, k, |i, j| r(target.counts()[i][j] as i64, l as i64));
        ensure(mass_count(&spec, k) == expected, || format!("target {case} (k={k}, L={l}) not realized"))?;
    }
    Ok("200 targets with k ≤ 5, L ≤ 30 realized exactly (midpoint mass count)".into())
}

fn rigidity() -> Outcome {
    let (mut a, mut b) = (1usize, 2usize);
    let mut count = 0;
    while b <= 233 {
        let sys = rotation_system(b, a).map_err(e)?;
        let blocks = contiguous_blocks(&distinct_block_sizes(b));
        let score = rigidity_probe(&sys, &blocks, b as u64).map_err(e)?;
        ensure(score == r(1, 1), || format!("k = {b}: score {score} at n = k"))?;
        (a, b) = (b, a + b);
        count += 1;
    }
    let sizes = [1usize, 3, 4];
    let blocks = contiguous_blocks(&sizes);
    let sys = bernoulli_system(2, 3).map_err(e)?;
    let a_j: Vec<Rational> = sizes.iter().map(|&s| r(s as i64, 8)).collect();
    let total = a_j.iter().fold(Rational::zero(), |s, a| s + a);
    let closed = total * a_j.iter().fold(Rational::zero(), |s, a| s + a * a);
    ensure(closed.to_f64() < 0.9, || format!("closed form {closed} ≥ 0.9"))?;
    let q = de_bruijn(2, 3);
    let xi = Matrix::from_fn(8, 8, |i, j| {
        blocks
            .iter()
            .find(|bl| bl.contains(&i) && bl.contains(&j))
            .map_or(r(0, 1), |bl| r(1, 8 * bl.len() as i64))
    });
    let mut qn = Matrix::<Rational>::identity(8);
    for n in 0..=12u64 {
        if n >= 3 {
            ensure(qn.entries().iter().all(|x| *x == r(1, 8)), || format!("Q^{n} not uniform"))?;
            let image = dense_lens(&qn, &xi);
            let oracle = blocks.iter().fold(Rational::zero(), |acc, bl| {
                acc + bl.iter().flat_map(|&i| bl.iter().map(move |&j| (i, j))).fold(Rational::zero(), |s, (i, j)| s + image.get(i, j))
            });
            let score = rigidity_probe(&sys, &blocks, n).map_err(e)?;
            ensure(score == closed && oracle == closed, || format!("n = {n}: score {score}, oracle {oracle}, closed {closed}"))?;
            let float = rigidity_probe(&sys.to_float(), &blocks, n).map_err(e)?;
            ensure((float - closed.to_f64()).abs() <= 1e-12, || format!("n = {n}: float score {float}"))?;
        }
        qn = qn.mul(&q).unwrap();
    }
    Ok(format!("{count} Fibonacci approximants score 1 at n = k; Bernoulli score {closed} < 0.9 for 3 ≤ n ≤ 12"))
}

fn witness() -> Outcome {
    let eps = r(1, 1000);
    let check = |d: usize, len: usize, sigma: &Permutation, pi: &Permutation| -> Result<(), String> {
        let w = transitivity_witness(d, len, sigma, pi, &eps).map_err(e)?;
        ensure(w.n == len && w.check_source && w.check_image, || format!("L={len} σ={sigma} π={pi}: no exact witness"))?;
        // Oracle: coarse masses of ξ and of its image under a dense lens power.
        let k = d.pow(len as u32);
        let q = de_bruijn(d, 2 * len);
        let mut image = w.xi.matrix().clone();
        for _ in 0..len {
            image = dense_lens(&q, &image);
        }
        let coarse = |m: &Matrix<Rational>| {
            let mut c = Matrix::<Rational>::zeros(k, k);
            for (i, j, v) in m.nonzeros() {
                let cur = c.get(i / k, j / k).clone();
                c.set(i / k, j / k, cur + v);
            }
            c
        };
        let (src, img) = (coarse(w.xi.matrix()), coarse(&image));
        ensure((0..k).all(|i| *src.get(i, sigma.apply(i)) == r(1, k as i64)), || format!("σ={sigma}: source diagonal"))?;
        ensure((0..k).all(|i| *img.get(i, pi.apply(i)) == r(1, k as i64)), || format!("π={pi}: image diagonal"))?;
        Ok(())
    };
    let mut exhaustive = 0;
    for sigma in Permutation::all(2) {
        for pi in Permutation::all(2) {
            check(2, 1, &sigma, &pi)?;
            exhaustive += 1;
        }
    }
    let mut g = rng(5, 0);
    for _ in 0..50 {
        let sigma = random_permutation(4, &mut g);
        let pi = random_permutation(4, &mut g);
        check(2, 2, &sigma, &pi)?;
    }
    Ok(format!("L=1: all {exhaustive} pairs; L=2: 50 seeded pairs; witness at n = L, memberships exact"))
}

/// `F` from its definition, with the dense lens.
fn f_oracle(q: &Matrix<Rational>, lambda: &Matrix<Rational>, n: usize) -> Vec<Rational> {
    let half = q.rows() / 2;
    let mut state = lambda.clone();
    let mut out = Vec::new();
    for _ in 0..n {
        out.push((0..half).flat_map(|i| (0..half).map(move |j| (i, j))).fold(Rational::zero(), |s, (i, j)| s + state.get(i, j)));
        state = dense_lens(q, &state);
    }
    out
}

fn entropy() -> Outcome {
    let mut blocks: Vec<BlockTarget> = (1..=3).flat_map(BlockTarget::all).collect();
    let exhaustive = blocks.len();
    let mut g = rng(6, 0);
    for _ in 0..50 {
        let n = g.gen_range(1..=8usize);
        blocks.push(BlockTarget::new((0..n).map(|_| g.gen_bool(0.5)).collect()).map_err(e)?);
    }
    for b in &blocks {
        let n = b.len();
        let lambda = realize_entropy_block::<Rational>(b).map_err(e)?;
        let f = entropy_factor_f(&bernoulli_system(2, n).map_err(e)?, &lambda, n - 1).map_err(e)?;
        let expected = b.values::<Rational>();
        ensure(f == expected, || format!("block {b}: F prefix {f:?}"))?;
        if n <= 6 {
            ensure(f_oracle(&de_bruijn(2, n), lambda.matrix(), n) == expected, || format!("block {b}: dense oracle"))?;
        }
    }
    Ok(format!("{exhaustive} exhaustive blocks (n ≤ 3) and 50 seeded blocks (n ≤ 8): F prefix equals b"))
}

fn fixed_and_periodic() -> Outcome {
    for k in 3..=5usize {
        let sys = rotation_system(k, 1).map_err(e)?;
        let space = fixed_point_space(&sys).map_err(e)?;
        ensure(space.dimension == k - 1, || format!("Z{k}: dimension {}", space.dimension))?;
        let circulant = |m: &Matrix<Rational>| (0..k).all(|i| (0..k).all(|j| m.get(i, j) == m.get((i + 1) % k, (j + 1) % k)));
        ensure(space.basis.iter().all(circulant), || format!("Z{k}: non-circulant basis"))?;
        // The k circulant graph couplings are affinely independent and fixed.
        for s in 0..k {
            let c = graph_coupling(&Permutation::cyclic(k, s)).map_err(e)?;
            ensure(dense_lens(sys.q(), c.matrix()) == *c.matrix(), || format!("Z{k}: shift {s} not fixed"))?;
            ensure(space.affine_hull_contains(&c).map_err(e)?, || format!("Z{k}: shift {s} outside the hull"))?;
        }
    }
    let mut bern = 0;
    for d in 2..=3 {
        for ell in 1..=2 {
            for len in 1..=2 {
                let c = bernoulli_cyclic_commuter(d, ell, len).map_err(e)?;
                ensure(c.commutes && c.cycles_generator && c.lens_residual.is_zero(), || {
                    format!("d={d} ell={ell} L={len}: residual {}", c.lens_residual)
                })?;
                bern += 1;
            }
        }
    }
    let sys = odometer_system(3).map_err(e)?;
    let tau4 = sys.cell_map().unwrap().pow(4);
    for pi in Permutation::all(4) {
        let c = odometer_commuter(&pi, 3).map_err(e)?;
        let s = &c.permutation;
        ensure((0..8).all(|v| s.apply(tau4.apply(v)) == tau4.apply(s.apply(v))), || format!("π={pi}: no commutation"))?;
        let delta = graph(s);
        let mut state = delta.clone();
        for _ in 0..4 {
            state = dense_lens(sys.q(), &state);
        }
        ensure(state == delta, || format!("π={pi}: T̃⁴Δ_S ≠ Δ_S"))?;
        ensure(c.commutes && c.period.is_some_and(|p| 4 % p == 0), || format!("π={pi}: period {:?}", c.period))?;
    }
    Ok(format!("Z3..Z5 circulant fixed spaces of dimension k−1; {bern} Bernoulli commuters with residual 0; 24 odometer commuters of period | 4"))
}

fn one_sided() -> Outcome {
    let sys = bernoulli_system(2, 3).map_err(e)?;
    let product = product_coupling::<Rational>(8).map_err(e)?;
    for i in 0..20 {
        let c = random_rational_coupling(8, 4, &mut rng(8, i)).map_err(e)?;
        let orb = orbit(&sys, &c, 24, OrbitMode::OneSided).map_err(e)?;
        for (n, state) in orb.states.iter().enumerate().skip(6) {
            ensure(coupling_distance(state, &product).map_err(e)?.is_zero(), || format!("sample {i}: distance ≠ 0 at n = {n}"))?;
        }
    }
    let rot = rotation_system(8, 1).map_err(e)?;
    let tau = rot.cell_map().unwrap().clone();
    let mut g = rng(8, 100);
    for _ in 0..100 {
        let sigma = random_permutation(8, &mut g);
        let allowed: Vec<Matrix<Rational>> = (0..8).map(|n| graph(&tau.pow(-n).compose(&sigma))).collect();
        let mut state = graph_coupling::<Rational>(&sigma).map_err(e)?;
        for n in 0..=16 {
            ensure(allowed.contains(state.matrix()), || format!("σ={sigma}: left the graph set at n = {n}"))?;
            state = one_sided_step(&rot, &state).map_err(e)?;
        }
    }
    Ok("Bernoulli: 20 orbits at the product from n = 6 through 24; Z8: 100 orbits stay in {Δ_(τ⁻ⁿσ)}".into())
}

fn cesaro() -> Outcome {
    let systems = ["rot:k=8,s=3", "odo:m=3", "bern:d=2,L=3", "iet:perm=2,0,3,1"];
    let mut worst: BTreeMap<usize, Rational> = BTreeMap::new();
    for spec in systems {
        let sys = spec.parse::<SystemSpec>().unwrap().build().map_err(e)?;
        for i in 0..20 {
            let c = random_rational_coupling(sys.k(), 3, &mut rng(9, i)).map_err(e)?;
            let orb = orbit(&sys, &c, 1000, OrbitMode::TwoSided).map_err(e)?;
            for n in [10usize, 100, 1000] {
                let avg = cesaro_average(&orb, n).map_err(e)?;
                let res = self_joining_residual(&sys, &avg).map_err(e)?;
                ensure(res <= r(2, n as i64), || format!("{spec} sample {i}: residual {res} > 2/{n}"))?;
                let w = worst.entry(n).or_insert_with(Rational::zero);
                if res > *w {
                    *w = res;
                }
            }
        }
    }
    let w: Vec<String> = worst.iter().map(|(n, v)| format!("N={n}: {}", v.to_f64())).collect();
    Ok(format!("4 finite zoo systems × 20 couplings; worst residual {}", w.join(", ")))
}

fn skew() -> Outcome {
    let grid = |g: i64| -> Vec<TorusPoint> {
        let mut out = Vec::new();
        for x in 0..g {
            for y in 0..g {
                for z in 0..g {
                    out.push(TorusPoint::from_ratios(&[(x, g), (y, g), (z, g)]).unwrap());
                }
            }
        }
        out
    };
    let frac = |x: Rational| &x - x.floor();
    let samples = grid(3);
    let points = grid(5);
    for alpha in [r(1, 7), r(2, 5), r(3, 11)] {
        for t in &points {
            let c = t.coords();
            let w = TorusPoint::new(vec![c[0].clone(), frac(&c[0] + &c[1]), frac(&c[0] + &c[1] + &c[2])]).unwrap();
            let res = skew_tbar_conjugation(&alpha, t, &samples).map_err(e)?;
            ensure(res.symbolic_is_rotation && res.samples_agree, || format!("α={alpha} t={t:?}: not a rotation"))?;
            ensure(res.translation == w && skew_w_step(t).map_err(e)? == w, || format!("α={alpha} t={t:?}: translation"))?;
        }
    }
    let mut checked = 0;
    for q in 1..=7i64 {
        for p in 0..q {
            for b in 0..q {
                for c in 0..q {
                    let (a, bb, cc) = (r(p, q), r(b, q), r(c, q));
                    let bc = TorusPoint::new(vec![bb.clone(), cc.clone()]).unwrap();
                    let out = invariant_torus_step(&a, &bc).map_err(e)?;
                    let want = TorusPoint::new(vec![frac(&bb + &a), frac(&bb + &cc + &a)]).unwrap();
                    ensure(out == want, || format!("a={a} b={bb} c={cc}: invariant torus map"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("125 grid points × 3 values of α; invariant-torus map exact at {checked} rational points"))
}

fn group() -> Outcome {
    let cases: [GroupCase; 3] = [
        (vec![5], vec![vec![vec![2]], vec![vec![3]], vec![vec![4]]]),
        (
            vec![2, 2, 2],
            vec![
                vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]],
                vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]],
                vec![vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 1]],
            ],
        ),
        (
            vec![4, 3],
            vec![vec![vec![3, 0], vec![0, 1]], vec![vec![1, 0], vec![0, 2]], vec![vec![3, 0], vec![0, 2]]],
        ),
    ];
    let mut total = 0;
    for (moduli, autos) in cases {
        let g = FiniteAbelianGroup::new(moduli.clone()).map_err(e)?;
        let elems: Vec<Vec<u64>> = g.elements().collect();
        let add = |x: &[u64], y: &[u64]| -> Vec<u64> { x.iter().zip(y).zip(&moduli).map(|((a, b), m)| (a + b) % m).collect() };
        for mat in autos {
            let apply = |x: &[u64]| -> Vec<u64> {
                mat.iter()
                    .zip(&moduli)
                    .map(|(row, &m)| {
                        let s: i64 = row.iter().zip(x).map(|(a, xi)| a * *xi as i64).sum();
                        s.rem_euclid(m as i64) as u64
                    })
                    .collect()
            };
            let inverse = |y: &[u64]| elems.iter().find(|x| apply(x) == y).cloned().expect("bijective");
            let t = GroupAutomorphism::new(g.clone(), mat.clone()).map_err(e)?;
            for z in &elems {
                let res = group_rotation_conjugation(&t, z).map_err(e)?;
                let tz = apply(z);
                ensure(res.image == tz && res.composite_matches, || format!("G={moduli:?} T={mat:?} z={z:?}"))?;
                ensure(elems.iter().all(|y| apply(&add(&inverse(y), z)) == add(y, &tz)), || format!("oracle failed at z={z:?}"))?;
                total += 1;
            }
        }
    }
    Ok(format!("{total} (T, z) checks over Z5, (Z2)³, Z4×Z3"))
}

fn config_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn determinism() -> Outcome {
    let dir = config_dir();
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(e)?
        .filter_map(|d| d.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ini"))
        .collect();
    files.sort();
    let mut covered = std::collections::BTreeSet::new();
    let mut runs = 0;
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(e)?;
    let tmp = tempfile::tempdir().map_err(e)?;
    for path in &files {
        let base = ExperimentConfig::from_pairs(parse_pairs(&std::fs::read_to_string(path).map_err(e)?).map_err(e)?)
            .map_err(e)?;
        let info = list_experiments().into_iter().find(|i| i.name == base.experiment).ok_or("unknown experiment")?;
        for backend in &info.backends {
            let mut cfg = base.clone();
            cfg.backend = *backend;
            let first = run_experiment(&cfg).map_err(e)?;
            let second = single.install(|| run_experiment(&cfg)).map_err(e)?;
            let a = write_report(&first, &tmp.path().join("a"), Duration::ZERO).map_err(e)?;
            let b = write_report(&second, &tmp.path().join("b"), Duration::from_secs(1)).map_err(e)?;
            for (x, y) in std::iter::once((&a.report, &b.report)).chain(a.series.iter().zip(&b.series)) {
                let (bx, by) = (std::fs::read(x).map_err(e)?, std::fs::read(y).map_err(e)?);
                ensure(bx == by, || format!("{} ({backend}): {} differs between runs", path.display(), x.display()))?;
            }
            runs += 1;
        }
        covered.insert(base.experiment.clone());
    }
    let missing: Vec<String> = list_experiments().into_iter().map(|i| i.name).filter(|n| !covered.contains(n)).collect();
    ensure(missing.is_empty(), || format!("no config for {missing:?}"))?;
    Ok(format!("{runs} runs over all {} experiments: byte-identical reports and CSVs (default pool against one thread)", covered.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("polytope and affinity", Some(10), polytope_and_affinity),
        ("conjugation equivariance", Some(5), conjugation),
        ("IET realization", Some(30), iet),
        ("rigidity against mixing", Some(10), rigidity),
        ("transitivity witness", Some(60), witness),
        ("entropy factor", Some(30), entropy),
        ("fixed and periodic points", Some(60), fixed_and_periodic),
        ("one-sided quasi-attractor", Some(10), one_sided),
        ("Cesàro barycenter", Some(30), cesaro),
        ("skew-product dynamics", Some(5), skew),
        ("group-rotation embedding", Some(5), group),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match (outcome, limit) {
            (Ok(detail), Some(l)) if secs >= *l as f64 => Err(format!("too slow: {secs:.2}s ≥ {l}s ({detail})")),
            (other, _) => other,
        };
        let budget = limit.map_or("no limit".to_string(), |l| format!("{l}s"));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.2}s / {budget}]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2}s / {budget}]: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
