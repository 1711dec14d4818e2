//! Seeded random inputs: permutations, rational couplings and integer targets.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::constructions::RationalTarget;
use crate::coupling::{graph_coupling, CouplingMatrix};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::perm::Permutation;
use crate::scalar::{Rational, Scalar};

pub fn random_permutation<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Permutation {
    let mut images: Vec<usize> = (0..k).collect();
    images.shuffle(rng);
    Permutation::new(images).expect("shuffle of 0..k")
}

/// Convex combination of `terms` random graph couplings with small integer
/// weights; always a valid coupling with modest denominators.
pub fn random_rational_coupling<R: Rng + ?Sized>(
    k: usize,
    terms: usize,
    rng: &mut R,
) -> Result<CouplingMatrix<Rational>> {
    if k == 0 {
        return Err(Error::EmptyPartition);
    }
    let terms = terms.max(1);
    let weights: Vec<i64> = (0..terms).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = weights.iter().sum();
    let mut sum = Matrix::<Rational>::zeros(k, k);
    for w in weights {
        let g = graph_coupling::<Rational>(&random_permutation(k, rng))?;
        sum = sum.add(&g.matrix().scale(&Rational::ratio(w, total)))?;
    }
    CouplingMatrix::new(sum)
}

/// Integer target with denominator `denominator`: a sum of `L/k` random
/// permutation matrices. `k` must divide `denominator`.
pub fn random_rational_target<R: Rng + ?Sized>(
    k: usize,
    denominator: u64,
    rng: &mut R,
) -> Result<RationalTarget> {
    if k == 0 || denominator == 0 || !denominator.is_multiple_of(k as u64) {
        return Err(Error::InvalidParameter(format!("k = {k} must divide L = {denominator}")));
    }
    let mut m = vec![vec![0u64; k]; k];
    for _ in 0..denominator / k as u64 {
        let p = random_permutation(k, rng);
        for (i, row) in m.iter_mut().enumerate() {
            row[p.apply(i)] += 1;
        }
    }
    RationalTarget::new(k, denominator, m)
}
