//! Concrete systems: cyclic rotations, dyadic odometers, Bernoulli shifts on
//! cylinder words, equal-interval exchanges, plus the exact torus skew
//! product and finite-group rotation examples.

mod group;
mod spec;
mod torus;

pub use group::{
    automorphism_permutation, group_rotation_conjugation, rotation_permutation, FiniteAbelianGroup,
    GroupAutomorphism, RotationConjugation,
};
pub use spec::SystemSpec;
pub use torus::{
    invariant_torus_step, skew_tbar_conjugation, skew_w_step, AffineTorusMap, SkewConjugation,
    TorusPoint,
};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::partition::{FiniteSystem, Partition};
use crate::perm::Permutation;
use crate::scalar::{Rational, Scalar};

/// Largest number of cylinder cells a Bernoulli system may have.
pub const MAX_CELLS: usize = 4096;

/// Cyclic shift `a ↦ a + s (mod k)`.
pub fn rotation_system(k: usize, s: usize) -> Result<FiniteSystem> {
    if k == 0 {
        return Err(Error::EmptyPartition);
    }
    if s >= k {
        return Err(Error::InvalidParameter(format!("rotation needs 0 ≤ s < k, got s = {s}, k = {k}")));
    }
    FiniteSystem::from_cell_map(&Permutation::cyclic(k, s))
}

/// Dyadic adding machine at level `m`.
///
/// Cell `v` is the cylinder whose first `m` binary digits `x_0 … x_{m−1}` satisfy
/// `v = Σ x_t 2^t` (`x_0` least significant), labelled by the digit string
/// `x_0x_1…`. Adding `1` with carry to the right is then `v ↦ v + 1 (mod 2^m)`.
pub fn odometer_system(m: u32) -> Result<FiniteSystem> {
    if m == 0 {
        return Err(Error::InvalidParameter("odometer level must be ≥ 1".into()));
    }
    let k = 1usize
        .checked_shl(m)
        .filter(|k| *k <= MAX_CELLS)
        .ok_or(Error::SizeGuard {
            what: "2^m",
            value: usize::MAX,
            limit: MAX_CELLS,
        })?;
    let labels = (0..k)
        .map(|v| (0..m).map(|t| if v >> t & 1 == 1 { '1' } else { '0' }).collect())
        .collect();
    FiniteSystem::from_cell_map(&Permutation::cyclic(k, 1))?.with_partition(Partition::with_labels(labels)?)
}

/// Index of a cylinder word: `w_0` is the most significant base-`d` digit.
pub fn word_index(d: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &x| acc * d + x)
}

/// Inverse of [`word_index`] for words of length `len`.
pub fn word_of(d: usize, len: usize, mut index: usize) -> Vec<usize> {
    let mut w = vec![0; len];
    for t in (0..len).rev() {
        w[t] = index % d;
        index /= d;
    }
    w
}

fn checked_cells(d: usize, len: usize) -> Result<usize> {
    let mut k: usize = 1;
    for _ in 0..len {
        k = k.checked_mul(d).filter(|k| *k <= MAX_CELLS).ok_or(Error::SizeGuard {
            what: "d^L",
            value: d.saturating_pow(len as u32),
            limit: MAX_CELLS,
        })?;
    }
    Ok(k)
}

/// Full shift on `d` symbols seen through length-`len` cylinders.
///
/// `Q[w][w'] = 1/d` when `w'` is `w` shifted left with any new last symbol.
pub fn bernoulli_system(d: usize, len: usize) -> Result<FiniteSystem> {
    if d < 2 || len == 0 {
        return Err(Error::InvalidParameter(format!(
            "Bernoulli system needs d ≥ 2 and L ≥ 1, got d = {d}, L = {len}"
        )));
    }
    let k = checked_cells(d, len)?;
    let mut q = Matrix::<Rational>::zeros(k, k);
    let weight = Rational::ratio(1, d as i64);
    for w in 0..k {
        let base = (w * d) % k;
        for x in 0..d {
            q.set(w, base + x, weight.clone());
        }
    }
    let labels = (0..k)
        .map(|w| {
            let word = word_of(d, len, w);
            let parts: Vec<String> = word.iter().map(usize::to_string).collect();
            parts.join(if d <= 10 { "" } else { "." })
        })
        .collect();
    FiniteSystem::new(Partition::with_labels(labels)?, q)
}

/// `[0,1)` cut into `n` equal intervals; interval `u` is moved to position `permutation[u]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IetSpec {
    pub permutation: Permutation,
}

impl IetSpec {
    pub fn new(permutation: Permutation) -> Result<Self> {
        if permutation.is_empty() {
            return Err(Error::EmptyPartition);
        }
        Ok(Self { permutation })
    }

    pub fn n_intervals(&self) -> usize {
        self.permutation.len()
    }

    /// Image of `x ∈ [0,1)`: the map translates each interval rigidly.
    pub fn apply(&self, x: &Rational) -> Rational {
        let n = self.n_intervals() as i64;
        let scaled = x * Rational::ratio(n, 1);
        let u = scaled.floor();
        let offset = &scaled - &u;
        let idx = num_traits::ToPrimitive::to_usize(u.numer()).unwrap_or(0);
        debug_assert!(offset >= Rational::zero());
        (Rational::from_usize(self.permutation.apply(idx)) + offset) / Rational::ratio(n, 1)
    }
}

pub fn iet_system(spec: &IetSpec) -> Result<FiniteSystem> {
    FiniteSystem::from_cell_map(&spec.permutation)
}
