//! The factor map `F(λ) = (T̃ⁿλ(A × A))_{n≥0}` of the binary shift's lens onto
//! sequences in `{0, 1/2}`, and couplings realizing prescribed blocks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coupling::{check_k, graph_coupling, CouplingMatrix};
use crate::error::{Error, Result};
use crate::lens::lens_step;
use crate::partition::FiniteSystem;
use crate::perm::Permutation;
use crate::scalar::{Rational, Scalar};
use crate::zoo::MAX_CELLS;

/// Block over `{0, 1/2}`; stored as `half[t] = (b_t == 1/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockTarget {
    half: Vec<bool>,
}

impl BlockTarget {
    pub fn new(half: Vec<bool>) -> Result<Self> {
        if half.is_empty() {
            return Err(Error::InvalidParameter("a block needs at least one symbol".into()));
        }
        Ok(Self { half })
    }

    /// Accepts exactly the values `0` and `1/2`.
    pub fn from_values(values: &[Rational]) -> Result<Self> {
        let half = Rational::ratio(1, 2);
        let bits = values
            .iter()
            .map(|v| {
                if *v == half {
                    Ok(true)
                } else if *v == Rational::ratio(0, 1) {
                    Ok(false)
                } else {
                    Err(Error::InvalidParameter(format!("block entries must be 0 or 1/2, got {v}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }

    /// All `2ⁿ` blocks of length `n`, in binary order.
    pub fn all(n: usize) -> impl Iterator<Item = Self> {
        (0..1usize << n).map(move |mask| Self {
            half: (0..n).map(|t| mask >> (n - 1 - t) & 1 == 1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.half.len()
    }

    pub fn is_empty(&self) -> bool {
        self.half.is_empty()
    }

    pub fn values<S: Scalar>(&self) -> Vec<S> {
        self.half.iter().map(|&h| S::ratio(i64::from(h), 2)).collect()
    }
}

impl FromStr for BlockTarget {
    type Err = Error;

    /// Comma-separated `0` and `1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(crate::scalar::parse_rational)
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(&values)
    }
}

impl fmt::Display for BlockTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.half.iter().map(|&h| if h { "1/2" } else { "0" }).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Cells whose cylinder word starts with the symbol `0`.
fn zero_block(k: usize) -> Result<Vec<usize>> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "the entropy factor needs a binary cylinder system, got k = {k}"
        )));
    }
    Ok((0..k / 2).collect())
}

/// `F[t] = (T̃ᵗλ)(A × A)` for `t = 0..=steps`, `A` the first-symbol-zero cylinder.
pub fn entropy_factor_f<S: Scalar>(
    sys: &FiniteSystem<S>,
    lambda: &CouplingMatrix<S>,
    steps: usize,
) -> Result<Vec<S>> {
    check_k(sys.k(), lambda.k())?;
    let a = zero_block(sys.k())?;
    let mut out = Vec::with_capacity(steps + 1);
    let mut state = lambda.clone();
    out.push(state.mass_on(&a, &a));
    for _ in 0..steps {
        state = lens_step(sys, &state)?;
        out.push(state.mass_on(&a, &a));
    }
    Ok(out)
}

/// The cylinder permutation realizing `b`: coordinate `t` of the word is
/// flipped when `b_t = 0` and kept when `b_t = 1/2`.
///
/// Built one coordinate at a time as in the inductive construction: the map
/// on length-`t+1` words extends the map on length-`t` words by acting on the
/// new last symbol.
pub fn entropy_block_permutation(b: &BlockTarget) -> Result<Permutation> {
    let n = b.len();
    if n >= usize::BITS as usize || 1usize << n > MAX_CELLS {
        return Err(Error::SizeGuard {
            what: "2^n",
            value: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX),
            limit: MAX_CELLS,
        });
    }
    let mut images = vec![0usize];
    for &keep in &b.half {
        let flip = usize::from(!keep);
        let mut next = vec![0; images.len() * 2];
        for (idx, slot) in next.iter_mut().enumerate() {
            let bit = idx & 1;
            *slot = images[idx >> 1] << 1 | (bit ^ flip);
        }
        images = next;
    }
    Permutation::new(images)
}

/// `Δ_S` at resolution `2ⁿ` for the permutation of [`entropy_block_permutation`].
pub fn realize_entropy_block<S: Scalar>(b: &BlockTarget) -> Result<CouplingMatrix<S>> {
    graph_coupling(&entropy_block_permutation(b)?)
}
