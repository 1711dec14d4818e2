//! The rigidity probe: how much of `ξ = Σ a_i μ_{A_i}⊗μ_{A_i}` stays on the
//! diagonal blocks after `n` lens steps.

use crate::coupling::CouplingMatrix;
use crate::error::{Error, Result};
use crate::lens::lens_step;
use crate::matrix::Matrix;
use crate::partition::{system_power, FiniteSystem};
use crate::scalar::Scalar;

/// Sizes `1, 2, 3, …` with the remainder in the last block, all distinct.
///
/// `8 → [1, 2, 5]`, `13 → [1, 2, 3, 7]`.
pub fn distinct_block_sizes(k: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut rest = k;
    let mut s = 1;
    while rest > 2 * s {
        sizes.push(s);
        rest -= s;
        s += 1;
    }
    if rest > 0 {
        sizes.push(rest);
    }
    sizes
}

/// Consecutive cells grouped by `sizes`.
pub fn contiguous_blocks(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut start = 0;
    sizes
        .iter()
        .map(|&s| {
            let block = (start..start + s).collect();
            start += s;
            block
        })
        .collect()
}

/// `ξ`: entries `1/(k·|B|)` on each block square `B × B`.
pub fn block_coupling<S: Scalar>(k: usize, blocks: &[Vec<usize>]) -> Result<CouplingMatrix<S>> {
    check_blocks(k, blocks)?;
    let mut m = Matrix::zeros(k, k);
    for block in blocks {
        let v = S::ratio(1, (k * block.len()) as i64);
        for &a in block {
            for &b in block {
                m.set(a, b, v.clone());
            }
        }
    }
    Ok(CouplingMatrix::from_matrix_unchecked(m))
}

fn check_blocks(k: usize, blocks: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; k];
    let mut sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
    for &cell in blocks.iter().flatten() {
        if cell >= k || seen[cell] {
            return Err(Error::BadBlocks(format!("cell {cell} is out of range or repeated")));
        }
        seen[cell] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::BadBlocks(format!("cell {missing} is in no block")));
    }
    sizes.sort_unstable();
    if sizes.windows(2).any(|w| w[0] == w[1]) || sizes.first() == Some(&0) {
        return Err(Error::BadBlocks(format!("block sizes {sizes:?} must be positive and distinct")));
    }
    Ok(())
}

/// `T̃ⁿξ(∪ B × B)`, computed as one lens step of `Tⁿ`.
pub fn rigidity_probe<S: Scalar>(sys: &FiniteSystem<S>, blocks: &[Vec<usize>], n: u64) -> Result<S> {
    let k = sys.k();
    let xi = block_coupling::<S>(k, blocks)?;
    let image = lens_step(&system_power(sys, n as i64)?, &xi)?;
    let mut score = S::zero();
    for block in blocks {
        score = score + image.mass_on(block, block);
    }
    Ok(score)
}
