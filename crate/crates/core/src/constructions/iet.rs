//! Realizing rational couplings by equal-interval exchanges.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coupling::CouplingMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::perm::Permutation;
use crate::scalar::{Rational, Scalar};
use crate::zoo::IetSpec;

/// Coupling `P = m / L` with integer counts; every row and column of `m` sums to `L/k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTarget", into = "RawTarget")]
pub struct RationalTarget {
    k: usize,
    denominator: u64,
    m: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct RawTarget {
    k: usize,
    #[serde(rename = "L")]
    denominator: u64,
    m: Vec<Vec<u64>>,
}

impl TryFrom<RawTarget> for RationalTarget {
    type Error = Error;
    fn try_from(raw: RawTarget) -> Result<Self> {
        Self::new(raw.k, raw.denominator, raw.m)
    }
}

impl From<RationalTarget> for RawTarget {
    fn from(t: RationalTarget) -> Self {
        RawTarget {
            k: t.k,
            denominator: t.denominator,
            m: t.m,
        }
    }
}

impl RationalTarget {
    pub fn new(k: usize, denominator: u64, m: Vec<Vec<u64>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyPartition);
        }
        if denominator == 0 || !denominator.is_multiple_of(k as u64) {
            return Err(Error::InfeasibleTarget(format!("k = {k} must divide L = {denominator}")));
        }
        if m.len() != k || m.iter().any(|row| row.len() != k) {
            return Err(Error::InfeasibleTarget(format!("m must be {k}x{k}")));
        }
        let share = denominator / k as u64;
        for (i, row) in m.iter().enumerate() {
            let s: u64 = row.iter().sum();
            if s != share {
                return Err(Error::InfeasibleTarget(format!("row {i} sums to {s}, expected {share}")));
            }
        }
        for j in 0..k {
            let s: u64 = m.iter().map(|row| row[j]).sum();
            if s != share {
                return Err(Error::InfeasibleTarget(format!("column {j} sums to {s}, expected {share}")));
            }
        }
        Ok(Self { k, denominator, m })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.m
    }

    pub fn to_coupling(&self) -> CouplingMatrix<Rational> {
        let l = self.denominator as i64;
        CouplingMatrix::from_matrix_unchecked(Matrix::from_fn(self.k, self.k, |i, j| {
            Rational::ratio(self.m[i][j] as i64, l)
        }))
    }
}

/// Builds an exchange of `k·L` equal subintervals whose graph coupling,
/// restricted to the `k` coarse cells, equals `m/L`.
///
/// Coarse cell `c` owns fine intervals `c·L .. (c+1)·L`. Source cells are
/// swept in order; each sends `k·m[d][c]` consecutive subintervals to
/// destination `d` (in destination order), filling the first free
/// subintervals there. With the graph-coupling convention (mass at
/// `(image, source)`) this lands mass `m[d][c]/L` on entry `(d, c)`.
pub fn realize_coupling_as_iet(target: &RationalTarget) -> Result<IetSpec> {
    let k = target.k;
    let per_cell = target.denominator as usize;
    let mut images = vec![usize::MAX; k * per_cell];
    let mut fill = vec![0usize; k];
    for src in 0..k {
        let mut cursor = 0usize;
        for (dst, filled) in fill.iter_mut().enumerate() {
            let count = k * target.m[dst][src] as usize;
            for step in 0..count {
                if cursor >= per_cell || *filled >= per_cell {
                    return Err(Error::InfeasibleTarget("marginals overflow a cell".into()));
                }
                images[src * per_cell + cursor] = dst * per_cell + *filled;
                cursor += 1;
                *filled += 1;
                let _ = step;
            }
        }
        if cursor != per_cell {
            return Err(Error::InfeasibleTarget(format!("source cell {src} not exhausted")));
        }
    }
    IetSpec::new(Permutation::new(images)?)
}

/// Nearest valid target with denominator `L` (entrywise rounding plus an
/// integer transportation fix-up) and its L1 distance to `c`.
///
/// Each entry moves by less than `1/L`, so the distance is below `k²/L`.
pub fn density_gap<S: Scalar>(c: &CouplingMatrix<S>, denominator: u64) -> Result<(RationalTarget, S)> {
    let k = c.k();
    if denominator == 0 || !denominator.is_multiple_of(k as u64) {
        return Err(Error::InvalidParameter(format!("k = {k} must divide L = {denominator}")));
    }
    let share = (denominator / k as u64) as i64;
    let l = Rational::ratio(denominator as i64, 1);
    let scaled: Vec<Vec<Rational>> = (0..k)
        .map(|i| (0..k).map(|j| c.get(i, j).to_rational().max(Rational::zero()) * &l).collect())
        .collect();
    let mut m: Vec<Vec<i64>> = scaled
        .iter()
        .map(|row| row.iter().map(|x| x.floor().to_integer().to_i64().unwrap_or(0)).collect())
        .collect();
    let row_need: Vec<i64> = m.iter().map(|row| share - row.iter().sum::<i64>()).collect();
    let col_need: Vec<i64> = (0..k).map(|j| share - m.iter().map(|row| row[j]).sum::<i64>()).collect();
    if row_need.iter().chain(&col_need).any(|x| *x < 0) {
        return Err(Error::InfeasibleTarget("input marginals exceed 1/k".into()));
    }
    // Preferred edges: cells with a fractional remainder; fall back to all cells.
    let fractional: Vec<Vec<bool>> = scaled
        .iter()
        .map(|row| row.iter().map(|x| !(x - x.floor()).is_zero()).collect())
        .collect();
    let bumps = unit_transport(&row_need, &col_need, &fractional)
        .or_else(|| unit_transport(&row_need, &col_need, &vec![vec![true; k]; k]))
        .ok_or_else(|| Error::InfeasibleTarget("rounding fix-up failed".into()))?;
    for (i, j) in bumps {
        m[i][j] += 1;
    }
    let counts = m.into_iter().map(|row| row.into_iter().map(|x| x as u64).collect()).collect();
    let target = RationalTarget::new(k, denominator, counts)?;
    let approx = target.to_coupling();
    let distance = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .fold(S::zero(), |acc, (i, j)| {
            acc + (S::from_rational(approx.get(i, j)) - c.get(i, j).clone()).abs()
        });
    Ok((target, distance))
}

/// 0/1 transportation: pick cells (at most one per allowed edge) so row `i`
/// gets `rows[i]` and column `j` gets `cols[j]`. Augmenting paths on the
/// bipartite row/column graph.
fn unit_transport(rows: &[i64], cols: &[i64], allowed: &[Vec<bool>]) -> Option<Vec<(usize, usize)>> {
    let k = rows.len();
    let mut used = vec![vec![false; k]; k];
    let mut row_left: Vec<i64> = rows.to_vec();
    let mut col_left: Vec<i64> = cols.to_vec();
    while let Some(start) = (0..k).find(|&i| row_left[i] > 0) {
        // BFS over alternating paths: row → (unused allowed edge) → col → (used edge) → row.
        let mut prev_col: Vec<Option<usize>> = vec![None; k]; // col j reached from row
        let mut prev_row: Vec<Option<usize>> = vec![None; k]; // row i reached from col
        let mut row_seen = vec![false; k];
        row_seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        let mut end = None;
        'search: while let Some(i) = queue.pop_front() {
            for j in 0..k {
                if !allowed[i][j] || used[i][j] || prev_col[j].is_some() {
                    continue;
                }
                prev_col[j] = Some(i);
                if col_left[j] > 0 {
                    end = Some(j);
                    break 'search;
                }
                for i2 in 0..k {
                    if used[i2][j] && !row_seen[i2] {
                        row_seen[i2] = true;
                        prev_row[i2] = Some(j);
                        queue.push_back(i2);
                    }
                }
            }
        }
        let mut j = end?;
        loop {
            let i = prev_col[j].unwrap();
            used[i][j] = true;
            match prev_row[i] {
                Some(j_prev) => {
                    used[i][j_prev] = false;
                    j = j_prev;
                }
                None => break,
            }
        }
        row_left[start] -= 1;
        col_left[end.unwrap()] -= 1;
    }
    if col_left.iter().any(|x| *x != 0) {
        return None;
    }
    Some(
        (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|&(i, j)| used[i][j])
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{graph_coupling, product_coupling, restrict_coupling};
    use crate::partition::{make_uniform_partition, refine};

    fn induced(spec: &IetSpec, k: usize, per_cell: usize) -> CouplingMatrix<Rational> {
        let (_, map) = refine(&make_uniform_partition(k).unwrap(), per_cell).unwrap();
        restrict_coupling(&graph_coupling(&spec.permutation).unwrap(), &map).unwrap()
    }

    #[test]
    fn diagonal_target_gives_identity() {
        let t = RationalTarget::new(2, 2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let spec = realize_coupling_as_iet(&t).unwrap();
        assert!(spec.permutation.is_identity());
        assert_eq!(spec.n_intervals(), 4);
        assert_eq!(induced(&spec, 2, 2), t.to_coupling());
    }

    #[test]
    fn uniform_target_gives_product() {
        let t = RationalTarget::new(2, 4, vec![vec![1, 1], vec![1, 1]]).unwrap();
        let spec = realize_coupling_as_iet(&t).unwrap();
        assert_eq!(induced(&spec, 2, 4), product_coupling(2).unwrap());
    }

    #[test]
    fn invalid_targets() {
        assert!(RationalTarget::new(2, 3, vec![vec![1, 0], vec![0, 1]]).is_err());
        assert!(RationalTarget::new(2, 4, vec![vec![2, 0], vec![1, 1]]).is_err());
        assert!(RationalTarget::new(2, 4, vec![vec![2, 0]]).is_err());
        assert!(RationalTarget::new(0, 4, vec![]).is_err());
    }

    #[test]
    fn target_json() {
        let t = RationalTarget::new(2, 4, vec![vec![1, 1], vec![1, 1]]).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v, serde_json::json!({"k": 2, "L": 4, "m": [[1, 1], [1, 1]]}));
        let back: RationalTarget = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_value::<RationalTarget>(serde_json::json!({"k": 2, "L": 4, "m": [[2, 1], [1, 1]]})).is_err());
    }

    #[test]
    fn density_gap_exact_inputs() {
        let (t, d) = density_gap(&product_coupling::<Rational>(2).unwrap(), 4).unwrap();
        assert_eq!(t.counts(), &[vec![1, 1], vec![1, 1]]);
        assert!(d.is_zero());
        let c = RationalTarget::new(3, 6, vec![vec![2, 0, 0], vec![0, 1, 1], vec![0, 1, 1]]).unwrap();
        let (t, d) = density_gap(&c.to_coupling(), 6).unwrap();
        assert_eq!(t, c);
        assert!(d.is_zero());
        assert!(density_gap(&c.to_coupling(), 7).is_err());
    }

    #[test]
    fn unit_transport_needs_augmenting_paths() {
        // Greedy row-by-row would take (0,0) and strand row 1.
        let allowed = vec![vec![true, true], vec![true, false]];
        let picks = unit_transport(&[1, 1], &[1, 1], &allowed).unwrap();
        assert_eq!(picks, vec![(0, 1), (1, 0)]);
        assert!(unit_transport(&[2, 0], &[1, 1], &[vec![true, false], vec![true, true]]).is_none());
    }
}
