//! Equal-mass partitions, block refinements and finite systems.
//!
//! A [`FiniteSystem`] carries the cell-transition matrix
//! `Q[a][i] = k·μ(A_a ∩ T⁻¹A_i)`: row `a` is the source cell, column `i` the
//! cell it lands in. For a permutation system with forward cell map `τ` this
//! puts a `1` at `(a, τ(a))`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::perm::Permutation;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    k: usize,
    labels: Vec<String>,
}

impl Partition {
    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyPartition);
        }
        let distinct: HashSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidPartition("cell labels must be distinct".into()));
        }
        Ok(Self {
            k: labels.len(),
            labels,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Always `1/k`.
    pub fn cell_mass(&self) -> Rational {
        Rational::ratio(1, self.k as i64)
    }
}

/// Uniform partition with labels `"0"..="k-1"`.
pub fn make_uniform_partition(k: usize) -> Result<Partition> {
    if k == 0 {
        return Err(Error::EmptyPartition);
    }
    Partition::with_labels((0..k).map(|i| i.to_string()).collect())
}

/// Block refinement: every coarse cell splits into `factor` consecutive fine cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementMap {
    coarse: Partition,
    fine: Partition,
    factor: usize,
}

impl RefinementMap {
    pub fn coarse(&self) -> &Partition {
        &self.coarse
    }

    pub fn fine(&self) -> &Partition {
        &self.fine
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    #[inline]
    pub fn parent(&self, fine_cell: usize) -> usize {
        fine_cell / self.factor
    }

    pub fn parents(&self) -> Vec<usize> {
        (0..self.fine.k).map(|u| self.parent(u)).collect()
    }

    pub fn children(&self, coarse_cell: usize) -> std::ops::Range<usize> {
        coarse_cell * self.factor..(coarse_cell + 1) * self.factor
    }
}

pub fn refine(p: &Partition, r: usize) -> Result<(Partition, RefinementMap)> {
    if r == 0 {
        return Err(Error::InvalidParameter("refinement factor must be ≥ 1".into()));
    }
    let labels = if r == 1 {
        p.labels.clone()
    } else {
        p.labels
            .iter()
            .flat_map(|l| (0..r).map(move |c| format!("{l}.{c}")))
            .collect()
    };
    let fine = Partition::with_labels(labels)?;
    let map = RefinementMap {
        coarse: p.clone(),
        fine: fine.clone(),
        factor: r,
    };
    Ok((fine, map))
}

/// A measure-preserving map seen at resolution `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSystem<S = Rational> {
    partition: Partition,
    q: Matrix<S>,
    exact: bool,
    cell_map: Option<Permutation>,
}

impl<S: Scalar> FiniteSystem<S> {
    /// Validated constructor; the exactness flag is derived from `q`.
    pub fn new(partition: Partition, q: Matrix<S>) -> Result<Self> {
        let sys = Self::from_parts_unchecked(partition, q);
        let diagnostics = validate_system(&sys);
        if let Some(d) = diagnostics.first() {
            return Err(Error::NotDoublyStochastic(format!(
                "{} ({} violation(s))",
                d,
                diagnostics.len()
            )));
        }
        Ok(sys)
    }

    /// Builds the system without checking invariants; see [`validate_system`].
    pub fn from_parts_unchecked(partition: Partition, q: Matrix<S>) -> Self {
        let cell_map = permutation_of(&q);
        Self {
            partition,
            exact: cell_map.is_some(),
            cell_map,
            q,
        }
    }

    /// Exact system whose forward cell map is `tau`.
    pub fn from_cell_map(tau: &Permutation) -> Result<Self> {
        let k = tau.len();
        let partition = make_uniform_partition(k)?;
        let q = Matrix::from_fn(k, k, |a, i| {
            if tau.apply(a) == i {
                S::one()
            } else {
                S::zero()
            }
        });
        Ok(Self {
            partition,
            q,
            exact: true,
            cell_map: Some(tau.clone()),
        })
    }

    pub fn with_partition(mut self, partition: Partition) -> Result<Self> {
        if partition.k() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                found: partition.k(),
            });
        }
        self.partition = partition;
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.partition.k
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn q(&self) -> &Matrix<S> {
        &self.q
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Forward cell map `τ` of an exact system.
    pub fn cell_map(&self) -> Option<&Permutation> {
        self.cell_map.as_ref()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k(),
            "exact": self.exact,
            "Q": self.q.to_json_rows(),
            "labels": self.partition.labels(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let k = v
            .get("k")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("system JSON needs integer \"k\"".into()))?
            as usize;
        let q = Matrix::from_json_rows(
            v.get("Q")
                .ok_or_else(|| Error::Parse("system JSON needs \"Q\"".into()))?,
        )?;
        if q.rows() != k || q.cols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: q.rows().max(q.cols()),
            });
        }
        let partition = match v.get("labels") {
            None | Some(Value::Null) => make_uniform_partition(k)?,
            Some(raw) => Partition::with_labels(
                serde_json::from_value(raw.clone())
                    .map_err(|e| Error::Parse(format!("bad \"labels\": {e}")))?,
            )?,
        };
        let sys = Self::new(partition, q)?;
        if let Some(flag) = v.get("exact").and_then(Value::as_bool) {
            if flag != sys.exact {
                return Err(Error::Parse(format!(
                    "\"exact\": {flag} disagrees with Q (permutation matrix: {})",
                    sys.exact
                )));
            }
        }
        Ok(sys)
    }
}

impl FiniteSystem<Rational> {
    pub fn to_float(&self) -> FiniteSystem<f64> {
        self.to_backend()
    }

    /// The same system with entries converted to another backend.
    pub fn to_backend<S: Scalar>(&self) -> FiniteSystem<S> {
        FiniteSystem {
            partition: self.partition.clone(),
            q: self.q.map(S::from_rational),
            exact: self.exact,
            cell_map: self.cell_map.clone(),
        }
    }
}

/// The forward cell map if `q` is a 0/1 permutation matrix.
fn permutation_of<S: Scalar>(q: &Matrix<S>) -> Option<Permutation> {
    if !q.is_square() {
        return None;
    }
    let mut images = Vec::with_capacity(q.rows());
    for a in 0..q.rows() {
        let mut image = None;
        for i in 0..q.cols() {
            let v = q.get(a, i);
            if v.is_one() {
                if image.is_some() {
                    return None;
                }
                image = Some(i);
            } else if !v.is_zero() {
                return None;
            }
        }
        images.push(image?);
    }
    Permutation::new(images).ok()
}

/// `Qⁿ`; for exact systems negative `n` uses `Q⁻¹ = Qᵀ`.
pub fn system_power<S: Scalar>(sys: &FiniteSystem<S>, n: i64) -> Result<FiniteSystem<S>> {
    if n < 0 && !sys.exact {
        return Err(Error::NegativePowerOfStochastic(n));
    }
    if let Some(tau) = &sys.cell_map {
        return FiniteSystem::from_cell_map(&tau.pow(n))?.with_partition(sys.partition.clone());
    }
    let q = sys.q.pow(n as u64)?;
    Ok(FiniteSystem::from_parts_unchecked(sys.partition.clone(), q))
}

/// A named invariant violation reported by [`validate_system`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub detail: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.name, self.detail)
    }
}

pub fn validate_system<S: Scalar>(sys: &FiniteSystem<S>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let k = sys.k();
    let q = &sys.q;
    if q.rows() != k || q.cols() != k {
        out.push(Diagnostic {
            name: "shape".into(),
            detail: format!("Q is {}x{}, partition has {k} cells", q.rows(), q.cols()),
        });
        return out;
    }
    for a in 0..k {
        for i in 0..k {
            let v = q.get(a, i);
            if v.is_negative() {
                out.push(Diagnostic {
                    name: format!("negative_entry({a},{i})"),
                    detail: format!("{v:?}"),
                });
            }
            if sys.exact && !(v.is_zero() || v.is_one()) {
                out.push(Diagnostic {
                    name: format!("exact_entry({a},{i})"),
                    detail: format!("{v:?} is neither 0 nor 1"),
                });
            }
        }
    }
    for (i, s) in q.row_sums().into_iter().enumerate() {
        if !S::negligible(&(s.clone() - S::one())) {
            out.push(Diagnostic {
                name: format!("row_sum({i})"),
                detail: format!("{:.17}", s.to_f64()),
            });
        }
    }
    for (j, s) in q.col_sums().into_iter().enumerate() {
        if !S::negligible(&(s.clone() - S::one())) {
            out.push(Diagnostic {
                name: format!("col_sum({j})"),
                detail: format!("{:.17}", s.to_f64()),
            });
        }
    }
    if sys.exact != permutation_of(q).is_some() {
        out.push(Diagnostic {
            name: "exact_flag".into(),
            detail: "exact flag disagrees with Q".into(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{bernoulli_system, rotation_system};
    use num_traits::One;

    #[test]
    fn uniform_partitions() {
        assert_eq!(make_uniform_partition(0), Err(Error::EmptyPartition));
        let p = make_uniform_partition(1).unwrap();
        assert_eq!(p.cell_mass(), Rational::one());
        let p = make_uniform_partition(4).unwrap();
        assert_eq!(p.cell_mass(), Rational::ratio(1, 4));
        assert_eq!(p.labels(), &["0", "1", "2", "3"]);
        let p = make_uniform_partition(6).unwrap();
        assert!((p.cell_mass() * Rational::from_usize(6)).is_one());
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(Partition::with_labels(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn refinement_layout() {
        let p = make_uniform_partition(2).unwrap();
        let (fine, map) = refine(&p, 1).unwrap();
        assert_eq!(fine.k(), 2);
        assert_eq!(map.parents(), vec![0, 1]);
        let (fine, map) = refine(&p, 3).unwrap();
        assert_eq!(fine.k(), 6);
        assert_eq!(map.parents(), vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(map.children(1), 3..6);
        assert!(refine(&p, 0).is_err());
    }

    #[test]
    fn powers() {
        let rot = rotation_system(5, 2).unwrap();
        assert!(system_power(&rot, 5).unwrap().q().entries() == Matrix::<Rational>::identity(5).entries());
        assert_eq!(*system_power(&rot, 0).unwrap().q(), Matrix::identity(5));
        let inv = system_power(&rot, -1).unwrap();
        assert_eq!(*inv.q(), rot.q().transpose());

        let bern = bernoulli_system(2, 3).unwrap();
        assert_eq!(
            system_power(&bern, -1),
            Err(Error::NegativePowerOfStochastic(-1))
        );
        assert_eq!(*system_power(&bern, 0).unwrap().q(), Matrix::identity(8));
        let cubed = system_power(&bern, 3).unwrap();
        assert!(cubed.q().entries().iter().all(|x| *x == Rational::ratio(1, 8)));
        assert!(!cubed.is_exact());
    }

    #[test]
    fn validation() {
        let rot = rotation_system(4, 1).unwrap();
        assert!(validate_system(&rot).is_empty());
        assert!(validate_system(&bernoulli_system(2, 2).unwrap()).is_empty());

        let q = Matrix::from_rows(vec![vec![0.5, 0.4], vec![0.5, 0.6]]).unwrap();
        let bad = FiniteSystem::from_parts_unchecked(make_uniform_partition(2).unwrap(), q.clone());
        let names: Vec<_> = validate_system(&bad).into_iter().map(|d| d.name).collect();
        assert!(names.contains(&"row_sum(0)".to_string()), "{names:?}");
        assert!(names.contains(&"row_sum(1)".to_string()));
        assert!(FiniteSystem::new(make_uniform_partition(2).unwrap(), q).is_err());
    }

    #[test]
    fn json_round_trip() {
        let bern = bernoulli_system(2, 2).unwrap();
        let v = bern.to_json();
        assert_eq!(v["Q"][0][0], "1/2");
        assert_eq!(FiniteSystem::<Rational>::from_json(&v).unwrap(), bern);
        let mut tampered = v.clone();
        tampered["exact"] = Value::Bool(true);
        assert!(FiniteSystem::<Rational>::from_json(&tampered).is_err());
        let rot = rotation_system(3, 1).unwrap().to_float();
        let back = FiniteSystem::<f64>::from_json(&rot.to_json()).unwrap();
        assert!(back.is_exact());
    }
}
