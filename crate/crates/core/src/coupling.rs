//! Couplings at finite resolution.
//!
//! A [`CouplingMatrix`] `C` on `k` equal cells stores `C[i][j] = ρ(A_i × A_j)`.
//! Both marginals are uniform, so `k·C` is doubly stochastic and the set of
//! couplings is the scaled Birkhoff polytope `(1/k)·B_k`.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::partition::RefinementMap;
use crate::perm::Permutation;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix<S = Rational> {
    c: Matrix<S>,
}

impl<S: Scalar> CouplingMatrix<S> {
    /// Checks nonnegativity and that every marginal equals `1/k`.
    pub fn new(c: Matrix<S>) -> Result<Self> {
        if !c.is_square() || c.rows() == 0 {
            return Err(Error::NotACoupling(format!(
                "expected a nonempty square matrix, got {}x{}",
                c.rows(),
                c.cols()
            )));
        }
        let coupling = Self { c };
        if let Some(violation) = coupling.first_violation() {
            return Err(Error::NotACoupling(violation));
        }
        Ok(coupling)
    }

    pub(crate) fn from_matrix_unchecked(c: Matrix<S>) -> Self {
        debug_assert!(c.is_square());
        Self { c }
    }

    fn first_violation(&self) -> Option<String> {
        let k = self.k();
        let target = S::ratio(1, k as i64);
        let floor = S::from_f64(-S::SUM_TOLERANCE);
        for i in 0..k {
            for j in 0..k {
                if *self.c.get(i, j) < floor {
                    return Some(format!("negative entry at ({i},{j})"));
                }
            }
        }
        for (i, s) in self.c.row_sums().into_iter().enumerate() {
            if !S::negligible(&(s.clone() - target.clone())) {
                return Some(format!("row {i} sums to {:.17}", s.to_f64()));
            }
        }
        for (j, s) in self.c.col_sums().into_iter().enumerate() {
            if !S::negligible(&(s.clone() - target.clone())) {
                return Some(format!("column {j} sums to {:.17}", s.to_f64()));
            }
        }
        None
    }

    /// Whether all invariants hold (exactly for rationals).
    pub fn is_valid(&self) -> bool {
        self.first_violation().is_none()
    }

    /// Largest deviation of a row or column sum from `1/k`.
    pub fn marginal_deviation(&self) -> S {
        let target = S::ratio(1, self.k() as i64);
        self.c
            .row_sums()
            .into_iter()
            .chain(self.c.col_sums())
            .map(|s| (s - target.clone()).abs())
            .fold(S::zero(), |a, b| if b > a { b } else { a })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.c.rows()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.c
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.c
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &S {
        self.c.get(i, j)
    }

    /// `a·self + (1−a)·other`.
    pub fn mix(&self, a: &S, other: &Self) -> Result<Self> {
        let b = S::one() - a.clone();
        let c = self.c.scale(a).add(&other.c.scale(&b))?;
        Ok(Self::from_matrix_unchecked(c))
    }

    /// `ρ(⋃ A_i × A_j)` over the given index sets.
    pub fn mass_on(&self, rows: &[usize], cols: &[usize]) -> S {
        let mut acc = S::zero();
        for &i in rows {
            for &j in cols {
                acc = acc + self.c.get(i, j).clone();
            }
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        json!({ "k": self.k(), "C": self.c.to_json_rows() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let k = v
            .get("k")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("coupling JSON needs integer \"k\"".into()))?
            as usize;
        let c = Matrix::from_json_rows(
            v.get("C")
                .ok_or_else(|| Error::Parse("coupling JSON needs \"C\"".into()))?,
        )?;
        if c.rows() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: c.rows(),
            });
        }
        Self::new(c)
    }

    /// Long-format CSV with header `i,j,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,value\n");
        for i in 0..self.k() {
            for j in 0..self.k() {
                let cell = match self.c.get(i, j).to_json() {
                    Value::String(s) => s,
                    other => other.to_string(),
                };
                let _ = writeln!(out, "{i},{j},{cell}");
            }
        }
        out
    }
}

impl CouplingMatrix<Rational> {
    pub fn to_float(&self) -> CouplingMatrix<f64> {
        self.to_backend()
    }

    pub fn to_backend<S: Scalar>(&self) -> CouplingMatrix<S> {
        CouplingMatrix::from_matrix_unchecked(self.c.map(S::from_rational))
    }
}

/// `μ⊗μ`: every entry `1/k²`.
pub fn product_coupling<S: Scalar>(k: usize) -> Result<CouplingMatrix<S>> {
    if k == 0 {
        return Err(Error::EmptyPartition);
    }
    let v = S::ratio(1, (k * k) as i64);
    Ok(CouplingMatrix::from_matrix_unchecked(Matrix::filled(k, k, v)))
}

/// Graph coupling `Δ_σ` of the forward cell map `σ`: mass `1/k` at `(σ(j), j)`.
pub fn graph_coupling<S: Scalar>(sigma: &Permutation) -> Result<CouplingMatrix<S>> {
    let k = sigma.len();
    if k == 0 {
        return Err(Error::EmptyPartition);
    }
    let v = S::ratio(1, k as i64);
    let mut c = Matrix::zeros(k, k);
    for j in 0..k {
        c.set(sigma.apply(j), j, v.clone());
    }
    Ok(CouplingMatrix::from_matrix_unchecked(c))
}

/// Recovers `σ` when `c` is a graph coupling, else `None`.
pub fn as_graph_coupling<S: Scalar>(c: &CouplingMatrix<S>) -> Option<Permutation> {
    let k = c.k();
    let mass = S::ratio(1, k as i64);
    let mut images = vec![usize::MAX; k];
    for i in 0..k {
        for j in 0..k {
            let v = c.get(i, j);
            if v.is_zero() {
                continue;
            }
            if *v != mass || images[j] != usize::MAX {
                return None;
            }
            images[j] = i;
        }
    }
    Permutation::new(images).ok()
}

/// Markov-operator composition `J_{ρ₁∘ρ₂} = J_{ρ₁}∘J_{ρ₂}` at cell level: `k·C₁·C₂`.
pub fn markov_compose<S: Scalar>(
    first: &CouplingMatrix<S>,
    second: &CouplingMatrix<S>,
) -> Result<CouplingMatrix<S>> {
    check_k(first.k(), second.k())?;
    let prod = first.c.mul(&second.c)?.scale(&S::from_usize(first.k()));
    Ok(CouplingMatrix::from_matrix_unchecked(prod))
}

/// Relatively independent lift along a block refinement.
pub fn lift_coupling<S: Scalar>(
    coarse: &CouplingMatrix<S>,
    refinement: &RefinementMap,
) -> Result<CouplingMatrix<S>> {
    check_k(refinement.coarse().k(), coarse.k())?;
    let r = refinement.factor();
    let inv_r2 = S::ratio(1, (r * r) as i64);
    let kf = refinement.fine().k();
    let fine = Matrix::from_fn(kf, kf, |u, v| {
        coarse
            .get(refinement.parent(u), refinement.parent(v))
            .clone()
            * inv_r2.clone()
    });
    Ok(CouplingMatrix::from_matrix_unchecked(fine))
}

/// Pushforward to the coarse partition: sum over `r×r` blocks.
pub fn restrict_coupling<S: Scalar>(
    fine: &CouplingMatrix<S>,
    refinement: &RefinementMap,
) -> Result<CouplingMatrix<S>> {
    check_k(refinement.fine().k(), fine.k())?;
    let k = refinement.coarse().k();
    let mut coarse = Matrix::<S>::zeros(k, k);
    for u in 0..fine.k() {
        let a = refinement.parent(u);
        for v in 0..fine.k() {
            let x = fine.get(u, v);
            if x.is_zero() {
                continue;
            }
            let b = refinement.parent(v);
            let cur = coarse.get(a, b).clone();
            coarse.set(a, b, cur + x.clone());
        }
    }
    Ok(CouplingMatrix::from_matrix_unchecked(coarse))
}

/// Entrywise L1 distance `Σ|C[i][j] − C'[i][j]|`.
pub fn coupling_distance<S: Scalar>(a: &CouplingMatrix<S>, b: &CouplingMatrix<S>) -> Result<S> {
    check_k(a.k(), b.k())?;
    a.c.l1_distance(&b.c)
}

/// Basic open sets of the coupling space.
#[derive(Clone, Debug, PartialEq)]
pub enum NeighborhoodSpec<S = Rational> {
    /// `|C[i][j] − P[i][j]| < ε` for all `i, j`.
    Entrywise { target: Matrix<S>, epsilon: S },
    /// `|C[i][η(i)] − 1/k| < ε` for all `i`.
    PermutationDiagonal { eta: Permutation, epsilon: S },
}

impl<S: Scalar> NeighborhoodSpec<S> {
    pub fn entrywise(target: Matrix<S>, epsilon: S) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        Ok(Self::Entrywise { target, epsilon })
    }

    pub fn permutation_diagonal(eta: Permutation, epsilon: S) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        Ok(Self::PermutationDiagonal { eta, epsilon })
    }
}

pub fn in_neighborhood<S: Scalar>(c: &CouplingMatrix<S>, spec: &NeighborhoodSpec<S>) -> Result<bool> {
    let k = c.k();
    match spec {
        NeighborhoodSpec::Entrywise { target, epsilon } => {
            check_k(target.rows(), k)?;
            check_k(target.cols(), k)?;
            Ok((0..k).all(|i| {
                (0..k).all(|j| (c.get(i, j).clone() - target.get(i, j).clone()).abs() < *epsilon)
            }))
        }
        NeighborhoodSpec::PermutationDiagonal { eta, epsilon } => {
            check_k(eta.len(), k)?;
            let mass = S::ratio(1, k as i64);
            Ok((0..k).all(|i| (c.get(i, eta.apply(i)).clone() - mass.clone()).abs() < *epsilon))
        }
    }
}

/// Marginal deviation below which [`repair_to_polytope`] stops.
pub const REPAIR_TARGET: f64 = 1e-13;
const REPAIR_MAX_SWEEPS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepairLog {
    pub initial_deviation: f64,
    pub final_deviation: f64,
    pub sweeps: usize,
}

/// Pulls a drifted float matrix back into the polytope by clamping negatives
/// and alternating row/column rescaling.
pub fn repair_to_polytope(m: &Matrix<f64>, tol: f64) -> Result<(CouplingMatrix<f64>, RepairLog)> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::NotRepairable(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let k = m.rows();
    let target = 1.0 / k as f64;
    if let Some(x) = m.entries().iter().find(|x| **x < -tol || !x.is_finite()) {
        return Err(Error::NotRepairable(format!("entry {x} below −tol")));
    }
    let deviation = |m: &Matrix<f64>| {
        m.row_sums()
            .into_iter()
            .chain(m.col_sums())
            .map(|s| (s - target).abs())
            .fold(0.0, f64::max)
    };
    let initial = deviation(m);
    if initial > tol {
        return Err(Error::NotRepairable(format!(
            "marginal deviation {initial:e} exceeds tol {tol:e}"
        )));
    }
    let mut cur = m.map(|x| x.max(0.0));
    let mut sweeps = 0;
    let mut dev = deviation(&cur);
    while dev >= REPAIR_TARGET {
        if sweeps == REPAIR_MAX_SWEEPS {
            return Err(Error::NotRepairable(format!(
                "no convergence after {sweeps} sweeps (deviation {dev:e})"
            )));
        }
        let rows = cur.row_sums();
        if rows.iter().any(|s| *s <= 0.0) {
            return Err(Error::NotRepairable("zero row".into()));
        }
        cur = Matrix::from_fn(k, k, |i, j| cur.get(i, j) * (target / rows[i]));
        let cols = cur.col_sums();
        if cols.iter().any(|s| *s <= 0.0) {
            return Err(Error::NotRepairable("zero column".into()));
        }
        cur = Matrix::from_fn(k, k, |i, j| cur.get(i, j) * (target / cols[j]));
        sweeps += 1;
        dev = deviation(&cur);
    }
    Ok((
        CouplingMatrix::from_matrix_unchecked(cur),
        RepairLog {
            initial_deviation: initial,
            final_deviation: dev,
            sweeps,
        },
    ))
}

pub(crate) fn check_k(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
