//! The conjugation lens `T̃` and the one-sided map `t_T` at finite resolution.
//!
//! With the cell-transition matrix `Q` of [`FiniteSystem`]:
//!
//! * `T̃(C) = QᵀCQ`, i.e. `T̃ρ(A_i × A_j) = ρ(T⁻¹A_i × T⁻¹A_j)`;
//! * `t_T(C) = QᵀC`, i.e. `t_Tρ(A_i × A_j) = ρ(T⁻¹A_i × A_j)`.
//!
//! For a permutation system with forward cell map `τ` the lens relabels,
//! `T̃(C)[τ(a)][τ(b)] = C[a][b]`, and sends the graph coupling `Δ_σ` to
//! `Δ_{τστ⁻¹}`. For stochastic `Q` the formula evaluates the lens on step
//! couplings (uniform within cell rectangles) and is forward-only.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coupling::{
    check_k, coupling_distance, product_coupling, repair_to_polytope, CouplingMatrix,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::partition::FiniteSystem;
use crate::scalar::{Rational, Scalar};

/// Largest resolution accepted by [`fixed_point_space`] (`k²` unknowns).
pub const FIXED_SPACE_MAX_K: usize = 64;

/// Default residual tolerance for float fixed-point and period checks.
pub const FLOAT_RESIDUAL_TOL: f64 = 1e-9;

pub fn lens_step<S: Scalar>(sys: &FiniteSystem<S>, c: &CouplingMatrix<S>) -> Result<CouplingMatrix<S>> {
    check_k(sys.k(), c.k())?;
    if let Some(tau) = sys.cell_map() {
        let k = c.k();
        let mut out = Matrix::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                out.set(tau.apply(a), tau.apply(b), c.get(a, b).clone());
            }
        }
        return Ok(CouplingMatrix::from_matrix_unchecked(out));
    }
    let nz = sys.q().nonzeros();
    let right = right_multiply(c.matrix(), &nz);
    Ok(CouplingMatrix::from_matrix_unchecked(left_multiply_transpose(&right, &nz)))
}

/// `QCQᵀ`, the inverse of [`lens_step`] for exact systems.
pub fn lens_step_inverse<S: Scalar>(
    sys: &FiniteSystem<S>,
    c: &CouplingMatrix<S>,
) -> Result<CouplingMatrix<S>> {
    check_k(sys.k(), c.k())?;
    let tau = sys.cell_map().ok_or(Error::NotExact)?;
    let k = c.k();
    let out = Matrix::from_fn(k, k, |a, b| c.get(tau.apply(a), tau.apply(b)).clone());
    Ok(CouplingMatrix::from_matrix_unchecked(out))
}

/// `QᵀC`: rows are transported, columns stay.
pub fn one_sided_step<S: Scalar>(
    sys: &FiniteSystem<S>,
    c: &CouplingMatrix<S>,
) -> Result<CouplingMatrix<S>> {
    check_k(sys.k(), c.k())?;
    let nz = sys.q().nonzeros();
    Ok(CouplingMatrix::from_matrix_unchecked(left_multiply_transpose(c.matrix(), &nz)))
}

/// `M·Q` using the nonzeros of `Q`.
fn right_multiply<S: Scalar>(m: &Matrix<S>, q_nz: &[(usize, usize, S)]) -> Matrix<S> {
    let k = m.rows();
    let mut out = Matrix::<S>::zeros(k, m.cols());
    for (b, j, q) in q_nz {
        for a in 0..k {
            let x = m.get(a, *b);
            if x.is_zero() {
                continue;
            }
            let term = if q.is_one() { x.clone() } else { x.clone() * q.clone() };
            let cur = out.get(a, *j).clone();
            out.set(a, *j, cur + term);
        }
    }
    out
}

/// `Qᵀ·M` using the nonzeros of `Q`.
fn left_multiply_transpose<S: Scalar>(m: &Matrix<S>, q_nz: &[(usize, usize, S)]) -> Matrix<S> {
    let cols = m.cols();
    let mut out = Matrix::<S>::zeros(m.rows(), cols);
    for (a, i, q) in q_nz {
        for j in 0..cols {
            let x = m.get(*a, j);
            if x.is_zero() {
                continue;
            }
            let term = if q.is_one() { x.clone() } else { q.clone() * x.clone() };
            let cur = out.get(*i, j).clone();
            out.set(*i, j, cur + term);
        }
    }
    out
}

/// Backend-specific cleanup applied after each orbit step.
pub trait DriftRepair: Scalar {
    /// Returns the repaired coupling and the marginal deviation it started from.
    fn repair_drift(c: CouplingMatrix<Self>) -> Result<(CouplingMatrix<Self>, f64)>;
}

impl DriftRepair for Rational {
    fn repair_drift(c: CouplingMatrix<Self>) -> Result<(CouplingMatrix<Self>, f64)> {
        Ok((c, 0.0))
    }
}

/// Float drift larger than this is treated as a bug, not roundoff.
const FLOAT_DRIFT_LIMIT: f64 = 1e-9;

impl DriftRepair for f64 {
    fn repair_drift(c: CouplingMatrix<Self>) -> Result<(CouplingMatrix<Self>, f64)> {
        let dev = c.marginal_deviation();
        let negative = c.matrix().entries().iter().any(|x| *x < 0.0);
        if dev < crate::coupling::REPAIR_TARGET && !negative {
            return Ok((c, dev));
        }
        let (fixed, log) = repair_to_polytope(c.matrix(), FLOAT_DRIFT_LIMIT)?;
        Ok((fixed, log.initial_deviation))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitMode {
    TwoSided,
    OneSided,
}

#[derive(Clone, Debug)]
pub struct LensOrbit<S = Rational> {
    pub system: FiniteSystem<S>,
    pub mode: OrbitMode,
    /// `states[0]` is the initial coupling.
    pub states: Vec<CouplingMatrix<S>>,
    /// Marginal deviation found (and repaired) before each stored step; zero for rationals.
    pub repair_residuals: Vec<f64>,
}

impl<S: Scalar> LensOrbit<S> {
    pub fn initial(&self) -> &CouplingMatrix<S> {
        &self.states[0]
    }

    /// Number of steps taken (`states.len() − 1`).
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    /// CSV with columns `n,residual_to_fixed,distance_to_initial,distance_to_product`.
    pub fn to_csv(&self) -> Result<String> {
        let product = product_coupling::<S>(self.system.k())?;
        let mut out = String::from("n,residual_to_fixed,distance_to_initial,distance_to_product\n");
        for (n, state) in self.states.iter().enumerate() {
            let residual = self_joining_residual(&self.system, state)?;
            let to_initial = coupling_distance(state, self.initial())?;
            let to_product = coupling_distance(state, &product)?;
            let _ = writeln!(
                out,
                "{n},{:e},{:e},{:e}",
                residual.to_f64(),
                to_initial.to_f64(),
                to_product.to_f64()
            );
        }
        Ok(out)
    }
}

pub fn step<S: Scalar>(
    sys: &FiniteSystem<S>,
    c: &CouplingMatrix<S>,
    mode: OrbitMode,
) -> Result<CouplingMatrix<S>> {
    match mode {
        OrbitMode::TwoSided => lens_step(sys, c),
        OrbitMode::OneSided => one_sided_step(sys, c),
    }
}

/// `N` steps from `initial`; the orbit holds `N + 1` states.
pub fn orbit<S: DriftRepair>(
    sys: &FiniteSystem<S>,
    initial: &CouplingMatrix<S>,
    steps: usize,
    mode: OrbitMode,
) -> Result<LensOrbit<S>> {
    check_k(sys.k(), initial.k())?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut repair_residuals = Vec::with_capacity(steps);
    states.push(initial.clone());
    for _ in 0..steps {
        let next = step(sys, states.last().unwrap(), mode)?;
        let (next, residual) = S::repair_drift(next)?;
        repair_residuals.push(residual);
        states.push(next);
    }
    Ok(LensOrbit {
        system: sys.clone(),
        mode,
        states,
        repair_residuals,
    })
}

/// `(1/N)·Σ_{n=1..N} states[n]` of a two-sided orbit.
pub fn cesaro_average<S: Scalar>(orbit: &LensOrbit<S>, n: usize) -> Result<CouplingMatrix<S>> {
    if orbit.mode != OrbitMode::TwoSided {
        return Err(Error::InvalidParameter(
            "Cesàro barycenters are taken along two-sided lens orbits".into(),
        ));
    }
    if n == 0 || n > orbit.steps() {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ N ≤ {} (orbit steps), got N = {n}",
            orbit.steps()
        )));
    }
    let k = orbit.system.k();
    let mut sum = Matrix::zeros(k, k);
    for state in &orbit.states[1..=n] {
        sum = sum.add(state.matrix())?;
    }
    Ok(CouplingMatrix::from_matrix_unchecked(
        sum.scale(&S::ratio(1, n as i64)),
    ))
}

/// `‖QᵀCQ − C‖₁`; zero exactly on self-joinings.
pub fn self_joining_residual<S: Scalar>(sys: &FiniteSystem<S>, c: &CouplingMatrix<S>) -> Result<S> {
    coupling_distance(&lens_step(sys, c)?, c)
}

/// Affine description of the lens-fixed couplings `{C : QᵀCQ = C}`.
#[derive(Clone, Debug)]
pub struct FixedPointSpace {
    pub k: usize,
    /// Dimension of the affine hull.
    pub dimension: usize,
    /// Basis of the direction space (each matrix has zero row and column sums).
    pub basis: Vec<Matrix<Rational>>,
    /// A strictly positive fixed coupling (the product coupling).
    pub interior: CouplingMatrix<Rational>,
}

impl FixedPointSpace {
    /// Whether `c` lies in the affine hull spanned by `interior + span(basis)`.
    pub fn affine_hull_contains(&self, c: &CouplingMatrix<Rational>) -> Result<bool> {
        check_k(self.k, c.k())?;
        let diff = c.matrix().sub(self.interior.matrix())?;
        let mut rows: Vec<Vec<Rational>> = self.basis.iter().map(|b| b.entries().to_vec()).collect();
        let before = linalg::rank(rows.clone(), self.k * self.k);
        rows.push(diff.entries().to_vec());
        Ok(linalg::rank(rows, self.k * self.k) == before)
    }
}

/// Solves the `k²`-unknown linear system for the lens-fixed couplings.
///
/// The product coupling is a strictly positive solution, so the polytope of
/// fixed couplings has the same affine hull as the linear solution set.
pub fn fixed_point_space(sys: &FiniteSystem<Rational>) -> Result<FixedPointSpace> {
    let k = sys.k();
    if k > FIXED_SPACE_MAX_K {
        return Err(Error::SizeGuard {
            what: "k",
            value: k,
            limit: FIXED_SPACE_MAX_K,
        });
    }
    let n = k * k;
    let var = |a: usize, b: usize| a * k + b;
    // Column i of Q as (a, Q[a][i]) pairs.
    let mut q_cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); k];
    for (a, i, q) in sys.q().nonzeros() {
        q_cols[i].push((a, q));
    }
    let mut rows = Vec::with_capacity(n + 2 * k);
    for i in 0..k {
        for j in 0..k {
            let mut row = vec![Rational::zero(); n];
            for (a, qa) in &q_cols[i] {
                for (b, qb) in &q_cols[j] {
                    row[var(*a, *b)] += qa * qb;
                }
            }
            row[var(i, j)] -= Rational::one();
            rows.push(row);
        }
    }
    for a in 0..k {
        let mut row_sum = vec![Rational::zero(); n];
        let mut col_sum = vec![Rational::zero(); n];
        for b in 0..k {
            row_sum[var(a, b)] = Rational::one();
            col_sum[var(b, a)] = Rational::one();
        }
        rows.push(row_sum);
        rows.push(col_sum);
    }
    let basis: Vec<Matrix<Rational>> = linalg::nullspace(rows, n)
        .into_iter()
        .map(|v| Matrix::from_fn(k, k, |a, b| v[var(a, b)].clone()))
        .collect();
    Ok(FixedPointSpace {
        k,
        dimension: basis.len(),
        basis,
        interior: product_coupling(k)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    /// Least `p ≤ maxp` with residual `≤ tol`.
    pub period: Option<usize>,
    /// `(p, ‖T̃ᵖC − C‖₁)` for `p = 1..=maxp`.
    pub residual_by_p: Vec<(usize, f64)>,
}

pub fn detect_period<S: Scalar>(
    sys: &FiniteSystem<S>,
    c: &CouplingMatrix<S>,
    maxp: usize,
    tol: f64,
) -> Result<PeriodReport> {
    if maxp == 0 {
        return Err(Error::InvalidParameter("maxp must be ≥ 1".into()));
    }
    check_k(sys.k(), c.k())?;
    let tol = S::from_f64(tol);
    let mut period = None;
    let mut residual_by_p = Vec::with_capacity(maxp);
    let mut state = c.clone();
    for p in 1..=maxp {
        state = lens_step(sys, &state)?;
        let residual = coupling_distance(&state, c)?;
        if period.is_none() && residual <= tol {
            period = Some(p);
        }
        residual_by_p.push((p, residual.to_f64()));
    }
    Ok(PeriodReport {
        period,
        residual_by_p,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitStatistics {
    pub window: usize,
    /// Fraction of hits inside each consecutive window (the last may be short).
    pub window_density: Vec<f64>,
    /// Fraction of hits among `states[0..end]` at the end of each window.
    pub cumulative_density: Vec<f64>,
    /// Fraction of hits after the first window.
    pub tail_density: f64,
    pub overall_density: f64,
}

pub fn quasi_attractor_hits<S: Scalar>(
    orbit: &LensOrbit<S>,
    target: impl Fn(&CouplingMatrix<S>) -> bool,
    window: usize,
) -> Result<HitStatistics> {
    if window == 0 {
        return Err(Error::InvalidParameter("window must be ≥ 1".into()));
    }
    let hits: Vec<bool> = orbit.states.iter().map(&target).collect();
    let mut window_density = Vec::new();
    let mut cumulative_density = Vec::new();
    let mut total = 0usize;
    for (w, chunk) in hits.chunks(window).enumerate() {
        let h = chunk.iter().filter(|x| **x).count();
        total += h;
        window_density.push(h as f64 / chunk.len() as f64);
        let seen = (w * window + chunk.len()) as f64;
        cumulative_density.push(total as f64 / seen);
    }
    let tail = &hits[window.min(hits.len())..];
    let tail_density = if tail.is_empty() {
        0.0
    } else {
        tail.iter().filter(|x| **x).count() as f64 / tail.len() as f64
    };
    Ok(HitStatistics {
        window,
        window_density,
        cumulative_density,
        tail_density,
        overall_density: total as f64 / hits.len() as f64,
    })
}
