use lens_core::coupling::graph_coupling;
use lens_core::scalar::format_rational;
use lens_core::zoo::SystemSpec;
use lens_core::{fixed_point_space, product_coupling, FiniteSystem, Matrix, Permutation, Rational};
use num_traits::Zero;

use super::{finite_system, size_guard};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{ExperimentReport, Series};

/// Same limit as the nullspace solver (`k²` unknowns).
const MAX_K: usize = lens_core::lens::FIXED_SPACE_MAX_K;

pub(super) struct Plan {
    spec: SystemSpec,
    sys: FiniteSystem,
    expected: Option<usize>,
}

pub(super) fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let (spec, sys) = finite_system(cfg)?;
    if sys.k() > MAX_K {
        return Err(size_guard(format!("fixed-point solve needs k ≤ {MAX_K}, system has k = {}", sys.k())));
    }
    let expected = match cfg.param("expected_dimension") {
        None | Some("") => None,
        Some(_) => Some(cfg.parse_param("expected_dimension", 0usize)?),
    };
    Ok(Plan { spec, sys, expected })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `M[i][j]` depends only on `j − i mod k`.
fn is_circulant(m: &Matrix<Rational>) -> bool {
    let k = m.rows();
    (0..k).all(|i| (0..k).all(|j| m.get(i, j) == m.get((i + 1) % k, (j + 1) % k)))
}

/// Zero marginals and `QᵀBQ = B`, checked with a dense product.
fn is_fixed_direction(sys: &FiniteSystem, b: &Matrix<Rational>) -> Result<bool> {
    let q = sys.q();
    let image = q.transpose().mul(b)?.mul(q)?;
    let zero = |v: Vec<Rational>| v.iter().all(Zero::is_zero);
    Ok(image == *b && zero(b.row_sums()) && zero(b.col_sums()))
}

pub(super) fn execute(_cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    let sys = &plan.sys;
    let k = sys.k();
    let space = fixed_point_space(sys)?;
    let mut series = Series::new(&["index", "i", "j", "value"]);
    for (idx, b) in space.basis.iter().enumerate() {
        for (i, j, v) in b.nonzeros() {
            series.push(vec![idx.to_string(), i.to_string(), j.to_string(), format_rational(&v)]);
        }
    }
    report.add_series("basis", series);
    report.scalar("k", k);
    report.scalar("dimension", space.dimension);

    let mut directions_ok = true;
    for b in &space.basis {
        directions_ok &= is_fixed_direction(sys, b)?;
    }
    report.verdict(
        "basis_directions_are_fixed",
        directions_ok,
        "each basis matrix B has zero marginals and QᵀBQ = B (dense check)",
    );
    let product_in = space.affine_hull_contains(&product_coupling(k)?)?;
    report.verdict("product_coupling_in_hull", product_in, "the product coupling is a fixed point");
    if let Some(tau) = sys.cell_map() {
        // Graph couplings of maps commuting with τ are self-joinings.
        let mut graphs_in = true;
        for s in [Permutation::identity(k), tau.clone(), tau.inverse()] {
            graphs_in &= space.affine_hull_contains(&graph_coupling(&s)?)?;
        }
        report.verdict(
            "commuting_graphs_in_hull",
            graphs_in,
            "Δ_Id, Δ_τ and Δ_τ⁻¹ lie in the fixed space",
        );
    }
    if let SystemSpec::Rotation { k, s } = plan.spec {
        if gcd(k, s) == 1 {
            let circulant = space.basis.iter().all(is_circulant);
            report.verdict(
                "rotation_fixed_space_is_circulant",
                space.dimension == k - 1 && circulant,
                format!("dimension {} (expected k − 1 = {}), every basis matrix circulant", space.dimension, k - 1),
            );
        }
    }
    if let SystemSpec::Bernoulli { .. } = plan.spec {
        report.verdict(
            "bernoulli_fixed_space_is_product_only",
            space.dimension == 0,
            format!("dimension {} (expected 0: the step lens has a rank-one power)", space.dimension),
        );
    }
    if let Some(expected) = plan.expected {
        report.verdict(
            "expected_dimension",
            space.dimension == expected,
            format!("dimension {} against expected {expected}", space.dimension),
        );
    }
    Ok(())
}
