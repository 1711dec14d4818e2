use lens_core::lens::DriftRepair;
use lens_core::zoo::SystemSpec;
use lens_core::{FiniteSystem, Matrix, Scalar};

use super::{at_most, finite_system, fmt_scalar, invalid};
use crate::config::{Backend, ExperimentConfig};
use crate::error::Result;
use crate::report::{ExperimentReport, Series};

pub(super) struct Plan {
    spec: SystemSpec,
    sys: FiniteSystem,
    n_max: u64,
}

pub(super) fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let (spec, sys) = finite_system(cfg)?;
    let n_max = cfg.parse_param("N", 8u64)?;
    if n_max > 10_000 {
        return Err(invalid("N must be at most 10000"));
    }
    Ok(Plan { spec, sys, n_max })
}

pub(super) fn execute(cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    match cfg.backend {
        Backend::Rational => go(plan, &plan.sys, report),
        Backend::Float => go(plan, &plan.sys.to_float(), report),
    }
}

/// `max_{i,j} |Qⁿ[i][j]/k − 1/k²|`, i.e. the distance of `μ(A_i ∩ T⁻ⁿA_j)`
/// from independence.
fn residual<S: Scalar>(qn: &Matrix<S>) -> S {
    let k = qn.rows() as i64;
    let target = S::ratio(1, k * k);
    let scale = S::ratio(1, k);
    qn.entries()
        .iter()
        .map(|q| (q.clone() * scale.clone() - target.clone()).abs())
        .fold(S::zero(), |m, x| if x > m { x } else { m })
}

fn go<S: DriftRepair>(plan: &Plan, sys: &FiniteSystem<S>, report: &mut ExperimentReport) -> Result<()> {
    let k = sys.k();
    let mut qn = Matrix::<S>::identity(k);
    let mut series = Series::new(&["n", "residual"]);
    let bound = S::ratio(1, k as i64) - S::ratio(1, (k * k) as i64);
    let mut bounded = true;
    let mut first_independent = None;
    let mut residuals = Vec::new();
    for n in 0..=plan.n_max {
        if n > 0 {
            qn = qn.mul(sys.q())?;
        }
        let r = residual(&qn);
        bounded &= at_most(&r, &bound);
        if first_independent.is_none() && at_most(&r, &S::zero()) {
            first_independent = Some(n);
        }
        series.push(vec![n.to_string(), fmt_scalar(&r)]);
        residuals.push(r);
    }
    report.add_series("residual", series);
    report.scalar("k", k);
    report.scalar(
        "first_independent_n",
        first_independent.map_or(serde_json::Value::Null, |n| n.into()),
    );
    report.verdict(
        "residual_within_trivial_bound",
        bounded,
        format!("every residual ≤ 1/k − 1/k² = {}", fmt_scalar(&bound)),
    );
    if let SystemSpec::Bernoulli { len, .. } = plan.spec {
        let exact = residuals.iter().skip(len).all(|r| at_most(r, &S::zero()));
        report.verdict(
            "bernoulli_independent_from_n_equal_L",
            exact,
            format!("residual is 0 for L = {len} ≤ n ≤ {}", plan.n_max),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use lens_core::zoo::rotation_system;
    use lens_core::Rational;

    #[test]
    fn rotation_is_never_independent() {
        let sys = rotation_system(4, 1).unwrap();
        assert_eq!(residual(sys.q()), Rational::ratio(3, 16));
    }
}
