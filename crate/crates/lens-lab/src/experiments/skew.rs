use lens_core::scalar::{format_rational, parse_rational};
use lens_core::zoo::{invariant_torus_step, skew_tbar_conjugation, skew_w_step, SystemSpec, TorusPoint};
use lens_core::Rational;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{invalid, parse_system_spec, size_guard};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{ExperimentReport, Series};

/// The orbit period is searched up to this many steps.
const MAX_PERIOD_SEARCH: u64 = 1_000_000;

pub(super) struct Plan {
    start: TorusPoint,
    steps: usize,
    grid: usize,
    alphas: Vec<Rational>,
}

fn parse_rationals(key: &str, raw: &str) -> Result<Vec<Rational>> {
    raw.split(',')
        .map(|x| parse_rational(x.trim()).map_err(|e| invalid(format!("{key}: {e}"))))
        .collect()
}

pub(super) fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let coords = parse_rationals("start", cfg.param("start").unwrap_or("0,1/4,0"))?;
    if coords.len() != 3 {
        return Err(invalid("start needs three coordinates a,b,c"));
    }
    let start = TorusPoint::new(coords)?;
    let steps = cfg.parse_param("N", 4usize)?;
    let grid = cfg.parse_param("grid", 5usize)?;
    if grid == 0 {
        return Err(invalid("grid must be positive"));
    }
    if grid > 12 {
        return Err(size_guard(format!("grid = {grid}: at most 12³ points")));
    }
    if steps > 100_000 {
        return Err(invalid("N must be at most 100000"));
    }
    let alphas = match parse_system_spec(cfg)? {
        Some(SystemSpec::Skew { alpha }) => vec![alpha],
        Some(other) => {
            return Err(invalid(format!("skew-orbit takes a skew:alpha=… system, got {other}")));
        }
        None => parse_rationals("alphas", cfg.param("alphas").unwrap_or("1/7,2/5,3/11"))?,
    };
    Ok(Plan {
        start,
        steps,
        grid,
        alphas,
    })
}

fn grid(g: usize) -> Vec<TorusPoint> {
    let g = g as i64;
    let mut out = Vec::new();
    for x in 0..g {
        for y in 0..g {
            for z in 0..g {
                out.push(TorusPoint::from_ratios(&[(x, g), (y, g), (z, g)]).expect("grid point"));
            }
        }
    }
    out
}

fn fmt_point(p: &TorusPoint) -> Vec<String> {
    p.coords().iter().map(format_rational).collect()
}

pub(super) fn execute(_cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    // Orbit of W from the start point, with the invariant-torus check along the way.
    let a = plan.start.coords()[0].clone();
    let mut orbit = Series::new(&["n", "a", "b", "c"]);
    let mut w = plan.start.clone();
    let mut affine_ok = true;
    for n in 0..=plan.steps {
        let mut row = vec![n.to_string()];
        row.extend(fmt_point(&w));
        orbit.push(row);
        if n == plan.steps {
            break;
        }
        let next = skew_w_step(&w)?;
        let bc = TorusPoint::new(w.coords()[1..].to_vec())?;
        let expected = invariant_torus_step(&a, &bc)?;
        affine_ok &= next.coords()[0] == a && next.coords()[1..] == *expected.coords();
        w = next;
    }
    report.add_series("orbit", orbit);
    report.scalar("final", fmt_point(&w).join(","));

    // The orbit closes after Q² steps, Q the common denominator of (a, b, c).
    let q = plan
        .start
        .coords()
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let q2 = (&q * &q).to_u64().filter(|v| *v <= MAX_PERIOD_SEARCH);
    match q2 {
        Some(q2) => {
            let mut p = plan.start.clone();
            let mut least = None;
            for n in 1..=q2 {
                p = skew_w_step(&p)?;
                if least.is_none() && p == plan.start {
                    least = Some(n);
                }
            }
            let closes = p == plan.start;
            report.scalar("q_squared", q2);
            report.scalar("least_period", least.map_or(serde_json::Value::Null, |n| n.into()));
            report.verdict(
                "orbit_closes_after_q_squared",
                closes && least.is_some_and(|l| q2 % l == 0),
                format!("W^(Q²) returns to the start for Q = {q}, least period divides Q²"),
            );
        }
        None => {
            report.scalar("q_squared", format!("{}", &q * &q));
        }
    }

    // Conjugation identity and the invariant-torus map on the grid.
    let samples = grid(3);
    let points = grid(plan.grid);
    let mut conj = Series::new(&["alpha", "points", "symbolic", "pointwise"]);
    let mut conj_ok = true;
    for alpha in &plan.alphas {
        let mut symbolic = true;
        let mut pointwise = true;
        for t in &points {
            let res = skew_tbar_conjugation(alpha, t, &samples)?;
            symbolic &= res.symbolic_is_rotation && res.translation == skew_w_step(t)?;
            pointwise &= res.samples_agree;
        }
        conj_ok &= symbolic && pointwise;
        conj.push(vec![
            format_rational(alpha),
            points.len().to_string(),
            symbolic.to_string(),
            pointwise.to_string(),
        ]);
    }
    for t in &points {
        let c = t.coords();
        let bc = TorusPoint::new(c[1..].to_vec())?;
        let step = invariant_torus_step(&c[0], &bc)?;
        let by_hand = TorusPoint::new(vec![&c[1] + &c[0], &c[1] + &c[2] + &c[0]])?;
        affine_ok &= step == by_hand && skew_w_step(t)?.coords()[1..] == *step.coords();
    }
    report.add_series("conjugation", conj);
    report.verdict(
        "conjugation_is_rotation_by_W",
        conj_ok,
        format!(
            "T̄∘S_t∘T̄⁻¹ = S_(W t) symbolically and pointwise for {} grid points and {} values of α",
            points.len(),
            plan.alphas.len()
        ),
    );
    report.verdict(
        "invariant_torus_is_affine",
        affine_ok,
        "W on {a fixed} is (b, c) ↦ (b + a, b + c + a) along the orbit and on the grid",
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size() {
        assert_eq!(grid(5).len(), 125);
    }
}
