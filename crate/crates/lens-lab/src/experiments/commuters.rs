use lens_core::constructions::{bernoulli_cyclic_commuter, odometer_commuter};
use lens_core::scalar::format_rational;
use lens_core::Permutation;
use num_traits::Zero;
use rayon::prelude::*;

use super::{invalid, size_guard};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{ExperimentReport, Series};

/// `π` ranges over all of `Sym(2ⁿ)`, so `n` stays small.
const MAX_BLOCK_LEVEL: u32 = 3;

pub(super) struct Plan {
    d_max: usize,
    ell_max: usize,
    len_max: usize,
    n: u32,
    m: u32,
}

pub(super) fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let d_max = cfg.parse_param("d_max", 3usize)?;
    let ell_max = cfg.parse_param("ell_max", 2usize)?;
    let len_max = cfg.parse_param("L_max", 2usize)?;
    let n = cfg.parse_param("n", 2u32)?;
    let m = cfg.parse_param("m", 3u32)?;
    if d_max < 2 || ell_max < 1 || len_max < 1 {
        return Err(invalid("need d_max ≥ 2, ell_max ≥ 1 and L_max ≥ 1"));
    }
    if n == 0 || n > m {
        return Err(invalid(format!("need 1 ≤ n ≤ m, got n = {n}, m = {m}")));
    }
    if n > MAX_BLOCK_LEVEL {
        return Err(size_guard(format!("n = {n}: Sym(2^n) is too large to sweep (limit n ≤ {MAX_BLOCK_LEVEL})")));
    }
    if m > 10 {
        return Err(size_guard(format!("m = {m}: at most 2^10 odometer cells")));
    }
    Ok(Plan {
        d_max,
        ell_max,
        len_max,
        n,
        m,
    })
}

pub(super) fn execute(_cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    let mut cases = Vec::new();
    for d in 2..=plan.d_max {
        for ell in 1..=plan.ell_max {
            for len in 1..=plan.len_max {
                cases.push((d, ell, len));
            }
        }
    }
    let bern = cases
        .par_iter()
        .map(|&(d, ell, len)| bernoulli_cyclic_commuter(d, ell, len))
        .collect::<lens_core::Result<Vec<_>>>()?;
    let mut series = Series::new(&["d", "ell", "L", "order", "commutes", "cycles_generator", "lens_residual"]);
    let mut bern_ok = true;
    for c in &bern {
        bern_ok &= c.commutes && c.cycles_generator && c.lens_residual.is_zero();
        series.push(vec![
            c.d.to_string(),
            c.ell.to_string(),
            c.len.to_string(),
            c.permutation.order().to_string(),
            c.commutes.to_string(),
            c.cycles_generator.to_string(),
            format_rational(&c.lens_residual),
        ]);
    }
    report.add_series("bernoulli", series);
    report.scalar("bernoulli_cases", bern.len());
    report.verdict(
        "bernoulli_commuters_are_self_joinings",
        bern_ok,
        format!(
            "{} cases (d ≤ {}, ell ≤ {}, L ≤ {}): S commutes with the shift, cycles the α-generator, self-joining residual 0",
            bern.len(),
            plan.d_max,
            plan.ell_max,
            plan.len_max
        ),
    );

    let block = 1usize << plan.n;
    let pis: Vec<Permutation> = Permutation::all(block).collect();
    let odo = pis
        .par_iter()
        .map(|pi| odometer_commuter(pi, plan.m))
        .collect::<lens_core::Result<Vec<_>>>()?;
    let mut series = Series::new(&["pi", "commutes", "power_residual", "period"]);
    let mut odo_ok = true;
    for (pi, c) in pis.iter().zip(&odo) {
        let divides = c.period.is_some_and(|p| block.is_multiple_of(p));
        odo_ok &= c.commutes && c.power_residual.is_zero() && divides;
        let images: Vec<String> = pi.as_slice().iter().map(usize::to_string).collect();
        series.push(vec![
            images.join(" "),
            c.commutes.to_string(),
            format_rational(&c.power_residual),
            c.period.map_or_else(String::new, |p| p.to_string()),
        ]);
    }
    report.add_series("odometer", series);
    report.scalar("odometer_permutations", odo.len());
    report.verdict(
        "odometer_commuters_periodic",
        odo_ok,
        format!(
            "all {} permutations of 2^{} points: S commutes with τ^{block} at level {} and the lens period of Δ_S divides {block}",
            odo.len(),
            plan.n,
            plan.m
        ),
    );
    Ok(())
}
