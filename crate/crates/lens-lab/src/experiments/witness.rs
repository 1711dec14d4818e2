use lens_core::constructions::{transitivity_witness, MAX_WITNESS_CELLS};
use lens_core::sample::random_permutation;
use lens_core::scalar::parse_rational;
use lens_core::{Permutation, Rational};
use num_traits::Zero;
use rayon::prelude::*;

use super::{invalid, seed_if_sampling, size_guard};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{ExperimentReport, Series};

/// Exhaustive sweeps are limited to this many `(σ, π)` pairs.
const MAX_EXHAUSTIVE_PAIRS: usize = 1000;

pub(super) struct Plan {
    d: usize,
    len: usize,
    k: usize,
    samples: usize,
    epsilon: Rational,
}

pub(super) fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let d = cfg.parse_param("d", 2usize)?;
    let len = cfg.parse_param("L", 1usize)?;
    let samples = cfg.parse_param("samples", 0usize)?;
    let epsilon = parse_rational(cfg.param("epsilon").unwrap_or("1/1000"))
        .map_err(|e| invalid(format!("epsilon: {e}")))?;
    if d < 2 || len == 0 {
        return Err(invalid("need d ≥ 2 and L ≥ 1"));
    }
    if epsilon <= Rational::zero() {
        return Err(invalid("epsilon must be positive"));
    }
    let fine = d
        .checked_pow(2 * len as u32)
        .filter(|f| *f <= MAX_WITNESS_CELLS)
        .ok_or_else(|| size_guard(format!("d^(2L) exceeds {MAX_WITNESS_CELLS} witness cells")))?;
    let k = d.pow(len as u32);
    debug_assert_eq!(k * k, fine);
    if samples == 0 {
        let fact: usize = (1..=k).product();
        if fact.saturating_mul(fact) > MAX_EXHAUSTIVE_PAIRS {
            return Err(size_guard(format!(
                "{fact}² permutation pairs is too many for an exhaustive sweep; set samples"
            )));
        }
    }
    seed_if_sampling(cfg, samples)?;
    Ok(Plan {
        d,
        len,
        k,
        samples,
        epsilon,
    })
}

fn fmt_perm(p: &Permutation) -> String {
    let parts: Vec<String> = p.as_slice().iter().map(usize::to_string).collect();
    parts.join(" ")
}

pub(super) fn execute(cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    let pairs: Vec<(Permutation, Permutation)> = if plan.samples == 0 {
        let all: Vec<Permutation> = Permutation::all(plan.k).collect();
        all.iter()
            .flat_map(|s| all.iter().map(move |p| (s.clone(), p.clone())))
            .collect()
    } else {
        let mut rng = cfg.rng(0)?;
        (0..plan.samples)
            .map(|_| {
                let s = random_permutation(plan.k, &mut rng);
                (s, random_permutation(plan.k, &mut rng))
            })
            .collect()
    };
    let results = pairs
        .par_iter()
        .map(|(s, p)| transitivity_witness(plan.d, plan.len, s, p, &plan.epsilon))
        .collect::<lens_core::Result<Vec<_>>>()?;
    let mut series = Series::new(&["sigma", "pi", "n", "fine_k", "check_source", "check_image"]);
    let mut ok = true;
    for ((s, p), w) in pairs.iter().zip(&results) {
        ok &= w.n == plan.len
            && w.check_source
            && w.check_image
            && w.source_gap.is_zero()
            && w.image_gap.is_zero();
        series.push(vec![
            fmt_perm(s),
            fmt_perm(p),
            w.n.to_string(),
            w.fine_k.to_string(),
            w.check_source.to_string(),
            w.check_image.to_string(),
        ]);
    }
    report.add_series("pairs", series);
    report.scalar("k", plan.k);
    report.scalar("pairs", pairs.len());
    report.scalar("mode", if plan.samples == 0 { "exhaustive" } else { "sampled" });
    report.verdict(
        "witness_exact_at_n_equal_L",
        ok,
        format!(
            "{} pairs: witness at n = {} with both memberships exact (gap 0)",
            pairs.len(),
            plan.len
        ),
    );
    Ok(())
}
