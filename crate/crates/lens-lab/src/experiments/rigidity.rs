use lens_core::constructions::{contiguous_blocks, distinct_block_sizes, rigidity_probe};
use lens_core::lens::DriftRepair;
use lens_core::zoo::{bernoulli_system, rotation_system};
use lens_core::Rational;
use rayon::prelude::*;

use super::{close, fmt_scalar, invalid, param_list};
use crate::config::{Backend, ExperimentConfig};
use crate::error::Result;
use crate::report::{ExperimentReport, Series};

pub(super) struct Plan {
    max_k: usize,
    len: usize,
    sizes: Vec<usize>,
    n_max: u64,
}

pub(super) fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let max_k = cfg.parse_param("max_k", 233usize)?;
    let len = cfg.parse_param("bernoulli_L", 3usize)?;
    let sizes: Vec<usize> = param_list(cfg, "blocks", "1,3,4")?;
    let n_max = cfg.parse_param("n_max", 12u64)?;
    if max_k < 2 {
        return Err(invalid("max_k must be at least 2"));
    }
    if len == 0 || len > 10 {
        return Err(invalid("bernoulli_L must be between 1 and 10"));
    }
    if sizes.iter().sum::<usize>() != 1 << len {
        return Err(invalid(format!("blocks {sizes:?} must sum to 2^L = {}", 1 << len)));
    }
    if n_max < len as u64 {
        return Err(invalid("n_max must be at least bernoulli_L"));
    }
    Ok(Plan {
        max_k,
        len,
        sizes,
        n_max,
    })
}

pub(super) fn execute(cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    match cfg.backend {
        Backend::Rational => go::<Rational>(plan, report),
        Backend::Float => go::<f64>(plan, report),
    }
}

/// `(F_{m+1}, F_m)` with `2 ≤ F_{m+1} ≤ max_k`.
fn fibonacci_pairs(max_k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let (mut a, mut b) = (1usize, 2usize);
    while b <= max_k {
        out.push((b, a));
        (a, b) = (b, a + b);
    }
    out
}

fn go<S: DriftRepair>(plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    let pairs = fibonacci_pairs(plan.max_k);
    let rows: Vec<(usize, usize, S, S)> = pairs
        .par_iter()
        .map(|&(k, s)| -> Result<_> {
            let sys = rotation_system(k, s)?.to_backend::<S>();
            let blocks = contiguous_blocks(&distinct_block_sizes(k));
            let one = rigidity_probe(&sys, &blocks, 1)?;
            let full = rigidity_probe(&sys, &blocks, k as u64)?;
            Ok((k, s, one, full))
        })
        .collect::<Result<_>>()?;
    let mut fib = Series::new(&["k", "s", "score_at_1", "score_at_k"]);
    let mut all_one = true;
    for (k, s, one, full) in &rows {
        all_one &= close(full, &S::one());
        fib.push(vec![k.to_string(), s.to_string(), fmt_scalar(one), fmt_scalar(full)]);
    }
    report.add_series("fibonacci", fib);
    report.scalar("fibonacci_approximants", rows.len());
    report.verdict(
        "fibonacci_score_one_at_full_period",
        all_one,
        format!("score at n = k equals 1 for {} approximants up to k = {}", rows.len(), plan.max_k),
    );

    let k = 1usize << plan.len;
    let sys = bernoulli_system(2, plan.len)?.to_backend::<S>();
    let blocks = contiguous_blocks(&plan.sizes);
    // Once n ≥ L the n-step transition is uniform, the lens image of ξ is the
    // product coupling and the score is Σ_j a_j².
    let closed = plan
        .sizes
        .iter()
        .fold(S::zero(), |acc, &s| acc + S::ratio((s * s) as i64, (k * k) as i64));
    let ns: Vec<u64> = (0..=plan.n_max).collect();
    let scores: Vec<S> = ns
        .par_iter()
        .map(|&n| rigidity_probe(&sys, &blocks, n).map_err(Into::into))
        .collect::<Result<_>>()?;
    let mut bern = Series::new(&["n", "score", "closed_form"]);
    let mut matches = true;
    for (n, score) in ns.iter().zip(&scores) {
        let tail = *n >= plan.len as u64;
        if tail {
            matches &= (score.to_f64() - closed.to_f64()).abs() <= 1e-12 && close(score, &closed);
        }
        bern.push(vec![
            n.to_string(),
            fmt_scalar(score),
            if tail { fmt_scalar(&closed) } else { String::new() },
        ]);
    }
    report.add_series("bernoulli", bern);
    report.scalar("bernoulli_closed_form", fmt_scalar(&closed));
    report.verdict(
        "bernoulli_score_matches_closed_form",
        matches,
        format!("score = Σ a_j² = {} for L ≤ n ≤ {}", fmt_scalar(&closed), plan.n_max),
    );
    report.verdict(
        "bernoulli_score_below_0.9",
        closed.to_f64() < 0.9,
        format!("closed form {} < 0.9", closed.to_f64()),
    );
    Ok(())
}
