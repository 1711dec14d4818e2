use lens_core::constructions::{entropy_factor_f, realize_entropy_block, BlockTarget};
use lens_core::scalar::format_rational;
use lens_core::zoo::bernoulli_system;
use lens_core::Rational;
use rand::Rng;
use rayon::prelude::*;

use super::{invalid, seed_if_sampling, size_guard};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{ExperimentReport, Series};

/// Longest block; the check runs the lens on `2ⁿ` cylinder cells.
pub const MAX_BLOCK_LEN: usize = 10;

pub(super) struct Plan {
    block: Option<BlockTarget>,
    exhaustive_n: usize,
    samples: usize,
    max_n: usize,
}

pub(super) fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let block = match cfg.param("block") {
        None | Some("") => None,
        Some(raw) => Some(
            raw.parse::<BlockTarget>()
                .map_err(|e| invalid(format!("block: {e}")))?,
        ),
    };
    let exhaustive_n = cfg.parse_param("exhaustive_n", 3usize)?;
    let samples = cfg.parse_param("samples", 0usize)?;
    let max_n = cfg.parse_param("max_n", 8usize)?;
    if max_n == 0 {
        return Err(invalid("max_n must be at least 1"));
    }
    let longest = [block.as_ref().map_or(0, BlockTarget::len), exhaustive_n, if samples > 0 { max_n } else { 0 }]
        .into_iter()
        .max()
        .unwrap_or(0);
    if longest > MAX_BLOCK_LEN {
        return Err(size_guard(format!(
            "blocks of length {longest} need 2^{longest} cells; the limit is length {MAX_BLOCK_LEN}"
        )));
    }
    seed_if_sampling(cfg, samples)?;
    Ok(Plan {
        block,
        exhaustive_n,
        samples,
        max_n,
    })
}

/// `F(realize(b))[0..n−1]`.
fn readback(b: &BlockTarget) -> lens_core::Result<Vec<Rational>> {
    let n = b.len();
    let sys = bernoulli_system(2, n)?;
    let lambda = realize_entropy_block::<Rational>(b)?;
    entropy_factor_f(&sys, &lambda, n - 1)
}

pub(super) fn execute(cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    let mut blocks: Vec<BlockTarget> = Vec::new();
    blocks.extend(plan.block.clone());
    for n in 1..=plan.exhaustive_n {
        blocks.extend(BlockTarget::all(n));
    }
    if plan.samples > 0 {
        let mut rng = cfg.rng(0)?;
        for _ in 0..plan.samples {
            let n = rng.gen_range(1..=plan.max_n);
            blocks.push(BlockTarget::new((0..n).map(|_| rng.gen_bool(0.5)).collect())?);
        }
    }
    let prefixes = blocks
        .par_iter()
        .map(readback)
        .collect::<lens_core::Result<Vec<_>>>()?;
    let mut series = Series::new(&["block", "F_prefix", "match"]);
    let mut all = true;
    let mut single = None;
    for (i, (b, f)) in blocks.iter().zip(&prefixes).enumerate() {
        let ok = *f == b.values::<Rational>();
        all &= ok;
        if i == 0 && plan.block.is_some() {
            single = Some(ok);
        }
        let f: Vec<String> = f.iter().map(format_rational).collect();
        series.push(vec![b.to_string(), f.join(","), ok.to_string()]);
    }
    report.add_series("blocks", series);
    report.scalar("blocks_checked", blocks.len());
    if let (Some(ok), Some(b)) = (single, &plan.block) {
        report.verdict("requested_block", ok, format!("F prefix of the realization equals {b}"));
    }
    report.verdict(
        "F_prefix_equals_block",
        all,
        format!(
            "{} blocks (all of length ≤ {}, {} random of length ≤ {}): F(realize(b))[0..n−1] = b exactly",
            blocks.len(),
            plan.exhaustive_n,
            plan.samples,
            plan.max_n
        ),
    );
    Ok(())
}
