use lens_core::constructions::{density_gap, realize_coupling_as_iet, RationalTarget};
use lens_core::sample::{random_rational_coupling, random_rational_target};
use lens_core::scalar::format_rational;
use lens_core::zoo::IetSpec;
use lens_core::{Matrix, Rational, Scalar};
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;

use super::{invalid, param_list};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{ExperimentReport, Series};

pub(super) struct Plan {
    samples: usize,
    k_max: usize,
    l_max: u64,
    gap_k: usize,
    gap_l: Vec<u64>,
}

pub(super) fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let samples = cfg.parse_param("samples", 200usize)?;
    let k_max = cfg.parse_param("k_max", 5usize)?;
    let l_max = cfg.parse_param("L_max", 30u64)?;
    let gap_k = cfg.parse_param("gap_k", 3usize)?;
    let gap_l: Vec<u64> = param_list(cfg, "gap_L", "6,60,600")?;
    if k_max == 0 || l_max < k_max as u64 {
        return Err(invalid("need 1 ≤ k_max ≤ L_max"));
    }
    if k_max > 32 || l_max > 10_000 {
        return Err(super::size_guard("iet-realize accepts k_max ≤ 32 and L_max ≤ 10000"));
    }
    if gap_k == 0 || gap_l.iter().any(|l| *l == 0 || l % gap_k as u64 != 0) {
        return Err(invalid(format!("every gap_L must be a positive multiple of gap_k = {gap_k}")));
    }
    Ok(Plan {
        samples,
        k_max,
        l_max,
        gap_k,
        gap_l,
    })
}

/// Oracle independent of the construction's bookkeeping: sends the midpoint
/// of each of the `n` subintervals through the exchange and credits `1/n` to
/// (cell of the image, cell of the midpoint).
fn mass_count(spec: &IetSpec, k: usize) -> Matrix<Rational> {
    let n = spec.n_intervals() as i64;
    let w = Rational::ratio(1, n);
    let kk = Rational::ratio(k as i64, 1);
    let cell = |x: &Rational| (x * &kk).floor().to_integer().to_usize().expect("cell index");
    let mut m = Matrix::<Rational>::zeros(k, k);
    for u in 0..n {
        let mid = Rational::ratio(2 * u + 1, 2 * n);
        let image = spec.apply(&mid);
        let (src, dst) = (cell(&mid), cell(&image));
        let cur = m.get(dst, src).clone();
        m.set(dst, src, cur + &w);
    }
    m
}

pub(super) fn execute(cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    let mut targets: Vec<RationalTarget> = Vec::with_capacity(plan.samples);
    for i in 0..plan.samples {
        let mut rng = cfg.rng(i as u64)?;
        let k = rng.gen_range(1..=plan.k_max);
        let l = k as u64 * rng.gen_range(1..=plan.l_max / k as u64);
        targets.push(random_rational_target(k, l, &mut rng)?);
    }
    let checks = targets
        .par_iter()
        .map(|t| -> Result<(usize, bool)> {
            let spec = realize_coupling_as_iet(t)?;
            let ok = spec.n_intervals() as u64 == t.k() as u64 * t.denominator()
                && mass_count(&spec, t.k()) == *t.to_coupling().matrix();
            Ok((spec.n_intervals(), ok))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut series = Series::new(&["index", "k", "L", "intervals", "match"]);
    let mut all = true;
    for (i, (t, (n, ok))) in targets.iter().zip(&checks).enumerate() {
        all &= ok;
        series.push(vec![
            i.to_string(),
            t.k().to_string(),
            t.denominator().to_string(),
            n.to_string(),
            ok.to_string(),
        ]);
    }
    report.add_series("targets", series);
    report.scalar("targets", targets.len());
    report.verdict(
        "induced_coupling_equals_target",
        all,
        format!(
            "{} random targets (k ≤ {}, L ≤ {}): midpoint mass count equals m/L exactly",
            targets.len(),
            plan.k_max,
            plan.l_max
        ),
    );

    // Rounding a fixed coupling onto denominators L.
    let c = random_rational_coupling(plan.gap_k, 5, &mut cfg.rng(plan.samples as u64)?)?;
    let mut gaps = Series::new(&["L", "distance", "bound"]);
    let mut within = true;
    let mut monotone = true;
    let mut last: Option<Rational> = None;
    for &l in &plan.gap_l {
        let (_, d) = density_gap(&c, l)?;
        let bound = Rational::ratio((plan.gap_k * plan.gap_k) as i64, l as i64);
        within &= d <= bound;
        if let Some(prev) = &last {
            monotone &= &d <= prev;
        }
        gaps.push(vec![l.to_string(), format_rational(&d), format_rational(&bound)]);
        last = Some(d);
    }
    report.add_series("density_gap", gaps);
    report.verdict(
        "density_gap_within_k2_over_L",
        within,
        format!("L1 distance to the rounded target ≤ k²/L for k = {}", plan.gap_k),
    );
    let increasing = plan.gap_l.windows(2).all(|w| w[0] < w[1]);
    if increasing {
        report.verdict(
            "density_gap_decreasing",
            monotone,
            "distance does not increase along the listed denominators",
        );
    }
    Ok(())
}
