use lens_core::coupling::graph_coupling;
use lens_core::lens::{quasi_attractor_hits, DriftRepair};
use lens_core::sample::{random_permutation, random_rational_coupling};
use lens_core::zoo::SystemSpec;
use lens_core::{coupling_distance, orbit, product_coupling, CouplingMatrix, FiniteSystem, OrbitMode, Rational};
use rayon::prelude::*;

use super::{at_most, finite_system, fmt_scalar, invalid};
use crate::config::{Backend, ExperimentConfig};
use crate::error::Result;
use crate::report::{ExperimentReport, Series};

pub(super) struct Plan {
    spec: SystemSpec,
    sys: FiniteSystem,
    samples: usize,
    steps: usize,
    window: usize,
}

pub(super) fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let (spec, sys) = finite_system(cfg)?;
    let samples = cfg.parse_param("samples", 20usize)?;
    let steps = cfg.parse_param("N", 12usize)?;
    let window = cfg.parse_param("window", 4usize)?;
    if samples == 0 || window == 0 {
        return Err(invalid("samples and window must be positive"));
    }
    if steps > 5000 {
        return Err(invalid("N must be at most 5000"));
    }
    if let SystemSpec::Bernoulli { len, .. } = spec {
        if steps < 2 * len {
            return Err(invalid(format!("N must be at least 2L = {} to see the product reached", 2 * len)));
        }
    } else if !sys.is_exact() {
        return Err(invalid("one-sided-limit handles Bernoulli and permutation systems"));
    }
    Ok(Plan {
        spec,
        sys,
        samples,
        steps,
        window,
    })
}

pub(super) fn execute(cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    match cfg.backend {
        Backend::Rational => go::<Rational>(cfg, plan, report),
        Backend::Float => go::<f64>(cfg, plan, report),
    }
}

struct Trace<S> {
    distances: Vec<S>,
    in_target: Vec<bool>,
    tail_density: f64,
}

fn go<S: DriftRepair>(cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    let sys = plan.sys.to_backend::<S>();
    let k = sys.k();
    let product = product_coupling::<S>(k)?;
    let exact_map = sys.cell_map().cloned();
    let settle = match plan.spec {
        SystemSpec::Bernoulli { len, .. } => 2 * len,
        _ => 0,
    };
    let mut initials = Vec::with_capacity(plan.samples);
    let mut sigmas = Vec::with_capacity(plan.samples);
    for i in 0..plan.samples {
        let mut rng = cfg.rng(i as u64)?;
        if exact_map.is_some() {
            let sigma = random_permutation(k, &mut rng);
            initials.push(graph_coupling::<Rational>(&sigma)?);
            sigmas.push(Some(sigma));
        } else {
            initials.push(random_rational_coupling(k, 4, &mut rng)?);
            sigmas.push(None);
        }
    }
    let traces = initials
        .par_iter()
        .zip(&sigmas)
        .map(|(init, sigma)| -> Result<Trace<S>> {
            let init: CouplingMatrix<S> = init.to_backend();
            let orb = orbit(&sys, &init, plan.steps, OrbitMode::OneSided)?;
            let mut distances = Vec::with_capacity(orb.states.len());
            for s in &orb.states {
                distances.push(coupling_distance(s, &product)?);
            }
            // Permutation systems: the n-th state must be Δ_{τⁿσ}.
            let expected: Option<Vec<CouplingMatrix<S>>> = match (&exact_map, sigma) {
                (Some(tau), Some(sigma)) => Some(
                    (0..=plan.steps)
                        .map(|n| graph_coupling::<S>(&tau.pow(n as i64).compose(sigma)))
                        .collect::<lens_core::Result<_>>()?,
                ),
                _ => None,
            };
            let in_target: Vec<bool> = match &expected {
                Some(exp) => orb
                    .states
                    .iter()
                    .zip(exp)
                    .map(|(s, e)| coupling_distance(s, e).map(|d| at_most(&d, &S::zero())))
                    .collect::<lens_core::Result<_>>()?,
                None => distances.iter().map(|d| at_most(d, &S::zero())).collect(),
            };
            let hits = match &expected {
                Some(exp) => quasi_attractor_hits(
                    &orb,
                    |c| exp.iter().any(|e| coupling_distance(c, e).map(|d| at_most(&d, &S::zero())).unwrap_or(false)),
                    plan.window,
                )?,
                None => quasi_attractor_hits(
                    &orb,
                    |c| coupling_distance(c, &product).map(|d| at_most(&d, &S::zero())).unwrap_or(false),
                    plan.window,
                )?,
            };
            Ok(Trace {
                distances,
                in_target,
                tail_density: hits.tail_density,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut series = Series::new(&["sample", "n", "distance_to_product", "in_target"]);
    let mut ok = true;
    let mut min_tail = 1.0f64;
    for (i, t) in traces.iter().enumerate() {
        for (n, (d, hit)) in t.distances.iter().zip(&t.in_target).enumerate() {
            if n >= settle {
                ok &= *hit;
            }
            series.push(vec![i.to_string(), n.to_string(), fmt_scalar(d), hit.to_string()]);
        }
        min_tail = min_tail.min(t.tail_density);
    }
    report.add_series("distance", series);
    report.scalar("samples", plan.samples);
    report.scalar("min_tail_hit_density", format!("{min_tail}"));
    if exact_map.is_some() {
        report.verdict(
            "orbit_stays_in_graph_couplings",
            ok,
            format!("for every n ≤ {} the n-th state is the graph coupling Δ_(τⁿσ)", plan.steps),
        );
    } else {
        report.verdict(
            "reaches_product_by_2L",
            ok,
            format!("L1 distance to the product coupling is 0 for all {settle} ≤ n ≤ {}", plan.steps),
        );
    }
    Ok(())
}
