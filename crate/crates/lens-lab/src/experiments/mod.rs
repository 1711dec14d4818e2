//! One module per registry entry. Each exposes `plan`, which parses and
//! checks the config without heavy work, and `execute`, which fills a report.

mod cesaro;
mod commuters;
mod entropy;
mod fixed;
mod group;
mod iet;
mod mixing;
mod one_sided;
mod rigidity;
mod skew;
mod witness;

use lens_core::scalar::format_rational;
use lens_core::zoo::SystemSpec;
use lens_core::{FiniteSystem, Scalar};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::registry::{lookup, ExperimentInfo, SystemUse};
use crate::report::ExperimentReport;

/// Checks the config against the registry and the experiment's own rules.
pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
    let info = check_common(cfg)?;
    dispatch(cfg, &info, None)
}

/// Runs the experiment named in `cfg`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let info = check_common(cfg)?;
    let mut report = ExperimentReport::new(&cfg.experiment, cfg.echo());
    dispatch(cfg, &info, Some(&mut report))?;
    Ok(report)
}

fn dispatch(cfg: &ExperimentConfig, info: &ExperimentInfo, report: Option<&mut ExperimentReport>) -> Result<()> {
    macro_rules! go {
        ($m:ident) => {{
            let plan = $m::plan(cfg)?;
            if let Some(report) = report {
                $m::execute(cfg, &plan, report)?;
            }
            Ok(())
        }};
    }
    match info.name.as_str() {
        "rigidity-sweep" => go!(rigidity),
        "mixing-profile" => go!(mixing),
        "transitivity-witness" => go!(witness),
        "entropy-factor" => go!(entropy),
        "fixed-points" => go!(fixed),
        "periodic-commuters" => go!(commuters),
        "one-sided-limit" => go!(one_sided),
        "cesaro-barycenter" => go!(cesaro),
        "skew-orbit" => go!(skew),
        "iet-realize" => go!(iet),
        "group-embedding" => go!(group),
        other => Err(LabError::UnknownExperiment(other.to_string())),
    }
}

fn check_common(cfg: &ExperimentConfig) -> Result<ExperimentInfo> {
    let info = lookup(&cfg.experiment).ok_or_else(|| LabError::UnknownExperiment(cfg.experiment.clone()))?;
    if !info.backends.contains(&cfg.backend) {
        return Err(LabError::InvalidConfig(format!(
            "{} is exact-only; set backend = rational",
            info.name
        )));
    }
    for key in cfg.params.keys() {
        if !info.params.iter().any(|p| &p.name == key) {
            let known: Vec<&str> = info.params.iter().map(|p| p.name.as_str()).collect();
            return Err(LabError::InvalidConfig(format!(
                "{} does not take `{key}`; known parameters: {}",
                info.name,
                known.join(", ")
            )));
        }
    }
    match (info.system, &cfg.system) {
        (SystemUse::Required, None) => {
            return Err(LabError::InvalidConfig(format!(
                "{} needs `system`, e.g. system = bern:d=2,L=3",
                info.name
            )))
        }
        (SystemUse::Unused, Some(_)) => {
            return Err(LabError::InvalidConfig(format!("{} does not use `system`", info.name)))
        }
        _ => {}
    }
    if info.seed == "always" {
        cfg.require_seed()?;
    }
    Ok(info)
}

pub(crate) fn parse_system_spec(cfg: &ExperimentConfig) -> Result<Option<SystemSpec>> {
    cfg.system
        .as_deref()
        .map(|s| s.parse::<SystemSpec>().map_err(|e| LabError::InvalidConfig(format!("system: {e}"))))
        .transpose()
}

/// The finite system named by `system`; size guards surface here.
pub(crate) fn finite_system(cfg: &ExperimentConfig) -> Result<(SystemSpec, FiniteSystem)> {
    let spec = parse_system_spec(cfg)?
        .ok_or_else(|| LabError::InvalidConfig(format!("{} needs `system`", cfg.experiment)))?;
    if let SystemSpec::Skew { .. } = spec {
        return Err(LabError::InvalidConfig(format!(
            "{} needs a finite system; skew products only work with skew-orbit",
            cfg.experiment
        )));
    }
    let sys = spec.build()?;
    Ok((spec, sys))
}

/// Seed needed only when `samples > 0`.
pub(crate) fn seed_if_sampling(cfg: &ExperimentConfig, samples: usize) -> Result<()> {
    if samples > 0 {
        cfg.require_seed()?;
    }
    Ok(())
}

/// Exact values print as `p/q`, floats in Rust's shortest round-trip form.
pub(crate) fn fmt_scalar<S: Scalar>(x: &S) -> String {
    if S::EXACT {
        format_rational(&x.to_rational())
    } else {
        format!("{}", x.to_f64())
    }
}

/// Float comparisons use the library-wide marginal tolerance.
pub(crate) fn close<S: Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        a == b
    } else {
        (a.to_f64() - b.to_f64()).abs() <= S::SUM_TOLERANCE
    }
}

pub(crate) fn at_most<S: Scalar>(a: &S, bound: &S) -> bool {
    if S::EXACT {
        a <= bound
    } else {
        a.to_f64() <= bound.to_f64() + S::SUM_TOLERANCE
    }
}

pub(crate) fn param_list<T: std::str::FromStr>(cfg: &ExperimentConfig, key: &str, default: &str) -> Result<Vec<T>> {
    let raw = cfg.param(key).unwrap_or(default);
    crate::config::parse_list(key, raw)
}

pub(crate) fn invalid(msg: impl Into<String>) -> LabError {
    LabError::InvalidConfig(msg.into())
}

pub(crate) fn size_guard(msg: impl Into<String>) -> LabError {
    LabError::SizeGuard(msg.into())
}
