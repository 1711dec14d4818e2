//! The fixed list of experiments, their parameters and output schemas.

use serde::{Deserialize, Serialize};

use crate::config::Backend;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemUse {
    Required,
    Optional,
    Unused,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamInfo {
    pub name: String,
    /// `None` for required parameters.
    pub default: Option<String>,
    pub help: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub series: String,
    pub columns: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentInfo {
    pub name: String,
    /// The result the experiment checks.
    pub anchor: String,
    pub description: String,
    pub system: SystemUse,
    pub backends: Vec<Backend>,
    /// When a `seed` is needed.
    pub seed: String,
    pub params: Vec<ParamInfo>,
    pub csv: Vec<CsvSchema>,
}

fn p(name: &str, default: Option<&str>, help: &str) -> ParamInfo {
    ParamInfo {
        name: name.into(),
        default: default.map(Into::into),
        help: help.into(),
    }
}

fn csv(series: &str, columns: &[&str]) -> CsvSchema {
    CsvSchema {
        series: series.into(),
        columns: columns.iter().map(|c| c.to_string()).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn info(
    name: &str,
    anchor: &str,
    description: &str,
    system: SystemUse,
    backends: &[Backend],
    seed: &str,
    params: Vec<ParamInfo>,
    csv: Vec<CsvSchema>,
) -> ExperimentInfo {
    ExperimentInfo {
        name: name.into(),
        anchor: anchor.into(),
        description: description.into(),
        system,
        backends: backends.to_vec(),
        seed: seed.into(),
        params,
        csv,
    }
}

const BOTH: &[Backend] = &[Backend::Rational, Backend::Float];
const EXACT: &[Backend] = &[Backend::Rational];

pub fn list_experiments() -> Vec<ExperimentInfo> {
    registry()
}

fn registry() -> Vec<ExperimentInfo> {
    vec![
        info(
            "rigidity-sweep",
            "rigidity of T against uniform rigidity of its lens, via blocks of distinct mass",
            "Rigidity probe on Fibonacci rotation approximants (score 1 at n = k) and on a Bernoulli shift (closed form Σ a_j², below 0.9).",
            SystemUse::Unused,
            BOTH,
            "never",
            vec![
                p("max_k", Some("233"), "largest Fibonacci resolution F_{m+1}"),
                p("bernoulli_L", Some("3"), "cylinder length of the binary Bernoulli system"),
                p("blocks", Some("1,3,4"), "distinct block sizes summing to 2^L"),
                p("n_max", Some("12"), "last lens power probed for the Bernoulli system"),
            ],
            vec![
                csv("fibonacci", &["k", "s", "score_at_1", "score_at_k"]),
                csv("bernoulli", &["n", "score", "closed_form"]),
            ],
        ),
        info(
            "mixing-profile",
            "mixing-time search in the transitivity proof",
            "Independence residual max |μ(TⁿA_i ∩ A_j) − 1/k²| for n = 0..N.",
            SystemUse::Required,
            BOTH,
            "never",
            vec![p("N", Some("8"), "last power")],
            vec![csv("residual", &["n", "residual"])],
        ),
        info(
            "transitivity-witness",
            "topological transitivity of the lens of a mixing system",
            "Witness couplings moving V(α,σ) into V(α,π) under the Bernoulli lens, checked exactly.",
            SystemUse::Unused,
            EXACT,
            "when samples > 0",
            vec![
                p("d", Some("2"), "alphabet size"),
                p("L", Some("1"), "cylinder length of the base partition"),
                p("samples", Some("0"), "number of random (σ, π) pairs; 0 means all pairs"),
                p("epsilon", Some("1/1000"), "neighbourhood radius"),
            ],
            vec![csv("pairs", &["sigma", "pi", "n", "fine_k", "check_source", "check_image"])],
        ),
        info(
            "entropy-factor",
            "infinite topological entropy of the lens of a Bernoulli system",
            "Realizes {0, 1/2} blocks as graph couplings and reads them back through F.",
            SystemUse::Unused,
            EXACT,
            "when samples > 0",
            vec![
                p("block", Some(""), "one block such as 0,1/2,0 (checked in addition to the sweep)"),
                p("exhaustive_n", Some("3"), "check every block of length ≤ this"),
                p("samples", Some("0"), "random blocks with length up to max_n"),
                p("max_n", Some("8"), "longest random block"),
            ],
            vec![csv("blocks", &["block", "F_prefix", "match"])],
        ),
        info(
            "fixed-points",
            "fixed points of the lens are exactly the self-joinings",
            "Affine dimension and basis of the lens-fixed couplings (exact nullspace).",
            SystemUse::Required,
            EXACT,
            "never",
            vec![p("expected_dimension", Some(""), "optional dimension to assert")],
            vec![csv("basis", &["index", "i", "j", "value"])],
        ),
        info(
            "periodic-commuters",
            "dense periodic points of Bernoulli lenses; odometer block commuters",
            "Bernoulli cyclic commuters are self-joinings; odometer block commuters commute with τ^{2ⁿ} and have lens period dividing 2ⁿ.",
            SystemUse::Unused,
            EXACT,
            "never",
            vec![
                p("d_max", Some("3"), "largest α-alphabet size"),
                p("ell_max", Some("2"), "largest β-alphabet size"),
                p("L_max", Some("2"), "longest cylinder"),
                p("n", Some("2"), "odometer block level (π acts on 2ⁿ points)"),
                p("m", Some("3"), "odometer level"),
            ],
            vec![
                csv("bernoulli", &["d", "ell", "L", "order", "commutes", "cycles_generator", "lens_residual"]),
                csv("odometer", &["pi", "commutes", "power_residual", "period"]),
            ],
        ),
        info(
            "one-sided-limit",
            "one-sided map and its quasi-attractor",
            "One-sided orbits: Bernoulli orbits land on the product coupling, rotation orbits stay among graph couplings.",
            SystemUse::Required,
            BOTH,
            "always",
            vec![
                p("samples", Some("20"), "number of random initial couplings"),
                p("N", Some("12"), "orbit length"),
                p("window", Some("4"), "window for hit densities"),
            ],
            vec![csv("distance", &["sample", "n", "distance_to_product", "in_target"])],
        ),
        info(
            "cesaro-barycenter",
            "Cesàro barycenters of lens orbits are self-joinings",
            "Cesàro averages of two-sided orbits have self-joining residual ≤ 2/N.",
            SystemUse::Required,
            BOTH,
            "always",
            vec![
                p("samples", Some("20"), "number of random initial couplings"),
                p("N", Some("10,100,1000"), "averaging lengths"),
            ],
            vec![csv("residual", &["sample", "N", "residual", "bound"])],
        ),
        info(
            "skew-orbit",
            "skew product acting on rotation parameters",
            "Orbit of rotation parameters under W, the invariant-torus affine map, and the conjugation identity on a rational grid.",
            SystemUse::Optional,
            EXACT,
            "never",
            vec![
                p("start", Some("0,1/4,0"), "initial (a, b, c)"),
                p("N", Some("4"), "orbit length"),
                p("grid", Some("5"), "grid size per axis for the conjugation check"),
                p("alphas", Some("1/7,2/5,3/11"), "skew parameters α (overridden by a skew system spec)"),
            ],
            vec![
                csv("orbit", &["n", "a", "b", "c"]),
                csv("conjugation", &["alpha", "points", "symbolic", "pointwise"]),
            ],
        ),
        info(
            "iet-realize",
            "density of equal-interval exchanges among couplings",
            "Random rational targets realized by equal-interval exchanges, checked by an independent mass count; plus the rounding gap.",
            SystemUse::Unused,
            EXACT,
            "always",
            vec![
                p("samples", Some("200"), "number of random targets"),
                p("k_max", Some("5"), "largest number of cells"),
                p("L_max", Some("30"), "largest denominator"),
                p("gap_k", Some("3"), "cells for the density-gap sweep"),
                p("gap_L", Some("6,60,600"), "denominators for the density-gap sweep"),
            ],
            vec![
                csv("targets", &["index", "k", "L", "intervals", "match"]),
                csv("density_gap", &["L", "distance", "bound"]),
            ],
        ),
        info(
            "group-embedding",
            "group rotations conjugated by an automorphism",
            "T ∘ R_z ∘ T⁻¹ = R_{Tz} checked pointwise for all z over Z5, (Z2)³ and Z4×Z3.",
            SystemUse::Unused,
            EXACT,
            "never",
            vec![
                p("moduli", Some(""), "custom group, e.g. 4,3 (needs automorphism)"),
                p("automorphism", Some(""), "custom integer matrix, rows separated by ';'"),
            ],
            vec![csv("checks", &["group", "automorphism", "z", "image", "matches"])],
        ),
    ]
}

pub fn lookup(name: &str) -> Option<ExperimentInfo> {
    registry().into_iter().find(|e| e.name == name)
}

/// Human-readable listing for `lens-lab list`.
pub fn listing_text() -> String {
    let mut out = String::new();
    for e in registry() {
        out.push_str(&format!("{}  [{}]\n    {}\n", e.name, e.anchor, e.description));
        let system = match e.system {
            SystemUse::Required => "system: required",
            SystemUse::Optional => "system: optional",
            SystemUse::Unused => "system: not used",
        };
        let backends: Vec<String> = e.backends.iter().map(|b| b.to_string()).collect();
        out.push_str(&format!("    {system}; backends: {}; seed: {}\n", backends.join("/"), e.seed));
        for p in &e.params {
            match &p.default {
                Some(d) if !d.is_empty() => out.push_str(&format!("    {} = {}  ({})\n", p.name, d, p.help)),
                _ => out.push_str(&format!("    {}  ({})\n", p.name, p.help)),
            }
        }
        for c in &e.csv {
            out.push_str(&format!("    csv {}: {}\n", c.series, c.columns.join(",")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_named_experiments() {
        let names: Vec<String> = registry().into_iter().map(|e| e.name).collect();
        assert_eq!(
            names,
            [
                "rigidity-sweep",
                "mixing-profile",
                "transitivity-witness",
                "entropy-factor",
                "fixed-points",
                "periodic-commuters",
                "one-sided-limit",
                "cesaro-barycenter",
                "skew-orbit",
                "iet-realize",
                "group-embedding"
            ]
        );
        assert!(registry().iter().all(|e| !e.anchor.is_empty() && !e.csv.is_empty()));
    }

    #[test]
    fn listing_round_trips_through_json() {
        let reg = registry();
        let text = serde_json::to_string(&reg).unwrap();
        let back: Vec<ExperimentInfo> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, reg);
    }
}
