use lens_core::zoo::{
    automorphism_permutation, group_rotation_conjugation, rotation_permutation, FiniteAbelianGroup, GroupAutomorphism,
};

use super::invalid;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{ExperimentReport, Series};

type Case = (Vec<u64>, Vec<Vec<Vec<i64>>>);

/// Z5, (Z2)³ and Z4×Z3, each with three automorphisms.
fn default_cases() -> Vec<Case> {
    vec![
        (vec![5], vec![vec![vec![2]], vec![vec![3]], vec![vec![4]]]),
        (
            vec![2, 2, 2],
            vec![
                vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]],
                vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]],
                vec![vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 1]],
            ],
        ),
        (
            vec![4, 3],
            vec![
                vec![vec![3, 0], vec![0, 1]],
                vec![vec![1, 0], vec![0, 2]],
                vec![vec![3, 0], vec![0, 2]],
            ],
        ),
    ]
}

pub(super) struct Plan {
    cases: Vec<(FiniteAbelianGroup, Vec<GroupAutomorphism>)>,
}

fn parse_matrix(raw: &str) -> Result<Vec<Vec<i64>>> {
    raw.split(';')
        .map(|row| crate::config::parse_list::<i64>("automorphism", row))
        .collect()
}

pub(super) fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let custom = match (cfg.param("moduli"), cfg.param("automorphism")) {
        (None | Some(""), None | Some("")) => None,
        (Some(m), Some(a)) if !m.is_empty() && !a.is_empty() => Some((
            crate::config::parse_list::<u64>("moduli", m)?,
            vec![parse_matrix(a)?],
        )),
        _ => return Err(invalid("moduli and automorphism must be given together")),
    };
    let raw = custom.map_or_else(default_cases, |c| vec![c]);
    let mut cases = Vec::new();
    for (moduli, autos) in raw {
        let g = FiniteAbelianGroup::new(moduli)?;
        let autos = autos
            .into_iter()
            .map(|m| GroupAutomorphism::new(g.clone(), m))
            .collect::<lens_core::Result<Vec<_>>>()?;
        cases.push((g, autos));
    }
    Ok(Plan { cases })
}

fn fmt_element(x: &[u64]) -> String {
    let parts: Vec<String> = x.iter().map(u64::to_string).collect();
    parts.join(" ")
}

fn fmt_group(g: &FiniteAbelianGroup) -> String {
    let parts: Vec<String> = g.moduli().iter().map(|m| format!("Z{m}")).collect();
    parts.join("x")
}

pub(super) fn execute(_cfg: &ExperimentConfig, plan: &Plan, report: &mut ExperimentReport) -> Result<()> {
    let mut series = Series::new(&["group", "automorphism", "z", "image", "matches"]);
    let mut ok = true;
    let mut checks = 0usize;
    for (g, autos) in &plan.cases {
        for (ai, t) in autos.iter().enumerate() {
            let tp = automorphism_permutation(t);
            let tp_inv = tp.inverse();
            for z in g.elements() {
                let res = group_rotation_conjugation(t, &z)?;
                // Second route: compose the permutations of the group elements.
                let composed = tp.compose(&rotation_permutation(g, &z)).compose(&tp_inv);
                let matches = res.composite_matches && composed == rotation_permutation(g, &res.image);
                ok &= matches;
                checks += 1;
                series.push(vec![
                    fmt_group(g),
                    ai.to_string(),
                    fmt_element(&z),
                    fmt_element(&res.image),
                    matches.to_string(),
                ]);
            }
        }
    }
    report.add_series("checks", series);
    report.scalar("checks", checks);
    report.verdict(
        "conjugated_rotation_is_rotation_by_image",
        ok,
        format!("T∘R_z∘T⁻¹ = R_(Tz) for all z, {checks} checks"),
    );
    Ok(())
}
