//! The shipped scenario file: expectations for the eleven exceptional
//! (type, p) cases, with centraliser bases, p-closed subsets and induction
//! subalgebras as data, and a runner that recomputes everything and diffs.

use crate::chevalley::{
    build_structure_constants, reduce_mod_p, AlgebraElement, Convention, ModularLieAlgebra,
};
use crate::divisibility::{
    best_bound, bound_p_closed, is_p_closed, verify_induction_subalgebra, BoundMethod, PsiSubset,
    SubalgebraCandidate,
};
use crate::linform::{centralizer, d_chi, element_centralizer, regular_nilpotent_element, LinearForm};
use crate::rootsystem::{parse_type, Root, RootSystem};
use crate::weights::orbit_count;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const APPENDIX_JSON: &str = include_str!("../data/appendix.json");

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario file malformed: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("scenario {id}: {0}", id = .1)]
    Invalid(String, String),
}

#[derive(Debug, Clone, Deserialize)]
pub struct ScenarioFile {
    pub format: String,
    pub comment: String,
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub r#type: String,
    pub p: u8,
    /// "regular" (I = Pi) or an explicit list of 1-based simple indices.
    pub chi: serde_json::Value,
    pub expected: Expected,
    pub centralizer_basis: Option<Vec<Vec<Term>>>,
    /// None: no Psi shipped. Some(list): Psi = Phi^+ minus the listed roots.
    pub psi_omits: Option<Vec<Vec<i16>>>,
    pub subalgebra: Option<SubalgebraSpec>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Expected {
    pub dim_c_e: Labeled,
    pub dim_c_chi: Labeled,
    pub d_chi: Labeled,
    pub exponent: Labeled,
    pub method: String,
    pub orbit_count: Option<Labeled>,
}

/// An expected integer with its provenance label.
#[derive(Debug, Clone, Deserialize)]
pub struct Labeled {
    pub value: usize,
    pub provenance: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Term {
    pub c: i64,
    #[serde(default)]
    pub e: Option<Vec<i16>>,
    #[serde(default)]
    pub h: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SubalgebraSpec {
    pub expected_dim: Labeled,
    pub expected_exponent: Labeled,
    /// Include e_beta for every positive root beta not listed here.
    pub all_positive_except: Vec<Vec<i16>>,
    pub extra_generators: Vec<Vec<Term>>,
}

pub fn load_appendix() -> Result<ScenarioFile, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(APPENDIX_JSON)?;
    Ok(file)
}

/// Decode a term list into an algebra element, validating every root.
pub fn decode_terms(
    alg: &ModularLieAlgebra,
    terms: &[Term],
) -> Result<AlgebraElement, String> {
    let mut x = AlgebraElement::zero(alg.dim);
    let p = alg.p as i64;
    for t in terms {
        let c = t.c.rem_euclid(p) as u8;
        match (&t.e, t.h) {
            (Some(coords), None) => {
                let root = alg
                    .sc
                    .system
                    .root_from_coords(coords)
                    .map_err(|e| e.to_string())?;
                let idx = alg.sc.root_vector_idx(&root);
                x.coeffs[idx] = ((x.coeffs[idx] as i64 + c as i64).rem_euclid(p)) as u8;
            }
            (None, Some(h)) => {
                if h == 0 || h > alg.sc.system.rank() {
                    return Err(format!("h index {h} out of range"));
                }
                let idx = alg.sc.toral_idx(h - 1);
                x.coeffs[idx] = ((x.coeffs[idx] as i64 + c as i64).rem_euclid(p)) as u8;
            }
            _ => return Err("term must set exactly one of e/h".to_string()),
        }
    }
    Ok(x)
}

fn decode_chi(
    alg: &ModularLieAlgebra,
    spec: &serde_json::Value,
) -> Result<LinearForm, String> {
    if spec == "regular" {
        Ok(LinearForm::regular_nilpotent(alg))
    } else if spec == "zero" {
        Ok(LinearForm::zero(alg))
    } else {
        let subset: Vec<usize> = serde_json::from_value(spec.clone())
            .map_err(|e| format!("bad chi spec: {e}"))?;
        let zero_based: Vec<usize> = subset.iter().map(|&i| i.wrapping_sub(1)).collect();
        LinearForm::standard_levi(alg, &zero_based).map_err(|e| e.to_string())
    }
}

/// One line of scenario verification output.
#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub id: String,
    pub r#type: String,
    pub p: u8,
    pub convention: String,
    pub pass: bool,
    pub checks: Vec<CheckLine>,
    /// New data computed by this run (no external expectation).
    pub computed: serde_json::Value,
}

fn check(checks: &mut Vec<CheckLine>, name: &str, expected: impl ToString, actual: impl ToString) {
    let e = expected.to_string();
    let a = actual.to_string();
    checks.push(CheckLine { name: name.to_string(), pass: e == a, expected: e, actual: a });
}

/// Recompute everything a scenario asserts and diff against the shipped
/// expectations. `with_orbits` additionally runs the dot-orbit census
/// (skippable because E8 p=5 enumerates 5^8 weights).
pub fn run_scenario(
    scenario: &Scenario,
    convention: Convention,
    with_orbits: bool,
) -> Result<ScenarioReport, ScenarioError> {
    let bad = |m: String| ScenarioError::Invalid(m.clone(), scenario.id.clone());
    let (label, rank) =
        parse_type(&scenario.r#type).map_err(|e| bad(e.to_string()))?;
    let system = RootSystem::of(label, rank).map_err(|e| bad(e.to_string()))?;
    let sc = build_structure_constants(system, convention);
    let alg = reduce_mod_p(&sc, scenario.p).map_err(|e| bad(e.to_string()))?;
    let chi = decode_chi(&alg, &scenario.chi).map_err(bad)?;

    let mut checks = Vec::new();
    let mut computed = serde_json::Map::new();

    // Centraliser dimensions (Table 1).
    let e = regular_nilpotent_element(&alg);
    check(&mut checks, "dim_c_e", scenario.expected.dim_c_e.value, element_centralizer(&alg, &e).dim);
    let c_report = centralizer(&alg, &chi);
    check(&mut checks, "dim_c_chi", scenario.expected.dim_c_chi.value, c_report.dim);
    match d_chi(&alg, &chi) {
        Ok(d) => check(&mut checks, "d_chi", scenario.expected.d_chi.value, d),
        Err(e) => check(&mut checks, "d_chi", scenario.expected.d_chi.value, format!("error: {e}")),
    }

    // Divisibility exponent via the shipped route.
    let extra_psi: Vec<PsiSubset> = match &scenario.psi_omits {
        Some(omits) => {
            let psi = PsiSubset::complement_of(&alg.sc.system, omits)
                .ok_or_else(|| bad("psi omits a non-root".to_string()))?;
            vec![psi]
        }
        None => Vec::new(),
    };
    match best_bound(&alg, &chi, &extra_psi) {
        Ok(r) => {
            check(&mut checks, "exponent", scenario.expected.exponent.value, r.exponent);
            let method = match r.method {
                BoundMethod::Nonspecial => "nonspecial",
                BoundMethod::PClosed => "p_closed",
                BoundMethod::Unipotent => "unipotent",
                BoundMethod::Induction => "induction",
            };
            check(&mut checks, "method", &scenario.expected.method, method);
        }
        Err(e) => check(&mut checks, "exponent", scenario.expected.exponent.value, format!("error: {e}")),
    }

    // Shipped Psi certification.
    if let [psi] = extra_psi.as_slice() {
        let ok = is_p_closed(&alg.sc.system, psi, alg.p).is_ok();
        check(&mut checks, "psi_p_closed", true, ok);
        match bound_p_closed(&alg, psi, &chi) {
            Ok(r) => check(&mut checks, "psi_exponent", scenario.expected.exponent.value, r.exponent),
            Err(e) => check(&mut checks, "psi_exponent", scenario.expected.exponent.value, format!("error: {e}")),
        }
    }

    // Shipped centraliser basis: count and membership of every vector.
    if let Some(basis) = &scenario.centralizer_basis {
        check(&mut checks, "basis_count", scenario.expected.dim_c_chi.value, basis.len());
        for (i, terms) in basis.iter().enumerate() {
            let x = decode_terms(&alg, terms).map_err(&bad)?;
            check(
                &mut checks,
                &format!("basis_vector_{}", i + 1),
                true,
                c_report.contains(&alg, &x),
            );
        }
    }

    // Induction subalgebra.
    if let Some(sub) = &scenario.subalgebra {
        let mut generators = Vec::new();
        let except: Vec<Root> = sub
            .all_positive_except
            .iter()
            .map(|c| alg.sc.system.root_from_coords(c))
            .collect::<Result<_, _>>()
            .map_err(|e| bad(e.to_string()))?;
        for (k, root) in alg.sc.system.positive.iter().enumerate() {
            if !except.iter().any(|r| r == root) {
                generators.push(AlgebraElement::basis(alg.dim, alg.sc.pos_root_idx(k)));
            }
        }
        for terms in &sub.extra_generators {
            generators.push(decode_terms(&alg, terms).map_err(&bad)?);
        }
        match verify_induction_subalgebra(&alg, &chi, &SubalgebraCandidate { generators }) {
            Ok(r) => {
                check(&mut checks, "subalgebra_dim", sub.expected_dim.value, r.witness["dim_r"].as_u64().unwrap_or(0));
                check(&mut checks, "subalgebra_exponent", sub.expected_exponent.value, r.exponent);
            }
            Err(e) => {
                check(&mut checks, "subalgebra_dim", sub.expected_dim.value, format!("error: {e}"));
            }
        }
    }

    // Dot-orbit census: paper value for G2 p=3, fresh data elsewhere.
    if with_orbits {
        let report = orbit_count(&alg.sc.system, alg.p);
        match &scenario.expected.orbit_count {
            Some(l) => check(&mut checks, "orbit_count", l.value, report.orbit_count),
            None => {
                computed.insert("orbit_count".to_string(), serde_json::json!(report.orbit_count));
                computed.insert("orbit_sizes".to_string(), serde_json::json!(report.orbit_sizes));
            }
        }
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(ScenarioReport {
        id: scenario.id.clone(),
        r#type: scenario.r#type.clone(),
        p: scenario.p,
        convention: convention.name().to_string(),
        pass,
        checks,
        computed: serde_json::Value::Object(computed),
    })
}

/// Run every scenario (in file order) on a rayon pool; output order fixed.
pub fn run_all(
    file: &ScenarioFile,
    convention: Convention,
    with_orbits: bool,
) -> Result<Vec<ScenarioReport>, ScenarioError> {
    use rayon::prelude::*;
    file.scenarios
        .par_iter()
        .map(|s| run_scenario(s, convention, with_orbits))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn appendix_parses_and_roots_decode() {
        let file = load_appendix().unwrap();
        assert_eq!(file.format, "modlie-appendix-v1");
        assert_eq!(file.scenarios.len(), 11);
        // Every listed root must exist in its root system.
        for s in &file.scenarios {
            let (label, rank) = parse_type(&s.r#type).unwrap();
            let system = RootSystem::of(label, rank).unwrap();
            let all_terms = s
                .centralizer_basis
                .iter()
                .flatten()
                .flatten()
                .chain(s.subalgebra.iter().flat_map(|sub| sub.extra_generators.iter().flatten()));
            for t in all_terms {
                if let Some(coords) = &t.e {
                    assert!(
                        system.is_root_coords(coords),
                        "{}: {:?} is not a root",
                        s.id,
                        coords
                    );
                }
            }
            for omit in s.psi_omits.iter().flatten() {
                assert!(system.positive_index(omit).is_some(), "{}: bad psi omit", s.id);
            }
        }
    }

    #[test]
    fn g2_scenarios_pass() {
        let file = load_appendix().unwrap();
        for id in ["G2p2", "G2p3"] {
            let s = file.scenarios.iter().find(|s| s.id == id).unwrap();
            let report = run_scenario(s, Convention::Sage, true).unwrap();
            assert!(report.pass, "{id}: {:#?}", report.checks);
        }
    }
}
