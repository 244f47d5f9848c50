//! Divisibility bounds for modules of reduced enveloping algebras: the
//! non-special centraliser bound, p-closed subsets of positive roots, and
//! verification of induction subalgebras.
//!
//! Each route produces a `BoundReport` certifying that every finite
//! dimensional U_chi(g)-module has dimension divisible by p^exponent, with
//! the checked witnesses attached.

use crate::chevalley::{AlgebraElement, ModularLieAlgebra};
use crate::fp::Echelon;
use crate::linform::{centralizer, d_chi, LinearForm, LinformError};
use crate::rootsystem::{Root, TypeLabel};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("p = {p} is special for type {label}; the non-special bound does not apply, use the p-closed route")]
    SpecialPrime { label: char, p: u8 },
    #[error("psi is not {p}-closed: {alpha} + {beta} leaves psi with string bound {c} not divisible by {p}")]
    NotPClosed { alpha: String, beta: String, c: i64, p: u8 },
    #[error("chi does not vanish on e_[-({0})] with the sum inside psi")]
    ChiConditionFailed(String),
    #[error("span of e_[-psi] meets the centraliser: witness {0:?}")]
    IntersectionNonzero(Vec<u8>),
    #[error(transparent)]
    Linform(#[from] LinformError),
    #[error("bracket of basis elements {i} and {j} of the candidate leaves its span")]
    ClosureViolated { i: usize, j: usize },
    #[error("chi does not vanish on the bracket of basis elements {i} and {j}")]
    ChiBracketNonzero { i: usize, j: usize },
    #[error("p-th power of basis element {idx} leaves the candidate span")]
    PPowerEscapes { idx: usize },
    #[error("chi does not vanish on the p-th power of basis element {idx}")]
    ChiPPowerNonzero { idx: usize },
    #[error("centre is not annihilated by chi; p-power values are ambiguous")]
    AmbiguousCenter,
    #[error("restricted power computation failed: {0}")]
    Chevalley(#[from] crate::chevalley::ChevalleyError),
    #[error("no divisibility route applies")]
    NoRoute,
}

/// A subset of the positive roots, by index into the canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiSubset {
    pub indices: Vec<usize>,
}

impl PsiSubset {
    pub fn full(n_positive: usize) -> Self {
        PsiSubset { indices: (0..n_positive).collect() }
    }

    pub fn empty() -> Self {
        PsiSubset { indices: Vec::new() }
    }

    /// Phi^+ minus the listed roots (by coordinates).
    pub fn complement_of(
        system: &crate::rootsystem::RootSystem,
        omitted: &[Vec<i16>],
    ) -> Option<Self> {
        let mut omit = Vec::new();
        for coords in omitted {
            omit.push(system.positive_index(coords)?);
        }
        Some(PsiSubset {
            indices: (0..system.n_positive()).filter(|i| !omit.contains(i)).collect(),
        })
    }

    pub fn from_coords(
        system: &crate::rootsystem::RootSystem,
        roots: &[Vec<i16>],
    ) -> Option<Self> {
        let mut indices = Vec::new();
        for coords in roots {
            indices.push(system.positive_index(coords)?);
        }
        indices.sort_unstable();
        Some(PsiSubset { indices })
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }
}

/// A candidate induction subalgebra r, given by a spanning set.
#[derive(Debug, Clone)]
pub struct SubalgebraCandidate {
    pub generators: Vec<AlgebraElement>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Nonspecial,
    PClosed,
    Unipotent,
    Induction,
}

/// A certified divisibility exponent: every finite-dimensional
/// U_chi(g)-module has dimension divisible by p^exponent (for the induction
/// method, the exponent is instead the log-dimension of the induced module).
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub r#type: String,
    pub p: u8,
    pub method: BoundMethod,
    pub exponent: usize,
    pub witness: serde_json::Value,
}

/// Non-special primes: p != 2 for B, C, F4 and p != 3 for G2, i.e. p divides
/// no off-diagonal Cartan entry.
pub fn is_nonspecial(label: TypeLabel, p: u8) -> bool {
    match label {
        TypeLabel::B | TypeLabel::C | TypeLabel::F => p != 2,
        TypeLabel::G => p != 3,
        _ => true,
    }
}

/// Exponent d(chi) via the Premet-Skryabin bound; refuses special primes.
pub fn bound_nonspecial(
    alg: &ModularLieAlgebra,
    chi: &LinearForm,
) -> Result<BoundReport, BoundError> {
    let label = alg.sc.system.datum.label;
    if !is_nonspecial(label, alg.p) {
        return Err(BoundError::SpecialPrime { label: label.as_char(), p: alg.p });
    }
    let d = d_chi(alg, chi)?;
    Ok(BoundReport {
        r#type: alg.type_name(),
        p: alg.p,
        method: BoundMethod::Nonspecial,
        exponent: d,
        witness: serde_json::json!({ "d_chi": d, "dim_centralizer": alg.dim - 2 * d }),
    })
}

/// Is Psi closed under addition of roots outright?
pub fn is_closed(system: &crate::rootsystem::RootSystem, psi: &PsiSubset) -> bool {
    let in_psi = membership(system, psi);
    for (a, b) in pairs(&psi.indices) {
        let sum = system.positive[a].plus(&system.positive[b]);
        if let Some(k) = system.positive_index(&sum) {
            if !in_psi[k] {
                return false;
            }
        }
    }
    true
}

/// Psi is p-closed if for all alpha, beta in Psi with alpha + beta a root,
/// either alpha + beta lies in Psi or p divides C_{gamma,delta} for every
/// gamma, delta in Psi with gamma + delta = alpha + beta.
pub fn is_p_closed(
    system: &crate::rootsystem::RootSystem,
    psi: &PsiSubset,
    p: u8,
) -> Result<(), BoundError> {
    let in_psi = membership(system, psi);
    for (a, b) in pairs(&psi.indices) {
        let sum = system.positive[a].plus(&system.positive[b]);
        let Some(k) = system.positive_index(&sum) else { continue };
        if in_psi[k] {
            continue;
        }
        // Every Psi-pair summing to the same root must have string bound
        // divisible by p.
        for (g, d) in pairs(&psi.indices) {
            let s2 = system.positive[g].plus(&system.positive[d]);
            if s2 != sum {
                continue;
            }
            let c = system
                .root_string_bound(&system.positive[g], &system.positive[d])
                .expect("distinct positive roots");
            if c % p as i64 != 0 {
                return Err(BoundError::NotPClosed {
                    alpha: system.positive[g].to_string(),
                    beta: system.positive[d].to_string(),
                    c,
                    p,
                });
            }
        }
    }
    Ok(())
}

fn membership(system: &crate::rootsystem::RootSystem, psi: &PsiSubset) -> Vec<bool> {
    let mut v = vec![false; system.n_positive()];
    for &i in &psi.indices {
        v[i] = true;
    }
    v
}

fn pairs(indices: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    indices
        .iter()
        .enumerate()
        .flat_map(move |(k, &a)| indices[k + 1..].iter().map(move |&b| (a, b)))
}

/// The p-closed route: chi must vanish on e_{-alpha-beta} for sums staying
/// in Psi, and span{e_{-alpha} : alpha in Psi} must meet c_g(chi) trivially.
/// On success the exponent is |Psi|.
pub fn bound_p_closed(
    alg: &ModularLieAlgebra,
    psi: &PsiSubset,
    chi: &LinearForm,
) -> Result<BoundReport, BoundError> {
    let system = &alg.sc.system;
    is_p_closed(system, psi, alg.p)?;
    let in_psi = membership(system, psi);
    for (a, b) in pairs(&psi.indices) {
        let sum = system.positive[a].plus(&system.positive[b]);
        if let Some(k) = system.positive_index(&sum) {
            if in_psi[k] && chi.values[alg.sc.neg_root_idx(k)] != 0 {
                return Err(BoundError::ChiConditionFailed(
                    system.positive[k].to_string(),
                ));
            }
        }
    }
    // Rank test: residues of the e_{-alpha} modulo the centraliser basis must
    // stay independent.
    let report = centralizer(alg, chi);
    let mut cbasis = Echelon::new(alg.p, alg.dim);
    for row in &report.basis {
        cbasis.insert(row.clone());
    }
    let mut residues = Echelon::new(alg.p, alg.dim);
    let mut residue_rows: Vec<Vec<u8>> = Vec::new();
    for &k in &psi.indices {
        let mut v = vec![0u8; alg.dim];
        v[alg.sc.neg_root_idx(k)] = 1;
        cbasis.reduce(&mut v);
        residue_rows.push(v.clone());
        residues.insert(v);
    }
    if residues.dim() < psi.size() {
        // Extract a dependency as a concrete witness vector in the
        // intersection.
        let r = crate::fp::FpMat::from_rows(alg.p, residue_rows).transpose();
        let kernel = r.nullspace();
        let combo = kernel.row(0);
        let mut witness = vec![0u8; alg.dim];
        for (t, &k) in psi.indices.iter().enumerate() {
            witness[alg.sc.neg_root_idx(k)] = combo[t];
        }
        return Err(BoundError::IntersectionNonzero(witness));
    }
    let method = if is_closed(system, psi) { BoundMethod::Unipotent } else { BoundMethod::PClosed };
    let omitted: Vec<String> = (0..system.n_positive())
        .filter(|k| !in_psi[*k])
        .map(|k| system.positive[k].to_string())
        .collect();
    Ok(BoundReport {
        r#type: alg.type_name(),
        p: alg.p,
        method,
        exponent: psi.size(),
        witness: serde_json::json!({
            "psi_size": psi.size(),
            "psi_omits": omitted,
            "centralizer_dim": report.dim,
        }),
    })
}

/// Verify an induction subalgebra r: bracket closure, chi([r,r]) = 0 and
/// chi(r^[p]) = 0 (with r^[p] staying in r). On success reports dim r and
/// the induced-module exponent dim g - dim r.
pub fn verify_induction_subalgebra(
    alg: &ModularLieAlgebra,
    chi: &LinearForm,
    cand: &SubalgebraCandidate,
) -> Result<BoundReport, BoundError> {
    let mut span = Echelon::new(alg.p, alg.dim);
    for g in &cand.generators {
        span.insert(g.coeffs.clone());
    }
    let dim_r = span.dim();
    let basis: Vec<AlgebraElement> = span
        .rows()
        .iter()
        .map(|r| AlgebraElement { coeffs: r.clone() })
        .collect();
    // Centre values of chi must vanish so p-power ambiguity is harmless.
    for z in alg.center() {
        if chi.apply(alg, z) != 0 {
            return Err(BoundError::AmbiguousCenter);
        }
    }
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let br = alg.bracket(&basis[i], &basis[j])?;
            if !span.contains(&br.coeffs) {
                return Err(BoundError::ClosureViolated { i, j });
            }
            if chi.apply(alg, &br) != 0 {
                return Err(BoundError::ChiBracketNonzero { i, j });
            }
        }
    }
    // Basis p-powers: chi must vanish and the power must stay in r (up to
    // the centre, which chi kills). Jacobson cross-terms for general
    // elements of r are sums of brackets of r-elements, handled above.
    let mut span_with_center = span.clone();
    for z in alg.center() {
        span_with_center.insert(z.coeffs.clone());
    }
    for (idx, x) in basis.iter().enumerate() {
        let rp = alg.restricted_power(x)?;
        if chi.apply(alg, &rp.value) != 0 {
            return Err(BoundError::ChiPPowerNonzero { idx });
        }
        if !span_with_center.contains(&rp.value.coeffs) {
            return Err(BoundError::PPowerEscapes { idx });
        }
    }
    Ok(BoundReport {
        r#type: alg.type_name(),
        p: alg.p,
        method: BoundMethod::Induction,
        exponent: alg.dim - dim_r,
        witness: serde_json::json!({
            "dim_r": dim_r,
            "induced_dim_log_p": alg.dim - dim_r,
        }),
    })
}

/// Orchestrates the divisibility routes (non-special and p-closed over Phi^+
/// plus any supplied Psi) and returns the largest certified exponent,
/// preferring the non-special certificate on ties.
pub fn best_bound(
    alg: &ModularLieAlgebra,
    chi: &LinearForm,
    extra_psi: &[PsiSubset],
) -> Result<BoundReport, BoundError> {
    let mut candidates: Vec<BoundReport> = Vec::new();
    if let Ok(r) = bound_nonspecial(alg, chi) {
        candidates.push(r);
    }
    let full = PsiSubset::full(alg.sc.system.n_positive());
    for psi in std::iter::once(&full).chain(extra_psi.iter()) {
        if let Ok(r) = bound_p_closed(alg, psi, chi) {
            candidates.push(r);
        }
    }
    candidates
        .into_iter()
        .max_by_key(|r| (r.exponent, r.method == BoundMethod::Nonspecial))
        .ok_or(BoundError::NoRoute)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::{build_structure_constants, reduce_mod_p, Convention};
    use crate::rootsystem::RootSystem;

    fn algebra(label: TypeLabel, rank: usize, p: u8) -> ModularLieAlgebra {
        let sc = build_structure_constants(RootSystem::of(label, rank).unwrap(), Convention::Sage);
        reduce_mod_p(&sc, p).unwrap()
    }

    #[test]
    fn nonspecial_rule() {
        assert!(is_nonspecial(TypeLabel::G, 2));
        assert!(!is_nonspecial(TypeLabel::G, 3));
        assert!(!is_nonspecial(TypeLabel::F, 2));
        assert!(is_nonspecial(TypeLabel::F, 3));
        assert!(is_nonspecial(TypeLabel::E, 2));
        assert!(is_nonspecial(TypeLabel::E, 3));
        assert!(!is_nonspecial(TypeLabel::B, 2));
        assert!(!is_nonspecial(TypeLabel::C, 2));
        assert!(is_nonspecial(TypeLabel::A, 2));
    }

    #[test]
    fn g2_bounds() {
        // p=2: non-special, d(chi) = 5.
        let alg = algebra(TypeLabel::G, 2, 2);
        let chi = LinearForm::regular_nilpotent(&alg);
        let r = bound_nonspecial(&alg, &chi).unwrap();
        assert_eq!(r.exponent, 5);
        // chi = 0: d = 0.
        assert_eq!(bound_nonspecial(&alg, &LinearForm::zero(&alg)).unwrap().exponent, 0);
        // p=3: special, refused; p-closed route with full Phi+ gives 6.
        let alg = algebra(TypeLabel::G, 2, 3);
        let chi = LinearForm::regular_nilpotent(&alg);
        assert!(matches!(
            bound_nonspecial(&alg, &chi),
            Err(BoundError::SpecialPrime { .. })
        ));
        let full = PsiSubset::full(6);
        let r = bound_p_closed(&alg, &full, &chi).unwrap();
        assert_eq!(r.exponent, 6);
        assert_eq!(r.method, BoundMethod::Unipotent);
        let best = best_bound(&alg, &chi, &[]).unwrap();
        assert_eq!(best.exponent, 6);
    }

    #[test]
    fn g2_p3_small_psi_not_closed() {
        let alg = algebra(TypeLabel::G, 2, 3);
        // Psi = {a1, a2}: a1+a2 is a root outside Psi with C = 1.
        let psi = PsiSubset { indices: vec![0, 1] };
        assert!(matches!(
            is_p_closed(&alg.sc.system, &psi, 3),
            Err(BoundError::NotPClosed { .. })
        ));
        // Empty Psi is trivially fine with exponent 0.
        let chi = LinearForm::regular_nilpotent(&alg);
        let r = bound_p_closed(&alg, &PsiSubset::empty(), &chi).unwrap();
        assert_eq!(r.exponent, 0);
    }

    #[test]
    fn full_psi_is_p_closed_everywhere() {
        for (label, rank, p) in [(TypeLabel::G, 2, 2u8), (TypeLabel::F, 4, 3), (TypeLabel::A, 2, 2)] {
            let rs = RootSystem::of(label, rank).unwrap();
            let full = PsiSubset::full(rs.n_positive());
            assert!(is_p_closed(&rs, &full, p).is_ok());
        }
    }

    #[test]
    fn g2_p2_full_psi_intersects_centralizer() {
        // c_g(chi) contains e_{-2a-b}, so the full n^- fails the rank test.
        let alg = algebra(TypeLabel::G, 2, 2);
        let chi = LinearForm::regular_nilpotent(&alg);
        let full = PsiSubset::full(6);
        match bound_p_closed(&alg, &full, &chi) {
            Err(BoundError::IntersectionNonzero(w)) => {
                let x = AlgebraElement { coeffs: w };
                assert!(!x.is_zero());
                assert!(centralizer(&alg, &chi).contains(&alg, &x));
            }
            other => panic!("expected intersection failure, got {other:?}"),
        }
        // best_bound falls back to the non-special route.
        let best = best_bound(&alg, &chi, &[]).unwrap();
        assert_eq!((best.exponent, best.method), (5, BoundMethod::Nonspecial));
    }

    #[test]
    fn borel_is_an_induction_subalgebra() {
        // r = b = h + n^+ always passes, with exponent N.
        let alg = algebra(TypeLabel::G, 2, 3);
        let chi = LinearForm::regular_nilpotent(&alg);
        let mut gens = Vec::new();
        for i in 0..2 {
            gens.push(AlgebraElement::basis(alg.dim, alg.sc.toral_idx(i)));
        }
        for k in 0..6 {
            gens.push(AlgebraElement::basis(alg.dim, alg.sc.pos_root_idx(k)));
        }
        let r = verify_induction_subalgebra(&alg, &chi, &SubalgebraCandidate { generators: gens })
            .unwrap();
        assert_eq!(r.exponent, 6);
        assert_eq!(r.witness["dim_r"], 8);
    }

    #[test]
    fn non_subalgebra_is_rejected() {
        // span{e_{a1}, e_{-a1}} is not closed: bracket is h_{a1}.
        let alg = algebra(TypeLabel::G, 2, 3);
        let chi = LinearForm::zero(&alg);
        let gens = vec![
            AlgebraElement::basis(alg.dim, alg.sc.pos_root_idx(0)),
            AlgebraElement::basis(alg.dim, alg.sc.neg_root_idx(0)),
        ];
        assert!(matches!(
            verify_induction_subalgebra(&alg, &chi, &SubalgebraCandidate { generators: gens }),
            Err(BoundError::ClosureViolated { .. })
        ));
    }
}
