//! p-characters chi in b-perp, standard Levi forms, and exact centraliser
//! computation over F_p.
//!
//! c_g(chi) = {x : chi([x, g]) = 0} is the nullspace of the pairing matrix
//! M[j][i] = chi([b_i, b_j]); the form is alternating, so the codimension is
//! even and d(chi) = codim/2 is an integer. Base change to an algebraically
//! closed field preserves these dimensions, so F_p computations suffice.

use crate::chevalley::{AlgebraElement, BasisKind, ModularLieAlgebra};
use crate::fp::FpMat;
use crate::rootsystem::Root;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinformError {
    #[error("simple-root index {0} out of range for rank {1}")]
    BadSimpleIndex(usize, usize),
    #[error("centraliser has odd codimension {0}; the pairing is not symplectic")]
    OddCodimension(usize),
}

/// A linear form on the algebra, as values on the Chevalley basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearForm {
    pub values: Vec<u8>,
}

impl LinearForm {
    pub fn zero(alg: &ModularLieAlgebra) -> Self {
        LinearForm { values: vec![0; alg.dim] }
    }

    /// chi(e_{-alpha}) = 1 exactly for alpha in I (a set of simple roots),
    /// zero elsewhere.
    pub fn standard_levi(
        alg: &ModularLieAlgebra,
        subset: &[usize],
    ) -> Result<Self, LinformError> {
        let rank = alg.sc.system.rank();
        let mut values = vec![0; alg.dim];
        for &i in subset {
            if i >= rank {
                return Err(LinformError::BadSimpleIndex(i, rank));
            }
            let k = alg
                .sc
                .system
                .positive_index(&Root::simple(rank, i).coords)
                .expect("simple root");
            values[alg.sc.neg_root_idx(k)] = 1;
        }
        Ok(LinearForm { values })
    }

    /// Regular nilpotent in standard Levi form: I = Pi.
    pub fn regular_nilpotent(alg: &ModularLieAlgebra) -> Self {
        let rank = alg.sc.system.rank();
        let subset: Vec<usize> = (0..rank).collect();
        Self::standard_levi(alg, &subset).expect("full simple set")
    }

    /// chi(x).
    pub fn apply(&self, alg: &ModularLieAlgebra, x: &AlgebraElement) -> u8 {
        let p = alg.p as u32;
        let acc: u32 = self
            .values
            .iter()
            .zip(&x.coeffs)
            .map(|(&v, &c)| v as u32 * c as u32)
            .sum();
        (acc % p) as u8
    }

    /// True when chi vanishes on b = h + n^+.
    pub fn is_b_perp(&self, alg: &ModularLieAlgebra) -> bool {
        (0..alg.dim).all(|i| match alg.sc.basis_kind(i) {
            BasisKind::NegRoot(_) => true,
            _ => self.values[i] == 0,
        })
    }

    /// True when chi vanishes on n^+.
    pub fn vanishes_on_n_plus(&self, alg: &ModularLieAlgebra) -> bool {
        (0..alg.dim).all(|i| match alg.sc.basis_kind(i) {
            BasisKind::PosRoot(_) => self.values[i] == 0,
            _ => true,
        })
    }

    /// Delta: the negative roots where chi is nonzero.
    pub fn delta_support(&self, alg: &ModularLieAlgebra) -> Vec<Root> {
        let mut out = Vec::new();
        for i in 0..alg.dim {
            if self.values[i] != 0 {
                if let BasisKind::NegRoot(k) = alg.sc.basis_kind(i) {
                    out.push(alg.sc.system.positive[k].negated());
                }
            }
        }
        out
    }
}

/// Centraliser of a p-character (or of an element), with an echelonised
/// basis.
#[derive(Debug, Clone, Serialize)]
pub struct CentralizerReport {
    pub r#type: String,
    pub p: u8,
    pub chi_support: Vec<Vec<i16>>,
    pub dim: usize,
    pub d_chi: Option<usize>,
    pub basis: Vec<Vec<u8>>,
}

impl CentralizerReport {
    pub fn basis_elements(&self) -> Vec<AlgebraElement> {
        self.basis.iter().map(|v| AlgebraElement { coeffs: v.clone() }).collect()
    }

    pub fn contains(&self, alg: &ModularLieAlgebra, x: &AlgebraElement) -> bool {
        let mut ech = crate::fp::Echelon::new(alg.p, x.coeffs.len());
        for row in &self.basis {
            ech.insert(row.clone());
        }
        ech.contains(&x.coeffs)
    }
}

/// The pairing matrix M[j][i] = chi([b_i, b_j]).
fn pairing_matrix(alg: &ModularLieAlgebra, chi: &LinearForm) -> FpMat {
    let mut m = FpMat::zeros(alg.p, alg.dim, alg.dim);
    let p = alg.p as u32;
    for i in 0..alg.dim {
        for j in 0..alg.dim {
            let acc: u32 = alg
                .terms(i, j)
                .iter()
                .map(|&(o, c)| c as u32 * chi.values[o as usize] as u32)
                .sum();
            let v = (acc % p) as u8;
            if v != 0 {
                m.set(j, i, v);
            }
        }
    }
    m
}

/// c_g(chi) as the nullspace of the pairing matrix. Deterministic: the basis
/// is in reduced echelon form.
pub fn centralizer(alg: &ModularLieAlgebra, chi: &LinearForm) -> CentralizerReport {
    let m = pairing_matrix(alg, chi);
    let ns = m.nullspace();
    CentralizerReport {
        r#type: alg.type_name(),
        p: alg.p,
        chi_support: chi
            .delta_support(alg)
            .iter()
            .map(|r| r.coords.clone())
            .collect(),
        dim: ns.rows,
        d_chi: None,
        basis: ns.rows_as_vecs(),
    }
}

/// Kernel of ad(e) for an algebra element, echelonised.
pub fn element_centralizer(alg: &ModularLieAlgebra, e: &AlgebraElement) -> CentralizerReport {
    let ns = alg.ad_matrix(e).nullspace();
    CentralizerReport {
        r#type: alg.type_name(),
        p: alg.p,
        chi_support: Vec::new(),
        dim: ns.rows,
        d_chi: None,
        basis: ns.rows_as_vecs(),
    }
}

/// d(chi) = codim(c_g(chi)) / 2. Odd codimension is reported as an error:
/// the pairing matrix is alternating, so this signals an internal
/// inconsistency worth inspecting.
pub fn d_chi(alg: &ModularLieAlgebra, chi: &LinearForm) -> Result<usize, LinformError> {
    let report = centralizer(alg, chi);
    let codim = alg.dim - report.dim;
    if codim % 2 != 0 {
        return Err(LinformError::OddCodimension(codim));
    }
    Ok(codim / 2)
}

/// Regular nilpotent element e = sum of the simple positive root vectors.
pub fn regular_nilpotent_element(alg: &ModularLieAlgebra) -> AlgebraElement {
    let rank = alg.sc.system.rank();
    let mut e = AlgebraElement::zero(alg.dim);
    for i in 0..rank {
        let k = alg
            .sc
            .system
            .positive_index(&Root::simple(rank, i).coords)
            .expect("simple root");
        e.coeffs[alg.sc.pos_root_idx(k)] = 1;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::{build_structure_constants, reduce_mod_p, Convention};
    use crate::rootsystem::{RootSystem, TypeLabel};

    fn algebra(label: TypeLabel, rank: usize, p: u8) -> ModularLieAlgebra {
        let sc = build_structure_constants(RootSystem::of(label, rank).unwrap(), Convention::Sage);
        reduce_mod_p(&sc, p).unwrap()
    }

    #[test]
    fn standard_levi_values() {
        let alg = algebra(TypeLabel::G, 2, 2);
        let chi = LinearForm::regular_nilpotent(&alg);
        // Nonzero exactly on e_{-a1}, e_{-a2}.
        let nonzero: Vec<usize> = chi
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(nonzero, vec![0, 1]);
        assert!(chi.is_b_perp(&alg));
        let chi0 = LinearForm::zero(&alg);
        assert!(chi0.values.iter().all(|&v| v == 0));
        let chi1 = LinearForm::standard_levi(&alg, &[0]).unwrap();
        assert_eq!(chi1.values.iter().filter(|&&v| v != 0).count(), 1);
        assert!(LinearForm::standard_levi(&alg, &[5]).is_err());
    }

    #[test]
    fn delta_support_cases() {
        let alg = algebra(TypeLabel::G, 2, 3);
        let chi = LinearForm::regular_nilpotent(&alg);
        let delta = chi.delta_support(&alg);
        let coords: Vec<Vec<i16>> = delta.iter().map(|r| r.coords.clone()).collect();
        assert_eq!(coords, vec![vec![-1, 0], vec![0, -1]]);
        assert!(LinearForm::zero(&alg).delta_support(&alg).is_empty());
    }

    #[test]
    fn g2_p2_centralizer_dim_and_basis() {
        let alg = algebra(TypeLabel::G, 2, 2);
        let chi = LinearForm::regular_nilpotent(&alg);
        let report = centralizer(&alg, &chi);
        assert_eq!(report.dim, 4);
        assert_eq!(d_chi(&alg, &chi).unwrap(), 5);
        // Spanned by e_{-2a-b}, e_a + e_b, e_{a+b}, e_{3a+2b}.
        let dim = alg.dim;
        let mut v1 = AlgebraElement::zero(dim);
        v1.coeffs[alg.sc.neg_root_idx(3)] = 1; // -(2a+b)
        let mut v2 = AlgebraElement::zero(dim);
        v2.coeffs[alg.sc.pos_root_idx(0)] = 1;
        v2.coeffs[alg.sc.pos_root_idx(1)] = 1;
        let mut v3 = AlgebraElement::zero(dim);
        v3.coeffs[alg.sc.pos_root_idx(2)] = 1; // a+b
        let mut v4 = AlgebraElement::zero(dim);
        v4.coeffs[alg.sc.pos_root_idx(5)] = 1; // 3a+2b
        for v in [&v1, &v2, &v3, &v4] {
            assert!(report.contains(&alg, v));
        }
    }

    #[test]
    fn zero_chi_centralizer_is_everything() {
        let alg = algebra(TypeLabel::G, 2, 3);
        let chi = LinearForm::zero(&alg);
        assert_eq!(centralizer(&alg, &chi).dim, alg.dim);
        assert_eq!(d_chi(&alg, &chi).unwrap(), 0);
    }

    #[test]
    fn g2_table1_row() {
        // (G2, 3): dim c_g(e) = 3, dim c_g(chi) = 2.
        let alg = algebra(TypeLabel::G, 2, 3);
        let e = regular_nilpotent_element(&alg);
        assert_eq!(element_centralizer(&alg, &e).dim, 3);
        let chi = LinearForm::regular_nilpotent(&alg);
        assert_eq!(centralizer(&alg, &chi).dim, 2);
        // ad rank 14 - 3 = 11.
        assert_eq!(alg.ad_matrix(&e).rank(), 11);
        // e = 0 centralises everything.
        assert_eq!(
            element_centralizer(&alg, &AlgebraElement::zero(alg.dim)).dim,
            alg.dim
        );
    }

    #[test]
    fn centralizer_dim_is_convention_invariant() {
        for p in [2u8, 3] {
            let mut dims = Vec::new();
            for conv in [Convention::Sage, Convention::Extraspecial] {
                let sc =
                    build_structure_constants(RootSystem::of(TypeLabel::G, 2).unwrap(), conv);
                let alg = reduce_mod_p(&sc, p).unwrap();
                let chi = LinearForm::regular_nilpotent(&alg);
                dims.push(centralizer(&alg, &chi).dim);
            }
            assert_eq!(dims[0], dims[1]);
        }
    }
}
