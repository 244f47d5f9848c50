//! Root systems for the irreducible finite types, with the exceptional types
//! as the shipped focus.
//!
//! Simple roots are numbered in Springer's labelling, documented in
//! `data/simple_root_labelling.json`. For the E series this is the chain
//! `1 - 2 - ... - (rank-1)` with the branch node `rank` attached to the
//! middle (node 3 for E6, node 4 for E7, node 5 for E8); for F4 the chain
//! `1 - 2 => 3 - 4` with `1, 2` long; for G2 the short root is `alpha_1`.
//!
//! Positive roots are ordered by height, then lexicographically on their
//! coordinate vectors. This order is part of the public contract: it fixes
//! the PBW monomial order downstream.

use crate::fp::reduce_i64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Documentation of the simple-root numbering shipped with the crate.
pub const LABELLING_DOC: &str = include_str!("../data/simple_root_labelling.json");

#[derive(Debug, Error)]
pub enum RootSystemError {
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("unknown type label {0:?}")]
    UnknownType(String),
    #[error("rank {rank} is not valid for type {label}")]
    BadRank { label: char, rank: usize },
    #[error("root string of alpha against +/-alpha is degenerate")]
    DegenerateString,
    #[error("not a root of this system: {0:?}")]
    NotARoot(Vec<i16>),
}

/// One of the nine irreducible families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl TypeLabel {
    pub fn as_char(self) -> char {
        match self {
            TypeLabel::A => 'A',
            TypeLabel::B => 'B',
            TypeLabel::C => 'C',
            TypeLabel::D => 'D',
            TypeLabel::E => 'E',
            TypeLabel::F => 'F',
            TypeLabel::G => 'G',
        }
    }
}

/// Parse a label like "G2", "E8" or "a1" into (type, rank).
pub fn parse_type(s: &str) -> Result<(TypeLabel, usize), RootSystemError> {
    let s = s.trim();
    let mut chars = s.chars();
    let label = match chars.next().map(|c| c.to_ascii_uppercase()) {
        Some('A') => TypeLabel::A,
        Some('B') => TypeLabel::B,
        Some('C') => TypeLabel::C,
        Some('D') => TypeLabel::D,
        Some('E') => TypeLabel::E,
        Some('F') => TypeLabel::F,
        Some('G') => TypeLabel::G,
        _ => return Err(RootSystemError::UnknownType(s.to_string())),
    };
    let rank: usize = chars
        .as_str()
        .parse()
        .map_err(|_| RootSystemError::UnknownType(s.to_string()))?;
    validate_rank(label, rank)?;
    Ok((label, rank))
}

fn validate_rank(label: TypeLabel, rank: usize) -> Result<(), RootSystemError> {
    let ok = match label {
        TypeLabel::A => rank >= 1,
        TypeLabel::B => rank >= 2,
        TypeLabel::C => rank >= 2,
        TypeLabel::D => rank >= 3,
        TypeLabel::E => (6..=8).contains(&rank),
        TypeLabel::F => rank == 4,
        TypeLabel::G => rank == 2,
    };
    if ok {
        Ok(())
    } else {
        Err(RootSystemError::BadRank { label: label.as_char(), rank })
    }
}

/// Cartan matrix together with its declared type.
///
/// Convention: `cartan[i][j] = <alpha_j, alpha_i^vee> = alpha_j(h_i)`, i.e.
/// column `j` records the values of the `j`-th simple root on the simple
/// coroots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanDatum {
    pub label: TypeLabel,
    pub rank: usize,
    pub cartan: Vec<Vec<i16>>,
}

impl CartanDatum {
    /// The standard Cartan datum for a type in the shipped labelling.
    pub fn standard(label: TypeLabel, rank: usize) -> Result<Self, RootSystemError> {
        validate_rank(label, rank)?;
        let mut a = vec![vec![0i16; rank]; rank];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut chain = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match label {
            TypeLabel::A => {
                for i in 1..rank {
                    chain(i - 1, i);
                }
            }
            TypeLabel::B => {
                // alpha_rank short: <alpha_{r-1}, alpha_r^vee> = -2.
                for i in 1..rank {
                    chain(i - 1, i);
                }
                a[rank - 1][rank - 2] = -2;
            }
            TypeLabel::C => {
                // alpha_rank long: <alpha_r, alpha_{r-1}^vee> = -2.
                for i in 1..rank {
                    chain(i - 1, i);
                }
                a[rank - 2][rank - 1] = -2;
            }
            TypeLabel::D => {
                for i in 1..rank - 1 {
                    chain(i - 1, i);
                }
                chain(rank - 3, rank - 1);
            }
            TypeLabel::E => {
                // Chain 1..rank-1 with the branch node attached to the middle.
                for i in 1..rank - 1 {
                    chain(i - 1, i);
                }
                let attach = match rank {
                    6 => 2, // alpha_6 on alpha_3
                    7 => 3, // alpha_7 on alpha_4
                    8 => 4, // alpha_8 on alpha_5
                    _ => unreachable!(),
                };
                chain(attach, rank - 1);
            }
            TypeLabel::F => {
                chain(0, 1);
                chain(1, 2);
                chain(2, 3);
                // alpha_2 long, alpha_3 short: <alpha_2, alpha_3^vee> = -2.
                a[2][1] = -2;
            }
            TypeLabel::G => {
                // alpha_1 short, alpha_2 long: <alpha_2, alpha_1^vee> = -3.
                chain(0, 1);
                a[0][1] = -3;
            }
        }
        Ok(CartanDatum { label, rank, cartan: a })
    }

    pub fn validate(&self) -> Result<(), RootSystemError> {
        let n = self.rank;
        if self.cartan.len() != n || self.cartan.iter().any(|r| r.len() != n) {
            return Err(RootSystemError::InvalidCartan(format!(
                "matrix shape does not match rank {n}"
            )));
        }
        for i in 0..n {
            if self.cartan[i][i] != 2 {
                return Err(RootSystemError::InvalidCartan(format!(
                    "diagonal entry [{i}][{i}] = {} != 2",
                    self.cartan[i][i]
                )));
            }
            for j in 0..n {
                if i != j {
                    let v = self.cartan[i][j];
                    if !(-3..=0).contains(&v) {
                        return Err(RootSystemError::InvalidCartan(format!(
                            "off-diagonal entry [{i}][{j}] = {v} outside {{0,-1,-2,-3}}"
                        )));
                    }
                    if (v == 0) != (self.cartan[j][i] == 0) {
                        return Err(RootSystemError::InvalidCartan(format!(
                            "zero pattern not symmetric at [{i}][{j}]"
                        )));
                    }
                }
            }
        }
        let standard = CartanDatum::standard(self.label, self.rank)?;
        if standard.cartan != self.cartan {
            return Err(RootSystemError::InvalidCartan(format!(
                "matrix does not match type {}{} in the shipped labelling",
                self.label.as_char(),
                self.rank
            )));
        }
        Ok(())
    }

    /// Symmetrizer entries d_i = (alpha_i, alpha_i)/2, normalised so the
    /// short roots have d = 1.
    pub fn symmetrizer(&self) -> Vec<i16> {
        match self.label {
            TypeLabel::A | TypeLabel::D | TypeLabel::E => vec![1; self.rank],
            TypeLabel::B => {
                let mut d = vec![2; self.rank];
                d[self.rank - 1] = 1;
                d
            }
            TypeLabel::C => {
                let mut d = vec![1; self.rank];
                d[self.rank - 1] = 2;
                d
            }
            TypeLabel::F => vec![2, 2, 1, 1],
            TypeLabel::G => vec![1, 3],
        }
    }

    /// Number of positive roots, the classical count.
    pub fn positive_root_count(&self) -> usize {
        let n = self.rank;
        match self.label {
            TypeLabel::A => n * (n + 1) / 2,
            TypeLabel::B | TypeLabel::C => n * n,
            TypeLabel::D => n * (n - 1),
            TypeLabel::E => match n {
                6 => 36,
                7 => 63,
                8 => 120,
                _ => unreachable!(),
            },
            TypeLabel::F => 24,
            TypeLabel::G => 6,
        }
    }

    /// Order of the Weyl group.
    pub fn weyl_order(&self) -> u64 {
        let n = self.rank as u64;
        let fact = |k: u64| (1..=k).product::<u64>();
        match self.label {
            TypeLabel::A => fact(n + 1),
            TypeLabel::B | TypeLabel::C => (1u64 << n) * fact(n),
            TypeLabel::D => (1u64 << (n - 1)) * fact(n),
            TypeLabel::E => match n {
                6 => 51_840,
                7 => 2_903_040,
                8 => 696_729_600,
                _ => unreachable!(),
            },
            TypeLabel::F => 1_152,
            TypeLabel::G => 12,
        }
    }

    pub fn type_name(&self) -> String {
        format!("{}{}", self.label.as_char(), self.rank)
    }
}

/// A root, stored as its integer coordinates in the simple-root basis.
/// All coordinates are >= 0 (positive root) or all <= 0 (negative root).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub coords: Vec<i16>,
}

impl Root {
    pub fn simple(rank: usize, i: usize) -> Root {
        let mut coords = vec![0; rank];
        coords[i] = 1;
        Root { coords }
    }

    pub fn is_positive(&self) -> bool {
        self.coords.iter().any(|&c| c > 0)
    }

    pub fn negated(&self) -> Root {
        Root { coords: self.coords.iter().map(|&c| -c).collect() }
    }

    pub fn height(&self) -> i32 {
        self.coords.iter().map(|&c| c as i32).sum()
    }

    pub fn plus(&self, other: &Root) -> Vec<i16> {
        self.coords.iter().zip(&other.coords).map(|(&a, &b)| a + b).collect()
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "{}", if c > 0 { "+" } else { "-" })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            if a != 1 {
                write!(f, "{a}")?;
            }
            write!(f, "a{}", i + 1)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A full root system: the Cartan datum plus the generated, ordered list of
/// positive roots and index maps. Immutable after construction.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub datum: CartanDatum,
    /// Positive roots ordered by (height, lexicographic coords).
    pub positive: Vec<Root>,
    /// Discovery rank of positive[k] in the closure generation (BFS by
    /// height, parents in order, simple indices ascending).
    pub gen_order: Vec<usize>,
    index: HashMap<Vec<i16>, usize>,
    d: Vec<i16>,
}

/// Generates all positive roots of a valid irreducible Cartan datum.
///
/// Standard closure algorithm: grow by height using the root-string relation
/// `<beta, alpha_i^vee> = p - q`, where p counts the descents
/// `beta - k alpha_i` that are roots.
pub fn build_root_system(datum: CartanDatum) -> Result<RootSystem, RootSystemError> {
    datum.validate()?;
    let rank = datum.rank;
    let mut all: Vec<Root> = (0..rank).map(|i| Root::simple(rank, i)).collect();
    let mut seen: HashMap<Vec<i16>, usize> = all
        .iter()
        .enumerate()
        .map(|(i, r)| (r.coords.clone(), i))
        .collect();
    let mut frontier: Vec<usize> = (0..all.len()).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &bi in &frontier {
            for i in 0..rank {
                let beta = all[bi].clone();
                // p = max k with beta - k*alpha_i a root (or zero counts stop).
                let mut p = 0i16;
                loop {
                    let mut down = beta.coords.clone();
                    down[i] -= p + 1;
                    if down.iter().all(|&c| c == 0) || seen.contains_key(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i16 = beta
                    .coords
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| c * datum.cartan[i][j])
                    .sum();
                let q = p - pairing;
                if q > 0 {
                    let mut up = beta.coords.clone();
                    up[i] += 1;
                    if !seen.contains_key(&up) {
                        seen.insert(up.clone(), all.len());
                        all.push(Root { coords: up });
                        next.push(all.len() - 1);
                    }
                }
            }
        }
        frontier = next;
    }
    let discovery: HashMap<Vec<i16>, usize> = all
        .iter()
        .enumerate()
        .map(|(i, r)| (r.coords.clone(), i))
        .collect();
    let mut positive = all;
    // Height-major; within a height, lexicographic with alpha_1 heaviest, so
    // the simple roots appear in index order.
    positive.sort_by_key(|r| (r.height(), r.coords.iter().map(|&c| -c).collect::<Vec<i16>>()));
    if positive.len() != datum.positive_root_count() {
        return Err(RootSystemError::InvalidCartan(format!(
            "generated {} positive roots for {}, expected {}",
            positive.len(),
            datum.type_name(),
            datum.positive_root_count()
        )));
    }
    let gen_order: Vec<usize> = positive.iter().map(|r| discovery[&r.coords]).collect();
    let mut index = HashMap::new();
    for (i, r) in positive.iter().enumerate() {
        index.insert(r.coords.clone(), i);
    }
    let d = datum.symmetrizer();
    Ok(RootSystem { datum, positive, gen_order, index, d })
}

impl RootSystem {
    pub fn of(label: TypeLabel, rank: usize) -> Result<RootSystem, RootSystemError> {
        build_root_system(CartanDatum::standard(label, rank)?)
    }

    pub fn rank(&self) -> usize {
        self.datum.rank
    }

    /// N = |Phi^+|.
    pub fn n_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn is_root_coords(&self, coords: &[i16]) -> bool {
        if coords.iter().all(|&c| c >= 0) {
            self.index.contains_key(coords)
        } else {
            let neg: Vec<i16> = coords.iter().map(|&c| -c).collect();
            self.index.contains_key(&neg)
        }
    }

    /// Index of a positive root in the canonical order.
    pub fn positive_index(&self, coords: &[i16]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    pub fn root_from_coords(&self, coords: &[i16]) -> Result<Root, RootSystemError> {
        if self.is_root_coords(coords) {
            Ok(Root { coords: coords.to_vec() })
        } else {
            Err(RootSystemError::NotARoot(coords.to_vec()))
        }
    }

    /// (gamma, gamma) with short roots of squared length 2.
    pub fn length_sq(&self, root: &Root) -> i64 {
        let mut s: i64 = 0;
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                // (alpha_i, alpha_j) = d_i * cartan[i][j]
                s += root.coords[i] as i64
                    * root.coords[j] as i64
                    * self.d[i] as i64
                    * self.datum.cartan[i][j] as i64;
            }
        }
        s
    }

    /// Value gamma(h_i) = <gamma, alpha_i^vee>.
    pub fn pairing_with_simple_coroot(&self, root: &Root, i: usize) -> i64 {
        root.coords
            .iter()
            .enumerate()
            .map(|(j, &c)| c as i64 * self.datum.cartan[i][j] as i64)
            .sum()
    }

    /// Integer expansion of gamma^vee in the simple coroots:
    /// gamma^vee = sum_i k_i alpha_i^vee with k_i = c_i d_i / d_gamma.
    pub fn coroot_coords(&self, root: &Root) -> Vec<i64> {
        let d_gamma = self.length_sq(root) / 2;
        (0..self.rank())
            .map(|i| {
                let num = root.coords[i] as i64 * self.d[i] as i64;
                debug_assert_eq!(num % d_gamma, 0);
                num / d_gamma
            })
            .collect()
    }

    /// The simple reflection s_i applied to a root (exact, over Z).
    pub fn reflect(&self, i: usize, root: &Root) -> Root {
        assert!(i < self.rank(), "invalid simple index");
        let pairing = self.pairing_with_simple_coroot(root, i) as i16;
        let mut coords = root.coords.clone();
        coords[i] -= pairing;
        Root { coords }
    }

    /// The simple reflection on an integral weight in fundamental-weight
    /// coordinates mod p: subtracts coords[i] times the i-th Cartan column.
    pub fn reflect_weight_mod_p(&self, i: usize, coords: &[u8], p: u8) -> Vec<u8> {
        assert!(i < self.rank(), "invalid simple index");
        let ci = coords[i] as i64;
        coords
            .iter()
            .enumerate()
            .map(|(j, &c)| reduce_i64(c as i64 - ci * self.datum.cartan[j][i] as i64, p))
            .collect()
    }

    /// C_{alpha,beta} = q + 1 where q is maximal with beta - q*alpha a root.
    pub fn root_string_bound(&self, alpha: &Root, beta: &Root) -> Result<i64, RootSystemError> {
        if alpha.coords == beta.coords || alpha.negated().coords == beta.coords {
            return Err(RootSystemError::DegenerateString);
        }
        let mut q = 0i64;
        loop {
            let down: Vec<i16> = beta
                .coords
                .iter()
                .zip(&alpha.coords)
                .map(|(&b, &a)| b - (q as i16 + 1) * a)
                .collect();
            if self.is_root_coords(&down) {
                q += 1;
            } else {
                break;
            }
        }
        Ok(q + 1)
    }

    /// All roots (positive then negative, each block in canonical order).
    pub fn all_roots(&self) -> Vec<Root> {
        let mut v = self.positive.clone();
        v.extend(self.positive.iter().map(|r| r.negated()));
        v
    }

    pub fn type_name(&self) -> String {
        self.datum.type_name()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "type": self.type_name(),
            "rank": self.rank(),
            "cartan_matrix": self.datum.cartan,
            "positive_roots": self.positive.iter().map(|r| r.coords.clone()).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn classical_counts() {
        for (label, rank, n) in [
            (TypeLabel::G, 2, 6),
            (TypeLabel::F, 4, 24),
            (TypeLabel::E, 6, 36),
            (TypeLabel::E, 7, 63),
            (TypeLabel::E, 8, 120),
            (TypeLabel::A, 1, 1),
            (TypeLabel::A, 2, 3),
            (TypeLabel::B, 2, 4),
            (TypeLabel::D, 4, 12),
        ] {
            let rs = RootSystem::of(label, rank).unwrap();
            assert_eq!(rs.n_positive(), n, "{}{}", label.as_char(), rank);
        }
    }

    #[test]
    fn rejects_invalid_cartan() {
        let mut datum = CartanDatum::standard(TypeLabel::A, 2).unwrap();
        datum.cartan[0][1] = -4;
        assert!(matches!(
            build_root_system(datum),
            Err(RootSystemError::InvalidCartan(_))
        ));
        let mut datum = CartanDatum::standard(TypeLabel::A, 2).unwrap();
        datum.cartan[0][0] = 1;
        assert!(build_root_system(datum).is_err());
    }

    #[test]
    fn g2_roots_explicit() {
        let rs = RootSystem::of(TypeLabel::G, 2).unwrap();
        let expected: Vec<Vec<i16>> = vec![
            vec![1, 0],
            vec![0, 1],
            vec![1, 1],
            vec![2, 1],
            vec![3, 1],
            vec![3, 2],
        ];
        let got: Vec<Vec<i16>> = rs.positive.iter().map(|r| r.coords.clone()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn highest_roots_match_springer_labelling() {
        // The last root in height order is the highest root.
        let cases = [
            (TypeLabel::F, 4, vec![2, 3, 4, 2]),
            (TypeLabel::E, 6, vec![1, 2, 3, 2, 1, 2]),
            (TypeLabel::E, 7, vec![1, 2, 3, 4, 3, 2, 2]),
            (TypeLabel::E, 8, vec![2, 3, 4, 5, 6, 4, 2, 3]),
        ];
        for (label, rank, coords) in cases {
            let rs = RootSystem::of(label, rank).unwrap();
            assert_eq!(rs.positive.last().unwrap().coords, coords);
        }
    }

    #[test]
    fn reflection_is_involution_and_permutes_roots() {
        for (label, rank) in [(TypeLabel::G, 2), (TypeLabel::F, 4), (TypeLabel::A, 3)] {
            let rs = RootSystem::of(label, rank).unwrap();
            let all: HashSet<Vec<i16>> = rs.all_roots().iter().map(|r| r.coords.clone()).collect();
            for i in 0..rs.rank() {
                for r in rs.all_roots() {
                    let s = rs.reflect(i, &r);
                    assert!(all.contains(&s.coords), "reflection left the root set");
                    assert_eq!(rs.reflect(i, &s), r, "s_i not an involution");
                }
                let alpha = Root::simple(rank, i);
                assert_eq!(rs.reflect(i, &alpha), alpha.negated());
            }
        }
    }

    #[test]
    fn g2_orbit_of_short_simple_root() {
        let rs = RootSystem::of(TypeLabel::G, 2).unwrap();
        let mut orbit: HashSet<Vec<i16>> = HashSet::new();
        let mut queue = vec![Root::simple(2, 0)];
        while let Some(r) = queue.pop() {
            if orbit.insert(r.coords.clone()) {
                for i in 0..2 {
                    queue.push(rs.reflect(i, &r));
                }
            }
        }
        assert_eq!(orbit.len(), 6);
    }

    #[test]
    fn root_strings_are_intervals() {
        for (label, rank) in [(TypeLabel::G, 2), (TypeLabel::F, 4), (TypeLabel::B, 3)] {
            let rs = RootSystem::of(label, rank).unwrap();
            let all = rs.all_roots();
            for a in &all {
                for b in &all {
                    if a.coords == b.coords || a.negated().coords == b.coords {
                        continue;
                    }
                    let ks: Vec<i16> = (-6..=6)
                        .filter(|&k| {
                            let c: Vec<i16> = b
                                .coords
                                .iter()
                                .zip(&a.coords)
                                .map(|(&bb, &aa)| bb + k * aa)
                                .collect();
                            rs.is_root_coords(&c)
                        })
                        .collect();
                    for w in ks.windows(2) {
                        assert_eq!(w[1] - w[0], 1, "broken string {a} through {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn g2_string_bounds() {
        let rs = RootSystem::of(TypeLabel::G, 2).unwrap();
        let alpha = Root { coords: vec![1, 0] };
        let beta = Root { coords: vec![0, 1] };
        let ab = Root { coords: vec![1, 1] };
        assert_eq!(rs.root_string_bound(&alpha, &beta).unwrap(), 1);
        assert_eq!(rs.root_string_bound(&ab, &alpha).unwrap(), 2);
        // Degenerate pair rejected.
        assert!(rs.root_string_bound(&alpha, &alpha.negated()).is_err());
        // The pair carrying the bracket coefficient 2:
        let m2ab = Root { coords: vec![-2, -1] };
        assert_eq!(rs.root_string_bound(&m2ab, &ab).unwrap(), 2);
    }

    #[test]
    fn labelling_doc_parses_and_matches() {
        let doc: serde_json::Value = serde_json::from_str(LABELLING_DOC).unwrap();
        for t in ["G2", "F4", "E6", "E7", "E8"] {
            let entry = &doc["types"][t];
            let (label, rank) = parse_type(t).unwrap();
            let datum = CartanDatum::standard(label, rank).unwrap();
            let cm: Vec<Vec<i16>> = serde_json::from_value(entry["cartan_matrix"].clone()).unwrap();
            assert_eq!(cm, datum.cartan, "labelling doc out of sync for {t}");
        }
    }
}
