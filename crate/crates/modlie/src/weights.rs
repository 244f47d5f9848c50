//! Lambda_0 = X(T)/pX(T) in fundamental-weight coordinates, the Weyl dot
//! action, and orbit counting.
//!
//! A weight is a vector in F_p^rank whose i-th coordinate is the value on
//! h_i; this identification is exact because the derived group is simply
//! connected. Orbits are computed by breadth-first closure under the simple
//! dot reflections, which generate W; the group itself is never
//! materialised.

use crate::fp::reduce_i64;
use crate::rootsystem::RootSystem;
use serde::Serialize;

/// An element of Lambda_0, in fundamental-weight coordinates mod p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct WeightModP {
    pub coords: Vec<u8>,
}

impl WeightModP {
    pub fn new(p: u8, coords: &[i64]) -> Self {
        WeightModP { coords: coords.iter().map(|&c| reduce_i64(c, p)).collect() }
    }

    pub fn zero(rank: usize) -> Self {
        WeightModP { coords: vec![0; rank] }
    }

    /// Enumerate all p^rank weights in lexicographic order.
    pub fn all(rank: usize, p: u8) -> Vec<WeightModP> {
        let total = (p as u64).pow(rank as u32);
        (0..total).map(|i| Self::from_ordinal(rank, p, i)).collect()
    }

    pub fn from_ordinal(rank: usize, p: u8, mut i: u64) -> WeightModP {
        let mut coords = vec![0u8; rank];
        for c in coords.iter_mut().rev() {
            *c = (i % p as u64) as u8;
            i /= p as u64;
        }
        WeightModP { coords }
    }

    pub fn ordinal(&self, p: u8) -> u64 {
        self.coords.iter().fold(0u64, |acc, &c| acc * p as u64 + c as u64)
    }
}

/// The dot reflection s_i . lambda = s_i(lambda + rho) - rho, with
/// rho = (1,...,1) in fundamental-weight coordinates.
pub fn dot_reflect(system: &RootSystem, p: u8, i: usize, lambda: &WeightModP) -> WeightModP {
    let shifted: Vec<u8> = lambda.coords.iter().map(|&c| reduce_i64(c as i64 + 1, p)).collect();
    let reflected = system.reflect_weight_mod_p(i, &shifted, p);
    WeightModP {
        coords: reflected.iter().map(|&c| reduce_i64(c as i64 - 1, p)).collect(),
    }
}

/// Orbit census of the dot action on Lambda_0.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub r#type: String,
    pub p: u8,
    pub orbit_count: usize,
    /// Multiset of orbit sizes, ascending.
    pub orbit_sizes: Vec<u64>,
    /// Lexicographically smallest weight of each orbit, in orbit discovery
    /// order (ascending ordinal of the representative).
    pub representatives: Vec<Vec<u8>>,
}

/// Connected components of the graph lambda ~ s_i . lambda via BFS over all
/// p^rank weights.
pub fn orbit_count(system: &RootSystem, p: u8) -> OrbitReport {
    let rank = system.rank();
    let total = (p as u64).pow(rank as u32);
    let mut seen = vec![false; total as usize];
    let mut orbit_sizes = Vec::new();
    let mut representatives = Vec::new();
    let mut queue: Vec<u64> = Vec::new();
    for start in 0..total {
        if seen[start as usize] {
            continue;
        }
        seen[start as usize] = true;
        queue.clear();
        queue.push(start);
        let mut size = 0u64;
        let mut head = 0;
        while head < queue.len() {
            let w = WeightModP::from_ordinal(rank, p, queue[head]);
            head += 1;
            size += 1;
            for i in 0..rank {
                let img = dot_reflect(system, p, i, &w).ordinal(p);
                if !seen[img as usize] {
                    seen[img as usize] = true;
                    queue.push(img);
                }
            }
        }
        orbit_sizes.push(size);
        representatives.push(WeightModP::from_ordinal(rank, p, start).coords);
    }
    let mut sizes_sorted = orbit_sizes.clone();
    sizes_sorted.sort_unstable();
    OrbitReport {
        r#type: system.type_name(),
        p,
        orbit_count: sizes_sorted.len(),
        orbit_sizes: sizes_sorted,
        representatives,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsystem::TypeLabel;

    #[test]
    fn a1_dot_reflections() {
        let rs = RootSystem::of(TypeLabel::A, 1).unwrap();
        // p=2: both weights fixed.
        for c in 0..2u8 {
            let w = WeightModP { coords: vec![c] };
            assert_eq!(dot_reflect(&rs, 2, 0, &w), w);
        }
        // p=3: 0 -> 1.
        let w = WeightModP { coords: vec![0] };
        assert_eq!(dot_reflect(&rs, 3, 0, &w).coords, vec![1]);
    }

    #[test]
    fn minus_rho_is_fixed() {
        for (label, rank, p) in [(TypeLabel::G, 2, 3u8), (TypeLabel::A, 2, 5), (TypeLabel::F, 4, 2)] {
            let rs = RootSystem::of(label, rank).unwrap();
            let w = WeightModP { coords: vec![p - 1; rank] };
            for i in 0..rank {
                assert_eq!(dot_reflect(&rs, p, i, &w), w);
            }
        }
    }

    #[test]
    fn dot_reflect_is_involution() {
        let rs = RootSystem::of(TypeLabel::G, 2).unwrap();
        for p in [2u8, 3, 5] {
            for w in WeightModP::all(2, p) {
                for i in 0..2 {
                    let s = dot_reflect(&rs, p, i, &w);
                    assert_eq!(dot_reflect(&rs, p, i, &s), w);
                }
            }
        }
    }

    #[test]
    fn a1_orbit_counts() {
        let rs = RootSystem::of(TypeLabel::A, 1).unwrap();
        assert_eq!(orbit_count(&rs, 3).orbit_count, 2);
        for p in [3u8, 5, 7] {
            assert_eq!(orbit_count(&rs, p).orbit_count, (p as usize + 1) / 2);
        }
    }

    #[test]
    fn g2_orbit_counts() {
        let rs = RootSystem::of(TypeLabel::G, 2).unwrap();
        let r3 = orbit_count(&rs, 3);
        assert_eq!(r3.orbit_count, 3);
        assert_eq!(r3.orbit_sizes.iter().sum::<u64>(), 9);
        let r2 = orbit_count(&rs, 2);
        assert_eq!(r2.orbit_sizes.iter().sum::<u64>(), 4);
        // Orbit sizes divide |W|.
        let w = rs.datum.weyl_order();
        for s in r3.orbit_sizes.iter().chain(r2.orbit_sizes.iter()) {
            assert_eq!(w % s, 0);
        }
    }
}
