//! Dense linear algebra over the prime fields F_p (p < 256).
//!
//! Everything downstream (centralisers, MeatAxe spinning, Verma action
//! matrices) reduces to rank / nullspace / product computations on matrices
//! with `u8` entries. Inner loops accumulate in `u16` and defer the modular
//! reduction so the compiler can vectorise them.

use serde::{Deserialize, Serialize};

/// Returns the inverse of `a` modulo the prime `p`.
///
/// Panics if `a == 0 (mod p)`.
pub fn inv_mod(a: u8, p: u8) -> u8 {
    let a = a % p;
    assert!(a != 0, "zero has no inverse mod {p}");
    // Fermat: a^(p-2) mod p.
    let mut result: u32 = 1;
    let mut base: u32 = a as u32;
    let mut exp = p as u32 - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u32;
        }
        base = base * base % p as u32;
        exp >>= 1;
    }
    result as u8
}

/// Reduce a signed integer into `[0, p)`.
pub fn reduce_i64(v: i64, p: u8) -> u8 {
    let m = v.rem_euclid(p as i64);
    m as u8
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpMat {
    pub p: u8,
    pub rows: usize,
    pub cols: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for FpMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "FpMat {}x{} mod {}", self.rows, self.cols, self.p)?;
        for i in 0..self.rows.min(12) {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        if self.rows > 12 {
            writeln!(f, "  ...")?;
        }
        Ok(())
    }
}

impl FpMat {
    pub fn zeros(p: u8, rows: usize, cols: usize) -> Self {
        assert!(p >= 2);
        FpMat { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u8, rows: Vec<Vec<u8>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| x % p));
        }
        FpMat { p, rows: r, cols: c, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v % self.p;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u8] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[u8]) {
        assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self.set(i, j, x);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> FpMat {
        let mut t = FpMat::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn add(&self, other: &FpMat) -> FpMat {
        assert_eq!((self.rows, self.cols, self.p), (other.rows, other.cols, other.p));
        let p = self.p as u16;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| ((a as u16 + b as u16) % p) as u8)
            .collect();
        FpMat { p: self.p, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &FpMat) -> FpMat {
        assert_eq!((self.rows, self.cols, self.p), (other.rows, other.cols, other.p));
        let p = self.p as u16;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| ((a as u16 + p - b as u16) % p) as u8)
            .collect();
        FpMat { p: self.p, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: u8) -> FpMat {
        let p = self.p as u16;
        let c = (c % self.p) as u16;
        let data = self.data.iter().map(|&a| ((a as u16 * c) % p) as u8).collect();
        FpMat { p: self.p, rows: self.rows, cols: self.cols, data }
    }

    /// Matrix product. Accumulates rows in u16 with chunked reduction, so the
    /// hot loop is a plain widening multiply-add.
    pub fn mul(&self, other: &FpMat) -> FpMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        assert_eq!(self.p, other.p);
        let p = self.p as u16;
        let step = (p - 1).max(1) as usize * (p - 1).max(1) as usize;
        let chunk = (u16::MAX as usize / step).max(1);
        let mut out = FpMat::zeros(self.p, self.rows, other.cols);
        let mut acc: Vec<u16> = vec![0; other.cols];
        for i in 0..self.rows {
            acc.fill(0);
            let mut pending = 0usize;
            for k in 0..self.cols {
                let a = self.get(i, k) as u16;
                if a == 0 {
                    continue;
                }
                let brow = other.row(k);
                for (s, &b) in acc.iter_mut().zip(brow.iter()) {
                    *s += a * b as u16;
                }
                pending += 1;
                if pending == chunk {
                    for s in acc.iter_mut() {
                        *s %= p;
                    }
                    pending = 0;
                }
            }
            let orow = out.row_mut(i);
            for (o, &s) in orow.iter_mut().zip(acc.iter()) {
                *o = (s % p) as u8;
            }
        }
        out
    }

    /// Matrix-vector product (vector as column coordinates).
    pub fn matvec(&self, x: &[u8]) -> Vec<u8> {
        assert_eq!(self.cols, x.len());
        let p = self.p as u32;
        let mut y = vec![0u8; self.rows];
        for i in 0..self.rows {
            let mut acc: u32 = 0;
            for (&a, &b) in self.row(i).iter().zip(x.iter()) {
                acc += a as u32 * b as u32;
            }
            y[i] = (acc % p) as u8;
        }
        y
    }

    /// Matrix power by repeated squaring.
    pub fn pow(&self, mut e: u32) -> FpMat {
        assert_eq!(self.rows, self.cols);
        let mut result = FpMat::identity(self.p, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                self.swap_rows(pr, r);
            }
            let inv = inv_mod(self.get(r, c), p);
            if inv != 1 {
                scale_row(self.row_mut(r), inv, p);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f != 0 {
                    let (a, b) = row_pair(&mut self.data, self.cols, i, r);
                    axpy(a, b, p - f, p);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (i.min(j), i.max(j));
        let (a, b) = self.data.split_at_mut(hi * c);
        a[lo * c..(lo + 1) * c].swap_with_slice(&mut b[..c]);
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right nullspace {x : A x = 0}, returned as the rows of a
    /// matrix in reduced echelon form. Deterministic.
    pub fn nullspace(&self) -> FpMat {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = Some(row);
            }
            v
        };
        let free: Vec<usize> = (0..self.cols).filter(|c| pivot_set[*c].is_none()).collect();
        let mut basis = FpMat::zeros(self.p, free.len(), self.cols);
        for (bi, &fc) in free.iter().enumerate() {
            basis.set(bi, fc, 1);
            for (row, &pc) in pivots.iter().enumerate() {
                let v = m.get(row, fc);
                if v != 0 {
                    basis.set(bi, pc, self.p - v);
                }
            }
        }
        // Already echelon up to row order; re-run rref for a canonical form.
        basis.rref();
        basis
    }

    /// Vertically stack two matrices with equal column counts.
    pub fn vstack(&self, other: &FpMat) -> FpMat {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.p, other.p);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FpMat { p: self.p, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Inverse of a square matrix; `None` if singular.
    pub fn inverse(&self) -> Option<FpMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = FpMat::zeros(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut inv = FpMat::zeros(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        Some(inv)
    }

    pub fn rows_as_vecs(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

#[inline]
fn row_pair(data: &mut [u8], cols: usize, i: usize, j: usize) -> (&mut [u8], &[u8]) {
    debug_assert_ne!(i, j);
    if i < j {
        let (a, b) = data.split_at_mut(j * cols);
        (&mut a[i * cols..(i + 1) * cols], &b[..cols])
    } else {
        let (a, b) = data.split_at_mut(i * cols);
        (&mut b[..cols], &a[j * cols..(j + 1) * cols])
    }
}

/// dst += c * src (mod p), elementwise.
#[inline]
pub fn axpy(dst: &mut [u8], src: &[u8], c: u8, p: u8) {
    let c = (c % p) as u16;
    if c == 0 {
        return;
    }
    let p = p as u16;
    match p {
        2 => {
            for (d, &s) in dst.iter_mut().zip(src.iter()) {
                *d ^= s;
            }
        }
        3 => {
            for (d, &s) in dst.iter_mut().zip(src.iter()) {
                *d = ((*d as u16 + c * s as u16) % 3) as u8;
            }
        }
        5 => {
            for (d, &s) in dst.iter_mut().zip(src.iter()) {
                *d = ((*d as u16 + c * s as u16) % 5) as u8;
            }
        }
        _ => {
            for (d, &s) in dst.iter_mut().zip(src.iter()) {
                *d = ((*d as u16 + c * s as u16) % p) as u8;
            }
        }
    }
}

#[inline]
pub fn scale_row(row: &mut [u8], c: u8, p: u8) {
    let c = (c % p) as u16;
    let p = p as u16;
    for d in row.iter_mut() {
        *d = ((*d as u16 * c) % p) as u8;
    }
}

/// Incrementally echelonised row space with attached right-hand sides; used
/// both as a growing basis (spinning) and as a linear-system solver.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub p: u8,
    pub cols: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: u8, cols: usize) -> Self {
        Echelon { p, cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Reduce `v` against the current basis in place; returns the column of
    /// the leading nonzero entry left over, if any.
    pub fn reduce(&self, v: &mut [u8]) -> Option<usize> {
        for (row, &pc) in self.rows.iter().zip(self.pivots.iter()) {
            let f = v[pc];
            if f != 0 {
                axpy(v, row, self.p - f, self.p);
            }
        }
        v.iter().position(|&x| x != 0)
    }

    /// Insert a vector; returns true if it enlarged the span.
    pub fn insert(&mut self, mut v: Vec<u8>) -> bool {
        match self.reduce(&mut v) {
            None => false,
            Some(lead) => {
                let inv = inv_mod(v[lead], self.p);
                if inv != 1 {
                    scale_row(&mut v, inv, self.p);
                }
                // Back-substitute to keep the basis reduced.
                for (row, &pc) in self.rows.iter_mut().zip(self.pivots.iter()) {
                    debug_assert!(pc != lead);
                    let f = row[lead];
                    if f != 0 {
                        axpy(row, &v, self.p - f, self.p);
                    }
                }
                let pos = self.pivots.iter().position(|&pc| pc > lead).unwrap_or(self.pivots.len());
                self.pivots.insert(pos, lead);
                self.rows.insert(pos, v);
                true
            }
        }
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w).is_none()
    }

    pub fn to_mat(&self) -> FpMat {
        FpMat::from_rows(self.p, self.rows.clone())
    }
}

/// Solves `sum_b z_b * blocks[j].column(b) = rhs[j]` over all stacked blocks,
/// i.e. finds `z` with `M_j z = r_j` for every `(M_j, r_j)` pair fed in.
/// Returns `(particular solution, nullspace basis)` or `None` if
/// inconsistent.
pub struct BlockSolver {
    p: u8,
    n: usize,
    ech: Vec<Vec<u8>>, // rows of [A | rhs] echelonised
    pivots: Vec<usize>,
}

impl BlockSolver {
    pub fn new(p: u8, unknowns: usize) -> Self {
        BlockSolver { p, n: unknowns, ech: Vec::new(), pivots: Vec::new() }
    }

    /// Current rank of the coefficient part.
    pub fn rank(&self) -> usize {
        self.pivots.iter().filter(|&&c| c < self.n).count()
    }

    /// Feed one equation row `a . z = b`. Returns false if it made the system
    /// inconsistent.
    pub fn feed(&mut self, a: &[u8], b: u8) -> bool {
        debug_assert_eq!(a.len(), self.n);
        let mut v = Vec::with_capacity(self.n + 1);
        v.extend_from_slice(a);
        v.push(b % self.p);
        for (row, &pc) in self.ech.iter().zip(self.pivots.iter()) {
            let f = v[pc];
            if f != 0 {
                axpy(&mut v, row, self.p - f, self.p);
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => true,
            Some(lead) if lead == self.n => false,
            Some(lead) => {
                let inv = inv_mod(v[lead], self.p);
                if inv != 1 {
                    scale_row(&mut v, inv, self.p);
                }
                for (row, &pc) in self.ech.iter_mut().zip(self.pivots.iter()) {
                    debug_assert!(pc != lead);
                    let f = row[lead];
                    if f != 0 {
                        axpy(row, &v, self.p - f, self.p);
                    }
                }
                let pos = self.pivots.iter().position(|&pc| pc > lead).unwrap_or(self.pivots.len());
                self.pivots.insert(pos, lead);
                self.ech.insert(pos, v);
                true
            }
        }
    }

    /// Particular solution with free variables set to zero.
    pub fn solution(&self) -> Vec<u8> {
        let mut z = vec![0u8; self.n];
        for (row, &pc) in self.ech.iter().zip(self.pivots.iter()) {
            if pc < self.n {
                // Free variables are zero, so the pivot value is just the rhs.
                z[pc] = row[self.n];
            }
        }
        z
    }

    /// Basis of the homogeneous solution space.
    pub fn kernel(&self) -> Vec<Vec<u8>> {
        let pivot_cols: Vec<usize> = self.pivots.iter().copied().filter(|&c| c < self.n).collect();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.n];
            for &c in &pivot_cols {
                v[c] = true;
            }
            v
        };
        let mut out = Vec::new();
        for fc in (0..self.n).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u8; self.n];
            v[fc] = 1;
            for (row, &pc) in self.ech.iter().zip(self.pivots.iter()) {
                if pc < self.n && row[fc] != 0 {
                    v[pc] = self.p - row[fc];
                }
            }
            out.push(v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_small_primes() {
        for p in [2u8, 3, 5, 7, 11] {
            for a in 1..p {
                assert_eq!((a as u16 * inv_mod(a, p) as u16) % p as u16, 1);
            }
        }
    }

    #[test]
    fn rref_and_nullspace() {
        // x + y + z = 0 over F_3 has a 2-dim kernel.
        let m = FpMat::from_rows(3, vec![vec![1, 1, 1]]);
        let ns = m.nullspace();
        assert_eq!(ns.rows, 2);
        for i in 0..ns.rows {
            let v = ns.row(i);
            assert_eq!(m.matvec(v), vec![0]);
        }
    }

    #[test]
    fn mul_matches_matvec() {
        let a = FpMat::from_rows(5, vec![vec![1, 2, 3], vec![4, 0, 1]]);
        let b = FpMat::from_rows(5, vec![vec![2, 1], vec![0, 3], vec![1, 1]]);
        let c = a.mul(&b);
        for j in 0..2 {
            let col = b.col(j);
            assert_eq!(a.matvec(&col), c.col(j));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = FpMat::from_rows(7, vec![vec![1, 2, 0], vec![3, 1, 4], vec![0, 5, 1]]);
        let inv = m.inverse().expect("invertible");
        assert_eq!(m.mul(&inv), FpMat::identity(7, 3));
    }

    #[test]
    fn echelon_insert_and_contains() {
        let mut e = Echelon::new(3, 4);
        assert!(e.insert(vec![1, 2, 0, 1]));
        assert!(e.insert(vec![0, 1, 1, 0]));
        assert!(!e.insert(vec![1, 0, 1, 1])); // = row1 - 2*row2 over F_3
        assert!(e.contains(&[2, 1, 0, 2]));
        assert_eq!(e.dim(), 2);
    }

    #[test]
    fn block_solver_simple() {
        // z1 + z2 = 1, z1 - z2 = 3 over F_5 => z1 = 2, z2 = 4.
        let mut s = BlockSolver::new(5, 2);
        assert!(s.feed(&[1, 1], 1));
        assert!(s.feed(&[1, 4], 3));
        assert_eq!(s.solution(), vec![2, 4]);
        assert!(s.kernel().is_empty());
    }
}
