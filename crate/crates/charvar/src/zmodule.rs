//! Exact integer-matrix algebra: Smith normal form and derived computations
//! on finitely generated abelian groups.
//!
//! Convention used throughout the crate: columns index generators, rows index
//! relations, so `cokernel(M)` is the quotient of `Z^cols` by the row span.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Dense integer matrix with arbitrary-precision entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Build from row-major i64 data. Panics if the grid is ragged.
    pub fn from_rows(data: &[Vec<i64>]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged row data");
        IntMatrix {
            rows,
            cols,
            entries: data
                .iter()
                .flat_map(|r| r.iter().map(|&x| BigInt::from(x)))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = &num / &prev;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row[i] += k * row[j]
    fn row_add(&mut self, i: usize, j: usize, k: &BigInt) {
        for c in 0..self.cols {
            let delta = k * &self[(j, c)];
            self[(i, c)] += delta;
        }
    }

    /// col[i] += k * col[j]
    fn col_add(&mut self, i: usize, j: usize, k: &BigInt) {
        for r in 0..self.rows {
            let delta = k * &self[(r, j)];
            self[(r, i)] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self[(i, c)].clone();
            self[(i, c)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.entries[r * self.cols + c]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Smith normal form `M = U * D * V` with `U`, `V` unimodular and `D`
/// diagonal satisfying `d_i >= 0` and `d_i | d_{i+1}`.
pub struct SmithNormalForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithNormalForm {
    let Snf { u, d, v, .. } = snf_full(m);
    SmithNormalForm { u, d, v }
}

pub(crate) struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    #[allow(dead_code)]
    pub u_inv: IntMatrix,
    #[allow(dead_code)]
    pub v_inv: IntMatrix,
}

/// Working state for SNF. Invariant: original = u * d * v, u_inv = u^-1,
/// v_inv = v^-1.
struct SnfCalc {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfCalc {
    fn new(m: &IntMatrix) -> Self {
        SnfCalc {
            d: m.clone(),
            u: IntMatrix::identity(m.rows()),
            u_inv: IntMatrix::identity(m.rows()),
            v: IntMatrix::identity(m.cols()),
            v_inv: IntMatrix::identity(m.cols()),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.d.swap_rows(i, j);
        self.u.swap_cols(i, j);
        self.u_inv.swap_rows(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.d.swap_cols(i, j);
        self.v.swap_rows(i, j);
        self.v_inv.swap_cols(i, j);
    }

    /// d.row[i] += k * d.row[j]
    fn row_add(&mut self, i: usize, j: usize, k: &BigInt) {
        self.d.row_add(i, j, k);
        let neg = -k.clone();
        self.u.col_add(j, i, &neg);
        self.u_inv.row_add(i, j, k);
    }

    /// d.col[i] += k * d.col[j]
    fn col_add(&mut self, i: usize, j: usize, k: &BigInt) {
        self.d.col_add(i, j, k);
        let neg = -k.clone();
        self.v.row_add(j, i, &neg);
        self.v_inv.col_add(i, j, k);
    }

    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_col(i);
        self.u_inv.negate_row(i);
    }

    /// Clear row t and column t (beyond the pivot) by Euclidean steps.
    fn eliminate_at(&mut self, t: usize) {
        loop {
            // Move a minimal-magnitude nonzero entry of the submatrix to (t, t).
            let mut best: Option<(usize, usize)> = None;
            for i in t..self.d.rows() {
                for j in t..self.d.cols() {
                    if self.d[(i, j)].is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if self.d[(bi, bj)].abs() <= self.d[(i, j)].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((bi, bj)) = best else { return };
            self.swap_rows(t, bi);
            self.swap_cols(t, bj);

            let mut dirty = false;
            for i in t + 1..self.d.rows() {
                if !self.d[(i, t)].is_zero() {
                    let q = -self.d[(i, t)].div_floor(&self.d[(t, t)]);
                    self.row_add(i, t, &q);
                    if !self.d[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..self.d.cols() {
                if !self.d[(t, j)].is_zero() {
                    let q = -self.d[(t, j)].div_floor(&self.d[(t, t)]);
                    self.col_add(j, t, &q);
                    if !self.d[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                return;
            }
        }
    }

    fn diagonalize(&mut self) {
        let n = self.d.rows().min(self.d.cols());
        for t in 0..n {
            self.eliminate_at(t);
        }
        for t in 0..n {
            if self.d[(t, t)].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

impl IntMatrix {
    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let v = -self[(r, j)].clone();
            self[(r, j)] = v;
        }
    }
}

pub(crate) fn snf_full(m: &IntMatrix) -> Snf {
    let mut calc = SnfCalc::new(m);
    loop {
        calc.diagonalize();
        // Enforce the divisibility chain; a violation re-couples the two
        // diagonal positions and we re-run the elimination.
        let n = calc.d.rows().min(calc.d.cols());
        let mut violation = None;
        'scan: for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&calc.d[(i, i)], &calc.d[(j, j)]);
                if a.is_zero() && !b.is_zero() {
                    violation = Some((i, j));
                    break 'scan;
                }
                if !a.is_zero() && !(&*b % a).is_zero() {
                    violation = Some((i, j));
                    break 'scan;
                }
            }
        }
        match violation {
            Some((i, j)) => {
                let one = BigInt::one();
                calc.row_add(i, j, &one);
            }
            None => break,
        }
    }
    Snf {
        u: calc.u,
        d: calc.d,
        v: calc.v,
        u_inv: calc.u_inv,
        v_inv: calc.v_inv,
    }
}

/// Finitely generated abelian group in invariant-factor form:
/// `Z^free_rank + Z/d_1 + ... + Z/d_t` with `d_i >= 2` and `d_i | d_{i+1}`.
///
/// Canonical at construction, so structural equality is group isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct FgAbelianGroup {
    free_rank: usize,
    torsion: Vec<BigUint>,
}

impl FgAbelianGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigUint>) -> Self {
        let mut torsion: Vec<BigUint> = torsion
            .into_iter()
            .filter(|d| *d > BigUint::one())
            .collect();
        // Pairwise gcd/lcm merge until the divisibility chain holds.
        loop {
            torsion.sort();
            let mut changed = false;
            for i in 0..torsion.len() {
                for j in i + 1..torsion.len() {
                    if !(&torsion[j] % &torsion[i]).is_zero() {
                        let g = torsion[i].gcd(&torsion[j]);
                        let l = &torsion[i] / &g * &torsion[j];
                        torsion[i] = g;
                        torsion[j] = l;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        torsion.retain(|d| *d > BigUint::one());
        FgAbelianGroup { free_rank, torsion }
    }

    pub fn from_u64(free_rank: usize, torsion: &[u64]) -> Self {
        Self::new(free_rank, torsion.iter().map(|&d| BigUint::from(d)).collect())
    }

    pub fn trivial() -> Self {
        Self::new(0, vec![])
    }

    pub fn free(rank: usize) -> Self {
        Self::new(rank, vec![])
    }

    pub fn cyclic(d: u64) -> Self {
        Self::from_u64(0, &[d])
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigUint] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Number of elements, if finite.
    pub fn cardinality(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().product())
    }

    pub fn torsion_subgroup(&self) -> Self {
        FgAbelianGroup {
            free_rank: 0,
            torsion: self.torsion.clone(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut torsion = self.torsion.clone();
        torsion.extend(other.torsion.iter().cloned());
        Self::new(self.free_rank + other.free_rank, torsion)
    }

    /// n-fold direct sum of `self`.
    pub fn power(&self, n: usize) -> Self {
        let mut torsion = Vec::with_capacity(self.torsion.len() * n);
        for _ in 0..n {
            torsion.extend(self.torsion.iter().cloned());
        }
        Self::new(self.free_rank * n, torsion)
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{}", r)),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{}", d));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Cokernel of `M: Z^cols / rowspan(M)` in invariant-factor form.
pub fn cokernel(m: &IntMatrix) -> FgAbelianGroup {
    let snf = smith_normal_form(m);
    let n = m.rows().min(m.cols());
    let mut torsion = Vec::new();
    let mut nonzero = 0;
    for i in 0..n {
        let d = &snf.d[(i, i)];
        if !d.is_zero() {
            nonzero += 1;
            if *d > BigInt::one() {
                torsion.push(d.to_biguint().expect("diagonal is nonnegative"));
            }
        }
    }
    FgAbelianGroup::new(m.cols() - nonzero, torsion)
}

/// `Hom(A, B)` for finitely generated abelian groups, computed factorwise:
/// `Hom(Z, B) = B`, `Hom(Z/d, Z) = 0`, `Hom(Z/d, Z/e) = Z/gcd(d, e)`.
pub fn hom_group(a: &FgAbelianGroup, b: &FgAbelianGroup) -> FgAbelianGroup {
    let mut out = b.power(a.free_rank());
    for d in a.torsion() {
        let torsion = b.torsion().iter().map(|e| d.gcd(e)).collect();
        out = out.direct_sum(&FgAbelianGroup::new(0, torsion));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn check_snf(m: &IntMatrix) -> SmithNormalForm {
        let snf = smith_normal_form(m);
        let recon = snf.u.mul(&snf.d).mul(&snf.v);
        assert_eq!(&recon, m, "U*D*V != M");
        assert_eq!(snf.u.det().abs(), BigInt::one(), "U not unimodular");
        assert_eq!(snf.v.det().abs(), BigInt::one(), "V not unimodular");
        let n = m.rows().min(m.cols());
        for i in 0..n {
            assert!(!snf.d[(i, i)].is_negative());
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    assert!(snf.d[(i, j)].is_zero(), "D not diagonal");
                }
            }
        }
        for i in 0..n.saturating_sub(1) {
            let (a, b) = (&snf.d[(i, i)], &snf.d[(i + 1, i + 1)]);
            if a.is_zero() {
                assert!(b.is_zero(), "zero before nonzero on diagonal");
            } else {
                assert!((b % a).is_zero(), "divisibility chain broken");
            }
        }
        snf
    }

    #[test]
    fn snf_identity() {
        let m = IntMatrix::identity(3);
        let snf = check_snf(&m);
        assert_eq!(snf.d, IntMatrix::identity(3));
    }

    #[test]
    fn snf_two_by_two() {
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let snf = check_snf(&m);
        // gcd-of-minors oracle: d1 = gcd of entries = 2, d1*d2 = |det| = 8.
        assert_eq!(snf.d[(0, 0)], BigInt::from(2));
        assert_eq!(snf.d[(1, 1)], BigInt::from(4));
    }

    #[test]
    fn snf_zero_matrix() {
        let m = IntMatrix::zeros(2, 3);
        let snf = check_snf(&m);
        assert!(snf.d.is_zero_matrix());
        assert_eq!(snf.d.rows(), 2);
        assert_eq!(snf.d.cols(), 3);
    }

    #[test]
    fn snf_zero_dimensions() {
        check_snf(&IntMatrix::zeros(0, 3));
        check_snf(&IntMatrix::zeros(3, 0));
        check_snf(&IntMatrix::zeros(0, 0));
    }

    #[test]
    fn cokernel_free() {
        assert_eq!(cokernel(&IntMatrix::zeros(0, 3)), FgAbelianGroup::free(3));
    }

    #[test]
    fn cokernel_diag_one_six() {
        // Direct quotient: Z^2 / <(1,0),(0,6)> = Z/6.
        let m = IntMatrix::from_rows(&[vec![1, 0], vec![0, 6]]);
        assert_eq!(cokernel(&m), FgAbelianGroup::cyclic(6));
    }

    #[test]
    fn cokernel_diag_two_three() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(cokernel(&m), FgAbelianGroup::cyclic(6));
    }

    #[test]
    fn hom_examples() {
        // Hom(Z^2, Z/2) = (Z/2)^2
        assert_eq!(
            hom_group(&FgAbelianGroup::free(2), &FgAbelianGroup::cyclic(2)),
            FgAbelianGroup::from_u64(0, &[2, 2])
        );
        // Hom(Z/2, Z) = 0
        assert!(hom_group(&FgAbelianGroup::cyclic(2), &FgAbelianGroup::free(1)).is_trivial());
        // Hom(Z/4 + Z, Z/6) = Z/2 + Z/6
        assert_eq!(
            hom_group(
                &FgAbelianGroup::from_u64(1, &[4]),
                &FgAbelianGroup::cyclic(6)
            ),
            FgAbelianGroup::from_u64(0, &[2, 6])
        );
    }

    #[test]
    fn canonical_form_merges() {
        // Z/2 + Z/3 = Z/6, and Z/4 + Z/6 = Z/2 + Z/12.
        assert_eq!(
            FgAbelianGroup::from_u64(0, &[2, 3]),
            FgAbelianGroup::cyclic(6)
        );
        assert_eq!(
            FgAbelianGroup::from_u64(0, &[4, 6]),
            FgAbelianGroup::from_u64(0, &[2, 12])
        );
        assert_eq!(
            FgAbelianGroup::from_u64(0, &[1, 1]).cardinality(),
            Some(BigUint::from(1u32))
        );
    }
}
