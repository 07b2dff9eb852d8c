//! Exact integer linear algebra and finitely generated abelian groups.
//!
//! Matrices carry arbitrary-precision entries. `hnf` canonicalizes a row
//! lattice, `snf` produces the invariant-factor chain, and
//! [`FgAbelianGroup`] is the canonical carrier (free rank plus a
//! divisibility chain with no factor equal to 1) for multipliers,
//! abelianizations, tensor products and Tor.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Dense rows x cols integer matrix, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({}x{}){}", self.rows, self.cols, self)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r);
        }
        IntMatrix { rows: nrows, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect(),
            cols,
        )
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = IntMatrix::zero(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: Vec<BigInt>) {
        assert_eq!(row.len(), self.cols, "ragged row");
        self.data.extend(row);
        self.rows += 1;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// self[dst] += q * self[src]
    fn add_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self[(src, c)] * q;
            self[(dst, c)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self[(r, c)].clone();
            self[(r, c)] = v;
        }
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = IntMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a * &rhs[(l, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }

    /// Row-style Hermite normal form of the row lattice.
    ///
    /// Returns a matrix whose rows are a basis of the same lattice:
    /// pivots strictly move right, pivot entries positive, entries above
    /// a pivot reduced into `[0, pivot)`. Zero rows are dropped, so the
    /// result of equal lattices is structurally equal.
    pub fn hnf(&self) -> IntMatrix {
        self.hnf_with_transform().0
    }

    /// Hermite normal form together with the transform rows: `h = u * self`
    /// where `u` holds the first `h.rows()` rows of a unimodular matrix.
    pub fn hnf_with_transform(&self) -> (IntMatrix, IntMatrix) {
        let mut m = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut r = 0;
        for col in 0..m.cols {
            // gcd elimination below row r in this column
            loop {
                let mut best: Option<usize> = None;
                for i in r..m.rows {
                    if !m[(i, col)].is_zero() {
                        best = match best {
                            None => Some(i),
                            Some(b) => {
                                if m[(i, col)].abs() < m[(b, col)].abs() {
                                    Some(i)
                                } else {
                                    Some(b)
                                }
                            }
                        };
                    }
                }
                let Some(p) = best else { break };
                m.swap_rows(r, p);
                u.swap_rows(r, p);
                let mut done = true;
                for i in (r + 1)..m.rows {
                    if m[(i, col)].is_zero() {
                        continue;
                    }
                    let q = -(&m[(i, col)] / &m[(r, col)]);
                    m.add_multiple(i, r, &q);
                    u.add_multiple(i, r, &q);
                    if !m[(i, col)].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if r < m.rows && !m[(r, col)].is_zero() {
                if m[(r, col)].is_negative() {
                    m.negate_row(r);
                    u.negate_row(r);
                }
                // reduce entries above the pivot into [0, pivot)
                for i in 0..r {
                    let q = -m[(i, col)].div_floor(&m[(r, col)]);
                    m.add_multiple(i, r, &q);
                    u.add_multiple(i, r, &q);
                }
                r += 1;
                if r == m.rows {
                    break;
                }
            }
        }
        let h = IntMatrix::from_rows((0..r).map(|i| m.row(i).to_vec()).collect(), m.cols);
        let ut = IntMatrix::from_rows((0..r).map(|i| u.row(i).to_vec()).collect(), u.cols);
        (h, ut)
    }

    /// Rank of the row lattice.
    pub fn rank(&self) -> usize {
        self.hnf().rows()
    }

    /// Solve `x * hnf = target` over the integers, assuming `self` is in
    /// row HNF. Returns `None` when the target is outside the row lattice.
    pub fn solve_hnf(&self, target: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(target.len(), self.cols, "target length mismatch");
        let mut rest = target.to_vec();
        let mut x = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let pivot_col = (0..self.cols).find(|&c| !self[(r, c)].is_zero())?;
            let (q, rem) = rest[pivot_col].div_rem(&self[(r, pivot_col)]);
            if !rem.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for c in pivot_col..self.cols {
                    let v = &self[(r, c)] * &q;
                    rest[c] -= v;
                }
            }
            x.push(q);
        }
        if rest.iter().all(|v| v.is_zero()) {
            Some(x)
        } else {
            None
        }
    }

    /// True when every row of `other` lies in the row lattice of `self`.
    pub fn contains_lattice(&self, other: &IntMatrix) -> bool {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let h = self.hnf();
        (0..other.rows()).all(|r| h.solve_hnf(other.row(r)).is_some())
    }

    /// Smith normal form: the full diagonal `d_1 | d_2 | ...` of length
    /// `min(rows, cols)`, nonzero entries first, each dividing the next.
    pub fn snf(&self) -> Vec<BigInt> {
        let mut m = self.clone();
        let n = m.rows.min(m.cols);
        let mut k = 0;
        while k < n {
            // find a nonzero pivot of minimal absolute value in the block
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..m.rows {
                for j in k..m.cols {
                    if !m[(i, j)].is_zero() {
                        pivot = match pivot {
                            None => Some((i, j)),
                            Some(p) => {
                                if m[(i, j)].abs() < m[p].abs() {
                                    Some((i, j))
                                } else {
                                    Some(p)
                                }
                            }
                        };
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            m.swap_rows(k, pi);
            m.swap_cols(k, pj);
            // clear row and column k
            let mut dirty = false;
            for i in (k + 1)..m.rows {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let q = -(&m[(i, k)] / &m[(k, k)]);
                m.add_multiple(i, k, &q);
                if !m[(i, k)].is_zero() {
                    dirty = true;
                }
            }
            for j in (k + 1)..m.cols {
                if m[(k, j)].is_zero() {
                    continue;
                }
                let q = -(&m[(k, j)] / &m[(k, k)]);
                m.add_col_multiple(j, k, &q);
                if !m[(k, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility sweep: pivot must divide the remaining block
            let mut fixed = false;
            'sweep: for i in (k + 1)..m.rows {
                for j in (k + 1)..m.cols {
                    if !(&m[(i, j)] % &m[(k, k)]).is_zero() {
                        m.add_multiple(k, i, &BigInt::one());
                        fixed = true;
                        break 'sweep;
                    }
                }
            }
            if fixed {
                continue;
            }
            if m[(k, k)].is_negative() {
                m.negate_row(k);
            }
            k += 1;
        }
        (0..n).map(|i| m[(i, i)].clone()).collect()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self[(r, src)] * q;
            self[(r, dst)] += v;
        }
    }
}

/// Quotient of row lattices `L(a) / L(b)`; fails when `L(b)` is not
/// contained in `L(a)`.
pub fn lattice_quotient(a: &IntMatrix, b: &IntMatrix) -> Result<FgAbelianGroup, Error> {
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "lattice quotient: {} vs {} columns",
            a.cols(),
            b.cols()
        )));
    }
    let h = a.hnf();
    let mut coeffs = Vec::with_capacity(b.rows());
    for r in 0..b.rows() {
        match h.solve_hnf(b.row(r)) {
            Some(x) => coeffs.push(x),
            None => return Err(Error::ContainmentViolation),
        }
    }
    let c = IntMatrix::from_rows(coeffs, h.rows());
    Ok(FgAbelianGroup::from_presentation(h.rows(), &c))
}

/// Finitely generated abelian group in canonical form: free rank plus
/// invariant factors `d_1 | d_2 | ...` with every `d_i >= 2`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FgAbelianGroup {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn trivial() -> Self {
        FgAbelianGroup { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { free_rank: rank, invariant_factors: Vec::new() }
    }

    /// Cyclic group of order `n`; `n = 0` yields the infinite cyclic group
    /// and `n = 1` the trivial group.
    pub fn cyclic(n: u64) -> Self {
        match n {
            0 => FgAbelianGroup::free(1),
            1 => FgAbelianGroup::trivial(),
            _ => FgAbelianGroup { free_rank: 0, invariant_factors: vec![BigInt::from(n)] },
        }
    }

    /// Canonicalize an arbitrary list of cyclic summands `Z_{d_i}`
    /// (`d = 0` meaning `Z`) into invariant-factor form.
    pub fn from_cyclic_summands(summands: &[BigInt]) -> Self {
        let free = summands.iter().filter(|d| d.is_zero()).count();
        let torsion: Vec<BigInt> =
            summands.iter().filter(|d| !d.is_zero() && !d.abs().is_one()).map(|d| d.abs()).collect();
        if torsion.is_empty() {
            return FgAbelianGroup { free_rank: free, invariant_factors: Vec::new() };
        }
        let diag = IntMatrix::diagonal(&torsion);
        let factors = diag
            .snf()
            .into_iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .collect();
        FgAbelianGroup { free_rank: free, invariant_factors: factors }
    }

    /// Group presented as `Z^generators / row lattice of relations`.
    pub fn from_presentation(generators: usize, relations: &IntMatrix) -> Self {
        assert_eq!(relations.cols(), generators, "presentation shape mismatch");
        let diag = relations.snf();
        let rank = diag.iter().filter(|d| !d.is_zero()).count();
        let factors: Vec<BigInt> =
            diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
        FgAbelianGroup { free_rank: generators - rank, invariant_factors: factors }
    }

    /// Validate caller-supplied data: factors must be `>= 2` and form a
    /// divisibility chain.
    pub fn from_parts(free_rank: usize, invariant_factors: Vec<BigInt>) -> Result<Self, Error> {
        for w in invariant_factors.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return Err(Error::NonCanonicalGroup(format!("{} does not divide {}", w[0], w[1])));
            }
        }
        if let Some(bad) = invariant_factors.iter().find(|d| **d < BigInt::from(2)) {
            return Err(Error::NonCanonicalGroup(format!("factor {bad} < 2")));
        }
        Ok(FgAbelianGroup { free_rank, invariant_factors })
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.invariant_factors.iter().product())
    }

    pub fn direct_sum(&self, other: &FgAbelianGroup) -> FgAbelianGroup {
        let mut summands: Vec<BigInt> = self.invariant_factors.clone();
        summands.extend_from_slice(&other.invariant_factors);
        let mut g = FgAbelianGroup::from_cyclic_summands(&summands);
        g.free_rank = self.free_rank + other.free_rank;
        g
    }

    /// Tensor product over the integers.
    pub fn tensor(&self, other: &FgAbelianGroup) -> FgAbelianGroup {
        let mut summands: Vec<BigInt> = Vec::new();
        // Z^a (x) torsion(b) and torsion(a) (x) Z^b
        for d in &other.invariant_factors {
            for _ in 0..self.free_rank {
                summands.push(d.clone());
            }
        }
        for d in &self.invariant_factors {
            for _ in 0..other.free_rank {
                summands.push(d.clone());
            }
        }
        for a in &self.invariant_factors {
            for b in &other.invariant_factors {
                summands.push(a.gcd(b));
            }
        }
        let mut g = FgAbelianGroup::from_cyclic_summands(&summands);
        g.free_rank = self.free_rank * other.free_rank;
        g
    }

    /// `Tor_1^Z`; only torsion contributes.
    pub fn tor(&self, other: &FgAbelianGroup) -> FgAbelianGroup {
        let mut summands: Vec<BigInt> = Vec::new();
        for a in &self.invariant_factors {
            for b in &other.invariant_factors {
                summands.push(a.gcd(b));
            }
        }
        FgAbelianGroup::from_cyclic_summands(&summands)
    }

    /// True when `self` is a quotient of `other`.
    ///
    /// Matches invariant factors from the largest down; a surplus free
    /// summand of `other` can cover any cyclic factor of `self`. Both
    /// factor lists are divisibility chains, so greedy matching is exact.
    pub fn is_quotient_of(&self, other: &FgAbelianGroup) -> bool {
        if self.free_rank > other.free_rank {
            return false;
        }
        let a = &self.invariant_factors;
        let b = &other.invariant_factors;
        let mut extra = other.free_rank - self.free_rank;
        let mut bi = b.len();
        for ai in (0..a.len()).rev() {
            if bi > 0 && (&b[bi - 1] % &a[ai]).is_zero() {
                bi -= 1;
            } else if extra > 0 {
                extra -= 1;
            } else {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z_{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// Independent SNF oracle via determinantal divisors: the product
    /// d_1 ... d_j equals the gcd of all j x j minors.
    fn snf_by_minors(m: &IntMatrix) -> Vec<BigInt> {
        fn minors_gcd(m: &IntMatrix, size: usize) -> BigInt {
            fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
                if k == 0 {
                    return vec![vec![]];
                }
                let mut out = Vec::new();
                for first in 0..n {
                    for mut rest in combos(n - first - 1, k - 1) {
                        for v in rest.iter_mut() {
                            *v += first + 1;
                        }
                        let mut c = vec![first];
                        c.append(&mut rest);
                        out.push(c);
                    }
                }
                out
            }
            fn det(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> BigInt {
                if rows.is_empty() {
                    return BigInt::one();
                }
                let mut acc = BigInt::zero();
                let sub_rows = &rows[1..];
                for (i, &c) in cols.iter().enumerate() {
                    let mut sub_cols = cols.to_vec();
                    sub_cols.remove(i);
                    let term = &m[(rows[0], c)] * det(m, sub_rows, &sub_cols);
                    if i % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                acc
            }
            let mut g = BigInt::zero();
            for rs in combos(m.rows(), size) {
                for cs in combos(m.cols(), size) {
                    g = g.gcd(&det(m, &rs, &cs));
                }
            }
            g
        }
        let n = m.rows().min(m.cols());
        let mut out = Vec::new();
        let mut prev = BigInt::one();
        for j in 1..=n {
            let dj = minors_gcd(m, j);
            if dj.is_zero() {
                out.push(BigInt::zero());
            } else {
                out.push(&dj / &prev);
                prev = dj;
            }
        }
        out
    }

    #[test]
    fn snf_small_examples() {
        let m = IntMatrix::diagonal(&[big(2), big(3)]);
        assert_eq!(snf_by_minors(&m), vec![big(1), big(6)]);
        assert_eq!(m.snf(), vec![big(1), big(6)]);

        assert_eq!(IntMatrix::identity(4).snf(), vec![big(1); 4]);

        let m = IntMatrix::from_i64(&[&[4, 2], &[2, 4]]);
        assert_eq!(snf_by_minors(&m), vec![big(2), big(6)]);
        assert_eq!(m.snf(), vec![big(2), big(6)]);
    }

    #[test]
    fn snf_matches_minor_oracle_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let m = IntMatrix::from_rows(
                (0..rows)
                    .map(|_| (0..cols).map(|_| big(rng.gen_range(-9..=9))).collect())
                    .collect(),
                cols,
            );
            assert_eq!(m.snf(), snf_by_minors(&m), "matrix {m}");
        }
    }

    #[test]
    fn snf_unimodular_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let n = rng.gen_range(2..=4);
            let m = IntMatrix::from_rows(
                (0..n).map(|_| (0..n).map(|_| big(rng.gen_range(-6..=6))).collect()).collect(),
                n,
            );
            // random unimodular transforms from elementary operations
            let mut u = IntMatrix::identity(n);
            let mut v = IntMatrix::identity(n);
            for _ in 0..12 {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if a != b {
                    u.add_multiple(a, b, &big(rng.gen_range(-3..=3)));
                    v.add_col_multiple(a, b, &big(rng.gen_range(-3..=3)));
                }
            }
            let transformed = u.mul(&m).mul(&v);
            assert_eq!(transformed.snf(), m.snf());
        }
    }

    #[test]
    fn hnf_idempotent_and_lattice_equal() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=4);
            let m = IntMatrix::from_rows(
                (0..rows)
                    .map(|_| (0..cols).map(|_| big(rng.gen_range(-8..=8))).collect())
                    .collect(),
                cols,
            );
            let h = m.hnf();
            assert_eq!(h.hnf(), h);
            // rows of each sift to zero in the other
            assert!(h.contains_lattice(&m));
            assert!(m.contains_lattice(&h));
        }
    }

    #[test]
    fn hnf_transform_reproduces_hnf() {
        let m = IntMatrix::from_i64(&[&[6, 4, 2], &[2, 8, 4], &[0, 2, 1]]);
        let (h, u) = m.hnf_with_transform();
        assert_eq!(u.mul(&m), h);
    }

    #[test]
    fn solve_hnf_detects_membership() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]).hnf();
        assert!(m.solve_hnf(&[big(4), big(3)]).is_some());
        assert!(m.solve_hnf(&[big(1), big(0)]).is_none());
        assert!(m.solve_hnf(&[big(2), big(2)]).is_none());
    }

    #[test]
    fn lattice_quotient_examples() {
        // Z^2 / (2Z + 3Z) = Z_6
        let a = IntMatrix::identity(2);
        let b = IntMatrix::diagonal(&[big(2), big(3)]);
        assert_eq!(lattice_quotient(&a, &b).unwrap(), FgAbelianGroup::cyclic(6));
        // A = B -> trivial
        assert_eq!(lattice_quotient(&b, &b).unwrap(), FgAbelianGroup::trivial());
        // Z / empty -> Z
        let empty = IntMatrix::zero(0, 1);
        assert_eq!(lattice_quotient(&IntMatrix::identity(1), &empty).unwrap(), FgAbelianGroup::free(1));
        // containment violation
        assert_eq!(
            lattice_quotient(&b, &a),
            Err(Error::ContainmentViolation)
        );
    }

    #[test]
    fn direct_sum_canonicalizes() {
        let z2 = FgAbelianGroup::cyclic(2);
        let z3 = FgAbelianGroup::cyclic(3);
        assert_eq!(z2.direct_sum(&z3), FgAbelianGroup::cyclic(6));
        assert_eq!(z2.direct_sum(&FgAbelianGroup::trivial()), z2);
        let z2z2 = z2.direct_sum(&z2);
        assert_eq!(z2z2.invariant_factors(), &[big(2), big(2)]);
    }

    #[test]
    fn tensor_and_tor_closed_forms() {
        let z2 = FgAbelianGroup::cyclic(2);
        let z3 = FgAbelianGroup::cyclic(3);
        let z = FgAbelianGroup::free(1);
        assert_eq!(z2.tensor(&z2), z2);
        assert_eq!(z2.tor(&z2), z2);
        assert_eq!(z2.tor(&z3), FgAbelianGroup::trivial());
        assert_eq!(z.tensor(&FgAbelianGroup::cyclic(5)), FgAbelianGroup::cyclic(5));
        assert_eq!(z.tor(&z2), FgAbelianGroup::trivial());
    }

    /// All finite abelian groups of order <= bound, as unordered lists of
    /// prime-power cyclic summands.
    fn groups_up_to(bound: u64) -> Vec<Vec<u64>> {
        fn partitions(n: u32) -> Vec<Vec<u32>> {
            fn helper(n: u32, max: u32) -> Vec<Vec<u32>> {
                if n == 0 {
                    return vec![vec![]];
                }
                let mut out = Vec::new();
                for first in (1..=n.min(max)).rev() {
                    for mut rest in helper(n - first, first) {
                        let mut p = vec![first];
                        p.append(&mut rest);
                        out.push(p);
                    }
                }
                out
            }
            helper(n, n)
        }
        let mut out = Vec::new();
        for n in 1..=bound {
            // factor n
            let mut factors = Vec::new();
            let mut m = n;
            let mut p = 2;
            while p * p <= m {
                if m % p == 0 {
                    let mut e = 0;
                    while m % p == 0 {
                        m /= p;
                        e += 1;
                    }
                    factors.push((p, e));
                }
                p += 1;
            }
            if m > 1 {
                factors.push((m, 1));
            }
            // cartesian product of partitions per prime
            let mut combos: Vec<Vec<u64>> = vec![vec![]];
            for (p, e) in factors {
                let mut next = Vec::new();
                for part in partitions(e) {
                    for c in &combos {
                        let mut c2 = c.clone();
                        for exp in &part {
                            c2.push(p.pow(*exp));
                        }
                        next.push(c2);
                    }
                }
                combos = next;
            }
            out.extend(combos);
        }
        out
    }

    /// Kronecker-style presentation oracle for the tensor product of two
    /// finite abelian groups given as summand lists.
    fn tensor_by_presentation(a: &[u64], b: &[u64]) -> FgAbelianGroup {
        let (s, t) = (a.len(), b.len());
        let mut rel: Vec<Vec<BigInt>> = Vec::new();
        for (i, &m) in a.iter().enumerate() {
            for j in 0..t {
                let mut row = vec![BigInt::zero(); s * t];
                row[i * t + j] = BigInt::from(m);
                rel.push(row);
            }
        }
        for i in 0..s {
            for (j, &n) in b.iter().enumerate() {
                let mut row = vec![BigInt::zero(); s * t];
                row[i * t + j] = BigInt::from(n);
                rel.push(row);
            }
        }
        FgAbelianGroup::from_presentation(s * t, &IntMatrix::from_rows(rel, s * t))
    }

    /// Tor oracle: Tor(Z_m, B) is the m-torsion subgroup of B, realized as
    /// a lattice quotient.
    fn tor_by_torsion_lattice(a: &[u64], b: &[u64]) -> FgAbelianGroup {
        let mut acc = FgAbelianGroup::trivial();
        let diag: Vec<BigInt> = b.iter().map(|&n| BigInt::from(n)).collect();
        let full = IntMatrix::diagonal(&diag);
        for &m in a {
            // kernel of multiplication by m on B: spanned by (n_j / gcd(m, n_j)) e_j
            let kernel_rows: Vec<Vec<BigInt>> = b
                .iter()
                .enumerate()
                .map(|(j, &n)| {
                    let g = BigInt::from(m).gcd(&BigInt::from(n));
                    let mut row = vec![BigInt::zero(); b.len()];
                    row[j] = BigInt::from(n) / g;
                    row
                })
                .collect();
            let kernel = IntMatrix::from_rows(kernel_rows, b.len());
            acc = acc.direct_sum(&lattice_quotient(&kernel, &full).unwrap());
        }
        acc
    }

    #[test]
    fn tensor_tor_vs_presentation_oracle() {
        let groups = groups_up_to(36);
        for a in &groups {
            for b in &groups {
                let ga = FgAbelianGroup::from_cyclic_summands(
                    &a.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>(),
                );
                let gb = FgAbelianGroup::from_cyclic_summands(
                    &b.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>(),
                );
                let t = ga.tensor(&gb);
                assert_eq!(t, tensor_by_presentation(a, b), "tensor {ga} (x) {gb}");
                let tor = ga.tor(&gb);
                assert_eq!(tor, tor_by_torsion_lattice(a, b), "tor {ga}, {gb}");
                // symmetry
                assert_eq!(t, gb.tensor(&ga));
                assert_eq!(tor, gb.tor(&ga));
            }
        }
    }

    #[test]
    fn tensor_tor_bilinear_over_direct_sum() {
        let gs = [
            FgAbelianGroup::cyclic(2),
            FgAbelianGroup::cyclic(4),
            FgAbelianGroup::cyclic(9),
            FgAbelianGroup::free(1),
        ];
        for a in &gs {
            for b in &gs {
                for c in &gs {
                    let lhs = a.tensor(&b.direct_sum(c));
                    let rhs = a.tensor(b).direct_sum(&a.tensor(c));
                    assert_eq!(lhs, rhs);
                    let lhs = a.tor(&b.direct_sum(c));
                    let rhs = a.tor(b).direct_sum(&a.tor(c));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn quotient_order_on_groups() {
        let z2 = FgAbelianGroup::cyclic(2);
        let z4 = FgAbelianGroup::cyclic(4);
        let z2z2 = z2.direct_sum(&z2);
        assert!(z2.is_quotient_of(&z4));
        assert!(!z4.is_quotient_of(&z2));
        assert!(z2.is_quotient_of(&z2z2));
        assert!(!z2z2.is_quotient_of(&z4));
        assert!(FgAbelianGroup::trivial().is_quotient_of(&z2));
        assert!(z2.is_quotient_of(&FgAbelianGroup::free(1)));
    }

    #[test]
    fn canonical_form_validation() {
        assert!(FgAbelianGroup::from_parts(0, vec![big(2), big(6)]).is_ok());
        assert!(FgAbelianGroup::from_parts(0, vec![big(2), big(3)]).is_err());
        assert!(FgAbelianGroup::from_parts(0, vec![big(1)]).is_err());
    }
}
