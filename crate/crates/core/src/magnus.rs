//! Integer power series in noncommuting variables, truncated at a total
//! degree bound.
//!
//! A context fixes the number of generators `t` and the truncation class
//! `k`; a series stores exact integer coefficients on words of length at
//! most `k` over the letters `X_1, ..., X_t`. The free group on `t`
//! generators embeds into the units of this ring via `x_i -> 1 + X_i`,
//! faithfully modulo the (k+1)-st lower central term, and an element lies
//! in the n-th lower central term exactly when its series has no terms of
//! positive degree below `n`.
//!
//! Monomials are addressed by their rank in the (degree, lexicographic)
//! enumeration of all words, so concatenation is index arithmetic and
//! every iteration order is deterministic.
//!
//! Invariants:
//! - no stored zero coefficients (equality is structural)
//! - all indices below the context's monomial count
//! - series of group elements have constant coefficient 1 ("group-like")

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Hard cap on the monomial universe so indices fit comfortably in `u32`.
const MAX_MONOMIALS: u128 = 1 << 31;

/// Dense scratch accumulation is used below this universe size.
const DENSE_SCRATCH_LIMIT: u64 = 1 << 16;

/// A word in the generators; letters are 1-based generator indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    letters: Box<[u16]>,
}

impl Monomial {
    pub fn empty() -> Self {
        Monomial { letters: Box::new([]) }
    }

    pub fn new(letters: &[u16]) -> Self {
        assert!(letters.iter().all(|&l| l >= 1), "letters are 1-based");
        Monomial { letters: letters.into() }
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[u16] {
        &self.letters
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.letters.len() + other.letters.len());
        v.extend_from_slice(&self.letters);
        v.extend_from_slice(&other.letters);
        Monomial { letters: v.into() }
    }
}

/// Degree first, then lexicographic — the global monomial order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let simple = self.letters.iter().all(|&l| l <= 3);
        let name = |l: u16| -> String {
            if simple {
                ["X", "Y", "Z"][(l - 1) as usize].to_string()
            } else {
                format!("X{l}")
            }
        };
        let mut out = String::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            if !out.is_empty() && !simple {
                out.push('*');
            }
            out.push_str(&name(l));
            if run > 1 {
                out.push_str(&format!("^{run}"));
            }
            i += run;
        }
        write!(f, "{out}")
    }
}

struct CtxInner {
    t: usize,
    k: usize,
    /// offsets[d] = index of the first degree-d monomial; offsets[k+1] = count
    offsets: Vec<u64>,
    /// powers of t as u64, up to t^k
    tpow: Vec<u64>,
}

/// Number of generators plus truncation class; cheap to clone and share.
#[derive(Clone)]
pub struct TruncationContext {
    inner: Arc<CtxInner>,
}

impl fmt::Debug for TruncationContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncationContext(t={}, k={})", self.t(), self.k())
    }
}

impl PartialEq for TruncationContext {
    fn eq(&self, other: &Self) -> bool {
        self.t() == other.t() && self.k() == other.k()
    }
}
impl Eq for TruncationContext {}

impl TruncationContext {
    pub fn new(t: usize, k: usize) -> Result<Self, Error> {
        if t < 1 || k < 1 {
            return Err(Error::InvalidContext { t, k });
        }
        let mut total: u128 = 0;
        let mut p: u128 = 1;
        for _ in 0..=k {
            total += p;
            if total > MAX_MONOMIALS {
                return Err(Error::ContextTooLarge { monomials: total });
            }
            p = p.saturating_mul(t as u128);
        }
        let mut offsets = Vec::with_capacity(k + 2);
        let mut tpow = Vec::with_capacity(k + 1);
        let mut acc: u64 = 0;
        let mut pw: u64 = 1;
        for _ in 0..=k {
            offsets.push(acc);
            tpow.push(pw);
            acc += pw;
            pw = pw.saturating_mul(t as u64);
        }
        offsets.push(acc);
        Ok(TruncationContext { inner: Arc::new(CtxInner { t, k, offsets, tpow }) })
    }

    pub fn t(&self) -> usize {
        self.inner.t
    }

    pub fn k(&self) -> usize {
        self.inner.k
    }

    /// Total number of monomials of degree <= k.
    pub fn monomial_count(&self) -> u64 {
        *self.inner.offsets.last().unwrap()
    }

    pub fn degree_of(&self, index: u32) -> usize {
        let off = &self.inner.offsets;
        debug_assert!((index as u64) < *off.last().unwrap());
        match off.binary_search(&(index as u64)) {
            Ok(d) => d.min(self.inner.k),
            Err(d) => d - 1,
        }
    }

    pub fn index_of(&self, m: &Monomial) -> Option<u32> {
        let d = m.degree();
        if d > self.inner.k {
            return None;
        }
        let mut v: u64 = 0;
        for &l in m.letters() {
            if l as usize > self.inner.t {
                return None;
            }
            v = v * self.inner.t as u64 + (l as u64 - 1);
        }
        Some((self.inner.offsets[d] + v) as u32)
    }

    pub fn monomial(&self, index: u32) -> Monomial {
        let d = self.degree_of(index);
        let mut v = index as u64 - self.inner.offsets[d];
        let mut letters = vec![0u16; d];
        for i in (0..d).rev() {
            letters[i] = (v % self.inner.t as u64) as u16 + 1;
            v /= self.inner.t as u64;
        }
        Monomial { letters: letters.into() }
    }

    /// Index of the concatenation, or `None` past the truncation bound.
    #[inline]
    fn concat_index(&self, da: usize, va: u64, db: usize, vb: u64) -> u32 {
        (self.inner.offsets[da + db] + va * self.inner.tpow[db] + vb) as u32
    }

    /// The constant series 1 (the group identity).
    pub fn one(&self) -> TruncatedSeries {
        TruncatedSeries { ctx: self.clone(), terms: vec![(0, BigInt::one())] }
    }

    /// The zero series.
    pub fn zero(&self) -> TruncatedSeries {
        TruncatedSeries { ctx: self.clone(), terms: Vec::new() }
    }

    /// Magnus image `1 + X_i` of the i-th generator (1-based).
    pub fn generator(&self, i: usize) -> Result<TruncatedSeries, Error> {
        if i < 1 || i > self.inner.t {
            return Err(Error::GeneratorOutOfRange { index: i, t: self.inner.t });
        }
        let idx = self.inner.offsets[1] as u32 + (i as u32 - 1);
        Ok(TruncatedSeries {
            ctx: self.clone(),
            terms: vec![(0, BigInt::one()), (idx, BigInt::one())],
        })
    }
}

/// Truncated integer series; immutable value semantics.
#[derive(Clone)]
pub struct TruncatedSeries {
    ctx: TruncationContext,
    /// (monomial index, coefficient), sorted by index, no zeros
    terms: Vec<(u32, BigInt)>,
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}
impl Eq for TruncatedSeries {}

impl TruncatedSeries {
    pub fn context(&self) -> &TruncationContext {
        &self.ctx
    }

    /// Build from explicit monomial terms; repeated monomials accumulate.
    pub fn from_terms<I>(ctx: &TruncationContext, terms: I) -> TruncatedSeries
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut map: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            let idx = ctx
                .index_of(&m)
                .unwrap_or_else(|| panic!("monomial {m} outside context {ctx:?}"));
            *map.entry(idx).or_insert_with(BigInt::zero) += c;
        }
        TruncatedSeries {
            ctx: ctx.clone(),
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn constant_term(&self) -> BigInt {
        match self.terms.first() {
            Some((0, c)) => c.clone(),
            _ => BigInt::zero(),
        }
    }

    /// Group-like: constant coefficient 1.
    pub fn is_group_like(&self) -> bool {
        matches!(self.terms.first(), Some((0, c)) if c.is_one())
    }

    /// Iterate terms in (degree, lex) order.
    pub fn iter(&self) -> impl Iterator<Item = (Monomial, &BigInt)> + '_ {
        self.terms.iter().map(|(i, c)| (self.ctx.monomial(*i), c))
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        match self.ctx.index_of(m) {
            Some(idx) => match self.terms.binary_search_by_key(&idx, |(i, _)| *i) {
                Ok(p) => self.terms[p].1.clone(),
                Err(_) => BigInt::zero(),
            },
            None => BigInt::zero(),
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn assert_same_ctx(&self, other: &TruncatedSeries) {
        assert!(
            self.ctx == other.ctx,
            "context mismatch: {:?} vs {:?}",
            self.ctx,
            other.ctx
        );
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.assert_same_ctx(other);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp(&other.terms[j].0) {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &other.terms[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        TruncatedSeries { ctx: self.ctx.clone(), terms: out }
    }

    pub fn neg(&self) -> TruncatedSeries {
        TruncatedSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(i, c)| (*i, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.add(&other.neg())
    }

    /// Convolution over concatenated monomials, discarding degree > k.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.assert_same_ctx(other);
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let ctx = &self.ctx.inner;
        let k = ctx.k;
        let count = self.ctx.monomial_count();
        let mut out: Vec<(u32, BigInt)> = Vec::new();
        if count <= DENSE_SCRATCH_LIMIT {
            let mut scratch: Vec<BigInt> = vec![BigInt::zero(); count as usize];
            let mut da = 0usize;
            for (ia, ca) in &self.terms {
                while (*ia as u64) >= ctx.offsets[da + 1] {
                    da += 1;
                }
                let va = *ia as u64 - ctx.offsets[da];
                let dmax = k - da;
                let mut db = 0usize;
                for (ib, cb) in &other.terms {
                    while (*ib as u64) >= ctx.offsets[db + 1] {
                        db += 1;
                    }
                    if db > dmax {
                        break;
                    }
                    let vb = *ib as u64 - ctx.offsets[db];
                    let idx = self.ctx.concat_index(da, va, db, vb);
                    scratch[idx as usize] += ca * cb;
                }
            }
            for (idx, c) in scratch.into_iter().enumerate() {
                if !c.is_zero() {
                    out.push((idx as u32, c));
                }
            }
        } else {
            let mut scratch: BTreeMap<u32, BigInt> = BTreeMap::new();
            let mut da = 0usize;
            for (ia, ca) in &self.terms {
                while (*ia as u64) >= ctx.offsets[da + 1] {
                    da += 1;
                }
                let va = *ia as u64 - ctx.offsets[da];
                let dmax = k - da;
                let mut db = 0usize;
                for (ib, cb) in &other.terms {
                    while (*ib as u64) >= ctx.offsets[db + 1] {
                        db += 1;
                    }
                    if db > dmax {
                        break;
                    }
                    let vb = *ib as u64 - ctx.offsets[db];
                    let idx = self.ctx.concat_index(da, va, db, vb);
                    *scratch.entry(idx).or_insert_with(BigInt::zero) += ca * cb;
                }
            }
            out = scratch.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        }
        TruncatedSeries { ctx: self.ctx.clone(), terms: out }
    }

    /// Multiplicative inverse of a group-like series: the geometric series
    /// in `1 - self`, exact at truncation k.
    pub fn inverse(&self) -> TruncatedSeries {
        assert!(self.is_group_like(), "inverse of non-group-like series (constant term != 1)");
        let nilpotent = TruncatedSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().skip(1).map(|(i, c)| (*i, -c.clone())).collect(),
        };
        let mut acc = self.ctx.one();
        let mut pow = self.ctx.one();
        for _ in 0..self.ctx.k() {
            pow = pow.mul(&nilpotent);
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
        }
        acc
    }

    /// Integer power of a group-like series; negative exponents go through
    /// the inverse.
    pub fn power(&self, e: i64) -> TruncatedSeries {
        self.power_big(&BigInt::from(e))
    }

    /// `power` with an arbitrary-precision exponent.
    pub fn power_big(&self, e: &BigInt) -> TruncatedSeries {
        assert!(self.is_group_like(), "power of non-group-like series (constant term != 1)");
        if e.is_zero() {
            return self.ctx.one();
        }
        let base = if e.is_negative() { self.inverse() } else { self.clone() };
        let mag = e.magnitude();
        let bits = mag.bits();
        let mut acc = self.ctx.one();
        let mut sq = base;
        for i in 0..bits {
            if mag.bit(i) {
                acc = acc.mul(&sq);
            }
            if i + 1 < bits {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    /// Group commutator `self^{-1} other^{-1} self other`.
    pub fn commutator(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.assert_same_ctx(other);
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// Conjugate `other^{-1} self other`.
    pub fn conjugate_by(&self, other: &TruncatedSeries) -> TruncatedSeries {
        other.inverse().mul(self).mul(other)
    }

    /// Smallest n >= 1 with a nonzero degree-n coefficient; `None` when the
    /// series has no positive-degree terms (the identity, for group-likes).
    pub fn min_positive_degree(&self) -> Option<usize> {
        self.terms.iter().find(|(i, _)| *i != 0).map(|(i, _)| self.ctx.degree_of(*i))
    }

    /// Exact degree-n slice as a monomial map.
    pub fn homogeneous_part(&self, n: usize) -> BTreeMap<Monomial, BigInt> {
        assert!(n >= 1 && n <= self.ctx.k(), "degree {n} out of range 1..={}", self.ctx.k());
        let lo = self.ctx.inner.offsets[n];
        let hi = self.ctx.inner.offsets[n + 1];
        self.terms
            .iter()
            .filter(|(i, _)| (*i as u64) >= lo && (*i as u64) < hi)
            .map(|(i, c)| (self.ctx.monomial(*i), c.clone()))
            .collect()
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries({self})")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in &self.terms {
            let m = self.ctx.monomial(*idx);
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if *idx == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}{m}")?;
            }
        }
        Ok(())
    }
}

impl std::ops::Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}
