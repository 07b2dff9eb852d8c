//! Subgroup machinery for the free nilpotent group `F/gamma_{k+1}(F)`.
//!
//! Elements are Magnus series; the Mal'cev coordinate of an element along
//! the concatenated Hall basis (weights 1..k) is computed by deflation:
//! read the weight-n slice through `lie_coordinates`, strip it by
//! multiplying with inverse basis-element powers, repeat. Subgroups are
//! held as echelons: rows with strictly increasing lead indices and
//! positive lead entries, closed under pairwise commutators so that
//! membership is decided by sifting. Construction is single-threaded per
//! computation; finished values are immutable.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::hall::HallBasis;
use crate::intlinalg::IntMatrix;
use crate::magnus::{TruncatedSeries, TruncationContext};

struct NilInner {
    series: TruncationContext,
    hall: HallBasis,
    /// start offset of each weight layer in the full basis; length k+1
    layer_starts: Vec<usize>,
    total: usize,
    /// group realization of each basic commutator, with inverse
    realizations: Vec<TruncatedSeries>,
    realization_invs: Vec<TruncatedSeries>,
}

/// Ambient data for `F/gamma_{k+1}(F)`: series context, Hall basis, and
/// the group realizations of all basic commutators. Cheap to clone.
#[derive(Clone)]
pub struct NilContext {
    inner: Arc<NilInner>,
}

impl fmt::Debug for NilContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NilContext(t={}, k={}, m={})", self.t(), self.k(), self.total_rank())
    }
}

impl PartialEq for NilContext {
    fn eq(&self, other: &Self) -> bool {
        self.t() == other.t() && self.k() == other.k()
    }
}
impl Eq for NilContext {}

impl NilContext {
    pub fn new(t: usize, k: usize) -> Result<Self, Error> {
        let series = TruncationContext::new(t, k)?;
        let hall = HallBasis::new(t, k);
        let mut layer_starts = Vec::with_capacity(k + 1);
        for n in 1..=k {
            layer_starts.push(hall.layer_range(n).start);
        }
        layer_starts.push(hall.total_rank());
        let total = hall.total_rank();
        let mut realizations: Vec<TruncatedSeries> = Vec::with_capacity(total);
        let mut realization_invs: Vec<TruncatedSeries> = Vec::with_capacity(total);
        for i in 0..total {
            let c = hall.commutator(i);
            let s = match c.generator() {
                Some(l) => series.generator(l as usize)?,
                None => {
                    let (u, v) = c.parts().expect("non-generator has parts");
                    // [a, b] = a^{-1} b^{-1} a b assembled from cached parts
                    realization_invs[u.index()]
                        .mul(&realization_invs[v.index()])
                        .mul(&realizations[u.index()])
                        .mul(&realizations[v.index()])
                }
            };
            realization_invs.push(s.inverse());
            realizations.push(s);
        }
        Ok(NilContext {
            inner: Arc::new(NilInner {
                series,
                hall,
                layer_starts,
                total,
                realizations,
                realization_invs,
            }),
        })
    }

    pub fn t(&self) -> usize {
        self.inner.series.t()
    }

    pub fn k(&self) -> usize {
        self.inner.series.k()
    }

    pub fn series_context(&self) -> &TruncationContext {
        &self.inner.series
    }

    pub fn hall(&self) -> &HallBasis {
        &self.inner.hall
    }

    /// Length of the full Mal'cev coordinate vector.
    pub fn total_rank(&self) -> usize {
        self.inner.total
    }

    pub fn weight_of(&self, index: usize) -> usize {
        self.inner.hall.weight_of(index)
    }

    /// Indices of the weight-n block within the coordinate vector.
    pub fn layer_range(&self, n: usize) -> Range<usize> {
        assert!(n >= 1 && n <= self.k());
        self.inner.layer_starts[n - 1]..self.inner.layer_starts[n]
    }

    pub fn layer_rank(&self, n: usize) -> usize {
        self.layer_range(n).len()
    }

    /// Group realization of the basic commutator at a global index.
    pub fn realization(&self, index: usize) -> &TruncatedSeries {
        &self.inner.realizations[index]
    }

    /// `realization(index)^e`, using the cached inverse for negative e.
    fn realization_power(&self, index: usize, e: &BigInt) -> TruncatedSeries {
        if e.is_negative() {
            self.inner.realization_invs[index].power_big(&-e.clone())
        } else {
            self.inner.realizations[index].power_big(e)
        }
    }

    pub fn generator(&self, i: usize) -> Result<TruncatedSeries, Error> {
        self.inner.series.generator(i)
    }

    /// Weight-n coordinates of a slice, via the Hall-layer solver.
    fn layer_coords(&self, a: &TruncatedSeries, n: usize) -> Vec<BigInt> {
        let slice = a.homogeneous_part(n);
        if slice.is_empty() {
            return vec![BigInt::zero(); self.layer_rank(n)];
        }
        self.inner
            .hall
            .lie_coordinates(&slice, n)
            .expect("slice of a group element at its minimal degree is a Lie element")
    }

    /// Mal'cev coordinates by deflation; panics on non-group-like input.
    pub fn to_coordinates(&self, a: &TruncatedSeries) -> Coordinates {
        assert!(a.is_group_like(), "coordinates of a non-group-like series");
        let mut coords = vec![BigInt::zero(); self.total_rank()];
        let mut residual = a.clone();
        while let Some(n) = residual.min_positive_degree() {
            let c = self.layer_coords(&residual, n);
            let range = self.layer_range(n);
            let mut prefix = self.series_context().one();
            for (pos, v) in c.iter().enumerate() {
                if !v.is_zero() {
                    prefix = prefix.mul(&self.realization_power(range.start + pos, v));
                }
            }
            residual = prefix.inverse().mul(&residual);
            debug_assert!(residual.min_positive_degree().map_or(true, |m| m > n));
            coords[range.clone()].clone_from_slice(&c);
        }
        Coordinates(coords)
    }

    /// Ordered product of basis-element powers.
    pub fn from_coordinates(&self, c: &Coordinates) -> TruncatedSeries {
        assert_eq!(c.0.len(), self.total_rank(), "coordinate length mismatch");
        let mut acc = self.series_context().one();
        for (i, v) in c.0.iter().enumerate() {
            if !v.is_zero() {
                acc = acc.mul(&self.realization_power(i, v));
            }
        }
        acc
    }
}

/// Exponent vector along the full Hall basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Coordinates(pub Vec<BigInt>);

impl Coordinates {
    pub fn zeros(len: usize) -> Self {
        Coordinates(vec![BigInt::zero(); len])
    }

    pub fn from_i64(v: &[i64]) -> Self {
        Coordinates(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.0
    }
}

/// One echelon row: a subgroup element whose first nonzero coordinate
/// sits at `lead`; `layer_block` caches its coordinates on the lead's
/// whole weight layer (zeros before the lead, positive entry at it).
#[derive(Clone)]
struct Row {
    series: TruncatedSeries,
    inverse: TruncatedSeries,
    lead: usize,
    layer_block: Vec<BigInt>,
}

impl Row {
    fn new(ctx: &NilContext, series: TruncatedSeries, lead: usize, layer_block: Vec<BigInt>) -> Row {
        let pos = lead - ctx.layer_range(ctx.weight_of(lead)).start;
        debug_assert!(layer_block[pos].is_positive());
        debug_assert!(layer_block[..pos].iter().all(|v| v.is_zero()));
        let inverse = series.inverse();
        Row { series, inverse, lead, layer_block }
    }

    fn entry<'a>(&'a self, ctx: &NilContext) -> &'a BigInt {
        let pos = self.lead - ctx.layer_range(ctx.weight_of(self.lead)).start;
        &self.layer_block[pos]
    }
}

/// Result of sifting an element through an echelon: the factors used
/// (lead index, exponent, in lead order) and the unreduced residual.
/// The element equals `prod rows[lead]^exp * residual`.
pub struct Sift {
    pub factors: Vec<(usize, BigInt)>,
    pub residual: TruncatedSeries,
}

impl Sift {
    pub fn is_member(&self) -> bool {
        self.residual.is_one()
    }
}

/// Canonical triangular generating sequence of a subgroup.
#[derive(Clone)]
pub struct Echelon {
    ctx: NilContext,
    rows: BTreeMap<usize, Row>,
}

impl PartialEq for Echelon {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(other.rows.iter())
                .all(|((l1, r1), (l2, r2))| l1 == l2 && r1.series == r2.series)
    }
}
impl Eq for Echelon {}

impl fmt::Debug for Echelon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Echelon({} rows)", self.rows.len())?;
        for (lead, row) in &self.rows {
            writeln!(f, "  lead {} (weight {}): entry {}", lead, self.ctx.weight_of(*lead), row.entry(&self.ctx))?;
        }
        Ok(())
    }
}

impl Echelon {
    /// Echelonize a generating set: close under pairwise commutators,
    /// insert by lead index with extended-gcd combination on collisions,
    /// then reduce to the canonical form.
    pub fn echelonize(ctx: &NilContext, gens: &[TruncatedSeries]) -> Echelon {
        Builder::new(ctx.clone(), false).run(gens)
    }

    /// Smallest subgroup containing `gens` that is stable under
    /// conjugation by the ambient generators (hence normal).
    pub fn normal_closure(ctx: &NilContext, gens: &[TruncatedSeries]) -> Echelon {
        Builder::new(ctx.clone(), true).run(gens)
    }

    pub fn context(&self) -> &NilContext {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn leads(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn row_series(&self, lead: usize) -> Option<&TruncatedSeries> {
        self.rows.get(&lead).map(|r| &r.series)
    }

    /// Full Mal'cev coordinates of a row, computed on demand.
    pub fn row_coordinates(&self, lead: usize) -> Option<Coordinates> {
        self.rows.get(&lead).map(|r| self.ctx.to_coordinates(&r.series))
    }

    /// Sift an element: repeatedly cancel the lead coordinate using the
    /// unique row with that lead, requiring exact divisibility.
    pub fn sift(&self, a: &TruncatedSeries) -> Sift {
        assert!(a.is_group_like(), "sifting a non-group-like series");
        let mut factors = Vec::new();
        let mut residual = a.clone();
        'layers: while let Some(n) = residual.min_positive_degree() {
            let mut c = self.ctx.layer_coords(&residual, n);
            let start = self.ctx.layer_range(n).start;
            for i in 0..c.len() {
                if c[i].is_zero() {
                    continue;
                }
                let Some(row) = self.rows.get(&(start + i)) else {
                    break 'layers;
                };
                let e = row.entry(&self.ctx);
                // floor division cancels as much as possible; a nonzero
                // remainder can never be cleared, so the sift stops there
                let (q, r) = c[i].div_mod_floor(e);
                if !q.is_zero() {
                    residual = row.inverse.power_big(&q).mul(&residual);
                    for (pos, v) in row.layer_block.iter().enumerate() {
                        if !v.is_zero() {
                            c[pos] -= &q * v;
                        }
                    }
                    factors.push((start + i, q));
                }
                if !r.is_zero() {
                    break 'layers;
                }
            }
        }
        Sift { factors, residual }
    }

    pub fn contains(&self, a: &TruncatedSeries) -> bool {
        self.sift(a).is_member()
    }

    /// Weight-n coordinate blocks of the rows with lead weight n, in
    /// Hermite normal form. Rows with lead weight above n have zero blocks
    /// there, so this spans the image of (subgroup `∩` weight-≥n part) in
    /// the weight-n layer.
    pub fn layer_lattice(&self, n: usize) -> IntMatrix {
        let width = self.ctx.layer_rank(n);
        let rows: Vec<Vec<BigInt>> = self
            .rows
            .values()
            .filter(|r| self.ctx.weight_of(r.lead) == n)
            .map(|r| r.layer_block.clone())
            .collect();
        IntMatrix::from_rows(rows, width).hnf()
    }

    /// Every row stays a member after conjugation by each ambient
    /// generator and its inverse.
    pub fn is_conjugation_stable(&self) -> bool {
        let t = self.ctx.t();
        let gens: Vec<TruncatedSeries> =
            (1..=t).map(|i| self.ctx.generator(i).unwrap()).collect();
        self.rows.values().all(|row| {
            gens.iter().all(|g| {
                self.contains(&row.series.conjugate_by(g))
                    && self.contains(&row.series.conjugate_by(&g.inverse()))
            })
        })
    }

    /// Canonical-form check: strictly increasing leads (by construction),
    /// positive lead entries, and every other row's coordinate at a lead
    /// reduced into `[0, entry)`.
    pub fn is_canonical(&self) -> bool {
        for row in self.rows.values() {
            if !row.entry(&self.ctx).is_positive() {
                return false;
            }
            let coords = self.ctx.to_coordinates(&row.series);
            for (lead2, row2) in &self.rows {
                if *lead2 == row.lead {
                    continue;
                }
                let v = &coords.0[*lead2];
                if v.is_negative() || v >= row2.entry(&self.ctx) {
                    return false;
                }
            }
        }
        true
    }
}

struct Builder {
    ctx: NilContext,
    rows: BTreeMap<usize, Row>,
    queue: VecDeque<TruncatedSeries>,
    dirty: BTreeSet<usize>,
    normal: bool,
}

impl Builder {
    fn new(ctx: NilContext, normal: bool) -> Builder {
        Builder { ctx, rows: BTreeMap::new(), queue: VecDeque::new(), dirty: BTreeSet::new(), normal }
    }

    fn run(mut self, gens: &[TruncatedSeries]) -> Echelon {
        for g in gens {
            assert!(g.is_group_like(), "echelon generator must be group-like");
            assert!(
                g.context() == self.ctx.series_context(),
                "generator context mismatch"
            );
            self.queue.push_back(g.clone());
        }
        loop {
            if let Some(g) = self.queue.pop_front() {
                self.insert(g);
                continue;
            }
            let Some(&lead) = self.dirty.iter().next() else { break };
            self.dirty.remove(&lead);
            self.pair_up(lead);
        }
        let mut echelon = Echelon { ctx: self.ctx, rows: self.rows };
        canonicalize(&mut echelon);
        echelon
    }

    /// Commutators of the row at `lead` with all rows (closure) and, for
    /// normal closures, with the ambient generators and their inverses.
    fn pair_up(&mut self, lead: usize) {
        let k = self.ctx.k();
        let w = self.ctx.weight_of(lead);
        let mut found: Vec<TruncatedSeries> = Vec::new();
        {
            let Some(row) = self.rows.get(&lead) else { return };
            for (&lead2, row2) in &self.rows {
                if lead2 == lead || w + self.ctx.weight_of(lead2) > k {
                    continue;
                }
                let c = row.series.commutator(&row2.series);
                if !c.is_one() {
                    found.push(c);
                }
            }
            if self.normal && w + 1 <= k {
                for i in 1..=self.ctx.t() {
                    let g = self.ctx.generator(i).unwrap();
                    for h in [&g, &g.inverse()] {
                        let c = row.series.commutator(h);
                        if !c.is_one() {
                            found.push(c);
                        }
                    }
                }
            }
        }
        self.queue.extend(found);
    }

    fn insert(&mut self, mut g: TruncatedSeries) {
        while let Some(n) = g.min_positive_degree() {
            let mut c = self.ctx.layer_coords(&g, n);
            let start = self.ctx.layer_range(n).start;
            let mut i = 0;
            while i < c.len() {
                if c[i].is_zero() {
                    i += 1;
                    continue;
                }
                let lead = start + i;
                match self.rows.get(&lead) {
                    None => {
                        if c[i].is_negative() {
                            g = g.inverse();
                            for v in c.iter_mut() {
                                *v = -std::mem::take(v);
                            }
                        }
                        let row = Row::new(&self.ctx, g, lead, c);
                        self.rows.insert(lead, row);
                        self.dirty.insert(lead);
                        return;
                    }
                    Some(row) => {
                        let e = row.entry(&self.ctx).clone();
                        let (q, r) = c[i].div_rem(&e);
                        if r.is_zero() {
                            g = row.inverse.power_big(&q).mul(&g);
                            let block = row.layer_block.clone();
                            for (pos, v) in block.iter().enumerate() {
                                if !v.is_zero() {
                                    c[pos] -= &q * v;
                                }
                            }
                            debug_assert!(c[i].is_zero());
                        } else {
                            // extended-gcd combination: a new row with the
                            // gcd as lead entry replaces the old one; both
                            // leftovers re-enter the queue / current sift
                            let egcd = e.extended_gcd(&c[i]);
                            let (d, alpha, beta) = (egcd.gcd, egcd.x, egcd.y);
                            debug_assert!(d.is_positive());
                            let n_series =
                                row.series.power_big(&alpha).mul(&g.power_big(&beta));
                            let mut n_block = row.layer_block.clone();
                            for (pos, v) in n_block.iter_mut().enumerate() {
                                *v = &*v * &alpha + &c[pos] * &beta;
                            }
                            debug_assert_eq!(n_block[i], d);
                            let n_row = Row::new(&self.ctx, n_series, lead, n_block.clone());
                            let old = self.rows.insert(lead, n_row).expect("row existed");
                            self.dirty.insert(lead);
                            let n_inv = &self.rows[&lead].inverse;
                            let u = &e / &d;
                            self.queue.push_back(n_inv.power_big(&u).mul(&old.series));
                            let v = &c[i] / &d;
                            g = n_inv.power_big(&v).mul(&g);
                            for (pos, b) in n_block.iter().enumerate() {
                                if !b.is_zero() {
                                    c[pos] -= &v * b;
                                }
                            }
                            debug_assert!(c[i].is_zero());
                        }
                    }
                }
            }
            debug_assert!(g.min_positive_degree().map_or(true, |m| m > n));
        }
    }
}

/// One left-to-right reduction pass: for each occupied lead J in
/// increasing order, every other row's coordinate at J is reduced into
/// `[0, entry)` by right-multiplying with a power of the row at J. Later
/// targets never disturb earlier columns, so a single pass canonicalizes.
fn canonicalize(echelon: &mut Echelon) {
    let ctx = echelon.ctx.clone();
    let k = ctx.k();
    let leads: Vec<usize> = echelon.rows.keys().copied().collect();
    if leads.len() <= 1 {
        return;
    }
    // per-row deflation state: residual with layers below the current one
    // stripped, plus its coordinates on the current layer
    let mut residuals: BTreeMap<usize, TruncatedSeries> =
        echelon.rows.iter().map(|(l, r)| (*l, r.series.clone())).collect();
    for n in 1..=k {
        let range = ctx.layer_range(n);
        if range.is_empty() {
            continue;
        }
        let mut layer_coords: BTreeMap<usize, Vec<BigInt>> = BTreeMap::new();
        for &lead in &leads {
            if ctx.weight_of(lead) <= n {
                layer_coords.insert(lead, ctx.layer_coords(&residuals[&lead], n));
            }
        }
        let layer_leads: Vec<usize> =
            leads.iter().copied().filter(|l| range.contains(l)).collect();
        for &target in &layer_leads {
            let reducer_series = echelon.rows[&target].series.clone();
            let reducer_inv = reducer_series.inverse();
            let reducer_block = layer_coords[&target].clone();
            let pos = target - range.start;
            let entry = reducer_block[pos].clone();
            for &lead in &leads {
                if lead == target || ctx.weight_of(lead) > n {
                    continue;
                }
                let q = layer_coords[&lead][pos].div_floor(&entry);
                if q.is_zero() {
                    continue;
                }
                let factor = reducer_inv.power_big(&q);
                let row = echelon.rows.get_mut(&lead).expect("row exists");
                row.series = row.series.mul(&factor);
                let res = residuals.get_mut(&lead).expect("state exists");
                *res = res.mul(&factor);
                let cs = layer_coords.get_mut(&lead).expect("coords exist");
                for (p, b) in reducer_block.iter().enumerate() {
                    if !b.is_zero() {
                        cs[p] -= &q * b;
                    }
                }
                debug_assert!(!cs[pos].is_negative() && cs[pos] < entry);
            }
        }
        // strip this layer from every active residual; sync stored blocks
        for &lead in &leads {
            if ctx.weight_of(lead) > n {
                continue;
            }
            let cs = &layer_coords[&lead];
            if ctx.weight_of(lead) == n {
                let row = echelon.rows.get_mut(&lead).expect("row exists");
                row.layer_block = cs.clone();
            }
            let mut prefix = ctx.series_context().one();
            for (p, v) in cs.iter().enumerate() {
                if !v.is_zero() {
                    prefix = prefix.mul(&ctx.realization_power(range.start + p, v));
                }
            }
            if !prefix.is_one() {
                let res = residuals.get_mut(&lead).expect("state exists");
                *res = prefix.inverse().mul(res);
            }
        }
    }
    for row in echelon.rows.values_mut() {
        row.inverse = row.series.inverse();
    }
}
