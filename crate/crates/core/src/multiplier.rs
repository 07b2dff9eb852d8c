//! Truncated c-nilpotent multipliers of free products of finite cyclic
//! groups, the rho-series machinery behind them, and the closed-form
//! route through the Burns–Ellis free-product formula.
//!
//! For orders `(r_1, ..., r_t)` let `S` be the normal closure of
//! `{x_i^{r_i}}` in the free group `F`, and `rho_1(S) = S`,
//! `rho_{n+1}(S) = [rho_n(S), F]`. The c-nilpotent multiplier is
//! `(S ∩ gamma_{c+1}(F)) / rho_{c+1}(S)`. The engine computes its image
//! inside `F/gamma_{k+1}(F)`: the exact multiplier modulo elements of
//! `S ∩ gamma_{k+1}(F)`, so the true group surjects onto every reported
//! one and the reports grow monotonically with the depth `k`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::Error;
use crate::intlinalg::{lattice_quotient, FgAbelianGroup, IntMatrix};
use crate::magnus::TruncatedSeries;
use crate::nilgroup::{Echelon, NilContext};

/// Orders of the cyclic free factors; every order is at least 1
/// (an order-1 factor collapses, infinite factors are not accepted).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CyclicFactors {
    orders: Vec<u64>,
}

impl CyclicFactors {
    pub fn new(orders: Vec<u64>) -> Result<Self, Error> {
        if orders.is_empty() {
            return Err(Error::InvalidOrders("need at least one cyclic factor".into()));
        }
        if let Some(&bad) = orders.iter().find(|&&r| r == 0) {
            return Err(Error::InvalidOrders(format!(
                "order {bad} < 1: infinite cyclic factors are not supported by the engine"
            )));
        }
        Ok(CyclicFactors { orders })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn t(&self) -> usize {
        self.orders.len()
    }

    pub fn pairwise_coprime(&self) -> bool {
        for (i, a) in self.orders.iter().enumerate() {
            for b in &self.orders[i + 1..] {
                if a.gcd(b) != 1 {
                    return false;
                }
            }
        }
        true
    }

    /// First non-coprime pair, if any.
    pub fn non_coprime_pair(&self) -> Option<(u64, u64)> {
        for (i, a) in self.orders.iter().enumerate() {
            for b in &self.orders[i + 1..] {
                if a.gcd(b) != 1 {
                    return Some((*a, *b));
                }
            }
        }
        None
    }

    /// The relator images `x_i^{r_i}` in a truncated context.
    pub fn relators(&self, ctx: &NilContext) -> Vec<TruncatedSeries> {
        self.orders
            .iter()
            .enumerate()
            .map(|(i, &r)| ctx.generator(i + 1).unwrap().power(r as i64))
            .collect()
    }
}

impl fmt::Display for CyclicFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.orders.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

/// Abelianization of the free product: the direct sum of the cyclic
/// factors, canonicalized.
pub fn abelianization(f: &CyclicFactors) -> FgAbelianGroup {
    let summands: Vec<BigInt> = f.orders.iter().map(|&r| BigInt::from(r)).collect();
    FgAbelianGroup::from_cyclic_summands(&summands)
}

/// One weight layer of the rho-series: the image lattice of `rho_n(S)` in
/// the weight-n quotient, with a group lift realizing each lattice row.
#[derive(Clone)]
pub struct LadderLayer {
    pub weight: usize,
    /// HNF rows in Z^{witt_rank(t, weight)}
    pub lattice: IntMatrix,
    /// lift i is group-like, has minimal degree >= weight, and its
    /// weight-layer coordinates equal lattice row i
    pub lifts: Vec<TruncatedSeries>,
}

/// Per-weight lattices (with lifts) of `rho_n(S)` for n = 1..k.
#[derive(Clone)]
pub struct RhoLadder {
    layers: Vec<LadderLayer>,
}

impl RhoLadder {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, n: usize) -> &LadderLayer {
        assert!(n >= 1 && n <= self.layers.len(), "ladder weight {n} out of range");
        &self.layers[n - 1]
    }
}

/// Build the ladder in a fresh context of class `k`.
pub fn rho_ladder(f: &CyclicFactors, k: usize) -> Result<RhoLadder, Error> {
    if k < 2 {
        return Err(Error::DepthTooSmall { k, min: 2, c: 1 });
    }
    let ctx = NilContext::new(f.t(), k)?;
    Ok(rho_ladder_in(f, &ctx))
}

/// The recursion `L_{n+1} = HNF of the degree-(n+1) coordinates of
/// [lift, x_j] over all lattice-basis lifts and generators`; modulo the
/// next weight the commutator pairing is bilinear, so basis lifts and
/// generators suffice.
pub(crate) fn rho_ladder_in(f: &CyclicFactors, ctx: &NilContext) -> RhoLadder {
    let t = f.t();
    let k = ctx.k();
    let gens: Vec<TruncatedSeries> = (1..=t).map(|i| ctx.generator(i).unwrap()).collect();
    let mut layers: Vec<LadderLayer> = Vec::with_capacity(k);
    // L_1 = <r_1 e_1, ..., r_t e_t> with lifts x_i^{r_i}
    let base_rows: Vec<Vec<BigInt>> = (0..t)
        .map(|i| {
            let mut row = vec![BigInt::zero(); t];
            row[i] = BigInt::from(f.orders[i]);
            row
        })
        .collect();
    layers.push(LadderLayer {
        weight: 1,
        lattice: IntMatrix::from_rows(base_rows, t).hnf(),
        lifts: f.relators(ctx),
    });
    for n in 1..k {
        let prev = layers.last().unwrap();
        let width = ctx.layer_rank(n + 1);
        let mut gen_comms: Vec<TruncatedSeries> = Vec::new();
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for lift in &prev.lifts {
            for g in &gens {
                let c = lift.commutator(g);
                rows.push(layer_block(ctx, &c, n + 1, width));
                gen_comms.push(c);
            }
        }
        let (hnf, transform) = IntMatrix::from_rows(rows, width).hnf_with_transform();
        let mut lifts = Vec::with_capacity(hnf.rows());
        for i in 0..hnf.rows() {
            let mut lift = ctx.series_context().one();
            for (j, c) in gen_comms.iter().enumerate() {
                let e = &transform[(i, j)];
                if !e.is_zero() {
                    lift = lift.mul(&c.power_big(e));
                }
            }
            debug_assert!(lift.min_positive_degree().map_or(true, |m| m >= n + 1));
            lifts.push(lift);
        }
        layers.push(LadderLayer { weight: n + 1, lattice: hnf, lifts });
    }
    RhoLadder { layers }
}

/// Weight-n coordinates of an element with minimal degree >= n.
fn layer_block(ctx: &NilContext, a: &TruncatedSeries, n: usize, width: usize) -> Vec<BigInt> {
    let slice = a.homogeneous_part(n);
    if slice.is_empty() {
        return vec![BigInt::zero(); width];
    }
    ctx.hall()
        .lie_coordinates(&slice, n)
        .expect("slice at the minimal degree of a group element is a Lie element")
}

/// Purely group-theoretic realization of `rho_n(S)`: iterated normal
/// closures of row-generator commutators. Serves as the independent
/// cross-check of [`rho_ladder`].
pub fn rho_subgroup(f: &CyclicFactors, n: usize, ctx: &NilContext) -> Echelon {
    assert!(n >= 1, "rho level starts at 1");
    let t = f.t();
    let gens: Vec<TruncatedSeries> = (1..=t).map(|i| ctx.generator(i).unwrap()).collect();
    let mut current = Echelon::normal_closure(ctx, &f.relators(ctx));
    for _ in 1..n {
        let mut next_gens: Vec<TruncatedSeries> = Vec::new();
        for lead in current.leads().collect::<Vec<_>>() {
            let row = current.row_series(lead).unwrap();
            for g in &gens {
                let c = row.commutator(g);
                if !c.is_one() {
                    next_gens.push(c);
                }
            }
        }
        current = Echelon::normal_closure(ctx, &next_gens);
    }
    current
}

/// Shared per-(orders, depth) state: the normal closure of the relators,
/// the rho ladder, and the nested bracket generating sets
/// `B_1 = {x_i^{r_i}}`, `B_{j+1} = {[b, x_i]}` whose normal closures are
/// the rho subgroups.
struct Engine {
    f: CyclicFactors,
    ctx: NilContext,
    s_echelon: Echelon,
    ladder: RhoLadder,
    brackets: Vec<Vec<TruncatedSeries>>,
}

impl Engine {
    fn new(f: &CyclicFactors, k: usize) -> Result<Engine, Error> {
        let ctx = NilContext::new(f.t(), k)?;
        Ok(Engine::in_context(f, &ctx))
    }

    fn in_context(f: &CyclicFactors, ctx: &NilContext) -> Engine {
        let k = ctx.k();
        let gens: Vec<TruncatedSeries> =
            (1..=f.t()).map(|i| ctx.generator(i).unwrap()).collect();
        let relators = f.relators(ctx);
        let s_echelon = Echelon::normal_closure(ctx, &relators);
        let ladder = rho_ladder_in(f, ctx);
        let mut brackets: Vec<Vec<TruncatedSeries>> = vec![relators];
        for _ in 1..k {
            let prev = brackets.last().unwrap();
            let mut next = Vec::new();
            for b in prev {
                for g in &gens {
                    let c = b.commutator(g);
                    if !c.is_one() {
                        next.push(c);
                    }
                }
            }
            brackets.push(next);
        }
        Engine { f: f.clone(), ctx: ctx.clone(), s_echelon, ladder, brackets }
    }

    /// The truncated multiplier report for one class c.
    fn multiplier(&self, c: usize) -> Result<MultiplierReport, Error> {
        let k = self.ctx.k();
        if c < 1 {
            return Err(Error::InvalidOrders("class c must be >= 1".into()));
        }
        if k < c + 1 {
            return Err(Error::DepthTooSmall { k, min: c + 1, c });
        }
        let numerator = self.s_echelon.layer_lattice(c + 1);
        let denominator = self.ladder.layer(c + 1).lattice.clone();
        if !numerator.contains_lattice(&denominator) {
            // rho_{c+1}(S) <= S ∩ gamma_{c+1}(F) always; reaching this
            // means the engine itself is inconsistent
            return Err(Error::ContainmentViolation);
        }
        let layer_quotient = lattice_quotient(&numerator, &denominator)?;
        let quotient = self.full_quotient(c)?;
        let ladder = (c + 1..=k)
            .map(|n| {
                let s_layer = self.s_echelon.layer_lattice(n);
                let rho_layer = self.ladder.layer(n).lattice.clone();
                let equal = s_layer == rho_layer;
                LayerComparison { weight: n, s_layer, rho_layer, equal }
            })
            .collect();
        Ok(MultiplierReport {
            orders: self.f.orders.clone(),
            class_c: c,
            depth_k: k,
            numerator_hnf: numerator,
            denominator_hnf: denominator,
            quotient,
            layer_quotient,
            ladder,
            truncation_note: truncation_note(c, k),
        })
    }

    /// `(S ∩ gamma_{c+1}) / rho_{c+1}` inside the truncated group, as an
    /// abelian group: generators are the echelon rows of lead weight
    /// >= c+1; relations are the sift exponents of their pairwise
    /// commutators together with those of the bracket sets B_{c+1}..B_k,
    /// whose images generate the image of rho_{c+1}.
    fn full_quotient(&self, c: usize) -> Result<FgAbelianGroup, Error> {
        let k = self.ctx.k();
        let sub_leads: Vec<usize> = self
            .s_echelon
            .leads()
            .filter(|&l| self.ctx.weight_of(l) >= c + 1)
            .collect();
        let p = sub_leads.len();
        let position = |lead: usize| -> usize {
            sub_leads.binary_search(&lead).expect("sift factor outside the numerator subgroup")
        };
        let mut relations: Vec<Vec<BigInt>> = Vec::new();
        let mut add_relation = |elem: &TruncatedSeries| -> Result<(), Error> {
            if elem.is_one() {
                return Ok(());
            }
            let sift = self.s_echelon.sift(elem);
            if !sift.is_member() {
                return Err(Error::Internal(
                    "relation element failed to sift into the relator closure".into(),
                ));
            }
            let mut row = vec![BigInt::zero(); p];
            for (lead, e) in sift.factors {
                if !e.is_zero() {
                    row[position(lead)] += e;
                }
            }
            relations.push(row);
            Ok(())
        };
        // commutator relations among the generators
        for (a, &la) in sub_leads.iter().enumerate() {
            let wa = self.ctx.weight_of(la);
            for &lb in &sub_leads[a + 1..] {
                if wa + self.ctx.weight_of(lb) > k {
                    break;
                }
                let ra = self.s_echelon.row_series(la).unwrap();
                let rb = self.s_echelon.row_series(lb).unwrap();
                add_relation(&ra.commutator(rb))?;
            }
        }
        // image of rho_{c+1}: bracket sets of levels c+1..k
        for level in (c + 1)..=k {
            for b in &self.brackets[level - 1] {
                add_relation(b)?;
            }
        }
        let rel = IntMatrix::from_rows(relations, p).hnf();
        Ok(FgAbelianGroup::from_presentation(p, &rel))
    }
}

/// One per-weight comparison between the image of `S ∩ gamma_n` and the
/// image of `rho_n(S)` in the weight-n quotient.
#[derive(Clone)]
pub struct LayerComparison {
    pub weight: usize,
    pub s_layer: IntMatrix,
    pub rho_layer: IntMatrix,
    pub equal: bool,
}

/// Everything `truncated_multiplier` computed for one (orders, c, k).
#[derive(Clone)]
pub struct MultiplierReport {
    pub orders: Vec<u64>,
    pub class_c: usize,
    pub depth_k: usize,
    /// weight-(c+1) layer of the relator normal closure, HNF
    pub numerator_hnf: IntMatrix,
    /// weight-(c+1) lattice of the rho ladder, HNF
    pub denominator_hnf: IntMatrix,
    /// the truncated multiplier: the exact one modulo the image of
    /// elements beyond the truncation class
    pub quotient: FgAbelianGroup,
    /// quotient of the two weight-(c+1) lattices alone; equals `quotient`
    /// at the minimal depth k = c+1
    pub layer_quotient: FgAbelianGroup,
    /// per-weight comparisons for weights c+1..k
    pub ladder: Vec<LayerComparison>,
    pub truncation_note: String,
}

impl MultiplierReport {
    pub fn is_trivial(&self) -> bool {
        self.quotient.is_trivial()
    }
}

impl fmt::Debug for MultiplierReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MultiplierReport(orders {:?}, c={}, k={}, quotient {})",
            self.orders, self.class_c, self.depth_k, self.quotient
        )
    }
}

fn truncation_note(c: usize, k: usize) -> String {
    format!(
        "computed in the free nilpotent quotient of class {k}: the reported group is the \
         {c}-nilpotent multiplier modulo the image of relator-subgroup elements of weight \
         above {k}; the exact multiplier surjects onto it"
    )
}

/// Truncated c-nilpotent multiplier of the free product of the given
/// cyclic factors, computed at depth k >= c+1.
pub fn truncated_multiplier(
    f: &CyclicFactors,
    c: usize,
    k: usize,
) -> Result<MultiplierReport, Error> {
    if c < 1 {
        return Err(Error::InvalidOrders("class c must be >= 1".into()));
    }
    if k < c + 1 {
        return Err(Error::DepthTooSmall { k, min: c + 1, c });
    }
    Engine::new(f, k)?.multiplier(c)
}

/// Abelianization, Schur multiplier and 2-nilpotent multiplier of one
/// free factor, as canonical abelian groups.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupData {
    pub ab: FgAbelianGroup,
    pub m1: FgAbelianGroup,
    pub m2: FgAbelianGroup,
}

impl GroupData {
    pub fn trivial() -> GroupData {
        GroupData {
            ab: FgAbelianGroup::trivial(),
            m1: FgAbelianGroup::trivial(),
            m2: FgAbelianGroup::trivial(),
        }
    }

    /// Data of a cyclic group; both multipliers vanish. Order 0 gives the
    /// infinite cyclic group.
    pub fn cyclic(order: u64) -> GroupData {
        GroupData {
            ab: FgAbelianGroup::cyclic(order),
            m1: FgAbelianGroup::trivial(),
            m2: FgAbelianGroup::trivial(),
        }
    }
}

/// Schur multiplier of a free product: the direct sum of the factors'
/// multipliers.
pub fn schur_free_product(ms: &[FgAbelianGroup]) -> FgAbelianGroup {
    ms.iter().fold(FgAbelianGroup::trivial(), |acc, m| acc.direct_sum(m))
}

/// The five summands of the Burns–Ellis decomposition of `M^(2)(G * H)`:
/// `M2(G), M2(H), M(G) ⊗ H_ab, M(H) ⊗ G_ab, Tor(G_ab, H_ab)`.
pub fn burns_ellis_summands(g: &GroupData, h: &GroupData) -> [FgAbelianGroup; 5] {
    [
        g.m2.clone(),
        h.m2.clone(),
        g.m1.tensor(&h.ab),
        h.m1.tensor(&g.ab),
        g.ab.tor(&h.ab),
    ]
}

/// 2-nilpotent multiplier of a free product from the factors' data.
pub fn burns_ellis_m2(g: &GroupData, h: &GroupData) -> FgAbelianGroup {
    schur_free_product(&burns_ellis_summands(g, h))
}

/// Fold the Burns–Ellis formula over the cyclic factors left to right,
/// carrying the accumulated abelianization (direct sum) and Schur
/// multiplier (trivial throughout, since cyclic multipliers vanish).
pub fn m2_free_product_cyclics(f: &CyclicFactors) -> FgAbelianGroup {
    let mut acc = GroupData::cyclic(f.orders[0]);
    for &r in &f.orders[1..] {
        let next = GroupData::cyclic(r);
        let m2 = burns_ellis_m2(&acc, &next);
        acc = GroupData {
            ab: acc.ab.direct_sum(&next.ab),
            m1: acc.m1.direct_sum(&next.m1),
            m2,
        };
    }
    acc.m2
}

/// Outcome of one verification cell.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CellOutcome {
    Pass,
    Fail(String),
    Rejected(String),
}

#[derive(Clone, Debug)]
pub struct VerifyCell {
    pub label: String,
    pub outcome: CellOutcome,
}

impl VerifyCell {
    pub fn passed(&self) -> bool {
        self.outcome == CellOutcome::Pass
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub cells: Vec<VerifyCell>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.passed())
    }

    pub fn push(&mut self, label: String, outcome: CellOutcome) {
        self.cells.push(VerifyCell { label, outcome });
    }
}

/// Check `layer_lattice(normal_closure, n) = L_n` for n = 2, 3: the
/// weight-graded shadow of `S ∩ gamma_n(F) = rho_n(S)` at the first two
/// interesting weights.
pub fn verify_corollary_2_2(f: &CyclicFactors, k: usize) -> Result<VerifyReport, Error> {
    if k < 3 {
        return Err(Error::DepthTooSmall { k, min: 3, c: 2 });
    }
    let ctx = NilContext::new(f.t(), k)?;
    let closure = Echelon::normal_closure(&ctx, &f.relators(&ctx));
    let ladder = rho_ladder_in(f, &ctx);
    let mut report = VerifyReport::default();
    for n in [2usize, 3] {
        let s_layer = closure.layer_lattice(n);
        let rho_layer = ladder.layer(n).lattice.clone();
        let label = format!("orders {f}, weight {n}: S-layer = rho-layer");
        if s_layer == rho_layer {
            report.push(label, CellOutcome::Pass);
        } else {
            report.push(
                label,
                CellOutcome::Fail(format!("S-layer {s_layer} != rho-layer {rho_layer}")),
            );
        }
    }
    Ok(report)
}

/// Check `layer_lattice(rho_subgroup(f, n), n+1) = L_{n+1}`: the
/// weight-graded shadow of `rho_n(S) ∩ gamma_{n+1}(F) = rho_{n+1}(S)`.
pub fn verify_lemma_2_3(f: &CyclicFactors, n: usize, k: usize) -> Result<VerifyReport, Error> {
    if n < 1 {
        return Err(Error::InvalidOrders("rho level must be >= 1".into()));
    }
    if k < n + 1 {
        return Err(Error::DepthTooSmall { k, min: n + 1, c: n });
    }
    let ctx = NilContext::new(f.t(), k)?;
    let rho_n = rho_subgroup(f, n, &ctx);
    let ladder = rho_ladder_in(f, &ctx);
    let s_layer = rho_n.layer_lattice(n + 1);
    let rho_layer = ladder.layer(n + 1).lattice.clone();
    let mut report = VerifyReport::default();
    let label = format!("orders {f}, rho_{n} ∩ weight-{} layer = rho_{}", n + 1, n + 1);
    if s_layer == rho_layer {
        report.push(label, CellOutcome::Pass);
    } else {
        report.push(
            label,
            CellOutcome::Fail(format!("subgroup layer {s_layer} != ladder layer {rho_layer}")),
        );
    }
    Ok(report)
}

/// Check that the truncated multiplier is trivial for every class
/// c <= c_max at every depth c+1..k_max. Requires mutually coprime
/// orders; other inputs are rejected with an explanatory error.
pub fn verify_theorem_2_5(
    f: &CyclicFactors,
    c_max: usize,
    k_max: usize,
) -> Result<VerifyReport, Error> {
    if let Some((a, b)) = f.non_coprime_pair() {
        return Err(Error::NotCoprime { a, b });
    }
    if c_max < 1 || k_max < c_max + 1 {
        return Err(Error::DepthTooSmall { k: k_max, min: c_max + 1, c: c_max });
    }
    let mut report = VerifyReport::default();
    for k in 2..=k_max {
        let engine = Engine::new(f, k)?;
        for c in 1..=c_max.min(k - 1) {
            let r = engine.multiplier(c)?;
            let label = format!("orders {f}, class {c}, depth {k}: multiplier trivial");
            if r.is_trivial() {
                report.push(label, CellOutcome::Pass);
            } else {
                report.push(label, CellOutcome::Fail(format!("quotient {}", r.quotient)));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(orders: &[u64]) -> CyclicFactors {
        CyclicFactors::new(orders.to_vec()).unwrap()
    }

    #[test]
    fn cyclic_factor_validation() {
        assert!(CyclicFactors::new(vec![]).is_err());
        assert!(CyclicFactors::new(vec![2, 0]).is_err());
        assert!(factors(&[2, 3]).pairwise_coprime());
        assert!(!factors(&[2, 9, 4]).pairwise_coprime());
        assert_eq!(factors(&[2, 9, 4]).non_coprime_pair(), Some((2, 4)));
        assert!(factors(&[1, 5]).pairwise_coprime());
    }

    #[test]
    fn abelianization_examples() {
        assert_eq!(abelianization(&factors(&[2, 3])), FgAbelianGroup::cyclic(6));
        let g = abelianization(&factors(&[2, 2]));
        assert_eq!(g.invariant_factors(), &[BigInt::from(2), BigInt::from(2)]);
        assert_eq!(abelianization(&factors(&[1, 5])), FgAbelianGroup::cyclic(5));
    }

    #[test]
    fn rho_ladder_examples() {
        let ctx = NilContext::new(2, 3).unwrap();
        // coprime orders: commutator layer fills up
        let ladder = rho_ladder_in(&factors(&[2, 3]), &ctx);
        assert_eq!(ladder.layer(1).lattice, IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(ladder.layer(2).lattice, IntMatrix::from_i64(&[&[1]]));
        // equal orders leave index 2
        let ladder = rho_ladder_in(&factors(&[2, 2]), &ctx);
        assert_eq!(ladder.layer(2).lattice, IntMatrix::from_i64(&[&[2]]));
        // lifts realize their lattice rows
        for n in 1..=3 {
            let layer = ladder.layer(n);
            for (i, lift) in layer.lifts.iter().enumerate() {
                assert!(lift.min_positive_degree().map_or(true, |m| m >= n));
                let block = layer_block(&ctx, lift, n, ctx.layer_rank(n));
                assert_eq!(&block[..], layer.lattice.row(i), "weight {n} lift {i}");
            }
        }
        // single factor: everything above weight 1 is trivial
        let ctx1 = NilContext::new(1, 4).unwrap();
        let ladder = rho_ladder_in(&factors(&[7]), &ctx1);
        for n in 2..=4 {
            assert_eq!(ladder.layer(n).lattice.rows(), 0);
        }
    }

    #[test]
    fn rho_subgroup_matches_ladder_on_small_cases() {
        let ctx = NilContext::new(2, 3).unwrap();
        for orders in [[2u64, 3], [2, 2]] {
            let f = factors(&orders);
            let ladder = rho_ladder_in(&f, &ctx);
            let h2 = rho_subgroup(&f, 2, &ctx);
            assert_eq!(h2.layer_lattice(2), ladder.layer(2).lattice, "orders {orders:?}");
            let h3 = rho_subgroup(&f, 3, &ctx);
            assert_eq!(h3.layer_lattice(3), ladder.layer(3).lattice, "orders {orders:?}");
        }
    }

    #[test]
    fn schur_free_product_examples() {
        let t = FgAbelianGroup::trivial();
        assert_eq!(schur_free_product(&[t.clone(), t.clone()]), t);
        assert_eq!(
            schur_free_product(&[FgAbelianGroup::cyclic(2), FgAbelianGroup::cyclic(3)]),
            FgAbelianGroup::cyclic(6)
        );
        let single = FgAbelianGroup::cyclic(4);
        assert_eq!(schur_free_product(&[single.clone()]), single);
    }

    #[test]
    fn burns_ellis_examples() {
        let z2 = GroupData::cyclic(2);
        let z3 = GroupData::cyclic(3);
        // the infinite dihedral case: only the Tor term survives
        assert_eq!(burns_ellis_m2(&z2, &z2), FgAbelianGroup::cyclic(2));
        assert_eq!(
            schur_free_product(&[z2.m2.clone(), z2.m2.clone()]),
            FgAbelianGroup::trivial()
        );
        // coprime: trivial
        assert_eq!(burns_ellis_m2(&z2, &z3), FgAbelianGroup::trivial());
        // trivial partner: the other factor's m2 survives
        let g = GroupData {
            ab: FgAbelianGroup::cyclic(4),
            m1: FgAbelianGroup::cyclic(2),
            m2: FgAbelianGroup::cyclic(8),
        };
        assert_eq!(burns_ellis_m2(&g, &GroupData::trivial()), g.m2);
    }

    #[test]
    fn m2_free_product_cyclics_examples() {
        assert!(m2_free_product_cyclics(&factors(&[2, 3, 5])).is_trivial());
        assert_eq!(m2_free_product_cyclics(&factors(&[2, 2])), FgAbelianGroup::cyclic(2));
        let m = m2_free_product_cyclics(&factors(&[2, 2, 2]));
        assert_eq!(
            m.invariant_factors(),
            &[BigInt::from(2), BigInt::from(2), BigInt::from(2)]
        );
        assert_eq!(m.free_rank(), 0);
    }

    #[test]
    fn truncated_multiplier_coprime_cells_are_trivial() {
        let f = factors(&[2, 3]);
        let r = truncated_multiplier(&f, 1, 3).unwrap();
        assert!(r.is_trivial());
        assert!(r.layer_quotient.is_trivial());
        assert!(r.ladder.iter().all(|l| l.equal));
        let r = truncated_multiplier(&f, 2, 4).unwrap();
        assert!(r.is_trivial());
    }

    #[test]
    fn truncated_multiplier_validates_input() {
        let f = factors(&[2, 2]);
        let err = truncated_multiplier(&f, 2, 2).unwrap_err();
        assert_eq!(err, Error::DepthTooSmall { k: 2, min: 3, c: 2 });
        assert!(truncated_multiplier(&f, 0, 3).is_err());
    }

    #[test]
    fn full_quotient_equals_layer_quotient_at_minimal_depth() {
        for orders in [[2u64, 2], [2, 4], [3, 3]] {
            let f = factors(&orders);
            let r = truncated_multiplier(&f, 2, 3).unwrap();
            assert_eq!(r.quotient, r.layer_quotient, "orders {orders:?}");
        }
    }

    #[test]
    fn verify_corollary_2_2_passes_for_coprime() {
        let report = verify_corollary_2_2(&factors(&[2, 3]), 4).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.cells.len(), 2);
    }

    #[test]
    fn verify_lemma_2_3_passes_for_coprime() {
        let report = verify_lemma_2_3(&factors(&[2, 3]), 2, 4).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn verify_theorem_2_5_rejects_non_coprime() {
        let err = verify_theorem_2_5(&factors(&[2, 2]), 2, 4).unwrap_err();
        assert_eq!(err, Error::NotCoprime { a: 2, b: 2 });
    }
}
