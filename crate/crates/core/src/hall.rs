//! Basic commutators and coordinates on lower-central quotients.
//!
//! For a free group on `t` ordered generators, the weight-n basic
//! commutators (Hall condition: in `[u, v]` both parts are basic, `u > v`,
//! and if `u = [p, q]` then `q <= v`) form a basis of the free abelian
//! group `gamma_n(F) / gamma_{n+1}(F)`. The layer rank is the Witt number
//! `(1/n) sum_{d|n} mu(d) t^{n/d}`.
//!
//! `lie_expand` sends a bracket tree to its homogeneous Lie polynomial
//! (`[u,v] -> uv - vu`), chosen so it matches the leading slice of the
//! group-commutator realization; `lie_coordinates` inverts this on integer
//! combinations, detecting non-integrality exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::intlinalg::IntMatrix;
use crate::magnus::Monomial;

/// Rank of the weight-n layer: `(1/n) sum_{d|n} mu(d) t^{n/d}`.
pub fn witt_rank(t: u64, n: u64) -> BigInt {
    assert!(t >= 1 && n >= 1);
    fn mobius(mut m: u64) -> i64 {
        let mut primes = 0;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                m /= p;
                if m % p == 0 {
                    return 0;
                }
                primes += 1;
            }
            p += 1;
        }
        if m > 1 {
            primes += 1;
        }
        if primes % 2 == 0 {
            1
        } else {
            -1
        }
    }
    let mut acc = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 {
            acc += mobius(d) * BigInt::from(t).pow((n / d) as u32);
        }
    }
    &acc / BigInt::from(n)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Node {
    Gen(u16),
    /// Children are global basis indices, left > right.
    Pair(u32, u32),
}

struct LayerData {
    range: Range<usize>,
    solver: OnceLock<LayerSolver>,
}

/// All basic commutators on `t` generators up to a weight bound, in
/// canonical order: by weight, then by (left index, right index).
pub struct HallBasis {
    t: usize,
    max_weight: usize,
    nodes: Vec<Node>,
    weights: Vec<usize>,
    layers: Vec<LayerData>,
}

impl HallBasis {
    pub fn new(t: usize, max_weight: usize) -> Self {
        assert!(t >= 1 && max_weight >= 1);
        let mut nodes: Vec<Node> = Vec::new();
        let mut weights: Vec<usize> = Vec::new();
        let mut layers: Vec<LayerData> = Vec::new();
        for i in 0..t {
            nodes.push(Node::Gen(i as u16 + 1));
            weights.push(1);
        }
        layers.push(LayerData { range: 0..t, solver: OnceLock::new() });
        for n in 2..=max_weight {
            let start = nodes.len();
            let mut candidates: Vec<(u32, u32)> = Vec::new();
            for wu in 1..n {
                let wv = n - wu;
                for u in layers[wu - 1].range.clone() {
                    for v in layers[wv - 1].range.clone() {
                        if u <= v {
                            continue;
                        }
                        if let Node::Pair(_, q) = nodes[u] {
                            if q as usize > v {
                                continue;
                            }
                        }
                        candidates.push((u as u32, v as u32));
                    }
                }
            }
            candidates.sort();
            for (u, v) in candidates {
                nodes.push(Node::Pair(u, v));
                weights.push(n);
            }
            layers.push(LayerData { range: start..nodes.len(), solver: OnceLock::new() });
        }
        HallBasis { t, max_weight, nodes, weights, layers }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    /// Total number of basic commutators of weight <= max_weight.
    pub fn total_rank(&self) -> usize {
        self.nodes.len()
    }

    pub fn rank(&self, n: usize) -> usize {
        self.layer_range(n).len()
    }

    pub fn layer_range(&self, n: usize) -> Range<usize> {
        assert!(n >= 1 && n <= self.max_weight, "weight {n} out of range");
        self.layers[n - 1].range.clone()
    }

    pub fn layer(&self, n: usize) -> WeightLayer<'_> {
        WeightLayer { basis: self, n, range: self.layer_range(n) }
    }

    pub fn weight_of(&self, index: usize) -> usize {
        self.weights[index]
    }

    pub fn commutator(&self, index: usize) -> BasicCommutator<'_> {
        assert!(index < self.nodes.len());
        BasicCommutator { basis: self, index }
    }

    fn letter(&self, l: u16) -> String {
        if self.t <= 3 {
            ["x", "y", "z"][(l - 1) as usize].to_string()
        } else {
            format!("x{l}")
        }
    }

    /// Homogeneous Lie polynomial of a basis element, as a monomial map.
    fn expand(&self, index: usize) -> BTreeMap<Monomial, BigInt> {
        match self.nodes[index] {
            Node::Gen(l) => [(Monomial::new(&[l]), BigInt::one())].into_iter().collect(),
            Node::Pair(u, v) => {
                let a = self.expand(u as usize);
                let b = self.expand(v as usize);
                let mut out: BTreeMap<Monomial, BigInt> = BTreeMap::new();
                for (ma, ca) in &a {
                    for (mb, cb) in &b {
                        *out.entry(ma.concat(mb)).or_insert_with(BigInt::zero) += ca * cb;
                        *out.entry(mb.concat(ma)).or_insert_with(BigInt::zero) -= ca * cb;
                    }
                }
                out.retain(|_, c| !c.is_zero());
                out
            }
        }
    }

    /// Unique integer coordinates of a homogeneous degree-n slice over the
    /// weight-n basic commutators.
    pub fn lie_coordinates(
        &self,
        slice: &BTreeMap<Monomial, BigInt>,
        n: usize,
    ) -> Result<Vec<BigInt>, Error> {
        assert!(n >= 1 && n <= self.max_weight, "weight {n} out of range");
        for m in slice.keys() {
            if m.degree() != n {
                return Err(Error::DegreeMismatch { expected: n, found: m.degree() });
            }
        }
        let solver = self.layers[n - 1]
            .solver
            .get_or_init(|| LayerSolver::build(self, n));
        solver.solve(slice, n)
    }
}

impl fmt::Debug for HallBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HallBasis(t={}, max_weight={}, rank={})", self.t, self.max_weight, self.nodes.len())
    }
}

/// The ordered weight-n slice of a Hall basis.
pub struct WeightLayer<'a> {
    basis: &'a HallBasis,
    n: usize,
    range: Range<usize>,
}

impl<'a> WeightLayer<'a> {
    pub fn weight(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.range.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = BasicCommutator<'a>> + '_ {
        let basis = self.basis;
        self.range.clone().map(move |i| BasicCommutator { basis, index: i })
    }
}

/// Handle onto one basic commutator of a [`HallBasis`].
#[derive(Clone, Copy)]
pub struct BasicCommutator<'a> {
    basis: &'a HallBasis,
    index: usize,
}

impl<'a> BasicCommutator<'a> {
    /// Position in the global basis order.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn weight(&self) -> usize {
        self.basis.weights[self.index]
    }

    /// Generator index when the commutator is a single letter.
    pub fn generator(&self) -> Option<u16> {
        match self.basis.nodes[self.index] {
            Node::Gen(l) => Some(l),
            Node::Pair(..) => None,
        }
    }

    /// The two children `(u, v)` of `[u, v]`, if not a generator.
    pub fn parts(&self) -> Option<(BasicCommutator<'a>, BasicCommutator<'a>)> {
        match self.basis.nodes[self.index] {
            Node::Gen(_) => None,
            Node::Pair(u, v) => Some((
                BasicCommutator { basis: self.basis, index: u as usize },
                BasicCommutator { basis: self.basis, index: v as usize },
            )),
        }
    }

    /// `[u, v] -> uv - vu` on homogeneous monomial maps; leaves map to
    /// single letters. Matches `homogeneous_part` of the group realization
    /// at the commutator's weight.
    pub fn lie_expand(&self) -> BTreeMap<Monomial, BigInt> {
        self.basis.expand(self.index)
    }

    fn items(&self) -> Vec<String> {
        match self.basis.nodes[self.index] {
            Node::Gen(l) => vec![self.basis.letter(l)],
            Node::Pair(u, v) => {
                let left = BasicCommutator { basis: self.basis, index: u as usize };
                let right = BasicCommutator { basis: self.basis, index: v as usize };
                match self.basis.nodes[v as usize] {
                    Node::Gen(l) => {
                        let mut items = match self.basis.nodes[u as usize] {
                            Node::Gen(_) => vec![left.to_string()],
                            Node::Pair(..) => left.items(),
                        };
                        items.push(self.basis.letter(l));
                        items
                    }
                    Node::Pair(..) => vec![left.to_string(), right.to_string()],
                }
            }
        }
    }
}

impl fmt::Display for BasicCommutator<'_> {
    /// Left-normed flattened rendering: `[y,x,x]` for `[[y,x],x]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.basis.nodes[self.index] {
            Node::Gen(l) => write!(f, "{}", self.basis.letter(l)),
            Node::Pair(..) => write!(f, "[{}]", self.items().join(",")),
        }
    }
}

impl fmt::Debug for BasicCommutator<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasicCommutator({self}, weight {})", self.weight())
    }
}

/// Precomputed integer solver for one weight layer: a row HNF of the
/// expansion matrix plus the transform back to basis coordinates.
struct LayerSolver {
    /// column index of each degree-n monomial = its lex rank
    hnf: IntMatrix,
    transform: IntMatrix,
    t: u64,
}

impl LayerSolver {
    fn build(basis: &HallBasis, n: usize) -> LayerSolver {
        let t = basis.t as u64;
        let cols = (t as u128).pow(n as u32) as usize;
        let range = basis.layer_range(n);
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(range.len());
        for i in range {
            let mut row = vec![BigInt::zero(); cols];
            for (m, c) in basis.expand(i) {
                row[lex_rank(&m, t)] = c;
            }
            rows.push(row);
        }
        let matrix = IntMatrix::from_rows(rows, cols);
        let (hnf, transform) = matrix.hnf_with_transform();
        LayerSolver { hnf, transform, t }
    }

    fn solve(&self, slice: &BTreeMap<Monomial, BigInt>, n: usize) -> Result<Vec<BigInt>, Error> {
        let cols = self.hnf.cols();
        let mut target = vec![BigInt::zero(); cols];
        for (m, c) in slice {
            target[lex_rank(m, self.t)] = c.clone();
        }
        let x = self
            .hnf
            .solve_hnf(&target)
            .ok_or(Error::NotInLieLattice { weight: n })?;
        // coordinates over the original basis rows: x * transform
        let rank = self.transform.cols();
        let mut out = vec![BigInt::zero(); rank];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += xi * &self.transform[(i, j)];
            }
        }
        Ok(out)
    }
}

fn lex_rank(m: &Monomial, t: u64) -> usize {
    let mut v: u64 = 0;
    for &l in m.letters() {
        v = v * t + (l as u64 - 1);
    }
    v as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnus::TruncationContext;

    #[test]
    fn witt_rank_examples() {
        assert_eq!(witt_rank(2, 3), BigInt::from(2));
        for t in 1..=5u64 {
            assert_eq!(witt_rank(t, 1), BigInt::from(t));
        }
        assert_eq!(witt_rank(2, 4), BigInt::from(3));
        assert_eq!(witt_rank(3, 2), BigInt::from(3));
        assert_eq!(witt_rank(2, 2), BigInt::from(1));
        assert_eq!(witt_rank(1, 2), BigInt::from(0));
    }

    #[test]
    fn basis_low_weights_match_the_classical_tables() {
        let basis = HallBasis::new(2, 4);
        let render =
            |n: usize| basis.layer(n).iter().map(|c| c.to_string()).collect::<Vec<_>>();
        assert_eq!(render(1), vec!["x", "y"]);
        assert_eq!(render(2), vec!["[y,x]"]);
        assert_eq!(render(3), vec!["[y,x,x]", "[y,x,y]"]);
        assert_eq!(render(4), vec!["[y,x,x,x]", "[y,x,x,y]", "[y,x,y,y]"]);
    }

    #[test]
    fn basis_cardinality_matches_witt() {
        for t in 1..=3usize {
            let basis = HallBasis::new(t, 6);
            for n in 1..=6usize {
                assert_eq!(
                    BigInt::from(basis.rank(n)),
                    witt_rank(t as u64, n as u64),
                    "t={t} n={n}"
                );
            }
        }
    }

    #[test]
    fn weight_five_contains_a_non_left_normed_element() {
        let basis = HallBasis::new(2, 5);
        let rendered: Vec<String> = basis.layer(5).iter().map(|c| c.to_string()).collect();
        assert_eq!(rendered.len(), 6);
        assert!(rendered.contains(&"[[y,x,x],[y,x]]".to_string()));
    }

    #[test]
    fn lie_expand_examples() {
        let basis = HallBasis::new(2, 3);
        let x = basis.commutator(0);
        assert_eq!(
            x.lie_expand(),
            [(Monomial::new(&[1]), BigInt::from(1))].into_iter().collect()
        );
        let yx = basis.commutator(2);
        assert_eq!(yx.to_string(), "[y,x]");
        let expected: BTreeMap<Monomial, BigInt> = [
            (Monomial::new(&[2, 1]), BigInt::from(1)),
            (Monomial::new(&[1, 2]), BigInt::from(-1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(yx.lie_expand(), expected);
    }

    #[test]
    fn lie_expand_matches_group_realization() {
        // [y,x,x] as a bracket tree vs the degree-3 slice of [[y,x],x]
        let basis = HallBasis::new(2, 3);
        let ctx = TruncationContext::new(2, 3).unwrap();
        let x = ctx.generator(1).unwrap();
        let y = ctx.generator(2).unwrap();
        let group = y.commutator(&x).commutator(&x);
        let yxx = basis.commutator(3);
        assert_eq!(yxx.to_string(), "[y,x,x]");
        assert_eq!(yxx.lie_expand(), group.homogeneous_part(3));
        let yxy = basis.commutator(4);
        let group2 = y.commutator(&x).commutator(&y);
        assert_eq!(yxy.lie_expand(), group2.homogeneous_part(3));
    }

    #[test]
    fn lie_coordinates_examples() {
        let basis = HallBasis::new(2, 3);
        // zero slice -> zero vector
        assert_eq!(
            basis.lie_coordinates(&BTreeMap::new(), 2).unwrap(),
            vec![BigInt::from(0)]
        );
        let ctx = TruncationContext::new(2, 3).unwrap();
        let x = ctx.generator(1).unwrap();
        let y = ctx.generator(2).unwrap();
        let yx = y.commutator(&x);
        assert_eq!(
            basis.lie_coordinates(&yx.homogeneous_part(2), 2).unwrap(),
            vec![BigInt::from(1)]
        );
        // paper basis claim: [y,x,x] and [y,x,y] are unit vectors at weight 3
        let yxx = y.commutator(&x).commutator(&x);
        assert_eq!(
            basis.lie_coordinates(&yxx.homogeneous_part(3), 3).unwrap(),
            vec![BigInt::from(1), BigInt::from(0)]
        );
        let yxy = y.commutator(&x).commutator(&y);
        assert_eq!(
            basis.lie_coordinates(&yxy.homogeneous_part(3), 3).unwrap(),
            vec![BigInt::from(0), BigInt::from(1)]
        );
    }

    #[test]
    fn lie_coordinates_rejects_degenerate_input() {
        let basis = HallBasis::new(2, 4);
        let ctx = TruncationContext::new(2, 4).unwrap();
        let x = ctx.generator(1).unwrap();
        let y = ctx.generator(2).unwrap();
        let yx = y.commutator(&x);
        // min degree 2, so the degree-3 slice of yx^6 * [[y,x],x] is not a
        // Lie element
        let w = yx.power(6).mul(&yx.commutator(&x));
        assert_eq!(w.min_positive_degree(), Some(2));
        let err = basis.lie_coordinates(&w.homogeneous_part(3), 3).unwrap_err();
        assert_eq!(err, Error::NotInLieLattice { weight: 3 });
        // wrong degree is rejected before solving
        let err = basis.lie_coordinates(&w.homogeneous_part(2), 3).unwrap_err();
        assert_eq!(err, Error::DegreeMismatch { expected: 3, found: 2 });
    }
}
