//! Depth-n behavioural distances.
//!
//! `d_0 = 0` and `d_{k+1}(a,b)` is the larger of the maximal atom deviation
//! and, for every role, the lifting of `d_k` to the two successor rows
//! (0 if both rows are blocking, 1 if exactly one is).

mod game;
mod locality;
mod logical;
mod strategy;

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;

use crate::lp::{lift_with_blocking, solve_kantorovich_max, solve_transport_min, Distribution, PairTable};
use crate::model::{Model, StateId, SuccessorRow};
use crate::rational::{one, Rational};

pub use game::{game_table, game_value, GameEngine};
pub use locality::{locality_check, LocalityReport};
pub use logical::{default_grid, logical_lb_table, LogicalBound};
pub use strategy::{
    extract_strategy, verify_duplicator, verify_spoiler, DuplicatorMove, DuplicatorStrategy, FailureReason,
    GameConfig, SpoilerStrategy, Strategy, StrategyError, Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Wasserstein,
    Kantorovich,
    Game,
    LogicalWitness,
    LogicalLB,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Wasserstein => "wasserstein",
            Method::Kantorovich => "kantorovich",
            Method::Game => "game",
            Method::LogicalWitness => "logical-witness",
            Method::LogicalLB => "logical-lb",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pairwise distances between the states of one model at a fixed depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    pub depth: usize,
    pub method: Method,
    values: PairTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PseudometricViolation {
    NonzeroDiagonal { state: StateId },
    Asymmetric { a: StateId, b: StateId },
    OutOfRange { a: StateId, b: StateId },
    Triangle { a: StateId, b: StateId, c: StateId },
}

impl fmt::Display for PseudometricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonzeroDiagonal { state } => write!(f, "d({state},{state}) != 0"),
            Self::Asymmetric { a, b } => write!(f, "d({a},{b}) != d({b},{a})"),
            Self::OutOfRange { a, b } => write!(f, "d({a},{b}) outside [0,1]"),
            Self::Triangle { a, b, c } => write!(f, "d({a},{c}) > d({a},{b}) + d({b},{c})"),
        }
    }
}

impl DistanceTable {
    pub fn new(depth: usize, method: Method, values: PairTable) -> Self {
        Self { depth, method, values }
    }

    pub fn zeros(n: usize, method: Method) -> Self {
        Self::new(0, method, PairTable::zeros(n))
    }

    pub fn num_states(&self) -> usize {
        self.values.size()
    }

    pub fn get(&self, a: StateId, b: StateId) -> &Rational {
        self.values.get(a, b)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (StateId, StateId)> {
        let n = self.num_states();
        (0..n).flat_map(move |a| (a..n).map(move |b| (a, b)))
    }

    pub fn as_pair_table(&self) -> &PairTable {
        &self.values
    }

    /// Same values, regardless of depth and method tag.
    pub fn same_values(&self, other: &DistanceTable) -> bool {
        self.values == other.values
    }

    /// First pair where `self > other`.
    pub fn first_exceeding(&self, other: &DistanceTable) -> Option<(StateId, StateId)> {
        let n = self.num_states();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .find(|&(a, b)| self.get(a, b) > other.get(a, b))
    }

    /// Exhaustive check of the pseudometric axioms and the `[0,1]` range.
    pub fn check_pseudometric(&self) -> Result<(), PseudometricViolation> {
        let n = self.num_states();
        for a in 0..n {
            if !self.get(a, a).is_zero() {
                return Err(PseudometricViolation::NonzeroDiagonal { state: a });
            }
            for b in 0..n {
                let v = self.get(a, b);
                if v != self.get(b, a) {
                    return Err(PseudometricViolation::Asymmetric { a, b });
                }
                if !crate::rational::in_unit_interval(v) {
                    return Err(PseudometricViolation::OutOfRange { a, b });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if *self.get(a, c) > self.get(a, b) + self.get(b, c) {
                        return Err(PseudometricViolation::Triangle { a, b, c });
                    }
                }
            }
        }
        Ok(())
    }
}

fn kantorovich_lift(ground: &PairTable, left: &SuccessorRow, right: &SuccessorRow) -> Rational {
    match (Distribution::from_row(left), Distribution::from_row(right)) {
        (None, None) => Rational::zero(),
        (None, Some(_)) | (Some(_), None) => one(),
        (Some(l), Some(r)) => {
            solve_kantorovich_max(ground, &l, &r)
                .expect("validated rows are proper distributions")
                .0
        }
    }
}

/// One step of the distance recursion with a given lifting.
fn step<L>(model: &Model, prev: &PairTable, lift: L) -> PairTable
where
    L: Fn(&PairTable, &SuccessorRow, &SuccessorRow) -> Rational,
{
    let n = model.num_states();
    let mut next = PairTable::zeros(n);
    for a in 0..n {
        for b in a..n {
            let mut v = model.atom_deviation(a, b);
            for (_, rows) in model.roles() {
                let l = lift(prev, &rows[a], &rows[b]);
                if l > v {
                    v = l;
                }
            }
            next.set_symmetric(a, b, v);
        }
    }
    next
}

fn chain<L>(model: &Model, n: usize, method: Method, lift: L) -> Vec<DistanceTable>
where
    L: Fn(&PairTable, &SuccessorRow, &SuccessorRow) -> Rational,
{
    let mut out = vec![DistanceTable::zeros(model.num_states(), method)];
    for k in 1..=n {
        let next = step(model, &out[k - 1].values, &lift);
        out.push(DistanceTable::new(k, method, next));
    }
    out
}

/// `d_0 .. d_n` through optimal transport.
pub fn wasserstein_chain(model: &Model, n: usize) -> Vec<DistanceTable> {
    chain(model, n, Method::Wasserstein, lift_with_blocking)
}

/// `d_0 .. d_n` through the potential-function LP.
pub fn kantorovich_chain(model: &Model, n: usize) -> Vec<DistanceTable> {
    chain(model, n, Method::Kantorovich, kantorovich_lift)
}

pub fn wasserstein_table(model: &Model, n: usize) -> DistanceTable {
    wasserstein_chain(model, n).pop().expect("chain is non-empty")
}

pub fn kantorovich_table(model: &Model, n: usize) -> DistanceTable {
    kantorovich_chain(model, n).pop().expect("chain is non-empty")
}

/// `d_n(a, b)` through optimal transport, computed only on the state pairs
/// reachable from `(a, b)`. Suited to large models where a full table is
/// wasteful.
pub fn wasserstein_pair(model: &Model, n: usize, a: StateId, b: StateId) -> Rational {
    let mut memo = HashMap::new();
    pair_distance(model, n, a, b, &mut memo)
}

fn pair_distance(
    model: &Model,
    n: usize,
    a: StateId,
    b: StateId,
    memo: &mut HashMap<(usize, StateId, StateId), Rational>,
) -> Rational {
    if n == 0 || a == b {
        return Rational::zero();
    }
    let key = (n, a.min(b), a.max(b));
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let mut v = model.atom_deviation(a, b);
    for (_, rows) in model.roles() {
        let lift = match (Distribution::from_row(&rows[a]), Distribution::from_row(&rows[b])) {
            (None, None) => Rational::zero(),
            (None, Some(_)) | (Some(_), None) => one(),
            (Some(l), Some(r)) => {
                // renumber the supports so the ground table stays small
                let mut points = l.support();
                points.extend(r.support());
                points.sort_unstable();
                points.dedup();
                let local = |d: &Distribution| {
                    Distribution::new(
                        d.iter()
                            .map(|(x, p)| (points.binary_search(&x).expect("point in support"), p.clone())),
                    )
                    .expect("renumbering keeps masses")
                };
                let (ll, rr) = (local(&l), local(&r));
                let mut ground = PairTable::zeros(points.len());
                for (i, _) in ll.iter() {
                    for (j, _) in rr.iter() {
                        ground.set(i, j, pair_distance(model, n - 1, points[i], points[j], memo));
                    }
                }
                solve_transport_min(&ground, &ll, &rr)
                    .expect("renumbered rows are proper distributions")
                    .0
            }
        };
        if lift > v {
            v = lift;
        }
    }
    memo.insert(key, v.clone());
    v
}

/// Smallest `k` with `d_k = d_{k+1}` on all pairs, if the chain shows one.
/// Only evidence about the observed prefix.
pub fn first_stable_depth(chain: &[DistanceTable]) -> Option<usize> {
    chain
        .windows(2)
        .find(|w| w[0].same_values(&w[1]))
        .map(|w| w[0].depth)
}

/// First `(k, a, b)` with `d_k(a,b) > d_{k+1}(a,b)`.
pub fn first_monotonicity_violation(chain: &[DistanceTable]) -> Option<(usize, StateId, StateId)> {
    chain.windows(2).find_map(|w| {
        w[0].first_exceeding(&w[1]).map(|(a, b)| (w[0].depth, a, b))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::m1;
    use crate::random::{random_model, seeded_rng, ModelShape};
    use crate::rational::ratio;

    #[test]
    fn m1_depth_one() {
        let d = wasserstein_table(&m1(), 1);
        assert_eq!(*d.get(0, 1), ratio(1, 1));
        assert_eq!(*d.get(0, 2), ratio(3, 10));
        assert_eq!(*d.get(1, 2), ratio(1, 1));
    }

    #[test]
    fn m1_depth_two() {
        let d = wasserstein_table(&m1(), 2);
        assert_eq!(*d.get(0, 2), ratio(1, 2));
        assert_eq!(*d.get(2, 0), ratio(1, 2));
    }

    #[test]
    fn depth_zero_is_zero() {
        let d = wasserstein_table(&m1(), 0);
        assert!(d.pairs().all(|(a, b)| d.get(a, b).is_zero()));
        assert_eq!(d.depth, 0);
    }

    #[test]
    fn kantorovich_matches_wasserstein_on_m1() {
        let m = m1();
        for n in 0..=4 {
            assert!(wasserstein_table(&m, n).same_values(&kantorovich_table(&m, n)), "depth {n}");
        }
    }

    #[test]
    fn m1_chain_stabilises() {
        let chain = wasserstein_chain(&m1(), 4);
        assert_eq!(first_monotonicity_violation(&chain), None);
        assert_eq!(first_stable_depth(&chain), Some(2));
    }

    #[test]
    fn random_tables_are_pseudometrics() {
        let mut rng = seeded_rng(5);
        let shape = ModelShape::default();
        for _ in 0..20 {
            let m = random_model(&mut rng, &shape);
            let chain = wasserstein_chain(&m, 3);
            for t in &chain {
                t.check_pseudometric().unwrap();
            }
            assert_eq!(first_monotonicity_violation(&chain), None);
        }
    }

    #[test]
    fn pair_distance_matches_table() {
        let mut rng = seeded_rng(6);
        let shape = ModelShape::default();
        for _ in 0..10 {
            let m = random_model(&mut rng, &shape);
            for n in 0..=3 {
                let t = wasserstein_table(&m, n);
                for (a, b) in t.pairs() {
                    assert_eq!(wasserstein_pair(&m, n, a, b), *t.get(a, b));
                }
            }
        }
    }

    #[test]
    fn pseudometric_violations_are_reported() {
        let mut t = PairTable::zeros(3);
        t.set_symmetric(0, 1, ratio(1, 10));
        t.set_symmetric(1, 2, ratio(1, 10));
        t.set_symmetric(0, 2, ratio(1, 2));
        let d = DistanceTable::new(1, Method::Wasserstein, t.clone());
        assert!(matches!(d.check_pseudometric(), Err(PseudometricViolation::Triangle { .. })));
        t.set(0, 1, ratio(1, 5));
        let d = DistanceTable::new(1, Method::Wasserstein, t);
        assert!(matches!(d.check_pseudometric(), Err(PseudometricViolation::Asymmetric { .. })));
    }
}
