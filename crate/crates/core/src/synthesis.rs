//! Exact synthesis of distinguishing concepts.
//!
//! `witness(n, a, b)` is a concept of rank ≤ n whose values at `a` and `b`
//! differ by exactly `d_n(a, b)`. It is built from three kinds of
//! candidates: atoms, `◇1` when exactly one row is blocking, and
//! `◇(g)` where `g` reproduces an optimal potential of the two rows at
//! depth `n - 1`. Reproducing a non-expansive target exactly on a finite
//! set uses max-min combinations of pairwise interpolants, each built from
//! a lower-depth witness with `⊖`, `∧` and truncated addition.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::logic::Concept;
use crate::lp::{solve_kantorovich_max, Distribution, LpError};
use crate::metrics::{wasserstein_chain, DistanceTable};
use crate::model::{Model, StateId};
use crate::rational::{abs_diff, format_rational, one, truncated_sub, Rational};
use crate::semantics::{eval_concept, Valuation};

pub const DEFAULT_SIZE_CEILING: usize = 1_000_000;

/// Target values on a finite set of states.
pub type TargetFunction = BTreeMap<StateId, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("target is not non-expansive at depth {depth}: |f({x}) - f({y})| = {gap} > d = {distance}")]
    NotNonexpansive {
        depth: usize,
        x: StateId,
        y: StateId,
        gap: String,
        distance: String,
    },
    #[error("target value {value} at state {state} is outside [0,1]")]
    TargetOutOfRange { state: StateId, value: String },
    #[error("witness has {size} distinct nodes, above the ceiling {ceiling}")]
    SizeCeiling { size: usize, ceiling: usize },
    #[error("state index {0} is out of range")]
    UnknownState(StateId),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone)]
pub struct WitnessCertificate {
    pub pair: (StateId, StateId),
    pub pair_names: (String, String),
    pub depth: usize,
    pub concept: Arc<Concept>,
    pub achieved: Rational,
    pub target: Rational,
    pub tolerance: Rational,
}

impl WitnessCertificate {
    /// Rank within the depth, not above the target, and short of it by at
    /// most the tolerance (exact equality by default).
    pub fn valid(&self) -> bool {
        self.concept.rank() <= self.depth
            && self.achieved <= self.target
            && &self.target - &self.achieved <= self.tolerance
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "pair": [self.pair_names.0, self.pair_names.1],
            "depth": self.depth,
            "concept": self.concept.to_string(),
            "achieved": format_rational(&self.achieved),
            "target": format_rational(&self.target),
            "valid": self.valid(),
        })
    }
}

#[derive(Clone)]
struct Built {
    concept: Arc<Concept>,
    values: Valuation,
}

/// Memoised synthesis over one model. Witnesses are shared between all
/// concepts built in the session.
pub struct SynthesisSession<'m> {
    model: &'m Model,
    chain: Vec<DistanceTable>,
    witnesses: HashMap<(usize, StateId, StateId), Built>,
    ceiling: usize,
    tolerance: Rational,
}

impl<'m> SynthesisSession<'m> {
    pub fn new(model: &'m Model) -> Self {
        Self {
            model,
            chain: wasserstein_chain(model, 0),
            witnesses: HashMap::new(),
            ceiling: DEFAULT_SIZE_CEILING,
            tolerance: Rational::zero(),
        }
    }

    pub fn with_ceiling(mut self, ceiling: usize) -> Self {
        self.ceiling = ceiling;
        self
    }

    pub fn with_tolerance(mut self, tolerance: Rational) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// `d_n` as used for targets and preconditions.
    pub fn distances(&mut self, n: usize) -> &DistanceTable {
        if self.chain.len() <= n {
            self.chain = wasserstein_chain(self.model, n);
        }
        &self.chain[n]
    }

    fn check_state(&self, s: StateId) -> Result<(), SynthesisError> {
        if s < self.model.num_states() {
            Ok(())
        } else {
            Err(SynthesisError::UnknownState(s))
        }
    }

    fn check_size(&self, c: &Concept) -> Result<(), SynthesisError> {
        let size = c.dag_size();
        if size > self.ceiling {
            Err(SynthesisError::SizeCeiling {
                size,
                ceiling: self.ceiling,
            })
        } else {
            Ok(())
        }
    }

    fn constant(&self, q: &Rational) -> Built {
        Built {
            concept: Concept::constant(q.clone()),
            values: Valuation::constant(q, self.model.num_states()),
        }
    }

    /// Synthesises a witness for `(a, b)` at depth `n` and certifies it by
    /// evaluating the emitted concept from scratch.
    pub fn certify(&mut self, n: usize, a: StateId, b: StateId) -> Result<WitnessCertificate, SynthesisError> {
        let concept = self.witness(n, a, b)?;
        self.check_size(&concept)?;
        let values = eval_concept(self.model, &concept).expect("synthesised from the model's vocabulary");
        Ok(WitnessCertificate {
            pair: (a, b),
            pair_names: (
                self.model.state_name(a).to_string(),
                self.model.state_name(b).to_string(),
            ),
            depth: n,
            concept,
            achieved: abs_diff(&values[a], &values[b]),
            target: self.distances(n).get(a, b).clone(),
            tolerance: self.tolerance.clone(),
        })
    }

    /// A rank-≤n concept separating `a` and `b` by `d_n(a, b)`.
    pub fn witness(&mut self, n: usize, a: StateId, b: StateId) -> Result<Arc<Concept>, SynthesisError> {
        self.check_state(a)?;
        self.check_state(b)?;
        Ok(self.witness_built(n, a, b)?.concept)
    }

    fn witness_built(&mut self, n: usize, a: StateId, b: StateId) -> Result<Built, SynthesisError> {
        let key = (n, a.min(b), a.max(b));
        if let Some(hit) = self.witnesses.get(&key) {
            return Ok(hit.clone());
        }
        let built = if n == 0 || a == b {
            self.constant(&Rational::zero())
        } else {
            self.best_candidate(n, a, b)?
        };
        self.check_size(&built.concept)?;
        self.witnesses.insert(key, built.clone());
        Ok(built)
    }

    fn best_candidate(&mut self, n: usize, a: StateId, b: StateId) -> Result<Built, SynthesisError> {
        let model = self.model;
        let target = self.distances(n).get(a, b).clone();
        let size = model.num_states();
        let mut best = self.constant(&Rational::zero());
        let mut best_gap = Rational::zero();
        let offer = |c: Built, best: &mut Built, best_gap: &mut Rational| {
            let gap = abs_diff(&c.values[a], &c.values[b]);
            if gap > *best_gap {
                *best_gap = gap;
                *best = c;
            }
        };

        for (role, rows) in model.roles() {
            if rows[a].is_blocking() != rows[b].is_blocking() {
                let values = Valuation::new(
                    rows.iter()
                        .map(|r| if r.is_blocking() { Rational::zero() } else { one() })
                        .collect(),
                );
                let concept = Concept::dia(role, Concept::constant(one()));
                offer(Built { concept, values }, &mut best, &mut best_gap);
            }
        }
        for (name, vals) in model.atoms() {
            if best_gap >= target {
                break;
            }
            let concept = Concept::atom(name);
            offer(
                Built {
                    concept,
                    values: Valuation::new(vals.to_vec()),
                },
                &mut best,
                &mut best_gap,
            );
        }
        let roles: Vec<String> = model.role_names().map(str::to_string).collect();
        for role in roles {
            if best_gap >= target {
                break;
            }
            let rows = model.role(&role).expect("role from the model");
            let (Some(l), Some(r)) = (Distribution::from_row(&rows[a]), Distribution::from_row(&rows[b])) else {
                continue;
            };
            let ground = self.distances(n - 1).as_pair_table().clone();
            let (_, potential) = solve_kantorovich_max(&ground, &l, &r)?;
            let f: TargetFunction = potential.iter().map(|(x, v)| (x, v.clone())).collect();
            let g = self.reconstruct_built(n - 1, &f)?;
            let values = Valuation::new(
                rows.iter()
                    .map(|row| row.expect(|t| g.values[t].clone()))
                    .collect(),
            );
            debug_assert_eq!(values.len(), size);
            let concept = Concept::dia(&role, g.concept);
            offer(Built { concept, values }, &mut best, &mut best_gap);
        }
        Ok(best)
    }

    /// Concept of rank ≤ n equal to `f` on its domain.
    pub fn reconstruct_function(&mut self, n: usize, f: &TargetFunction) -> Result<Arc<Concept>, SynthesisError> {
        for &s in f.keys() {
            self.check_state(s)?;
        }
        let built = self.reconstruct_built(n, f)?;
        self.check_size(&built.concept)?;
        Ok(built.concept)
    }

    fn reconstruct_built(&mut self, n: usize, f: &TargetFunction) -> Result<Built, SynthesisError> {
        for (&s, v) in f {
            if !crate::rational::in_unit_interval(v) {
                return Err(SynthesisError::TargetOutOfRange {
                    state: s,
                    value: format_rational(v),
                });
            }
        }
        let d = self.distances(n).clone();
        for (&x, fx) in f {
            for (&y, fy) in f {
                let gap = abs_diff(fx, fy);
                if gap > *d.get(x, y) {
                    return Err(SynthesisError::NotNonexpansive {
                        depth: n,
                        x,
                        y,
                        gap: format_rational(&gap),
                        distance: format_rational(d.get(x, y)),
                    });
                }
            }
        }
        let mut first_values = f.values();
        if let Some(v0) = first_values.next() {
            if first_values.all(|v| v == v0) {
                return Ok(self.constant(v0));
            }
        }

        let mut outer: Option<Built> = None;
        for (&x, fx) in f {
            let mut inner: Option<Built> = None;
            for (&y, fy) in f {
                let g = if x == y {
                    self.constant(fx)
                } else {
                    self.interpolant_built(n, x, y, fx, fy)?
                };
                inner = Some(match inner {
                    None => g,
                    Some(acc) => Built {
                        concept: Concept::and(acc.concept, g.concept),
                        values: zip_with(&acc.values, &g.values, |p, q| p.min(q).clone()),
                    },
                });
            }
            let h = inner.expect("domain is non-empty");
            outer = Some(match outer {
                None => h,
                Some(acc) => Built {
                    concept: Concept::or(acc.concept, h.concept),
                    values: zip_with(&acc.values, &h.values, |p, q| p.max(q).clone()),
                },
            });
        }
        Ok(outer.unwrap_or_else(|| self.constant(&Rational::zero())))
    }

    /// Concept of rank ≤ n taking `tx` at `x` and `ty` at `y`, built from
    /// the session's depth-n witness for the pair.
    pub fn pairwise_interpolant(
        &mut self,
        n: usize,
        x: StateId,
        y: StateId,
        tx: &Rational,
        ty: &Rational,
    ) -> Result<Arc<Concept>, SynthesisError> {
        self.check_state(x)?;
        self.check_state(y)?;
        Ok(self.interpolant_built(n, x, y, tx, ty)?.concept)
    }

    fn interpolant_built(
        &mut self,
        n: usize,
        x: StateId,
        y: StateId,
        tx: &Rational,
        ty: &Rational,
    ) -> Result<Built, SynthesisError> {
        if x == y || tx == ty {
            return Ok(self.constant(tx));
        }
        let distance = self.distances(n).get(x, y).clone();
        let gap = abs_diff(tx, ty);
        if gap > distance {
            return Err(SynthesisError::NotNonexpansive {
                depth: n,
                x,
                y,
                gap: format_rational(&gap),
                distance: format_rational(&distance),
            });
        }
        let witness = self.witness_built(n, x, y)?;
        Ok(interpolate(witness, x, y, tx, ty))
    }
}

/// `((D ⊖ D(lo)) ∧ (t_hi - t_lo)) + t_lo`, with `D` negated if needed so
/// that `D(hi) ≥ D(lo)`.
fn interpolate(d: Built, x: StateId, y: StateId, tx: &Rational, ty: &Rational) -> Built {
    let (hi, lo, t_hi, t_lo) = if tx >= ty { (x, y, tx, ty) } else { (y, x, ty, tx) };
    let d = if d.values[hi] >= d.values[lo] {
        d
    } else {
        Built {
            concept: Concept::neg(d.concept),
            values: Valuation::new(d.values.iter().map(|v| one() - v).collect()),
        }
    };
    let floor = d.values[lo].clone();
    let width = t_hi - t_lo;
    let concept = Concept::trunc_add(
        Concept::and(Concept::trunc_sub(d.concept, floor.clone()), Concept::constant(width.clone())),
        t_lo.clone(),
    );
    let values = Valuation::new(
        d.values
            .iter()
            .map(|v| {
                let lifted = truncated_sub(v, &floor).min(width.clone()) + t_lo;
                if lifted > one() {
                    one()
                } else {
                    lifted
                }
            })
            .collect(),
    );
    Built { concept, values }
}

fn zip_with<F: Fn(&Rational, &Rational) -> Rational>(a: &Valuation, b: &Valuation, f: F) -> Valuation {
    Valuation::new(a.iter().zip(b.iter()).map(|(p, q)| f(p, q)).collect())
}

/// Synthesises and certifies a witness in a fresh session.
pub fn synthesize_witness(model: &Model, n: usize, a: StateId, b: StateId) -> Result<WitnessCertificate, SynthesisError> {
    SynthesisSession::new(model).certify(n, a, b)
}

/// Whether `f` is non-expansive wrt `d` on its domain, with values in [0,1].
pub fn is_nonexpansive(f: &TargetFunction, d: &DistanceTable) -> bool {
    f.iter().all(|(&x, fx)| {
        !fx.is_negative()
            && *fx <= Rational::one()
            && f.iter().all(|(&y, fy)| abs_diff(fx, fy) <= *d.get(x, y))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_concept;
    use crate::model::tests::m1;
    use crate::random::{random_model, seeded_rng, ModelShape};
    use crate::rational::ratio;

    #[test]
    fn m1_witnesses() {
        let m = m1();
        let cert = synthesize_witness(&m, 2, 0, 2).unwrap();
        assert_eq!(cert.achieved, ratio(1, 2));
        assert_eq!(cert.target, ratio(1, 2));
        assert!(cert.valid());
        assert!(cert.concept.rank() <= 2);

        let cert = synthesize_witness(&m, 1, 1, 2).unwrap();
        assert_eq!(cert.concept.to_string(), "<r> 1");
        assert_eq!(cert.achieved, ratio(1, 1));
        assert!(cert.valid());

        let cert = synthesize_witness(&m, 3, 0, 0).unwrap();
        assert_eq!(cert.concept.rank(), 0);
        assert_eq!(cert.achieved, ratio(0, 1));
        assert!(cert.valid());
    }

    #[test]
    fn interpolant_with_given_witness() {
        let m = m1();
        let d = Built {
            concept: parse_concept("A").unwrap(),
            values: Valuation::new(m.atom("A").unwrap().to_vec()),
        };
        let g = interpolate(d, 1, 2, &ratio(1, 1), &ratio(1, 4));
        assert_eq!(g.concept.to_string(), "(A - 0 & 3/4) + 1/4");
        assert_eq!(parse_concept("((A - 0) & 3/4) + 1/4").unwrap(), g.concept);
        let v = eval_concept(&m, &g.concept).unwrap();
        assert_eq!(v[1], ratio(1, 1));
        assert_eq!(v[2], ratio(1, 4));
        assert_eq!(v, g.values);
    }

    #[test]
    fn degenerate_interpolants_are_constants() {
        let m = m1();
        let mut s = SynthesisSession::new(&m);
        let c = s.pairwise_interpolant(1, 0, 0, &ratio(2, 5), &ratio(2, 5)).unwrap();
        assert_eq!(*c, Concept::Const(ratio(2, 5)));
        let c = s.pairwise_interpolant(1, 0, 2, &ratio(1, 5), &ratio(1, 5)).unwrap();
        assert_eq!(c.rank(), 0);
    }

    #[test]
    fn interpolant_precondition() {
        let m = m1();
        let mut s = SynthesisSession::new(&m);
        assert!(matches!(
            s.pairwise_interpolant(1, 0, 2, &ratio(1, 1), &ratio(0, 1)),
            Err(SynthesisError::NotNonexpansive { .. })
        ));
    }

    #[test]
    fn reconstructs_atom_valuation() {
        let m = m1();
        let mut s = SynthesisSession::new(&m);
        let f: TargetFunction = m.atom("A").unwrap().iter().cloned().enumerate().collect();
        let c = s.reconstruct_function(1, &f).unwrap();
        assert!(c.rank() <= 1);
        assert_eq!(&*eval_concept(&m, &c).unwrap(), m.atom("A").unwrap());
    }

    #[test]
    fn reconstructs_constant() {
        let m = m1();
        let mut s = SynthesisSession::new(&m);
        let f: TargetFunction = (0..3).map(|x| (x, ratio(1, 3))).collect();
        let c = s.reconstruct_function(2, &f).unwrap();
        assert!(eval_concept(&m, &c).unwrap().iter().all(|v| *v == ratio(1, 3)));
    }

    #[test]
    fn reconstructs_optimal_potential() {
        let m = m1();
        let mut s = SynthesisSession::new(&m);
        let rows = m.role("r").unwrap();
        let (l, r) = (Distribution::from_row(&rows[0]).unwrap(), Distribution::from_row(&rows[2]).unwrap());
        let ground = s.distances(1).as_pair_table().clone();
        let (_, potential) = solve_kantorovich_max(&ground, &l, &r).unwrap();
        let f: TargetFunction = potential.iter().map(|(x, v)| (x, v.clone())).collect();
        assert_eq!(f.keys().copied().collect::<Vec<_>>(), vec![1, 2]);
        let c = s.reconstruct_function(1, &f).unwrap();
        let v = eval_concept(&m, &c).unwrap();
        for (x, fx) in &f {
            assert_eq!(v[*x], *fx);
        }
    }

    #[test]
    fn size_ceiling_is_enforced() {
        let m = m1();
        let mut s = SynthesisSession::new(&m).with_ceiling(3);
        assert!(matches!(s.certify(2, 0, 2), Err(SynthesisError::SizeCeiling { .. })));
    }

    #[test]
    fn tolerance_relaxes_validity() {
        let m = m1();
        let mut cert = synthesize_witness(&m, 2, 0, 2).unwrap();
        cert.achieved = ratio(9, 20);
        assert!(!cert.valid());
        cert.tolerance = ratio(1, 10);
        assert!(cert.valid());
    }

    #[test]
    fn witnesses_are_exact_on_random_models() {
        let mut rng = seeded_rng(17);
        let shape = ModelShape::default();
        for _ in 0..10 {
            let m = random_model(&mut rng, &shape);
            let mut session = SynthesisSession::new(&m);
            for n in 0..=3 {
                for a in m.state_ids() {
                    for b in a..m.num_states() {
                        let cert = session.certify(n, a, b).unwrap();
                        assert!(cert.valid(), "n={n} pair=({a},{b}) achieved {} target {}", cert.achieved, cert.target);
                    }
                }
            }
        }
    }

    #[test]
    fn off_support_values_do_not_matter() {
        let m = m1();
        let mut s = SynthesisSession::new(&m);
        // a's successors are b and c; the value at a itself is irrelevant to ◇
        let base: TargetFunction = [(1, ratio(1, 1)), (2, ratio(0, 1))].into();
        let c1 = Concept::dia("r", s.reconstruct_function(1, &base).unwrap());
        let mut wider = base.clone();
        wider.insert(0, ratio(3, 10));
        let c2 = Concept::dia("r", s.reconstruct_function(1, &wider).unwrap());
        let (v1, v2) = (eval_concept(&m, &c1).unwrap(), eval_concept(&m, &c2).unwrap());
        assert_eq!(v1[0], v2[0]);
        assert_eq!(v1[2], v2[2]);
    }
}
