//! Exact Zadeh-style semantics: `min` for `∧`, `max` for `∨`, `1 - x` for
//! `¬`, `max(x - q, 0)` for `⊖`, and expectation over the successor row
//! for `◇` (zero at blocking states).

use std::collections::BTreeMap;
use std::ops::{Deref, Index};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::logic::{Concept, Formula};
use crate::model::{Model, ModelError, StateId, SuccessorRow, DEFAULT_ROLE};
use crate::rational::{truncated_sub, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown atomic concept {0:?}")]
    UnknownAtom(String),
    #[error("unknown role {0:?}")]
    UnknownRole(String),
    #[error("variable {0:?} is not bound by the environment")]
    UnboundVariable(String),
}

impl From<ModelError> for EvalError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownAtom(a) => EvalError::UnknownAtom(a),
            ModelError::UnknownRole(r) => EvalError::UnknownRole(r),
            other => unreachable!("evaluation only looks up atoms and roles: {other}"),
        }
    }
}

/// A truth value per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation(Vec<Rational>);

impl Valuation {
    pub fn new(values: Vec<Rational>) -> Self {
        Self(values)
    }

    pub fn constant(q: &Rational, n: usize) -> Self {
        Self(vec![q.clone(); n])
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    /// `‖f - g‖∞`.
    pub fn sup_distance(&self, other: &Valuation) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(x, y)| crate::rational::abs_diff(x, y))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl Deref for Valuation {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl Index<StateId> for Valuation {
    type Output = Rational;
    fn index(&self, s: StateId) -> &Rational {
        &self.0[s]
    }
}

/// Variable assignment for formula evaluation.
pub type Environment = BTreeMap<String, StateId>;

/// `(◇f)(a) = Σ r_a(a')·f(a')`.
pub fn apply_diamond(rows: &[SuccessorRow], f: &[Rational]) -> Valuation {
    Valuation(rows.iter().map(|row| row.expect(|t| f[t].clone())).collect())
}

/// Evaluates `c` at every state. Each distinct node is evaluated once.
pub fn eval_concept(model: &Model, c: &Concept) -> Result<Valuation, EvalError> {
    let n = model.num_states();
    let dag = c.dag();
    let mut values: Vec<Vec<Rational>> = Vec::with_capacity(dag.nodes.len());
    for node in &dag.nodes {
        let child = |c: &Concept| &values[dag.index_of(c)];
        let v = match node {
            Concept::Const(q) => vec![q.clone(); n],
            Concept::Atom(a) => model.atom(a)?.to_vec(),
            Concept::TruncSub(inner, q) => child(inner).iter().map(|x| truncated_sub(x, q)).collect(),
            Concept::Neg(inner) => child(inner).iter().map(|x| Rational::one() - x).collect(),
            Concept::And(l, r) => child(l)
                .iter()
                .zip(child(r))
                .map(|(x, y)| x.min(y).clone())
                .collect(),
            Concept::Or(l, r) => child(l)
                .iter()
                .zip(child(r))
                .map(|(x, y)| x.max(y).clone())
                .collect(),
            Concept::Dia(role, inner) => apply_diamond(model.role(role)?, child(inner)).0,
        };
        values.push(v);
    }
    Ok(Valuation(values.pop().expect("dag contains the root")))
}

pub fn eval_concept_at(model: &Model, c: &Concept, s: StateId) -> Result<Rational, EvalError> {
    Ok(eval_concept(model, c)?.0.swap_remove(s))
}

/// Evaluates a formula under `env`, reading `◇` through the default role.
pub fn eval_formula(model: &Model, phi: &Formula, env: &Environment) -> Result<Rational, EvalError> {
    eval_formula_with_role(model, DEFAULT_ROLE, phi, env)
}

pub fn eval_formula_with_role(
    model: &Model,
    role: &str,
    phi: &Formula,
    env: &Environment,
) -> Result<Rational, EvalError> {
    let mut env = env.clone();
    FormulaEval { model, role }.eval(phi, &mut env)
}

struct FormulaEval<'a> {
    model: &'a Model,
    role: &'a str,
}

impl FormulaEval<'_> {
    fn lookup(env: &Environment, v: &str) -> Result<StateId, EvalError> {
        env.get(v).copied().ok_or_else(|| EvalError::UnboundVariable(v.to_string()))
    }

    /// Evaluates `body` with `var` bound to `s`, restoring the previous binding.
    fn with_binding(&self, body: &Formula, env: &mut Environment, var: &str, s: StateId) -> Result<Rational, EvalError> {
        let saved = env.insert(var.to_string(), s);
        let result = self.eval(body, env);
        match saved {
            Some(old) => env.insert(var.to_string(), old),
            None => env.remove(var),
        };
        result
    }

    fn eval(&self, phi: &Formula, env: &mut Environment) -> Result<Rational, EvalError> {
        Ok(match phi {
            Formula::Const(q) => q.clone(),
            Formula::Atom(a, x) => {
                let s = Self::lookup(env, x)?;
                self.model.atom(a)?[s].clone()
            }
            Formula::Eq(x, y) => {
                if Self::lookup(env, x)? == Self::lookup(env, y)? {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            Formula::TruncSub(f, q) => truncated_sub(&self.eval(f, env)?, q),
            Formula::Neg(f) => Rational::one() - self.eval(f, env)?,
            Formula::And(l, r) => {
                let x = self.eval(l, env)?;
                let y = self.eval(r, env)?;
                x.min(y)
            }
            Formula::Exists(v, body) => {
                let mut best: Option<Rational> = None;
                for s in self.model.state_ids() {
                    let value = self.with_binding(body, env, v, s)?;
                    if best.as_ref().is_none_or(|b| value > *b) {
                        best = Some(value);
                    }
                }
                // the empty supremum is 0
                best.unwrap_or_else(Rational::zero)
            }
            Formula::DiaBind(x, y, body) => {
                let s = Self::lookup(env, x)?;
                let rows = self.model.role(self.role)?;
                let mut acc = Rational::zero();
                for (t, p) in rows[s].iter() {
                    acc += p * self.with_binding(body, env, y, t)?;
                }
                acc
            }
        })
    }
}
