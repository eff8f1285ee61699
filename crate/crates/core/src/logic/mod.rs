//! Syntax of probabilistic ALC concepts and of the first-order
//! correspondence language.
//!
//! Concepts are immutable trees whose children are shared through [`Arc`],
//! so synthesized concepts can reuse subterms; traversals that must be
//! linear in the number of distinct nodes go through [`Concept::dag`].

mod enumerate;
mod json;
mod parse;
mod print;
mod translate;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::rational::Rational;

pub use enumerate::{enumerate_concepts, ConceptEnumerator};
pub use parse::{parse_concept, parse_formula, SyntaxError};
pub use translate::standard_translation;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Concept {
    Const(Rational),
    Atom(String),
    /// `C ⊖ q`, i.e. `max(C - q, 0)`.
    TruncSub(Arc<Concept>, Rational),
    Neg(Arc<Concept>),
    And(Arc<Concept>, Arc<Concept>),
    Or(Arc<Concept>, Arc<Concept>),
    Dia(String, Arc<Concept>),
}

impl Concept {
    pub fn constant(q: Rational) -> Arc<Self> {
        Arc::new(Concept::Const(q))
    }

    pub fn atom(name: &str) -> Arc<Self> {
        Arc::new(Concept::Atom(name.to_string()))
    }

    pub fn neg(c: Arc<Self>) -> Arc<Self> {
        Arc::new(Concept::Neg(c))
    }

    pub fn trunc_sub(c: Arc<Self>, q: Rational) -> Arc<Self> {
        Arc::new(Concept::TruncSub(c, q))
    }

    /// Truncated addition `min(C + q, 1)`, expanded to `¬(¬C ⊖ q)`.
    pub fn trunc_add(c: Arc<Self>, q: Rational) -> Arc<Self> {
        Self::neg(Self::trunc_sub(Self::neg(c), q))
    }

    pub fn and(l: Arc<Self>, r: Arc<Self>) -> Arc<Self> {
        Arc::new(Concept::And(l, r))
    }

    pub fn or(l: Arc<Self>, r: Arc<Self>) -> Arc<Self> {
        Arc::new(Concept::Or(l, r))
    }

    pub fn dia(role: &str, c: Arc<Self>) -> Arc<Self> {
        Arc::new(Concept::Dia(role.to_string(), c))
    }

    pub fn children(&self) -> impl Iterator<Item = &Arc<Concept>> + '_ {
        let (first, second) = match self {
            Concept::Const(_) | Concept::Atom(_) => (None, None),
            Concept::TruncSub(c, _) | Concept::Neg(c) | Concept::Dia(_, c) => (Some(c), None),
            Concept::And(l, r) | Concept::Or(l, r) => (Some(l), Some(r)),
        };
        first.into_iter().chain(second)
    }

    /// Distinct nodes reachable from `self`, children before parents.
    pub fn dag(&self) -> Dag<'_> {
        Dag::build(self)
    }

    /// Nesting depth of diamonds *and atomic concepts*: atoms have rank 1.
    pub fn rank(&self) -> usize {
        let dag = self.dag();
        let mut ranks = vec![0usize; dag.nodes.len()];
        for (i, node) in dag.nodes.iter().enumerate() {
            ranks[i] = match node {
                Concept::Const(_) => 0,
                Concept::Atom(_) => 1,
                Concept::TruncSub(c, _) | Concept::Neg(c) => ranks[dag.index_of(c)],
                Concept::And(l, r) | Concept::Or(l, r) => ranks[dag.index_of(l)].max(ranks[dag.index_of(r)]),
                Concept::Dia(_, c) => 1 + ranks[dag.index_of(c)],
            };
        }
        *ranks.last().expect("dag contains the root")
    }

    /// Node count of the tree this concept denotes (shared subterms counted
    /// once per occurrence); saturates at `u64::MAX`.
    pub fn tree_size(&self) -> u64 {
        let dag = self.dag();
        let mut sizes = vec![0u64; dag.nodes.len()];
        for (i, node) in dag.nodes.iter().enumerate() {
            sizes[i] = node
                .children()
                .fold(1u64, |acc, c| acc.saturating_add(sizes[dag.index_of(c)]));
        }
        *sizes.last().expect("dag contains the root")
    }

    /// Number of distinct shared nodes.
    pub fn dag_size(&self) -> usize {
        self.dag().nodes.len()
    }

    pub fn atoms_used(&self) -> BTreeSet<String> {
        self.dag()
            .nodes
            .iter()
            .filter_map(|n| match n {
                Concept::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn roles_used(&self) -> BTreeSet<String> {
        self.dag()
            .nodes
            .iter()
            .filter_map(|n| match n {
                Concept::Dia(r, _) => Some(r.clone()),
                _ => None,
            })
            .collect()
    }
}

/// Topologically ordered distinct nodes of a concept; the root comes last.
pub struct Dag<'a> {
    pub nodes: Vec<&'a Concept>,
    index: HashMap<*const Concept, usize>,
}

impl<'a> Dag<'a> {
    fn build(root: &'a Concept) -> Self {
        let mut dag = Dag {
            nodes: Vec::new(),
            index: HashMap::new(),
        };
        // iterative post-order so deep concepts cannot overflow the stack
        let mut stack: Vec<(&'a Concept, bool)> = vec![(root, false)];
        while let Some((node, expanded)) = stack.pop() {
            let key = node as *const Concept;
            if dag.index.contains_key(&key) {
                continue;
            }
            if expanded {
                dag.index.insert(key, dag.nodes.len());
                dag.nodes.push(node);
            } else {
                stack.push((node, true));
                for c in node.children() {
                    if !dag.index.contains_key(&Arc::as_ptr(c)) {
                        stack.push((c.as_ref(), false));
                    }
                }
            }
        }
        dag
    }

    pub fn index_of(&self, node: &Concept) -> usize {
        self.index[&(node as *const Concept)]
    }
}

/// First-order formulas; `DiaBind(x, y, φ)` is the expected value of `φ`
/// at a random successor `y` of `x`, binding `y` but not `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(Rational),
    Atom(String, String),
    Eq(String, String),
    TruncSub(Box<Formula>, Rational),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    DiaBind(String, String, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str, var: &str) -> Self {
        Formula::Atom(name.into(), var.into())
    }

    pub fn eq(x: &str, y: &str) -> Self {
        Formula::Eq(x.into(), y.into())
    }

    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    /// Disjunction, expressed as `¬(¬φ ∧ ¬ψ)`.
    pub fn or(l: Formula, r: Formula) -> Self {
        Self::neg(Self::and(Self::neg(l), Self::neg(r)))
    }

    pub fn trunc_sub(f: Formula, q: Rational) -> Self {
        Formula::TruncSub(Box::new(f), q)
    }

    pub fn exists(var: &str, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn dia_bind(at: &str, bound: &str, body: Formula) -> Self {
        Formula::DiaBind(at.into(), bound.into(), Box::new(body))
    }

    /// Quantifier rank: nesting of `∃`, `◇` and atoms; equality counts 0.
    pub fn qrank(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Eq(..) => 0,
            Formula::Atom(..) => 1,
            Formula::TruncSub(f, _) | Formula::Neg(f) => f.qrank(),
            Formula::And(l, r) => l.qrank().max(r.qrank()),
            Formula::Exists(_, f) | Formula::DiaBind(_, _, f) => 1 + f.qrank(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Formula::Const(_) => BTreeSet::new(),
            Formula::Atom(_, v) => BTreeSet::from([v.clone()]),
            Formula::Eq(x, y) => BTreeSet::from([x.clone(), y.clone()]),
            Formula::TruncSub(f, _) | Formula::Neg(f) => f.free_vars(),
            Formula::And(l, r) => {
                let mut s = l.free_vars();
                s.extend(r.free_vars());
                s
            }
            Formula::Exists(v, f) => {
                let mut s = f.free_vars();
                s.remove(v);
                s
            }
            Formula::DiaBind(x, y, f) => {
                let mut s = f.free_vars();
                s.remove(y);
                s.insert(x.clone());
                s
            }
        }
    }
}
