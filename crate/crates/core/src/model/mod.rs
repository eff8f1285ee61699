//! Finite probabilistic fuzzy models.
//!
//! A model has an ordered set of named states, atomic concepts valued in
//! `[0,1]`, and one or more named roles. Each role assigns every state a
//! [`SuccessorRow`] that is either empty (the state is *blocking*) or a
//! probability mass function over states.

mod ef;
mod gaifman;
mod json;
mod transform;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{abs_diff, format_rational, in_unit_interval, Rational};

pub use ef::{is_partial_isomorphism, replay_standard_rounds, EfReplay};
pub use gaifman::{gaifman_distance, gaifman_distances_from};
pub use json::{RawModel, RawRow};
pub use transform::{disjoint_union, restrict, unravel, DisjointUnion, Unravelling};

/// Role used by the distance and game machinery unless another is named.
pub const DEFAULT_ROLE: &str = "r";

/// Index of a state within its model.
pub type StateId = usize;

/// Sparse successor distribution of one state; only positive entries are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SuccessorRow {
    entries: BTreeMap<StateId, Rational>,
}

impl SuccessorRow {
    pub fn blocking() -> Self {
        Self::default()
    }

    /// Builds a row, dropping zero entries and merging repeated targets.
    pub fn from_entries<I: IntoIterator<Item = (StateId, Rational)>>(entries: I) -> Self {
        let mut map: BTreeMap<StateId, Rational> = BTreeMap::new();
        for (target, p) in entries {
            *map.entry(target).or_insert_with(Rational::zero) += p;
        }
        map.retain(|_, p| !p.is_zero());
        Self { entries: map }
    }

    pub fn is_blocking(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn prob(&self, target: StateId) -> Rational {
        self.entries.get(&target).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &Rational)> + '_ {
        self.entries.iter().map(|(s, p)| (*s, p))
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |acc, p| acc + p)
    }

    /// Expectation of `f` under this row; zero at blocking rows.
    pub fn expect<F: Fn(StateId) -> Rational>(&self, f: F) -> Rational {
        self.entries
            .iter()
            .fold(Rational::zero(), |acc, (s, p)| acc + p * f(*s))
    }

    pub(crate) fn map_targets<F: Fn(StateId) -> StateId>(&self, f: F) -> Self {
        Self::from_entries(self.iter().map(|(s, p)| (f(s), p.clone())))
    }
}

/// One problem found while validating raw model data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateState(String),
    EmptyStateName,
    UnknownState { context: String, state: String },
    UnknownTarget { role: String, state: String, target: String },
    ValueOutOfRange { location: String, value: Rational },
    RowSumInvalid { role: String, state: String, sum: Rational },
    BadRational { location: String, text: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateState(s) => write!(f, "duplicate state {s:?}"),
            Violation::EmptyStateName => write!(f, "empty state name"),
            Violation::UnknownState { context, state } => {
                write!(f, "{context}: unknown state {state:?}")
            }
            Violation::UnknownTarget { role, state, target } => {
                write!(f, "role {role}, row of {state:?}: unknown target {target:?}")
            }
            Violation::ValueOutOfRange { location, value } => {
                write!(f, "{location}: value {} outside [0,1]", format_rational(value))
            }
            Violation::RowSumInvalid { role, state, sum } => write!(
                f,
                "role {role}, row of {state:?}: sum is {}, expected 0 or 1",
                format_rational(sum)
            ),
            Violation::BadRational { location, text } => {
                write!(f, "{location}: cannot parse {text:?} as a rational")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("model JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("unknown role {0:?}")]
    UnknownRole(String),
    #[error("unknown atomic concept {0:?}")]
    UnknownAtom(String),
    #[error("tuple lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("disjoint union of an empty list of models")]
    EmptyUnion,
    #[error("generated state name {0:?} is not unique")]
    NameCollision(String),
}

/// A validated finite model. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    states: Vec<String>,
    index: HashMap<String, StateId>,
    atoms: BTreeMap<String, Vec<Rational>>,
    roles: BTreeMap<String, Vec<SuccessorRow>>,
}

impl Model {
    /// Assembles a model from already-indexed parts, checking every invariant.
    pub fn from_parts(
        states: Vec<String>,
        atoms: BTreeMap<String, Vec<Rational>>,
        roles: BTreeMap<String, Vec<SuccessorRow>>,
    ) -> Result<Self, ModelError> {
        let mut violations = Vec::new();
        let mut index = HashMap::with_capacity(states.len());
        for (i, name) in states.iter().enumerate() {
            if name.is_empty() {
                violations.push(Violation::EmptyStateName);
            }
            if index.insert(name.clone(), i).is_some() {
                violations.push(Violation::DuplicateState(name.clone()));
            }
        }
        let n = states.len();
        for (atom, values) in &atoms {
            assert_eq!(values.len(), n, "atom {atom} has a value per state");
            for (s, v) in values.iter().enumerate() {
                if !in_unit_interval(v) {
                    violations.push(Violation::ValueOutOfRange {
                        location: format!("atom {atom} at {:?}", states[s]),
                        value: v.clone(),
                    });
                }
            }
        }
        for (role, rows) in &roles {
            assert_eq!(rows.len(), n, "role {role} has a row per state");
            for (s, row) in rows.iter().enumerate() {
                for (t, p) in row.iter() {
                    if t >= n {
                        violations.push(Violation::UnknownTarget {
                            role: role.clone(),
                            state: states[s].clone(),
                            target: format!("#{t}"),
                        });
                    }
                    if p.is_negative() || *p > Rational::one() {
                        violations.push(Violation::ValueOutOfRange {
                            location: format!("role {role}, row of {:?}", states[s]),
                            value: p.clone(),
                        });
                    }
                }
                let sum = row.sum();
                if !sum.is_zero() && !sum.is_one() {
                    violations.push(Violation::RowSumInvalid {
                        role: role.clone(),
                        state: states[s].clone(),
                        sum,
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        Ok(Self {
            states,
            index,
            atoms,
            roles,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        RawModel::from_json_str(text)?.validate()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("model serializes")
    }

    pub fn to_raw(&self) -> RawModel {
        RawModel::from_model(self)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_ids(&self) -> std::ops::Range<StateId> {
        0..self.states.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Result<StateId, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    pub fn atom_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.atoms.keys().map(String::as_str)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&str, &[Rational])> + '_ {
        self.atoms.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn atom(&self, name: &str) -> Result<&[Rational], ModelError> {
        self.atoms
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| ModelError::UnknownAtom(name.to_string()))
    }

    /// `max_A |A(a) - A(b)|`, zero when there are no atoms.
    pub fn atom_deviation(&self, a: StateId, b: StateId) -> Rational {
        self.atoms
            .values()
            .map(|v| abs_diff(&v[a], &v[b]))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn role_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.roles.keys().map(String::as_str)
    }

    pub fn has_role(&self, name: &str) -> bool {
        self.roles.contains_key(name)
    }

    pub fn role(&self, name: &str) -> Result<&[SuccessorRow], ModelError> {
        self.roles
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| ModelError::UnknownRole(name.to_string()))
    }

    pub fn roles(&self) -> impl Iterator<Item = (&str, &[SuccessorRow])> + '_ {
        self.roles.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Undirected adjacency of the support graph, over all roles.
    pub(crate) fn undirected_neighbours(&self) -> Vec<BTreeSet<StateId>> {
        let mut adj = vec![BTreeSet::new(); self.num_states()];
        for rows in self.roles.values() {
            for (s, row) in rows.iter().enumerate() {
                for t in row.support() {
                    adj[s].insert(t);
                    adj[t].insert(s);
                }
            }
        }
        adj
    }
}
