//! Exact workbench for probabilistic fuzzy modal logic over finite models.
//!
//! Truth values, probabilities and distances are exact rationals throughout.
//! The crate is organised bottom-up:
//!
//! - [`model`]: finite probabilistic models, validation and structural
//!   transforms (disjoint union, neighbourhood restriction, unravelling).
//! - [`logic`]: concept and first-order formula syntax, parsing, rank and
//!   the standard translation.
//! - [`semantics`]: exact evaluation of both languages.
//! - [`lp`]: exact rational simplex, transport and potential LPs, and vertex
//!   enumeration of transportation polytopes.
//! - [`metrics`]: the depth-n behavioural distances (Wasserstein, Kantorovich,
//!   game, logical lower bound), game strategies and locality checks.
//! - [`synthesis`]: exact distinguishing-concept synthesis.
//! - [`random`] and [`suites`]: seeded model generation and the invariant
//!   suites run by the CLI `check` command.

pub mod logic;
pub mod lp;
pub mod metrics;
pub mod model;
pub mod random;
pub mod rational;
pub mod semantics;
pub mod suites;
pub mod synthesis;

pub use logic::{Concept, Formula};
pub use model::Model;
pub use rational::Rational;
