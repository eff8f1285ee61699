//! Seeded random models, valuations and concepts.
//!
//! All generators draw from [`rand_chacha::ChaCha8Rng`] seeded with
//! `seed_from_u64`, so a seed plus this algorithm name reproduces a corpus
//! exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::logic::Concept;
use crate::model::{Model, SuccessorRow, DEFAULT_ROLE};
use crate::rational::{ratio, Rational};

pub type WorkbenchRng = ChaCha8Rng;

pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha, seed_from_u64)";

pub fn seeded_rng(seed: u64) -> WorkbenchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameters of the random model generator.
#[derive(Debug, Clone)]
pub struct ModelShape {
    pub max_states: usize,
    pub max_denominator: u32,
    pub atoms: Vec<String>,
    /// Upper bound on the support size of a non-blocking row.
    pub max_support: usize,
}

impl Default for ModelShape {
    fn default() -> Self {
        Self {
            max_states: 5,
            max_denominator: 12,
            atoms: vec!["A".into(), "B".into()],
            max_support: 5,
        }
    }
}

/// `k/d` with `d` uniform in `1..=max_den` and `k` uniform in `0..=d`.
pub fn random_unit_rational<R: Rng>(rng: &mut R, max_den: u32) -> Rational {
    let d = rng.gen_range(1..=max_den.max(1));
    let k = rng.gen_range(0..=d);
    ratio(k as i64, d as i64)
}

/// A random distribution on `support` with a common denominator `≤ max_den`.
fn random_row<R: Rng>(rng: &mut R, n: usize, shape: &ModelShape) -> SuccessorRow {
    let max_den = shape.max_denominator.max(1) as usize;
    let mut size = rng.gen_range(1..=shape.max_support.clamp(1, n));
    let den = rng.gen_range(size.min(max_den)..=max_den);
    size = size.min(den);
    let mut targets: Vec<usize> = (0..n).collect();
    targets.shuffle(rng);
    targets.truncate(size);
    // random composition of `den` into `size` positive parts
    let mut cuts: Vec<usize> = (1..den).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(size - 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(size);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(den)) {
        parts.push(c - prev);
        prev = c;
    }
    SuccessorRow::from_entries(
        targets
            .into_iter()
            .zip(parts)
            .map(|(t, k)| (t, Rational::new(BigInt::from(k), BigInt::from(den)))),
    )
}

/// Random model: `1..=max_states` states named `s0, s1, …`; each row of role
/// `r` blocking with probability 1/4, otherwise a random distribution.
pub fn random_model<R: Rng>(rng: &mut R, shape: &ModelShape) -> Model {
    let n = rng.gen_range(1..=shape.max_states.max(1));
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let atoms: BTreeMap<String, Vec<Rational>> = shape
        .atoms
        .iter()
        .map(|a| {
            let values = (0..n).map(|_| random_unit_rational(rng, shape.max_denominator)).collect();
            (a.clone(), values)
        })
        .collect();
    let rows = (0..n)
        .map(|_| {
            if rng.gen_ratio(1, 4) {
                SuccessorRow::blocking()
            } else {
                random_row(rng, n, shape)
            }
        })
        .collect();
    let roles = BTreeMap::from([(DEFAULT_ROLE.to_string(), rows)]);
    Model::from_parts(states, atoms, roles).expect("generator produces valid models")
}

/// `count` models drawn in sequence from one generator seeded with `seed`.
/// This is the stream behind `pfml check --random`.
pub fn random_models(seed: u64, count: usize, shape: &ModelShape) -> Vec<Model> {
    let mut rng = seeded_rng(seed);
    (0..count).map(|_| random_model(&mut rng, shape)).collect()
}

pub fn random_valuation<R: Rng>(rng: &mut R, n: usize, max_den: u32) -> Vec<Rational> {
    (0..n).map(|_| random_unit_rational(rng, max_den)).collect()
}

/// Random concept of rank at most `max_rank`, with bounded syntactic depth.
pub fn random_concept<R: Rng>(
    rng: &mut R,
    atoms: &[String],
    role: &str,
    max_rank: usize,
    depth: usize,
    max_den: u32,
) -> Arc<Concept> {
    let leaf = |rng: &mut R| {
        if max_rank >= 1 && !atoms.is_empty() && rng.gen_bool(0.6) {
            Concept::atom(atoms.choose(rng).expect("non-empty"))
        } else {
            Concept::constant(random_unit_rational(rng, max_den))
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..7) {
        0 => leaf(rng),
        1 => Concept::neg(random_concept(rng, atoms, role, max_rank, depth - 1, max_den)),
        2 => Concept::trunc_sub(
            random_concept(rng, atoms, role, max_rank, depth - 1, max_den),
            random_unit_rational(rng, max_den),
        ),
        3 => Concept::and(
            random_concept(rng, atoms, role, max_rank, depth - 1, max_den),
            random_concept(rng, atoms, role, max_rank, depth - 1, max_den),
        ),
        4 => Concept::or(
            random_concept(rng, atoms, role, max_rank, depth - 1, max_den),
            random_concept(rng, atoms, role, max_rank, depth - 1, max_den),
        ),
        _ if max_rank >= 1 => Concept::dia(role, random_concept(rng, atoms, role, max_rank - 1, depth - 1, max_den)),
        _ => leaf(rng),
    }
}
