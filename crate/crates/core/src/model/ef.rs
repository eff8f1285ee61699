//! Partial isomorphisms and replay of scripted Ehrenfeucht–Fraïssé plays.

use num_traits::Zero;

use super::{Model, ModelError, StateId};
use crate::rational::Rational;

fn atom_value(model: &Model, atom: &str, s: StateId) -> Rational {
    model.atom(atom).map(|v| v[s].clone()).unwrap_or_else(|_| Rational::zero())
}

/// True iff `(ā, b̄)` agree on equality pattern, on every atom value and on
/// every role probability between tuple members. Atoms and roles missing on
/// one side read as zero there.
pub fn is_partial_isomorphism(
    left: &Model,
    right: &Model,
    a: &[StateId],
    b: &[StateId],
) -> Result<bool, ModelError> {
    if a.len() != b.len() {
        return Err(ModelError::LengthMismatch(a.len(), b.len()));
    }
    for (&x, &y) in a.iter().zip(b) {
        if x >= left.num_states() {
            return Err(ModelError::UnknownState(format!("#{x}")));
        }
        if y >= right.num_states() {
            return Err(ModelError::UnknownState(format!("#{y}")));
        }
    }
    let mut atoms: Vec<&str> = left.atom_names().chain(right.atom_names()).collect();
    atoms.sort_unstable();
    atoms.dedup();
    let mut roles: Vec<&str> = left.role_names().chain(right.role_names()).collect();
    roles.sort_unstable();
    roles.dedup();

    for i in 0..a.len() {
        for atom in &atoms {
            if atom_value(left, atom, a[i]) != atom_value(right, atom, b[i]) {
                return Ok(false);
            }
        }
        for j in 0..a.len() {
            if (a[i] == a[j]) != (b[i] == b[j]) {
                return Ok(false);
            }
            for role in &roles {
                let p = left.role(role).map(|r| r[a[i]].prob(a[j])).unwrap_or_else(|_| Rational::zero());
                let q = right.role(role).map(|r| r[b[i]].prob(b[j])).unwrap_or_else(|_| Rational::zero());
                if p != q {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Outcome of replaying a scripted sequence of standard rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EfReplay {
    /// Every configuration, initial one included, was a partial isomorphism.
    DuplicatorSurvives,
    /// The configuration after `round` moves (0 = initial) broke the predicate.
    SpoilerWinsAt { round: usize },
}

/// Replays standard rounds: each move extends both tuples by one state.
pub fn replay_standard_rounds(
    left: &Model,
    right: &Model,
    a0: &[StateId],
    b0: &[StateId],
    moves: &[(StateId, StateId)],
) -> Result<EfReplay, ModelError> {
    let mut a = a0.to_vec();
    let mut b = b0.to_vec();
    if !is_partial_isomorphism(left, right, &a, &b)? {
        return Ok(EfReplay::SpoilerWinsAt { round: 0 });
    }
    for (round, &(x, y)) in moves.iter().enumerate() {
        a.push(x);
        b.push(y);
        if !is_partial_isomorphism(left, right, &a, &b)? {
            return Ok(EfReplay::SpoilerWinsAt { round: round + 1 });
        }
    }
    Ok(EfReplay::DuplicatorSurvives)
}
