//! Strategy extraction and exhaustive replay for the n-round game.
//!
//! A round at `(a, b, ε)` with rounds remaining: Spoiler wins at once if some
//! atom deviates by more than ε. Otherwise Spoiler names a role; if both
//! rows are blocking, or ε = 1, Duplicator wins; if exactly one row is
//! blocking Spoiler wins. Else Duplicator announces a coupling μ of the rows
//! and deviations ε' with E_μ(ε') ≤ ε, Spoiler picks a μ-positive pair and
//! play continues there with the deviation assigned to it. Duplicator wins
//! every 0-round game.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::GameEngine;
use crate::lp::{Coupling, Distribution, LpError, PairTable};
use crate::model::{Model, StateId};
use crate::rational::{abs_diff, format_rational, in_unit_interval, one, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameConfig {
    pub left: StateId,
    pub right: StateId,
    pub epsilon: Rational,
    pub rounds: usize,
}

impl fmt::Display for GameConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}) with {} rounds left",
            self.left,
            self.right,
            format_rational(&self.epsilon),
            self.rounds
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicatorMove {
    pub coupling: Coupling,
    pub deviation: BTreeMap<(StateId, StateId), Rational>,
}

impl DuplicatorMove {
    pub fn spent(&self) -> Rational {
        self.coupling
            .expect(|x, y| self.deviation.get(&(x, y)).cloned().unwrap_or_else(Rational::zero))
    }
}

/// Positional Duplicator strategy: one move per (left, right, rounds left)
/// and role. The move does not depend on the current ε; replay checks that
/// it is affordable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DuplicatorStrategy {
    moves: BTreeMap<(StateId, StateId, usize), BTreeMap<String, DuplicatorMove>>,
}

impl DuplicatorStrategy {
    pub fn insert(&mut self, left: StateId, right: StateId, rounds: usize, role: &str, mv: DuplicatorMove) {
        self.moves
            .entry((left, right, rounds))
            .or_default()
            .insert(role.to_string(), mv);
    }

    pub fn move_at(&self, left: StateId, right: StateId, rounds: usize, role: &str) -> Option<&DuplicatorMove> {
        self.moves.get(&(left, right, rounds)).and_then(|m| m.get(role))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((StateId, StateId, usize), &str, &DuplicatorMove)> + '_ {
        self.moves
            .iter()
            .flat_map(|(k, m)| m.iter().map(move |(role, mv)| (*k, role.as_str(), mv)))
    }

    /// Number of stored moves.
    pub fn len(&self) -> usize {
        self.moves.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Spoiler strategy driven by the game value tables: it names the role
/// with the largest lifted value, and answers any Duplicator move with a
/// μ-positive pair maximising `V(pair) - ε'(pair)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpoilerStrategy {
    values: Vec<PairTable>,
    roles: BTreeMap<(StateId, StateId, usize), String>,
}

impl SpoilerStrategy {
    pub fn depth(&self) -> usize {
        self.values.len() - 1
    }

    pub fn role_at(&self, left: StateId, right: StateId, rounds: usize) -> Option<&str> {
        self.roles.get(&(left, right, rounds)).map(String::as_str)
    }

    /// Spoiler's pick against a move made with `rounds` rounds left.
    pub fn respond(&self, rounds: usize, mv: &DuplicatorMove) -> Option<(StateId, StateId)> {
        let child = &self.values[rounds - 1];
        let mut best: Option<(Rational, (StateId, StateId))> = None;
        for (pair, _) in mv.coupling.iter() {
            let eps = mv.deviation.get(&pair).cloned().unwrap_or_else(Rational::zero);
            let gain = child.get(pair.0, pair.1) - eps;
            if best.as_ref().is_none_or(|(g, _)| gain > *g) {
                best = Some((gain, pair));
            }
        }
        best.map(|(_, p)| p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Duplicator(DuplicatorStrategy),
    Spoiler(SpoilerStrategy),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("strategy has no move for ({left}, {right}) with {rounds} rounds left on role {role:?}")]
    IncompleteStrategy {
        left: StateId,
        right: StateId,
        rounds: usize,
        role: String,
    },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Why the verified player lost a play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureReason {
    AtomBreach { atom: String, deviation: Rational },
    OneBlocking { role: String },
    NotACoupling { role: String },
    DeviationOutOfRange { role: String, pair: (StateId, StateId) },
    OverBudget { role: String, spent: Rational },
    RoundsExhausted,
    BothBlocking { role: String },
    FullBudget,
    NoResponse { role: String },
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AtomBreach { atom, deviation } => {
                write!(f, "atom {atom} deviates by {}", format_rational(deviation))
            }
            Self::OneBlocking { role } => write!(f, "exactly one state is blocking on {role}"),
            Self::NotACoupling { role } => write!(f, "announced measure on {role} is not a coupling"),
            Self::DeviationOutOfRange { role, pair } => {
                write!(f, "deviation for {pair:?} on {role} is missing or outside [0,1]")
            }
            Self::OverBudget { role, spent } => {
                write!(f, "deviation on {role} costs {} which exceeds the budget", format_rational(spent))
            }
            Self::RoundsExhausted => f.write_str("no rounds left"),
            Self::BothBlocking { role } => write!(f, "both states are blocking on {role}"),
            Self::FullBudget => f.write_str("deviation budget is 1"),
            Self::NoResponse { role } => write!(f, "no μ-positive pair to pick on {role}"),
        }
    }
}

/// Result of an exhaustive replay; on failure `trace` is the play that
/// defeats the verified strategy, ending at the losing configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub wins: bool,
    pub trace: Vec<GameConfig>,
    pub reason: Option<FailureReason>,
}

impl Verdict {
    fn win() -> Self {
        Self {
            wins: true,
            trace: Vec::new(),
            reason: None,
        }
    }

    fn loss(at: GameConfig, reason: FailureReason) -> Self {
        Self {
            wins: false,
            trace: vec![at],
            reason: Some(reason),
        }
    }

    fn behind(mut self, at: GameConfig) -> Self {
        self.trace.insert(0, at);
        self
    }
}

fn atom_breach(model: &Model, a: StateId, b: StateId, eps: &Rational) -> Option<FailureReason> {
    model.atoms().find_map(|(name, vals)| {
        let deviation = abs_diff(&vals[a], &vals[b]);
        (deviation > *eps).then(|| FailureReason::AtomBreach {
            atom: name.to_string(),
            deviation,
        })
    })
}

/// Extracts a Duplicator strategy if `ε ≥ V_n(a,b)`, a Spoiler strategy
/// otherwise.
pub fn extract_strategy(
    engine: &mut GameEngine<'_>,
    n: usize,
    a: StateId,
    b: StateId,
    eps: &Rational,
) -> Result<Strategy, StrategyError> {
    if *eps >= engine.value(n, a, b)? {
        Ok(Strategy::Duplicator(extract_duplicator(engine, n, a, b)?))
    } else {
        Ok(Strategy::Spoiler(extract_spoiler(engine, n)?))
    }
}

/// Optimal vertex couplings with the child game values as deviations, for
/// every configuration reachable from `(a, b)` with `n` rounds left.
pub fn extract_duplicator(
    engine: &mut GameEngine<'_>,
    n: usize,
    a: StateId,
    b: StateId,
) -> Result<DuplicatorStrategy, StrategyError> {
    let model = engine.model();
    let roles: Vec<String> = model.role_names().map(str::to_string).collect();
    let mut strategy = DuplicatorStrategy::default();
    let mut seen = BTreeSet::new();
    let mut todo = vec![(a, b, n)];
    while let Some((x, y, k)) = todo.pop() {
        if k == 0 || !seen.insert((x, y, k)) {
            continue;
        }
        let child = engine.values_at(k - 1)?.clone();
        for role in &roles {
            let (_, mu) = engine.role_value(role, &child, x, y)?;
            let Some(mu) = mu else { continue };
            let deviation = mu
                .iter()
                .map(|((p, q), _)| ((p, q), child.get(p, q).clone()))
                .collect();
            for ((p, q), _) in mu.iter() {
                todo.push((p, q, k - 1));
            }
            strategy.insert(x, y, k, role, DuplicatorMove { coupling: mu, deviation });
        }
    }
    Ok(strategy)
}

pub fn extract_spoiler(engine: &mut GameEngine<'_>, n: usize) -> Result<SpoilerStrategy, StrategyError> {
    let model = engine.model();
    let roles: Vec<String> = model.role_names().map(str::to_string).collect();
    let size = model.num_states();
    let mut values = Vec::with_capacity(n + 1);
    for k in 0..=n {
        values.push(engine.values_at(k)?.clone());
    }
    let mut chosen = BTreeMap::new();
    for k in 1..=n {
        for x in 0..size {
            for y in 0..size {
                let mut best: Option<(Rational, &String)> = None;
                for role in &roles {
                    let (v, _) = engine.role_value(role, &values[k - 1], x, y)?;
                    if best.as_ref().is_none_or(|(b, _)| v > *b) {
                        best = Some((v, role));
                    }
                }
                if let Some((_, role)) = best {
                    chosen.insert((x, y, k), role.clone());
                }
            }
        }
    }
    Ok(SpoilerStrategy { values, roles: chosen })
}

/// Replays `strategy` from `config` against every Spoiler choice.
pub fn verify_duplicator(
    model: &Model,
    strategy: &DuplicatorStrategy,
    config: &GameConfig,
) -> Result<Verdict, StrategyError> {
    let mut won = HashMap::new();
    duplicator_replay(model, strategy, config, &mut won)
}

fn duplicator_replay(
    model: &Model,
    strategy: &DuplicatorStrategy,
    at: &GameConfig,
    won: &mut HashMap<GameConfig, ()>,
) -> Result<Verdict, StrategyError> {
    if at.rounds == 0 || won.contains_key(at) {
        return Ok(Verdict::win());
    }
    let (a, b, eps) = (at.left, at.right, &at.epsilon);
    if let Some(reason) = atom_breach(model, a, b, eps) {
        return Ok(Verdict::loss(at.clone(), reason));
    }
    for (role, rows) in model.roles() {
        let (la, lb) = (&rows[a], &rows[b]);
        if (la.is_blocking() && lb.is_blocking()) || eps.is_one() {
            continue;
        }
        if la.is_blocking() || lb.is_blocking() {
            return Ok(Verdict::loss(at.clone(), FailureReason::OneBlocking { role: role.into() }));
        }
        let mv = strategy
            .move_at(a, b, at.rounds, role)
            .ok_or_else(|| StrategyError::IncompleteStrategy {
                left: a,
                right: b,
                rounds: at.rounds,
                role: role.into(),
            })?;
        let marginals = (Distribution::from_row(la), Distribution::from_row(lb));
        let legal = match &marginals {
            (Some(l), Some(r)) => mv.coupling.has_marginals(l, r),
            _ => false,
        };
        if !legal {
            return Ok(Verdict::loss(at.clone(), FailureReason::NotACoupling { role: role.into() }));
        }
        for (pair, _) in mv.coupling.iter() {
            if !mv.deviation.get(&pair).is_some_and(in_unit_interval) {
                return Ok(Verdict::loss(
                    at.clone(),
                    FailureReason::DeviationOutOfRange { role: role.into(), pair },
                ));
            }
        }
        let spent = mv.spent();
        if spent > *eps {
            return Ok(Verdict::loss(at.clone(), FailureReason::OverBudget { role: role.into(), spent }));
        }
        for (pair, _) in mv.coupling.iter() {
            let next = GameConfig {
                left: pair.0,
                right: pair.1,
                epsilon: mv.deviation[&pair].clone(),
                rounds: at.rounds - 1,
            };
            let v = duplicator_replay(model, strategy, &next, won)?;
            if !v.wins {
                return Ok(v.behind(at.clone()));
            }
        }
    }
    won.insert(at.clone(), ());
    Ok(Verdict::win())
}

/// Replays `strategy` from `config` against a finite family of Duplicator
/// moves: every coupling vertex, each paired with a spread of affordable
/// deviation assignments (uniform, concentrated on one pair, proportional
/// to the child values, and child values lowered on one pair).
pub fn verify_spoiler(
    engine: &mut GameEngine<'_>,
    strategy: &SpoilerStrategy,
    config: &GameConfig,
) -> Result<Verdict, StrategyError> {
    let mut won = HashMap::new();
    spoiler_replay(engine, strategy, config, &mut won)
}

fn spoiler_replay(
    engine: &mut GameEngine<'_>,
    strategy: &SpoilerStrategy,
    at: &GameConfig,
    won: &mut HashMap<GameConfig, ()>,
) -> Result<Verdict, StrategyError> {
    if won.contains_key(at) {
        return Ok(Verdict::win());
    }
    if at.rounds == 0 {
        return Ok(Verdict::loss(at.clone(), FailureReason::RoundsExhausted));
    }
    let model = engine.model();
    let (a, b, eps) = (at.left, at.right, &at.epsilon);
    if atom_breach(model, a, b, eps).is_some() {
        won.insert(at.clone(), ());
        return Ok(Verdict::win());
    }
    let role = strategy
        .role_at(a, b, at.rounds)
        .ok_or_else(|| StrategyError::IncompleteStrategy {
            left: a,
            right: b,
            rounds: at.rounds,
            role: String::new(),
        })?
        .to_string();
    let rows = model.role(&role).expect("strategy roles come from the model");
    match (rows[a].is_blocking(), rows[b].is_blocking()) {
        (true, true) => return Ok(Verdict::loss(at.clone(), FailureReason::BothBlocking { role })),
        _ if eps.is_one() => return Ok(Verdict::loss(at.clone(), FailureReason::FullBudget)),
        (true, false) | (false, true) => {
            won.insert(at.clone(), ());
            return Ok(Verdict::win());
        }
        (false, false) => {}
    }
    let child = strategy.values[at.rounds - 1].clone();
    let vertices = engine
        .vertices(&role, a, b)?
        .expect("both rows are proper")
        .to_vec();
    for mu in vertices {
        for deviation in adversary_deviations(&mu, &child, eps) {
            let mv = DuplicatorMove {
                coupling: mu.clone(),
                deviation,
            };
            let Some(pair) = strategy.respond(at.rounds, &mv) else {
                return Ok(Verdict::loss(at.clone(), FailureReason::NoResponse { role }));
            };
            let next = GameConfig {
                left: pair.0,
                right: pair.1,
                epsilon: mv.deviation.get(&pair).cloned().unwrap_or_else(Rational::zero),
                rounds: at.rounds - 1,
            };
            let v = spoiler_replay(engine, strategy, &next, won)?;
            if !v.wins {
                return Ok(v.behind(at.clone()));
            }
        }
    }
    won.insert(at.clone(), ());
    Ok(Verdict::win())
}

/// Affordable deviation assignments on the support of `mu`.
fn adversary_deviations(
    mu: &Coupling,
    child: &PairTable,
    eps: &Rational,
) -> Vec<BTreeMap<(StateId, StateId), Rational>> {
    let support = mu.support();
    let mut out = Vec::new();
    let constant = |v: &Rational| support.iter().map(|&p| (p, v.clone())).collect::<BTreeMap<_, _>>();
    out.push(constant(&Rational::zero()));
    out.push(constant(eps));
    for (p, w) in mu.iter() {
        let mut d = constant(&Rational::zero());
        d.insert(p, (eps / w).min(one()));
        out.push(d);
    }
    let values: BTreeMap<_, _> = support
        .iter()
        .map(|&(x, y)| ((x, y), child.get(x, y).clone()))
        .collect();
    let total = mu.expect(|x, y| child.get(x, y).clone());
    if total.is_positive() {
        let scale = (eps / &total).min(one());
        out.push(values.iter().map(|(k, v)| (*k, v * &scale)).collect());
        for (p, w) in mu.iter() {
            let lowered = &values[&p] - (&total - eps) / w;
            if !lowered.is_negative() {
                let mut d = values.clone();
                d.insert(p, lowered.min(one()));
                out.push(d);
            }
        }
    }
    out.retain(|d| {
        d.values().all(in_unit_interval)
            && mu.expect(|x, y| d.get(&(x, y)).cloned().unwrap_or_else(Rational::zero)) <= *eps
    });
    out.sort();
    out.dedup();
    out
}
