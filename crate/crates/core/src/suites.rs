//! Invariant suites over finite models, as run by the CLI `check` command.
//! Each suite either passes on a model or reports its first counterexample.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;

use crate::logic::{standard_translation, Concept};
use crate::lp::{solve_kantorovich_max, solve_transport_min, weak_duality_holds, Distribution};
use crate::metrics::{
    first_monotonicity_violation, kantorovich_chain, locality_check, wasserstein_chain, wasserstein_pair,
    GameEngine,
};
use crate::model::{disjoint_union, restrict, unravel, Model, DEFAULT_ROLE};
use crate::random::{random_concept, random_valuation, seeded_rng, WorkbenchRng};
use crate::rational::format_rational;
use crate::semantics::{apply_diamond, eval_concept, Valuation};
use crate::synthesis::SynthesisSession;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Duality,
    Coincidence,
    Monotone,
    Nonexpansive,
    Locality,
    Restrict,
    Unravel,
    Union,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Duality,
        Suite::Coincidence,
        Suite::Monotone,
        Suite::Nonexpansive,
        Suite::Locality,
        Suite::Restrict,
        Suite::Unravel,
        Suite::Union,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Duality => "duality",
            Suite::Coincidence => "coincidence",
            Suite::Monotone => "monotone",
            Suite::Nonexpansive => "nonexpansive",
            Suite::Locality => "locality",
            Suite::Restrict => "restrict",
            Suite::Unravel => "unravel",
            Suite::Union => "union",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub depth: usize,
    /// Support bound for coupling vertex enumeration in the game engine.
    pub vertex_bound: usize,
    /// Random samples per model for the sampling suites.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            depth: 3,
            vertex_bound: 5,
            samples: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub models: usize,
    pub passed: usize,
    /// `(model label, description)` of the first failing model.
    pub first_failure: Option<(String, String)>,
}

impl SuiteOutcome {
    pub fn all_passed(&self) -> bool {
        self.passed == self.models
    }
}

/// Runs `suite` on every labelled model, in order.
pub fn run_suite(suite: Suite, models: &[(String, Model)], options: &SuiteOptions) -> SuiteOutcome {
    let mut outcome = SuiteOutcome {
        suite,
        models: models.len(),
        passed: 0,
        first_failure: None,
    };
    for (i, (label, model)) in models.iter().enumerate() {
        let mut rng = seeded_rng(options.seed.wrapping_add(i as u64));
        match check_model(suite, model, options, &mut rng) {
            Ok(()) => outcome.passed += 1,
            Err(msg) => {
                if outcome.first_failure.is_none() {
                    outcome.first_failure = Some((label.clone(), msg));
                }
            }
        }
    }
    outcome
}

/// Runs one suite on one model; `Err` describes the first counterexample.
pub fn check_model(suite: Suite, model: &Model, options: &SuiteOptions, rng: &mut WorkbenchRng) -> Result<(), String> {
    match suite {
        Suite::Duality => duality(model, options.depth),
        Suite::Coincidence => coincidence(model, options),
        Suite::Monotone => monotone(model, options.depth),
        Suite::Nonexpansive => nonexpansive(model, options, rng),
        Suite::Locality => locality(model, options, rng),
        Suite::Restrict => restriction(model, options.depth),
        Suite::Unravel => unravelling(model, options.depth),
        Suite::Union => union(model, options.depth),
    }
}

fn name(model: &Model, s: usize) -> &str {
    model.state_name(s)
}

fn duality(model: &Model, depth: usize) -> Result<(), String> {
    let chain = wasserstein_chain(model, depth.saturating_sub(1));
    for k in 1..=depth {
        let ground = chain[k - 1].as_pair_table();
        for (role, rows) in model.roles() {
            for a in model.state_ids() {
                for b in model.state_ids() {
                    let (Some(l), Some(r)) = (Distribution::from_row(&rows[a]), Distribution::from_row(&rows[b])) else {
                        continue;
                    };
                    let (primal, coupling) = solve_transport_min(ground, &l, &r).map_err(|e| e.to_string())?;
                    let (dual, potential) = solve_kantorovich_max(ground, &l, &r).map_err(|e| e.to_string())?;
                    let at = format!("role {role}, rows of ({}, {}), ground d_{}", name(model, a), name(model, b), k - 1);
                    if primal != dual {
                        return Err(format!(
                            "{at}: transport {} != potential {}",
                            format_rational(&primal),
                            format_rational(&dual)
                        ));
                    }
                    if !coupling.has_marginals(&l, &r) {
                        return Err(format!("{at}: coupling has wrong marginals"));
                    }
                    if !potential.is_nonexpansive(ground) {
                        return Err(format!("{at}: potential is not non-expansive"));
                    }
                    if !weak_duality_holds(ground, &l, &r, &coupling, &potential) {
                        return Err(format!("{at}: weak duality violated"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn coincidence(model: &Model, options: &SuiteOptions) -> Result<(), String> {
    let w = wasserstein_chain(model, options.depth);
    let k = kantorovich_chain(model, options.depth);
    let mut game = GameEngine::with_bound(model, options.vertex_bound);
    let mut synth = SynthesisSession::new(model);
    for n in 0..=options.depth {
        let g = game.table(n).map_err(|e| format!("game engine at depth {n}: {e}"))?;
        for (a, b) in w[n].pairs() {
            let wv = w[n].get(a, b);
            let at = format!("depth {n}, pair ({}, {})", name(model, a), name(model, b));
            for (method, v) in [("kantorovich", k[n].get(a, b)), ("game", g.get(a, b))] {
                if v != wv {
                    return Err(format!(
                        "{at}: wasserstein {} != {method} {}",
                        format_rational(wv),
                        format_rational(v)
                    ));
                }
            }
            let cert = synth.certify(n, a, b).map_err(|e| format!("{at}: synthesis failed: {e}"))?;
            if !cert.valid() {
                return Err(format!(
                    "{at}: witness achieves {} of {}",
                    format_rational(&cert.achieved),
                    format_rational(&cert.target)
                ));
            }
        }
    }
    Ok(())
}

fn monotone(model: &Model, depth: usize) -> Result<(), String> {
    for chain in [wasserstein_chain(model, depth), kantorovich_chain(model, depth)] {
        for t in &chain {
            t.check_pseudometric()
                .map_err(|v| format!("{} table at depth {}: {v}", t.method, t.depth))?;
        }
        if let Some((k, a, b)) = first_monotonicity_violation(&chain) {
            return Err(format!(
                "d_{k}({}, {}) > d_{}",
                name(model, a),
                name(model, b),
                k + 1
            ));
        }
    }
    Ok(())
}

fn sample_concept(model: &Model, rng: &mut WorkbenchRng, max_rank: usize) -> Arc<Concept> {
    let atoms: Vec<String> = model.atom_names().map(str::to_string).collect();
    let role = model.role_names().next().unwrap_or(DEFAULT_ROLE).to_string();
    loop {
        let depth = rng.gen_range(0..=5);
        let c = random_concept(rng, &atoms, &role, max_rank, depth, 12);
        if c.roles_used().iter().all(|r| model.has_role(r)) {
            return c;
        }
    }
}

fn nonexpansive(model: &Model, options: &SuiteOptions, rng: &mut WorkbenchRng) -> Result<(), String> {
    let n = model.num_states();
    for (role, rows) in model.roles() {
        for _ in 0..options.samples {
            let f = Valuation::new(random_valuation(rng, n, 12));
            let g = Valuation::new(random_valuation(rng, n, 12));
            let before = f.sup_distance(&g);
            let after = apply_diamond(rows, &f).sup_distance(&apply_diamond(rows, &g));
            if after > before {
                return Err(format!(
                    "role {role}: |◇f - ◇g| = {} > |f - g| = {}",
                    format_rational(&after),
                    format_rational(&before)
                ));
            }
        }
    }
    let d = wasserstein_chain(model, options.depth);
    for _ in 0..options.samples {
        let c = sample_concept(model, rng, options.depth);
        let v = eval_concept(model, &c).map_err(|e| e.to_string())?;
        let table = &d[c.rank().min(options.depth)];
        for (a, b) in table.pairs() {
            let gap = crate::rational::abs_diff(&v[a], &v[b]);
            if gap > *table.get(a, b) {
                return Err(format!(
                    "concept {c} separates ({}, {}) by {} > d_{} = {}",
                    name(model, a),
                    name(model, b),
                    format_rational(&gap),
                    table.depth,
                    format_rational(table.get(a, b))
                ));
            }
        }
    }
    Ok(())
}

fn locality(model: &Model, options: &SuiteOptions, rng: &mut WorkbenchRng) -> Result<(), String> {
    for _ in 0..options.samples {
        let c = sample_concept(model, rng, options.depth);
        let phi = standard_translation(&c, "x");
        let k = c.rank();
        for a in model.state_ids() {
            let r = locality_check(model, a, &phi, k).map_err(|e| e.to_string())?;
            if !r.equal() {
                return Err(format!(
                    "{phi} at {} with k = {k}: {} on the model, {} on the neighbourhood",
                    name(model, a),
                    format_rational(&r.full),
                    format_rational(&r.restricted)
                ));
            }
        }
    }
    Ok(())
}

fn restriction(model: &Model, depth: usize) -> Result<(), String> {
    for k in 0..=depth {
        for a in model.state_ids() {
            let local = restrict(model, a, k).map_err(|e| e.to_string())?;
            let centre = local
                .state_index(model.state_name(a))
                .map_err(|e| e.to_string())?;
            let u = disjoint_union(&[model, &local]).map_err(|e| e.to_string())?;
            let d = wasserstein_pair(&u.model, k, u.injections[0][a], u.injections[1][centre]);
            if !d.is_zero() {
                return Err(format!(
                    "d_{k} between {} and its radius-{k} restriction is {}",
                    name(model, a),
                    format_rational(&d)
                ));
            }
        }
    }
    Ok(())
}

fn unravelling(model: &Model, depth: usize) -> Result<(), String> {
    for k in 0..=depth {
        for a in model.state_ids() {
            let tree = unravel(model, a, k).map_err(|e| e.to_string())?;
            let u = disjoint_union(&[model, &tree.model]).map_err(|e| e.to_string())?;
            for n in 0..=k {
                let d = wasserstein_pair(&u.model, n, u.injections[0][a], u.injections[1][tree.root]);
                if !d.is_zero() {
                    return Err(format!(
                        "d_{n} between {} and the root of its depth-{k} unravelling is {}",
                        name(model, a),
                        format_rational(&d)
                    ));
                }
            }
        }
    }
    Ok(())
}

fn union(model: &Model, depth: usize) -> Result<(), String> {
    let u = disjoint_union(&[model, model]).map_err(|e| e.to_string())?;
    let inside = wasserstein_chain(model, depth);
    let across = wasserstein_chain(&u.model, depth);
    let (left, right) = (&u.injections[0], &u.injections[1]);
    for n in 0..=depth {
        for (a, b) in inside[n].pairs() {
            let copy = across[n].get(left[a], right[a]);
            if !copy.is_zero() {
                return Err(format!(
                    "d_{n} between the two copies of {} is {}",
                    name(model, a),
                    format_rational(copy)
                ));
            }
            if across[n].get(left[a], right[b]) != inside[n].get(a, b) {
                return Err(format!(
                    "d_{n}({}, {}) changes under disjoint union",
                    name(model, a),
                    name(model, b)
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::m1;

    fn fixture() -> Vec<(String, Model)> {
        vec![("m1".to_string(), m1())]
    }

    #[test]
    fn every_suite_passes_on_m1() {
        let options = SuiteOptions {
            depth: 2,
            samples: 30,
            ..SuiteOptions::default()
        };
        for suite in Suite::ALL {
            let out = run_suite(suite, &fixture(), &options);
            assert!(out.all_passed(), "{suite}: {:?}", out.first_failure);
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("nonsense".parse::<Suite>().is_err());
    }

    #[test]
    fn monotone_to_depth_five_on_m1() {
        assert_eq!(monotone(&m1(), 5), Ok(()));
    }
}
