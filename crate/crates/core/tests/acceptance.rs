//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. All comparisons are exact rational equalities or
//! inequalities; there are no tolerances.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use pfml::logic::{enumerate_concepts, parse_formula, standard_translation};
use pfml::lp::{
    enumerate_transport_vertices_bounded, solve_kantorovich_max, solve_transport_min, weak_duality_holds,
    Distribution, PairTable, Potential,
};
use pfml::metrics::{
    extract_strategy, kantorovich_chain, locality_check, verify_duplicator, verify_spoiler, wasserstein_chain,
    wasserstein_pair, GameConfig, GameEngine, Strategy,
};
use pfml::model::{disjoint_union, restrict, unravel};
use pfml::random::{random_concept, random_models, random_unit_rational, random_valuation, seeded_rng, ModelShape};
use pfml::rational::{abs_diff, format_rational, one, ratio};
use pfml::semantics::{apply_diamond, eval_concept, eval_formula, Environment, Valuation};
use pfml::synthesis::SynthesisSession;
use pfml::{Model, Rational};

const FIXTURES: [&str; 4] = ["m1", "m2", "m3", "m4"];

fn fixture(name: &str) -> Model {
    let path = format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    Model::from_json_str(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn fixtures() -> Vec<(String, Model)> {
    FIXTURES.iter().map(|n| (n.to_string(), fixture(n))).collect()
}

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Wasserstein, Kantorovich, game and synthesised witnesses agree exactly.
fn metric_coincidence() -> Outcome {
    let start = Instant::now();
    let models = random_models(7, 100, &ModelShape::default());
    let mut pairs = 0usize;
    for (i, m) in models.iter().enumerate() {
        let w = wasserstein_chain(m, 3);
        let k = kantorovich_chain(m, 3);
        let mut game = GameEngine::with_bound(m, 5);
        let mut synth = SynthesisSession::new(m);
        for n in 0..=3 {
            let g = game.table(n).map_err(|e| format!("model {i}: {e}"))?;
            for (a, b) in w[n].pairs() {
                pairs += 1;
                let wv = w[n].get(a, b);
                check(k[n].get(a, b) == wv && g.get(a, b) == wv, || {
                    format!(
                        "model {i} depth {n} pair ({a},{b}): W {} K {} G {}",
                        format_rational(wv),
                        format_rational(k[n].get(a, b)),
                        format_rational(g.get(a, b))
                    )
                })?;
                let cert = synth.certify(n, a, b).map_err(|e| format!("model {i}: {e}"))?;
                check(cert.achieved == *wv && cert.concept.rank() <= n, || {
                    format!(
                        "model {i} depth {n} pair ({a},{b}): witness achieves {} of {}",
                        format_rational(&cert.achieved),
                        format_rational(wv)
                    )
                })?;
            }
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("100 models, {pairs} pair/depth checks, under the 120s budget"))
}

fn random_distribution<R: Rng>(rng: &mut R, points: usize, max_support: usize) -> Distribution {
    let mut all: Vec<usize> = (0..points).collect();
    all.shuffle(rng);
    all.truncate(rng.gen_range(1..=max_support.min(points)));
    let weights: Vec<Rational> = all.iter().map(|_| random_unit_rational(rng, 12) + ratio(1, 12)).collect();
    let total: Rational = weights.iter().sum();
    Distribution::new(all.into_iter().zip(weights).map(|(x, w)| (x, w / &total))).unwrap()
}

/// Random `[0,1]` weights closed under shortest paths: a pseudometric.
fn random_pseudometric<R: Rng>(rng: &mut R, n: usize) -> PairTable {
    let mut t = PairTable::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = if rng.gen_ratio(1, 8) { Rational::zero() } else { random_unit_rational(rng, 12) };
            t.set_symmetric(i, j, v);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = t.get(i, k) + t.get(k, j);
                if via < *t.get(i, j) {
                    t.set(i, j, via);
                }
            }
        }
    }
    t
}

/// Primal and dual optima coincide; weak duality never fails.
fn kr_duality() -> Outcome {
    let mut rng = seeded_rng(2);
    let mut weak_checks = 0usize;
    for inst in 0..500 {
        let points = rng.gen_range(1..=7);
        let ground = random_pseudometric(&mut rng, points);
        let l = random_distribution(&mut rng, points, 5);
        let r = random_distribution(&mut rng, points, 5);
        let (primal, coupling) = solve_transport_min(&ground, &l, &r).map_err(|e| e.to_string())?;
        let (dual, potential) = solve_kantorovich_max(&ground, &l, &r).map_err(|e| e.to_string())?;
        check(primal == dual, || {
            format!("instance {inst}: primal {} dual {}", format_rational(&primal), format_rational(&dual))
        })?;
        check(coupling.has_marginals(&l, &r), || format!("instance {inst}: coupling marginals"))?;
        check(potential.is_nonexpansive(&ground), || format!("instance {inst}: potential infeasible"))?;
        // every vertex coupling against the optimal and a few random feasible potentials
        let extended = Potential::new(potential.extend(&ground).into_iter().enumerate());
        let mut potentials = vec![potential.clone(), extended];
        {
            let seed = Potential::new([(rng.gen_range(0..points), random_unit_rational(&mut rng, 6))]);
            potentials.push(Potential::new(seed.extend(&ground).into_iter().enumerate()));
        }
        let vertices = enumerate_transport_vertices_bounded(&l, &r, 5).map_err(|e| e.to_string())?;
        for f in &potentials {
            check(f.is_nonexpansive(&ground), || format!("instance {inst}: extension infeasible"))?;
            for mu in vertices.iter().chain(std::iter::once(&coupling)) {
                weak_checks += 1;
                check(weak_duality_holds(&ground, &l, &r, mu, f), || {
                    format!("instance {inst}: weak duality fails")
                })?;
            }
        }
    }
    Ok(format!("500 instances, {weak_checks} weak-duality checks"))
}

/// `‖◇f − ◇g‖∞ ≤ ‖f − g‖∞`.
fn diamond_nonexpansive() -> Outcome {
    let mut rng = seeded_rng(3);
    let mut total = 0;
    for (name, m) in fixtures() {
        for (role, rows) in m.roles() {
            for _ in 0..200 {
                let f = Valuation::new(random_valuation(&mut rng, m.num_states(), 12));
                let g = Valuation::new(random_valuation(&mut rng, m.num_states(), 12));
                let lhs = apply_diamond(rows, &f).sup_distance(&apply_diamond(rows, &g));
                check(lhs <= f.sup_distance(&g), || format!("{name} role {role}"))?;
                total += 1;
            }
        }
    }
    Ok(format!("{total} valuation pairs over {} fixtures", FIXTURES.len()))
}

/// Concepts of rank ≤ 3 never separate states by more than `d_3`.
fn rank_invariance() -> Outcome {
    let mut rng = seeded_rng(4);
    let models = random_models(41, 30, &ModelShape::default());
    let grid = [ratio(0, 1), ratio(1, 2), ratio(1, 1)];
    let atoms = ["A".to_string(), "B".to_string()];
    let pool: Vec<_> = enumerate_concepts(&atoms, &["r".to_string()], 3, 6, &grid).collect();
    let deep = pool.iter().filter(|c| c.rank() == 3).count();
    check(deep > 0, || "enumeration produced no rank-3 concepts".into())?;
    for (i, m) in models.iter().enumerate() {
        let d = wasserstein_chain(m, 3);
        for c in pool.choose_multiple(&mut rng, 200) {
            let v = eval_concept(m, c).map_err(|e| e.to_string())?;
            for (a, b) in d[3].pairs() {
                let gap = abs_diff(&v[a], &v[b]);
                check(gap <= *d[3].get(a, b) && gap <= *d[c.rank()].get(a, b), || {
                    format!("model {i}, concept {c}, pair ({a},{b})")
                })?;
            }
        }
    }
    Ok(format!("30 models x 200 of {} enumerated concepts ({deep} of rank 3)", pool.len()))
}

/// Extracted strategies win exactly where the value says they should.
fn strategy_soundness() -> Outcome {
    let mut verified = 0;
    for (name, m) in fixtures() {
        let mut engine = GameEngine::with_bound(&m, 5);
        for n in 0..=3 {
            let d = wasserstein_chain(&m, n).pop().unwrap();
            for a in m.state_ids() {
                for b in m.state_ids() {
                    let value = d.get(a, b).clone();
                    let at = |eps: &Rational| GameConfig {
                        left: a,
                        right: b,
                        epsilon: eps.clone(),
                        rounds: n,
                    };
                    match extract_strategy(&mut engine, n, a, b, &value).map_err(|e| e.to_string())? {
                        Strategy::Duplicator(s) => {
                            let v = verify_duplicator(&m, &s, &at(&value)).map_err(|e| e.to_string())?;
                            check(v.wins, || format!("{name} n={n} ({a},{b}): Duplicator loses: {:?}", v.reason))?;
                        }
                        Strategy::Spoiler(_) => return Err(format!("{name} n={n} ({a},{b}): no Duplicator strategy at the value")),
                    }
                    verified += 1;
                    if value.is_positive() {
                        let below = (&value - ratio(1, 100)).max(Rational::zero());
                        for eps in [below, Rational::zero()] {
                            let Strategy::Spoiler(s) =
                                extract_strategy(&mut engine, n, a, b, &eps).map_err(|e| e.to_string())?
                            else {
                                return Err(format!("{name} n={n} ({a},{b}): no Spoiler strategy below the value"));
                            };
                            let v = verify_spoiler(&mut engine, &s, &at(&eps)).map_err(|e| e.to_string())?;
                            check(v.wins, || {
                                format!("{name} n={n} ({a},{b}) eps={}: Spoiler loses: {:?}", format_rational(&eps), v.reason)
                            })?;
                            verified += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{verified} strategies verified by replay"))
}

/// Neighbourhoods and unravellings are indistinguishable at the right depth.
fn restriction_unravelling() -> Outcome {
    let mut models = fixtures();
    models.extend(
        random_models(61, 50, &ModelShape::default())
            .into_iter()
            .enumerate()
            .map(|(i, m)| (format!("random {i}"), m)),
    );
    for (name, m) in &models {
        for k in 0..=3 {
            for a in m.state_ids() {
                let local = restrict(m, a, k).map_err(|e| e.to_string())?;
                let centre = local.state_index(m.state_name(a)).map_err(|e| e.to_string())?;
                let u = disjoint_union(&[m, &local]).map_err(|e| e.to_string())?;
                let d = wasserstein_pair(&u.model, k, u.injections[0][a], u.injections[1][centre]);
                check(d.is_zero(), || format!("{name}: restrict k={k} at {a} gives {}", format_rational(&d)))?;

                let tree = unravel(m, a, k).map_err(|e| e.to_string())?;
                let u = disjoint_union(&[m, &tree.model]).map_err(|e| e.to_string())?;
                for n in 0..=k {
                    let d = wasserstein_pair(&u.model, n, u.injections[0][a], u.injections[1][tree.root]);
                    check(d.is_zero(), || {
                        format!("{name}: unravel k={k} n={n} at {a} gives {}", format_rational(&d))
                    })?;
                }
            }
        }
    }
    let m1 = fixture("m1");
    let a = m1.state_index("a").unwrap();
    let local = restrict(&m1, a, 1).unwrap();
    let u = disjoint_union(&[&m1, &local]).unwrap();
    let d = wasserstein_pair(&u.model, 2, u.injections[0][a], u.injections[1][0]);
    check(d == ratio(1, 2), || format!("m1 restrict tightness: {}", format_rational(&d)))?;
    let tree = unravel(&m1, a, 2).unwrap();
    let u = disjoint_union(&[&m1, &tree.model]).unwrap();
    let d = wasserstein_pair(&u.model, 3, u.injections[0][a], u.injections[1][tree.root]);
    check(d == ratio(1, 2), || format!("m1 unravel tightness: {}", format_rational(&d)))?;
    Ok(format!("{} models, k <= 3; m1 tightness values 1/2 and 1/2", models.len()))
}

/// Standard translations of rank-k concepts are k-local; `∃y.A(y)` is not.
fn locality() -> Outcome {
    let mut rng = seeded_rng(7);
    let mut models = fixtures();
    models.extend(
        random_models(71, 10, &ModelShape::default())
            .into_iter()
            .map(|m| ("random".to_string(), m)),
    );
    let atoms = ["A".to_string(), "B".to_string()];
    for i in 0..100 {
        let c = random_concept(&mut rng, &atoms, "r", 2, 4, 12);
        let phi = standard_translation(&c, "x");
        for (name, m) in &models {
            if !c.atoms_used().iter().all(|a| m.atom(a).is_ok()) {
                continue;
            }
            for a in m.state_ids() {
                let r = locality_check(m, a, &phi, c.rank()).map_err(|e| e.to_string())?;
                check(r.equal(), || format!("concept {i} ({c}) on {name} at {a}"))?;
            }
        }
    }
    let m1 = fixture("m1");
    let c = m1.state_index("c").unwrap();
    let r = locality_check(&m1, c, &parse_formula("E y. A(y)").unwrap(), 1).map_err(|e| e.to_string())?;
    check(r.full == one() && r.restricted == ratio(3, 10), || {
        format!(
            "control gave {} vs {}",
            format_rational(&r.full),
            format_rational(&r.restricted)
        )
    })?;
    Ok("100 concepts of rank <= 2 local; control 1 vs 3/10 non-local".into())
}

/// `C(a) = ST_x(C)(a)`.
fn standard_translation_agreement() -> Outcome {
    let mut rng = seeded_rng(8);
    let models = random_models(81, 50, &ModelShape::default());
    let atoms = ["A".to_string(), "B".to_string()];
    for i in 0..500 {
        let m = &models[i % models.len()];
        let c = random_concept(&mut rng, &atoms, "r", 4, 6, 12);
        let a = rng.gen_range(0..m.num_states());
        let direct = eval_concept(m, &c).map_err(|e| e.to_string())?[a].clone();
        let env = Environment::from([("x".to_string(), a)]);
        let translated = eval_formula(m, &standard_translation(&c, "x"), &env).map_err(|e| e.to_string())?;
        check(direct == translated, || format!("sample {i}: {c} at {a}"))?;
    }
    Ok("500 concept/state pairs".into())
}

/// Every table is a pseudometric and the chain is nondecreasing.
fn chain_axioms() -> Outcome {
    let shape = ModelShape {
        max_states: 6,
        ..ModelShape::default()
    };
    let mut models = fixtures();
    models.extend(
        random_models(91, 30, &shape)
            .into_iter()
            .enumerate()
            .map(|(i, m)| (format!("random {i}"), m)),
    );
    let mut tables = 0;
    for (name, m) in &models {
        let mut engine = GameEngine::with_bound(m, 6);
        let mut game = Vec::new();
        for n in 0..=5 {
            game.push(engine.table(n).map_err(|e| format!("{name}: {e}"))?);
        }
        for chain in [wasserstein_chain(m, 5), kantorovich_chain(m, 5), game] {
            for t in &chain {
                t.check_pseudometric()
                    .map_err(|v| format!("{name} {} depth {}: {v}", t.method, t.depth))?;
                tables += 1;
            }
            for w in chain.windows(2) {
                check(w[0].first_exceeding(&w[1]).is_none(), || {
                    format!("{name} {} not monotone at depth {}", w[0].method, w[0].depth)
                })?;
            }
        }
    }
    Ok(format!("{tables} tables over {} models", models.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("metric coincidence", metric_coincidence),
        ("Kantorovich-Rubinstein duality", kr_duality),
        ("diamond non-expansiveness", diamond_nonexpansive),
        ("rank-n invariance", rank_invariance),
        ("game strategy soundness", strategy_soundness),
        ("restriction and unravelling", restriction_unravelling),
        ("locality of modal formulas", locality),
        ("standard translation", standard_translation_agreement),
        ("chain monotonicity and pseudometric axioms", chain_axioms),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
