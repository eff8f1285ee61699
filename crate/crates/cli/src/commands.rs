use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

use serde_json::{json, Value};

use pfml::logic::{parse_concept, parse_formula};
use pfml::lp::{solve_kantorovich_max, solve_transport_min, Coupling, Distribution};
use pfml::metrics::{
    default_grid, extract_strategy, first_stable_depth, kantorovich_chain, logical_lb_table, wasserstein_chain,
    DistanceTable, GameEngine, Method, Strategy,
};
use pfml::model::{disjoint_union, restrict, unravel, ModelError, StateId};
use pfml::random::{random_models, ModelShape, RNG_ALGORITHM};
use pfml::rational::{format_rational, parse_rational};
use pfml::semantics::{eval_concept, eval_formula_with_role, Environment, EvalError};
use pfml::suites::{run_suite, Suite, SuiteOptions};
use pfml::synthesis::{SynthesisError, SynthesisSession};
use pfml::{Model, Rational};

use crate::report::{CliError, Options, Report};
use crate::{CheckArgs, DistArgs, EvalArgs, MethodArg, SynthArgs, TransformArgs};

type CmdResult = Result<ExitCode, CliError>;

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn model_error(path: &Path, e: ModelError) -> CliError {
    match e {
        ModelError::Json { .. } => CliError::usage(format!("{}: {e}", path.display())),
        ModelError::Invalid(vs) => {
            let lines: Vec<String> = vs.iter().map(|v| format!("  {v}")).collect();
            CliError::domain(format!("{}: invalid model\n{}", path.display(), lines.join("\n")))
        }
        other => CliError::domain(format!("{}: {other}", path.display())),
    }
}

fn load(path: &Path) -> Result<(Model, Vec<u8>), CliError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let model = Model::from_json_str(&text).map_err(|e| model_error(path, e))?;
    Ok((model, bytes))
}

fn state(model: &Model, name: &str) -> Result<StateId, CliError> {
    model
        .state_index(name.trim())
        .map_err(|_| CliError::usage(format!("unknown state {:?}", name.trim())))
}

fn parse_pair(model: &Model, text: &str) -> Result<(StateId, StateId), CliError> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::usage(format!("expected a pair `a,b`, got {text:?}")))?;
    Ok((state(model, a)?, state(model, b)?))
}

fn parse_state_and_radius(model: &Model, text: &str) -> Result<(StateId, usize), CliError> {
    let (a, k) = text
        .split_once(',')
        .ok_or_else(|| CliError::usage(format!("expected `state,k`, got {text:?}")))?;
    let k = k
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("expected a natural number, got {:?}", k.trim())))?;
    Ok((state(model, a)?, k))
}

fn q(v: &Rational) -> String {
    format_rational(v)
}

fn exit(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

pub fn validate(path: &Path, opts: Options) -> CmdResult {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let (valid, violations): (bool, Vec<String>) = match Model::from_json_str(&text) {
        Ok(_) => (true, Vec::new()),
        Err(ModelError::Invalid(vs)) => (false, vs.iter().map(ToString::to_string).collect()),
        Err(e) => return Err(model_error(path, e)),
    };
    if opts.json {
        let mut r = Report::new("validate", json!({}));
        r.model(path, &bytes);
        r.set("valid", json!(valid));
        r.set("violations", json!(violations));
        r.print(opts);
    } else if valid {
        println!("{}: valid", path.display());
    } else {
        println!("{}: invalid", path.display());
        for v in &violations {
            println!("  {v}");
        }
    }
    Ok(exit(valid))
}

fn eval_error(e: EvalError) -> CliError {
    match e {
        EvalError::UnboundVariable(_) => CliError::usage(e.to_string()),
        _ => CliError::domain(e.to_string()),
    }
}

pub fn eval(args: &EvalArgs, opts: Options) -> CmdResult {
    let (model, bytes) = load(&args.model)?;
    let targets: Vec<StateId> = match &args.state {
        Some(s) => vec![state(&model, s)?],
        None => model.state_ids().collect(),
    };
    let (expr, values): (String, Vec<(StateId, Rational)>) = if let Some(text) = &args.concept {
        let c = parse_concept(text).map_err(|e| CliError::usage(format!("concept: {e}")))?;
        let v = eval_concept(&model, &c).map_err(eval_error)?;
        (c.to_string(), targets.iter().map(|&s| (s, v[s].clone())).collect())
    } else {
        let text = args.formula.as_deref().expect("clap requires one expression");
        let phi = parse_formula(text).map_err(|e| CliError::usage(format!("formula: {e}")))?;
        let mut env = Environment::new();
        for binding in &args.env {
            let (var, s) = binding
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("expected `var=state`, got {binding:?}")))?;
            env.insert(var.trim().to_string(), state(&model, s)?);
        }
        let open: Vec<String> = phi.free_vars().into_iter().filter(|v| !env.contains_key(v)).collect();
        let values = if open.is_empty() && args.state.is_none() && !args.all_states {
            vec![(usize::MAX, eval_formula_with_role(&model, &args.role, &phi, &env).map_err(eval_error)?)]
        } else {
            if open.len() > 1 {
                return Err(CliError::usage(format!(
                    "free variables {open:?} need bindings; --state binds only one"
                )));
            }
            let mut out = Vec::new();
            for &s in &targets {
                let mut e = env.clone();
                if let Some(v) = open.first() {
                    e.insert(v.clone(), s);
                }
                out.push((s, eval_formula_with_role(&model, &args.role, &phi, &e).map_err(eval_error)?));
            }
            out
        };
        (phi.to_string(), values)
    };

    let single = values.len() == 1 && (args.state.is_some() || values[0].0 == usize::MAX);
    if opts.json {
        let mut r = Report::new(
            "eval",
            json!({ "expression": expr, "state": args.state, "env": args.env, "all_states": args.all_states }),
        );
        r.model(&args.model, &bytes);
        let results: Vec<Value> = values
            .iter()
            .map(|(s, v)| {
                if *s == usize::MAX {
                    json!({ "value": q(v) })
                } else {
                    json!({ "state": model.state_name(*s), "value": q(v) })
                }
            })
            .collect();
        r.set("results", json!(results));
        r.print(opts);
    } else if single {
        println!("{}", q(&values[0].1));
    } else {
        for (s, v) in &values {
            println!("{}\t{}", model.state_name(*s), q(v));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn coupling_json(model: &Model, mu: &Coupling) -> Value {
    json!(mu
        .iter()
        .map(|((x, y), p)| json!([model.state_name(x), model.state_name(y), q(p)]))
        .collect::<Vec<_>>())
}

/// Per-role lifting witnesses for one pair at depth n ≥ 1.
fn lift_witnesses(model: &Model, prev: &DistanceTable, a: StateId, b: StateId, method: Method) -> Value {
    let mut roles = BTreeMap::new();
    for (role, rows) in model.roles() {
        let w = match (Distribution::from_row(&rows[a]), Distribution::from_row(&rows[b])) {
            (None, None) => json!("both blocking"),
            (None, Some(_)) | (Some(_), None) => json!("one blocking"),
            (Some(l), Some(r)) => match method {
                Method::Kantorovich => {
                    let (_, f) = solve_kantorovich_max(prev.as_pair_table(), &l, &r).expect("proper rows");
                    let map: BTreeMap<&str, String> = f.iter().map(|(x, v)| (model.state_name(x), q(v))).collect();
                    json!({ "potential": map })
                }
                _ => {
                    let (_, mu) = solve_transport_min(prev.as_pair_table(), &l, &r).expect("proper rows");
                    json!({ "coupling": coupling_json(model, &mu) })
                }
            },
        };
        roles.insert(role.to_string(), w);
    }
    json!(roles)
}

struct MethodResult {
    method: Method,
    table: DistanceTable,
    /// Per-pair witness payloads, when the method produces them.
    witnesses: BTreeMap<(StateId, StateId), Value>,
}

pub fn dist(args: &DistArgs, opts: Options) -> CmdResult {
    let (model, bytes) = load(&args.model)?;
    let n = args.depth;
    let pair = args.pair.as_deref().map(|p| parse_pair(&model, p)).transpose()?;
    let pairs: Vec<(StateId, StateId)> = match pair {
        Some(p) => vec![p],
        None => {
            let k = model.num_states();
            (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect()
        }
    };
    let methods: Vec<Method> = match args.method {
        MethodArg::Wasserstein => vec![Method::Wasserstein],
        MethodArg::Kantorovich => vec![Method::Kantorovich],
        MethodArg::Game => vec![Method::Game],
        MethodArg::LogicalLb => vec![Method::LogicalLB],
        MethodArg::LogicalWitness => vec![Method::LogicalWitness],
        MethodArg::All => vec![Method::Wasserstein, Method::Kantorovich, Method::Game, Method::LogicalWitness],
    };

    let w_chain = wasserstein_chain(&model, n);
    let stable = first_stable_depth(&w_chain);
    let mut results = Vec::new();
    for &method in &methods {
        let mut witnesses = BTreeMap::new();
        let table = match method {
            Method::Wasserstein | Method::Kantorovich => {
                let chain = if method == Method::Wasserstein {
                    w_chain.clone()
                } else {
                    kantorovich_chain(&model, n)
                };
                if n > 0 && pair.is_some() {
                    for &(a, b) in &pairs {
                        witnesses.insert((a, b), lift_witnesses(&model, &chain[n - 1], a, b, method));
                    }
                }
                chain[n].clone()
            }
            Method::Game => {
                let mut engine = GameEngine::with_bound(&model, args.vertex_bound);
                let table = engine.table(n).map_err(|e| CliError::domain(e.to_string()))?;
                if pair.is_some() && n > 0 {
                    for &(a, b) in &pairs {
                        let v = table.get(a, b).clone();
                        if let Strategy::Duplicator(s) =
                            extract_strategy(&mut engine, n, a, b, &v).map_err(|e| CliError::domain(e.to_string()))?
                        {
                            let root: BTreeMap<&str, Value> = s
                                .iter()
                                .filter(|((x, y, k), _, _)| (*x, *y, *k) == (a, b, n))
                                .map(|(_, role, mv)| {
                                    let dev: Vec<Value> = mv
                                        .deviation
                                        .iter()
                                        .map(|((x, y), e)| json!([model.state_name(*x), model.state_name(*y), q(e)]))
                                        .collect();
                                    (role, json!({ "coupling": coupling_json(&model, &mv.coupling), "deviation": dev }))
                                })
                                .collect();
                            witnesses.insert((a, b), json!({ "duplicator_moves": s.len(), "root": root }));
                        }
                    }
                }
                table
            }
            Method::LogicalLB => {
                let lb = logical_lb_table(&model, n, args.max_size, args.budget, &default_grid());
                for &(a, b) in &pairs {
                    if let Some(c) = lb.witnesses.get(&(a.min(b), a.max(b))) {
                        witnesses.insert((a, b), json!({ "concept": c.to_string() }));
                    }
                }
                lb.table
            }
            Method::LogicalWitness => {
                let mut session = SynthesisSession::new(&model);
                let mut values = w_chain[n].as_pair_table().clone();
                for &(a, b) in &pairs {
                    let cert = session.certify(n, a, b).map_err(|e| CliError::domain(e.to_string()))?;
                    values.set_symmetric(a, b, cert.achieved.clone());
                    witnesses.insert((a, b), json!({ "concept": cert.concept.to_string() }));
                }
                DistanceTable::new(n, Method::LogicalWitness, values)
            }
        };
        results.push(MethodResult { method, table, witnesses });
    }

    let verdicts: Vec<(StateId, StateId, bool)> = pairs
        .iter()
        .map(|&(a, b)| {
            let first = results[0].table.get(a, b);
            (a, b, results.iter().all(|r| r.table.get(a, b) == first))
        })
        .collect();
    let all_equal = verdicts.iter().all(|v| v.2);
    let compare = methods.len() > 1;

    if opts.json {
        let mut r = Report::new(
            "dist",
            json!({ "depth": n, "method": format!("{:?}", args.method).to_lowercase(), "pair": args.pair }),
        );
        r.model(&args.model, &bytes);
        let mut entries = Vec::new();
        for res in &results {
            for &(a, b) in &pairs {
                let mut e = json!({
                    "pair": [model.state_name(a), model.state_name(b)],
                    "depth": n,
                    "method": res.method.name(),
                    "value": q(res.table.get(a, b)),
                });
                if let Some(w) = res.witnesses.get(&(a, b)) {
                    e["witness"] = w.clone();
                }
                entries.push(e);
            }
        }
        r.set("results", json!(entries));
        if compare {
            let v: Vec<Value> = verdicts
                .iter()
                .map(|&(a, b, eq)| {
                    json!({ "pair": [model.state_name(a), model.state_name(b)], "verdict": if eq { "EQUAL" } else { "DIFFERENT" } })
                })
                .collect();
            r.set("coincidence", json!(v));
        }
        r.set("stabilized_at", json!(stable));
        r.print(opts);
    } else {
        for res in &results {
            println!("{} distances at depth {n}", res.method);
            for &(a, b) in &pairs {
                println!("  {}\t{}\t{}", model.state_name(a), model.state_name(b), q(res.table.get(a, b)));
                if let Some(c) = res.witnesses.get(&(a, b)).and_then(|w| w.get("concept")) {
                    println!("    witness: {}", c.as_str().unwrap_or_default());
                }
            }
        }
        if compare {
            for &(a, b, eq) in &verdicts {
                println!(
                    "{} {}: {}",
                    model.state_name(a),
                    model.state_name(b),
                    if eq { "EQUAL" } else { "DIFFERENT" }
                );
            }
        }
        match stable {
            Some(k) => println!("chain d_0..d_{n}: d_{k} = d_{} (stable within the computed prefix)", k + 1),
            None => println!("chain d_0..d_{n}: no stabilization observed"),
        }
    }
    Ok(exit(!compare || all_equal))
}

pub fn synth(args: &SynthArgs, opts: Options) -> CmdResult {
    let (model, bytes) = load(&args.model)?;
    let (a, b) = parse_pair(&model, &args.pair)?;
    let tolerance = parse_rational(&args.eps).map_err(|e| CliError::usage(format!("--eps: {e}")))?;
    let cert = SynthesisSession::new(&model)
        .with_ceiling(args.max_size)
        .with_tolerance(tolerance)
        .certify(args.depth, a, b)
        .map_err(|e| match e {
            SynthesisError::UnknownState(_) => CliError::usage(e.to_string()),
            _ => CliError::domain(e.to_string()),
        })?;
    let valid = cert.valid();
    if opts.json {
        let mut r = Report::new(
            "synth",
            json!({ "depth": args.depth, "pair": args.pair, "eps": args.eps, "max_size": args.max_size }),
        );
        r.model(&args.model, &bytes);
        let mut c = cert.to_json();
        if args.shared {
            c["shared"] = cert.concept.to_shared_json();
        }
        r.set("certificate", c);
        r.print(opts);
    } else {
        println!("concept: {}", cert.concept);
        println!("rank: {}", cert.concept.rank());
        println!("achieved: {}", q(&cert.achieved));
        println!("target: {}", q(&cert.target));
        println!("{}", if valid { "VALID" } else { "INVALID" });
    }
    Ok(exit(valid))
}

pub fn check(args: &CheckArgs, opts: Options) -> CmdResult {
    let mut r = Report::new(
        "check",
        json!({
            "random": args.random,
            "seed": args.seed,
            "suite": args.suite,
            "depth": args.depth,
            "samples": args.samples,
            "vertex_bound": args.vertex_bound,
        }),
    );
    let models: Vec<(String, Model)> = match (&args.model, &args.random) {
        (Some(path), _) => {
            let (m, bytes) = load(path)?;
            r.model(path, &bytes);
            vec![(path.display().to_string(), m)]
        }
        (None, Some(random)) => {
            let [count, size, denom] = random[..] else {
                return Err(CliError::usage("--random takes COUNT SIZE_BOUND DENOM_BOUND"));
            };
            let shape = ModelShape {
                max_states: size as usize,
                max_denominator: u32::try_from(denom).map_err(|_| CliError::usage("denominator bound too large"))?,
                ..ModelShape::default()
            };
            r.set("generator", json!({ "rng": RNG_ALGORITHM, "seed": args.seed }));
            random_models(args.seed, count as usize, &shape)
                .into_iter()
                .enumerate()
                .map(|(i, m)| (format!("random #{i}"), m))
                .collect()
        }
        (None, None) => return Err(CliError::usage("give a model file or --random")),
    };
    let suites: Vec<Suite> = if args.suite.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suite
            .iter()
            .map(|s| s.trim().parse::<Suite>().map_err(CliError::usage))
            .collect::<Result<_, _>>()?
    };
    let options = SuiteOptions {
        depth: args.depth,
        vertex_bound: args.vertex_bound,
        samples: args.samples,
        seed: args.seed,
    };
    let outcomes: Vec<_> = suites.iter().map(|&s| run_suite(s, &models, &options)).collect();
    let ok = outcomes.iter().all(|o| o.all_passed());
    if opts.json {
        let entries: Vec<Value> = outcomes
            .iter()
            .map(|o| {
                json!({
                    "suite": o.suite.name(),
                    "models": o.models,
                    "passed": o.passed,
                    "failed": o.models - o.passed,
                    "first_failure": o.first_failure.as_ref().map(|(m, d)| json!({ "model": m, "detail": d })),
                })
            })
            .collect();
        r.set("suites", json!(entries));
        r.set("passed", json!(ok));
        r.print(opts);
    } else {
        for o in &outcomes {
            println!(
                "{}: {}/{} pass",
                o.suite,
                o.passed,
                o.models
            );
            if let Some((m, d)) = &o.first_failure {
                println!("  first failure on {m}: {d}");
            }
        }
    }
    Ok(exit(ok))
}

pub fn transform(args: &TransformArgs, opts: Options) -> CmdResult {
    let (model, bytes) = load(&args.model)?;
    let mut r = Report::new(
        "transform",
        json!({
            "restrict": args.op.restrict,
            "unravel": args.op.unravel,
            "union": args.op.union.as_ref().map(|p| p.display().to_string()),
            "output": args.output.as_ref().map(|p| p.display().to_string()),
        }),
    );
    r.model(&args.model, &bytes);
    let err = |e: ModelError| CliError::domain(e.to_string());
    let out = if let Some(arg) = &args.op.restrict {
        let (a, k) = parse_state_and_radius(&model, arg)?;
        restrict(&model, a, k).map_err(err)?
    } else if let Some(arg) = &args.op.unravel {
        let (a, k) = parse_state_and_radius(&model, arg)?;
        unravel(&model, a, k).map_err(err)?.model
    } else {
        let path = args.op.union.as_ref().expect("clap requires one operation");
        let (other, other_bytes) = load(path)?;
        r.add_model("other", path, &other_bytes);
        disjoint_union(&[&model, &other]).map_err(err)?.model
    };
    let text = out.to_json_string();
    if let Some(path) = &args.output {
        std::fs::write(path, format!("{text}\n")).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    }
    if opts.json {
        r.set("states", json!(out.states()));
        if args.output.is_none() {
            r.set("result", serde_json::from_str::<Value>(&text).expect("model JSON"));
        }
        r.print(opts);
    } else if let Some(path) = &args.output {
        println!("wrote {} ({} states)", path.display(), out.num_states());
    } else {
        println!("{text}");
    }
    Ok(ExitCode::SUCCESS)
}
