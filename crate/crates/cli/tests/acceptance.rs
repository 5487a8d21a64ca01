//! One PASS/FAIL line per acceptance criterion. Exits non-zero on any failure.

use attrcat::boolean::{apply_action, Atom, AtomSet, BoolAction, BoolError, Proposition, UpdateRule, Valuation};
use attrcat::diagram::iso_check;
use attrcat::geom::{compose, evaluate_plan, instantiate_object, parse_binding, tensor_objects, Binding, GeomError, GeomMorphism};
use attrcat::pddl::{emit_domain, parse_plan, parse_problem, plan_to_diagram, validate_plan, PddlError};
use attrcat::rewrite::{derive_phi, normalize_data, prove_equal, prove_leq, Budget, Outcome};
use attrcat::term::parse_term;
use attrcat::{build_diagram, parse_signature, validate_signature, Diagram, Signature};
use attrcat_testkit::boolean::{random_cube, Formula};
use attrcat_testkit::finite::{action_laws, comonoid_actions, phi_candidates, FiniteModel, GammaTable, PhiTable};
use attrcat_testkit::geometry::sphere_gap;
use attrcat_testkit::random::data_term;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn path(ext: &str) -> String {
    format!("{}/../../models/robot_ball.{}", env!("CARGO_MANIFEST_DIR"), ext)
}

fn model(ext: &str) -> String {
    std::fs::read_to_string(path(ext)).unwrap()
}

fn robot_ball() -> Signature {
    parse_signature(&model("attr")).unwrap()
}

fn diagram(sig: &Signature, t: &str) -> Diagram {
    build_diagram(&parse_term(t).unwrap(), sig).unwrap_or_else(|e| panic!("{}: {}", t, e))
}

fn below(model: &FiniteModel, lhs: &Diagram, rhs: &Diagram) -> bool {
    model.all_inputs(&lhs.inputs).iter().all(|p| match model.eval(lhs, p) {
        None => true,
        some => some == model.eval(rhs, p),
    })
}

fn theorems() -> Check {
    let sig = robot_ball();
    ensure!(validate_signature(&sig).is_empty(), "signature invalid");
    let budget = Budget::states(100_000);
    let mut slowest = Duration::ZERO;
    for (l, r) in [("@fig1a_lhs", "@fig1a_rhs"), ("@fig1b_lhs", "@fig1b_rhs"), ("@eq1_lhs", "@eq1_rhs"), ("@pick_chi", "Pick"), ("@chi_place", "Place")] {
        let t = Instant::now();
        let out = prove_equal(&diagram(&sig, l), &diagram(&sig, r), &budget, &sig).map_err(|e| e.to_string())?;
        let elapsed = t.elapsed();
        match out {
            Outcome::Proved(p) => p.replay(&sig).map_err(|e| format!("{} = {}: replay: {}", l, r, e))?,
            Outcome::Unknown { states } => return Err(format!("{} = {}: unknown after {} states", l, r, states)),
        }
        ensure!(elapsed < Duration::from_secs(10), "{} = {} took {:?}", l, r, elapsed);
        slowest = slowest.max(elapsed);
    }
    Ok(format!("5 equalities proved and replayed, slowest {:.0?}", slowest))
}

fn spiders() -> Check {
    let sig = parse_signature("data D\n").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut buckets: BTreeMap<(usize, usize), Vec<Diagram>> = BTreeMap::new();
    for _ in 0..1500 {
        let k = rng.gen_range(1..=3);
        let d = diagram(&sig, &data_term(&mut rng, "D", k, 8).0);
        ensure!(d.nodes.len() <= 8, "{} nodes", d.nodes.len());
        buckets.entry((d.inputs.len(), d.outputs.len())).or_default().push(d);
    }
    let models: Vec<FiniteModel> = [2, 3, 4].iter().map(|&n| FiniteModel::with_sizes(&[("D", n)])).collect();
    let (mut pairs, mut equal, mut disagree) = (0, 0, 0);
    for ds in buckets.values() {
        for w in ds.windows(2) {
            let syntactic = iso_check(&normalize_data(&w[0]), &normalize_data(&w[1]));
            for m in &models {
                disagree += (syntactic != (m.denotation(&w[0]) == m.denotation(&w[1]))) as usize;
            }
            pairs += 1;
            equal += syntactic as usize;
        }
    }
    ensure!(pairs >= 500, "only {} pairs", pairs);
    ensure!(disagree == 0, "{} disagreements", disagree);
    Ok(format!("{} pairs ({} equal), 0 disagreements for |D| in 2..=4", pairs, equal))
}

fn unique_action() -> Check {
    let sig = parse_signature("entity M\ndata D\nattr a : M -> D\n").unwrap();
    let d = derive_phi("a", &sig).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for m in 1..=3 {
        for n in 1..=3 {
            for g in comonoid_actions(m, n) {
                let mut model = FiniteModel::with_sizes(&[("M", m), ("D", n)]);
                model.gamma.insert("a".into(), g.clone());
                let phi: PhiTable = (0..m).map(|x| (0..n).map(|v| model.eval(&d, &[x, v]).map(|o| o[0])).collect()).collect();
                action_laws(&g, &phi, m, n).map_err(|e| format!("|M|={} |D|={}: {}", m, n, e))?;
                let cands = phi_candidates(&g, m, n);
                ensure!(cands == vec![phi], "|M|={} |D|={}: {} candidates", m, n, cands.len());
                checked += 1;
            }
        }
    }
    Ok(format!("{} comonoid actions, each with exactly one action (the derived one)", checked))
}

fn posets() -> Check {
    let sig = robot_ball();
    let budget = Budget::states(100_000);
    for (l, r) in [("@prop2_lhs", "@prop2_rhs"), ("@prop3_lhs", "@prop3_rhs")] {
        let out = prove_leq(&diagram(&sig, l), &diagram(&sig, r), &budget, &sig).map_err(|e| e.to_string())?;
        ensure!(out.proof().is_some(), "{} <= {} not proved", l, r);
    }
    let fsig = parse_signature("entity M\nentity N\ndata D\nattr a : M -> D\nattr b : N -> D\n").unwrap();
    let p2 = (diagram(&fsig, "set[a] ; get[a]"), diagram(&fsig, "id[M] * id[D]"));
    let p3 = (diagram(&fsig, "chi[a, b]"), diagram(&fsig, "id[M] * id[N]"));
    let (mut models, mut violations) = (0, 0);
    for m in 1..=3 {
        for n in 1..=3 {
            let actions: Vec<GammaTable> = comonoid_actions(m, n);
            for ga in &actions {
                for gb in &actions {
                    let mut model = FiniteModel::with_sizes(&[("M", m), ("N", m), ("D", n)]);
                    model.phi.insert("a".into(), phi_candidates(ga, m, n).remove(0));
                    model.gamma.insert("a".into(), ga.clone());
                    model.gamma.insert("b".into(), gb.clone());
                    violations += !below(&model, &p2.0, &p2.1) as usize + !below(&model, &p3.0, &p3.1) as usize;
                    models += 1;
                }
            }
        }
    }
    ensure!(violations == 0, "{} violations", violations);
    Ok(format!("both proved by rewriting; 0 violations in {} finite models", models))
}

fn pddl() -> Check {
    let t = Instant::now();
    let sig = robot_ball();
    let domain = emit_domain(&sig).map_err(|e| e.to_string())?;
    ensure!(domain.starts_with("(define (domain"), "domain text");
    let problem = parse_problem(&model("problem"), &sig).map_err(|e| e.to_string())?;
    let plan = parse_plan(&model("plan"), &sig, &problem).map_err(|e| e.to_string())?;
    ensure!(plan.steps.len() == 4, "{} steps", plan.steps.len());
    let trace = validate_plan(&plan, &problem, &sig).map_err(|e| e.to_string())?;
    ensure!(trace.states.len() == 5 && trace.goal_reached, "{} states, goal {}", trace.states.len(), trace.goal_reached);
    let short = parse_plan("(pick r b h)\n(moveto-prime h l2)\n(place h r b)\n", &sig, &problem).map_err(|e| e.to_string())?;
    let want = PddlError::InvalidStep { step: 1, action: "pick".into(), predicate: "agree-Loc-loc_R-loc_B".into() };
    match validate_plan(&short, &problem, &sig) {
        Err(e) if e == want => {}
        other => return Err(format!("perturbed plan: {:?}", other)),
    }
    let elapsed = t.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {:?}", elapsed);
    Ok(format!("5-state trace reaches the goal; dropped move fails at {}; {:.0?}", want, elapsed))
}

fn atoms(n: usize) -> Arc<AtomSet> {
    AtomSet::new((0..n).map(|i| Atom { pred: format!("p{}", i), args: vec![] }).collect()).unwrap()
}

fn prop(a: &Arc<AtomSet>, f: &Formula) -> Proposition {
    match f {
        Formula::Top => Proposition::top(a),
        Formula::Bot => Proposition::bot(a),
        Formula::Var(i) => Proposition::atom(a, *i),
        Formula::Not(x) => prop(a, x).not(),
        Formula::And(x, y) => prop(a, x).and(&prop(a, y)).unwrap(),
        Formula::Or(x, y) => prop(a, x).or(&prop(a, y)).unwrap(),
    }
}

fn boolean() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut applied = 0;
    for i in 0..10_000 {
        let n = rng.gen_range(1..=10);
        let a = atoms(n);
        let (f, g, h) = (Formula::random(&mut rng, n, 4), Formula::random(&mut rng, n, 4), Formula::random(&mut rng, n, 4));
        let (p, q, r) = (prop(&a, &f), prop(&a, &g), prop(&a, &h));
        let table: Vec<bool> = (0..1u32 << n).map(|v| p.holds(v)).collect();
        ensure!(table == f.table(n), "instance {}: truth table", i);
        ensure!(p.and(&q).unwrap().not() == p.not().or(&q.not()).unwrap(), "instance {}: De Morgan", i);
        ensure!(p.and(&q.or(&r).unwrap()).unwrap() == p.and(&q).unwrap().or(&p.and(&r).unwrap()).unwrap(), "instance {}: distributivity", i);
        ensure!(p.or(&p.and(&q).unwrap()).unwrap() == p, "instance {}: absorption", i);
        ensure!(p.and(&p.not()).unwrap().is_bot() && p.or(&p.not()).unwrap().is_top(), "instance {}: complement", i);

        let cube = random_cube(&mut rng, n);
        let post = cube.iter().fold(Proposition::top(&a), |acc, &(k, v)| acc.and(&Proposition::literal(&a, k, v)).unwrap());
        let frozen: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.2)).collect();
        let act = BoolAction { name: "act".into(), params: vec![], atoms: a.clone(), pre: vec![("pre".into(), p.clone())], post, frozen };
        let s = Valuation { atoms: a.clone(), bits: rng.gen_range(0..1u32 << n) };
        let out = match apply_action(&act, &s, UpdateRule::Symmetric) {
            Err(BoolError::Precondition { .. }) => {
                ensure!(!f.eval(s.bits), "instance {}: spurious precondition failure", i);
                continue;
            }
            res => res.map_err(|e| format!("instance {}: {}", i, e))?,
        };
        let eff = act.effective_post(&s);
        for k in 0..n {
            let want = eff.forced(k).unwrap_or(s.get(k));
            ensure!(out.get(k) == want, "instance {}: frame at atom {}", i, k);
        }
        if !eff.is_bot() {
            ensure!(eff.holds(out.bits), "instance {}: post not satisfied", i);
        }
        if f.eval(out.bits) {
            ensure!(apply_action(&act, &out, UpdateRule::Symmetric).unwrap() == out, "instance {}: not idempotent", i);
        }
        applied += 1;
    }
    Ok(format!("10000 instances, laws hold; {} updates framed, idempotent, post satisfied", applied))
}

fn geom_eval(sig: &Signature, b: &Binding, d: &Diagram, init: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    match evaluate_plan(d, sig, b, init, 0.1) {
        Ok(t) => Some(t.outputs),
        Err(GeomError::GuardFailed { .. }) | Err(GeomError::Undefined { .. }) => None,
        Err(e) => panic!("{}", e),
    }
}

fn geometry() -> Check {
    let sig = robot_ball();
    let b = parse_binding(&model("bind")).map_err(|e| e.to_string())?;
    let problem = parse_problem(&model("problem"), &sig).unwrap();
    let plan = parse_plan(&model("plan"), &sig, &problem).unwrap();
    let d = plan_to_diagram(&plan, &problem, &sig).unwrap();
    let trace = evaluate_plan(&d, &sig, &b, &b.inputs_for(&d).map_err(|e| e.to_string())?, 0.01).map_err(|e| e.to_string())?;
    let fin = trace.final_state();
    for o in ["r", "b"] {
        let p = &fin[o];
        ensure!((p[0] - 8.0).abs() <= 1e-9 && (p[1] - 8.0).abs() <= 1e-9, "{} ends at {:?}", o, p);
    }

    let f = b.morphism("MoveTo", &sig).map_err(|e| e.to_string())?;
    for t in [0.1, 0.25, 1.7] {
        let g = GeomMorphism::identity(&f.cod, t);
        let c = compose(&f, &g).map_err(|e| e.to_string())?;
        ensure!(c.duration == f.duration + t, "duration {} != {} + {}", c.duration, f.duration, t);
    }

    let s = instantiate_object("point-robot-2d", &[1.0, 0.0, 10.0, 0.0, 10.0]).unwrap();
    let st = tensor_objects(&s, &s);
    for (dist, want) in [(1.0, false), (3.0, true)] {
        ensure!((sphere_gap([2.0, 2.0, 0.0], 1.0, [2.0 + dist, 2.0, 0.0], 1.0) > 0.0) == want, "oracle at {}", dist);
        ensure!(st.contains(&[2.0, 2.0, 2.0 + dist, 2.0]) == want, "tensor membership at distance {}", dist);
    }

    let laws = [
        ("delta[Loc] ; mu[Loc]", "id[Loc]"),
        ("(delta[Loc] * id[Loc]) ; (id[Loc] * mu[Loc])", "mu[Loc] ; delta[Loc]"),
        ("swap[Loc,Loc] ; mu[Loc]", "mu[Loc]"),
        ("delta[Loc] ; swap[Loc,Loc]", "delta[Loc]"),
        ("delta[Loc] ; (eps[Loc] * id[Loc])", "id[Loc]"),
        ("delta[Loc] ; (delta[Loc] * id[Loc])", "delta[Loc] ; (id[Loc] * delta[Loc])"),
        ("(mu[Loc] * id[Loc]) ; mu[Loc]", "(id[Loc] * mu[Loc]) ; mu[Loc]"),
    ];
    let loc = b.objects["Loc"].object.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = 0;
    for (l, r) in laws {
        let (dl, dr) = (diagram(&sig, l), diagram(&sig, r));
        for _ in 0..1000 {
            let tie = rng.gen_bool(0.5);
            let base = loc.sample(&mut rng).unwrap();
            let p: Vec<Vec<f64>> = dl.inputs.iter().map(|_| if tie { base.clone() } else { loc.sample(&mut rng).unwrap() }).collect();
            let same = match (geom_eval(&sig, &b, &dl, &p), geom_eval(&sig, &b, &dr, &p)) {
                (None, None) => true,
                (Some(x), Some(y)) => x.iter().zip(&y).all(|(u, v)| u.iter().zip(v).all(|(s, t)| (s - t).abs() <= 1e-9)),
                _ => false,
            };
            failures += !same as usize;
        }
    }
    ensure!(failures == 0, "{} value-service law failures", failures);
    Ok(format!("goal within 1e-9, durations add exactly, exclusion exact, {} law draws with 0 failures", laws.len() * 1000))
}

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_attrcat");
    let s = |x: &str| x.to_string();
    let invocations: Vec<Vec<String>> = vec![
        vec![s("check"), path("attr")],
        vec![s("check"), path("attr"), s("--bind"), path("bind"), s("--samples"), s("100")],
        vec![s("emit-pddl"), path("attr")],
        vec![s("emit-problem"), path("attr"), path("problem")],
        vec![s("validate-plan"), path("attr"), path("problem"), path("plan")],
        vec![s("validate-plan"), path("attr"), path("problem"), path("plan"), s("--compat-literal-flip")],
        vec![s("prove"), path("attr"), s("--lhs"), s("@fig1a_lhs"), s("--rhs"), s("@fig1a_rhs"), s("--budget"), s("100000")],
        vec![s("prove"), path("attr"), s("--lhs"), s("id[Robot]"), s("--rhs"), s("id[Loc]")],
        vec![s("prove"), path("attr"), s("--leq"), s("--lhs"), s("@prop3_lhs"), s("--rhs"), s("@prop3_rhs")],
        vec![s("simulate"), path("attr"), path("problem"), path("plan"), path("bind")],
        vec![s("render"), path("attr"), s("--term"), s("@eq1_lhs"), s("--format"), s("dot")],
        vec![s("render"), path("attr"), s("--problem"), path("problem"), s("--plan"), path("plan")],
    ];
    for args in &invocations {
        let a = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        let b = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        ensure!(a.status.code() == b.status.code() && a.stdout == b.stdout && a.stderr == b.stderr, "{} differs between runs", args.join(" "));
    }
    Ok(format!("{} invocations byte-identical across two runs", invocations.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("theorem reproduction", theorems),
        ("spider normal forms", spiders),
        ("unique comonoid action", unique_action),
        ("poset propositions", posets),
        ("pddl end to end", pddl),
        ("boolean engine", boolean),
        ("geometric semantics", geometry),
        ("cli determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        match res {
            Ok(detail) => println!("PASS {} {}: {}", i + 1, name, detail),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {}: {}", i + 1, name, why);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
