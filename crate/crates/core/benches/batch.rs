use attrcat::par::Exec;
use attrcat::pddl::{parse_plan, parse_problem, validate_plan};
use attrcat::rewrite::{normalize_data, prove_equal, Budget};
use attrcat::term::parse_term;
use attrcat::{build_diagram, parse_signature, Diagram, Signature};
use attrcat_testkit::random::data_term;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(ext: &str) -> String {
    std::fs::read_to_string(format!("{}/../../models/robot_ball.{}", env!("CARGO_MANIFEST_DIR"), ext)).unwrap()
}

fn term(sig: &Signature, t: &str) -> Diagram {
    build_diagram(&parse_term(t).unwrap(), sig).unwrap()
}

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn proof_search(c: &mut Criterion) {
    let sig = parse_signature(&model("attr")).unwrap();
    let (l, r) = (term(&sig, "@fig1b_lhs"), term(&sig, "@fig1b_rhs"));
    let mut g = c.benchmark_group("prove_fig1b");
    for (name, exec) in POLICIES {
        let budget = Budget { exec, ..Budget::default() };
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| prove_equal(&l, &r, &budget, &sig).unwrap()));
    }
    g.finish();
}

fn batch_normalize(c: &mut Criterion) {
    let sig = parse_signature("data D\n").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ds: Vec<Diagram> = (0..2000).map(|_| term(&sig, &data_term(&mut rng, "D", 3, 8).0)).collect();
    let mut g = c.benchmark_group("normalize_2000");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| exec.map(&ds, normalize_data)));
    }
    g.finish();
}

fn batch_validate(c: &mut Criterion) {
    let sig = parse_signature(&model("attr")).unwrap();
    let problem = parse_problem(&model("problem"), &sig).unwrap();
    let plan = parse_plan(&model("plan"), &sig, &problem).unwrap();
    let plans = vec![plan; 256];
    let mut g = c.benchmark_group("validate_256_plans");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| exec.map(&plans, |p| validate_plan(p, &problem, &sig).unwrap().goal_reached)));
    }
    g.finish();
}

criterion_group!(benches, proof_search, batch_normalize, batch_validate);
criterion_main!(benches);
