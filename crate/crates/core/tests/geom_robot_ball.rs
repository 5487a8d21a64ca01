use attrcat::geom::{
    check_morphism, evaluate_plan, instantiate_object, parse_binding, tensor_objects, time_grid, Binding, GeomError, GeomMorphism, GeomTrace, Pose,
};
use attrcat::pddl::{parse_plan, parse_problem, plan_to_diagram, Plan};
use attrcat::term::parse_term;
use attrcat::{build_diagram, parse_signature, Diagram, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model(ext: &str) -> String {
    std::fs::read_to_string(format!("{}/../../models/robot_ball.{}", env!("CARGO_MANIFEST_DIR"), ext)).unwrap()
}

fn setup() -> (Signature, Binding) {
    (parse_signature(&model("attr")).unwrap(), parse_binding(&model("bind")).unwrap())
}

fn run_plan(plan_text: &str) -> Result<GeomTrace, GeomError> {
    let (sig, b) = setup();
    let problem = parse_problem(&model("problem"), &sig).unwrap();
    let plan = parse_plan(plan_text, &sig, &problem).unwrap();
    let d = plan_to_diagram(&plan, &problem, &sig).unwrap();
    evaluate_plan(&d, &sig, &b, &b.inputs_for(&d)?, 0.01)
}

fn diagram(sig: &Signature, t: &str) -> Diagram {
    build_diagram(&parse_term(t).unwrap(), sig).unwrap()
}

/// Outputs of `d` at `init`, `None` where a guard rejects it.
fn eval(sig: &Signature, b: &Binding, d: &Diagram, init: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    match evaluate_plan(d, sig, b, init, 0.1) {
        Ok(t) => Some(t.outputs),
        Err(GeomError::GuardFailed { .. }) | Err(GeomError::Undefined { .. }) => None,
        Err(e) => panic!("{}", e),
    }
}

#[test]
fn binding_covers_the_signature() {
    let (sig, b) = setup();
    b.check(&sig).unwrap();
}

#[test]
fn robot_and_ball_end_at_the_goal() {
    let t = run_plan(&model("plan")).unwrap();
    let s = t.final_state();
    for o in ["r", "b"] {
        let p = &s[o];
        assert!((p[0] - 8.0).abs() <= 1e-9 && (p[1] - 8.0).abs() <= 1e-9, "{}: {:?}", o, p);
    }
    assert_eq!(t.steps, vec!["1: (moveto r l1)", "2: (pick r b h)", "3: (moveto-prime h l2)", "4: (place h r b)"]);
    assert_eq!(t.states.len(), 5);
    // durations 1 + 0.5 + 1 + 0.5
    assert_eq!(t.duration, 3.0);
    assert!(t.collisions.is_empty(), "{:?}", t.collisions);
    // the robot reaches the ball after the first move
    assert_eq!(t.states[1].iter().find(|(n, _)| n == "r").unwrap().1, vec![3.0, 4.0]);
}

#[test]
fn trace_csv_is_reproducible() {
    let write = || {
        let mut buf = Vec::new();
        run_plan(&model("plan")).unwrap().write_csv(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    };
    let a = write();
    assert_eq!(a, write());
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("t,object,qx,qy,qz,qw,x,y,z"));
    assert!(a.contains("\n0.000000,r,0.000000000,0.000000000,0.000000000,1.000000000,0.000000000,0.000000000,1.000000000\n"));
    let last = a.lines().last().unwrap();
    assert!(last.starts_with("3.000000,"), "{}", last);
}

#[test]
fn picking_far_from_the_ball_fails_the_agreement_guard() {
    let (sig, b) = setup();
    let d = diagram(&sig, "chi[loc_R, loc_B] ; Pick");
    match evaluate_plan(&d, &sig, &b, &[vec![0.0, 0.0], vec![3.0, 4.0]], 0.01) {
        Err(GeomError::GuardFailed { left, right, .. }) => {
            let mut got = vec![left, right];
            got.sort_by(|x, y| x.partial_cmp(y).unwrap());
            assert_eq!(got, vec![vec![0.0, 0.0], vec![3.0, 4.0]]);
        }
        other => panic!("{:?}", other),
    }
}

#[test]
fn empty_plan_keeps_the_initial_state() {
    let (sig, b) = setup();
    let problem = parse_problem(&model("problem"), &sig).unwrap();
    let d = plan_to_diagram(&Plan::default(), &problem, &sig).unwrap();
    let err = b.inputs_for(&d).unwrap_err();
    // the carried pair has no initial parameter until a pick creates it
    assert!(matches!(err, GeomError::Unbound(_)));
    let mut b2 = b.clone();
    b2.init.insert("h".into(), vec![5.0, 5.0]);
    let t = evaluate_plan(&d, &sig, &b2, &b2.inputs_for(&d).unwrap(), 0.01).unwrap();
    assert_eq!(t.states.len(), 1);
    assert!(t.steps.is_empty());
    assert_eq!(t.duration, 0.0);
    assert_eq!(t.outputs, b2.inputs_for(&d).unwrap());
}

fn sphere_gap(c1: [f64; 3], c2: [f64; 3], r1: f64, r2: f64) -> f64 {
    let d = ((c1[0] - c2[0]).powi(2) + (c1[1] - c2[1]).powi(2) + (c1[2] - c2[2]).powi(2)).sqrt();
    d - r1 - r2
}

#[test]
fn tensor_excludes_overlapping_unit_spheres() {
    let s = instantiate_object("point-robot-2d", &[1.0, 0.0, 10.0, 0.0, 10.0]).unwrap();
    let st = tensor_objects(&s, &s);
    for (dist, want) in [(1.0, false), (3.0, true)] {
        let p = [2.0, 2.0, 2.0 + dist, 2.0];
        assert_eq!(sphere_gap([p[0], p[1], 0.0], [p[2], p[3], 0.0], 1.0, 1.0) > 0.0, want);
        assert_eq!(st.contains(&p), want, "distance {}", dist);
        // membership is symmetric under swapping the factors
        assert_eq!(st.contains(&[p[2], p[3], p[0], p[1]]), want);
    }
    // an entity next to a value object gains no constraint
    let v = instantiate_object("value-box", &[0.0, 10.0, 0.0, 10.0]).unwrap();
    assert!(tensor_objects(&s, &v).contains(&[2.0, 2.0, 2.0, 2.0]));
}

#[test]
fn bound_generators_pass_the_morphism_checks() {
    let (sig, b) = setup();
    for g in ["MoveTo", "MoveTo'", "Pick", "Place"] {
        let f = b.morphism(g, &sig).unwrap();
        let found = check_morphism(&f, &f.dom, &f.cod, 300, 0.05, 7);
        assert!(found.is_empty(), "{}: {:?}", g, found);
    }
}

fn pinned(x: f64) -> attrcat::geom::GeomObject {
    instantiate_object("point-robot-2d", &[0.5, x, x, 0.0, 0.0, 0.0]).unwrap()
}

#[test]
fn sweeping_through_a_sphere_is_reported_at_the_first_contact() {
    let (a0, a1, blocker) = (pinned(0.0), pinned(4.0), pinned(2.0));
    let x = tensor_objects(&a0, &blocker);
    let y = tensor_objects(&a1, &blocker);
    let f = GeomMorphism::straight(x.clone(), y.clone(), 1.0, |p| Some(vec![p[0] + 4.0, p[1], p[2], p[3]]));
    let found = check_morphism(&f, &x, &y, 5, 0.1, 0);
    // oracle: the moving center is at 4t, contact once it is within 1.0 of 2.0
    let first = time_grid(1.0, 0.1).into_iter().find(|t| sphere_gap([4.0 * t, 0.0, 0.0], [2.0, 0.0, 0.0], 0.5, 0.5) <= 0.0).unwrap();
    assert!(!found.is_empty());
    assert!(found.iter().all(|f| f.message.contains("disjointness") && f.message.contains(&format!("t = {}", first))), "{:?}", found);

    let off = GeomMorphism::new(a0.clone(), a0.clone(), 1.0, |p| Some(p.to_vec()), |p, _| vec![Pose::at(p[0] + 0.5, p[1], 0.0)]);
    let found = check_morphism(&off, &a0, &a0, 3, 0.5, 0);
    assert!(found.iter().any(|f| f.message.starts_with("endpoint: phi(p, 0)")), "{:?}", found);
}

/// Random parameter tuples for the inputs; with probability 1/2 every
/// input of the same type gets the same value, so guards pass often enough.
fn draws(b: &Binding, d: &Diagram, n: usize, seed: u64) -> Vec<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let tie = rng.gen_bool(0.5);
            let base: Vec<f64> = vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)];
            d.inputs
                .iter()
                .map(|ty| {
                    let o = b.objects[ty].object.clone();
                    if tie {
                        base.clone()
                    } else {
                        o.sample(&mut rng).unwrap()
                    }
                })
                .collect()
        })
        .collect()
}

fn pointwise(lhs: &str, rhs: &str, leq: bool) -> (usize, usize) {
    let (sig, b) = setup();
    let (l, r) = (diagram(&sig, lhs), diagram(&sig, rhs));
    let mut defined = 0;
    let mut bad = 0;
    for p in draws(&b, &l, 1000, 11) {
        let (x, y) = (eval(&sig, &b, &l, &p), eval(&sig, &b, &r, &p));
        defined += x.is_some() as usize;
        let ok = match (&x, &y) {
            (None, None) => true,
            (None, Some(_)) => leq,
            (Some(a), Some(c)) => a.iter().zip(c).all(|(u, v)| u.iter().zip(v).all(|(s, t)| (s - t).abs() <= 1e-9)),
            (Some(_), None) => false,
        };
        bad += !ok as usize;
    }
    (defined, bad)
}

#[test]
fn value_service_satisfies_the_data_laws_pointwise() {
    let laws = [
        ("delta[Loc] ; mu[Loc]", "id[Loc]"),
        ("(delta[Loc] * id[Loc]) ; (id[Loc] * mu[Loc])", "mu[Loc] ; delta[Loc]"),
        ("(id[Loc] * delta[Loc]) ; (mu[Loc] * id[Loc])", "mu[Loc] ; delta[Loc]"),
        ("swap[Loc,Loc] ; mu[Loc]", "mu[Loc]"),
        ("delta[Loc] ; swap[Loc,Loc]", "delta[Loc]"),
        ("delta[Loc] ; (eps[Loc] * id[Loc])", "id[Loc]"),
        ("delta[Loc] ; (delta[Loc] * id[Loc])", "delta[Loc] ; (id[Loc] * delta[Loc])"),
        ("(mu[Loc] * id[Loc]) ; mu[Loc]", "(id[Loc] * mu[Loc]) ; mu[Loc]"),
    ];
    for (l, r) in laws {
        let (defined, bad) = pointwise(l, r, false);
        assert_eq!(bad, 0, "{} = {}", l, r);
        assert!(defined > 400, "{}: only {} defined", l, defined);
    }
}

#[test]
fn filters_sit_below_the_identity_pointwise() {
    for (l, r) in [("set[loc_R] ; get[loc_R]", "id[Robot] * id[Loc]"), ("chi[loc_R, loc_B]", "id[Robot] * id[Ball]")] {
        let (defined, bad) = pointwise(l, r, true);
        assert_eq!(bad, 0, "{} <= {}", l, r);
        assert!(defined > 400, "{}: only {} defined", l, defined);
    }
}
