use attrcat::diagram::iso_check;
use attrcat::rewrite::{normalize_data, prove_equal, prove_leq, Budget};
use attrcat::term::parse_term;
use attrcat::{build_diagram, parse_signature, Diagram, Signature};
use attrcat_testkit::finite::{comonoid_actions, phi_candidates, FiniteModel};
use attrcat_testkit::random::{attr_term, data_term};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn diagram(sig: &Signature, t: &str) -> Diagram {
    build_diagram(&parse_term(t).unwrap(), sig).unwrap_or_else(|e| panic!("{}: {}", t, e))
}

fn attr_sig() -> Signature {
    parse_signature("entity M\ndata D\nattr a : M -> D\n").unwrap()
}

/// The canonical models for every attribute function on small sets.
fn models() -> Vec<FiniteModel> {
    let mut out = Vec::new();
    for (m, n) in [(1, 2), (2, 2), (2, 3), (3, 2)] {
        for g in comonoid_actions(m, n) {
            let mut model = FiniteModel::with_sizes(&[("M", m), ("D", n)]);
            model.phi.insert("a".into(), phi_candidates(&g, m, n).remove(0));
            model.gamma.insert("a".into(), g);
            out.push(model);
        }
    }
    out
}

fn below(model: &FiniteModel, lhs: &Diagram, rhs: &Diagram) -> bool {
    model.all_inputs(&lhs.inputs).iter().all(|p| match model.eval(lhs, p) {
        None => true,
        some => some == model.eval(rhs, p),
    })
}

/// Random pairs with a shared boundary.
fn pairs(sig: &Signature, n: usize) -> Vec<(Diagram, Diagram)> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut pool: Vec<Diagram> = Vec::new();
    let mut out = Vec::new();
    while out.len() < n {
        let (t, _) = attr_term(&mut rng, "M", "D", "a", 5);
        let d = diagram(sig, &t);
        if let Some(i) = pool.iter().position(|e| e.inputs == d.inputs && e.outputs == d.outputs) {
            out.push((pool.swap_remove(i), d));
        } else {
            pool.push(d);
        }
    }
    out
}

#[test]
fn found_proofs_replay_and_hold_in_every_model() {
    let sig = attr_sig();
    let models = models();
    let budget = Budget::states(400);
    let (mut eq, mut leq) = (0, 0);
    for (d1, d2) in pairs(&sig, 300) {
        let e = prove_equal(&d1, &d2, &budget, &sig).unwrap();
        if let Some(p) = e.proof() {
            p.replay(&sig).unwrap();
            for m in &models {
                assert_eq!(m.denotation(&d1), m.denotation(&d2), "{:?}\n{:?}", d1, d2);
            }
            // equality implies the inequality both ways
            assert!(prove_leq(&d1, &d2, &budget, &sig).unwrap().proof().is_some());
            assert!(prove_leq(&d2, &d1, &budget, &sig).unwrap().proof().is_some());
            eq += 1;
        }
        if let Some(p) = prove_leq(&d1, &d2, &budget, &sig).unwrap().proof() {
            p.replay(&sig).unwrap();
            for m in &models {
                assert!(below(m, &d1, &d2), "{:?}\n{:?}", d1, d2);
            }
            leq += 1;
        }
    }
    assert!(eq >= 20 && leq > eq, "eq {} leq {}", eq, leq);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn data_normalization_is_idempotent_and_compositional(seed in any::<u64>()) {
        let sig = parse_signature("data D\n").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (t1, w) = data_term(&mut rng, "D", 2, 5);
        let (t2, _) = data_term(&mut rng, "D", w, 5);
        let (d1, d2) = (diagram(&sig, &t1), diagram(&sig, &t2));
        let n1 = normalize_data(&d1);
        prop_assert!(iso_check(&normalize_data(&n1), &n1));
        let whole = normalize_data(&d1.then(&d2).unwrap());
        let parts = normalize_data(&n1.then(&normalize_data(&d2)).unwrap());
        prop_assert!(iso_check(&whole, &parts));
    }

    #[test]
    fn every_diagram_proves_equal_to_itself(seed in any::<u64>()) {
        let sig = attr_sig();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (t, _) = attr_term(&mut rng, "M", "D", "a", 6);
        let d = diagram(&sig, &t);
        let out = prove_equal(&d, &d, &Budget::states(1), &sig).unwrap();
        let p = out.proof().expect("reflexivity");
        prop_assert!(p.steps.is_empty());
        prop_assert!(prove_leq(&d, &d, &Budget::states(1), &sig).unwrap().proof().is_some());
    }
}
