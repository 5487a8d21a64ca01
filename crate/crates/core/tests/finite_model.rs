//! The engine's syntactic answers against the canonical partial-function model.

use attrcat::diagram::iso_check;
use attrcat::rewrite::{derive_phi, normalize_data};
use attrcat::term::parse_term;
use attrcat::{build_diagram, parse_signature, Diagram, Signature};
use attrcat_testkit::finite::{action_laws, comonoid_actions, phi_candidates, FiniteModel, GammaTable, PhiTable};
use attrcat_testkit::random::data_term;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn diagram(sig: &Signature, t: &str) -> Diagram {
    build_diagram(&parse_term(t).unwrap(), sig).unwrap_or_else(|e| panic!("{}: {}", t, e))
}

#[test]
fn data_normal_forms_match_denotations() {
    let sig = parse_signature("data D\n").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut buckets: BTreeMap<(usize, usize), Vec<Diagram>> = BTreeMap::new();
    for _ in 0..1500 {
        let k = rng.gen_range(1..=3);
        let (t, _) = data_term(&mut rng, "D", k, 8);
        let d = diagram(&sig, &t);
        assert!(d.nodes.len() <= 8);
        buckets.entry((d.inputs.len(), d.outputs.len())).or_default().push(d);
    }
    let models: Vec<FiniteModel> = [2, 3, 4].iter().map(|&n| FiniteModel::with_sizes(&[("D", n)])).collect();
    let (mut pairs, mut equal) = (0, 0);
    for ds in buckets.values() {
        for w in ds.windows(2) {
            let syntactic = iso_check(&normalize_data(&w[0]), &normalize_data(&w[1]));
            for m in &models {
                let semantic = m.denotation(&w[0]) == m.denotation(&w[1]);
                assert_eq!(syntactic, semantic, "|D| = {}: {:?} vs {:?}", m.sizes["D"], w[0], w[1]);
            }
            pairs += 1;
            equal += syntactic as usize;
        }
    }
    assert!(pairs >= 500, "{} pairs", pairs);
    assert!(equal >= 50 && pairs - equal >= 50, "{} equal of {}", equal, pairs);
}

fn attr_sig() -> Signature {
    parse_signature("entity M\nentity N\ndata D\nattr a : M -> D\nattr b : N -> D\n").unwrap()
}

/// `phi` as the engine derives it, read off pointwise.
fn derived_phi(sig: &Signature, g: &GammaTable, m: usize, n: usize) -> PhiTable {
    let d = derive_phi("a", sig).unwrap();
    let mut model = FiniteModel::with_sizes(&[("M", m), ("D", n)]);
    model.gamma.insert("a".into(), g.clone());
    (0..m).map(|x| (0..n).map(|v| model.eval(&d, &[x, v]).map(|o| o[0])).collect()).collect()
}

#[test]
fn derived_filter_is_the_unique_action() {
    let sig = attr_sig();
    let mut checked = 0;
    for m in 1..=3 {
        for n in 1..=3 {
            let actions = comonoid_actions(m, n);
            // one comonoid action per attribute function M -> D
            assert_eq!(actions.len(), n.pow(m as u32));
            for g in &actions {
                let phi = derived_phi(&sig, g, m, n);
                action_laws(g, &phi, m, n).unwrap();
                assert_eq!(phi_candidates(g, m, n), vec![phi]);
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 1 + 2 + 3 + 1 + 4 + 9 + 1 + 8 + 27);
}

/// Is `lhs <= rhs` pointwise: wherever `lhs` is defined, `rhs` agrees.
fn below(model: &FiniteModel, lhs: &Diagram, rhs: &Diagram) -> bool {
    model.all_inputs(&lhs.inputs).iter().all(|p| match model.eval(lhs, p) {
        None => true,
        some => some == model.eval(rhs, p),
    })
}

#[test]
fn filters_are_below_identity_in_every_finite_model() {
    let sig = attr_sig();
    let prop2 = (diagram(&sig, "set[a] ; get[a]"), diagram(&sig, "id[M] * id[D]"));
    let prop3 = (diagram(&sig, "chi[a, b]"), diagram(&sig, "id[M] * id[N]"));
    let mut strict = 0;
    for m in 1..=3 {
        for n in 1..=3 {
            let actions = comonoid_actions(m, n);
            for ga in &actions {
                let pa = phi_candidates(ga, m, n).remove(0);
                for gb in &actions {
                    let mut model = FiniteModel::with_sizes(&[("M", m), ("N", m), ("D", n)]);
                    let pa = pa.clone();
                    model.gamma.insert("a".into(), ga.clone());
                    model.gamma.insert("b".into(), gb.clone());
                    model.phi.insert("a".into(), pa);
                    assert!(below(&model, &prop2.0, &prop2.1));
                    assert!(below(&model, &prop3.0, &prop3.1));
                    strict += (model.denotation(&prop3.0) != model.denotation(&prop3.1)) as usize;
                }
            }
        }
    }
    // the inequality is strict somewhere
    assert!(strict > 0);
}
