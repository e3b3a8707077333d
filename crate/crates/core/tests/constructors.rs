mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use edspec::constructors::{
    event_refinement_reduct, parallel_construct, reduct, CompositeEvent, Constructor, EventRefinementMorphism,
    SignatureMorphism,
};
use edspec::data::{DataSignature, Sort};
use edspec::edts::{EdSignature, Edts};
use edspec::opspec::{canonical_model, enumerate_models, is_model, parallel_compose, EnumerationLimits, OpSpecError};
use edspec::sample;
use proptest::prelude::*;

fn shape(m: &Edts) -> (BTreeSet<String>, BTreeSet<String>, BTreeSet<String>) {
    (
        m.init_data().iter().map(|w| w.to_string()).collect(),
        m.confs().iter().map(|c| c.to_string()).collect(),
        m.all_transitions()
            .map(|(e, i, j)| format!("{} {e} {}", m.conf(i), m.conf(j)))
            .collect(),
    )
}

fn source_sig() -> EdSignature {
    EdSignature::new(["x", "y"], DataSignature::new([("q", Sort::Bool)]).unwrap())
}

fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduct_matches_closure_oracle(seed in any::<u64>()) {
        let target = small_sig();
        let mut r = sample::rng(seed);
        let m = sample::random_edts(&mut r, &target, 3, 0.3);
        // non-injective on events: both source events read `a`
        let sigma = SignatureMorphism::new("s", source_sig(), target.clone(), map(&[("x", "a"), ("y", "a")]), map(&[("q", "p")])).unwrap();
        let oracle_events = BTreeMap::from([("x".to_string(), Re::Ev("a".into())), ("y".to_string(), Re::Ev("a".into()))]);
        prop_assert_eq!(shape(&reduct(&m, &sigma).unwrap()), shape(&naive_reduct(&m, &source_sig(), &sigma.attrs, &oracle_events)));
    }

    #[test]
    fn event_refinement_matches_closure_oracle(seed in any::<u64>()) {
        let target = small_sig();
        let mut r = sample::rng(seed);
        let m = sample::random_edts(&mut r, &target, 3, 0.3);
        let th_x = CompositeEvent::star(CompositeEvent::seq(CompositeEvent::ev("a"), CompositeEvent::ev("b")));
        let th_y = CompositeEvent::union(CompositeEvent::ev("a"), CompositeEvent::seq(CompositeEvent::ev("b"), CompositeEvent::ev("b")));
        let alpha = EventRefinementMorphism::new(
            "al",
            source_sig(),
            target.clone(),
            BTreeMap::from([("x".to_string(), th_x), ("y".to_string(), th_y)]),
            map(&[("q", "p")]),
        ).unwrap();
        let re_x = Re::Star(Box::new(Re::Seq(Box::new(Re::Ev("a".into())), Box::new(Re::Ev("b".into())))));
        let re_y = Re::Union(Box::new(Re::Ev("a".into())), Box::new(Re::Seq(Box::new(Re::Ev("b".into())), Box::new(Re::Ev("b".into())))));
        let oracle_events = BTreeMap::from([("x".to_string(), re_x), ("y".to_string(), re_y)]);
        prop_assert_eq!(
            shape(&event_refinement_reduct(&m, &alpha).unwrap()),
            shape(&naive_reduct(&m, &source_sig(), &alpha.attrs, &oracle_events))
        );
    }
}

#[test]
fn restriction_of_atm_merges_trial_counts() {
    let atm = fixture_opspec("atm.ops", "ATM");
    let spec1 = load_fixture("spec1.edspec");
    let sigma0 = spec1.workspace.signature("Sigma0").unwrap().clone();
    let iota = SignatureMorphism::inclusion("iota", &sigma0, atm.sig()).unwrap();
    assert!(iota.is_injective() && !iota.is_bijective());
    let m = canonical_model(&atm).unwrap();
    let red = reduct(&m, &iota).unwrap();
    // PIN with chk=false collects trls 0..2, and the wrong-PIN step between
    // two of them becomes a self-loop.
    let (_, confs, edges) = shape(&red);
    assert!(confs.contains("(PIN, {chk=false})"));
    assert!(edges.contains("(PIN, {chk=false}) enterPIN (PIN, {chk=false})"));
    assert_eq!(red.len(), 2 + 1 + 2);
}

#[test]
fn products_of_models_are_models_of_the_composition() {
    let mut checked = 0;
    for (l, r) in PAIRS {
        let (o1, o2) = (opspec_from(l), opspec_from(r));
        let o = parallel_compose(&o1, &o2).unwrap();
        let limits = EnumerationLimits::default();
        let (ms1, ms2) = (enumerate_models(&o1, limits).unwrap(), enumerate_models(&o2, limits).unwrap());
        assert!(!ms1.is_empty() && !ms2.is_empty());
        for m1 in ms1.iter().take(15) {
            for m2 in ms2.iter().take(15) {
                let p = parallel_construct(m1, m2).unwrap();
                assert!(is_model(&p, &o).unwrap().is_model, "{o}");
                assert!(naive_is_model(&p, &o));
                checked += 1;
            }
        }
    }
    assert!(checked >= 20);
}

#[test]
fn composition_can_have_models_when_a_component_has_none() {
    let o1 = opspec_from("opspec O1 events e; states c10; init c10 [true]; c10 --[true](e // false)--> c10;");
    let o2 = opspec_from("opspec O2 events e; states c20; init c20 [true];");
    assert!(matches!(canonical_model(&o1), Err(OpSpecError::Unrealizable { .. })));
    assert!(enumerate_models(&o1, EnumerationLimits::default()).unwrap().is_empty());
    let o = parallel_compose(&o1, &o2).unwrap();
    let ms = enumerate_models(&o, EnumerationLimits::default()).unwrap();
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].len(), 1);
    assert_eq!(ms[0].transition_count(), 0);
}

#[test]
fn constructor_pipeline_applies_stages_in_order() {
    let a = fixture_opspec("atm_prime.ops", "ATM_prime");
    let c = fixture_opspec("cc.ops", "CC");
    let par = Constructor::parallel(a.sig(), c.sig()).unwrap();
    let source = EdSignature::new(["x"], DataSignature::new([("chk", Sort::Bool)]).unwrap());
    let target = a.sig().compose(c.sig()).unwrap();
    let sigma = SignatureMorphism::new("s", source, target, map(&[("x", "verifyPIN")]), map(&[("chk", "chk")])).unwrap();
    let k = Constructor::compose(vec![par], Constructor::Reduct(sigma.clone())).unwrap();
    assert_eq!(k.arity(), 2);
    let small = opspec_from(
        "opspec A events insertCard, enterPIN, ejectCard, cancel, verifyPIN, correctPIN, wrongPIN; attrs chk: bool, trls: int[0..0];
         states S; init S [not chk and trls = 0]; S --(verifyPIN // chk' = chk and trls' = trls)--> S;",
    );
    let cc = opspec_from(
        "opspec C events verifyPIN, correctPIN, wrongPIN; attrs cnt: int[0..0]; states I; init I [cnt = 0];
         I --(verifyPIN // cnt' = cnt)--> I;",
    );
    let (m1, m2) = (canonical_model(&small).unwrap(), canonical_model(&cc).unwrap());
    let k2 = Constructor::compose(
        vec![Constructor::parallel(small.sig(), cc.sig()).unwrap()],
        Constructor::Reduct(
            SignatureMorphism::new(
                "s",
                sigma.source.clone(),
                small.sig().compose(cc.sig()).unwrap(),
                map(&[("x", "verifyPIN")]),
                map(&[("chk", "chk")]),
            )
            .unwrap(),
        ),
    )
    .unwrap();
    let out = k2.apply(&[&m1, &m2]).unwrap();
    let direct = reduct(&parallel_construct(&m1, &m2).unwrap(), match &k2 {
        Constructor::Composite { then, .. } => match &**then {
            Constructor::Reduct(s) => s,
            _ => unreachable!(),
        },
        _ => unreachable!(),
    })
    .unwrap();
    assert_eq!(shape(&out), shape(&direct));
    assert!(k2.apply(&[&m1]).is_err());
}
