mod common;

use std::collections::BTreeMap;

use common::*;
use edspec::data::{DataSignature, DataState, Sort, Value};
use edspec::edts::{Configuration, EdSignature, EdtsBuilder};
use edspec::logic::{check_sentence, Checker, Formula};
use edspec::sample;
use edspec::syntax::{parse_action, parse_sentence};
use proptest::prelude::*;

fn loop_sig() -> EdSignature {
    EdSignature::new(["e"], DataSignature::new([("a", Sort::Bool)]).unwrap())
}

fn a(v: bool) -> DataState {
    DataState::new([("a", Value::Bool(v))])
}

#[test]
fn binder_sentence_separates_a_loop_from_its_unfolding() {
    let sig = loop_sig();
    let mut b = EdtsBuilder::new(sig.clone(), "c0");
    b.initial(a(false));
    b.edge("e", Configuration::new("c0", a(false)), Configuration::new("c0", a(false)));
    let one = b.build().unwrap();
    let mut b = EdtsBuilder::new(sig.clone(), "c0");
    b.initial(a(false));
    b.edge("e", Configuration::new("c0", a(false)), Configuration::new("c", a(false)));
    b.edge("e", Configuration::new("c", a(false)), Configuration::new("c0", a(false)));
    let two = b.build().unwrap();
    let f = parse_sentence("down x . <e // a' = a> x", &sig).unwrap();
    assert!(check_sentence(&one, &f).unwrap().holds);
    assert!(!check_sentence(&two, &f).unwrap().holds);
    assert!(naive_holds(&one, &f) && !naive_holds(&two, &f));
}

#[test]
fn jump_quantifies_over_all_configurations_of_a_control_state() {
    let sig = loop_sig();
    let mut b = EdtsBuilder::new(sig.clone(), "c0");
    b.initial(a(false));
    b.edge("e", Configuration::new("c0", a(false)), Configuration::new("c0", a(true)));
    let m = b.build().unwrap();
    // c0 carries both data states, so `at x . a` fails even though the
    // successor satisfies `a`.
    let f = parse_sentence("down x . <e> (a and at x . a)", &sig).unwrap();
    assert!(!check_sentence(&m, &f).unwrap().holds);
    let g = parse_sentence("down x . <e> (a and x)", &sig).unwrap();
    assert!(check_sentence(&m, &g).unwrap().holds);
}

#[test]
fn failing_sentence_reports_initial_configuration() {
    let sig = loop_sig();
    let mut b = EdtsBuilder::new(sig.clone(), "c0");
    b.initial(a(false));
    b.initial(a(true));
    let m = b.build().unwrap();
    let v = check_sentence(&m, &parse_sentence("a", &sig).unwrap()).unwrap();
    assert!(!v.holds);
    assert_eq!(v.failure.unwrap().0, Configuration::new("c0", a(false)));
}

#[test]
fn atm_canonical_model_satisfies_its_first_axiom_like_requirements() {
    let atm = fixture_opspec("atm.ops", "ATM");
    let m = edspec::opspec::canonical_model(&atm).unwrap();
    let sig = atm.sig();
    for (text, expected) in [
        ("<insertCard // chk' = false> true", true),
        ("[E*; insertCard] (<enterPIN> true and <cancel> true)", true),
        ("[E*; enterPIN // chk' = true] <ejectCard> true", true),
        ("<enterPIN> true", false),
        ("[E*; (enterPIN // chk' = false)^3] false", false),
        ("[insertCard; (enterPIN // chk' = false)^3] <insertCard> true", true),
        ("[E*; (enterPIN // chk' = false)^2] <E*; enterPIN // chk' = false> true", true),
    ] {
        let f = parse_sentence(text, sig).unwrap();
        assert_eq!(check_sentence(&m, &f).unwrap().holds, expected, "{text}");
        assert_eq!(naive_holds(&m, &f), expected, "{text}");
    }
}

#[test]
fn complement_and_power_expand_to_unions_and_sequences() {
    let sig = fixture_opspec("atm.ops", "ATM").sig().clone();
    let neg = parse_action("-{enterPIN, cancel}", &sig).unwrap();
    assert_eq!(neg.to_string(), "(ejectCard // true) + (insertCard // true)");
    let pow = parse_action("enterPIN^3", &sig).unwrap();
    assert_eq!(pow.to_string(), "enterPIN // true; enterPIN // true; enterPIN // true");
}

fn hybrid_corpus(sig: &EdSignature) -> Vec<Formula> {
    [
        "down x . <a> x",
        "down x . [a*] <b*> x",
        "down x . <a> at x . p",
        "down x . [E*] (x -> n = 0)",
        "down x . <a; b> down y . at x . <E*> y",
        "down x . [a // n' = n] not x",
    ]
    .iter()
    .map(|t| parse_sentence(t, sig).unwrap())
    .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn checker_agrees_with_direct_recursion(seed in any::<u64>()) {
        let sig = small_sig();
        let mut r = sample::rng(seed);
        let m = sample::random_edts(&mut r, &sig, 2, 0.3);
        let mut fs: Vec<Formula> = (0..8).map(|_| sample::random_hybrid_free(&mut r, &sig, 3)).collect();
        fs.extend(hybrid_corpus(&sig));
        let mut ck = Checker::new(&m);
        for f in &fs {
            prop_assert_eq!(ck.check_sentence(f).unwrap().holds, naive_holds(&m, f), "{}", f);
            for i in 0..m.len() {
                let lib = ck.satisfies(&BTreeMap::new(), m.conf(i), f).unwrap();
                prop_assert_eq!(lib, naive_eval(&m, &BTreeMap::new(), i, f));
            }
        }
    }

    #[test]
    fn printed_sentences_parse_back(seed in any::<u64>()) {
        let sig = small_sig();
        let mut r = sample::rng(seed);
        let m = sample::random_edts(&mut r, &sig, 2, 0.3);
        let f = sample::random_hybrid_free(&mut r, &sig, 3);
        let once = parse_sentence(&f.to_string(), &sig).unwrap();
        // same meaning at every configuration
        for i in 0..m.len() {
            prop_assert_eq!(naive_eval(&m, &BTreeMap::new(), i, &f), naive_eval(&m, &BTreeMap::new(), i, &once));
        }
        // and printing is a fixed point after one round
        let twice = parse_sentence(&once.to_string(), &sig).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.to_string(), twice.to_string());
    }

    #[test]
    fn hybrid_sentences_parse_back(k in 0usize..6) {
        let sig = small_sig();
        let f = hybrid_corpus(&sig)[k].clone();
        prop_assert_eq!(parse_sentence(&f.to_string(), &sig).unwrap(), f);
    }
}
