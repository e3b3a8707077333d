//! Independent oracles and shared fixtures for the integration tests.
//! The oracles follow the definitions directly and favour obviousness
//! over speed; they share no code with the library beyond its data types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use edspec::data::{DataState, DEFAULT_STATE_CAP};
use edspec::edts::{Configuration, EdSignature, Edts, EdtsBuilder};
use edspec::opspec::OpSpec;
use edspec::sample;
use edspec::syntax::{load, load_str, Loaded, Universe};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn load_fixture(name: &str) -> Loaded {
    let l = load(&[fixture(name)], &Universe::default());
    assert!(!l.has_errors(), "{}", l.render_diagnostics());
    l
}

pub fn fixture_opspec(file: &str, name: &str) -> OpSpec {
    load_fixture(file).workspace.opspec(name).expect("declared").clone()
}

pub fn opspec_from(text: &str) -> OpSpec {
    let l = load_str("corpus.ops", text, &Universe::default());
    assert!(!l.has_errors(), "{}\n{text}", l.render_diagnostics());
    let name = l.workspace.specs.keys().next().expect("one spec").clone();
    l.workspace.opspec(&name).expect("operational").clone()
}

// ---------------------------------------------------------------------------
// Bisimulation: greatest fixpoint over all pairs, by plain iteration.

pub fn naive_bisimulation(m1: &Edts, m2: &Edts) -> BTreeSet<(Configuration, Configuration)> {
    let succ = |m: &Edts| {
        let mut s: Vec<BTreeSet<(String, usize)>> = vec![BTreeSet::new(); m.len()];
        for (e, i, j) in m.all_transitions() {
            s[i].insert((e.to_string(), j));
        }
        s
    };
    let (s1, s2) = (succ(m1), succ(m2));
    let mut rel = vec![vec![false; m2.len()]; m1.len()];
    for i in 0..m1.len() {
        for j in 0..m2.len() {
            rel[i][j] = m1.conf(i).data == m2.conf(j).data;
        }
    }
    loop {
        let mut changed = false;
        for i in 0..m1.len() {
            for j in 0..m2.len() {
                if !rel[i][j] {
                    continue;
                }
                let zig = s1[i]
                    .iter()
                    .all(|(e, i2)| s2[j].iter().any(|(f, j2)| e == f && rel[*i2][*j2]));
                let zag = s2[j]
                    .iter()
                    .all(|(f, j2)| s1[i].iter().any(|(e, i2)| e == f && rel[*i2][*j2]));
                if !(zig && zag) {
                    rel[i][j] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..m1.len() {
        for j in 0..m2.len() {
            if rel[i][j] {
                out.insert((m1.conf(i).clone(), m2.conf(j).clone()));
            }
        }
    }
    out
}

pub fn naive_bisimilar(m1: &Edts, m2: &Edts) -> bool {
    let rel = naive_bisimulation(m1, m2);
    let (i1, i2) = (m1.initial_confs(), m2.initial_confs());
    i1.iter().all(|a| i2.iter().any(|b| rel.contains(&(a.clone(), b.clone()))))
        && i2.iter().all(|b| i1.iter().any(|a| rel.contains(&(a.clone(), b.clone()))))
}

// ---------------------------------------------------------------------------
// Reducts: the smallest set of reduced configurations containing the
// reduced initial ones and closed under reduced steps, computed by
// iterating over every configuration of the input until nothing changes.

/// Regular expressions over event names, evaluated as sets of index pairs.
#[derive(Debug, Clone)]
pub enum Re {
    Ev(String),
    Union(Box<Re>, Box<Re>),
    Seq(Box<Re>, Box<Re>),
    Star(Box<Re>),
}

pub fn re_pairs(m: &Edts, r: &Re) -> BTreeSet<(usize, usize)> {
    match r {
        Re::Ev(e) => m.transitions(e).collect(),
        Re::Union(a, b) => re_pairs(m, a).union(&re_pairs(m, b)).copied().collect(),
        Re::Seq(a, b) => {
            let (x, y) = (re_pairs(m, a), re_pairs(m, b));
            let mut out = BTreeSet::new();
            for &(i, k) in &x {
                for &(k2, j) in &y {
                    if k == k2 {
                        out.insert((i, j));
                    }
                }
            }
            out
        }
        Re::Star(a) => {
            let step = re_pairs(m, a);
            let mut out: BTreeSet<(usize, usize)> = (0..m.len()).map(|i| (i, i)).collect();
            loop {
                let mut next = out.clone();
                for &(i, k) in &out {
                    for &(k2, j) in &step {
                        if k == k2 {
                            next.insert((i, j));
                        }
                    }
                }
                if next.len() == out.len() {
                    return out;
                }
                out = next;
            }
        }
    }
}

/// `attrs` maps source attributes to target attributes; `events` gives
/// each source event's image as a regular expression over target events.
pub fn naive_reduct(m: &Edts, source: &EdSignature, attrs: &BTreeMap<String, String>, events: &BTreeMap<String, Re>) -> Edts {
    let red = |c: &Configuration| {
        let d = DataState::new(attrs.iter().map(|(a, b)| (a.clone(), c.data.get(b).expect("mapped"))));
        Configuration::new(c.ctrl.clone(), d)
    };
    let rels: BTreeMap<&String, BTreeSet<(usize, usize)>> = events.iter().map(|(e, r)| (e, re_pairs(m, r))).collect();
    let mut gamma: BTreeSet<Configuration> = m.initial_confs().iter().map(red).collect();
    let mut edges: BTreeSet<(String, Configuration, Configuration)> = BTreeSet::new();
    loop {
        let before = (gamma.len(), edges.len());
        for (e, pairs) in &rels {
            for &(i, j) in pairs {
                let (a, b) = (red(m.conf(i)), red(m.conf(j)));
                if gamma.contains(&a) {
                    gamma.insert(b.clone());
                    edges.insert(((*e).clone(), a, b));
                }
            }
        }
        if (gamma.len(), edges.len()) == before {
            break;
        }
    }
    let mut b = EdtsBuilder::new(source.clone(), m.init_ctrl());
    for c in m.initial_confs() {
        b.initial(red(&c).data);
    }
    for c in gamma {
        b.conf(c);
    }
    for (e, s, t) in edges {
        b.edge(&e, s, t);
    }
    b.build().expect("valid reduct")
}

// ---------------------------------------------------------------------------
// Models of operational specifications, straight from the definition.

fn injective_maps(from: &[String], to: &[String], fixed: (&str, &str)) -> Vec<BTreeMap<String, String>> {
    fn go(
        from: &[String],
        to: &[String],
        used: &mut Vec<bool>,
        cur: &mut BTreeMap<String, String>,
        out: &mut Vec<BTreeMap<String, String>>,
    ) {
        let Some((f, rest)) = from.split_first() else {
            out.push(cur.clone());
            return;
        };
        if cur.contains_key(f) {
            return go(rest, to, used, cur, out);
        }
        for (k, t) in to.iter().enumerate() {
            if !used[k] {
                used[k] = true;
                cur.insert(f.clone(), t.clone());
                go(rest, to, used, cur, out);
                cur.remove(f);
                used[k] = false;
            }
        }
    }
    let mut used: Vec<bool> = to.iter().map(|t| t == fixed.1).collect();
    let mut cur = BTreeMap::from([(fixed.0.to_string(), fixed.1.to_string())]);
    let mut out = Vec::new();
    go(from, to, &mut used, &mut cur, &mut out);
    out
}

/// Is `m` a model of `o`, with control states of `m` renamed injectively
/// into those of `o` and the initial one fixed.
pub fn naive_is_model(m: &Edts, o: &OpSpec) -> bool {
    if m.sig() != o.sig() {
        return false;
    }
    if !m.init_data().iter().all(|w| o.init_pred().eval_state(w).unwrap()) {
        return false;
    }
    let used: Vec<String> = m.used_ctrl_states().into_iter().collect();
    let spec_states: Vec<String> = o.ctrl_states().iter().cloned().collect();
    if used.len() > spec_states.len() {
        return false;
    }
    let universe = o.sig().data().enumerate(DEFAULT_STATE_CAP).unwrap();
    let edges: Vec<(String, Configuration, Configuration)> = m
        .all_transitions()
        .map(|(e, i, j)| (e.to_string(), m.conf(i).clone(), m.conf(j).clone()))
        .collect();
    'maps: for map in injective_maps(&used, &spec_states, (m.init_ctrl(), o.init_ctrl())) {
        for (e, s, t) in &edges {
            let justified = o.transitions().iter().any(|tr| {
                tr.event == *e
                    && tr.src == map[&s.ctrl]
                    && tr.dst == map[&t.ctrl]
                    && tr.guard.eval_state(&s.data).unwrap()
                    && tr.effect.eval_trans(&s.data, &t.data).unwrap()
            });
            if !justified {
                continue 'maps;
            }
        }
        for c in m.confs() {
            for tr in o.transitions() {
                if tr.src != map[&c.ctrl] || !tr.guard.eval_state(&c.data).unwrap() {
                    continue;
                }
                let realized = edges.iter().any(|(e, s, t)| {
                    *e == tr.event && s == c && map[&t.ctrl] == tr.dst && tr.effect.eval_trans(&s.data, &t.data).unwrap()
                });
                if !realized {
                    continue 'maps;
                }
            }
        }
        debug_assert!(universe.len() >= m.init_data().len());
        return true;
    }
    false
}

/// Text that identifies `m` up to renaming of its non-initial control
/// states among `names`.
pub fn canonical_form(m: &Edts, names: &BTreeSet<String>) -> String {
    let others: Vec<&String> = names.iter().filter(|n| *n != m.init_ctrl()).collect();
    let mut best: Option<String> = None;
    let mut perm: Vec<usize> = (0..others.len()).collect();
    loop {
        let rn = |c: &str| -> String {
            match others.iter().position(|o| *o == c) {
                Some(k) => others[perm[k]].clone(),
                None => c.to_string(),
            }
        };
        let mut lines: Vec<String> = m.init_data().iter().map(|w| format!("init {w}")).collect();
        for (e, i, j) in m.all_transitions() {
            let (s, t) = (m.conf(i), m.conf(j));
            lines.push(format!("{} {} {e} {} {}", rn(&s.ctrl), s.data, rn(&t.ctrl), t.data));
        }
        lines.sort();
        let text = lines.join("\n");
        if best.as_ref().map_or(true, |b| text < *b) {
            best = Some(text);
        }
        // next permutation
        let Some(k) = (1..perm.len()).rev().find(|&k| perm[k - 1] < perm[k]) else {
            break;
        };
        let l = (k..perm.len()).rev().find(|&l| perm[l] > perm[k - 1]).unwrap();
        perm.swap(k - 1, l);
        perm[k..].reverse();
    }
    best.unwrap_or_default()
}

/// Every model of `o`, by trying every initial set and every subset of the
/// justified edges. Only for specifications with few justified edges.
pub fn brute_force_models(o: &OpSpec) -> BTreeSet<String> {
    brute_force_models_by(o, |m| naive_is_model(m, o))
}

/// Number of distinct edges some transition of `o` justifies.
pub fn justified_edges(o: &OpSpec) -> usize {
    justified(o).len()
}

fn justified(o: &OpSpec) -> Vec<(String, Configuration, Configuration)> {
    let universe = o.sig().data().enumerate(DEFAULT_STATE_CAP).unwrap();
    let mut edges = Vec::new();
    for tr in o.transitions() {
        for w in &universe {
            if !tr.guard.eval_state(w).unwrap() {
                continue;
            }
            for w2 in &universe {
                if tr.effect.eval_trans(w, w2).unwrap() {
                    edges.push((
                        tr.event.clone(),
                        Configuration::new(tr.src.clone(), w.clone()),
                        Configuration::new(tr.dst.clone(), w2.clone()),
                    ));
                }
            }
        }
    }
    edges.sort();
    edges.dedup();
    edges
}

/// Like [`brute_force_models`] with a caller-supplied membership test.
pub fn brute_force_models_by(o: &OpSpec, member: impl Fn(&Edts) -> bool) -> BTreeSet<String> {
    let universe = o.sig().data().enumerate(DEFAULT_STATE_CAP).unwrap();
    let edges = justified(o);
    assert!(edges.len() <= 16, "too many justified edges for brute force: {}", edges.len());
    let allowed: Vec<&DataState> = universe.iter().filter(|w| o.init_pred().eval_state(w).unwrap()).collect();
    let mut out = BTreeSet::new();
    for init_mask in 1u32..(1 << allowed.len()) {
        for edge_mask in 0u32..(1 << edges.len()) {
            let mut b = EdtsBuilder::new(o.sig().clone(), o.init_ctrl());
            for (k, w) in allowed.iter().enumerate() {
                if init_mask & (1 << k) != 0 {
                    b.initial((*w).clone());
                }
            }
            for (k, (e, s, t)) in edges.iter().enumerate() {
                if edge_mask & (1 << k) != 0 {
                    b.edge(e, s.clone(), t.clone());
                }
            }
            let m = b.build().unwrap();
            // Unreachable edges do not change the model; only keep the
            // subsets that are already reachable so each model is built once.
            if m.restrict_to_reachable().transition_count() != m.transition_count() {
                continue;
            }
            let m = m.restrict_to_reachable();
            if member(&m) {
                out.insert(canonical_form(&m, o.ctrl_states()));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Mutations of a model, each a small structural edit.

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mutation {
    AddTransition,
    DeleteTransition,
    WidenInitial,
    Retarget,
    WeakenEffect,
}

pub const MUTATIONS: [Mutation; 5] = [
    Mutation::AddTransition,
    Mutation::DeleteTransition,
    Mutation::WidenInitial,
    Mutation::Retarget,
    Mutation::WeakenEffect,
];

/// All single mutations of kind `k` applied to `m`. Unreachable parts are
/// kept so that the mutant differs from `m` where the edit was made.
pub fn mutants(m: &Edts, k: Mutation) -> Vec<Edts> {
    let universe = m.sig().data().enumerate(DEFAULT_STATE_CAP).unwrap();
    let edges: Vec<(String, Configuration, Configuration)> = m
        .all_transitions()
        .map(|(e, i, j)| (e.to_string(), m.conf(i).clone(), m.conf(j).clone()))
        .collect();
    let ctrl: Vec<String> = m.used_ctrl_states().into_iter().collect();
    let rebuild = |init: &BTreeSet<DataState>, edges: &[(String, Configuration, Configuration)]| {
        let mut b = EdtsBuilder::new(m.sig().clone(), m.init_ctrl());
        for w in init {
            b.initial(w.clone());
        }
        for (e, s, t) in edges {
            b.edge(e, s.clone(), t.clone());
        }
        b.build().unwrap().restrict_to_reachable()
    };
    let init = m.init_data().clone();
    let mut out = Vec::new();
    match k {
        Mutation::AddTransition => {
            for s in m.confs() {
                for e in m.sig().events() {
                    for c in &ctrl {
                        for w in &universe {
                            let t = Configuration::new(c.clone(), w.clone());
                            let edge = (e.clone(), s.clone(), t);
                            if !edges.contains(&edge) {
                                let mut es = edges.clone();
                                es.push(edge);
                                out.push(rebuild(&init, &es));
                            }
                        }
                    }
                }
            }
        }
        Mutation::DeleteTransition => {
            for k in 0..edges.len() {
                let mut es = edges.clone();
                es.remove(k);
                out.push(rebuild(&init, &es));
            }
        }
        Mutation::WidenInitial => {
            for w in &universe {
                if !init.contains(w) {
                    let mut i2 = init.clone();
                    i2.insert(w.clone());
                    out.push(rebuild(&i2, &edges));
                }
            }
        }
        Mutation::Retarget => {
            for k in 0..edges.len() {
                for c in &ctrl {
                    if *c != edges[k].2.ctrl {
                        let mut es = edges.clone();
                        es[k].2 = Configuration::new(c.clone(), es[k].2.data.clone());
                        out.push(rebuild(&init, &es));
                    }
                }
            }
        }
        Mutation::WeakenEffect => {
            for k in 0..edges.len() {
                for w in &universe {
                    if *w != edges[k].2.data {
                        let mut es = edges.clone();
                        es[k].2 = Configuration::new(es[k].2.ctrl.clone(), w.clone());
                        out.push(rebuild(&init, &es));
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// A corpus of tiny operational specifications.

pub const HAND_CORPUS: &[&str] = &[
    // one-state loop, no data
    "opspec Loop events e; states s; init s; s --(e // true)--> s;",
    // one-state loop flipping a flag
    "opspec Flip events e; attrs b: bool; states s; init s [b]; s --(e // b' != b)--> s;",
    // nondeterministic flag
    "opspec Coin events e; attrs b: bool; states s; init s; s --(e // true)--> s;",
    // two states, guarded counter
    "opspec Count events tick, reset; attrs n: int[0..2]; states a, b; init a [n = 0];
     a --[n < 2](tick // n' = n + 1)--> a;
     a --[n = 2](reset // n' = 0)--> b;
     b --(tick // n' = n)--> a;",
    // the clearing-company shape with a saturating counter
    "opspec CCShape events verifyPIN, correctPIN, wrongPIN; attrs cnt: int[0..2]; states Idle, Busy; init Idle [cnt = 0];
     Idle --[cnt < 2](verifyPIN // cnt' = cnt)--> Busy;
     Busy --(correctPIN // cnt' = cnt + 1)--> Idle;
     Busy --(wrongPIN // cnt' = cnt + 1)--> Idle;",
    // overlapping guards on the same event
    "opspec Overlap events e; attrs x: int[0..1]; states p, q; init p;
     p --(e // x' = x)--> q;
     p --[x = 0](e // x' = 1)--> p;
     q --(e // true)--> p;",
    // three states in a ring
    "opspec Ring events go; attrs b: bool; states r0, r1, r2; init r0 [not b];
     r0 --(go // b' = b)--> r1;
     r1 --(go // b' != b)--> r2;
     r2 --(go // b' = b)--> r0;",
    // a deadlocking branch
    "opspec Stop events e, f; attrs b: bool; states s, t; init s;
     s --[b](e // b' = b)--> t;
     s --[not b](f // true)--> s;",
    // a state reachable only syntactically
    "opspec Dead events e; attrs b: bool; states s, t; init s [b];
     s --[not b](e // true)--> t;
     t --(e // true)--> s;",
    // two events racing to the same state
    "opspec Race events e, f; attrs x: int[0..1]; states s, t; init s [x = 0];
     s --(e // x' = 1)--> t;
     s --(f // x' = x)--> t;
     t --(e // x' = 0)--> s;",
];

/// Pairs of specifications with composable signatures.
pub const PAIRS: &[(&str, &str)] = &[
    (
        "opspec L events e; attrs b: bool; states s; init s [b]; s --(e // b' != b)--> s;",
        "opspec R events f; attrs n: int[0..1]; states t, u; init t;
         t --(f // n' = n)--> u; u --[n = 0](f // true)--> t;",
    ),
    (
        "opspec L events sync, e; attrs b: bool; states s, s1; init s;
         s --(sync // b' = b)--> s1; s1 --(e // true)--> s;",
        "opspec R events sync; attrs n: int[0..1]; states t; init t [n = 0];
         t --(sync // n' = 1 - n)--> t;",
    ),
    (
        "opspec L events verifyPIN, correctPIN, wrongPIN; attrs chk: bool; states P, V; init P [not chk];
         P --(verifyPIN // chk' = chk)--> V;
         V --(correctPIN // chk' = true)--> P;
         V --(wrongPIN // chk' = false)--> P;",
        "opspec CCShape events verifyPIN, correctPIN, wrongPIN; attrs cnt: int[0..2]; states Idle, Busy; init Idle [cnt = 0];
         Idle --[cnt < 2](verifyPIN // cnt' = cnt)--> Busy;
         Busy --(correctPIN // cnt' = cnt + 1)--> Idle;
         Busy --(wrongPIN // cnt' = cnt + 1)--> Idle;",
    ),
];

/// Hand-written specifications followed by seeded random ones.
pub fn corpus() -> Vec<OpSpec> {
    let mut out: Vec<OpSpec> = HAND_CORPUS.iter().map(|t| opspec_from(t)).collect();
    let sig = EdSignature::new(
        ["e", "f"],
        edspec::data::DataSignature::new([("b", edspec::data::Sort::Bool), ("x", edspec::data::Sort::Int { lo: 0, hi: 1 })])
            .unwrap(),
    );
    let mut r = sample::rng(7);
    for k in 0..14 {
        let states = 1 + k % 3;
        out.push(sample::random_opspec(&mut r, &format!("R{k}"), &sig, states, 1 + k % 3));
    }
    out
}

// ---------------------------------------------------------------------------
// Formulas, evaluated by direct recursion on the satisfaction clauses.

use edspec::logic::{Action, Formula};

pub fn naive_action(m: &Edts, a: &Action) -> BTreeSet<(usize, usize)> {
    match a {
        Action::Atom { event, effect } => m
            .transitions(event)
            .filter(|&(i, j)| effect.eval_trans(&m.conf(i).data, &m.conf(j).data).unwrap())
            .collect(),
        Action::Union(x, y) => naive_action(m, x).union(&naive_action(m, y)).copied().collect(),
        Action::Seq(x, y) => {
            let (r, s) = (naive_action(m, x), naive_action(m, y));
            let mut out = BTreeSet::new();
            for &(i, k) in &r {
                for &(k2, j) in &s {
                    if k == k2 {
                        out.insert((i, j));
                    }
                }
            }
            out
        }
        Action::Star(x) => {
            let step = naive_action(m, x);
            let mut out: BTreeSet<(usize, usize)> = (0..m.len()).map(|i| (i, i)).collect();
            loop {
                let mut next = out.clone();
                for &(i, k) in &out {
                    for &(k2, j) in &step {
                        if k == k2 {
                            next.insert((i, j));
                        }
                    }
                }
                if next.len() == out.len() {
                    return out;
                }
                out = next;
            }
        }
    }
}

pub fn naive_eval(m: &Edts, env: &BTreeMap<String, String>, i: usize, f: &Formula) -> bool {
    match f {
        Formula::Pred(e) => e.eval_state(&m.conf(i).data).unwrap(),
        Formula::Var(x) => m.conf(i).ctrl == env[x],
        Formula::Bind(x, g) => {
            let mut env2 = env.clone();
            env2.insert(x.clone(), m.conf(i).ctrl.clone());
            naive_eval(m, &env2, i, g)
        }
        Formula::At(x, g) => (0..m.len())
            .filter(|&j| m.conf(j).ctrl == env[x])
            .all(|j| naive_eval(m, env, j, g)),
        Formula::Diamond(a, g) => naive_action(m, a)
            .iter()
            .any(|&(s, t)| s == i && naive_eval(m, env, t, g)),
        Formula::Box(a, g) => naive_action(m, a)
            .iter()
            .all(|&(s, t)| s != i || naive_eval(m, env, t, g)),
        Formula::True => true,
        Formula::False => false,
        Formula::Not(g) => !naive_eval(m, env, i, g),
        Formula::Or(g, h) => naive_eval(m, env, i, g) || naive_eval(m, env, i, h),
        Formula::And(g, h) => naive_eval(m, env, i, g) && naive_eval(m, env, i, h),
        Formula::Implies(g, h) => !naive_eval(m, env, i, g) || naive_eval(m, env, i, h),
    }
}

pub fn naive_holds(m: &Edts, f: &Formula) -> bool {
    m.initial_indices().into_iter().all(|i| naive_eval(m, &BTreeMap::new(), i, f))
}

/// A small signature used by the randomized suites.
pub fn small_sig() -> EdSignature {
    EdSignature::new(
        ["a", "b"],
        edspec::data::DataSignature::new([
            ("p", edspec::data::Sort::Bool),
            ("n", edspec::data::Sort::Int { lo: 0, hi: 1 }),
        ])
        .unwrap(),
    )
}

/// Some transition of `o` whose guard holds at no configuration of `m`
/// carrying its source control state.
pub fn has_dead_guard(m: &Edts, o: &OpSpec) -> bool {
    o.transitions().iter().any(|t| {
        !m.confs()
            .iter()
            .any(|c| c.ctrl == t.src && t.guard.eval_state(&c.data).unwrap())
    })
}
