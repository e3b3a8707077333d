//! Seeded random generators for models, actions, sentences and
//! operational specifications.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{DataSignature, Sort, DEFAULT_STATE_CAP};
use crate::edts::{Configuration, EdSignature, Edts, EdtsBuilder};
use crate::logic::{Action, Formula};
use crate::opspec::{OpSpec, TransitionSpec};
use crate::pred::{ArithOp, CmpOp, Expr};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` items chosen without replacement, kept in their original order.
pub fn pick<T: Clone>(items: &[T], n: usize, seed: u64) -> Vec<T> {
    let mut idx = rand::seq::index::sample(&mut rng(seed), items.len(), n.min(items.len())).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i].clone()).collect()
}

/// A random reachable edts over `sig` with control states `c0..c{k-1}`.
/// Each configuration gets each event edge with probability `density`.
pub fn random_edts(r: &mut impl Rng, sig: &EdSignature, ctrl_states: usize, density: f64) -> Edts {
    let data = sig.data().enumerate(DEFAULT_STATE_CAP).expect("small universe");
    let ctrl: Vec<String> = (0..ctrl_states.max(1)).map(|i| format!("c{i}")).collect();
    let confs: Vec<Configuration> = ctrl
        .iter()
        .flat_map(|c| data.iter().map(move |d| Configuration::new(c.clone(), d.clone())))
        .collect();
    let mut b = EdtsBuilder::new(sig.clone(), "c0");
    let n_init = r.gen_range(1..=data.len().min(2));
    for d in data.choose_multiple(r, n_init) {
        b.initial(d.clone());
    }
    let events: Vec<&String> = sig.events().iter().collect();
    for s in &confs {
        for e in &events {
            if r.gen_bool(density) {
                let t = confs.choose(r).expect("non-empty");
                b.edge(e, s.clone(), t.clone());
            }
        }
    }
    b.build().expect("events from the signature").restrict_to_reachable()
}

/// A copy of `m` in which every configuration is split into two that
/// behave alike; each transition target picks one of the copies at random.
/// The result is bisimilar to `m` but usually has more control states.
pub fn bisimilar_duplicate(r: &mut impl Rng, m: &Edts) -> Edts {
    let copy = |c: &Configuration, k: u8| {
        if k == 0 {
            c.clone()
        } else {
            Configuration::new(format!("{}_dup", c.ctrl), c.data.clone())
        }
    };
    let mut b = EdtsBuilder::new(m.sig().clone(), m.init_ctrl());
    for d in m.init_data() {
        b.initial(d.clone());
    }
    for (e, i, j) in m.all_transitions() {
        let (s, t) = (m.conf(i), m.conf(j));
        for k in 0..2u8 {
            b.edge(e, copy(s, k), copy(t, r.gen_range(0..2)));
        }
    }
    b.build().expect("same signature").restrict_to_reachable()
}

fn random_int(r: &mut impl Rng, lo: i64, hi: i64) -> i64 {
    r.gen_range(lo..=hi)
}

/// A state predicate: a literal over one attribute, or `true`.
pub fn random_state_pred(r: &mut impl Rng, data: &DataSignature) -> Expr {
    let attrs: Vec<(&str, Sort)> = data.iter().collect();
    let Some(&(a, sort)) = attrs.choose(r) else {
        return Expr::Bool(r.gen_bool(0.7));
    };
    let atom = match sort {
        Sort::Bool => Expr::attr(a),
        Sort::Int { lo, hi } => {
            let op = *[CmpOp::Eq, CmpOp::Lt, CmpOp::Le, CmpOp::Ne].choose(r).expect("non-empty");
            Expr::cmp(op, Expr::attr(a), Expr::Int(random_int(r, lo, hi)))
        }
    };
    if r.gen_bool(0.3) {
        Expr::not(atom)
    } else {
        atom
    }
}

/// A transition predicate constraining each attribute independently.
pub fn random_trans_pred(r: &mut impl Rng, data: &DataSignature) -> Expr {
    let mut parts = Vec::new();
    for (a, sort) in data.iter() {
        let p = match (sort, r.gen_range(0..4)) {
            (_, 0) => continue,
            (_, 1) => Expr::eq(Expr::post(a), Expr::attr(a)),
            (Sort::Bool, 2) => Expr::eq(Expr::post(a), Expr::Bool(r.gen())),
            (Sort::Bool, _) => Expr::not(Expr::eq(Expr::post(a), Expr::attr(a))),
            (Sort::Int { lo, hi }, 2) => Expr::eq(Expr::post(a), Expr::Int(random_int(r, lo, hi))),
            (Sort::Int { .. }, _) => Expr::eq(
                Expr::post(a),
                Expr::arith(ArithOp::Add, Expr::attr(a), Expr::Int(1)),
            ),
        };
        parts.push(p);
    }
    Expr::conj(parts)
}

fn random_atom(r: &mut impl Rng, sig: &EdSignature) -> Action {
    let events: Vec<&String> = sig.events().iter().collect();
    let e = events.choose(r).expect("signature has events");
    let psi = if r.gen_bool(0.5) {
        Expr::Bool(true)
    } else {
        random_trans_pred(r, sig.data())
    };
    Action::atom(e, psi)
}

pub fn random_action(r: &mut impl Rng, sig: &EdSignature, depth: usize) -> Action {
    if depth == 0 {
        return random_atom(r, sig);
    }
    match r.gen_range(0..6) {
        0 => Action::union(random_action(r, sig, depth - 1), random_action(r, sig, depth - 1)),
        1 => Action::seq(random_action(r, sig, depth - 1), random_action(r, sig, depth - 1)),
        2 => Action::star(random_action(r, sig, depth - 1)),
        _ => random_atom(r, sig),
    }
}

/// A sentence without binders, jumps or variables.
pub fn random_hybrid_free(r: &mut impl Rng, sig: &EdSignature, depth: usize) -> Formula {
    if depth == 0 {
        return match r.gen_range(0..4) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::Pred(random_state_pred(r, sig.data())),
        };
    }
    let d = depth - 1;
    match r.gen_range(0..7) {
        0 => Formula::not(random_hybrid_free(r, sig, d)),
        1 => Formula::and(random_hybrid_free(r, sig, d), random_hybrid_free(r, sig, d)),
        2 => Formula::or(random_hybrid_free(r, sig, d), random_hybrid_free(r, sig, d)),
        3 => Formula::implies(random_hybrid_free(r, sig, d), random_hybrid_free(r, sig, d)),
        4 | 5 => {
            let ad = r.gen_range(0..=2);
            let a = random_action(r, sig, ad);
            Formula::diamond(a, random_hybrid_free(r, sig, d))
        }
        _ => {
            let ad = r.gen_range(0..=2);
            let a = random_action(r, sig, ad);
            Formula::boxed(a, random_hybrid_free(r, sig, d))
        }
    }
}

/// A small operational specification. Every control state lies on a
/// transition chain from `c0`, and each transition either keeps the data
/// or sets each attribute to a fixed value, so it is realizable everywhere.
pub fn random_opspec(r: &mut impl Rng, name: &str, sig: &EdSignature, ctrl_states: usize, extra: usize) -> OpSpec {
    let ctrl: Vec<String> = (0..ctrl_states.max(1)).map(|i| format!("c{i}")).collect();
    let events: Vec<&String> = sig.events().iter().collect();
    let realizable_effect = |r: &mut ChaCha8Rng| {
        let parts: Vec<Expr> = sig
            .data()
            .iter()
            .map(|(a, sort)| match (sort, r.gen_bool(0.5)) {
                (_, true) => Expr::eq(Expr::post(a), Expr::attr(a)),
                (Sort::Bool, false) => Expr::eq(Expr::post(a), Expr::Bool(r.gen())),
                (Sort::Int { lo, hi }, false) => Expr::eq(Expr::post(a), Expr::Int(random_int(r, lo, hi))),
            })
            .collect();
        Expr::conj(parts)
    };
    let mut inner = ChaCha8Rng::seed_from_u64(r.gen());
    let mut ts = Vec::new();
    let guard = |r: &mut ChaCha8Rng| {
        if r.gen_bool(0.5) {
            Expr::Bool(true)
        } else {
            random_state_pred(r, sig.data())
        }
    };
    for i in 1..ctrl.len() {
        let src = &ctrl[inner.gen_range(0..i)];
        let e = events.choose(&mut inner).expect("signature has events");
        let eff = realizable_effect(&mut inner);
        ts.push(TransitionSpec::new(src, Expr::Bool(true), e, eff, &ctrl[i]));
    }
    for _ in 0..extra {
        let src = ctrl.choose(&mut inner).expect("non-empty");
        let dst = ctrl.choose(&mut inner).expect("non-empty");
        let e = events.choose(&mut inner).expect("signature has events");
        let g = guard(&mut inner);
        let eff = realizable_effect(&mut inner);
        ts.push(TransitionSpec::new(src, g, e, eff, dst));
    }
    let init = if inner.gen_bool(0.5) {
        Expr::Bool(true)
    } else {
        random_state_pred(&mut inner, sig.data())
    };
    let init = if sig.data().enumerate(DEFAULT_STATE_CAP).expect("small").iter().any(|d| init.eval_state(d) == Ok(true)) {
        init
    } else {
        Expr::Bool(true)
    };
    OpSpec::new(name, sig.clone(), ctrl.clone(), "c0", init, ts).expect("well-formed by construction")
}
