//! Synthesis of a sentence whose models are exactly the models of a finite
//! operational specification.
//!
//! The sentence binds the initial control state, then walks the
//! specification state by state: every outgoing transition becomes a
//! guarded diamond (binding its target on first visit), every visited state
//! gets a closing clause forbidding anything not described, and finally all
//! bound control states are required to be pairwise distinct.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::data::DEFAULT_STATE_CAP;
use crate::ident;
use crate::logic::{Action, Formula};
use crate::opspec::{OpSpec, OpSpecError, TransitionSpec};
use crate::pred::{Expr, PredError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharError {
    #[error("control state `{state}` has {count} outgoing `{event}` transitions, more than the limit of {cap}")]
    TooManyTransitions {
        state: String,
        event: String,
        count: usize,
        cap: usize,
    },
    #[error("guards of `{first}` and `{second}` overlap at {witness}")]
    DisjointnessViolation {
        first: String,
        second: String,
        witness: String,
    },
    #[error("states {0:?} are never bound; the specification has unreachable control states")]
    Unbound(Vec<String>),
    #[error(transparent)]
    Pred(#[from] PredError),
    #[error(transparent)]
    OpSpec(#[from] OpSpecError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharOptions {
    /// Use the linear closing clause, with simplified predicates, at every
    /// state whose same-event guards are pairwise disjoint.
    pub disjoint: bool,
    /// Most same-event transitions per state for the general closing clause.
    pub fin_cap: usize,
}

impl Default for CharOptions {
    fn default() -> Self {
        CharOptions {
            disjoint: false,
            fin_cap: 12,
        }
    }
}

/// One step of the synthesis, rendered as concrete syntax with the pending
/// recursive calls written as `sen(c, I, V, B)` and closing clauses as
/// `fin(c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub call: String,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Characterization {
    pub sentence: Formula,
    pub expansions: Vec<Expansion>,
}

#[derive(Debug, Clone)]
struct SenState {
    current: String,
    image: Vec<TransitionSpec>,
    to_visit: BTreeSet<String>,
    bound: BTreeSet<String>,
}

fn set_text<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    let v: Vec<String> = items.into_iter().map(|s| ident::display(s)).collect();
    format!("{{{}}}", v.join(", "))
}

impl fmt::Display for SenState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let quads: Vec<String> = self
            .image
            .iter()
            .map(|t| {
                format!(
                    "({}, {}, {}, {})",
                    t.guard,
                    ident::display(&t.event),
                    t.effect,
                    ident::display(&t.dst)
                )
            })
            .collect();
        write!(
            f,
            "sen({}, {{{}}}, {}, {})",
            ident::display(&self.current),
            quads.join(", "),
            set_text(&self.to_visit),
            set_text(&self.bound)
        )
    }
}

/// A formula context with one hole, filled by the rest of the synthesis.
enum Frame {
    Top { init: String, pred: Expr },
    Step { at: String, t: TransitionSpec, bind: bool },
    Close { state: String, fin: Formula },
}

const HOLE: &str = "__hole__";

impl Frame {
    fn fill(&self, body: Formula) -> Formula {
        match self {
            Frame::Top { init, pred } => Formula::bind(init, Formula::and(pred_formula(pred), body)),
            Frame::Step { at, t, bind } => {
                let inner = if *bind {
                    Formula::bind(&t.dst, body)
                } else {
                    Formula::and(Formula::var(&t.dst), body)
                };
                Formula::at(
                    at,
                    Formula::implies(
                        pred_formula(&t.guard),
                        Formula::diamond(Action::atom(&t.event, t.effect.clone()), inner),
                    ),
                )
            }
            Frame::Close { fin, .. } => Formula::and(fin.clone(), body),
        }
    }

    fn render(&self, rest: &str) -> String {
        let text = match self {
            Frame::Close { state, .. } => {
                Formula::and(Formula::var("__fin__"), Formula::var(HOLE))
                    .to_string()
                    .replace("__fin__", &format!("fin({})", ident::display(state)))
            }
            _ => self.fill(Formula::var(HOLE)).to_string(),
        };
        text.replace(HOLE, rest)
    }
}

fn pred_formula(e: &Expr) -> Formula {
    match e {
        Expr::Bool(true) => Formula::True,
        Expr::Bool(false) => Formula::False,
        other => Formula::Pred(other.clone()),
    }
}

/// `φ ∧ ψ` for a transition, as a transition predicate.
fn guard_and_effect(t: &TransitionSpec) -> Expr {
    Expr::and(t.guard.clone(), t.effect.clone())
}

/// General closing clause for state `c`: for every event and every subset
/// of its outgoing transitions, steps satisfying exactly that subset lead
/// to one of the subset's targets.
pub fn fin_clause(o: &OpSpec, c: &str, cap: usize) -> Result<Formula, CharError> {
    let mut parts = Vec::new();
    for e in o.sig().events() {
        let im = o.image_event(c, e);
        if im.len() > cap {
            return Err(CharError::TooManyTransitions {
                state: c.to_string(),
                event: e.clone(),
                count: im.len(),
                cap,
            });
        }
        for mask in 0u64..(1u64 << im.len()) {
            let (inside, outside): (Vec<_>, Vec<_>) =
                im.iter().enumerate().partition(|(k, _)| mask & (1 << k) != 0);
            let pred = Expr::and(
                Expr::conj(inside.iter().map(|(_, t)| guard_and_effect(t))),
                Expr::not(Expr::disj(outside.iter().map(|(_, t)| guard_and_effect(t)))),
            );
            let body = Formula::disj(inside.iter().map(|(_, t)| Formula::var(&t.dst)));
            parts.push(Formula::boxed(Action::atom(e, pred), body));
        }
    }
    Ok(Formula::at(c, Formula::conj(parts)))
}

/// Overlapping same-event guards at `c`, if any.
pub fn guard_overlap(o: &OpSpec, c: &str) -> Result<Option<CharError>, CharError> {
    let universe = o.sig().data().enumerate(DEFAULT_STATE_CAP).map_err(OpSpecError::from)?;
    for e in o.sig().events() {
        let im = o.image_event(c, e);
        for (k, t1) in im.iter().enumerate() {
            for t2 in &im[k + 1..] {
                for w in &universe {
                    if t1.guard.eval_state(w)? && t2.guard.eval_state(w)? {
                        return Ok(Some(CharError::DisjointnessViolation {
                            first: t1.to_string(),
                            second: t2.to_string(),
                            witness: w.to_string(),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Linear closing clause for a state whose same-event guards are pairwise
/// disjoint; predicates are simplified.
pub fn fin_clause_disjoint(o: &OpSpec, c: &str) -> Result<Formula, CharError> {
    if let Some(err) = guard_overlap(o, c)? {
        return Err(err);
    }
    let mut parts = Vec::new();
    for e in o.sig().events() {
        let im = o.image_event(c, e);
        for t in &im {
            parts.push(Formula::boxed(
                Action::atom(e, guard_and_effect(t).simplify()),
                Formula::var(&t.dst),
            ));
        }
        let rest = Expr::not(Expr::disj(im.iter().map(|t| guard_and_effect(t)))).simplify();
        parts.push(Formula::boxed(Action::atom(e, rest), Formula::False));
    }
    Ok(Formula::at(c, Formula::conj(parts)))
}

fn fin_for(o: &OpSpec, c: &str, opts: &CharOptions) -> Result<Formula, CharError> {
    if opts.disjoint && guard_overlap(o, c)?.is_none() {
        return fin_clause_disjoint(o, c);
    }
    fin_clause(o, c, opts.fin_cap)
}

/// The characterizing sentence of `o`, with a record of every expansion step.
pub fn characterize(o: &OpSpec, opts: &CharOptions) -> Result<Characterization, CharError> {
    let image = |c: &str| -> Vec<TransitionSpec> { o.image(c).into_iter().cloned().collect() };
    let c0 = o.init_ctrl().to_string();
    let mut state = SenState {
        current: c0.clone(),
        image: image(&c0),
        to_visit: o.ctrl_states().clone(),
        bound: BTreeSet::from([c0.clone()]),
    };
    let mut frames = vec![Frame::Top {
        init: c0.clone(),
        pred: o.init_pred().clone(),
    }];
    let mut expansions = vec![Expansion {
        call: "rho".into(),
        result: frames[0].render(&state.to_string()),
    }];
    let terminal = loop {
        let call = state.to_string();
        if !state.image.is_empty() {
            let t = state.image.remove(0);
            let bind = !state.bound.contains(&t.dst);
            if bind {
                state.bound.insert(t.dst.clone());
            }
            let frame = Frame::Step {
                at: state.current.clone(),
                t,
                bind,
            };
            expansions.push(Expansion {
                call,
                result: frame.render(&state.to_string()),
            });
            frames.push(frame);
            continue;
        }
        state.to_visit.remove(&state.current);
        let fin = fin_for(o, &state.current, opts)?;
        if state.to_visit.is_empty() {
            let states: Vec<&String> = o.ctrl_states().iter().collect();
            let mut distinct = Vec::new();
            for c1 in &states {
                for c2 in &states {
                    if c1 != c2 {
                        distinct.push(Formula::not(Formula::at(c1, Formula::var(c2))));
                    }
                }
            }
            let fin_text = format!("fin({})", ident::display(&state.current));
            let result = if distinct.is_empty() {
                fin_text.clone()
            } else {
                Formula::and(Formula::var("__fin__"), Formula::conj(distinct.clone()))
                    .to_string()
                    .replace("__fin__", &fin_text)
            };
            expansions.push(Expansion { call, result });
            expansions.push(Expansion {
                call: fin_text,
                result: fin.to_string(),
            });
            break if distinct.is_empty() {
                fin
            } else {
                Formula::and(fin, Formula::conj(distinct))
            };
        }
        let next = state
            .bound
            .intersection(&state.to_visit)
            .next()
            .cloned()
            .ok_or_else(|| CharError::Unbound(state.to_visit.iter().cloned().collect()))?;
        let fin_call = Expansion {
            call: format!("fin({})", ident::display(&state.current)),
            result: fin.to_string(),
        };
        let frame = Frame::Close {
            state: state.current.clone(),
            fin,
        };
        state.image = image(&next);
        state.current = next;
        expansions.push(Expansion {
            call,
            result: frame.render(&state.to_string()),
        });
        expansions.push(fin_call);
        frames.push(frame);
    };
    let sentence = frames.iter().rev().fold(terminal, |body, f| f.fill(body));
    Ok(Characterization {
        sentence,
        expansions,
    })
}

/// The characterizing sentence of `o`.
pub fn characterizing_sentence(o: &OpSpec) -> Result<Formula, CharError> {
    Ok(characterize(o, &CharOptions::default())?.sentence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataSignature;
    use crate::edts::EdSignature;

    fn single(events: &[&str], trans: Vec<TransitionSpec>) -> OpSpec {
        OpSpec::new(
            "O",
            EdSignature::new(events.iter().copied(), DataSignature::empty()),
            [],
            "c",
            Expr::Bool(true),
            trans,
        )
        .unwrap()
    }

    #[test]
    fn forbidden_event() {
        let o = single(&["e"], vec![]);
        assert_eq!(
            fin_clause(&o, "c", 12).unwrap().to_string(),
            "at c . [e // true and not false] false"
        );
        assert_eq!(
            fin_clause_disjoint(&o, "c").unwrap().to_string(),
            "at c . [e // true] false"
        );
    }

    #[test]
    fn overlapping_guards_give_four_conjuncts() {
        let t = |dst: &str| TransitionSpec::new("c", Expr::Bool(true), "e", Expr::Bool(true), dst);
        let o = OpSpec::new(
            "O",
            EdSignature::new(["e"], DataSignature::empty()),
            [],
            "c",
            Expr::Bool(true),
            vec![t("c"), t("d"), TransitionSpec::new("d", Expr::Bool(true), "e", Expr::Bool(true), "c")],
        )
        .unwrap();
        let fin = fin_clause(&o, "c", 12).unwrap();
        let text = fin.to_string();
        assert_eq!(text.matches("[e //").count(), 4);
        assert!(matches!(
            fin_clause_disjoint(&o, "c"),
            Err(CharError::DisjointnessViolation { .. })
        ));
        assert!(matches!(
            fin_clause(&o, "c", 1),
            Err(CharError::TooManyTransitions { count: 2, .. })
        ));
    }

    #[test]
    fn sentence_is_closed() {
        let o = single(&["e"], vec![TransitionSpec::new("c", Expr::Bool(true), "e", Expr::Bool(true), "c")]);
        let ch = characterize(&o, &CharOptions::default()).unwrap();
        assert!(ch.sentence.is_sentence());
        assert_eq!(
            ch.expansions[0].result,
            "down c . true and sen(c, {(true, e, true, c)}, {c}, {c})"
        );
    }
}
