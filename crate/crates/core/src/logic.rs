//! Hybrid dynamic logic over event/data transition systems: actions,
//! formulas, printing and model checking.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::edts::{Configuration, EdSignature, Edts};
use crate::ident;
use crate::pred::{Expr, PredError, PredKind};
use crate::relation::Relation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("action denotes no event")]
    EmptyAction,
    #[error("iteration count must be at least 1")]
    ZeroPower,
    #[error("unbound control-state variable `{0}`")]
    Unbound(String),
    #[error("free control-state variables {0:?} in a sentence")]
    NotASentence(Vec<String>),
    #[error("control state `{0}` does not belong to the model")]
    UnknownControlState(String),
    #[error("configuration {0} does not belong to the model")]
    UnknownConfiguration(Configuration),
    #[error(transparent)]
    Pred(#[from] PredError),
}

/// Structured actions: guarded events, choice, sequence and iteration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Atom { event: String, effect: Expr },
    Union(Box<Action>, Box<Action>),
    Seq(Box<Action>, Box<Action>),
    Star(Box<Action>),
}

impl Action {
    pub fn atom(event: &str, effect: Expr) -> Action {
        Action::Atom {
            event: event.to_string(),
            effect,
        }
    }

    /// `e`, short for `e // true`.
    pub fn event(event: &str) -> Action {
        Action::atom(event, Expr::Bool(true))
    }

    pub fn union(a: Action, b: Action) -> Action {
        Action::Union(Box::new(a), Box::new(b))
    }

    pub fn seq(a: Action, b: Action) -> Action {
        Action::Seq(Box::new(a), Box::new(b))
    }

    pub fn star(a: Action) -> Action {
        Action::Star(Box::new(a))
    }

    /// Choice over a set of events, each unconstrained.
    pub fn events<'a>(events: impl IntoIterator<Item = &'a str>) -> Result<Action, LogicError> {
        events
            .into_iter()
            .map(Action::event)
            .reduce(Action::union)
            .ok_or(LogicError::EmptyAction)
    }

    /// `E`: any event of the signature.
    pub fn any(sig: &EdSignature) -> Result<Action, LogicError> {
        Action::events(sig.events().iter().map(String::as_str))
    }

    /// `-F`: any event of the signature outside `excluded`.
    pub fn complement(sig: &EdSignature, excluded: &[String]) -> Result<Action, LogicError> {
        for e in excluded {
            if !sig.has_event(e) {
                return Err(LogicError::UnknownEvent(e.clone()));
            }
        }
        Action::events(
            sig.events()
                .iter()
                .filter(|e| !excluded.contains(e))
                .map(String::as_str),
        )
    }

    /// `λ^n`: `n` copies in sequence.
    pub fn power(a: Action, n: u32) -> Result<Action, LogicError> {
        if n == 0 {
            return Err(LogicError::ZeroPower);
        }
        let mut out = a.clone();
        for _ in 1..n {
            out = Action::seq(out, a.clone());
        }
        Ok(out)
    }

    pub fn typecheck(&self, sig: &EdSignature) -> Result<(), LogicError> {
        match self {
            Action::Atom { event, effect } => {
                if !sig.has_event(event) {
                    return Err(LogicError::UnknownEvent(event.clone()));
                }
                effect.typecheck(sig.data(), PredKind::Trans)?;
                Ok(())
            }
            Action::Union(a, b) | Action::Seq(a, b) => {
                a.typecheck(sig)?;
                b.typecheck(sig)
            }
            Action::Star(a) => a.typecheck(sig),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Action::Seq(..) => 1,
            Action::Union(..) => 2,
            Action::Star(..) => 3,
            Action::Atom { .. } => 4,
        }
    }

    /// `angle` is set inside `<...>`, where a predicate with a top-level `>`
    /// is parenthesised.
    fn fmt_in(&self, f: &mut fmt::Formatter<'_>, min: u8, angle: bool) -> fmt::Result {
        match self {
            Action::Atom { event, effect } => {
                let wrap = min >= 2;
                if wrap {
                    write!(f, "(")?;
                }
                write!(f, "{} // ", ident::display(event))?;
                if angle && !wrap && effect.has_top_level_gt() {
                    write!(f, "({effect})")?;
                } else {
                    write!(f, "{effect}")?;
                }
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            _ if self.precedence() < min => {
                write!(f, "(")?;
                self.fmt_in(f, 0, false)?;
                write!(f, ")")
            }
            Action::Seq(a, b) => {
                a.fmt_in(f, 1, angle)?;
                write!(f, "; ")?;
                if matches!(**b, Action::Seq(..)) {
                    write!(f, "(")?;
                    b.fmt_in(f, 0, false)?;
                    write!(f, ")")
                } else {
                    b.fmt_in(f, 1, angle)
                }
            }
            Action::Union(a, b) => {
                a.fmt_in(f, 2, angle)?;
                write!(f, " + ")?;
                b.fmt_in(f, 3, angle)
            }
            Action::Star(a) => {
                a.fmt_in(f, 3, angle)?;
                write!(f, "*")
            }
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_in(f, 0, false)
    }
}

/// Formulas of the logic. Control-state variables are bound by `down`,
/// and `at x . ρ` requires ρ at every configuration whose control state is
/// the value of `x`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Pred(Expr),
    Var(String),
    Bind(String, Box<Formula>),
    At(String, Box<Formula>),
    Diamond(Action, Box<Formula>),
    Box(Action, Box<Formula>),
    True,
    False,
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(x: &str) -> Formula {
        Formula::Var(x.to_string())
    }

    pub fn bind(x: &str, body: Formula) -> Formula {
        Formula::Bind(x.to_string(), Box::new(body))
    }

    pub fn at(x: &str, body: Formula) -> Formula {
        Formula::At(x.to_string(), Box::new(body))
    }

    pub fn diamond(a: Action, body: Formula) -> Formula {
        Formula::Diamond(a, Box::new(body))
    }

    pub fn boxed(a: Action, body: Formula) -> Formula {
        Formula::Box(a, Box::new(body))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(x) | Formula::At(x, _) if !bound.contains(x) => {
                out.insert(x.clone());
                if let Formula::At(_, b) = self {
                    b.collect_free(bound, out);
                }
            }
            Formula::At(_, b) | Formula::Diamond(_, b) | Formula::Box(_, b) | Formula::Not(b) => {
                b.collect_free(bound, out)
            }
            Formula::Bind(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Pred(_) | Formula::Var(_) | Formula::True | Formula::False => {}
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// No control-state variables, binders or jumps.
    pub fn is_hybrid_free(&self) -> bool {
        match self {
            Formula::Var(_) | Formula::Bind(..) | Formula::At(..) => false,
            Formula::Pred(_) | Formula::True | Formula::False => true,
            Formula::Diamond(_, b) | Formula::Box(_, b) | Formula::Not(b) => b.is_hybrid_free(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.is_hybrid_free() && b.is_hybrid_free()
            }
        }
    }

    pub fn typecheck(&self, sig: &EdSignature) -> Result<(), LogicError> {
        match self {
            Formula::Pred(p) => Ok(p.typecheck(sig.data(), PredKind::State)?),
            Formula::Var(_) | Formula::True | Formula::False => Ok(()),
            Formula::Bind(_, b) | Formula::At(_, b) | Formula::Not(b) => b.typecheck(sig),
            Formula::Diamond(a, b) | Formula::Box(a, b) => {
                a.typecheck(sig)?;
                b.typecheck(sig)
            }
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.typecheck(sig)?;
                b.typecheck(sig)
            }
        }
    }

    /// Number of nodes, counting actions and predicates as one.
    pub fn size(&self) -> usize {
        match self {
            Formula::Pred(_) | Formula::Var(_) | Formula::True | Formula::False => 1,
            Formula::Bind(_, b)
            | Formula::At(_, b)
            | Formula::Not(b)
            | Formula::Diamond(_, b)
            | Formula::Box(_, b) => 1 + b.size(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

const F_IMPLIES: u8 = 1;
const F_OR: u8 = 2;
const F_AND: u8 = 3;
const F_UNARY: u8 = 4;

impl Formula {
    fn precedence(&self) -> u8 {
        match self {
            Formula::Bind(..) | Formula::At(..) => 0,
            Formula::Implies(..) => F_IMPLIES,
            Formula::Or(..) => F_OR,
            Formula::And(..) => F_AND,
            _ => F_UNARY,
        }
    }

    /// `open_right`: nothing follows the printed text in the enclosing
    /// context, so a binder body may extend to the end.
    fn fmt_in(&self, f: &mut fmt::Formatter<'_>, min: u8, open_right: bool) -> fmt::Result {
        let p = self.precedence();
        let binder = p == 0;
        if (binder && !open_right) || (!binder && p < min) {
            write!(f, "(")?;
            self.fmt_in(f, 0, true)?;
            return write!(f, ")");
        }
        match self {
            Formula::Pred(e) => {
                if e.precedence() < 5 {
                    write!(f, "({e})")
                } else {
                    write!(f, "{e}")
                }
            }
            Formula::Var(x) => write!(f, "{}", ident::display(x)),
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Bind(x, b) => {
                write!(f, "down {} . ", ident::display(x))?;
                b.fmt_in(f, 0, true)
            }
            Formula::At(x, b) => {
                write!(f, "at {} . ", ident::display(x))?;
                b.fmt_in(f, 0, true)
            }
            Formula::Diamond(a, b) => {
                write!(f, "<")?;
                a.fmt_in(f, 0, true)?;
                write!(f, "> ")?;
                b.fmt_in(f, F_UNARY, open_right)
            }
            Formula::Box(a, b) => {
                write!(f, "[")?;
                a.fmt_in(f, 0, false)?;
                write!(f, "] ")?;
                b.fmt_in(f, F_UNARY, open_right)
            }
            Formula::Not(b) => {
                write!(f, "not ")?;
                b.fmt_in(f, F_UNARY, open_right)
            }
            Formula::And(a, b) => {
                a.fmt_in(f, F_AND, false)?;
                write!(f, " and ")?;
                b.fmt_in(f, F_AND + 1, open_right)
            }
            Formula::Or(a, b) => {
                a.fmt_in(f, F_OR, false)?;
                write!(f, " or ")?;
                b.fmt_in(f, F_OR + 1, open_right)
            }
            Formula::Implies(a, b) => {
                a.fmt_in(f, F_IMPLIES + 1, false)?;
                write!(f, " -> ")?;
                b.fmt_in(f, F_IMPLIES, open_right)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_in(f, 0, true)
    }
}

/// Assignment of control states to variables.
pub type Valuation = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub conf: Configuration,
    pub note: String,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", self.conf, self.note)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceVerdict {
    pub holds: bool,
    /// First initial configuration where the sentence fails, with an
    /// explanation.
    pub failure: Option<(Configuration, Vec<TraceStep>)>,
}

/// Evaluates formulas over one model, caching action relations and
/// subformula results.
pub struct Checker<'m> {
    model: &'m Edts,
    ctrl_names: Vec<String>,
    ctrl_of: Vec<u32>,
    by_ctrl: Vec<Vec<usize>>,
    steps: BTreeMap<String, Relation>,
    rel_cache: HashMap<Action, Rc<Relation>>,
    graph: Vec<Vec<usize>>,
}

type Env = Vec<(String, u32)>;

struct Memo {
    results: HashMap<(usize, usize, Vec<u32>), bool>,
    free: HashMap<usize, Rc<Vec<String>>>,
}

impl<'m> Checker<'m> {
    pub fn new(model: &'m Edts) -> Self {
        let ctrl_names: Vec<String> = model.ctrl_states().iter().cloned().collect();
        let idx: BTreeMap<&str, u32> = ctrl_names
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i as u32))
            .collect();
        let ctrl_of: Vec<u32> = model.confs().iter().map(|c| idx[c.ctrl.as_str()]).collect();
        let mut by_ctrl = vec![Vec::new(); ctrl_names.len()];
        for (i, &c) in ctrl_of.iter().enumerate() {
            by_ctrl[c as usize].push(i);
        }
        let steps = model
            .sig()
            .events()
            .iter()
            .map(|e| (e.clone(), model.step_relation(e)))
            .collect();
        let mut graph = vec![Vec::new(); model.len()];
        for (_, i, j) in model.all_transitions() {
            graph[i].push(j);
        }
        Checker {
            model,
            ctrl_names,
            ctrl_of,
            by_ctrl,
            steps,
            rel_cache: HashMap::new(),
            graph,
        }
    }

    pub fn model(&self) -> &Edts {
        self.model
    }

    /// The relation denoted by an action.
    pub fn relation(&mut self, a: &Action) -> Result<Rc<Relation>, LogicError> {
        if let Some(r) = self.rel_cache.get(a) {
            return Ok(r.clone());
        }
        let n = self.model.len();
        let r = match a {
            Action::Atom { event, effect } => {
                let step = self
                    .steps
                    .get(event)
                    .ok_or_else(|| LogicError::UnknownEvent(event.clone()))?;
                let mut r = Relation::empty(n);
                for (i, j) in step.pairs() {
                    let (pre, post) = (&self.model.conf(i).data, &self.model.conf(j).data);
                    if effect.eval_trans(pre, post)? {
                        r.insert(i, j);
                    }
                }
                r
            }
            Action::Union(x, y) => self.relation(x)?.union(&*self.relation(y)?),
            Action::Seq(x, y) => self.relation(x)?.compose(&*self.relation(y)?),
            Action::Star(x) => self.relation(x)?.closure(),
        };
        let r = Rc::new(r);
        self.rel_cache.insert(a.clone(), r.clone());
        Ok(r)
    }

    fn ctrl_index(&self, name: &str) -> Result<u32, LogicError> {
        self.ctrl_names
            .binary_search_by(|c| c.as_str().cmp(name))
            .map(|i| i as u32)
            .map_err(|_| LogicError::UnknownControlState(name.to_string()))
    }

    fn env_of(&self, v: &Valuation) -> Result<Env, LogicError> {
        v.iter()
            .map(|(x, c)| Ok((x.clone(), self.ctrl_index(c)?)))
            .collect()
    }

    /// `M, v, γ ⊨ ρ`.
    pub fn satisfies(&mut self, v: &Valuation, conf: &Configuration, f: &Formula) -> Result<bool, LogicError> {
        let i = self
            .model
            .index_of(conf)
            .ok_or_else(|| LogicError::UnknownConfiguration(conf.clone()))?;
        let mut env = self.env_of(v)?;
        let mut memo = Memo::new();
        self.eval(f, i, &mut env, &mut memo)
    }

    /// Truth value of `f` at every configuration.
    pub fn truth_table(&mut self, v: &Valuation, f: &Formula) -> Result<Vec<bool>, LogicError> {
        let mut env = self.env_of(v)?;
        let mut memo = Memo::new();
        (0..self.model.len())
            .map(|i| self.eval(f, i, &mut env, &mut memo))
            .collect()
    }

    /// `M ⊨ ρ`: ρ holds at every initial configuration.
    pub fn check_sentence(&mut self, f: &Formula) -> Result<SentenceVerdict, LogicError> {
        let free = f.free_vars();
        if !free.is_empty() {
            return Err(LogicError::NotASentence(free.into_iter().collect()));
        }
        let mut memo = Memo::new();
        let mut env = Env::new();
        for i in self.model.initial_indices() {
            if !self.eval(f, i, &mut env, &mut memo)? {
                let mut trace = Vec::new();
                self.explain(f, i, &mut env, &mut memo, false, &mut trace, 0)?;
                return Ok(SentenceVerdict {
                    holds: false,
                    failure: Some((self.model.conf(i).clone(), trace)),
                });
            }
        }
        Ok(SentenceVerdict {
            holds: true,
            failure: None,
        })
    }

    fn lookup(&self, env: &Env, x: &str) -> Result<u32, LogicError> {
        env.iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, c)| *c)
            .ok_or_else(|| LogicError::Unbound(x.to_string()))
    }

    fn eval(&mut self, f: &Formula, i: usize, env: &mut Env, memo: &mut Memo) -> Result<bool, LogicError> {
        match f {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Pred(p) => Ok(p.eval_state(&self.model.conf(i).data)?),
            Formula::Var(x) => Ok(self.lookup(env, x)? == self.ctrl_of[i]),
            Formula::Not(a) => Ok(!self.eval(a, i, env, memo)?),
            Formula::And(a, b) => Ok(self.eval(a, i, env, memo)? && self.eval(b, i, env, memo)?),
            Formula::Or(a, b) => Ok(self.eval(a, i, env, memo)? || self.eval(b, i, env, memo)?),
            Formula::Implies(a, b) => Ok(!self.eval(a, i, env, memo)? || self.eval(b, i, env, memo)?),
            _ => {
                let key = (f as *const Formula as usize, i, memo.key(f, env, self)?);
                if let Some(&r) = memo.results.get(&key) {
                    return Ok(r);
                }
                let r = self.eval_modal(f, i, env, memo)?;
                memo.results.insert(key, r);
                Ok(r)
            }
        }
    }

    fn eval_modal(&mut self, f: &Formula, i: usize, env: &mut Env, memo: &mut Memo) -> Result<bool, LogicError> {
        match f {
            Formula::Bind(x, b) => {
                env.push((x.clone(), self.ctrl_of[i]));
                let r = self.eval(b, i, env, memo);
                env.pop();
                r
            }
            Formula::At(x, b) => {
                let c = self.lookup(env, x)? as usize;
                for j in self.by_ctrl[c].clone() {
                    if !self.eval(b, j, env, memo)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Diamond(a, b) => {
                let r = self.relation(a)?;
                for j in r.successors(i) {
                    if self.eval(b, j, env, memo)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Box(a, b) => {
                let r = self.relation(a)?;
                for j in r.successors(i) {
                    if !self.eval(b, j, env, memo)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => unreachable!("non-modal formulas are evaluated directly"),
        }
    }

    /// Breadth-first distances from `i` over all transitions.
    fn distances(&self, i: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.model.len()];
        dist[i] = 0;
        let mut q = VecDeque::from([i]);
        while let Some(k) = q.pop_front() {
            for &j in &self.graph[k] {
                if dist[j] == usize::MAX {
                    dist[j] = dist[k] + 1;
                    q.push_back(j);
                }
            }
        }
        dist
    }

    /// Append steps explaining why `f` has truth value `value` at `i`.
    #[allow(clippy::too_many_arguments)]
    fn explain(
        &mut self,
        f: &Formula,
        i: usize,
        env: &mut Env,
        memo: &mut Memo,
        value: bool,
        out: &mut Vec<TraceStep>,
        depth: usize,
    ) -> Result<(), LogicError> {
        const MAX_DEPTH: usize = 64;
        let conf = self.model.conf(i).clone();
        let step = |note: String| TraceStep {
            conf: conf.clone(),
            note,
        };
        if depth > MAX_DEPTH {
            out.push(step("...".into()));
            return Ok(());
        }
        match f {
            Formula::True | Formula::False => {
                out.push(step(format!("`{f}` is {value}")));
            }
            Formula::Pred(p) => out.push(step(format!("predicate `{p}` is {value}"))),
            Formula::Var(x) => {
                let c = self.lookup(env, x)?;
                out.push(step(format!(
                    "`{x}` denotes {}, control state is {}",
                    self.ctrl_names[c as usize], conf.ctrl
                )));
            }
            Formula::Not(a) => self.explain(a, i, env, memo, !value, out, depth + 1)?,
            Formula::And(a, b) | Formula::Or(a, b) => {
                let is_and = matches!(f, Formula::And(..));
                if is_and == value {
                    // every operand contributes
                    self.explain(a, i, env, memo, value, out, depth + 1)?;
                    self.explain(b, i, env, memo, value, out, depth + 1)?;
                } else if self.eval(a, i, env, memo)? == value {
                    self.explain(a, i, env, memo, value, out, depth + 1)?;
                } else {
                    self.explain(b, i, env, memo, value, out, depth + 1)?;
                }
            }
            Formula::Implies(a, b) => {
                if value {
                    if !self.eval(a, i, env, memo)? {
                        self.explain(a, i, env, memo, false, out, depth + 1)?;
                    } else {
                        self.explain(b, i, env, memo, true, out, depth + 1)?;
                    }
                } else {
                    self.explain(a, i, env, memo, true, out, depth + 1)?;
                    self.explain(b, i, env, memo, false, out, depth + 1)?;
                }
            }
            Formula::Bind(x, b) => {
                out.push(step(format!("bind `{x}` to {}", conf.ctrl)));
                env.push((x.clone(), self.ctrl_of[i]));
                let r = self.explain(b, i, env, memo, value, out, depth + 1);
                env.pop();
                r?;
            }
            Formula::At(x, b) => {
                let c = self.lookup(env, x)? as usize;
                if value {
                    out.push(step(format!(
                        "body of `at {x}` holds at all configurations of {}",
                        self.ctrl_names[c]
                    )));
                } else {
                    for j in self.by_ctrl[c].clone() {
                        if !self.eval(b, j, env, memo)? {
                            out.push(step(format!("jump to {}", self.model.conf(j))));
                            return self.explain(b, j, env, memo, false, out, depth + 1);
                        }
                    }
                }
            }
            Formula::Diamond(a, b) | Formula::Box(a, b) => {
                let is_diamond = matches!(f, Formula::Diamond(..));
                // A witness successor exists exactly when the diamond holds
                // or the box fails.
                if is_diamond == value {
                    let want = is_diamond;
                    let r = self.relation(a)?;
                    let dist = self.distances(i);
                    let mut best: Option<usize> = None;
                    for j in r.successors(i) {
                        if self.eval(b, j, env, memo)? == want
                            && best.is_none_or(|k| dist[j] < dist[k])
                        {
                            best = Some(j);
                        }
                    }
                    let j = best.expect("witness exists");
                    out.push(step(format!(
                        "`{a}` reaches {} where the body is {want}",
                        self.model.conf(j)
                    )));
                    self.explain(b, j, env, memo, want, out, depth + 1)?;
                } else {
                    let n = self.relation(a)?.row(i).count_ones(..);
                    let what = if is_diamond {
                        "no successor satisfies the body"
                    } else {
                        "every successor satisfies the body"
                    };
                    out.push(step(format!("`{a}` has {n} successor(s); {what}")));
                }
            }
        }
        Ok(())
    }
}

impl Memo {
    fn new() -> Self {
        Memo {
            results: HashMap::new(),
            free: HashMap::new(),
        }
    }

    fn key(&mut self, f: &Formula, env: &Env, ck: &Checker<'_>) -> Result<Vec<u32>, LogicError> {
        let ptr = f as *const Formula as usize;
        let free = self
            .free
            .entry(ptr)
            .or_insert_with(|| Rc::new(f.free_vars().into_iter().collect()))
            .clone();
        free.iter().map(|x| ck.lookup(env, x)).collect()
    }
}

/// `M, v, γ ⊨ ρ`.
pub fn satisfies(m: &Edts, v: &Valuation, conf: &Configuration, f: &Formula) -> Result<bool, LogicError> {
    Checker::new(m).satisfies(v, conf, f)
}

/// `M ⊨ ρ` for a sentence ρ, with a failure explanation when it does not hold.
pub fn check_sentence(m: &Edts, f: &Formula) -> Result<SentenceVerdict, LogicError> {
    Checker::new(m).check_sentence(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataSignature, DataState, Sort, Value};
    use crate::edts::EdtsBuilder;

    fn d(v: bool) -> DataState {
        DataState::new([("val", Value::Bool(v))])
    }

    fn switch_sig() -> EdSignature {
        EdSignature::new(["switch"], DataSignature::new([("val", Sort::Bool)]).unwrap())
    }

    fn switch_model() -> Edts {
        let mut b = EdtsBuilder::new(switch_sig(), "c0");
        b.initial(d(true));
        b.edge("switch", Configuration::new("c0", d(true)), Configuration::new("c1", d(false)));
        b.edge("switch", Configuration::new("c1", d(false)), Configuration::new("c0", d(true)));
        b.build().unwrap()
    }

    fn switch_sentence() -> Formula {
        let on = Expr::eq(Expr::post("val"), Expr::Bool(true));
        let off = Expr::eq(Expr::post("val"), Expr::Bool(false));
        Formula::bind(
            "x0",
            Formula::and(
                Formula::Pred(Expr::eq(Expr::attr("val"), Expr::Bool(true))),
                Formula::diamond(
                    Action::atom("switch", off),
                    Formula::diamond(Action::atom("switch", on), Formula::var("x0")),
                ),
            ),
        )
    }

    #[test]
    fn switch_satisfies_its_sentence() {
        let v = check_sentence(&switch_model(), &switch_sentence()).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn deadlock_freedom_and_its_failure() {
        let sig = switch_sig();
        let e = Action::any(&sig).unwrap();
        let dl = Formula::boxed(Action::star(e.clone()), Formula::diamond(e, Formula::True));
        assert!(check_sentence(&switch_model(), &dl).unwrap().holds);

        let mut b = EdtsBuilder::new(sig, "c0");
        b.initial(d(true));
        b.edge("switch", Configuration::new("c0", d(true)), Configuration::new("c1", d(false)));
        let stuck = b.build().unwrap();
        let v = check_sentence(&stuck, &dl).unwrap();
        assert!(!v.holds);
        let (_, trace) = v.failure.unwrap();
        assert!(trace.iter().any(|s| s.conf == Configuration::new("c1", d(false))));
    }

    #[test]
    fn at_is_universal_over_the_control_state() {
        let sig = switch_sig();
        let mut b = EdtsBuilder::new(sig, "c0");
        b.initial(d(true));
        b.edge("switch", Configuration::new("c0", d(true)), Configuration::new("c0", d(false)));
        let m = b.build().unwrap();
        let f = Formula::bind(
            "x",
            Formula::at("x", Formula::Pred(Expr::attr("val"))),
        );
        assert!(!check_sentence(&m, &f).unwrap().holds);
    }

    #[test]
    fn sentences_must_be_closed() {
        let f = Formula::var("x");
        assert_eq!(
            check_sentence(&switch_model(), &f),
            Err(LogicError::NotASentence(vec!["x".into()]))
        );
    }

    #[test]
    fn printing() {
        assert_eq!(
            switch_sentence().to_string(),
            "down x0 . val = true and <switch // val' = false> <switch // val' = true> x0"
        );
        let a = Action::seq(
            Action::star(Action::event("a")),
            Action::union(
                Action::atom("b", Expr::eq(Expr::post("val"), Expr::Bool(true))),
                Action::event("c"),
            ),
        );
        let f = Formula::and(
            Formula::bind("x", Formula::var("x")),
            Formula::boxed(a, Formula::False),
        );
        assert_eq!(
            f.to_string(),
            "(down x . x) and [(a // true)*; (b // val' = true) + (c // true)] false"
        );
    }
}
