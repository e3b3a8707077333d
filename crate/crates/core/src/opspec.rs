//! Operational specifications: control states with guarded, effect-annotated
//! transitions, their models, canonical models, syntactic parallel
//! composition and exhaustive model enumeration for tiny instances.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::data::{DataError, DataState, DEFAULT_STATE_CAP};
use crate::edts::{Configuration, EdSignature, Edts, EdtsBuilder, EdtsError};
use crate::ident;
use crate::pred::{Expr, PredError, PredKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpSpecError {
    #[error("control state `{0}` is not declared")]
    UnknownControlState(String),
    #[error("event `{0}` is not in the signature")]
    UnknownEvent(String),
    #[error("control state name `{0}` clashes with an attribute")]
    NameClash(String),
    #[error("in `{context}`: {source}")]
    Pred {
        context: String,
        #[source]
        source: PredError,
    },
    #[error("no data state satisfies the initial predicate")]
    EmptyInitial,
    #[error("transition `{transition}` is enabled at {conf} but has no successor in the universe")]
    Unrealizable {
        conf: Configuration,
        transition: String,
    },
    #[error("signatures share attributes {0:?}")]
    NotComposable(Vec<String>),
    #[error("product states ({0}, {1}) and ({2}, {3}) would both be named `{4}`")]
    ProductNameClash(String, String, String, String, String),
    #[error("model and specification have different signatures")]
    SignatureMismatch,
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Edts(#[from] EdtsError),
}

/// One guarded transition `src --[guard] (event // effect)--> dst`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionSpec {
    pub src: String,
    pub guard: Expr,
    pub event: String,
    pub effect: Expr,
    pub dst: String,
}

impl TransitionSpec {
    pub fn new(src: &str, guard: Expr, event: &str, effect: Expr, dst: &str) -> Self {
        TransitionSpec {
            src: src.to_string(),
            guard,
            event: event.to_string(),
            effect,
            dst: dst.to_string(),
        }
    }

    /// Ordering key used wherever a transition must be chosen
    /// deterministically: event, guard text, effect text, target.
    pub fn choice_key(&self) -> (String, String, String, String) {
        (
            self.event.clone(),
            self.guard.to_string(),
            self.effect.to_string(),
            self.dst.clone(),
        )
    }
}

impl fmt::Display for TransitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --", ident::display(&self.src))?;
        if self.guard != Expr::Bool(true) {
            write!(f, "[{}] ", self.guard)?;
        }
        write!(
            f,
            "({} // {})--> {}",
            ident::display(&self.event),
            self.effect,
            ident::display(&self.dst)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpSpec {
    name: String,
    sig: EdSignature,
    ctrl_states: BTreeSet<String>,
    transitions: Vec<TransitionSpec>,
    init_ctrl: String,
    init_pred: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpSpecViolation {
    #[error("control state `{0}` is not reachable from the initial control state")]
    UnreachableControlState(String),
}

impl OpSpec {
    /// Build and type-check a specification. Control states mentioned by
    /// transitions or the initial declaration are added to `ctrl_states`.
    pub fn new(
        name: &str,
        sig: EdSignature,
        ctrl_states: impl IntoIterator<Item = String>,
        init_ctrl: &str,
        init_pred: Expr,
        transitions: Vec<TransitionSpec>,
    ) -> Result<OpSpec, OpSpecError> {
        let mut states: BTreeSet<String> = ctrl_states.into_iter().collect();
        states.insert(init_ctrl.to_string());
        for t in &transitions {
            states.insert(t.src.clone());
            states.insert(t.dst.clone());
        }
        for c in &states {
            if sig.data().contains(c) {
                return Err(OpSpecError::NameClash(c.clone()));
            }
        }
        let pred_err = |context: String| move |source| OpSpecError::Pred { context, source };
        init_pred
            .typecheck(sig.data(), PredKind::State)
            .map_err(pred_err(format!("init {init_ctrl} [{init_pred}]")))?;
        for t in &transitions {
            if !sig.has_event(&t.event) {
                return Err(OpSpecError::UnknownEvent(t.event.clone()));
            }
            t.guard
                .typecheck(sig.data(), PredKind::State)
                .map_err(pred_err(t.to_string()))?;
            t.effect
                .typecheck(sig.data(), PredKind::Trans)
                .map_err(pred_err(t.to_string()))?;
        }
        Ok(OpSpec {
            name: name.to_string(),
            sig,
            ctrl_states: states,
            transitions,
            init_ctrl: init_ctrl.to_string(),
            init_pred,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sig(&self) -> &EdSignature {
        &self.sig
    }

    pub fn ctrl_states(&self) -> &BTreeSet<String> {
        &self.ctrl_states
    }

    pub fn transitions(&self) -> &[TransitionSpec] {
        &self.transitions
    }

    pub fn init_ctrl(&self) -> &str {
        &self.init_ctrl
    }

    pub fn init_pred(&self) -> &Expr {
        &self.init_pred
    }

    pub fn with_name(mut self, name: &str) -> OpSpec {
        self.name = name.to_string();
        self
    }

    /// Outgoing transitions of `c`, in choice order.
    pub fn image(&self, c: &str) -> Vec<&TransitionSpec> {
        let mut out: Vec<&TransitionSpec> = self.transitions.iter().filter(|t| t.src == c).collect();
        out.sort_by_key(|t| t.choice_key());
        out.dedup();
        out
    }

    /// Outgoing `e`-transitions of `c`, in choice order.
    pub fn image_event(&self, c: &str, e: &str) -> Vec<&TransitionSpec> {
        self.image(c).into_iter().filter(|t| t.event == e).collect()
    }

    /// Reports control states not reachable from the initial one in the
    /// transition graph (guards ignored).
    pub fn validate(&self) -> Vec<OpSpecViolation> {
        let reach = self.syntactically_reachable();
        self.ctrl_states
            .iter()
            .filter(|c| !reach.contains(*c))
            .map(|c| OpSpecViolation::UnreachableControlState(c.clone()))
            .collect()
    }

    pub fn syntactically_reachable(&self) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([self.init_ctrl.clone()]);
        let mut queue = VecDeque::from([self.init_ctrl.clone()]);
        while let Some(c) = queue.pop_front() {
            for t in self.transitions.iter().filter(|t| t.src == c) {
                if seen.insert(t.dst.clone()) {
                    queue.push_back(t.dst.clone());
                }
            }
        }
        seen
    }

    fn universe(&self) -> Result<Vec<DataState>, OpSpecError> {
        Ok(self.sig.data().enumerate(DEFAULT_STATE_CAP)?)
    }

    fn initial_states(&self, universe: &[DataState]) -> Result<Vec<DataState>, OpSpecError> {
        let mut out = Vec::new();
        for w in universe {
            if self.init_pred.eval_state(w).map_err(|e| self.pred_error(e))? {
                out.push(w.clone());
            }
        }
        Ok(out)
    }

    fn pred_error(&self, source: PredError) -> OpSpecError {
        OpSpecError::Pred {
            context: self.name.clone(),
            source,
        }
    }

    fn enabled(&self, t: &TransitionSpec, w: &DataState) -> Result<bool, OpSpecError> {
        t.guard.eval_state(w).map_err(|e| self.pred_error(e))
    }

    fn posts(&self, t: &TransitionSpec, w: &DataState, universe: &[DataState]) -> Result<Vec<DataState>, OpSpecError> {
        let mut out = Vec::new();
        for v in universe {
            if t.effect.eval_trans(w, v).map_err(|e| self.pred_error(e))? {
                out.push(v.clone());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for OpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "opspec {}", ident::display(&self.name))?;
        let evs: Vec<String> = self.sig.events().iter().map(|e| ident::display(e)).collect();
        writeln!(f, "events {};", evs.join(", "))?;
        if !self.sig.data().is_empty() {
            let attrs: Vec<String> = self
                .sig
                .data()
                .iter()
                .map(|(a, s)| format!("{}: {s}", ident::display(a)))
                .collect();
            writeln!(f, "attrs {};", attrs.join(", "))?;
        }
        let states: Vec<String> = self.ctrl_states.iter().map(|c| ident::display(c)).collect();
        writeln!(f, "states {};", states.join(", "))?;
        writeln!(f, "init {} [{}];", ident::display(&self.init_ctrl), self.init_pred)?;
        for t in &self.transitions {
            writeln!(f, "{t};")?;
        }
        Ok(())
    }
}

/// Why an edts is not a model of an operational specification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelViolation {
    #[error("model uses {used} control states but the specification has {available}")]
    TooManyControlStates { used: usize, available: usize },
    #[error("initial data state {0} violates the initial predicate")]
    InitialData(DataState),
    #[error("no renaming of control states is compatible with the transitions' events")]
    NoRenaming,
    #[error("transition `{transition}` is enabled at {conf} but not realized")]
    Unrealized {
        conf: Configuration,
        transition: String,
    },
    #[error("transition {src} --{event}--> {dst} is not justified by any specification transition")]
    Unjustified {
        event: String,
        src: Configuration,
        dst: Configuration,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelVerdict {
    pub is_model: bool,
    /// Control-state renaming from the model into the specification.
    pub renaming: Option<BTreeMap<String, String>>,
    pub violation: Option<ModelViolation>,
}

impl ModelVerdict {
    fn no(v: ModelViolation) -> Self {
        ModelVerdict {
            is_model: false,
            renaming: None,
            violation: Some(v),
        }
    }
}

/// Decide whether `m` is a model of `o`.
///
/// The control states occurring in `m` are mapped injectively into those of
/// `o`, with the initial control state fixed. Realization of enabled
/// transitions is required at every reachable configuration.
pub fn is_model(m: &Edts, o: &OpSpec) -> Result<ModelVerdict, OpSpecError> {
    if m.sig() != o.sig() {
        return Err(OpSpecError::SignatureMismatch);
    }
    for w in m.init_data() {
        if !o.init_pred.eval_state(w).map_err(|e| o.pred_error(e))? {
            return Ok(ModelVerdict::no(ModelViolation::InitialData(w.clone())));
        }
    }
    let mut used: Vec<String> = m.used_ctrl_states().into_iter().collect();
    if !used.contains(&m.init_ctrl().to_string()) {
        used.push(m.init_ctrl().to_string());
    }
    // initial control state first, the rest in name order
    used.sort_by_key(|c| (c != m.init_ctrl(), c.clone()));
    if used.len() > o.ctrl_states.len() {
        return Ok(ModelVerdict::no(ModelViolation::TooManyControlStates {
            used: used.len(),
            available: o.ctrl_states.len(),
        }));
    }

    let reach = m.reachable_indices();
    let mut out_edges: Vec<Vec<(&str, usize)>> = vec![Vec::new(); m.len()];
    for (e, i, j) in m.all_transitions() {
        out_edges[i].push((e, j));
    }
    let out_events: BTreeMap<&str, BTreeSet<&str>> = used
        .iter()
        .map(|x| {
            let evs = m
                .all_transitions()
                .filter(|&(_, i, _)| m.conf(i).ctrl == *x)
                .map(|(e, _, _)| e)
                .collect();
            (x.as_str(), evs)
        })
        .collect();
    let spec_events: BTreeMap<&str, BTreeSet<&str>> = o
        .ctrl_states
        .iter()
        .map(|c| {
            let evs = o
                .transitions
                .iter()
                .filter(|t| &t.src == c)
                .map(|t| t.event.as_str())
                .collect();
            (c.as_str(), evs)
        })
        .collect();
    let candidates: Vec<Vec<&str>> = used
        .iter()
        .map(|x| {
            if x == m.init_ctrl() {
                return vec![o.init_ctrl.as_str()];
            }
            let mut cs: Vec<&str> = o
                .ctrl_states
                .iter()
                .map(String::as_str)
                .filter(|c| *c != o.init_ctrl && out_events[x.as_str()].is_subset(&spec_events[c]))
                .collect();
            // prefer the identity renaming
            cs.sort_by_key(|c| (*c != x.as_str(), c.to_string()));
            cs
        })
        .collect();

    let mut first_violation: Option<ModelViolation> = None;
    let mut assignment: Vec<&str> = Vec::new();
    let found = search_renaming(&candidates, &mut assignment, &mut |assign| {
        let beta: BTreeMap<&str, &str> = used.iter().map(String::as_str).zip(assign.iter().copied()).collect();
        match check_under(m, o, &beta, &reach, &out_edges) {
            Ok(None) => Ok(true),
            Ok(Some(v)) => {
                if first_violation.is_none() {
                    first_violation = Some(v);
                }
                Ok(false)
            }
            Err(e) => Err(e),
        }
    })?;
    match found {
        Some(assign) => Ok(ModelVerdict {
            is_model: true,
            renaming: Some(
                used.iter()
                    .cloned()
                    .zip(assign.into_iter().map(str::to_string))
                    .collect(),
            ),
            violation: None,
        }),
        None => Ok(ModelVerdict::no(first_violation.unwrap_or(ModelViolation::NoRenaming))),
    }
}

fn search_renaming<'c>(
    candidates: &[Vec<&'c str>],
    assignment: &mut Vec<&'c str>,
    accept: &mut dyn FnMut(&[&'c str]) -> Result<bool, OpSpecError>,
) -> Result<Option<Vec<&'c str>>, OpSpecError> {
    let k = assignment.len();
    if k == candidates.len() {
        return Ok(if accept(assignment)? {
            Some(assignment.clone())
        } else {
            None
        });
    }
    for &c in &candidates[k] {
        if assignment.contains(&c) {
            continue;
        }
        assignment.push(c);
        let r = search_renaming(candidates, assignment, accept)?;
        assignment.pop();
        if r.is_some() {
            return Ok(r);
        }
    }
    Ok(None)
}

fn check_under(
    m: &Edts,
    o: &OpSpec,
    beta: &BTreeMap<&str, &str>,
    reach: &[bool],
    out_edges: &[Vec<(&str, usize)>],
) -> Result<Option<ModelViolation>, OpSpecError> {
    // every transition of the model is justified
    for (e, i, j) in m.all_transitions() {
        let (src, dst) = (m.conf(i), m.conf(j));
        let (bs, bd) = (beta[src.ctrl.as_str()], beta[dst.ctrl.as_str()]);
        let mut ok = false;
        for t in o.transitions.iter().filter(|t| t.src == bs && t.dst == bd && t.event == e) {
            if o.enabled(t, &src.data)?
                && t.effect.eval_trans(&src.data, &dst.data).map_err(|er| o.pred_error(er))?
            {
                ok = true;
                break;
            }
        }
        if !ok {
            return Ok(Some(ModelViolation::Unjustified {
                event: e.to_string(),
                src: src.clone(),
                dst: dst.clone(),
            }));
        }
    }
    // every enabled transition is realized at reachable configurations
    for (i, conf) in m.confs().iter().enumerate() {
        if !reach[i] {
            continue;
        }
        let bc = beta[conf.ctrl.as_str()];
        for t in o.transitions.iter().filter(|t| t.src == bc) {
            if !o.enabled(t, &conf.data)? {
                continue;
            }
            let mut realized = false;
            for &(e, j) in &out_edges[i] {
                let dst = m.conf(j);
                if e == t.event
                    && beta[dst.ctrl.as_str()] == t.dst
                    && t.effect.eval_trans(&conf.data, &dst.data).map_err(|er| o.pred_error(er))?
                {
                    realized = true;
                    break;
                }
            }
            if !realized {
                return Ok(Some(ModelViolation::Unrealized {
                    conf: conf.clone(),
                    transition: t.to_string(),
                }));
            }
        }
    }
    Ok(None)
}

/// The model with all initial states allowed by the initial predicate and
/// every justified transition, restricted to reachable configurations.
pub fn canonical_model(o: &OpSpec) -> Result<Edts, OpSpecError> {
    let t = explore(o, false)?;
    Ok(t.model)
}

/// Result of an exploration that stops at configurations where an enabled
/// transition has no successor inside the universe.
#[derive(Debug, Clone)]
pub struct Truncated {
    pub model: Edts,
    /// Configurations whose enabled transitions could not be realized,
    /// with the offending transition.
    pub boundary: Vec<(Configuration, String)>,
}

/// Like [`canonical_model`], but configurations with an unrealizable
/// enabled transition are kept and reported instead of failing. The result
/// is in general not a model of `o`; the boundary says where it falls short.
pub fn truncated_canonical(o: &OpSpec) -> Result<Truncated, OpSpecError> {
    explore(o, true)
}

/// The largest model of `o` over the finite universe, or `None` when `o`
/// has no model at all.
///
/// A configuration survives if every transition enabled there has a
/// successor that survives (greatest fixpoint). Any model only visits
/// surviving configurations, and the surviving part reachable from the
/// surviving initial states, with every justified transition between
/// survivors, is itself a model.
pub fn largest_model(o: &OpSpec) -> Result<Option<Edts>, OpSpecError> {
    let universe = o.universe()?;
    let states: Vec<&String> = o.ctrl_states.iter().collect();
    let nd = universe.len();
    let index = |c: &str, d: usize| states.iter().position(|s| *s == c).expect("declared") * nd + d;
    // For every configuration: for each enabled transition, its (event, successor) options.
    let mut options: Vec<Vec<(String, Vec<usize>)>> = Vec::with_capacity(states.len() * nd);
    for c in &states {
        for w in &universe {
            let mut here = Vec::new();
            for t in o.transitions.iter().filter(|t| t.src == **c) {
                if !o.enabled(t, w)? {
                    continue;
                }
                let mut succ = Vec::new();
                for (d, v) in universe.iter().enumerate() {
                    if t.effect.eval_trans(w, v).map_err(|e| o.pred_error(e))? {
                        succ.push(index(&t.dst, d));
                    }
                }
                here.push((t.event.clone(), succ));
            }
            options.push(here);
        }
    }
    let mut alive = vec![true; options.len()];
    loop {
        let mut changed = false;
        for g in 0..options.len() {
            if alive[g] && options[g].iter().any(|(_, s)| !s.iter().any(|&h| alive[h])) {
                alive[g] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let init: Vec<usize> = o
        .initial_states(&universe)?
        .iter()
        .map(|w| index(&o.init_ctrl, universe.iter().position(|v| v == w).expect("universe")))
        .filter(|&g| alive[g])
        .collect();
    if init.is_empty() {
        return Ok(None);
    }
    let conf = |g: usize| Configuration::new(states[g / nd].clone(), universe[g % nd].clone());
    let mut b = EdtsBuilder::new(o.sig.clone(), o.init_ctrl.clone());
    for c in &o.ctrl_states {
        b.ctrl_state(c.clone());
    }
    let mut seen: BTreeSet<usize> = init.iter().copied().collect();
    let mut queue: VecDeque<usize> = init.iter().copied().collect();
    for &g in &init {
        b.initial(universe[g % nd].clone());
    }
    while let Some(g) = queue.pop_front() {
        for (e, succ) in &options[g] {
            for &h in succ.iter().filter(|&&h| alive[h]) {
                b.edge(e, conf(g), conf(h));
                if seen.insert(h) {
                    queue.push_back(h);
                }
            }
        }
    }
    Ok(Some(b.build()?))
}

fn explore(o: &OpSpec, truncate: bool) -> Result<Truncated, OpSpecError> {
    let universe = o.universe()?;
    let init = o.initial_states(&universe)?;
    if init.is_empty() {
        return Err(OpSpecError::EmptyInitial);
    }
    let mut b = EdtsBuilder::new(o.sig.clone(), o.init_ctrl.clone());
    for c in &o.ctrl_states {
        b.ctrl_state(c.clone());
    }
    let mut boundary = Vec::new();
    let mut seen: BTreeSet<Configuration> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for w in init {
        let c = Configuration::new(o.init_ctrl.clone(), w.clone());
        b.initial(w);
        if seen.insert(c.clone()) {
            queue.push_back(c);
        }
    }
    while let Some(conf) = queue.pop_front() {
        for t in o.transitions.iter().filter(|t| t.src == conf.ctrl) {
            if !o.enabled(t, &conf.data)? {
                continue;
            }
            let posts = o.posts(t, &conf.data, &universe)?;
            if posts.is_empty() {
                if truncate {
                    boundary.push((conf.clone(), t.to_string()));
                    continue;
                }
                return Err(OpSpecError::Unrealizable {
                    conf,
                    transition: t.to_string(),
                });
            }
            for w in posts {
                let next = Configuration::new(t.dst.clone(), w);
                b.edge(&t.event, conf.clone(), next.clone());
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(Truncated {
        model: b.build()?,
        boundary,
    })
}

/// Syntactic parallel composition. Events private to one side keep the
/// other side's attributes unchanged; shared events synchronise both sides.
/// Only product states reachable from the initial pair are generated.
pub fn parallel_compose(o1: &OpSpec, o2: &OpSpec) -> Result<OpSpec, OpSpecError> {
    let sig = o1.sig.compose(&o2.sig).map_err(|e| match e {
        EdtsError::NotComposable(v) => OpSpecError::NotComposable(v),
        other => OpSpecError::Edts(other),
    })?;
    let (e1, e2) = (o1.sig.events(), o2.sig.events());
    let keep1 = Expr::Id(o1.sig.data().names().map(str::to_string).collect());
    let keep2 = Expr::Id(o2.sig.data().names().map(str::to_string).collect());
    let start = (o1.init_ctrl.clone(), o2.init_ctrl.clone());
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    let mut transitions = Vec::new();
    let name = |p: &(String, String)| ident::product_name(&p.0, &p.1);
    while let Some(p) = queue.pop_front() {
        let (c1, c2) = (&p.0, &p.1);
        let mut found: Vec<(Expr, String, Expr, (String, String))> = Vec::new();
        for t1 in o1.transitions.iter().filter(|t| &t.src == c1) {
            if e2.contains(&t1.event) {
                for t2 in o2
                    .transitions
                    .iter()
                    .filter(|t| &t.src == c2 && t.event == t1.event)
                {
                    found.push((
                        Expr::and(t1.guard.clone(), t2.guard.clone()),
                        t1.event.clone(),
                        Expr::and(t1.effect.clone(), t2.effect.clone()),
                        (t1.dst.clone(), t2.dst.clone()),
                    ));
                }
            } else {
                found.push((
                    t1.guard.clone(),
                    t1.event.clone(),
                    Expr::and(t1.effect.clone(), keep2.clone()),
                    (t1.dst.clone(), c2.clone()),
                ));
            }
        }
        for t2 in o2.transitions.iter().filter(|t| &t.src == c2) {
            if !e1.contains(&t2.event) {
                found.push((
                    t2.guard.clone(),
                    t2.event.clone(),
                    Expr::and(t2.effect.clone(), keep1.clone()),
                    (c1.clone(), t2.dst.clone()),
                ));
            }
        }
        for (guard, event, effect, dst) in found {
            transitions.push(TransitionSpec {
                src: name(&p),
                guard,
                event,
                effect,
                dst: name(&dst),
            });
            if seen.insert(dst.clone()) {
                queue.push_back(dst);
            }
        }
    }
    let mut named: BTreeMap<String, &(String, String)> = BTreeMap::new();
    for p in &seen {
        if let Some(q) = named.insert(name(p), p) {
            return Err(OpSpecError::ProductNameClash(q.0.clone(), q.1.clone(), p.0.clone(), p.1.clone(), name(p)));
        }
    }
    let states: Vec<String> = named.into_keys().collect();
    OpSpec::new(
        &format!("{}_{}", o1.name, o2.name),
        sig,
        states,
        &name(&start),
        Expr::and(o1.init_pred.clone(), o2.init_pred.clone()),
        transitions,
    )
}

/// Size guards for exhaustive model enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_ctrl_states: usize,
    pub max_data_states: usize,
    /// Most models produced before giving up.
    pub max_models: usize,
    /// Most candidate transitions at a single configuration.
    pub max_choices: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_ctrl_states: 3,
            max_data_states: 8,
            max_models: 100_000,
            max_choices: 16,
        }
    }
}

type Edge = (String, Configuration);

struct Enumerator<'a> {
    o: &'a OpSpec,
    universe: Vec<DataState>,
    limits: EnumerationLimits,
    options: HashMap<Configuration, Rc<Vec<Vec<Edge>>>>,
    emitted: usize,
    certs: BTreeSet<String>,
    out: Vec<Edts>,
    perms: Vec<BTreeMap<String, String>>,
}

/// All models of `o` up to control-state renaming, for tiny instances.
///
/// Every non-empty set of allowed initial data states is combined with
/// every choice, at each reachable configuration, of justified transitions
/// that realizes all enabled transitions. Fails rather than truncates when
/// a limit is exceeded.
pub fn enumerate_models(o: &OpSpec, limits: EnumerationLimits) -> Result<Vec<Edts>, OpSpecError> {
    if o.ctrl_states.len() > limits.max_ctrl_states {
        return Err(OpSpecError::TooLarge(format!(
            "{} control states, limit {}",
            o.ctrl_states.len(),
            limits.max_ctrl_states
        )));
    }
    let count = o.sig.data().state_count();
    if count > limits.max_data_states as u128 {
        return Err(OpSpecError::TooLarge(format!(
            "{count} data states, limit {}",
            limits.max_data_states
        )));
    }
    let universe = o.universe()?;
    let init = o.initial_states(&universe)?;
    if init.len() > 20 {
        return Err(OpSpecError::TooLarge(format!("{} initial data states", init.len())));
    }
    let mut en = Enumerator {
        o,
        universe,
        limits,
        options: HashMap::new(),
        emitted: 0,
        certs: BTreeSet::new(),
        out: Vec::new(),
        perms: ctrl_permutations(o),
    };
    for mask in 1u32..(1u32 << init.len()) {
        let omega0: Vec<DataState> = init
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, w)| w.clone())
            .collect();
        let mut queue: Vec<Configuration> = omega0
            .iter()
            .map(|w| Configuration::new(o.init_ctrl.clone(), w.clone()))
            .collect();
        let mut seen: BTreeSet<Configuration> = queue.iter().cloned().collect();
        let mut edges = Vec::new();
        en.extend(&omega0, &mut queue, &mut seen, &mut edges, 0)?;
    }
    Ok(en.out)
}

impl Enumerator<'_> {
    fn extend(
        &mut self,
        omega0: &[DataState],
        queue: &mut Vec<Configuration>,
        seen: &mut BTreeSet<Configuration>,
        edges: &mut Vec<(String, Configuration, Configuration)>,
        pos: usize,
    ) -> Result<(), OpSpecError> {
        if pos == queue.len() {
            return self.emit(omega0, edges);
        }
        let conf = queue[pos].clone();
        let options = self.options_at(&conf)?;
        for choice in options.iter() {
            let (q_len, e_len) = (queue.len(), edges.len());
            let mut added = Vec::new();
            for (e, dst) in choice {
                edges.push((e.clone(), conf.clone(), dst.clone()));
                if seen.insert(dst.clone()) {
                    queue.push(dst.clone());
                    added.push(dst.clone());
                }
            }
            self.extend(omega0, queue, seen, edges, pos + 1)?;
            queue.truncate(q_len);
            edges.truncate(e_len);
            for d in added {
                seen.remove(&d);
            }
        }
        Ok(())
    }

    /// Transition sets allowed at `conf`: subsets of the justified
    /// transitions hitting every enabled specification transition.
    fn options_at(&mut self, conf: &Configuration) -> Result<Rc<Vec<Vec<Edge>>>, OpSpecError> {
        if let Some(o) = self.options.get(conf) {
            return Ok(o.clone());
        }
        let o = self.o;
        let mut justified: BTreeSet<Edge> = BTreeSet::new();
        let mut enabled = Vec::new();
        for t in o.transitions.iter().filter(|t| t.src == conf.ctrl) {
            if !o.enabled(t, &conf.data)? {
                continue;
            }
            enabled.push(t);
            for w in o.posts(t, &conf.data, &self.universe)? {
                justified.insert((t.event.clone(), Configuration::new(t.dst.clone(), w)));
            }
        }
        let justified: Vec<Edge> = justified.into_iter().collect();
        if justified.len() > self.limits.max_choices {
            return Err(OpSpecError::TooLarge(format!(
                "{} candidate transitions at {conf}",
                justified.len()
            )));
        }
        let mut required: Vec<u32> = Vec::new();
        for t in enabled {
            let mut mask = 0u32;
            for (k, (e, dst)) in justified.iter().enumerate() {
                if *e == t.event
                    && dst.ctrl == t.dst
                    && t.effect.eval_trans(&conf.data, &dst.data).map_err(|er| o.pred_error(er))?
                {
                    mask |= 1 << k;
                }
            }
            required.push(mask);
        }
        let mut out = Vec::new();
        if !required.contains(&0) {
            for s in 0u32..(1u32 << justified.len()) {
                if required.iter().all(|r| r & s != 0) {
                    out.push(
                        justified
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| s & (1 << k) != 0)
                            .map(|(_, e)| e.clone())
                            .collect(),
                    );
                }
            }
        }
        let out = Rc::new(out);
        self.options.insert(conf.clone(), out.clone());
        Ok(out)
    }

    fn emit(&mut self, omega0: &[DataState], edges: &[(String, Configuration, Configuration)]) -> Result<(), OpSpecError> {
        self.emitted += 1;
        if self.emitted > self.limits.max_models {
            return Err(OpSpecError::TooLarge(format!("more than {} models", self.limits.max_models)));
        }
        let mut b = EdtsBuilder::new(self.o.sig.clone(), self.o.init_ctrl.clone());
        for w in omega0 {
            b.initial(w.clone());
        }
        for (e, s, t) in edges {
            b.edge(e, s.clone(), t.clone());
        }
        let m = b.build()?;
        let cert = certificate_with(&m, &self.perms);
        if self.certs.insert(cert) {
            self.out.push(m);
        }
        Ok(())
    }
}

/// Renamings of the specification's control states fixing the initial one.
fn ctrl_permutations(o: &OpSpec) -> Vec<BTreeMap<String, String>> {
    let others: Vec<String> = o
        .ctrl_states
        .iter()
        .filter(|c| **c != o.init_ctrl)
        .cloned()
        .collect();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..others.len()).collect();
    loop {
        let mut map: BTreeMap<String, String> = others
            .iter()
            .zip(&idx)
            .map(|(c, &k)| (c.clone(), others[k].clone()))
            .collect();
        map.insert(o.init_ctrl.clone(), o.init_ctrl.clone());
        out.push(map);
        if !next_permutation(&mut idx) {
            return out;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn certificate_with(m: &Edts, perms: &[BTreeMap<String, String>]) -> String {
    perms
        .iter()
        .map(|p| {
            let renamed = m.rename_ctrl(|c| p.get(c).cloned().unwrap_or_else(|| c.to_string()));
            structure_key(&renamed)
        })
        .min()
        .unwrap_or_else(|| structure_key(m))
}

/// Text identifying a model's initial set and transitions (declared but
/// unused control states are ignored).
fn structure_key(m: &Edts) -> String {
    let mut s = format!("{}|", m.init_ctrl());
    for w in m.init_data() {
        s.push_str(&format!("{w};"));
    }
    s.push('|');
    let mut edges: Vec<String> = m
        .all_transitions()
        .map(|(e, i, j)| format!("{}-{e}->{}", m.conf(i), m.conf(j)))
        .collect();
    edges.sort();
    s.push_str(&edges.join(";"));
    s
}

/// Certificate identifying a model of `o` up to renaming of `o`'s control
/// states (initial state fixed).
pub fn model_certificate(m: &Edts, o: &OpSpec) -> String {
    certificate_with(m, &ctrl_permutations(o))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataSignature, Sort, Value};

    fn sig_empty(events: &[&str]) -> EdSignature {
        EdSignature::new(events.iter().copied(), DataSignature::empty())
    }

    #[test]
    fn isolated_state_is_reported() {
        let o = OpSpec::new(
            "O",
            sig_empty(&["e"]),
            ["a".to_string(), "b".to_string()],
            "a",
            Expr::Bool(true),
            vec![],
        )
        .unwrap();
        assert_eq!(
            o.validate(),
            vec![OpSpecViolation::UnreachableControlState("b".into())]
        );
    }

    #[test]
    fn unrealizable_loop() {
        let o = OpSpec::new(
            "O1",
            sig_empty(&["e"]),
            [],
            "c10",
            Expr::Bool(true),
            vec![TransitionSpec::new("c10", Expr::Bool(true), "e", Expr::Bool(false), "c10")],
        )
        .unwrap();
        assert!(matches!(canonical_model(&o), Err(OpSpecError::Unrealizable { .. })));
        assert!(enumerate_models(&o, EnumerationLimits::default()).unwrap().is_empty());
    }

    #[test]
    fn no_transitions_two_initial_states() {
        let sig = EdSignature::new(["e"], DataSignature::new([("a", Sort::Bool)]).unwrap());
        let o = OpSpec::new("O", sig, [], "c", Expr::Bool(true), vec![]).unwrap();
        let models = enumerate_models(&o, EnumerationLimits::default()).unwrap();
        assert_eq!(models.len(), 3);
        for m in &models {
            assert!(is_model(m, &o).unwrap().is_model);
        }
        let _ = Value::Bool(true);
    }
}
