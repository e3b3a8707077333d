//! Model constructors: reducts along signature morphisms (relabelling and
//! restriction), event refinement by composite events, the parallel
//! product of models, and composition of constructors.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::edts::{Configuration, EdSignature, Edts, EdtsBuilder, EdtsError};
use crate::ident;
use crate::relation::Relation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructorError {
    #[error("morphism `{morphism}`: {detail}")]
    InvalidMorphism { morphism: String, detail: String },
    #[error("signatures share attributes {0:?}")]
    NotComposable(Vec<String>),
    #[error("constructor expects {expected} argument(s), got {got}")]
    Arity { expected: usize, got: usize },
    #[error("signature mismatch: expected {expected}, got {got}")]
    SignatureMismatch { expected: String, got: String },
    #[error(transparent)]
    Edts(#[from] EdtsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphismKind {
    /// Bijective on events and attributes.
    Relabelling,
    /// Injective on events and attributes.
    Restriction,
    General,
}

/// Maps events and attributes of `source` to those of `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMorphism {
    pub name: String,
    pub source: EdSignature,
    pub target: EdSignature,
    pub events: BTreeMap<String, String>,
    pub attrs: BTreeMap<String, String>,
}

fn check_attrs(
    name: &str,
    source: &EdSignature,
    target: &EdSignature,
    attrs: &BTreeMap<String, String>,
) -> Result<(), ConstructorError> {
    let bad = |detail: String| ConstructorError::InvalidMorphism {
        morphism: name.to_string(),
        detail,
    };
    for (a, sort) in source.data().iter() {
        let b = attrs.get(a).ok_or_else(|| bad(format!("attribute `{a}` is not mapped")))?;
        match target.data().sort(b) {
            None => return Err(bad(format!("`{b}` is not an attribute of the target"))),
            Some(s) if s != sort => {
                return Err(bad(format!("attribute `{a}: {sort}` mapped to `{b}: {s}`")))
            }
            Some(_) => {}
        }
    }
    if let Some(a) = attrs.keys().find(|a| !source.data().contains(a)) {
        return Err(bad(format!("`{a}` is not an attribute of the source")));
    }
    Ok(())
}

impl SignatureMorphism {
    pub fn new(
        name: &str,
        source: EdSignature,
        target: EdSignature,
        events: BTreeMap<String, String>,
        attrs: BTreeMap<String, String>,
    ) -> Result<Self, ConstructorError> {
        let bad = |detail: String| ConstructorError::InvalidMorphism {
            morphism: name.to_string(),
            detail,
        };
        for e in source.events() {
            let f = events.get(e).ok_or_else(|| bad(format!("event `{e}` is not mapped")))?;
            if !target.has_event(f) {
                return Err(bad(format!("`{f}` is not an event of the target")));
            }
        }
        if let Some(e) = events.keys().find(|e| !source.has_event(e)) {
            return Err(bad(format!("`{e}` is not an event of the source")));
        }
        check_attrs(name, &source, &target, &attrs)?;
        Ok(SignatureMorphism {
            name: name.to_string(),
            source,
            target,
            events,
            attrs,
        })
    }

    /// The inclusion of `source` into `target`.
    pub fn inclusion(name: &str, source: &EdSignature, target: &EdSignature) -> Result<Self, ConstructorError> {
        SignatureMorphism::new(
            name,
            source.clone(),
            target.clone(),
            source.events().iter().map(|e| (e.clone(), e.clone())).collect(),
            source.data().names().map(|a| (a.to_string(), a.to_string())).collect(),
        )
    }

    pub fn is_injective(&self) -> bool {
        let ev: BTreeSet<&String> = self.events.values().collect();
        let at: BTreeSet<&String> = self.attrs.values().collect();
        ev.len() == self.events.len() && at.len() == self.attrs.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective()
            && self.events.len() == self.target.events().len()
            && self.attrs.len() == self.target.data().len()
    }

    pub fn kind(&self) -> MorphismKind {
        if self.is_bijective() {
            MorphismKind::Relabelling
        } else if self.is_injective() {
            MorphismKind::Restriction
        } else {
            MorphismKind::General
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SignatureMorphism) -> Result<SignatureMorphism, ConstructorError> {
        if self.target != next.source {
            return Err(ConstructorError::SignatureMismatch {
                expected: next.source.to_string(),
                got: self.target.to_string(),
            });
        }
        SignatureMorphism::new(
            &format!("{};{}", self.name, next.name),
            self.source.clone(),
            next.target.clone(),
            self.events.iter().map(|(a, b)| (a.clone(), next.events[b].clone())).collect(),
            self.attrs.iter().map(|(a, b)| (a.clone(), next.attrs[b].clone())).collect(),
        )
    }
}

/// Composite events over a set of events.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompositeEvent {
    Ev(String),
    Union(Box<CompositeEvent>, Box<CompositeEvent>),
    Seq(Box<CompositeEvent>, Box<CompositeEvent>),
    Star(Box<CompositeEvent>),
}

impl CompositeEvent {
    pub fn ev(e: &str) -> Self {
        CompositeEvent::Ev(e.to_string())
    }

    pub fn union(a: Self, b: Self) -> Self {
        CompositeEvent::Union(Box::new(a), Box::new(b))
    }

    pub fn seq(a: Self, b: Self) -> Self {
        CompositeEvent::Seq(Box::new(a), Box::new(b))
    }

    pub fn star(a: Self) -> Self {
        CompositeEvent::Star(Box::new(a))
    }

    pub fn events(&self) -> BTreeSet<String> {
        match self {
            CompositeEvent::Ev(e) => [e.clone()].into(),
            CompositeEvent::Union(a, b) | CompositeEvent::Seq(a, b) => {
                a.events().union(&b.events()).cloned().collect()
            }
            CompositeEvent::Star(a) => a.events(),
        }
    }

    /// The same event structure as an action with unconstrained effects.
    pub fn to_action(&self) -> crate::logic::Action {
        use crate::logic::Action;
        match self {
            CompositeEvent::Ev(e) => Action::event(e),
            CompositeEvent::Union(a, b) => Action::union(a.to_action(), b.to_action()),
            CompositeEvent::Seq(a, b) => Action::seq(a.to_action(), b.to_action()),
            CompositeEvent::Star(a) => Action::star(a.to_action()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            CompositeEvent::Seq(..) => 1,
            CompositeEvent::Union(..) => 2,
            CompositeEvent::Star(..) => 3,
            CompositeEvent::Ev(_) => 4,
        }
    }

    fn fmt_in(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_in(f, 0)?;
            return write!(f, ")");
        }
        match self {
            CompositeEvent::Ev(e) => write!(f, "{}", ident::display(e)),
            CompositeEvent::Seq(a, b) => {
                a.fmt_in(f, 1)?;
                write!(f, "; ")?;
                b.fmt_in(f, 2)
            }
            CompositeEvent::Union(a, b) => {
                a.fmt_in(f, 2)?;
                write!(f, " + ")?;
                b.fmt_in(f, 3)
            }
            CompositeEvent::Star(a) => {
                a.fmt_in(f, 3)?;
                write!(f, "*")
            }
        }
    }
}

impl fmt::Display for CompositeEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_in(f, 0)
    }
}

/// Maps each event of `source` to a composite event over `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRefinementMorphism {
    pub name: String,
    pub source: EdSignature,
    pub target: EdSignature,
    pub events: BTreeMap<String, CompositeEvent>,
    pub attrs: BTreeMap<String, String>,
}

impl EventRefinementMorphism {
    pub fn new(
        name: &str,
        source: EdSignature,
        target: EdSignature,
        events: BTreeMap<String, CompositeEvent>,
        attrs: BTreeMap<String, String>,
    ) -> Result<Self, ConstructorError> {
        let bad = |detail: String| ConstructorError::InvalidMorphism {
            morphism: name.to_string(),
            detail,
        };
        for e in source.events() {
            let th = events.get(e).ok_or_else(|| bad(format!("event `{e}` is not mapped")))?;
            if let Some(f) = th.events().iter().find(|f| !target.has_event(f)) {
                return Err(bad(format!("`{f}` is not an event of the target")));
            }
        }
        if let Some(e) = events.keys().find(|e| !source.has_event(e)) {
            return Err(bad(format!("`{e}` is not an event of the source")));
        }
        check_attrs(name, &source, &target, &attrs)?;
        Ok(EventRefinementMorphism {
            name: name.to_string(),
            source,
            target,
            events,
            attrs,
        })
    }

    pub fn from_signature_morphism(s: &SignatureMorphism) -> Self {
        EventRefinementMorphism {
            name: s.name.clone(),
            source: s.source.clone(),
            target: s.target.clone(),
            events: s
                .events
                .iter()
                .map(|(a, b)| (a.clone(), CompositeEvent::ev(b)))
                .collect(),
            attrs: s.attrs.clone(),
        }
    }
}

/// The relation of a composite event over the bare event relations of `m`.
pub fn composite_relation(m: &Edts, th: &CompositeEvent) -> Relation {
    match th {
        CompositeEvent::Ev(e) => m.step_relation(e),
        CompositeEvent::Union(a, b) => composite_relation(m, a).union(&composite_relation(m, b)),
        CompositeEvent::Seq(a, b) => composite_relation(m, a).compose(&composite_relation(m, b)),
        CompositeEvent::Star(a) => composite_relation(m, a).closure(),
    }
}

/// Inductive reduct: start from the reduced initial configurations and add
/// a reduced step whenever some configuration reducing to an already
/// generated one has a step under the event's relation.
fn reduct_with(
    m: &Edts,
    source: &EdSignature,
    attrs: &BTreeMap<String, String>,
    relations: &BTreeMap<String, Relation>,
) -> Edts {
    let reduce = |c: &Configuration| Configuration::new(c.ctrl.clone(), c.data.reduct(attrs));
    let reduced: Vec<Configuration> = m.confs().iter().map(reduce).collect();
    let mut preimage: BTreeMap<&Configuration, Vec<usize>> = BTreeMap::new();
    for (i, r) in reduced.iter().enumerate() {
        preimage.entry(r).or_default().push(i);
    }
    let mut b = EdtsBuilder::new(source.clone(), m.init_ctrl().to_string());
    for c in m.ctrl_states() {
        b.ctrl_state(c.clone());
    }
    let mut seen: BTreeSet<Configuration> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for w in m.init_data() {
        let r = w.reduct(attrs);
        b.initial(r.clone());
        let c = Configuration::new(m.init_ctrl().to_string(), r);
        if seen.insert(c.clone()) {
            queue.push_back(c);
        }
    }
    while let Some(d) = queue.pop_front() {
        let Some(pre) = preimage.get(&d) else { continue };
        for (e, rel) in relations {
            for &i in pre {
                for j in rel.successors(i) {
                    let t = reduced[j].clone();
                    b.edge(e, d.clone(), t.clone());
                    if seen.insert(t.clone()) {
                        queue.push_back(t);
                    }
                }
            }
        }
    }
    b.build().expect("reduct events come from the source signature")
}

/// Reduct along a signature morphism.
pub fn reduct(m: &Edts, sigma: &SignatureMorphism) -> Result<Edts, ConstructorError> {
    if m.sig() != &sigma.target {
        return Err(ConstructorError::SignatureMismatch {
            expected: sigma.target.to_string(),
            got: m.sig().to_string(),
        });
    }
    let relations = sigma
        .events
        .iter()
        .map(|(e, f)| (e.clone(), m.step_relation(f)))
        .collect();
    Ok(reduct_with(m, &sigma.source, &sigma.attrs, &relations))
}

/// Reduct along an event refinement morphism.
pub fn event_refinement_reduct(m: &Edts, alpha: &EventRefinementMorphism) -> Result<Edts, ConstructorError> {
    if m.sig() != &alpha.target {
        return Err(ConstructorError::SignatureMismatch {
            expected: alpha.target.to_string(),
            got: m.sig().to_string(),
        });
    }
    let relations = alpha
        .events
        .iter()
        .map(|(e, th)| (e.clone(), composite_relation(m, th)))
        .collect();
    Ok(reduct_with(m, &alpha.source, &alpha.attrs, &relations))
}

/// Product of two models over composable signatures: private events
/// interleave, shared events synchronise.
pub fn parallel_construct(m1: &Edts, m2: &Edts) -> Result<Edts, ConstructorError> {
    let sig = m1.sig().compose(m2.sig()).map_err(|e| match e {
        EdtsError::NotComposable(v) => ConstructorError::NotComposable(v),
        other => ConstructorError::Edts(other),
    })?;
    let (e1, e2) = (m1.sig().events(), m2.sig().events());
    let succ = |m: &Edts| {
        let mut s: Vec<Vec<(String, usize)>> = vec![Vec::new(); m.len()];
        for (e, i, j) in m.all_transitions() {
            s[i].push((e.to_string(), j));
        }
        s
    };
    let (s1, s2) = (succ(m1), succ(m2));
    let conf = |i: usize, j: usize| -> Configuration {
        let (a, b) = (m1.conf(i), m2.conf(j));
        Configuration::new(
            ident::product_name(&a.ctrl, &b.ctrl),
            a.data.sum(&b.data).expect("attribute sets are disjoint"),
        )
    };
    let init_ctrl = ident::product_name(m1.init_ctrl(), m2.init_ctrl());
    let mut b = EdtsBuilder::new(sig, init_ctrl);
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for i in m1.initial_indices() {
        for j in m2.initial_indices() {
            b.initial(conf(i, j).data);
            if seen.insert((i, j)) {
                queue.push_back((i, j));
            }
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        let here = conf(i, j);
        let mut next = Vec::new();
        for (e, i2) in &s1[i] {
            if !e2.contains(e) {
                next.push((e.clone(), *i2, j));
            } else {
                for (f, j2) in &s2[j] {
                    if f == e {
                        next.push((e.clone(), *i2, *j2));
                    }
                }
            }
        }
        for (f, j2) in &s2[j] {
            if !e1.contains(f) {
                next.push((f.clone(), i, *j2));
            }
        }
        for (e, a, c) in next {
            b.edge(&e, here.clone(), conf(a, c));
            if seen.insert((a, c)) {
                queue.push_back((a, c));
            }
        }
    }
    Ok(b.build()?)
}

/// Implementation constructors as first-class values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constructor {
    Identity(EdSignature),
    Reduct(SignatureMorphism),
    EventRefinement(EventRefinementMorphism),
    Parallel(EdSignature, EdSignature),
    /// Apply each of `first` to its share of the arguments, then `then`
    /// to their results.
    Composite {
        first: Vec<Constructor>,
        then: Box<Constructor>,
    },
}

impl Constructor {
    pub fn inputs(&self) -> Vec<EdSignature> {
        match self {
            Constructor::Identity(s) => vec![s.clone()],
            Constructor::Reduct(m) => vec![m.target.clone()],
            Constructor::EventRefinement(m) => vec![m.target.clone()],
            Constructor::Parallel(a, b) => vec![a.clone(), b.clone()],
            Constructor::Composite { first, .. } => first.iter().flat_map(|k| k.inputs()).collect(),
        }
    }

    pub fn output(&self) -> EdSignature {
        match self {
            Constructor::Identity(s) => s.clone(),
            Constructor::Reduct(m) => m.source.clone(),
            Constructor::EventRefinement(m) => m.source.clone(),
            Constructor::Parallel(a, b) => a.compose(b).expect("checked when built"),
            Constructor::Composite { then, .. } => then.output(),
        }
    }

    pub fn arity(&self) -> usize {
        self.inputs().len()
    }

    pub fn parallel(a: &EdSignature, b: &EdSignature) -> Result<Constructor, ConstructorError> {
        a.compose(b).map_err(|e| match e {
            EdtsError::NotComposable(v) => ConstructorError::NotComposable(v),
            other => ConstructorError::Edts(other),
        })?;
        Ok(Constructor::Parallel(a.clone(), b.clone()))
    }

    /// `(first_1, ..., first_n); then`, checking that the outputs of
    /// `first` match the inputs of `then`.
    pub fn compose(first: Vec<Constructor>, then: Constructor) -> Result<Constructor, ConstructorError> {
        let outs: Vec<EdSignature> = first.iter().map(Constructor::output).collect();
        let ins = then.inputs();
        if outs.len() != ins.len() {
            return Err(ConstructorError::Arity {
                expected: ins.len(),
                got: outs.len(),
            });
        }
        for (o, i) in outs.iter().zip(&ins) {
            if o != i {
                return Err(ConstructorError::SignatureMismatch {
                    expected: i.to_string(),
                    got: o.to_string(),
                });
            }
        }
        Ok(Constructor::Composite {
            first,
            then: Box::new(then),
        })
    }

    pub fn apply(&self, args: &[&Edts]) -> Result<Edts, ConstructorError> {
        let ins = self.inputs();
        if args.len() != ins.len() {
            return Err(ConstructorError::Arity {
                expected: ins.len(),
                got: args.len(),
            });
        }
        for (m, s) in args.iter().zip(&ins) {
            if m.sig() != s {
                return Err(ConstructorError::SignatureMismatch {
                    expected: s.to_string(),
                    got: m.sig().to_string(),
                });
            }
        }
        match self {
            Constructor::Identity(_) => Ok(args[0].clone()),
            Constructor::Reduct(m) => reduct(args[0], m),
            Constructor::EventRefinement(m) => event_refinement_reduct(args[0], m),
            Constructor::Parallel(..) => parallel_construct(args[0], args[1]),
            Constructor::Composite { first, then } => {
                let mut outs = Vec::new();
                let mut k = 0;
                for c in first {
                    let n = c.arity();
                    outs.push(c.apply(&args[k..k + n])?);
                    k += n;
                }
                let refs: Vec<&Edts> = outs.iter().collect();
                then.apply(&refs)
            }
        }
    }
}

impl fmt::Display for Constructor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constructor::Identity(_) => write!(f, "identity"),
            Constructor::Reduct(m) => match m.kind() {
                MorphismKind::Relabelling => write!(f, "relabel {}", m.name),
                MorphismKind::Restriction => write!(f, "restrict {}", m.name),
                MorphismKind::General => write!(f, "reduct {}", m.name),
            },
            Constructor::EventRefinement(m) => write!(f, "eventref {}", m.name),
            Constructor::Parallel(..) => write!(f, "parallel"),
            Constructor::Composite { first, then } => {
                if first.len() == 1 {
                    write!(f, "{}; {then}", first[0])
                } else {
                    let parts: Vec<String> = first.iter().map(|c| c.to_string()).collect();
                    write!(f, "({}); {then}", parts.join(", "))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataSignature, DataState, Sort, Value};

    fn d(v: i64) -> DataState {
        DataState::new([("x", Value::Int(v))])
    }

    fn model() -> Edts {
        let sig = EdSignature::new(
            ["a", "b"],
            DataSignature::new([("x", Sort::Int { lo: 0, hi: 2 })]).unwrap(),
        );
        let mut b = EdtsBuilder::new(sig, "p");
        b.initial(d(0));
        b.edge("a", Configuration::new("p", d(0)), Configuration::new("q", d(1)));
        b.edge("b", Configuration::new("q", d(1)), Configuration::new("p", d(2)));
        b.build().unwrap()
    }

    #[test]
    fn identity_reduct_is_the_model() {
        let m = model();
        let id = SignatureMorphism::inclusion("id", m.sig(), m.sig()).unwrap();
        assert_eq!(id.kind(), MorphismKind::Relabelling);
        assert_eq!(reduct(&m, &id).unwrap(), m);
    }

    #[test]
    fn erasing_an_event_shrinks_the_model() {
        let m = model();
        let small = EdSignature::new(["a"], m.sig().data().clone());
        let inc = SignatureMorphism::inclusion("inc", &small, m.sig()).unwrap();
        assert_eq!(inc.kind(), MorphismKind::Restriction);
        let r = reduct(&m, &inc).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.validate().is_empty());
    }

    #[test]
    fn sequence_collapses_a_cycle() {
        let m = model();
        let one = EdSignature::new(["step"], m.sig().data().clone());
        let alpha = EventRefinementMorphism::new(
            "alpha",
            one,
            m.sig().clone(),
            [("step".to_string(), CompositeEvent::seq(CompositeEvent::ev("a"), CompositeEvent::ev("b")))].into(),
            [("x".to_string(), "x".to_string())].into(),
        )
        .unwrap();
        let r = event_refinement_reduct(&m, &alpha).unwrap();
        assert_eq!(r.transition_count(), 1);
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn product_with_trivial_system() {
        let m = model();
        let empty = EdSignature::new(Vec::<String>::new(), DataSignature::empty());
        let mut b = EdtsBuilder::new(empty, "u");
        b.initial(DataState::default());
        let unit = b.build().unwrap();
        let p = parallel_construct(&m, &unit).unwrap();
        assert_eq!(p.len(), m.len());
        assert_eq!(p.transition_count(), m.transition_count());
    }
}
