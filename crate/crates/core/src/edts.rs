//! Event/data signatures, configurations and event/data transition systems.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataError, DataSignature, DataState, Sort};
use crate::ident;
use crate::relation::Relation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EdtsError {
    #[error("event `{0}` is not in the signature")]
    UnknownEvent(String),
    #[error("event signatures share attributes {0:?}")]
    NotComposable(Vec<String>),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("invalid JSON model: {0}")]
    Json(String),
}

/// Events plus typed attributes.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdSignature {
    events: BTreeSet<String>,
    data: DataSignature,
}

impl EdSignature {
    pub fn new<I, S>(events: I, data: DataSignature) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        EdSignature {
            events: events.into_iter().map(Into::into).collect(),
            data,
        }
    }

    pub fn events(&self) -> &BTreeSet<String> {
        &self.events
    }

    pub fn data(&self) -> &DataSignature {
        &self.data
    }

    pub fn has_event(&self, e: &str) -> bool {
        self.events.contains(e)
    }

    pub fn is_composable(&self, other: &EdSignature) -> bool {
        self.data.names().all(|a| !other.data.contains(a))
    }

    /// Union of events and of (disjoint) attributes.
    pub fn compose(&self, other: &EdSignature) -> Result<EdSignature, EdtsError> {
        let data = self.data.union(&other.data).map_err(|e| match e {
            DataError::Overlap(v) => EdtsError::NotComposable(v),
            other => EdtsError::Data(other),
        })?;
        let events = self.events.union(&other.events).cloned().collect();
        Ok(EdSignature { events, data })
    }
}

impl fmt::Display for EdSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let evs: Vec<&str> = self.events.iter().map(String::as_str).collect();
        write!(f, "({{{}}}, {{{}}})", evs.join(", "), self.data)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub ctrl: String,
    pub data: DataState,
}

impl Configuration {
    pub fn new(ctrl: impl Into<String>, data: DataState) -> Self {
        Configuration {
            ctrl: ctrl.into(),
            data,
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", ident::display(&self.ctrl), self.data)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EdtsViolation {
    #[error("empty initial set")]
    EmptyInitialSet,
    #[error("unreachable: {0}")]
    Unreachable(Configuration),
    #[error("data state of {0} does not conform to the signature")]
    DataMismatch(Configuration),
}

/// A transition system over configurations, one relation per event.
///
/// Configurations are kept sorted; transitions refer to them by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edts {
    sig: EdSignature,
    ctrl_states: BTreeSet<String>,
    init_ctrl: String,
    init_data: BTreeSet<DataState>,
    confs: Vec<Configuration>,
    rel: BTreeMap<String, BTreeSet<(usize, usize)>>,
}

impl Edts {
    pub fn sig(&self) -> &EdSignature {
        &self.sig
    }

    pub fn ctrl_states(&self) -> &BTreeSet<String> {
        &self.ctrl_states
    }

    pub fn init_ctrl(&self) -> &str {
        &self.init_ctrl
    }

    pub fn init_data(&self) -> &BTreeSet<DataState> {
        &self.init_data
    }

    pub fn confs(&self) -> &[Configuration] {
        &self.confs
    }

    pub fn conf(&self, i: usize) -> &Configuration {
        &self.confs[i]
    }

    pub fn len(&self) -> usize {
        self.confs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.confs.is_empty()
    }

    pub fn index_of(&self, c: &Configuration) -> Option<usize> {
        self.confs.binary_search(c).ok()
    }

    pub fn initial_indices(&self) -> Vec<usize> {
        self.init_data
            .iter()
            .filter_map(|d| self.index_of(&Configuration::new(self.init_ctrl.clone(), d.clone())))
            .collect()
    }

    pub fn initial_confs(&self) -> Vec<Configuration> {
        self.init_data
            .iter()
            .map(|d| Configuration::new(self.init_ctrl.clone(), d.clone()))
            .collect()
    }

    pub fn transitions(&self, event: &str) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rel.get(event).into_iter().flatten().copied()
    }

    /// All transitions as `(event, source, target)` in a fixed order.
    pub fn all_transitions(&self) -> impl Iterator<Item = (&str, usize, usize)> + '_ {
        self.rel
            .iter()
            .flat_map(|(e, set)| set.iter().map(move |&(i, j)| (e.as_str(), i, j)))
    }

    pub fn transition_count(&self) -> usize {
        self.rel.values().map(BTreeSet::len).sum()
    }

    /// Outgoing transitions of configuration `i` as `(event, target)`.
    pub fn successors(&self, i: usize) -> Vec<(&str, usize)> {
        self.all_transitions()
            .filter(|&(_, s, _)| s == i)
            .map(|(e, _, t)| (e, t))
            .collect()
    }

    pub fn step_relation(&self, event: &str) -> Relation {
        Relation::from_pairs(self.confs.len(), self.transitions(event))
    }

    /// Control states that occur in some configuration.
    pub fn used_ctrl_states(&self) -> BTreeSet<String> {
        self.confs.iter().map(|c| c.ctrl.clone()).collect()
    }

    pub fn to_builder(&self) -> EdtsBuilder {
        let mut b = EdtsBuilder::new(self.sig.clone(), self.init_ctrl.clone());
        for c in &self.ctrl_states {
            b.ctrl_state(c.clone());
        }
        for d in &self.init_data {
            b.initial(d.clone());
        }
        for c in &self.confs {
            b.conf(c.clone());
        }
        for (e, i, j) in self.all_transitions() {
            b.edge(e, self.confs[i].clone(), self.confs[j].clone());
        }
        b
    }

    /// Drop configurations not reachable from the initial ones.
    pub fn restrict_to_reachable(&self) -> Edts {
        let reach = self.reachable_indices();
        let mut b = EdtsBuilder::new(self.sig.clone(), self.init_ctrl.clone());
        for c in &self.ctrl_states {
            b.ctrl_state(c.clone());
        }
        for d in &self.init_data {
            b.initial(d.clone());
        }
        for (e, i, j) in self.all_transitions() {
            if reach[i] {
                b.edge(e, self.confs[i].clone(), self.confs[j].clone());
            }
        }
        b.build().expect("restriction keeps the signature")
    }

    pub fn reachable_indices(&self) -> Vec<bool> {
        let mut seen = vec![false; self.confs.len()];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.confs.len()];
        for (_, i, j) in self.all_transitions() {
            succ[i].push(j);
        }
        let mut queue: VecDeque<usize> = self.initial_indices().into_iter().collect();
        for &i in &queue {
            seen[i] = true;
        }
        while let Some(i) = queue.pop_front() {
            for &j in &succ[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen
    }

    /// Rename control states; the map must be injective on the states used.
    pub fn rename_ctrl(&self, f: impl Fn(&str) -> String) -> Edts {
        let mut b = EdtsBuilder::new(self.sig.clone(), f(&self.init_ctrl));
        for c in &self.ctrl_states {
            b.ctrl_state(f(c));
        }
        for d in &self.init_data {
            b.initial(d.clone());
        }
        let ren = |c: &Configuration| Configuration::new(f(&c.ctrl), c.data.clone());
        for c in &self.confs {
            b.conf(ren(c));
        }
        for (e, i, j) in self.all_transitions() {
            b.edge(e, ren(&self.confs[i]), ren(&self.confs[j]));
        }
        b.build().expect("renaming keeps the signature")
    }

    /// Structural well-formedness: non-empty initial set, conforming data
    /// states, every configuration reachable.
    pub fn validate(&self) -> Vec<EdtsViolation> {
        let mut out = Vec::new();
        if self.init_data.is_empty() {
            out.push(EdtsViolation::EmptyInitialSet);
        }
        for c in &self.confs {
            if self.sig.data().check_state(&c.data).is_err() {
                out.push(EdtsViolation::DataMismatch(c.clone()));
            }
        }
        let reach = self.reachable_indices();
        for (i, c) in self.confs.iter().enumerate() {
            if !reach[i] {
                out.push(EdtsViolation::Unreachable(c.clone()));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&EdtsJson::from(self)).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Edts, EdtsError> {
        let dto: EdtsJson = serde_json::from_str(text).map_err(|e| EdtsError::Json(e.to_string()))?;
        dto.into_edts()
    }
}

impl fmt::Display for Edts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "initial: {}", ident::display(&self.init_ctrl))?;
        for d in &self.init_data {
            writeln!(f, "  init {d}")?;
        }
        for (e, i, j) in self.all_transitions() {
            writeln!(f, "  {} --{e}--> {}", self.confs[i], self.confs[j])?;
        }
        Ok(())
    }
}

/// Incremental construction of an [`Edts`].
#[derive(Debug, Clone)]
pub struct EdtsBuilder {
    sig: EdSignature,
    ctrl_states: BTreeSet<String>,
    init_ctrl: String,
    init_data: BTreeSet<DataState>,
    confs: BTreeSet<Configuration>,
    edges: BTreeSet<(String, Configuration, Configuration)>,
}

impl EdtsBuilder {
    pub fn new(sig: EdSignature, init_ctrl: impl Into<String>) -> Self {
        let init_ctrl = init_ctrl.into();
        EdtsBuilder {
            sig,
            ctrl_states: [init_ctrl.clone()].into(),
            init_ctrl,
            init_data: BTreeSet::new(),
            confs: BTreeSet::new(),
            edges: BTreeSet::new(),
        }
    }

    pub fn ctrl_state(&mut self, c: impl Into<String>) -> &mut Self {
        self.ctrl_states.insert(c.into());
        self
    }

    pub fn initial(&mut self, d: DataState) -> &mut Self {
        self.conf(Configuration::new(self.init_ctrl.clone(), d.clone()));
        self.init_data.insert(d);
        self
    }

    pub fn conf(&mut self, c: Configuration) -> &mut Self {
        self.ctrl_states.insert(c.ctrl.clone());
        self.confs.insert(c);
        self
    }

    pub fn edge(&mut self, event: &str, src: Configuration, dst: Configuration) -> &mut Self {
        self.conf(src.clone());
        self.conf(dst.clone());
        self.edges.insert((event.to_string(), src, dst));
        self
    }

    pub fn has_conf(&self, c: &Configuration) -> bool {
        self.confs.contains(c)
    }

    pub fn build(self) -> Result<Edts, EdtsError> {
        let confs: Vec<Configuration> = self.confs.into_iter().collect();
        let mut rel: BTreeMap<String, BTreeSet<(usize, usize)>> = self
            .sig
            .events()
            .iter()
            .map(|e| (e.clone(), BTreeSet::new()))
            .collect();
        for (e, s, t) in self.edges {
            let set = rel.get_mut(&e).ok_or(EdtsError::UnknownEvent(e.clone()))?;
            let i = confs.binary_search(&s).expect("edge source registered");
            let j = confs.binary_search(&t).expect("edge target registered");
            set.insert((i, j));
        }
        Ok(Edts {
            sig: self.sig,
            ctrl_states: self.ctrl_states,
            init_ctrl: self.init_ctrl,
            init_data: self.init_data,
            confs,
            rel,
        })
    }
}

/// Breadth-first closure of `seed` under a successor function.
pub fn reachable_closure<F>(seed: impl IntoIterator<Item = Configuration>, mut successors: F) -> BTreeSet<Configuration>
where
    F: FnMut(&Configuration) -> Vec<Configuration>,
{
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for c in seed {
        if seen.insert(c.clone()) {
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        for d in successors(&c) {
            if seen.insert(d.clone()) {
                queue.push_back(d);
            }
        }
    }
    seen
}

#[derive(Serialize, Deserialize)]
struct AttrJson {
    name: String,
    #[serde(flatten)]
    sort: Sort,
}

#[derive(Serialize, Deserialize)]
struct EdtsJson {
    events: Vec<String>,
    attributes: Vec<AttrJson>,
    ctrl_states: Vec<String>,
    init_ctrl: String,
    init_data: Vec<DataState>,
    confs: Vec<Configuration>,
    rel: BTreeMap<String, Vec<(usize, usize)>>,
}

impl From<&Edts> for EdtsJson {
    fn from(m: &Edts) -> Self {
        EdtsJson {
            events: m.sig.events().iter().cloned().collect(),
            attributes: m
                .sig
                .data()
                .iter()
                .map(|(name, sort)| AttrJson {
                    name: name.to_string(),
                    sort,
                })
                .collect(),
            ctrl_states: m.ctrl_states.iter().cloned().collect(),
            init_ctrl: m.init_ctrl.clone(),
            init_data: m.init_data.iter().cloned().collect(),
            confs: m.confs.clone(),
            rel: m
                .rel
                .iter()
                .map(|(e, s)| (e.clone(), s.iter().copied().collect()))
                .collect(),
        }
    }
}

impl EdtsJson {
    fn into_edts(self) -> Result<Edts, EdtsError> {
        let data = DataSignature::new(self.attributes.into_iter().map(|a| (a.name, a.sort)))?;
        let sig = EdSignature::new(self.events, data);
        let mut b = EdtsBuilder::new(sig, self.init_ctrl.clone());
        for c in self.ctrl_states {
            b.ctrl_state(c);
        }
        for c in &self.confs {
            b.conf(c.clone());
        }
        for d in self.init_data {
            let c = Configuration::new(self.init_ctrl.clone(), d.clone());
            if !b.has_conf(&c) {
                return Err(EdtsError::Json(format!("initial configuration {c} not listed in confs")));
            }
            b.initial(d);
        }
        for (e, pairs) in self.rel {
            for (i, j) in pairs {
                let (s, t) = match (self.confs.get(i), self.confs.get(j)) {
                    (Some(s), Some(t)) => (s.clone(), t.clone()),
                    _ => {
                        return Err(EdtsError::Json(format!(
                            "transition {e}: index out of range ({i}, {j})"
                        )))
                    }
                };
                b.edge(&e, s, t);
            }
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Value;

    fn sig() -> EdSignature {
        EdSignature::new(
            ["e", "f"],
            DataSignature::new([("val", Sort::Bool)]).unwrap(),
        )
    }

    fn d(v: bool) -> DataState {
        DataState::new([("val", Value::Bool(v))])
    }

    fn switch() -> Edts {
        let mut b = EdtsBuilder::new(sig(), "c0");
        b.initial(d(true));
        b.edge("e", Configuration::new("c0", d(true)), Configuration::new("c1", d(false)));
        b.edge("e", Configuration::new("c1", d(false)), Configuration::new("c0", d(true)));
        b.build().unwrap()
    }

    #[test]
    fn valid_model_has_no_violations() {
        assert!(switch().validate().is_empty());
    }

    #[test]
    fn unreachable_and_empty_initial_are_reported() {
        let mut b = switch().to_builder();
        b.conf(Configuration::new("c2", d(true)));
        let m = b.build().unwrap();
        assert_eq!(
            m.validate(),
            vec![EdtsViolation::Unreachable(Configuration::new("c2", d(true)))]
        );
        assert_eq!(m.validate()[0].to_string(), "unreachable: (c2, {val=true})");

        let mut b = EdtsBuilder::new(sig(), "c0");
        b.conf(Configuration::new("c0", d(true)));
        let m = b.build().unwrap();
        assert!(m.validate().contains(&EdtsViolation::EmptyInitialSet));
    }

    #[test]
    fn json_round_trip() {
        let m = switch();
        let text = m.to_json();
        assert_eq!(Edts::from_json(&text).unwrap(), m);
        assert_eq!(Edts::from_json(&text).unwrap().to_json(), text);
    }

    #[test]
    fn unknown_event_is_rejected() {
        let mut b = EdtsBuilder::new(sig(), "c0");
        b.initial(d(true));
        b.edge("g", Configuration::new("c0", d(true)), Configuration::new("c0", d(true)));
        assert_eq!(b.build(), Err(EdtsError::UnknownEvent("g".into())));
    }
}
