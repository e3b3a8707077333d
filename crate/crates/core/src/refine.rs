//! Bounded refinement checking between axiomatic and operational
//! specifications, simple and via constructors, plus the parallel
//! decomposition rule.
//!
//! Model classes are infinite in general, so verdicts are bounded: models
//! of axiomatic specifications are searched up to a number of control
//! states, models of operational specifications are enumerated over the
//! finite data universe. Every counterexample is re-checked before it is
//! reported.

use std::fmt;

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::characterize::{characterizing_sentence, CharError};
use crate::constructors::{Constructor, ConstructorError};
use crate::edts::{EdSignature, Edts};
use crate::logic::{check_sentence, Formula, LogicError};
use crate::opspec::{
    enumerate_models, is_model, largest_model, parallel_compose, EnumerationLimits, OpSpec, OpSpecError,
};
use crate::search::{self, SearchError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("bound exceeded: {0}")]
    TooLarge(String),
    #[error("premise is not verified: {0}")]
    PremiseNotVerified(String),
    #[error("premise does not match the rule: {0}")]
    PremiseMismatch(String),
    #[error("counterexample failed re-checking: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    OpSpec(#[from] OpSpecError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Constructor(#[from] ConstructorError),
    #[error(transparent)]
    Char(#[from] CharError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub label: String,
    pub sentence: Formula,
}

/// A signature with a set of sentences; its models are all edts
/// satisfying every sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomaticSpec {
    name: String,
    sig: EdSignature,
    axioms: Vec<Axiom>,
}

impl AxiomaticSpec {
    pub fn new(name: &str, sig: EdSignature, axioms: Vec<Axiom>) -> Result<Self, LogicError> {
        for a in &axioms {
            a.sentence.typecheck(&sig)?;
            if !a.sentence.is_sentence() {
                return Err(LogicError::NotASentence(a.sentence.free_vars().into_iter().collect()));
            }
        }
        Ok(AxiomaticSpec {
            name: name.to_string(),
            sig,
            axioms,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sig(&self) -> &EdSignature {
        &self.sig
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    fn sentences(&self) -> Vec<&Formula> {
        self.axioms.iter().map(|a| &a.sentence).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Specification {
    Axiomatic(AxiomaticSpec),
    Operational(OpSpec),
}

/// Outcome of a membership test, with the reason for rejection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub reason: Option<String>,
}

impl Specification {
    pub fn name(&self) -> &str {
        match self {
            Specification::Axiomatic(a) => a.name(),
            Specification::Operational(o) => o.name(),
        }
    }

    pub fn sig(&self) -> &EdSignature {
        match self {
            Specification::Axiomatic(a) => a.sig(),
            Specification::Operational(o) => o.sig(),
        }
    }

    pub fn is_member(&self, m: &Edts) -> Result<Membership, RefineError> {
        if m.sig() != self.sig() {
            return Err(RefineError::SignatureMismatch(format!(
                "model over {} checked against `{}` over {}",
                m.sig(),
                self.name(),
                self.sig()
            )));
        }
        match self {
            Specification::Axiomatic(a) => {
                for ax in &a.axioms {
                    let v = check_sentence(m, &ax.sentence)?;
                    if !v.holds {
                        let at = v.failure.map(|(c, _)| format!(" at {c}")).unwrap_or_default();
                        return Ok(Membership {
                            member: false,
                            reason: Some(format!("axiom \"{}\" fails{at}", ax.label)),
                        });
                    }
                }
                Ok(Membership {
                    member: true,
                    reason: None,
                })
            }
            Specification::Operational(o) => {
                let v = is_model(m, o)?;
                Ok(Membership {
                    member: v.is_model,
                    reason: v.violation.map(|x| x.to_string()),
                })
            }
        }
    }
}

/// Search and enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bound {
    /// Control states of searched models of axiomatic specifications.
    pub ctrl_states: usize,
    /// Data states of the universe.
    pub data_states: usize,
    /// Models per specification, and model tuples per claim.
    pub max_models: usize,
}

impl Default for Bound {
    fn default() -> Self {
        Bound {
            ctrl_states: 3,
            data_states: 8,
            max_models: 100_000,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at most {} control states (axiomatic), at most {} data states",
            self.ctrl_states, self.data_states
        )
    }
}

fn guard_data(sig: &EdSignature, bound: &Bound) -> Result<(), RefineError> {
    let n = sig.data().state_count();
    if n > bound.data_states as u128 {
        return Err(RefineError::TooLarge(format!(
            "{n} data states, bound {}",
            bound.data_states
        )));
    }
    Ok(())
}

/// All models of `s` within `bound`, in a deterministic order.
///
/// Operational specifications without any model yield an empty list
/// regardless of their size.
pub fn models_of(s: &Specification, bound: &Bound) -> Result<Vec<Edts>, RefineError> {
    match s {
        Specification::Axiomatic(a) => {
            guard_data(a.sig(), bound)?;
            Ok(search::all_models(a.sig(), &a.sentences(), bound.ctrl_states, bound.max_models)?)
        }
        Specification::Operational(o) => {
            if largest_model(o)?.is_none() {
                return Ok(Vec::new());
            }
            guard_data(o.sig(), bound)?;
            let limits = EnumerationLimits {
                max_ctrl_states: o.ctrl_states().len(),
                max_data_states: bound.data_states,
                max_models: bound.max_models,
                ..EnumerationLimits::default()
            };
            Ok(enumerate_models(o, limits)?)
        }
    }
}

/// `abstract ~> [constructor] <concrete...>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementClaim {
    pub abstract_spec: Specification,
    pub concrete: Vec<Specification>,
    pub constructor: Constructor,
}

impl RefinementClaim {
    pub fn simple(abstract_spec: Specification, concrete: Specification) -> Self {
        let sig = concrete.sig().clone();
        RefinementClaim {
            abstract_spec,
            concrete: vec![concrete],
            constructor: Constructor::Identity(sig),
        }
    }

    pub fn check_chain(&self) -> Result<(), RefineError> {
        let ins = self.constructor.inputs();
        if ins.len() != self.concrete.len() {
            return Err(RefineError::SignatureMismatch(format!(
                "constructor `{}` takes {} argument(s), claim has {}",
                self.constructor,
                ins.len(),
                self.concrete.len()
            )));
        }
        for (s, i) in self.concrete.iter().zip(&ins) {
            if s.sig() != i {
                return Err(RefineError::SignatureMismatch(format!(
                    "`{}` has signature {}, constructor expects {i}",
                    s.name(),
                    s.sig()
                )));
            }
        }
        if &self.constructor.output() != self.abstract_spec.sig() {
            return Err(RefineError::SignatureMismatch(format!(
                "constructor yields {}, `{}` has {}",
                self.constructor.output(),
                self.abstract_spec.name(),
                self.abstract_spec.sig()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for RefinementClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.concrete.iter().map(|s| s.name()).collect();
        write!(f, "refine {} by {}", self.abstract_spec.name(), names.join(", "))?;
        if !matches!(self.constructor, Constructor::Identity(_)) {
            write!(f, " via {}", self.constructor)?;
        }
        Ok(())
    }
}

/// A tuple of concrete models whose construction is not a model of the
/// abstract specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub inputs: Vec<Edts>,
    pub constructed: Edts,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Verified {
        /// Model tuples checked; `None` when the check was a solver search.
        models_checked: Option<usize>,
        /// True when the concrete side has no model within the bound.
        vacuous: bool,
    },
    Refuted(Box<Counterexample>),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub claim: RefinementClaim,
    pub bound: Bound,
    pub verdict: Verdict,
    /// Set for claims obtained from the parallel decomposition rule.
    pub derived_from: Option<Box<Report>>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> Json {
        let verdict = match &self.verdict {
            Verdict::Verified { models_checked, vacuous } => json!({
                "status": "verified",
                "models_checked": models_checked,
                "vacuous": vacuous,
            }),
            Verdict::Refuted(c) => json!({
                "status": "refuted",
                "reason": c.reason,
                "inputs": c.inputs.iter().map(edts_json).collect::<Vec<_>>(),
                "constructed": edts_json(&c.constructed),
            }),
        };
        json!({
            "claim": self.claim.to_string(),
            "bound": {
                "ctrl_states": self.bound.ctrl_states,
                "data_states": self.bound.data_states,
            },
            "verdict": verdict,
            "derived_from": self.derived_from.as_ref().map(|r| r.to_json()),
            "notes": self.notes,
        })
    }
}

fn edts_json(m: &Edts) -> Json {
    serde_json::from_str(&m.to_json()).expect("edts export is valid json")
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "claim: {}", self.claim)?;
        match &self.verdict {
            Verdict::Verified { models_checked, vacuous } => {
                if let Some(p) = &self.derived_from {
                    writeln!(f, "verdict: verified by the parallel decomposition rule from `{}`", p.claim)?;
                } else {
                    write!(f, "verdict: verified (bounded: {})", self.bound)?;
                    if let Some(n) = models_checked {
                        write!(f, ", {n} model tuple(s) checked")?;
                    }
                    writeln!(f)?;
                }
                if *vacuous {
                    writeln!(f, "warning: vacuous, the concrete side has no model")?;
                }
            }
            Verdict::Refuted(c) => {
                writeln!(f, "verdict: refuted")?;
                writeln!(f, "reason: {}", c.reason)?;
                for (k, m) in c.inputs.iter().enumerate() {
                    writeln!(f, "input {}:", k + 1)?;
                    write_model(f, m)?;
                }
                if c.inputs.len() != 1 || c.inputs[0] != c.constructed {
                    writeln!(f, "constructed:")?;
                    write_model(f, &c.constructed)?;
                }
            }
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Plain-text listing of an edts.
pub fn write_model(f: &mut impl fmt::Write, m: &Edts) -> fmt::Result {
    for c in m.initial_confs() {
        writeln!(f, "  initial {c}")?;
    }
    let mut lines: Vec<String> = m
        .all_transitions()
        .map(|(e, i, j)| format!("  {} --{e}--> {}", m.conf(i), m.conf(j)))
        .collect();
    lines.sort();
    for l in lines {
        writeln!(f, "{l}")?;
    }
    Ok(())
}

fn search_note(bound: &Bound) -> String {
    format!(
        "models of axiomatic specifications searched up to {} control states",
        bound.ctrl_states
    )
}

/// Check `Mod(abstract) ⊇ Mod(concrete)` within `bound`.
pub fn check_simple_refinement(
    abstract_spec: &Specification,
    concrete: &Specification,
    bound: &Bound,
) -> Result<Report, RefineError> {
    if abstract_spec.sig() != concrete.sig() {
        return Err(RefineError::SignatureMismatch(format!(
            "`{}` has {}, `{}` has {}",
            abstract_spec.name(),
            abstract_spec.sig(),
            concrete.name(),
            concrete.sig()
        )));
    }
    let claim = RefinementClaim::simple(abstract_spec.clone(), concrete.clone());
    match concrete {
        Specification::Operational(_) => check_constructor_refinement(&claim, bound),
        Specification::Axiomatic(c) => {
            guard_data(c.sig(), bound)?;
            let targets: Vec<Formula> = match abstract_spec {
                Specification::Axiomatic(a) => a.axioms.iter().map(|x| x.sentence.clone()).collect(),
                Specification::Operational(o) => {
                    vec![characterizing_sentence(o)?]
                }
            };
            let target_refs: Vec<&Formula> = targets.iter().collect();
            let found = search::find_violation(c.sig(), &c.sentences(), &target_refs, bound.ctrl_states)?;
            let mut notes = vec![search_note(bound)];
            let verdict = match found {
                Some(m) => {
                    let mem = abstract_spec.is_member(&m)?;
                    if mem.member {
                        return Err(RefineError::SelfCheck(format!(
                            "search model is a member of `{}`",
                            abstract_spec.name()
                        )));
                    }
                    Verdict::Refuted(Box::new(Counterexample {
                        inputs: vec![m.clone()],
                        constructed: m,
                        reason: mem.reason.unwrap_or_default(),
                    }))
                }
                None => {
                    let vacuous = search::all_models(c.sig(), &c.sentences(), bound.ctrl_states, 1)
                        .map(|v| v.is_empty())
                        .unwrap_or(false);
                    if vacuous {
                        notes.push(format!("`{}` has no model within the bound", c.name()));
                    }
                    Verdict::Verified {
                        models_checked: None,
                        vacuous,
                    }
                }
            };
            Ok(Report {
                claim,
                bound: *bound,
                verdict,
                derived_from: None,
                notes,
            })
        }
    }
}

/// Check that the constructor maps every tuple of concrete models within
/// `bound` to a model of the abstract specification. The first failing
/// tuple in enumeration order is reported.
pub fn check_constructor_refinement(claim: &RefinementClaim, bound: &Bound) -> Result<Report, RefineError> {
    claim.check_chain()?;
    let mut notes = Vec::new();
    let mut classes = Vec::new();
    for s in &claim.concrete {
        let ms = models_of(s, bound)?;
        match s {
            Specification::Axiomatic(_) => notes.push(search_note(bound)),
            Specification::Operational(o) => {
                if ms.is_empty() {
                    notes.push(format!("`{}` has no model over its data universe", o.name()));
                } else {
                    notes.push(format!("`{}`: {} model(s) up to control-state renaming", o.name(), ms.len()));
                }
            }
        }
        classes.push(ms);
    }
    if classes.iter().any(Vec::is_empty) {
        return Ok(Report {
            claim: claim.clone(),
            bound: *bound,
            verdict: Verdict::Verified {
                models_checked: Some(0),
                vacuous: true,
            },
            derived_from: None,
            notes,
        });
    }
    let total: u128 = classes.iter().map(|c| c.len() as u128).product();
    if total > bound.max_models as u128 {
        return Err(RefineError::TooLarge(format!(
            "{total} model tuples, bound {}",
            bound.max_models
        )));
    }
    let mut idx = vec![0usize; classes.len()];
    let mut checked = 0;
    loop {
        let args: Vec<&Edts> = idx.iter().zip(&classes).map(|(&i, c)| &c[i]).collect();
        let built = claim.constructor.apply(&args)?;
        checked += 1;
        let mem = claim.abstract_spec.is_member(&built)?;
        if !mem.member {
            let cex = Counterexample {
                inputs: args.into_iter().cloned().collect(),
                constructed: built,
                reason: mem.reason.unwrap_or_default(),
            };
            if !replay(claim, &cex)? {
                return Err(RefineError::SelfCheck("counterexample does not replay".into()));
            }
            return Ok(Report {
                claim: claim.clone(),
                bound: *bound,
                verdict: Verdict::Refuted(Box::new(cex)),
                derived_from: None,
                notes,
            });
        }
        // Advance the odometer, last position fastest.
        let mut k = idx.len();
        loop {
            if k == 0 {
                return Ok(Report {
                    claim: claim.clone(),
                    bound: *bound,
                    verdict: Verdict::Verified {
                        models_checked: Some(checked),
                        vacuous: false,
                    },
                    derived_from: None,
                    notes,
                });
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < classes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Re-run the construction and the membership test on a counterexample;
/// true iff the failure reproduces.
pub fn replay(claim: &RefinementClaim, cex: &Counterexample) -> Result<bool, RefineError> {
    let args: Vec<&Edts> = cex.inputs.iter().collect();
    let built = claim.constructor.apply(&args)?;
    if built != cex.constructed {
        return Ok(false);
    }
    Ok(!claim.abstract_spec.is_member(&built)?.member)
}

/// Parallel decomposition rule: from a verified claim
/// `spec ~> [k] o1 || o2`, derive `spec ~> [parallel; k] <o1, o2>`.
/// Sound because the product of models of `o1` and `o2` is a model of
/// `o1 || o2`.
pub fn apply_parallel_rule(
    spec: &Specification,
    o1: &OpSpec,
    o2: &OpSpec,
    kappa: &Constructor,
    premise: &Report,
) -> Result<Report, RefineError> {
    if !premise.verdict.is_verified() {
        return Err(RefineError::PremiseNotVerified(premise.claim.to_string()));
    }
    let composed = parallel_compose(o1, o2)?;
    let expected = RefinementClaim {
        abstract_spec: spec.clone(),
        concrete: vec![Specification::Operational(composed)],
        constructor: kappa.clone(),
    };
    let same_concrete = match (&premise.claim.concrete[..], &expected.concrete[0]) {
        ([Specification::Operational(a)], Specification::Operational(b)) => {
            a.clone().with_name(b.name()) == *b
        }
        _ => false,
    };
    if !same_concrete || premise.claim.abstract_spec != *spec || premise.claim.constructor != *kappa {
        return Err(RefineError::PremiseMismatch(format!(
            "expected `{expected}`, premise is `{}`",
            premise.claim
        )));
    }
    let par = Constructor::parallel(o1.sig(), o2.sig())?;
    let constructor = match kappa {
        Constructor::Identity(_) => par,
        k => Constructor::compose(vec![par], k.clone())?,
    };
    let claim = RefinementClaim {
        abstract_spec: spec.clone(),
        concrete: vec![
            Specification::Operational(o1.clone()),
            Specification::Operational(o2.clone()),
        ],
        constructor,
    };
    claim.check_chain()?;
    let mut notes = Vec::new();
    if let Verdict::Verified { vacuous: true, .. } = premise.verdict {
        notes.push("the premise holds vacuously".to_string());
    }
    Ok(Report {
        claim,
        bound: premise.bound,
        verdict: premise.verdict.clone(),
        derived_from: Some(Box::new(premise.clone())),
        notes,
    })
}
