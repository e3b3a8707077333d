//! Name resolution, sort checking and construction of the core objects.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::{Diagnostic, Span};
use crate::constructors::{Constructor, EventRefinementMorphism, MorphismKind, SignatureMorphism};
use crate::data::{DataSignature, Sort};
use crate::edts::EdSignature;
use crate::ident;
use crate::logic::{Action, Formula};
use crate::opspec::{parallel_compose, OpSpec, OpSpecError, TransitionSpec};
use crate::pred::{Expr, PredKind};
use crate::refine::{
    apply_parallel_rule, check_constructor_refinement, check_simple_refinement, Axiom, AxiomaticSpec, Bound,
    RefineError, RefinementClaim, Report, Specification,
};

type EResult<T> = Result<T, Diagnostic>;

/// Ranges for integer attributes. Declared ranges are kept unless the
/// attribute has an explicit override; unranged `int` uses `default_int`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    pub default_int: (i64, i64),
    pub overrides: BTreeMap<String, (i64, i64)>,
}

impl Default for Universe {
    fn default() -> Self {
        Universe {
            default_int: (0, 3),
            overrides: BTreeMap::new(),
        }
    }
}

impl Universe {
    fn sort(&self, attr: &str, declared: &SortAst) -> Sort {
        match declared {
            SortAst::Bool => Sort::Bool,
            SortAst::Int(range) => {
                let (lo, hi) = self
                    .overrides
                    .get(attr)
                    .copied()
                    .or(*range)
                    .unwrap_or(self.default_int);
                Sort::Int { lo, hi }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Morphism {
    Signature(SignatureMorphism),
    EventRefinement(EventRefinementMorphism),
}

impl Morphism {
    pub fn name(&self) -> &str {
        match self {
            Morphism::Signature(m) => &m.name,
            Morphism::EventRefinement(m) => &m.name,
        }
    }
}

/// A refinement or derivation request found in the sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    Refine {
        claim: RefinementClaim,
        bound: Bound,
        span: Span,
    },
    /// Establish `spec ~> [kappa] left || right`, then decompose it into
    /// `spec ~> [parallel; kappa] <left, right>`.
    Derive {
        spec: Specification,
        left: OpSpec,
        right: OpSpec,
        kappa: Constructor,
        bound: Bound,
        span: Span,
    },
}

impl Check {
    /// Run the check. A derivation yields the report for its premise and,
    /// when the premise holds, the derived report.
    /// `ctrl_states` overrides the declared control-state bound.
    pub fn run(&self, ctrl_states: Option<usize>) -> Result<Vec<Report>, RefineError> {
        let with = |b: &Bound| Bound {
            ctrl_states: ctrl_states.unwrap_or(b.ctrl_states),
            ..*b
        };
        match self {
            Check::Refine { claim, bound, .. } => {
                let b = with(bound);
                let simple = claim.concrete.len() == 1 && matches!(claim.constructor, Constructor::Identity(_));
                Ok(vec![if simple {
                    check_simple_refinement(&claim.abstract_spec, &claim.concrete[0], &b)?
                } else {
                    check_constructor_refinement(claim, &b)?
                }])
            }
            Check::Derive {
                spec,
                left,
                right,
                kappa,
                bound,
                ..
            } => {
                let b = with(bound);
                let premise_claim = RefinementClaim {
                    abstract_spec: spec.clone(),
                    concrete: vec![Specification::Operational(parallel_compose(left, right)?)],
                    constructor: kappa.clone(),
                };
                let premise = check_constructor_refinement(&premise_claim, &b)?;
                if !premise.verdict.is_verified() {
                    return Ok(vec![premise]);
                }
                let derived = apply_parallel_rule(spec, left, right, kappa, &premise)?;
                Ok(vec![premise, derived])
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub sigs: BTreeMap<String, EdSignature>,
    pub specs: BTreeMap<String, Specification>,
    pub morphisms: BTreeMap<String, Morphism>,
    pub checks: Vec<Check>,
    /// Where each signature, specification and morphism was declared.
    pub spans: BTreeMap<String, Span>,
}

impl Workspace {
    /// Specifications declared in `file`, in source order.
    pub fn specs_in(&self, file: usize) -> Vec<&Specification> {
        let mut v: Vec<(&Span, &Specification)> = self
            .specs
            .iter()
            .filter_map(|(n, s)| self.spans.get(n).filter(|sp| sp.file == file).map(|sp| (sp, s)))
            .collect();
        v.sort_by_key(|(sp, _)| **sp);
        v.into_iter().map(|(_, s)| s).collect()
    }

    /// Signature of a named signature or specification.
    pub fn signature(&self, name: &str) -> Option<&EdSignature> {
        self.sigs.get(name).or_else(|| self.specs.get(name).map(Specification::sig))
    }

    pub fn opspec(&self, name: &str) -> Option<&OpSpec> {
        match self.specs.get(name) {
            Some(Specification::Operational(o)) => Some(o),
            _ => None,
        }
    }
}

/// Elaborate parsed units in order; later units may refer to names from
/// earlier ones. Declarations with errors are skipped.
pub fn elaborate(units: &[SourceUnit], universe: &Universe) -> (Workspace, Vec<Diagnostic>) {
    let mut ws = Workspace::default();
    let mut diags = Vec::new();
    for unit in units {
        for decl in &unit.decls {
            match elaborate_decl(&mut ws, decl, universe, &mut diags) {
                Ok(()) => {
                    if let Some(n) = decl_name(decl) {
                        ws.spans.entry(n.text.clone()).or_insert(n.span);
                    }
                }
                Err(d) => diags.push(d),
            }
        }
    }
    diags.sort_by_key(|d| (d.span, d.severity));
    (ws, diags)
}

fn elaborate_decl(ws: &mut Workspace, decl: &Decl, universe: &Universe, diags: &mut Vec<Diagnostic>) -> EResult<()> {
    match decl {
        Decl::Import { .. } => Ok(()),
        Decl::Sig { name, items } => {
            fresh(ws, name)?;
            let sig = signature(ws, items, universe)?;
            ws.sigs.insert(name.text.clone(), sig);
            Ok(())
        }
        Decl::Spec { name, items, axioms } => {
            fresh(ws, name)?;
            let sig = signature(ws, items, universe)?;
            let mut out = Vec::new();
            let mut failed = false;
            for (i, ax) in axioms.iter().enumerate() {
                match lower_sentence(&ax.body, &sig) {
                    Ok(f) => out.push(Axiom {
                        label: ax.label.clone().unwrap_or_else(|| (i + 1).to_string()),
                        sentence: f,
                    }),
                    Err(d) => {
                        diags.push(d);
                        failed = true;
                    }
                }
            }
            if failed {
                return Ok(());
            }
            let spec = AxiomaticSpec::new(&name.text, sig, out).map_err(|e| Diagnostic::error(name.span, e.to_string()))?;
            ws.specs.insert(name.text.clone(), Specification::Axiomatic(spec));
            Ok(())
        }
        Decl::OpSpec {
            name,
            items,
            states,
            init,
            transitions,
        } => {
            fresh(ws, name)?;
            let sig = signature(ws, items, universe)?;
            let Some((init_ctrl, init_pred)) = init else {
                return Err(Diagnostic::error(name.span, format!("`{}` has no `init` declaration", name.text)));
            };
            let init_pred = match init_pred {
                Some(p) => lower_pred(p, sig.data(), PredKind::State)?,
                None => Expr::Bool(true),
            };
            let mut ts = Vec::new();
            for t in transitions {
                if !sig.has_event(&t.event.text) {
                    return Err(Diagnostic::error(t.event.span, format!("unknown event `{}`", t.event.text)));
                }
                let guard = match &t.guard {
                    Some(g) => lower_pred(g, sig.data(), PredKind::State)?,
                    None => Expr::Bool(true),
                };
                let effect = match &t.effect {
                    Some(e) => lower_pred(e, sig.data(), PredKind::Trans)?,
                    None => Expr::Bool(true),
                };
                ts.push(TransitionSpec::new(&t.src.text, guard, &t.event.text, effect, &t.dst.text));
            }
            let o = OpSpec::new(
                &name.text,
                sig,
                states.iter().map(|s| s.text.clone()),
                &init_ctrl.text,
                init_pred,
                ts,
            )
            .map_err(|e| Diagnostic::error(name.span, e.to_string()))?;
            for v in o.validate() {
                let crate::opspec::OpSpecViolation::UnreachableControlState(c) = &v;
                let span = states.iter().find(|s| &s.text == c).map_or(name.span, |s| s.span);
                diags.push(Diagnostic::warning(span, v.to_string()));
            }
            ws.specs.insert(name.text.clone(), Specification::Operational(o));
            Ok(())
        }
        Decl::Compose { name, left, right } => {
            fresh(ws, name)?;
            let a = operational(ws, left)?;
            let b = operational(ws, right)?;
            let mut seen = BTreeMap::new();
            for c1 in a.ctrl_states() {
                for c2 in b.ctrl_states() {
                    let n = ident::product_name(c1, c2);
                    if let Some((d1, d2)) = seen.insert(n.clone(), (c1, c2)) {
                        return Err(Diagnostic::error(
                            name.span,
                            format!("product control state `{n}` arises from both ({d1}, {d2}) and ({c1}, {c2})"),
                        )
                        .with_note("rename control states so that the separator `,` does not make pairs ambiguous"));
                    }
                }
            }
            let o = parallel_compose(a, b).map_err(|e| match e {
                OpSpecError::NotComposable(shared) => Diagnostic::error(
                    name.span,
                    format!(
                        "`{}` and `{}` are not composable: both declare attribute(s) {}",
                        left.text,
                        right.text,
                        shared.join(", ")
                    ),
                )
                .with_note("parallel composition requires disjoint attribute sets"),
                other => Diagnostic::error(name.span, other.to_string()),
            })?;
            ws.specs.insert(name.text.clone(), Specification::Operational(o.with_name(&name.text)));
            Ok(())
        }
        Decl::Morphism {
            name,
            source,
            target,
            events,
            attrs,
        } => {
            if ws.morphisms.contains_key(&name.text) {
                return Err(Diagnostic::error(name.span, format!("morphism `{}` is already declared", name.text)));
            }
            let src = lookup_sig(ws, source)?.clone();
            let tgt = lookup_sig(ws, target)?.clone();
            let mut ev_map = BTreeMap::new();
            for (e, th) in events {
                if ev_map.insert(e.text.clone(), lower_composite(th)).is_some() {
                    return Err(Diagnostic::error(e.span, format!("event `{}` mapped twice", e.text)));
                }
            }
            for e in src.events() {
                if !ev_map.contains_key(e) && tgt.has_event(e) {
                    ev_map.insert(e.clone(), crate::constructors::CompositeEvent::ev(e));
                }
            }
            let mut attr_map = BTreeMap::new();
            for (a, b) in attrs {
                if attr_map.insert(a.text.clone(), b.text.clone()).is_some() {
                    return Err(Diagnostic::error(a.span, format!("attribute `{}` mapped twice", a.text)));
                }
            }
            for a in src.data().names() {
                if !attr_map.contains_key(a) && tgt.data().contains(a) {
                    attr_map.insert(a.to_string(), a.to_string());
                }
            }
            let err = |e: crate::constructors::ConstructorError| Diagnostic::error(name.span, e.to_string());
            let plain: Option<BTreeMap<String, String>> = ev_map
                .iter()
                .map(|(e, th)| match th {
                    crate::constructors::CompositeEvent::Ev(f) => Some((e.clone(), f.clone())),
                    _ => None,
                })
                .collect();
            let m = match plain {
                Some(evs) => Morphism::Signature(SignatureMorphism::new(&name.text, src, tgt, evs, attr_map).map_err(err)?),
                None => Morphism::EventRefinement(
                    EventRefinementMorphism::new(&name.text, src, tgt, ev_map, attr_map).map_err(err)?,
                ),
            };
            ws.morphisms.insert(name.text.clone(), m);
            Ok(())
        }
        Decl::Refine {
            abstract_spec,
            concrete,
            steps,
            bound,
            span,
        } => {
            let abs = lookup_spec(ws, abstract_spec)?.clone();
            let conc: Vec<Specification> = concrete
                .iter()
                .map(|c| lookup_spec(ws, c).cloned())
                .collect::<EResult<_>>()?;
            let sigs: Vec<EdSignature> = conc.iter().map(|s| s.sig().clone()).collect();
            let constructor = pipeline(ws, &sigs, steps, *span)?;
            let claim = RefinementClaim {
                abstract_spec: abs,
                concrete: conc,
                constructor,
            };
            claim.check_chain().map_err(|e| Diagnostic::error(*span, e.to_string()))?;
            ws.checks.push(Check::Refine {
                claim,
                bound: lower_bound(bound)?,
                span: *span,
            });
            Ok(())
        }
        Decl::Derive {
            abstract_spec,
            concrete,
            steps,
            bound,
            span,
        } => {
            let spec = lookup_spec(ws, abstract_spec)?.clone();
            let [l, r] = &concrete[..] else {
                return Err(Diagnostic::error(*span, "`derive` needs exactly two operational specifications"));
            };
            let left = operational(ws, l)?.clone();
            let right = operational(ws, r)?.clone();
            if steps.first().map(|s| s.kind) != Some(StepKind::Parallel) {
                return Err(Diagnostic::error(*span, "`derive` must start with `via parallel`"));
            }
            let composed = parallel_compose(&left, &right).map_err(|e| Diagnostic::error(*span, e.to_string()))?;
            let kappa = pipeline(ws, &[composed.sig().clone()], &steps[1..], *span)?;
            if &kappa.output() != spec.sig() {
                return Err(Diagnostic::error(
                    *span,
                    format!("constructor yields {}, `{}` has {}", kappa.output(), spec.name(), spec.sig()),
                ));
            }
            ws.checks.push(Check::Derive {
                spec,
                left,
                right,
                kappa,
                bound: lower_bound(bound)?,
                span: *span,
            });
            Ok(())
        }
    }
}

fn decl_name(d: &Decl) -> Option<&Name> {
    match d {
        Decl::Sig { name, .. }
        | Decl::Spec { name, .. }
        | Decl::OpSpec { name, .. }
        | Decl::Compose { name, .. }
        | Decl::Morphism { name, .. } => Some(name),
        _ => None,
    }
}

fn fresh(ws: &Workspace, name: &Name) -> EResult<()> {
    if ws.signature(&name.text).is_some() {
        return Err(Diagnostic::error(name.span, format!("`{}` is already declared", name.text)));
    }
    Ok(())
}

fn lookup_sig<'a>(ws: &'a Workspace, name: &Name) -> EResult<&'a EdSignature> {
    ws.signature(&name.text)
        .ok_or_else(|| Diagnostic::error(name.span, format!("unknown signature or specification `{}`", name.text)))
}

fn lookup_spec<'a>(ws: &'a Workspace, name: &Name) -> EResult<&'a Specification> {
    ws.specs
        .get(&name.text)
        .ok_or_else(|| Diagnostic::error(name.span, format!("unknown specification `{}`", name.text)))
}

fn operational<'a>(ws: &'a Workspace, name: &Name) -> EResult<&'a OpSpec> {
    match lookup_spec(ws, name)? {
        Specification::Operational(o) => Ok(o),
        Specification::Axiomatic(_) => Err(Diagnostic::error(
            name.span,
            format!("`{}` is not an operational specification", name.text),
        )),
    }
}

fn signature(ws: &Workspace, items: &SigItems, universe: &Universe) -> EResult<EdSignature> {
    let mut events: BTreeSet<String> = BTreeSet::new();
    let mut attrs: BTreeMap<String, Sort> = BTreeMap::new();
    if let Some(base) = &items.base {
        let s = lookup_sig(ws, base)?;
        events.extend(s.events().iter().cloned());
        attrs.extend(s.data().iter().map(|(a, s)| (a.to_string(), s)));
    }
    for e in &items.events {
        if !events.insert(e.text.clone()) {
            return Err(Diagnostic::error(e.span, format!("event `{}` declared twice", e.text)));
        }
    }
    for a in &items.attrs {
        if events.contains(&a.name.text) {
            return Err(Diagnostic::error(a.name.span, format!("`{}` is both an event and an attribute", a.name.text)));
        }
        let sort = universe.sort(&a.name.text, &a.sort);
        if let Sort::Int { lo, hi } = sort {
            if hi < lo {
                return Err(Diagnostic::error(a.name.span, format!("empty range {lo}..{hi} for `{}`", a.name.text)));
            }
        }
        if attrs.insert(a.name.text.clone(), sort).is_some() {
            return Err(Diagnostic::error(a.name.span, format!("attribute `{}` declared twice", a.name.text)));
        }
    }
    let data = DataSignature::new(attrs).map_err(|e| Diagnostic::error(Span::default(), e.to_string()))?;
    Ok(EdSignature::new(events, data))
}

fn lower_bound(items: &[(Name, i64)]) -> EResult<Bound> {
    let mut b = Bound::default();
    for (k, v) in items {
        let v = usize::try_from(*v).map_err(|_| Diagnostic::error(k.span, "bounds must be non-negative"))?;
        match k.text.as_str() {
            "states" => b.ctrl_states = v,
            "data" => b.data_states = v,
            "models" => b.max_models = v,
            other => {
                return Err(Diagnostic::error(k.span, format!("unknown bound `{other}`"))
                    .with_note("expected `states`, `data` or `models`"))
            }
        }
    }
    Ok(b)
}

fn lower_composite(c: &CompositeAst) -> crate::constructors::CompositeEvent {
    use crate::constructors::CompositeEvent as C;
    match c {
        CompositeAst::Ev(n) => C::ev(&n.text),
        CompositeAst::Union(a, b) => C::union(lower_composite(a), lower_composite(b)),
        CompositeAst::Seq(a, b) => C::seq(lower_composite(a), lower_composite(b)),
        CompositeAst::Star(a) => C::star(lower_composite(a)),
    }
}

/// Build the constructor for a `via` pipeline applied to arguments over
/// `sigs`.
fn pipeline(ws: &Workspace, sigs: &[EdSignature], steps: &[Step], span: Span) -> EResult<Constructor> {
    let cerr = |s: Span| move |e: crate::constructors::ConstructorError| Diagnostic::error(s, e.to_string());
    let mut acc: Option<Constructor> = None;
    for step in steps {
        let k = match step.kind {
            StepKind::Identity => {
                let sig = match &acc {
                    Some(c) => c.output(),
                    None if sigs.len() == 1 => sigs[0].clone(),
                    None => return Err(Diagnostic::error(step.span, "`identity` takes one argument")),
                };
                Constructor::Identity(sig)
            }
            StepKind::Parallel => {
                if acc.is_some() || sigs.len() != 2 {
                    return Err(Diagnostic::error(
                        step.span,
                        "`parallel` must be the first step and combine exactly two specifications",
                    ));
                }
                Constructor::parallel(&sigs[0], &sigs[1]).map_err(cerr(step.span))?
            }
            kind => {
                let arg = step.arg.as_ref().expect("parser requires an argument");
                let m = ws
                    .morphisms
                    .get(&arg.text)
                    .ok_or_else(|| Diagnostic::error(arg.span, format!("unknown morphism `{}`", arg.text)))?;
                match (kind, m) {
                    (StepKind::EventRef, Morphism::EventRefinement(m)) => Constructor::EventRefinement(m.clone()),
                    (StepKind::EventRef, Morphism::Signature(m)) => {
                        Constructor::EventRefinement(EventRefinementMorphism::from_signature_morphism(m))
                    }
                    (_, Morphism::EventRefinement(_)) => {
                        return Err(Diagnostic::error(
                            arg.span,
                            format!("`{}` maps events to composite events; use `eventref`", arg.text),
                        ))
                    }
                    (StepKind::Relabel, Morphism::Signature(m)) if m.kind() != MorphismKind::Relabelling => {
                        return Err(Diagnostic::error(arg.span, format!("`{}` is not bijective", arg.text)))
                    }
                    (StepKind::Restrict, Morphism::Signature(m)) if m.kind() == MorphismKind::General => {
                        return Err(Diagnostic::error(arg.span, format!("`{}` is not injective", arg.text)))
                    }
                    (_, Morphism::Signature(m)) => Constructor::Reduct(m.clone()),
                }
            }
        };
        acc = Some(match acc {
            None => k,
            Some(prev) => Constructor::compose(vec![prev], k).map_err(cerr(step.span))?,
        });
    }
    match acc {
        Some(c) => Ok(c),
        None if sigs.len() == 1 => Ok(Constructor::Identity(sigs[0].clone())),
        None => Err(Diagnostic::error(span, "several concrete specifications need a `via` pipeline")),
    }
}

// Expressions.

/// A closed formula over `sig`.
pub(crate) fn lower_sentence(ast: &ExprAst, sig: &EdSignature) -> EResult<Formula> {
    let mut bound = Vec::new();
    lower_formula(ast, sig, &mut bound)
}

fn is_pure(ast: &ExprAst, bound: &[String]) -> bool {
    match &ast.kind {
        ExprKind::Bool(_) | ExprKind::Int(_) | ExprKind::Id(_) => true,
        ExprKind::Ident { name, primed } => *primed || !bound.contains(&name.text),
        ExprKind::Neg(a) | ExprKind::Not(a) | ExprKind::Paren(a) => is_pure(a, bound),
        ExprKind::Arith(_, a, b)
        | ExprKind::Cmp(_, a, b)
        | ExprKind::And(a, b)
        | ExprKind::Or(a, b)
        | ExprKind::Implies(a, b) => is_pure(a, bound) && is_pure(b, bound),
        ExprKind::Diamond(..) | ExprKind::Box(..) | ExprKind::Down(..) | ExprKind::At(..) => false,
    }
}

fn lower_formula(ast: &ExprAst, sig: &EdSignature, bound: &mut Vec<String>) -> EResult<Formula> {
    match &ast.kind {
        ExprKind::Bool(true) => return Ok(Formula::True),
        ExprKind::Bool(false) => return Ok(Formula::False),
        ExprKind::Ident { name, primed: false } => {
            if bound.contains(&name.text) {
                return Ok(Formula::Var(name.text.clone()));
            }
            if !sig.data().contains(&name.text) {
                return Err(Diagnostic::error(
                    name.span,
                    format!("free control-state variable `{}`", name.text),
                )
                .with_note("bind it with `down`, or declare an attribute of that name"));
            }
        }
        _ => {}
    }
    if is_pure(ast, bound) {
        return Ok(Formula::Pred(lower_pred(ast, sig.data(), PredKind::State)?));
    }
    let bin = |f: fn(Box<Formula>, Box<Formula>) -> Formula,
               a: &ExprAst,
               b: &ExprAst,
               bound: &mut Vec<String>|
     -> EResult<Formula> {
        let l = lower_formula(a, sig, bound)?;
        let r = lower_formula(b, sig, bound)?;
        Ok(f(Box::new(l), Box::new(r)))
    };
    match &ast.kind {
        ExprKind::Paren(a) => lower_formula(a, sig, bound),
        ExprKind::Not(a) => Ok(Formula::not(lower_formula(a, sig, bound)?)),
        ExprKind::And(a, b) => bin(Formula::And, a, b, bound),
        ExprKind::Or(a, b) => bin(Formula::Or, a, b, bound),
        ExprKind::Implies(a, b) => bin(Formula::Implies, a, b, bound),
        ExprKind::Diamond(act, body) => {
            let a = lower_action(act, sig)?;
            Ok(Formula::diamond(a, lower_formula(body, sig, bound)?))
        }
        ExprKind::Box(act, body) => {
            let a = lower_action(act, sig)?;
            Ok(Formula::boxed(a, lower_formula(body, sig, bound)?))
        }
        ExprKind::Down(x, body) => {
            bound.push(x.text.clone());
            let b = lower_formula(body, sig, bound);
            bound.pop();
            Ok(Formula::bind(&x.text, b?))
        }
        ExprKind::At(x, body) => {
            if !bound.contains(&x.text) {
                return Err(Diagnostic::error(x.span, format!("free control-state variable `{}`", x.text)));
            }
            Ok(Formula::at(&x.text, lower_formula(body, sig, bound)?))
        }
        ExprKind::Ident { name, .. } => Err(Diagnostic::error(
            name.span,
            format!("control-state variable `{}` used inside a data term", name.text),
        )),
        _ => {
            let var = first_var(ast, bound).expect("impure expression mentions a modality or a variable");
            Err(Diagnostic::error(
                var.span,
                "modalities and control-state variables cannot occur inside a data term",
            ))
        }
    }
}

fn first_var<'a>(ast: &'a ExprAst, bound: &[String]) -> Option<&'a ExprAst> {
    match &ast.kind {
        ExprKind::Ident { name, primed: false } if bound.contains(&name.text) => Some(ast),
        ExprKind::Diamond(..) | ExprKind::Box(..) | ExprKind::Down(..) | ExprKind::At(..) => Some(ast),
        ExprKind::Neg(a) | ExprKind::Not(a) | ExprKind::Paren(a) => first_var(a, bound),
        ExprKind::Arith(_, a, b)
        | ExprKind::Cmp(_, a, b)
        | ExprKind::And(a, b)
        | ExprKind::Or(a, b)
        | ExprKind::Implies(a, b) => first_var(a, bound).or_else(|| first_var(b, bound)),
        _ => None,
    }
}

/// A state or transition predicate over `data`, sort-checked.
pub(crate) fn lower_pred(ast: &ExprAst, data: &DataSignature, kind: PredKind) -> EResult<Expr> {
    let e = lower_expr(ast, data, kind)?;
    e.typecheck(data, kind).map_err(|err| Diagnostic::error(ast.span, err.to_string()))?;
    Ok(e)
}

fn lower_expr(ast: &ExprAst, data: &DataSignature, kind: PredKind) -> EResult<Expr> {
    let rec = |a: &ExprAst| lower_expr(a, data, kind).map(Box::new);
    Ok(match &ast.kind {
        ExprKind::Bool(b) => Expr::Bool(*b),
        ExprKind::Int(n) => Expr::Int(*n),
        ExprKind::Ident { name, primed } => {
            if !data.contains(&name.text) {
                return Err(Diagnostic::error(name.span, format!("unknown attribute `{}`", name.text)));
            }
            if *primed && kind == PredKind::State {
                return Err(Diagnostic::error(
                    ast.span,
                    format!("primed attribute `{}'` in a state predicate", name.text),
                ));
            }
            Expr::Attr {
                name: name.text.clone(),
                primed: *primed,
            }
        }
        ExprKind::Id(names) => {
            if kind == PredKind::State {
                return Err(Diagnostic::error(ast.span, "`id` in a state predicate"));
            }
            for n in names {
                if !data.contains(&n.text) {
                    return Err(Diagnostic::error(n.span, format!("unknown attribute `{}`", n.text)));
                }
            }
            Expr::Id(names.iter().map(|n| n.text.clone()).collect())
        }
        ExprKind::Neg(a) => Expr::Neg(rec(a)?),
        ExprKind::Arith(op, a, b) => Expr::Arith(*op, rec(a)?, rec(b)?),
        ExprKind::Cmp(op, a, b) => Expr::Cmp(*op, rec(a)?, rec(b)?),
        ExprKind::Not(a) => Expr::Not(rec(a)?),
        ExprKind::And(a, b) => Expr::And(rec(a)?, rec(b)?),
        ExprKind::Or(a, b) => Expr::Or(rec(a)?, rec(b)?),
        ExprKind::Implies(a, b) => Expr::Implies(rec(a)?, rec(b)?),
        ExprKind::Paren(a) => lower_expr(a, data, kind)?,
        ExprKind::Diamond(..) | ExprKind::Box(..) | ExprKind::Down(..) | ExprKind::At(..) => {
            return Err(Diagnostic::error(ast.span, "modal operator inside a data predicate"))
        }
    })
}

pub(crate) fn lower_action(ast: &ActionAst, sig: &EdSignature) -> EResult<Action> {
    let err = |e: crate::logic::LogicError| Diagnostic::error(ast.span, e.to_string());
    Ok(match &ast.kind {
        ActionKind::Atom { event, effect } => {
            if !sig.has_event(&event.text) {
                return Err(Diagnostic::error(event.span, format!("unknown event `{}`", event.text)));
            }
            let psi = match effect {
                Some(e) => lower_pred(e, sig.data(), PredKind::Trans)?,
                None => Expr::Bool(true),
            };
            Action::atom(&event.text, psi)
        }
        ActionKind::Any => Action::any(sig).map_err(err)?,
        ActionKind::Complement(names) => {
            for n in names {
                if !sig.has_event(&n.text) {
                    return Err(Diagnostic::error(n.span, format!("unknown event `{}`", n.text)));
                }
            }
            let ex: Vec<String> = names.iter().map(|n| n.text.clone()).collect();
            Action::complement(sig, &ex).map_err(err)?
        }
        ActionKind::Union(a, b) => Action::union(lower_action(a, sig)?, lower_action(b, sig)?),
        ActionKind::Seq(a, b) => Action::seq(lower_action(a, sig)?, lower_action(b, sig)?),
        ActionKind::Star(a) => Action::star(lower_action(a, sig)?),
        ActionKind::Power(a, n) => Action::power(lower_action(a, sig)?, *n).map_err(err)?,
    })
}
