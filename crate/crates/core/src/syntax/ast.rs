//! Surface syntax trees. Every node keeps its source span; names are not
//! resolved yet, so predicates and formulas share one expression tree.

use super::Span;
use crate::pred::{ArithOp, CmpOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprAst {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Bool(bool),
    Int(i64),
    Ident { name: Name, primed: bool },
    Id(Vec<Name>),
    Neg(Box<ExprAst>),
    Arith(ArithOp, Box<ExprAst>, Box<ExprAst>),
    Cmp(CmpOp, Box<ExprAst>, Box<ExprAst>),
    Not(Box<ExprAst>),
    And(Box<ExprAst>, Box<ExprAst>),
    Or(Box<ExprAst>, Box<ExprAst>),
    Implies(Box<ExprAst>, Box<ExprAst>),
    Diamond(ActionAst, Box<ExprAst>),
    Box(ActionAst, Box<ExprAst>),
    Down(Name, Box<ExprAst>),
    At(Name, Box<ExprAst>),
    Paren(Box<ExprAst>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionAst {
    pub kind: ActionKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionKind {
    Atom { event: Name, effect: Option<Box<ExprAst>> },
    /// `E`: any event.
    Any,
    /// `-e` or `-{e, f}`: any event except the listed ones.
    Complement(Vec<Name>),
    Union(Box<ActionAst>, Box<ActionAst>),
    Seq(Box<ActionAst>, Box<ActionAst>),
    Star(Box<ActionAst>),
    Power(Box<ActionAst>, u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SortAst {
    Bool,
    /// `int` without bounds takes its range from the universe.
    Int(Option<(i64, i64)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttrDecl {
    pub name: Name,
    pub sort: SortAst,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SigItems {
    /// Signature (or specification) whose events and attributes are included.
    pub base: Option<Name>,
    pub events: Vec<Name>,
    pub attrs: Vec<AttrDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomAst {
    pub label: Option<String>,
    pub body: ExprAst,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransAst {
    pub src: Name,
    pub guard: Option<ExprAst>,
    pub event: Name,
    pub effect: Option<ExprAst>,
    pub dst: Name,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompositeAst {
    Ev(Name),
    Union(Box<CompositeAst>, Box<CompositeAst>),
    Seq(Box<CompositeAst>, Box<CompositeAst>),
    Star(Box<CompositeAst>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Identity,
    Parallel,
    Restrict,
    Relabel,
    Reduct,
    EventRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub kind: StepKind,
    pub arg: Option<Name>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Import {
        path: String,
        span: Span,
    },
    Sig {
        name: Name,
        items: SigItems,
    },
    Spec {
        name: Name,
        items: SigItems,
        axioms: Vec<AxiomAst>,
    },
    OpSpec {
        name: Name,
        items: SigItems,
        states: Vec<Name>,
        init: Option<(Name, Option<ExprAst>)>,
        transitions: Vec<TransAst>,
    },
    Compose {
        name: Name,
        left: Name,
        right: Name,
    },
    Morphism {
        name: Name,
        source: Name,
        target: Name,
        events: Vec<(Name, CompositeAst)>,
        attrs: Vec<(Name, Name)>,
    },
    Refine {
        abstract_spec: Name,
        concrete: Vec<Name>,
        steps: Vec<Step>,
        bound: Vec<(Name, i64)>,
        span: Span,
    },
    Derive {
        abstract_spec: Name,
        concrete: Vec<Name>,
        steps: Vec<Step>,
        bound: Vec<(Name, i64)>,
        span: Span,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceUnit {
    pub file: usize,
    pub decls: Vec<Decl>,
}
