//! Recursive-descent parser.
//!
//! Precedence in formulas and predicates, loosest first: `->` (right
//! associative), `or`, `and`, then the prefix operators `not`, `<a>`, `[a]`,
//! then comparisons and arithmetic. `down x .` and `at x .` extend as far
//! to the right as possible. In actions `;` binds loosest, then `+`, then
//! the postfix `*` and `^n`. Inside `<...>` a top-level `>` closes the
//! modality, so comparisons with `>` or `>=` there need parentheses.

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Span};
use crate::ident::RESERVED;
use crate::pred::{ArithOp, CmpOp};

type PResult<T> = Result<T, Diagnostic>;

const TOP_LEVEL: &[&str] = &["import", "sig", "spec", "opspec", "morphism", "refine", "derive"];
const STEPS: &[&str] = &["identity", "parallel", "restrict", "relabel", "reduct", "eventref"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

/// Parse a whole file. Declarations with errors are dropped; parsing
/// resumes at the next `;` or declaration keyword.
pub fn parse_unit(file: usize, text: &str) -> (SourceUnit, Vec<Diagnostic>) {
    let (toks, diags) = lex(file, text);
    let mut p = Parser {
        toks,
        pos: 0,
        diags,
    };
    let mut decls = Vec::new();
    while !p.at_eof() {
        if !p.at_top_level() {
            let t = p.peek().clone();
            p.diags.push(Diagnostic::error(
                t.span,
                format!("expected a declaration, found {}", t.tok),
            ));
            p.bump();
            p.skip_to_top_level();
            continue;
        }
        match p.decl() {
            Ok(d) => decls.push(d),
            Err(d) => {
                p.diags.push(d);
                p.skip_to_top_level();
            }
        }
    }
    (SourceUnit { file, decls }, p.diags)
}

pub(crate) fn parse_formula_text(text: &str) -> Result<ExprAst, Vec<Diagnostic>> {
    let (toks, diags) = lex(0, text);
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        diags: Vec::new(),
    };
    let e = p.formula(false).map_err(|d| vec![d])?;
    p.expect_eof().map_err(|d| vec![d])?;
    Ok(e)
}

pub(crate) fn parse_action_text(text: &str) -> Result<ActionAst, Vec<Diagnostic>> {
    let (toks, diags) = lex(0, text);
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        diags: Vec::new(),
    };
    let a = p.action(false).map_err(|d| vec![d])?;
    p.expect_eof().map_err(|d| vec![d])?;
    Ok(a)
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            self.toks[0].span
        } else {
            self.toks[self.pos - 1].span
        }
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn at_word(&self, w: &str) -> bool {
        self.peek().tok.is_word(w)
    }

    fn at_sym(&self, s: &str) -> bool {
        self.peek().tok.is_sym(s)
    }

    fn at_top_level(&self) -> bool {
        TOP_LEVEL.iter().any(|w| self.at_word(w))
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.at_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        Diagnostic::error(t.span, format!("expected {expected}, found {}", t.tok))
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Span> {
        if self.at_sym(s) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<Span> {
        if self.at_word(w) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn skip_to_top_level(&mut self) {
        while !self.at_eof() && !self.at_top_level() {
            self.bump();
        }
    }

    /// Skip past the next `;`, stopping early at a declaration keyword.
    fn skip_item(&mut self) {
        while !self.at_eof() && !self.at_top_level() {
            if self.bump().tok.is_sym(";") {
                return;
            }
        }
    }

    fn name(&mut self, what: &str) -> PResult<Name> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Word(w) if !RESERVED.contains(&w.as_str()) => {
                self.bump();
                Ok(Name { text: w, span: t.span })
            }
            Tok::Quoted(w) => {
                self.bump();
                Ok(Name { text: w, span: t.span })
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn name_list(&mut self, what: &str) -> PResult<Vec<Name>> {
        let mut out = vec![self.name(what)?];
        while self.eat_sym(",") {
            out.push(self.name(what)?);
        }
        Ok(out)
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym("-");
        match self.peek().tok {
            Tok::Int(n) => {
                self.bump();
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    // Declarations.

    fn decl(&mut self) -> PResult<Decl> {
        let kw = self.bump();
        let Tok::Word(kw_text) = &kw.tok else { unreachable!("checked by caller") };
        match kw_text.as_str() {
            "import" => {
                let path = match self.peek().tok.clone() {
                    Tok::Str(s) => {
                        self.bump();
                        s
                    }
                    _ => return Err(self.unexpected("a quoted file name")),
                };
                self.expect_sym(";")?;
                Ok(Decl::Import {
                    path,
                    span: kw.span.to(self.prev_span()),
                })
            }
            "sig" => {
                let name = self.name("a signature name")?;
                let mut items = SigItems {
                    base: self.base()?,
                    ..SigItems::default()
                };
                while !self.at_eof() && !self.at_top_level() {
                    let r = self.sig_item(&mut items).and_then(|handled| {
                        if handled {
                            Ok(())
                        } else {
                            Err(self.unexpected("`events` or `attrs`"))
                        }
                    });
                    self.recover(r);
                }
                Ok(Decl::Sig { name, items })
            }
            "spec" => {
                let name = self.name("a specification name")?;
                let mut items = SigItems {
                    base: self.base()?,
                    ..SigItems::default()
                };
                let mut axioms = Vec::new();
                while !self.at_eof() && !self.at_top_level() {
                    let r = self.spec_item(&mut items, &mut axioms);
                    self.recover(r);
                }
                Ok(Decl::Spec { name, items, axioms })
            }
            "opspec" => {
                let name = self.name("a specification name")?;
                if self.eat_sym("=") {
                    let left = self.name("a specification name")?;
                    self.expect_sym("||")?;
                    let right = self.name("a specification name")?;
                    self.expect_sym(";")?;
                    return Ok(Decl::Compose { name, left, right });
                }
                let mut items = SigItems {
                    base: self.base()?,
                    ..SigItems::default()
                };
                let mut states = Vec::new();
                let mut init = None;
                let mut transitions = Vec::new();
                while !self.at_eof() && !self.at_top_level() {
                    let r = self.opspec_item(&mut items, &mut states, &mut init, &mut transitions);
                    self.recover(r);
                }
                Ok(Decl::OpSpec {
                    name,
                    items,
                    states,
                    init,
                    transitions,
                })
            }
            "morphism" => self.morphism(),
            "refine" | "derive" => {
                let derive = kw_text == "derive";
                let abstract_spec = self.name("a specification name")?;
                self.expect_word("by")?;
                let concrete = self.name_list("a specification name")?;
                let mut steps = Vec::new();
                if self.eat_word("via") {
                    steps.push(self.step()?);
                    self.expect_sym(";")?;
                    while STEPS.iter().any(|w| self.at_word(w)) {
                        steps.push(self.step()?);
                        self.expect_sym(";")?;
                    }
                } else {
                    self.expect_sym(";")?;
                }
                let mut bound = Vec::new();
                if self.eat_word("bound") {
                    loop {
                        let key = self.name("a bound name")?;
                        self.expect_sym("=")?;
                        let v = self.int()?;
                        bound.push((key, v));
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.expect_sym(";")?;
                }
                let span = kw.span.to(self.prev_span());
                Ok(if derive {
                    Decl::Derive {
                        abstract_spec,
                        concrete,
                        steps,
                        bound,
                        span,
                    }
                } else {
                    Decl::Refine {
                        abstract_spec,
                        concrete,
                        steps,
                        bound,
                        span,
                    }
                })
            }
            _ => unreachable!("top-level keywords are exhaustive"),
        }
    }

    fn recover(&mut self, r: PResult<()>) {
        if let Err(d) = r {
            self.diags.push(d);
            self.skip_item();
        }
    }

    fn base(&mut self) -> PResult<Option<Name>> {
        if self.eat_sym(":") {
            Ok(Some(self.name("a signature name")?))
        } else {
            Ok(None)
        }
    }

    /// `events ...;` or `attrs ...;`. Returns false if neither applies.
    fn sig_item(&mut self, items: &mut SigItems) -> PResult<bool> {
        if self.eat_word("events") {
            if !self.at_sym(";") {
                items.events.extend(self.name_list("an event name")?);
            }
            self.expect_sym(";")?;
            return Ok(true);
        }
        if self.eat_word("attrs") {
            if !self.at_sym(";") {
                loop {
                    let name = self.name("an attribute name")?;
                    self.expect_sym(":")?;
                    let sort = if self.eat_word("bool") {
                        SortAst::Bool
                    } else if self.eat_word("int") {
                        if self.eat_sym("[") {
                            let lo = self.int()?;
                            self.expect_sym("..")?;
                            let hi = self.int()?;
                            self.expect_sym("]")?;
                            SortAst::Int(Some((lo, hi)))
                        } else {
                            SortAst::Int(None)
                        }
                    } else {
                        return Err(self.unexpected("`bool` or `int`"));
                    };
                    items.attrs.push(AttrDecl { name, sort });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym(";")?;
            return Ok(true);
        }
        Ok(false)
    }

    fn spec_item(&mut self, items: &mut SigItems, axioms: &mut Vec<AxiomAst>) -> PResult<()> {
        if self.sig_item(items)? {
            return Ok(());
        }
        let start = self.expect_word("axiom")?;
        let label = match self.peek().tok.clone() {
            Tok::Str(s) => {
                self.bump();
                self.expect_sym(":")?;
                Some(s)
            }
            _ => None,
        };
        let body = self.formula(false)?;
        self.expect_sym(";")?;
        axioms.push(AxiomAst {
            label,
            body,
            span: start.to(self.prev_span()),
        });
        Ok(())
    }

    fn opspec_item(
        &mut self,
        items: &mut SigItems,
        states: &mut Vec<Name>,
        init: &mut Option<(Name, Option<ExprAst>)>,
        transitions: &mut Vec<TransAst>,
    ) -> PResult<()> {
        if self.sig_item(items)? {
            return Ok(());
        }
        if self.eat_word("states") {
            states.extend(self.name_list("a control state")?);
            self.expect_sym(";")?;
            return Ok(());
        }
        if self.at_word("init") {
            let kw = self.bump().span;
            let c = self.name("a control state")?;
            let pred = if self.eat_sym("[") {
                let p = self.formula(false)?;
                self.expect_sym("]")?;
                Some(p)
            } else {
                None
            };
            self.expect_sym(";")?;
            if init.is_some() {
                return Err(Diagnostic::error(kw.to(self.prev_span()), "duplicate `init` declaration"));
            }
            *init = Some((c, pred));
            return Ok(());
        }
        let start = self.peek().span;
        let mut guard = None;
        if self.eat_sym("[") {
            guard = Some(self.formula(false)?);
            self.expect_sym("]")?;
        }
        let src = self.name("a transition or item")?;
        self.expect_sym("--")?;
        if self.eat_sym("[") {
            if guard.is_some() {
                return Err(Diagnostic::error(self.prev_span(), "transition has two guards"));
            }
            guard = Some(self.formula(false)?);
            self.expect_sym("]")?;
        }
        self.expect_sym("(")?;
        let event = self.name("an event name")?;
        let effect = if self.eat_sym("//") {
            Some(self.effect(false)?)
        } else {
            None
        };
        self.expect_sym(")")?;
        self.expect_sym("-->")?;
        let dst = self.name("a control state")?;
        self.expect_sym(";")?;
        transitions.push(TransAst {
            src,
            guard,
            event,
            effect,
            dst,
            span: start.to(self.prev_span()),
        });
        Ok(())
    }

    fn morphism(&mut self) -> PResult<Decl> {
        let name = self.name("a morphism name")?;
        self.expect_sym(":")?;
        let source = self.name("a signature name")?;
        self.expect_sym("->")?;
        let target = self.name("a signature name")?;
        self.expect_sym("{")?;
        let mut events = Vec::new();
        let mut attrs = Vec::new();
        while !self.at_sym("}") {
            if self.at_eof() || self.at_top_level() {
                return Err(self.unexpected("`}`"));
            }
            let r = (|| -> PResult<()> {
                if self.eat_word("event") {
                    let e = self.name("an event name")?;
                    self.expect_sym("->")?;
                    let th = self.composite_seq(true)?;
                    self.expect_sym(";")?;
                    events.push((e, th));
                    Ok(())
                } else if self.eat_word("attr") {
                    let a = self.name("an attribute name")?;
                    self.expect_sym("->")?;
                    let b = self.name("an attribute name")?;
                    self.expect_sym(";")?;
                    attrs.push((a, b));
                    Ok(())
                } else {
                    Err(self.unexpected("`event`, `attr` or `}`"))
                }
            })();
            if let Err(d) = r {
                self.diags.push(d);
                while !self.at_eof() && !self.at_top_level() && !self.at_sym("}") {
                    if self.bump().tok.is_sym(";") && (self.at_word("event") || self.at_word("attr")) {
                        break;
                    }
                }
            }
        }
        self.expect_sym("}")?;
        self.eat_sym(";");
        Ok(Decl::Morphism {
            name,
            source,
            target,
            events,
            attrs,
        })
    }

    /// Composite events. In a morphism entry `;` also ends the entry, so a
    /// sequence continues only when the token after `;` starts a term.
    fn composite_seq(&mut self, in_entry: bool) -> PResult<CompositeAst> {
        let mut acc = self.composite_union()?;
        while self.at_sym(";") {
            let starts_term = match self.peek_at(1) {
                Tok::Word(w) => !(in_entry && (w == "event" || w == "attr")) && !RESERVED.contains(&w.as_str()),
                Tok::Quoted(_) => true,
                t => t.is_sym("("),
            };
            if !starts_term {
                break;
            }
            self.bump();
            let rhs = self.composite_union()?;
            acc = CompositeAst::Seq(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn composite_union(&mut self) -> PResult<CompositeAst> {
        let mut acc = self.composite_postfix()?;
        while self.eat_sym("+") {
            let rhs = self.composite_postfix()?;
            acc = CompositeAst::Union(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn composite_postfix(&mut self) -> PResult<CompositeAst> {
        let mut acc = if self.eat_sym("(") {
            let inner = self.composite_seq(false)?;
            self.expect_sym(")")?;
            inner
        } else {
            CompositeAst::Ev(self.name("an event name")?)
        };
        while self.eat_sym("*") {
            acc = CompositeAst::Star(Box::new(acc));
        }
        Ok(acc)
    }

    fn step(&mut self) -> PResult<Step> {
        let t = self.peek().clone();
        let kind = match &t.tok {
            Tok::Word(w) => match w.as_str() {
                "identity" => StepKind::Identity,
                "parallel" => StepKind::Parallel,
                "restrict" => StepKind::Restrict,
                "relabel" => StepKind::Relabel,
                "reduct" => StepKind::Reduct,
                "eventref" => StepKind::EventRef,
                _ => return Err(self.unexpected("a constructor")),
            },
            _ => return Err(self.unexpected("a constructor")),
        };
        self.bump();
        let arg = match kind {
            StepKind::Identity | StepKind::Parallel => None,
            _ => Some(self.name("a morphism name")?),
        };
        Ok(Step {
            kind,
            arg,
            span: t.span.to(self.prev_span()),
        })
    }

    // Formulas and predicates.

    /// `no_gt`: a top-level `>` ends the expression (inside `<...>`).
    fn formula(&mut self, no_gt: bool) -> PResult<ExprAst> {
        let lhs = self.disjunction(no_gt)?;
        if self.eat_sym("->") {
            let rhs = self.formula(no_gt)?;
            let span = lhs.span.to(rhs.span);
            return Ok(ExprAst {
                kind: ExprKind::Implies(Box::new(lhs), Box::new(rhs)),
                span,
            });
        }
        Ok(lhs)
    }

    fn disjunction(&mut self, no_gt: bool) -> PResult<ExprAst> {
        let mut acc = self.conjunction(no_gt)?;
        while self.eat_word("or") {
            let rhs = self.conjunction(no_gt)?;
            let span = acc.span.to(rhs.span);
            acc = ExprAst {
                kind: ExprKind::Or(Box::new(acc), Box::new(rhs)),
                span,
            };
        }
        Ok(acc)
    }

    fn conjunction(&mut self, no_gt: bool) -> PResult<ExprAst> {
        let mut acc = self.unary(no_gt)?;
        while self.eat_word("and") {
            let rhs = self.unary(no_gt)?;
            let span = acc.span.to(rhs.span);
            acc = ExprAst {
                kind: ExprKind::And(Box::new(acc), Box::new(rhs)),
                span,
            };
        }
        Ok(acc)
    }

    fn unary(&mut self, no_gt: bool) -> PResult<ExprAst> {
        let start = self.peek().span;
        if self.eat_word("not") {
            let body = self.unary(no_gt)?;
            let span = start.to(body.span);
            return Ok(ExprAst {
                kind: ExprKind::Not(Box::new(body)),
                span,
            });
        }
        if self.eat_sym("<") {
            let a = self.action(true)?;
            self.expect_sym(">")?;
            let body = self.unary(no_gt)?;
            let span = start.to(body.span);
            return Ok(ExprAst {
                kind: ExprKind::Diamond(a, Box::new(body)),
                span,
            });
        }
        if self.eat_sym("[") {
            let a = self.action(false)?;
            self.expect_sym("]")?;
            let body = self.unary(no_gt)?;
            let span = start.to(body.span);
            return Ok(ExprAst {
                kind: ExprKind::Box(a, Box::new(body)),
                span,
            });
        }
        for (kw, at) in [("down", false), ("at", true)] {
            if self.eat_word(kw) {
                let x = self.name("a variable name")?;
                self.expect_sym(".")?;
                let body = self.formula(no_gt)?;
                let span = start.to(body.span);
                let kind = if at {
                    ExprKind::At(x, Box::new(body))
                } else {
                    ExprKind::Down(x, Box::new(body))
                };
                return Ok(ExprAst { kind, span });
            }
        }
        self.comparison(no_gt)
    }

    fn comparison(&mut self, no_gt: bool) -> PResult<ExprAst> {
        let lhs = self.sum()?;
        let op = match &self.peek().tok {
            Tok::Sym("=") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") if !no_gt => CmpOp::Gt,
            Tok::Sym(">=") if !no_gt => CmpOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.sum()?;
        let span = lhs.span.to(rhs.span);
        Ok(ExprAst {
            kind: ExprKind::Cmp(op, Box::new(lhs), Box::new(rhs)),
            span,
        })
    }

    fn sum(&mut self) -> PResult<ExprAst> {
        let mut acc = self.product()?;
        loop {
            let op = if self.at_sym("+") {
                ArithOp::Add
            } else if self.at_sym("-") {
                ArithOp::Sub
            } else {
                return Ok(acc);
            };
            self.bump();
            let rhs = self.product()?;
            let span = acc.span.to(rhs.span);
            acc = ExprAst {
                kind: ExprKind::Arith(op, Box::new(acc), Box::new(rhs)),
                span,
            };
        }
    }

    fn product(&mut self) -> PResult<ExprAst> {
        let mut acc = self.factor()?;
        while self.eat_sym("*") {
            let rhs = self.factor()?;
            let span = acc.span.to(rhs.span);
            acc = ExprAst {
                kind: ExprKind::Arith(ArithOp::Mul, Box::new(acc), Box::new(rhs)),
                span,
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> PResult<ExprAst> {
        let start = self.peek().span;
        if self.eat_sym("-") {
            let body = self.factor()?;
            let span = start.to(body.span);
            return Ok(ExprAst {
                kind: ExprKind::Neg(Box::new(body)),
                span,
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<ExprAst> {
        let t = self.peek().clone();
        let kind = match &t.tok {
            Tok::Int(n) => {
                self.bump();
                ExprKind::Int(*n)
            }
            Tok::Word(w) if w == "true" || w == "false" => {
                self.bump();
                ExprKind::Bool(w == "true")
            }
            Tok::Word(w) if w == "id" => {
                self.bump();
                let (open, close) = if self.at_sym("(") { ("(", ")") } else { ("{", "}") };
                self.expect_sym(open)?;
                let names = if self.at_sym(close) {
                    Vec::new()
                } else {
                    self.name_list("an attribute name")?
                };
                self.expect_sym(close)?;
                ExprKind::Id(names)
            }
            Tok::Sym("(") => {
                self.bump();
                let inner = self.formula(false)?;
                self.expect_sym(")")?;
                ExprKind::Paren(Box::new(inner))
            }
            Tok::Word(_) | Tok::Quoted(_) => {
                let name = self.name("an expression")?;
                let primed = self.eat_sym("'");
                ExprKind::Ident { name, primed }
            }
            _ => return Err(self.unexpected("an expression")),
        };
        Ok(ExprAst {
            kind,
            span: t.span.to(self.prev_span()),
        })
    }

    /// Transition predicate after `//`.
    fn effect(&mut self, no_gt: bool) -> PResult<ExprAst> {
        let starts = match &self.peek().tok {
            Tok::Int(_) | Tok::Quoted(_) => true,
            Tok::Word(w) => !["and", "or", "down", "at", "E"].contains(&w.as_str()),
            Tok::Sym(s) => *s == "(" || *s == "-",
            _ => false,
        };
        if !starts {
            return Err(self.unexpected("transition predicate"));
        }
        self.formula(no_gt)
    }

    // Actions.

    fn action(&mut self, angle: bool) -> PResult<ActionAst> {
        let mut acc = self.action_union(angle)?;
        while self.eat_sym(";") {
            let rhs = self.action_union(angle)?;
            let span = acc.span.to(rhs.span);
            acc = ActionAst {
                kind: ActionKind::Seq(Box::new(acc), Box::new(rhs)),
                span,
            };
        }
        Ok(acc)
    }

    fn action_union(&mut self, angle: bool) -> PResult<ActionAst> {
        let mut acc = self.action_postfix(angle)?;
        while self.eat_sym("+") {
            let rhs = self.action_postfix(angle)?;
            let span = acc.span.to(rhs.span);
            acc = ActionAst {
                kind: ActionKind::Union(Box::new(acc), Box::new(rhs)),
                span,
            };
        }
        Ok(acc)
    }

    fn action_postfix(&mut self, angle: bool) -> PResult<ActionAst> {
        let mut acc = self.action_primary(angle)?;
        loop {
            if self.eat_sym("*") {
                let span = acc.span.to(self.prev_span());
                acc = ActionAst {
                    kind: ActionKind::Star(Box::new(acc)),
                    span,
                };
            } else if self.eat_sym("^") {
                let n = match self.peek().tok {
                    Tok::Int(n) if n >= 1 && n <= u32::MAX as i64 => n as u32,
                    _ => return Err(self.unexpected("a positive iteration count")),
                };
                self.bump();
                let span = acc.span.to(self.prev_span());
                acc = ActionAst {
                    kind: ActionKind::Power(Box::new(acc), n),
                    span,
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn action_primary(&mut self, angle: bool) -> PResult<ActionAst> {
        let start = self.peek().span;
        if self.eat_sym("(") {
            let inner = self.action(false)?;
            self.expect_sym(")")?;
            return Ok(ActionAst {
                kind: inner.kind,
                span: start.to(self.prev_span()),
            });
        }
        if self.eat_word("E") {
            return Ok(ActionAst {
                kind: ActionKind::Any,
                span: start,
            });
        }
        if self.eat_sym("-") {
            let names = if self.eat_sym("{") {
                let n = self.name_list("an event name")?;
                self.expect_sym("}")?;
                n
            } else {
                vec![self.name("an event name")?]
            };
            return Ok(ActionAst {
                kind: ActionKind::Complement(names),
                span: start.to(self.prev_span()),
            });
        }
        let event = self.name("an action")?;
        let effect = if self.eat_sym("//") {
            Some(Box::new(self.effect(angle)?))
        } else {
            None
        };
        Ok(ActionAst {
            kind: ActionKind::Atom { event, effect },
            span: start.to(self.prev_span()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_effect_is_reported() {
        let (_, d) = parse_unit(0, "opspec A events insertCard; init Card; Card --(insertCard // )--> PIN;");
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("expected transition predicate"), "{}", d[0].message);
    }

    #[test]
    fn recovery_continues_after_bad_item() {
        let text = "spec S events e; axiom <e true; axiom true; spec T events f;";
        let (u, d) = parse_unit(0, text);
        assert_eq!(d.len(), 1);
        assert_eq!(u.decls.len(), 2);
        let Decl::Spec { axioms, .. } = &u.decls[0] else { panic!() };
        assert_eq!(axioms.len(), 1);
    }

    #[test]
    fn sequence_in_morphism_entry() {
        let text = "morphism a : X -> Y { event p -> p; q; (r + s); attr x -> x; }";
        let (u, d) = parse_unit(0, text);
        assert!(d.is_empty(), "{d:?}");
        let Decl::Morphism { events, attrs, .. } = &u.decls[0] else { panic!() };
        assert_eq!(events.len(), 1);
        assert_eq!(attrs.len(), 1);
        assert!(matches!(events[0].1, CompositeAst::Seq(..)));
    }
}
