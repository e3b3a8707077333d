//! State and transition predicates over attributes.
//!
//! A single expression type covers integer terms, state predicates (no
//! primed attributes) and transition predicates (primed attributes refer to
//! the post-state). Arithmetic is exact: intermediate values are never
//! wrapped or clamped, and a post-state outside the universe simply does not
//! exist.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::data::{DataError, DataSignature, DataState, Sort, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Bool(bool),
    Int(i64),
    Attr { name: String, primed: bool },
    Neg(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    /// `id{a, b}`: the listed attributes keep their values.
    Id(Vec<String>),
}

/// A predicate over a single data state.
pub type StatePred = Expr;
/// A predicate over a pair of pre- and post-states.
pub type TransPred = Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredError {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("primed attribute `{0}'` in a state predicate")]
    PrimedInState(String),
    #[error("`id` in a state predicate")]
    IdInState,
    #[error("sort mismatch: expected {expected}, found {found} in `{expr}`")]
    SortMismatch {
        expected: &'static str,
        found: &'static str,
        expr: String,
    },
    #[error("attribute `{0}` has no value in the state")]
    Unassigned(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredKind {
    State,
    Trans,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Bool,
    Int,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Bool => "bool",
            Ty::Int => "int",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Num {
    Small(i128),
    Big(BigInt),
}

impl Num {
    fn big(&self) -> BigInt {
        match self {
            Num::Small(n) => BigInt::from(*n),
            Num::Big(b) => b.clone(),
        }
    }

    fn arith(op: ArithOp, a: &Num, b: &Num) -> Num {
        if let (Num::Small(x), Num::Small(y)) = (a, b) {
            let r = match op {
                ArithOp::Add => x.checked_add(*y),
                ArithOp::Sub => x.checked_sub(*y),
                ArithOp::Mul => x.checked_mul(*y),
            };
            if let Some(r) = r {
                return Num::Small(r);
            }
        }
        let (x, y) = (a.big(), b.big());
        let r = match op {
            ArithOp::Add => x + y,
            ArithOp::Sub => x - y,
            ArithOp::Mul => x * y,
        };
        Num::Big(r)
    }

    fn neg(&self) -> Num {
        match self {
            Num::Small(n) => match n.checked_neg() {
                Some(m) => Num::Small(m),
                None => Num::Big(-BigInt::from(*n)),
            },
            Num::Big(b) => Num::Big(-b.clone()),
        }
    }

    fn compare(&self, other: &Num) -> Ordering {
        match (self, other) {
            (Num::Small(x), Num::Small(y)) => x.cmp(y),
            _ => self.big().cmp(&other.big()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Val {
    B(bool),
    N(Num),
}

impl Expr {
    pub fn attr(name: &str) -> Expr {
        Expr::Attr {
            name: name.to_string(),
            primed: false,
        }
    }

    pub fn post(name: &str) -> Expr {
        Expr::Attr {
            name: name.to_string(),
            primed: true,
        }
    }

    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Expr {
        Expr::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::cmp(CmpOp::Eq, a, b)
    }

    pub fn arith(op: ArithOp, a: Expr, b: Expr) -> Expr {
        Expr::Arith(op, Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Expr) -> Expr {
        Expr::Not(Box::new(a))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Expr, b: Expr) -> Expr {
        Expr::Implies(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Expr>) -> Expr {
        items
            .into_iter()
            .reduce(Expr::and)
            .unwrap_or(Expr::Bool(true))
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Expr>) -> Expr {
        items
            .into_iter()
            .reduce(Expr::or)
            .unwrap_or(Expr::Bool(false))
    }

    /// True when the expression mentions no primed attribute and no `id`.
    pub fn is_state_predicate(&self) -> bool {
        match self {
            Expr::Bool(_) | Expr::Int(_) => true,
            Expr::Attr { primed, .. } => !primed,
            Expr::Id(_) => false,
            Expr::Neg(a) | Expr::Not(a) => a.is_state_predicate(),
            Expr::Arith(_, a, b)
            | Expr::Cmp(_, a, b)
            | Expr::And(a, b)
            | Expr::Or(a, b)
            | Expr::Implies(a, b) => a.is_state_predicate() && b.is_state_predicate(),
        }
    }

    /// Attribute names mentioned, primed or not.
    pub fn attributes(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_attrs(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_attrs(&self, out: &mut Vec<String>) {
        match self {
            Expr::Bool(_) | Expr::Int(_) => {}
            Expr::Attr { name, .. } => out.push(name.clone()),
            Expr::Id(names) => out.extend(names.iter().cloned()),
            Expr::Neg(a) | Expr::Not(a) => a.collect_attrs(out),
            Expr::Arith(_, a, b)
            | Expr::Cmp(_, a, b)
            | Expr::And(a, b)
            | Expr::Or(a, b)
            | Expr::Implies(a, b) => {
                a.collect_attrs(out);
                b.collect_attrs(out);
            }
        }
    }

    /// Rename attributes (both primed and unprimed occurrences).
    pub fn rename_attrs(&self, f: &impl Fn(&str) -> String) -> Expr {
        match self {
            Expr::Bool(_) | Expr::Int(_) => self.clone(),
            Expr::Attr { name, primed } => Expr::Attr {
                name: f(name),
                primed: *primed,
            },
            Expr::Id(names) => Expr::Id(names.iter().map(|n| f(n)).collect()),
            Expr::Neg(a) => Expr::Neg(Box::new(a.rename_attrs(f))),
            Expr::Not(a) => Expr::Not(Box::new(a.rename_attrs(f))),
            Expr::Arith(op, a, b) => {
                Expr::Arith(*op, Box::new(a.rename_attrs(f)), Box::new(b.rename_attrs(f)))
            }
            Expr::Cmp(op, a, b) => {
                Expr::Cmp(*op, Box::new(a.rename_attrs(f)), Box::new(b.rename_attrs(f)))
            }
            Expr::And(a, b) => Expr::and(a.rename_attrs(f), b.rename_attrs(f)),
            Expr::Or(a, b) => Expr::or(a.rename_attrs(f), b.rename_attrs(f)),
            Expr::Implies(a, b) => Expr::implies(a.rename_attrs(f), b.rename_attrs(f)),
        }
    }

    /// Check sorts against a signature; the expression must be boolean.
    pub fn typecheck(&self, sig: &DataSignature, kind: PredKind) -> Result<(), PredError> {
        match self.infer(sig, kind)? {
            Ty::Bool => Ok(()),
            Ty::Int => Err(PredError::SortMismatch {
                expected: "bool",
                found: "int",
                expr: self.to_string(),
            }),
        }
    }

    fn infer(&self, sig: &DataSignature, kind: PredKind) -> Result<Ty, PredError> {
        let expect = |e: &Expr, want: Ty| -> Result<(), PredError> {
            let got = e.infer(sig, kind)?;
            if got != want {
                return Err(PredError::SortMismatch {
                    expected: want.name(),
                    found: got.name(),
                    expr: e.to_string(),
                });
            }
            Ok(())
        };
        match self {
            Expr::Bool(_) => Ok(Ty::Bool),
            Expr::Int(_) => Ok(Ty::Int),
            Expr::Attr { name, primed } => {
                if *primed && kind == PredKind::State {
                    return Err(PredError::PrimedInState(name.clone()));
                }
                match sig.sort(name) {
                    Some(Sort::Bool) => Ok(Ty::Bool),
                    Some(Sort::Int { .. }) => Ok(Ty::Int),
                    None => Err(PredError::UnknownAttribute(name.clone())),
                }
            }
            Expr::Id(names) => {
                if kind == PredKind::State {
                    return Err(PredError::IdInState);
                }
                for n in names {
                    if !sig.contains(n) {
                        return Err(PredError::UnknownAttribute(n.clone()));
                    }
                }
                Ok(Ty::Bool)
            }
            Expr::Neg(a) => {
                expect(a, Ty::Int)?;
                Ok(Ty::Int)
            }
            Expr::Arith(_, a, b) => {
                expect(a, Ty::Int)?;
                expect(b, Ty::Int)?;
                Ok(Ty::Int)
            }
            Expr::Cmp(op, a, b) => {
                let ta = a.infer(sig, kind)?;
                let want = match op {
                    CmpOp::Eq | CmpOp::Ne => ta,
                    _ => Ty::Int,
                };
                expect(a, want)?;
                expect(b, want)?;
                Ok(Ty::Bool)
            }
            Expr::Not(a) => {
                expect(a, Ty::Bool)?;
                Ok(Ty::Bool)
            }
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) => {
                expect(a, Ty::Bool)?;
                expect(b, Ty::Bool)?;
                Ok(Ty::Bool)
            }
        }
    }

    fn value(&self, pre: &DataState, post: Option<&DataState>) -> Result<Val, PredError> {
        Ok(match self {
            Expr::Bool(b) => Val::B(*b),
            Expr::Int(n) => Val::N(Num::Small(*n as i128)),
            Expr::Attr { name, primed } => {
                let src = if *primed {
                    post.ok_or_else(|| PredError::PrimedInState(name.clone()))?
                } else {
                    pre
                };
                match src.get(name) {
                    Some(Value::Bool(b)) => Val::B(b),
                    Some(Value::Int(n)) => Val::N(Num::Small(n as i128)),
                    None => return Err(PredError::Unassigned(name.clone())),
                }
            }
            Expr::Id(names) => {
                let post = post.ok_or(PredError::IdInState)?;
                let mut keep = true;
                for n in names {
                    let a = pre.get(n).ok_or_else(|| PredError::Unassigned(n.clone()))?;
                    let b = post.get(n).ok_or_else(|| PredError::Unassigned(n.clone()))?;
                    keep &= a == b;
                }
                Val::B(keep)
            }
            Expr::Neg(a) => Val::N(a.num(pre, post)?.neg()),
            Expr::Arith(op, a, b) => Val::N(Num::arith(*op, &a.num(pre, post)?, &b.num(pre, post)?)),
            Expr::Cmp(op, a, b) => {
                let ord = match (a.value(pre, post)?, b.value(pre, post)?) {
                    (Val::B(x), Val::B(y)) => x.cmp(&y),
                    (Val::N(x), Val::N(y)) => x.compare(&y),
                    _ => {
                        return Err(PredError::SortMismatch {
                            expected: "matching sorts",
                            found: "bool and int",
                            expr: self.to_string(),
                        })
                    }
                };
                Val::B(op.holds(ord))
            }
            Expr::Not(a) => Val::B(!a.truth(pre, post)?),
            Expr::And(a, b) => Val::B(a.truth(pre, post)? && b.truth(pre, post)?),
            Expr::Or(a, b) => Val::B(a.truth(pre, post)? || b.truth(pre, post)?),
            Expr::Implies(a, b) => Val::B(!a.truth(pre, post)? || b.truth(pre, post)?),
        })
    }

    fn num(&self, pre: &DataState, post: Option<&DataState>) -> Result<Num, PredError> {
        match self.value(pre, post)? {
            Val::N(n) => Ok(n),
            Val::B(_) => Err(PredError::SortMismatch {
                expected: "int",
                found: "bool",
                expr: self.to_string(),
            }),
        }
    }

    fn truth(&self, pre: &DataState, post: Option<&DataState>) -> Result<bool, PredError> {
        match self.value(pre, post)? {
            Val::B(b) => Ok(b),
            Val::N(_) => Err(PredError::SortMismatch {
                expected: "bool",
                found: "int",
                expr: self.to_string(),
            }),
        }
    }

    /// Evaluate a state predicate.
    pub fn eval_state(&self, state: &DataState) -> Result<bool, PredError> {
        self.truth(state, None)
    }

    /// Evaluate a transition predicate on a pre/post pair.
    pub fn eval_trans(&self, pre: &DataState, post: &DataState) -> Result<bool, PredError> {
        self.truth(pre, Some(post))
    }

    /// Equivalent predicate in negation normal form with boolean constants
    /// folded away. Negated comparisons flip their operator, and a negated
    /// boolean equality against a literal flips the literal.
    pub fn simplify(&self) -> Expr {
        simplify(self, false)
    }
}

fn simplify(e: &Expr, negate: bool) -> Expr {
    match e {
        Expr::Bool(b) => Expr::Bool(*b != negate),
        Expr::Not(a) => simplify(a, !negate),
        Expr::And(a, b) | Expr::Or(a, b) => {
            let is_and = matches!(e, Expr::And(..)) != negate;
            let (x, y) = (simplify(a, negate), simplify(b, negate));
            if is_and {
                match (x, y) {
                    (Expr::Bool(false), _) | (_, Expr::Bool(false)) => Expr::Bool(false),
                    (Expr::Bool(true), z) | (z, Expr::Bool(true)) => z,
                    (x, y) => Expr::and(x, y),
                }
            } else {
                match (x, y) {
                    (Expr::Bool(true), _) | (_, Expr::Bool(true)) => Expr::Bool(true),
                    (Expr::Bool(false), z) | (z, Expr::Bool(false)) => z,
                    (x, y) => Expr::or(x, y),
                }
            }
        }
        Expr::Implies(a, b) => {
            // a -> b  ==  not a or b
            let as_or = Expr::or(Expr::not((**a).clone()), (**b).clone());
            simplify(&as_or, negate)
        }
        Expr::Cmp(op, a, b) if negate => match (op, &**b) {
            (CmpOp::Eq, Expr::Bool(v)) => Expr::eq((**a).clone(), Expr::Bool(!v)),
            (CmpOp::Ne, Expr::Bool(v)) => Expr::eq((**a).clone(), Expr::Bool(*v)),
            _ => Expr::Cmp(op.negate(), a.clone(), b.clone()),
        },
        other if negate => Expr::not(other.clone()),
        other => other.clone(),
    }
}

/// All post-states over `sig` such that `(pre, post)` satisfies `psi`, in
/// lexicographic order.
pub fn successors_satisfying(
    psi: &TransPred,
    pre: &DataState,
    sig: &DataSignature,
    cap: u64,
) -> Result<Vec<DataState>, PredError> {
    let mut out = Vec::new();
    for post in sig.enumerate(cap)? {
        if psi.eval_trans(pre, &post)? {
            out.push(post);
        }
    }
    Ok(out)
}

// Printing: precedence levels from loosest to tightest.
const P_IMPLIES: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_NOT: u8 = 4;
const P_CMP: u8 = 5;
const P_ADD: u8 = 6;
const P_MUL: u8 = 7;
const P_ATOM: u8 = 8;

impl Expr {
    pub fn precedence(&self) -> u8 {
        match self {
            Expr::Implies(..) => P_IMPLIES,
            Expr::Or(..) => P_OR,
            Expr::And(..) => P_AND,
            Expr::Not(..) => P_NOT,
            Expr::Cmp(..) => P_CMP,
            Expr::Arith(ArithOp::Mul, ..) => P_MUL,
            Expr::Arith(..) => P_ADD,
            _ => P_ATOM,
        }
    }

    /// True when the printed form contains a top-level `>` or `>=` outside
    /// parentheses. Inside angle-bracket modalities such predicates are
    /// printed in parentheses so the closing bracket stays unambiguous.
    pub fn has_top_level_gt(&self) -> bool {
        match self {
            Expr::Cmp(CmpOp::Gt | CmpOp::Ge, ..) => true,
            Expr::Cmp(..) => false,
            Expr::Not(a) => a.has_top_level_gt(),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) => {
                a.has_top_level_gt() || b.has_top_level_gt()
            }
            _ => false,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.precedence();
        if p < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Attr { name, primed } => {
                write!(f, "{}", crate::ident::display(name))?;
                if *primed {
                    write!(f, "'")?;
                }
                Ok(())
            }
            Expr::Id(names) => {
                let parts: Vec<String> =
                    names.iter().map(|n| crate::ident::display(n)).collect();
                write!(f, "id{{{}}}", parts.join(", "))
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, P_ATOM)
            }
            Expr::Arith(op, a, b) => {
                let lvl = self.precedence();
                a.fmt_prec(f, lvl)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_prec(f, lvl + 1)
            }
            Expr::Cmp(op, a, b) => {
                a.fmt_prec(f, P_ADD)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_prec(f, P_ADD)
            }
            Expr::Not(a) => {
                write!(f, "not ")?;
                a.fmt_prec(f, P_NOT)
            }
            Expr::And(a, b) => {
                a.fmt_prec(f, P_AND)?;
                write!(f, " and ")?;
                b.fmt_prec(f, P_AND + 1)
            }
            Expr::Or(a, b) => {
                a.fmt_prec(f, P_OR)?;
                write!(f, " or ")?;
                b.fmt_prec(f, P_OR + 1)
            }
            Expr::Implies(a, b) => {
                a.fmt_prec(f, P_IMPLIES + 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, P_IMPLIES)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DEFAULT_STATE_CAP;

    fn sig() -> DataSignature {
        DataSignature::new([("chk", Sort::Bool), ("trls", Sort::Int { lo: 0, hi: 3 })]).unwrap()
    }

    fn st(chk: bool, trls: i64) -> DataState {
        DataState::new([("chk", Value::Bool(chk)), ("trls", Value::Int(trls))])
    }

    fn incr() -> Expr {
        Expr::and(
            Expr::eq(Expr::post("chk"), Expr::Bool(false)),
            Expr::eq(
                Expr::post("trls"),
                Expr::arith(ArithOp::Add, Expr::attr("trls"), Expr::Int(1)),
            ),
        )
    }

    #[test]
    fn no_successor_past_the_bound() {
        let succ = successors_satisfying(&incr(), &st(false, 3), &sig(), DEFAULT_STATE_CAP).unwrap();
        assert!(succ.is_empty());
        let succ = successors_satisfying(&incr(), &st(true, 1), &sig(), DEFAULT_STATE_CAP).unwrap();
        assert_eq!(succ, vec![st(false, 2)]);
    }

    #[test]
    fn arithmetic_is_exact() {
        let big = Expr::arith(ArithOp::Mul, Expr::Int(i64::MAX), Expr::Int(i64::MAX));
        let p = Expr::cmp(CmpOp::Gt, big.clone(), Expr::Int(0));
        assert!(p.eval_state(&st(false, 0)).unwrap());
        let q = Expr::cmp(
            CmpOp::Eq,
            Expr::arith(
                ArithOp::Sub,
                Expr::arith(ArithOp::Mul, big.clone(), Expr::Int(2)),
                big.clone(),
            ),
            big,
        );
        assert!(q.eval_state(&st(false, 0)).unwrap());
    }

    #[test]
    fn sort_errors_are_reported() {
        let bad = Expr::cmp(CmpOp::Lt, Expr::attr("trls"), Expr::Bool(true));
        assert!(matches!(
            bad.typecheck(&sig(), PredKind::State),
            Err(PredError::SortMismatch { .. })
        ));
        assert!(matches!(
            Expr::eq(Expr::post("chk"), Expr::Bool(true)).typecheck(&sig(), PredKind::State),
            Err(PredError::PrimedInState(_))
        ));
        assert!(incr().typecheck(&sig(), PredKind::Trans).is_ok());
    }

    #[test]
    fn id_keeps_values() {
        let p = Expr::Id(vec!["trls".into()]);
        assert!(p.eval_trans(&st(false, 2), &st(true, 2)).unwrap());
        assert!(!p.eval_trans(&st(false, 2), &st(false, 1)).unwrap());
    }

    #[test]
    fn printing_respects_precedence() {
        let p = Expr::or(incr(), Expr::not(Expr::and(Expr::attr("chk"), Expr::Bool(true))));
        assert_eq!(
            p.to_string(),
            "chk' = false and trls' = trls + 1 or not (chk and true)"
        );
        let q = Expr::arith(
            ArithOp::Sub,
            Expr::Int(1),
            Expr::arith(ArithOp::Sub, Expr::Int(2), Expr::Int(3)),
        );
        assert_eq!(q.to_string(), "1 - (2 - 3)");
    }

    #[test]
    fn simplify_pushes_negation() {
        let p = Expr::not(Expr::and(
            Expr::Bool(true),
            Expr::and(
                Expr::eq(Expr::post("chk"), Expr::Bool(false)),
                Expr::eq(Expr::post("trls"), Expr::Int(0)),
            ),
        ));
        assert_eq!(p.simplify().to_string(), "chk' = true or trls' != 0");
        assert_eq!(
            Expr::not(Expr::Bool(false)).simplify(),
            Expr::Bool(true)
        );
    }
}
