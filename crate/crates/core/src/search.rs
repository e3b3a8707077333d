//! Bounded model search for axiomatic specifications.
//!
//! A candidate edts with at most `k` control states over the finite data
//! universe is described by boolean variables (initial data states and one
//! variable per event and configuration pair). Reachability, action
//! relations and formula truth are unfolded into a circuit and handed to a
//! SAT solver. Every model the solver returns is decoded and re-checked
//! with the explicit-state checker before it is reported.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use thiserror::Error;
use varisat::{ExtendFormula, Lit, Solver};

use crate::data::DataState;
use crate::edts::{Configuration, EdSignature, Edts, EdtsBuilder};
use crate::logic::{check_sentence, Action, Formula, LogicError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search space of {configs} configurations exceeds the limit of {limit}")]
    TooLarge { configs: usize, limit: usize },
    #[error("more than {0} models")]
    TooManyModels(usize),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("decoded model fails re-checking: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Data(#[from] crate::data::DataError),
}

/// Largest number of configurations (control states times data states)
/// the encoding accepts.
pub const MAX_CONFIGS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Bit {
    True,
    False,
    Lit(Lit),
}

impl Bit {
    fn not(self) -> Bit {
        match self {
            Bit::True => Bit::False,
            Bit::False => Bit::True,
            Bit::Lit(l) => Bit::Lit(!l),
        }
    }

    fn from_bool(b: bool) -> Bit {
        if b {
            Bit::True
        } else {
            Bit::False
        }
    }
}

struct Circuit {
    solver: Solver<'static>,
    contradiction: bool,
}

impl Circuit {
    fn fresh(&mut self) -> Lit {
        self.solver.new_lit()
    }

    fn clause(&mut self, bits: &[Bit]) {
        let mut lits = Vec::with_capacity(bits.len());
        for b in bits {
            match b {
                Bit::True => return,
                Bit::False => {}
                Bit::Lit(l) => lits.push(*l),
            }
        }
        if lits.is_empty() {
            self.contradiction = true;
        } else {
            self.solver.add_clause(&lits);
        }
    }

    fn and_all(&mut self, bits: impl IntoIterator<Item = Bit>) -> Bit {
        let mut lits = Vec::new();
        for b in bits {
            match b {
                Bit::False => return Bit::False,
                Bit::True => {}
                Bit::Lit(l) => lits.push(l),
            }
        }
        lits.sort_by_key(|l| l.code());
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return Bit::False;
        }
        match lits.len() {
            0 => Bit::True,
            1 => Bit::Lit(lits[0]),
            _ => {
                let v = self.fresh();
                for &l in &lits {
                    self.solver.add_clause(&[!v, l]);
                }
                let mut back: Vec<Lit> = lits.iter().map(|&l| !l).collect();
                back.push(v);
                self.solver.add_clause(&back);
                Bit::Lit(v)
            }
        }
    }

    fn or_all(&mut self, bits: impl IntoIterator<Item = Bit>) -> Bit {
        let negated: Vec<Bit> = bits.into_iter().map(Bit::not).collect();
        self.and_all(negated).not()
    }

    fn and2(&mut self, a: Bit, b: Bit) -> Bit {
        self.and_all([a, b])
    }

    fn or2(&mut self, a: Bit, b: Bit) -> Bit {
        self.or_all([a, b])
    }

    fn implies(&mut self, a: Bit, b: Bit) -> Bit {
        self.or2(a.not(), b)
    }
}

type Matrix = Vec<Vec<Bit>>;

/// Encoding of all edts over a signature with a bounded number of control
/// states. Configuration `(j, d)` has index `j * universe.len() + d`.
pub struct ModelSearch {
    sig: EdSignature,
    universe: Vec<DataState>,
    ctrl: usize,
    circuit: Circuit,
    init: Vec<Lit>,
    edges: BTreeMap<String, Matrix>,
    reach: Vec<Bit>,
    relations: HashMap<Action, Rc<Matrix>>,
}

type FormulaKey = (usize, Vec<(String, usize)>);

impl ModelSearch {
    pub fn new(sig: &EdSignature, ctrl_states: usize) -> Result<Self, SearchError> {
        let universe = sig.data().enumerate(crate::data::DEFAULT_STATE_CAP)?;
        let n = ctrl_states * universe.len();
        if n > MAX_CONFIGS || ctrl_states == 0 {
            return Err(SearchError::TooLarge {
                configs: n,
                limit: MAX_CONFIGS,
            });
        }
        let mut circuit = Circuit {
            solver: Solver::new(),
            contradiction: false,
        };
        let nd = universe.len();
        let init: Vec<Lit> = (0..nd).map(|_| circuit.fresh()).collect();
        circuit.solver.add_clause(&init);
        let mut edges = BTreeMap::new();
        for e in sig.events() {
            let m: Matrix = (0..n)
                .map(|_| (0..n).map(|_| Bit::Lit(circuit.fresh())).collect())
                .collect();
            edges.insert(e.clone(), m);
        }
        let mut s = ModelSearch {
            sig: sig.clone(),
            universe,
            ctrl: ctrl_states,
            circuit,
            init,
            edges,
            reach: Vec::new(),
            relations: HashMap::new(),
        };
        s.encode_reachability();
        Ok(s)
    }

    fn size(&self) -> usize {
        self.ctrl * self.universe.len()
    }

    fn ctrl_of(&self, g: usize) -> usize {
        g / self.universe.len()
    }

    fn data_of(&self, g: usize) -> &DataState {
        &self.universe[g % self.universe.len()]
    }

    /// Least-fixpoint unrolling; transitions may only leave reachable
    /// configurations, so the decoded system is reachable by construction.
    fn encode_reachability(&mut self) {
        let n = self.size();
        let nd = self.universe.len();
        let mut step: Matrix = vec![vec![Bit::False; n]; n];
        for g in 0..n {
            for h in 0..n {
                let bits: Vec<Bit> = self.edges.values().map(|m| m[g][h]).collect();
                step[g][h] = self.circuit.or_all(bits);
            }
        }
        let mut level: Vec<Bit> = (0..n)
            .map(|g| if g < nd { Bit::Lit(self.init[g]) } else { Bit::False })
            .collect();
        for _ in 1..n {
            let mut next = Vec::with_capacity(n);
            for h in 0..n {
                let mut bits = vec![level[h]];
                for g in 0..n {
                    bits.push(self.circuit.and2(level[g], step[g][h]));
                }
                next.push(self.circuit.or_all(bits));
            }
            level = next;
        }
        for g in 0..n {
            let r = level[g];
            for h in 0..n {
                let s = step[g][h];
                self.circuit.clause(&[s.not(), r]);
            }
        }
        // Symmetry breaking: control state j is used only if j - 1 is.
        let used: Vec<Bit> = (0..self.ctrl)
            .map(|j| {
                let bits: Vec<Bit> = (0..nd).map(|d| level[j * nd + d]).collect();
                self.circuit.or_all(bits)
            })
            .collect();
        for j in 2..self.ctrl {
            self.circuit.clause(&[used[j].not(), used[j - 1]]);
        }
        self.reach = level;
    }

    fn relation(&mut self, a: &Action) -> Result<Rc<Matrix>, SearchError> {
        if let Some(r) = self.relations.get(a) {
            return Ok(r.clone());
        }
        let n = self.size();
        let r: Matrix = match a {
            Action::Atom { event, effect } => {
                let edges = self
                    .edges
                    .get(event)
                    .ok_or_else(|| LogicError::UnknownEvent(event.clone()))?
                    .clone();
                let mut m = vec![vec![Bit::False; n]; n];
                for (g, row) in m.iter_mut().enumerate() {
                    for (h, cell) in row.iter_mut().enumerate() {
                        let ok = effect
                            .eval_trans(self.data_of(g), self.data_of(h))
                            .map_err(LogicError::from)?;
                        if ok {
                            *cell = edges[g][h];
                        }
                    }
                }
                m
            }
            Action::Union(x, y) => {
                let (x, y) = (self.relation(x)?, self.relation(y)?);
                let mut m = vec![vec![Bit::False; n]; n];
                for g in 0..n {
                    for h in 0..n {
                        m[g][h] = self.circuit.or2(x[g][h], y[g][h]);
                    }
                }
                m
            }
            Action::Seq(x, y) => {
                let (x, y) = (self.relation(x)?, self.relation(y)?);
                self.compose(&x, &y)
            }
            Action::Star(x) => {
                let x = self.relation(x)?;
                let mut m: Matrix = (0..n)
                    .map(|g| (0..n).map(|h| if g == h { Bit::True } else { x[g][h] }).collect())
                    .collect();
                let mut span = 1;
                while span < n {
                    m = self.compose(&m, &m);
                    span *= 2;
                }
                m
            }
        };
        let r = Rc::new(r);
        self.relations.insert(a.clone(), r.clone());
        Ok(r)
    }

    fn compose(&mut self, x: &Matrix, y: &Matrix) -> Matrix {
        let n = self.size();
        let mut m = vec![vec![Bit::False; n]; n];
        for g in 0..n {
            for h in 0..n {
                let mut bits = Vec::new();
                for k in 0..n {
                    if x[g][k] != Bit::False && y[k][h] != Bit::False {
                        bits.push(self.circuit.and2(x[g][k], y[k][h]));
                    }
                }
                m[g][h] = self.circuit.or_all(bits);
            }
        }
        m
    }

    fn truth(
        &mut self,
        f: &Formula,
        val: &BTreeMap<String, usize>,
        cache: &mut HashMap<FormulaKey, Rc<Vec<Bit>>>,
    ) -> Result<Rc<Vec<Bit>>, SearchError> {
        let key = (
            f as *const Formula as usize,
            val.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        );
        if let Some(t) = cache.get(&key) {
            return Ok(t.clone());
        }
        let n = self.size();
        let out: Vec<Bit> = match f {
            Formula::True => vec![Bit::True; n],
            Formula::False => vec![Bit::False; n],
            Formula::Pred(p) => {
                let mut v = Vec::with_capacity(n);
                for g in 0..n {
                    v.push(Bit::from_bool(p.eval_state(self.data_of(g)).map_err(LogicError::from)?));
                }
                v
            }
            Formula::Var(x) => {
                let c = *val.get(x).ok_or_else(|| LogicError::Unbound(x.clone()))?;
                (0..n).map(|g| Bit::from_bool(self.ctrl_of(g) == c)).collect()
            }
            Formula::Bind(x, body) => {
                let mut per_ctrl = Vec::with_capacity(self.ctrl);
                for c in 0..self.ctrl {
                    let mut v2 = val.clone();
                    v2.insert(x.clone(), c);
                    per_ctrl.push(self.truth(body, &v2, cache)?);
                }
                (0..n).map(|g| per_ctrl[self.ctrl_of(g)][g]).collect()
            }
            Formula::At(x, body) => {
                let c = *val.get(x).ok_or_else(|| LogicError::Unbound(x.clone()))?;
                let t = self.truth(body, val, cache)?;
                let nd = self.universe.len();
                let mut bits = Vec::with_capacity(nd);
                for g in c * nd..(c + 1) * nd {
                    let r = self.reach[g];
                    bits.push(self.circuit.implies(r, t[g]));
                }
                let all = self.circuit.and_all(bits);
                vec![all; n]
            }
            Formula::Diamond(a, body) | Formula::Box(a, body) => {
                let r = self.relation(a)?;
                let t = self.truth(body, val, cache)?;
                let diamond = matches!(f, Formula::Diamond(..));
                let mut v = Vec::with_capacity(n);
                for g in 0..n {
                    let mut bits = Vec::new();
                    for h in 0..n {
                        if r[g][h] == Bit::False {
                            continue;
                        }
                        if diamond {
                            bits.push(self.circuit.and2(r[g][h], t[h]));
                        } else {
                            bits.push(self.circuit.implies(r[g][h], t[h]));
                        }
                    }
                    v.push(if diamond {
                        self.circuit.or_all(bits)
                    } else {
                        self.circuit.and_all(bits)
                    });
                }
                v
            }
            Formula::Not(a) => self.truth(a, val, cache)?.iter().map(|b| b.not()).collect(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let (ta, tb) = (self.truth(a, val, cache)?, self.truth(b, val, cache)?);
                let mut v = Vec::with_capacity(n);
                for g in 0..n {
                    v.push(match f {
                        Formula::And(..) => self.circuit.and2(ta[g], tb[g]),
                        Formula::Or(..) => self.circuit.or2(ta[g], tb[g]),
                        _ => self.circuit.implies(ta[g], tb[g]),
                    });
                }
                v
            }
        };
        let out = Rc::new(out);
        cache.insert(key, out.clone());
        Ok(out)
    }

    /// A bit that is true iff `f` holds at every initial configuration.
    fn holds(&mut self, f: &Formula) -> Result<Bit, SearchError> {
        f.typecheck(&self.sig)?;
        if !f.is_sentence() {
            return Err(LogicError::NotASentence(f.free_vars().into_iter().collect()).into());
        }
        let mut cache = HashMap::new();
        let t = self.truth(f, &BTreeMap::new(), &mut cache)?;
        let mut bits = Vec::with_capacity(self.init.len());
        for d in 0..self.init.len() {
            bits.push(self.circuit.implies(Bit::Lit(self.init[d]), t[d]));
        }
        Ok(self.circuit.and_all(bits))
    }

    /// Restrict the search to models of `f`.
    pub fn require(&mut self, f: &Formula) -> Result<(), SearchError> {
        let b = self.holds(f)?;
        self.circuit.clause(&[b]);
        Ok(())
    }

    /// Restrict the search to models violating at least one of `fs`.
    pub fn require_some_violated(&mut self, fs: &[&Formula]) -> Result<(), SearchError> {
        let mut bits = Vec::new();
        for f in fs {
            bits.push(self.holds(f)?.not());
        }
        self.circuit.clause(&bits);
        Ok(())
    }

    /// Next model, or `None` when the constraints are unsatisfiable.
    pub fn solve(&mut self) -> Result<Option<Edts>, SearchError> {
        if self.circuit.contradiction {
            return Ok(None);
        }
        let sat = self
            .circuit
            .solver
            .solve()
            .map_err(|e| SearchError::Solver(e.to_string()))?;
        if !sat {
            return Ok(None);
        }
        let model = self.circuit.solver.model().expect("satisfiable");
        let mut value = vec![false; model.iter().map(|l| l.index() + 1).max().unwrap_or(0)];
        for l in &model {
            value[l.index()] = l.is_positive();
        }
        let truth = |b: Bit| match b {
            Bit::True => true,
            Bit::False => false,
            Bit::Lit(l) => value.get(l.index()).copied().unwrap_or(false) == l.is_positive(),
        };
        let name = |j: usize| format!("c{j}");
        let conf = |g: usize| Configuration::new(name(self.ctrl_of(g)), self.data_of(g).clone());
        let mut b = EdtsBuilder::new(self.sig.clone(), name(0));
        for (d, l) in self.init.iter().enumerate() {
            if truth(Bit::Lit(*l)) {
                b.initial(self.universe[d].clone());
            }
        }
        let n = self.size();
        for (e, m) in &self.edges {
            for g in 0..n {
                for h in 0..n {
                    if truth(m[g][h]) {
                        b.edge(e, conf(g), conf(h));
                    }
                }
            }
        }
        let m = b.build().map_err(|e| SearchError::SelfCheck(e.to_string()))?;
        if !m.validate().is_empty() {
            return Err(SearchError::SelfCheck(format!("{:?}", m.validate())));
        }
        Ok(Some(m))
    }

    /// Exclude `m` (as decoded by `solve`) from later solutions.
    pub fn block(&mut self, m: &Edts) {
        let nd = self.universe.len();
        let idx = |c: &Configuration| -> usize {
            let j: usize = c.ctrl[1..].parse().expect("decoded control state");
            let d = self.universe.iter().position(|w| *w == c.data).expect("universe");
            j * nd + d
        };
        let mut differ = Vec::new();
        for (d, l) in self.init.iter().enumerate() {
            let on = m.init_data().contains(&self.universe[d]);
            differ.push(if on { Bit::Lit(!*l) } else { Bit::Lit(*l) });
        }
        let n = self.size();
        for (e, mat) in &self.edges {
            let mut on = vec![vec![false; n]; n];
            for (g, h) in m.transitions(e) {
                on[idx(m.conf(g))][idx(m.conf(h))] = true;
            }
            for g in 0..n {
                for h in 0..n {
                    differ.push(if on[g][h] { mat[g][h].not() } else { mat[g][h] });
                }
            }
        }
        self.circuit.clause(&differ);
    }
}

/// A model of all `axioms` with at most `ctrl_states` control states that
/// violates at least one of `targets`. Each result is re-checked.
pub fn find_violation(
    sig: &EdSignature,
    axioms: &[&Formula],
    targets: &[&Formula],
    ctrl_states: usize,
) -> Result<Option<Edts>, SearchError> {
    let mut s = ModelSearch::new(sig, ctrl_states)?;
    for f in axioms {
        s.require(f)?;
    }
    s.require_some_violated(targets)?;
    let Some(m) = s.solve()? else { return Ok(None) };
    for f in axioms {
        if !check_sentence(&m, f)?.holds {
            return Err(SearchError::SelfCheck(format!("decoded model violates {f}")));
        }
    }
    let mut violated = false;
    for f in targets {
        violated |= !check_sentence(&m, f)?.holds;
    }
    if !violated {
        return Err(SearchError::SelfCheck("decoded model satisfies every target".into()));
    }
    Ok(Some(m))
}

/// All models of `axioms` with at most `ctrl_states` control states, named
/// `c0, c1, ...` with used states forming a prefix. Fails beyond `cap`.
pub fn all_models(
    sig: &EdSignature,
    axioms: &[&Formula],
    ctrl_states: usize,
    cap: usize,
) -> Result<Vec<Edts>, SearchError> {
    let mut s = ModelSearch::new(sig, ctrl_states)?;
    for f in axioms {
        s.require(f)?;
    }
    let mut out = Vec::new();
    while let Some(m) = s.solve()? {
        if out.len() == cap {
            return Err(SearchError::TooManyModels(cap));
        }
        for f in axioms {
            if !check_sentence(&m, f)?.holds {
                return Err(SearchError::SelfCheck(format!("decoded model violates {f}")));
            }
        }
        s.block(&m);
        out.push(m);
    }
    out.sort_by_key(|m| m.to_json());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataSignature, Sort};
    use crate::pred::Expr;

    fn sig() -> EdSignature {
        EdSignature::new(["e"], DataSignature::new([("a", Sort::Bool)]).unwrap())
    }

    #[test]
    fn empty_signature_has_one_model() {
        let s = EdSignature::new(Vec::<String>::new(), DataSignature::empty());
        assert_eq!(all_models(&s, &[], 3, 10).unwrap().len(), 1);
    }

    #[test]
    fn false_axiom_has_no_models() {
        assert!(all_models(&sig(), &[&Formula::False], 2, 10).unwrap().is_empty());
    }

    #[test]
    fn self_loop_sentence_needs_a_loop() {
        let loop_back = Formula::bind(
            "x",
            Formula::diamond(
                Action::atom("e", Expr::eq(Expr::post("a"), Expr::attr("a"))),
                Formula::var("x"),
            ),
        );
        let models = all_models(&sig(), &[&loop_back], 1, 100).unwrap();
        assert!(!models.is_empty());
        for m in &models {
            assert!(check_sentence(m, &loop_back).unwrap().holds);
        }
        let deadlock = Formula::boxed(Action::event("e"), Formula::False);
        assert!(find_violation(&sig(), &[&deadlock], &[&deadlock], 2).unwrap().is_none());
        let cex = find_violation(&sig(), &[], &[&loop_back], 2).unwrap().unwrap();
        assert!(!check_sentence(&cex, &loop_back).unwrap().holds);
    }
}
