//! Bisimulation between transition systems with data-labelled states, and
//! hybrid-free formulas telling non-bisimilar configurations apart.
//!
//! The largest bisimulation is computed by signature refinement on the
//! disjoint union of both systems. Every refinement round is kept, so a pair
//! separated in round `k` can be explained by a formula of modal depth `k`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::data::DataState;
use crate::edts::{Configuration, Edts};
use crate::logic::{Action, Checker, Formula, LogicError, Valuation};
use crate::pred::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error("models have different signatures")]
    SignatureMismatch,
    #[error("configuration {0} does not belong to the model")]
    UnknownConfiguration(Configuration),
    #[error("distinguishing formula failed its own check: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// Partition refinement over the disjoint union of two models; indices
/// below `split` belong to the left model.
struct Refinement {
    split: usize,
    data: Vec<DataState>,
    events: Vec<String>,
    /// `succ[e][i]`: sorted successors of `i` under event `e`.
    succ: Vec<Vec<Vec<usize>>>,
    levels: Vec<Vec<u32>>,
}

impl Refinement {
    fn new(m1: &Edts, m2: &Edts) -> Refinement {
        let split = m1.len();
        let n = split + m2.len();
        let data: Vec<DataState> = m1
            .confs()
            .iter()
            .chain(m2.confs())
            .map(|c| c.data.clone())
            .collect();
        let events: Vec<String> = m1.sig().events().iter().cloned().collect();
        let mut succ = vec![vec![Vec::new(); n]; events.len()];
        for (k, e) in events.iter().enumerate() {
            for (i, j) in m1.transitions(e) {
                succ[k][i].push(j);
            }
            for (i, j) in m2.transitions(e) {
                succ[k][split + i].push(split + j);
            }
            for row in &mut succ[k] {
                row.sort_unstable();
            }
        }
        let distinct: BTreeSet<&DataState> = data.iter().collect();
        let ids: BTreeMap<&DataState, u32> =
            distinct.into_iter().enumerate().map(|(k, d)| (d, k as u32)).collect();
        let level0: Vec<u32> = data.iter().map(|d| ids[d]).collect();
        let mut r = Refinement {
            split,
            data,
            events,
            succ,
            levels: vec![level0],
        };
        r.refine();
        r
    }

    fn signature(&self, level: &[u32], i: usize) -> Vec<(usize, u32)> {
        let mut sig: Vec<(usize, u32)> = Vec::new();
        for (k, rows) in self.succ.iter().enumerate() {
            for &j in &rows[i] {
                sig.push((k, level[j]));
            }
        }
        sig.sort_unstable();
        sig.dedup();
        sig
    }

    fn refine(&mut self) {
        let n = self.data.len();
        loop {
            let cur = self.levels.last().expect("level 0 exists");
            let count = cur.iter().collect::<BTreeSet<_>>().len();
            let mut ids: HashMap<(u32, Vec<(usize, u32)>), u32> = HashMap::new();
            let mut next = Vec::with_capacity(n);
            for i in 0..n {
                let key = (cur[i], self.signature(cur, i));
                let fresh = ids.len() as u32;
                next.push(*ids.entry(key).or_insert(fresh));
            }
            let stable = ids.len() == count;
            self.levels.push(next);
            if stable {
                return;
            }
        }
    }

    fn related(&self, i: usize, j: usize) -> bool {
        let last = self.levels.last().expect("levels exist");
        last[i] == last[j]
    }

    /// A hybrid-free formula true at `i` and false at `j`, for a pair that
    /// is not bisimilar.
    fn distinguish(&self, i: usize, j: usize, memo: &mut HashMap<(usize, usize), Formula>) -> Formula {
        if let Some(f) = memo.get(&(i, j)) {
            return f.clone();
        }
        let k = self
            .levels
            .iter()
            .position(|lvl| lvl[i] != lvl[j])
            .expect("pair is separated at some level");
        let f = if k == 0 {
            let (di, dj) = (&self.data[i], &self.data[j]);
            let (attr, v) = di
                .iter()
                .find(|(a, v)| dj.get(a) != Some(*v))
                .expect("data states differ");
            Formula::Pred(Expr::eq(Expr::attr(attr), value_expr(v)))
        } else {
            let prev = &self.levels[k - 1];
            let si: BTreeSet<(usize, u32)> = self.signature(prev, i).into_iter().collect();
            let sj: BTreeSet<(usize, u32)> = self.signature(prev, j).into_iter().collect();
            match si.difference(&sj).next() {
                Some(&(e, block)) => self.step_formula(i, j, e, block, prev, memo),
                None => {
                    let &(e, block) = sj.difference(&si).next().expect("signatures differ");
                    Formula::not(self.step_formula(j, i, e, block, prev, memo))
                }
            }
        };
        memo.insert((i, j), f.clone());
        f
    }

    /// `<e // true> (conjunction separating a witness successor of `i` in
    /// `block` from every `e`-successor of `j`)`.
    fn step_formula(
        &self,
        i: usize,
        j: usize,
        e: usize,
        block: u32,
        prev: &[u32],
        memo: &mut HashMap<(usize, usize), Formula>,
    ) -> Formula {
        let s = *self.succ[e][i]
            .iter()
            .find(|&&s| prev[s] == block)
            .expect("witness successor");
        let mut parts: Vec<Formula> = Vec::new();
        for &t in &self.succ[e][j] {
            let f = self.distinguish(s, t, memo);
            if !parts.contains(&f) {
                parts.push(f);
            }
        }
        Formula::diamond(Action::event(&self.events[e]), Formula::conj(parts))
    }
}

fn value_expr(v: crate::data::Value) -> Expr {
    match v {
        crate::data::Value::Bool(b) => Expr::Bool(b),
        crate::data::Value::Int(n) => Expr::Int(n),
    }
}

/// Which model a distinguishing witness starts in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// An initial configuration of one model that no initial configuration of
/// the other matches, with a formula true there and false at every initial
/// configuration of the other model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distinction {
    pub side: Side,
    pub initial: Configuration,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimVerdict {
    pub bisimilar: bool,
    /// The largest bisimulation between the configurations.
    pub relation: BTreeSet<(Configuration, Configuration)>,
    pub distinction: Option<Distinction>,
}

/// Bisimulation analysis of a pair of models.
pub struct Bisimulation<'a> {
    left: &'a Edts,
    right: &'a Edts,
    refinement: Refinement,
}

impl<'a> Bisimulation<'a> {
    pub fn new(left: &'a Edts, right: &'a Edts) -> Result<Self, BisimError> {
        if left.sig() != right.sig() {
            return Err(BisimError::SignatureMismatch);
        }
        Ok(Bisimulation {
            left,
            right,
            refinement: Refinement::new(left, right),
        })
    }

    /// Whether left configuration `i` and right configuration `j` are bisimilar.
    pub fn related(&self, i: usize, j: usize) -> bool {
        self.refinement.related(i, self.refinement.split + j)
    }

    pub fn relation(&self) -> BTreeSet<(Configuration, Configuration)> {
        let mut out = BTreeSet::new();
        for i in 0..self.left.len() {
            for j in 0..self.right.len() {
                if self.related(i, j) {
                    out.insert((self.left.conf(i).clone(), self.right.conf(j).clone()));
                }
            }
        }
        out
    }

    /// Number of refinement rounds until the partition was stable.
    pub fn rounds(&self) -> usize {
        self.refinement.levels.len() - 1
    }

    fn global(&self, side: Side, i: usize) -> usize {
        match side {
            Side::Left => i,
            Side::Right => self.refinement.split + i,
        }
    }

    /// A hybrid-free formula true at left configuration `i` and false at
    /// right configuration `j`; `None` when they are bisimilar. The result
    /// is checked on both models before it is returned.
    pub fn distinguishing_formula(&self, i: usize, j: usize) -> Result<Option<Formula>, BisimError> {
        if self.related(i, j) {
            return Ok(None);
        }
        let f = self
            .refinement
            .distinguish(i, self.refinement.split + j, &mut HashMap::new());
        self.self_check(&f, Side::Left, i, &[j])?;
        Ok(Some(f))
    }

    fn self_check(&self, f: &Formula, side: Side, i: usize, others: &[usize]) -> Result<(), BisimError> {
        let (m, o) = match side {
            Side::Left => (self.left, self.right),
            Side::Right => (self.right, self.left),
        };
        let v = Valuation::new();
        if !Checker::new(m).satisfies(&v, m.conf(i), f)? {
            return Err(BisimError::SelfCheck(format!("`{f}` fails at {}", m.conf(i))));
        }
        let mut ck = Checker::new(o);
        for &j in others {
            if ck.satisfies(&v, o.conf(j), f)? {
                return Err(BisimError::SelfCheck(format!("`{f}` holds at {}", o.conf(j))));
            }
        }
        Ok(())
    }

    /// Compare the two models: every initial configuration of each must be
    /// bisimilar to some initial configuration of the other.
    pub fn verdict(&self) -> Result<BisimVerdict, BisimError> {
        let li = self.left.initial_indices();
        let ri = self.right.initial_indices();
        let mut distinction = None;
        'outer: for (side, mine, theirs) in [(Side::Left, &li, &ri), (Side::Right, &ri, &li)] {
            for &i in mine.iter() {
                let gi = self.global(side, i);
                let other = match side {
                    Side::Left => Side::Right,
                    Side::Right => Side::Left,
                };
                if theirs
                    .iter()
                    .any(|&j| self.refinement.related(gi, self.global(other, j)))
                {
                    continue;
                }
                let mut memo = HashMap::new();
                let parts: Vec<Formula> = theirs
                    .iter()
                    .map(|&j| self.refinement.distinguish(gi, self.global(other, j), &mut memo))
                    .collect();
                let mut uniq: Vec<Formula> = Vec::new();
                for p in parts {
                    if !uniq.contains(&p) {
                        uniq.push(p);
                    }
                }
                let formula = Formula::conj(uniq);
                self.self_check(&formula, side, i, theirs)?;
                let m = match side {
                    Side::Left => self.left,
                    Side::Right => self.right,
                };
                distinction = Some(Distinction {
                    side,
                    initial: m.conf(i).clone(),
                    formula,
                });
                break 'outer;
            }
        }
        Ok(BisimVerdict {
            bisimilar: distinction.is_none(),
            relation: self.relation(),
            distinction,
        })
    }
}

/// The largest bisimulation between the configurations of two models.
pub fn largest_bisimulation(m1: &Edts, m2: &Edts) -> Result<BTreeSet<(Configuration, Configuration)>, BisimError> {
    Ok(Bisimulation::new(m1, m2)?.relation())
}

pub fn bisimilar(m1: &Edts, m2: &Edts) -> Result<BisimVerdict, BisimError> {
    Bisimulation::new(m1, m2)?.verdict()
}

/// A hybrid-free formula true at `c1` in `m1` and false at `c2` in `m2`,
/// or `None` if the configurations are bisimilar.
pub fn distinguishing_formula(
    m1: &Edts,
    c1: &Configuration,
    m2: &Edts,
    c2: &Configuration,
) -> Result<Option<Formula>, BisimError> {
    let b = Bisimulation::new(m1, m2)?;
    let i = m1
        .index_of(c1)
        .ok_or_else(|| BisimError::UnknownConfiguration(c1.clone()))?;
    let j = m2
        .index_of(c2)
        .ok_or_else(|| BisimError::UnknownConfiguration(c2.clone()))?;
    b.distinguishing_formula(i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataSignature, Sort, Value};
    use crate::edts::{EdSignature, EdtsBuilder};

    fn sig() -> EdSignature {
        EdSignature::new(["e"], DataSignature::new([("a", Sort::Bool)]).unwrap())
    }

    fn d(v: bool) -> DataState {
        DataState::new([("a", Value::Bool(v))])
    }

    #[test]
    fn deadlock_versus_step() {
        let mut b = EdtsBuilder::new(sig(), "c");
        b.initial(d(true));
        let stuck = b.build().unwrap();
        let mut b = EdtsBuilder::new(sig(), "c");
        b.initial(d(true));
        b.edge("e", Configuration::new("c", d(true)), Configuration::new("c", d(true)));
        let live = b.build().unwrap();
        let c = Configuration::new("c", d(true));
        let f = distinguishing_formula(&live, &c, &stuck, &c).unwrap().unwrap();
        assert_eq!(f.to_string(), "<e // true> true");
        let v = bisimilar(&stuck, &live).unwrap();
        assert!(!v.bisimilar);
        let dist = v.distinction.unwrap();
        assert_eq!(dist.side, Side::Left);
        assert_eq!(dist.formula.to_string(), "not <e // true> true");
    }

    #[test]
    fn loop_and_cycle_are_bisimilar() {
        let mut b = EdtsBuilder::new(sig(), "c");
        b.initial(d(true));
        b.edge("e", Configuration::new("c", d(true)), Configuration::new("c", d(true)));
        let lp = b.build().unwrap();
        let mut b = EdtsBuilder::new(sig(), "c");
        b.initial(d(true));
        b.edge("e", Configuration::new("c", d(true)), Configuration::new("k", d(true)));
        b.edge("e", Configuration::new("k", d(true)), Configuration::new("c", d(true)));
        let cyc = b.build().unwrap();
        let v = bisimilar(&lp, &cyc).unwrap();
        assert!(v.bisimilar);
        assert_eq!(v.relation.len(), 2);
    }
}
