//! Binary relations over `0..n` stored as bitset rows.

use fixedbitset::FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    rows: Vec<FixedBitSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            rows: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Relation::empty(n);
        for i in 0..n {
            r.rows[i].insert(i);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Relation::empty(n);
        for (i, j) in pairs {
            r.insert(i, j);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.rows[i].insert(j);
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn row(&self, i: usize) -> &FixedBitSet {
        &self.rows[i]
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[i].ones()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.ones().map(move |j| (i, j)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    pub fn union(&self, other: &Relation) -> Relation {
        let mut out = self.clone();
        for (a, b) in out.rows.iter_mut().zip(&other.rows) {
            a.union_with(b);
        }
        out
    }

    /// Relational composition: `i (self;other) j` iff `i self k` and `k other j`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let n = self.size();
        let mut out = Relation::empty(n);
        for i in 0..n {
            let mut row = FixedBitSet::with_capacity(n);
            for k in self.rows[i].ones() {
                row.union_with(&other.rows[k]);
            }
            out.rows[i] = row;
        }
        out
    }

    /// Reflexive-transitive closure by a reachability sweep from each row.
    pub fn closure(&self) -> Relation {
        let n = self.size();
        let mut out = Relation::empty(n);
        let mut stack = Vec::new();
        for i in 0..n {
            let row = &mut out.rows[i];
            row.insert(i);
            stack.push(i);
            while let Some(k) = stack.pop() {
                for j in self.rows[k].ones() {
                    if !row.put(j) {
                        stack.push(j);
                    }
                }
            }
        }
        out
    }

    /// Reflexive-transitive closure by repeated squaring of `id ∪ self`.
    pub fn closure_by_squaring(&self) -> Relation {
        let mut cur = Relation::identity(self.size()).union(self);
        loop {
            let next = cur.compose(&cur);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Image of a set under the relation.
    pub fn image(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.size());
        for i in set.ones() {
            out.union_with(&self.rows[i]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_a_chain() {
        let r = Relation::from_pairs(4, [(0, 1), (1, 2)]);
        let c = r.closure();
        assert!(c.contains(0, 2));
        assert!(c.contains(3, 3));
        assert!(!c.contains(2, 0));
        assert_eq!(c, r.closure_by_squaring());
    }
}
