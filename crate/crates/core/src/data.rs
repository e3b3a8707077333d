//! Attribute sorts, values and data states over a finite universe.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the number of data states a signature may enumerate.
pub const DEFAULT_STATE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataError {
    #[error("attribute `{0}` declared twice")]
    DuplicateAttribute(String),
    #[error("empty integer range {lo}..{hi} for attribute `{attr}`")]
    EmptyRange { attr: String, lo: i64, hi: i64 },
    #[error("universe has {count} data states, more than the cap of {cap}")]
    TooManyStates { count: u128, cap: u64 },
    #[error("attribute sets overlap on {0:?}")]
    Overlap(Vec<String>),
    #[error("data state does not conform to the signature: {0}")]
    NonConforming(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "sort", rename_all = "lowercase")]
pub enum Sort {
    Bool,
    Int { lo: i64, hi: i64 },
}

impl Sort {
    pub fn size(&self) -> u128 {
        match *self {
            Sort::Bool => 2,
            Sort::Int { lo, hi } => {
                if hi < lo {
                    0
                } else {
                    (hi as i128 - lo as i128 + 1) as u128
                }
            }
        }
    }

    pub fn contains(&self, v: Value) -> bool {
        match (*self, v) {
            (Sort::Bool, Value::Bool(_)) => true,
            (Sort::Int { lo, hi }, Value::Int(n)) => lo <= n && n <= hi,
            _ => false,
        }
    }

    /// Values of the sort in ascending order.
    pub fn values(&self) -> Vec<Value> {
        match *self {
            Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Sort::Int { lo, hi } => (lo..=hi).map(Value::Int).collect(),
        }
    }

    pub fn same_kind(&self, other: &Sort) -> bool {
        matches!(
            (self, other),
            (Sort::Bool, Sort::Bool) | (Sort::Int { .. }, Sort::Int { .. })
        )
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => write!(f, "bool"),
            Sort::Int { lo, hi } => write!(f, "int[{lo}..{hi}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
        }
    }
}

/// A finite set of typed attributes, kept in name order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DataSignature {
    attrs: BTreeMap<String, Sort>,
}

impl DataSignature {
    pub fn new<I, S>(attrs: I) -> Result<Self, DataError>
    where
        I: IntoIterator<Item = (S, Sort)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (name, sort) in attrs {
            let name = name.into();
            if let Sort::Int { lo, hi } = sort {
                if hi < lo {
                    return Err(DataError::EmptyRange { attr: name, lo, hi });
                }
            }
            if map.insert(name.clone(), sort).is_some() {
                return Err(DataError::DuplicateAttribute(name));
            }
        }
        Ok(DataSignature { attrs: map })
    }

    pub fn empty() -> Self {
        DataSignature::default()
    }

    pub fn sort(&self, attr: &str) -> Option<Sort> {
        self.attrs.get(attr).copied()
    }

    pub fn contains(&self, attr: &str) -> bool {
        self.attrs.contains_key(attr)
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.attrs.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Sort)> {
        self.attrs.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Disjoint union of two attribute sets.
    pub fn union(&self, other: &DataSignature) -> Result<DataSignature, DataError> {
        let overlap: Vec<String> = self
            .attrs
            .keys()
            .filter(|a| other.attrs.contains_key(*a))
            .cloned()
            .collect();
        if !overlap.is_empty() {
            return Err(DataError::Overlap(overlap));
        }
        let mut attrs = self.attrs.clone();
        attrs.extend(other.attrs.iter().map(|(k, v)| (k.clone(), *v)));
        Ok(DataSignature { attrs })
    }

    pub fn state_count(&self) -> u128 {
        self.attrs
            .values()
            .fold(1u128, |acc, s| acc.saturating_mul(s.size()))
    }

    /// All data states in lexicographic order (attributes by name, values ascending).
    pub fn enumerate(&self, cap: u64) -> Result<Vec<DataState>, DataError> {
        let count = self.state_count();
        if count > cap as u128 {
            return Err(DataError::TooManyStates { count, cap });
        }
        let domains: Vec<(&String, Vec<Value>)> =
            self.attrs.iter().map(|(k, s)| (k, s.values())).collect();
        let mut out = Vec::with_capacity(count as usize);
        let mut idx = vec![0usize; domains.len()];
        loop {
            let state = domains
                .iter()
                .zip(&idx)
                .map(|((name, vals), &i)| ((*name).clone(), vals[i]))
                .collect();
            out.push(DataState(state));
            // odometer, last attribute fastest
            let mut pos = domains.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < domains[pos].1.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    pub fn check_state(&self, state: &DataState) -> Result<(), DataError> {
        if state.0.len() != self.attrs.len() {
            return Err(DataError::NonConforming(state.to_string()));
        }
        for (name, sort) in &self.attrs {
            match state.0.get(name) {
                Some(v) if sort.contains(*v) => {}
                _ => return Err(DataError::NonConforming(state.to_string())),
            }
        }
        Ok(())
    }
}

impl fmt::Display for DataSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.attrs.iter().map(|(k, s)| format!("{k}: {s}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// A total assignment of values to the attributes of a signature.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DataState(BTreeMap<String, Value>);

impl DataState {
    pub fn new<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = (S, Value)>,
        S: Into<String>,
    {
        DataState(values.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn get(&self, attr: &str) -> Option<Value> {
        self.0.get(attr).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn with(mut self, attr: &str, v: Value) -> Self {
        self.0.insert(attr.to_string(), v);
        self
    }

    /// Reduct along an attribute map from source attributes to target
    /// attributes: the result assigns to each source attribute `a` the value
    /// this state gives to `map[a]`.
    pub fn reduct(&self, map: &BTreeMap<String, String>) -> DataState {
        DataState(
            map.iter()
                .filter_map(|(src, tgt)| self.0.get(tgt).map(|v| (src.clone(), *v)))
                .collect(),
        )
    }

    /// Restriction to the attributes of `sig`.
    pub fn restrict(&self, sig: &DataSignature) -> DataState {
        DataState(
            self.0
                .iter()
                .filter(|(k, _)| sig.contains(k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        )
    }

    /// Union of two states over disjoint attribute sets.
    pub fn sum(&self, other: &DataState) -> Result<DataState, DataError> {
        let overlap: Vec<String> = self
            .0
            .keys()
            .filter(|k| other.0.contains_key(*k))
            .cloned()
            .collect();
        if !overlap.is_empty() {
            return Err(DataError::Overlap(overlap));
        }
        let mut m = self.0.clone();
        m.extend(other.0.iter().map(|(k, v)| (k.clone(), *v)));
        Ok(DataState(m))
    }
}

impl fmt::Display for DataState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atm_attrs() -> DataSignature {
        DataSignature::new([("chk", Sort::Bool), ("trls", Sort::Int { lo: 0, hi: 3 })]).unwrap()
    }

    #[test]
    fn enumerates_lexicographically() {
        let states = atm_attrs().enumerate(DEFAULT_STATE_CAP).unwrap();
        assert_eq!(states.len(), 8);
        assert_eq!(
            states[0],
            DataState::new([("chk", Value::Bool(false)), ("trls", Value::Int(0))])
        );
        assert_eq!(
            states[4],
            DataState::new([("chk", Value::Bool(true)), ("trls", Value::Int(0))])
        );
        let mut sorted = states.clone();
        sorted.sort();
        assert_eq!(sorted, states);
    }

    #[test]
    fn empty_signature_has_one_state() {
        let states = DataSignature::empty().enumerate(10).unwrap();
        assert_eq!(states, vec![DataState::default()]);
    }

    #[test]
    fn cap_is_enforced() {
        let sig = DataSignature::new([
            ("a", Sort::Int { lo: 0, hi: 999 }),
            ("b", Sort::Int { lo: 0, hi: 999 }),
            ("c", Sort::Bool),
        ])
        .unwrap();
        assert!(matches!(
            sig.enumerate(DEFAULT_STATE_CAP),
            Err(DataError::TooManyStates { count: 2_000_000, .. })
        ));
    }

    #[test]
    fn reduct_and_sum() {
        let w = DataState::new([("chk", Value::Bool(true)), ("trls", Value::Int(2))]);
        let map: BTreeMap<String, String> = [("c".to_string(), "chk".to_string())].into();
        assert_eq!(w.reduct(&map), DataState::new([("c", Value::Bool(true))]));
        let a = DataState::new([("x", Value::Int(1))]);
        let b = DataState::new([("y", Value::Int(2))]);
        assert_eq!(a.sum(&b).unwrap().len(), 2);
        assert!(a.sum(&a).is_err());
    }
}
