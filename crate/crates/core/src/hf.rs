//! Hereditarily finite sets in canonical normal form.
//!
//! Every [`HfSet`] keeps its children sorted by the canonical order (rank
//! first, then lexicographic over children) with duplicates removed, so
//! extensional equality is plain structural equality.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

#[derive(PartialEq, Eq, Hash)]
struct Node {
    rank: u32,
    elems: Vec<HfSet>,
}

/// A hereditarily finite set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HfSet(Arc<Node>);

impl HfSet {
    pub fn empty() -> Self {
        HfSet(Arc::new(Node {
            rank: 0,
            elems: Vec::new(),
        }))
    }

    /// Builds the set of the given elements, merging duplicates.
    pub fn from_elems<I: IntoIterator<Item = HfSet>>(elems: I) -> Self {
        let mut elems: Vec<HfSet> = elems.into_iter().collect();
        elems.sort();
        elems.dedup();
        let rank = elems.iter().map(|e| e.rank() + 1).max().unwrap_or(0);
        HfSet(Arc::new(Node { rank, elems }))
    }

    pub fn singleton(x: HfSet) -> Self {
        Self::from_elems([x])
    }

    /// Von Neumann numeral: `0 = {}`, `n + 1 = n ∪ {n}`.
    pub fn numeral(n: usize) -> Self {
        let mut elems = Vec::with_capacity(n);
        for _ in 0..n {
            let next = Self::from_elems(elems.iter().cloned());
            elems.push(next);
        }
        Self::from_elems(elems)
    }

    /// Kuratowski pair `{{a}, {a, b}}`.
    pub fn pair(a: HfSet, b: HfSet) -> Self {
        Self::from_elems([Self::singleton(a.clone()), Self::from_elems([a, b])])
    }

    /// Zero for the empty set, otherwise one more than the largest child rank.
    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HfSet> {
        self.0.elems.iter()
    }

    pub fn contains(&self, x: &HfSet) -> bool {
        // Children of rank >= self.rank cannot occur; the sort puts rank first.
        x.rank() < self.rank() && self.0.elems.binary_search(x).is_ok()
    }

    pub fn is_subset(&self, other: &HfSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &HfSet) -> HfSet {
        Self::from_elems(self.iter().chain(other.iter()).cloned())
    }

    /// Returns `n` if this set is the von Neumann numeral `n`.
    pub fn as_numeral(&self) -> Option<usize> {
        let n = self.len();
        (*self == Self::numeral(n)).then_some(n)
    }

    /// Every set reachable through membership, including `self`.
    pub fn transitive_closure(&self) -> Vec<HfSet> {
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(x) = stack.pop() {
            if seen.insert(x.clone()) {
                stack.extend(x.iter().cloned());
            }
        }
        seen.into_iter().collect()
    }
}

impl Default for HfSet {
    fn default() -> Self {
        Self::empty()
    }
}

impl Ord for HfSet {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.0.elems.cmp(&other.0.elems))
    }
}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<HfSet> for HfSet {
    fn from_iter<I: IntoIterator<Item = HfSet>>(iter: I) -> Self {
        Self::from_elems(iter)
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as nested JSON arrays: `[]` is the empty set, `[[]]` is `{∅}`.
impl Serialize for HfSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for x in self.iter() {
            seq.serialize_element(x)?;
        }
        seq.end()
    }
}

/// Accepts nested arrays, and a bare non-negative integer as a von Neumann
/// numeral at any depth.
impl<'de> Deserialize<'de> for HfSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct HfVisitor;

        impl<'de> Visitor<'de> for HfVisitor {
            type Value = HfSet;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nested array or a natural number")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<HfSet, E> {
                if v > 16 {
                    return Err(E::custom(format!("numeral {v} is too large")));
                }
                Ok(HfSet::numeral(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<HfSet, E> {
                u64::try_from(v)
                    .map_err(|_| E::custom("negative numeral"))
                    .and_then(|v| self.visit_u64(v))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<HfSet, A::Error> {
                let mut elems = Vec::new();
                while let Some(x) = seq.next_element::<HfSet>()? {
                    elems.push(x);
                }
                Ok(HfSet::from_elems(elems))
            }
        }

        deserializer.deserialize_any(HfVisitor)
    }
}
