use std::collections::{BTreeMap, BTreeSet};

use crate::logic::Rel;
use crate::names::{NameId, NameStore, Universe};
use crate::order::{Cond, CondSet, Poset};

/// The membership and equality relations on names of rank below `alpha`,
/// built bottom-up without reference to [`crate::forcing::Forcer`].
///
/// `entries[(σ, rel, τ)]` is the set of conditions forcing `σ rel τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcingTables {
    alpha: u32,
    entries: BTreeMap<(NameId, Rel, NameId), CondSet>,
}

/// Order in which entries are filled: every entry only reads entries with a
/// strictly smaller key.
fn fill_key(store: &NameStore, (left, rel, right): (NameId, Rel, NameId)) -> (u32, bool, Rel) {
    let (l, r) = (store.rank(left), store.rank(right));
    (l.max(r), l >= r, rel)
}

pub fn materialize_tables(poset: &Poset, store: &NameStore, universe: &Universe, alpha: u32) -> ForcingTables {
    let names: Vec<NameId> = universe
        .all()
        .iter()
        .copied()
        .filter(|&id| store.rank(id) < alpha)
        .collect();
    let mut keys: Vec<(NameId, Rel, NameId)> = Vec::with_capacity(names.len() * names.len() * 2);
    for &l in &names {
        for &r in &names {
            keys.push((l, Rel::Mem, r));
            keys.push((l, Rel::Eq, r));
        }
    }
    keys.sort_by_key(|&k| (fill_key(store, k), k));

    let mut tables = ForcingTables {
        alpha,
        entries: BTreeMap::new(),
    };
    for key in keys {
        let value = match key.1 {
            Rel::Mem => tables.fill_mem(poset, store, key),
            Rel::Eq => tables.fill_eq(poset, store, key),
        };
        tables.entries.insert(key, value);
    }
    tables
}

/// `{p | no q ≤ p lies in s}`.
fn negate(poset: &Poset, s: &CondSet) -> CondSet {
    CondSet::from_conds(poset.len(), poset.conds().filter(|&p| !poset.below(p).intersects(s)))
}

impl ForcingTables {
    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Conditions forcing `left rel right`, when both names have rank below `alpha`.
    pub fn get(&self, left: NameId, rel: Rel, right: NameId) -> Option<&CondSet> {
        self.entries.get(&(left, rel, right))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(NameId, Rel, NameId), &CondSet)> {
        self.entries.iter()
    }

    /// Every `(p, σ, rel, τ)` in the relations.
    pub fn true_tuples(&self) -> BTreeSet<(Cond, NameId, Rel, NameId)> {
        self.entries
            .iter()
            .flat_map(|(&(l, rel, r), s)| s.iter().map(move |p| (p, l, rel, r)))
            .collect()
    }

    /// The membership slice.
    pub fn mem_slice(&self) -> impl Iterator<Item = (Cond, NameId, NameId)> + '_ {
        self.slice(Rel::Mem)
    }

    /// The equality slice.
    pub fn eq_slice(&self) -> impl Iterator<Item = (Cond, NameId, NameId)> + '_ {
        self.slice(Rel::Eq)
    }

    fn slice(&self, rel: Rel) -> impl Iterator<Item = (Cond, NameId, NameId)> + '_ {
        self.entries
            .iter()
            .filter(move |((_, r, _), _)| *r == rel)
            .flat_map(|(&(l, _, r), s)| s.iter().map(move |p| (p, l, r)))
    }

    fn dep(&self, left: NameId, rel: Rel, right: NameId) -> &CondSet {
        self.entries
            .get(&(left, rel, right))
            .unwrap_or_else(|| panic!("table entry ({left:?}, {rel:?}, {right:?}) read before it was filled"))
    }

    fn fill_mem(&self, poset: &Poset, store: &NameStore, (sigma, _, tau): (NameId, Rel, NameId)) -> CondSet {
        let mut witnesses = poset.empty_set();
        for &(pi, r) in store.pairs(tau) {
            let mut w = poset.below(r).clone();
            w.intersect_with(self.dep(pi, Rel::Eq, sigma));
            witnesses.union_with(&w);
        }
        // p is in the relation iff every q ≤ p has a witness below it.
        let no_witness_below = negate(poset, &witnesses);
        negate(poset, &no_witness_below)
    }

    fn fill_eq(&self, poset: &Poset, store: &NameStore, (sigma, _, tau): (NameId, Rel, NameId)) -> CondSet {
        let mut components = store.components(sigma);
        components.extend(store.components(tau));
        components.sort();
        components.dedup();
        let mut out = poset.full_set();
        for pi in components {
            let in_sigma = self.dep(pi, Rel::Mem, sigma);
            let in_tau = self.dep(pi, Rel::Mem, tau);
            for (a, b) in [(in_sigma, in_tau), (in_tau, in_sigma)] {
                let mut a_not_b = a.clone();
                a_not_b.intersect_with(&negate(poset, b));
                out.intersect_with(&negate(poset, &a_not_b));
            }
        }
        out
    }
}
