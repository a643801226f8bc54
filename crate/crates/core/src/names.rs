//! Set-names and class-names over a finite poset, their interpretation by a
//! generic filter, and the generic extension built from a finite universe of
//! names.
//!
//! Names live in a [`NameStore`], an intern table: constructing a name whose
//! pair set already exists returns the existing [`NameId`], so names form a
//! DAG with full structural sharing. A name's rank is `1 + max` over the
//! ranks of its components, with the empty name at rank 1.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::forcing::GenericFilter;
use crate::hf::HfSet;
use crate::order::{Cond, CondSet, Poset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NameError {
    #[error("condition #{0} does not belong to the poset")]
    ForeignCondition(usize),
    #[error("name #{0} is not in this store")]
    UnknownName(u32),
    #[error("class-name `{0}` cannot occur inside a name")]
    ClassInsideName(String),
    #[error("label `{0}` is already bound to another name")]
    DuplicateLabel(String),
    #[error("unknown name `{0}`")]
    UnknownLabel(String),
    #[error("`{0}` is a class-name, expected a set-name")]
    NotASetName(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NameId(u32);

impl NameId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NameKind {
    Set,
    Class,
}

#[derive(Clone, Debug)]
struct NameNode {
    kind: NameKind,
    pairs: Vec<(NameId, Cond)>,
    rank: u32,
}

/// Intern table for names over one poset.
#[derive(Clone, Debug)]
pub struct NameStore {
    poset_len: usize,
    top: Cond,
    nodes: Vec<NameNode>,
    interned: HashMap<(NameKind, Vec<(NameId, Cond)>), NameId>,
    labels: HashMap<String, NameId>,
    label_of: HashMap<NameId, String>,
}

impl NameStore {
    pub fn new(poset: &Poset) -> Self {
        NameStore {
            poset_len: poset.len(),
            top: poset.top(),
            nodes: Vec::new(),
            interned: HashMap::new(),
            labels: HashMap::new(),
            label_of: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NameId> {
        (0..self.nodes.len() as u32).map(NameId)
    }

    fn intern(&mut self, kind: NameKind, pairs: Vec<(NameId, Cond)>) -> Result<NameId, NameError> {
        let mut pairs = pairs;
        pairs.sort();
        pairs.dedup();
        let mut rank = 1;
        for &(pi, p) in &pairs {
            if p.index() >= self.poset_len {
                return Err(NameError::ForeignCondition(p.index()));
            }
            let node = self.nodes.get(pi.index()).ok_or(NameError::UnknownName(pi.0))?;
            if node.kind == NameKind::Class {
                return Err(NameError::ClassInsideName(self.display(pi)));
            }
            rank = rank.max(node.rank + 1);
        }
        let key = (kind, pairs);
        if let Some(&id) = self.interned.get(&key) {
            return Ok(id);
        }
        let id = NameId(self.nodes.len() as u32);
        self.nodes.push(NameNode {
            kind,
            pairs: key.1.clone(),
            rank,
        });
        self.interned.insert(key, id);
        Ok(id)
    }

    /// Interns the set-name with the given `(name, condition)` pairs.
    pub fn mk_set_name<I: IntoIterator<Item = (NameId, Cond)>>(&mut self, pairs: I) -> Result<NameId, NameError> {
        self.intern(NameKind::Set, pairs.into_iter().collect())
    }

    /// Interns the class-name with the given pairs; components must be set-names.
    pub fn mk_class_name<I: IntoIterator<Item = (NameId, Cond)>>(&mut self, pairs: I) -> Result<NameId, NameError> {
        self.intern(NameKind::Class, pairs.into_iter().collect())
    }

    /// The empty set-name.
    pub fn empty_name(&mut self) -> NameId {
        self.mk_set_name([]).expect("the empty name is always valid")
    }

    fn node(&self, id: NameId) -> &NameNode {
        &self.nodes[id.index()]
    }

    pub fn contains(&self, id: NameId) -> bool {
        id.index() < self.nodes.len()
    }

    pub fn kind(&self, id: NameId) -> NameKind {
        self.node(id).kind
    }

    pub fn is_set_name(&self, id: NameId) -> bool {
        self.kind(id) == NameKind::Set
    }

    pub fn rank(&self, id: NameId) -> u32 {
        self.node(id).rank
    }

    /// Pairs in canonical order.
    pub fn pairs(&self, id: NameId) -> &[(NameId, Cond)] {
        &self.node(id).pairs
    }

    /// Distinct first components of the pairs, in order.
    pub fn components(&self, id: NameId) -> Vec<NameId> {
        let mut out: Vec<NameId> = self.pairs(id).iter().map(|&(pi, _)| pi).collect();
        out.dedup();
        out
    }

    pub fn set_label(&mut self, id: NameId, label: &str) -> Result<(), NameError> {
        match self.labels.get(label) {
            Some(&other) if other != id => return Err(NameError::DuplicateLabel(label.to_string())),
            Some(_) => return Ok(()),
            None => {}
        }
        self.labels.insert(label.to_string(), id);
        self.label_of.entry(id).or_insert_with(|| label.to_string());
        Ok(())
    }

    pub fn label(&self, id: NameId) -> Option<&str> {
        self.label_of.get(&id).map(String::as_str)
    }

    /// Resolves a label, or `#<index>` for unlabeled names.
    pub fn lookup(&self, label: &str) -> Result<NameId, NameError> {
        if let Some(&id) = self.labels.get(label) {
            return Ok(id);
        }
        label
            .strip_prefix('#')
            .and_then(|n| n.parse::<u32>().ok())
            .map(NameId)
            .filter(|&id| self.contains(id))
            .ok_or_else(|| NameError::UnknownLabel(label.to_string()))
    }

    /// The label of a name, or `#<index>` when it has none.
    pub fn display(&self, id: NameId) -> String {
        match self.label(id) {
            Some(l) => l.to_string(),
            None => format!("#{}", id.0),
        }
    }

    /// Canonical name `x̌ = {(y̌, 1) | y ∈ x}`.
    pub fn check(&mut self, x: &HfSet) -> NameId {
        let top = self.top;
        let pairs: Vec<(NameId, Cond)> = x.iter().map(|y| (self.check(y), top)).collect();
        self.mk_set_name(pairs).expect("canonical names are valid")
    }

    /// Canonical class-name `Č = {(x̌, 1) | x ∈ C}`.
    pub fn check_class<'a, I: IntoIterator<Item = &'a HfSet>>(&mut self, class: I) -> NameId {
        let top = self.top;
        let pairs: Vec<(NameId, Cond)> = class.into_iter().map(|x| (self.check(x), top)).collect();
        self.mk_class_name(pairs).expect("canonical names are valid")
    }

    /// The name `Γ = {(p̌, p) | p ∈ P}` of the generic filter.
    pub fn generic_name(&mut self, poset: &Poset) -> NameId {
        let pairs: Vec<(NameId, Cond)> = poset.conds().map(|p| (self.check(poset.code(p)), p)).collect();
        self.mk_class_name(pairs).expect("canonical names are valid")
    }

    /// `{(σ1, 1), (σ2, 1)}`, a name for the unordered pair.
    pub fn pairing_name(&mut self, a: NameId, b: NameId) -> Result<NameId, NameError> {
        let top = self.top;
        self.mk_set_name([(a, top), (b, top)])
    }

    /// Rewrites every condition inside `id` through `perm` (indexed by
    /// condition), recursively.
    pub fn relabel(&mut self, id: NameId, perm: &[Cond]) -> NameId {
        let mut memo = HashMap::new();
        self.relabel_inner(id, perm, &mut memo)
    }

    fn relabel_inner(&mut self, id: NameId, perm: &[Cond], memo: &mut HashMap<NameId, NameId>) -> NameId {
        if let Some(&done) = memo.get(&id) {
            return done;
        }
        let pairs: Vec<(NameId, Cond)> = self.pairs(id).to_vec();
        let mapped: Vec<(NameId, Cond)> = pairs
            .into_iter()
            .map(|(pi, p)| (self.relabel_inner(pi, perm, memo), perm[p.index()]))
            .collect();
        let out = self
            .intern(self.kind(id), mapped)
            .expect("relabelling by a permutation keeps names valid");
        memo.insert(id, out);
        out
    }

    /// Every name reachable from `id` through pair components, `id` included.
    pub fn subnames(&self, id: NameId) -> BTreeSet<NameId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(self.pairs(x).iter().map(|&(pi, _)| pi));
            }
        }
        seen
    }

    pub fn interpret(&self, id: NameId, generic: &CondSet) -> HfSet {
        Interpreter::new(self, generic).value(id)
    }
}

/// Memoized evaluation of `σ^G = {τ^G | (τ, p) ∈ σ, p ∈ G}` for one `G`.
pub struct Interpreter<'a> {
    store: &'a NameStore,
    generic: &'a CondSet,
    cache: HashMap<NameId, HfSet>,
}

impl<'a> Interpreter<'a> {
    pub fn new(store: &'a NameStore, generic: &'a CondSet) -> Self {
        Interpreter {
            store,
            generic,
            cache: HashMap::new(),
        }
    }

    pub fn value(&mut self, id: NameId) -> HfSet {
        if let Some(v) = self.cache.get(&id) {
            return v.clone();
        }
        let store = self.store;
        let elems: Vec<HfSet> = store
            .pairs(id)
            .iter()
            .filter(|&&(_, p)| self.generic.contains(p))
            .map(|&(pi, _)| self.value(pi))
            .collect();
        let v = HfSet::from_elems(elems);
        self.cache.insert(id, v.clone());
        v
    }
}

/// A finite name universe, closed under subnames.
///
/// First-order quantifiers range over `set_names`; second-order quantifiers
/// range over `all`, since every set-name is also a class-name payload.
#[derive(Clone, Debug, Default)]
pub struct Universe {
    set_names: Vec<NameId>,
    all: Vec<NameId>,
    members: HashSet<NameId>,
}

impl Universe {
    /// Declared names first, in order, then missing subnames in discovery order.
    pub fn closed<I: IntoIterator<Item = NameId>>(store: &NameStore, roots: I) -> Self {
        let mut u = Universe::default();
        let roots: Vec<NameId> = roots.into_iter().collect();
        for &r in &roots {
            u.push(store, r);
        }
        let mut i = 0;
        while i < u.all.len() {
            let id = u.all[i];
            for pi in store.components(id) {
                u.push(store, pi);
            }
            i += 1;
        }
        u
    }

    fn push(&mut self, store: &NameStore, id: NameId) {
        if self.members.insert(id) {
            self.all.push(id);
            if store.is_set_name(id) {
                self.set_names.push(id);
            }
        }
    }

    pub fn set_names(&self) -> &[NameId] {
        &self.set_names
    }

    pub fn all(&self) -> &[NameId] {
        &self.all
    }

    pub fn contains(&self, id: NameId) -> bool {
        self.members.contains(&id)
    }

    pub fn max_rank(&self, store: &NameStore) -> u32 {
        self.all.iter().map(|&id| store.rank(id)).max().unwrap_or(0)
    }
}

/// The generic extension `(M[G], C[G])` restricted to a universe.
#[derive(Clone, Debug)]
pub struct Extension {
    /// Identifier of the generic (its least element).
    pub generic: String,
    /// `(σ, σ^G)` for every set-name of the universe.
    pub sets: Vec<(NameId, HfSet)>,
    /// `(Σ, Σ^G)` for every name of the universe.
    pub classes: Vec<(NameId, HfSet)>,
    values: HashMap<NameId, HfSet>,
    set_values: Vec<HfSet>,
    class_values: Vec<HfSet>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("extension is not transitive: {member} ∈ {value} (value of `{name}`) is not a set of the extension")]
pub struct NotTransitive {
    pub name: String,
    pub value: HfSet,
    pub member: HfSet,
}

impl Extension {
    pub fn build(store: &NameStore, universe: &Universe, poset: &Poset, g: &GenericFilter) -> Extension {
        let mut interp = Interpreter::new(store, g.members());
        let classes: Vec<(NameId, HfSet)> = universe.all().iter().map(|&id| (id, interp.value(id))).collect();
        let values: HashMap<NameId, HfSet> = classes.iter().cloned().collect();
        let sets: Vec<(NameId, HfSet)> = universe
            .set_names()
            .iter()
            .map(|&id| (id, values[&id].clone()))
            .collect();
        let distinct = |xs: &[(NameId, HfSet)]| -> Vec<HfSet> {
            xs.iter()
                .map(|(_, v)| v.clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        };
        Extension {
            generic: poset.id(g.least()).to_string(),
            set_values: distinct(&sets),
            class_values: distinct(&classes),
            sets,
            classes,
            values,
        }
    }

    /// Distinct values of the sets part, in canonical order.
    pub fn set_values(&self) -> &[HfSet] {
        &self.set_values
    }

    /// Distinct values of the classes part, in canonical order.
    pub fn class_values(&self) -> &[HfSet] {
        &self.class_values
    }

    pub fn value(&self, id: NameId) -> Option<&HfSet> {
        self.values.get(&id)
    }

    pub fn contains_set(&self, x: &HfSet) -> bool {
        self.set_values.binary_search(x).is_ok()
    }

    pub fn check_transitive(&self, store: &NameStore) -> Result<(), NotTransitive> {
        for (id, v) in &self.sets {
            if let Some(m) = v.iter().find(|m| !self.contains_set(m)) {
                return Err(NotTransitive {
                    name: store.display(*id),
                    value: v.clone(),
                    member: m.clone(),
                });
            }
        }
        Ok(())
    }

    /// Names grouped by value, for display.
    pub fn grouped(&self, store: &NameStore) -> BTreeMap<HfSet, Vec<String>> {
        let mut out: BTreeMap<HfSet, Vec<String>> = BTreeMap::new();
        for (id, v) in &self.sets {
            out.entry(v.clone()).or_default().push(store.display(*id));
        }
        out
    }
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NameKind::Set => "set",
            NameKind::Class => "class",
        })
    }
}
