//! Brute-force reference implementations used to cross-check the library.
//!
//! Nothing here calls the library's forcing, interpretation or genericity
//! code. Posets are read through `leq` only, names through their pairs, and
//! values are plain `BTreeSet` trees.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use classforce::logic::{Formula, Rel, Sort, Term, Var};
use classforce::names::{NameId, NameKind, NameStore, Universe};
use classforce::order::{Cond, Poset};
use classforce::HfSet;

/// A hereditarily finite set as a nested `BTreeSet`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct V(pub BTreeSet<V>);

impl V {
    pub fn empty() -> V {
        V(BTreeSet::new())
    }

    pub fn from_hf(x: &HfSet) -> V {
        V(x.iter().map(V::from_hf).collect())
    }

    pub fn rank(&self) -> u32 {
        self.0.iter().map(|y| y.rank() + 1).max().unwrap_or(0)
    }
}

/// A poset as bitmasks: `below[i]` has bit `j` set when `j <= i`.
pub struct Order {
    pub n: usize,
    pub below: Vec<u128>,
}

impl Order {
    pub fn of(poset: &Poset) -> Order {
        let n = poset.len();
        assert!(n <= 127, "oracle posets are small");
        let conds: Vec<Cond> = poset.conds().collect();
        let below = conds
            .iter()
            .map(|&p| {
                conds
                    .iter()
                    .enumerate()
                    .filter(|(_, &q)| poset.leq(q, p))
                    .fold(0u128, |m, (j, _)| m | 1 << j)
            })
            .collect();
        Order { n, below }
    }

    fn all(&self) -> u128 {
        (1u128 << self.n) - 1
    }

    pub fn compatible(&self, p: usize, q: usize) -> bool {
        self.below[p] & self.below[q] != 0
    }

    pub fn is_dense(&self, d: u128) -> bool {
        (0..self.n).all(|q| self.below[q] & d != 0)
    }

    /// Every dense subset, by scanning all `2^n` subsets.
    pub fn dense_sets(&self) -> Vec<u128> {
        assert!(self.n <= 16, "exhaustive scans stay small");
        (0..=self.all()).filter(|&d| self.is_dense(d)).collect()
    }

    pub fn is_filter(&self, g: u128) -> bool {
        let members: Vec<usize> = (0..self.n).filter(|i| g >> i & 1 == 1).collect();
        let upward = members
            .iter()
            .all(|&q| (0..self.n).all(|p| self.below[p] >> q & 1 == 0 || g >> p & 1 == 1));
        let directed = members.iter().all(|&p| {
            members
                .iter()
                .all(|&q| members.iter().any(|&r| (self.below[p] & self.below[q]) >> r & 1 == 1))
        });
        g != 0 && upward && directed
    }

    /// Generic filters by the definition: compatible, upward closed, and
    /// meeting every dense set. Scans all subsets, so only for small posets.
    pub fn generics_by_definition(&self) -> Vec<u128> {
        let dense = self.dense_sets();
        (1..=self.all())
            .filter(|&g| self.is_filter(g) && dense.iter().all(|d| d & g != 0))
            .collect()
    }

    /// Principal filters of minimal elements. On posets too large for
    /// [`Self::generics_by_definition`] this is the reference, justified by
    /// the exhaustive agreement on small posets.
    pub fn generics_by_minimal(&self) -> Vec<u128> {
        (0..self.n)
            .filter(|&m| self.below[m] == 1 << m)
            .map(|m| {
                (0..self.n)
                    .filter(|&p| self.below[p] >> m & 1 == 1)
                    .fold(0, |g, p| g | 1 << p)
            })
            .collect()
    }

    pub fn generics(&self) -> Vec<u128> {
        if self.n <= 12 {
            self.generics_by_definition()
        } else {
            self.generics_by_minimal()
        }
    }
}

/// `σ^G` by direct recursion on the pairs.
pub fn interpret(store: &NameStore, id: NameId, g: u128) -> V {
    V(store
        .pairs(id)
        .iter()
        .filter(|(_, c)| g >> c.index() & 1 == 1)
        .map(|&(tau, _)| interpret(store, tau, g))
        .collect())
}

/// A generic extension, evaluated naively.
pub struct Model {
    pub values: BTreeMap<NameId, V>,
    pub sets: BTreeSet<V>,
    pub classes: BTreeSet<V>,
}

impl Model {
    pub fn new(store: &NameStore, universe: &Universe, g: u128) -> Model {
        let values: BTreeMap<NameId, V> = universe.all().iter().map(|&id| (id, interpret(store, id, g))).collect();
        let sets = values
            .iter()
            .filter(|(&id, _)| store.kind(id) == NameKind::Set)
            .map(|(_, v)| v.clone())
            .collect();
        let classes = values.values().cloned().collect();
        Model { values, sets, classes }
    }

    pub fn holds(&self, phi: &Formula) -> bool {
        self.eval(phi, &BTreeMap::new())
    }

    fn term(&self, t: &Term, env: &BTreeMap<Var, V>) -> V {
        match t {
            Term::Name(id) => self.values[id].clone(),
            Term::Var(v) => env[v].clone(),
        }
    }

    fn eval(&self, phi: &Formula, env: &BTreeMap<Var, V>) -> bool {
        match phi {
            Formula::Atom(Rel::Mem, a, b) => self.term(b, env).0.contains(&self.term(a, env)),
            Formula::Atom(Rel::Eq, a, b) => self.term(a, env) == self.term(b, env),
            Formula::Not(a) => !self.eval(a, env),
            Formula::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Formula::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Formula::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            Formula::Forall(v, body) => self.domain(v).iter().all(|x| self.eval(body, &bind(env, v, x))),
            Formula::Exists(v, body) => self.domain(v).iter().any(|x| self.eval(body, &bind(env, v, x))),
        }
    }

    fn domain(&self, v: &Var) -> &BTreeSet<V> {
        match v.sort() {
            Sort::Set => &self.sets,
            Sort::Class => &self.classes,
        }
    }
}

fn bind(env: &BTreeMap<Var, V>, v: &Var, x: &V) -> BTreeMap<Var, V> {
    let mut env = env.clone();
    env.insert(v.clone(), x.clone());
    env
}

/// The semantic forcing relation from first principles: every generic
/// containing `p` yields an extension satisfying `φ`.
pub struct Oracle {
    pub order: Order,
    pub generics: Vec<u128>,
    pub models: Vec<Model>,
}

impl Oracle {
    pub fn new(poset: &Poset, store: &NameStore, universe: &Universe) -> Oracle {
        let order = Order::of(poset);
        let generics = order.generics();
        let models = generics.iter().map(|&g| Model::new(store, universe, g)).collect();
        Oracle {
            order,
            generics,
            models,
        }
    }

    pub fn forces(&self, p: Cond, phi: &Formula) -> bool {
        self.generics
            .iter()
            .zip(&self.models)
            .filter(|(g, _)| *g >> p.index() & 1 == 1)
            .all(|(_, m)| m.holds(phi))
    }
}
