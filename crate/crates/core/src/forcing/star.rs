//! The forcing relation `⊩*`, defined by recursion on formulas and, for
//! atomic formulas, by well-founded recursion on tuples `(p, σ, e, τ)`:
//!
//! - `p ⊩* σ ∈ τ` iff `{q | ∃(π, r) ∈ τ, q ≤ r, q ⊩* π = σ}` is dense below `p`;
//! - `p ⊩* σ = τ` iff for all `(π, r) ∈ σ ∪ τ`, `p ⊩* (π ∈ σ ↔ π ∈ τ)`;
//! - `p ⊩* φ ∧ ψ` iff `p ⊩* φ` and `p ⊩* ψ`;
//! - `p ⊩* ¬φ` iff no `q ≤ p` has `q ⊩* φ`;
//! - `p ⊩* ∀x φ` iff `p ⊩* φ(σ)` for every set-name `σ` of the universe;
//! - `p ⊩* ∀X φ` iff `p ⊩* φ(Σ)` for every name `Σ` of the universe.
//!
//! The same atomic clauses serve set-names and class-names alike. The
//! biconditional in the equality clause is read through its `∧`/`¬`
//! expansion, not as a biconditional between two forcing statements.
//!
//! Compound formulas are evaluated a whole condition set at a time: the
//! result of `forcing_set(φ)` is `{p | p ⊩* φ}`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use crate::forcing::ForcingError;
use crate::logic::{Formula, Rel, Sort, Term, Var};
use crate::names::{NameId, NameStore, Universe};
use crate::order::{Cond, CondSet, Poset};

/// An atomic forcing question `cond ⊩* left rel right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomKey {
    pub cond: Cond,
    pub left: NameId,
    pub rel: Rel,
    pub right: NameId,
}

impl AtomKey {
    pub fn new(cond: Cond, left: NameId, rel: Rel, right: NameId) -> Self {
        AtomKey { cond, left, rel, right }
    }
}

/// The well-order on atomic tuples: `child < parent` iff
///
/// - the larger rank of the child's names is smaller, or
/// - the larger ranks agree, `rank(σ) ≥ rank(τ)` for the parent but
///   `rank(σ') < rank(τ')` for the child, or
/// - the larger ranks agree, the two `≥` comparisons agree, the parent is an
///   equality and the child a membership.
///
/// Conditions play no part in the order.
pub fn tuple_less(store: &NameStore, child: &AtomKey, parent: &AtomKey) -> bool {
    let (cl, cr) = (store.rank(child.left), store.rank(child.right));
    let (pl, pr) = (store.rank(parent.left), store.rank(parent.right));
    match cl.max(cr).cmp(&pl.max(pr)) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => {
            let (child_ge, parent_ge) = (cl >= cr, pl >= pr);
            (parent_ge && !child_ge) || (parent_ge == child_ge && parent.rel == Rel::Eq && child.rel == Rel::Mem)
        }
    }
}

/// Memoizing evaluator for `⊩*` over one poset and one name universe.
pub struct Forcer<'a> {
    poset: &'a Poset,
    store: &'a NameStore,
    universe: &'a Universe,
    memo: RefCell<HashMap<AtomKey, bool>>,
    active: RefCell<HashSet<AtomKey>>,
}

impl<'a> Forcer<'a> {
    pub fn new(poset: &'a Poset, store: &'a NameStore, universe: &'a Universe) -> Self {
        Forcer {
            poset,
            store,
            universe,
            memo: RefCell::new(HashMap::new()),
            active: RefCell::new(HashSet::new()),
        }
    }

    pub fn poset(&self) -> &'a Poset {
        self.poset
    }

    pub fn store(&self) -> &'a NameStore {
        self.store
    }

    pub fn universe(&self) -> &'a Universe {
        self.universe
    }

    /// Number of memoized atomic tuples.
    pub fn memo_len(&self) -> usize {
        self.memo.borrow().len()
    }

    /// A formula can be evaluated when it is closed and all its constants
    /// belong to the universe.
    pub fn check_formula(&self, phi: &Formula) -> Result<(), ForcingError> {
        let free = phi.free_vars();
        if !free.is_empty() {
            let names: Vec<&str> = free.iter().map(Var::name).collect();
            return Err(ForcingError::OpenFormula(names.join(", ")));
        }
        match phi.constants().into_iter().find(|&c| !self.universe.contains(c)) {
            Some(c) => Err(ForcingError::NameOutsideUniverse(self.store.display(c))),
            None => Ok(()),
        }
    }

    /// `p ⊩* φ`.
    pub fn forces_star(&self, p: Cond, phi: &Formula) -> Result<bool, ForcingError> {
        Ok(self.forcing_set(phi)?.contains(p))
    }

    /// `{p | p ⊩* φ}`.
    pub fn forcing_set(&self, phi: &Formula) -> Result<CondSet, ForcingError> {
        self.check_formula(phi)?;
        let core = phi.desugar();
        Ok(self.eval(&core, &mut Vec::new()))
    }

    /// `p ⊩* left rel right` for names, bypassing the universe check.
    pub fn atom(&self, p: Cond, left: NameId, rel: Rel, right: NameId) -> bool {
        self.atom_key(AtomKey::new(p, left, rel, right))
    }

    fn eval(&self, phi: &Formula, env: &mut Vec<(Var, NameId)>) -> CondSet {
        let poset = self.poset;
        match phi {
            Formula::Atom(rel, a, b) => {
                let (a, b) = (resolve(a, env), resolve(b, env));
                CondSet::from_conds(poset.len(), poset.conds().filter(|&p| self.atom(p, a, *rel, b)))
            }
            Formula::And(a, b) => {
                let mut s = self.eval(a, env);
                s.intersect_with(&self.eval(b, env));
                s
            }
            Formula::Not(a) => {
                let s = self.eval(a, env);
                CondSet::from_conds(poset.len(), poset.conds().filter(|&p| !poset.below(p).intersects(&s)))
            }
            Formula::Forall(v, body) => {
                let range = match v.sort() {
                    Sort::Set => self.universe.set_names(),
                    Sort::Class => self.universe.all(),
                };
                let mut s = poset.full_set();
                for &name in range {
                    env.push((v.clone(), name));
                    s.intersect_with(&self.eval(body, env));
                    env.pop();
                    if s.is_empty() {
                        break;
                    }
                }
                s
            }
            Formula::Or(..) | Formula::Iff(..) | Formula::Exists(..) => {
                unreachable!("formulas are desugared before evaluation")
            }
        }
    }

    fn atom_key(&self, key: AtomKey) -> bool {
        if let Some(&v) = self.memo.borrow().get(&key) {
            return v;
        }
        assert!(
            self.active.borrow_mut().insert(key),
            "forcing recursion re-entered {key:?}: the tuple order is not well-founded here"
        );
        let v = match key.rel {
            Rel::Mem => self.mem(key),
            Rel::Eq => self.eq(key),
        };
        self.active.borrow_mut().remove(&key);
        self.memo.borrow_mut().insert(key, v);
        v
    }

    fn child(&self, parent: &AtomKey, child: AtomKey) -> bool {
        assert!(
            tuple_less(self.store, &child, parent),
            "recursive call {child:?} is not below {parent:?}"
        );
        self.atom_key(child)
    }

    fn mem(&self, key: AtomKey) -> bool {
        let poset = self.poset;
        let (sigma, tau) = (key.left, key.right);
        let pairs = self.store.pairs(tau);
        // Only the part of the dense-below set lying under p matters.
        let mut d = poset.empty_set();
        for q in poset.below(key.cond).iter() {
            let witnessed = pairs
                .iter()
                .any(|&(pi, r)| poset.leq(q, r) && self.child(&key, AtomKey::new(q, pi, Rel::Eq, sigma)));
            if witnessed {
                d.insert(q);
            }
        }
        poset.is_dense_below(&d, key.cond)
    }

    fn eq(&self, key: AtomKey) -> bool {
        let (sigma, tau) = (key.left, key.right);
        let mut components = self.store.components(sigma);
        components.extend(self.store.components(tau));
        components.sort();
        components.dedup();
        components.into_iter().all(|pi| {
            let in_sigma = |q: Cond| self.child(&key, AtomKey::new(q, pi, Rel::Mem, sigma));
            let in_tau = |q: Cond| self.child(&key, AtomKey::new(q, pi, Rel::Mem, tau));
            self.forces_not_and_not(key.cond, &in_sigma, &in_tau)
                && self.forces_not_and_not(key.cond, &in_tau, &in_sigma)
        })
    }

    /// `p ⊩* ¬(A ∧ ¬B)`: no `q ≤ p` forces `A` while every `q' ≤ q` fails `B`.
    fn forces_not_and_not(&self, p: Cond, a: &dyn Fn(Cond) -> bool, b: &dyn Fn(Cond) -> bool) -> bool {
        let poset = self.poset;
        poset
            .below(p)
            .iter()
            .all(|q| !(a(q) && poset.below(q).iter().all(|r| !b(r))))
    }
}

fn resolve(t: &Term, env: &[(Var, NameId)]) -> NameId {
    match t {
        Term::Name(id) => *id,
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|&(_, id)| id)
            .expect("closed formulas bind every variable"),
    }
}
