//! Finite forcing notions: partial orders with a top element, plus the
//! density and compatibility predicates used throughout the crate.
//!
//! Conditions are addressed by [`Cond`], an index into the declaration order
//! of the poset. The full order relation is stored as one bitset per
//! condition (`below[p] = {q | q ≤ p}`), computed once at construction.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::hf::HfSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("poset has no elements")]
    Empty,
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element `{0}` is declared twice")]
    DuplicateElement(String),
    #[error("order is not antisymmetric: `{0}` and `{1}` lie below each other")]
    NotAntisymmetric(String, String),
    #[error("top element `{top}` is not above `{elem}`")]
    TopNotMaximum { top: String, elem: String },
    #[error("conditions `{0}` and `{1}` share the same code")]
    CodeCollision(String, String),
    #[error("expected {expected} condition codes, found {found}")]
    CodeCount { expected: usize, found: usize },
    #[error("Cohen poset needs a positive size")]
    ZeroCohen,
    #[error("Cohen poset of size {0} is too large to enumerate")]
    CohenTooLarge(usize),
}

/// A condition of some [`Poset`], by declaration index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cond(pub(crate) u32);

impl Cond {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Cond {
        Cond(i as u32)
    }
}

/// A set of conditions of one poset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CondSet(FixedBitSet);

impl CondSet {
    pub fn empty(len: usize) -> Self {
        CondSet(FixedBitSet::with_capacity(len))
    }

    pub fn full(len: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(len);
        bits.insert_range(..);
        CondSet(bits)
    }

    pub fn from_conds<I: IntoIterator<Item = Cond>>(len: usize, conds: I) -> Self {
        let mut set = Self::empty(len);
        for c in conds {
            set.insert(c);
        }
        set
    }

    /// Number of conditions in the ambient poset.
    pub fn universe_len(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, c: Cond) {
        self.0.insert(c.index());
    }

    pub fn remove(&mut self, c: Cond) {
        self.0.set(c.index(), false);
    }

    pub fn contains(&self, c: Cond) -> bool {
        self.0.contains(c.index())
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Cond> + '_ {
        self.0.ones().map(Cond::from_index)
    }

    pub fn intersects(&self, other: &CondSet) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &CondSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersect_with(&mut self, other: &CondSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn union_with(&mut self, other: &CondSet) {
        self.0.union_with(&other.0);
    }

    pub fn difference_with(&mut self, other: &CondSet) {
        self.0.difference_with(&other.0);
    }
}

impl fmt::Debug for CondSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|c| c.0)).finish()
    }
}

/// A partial function from `{0..n-1}` to `{0,1}`, the conditions of the
/// Cohen poset. `bits[i]` is `None` outside the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialFn(pub Vec<Option<bool>>);

impl PartialFn {
    pub fn domain_size(&self) -> usize {
        self.0.iter().filter(|b| b.is_some()).count()
    }

    /// `self ⊇ other` as graphs.
    pub fn extends(&self, other: &PartialFn) -> bool {
        other.0.iter().zip(&self.0).all(|(o, s)| o.is_none() || o == s)
    }

    /// HF code of the function graph: the set of Kuratowski pairs `(i, b)`.
    pub fn code(&self) -> HfSet {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.map(|b| HfSet::pair(HfSet::numeral(i), HfSet::numeral(b as usize))))
            .collect()
    }

    /// The identifier used for this condition, e.g. `{}` or `{0:1,2:0}`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.map(|b| format!("{i}:{}", b as u8)))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Extra structure remembered for posets built by the constructors, used by
/// the structured automorphism witnesses.
#[derive(Clone, Debug)]
pub enum Shape {
    Plain,
    Cohen {
        n: usize,
        funcs: Vec<PartialFn>,
    },
    /// Element `i * right.len() + j` is the pair `(i, j)`.
    Product(Box<Poset>, Box<Poset>),
}

/// A finite partial order with a greatest element and injective HF codes.
#[derive(Clone)]
pub struct Poset {
    ids: Vec<String>,
    index: HashMap<String, Cond>,
    below: Vec<CondSet>,
    above: Vec<CondSet>,
    top: Cond,
    codes: Vec<HfSet>,
    shape: Shape,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Poset")
            .field("ids", &self.ids)
            .field("top", &self.top)
            .finish_non_exhaustive()
    }
}

impl Poset {
    /// Builds a poset from its elements and generator pairs `(lower, upper)`.
    ///
    /// The reflexive-transitive closure of the generators is computed here;
    /// antisymmetry, maximality of `top` and injectivity of the codes are
    /// validated. Without explicit codes, `top` is coded as `0` and the other
    /// elements as the numerals `1, 2, ...` in declaration order.
    pub fn from_generators<S: AsRef<str>>(
        elements: &[S],
        top: &str,
        generators: &[(S, S)],
        codes: Option<Vec<HfSet>>,
    ) -> Result<Poset, OrderError> {
        let ids: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_ids(&ids)?;
        let n = ids.len();
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| OrderError::UnknownElement(s.to_string()))
        };
        let top = lookup(top)?;

        let mut below: Vec<CondSet> = (0..n).map(|i| CondSet::from_conds(n, [Cond::from_index(i)])).collect();
        for (lo, hi) in generators {
            let (lo, hi) = (lookup(lo.as_ref())?, lookup(hi.as_ref())?);
            below[hi.index()].insert(lo);
        }
        // Warshall over rows: if k ≤ i then everything below k is below i.
        for k in 0..n {
            let row_k = below[k].clone();
            for row in below.iter_mut() {
                if row.contains(Cond::from_index(k)) {
                    row.union_with(&row_k);
                }
            }
        }

        let codes = match codes {
            Some(codes) if codes.len() != n => {
                return Err(OrderError::CodeCount {
                    expected: n,
                    found: codes.len(),
                })
            }
            Some(codes) => codes,
            None => {
                let mut next = 1;
                (0..n)
                    .map(|i| {
                        if i == top.index() {
                            HfSet::empty()
                        } else {
                            next += 1;
                            HfSet::numeral(next - 1)
                        }
                    })
                    .collect()
            }
        };
        Self::finish(ids, index, below, top, codes, Shape::Plain)
    }

    fn finish(
        ids: Vec<String>,
        index: HashMap<String, Cond>,
        below: Vec<CondSet>,
        top: Cond,
        codes: Vec<HfSet>,
        shape: Shape,
    ) -> Result<Poset, OrderError> {
        let n = ids.len();
        for p in 0..n {
            for q in below[p].iter() {
                if q.index() != p && below[q.index()].contains(Cond::from_index(p)) {
                    return Err(OrderError::NotAntisymmetric(ids[q.index()].clone(), ids[p].clone()));
                }
            }
        }
        if below[top.index()].len() != n {
            let elem = (0..n)
                .find(|&i| !below[top.index()].contains(Cond::from_index(i)))
                .unwrap();
            return Err(OrderError::TopNotMaximum {
                top: ids[top.index()].clone(),
                elem: ids[elem].clone(),
            });
        }
        let mut seen: HashMap<&HfSet, usize> = HashMap::new();
        for (i, code) in codes.iter().enumerate() {
            if let Some(j) = seen.insert(code, i) {
                return Err(OrderError::CodeCollision(ids[j].clone(), ids[i].clone()));
            }
        }

        let mut above = vec![CondSet::empty(n); n];
        for (p, row) in below.iter().enumerate() {
            for q in row.iter() {
                above[q.index()].insert(Cond::from_index(p));
            }
        }
        Ok(Poset {
            ids,
            index,
            below,
            above,
            top,
            codes,
            shape,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Always false: construction rejects empty posets.
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn top(&self) -> Cond {
        self.top
    }

    pub fn conds(&self) -> impl Iterator<Item = Cond> + Clone {
        (0..self.len()).map(Cond::from_index)
    }

    pub fn id(&self, c: Cond) -> &str {
        &self.ids[c.index()]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn cond(&self, id: &str) -> Result<Cond, OrderError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| OrderError::UnknownElement(id.to_string()))
    }

    pub fn code(&self, c: Cond) -> &HfSet {
        &self.codes[c.index()]
    }

    pub fn codes(&self) -> &[HfSet] {
        &self.codes
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn empty_set(&self) -> CondSet {
        CondSet::empty(self.len())
    }

    pub fn full_set(&self) -> CondSet {
        CondSet::full(self.len())
    }

    pub fn set_of<'a, I: IntoIterator<Item = &'a str>>(&self, ids: I) -> Result<CondSet, OrderError> {
        let mut set = self.empty_set();
        for id in ids {
            set.insert(self.cond(id)?);
        }
        Ok(set)
    }

    /// `{q | q ≤ p}`.
    pub fn below(&self, p: Cond) -> &CondSet {
        &self.below[p.index()]
    }

    /// `{q | p ≤ q}`.
    pub fn above(&self, p: Cond) -> &CondSet {
        &self.above[p.index()]
    }

    /// `q ≤ p`.
    pub fn leq(&self, q: Cond, p: Cond) -> bool {
        self.below[p.index()].contains(q)
    }

    /// `q < p`.
    pub fn lt(&self, q: Cond, p: Cond) -> bool {
        q != p && self.leq(q, p)
    }

    /// Some `r` lies below both `p` and `q`.
    pub fn compatible(&self, p: Cond, q: Cond) -> bool {
        self.below(p).intersects(self.below(q))
    }

    /// Every condition has an extension in `d`.
    pub fn is_dense(&self, d: &CondSet) -> bool {
        self.conds().all(|q| self.below(q).intersects(d))
    }

    /// `∀q ≤ p ∃r (r ≤ q, r ∈ d)`.
    pub fn is_dense_below(&self, d: &CondSet, p: Cond) -> bool {
        self.below(p).iter().all(|q| self.below(q).intersects(d))
    }

    /// Every `q ≤ p` is compatible with some element of `d`.
    pub fn is_predense_below(&self, d: &CondSet, p: Cond) -> bool {
        self.below(p).iter().all(|q| d.iter().any(|r| self.compatible(q, r)))
    }

    /// `q` extends some element of `d`.
    pub fn meets(&self, q: Cond, d: &CondSet) -> bool {
        self.above(q).intersects(d)
    }

    pub fn is_minimal(&self, m: Cond) -> bool {
        self.below(m).len() == 1
    }

    pub fn minimal_elements(&self) -> CondSet {
        CondSet::from_conds(self.len(), self.conds().filter(|&m| self.is_minimal(m)))
    }

    /// `{q | q ≤ p, q minimal}`.
    pub fn minimal_below(&self, p: Cond) -> CondSet {
        let mut set = self.minimal_elements();
        set.intersect_with(self.below(p));
        set
    }

    pub fn upward_closure(&self, s: &CondSet) -> CondSet {
        let mut out = self.empty_set();
        for q in s.iter() {
            out.union_with(self.above(q));
        }
        out
    }

    /// Coordinatewise product. Codes are Kuratowski pairs of component codes.
    pub fn product(left: &Poset, right: &Poset) -> Poset {
        let (n, m) = (left.len(), right.len());
        let mut ids = Vec::with_capacity(n * m);
        let mut codes = Vec::with_capacity(n * m);
        for i in left.conds() {
            for j in right.conds() {
                ids.push(format!("({},{})", left.id(i), right.id(j)));
                codes.push(HfSet::pair(left.code(i).clone(), right.code(j).clone()));
            }
        }
        let index = index_ids(&ids).expect("pair labels of distinct ids are distinct");
        let below = left
            .conds()
            .flat_map(|i| right.conds().map(move |j| (i, j)))
            .map(|(i, j)| {
                let mut row = CondSet::empty(n * m);
                for a in left.below(i).iter() {
                    for b in right.below(j).iter() {
                        row.insert(Cond::from_index(a.index() * m + b.index()));
                    }
                }
                row
            })
            .collect();
        let top = Cond::from_index(left.top.index() * m + right.top.index());
        Self::finish(
            ids,
            index,
            below,
            top,
            codes,
            Shape::Product(Box::new(left.clone()), Box::new(right.clone())),
        )
        .expect("products of valid posets are valid")
    }

    /// Partial functions `p` from `{0..n-1}` to `{0,1}` with `|dom(p)| < n`,
    /// ordered by reverse inclusion, with the empty function on top.
    pub fn cohen(n: usize) -> Result<Poset, OrderError> {
        if n == 0 {
            return Err(OrderError::ZeroCohen);
        }
        if n > 6 {
            return Err(OrderError::CohenTooLarge(n));
        }
        let mut funcs = Vec::new();
        // Each position is undefined, 0 or 1.
        for mut word in 0..3usize.pow(n as u32) {
            let mut f = Vec::with_capacity(n);
            for _ in 0..n {
                f.push(match word % 3 {
                    0 => None,
                    1 => Some(false),
                    _ => Some(true),
                });
                word /= 3;
            }
            let f = PartialFn(f);
            if f.domain_size() < n {
                funcs.push(f);
            }
        }
        funcs.sort_by_key(|f| (f.domain_size(), f.label()));

        let ids: Vec<String> = funcs.iter().map(PartialFn::label).collect();
        let index = index_ids(&ids)?;
        let len = funcs.len();
        let below = funcs
            .iter()
            .map(|p| {
                CondSet::from_conds(
                    len,
                    funcs
                        .iter()
                        .enumerate()
                        .filter(|(_, q)| q.extends(p))
                        .map(|(i, _)| Cond::from_index(i)),
                )
            })
            .collect();
        let codes = funcs.iter().map(PartialFn::code).collect();
        Self::finish(ids, index, below, Cond(0), codes, Shape::Cohen { n, funcs })
    }

    /// The one-point poset `{top}`.
    pub fn trivial() -> Poset {
        Self::from_generators::<&str>(&["top"], "top", &[], None).unwrap()
    }
}

fn index_ids(ids: &[String]) -> Result<HashMap<String, Cond>, OrderError> {
    if ids.is_empty() {
        return Err(OrderError::Empty);
    }
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), Cond::from_index(i)).is_some() {
            return Err(OrderError::DuplicateElement(id.clone()));
        }
    }
    Ok(index)
}
