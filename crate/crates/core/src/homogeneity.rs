//! Automorphisms of finite posets and weak homogeneity.
//!
//! A poset is weakly homogeneous when for all `p, q` some automorphism `π`
//! makes `π(p)` compatible with `q`. Cohen posets and their products have
//! explicit witnesses; other posets fall back to enumerating automorphisms.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::forcing::GenericFilter;
use crate::order::{Cond, PartialFn, Poset, Shape};

/// Largest poset for which all automorphisms are enumerated by default.
pub const ENUMERATION_CAP: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomogeneityError {
    #[error("the poset is not a Cohen poset")]
    NotCohen,
    #[error("the poset is not a product of a poset with itself")]
    NotSquare,
    #[error("position {pos} is out of range for Cohen({n})")]
    BadPosition { pos: usize, n: usize },
    #[error("{size} elements exceed the automorphism enumeration cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("no automorphism moves `{p}` to a condition compatible with `{q}`")]
    Uncovered { p: String, q: String },
    #[error("the image of the generic is not generic")]
    NotGeneric,
}

/// How an automorphism was built, printed in witness lines.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Descriptor {
    Identity,
    /// Moves position `i` to `perm[i]`, then flips the positions in `mask`.
    Cohen {
        perm: Vec<usize>,
        mask: Vec<usize>,
    },
    Swap,
    Product(Box<Descriptor>, Box<Descriptor>),
    /// Found by enumeration; the number is its position in the enumeration.
    Enumerated(usize),
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Identity => write!(f, "id"),
            Descriptor::Cohen { perm, mask } => {
                let moved = perm.iter().enumerate().any(|(i, &j)| i != j);
                if moved {
                    write!(f, "perm[{}]", perm.iter().join(","))?;
                }
                if !mask.is_empty() || !moved {
                    if moved {
                        write!(f, "+")?;
                    }
                    write!(f, "flip{{{}}}", mask.iter().join(","))?;
                }
                Ok(())
            }
            Descriptor::Swap => write!(f, "swap"),
            Descriptor::Product(l, r) => write!(f, "({l})x({r})"),
            Descriptor::Enumerated(i) => write!(f, "aut#{i}"),
        }
    }
}

/// A bijection on the conditions of one poset, with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetAutomorphism {
    map: Vec<Cond>,
    descriptor: Descriptor,
}

impl PosetAutomorphism {
    pub fn identity(poset: &Poset) -> Self {
        PosetAutomorphism {
            map: poset.conds().collect(),
            descriptor: Descriptor::Identity,
        }
    }

    /// Wraps a map after checking that it is an automorphism.
    pub fn from_map(poset: &Poset, map: Vec<Cond>) -> Option<Self> {
        is_automorphism(poset, &map).then_some(PosetAutomorphism {
            map,
            descriptor: Descriptor::Enumerated(0),
        })
    }

    pub fn apply(&self, c: Cond) -> Cond {
        self.map[c.index()]
    }

    /// `map[i]` is the image of the `i`-th condition.
    pub fn map(&self) -> &[Cond] {
        &self.map
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PosetAutomorphism) -> PosetAutomorphism {
        PosetAutomorphism {
            map: other.map.iter().map(|&c| self.apply(c)).collect(),
            descriptor: Descriptor::Enumerated(0),
        }
    }

    pub fn inverse(&self) -> PosetAutomorphism {
        let mut map = self.map.clone();
        for (i, &c) in self.map.iter().enumerate() {
            map[c.index()] = Cond::from_index(i);
        }
        PosetAutomorphism {
            map,
            descriptor: Descriptor::Enumerated(0),
        }
    }

    /// Whether the two maps agree pointwise.
    pub fn same_map(&self, other: &PosetAutomorphism) -> bool {
        self.map == other.map
    }
}

/// A bijection that preserves and reflects the order and fixes the top.
pub fn is_automorphism(poset: &Poset, map: &[Cond]) -> bool {
    let n = poset.len();
    if map.len() != n || map.iter().any(|c| c.index() >= n) || map[poset.top().index()] != poset.top() {
        return false;
    }
    if map.iter().sorted().dedup().count() != n {
        return false;
    }
    poset.conds().all(|x| {
        poset
            .conds()
            .all(|y| poset.leq(x, y) == poset.leq(map[x.index()], map[y.index()]))
    })
}

/// Every automorphism, identity first, in lexicographic order of maps.
/// Refuses posets with more than `cap` elements.
pub fn enumerate_automorphisms(poset: &Poset, cap: usize) -> Result<Vec<PosetAutomorphism>, HomogeneityError> {
    let n = poset.len();
    if n > cap {
        return Err(HomogeneityError::CapExceeded { size: n, cap });
    }
    let profile = |c: Cond| (poset.below(c).len(), poset.above(c).len());
    let mut out = Vec::new();
    let mut map: Vec<Cond> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    extend_partial(poset, &profile, &mut map, &mut used, &mut out);
    Ok(out
        .into_iter()
        .enumerate()
        .map(|(i, map)| PosetAutomorphism {
            map,
            descriptor: if i == 0 {
                Descriptor::Identity
            } else {
                Descriptor::Enumerated(i)
            },
        })
        .collect())
}

fn extend_partial(
    poset: &Poset,
    profile: &dyn Fn(Cond) -> (usize, usize),
    map: &mut Vec<Cond>,
    used: &mut [bool],
    out: &mut Vec<Vec<Cond>>,
) {
    let k = map.len();
    if k == poset.len() {
        debug_assert!(is_automorphism(poset, map));
        out.push(map.clone());
        return;
    }
    let x = Cond::from_index(k);
    for img in poset.conds() {
        if used[img.index()] || profile(img) != profile(x) {
            continue;
        }
        let consistent = (0..k).map(Cond::from_index).all(|y| {
            let fy = map[y.index()];
            poset.leq(x, y) == poset.leq(img, fy) && poset.leq(y, x) == poset.leq(fy, img)
        });
        if consistent {
            used[img.index()] = true;
            map.push(img);
            extend_partial(poset, profile, map, used, out);
            map.pop();
            used[img.index()] = false;
        }
    }
}

fn cohen_parts(poset: &Poset) -> Result<(usize, &[PartialFn]), HomogeneityError> {
    match poset.shape() {
        Shape::Cohen { n, funcs } => Ok((*n, funcs)),
        _ => Err(HomogeneityError::NotCohen),
    }
}

/// On a Cohen poset: move position `i` to `perm[i]`, then flip the value at
/// every position in `mask`.
pub fn cohen_automorphism(
    poset: &Poset,
    perm: &[usize],
    mask: &[usize],
) -> Result<PosetAutomorphism, HomogeneityError> {
    let (n, funcs) = cohen_parts(poset)?;
    if let Some(&pos) = perm.iter().chain(mask).find(|&&pos| pos >= n) {
        return Err(HomogeneityError::BadPosition { pos, n });
    }
    assert!(
        perm.len() == n && perm.iter().all_unique(),
        "position map must be a permutation of 0..{n}"
    );
    let map = funcs
        .iter()
        .map(|f| {
            let mut g = vec![None; n];
            for (i, v) in f.0.iter().enumerate() {
                g[perm[i]] = v.map(|b| b != mask.contains(&perm[i]));
            }
            poset
                .cond(&PartialFn(g).label())
                .expect("the image has the same domain size")
        })
        .collect();
    let mut mask = mask.to_vec();
    mask.sort_unstable();
    mask.dedup();
    Ok(PosetAutomorphism {
        map,
        descriptor: Descriptor::Cohen {
            perm: perm.to_vec(),
            mask,
        },
    })
}

/// Flips the value of every condition at the positions in `mask`.
pub fn bit_flip_automorphism(poset: &Poset, mask: &[usize]) -> Result<PosetAutomorphism, HomogeneityError> {
    let (n, _) = cohen_parts(poset)?;
    let perm: Vec<usize> = (0..n).collect();
    cohen_automorphism(poset, &perm, mask)
}

/// `(x, y) ↦ (y, x)` on a product of a poset with itself.
pub fn swap_automorphism(poset: &Poset) -> Result<PosetAutomorphism, HomogeneityError> {
    let Shape::Product(left, right) = poset.shape() else {
        return Err(HomogeneityError::NotSquare);
    };
    if left.ids() != right.ids() {
        return Err(HomogeneityError::NotSquare);
    }
    let m = left.len();
    let map = poset
        .conds()
        .map(|c| Cond::from_index((c.index() % m) * m + c.index() / m))
        .collect();
    Ok(PosetAutomorphism {
        map,
        descriptor: Descriptor::Swap,
    })
}

/// Acts as `l` on the first coordinate and as `r` on the second.
pub fn product_automorphism(
    poset: &Poset,
    l: &PosetAutomorphism,
    r: &PosetAutomorphism,
) -> Result<PosetAutomorphism, HomogeneityError> {
    let Shape::Product(left, right) = poset.shape() else {
        return Err(HomogeneityError::NotSquare);
    };
    assert_eq!((l.map.len(), r.map.len()), (left.len(), right.len()));
    let m = right.len();
    let map = poset
        .conds()
        .map(|c| {
            let (i, j) = (c.index() / m, c.index() % m);
            Cond::from_index(l.map[i].index() * m + r.map[j].index())
        })
        .collect();
    Ok(PosetAutomorphism {
        map,
        descriptor: Descriptor::Product(Box::new(l.descriptor.clone()), Box::new(r.descriptor.clone())),
    })
}

/// Domain-aligning permutation and flip mask for `p, q` in Cohen(n).
///
/// The positions defined in both stay put; the rest of `dom(p)` is paired
/// with the rest of `dom(q)` in increasing order, so the image of `dom(p)`
/// contains `dom(q)` or is contained in it. The mask then makes the image of
/// `p` agree with `q` wherever both are defined.
fn cohen_witness_parts(n: usize, p: &PartialFn, q: &PartialFn) -> (Vec<usize>, Vec<usize>) {
    let in_p = |i: usize| p.0[i].is_some();
    let in_q = |i: usize| q.0[i].is_some();
    let mut perm = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for i in (0..n).filter(|&i| in_p(i) && in_q(i)) {
        perm[i] = i;
        taken[i] = true;
    }
    let only_p = (0..n).filter(|&i| in_p(i) && !in_q(i)).collect_vec();
    let only_q = (0..n).filter(|&i| in_q(i) && !in_p(i)).collect_vec();
    for (&i, &j) in only_p.iter().zip(&only_q) {
        perm[i] = j;
        taken[j] = true;
    }
    // Complete to a bijection; unpaired positions of dom(p) go before the rest.
    let rest_src = only_p
        .iter()
        .skip(only_q.len())
        .copied()
        .chain((0..n).filter(|&i| !in_p(i)))
        .collect_vec();
    let free = (0..n)
        .filter(|&j| !taken[j] && !in_q(j))
        .chain((0..n).filter(|&j| !taken[j] && in_q(j)))
        .collect_vec();
    for (i, j) in rest_src.into_iter().zip(free) {
        perm[i] = j;
    }
    let mask = (0..n)
        .filter(|&i| in_p(i))
        .filter(|&i| matches!((p.0[i], q.0[perm[i]]), (Some(a), Some(b)) if a != b))
        .map(|i| perm[i])
        .sorted()
        .collect_vec();
    (perm, mask)
}

/// A witness for the pair `(p, q)`: an automorphism with `π(p)` compatible
/// with `q`. Cohen posets and products get explicit witnesses; other posets
/// use `automorphisms` (typically from [`enumerate_automorphisms`]).
pub fn homogeneity_witness(
    poset: &Poset,
    p: Cond,
    q: Cond,
    automorphisms: &mut WitnessCache,
) -> Result<PosetAutomorphism, HomogeneityError> {
    let uncovered = || HomogeneityError::Uncovered {
        p: poset.id(p).to_string(),
        q: poset.id(q).to_string(),
    };
    let pi = match poset.shape() {
        Shape::Cohen { n, funcs } => {
            let (perm, mask) = cohen_witness_parts(*n, &funcs[p.index()], &funcs[q.index()]);
            cohen_automorphism(poset, &perm, &mask)?
        }
        Shape::Product(left, right) => {
            let m = right.len();
            let (p1, p2) = (Cond::from_index(p.index() / m), Cond::from_index(p.index() % m));
            let (q1, q2) = (Cond::from_index(q.index() / m), Cond::from_index(q.index() % m));
            let l = homogeneity_witness(left, p1, q1, automorphisms.child(0))?;
            let r = homogeneity_witness(right, p2, q2, automorphisms.child(1))?;
            product_automorphism(poset, &l, &r)?
        }
        Shape::Plain => automorphisms
            .list(poset)?
            .iter()
            .find(|pi| poset.compatible(pi.apply(p), q))
            .cloned()
            .ok_or_else(uncovered)?,
    };
    if poset.compatible(pi.apply(p), q) {
        Ok(pi)
    } else {
        Err(uncovered())
    }
}

/// Enumerated automorphisms of plain posets, computed once per factor.
#[derive(Debug, Default)]
pub struct WitnessCache {
    cap: usize,
    list: Option<Vec<PosetAutomorphism>>,
    children: Vec<WitnessCache>,
}

impl WitnessCache {
    pub fn new(cap: usize) -> Self {
        WitnessCache {
            cap,
            list: None,
            children: Vec::new(),
        }
    }

    fn list(&mut self, poset: &Poset) -> Result<&[PosetAutomorphism], HomogeneityError> {
        if self.list.is_none() {
            self.list = Some(enumerate_automorphisms(poset, self.cap)?);
        }
        Ok(self.list.as_deref().expect("just filled"))
    }

    fn child(&mut self, i: usize) -> &mut WitnessCache {
        while self.children.len() <= i {
            self.children.push(WitnessCache::new(self.cap));
        }
        &mut self.children[i]
    }
}

/// One row per ordered pair of conditions.
#[derive(Clone, Debug)]
pub struct WitnessTable {
    pub rows: Vec<(String, String, Descriptor)>,
}

impl fmt::Display for WitnessTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, q, d) in &self.rows {
            writeln!(f, "WITNESS p={p} q={q} pi={d}")?;
        }
        Ok(())
    }
}

/// Finds a witness for every ordered pair and checks each distinct witness
/// to be an automorphism.
pub fn check_weak_homogeneity(poset: &Poset, cap: usize) -> Result<WitnessTable, HomogeneityError> {
    let mut cache = WitnessCache::new(cap);
    let mut checked: HashMap<Descriptor, bool> = HashMap::new();
    let mut rows = Vec::with_capacity(poset.len() * poset.len());
    for p in poset.conds() {
        for q in poset.conds() {
            let pi = homogeneity_witness(poset, p, q, &mut cache)?;
            let ok = *checked
                .entry(pi.descriptor.clone())
                .or_insert_with(|| is_automorphism(poset, &pi.map));
            if !ok {
                return Err(HomogeneityError::Uncovered {
                    p: poset.id(p).to_string(),
                    q: poset.id(q).to_string(),
                });
            }
            rows.push((poset.id(p).to_string(), poset.id(q).to_string(), pi.descriptor));
        }
    }
    Ok(WitnessTable { rows })
}

/// The pointwise image `π[G]`, checked to be generic.
pub fn transported_generic(
    poset: &Poset,
    pi: &PosetAutomorphism,
    g: &GenericFilter,
) -> Result<GenericFilter, HomogeneityError> {
    let image = crate::order::CondSet::from_conds(poset.len(), g.members().iter().map(|c| pi.apply(c)));
    GenericFilter::new(poset, image).ok_or(HomogeneityError::NotGeneric)
}
