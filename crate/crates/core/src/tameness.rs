//! Pretameness, predense partitions, tameness and distributivity.
//!
//! On a finite poset every property here holds; the checkers search for the
//! witnesses the definitions ask for and validate them against the
//! definitions as stated.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;
use thiserror::Error;

use crate::forcing::{enumerate_generics, GenericFilter};
use crate::order::{Cond, CondSet, Poset};
use crate::report::{Report, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TameError {
    #[error("set {index} of the sequence is not dense")]
    NotDense { index: usize },
    #[error("partition {index} is not predense below `{anchor}`")]
    NotPredense { index: usize, anchor: String },
    #[error("partition {index} has compatible conditions `{left}` and `{right}` on opposite sides")]
    Compatible { index: usize, left: String, right: String },
    #[error("the generic does not contain the anchor `{0}`")]
    AnchorNotInGeneric(String),
    #[error("the generic meets neither side of partition {index}")]
    Uncovered { index: usize },
    #[error("too many candidates to enumerate ({size}, cap {cap})")]
    CapExceeded { size: u128, cap: u128 },
    #[error("sequence length must be positive")]
    ZeroLength,
}

/// `q` extends an element of `d`.
pub fn meets(poset: &Poset, q: Cond, d: &CondSet) -> bool {
    poset.meets(q, d)
}

/// `⟨D_i | i < n⟩`, each `D_i` dense.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseSequence {
    sets: Vec<CondSet>,
}

impl DenseSequence {
    pub fn new(poset: &Poset, sets: Vec<CondSet>) -> Result<Self, TameError> {
        match sets.iter().position(|d| !poset.is_dense(d)) {
            Some(index) => Err(TameError::NotDense { index }),
            None => Ok(DenseSequence { sets }),
        }
    }

    pub fn sets(&self) -> &[CondSet] {
        &self.sets
    }
}

/// A pretameness witness: `q ≤ p` and `d_i ⊆ D_i`, each `d_i` predense below `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PretameWitness {
    pub q: Cond,
    pub d: Vec<CondSet>,
}

/// Checks a proposed pretameness witness against the definition.
pub fn validate_pretame(poset: &Poset, seq: &DenseSequence, p: Cond, w: &PretameWitness) -> bool {
    poset.leq(w.q, p)
        && w.d.len() == seq.sets.len()
        && w.d
            .iter()
            .zip(&seq.sets)
            .all(|(d, big)| d.is_subset(big) && poset.is_predense_below(d, w.q))
}

/// Searches `q = p` first, then the conditions strictly below `p` in
/// declaration order, taking `d_i = D_i`.
pub fn check_pretame(poset: &Poset, seq: &DenseSequence, p: Cond) -> Option<PretameWitness> {
    let candidates = std::iter::once(p).chain(poset.below(p).iter().filter(move |&q| q != p));
    candidates
        .map(|q| PretameWitness { q, d: seq.sets.clone() })
        .find(|w| validate_pretame(poset, seq, p, w))
}

/// A pair `(D_0, D_1)` whose sides are pairwise incompatible.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    pub d0: CondSet,
    pub d1: CondSet,
}

impl Partition {
    fn incompatible_sides(&self, poset: &Poset) -> Option<(Cond, Cond)> {
        self.d0
            .iter()
            .cartesian_product(self.d1.iter().collect_vec())
            .find(|&(x, y)| poset.compatible(x, y))
    }

    fn is_predense_below(&self, poset: &Poset, p: Cond) -> bool {
        let mut both = self.d0.clone();
        both.union_with(&self.d1);
        poset.is_predense_below(&both, p)
    }
}

/// A sequence of predense partitions below an anchor condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSequence {
    anchor: Cond,
    parts: Vec<Partition>,
}

impl PartitionSequence {
    pub fn new(poset: &Poset, anchor: Cond, parts: Vec<Partition>) -> Result<Self, TameError> {
        for (index, part) in parts.iter().enumerate() {
            if let Some((x, y)) = part.incompatible_sides(poset) {
                return Err(TameError::Compatible {
                    index,
                    left: poset.id(x).to_string(),
                    right: poset.id(y).to_string(),
                });
            }
            if !part.is_predense_below(poset, anchor) {
                return Err(TameError::NotPredense {
                    index,
                    anchor: poset.id(anchor).to_string(),
                });
            }
        }
        Ok(PartitionSequence { anchor, parts })
    }

    pub fn anchor(&self) -> Cond {
        self.anchor
    }

    pub fn parts(&self) -> &[Partition] {
        &self.parts
    }
}

/// `f(i) = 0` iff `G` meets `D_0^i`, else `1`.
pub fn associated_function(poset: &Poset, seq: &PartitionSequence, g: &GenericFilter) -> Result<Vec<u8>, TameError> {
    if !g.contains(seq.anchor) {
        return Err(TameError::AnchorNotInGeneric(poset.id(seq.anchor).to_string()));
    }
    seq.parts
        .iter()
        .enumerate()
        .map(|(index, part)| {
            if g.members().intersects(&part.d0) {
                Ok(0)
            } else if g.members().intersects(&part.d1) {
                Ok(1)
            } else {
                Err(TameError::Uncovered { index })
            }
        })
        .collect()
}

fn meets_set(poset: &Poset, d: &CondSet) -> CondSet {
    CondSet::from_conds(poset.len(), poset.conds().filter(|&q| poset.meets(q, d)))
}

/// `{q | q meets D_0 ↔ q meets E_0}` is dense below `p`, given the sets of
/// conditions meeting each side.
fn agree_densely(poset: &Poset, meets_d: &CondSet, meets_e: &CondSet, p: Cond) -> bool {
    let agree = CondSet::from_conds(
        poset.len(),
        poset.conds().filter(|&q| meets_d.contains(q) == meets_e.contains(q)),
    );
    poset.is_dense_below(&agree, p)
}

/// For each index, `{q | q meets D_0^i ↔ q meets E_0^i}` is dense below `p`.
pub fn partitions_equivalent(poset: &Poset, d: &PartitionSequence, e: &PartitionSequence, p: Cond) -> bool {
    d.parts.len() == e.parts.len()
        && d.parts
            .iter()
            .zip(&e.parts)
            .all(|(x, y)| agree_densely(poset, &meets_set(poset, &x.d0), &meets_set(poset, &y.d0), p))
}

/// Conditions whose code has rank below `alpha`.
pub fn fragment(poset: &Poset, alpha: u32) -> CondSet {
    CondSet::from_conds(poset.len(), poset.conds().filter(|&c| poset.code(c).rank() < alpha))
}

/// The least `alpha` whose fragment is the whole poset.
pub fn alpha_max(poset: &Poset) -> u32 {
    poset.codes().iter().map(|c| c.rank()).max().unwrap_or(0) + 1
}

/// All partitions with both sides inside `within`.
fn partitions_within(poset: &Poset, within: &CondSet, cap: u128) -> Result<Vec<Partition>, TameError> {
    let elems: Vec<Cond> = within.iter().collect();
    let size = 3u128.checked_pow(elems.len() as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(TameError::CapExceeded { size, cap });
    }
    let mut out = Vec::new();
    for code in 0..size as u64 {
        let (mut d0, mut d1) = (poset.empty_set(), poset.empty_set());
        let mut c = code;
        for &x in &elems {
            match c % 3 {
                1 => d0.insert(x),
                2 => d1.insert(x),
                _ => {}
            }
            c /= 3;
        }
        let part = Partition { d0, d1 };
        if part.incompatible_sides(poset).is_none() {
            out.push(part);
        }
    }
    Ok(out)
}

/// All downward closed subsets of the poset.
pub fn downsets(poset: &Poset, cap: u128) -> Result<Vec<CondSet>, TameError> {
    // Conditions with fewer predecessors first: a linear extension.
    let mut order: Vec<Cond> = poset.conds().collect();
    order.sort_by_key(|&c| poset.below(c).len());
    let strictly_below: Vec<CondSet> = order
        .iter()
        .map(|&c| {
            let mut b = poset.below(c).clone();
            b.remove(c);
            b
        })
        .collect();
    let mut out = Vec::new();
    let mut current = poset.empty_set();
    extend_downsets(&order, &strictly_below, 0, &mut current, &mut out, cap)?;
    Ok(out)
}

fn extend_downsets(
    order: &[Cond],
    strictly_below: &[CondSet],
    i: usize,
    current: &mut CondSet,
    out: &mut Vec<CondSet>,
    cap: u128,
) -> Result<(), TameError> {
    if i == order.len() {
        out.push(current.clone());
        if out.len() as u128 > cap {
            return Err(TameError::CapExceeded {
                size: out.len() as u128,
                cap,
            });
        }
        return Ok(());
    }
    extend_downsets(order, strictly_below, i + 1, current, out, cap)?;
    if strictly_below[i].is_subset(current) {
        current.insert(order[i]);
        extend_downsets(order, strictly_below, i + 1, current, out, cap)?;
        current.remove(order[i]);
    }
    Ok(())
}

/// The meets-sets `↓D_0` of all partitions predense below `q`.
///
/// `↓D_0` is a downward closed set `X`, and `D_1` can be no larger than
/// `Inc(X)`, the conditions incompatible with all of `X`. Predensity only
/// grows with `D_1`, so `X` occurs exactly when `X ∪ Inc(X)` is predense
/// below `q`.
fn downset_meets(poset: &Poset, downs: &[CondSet], q: Cond) -> Vec<CondSet> {
    downs
        .iter()
        .filter(|x| {
            let mut both = (*x).clone();
            both.union_with(&CondSet::from_conds(
                poset.len(),
                poset.conds().filter(|&y| !poset.below(y).intersects(x)),
            ));
            poset.is_predense_below(&both, q)
        })
        .cloned()
        .collect()
}

/// How the tameness clause was confirmed for a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validation {
    /// Every pair of subsets of the poset was tried as a partition.
    Enumerated,
    /// Every downward closed `D_0` was tried with the largest admissible `D_1`.
    /// Incompatibility, predensity and the meets relation only see downward
    /// closures, so this covers every partition.
    DownwardClosed,
    /// Only the reduction to minimal elements was checked; both enumerations
    /// exceeded the cap.
    Reduced,
}

/// A tameness witness for an index set of size `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TameWitness {
    pub q: Cond,
    pub alpha: u32,
}

/// The tameness clause for `(q, alpha)`, checked as stated: for every
/// sequence of `a` predense partitions below `q`, the set of `r` such that the
/// sequence is equivalent below `r` to a sequence of predense partitions below
/// `r` with all parts in the rank-`alpha` fragment is dense below `q`.
///
/// Candidate partitions for the sequence are all pairs of subsets when there
/// are at most `cap` of them, otherwise one partition per downward closed
/// subset. Fragment partitions are always enumerated in full.
pub fn validate_tame_verbatim(
    poset: &Poset,
    a: usize,
    q: Cond,
    alpha: u32,
    cap: u128,
) -> Result<(bool, Validation), TameError> {
    let (d_meets, how): (Vec<CondSet>, Validation) = match partitions_within(poset, &poset.full_set(), cap) {
        Ok(all) => (
            all.iter()
                .filter(|d| d.is_predense_below(poset, q))
                .map(|d| meets_set(poset, &d.d0))
                .collect(),
            Validation::Enumerated,
        ),
        Err(TameError::CapExceeded { .. }) => (
            downset_meets(poset, &downsets(poset, cap)?, q),
            Validation::DownwardClosed,
        ),
        Err(e) => return Err(e),
    };
    let small = partitions_within(poset, &fragment(poset, alpha), cap)?;
    let below_q: Vec<Cond> = poset.below(q).iter().collect();

    // For each r ≤ q, the distinct meets-sets of fragment partitions predense below r.
    let e_meets: Vec<(Cond, HashSet<CondSet>)> = below_q
        .iter()
        .map(|&r| {
            let sets = small
                .iter()
                .filter(|e| e.is_predense_below(poset, r))
                .map(|e| meets_set(poset, &e.d0))
                .collect();
            (r, sets)
        })
        .collect();

    // The r ≤ q at which a partition has an equivalent fragment partition
    // depends only on which conditions meet its D_0.
    let mut good_by_meets: HashMap<CondSet, CondSet> = HashMap::new();
    let mut good_sets: HashSet<CondSet> = HashSet::new();
    for md in d_meets {
        let good = good_by_meets.entry(md).or_insert_with_key(|md| {
            CondSet::from_conds(
                poset.len(),
                e_meets
                    .iter()
                    .filter(|(r, sets)| sets.iter().any(|me| agree_densely(poset, md, me, *r)))
                    .map(|&(r, _)| r),
            )
        });
        good_sets.insert(good.clone());
    }

    // A sequence works at r iff each of its partitions does.
    let good_sets: Vec<CondSet> = good_sets.into_iter().collect();
    let size = (good_sets.len() as u128).checked_pow(a as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(TameError::CapExceeded { size, cap });
    }
    let holds = (0..a).map(|_| good_sets.iter()).multi_cartesian_product().all(|seq| {
        let mut good = poset.full_set();
        for s in seq {
            good.intersect_with(s);
        }
        poset.is_dense_below(&good, q)
    });
    Ok((holds, how))
}

/// The tameness clause for `(q, alpha)` through its finite reduction: every
/// `q' ≤ q` lies above a minimal condition that lies below some member of the
/// rank-`alpha` fragment.
pub fn validate_tame_reduced(poset: &Poset, a: usize, q: Cond, alpha: u32) -> bool {
    if a == 0 {
        return true;
    }
    let f = fragment(poset, alpha);
    let good = CondSet::from_conds(
        poset.len(),
        poset
            .minimal_elements()
            .iter()
            .filter(|&m| poset.above(m).intersects(&f)),
    );
    poset.is_dense_below(&good, q)
}

/// Result of the tameness search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TameOutcome {
    pub witness: TameWitness,
    pub validation: Validation,
}

/// Searches `q = p` first, then the conditions strictly below `p` in
/// declaration order, and for each `q` ascends `alpha` from 1 up to
/// [`alpha_max`]; returns the first witness, validated against the
/// definition when the enumeration fits under `cap`.
pub fn check_tame(poset: &Poset, a: usize, p: Cond, cap: u128) -> Result<Option<TameOutcome>, TameError> {
    let top_alpha = alpha_max(poset);
    let candidates = std::iter::once(p).chain(poset.below(p).iter().filter(|&q| q != p));
    for q in candidates {
        for alpha in 1..=top_alpha {
            if !validate_tame_reduced(poset, a, q, alpha) {
                continue;
            }
            let validation = match validate_tame_verbatim(poset, a, q, alpha, cap) {
                Ok((true, how)) => how,
                Ok((false, _)) => continue,
                Err(TameError::CapExceeded { .. }) => Validation::Reduced,
                Err(e) => return Err(e),
            };
            return Ok(Some(TameOutcome {
                witness: TameWitness { q, alpha },
                validation,
            }));
        }
    }
    Ok(None)
}

/// For every `p` and every `beta` dense sets, some `q ≤ p` meets all of them.
/// Dense sets are enumerated from all subsets; `cap` bounds the number of
/// sequences examined.
pub fn check_distributive(poset: &Poset, beta: usize, cap: u128) -> Result<bool, TameError> {
    if beta == 0 {
        return Err(TameError::ZeroLength);
    }
    let n = poset.len();
    let subsets = 1u128.checked_shl(n as u32).unwrap_or(u128::MAX);
    if subsets > cap {
        return Err(TameError::CapExceeded { size: subsets, cap });
    }
    let dense: Vec<CondSet> = (0..subsets as u64)
        .map(|mask| CondSet::from_conds(n, (0..n).filter(|i| mask >> i & 1 == 1).map(Cond::from_index)))
        .filter(|d| poset.is_dense(d))
        .collect();
    let size = multisets(dense.len() as u128, beta as u128);
    if size > cap {
        return Err(TameError::CapExceeded { size, cap });
    }
    for seq in dense.iter().combinations_with_replacement(beta) {
        let met = CondSet::from_conds(n, poset.conds().filter(|&q| seq.iter().all(|d| poset.meets(q, d))));
        if !poset.conds().all(|p| poset.below(p).intersects(&met)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Number of multisets of size `k` from `n` kinds, saturating.
fn multisets(n: u128, k: u128) -> u128 {
    if n == 0 {
        return u128::from(k == 0);
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n + i) / (i + 1);
    }
    acc
}

/// When the poset is `beta`-distributive, every `p` and every index set of
/// size below `beta` has a tameness witness.
pub fn check_distributive_implies_tame(poset: &Poset, beta: usize, cap: u128) -> Result<Report, TameError> {
    let mut report = Report::new();
    if !check_distributive(poset, beta, cap)? {
        return Ok(report);
    }
    for p in poset.conds() {
        for a in 0..beta {
            if check_tame(poset, a, p, cap)?.is_none() {
                report.push(Violation {
                    lemma: "distributive-implies-tame",
                    p: poset.id(p).to_string(),
                    phi: format!("|a|={a}"),
                    generic: None,
                });
            }
        }
    }
    Ok(report)
}

/// Associated functions of two sequences agree on every generic through `p`.
pub fn functions_agree(
    poset: &Poset,
    d: &PartitionSequence,
    e: &PartitionSequence,
    p: Cond,
) -> Result<bool, TameError> {
    for g in enumerate_generics(poset).iter().filter(|g| g.contains(p)) {
        let anchored = |s: &PartitionSequence| PartitionSequence {
            anchor: p,
            parts: s.parts.clone(),
        };
        if associated_function(poset, &anchored(d), g)? != associated_function(poset, &anchored(e), g)? {
            return Ok(false);
        }
    }
    Ok(true)
}
