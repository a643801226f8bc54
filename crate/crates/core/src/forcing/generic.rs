use std::fmt;

use crate::forcing::ForcingError;
use crate::order::{Cond, CondSet, Poset};

/// A compatible, upward closed set of conditions meeting every dense set.
///
/// Over a finite poset every generic filter is the upward closure of a single
/// minimal element, which is also its least element.
#[derive(Clone, PartialEq, Eq)]
pub struct GenericFilter {
    members: CondSet,
    least: Cond,
}

impl GenericFilter {
    pub fn members(&self) -> &CondSet {
        &self.members
    }

    pub fn least(&self) -> Cond {
        self.least
    }

    pub fn contains(&self, p: Cond) -> bool {
        self.members.contains(p)
    }

    /// Wraps `members` after checking that it is generic.
    pub fn new(poset: &Poset, members: CondSet) -> Option<GenericFilter> {
        if !is_generic(poset, &members) {
            return None;
        }
        let least = members.iter().find(|&m| members.iter().all(|q| poset.leq(m, q)))?;
        Some(GenericFilter { members, least })
    }
}

impl fmt::Debug for GenericFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GenericFilter({:?})", self.members)
    }
}

/// The upward closures of the minimal elements, in declaration order.
pub fn enumerate_generics(poset: &Poset) -> Vec<GenericFilter> {
    poset
        .minimal_elements()
        .iter()
        .map(|m| {
            let members = poset.upward_closure(&CondSet::from_conds(poset.len(), [m]));
            debug_assert!(is_generic(poset, &members));
            GenericFilter { members, least: m }
        })
        .collect()
}

fn is_filter(poset: &Poset, s: &CondSet) -> bool {
    let compatible = s.iter().all(|p| s.iter().all(|q| poset.compatible(p, q)));
    compatible && poset.upward_closure(s) == *s
}

/// Compatible, upward closed, and meets every dense set.
///
/// Every dense set contains all minimal elements and the minimal elements
/// form a dense set, so meeting every dense set is the same as containing a
/// minimal element.
pub fn is_generic(poset: &Poset, s: &CondSet) -> bool {
    is_filter(poset, s) && s.intersects(&poset.minimal_elements())
}

/// [`is_generic`] with the density clause checked against every dense subset
/// of the poset, enumerated explicitly. Refuses posets above `cap` elements.
pub fn is_generic_exhaustive(poset: &Poset, s: &CondSet, cap: usize) -> Result<bool, ForcingError> {
    let n = poset.len();
    if n > cap || n >= usize::BITS as usize {
        return Err(ForcingError::CapExceeded { size: n, cap });
    }
    if !is_filter(poset, s) {
        return Ok(false);
    }
    for mask in 0..(1usize << n) {
        let d = CondSet::from_conds(n, (0..n).filter(|i| mask >> i & 1 == 1).map(Cond::from_index));
        if poset.is_dense(&d) && !s.intersects(&d) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1() -> Poset {
        Poset::from_generators(&["top", "a", "b"], "top", &[("a", "top"), ("b", "top")], None).unwrap()
    }

    #[test]
    fn generics_of_small_posets() {
        let p = f1();
        let gs = enumerate_generics(&p);
        let members: Vec<CondSet> = gs.iter().map(|g| g.members().clone()).collect();
        assert_eq!(
            members,
            [p.set_of(["a", "top"]).unwrap(), p.set_of(["b", "top"]).unwrap()]
        );
        assert_eq!(enumerate_generics(&Poset::cohen(2).unwrap()).len(), 4);
        let t = Poset::trivial();
        let gs = enumerate_generics(&t);
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].members(), &t.full_set());
    }

    #[test]
    fn generic_checks() {
        let p = f1();
        for (ids, expected) in [
            (&["a", "top"][..], true),
            (&["top"][..], false),
            (&["a", "b", "top"][..], false),
            (&["a"][..], false),
        ] {
            let s = p.set_of(ids.iter().copied()).unwrap();
            assert_eq!(is_generic(&p, &s), expected, "{ids:?}");
            assert_eq!(is_generic_exhaustive(&p, &s, 10).unwrap(), expected, "{ids:?}");
        }
        assert!(GenericFilter::new(&p, p.set_of(["top"]).unwrap()).is_none());
        let g = GenericFilter::new(&p, p.set_of(["b", "top"]).unwrap()).unwrap();
        assert_eq!(p.id(g.least()), "b");
    }

    #[test]
    fn exhaustive_check_respects_cap() {
        let c3 = Poset::cohen(3).unwrap();
        let err = is_generic_exhaustive(&c3, &c3.full_set(), 10).unwrap_err();
        assert_eq!(err, ForcingError::CapExceeded { size: 19, cap: 10 });
    }
}
