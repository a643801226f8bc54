//! Checkers comparing [`Forcer`], [`Semantics`] and the structural lemmas
//! about `⊩*`. Each returns a [`Report`] that is expected to be clean.

use crate::forcing::{eval_extension, Forcer, ForcingError, Semantics};
use crate::logic::{Formula, Sort, Var};
use crate::names::{NameId, NameStore, Universe};
use crate::order::{Cond, Poset};
use crate::report::{Report, Violation};

fn violation(forcer: &Forcer<'_>, lemma: &'static str, p: Cond, phi: &Formula) -> Violation {
    Violation {
        lemma,
        p: forcer.poset().id(p).to_string(),
        phi: phi.display(forcer.store()).to_string(),
        generic: None,
    }
}

/// If `p ⊩* φ` and `q ≤ p` then `q ⊩* φ`. Reports each failing `q`.
pub fn check_monotonicity(forcer: &Forcer<'_>, phi: &Formula) -> Result<Report, ForcingError> {
    let poset = forcer.poset();
    let s = forcer.forcing_set(phi)?;
    let mut report = Report::new();
    for q in poset.conds() {
        if !s.contains(q) && poset.above(q).intersects(&s) {
            report.push(violation(forcer, "monotonicity", q, phi));
        }
    }
    Ok(report)
}

/// If the conditions forcing `φ` are dense below `p` then `p ⊩* φ`; and if
/// `p` does not force `φ`, some `q ≤ p` forces `¬φ`.
pub fn check_density_lemma(forcer: &Forcer<'_>, phi: &Formula) -> Result<Report, ForcingError> {
    let poset = forcer.poset();
    let s = forcer.forcing_set(phi)?;
    let neg = forcer.forcing_set(&Formula::not(phi.clone()))?;
    let mut report = Report::new();
    for p in poset.conds() {
        if !s.contains(p) && poset.is_dense_below(&s, p) {
            report.push(violation(forcer, "density", p, phi));
        }
        if !s.contains(p) && !poset.below(p).intersects(&neg) {
            report.push(violation(forcer, "decidability", p, phi));
        }
    }
    Ok(report)
}

/// No condition forces both `φ` and `¬φ`.
pub fn check_consistency(forcer: &Forcer<'_>, phi: &Formula) -> Result<Report, ForcingError> {
    let mut s = forcer.forcing_set(phi)?;
    s.intersect_with(&forcer.forcing_set(&Formula::not(phi.clone()))?);
    let mut report = Report::new();
    for p in s.iter() {
        report.push(violation(forcer, "consistency", p, phi));
    }
    Ok(report)
}

/// `φ` holds in the extension by `G` iff some `p ∈ G` has `p ⊩* φ`.
pub fn check_truth_lemma(forcer: &Forcer<'_>, sem: &Semantics<'_>, phi: &Formula) -> Result<Report, ForcingError> {
    let s = forcer.forcing_set(phi)?;
    let mut report = Report::new();
    for (g, ext) in sem.generics().iter().zip(sem.extensions()) {
        if eval_extension(ext, phi)? != g.members().intersects(&s) {
            let mut v = violation(forcer, "truth-lemma", g.least(), phi);
            v.generic = Some(ext.generic.clone());
            report.push(v);
        }
    }
    Ok(report)
}

/// `p ⊩* φ` iff `p ⊩ φ`, for every `p`.
pub fn check_star_equals_semantic(
    forcer: &Forcer<'_>,
    sem: &Semantics<'_>,
    phi: &Formula,
) -> Result<Report, ForcingError> {
    let star = forcer.forcing_set(phi)?;
    let semantic = sem.semantic_set(phi)?;
    let mut report = Report::new();
    for p in forcer.poset().conds() {
        if star.contains(p) != semantic.contains(p) {
            report.push(violation(forcer, "star-equals-semantic", p, phi));
        }
    }
    Ok(report)
}

/// Every checker above, concatenated.
pub fn check_all(forcer: &Forcer<'_>, sem: &Semantics<'_>, phi: &Formula) -> Result<Report, ForcingError> {
    let mut report = check_monotonicity(forcer, phi)?;
    report.extend(check_density_lemma(forcer, phi)?);
    report.extend(check_consistency(forcer, phi)?);
    report.extend(check_truth_lemma(forcer, sem, phi)?);
    report.extend(check_star_equals_semantic(forcer, sem, phi)?);
    Ok(report)
}

/// The pairs `(σ, p)` with `σ` a set-name of the universe and `p ⊩* φ(σ)`.
pub fn comprehension_pairs(forcer: &Forcer<'_>, phi: &Formula, var: &Var) -> Result<Vec<(NameId, Cond)>, ForcingError> {
    if var.sort() != Sort::Set {
        return Err(ForcingError::OpenFormula(var.name().to_string()));
    }
    let mut pairs = Vec::new();
    for &sigma in forcer.universe().set_names() {
        let instance = phi.substitute(var, sigma, forcer.store())?;
        pairs.extend(forcer.forcing_set(&instance)?.iter().map(|p| (sigma, p)));
    }
    Ok(pairs)
}

/// The class-name `{(σ, p) | p ⊩* φ(σ)}` over the set-names of the universe.
pub fn comprehension_name(
    poset: &Poset,
    store: &mut NameStore,
    universe: &Universe,
    phi: &Formula,
    var: &Var,
) -> Result<NameId, ForcingError> {
    let pairs = comprehension_pairs(&Forcer::new(poset, store, universe), phi, var)?;
    Ok(store.mk_class_name(pairs).expect("universe names belong to the store"))
}
