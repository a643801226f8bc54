use crate::forcing::generic::{enumerate_generics, GenericFilter};
use crate::forcing::ForcingError;
use crate::hf::HfSet;
use crate::logic::{Formula, Rel, Sort, Term, Var};
use crate::names::{Extension, NameStore, Universe};
use crate::order::{Cond, CondSet, Poset};

/// Tarskian truth of a closed formula in a generic extension.
///
/// First-order quantifiers range over the distinct values of the sets part,
/// second-order ones over the distinct values of the classes part.
pub fn eval_extension(ext: &Extension, phi: &Formula) -> Result<bool, ForcingError> {
    eval(ext, phi, &mut Vec::new())
}

fn eval(ext: &Extension, phi: &Formula, env: &mut Vec<(Var, HfSet)>) -> Result<bool, ForcingError> {
    Ok(match phi {
        Formula::Atom(rel, a, b) => {
            let (a, b) = (value(ext, a, env)?, value(ext, b, env)?);
            match rel {
                Rel::Mem => b.contains(&a),
                Rel::Eq => a == b,
            }
        }
        Formula::Not(a) => !eval(ext, a, env)?,
        Formula::And(a, b) => eval(ext, a, env)? && eval(ext, b, env)?,
        Formula::Or(a, b) => eval(ext, a, env)? || eval(ext, b, env)?,
        Formula::Iff(a, b) => eval(ext, a, env)? == eval(ext, b, env)?,
        Formula::Forall(v, body) => {
            for x in range(ext, v) {
                env.push((v.clone(), x.clone()));
                let holds = eval(ext, body, env);
                env.pop();
                if !holds? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Exists(v, body) => {
            for x in range(ext, v) {
                env.push((v.clone(), x.clone()));
                let holds = eval(ext, body, env);
                env.pop();
                if holds? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

fn range<'e>(ext: &'e Extension, v: &Var) -> &'e [HfSet] {
    match v.sort() {
        Sort::Set => ext.set_values(),
        Sort::Class => ext.class_values(),
    }
}

fn value(ext: &Extension, t: &Term, env: &[(Var, HfSet)]) -> Result<HfSet, ForcingError> {
    match t {
        Term::Name(id) => ext
            .value(*id)
            .cloned()
            .ok_or_else(|| ForcingError::NameOutsideUniverse(format!("#{}", id.index()))),
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|(_, x)| x.clone())
            .ok_or_else(|| ForcingError::OpenFormula(v.name().to_string())),
    }
}

/// All generic filters of a poset with their extensions.
pub struct Semantics<'a> {
    poset: &'a Poset,
    store: &'a NameStore,
    generics: Vec<GenericFilter>,
    extensions: Vec<Extension>,
}

impl<'a> Semantics<'a> {
    pub fn new(poset: &'a Poset, store: &'a NameStore, universe: &Universe) -> Self {
        let generics = enumerate_generics(poset);
        let extensions = generics
            .iter()
            .map(|g| Extension::build(store, universe, poset, g))
            .collect();
        Semantics {
            poset,
            store,
            generics,
            extensions,
        }
    }

    pub fn store(&self) -> &'a NameStore {
        self.store
    }

    pub fn generics(&self) -> &[GenericFilter] {
        &self.generics
    }

    pub fn extensions(&self) -> &[Extension] {
        &self.extensions
    }

    /// Truth of `φ` in each extension, in the order of [`Self::generics`].
    pub fn truth_vector(&self, phi: &Formula) -> Result<Vec<bool>, ForcingError> {
        self.extensions.iter().map(|e| eval_extension(e, phi)).collect()
    }

    /// `p ⊩ φ`: `φ` holds in every extension by a generic containing `p`.
    pub fn forces(&self, p: Cond, phi: &Formula) -> Result<bool, ForcingError> {
        Ok(self.semantic_set(phi)?.contains(p))
    }

    /// `{p | p ⊩ φ}`.
    pub fn semantic_set(&self, phi: &Formula) -> Result<CondSet, ForcingError> {
        let truth = self.truth_vector(phi)?;
        let mut failing = self.poset.empty_set();
        for (g, holds) in self.generics.iter().zip(truth) {
            if !holds {
                failing.union_with(g.members());
            }
        }
        let mut s = self.poset.full_set();
        s.difference_with(&failing);
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    #[test]
    fn generic_name_is_in_extension_of_both_generics() {
        let poset = Poset::from_generators(&["top", "a", "b"], "top", &[("a", "top"), ("b", "top")], None).unwrap();
        let mut store = NameStore::new(&poset);
        let nu0 = store.empty_name();
        let gamma = store.generic_name(&poset);
        store.set_label(nu0, "nu0").unwrap();
        store.set_label(gamma, "Gamma").unwrap();
        let universe = Universe::closed(&store, [nu0, gamma]);
        let sem = Semantics::new(&poset, &store, &universe);
        let phi = parse("(exists-class X (eq X n:Gamma))", &store).unwrap();
        assert_eq!(sem.truth_vector(&phi).unwrap(), [true, true]);
        let phi = parse("(exists-set x (mem x n:Gamma))", &store).unwrap();
        assert_eq!(sem.truth_vector(&phi).unwrap(), [true, true]);
        assert!(sem.forces(poset.top(), &phi).unwrap());
    }

    #[test]
    fn semantic_forcing_on_f1() {
        let poset = Poset::from_generators(&["top", "a", "b"], "top", &[("a", "top"), ("b", "top")], None).unwrap();
        let mut store = NameStore::new(&poset);
        let nu0 = store.empty_name();
        let tau_a = store.mk_set_name([(nu0, poset.cond("a").unwrap())]).unwrap();
        store.set_label(nu0, "nu0").unwrap();
        store.set_label(tau_a, "tau_a").unwrap();
        let universe = Universe::closed(&store, [nu0, tau_a]);
        let sem = Semantics::new(&poset, &store, &universe);
        let phi = parse("(mem n:nu0 n:tau_a)", &store).unwrap();
        assert_eq!(sem.semantic_set(&phi).unwrap(), poset.set_of(["a"]).unwrap());
    }
}
