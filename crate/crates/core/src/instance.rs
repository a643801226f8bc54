//! JSON instance files.
//!
//! ```json
//! {
//!   "poset": {"elements": ["top", "a", "b"], "top": "top",
//!             "order": [["a", "top"], ["b", "top"]]},
//!   "names": {"nu0": [], "tau_a": [["nu0", "a"]], "two": {"check": 2}},
//!   "classes": {"Gamma": "generic", "C": [["tau_a", "top"]]},
//!   "universe": ["nu0", "tau_a", "Gamma"],
//!   "formulas": {"in": "(mem n:nu0 n:tau_a)"}
//! }
//! ```
//!
//! `poset` may also be `{"cohen": n}` or `{"product": [P, Q]}`. Order pairs
//! are `[lower, upper]` generators; their closure is taken on load. Without
//! `universe`, every declared name is a root. Names refer to each other by
//! label, in any order.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hf::HfSet;
use crate::logic::{parse, Formula, ParseError};
use crate::names::{NameError, NameId, NameStore, Universe};
use crate::order::{OrderError, Poset};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed instance at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("invalid poset: {0}")]
    Order(#[from] OrderError),
    #[error("invalid name `{label}`: {source}")]
    Name {
        label: String,
        #[source]
        source: NameError,
    },
    #[error("`{from}` refers to undeclared name `{to}`")]
    Dangling { from: String, to: String },
    #[error("names refer to each other in a cycle through `{0}`")]
    Cycle(String),
    #[error("label `{0}` is declared both as a set-name and a class-name")]
    DuplicateLabel(String),
    #[error("formula `{label}`: {source}")]
    Formula {
        label: String,
        #[source]
        source: ParseError,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PosetSpec {
    Explicit {
        elements: Vec<String>,
        top: String,
        #[serde(default)]
        order: Vec<(String, String)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        codes: Option<Vec<HfSet>>,
    },
    Cohen {
        cohen: usize,
    },
    Product {
        product: Box<(PosetSpec, PosetSpec)>,
    },
}

impl PosetSpec {
    pub fn build(&self) -> Result<Poset, OrderError> {
        match self {
            PosetSpec::Explicit {
                elements,
                top,
                order,
                codes,
            } => Poset::from_generators(elements, top, order, codes.clone()),
            PosetSpec::Cohen { cohen } => Poset::cohen(*cohen),
            PosetSpec::Product { product } => Ok(Poset::product(&product.0.build()?, &product.1.build()?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NameSpec {
    Pairs(Vec<(String, String)>),
    Check { check: HfSet },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassSpec {
    /// The literal string `"generic"`.
    Generic(String),
    Pairs(Vec<(String, String)>),
    Check {
        check: Vec<HfSet>,
    },
}

/// The file contents, as written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub poset: PosetSpec,
    #[serde(default)]
    pub names: BTreeMap<String, NameSpec>,
    #[serde(default)]
    pub classes: BTreeMap<String, ClassSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universe: Option<Vec<String>>,
    #[serde(default)]
    pub formulas: BTreeMap<String, String>,
}

/// A loaded instance: the poset, its names, the universe and the formulas.
pub struct Instance {
    pub file: InstanceFile,
    pub poset: Poset,
    pub store: NameStore,
    pub universe: Universe,
    pub formulas: Vec<(String, Formula)>,
}

impl Instance {
    pub fn load(path: impl AsRef<Path>) -> Result<Instance, LoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Instance::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Instance, LoadError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| LoadError::Syntax {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        Instance::from_file(file)
    }

    pub fn from_file(file: InstanceFile) -> Result<Instance, LoadError> {
        let poset = file.poset.build()?;
        let mut store = NameStore::new(&poset);
        if let Some(label) = file.names.keys().find(|l| file.classes.contains_key(*l)) {
            return Err(LoadError::DuplicateLabel(label.clone()));
        }
        let mut builder = Builder {
            file: &file,
            poset: &poset,
            store: &mut store,
            in_progress: HashSet::new(),
        };
        for label in file.names.keys().chain(file.classes.keys()) {
            builder.resolve(label, label)?;
        }
        let roots = match &file.universe {
            Some(labels) => labels
                .iter()
                .map(|l| {
                    store.lookup(l).map_err(|_| LoadError::Dangling {
                        from: "universe".to_string(),
                        to: l.clone(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => file
                .names
                .keys()
                .chain(file.classes.keys())
                .map(|l| store.lookup(l).expect("every declared name was built"))
                .collect(),
        };
        let universe = Universe::closed(&store, roots);
        let formulas = file
            .formulas
            .iter()
            .map(|(label, text)| {
                parse(text, &store)
                    .map(|phi| (label.clone(), phi))
                    .map_err(|source| LoadError::Formula {
                        label: label.clone(),
                        source,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Instance {
            file,
            poset,
            store,
            universe,
            formulas,
        })
    }

    /// The instance as JSON, in the form it was loaded from.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("instance files serialize")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }

    pub fn formula(&self, label: &str) -> Option<&Formula> {
        self.formulas.iter().find(|(l, _)| l == label).map(|(_, f)| f)
    }
}

struct Builder<'a> {
    file: &'a InstanceFile,
    poset: &'a Poset,
    store: &'a mut NameStore,
    in_progress: HashSet<String>,
}

impl Builder<'_> {
    fn resolve(&mut self, from: &str, label: &str) -> Result<NameId, LoadError> {
        if let Ok(id) = self.store.lookup(label) {
            return Ok(id);
        }
        let dangling = || LoadError::Dangling {
            from: from.to_string(),
            to: label.to_string(),
        };
        if !self.in_progress.insert(label.to_string()) {
            return Err(LoadError::Cycle(label.to_string()));
        }
        let name_err = |source| LoadError::Name {
            label: label.to_string(),
            source,
        };
        let id = if let Some(spec) = self.file.names.get(label) {
            match spec {
                NameSpec::Pairs(pairs) => {
                    let pairs = self.pairs(label, pairs)?;
                    self.store.mk_set_name(pairs).map_err(name_err)?
                }
                NameSpec::Check { check } => self.store.check(check),
            }
        } else if let Some(spec) = self.file.classes.get(label) {
            match spec {
                ClassSpec::Generic(word) if word == "generic" => self.store.generic_name(self.poset),
                ClassSpec::Generic(word) => {
                    return Err(LoadError::Syntax {
                        line: 0,
                        column: 0,
                        msg: format!("class `{label}`: expected \"generic\", pairs or a check list, found \"{word}\""),
                    })
                }
                ClassSpec::Pairs(pairs) => {
                    let pairs = self.pairs(label, pairs)?;
                    self.store.mk_class_name(pairs).map_err(name_err)?
                }
                ClassSpec::Check { check } => self.store.check_class(check),
            }
        } else {
            return Err(dangling());
        };
        self.in_progress.remove(label);
        // Equal names share an id and display under the first label.
        self.store.set_label(id, label).map_err(name_err)?;
        Ok(id)
    }

    fn pairs(
        &mut self,
        label: &str,
        pairs: &[(String, String)],
    ) -> Result<Vec<(NameId, crate::order::Cond)>, LoadError> {
        pairs
            .iter()
            .map(|(name, cond)| {
                let id = self.resolve(label, name)?;
                let c = self.poset.cond(cond).map_err(|_| LoadError::Dangling {
                    from: label.to_string(),
                    to: cond.clone(),
                })?;
                Ok((id, c))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const F1: &str = r#"{
        "poset": {"elements": ["top", "a", "b"], "top": "top", "order": [["a", "top"], ["b", "top"]]},
        "names": {"nu0": [], "tau_a": [["nu0", "a"]], "sigma": [["nu0", "top"]]},
        "classes": {"Gamma": "generic"},
        "formulas": {"in": "(mem n:nu0 n:tau_a)"}
    }"#;

    #[test]
    fn loads_f1() {
        let inst = Instance::from_json(F1).unwrap();
        assert_eq!(inst.poset.len(), 3);
        assert_eq!(inst.file.names.len() + inst.file.classes.len(), 4);
        assert!(inst.formula("in").is_some());
        assert!(inst.universe.contains(inst.store.lookup("Gamma").unwrap()));
    }

    #[test]
    fn load_errors() {
        let bad_order = r#"{"poset": {"elements": ["top", "a"], "top": "top", "order": [["a", "top"], ["top", "a"]]}}"#;
        assert!(matches!(
            Instance::from_json(bad_order),
            Err(LoadError::Order(OrderError::NotAntisymmetric(..)))
        ));
        let dangling = r#"{"poset": {"cohen": 1}, "names": {"x": [["nope", "{}"]]}}"#;
        assert!(matches!(Instance::from_json(dangling), Err(LoadError::Dangling { .. })));
        let cycle = r#"{"poset": {"cohen": 1}, "names": {"x": [["y", "{}"]], "y": [["x", "{}"]]}}"#;
        assert!(matches!(Instance::from_json(cycle), Err(LoadError::Cycle(_))));
        let syntax = "{\"poset\": ";
        assert!(matches!(
            Instance::from_json(syntax),
            Err(LoadError::Syntax { line: 1, .. })
        ));
        let formula = r#"{"poset": {"cohen": 1}, "formulas": {"f": "(mem n:zz n:zz)"}}"#;
        assert!(matches!(Instance::from_json(formula), Err(LoadError::Formula { .. })));
    }

    #[test]
    fn round_trip() {
        let inst = Instance::from_json(F1).unwrap();
        let again = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(inst.file, again.file);
        assert_eq!(inst.poset.ids(), again.poset.ids());
        for c in inst.poset.conds() {
            assert_eq!(inst.poset.below(c), again.poset.below(c));
        }
        assert_eq!(inst.universe.all(), again.universe.all());
    }

    #[test]
    fn structured_posets_and_aliases() {
        let text = r#"{
            "poset": {"product": [{"cohen": 1}, {"cohen": 1}]},
            "names": {"e": [], "zero": {"check": 0}, "one": {"check": 1}},
            "classes": {"C": {"check": [0, 1]}}
        }"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.poset.len(), 1);
        assert_eq!(inst.store.lookup("e").unwrap(), inst.store.lookup("zero").unwrap());
    }
}
