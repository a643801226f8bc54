//! Two-sorted second-order formulas with name constants.
//!
//! Concrete syntax is an s-expression:
//!
//! ```text
//! (mem n:nu0 n:tau_a)
//! (forall-set x (not (mem x n:nu0)))
//! (exists-class X (eq n:sigma X))
//! ```
//!
//! Variables starting with a lowercase letter are set variables, variables
//! starting with an uppercase letter are class variables. `n:<label>` refers
//! to a name of the [`NameStore`] (`n:#12` for unlabeled names). Heads are
//! `mem eq and not or iff forall-set forall-class exists-set exists-class`;
//! `and` and `or` accept two or more arguments and nest to the right.
//!
//! Set-terms may stand wherever a class-term may (every set-name is a class
//! payload); the only sort errors are a class-name or class variable bound to
//! a set variable, and binders whose variable has the wrong case.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::names::{NameId, NameKind, NameStore};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown name `{label}` at byte {pos}")]
    UnknownName { pos: usize, label: String },
    #[error(transparent)]
    Sort(#[from] SortError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("`{var}` is a {found} variable, but `{binder}` binds {expected} variables")]
    Binder {
        var: String,
        binder: &'static str,
        expected: Sort,
        found: Sort,
    },
    #[error("class-name `{name}` cannot replace set variable `{var}`")]
    ClassForSetVar { name: String, var: String },
    #[error("`{0}` is not a variable name")]
    BadVariable(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Set,
    Class,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Set => "set",
            Sort::Class => "class",
        })
    }
}

/// A variable; its sort is given by the case of its first letter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Result<Var, SortError> {
        let mut chars = name.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
        if ok {
            Ok(Var(name.into()))
        } else {
            Err(SortError::BadVariable(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn sort(&self) -> Sort {
        if self.0.starts_with(|c: char| c.is_ascii_uppercase()) {
            Sort::Class
        } else {
            Sort::Set
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Name(NameId),
}

impl Term {
    pub fn sort(&self, store: &NameStore) -> Sort {
        match self {
            Term::Var(v) => v.sort(),
            Term::Name(id) => match store.kind(*id) {
                NameKind::Set => Sort::Set,
                NameKind::Class => Sort::Class,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Mem,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Rel, Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// The variable's sort selects first- or second-order quantification.
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn mem(a: Term, b: Term) -> Formula {
        Formula::Atom(Rel::Mem, a, b)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(Rel::Eq, a, b)
    }

    pub fn mem_names(a: NameId, b: NameId) -> Formula {
        Formula::mem(Term::Name(a), Term::Name(b))
    }

    pub fn eq_names(a: NameId, b: NameId) -> Formula {
        Formula::eq(Term::Name(a), Term::Name(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    /// Connective nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(..) => 0,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
            match f {
                Formula::Atom(_, a, b) => {
                    for t in [a, b] {
                        if let Term::Var(v) = t {
                            if !bound.contains(v) {
                                out.insert(v.clone());
                            }
                        }
                    }
                }
                Formula::Not(a) => go(a, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Forall(v, a) | Formula::Exists(v, a) => {
                    bound.push(v.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Name constants occurring in the formula.
    pub fn constants(&self) -> BTreeSet<NameId> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |_, a, b| {
            for t in [a, b] {
                if let Term::Name(id) = t {
                    out.insert(*id);
                }
            }
        });
        out
    }

    fn visit_atoms(&self, f: &mut impl FnMut(Rel, &Term, &Term)) {
        match self {
            Formula::Atom(r, a, b) => f(*r, a, b),
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit_atoms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    /// True when only atoms, `and`, `not` and `forall` occur.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Atom(..) => true,
            Formula::Not(a) | Formula::Forall(_, a) => a.is_core(),
            Formula::And(a, b) => a.is_core() && b.is_core(),
            Formula::Or(..) | Formula::Iff(..) | Formula::Exists(..) => false,
        }
    }

    /// Rewrites `or`, `iff` and `exists` into `and`/`not`/`forall`:
    ///
    /// - `A ↔ B` becomes `¬(A ∧ ¬B) ∧ ¬(B ∧ ¬A)`
    /// - `A ∨ B` becomes `¬(¬A ∧ ¬B)`
    /// - `∃x φ` becomes `¬∀x ¬φ`
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Atom(..) => self.clone(),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => Formula::not(Formula::and(Formula::not(a.desugar()), Formula::not(b.desugar()))),
            Formula::Iff(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                Formula::and(
                    Formula::not(Formula::and(a.clone(), Formula::not(b.clone()))),
                    Formula::not(Formula::and(b, Formula::not(a))),
                )
            }
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.desugar()),
            Formula::Exists(v, a) => Formula::not(Formula::forall(v.clone(), Formula::not(a.desugar()))),
        }
    }

    /// Replaces the free occurrences of `var` by the name `name`.
    ///
    /// Names contain no variables, so no capture can happen. Substituting a
    /// class-name for a set variable is a sort error.
    pub fn substitute(&self, var: &Var, name: NameId, store: &NameStore) -> Result<Formula, SortError> {
        if var.sort() == Sort::Set && store.kind(name) == NameKind::Class {
            return Err(SortError::ClassForSetVar {
                name: store.display(name),
                var: var.name().to_string(),
            });
        }
        Ok(self.subst(var, name))
    }

    fn subst(&self, var: &Var, name: NameId) -> Formula {
        let term = |t: &Term| match t {
            Term::Var(v) if v == var => Term::Name(name),
            other => other.clone(),
        };
        match self {
            Formula::Atom(r, a, b) => Formula::Atom(*r, term(a), term(b)),
            Formula::Not(a) => Formula::not(a.subst(var, name)),
            Formula::And(a, b) => Formula::and(a.subst(var, name), b.subst(var, name)),
            Formula::Or(a, b) => Formula::or(a.subst(var, name), b.subst(var, name)),
            Formula::Iff(a, b) => Formula::iff(a.subst(var, name), b.subst(var, name)),
            Formula::Forall(v, _) | Formula::Exists(v, _) if v == var => self.clone(),
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.subst(var, name)),
            Formula::Exists(v, a) => Formula::exists(v.clone(), a.subst(var, name)),
        }
    }

    pub fn display<'a>(&'a self, store: &'a NameStore) -> DisplayFormula<'a> {
        DisplayFormula { formula: self, store }
    }
}

/// Prints a formula in the s-expression syntax accepted by [`parse`].
pub struct DisplayFormula<'a> {
    formula: &'a Formula,
    store: &'a NameStore,
}

impl<'a> fmt::Display for DisplayFormula<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let store = self.store;
        let term = |t: &Term| match t {
            Term::Var(v) => v.name().to_string(),
            Term::Name(id) => format!("n:{}", store.display(*id)),
        };
        let sub = |g: &'a Formula| DisplayFormula { formula: g, store };
        let quant = |v: &Var, all: bool| match (v.sort(), all) {
            (Sort::Set, true) => "forall-set",
            (Sort::Class, true) => "forall-class",
            (Sort::Set, false) => "exists-set",
            (Sort::Class, false) => "exists-class",
        };
        match self.formula {
            Formula::Atom(Rel::Mem, a, b) => write!(f, "(mem {} {})", term(a), term(b)),
            Formula::Atom(Rel::Eq, a, b) => write!(f, "(eq {} {})", term(a), term(b)),
            Formula::Not(a) => write!(f, "(not {})", sub(a)),
            Formula::And(a, b) => write!(f, "(and {} {})", sub(a), sub(b)),
            Formula::Or(a, b) => write!(f, "(or {} {})", sub(a), sub(b)),
            Formula::Iff(a, b) => write!(f, "(iff {} {})", sub(a), sub(b)),
            Formula::Forall(v, a) => write!(f, "({} {} {})", quant(v, true), v.name(), sub(a)),
            Formula::Exists(v, a) => write!(f, "({} {} {})", quant(v, false), v.name(), sub(a)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(usize, String),
    List(usize, Vec<Sexp>),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Atom(p, _) | Sexp::List(p, _) => *p,
        }
    }
}

fn read_sexp(text: &str) -> Result<Sexp, ParseError> {
    let bytes = text.as_bytes();
    let mut stack: Vec<(usize, Vec<Sexp>)> = Vec::new();
    let mut done: Option<Sexp> = None;
    let mut i = 0;
    let syntax = |pos: usize, msg: &str| ParseError::Syntax {
        pos,
        msg: msg.to_string(),
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if done.is_some() {
            return Err(syntax(i, "trailing input"));
        }
        let item = match c {
            b'(' => {
                stack.push((i, Vec::new()));
                i += 1;
                continue;
            }
            b')' => {
                let (start, items) = stack.pop().ok_or_else(|| syntax(i, "unbalanced `)`"))?;
                i += 1;
                Sexp::List(start, items)
            }
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'(' && bytes[i] != b')' {
                    i += 1;
                }
                Sexp::Atom(start, text[start..i].to_string())
            }
        };
        match stack.last_mut() {
            Some((_, items)) => items.push(item),
            None => done = Some(item),
        }
    }
    if let Some((start, _)) = stack.last() {
        return Err(syntax(*start, "unclosed `(`"));
    }
    done.ok_or_else(|| syntax(0, "empty input"))
}

/// Parses and sort-checks a formula, resolving `n:` constants in `store`.
pub fn parse(text: &str, store: &NameStore) -> Result<Formula, ParseError> {
    let sexp = read_sexp(text)?;
    formula_of(&sexp, store)
}

fn formula_of(sexp: &Sexp, store: &NameStore) -> Result<Formula, ParseError> {
    let (pos, items) = match sexp {
        Sexp::List(pos, items) => (*pos, items),
        Sexp::Atom(pos, a) => {
            return Err(ParseError::Syntax {
                pos: *pos,
                msg: format!("expected a formula, found `{a}`"),
            })
        }
    };
    let head = match items.first() {
        Some(Sexp::Atom(_, h)) => h.as_str(),
        _ => {
            return Err(ParseError::Syntax {
                pos,
                msg: "expected a head symbol".into(),
            })
        }
    };
    let args = &items[1..];
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos,
                msg: format!("`{head}` takes {n} argument(s), found {}", args.len()),
            })
        }
    };
    match head {
        "mem" | "eq" => {
            arity(2)?;
            let rel = if head == "mem" { Rel::Mem } else { Rel::Eq };
            Ok(Formula::Atom(rel, term_of(&args[0], store)?, term_of(&args[1], store)?))
        }
        "not" => {
            arity(1)?;
            Ok(Formula::not(formula_of(&args[0], store)?))
        }
        "and" | "or" | "iff" => {
            if head == "iff" {
                arity(2)?;
            } else if args.len() < 2 {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("`{head}` takes at least 2 arguments"),
                });
            }
            let parts = args
                .iter()
                .map(|a| formula_of(a, store))
                .collect::<Result<Vec<_>, _>>()?;
            let join = match head {
                "and" => Formula::and,
                "or" => Formula::or,
                _ => Formula::iff,
            };
            let mut parts = parts.into_iter().rev();
            let last = parts.next().expect("at least two parts");
            Ok(parts.fold(last, |acc, p| join(p, acc)))
        }
        "forall-set" | "forall-class" | "exists-set" | "exists-class" => {
            arity(2)?;
            let var = match &args[0] {
                Sexp::Atom(p, v) => Var::new(v).map_err(|_| ParseError::Syntax {
                    pos: *p,
                    msg: format!("`{v}` is not a variable"),
                })?,
                other => {
                    return Err(ParseError::Syntax {
                        pos: other.pos(),
                        msg: "expected a variable".into(),
                    })
                }
            };
            let expected = if head.ends_with("-set") { Sort::Set } else { Sort::Class };
            if var.sort() != expected {
                let binder = match head {
                    "forall-set" => "forall-set",
                    "forall-class" => "forall-class",
                    "exists-set" => "exists-set",
                    _ => "exists-class",
                };
                return Err(SortError::Binder {
                    var: var.name().to_string(),
                    binder,
                    expected,
                    found: var.sort(),
                }
                .into());
            }
            let body = formula_of(&args[1], store)?;
            Ok(if head.starts_with("forall") {
                Formula::forall(var, body)
            } else {
                Formula::exists(var, body)
            })
        }
        other => Err(ParseError::Syntax {
            pos,
            msg: format!("unknown head `{other}`"),
        }),
    }
}

fn term_of(sexp: &Sexp, store: &NameStore) -> Result<Term, ParseError> {
    match sexp {
        Sexp::Atom(pos, a) => {
            if let Some(label) = a.strip_prefix("n:") {
                store
                    .lookup(label)
                    .map(Term::Name)
                    .map_err(|_| ParseError::UnknownName {
                        pos: *pos,
                        label: label.to_string(),
                    })
            } else {
                Var::new(a).map(Term::Var).map_err(|_| ParseError::Syntax {
                    pos: *pos,
                    msg: format!("`{a}` is neither a variable nor a name constant"),
                })
            }
        }
        Sexp::List(pos, _) => Err(ParseError::Syntax {
            pos: *pos,
            msg: "expected a term".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Poset;

    fn store() -> (NameStore, NameId, NameId, NameId) {
        let p = Poset::from_generators(&["top", "a", "b"], "top", &[("a", "top"), ("b", "top")], None).unwrap();
        let mut s = NameStore::new(&p);
        let nu0 = s.empty_name();
        let tau_a = s.mk_set_name([(nu0, p.cond("a").unwrap())]).unwrap();
        let big = s.mk_class_name([(nu0, p.top())]).unwrap();
        s.set_label(nu0, "nu0").unwrap();
        s.set_label(tau_a, "tau_a").unwrap();
        s.set_label(big, "Big").unwrap();
        (s, nu0, tau_a, big)
    }

    fn v(name: &str) -> Var {
        Var::new(name).unwrap()
    }

    #[test]
    fn parses_atoms_and_connectives() {
        let (s, nu0, tau_a, _) = store();
        assert_eq!(
            parse("(mem n:nu0 n:tau_a)", &s).unwrap(),
            Formula::mem_names(nu0, tau_a)
        );
        assert_eq!(
            parse("(not (mem n:nu0 n:tau_a))", &s).unwrap(),
            Formula::not(Formula::mem_names(nu0, tau_a))
        );
        let f = parse("(forall-set x (not (mem x n:nu0)))", &s).unwrap();
        assert_eq!(
            f,
            Formula::forall(v("x"), Formula::not(Formula::mem(Term::Var(v("x")), Term::Name(nu0))))
        );
        assert!(f.is_closed());
        let g = parse("(and (eq n:nu0 n:nu0) (eq n:nu0 n:nu0) (mem n:nu0 n:nu0))", &s).unwrap();
        assert_eq!(g.depth(), 2);
    }

    #[test]
    fn parse_errors() {
        let (s, ..) = store();
        assert!(matches!(
            parse("(mem n:nu0", &s),
            Err(ParseError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            parse("(mem n:nu0 n:zz)", &s),
            Err(ParseError::UnknownName { pos: 11, .. })
        ));
        assert!(matches!(parse("(frob x)", &s), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("(mem x)", &s), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("(mem x y) z", &s),
            Err(ParseError::Syntax { pos: 10, .. })
        ));
        assert!(matches!(
            parse("(forall-set X (mem X n:nu0))", &s),
            Err(ParseError::Sort(SortError::Binder { .. }))
        ));
        assert!(matches!(parse("", &s), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn print_round_trip() {
        let (s, ..) = store();
        for text in [
            "(mem n:nu0 n:tau_a)",
            "(forall-class X (iff (mem n:nu0 X) (eq X n:Big)))",
            "(exists-set y (or (not (mem y n:tau_a)) (and (eq y y) (mem y n:Big))))",
        ] {
            let f = parse(text, &s).unwrap();
            assert_eq!(f.display(&s).to_string(), text);
        }
    }

    #[test]
    fn substitution() {
        let (s, nu0, tau_a, big) = store();
        let x = v("x");
        let f = Formula::mem(Term::Var(x.clone()), Term::Name(nu0));
        assert_eq!(f.substitute(&x, tau_a, &s).unwrap(), Formula::mem_names(tau_a, nu0));
        let g = Formula::not(f.clone());
        assert_eq!(
            g.substitute(&x, tau_a, &s).unwrap(),
            Formula::not(Formula::mem_names(tau_a, nu0))
        );
        assert!(matches!(
            f.substitute(&x, big, &s),
            Err(SortError::ClassForSetVar { .. })
        ));
        // A set-name may replace a class variable.
        let h = Formula::mem(Term::Name(nu0), Term::Var(v("X")));
        assert_eq!(
            h.substitute(&v("X"), tau_a, &s).unwrap(),
            Formula::mem_names(nu0, tau_a)
        );
        // Bound occurrences are untouched.
        let bound = Formula::forall(x.clone(), f.clone());
        assert_eq!(bound.substitute(&x, tau_a, &s).unwrap(), bound);
    }

    #[test]
    fn desugaring() {
        let (s, nu0, tau_a, _) = store();
        let a = Formula::mem_names(nu0, tau_a);
        let b = Formula::eq_names(nu0, nu0);
        assert_eq!(a.desugar(), a);
        assert_eq!(
            Formula::or(a.clone(), b.clone()).desugar(),
            Formula::not(Formula::and(Formula::not(a.clone()), Formula::not(b.clone())))
        );
        let iff = Formula::iff(a.clone(), b.clone()).desugar();
        assert_eq!(
            iff,
            Formula::and(
                Formula::not(Formula::and(a.clone(), Formula::not(b.clone()))),
                Formula::not(Formula::and(b, Formula::not(a)))
            )
        );
        let ex = parse("(exists-class X (iff (mem n:nu0 X) (eq X X)))", &s).unwrap();
        assert!(!ex.is_core());
        assert!(ex.desugar().is_core());
    }
}
