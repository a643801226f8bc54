//! Command dispatch for the `classforce` binary.
//!
//! [`run`] parses arguments, executes one command and returns what would be
//! printed together with the exit status: 0 for an answer or a clean report,
//! 1 when a checked property fails, 2 for usage and load errors.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};

use classforce::corpus;
use classforce::forcing::{enumerate_generics, lemmas, materialize_tables, Forcer, GenericFilter, Semantics};
use classforce::homogeneity::{self, ENUMERATION_CAP};
use classforce::instance::{Instance, PosetSpec};
use classforce::logic::{parse, Formula, Rel, Term};
use classforce::names::Extension;
use classforce::order::{Cond, Poset};
use classforce::tameness::{self, DenseSequence, Validation};
use classforce::Report;

#[derive(Parser, Debug)]
#[command(
    name = "classforce",
    version,
    about = "Forcing over finite posets with hereditarily finite names"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Opts {
    /// Instance file (JSON).
    #[arg(long, global = true)]
    instance: Option<String>,
    /// Condition id.
    #[arg(long, global = true)]
    p: Option<String>,
    /// Formula: an s-expression or the label of a formula in the instance.
    #[arg(long, global = true)]
    phi: Option<String>,
    /// Generic filter, identified by its least element.
    #[arg(long, global = true)]
    g: Option<String>,
    /// Rank bound for tables.
    #[arg(long, global = true)]
    rank: Option<u32>,
    /// Sequence length for pretameness, tameness and distributivity.
    #[arg(long, global = true)]
    beta: Option<usize>,
    /// Seed for randomized formula suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumeration cap.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    cap: u128,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Whether `--p` forces `--phi` by the recursive definition.
    Forces,
    /// Whether `--phi` holds in every generic extension through `--p`.
    ForcesSemantic,
    /// Values of names in the extension by `--g` (all universe names by default).
    Interpret { names: Vec<String> },
    /// The generic filters.
    Generics,
    /// The generic extension by `--g`.
    Extension,
    /// The membership and equality tables for names of rank below `--rank`.
    Tables,
    /// Truth lemma check for `--phi` (or every instance formula).
    TruthLemma,
    /// Every lemma check on the instance formulas.
    Audit {
        /// Also check random formulas from `--seed` and the tables.
        #[arg(long)]
        all: bool,
    },
    /// Pretameness witnesses for every sequence of `--beta` dense sets.
    Pretame,
    /// Tameness witnesses for index sets of size `--beta`.
    Tame,
    /// Distributivity for `--beta` dense sets, and the implied tameness.
    Distributive,
    /// Weak homogeneity witnesses for every pair of conditions.
    Homogeneous,
    /// Prints the Cohen poset on `n` positions as an instance file.
    Cohen { n: usize },
    /// Prints the product of the instance poset with itself as an instance file.
    Product,
}

/// Captured output of one invocation.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: 0,
        }
    }

    fn report(stdout: String, report: &Report) -> Self {
        Outcome {
            stdout: stdout + &report.to_string(),
            stderr: String::new(),
            code: report.exit_code(),
        }
    }
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, UsageError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => out,
        Err(UsageError(msg)) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code: 2,
        },
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let opts = &cli.opts;
    if let Command::Cohen { n } = cli.command {
        return Ok(Outcome::ok(explicit_json(&Poset::cohen(n)?)));
    }
    let inst = load(opts)?;
    let ctx = Ctx { inst: &inst, opts };
    match &cli.command {
        Command::Forces => ctx.forces(false),
        Command::ForcesSemantic => ctx.forces(true),
        Command::Interpret { names } => ctx.interpret(names),
        Command::Generics => Ok(ctx.generics()),
        Command::Extension => ctx.extension(),
        Command::Tables => ctx.tables(),
        Command::TruthLemma => ctx.truth_lemma(),
        Command::Audit { all } => ctx.audit(*all),
        Command::Pretame => ctx.pretame(),
        Command::Tame => ctx.tame(),
        Command::Distributive => ctx.distributive(),
        Command::Homogeneous => Ok(ctx.homogeneous()),
        Command::Product => Ok(Outcome::ok(explicit_json(&Poset::product(&inst.poset, &inst.poset)))),
        Command::Cohen { .. } => unreachable!("handled above"),
    }
}

fn load(opts: &Opts) -> Result<Instance> {
    let path = opts
        .instance
        .as_deref()
        .ok_or(UsageError("--instance is required".into()))?;
    Ok(Instance::load(path)?)
}

/// An instance file with the poset spelled out: elements, top and covering pairs.
fn explicit_json(poset: &Poset) -> String {
    let mut order = Vec::new();
    for q in poset.conds() {
        for p in poset.conds().filter(|&p| poset.lt(q, p)) {
            let covered = !poset.conds().any(|r| poset.lt(q, r) && poset.lt(r, p));
            if covered {
                order.push((poset.id(q).to_string(), poset.id(p).to_string()));
            }
        }
    }
    let spec = PosetSpec::Explicit {
        elements: poset.ids().to_vec(),
        top: poset.id(poset.top()).to_string(),
        order,
        codes: Some(poset.codes().to_vec()),
    };
    let file = classforce::instance::InstanceFile {
        poset: spec,
        names: Default::default(),
        classes: Default::default(),
        universe: None,
        formulas: Default::default(),
    };
    serde_json::to_string_pretty(&file).expect("instance files serialize") + "\n"
}

struct Ctx<'a> {
    inst: &'a Instance,
    opts: &'a Opts,
}

impl Ctx<'_> {
    fn cond(&self) -> Result<Cond> {
        let id = self.opts.p.as_deref().ok_or(UsageError("--p is required".into()))?;
        Ok(self.inst.poset.cond(id)?)
    }

    /// `--p` if given, otherwise every condition.
    fn conds(&self) -> Result<Vec<Cond>> {
        match &self.opts.p {
            Some(_) => Ok(vec![self.cond()?]),
            None => Ok(self.inst.poset.conds().collect()),
        }
    }

    fn phi(&self) -> Result<Formula> {
        let text = self.opts.phi.as_deref().ok_or(UsageError("--phi is required".into()))?;
        if let Some(f) = self.inst.formula(text) {
            return Ok(f.clone());
        }
        Ok(parse(text, &self.inst.store)?)
    }

    /// `--phi` if given, otherwise every instance formula.
    fn formulas(&self) -> Result<Vec<Formula>> {
        match &self.opts.phi {
            Some(_) => Ok(vec![self.phi()?]),
            None => Ok(self.inst.formulas.iter().map(|(_, f)| f.clone()).collect()),
        }
    }

    fn generic(&self) -> Result<GenericFilter> {
        let id = self.opts.g.as_deref().ok_or(UsageError("--g is required".into()))?;
        let least = self.inst.poset.cond(id)?;
        enumerate_generics(&self.inst.poset)
            .into_iter()
            .find(|g| g.least() == least)
            .ok_or_else(|| UsageError(format!("`{id}` is not the least element of a generic filter")))
    }

    fn forcer(&self) -> Forcer<'_> {
        Forcer::new(&self.inst.poset, &self.inst.store, &self.inst.universe)
    }

    fn semantics(&self) -> Semantics<'_> {
        Semantics::new(&self.inst.poset, &self.inst.store, &self.inst.universe)
    }

    fn forces(&self, semantic: bool) -> Result<Outcome> {
        let (p, phi) = (self.cond()?, self.phi()?);
        let answer = if semantic {
            self.forcer().check_formula(&phi)?;
            self.semantics().forces(p, &phi)?
        } else {
            self.forcer().forces_star(p, &phi)?
        };
        Ok(Outcome::ok(format!("{answer}\n")))
    }

    fn interpret(&self, names: &[String]) -> Result<Outcome> {
        let g = self.generic()?;
        let store = &self.inst.store;
        let ids = if names.is_empty() {
            self.inst.universe.all().to_vec()
        } else {
            names
                .iter()
                .map(|n| store.lookup(n))
                .collect::<std::result::Result<_, _>>()?
        };
        let mut out = String::new();
        for id in ids {
            writeln!(out, "{} = {}", store.display(id), store.interpret(id, g.members())).unwrap();
        }
        Ok(Outcome::ok(out))
    }

    fn generics(&self) -> Outcome {
        let poset = &self.inst.poset;
        let mut out = String::new();
        for g in enumerate_generics(poset) {
            let members: Vec<&str> = g.members().iter().map(|c| poset.id(c)).collect();
            writeln!(out, "G={} members={{{}}}", poset.id(g.least()), members.join(",")).unwrap();
        }
        Outcome::ok(out)
    }

    fn extension(&self) -> Result<Outcome> {
        let g = self.generic()?;
        let (poset, store) = (&self.inst.poset, &self.inst.store);
        let ext = Extension::build(store, &self.inst.universe, poset, &g);
        let mut out = String::new();
        for (value, names) in ext.grouped(store) {
            writeln!(out, "set {value} <- {}", names.join(", ")).unwrap();
        }
        for (id, value) in &ext.classes {
            if !store.is_set_name(*id) {
                writeln!(out, "class {} = {value}", store.display(*id)).unwrap();
            }
        }
        let mut code = 0;
        if let Err(e) = ext.check_transitive(store) {
            writeln!(
                out,
                "VIOLATION transitivity p={} phi={e} G={}",
                ext.generic, ext.generic
            )
            .unwrap();
            code = 1;
        }
        Ok(Outcome {
            stdout: out,
            stderr: String::new(),
            code,
        })
    }

    fn tables(&self) -> Result<Outcome> {
        let alpha = self.opts.rank.ok_or(UsageError("--rank is required".into()))?;
        let (poset, store) = (&self.inst.poset, &self.inst.store);
        let tables = materialize_tables(poset, store, &self.inst.universe, alpha);
        let mut out = String::new();
        for (p, l, rel, r) in tables.true_tuples() {
            let rel = match rel {
                Rel::Mem => "mem",
                Rel::Eq => "eq",
            };
            writeln!(out, "{rel} p={} {} {}", poset.id(p), store.display(l), store.display(r)).unwrap();
        }
        Ok(Outcome::ok(out))
    }

    fn truth_lemma(&self) -> Result<Outcome> {
        let (forcer, sem) = (self.forcer(), self.semantics());
        let mut report = Report::new();
        for phi in self.formulas()? {
            report.extend(lemmas::check_truth_lemma(&forcer, &sem, &phi)?);
        }
        Ok(Outcome::report(String::new(), &report))
    }

    fn audit(&self, all: bool) -> Result<Outcome> {
        let (poset, store, universe) = (&self.inst.poset, &self.inst.store, &self.inst.universe);
        let (forcer, sem) = (self.forcer(), self.semantics());
        let mut formulas = self.formulas()?;
        if all {
            let mut rng = corpus::rng(self.opts.seed);
            formulas.extend((0..200).map(|_| corpus::random_formula(&mut rng, universe, 4)));
        }
        let mut report = Report::new();
        for phi in &formulas {
            report.extend(lemmas::check_all(&forcer, &sem, phi)?);
        }
        if all {
            let alpha = self.opts.rank.unwrap_or(3);
            let tables = materialize_tables(poset, store, universe, alpha);
            for (&(l, rel, r), set) in tables.entries() {
                for p in poset.conds() {
                    if set.contains(p) != forcer.atom(p, l, rel, r) {
                        let phi = Formula::Atom(rel, Term::Name(l), Term::Name(r));
                        report.push(classforce::Violation {
                            lemma: "tables",
                            p: poset.id(p).to_string(),
                            phi: phi.display(store).to_string(),
                            generic: None,
                        });
                    }
                }
            }
        }
        let summary = format!(
            "checked {} formulas over {} conditions: {} violations\n",
            formulas.len(),
            poset.len(),
            report.violations().len()
        );
        let mut out = Outcome::report(String::new(), &report);
        out.stdout.push_str(&summary);
        Ok(out)
    }

    fn pretame(&self) -> Result<Outcome> {
        let poset = &self.inst.poset;
        let beta = self.opts.beta.unwrap_or(1);
        let n = poset.len();
        if n >= 24 || (1u128 << n) > self.opts.cap {
            return Err(UsageError(format!("{n} conditions exceed the enumeration cap")));
        }
        let dense: Vec<_> = (0..1u64 << n)
            .map(|mask| {
                classforce::order::CondSet::from_conds(n, (0..n).filter(|i| mask >> i & 1 == 1).map(Cond::from_index))
            })
            .filter(|d| poset.is_dense(d))
            .collect();
        let mut out = String::new();
        let mut report = Report::new();
        for p in self.conds()? {
            let mut count = 0usize;
            for seq in itertools_multisets(dense.len(), beta) {
                let seq = DenseSequence::new(poset, seq.iter().map(|&i| dense[i].clone()).collect())?;
                count += 1;
                let ok = tameness::check_pretame(poset, &seq, p)
                    .is_some_and(|w| tameness::validate_pretame(poset, &seq, p, &w));
                if !ok {
                    report.push(classforce::Violation {
                        lemma: "pretame",
                        p: poset.id(p).to_string(),
                        phi: format!("sequence {count}"),
                        generic: None,
                    });
                }
            }
            writeln!(out, "pretame p={} sequences={count}", poset.id(p)).unwrap();
        }
        Ok(Outcome::report(out, &report))
    }

    fn tame(&self) -> Result<Outcome> {
        let poset = &self.inst.poset;
        let a = self.opts.beta.unwrap_or(1);
        let mut out = String::new();
        let mut report = Report::new();
        for p in self.conds()? {
            match tameness::check_tame(poset, a, p, self.opts.cap)? {
                Some(found) => {
                    let how = match found.validation {
                        Validation::Enumerated => "enumerated",
                        Validation::DownwardClosed => "downward-closed",
                        Validation::Reduced => "reduced",
                    };
                    writeln!(
                        out,
                        "WITNESS p={} q={} alpha={} validation={how}",
                        poset.id(p),
                        poset.id(found.witness.q),
                        found.witness.alpha
                    )
                    .unwrap();
                }
                None => report.push(classforce::Violation {
                    lemma: "tame",
                    p: poset.id(p).to_string(),
                    phi: format!("|a|={a}"),
                    generic: None,
                }),
            }
        }
        Ok(Outcome::report(out, &report))
    }

    fn distributive(&self) -> Result<Outcome> {
        let poset = &self.inst.poset;
        let beta = self.opts.beta.unwrap_or(2);
        let answer = tameness::check_distributive(poset, beta, self.opts.cap)?;
        let report = tameness::check_distributive_implies_tame(poset, beta, self.opts.cap)?;
        Ok(Outcome::report(format!("{answer}\n"), &report))
    }

    fn homogeneous(&self) -> Outcome {
        match homogeneity::check_weak_homogeneity(&self.inst.poset, ENUMERATION_CAP) {
            Ok(table) => Outcome::ok(table.to_string()),
            Err(e) => Outcome {
                stdout: format!("FAIL {e}\n"),
                stderr: String::new(),
                code: 1,
            },
        }
    }
}

/// Multisets of size `k` over `0..n`, as sorted index vectors.
fn itertools_multisets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    use itertools::Itertools;
    (0..n).combinations_with_replacement(k)
}
