//! Acceptance run: one PASS or FAIL line per criterion, nonzero exit status
//! if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use classforce::corpus::{fixtures, random_formula, random_hfset, random_instance, random_poset, rng, Fixture};
use classforce::forcing::{enumerate_generics, is_generic_exhaustive, lemmas, materialize_tables, Forcer, Semantics};
use classforce::homogeneity::{
    check_weak_homogeneity, enumerate_automorphisms, homogeneity_witness, transported_generic, PosetAutomorphism,
    WitnessCache, ENUMERATION_CAP,
};
use classforce::names::{Extension, NameStore};
use classforce::order::{Cond, CondSet, Poset};
use classforce::tameness::{
    check_distributive, check_distributive_implies_tame, check_pretame, check_tame, DenseSequence, Validation,
};
use classforce::HfSet;
use common::{Oracle, Order, V};

const RANDOM_POSETS: usize = 500;
const MAX_RANDOM_LEN: usize = 6;
const FORMULAS_PER_INSTANCE: usize = 200;
const FORMULA_DEPTH: usize = 4;
const TIME_BUDGET: Duration = Duration::from_secs(300);
const HF_ROUND_TRIPS: usize = 1000;
const HF_MAX_RANK: u32 = 4;
const TABLE_MAX_ALPHA: u32 = 3;
const DISTRIBUTIVE_POSETS: usize = 200;
const GENERIC_POSETS: usize = 300;
const GENERIC_MAX_LEN: usize = 10;
const ORACLE_MAX_LEN: usize = 12;
const TAME_CAP: u128 = 1 << 22;

type Outcome = Result<String, String>;

fn corpus() -> Vec<Fixture> {
    let mut all = fixtures();
    all.extend(
        (0..RANDOM_POSETS).map(|i| random_instance(&mut rng(1000 + i as u64), MAX_RANDOM_LEN, format!("random{i}"))),
    );
    all
}

fn mask(s: &CondSet) -> u128 {
    s.iter().fold(0, |m, c| m | 1 << c.index())
}

fn conds_of(n: usize, m: u128) -> CondSet {
    CondSet::from_conds(n, (0..n).filter(|i| m >> i & 1 == 1).map(Cond::from_index))
}

#[derive(Default)]
struct LemmaCounts {
    checks: usize,
    oracle_checks: usize,
    star_vs_semantic: Vec<String>,
    truth: Vec<String>,
    auxiliary: Vec<String>,
}

impl LemmaCounts {
    fn merge(mut self, other: LemmaCounts) -> LemmaCounts {
        self.checks += other.checks;
        self.oracle_checks += other.oracle_checks;
        self.star_vs_semantic.extend(other.star_vs_semantic);
        self.truth.extend(other.truth);
        self.auxiliary.extend(other.auxiliary);
        self
    }
}

fn lemma_run(fx: &Fixture, seed: u64) -> LemmaCounts {
    let forcer = Forcer::new(&fx.poset, &fx.store, &fx.universe);
    let sem = Semantics::new(&fx.poset, &fx.store, &fx.universe);
    let oracle = (fx.poset.len() <= ORACLE_MAX_LEN).then(|| Oracle::new(&fx.poset, &fx.store, &fx.universe));
    let mut r = rng(seed);
    let mut out = LemmaCounts::default();
    let tag = |report: &classforce::Report| {
        report
            .violations()
            .iter()
            .map(|v| format!("{}: {v}", fx.label))
            .collect::<Vec<_>>()
    };
    for _ in 0..FORMULAS_PER_INSTANCE {
        let phi = random_formula(&mut r, &fx.universe, FORMULA_DEPTH);
        out.checks += fx.poset.len();
        out.star_vs_semantic
            .extend(tag(&lemmas::check_star_equals_semantic(&forcer, &sem, &phi).unwrap()));
        if let Some(oracle) = &oracle {
            let star = forcer.forcing_set(&phi).unwrap();
            for p in fx.poset.conds() {
                out.oracle_checks += 1;
                if star.contains(p) != oracle.forces(p, &phi) {
                    out.star_vs_semantic.push(format!(
                        "{}: reference disagrees at p={} phi={}",
                        fx.label,
                        fx.poset.id(p),
                        phi.display(&fx.store)
                    ));
                }
            }
        }
        out.truth
            .extend(tag(&lemmas::check_truth_lemma(&forcer, &sem, &phi).unwrap()));
        for report in [
            lemmas::check_monotonicity(&forcer, &phi).unwrap(),
            lemmas::check_density_lemma(&forcer, &phi).unwrap(),
            lemmas::check_consistency(&forcer, &phi).unwrap(),
        ] {
            out.auxiliary.extend(tag(&report));
        }
    }
    out
}

fn verdict(label: &str, problems: &[String], detail: String) -> Outcome {
    match problems.first() {
        None => Ok(detail),
        Some(first) => Err(format!("{} violations in {label}, first: {first}", problems.len())),
    }
}

fn names(corpus: &[Fixture]) -> Outcome {
    let mut problems = Vec::new();
    let mut r = rng(4);
    let posets: Vec<&Fixture> = corpus.iter().take(8).collect();
    for i in 0..HF_ROUND_TRIPS {
        let fx = posets[i % posets.len()];
        let x = random_hfset(&mut r, HF_MAX_RANK);
        let mut store = NameStore::new(&fx.poset);
        let name = store.check(&x);
        for g in Order::of(&fx.poset).generics() {
            if common::interpret(&store, name, g) != V::from_hf(&x) {
                problems.push(format!("check({x}) on {}", fx.label));
            }
        }
    }
    let mut pairs = 0usize;
    for fx in corpus {
        let order = Order::of(&fx.poset);
        for g in enumerate_generics(&fx.poset) {
            pairs += 1;
            let ext = Extension::build(&fx.store, &fx.universe, &fx.poset, &g);
            if let Err(e) = ext.check_transitive(&fx.store) {
                problems.push(format!("{}: {e}", fx.label));
            }
            for &id in fx.universe.all() {
                let v = common::interpret(&fx.store, id, mask(g.members()));
                if v.rank() > fx.store.rank(id) {
                    problems.push(format!("{}: rank of {}", fx.label, fx.store.display(id)));
                }
            }
            if let Ok(gamma) = fx.store.lookup("Gamma") {
                let codes: HfSet = (0..order.n)
                    .filter(|i| mask(g.members()) >> i & 1 == 1)
                    .map(|i| fx.poset.code(Cond::from_index(i)).clone())
                    .collect();
                if ext.value(gamma) != Some(&codes) {
                    problems.push(format!("{}: Gamma under G={}", fx.label, ext.generic));
                }
            }
        }
    }
    verdict(
        "name laws",
        &problems,
        format!("{HF_ROUND_TRIPS} HF round trips (rank <= {HF_MAX_RANK}), {pairs} (U,G) pairs"),
    )
}

fn tables(corpus: &[Fixture]) -> Outcome {
    let mut problems = Vec::new();
    let mut tuples = 0usize;
    for fx in corpus.iter().take(8) {
        let forcer = Forcer::new(&fx.poset, &fx.store, &fx.universe);
        let mut previous = None;
        for alpha in 1..=TABLE_MAX_ALPHA + 1 {
            let t = materialize_tables(&fx.poset, &fx.store, &fx.universe, alpha);
            if alpha <= TABLE_MAX_ALPHA {
                for (&(l, rel, r), set) in t.entries() {
                    for p in fx.poset.conds() {
                        tuples += 1;
                        if set.contains(p) != forcer.atom(p, l, rel, r) {
                            problems.push(format!("{}: alpha={alpha} p={}", fx.label, fx.poset.id(p)));
                        }
                    }
                }
            }
            let now = t.true_tuples();
            if let Some(before) = previous.replace(now.clone()) {
                if !now.is_superset(&before) {
                    problems.push(format!(
                        "{}: stage {} not contained in stage {alpha}",
                        fx.label,
                        alpha - 1
                    ));
                }
            }
        }
    }
    verdict(
        "tables",
        &problems,
        format!("{tuples} atomic tuples for alpha <= {TABLE_MAX_ALPHA}, stages increasing"),
    )
}

/// A random dense set: the minimal elements plus a random selection.
fn random_dense(r: &mut impl Rng, poset: &Poset) -> CondSet {
    let mut d = poset.minimal_elements();
    for c in poset.conds() {
        if r.gen_bool(0.3) {
            d.insert(c);
        }
    }
    d
}

fn tameness(corpus: &[Fixture]) -> Outcome {
    let mut problems = Vec::new();
    let mut r = rng(6);
    let (mut pretame, mut tame) = (0usize, 0usize);
    let mut kinds = [0usize; 2];
    for fx in corpus.iter().take(8) {
        let poset = &fx.poset;
        let order = Order::of(poset);
        for p in poset.conds() {
            for len in 1..=3 {
                let seq = DenseSequence::new(poset, (0..len).map(|_| random_dense(&mut r, poset)).collect()).unwrap();
                pretame += 1;
                match check_pretame(poset, &seq, p) {
                    Some(w) => {
                        let below_q = order.below[w.q.index()];
                        let ok = order.below[p.index()] >> w.q.index() & 1 == 1
                            && w.d.len() == len
                            && w.d.iter().zip(seq.sets()).all(|(d, big)| {
                                let d = mask(d);
                                d & !mask(big) == 0
                                    && (0..order.n)
                                        .filter(|&x| below_q >> x & 1 == 1)
                                        .all(|x| (0..order.n).any(|y| d >> y & 1 == 1 && order.compatible(x, y)))
                            });
                        if !ok {
                            problems.push(format!("{}: pretame witness for p={} fails", fx.label, poset.id(p)));
                        }
                    }
                    None => problems.push(format!("{}: no pretame witness for p={}", fx.label, poset.id(p))),
                }
            }
            for a in 1..=2 {
                tame += 1;
                match check_tame(poset, a, p, TAME_CAP) {
                    Ok(Some(found)) => match found.validation {
                        Validation::Enumerated => kinds[0] += 1,
                        Validation::DownwardClosed => kinds[1] += 1,
                        Validation::Reduced => problems.push(format!(
                            "{}: tame witness for p={} |a|={a} only checked in reduced form",
                            fx.label,
                            poset.id(p)
                        )),
                    },
                    Ok(None) => problems.push(format!("{}: no tame witness for p={}", fx.label, poset.id(p))),
                    Err(e) => problems.push(format!("{}: {e}", fx.label)),
                }
            }
        }
    }
    let mut distributive = 0usize;
    for i in 0..DISTRIBUTIVE_POSETS {
        let poset = random_poset(&mut rng(6000 + i as u64), MAX_RANDOM_LEN);
        for beta in 1..=2 {
            match check_distributive(&poset, beta, TAME_CAP) {
                Ok(true) => distributive += 1,
                Ok(false) => problems.push(format!("random{i}: not {beta}-distributive")),
                Err(e) => problems.push(format!("random{i}: {e}")),
            }
            match check_distributive_implies_tame(&poset, beta + 1, TAME_CAP) {
                Ok(report) => problems.extend(report.violations().iter().map(|v| format!("random{i}: {v}"))),
                Err(e) => problems.push(format!("random{i}: {e}")),
            }
        }
    }
    verdict(
        "tameness",
        &problems,
        format!(
            "{pretame} pretame and {tame} tame witnesses ({} enumerated, {} downward-closed), {distributive} distributive runs",
            kinds[0], kinds[1]
        ),
    )
}

fn is_automorphism_by_oracle(order: &Order, pi: &PosetAutomorphism) -> bool {
    let map: Vec<usize> = pi.map().iter().map(|c| c.index()).collect();
    let mut seen = vec![false; order.n];
    for &j in &map {
        if std::mem::replace(&mut seen[j], true) {
            return false;
        }
    }
    (0..order.n).all(|x| (0..order.n).all(|y| (order.below[y] >> x & 1) == (order.below[map[y]] >> map[x] & 1)))
}

fn homogeneity(corpus: &[Fixture]) -> Outcome {
    let mut problems = Vec::new();
    let mut posets: Vec<(String, Poset)> = (1..=4).map(|n| (format!("C{n}"), Poset::cohen(n).unwrap())).collect();
    let c2 = Poset::cohen(2).unwrap();
    posets.push(("C2xC2".into(), Poset::product(&c2, &c2)));
    let mut witnesses = 0usize;
    for (label, poset) in &posets {
        let order = Order::of(poset);
        if let Err(e) = check_weak_homogeneity(poset, ENUMERATION_CAP) {
            problems.push(format!("{label}: {e}"));
        }
        let mut cache = WitnessCache::new(ENUMERATION_CAP);
        for p in poset.conds() {
            for q in poset.conds() {
                witnesses += 1;
                match homogeneity_witness(poset, p, q, &mut cache) {
                    Ok(pi) => {
                        if !is_automorphism_by_oracle(&order, &pi) || !order.compatible(pi.apply(p).index(), q.index())
                        {
                            problems.push(format!(
                                "{label}: witness {} for ({}, {})",
                                pi.descriptor(),
                                poset.id(p),
                                poset.id(q)
                            ));
                        }
                    }
                    Err(e) => problems.push(format!("{label}: {e}")),
                }
            }
        }
    }
    let (mut images, mut transports) = (0usize, 0usize);
    for fx in corpus.iter().filter(|fx| fx.poset.len() <= ENUMERATION_CAP) {
        let generics = Order::of(&fx.poset).generics();
        let autos = enumerate_automorphisms(&fx.poset, ENUMERATION_CAP).unwrap();
        let mut store = fx.store.clone();
        for pi in &autos {
            for g in enumerate_generics(&fx.poset) {
                images += 1;
                let image = match transported_generic(&fx.poset, pi, &g) {
                    Ok(image) => image,
                    Err(e) => {
                        problems.push(format!("{}: {e}", fx.label));
                        continue;
                    }
                };
                if !generics.contains(&mask(image.members())) {
                    problems.push(format!(
                        "{}: image of G={} not generic",
                        fx.label,
                        fx.poset.id(g.least())
                    ));
                }
                for &id in fx.universe.all() {
                    transports += 1;
                    let moved = store.relabel(id, pi.map());
                    let there = common::interpret(&store, moved, mask(image.members()));
                    if there != common::interpret(&store, id, mask(g.members())) {
                        problems.push(format!("{}: transport of {}", fx.label, store.display(id)));
                    }
                }
            }
        }
    }
    verdict(
        "homogeneity",
        &problems,
        format!("{witnesses} witnesses on C1..C4 and C2xC2, {images} generic images, {transports} name transports"),
    )
}

fn genericity() -> Outcome {
    let mut problems = Vec::new();
    let mut posets: Vec<(String, Poset)> = fixtures()
        .into_iter()
        .filter(|fx| fx.poset.len() <= GENERIC_MAX_LEN)
        .map(|fx| (fx.label, fx.poset))
        .collect();
    posets.extend((0..GENERIC_POSETS).map(|i| {
        (
            format!("random{i}"),
            random_poset(&mut rng(8000 + i as u64), GENERIC_MAX_LEN),
        )
    }));
    let mut largest = 0;
    for (label, poset) in &posets {
        largest = largest.max(poset.len());
        let order = Order::of(poset);
        let mut ours: Vec<u128> = enumerate_generics(poset).iter().map(|g| mask(g.members())).collect();
        let mut principal = order.generics_by_minimal();
        let mut defined = order.generics_by_definition();
        ours.sort_unstable();
        principal.sort_unstable();
        defined.sort_unstable();
        if ours != principal || ours != defined {
            problems.push(format!("{label}: generics differ"));
        }
        for &g in &ours {
            if is_generic_exhaustive(poset, &conds_of(poset.len(), g), GENERIC_MAX_LEN) != Ok(true) {
                problems.push(format!("{label}: exhaustive check rejects a generic"));
            }
        }
    }
    verdict(
        "genericity",
        &problems,
        format!("{} posets up to {largest} elements", posets.len()),
    )
}

fn main() {
    let corpus = corpus();
    let mut failed = false;
    let mut report = |n: usize, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS {n} {name}: {detail}"),
        Err(why) => {
            failed = true;
            println!("FAIL {n} {name}: {why}");
        }
    };

    let start = Instant::now();
    let counts = corpus
        .par_iter()
        .enumerate()
        .map(|(i, fx)| lemma_run(fx, 42 + i as u64))
        .reduce(LemmaCounts::default, LemmaCounts::merge);
    let elapsed = start.elapsed();
    let scale = format!(
        "{} instances x {FORMULAS_PER_INSTANCE} formulas (depth <= {FORMULA_DEPTH}), {} (p, phi) pairs",
        corpus.len(),
        counts.checks
    );
    let timed = if elapsed <= TIME_BUDGET {
        verdict(
            "forcing vs semantics",
            &counts.star_vs_semantic,
            format!(
                "{scale}, {} also against the reference evaluator, in {:.1}s",
                counts.oracle_checks,
                elapsed.as_secs_f64()
            ),
        )
    } else {
        Err(format!(
            "took {:.1}s, budget {}s",
            elapsed.as_secs_f64(),
            TIME_BUDGET.as_secs()
        ))
    };
    report(1, "oracle equivalence", timed);
    report(2, "truth lemma", verdict("truth lemma", &counts.truth, scale.clone()));
    report(
        3,
        "auxiliary lemmas",
        verdict("auxiliary lemmas", &counts.auxiliary, scale),
    );
    report(4, "name laws", names(&corpus));
    report(5, "table consistency", tables(&corpus));
    report(6, "tameness", tameness(&corpus));
    report(7, "homogeneity", homogeneity(&corpus));
    report(8, "genericity characterization", genericity());

    if failed {
        std::process::exit(1);
    }
}
