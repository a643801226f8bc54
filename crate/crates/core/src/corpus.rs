//! Seeded random posets, universes, formulas and HF sets, plus the standard
//! fixtures used by the test suites and the command line.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::hf::HfSet;
use crate::logic::{Formula, Rel, Sort, Term, Var};
use crate::names::{NameStore, Universe};
use crate::order::Poset;

pub use rand::SeedableRng;

/// The random number generator used throughout; reproducible from a seed.
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A poset with its names and the universe built over them.
pub struct Fixture {
    pub label: String,
    pub poset: Poset,
    pub store: NameStore,
    pub universe: Universe,
}

/// A random poset with 1 to `max_len` elements. Element `top` is first; each
/// later element sits below `top` and below a random selection of earlier
/// elements.
pub fn random_poset(rng: &mut impl Rng, max_len: usize) -> Poset {
    let n = rng.gen_range(1..=max_len.max(1));
    let ids: Vec<String> = std::iter::once("top".to_string())
        .chain((1..n).map(|i| format!("p{i}")))
        .collect();
    let mut order = Vec::new();
    for i in 1..n {
        order.push((ids[i].clone(), ids[0].clone()));
        for j in 1..i {
            if rng.gen_bool(0.35) {
                order.push((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    Poset::from_generators(&ids, "top", &order, None).expect("edges only point to earlier elements")
}

/// The empty name, a few random set-names of rank 2 and a few class-names
/// over them.
pub fn random_universe(rng: &mut impl Rng, poset: &Poset, store: &mut NameStore) -> Universe {
    let conds: Vec<_> = poset.conds().collect();
    let nu0 = store.empty_name();
    let mut sets = vec![nu0];
    for _ in 0..rng.gen_range(2..=3) {
        let k = rng.gen_range(1..=conds.len().min(3));
        let pairs: Vec<_> = conds.choose_multiple(rng, k).map(|&r| (nu0, r)).collect();
        sets.push(store.mk_set_name(pairs).expect("valid pairs"));
    }
    let mut roots = sets.clone();
    for _ in 0..rng.gen_range(1..=2) {
        let k = rng.gen_range(0..=3);
        let pairs: Vec<_> = (0..k)
            .map(|_| {
                (
                    *sets.choose(rng).expect("nonempty"),
                    *conds.choose(rng).expect("nonempty"),
                )
            })
            .collect();
        roots.push(store.mk_class_name(pairs).expect("valid pairs"));
    }
    Universe::closed(store, roots)
}

/// A random closed formula of depth at most `depth` whose constants come from
/// the universe.
pub fn random_formula(rng: &mut impl Rng, universe: &Universe, depth: usize) -> Formula {
    gen_formula(rng, universe, depth, &mut Vec::new())
}

const VAR_NAMES: [&str; 8] = ["x", "y", "z", "w", "X", "Y", "Z", "W"];

fn gen_term(rng: &mut impl Rng, universe: &Universe, bound: &[Var]) -> Term {
    if !bound.is_empty() && rng.gen_bool(0.6) {
        Term::Var(bound.choose(rng).expect("nonempty").clone())
    } else {
        Term::Name(*universe.all().choose(rng).expect("universes are nonempty"))
    }
}

fn gen_formula(rng: &mut impl Rng, universe: &Universe, depth: usize, bound: &mut Vec<Var>) -> Formula {
    let atom = depth == 0 || rng.gen_bool(0.2);
    if atom {
        let rel = if rng.gen_bool(0.5) { Rel::Mem } else { Rel::Eq };
        let (a, b) = (gen_term(rng, universe, bound), gen_term(rng, universe, bound));
        return Formula::Atom(rel, a, b);
    }
    let sub = depth - 1;
    match rng.gen_range(0..6) {
        0 => Formula::not(gen_formula(rng, universe, sub, bound)),
        1 => Formula::and(
            gen_formula(rng, universe, sub, bound),
            gen_formula(rng, universe, sub, bound),
        ),
        2 => Formula::or(
            gen_formula(rng, universe, sub, bound),
            gen_formula(rng, universe, sub, bound),
        ),
        3 => Formula::iff(
            gen_formula(rng, universe, sub, bound),
            gen_formula(rng, universe, sub, bound),
        ),
        _ => {
            let sort = if rng.gen_bool(0.6) { Sort::Set } else { Sort::Class };
            let offset = if sort == Sort::Set { 0 } else { 4 };
            let var = Var::new(VAR_NAMES[offset + rng.gen_range(0..4)]).expect("valid variable names");
            bound.push(var.clone());
            let body = gen_formula(rng, universe, sub, bound);
            bound.pop();
            if rng.gen_bool(0.5) {
                Formula::forall(var, body)
            } else {
                Formula::exists(var, body)
            }
        }
    }
}

/// A random HF set of rank at most `max_rank`.
pub fn random_hfset(rng: &mut impl Rng, max_rank: u32) -> HfSet {
    if max_rank == 0 || rng.gen_bool(0.15) {
        return HfSet::empty();
    }
    let k = rng.gen_range(0..=3);
    (0..k).map(|_| random_hfset(rng, max_rank - 1)).collect()
}

/// A random poset with a random universe.
pub fn random_instance(rng: &mut impl Rng, max_len: usize, label: String) -> Fixture {
    let poset = random_poset(rng, max_len);
    let mut store = NameStore::new(&poset);
    let universe = random_universe(rng, &poset, &mut store);
    Fixture {
        label,
        poset,
        store,
        universe,
    }
}

/// Names shared by every fixture: the empty name `nu0`, `tau0` to `tau2`
/// (`{(nu0, c)}` for the first conditions `c` below top), `sigma` (`{(nu0, top)}`),
/// `pair` (the pairing name of `nu0` and the first `tau`), the class
/// `Gamma` naming the generic, and `Odd`, a class over the `tau` names.
fn fixture(label: &str, poset: Poset) -> Fixture {
    let mut store = NameStore::new(&poset);
    let nu0 = store.empty_name();
    store.set_label(nu0, "nu0").expect("fresh label");
    let mut roots = vec![nu0];
    let mut taus = Vec::new();
    for (i, c) in poset.conds().filter(|&c| c != poset.top()).take(3).enumerate() {
        let tau = store.mk_set_name([(nu0, c)]).expect("valid pairs");
        store.set_label(tau, &format!("tau{i}")).expect("fresh label");
        roots.push(tau);
        taus.push((tau, c));
    }
    let sigma = store.mk_set_name([(nu0, poset.top())]).expect("valid pairs");
    store.set_label(sigma, "sigma").expect("fresh label");
    roots.push(sigma);
    if let Some(&(tau, _)) = taus.first() {
        let pair = store.pairing_name(nu0, tau).expect("set-names");
        store.set_label(pair, "pair").expect("fresh label");
        roots.push(pair);
    }
    let gamma = store.generic_name(&poset);
    store.set_label(gamma, "Gamma").expect("fresh label");
    roots.push(gamma);
    let odd: Vec<_> = taus.iter().rev().copied().chain([(sigma, poset.top())]).collect();
    let odd = store.mk_class_name(odd).expect("valid pairs");
    store.set_label(odd, "Odd").expect("fresh label");
    roots.push(odd);
    let universe = Universe::closed(&store, roots);
    Fixture {
        label: label.to_string(),
        poset,
        store,
        universe,
    }
}

/// `top` above two incomparable conditions `a` and `b`.
pub fn f1_poset() -> Poset {
    Poset::from_generators(&["top", "a", "b"], "top", &[("a", "top"), ("b", "top")], None).expect("valid poset")
}

/// A chain `top > c1 > ... > c(len-1)`.
pub fn chain(len: usize) -> Poset {
    let ids: Vec<String> = std::iter::once("top".to_string())
        .chain((1..len).map(|i| format!("c{i}")))
        .collect();
    let order: Vec<(String, String)> = ids.windows(2).map(|w| (w[1].clone(), w[0].clone())).collect();
    Poset::from_generators(&ids, "top", &order, None).expect("valid chain")
}

/// F1, chains of length 1 to 4, Cohen(2), Cohen(3) and Cohen(2) × Cohen(2),
/// each with the fixture names.
pub fn fixtures() -> Vec<Fixture> {
    let c2 = Poset::cohen(2).expect("small Cohen poset");
    let mut out = vec![fixture("F1", f1_poset())];
    for len in 1..=4 {
        out.push(fixture(&format!("chain{len}"), chain(len)));
    }
    out.push(fixture("C2", c2.clone()));
    out.push(fixture("C3", Poset::cohen(3).expect("small Cohen poset")));
    out.push(fixture("C2xC2", Poset::product(&c2, &c2)));
    out
}
