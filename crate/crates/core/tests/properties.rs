//! Randomized laws, driven by seeds so that failures shrink to a seed.

mod common;

use proptest::prelude::*;

use classforce::corpus::{random_formula, random_hfset, random_instance, random_poset, rng};
use classforce::forcing::{enumerate_generics, lemmas, Forcer, Semantics};
use classforce::instance::{Instance, InstanceFile, PosetSpec};
use classforce::names::NameStore;
use classforce::order::Poset;
use common::{Oracle, Order, V};

fn mask(g: &classforce::order::CondSet) -> u128 {
    g.iter().fold(0, |m, c| m | 1 << c.index())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forcing_agrees_with_the_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 5, "p".into());
        let forcer = Forcer::new(&inst.poset, &inst.store, &inst.universe);
        let oracle = Oracle::new(&inst.poset, &inst.store, &inst.universe);
        for _ in 0..20 {
            let phi = random_formula(&mut r, &inst.universe, 3);
            for p in inst.poset.conds() {
                prop_assert_eq!(forcer.forces_star(p, &phi).unwrap(), oracle.forces(p, &phi));
            }
        }
    }

    #[test]
    fn lemma_checks_are_clean(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 5, "p".into());
        let forcer = Forcer::new(&inst.poset, &inst.store, &inst.universe);
        let sem = Semantics::new(&inst.poset, &inst.store, &inst.universe);
        for _ in 0..10 {
            let phi = random_formula(&mut r, &inst.universe, 3);
            let report = lemmas::check_all(&forcer, &sem, &phi).unwrap();
            prop_assert!(report.is_clean(), "{}", report);
        }
    }

    #[test]
    fn generics_match_the_definition(seed in any::<u64>()) {
        let p = random_poset(&mut rng(seed), 8);
        let ours: Vec<u128> = enumerate_generics(&p).iter().map(|g| mask(g.members())).collect();
        let mut reference = Order::of(&p).generics_by_definition();
        let mut sorted = ours.clone();
        sorted.sort_unstable();
        reference.sort_unstable();
        prop_assert_eq!(sorted, reference);
    }

    #[test]
    fn canonical_names_interpret_to_themselves(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_poset(&mut r, 4);
        let mut store = NameStore::new(&p);
        let x = random_hfset(&mut r, 4);
        let name = store.check(&x);
        prop_assert_eq!(store.rank(name), x.rank() + 1);
        for g in enumerate_generics(&p) {
            prop_assert_eq!(&store.interpret(name, g.members()), &x);
        }
    }

    #[test]
    fn interpretation_never_raises_rank(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 6, "p".into());
        for g in enumerate_generics(&inst.poset) {
            for &id in inst.universe.all() {
                let v = V::from_hf(&inst.store.interpret(id, g.members()));
                prop_assert!(v.rank() <= inst.store.rank(id));
                prop_assert_eq!(v, common::interpret(&inst.store, id, mask(g.members())));
            }
        }
    }

    #[test]
    fn instance_files_round_trip(seed in any::<u64>()) {
        let p = random_poset(&mut rng(seed), 7);
        let mut order = Vec::new();
        for x in p.conds() {
            for y in p.conds().filter(|&y| p.lt(x, y)) {
                order.push((p.id(x).to_string(), p.id(y).to_string()));
            }
        }
        let file = InstanceFile {
            poset: PosetSpec::Explicit {
                elements: p.ids().to_vec(),
                top: "top".into(),
                order,
                codes: None,
            },
            names: Default::default(),
            classes: Default::default(),
            universe: None,
            formulas: Default::default(),
        };
        let inst = Instance::from_file(file).unwrap();
        let again = Instance::from_json(&inst.to_json()).unwrap();
        prop_assert_eq!(again.poset.ids(), p.ids());
        for x in p.conds() {
            prop_assert_eq!(again.poset.below(x), p.below(x));
            prop_assert_eq!(again.poset.code(x), p.code(x));
        }
    }
}

#[test]
fn products_of_valid_posets_are_posets() {
    let mut r = rng(11);
    for _ in 0..20 {
        let (a, b) = (random_poset(&mut r, 3), random_poset(&mut r, 3));
        let prod = Poset::product(&a, &b);
        let order = Order::of(&prod);
        for x in 0..order.n {
            for y in 0..order.n {
                let (xy, yx) = (order.below[y] >> x & 1 == 1, order.below[x] >> y & 1 == 1);
                assert!(!(xy && yx) || x == y);
                for z in 0..order.n {
                    if xy && order.below[z] >> y & 1 == 1 {
                        assert!(order.below[z] >> x & 1 == 1);
                    }
                }
            }
        }
    }
}
