use chabauty_lab::chabauty::{distance_up_to, trace};
use chabauty_lab::dynamics::{free_product_certify, FreeProduct};
use chabauty_lab::{Budget, FreeGroup, GroupContext, HnfSubgroup, Letter, Space, StallingsGraph, Subgroup, Word};
use proptest::prelude::*;

fn word_strategy(rank: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=rank, any::<bool>()), 0..=max_len)
        .prop_map(|raw| Word::reduce(&raw.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect::<Vec<_>>()))
}

fn gens_strategy() -> impl Strategy<Value = Vec<Word>> {
    prop::collection::vec(word_strategy(2, 4), 1..=3)
}

fn sub(gens: &[Word]) -> StallingsGraph {
    StallingsGraph::from_generators(GroupContext::free(2).unwrap(), gens).unwrap()
}

fn ball(radius: usize) -> Vec<Word> {
    FreeGroup::new(2).ball(radius, &Budget::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_is_idempotent(u in word_strategy(3, 12)) {
        prop_assert_eq!(Word::reduce(u.letters()), u.clone());
        prop_assert!(u.letters().windows(2).all(|p| p[0] != p[1].inverse()));
    }

    #[test]
    fn multiplication_is_associative(u in word_strategy(2, 8), v in word_strategy(2, 8), x in word_strategy(2, 8)) {
        prop_assert_eq!(&(&u * &v) * &x, &u * &(&v * &x));
    }

    #[test]
    fn inversion_reverses_products(u in word_strategy(2, 8), v in word_strategy(2, 8)) {
        prop_assert_eq!((&u * &v).inverse(), &v.inverse() * &u.inverse());
        prop_assert!((&u * &u.inverse()).is_identity());
    }

    #[test]
    fn folding_ignores_generator_order(gens in gens_strategy()) {
        let h = sub(&gens);
        let mut reversed = gens.clone();
        reversed.reverse();
        prop_assert_eq!(&sub(&reversed), &h);
        let mut redundant = gens.clone();
        redundant.push(&gens[0] * &gens[gens.len() - 1].inverse());
        redundant.push(Word::identity());
        redundant.push(gens[0].pow(-2));
        prop_assert_eq!(&sub(&redundant), &h);
        prop_assert_eq!(&sub(&h.generators()), &h);
    }

    #[test]
    fn intersection_and_join_are_coherent(a in gens_strategy(), b in gens_strategy()) {
        let (h, k) = (sub(&a), sub(&b));
        let meet = h.intersect(&k);
        let join = h.join(&k);
        for x in ball(5) {
            prop_assert_eq!(meet.contains(&x), h.contains(&x) && k.contains(&x));
            if h.contains(&x) || k.contains(&x) {
                prop_assert!(join.contains(&x));
            }
        }
    }

    #[test]
    fn conjugation_round_trips(gens in gens_strategy(), g in word_strategy(2, 4)) {
        let h = sub(&gens);
        let conj = h.conjugate_subgroup(&g);
        prop_assert_eq!(&conj.conjugate_subgroup(&g.inverse()), &h);
        prop_assert_eq!(conj.index(), h.index());
        for x in ball(4) {
            prop_assert_eq!(conj.contains(&x), h.contains(&(&(&g.inverse() * &x) * &g)));
        }
    }

    #[test]
    fn distance_is_an_ultrametric(a in gens_strategy(), b in gens_strategy(), c in gens_strategy()) {
        let budget = Budget::default();
        let (h, k, m) = (sub(&a), sub(&b), sub(&c));
        let d = |x: &StallingsGraph, y: &StallingsGraph| distance_up_to(x, y, 6, &budget).unwrap().exponent();
        prop_assert_eq!(d(&h, &k), d(&k, &h));
        prop_assert_eq!(d(&h, &h), 7);
        prop_assert!(d(&h, &k) >= d(&h, &m).min(d(&m, &k)));
    }

    #[test]
    fn traces_restrict_consistently(gens in gens_strategy(), r in 0usize..5) {
        let budget = Budget::default();
        let h = sub(&gens);
        let big = trace(&h, 5, &budget).unwrap();
        prop_assert_eq!(big.restrict(r, Word::len), trace(&h, r, &budget).unwrap());
        prop_assert!(big.members.iter().all(|x| h.contains(x) && x.len() <= 5));
        prop_assert!(big.members.windows(2).all(|p| p[0] < p[1]));
        prop_assert_eq!(big.members.first(), Some(&Word::identity()));
    }

    #[test]
    fn completion_agrees_and_obeys_schreier(gens in gens_strategy(), r in 1usize..4) {
        let budget = Budget::default();
        let h = sub(&gens);
        let k = h.hall_completion(r, &budget).unwrap();
        prop_assert!(k.is_covering());
        prop_assert!(distance_up_to(&h, &k, r, &budget).unwrap().exponent() > r);
        let index = match k.index() {
            chabauty_lab::Index::Finite(i) => i as usize,
            chabauty_lab::Index::Infinite => unreachable!("coverings have finite index"),
        };
        prop_assert_eq!(k.generators().len(), index + 1);
    }

    #[test]
    fn free_products_have_no_short_relations(a in gens_strategy(), b in gens_strategy(), picks in prop::collection::vec(any::<prop::sample::Index>(), 2..=8)) {
        let (h, k) = (sub(&a), sub(&b));
        if free_product_certify(&h, &k) == FreeProduct::Certified {
            let short = |s: &StallingsGraph| -> Vec<Word> {
                ball(4).into_iter().filter(|x| !x.is_identity() && s.contains(x)).collect()
            };
            let (xs, ys) = (short(&h), short(&k));
            if !xs.is_empty() && !ys.is_empty() {
                let mut product = Word::identity();
                for (i, p) in picks.iter().enumerate() {
                    let pool = if i % 2 == 0 { &xs } else { &ys };
                    product = &product * p.get(pool);
                }
                prop_assert!(!product.is_identity());
            }
        }
    }

    #[test]
    fn hnf_ignores_order_and_redundancy(vs in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 0..=4)) {
        let h = HnfSubgroup::from_generators(3, &vs).unwrap();
        let mut shuffled = vs.clone();
        shuffled.reverse();
        if let (Some(x), Some(y)) = (vs.first(), vs.last()) {
            shuffled.push(x.iter().zip(y).map(|(a, b)| 2 * a - b).collect());
        }
        let k = HnfSubgroup::from_generators(3, &shuffled).unwrap();
        prop_assert_eq!(&k, &h);
        for v in &vs {
            prop_assert!(h.membership(v).unwrap());
        }
        prop_assert_eq!(h.cb_erasing_rank(), 3 - h.rank() + 1);
    }
}
