use asymcone::filters::{self, FilterBase};
use asymcone::{sample, IndexSet, SetRule, Verdict};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const H: u128 = 1_000_000;

#[test]
fn named_sets() {
    let pow2 = IndexSet::from_rule(SetRule::Powers { base: 2 }, H);
    assert_eq!(filters::is_fast(&pow2), Verdict::Holds);
    assert_eq!(filters::is_thin(&pow2), Verdict::Fails);
    assert_eq!(filters::thin_implies_fast(&pow2), None);
    let fact = IndexSet::from_rule_terms(SetRule::Factorials, 15).unwrap();
    assert_eq!(filters::is_thin(&fact), Verdict::Holds);
    let tower = IndexSet::from_rule_terms(SetRule::Tower { base: 2 }, 6).unwrap();
    assert_eq!(filters::is_thin(&tower), Verdict::Holds);
    let squares = IndexSet::from_rule(SetRule::Polynomial { exp: 2 }, H);
    assert_eq!(filters::is_fast(&squares), Verdict::Holds);
    let odd = IndexSet::from_rule(SetRule::Arithmetic { start: 1, step: 2 }, H);
    assert_eq!(filters::is_fast(&odd), Verdict::Fails);
}

#[test]
fn hundred_thin_sets_are_never_slow() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..100 {
        let t = sample::thin_set(&mut rng, 20);
        assert_eq!(filters::is_thin(&t), Verdict::Holds, "{t}");
        assert_eq!(filters::thin_implies_fast(&t), Some(Verdict::Holds), "{t}");
    }
}

#[test]
fn hundred_fast_pairs_stay_fast() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let a = sample::fast_set(&mut rng, H);
        let b = sample::fast_set(&mut rng, H);
        assert_ne!(filters::union_preserves_fast(&a, &b), Some(Verdict::Fails), "{a} ∪ {b}");
    }
}

fn subset(h: u128) -> impl Strategy<Value = IndexSet> {
    proptest::collection::vec(any::<bool>(), h as usize).prop_map(move |bits| {
        let elems = bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i as u128 + 1);
        IndexSet::from_elems(elems, h).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_respects_inclusion(a in subset(300), b in subset(300), x in 1u128..=300) {
        let small = a.intersection(&b);
        prop_assert!(filters::density_ratio(&small, x).unwrap() <= filters::density_ratio(&a, x).unwrap());
    }

    /// A base never contains both a set and its complement.
    #[test]
    fn no_set_with_its_complement(g in subset(400), s in subset(400)) {
        prop_assume!(!g.is_empty());
        let base = FilterBase::new(vec![g]).unwrap();
        let (a, b) = (base.member(&s), base.member(&s.complement()));
        prop_assert!(!(a.holds() && b.holds()));
        prop_assert_eq!(a.holds(), b.fails());
    }

    /// Refining a base never loses members.
    #[test]
    fn refinement_keeps_members(g in subset(400), r in subset(400), s in subset(400)) {
        let base = FilterBase::new(vec![g]).unwrap();
        let finer = base.refine(r).unwrap();
        prop_assume!(!finer.tail().is_empty());
        if base.member(&s).holds() {
            prop_assert!(finer.member(&s).holds());
        }
    }
}
