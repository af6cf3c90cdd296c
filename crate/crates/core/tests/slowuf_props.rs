use asymcone::filters::{self, FilterBase};
use asymcone::rational::{int, rat};
use asymcone::slowuf::{self, Seed};
use asymcone::{sample, BigRational, IndexSet, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ls() -> Vec<BigRational> {
    vec![int(2), rat(3, 2), rat(5, 4), rat(9, 8)]
}

#[test]
fn ratio_bounds_on_thin_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seeds: Vec<IndexSet> = (0..30).map(|_| sample::thin_set(&mut rng, 20)).collect();
    seeds.push(slowuf::seed_set(Seed::Factorial, 12).unwrap());
    seeds.push(slowuf::seed_set(Seed::Tower, 11).unwrap());
    for a in &seeds {
        for l in ls() {
            let sys = slowuf::make_intervals(a, &l).unwrap();
            assert!(sys.dropped() <= sys.disjointness_bound());
            assert!(sys.overlaps().is_none());
            let nf = slowuf::verify_not_fast(&sys, a).unwrap();
            let cnf = slowuf::verify_complement_not_fast(&sys, a).unwrap();
            assert_eq!(nf.verdict, Verdict::Holds, "{a} L={l}");
            assert_eq!(cnf.verdict, Verdict::Holds, "{a} L={l}");
            assert!(nf.witnesses.iter().chain(&cnf.witnesses).all(|w| w.ok && w.ratio >= w.bound));
            assert_ne!(filters::is_fast(&sys.x_li(a).unwrap()), Verdict::Holds);
        }
    }
}

#[test]
fn chain_on_thin_corpus() {
    for a in [slowuf::seed_set(Seed::Factorial, 12).unwrap(), slowuf::seed_set(Seed::Tower, 5).unwrap()] {
        assert_eq!(slowuf::ascending_chain(&a, &ls()).unwrap().verdict, Verdict::Holds, "{a}");
    }
    // Seeds far past the slow-base cap: containment is still exact, FIP may
    // stay undecided but never fails.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let a = sample::thin_set(&mut rng, 18);
        for family in [ls(), slowuf::default_ls(5)] {
            let rep = slowuf::ascending_chain(&a, &family).unwrap();
            assert!(rep.counterexample.is_none());
            assert_ne!(rep.verdict, Verdict::Fails, "{a}");
        }
        let mut rev = ls();
        rev.reverse();
        assert_eq!(slowuf::ascending_chain(&a, &rev).unwrap().verdict, Verdict::Fails);
    }
}

#[test]
fn pushforward_agrees_on_random_index_sets() {
    let a = slowuf::seed_set(Seed::Factorial, 14).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut decided = 0;
    for k in 0..60 {
        let l = &ls()[k % 4];
        let sys = slowuf::make_intervals(&a, l).unwrap();
        let kept = sys.kept_seed();
        let i = sample::random_subset(&mut rng, &kept);
        let s = sample::random_subset(&mut rng, &a);
        let direct = FilterBase::new(vec![i.clone()]).unwrap().member(&s);
        let moved = slowuf::transported_membership(&sys, &i, &s).unwrap();
        assert_eq!(direct, moved, "I = {i}, S = {s}");
        decided += usize::from(!direct.is_undetermined());
    }
    assert!(decided > 0);
}

#[test]
fn phi_ignores_dropped_prefix_and_agrees_on_i() {
    let a = slowuf::seed_set(Seed::Factorial, 12).unwrap();
    let sys = slowuf::make_intervals(&a, &int(2)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let x = sample::point_map(&mut rng, &a, 6);
        let i = sample::random_subset(&mut rng, &sys.kept_seed());
        // Change x off I only.
        let mut x2 = x.clone();
        for (k, v) in x2.iter_mut() {
            if !i.contains(*k) {
                *v = rng.gen_range(0..6);
            }
        }
        let (p, q) = (
            slowuf::build_phi(&x, &sys, 0).unwrap(),
            slowuf::build_phi(&x2, &sys, 0).unwrap(),
        );
        for (lo, hi) in sys.x_li(&i).unwrap().runs() {
            for m in [*lo, (lo + hi) / 2, *hi] {
                assert_eq!(p.at(m), q.at(m));
            }
        }
    }
}
