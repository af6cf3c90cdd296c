//! Seeded generators for the test corpora.
//!
//! Every generator draws from a caller-supplied RNG, so a fixed seed gives a
//! fixed corpus.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::Rng;

use crate::indexset::IndexSet;
use crate::metric::FiniteMetricSpace;
use crate::rational::{int, rat};
use crate::ultralimit::{RationalSequence, Scaling};

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("y{i}")).collect()
}

/// `n` points, basepoint `y0`, every nonzero distance in `{8/8, 9/8, …, 16/8}`.
/// Any such matrix is a metric since `1 + 1 ≥ 2`.
pub fn band_space<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace {
    FiniteMetricSpace::from_fn(labels(n), 0, |_, _| rat(rng.gen_range(8..=16), 8))
        .expect("square matrix")
}

/// A random metric on `n` points: random symmetric weights in
/// `{1/4, …, max/4}` closed under shortest paths.
#[allow(clippy::needless_range_loop)]
pub fn random_metric<R: Rng>(rng: &mut R, n: usize, max: i64) -> FiniteMetricSpace {
    let mut d = vec![vec![int(0); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rat(rng.gen_range(1..=max), 4);
            d[i][j] = w.clone();
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::from_rows(labels(n), d, 0, false).expect("square matrix")
}

/// A random metric on between 1 and `max_points` points.
pub fn small_metric<R: Rng>(rng: &mut R, max_points: usize) -> FiniteMetricSpace {
    let n = rng.gen_range(1..=max_points);
    random_metric(rng, n, 12)
}

/// A thin set of `terms` elements: `aₙ₊₁ = aₙ·mₙ` with `mₙ = b·n + jₙ`,
/// `0 ≤ jₙ < b`, so the multipliers strictly increase. The horizon is the
/// last element.
pub fn thin_set<R: Rng>(rng: &mut R, terms: usize) -> IndexSet {
    let b: u128 = rng.gen_range(2..=4);
    let mut a: u128 = rng.gen_range(1..=9);
    let mut elems = vec![a];
    for n in 1..terms as u128 {
        let m = b * n + rng.gen_range(0..b);
        match a.checked_mul(m) {
            Some(next) => a = next,
            None => break,
        }
        elems.push(a);
    }
    IndexSet::from_elems(elems, a).expect("strictly increasing")
}

/// A fast set below `horizon`: either powers of 2 from a random offset, or
/// partial sums of gaps `c·n + jitter`.
pub fn fast_set<R: Rng>(rng: &mut R, horizon: u128) -> IndexSet {
    let mut elems = Vec::new();
    if rng.gen_bool(0.3) {
        let mut a: u128 = rng.gen_range(1..=3);
        while a <= horizon {
            elems.push(a);
            a *= 2;
        }
    } else {
        let c: u128 = rng.gen_range(1..=6);
        let mut a: u128 = rng.gen_range(1..=10);
        let mut n = 1u128;
        while a <= horizon {
            elems.push(a);
            a += c * n + rng.gen_range(0..=c);
            n += 1;
        }
    }
    IndexSet::from_elems(elems, horizon).expect("strictly increasing")
}

/// Random point index for each element of `seed`.
pub fn point_map<R: Rng>(rng: &mut R, seed: &IndexSet, points: usize) -> BTreeMap<u128, usize> {
    seed.iter().map(|a| (a, rng.gen_range(0..points))).collect()
}

/// Random subset of `seed`, each element kept with probability 1/2,
/// never empty.
pub fn random_subset<R: Rng>(rng: &mut R, seed: &IndexSet) -> IndexSet {
    let all: Vec<u128> = seed.iter().collect();
    let mut pick: Vec<u128> = all.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    if pick.is_empty() {
        pick.push(all[rng.gen_range(0..all.len())]);
    }
    IndexSet::from_elems(pick, seed.horizon()).expect("subset of an ascending list")
}

/// One case for the bounded-perturbation check: `x = c·α`, `α = K·nᵏ`,
/// `|βₙ| ≤ b` with `b` tiny against `α` on the tail.
#[derive(Debug, Clone)]
pub struct BoundedAddCase {
    pub x: RationalSequence,
    pub alpha: Scaling,
    pub beta: RationalSequence,
}

/// `K ∈ [10⁶, 10⁹]`, `k ∈ {1, 2}`, `c = p/q` with `|c| ≤ 2`, and `β` either
/// a signed alternation of one magnitude or a table whose magnitudes lie in
/// `(b/2, b]`, `b ≤ 10`. Magnitudes never double, so the unboundedness proxy
/// stays quiet.
pub fn bounded_add_case<R: Rng>(rng: &mut R, horizon: u128) -> BoundedAddCase {
    let k_coef = int(rng.gen_range(1_000_000i64..=1_000_000_000));
    let exp = rng.gen_range(1..=2);
    let q = rng.gen_range(1..=7);
    let c = rat(rng.gen_range(-2 * q..=2 * q), q);
    let b = rng.gen_range(1..=10i64);
    let sign = |rng: &mut R, v: BigRational| if rng.gen_bool(0.5) { -v } else { v };
    let beta = if rng.gen_bool(0.5) {
        let period = rng.gen_range(1..=5);
        RationalSequence::Alternate((0..period).map(|_| sign(rng, int(b))).collect())
    } else {
        let values = (0..horizon)
            .map(|_| {
                let m = rat(rng.gen_range(b + 1..=2 * b), 2);
                sign(rng, m)
            })
            .collect();
        RationalSequence::Table(values)
    };
    BoundedAddCase {
        x: RationalSequence::Power {
            coef: &c * &k_coef,
            exp,
        },
        alpha: Scaling::Power { coef: k_coef, exp },
        beta,
    }
}
