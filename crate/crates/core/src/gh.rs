//! Gromov–Hausdorff distance between finite metric spaces.
//!
//! `d_GH(A, B) = ½ · min_R dis(R)` over correspondences `R ⊆ A × B`, where
//! `dis(R) = max |d_A(a, a′) − d_B(b, b′)|` over pairs in `R`. The pointed
//! variant only admits correspondences containing `(e_A, e_B)`.
//!
//! All searches run on integer matrices obtained by clearing a common
//! denominator, in `i128` when the entries are small and `BigInt` otherwise.

use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::rational;

/// Largest side accepted by [`gh_exact`].
pub const EXACT_MAX_POINTS: usize = 7;
/// Local-search restarts in [`gh_upper`].
pub const RESTARTS: usize = 8;
const SEED: u64 = 0x6768_5f75_7070_6572;

/// A relation `R ⊆ A × B` meant to cover both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
    pub pointed: bool,
}

impl Correspondence {
    /// Graph of `f: A → B` together with the transpose of `g: B → A`.
    pub fn from_maps(f: &[usize], g: &[usize], pointed: bool) -> Self {
        let mut pairs: Vec<(usize, usize)> = f.iter().enumerate().map(|(a, &b)| (a, b)).collect();
        pairs.extend(g.iter().enumerate().map(|(b, &a)| (a, b)));
        pairs.sort_unstable();
        pairs.dedup();
        Correspondence { pairs, pointed }
    }

    /// Surjective onto both sides, and containing the basepoint pair when
    /// pointed.
    pub fn is_valid(&self, a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> bool {
        let mut seen_a = vec![false; a.len()];
        let mut seen_b = vec![false; b.len()];
        for &(i, j) in &self.pairs {
            if i >= a.len() || j >= b.len() {
                return false;
            }
            seen_a[i] = true;
            seen_b[j] = true;
        }
        let base_ok = !self.pointed || self.pairs.contains(&(a.basepoint(), b.basepoint()));
        base_ok && seen_a.iter().all(|&s| s) && seen_b.iter().all(|&s| s)
    }

    /// `max |d_A(a, a′) − d_B(b, b′)|` over pairs in the relation.
    pub fn distortion(&self, a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> BigRational {
        let mut worst = BigRational::zero();
        for &(i, j) in &self.pairs {
            for &(k, l) in &self.pairs {
                let d = rational::abs_diff(a.d(i, k), b.d(j, l));
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

/// Integer arithmetic needed by the search kernels.
trait Int: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> + Send + Sync {}
impl Int for i128 {}
impl Int for BigInt {}

fn gap<T: Int>(x: &T, y: &T) -> T {
    if x >= y {
        x.clone() - y.clone()
    } else {
        y.clone() - x.clone()
    }
}

/// Square matrix with entries scaled by a shared denominator.
#[derive(Clone)]
struct Mat<T> {
    n: usize,
    v: Vec<T>,
    base: usize,
}

impl<T: Int> Mat<T> {
    fn at(&self, i: usize, j: usize) -> &T {
        &self.v[i * self.n + j]
    }

    fn diameter(&self) -> T {
        self.v.iter().max().cloned().unwrap_or_else(T::zero)
    }
}

/// Both spaces over a common denominator `den`.
struct Scaled {
    den: BigInt,
    a: Mat<BigInt>,
    b: Mat<BigInt>,
}

fn scale(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Scaled {
    let mut den = BigInt::one();
    for sp in [a, b] {
        for row in sp.rows() {
            for q in row {
                den = den.lcm(q.denom());
            }
        }
    }
    let mat = |sp: &FiniteMetricSpace| Mat {
        n: sp.len(),
        v: sp
            .rows()
            .flat_map(|r| r.iter().map(|q| q.numer() * (&den / q.denom())))
            .collect(),
        base: sp.basepoint(),
    };
    Scaled {
        a: mat(a),
        b: mat(b),
        den: den.clone(),
    }
}

/// Runs `f` on `i128` matrices when every entry is below `2^100`.
fn with_kernel<R>(
    s: &Scaled,
    small: impl FnOnce(&Mat<i128>, &Mat<i128>) -> R,
    big: impl FnOnce(&Mat<BigInt>, &Mat<BigInt>) -> R,
) -> R {
    let limit = BigInt::one() << 100;
    let fits = s.a.v.iter().chain(&s.b.v).all(|x| x < &limit);
    if fits {
        let conv = |m: &Mat<BigInt>| Mat {
            n: m.n,
            v: m.v.iter().map(|x| x.to_i128().unwrap()).collect(),
            base: m.base,
        };
        small(&conv(&s.a), &conv(&s.b))
    } else {
        big(&s.a, &s.b)
    }
}

fn halve(dis: BigInt, den: &BigInt) -> BigRational {
    BigRational::new(dis, den * 2)
}

fn to_big(x: i128) -> BigInt {
    BigInt::from(x)
}

/// Exact distance by branch and bound. Errors beyond [`EXACT_MAX_POINTS`].
pub fn gh_exact(a: &FiniteMetricSpace, b: &FiniteMetricSpace, pointed: bool) -> Result<BigRational> {
    if a.len() > EXACT_MAX_POINTS || b.len() > EXACT_MAX_POINTS {
        return Err(Error::SizeGuard(format!(
            "exact search supports at most {EXACT_MAX_POINTS} points per side (got {} and {}); use gh_lower/gh_upper",
            a.len(),
            b.len()
        )));
    }
    let s = scale(a, b);
    let dis = with_kernel(&s, |x, y| to_big(exact_kernel(x, y, pointed)), |x, y| exact_kernel(x, y, pointed));
    Ok(halve(dis, &s.den))
}

struct Search<'a, T> {
    a: &'a Mat<T>,
    b: &'a Mat<T>,
    pointed: bool,
    pairs: Vec<(usize, usize)>,
    covered: Vec<usize>,
    best: T,
}

impl<T: Int> Search<'_, T> {
    /// Distortion added by `(i, j)` against the current pairs (and itself).
    fn added(&self, i: usize, j: usize) -> T {
        let mut worst = gap(self.a.at(i, i), self.b.at(j, j));
        for &(k, l) in &self.pairs {
            let d = gap(self.a.at(i, k), self.b.at(j, l));
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    fn push(&mut self, i: usize, j: usize) {
        self.pairs.push((i, j));
        self.covered[j] += 1;
    }

    fn pop(&mut self) {
        let (_, j) = self.pairs.pop().unwrap();
        self.covered[j] -= 1;
    }

    /// Assign a partner to every `a`, then to every still-uncovered `b`.
    fn assign_a(&mut self, i: usize, cur: T) {
        if i == self.a.n {
            self.assign_b(0, cur);
            return;
        }
        let forced = self.pointed && i == self.a.base;
        for j in 0..self.b.n {
            if forced && j != self.b.base {
                continue;
            }
            let d = self.added(i, j);
            let next = if d > cur { d } else { cur.clone() };
            if next >= self.best {
                continue;
            }
            self.push(i, j);
            self.assign_a(i + 1, next);
            self.pop();
        }
    }

    fn assign_b(&mut self, j: usize, cur: T) {
        if j == self.b.n {
            self.best = cur;
            return;
        }
        if self.covered[j] > 0 {
            self.assign_b(j + 1, cur);
            return;
        }
        for i in 0..self.a.n {
            let d = self.added(i, j);
            let next = if d > cur { d } else { cur.clone() };
            if next >= self.best {
                continue;
            }
            self.push(i, j);
            self.assign_b(j + 1, next);
            self.pop();
        }
    }
}

fn exact_kernel<T: Int>(a: &Mat<T>, b: &Mat<T>, pointed: bool) -> T {
    // The full product A × B is always a correspondence, with distortion
    // max(diam A, diam B); search for anything strictly better.
    let incumbent = std::cmp::max(a.diameter(), b.diameter());
    let mut s = Search {
        a,
        b,
        pointed,
        pairs: Vec::new(),
        covered: vec![0; b.n],
        best: incumbent,
    };
    s.assign_a(0, T::zero());
    s.best
}

/// Certified lower bound: half the larger of the diameter gap and the
/// distance-profile gap. For `(a, b) ∈ R` the sets `{d(a, ·)}` and
/// `{d(b, ·)}` lie within Hausdorff distance `dis(R)` of each other, so each
/// point needs some partner whose profile is that close.
pub fn gh_lower(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> BigRational {
    let s = scale(a, b);
    let dis = with_kernel(&s, |x, y| to_big(lower_kernel(x, y)), lower_kernel);
    halve(dis, &s.den)
}

fn profiles<T: Int>(m: &Mat<T>) -> Vec<Vec<T>> {
    (0..m.n)
        .map(|i| {
            let mut row: Vec<T> = (0..m.n).map(|j| m.at(i, j).clone()).collect();
            row.sort();
            row.dedup();
            row
        })
        .collect()
}

/// Directed Hausdorff distance between sorted sets.
fn directed<T: Int>(from: &[T], to: &[T]) -> T {
    let mut worst = T::zero();
    for x in from {
        let k = to.partition_point(|y| y < x);
        let mut best: Option<T> = None;
        for y in to[k.saturating_sub(1)..(k + 1).min(to.len())].iter() {
            let d = gap(x, y);
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
        }
        if let Some(b) = best {
            if b > worst {
                worst = b;
            }
        }
    }
    worst
}

fn hausdorff<T: Int>(x: &[T], y: &[T]) -> T {
    std::cmp::max(directed(x, y), directed(y, x))
}

fn lower_kernel<T: Int>(a: &Mat<T>, b: &Mat<T>) -> T {
    let mut bound = gap(&a.diameter(), &b.diameter());
    let (pa, pb) = (profiles(a), profiles(b));
    for (from, to) in [(&pa, &pb), (&pb, &pa)] {
        for p in from.iter() {
            let nearest = to.iter().map(|q| hausdorff(p, q)).min().unwrap();
            if nearest > bound {
                bound = nearest;
            }
        }
    }
    bound
}

/// Upper bound from an explicit correspondence: an exact isometry when one
/// exists, otherwise greedy radius matching refined by local search with
/// seeded restarts. Never below [`gh_exact`].
pub fn gh_upper(a: &FiniteMetricSpace, b: &FiniteMetricSpace, pointed: bool) -> BigRational {
    let s = scale(a, b);
    let dis = with_kernel(&s, |x, y| to_big(upper_kernel(x, y, pointed)), |x, y| upper_kernel(x, y, pointed));
    halve(dis, &s.den)
}

/// An isometry `A → B` (basepoint-preserving when pointed), if one exists.
pub fn find_isometry(a: &FiniteMetricSpace, b: &FiniteMetricSpace, pointed: bool) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let s = scale(a, b);
    with_kernel(&s, |x, y| isometry_kernel(x, y, pointed), |x, y| isometry_kernel(x, y, pointed))
}

fn isometry_kernel<T: Int>(a: &Mat<T>, b: &Mat<T>, pointed: bool) -> Option<Vec<usize>> {
    let (pa, pb) = (full_profiles(a), full_profiles(b));
    let cands: Vec<Vec<usize>> = (0..a.n)
        .map(|i| {
            (0..b.n)
                .filter(|&j| pa[i] == pb[j])
                .filter(|&j| !pointed || ((i == a.base) == (j == b.base)))
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..a.n).collect();
    order.sort_by_key(|&i| cands[i].len());
    let mut f = vec![usize::MAX; a.n];
    let mut used = vec![false; b.n];
    fn go<T: Int>(
        k: usize,
        order: &[usize],
        cands: &[Vec<usize>],
        a: &Mat<T>,
        b: &Mat<T>,
        f: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some(&i) = order.get(k) else { return true };
        for &j in &cands[i] {
            if used[j] {
                continue;
            }
            let ok = order[..k].iter().all(|&p| a.at(i, p) == b.at(j, f[p]));
            if ok {
                f[i] = j;
                used[j] = true;
                if go(k + 1, order, cands, a, b, f, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(0, &order, &cands, a, b, &mut f, &mut used).then_some(f)
}

fn full_profiles<T: Int>(m: &Mat<T>) -> Vec<Vec<T>> {
    (0..m.n)
        .map(|i| {
            let mut row: Vec<T> = (0..m.n).map(|j| m.at(i, j).clone()).collect();
            row.sort();
            row
        })
        .collect()
}

/// Objective of a correspondence: (max distortion, sum of per-pair maxima).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Score<T>(T, T);

struct Local<'a, T> {
    a: &'a Mat<T>,
    b: &'a Mat<T>,
    pointed: bool,
}

impl<T: Int> Local<'_, T> {
    fn pairs(&self, f: &[usize], g: &[usize]) -> Vec<(usize, usize)> {
        let mut p: Vec<(usize, usize)> = f.iter().enumerate().map(|(i, &j)| (i, j)).collect();
        p.extend(g.iter().enumerate().map(|(j, &i)| (i, j)));
        p
    }

    fn score(&self, f: &[usize], g: &[usize]) -> Score<T> {
        let p = self.pairs(f, g);
        let mut max = T::zero();
        let mut sum = T::zero();
        for &(i, j) in &p {
            let mut row = T::zero();
            for &(k, l) in &p {
                let d = gap(self.a.at(i, k), self.b.at(j, l));
                if d > row {
                    row = d;
                }
            }
            if row > max {
                max = row.clone();
            }
            sum = sum + row;
        }
        Score(max, sum)
    }

    fn greedy(&self) -> (Vec<usize>, Vec<usize>) {
        let nearest = |r: &T, m: &Mat<T>| -> usize {
            (0..m.n)
                .min_by(|&x, &y| gap(r, m.at(x, m.base)).cmp(&gap(r, m.at(y, m.base))).then(x.cmp(&y)))
                .unwrap()
        };
        let f = (0..self.a.n).map(|i| nearest(self.a.at(i, self.a.base), self.b)).collect();
        let g = (0..self.b.n).map(|j| nearest(self.b.at(j, self.b.base), self.a)).collect();
        (f, g)
    }

    fn fix_base(&self, f: &mut [usize], g: &mut [usize]) {
        if self.pointed {
            f[self.a.base] = self.b.base;
            g[self.b.base] = self.a.base;
        }
    }

    /// First-improvement descent over single reassignments and swaps.
    fn descend(&self, f: &mut [usize], g: &mut [usize]) -> Score<T> {
        let mut cur = self.score(f, g);
        loop {
            let mut improved = false;
            for i in 0..self.a.n {
                if self.pointed && i == self.a.base {
                    continue;
                }
                for j in 0..self.b.n {
                    if f[i] == j {
                        continue;
                    }
                    let old = std::mem::replace(&mut f[i], j);
                    let s = self.score(f, g);
                    if s < cur {
                        cur = s;
                        improved = true;
                    } else {
                        f[i] = old;
                    }
                }
            }
            for j in 0..self.b.n {
                if self.pointed && j == self.b.base {
                    continue;
                }
                for i in 0..self.a.n {
                    if g[j] == i {
                        continue;
                    }
                    let old = std::mem::replace(&mut g[j], i);
                    let s = self.score(f, g);
                    if s < cur {
                        cur = s;
                        improved = true;
                    } else {
                        g[j] = old;
                    }
                }
            }
            for i in 0..self.a.n {
                for k in i + 1..self.a.n {
                    if f[i] == f[k] || (self.pointed && (i == self.a.base || k == self.a.base)) {
                        continue;
                    }
                    f.swap(i, k);
                    let s = self.score(f, g);
                    if s < cur {
                        cur = s;
                        improved = true;
                    } else {
                        f.swap(i, k);
                    }
                }
            }
            if !improved {
                return cur;
            }
        }
    }
}

fn upper_kernel<T: Int>(a: &Mat<T>, b: &Mat<T>, pointed: bool) -> T {
    if a.n == b.n {
        if let Some(_iso) = isometry_kernel(a, b, pointed) {
            return T::zero();
        }
    }
    let local = Local { a, b, pointed };
    let (mut f0, mut g0) = local.greedy();
    local.fix_base(&mut f0, &mut g0);
    let (mut f, mut g) = (f0.clone(), g0.clone());
    let mut best = local.descend(&mut f, &mut g);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..RESTARTS {
        if best.0.is_zero() {
            break;
        }
        let (mut f, mut g) = (f0.clone(), g0.clone());
        for x in f.iter_mut() {
            if rng.gen_bool(0.5) {
                *x = rng.gen_range(0..b.n);
            }
        }
        for x in g.iter_mut() {
            if rng.gen_bool(0.5) {
                *x = rng.gen_range(0..a.n);
            }
        }
        local.fix_base(&mut f, &mut g);
        let s = local.descend(&mut f, &mut g);
        if s < best {
            best = s;
        }
    }
    best.0
}

/// Lower and upper bounds, plus the exact value when requested.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhBounds {
    #[serde(with = "rational::serde_rat")]
    pub lower: BigRational,
    #[serde(with = "rational::serde_rat")]
    pub upper: BigRational,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt")]
    pub exact: Option<BigRational>,
}

fn ser_opt<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_str(&rational::format(q)),
        None => s.serialize_none(),
    }
}

pub fn gh_bounds(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    pointed: bool,
    exact: bool,
) -> Result<GhBounds> {
    Ok(GhBounds {
        lower: gh_lower(a, b),
        upper: gh_upper(a, b, pointed),
        exact: if exact { Some(gh_exact(a, b, pointed)?) } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{line, segment, FiniteMetricSpace};
    use crate::rational::{int, rat};
    use crate::ScaleFactor;

    fn pt() -> FiniteMetricSpace {
        FiniteMetricSpace::singleton("e")
    }

    #[test]
    fn exact_examples() {
        let l = line(4);
        assert_eq!(gh_exact(&l, &l, true).unwrap(), int(0));
        assert_eq!(gh_exact(&segment(int(2)), &pt(), false).unwrap(), int(1));
        assert_eq!(gh_exact(&segment(int(1)), &segment(int(3)), true).unwrap(), int(1));
        assert!(matches!(gh_exact(&line(8), &pt(), false), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn pointed_can_exceed_unpointed() {
        // The basepoint sits at an end of one line and in the middle of the other.
        let a = line(3);
        let b = FiniteMetricSpace::from_fn(
            vec!["l".into(), "m".into(), "r".into()],
            1,
            |i, j| int((i as i64 - j as i64).abs()),
        )
        .unwrap();
        assert_eq!(gh_exact(&a, &b, false).unwrap(), int(0));
        assert!(gh_exact(&a, &b, true).unwrap() > int(0));
        assert!(gh_upper(&a, &b, true) > int(0));
        assert_eq!(gh_upper(&a, &b, false), int(0));
    }

    #[test]
    fn lower_examples() {
        let l = line(5);
        assert_eq!(gh_lower(&l, &l), int(0));
        assert!(gh_lower(&segment(int(1)), &segment(int(3))) >= int(1));
        // Same diameter 2, different shapes: a path 0-1-2 and an equilateral triangle.
        let path = line(3);
        let tri = FiniteMetricSpace::from_fn(vec!["a".into(), "b".into(), "c".into()], 0, |_, _| int(2)).unwrap();
        assert_eq!(gh_lower(&path, &tri), rat(1, 2));
        assert_eq!(gh_exact(&path, &tri, false).unwrap(), rat(1, 2));
    }

    #[test]
    fn upper_examples() {
        let l = line(6);
        assert_eq!(gh_upper(&l, &l, true), int(0));
        let shifted = l.relabel((0..6).map(|i| format!("q{i}")).collect()).unwrap();
        assert_eq!(gh_upper(&l, &shifted, true), int(0));
        let a = segment(int(1));
        let b = a.rescale(&ScaleFactor::new(int(5)).unwrap());
        assert_eq!(gh_upper(&a, &b, true), int(2));
    }

    #[test]
    fn huge_entries_use_the_wide_kernel() {
        let big = rational::int(rational::factorial(40));
        let a = segment(big.clone());
        let b = segment(big + int(2));
        assert_eq!(gh_exact(&a, &b, true).unwrap(), int(1));
        assert_eq!(gh_upper(&a, &b, true), int(1));
        assert_eq!(gh_lower(&a, &b), int(1));
    }

    #[test]
    fn correspondence_helpers() {
        let a = line(3);
        let c = Correspondence::from_maps(&[0, 1, 2], &[0, 1, 2], true);
        assert!(c.is_valid(&a, &a));
        assert_eq!(c.distortion(&a, &a), int(0));
        let bad = Correspondence { pairs: vec![(0, 0)], pointed: true };
        assert!(!bad.is_valid(&a, &a));
    }
}
