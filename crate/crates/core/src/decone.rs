//! The de-cone: a proper space `X` whose asymptotic cones recover `Y`.
//!
//! `X = ⋁_{n=2}^{N} n!·Y_n` where `Y_n = {y : d(y,e) ∈ [1/ln n, ln n]} ∪ {e}`.
//! At scale `αₙ = n!` the part `X_n` reproduces the annulus `Y_n` exactly,
//! smaller parts shrink into the basepoint and larger parts escape to
//! infinity.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certified::{Enclosure, Real, DEFAULT_MAX_BITS};
use crate::error::{Error, Result};
use crate::gh;
use crate::metric::{wedge_labeled, FiniteMetricSpace, ScaleFactor};
use crate::rational::{self, factorial, int};
use crate::Verdict;

/// Refuses to build spaces larger than this.
pub const MAX_POINTS: usize = 2_000;

/// Where a point sits relative to the scale `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleCase {
    /// In a part `X_k` with `k < n`.
    Below,
    /// In `X_n`.
    At,
    /// In a part `X_k` with `k > n`.
    Above,
}

#[derive(Debug, Clone)]
pub struct DeconeSpace {
    space: FiniteMetricSpace,
    /// Part index `n` of each point; `None` for the basepoint.
    part_of: Vec<Option<u64>>,
    /// Index in `Y` of the point each copy came from.
    origin: Vec<Option<usize>>,
    /// `(n, y) ↦` index of the copy of `y` in `X_n`.
    copies: BTreeMap<(u64, usize), usize>,
    parts: u64,
    y_len: usize,
    y_base: usize,
}

/// `[1/ln n, ln n]` as certified reals.
pub fn window(n: u64) -> (Real, Real) {
    (Real::ln_int(n).recip(), Real::ln_int(n))
}

/// Builds `X` from `Y` with parts `2..=N`.
pub fn build_decone(y: &FiniteMetricSpace, n_max: u64) -> Result<DeconeSpace> {
    if n_max < 2 {
        return Err(Error::precondition(format!("need N ≥ 2, got {n_max}")));
    }
    if y.is_pseudo() {
        return Err(Error::precondition("the de-cone needs a metric, not a pseudo-metric"));
    }
    if let Some(v) = y.first_violation() {
        return Err(Error::precondition(format!("Y is not a metric space: {v}")));
    }
    let mut parts = Vec::new();
    let mut indices = Vec::new();
    let mut size = 1usize;
    for n in 2..=n_max {
        let (lo, hi) = window(n);
        let keep: Vec<usize> = (0..y.len())
            .filter(|&i| i != y.basepoint())
            .map(|i| Ok((i, crate::metric::in_window(y.to_base(i), &lo, &hi, DEFAULT_MAX_BITS)?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter_map(|(i, inside)| inside.then_some(i))
            .collect();
        if keep.is_empty() {
            continue;
        }
        size += keep.len();
        if size > MAX_POINTS {
            return Err(Error::Resource(format!(
                "de-cone would exceed {MAX_POINTS} points at part {n}"
            )));
        }
        let scale = ScaleFactor::factorial(n);
        parts.push(y.subspace(&keep).rescale(&scale));
        indices.push(n);
    }
    let w = wedge_labeled(&parts, y.label(y.basepoint()).to_string(), |k, l| {
        format!("{l}@{}", indices[k])
    });
    let part_of: Vec<Option<u64>> = w.part_of.iter().map(|p| p.map(|k| indices[k])).collect();
    let origin: Vec<Option<usize>> = w
        .part_of
        .iter()
        .zip(&w.origin)
        .map(|(p, o)| match (p, o) {
            (Some(k), Some(i)) => y.index_of(parts[*k].label(*i)),
            _ => None,
        })
        .collect();
    let copies = part_of
        .iter()
        .zip(&origin)
        .enumerate()
        .filter_map(|(x, (n, o))| Some(((((*n)?), (*o)?), x)))
        .collect();
    Ok(DeconeSpace {
        space: w.space,
        part_of,
        origin,
        copies,
        parts: n_max,
        y_len: y.len(),
        y_base: y.basepoint(),
    })
}

impl DeconeSpace {
    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn parts(&self) -> u64 {
        self.parts
    }

    /// `αₙ = n!`.
    pub fn alpha(&self, n: u64) -> ScaleFactor {
        ScaleFactor::factorial(n)
    }

    pub fn part_of(&self, x: usize) -> Option<u64> {
        self.part_of.get(x).copied().flatten()
    }

    pub fn origin(&self, x: usize) -> Option<usize> {
        self.origin.get(x).copied().flatten()
    }

    /// Points of `X_n` other than the basepoint.
    pub fn part_points(&self, n: u64) -> Vec<usize> {
        (0..self.space.len()).filter(|&x| self.part_of(x) == Some(n)).collect()
    }

    fn check_scale(&self, n: u64, lo: u64, hi: u64) -> Result<()> {
        if n < lo || n > hi {
            return Err(Error::precondition(format!("scale n = {n} outside [{lo}, {hi}]")));
        }
        Ok(())
    }

    pub fn classify_scale(&self, x: usize, n: u64) -> Result<ScaleCase> {
        self.check_scale(n, 2, self.parts)?;
        let k = self
            .part_of(x)
            .ok_or_else(|| Error::precondition("the basepoint belongs to no part"))?;
        Ok(match k.cmp(&n) {
            Ordering::Less => ScaleCase::Below,
            Ordering::Equal => ScaleCase::At,
            Ordering::Greater => ScaleCase::Above,
        })
    }

    /// Copy of `y` in `X_n` when `d(y,e) ∈ [1/ln n, ln n]`, else the basepoint.
    pub fn embed_phi(&self, y: usize, n: u64) -> Result<usize> {
        self.check_scale(n, 2, self.parts)?;
        if y >= self.y_len {
            return Err(Error::structural(format!("point {y} not in Y")));
        }
        Ok(self.copies.get(&(n, y)).copied().unwrap_or(self.space.basepoint()))
    }

    /// Least `n₀` with a copy of `y` in every `X_n`, `n₀ ≤ n ≤ N`.
    pub fn stabilization_index(&self, y: usize) -> Option<u64> {
        if y == self.y_base {
            return Some(2);
        }
        let mut n0 = None;
        for n in (2..=self.parts).rev() {
            if self.copies.contains_key(&(n, y)) {
                n0 = Some(n);
            } else {
                break;
            }
        }
        n0
    }

    /// Closed ball of radius `R·n!` around `e`, with distances divided by `n!`.
    pub fn cone_approx(&self, n: u64, r: &BigRational) -> Result<FiniteMetricSpace> {
        self.check_scale(n, 2, self.parts)?;
        let a = rational::int(factorial(n));
        Ok(self.space.base_ball(&(r * &a)).rescale(&ScaleFactor::new(a.recip())?))
    }

    /// [`cone_approx`](Self::cone_approx) with every point of a smaller part
    /// identified with the basepoint, the finite-scale image of the quotient
    /// by distance zero.
    pub fn cone_snapshot(&self, n: u64, r: &BigRational) -> Result<FiniteMetricSpace> {
        self.check_scale(n, 2, self.parts)?;
        let a = rational::int(factorial(n));
        let radius = r * &a;
        let e = self.space.basepoint();
        let keep: Vec<usize> = (0..self.space.len())
            .filter(|&x| self.part_of(x).is_none_or(|k| k >= n))
            .filter(|&x| self.space.d(e, x) <= &radius)
            .collect();
        Ok(self.space.subspace(&keep).rescale(&ScaleFactor::new(a.recip())?))
    }

    /// Parts meeting the closed ball `B(x, R)` in a point other than `e`.
    pub fn parts_meeting_ball(&self, x: usize, r: &BigRational) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .space
            .ball(x, r)
            .into_iter()
            .filter_map(|p| self.part_of(p))
            .collect();
        out.dedup();
        out
    }

    /// Checks the structural invariants: part tags in `[2, N]`, exact
    /// rescaling inside each part against `Y`, and `d(x, e) ≥ n!/ln n`.
    pub fn check_invariants(&self, y: &FiniteMetricSpace) -> Result<Verdict> {
        let e = self.space.basepoint();
        for x in 0..self.space.len() {
            if x == e {
                continue;
            }
            let (Some(n), Some(o)) = (self.part_of(x), self.origin(x)) else {
                return Ok(Verdict::Fails);
            };
            if !(2..=self.parts).contains(&n) {
                return Ok(Verdict::Fails);
            }
            let a = int(factorial(n));
            for x2 in self.part_points(n) {
                let o2 = self.origin(x2).unwrap();
                if self.space.d(x, x2) != &(y.d(o, o2) * &a) {
                    return Ok(Verdict::Fails);
                }
            }
            let sep = Real::exact(a) / Real::ln_int(n);
            if sep.cmp_rational(self.space.d(x, e), DEFAULT_MAX_BITS).ok_or_else(|| {
                Error::Undecided(format!("separation bound at part {n}"))
            })? == Ordering::Greater
            {
                return Ok(Verdict::Fails);
            }
        }
        Ok(Verdict::Holds)
    }
}

/// Certified bounds for the scale trichotomy at `n`.
#[derive(Debug, Clone)]
pub struct CaseBounds {
    /// `(n−1)!·ln(n−1)/n! = ln(n−1)/n`; Below points satisfy `d(x,e)/n! ≤` this.
    pub below_upper: Real,
    /// `(n+1)!/(ln(n+1)·n!) = (n+1)/ln(n+1)`; Above points satisfy `d(x,e)/n! ≥` this.
    pub above_lower: Real,
}

impl CaseBounds {
    pub fn new(n: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::precondition(format!("case bounds need n ≥ 3, got {n}")));
        }
        Ok(CaseBounds {
            below_upper: Real::ln_int(n - 1) / Real::int(n as i64),
            above_lower: Real::int(n as i64 + 1) / Real::ln_int(n + 1),
        })
    }

    pub fn enclosures(&self, bits: u32) -> (Enclosure, Enclosure) {
        (
            self.below_upper.enclose(bits).expect("positive divisor"),
            self.above_lower.enclose(bits).expect("positive divisor"),
        )
    }
}

/// Bounds for `3 ≤ n ≤ N − 1`.
pub fn case_bounds(x: &DeconeSpace, n: u64) -> Result<CaseBounds> {
    x.check_scale(n, 3, x.parts.saturating_sub(1))?;
    CaseBounds::new(n)
}

/// Counts of points checked against the case bounds at one scale.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub n: u64,
    pub below: usize,
    pub at: usize,
    pub above: usize,
    pub violations: usize,
}

/// Checks every non-basepoint point against the bounds at `n`.
pub fn check_case_bounds(x: &DeconeSpace, n: u64) -> Result<CaseReport> {
    let b = case_bounds(x, n)?;
    let a = int(factorial(n));
    let mut rep = CaseReport {
        n,
        ..Default::default()
    };
    let e = x.space.basepoint();
    for p in 0..x.space.len() {
        if p == e {
            continue;
        }
        let ratio = x.space.d(p, e) / &a;
        let undecided = || Error::Undecided(format!("case bound at n = {n}"));
        let ok = match x.classify_scale(p, n)? {
            ScaleCase::Below => {
                rep.below += 1;
                b.below_upper.cmp_rational(&ratio, DEFAULT_MAX_BITS).ok_or_else(undecided)? != Ordering::Less
            }
            ScaleCase::Above => {
                rep.above += 1;
                b.above_lower.cmp_rational(&ratio, DEFAULT_MAX_BITS).ok_or_else(undecided)? != Ordering::Greater
            }
            ScaleCase::At => {
                rep.at += 1;
                true
            }
        };
        if !ok {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

/// One row of [`verify_convergence`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u64,
    #[serde(with = "rational::serde_rat")]
    pub gh_upper: BigRational,
    /// `1/ln n`, rounded to 12 decimals.
    #[serde(with = "rational::serde_rat")]
    pub window_lo: BigRational,
    /// `ln n`, rounded to 12 decimals.
    #[serde(with = "rational::serde_rat")]
    pub window_hi: BigRational,
    /// Whether `[1/ln n, ln n]` covers `[min nonzero distance, R]`.
    pub covered: bool,
}

/// Pointed upper GH bound between the scale-`n` snapshot and `B_Y(e, R)`
/// for each `n` in the schedule.
pub fn verify_convergence(
    y: &FiniteMetricSpace,
    x: &DeconeSpace,
    r: &BigRational,
    schedule: &[u64],
) -> Result<Vec<ConvergenceRow>> {
    if let Some(&n) = schedule.iter().find(|&&n| n < 2 || n > x.parts) {
        return Err(Error::precondition(format!(
            "schedule entry {n} outside the built parts [2, {}]",
            x.parts
        )));
    }
    let target = y.base_ball(r);
    let min_d = y.min_positive_distance();
    schedule
        .par_iter()
        .map(|&n| {
            let snap = x.cone_snapshot(n, r)?;
            let (lo, hi) = window(n);
            let covered = hi.cmp_rational(r, DEFAULT_MAX_BITS) == Some(Ordering::Greater)
                && min_d
                    .as_ref()
                    .is_none_or(|m| lo.cmp_rational(m, DEFAULT_MAX_BITS) == Some(Ordering::Less));
            Ok(ConvergenceRow {
                n,
                gh_upper: gh::gh_upper(&snap, &target, true),
                window_lo: rational::round_to(&lo.approx(), 1_000_000_000_000),
                window_hi: rational::round_to(&hi.approx(), 1_000_000_000_000),
                covered,
            })
        })
        .collect()
}

/// Exact-embedding witness for one pair of points of `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingWitness {
    pub y: String,
    pub y2: String,
    /// First scale from which both points have copies up to `N`.
    pub n0: Option<u64>,
    /// Every scale in `[n0, N]` reproduces `d(y, y2)` exactly.
    pub exact: bool,
}

/// For each pair `(y, y′)`, the copies in `X_n` divided by `n!` sit at
/// distance exactly `d(y, y′)` for every `n ≥ n₀`.
pub fn verify_embedding(y: &FiniteMetricSpace, x: &DeconeSpace) -> Result<Vec<EmbeddingWitness>> {
    let mut out = Vec::new();
    for i in 0..y.len() {
        for j in i..y.len() {
            let n0 = match (x.stabilization_index(i), x.stabilization_index(j)) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
            let exact = match n0 {
                Some(n0) => (n0..=x.parts).try_fold(true, |ok, n| -> Result<bool> {
                    let (p, q) = (x.embed_phi(i, n)?, x.embed_phi(j, n)?);
                    Ok(ok && x.space.d(p, q) / int(factorial(n)) == *y.d(i, j))
                })?,
                None => false,
            };
            out.push(EmbeddingWitness {
                y: y.label(i).to_string(),
                y2: y.label(j).to_string(),
                n0,
                exact,
            });
        }
    }
    Ok(out)
}

/// Result of iterating the construction.
#[derive(Debug, Clone)]
pub struct IteratedDecone {
    pub base: FiniteMetricSpace,
    pub stages: Vec<DeconeSpace>,
}

impl IteratedDecone {
    /// The final space (`Y` itself after zero stages).
    pub fn space(&self) -> &FiniteMetricSpace {
        self.stages.last().map_or(&self.base, |s| &s.space)
    }
}

/// Applies [`build_decone`] `k` times with the same `N` per stage.
pub fn iterate_decone(y: &FiniteMetricSpace, k: usize, n: u64) -> Result<IteratedDecone> {
    iterate_decone_stages(y, &vec![n; k])
}

/// Applies [`build_decone`] once per entry of `parts`, feeding each stage's
/// space into the next.
pub fn iterate_decone_stages(y: &FiniteMetricSpace, parts: &[u64]) -> Result<IteratedDecone> {
    let mut stages: Vec<DeconeSpace> = Vec::new();
    for &n in parts {
        let input = stages.last().map_or(y, |s| &s.space);
        stages.push(build_decone(input, n)?);
    }
    Ok(IteratedDecone {
        base: y.clone(),
        stages,
    })
}

/// `true` when `d(y, e)` lies in the window for scale `n`.
pub fn in_annulus(r: &BigRational, n: u64) -> Result<bool> {
    let (lo, hi) = window(n);
    crate::metric::in_window(r, &lo, &hi, DEFAULT_MAX_BITS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{line, segment};
    use crate::rational::rat;

    #[test]
    fn segment_parts() {
        let y = segment(int(1));
        let x = build_decone(&y, 4).unwrap();
        assert!(x.part_points(2).is_empty());
        let p3 = x.part_points(3);
        let p4 = x.part_points(4);
        assert_eq!((p3.len(), p4.len()), (1, 1));
        let e = x.space().basepoint();
        assert_eq!(x.space().d(p3[0], e), &int(6));
        assert_eq!(x.space().d(p4[0], e), &int(24));
        assert_eq!(x.space().d(p3[0], p4[0]), &int(30));
        assert_eq!(x.space().label(p3[0]), "p@3");
        assert_eq!(x.check_invariants(&y).unwrap(), Verdict::Holds);
    }

    #[test]
    fn point_space_stays_a_point() {
        let y = FiniteMetricSpace::singleton("e");
        for n in [2, 5, 10] {
            assert_eq!(build_decone(&y, n).unwrap().space().len(), 1);
        }
    }

    #[test]
    fn line_membership_follows_windows() {
        let y = line(5);
        let x = build_decone(&y, 5).unwrap();
        let members = |n| -> Vec<usize> { x.part_points(n).iter().map(|&p| x.origin(p).unwrap()).collect() };
        // ln 3 ≈ 1.10, ln 4 ≈ 1.39, ln 5 ≈ 1.61; all reciprocals are below 1.
        assert_eq!(members(2), Vec::<usize>::new());
        assert_eq!(members(3), vec![1]);
        assert_eq!(members(4), vec![1]);
        assert_eq!(members(5), vec![1]);
    }

    #[test]
    fn classify_and_embed() {
        let y = segment(int(1));
        let x = build_decone(&y, 7).unwrap();
        let p3 = x.part_points(3)[0];
        let p5 = x.part_points(5)[0];
        let p7 = x.part_points(7)[0];
        assert_eq!(x.classify_scale(p3, 5).unwrap(), ScaleCase::Below);
        assert_eq!(x.classify_scale(p5, 5).unwrap(), ScaleCase::At);
        assert_eq!(x.classify_scale(p7, 5).unwrap(), ScaleCase::Above);
        assert!(x.classify_scale(x.space().basepoint(), 5).is_err());
        assert_eq!(x.embed_phi(1, 3).unwrap(), p3);
        assert_eq!(x.embed_phi(1, 2).unwrap(), x.space().basepoint());
        assert_eq!(x.embed_phi(0, 4).unwrap(), x.space().basepoint());
        assert_eq!(x.stabilization_index(1), Some(3));
    }

    #[test]
    fn case_bound_values() {
        let (up, _) = CaseBounds::new(4).unwrap().enclosures(64);
        assert!(up.contains(&rat(27465, 100_000)) || (up.midpoint() - rat(27465, 100_000)) < rat(1, 10_000));
        let (_, lo) = CaseBounds::new(4).unwrap().enclosures(64);
        assert!((lo.midpoint() - rat(31067, 10_000)) < rat(1, 1000));
        let (up3, _) = CaseBounds::new(3).unwrap().enclosures(64);
        assert!((up3.midpoint() - rat(231, 1000)) < rat(1, 1000));
        let x = build_decone(&line(5), 5).unwrap();
        assert!(case_bounds(&x, 5).is_err());
        let rep = check_case_bounds(&build_decone(&line(5), 6).unwrap(), 5).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.below > 0);
    }

    #[test]
    fn cone_approx_examples() {
        let y = line(4);
        let x = build_decone(&y, 10).unwrap();
        // ln 10 > 2.3, so the whole ball of radius 3 minus p3 reappears at scale 10.
        let snap = x.cone_snapshot(10, &int(3)).unwrap();
        let target = y.base_ball(&int(3)).annulus(&rat(1, 2), &rat(23, 10));
        assert_eq!(gh::gh_upper(&snap, &target, true), int(0));
        let tiny = x.cone_approx(5, &rat(1, 2)).unwrap();
        assert!(tiny.labels().iter().all(|l| !l.ends_with("@5")));
        // Radius 2·3! = 12 reaches p1@3 (at 6) but not p1@4 (at 24).
        let c3 = x.cone_approx(3, &int(2)).unwrap();
        assert_eq!(c3.len(), 2);
        assert_eq!(c3.to_base(c3.index_of("p1@3").unwrap()), &int(1));
    }

    #[test]
    fn convergence_on_a_segment() {
        let y = segment(int(1));
        let x = build_decone(&y, 10).unwrap();
        let rows = verify_convergence(&y, &x, &int(2), &(3..=10).collect::<Vec<_>>()).unwrap();
        for row in rows {
            if row.covered {
                assert_eq!(row.gh_upper, int(0), "n = {}", row.n);
            }
        }
        let pt = FiniteMetricSpace::singleton("e");
        let xp = build_decone(&pt, 6).unwrap();
        let rows = verify_convergence(&pt, &xp, &int(1), &[3, 4, 5, 6]).unwrap();
        assert!(rows.iter().all(|r| num_traits::Zero::is_zero(&r.gh_upper)));
    }

    #[test]
    fn iteration() {
        let y = segment(int(1));
        assert_eq!(iterate_decone(&y, 0, 5).unwrap().space(), &y);
        let one = iterate_decone(&y, 1, 5).unwrap();
        assert_eq!(one.space(), build_decone(&y, 5).unwrap().space());
        // With the same N the second stage sees only distances ≥ 6 > ln 5.
        assert_eq!(iterate_decone(&y, 2, 5).unwrap().space().len(), 1);
        let two = iterate_decone_stages(&y, &[3, 410]).unwrap();
        let stage1 = two.stages[0].space().clone();
        let snap = two.stages[1].cone_snapshot(410, &int(6)).unwrap();
        assert_eq!(gh::gh_upper(&snap, &stage1, true), int(0));
        let back = two.stages[0].cone_snapshot(3, &int(1)).unwrap();
        assert_eq!(gh::gh_upper(&back, &y, true), int(0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_decone(&line(3), 1).is_err());
        let bad = FiniteMetricSpace::from_rows(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![int(0), int(1), int(3)], vec![int(1), int(0), int(1)], vec![int(3), int(1), int(0)]],
            0,
            false,
        )
        .unwrap();
        assert!(build_decone(&bad, 4).is_err());
    }
}
