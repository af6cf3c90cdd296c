//! Limits along filter bases and distances in the finite-horizon cone.
//!
//! A limit is `Determined` only when the tail of the generator intersection
//! forms a single cluster narrower than `2·eps`; clusters are found by
//! sorting tail values and splitting at gaps wider than `2·eps`.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::filters::FilterBase;
use crate::indexset::IndexSet;
use crate::metric::FiniteMetricSpace;
use crate::rational::{self, from_u128};
use crate::Verdict;

/// A rational sequence indexed by `n ≥ 1`, possibly only partially defined.
pub trait Sequence {
    fn at(&self, n: u128) -> Option<BigRational>;
}

/// Adapts a total function into a [`Sequence`].
pub struct FnSeq<F>(pub F);

impl<F: Fn(u128) -> BigRational> Sequence for FnSeq<F> {
    fn at(&self, n: u128) -> Option<BigRational> {
        Some((self.0)(n))
    }
}

/// Closed-form and tabulated rational sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum RationalSequence {
    Constant(BigRational),
    /// `values[(n − 1) mod k]`; `[-1, 1]` is `(−1)ⁿ`.
    Alternate(Vec<BigRational>),
    /// `values[n − 1]`, undefined past the end.
    Table(Vec<BigRational>),
    /// `1/n`.
    Reciprocal,
    /// `coef · nᵏ`.
    Power { coef: BigRational, exp: u32 },
}

impl Sequence for RationalSequence {
    fn at(&self, n: u128) -> Option<BigRational> {
        if n == 0 {
            return None;
        }
        let idx = usize::try_from(n - 1).ok();
        match self {
            RationalSequence::Constant(c) => Some(c.clone()),
            RationalSequence::Alternate(v) if v.is_empty() => None,
            RationalSequence::Alternate(v) => Some(v[((n - 1) % v.len() as u128) as usize].clone()),
            RationalSequence::Table(v) => v.get(idx?).cloned(),
            RationalSequence::Reciprocal => Some(from_u128(n).recip()),
            RationalSequence::Power { coef, exp } => {
                Some(coef * num_traits::pow(from_u128(n), *exp as usize))
            }
        }
    }
}

/// Scaling sequences `αₙ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Scaling {
    Factorial,
    Identity,
    /// `coef · nᵏ` with `coef > 0`.
    Power { coef: BigRational, exp: u32 },
    Table(Vec<BigRational>),
}

impl Sequence for Scaling {
    fn at(&self, n: u128) -> Option<BigRational> {
        if n == 0 {
            return None;
        }
        match self {
            Scaling::Factorial => Some(rational::int(rational::factorial(u64::try_from(n).ok()?))),
            Scaling::Identity => Some(from_u128(n)),
            Scaling::Power { coef, exp } => Some(coef * num_traits::pow(from_u128(n), *exp as usize)),
            Scaling::Table(v) => v.get(usize::try_from(n - 1).ok()?).cloned(),
        }
    }
}

/// Outcome of [`mu_limit`].
#[derive(Debug, Clone, PartialEq)]
pub enum LimitResult {
    Determined(BigRational),
    /// Candidate limits, one per tail cluster, ascending.
    Undetermined(Vec<BigRational>),
    /// The sequence grows without bound along the generators.
    Unbounded,
}

impl LimitResult {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            LimitResult::Determined(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_determined(&self) -> bool {
        matches!(self, LimitResult::Determined(_))
    }
}

fn value_at(seq: &dyn Sequence, n: u128) -> Result<BigRational> {
    seq.at(n)
        .ok_or_else(|| Error::structural(format!("sequence undefined at index {n}")))
}

fn generator_intersection(base: &FilterBase) -> Result<IndexSet> {
    let g = base.intersection();
    if g.is_empty() {
        return Err(Error::EmptyIntersection(format!(
            "generators have empty intersection within [1, {}]",
            base.horizon()
        )));
    }
    Ok(g)
}

/// Unbounded proxy: `|x|` strictly increasing at the quarter, half and end
/// positions of `G`, with the last value at least twice the first.
fn looks_unbounded(seq: &dyn Sequence, g: &IndexSet) -> Result<bool> {
    let m = g.len();
    if m < 3 {
        return Ok(false);
    }
    let pos = [m.div_ceil(4), m.div_ceil(2), m];
    let v: Vec<BigRational> = pos
        .iter()
        .map(|&p| value_at(seq, g.select(p).unwrap()).map(|x| x.abs()))
        .collect::<Result<_>>()?;
    Ok(v[0].is_positive() && v[0] < v[1] && v[1] < v[2] && v[2] >= &v[0] * rational::int(2))
}

/// A block of sorted tail values with no internal gap wider than `2·eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Cluster {
    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / rational::int(2)
    }
}

/// Sorts values and splits at gaps `> 2·eps`.
pub fn clusters(mut values: Vec<BigRational>, eps: &BigRational) -> Vec<Cluster> {
    values.sort();
    let gap = eps * rational::int(2);
    let mut out: Vec<Cluster> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some(c) if &v - &c.hi <= gap => c.hi = v,
            _ => out.push(Cluster { lo: v.clone(), hi: v }),
        }
    }
    out
}

/// Limit of `xₙ` along the filter generated by `base`.
pub fn mu_limit(seq: &dyn Sequence, base: &FilterBase, eps: &BigRational) -> Result<LimitResult> {
    if !eps.is_positive() {
        return Err(Error::precondition("eps must be positive"));
    }
    let g = generator_intersection(base)?;
    if looks_unbounded(seq, &g)? {
        return Ok(LimitResult::Unbounded);
    }
    let tail = g.restrict(base.tail_start(), base.horizon());
    let values = tail.iter().map(|n| value_at(seq, n)).collect::<Result<Vec<_>>>()?;
    let cl = clusters(values, eps);
    if let [only] = cl.as_slice() {
        if &only.hi - &only.lo < eps * rational::int(2) {
            return Ok(LimitResult::Determined(only.midpoint()));
        }
    }
    Ok(LimitResult::Undetermined(cl.iter().map(Cluster::midpoint).collect()))
}

/// Points of one ambient space indexed by `n ∈ [1, H]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSequence {
    points: Vec<usize>,
}

impl PointSequence {
    /// `points[n − 1]` is the point at index `n`.
    pub fn new(points: Vec<usize>, space: &FiniteMetricSpace) -> Result<Self> {
        if let Some(&p) = points.iter().find(|&&p| p >= space.len()) {
            return Err(Error::structural(format!(
                "point index {p} outside the ambient space of {} points",
                space.len()
            )));
        }
        Ok(PointSequence { points })
    }

    pub fn constant(p: usize, len: usize, space: &FiniteMetricSpace) -> Result<Self> {
        Self::new(vec![p; len], space)
    }

    pub fn horizon(&self) -> u128 {
        self.points.len() as u128
    }

    pub fn at(&self, n: u128) -> Option<usize> {
        self.points.get(usize::try_from(n).ok()?.checked_sub(1)?).copied()
    }
}

/// `n ↦ d(xₙ, yₙ)/αₙ`.
struct DistanceRatio<'a> {
    space: &'a FiniteMetricSpace,
    x: &'a PointSequence,
    y: &'a PointSequence,
    alpha: &'a dyn Sequence,
}

impl Sequence for DistanceRatio<'_> {
    fn at(&self, n: u128) -> Option<BigRational> {
        let a = self.alpha.at(n)?;
        if !a.is_positive() {
            return None;
        }
        Some(self.space.d(self.x.at(n)?, self.y.at(n)?) / a)
    }
}

fn check_horizon(seqs: &[&PointSequence], base: &FilterBase) -> Result<()> {
    match seqs.iter().find(|s| s.horizon() < base.horizon()) {
        Some(s) => Err(Error::structural(format!(
            "point sequence of length {} does not cover horizon {}",
            s.horizon(),
            base.horizon()
        ))),
        None => Ok(()),
    }
}

/// `d_∞([xₙ], [yₙ])`: the limit of `d(xₙ, yₙ)/αₙ`. Both sequences must stay
/// at bounded rescaled distance from the basepoint sequence `e`.
#[allow(clippy::too_many_arguments)]
pub fn cone_distance(
    space: &FiniteMetricSpace,
    x: &PointSequence,
    y: &PointSequence,
    e: &PointSequence,
    alpha: &dyn Sequence,
    base: &FilterBase,
    eps: &BigRational,
) -> Result<LimitResult> {
    check_horizon(&[x, y, e], base)?;
    let g = generator_intersection(base)?;
    for (name, s) in [("x", x), ("y", y)] {
        let ratio = DistanceRatio { space, x: s, y: e, alpha };
        if looks_unbounded(&ratio, &g)? {
            return Err(Error::NotInCone(format!(
                "d({name}ₙ, eₙ)/αₙ grows without bound along the generators"
            )));
        }
    }
    mu_limit(&DistanceRatio { space, x, y, alpha }, base, eps)
}

fn difference_verdict(a: &LimitResult, b: &LimitResult, eps: &BigRational, horizon: u128) -> Verdict {
    match (a, b) {
        (LimitResult::Determined(p), LimitResult::Determined(q)) => {
            Verdict::from_bool(&rational::abs_diff(p, q) < eps)
        }
        _ => Verdict::Undetermined { horizon },
    }
}

/// Compares `lim xₙ/αₙ` with `lim xₙ/(αₙ + βₙ)` for bounded `β`.
pub fn check_bounded_add(
    x: &dyn Sequence,
    alpha: &dyn Sequence,
    beta: &dyn Sequence,
    base: &FilterBase,
    eps: &BigRational,
) -> Result<Verdict> {
    let g = generator_intersection(base)?;
    if looks_unbounded(beta, &g)? {
        return Err(Error::precondition("β is not bounded on the generators"));
    }
    let tail = g.restrict(base.tail_start(), base.horizon());
    for n in tail.iter() {
        if !(value_at(alpha, n)? + value_at(beta, n)?).is_positive() {
            return Err(Error::precondition(format!("αₙ + βₙ is not positive at n = {n}")));
        }
    }
    let plain = FnSeq(|n| x.at(n).unwrap_or_default() / alpha.at(n).unwrap_or_default());
    let shifted = FnSeq(|n| {
        x.at(n).unwrap_or_default() / (alpha.at(n).unwrap_or_default() + beta.at(n).unwrap_or_default())
    });
    for n in tail.iter() {
        value_at(x, n)?;
    }
    let l1 = mu_limit(&plain, base, eps)?;
    let l2 = mu_limit(&shifted, base, eps)?;
    Ok(difference_verdict(&l1, &l2, eps, base.horizon()))
}

/// Moving the basepoint by a bounded amount `C` does not change the cone.
///
/// Requires `d(eₙ, e′ₙ) < C` on the generator intersection. Checks the
/// rescaled triangle bound at every index, that membership in the cone is
/// preserved, and that `d_∞(e, e′)` is `0`.
#[allow(clippy::too_many_arguments)]
pub fn check_basepoint_shift(
    space: &FiniteMetricSpace,
    x: &PointSequence,
    e: &PointSequence,
    e_shift: &PointSequence,
    c: &BigRational,
    alpha: &dyn Sequence,
    base: &FilterBase,
    eps: &BigRational,
) -> Result<Verdict> {
    check_horizon(&[x, e, e_shift], base)?;
    let g = generator_intersection(base)?;
    for n in g.iter() {
        let d = space.d(e.at(n).unwrap(), e_shift.at(n).unwrap());
        if d >= c {
            return Err(Error::precondition(format!(
                "d(eₙ, e′ₙ) = {} is not below C = {} at n = {n}",
                rational::format(d),
                rational::format(c)
            )));
        }
    }
    let mut verdict = Verdict::Holds;
    for n in g.iter() {
        let a = value_at(alpha, n)?;
        let xn = x.at(n).unwrap();
        let lhs = space.d(xn, e_shift.at(n).unwrap()) / &a;
        let rhs = (space.d(xn, e.at(n).unwrap()) + c) / &a;
        if lhs > rhs {
            return Ok(Verdict::Fails);
        }
    }
    let from_e = DistanceRatio { space, x, y: e, alpha };
    let from_shift = DistanceRatio { space, x, y: e_shift, alpha };
    if looks_unbounded(&from_e, &g)? != looks_unbounded(&from_shift, &g)? {
        return Ok(Verdict::Fails);
    }
    let shift = mu_limit(&DistanceRatio { space, x: e, y: e_shift, alpha }, base, eps)?;
    verdict = verdict.and(difference_verdict(&shift, &LimitResult::Determined(BigRational::zero()), eps, base.horizon()));
    Ok(verdict)
}
