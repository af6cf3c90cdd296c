//! Interval systems around a thin seed and the re-indexing map `φ`.
//!
//! For a thin `A = {a₁ < a₂ < …}` and `L > 1`, each `aₙ` spawns the block
//! `X_{L,aₙ} = [⌈aₙ/L⌉, ⌊L·aₙ⌋]`. Unions `X_{L,I}` over `I ⊆ A` are neither
//! fast nor co-fast, which is what lets a slow filter be enlarged along a
//! chain `L₁ > L₂ > … → 1`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filters::{self, FilterBase, IndexMap};
use crate::indexset::IndexSet;
use crate::metric::FiniteMetricSpace;
use crate::rational::{self, from_u128};
use crate::Verdict;

/// One block `[lo, hi] ∋ a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Block {
    pub a: u128,
    pub lo: u128,
    pub hi: u128,
}

#[derive(Debug, Clone)]
pub struct IntervalSystem {
    seed: IndexSet,
    l: BigRational,
    /// Every block, including the dropped prefix.
    blocks: Vec<Block>,
    dropped: usize,
}

fn check_l(l: &BigRational) -> Result<()> {
    if *l <= BigRational::one() {
        return Err(Error::precondition(format!("need L > 1, got {}", rational::format(l))));
    }
    Ok(())
}

fn to_u128(q: &num_bigint::BigInt) -> Result<u128> {
    rational::to_u128(q).ok_or_else(|| Error::Resource("block endpoint exceeds u128".into()))
}

fn blocks_for(seed: &IndexSet, l: &BigRational) -> Result<Vec<Block>> {
    seed.iter()
        .map(|a| {
            let aq = from_u128(a);
            Ok(Block {
                a,
                lo: to_u128(&rational::ceil(&(&aq / l)))?,
                hi: to_u128(&rational::floor(&(&aq * l)))?,
            })
        })
        .collect()
}

/// Builds the blocks for a certified-thin seed and drops the shortest prefix
/// after which they are pairwise disjoint.
pub fn make_intervals(seed: &IndexSet, l: &BigRational) -> Result<IntervalSystem> {
    let thin = filters::is_thin(seed);
    if !thin.holds() {
        return Err(Error::precondition(format!("seed is not certified thin ({thin})")));
    }
    make_intervals_unchecked(seed, l)
}

/// [`make_intervals`] without the thinness certificate.
pub fn make_intervals_unchecked(seed: &IndexSet, l: &BigRational) -> Result<IntervalSystem> {
    check_l(l)?;
    if seed.len() > 10_000 {
        return Err(Error::Resource("seed has more than 10000 elements".into()));
    }
    let blocks = blocks_for(seed, l)?;
    let dropped = blocks
        .windows(2)
        .rposition(|w| w[0].hi >= w[1].lo)
        .map_or(0, |i| i + 1);
    let sys = IntervalSystem {
        seed: seed.clone(),
        l: l.clone(),
        blocks,
        dropped,
    };
    assert!(
        sys.dropped <= sys.disjointness_bound(),
        "dropped prefix exceeds the ratio bound"
    );
    Ok(sys)
}

impl IntervalSystem {
    pub fn l(&self) -> &BigRational {
        &self.l
    }

    pub fn seed(&self) -> &IndexSet {
        &self.seed
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn all_blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Blocks after the dropped prefix.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks[self.dropped..]
    }

    /// Seed elements whose blocks survive the drop.
    pub fn kept_seed(&self) -> IndexSet {
        match self.blocks().first() {
            Some(b) => self.seed.restrict(b.a, self.seed.horizon()),
            None => IndexSet::empty(self.seed.horizon()),
        }
    }

    /// `⌊L·a_last⌋ + 1`, so that `⌈L·aₙ⌉` is always in range.
    pub fn horizon(&self) -> u128 {
        self.blocks.last().map_or(1, |b| b.hi + 1)
    }

    /// Smallest `k` with `aᵢ/aᵢ₊₁ < 1/L²` for every `i ≥ k`; blocks from `k`
    /// on are disjoint, so the dropped prefix never exceeds it.
    pub fn disjointness_bound(&self) -> usize {
        let l2 = &self.l * &self.l;
        let ok = |w: &[Block]| from_u128(w[0].a) * &l2 < from_u128(w[1].a);
        self.blocks
            .windows(2)
            .rposition(|w| !ok(w))
            .map_or(0, |i| i + 1)
    }

    /// Nonzero when some kept blocks intersect.
    pub fn overlaps(&self) -> Option<(u128, u128)> {
        self.blocks()
            .windows(2)
            .find(|w| w[0].hi >= w[1].lo)
            .map(|w| (w[0].a, w[1].a))
    }

    fn check_subset(&self, i: &IndexSet) -> Result<()> {
        if let Some(x) = i.first_not_in(&self.seed) {
            return Err(Error::precondition(format!("{x} is not in the seed")));
        }
        Ok(())
    }

    /// `X_{L,I}`: union of the kept blocks of `I`.
    pub fn x_li(&self, i: &IndexSet) -> Result<IndexSet> {
        self.check_subset(i)?;
        let runs = self
            .blocks()
            .iter()
            .filter(|b| i.contains(b.a))
            .map(|b| (b.lo, b.hi));
        Ok(IndexSet::from_runs(runs, self.horizon()))
    }

    fn x_li_at(&self, i: &IndexSet, horizon: u128) -> Result<IndexSet> {
        let x = self.x_li(i)?;
        Ok(IndexSet::from_runs(x.runs().iter().copied(), horizon))
    }
}

/// One density witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioWitness {
    /// Previous seed element (complement check only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_prev: Option<String>,
    pub a: String,
    pub x: String,
    #[serde(with = "rational::serde_rat")]
    pub ratio: BigRational,
    #[serde(with = "rational::serde_rat")]
    pub bound: BigRational,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub verdict: Verdict,
    pub witnesses: Vec<RatioWitness>,
}

fn require_infinite(i: &IndexSet) -> Result<()> {
    if !i.is_known_infinite() && i.len() < 10 {
        return Err(Error::precondition(
            "need an infinite-tagged I or at least 10 elements",
        ));
    }
    Ok(())
}

fn report(witnesses: Vec<RatioWitness>) -> RatioReport {
    let verdict = Verdict::from_bool(witnesses.iter().all(|w| w.ok));
    RatioReport { verdict, witnesses }
}

/// At `x = ⌈L·aₙ⌉` the block of `aₙ` lies below `x`, so
/// `|X_{L,I} ∩ [1, x−1]| / x ≥ 1 − 1/L² − 1/(L·aₙ)`; the density does not
/// tend to 0 along `X_{L,I}` and the set is not fast.
pub fn verify_not_fast(sys: &IntervalSystem, i: &IndexSet) -> Result<RatioReport> {
    require_infinite(i)?;
    let x_set = sys.x_li(i)?;
    let out = sys
        .blocks()
        .iter()
        .filter(|b| i.contains(b.a))
        .map(|b| witness_at(sys, &x_set, b.a))
        .collect::<Result<Vec<_>>>()?;
    Ok(report(out))
}

/// The single check behind [`verify_not_fast`] at one `a ∈ I`, with no size
/// requirement on `I`.
pub fn not_fast_witness(sys: &IntervalSystem, i: &IndexSet, a: u128) -> Result<RatioWitness> {
    if !i.contains(a) {
        return Err(Error::precondition(format!("{a} is not in I")));
    }
    witness_at(sys, &sys.x_li(i)?, a)
}

fn witness_at(sys: &IntervalSystem, x_set: &IndexSet, a: u128) -> Result<RatioWitness> {
    let l = sys.l();
    let aq = from_u128(a);
    let x = to_u128(&rational::ceil(&(&aq * l)))?;
    let ratio = filters::density_ratio(x_set, x)?;
    let bound = BigRational::one() - (l * l).recip() - (l * &aq).recip();
    Ok(RatioWitness {
        a_prev: None,
        a: a.to_string(),
        x: x.to_string(),
        ok: ratio >= bound,
        ratio,
        bound,
    })
}

/// At `x = ⌈aₙ/L⌉` the complement has density at least
/// `1 − L²·aₙ₋₁/aₙ − L/aₙ`, for consecutive kept `aₙ₋₁ < aₙ` in `I`.
pub fn verify_complement_not_fast(sys: &IntervalSystem, i: &IndexSet) -> Result<RatioReport> {
    require_infinite(i)?;
    let comp = sys.x_li(i)?.complement();
    let l = sys.l();
    let l2 = l * l;
    let one = BigRational::one();
    let chosen: Vec<&Block> = sys.blocks().iter().filter(|b| i.contains(b.a)).collect();
    let mut out = Vec::new();
    for w in chosen.windows(2) {
        let (prev, cur) = (w[0], w[1]);
        let a = from_u128(cur.a);
        let x = cur.lo;
        let ratio = filters::density_ratio(&comp, x)?;
        let bound = &one - &l2 * from_u128(prev.a) / &a - l / &a;
        out.push(RatioWitness {
            a_prev: Some(prev.a.to_string()),
            a: cur.a.to_string(),
            x: x.to_string(),
            ok: ratio >= bound,
            ratio,
            bound,
        });
    }
    Ok(report(out))
}

/// `L_k = 1 + 2^{−k}` for `k = 1..=count`.
pub fn default_ls(count: u32) -> Vec<BigRational> {
    (1..=count)
        .map(|k| BigRational::one() + BigRational::new(1.into(), num_bigint::BigInt::one() << k))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub verdict: Verdict,
    /// Common number of dropped seed elements.
    pub dropped: usize,
    /// `(L_k, L_r, element)` of the first failed containment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<(String, String, String)>,
    /// FIP status of the slow base enlarged by each `X_{L,I}`.
    pub fip: Vec<Verdict>,
}

/// The test family of index sets: all of the kept seed, its even- and
/// odd-position elements, and its upper half.
pub fn test_family(kept: &IndexSet) -> Vec<IndexSet> {
    let elems: Vec<u128> = kept.iter().collect();
    let h = kept.horizon();
    let pick = |f: &dyn Fn(usize) -> bool| {
        IndexSet::from_elems(
            elems.iter().enumerate().filter(|(k, _)| f(*k)).map(|(_, &a)| a),
            h,
        )
        .expect("ascending")
    };
    vec![
        kept.clone(),
        pick(&|k| k % 2 == 0),
        pick(&|k| k % 2 == 1),
        pick(&|k| k >= elems.len() / 2),
    ]
}

/// Checks `X_{L_k,I} ⊆ X_{L_r,I}` for every later `L_k` and earlier `L_r`
/// over the test family, with a common dropped prefix, and that each
/// `X_{L,I}` is compatible with the slow base.
pub fn ascending_chain(seed: &IndexSet, ls: &[BigRational]) -> Result<ChainReport> {
    let systems = ls
        .iter()
        .map(|l| make_intervals(seed, l))
        .collect::<Result<Vec<_>>>()?;
    let dropped = systems.iter().map(IntervalSystem::dropped).max().unwrap_or(0);
    let kept = match seed.select(dropped as u128 + 1) {
        Some(first) => seed.restrict(first, seed.horizon()),
        None => IndexSet::empty(seed.horizon()),
    };
    let horizon = systems.iter().map(IntervalSystem::horizon).max().unwrap_or(1);
    let family = test_family(&kept);
    let mut counterexample = None;
    'outer: for (r, sr) in systems.iter().enumerate() {
        for sk in &systems[r + 1..] {
            for i in &family {
                let small = sk.x_li_at(i, horizon)?;
                let big = sr.x_li_at(i, horizon)?;
                if let Some(x) = small.first_not_in(&big) {
                    counterexample = Some((
                        rational::format(sk.l()),
                        rational::format(sr.l()),
                        x.to_string(),
                    ));
                    break 'outer;
                }
            }
        }
    }
    // Intersections of truncations are subsets of the full intersections, so
    // a FIP certificate below the cap carries over.
    let cap = horizon.min(filters::SLOW_MAX_HORIZON);
    let mut fip = Vec::new();
    if cap >= 1000 {
        let slow = filters::slow_base(cap)?;
        for s in &systems {
            for i in &family {
                let x = s.x_li_at(i, horizon)?.restrict(1, cap);
                fip.push(if x.is_empty() {
                    Verdict::Undetermined { horizon: cap }
                } else {
                    slow.base().refine(x)?.fip()
                });
            }
        }
    }
    let fip_verdict = fip.iter().fold(Verdict::Holds, |v, f| v.and(*f));
    let verdict = if counterexample.is_some() {
        Verdict::Fails
    } else if horizon < 1000 {
        Verdict::Undetermined { horizon }
    } else {
        fip_verdict
    };
    Ok(ChainReport {
        verdict,
        dropped,
        counterexample,
        fip,
    })
}

/// A point sequence that is constant on blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSequence {
    blocks: Vec<(Block, usize)>,
    default: usize,
}

impl BlockSequence {
    /// Point at index `m`; the default point off every block.
    pub fn at(&self, m: u128) -> usize {
        let k = self.blocks.partition_point(|(b, _)| b.hi < m);
        match self.blocks.get(k) {
            Some((b, p)) if b.lo <= m => *p,
            _ => self.default,
        }
    }

    pub fn blocks(&self) -> &[(Block, usize)] {
        &self.blocks
    }
}

/// `y_m = x_{aₙ}` for `m` in the block of `aₙ`, the basepoint elsewhere.
/// `xseq` maps seed elements to points and must cover every kept element.
pub fn build_phi(
    xseq: &std::collections::BTreeMap<u128, usize>,
    sys: &IntervalSystem,
    basepoint: usize,
) -> Result<BlockSequence> {
    if let Some((a, b)) = sys.overlaps() {
        return Err(Error::structural(format!("blocks of {a} and {b} overlap")));
    }
    let blocks = sys
        .blocks()
        .iter()
        .map(|b| {
            xseq.get(&b.a)
                .map(|&p| (*b, p))
                .ok_or_else(|| Error::precondition(format!("sequence undefined at seed element {}", b.a)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockSequence {
        blocks,
        default: basepoint,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiLipschitzReport {
    pub verdict: Verdict,
    /// `max(aₙ/lo, hi/aₙ)` over blocks whose point is off the basepoint.
    #[serde(with = "rational::serde_rat")]
    pub worst: BigRational,
}

/// Checks `d(x_{aₙ},e)/(L·aₙ) ≤ d(y_m,e)/m ≤ L·d(x_{aₙ},e)/aₙ` for every `m`
/// in every kept block. Both sides are monotone in `m`, so the block
/// endpoints decide the whole block.
pub fn verify_bilipschitz(
    phi: &BlockSequence,
    sys: &IntervalSystem,
    space: &FiniteMetricSpace,
) -> Result<BiLipschitzReport> {
    let l = sys.l();
    let e = space.basepoint();
    let mut ok = true;
    let mut worst = BigRational::one();
    for (b, p) in phi.blocks() {
        if *p >= space.len() {
            return Err(Error::structural(format!("point {p} outside the space")));
        }
        let d = space.d(*p, e);
        if d.is_zero() {
            continue;
        }
        let a = from_u128(b.a);
        let lower = d / (l * &a);
        let upper = d * l / &a;
        for m in [b.lo, b.hi] {
            let y = space.d(phi.at(m), e) / from_u128(m);
            ok &= lower <= y && y <= upper;
        }
        let w = std::cmp::max(&a / from_u128(b.lo), from_u128(b.hi) / &a);
        if w > worst {
            worst = w;
        }
    }
    Ok(BiLipschitzReport {
        verdict: Verdict::from_bool(ok),
        worst,
    })
}

/// `ψ(m) = aₙ` for `m` in the kept block of `aₙ`; other indices are dropped.
#[derive(Debug, Clone)]
pub struct BlockCollapse<'a> {
    pub sys: &'a IntervalSystem,
}

impl IndexMap for BlockCollapse<'_> {
    fn image(&self, s: &IndexSet) -> Result<IndexSet> {
        let hits = self
            .sys
            .blocks()
            .iter()
            .filter(|b| s.count_upto(b.hi) > s.count_below(b.lo))
            .map(|b| b.a);
        IndexSet::from_elems(hits, self.sys.seed().horizon())
    }
}

/// Membership of `S` in the pushforward, under block collapse, of the base
/// generated by `X_{L,I}`.
pub fn transported_membership(sys: &IntervalSystem, i: &IndexSet, s: &IndexSet) -> Result<Verdict> {
    let base = FilterBase::new(vec![sys.x_li(i)?])?;
    if !base.has_basic_fip() {
        return Ok(Verdict::Undetermined { horizon: base.horizon() });
    }
    let pf = filters::pushforward(&base, &BlockCollapse { sys })?;
    Ok(pf.member(s))
}

/// Thin seeds used by the demo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Seed {
    /// `{n! : 3 ≤ n ≤ max_n}`.
    Factorial,
    /// `{2^{n²} : 1 ≤ n ≤ max_n}`.
    Tower,
}

impl std::str::FromStr for Seed {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "factorial" => Ok(Seed::Factorial),
            "tower" => Ok(Seed::Tower),
            _ => Err(Error::structural(format!("unknown seed {s:?} (factorial|tower)"))),
        }
    }
}

pub fn seed_set(seed: Seed, max_n: u32) -> Result<IndexSet> {
    let terms: Vec<u128> = match seed {
        Seed::Factorial => (3..=max_n)
            .map(|n| rational::factorial_u128(n).ok_or_else(|| Error::Resource(format!("{n}! exceeds u128"))))
            .collect::<Result<_>>()?,
        Seed::Tower => (1..=max_n)
            .map(|n| {
                n.checked_mul(n)
                    .and_then(|e| 2u128.checked_pow(e))
                    .ok_or_else(|| Error::Resource(format!("2^({n}²) exceeds u128")))
            })
            .collect::<Result<_>>()?,
    };
    let h = terms.last().copied().unwrap_or(1);
    IndexSet::from_elems(terms, h)
}

/// Everything the demo reports for one `L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoEntry {
    #[serde(with = "rational::serde_rat")]
    pub l: BigRational,
    pub dropped: usize,
    pub blocks: Vec<Block>,
    pub not_fast: RatioReport,
    pub complement_not_fast: RatioReport,
    pub bilipschitz: BiLipschitzReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub seed: Seed,
    pub max_n: u32,
    pub entries: Vec<DemoEntry>,
    pub chain: ChainReport,
    /// Worst bi-Lipschitz ratio never increases as `L` decreases.
    pub worst_monotone: bool,
}

/// Runs every check for each `L` with a fixed point sequence on the seed.
pub fn demo(
    seed: Seed,
    max_n: u32,
    ls: &[BigRational],
    space: &FiniteMetricSpace,
    xseq: &std::collections::BTreeMap<u128, usize>,
) -> Result<DemoReport> {
    let a = seed_set(seed, max_n)?;
    let mut entries = Vec::new();
    for l in ls {
        let sys = make_intervals(&a, l)?;
        let phi = build_phi(xseq, &sys, space.basepoint())?;
        entries.push(DemoEntry {
            l: l.clone(),
            dropped: sys.dropped(),
            blocks: sys.blocks().to_vec(),
            not_fast: verify_not_fast(&sys, &a)?,
            complement_not_fast: verify_complement_not_fast(&sys, &a)?,
            bilipschitz: verify_bilipschitz(&phi, &sys, space)?,
        });
    }
    let worst_monotone = entries
        .windows(2)
        .all(|w| w[0].l <= w[1].l || w[1].bilipschitz.worst <= w[0].bilipschitz.worst);
    Ok(DemoReport {
        seed,
        max_n,
        chain: ascending_chain(&a, ls)?,
        entries,
        worst_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use std::collections::BTreeMap;

    fn factorial_seed(lo: u32, hi: u32) -> IndexSet {
        let v: Vec<u128> = (lo..=hi).map(|n| rational::factorial_u128(n).unwrap()).collect();
        let h = *v.last().unwrap();
        IndexSet::from_elems(v, h).unwrap()
    }

    #[test]
    fn factorial_blocks_with_tie() {
        let sys = make_intervals(&factorial_seed(3, 10), &int(2)).unwrap();
        assert_eq!(sys.all_blocks()[0], Block { a: 6, lo: 3, hi: 12 });
        assert_eq!(sys.all_blocks()[1], Block { a: 24, lo: 12, hi: 48 });
        assert_eq!(sys.dropped(), 1);
        assert!(sys.overlaps().is_none());
        assert!(sys.dropped() <= sys.disjointness_bound());
    }

    #[test]
    fn narrow_windows_need_no_drop() {
        let sys = make_intervals(&factorial_seed(3, 12), &rat(1001, 1000)).unwrap();
        assert_eq!(sys.dropped(), 0);
    }

    #[test]
    fn singleton_and_thinness_gate() {
        let one = IndexSet::from_elems([24], 24).unwrap();
        assert!(make_intervals(&one, &int(2)).is_err());
        let sys = make_intervals_unchecked(&one, &int(2)).unwrap();
        assert_eq!((sys.blocks().len(), sys.dropped()), (1, 0));
        assert!(make_intervals(&factorial_seed(3, 10), &int(1)).is_err());
    }

    #[test]
    fn x_li_examples() {
        let a = factorial_seed(3, 10);
        let sys = make_intervals(&a, &int(2)).unwrap();
        let full = sys.x_li(&a).unwrap();
        assert_eq!(full.runs().len(), 7);
        assert!(sys.x_li(&IndexSet::empty(a.horizon())).unwrap().is_empty());
        let two = IndexSet::from_elems([120, 5040], a.horizon()).unwrap();
        assert_eq!(sys.x_li(&two).unwrap().runs(), &[(60, 240), (2520, 10080)]);
        let bad = IndexSet::from_elems([7], a.horizon()).unwrap();
        assert!(sys.x_li(&bad).is_err());
    }

    #[test]
    fn ratio_bounds_hold_on_factorials() {
        let a = factorial_seed(3, 12);
        for l in [int(2), rat(3, 2), rat(5, 4), rat(9, 8)] {
            let sys = make_intervals(&a, &l).unwrap();
            let nf = verify_not_fast(&sys, &a).unwrap();
            assert_eq!(nf.verdict, Verdict::Holds, "L = {l}");
            let cnf = verify_complement_not_fast(&sys, &a).unwrap();
            assert_eq!(cnf.verdict, Verdict::Holds, "L = {l}");
            assert!(!filters::is_fast(&sys.x_li(&a).unwrap()).holds());
        }
        let sys = make_intervals(&a, &int(2)).unwrap();
        let nf = verify_not_fast(&sys, &a).unwrap();
        assert!(nf.witnesses.iter().all(|w| w.ratio >= rat(74, 100)));
    }

    #[test]
    fn single_block_witness() {
        let a = factorial_seed(3, 12);
        let sys = make_intervals(&a, &int(2)).unwrap();
        let one = IndexSet::from_elems([720], a.horizon()).unwrap();
        assert!(verify_not_fast(&sys, &one).is_err());
        let w = not_fast_witness(&sys, &one, 720).unwrap();
        // block [360, 1440] alone, counted below x = 1440
        assert_eq!(w.ratio, rat(1080, 1440));
        assert!(w.ok);
    }

    #[test]
    fn tower_seed_complement_bound() {
        let a = seed_set(Seed::Tower, 10).unwrap();
        let sys = make_intervals(&a, &int(2)).unwrap();
        let cnf = verify_complement_not_fast(&sys, &a).unwrap();
        assert_eq!(cnf.verdict, Verdict::Holds);
        let w = cnf.witnesses.last().unwrap();
        // 1 − 4·2^{81}/2^{100} − 2/2^{100}
        let expect = int(1) - rat(4, 1) / int(num_bigint::BigInt::one() << 19) - rat(2, 1) / int(num_bigint::BigInt::one() << 100);
        assert_eq!(w.bound, expect);
    }

    #[test]
    fn chain_orientation() {
        let a = factorial_seed(3, 12);
        let ls = [int(2), rat(3, 2), rat(5, 4), rat(9, 8)];
        let ok = ascending_chain(&a, &ls).unwrap();
        assert_eq!(ok.verdict, Verdict::Holds);
        assert_eq!(ascending_chain(&a, &ls[..1]).unwrap().verdict, Verdict::Holds);
        let swapped = [rat(9, 8), int(2)];
        let bad = ascending_chain(&a, &swapped).unwrap();
        assert_eq!(bad.verdict, Verdict::Fails);
        assert!(bad.counterexample.is_some());
        assert_eq!(default_ls(3), vec![rat(3, 2), rat(5, 4), rat(9, 8)]);
    }

    fn demo_space() -> FiniteMetricSpace {
        crate::metric::line_at(&[int(0), int(1), int(2), rat(7, 2)])
    }

    #[test]
    fn phi_is_blockwise() {
        let a = factorial_seed(3, 10);
        let sys = make_intervals(&a, &int(2)).unwrap();
        let constant: BTreeMap<u128, usize> = a.iter().map(|x| (x, 2)).collect();
        let phi = build_phi(&constant, &sys, 0).unwrap();
        assert_eq!(phi.at(24), 2);
        assert_eq!(phi.at(49), 0);
        assert_eq!(phi.at(10), 0);

        let spread: BTreeMap<u128, usize> = a.iter().enumerate().map(|(k, x)| (x, k % 4)).collect();
        let phi = build_phi(&spread, &sys, 0).unwrap();
        assert_eq!(phi.at(120), spread[&120]);

        let mut other = spread.clone();
        other.insert(6, 3);
        assert_eq!(build_phi(&other, &sys, 0).unwrap(), phi);

        let raw = IntervalSystem { dropped: 0, ..sys.clone() };
        assert!(build_phi(&spread, &raw, 0).is_err());
        let mut partial = spread.clone();
        partial.remove(&720);
        assert!(build_phi(&partial, &sys, 0).is_err());
    }

    #[test]
    fn bilipschitz_sweep_is_monotone() {
        let a = factorial_seed(3, 12);
        let xseq: BTreeMap<u128, usize> = a.iter().enumerate().map(|(k, x)| (x, 1 + k % 3)).collect();
        let report = demo(Seed::Factorial, 12, &[int(2), rat(3, 2), rat(5, 4), rat(9, 8)], &demo_space(), &xseq).unwrap();
        let worst: Vec<BigRational> = report.entries.iter().map(|e| e.bilipschitz.worst.clone()).collect();
        assert_eq!(worst, vec![int(2), rat(3, 2), rat(5, 4), rat(9, 8)]);
        assert!(report.entries.iter().all(|e| e.bilipschitz.verdict.holds()));
        assert!(report.worst_monotone);
        assert_eq!(report.chain.verdict, Verdict::Holds);
    }

    #[test]
    fn pushforward_through_collapse() {
        let a = factorial_seed(3, 12);
        let sys = make_intervals(&a, &int(2)).unwrap();
        let i = IndexSet::from_elems([120, 40320, 479001600], a.horizon()).unwrap();
        assert_eq!(transported_membership(&sys, &i, &i).unwrap(), Verdict::Holds);
        let rest = a.difference(&i);
        assert_eq!(transported_membership(&sys, &i, &rest).unwrap(), Verdict::Fails);
    }
}
