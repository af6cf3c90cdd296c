//! Finite-horizon combinatorics of index sets and filters on `ℕ`.
//!
//! Fast and thin are limit properties, so they are decided by tail
//! checkpoints and answered with a three-valued [`Verdict`]. Filters are
//! represented by finitely many generators; membership is judged on the tail
//! half `[⌈H/2⌉, H]` of the horizon, matching non-principal semantics where
//! finitely many exceptions never matter.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::indexset::{Eventual, IndexSet, SetRule};
use crate::rational::{self, from_u128, rat};
use crate::Verdict;

/// Thresholds for the tail tests. Defaults are documented per field.
#[derive(Debug, Clone)]
pub struct TailConfig {
    /// Minimum number of terms before `is_fast` commits (16).
    pub fast_min_terms: u128,
    /// Required growth of `aₙ/n` from first to last checkpoint (5/4).
    pub fast_growth: BigRational,
    /// `aₙ/n` at the last checkpoint must be at least this (4); keeps density
    /// below 1/4 at the top of any set certified fast.
    pub fast_floor: BigRational,
    /// `aₙ/n` is called flat when later checkpoints stay within this factor
    /// of the first (101/100).
    pub flat_slack: BigRational,
    /// Minimum number of terms before `is_thin` commits (5).
    pub thin_min_terms: u128,
    /// Required decay of `aₙ/aₙ₊₁` from first to last checkpoint (9/10).
    pub thin_decay: BigRational,
    /// The ratio is called stuck when later checkpoints stay above this
    /// factor of the first (19/20).
    pub thin_stuck: BigRational,
}

impl Default for TailConfig {
    fn default() -> Self {
        TailConfig {
            fast_min_terms: 16,
            fast_growth: rat(5, 4),
            fast_floor: rat(4, 1),
            flat_slack: rat(101, 100),
            thin_min_terms: 5,
            thin_decay: rat(9, 10),
            thin_stuck: rat(19, 20),
        }
    }
}

/// Three spaced 0-based positions in the last quartile of `m ≥ 3` terms.
pub fn checkpoints(m: u128) -> [u128; 3] {
    assert!(m >= 3);
    let s = (3 * m / 4).min(m - 3);
    [s, (s + m - 1) / 2, m - 1]
}

fn term(a: &IndexSet, pos: u128) -> u128 {
    a.select(pos + 1).expect("checkpoint within set")
}

pub fn is_fast(a: &IndexSet) -> Verdict {
    is_fast_with(a, &TailConfig::default())
}

/// Tail test for `aₙ/n → ∞` at the checkpoints of [`checkpoints`].
pub fn is_fast_with(a: &IndexSet, cfg: &TailConfig) -> Verdict {
    let undecided = Verdict::Undetermined { horizon: a.horizon() };
    let m = a.len();
    if m < cfg.fast_min_terms.max(3) {
        return undecided;
    }
    let r: Vec<BigRational> = checkpoints(m)
        .iter()
        .map(|&p| BigRational::new(from_u128(term(a, p)).to_integer(), (p + 1).into()))
        .collect();
    if r[0] < r[1] && r[1] < r[2] && r[2] >= &r[0] * &cfg.fast_growth && r[2] >= cfg.fast_floor {
        return Verdict::Holds;
    }
    let cap = &r[0] * &cfg.flat_slack;
    if r[1] <= cap && r[2] <= cap {
        return Verdict::Fails;
    }
    undecided
}

pub fn is_thin(a: &IndexSet) -> Verdict {
    is_thin_with(a, &TailConfig::default())
}

/// Tail test for `aₙ/aₙ₊₁ → 0` at the checkpoints of the ratio sequence.
pub fn is_thin_with(a: &IndexSet, cfg: &TailConfig) -> Verdict {
    let undecided = Verdict::Undetermined { horizon: a.horizon() };
    let m = a.len();
    if m < cfg.thin_min_terms.max(4) {
        return undecided;
    }
    let rho: Vec<BigRational> = checkpoints(m - 1)
        .iter()
        .map(|&p| BigRational::new(from_u128(term(a, p)).to_integer(), from_u128(term(a, p + 1)).to_integer()))
        .collect();
    if rho[0] > rho[1] && rho[1] > rho[2] && rho[2] <= &rho[0] * &cfg.thin_decay {
        return Verdict::Holds;
    }
    let floor = &rho[0] * &cfg.thin_stuck;
    if rho[1] >= floor && rho[2] >= floor {
        return Verdict::Fails;
    }
    undecided
}

/// `Some(Holds)` when a certified-thin set is not classified as failing to
/// be fast; `None` when `A` is not certified thin (nothing to check).
pub fn thin_implies_fast(a: &IndexSet) -> Option<Verdict> {
    if !is_thin(a).holds() {
        return None;
    }
    Some(Verdict::from_bool(!is_fast(a).fails()))
}

/// `|X ∩ [1, x − 1]| / x`, exactly.
pub fn density_ratio(x_set: &IndexSet, x: u128) -> Result<BigRational> {
    if x == 0 || x > x_set.horizon() {
        return Err(Error::precondition(format!(
            "density point {x} outside [1, {}]",
            x_set.horizon()
        )));
    }
    Ok(BigRational::new(
        from_u128(x_set.count_below(x)).to_integer(),
        from_u128(x).to_integer(),
    ))
}

/// Checks that the union of two certified-fast sets is not classified as
/// failing. `None` when either input is not certified fast.
pub fn union_preserves_fast(a: &IndexSet, b: &IndexSet) -> Option<Verdict> {
    if !is_fast(a).holds() || !is_fast(b).holds() {
        return None;
    }
    Some(Verdict::from_bool(!is_fast(&a.union(b)).fails()))
}

/// A set is treated as finite when tagged so, or when it is an untagged
/// truncation whose elements all sit in the lower half of the horizon.
pub fn looks_finite(s: &IndexSet) -> bool {
    match s.eventual() {
        Eventual::Finite => true,
        Eventual::Explicit => s.max().is_none_or(|m| m <= s.horizon() / 2),
        _ => false,
    }
}

/// Finitely many generators standing in for a filter on `ℕ`.
#[derive(Debug, Clone)]
pub struct FilterBase {
    generators: Vec<IndexSet>,
    horizon: u128,
    fip: Verdict,
}

impl FilterBase {
    /// Truncates every generator to the smallest generator horizon.
    pub fn new(generators: Vec<IndexSet>) -> Result<Self> {
        let horizon = generators
            .iter()
            .map(IndexSet::horizon)
            .min()
            .ok_or_else(|| Error::structural("a filter base needs at least one generator"))?;
        let generators: Vec<IndexSet> = generators.iter().map(|g| g.truncate(horizon)).collect();
        let fip = fip_status(&generators, horizon);
        Ok(FilterBase {
            generators,
            horizon,
            fip,
        })
    }

    /// The cofinite filter at horizon `h`.
    pub fn cofinite(h: u128) -> Self {
        Self::new(vec![IndexSet::naturals(h)]).expect("one generator")
    }

    pub fn generators(&self) -> &[IndexSet] {
        &self.generators
    }

    pub fn horizon(&self) -> u128 {
        self.horizon
    }

    /// `Fails` if some intersection is empty; `Holds` if every pairwise
    /// intersection has at least `⌈√H⌉` elements; otherwise undetermined.
    pub fn fip(&self) -> Verdict {
        self.fip
    }

    /// Every finite intersection of generators is nonempty within `[1, H]`.
    pub fn has_basic_fip(&self) -> bool {
        !self.intersection().is_empty()
    }

    /// Intersection of all generators.
    pub fn intersection(&self) -> IndexSet {
        let mut it = self.generators.iter();
        let first = it.next().expect("nonempty").clone();
        it.fold(first, |acc, g| acc.intersection(g))
    }

    /// Start of the tail window used for membership.
    pub fn tail_start(&self) -> u128 {
        self.horizon.div_ceil(2)
    }

    /// Intersection of all generators restricted to the tail window.
    pub fn tail(&self) -> IndexSet {
        self.intersection().restrict(self.tail_start(), self.horizon)
    }

    /// Adds a generator, truncating to the common horizon.
    pub fn refine(&self, g: IndexSet) -> Result<FilterBase> {
        let mut gens = self.generators.clone();
        gens.push(g);
        FilterBase::new(gens)
    }

    /// `Holds` if the generated filter contains `S` up to a finite set,
    /// `Fails` if it contains the complement of `S`, else undetermined.
    pub fn member(&self, s: &IndexSet) -> Verdict {
        tail_membership(&self.tail(), s, self.horizon)
    }
}

fn tail_membership(tail: &IndexSet, s: &IndexSet, horizon: u128) -> Verdict {
    if tail.is_empty() {
        return Verdict::Undetermined { horizon };
    }
    let meet = tail.intersection(s).len();
    if meet == tail.len() {
        Verdict::Holds
    } else if meet == 0 {
        Verdict::Fails
    } else {
        Verdict::Undetermined { horizon }
    }
}

fn fip_status(gens: &[IndexSet], horizon: u128) -> Verdict {
    let all = gens[1..].iter().fold(gens[0].clone(), |acc, g| acc.intersection(g));
    if all.is_empty() {
        return Verdict::Fails;
    }
    let need = rational::isqrt(horizon) + u128::from(rational::isqrt(horizon).pow(2) < horizon);
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i..] {
            if a.intersection(b).len() < need {
                return Verdict::Undetermined { horizon };
            }
        }
    }
    Verdict::Holds
}

/// Stand-in for the filter of cofinite sets and complements of fast sets.
#[derive(Debug, Clone)]
pub struct SlowBase {
    base: FilterBase,
}

/// Fast sets whose complements generate the slow base.
pub const SLOW_GENERATOR_RULES: [SetRule; 4] = [
    SetRule::Powers { base: 2 },
    SetRule::Powers { base: 3 },
    SetRule::Polynomial { exp: 2 },
    SetRule::Factorials,
];

/// Largest horizon for [`slow_base`]; the complement of the squares alone has
/// `√H` runs.
pub const SLOW_MAX_HORIZON: u128 = 10_000_000_000;

pub fn slow_base(h: u128) -> Result<SlowBase> {
    if h < 1000 {
        return Err(Error::precondition(format!("slow base needs horizon ≥ 1000, got {h}")));
    }
    if h > SLOW_MAX_HORIZON {
        return Err(Error::Resource(format!(
            "slow base horizon {h} exceeds {SLOW_MAX_HORIZON}"
        )));
    }
    let mut gens: Vec<IndexSet> = SLOW_GENERATOR_RULES
        .iter()
        .map(|&r| IndexSet::from_rule(r, h).complement())
        .collect();
    gens.push(IndexSet::cofinite(rational::isqrt(h), h));
    Ok(SlowBase {
        base: FilterBase::new(gens)?,
    })
}

impl SlowBase {
    pub fn base(&self) -> &FilterBase {
        &self.base
    }

    pub fn horizon(&self) -> u128 {
        self.base.horizon
    }

    /// `Holds` iff the complement of `S` is finite or certified fast; `Fails`
    /// iff the complement is certified not fast, or `S` itself is finite or
    /// fast while its complement is infinite.
    pub fn member(&self, s: &IndexSet) -> Verdict {
        let h = s.horizon();
        let comp = s.complement();
        if looks_finite(&comp) {
            return Verdict::Holds;
        }
        let comp_fast = is_fast(&comp);
        if comp_fast.holds() {
            return Verdict::Holds;
        }
        if comp_fast.fails() {
            return Verdict::Fails;
        }
        if looks_finite(s) || is_fast(s).holds() {
            return Verdict::Fails;
        }
        Verdict::Undetermined { horizon: h }
    }
}

/// A map `ψ: ℕ → ℕ` that can push index sets forward.
pub trait IndexMap {
    /// `ψ(S)`, dropping indices sent to 0.
    fn image(&self, s: &IndexSet) -> Result<IndexSet>;
}

/// Identity on `ℕ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMap;

impl IndexMap for IdentityMap {
    fn image(&self, s: &IndexSet) -> Result<IndexSet> {
        Ok(s.clone())
    }
}

/// Scaling sequences `α` whose floors are computed exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalingRule {
    /// `αₙ = n!`.
    Factorial,
    /// `αₙ = n`.
    Identity,
    /// `αₙ = n + 1/2`.
    HalfShift,
    /// `αₙ = √n` (floor via integer square root).
    Sqrt,
    /// `αₙ = ⌈n/2⌉`.
    CeilHalf,
    /// `αₙ = values[n − 1]`.
    Table(Vec<BigRational>),
}

impl ScalingRule {
    /// `⌊αₙ⌋`, or `None` beyond the rule's range or on overflow.
    pub fn floor_at(&self, n: u128) -> Option<u128> {
        match self {
            ScalingRule::Factorial => rational::factorial_u128(u32::try_from(n).ok()?),
            ScalingRule::Identity | ScalingRule::HalfShift => Some(n),
            ScalingRule::Sqrt => Some(rational::isqrt(n)),
            ScalingRule::CeilHalf => Some(n.div_ceil(2)),
            ScalingRule::Table(v) => {
                let q = v.get(usize::try_from(n).ok()?.checked_sub(1)?)?;
                if q.is_zero() || *q < BigRational::zero() {
                    return Some(0);
                }
                rational::to_u128(&rational::floor(q))
            }
        }
    }
}

/// `ψ(n) = ⌊αₙ⌋` tabulated on `[1, D]`.
#[derive(Debug, Clone)]
pub struct FloorScaling {
    psi: Vec<u128>,
}

/// Tabulates `ψ` on `[1, h]`, stopping early where `⌊αₙ⌋` leaves `u128`.
pub fn floor_scaling(alpha: &ScalingRule, h: u128) -> Result<FloorScaling> {
    let cap = usize::try_from(h)
        .ok()
        .filter(|&c| c <= 50_000_000)
        .ok_or_else(|| Error::Resource(format!("scaling table of length {h} is too large")))?;
    let psi: Vec<u128> = (1..=cap as u128).map_while(|n| alpha.floor_at(n)).collect();
    if psi.is_empty() {
        return Err(Error::precondition("scaling sequence has no representable terms"));
    }
    Ok(FloorScaling { psi })
}

impl FloorScaling {
    pub fn from_values(psi: Vec<u128>) -> Result<Self> {
        if psi.is_empty() {
            return Err(Error::precondition("empty scaling table"));
        }
        Ok(FloorScaling { psi })
    }

    /// Length `D` of the tabulated domain `[1, D]`.
    pub fn domain(&self) -> u128 {
        self.psi.len() as u128
    }

    pub fn psi(&self, n: u128) -> Option<u128> {
        self.psi.get(usize::try_from(n).ok()?.checked_sub(1)?).copied()
    }

    pub fn values(&self) -> &[u128] {
        &self.psi
    }

    /// `S_r = ψ⁻¹({r})` as an index set at the domain horizon.
    pub fn level_set(&self, r: u128) -> IndexSet {
        let elems = (1..=self.domain()).filter(|&n| self.psi[n as usize - 1] == r);
        IndexSet::from_elems(elems, self.domain()).expect("ascending")
    }

    /// `(r, |S_r|)` for every nonempty level, ascending in `r`.
    pub fn level_sizes(&self) -> Vec<(u128, u128)> {
        let mut counts: BTreeMap<u128, u128> = BTreeMap::new();
        for &v in &self.psi {
            *counts.entry(v).or_default() += 1;
        }
        counts.into_iter().collect()
    }

    /// `max_r |S ∩ S_r|`.
    pub fn level_multiplicity(&self, s: &IndexSet) -> Result<u128> {
        let mut counts: BTreeMap<u128, u128> = BTreeMap::new();
        for n in s.iter() {
            let r = self.psi(n).ok_or_else(|| out_of_domain(n, self.domain()))?;
            *counts.entry(r).or_default() += 1;
        }
        Ok(counts.into_values().max().unwrap_or(0))
    }
}

fn out_of_domain(n: u128, d: u128) -> Error {
    Error::precondition(format!("index {n} outside the scaling domain [1, {d}]"))
}

impl IndexMap for FloorScaling {
    fn image(&self, s: &IndexSet) -> Result<IndexSet> {
        let mut vals: Vec<u128> = Vec::new();
        for n in s.iter() {
            let v = self.psi(n).ok_or_else(|| out_of_domain(n, self.domain()))?;
            if v > 0 {
                vals.push(v);
            }
        }
        vals.sort_unstable();
        vals.dedup();
        let top = self.psi.iter().copied().max().unwrap_or(1).max(1);
        IndexSet::from_elems(vals, top)
    }
}

/// Result of [`bounded_accumulation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accumulation {
    pub verdict: Verdict,
    /// Largest complete level size, reported with `Holds`.
    pub witness: Option<u128>,
    /// Sizes of the complete levels examined, ascending in `r`.
    pub sizes: Vec<(u128, u128)>,
}

/// Decides whether `|S_r|` is uniformly bounded. The topmost level may be cut
/// off by the domain and is ignored. `Holds` when the larger-`r` half never
/// exceeds the smaller-`r` half; `Fails` when sizes strictly grow across the
/// tail checkpoints.
pub fn bounded_accumulation(psi: &FloorScaling) -> Accumulation {
    let mut sizes = psi.level_sizes();
    sizes.pop();
    let horizon = psi.domain();
    let undecided = |sizes| Accumulation {
        verdict: Verdict::Undetermined { horizon },
        witness: None,
        sizes,
    };
    if sizes.len() < 4 {
        return undecided(sizes);
    }
    let half = sizes.len() / 2;
    let head = sizes[..half].iter().map(|s| s.1).max().unwrap();
    let tail = sizes[half..].iter().map(|s| s.1).max().unwrap();
    if tail <= head {
        return Accumulation {
            verdict: Verdict::Holds,
            witness: Some(head),
            sizes,
        };
    }
    let [c1, c2, c3] = checkpoints(sizes.len() as u128).map(|c| sizes[c as usize].1);
    if c1 < c2 && c2 < c3 {
        return Accumulation {
            verdict: Verdict::Fails,
            witness: None,
            sizes,
        };
    }
    undecided(sizes)
}

/// Splits `T` into `n` disjoint pieces meeting every level `S_r` at most
/// once, assigning round-robin within each level in ascending order.
pub fn split_bounded(t: &IndexSet, psi: &FloorScaling, n: usize) -> Result<Vec<IndexSet>> {
    if n == 0 {
        return Err(Error::precondition("need at least one piece"));
    }
    let mut totals: BTreeMap<u128, usize> = BTreeMap::new();
    for x in t.iter() {
        let r = psi.psi(x).ok_or_else(|| out_of_domain(x, psi.domain()))?;
        *totals.entry(r).or_default() += 1;
    }
    if let Some((&r, &count)) = totals.iter().find(|(_, &c)| c > n) {
        return Err(Error::Accumulation {
            level: r,
            count,
            bound: n,
        });
    }
    let mut seen: BTreeMap<u128, usize> = BTreeMap::new();
    let mut pieces: Vec<Vec<u128>> = vec![Vec::new(); n];
    for x in t.iter() {
        let r = psi.psi(x).expect("checked above");
        let k = seen.entry(r).or_default();
        pieces[*k].push(x);
        *k += 1;
    }
    pieces
        .into_iter()
        .map(|p| IndexSet::from_elems(p, t.horizon()))
        .collect()
}

/// The image filter `{A : ψ⁻¹(A) ∈ μ}` of a base under `ψ`.
#[derive(Debug, Clone)]
pub struct Pushforward {
    pub base: FilterBase,
    tail_image: IndexSet,
}

/// Images of the generators form the new base; membership is judged on the
/// image of the source tail.
pub fn pushforward(base: &FilterBase, psi: &dyn IndexMap) -> Result<Pushforward> {
    if base.fip().fails() {
        return Err(Error::EmptyIntersection(
            "cannot push forward a base without the finite intersection property".into(),
        ));
    }
    let images = base
        .generators()
        .iter()
        .map(|g| psi.image(g))
        .collect::<Result<Vec<_>>>()?;
    let tail_image = psi.image(&base.tail())?;
    Ok(Pushforward {
        base: FilterBase::new(images)?,
        tail_image,
    })
}

impl Pushforward {
    /// `Holds` if `ψ(G) ⊆ A` for the tail `G` of the source intersection,
    /// `Fails` if `ψ(G)` misses `A` entirely.
    pub fn member(&self, a: &IndexSet) -> Verdict {
        tail_membership(&self.tail_image, a, self.tail_image.horizon())
    }
}

/// Ratio helper used by reports: `count / x` as a reduced rational.
pub fn ratio(count: u128, x: u128) -> BigRational {
    if x == 0 {
        return BigRational::one();
    }
    BigRational::new(from_u128(count).to_integer(), from_u128(x).to_integer())
}
