//! Truncations of infinite subsets of `ℕ = {1, 2, …}`.
//!
//! An [`IndexSet`] is stored as sorted, disjoint, non-adjacent closed runs
//! `[lo, hi]`, so unions of huge intervals cost nothing more than sparse
//! rule-generated sets. Every set carries a horizon `H` (all elements lie in
//! `[1, H]`) and an [`Eventual`] tag describing what is known beyond `H`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational;

/// Closed-form generators for sparse sets whose terms outgrow listing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetRule {
    /// `b^n`, n ≥ 1.
    Powers { base: u128 },
    /// `n!`, n ≥ 1.
    Factorials,
    /// `n^k`, n ≥ 1.
    Polynomial { exp: u32 },
    /// `b^(n²)`, n ≥ 1.
    Tower { base: u128 },
    /// `start + step·n`, n ≥ 0.
    Arithmetic { start: u128, step: u128 },
    /// `[from, ∞)`.
    Cofinite { from: u128 },
}

impl SetRule {
    /// The n-th term (1-based), or `None` on `u128` overflow.
    pub fn term(&self, n: u32) -> Option<u128> {
        assert!(n >= 1);
        match *self {
            SetRule::Powers { base } => base.checked_pow(n),
            SetRule::Factorials => rational::factorial_u128(n),
            SetRule::Polynomial { exp } => (n as u128).checked_pow(exp),
            SetRule::Tower { base } => base.checked_pow(n.checked_mul(n)?),
            SetRule::Arithmetic { start, step } => start.checked_add(step.checked_mul(n as u128 - 1)?),
            SetRule::Cofinite { from } => from.checked_add(n as u128 - 1),
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            SetRule::Powers { base } | SetRule::Tower { base } => base >= 2,
            SetRule::Polynomial { exp } => exp >= 1,
            SetRule::Arithmetic { start, step } => start >= 1 && step >= 1,
            SetRule::Cofinite { from } => from >= 1,
            SetRule::Factorials => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::structural(format!("degenerate set rule {self}")))
        }
    }
}

impl fmt::Display for SetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetRule::Powers { base } => write!(f, "powers:{base}"),
            SetRule::Factorials => f.write_str("factorial"),
            SetRule::Polynomial { exp } => write!(f, "poly:{exp}"),
            SetRule::Tower { base } => write!(f, "tower:{base}"),
            SetRule::Arithmetic { start, step } => write!(f, "arith:{start}:{step}"),
            SetRule::Cofinite { from } => write!(f, "cofinite:{from}"),
        }
    }
}

impl FromStr for SetRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::structural(format!("unknown set rule {s:?}"));
        let mut parts = s.split(':');
        let name = parts.next().ok_or_else(bad)?;
        let mut num = || -> Result<u128> { parts.next().ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let rule = match name {
            "powers" => SetRule::Powers { base: num()? },
            "factorial" | "factorials" => SetRule::Factorials,
            "poly" => SetRule::Polynomial {
                exp: u32::try_from(num()?).map_err(|_| bad())?,
            },
            "tower" => SetRule::Tower { base: num()? },
            "arith" => SetRule::Arithmetic {
                start: num()?,
                step: num()?,
            },
            "cofinite" => SetRule::Cofinite { from: num()? },
            _ => return Err(bad()),
        };
        rule.check()?;
        Ok(rule)
    }
}

/// What is known about a set beyond its horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eventual {
    /// A truncation with no information about the tail.
    Explicit,
    /// The set is genuinely finite; nothing lies beyond the horizon.
    Finite,
    /// The set contains every integer from some point on.
    Cofinite,
    /// The set continues according to a rule.
    Rule(SetRule),
    /// Complement of a rule-generated set.
    ComplementOfRule(SetRule),
}

impl Eventual {
    fn complement(&self) -> Eventual {
        match self {
            Eventual::Explicit => Eventual::Explicit,
            Eventual::Finite => Eventual::Cofinite,
            Eventual::Cofinite => Eventual::Finite,
            Eventual::Rule(SetRule::Cofinite { .. }) => Eventual::Finite,
            Eventual::Rule(r) => Eventual::ComplementOfRule(*r),
            Eventual::ComplementOfRule(r) => Eventual::Rule(*r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    runs: Vec<(u128, u128)>,
    /// `before[i]` = number of elements in runs `0..i`.
    before: Vec<u128>,
    horizon: u128,
    eventual: Eventual,
}

impl IndexSet {
    fn from_normalized(runs: Vec<(u128, u128)>, horizon: u128, eventual: Eventual) -> Self {
        let mut before = Vec::with_capacity(runs.len());
        let mut acc = 0u128;
        for &(lo, hi) in &runs {
            before.push(acc);
            acc += hi - lo + 1;
        }
        IndexSet {
            runs,
            before,
            horizon,
            eventual,
        }
    }

    /// Normalizes arbitrary runs (sorted, merged) and clips them to `[1, H]`.
    pub fn from_runs(runs: impl IntoIterator<Item = (u128, u128)>, horizon: u128) -> Self {
        let mut rs: Vec<(u128, u128)> = runs
            .into_iter()
            .map(|(lo, hi)| (lo.max(1), hi.min(horizon)))
            .filter(|(lo, hi)| lo <= hi)
            .collect();
        rs.sort_unstable();
        let mut merged: Vec<(u128, u128)> = Vec::with_capacity(rs.len());
        for (lo, hi) in rs {
            match merged.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Self::from_normalized(merged, horizon, Eventual::Explicit)
    }

    /// Strictly increasing positive elements, all `≤ horizon`.
    pub fn from_elems(elems: impl IntoIterator<Item = u128>, horizon: u128) -> Result<Self> {
        let mut runs: Vec<(u128, u128)> = Vec::new();
        let mut prev = 0u128;
        for x in elems {
            if x == 0 {
                return Err(Error::structural("index sets live in ℕ = {1, 2, …}; got 0"));
            }
            if x <= prev {
                return Err(Error::structural(format!(
                    "elements must be strictly increasing ({prev} then {x})"
                )));
            }
            if x > horizon {
                return Err(Error::structural(format!("element {x} exceeds horizon {horizon}")));
            }
            match runs.last_mut() {
                Some(last) if last.1 + 1 == x => last.1 = x,
                _ => runs.push((x, x)),
            }
            prev = x;
        }
        Ok(Self::from_normalized(runs, horizon, Eventual::Explicit))
    }

    pub fn empty(horizon: u128) -> Self {
        Self::from_normalized(Vec::new(), horizon, Eventual::Explicit)
    }

    /// `[1, H]`, tagged cofinite.
    pub fn naturals(horizon: u128) -> Self {
        Self::from_runs([(1, horizon)], horizon).with_eventual(Eventual::Cofinite)
    }

    /// `[from, H]`, tagged cofinite.
    pub fn cofinite(from: u128, horizon: u128) -> Self {
        Self::from_runs([(from, horizon)], horizon).with_eventual(Eventual::Cofinite)
    }

    pub fn interval(lo: u128, hi: u128, horizon: u128) -> Self {
        Self::from_runs([(lo, hi)], horizon)
    }

    pub fn evens(horizon: u128) -> Self {
        Self::from_rule(SetRule::Arithmetic { start: 2, step: 2 }, horizon)
    }

    pub fn odds(horizon: u128) -> Self {
        Self::from_rule(SetRule::Arithmetic { start: 1, step: 2 }, horizon)
    }

    /// All rule terms `≤ bound`, with horizon `bound`.
    pub fn from_rule(rule: SetRule, bound: u128) -> Self {
        if let SetRule::Cofinite { from } = rule {
            return Self::from_runs([(from, bound)], bound).with_eventual(Eventual::Rule(rule));
        }
        if let SetRule::Arithmetic { start, step } = rule {
            if step == 1 {
                return Self::from_runs([(start, bound)], bound)
                    .with_eventual(Eventual::Rule(rule));
            }
        }
        let elems = (1u32..)
            .map(|n| rule.term(n))
            .take_while(|t| matches!(t, Some(x) if *x <= bound))
            .flatten();
        Self::from_elems(elems, bound)
            .expect("rule terms are strictly increasing")
            .with_eventual(Eventual::Rule(rule))
    }

    /// The first `terms` rule terms; the horizon is the last term, so sparse
    /// rules may reach far beyond any listed horizon.
    pub fn from_rule_terms(rule: SetRule, terms: u32) -> Result<Self> {
        let elems: Vec<u128> = (1..=terms)
            .map(|n| {
                rule.term(n)
                    .ok_or_else(|| Error::Resource(format!("term {n} of {rule} overflows u128")))
            })
            .collect::<Result<_>>()?;
        let horizon = elems.last().copied().unwrap_or(1);
        Ok(Self::from_elems(elems, horizon)?.with_eventual(Eventual::Rule(rule)))
    }

    pub fn with_eventual(mut self, eventual: Eventual) -> Self {
        self.eventual = eventual;
        self
    }

    /// Same elements, larger horizon.
    pub fn with_horizon(mut self, horizon: u128) -> Result<Self> {
        if self.max().is_some_and(|m| m > horizon) {
            return Err(Error::structural(format!(
                "cannot shrink horizon below largest element {}",
                self.max().unwrap()
            )));
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn horizon(&self) -> u128 {
        self.horizon
    }

    pub fn eventual(&self) -> &Eventual {
        &self.eventual
    }

    pub fn runs(&self) -> &[(u128, u128)] {
        &self.runs
    }

    pub fn len(&self) -> u128 {
        match self.runs.last() {
            Some(&(lo, hi)) => self.before[self.runs.len() - 1] + (hi - lo + 1),
            None => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn min(&self) -> Option<u128> {
        self.runs.first().map(|r| r.0)
    }

    pub fn max(&self) -> Option<u128> {
        self.runs.last().map(|r| r.1)
    }

    /// Tagged as finite (nothing beyond the horizon).
    pub fn is_known_finite(&self) -> bool {
        self.eventual == Eventual::Finite
    }

    /// Tagged as infinite (cofinite or rule-continued).
    pub fn is_known_infinite(&self) -> bool {
        matches!(
            self.eventual,
            Eventual::Cofinite | Eventual::Rule(_) | Eventual::ComplementOfRule(_)
        )
    }

    fn run_index_upto(&self, x: u128) -> Option<usize> {
        // Last run with lo ≤ x.
        let i = self.runs.partition_point(|&(lo, _)| lo <= x);
        i.checked_sub(1)
    }

    pub fn contains(&self, x: u128) -> bool {
        self.run_index_upto(x).is_some_and(|i| x <= self.runs[i].1)
    }

    /// `|S ∩ [1, x]|`.
    pub fn count_upto(&self, x: u128) -> u128 {
        match self.run_index_upto(x) {
            Some(i) => {
                let (lo, hi) = self.runs[i];
                self.before[i] + (x.min(hi) - lo + 1)
            }
            None => 0,
        }
    }

    /// `|S ∩ [1, x − 1]|`.
    pub fn count_below(&self, x: u128) -> u128 {
        if x <= 1 {
            0
        } else {
            self.count_upto(x - 1)
        }
    }

    /// The `k`-th smallest element, 1-based.
    pub fn select(&self, k: u128) -> Option<u128> {
        if k == 0 || k > self.len() {
            return None;
        }
        let i = self.before.partition_point(|&b| b < k) - 1;
        Some(self.runs[i].0 + (k - 1 - self.before[i]))
    }

    pub fn iter(&self) -> impl Iterator<Item = u128> + '_ {
        self.runs.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    /// Elements as a vector; refuses sets with more than `limit` elements.
    pub fn to_vec(&self, limit: u128) -> Result<Vec<u128>> {
        if self.len() > limit {
            return Err(Error::Resource(format!(
                "set has {} elements, listing limit is {limit}",
                self.len()
            )));
        }
        Ok(self.iter().collect())
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let horizon = self.horizon.max(other.horizon);
        let eventual = match (&self.eventual, &other.eventual) {
            (Eventual::Cofinite, _) | (_, Eventual::Cofinite) => Eventual::Cofinite,
            (Eventual::Finite, Eventual::Finite) => Eventual::Finite,
            (a, Eventual::Finite) if self.eventual == *a => a.clone(),
            (Eventual::Finite, b) => b.clone(),
            (a, b) if a == b => a.clone(),
            _ => Eventual::Explicit,
        };
        Self::from_runs(self.runs.iter().chain(&other.runs).copied(), horizon)
            .with_eventual(eventual)
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        let horizon = self.horizon.min(other.horizon);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.runs.len() && j < other.runs.len() {
            let (a0, a1) = self.runs[i];
            let (b0, b1) = other.runs[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        let eventual = match (&self.eventual, &other.eventual) {
            (Eventual::Finite, _) | (_, Eventual::Finite) => Eventual::Finite,
            (Eventual::Cofinite, Eventual::Cofinite) => Eventual::Cofinite,
            (Eventual::Cofinite, b) => b.clone(),
            (a, Eventual::Cofinite) => a.clone(),
            (a, b) if a == b => a.clone(),
            _ => Eventual::Explicit,
        };
        Self::from_runs(out, horizon).with_eventual(eventual)
    }

    /// `[1, H] \ S`.
    pub fn complement(&self) -> IndexSet {
        let mut out = Vec::with_capacity(self.runs.len() + 1);
        let mut next = 1u128;
        for &(lo, hi) in &self.runs {
            if lo > next {
                out.push((next, lo - 1));
            }
            next = hi + 1;
        }
        if next <= self.horizon {
            out.push((next, self.horizon));
        }
        Self::from_normalized(out, self.horizon, self.eventual.complement())
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        let other = IndexSet::from_normalized(other.runs.clone(), self.horizon.max(other.horizon), Eventual::Explicit);
        let mut out = self.intersection(&other.complement());
        out.horizon = self.horizon;
        out.eventual = Eventual::Explicit;
        out
    }

    /// `S ∩ [lo, hi]`, keeping the horizon.
    pub fn restrict(&self, lo: u128, hi: u128) -> IndexSet {
        let window = IndexSet::from_runs([(lo, hi)], self.horizon);
        let mut out = self.intersection(&window);
        out.eventual = Eventual::Explicit;
        out
    }

    /// `S ∩ [1, h]` with horizon `h` and the same tail tag. Horizons above the
    /// current one are left unchanged.
    pub fn truncate(&self, h: u128) -> IndexSet {
        if h >= self.horizon {
            return self.clone();
        }
        let mut out = IndexSet::from_runs(self.runs.iter().copied(), h);
        out.eventual = self.eventual.clone();
        out
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.intersection(other).len() == self.len()
    }

    /// Smallest element of `self` missing from `other`.
    pub fn first_not_in(&self, other: &IndexSet) -> Option<u128> {
        let missing = self.difference(other);
        missing.min()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &(lo, hi)) in self.runs.iter().take(8).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if lo == hi {
                write!(f, "{lo}")?;
            } else {
                write!(f, "{lo}..={hi}")?;
            }
        }
        if self.runs.len() > 8 {
            write!(f, ", …")?;
        }
        write!(f, "}} (H = {})", self.horizon)
    }
}
