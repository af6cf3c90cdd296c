//! Reproducible acceptance harness.
//!
//! [`run_suite`] evaluates the ten acceptance criteria under a [`RunConfig`]
//! and returns a report that depends only on the config: no timings, no
//! unordered maps, rationals in reduced `"p/q"` form.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::decone::{self, DeconeSpace};
use crate::error::{Error, Result};
use crate::filters::{self, FilterBase, FloorScaling, ScalingRule};
use crate::gh;
use crate::indexset::{IndexSet, SetRule};
use crate::metric::FiniteMetricSpace;
use crate::rational::{self, int, rat};
use crate::sample;
use crate::slowuf;
use crate::ultralimit::{self, LimitResult, RationalSequence};
use crate::Verdict;

/// Overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "ASYMCONE_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub horizon: u128,
    pub parts: u64,
    #[serde(with = "rational::serde_rat")]
    pub eps: BigRational,
    #[serde(with = "rational::serde_rat_vec")]
    pub ls: Vec<BigRational>,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            horizon: 1_000_000,
            parts: 10,
            eps: rat(1, 1_000_000),
            ls: vec![int(2), rat(3, 2), rat(5, 4), rat(9, 8)],
            seed: 20_240_601,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1000 {
            return Err(Error::precondition(format!("horizon must be ≥ 1000, got {}", self.horizon)));
        }
        if self.parts < 2 {
            return Err(Error::precondition(format!("parts must be ≥ 2, got {}", self.parts)));
        }
        if self.eps <= BigRational::zero() {
            return Err(Error::precondition("eps must be positive"));
        }
        if let Some(l) = self.ls.iter().find(|l| **l <= BigRational::one()) {
            return Err(Error::precondition(format!("every L must exceed 1, got {}", rational::format(l))));
        }
        if self.ls.is_empty() {
            return Err(Error::precondition("need at least one L"));
        }
        Ok(())
    }

    /// The configured directory unless the environment overrides it.
    pub fn resolved_out_dir(&self) -> PathBuf {
        std::env::var_os(OUT_DIR_ENV).map_or_else(|| self.out_dir.clone(), PathBuf::from)
    }

    fn rng(&self, id: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(31).wrapping_add(id))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Undetermined,
}

impl Status {
    fn of(v: Verdict) -> Self {
        match v {
            Verdict::Holds => Status::Pass,
            Verdict::Fails => Status::Fail,
            Verdict::Undetermined { .. } => Status::Undetermined,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub status: Status,
    pub witnesses: Value,
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "exact de-cone embedding"),
    (2, "gh convergence"),
    (3, "case trichotomy bounds"),
    (4, "thin/fast suite"),
    (5, "interval ratio bounds"),
    (6, "bi-lipschitz sweep"),
    (7, "pushforward and bounded accumulation"),
    (8, "mu-limit dichotomy"),
    (9, "gh oracle sandwich"),
    (10, "determinism"),
];

fn report(id: u8, v: Verdict, witnesses: Value) -> CriterionReport {
    CriterionReport {
        id,
        name: CRITERIA[id as usize - 1].1.to_string(),
        status: Status::of(v),
        witnesses,
    }
}

fn fmt(q: &BigRational) -> String {
    rational::format(q)
}

/// The shared de-cone fixture of criteria 1–3 and 6.
pub struct DeconeFixture {
    pub y: FiniteMetricSpace,
    pub x: DeconeSpace,
}

/// A 10-point space whose distances fit the scale window `[1/ln N, ln N]`:
/// all nonzero distances lie in `[1, u]` with `u = min(2, ⌊8·ln N⌋/8)`.
pub fn decone_fixture(cfg: &RunConfig) -> Result<DeconeFixture> {
    let mut rng = cfg.rng(1);
    let top = ((cfg.parts as f64).ln() * 8.0).floor().clamp(8.0, 16.0) as i64;
    let y = sample::band_space(&mut rng, 10);
    let y = FiniteMetricSpace::from_fn(y.labels().to_vec(), 0, |i, j| {
        let d = y.d(i, j);
        if d > &rat(top, 8) {
            rat(top, 8)
        } else {
            d.clone()
        }
    })?;
    let x = decone::build_decone(&y, cfg.parts)?;
    Ok(DeconeFixture { y, x })
}

fn vacuous(id: u8, cfg: &RunConfig) -> Option<CriterionReport> {
    let limit = if id == 3 { 3 } else { 2 };
    (cfg.parts <= limit).then(|| {
        report(
            id,
            Verdict::Holds,
            json!({ "warning": format!("N = {} leaves only degenerate parts; criterion holds vacuously", cfg.parts) }),
        )
    })
}

pub fn criterion_1(cfg: &RunConfig, fx: &DeconeFixture) -> Result<CriterionReport> {
    if let Some(r) = vacuous(1, cfg) {
        return Ok(r);
    }
    let w = decone::verify_embedding(&fx.y, &fx.x)?;
    let ok = w.iter().all(|w| w.exact && w.n0.is_some_and(|n| n <= cfg.parts));
    let n0_max = w.iter().filter_map(|w| w.n0).max();
    Ok(report(
        1,
        Verdict::from_bool(ok),
        json!({ "pairs": w.len(), "max_n0": n0_max, "all_exact": ok }),
    ))
}

pub fn criterion_2(cfg: &RunConfig, fx: &DeconeFixture) -> Result<(CriterionReport, Vec<decone::ConvergenceRow>)> {
    if let Some(r) = vacuous(2, cfg) {
        return Ok((r, Vec::new()));
    }
    let r = fx.y.diameter();
    let schedule: Vec<u64> = (3..=cfg.parts).collect();
    let rows = decone::verify_convergence(&fx.y, &fx.x, &r, &schedule)?;
    let ok = rows.iter().all(|row| !row.covered || row.gh_upper.is_zero());
    let covered: Vec<u64> = rows.iter().filter(|r| r.covered).map(|r| r.n).collect();
    let rep = report(
        2,
        Verdict::from_bool(ok && !covered.is_empty()),
        json!({
            "radius": fmt(&r),
            "covered": covered,
            "gh_upper": rows.iter().map(|r| json!([r.n, fmt(&r.gh_upper)])).collect::<Vec<_>>(),
        }),
    );
    Ok((rep, rows))
}

pub fn criterion_3(cfg: &RunConfig, fx: &DeconeFixture) -> Result<CriterionReport> {
    if let Some(r) = vacuous(3, cfg) {
        return Ok(r);
    }
    let reps = (3..cfg.parts)
        .map(|n| decone::check_case_bounds(&fx.x, n))
        .collect::<Result<Vec<_>>>()?;
    let violations: usize = reps.iter().map(|r| r.violations).sum();
    Ok(report(
        3,
        Verdict::from_bool(violations == 0),
        json!({ "violations": violations, "per_n": reps }),
    ))
}

pub fn criterion_4(cfg: &RunConfig) -> Result<CriterionReport> {
    let h = cfg.horizon;
    let pow2 = IndexSet::from_rule(SetRule::Powers { base: 2 }, h);
    let fact = IndexSet::from_rule_terms(SetRule::Factorials, 30)?;
    let tower = IndexSet::from_rule_terms(SetRule::Tower { base: 2 }, 10)?;
    let named = [
        ("powers2_fast", filters::is_fast(&pow2), Verdict::Holds),
        ("powers2_thin", filters::is_thin(&pow2), Verdict::Fails),
        ("factorial_thin", filters::is_thin(&fact), Verdict::Holds),
        ("tower_thin", filters::is_thin(&tower), Verdict::Holds),
    ];
    let mut ok = named.iter().all(|(_, got, want)| got == want);

    let mut rng = cfg.rng(4);
    let mut thin = (0, 0, 0);
    for _ in 0..100 {
        let t = sample::thin_set(&mut rng, 20);
        match filters::thin_implies_fast(&t) {
            Some(Verdict::Holds) => thin.0 += 1,
            Some(Verdict::Fails) => {
                thin.1 += 1;
                ok = false;
            }
            _ => thin.2 += 1,
        }
    }
    let mut union = (0, 0, 0);
    for _ in 0..100 {
        let a = sample::fast_set(&mut rng, h);
        let b = sample::fast_set(&mut rng, h);
        match filters::union_preserves_fast(&a, &b) {
            Some(Verdict::Holds) => union.0 += 1,
            Some(Verdict::Fails) => {
                union.1 += 1;
                ok = false;
            }
            _ => union.2 += 1,
        }
    }
    Ok(report(
        4,
        Verdict::from_bool(ok),
        json!({
            "named": named.iter().map(|(k, got, _)| json!([k, got.label()])).collect::<Vec<_>>(),
            "thin_sets": { "fast": thin.0, "fails": thin.1, "other": thin.2 },
            "fast_pairs": { "holds": union.0, "fails": union.1, "other": union.2 },
        }),
    ))
}

fn factorial_seed() -> Result<IndexSet> {
    slowuf::seed_set(slowuf::Seed::Factorial, 12)
}

pub fn criterion_5(cfg: &RunConfig) -> Result<CriterionReport> {
    let a = factorial_seed()?;
    let mut v = Verdict::Holds;
    let mut per_l = Vec::new();
    for l in &cfg.ls {
        let sys = slowuf::make_intervals(&a, l)?;
        let nf = slowuf::verify_not_fast(&sys, &a)?;
        let cnf = slowuf::verify_complement_not_fast(&sys, &a)?;
        v = v.and(nf.verdict).and(cnf.verdict);
        per_l.push(json!({
            "L": fmt(l),
            "dropped": sys.dropped(),
            "not_fast": nf,
            "complement_not_fast": cnf,
        }));
    }
    Ok(report(5, v, Value::Array(per_l)))
}

pub fn criterion_6(cfg: &RunConfig, fx: &DeconeFixture) -> Result<CriterionReport> {
    let a = factorial_seed()?;
    let xseq = sample::point_map(&mut cfg.rng(6), &a, fx.y.len());
    let mut ls = cfg.ls.clone();
    ls.sort_by(|p, q| q.cmp(p));
    ls.dedup();
    let mut v = Verdict::Holds;
    let mut worst: Vec<BigRational> = Vec::new();
    for l in &ls {
        let sys = slowuf::make_intervals(&a, l)?;
        let phi = slowuf::build_phi(&xseq, &sys, fx.y.basepoint())?;
        let rep = slowuf::verify_bilipschitz(&phi, &sys, &fx.y)?;
        v = v.and(rep.verdict);
        worst.push(rep.worst);
    }
    let monotone = worst.windows(2).all(|w| w[1] <= w[0]) && worst.iter().all(|w| *w >= BigRational::one());
    Ok(report(
        6,
        v.and(Verdict::from_bool(monotone)),
        json!({
            "L": ls.iter().map(fmt).collect::<Vec<_>>(),
            "worst": worst.iter().map(fmt).collect::<Vec<_>>(),
            "monotone": monotone,
        }),
    ))
}

pub fn criterion_7(cfg: &RunConfig) -> Result<CriterionReport> {
    let h = cfg.horizon;
    let fact = filters::bounded_accumulation(&filters::floor_scaling(&ScalingRule::Factorial, h)?);
    let sqrt = filters::bounded_accumulation(&filters::floor_scaling(&ScalingRule::Sqrt, h)?);
    let acc_ok = fact.verdict.holds() && fact.witness == Some(1) && sqrt.verdict.fails();

    let t_hi = 1000;
    let half = filters::floor_scaling(&ScalingRule::CeilHalf, t_hi)?;
    let t = IndexSet::from_elems((1..=t_hi).filter(|n| n % 3 != 0), t_hi)?;
    let pieces = filters::split_bounded(&t, &half, 2)?;
    let disjoint = pieces[0].intersection(&pieces[1]).is_empty();
    let reassembled = pieces[0].union(&pieces[1]) == t;
    let once = pieces
        .iter()
        .map(|p| half.level_multiplicity(p))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|&m| m <= 1);
    let split_ok = pieces.len() == 2 && disjoint && reassembled && once;

    let seed: Vec<u128> = (1..=30).map(|n| rational::factorial_u128(n).expect("30! fits")).collect();
    let top = *seed.last().expect("nonempty");
    let psi = FloorScaling::from_values(seed.clone())?;
    let pf = filters::pushforward(&FilterBase::cofinite(30), &psi)?;
    let image = pf.member(&IndexSet::from_elems(seed, top)?);

    let v = Verdict::from_bool(acc_ok && split_ok).and(image);
    Ok(report(
        7,
        v,
        json!({
            "factorial": { "verdict": fact.verdict.label(), "witness": fact.witness.map(|w| w.to_string()) },
            "sqrt": sqrt.verdict.label(),
            "split": { "pieces": pieces.len(), "disjoint": disjoint, "reassembled": reassembled, "at_most_once": once },
            "pushforward_contains_seed": image.label(),
        }),
    ))
}

fn limit_json(l: &LimitResult) -> Value {
    match l {
        LimitResult::Determined(q) => json!({ "determined": fmt(q) }),
        LimitResult::Undetermined(c) => json!({ "undetermined": c.iter().map(fmt).collect::<Vec<_>>() }),
        LimitResult::Unbounded => json!("unbounded"),
    }
}

/// Horizon of the bounded-perturbation corpus: the tail `[1000, 2000]` keeps
/// `b/αₙ` far below `eps` for every generated case.
pub const BOUNDED_ADD_HORIZON: u128 = 2000;

pub fn criterion_8(cfg: &RunConfig) -> Result<CriterionReport> {
    let h = cfg.horizon;
    let seq = RationalSequence::Alternate(vec![int(-1), int(1)]);
    let evens = ultralimit::mu_limit(&seq, &FilterBase::new(vec![IndexSet::evens(h)])?, &cfg.eps)?;
    let odds = ultralimit::mu_limit(&seq, &FilterBase::new(vec![IndexSet::odds(h)])?, &cfg.eps)?;
    let dich = evens == LimitResult::Determined(int(1)) && odds == LimitResult::Determined(int(-1));

    let mut rng = cfg.rng(8);
    let base = FilterBase::cofinite(BOUNDED_ADD_HORIZON);
    let mut counts = (0, 0, 0);
    for _ in 0..200 {
        let c = sample::bounded_add_case(&mut rng, BOUNDED_ADD_HORIZON);
        match ultralimit::check_bounded_add(&c.x, &c.alpha, &c.beta, &base, &cfg.eps)? {
            Verdict::Holds => counts.0 += 1,
            Verdict::Fails => counts.1 += 1,
            Verdict::Undetermined { .. } => counts.2 += 1,
        }
    }
    Ok(report(
        8,
        Verdict::from_bool(dich && counts.0 == 200),
        json!({
            "evens": limit_json(&evens),
            "odds": limit_json(&odds),
            "bounded_add": { "holds": counts.0, "fails": counts.1, "undetermined": counts.2 },
        }),
    ))
}

pub fn criterion_9(cfg: &RunConfig) -> Result<CriterionReport> {
    let mut rng = cfg.rng(9);
    let mut sandwich_bad = 0;
    for _ in 0..200 {
        let a = sample::small_metric(&mut rng, 5);
        let b = sample::small_metric(&mut rng, 5);
        let lower = gh::gh_lower(&a, &b);
        let exact = gh::gh_exact(&a, &b, false)?;
        let exact_p = gh::gh_exact(&a, &b, true)?;
        let upper = gh::gh_upper(&a, &b, false);
        let upper_p = gh::gh_upper(&a, &b, true);
        if !(lower <= exact && exact <= upper && exact <= exact_p && exact_p <= upper_p) {
            sandwich_bad += 1;
        }
    }
    let (mut sym_bad, mut tri_bad) = (0, 0);
    for _ in 0..50 {
        let s: Vec<FiniteMetricSpace> = (0..3).map(|_| sample::small_metric(&mut rng, 4)).collect();
        let d = |i: usize, j: usize| gh::gh_exact(&s[i], &s[j], false);
        let (ab, ba, bc, ac) = (d(0, 1)?, d(1, 0)?, d(1, 2)?, d(0, 2)?);
        sym_bad += usize::from(ab != ba);
        tri_bad += usize::from(ac > &ab + &bc);
    }
    Ok(report(
        9,
        Verdict::from_bool(sandwich_bad + sym_bad + tri_bad == 0),
        json!({
            "pairs": 200,
            "sandwich_violations": sandwich_bad,
            "triples": 50,
            "symmetry_violations": sym_bad,
            "triangle_violations": tri_bad,
        }),
    ))
}

/// Criteria 1–9 plus the tabular convergence rows.
fn run_core(cfg: &RunConfig) -> Result<(Vec<CriterionReport>, Vec<decone::ConvergenceRow>)> {
    let fx = decone_fixture(cfg)?;
    let (c2, rows) = criterion_2(cfg, &fx)?;
    let reports = vec![
        criterion_1(cfg, &fx)?,
        c2,
        criterion_3(cfg, &fx)?,
        criterion_4(cfg)?,
        criterion_5(cfg)?,
        criterion_6(cfg, &fx)?,
        criterion_7(cfg)?,
        criterion_8(cfg)?,
        criterion_9(cfg)?,
    ];
    Ok((reports, rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionReport>,
    pub convergence: Vec<decone::ConvergenceRow>,
}

impl SuiteReport {
    pub fn any_failed(&self) -> bool {
        self.criteria.iter().any(|c| c.status == Status::Fail)
    }

    /// The machine-readable report, a JSON array.
    pub fn to_json(&self) -> String {
        crate::io::to_json_string(&self.criteria)
    }

    /// One line per criterion.
    pub fn summary(&self) -> String {
        self.criteria
            .iter()
            .map(|c| format!("criterion {:>2} [{}]: {}\n", c.id, c.name, c.status.label()))
            .collect()
    }

    /// Writes `report.json`, `report.csv` and `convergence.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        let mut w = csv::Writer::from_path(dir.join("report.csv")).map_err(csv_err)?;
        w.write_record(["id", "name", "status"]).map_err(csv_err)?;
        for c in &self.criteria {
            w.write_record([c.id.to_string().as_str(), &c.name, c.status.label()])
                .map_err(csv_err)?;
        }
        w.flush()?;
        crate::io::write_convergence_csv(&dir.join("convergence.csv"), &self.convergence)
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Runs every criterion. Criterion 10 repeats criteria 1–9 under the same
/// config and compares the serialized reports byte for byte.
pub fn run_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let (mut criteria, convergence) = run_core(cfg)?;
    let first = crate::io::to_json_string(&criteria);
    let (again, _) = run_core(cfg)?;
    let second = crate::io::to_json_string(&again);
    criteria.push(report(
        10,
        Verdict::from_bool(first == second),
        json!({ "bytes": first.len(), "identical": first == second }),
    ));
    Ok(SuiteReport { criteria, convergence })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let ok = RunConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            RunConfig { eps: int(0), ..ok.clone() },
            RunConfig { horizon: 999, ..ok.clone() },
            RunConfig { parts: 1, ..ok.clone() },
            RunConfig { ls: vec![int(1)], ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn config_json_defaults() {
        let c: RunConfig = crate::io::parse_json(r#"{"eps":"1/1000","parts":4}"#, "c").unwrap();
        assert_eq!(c.eps, rat(1, 1000));
        assert_eq!(c.parts, 4);
        assert_eq!(c.ls, RunConfig::default().ls);
        assert!(crate::io::parse_json::<RunConfig>(r#"{"bogus":1}"#, "c").is_err());
    }

    #[test]
    fn n_two_is_vacuous() {
        let cfg = RunConfig { parts: 2, ..RunConfig::default() };
        let fx = decone_fixture(&cfg).unwrap();
        let r = criterion_1(&cfg, &fx).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(r.witnesses["warning"].is_string());
    }
}
