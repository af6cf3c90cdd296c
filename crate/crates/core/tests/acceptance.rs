//! The ten acceptance criteria, run sequentially with their runtime limits.
//! Prints one line per criterion and exits nonzero if any fails.

use std::time::{Duration, Instant};

use asymcone::suite::{self, CriterionReport, RunConfig, Status};
use asymcone::Result;

struct Outcome {
    id: u8,
    name: &'static str,
    ok: bool,
    elapsed: Duration,
    limit: Option<Duration>,
    detail: String,
}

fn check(
    id: u8,
    limit: Option<u64>,
    f: impl FnOnce() -> Result<CriterionReport>,
) -> Outcome {
    let start = Instant::now();
    let res = f();
    let elapsed = start.elapsed();
    let limit = limit.map(Duration::from_secs);
    let in_time = limit.is_none_or(|l| elapsed < l);
    let (ok, detail) = match res {
        Ok(r) => (r.status == Status::Pass && in_time, r.witnesses.to_string()),
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome {
        id,
        name: suite::CRITERIA[id as usize - 1].1,
        ok,
        elapsed,
        limit,
        detail,
    }
}

fn main() {
    let cfg = RunConfig::default();
    let mut out = Vec::new();

    // The fixture build is charged to criterion 1.
    let start = Instant::now();
    let fx = suite::decone_fixture(&cfg).expect("fixture");
    let build = start.elapsed();
    let mut c1 = check(1, Some(5), || suite::criterion_1(&cfg, &fx));
    c1.elapsed += build;
    c1.ok &= c1.elapsed < Duration::from_secs(5);
    out.push(c1);
    out.push(check(2, Some(30), || suite::criterion_2(&cfg, &fx).map(|r| r.0)));
    out.push(check(3, None, || suite::criterion_3(&cfg, &fx)));
    out.push(check(4, Some(10), || suite::criterion_4(&cfg)));
    out.push(check(5, Some(5), || suite::criterion_5(&cfg)));
    out.push(check(6, None, || suite::criterion_6(&cfg, &fx)));
    out.push(check(7, None, || suite::criterion_7(&cfg)));
    out.push(check(8, None, || suite::criterion_8(&cfg)));
    out.push(check(9, None, || suite::criterion_9(&cfg)));
    out.push(check(10, None, || {
        let a = suite::run_suite(&cfg)?.to_json();
        let b = suite::run_suite(&cfg)?.to_json();
        let same = a == b;
        Ok(CriterionReport {
            id: 10,
            name: "determinism".into(),
            status: if same { Status::Pass } else { Status::Fail },
            witnesses: serde_json::json!({ "bytes": a.len(), "identical": same }),
        })
    }));

    println!("\nacceptance criteria");
    for o in &out {
        let limit = o.limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
        println!(
            "criterion {:>2} [{}]: {} in {:.2}s{}",
            o.id,
            o.name,
            if o.ok { "PASS" } else { "FAIL" },
            o.elapsed.as_secs_f64(),
            limit
        );
        if !o.ok {
            println!("    {}", o.detail);
        }
    }
    let failed = out.iter().filter(|o| !o.ok).count();
    println!("\n{} passed, {} failed", out.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
