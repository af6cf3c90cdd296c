//! Command-line front end: de-cone building, set classification, the
//! interval demo, GH distances, μ-limits and the acceptance suite.
//!
//! Exit status: 0 on success, 1 when the suite reports a failed criterion,
//! 2 on malformed input or any other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use asymcone::rational;
use asymcone::suite::{self, RunConfig};
use asymcone::ultralimit::{self, LimitResult};
use asymcone::{decone, filters, gh, io, sample, slowuf, BigRational, IndexSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "asymcone", version, about = "Exact finite-horizon checks for asymptotic cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify de-cone spaces.
    #[command(subcommand)]
    Decone(DeconeCmd),
    /// Classify index sets.
    #[command(subcommand)]
    Fastset(FastsetCmd),
    /// Interval systems around a thin seed.
    #[command(subcommand)]
    Slowuf(SlowufCmd),
    /// Gromov-Hausdorff distance between two spaces.
    Ghdist(GhArgs),
    /// Limits along a filter base.
    #[command(subcommand)]
    Limit(LimitCmd),
    /// Run every acceptance criterion and write the report.
    Suite(SuiteArgs),
}

#[derive(Subcommand)]
enum DeconeCmd {
    /// Write the truncated de-cone of a space.
    Build {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, default_value_t = 10)]
        parts: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare rescaled balls of the de-cone with balls of the space.
    Verify {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, default_value_t = 10)]
        parts: u64,
        /// Ball radius; defaults to the diameter of the space.
        #[arg(long)]
        radius: Option<String>,
        /// `a..b` (inclusive) or a comma-separated list; defaults to `3..N`.
        #[arg(long)]
        schedule: Option<String>,
        /// CSV with columns n, gh_upper, window_lo, window_hi.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FastsetCmd {
    /// Thin/fast verdicts for a set.
    Classify {
        #[arg(long)]
        set: PathBuf,
        /// Replaces the horizon given in the file.
        #[arg(long)]
        horizon: Option<u128>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedArg {
    Factorial,
    Tower,
}

#[derive(Subcommand)]
enum SlowufCmd {
    /// Ratio witnesses, drop counts and bi-Lipschitz ratios for each L.
    Demo {
        #[arg(long, value_enum, default_value = "factorial")]
        seed: SeedArg,
        #[arg(long, default_value_t = 12)]
        max_n: u32,
        #[arg(long = "L", value_delimiter = ',', default_value = "2,3/2,5/4,9/8")]
        ls: Vec<String>,
        /// Space for the point sequence; a random 10-point space by default.
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        rng_seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GhMode {
    Exact,
    Bounds,
}

#[derive(Args)]
struct GhArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, value_enum, default_value = "bounds")]
    mode: GhMode,
    /// Force the basepoints to correspond.
    #[arg(long)]
    pointed: bool,
}

#[derive(Subcommand)]
enum LimitCmd {
    /// Limit of a rational sequence along a filter base.
    Eval {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        base: PathBuf,
        #[arg(long, default_value = "1e-6")]
        eps: String,
    },
}

#[derive(Args)]
struct SuiteArgs {
    /// JSON run config; its fields override the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    horizon: Option<u128>,
    #[arg(long)]
    parts: Option<u64>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long = "L", value_delimiter = ',')]
    ls: Option<Vec<String>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; `ASYMCONE_OUT_DIR` overrides it.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn parse_q(s: &str) -> anyhow::Result<BigRational> {
    Ok(rational::parse(s)?)
}

fn print_json(v: &impl serde::Serialize) {
    print!("{}", io::to_json_string(v));
}

fn parse_schedule(s: &str, n: u64) -> anyhow::Result<Vec<u64>> {
    let s = s.replace('N', &n.to_string());
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().context("schedule start")?;
        let b: u64 = b.trim().parse().context("schedule end")?;
        if a > b {
            bail!("empty schedule {s}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().with_context(|| format!("schedule entry {t:?}")))
        .collect()
}

fn decone_cmd(cmd: DeconeCmd) -> anyhow::Result<()> {
    match cmd {
        DeconeCmd::Build { space, parts, out } => {
            let y = io::read_space(&space)?;
            let x = decone::build_decone(&y, parts)?;
            io::write_space(&out, x.space())?;
            print_json(&json!({ "points": x.space().len(), "parts": parts, "out": out }));
        }
        DeconeCmd::Verify { space, parts, radius, schedule, out } => {
            let y = io::read_space(&space)?;
            let x = decone::build_decone(&y, parts)?;
            let r = match radius {
                Some(r) => parse_q(&r)?,
                None => y.diameter(),
            };
            let schedule = parse_schedule(schedule.as_deref().unwrap_or("3..N"), parts)?;
            let rows = decone::verify_convergence(&y, &x, &r, &schedule)?;
            if let Some(out) = out {
                io::write_convergence_csv(&out, &rows)?;
            }
            print_json(&rows);
        }
    }
    Ok(())
}

fn fastset_cmd(cmd: FastsetCmd) -> anyhow::Result<()> {
    let FastsetCmd::Classify { set, horizon } = cmd;
    let path = set.display().to_string();
    let mut raw: io::IndexSetJson = io::read_json(&set)?;
    if let Some(h) = horizon {
        raw.horizon = serde_json::Value::String(h.to_string());
    }
    let s: IndexSet = raw.to_set().with_context(|| path.clone())?;
    let skipped = |v: Option<asymcone::Verdict>| v.map_or("skipped", |v| v.label());
    print_json(&json!({
        "set": path,
        "horizon": s.horizon().to_string(),
        "elements": s.len().to_string(),
        "fast": filters::is_fast(&s).to_string(),
        "thin": filters::is_thin(&s).to_string(),
        "thin_implies_fast": skipped(filters::thin_implies_fast(&s)),
        "looks_finite": filters::looks_finite(&s),
    }));
    Ok(())
}

fn slowuf_cmd(cmd: SlowufCmd) -> anyhow::Result<()> {
    let SlowufCmd::Demo { seed, max_n, ls, space, rng_seed, out } = cmd;
    let ls = ls.iter().map(|l| parse_q(l)).collect::<anyhow::Result<Vec<_>>>()?;
    let seed = match seed {
        SeedArg::Factorial => slowuf::Seed::Factorial,
        SeedArg::Tower => slowuf::Seed::Tower,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let y = match space {
        Some(p) => io::read_space(&p)?,
        None => sample::band_space(&mut rng, 10),
    };
    let a = slowuf::seed_set(seed, max_n)?;
    let xseq = sample::point_map(&mut rng, &a, y.len());
    let report = slowuf::demo(seed, max_n, &ls, &y, &xseq)?;
    match out {
        Some(p) => {
            io::write_json(&p, &report)?;
            print_json(&json!({
                "out": p,
                "chain": report.chain.verdict,
                "worst": report.entries.iter().map(|e| rational::format(&e.bilipschitz.worst)).collect::<Vec<_>>(),
            }));
        }
        None => print_json(&report),
    }
    Ok(())
}

fn ghdist_cmd(args: GhArgs) -> anyhow::Result<()> {
    let a = io::read_space(&args.a)?;
    let b = io::read_space(&args.b)?;
    let bounds = gh::gh_bounds(&a, &b, args.pointed, args.mode == GhMode::Exact)?;
    print_json(&bounds);
    Ok(())
}

fn limit_cmd(cmd: LimitCmd) -> anyhow::Result<()> {
    let LimitCmd::Eval { seq, base, eps } = cmd;
    let s = io::read_sequence(&seq)?;
    let b = io::read_base(&base)?;
    let eps = parse_q(&eps)?;
    if eps <= BigRational::from_integer(0.into()) {
        bail!("eps must be positive");
    }
    let out = match ultralimit::mu_limit(&s, &b, &eps)? {
        LimitResult::Determined(q) => json!({ "result": "determined", "value": rational::format(&q) }),
        LimitResult::Undetermined(c) => json!({
            "result": "undetermined",
            "candidates": c.iter().map(rational::format).collect::<Vec<_>>(),
        }),
        LimitResult::Unbounded => json!({ "result": "unbounded" }),
    };
    print_json(&out);
    Ok(())
}

fn suite_config(args: &SuiteArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(h) = args.horizon {
        cfg.horizon = h;
    }
    if let Some(n) = args.parts {
        cfg.parts = n;
    }
    if let Some(e) = &args.eps {
        cfg.eps = parse_q(e)?;
    }
    if let Some(ls) = &args.ls {
        cfg.ls = ls.iter().map(|l| parse_q(l)).collect::<anyhow::Result<_>>()?;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(d) = &args.out_dir {
        cfg.out_dir = d.clone();
    }
    if let Some(path) = &args.config {
        cfg = merge_config(cfg, path)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Fields present in the file replace the flag values.
fn merge_config(flags: RunConfig, path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let name = path.display().to_string();
    let file: serde_json::Value = io::parse_json(&text, &name)?;
    let mut merged = serde_json::to_value(&flags)?;
    match (file, &mut merged) {
        (serde_json::Value::Object(f), serde_json::Value::Object(m)) => m.extend(f),
        _ => bail!("{name}: config must be a JSON object"),
    }
    Ok(io::parse_json(&merged.to_string(), &name)?)
}

fn suite_cmd(args: SuiteArgs) -> anyhow::Result<bool> {
    let cfg = suite_config(&args)?;
    if cfg.parts <= 3 {
        eprintln!("warning: N = {} makes the de-cone criteria vacuous", cfg.parts);
    }
    let report = suite::run_suite(&cfg)?;
    let dir = cfg.resolved_out_dir();
    report.write(&dir)?;
    print!("{}", report.summary());
    println!("report written to {}", dir.display());
    Ok(!report.any_failed())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Decone(c) => decone_cmd(c)?,
        Command::Fastset(c) => fastset_cmd(c)?,
        Command::Slowuf(c) => slowuf_cmd(c)?,
        Command::Ghdist(a) => ghdist_cmd(a)?,
        Command::Limit(c) => limit_cmd(c)?,
        Command::Suite(a) => return suite_cmd(a),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
