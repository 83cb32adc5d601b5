mod cache;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use bflab::catalog;
use bflab::error::Error;
use bflab::groups::{PermGroup, DEFAULT_ORDER_CAP};
use bflab::report::{self, Report, RunConfig};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

const EXIT_INPUT: u8 = 2;
const EXIT_ORDER_CAP: u8 = 3;
const EXIT_FINDING: u8 = 4;

#[derive(Parser)]
#[command(name = "bflab", version, about = "Block invariants and source-algebra checks for small finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute blocks, defect groups, source algebras and the structural checks.
    Analyze(SingleArgs),
    /// Analyze, then test unital bases, twisted units and balance.
    Check(SingleArgs),
    /// Check every group file in a directory (the bundled catalog by default).
    Catalog(CatalogArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = report::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
    order_cap: usize,
    /// Enumerate search spaces of at most 2^20 elements instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    /// Check every source idempotent, not only the canonical one.
    #[arg(long)]
    thorough: bool,
    /// Random samples per unit search.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Record per-block wall-clock times (the report is then not reproducible).
    #[arg(long)]
    timings: bool,
    /// Recompute even when a cached report exists.
    #[arg(long)]
    no_cache: bool,
    #[arg(long, env = "BFLAB_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SingleArgs {
    /// Group file: {"label", "degree", "generators"} with 1-based images.
    #[arg(long)]
    group: PathBuf,
    #[arg(long)]
    prime: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct CatalogArgs {
    /// Directory of group files; omit for the bundled catalog.
    dir: Option<PathBuf>,
    /// Directory for per-entry reports and finding files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OrderCapExceeded { .. } => EXIT_ORDER_CAP,
            Error::Input(_) | Error::NotPrime(_) | Error::InvalidPermutation(_) | Error::NotSubgroup(_) => EXIT_INPUT,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_failure(message: String) -> Failure {
    Failure { code: EXIT_INPUT, message }
}

fn config(run: &RunArgs, check: bool) -> RunConfig {
    RunConfig { seed: run.seed, check, thorough: run.thorough, exhaustive: run.exhaustive, samples: run.samples, timings: run.timings }
}

/// Run one (group, prime) pair, going through the cache when allowed.
fn run_one(text: &str, prime: u64, run: &RunArgs, check: bool) -> Result<Report, Failure> {
    let group = Arc::new(PermGroup::from_json(text, run.order_cap)?);
    let cfg = config(run, check);
    let cache = (!run.timings).then(|| cache::Cache::open(run.cache_dir.clone())).flatten();
    let key = cache::key(text, prime, &cfg, run.order_cap);
    if let (Some(c), false) = (&cache, run.no_cache) {
        if let Some(r) = c.get(&key) {
            return Ok(r);
        }
    }
    let r = report::run(group, prime, &cfg)?;
    if let Some(c) = &cache {
        c.put(&key, &r);
    }
    Ok(r)
}

fn finding_document(r: &Report) -> String {
    let findings: Vec<serde_json::Value> = r.findings.iter().map(|f| serde_json::to_value(f).expect("finding serializes")).collect();
    let doc = serde_json::json!({ "schema": "bflab-finding/1", "seed": r.seed, "findings": findings });
    let mut s = serde_json::to_string_pretty(&doc).expect("finding document serializes");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure { code: 1, message: format!("cannot write {}: {e}", path.display()) })
}

fn finding_path(out: Option<&Path>, label: &str, prime: u64) -> PathBuf {
    let name = format!("FINDING-{}-p{prime}.json", sanitize(label));
    match out {
        Some(p) => p.parent().unwrap_or(Path::new("")).join(name),
        None => PathBuf::from(name),
    }
}

fn sanitize(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn summary_line(r: &Report) -> String {
    let defects: Vec<String> = r.blocks.iter().map(|b| b.defect_group.order.to_string()).collect();
    format!(
        "{} p={} GF({}^{}): {} block(s), defect orders [{}], {} finding(s)",
        r.group.label,
        r.prime,
        r.field.p,
        r.field.m,
        r.blocks.len(),
        defects.join(", "),
        r.findings.len()
    )
}

fn cmd_single(args: &SingleArgs, check: bool) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(&args.group).map_err(|e| input_failure(format!("cannot read {}: {e}", args.group.display())))?;
    let r = run_one(&text, args.prime, &args.run, check)?;
    let json = r.to_json();
    match &args.out {
        Some(p) => write_file(p, &json)?,
        None => print!("{json}"),
    }
    eprintln!("{}", summary_line(&r));
    if r.has_findings() {
        let path = finding_path(args.out.as_deref(), &r.group.label, r.prime);
        write_file(&path, &finding_document(&r))?;
        eprintln!("FINDING written to {}", path.display());
        return Ok(EXIT_FINDING);
    }
    Ok(0)
}

struct Row {
    name: String,
    prime: Option<u64>,
    outcome: Result<Report, Failure>,
}

fn catalog_inputs(dir: Option<&Path>) -> Result<Vec<(String, String)>, Failure> {
    let Some(dir) = dir else {
        return Ok(catalog::ENTRIES.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect());
    };
    let entries = std::fs::read_dir(dir).map_err(|e| input_failure(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> =
        entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect();
    paths.sort();
    let mut out = vec![];
    for p in paths {
        let text = std::fs::read_to_string(&p).map_err(|e| input_failure(format!("cannot read {}: {e}", p.display())))?;
        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        out.push((stem, text));
    }
    Ok(out)
}

fn verdict(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn table_row(row: &Row) -> String {
    let p = row.prime.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
    match &row.outcome {
        Err(f) => format!("{:<10} {:>3}  ERROR {}", row.name, p, f.message),
        Ok(r) => {
            let all = |f: &dyn Fn(&report::BlockRecord) -> bool| r.blocks.iter().all(f);
            let fusion = all(&|b| b.checks.fusion_matches && b.checks.divisible);
            let proved = all(&|b| {
                let c = &b.checks.characteristic;
                c.bifree && c.symmetric && c.generated && c.sylow && b.checks.rank_formula && b.checks.top_orbits
            });
            let stable = all(&|b| b.checks.characteristic.stable && b.checks.block_shape_stable);
            let equiv = all(&|b| b.equivalence.as_ref().is_some_and(|e| e.agree && e.unital_basis));
            let defects: Vec<String> = r.blocks.iter().map(|b| b.defect_group.order.to_string()).collect();
            format!(
                "{:<10} {:>3} {:>5} {:>7}  {:<12} {:<6} {:<6} {:<6} {:<6} {}",
                row.name,
                p,
                r.group.order,
                r.blocks.len(),
                defects.join(","),
                verdict(fusion),
                verdict(proved),
                verdict(stable),
                verdict(equiv),
                if r.has_findings() { "FINDING" } else { "pass" }
            )
        }
    }
}

fn cmd_catalog(args: &CatalogArgs) -> Result<u8, Failure> {
    let inputs = catalog_inputs(args.dir.as_deref())?;
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out).map_err(|e| Failure { code: 1, message: format!("cannot create {}: {e}", out.display()) })?;
    }
    let mut tasks: Vec<Row> = vec![];
    let mut jobs: Vec<(String, String, u64)> = vec![];
    for (name, text) in &inputs {
        match PermGroup::from_json(text, args.run.order_cap) {
            Ok(g) => jobs.extend(catalog::dividing_primes(&g).into_iter().map(|p| (name.clone(), text.clone(), p))),
            Err(e) => tasks.push(Row { name: name.clone(), prime: None, outcome: Err(e.into()) }),
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure { code: 1, message: format!("worker pool: {e}") })?;
    let done: Vec<Row> = pool.install(|| {
        jobs.par_iter()
            .map(|(name, text, p)| Row { name: name.clone(), prime: Some(*p), outcome: run_one(text, *p, &args.run, true) })
            .collect()
    });
    tasks.extend(done);
    tasks.sort_by(|a, b| (&a.name, a.prime).cmp(&(&b.name, b.prime)));

    println!(
        "{:<10} {:>3} {:>5} {:>7}  {:<12} {:<6} {:<6} {:<6} {:<6} status",
        "group", "p", "|G|", "blocks", "defects", "fusion", "proved", "stable", "equiv"
    );
    let mut code = 0;
    for row in &tasks {
        println!("{}", table_row(row));
        match &row.outcome {
            Err(f) => code = code.max(f.code),
            Ok(r) => {
                if let Some(out) = &args.out {
                    write_file(&out.join(format!("{}-p{}.json", row.name, r.prime)), &r.to_json())?;
                }
                if r.has_findings() {
                    let dir = args.out.clone().unwrap_or_default();
                    write_file(&dir.join(format!("FINDING-{}-p{}.json", row.name, r.prime)), &finding_document(r))?;
                    code = EXIT_FINDING;
                }
            }
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => cmd_single(a, false),
        Command::Check(a) => cmd_single(a, true),
        Command::Catalog(a) => cmd_catalog(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
