use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wheelkit::coeff::fmt_q;
use wheelkit::quotient::{DEFAULT_CUTOFF, HARD_CAP};
use wheelkit::series::{appendix_f, modified_bernoulli};
use wheelkit::suites::{self, SuiteConfig, SUITES};
use wheelkit::wheels::{log_omega, omega};
use wheelkit::{Diagram, Element, Engine, Signature, SkeletonKind};

#[derive(Parser)]
#[command(name = "wheelkit", version, about = "Exact computations with Jacobi diagrams, wheels and sl2 weights")]
struct Cli {
    /// highest diagram degree to compute
    #[arg(long, global = true, default_value_t = DEFAULT_CUTOFF)]
    max_degree: usize,
    /// directory for cached quotient bases
    #[arg(long, global = true, env = "WHEELKIT_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// seed for sampled property checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// write the result here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of the diagram spaces modulo relations
    Dims {
        /// a single degree instead of 0..=max-degree
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value = "star")]
        skeleton: String,
    },
    /// Modified Bernoulli numbers b_2n and the coefficients f_n
    Bernoulli {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// The wheels element on one star
    Omega {
        #[arg(long, default_value = "x")]
        label: String,
        /// print log Omega instead
        #[arg(long)]
        log: bool,
    },
    /// sl2 pairing of two elements along a label
    Pair {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value = "x")]
        label: String,
    },
    /// sl2 weight of a closed diagram or element
    Reduce { input: PathBuf },
    /// Run identity suites; exits 1 if any fails
    Suite {
        /// suite names, all when omitted
        names: Vec<String>,
        /// random samples per structural property
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Manage the quotient cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Build the star, interval and vacuum blocks through max-degree
    Build,
    /// List cached blocks
    List,
    /// Delete cached blocks
    Clear,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every requested suite passed.
fn execute(cli: &Cli) -> anyhow::Result<bool> {
    if cli.max_degree > HARD_CAP {
        bail!("--max-degree {} exceeds the hard cap {HARD_CAP}", cli.max_degree);
    }
    match &cli.command {
        Command::Dims { degree, skeleton } => {
            let engine = engine(cli)?;
            let kind = SkeletonKind::parse(skeleton)?;
            let degrees: Vec<usize> = match degree {
                Some(d) => vec![*d],
                None => (0..=cli.max_degree).collect(),
            };
            let rows = dims(&engine, kind, &degrees)?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Csv => {
                    let mut s = String::from("degree,legged,vacuum,total\n");
                    for r in &rows {
                        s.push_str(&format!("{},{},{},{}\n", r[0], r[1], r[2], r[3]));
                    }
                    emit(cli, &s)?;
                }
                Format::Json => {
                    let v: Vec<Value> = rows
                        .iter()
                        .map(|r| json!({"degree": r[0], "legged": r[1], "vacuum": r[2], "total": r[3]}))
                        .collect();
                    emit_json(cli, &json!({"skeleton": kind.name(), "dims": v}))?;
                }
            }
        }
        Command::Bernoulli { n } => {
            let b = modified_bernoulli(*n);
            let f = appendix_f(*n);
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut s = String::from("n,b_2n,f_n\n");
                    for k in 0..=*n {
                        s.push_str(&format!("{k},{},{}\n", fmt_q(&b[k]), fmt_q(&f.coeff(k))));
                    }
                    emit(cli, &s)?;
                }
                Format::Json => {
                    let rows: Vec<Value> = (0..=*n)
                        .map(|k| json!({"n": k, "b_2n": fmt_q(&b[k]), "f_n": fmt_q(&f.coeff(k))}))
                        .collect();
                    emit_json(cli, &Value::Array(rows))?;
                }
            }
        }
        Command::Omega { label, log } => {
            let e = if *log { log_omega(label, cli.max_degree) } else { omega(label, cli.max_degree)? };
            emit_element(cli, &e)?;
        }
        Command::Pair { left, right, label } => {
            let engine = engine(cli)?;
            let a = read_element(left)?;
            let b = read_element(right)?;
            let v = engine.sl2().pair(&a, &b, label)?;
            emit_value(cli, &fmt_q(&v))?;
        }
        Command::Reduce { input } => {
            let engine = engine(cli)?;
            let v = read_json(input)?;
            let e = if v.get("terms").is_some() {
                Element::from_json(&v, None)?
            } else {
                Element::from_diagram(&Diagram::from_json(&v)?)
            };
            if !e.sig().is_empty() {
                bail!("{} is not a closed diagram", input.display());
            }
            let r = engine.sl2().reduce(&e)?;
            emit_value(cli, &fmt_q(&r))?;
        }
        Command::Suite { names, samples } => {
            let config = SuiteConfig {
                suites: if names.is_empty() { SUITES.iter().map(|s| s.to_string()).collect() } else { names.clone() },
                max_degree: cli.max_degree,
                cache_dir: cli.cache_dir.clone(),
                output: cli.output.clone(),
                seed: cli.seed,
                samples: *samples,
            };
            config.validate()?;
            let report = suites::run(&config)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => report.to_json_string(),
                Format::Csv => report.to_csv(),
            };
            emit(cli, &text)?;
            for s in &report.suites {
                eprintln!("{} {}", if s.passed() { "PASS" } else { "FAIL" }, s.name);
            }
            return Ok(report.passed());
        }
        Command::Cache { action } => {
            let dir = cli.cache_dir.clone().context("cache commands need --cache-dir or WHEELKIT_CACHE_DIR")?;
            match action {
                CacheAction::Build => {
                    let engine = engine(cli)?;
                    let degrees: Vec<usize> = (0..=cli.max_degree).collect();
                    dims(&engine, SkeletonKind::Star, &degrees)?;
                    dims(&engine, SkeletonKind::Interval, &degrees)?;
                    let log = engine.reducer().block_log();
                    emit(cli, &log.iter().map(|l| format!("{l}\n")).collect::<String>())?;
                }
                CacheAction::List => {
                    let files = cache_files(&dir)?;
                    emit(cli, &files.iter().map(|p| format!("{}\n", p.display())).collect::<String>())?;
                }
                CacheAction::Clear => {
                    let files = cache_files(&dir)?;
                    for f in &files {
                        std::fs::remove_file(f).with_context(|| format!("removing {}", f.display()))?;
                    }
                    eprintln!("removed {} cached blocks", files.len());
                }
            }
        }
    }
    Ok(true)
}

fn engine(cli: &Cli) -> anyhow::Result<Engine> {
    Ok(Engine::new(cli.max_degree.max(DEFAULT_CUTOFF), cli.cache_dir.clone())?)
}

/// Rows of (degree, legged, vacuum, total) where total counts products of vacuum and legged parts.
fn dims(engine: &Engine, kind: SkeletonKind, degrees: &[usize]) -> anyhow::Result<Vec<[usize; 4]>> {
    let r = engine.reducer();
    let sig = Signature::single(kind, "x");
    let mut rows = Vec::new();
    for &n in degrees {
        if n > engine.cutoff() {
            bail!("degree {n} exceeds --max-degree {}", engine.cutoff());
        }
        let legged = r.legged_dimension(&sig, n)?;
        let vacuum = r.vacuum_dimension(n)?;
        let mut total = 0;
        for k in 0..=n {
            total += r.vacuum_dimension(n - k)? * r.legged_dimension(&sig, k)?;
        }
        rows.push([n, legged, vacuum, total]);
    }
    Ok(rows)
}

fn cache_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    if dir.exists() {
        for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
            let p = entry?.path();
            if p.extension().is_some_and(|e| e == "wkq") {
                files.push(p);
            }
        }
    }
    files.sort();
    Ok(files)
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_element(path: &Path) -> anyhow::Result<Element> {
    let v = read_json(path)?;
    if v.get("terms").is_some() {
        Ok(Element::from_json(&v, None)?)
    } else {
        Ok(Element::from_diagram(&Diagram::from_json(&v)?))
    }
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(cli: &Cli, v: &Value) -> anyhow::Result<()> {
    emit(cli, &format!("{}\n", serde_json::to_string_pretty(v)?))
}

fn emit_value(cli: &Cli, value: &str) -> anyhow::Result<()> {
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(cli, &format!("{value}\n")),
        Format::Json => emit_json(cli, &json!({"value": value})),
    }
}

fn emit_element(cli: &Cli, e: &Element) -> anyhow::Result<()> {
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(cli, &e.to_json()),
        Format::Csv => {
            let mut s = String::from("degree,coeff,diagram\n");
            for (d, c) in e.terms() {
                let dj = serde_json::to_string(&d.to_json())?.replace('"', "\"\"");
                s.push_str(&format!("{},{},\"{dj}\"\n", d.degree(), fmt_q(c)));
            }
            emit(cli, &s)
        }
    }
}
