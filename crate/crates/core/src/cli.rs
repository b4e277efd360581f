//! Command-line driver: `verify` runs seeded batches, `explain` prints metadata.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::identities::sample::trial_seed;
use crate::identities::{ids_for, sample_parameters, verify_instance, Id, SampleConfig, VerificationReport};
use crate::numerics::{Backend, NumericConfig};
use crate::par::{self, Exec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "arsum", version, about = "Verify multivariable basic hypergeometric summations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample parameters and verify identities.
    Verify(Box<VerifyArgs>),
    /// Describe one identity.
    Explain { id: String },
    /// List identity names.
    List,
}

#[derive(Debug, Args, Default)]
struct VerifyArgs {
    /// Comma-separated identity names, or `all`.
    #[arg(long)]
    ids: Option<String>,
    /// Rank range `min..max` or a single rank.
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// `exact` or `float`.
    #[arg(long)]
    backend: Option<String>,
    /// Mantissa bits of the float backend.
    #[arg(long)]
    precision: Option<String>,
    /// Tail target for truncated sums and products.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    max_terms: Option<String>,
    #[arg(long)]
    pole_floor: Option<String>,
    /// Report file; records go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `json` (one record per line) or `tsv`.
    #[arg(long)]
    format: Option<String>,
    /// Plain-text `key=value` file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run trials on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Tsv,
}

/// Everything a `verify` run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub ids: Vec<Id>,
    pub r_min: usize,
    pub r_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub backend: Backend,
    pub numeric: NumericConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub exec: Exec,
}

const KEYS: [&str; 11] =
    ["ids", "r", "trials", "seed", "backend", "precision", "epsilon", "max_terms", "pole_floor", "out", "format"];

fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut m = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| Error::Config(format!("config line {}: expected key=value", no + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::Config(format!("config line {}: unknown key `{k}`", no + 1)));
        }
        m.insert(k.to_string(), v.trim().to_string());
    }
    Ok(m)
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("invalid value for {key}: `{v}`")))
}

fn parse_range(v: &str) -> Result<(usize, usize)> {
    let (lo, hi) = match v.split_once("..") {
        Some((a, b)) => (num("r", a)?, num("r", b.trim_start_matches('='))?),
        None => {
            let r = num("r", v)?;
            (r, r)
        }
    };
    if lo == 0 || lo > hi {
        return Err(Error::Config(format!("invalid rank range `{v}`")));
    }
    Ok((lo, hi))
}

impl RunConfig {
    fn resolve(args: &VerifyArgs) -> Result<RunConfig> {
        let file = match &args.config {
            Some(p) => parse_kv(&fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?)?,
            None => BTreeMap::new(),
        };
        let get = |flag: &Option<String>, key: &str| flag.clone().or_else(|| file.get(key).cloned());

        let backend_name = get(&args.backend, "backend").unwrap_or_else(|| "exact".into());
        let precision: usize = num("precision", &get(&args.precision, "precision").unwrap_or_else(|| "256".into()))?;
        let backend = match backend_name.as_str() {
            "exact" => Backend::Exact,
            "float" => Backend::float(precision)?,
            other => return Err(Error::Config(format!("unknown backend `{other}`"))),
        };
        let defaults = NumericConfig::default();
        let numeric = NumericConfig::new(
            get(&args.epsilon, "epsilon").map_or(Ok(defaults.epsilon_tail), |v| num("epsilon", &v))?,
            get(&args.max_terms, "max_terms").map_or(Ok(defaults.max_terms), |v| num("max_terms", &v))?,
            get(&args.pole_floor, "pole_floor").map_or(Ok(defaults.pole_floor), |v| num("pole_floor", &v))?,
        )?;
        let (r_min, r_max) = parse_range(&get(&args.r, "r").unwrap_or_else(|| "1..3".into()))?;
        let trials: usize = num("trials", &get(&args.trials, "trials").unwrap_or_else(|| "10".into()))?;
        if trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let seed = num("seed", &get(&args.seed, "seed").unwrap_or_else(|| "0".into()))?;
        let format = match get(&args.format, "format").as_deref().unwrap_or("json") {
            "json" => Format::Json,
            "tsv" => Format::Tsv,
            other => return Err(Error::Config(format!("unknown format `{other}`"))),
        };
        let ids_text = get(&args.ids, "ids").unwrap_or_else(|| "all".into());
        let ids = if ids_text == "all" {
            ids_for(backend)
        } else {
            let mut v = Vec::new();
            for name in ids_text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let id: Id = name.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
                if backend.is_exact() && !id.descriptor().terminating() {
                    return Err(Error::Config(format!("{id} is nonterminating; use --backend float")));
                }
                if !(r_min..=r_max).any(|r| id.descriptor().admits_r(r)) {
                    return Err(Error::Config(format!("{id} admits no rank in {r_min}..{r_max}")));
                }
                v.push(id);
            }
            if v.is_empty() {
                return Err(Error::Config("no identities selected".into()));
            }
            v
        };
        let out = args.out.clone().or_else(|| file.get("out").map(PathBuf::from));
        let exec = if args.sequential { Exec::Sequential } else { Exec::Parallel };
        Ok(RunConfig { ids, r_min, r_max, trials, seed, backend, numeric, out, format, exec })
    }

    /// `(id, r, trial)` in report order.
    pub fn tasks(&self) -> Vec<(Id, usize, usize)> {
        let mut v = Vec::new();
        for &id in &self.ids {
            for r in self.r_min..=self.r_max {
                if id.descriptor().admits_r(r) {
                    v.extend((0..self.trials).map(|t| (id, r, t)));
                }
            }
        }
        v
    }
}

/// Samples and verifies one trial.
pub fn run_trial(cfg: &RunConfig, id: Id, r: usize, trial: usize) -> VerificationReport {
    let sc = SampleConfig::new(cfg.backend);
    let s = trial_seed(cfg.seed, id, r, trial);
    let mut rep = match sample_parameters(id, r, s, &sc, &cfg.numeric) {
        Ok(p) => verify_instance(id, &p, &cfg.numeric),
        Err(e) => VerificationReport::new(id.name(), r, cfg.backend).failed_with(&e),
    };
    rep.seed = Some(cfg.seed);
    rep.trial = Some(trial);
    rep
}

/// Every trial of the run, in `(id, r, trial)` order.
pub fn run_all(cfg: &RunConfig) -> Vec<VerificationReport> {
    par::map(cfg.exec, cfg.tasks(), |(id, r, t)| run_trial(cfg, id, r, t))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}

const TSV_COLUMNS: [&str; 14] = [
    "backend", "error", "id", "lhs", "params", "r", "residual", "rhs", "seed", "tail", "terms", "trial", "verdict",
    "window",
];

/// Serialises reports; keys and columns are in alphabetical order.
pub fn render(reports: &[VerificationReport], format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Json => {
            for r in reports {
                let v = serde_json::to_value(r).expect("reports serialise");
                s.push_str(&v.to_string());
                s.push('\n');
            }
        }
        Format::Tsv => {
            s.push_str(&TSV_COLUMNS.join("\t"));
            s.push('\n');
            for r in reports {
                let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let row = [
                    r.backend.clone(),
                    opt(&r.error),
                    r.id.clone(),
                    opt(&r.lhs),
                    params.join(";"),
                    r.r.to_string(),
                    opt(&r.residual),
                    opt(&r.rhs),
                    opt(&r.seed),
                    r.tail.to_string(),
                    r.terms.to_string(),
                    opt(&r.trial),
                    r.verdict.name().to_string(),
                    opt(&r.window),
                ];
                s.push_str(&row.join("\t"));
                s.push('\n');
            }
        }
    }
    s
}

/// One row per `(id, r)`: trials, passes, largest residual, mean summands.
pub fn summary(reports: &[VerificationReport]) -> String {
    let mut groups: BTreeMap<(String, usize), (usize, usize, f64, usize)> = BTreeMap::new();
    for r in reports {
        let g = groups.entry((r.id.clone(), r.r)).or_default();
        g.0 += 1;
        g.1 += usize::from(r.passed());
        g.2 = g.2.max(r.residual.unwrap_or(f64::INFINITY));
        g.3 += r.terms;
    }
    let mut s = format!(
        "{:<22} {:>2} {:>7} {:>7} {:>13} {:>11}\n",
        "id", "r", "trials", "passes", "max_residual", "mean_terms"
    );
    for ((id, r), (n, pass, res, terms)) in groups {
        let _ = writeln!(s, "{id:<22} {r:>2} {n:>7} {pass:>7} {res:>13.3e} {:>11.1}", terms as f64 / n as f64);
    }
    s
}

/// Text shown by `explain`.
pub fn explain(name: &str) -> Result<String> {
    let id: Id = name.parse()?;
    let d = id.descriptor();
    let mut s = String::new();
    let _ = writeln!(s, "{}: {}", d.name, d.title);
    let schema: Vec<&str> = d.schema.iter().map(|s| s.name()).collect();
    let _ = writeln!(s, "parameters: {}", schema.join(", "));
    let kind = format!("{:?}", d.domain);
    let _ = writeln!(s, "domain: {kind} ({})", d.domain.name());
    let _ = writeln!(s, "rank: {}", d.r_fixed.map_or_else(|| "any r >= 1".to_string(), |r| format!("r = {r} only")));
    let _ = writeln!(s, "backends: {}", if d.terminating() { "exact and float" } else { "float only" });
    for c in d.constraints {
        let _ = writeln!(s, "constraint: {c}");
    }
    let _ = writeln!(s, "notes: {}", d.notes);
    Ok(s)
}

fn write_out(cfg: &RunConfig, text: &str) -> io::Result<()> {
    match &cfg.out {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::List => {
            for id in Id::ALL {
                println!("{id}");
            }
            EXIT_OK
        }
        Command::Explain { id } => match explain(&id) {
            Ok(text) => {
                print!("{text}");
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
        Command::Verify(args) => {
            let cfg = match RunConfig::resolve(&args) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
            };
            let reports = run_all(&cfg);
            if let Err(e) = write_out(&cfg, &render(&reports, cfg.format)) {
                eprintln!("error: writing report: {e}");
                return EXIT_IO;
            }
            let table = summary(&reports);
            if cfg.out.is_some() {
                print!("{table}");
            } else {
                eprint!("{table}");
            }
            if reports.iter().all(VerificationReport::passed) {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
    }
}
