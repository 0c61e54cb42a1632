use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use so2bv::bv::{formula_size, lower_indexing, solve_bv2, BvFormula};
use so2bv::harness::{cross_check, fuzz, Agreement, CrossCheckOptions, CrossCheckReport, HarnessConfig, InstanceRecord};
use so2bv::reduction::{reduce_so2_to_bv2, ReduceOptions};
use so2bv::smtlib::{emit_smt2, parse_smt2_subset};
use so2bv::so2::{decide_so2_bruteforce, eval_so2, parse_interpretation, parse_so2, parse_so2_with, validate_prenex_closed, FreeSymbols, ParseOptions, So2Formula, ValidateOptions};
use so2bv::Verdict;

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_ERROR: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_DISAGREE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "so2bv", version, about = "Compile second-order Boolean formulas to quantified bit-vectors and decide both")]
struct Cli {
    /// Flat key=value settings file; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Override any configuration key, e.g. `--set max_depth=3` (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Accept prefixes that quantify propositions before proper functions.
    #[arg(long, global = true)]
    relax_order: bool,
    /// External solver executable for differential checks.
    #[arg(long, global = true, value_name = "PATH")]
    solver: Option<String>,
    /// External solver timeout in milliseconds.
    #[arg(long, global = true, value_name = "MS")]
    timeout_ms: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an SO2 formula and print it with sugar removed.
    Parse { file: PathBuf },
    /// Check that an SO2 formula is closed and prenex.
    Validate { file: PathBuf },
    /// Evaluate an SO2 formula under an interpretation file.
    Eval {
        file: PathBuf,
        #[arg(long, value_name = "FILE")]
        interp: PathBuf,
    },
    /// Print formula sizes (`.so2` or `.smt2` inputs).
    Size {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// For `.so2` inputs, also print the size of the reduction.
        #[arg(long)]
        reduced: bool,
    },
    /// Reduce an SO2 formula to BV2.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
        /// Rewrite dynamic indexing into shift and extract (always done for smt2).
        #[arg(long)]
        lower: bool,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Decide a BV2 formula (`.smt2`, or `.so2` reduced first) by quantifier expansion.
    Solve { file: PathBuf },
    /// Decide an SO2 formula by enumerating truth tables.
    Decide { file: PathBuf },
    /// Cross-check the given files, or generated instances when none are given.
    CrossCheck {
        files: Vec<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        instances: Option<u64>,
        /// Print one line per instance.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Cross-check generated instances until a budget runs out or a disagreement shows up.
    Fuzz {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        instances: Option<u64>,
        #[arg(long, value_name = "SECS")]
        time_limit: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Smt2,
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn is_smt2(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "smt2")
}

fn load_so2(path: &Path) -> Result<So2Formula> {
    let text = read_input(path)?;
    parse_so2(&text).with_context(|| format!("{}", path.display()))
}

fn load_bv(path: &Path, cfg: &HarnessConfig) -> Result<BvFormula> {
    if is_smt2(path) {
        let text = read_input(path)?;
        return parse_smt2_subset(&text).with_context(|| format!("{}", path.display()));
    }
    let phi = load_so2(path)?;
    Ok(reduce_so2_to_bv2(&phi, ReduceOptions { relax_order: cfg.so2.relax_order })?.formula)
}

fn load_config(cli: &Cli) -> Result<HarnessConfig> {
    let mut cfg = match &cli.config {
        Some(path) => HarnessConfig::from_text(&read_input(path)?).with_context(|| format!("{}", path.display()))?,
        None => HarnessConfig::default(),
    };
    let o = &cli.overrides;
    for kv in &o.set {
        let (k, v) = kv.split_once('=').with_context(|| format!("`--set {kv}` is not KEY=VALUE"))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if o.relax_order {
        cfg.set("relax_order", "true")?;
    }
    if let Some(s) = &o.solver {
        cfg.set("solver", s)?;
    }
    if let Some(ms) = o.timeout_ms {
        cfg.set("timeout_ms", &ms.to_string())?;
    }
    Ok(cfg)
}

fn options(cfg: &HarnessConfig) -> CrossCheckOptions {
    CrossCheckOptions { so2: cfg.so2, budget: cfg.budget, solver: cfg.solver.clone() }
}

fn verdict_exit<W>(v: &Verdict<W>, out: &mut impl Write, witness: impl FnOnce(&W, &mut dyn Write) -> io::Result<()>) -> Result<u8> {
    Ok(match v {
        Verdict::Sat { witness: w } => {
            writeln!(out, "sat")?;
            witness(w, out)?;
            EXIT_SAT
        }
        Verdict::Unsat => {
            writeln!(out, "unsat")?;
            EXIT_UNSAT
        }
        Verdict::ResourceExceeded { reason } => {
            writeln!(out, "resource-exceeded: {reason}")?;
            EXIT_RESOURCE
        }
    })
}

fn record_line(r: &InstanceRecord) -> String {
    let seed = r.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
    let ext = r.external.as_ref().map_or_else(String::new, |v| format!(" external={}", v.status));
    let tag = match r.agreement {
        Agreement::Agree => "agree",
        Agreement::Skipped => "skipped",
        Agreement::Disagree => "DISAGREE",
    };
    format!(
        "seed={seed} so2={} bv2={}{ext} size={}->{} ratio={:.2} {tag}",
        r.so2,
        r.bv2,
        r.so2_size,
        r.bv2_size,
        r.size_ratio()
    )
}

fn print_report(report: &CrossCheckReport, verbose: bool, out: &mut impl Write) -> Result<u8> {
    if verbose {
        for r in &report.records {
            writeln!(out, "{}", record_line(r))?;
        }
    }
    for r in report.disagreements() {
        if !verbose {
            writeln!(out, "{}", record_line(r))?;
        }
        writeln!(out, "  repro: {}", r.source)?;
        if let Some(d) = r.external.as_ref().and_then(|v| v.detail.as_ref()) {
            writeln!(out, "  solver: {d}")?;
        }
    }
    let s = &report.summary;
    writeln!(
        out,
        "instances={} agreed={} skipped={} disagreed={} external_checked={} external_unknown={} max_ratio={:.2}",
        s.instances, s.agreed, s.skipped, s.disagreed, s.external_checked, s.external_unknown, s.max_size_ratio
    )?;
    Ok(if report.failed() { EXIT_DISAGREE } else { 0 })
}

fn run(cli: Cli) -> Result<u8> {
    let cfg = load_config(&cli)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Parse { file } => {
            writeln!(out, "{}", load_so2(&file)?)?;
            Ok(0)
        }
        Command::Validate { file } => {
            let phi = load_so2(&file)?;
            let d = validate_prenex_closed(&phi, ValidateOptions { relax_order: cfg.so2.relax_order });
            for w in &d.warnings {
                writeln!(out, "warning: {w}")?;
            }
            for e in &d.errors {
                writeln!(out, "error: {e}")?;
            }
            if d.is_ok() {
                writeln!(out, "ok")?;
                Ok(0)
            } else {
                Ok(EXIT_ERROR)
            }
        }
        Command::Eval { file, interp } => {
            let i = parse_interpretation(&read_input(&interp)?).with_context(|| format!("{}", interp.display()))?;
            let declared = i.iter().map(|(name, t)| (name.clone(), t.arity())).collect();
            let opts = ParseOptions { free: FreeSymbols::Declared(declared) };
            let phi = parse_so2_with(&read_input(&file)?, &opts).with_context(|| format!("{}", file.display()))?;
            match eval_so2(&phi, &i, &cfg.so2) {
                Ok(b) => {
                    writeln!(out, "{b}")?;
                    Ok(0)
                }
                Err(so2bv::so2::So2Error::ResourceExceeded(reason)) => {
                    writeln!(out, "resource-exceeded: {reason}")?;
                    Ok(EXIT_RESOURCE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Size { files, reduced } => {
            let many = files.len() > 1;
            for f in &files {
                let prefix = if many { format!("{}: ", f.display()) } else { String::new() };
                if is_smt2(f) {
                    writeln!(out, "{prefix}{}", formula_size(&load_bv(f, &cfg)?))?;
                } else {
                    let phi = load_so2(f)?;
                    if reduced {
                        let bv = reduce_so2_to_bv2(&phi, ReduceOptions { relax_order: cfg.so2.relax_order })?.formula;
                        writeln!(out, "{prefix}{} {}", phi.size(), formula_size(&bv))?;
                    } else {
                        writeln!(out, "{prefix}{}", phi.size())?;
                    }
                }
            }
            Ok(0)
        }
        Command::Reduce { file, emit, lower, output } => {
            let phi = load_so2(&file)?;
            let mut bv = reduce_so2_to_bv2(&phi, ReduceOptions { relax_order: cfg.so2.relax_order })?.formula;
            if lower || emit == Emit::Smt2 {
                bv = lower_indexing(&bv);
            }
            let text = match emit {
                Emit::Text => format!("{bv}\n"),
                Emit::Smt2 => emit_smt2(&bv)?.text,
            };
            match output {
                Some(path) => fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(0)
        }
        Command::Solve { file } => {
            let phi = load_bv(&file, &cfg)?;
            let v = solve_bv2(&phi, &cfg.budget)?;
            verdict_exit(&v, &mut out, |w, out| {
                for (var, value) in w {
                    writeln!(out, "{} = {value}", var.name)?;
                }
                Ok(())
            })
        }
        Command::Decide { file } => {
            let phi = load_so2(&file)?;
            let v = decide_so2_bruteforce(&phi, &cfg.so2)?;
            verdict_exit(&v, &mut out, |w, out| {
                for (sym, table) in w {
                    writeln!(out, "{sym}={table}")?;
                }
                Ok(())
            })
        }
        Command::CrossCheck { files, seed, instances, verbose } => {
            let opts = options(&cfg);
            let report = if files.is_empty() {
                let start = seed.unwrap_or(cfg.generator.seed);
                let n = instances.unwrap_or(cfg.instances);
                so2bv::harness::cross_check_seeds(start..start.saturating_add(n), &cfg.generator, &opts)?
            } else {
                let mut records = Vec::new();
                for f in &files {
                    records.push(cross_check(&load_so2(f)?, &opts)?);
                }
                CrossCheckReport::from_records(records)
            };
            print_report(&report, verbose, &mut out)
        }
        Command::Fuzz { seed, instances, time_limit } => {
            let start = seed.unwrap_or(cfg.generator.seed);
            let n = instances.unwrap_or(u64::MAX);
            if n == u64::MAX && time_limit.is_none() {
                bail!("fuzz needs --instances or --time-limit");
            }
            let report = fuzz(start, n, time_limit.map(Duration::from_secs), &cfg.generator, &options(&cfg))?;
            print_report(&report, false, &mut out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
