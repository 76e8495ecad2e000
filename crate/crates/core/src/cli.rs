//! The `subsense` command line.
//!
//! Exit codes: 0 success, 1 verification failed, 2 bad input, 10 the
//! instance was shown unsatisfiable.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::EngineOptions;
use crate::error::{Error, Result};
use crate::format::{instance_to_json, read_instance, write_instance};
use crate::generators::{self, RandomParams};
use crate::instance::{Instance, Value};
use crate::oracle;
use crate::pipeline::{parse_rules, reduce, replay_sequence, run_rule};
use crate::trace::{parse_trace, Rule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_UNSAT: i32 = 10;

#[derive(Parser, Debug)]
#[command(
    name = "subsense",
    version,
    about = "Value elimination for binary CSPs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Figure1a,
    Figure1b,
    Figure1c,
    Cnsvsns,
    Setcover,
    Geqchain,
    Random,
}

#[derive(clap::Args, Debug, Clone)]
pub struct GenParams {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 0.5)]
    pub tightness: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Universe size, or a comma separated list of elements.
    #[arg(long, default_value = "3")]
    pub universe: String,
    /// Sets as comma separated groups of digits, e.g. `12,23,13`. Use `+`
    /// between elements above 9, e.g. `10+11,12`.
    #[arg(long, default_value = "12,23,13")]
    pub sets: String,
    #[arg(long, default_value_t = 5)]
    pub len: usize,
    /// Hold the chain ends in place with equality triangles.
    #[arg(long)]
    pub anchored: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a generated instance as JSON.
    Gen {
        family: Family,
        #[command(flatten)]
        params: GenParams,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run rule engines to a fixpoint.
    Reduce {
        input: PathBuf,
        /// Comma separated list of ac, ns, ss, cns, scss.
        #[arg(long, default_value = "ss")]
        rules: String,
        /// Where to write the reduced instance.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Enumerate solutions by backtracking.
    Solve {
        input: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, default_value_t = oracle::DEFAULT_NODE_CAP)]
        cap: u64,
    },
    /// Check every step of a trace with the reference checkers.
    Verify {
        input: PathBuf,
        trace: PathBuf,
        /// Also require the replayed domains to equal this instance's.
        #[arg(long)]
        reduced: Option<PathBuf>,
    },
    /// Time engines over a grid of generated instances and write CSV.
    Bench {
        #[arg(long, value_enum, default_value = "random")]
        family: Family,
        #[arg(long, default_value = "20")]
        n: String,
        #[arg(long, default_value = "4,8,16")]
        d: String,
        #[arg(long, default_value = "0.3")]
        density: String,
        #[arg(long, default_value = "0.5")]
        tightness: String,
        /// Seeds 0..N.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value = "ns,ss,cns,scss")]
        rules: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_BAD_INPUT
            } else {
                EXIT_OK
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Uncertified { .. } => EXIT_VERIFY_FAILED,
                _ => EXIT_BAD_INPUT,
            }
        }
    }
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Gen {
            family,
            params,
            output,
        } => cmd_gen(family, &params, output.as_deref()),
        Command::Reduce {
            input,
            rules,
            output,
            trace,
            stats,
        } => cmd_reduce(
            &input,
            &rules,
            output.as_deref(),
            trace.as_deref(),
            stats.as_deref(),
        ),
        Command::Solve { input, limit, cap } => cmd_solve(&input, limit, cap),
        Command::Verify {
            input,
            trace,
            reduced,
        } => cmd_verify(&input, &trace, reduced.as_deref()),
        Command::Bench {
            family,
            n,
            d,
            density,
            tightness,
            seeds,
            rules,
            output,
        } => {
            let grid = BenchGrid {
                family,
                n: parse_list(&n)?,
                d: parse_list(&d)?,
                density: parse_list(&density)?,
                tightness: parse_list(&tightness)?,
                seeds,
                rules: parse_rules(&rules)?,
            };
            cmd_bench(&grid, output.as_deref())
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("cannot parse `{t}` in `{s}`")))
        })
        .collect()
}

fn parse_universe(s: &str) -> Result<Vec<Value>> {
    if s.contains(',') {
        return parse_list(s);
    }
    let n: Value = s
        .trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("bad universe `{s}`")))?;
    Ok((1..=n).collect())
}

fn parse_sets(s: &str) -> Result<Vec<Vec<Value>>> {
    s.split(',')
        .map(|set| {
            let set = set.trim();
            if set.contains('+') {
                parse_list(&set.replace('+', ","))
            } else {
                set.chars()
                    .map(|c| {
                        c.to_digit(10).ok_or_else(|| {
                            Error::Invalid(format!("bad set element `{c}` in `{set}`"))
                        })
                    })
                    .collect()
            }
        })
        .collect()
}

pub fn generate(family: Family, p: &GenParams) -> Result<Instance> {
    match family {
        Family::Figure1a => Ok(generators::figure1a()),
        Family::Figure1b => Ok(generators::figure1b()),
        Family::Figure1c => Ok(generators::figure1c()),
        Family::Cnsvsns => generators::two_var_cns_vs_ns(p.d as u32),
        Family::Setcover => {
            generators::set_cover_instance(&parse_universe(&p.universe)?, &parse_sets(&p.sets)?)
        }
        Family::Geqchain if p.anchored => generators::anchored_geq_chain(p.len),
        Family::Geqchain => generators::geq_chain(p.len),
        Family::Random => generators::random_instance(&RandomParams {
            n: p.n,
            d: p.d,
            density: p.density,
            tightness: p.tightness,
            seed: p.seed,
        }),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

pub fn cmd_gen(family: Family, p: &GenParams, out: Option<&Path>) -> Result<i32> {
    emit(&instance_to_json(&generate(family, p)?), out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct StatsRow<'a> {
    instance: &'a str,
    rules: &'a str,
    ac: usize,
    ns: usize,
    ss: usize,
    cns: usize,
    scss: usize,
    eliminations: usize,
    updates: u64,
    micros: u128,
    initial_size: usize,
    final_size: usize,
    unsatisfiable: bool,
}

pub fn cmd_reduce(
    input: &Path,
    rules: &str,
    out: Option<&Path>,
    trace_out: Option<&Path>,
    stats_out: Option<&Path>,
) -> Result<i32> {
    let inst = read_instance(input)?;
    let rules = parse_rules(rules)?;
    let r = reduce(&inst, &rules, &EngineOptions::from_env());

    if let Some(path) = out {
        write_instance(&r.instance, path)?;
    }
    if let Some(path) = trace_out {
        std::fs::write(path, r.trace.to_json() + "\n")?;
    }
    let names: Vec<&str> = rules.iter().map(|r| r.as_str()).collect();
    let names = names.join(",");
    if let Some(path) = stats_out {
        let rep = &r.report;
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.serialize(StatsRow {
            instance: inst.name(),
            rules: &names,
            ac: rep.ac,
            ns: rep.ns,
            ss: rep.ss,
            cns: rep.cns,
            scss: rep.scss,
            eliminations: rep.eliminations(),
            updates: rep.updates,
            micros: rep.micros,
            initial_size: rep.initial_size,
            final_size: rep.final_size,
            unsatisfiable: rep.unsatisfiable,
        })
        .map_err(csv_err)?;
        w.flush()?;
    }

    let rep = &r.report;
    println!(
        "{}: {} eliminations (ac {}, ns {}, ss {}, cns {}, scss {}), {} updates, size {} -> {}",
        inst.name(),
        rep.eliminations(),
        rep.ac,
        rep.ns,
        rep.ss,
        rep.cns,
        rep.scss,
        rep.updates,
        rep.initial_size,
        rep.final_size
    );
    for i in 0..r.instance.num_vars() {
        println!("  {} = {:?}", r.instance.var_name(i), r.instance.domain(i));
    }
    if rep.unsatisfiable {
        println!("unsatisfiable");
        return Ok(EXIT_UNSAT);
    }
    Ok(EXIT_OK)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn cmd_solve(input: &Path, limit: Option<usize>, cap: u64) -> Result<i32> {
    let inst = read_instance(input)?;
    let sols = oracle::solve_capped(&inst, limit, cap)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for s in &sols {
        let line: Vec<String> = s
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{}={v}", inst.var_name(i)))
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    if sols.is_empty() {
        writeln!(out, "UNSAT")?;
        return Ok(EXIT_UNSAT);
    }
    eprintln!("{} solution(s)", sols.len());
    Ok(EXIT_OK)
}

pub fn cmd_verify(input: &Path, trace: &Path, reduced: Option<&Path>) -> Result<i32> {
    let inst = read_instance(input)?;
    let (_, steps) = parse_trace(&std::fs::read_to_string(trace)?)?;
    let (fin, _) = replay_sequence(&inst, &steps)?;
    if let Some(path) = reduced {
        let want = read_instance(path)?;
        let same = want.num_vars() == fin.num_vars()
            && (0..fin.num_vars()).all(|i| want.domain(i) == fin.domain(i));
        if !same {
            eprintln!("replayed domains differ from {}", path.display());
            return Ok(EXIT_VERIFY_FAILED);
        }
    }
    println!("{} steps certified", steps.len());
    Ok(EXIT_OK)
}

#[derive(Clone, Debug)]
pub struct BenchGrid {
    pub family: Family,
    pub n: Vec<usize>,
    pub d: Vec<usize>,
    pub density: Vec<f64>,
    pub tightness: Vec<f64>,
    pub seeds: u64,
    pub rules: Vec<Rule>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BenchRow {
    pub family: String,
    pub n: usize,
    pub d: usize,
    pub density: f64,
    pub tightness: f64,
    pub seed: u64,
    pub rule: Rule,
    pub eliminations: usize,
    pub updates: u64,
    pub micros: u128,
}

/// Every grid cell, in a fixed order. Each engine runs once, directly on
/// the generated instance with no arc consistency pass in front. Cells run
/// in parallel.
pub fn bench_rows(grid: &BenchGrid) -> Result<Vec<BenchRow>> {
    let mut cells = Vec::new();
    for &n in &grid.n {
        for &d in &grid.d {
            for &density in &grid.density {
                for &tightness in &grid.tightness {
                    for seed in 0..grid.seeds {
                        for &rule in &grid.rules {
                            cells.push((n, d, density, tightness, seed, rule));
                        }
                    }
                }
            }
        }
    }
    let family = grid.family;
    let family_name = family
        .to_possible_value()
        .expect("named")
        .get_name()
        .to_string();
    cells
        .into_par_iter()
        .map(|(n, d, density, tightness, seed, rule)| {
            let p = GenParams {
                n,
                d,
                density,
                tightness,
                seed,
                universe: "3".into(),
                sets: "12,23,13".into(),
                len: n,
                anchored: false,
            };
            let inst = generate(family, &p)?;
            let r = run_rule(&inst, rule, &EngineOptions::default());
            Ok(BenchRow {
                family: family_name.clone(),
                n,
                d,
                density,
                tightness,
                seed,
                rule,
                eliminations: r.report.eliminations(),
                updates: r.report.updates,
                micros: r.report.micros,
            })
        })
        .collect()
}

pub fn cmd_bench(grid: &BenchGrid, out: Option<&Path>) -> Result<i32> {
    let rows = bench_rows(grid)?;
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in &rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}
