//! Command-line front end. Exit codes: 0 success, 2 input error, 3
//! constraint error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::analysis::{
    differential, evolve, filter_closed, filter_generators, write_differential, write_evolution,
    Binning,
};
use crate::error::{Error, Result};
use crate::io::{load, write_database, write_instance_matrix, write_patterns, InputFormat};
use crate::miner::mine;
use crate::model::{Constraints, MinSupport, Pattern, SequenceDatabase};
use crate::occurrence::instance_matrix;
use crate::preprocess::{
    abstract_rewrite, collapse_runs, contextualize, equal_bins, filter_events, parse_context_rules,
    parse_rewrite_rules, segment, SegmentMode, Segmented, Targets, DEFAULT_MULT_SUFFIX,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONSTRAINT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "seqmine",
    version,
    about = "Constrained sequential pattern mining"
)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for randomized steps. Mining and the analyses are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mine frequent patterns.
    Mine(MineArgs),
    /// Transform an event log.
    Preprocess(PreprocessArgs),
    /// Compare two groups of sequences.
    Diff(DiffArgs),
    /// Rank patterns by change across bins.
    Evolve(EvolveArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "basket")]
    format: InputFormat,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstraintArgs {
    /// Minimum support as a fraction of sequences (default 0.5).
    #[arg(long, conflicts_with = "min_count")]
    min_support: Option<f64>,
    /// Minimum support as a sequence count.
    #[arg(long)]
    min_count: Option<usize>,
    #[arg(long, default_value = "inf", value_parser = parse_limit)]
    max_gap: Limit,
    #[arg(long, default_value = "inf", value_parser = parse_limit)]
    max_window: Limit,
    #[arg(long, default_value_t = 2)]
    min_items: usize,
    #[arg(long, default_value = "inf", value_parser = parse_limit)]
    max_items: Limit,
}

/// `None` is unbounded.
#[derive(Clone, Copy, Debug)]
struct Limit(Option<usize>);

fn parse_limit(s: &str) -> std::result::Result<Limit, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(Limit(None));
    }
    s.parse()
        .map(|n| Limit(Some(n)))
        .map_err(|_| format!("expected a non-negative integer or inf, got {s:?}"))
}

impl ConstraintArgs {
    fn constraints(&self) -> Constraints {
        let min_support = match (self.min_support, self.min_count) {
            (_, Some(n)) => MinSupport::Count(n),
            (Some(f), None) => MinSupport::Fraction(f),
            (None, None) => MinSupport::Fraction(0.5),
        };
        Constraints {
            min_support,
            max_gap: self.max_gap.0,
            max_window: self.max_window.0,
            min_items: self.min_items,
            max_items: self.max_items.0,
        }
    }
}

#[derive(Args, Debug)]
struct MineArgs {
    #[command(flatten)]
    io: InputArgs,
    #[command(flatten)]
    constraints: ConstraintArgs,
    /// Keep closed patterns only.
    #[arg(long, conflicts_with = "generators")]
    closed: bool,
    /// Keep generator patterns only.
    #[arg(long)]
    generators: bool,
    /// Also write the sequence x pattern instance matrix to `<out>.instances.csv`.
    #[arg(long, requires = "out")]
    instances: bool,
}

#[derive(Args, Debug)]
struct PreprocessArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Drop events with these labels (comma separated).
    #[arg(long)]
    filter: Vec<String>,
    /// Collapse runs of repeated labels: `all` or a comma-separated list.
    #[arg(long, num_args = 0..=1, default_missing_value = "all")]
    collapse: Vec<String>,
    /// File of `attribute,threshold[,low_suffix,high_suffix]` rules.
    #[arg(long)]
    context: Vec<PathBuf>,
    /// File of `a|b -> x` rewrite rules.
    #[arg(long = "abstract")]
    abstract_rules: Vec<PathBuf>,
    /// by-actor, by-day, by-session:SECONDS or bins:N.
    #[arg(long, value_parser = parse_segment)]
    segment: Vec<SegmentMode>,
    /// Fail on events lacking the context attribute instead of keeping them.
    #[arg(long)]
    strict: bool,
    /// Seconds added to timestamps before cutting days.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    day_offset: i64,
    #[arg(long, default_value = DEFAULT_MULT_SUFFIX)]
    mult_suffix: String,
}

fn parse_segment(s: &str) -> std::result::Result<SegmentMode, String> {
    let number = |v: &str| {
        v.parse::<i64>()
            .map_err(|_| format!("bad number in --segment {s:?}"))
    };
    match s.split_once(':') {
        None if s == "by-actor" => Ok(SegmentMode::ByActor),
        None if s == "by-day" => Ok(SegmentMode::ByDay { offset_seconds: 0 }),
        Some(("by-session", v)) => Ok(SegmentMode::BySession {
            gap_seconds: number(v)?,
        }),
        Some(("bins", v)) => Ok(SegmentMode::EqualBins(
            v.parse().map_err(|_| format!("bad bin count in {s:?}"))?,
        )),
        _ => Err(format!(
            "unknown segmentation {s:?} (by-actor, by-day, by-session:SECONDS, bins:N)"
        )),
    }
}

#[derive(Args, Debug)]
struct DiffArgs {
    #[command(flatten)]
    io: InputArgs,
    #[command(flatten)]
    constraints: ConstraintArgs,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("binning").required(true).args(["bins", "segment"])))]
struct EvolveArgs {
    #[command(flatten)]
    io: InputArgs,
    #[command(flatten)]
    constraints: ConstraintArgs,
    /// Equal-size bins per sequence.
    #[arg(long)]
    bins: Option<usize>,
    /// Natural bins: by-actor, by-day or by-session:SECONDS.
    #[arg(long, value_parser = parse_segment)]
    segment: Option<SegmentMode>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    day_offset: i64,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_INPUT;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let sub = matches.subcommand().map(|(_, m)| m.clone());
    match pool.install(|| execute(cli.command, sub.as_ref())) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_constraint_error() {
                EXIT_CONSTRAINT
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn execute(command: Command, matches: Option<&ArgMatches>) -> Result<()> {
    match command {
        Command::Mine(a) => cmd_mine(&a),
        Command::Preprocess(a) => cmd_preprocess(&a, matches.expect("subcommand matches")),
        Command::Diff(a) => cmd_diff(&a),
        Command::Evolve(a) => cmd_evolve(&a),
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_mine(a: &MineArgs) -> Result<()> {
    let c = a.constraints.constraints();
    c.validate()?;
    let db = load(&a.io.input, a.io.format)?;
    let results = if a.closed || a.generators {
        // closure is decided against every frequent pattern, short ones included
        let all = mine(&db, &c.with_min_items(1))?;
        let kept = if a.closed {
            filter_closed(&all)
        } else {
            filter_generators(&all)
        };
        kept.into_iter()
            .filter(|r| c.admits_items(r.pattern.item_count()))
            .collect()
    } else {
        mine(&db, &c)?
    };
    write_patterns(&results, &db.alphabet, open_out(a.io.out.as_deref())?)?;
    if a.instances {
        let out = a.io.out.as_deref().expect("clap enforces --out");
        let patterns: Vec<Pattern> = results.iter().map(|r| r.pattern.clone()).collect();
        let matrix = instance_matrix(&db, &patterns, &c)?;
        let file = BufWriter::new(File::create(suffixed(out, ".instances.csv"))?);
        write_instance_matrix(&db, &patterns, &matrix, file)?;
    }
    Ok(())
}

enum Stage {
    One(SequenceDatabase),
    Bins(Vec<SequenceDatabase>),
}

impl Stage {
    fn map(self, f: impl Fn(&SequenceDatabase) -> Result<SequenceDatabase>) -> Result<Stage> {
        Ok(match self {
            Stage::One(db) => Stage::One(f(&db)?),
            Stage::Bins(dbs) => Stage::Bins(dbs.iter().map(f).collect::<Result<_>>()?),
        })
    }
}

enum Step {
    Filter(BTreeSet<String>),
    Collapse(Targets),
    Context(PathBuf),
    Abstract(PathBuf),
    Segment(SegmentMode),
}

/// Transform flags in command-line order.
fn ordered_steps(a: &PreprocessArgs, m: &ArgMatches) -> Vec<Step> {
    let indexed =
        |id: &str| -> Vec<usize> { m.indices_of(id).map(|i| i.collect()).unwrap_or_default() };
    let mut steps: Vec<(usize, Step)> = Vec::new();
    let labels = |v: &str| -> BTreeSet<String> {
        v.split(',')
            .map(|s| s.trim().to_owned())
            .filter(|s| !s.is_empty())
            .collect()
    };
    for (i, v) in indexed("filter").into_iter().zip(&a.filter) {
        steps.push((i, Step::Filter(labels(v))));
    }
    for (i, v) in indexed("collapse").into_iter().zip(&a.collapse) {
        let targets = if v == "all" {
            Targets::All
        } else {
            Targets::Labels(labels(v))
        };
        steps.push((i, Step::Collapse(targets)));
    }
    for (i, p) in indexed("context").into_iter().zip(&a.context) {
        steps.push((i, Step::Context(p.clone())));
    }
    for (i, p) in indexed("abstract_rules").into_iter().zip(&a.abstract_rules) {
        steps.push((i, Step::Abstract(p.clone())));
    }
    for (i, s) in indexed("segment").into_iter().zip(&a.segment) {
        steps.push((i, Step::Segment(*s)));
    }
    steps.sort_by_key(|(i, _)| *i);
    steps.into_iter().map(|(_, s)| s).collect()
}

fn with_offset(mode: SegmentMode, offset: i64) -> SegmentMode {
    match mode {
        SegmentMode::ByDay { .. } => SegmentMode::ByDay {
            offset_seconds: offset,
        },
        m => m,
    }
}

fn cmd_preprocess(a: &PreprocessArgs, m: &ArgMatches) -> Result<()> {
    let mut stage = Stage::One(load(&a.io.input, a.io.format)?);
    for step in ordered_steps(a, m) {
        stage = match step {
            Step::Filter(labels) => stage.map(|db| filter_events(db, &labels))?,
            Step::Collapse(t) => stage.map(|db| collapse_runs(db, &t, &a.mult_suffix))?,
            Step::Context(path) => {
                let rules = parse_context_rules(&fs::read_to_string(path)?)?;
                stage.map(|db| {
                    rules
                        .iter()
                        .try_fold(db.clone(), |db, r| contextualize(&db, r, a.strict))
                })?
            }
            Step::Abstract(path) => {
                let rules = parse_rewrite_rules(&fs::read_to_string(path)?)?;
                stage.map(|db| abstract_rewrite(db, &rules))?
            }
            Step::Segment(SegmentMode::EqualBins(n)) => match stage {
                Stage::One(db) => {
                    let binned = equal_bins(&db, n)?;
                    if !binned.short_sequences.is_empty() {
                        eprintln!(
                            "warning: {} sequence(s) shorter than {n} events leave trailing bins empty",
                            binned.short_sequences.len()
                        );
                    }
                    Stage::Bins(binned.bins)
                }
                Stage::Bins(_) => {
                    return Err(Error::InvalidConstraints(
                        "bins segmentation may be applied once".into(),
                    ))
                }
            },
            Step::Segment(mode) => {
                stage.map(|db| match segment(db, with_offset(mode, a.day_offset))? {
                    Segmented::Split(db) => Ok(db),
                    Segmented::Bins(_) => unreachable!("equal bins handled above"),
                })?
            }
        };
    }
    match stage {
        Stage::One(db) => write_database(&db, open_out(a.io.out.as_deref())?, a.io.format),
        Stage::Bins(dbs) => {
            let out =
                a.io.out.as_deref().ok_or_else(|| {
                    Error::InvalidConstraints("bin segmentation needs --out".into())
                })?;
            for (k, db) in dbs.iter().enumerate() {
                let file = BufWriter::new(File::create(suffixed(out, &format!(".bin{}", k + 1)))?);
                write_database(db, file, a.io.format)?;
            }
            Ok(())
        }
    }
}

fn summary(tested: usize, significant: usize) -> String {
    format!("# patterns tested: {tested}; q < 0.05: {significant}")
}

fn cmd_diff(a: &DiffArgs) -> Result<()> {
    if a.io.format != InputFormat::Table {
        return Err(Error::MissingColumn(
            "group (diff needs --format table)".into(),
        ));
    }
    let c = a.constraints.constraints();
    c.validate()?;
    let db = load(&a.io.input, a.io.format)?;
    let rows = differential(&db, &c)?;
    write_differential(&rows, &db.alphabet, open_out(a.io.out.as_deref())?)?;
    let significant = rows.iter().filter(|r| r.min_q() < 0.05).count();
    println!("{}", summary(rows.len(), significant));
    Ok(())
}

fn cmd_evolve(a: &EvolveArgs) -> Result<()> {
    let c = a.constraints.constraints();
    c.validate()?;
    let binning = match (a.bins, a.segment) {
        (Some(n), _) => Binning::Equal(n),
        (None, Some(SegmentMode::EqualBins(n))) => Binning::Equal(n),
        (None, Some(mode)) => Binning::Segments(with_offset(mode, a.day_offset)),
        (None, None) => unreachable!("clap requires --bins or --segment"),
    };
    let db = load(&a.io.input, a.io.format)?;
    let evolution = evolve(&db, binning, &c)?;
    if !evolution.excluded.is_empty() {
        eprintln!("warning: {} sequence(s) excluded", evolution.excluded.len());
    }
    write_evolution(&evolution, &db.alphabet, open_out(a.io.out.as_deref())?)?;
    let significant = evolution.rows.iter().filter(|r| r.q_anova < 0.05).count();
    println!("{}", summary(evolution.rows.len(), significant));
    Ok(())
}
