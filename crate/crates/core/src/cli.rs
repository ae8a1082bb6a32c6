//! Command-line front end.
//!
//! Exit codes: 0 on success (and, for `check-*`, every property passed),
//! 1 when a validator found a violation, 2 on usage, parse or lookup errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::algebra;
use crate::entropy;
use crate::error::{Error, Result};
use crate::ingest::{self, CsvSpec, MatrixFormat, NaPolicy};
use crate::metric;
use crate::model::Dataset;
use crate::randgen::{population, CorrelationMode, Coverage};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "entrocat",
    version,
    about = "Symmetric uncertainty, its distance, and the joint algebra on categorical CSV data"
)]
pub struct Cli {
    /// Print 17 significant digits instead of 4 decimals.
    #[arg(long, global = true)]
    pub full: bool,

    /// Field delimiter for CSV input and output.
    #[arg(long, global = true, default_value = ",")]
    pub delimiter: char,

    /// Empty cells: `keep` as the category `<NA>`, or `drop` the row.
    #[arg(long, global = true, default_value = "keep")]
    pub na: NaPolicy,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SU, distance, entropic ratio, MI and entropies for two columns.
    Su {
        /// CSV file, or `-` for stdin.
        input: String,
        a: String,
        b: String,
    },
    /// Every other column ranked by SU against a class column.
    Rank { input: String, class: String },
    /// Pairwise distance (or similarity) matrix.
    Dist {
        input: String,
        /// Restrict to these columns, in this order.
        columns: Vec<String>,
        #[arg(long, default_value = "tsv")]
        format: MatrixFormat,
        /// Write SU instead of 1 - SU.
        #[arg(long)]
        similarity: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Appends the joint of the given columns and writes the dataset as CSV.
    Joint {
        input: String,
        #[arg(required = true, num_args = 2..)]
        columns: Vec<String>,
        /// Name of the new column (default `A*B*...`).
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Groups columns that induce the same partition of the rows.
    Classes { input: String },
    /// Similarity and distance axioms.
    CheckMetric(CheckArgs),
    /// Monoid laws and contractivity of the joint.
    CheckMonoid(CheckArgs),
    /// The relative-entropy lemma and its corollary inequalities.
    CheckLemma2(CheckArgs),
    /// Distances between nested indicators that differ on one shrinking row.
    DemoNondiscrete {
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, args = ["input", "random"])]
pub struct CheckArgs {
    /// CSV file, or `-` for stdin.
    pub input: Option<String>,

    /// Check generated datasets starting at this seed instead of a file.
    #[arg(long, value_name = "SEED")]
    pub random: Option<u64>,

    /// Number of generated datasets.
    #[arg(short = 'n', long = "count", default_value_t = 1000)]
    pub count: usize,

    /// Generator mode (default: refined for check-lemma2, arbitrary otherwise).
    #[arg(long)]
    pub mode: Option<CorrelationMode>,

    /// Seed for tuple sampling when a file has too many columns to enumerate.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Tuples sampled per check when not enumerating.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,

    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

struct Ctx<'a> {
    full: bool,
    csv: CsvSpec,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn num(&self, v: f64) -> String {
        if self.full {
            ingest::full_precision(v)
        } else {
            format!("{v:.4}")
        }
    }

    fn load(&self, path: &str) -> Result<Dataset> {
        ingest::load_csv(ingest::read_input(path)?.as_slice(), &self.csv)
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    if !cli.delimiter.is_ascii() {
        let _ = writeln!(err, "error: delimiter must be a single ASCII character");
        return EXIT_USAGE;
    }
    let mut ctx = Ctx {
        full: cli.full,
        csv: CsvSpec {
            delimiter: cli.delimiter as u8,
            na_policy: cli.na,
        },
        out,
        err,
    };
    match dispatch(&cli.command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx<'_>) -> Result<i32> {
    match cmd {
        Command::Su { input, a, b } => su(ctx, input, a, b),
        Command::Rank { input, class } => rank(ctx, input, class),
        Command::Dist {
            input,
            columns,
            format,
            similarity,
            out,
        } => dist(ctx, input, columns, *format, *similarity, out.as_ref()),
        Command::Joint {
            input,
            columns,
            name,
            out,
        } => joint(ctx, input, columns, name.as_deref(), out.as_ref()),
        Command::Classes { input } => classes(ctx, input),
        Command::CheckMetric(args) => check(ctx, args, Validator::Metric),
        Command::CheckMonoid(args) => check(ctx, args, Validator::Monoid),
        Command::CheckLemma2(args) => check(ctx, args, Validator::Lemma2),
        Command::DemoNondiscrete { steps } => demo(ctx, *steps),
    }
}

fn su(ctx: &mut Ctx<'_>, input: &str, a: &str, b: &str) -> Result<i32> {
    let d = ctx.load(input)?;
    let s = entropy::summarize_pair(&d.partition(a)?, &d.partition(b)?)?;
    let ratio = s
        .entropic_ratio
        .map_or_else(|| "undefined".to_string(), |r| ctx.num(r));
    let lines = [
        ("SU".to_string(), ctx.num(s.su)),
        ("distance".to_string(), ctx.num(s.distance())),
        ("entropic_ratio".to_string(), ratio),
        ("MI".to_string(), ctx.num(s.mutual_information)),
        (format!("H({a})"), ctx.num(s.h_x)),
        (format!("H({b})"), ctx.num(s.h_y)),
        (format!("H({a},{b})"), ctx.num(s.h_xy)),
    ];
    for (k, v) in lines {
        writeln!(ctx.out, "{k}\t{v}")?;
    }
    Ok(EXIT_OK)
}

fn rank(ctx: &mut Ctx<'_>, input: &str, class: &str) -> Result<i32> {
    let d = ctx.load(input)?;
    let target = d.partition(class)?;
    let mut scores = Vec::new();
    for name in d.column_names() {
        if name != class {
            let su = entropy::symmetric_uncertainty(&d.partition(&name)?, &target)?;
            scores.push((name, su));
        }
    }
    if scores.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no feature columns besides `{class}`"
        )));
    }
    scores.sort_by(|(na, a), (nb, b)| b.total_cmp(a).then_with(|| na.cmp(nb)));
    // Values within the identity tolerance of a group's leader are ties and
    // are ordered by name.
    let mut start = 0;
    while start < scores.len() {
        let lead = scores[start].1;
        let end = start
            + scores[start..]
                .iter()
                .take_while(|(_, v)| lead - v <= entropy::IDENTITY_TOL)
                .count();
        scores[start..end].sort_by(|(na, _), (nb, _)| na.cmp(nb));
        start = end;
    }
    for (i, (name, su)) in scores.iter().enumerate() {
        writeln!(ctx.out, "{}\t{name}\t{}", i + 1, ctx.num(*su))?;
    }
    Ok(EXIT_OK)
}

fn emit(ctx: &mut Ctx<'_>, text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => ctx.out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dist(
    ctx: &mut Ctx<'_>,
    input: &str,
    columns: &[String],
    format: MatrixFormat,
    similarity: bool,
    out: Option<&PathBuf>,
) -> Result<i32> {
    let d = ctx.load(input)?;
    let subset = (!columns.is_empty()).then_some(columns);
    let text = if similarity {
        ingest::save_matrix(&metric::similarity_matrix(&d, subset)?, format)
    } else {
        ingest::save_matrix(&metric::distance_matrix(&d, subset)?, format)
    };
    emit(ctx, &text, out)?;
    Ok(EXIT_OK)
}

fn joint(
    ctx: &mut Ctx<'_>,
    input: &str,
    columns: &[String],
    name: Option<&str>,
    out: Option<&PathBuf>,
) -> Result<i32> {
    let mut d = ctx.load(input)?;
    let mut acc = d.column(&columns[0])?.clone();
    for c in &columns[1..] {
        acc = algebra::joint(&acc, d.column(c)?, &d)?.into_variable();
    }
    if let Some(n) = name {
        acc = acc.renamed(n);
    }
    d.add_column(acc)?;
    let text = ingest::to_csv_string(&d, ctx.csv.delimiter)?;
    emit(ctx, &text, out)?;
    Ok(EXIT_OK)
}

fn classes(ctx: &mut Ctx<'_>, input: &str) -> Result<i32> {
    let d = ctx.load(input)?;
    for class in algebra::indiscernibility_classes(&d)? {
        writeln!(ctx.out, "{}", class.join("\t"))?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Copy)]
enum Validator {
    Metric,
    Monoid,
    Lemma2,
}

impl Validator {
    fn run(self, d: &Dataset, coverage: Coverage) -> Result<Report> {
        match self {
            Validator::Metric => metric::check_metric(d, coverage),
            Validator::Monoid => algebra::check_algebra(d, coverage),
            Validator::Lemma2 => entropy::check_lemma2_columns(d, coverage),
        }
    }

    fn default_mode(self) -> CorrelationMode {
        match self {
            Validator::Lemma2 => CorrelationMode::Refined,
            _ => CorrelationMode::Arbitrary,
        }
    }
}

fn check(ctx: &mut Ctx<'_>, args: &CheckArgs, v: Validator) -> Result<i32> {
    let coverage = Coverage::Auto {
        seed: args.seed,
        samples: args.samples,
    };
    let report = match (&args.input, args.random) {
        (Some(path), _) => {
            let d = ctx.load(path)?;
            let mut r = v.run(&d, coverage)?;
            r.title = format!("{} on {path}", r.title);
            r
        }
        (None, Some(first)) => {
            if args.count == 0 {
                return Err(Error::InvalidArgument("--count must be positive".into()));
            }
            let mode = args.mode.unwrap_or(v.default_mode());
            let mut total: Option<Report> = None;
            for (seed, d) in population(first, args.count, mode) {
                let r = v.run(&d?, coverage)?;
                match total.as_mut() {
                    None => {
                        let mut t = Report::new(r.title.clone());
                        t.absorb(r, &format!("seed={seed}"));
                        total = Some(t);
                    }
                    Some(t) => t.absorb(r, &format!("seed={seed}")),
                }
            }
            let mut r = total.expect("count is positive");
            r.title = format!(
                "{} on {} generated datasets (seeds {}..={}, mode {mode:?})",
                r.title,
                args.count,
                first,
                first.wrapping_add(args.count as u64 - 1)
            );
            r
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    if args.json {
        writeln!(ctx.out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        write!(ctx.out, "{report}")?;
    }
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        writeln!(ctx.err, "{} violation(s) found", report.violations())?;
        Ok(EXIT_VIOLATION)
    }
}

fn demo(ctx: &mut Ctx<'_>, steps: usize) -> Result<i32> {
    let points = metric::nondiscreteness_demo(steps)?;
    writeln!(ctx.out, "n\tepsilon\tdistance")?;
    for p in points {
        writeln!(
            ctx.out,
            "{}\t{}\t{}",
            p.rows,
            p.epsilon,
            ctx.num(p.distance)
        )?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("entrocat").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn missing_subcommand_is_usage_error() {
        let (code, _, err) = run_args(&[]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("check-metric"));
    }

    #[test]
    fn check_needs_a_source() {
        let (code, _, _) = run_args(&["check-metric"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn demo_bounds() {
        assert_eq!(
            run_args(&["demo-nondiscrete", "--steps", "1"]).0,
            EXIT_USAGE
        );
        let (code, out, _) = run_args(&["demo-nondiscrete", "--steps", "3"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn small_random_runs_pass() {
        for cmd in ["check-metric", "check-monoid", "check-lemma2"] {
            let (code, out, _) = run_args(&[cmd, "--random", "3", "-n", "5"]);
            assert_eq!(code, EXIT_OK, "{cmd}: {out}");
            assert!(out.contains("seeds 3..=7"));
        }
    }
}
