//! Command-line front end.
//!
//! Exit codes: 0 success, 1 negative answer (no catalyst, empty region),
//! 2 input error, 3 internal inconsistency between the theorems and the
//! brute-force oracle.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalyst2d::{
    exists_2d, is_useful_2d, pair_bounds, region2, single_critical_condition, Interval, PairBound,
};
use crate::catalystnd::{
    construct_catalyst, construct_catalyst_with_alpha, default_theta, exists_catalyst,
    ConstructionTrace,
};
use crate::error::Error;
use crate::oracle::{float, random_probvec, scan_region2, verify_pair, CatalystReport};
use crate::probvec::{make_probvec, parse_rat, parse_vector, to_decimal, ProbVec, Rat};
use crate::vidal::{catalysis_admissible, critical_set, CriticalSet, TransformPair};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Human,
    Structured,
}

/// Settings shared by all commands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: ArithmeticMode,
    pub format: OutputFormat,
    pub seed: u64,
    pub theta: Rat,
    pub resolution: usize,
    pub dmax: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: ArithmeticMode::Exact,
            format: OutputFormat::Human,
            seed: 0,
            theta: default_theta(),
            resolution: 50,
            dmax: 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "catalysis",
    version,
    about = "Decide when entanglement catalysts raise the maximal LOCC conversion probability",
    after_help = "Vectors are comma-separated decimals or fractions, e.g. \"0.6,0.2,0.2\" or \"1/2,1/4,1/4\".\n\
                  Vectors that do not sum to 1 are normalized with a warning unless --strict is given.\n\
                  Random sweeps are fully determined by --seed."
)]
struct Cli {
    /// Emit structured JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    /// Arithmetic used by the oracle in `verify` and `sweep`.
    #[arg(long, global = true, value_enum, default_value = "exact")]
    mode: ArithmeticMode,
    /// Reject vectors that do not sum to exactly 1.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximal conversion probability, critical set and admissibility.
    Prob { x: String, y: String },
    /// Exact set of useful two-dimensional catalyst ratios c2/c1.
    Region2 { x: String, y: String },
    /// Whether useful catalysts exist (two-dimensional and in general).
    Exists { x: String, y: String },
    /// Construct a useful geometric catalyst.
    Construct {
        x: String,
        y: String,
        /// Position of alpha inside (alpha_min, 1).
        #[arg(long)]
        theta: Option<String>,
        /// Use this alpha directly instead of deriving it from theta.
        #[arg(long, conflicts_with = "theta")]
        alpha: Option<String>,
    },
    /// Check one catalyst against the brute-force oracle.
    Verify { x: String, y: String, c: String },
    /// Classify many catalysts and compare the oracle with the theorems.
    Sweep {
        kind: SweepKind,
        x: String,
        y: String,
        #[arg(long, default_value_t = 50)]
        resolution: usize,
        #[arg(long, default_value_t = 4)]
        dmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write CSV rows here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    /// Ratios t = i/resolution for two-dimensional catalysts.
    Grid,
    /// `resolution` random catalysts of dimension 2..=dmax.
    Random,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoCatalyst { .. } => EXIT_NEGATIVE,
            Error::ConstructionFailed { .. } => EXIT_INCONSISTENT,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    strict: bool,
    config: RunConfig,
}

impl Ctx<'_> {
    fn vector(&mut self, label: &str, literal: &str) -> std::result::Result<ProbVec, Failure> {
        let raw = parse_vector(literal)?;
        match make_probvec(raw.clone(), false) {
            Ok(v) => Ok(v),
            Err(Error::NotNormalized { sum }) if !self.strict => {
                let _ = writeln!(self.err, "warning: {label} sums to {sum}; normalizing");
                Ok(make_probvec(raw, true)?)
            }
            Err(e) => Err(e.into()),
        }
    }

    fn pair(&mut self, x: &str, y: &str) -> std::result::Result<TransformPair, Failure> {
        let x = self.vector("x", x)?;
        let y = self.vector("y", y)?;
        Ok(TransformPair::new(&x, &y))
    }

    fn structured(&self) -> bool {
        self.config.format == OutputFormat::Structured
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) {
        let text = serde_json::to_string_pretty(value).expect("serializable output");
        let _ = writeln!(self.out, "{text}");
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let mut config = RunConfig {
        mode: cli.mode,
        format: if cli.json {
            OutputFormat::Structured
        } else {
            OutputFormat::Human
        },
        ..RunConfig::default()
    };
    if let Command::Sweep {
        resolution,
        dmax,
        seed,
        ..
    } = &cli.command
    {
        config.resolution = *resolution;
        config.dmax = *dmax;
        config.seed = *seed;
    }
    let mut ctx = Ctx {
        out,
        err,
        strict: cli.strict,
        config,
    };
    let result = match &cli.command {
        Command::Prob { x, y } => cmd_prob(&mut ctx, x, y),
        Command::Region2 { x, y } => cmd_region2(&mut ctx, x, y),
        Command::Exists { x, y } => cmd_exists(&mut ctx, x, y),
        Command::Construct { x, y, theta, alpha } => {
            cmd_construct(&mut ctx, x, y, theta.as_deref(), alpha.as_deref())
        }
        Command::Verify { x, y, c } => cmd_verify(&mut ctx, x, y, c),
        Command::Sweep {
            kind, x, y, csv, ..
        } => cmd_sweep(&mut ctx, *kind, x, y, csv.as_ref()),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(ctx.err, "error: {}", f.message);
            f.code
        }
    }
}

fn fmt_exact(r: &Rat) -> String {
    format!("{r} (≈ {})", to_decimal(r))
}

fn strs(v: &ProbVec) -> Vec<String> {
    v.components().iter().map(|c| c.to_string()).collect()
}

#[derive(Serialize)]
struct ProbOutput {
    x: Vec<String>,
    y: Vec<String>,
    n: usize,
    p: String,
    p_decimal: String,
    critical_set: CriticalSet,
    admissible: bool,
}

fn cmd_prob(ctx: &mut Ctx, x: &str, y: &str) -> CmdResult {
    let pair = ctx.pair(x, y)?;
    let critical = critical_set(&pair);
    let admissible = catalysis_admissible(&pair);
    if ctx.structured() {
        ctx.emit_json(&ProbOutput {
            x: strs(pair.x()),
            y: strs(pair.y()),
            n: pair.n(),
            p: pair.p().to_string(),
            p_decimal: to_decimal(pair.p()),
            critical_set: critical,
            admissible,
        });
    } else {
        let o = &mut ctx.out;
        let _ = writeln!(o, "x = {}", pair.x());
        let _ = writeln!(o, "y = {}", pair.y());
        let _ = writeln!(o, "n = {}", pair.n());
        let _ = writeln!(o, "P = {}", fmt_exact(pair.p()));
        let _ = writeln!(o, "L = {critical}");
        let _ = writeln!(
            o,
            "{}",
            if admissible {
                "admissible: catalysis may increase P"
            } else {
                "not admissible: no catalyst can increase P"
            }
        );
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RegionOutput {
    x: Vec<String>,
    y: Vec<String>,
    p: String,
    critical_set: CriticalSet,
    admissible: bool,
    bounds: Vec<PairBound>,
    region: Vec<Interval>,
    c1_ranges: Vec<Interval>,
}

fn cmd_region2(ctx: &mut Ctx, x: &str, y: &str) -> CmdResult {
    let pair = ctx.pair(x, y)?;
    let region = region2(&pair);
    let admissible = catalysis_admissible(&pair);
    let bounds = if admissible {
        pair_bounds(&pair)
    } else {
        Vec::new()
    };
    if ctx.structured() {
        ctx.emit_json(&RegionOutput {
            x: strs(pair.x()),
            y: strs(pair.y()),
            p: pair.p().to_string(),
            critical_set: critical_set(&pair),
            admissible,
            bounds,
            region: region.intervals().to_vec(),
            c1_ranges: region.c1_intervals(),
        });
    } else {
        let o = &mut ctx.out;
        let _ = writeln!(o, "P = {}", fmt_exact(pair.p()));
        let _ = writeln!(o, "L = {}", critical_set(&pair));
        if !admissible {
            let _ = writeln!(o, "not admissible: no catalyst can increase P");
        }
        for b in &bounds {
            let m = b.m.as_ref().map_or("inf".to_string(), |m| m.to_string());
            let _ = writeln!(
                o,
                "  (r1, r2) = ({}, {}): m = {m}, M = {}",
                b.r1, b.r2, b.big_m
            );
        }
        if region.is_empty() {
            let _ = writeln!(o, "S = empty (no useful 2-dimensional catalyst)");
        } else {
            let _ = writeln!(o, "S = {region}");
            let c1: Vec<String> = region
                .c1_intervals()
                .iter()
                .map(|iv| iv.to_string())
                .collect();
            let _ = writeln!(o, "c1 in {}", c1.join(" ∪ "));
        }
    }
    Ok(if region.is_empty() {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    })
}

#[derive(Serialize)]
struct ExistsOutput {
    p: String,
    admissible: bool,
    exists_2d: bool,
    single_critical_condition: Option<bool>,
    exists_catalyst: bool,
}

fn cmd_exists(ctx: &mut Ctx, x: &str, y: &str) -> CmdResult {
    let pair = ctx.pair(x, y)?;
    let out = ExistsOutput {
        p: pair.p().to_string(),
        admissible: catalysis_admissible(&pair),
        exists_2d: exists_2d(&pair),
        single_critical_condition: single_critical_condition(&pair),
        exists_catalyst: exists_catalyst(&pair),
    };
    if out.exists_2d && !out.exists_catalyst {
        return Err(Failure {
            code: EXIT_INCONSISTENT,
            message: "a useful 2-dimensional catalyst exists but the general test says none does"
                .into(),
        });
    }
    let code = if out.exists_catalyst {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    if ctx.structured() {
        ctx.emit_json(&out);
    } else {
        let o = &mut ctx.out;
        let _ = writeln!(o, "P = {}", fmt_exact(pair.p()));
        let _ = writeln!(
            o,
            "useful 2-dimensional catalyst: {}",
            yes_no(out.exists_2d)
        );
        let _ = writeln!(
            o,
            "useful catalyst of some dimension: {}",
            yes_no(out.exists_catalyst)
        );
    }
    Ok(code)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Serialize)]
struct ConstructOutput<'a> {
    x: Vec<String>,
    y: Vec<String>,
    trace: &'a ConstructionTrace,
    oracle_useful: bool,
}

fn cmd_construct(
    ctx: &mut Ctx,
    x: &str,
    y: &str,
    theta: Option<&str>,
    alpha: Option<&str>,
) -> CmdResult {
    let pair = ctx.pair(x, y)?;
    if !exists_catalyst(&pair) {
        let n = pair.n();
        return Err(Failure {
            code: EXIT_NEGATIVE,
            message: format!(
                "no useful catalyst exists: the condition P < min{{x_{n}/y_{n}, 1}} fails (P = {}, x_{n} = {}, y_{n} = {})",
                pair.p(),
                pair.x().get(n),
                pair.y().get(n)
            ),
        });
    }
    let trace = match alpha {
        Some(a) => construct_catalyst_with_alpha(&pair, &parse_rat(a)?)?,
        None => {
            let theta = match theta {
                Some(t) => parse_rat(t)?,
                None => ctx.config.theta.clone(),
            };
            construct_catalyst(&pair, &theta)?
        }
    };
    let report = verify_pair(&pair, &trace.catalyst)?;
    if !report.useful || report.p_after != trace.p_after {
        return Err(Failure {
            code: EXIT_INCONSISTENT,
            message: format!(
                "oracle rejects the constructed catalyst: P after = {}, P before = {}",
                report.p_after, report.p_before
            ),
        });
    }
    if ctx.structured() {
        ctx.emit_json(&ConstructOutput {
            x: strs(pair.x()),
            y: strs(pair.y()),
            trace: &trace,
            oracle_useful: report.useful,
        });
    } else {
        let o = &mut ctx.out;
        let _ = writeln!(o, "h = {}", trace.h);
        let _ = writeln!(o, "bound P*y_n/x_n = {}", fmt_exact(&trace.tail_bound));
        let _ = writeln!(o, "bound from h = {}", fmt_exact(&trace.h_bound));
        let _ = writeln!(o, "alpha_min = {}", fmt_exact(&trace.alpha_min));
        let _ = writeln!(o, "alpha = {}", fmt_exact(&trace.alpha));
        let _ = writeln!(o, "k = {}", trace.k);
        let _ = writeln!(o, "catalyst = {}", trace.catalyst);
        let approx: Vec<String> = trace.catalyst.components().iter().map(to_decimal).collect();
        let _ = writeln!(o, "catalyst ≈ ({})", approx.join(", "));
        let _ = writeln!(o, "P before = {}", fmt_exact(&trace.p_before));
        let _ = writeln!(o, "P after = {}", fmt_exact(&trace.p_after));
    }
    Ok(EXIT_OK)
}

/// What the theorems say about a specific catalyst, when they say anything.
fn theorem_verdict(pair: &TransformPair, c: &ProbVec) -> Option<bool> {
    if c.len() == 2 && !c.has_zero_component() {
        return is_useful_2d(pair, c).ok();
    }
    if !exists_catalyst(pair) {
        return Some(false);
    }
    None
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    report: &'a CatalystReport,
    useful_theorem: Option<bool>,
}

fn cmd_verify(ctx: &mut Ctx, x: &str, y: &str, c: &str) -> CmdResult {
    let pair = ctx.pair(x, y)?;
    let c = ctx.vector("c", c)?;
    let report = verify_pair(&pair, &c)?;
    let oracle_useful = match ctx.config.mode {
        ArithmeticMode::Exact => report.useful,
        ArithmeticMode::Float => float::verify_useful_f64(&pair, &c).useful,
    };
    let predicted = theorem_verdict(&pair, &c);
    if ctx.structured() {
        ctx.emit_json(&VerifyOutput {
            report: &report,
            useful_theorem: predicted,
        });
    } else {
        let o = &mut ctx.out;
        let _ = writeln!(o, "catalyst = {}", report.catalyst);
        let _ = writeln!(o, "P before = {}", fmt_exact(&report.p_before));
        let _ = writeln!(o, "P after = {}", fmt_exact(&report.p_after));
        let _ = writeln!(o, "useful = {oracle_useful}");
        if let Some(p) = predicted {
            let _ = writeln!(o, "theorem predicts useful = {p}");
        }
    }
    match predicted {
        Some(p) if p != oracle_useful => Err(Failure {
            code: EXIT_INCONSISTENT,
            message: format!("oracle says useful = {oracle_useful}, theorem says {p}"),
        }),
        _ => Ok(EXIT_OK),
    }
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub pair_id: usize,
    pub catalyst: String,
    pub p_before: String,
    pub p_after: String,
    pub useful_oracle: bool,
    /// `true`, `false`, or `na` where no theorem makes a per-catalyst claim.
    pub useful_theorem: String,
    /// `true`, `false`, or `na`.
    pub agree: String,
}

fn sweep_row(pair: &TransformPair, c: &ProbVec, mode: ArithmeticMode) -> crate::Result<SweepRow> {
    let (p_before, p_after, useful) = match mode {
        ArithmeticMode::Exact => {
            let r = verify_pair(pair, c)?;
            (r.p_before.to_string(), r.p_after.to_string(), r.useful)
        }
        ArithmeticMode::Float => {
            let r = float::verify_useful_f64(pair, c);
            (
                format!("{:.15}", r.p_before),
                format!("{:.15}", r.p_after),
                r.useful,
            )
        }
    };
    let predicted = theorem_verdict(pair, c);
    let opt = |b: Option<bool>| b.map_or("na".to_string(), |b| b.to_string());
    Ok(SweepRow {
        pair_id: 0,
        catalyst: c.to_string(),
        p_before,
        p_after,
        useful_oracle: useful,
        useful_theorem: opt(predicted),
        agree: opt(predicted.map(|p| p == useful)),
    })
}

/// Rows for a grid or random sweep of one pair, ordered by sample index.
pub fn sweep_rows(
    pair: &TransformPair,
    random: bool,
    config: &RunConfig,
) -> crate::Result<Vec<SweepRow>> {
    let catalysts: Vec<ProbVec> = if random {
        if config.dmax < 2 {
            return Err(Error::InvalidDimension(config.dmax));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        (0..config.resolution)
            .map(|_| {
                let d = rng.gen_range(2..=config.dmax);
                random_probvec(&mut rng, d, 1000, false)
            })
            .collect()
    } else {
        scan_region2(pair, config.resolution)?
            .into_iter()
            .map(|p| p.report.catalyst)
            .collect()
    };
    catalysts
        .par_iter()
        .map(|c| sweep_row(pair, c, config.mode))
        .collect()
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    mode: ArithmeticMode,
    rows: &'a [SweepRow],
    disagreements: usize,
}

fn cmd_sweep(
    ctx: &mut Ctx,
    kind: SweepKind,
    x: &str,
    y: &str,
    csv_path: Option<&PathBuf>,
) -> CmdResult {
    let pair = ctx.pair(x, y)?;
    let rows = sweep_rows(&pair, kind == SweepKind::Random, &ctx.config)?;
    let disagreements = rows.iter().filter(|r| r.agree == "false").count();

    let write_csv = |w: &mut dyn Write| -> std::result::Result<(), Failure> {
        let mut writer = csv::Writer::from_writer(w);
        for row in &rows {
            writer.serialize(row).map_err(|e| Failure {
                code: EXIT_INPUT,
                message: e.to_string(),
            })?;
        }
        writer.flush().map_err(|e| Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        })
    };
    if let Some(path) = csv_path {
        let mut file = std::fs::File::create(path).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
        write_csv(&mut file)?;
    }
    if ctx.structured() {
        ctx.emit_json(&SweepOutput {
            mode: ctx.config.mode,
            rows: &rows,
            disagreements,
        });
    } else if csv_path.is_none() {
        write_csv(&mut *ctx.out)?;
    } else {
        let useful = rows.iter().filter(|r| r.useful_oracle).count();
        let _ = writeln!(
            ctx.out,
            "{} samples, {useful} useful, {disagreements} disagreements",
            rows.len()
        );
    }
    if disagreements > 0 {
        return Err(Failure {
            code: EXIT_INCONSISTENT,
            message: format!("{disagreements} oracle/theorem disagreements"),
        });
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
            std::iter::once("catalysis").chain(args.iter().copied()),
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
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.mode, ArithmeticMode::Exact);
        assert_eq!(c.format, OutputFormat::Human);
        assert_eq!(c.seed, 0);
        assert_eq!(c.theta, crate::probvec::rat(1, 1000));
        assert_eq!((c.resolution, c.dmax), (50, 4));
    }

    #[test]
    fn bad_vector_is_input_error() {
        let (code, _, err) = run_args(&["prob", "0.5,abc", "0.5,0.5"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("cannot parse"));
        let (code, _, _) = run_args(&["prob", "0.5,0.6,-0.1", "1"]);
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn strict_rejects_unnormalized() {
        let (code, _, err) = run_args(&["--strict", "prob", "1,1", "1"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("sum to 2"));
        let (code, out, err) = run_args(&["prob", "1,1", "1"]);
        assert_eq!(code, EXIT_OK);
        assert!(err.contains("warning"));
        assert!(out.contains("P = 1"));
    }

    #[test]
    fn unknown_command_is_input_error() {
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn theorem_verdict_cases() {
        let a = TransformPair::parse("0.6,0.2,0.2", "0.5,0.4,0.1").unwrap();
        let c2 = ProbVec::parse("0.65,0.35").unwrap();
        assert_eq!(theorem_verdict(&a, &c2), Some(true));
        assert_eq!(theorem_verdict(&a, &ProbVec::uniform(3)), None);
        let none = TransformPair::parse("0.7,0.2,0.1", "0.4,0.3,0.3").unwrap();
        assert_eq!(theorem_verdict(&none, &ProbVec::uniform(3)), Some(false));
    }
}
