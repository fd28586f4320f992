//! The `qvanish` command line.
//!
//! Exit codes: 0 success or verified, 1 a mathematical check failed, 2 usage
//! or parameter error. Every flag can also be written as a bare `key=value`
//! token, so `qvanish expand num=3,5:8 den=1,7:8 order=12` works.

use std::io::Write;
use std::ops::RangeInclusive;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::partitions::{
    count_parity_split, enumerate_restricted, parity_identity_class, signed_sum,
    verify_parity_identity, Partition, RestrictedPartitionSpec, DEFAULT_ENUMERATION_CAP,
};
use crate::products::{
    cancellation_check, expand_product, jtp_theta, verify_1psi1, BilateralSpecialization,
    IdentityCheck, PochhammerFactor, ProductSpec,
};
use crate::series::Sign;
use crate::vanishing::{
    scan, verify_vanishing, AlladiGordonParams, AndrewsBressoudParams, ExtendedParams, Family,
    ScanOutcome, TheoremInstance, VanishingReport, Variant,
};
use crate::Series;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

const AFTER_HELP: &str = "\
Factor syntax: a group `a,b,...:M` stands for (q^a, q^b, ...; q^M)_inf; prefix an
offset with '-' for a negated argument, e.g. `-4,-5:9` is (-q^4, -q^5; q^9)_inf.
`--pre s:e` multiplies by s*q^e, e.g. `--pre -1:-2` is -q^-2.

Example, F(q) = (q^3,q^5;q^8)_inf / (q,q^7;q^8)_inf:
    qvanish expand --num 3,5:8 --den 1,7:8 --order 12";

#[derive(Debug, Parser)]
#[command(
    name = "qvanish",
    version,
    about = "Exact q-series expansion, vanishing-coefficient checks and restricted partitions",
    after_help = AFTER_HELP
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    /// Truncation order: coefficients of q^e are computed for e < order.
    #[arg(long, global = true, env = "QVANISH_ORDER", default_value_t = 1000)]
    order: i64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expand a quotient of q-Pochhammer products.
    Expand(ExpandArgs),
    /// Verify one theorem instance against the exact expansion.
    Verify(VerifyArgs),
    /// Verify every valid tuple of a parameter grid.
    Scan(ScanArgs),
    /// Restricted partition counts and identities.
    #[command(subcommand)]
    Partitions(PartitionsCommand),
    /// Check a series identity by expanding both sides.
    #[command(subcommand)]
    Identity(IdentityCommand),
}

#[derive(Debug, Args)]
struct ExpandArgs {
    /// Numerator factor group, e.g. `3,5:8`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    num: Vec<String>,
    /// Denominator factor group, e.g. `1,7:8`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    den: Vec<String>,
    /// Monomial prefactor `sign:exponent`, e.g. `-1:-2`.
    #[arg(long, allow_hyphen_values = true)]
    pre: Option<String>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// ab | ag | ag-minus | plus | minus (mcl is accepted for plus).
    #[arg(long)]
    family: String,
    /// plus | minus, for the ag and mcl families.
    #[arg(long, default_value = "plus")]
    sign: String,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<i64>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// plus | minus | ab | ag | ag-minus
    #[arg(long)]
    family: String,
    /// Inclusive range `lo..hi` (or a single value).
    #[arg(long, default_value = "2..2")]
    m: String,
    #[arg(long)]
    k: String,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct McParams {
    #[arg(long, allow_negative_numbers = true)]
    m: i64,
    #[arg(long, allow_negative_numbers = true)]
    k: i64,
    #[arg(long, allow_negative_numbers = true)]
    s: i64,
    #[arg(long, allow_negative_numbers = true)]
    t: i64,
}

#[derive(Debug, Args)]
struct SpecArgs {
    #[arg(long)]
    modulus: i64,
    /// Residues whose parts may repeat, comma separated.
    #[arg(long, default_value = "")]
    rep: String,
    /// Residues whose parts must be distinct, comma separated.
    #[arg(long, default_value = "")]
    dist: String,
    #[arg(long)]
    max_part: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Subcommand)]
enum PartitionsCommand {
    /// Number of restricted partitions of n.
    Count {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
    },
    /// List the restricted partitions of n.
    Enumerate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, value_enum)]
        parity: Option<Parity>,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// The signed sum of p_{m,k,r} values at nk - rs.
    SignedSum {
        #[command(flatten)]
        params: McParams,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        /// Print one row per j.
        #[arg(long)]
        show_terms: bool,
    },
    /// Even/odd part-count split (k odd).
    Parity {
        #[command(flatten)]
        params: McParams,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        /// Also list the partitions of each parity.
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Check p^e = p^o along the predicted class up to n-max.
    ParityIdentity {
        #[command(flatten)]
        params: McParams,
        #[arg(long)]
        n_max: i64,
    },
}

#[derive(Debug, Subcommand)]
enum IdentityCommand {
    /// Specialized 1psi1 sum against its product side.
    #[command(name = "1psi1")]
    OnePsiOne {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        t: i64,
        #[arg(long)]
        r: i64,
    },
    /// Theta series against (q^a, q^(M-a), q^M; q^M)_inf.
    Jtp {
        #[arg(long = "modulus", visible_alias = "M")]
        modulus: i64,
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
    },
    /// Term-by-term cancellation of the Lambert sums on the class kn - rs.
    LambertCancel {
        #[command(flatten)]
        params: McParams,
        /// Override r (default sm + t); a mismatched r must fail.
        #[arg(long)]
        r: Option<i64>,
    },
}

/// Rewrites bare `key=value` tokens as `--key=value`.
fn normalize_args<I, S>(args: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    args.into_iter()
        .enumerate()
        .map(|(i, a)| {
            let a: String = a.into();
            let is_pair = i > 0
                && !a.starts_with('-')
                && a.split_once('=').is_some_and(|(k, _)| {
                    !k.is_empty()
                        && k.chars()
                            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
                });
            if is_pair {
                format!("--{a}")
            } else {
                a
            }
        })
        .collect()
}

/// Errors that end a command, with their exit code.
enum Failure {
    Usage(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Runs the CLI on `args` (including the program name), writing to `out`
/// and `err`. Returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let cli = match Cli::try_parse_from(normalize_args(args)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    if cli.order < 1 {
        return Err(Failure::Usage(format!(
            "--order must be >= 1 (got {})",
            cli.order
        )));
    }
    match &cli.command {
        Command::Expand(a) => cmd_expand(a, cli, out),
        Command::Verify(a) => cmd_verify(a, cli, out),
        Command::Scan(a) => cmd_scan(a, cli, out),
        Command::Partitions(p) => cmd_partitions(p, cli.format, out),
        Command::Identity(i) => cmd_identity(i, cli, out),
    }
}

/// Writes a header row and the records through the `csv` writer, which
/// handles quoting.
fn write_csv<R, I>(out: &mut dyn Write, header: &[&str], rows: R) -> std::io::Result<()>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator,
    I::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(std::io::Error::other)?;
    for row in rows {
        w.write_record(row).map_err(std::io::Error::other)?;
    }
    w.flush()
}

fn print_json(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json"))
}

/// Parses a factor group `a,b,...:M`; offsets prefixed with `-` are negated
/// arguments.
pub fn parse_factor_group(text: &str) -> Result<Vec<PochhammerFactor>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let (offsets, modulus) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("'{text}' lacks ':M'")))?;
    let modulus: i64 = modulus
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad modulus in '{text}'")))?;
    offsets
        .split(',')
        .map(|o| {
            let o = o.trim();
            let (sign, digits) = match o.strip_prefix('-') {
                Some(rest) => (Sign::Minus, rest),
                None => (Sign::Plus, o.strip_prefix('+').unwrap_or(o)),
            };
            let a: i64 = digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad offset '{o}' in '{text}'")))?;
            PochhammerFactor::new(sign, a, modulus)
        })
        .collect()
}

/// Parses a prefactor `sign:exponent`.
pub fn parse_prefactor(text: &str) -> Result<(Sign, i64)> {
    let bad = || {
        Error::Parse(format!(
            "prefactor '{text}' must look like 'sign:exponent', e.g. -1:-2"
        ))
    };
    let (s, e) = text.split_once(':').ok_or_else(bad)?;
    let sign = s
        .trim()
        .parse::<i64>()
        .ok()
        .and_then(Sign::from_i64)
        .ok_or_else(bad)?;
    let e = e.trim().parse::<i64>().map_err(|_| bad())?;
    Ok((sign, e))
}

/// Parses `lo..hi`, `lo..=hi` (both inclusive) or a single value.
pub fn parse_range(text: &str) -> Result<RangeInclusive<i64>> {
    let bad = || Error::Parse(format!("bad range '{text}', expected lo..hi"));
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        Ok(lo.trim().parse().map_err(|_| bad())?..=hi.trim().parse().map_err(|_| bad())?)
    } else {
        let v: i64 = text.parse().map_err(|_| bad())?;
        Ok(v..=v)
    }
}

fn parse_residues(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad residue '{s}'")))
        })
        .collect()
}

fn flagged<T>(flag: &str, r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn cmd_expand(a: &ExpandArgs, cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let mut numerator = Vec::new();
    for g in &a.num {
        numerator.extend(flagged("num", parse_factor_group(g))?);
    }
    let mut denominator = Vec::new();
    for g in &a.den {
        denominator.extend(flagged("den", parse_factor_group(g))?);
    }
    let mut spec = ProductSpec::new(numerator, denominator);
    if let Some(p) = &a.pre {
        let (sign, e) = flagged("pre", parse_prefactor(p))?;
        spec = spec.with_prefactor(sign, e);
    }
    let series: Series = expand_product(&spec, cli.order)?;
    match cli.format {
        OutputFormat::Text => {
            writeln!(out, "# {spec}")?;
            for (e, c) in series.iter() {
                writeln!(out, "{e}\t{c}")?;
            }
        }
        OutputFormat::Json => print_json(
            out,
            &json!({
                "spec": spec.to_string(),
                "valuation": series.valuation(),
                "order": series.order(),
                "coefficients": series.iter().map(|(e, c)| json!([e, c.to_string()])).collect::<Vec<_>>(),
            }),
        )?,
        OutputFormat::Csv => write_csv(
            out,
            &["exponent", "coefficient"],
            series.iter().map(|(e, c)| [e.to_string(), c.to_string()]),
        )?,
    }
    Ok(EXIT_OK)
}

fn need(name: &str, v: Option<i64>) -> std::result::Result<i64, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this family")))
}

fn parse_variant(s: &str) -> std::result::Result<Variant, Failure> {
    match s {
        "plus" | "+" => Ok(Variant::Plus),
        "minus" | "-" => Ok(Variant::Minus),
        other => Err(Failure::Usage(format!(
            "--sign: expected plus or minus, got '{other}'"
        ))),
    }
}

fn theorem_from_args(a: &VerifyArgs) -> std::result::Result<TheoremInstance, Failure> {
    let family: Family = flagged("family", a.family.parse())?;
    let variant = parse_variant(&a.sign)?;
    Ok(match family {
        Family::AndrewsBressoud => {
            AndrewsBressoudParams::new(need("k", a.k)?, need("r", a.r)?)?.into()
        }
        Family::AlladiGordon | Family::AlladiGordonMinus => {
            let variant = if family == Family::AlladiGordonMinus {
                Variant::Minus
            } else {
                variant
            };
            AlladiGordonParams::new(need("m", a.m)?, need("k", a.k)?, need("s", a.s)?, variant)?
                .into()
        }
        Family::Plus | Family::Minus => {
            let variant = if family == Family::Minus {
                Variant::Minus
            } else {
                variant
            };
            ExtendedParams::new(
                need("m", a.m)?,
                need("k", a.k)?,
                need("s", a.s)?,
                need("t", a.t)?,
                variant,
            )?
            .into()
        }
    })
}

const REPORT_CSV_HEADER: [&str; 8] = [
    "family",
    "params",
    "r",
    "order",
    "zero_mod",
    "zero_res",
    "violations",
    "observed_zero_classes",
];

fn report_csv_row(r: &VanishingReport) -> [String; 8] {
    let observed: Vec<String> = r
        .observed_zero_classes
        .iter()
        .map(|c| c.to_string())
        .collect();
    [
        r.params.family_name().to_string(),
        r.params.to_string(),
        r.params.r().to_string(),
        r.order.to_string(),
        r.zero_class.modulus().to_string(),
        r.zero_class.residue().to_string(),
        r.violation_count.to_string(),
        observed.join(" "),
    ]
}

fn write_report_text(out: &mut dyn Write, r: &VanishingReport) -> std::io::Result<()> {
    writeln!(out, "family: {}", r.params.family_name())?;
    writeln!(out, "params: {}  r={}", r.params, r.params.r())?;
    writeln!(out, "product: {}", r.spec)?;
    writeln!(out, "order: {}", r.order)?;
    writeln!(out, "zero class: {}", r.zero_class)?;
    if r.verified() {
        writeln!(out, "violations: none")?;
    } else {
        let shown: Vec<String> = r
            .violations
            .iter()
            .map(|(e, c)| format!("q^{e}: {c}"))
            .collect();
        writeln!(
            out,
            "violations: {} (first: {})",
            r.violation_count,
            shown.join(", ")
        )?;
    }
    let observed: Vec<String> = r
        .observed_zero_classes
        .iter()
        .map(|c| c.to_string())
        .collect();
    writeln!(
        out,
        "observed zero classes: {}",
        if observed.is_empty() {
            "none".into()
        } else {
            observed.join(", ")
        }
    )?;
    writeln!(
        out,
        "{}",
        if r.verified() { "VERIFIED" } else { "VIOLATED" }
    )
}

fn cmd_verify(a: &VerifyArgs, cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let params = theorem_from_args(a)?;
    let report = verify_vanishing(&params, cli.order)?;
    match cli.format {
        OutputFormat::Text => write_report_text(out, &report)?,
        OutputFormat::Json => print_json(out, &report.to_json())?,
        OutputFormat::Csv => write_csv(out, &REPORT_CSV_HEADER, [report_csv_row(&report)])?,
    }
    Ok(if report.verified() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_scan(a: &ScanArgs, cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let family: Family = flagged("family", a.family.parse())?;
    let ms = flagged("m", parse_range(&a.m))?;
    let ks = flagged("k", parse_range(&a.k))?;
    let run = || scan(family, ks.clone(), ms.clone(), cli.order);
    let outcome: ScanOutcome = match a.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Failure::Usage(format!("--jobs: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let violated = outcome.violated();
    match cli.format {
        OutputFormat::Text => {
            for r in &outcome.reports {
                writeln!(
                    out,
                    "{:<9} {:<22} zero class {:<8} {}",
                    r.params.family_name(),
                    r.params.to_string(),
                    r.zero_class.to_string(),
                    if r.verified() {
                        "ok".to_string()
                    } else {
                        format!("VIOLATED ({})", r.violation_count)
                    }
                )?;
            }
            writeln!(
                out,
                "{} tuples checked, {} skipped, {} violated (order {})",
                outcome.reports.len(),
                outcome.skipped.len(),
                violated,
                cli.order
            )?;
        }
        OutputFormat::Json => print_json(
            out,
            &json!({
                "family": a.family,
                "order": cli.order,
                "checked": outcome.reports.len(),
                "skipped": outcome.skipped,
                "violated": violated,
                "reports": outcome.reports.iter().map(VanishingReport::to_json).collect::<Vec<_>>(),
            }),
        )?,
        OutputFormat::Csv => write_csv(
            out,
            &REPORT_CSV_HEADER,
            outcome.reports.iter().map(report_csv_row),
        )?,
    }
    Ok(if violated == 0 {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn spec_from_args(a: &SpecArgs) -> std::result::Result<RestrictedPartitionSpec, Failure> {
    let rep = flagged("rep", parse_residues(&a.rep))?;
    let dist = flagged("dist", parse_residues(&a.dist))?;
    let spec = RestrictedPartitionSpec::new(a.modulus, rep, dist)?;
    Ok(match a.max_part {
        Some(b) => spec.with_max_part(b),
        None => spec,
    })
}

fn partition_json(p: &Partition) -> Value {
    json!(p.multiplicities())
}

fn parity_name(p: &Partition) -> &'static str {
    if p.has_even_part_count() {
        "even"
    } else {
        "odd"
    }
}

fn cmd_partitions(cmd: &PartitionsCommand, format: OutputFormat, out: &mut dyn Write) -> CmdResult {
    match cmd {
        PartitionsCommand::Count { spec, n } => {
            if *n < 0 {
                return Err(Failure::Usage(format!("--n must be >= 0 (got {n})")));
            }
            let s = spec_from_args(spec)?;
            let c = crate::partitions::count_restricted(&s, *n);
            match format {
                OutputFormat::Text => writeln!(out, "{c}")?,
                OutputFormat::Json => print_json(
                    out,
                    &json!({
                        "modulus": s.modulus(),
                        "repeatable": s.repeatable(),
                        "distinct": s.distinct(),
                        "n": n,
                        "count": c.to_string(),
                    }),
                )?,
                OutputFormat::Csv => {
                    write_csv(out, &["n", "count"], [[n.to_string(), c.to_string()]])?
                }
            }
            Ok(EXIT_OK)
        }
        PartitionsCommand::Enumerate {
            spec,
            n,
            parity,
            cap,
        } => {
            let s = spec_from_args(spec)?;
            let list: Vec<Partition> = enumerate_restricted(&s, *n, *cap)?
                .into_iter()
                .filter(|p| match parity {
                    Some(Parity::Even) => p.has_even_part_count(),
                    Some(Parity::Odd) => !p.has_even_part_count(),
                    None => true,
                })
                .collect();
            write_partition_list(out, format, *n, &list)?;
            Ok(EXIT_OK)
        }
        PartitionsCommand::SignedSum {
            params,
            n,
            show_terms,
        } => {
            let sum = signed_sum(params.m, params.k, params.s, params.t, *n)?;
            match format {
                OutputFormat::Text => {
                    if *show_terms {
                        writeln!(out, "{:>4} {:>8} {:>16}", "j", "n_j", "(-1)^j p(n_j)")?;
                        for t in &sum.terms {
                            writeln!(out, "{:>4} {:>8} {:>16}", t.j, t.argument, t.signed_count)?;
                        }
                    }
                    writeln!(out, "sum = {}", sum.total)?;
                }
                OutputFormat::Json => print_json(
                    out,
                    &json!({
                        "m": params.m, "k": params.k, "s": params.s, "t": params.t,
                        "r": params.s * params.m + params.t,
                        "n": n,
                        "terms": sum.terms.iter().map(|t| json!({
                            "j": t.j,
                            "argument": t.argument,
                            "signed_count": t.signed_count.to_string(),
                        })).collect::<Vec<_>>(),
                        "total": sum.total.to_string(),
                    }),
                )?,
                OutputFormat::Csv => write_csv(
                    out,
                    &["j", "argument", "signed_count"],
                    sum.terms.iter().map(|t| {
                        [
                            t.j.to_string(),
                            t.argument.to_string(),
                            t.signed_count.to_string(),
                        ]
                    }),
                )?,
            }
            Ok(if sum.total.is_zero() {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            })
        }
        PartitionsCommand::Parity {
            params,
            n,
            enumerate,
            cap,
        } => {
            let pair = count_parity_split(params.m, params.k, params.s, params.t, *n)?;
            let mc = ExtendedParams::new(params.m, params.k, params.s, params.t, Variant::Minus)?;
            let in_class = parity_identity_class(&mc).contains(*n);
            let lists = if *enumerate {
                let spec = RestrictedPartitionSpec::parity_split(&mc)?;
                let all = enumerate_restricted(&spec, *n, *cap)?;
                let (even, odd): (Vec<Partition>, Vec<Partition>) =
                    all.into_iter().partition(|p| p.has_even_part_count());
                Some((even, odd))
            } else {
                None
            };
            match format {
                OutputFormat::Text => {
                    writeln!(out, "even: {}", pair.even_count)?;
                    writeln!(out, "odd: {}", pair.odd_count)?;
                    if let Some((even, odd)) = &lists {
                        writeln!(out, "odd partitions:")?;
                        for p in odd {
                            writeln!(out, "{p}")?;
                        }
                        writeln!(out, "even partitions:")?;
                        for p in even {
                            writeln!(out, "{p}")?;
                        }
                    }
                }
                OutputFormat::Json => {
                    let mut v = json!({
                        "n": n,
                        "in_vanishing_class": in_class,
                        "even": pair.even_count.to_string(),
                        "odd": pair.odd_count.to_string(),
                    });
                    if let Some((even, odd)) = &lists {
                        v["even_partitions"] =
                            json!(even.iter().map(partition_json).collect::<Vec<_>>());
                        v["odd_partitions"] =
                            json!(odd.iter().map(partition_json).collect::<Vec<_>>());
                    }
                    print_json(out, &v)?;
                }
                OutputFormat::Csv => {
                    if let Some((even, odd)) = &lists {
                        write_csv(
                            out,
                            &["partition", "parity"],
                            odd.iter()
                                .chain(even)
                                .map(|p| [p.to_string(), parity_name(p).to_string()]),
                        )?;
                    } else {
                        write_csv(
                            out,
                            &["n", "even", "odd"],
                            [[
                                n.to_string(),
                                pair.even_count.to_string(),
                                pair.odd_count.to_string(),
                            ]],
                        )?;
                    }
                }
            }
            Ok(if in_class && pair.even_count != pair.odd_count {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            })
        }
        PartitionsCommand::ParityIdentity { params, n_max } => {
            let rep = verify_parity_identity(params.m, params.k, params.s, params.t, *n_max)?;
            match format {
                OutputFormat::Text => {
                    writeln!(
                        out,
                        "class: {}  checked: {} (n <= {})",
                        rep.class, rep.checked, rep.n_max
                    )?;
                    for (n, p) in &rep.violations {
                        writeln!(
                            out,
                            "violation at n={n}: even={} odd={}",
                            p.even_count, p.odd_count
                        )?;
                    }
                    writeln!(out, "{}", if rep.holds() { "pass" } else { "FAIL" })?;
                }
                OutputFormat::Json => print_json(
                    out,
                    &json!({
                        "class": rep.class,
                        "n_max": rep.n_max,
                        "checked": rep.checked,
                        "violations": rep.violations.iter().map(|(n, p)| json!([n, p])).collect::<Vec<_>>(),
                    }),
                )?,
                OutputFormat::Csv => write_csv(
                    out,
                    &["class", "n_max", "checked", "violations"],
                    [[
                        rep.class.to_string(),
                        rep.n_max.to_string(),
                        rep.checked.to_string(),
                        rep.violations.len().to_string(),
                    ]],
                )?,
            }
            Ok(if rep.holds() { EXIT_OK } else { EXIT_VIOLATION })
        }
    }
}

fn write_partition_list(
    out: &mut dyn Write,
    format: OutputFormat,
    n: i64,
    list: &[Partition],
) -> std::io::Result<()> {
    match format {
        OutputFormat::Text => {
            for p in list {
                writeln!(out, "{p}")?;
            }
        }
        OutputFormat::Json => print_json(
            out,
            &json!({
                "n": n,
                "partitions": list.iter().map(partition_json).collect::<Vec<_>>(),
            }),
        )?,
        OutputFormat::Csv => write_csv(
            out,
            &["partition", "parts", "parity"],
            list.iter().map(|p| {
                [
                    p.to_string(),
                    p.num_parts().to_string(),
                    parity_name(p).to_string(),
                ]
            }),
        )?,
    }
    Ok(())
}

fn cmd_identity(cmd: &IdentityCommand, cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let order = cli.order;
    let (name, check) = match cmd {
        IdentityCommand::OnePsiOne { m, k, t, r } => {
            let p = BilateralSpecialization::new(*m, *k, *t, *r)?;
            ("1psi1", verify_1psi1(&p, order)?)
        }
        IdentityCommand::Jtp { modulus, a } => {
            if !(1..*modulus).contains(a) {
                return Err(Failure::Usage(format!(
                    "jtp needs 1 <= a < M (got a={a}, M={modulus})"
                )));
            }
            let theta: Series = jtp_theta(*modulus, *a, order)?;
            let spec = ProductSpec::new(
                vec![
                    PochhammerFactor::plain(*a, *modulus)?,
                    PochhammerFactor::plain(modulus - a, *modulus)?,
                    PochhammerFactor::plain(*modulus, *modulus)?,
                ],
                vec![],
            );
            let product: Series = expand_product(&spec, order)?;
            ("jtp", IdentityCheck::compare(&theta, &product))
        }
        IdentityCommand::LambertCancel { params, r } => {
            let r = r.unwrap_or(params.s * params.m + params.t);
            let p = BilateralSpecialization::new(params.m, params.k, params.t, r)?;
            ("lambert-cancel", cancellation_check(&p, params.s, order)?)
        }
    };
    match cli.format {
        OutputFormat::Text => match &check.discrepancy {
            None => writeln!(
                out,
                "{name}: pass (checked below q^{})",
                check.checked_below
            )?,
            Some(d) => writeln!(
                out,
                "{name}: FAIL at q^{}: left={} right={}",
                d.exponent, d.left, d.right
            )?,
        },
        OutputFormat::Json => print_json(
            out,
            &json!({
                "identity": name,
                "holds": check.holds,
                "checked_below": check.checked_below,
                "discrepancy": check.discrepancy.as_ref().map(|d| json!({
                    "exponent": d.exponent,
                    "left": d.left.to_string(),
                    "right": d.right.to_string(),
                })),
            }),
        )?,
        OutputFormat::Csv => {
            let (exponent, left, right) = match &check.discrepancy {
                None => Default::default(),
                Some(d) => (
                    d.exponent.to_string(),
                    d.left.to_string(),
                    d.right.to_string(),
                ),
            };
            write_csv(
                out,
                &[
                    "identity",
                    "holds",
                    "checked_below",
                    "exponent",
                    "left",
                    "right",
                ],
                [[
                    name.to_string(),
                    check.holds.to_string(),
                    check.checked_below.to_string(),
                    exponent,
                    left,
                    right,
                ]],
            )?
        }
    }
    Ok(if check.holds { EXIT_OK } else { EXIT_VIOLATION })
}
