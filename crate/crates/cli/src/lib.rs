//! `rs1c`: check, evaluate, measure, probe and audit rs1 programs.
//!
//! Exit status: 0 on success, 1 on type, evaluation or audit failure, 2 on
//! usage or parse errors. Text output is deterministic for a given input.

mod repl;
pub mod report;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rs1::eval::{render_value, EvalConfig, EvalError, Heap, MemoPolicy, DEFAULT_FUEL};
use rs1::metrics::{apparent_size, audit_growth, is_rank0_codata, observed_size, AuditError, AuditMetric, GrowthAudit};
use rs1::surface::{pretty_term, PrettyOptions};
use rs1::typesys::{check_fragment, Mode, Name, Ty};
use rs1::{compile, Compiled, Error};

use report::{AuditSummary, CostReport, ErrorReport, FragmentSummary, Report};

/// Longest value rendering printed before truncation.
const RENDER_LIMIT: usize = 100_000;

#[derive(Parser, Debug)]
#[command(name = "rs1c", version, about = "Type-check, run and measure safe/normal recursion programs")]
struct Cli {
    /// Language level: s- (classical, data), rs- (ramified, data), s, rs.
    #[arg(long, global = true, default_value = "rs")]
    mode: Mode,
    /// Evaluation step limit.
    #[arg(long, global = true, env = "RS1C_FUEL", default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Metric {
    Size,
    Steps,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the type of the program body.
    Check { input: String },
    /// Evaluate the program body and print its value.
    Eval { input: String },
    /// Evaluate and print the apparent size of the result.
    Size { input: String },
    /// Evaluate a rank-0 codata result and print its observed size at a depth.
    Osize {
        #[arg(long)]
        depth: u64,
        /// Probe a copy of the heap, leaving the program's thunks unforced.
        #[arg(long)]
        pristine: bool,
        input: String,
    },
    /// Check a family `nat -> T` against the bound coeff * (n+1)^degree.
    Audit {
        #[arg(long)]
        degree: u32,
        /// Positive rational, `p` or `p/q`.
        #[arg(long)]
        coeff: String,
        /// `a..b` (inclusive) or a comma-separated list.
        #[arg(long, default_value = "1..10")]
        samples: String,
        #[arg(long, value_enum, default_value_t = Metric::Size)]
        metric: Metric,
        input: String,
    },
    /// Interactive session with persistent declarations and heap.
    Repl,
    /// Check that every type in the derivation uses only the given base types.
    Fragment {
        #[arg(long, value_delimiter = ',', required = true)]
        allow: Vec<String>,
        input: String,
    },
}

/// A failed command: the report to print and the exit status.
#[derive(Debug)]
pub(crate) struct Failure {
    exit: u8,
    error: ErrorReport,
}

impl Failure {
    fn new(exit: u8, stage: &str, code: &str, message: impl Into<String>) -> Failure {
        Failure {
            exit,
            error: ErrorReport { stage: stage.into(), code: code.into(), message: message.into(), line: None, col: None },
        }
    }

    fn usage(code: &str, message: impl Into<String>) -> Failure {
        Failure::new(2, "usage", code, message)
    }

    fn eval(e: &EvalError) -> Failure {
        Failure::new(1, "evaluation", e.code(), e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let (exit, stage, span) = match &e {
            Error::Parse(p) => (2, "parse", Some(p.span())),
            Error::Elab(d) => (1, "declaration", d.span),
            Error::Type(t) => (1, "type", t.span),
            Error::Eval(_) => (1, "evaluation", None),
        };
        let message = match &e {
            Error::Parse(x) => x.to_string(),
            Error::Elab(x) => x.to_string(),
            Error::Type(x) => x.to_string(),
            Error::Eval(x) => x.to_string(),
        };
        let mut f = Failure::new(exit, stage, e.code(), message);
        f.error.line = span.map(|s| s.line);
        f.error.col = span.map(|s| s.col);
        f
    }
}

impl From<AuditError> for Failure {
    fn from(e: AuditError) -> Failure {
        Failure::new(1, "audit", e.code(), e.to_string())
    }
}

/// Successful output of one command.
pub(crate) struct Outcome {
    report: Report,
    text: String,
    exit: u8,
}

/// Run the command line `args` (program name first) and return the exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let to_stdout = !e.use_stderr();
            let text = e.render().to_string();
            let _ = if to_stdout { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return if to_stdout { 0 } else { 2 };
        }
    };
    let config = EvalConfig { fuel: cli.fuel, memo: MemoPolicy::Branching };
    let json = cli.format == Format::Json;
    if let Command::Repl = cli.command {
        return repl::run(cli.mode, config, json, stdin, stdout);
    }
    let name = command_name(&cli.command);
    let result = load(&cli.command, stdin).and_then(|src| execute(&cli.command, &src, cli.mode, config));
    let (report, text, exit) = match result {
        Ok(o) => (o.report, Some(o.text), o.exit),
        Err(f) => {
            let mut r = Report::new(name, &cli.mode.to_string());
            r.ok = false;
            let _ = writeln!(stderr, "error[{}]: {}", f.error.code, f.error.message);
            r.error = Some(f.error);
            (r, None, f.exit)
        }
    };
    let written = if json {
        serde_json::to_string(&report).map_err(std::io::Error::other).and_then(|s| writeln!(stdout, "{s}"))
    } else {
        text.map_or(Ok(()), |t| stdout.write_all(t.as_bytes()))
    };
    if written.is_err() {
        return 1;
    }
    exit
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Eval { .. } => "eval",
        Command::Size { .. } => "size",
        Command::Osize { .. } => "osize",
        Command::Audit { .. } => "audit",
        Command::Repl => "repl",
        Command::Fragment { .. } => "fragment",
    }
}

/// Read the program: `-` is stdin, an existing path is a file, and
/// anything else is taken as inline source.
fn load(c: &Command, stdin: &mut dyn BufRead) -> Result<String, Failure> {
    let input = match c {
        Command::Check { input }
        | Command::Eval { input }
        | Command::Size { input }
        | Command::Osize { input, .. }
        | Command::Audit { input, .. }
        | Command::Fragment { input, .. } => input,
        Command::Repl => unreachable!("the REPL reads its own input"),
    };
    if input == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(|e| Failure::usage("unreadable-input", e.to_string()))?;
        return Ok(s);
    }
    let path = Path::new(input);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(|e| Failure::usage("unreadable-input", format!("{input}: {e}")));
    }
    if input.ends_with(".rs1") && !input.contains(char::is_whitespace) {
        return Err(Failure::usage("no-such-file", format!("{input}: no such file")));
    }
    Ok(input.clone())
}

fn execute(c: &Command, src: &str, mode: Mode, config: EvalConfig) -> Result<Outcome, Failure> {
    let compiled = compile(src, mode)?;
    let mut report = Report::new(command_name(c), &mode.to_string());
    report.ty = Some(compiled.ty.to_string());
    let ok = |report, text| Ok(Outcome { report, text, exit: 0 });
    match c {
        Command::Check { .. } => {
            let text = format!("{}\n", compiled.ty);
            ok(report, text)
        }
        Command::Eval { .. } => {
            let mut heap = Heap::new();
            let (v, cost) = compiled.run(&mut heap, config).map_err(|e| Failure::eval(&e))?;
            let value = render_value(&heap, &compiled.decls, &v, &compiled.ty, RENDER_LIMIT);
            report.value = Some(value.clone());
            report.cost = Some(CostReport::from(&cost));
            ok(report, format!("{value}\n"))
        }
        Command::Size { .. } => {
            if !compiled.ty.is_ground() {
                return Err(not_ground(&compiled.ty));
            }
            let mut heap = Heap::new();
            let (v, cost) = compiled.run(&mut heap, config).map_err(|e| Failure::eval(&e))?;
            let size = apparent_size(&[v], &heap);
            report.size = Some(size);
            report.cost = Some(CostReport::from(&cost));
            ok(report, format!("{size}\n"))
        }
        Command::Osize { depth, pristine, .. } => {
            if !is_rank0_codata(&compiled.ty, &compiled.decls) {
                return Err(Failure::new(
                    1,
                    "type",
                    "not-rank0-codata",
                    format!("observed size needs a rank-0 codata result, found `{}`", compiled.ty),
                ));
            }
            let mut heap = Heap::new();
            let (v, _) = compiled.run(&mut heap, config).map_err(|e| Failure::eval(&e))?;
            let size = observed_size(&compiled.decls, &mut heap, &v, *depth, config, *pristine)
                .map_err(|e| Failure::eval(&e))?;
            report.size = Some(size);
            report.depth = Some(*depth);
            ok(report, format!("{size}\n"))
        }
        Command::Audit { degree, coeff, samples, metric, .. } => audit(&compiled, report, *degree, coeff, samples, *metric, config),
        Command::Fragment { allow, .. } => fragment(&compiled, report, allow),
        Command::Repl => unreachable!("handled by the caller"),
    }
}

fn not_ground(ty: &Ty) -> Failure {
    Failure::new(1, "type", "not-ground", format!("apparent size needs a ground result, found `{ty}`"))
}

fn parse_coeff(s: &str) -> Result<Ratio<u128>, Failure> {
    let r: Ratio<u128> = s
        .trim()
        .parse()
        .map_err(|_| Failure::usage("bad-coefficient", format!("coefficient `{s}` is not of the form p or p/q")))?;
    if r == Ratio::from_integer(0) {
        return Err(Failure::usage("bad-coefficient", "coefficient must be positive"));
    }
    Ok(r)
}

fn parse_samples(s: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::usage("bad-samples", format!("samples `{s}` must be `a..b` or a comma-separated list"));
    let samples: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if samples.is_empty() {
        return Err(bad());
    }
    Ok(samples)
}

fn audit(
    c: &Compiled,
    mut report: Report,
    degree: u32,
    coeff: &str,
    samples: &str,
    metric: Metric,
    config: EvalConfig,
) -> Result<Outcome, Failure> {
    let a = GrowthAudit {
        samples: parse_samples(samples)?,
        degree,
        coeff: parse_coeff(coeff)?,
        metric: match metric {
            Metric::Size => AuditMetric::Size,
            Metric::Steps => AuditMetric::Steps,
        },
    };
    let r = audit_growth(c, &a, config)?;
    report.ok = r.pass;
    report.audit = Some(AuditSummary::from(&r));
    Ok(Outcome { report, text: r.table(), exit: if r.pass { 0 } else { 1 } })
}

fn fragment(c: &Compiled, mut report: Report, allow: &[String]) -> Result<Outcome, Failure> {
    for b in allow {
        if c.decls.get(b).is_none() {
            return Err(Failure::usage("unknown-type", format!("`{b}` is not a declared type")));
        }
    }
    let allowed: BTreeSet<Name> = allow.iter().map(|b| Name::from(b.as_str())).collect();
    let decls = c.program.decls.clone();
    let f = check_fragment(&c.program.body, &allowed, &c.decls, |t| pretty_term(t, &decls, PrettyOptions::default()))
        .map_err(|e| Failure::from(Error::Type(e)))?;
    report.ok = f.ok;
    let text = if f.ok {
        format!("inside the {{{}}} fragment\n", allow.join(", "))
    } else {
        format!(
            "outside the {{{}}} fragment: `{}` has type {}\n",
            allow.join(", "),
            f.offending_term.as_deref().unwrap_or("?"),
            f.offending_type.as_deref().unwrap_or("?")
        )
    };
    report.fragment = Some(FragmentSummary {
        allowed: allow.to_vec(),
        inside: f.ok,
        offending_term: f.offending_term,
        offending_type: f.offending_type,
    });
    Ok(Outcome { report, text, exit: if f.ok { 0 } else { 1 } })
}
