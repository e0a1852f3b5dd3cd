//! The `integrality` command-line front end.
//!
//! Exit codes: 0 success, 1 mathematical mismatch, 2 usage or parse error,
//! 3 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::brackets::{
    certify_table, expansion_report, export_table, BracketTable, Certification, OddFormExpansion, QTuple, TableEntry,
};
use crate::certify::{certify, spec_hash};
use crate::error::Error;
use crate::report::{render_csv, render_table};
use crate::series::{verify, Identity};
use crate::speclang::{self, run_spec, to_odd_form, OddFormAnalysis, RecurrenceSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "integrality", version, about = "Exact integrality checks for P-recursive sequences")]
pub struct Cli {
    /// More diagnostics on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    /// Worker threads for bracket tables (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the first terms of a recurrence.
    Gen(SpecArgs),
    /// Check a named identity coefficientwise.
    Verify {
        /// One of id3, r2, hg-c0, clausen, bin, inv, conv, ode-g, ode-G, derivation.
        identity: String,
        /// Truncation order (index bound for bin, conv and inv).
        #[arg(long, visible_alias = "order", default_value_t = 40)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Build and certify a bracket table.
    Brackets {
        /// Comma-separated polynomials in t, e.g. "t^3 - 3*t, t".
        tuple: String,
        /// Largest level |m| to build.
        #[arg(long, default_value_t = 4)]
        bound: usize,
        /// Accept polynomials that are not odd.
        #[arg(long)]
        permissive: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Integrality report for a recurrence.
    Certify(SpecArgs),
    /// Rebuild u_n from bracket values and compare with the recursion.
    Expand {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 8)]
        n: u32,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
pub struct SpecArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Output text plus exit code.
struct Outcome {
    text: String,
    code: i32,
}

/// Parses `args` and runs the command, writing to the given streams.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Some(j) = cli.jobs {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let start = Instant::now();
    let (result, out_path) = match &cli.command {
        Command::Gen(a) => (cmd_gen(a), a.out.out.clone()),
        Command::Verify { identity, n, out } => (cmd_verify(identity, *n, out.format), out.out.clone()),
        Command::Brackets {
            tuple,
            bound,
            permissive,
            out,
        } => (cmd_brackets(tuple, *bound, *permissive, out.format, stderr), out.out.clone()),
        Command::Certify(a) => (cmd_certify(a), a.out.out.clone()),
        Command::Expand { spec, n, out } => (cmd_expand(spec, *n, out.format), out.out.clone()),
    };
    let code = match result {
        Ok(outcome) => match emit(&outcome.text, out_path.as_deref(), stdout) {
            Ok(()) => outcome.code,
            Err(f) => {
                let _ = writeln!(stderr, "error: {}", message(&f));
                f.code()
            }
        },
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", message(&f));
            f.code()
        }
    };
    if cli.verbose > 0 {
        let _ = writeln!(stderr, "finished in {:.3}s with exit code {code}", start.elapsed().as_secs_f64());
    }
    code
}

fn message(f: &Failure) -> &str {
    match f {
        Failure::Usage(m) | Failure::Io(m) => m,
    }
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn load_spec(path: &Path) -> Result<RecurrenceSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    speclang::parse(&text).map_err(|e| {
        let sep = if matches!(e, Error::Syntax { .. } | Error::IndexOutOfRange { .. }) { ":" } else { ": " };
        Failure::Usage(format!("{}{sep}{e}", path.display()))
    })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct GenTerm {
    n: usize,
    value: String,
}

#[derive(Serialize)]
struct GenOutput {
    spec_sha256: String,
    seq: String,
    ring: Vec<String>,
    terms: Vec<GenTerm>,
}

fn cmd_gen(a: &SpecArgs) -> Result<Outcome, Failure> {
    let spec = load_spec(&a.spec)?;
    let seq = run_spec(&spec, a.n);
    let terms: Vec<GenTerm> = seq
        .terms
        .iter()
        .enumerate()
        .map(|(n, t)| GenTerm { n, value: t.to_string() })
        .collect();
    let rows: Vec<Vec<String>> = terms.iter().map(|t| vec![t.n.to_string(), t.value.clone()]).collect();
    let text = match a.out.format {
        Format::Json => json(&GenOutput {
            spec_sha256: spec_hash(&spec),
            seq: spec.seq().to_string(),
            ring: spec.ring().names().to_vec(),
            terms,
        }),
        Format::Csv => render_csv(&["n", "value"], &rows),
        Format::Table => render_table(&["n", "value"], &rows),
    };
    Ok(Outcome { text, code: EXIT_OK })
}

fn cmd_verify(name: &str, n: usize, format: Format) -> Result<Outcome, Failure> {
    let identity: Identity = name.parse()?;
    let rec = verify(identity, n)?;
    let code = if rec.passed { EXIT_OK } else { EXIT_MISMATCH };
    let mismatch = rec.first_mismatch.as_ref();
    let row = vec![
        rec.identity.clone(),
        rec.order.to_string(),
        if rec.passed { "pass" } else { "FAIL" }.to_string(),
        mismatch.map(|m| m.index.to_string()).unwrap_or_default(),
        mismatch.map(|m| m.lhs.clone()).unwrap_or_default(),
        mismatch.map(|m| m.rhs.clone()).unwrap_or_default(),
    ];
    let header = ["identity", "order", "result", "first_mismatch", "lhs", "rhs"];
    let text = match format {
        Format::Json => json(&rec),
        Format::Csv => render_csv(&header, &[row]),
        Format::Table => render_table(&header, &[row]),
    };
    Ok(Outcome { text, code })
}

#[derive(Serialize)]
struct BracketOutput<'a> {
    tuple: String,
    bound: usize,
    entries: &'a [TableEntry],
    certification: &'a Certification,
}

fn fmt_m(m: &[u32]) -> String {
    let parts: Vec<String> = m.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

fn cmd_brackets(
    tuple: &str,
    bound: usize,
    permissive: bool,
    format: Format,
    stderr: &mut dyn Write,
) -> Result<Outcome, Failure> {
    let q = QTuple::parse(tuple, permissive).map_err(|e| match e {
        Error::NotOdd(p) => Failure::Usage(format!("{p} is not odd; pass --permissive to build it anyway")),
        other => Failure::from(other),
    })?;
    let mut table = BracketTable::new(q);
    let (entries, cert) = match export_table(&mut table, bound).and_then(|e| Ok((e, certify_table(&mut table, bound)?))) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "certification failed: {e}");
            return Ok(Outcome {
                text: String::new(),
                code: EXIT_MISMATCH,
            });
        }
    };
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|e| vec![fmt_m(&e.m), e.value.clone(), e.v2_defect.to_string()])
        .collect();
    let header = ["m", "value", "v2_defect"];
    let text = match format {
        Format::Json => json(&BracketOutput {
            tuple: cert.tuple.clone(),
            bound,
            entries: &entries,
            certification: &cert,
        }),
        Format::Csv => render_csv(&header, &rows),
        Format::Table => {
            let mut s = render_table(&header, &rows);
            s.push('\n');
            let defects: Vec<String> = cert.levels.iter().map(|l| l.max_v2_defect.to_string()).collect();
            s.push_str(&format!("tuple               {}\n", cert.tuple));
            s.push_str(&format!("power-of-2 denoms   {}\n", if cert.all_two_adic { "yes" } else { "no" }));
            s.push_str(&format!("max defect by level {}\n", defects.join(" ")));
            s.push_str(&format!("fitted slope        {}\n", cert.defect_slope));
            s.push_str(&format!("even total degree   {}\n", if cert.all_even_degree { "yes" } else { "no" }));
            s
        }
    };
    Ok(Outcome { text, code: EXIT_OK })
}

fn cmd_certify(a: &SpecArgs) -> Result<Outcome, Failure> {
    let spec = load_spec(&a.spec)?;
    let report = certify(&spec, a.n);
    let code = if report.critical { EXIT_MISMATCH } else { EXIT_OK };
    let text = match a.out.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(),
    };
    Ok(Outcome { text, code })
}

#[derive(Serialize)]
struct ExpandOutput<'a> {
    report: &'a crate::brackets::ExpansionReport,
    direct: String,
    agree: bool,
}

fn cmd_expand(path: &Path, n: u32, format: Format) -> Result<Outcome, Failure> {
    let spec = load_spec(path)?;
    let form = match to_odd_form(&spec) {
        OddFormAnalysis::Odd(f) => f,
        OddFormAnalysis::NotOdd { offenders, .. } => {
            let parts: Vec<String> = offenders
                .iter()
                .map(|o| format!("p{} has even part {}", o.index, o.even_part))
                .collect();
            return Err(Failure::Usage(format!("no odd form: {}", parts.join("; "))));
        }
        OddFormAnalysis::NotApplicable { lead_power } => {
            return Err(Failure::Usage(format!(
                "no odd form: leading coefficient is n^{lead_power}, expected n"
            )))
        }
    };
    let expansion = OddFormExpansion::new(&form.polys)?;
    let report = expansion_report(&expansion, n)?;
    let direct = run_spec(&spec, n as usize).terms[n as usize].to_string();
    let agree = direct == report.total;
    let code = if agree { EXIT_OK } else { EXIT_MISMATCH };
    let header = ["multiplicities", "bracket", "coefficient", "term"];
    let rows: Vec<Vec<String>> = report
        .contributions
        .iter()
        .map(|c| vec![fmt_m(&c.multiplicities), c.bracket.clone(), c.coefficient.clone(), c.term.clone()])
        .collect();
    let text = match format {
        Format::Json => json(&ExpandOutput {
            report: &report,
            direct,
            agree,
        }),
        Format::Csv => render_csv(&header, &rows),
        Format::Table => {
            let mut s = String::new();
            for a in &report.atoms {
                s.push_str(&format!("atom  {a}\n"));
            }
            s.push('\n');
            s.push_str(&render_table(&header, &rows));
            s.push('\n');
            s.push_str(&format!("sum     {}\n", report.total));
            s.push_str(&format!("direct  {direct}\n"));
            s.push_str(&format!("agree   {}\n", if agree { "yes" } else { "no" }));
            s
        }
    };
    Ok(Outcome { text, code })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["integrality"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn spec_path(name: &str) -> String {
        format!("{}/specs/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    #[test]
    fn gen_small() {
        let (code, out, _) = run_capture(&["gen", "--spec", &spec_path("u-rec1.spec"), "--n", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("-20*b^3 + 160*b^2 + 12*b*c - 240*b - 40*c"), "{out}");
    }

    #[test]
    fn gen_zero_terms() {
        let (code, out, _) = run_capture(&["gen", "--spec", &spec_path("w-rec1.spec"), "--n", "0", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n,value\n0,1\n");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["verify", "bogus"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["brackets", "t^2"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["gen", "--spec", "/nonexistent/x.spec"]).0, EXIT_IO);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn brackets_linear() {
        let (code, out, _) = run_capture(&["brackets", "t", "--bound", "4", "--format", "csv"]);
        assert_eq!(code, 0);
        let values: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
        assert_eq!(values, vec!["1", "1/2", "3/8", "5/16", "35/128"]);
    }

    #[test]
    fn brackets_permissive_failure_is_a_mismatch() {
        let (code, _, err) = run_capture(&["brackets", "t^2, t", "--permissive", "--bound", "3"]);
        assert_eq!(code, EXIT_MISMATCH);
        assert!(err.contains("(1, 1)") || err.contains("[1, 1]"), "{err}");
    }

    #[test]
    fn expand_first_term() {
        let (code, out, _) = run_capture(&["expand", "--spec", &spec_path("u-rec1.spec"), "--n", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("-2*b - 1/2") && out.contains("sum     -2*b"), "{out}");
        let (code, _, err) = run_capture(&["expand", "--spec", &spec_path("w-rec1.spec")]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("-t^2 + b + 1/4"), "{err}");
    }
}
