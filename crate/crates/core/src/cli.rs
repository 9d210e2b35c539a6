//! Command-line frontend.
//!
//! Exit codes: 0 verified, 1 refuted (witness printed), 2 invalid input,
//! 3 inconclusive.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::catalog::Catalog;
use crate::constructor::{self, emit_family};
use crate::criteria::{self, is_integral_ratio, Monotonicity, RatioVerdict};
use crate::error::{Error, Result};
use crate::family::{
    verify_family_exact, verify_family_sampled, AffineList, Constraint, FamilyVerdict,
};
use crate::list::IntList;
use crate::rat::Rat;
use crate::reducibility::{self, Conclusion};
use crate::small_norm;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fratio", version, about = "Integral factorial ratios")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for sweeps and catalog runs.
    #[arg(long, global = true, env = "FRATIO_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Landau test of a list, e.g. "30,1,-15,-10,-6".
    Check {
        #[arg(allow_hyphen_values = true)]
        list: String,
        /// Also check the factorial ratio directly for n up to this value.
        #[arg(long)]
        oracle: Option<u64>,
    },
    /// Exact norm of a list.
    Norm {
        #[arg(allow_hyphen_values = true)]
        list: String,
    },
    /// Whether the floor sum of a list is monotone.
    Monotone {
        #[arg(allow_hyphen_values = true)]
        list: String,
    },
    /// Builds the two-parameter family from lists `a` and `b`.
    Construct {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Verifies a family such as "6a,b,-2a,-3a,-6b,-(a-5b)".
    VerifyFamily(VerifyFamilyArgs),
    /// Searches for a split into two height-1 integral lists.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        list: String,
        /// Largest cancelling value tried; defaults to the largest entry.
        #[arg(long)]
        cancel_bound: Option<i64>,
        #[arg(long, default_value_t = 2)]
        max_pairs: usize,
    },
    /// Certifies irreducibility of a height-2 list from residues mod a prime.
    Certify {
        #[arg(allow_hyphen_values = true)]
        list: String,
        /// Prime to use; by default every prime from 11 to the largest entry.
        #[arg(long)]
        prime: Option<i64>,
    },
    /// Verifies the embedded catalog.
    VerifyCatalog {
        /// Scope to verify, or "all".
        #[arg(long, default_value = "all")]
        scope: String,
        /// Print every check, not only failures.
        #[arg(long)]
        verbose: bool,
    },
    /// Lists every primitive list of small norm in a box.
    Enumerate {
        #[arg(long, default_value_t = 5)]
        max_len: usize,
        #[arg(long, default_value_t = 18)]
        bound: i64,
        /// Strict upper bound on the norm.
        #[arg(long, default_value = "31/180")]
        below: String,
    },
}

#[derive(Args, Debug)]
struct VerifyFamilyArgs {
    #[arg(allow_hyphen_values = true)]
    family: String,
    /// Claimed height; by default taken from a generic instance.
    #[arg(long)]
    height: Option<i64>,
    /// Sample instances with parameters up to this bound instead of the
    /// exact sweep.
    #[arg(long)]
    sampled: Option<i64>,
    /// Factorial oracle depth for sampled runs.
    #[arg(long, default_value_t = 30)]
    oracle: u64,
    /// Restrict sampled parameters to positive values.
    #[arg(long)]
    positive: bool,
}

/// Runs the CLI on `args` (program name first), printing to stdout.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    run_with(args, &mut out)
}

/// As [`run`], writing the report to `out`. Usage errors go to stderr.
pub fn run_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let json = cli.json;
    let outcome = pool.install(|| dispatch(cli.command));
    match outcome {
        Ok(rep) => {
            let text = if json {
                serde_json::to_string_pretty(&rep.json).unwrap_or_default()
            } else {
                rep.text
            };
            let _ = writeln!(out, "{}", text.trim_end());
            rep.code
        }
        Err(e) => {
            if json {
                let v = json!({"status": "invalid_input", "error": e.to_string()});
                let _ = writeln!(out, "{v}");
            }
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

struct Report {
    code: i32,
    text: String,
    json: serde_json::Value,
}

impl Report {
    fn new(code: i32, text: String, json: impl Serialize) -> Report {
        Report {
            code,
            text,
            json: serde_json::to_value(json).unwrap_or_default(),
        }
    }
}

fn braces(v: &[i64]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn dispatch(cmd: Command) -> Result<Report> {
    match cmd {
        Command::Check { list, oracle } => check(&list, oracle),
        Command::Norm { list } => norm(&list),
        Command::Monotone { list } => monotone(&list),
        Command::Construct { a, b } => construct(&a, &b),
        Command::VerifyFamily(args) => verify_family(args),
        Command::Reduce {
            list,
            cancel_bound,
            max_pairs,
        } => reduce(&list, cancel_bound, max_pairs),
        Command::Certify { list, prime } => certify(&list, prime),
        Command::VerifyCatalog { scope, verbose } => verify_catalog(&scope, verbose),
        Command::Enumerate {
            max_len,
            bound,
            below,
        } => enumerate(max_len, bound, &below),
    }
}

fn check(text: &str, oracle: Option<u64>) -> Result<Report> {
    let list: IntList = text.parse()?;
    let verdict = is_integral_ratio(&list);
    let oracle = match (oracle, &verdict) {
        (Some(n), RatioVerdict::Integral { .. } | RatioVerdict::NotIntegral { .. }) => {
            Some(criteria::factorial_oracle(&list, n)?)
        }
        _ => None,
    };
    let (code, mut text) = match &verdict {
        RatioVerdict::Integral {
            height,
            value_range,
        } => (
            EXIT_PASS,
            format!(
                "Integral, height {height}\nvalue range {}",
                braces(value_range)
            ),
        ),
        RatioVerdict::NotIntegral {
            witness_x, value, ..
        } => (
            EXIT_REFUTED,
            format!("Not integral: floor sum {value} at x = {witness_x}"),
        ),
        RatioVerdict::Invalid { reason } => (EXIT_INVALID, format!("Invalid: {reason}")),
    };
    let mut code = code;
    if let Some(o) = &oracle {
        match o.first_failure {
            None => text.push_str(&format!(
                "\nfactorial ratio is an integer for n <= {}",
                o.checked
            )),
            Some(n) => text.push_str(&format!("\nfactorial ratio is not an integer at n = {n}")),
        }
        if o.integral != verdict.is_integral() {
            // the two tests disagree only if the oracle stopped too early
            code = code.max(EXIT_REFUTED);
        }
    }
    Ok(Report::new(
        code,
        text,
        json!({"list": list, "verdict": verdict, "oracle": oracle}),
    ))
}

fn norm(text: &str) -> Result<Report> {
    let list: IntList = text.parse()?;
    let n = criteria::norm(&list)?;
    let text = format!("{n}");
    Ok(Report::new(
        EXIT_PASS,
        text,
        json!({"list": list, "norm": n, "approx": n.to_f64()}),
    ))
}

fn monotone(text: &str) -> Result<Report> {
    let list: IntList = text.parse()?;
    let m = criteria::monotonicity(&list)?;
    let (code, text) = match m {
        Monotonicity::Neither => (EXIT_REFUTED, "Not monotone".to_string()),
        Monotonicity::Increasing => (EXIT_PASS, "Monotone, increasing".to_string()),
        Monotonicity::Decreasing => (EXIT_PASS, "Monotone, decreasing".to_string()),
        Monotonicity::Constant => (EXIT_PASS, "Monotone, constant".to_string()),
    };
    Ok(Report::new(
        code,
        text,
        json!({"list": list, "monotone": m != Monotonicity::Neither, "direction": m}),
    ))
}

fn construct(a: &str, b: &str) -> Result<Report> {
    let (a, b): (IntList, IntList) = (a.parse()?, b.parse()?);
    let t = constructor::build_input(&a, &b)?;
    let f = emit_family(&t);
    let verdict = verify_family_exact(&f)?;
    let checks = constructor::proof_checks(&t)?;
    let ok = verdict.passed() && checks.all_hold();
    let text = format!(
        "sums u = {}, v = {}\nbase {} of height {}\nfamily {} of height {}\n{}\nproof checks: base {}, shifted {}, plane {}",
        t.u(),
        t.v(),
        t.base(),
        t.base_height(),
        f.to_shorthand(),
        t.base_height() + 1,
        family_line(&verdict),
        checks.base_bound,
        checks.shifted_bound,
        checks.plane_bound,
    );
    Ok(Report::new(
        if ok { EXIT_PASS } else { EXIT_REFUTED },
        text,
        json!({
            "input": t,
            "family": f.to_shorthand(),
            "height": t.base_height() + 1,
            "verdict": verdict,
            "proof_checks": checks,
        }),
    ))
}

fn family_line(v: &FamilyVerdict) -> String {
    match v {
        FamilyVerdict::VerifiedExact {
            height,
            min,
            max,
            points,
        } => format!(
            "Verified exactly: height {height}, values in [{min}, {max}] over {points} points"
        ),
        FamilyVerdict::VerifiedSampled { bound, instances } => {
            format!("Verified by sampling: {instances} instances with parameters <= {bound}")
        }
        FamilyVerdict::Fails { x, y, value } => {
            format!("Fails: shifted sum {value} at (x, y) = ({x}, {y})")
        }
        FamilyVerdict::FailsInstance {
            params,
            list,
            n,
            witness_x,
        } => {
            let mut s = format!("Fails at parameters {params:?}: {list}");
            if let Some(x) = witness_x {
                s.push_str(&format!(", floor sum negative at x = {x}"));
            }
            if let Some(n) = n {
                s.push_str(&format!(", not an integer at n = {n}"));
            }
            s
        }
    }
}

fn verify_family(args: VerifyFamilyArgs) -> Result<Report> {
    let mut f = AffineList::parse_shorthand(&args.family)?;
    if args.positive {
        let d = f.dim();
        let cs = (0..d)
            .map(|i| Constraint::positive((0..d).map(|j| (i == j) as i64).collect()))
            .collect();
        f = f.with_constraints(cs)?;
    }
    if args.height.is_some() {
        f = f.with_height(args.height)?;
    }
    let verdict = match args.sampled {
        Some(bound) => verify_family_sampled(&f, bound, args.oracle)?,
        None => verify_family_exact(&f)?,
    };
    let code = if verdict.passed() {
        EXIT_PASS
    } else {
        EXIT_REFUTED
    };
    Ok(Report::new(
        code,
        family_line(&verdict),
        json!({"family": f.to_shorthand(), "verdict": verdict}),
    ))
}

fn reduce(text: &str, cancel_bound: Option<i64>, max_pairs: usize) -> Result<Report> {
    let list: IntList = text.parse()?;
    let bound = cancel_bound.unwrap_or(list.max_abs() as i64);
    let found = reducibility::search_decomposition(&list, bound, max_pairs)?;
    let (code, text) = match &found {
        Some(d) => {
            let mut s = format!("Reducible: {} + {}", d.b, d.c);
            if !d.canceled.is_empty() {
                s.push_str(&format!(
                    ", cancelling {}",
                    braces(&d.canceled.iter().map(|&v| v as i64).collect::<Vec<_>>())
                ));
            }
            (EXIT_PASS, s)
        }
        None => (
            EXIT_INCONCLUSIVE,
            format!(
                "No split found with cancelling values <= {bound} and at most {max_pairs} pairs"
            ),
        ),
    };
    Ok(Report::new(
        code,
        text,
        json!({"list": list, "decomposition": found}),
    ))
}

fn certify(text: &str, prime: Option<i64>) -> Result<Report> {
    let list: IntList = text.parse()?;
    let cert = match prime {
        Some(p) => Some(reducibility::certify_irreducible(&list, p)?),
        None => reducibility::certify_with_any_prime(&list)?,
    };
    let (code, text) = match &cert {
        Some(c) if c.conclusion == Conclusion::Irreducible => {
            (EXIT_PASS, format!("Irreducible, certified with p = {}", c.p))
        }
        Some(c) => (
            EXIT_INCONCLUSIVE,
            format!(
                "Inconclusive with p = {}: divisibility {}, sporadic cases {:?}, two-family cases {:?}",
                c.p, c.lemma61, c.cases62, c.cases63
            ),
        ),
        None => (
            EXIT_INCONCLUSIVE,
            "Inconclusive: no prime from 11 to the largest entry certifies".to_string(),
        ),
    };
    Ok(Report::new(
        code,
        text,
        json!({"list": list, "certificate": cert}),
    ))
}

fn verify_catalog(scope: &str, verbose: bool) -> Result<Report> {
    let report = Catalog::embedded().verify(scope)?;
    let mut text = String::new();
    for e in &report.entries {
        let mark = match (e.passed, e.flagged) {
            (true, false) => "ok",
            (true, true) => "ok (corrected)",
            (false, _) => "FAILED",
        };
        text.push_str(&format!("{:<28} {mark}\n", e.id));
        for c in &e.checks {
            if verbose || !c.passed {
                text.push_str(&format!(
                    "    {} {}: {}\n",
                    if c.passed { "ok" } else { "FAILED" },
                    c.name,
                    c.detail
                ));
            }
        }
    }
    text.push_str(&format!(
        "{} entries: {} passed, {} failed, {} carry corrections",
        report.total, report.passed, report.failed, report.flagged
    ));
    let code = if report.all_passed() {
        EXIT_PASS
    } else {
        EXIT_REFUTED
    };
    Ok(Report::new(code, text, report))
}

fn enumerate(max_len: usize, bound: i64, below: &str) -> Result<Report> {
    let below: Rat = below.parse()?;
    if max_len > 8 {
        return Err(Error::Precondition(
            "enumeration supports lengths up to 8".into(),
        ));
    }
    let listed = Catalog::embedded().small_norm_lists();
    let report = small_norm::enumerate_small_norm(max_len, bound, &below, &listed)?;
    let mut text = String::new();
    for h in &report.hits {
        let shape = match &h.shape {
            Some(s) => serde_json::to_value(s)
                .ok()
                .and_then(|v| {
                    let tag = v["shape"].as_str()?.to_string();
                    Some(match v.get("id").and_then(|i| i.as_str()) {
                        Some(id) => format!("{tag} {id}"),
                        None => tag,
                    })
                })
                .unwrap_or_default(),
            None => "EXCEPTION".to_string(),
        };
        text.push_str(&format!(
            "{:<24} {:<8} {shape}\n",
            h.list.to_text(),
            h.norm.to_string()
        ));
    }
    let exceptions = report.exceptions().len();
    text.push_str(&format!(
        "{} lists examined, {} below {}, {exceptions} exceptions",
        report.examined,
        report.hits.len(),
        report.below
    ));
    let code = if exceptions == 0 {
        EXIT_PASS
    } else {
        EXIT_REFUTED
    };
    Ok(Report::new(code, text, report))
}
