//! The `umbral` command line. Exit status: 0 on success, 1 when a
//! verification finds a mismatch, 2 on a usage error.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::appell::residue_at_origin;
use crate::arith::{CycQ, HalfInt, QExp};
use crate::fock::{budget_from_env, trace_by_enumeration, trace_by_product};
use crate::series::{JacobiSeries, Window};
use crate::special::{eta, theta1, theta2, theta_mr, ThetaIndex};
use crate::suites::{run_suite, split_window, MismatchRecord, SuiteOutcome, SuiteParams, SUITES};
use crate::umbral::{checked_representatives, h_from_split, lambency, polar_data, split_psi, trace_spec};
use crate::Error;

#[derive(Parser, Debug)]
#[command(name = "umbral", version, about = "Exact q-series for pure D-type umbral moonshine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Function {
    Eta,
    Theta1,
    Theta2,
    #[value(name = "theta_mr", alias = "theta-mr")]
    ThetaMr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Product,
    Enumerate,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expand eta, theta1, theta2 or theta_{m,r}.
    Expand {
        #[arg(long, value_enum)]
        function: Function,
        #[arg(long)]
        m: Option<HalfInt>,
        #[arg(long, allow_hyphen_values = true)]
        r: Option<HalfInt>,
        #[arg(long, allow_hyphen_values = true)]
        qorder: QExp,
        #[arg(long, allow_hyphen_values = true, default_value = "-20")]
        yfloor: HalfInt,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// The graded Fock-space trace of a class, by product or by enumeration.
    Trace {
        #[arg(long)]
        lambency: String,
        #[arg(long)]
        class: String,
        #[arg(long, value_enum, default_value_t = Route::Product)]
        route: Route,
        #[arg(long, allow_hyphen_values = true)]
        qorder: QExp,
        #[arg(long, allow_hyphen_values = true, default_value = "-21/2")]
        yfloor: HalfInt,
        /// State cap for enumeration (default: UMBRAL_BUDGET or 10^7).
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Split psi_g into finite and polar parts and theta-decompose the finite part.
    Split {
        #[arg(long)]
        lambency: String,
        #[arg(long)]
        class: String,
        #[arg(long, allow_hyphen_values = true)]
        qorder: QExp,
        #[arg(long, allow_hyphen_values = true)]
        yfloor: HalfInt,
        /// A lower floor for checking that the residue has stabilised.
        #[arg(long, allow_hyphen_values = true)]
        yfloor2: Option<HalfInt>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Coefficients of the H-series H_{g,2s}.
    HTable {
        #[arg(long)]
        lambency: String,
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 10)]
        terms: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run a verification suite, or `all` of them.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        lambency: Option<String>,
        #[arg(long)]
        m: Option<HalfInt>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        qorder: Option<QExp>,
        #[arg(long, allow_hyphen_values = true)]
        yfloor: Option<HalfInt>,
        #[arg(long, allow_hyphen_values = true)]
        yfloor2: Option<HalfInt>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// How a command ended, short of writing its output.
enum Failure {
    Usage(String),
    Mismatch(Vec<MismatchRecord>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownLambency(_) => Failure::Usage(format!("--lambency: {e}")),
            Error::UnknownClass { .. } => Failure::Usage(format!("--class: {e}")),
            Error::Budget(_) => Failure::Usage(format!("--budget: {e}")),
            Error::Consistency { q, y, expected, found } => Failure::Mismatch(vec![MismatchRecord {
                lambency: String::new(),
                class: String::new(),
                q,
                y,
                expected,
                got: found,
            }]),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the command, writing the
/// artifact to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Mismatch(records)) => {
            for r in &records {
                let _ = writeln!(out, "{}", json!({ "status": "mismatch", "mismatch": r }));
            }
            1
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn check_qorder(q: QExp) -> Outcome {
    if q.is_negative() {
        return Err(usage(format!("--qorder must be non-negative, got {q}")));
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Outcome {
    let s = serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))?;
    writeln!(out, "{s}").map_err(|e| usage(e.to_string()))
}

fn emit_series(out: &mut dyn Write, s: &JacobiSeries, format: Format) -> Outcome {
    match format {
        Format::Json => emit_json(out, s),
        Format::Text => writeln!(out, "{s}").map_err(|e| usage(e.to_string())),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["q", "y", "coefficient"]).map_err(|e| usage(e.to_string()))?;
            for (q, y, c) in s.terms() {
                w.write_record([q.to_string(), y.to_string(), coefficient_text(c)])
                    .map_err(|e| usage(e.to_string()))?;
            }
            w.flush().map_err(|e| usage(e.to_string()))
        }
    }
}

/// A rational coefficient as `p/q` (or an integer), anything else as its
/// JSON serialisation.
fn coefficient_text(c: &CycQ) -> String {
    match c.to_rational() {
        Some(r) => r.to_string(),
        None => serde_json::to_string(c).expect("CycQ serialises"),
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Expand {
            function,
            m,
            r,
            qorder,
            yfloor,
            format,
        } => {
            check_qorder(qorder)?;
            let w = Window::target(qorder, yfloor);
            let s = match function {
                Function::Eta => eta(qorder),
                Function::Theta1 => theta1(w),
                Function::Theta2 => theta2(w),
                Function::ThetaMr => {
                    let m = m.ok_or_else(|| usage("--m is required for theta_mr"))?;
                    let r = r.ok_or_else(|| usage("--r is required for theta_mr"))?;
                    let idx = ThetaIndex::new(m, r).map_err(|e| usage(format!("--m/--r: {e}")))?;
                    theta_mr(idx, w)
                }
            };
            emit_series(out, &s, format)
        }
        Command::Trace {
            lambency: l,
            class,
            route,
            qorder,
            yfloor,
            budget,
            format,
        } => {
            check_qorder(qorder)?;
            let data = lambency(&l)?;
            let spec = trace_spec(&data, data.class(&class)?);
            let w = Window::target(qorder, yfloor);
            let s = match route {
                Route::Product => trace_by_product(&spec, w)?,
                Route::Enumerate => trace_by_enumeration(&spec, w, budget.unwrap_or_else(budget_from_env))?,
            };
            emit_series(out, &s, format)
        }
        Command::Split {
            lambency: l,
            class,
            qorder,
            yfloor,
            yfloor2,
            format,
        } => {
            check_qorder(qorder)?;
            if let Some(f2) = yfloor2 {
                if f2 >= yfloor {
                    return Err(usage(format!("--yfloor2 ({f2}) must lie below --yfloor ({yfloor})")));
                }
            }
            split_command(&l, &class, Window::target(qorder, yfloor), yfloor2, format, out)
        }
        Command::HTable {
            lambency: l,
            class,
            terms,
            format,
        } => h_table(&l, &class, terms, format, out),
        Command::Verify {
            suite,
            lambency,
            m,
            n,
            qorder,
            yfloor,
            yfloor2,
            budget,
            format,
        } => {
            if let Some(q) = qorder {
                check_qorder(q)?;
            }
            if let (Some(a), Some(b)) = (yfloor, yfloor2) {
                if b >= a {
                    return Err(usage(format!("--yfloor2 ({b}) must lie below --yfloor ({a})")));
                }
            }
            let names: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else if let Some(s) = SUITES.iter().find(|s| **s == suite) {
                vec![*s]
            } else {
                return Err(usage(format!("--suite: unknown suite `{suite}`; expected all or one of {}", SUITES.join(", "))));
            };
            let params = SuiteParams {
                qorder,
                yfloor,
                yfloor2,
                m,
                n,
                lambency,
                budget,
            };
            let outcomes = names
                .iter()
                .map(|s| run_suite(s, &params))
                .collect::<crate::Result<Vec<_>>>()?;
            verify_output(&outcomes, format, out)
        }
    }
}

fn verify_output(outcomes: &[SuiteOutcome], format: Format, out: &mut dyn Write) -> Outcome {
    let io = |e: std::io::Error| usage(e.to_string());
    match format {
        Format::Json => emit_json(out, &outcomes)?,
        _ => {
            for o in outcomes {
                let tag = if o.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {}: {}", o.suite, o.summary).map_err(io)?;
                for n in &o.notes {
                    writeln!(out, "  note: {n}").map_err(io)?;
                }
                for m in &o.mismatches {
                    writeln!(out, "  mismatch: {}", json!(m)).map_err(io)?;
                }
            }
        }
    }
    if outcomes.iter().all(|o| o.passed) {
        Ok(())
    } else {
        // the report is already written; exit 1 without repeating it
        Err(Failure::Mismatch(Vec::new()))
    }
}

fn split_command(
    l: &str,
    class: &str,
    w: Window,
    yfloor2: Option<HalfInt>,
    format: Format,
    out: &mut dyn Write,
) -> Outcome {
    let data = lambency(l)?;
    let c = data.class(class)?;
    let s = split_psi(&data, class, w).map_err(|e| match Failure::from(e) {
        Failure::Mismatch(mut v) => {
            for r in &mut v {
                r.lambency = data.label.into();
                r.class = c.name.into();
            }
            Failure::Mismatch(v)
        }
        other => other,
    })?;
    let residue = match yfloor2 {
        Some(f2) => {
            let deeper = c.closed_form.evaluate(Window { yfloor: Some(f2), ..w })?;
            let shallow = s.finite.add(&s.polar);
            Some(residue_at_origin(&shallow, &deeper)?.to_string())
        }
        None => None,
    };
    let reps = checked_representatives(&s);
    let datum = &polar_data(c)[0];
    match format {
        Format::Json => {
            let h: serde_json::Map<String, serde_json::Value> = s
                .coefficients
                .h
                .iter()
                .map(|(r, series)| (r.to_string(), serde_json::to_value(series).expect("series serialise")))
                .collect();
            let representatives: serde_json::Map<String, serde_json::Value> = reps
                .iter()
                .map(|(r, v)| (r.to_string(), json!(v.iter().map(|l| l.to_string()).collect::<Vec<_>>())))
                .collect();
            emit_json(
                out,
                &json!({
                    "lambency": data.label,
                    "class": c.name,
                    "index": data.index().to_string(),
                    "polar": { "point": ["0", "0"], "d": datum.d },
                    "residue": residue,
                    "window": w,
                    "h": h,
                    "representatives": representatives,
                }),
            )
        }
        _ => {
            let io = |e: std::io::Error| usage(e.to_string());
            writeln!(out, "{} {}: index {}, polar datum ((0,0), {})", data.label, c.name, data.index(), datum.d).map_err(io)?;
            if let Some(r) = residue {
                writeln!(out, "residue at the origin: {r}").map_err(io)?;
            }
            for (r, series) in &s.coefficients.h {
                let terms: Vec<String> = series.terms().map(|(q, c)| format!("({c}) q^{q}")).collect();
                writeln!(out, "h[{r}] = {}", terms.join(" + ")).map_err(io)?;
            }
            Ok(())
        }
    }
}

fn h_table(l: &str, class: &str, terms: usize, format: Format, out: &mut dyn Write) -> Outcome {
    let data = lambency(l)?;
    let c = data.class(class)?;
    let m = data.index();
    // enough q-range that every h_s has `terms` exponents past q^-1
    let mut w = split_window(m);
    w.qmax = QExp::int(terms as i64 + m.num2 / 8 + 1);
    let s = split_psi(&data, c.name, w)?;
    let h = h_from_split(&data, &s);
    let mut rows: Vec<(String, String, String)> = Vec::new();
    let mut by_label = serde_json::Map::new();
    for (r, series) in &h {
        // exponents of H_{2s} lie in -s^2/4m + Z; start at the one in (-1, 0]
        let shift = r.to_qexp() * r.to_qexp() * QExp::new(1, 2 * m.num2);
        let start = -shift + QExp::int(shift.floor());
        let mut list = Vec::new();
        for k in 0..terms as i64 {
            let q = start + QExp::int(k);
            if q > series.qmax() {
                break;
            }
            let v = series.coefficient(q)?;
            rows.push((r.num2.to_string(), q.to_string(), coefficient_text(&v)));
            list.push(json!({ "q": q.to_string(), "coeff": v }));
        }
        by_label.insert(r.num2.to_string(), json!(list));
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["r", "q", "coefficient"]).map_err(|e| usage(e.to_string()))?;
            for (a, b, c) in &rows {
                w.write_record([a, b, c]).map_err(|e| usage(e.to_string()))?;
            }
            w.flush().map_err(|e| usage(e.to_string()))
        }
        Format::Json => emit_json(
            out,
            &json!({ "lambency": data.label, "class": c.name, "H": by_label }),
        ),
        Format::Text => {
            for (a, b, c) in &rows {
                writeln!(out, "H[{a}] q^{b}: {c}").map_err(|e| usage(e.to_string()))?;
            }
            Ok(())
        }
    }
}
