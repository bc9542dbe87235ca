//! Command-line front end.
//!
//! Exit status: 0 when the command succeeded and every verdict it reports
//! is positive, 2 when a verdict failed, 1 on usage or other errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::coefficients::{a_closed_form, a_recurrence, check_distinct};
use crate::constraints::{build, build_full, build_reduced, ball_first_order, probe_basis_integrality, probe_ordering_integral, Form};
use crate::enumeration::{enumerate_integer_points, full_group, orbit_count, reduced_group, solutions_report, DEFAULT_BUDGET};
use crate::error::{OapError, Result};
use crate::lp::{verify_all_facets, verify_row, FacetReport, FacetVerdict, DEFAULT_SLACK};
use crate::model::OAParams;
use crate::rational::{format_rational, parse_rational};
use crate::symmetry::analyze;

#[derive(Parser, Debug)]
#[command(name = "oapkit", version, about = "Linear-programming and symmetry tools for orthogonal arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    /// Worker threads for parallel phases.
    #[arg(long, global = true, env = "OAPKIT_JOBS")]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Full,
    Reduced,
}

impl From<FormArg> for Form {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Full => Form::Full,
            FormArg::Reduced => Form::Reduced,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EnumerateForm {
    Full,
    Reduced,
    Both,
}

#[derive(Args, Debug, Clone, Copy)]
struct ParamArgs {
    /// Number of factors.
    #[arg(long)]
    k: usize,
    /// Number of levels.
    #[arg(long)]
    s: usize,
    /// Strength.
    #[arg(long)]
    t: usize,
    /// Index.
    #[arg(long, default_value_t = 1)]
    lambda: u64,
}

impl ParamArgs {
    fn params(&self) -> Result<OAParams> {
        OAParams::new(self.k, self.s, self.t, self.lambda)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the right-hand-side sequence a_0..a_t.
    Ac {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Build a constraint matrix.
    Build {
        #[arg(long, value_enum)]
        form: FormArg,
        #[command(flatten)]
        params: ParamArgs,
        /// Write the matrix here instead of standard output.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Certify that every distinct reduced inequality is a facet.
    Facets {
        #[command(flatten)]
        params: ParamArgs,
        /// Margin required on every other inequality, as NUM/DEN.
        #[arg(long, default_value = DEFAULT_SLACK)]
        slack: String,
        /// Only check this row index.
        #[arg(long)]
        row: Option<usize>,
    },
    /// Compute the column symmetry group of a formulation.
    Symmetry {
        #[arg(long, value_enum)]
        form: FormArg,
        #[command(flatten)]
        params: ParamArgs,
        /// Cross-check against all permutations of the columns.
        #[arg(long)]
        brute_force: bool,
    },
    /// Enumerate integer solutions.
    Enumerate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = EnumerateForm::Both)]
        form: EnumerateForm,
        /// Count solutions up to symmetry.
        #[arg(long)]
        orbits: bool,
        /// Search node limit.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Estimate how often random column orders eliminate integrally.
    Probe {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Machine-readable record of one invocation.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub params: OAParams,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: String,
    /// Wall-clock milliseconds per phase.
    pub timings: BTreeMap<String, f64>,
}

struct Outcome {
    report: RunReport,
    text: String,
    ok: bool,
}

struct Timer(BTreeMap<String, f64>);

impl Timer {
    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.insert(phase.to_owned(), start.elapsed().as_secs_f64() * 1000.0);
        out
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn run_command(cmd: &Command, format: OutputFormat) -> Result<Outcome> {
    let mut timer = Timer(BTreeMap::new());
    let report = |command: &str, params: OAParams, results: Value, seed: Option<u64>, timer: Timer| RunReport {
        command: command.to_owned(),
        params,
        results,
        seed,
        version: env!("CARGO_PKG_VERSION").to_owned(),
        timings: timer.0,
    };
    match cmd {
        Command::Ac { params } => {
            let params = params.params()?;
            let seq = timer.time("recurrence", || a_recurrence(&params));
            let closed = if params.t < params.k {
                Some(timer.time("closed_form", || {
                    (0..=params.t).map(|c| a_closed_form(&params, c)).collect::<Result<Vec<_>>>()
                })?)
            } else {
                None
            };
            let agree = closed.as_ref().is_none_or(|c| *c == seq.values);
            let distinct = if params.k >= params.t + 2 { Some(check_distinct(&seq)?) } else { None };
            let mut text = String::new();
            for (c, v) in seq.values.iter().enumerate() {
                text += &format!("a_{c} = {v}\n");
            }
            match &closed {
                Some(_) if agree => text += "closed form: agrees\n",
                Some(_) => text += "closed form: DISAGREES\n",
                None => text += "closed form: not defined for t = k\n",
            }
            if let Some(d) = &distinct {
                text += &format!(
                    "nonzero and distinct: {}\n|a_c| strictly increasing for c ≥ 1: {}\n",
                    serde_json::to_value(&d.distinctness).unwrap()["verdict"].as_str().unwrap(),
                    serde_json::to_value(&d.magnitudes).unwrap()["verdict"].as_str().unwrap(),
                );
            }
            let results = json!({
                "recurrence": strings(&seq.values),
                "closed_form": closed.as_deref().map(strings),
                "agree": agree,
                "distinctness": distinct,
            });
            Ok(Outcome { report: report("ac", params, results, None, timer), text, ok: agree })
        }
        Command::Build { form, params, output } => {
            let params = params.params()?;
            let sys = timer.time("build", || build(&params, (*form).into()))?;
            let summary = format!("{} rows, {} columns\n", sys.num_rows(), sys.num_cols());
            let (results, text) = match output {
                Some(path) => {
                    let body = if format == OutputFormat::Json { sys.to_json() + "\n" } else { sys.to_text() };
                    std::fs::write(path, body)?;
                    let results = json!({"path": path.display().to_string(), "rows": sys.num_rows(), "cols": sys.num_cols()});
                    (results, format!("wrote {} to {}: {summary}", sys.form, path.display()))
                }
                None => (to_value(&sys.to_document()), sys.to_text()),
            };
            Ok(Outcome { report: report("build", params, results, None, timer), text, ok: true })
        }
        Command::Facets { params, slack, row } => {
            let params = params.params()?;
            let slack = parse_rational(slack)?;
            let facets: FacetReport = match row {
                None => timer.time("facets", || verify_all_facets(&params, &slack))?,
                Some(i) => timer.time("facets", || {
                    let sys = build_reduced(&params)?;
                    if *i >= sys.num_rows() {
                        return Err(OapError::Usage(format!("row {i} out of range (the system has {} rows)", sys.num_rows())));
                    }
                    let mult = sys.rows.iter().filter(|r| r.coeffs == sys.rows[*i].coeffs && r.rhs == sys.rows[*i].rhs).count();
                    let r = verify_row(&sys, *i, mult, &slack)?;
                    let failures = if r.verdict.is_certified() { vec![] } else { vec![*i] };
                    Ok::<_, OapError>(FacetReport {
                        params,
                        slack: slack.clone(),
                        rows_total: 1,
                        facets_certified: 1 - failures.len(),
                        failures,
                        rows: vec![r],
                    })
                })?,
            };
            let mut text = String::new();
            for r in &facets.rows {
                let status = match &r.verdict {
                    FacetVerdict::FacetCertified { point } => {
                        format!("certified  point {}", point.iter().map(format_rational).collect::<Vec<_>>().join(" "))
                    }
                    FacetVerdict::NotCertified => "NOT certified".into(),
                };
                let retry = if r.retried { format!(" (slack {})", format_rational(&r.slack)) } else { String::new() };
                text += &format!("row {} [{}] x{}: {status}{retry}\n", r.row, r.label, r.multiplicity);
            }
            text += &format!("{}/{} distinct inequalities certified\n", facets.facets_certified, facets.rows_total);
            let ok = facets.all_certified();
            Ok(Outcome { report: report("facets", params, to_value(&facets), None, timer), text, ok })
        }
        Command::Symmetry { form, params, brute_force } => {
            let params = params.params()?;
            let r = timer.time("symmetry", || analyze(&params, (*form).into(), *brute_force))?;
            let mut text = format!(
                "graph: {} row vertices, {} column vertices, {} edges, edge colors {:?}\n",
                r.graph.row_vertices, r.graph.column_vertices, r.graph.edges, r.graph.edge_colors
            );
            text += &format!("order: {}\nexpected: {}\n", r.order, r.expected_order);
            if let Some(b) = &r.brute_force_order {
                text += &format!("brute force: {b}\n");
            }
            text += &format!("coordinate group preserves the system: {}\n", r.wreath_subgroup.holds);
            for g in &r.generators {
                text += &format!("gen {g}\n");
            }
            let ok = r.matches_expected
                && r.wreath_subgroup.holds
                && r.brute_force_order.as_ref().is_none_or(|b| *b == r.order);
            Ok(Outcome { report: report("symmetry", params, to_value(&r), None, timer), text, ok })
        }
        Command::Enumerate { params, form, orbits, budget } => {
            let params = params.params()?;
            match form {
                EnumerateForm::Both => {
                    let mut r = timer.time("enumerate", || solutions_report(&params, *budget))?;
                    if !orbits {
                        r.orbits_full_g = None;
                        r.orbits_reduced_h = None;
                    }
                    let mut text = format!(
                        "full: {} solutions\nreduced: {} solutions\nexhaustive: {}\nbijection: {}\n",
                        r.full_count, r.reduced_count, r.exhaustive, r.bijection_ok
                    );
                    if let (Some(g), Some(h)) = (r.orbits_full_g, r.orbits_reduced_h) {
                        text += &format!("orbits (full, G): {g}\norbits (reduced, H): {h}\n");
                    }
                    let ok = r.exhaustive && r.bijection_ok;
                    Ok(Outcome { report: report("enumerate", params, to_value(&r), None, timer), text, ok })
                }
                single => {
                    let sys = if *single == EnumerateForm::Full { build_full(&params) } else { build_reduced(&params)? };
                    let set = timer.time("enumerate", || enumerate_integer_points(&sys, *budget))?;
                    let orbit = if *orbits && set.exhaustive {
                        let group = if sys.form == Form::Full { full_group(&params)? } else { reduced_group(&params)? };
                        Some(timer.time("orbits", || orbit_count(&set, &group))?)
                    } else {
                        None
                    };
                    let mut text = String::new();
                    for (i, p) in set.points.iter().enumerate() {
                        let entries: Vec<String> =
                            p.iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, v)| format!("{j}:{v}")).collect();
                        text += &format!("sol {i} : {}\n", entries.join(" "));
                    }
                    text += &format!("{} solutions ({} form, exhaustive: {})\n", set.points.len(), set.form, set.exhaustive);
                    if let Some(o) = orbit {
                        text += &format!("orbits: {o}\n");
                    }
                    let mut results = to_value(&set);
                    results["orbits"] = to_value(&orbit);
                    let ok = set.exhaustive;
                    Ok(Outcome { report: report("enumerate", params, results, None, timer), text, ok })
                }
            }
        }
        Command::Probe { params, trials, seed } => {
            let params = params.params()?;
            let r = timer.time("probe", || probe_basis_integrality(&params, *trials, *seed))?;
            let ball_first = timer.time("ball_first_order", || probe_ordering_integral(&params, &ball_first_order(&params)))?;
            let text = format!(
                "{} of {} random column orders gave an integral RREF ({})\nball-first column order integral: {ball_first}\n",
                r.integral_count, r.trials, r.proportion
            );
            let mut results = to_value(&r);
            results["ball_first_order_integral"] = json!(ball_first);
            Ok(Outcome { report: report("probe", params, results, Some(*seed), timer), text, ok: ball_first })
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit status.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            let _ = writeln!(stderr, "error: jobs must satisfy jobs ≥ 1");
            return 1;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match run_command(&cli.command, cli.format) {
        Ok(outcome) => {
            let body = match cli.format {
                OutputFormat::Json => serde_json::to_string_pretty(&outcome.report).expect("reports serialize") + "\n",
                OutputFormat::Text => outcome.text,
            };
            let _ = stdout.write_all(body.as_bytes());
            if outcome.ok {
                0
            } else {
                2
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
