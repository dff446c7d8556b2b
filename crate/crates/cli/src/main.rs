//! `qbern`: eigenstructure of the (α,q)-Bernstein operator from the shell.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qbernstein::asymptotics::{convergence_table, limit_coeffs, LimitFormula};
use qbernstein::bernstein::{apply_to_polynomial, apply_to_samples, basis_polynomial};
use qbernstein::eigen::{eigensystem, EigenSolver};
use qbernstein::verify::{self, VerifyOptions};
use qbernstein::{Error, OperatorParams, Polynomial, Rational, Scalar, Tolerance};

#[derive(Parser, Debug)]
#[command(
    name = "qbern",
    version,
    about = "Eigenvalues, eigenvectors and limits of the (alpha,q)-Bernstein operator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full eigensystem: eigenvalues and monic eigenvectors for k = 0..=n.
    Eig(Common),
    /// Image of a polynomial or of a sample vector.
    Apply(ApplyArgs),
    /// Basis polynomials in ascending powers.
    Basis(Common),
    /// Limit eigenvector coefficients as n grows.
    Limits(LimitArgs),
    /// Finite-n eigenvector coefficients next to their limits.
    Converge(ConvergeArgs),
    /// Eigenvector values on a uniform grid over [0, 1], one column per (q, alpha).
    PlotData(Common),
    /// Exact oracle checks; exits 1 on the first failure.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Comma-separated; decimals are read exactly (0.4 is 2/5).
    #[arg(long, value_delimiter = ',', default_value = "1/2")]
    q: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    alpha: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid size for plot-data.
    #[arg(long, default_value_t = 101)]
    samples: usize,
    /// Accept alpha outside [0, 1].
    #[arg(long, hide = true)]
    any_alpha: bool,
}

#[derive(Args, Debug)]
struct ApplyArgs {
    #[command(flatten)]
    common: Common,
    /// Polynomial coefficients in ascending powers, degree <= n.
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "values",
        required_unless_present = "values"
    )]
    poly: Option<Vec<String>>,
    /// Samples f_0..f_n at the nodes [i]_q/[n]_q.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[command(flatten)]
    common: Common,
    /// Limit used for q > 1.
    #[arg(long, value_enum, default_value_t = FormulaArg::Derived)]
    formula: FormulaArg,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[command(flatten)]
    limit: LimitArgs,
    #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
    ns: Vec<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = verify::DEFAULT_MAX_N)]
    max_n: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FormulaArg {
    Printed,
    Derived,
}

impl From<FormulaArg> for LimitFormula {
    fn from(f: FormulaArg) -> Self {
        match f {
            FormulaArg::Printed => LimitFormula::AsPrinted,
            FormulaArg::Derived => LimitFormula::Derived,
        }
    }
}

/// Why a command stopped.
enum Failure {
    Usage(String),
    Computation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateGap { .. } | Error::FitMismatch { .. } => {
                Failure::Computation(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<String, Failure>;

fn parse_list<T: Scalar>(items: &[String]) -> Result<Vec<T>, Failure> {
    items
        .iter()
        .map(|s| T::parse(s.trim()).map_err(Failure::from))
        .collect()
}

fn make_params<T: Scalar>(c: &Common, q: &T, alpha: &T) -> Result<OperatorParams<T>, Failure> {
    let params = if c.any_alpha {
        OperatorParams::with_any_alpha(c.n, q.clone(), alpha.clone())?
    } else {
        OperatorParams::new(c.n, q.clone(), alpha.clone())?
    };
    Ok(params)
}

/// Every `(q, alpha)` pair, q outer.
fn grid<T: Scalar>(c: &Common) -> Result<Vec<(T, T)>, Failure> {
    let qs = parse_list::<T>(&c.q)?;
    let alphas = parse_list::<T>(&c.alpha)?;
    if qs.is_empty() || alphas.is_empty() {
        return Err(Failure::Usage(
            "--q and --alpha need at least one value".into(),
        ));
    }
    Ok(qs
        .iter()
        .flat_map(|q| alphas.iter().map(move |a| (q.clone(), a.clone())))
        .collect())
}

/// A single object for one pair, an array otherwise.
fn one_or_many(mut items: Vec<Value>) -> Value {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Value::Array(items)
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn csv_row<T: Scalar>(head: &[String], values: &[T]) -> String {
    let mut row: Vec<String> = head.to_vec();
    row.extend(values.iter().map(Scalar::to_text));
    row.join(",") + "\n"
}

fn coeff_header(prefix: &str, count: usize) -> String {
    let mut h = prefix.to_string();
    for j in 0..count {
        let _ = write!(h, ",c_{j}");
    }
    h + "\n"
}

fn cmd_eig<T: Scalar>(c: &Common) -> CmdResult {
    let mut systems = Vec::new();
    for (q, alpha) in grid::<T>(c)? {
        systems.push(eigensystem(&make_params(c, &q, &alpha)?)?);
    }
    Ok(match c.format {
        Format::Json => pretty(&one_or_many(systems.iter().map(|s| s.to_json()).collect())),
        Format::Csv => {
            let mut out = coeff_header("q,alpha,k,lambda", c.n + 1);
            for s in &systems {
                let (q, alpha) = (s.params.q().get().to_text(), s.params.alpha().to_text());
                for (k, (lambda, p)) in s.lambdas.iter().zip(&s.vectors).enumerate() {
                    let mut values = vec![lambda.clone()];
                    values.extend((0..=c.n).map(|j| p.coeff(j)));
                    out += &csv_row(&[q.clone(), alpha.clone(), k.to_string()], &values);
                }
            }
            out
        }
    })
}

fn cmd_apply<T: Scalar>(a: &ApplyArgs) -> CmdResult {
    let c = &a.common;
    let mut images = Vec::new();
    for (q, alpha) in grid::<T>(c)? {
        let params = make_params(c, &q, &alpha)?;
        let image = match (&a.poly, &a.values) {
            (Some(p), _) => apply_to_polynomial(&Polynomial::new(parse_list::<T>(p)?), &params)?,
            (None, Some(v)) => apply_to_samples(&parse_list::<T>(v)?, &params)?,
            (None, None) => return Err(Failure::Usage("pass --poly or --values".into())),
        };
        images.push((q, alpha, image));
    }
    Ok(match c.format {
        Format::Json => pretty(&one_or_many(
            images
                .iter()
                .map(|(q, a, p)| json!({ "q": q.to_json(), "alpha": a.to_json(), "image": p.to_json() }))
                .collect(),
        )),
        Format::Csv => {
            let mut out = coeff_header("q,alpha", c.n + 1);
            for (q, a, p) in &images {
                let values: Vec<T> = (0..=c.n).map(|j| p.coeff(j)).collect();
                out += &csv_row(&[q.to_text(), a.to_text()], &values);
            }
            out
        }
    })
}

fn cmd_basis<T: Scalar>(c: &Common) -> CmdResult {
    let mut all = Vec::new();
    for (q, alpha) in grid::<T>(c)? {
        let params = make_params(c, &q, &alpha)?;
        let basis = (0..=c.n)
            .map(|i| basis_polynomial(&params, i))
            .collect::<qbernstein::Result<Vec<_>>>()?;
        all.push((q, alpha, basis));
    }
    Ok(match c.format {
        Format::Json => pretty(&one_or_many(
            all.iter()
                .map(|(q, a, b)| {
                    json!({
                        "n": c.n,
                        "q": q.to_json(),
                        "alpha": a.to_json(),
                        "basis": b.iter().map(Polynomial::to_json).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )),
        Format::Csv => {
            let mut out = coeff_header("q,alpha,i", c.n + 1);
            for (q, a, b) in &all {
                for (i, p) in b.iter().enumerate() {
                    let values: Vec<T> = (0..=c.n).map(|j| p.coeff(j)).collect();
                    out += &csv_row(&[q.to_text(), a.to_text(), i.to_string()], &values);
                }
            }
            out
        }
    })
}

fn cmd_limits<T: Scalar>(l: &LimitArgs) -> CmdResult {
    let c = &l.common;
    let mut all = Vec::new();
    for (q, alpha) in grid::<T>(c)? {
        all.push(limit_coeffs(&q, &alpha, c.k, l.formula.into())?);
    }
    Ok(match c.format {
        Format::Json => pretty(&one_or_many(all.iter().map(|l| l.to_json()).collect())),
        Format::Csv => {
            let mut out = coeff_header("q,alpha,regime,formula,limit_lambda", c.k + 1);
            for lim in &all {
                let head = [
                    lim.q.to_text(),
                    lim.alpha.to_text(),
                    lim.regime.name().to_string(),
                    lim.formula.name().to_string(),
                    lim.limit_lambda.to_text(),
                ];
                out += &csv_row(&head, &lim.coeffs);
            }
            out
        }
    })
}

fn cmd_converge<T: Scalar>(a: &ConvergeArgs) -> CmdResult {
    let c = &a.limit.common;
    let mut tables = Vec::new();
    for (q, alpha) in grid::<T>(c)? {
        tables.push(convergence_table(
            &q,
            &alpha,
            c.k,
            &a.ns,
            a.limit.formula.into(),
        )?);
    }
    Ok(match c.format {
        Format::Json => pretty(&one_or_many(tables.iter().map(|t| t.to_json()).collect())),
        Format::Csv => {
            let mut out = String::from("q,alpha,n,j,finite,limit,abs_error\n");
            for t in &tables {
                for r in &t.rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{:.16e}",
                        t.q.to_text(),
                        t.alpha.to_text(),
                        r.n,
                        r.j,
                        r.finite.to_text(),
                        r.limit.to_text(),
                        r.abs_error
                    );
                }
            }
            out
        }
    })
}

fn cmd_plot_data<T: Scalar>(c: &Common) -> CmdResult {
    if c.samples < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    let xs: Vec<T> = (0..c.samples)
        .map(|j| T::ratio(j as i64, c.samples as i64 - 1))
        .collect();
    let mut columns = Vec::new();
    for (q, alpha) in grid::<T>(c)? {
        let params = make_params(c, &q, &alpha)?;
        let p = EigenSolver::up_to(&params, c.k, Tolerance::default())?.eigenvector(c.k)?;
        let values: Vec<T> = xs.iter().map(|x| p.eval(x)).collect();
        columns.push((
            format!("p_{{{}}}[q={},alpha={}]", c.k, q.to_text(), alpha.to_text()),
            q,
            alpha,
            values,
        ));
    }
    Ok(match c.format {
        Format::Csv => {
            let mut out = String::from("x");
            for (name, ..) in &columns {
                out.push(',');
                out.push_str(name);
            }
            out.push('\n');
            for (row, x) in xs.iter().enumerate() {
                let values: Vec<T> = columns.iter().map(|col| col.3[row].clone()).collect();
                out += &csv_row(&[x.to_text()], &values);
            }
            out
        }
        Format::Json => pretty(&json!({
            "k": c.k,
            "n": c.n,
            "x": xs.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "columns": columns
                .iter()
                .map(|(name, q, a, v)| json!({
                    "name": name,
                    "q": q.to_json(),
                    "alpha": a.to_json(),
                    "values": v.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                }))
                .collect::<Vec<_>>(),
        })),
    })
}

fn dispatch<T: Scalar>(command: &Command) -> CmdResult {
    match command {
        Command::Eig(c) => cmd_eig::<T>(c),
        Command::Apply(a) => cmd_apply::<T>(a),
        Command::Basis(c) => cmd_basis::<T>(c),
        Command::Limits(l) => cmd_limits::<T>(l),
        Command::Converge(a) => cmd_converge::<T>(a),
        Command::PlotData(c) => cmd_plot_data::<T>(c),
        Command::Verify(_) => unreachable!("verify is handled before dispatch"),
    }
}

fn mode_of(command: &Command) -> ModeArg {
    match command {
        Command::Eig(c) | Command::Basis(c) | Command::PlotData(c) => c.mode,
        Command::Apply(a) => a.common.mode,
        Command::Limits(l) => l.common.mode,
        Command::Converge(a) => a.limit.common.mode,
        Command::Verify(_) => ModeArg::Exact,
    }
}

fn out_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Eig(c) | Command::Basis(c) | Command::PlotData(c) => c.out.as_ref(),
        Command::Apply(a) => a.common.out.as_ref(),
        Command::Limits(l) => l.common.out.as_ref(),
        Command::Converge(a) => a.limit.common.out.as_ref(),
        Command::Verify(v) => v.out.as_ref(),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let (result, verify_failed) = match &cli.command {
        Command::Verify(v) => {
            let report = verify::run(&VerifyOptions {
                max_n: v.max_n,
                inject_fault: v.inject_fault,
                seed: v.seed,
            });
            if let Some(ce) = report.first_counterexample() {
                eprintln!("counterexample: {ce}");
            }
            (Ok(pretty(&report.to_json())), !report.passed())
        }
        command => {
            let result = match mode_of(command) {
                ModeArg::Exact => dispatch::<Rational>(command),
                ModeArg::Float => dispatch::<f64>(command),
            };
            (result, false)
        }
    };

    let result = result.and_then(|text| emit(&text, out_path(&cli.command)));
    match result {
        Ok(()) if verify_failed => {
            eprintln!("error: verification failed");
            ExitCode::from(1)
        }
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
