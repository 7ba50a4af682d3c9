use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use freesemi::chebyshev::{cheb_to_mono, ChebVector};
use freesemi::fock::{fock_norm_capped, DEFAULT_BASIS_CAP};
use freesemi::haagerup::{self, BoundMethod, BoundReport};
use freesemi::io::{self, AnyElement, Basis, Element};
use freesemi::moments::moment;
use freesemi::numerics::{DEFAULT_MAX_ITERS, DEFAULT_TOL};
use freesemi::verify::{self, Suite};
use freesemi::{Error, Exact, Word};

const EXIT_VALIDATION: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "freesemi", version, about = "Computations with free semicircular systems in the free Chebyshev basis")]
struct Cli {
    /// Emit machine-readable JSON instead of a text table.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact trace of a monomial.
    Moment {
        #[arg(long)]
        d: usize,
        /// Comma-separated letters, e.g. 1,2,1,2 (empty for the unit).
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        word: String,
    },
    /// Monomial expansion of a Chebyshev basis element, as a polynomial file.
    Expand {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "")]
        word: String,
    },
    /// Rewrite a polynomial file in the other basis.
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        file: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// L2 norm of a polynomial.
    L2norm { file: PathBuf },
    /// Scalar Haagerup bound with per-degree breakdown.
    Bound {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "sum")]
        method: Method,
    },
    /// Flattening bound of a matrix-coefficient homogeneous polynomial.
    Opbound {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Lower estimate of the operator norm in the truncated Fock space.
    FockNorm {
        file: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        /// Maximum number of basis words.
        #[arg(long, default_value_t = DEFAULT_BASIS_CAP)]
        cap: usize,
    },
    /// Optimality table for the family Q_{2n} = R_n^2.
    Optimality {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// Fock truncation is 2n plus this margin.
        #[arg(long, default_value_t = 16)]
        margin: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the built-in identity and inequality suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Cheb,
    Mono,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Sum,
    Cubic,
    Homogeneous,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Identities,
    Bounds,
}

enum Failure {
    Lib(Error),
    Io(String),
    Verify(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ResourceLimit(_) => EXIT_RESOURCE,
                Error::InvalidArgument(_) | Error::Json { .. } => EXIT_VALIDATION,
            })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Verify(n)) => {
            eprintln!("verify: {n} check(s) failed");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Moment { d, word } => cmd_moment(cli.json, *d, word),
        Command::Expand { d, word } => cmd_expand(*d, word),
        Command::Convert { to, file, output } => cmd_convert(*to, file, output.as_deref()),
        Command::L2norm { file } => cmd_l2norm(cli.json, file),
        Command::Bound { file, method } => cmd_bound(cli.json, file, *method),
        Command::Opbound { file, tol, max_iters } => cmd_opbound(cli.json, file, *tol, *max_iters),
        Command::FockNorm {
            file,
            degree,
            tol,
            max_iters,
            cap,
        } => cmd_fock_norm(cli.json, file, *degree, *tol, *max_iters, *cap),
        Command::Optimality {
            n_max,
            margin,
            tol,
            max_iters,
            csv,
        } => cmd_optimality(cli.json, *n_max, *margin, *tol, *max_iters, csv.as_deref()),
        Command::Verify { suite } => cmd_verify(cli.json, *suite),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Io(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn print_json(v: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable output"));
}

fn cmd_moment(as_json: bool, d: usize, word: &str) -> CliResult {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()).into());
    }
    let w = Word::parse_csv(d, word)?;
    let m = moment(&w);
    if as_json {
        print_json(&json!({ "d": d, "word": w, "moment": m.to_string() }));
    } else {
        println!("{m}");
    }
    Ok(())
}

fn cmd_expand(d: usize, word: &str) -> CliResult {
    let w = Word::parse_csv(d.max(1), word)?;
    let v = ChebVector::<Exact>::basis(d, w)?;
    print!("{}", io::element_to_json(&Element::Mono(cheb_to_mono(&v))));
    Ok(())
}

fn cmd_convert(to: Target, file: &Path, output: Option<&Path>) -> CliResult {
    let e = io::parse_element(&read_input(file)?)?;
    let basis = match to {
        Target::Cheb => Basis::Chebyshev,
        Target::Mono => Basis::Monomial,
    };
    let text = e.convert(basis).to_json();
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_l2norm(as_json: bool, file: &Path) -> CliResult {
    let e = io::parse_element(&read_input(file)?)?;
    let (value, exact_sq) = match &e {
        AnyElement::Exact(el) => {
            let v = el.to_cheb();
            (v.l2_norm(), v.l2_norm_sq_exact().map(|r| r.to_string()))
        }
        AnyElement::Float(el) => (el.to_cheb().l2_norm(), None),
    };
    if as_json {
        print_json(&json!({ "l2_norm": value, "l2_norm_sq_exact": exact_sq }));
    } else {
        println!("l2_norm     {value:.15e}");
        if let Some(s) = exact_sq {
            println!("l2_norm_sq  {s}");
        }
    }
    Ok(())
}

fn bound_report(e: &AnyElement, method: BoundMethod) -> freesemi::Result<BoundReport> {
    match e {
        AnyElement::Exact(el) => haagerup::bound(&el.to_cheb(), method),
        AnyElement::Float(el) => haagerup::bound(&el.to_cheb(), method),
    }
}

fn cmd_bound(as_json: bool, file: &Path, method: Method) -> CliResult {
    let e = io::parse_element(&read_input(file)?)?;
    let method = match method {
        Method::Sum => BoundMethod::Sum,
        Method::Cubic => BoundMethod::Cubic,
        Method::Homogeneous => BoundMethod::Homogeneous,
    };
    let report = bound_report(&e, method)?;
    let recomputed = report.recomputed_value();
    if !report.is_consistent() {
        return Err(Failure::Io(format!(
            "bound aggregate {} disagrees with its breakdown {recomputed}",
            report.value
        )));
    }
    if as_json {
        print_json(&report);
        return Ok(());
    }
    println!("method  {}", method_name(method));
    println!("{:>6}  {:>22}  {:>6}", "degree", "l2_norm", "weight");
    for t in &report.per_degree {
        println!("{:>6}  {:>22.15e}  {:>6}", t.degree, t.l2_norm, t.weight);
    }
    println!("value   {:.15e}", report.value);
    if let Some(sq) = &report.exact_square {
        println!("value^2 {sq}");
    }
    Ok(())
}

fn method_name(m: BoundMethod) -> &'static str {
    match m {
        BoundMethod::Sum => "sum",
        BoundMethod::Cubic => "cubic",
        BoundMethod::Homogeneous => "homogeneous",
    }
}

fn cmd_opbound(as_json: bool, file: &Path, tol: f64, max_iters: usize) -> CliResult {
    let p = io::parse_matpoly(&read_input(file)?)?;
    let b = p.op_bound_with(tol, max_iters)?;
    if as_json {
        let per_l: Vec<_> = b
            .per_l
            .iter()
            .map(|s| json!({ "l": s.l, "norm": s.norm, "converged": s.converged }))
            .collect();
        print_json(&json!({ "value": b.value, "per_l": per_l, "comparison": b.comparison }));
        return Ok(());
    }
    println!("{:>4}  {:>22}  {:>9}", "l", "norm", "converged");
    for s in &b.per_l {
        println!("{:>4}  {:>22.15e}  {:>9}", s.l, s.norm, s.converged);
    }
    println!("total       {:.15e}", b.value);
    println!("(n+1)*max   {:.15e}", b.comparison);
    Ok(())
}

fn cmd_fock_norm(as_json: bool, file: &Path, degree: usize, tol: f64, max_iters: usize, cap: usize) -> CliResult {
    let e = io::parse_element(&read_input(file)?)?;
    let est = fock_norm_capped(&e.to_float_cheb(), degree, tol, max_iters, cap)?;
    if as_json {
        print_json(&json!({
            "estimate": est.estimate,
            "converged": est.converged,
            "iterations": est.iterations,
            "basis_size": est.basis_size,
            "degree": degree,
        }));
    } else {
        println!("estimate    {:.15e}", est.estimate);
        println!("converged   {}", est.converged);
        println!("iterations  {}", est.iterations);
        println!("basis_size  {}", est.basis_size);
    }
    Ok(())
}

#[derive(Serialize)]
struct OptimalityLine {
    n: usize,
    ratio: f64,
    lower_bound: f64,
    closed_form_exact: bool,
    fock_degree: usize,
    fock_estimate: f64,
    true_norm: f64,
    fock_ratio: f64,
}

fn cmd_optimality(
    as_json: bool,
    n_max: usize,
    margin: usize,
    tol: f64,
    max_iters: usize,
    csv_path: Option<&Path>,
) -> CliResult {
    let mut lines = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let row = haagerup::optimality_ratio(n)?;
        let q = haagerup::build_q(1, 2 * n)?;
        let degree = 2 * n + margin;
        let est = fock_norm_capped(&q, degree, tol, max_iters, DEFAULT_BASIS_CAP)?;
        let cubic = haagerup::bound_cubic(&q)?.value;
        lines.push(OptimalityLine {
            n,
            ratio: row.ratio,
            lower_bound: row.lower_bound,
            closed_form_exact: row.matches_closed_form(),
            fock_degree: degree,
            fock_estimate: est.estimate,
            true_norm: ((n + 1) * (n + 1)) as f64,
            fock_ratio: est.estimate / cubic,
        });
    }
    let limit = haagerup::optimality_limit();
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(path).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
        for l in &lines {
            w.serialize(l).map_err(|e| Failure::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| Failure::Io(e.to_string()))?;
    }
    if as_json {
        print_json(&json!({ "rows": lines, "limit": limit }));
        return Ok(());
    }
    println!(
        "{:>4}  {:>10}  {:>12}  {:>6}  {:>4}  {:>14}  {:>8}  {:>10}",
        "n", "ratio", "lower_bound", "exact", "D", "fock_estimate", "norm", "fock_ratio"
    );
    for l in &lines {
        println!(
            "{:>4}  {:>10.6}  {:>12.6}  {:>6}  {:>4}  {:>14.8}  {:>8}  {:>10.6}",
            l.n, l.ratio, l.lower_bound, l.closed_form_exact, l.fock_degree, l.fock_estimate, l.true_norm, l.fock_ratio
        );
    }
    println!("n=inf limit sqrt(3/8) = {limit:.6}");
    Ok(())
}

fn cmd_verify(as_json: bool, suite: SuiteArg) -> CliResult {
    let suite = match suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Identities => Suite::Identities,
        SuiteArg::Bounds => Suite::Bounds,
    };
    let results = verify::run(suite);
    let failed = results.iter().filter(|r| !r.passed()).count();
    if as_json {
        print_json(&json!({ "checks": results, "failed": failed }));
    } else {
        for r in &results {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            println!("{status}  {:>6} cases  {:>4} failures  {}", r.cases, r.failures, r.name);
        }
        println!("{} checks, {failed} failed", results.len());
    }
    if failed > 0 {
        Err(Failure::Verify(failed))
    } else {
        Ok(())
    }
}
