//! Command-line tool over the library: digit expansions, attractor
//! domains, geodesic coding, duality, sofic transition structure,
//! invariant measures, the verification suite, and seeded simulation.
//!
//! Exit status: 0 on success, 1 on domain or computation errors, 2 when a
//! verification-style command reports a failure, 64 on usage errors.

mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use abcf_core::attractor::{approx_domain, build_domain, hat_lambda_of, lambda_of, StepDomain};
use abcf_core::cf::{convergents, expand, ParamPair, Tail};
use abcf_core::duality::{dual_report, juxtaposition_check, verify_duality, DualWitness};
use abcf_core::exact::{parse_number, ExtendedReal};
use abcf_core::measure::{density, entropy, normalizer_of, qn_growth, rokhlin_check};
use abcf_core::reduction::{
    coding_window, reduce_geodesic, reduction_step, return_time, GeodesicEndpoints,
};
use abcf_core::sofic::{build_partition, is_admissible, transition_matrix};
use abcf_core::verify;
use abcf_core::AbcfError;

#[derive(Parser)]
#[command(
    name = "abcf",
    version,
    about = "Continued fractions with two rounding parameters (a, b)",
    after_help = "Numbers are exact: integers, fractions, finite decimals, and \
                  quadratic surds such as \"(1-sqrt(5))/2\" or \"sqrt(2)-1\"; \
                  \"inf\" is the point at infinity."
)]
struct Cli {
    /// Left digit boundary `a` (exact syntax, `a <= 0`).
    #[arg(
        long,
        global = true,
        default_value = "-4/5",
        allow_hyphen_values = true
    )]
    a: String,

    /// Right digit boundary `b` (exact syntax, `b >= 0`).
    #[arg(long, global = true, default_value = "2/5", allow_hyphen_values = true)]
    b: String,

    /// Seed for every pseudo-random draw; equal seeds give identical output.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Iteration budget for reduction and orbit searches.
    #[arg(long, global = true, default_value_t = 300)]
    budget: usize,

    /// Output format on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Stage {
    /// The attracting domain of the two-dimensional map.
    Domain,
    /// The domain with the past coordinate flipped, `u -> -1/u`.
    Lambda,
    /// Compact coordinates: both axes flipped where unbounded.
    Hat,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Suite {
    All,
    Measure,
    Attractor,
    Reduction,
    Duality,
    Sofic,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a number into its digit sequence.
    Expand {
        /// The number to expand (exact syntax).
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Digit budget before the expansion is truncated.
        #[arg(long, default_value_t = 40)]
        digits: usize,
    },
    /// Print or render the natural-extension domain.
    Domain {
        /// Write an SVG rendering to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Which coordinate stage to show.
        #[arg(long, value_enum, default_value_t = Stage::Domain)]
        stage: Stage,
        /// Sample the domain instead of constructing it exactly.
        #[arg(long)]
        approx: bool,
        /// Random starting points for the sampled domain.
        #[arg(long, default_value_t = 40_000)]
        samples: usize,
        /// Iterations per starting point for the sampled domain.
        #[arg(long, default_value_t = 300)]
        iterations: usize,
    },
    /// Reduce a geodesic and read its digit coding.
    Code {
        /// Past endpoint `u`.
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Future endpoint `w`.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        /// Also read a two-sided window of `k` past and `k` future digits.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Analyze the dual parameter pair.
    Dual {
        /// Check the reflection identity between the two domains.
        #[arg(long)]
        verify: bool,
        /// Check that past digits reverse into the dual expansion of a
        /// geodesic; requires `--u` and `--w`.
        #[arg(long)]
        juxtapose: bool,
        /// Past endpoint for `--juxtapose`.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        /// Future endpoint for `--juxtapose`.
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
        /// Number of past digits compared by `--juxtapose`.
        #[arg(long, default_value_t = 8)]
        window: usize,
    },
    /// Build the refined digit partition and its transition matrix.
    Sofic {
        /// Write the transition matrix as CSV to this path.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Test a digit word for admissibility, e.g. "2 3 2".
        #[arg(long, allow_hyphen_values = true)]
        check: Option<String>,
    },
    /// Invariant measure: normalizer, entropy, and related quantities.
    Measure {
        /// Write the normalized density on a 1000-point grid to this path.
        #[arg(long)]
        density: Option<PathBuf>,
        /// Compare the log-moment identity for the entropy.
        #[arg(long)]
        rokhlin: bool,
        /// Measure the growth rate of the convergent denominators of `--x`
        /// over this many digits.
        #[arg(long)]
        qn: Option<usize>,
        /// Starting point for `--qn`.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Run the named verification checks.
    Verify {
        /// Which checks to run.
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Seeded Monte Carlo: reduction statistics, digit frequencies, and
    /// mean return time.
    Simulate {
        /// Number of random geodesics and expansion starting points.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Digits drawn per expansion for the frequency table.
        #[arg(long, default_value_t = 60)]
        digits: usize,
        /// Length of the return-time orbit average.
        #[arg(long, default_value_t = 5000)]
        steps: usize,
        /// Also write the JSON report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn main() {
    // Die quietly when a downstream pager closes the pipe instead of
    // panicking inside println!, matching ordinary Unix tool behaviour.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
        }
    };
    match dispatch(&cli) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let params = params_of(cli)?;
    match &cli.command {
        Command::Expand { x, digits } => cmd_expand(cli, &params, x, *digits),
        Command::Domain {
            svg,
            stage,
            approx,
            samples,
            iterations,
        } => cmd_domain(
            cli,
            &params,
            svg.as_deref(),
            *stage,
            *approx,
            *samples,
            *iterations,
        ),
        Command::Code { u, w, window } => cmd_code(cli, &params, u, w, *window),
        Command::Dual {
            verify,
            juxtapose,
            u,
            w,
            window,
        } => cmd_dual(
            cli,
            &params,
            *verify,
            *juxtapose,
            u.as_deref(),
            w.as_deref(),
            *window,
        ),
        Command::Sofic { matrix, check } => {
            cmd_sofic(cli, &params, matrix.as_deref(), check.as_deref())
        }
        Command::Measure {
            density,
            rokhlin,
            qn,
            x,
        } => cmd_measure(
            cli,
            &params,
            density.as_deref(),
            *rokhlin,
            *qn,
            x.as_deref(),
        ),
        Command::Verify { suite } => cmd_verify(cli, *suite),
        Command::Simulate {
            samples,
            digits,
            steps,
            report,
        } => cmd_simulate(cli, &params, *samples, *digits, *steps, report.as_deref()),
    }
}

fn params_of(cli: &Cli) -> Result<ParamPair> {
    let a = parse_number(&cli.a).with_context(|| format!("parameter --a `{}`", cli.a))?;
    let b = parse_number(&cli.b).with_context(|| format!("parameter --b `{}`", cli.b))?;
    Ok(ParamPair::new(a, b)?)
}

fn parse_point(text: &str, flag: &str) -> Result<ExtendedReal> {
    parse_number(text).with_context(|| format!("argument {flag} `{text}`"))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

// ---------------------------------------------------------------- expand

#[derive(Serialize)]
struct ExpandOut {
    x: String,
    a: String,
    b: String,
    head: Vec<i64>,
    period: Option<Vec<i64>>,
    terminated: bool,
    truncated: bool,
    convergents: Vec<String>,
}

fn cmd_expand(cli: &Cli, params: &ParamPair, x: &str, digits: usize) -> Result<i32> {
    let point = parse_point(x, "--x")?;
    let e = expand(&point, params, digits)?;
    let available = match &e.tail {
        Tail::Periodic(_) => digits,
        _ => e.head.len(),
    };
    let shown = available.min(10);
    let convs = if shown == 0 {
        Vec::new()
    } else {
        convergents(&e, shown - 1)?
            .iter()
            .map(|c| format!("{}/{}", c.p, c.q))
            .collect()
    };
    let out = ExpandOut {
        x: point.to_string(),
        a: params.a().to_string(),
        b: params.b().to_string(),
        head: e.head.clone(),
        period: match &e.tail {
            Tail::Periodic(p) => Some(p.clone()),
            _ => None,
        },
        terminated: e.tail == Tail::None,
        truncated: e.tail == Tail::Truncated,
        convergents: convs,
    };
    match cli.format {
        Format::Json => print_json(&out)?,
        Format::Csv => {
            println!("index,digit");
            for (i, n) in out.head.iter().enumerate() {
                println!("{i},{n}");
            }
            if let Some(p) = &out.period {
                for (i, n) in p.iter().enumerate() {
                    println!("{},{n} (period)", out.head.len() + i);
                }
            }
        }
        Format::Text => {
            println!("x = {}   (a, b) = ({}, {})", out.x, out.a, out.b);
            println!("head    = {:?}", out.head);
            match &out.period {
                Some(p) => println!("period  = {p:?}"),
                None if out.terminated => println!("period  = none (expansion terminates)"),
                None => println!("period  = none found within {digits} digits"),
            }
            if !out.convergents.is_empty() {
                println!("convergents = {}", out.convergents.join(", "));
            }
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------- domain

#[derive(Serialize)]
struct RectRow {
    component: &'static str,
    u_lo: String,
    u_hi: String,
    w_lo: String,
    w_hi: String,
}

#[derive(Serialize)]
struct DomainOut {
    a: String,
    b: String,
    stage: &'static str,
    exact: bool,
    rectangles: Vec<RectRow>,
}

fn staged_domain(
    cli: &Cli,
    params: &ParamPair,
    stage: Stage,
    approx: bool,
    samples: usize,
    iterations: usize,
) -> Result<StepDomain> {
    let base = if approx {
        approx_domain(params, samples, iterations, cli.seed, 400)?
    } else {
        match build_domain(params) {
            Ok(d) => d,
            Err(
                e @ (AbcfError::UnsupportedCase(_)
                | AbcfError::FinitenessUndetected(_)
                | AbcfError::CaseMismatch(_)),
            ) => {
                bail!("{e}; rerun with --approx to sample the domain instead")
            }
            Err(e) => return Err(e.into()),
        }
    };
    Ok(match stage {
        Stage::Domain => base,
        Stage::Lambda => lambda_of(&base, params)?,
        Stage::Hat => {
            let lambda = lambda_of(&base, params)?;
            hat_lambda_of(&lambda)?
        }
    })
}

fn cmd_domain(
    cli: &Cli,
    params: &ParamPair,
    svg: Option<&Path>,
    stage: Stage,
    approx: bool,
    samples: usize,
    iterations: usize,
) -> Result<i32> {
    let domain = staged_domain(cli, params, stage, approx, samples, iterations)?;
    let stage_name = match stage {
        Stage::Domain => "domain",
        Stage::Lambda => "lambda",
        Stage::Hat => "hat",
    };
    let out = DomainOut {
        a: params.a().to_string(),
        b: params.b().to_string(),
        stage: stage_name,
        exact: domain.exact,
        rectangles: domain
            .all_rects()
            .map(|(r, c)| RectRow {
                component: match c {
                    abcf_core::attractor::Component::Upper => "upper",
                    abcf_core::attractor::Component::Lower => "lower",
                },
                u_lo: r.u_lo.to_string(),
                u_hi: r.u_hi.to_string(),
                w_lo: r.w_lo.to_string(),
                w_hi: r.w_hi.to_string(),
            })
            .collect(),
    };
    if let Some(path) = svg {
        let caption = format!(
            "stage {stage_name} at a = {}, b = {}, {}",
            out.a,
            out.b,
            if out.exact { "exact" } else { "sampled" }
        );
        write_file(path, &output::svg_of(&domain, &caption))?;
    }
    match cli.format {
        Format::Json => print_json(&out)?,
        Format::Csv => {
            println!("component,u_lo,u_hi,w_lo,w_hi");
            for r in &out.rectangles {
                println!(
                    "{},{},{},{},{}",
                    r.component, r.u_lo, r.u_hi, r.w_lo, r.w_hi
                );
            }
        }
        Format::Text => {
            println!(
                "{} {} rectangles at (a, b) = ({}, {})",
                out.rectangles.len(),
                if out.exact { "exact" } else { "sampled" },
                out.a,
                out.b
            );
            for r in &out.rectangles {
                println!(
                    "  {:<5}  u in [{}, {}]  w in [{}, {}]",
                    r.component, r.u_lo, r.u_hi, r.w_lo, r.w_hi
                );
            }
            if let Some(path) = svg {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(0)
}

// ------------------------------------------------------------------ code

#[derive(Serialize)]
struct CodeOut {
    a: String,
    b: String,
    u: String,
    w: String,
    steps: usize,
    digits_consumed: Vec<i64>,
    anchor_u: String,
    anchor_w: String,
    window: Option<Vec<i64>>,
}

fn cmd_code(cli: &Cli, params: &ParamPair, u: &str, w: &str, window: Option<usize>) -> Result<i32> {
    let g = GeodesicEndpoints::new(parse_point(u, "--u")?, parse_point(w, "--w")?)?;
    let domain = build_domain(params)?;
    let lambda = lambda_of(&domain, params)?;
    let reduced = reduce_geodesic(&g, params, &lambda, cli.budget).context(
        "reducing the geodesic (rational endpoints run into the cusp and cannot be coded)",
    )?;
    let win = match window {
        Some(k) => Some(coding_window(&g, params, &lambda, k, cli.budget)?.0),
        None => None,
    };
    let out = CodeOut {
        a: params.a().to_string(),
        b: params.b().to_string(),
        u: g.u.to_string(),
        w: g.w.to_string(),
        steps: reduced.steps,
        digits_consumed: reduced.digits.clone(),
        anchor_u: reduced.endpoints.u.to_string(),
        anchor_w: reduced.endpoints.w.to_string(),
        window: win,
    };
    match cli.format {
        Format::Json => print_json(&out)?,
        Format::Csv => {
            println!("key,value");
            println!("steps,{}", out.steps);
            println!("anchor_u,{}", out.anchor_u);
            println!("anchor_w,{}", out.anchor_w);
            for (i, n) in out.digits_consumed.iter().enumerate() {
                println!("consumed_{i},{n}");
            }
            if let Some(win) = &out.window {
                for (i, n) in win.iter().enumerate() {
                    println!("window_{i},{n}");
                }
            }
        }
        Format::Text => {
            println!("geodesic ({} -> {})", out.u, out.w);
            println!(
                "reduced in {} steps, consuming {:?}",
                out.steps, out.digits_consumed
            );
            println!("anchor   ({} -> {})", out.anchor_u, out.anchor_w);
            if let Some(win) = &out.window {
                let k = win.len() / 2;
                println!(
                    "window   past {:?} | now {} | future {:?}",
                    &win[..k],
                    win[k],
                    &win[k + 1..]
                );
            }
        }
    }
    Ok(0)
}

// ------------------------------------------------------------------ dual

#[derive(Serialize)]
struct DualOut {
    a: String,
    b: String,
    has_dual: bool,
    self_dual: bool,
    dual_a: Option<String>,
    dual_b: Option<String>,
    witness: String,
    reflection_verified: Option<bool>,
    juxtaposition_exact: Option<bool>,
}

fn cmd_dual(
    cli: &Cli,
    params: &ParamPair,
    check_reflection: bool,
    juxtapose: bool,
    u: Option<&str>,
    w: Option<&str>,
    window: usize,
) -> Result<i32> {
    let report = dual_report(params, cli.budget.max(400))?;
    let witness = match &report.witness {
        DualWitness::StrongEndpoint(e) => format!("strong cycle at the {e} endpoint"),
        DualWitness::BoundaryLevels { x_a, x_b } => {
            format!("boundary levels x_a = {x_a}, x_b = {x_b}")
        }
        DualWitness::Unavailable(reason) => format!("dual not computed: {reason}"),
    };
    let mut out = DualOut {
        a: params.a().to_string(),
        b: params.b().to_string(),
        has_dual: report.has_dual,
        self_dual: report.self_dual,
        dual_a: report.dual.as_ref().map(|d| d.a().to_string()),
        dual_b: report.dual.as_ref().map(|d| d.b().to_string()),
        witness,
        reflection_verified: None,
        juxtaposition_exact: None,
    };
    let mut status = 0;
    if check_reflection {
        let Some(dual) = &report.dual else {
            bail!("no dual pair to verify: {}", out.witness);
        };
        match verify_duality(params, dual) {
            Ok(()) => out.reflection_verified = Some(true),
            Err(e) => {
                eprintln!("reflection check failed: {e}");
                out.reflection_verified = Some(false);
                status = 2;
            }
        }
    }
    if juxtapose {
        let (Some(u), Some(w)) = (u, w) else {
            bail!("--juxtapose requires --u and --w");
        };
        let Some(dual) = &report.dual else {
            bail!("no dual pair to juxtapose against: {}", out.witness);
        };
        let g = GeodesicEndpoints::new(parse_point(u, "--u")?, parse_point(w, "--w")?)?;
        match juxtaposition_check(&g, params, dual, window, cli.budget) {
            Ok(exact) => {
                out.juxtaposition_exact = Some(exact);
                if !exact {
                    status = 2;
                }
            }
            Err(e) => {
                eprintln!("juxtaposition check failed: {e}");
                out.juxtaposition_exact = Some(false);
                status = 2;
            }
        }
    }
    match cli.format {
        Format::Json => print_json(&out)?,
        Format::Csv => {
            println!("key,value");
            println!("has_dual,{}", out.has_dual);
            println!("self_dual,{}", out.self_dual);
            println!("dual_a,{}", out.dual_a.as_deref().unwrap_or("-"));
            println!("dual_b,{}", out.dual_b.as_deref().unwrap_or("-"));
            if let Some(v) = out.reflection_verified {
                println!("reflection_verified,{v}");
            }
            if let Some(v) = out.juxtaposition_exact {
                println!("juxtaposition_exact,{v}");
            }
        }
        Format::Text => {
            println!("(a, b) = ({}, {})", out.a, out.b);
            match (&out.dual_a, &out.dual_b) {
                (Some(da), Some(db)) => {
                    println!(
                        "dual    = ({da}, {db}){}",
                        if out.self_dual { "  (self-dual)" } else { "" }
                    );
                }
                _ => println!("dual    = none ({})", out.witness),
            }
            println!("witness = {}", out.witness);
            if let Some(v) = out.reflection_verified {
                println!(
                    "reflection identity: {}",
                    if v { "verified" } else { "FAILED" }
                );
            }
            if let Some(v) = out.juxtaposition_exact {
                println!(
                    "juxtaposition of {window} past digits: {}",
                    if v { "digit-exact" } else { "FAILED" }
                );
            }
        }
    }
    Ok(status)
}

// ----------------------------------------------------------------- sofic

#[derive(Serialize)]
struct SoficOut {
    a: String,
    b: String,
    labels: Vec<String>,
    matrix: Vec<Vec<u8>>,
    edge_touches: Vec<String>,
    checked_word: Option<Vec<i64>>,
    admissible: Option<bool>,
}

fn cmd_sofic(
    cli: &Cli,
    params: &ParamPair,
    matrix_path: Option<&Path>,
    check: Option<&str>,
) -> Result<i32> {
    let domain = build_domain(params)?;
    let lambda = lambda_of(&domain, params)?;
    let part = build_partition(&lambda, params)?;
    let tm = transition_matrix(&part)?;
    let mut out = SoficOut {
        a: params.a().to_string(),
        b: params.b().to_string(),
        labels: tm.labels.clone(),
        matrix: tm
            .entries
            .iter()
            .map(|row| row.iter().map(|&e| e as u8).collect())
            .collect(),
        edge_touches: tm.edge_touches.clone(),
        checked_word: None,
        admissible: None,
    };
    let mut status = 0;
    if let Some(text) = check {
        let word = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().with_context(|| format!("digit `{t}`")))
            .collect::<Result<Vec<i64>>>()?;
        let ok = is_admissible(&word, &tm, &part)?;
        out.checked_word = Some(word);
        out.admissible = Some(ok);
        if !ok {
            status = 2;
        }
    }
    if let Some(path) = matrix_path {
        write_file(path, &output::matrix_csv(&tm))?;
    }
    match cli.format {
        Format::Json => print_json(&out)?,
        Format::Csv => print!("{}", output::matrix_csv(&tm)),
        Format::Text => {
            println!(
                "{} symbols at (a, b) = ({}, {}): {}",
                out.labels.len(),
                out.a,
                out.b,
                out.labels.join(", ")
            );
            let width = out.labels.iter().map(|l| l.len()).max().unwrap_or(1);
            for (label, row) in out.labels.iter().zip(&out.matrix) {
                let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
                println!("  {label:>width$}  {}", cells.join(" "));
            }
            if !out.edge_touches.is_empty() {
                println!("edge touches (measure zero, not transitions):");
                for t in &out.edge_touches {
                    println!("  {t}");
                }
            }
            if let (Some(word), Some(ok)) = (&out.checked_word, out.admissible) {
                println!(
                    "word {:?} is {}",
                    word,
                    if ok { "admissible" } else { "not admissible" }
                );
            }
            if let Some(path) = matrix_path {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(status)
}

// --------------------------------------------------------------- measure

#[derive(Serialize)]
struct PieceOut {
    lo: String,
    hi: String,
    form: &'static str,
    shift: String,
}

#[derive(Serialize)]
struct QnOut {
    x: String,
    digits: usize,
    rate: f64,
    predicted: f64,
}

#[derive(Serialize)]
struct MeasureOut {
    a: String,
    b: String,
    normalizer: f64,
    entropy: f64,
    pieces: Vec<PieceOut>,
    rokhlin: Option<(f64, f64)>,
    qn: Option<QnOut>,
}

fn cmd_measure(
    cli: &Cli,
    params: &ParamPair,
    density_path: Option<&Path>,
    rokhlin: bool,
    qn: Option<usize>,
    x: Option<&str>,
) -> Result<i32> {
    let k = normalizer_of(params)?;
    let h = entropy(params)?;
    let pieces = match density(params) {
        Ok(dens) => {
            if let Some(path) = density_path {
                let csv =
                    output::density_csv(&dens, params.a().to_f64(), params.b().to_f64(), 1000);
                write_file(path, &csv)?;
            }
            dens.pieces
                .iter()
                .map(|p| PieceOut {
                    lo: p.lo.to_string(),
                    hi: p.hi.to_string(),
                    form: match p.form {
                        abcf_core::measure::PieceForm::ShiftPlus => "1/(x+shift)",
                        abcf_core::measure::PieceForm::ShiftMinus => "1/(shift-x)",
                    },
                    shift: p.shift.to_string(),
                })
                .collect()
        }
        Err(e) => {
            if density_path.is_some() {
                return Err(e.into());
            }
            Vec::new()
        }
    };
    let out = MeasureOut {
        a: params.a().to_string(),
        b: params.b().to_string(),
        normalizer: k,
        entropy: h,
        pieces,
        rokhlin: if rokhlin {
            Some(rokhlin_check(params)?)
        } else {
            None
        },
        qn: match qn {
            Some(n) => {
                let Some(x) = x else {
                    bail!("--qn requires --x");
                };
                let point = parse_point(x, "--x")?;
                let rate = qn_growth(params, point.to_f64(), n)?;
                Some(QnOut {
                    x: point.to_string(),
                    digits: n,
                    rate,
                    predicted: h / 2.0,
                })
            }
            None => None,
        },
    };
    match cli.format {
        Format::Json => print_json(&out)?,
        Format::Csv => {
            println!("key,value");
            println!("normalizer,{}", out.normalizer);
            println!("entropy,{}", out.entropy);
            if let Some((lhs, rhs)) = out.rokhlin {
                println!("rokhlin_log_moment,{lhs}");
                println!("rokhlin_predicted,{rhs}");
            }
            if let Some(q) = &out.qn {
                println!("qn_rate,{}", q.rate);
                println!("qn_predicted,{}", q.predicted);
            }
        }
        Format::Text => {
            println!("(a, b) = ({}, {})", out.a, out.b);
            println!("normalizer K = {:.12}", out.normalizer);
            println!("entropy      = {:.12}", out.entropy);
            if !out.pieces.is_empty() {
                println!("density pieces (unnormalized):");
                for p in &out.pieces {
                    println!("  [{}, {}): {} with shift {}", p.lo, p.hi, p.form, p.shift);
                }
            }
            if let Some((lhs, rhs)) = out.rokhlin {
                println!(
                    "log moment  -2 int log|x| = {lhs:.9} vs pi^2/(3K) = {rhs:.9} \
                     (diff {:.2e})",
                    (lhs - rhs).abs()
                );
            }
            if let Some(q) = &out.qn {
                println!(
                    "log q_n / n at x = {} over {} digits: {:.6} (predicted {:.6})",
                    q.x, q.digits, q.rate, q.predicted
                );
            }
            if let Some(path) = density_path {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyOut {
    seed: u64,
    passed: usize,
    failed: usize,
    outcomes: Vec<OutcomeRow>,
}

#[derive(Serialize)]
struct OutcomeRow {
    name: String,
    passed: bool,
    detail: String,
}

fn cmd_verify(cli: &Cli, suite: Suite) -> Result<i32> {
    let seed = cli.seed;
    let outcomes = match suite {
        Suite::All => verify::run_all(seed),
        Suite::Measure => vec![
            verify::normalizer_closed_form_vs_quadrature(),
            verify::transfer_operator_invariance(seed),
            verify::rokhlin_entropy_consistency(),
            verify::denominator_growth_rate(seed.wrapping_add(1)),
        ],
        Suite::Attractor => vec![verify::attractor_trapping_and_bijectivity(
            seed.wrapping_add(2),
        )],
        Suite::Reduction => vec![
            verify::equivalent_points_share_tails(seed.wrapping_add(3)),
            verify::first_return_shift_conjugacy(seed.wrapping_add(4)),
            verify::cross_section_coverage(seed.wrapping_add(7)),
            verify::return_time_telescoping(seed.wrapping_add(8)),
        ],
        Suite::Duality => vec![verify::duality_suite(seed.wrapping_add(5))],
        Suite::Sofic => vec![verify::sofic_transition_suite(seed.wrapping_add(6))],
    };
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let out = VerifyOut {
        seed,
        passed: outcomes.len() - failed,
        failed,
        outcomes: outcomes
            .iter()
            .map(|o| OutcomeRow {
                name: o.name.to_string(),
                passed: o.passed,
                detail: o.detail.clone(),
            })
            .collect(),
    };
    match cli.format {
        Format::Json => print_json(&out)?,
        Format::Csv => {
            println!("name,passed");
            for o in &out.outcomes {
                println!("{},{}", o.name, o.passed);
            }
        }
        Format::Text => {
            for o in &outcomes {
                println!("{o}");
            }
            println!(
                "{} of {} checks passed (seed {seed})",
                out.passed,
                outcomes.len()
            );
        }
    }
    Ok(if failed == 0 { 0 } else { 2 })
}

// -------------------------------------------------------------- simulate

#[derive(Serialize)]
struct SimulateOut {
    a: String,
    b: String,
    seed: u64,
    exact_domain: bool,
    samples: usize,
    reduced: usize,
    mean_steps: f64,
    max_steps: usize,
    digit_histogram: Vec<(i64, usize)>,
    mean_return_time: Option<f64>,
    normalizer_times_mean: Option<f64>,
}

fn cmd_simulate(
    cli: &Cli,
    params: &ParamPair,
    samples: usize,
    digits: usize,
    steps: usize,
    report: Option<&Path>,
) -> Result<i32> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let (lambda, exact) = match build_domain(params) {
        Ok(d) => (lambda_of(&d, params)?, true),
        Err(
            AbcfError::UnsupportedCase(_)
            | AbcfError::FinitenessUndetected(_)
            | AbcfError::CaseMismatch(_),
        ) => {
            let d = approx_domain(params, 40_000, 300, cli.seed, 400)?;
            (lambda_of(&d, params)?, false)
        }
        Err(e) => return Err(e.into()),
    };

    let mut reduced = 0usize;
    let mut step_total = 0usize;
    let mut max_steps = 0usize;
    let mut anchor: Option<GeodesicEndpoints> = None;
    for _ in 0..samples {
        let (u, w) = loop {
            let u: f64 = rng.gen_range(-25.0..25.0);
            let w: f64 = rng.gen_range(-25.0..25.0);
            if (u - w).abs() >= 1e-3 {
                break (u, w);
            }
        };
        let g = GeodesicEndpoints::new(ExtendedReal::Float(u), ExtendedReal::Float(w))?;
        if let Ok(r) = reduce_geodesic(&g, params, &lambda, cli.budget) {
            reduced += 1;
            step_total += r.steps;
            max_steps = max_steps.max(r.steps);
            anchor.get_or_insert(r.endpoints);
        }
    }

    let (af, bf) = (params.a().to_f64(), params.b().to_f64());
    let mut histogram: BTreeMap<i64, usize> = BTreeMap::new();
    for _ in 0..samples {
        let x = rng.gen_range(af + 1e-9..bf - 1e-9);
        if let Ok(e) = expand(&ExtendedReal::Float(x), params, digits) {
            let mut i = 0;
            while let Some(n) = e.digit_at(i) {
                if i >= digits {
                    break;
                }
                *histogram.entry(n).or_insert(0) += 1;
                i += 1;
            }
        }
    }

    let mut mean_return = None;
    let mut k_times_mean = None;
    if af >= -1.0 && bf <= 1.0 {
        if let Some(start) = &anchor {
            let mut cur = start.clone();
            let mut total = 0.0;
            let mut counted = 0usize;
            for _ in 0..steps {
                match return_time(&cur, params) {
                    Ok(t) => {
                        total += t;
                        counted += 1;
                    }
                    Err(_) => break,
                }
                match reduction_step(&cur, params) {
                    Ok((next, _)) => cur = next,
                    Err(_) => break,
                }
            }
            if counted > 0 {
                let mean = total / counted as f64;
                mean_return = Some(mean);
                if let Ok(k) = normalizer_of(params) {
                    k_times_mean = Some(k * mean);
                }
            }
        }
    }

    let out = SimulateOut {
        a: params.a().to_string(),
        b: params.b().to_string(),
        seed: cli.seed,
        exact_domain: exact,
        samples,
        reduced,
        mean_steps: if reduced > 0 {
            step_total as f64 / reduced as f64
        } else {
            0.0
        },
        max_steps,
        digit_histogram: histogram.into_iter().collect(),
        mean_return_time: mean_return,
        normalizer_times_mean: k_times_mean,
    };
    if let Some(path) = report {
        write_file(path, &serde_json::to_string_pretty(&out)?)?;
    }
    match cli.format {
        Format::Json => print_json(&out)?,
        Format::Csv => {
            println!("# seed {}", out.seed);
            println!("digit,count");
            for (digit, count) in &out.digit_histogram {
                println!("{digit},{count}");
            }
        }
        Format::Text => {
            println!(
                "(a, b) = ({}, {}), seed {}, {} domain",
                out.a,
                out.b,
                out.seed,
                if out.exact_domain { "exact" } else { "sampled" }
            );
            println!(
                "reduction: {}/{} geodesics in the attractor (mean {:.2} steps, max {})",
                out.reduced, out.samples, out.mean_steps, out.max_steps
            );
            let total: usize = out.digit_histogram.iter().map(|(_, c)| c).sum();
            let mut by_count = out.digit_histogram.clone();
            by_count.sort_by_key(|&(digit, count)| (std::cmp::Reverse(count), digit));
            println!("most frequent digits over {total} drawn:");
            for (digit, count) in by_count.iter().take(12) {
                println!("  {digit:>4}: {:.4}", *count as f64 / total as f64);
            }
            if by_count.len() > 12 {
                println!("  ... {} more digit values", by_count.len() - 12);
            }
            if let Some(mean) = out.mean_return_time {
                println!("mean return time = {mean:.6}");
            }
            if let Some(v) = out.normalizer_times_mean {
                println!(
                    "normalizer x mean = {v:.4} (pi^2/3 = {:.4})",
                    std::f64::consts::PI.powi(2) / 3.0
                );
            }
            if let Some(path) = report {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(0)
}
