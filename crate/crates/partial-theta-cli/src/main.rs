//! ptheta: evaluation, certified zero-finding, spectrum location and
//! theorem verification for the partial theta function.
//!
//! One well-formed document per run goes to stdout (JSON, or CSV for
//! sweeps); diagnostics go to stderr. Exit codes: 0 success, 2 domain
//! error, 3 precision budget exceeded, 4 certification failure.

mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use partial_theta::eval::ThetaStarMethod;
use partial_theta::spectrum::{spectrum_table_with, CountPolicy, TableOptions};
use partial_theta::zeros::TailPolicy;
use partial_theta::{Error, QParam};
use rayon::prelude::*;
use report::{Cx, EvalDoc, SpectrumDoc, SweepDoc, VerifyDoc, VerifyPart, ZerosDoc, SCHEMA_VERSION};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "ptheta",
    version,
    about = "Partial theta function toolkit: rigorous evaluation, certified zeros, spectrum, theorem checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EvalFunction {
    Theta,
    ThetaDx,
    ThetaDq,
    ThetaStar,
    Xi,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StarMethod {
    Bilateral,
    TripleProduct,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepReport {
    Alternation,
    Pairs,
}

#[derive(Args)]
struct QArg {
    /// Parameter q: "0.4", "-0.5" or "re,im" (|q| < 1)
    #[arg(long, allow_hyphen_values = true)]
    q: String,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate theta or a companion series at one point
    Eval {
        #[command(flatten)]
        q: QArg,
        /// Evaluation point x: "1.0", "-2.5" or "re,im"
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long = "fn", value_enum, default_value = "theta")]
        function: EvalFunction,
        /// Summation route for theta-star
        #[arg(long, value_enum, default_value = "bilateral")]
        method: StarMethod,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Complete certified zero set in a disk
    Zeros {
        #[command(flatten)]
        q: QArg,
        /// Disk radius
        #[arg(long, conflicts_with = "radius_exp")]
        radius: Option<f64>,
        /// Disk radius as |q|^{-radius_exp}
        #[arg(long)]
        radius_exp: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Table of spectral values q~_1 .. q~_{j_max}
    Spectrum {
        #[arg(long, default_value_t = 1)]
        j_max: u32,
        /// Cache file (default: $PTHETA_CACHE if set)
        #[arg(long)]
        cache: Option<std::path::PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Budget limit on q (spectral values above are refused)
        #[arg(long, default_value_t = 0.87)]
        q_max: f64,
    },
    /// Numerically verify the structure theorems at a fixed q
    Verify {
        #[command(flatten)]
        q: QArg,
        /// Tail indices checked: k0 .. k0+k_span-1
        #[arg(long, default_value_t = 16)]
        k_span: usize,
        /// Factors in the product reconstruction
        #[arg(long, default_value_t = 25)]
        product_k: usize,
        /// Points on the |x| = 2 test circle
        #[arg(long, default_value_t = 20)]
        grid_points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Reports over a range of q values
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        q_from: f64,
        #[arg(long, allow_hyphen_values = true)]
        q_to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum)]
        report: SweepReport,
        /// Ladder slots per point (alternation report)
        #[arg(long, default_value_t = 12)]
        k_max: usize,
        #[arg(long, value_enum, default_value = "csv")]
        output_format: OutputFormat,
        /// Concurrency limit for sweep points
        #[arg(long)]
        jobs: Option<usize>,
        /// Pin iteration order and disable concurrency
        #[arg(long, default_value_t = false)]
        deterministic: bool,
    },
}

fn parse_complex(s: &str) -> Result<Complex64, Error> {
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Domain(format!("cannot parse '{t}' as a number")))
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(s)?, 0.0)),
    }
}

fn parse_q(s: &str) -> Result<QParam, Error> {
    QParam::new(parse_complex(s)?)
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(doc) => {
            println!("{doc}");
        }
        Err(e) => {
            eprintln!("ptheta: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Eval {
            q,
            x,
            function,
            method,
            tol,
        } => cmd_eval(&q.q, &x, function, method, tol),
        Command::Zeros {
            q,
            radius,
            radius_exp,
            tol,
        } => cmd_zeros(&q.q, radius, radius_exp, tol),
        Command::Spectrum {
            j_max,
            cache,
            tol,
            q_max,
        } => cmd_spectrum(j_max, cache, tol, q_max),
        Command::Verify {
            q,
            k_span,
            product_k,
            grid_points,
            tol,
        } => cmd_verify(&q.q, k_span, product_k, grid_points, tol),
        Command::Sweep {
            q_from,
            q_to,
            steps,
            report,
            k_max,
            output_format,
            jobs,
            deterministic,
        } => cmd_sweep(
            q_from,
            q_to,
            steps,
            report,
            k_max,
            output_format,
            jobs,
            deterministic,
        ),
    }
}

fn to_json<T: serde::Serialize>(doc: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(doc).map_err(|e| Error::Domain(format!("serialize: {e}")))
}

fn cmd_eval(
    q: &str,
    x: &str,
    function: EvalFunction,
    method: StarMethod,
    tol: f64,
) -> Result<String, Error> {
    let qp = parse_q(q)?;
    let xv = parse_complex(x)?;
    let (name, method_name, result) = match function {
        EvalFunction::Theta => ("theta", None, partial_theta::eval_theta(&qp, xv, tol)?),
        EvalFunction::ThetaDx => (
            "theta_dx",
            None,
            partial_theta::eval_theta_dx(&qp, xv, tol)?,
        ),
        EvalFunction::ThetaDq => (
            "theta_dq",
            None,
            partial_theta::eval_theta_dq(&qp, xv, tol)?,
        ),
        EvalFunction::ThetaStar => {
            let (m, mn) = match method {
                StarMethod::Bilateral => (ThetaStarMethod::BilateralSum, "bilateral_sum"),
                StarMethod::TripleProduct => (ThetaStarMethod::TripleProduct, "triple_product"),
            };
            (
                "theta_star",
                Some(mn),
                partial_theta::eval_jacobi_theta_star(&qp, xv, tol, m)?,
            )
        }
        EvalFunction::Xi => ("xi", None, partial_theta::eval_xi(&qp, xv, tol)?),
    };
    to_json(&EvalDoc::new(qp.value(), xv, name, method_name, &result))
}

fn cmd_zeros(
    q: &str,
    radius: Option<f64>,
    radius_exp: Option<f64>,
    tol: f64,
) -> Result<String, Error> {
    let qp = parse_q(q)?;
    let radius = match (radius, radius_exp) {
        (Some(r), None) => r,
        (None, Some(e)) => qp.modulus().powf(-e),
        (None, None) => {
            return Err(Error::Domain(
                "one of --radius or --radius-exp is required".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let set = partial_theta::find_zeros_in_disk(&qp, radius, tol)?;
    to_json(&ZerosDoc::new(&set))
}

fn cmd_spectrum(
    j_max: u32,
    cache: Option<std::path::PathBuf>,
    tol: f64,
    q_max: f64,
) -> Result<String, Error> {
    let cache = cache.or_else(|| std::env::var_os("PTHETA_CACHE").map(Into::into));
    let opts = TableOptions {
        tol,
        q_max,
        ..TableOptions::default()
    };
    match spectrum_table_with(j_max, cache.as_deref(), &opts) {
        Ok(table) => to_json(&SpectrumDoc::new(&table, false)),
        Err(e) => {
            // the partial table is still a complete, well-formed document
            let doc = to_json(&SpectrumDoc::new(&e.partial, true))?;
            println!("{doc}");
            eprintln!("ptheta: {e}");
            std::process::exit(e.cause.exit_code());
        }
    }
}

fn pass_fail(parts: &mut Vec<VerifyPart>, part: u32, name: &'static str, pass: bool, details: serde_json::Value) {
    parts.push(VerifyPart {
        part,
        name,
        pass,
        details,
    });
}

fn cmd_verify(
    q: &str,
    k_span: usize,
    product_k: usize,
    grid_points: usize,
    tol: f64,
) -> Result<String, Error> {
    let qp = parse_q(q)?;
    qp.require_nonzero()?;
    let mut parts = Vec::new();

    // part 1: tail zeros near -q^{-k}
    let policy = TailPolicy::for_param(&qp)?;
    let mut e_seq = Vec::new();
    let mut all_simple = true;
    for k in policy.k0..policy.k0 + k_span.max(6) {
        let z = partial_theta::certify_tail_zero(&qp, k, policy.delta_rel)?;
        all_simple &= z.multiplicity == 1;
        let disp = partial_theta::eval::tail_zero_displacement(qp.value(), k)?;
        e_seq.push(disp.e);
    }
    let trend_ok = e_seq
        .windows(6)
        .all(|w| w[5] < w[0]);
    let last_small = *e_seq.last().unwrap() < 1e-3;
    pass_fail(
        &mut parts,
        1,
        "tail_zeros",
        all_simple && trend_ok && last_small,
        json!({
            "k0": policy.k0,
            "delta_rel": policy.delta_rel,
            "e_first": e_seq.first(),
            "e_last": e_seq.last(),
            "trend_ok": trend_ok,
        }),
    );

    // part 2: product reconstruction on |x| = 2
    let slots = product_k.max(10);
    let set = partial_theta::assemble_zero_ladder(&qp, slots, tol)?;
    let grid: Vec<Complex64> = (0..grid_points.max(4))
        .map(|i| {
            Complex64::from_polar(
                2.0,
                2.0 * std::f64::consts::PI * i as f64 / grid_points.max(4) as f64,
            )
        })
        .collect();
    let hi = partial_theta::reconstruct_product(&set, slots, &grid)?;
    let lo = partial_theta::reconstruct_product(&set, 10.min(slots), &grid)?;
    let mut part2_ok = true;
    let mut max_rel = 0.0f64;
    for (a, b) in lo.points.iter().zip(&hi.points) {
        part2_ok &= b.rel_error <= b.tail_factor_bound + 1e-10;
        if slots > 10 {
            part2_ok &= b.rel_error < a.rel_error;
        }
        max_rel = max_rel.max(b.rel_error);
    }
    pass_fail(
        &mut parts,
        2,
        "product_formula",
        part2_ok,
        json!({ "k_used": hi.k_used, "max_rel_error": max_rel }),
    );

    // part 3: decomposition and the coefficient-bound chain (positive q)
    if qp.require_positive_real().is_ok() {
        let d = partial_theta::decompose(&set)?;
        let lp = partial_theta::lp_bound_check(&set, 8)?;
        let pairs_indep = partial_theta::complex_pair_count(&qp, &CountPolicy::default())?;
        let min_margin = lp.bound_margin.iter().cloned().fold(f64::INFINITY, f64::min);
        let ok = d.poly_coeffs[0] == 1.0
            && d.complex_pairs.len() == pairs_indep
            && lp.d_estimate > 0.0
            && min_margin >= 1.0 - 1e-9;
        pass_fail(
            &mut parts,
            3,
            "lp_decomposition",
            ok,
            json!({
                "pairs": d.complex_pairs.len(),
                "d_estimate": lp.d_estimate,
                "min_margin": min_margin,
            }),
        );
    }

    // part 4: at most finitely many multiple zeros (all tail rungs simple)
    let multiple: usize = set
        .zeros
        .iter()
        .filter(|z| z.multiplicity > 1)
        .count();
    pass_fail(
        &mut parts,
        4,
        "finitely_many_multiple_zeros",
        all_simple,
        json!({ "multiple_zeros_in_disk": multiple }),
    );

    // part 5: negative-q structure
    if qp.require_negative_real().is_ok() {
        let rep = partial_theta::negative_q_report(&set, slots)?;
        pass_fail(
            &mut parts,
            5,
            "negative_q_structure",
            rep.sign_alternation_ok,
            json!({
                "monotone_from": rep.monotone_from,
                "complex_pair_count": rep.complex_pair_count,
            }),
        );
    }

    let all_pass = parts.iter().all(|p| p.pass);
    to_json(&VerifyDoc {
        schema_version: SCHEMA_VERSION,
        command: "verify",
        q: Cx::from(qp.value()),
        parts,
        all_pass,
    })
}

fn sweep_row(q: f64, report: SweepReport, k_max: usize) -> Result<serde_json::Value, Error> {
    let qp = QParam::real(q)?;
    match report {
        SweepReport::Alternation => {
            let set = partial_theta::assemble_zero_ladder(&qp, k_max, 1e-10)?;
            let rep = partial_theta::negative_q_report(&set, k_max)?;
            Ok(json!({
                "q": q,
                "zero_count": rep.real_zeros_signed.len() + 2 * rep.complex_pair_count,
                "pair_count": rep.complex_pair_count,
                "alternation_ok": rep.sign_alternation_ok,
                "monotone_from": rep.monotone_from,
            }))
        }
        SweepReport::Pairs => {
            let pairs = partial_theta::complex_pair_count(&qp, &CountPolicy::default())?;
            Ok(json!({ "q": q, "pair_count": pairs }))
        }
    }
}

fn sweep_csv(report: SweepReport, rows: &[serde_json::Value]) -> String {
    let headers: &[&str] = match report {
        SweepReport::Alternation => &[
            "q",
            "zero_count",
            "pair_count",
            "alternation_ok",
            "monotone_from",
        ],
        SweepReport::Pairs => &["q", "pair_count"],
    };
    let mut out = headers.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = headers
            .iter()
            .map(|h| {
                let v = &row[h];
                match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                }
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    // trailing newline removed: the caller prints with println!
    out.pop();
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    q_from: f64,
    q_to: f64,
    steps: usize,
    report: SweepReport,
    k_max: usize,
    output_format: OutputFormat,
    jobs: Option<usize>,
    deterministic: bool,
) -> Result<String, Error> {
    if steps < 1 {
        return Err(Error::Domain("steps must be >= 1".into()));
    }
    let qs: Vec<f64> = if steps == 1 {
        vec![q_from]
    } else {
        (0..steps)
            .map(|i| q_from + (q_to - q_from) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let rows: Vec<Result<serde_json::Value, Error>> = if deterministic {
        qs.iter().map(|&q| sweep_row(q, report, k_max)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.unwrap_or(0))
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
        pool.install(|| {
            qs.par_iter()
                .map(|&q| sweep_row(q, report, k_max))
                .collect()
        })
    };
    let rows: Vec<serde_json::Value> = rows.into_iter().collect::<Result<_, _>>()?;
    match output_format {
        OutputFormat::Csv => Ok(sweep_csv(report, &rows)),
        OutputFormat::Json => to_json(&SweepDoc {
            schema_version: SCHEMA_VERSION,
            command: "sweep",
            report: format!("{report:?}").to_lowercase(),
            rows,
        }),
    }
}
