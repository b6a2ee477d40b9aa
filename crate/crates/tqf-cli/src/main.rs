//! Command-line surface: per-value queries, level table generation and the
//! verification suites. All numeric output is exact; rationals render as
//! "p/q" strings, never as decimals.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 domain/misuse error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::process::ExitCode;
use tqf::arith::{Int, Rational};
use tqf::classtype::{class_number, type_number};
use tqf::densities::{self, DensityQuery, SpecialKind};
use tqf::eisenstein::{admissible_level, admissible_levels_up_to, h_level, Level};
use tqf::hurwitz::hurwitz;
use tqf::ternary::{
    aut_count, genus_enumerate, rep_number, GenusKey, TernaryForm, DEFAULT_ENUM_BUDGET,
};
use tqf::verify::{self, VerificationReport};
use tqf::Error;

const SCHEMA: &str = "tqf-typenum/1";

#[derive(Parser)]
#[command(
    name = "tqf",
    version,
    about = "Exact class and type numbers of quaternion orders via ternary quadratic forms"
)]
struct Cli {
    /// Worker threads for table and verify runs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityMode {
    Closed,
    Count,
    Both,
}

#[derive(Args)]
struct LevelArgs {
    #[arg(long)]
    n1: Int,
    #[arg(long)]
    n2: Int,
}

#[derive(Subcommand)]
enum Command {
    /// Class number h and type number T of orders of level (N1, N2).
    Typenum {
        #[command(flatten)]
        level: LevelArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// All admissible levels with N1*N2 <= max-level, with h and T.
    Table {
        #[arg(long)]
        max_level: Int,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// The level-modified class number H^(N1,N2)(D).
    Hclass {
        #[command(flatten)]
        level: LevelArgs,
        #[arg(long)]
        d: Int,
    },
    /// The Hurwitz class number H(D).
    Hurwitz {
        #[arg(long)]
        d: Int,
    },
    /// Local representation density of a ternary form at p.
    Density {
        /// Form literal "a,b,c,r,s,t".
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        p: Int,
        #[arg(long)]
        n: Int,
        #[arg(long, value_enum, default_value = "count")]
        mode: DensityMode,
    },
    /// Representation number R_f(n).
    Repnum {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        n: Int,
    },
    /// Automorphism group order of a positive definite form.
    Aut {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
    },
    /// Class representatives of the genus (level, disc, anisotropic set).
    Genus {
        #[arg(long)]
        level: Int,
        #[arg(long)]
        disc: Int,
        /// Comma-separated anisotropic primes, e.g. "2" or "2,11".
        #[arg(long, default_value = "")]
        aniso: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Even Clifford order data of a ternary form.
    Clifford {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
    },
    /// Verification suites; exits 1 if any check fails.
    Verify {
        #[arg(long)]
        suite: String,
        /// Largest N1*N2 for per-level suites.
        #[arg(long, default_value_t = 30)]
        max_level: Int,
        /// Largest D for the representation identities.
        #[arg(long, default_value_t = 200)]
        dmax: Int,
    },
}

#[derive(Serialize)]
struct Record<T: Serialize> {
    schema: &'static str,
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    inputs: Option<serde_json::Value>,
    outputs: T,
    status: String,
}

fn emit_json<T: Serialize>(command: &str, inputs: serde_json::Value, outputs: T) {
    let record = Record {
        schema: SCHEMA,
        command: command.to_string(),
        inputs: Some(inputs),
        outputs,
        status: "ok".to_string(),
    };
    println!("{}", serde_json::to_string(&record).expect("serialize"));
}

fn rat_str(r: Rational) -> String {
    r.to_string()
}

fn budget() -> Int {
    std::env::var("TQF_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_ENUM_BUDGET)
}

fn parse_level(args: &LevelArgs) -> Result<Level, Error> {
    admissible_level(args.n1, args.n2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cli.jobs;
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Typenum { level, format } => {
            let level = parse_level(&level)?;
            let h = class_number(&level)?;
            let t = type_number(&level)?;
            match format {
                Format::Json => emit_json(
                    "typenum",
                    serde_json::json!({"n1": level.n1() as i64, "n2": level.n2() as i64}),
                    serde_json::json!({"h": h as i64, "t": t as i64}),
                ),
                _ => println!("h={h} T={t}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Table { max_level, format } => {
            let rows = table_rows(max_level)?;
            match format {
                Format::Json => {
                    let json_rows: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|&(l, n1, n2, h, t)| {
                            serde_json::json!({
                                "level": l as i64, "n1": n1 as i64, "n2": n2 as i64,
                                "h": h as i64, "t": t as i64
                            })
                        })
                        .collect();
                    let record = Record {
                        schema: SCHEMA,
                        command: "table".into(),
                        inputs: Some(serde_json::json!({"max_level": max_level as i64})),
                        outputs: serde_json::json!({"rows": json_rows}),
                        status: "ok".into(),
                    };
                    println!("{}", serde_json::to_string(&record).expect("serialize"));
                }
                _ => {
                    println!("level,n1,n2,h,t");
                    for (l, n1, n2, h, t) in rows {
                        println!("{l},{n1},{n2},{h},{t}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Hclass { level, d } => {
            let level = parse_level(&level)?;
            println!("{}", rat_str(h_level(d, &level)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Hurwitz { d } => {
            println!("{}", rat_str(hurwitz(d)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Density { form, p, n, mode } => {
            let form = TernaryForm::parse(&form)?;
            let closed = match mode {
                DensityMode::Count => None,
                _ => Some(closed_density(&form, p, n)?),
            };
            let counted = match mode {
                DensityMode::Closed => None,
                _ => Some(densities::density_count(&DensityQuery { form, p, n })?),
            };
            match (closed, counted) {
                (Some(c), None) => println!("{}", rat_str(c)),
                (None, Some(c)) => println!("{}", rat_str(c)),
                (Some(a), Some(b)) => {
                    let verdict = if a == b { "agree" } else { "DISAGREE" };
                    println!("closed={} count={} {}", rat_str(a), rat_str(b), verdict);
                    if a != b {
                        return Ok(ExitCode::from(1));
                    }
                }
                (None, None) => unreachable!(),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Repnum { form, n } => {
            let form = TernaryForm::parse(&form)?;
            if !form.is_positive_definite() {
                return Err(Error::Domain("form is not positive definite".into()));
            }
            println!("{}", rep_number(&form, n));
            Ok(ExitCode::SUCCESS)
        }
        Command::Aut { form } => {
            let form = TernaryForm::parse(&form)?;
            if !form.is_positive_definite() {
                return Err(Error::Domain("form is not positive definite".into()));
            }
            println!("{}", aut_count(&form));
            Ok(ExitCode::SUCCESS)
        }
        Command::Genus {
            level,
            disc,
            aniso,
            format,
        } => {
            let aniso: Vec<Int> = if aniso.trim().is_empty() {
                Vec::new()
            } else {
                aniso
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse()
                            .map_err(|_| Error::Domain(format!("bad prime {s:?}")))
                    })
                    .collect::<Result<_, _>>()?
            };
            let key = GenusKey::new(level, disc, aniso.clone());
            let classes = genus_enumerate(&key, budget())?;
            match format {
                Format::Json => {
                    let rows: Vec<serde_json::Value> = classes
                        .iter()
                        .map(|f| {
                            serde_json::json!(f
                                .coeffs()
                                .iter()
                                .map(|&v| v as i64)
                                .collect::<Vec<i64>>())
                        })
                        .collect();
                    emit_json(
                        "genus",
                        serde_json::json!({
                            "level": level as i64, "disc": disc as i64,
                            "aniso": aniso.iter().map(|&p| p as i64).collect::<Vec<i64>>()
                        }),
                        serde_json::json!({"classes": rows}),
                    );
                }
                _ => {
                    for f in &classes {
                        println!("{f}");
                    }
                    eprintln!("{} classes", classes.len());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Clifford { form } => {
            let form = TernaryForm::parse(&form)?;
            let order = tqf::clifford::clifford_order(&form)?;
            println!("discrd={}", order.reduced_discriminant());
            println!("associated={}", tqf::clifford::associated_form(&order));
            println!("trace_zero={}", tqf::clifford::trace_zero_form(&order)?);
            println!(
                "half_integral={}",
                tqf::clifford::half_integral_form(&order)?
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            suite,
            max_level,
            dmax,
        } => {
            let reports = run_suite(&suite, max_level, dmax)?;
            let mut all_pass = true;
            let mut total = 0usize;
            for report in &reports {
                let ok = report.passed();
                all_pass &= ok;
                total += report.checks.len();
                println!(
                    "{} {} [{}] {} checks ({} ms)",
                    if ok { "PASS" } else { "FAIL" },
                    report.suite,
                    report.subject,
                    report.checks.len(),
                    report.elapsed_ms
                );
                for failure in report.failures() {
                    println!(
                        "  mismatch: {} expected {} got {}",
                        failure.description, failure.expected, failure.actual
                    );
                }
            }
            println!(
                "{}: {} reports, {} checks",
                if all_pass { "PASS" } else { "FAIL" },
                reports.len(),
                total
            );
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn table_rows(max_level: Int) -> Result<Vec<(Int, Int, Int, Int, Int)>, Error> {
    tqf::classtype::level_table(max_level)
}

/// Match the form against the closed-form density families of the diagonal
/// models; errors when the form is outside all of them.
fn closed_density(form: &TernaryForm, p: Int, n: Int) -> Result<Rational, Error> {
    let t = |f: TernaryForm| f.coeffs();
    // -x^2 - yz at odd p away from 2d
    if p > 2 && t(*form) == t(TernaryForm::new(-1, 0, 0, -1, 0, 0)) {
        return Ok(densities::density_siegel_unramified(p, n));
    }
    if p > 2 {
        for u in 0..8 {
            if t(*form) == t(densities::aniso_odd_form(p, u)) {
                return Ok(densities::density_aniso_odd(p, u, n));
            }
            if t(*form) == t(densities::special_form(SpecialKind::AnisoOdd, p, u)) {
                return densities::density_special_values(SpecialKind::AnisoOdd, p, n);
            }
        }
        for v in 0..16 {
            if t(*form) == t(densities::iso_odd_form(p, v)) {
                return Ok(densities::density_iso_odd(p, v, n));
            }
            if t(*form) == t(densities::special_form(SpecialKind::IsoOdd, p, v)) {
                return densities::density_special_values(SpecialKind::IsoOdd, p, n);
            }
        }
    } else {
        for u in 0..8 {
            if t(*form) == t(densities::aniso_two_form(u)) {
                return Ok(densities::density_aniso_two(u, n));
            }
            if t(*form) == t(densities::special_form(SpecialKind::AnisoTwo, 2, u)) {
                return densities::density_special_values(SpecialKind::AnisoTwo, 2, n);
            }
        }
        for v in 0..16 {
            if t(*form) == t(densities::iso_two_form(v)) {
                return Ok(densities::density_iso_two(v, n));
            }
            if t(*form) == t(densities::special_form(SpecialKind::IsoTwo, 2, v)) {
                return densities::density_special_values(SpecialKind::IsoTwo, 2, n);
            }
        }
        for e in 0..3u32 {
            if t(*form) == t(TernaryForm::new(-1, 0, 0, -(1 << e), 0, 0)) {
                return Ok(densities::density_two_hyperbolic(e, n));
            }
        }
        if t(*form) == t(TernaryForm::new(3, -2, -2, -2, 0, 0)) {
            return Ok(densities::density_two_aniso_base(n));
        }
    }
    Err(Error::Domain(format!(
        "form {form} matches no closed-form density family at p = {p}"
    )))
}

fn run_suite(suite: &str, max_level: Int, dmax: Int) -> Result<Vec<VerificationReport>, Error> {
    let levels = admissible_levels_up_to(max_level);
    let b = budget();
    match suite {
        "mass" => levels.iter().map(|l| verify::verify_mass(l, b)).collect(),
        "theta" => levels
            .iter()
            .map(|l| verify::verify_theta_identity(l, dmax, b))
            .collect(),
        "typecount" => levels
            .iter()
            .map(|l| verify::verify_type_count(l, b))
            .collect(),
        "rho" => levels
            .iter()
            .map(|l| verify::verify_rho_identity(l, dmax.min(100), b))
            .collect(),
        "chain" => levels.iter().map(|l| verify::verify_chain(l, b)).collect(),
        "appendixA" | "tables" => Ok(vec![verify::verify_reference_tables(match suite {
            "appendixA" => 823_543.max(max_level),
            _ => max_level,
        })?]),
        "appendixB" | "classone" => {
            let levels: Vec<Level> = tqf::reference::CLASS_NUMBER_ONE_LEVELS
                .iter()
                .map(|&(n1, n2)| admissible_level(n1, n2))
                .collect::<Result<_, _>>()?;
            // the largest single-class level is (78, 1) with genus
            // discriminant 16 * 78^2
            let needed = levels
                .iter()
                .map(|l| 16 * l.product() * l.product())
                .max()
                .unwrap_or(0);
            Ok(vec![verify::verify_class_one(&levels, dmax, b.max(needed))?])
        }
        "all" => {
            let mut reports = run_suite("tables", max_level.max(100), dmax)?;
            for sub in ["mass", "typecount", "theta", "rho", "chain"] {
                reports.extend(run_suite(sub, max_level, dmax)?);
            }
            reports.extend(run_suite("classone", max_level, dmax)?);
            Ok(reports)
        }
        other => Err(Error::Domain(format!(
            "unknown suite {other:?}; try typenum suites: mass, theta, typecount, rho, chain, tables, appendixA, appendixB, all"
        ))),
    }
}
