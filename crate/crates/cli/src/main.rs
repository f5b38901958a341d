use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use esum_core::derivations::{
    derivation_space, essential_check, esum_wa_check, lp_obstruction_demo, wam_bracket, Certificate,
};
use esum_core::esum::{ESumAlgebra, ESumElement};
use esum_core::jsum::JElement;
use esum_core::tensor::Budget;
use esum_core::{Algebra, LatticeNorm, Problem, System};
use esum_lab::inputs::{load_case_dir, read_json};
use esum_lab::{builtin_cases, emit_tables, verify_cases, Format, DEFAULT_BUDGET};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "esum-lab",
    version,
    about = "Finite-scale experiments on E-sums of Banach algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice norm of a vector.
    Norm {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        vector: PathBuf,
    },
    /// C_E at the configured index size and its behaviour as the size grows.
    Ce {
        #[arg(long)]
        spec: PathBuf,
    },
    /// E-sum norm of an element.
    EsumNorm {
        #[arg(long)]
        esum: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
    /// Coordinatewise product of two elements with their norms.
    EsumMul {
        #[arg(long)]
        esum: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Unit norm and the indicator-norm bound on the summand units.
    BaiCheck {
        #[arg(long)]
        esum: PathBuf,
    },
    /// Bracket on the amenability constant of the pointwise E-sum of C.
    Am {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the configured index size.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// J-norm of an element, optionally against exhaustive enumeration.
    Jnorm {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        bruteforce: bool,
    },
    /// Sampled product and tail-seminorm checks on an algebra system.
    Jcheck {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Derivation and inner derivation spaces.
    Wa {
        #[arg(long)]
        algebra: PathBuf,
    },
    /// WAM bracket.
    Wam {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Weak amenability of an E-sum against its summands.
    EsumWa {
        #[arg(long)]
        esum: PathBuf,
        #[arg(long, default_value_t = 60)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Growth of implementing functionals for a weighted derivation on lp sums.
    LpDemo {
        #[arg(long = "B", alias = "b")]
        b: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        sizes: Vec<usize>,
        /// Dual functional; defaults to the second dual basis vector.
        #[arg(long, value_delimiter = ',')]
        psi: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Replay every built-in check and write a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to both tables.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Directory of extra JSON case documents.
    #[arg(long)]
    cases: Option<PathBuf>,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn print(value: &impl Serialize) -> AnyResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn load_esum(path: &Path) -> AnyResult<Arc<ESumAlgebra<f64>>> {
    Ok(read_json::<ESumAlgebra<f64>>(path)?.into_shared())
}

fn verify(args: VerifyArgs) -> AnyResult<bool> {
    let mut cases = builtin_cases();
    if let Some(dir) = &args.cases {
        cases.extend(load_case_dir(dir)?);
    }
    let report = verify_cases(&cases, args.seed, args.budget);
    for c in &report.cases {
        eprintln!(
            "{:<10} {:<36} {:>8.2?}  {}",
            c.status.as_str(),
            c.id,
            c.wall,
            c.detail
        );
    }
    eprintln!(
        "{} cases: {} pass, {} fail, {} too loose, {} error",
        report.cases.len(),
        report.count(esum_lab::Status::Pass),
        report.count(esum_lab::Status::Fail),
        report.count(esum_lab::Status::TooLoose),
        report.count(esum_lab::Status::Error),
    );
    let formats = match args.format {
        Some(f) => vec![f],
        None => vec![Format::Csv, Format::Json],
    };
    match &args.out {
        Some(dir) => {
            for p in emit_tables(&report, dir, &formats)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None if formats == [Format::Csv] => {
            esum_lab::report::write_csv(&report, std::io::stdout())?
        }
        None => print(&report)?,
    }
    Ok(report.passed())
}

fn run(cli: Cli) -> AnyResult<bool> {
    match cli.command {
        Command::Norm { spec, vector } => {
            let e: LatticeNorm = read_json(&spec)?;
            let v: Vec<f64> = read_json(&vector)?;
            print(&json!({ "norm": e.norm_eval(&v)? }))?;
        }
        Command::Ce { spec } => {
            let e: LatticeNorm = read_json(&spec)?;
            print(&e.ce_constant()?)?;
        }
        Command::EsumNorm { esum, element } => {
            let parent = load_esum(&esum)?;
            let x = ESumElement::new(&parent, read_json(&element)?)?;
            print(&json!({ "norm": x.esum_norm(), "summand_norms": x.summand_norms() }))?;
        }
        Command::EsumMul { esum, a, b } => {
            let parent = load_esum(&esum)?;
            let x = ESumElement::new(&parent, read_json(&a)?)?;
            let y = ESumElement::new(&parent, read_json(&b)?)?;
            let xy = x.esum_mul(&y)?;
            let bound = x.esum_norm() * y.esum_norm();
            print(&json!({
                "product": xy.values(),
                "norm": xy.esum_norm(),
                "norm_a": x.esum_norm(),
                "norm_b": y.esum_norm(),
                "submultiplicative": xy.esum_norm() <= bound * (1.0 + 1e-12),
            }))?;
        }
        Command::BaiCheck { esum } => {
            let e = load_esum(&esum)?;
            let r = e.unit_and_bai_bound_check()?;
            print(&r)?;
            return Ok(r.holds);
        }
        Command::Am {
            spec,
            n,
            budget,
            seed,
        } => {
            let mut e: LatticeNorm = read_json(&spec)?;
            if let Some(n) = n {
                e = e.with_index_size(n)?;
            }
            let problem = Problem::new(e);
            let budget = Budget::with_restarts(budget).with_seed(seed);
            let bracket = problem.gamma_norm_bracket(budget)?;
            let theorem = problem.verify_main_theorem(budget)?;
            print(&json!({ "bracket": bracket, "two_sided": theorem }))?;
        }
        Command::Jnorm {
            system,
            element,
            bruteforce,
        } => {
            let sys: System = read_json(&system)?;
            let x: JElement<f64> = read_json(&element)?;
            let x = sys.element(x.coords)?;
            let mut out = json!({ "jnorm": sys.jnorm(&x), "sup_norm": sys.sup_norm(&x) });
            if bruteforce {
                let horizon = (sys.support_end(&x) + 1).min(sys.last_level());
                out["bruteforce"] = json!(sys.jnorm_bruteforce(&x, horizon)?);
            }
            print(&out)?;
        }
        Command::Jcheck {
            system,
            samples,
            seed,
        } => {
            let sys: System = read_json(&system)?;
            let (sigma, norm) = sys.product_check(samples, seed)?;
            let omega = sys.omega_submult_check(samples, seed ^ 0x9e37_79b9)?;
            let ok = sigma.passed() && norm.passed() && omega.passed();
            print(
                &json!({ "sigma_product": sigma, "product_bound": norm, "omega_submultiplicative": omega, "passed": ok }),
            )?;
            return Ok(ok);
        }
        Command::Wa { algebra } => {
            let a: Algebra = read_json(&algebra)?;
            let r = derivation_space(&a);
            let certificate = match &r.certificate {
                Certificate::Inner { max_residual, .. } => {
                    json!({ "kind": "inner", "max_residual": max_residual })
                }
                Certificate::NotInner {
                    derivation,
                    distance_to_inner,
                } => {
                    json!({ "kind": "not_inner", "derivation": derivation.to_rows(), "distance_to_inner": distance_to_inner })
                }
            };
            print(&json!({
                "dim": r.dim,
                "dim_derivations": r.dim_derivations,
                "dim_inner": r.dim_inner,
                "dim_center": r.dim_center,
                "weakly_amenable": r.weakly_amenable,
                "essential": essential_check(&a),
                "certificate": certificate,
            }))?;
        }
        Command::Wam {
            algebra,
            samples,
            seed,
        } => {
            let a: Algebra = read_json(&algebra)?;
            print(&wam_bracket(&a, samples, seed)?)?;
        }
        Command::EsumWa {
            esum,
            samples,
            seed,
        } => {
            let e = load_esum(&esum)?;
            let r = esum_wa_check(&e, samples, seed)?;
            print(&r)?;
            return Ok(r.commutative_vanishing_holds && r.inheritance_holds && r.sandwich_holds);
        }
        Command::LpDemo {
            b,
            p,
            sizes,
            psi,
            seed,
        } => {
            let b: Algebra = read_json(&b)?;
            let psi = psi.unwrap_or_else(|| {
                (0..b.dim())
                    .map(|i| if i == 1 { 1.0 } else { 0.0 })
                    .collect()
            });
            let r = lp_obstruction_demo(&b, &psi, p, &sizes, seed)?;
            print(&r)?;
            return Ok(r.holds);
        }
        Command::Verify(args) => return verify(args),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
