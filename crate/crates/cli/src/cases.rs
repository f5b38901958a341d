use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use esum_core::derivations::{
    derivation_space, essential_check, esum_wa_check, lp_obstruction_demo,
    wa_quotient_transfer_check, wam_bracket,
};
use esum_core::esum::ESumAlgebra;
use esum_core::tensor::{am_pointwise, Budget};
use esum_core::{Algebra, LatticeNorm, Orlicz, Problem, System};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::report::{CaseResult, Status};

/// Short names for the claims the suite replays, with a one-line gloss.
pub const ANCHORS: &[(&str, &str)] = &[
    (
        "am-sharpness",
        "AM of the pointwise l2 sum on n points is n = C_E^2",
    ),
    ("am-c0", "pointwise sup sums have amenability constant one"),
    ("am-two-sided", "1 <= AM <= C_E^2 for pointwise E-sums"),
    (
        "am-quotient",
        "restricting to a subset does not increase the constant",
    ),
    (
        "lattice-lp-indicator",
        "indicator norms in lp grow like |F|^(1/p)",
    ),
    (
        "lattice-orlicz-indicator",
        "Luxemburg indicator norm is 1/phi^-1(1/|F|)",
    ),
    (
        "lattice-weighted-ce",
        "C_E of a weighted sup norm is the top weight",
    ),
    (
        "lattice-orlicz-limit",
        "C_E of a degenerate Orlicz norm is 1/a_phi",
    ),
    ("esum-unit", "the unit of a unital E-sum has norm one"),
    (
        "j-recursion",
        "the J-norm recursion equals the supremum over chains",
    ),
    (
        "j-elementary",
        "sigma <= rho <= sqrt2 |x|_J and |x_n| <= |x|_J",
    ),
    ("j-singleton", "single coordinates embed isometrically"),
    (
        "j-bimonotone",
        "coordinate blocks form a bimonotone decomposition",
    ),
    (
        "j-product",
        "sigma product rule and the 3/sqrt2 product bound",
    ),
    (
        "omega-submult",
        "the coherent tail seminorm is submultiplicative",
    ),
    (
        "wa-decision",
        "weak amenability decided by derivation space linear algebra",
    ),
    ("wa-essential", "weak amenability forces A^2 = A"),
    (
        "wa-commutative-sum",
        "commutative weakly amenable sums carry no derivations",
    ),
    (
        "wa-summand",
        "a weakly amenable sum has weakly amenable summands",
    ),
    (
        "wam-sup-sum",
        "the sup sum has the constant of its worst summand",
    ),
    ("wam-transfer", "WAM(A_i) <= |delta_i| WAM(A)"),
    (
        "wam-bracket",
        "sampled lower and certified upper bound on WAM",
    ),
    (
        "lp-obstruction",
        "per-coordinate growth of implementing functionals on lp sums",
    ),
    ("input-document", "a case read from a JSON document"),
];

pub fn anchor_known(anchor: &str) -> bool {
    ANCHORS.iter().any(|(a, _)| *a == anchor)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    /// `|got − value| ≤ tol`, scaled by `max(1, |value|)` when `relative`.
    Value {
        value: f64,
        relative: bool,
    },
    /// `lo − tol ≤ got ≤ hi + tol`.
    Range {
        lo: f64,
        hi: f64,
    },
    Holds,
}

impl Expectation {
    pub fn exact(value: f64) -> Self {
        Expectation::Value {
            value,
            relative: false,
        }
    }

    pub fn relative(value: f64) -> Self {
        Expectation::Value {
            value,
            relative: true,
        }
    }

    fn render(&self) -> String {
        match self {
            Expectation::Value { value, .. } => format!("{value}"),
            Expectation::Range { lo, hi } => format!("[{lo}, {hi}]"),
            Expectation::Holds => "true".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Got {
    Value(f64),
    Bracket { lower: f64, upper: f64 },
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub got: Got,
    pub too_loose: bool,
    pub detail: String,
}

impl Measured {
    pub fn value(v: f64) -> Self {
        Self {
            got: Got::Value(v),
            too_loose: false,
            detail: String::new(),
        }
    }

    pub fn holds(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            got: Got::Bool(ok),
            too_loose: false,
            detail: detail.into(),
        }
    }

    pub fn bracket(lower: f64, upper: f64, too_loose: bool) -> Self {
        Self {
            got: Got::Bracket { lower, upper },
            too_loose,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// What a runner sees: a seed derived from the case id and the search budget.
#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub seed: u64,
    pub budget: usize,
}

impl Ctx {
    pub fn budget(&self) -> Budget {
        Budget::with_restarts(self.budget).with_seed(self.seed)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

type Runner = Box<dyn Fn(&Ctx) -> Result<Measured, String> + Send + Sync>;

pub struct VerificationCase {
    pub id: String,
    pub anchor: String,
    pub expectation: Expectation,
    pub tol: f64,
    runner: Runner,
}

impl std::fmt::Debug for VerificationCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VerificationCase")
            .field("id", &self.id)
            .field("anchor", &self.anchor)
            .field("expectation", &self.expectation)
            .field("tol", &self.tol)
            .finish_non_exhaustive()
    }
}

/// Stable per-case seed: the first eight bytes of `sha256(seed ‖ id)`.
pub fn case_seed(seed: u64, id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(id.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("eight bytes"))
}

fn judge(e: Expectation, got: Got, tol: f64) -> Option<bool> {
    let near =
        |g: f64, v: f64, rel: bool| (g - v).abs() <= if rel { tol * v.abs().max(1.0) } else { tol };
    Some(match (e, got) {
        (Expectation::Value { value, relative }, Got::Value(g)) => near(g, value, relative),
        (Expectation::Value { value, relative }, Got::Bracket { lower, upper }) => {
            near(lower, value, relative) && near(upper, value, relative)
        }
        (Expectation::Range { lo, hi }, Got::Value(g)) => g >= lo - tol && g <= hi + tol,
        (Expectation::Range { lo, hi }, Got::Bracket { lower, upper }) => {
            lower >= lo - tol && upper <= hi + tol
        }
        (Expectation::Holds, Got::Bool(b)) => b,
        _ => return None,
    })
}

fn render(got: Got) -> String {
    match got {
        Got::Value(v) => format!("{v}"),
        Got::Bracket { lower, upper } => format!("[{lower}, {upper}]"),
        Got::Bool(b) => format!("{b}"),
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

impl VerificationCase {
    pub fn new(
        id: impl Into<String>,
        anchor: &str,
        expectation: Expectation,
        tol: f64,
        runner: impl Fn(&Ctx) -> Result<Measured, String> + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            expectation,
            tol,
            runner: Box::new(runner),
        }
    }

    /// Runs the case in isolation: errors and panics become an `error` row.
    pub fn run(&self, seed: u64, budget: usize) -> CaseResult {
        let ctx = Ctx {
            seed: case_seed(seed, &self.id),
            budget,
        };
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| (self.runner)(&ctx)));
        let wall = start.elapsed();
        let (got, status, detail) = match outcome {
            Ok(Ok(m)) => {
                let status = match judge(self.expectation, m.got, self.tol) {
                    Some(true) => Status::Pass,
                    Some(false) if m.too_loose => Status::TooLoose,
                    Some(false) => Status::Fail,
                    None => Status::Error,
                };
                (render(m.got), status, m.detail)
            }
            Ok(Err(e)) => (String::new(), Status::Error, e),
            Err(p) => (
                String::new(),
                Status::Error,
                format!("panicked: {}", panic_message(p)),
            ),
        };
        CaseResult {
            id: self.id.clone(),
            anchor: self.anchor.clone(),
            expected: self.expectation.render(),
            got,
            tol: self.tol,
            status,
            detail,
            wall,
        }
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn am_case(id: String, anchor: &str, want: f64, spec: LatticeNorm) -> VerificationCase {
    VerificationCase::new(id, anchor, Expectation::relative(want), 1e-6, move |ctx| {
        let b = am_pointwise(&spec, ctx.budget()).map_err(err)?;
        Ok(Measured::bracket(b.lower, b.upper, b.too_loose)
            .with_detail(format!("upper from {}", b.witness_upper.label)))
    })
}

/// One of the sandwich families, drawn from the case seed.
fn random_sandwich_spec(rng: &mut ChaCha8Rng) -> Result<LatticeNorm, String> {
    let n = rng.random_range(1..=5);
    match rng.random_range(0..3) {
        0 => LatticeNorm::weighted_sup((0..n).map(|_| rng.random_range(1.0..=3.0)).collect()),
        1 => LatticeNorm::lp([1.0, 1.5, 2.0, 3.0][rng.random_range(0..4)], n),
        _ => Orlicz::shifted_ramp([0.25, 0.5][rng.random_range(0..2)])
            .and_then(|phi| LatticeNorm::orlicz(phi, n)),
    }
    .map_err(err)
}

fn am_cases(out: &mut Vec<VerificationCase>) {
    for n in 1..=6 {
        out.push(am_case(
            format!("am.sharp.l2.n{n}"),
            "am-sharpness",
            n as f64,
            LatticeNorm::lp(2.0, n).unwrap(),
        ));
    }
    for n in 1..=8 {
        out.push(am_case(
            format!("am.c0.n{n}"),
            "am-c0",
            1.0,
            LatticeNorm::sup(n).unwrap(),
        ));
    }
    for k in 0..30 {
        out.push(VerificationCase::new(
            format!("am.sandwich.{k:02}"),
            "am-two-sided",
            Expectation::Holds,
            1e-6,
            |ctx| {
                let spec = random_sandwich_spec(&mut ctx.rng())?;
                let r = Problem::new(spec.clone())
                    .verify_main_theorem(ctx.budget())
                    .map_err(err)?;
                let ok = r.lower >= 1.0 - 1e-6 && r.upper <= r.ce_squared + 1e-6;
                let detail = format!(
                    "{:?}: [{}, {}] vs C_E^2 = {}",
                    spec.kind(),
                    r.lower,
                    r.upper,
                    r.ce_squared
                );
                Ok(Measured {
                    got: Got::Bool(ok),
                    too_loose: r.too_loose,
                    detail,
                })
            },
        ));
    }
    out.push(VerificationCase::new(
        "am.quotient.l1",
        "am-quotient",
        Expectation::Holds,
        0.0,
        |ctx| {
            let r = Problem::new(LatticeNorm::lp(1.0, 4).map_err(err)?)
                .verify_quotient_bound(&[0, 2], ctx.budget())
                .map_err(err)?;
            Ok(Measured::holds(
                r.holds,
                format!("{} <= {}", r.target_upper, r.source_upper),
            ))
        },
    ));
}

fn lattice_cases(out: &mut Vec<VerificationCase>) {
    for (p, n) in [(1.0, 5usize), (1.5, 8), (2.0, 16), (3.0, 27), (4.0, 1000)] {
        out.push(VerificationCase::new(
            format!("lattice.chi.lp.p{p}.n{n}"),
            "lattice-lp-indicator",
            Expectation::exact((n as f64).powf(1.0 / p)),
            0.0,
            move |_| {
                Ok(Measured::value(
                    LatticeNorm::lp(p, n)
                        .map_err(err)?
                        .chi_norm(n)
                        .map_err(err)?,
                ))
            },
        ));
    }
    // Closed forms of 1/φ⁻¹(1/n) against Luxemburg bisection on the all-ones vector.
    type Closed = fn(usize) -> f64;
    let orlicz: Vec<(&str, Orlicz, Closed)> = vec![
        ("ramp0.25", Orlicz::shifted_ramp(0.25).unwrap(), |n| {
            1.0 / (0.25 + 0.75 / n as f64)
        }),
        ("ramp0.5", Orlicz::shifted_ramp(0.5).unwrap(), |n| {
            1.0 / (0.5 + 0.5 / n as f64)
        }),
        ("power3", Orlicz::power(3.0).unwrap(), |n| (n as f64).cbrt()),
    ];
    for (name, phi, closed) in orlicz {
        for n in [1usize, 2, 7, 50] {
            let phi = phi.clone();
            out.push(VerificationCase::new(
                format!("lattice.chi.orlicz.{name}.n{n}"),
                "lattice-orlicz-indicator",
                Expectation::relative(closed(n)),
                1e-9,
                move |_| {
                    let e = LatticeNorm::orlicz(phi.clone(), n).map_err(err)?;
                    Ok(Measured::value(e.norm_eval(&vec![1.0; n]).map_err(err)?))
                },
            ));
        }
    }
    out.push(VerificationCase::new(
        "lattice.ce.weighted",
        "lattice-weighted-ce",
        Expectation::exact(2.5),
        0.0,
        |_| {
            let e = LatticeNorm::weighted_sup(vec![1.0, 2.5, 1.75, 1.0]).map_err(err)?;
            Ok(Measured::value(e.ce_constant().map_err(err)?.horizon_value))
        },
    ));
    for a in [0.25, 0.5] {
        out.push(VerificationCase::new(
            format!("lattice.orlicz-limit.a{a}"),
            "lattice-orlicz-limit",
            Expectation::exact(1.0 / a),
            1e-4,
            move |_| {
                let n = 1_000_000;
                let e =
                    LatticeNorm::orlicz(Orlicz::shifted_ramp(a).map_err(err)?, n).map_err(err)?;
                Ok(Measured::value(e.chi_norm(n).map_err(err)?))
            },
        ));
    }
    out.push(VerificationCase::new(
        "esum.unit.m2.l3",
        "esum-unit",
        Expectation::Holds,
        0.0,
        |_| {
            let e = ESumAlgebra::uniform(
                Algebra::matrix(2).map_err(err)?,
                LatticeNorm::lp(3.0, 3).map_err(err)?,
            )
            .map_err(err)?;
            let r = e.unit_and_bai_bound_check().map_err(err)?;
            Ok(Measured::holds(
                r.holds,
                format!("unit norm {}", r.unit_norm),
            ))
        },
    ));
}

fn jsum_cases(out: &mut Vec<VerificationCase>) {
    out.push(VerificationCase::new(
        "jsum.recursion",
        "j-recursion",
        Expectation::exact(0.0),
        1e-12,
        |ctx| {
            let mut rng = ctx.rng();
            let mut worst = 0.0f64;
            for _ in 0..500 {
                let levels = rng.random_range(1..=8);
                let sys = System::random_contractive(&mut rng, levels, 3).map_err(err)?;
                let support = rng.random_range(1..=levels);
                let x = sys.random_element(&mut rng, support);
                let horizon = (sys.support_end(&x) + 1).min(sys.last_level());
                let bf = sys.jnorm_bruteforce(&x, horizon).map_err(err)?;
                worst = worst.max((sys.jnorm(&x) - bf).abs() / bf.max(1.0));
            }
            Ok(Measured::value(worst).with_detail("500 systems"))
        },
    ));
    out.push(VerificationCase::new(
        "jsum.elementary",
        "j-elementary",
        Expectation::Holds,
        1e-12,
        |ctx| {
            let mut rng = ctx.rng();
            let mut failures = 0usize;
            for _ in 0..500 {
                let levels = rng.random_range(1..=8);
                let sys = System::random_contractive(&mut rng, levels, 3).map_err(err)?;
                let support = rng.random_range(1..=levels);
                let x = sys.random_element(&mut rng, support);
                let j = sys.jnorm(&x);
                for n in 1..=levels {
                    let c = x.coords[n].iter().map(|v| v * v).sum::<f64>().sqrt();
                    failures += usize::from(c > j * (1.0 + 1e-12) + 1e-12);
                }
                for _ in 0..8 {
                    let mut s: Vec<usize> = (0..=levels).filter(|_| rng.random_bool(0.5)).collect();
                    if s.is_empty() {
                        s.push(rng.random_range(0..=levels));
                    }
                    let (sigma, rho) = (
                        sys.sigma(&x, &s).map_err(err)?,
                        sys.rho(&x, &s).map_err(err)?,
                    );
                    failures += usize::from(
                        sigma > rho * (1.0 + 1e-12)
                            || rho > 2f64.sqrt() * j * (1.0 + 1e-12) + 1e-12,
                    );
                }
            }
            Ok(Measured::holds(
                failures == 0,
                format!("{failures} violations"),
            ))
        },
    ));
    out.push(VerificationCase::new(
        "jsum.singleton",
        "j-singleton",
        Expectation::exact(0.0),
        1e-12,
        |ctx| {
            let mut rng = ctx.rng();
            let mut worst = 0.0f64;
            for _ in 0..200 {
                let levels = rng.random_range(1..=8);
                let sys = System::random_contractive(&mut rng, levels, 3).map_err(err)?;
                let n = rng.random_range(1..=levels);
                let u: Vec<f64> = (0..sys.dims()[n])
                    .map(|_| rng.random_range(-3.0..3.0))
                    .collect();
                let x = sys.singleton(n, &u).map_err(err)?;
                let nu = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                worst = worst.max((sys.jnorm(&x) - nu).abs());
            }
            Ok(Measured::value(worst))
        },
    ));
    out.push(VerificationCase::new(
        "jsum.bimonotone",
        "j-bimonotone",
        Expectation::Holds,
        1e-12,
        |ctx| {
            let mut rng = ctx.rng();
            let mut violations = 0;
            for _ in 0..100 {
                let levels = rng.random_range(1..=8);
                let sys = System::random_contractive(&mut rng, levels, 3).map_err(err)?;
                let x = sys.random_element(&mut rng, levels);
                violations += sys.bimonotone_check(&x, 20, rng.random()).violations;
            }
            Ok(Measured::holds(
                violations == 0,
                format!("{violations} violations"),
            ))
        },
    ));
    for family in ["scalar", "pair"] {
        out.push(VerificationCase::new(
            format!("jsum.product.{family}"),
            "j-product",
            Expectation::Holds,
            1e-10,
            move |ctx| {
                let mut rng = ctx.rng();
                let (mut samples, mut violations, mut worst) = (0, 0, f64::NEG_INFINITY);
                for _ in 0..10 {
                    let levels = rng.random_range(2..=7);
                    let sys = if family == "scalar" {
                        System::scalar_algebra_chain(levels)
                    } else {
                        System::random_pointwise_pair_chain(&mut rng, levels)
                    }
                    .map_err(err)?;
                    let (s, j) = sys.product_check(1000, rng.random()).map_err(err)?;
                    samples += s.samples;
                    violations += s.violations + j.violations;
                    worst = worst.max(s.worst_excess).max(j.worst_excess);
                }
                Ok(Measured::holds(
                    violations == 0,
                    format!("{samples} samples, {violations} violations, worst excess {worst:e}"),
                ))
            },
        ));
    }
    out.push(VerificationCase::new(
        "jsum.omega-submult",
        "omega-submult",
        Expectation::Holds,
        1e-10,
        |ctx| {
            let mut rng = ctx.rng();
            let sys = System::random_pointwise_pair_chain(&mut rng, 6).map_err(err)?;
            let r = sys.omega_submult_check(500, rng.random()).map_err(err)?;
            Ok(Measured::holds(
                r.passed(),
                format!("{} samples", r.samples),
            ))
        },
    ));
}

fn wa_cases(out: &mut Vec<VerificationCase>) {
    for n in 1..=8 {
        out.push(VerificationCase::new(
            format!("wa.pointwise.n{n}"),
            "wa-decision",
            Expectation::Holds,
            0.0,
            move |_| {
                let a = Algebra::pointwise(n).map_err(err)?;
                let r = derivation_space(&a);
                Ok(Measured::holds(
                    r.weakly_amenable && r.dim_derivations == 0 && essential_check(&a),
                    format!("dim_derivations {}", r.dim_derivations),
                ))
            },
        ));
    }
    out.push(VerificationCase::new(
        "wa.m2",
        "wa-decision",
        Expectation::Holds,
        0.0,
        |_| {
            let r = derivation_space(&Algebra::matrix(2).map_err(err)?);
            Ok(Measured::holds(
                r.weakly_amenable
                    && r.dim_derivations == 3
                    && r.dim_inner == 3
                    && r.dim_center == 1,
                format!(
                    "derivations {}, inner {}, center {}",
                    r.dim_derivations, r.dim_inner, r.dim_center
                ),
            ))
        },
    ));
    out.push(VerificationCase::new(
        "wa.square-zero",
        "wa-essential",
        Expectation::Holds,
        0.0,
        |_| {
            let a = Algebra::square_zero().map_err(err)?;
            let r = derivation_space(&a);
            let essential = essential_check(&a);
            Ok(Measured::holds(
                !r.weakly_amenable && !essential,
                format!(
                    "weakly amenable {}, essential {essential}",
                    r.weakly_amenable
                ),
            ))
        },
    ));
    type Make = fn(usize) -> LatticeNorm;
    let lattices: Vec<(&str, Make)> = vec![
        ("sup", |n| LatticeNorm::sup(n).unwrap()),
        ("l1", |n| LatticeNorm::lp(1.0, n).unwrap()),
        ("l2", |n| LatticeNorm::lp(2.0, n).unwrap()),
    ];
    for (name, make) in lattices {
        for n in [2usize, 6] {
            out.push(VerificationCase::new(
                format!("wa.esum.scalar.{name}.n{n}"),
                "wa-commutative-sum",
                Expectation::Holds,
                0.0,
                move |ctx| {
                    let e = ESumAlgebra::uniform(Algebra::scalar().map_err(err)?, make(n))
                        .map_err(err)?;
                    let r = esum_wa_check(&e, 4, ctx.seed).map_err(err)?;
                    Ok(Measured::holds(
                        r.dim_derivations == 0 && r.commutative_vanishing_holds && r.sandwich_holds,
                        format!("dim_derivations {}", r.dim_derivations),
                    ))
                },
            ));
        }
    }
    out.push(VerificationCase::new(
        "wa.esum.offender",
        "wa-summand",
        Expectation::Holds,
        0.0,
        |ctx| {
            let e = ESumAlgebra::new(
                vec![
                    Algebra::matrix(2).map_err(err)?,
                    Algebra::square_zero().map_err(err)?,
                    Algebra::scalar().map_err(err)?,
                ],
                LatticeNorm::lp(2.0, 3).map_err(err)?,
            )
            .map_err(err)?;
            let r = esum_wa_check(&e, 4, ctx.seed).map_err(err)?;
            Ok(Measured::holds(
                !r.weakly_amenable && r.offending == [1],
                format!("offending {:?}", r.offending),
            ))
        },
    ));
    out.push(VerificationCase::new(
        "wam.m2",
        "wam-bracket",
        Expectation::Holds,
        0.0,
        |ctx| {
            let w = wam_bracket(&Algebra::matrix(2).map_err(err)?, 60, ctx.seed).map_err(err)?;
            let (lo, hi) = (w.lower.value(), w.upper.value());
            Ok(Measured::holds(
                lo > 0.0 && lo <= hi,
                format!("[{lo}, {hi}]"),
            ))
        },
    ));
    for copies in [2usize, 3] {
        out.push(VerificationCase::new(
            format!("wam.sup-sum.m2.x{copies}"),
            "wam-sup-sum",
            Expectation::relative(1.0),
            0.1,
            move |ctx| {
                let m2 = Algebra::matrix(2).map_err(err)?;
                let single = wam_bracket(&m2, 60, ctx.seed).map_err(err)?.lower.value();
                let e = ESumAlgebra::uniform(m2, LatticeNorm::sup(copies).map_err(err)?)
                    .map_err(err)?;
                let r = esum_wa_check(&e, 60, ctx.seed).map_err(err)?;
                let sum = r.wam_sum.lower.value();
                Ok(Measured::value(sum / single).with_detail(format!(
                    "sum {sum}, single {single}, sandwich {}",
                    r.sandwich_holds
                )))
            },
        ));
        out.push(VerificationCase::new(
            format!("wam.sup-sum.m2.x{copies}.blocks"),
            "wam-sup-sum",
            Expectation::exact(0.0),
            1e-9,
            move |_| {
                let e = ESumAlgebra::uniform(
                    Algebra::matrix(2).map_err(err)?,
                    LatticeNorm::sup(copies).map_err(err)?,
                )
                .map_err(err)?;
                let a = e.as_finite_algebra().map_err(err)?;
                let r = derivation_space(&a);
                let p = esum_core::derivations::DerivationProblem::new(&a);
                Ok(Measured::value(p.off_block_mass(&r.derivation_basis))
                    .with_detail(format!("{} derivations", r.dim_derivations)))
            },
        ));
    }
    out.push(VerificationCase::new(
        "wam.transfer.weighted",
        "wam-transfer",
        Expectation::Holds,
        0.0,
        |ctx| {
            let e = ESumAlgebra::uniform(
                Algebra::matrix(2).map_err(err)?,
                LatticeNorm::weighted_sup(vec![1.0, 2.0]).map_err(err)?,
            )
            .map_err(err)?;
            let r = wa_quotient_transfer_check(&e, 20, ctx.seed).map_err(err)?;
            let mut detail = String::new();
            for row in &r.rows {
                let _ = write!(
                    detail,
                    "{}: {} <= {}·{}; ",
                    row.index,
                    row.summand_lower.value(),
                    row.delta_norm,
                    r.sum_upper.value()
                );
            }
            Ok(Measured::holds(r.holds, detail.trim_end()))
        },
    ));
    for p in [1.5, 2.0, 3.0] {
        out.push(VerificationCase::new(
            format!("wa.lp-obstruction.p{p}"),
            "lp-obstruction",
            Expectation::Holds,
            1e-8,
            move |ctx| {
                let r = lp_obstruction_demo(
                    &Algebra::matrix(2).map_err(err)?,
                    &[0.0, 1.0, 0.0, 0.0],
                    p,
                    &[2, 4, 8],
                    ctx.seed,
                )
                .map_err(err)?;
                let growth: Vec<String> = r
                    .rows
                    .iter()
                    .map(|row| format!("|F|={}: {}", row.size, row.aggregate))
                    .collect();
                Ok(Measured::holds(
                    r.holds,
                    format!("d = {}; {}", r.distance, growth.join(", ")),
                ))
            },
        ));
    }
}

/// Every claim the suite replays, in id order.
pub fn builtin_cases() -> Vec<VerificationCase> {
    let mut out = Vec::new();
    am_cases(&mut out);
    lattice_cases(&mut out);
    jsum_cases(&mut out);
    wa_cases(&mut out);
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}
