//! Projective tensor norm of the canonical diagonal of pointwise `ℂⁿ`.
//!
//! For `A = (ℂⁿ, N)` with coordinatewise product the only diagonal is
//! `d = Σᵢ eᵢ⊗eᵢ`, so `AM(A) = ‖d‖_γ`. The value is bracketed from below by
//! pairings `Σᵢ (T eᵢ)(eᵢ)` with maps `T: A → A*` of norm at most one, and from
//! above by explicit decompositions `d = Σₖ xₖ⊗yₖ`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{LatticeNormSpec, NormKind, OrliczFamily};
use crate::linalg::Matrix;
use crate::Scalar;

/// Relative gap above which a bracket is flagged as not collapsed.
pub const BRACKET_REL_TOL: f64 = 1e-6;
/// Coefficient-wise tolerance when re-multiplying a decomposition.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Search effort. `restarts == 0` keeps only the floor `‖π(d)‖` and the
/// trivial decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            restarts: 200,
            iterations: 60,
            seed: 0,
        }
    }
}

impl Budget {
    pub fn with_restarts(restarts: usize) -> Self {
        Self {
            restarts,
            ..Self::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Operator norm `‖T‖_{N→N*}` with a flag telling whether it is exact or an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OpNorm<T> {
    pub value: T,
    pub exact: bool,
}

/// One elementary tensor `x ⊗ y`.
pub type Term<T> = (Vec<Complex<T>>, Vec<Complex<T>>);

/// `d = Σₖ xₖ⊗yₖ` over complex vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Decomposition<T> {
    pub label: String,
    pub terms: Vec<Term<T>>,
}

impl<T: Scalar> Decomposition<T> {
    /// `max_{ij} |Σₖ xₖ(i)yₖ(j) − δᵢⱼ|`.
    pub fn residual(&self, n: usize) -> T {
        let mut acc = vec![Complex::new(T::zero(), T::zero()); n * n];
        for (x, y) in &self.terms {
            for i in 0..n {
                if x[i] == Complex::new(T::zero(), T::zero()) {
                    continue;
                }
                for j in 0..n {
                    acc[i * n + j] = acc[i * n + j] + x[i] * y[j];
                }
            }
        }
        (0..n * n).fold(T::zero(), |m, ij| {
            let target = if ij / n == ij % n {
                T::one()
            } else {
                T::zero()
            };
            m.max((acc[ij] - Complex::new(target, T::zero())).norm())
        })
    }

    /// `Σₖ N(xₖ)N(yₖ)`, the solid norm applied to moduli.
    pub fn cost(&self, norm: &LatticeNormSpec<T>) -> T {
        let modulus = |v: &[Complex<T>]| -> Vec<T> { v.iter().map(|z| z.norm()).collect() };
        self.terms
            .iter()
            .map(|(x, y)| norm.norm_of_moduli(&modulus(x)) * norm.norm_of_moduli(&modulus(y)))
            .sum()
    }
}

/// Two-sided estimate of `‖d‖_γ` with the witnesses realizing each side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NormBracket<T> {
    pub n: usize,
    pub lower: T,
    pub upper: T,
    pub lower_source: String,
    /// The map `T` with `‖T‖ ≤ 1` and `Σᵢ Tᵢᵢ = lower`.
    pub witness_lower: Matrix<T>,
    /// False when the witness norm came from an uncertified ascent.
    pub lower_certified: bool,
    pub witness_upper: Decomposition<T>,
    pub too_loose: bool,
}

impl<T: Scalar> NormBracket<T> {
    pub fn gap(&self) -> T {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MainTheoremReport<T> {
    pub lower: T,
    pub upper: T,
    pub ce: T,
    pub ce_squared: T,
    /// `upper / C_E²`; one means the estimate is sharp.
    pub ratio: T,
    pub holds: bool,
    pub too_loose: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct QuotientReport<T> {
    pub source_upper: T,
    pub target_upper: T,
    /// `‖q‖` for the restriction map, equal to one by solidity.
    pub q_norm: T,
    /// Largest `N_J(x|_J)/N(x)` seen on random samples.
    pub sampled_q_norm: T,
    pub holds: bool,
}

/// The pointwise algebra `(ℂⁿ, N)` and its canonical diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DiagonalProblem<T> {
    norm: LatticeNormSpec<T>,
}

impl<T: Scalar> DiagonalProblem<T> {
    pub fn new(norm: LatticeNormSpec<T>) -> Self {
        Self { norm }
    }

    pub fn n(&self) -> usize {
        self.norm.index_size()
    }

    pub fn norm(&self) -> &LatticeNormSpec<T> {
        &self.norm
    }

    fn exponent(&self) -> Option<T> {
        match self.norm.kind() {
            NormKind::Lp { p } => Some(*p),
            NormKind::Orlicz { phi } => match phi.family() {
                OrliczFamily::Power { p } => Some(*p),
                _ => None,
            },
            _ => None,
        }
    }

    /// `‖T‖_{N→N*} = sup{|yᵀTx| : N(x), N(y) ≤ 1}`.
    pub fn op_norm(&self, t: &Matrix<T>) -> OpNorm<T> {
        if t.is_diagonal() {
            let q = self.norm.quadratic_sup(&t.diagonal());
            return OpNorm {
                value: q.value,
                exact: q.exact,
            };
        }
        match self.exponent() {
            Some(p) if p == T::lit(2.0) => {
                return OpNorm {
                    value: t.spectral_norm(),
                    exact: true,
                }
            }
            Some(p) if p == T::one() => {
                return OpNorm {
                    value: t.max_abs(),
                    exact: true,
                }
            }
            _ => {}
        }
        let entrywise = match self.norm.kind() {
            NormKind::WeightedSup { weights } => {
                let n = self.n();
                let mut s = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        s = s + t[(i, j)].abs() / (weights[i] * weights[j]);
                    }
                }
                s
            }
            _ => t.sum_abs(),
        };
        // |yᵀTx| ≤ ‖T‖₂‖x‖₂‖y‖₂ and ‖x‖₂² ≤ sup over the ball of Σxᵢ²
        let r2 = self.norm.quadratic_sup(&vec![T::one(); self.n()]);
        let value = if r2.exact {
            entrywise.min(t.spectral_norm() * r2.value)
        } else {
            entrywise
        };
        OpNorm {
            value,
            exact: false,
        }
    }

    /// The trivial decomposition `Σ eᵢ⊗eᵢ`.
    pub fn trivial_decomposition(&self) -> Decomposition<T> {
        let n = self.n();
        let terms = (0..n)
            .map(|i| {
                let mut e = vec![Complex::new(T::zero(), T::zero()); n];
                e[i] = Complex::new(T::one(), T::zero());
                (e.clone(), e)
            })
            .collect();
        Decomposition {
            label: "trivial".into(),
            terms,
        }
    }

    /// `(1/n) Σₖ wₖ⊗w̄ₖ` over the characters of `ℤ/n`.
    pub fn dft_decomposition(&self) -> Decomposition<T> {
        let n = self.n();
        let scale = T::one() / T::from_usize_lossy(n).sqrt();
        Decomposition {
            label: "dft".into(),
            terms: character_terms(&vec![scale; n]),
        }
    }

    /// `(1/‖v‖²) Σₛ Σⱼ (1/n)(χⱼ∘vₛ)⊗(χ̄ⱼ∘vₛ)` where `vₛ` are the cyclic shifts of `v`;
    /// it sums to `d` because `Σₛ vₛ(i)² = ‖v‖²` at every coordinate.
    pub fn profile_decomposition(&self, v: &[T]) -> Decomposition<T> {
        let n = self.n();
        let vv: T = v.iter().map(|&a| a * a).sum();
        let scale = T::one() / (vv * T::from_usize_lossy(n)).sqrt();
        let mut terms = Vec::new();
        for s in 0..n {
            let shifted: Vec<T> = (0..n).map(|i| v[(i + s) % n] * scale).collect();
            if shifted.iter().any(|&a| a != T::zero()) {
                terms.extend(character_terms(&shifted));
            }
        }
        Decomposition {
            label: "profile".into(),
            terms,
        }
    }

    /// Cost of [`profile_decomposition`](Self::profile_decomposition) without building it.
    pub fn profile_cost(&self, v: &[T]) -> T {
        let n = self.n();
        let vv: T = v.iter().map(|&a| a * a).sum();
        let moduli: Vec<T> = v.iter().map(|a| a.abs()).collect();
        (0..n)
            .map(|s| {
                let shifted: Vec<T> = (0..n).map(|i| moduli[(i + s) % n]).collect();
                let ns = self.norm.norm_of_moduli(&shifted);
                ns * ns
            })
            .sum::<T>()
            / vv
    }

    /// `‖π(d)‖ = N(𝟙)` with the diagonal witness `T = diag(s)`, where `s` norms `𝟙`.
    fn floor(&self) -> (T, Option<Matrix<T>>) {
        let ones = vec![T::one(); self.n()];
        let value = self.norm.norm_of_moduli(&ones);
        let witness = self
            .norm
            .norming_functional(&ones)
            .ok()
            .map(|s| Matrix::from_diagonal(&s));
        (value, witness)
    }

    /// Bracket `‖d‖_γ` between a dual witness and a primal decomposition.
    pub fn gamma_norm_bracket(&self, budget: Budget) -> Result<NormBracket<T>> {
        let n = self.n();
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);

        let (floor, floor_witness) = self.floor();
        let mut lower = Candidate {
            value: floor,
            witness: floor_witness.unwrap_or_else(|| Matrix::zeros(n, n)),
            source: "unit floor".to_string(),
            certified: true,
        };
        let trivial = self.trivial_decomposition();
        let mut upper = (trivial.cost(&self.norm), trivial);

        if budget.restarts > 0 {
            for cand in self.dual_candidates(budget, &mut rng) {
                if cand.value > lower.value {
                    lower = cand;
                }
            }
            let dft = self.dft_decomposition();
            let dft_cost = dft.cost(&self.norm);
            if dft_cost < upper.0 {
                upper = (dft_cost, dft);
            }
            let v = self.profile_search(budget, &mut rng);
            let profile = self.profile_decomposition(&v);
            let cost = profile.cost(&self.norm);
            if cost < upper.0 {
                upper = (cost, profile);
            }
        }

        let residual = upper.1.residual(n);
        assert!(
            residual <= T::tol(RESIDUAL_TOL),
            "decomposition '{}' misses the diagonal by {residual}",
            upper.1.label
        );
        let upper_value = upper.1.cost(&self.norm);
        let too_loose = upper_value - lower.value > T::tol(BRACKET_REL_TOL) * upper_value;
        Ok(NormBracket {
            n,
            lower: lower.value,
            upper: upper_value,
            lower_source: lower.source,
            witness_lower: lower.witness,
            lower_certified: lower.certified,
            witness_upper: upper.1,
            too_loose,
        })
    }

    /// Unit-norm maps `T` paired with the diagonal.
    fn dual_candidates(&self, budget: Budget, rng: &mut ChaCha8Rng) -> Vec<Candidate<T>> {
        let n = self.n();
        let mut out = Vec::new();
        let push = |m: Matrix<T>, source: &str, out: &mut Vec<Candidate<T>>| {
            let op = self.op_norm(&m);
            if op.value > T::zero() {
                let scaled = m.scale(T::one() / op.value);
                out.push(Candidate {
                    value: scaled.trace(),
                    witness: scaled,
                    source: source.to_string(),
                    // off-diagonal bounds are upper bounds; only ascent estimates are uncertified
                    certified: op.exact || !m.is_diagonal(),
                });
            }
        };
        push(Matrix::identity(n), "identity", &mut out);
        for k in 1..=n {
            if let Ok(chi) = self.norm.worst_indicator(k) {
                push(Matrix::from_diagonal(&chi), "indicator", &mut out);
            }
        }
        for _ in 0..budget.restarts.min(16) {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let mut m = Matrix::zeros(n, n);
            for (i, &j) in perm.iter().enumerate() {
                m[(i, j)] = if rng.random::<bool>() {
                    T::one()
                } else {
                    -T::one()
                };
            }
            push(m, "signed permutation", &mut out);
        }
        match self.exponent() {
            Some(p) if p == T::lit(2.0) || p == T::one() => {
                let spectral = p == T::lit(2.0);
                for _ in 0..budget.restarts {
                    let m = self.full_ascent(spectral, budget.iterations, rng);
                    push(m, "projected gradient", &mut out);
                }
            }
            _ => {
                for _ in 0..budget.restarts {
                    let t = self.diagonal_ascent(budget.iterations, rng);
                    push(Matrix::from_diagonal(&t), "diagonal ascent", &mut out);
                }
            }
        }
        out
    }

    /// Projected gradient on `trace(T)` over the unit ball of `ℓ₂→ℓ₂` (singular-value
    /// clipping) or `ℓ₁→ℓ∞` (entry clipping).
    fn full_ascent(&self, spectral: bool, iterations: usize, rng: &mut ChaCha8Rng) -> Matrix<T> {
        let n = self.n();
        let data = (0..n * n)
            .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let mut m = Matrix::from_row_major(n, n, data).expect("square");
        m = m.scale(T::one() / m.max_abs().max(T::one()));
        for it in 1..=iterations {
            let step = T::lit(0.1) / T::from_usize_lossy(it).sqrt();
            for i in 0..n {
                m[(i, i)] = m[(i, i)] + step;
            }
            m = if spectral {
                clip_singular_values(&m)
            } else {
                clip_entries(&m)
            };
        }
        m
    }

    /// Ascent on `Σtᵢ / ‖diag(t)‖` over `t ≥ 0`, renormalizing radially each step.
    fn diagonal_ascent(&self, iterations: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
        let n = self.n();
        let mut t: Vec<T> = (0..n).map(|_| T::lit(rng.random::<f64>() + 1e-3)).collect();
        for it in 1..=iterations {
            let q = self.norm.quadratic_sup(&t);
            if q.value <= T::zero() {
                break;
            }
            let total: T = t.iter().copied().sum();
            let step = T::lit(0.1) / T::from_usize_lossy(it).sqrt();
            for (ti, xi) in t.iter_mut().zip(&q.maximizer) {
                let g = T::one() / q.value - total * *xi * *xi / (q.value * q.value);
                *ti = (*ti / q.value + step * g).max(T::zero());
            }
        }
        t
    }

    /// Local search over profile vectors seeded with `e₁`, `𝟙` and the
    /// maximizer of `Σxᵢ²` on the unit ball.
    fn profile_search(&self, budget: Budget, rng: &mut ChaCha8Rng) -> Vec<T> {
        let n = self.n();
        let mut seeds = vec![vec![T::one(); n]];
        let mut e1 = vec![T::zero(); n];
        e1[0] = T::one();
        seeds.push(e1);
        let q = self.norm.quadratic_sup(&vec![T::one(); n]);
        seeds.push(q.maximizer);
        if let NormKind::WeightedSup { weights } = self.norm.kind() {
            seeds.push(weights.iter().map(|&w| T::one() / w).collect());
        }
        let mut best = seeds[0].clone();
        let mut best_cost = self.profile_cost(&best);
        for s in seeds {
            let c = self.profile_cost(&s);
            if c < best_cost {
                best = s;
                best_cost = c;
            }
        }
        let mut width = 0.5;
        for _ in 0..budget.restarts {
            let trial: Vec<T> = best
                .iter()
                .map(|&v| {
                    let g: f64 = rng.sample(StandardNormal);
                    (v + T::lit(1e-3)) * T::lit((width * g).exp())
                })
                .collect();
            let c = self.profile_cost(&trial);
            if c < best_cost {
                best = trial;
                best_cost = c;
            } else {
                width = (width * 0.97).max(1e-3);
            }
        }
        best
    }

    /// Sandwich `1 ≤ AM ≤ C_E²` for pointwise summands `ℂ`.
    pub fn verify_main_theorem(&self, budget: Budget) -> Result<MainTheoremReport<T>> {
        let b = self.gamma_norm_bracket(budget)?;
        let ce = self.norm.ce_constant()?.horizon_value;
        let ce_squared = ce * ce;
        let tol = T::tol(1e-6);
        Ok(MainTheoremReport {
            lower: b.lower,
            upper: b.upper,
            ce,
            ce_squared,
            ratio: b.upper / ce_squared,
            holds: b.lower >= T::one() - tol
                && b.upper <= ce_squared + tol
                && b.lower <= b.upper * (T::one() + tol),
            too_loose: b.too_loose,
        })
    }

    /// `AM(B) ≤ ‖q‖²AM(A)` for the coordinate selection `q: ℂⁿ → ℂ^J`.
    pub fn verify_quotient_bound(
        &self,
        subset: &[usize],
        budget: Budget,
    ) -> Result<QuotientReport<T>> {
        let target = DiagonalProblem::new(self.norm.restrict(subset)?);
        let source_upper = self.gamma_norm_bracket(budget)?.upper;
        let target_upper = target.gamma_norm_bracket(budget)?.upper;
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ 0x9e37_79b9);
        let mut sampled = T::zero();
        for _ in 0..1000 {
            let x: Vec<T> = (0..self.n())
                .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)).abs())
                .collect();
            let restricted: Vec<T> = subset.iter().map(|&i| x[i]).collect();
            let ratio = target.norm.norm_of_moduli(&restricted) / self.norm.norm_of_moduli(&x);
            sampled = sampled.max(ratio);
        }
        let q_norm = T::one();
        let holds = sampled <= q_norm * (T::one() + T::tol(1e-9))
            && target_upper <= q_norm * q_norm * source_upper + T::tol(1e-6);
        Ok(QuotientReport {
            source_upper,
            target_upper,
            q_norm,
            sampled_q_norm: sampled,
            holds,
        })
    }
}

/// `AM((ℂⁿ, N))` as a bracket.
pub fn am_pointwise<T: Scalar>(
    norm: &LatticeNormSpec<T>,
    budget: Budget,
) -> Result<NormBracket<T>> {
    DiagonalProblem::new(norm.clone()).gamma_norm_bracket(budget)
}

/// `(χⱼ∘u)⊗(χ̄ⱼ∘u)` for every character `χⱼ(i) = e^{2πi·ij/n}`.
fn character_terms<T: Scalar>(u: &[T]) -> Vec<Term<T>> {
    let n = u.len();
    let tau = T::lit(std::f64::consts::TAU);
    (0..n)
        .map(|j| {
            let chi = |i: usize| {
                let angle = tau * T::from_usize_lossy((i * j) % n) / T::from_usize_lossy(n);
                Complex::from_polar(T::one(), angle)
            };
            let x = (0..n).map(|i| chi(i) * u[i]).collect();
            let y = (0..n).map(|i| chi(i).conj() * u[i]).collect();
            (x, y)
        })
        .collect()
}

struct Candidate<T> {
    value: T,
    witness: Matrix<T>,
    source: String,
    certified: bool,
}

fn clip_singular_values<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    let svd = m.svd();
    let n = m.cols();
    let mut out = Matrix::zeros(m.rows(), n);
    for k in 0..n {
        let s = svd.singular[k].min(T::one());
        if s == T::zero() {
            continue;
        }
        for i in 0..m.rows() {
            for j in 0..n {
                out[(i, j)] = out[(i, j)] + svd.u[(i, k)] * s * svd.v[(j, k)];
            }
        }
    }
    out
}

fn clip_entries<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    let data = m
        .as_slice()
        .iter()
        .map(|&v| v.max(-T::one()).min(T::one()))
        .collect();
    Matrix::from_row_major(m.rows(), m.cols(), data).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::OrliczFunction;

    fn bracket(norm: LatticeNormSpec<f64>) -> NormBracket<f64> {
        am_pointwise(&norm, Budget::with_restarts(20)).unwrap()
    }

    #[test]
    fn l2_is_sharp() {
        let b = bracket(LatticeNormSpec::lp(2.0, 4).unwrap());
        assert!(
            (b.lower - 4.0).abs() < 1e-9 && (b.upper - 4.0).abs() < 1e-9,
            "{b:?}"
        );
        assert!(!b.too_loose);
    }

    #[test]
    fn sup_collapses_through_dft() {
        let b = bracket(LatticeNormSpec::sup(4).unwrap());
        assert!((b.lower - 1.0).abs() < 1e-12);
        assert!((b.upper - 1.0).abs() < 1e-9);
        assert!(b.witness_upper.residual(4) < 1e-12);
    }

    #[test]
    fn l1_identity_witness() {
        let b = bracket(LatticeNormSpec::lp(1.0, 3).unwrap());
        assert!((b.lower - 3.0).abs() < 1e-9 && (b.upper - 3.0).abs() < 1e-9);
        let p = DiagonalProblem::new(LatticeNormSpec::<f64>::lp(1.0, 3).unwrap());
        assert_eq!(p.op_norm(&Matrix::identity(3)).value, 1.0);
        assert_eq!(p.trivial_decomposition().cost(p.norm()), 3.0);
    }

    #[test]
    fn one_dimensional() {
        for norm in [
            LatticeNormSpec::sup(1).unwrap(),
            LatticeNormSpec::lp(3.0, 1).unwrap(),
        ] {
            let b = bracket(norm);
            assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_sup_reaches_ce_squared() {
        let b = bracket(LatticeNormSpec::weighted_sup(vec![1.0, 1.0, 2.0]).unwrap());
        assert!(
            (b.lower - 4.0).abs() < 1e-9 && (b.upper - 4.0).abs() < 1e-9,
            "{b:?}"
        );
    }

    #[test]
    fn ramp_profile_matches_dual() {
        // symmetric norm: n / sup Σxᵢ² = 4 / (4a² + 1 − a²)
        let phi = OrliczFunction::shifted_ramp(0.5).unwrap();
        let b = bracket(LatticeNormSpec::orlicz(phi, 4).unwrap());
        let expect = 4.0 / (4.0 * 0.25 + 0.75);
        assert!((b.lower - expect).abs() < 1e-6 * expect, "{b:?}");
        assert!((b.upper - expect).abs() < 1e-6 * expect, "{b:?}");
    }

    #[test]
    fn zero_budget_is_flagged() {
        let b = am_pointwise(&LatticeNormSpec::sup(4).unwrap(), Budget::with_restarts(0)).unwrap();
        assert!(b.too_loose);
        assert_eq!((b.lower, b.upper), (1.0, 4.0));
    }

    #[test]
    fn witnesses_reverify() {
        let p = DiagonalProblem::new(LatticeNormSpec::<f64>::lp(3.0, 5).unwrap());
        let b = p.gamma_norm_bracket(Budget::with_restarts(10)).unwrap();
        assert!(p.op_norm(&b.witness_lower).value <= 1.0 + 1e-9);
        assert!((b.witness_lower.trace() - b.lower).abs() < 1e-12);
        assert!(b.witness_upper.residual(5) <= 1e-9);
        assert!((b.witness_upper.cost(p.norm()) - b.upper).abs() < 1e-12);
        assert!(b.lower <= b.upper * (1.0 + 1e-12));
    }

    #[test]
    fn scaling_by_constant_weight() {
        let c = 1.7;
        let b = bracket(LatticeNormSpec::weighted_sup(vec![c; 3]).unwrap());
        assert!((b.upper - c * c).abs() < 1e-9 && (b.lower - c * c).abs() < 1e-9);
    }

    #[test]
    fn quotient_bound() {
        let p = DiagonalProblem::new(LatticeNormSpec::<f64>::lp(2.0, 4).unwrap());
        let r = p
            .verify_quotient_bound(&[0, 1], Budget::with_restarts(5))
            .unwrap();
        assert!(r.holds);
        assert!((r.target_upper - 2.0).abs() < 1e-9 && (r.source_upper - 4.0).abs() < 1e-9);
        let id = p
            .verify_quotient_bound(&[0, 1, 2, 3], Budget::with_restarts(5))
            .unwrap();
        assert!((id.target_upper - id.source_upper).abs() < 1e-12);
    }

    #[test]
    fn main_theorem_report() {
        let p = DiagonalProblem::new(LatticeNormSpec::<f64>::lp(2.0, 4).unwrap());
        let r = p.verify_main_theorem(Budget::with_restarts(5)).unwrap();
        assert!(r.holds && (r.ratio - 1.0).abs() < 1e-9);
    }
}
