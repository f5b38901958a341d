//! Bellenot J-sums over a finite chain `X₀ → X₁ → … → X_N` of Euclidean
//! coordinate spaces linked by contractive bonding maps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraNorm, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{norm2, Matrix};
use crate::Scalar;

const BOND_TOL: f64 = 1e-9;
/// Largest horizon accepted by [`JSystem::jnorm_bruteforce`].
pub const BRUTEFORCE_MAX_HORIZON: usize = 20;

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawSystem<T> {
    dims: Vec<usize>,
    bonds: Vec<Vec<Vec<T>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    algebra: Option<Vec<Vec<Vec<Vec<T>>>>>,
}

/// Dimensions `d₀ = 0, d₁, …, d_N`, bonds `φₙ: ℝ^{dₙ} → ℝ^{dₙ₊₁}` and cached
/// compositions `φ^p_q = φ_{q−1}∘…∘φ_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem<T>", into = "RawSystem<T>")]
#[serde(bound = "T: Scalar")]
pub struct JSystem<T> {
    dims: Vec<usize>,
    bonds: Vec<Matrix<T>>,
    /// `compositions[p][q − p]` for `q ≥ p`.
    compositions: Vec<Vec<Matrix<T>>>,
    /// Algebra structure on levels `1..=N`.
    algebra: Option<Vec<FiniteAlgebra<T>>>,
}

impl<T: Scalar> TryFrom<RawSystem<T>> for JSystem<T> {
    type Error = Error;
    fn try_from(raw: RawSystem<T>) -> Result<Self> {
        if raw.bonds.len() + 1 != raw.dims.len() {
            return Err(Error::InvalidSystem(format!(
                "{} bonds for {} levels",
                raw.bonds.len(),
                raw.dims.len()
            )));
        }
        let bonds = raw
            .bonds
            .iter()
            .enumerate()
            .map(|(n, rows)| {
                let (r, c) = (raw.dims[n + 1], raw.dims[n]);
                if c == 0 {
                    return Ok(Matrix::zeros(r, 0));
                }
                Matrix::from_rows(rows)
                    .filter(|m| m.rows() == r && m.cols() == c)
                    .ok_or_else(|| Error::InvalidSystem(format!("bond {n} must be {r}×{c}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let algebra = raw
            .algebra
            .map(|levels| {
                let levels = if levels.len() == raw.dims.len() {
                    &levels[1..]
                } else {
                    &levels[..]
                };
                levels
                    .iter()
                    .zip(&raw.dims[1..])
                    .map(|(c, &d)| {
                        if c.len() != d
                            || c.iter()
                                .any(|r| r.len() != d || r.iter().any(|k| k.len() != d))
                        {
                            return Err(Error::InvalidSystem(format!(
                                "structure constants must be {d}×{d}×{d}"
                            )));
                        }
                        let flat = c.iter().flatten().flatten().copied().collect();
                        FiniteAlgebra::new(d, flat, AlgebraNorm::EuclideanCoordinate)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        Self::new(raw.dims, bonds, algebra)
    }
}

impl<T: Scalar> From<JSystem<T>> for RawSystem<T> {
    fn from(s: JSystem<T>) -> Self {
        let algebra = s.algebra.as_ref().map(|levels| {
            levels
                .iter()
                .map(|a| {
                    let d = a.dim();
                    (0..d)
                        .map(|i| {
                            (0..d)
                                .map(|j| (0..d).map(|k| a.c(i, j, k)).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect()
        });
        RawSystem {
            bonds: s.bonds.iter().map(Matrix::to_rows).collect(),
            dims: s.dims,
            algebra,
        }
    }
}

/// A finitely supported sequence `(x₀, …, x_N)` with `x₀` empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound = "T: Scalar")]
pub struct JElement<T> {
    pub coords: Vec<Vec<T>>,
}

/// `‖x‖_Ω` at a finite horizon with the last decrement as an error bar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OmegaReport<T> {
    pub value: T,
    pub error_bar: T,
    /// `‖xₙ‖` for `n = n₀, …, T`; nonincreasing by contractivity.
    pub tail_norms: Vec<T>,
    /// Every bond on the tail is an isometry, so the value is the exact limit.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CheckReport<T> {
    pub samples: usize,
    pub violations: usize,
    /// Largest `lhs − rhs` seen (negative when every sample holds strictly).
    pub worst_excess: T,
}

impl<T: Scalar> CheckReport<T> {
    fn new() -> Self {
        Self {
            samples: 0,
            violations: 0,
            worst_excess: T::neg_infinity(),
        }
    }

    fn record(&mut self, lhs: T, rhs: T, tol: T) {
        self.samples += 1;
        let excess = lhs - rhs;
        self.worst_excess = self.worst_excess.max(excess);
        if excess > tol {
            self.violations += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl<T: Scalar> JSystem<T> {
    pub fn new(
        dims: Vec<usize>,
        bonds: Vec<Matrix<T>>,
        algebra: Option<Vec<FiniteAlgebra<T>>>,
    ) -> Result<Self> {
        if dims.first() != Some(&0) {
            return Err(Error::InvalidSystem(
                "the first space must be zero-dimensional".into(),
            ));
        }
        if bonds.len() + 1 != dims.len() {
            return Err(Error::InvalidSystem(format!(
                "{} bonds for {} levels",
                bonds.len(),
                dims.len()
            )));
        }
        for (n, b) in bonds.iter().enumerate() {
            if b.rows() != dims[n + 1] || b.cols() != dims[n] {
                return Err(Error::InvalidSystem(format!(
                    "bond {n} must be {}×{}",
                    dims[n + 1],
                    dims[n]
                )));
            }
            if b.as_slice().iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSystem(format!(
                    "bond {n} has non-finite entries"
                )));
            }
            if b.cols() > 0 && b.rows() > 0 && b.spectral_norm() > T::one() + T::tol(BOND_TOL) {
                return Err(Error::InvalidSystem(format!("bond {n} is not contractive")));
            }
        }
        if let Some(levels) = &algebra {
            if levels.len() + 1 != dims.len() {
                return Err(Error::InvalidSystem(
                    "algebra structure needed on every nonzero level".into(),
                ));
            }
            for (n, a) in levels.iter().enumerate() {
                if a.dim() != dims[n + 1] {
                    return Err(Error::InvalidSystem(format!(
                        "level {} algebra has wrong dimension",
                        n + 1
                    )));
                }
                if a.norm_kind() != &AlgebraNorm::EuclideanCoordinate {
                    return Err(Error::InvalidSystem(
                        "coordinate norms must be Euclidean".into(),
                    ));
                }
            }
            for n in 1..bonds.len() {
                check_multiplicative(&bonds[n], &levels[n - 1], &levels[n], n)?;
            }
        }
        let levels = dims.len();
        let compositions = (0..levels)
            .map(|p| {
                let mut row = vec![Matrix::identity(dims[p])];
                for q in p + 1..levels {
                    let next = bonds[q - 1].matmul(row.last().expect("nonempty"));
                    row.push(next);
                }
                row
            })
            .collect();
        Ok(Self {
            dims,
            bonds,
            compositions,
            algebra,
        })
    }

    /// All levels of dimension `d`, identity bonds.
    pub fn identity_chain(levels: usize, d: usize) -> Result<Self> {
        let mut dims = vec![0];
        dims.extend(std::iter::repeat_n(d, levels));
        let bonds = (0..levels)
            .map(|n| {
                if n == 0 {
                    Matrix::zeros(d, 0)
                } else {
                    Matrix::identity(d)
                }
            })
            .collect();
        Self::new(dims, bonds, None)
    }

    /// Scalar levels with identity bonds and the algebra structure of `ℂ`.
    pub fn scalar_algebra_chain(levels: usize) -> Result<Self> {
        let s = Self::identity_chain(levels, 1)?;
        let algebra = (0..levels)
            .map(|_| FiniteAlgebra::new(1, vec![T::one()], AlgebraNorm::EuclideanCoordinate))
            .collect::<Result<Vec<_>>>()?;
        Self::new(s.dims, s.bonds, Some(algebra))
    }

    /// Random dimensions in `1..=max_dim` and random contractions.
    pub fn random_contractive<R: Rng>(rng: &mut R, levels: usize, max_dim: usize) -> Result<Self> {
        let mut dims = vec![0];
        for _ in 0..levels {
            dims.push(rng.random_range(1..=max_dim));
        }
        let bonds = (0..levels)
            .map(|n| {
                let (r, c) = (dims[n + 1], dims[n]);
                if c == 0 {
                    return Matrix::zeros(r, 0);
                }
                let data = (0..r * c)
                    .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                    .collect();
                let m = Matrix::from_row_major(r, c, data).expect("shape");
                let s = m.spectral_norm();
                let target = T::lit(rng.random_range(0.2..=1.0));
                if s > T::zero() {
                    m.scale(target / s)
                } else {
                    m
                }
            })
            .collect();
        Self::new(dims, bonds, None)
    }

    /// `ℂ²` levels with the pointwise product; each bond is a random
    /// multiplicative contraction (identity, swap, or a selection into one slot).
    pub fn random_pointwise_pair_chain<R: Rng>(rng: &mut R, levels: usize) -> Result<Self> {
        let mut dims = vec![0];
        dims.extend(std::iter::repeat_n(2, levels));
        let choices = [
            [[1.0, 0.0], [0.0, 1.0]],
            [[0.0, 1.0], [1.0, 0.0]],
            [[1.0, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [0.0, 1.0]],
            [[0.0, 1.0], [0.0, 0.0]],
        ];
        let bonds = (0..levels)
            .map(|n| {
                if n == 0 {
                    return Matrix::zeros(2, 0);
                }
                // identity and swap twice as likely, so tails rarely die out
                let k = [0, 0, 1, 1, 2, 3, 4][rng.random_range(0..7)];
                let rows: Vec<Vec<T>> = choices[k]
                    .iter()
                    .map(|r| r.iter().map(|&v| T::lit(v)).collect())
                    .collect();
                Matrix::from_rows(&rows).expect("2×2")
            })
            .collect();
        let algebra = (0..levels)
            .map(|_| {
                let mut c = vec![T::zero(); 8];
                c[0] = T::one();
                c[7] = T::one();
                FiniteAlgebra::new(2, c, AlgebraNorm::EuclideanCoordinate)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, bonds, Some(algebra))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Index `N` of the last level.
    pub fn last_level(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn bond(&self, n: usize) -> &Matrix<T> {
        &self.bonds[n]
    }

    pub fn is_algebra(&self) -> bool {
        self.algebra.is_some()
    }

    /// `φ^p_q` for `p ≤ q`.
    pub fn composition(&self, p: usize, q: usize) -> &Matrix<T> {
        &self.compositions[p][q - p]
    }

    pub fn element(&self, coords: Vec<Vec<T>>) -> Result<JElement<T>> {
        if coords.len() != self.dims.len() {
            return Err(Error::LengthMismatch {
                expected: self.dims.len(),
                got: coords.len(),
            });
        }
        for (c, &d) in coords.iter().zip(&self.dims) {
            if c.len() != d {
                return Err(Error::LengthMismatch {
                    expected: d,
                    got: c.len(),
                });
            }
            if let Some(i) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(JElement { coords })
    }

    pub fn zero(&self) -> JElement<T> {
        JElement {
            coords: self.dims.iter().map(|&d| vec![T::zero(); d]).collect(),
        }
    }

    /// The element with value `u` at level `n` and zero elsewhere.
    pub fn singleton(&self, n: usize, u: &[T]) -> Result<JElement<T>> {
        if n == 0 || n > self.last_level() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.dims.len(),
            });
        }
        let mut x = self.zero();
        if u.len() != self.dims[n] {
            return Err(Error::LengthMismatch {
                expected: self.dims[n],
                got: u.len(),
            });
        }
        x.coords[n] = u.to_vec();
        Ok(x)
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R, support: usize) -> JElement<T> {
        let mut x = self.zero();
        for n in 1..=support.min(self.last_level()) {
            for v in x.coords[n].iter_mut() {
                *v = if rng.random::<f64>() < 0.2 {
                    T::zero()
                } else {
                    T::lit(rng.sample::<f64, _>(StandardNormal))
                };
            }
        }
        x
    }

    /// `‖φ^p_q(x_p) − x_q‖²`.
    fn step_sq(&self, x: &JElement<T>, p: usize, q: usize) -> T {
        let image = self.composition(p, q).matvec(&x.coords[p]);
        image
            .iter()
            .zip(&x.coords[q])
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum()
    }

    fn check_chain(&self, s: &[usize]) -> Result<()> {
        if s.is_empty()
            || s.windows(2).any(|w| w[0] >= w[1])
            || *s.last().expect("nonempty") > self.last_level()
        {
            return Err(Error::InvalidChain);
        }
        Ok(())
    }

    /// `σ(x, S) = (Σᵢ ‖φ^{p_{i−1}}_{p_i}(x_{p_{i−1}}) − x_{p_i}‖²)^{1/2}`.
    pub fn sigma(&self, x: &JElement<T>, s: &[usize]) -> Result<T> {
        self.check_chain(s)?;
        Ok(s.windows(2)
            .map(|w| self.step_sq(x, w[0], w[1]))
            .sum::<T>()
            .sqrt())
    }

    /// `ρ(x, S) = (σ(x, S)² + ‖x_{p_k}‖²)^{1/2}`.
    pub fn rho(&self, x: &JElement<T>, s: &[usize]) -> Result<T> {
        let sigma = self.sigma(x, s)?;
        let last = norm2(&x.coords[*s.last().expect("checked")]);
        Ok((sigma * sigma + last * last).sqrt())
    }

    /// Last nonzero level of `x` (zero if `x = 0`).
    pub fn support_end(&self, x: &JElement<T>) -> usize {
        (0..x.coords.len())
            .rev()
            .find(|&n| x.coords[n].iter().any(|&v| v != T::zero()))
            .unwrap_or(0)
    }

    /// Chains never need indices past one level beyond the support.
    fn horizon(&self, x: &JElement<T>) -> usize {
        (self.support_end(x) + 1).min(self.last_level())
    }

    /// `‖x‖_J = (1/√2) sup_S ρ(x, S)` by dynamic programming over the last chain index.
    pub fn jnorm(&self, x: &JElement<T>) -> T {
        self.jnorm_with_horizon(x, self.horizon(x))
    }

    /// The same recursion with chain indices restricted to `0..=horizon`.
    pub fn jnorm_with_horizon(&self, x: &JElement<T>, horizon: usize) -> T {
        let h = horizon.min(self.last_level());
        let mut best_sigma = vec![T::zero(); h + 1];
        let mut best = T::zero();
        for q in 0..=h {
            let mut v = T::zero();
            for (p, &b) in best_sigma[..q].iter().enumerate() {
                v = v.max(b + self.step_sq(x, p, q));
            }
            best_sigma[q] = v;
            let tail = norm2(&x.coords[q]);
            best = best.max(v + tail * tail);
        }
        (best / T::lit(2.0)).sqrt()
    }

    /// Exhaustive maximum of `ρ` over every nonempty `S ⊆ {0, …, horizon}`.
    pub fn jnorm_bruteforce(&self, x: &JElement<T>, horizon: usize) -> Result<T> {
        if horizon > BRUTEFORCE_MAX_HORIZON {
            return Err(Error::HorizonTooLarge(horizon));
        }
        if horizon > self.last_level() {
            return Err(Error::InvalidChain);
        }
        let mut best = T::zero();
        let mut chain = Vec::with_capacity(horizon + 1);
        for mask in 1u32..(1u32 << (horizon + 1)) {
            chain.clear();
            chain.extend((0..=horizon).filter(|&i| mask & (1 << i) != 0));
            best = best.max(self.rho(x, &chain)?);
        }
        Ok(best / T::lit(2.0).sqrt())
    }

    /// `‖x‖_∞ = maxₙ ‖xₙ‖`.
    pub fn sup_norm(&self, x: &JElement<T>) -> T {
        x.coords.iter().fold(T::zero(), |m, c| m.max(norm2(c)))
    }

    fn algebra(&self) -> Result<&[FiniteAlgebra<T>]> {
        self.algebra.as_deref().ok_or(Error::NotAnAlgebra)
    }

    /// Coordinatewise product.
    pub fn jmul(&self, x: &JElement<T>, y: &JElement<T>) -> Result<JElement<T>> {
        let levels = self.algebra()?;
        let mut coords = vec![Vec::new()];
        for (n, a) in levels.iter().enumerate() {
            coords.push(a.mul(&x.coords[n + 1], &y.coords[n + 1]));
        }
        let out = JElement { coords };
        debug_assert!(
            self.jnorm(&out)
                <= T::lit(3.0) / T::lit(2.0).sqrt()
                    * self.jnorm(x)
                    * self.jnorm(y)
                    * (T::one() + T::tol(1e-9))
                    + T::tol(1e-12),
            "J-norm product bound violated"
        );
        Ok(out)
    }

    /// `(σ(xy, S), ‖y‖_∞σ(x, S) + ‖x‖_∞σ(y, S))`.
    pub fn sigma_product_sides(
        &self,
        x: &JElement<T>,
        y: &JElement<T>,
        s: &[usize],
    ) -> Result<(T, T)> {
        let xy = self.jmul(x, y)?;
        let lhs = self.sigma(&xy, s)?;
        let rhs = self.sup_norm(y) * self.sigma(x, s)? + self.sup_norm(x) * self.sigma(y, s)?;
        Ok((lhs, rhs))
    }

    /// Checks of the product estimates on random pairs and chains.
    pub fn product_check(
        &self,
        samples: usize,
        seed: u64,
    ) -> Result<(CheckReport<T>, CheckReport<T>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sigma_rep = CheckReport::new();
        let mut norm_rep = CheckReport::new();
        let n = self.last_level();
        let tol = T::tol(1e-10);
        for _ in 0..samples {
            let (sx, sy) = (rng.random_range(1..=n), rng.random_range(1..=n));
            let x = self.random_element(&mut rng, sx);
            let y = self.random_element(&mut rng, sy);
            let k = rng.random_range(1..=n + 1);
            let mut s: Vec<usize> = (0..=n).collect();
            for i in (1..s.len()).rev() {
                s.swap(i, rng.random_range(0..=i));
            }
            s.truncate(k);
            s.sort_unstable();
            let (lhs, rhs) = self.sigma_product_sides(&x, &y, &s)?;
            sigma_rep.record(lhs, rhs, tol * (T::one() + rhs));
            let xy = self.jmul(&x, &y)?;
            let bound = T::lit(3.0) / T::lit(2.0).sqrt() * self.jnorm(&x) * self.jnorm(&y);
            norm_rep.record(self.jnorm(&xy), bound, tol * (T::one() + bound));
        }
        Ok((sigma_rep, norm_rep))
    }

    /// Extend a prefix coherently from `n0` and read `‖x_T‖`.
    pub fn omega_seminorm(
        &self,
        prefix: &[Vec<T>],
        n0: usize,
        horizon: usize,
    ) -> Result<OmegaReport<T>> {
        if horizon > self.last_level() || n0 == 0 || n0 >= prefix.len() || horizon < n0 {
            return Err(Error::InvalidChain);
        }
        for (n, c) in prefix.iter().enumerate().take(self.dims.len()) {
            if c.len() != self.dims[n] {
                return Err(Error::LengthMismatch {
                    expected: self.dims[n],
                    got: c.len(),
                });
            }
        }
        let tol = T::tol(1e-12);
        for m in n0..prefix.len().saturating_sub(1) {
            let image = self.bonds[m].matvec(&prefix[m]);
            let ok = image
                .iter()
                .zip(&prefix[m + 1])
                .all(|(a, b)| (*a - *b).abs() <= tol * (T::one() + a.abs()));
            if !ok {
                return Err(Error::CoherenceViolated(m + 1));
            }
        }
        let mut xm = prefix[n0].clone();
        let mut tail_norms = vec![norm2(&xm)];
        let mut isometric = true;
        for m in n0..horizon {
            let b = &self.bonds[m];
            isometric &= b.rows() == b.cols()
                && b.transpose()
                    .matmul(b)
                    .sub(&Matrix::identity(b.cols()))
                    .max_abs()
                    <= tol;
            xm = b.matvec(&xm);
            tail_norms.push(norm2(&xm));
        }
        let value = *tail_norms.last().expect("nonempty");
        let error_bar = if tail_norms.len() > 1 {
            tail_norms[tail_norms.len() - 2] - value
        } else {
            T::zero()
        };
        Ok(OmegaReport {
            value,
            error_bar,
            tail_norms,
            exact: isometric,
        })
    }

    /// `‖xy‖_Ω ≤ ‖x‖_Ω‖y‖_Ω` on random coherent pairs, read at the last level.
    pub fn omega_submult_check(&self, samples: usize, seed: u64) -> Result<CheckReport<T>> {
        let levels = self.algebra()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.last_level();
        let mut rep = CheckReport::new();
        for _ in 0..samples {
            let n0 = rng.random_range(1..=n);
            let draw = |rng: &mut ChaCha8Rng| -> Vec<T> {
                (0..self.dims[n0])
                    .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                    .collect()
            };
            let (u, v) = (draw(&mut rng), draw(&mut rng));
            let uv = levels[n0 - 1].mul(&u, &v);
            let omega = |start: &[T]| -> Result<OmegaReport<T>> {
                let mut prefix: Vec<Vec<T>> = self.dims[..n0]
                    .iter()
                    .map(|&d| vec![T::zero(); d])
                    .collect();
                prefix.push(start.to_vec());
                self.omega_seminorm(&prefix, n0, n)
            };
            let (ox, oy, oxy) = (omega(&u)?, omega(&v)?, omega(&uv)?);
            let rhs = ox.value * oy.value;
            rep.record(oxy.value, rhs, T::tol(1e-10) * (T::one() + rhs));
        }
        Ok(rep)
    }

    /// `‖Σ_{p<i≤p+q} xᵢ‖_J ≤ ‖Σ_{i≤p+q+r} xᵢ‖_J` on random block triples, and
    /// `‖x‖_J = maxₙ ‖Σ_{i≤n} xᵢ‖_J`.
    pub fn bimonotone_check(&self, x: &JElement<T>, samples: usize, seed: u64) -> CheckReport<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.last_level();
        let block = |lo: usize, hi: usize| -> JElement<T> {
            let mut y = self.zero();
            for i in lo..=hi.min(n) {
                y.coords[i] = x.coords[i].clone();
            }
            y
        };
        let mut rep = CheckReport::new();
        let tol = T::tol(1e-12);
        for _ in 0..samples {
            let p = rng.random_range(0..n);
            let q = rng.random_range(1..=n - p);
            let r = rng.random_range(0..=n - p - q);
            let inner = self.jnorm(&block(p + 1, p + q));
            let outer = self.jnorm(&block(1, p + q + r));
            rep.record(inner, outer, tol * (T::one() + outer));
        }
        let full = self.jnorm(x);
        let partial_max = (1..=n)
            .map(|m| self.jnorm(&block(1, m)))
            .fold(T::zero(), T::max);
        rep.record(full, partial_max, tol * (T::one() + full));
        rep.record(partial_max, full, tol * (T::one() + full));
        rep
    }
}

fn check_multiplicative<T: Scalar>(
    bond: &Matrix<T>,
    from: &FiniteAlgebra<T>,
    to: &FiniteAlgebra<T>,
    n: usize,
) -> Result<()> {
    let tol = T::tol(BOND_TOL);
    for i in 0..from.dim() {
        for j in 0..from.dim() {
            let lhs = bond.matvec(&from.mul(&from.basis(i), &from.basis(j)));
            let rhs = to.mul(&bond.matvec(&from.basis(i)), &bond.matvec(&from.basis(j)));
            if lhs.iter().zip(&rhs).any(|(a, b)| (*a - *b).abs() > tol) {
                return Err(Error::InvalidSystem(format!(
                    "bond {n} is not multiplicative"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_chain(levels: usize) -> JSystem<f64> {
        JSystem::identity_chain(levels, 1).unwrap()
    }

    #[test]
    fn sigma_rho_hand_values() {
        let s = scalar_chain(2);
        let x = s.element(vec![vec![], vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(s.sigma(&x, &[0, 1, 2]).unwrap(), 1.0);
        assert!((s.rho(&x, &[0, 1, 2]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.sigma(&x, &[1]).unwrap(), 0.0);
        assert_eq!(s.rho(&x, &[1]).unwrap(), 1.0);
        assert_eq!(s.sigma(&x, &[2, 1]), Err(Error::InvalidChain));
        assert_eq!(s.sigma(&x, &[]), Err(Error::InvalidChain));
    }

    #[test]
    fn singleton_chain_values() {
        let s = scalar_chain(4);
        let x = s.singleton(3, &[2.5]).unwrap();
        assert_eq!(s.sigma(&x, &[0, 3]).unwrap(), 2.5);
        assert!((s.rho(&x, &[0, 3]).unwrap() - 2.5 * 2f64.sqrt()).abs() < 1e-14);
        assert!((s.jnorm(&x) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn two_ones_have_norm_one() {
        let s = scalar_chain(3);
        let x = s
            .element(vec![vec![], vec![1.0], vec![1.0], vec![0.0]])
            .unwrap();
        assert!((s.jnorm(&x) - 1.0).abs() < 1e-15);
        assert!((s.jnorm_bruteforce(&x, 3).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(s.jnorm(&s.zero()), 0.0);
    }

    #[test]
    fn dp_matches_bruteforce_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let s = JSystem::<f64>::random_contractive(&mut rng, 7, 3).unwrap();
            let support = rng.random_range(1..=6);
            let x = s.random_element(&mut rng, support);
            let dp = s.jnorm(&x);
            let bf = s.jnorm_bruteforce(&x, 7).unwrap();
            assert!((dp - bf).abs() <= 1e-12 * (1.0 + bf), "{dp} vs {bf}");
        }
    }

    #[test]
    fn rejects_expanding_bond_and_bad_dims() {
        let bonds = vec![Matrix::zeros(1, 0), Matrix::from_diagonal(&[1.5])];
        assert!(JSystem::new(vec![0, 1, 1], bonds, None).is_err());
        assert!(JSystem::<f64>::new(vec![1, 1], vec![Matrix::identity(1)], None).is_err());
        assert!(JSystem::<f64>::identity_chain(3, 1)
            .unwrap()
            .jnorm_bruteforce(&scalar_chain(3).zero(), 21)
            .is_err());
    }

    #[test]
    fn non_multiplicative_bond_rejected() {
        let bonds = vec![Matrix::zeros(1, 0), Matrix::from_diagonal(&[0.5])];
        let alg = (0..2)
            .map(|_| FiniteAlgebra::new(1, vec![1.0], AlgebraNorm::EuclideanCoordinate).unwrap())
            .collect();
        assert!(JSystem::new(vec![0, 1, 1], bonds, Some(alg)).is_err());
    }

    #[test]
    fn products() {
        let s = JSystem::<f64>::scalar_algebra_chain(4).unwrap();
        let x = s.singleton(2, &[1.0]).unwrap();
        let y = s.singleton(3, &[4.0]).unwrap();
        assert_eq!(s.jmul(&x, &y).unwrap(), s.zero());
        let xx = s.jmul(&x, &x).unwrap();
        assert_eq!(xx, x);
        assert!((s.jnorm(&xx) - 1.0).abs() < 1e-15);
        assert_eq!(
            scalar_chain(2).jmul(&scalar_chain(2).zero(), &scalar_chain(2).zero()),
            Err(Error::NotAnAlgebra)
        );
    }

    #[test]
    fn omega_limits() {
        let s = scalar_chain(6);
        let prefix = vec![vec![], vec![0.0], vec![3.0]];
        let r = s.omega_seminorm(&prefix, 2, 6).unwrap();
        assert_eq!(r.value, 3.0);
        assert!(r.exact);
        let half_bonds = (0..41)
            .map(|n| {
                if n == 0 {
                    Matrix::zeros(1, 0)
                } else {
                    Matrix::from_diagonal(&[0.5])
                }
            })
            .collect();
        let h = JSystem::new(
            vec![0; 1]
                .into_iter()
                .chain(std::iter::repeat_n(1, 41))
                .collect(),
            half_bonds,
            None,
        )
        .unwrap();
        let r = h.omega_seminorm(&[vec![], vec![1.0]], 1, 41).unwrap();
        assert!(r.value < 1e-12 && !r.exact);
        assert!(r.tail_norms.windows(2).all(|w| w[1] <= w[0]));
        let bad = vec![vec![], vec![1.0], vec![0.25]];
        assert_eq!(
            h.omega_seminorm(&bad, 1, 5),
            Err(Error::CoherenceViolated(2))
        );
    }

    #[test]
    fn rotations_preserve_omega() {
        let (c, s) = (0.6, 0.8);
        let rot = Matrix::<f64>::from_rows(&[vec![c, -s], vec![s, c]]).unwrap();
        let bonds = (0..5)
            .map(|n| {
                if n == 0 {
                    Matrix::zeros(2, 0)
                } else {
                    rot.clone()
                }
            })
            .collect();
        let sys = JSystem::new(vec![0, 2, 2, 2, 2, 2], bonds, None).unwrap();
        let r = sys.omega_seminorm(&[vec![], vec![3.0, 4.0]], 1, 5).unwrap();
        assert!((r.value - 5.0).abs() < 1e-12 && r.exact);
    }

    #[test]
    fn bimonotone_scalar_example() {
        let s = scalar_chain(2);
        let x = s.element(vec![vec![], vec![0.0], vec![1.0]]).unwrap();
        assert!(s.bimonotone_check(&x, 20, 1).passed());
        let inner = s.singleton(2, &[1.0]).unwrap();
        assert!((s.jnorm(&inner) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_system() {
        let text = r#"{"dims":[0,1,2],"bonds":[[[]],[[0.6],[0.8]]]}"#;
        let s: JSystem<f64> = serde_json::from_str(text).unwrap();
        assert_eq!(s.dims(), &[0, 1, 2]);
        let back: JSystem<f64> = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let x: JElement<f64> = serde_json::from_str("[[],[1.0],[0.6,0.8]]").unwrap();
        assert!((s.jnorm(&x) - 1.0).abs() < 1e-12);
    }
}
