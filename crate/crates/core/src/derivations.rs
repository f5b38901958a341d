//! Derivations `D: A → A*` of finite-dimensional algebras and weak amenability.
//!
//! A derivation is stored as the matrix `D[k][m] = D(b_m)(b_k)` in the dual
//! basis. Boundedness is automatic, so weak amenability reduces to comparing
//! the solution space of the Leibniz system with the image of `φ ↦ ad_φ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraNorm, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::esum::ESumAlgebra;
use crate::lattice::LatticeNormSpec;
use crate::linalg::{norm2, Matrix, Svd};
use crate::Scalar;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-10;
const LEIBNIZ_TOL: f64 = 1e-10;
const BLOCK_TOL: f64 = 1e-9;
/// Vertex enumeration for the `ℓ∞ → ℓ₁` norm is used up to this dimension.
const VERTEX_ENUMERATION_MAX_DIM: usize = 14;

/// The dual module `A*` with `(a·φ)(x) = φ(xa)` and `(φ·a)(x) = φ(ax)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualBimodule<T> {
    /// `left[i]` is the matrix of `φ ↦ bᵢ·φ`.
    pub left: Vec<Matrix<T>>,
    /// `right[i]` is the matrix of `φ ↦ φ·bᵢ`.
    pub right: Vec<Matrix<T>>,
}

impl<T: Scalar> DualBimodule<T> {
    pub fn new(a: &FiniteAlgebra<T>) -> Self {
        let d = a.dim();
        let build = |f: &dyn Fn(usize, usize, usize) -> T| -> Vec<Matrix<T>> {
            (0..d)
                .map(|i| {
                    let mut m = Matrix::zeros(d, d);
                    for k in 0..d {
                        for l in 0..d {
                            m[(k, l)] = f(i, k, l);
                        }
                    }
                    m
                })
                .collect()
        };
        Self {
            // (bᵢ·φ)(b_k) = φ(b_k bᵢ)
            left: build(&|i, k, l| a.c(k, i, l)),
            // (φ·bᵢ)(b_k) = φ(bᵢ b_k)
            right: build(&|i, k, l| a.c(i, k, l)),
        }
    }

    /// Largest defect of the three bimodule identities over basis pairs.
    pub fn axiom_defect(&self, a: &FiniteAlgebra<T>) -> T {
        let d = a.dim();
        let combine = |ms: &[Matrix<T>], coeffs: &[(usize, T)]| {
            coeffs.iter().fold(Matrix::zeros(d, d), |acc, &(k, c)| {
                let mut out = acc;
                for r in 0..d {
                    for s in 0..d {
                        out[(r, s)] = out[(r, s)] + c * ms[k][(r, s)];
                    }
                }
                out
            })
        };
        let mut worst = T::zero();
        for i in 0..d {
            for j in 0..d {
                let prod = a.basis_product(i, j);
                let l_ab = combine(&self.left, prod);
                let r_ab = combine(&self.right, prod);
                worst = worst.max(l_ab.sub(&self.left[i].matmul(&self.left[j])).max_abs());
                worst = worst.max(r_ab.sub(&self.right[j].matmul(&self.right[i])).max_abs());
                let lr = self.right[j].matmul(&self.left[i]);
                let rl = self.left[i].matmul(&self.right[j]);
                worst = worst.max(lr.sub(&rl).max_abs());
            }
        }
        worst
    }
}

/// Either every derivation is `ad_φ` (with the implementing functionals), or
/// a derivation outside the inner span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound = "T: Scalar")]
pub enum Certificate<T> {
    Inner {
        implementing: Vec<Vec<T>>,
        max_residual: T,
    },
    NotInner {
        derivation: Matrix<T>,
        distance_to_inner: T,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DerivationSpaceReport<T> {
    pub dim: usize,
    pub dim_derivations: usize,
    pub dim_inner: usize,
    /// `dim Z` for `Z = {φ : ad_φ = 0}`.
    pub dim_center: usize,
    pub derivation_basis: Vec<Matrix<T>>,
    pub inner_basis: Vec<Matrix<T>>,
    pub center_basis: Vec<Vec<T>>,
    pub weakly_amenable: bool,
    pub certificate: Certificate<T>,
}

/// A bound that may be `+∞` (serialized as the string `"infinity"`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
#[serde(bound = "T: Scalar")]
pub enum Bound<T> {
    Finite(T),
    Infinite(Infinity),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Infinity {
    #[serde(rename = "infinity")]
    Infinity,
}

impl<T: Scalar> Bound<T> {
    pub fn infinite() -> Self {
        Bound::Infinite(Infinity::Infinity)
    }

    pub fn value(&self) -> T {
        match self {
            Bound::Finite(v) => *v,
            Bound::Infinite(_) => T::infinity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct WamBracket<T> {
    /// Largest sampled `min{‖φ‖ : ad_φ = D} / ‖D‖`.
    pub lower: Bound<T>,
    /// `α β γ √dim / σ_min(ad)` from a fixed right inverse of `ad`.
    pub upper: Bound<T>,
    /// True only when there are no nonzero derivations.
    pub exact_zero: bool,
    pub samples: usize,
}

/// Linear algebra shared by every weak-amenability computation on one algebra.
pub struct DerivationProblem<'a, T> {
    algebra: &'a FiniteAlgebra<T>,
    /// `vec(ad_φ)` as a `dim² × dim` matrix, row `k·dim + i`.
    ad: Matrix<T>,
    ad_svd: Svd<T>,
}

impl<'a, T: Scalar> DerivationProblem<'a, T> {
    pub fn new(algebra: &'a FiniteAlgebra<T>) -> Self {
        let d = algebra.dim();
        let mut ad = Matrix::zeros(d * d, d);
        for k in 0..d {
            for i in 0..d {
                for l in 0..d {
                    ad[(k * d + i, l)] = algebra.c(k, i, l) - algebra.c(i, k, l);
                }
            }
        }
        let ad_svd = ad.svd();
        Self {
            algebra,
            ad,
            ad_svd,
        }
    }

    fn rel_tol() -> T {
        T::tol(RANK_TOL)
    }

    pub fn algebra(&self) -> &FiniteAlgebra<T> {
        self.algebra
    }

    /// `ad_φ` as a matrix.
    pub fn ad_matrix(&self, phi: &[T]) -> Matrix<T> {
        let d = self.algebra.dim();
        Matrix::from_row_major(d, d, self.ad.matvec(phi)).expect("square")
    }

    /// Basis of `Z = ker(ad)`, orthonormal in coordinates.
    pub fn center_basis(&self) -> Vec<Vec<T>> {
        if self.ad.max_abs() == T::zero() {
            return (0..self.algebra.dim())
                .map(|i| self.algebra.basis(i))
                .collect();
        }
        self.ad_svd.null_space(Self::rel_tol())
    }

    pub fn inner_rank(&self) -> usize {
        if self.ad.max_abs() == T::zero() {
            return 0;
        }
        self.ad_svd.rank(Self::rel_tol())
    }

    /// A (minimal Euclidean) `φ` with `ad_φ ≈ D`, and the residual.
    pub fn implement(&self, d: &Matrix<T>) -> (Vec<T>, T) {
        let target = d.as_slice();
        let phi = if self.inner_rank() == 0 {
            vec![T::zero(); self.algebra.dim()]
        } else {
            self.ad_svd.solve(target, Self::rel_tol())
        };
        let residual = self
            .ad
            .matvec(&phi)
            .iter()
            .zip(target)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
        (phi, residual)
    }

    /// `max |D(bᵢbⱼ) − bᵢ·D(bⱼ) − D(bᵢ)·bⱼ|` over basis pairs, evaluated at every `b_k`.
    pub fn leibniz_residual(&self, dm: &Matrix<T>) -> T {
        let a = self.algebra;
        let d = a.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut r = T::zero();
                    for &(m, c) in a.basis_product(i, j) {
                        r = r + c * dm[(k, m)];
                    }
                    for &(l, c) in a.basis_product(k, i) {
                        r = r - c * dm[(l, j)];
                    }
                    for &(l, c) in a.basis_product(j, k) {
                        r = r - c * dm[(l, i)];
                    }
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    /// Solve the Leibniz system for all derivations and compare with the inner ones.
    pub fn derivation_space(&self) -> DerivationSpaceReport<T> {
        let a = self.algebra;
        let d = a.dim();
        let mut eq = Matrix::zeros(d * d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let row = (i * d + j) * d + k;
                    for &(m, c) in a.basis_product(i, j) {
                        eq[(row, k * d + m)] = eq[(row, k * d + m)] + c;
                    }
                    for &(l, c) in a.basis_product(k, i) {
                        eq[(row, l * d + j)] = eq[(row, l * d + j)] - c;
                    }
                    for &(l, c) in a.basis_product(j, k) {
                        eq[(row, l * d + i)] = eq[(row, l * d + i)] - c;
                    }
                }
            }
        }
        let null = if eq.max_abs() == T::zero() {
            (0..d * d)
                .map(|u| {
                    let mut e = vec![T::zero(); d * d];
                    e[u] = T::one();
                    e
                })
                .collect()
        } else {
            eq.svd().null_space(Self::rel_tol())
        };
        let to_matrix = |v: Vec<T>| Matrix::from_row_major(d, d, v).expect("square");
        let derivation_basis: Vec<Matrix<T>> = null.into_iter().map(to_matrix).collect();
        let inner_rank = self.inner_rank();
        let inner_basis: Vec<Matrix<T>> = if inner_rank == 0 {
            Vec::new()
        } else {
            self.ad_svd
                .range(Self::rel_tol())
                .into_iter()
                .map(to_matrix)
                .collect()
        };
        for m in &inner_basis {
            assert!(
                self.leibniz_residual(m) <= T::tol(LEIBNIZ_TOL) * (T::one() + m.max_abs()),
                "an inner derivation failed the Leibniz identity"
            );
        }
        let center_basis = self.center_basis();
        let mut implementing = Vec::new();
        let mut worst: Option<(usize, T)> = None;
        for (idx, dm) in derivation_basis.iter().enumerate() {
            let (phi, residual) = self.implement(dm);
            if worst.is_none_or(|(_, r)| residual > r) {
                worst = Some((idx, residual));
            }
            implementing.push(phi);
        }
        let scale = T::tol(1e-8);
        let weakly_amenable =
            derivation_basis.len() == inner_basis.len() && worst.is_none_or(|(_, r)| r <= scale);
        let certificate = match worst {
            Some((idx, r)) if !weakly_amenable => Certificate::NotInner {
                derivation: derivation_basis[idx].clone(),
                distance_to_inner: r,
            },
            w => Certificate::Inner {
                implementing,
                max_residual: w.map_or(T::zero(), |(_, r)| r),
            },
        };
        DerivationSpaceReport {
            dim: d,
            dim_derivations: derivation_basis.len(),
            dim_inner: inner_basis.len(),
            dim_center: center_basis.len(),
            derivation_basis,
            inner_basis,
            center_basis,
            weakly_amenable,
            certificate,
        }
    }

    /// `‖D‖ = sup{⟨Dx, y⟩ : ‖x‖, ‖y‖ ≤ 1}`, with a flag for exact evaluation.
    pub fn derivation_norm(&self, dm: &Matrix<T>, rng: &mut ChaCha8Rng) -> Result<(T, bool)> {
        let a = self.algebra;
        let d = a.dim();
        match a.norm_kind() {
            AlgebraNorm::EuclideanCoordinate => return Ok((dm.spectral_norm(), true)),
            AlgebraNorm::MaxAbsCoordinate if d <= VERTEX_ENUMERATION_MAX_DIM => {
                let mut best = T::zero();
                for mask in 0u32..(1u32 << (d - 1)) {
                    let x: Vec<T> = (0..d)
                        .map(|i| {
                            if i > 0 && mask & (1 << (i - 1)) != 0 {
                                -T::one()
                            } else {
                                T::one()
                            }
                        })
                        .collect();
                    best = best.max(dm.matvec(&x).iter().map(|v| v.abs()).sum());
                }
                return Ok((best, true));
            }
            _ => {}
        }
        let norm = a.norm_kind();
        let dt = dm.transpose();
        let mut starts: Vec<Vec<T>> = (0..d).map(|i| a.basis(i)).collect();
        for _ in 0..48 {
            starts.push(
                (0..d)
                    .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                    .collect(),
            );
        }
        let mut best = T::zero();
        for x0 in starts {
            let nx = a.norm(&x0);
            if nx == T::zero() {
                continue;
            }
            let mut x: Vec<T> = x0.iter().map(|&v| v / nx).collect();
            let mut value = T::zero();
            for _ in 0..40 {
                let y = norm.norming_point(&dm.matvec(&x))?;
                x = norm.norming_point(&dt.matvec(&y))?;
                let v: T = dm.matvec(&x).iter().zip(&y).map(|(&p, &q)| p * q).sum();
                if v <= value * (T::one() + T::tol(1e-13)) {
                    value = value.max(v);
                    break;
                }
                value = v;
            }
            best = best.max(value);
        }
        Ok((best, false))
    }

    /// `min{‖φ + z‖_* : z ∈ Z}` by cyclic golden-section searches along an
    /// orthonormal basis of `Z` plus random directions.
    pub fn min_over_center(
        &self,
        phi: &[T],
        center: &[Vec<T>],
        rng: &mut ChaCha8Rng,
    ) -> Result<(Vec<T>, T)> {
        let a = self.algebra;
        let mut best = phi.to_vec();
        let mut value = a.dual_norm(&best)?;
        if center.is_empty() || value == T::zero() {
            return Ok((best, value));
        }
        let beta = a.equivalence()?.beta;
        let radius = T::lit(2.0) * beta * value + T::tol(1e-12);
        let r = center.len();
        for _sweep in 0..60 {
            let before = value;
            let mut dirs: Vec<Vec<T>> = center.to_vec();
            if r > 1 {
                for _ in 0..r {
                    let mut v = vec![T::zero(); phi.len()];
                    for z in center {
                        let g = T::lit(rng.sample::<f64, _>(StandardNormal));
                        v.iter_mut().zip(z).for_each(|(vi, &zi)| *vi = *vi + g * zi);
                    }
                    let n = norm2(&v);
                    dirs.push(v.into_iter().map(|x| x / n).collect());
                }
            }
            for dir in &dirs {
                let f = |t: T| -> Result<T> {
                    let p: Vec<T> = best.iter().zip(dir).map(|(&b, &z)| b + t * z).collect();
                    a.dual_norm(&p)
                };
                let (t, v) = golden_section(f, -radius, radius)?;
                if v < value {
                    best.iter_mut().zip(dir).for_each(|(b, &z)| *b = *b + t * z);
                    value = v;
                }
            }
            if before - value <= T::tol(1e-13) * before {
                break;
            }
        }
        Ok((best, value))
    }

    /// Sampled lower and certified upper bound for the weak amenability constant.
    pub fn wam_bracket(&self, samples: usize, seed: u64) -> Result<WamBracket<T>> {
        let report = self.derivation_space();
        if report.dim_derivations == 0 {
            return Ok(WamBracket {
                lower: Bound::Finite(T::zero()),
                upper: Bound::Finite(T::zero()),
                exact_zero: true,
                samples: 0,
            });
        }
        if !report.weakly_amenable {
            return Ok(WamBracket {
                lower: Bound::infinite(),
                upper: Bound::infinite(),
                exact_zero: false,
                samples: 0,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = &report.derivation_basis;
        let d = self.algebra.dim();
        let mut candidates: Vec<Matrix<T>> = basis.clone();
        if let Some(blocks) = self.algebra.blocks() {
            for b in blocks {
                for dm in basis {
                    let mut p = Matrix::zeros(d, d);
                    for k in b.offset..b.offset + b.dim {
                        for m in b.offset..b.offset + b.dim {
                            p[(k, m)] = dm[(k, m)];
                        }
                    }
                    if p.max_abs() > T::tol(1e-9) && self.leibniz_residual(&p) <= T::tol(1e-9) {
                        candidates.push(p);
                    }
                }
            }
        }
        for _ in 0..samples {
            let mut m = Matrix::zeros(d, d);
            for dm in basis {
                m = m.sub(&dm.scale(T::lit(rng.sample::<f64, _>(StandardNormal))));
            }
            candidates.push(m);
        }
        let center = &report.center_basis;
        let mut lower = T::zero();
        for dm in &candidates {
            let (norm, _) = self.derivation_norm(dm, &mut rng)?;
            if norm <= T::tol(1e-12) {
                continue;
            }
            let (phi0, _) = self.implement(dm);
            let (_, best) = self.min_over_center(&phi0, center, &mut rng)?;
            lower = lower.max(best / norm);
        }
        let eq = self.algebra.equivalence()?;
        let sigma_min = self
            .ad_svd
            .min_nonzero_singular(Self::rel_tol())
            .expect("nonzero inner derivations");
        let upper = eq.alpha * eq.beta * eq.gamma * T::from_usize_lossy(d).sqrt() / sigma_min;
        Ok(WamBracket {
            lower: Bound::Finite(lower),
            upper: Bound::Finite(upper),
            exact_zero: false,
            samples: candidates.len(),
        })
    }

    /// Largest entry of `D` coupling two different blocks, over a derivation basis.
    pub fn off_block_mass(&self, basis: &[Matrix<T>]) -> T {
        let Some(blocks) = self.algebra.blocks() else {
            return T::zero();
        };
        let owner: Vec<usize> = blocks
            .iter()
            .enumerate()
            .flat_map(|(bi, b)| std::iter::repeat_n(bi, b.dim))
            .collect();
        let d = self.algebra.dim();
        basis.iter().fold(T::zero(), |m, dm| {
            let mut w = m;
            for k in 0..d {
                for l in 0..d {
                    if owner[k] != owner[l] {
                        w = w.max(dm[(k, l)].abs());
                    }
                }
            }
            w
        })
    }
}

fn golden_section<T: Scalar>(f: impl Fn(T) -> Result<T>, lo: T, hi: T) -> Result<(T, T)> {
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..120 {
        if (b - a).abs() <= T::epsilon() * (T::one() + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let f0 = f(T::zero())?;
    let (t, v) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok(if f0 <= v { (T::zero(), f0) } else { (t, v) })
}

pub fn derivation_space<T: Scalar>(a: &FiniteAlgebra<T>) -> DerivationSpaceReport<T> {
    DerivationProblem::new(a).derivation_space()
}

/// Image of `φ ↦ ad_φ` and its kernel `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct InnerSpace<T> {
    pub basis: Vec<Matrix<T>>,
    pub center: Vec<Vec<T>>,
}

pub fn inner_space<T: Scalar>(a: &FiniteAlgebra<T>) -> InnerSpace<T> {
    let r = derivation_space(a);
    InnerSpace {
        basis: r.inner_basis,
        center: r.center_basis,
    }
}

pub fn is_weakly_amenable<T: Scalar>(a: &FiniteAlgebra<T>) -> (bool, Certificate<T>) {
    let r = derivation_space(a);
    (r.weakly_amenable, r.certificate)
}

/// `span{bᵢbⱼ} = A`.
pub fn essential_check<T: Scalar>(a: &FiniteAlgebra<T>) -> bool {
    let d = a.dim();
    let products: Vec<Vec<T>> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| a.mul(&a.basis(i), &a.basis(j)))
        .filter(|v| v.iter().any(|&x| x != T::zero()))
        .collect();
    crate::linalg::rank_of_columns(d, &products, T::tol(RANK_TOL)) == d
}

pub fn wam_bracket<T: Scalar>(
    a: &FiniteAlgebra<T>,
    samples: usize,
    seed: u64,
) -> Result<WamBracket<T>> {
    DerivationProblem::new(a).wam_bracket(samples, seed)
}

/// `dist(ψ, Z)` in the dual norm.
pub fn distance_to_center<T: Scalar>(a: &FiniteAlgebra<T>, psi: &[T], seed: u64) -> Result<T> {
    let p = DerivationProblem::new(a);
    let center = p.center_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(p.min_over_center(psi, &center, &mut rng)?.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SummandWa<T> {
    pub index: usize,
    pub commutative: bool,
    pub weakly_amenable: bool,
    pub dim_derivations: usize,
    pub wam: WamBracket<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ESumWaReport<T> {
    pub dim_derivations: usize,
    pub weakly_amenable: bool,
    pub summands: Vec<SummandWa<T>>,
    /// Summands that are not weakly amenable.
    pub offending: Vec<usize>,
    /// Commutative weakly amenable summands force every derivation of the sum to vanish.
    pub commutative_vanishing_holds: bool,
    /// A weakly amenable sum has weakly amenable summands.
    pub inheritance_holds: bool,
    pub off_block_mass: T,
    pub block_diagonal: bool,
    pub wam_sum: WamBracket<T>,
    /// `C_E` at the finite horizon.
    pub ce: T,
    /// `WAM(Aᵢ) ≤ ‖δᵢ‖ WAM(A)` and `WAM(A) ≤ C_E² sup WAM(Aᵢ)` on the brackets.
    pub sandwich_holds: bool,
}

/// Weak amenability of an E-sum against its summands.
pub fn esum_wa_check<T: Scalar>(
    esum: &ESumAlgebra<T>,
    samples: usize,
    seed: u64,
) -> Result<ESumWaReport<T>> {
    let sum = esum.as_finite_algebra()?;
    let problem = DerivationProblem::new(&sum);
    let report = problem.derivation_space();
    let wam_sum = problem.wam_bracket(samples, seed)?;
    let summands = esum
        .summands()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let p = DerivationProblem::new(a);
            let r = p.derivation_space();
            Ok(SummandWa {
                index: i,
                commutative: a.is_commutative(),
                weakly_amenable: r.weakly_amenable,
                dim_derivations: r.dim_derivations,
                wam: p.wam_bracket(samples, seed.wrapping_add(i as u64 + 1))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let offending: Vec<usize> = summands
        .iter()
        .filter(|s| !s.weakly_amenable)
        .map(|s| s.index)
        .collect();
    let all_comm_wa = summands.iter().all(|s| s.commutative && s.weakly_amenable);
    let commutative_vanishing_holds = !all_comm_wa || report.dim_derivations == 0;
    let inheritance_holds = !report.weakly_amenable || offending.is_empty();
    let off_block_mass = problem.off_block_mass(&report.derivation_basis);
    let ce = esum.lattice().ce_constant()?.horizon_value;
    let slack = T::one() + T::lit(1e-6);
    let delta_max = (0..esum.len())
        .map(|i| esum.embedding_norm(i))
        .collect::<Result<Vec<_>>>()?;
    let left = summands
        .iter()
        .zip(&delta_max)
        .all(|(s, &di)| s.wam.lower.value() <= di * wam_sum.upper.value() * slack);
    let sup_upper = summands
        .iter()
        .map(|s| s.wam.upper.value())
        .fold(T::zero(), T::max);
    let right = wam_sum.lower.value() <= ce * ce * sup_upper * slack;
    Ok(ESumWaReport {
        dim_derivations: report.dim_derivations,
        weakly_amenable: report.weakly_amenable,
        summands,
        offending,
        commutative_vanishing_holds,
        inheritance_holds,
        off_block_mass,
        block_diagonal: off_block_mass <= T::tol(BLOCK_TOL),
        wam_sum,
        ce,
        sandwich_holds: left && right,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TransferRow<T> {
    pub index: usize,
    pub summand_lower: Bound<T>,
    pub delta_norm: T,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TransferReport<T> {
    pub sum_upper: Bound<T>,
    pub rows: Vec<TransferRow<T>>,
    pub holds: bool,
}

/// `WAM(Aᵢ) ≤ ‖δᵢ‖_E WAM(A)` on the computed brackets.
pub fn wa_quotient_transfer_check<T: Scalar>(
    esum: &ESumAlgebra<T>,
    samples: usize,
    seed: u64,
) -> Result<TransferReport<T>> {
    let sum = esum.as_finite_algebra()?;
    let sum_upper = wam_bracket(&sum, samples, seed)?.upper;
    let rows = esum
        .summands()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let lower = wam_bracket(a, samples, seed.wrapping_add(i as u64 + 1))?.lower;
            let delta_norm = esum.embedding_norm(i)?;
            let holds = match (lower, sum_upper) {
                (_, Bound::Infinite(_)) => true,
                (Bound::Infinite(_), Bound::Finite(_)) => false,
                (Bound::Finite(l), Bound::Finite(u)) => {
                    l <= delta_norm * u * (T::one() + T::lit(1e-6))
                }
            };
            Ok(TransferRow {
                index: i,
                summand_lower: lower,
                delta_norm,
                holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let holds = rows.iter().all(|r| r.holds);
    Ok(TransferReport {
        sum_upper,
        rows,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LpDemoRow<T> {
    pub size: usize,
    pub weights: Vec<T>,
    /// Minimal dual norm of each coordinate of an implementing functional.
    pub phi_norms: Vec<T>,
    pub per_coordinate_ok: bool,
    /// `(Σ‖Φᵢ‖^q)^{1/q}`.
    pub aggregate: T,
    /// `d · ‖w|_F‖_q`.
    pub target: T,
    pub implement_residual: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LpDemoReport<T> {
    pub p: T,
    pub q: T,
    pub distance: T,
    pub rows: Vec<LpDemoRow<T>>,
    pub monotone: bool,
    pub holds: bool,
}

/// The weights of the obstruction: `1` for `p ≤ 2`, `n^{−1/q}` beyond.
pub fn obstruction_weights<T: Scalar>(p: T, size: usize) -> Vec<T> {
    let q = p / (p - T::one());
    (1..=size)
        .map(|n| {
            if p <= T::lit(2.0) {
                T::one()
            } else {
                T::from_usize_lossy(n).powf(-T::one() / q)
            }
        })
        .collect()
}

/// Finite truncations of the derivation `(bᵢ) ↦ (wᵢ ad_ψ(bᵢ))` on `ℓp(F, B)`.
pub fn lp_obstruction_demo<T: Scalar>(
    b: &FiniteAlgebra<T>,
    psi: &[T],
    p: T,
    sizes: &[usize],
    seed: u64,
) -> Result<LpDemoReport<T>> {
    if !(p > T::one() && p.is_finite()) {
        return Err(Error::InvalidLattice(format!(
            "exponent {p} must lie in (1, ∞)"
        )));
    }
    if psi.len() != b.dim() {
        return Err(Error::LengthMismatch {
            expected: b.dim(),
            got: psi.len(),
        });
    }
    let base = DerivationProblem::new(b);
    let center = base.center_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (_, distance) = base.min_over_center(psi, &center, &mut rng)?;
    if distance <= T::tol(1e-9) {
        return Err(Error::CentralFunctional(distance.to_f64_lossy()));
    }
    let ad_psi = base.ad_matrix(psi);
    let q = p / (p - T::one());
    let tol = T::lit(1e-8);
    let mut rows = Vec::new();
    for &size in sizes {
        let weights = obstruction_weights(p, size);
        let lattice = LatticeNormSpec::lp(p, size)?;
        let sum = FiniteAlgebra::direct_sum(&vec![b.clone(); size], &lattice)?;
        let db = b.dim();
        let dim = sum.dim();
        let mut dm = Matrix::zeros(dim, dim);
        for (i, &w) in weights.iter().enumerate() {
            for k in 0..db {
                for m in 0..db {
                    dm[(i * db + k, i * db + m)] = w * ad_psi[(k, m)];
                }
            }
        }
        let problem = DerivationProblem::new(&sum);
        let (phi, implement_residual) = problem.implement(&dm);
        let mut phi_norms = Vec::with_capacity(size);
        for i in 0..size {
            let block = &phi[i * db..(i + 1) * db];
            let (_, v) = base.min_over_center(block, &center, &mut rng)?;
            phi_norms.push(v);
        }
        let per_coordinate_ok = phi_norms
            .iter()
            .zip(&weights)
            .all(|(&v, &w)| v >= distance * w.abs() - tol)
            && implement_residual <= T::tol(1e-8);
        let aggregate = phi_norms
            .iter()
            .map(|v| v.powf(q))
            .sum::<T>()
            .powf(T::one() / q);
        let target = distance
            * weights
                .iter()
                .map(|w| w.abs().powf(q))
                .sum::<T>()
                .powf(T::one() / q);
        rows.push(LpDemoRow {
            size,
            weights,
            phi_norms,
            per_coordinate_ok,
            aggregate,
            target,
            implement_residual,
        });
    }
    let mut by_size: Vec<&LpDemoRow<T>> = rows.iter().collect();
    by_size.sort_by_key(|r| r.size);
    let monotone = by_size
        .windows(2)
        .all(|w| w[1].aggregate >= w[0].aggregate * (T::one() - T::lit(1e-12)));
    let holds = monotone && rows.iter().all(|r| r.per_coordinate_ok);
    Ok(LpDemoReport {
        p,
        q,
        distance,
        rows,
        monotone,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type A = FiniteAlgebra<f64>;

    #[test]
    fn scalar_and_pointwise_have_no_derivations() {
        for a in [A::scalar().unwrap(), A::pointwise(4).unwrap()] {
            let r = derivation_space(&a);
            assert_eq!((r.dim_derivations, r.dim_inner), (0, 0));
            assert!(r.weakly_amenable);
            assert!(essential_check(&a));
        }
    }

    #[test]
    fn m2_derivations_are_inner() {
        let m2 = A::matrix(2).unwrap();
        let r = derivation_space(&m2);
        assert_eq!(r.dim_derivations, 3);
        assert_eq!(r.dim_inner, 3);
        assert_eq!(r.dim_center, 1);
        assert!(r.weakly_amenable);
        // Z is spanned by the trace functional E00* + E11*
        let z = &r.center_basis[0];
        assert!((z[0] - z[3]).abs() < 1e-12 && z[1].abs() < 1e-12 && z[2].abs() < 1e-12);
        assert_eq!(r.dim_inner + r.dim_center, 4);
    }

    #[test]
    fn square_zero_is_not_weakly_amenable() {
        let z = A::square_zero().unwrap();
        let r = derivation_space(&z);
        assert_eq!((r.dim_derivations, r.dim_inner), (1, 0));
        assert!(!r.weakly_amenable);
        assert!(matches!(r.certificate, Certificate::NotInner { .. }));
        assert!(!essential_check(&z));
        let w = wam_bracket(&z, 5, 0).unwrap();
        assert_eq!(w.upper, Bound::infinite());
        assert_eq!(serde_json::to_string(&w.upper).unwrap(), "\"infinity\"");
    }

    #[test]
    fn bimodule_axioms() {
        for a in [A::matrix(2).unwrap(), A::pointwise(3).unwrap()] {
            assert!(DualBimodule::new(&a).axiom_defect(&a) < 1e-12);
        }
    }

    #[test]
    fn m2_trace_norm_distance() {
        let m2 = A::matrix(2).unwrap();
        let d = distance_to_center(&m2, &[0.0, 1.0, 0.0, 0.0], 3).unwrap();
        assert!((d - 1.0).abs() < 1e-9, "{d}");
        // diag(1, 0) + c·I has trace norm |1 + c| + |c| >= 1
        let d = distance_to_center(&m2, &[1.0, 0.0, 0.0, 0.0], 3).unwrap();
        assert!((d - 1.0).abs() < 1e-9, "{d}");
    }

    #[test]
    fn m2_wam_bracket() {
        let m2 = A::matrix(2).unwrap();
        let w = wam_bracket(&m2, 30, 1).unwrap();
        let (lo, hi) = (w.lower.value(), w.upper.value());
        assert!(lo > 0.0 && lo <= hi, "{w:?}");
        assert!((lo - 0.5).abs() < 0.05, "{lo}");
    }

    #[test]
    fn commutative_sums_have_no_derivations() {
        let e = ESumAlgebra::uniform(A::scalar().unwrap(), LatticeNormSpec::lp(2.0, 4).unwrap())
            .unwrap();
        let r = esum_wa_check(&e, 5, 0).unwrap();
        assert_eq!(r.dim_derivations, 0);
        assert!(r.commutative_vanishing_holds && r.inheritance_holds && r.sandwich_holds);
    }

    #[test]
    fn square_zero_summand_is_identified() {
        let e = ESumAlgebra::new(
            vec![A::scalar().unwrap(), A::square_zero().unwrap()],
            LatticeNormSpec::sup(2).unwrap(),
        )
        .unwrap();
        let r = esum_wa_check(&e, 5, 0).unwrap();
        assert!(!r.weakly_amenable);
        assert_eq!(r.offending, vec![1]);
    }

    #[test]
    fn lp_demo_small() {
        let m2 = A::matrix(2).unwrap();
        let r = lp_obstruction_demo(&m2, &[0.0, 1.0, 0.0, 0.0], 2.0, &[2, 4], 0).unwrap();
        assert!((r.distance - 1.0).abs() < 1e-9);
        assert!(r.holds, "{r:?}");
        assert!(r
            .rows
            .iter()
            .all(|row| row.weights.iter().all(|&w| w == 1.0)));
        assert!(matches!(
            lp_obstruction_demo(&m2, &[1.0, 0.0, 0.0, 1.0], 2.0, &[2], 0),
            Err(Error::CentralFunctional(_))
        ));
    }
}
