//! Finite-dimensional Banach algebras given by structure constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeNormSpec;
use crate::linalg::{norm2, Matrix};
use crate::Scalar;

/// Samples drawn when certifying `‖xy‖ ≤ ‖x‖‖y‖` at construction.
pub const SUBMULT_SAMPLES: usize = 10_000;
const SUBMULT_SEED: u64 = 0x5eed_a19e;
const STRUCTURE_TOL: f64 = 1e-9;

/// Norm on the coordinate space of an algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[serde(bound = "T: Scalar")]
pub enum AlgebraNorm<T> {
    MaxAbsCoordinate,
    EuclideanCoordinate,
    /// Operator norm on `M_side`, basis `E_{rs}` at index `r·side + s`.
    OperatorNormOnMatrices {
        side: usize,
    },
    /// Lattice norm of blockwise norms (an E-sum seen as one algebra).
    Sum {
        blocks: Vec<SumBlock<T>>,
        lattice: LatticeNormSpec<T>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SumBlock<T> {
    pub offset: usize,
    pub dim: usize,
    pub norm: AlgebraNorm<T>,
}

/// Constants relating the algebra norm to the Euclidean coordinate norm:
/// `‖x‖ ≤ α‖x‖₂`, `‖y‖₂ ≤ β‖y‖_*`, `‖φ‖_* ≤ γ‖φ‖₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Scalar> AlgebraNorm<T> {
    fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            AlgebraNorm::MaxAbsCoordinate | AlgebraNorm::EuclideanCoordinate => Ok(()),
            AlgebraNorm::OperatorNormOnMatrices { side } if side * side == dim => Ok(()),
            AlgebraNorm::OperatorNormOnMatrices { side } => Err(Error::InvalidAlgebra(format!(
                "operator norm on M_{side} needs dimension {}, got {dim}",
                side * side
            ))),
            AlgebraNorm::Sum { blocks, lattice } => {
                if blocks.len() != lattice.index_size() {
                    return Err(Error::InvalidAlgebra(
                        "block count differs from lattice index size".into(),
                    ));
                }
                let mut next = 0;
                for b in blocks {
                    if b.offset != next {
                        return Err(Error::InvalidAlgebra(
                            "sum blocks must be contiguous".into(),
                        ));
                    }
                    b.norm.check_dim(b.dim)?;
                    next += b.dim;
                }
                if next != dim {
                    return Err(Error::InvalidAlgebra(format!(
                        "sum blocks cover {next} of {dim} coordinates"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: &[T]) -> T {
        match self {
            AlgebraNorm::MaxAbsCoordinate => x.iter().fold(T::zero(), |m, v| m.max(v.abs())),
            AlgebraNorm::EuclideanCoordinate => norm2(x),
            AlgebraNorm::OperatorNormOnMatrices { side } => as_square(x, *side).spectral_norm(),
            AlgebraNorm::Sum { blocks, lattice } => {
                let norms: Vec<T> = blocks.iter().map(|b| b.norm.eval(b.slice(x))).collect();
                lattice.norm_of_moduli(&norms)
            }
        }
    }

    /// Dual norm under the coordinate pairing `⟨φ, x⟩ = Σ φₖxₖ`.
    pub fn dual_eval(&self, phi: &[T]) -> Result<T> {
        Ok(match self {
            AlgebraNorm::MaxAbsCoordinate => phi.iter().map(|v| v.abs()).sum(),
            AlgebraNorm::EuclideanCoordinate => norm2(phi),
            AlgebraNorm::OperatorNormOnMatrices { side } => as_square(phi, *side).trace_norm(),
            AlgebraNorm::Sum { blocks, lattice } => {
                let norms = blocks
                    .iter()
                    .map(|b| b.norm.dual_eval(b.slice(phi)))
                    .collect::<Result<Vec<T>>>()?;
                lattice.dual_norm(&norms)?
            }
        })
    }

    /// A point `x` with `‖x‖ ≤ 1` and `⟨φ, x⟩ = ‖φ‖_*`.
    pub fn norming_point(&self, phi: &[T]) -> Result<Vec<T>> {
        Ok(match self {
            AlgebraNorm::MaxAbsCoordinate => phi.iter().map(|&v| sign(v)).collect(),
            AlgebraNorm::EuclideanCoordinate => normalized(phi),
            AlgebraNorm::OperatorNormOnMatrices { side } => {
                let svd = as_square(phi, *side).svd();
                let mut x = vec![T::zero(); phi.len()];
                let cutoff = svd.max_singular() * T::epsilon() * T::lit(16.0);
                for k in 0..*side {
                    if svd.singular[k] <= cutoff {
                        break;
                    }
                    for r in 0..*side {
                        for c in 0..*side {
                            x[r * side + c] = x[r * side + c] + svd.u[(r, k)] * svd.v[(c, k)];
                        }
                    }
                }
                x
            }
            AlgebraNorm::Sum { blocks, lattice } => {
                let duals = blocks
                    .iter()
                    .map(|b| b.norm.dual_eval(b.slice(phi)))
                    .collect::<Result<Vec<T>>>()?;
                let (t, _) = lattice.dual_norming(&duals)?;
                let mut x = vec![T::zero(); phi.len()];
                for (b, ti) in blocks.iter().zip(t) {
                    let xi = b.norm.norming_point(b.slice(phi))?;
                    for (slot, v) in x[b.offset..b.offset + b.dim].iter_mut().zip(xi) {
                        *slot = ti * v;
                    }
                }
                x
            }
        })
    }

    /// A functional `φ` with `‖φ‖_* ≤ 1` and `⟨φ, x⟩ = ‖x‖`.
    pub fn norming_functional(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(match self {
            AlgebraNorm::MaxAbsCoordinate => {
                let j = (0..x.len()).fold(0, |b, i| if x[i].abs() > x[b].abs() { i } else { b });
                let mut phi = vec![T::zero(); x.len()];
                if !x.is_empty() {
                    phi[j] = sign(x[j]);
                }
                phi
            }
            AlgebraNorm::EuclideanCoordinate => normalized(x),
            AlgebraNorm::OperatorNormOnMatrices { side } => {
                let svd = as_square(x, *side).svd();
                let mut phi = vec![T::zero(); x.len()];
                if svd.max_singular() > T::zero() {
                    for r in 0..*side {
                        for c in 0..*side {
                            phi[r * side + c] = svd.u[(r, 0)] * svd.v[(c, 0)];
                        }
                    }
                }
                phi
            }
            AlgebraNorm::Sum { blocks, lattice } => {
                let norms: Vec<T> = blocks.iter().map(|b| b.norm.eval(b.slice(x))).collect();
                let s = lattice.norming_functional(&norms)?;
                let mut phi = vec![T::zero(); x.len()];
                for (b, si) in blocks.iter().zip(s) {
                    let fi = b.norm.norming_functional(b.slice(x))?;
                    for (slot, v) in phi[b.offset..b.offset + b.dim].iter_mut().zip(fi) {
                        *slot = si * v;
                    }
                }
                phi
            }
        })
    }

    pub fn equivalence(&self, dim: usize) -> Result<Equivalence<T>> {
        Ok(match self {
            AlgebraNorm::MaxAbsCoordinate => Equivalence {
                alpha: T::one(),
                beta: T::one(),
                gamma: T::from_usize_lossy(dim).sqrt(),
            },
            AlgebraNorm::EuclideanCoordinate => Equivalence {
                alpha: T::one(),
                beta: T::one(),
                gamma: T::one(),
            },
            AlgebraNorm::OperatorNormOnMatrices { side } => Equivalence {
                alpha: T::one(),
                beta: T::one(),
                gamma: T::from_usize_lossy(*side).sqrt(),
            },
            AlgebraNorm::Sum { blocks, lattice } => {
                let ce = lattice
                    .chi_norm(lattice.index_size())?
                    .max(lattice.ce_constant()?.horizon_value);
                let mut worst = Equivalence {
                    alpha: T::zero(),
                    beta: T::zero(),
                    gamma: T::zero(),
                };
                for b in blocks {
                    let e = b.norm.equivalence(b.dim)?;
                    worst.alpha = worst.alpha.max(e.alpha);
                    worst.beta = worst.beta.max(e.beta);
                    worst.gamma = worst.gamma.max(e.gamma);
                }
                Equivalence {
                    alpha: ce * worst.alpha,
                    beta: ce * worst.beta,
                    gamma: T::from_usize_lossy(blocks.len()).sqrt() * worst.gamma,
                }
            }
        })
    }
}

impl<T> SumBlock<T> {
    pub fn slice<'a>(&self, x: &'a [T]) -> &'a [T] {
        &x[self.offset..self.offset + self.dim]
    }
}

fn as_square<T: Scalar>(x: &[T], side: usize) -> Matrix<T> {
    Matrix::from_row_major(side, side, x.to_vec()).expect("dimension checked at construction")
}

fn sign<T: Scalar>(v: T) -> T {
    if v >= T::zero() {
        T::one()
    } else {
        -T::one()
    }
}

fn normalized<T: Scalar>(x: &[T]) -> Vec<T> {
    let n = norm2(x);
    if n == T::zero() {
        return vec![T::zero(); x.len()];
    }
    x.iter().map(|&v| v / n).collect()
}

/// Serialized form: a named preset or explicit structure constants
/// `structure[i][j][k]` with `bᵢbⱼ = Σₖ structure[i][j][k] bₖ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
#[serde(bound = "T: Scalar")]
pub enum AlgebraDescriptor<T> {
    Preset(Preset),
    Explicit {
        dim: usize,
        structure: Vec<Vec<Vec<T>>>,
        norm: AlgebraNorm<T>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Preset {
    Scalar,
    Pointwise { n: usize },
    Matrix { side: usize },
    SquareZero,
}

/// A finite-dimensional algebra with a certified submultiplicative norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraDescriptor<T>", into = "AlgebraDescriptor<T>")]
#[serde(bound = "T: Scalar")]
pub struct FiniteAlgebra<T> {
    dim: usize,
    structure: Vec<T>,
    /// Nonzero `(k, c[i][j][k])` for each basis pair `(i, j)`.
    products: Vec<Vec<(usize, T)>>,
    norm: AlgebraNorm<T>,
    commutative: bool,
    unit: Option<Vec<T>>,
}

impl<T: Scalar> TryFrom<AlgebraDescriptor<T>> for FiniteAlgebra<T> {
    type Error = Error;
    fn try_from(d: AlgebraDescriptor<T>) -> Result<Self> {
        match d {
            AlgebraDescriptor::Preset(p) => Self::preset(p),
            AlgebraDescriptor::Explicit {
                dim,
                structure,
                norm,
            } => {
                if structure.len() != dim
                    || structure
                        .iter()
                        .any(|r| r.len() != dim || r.iter().any(|c| c.len() != dim))
                {
                    return Err(Error::InvalidAlgebra(format!(
                        "structure must be {dim}×{dim}×{dim}"
                    )));
                }
                let flat = structure.into_iter().flatten().flatten().collect();
                Self::new(dim, flat, norm)
            }
        }
    }
}

impl<T: Scalar> From<FiniteAlgebra<T>> for AlgebraDescriptor<T> {
    fn from(a: FiniteAlgebra<T>) -> Self {
        let d = a.dim;
        let structure = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| a.c(i, j, k)).collect())
                    .collect()
            })
            .collect();
        AlgebraDescriptor::Explicit {
            dim: d,
            structure,
            norm: a.norm,
        }
    }
}

impl<T: Scalar> FiniteAlgebra<T> {
    /// Build from row-major structure constants `c[(i·dim + j)·dim + k]`,
    /// checking associativity and sampling submultiplicativity.
    pub fn new(dim: usize, structure: Vec<T>, norm: AlgebraNorm<T>) -> Result<Self> {
        let a = Self::assemble(dim, structure, norm)?;
        a.check_associative()?;
        a.check_submultiplicative(SUBMULT_SAMPLES)?;
        Ok(a)
    }

    fn assemble(dim: usize, structure: Vec<T>, norm: AlgebraNorm<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        if structure.len() != dim * dim * dim {
            return Err(Error::InvalidAlgebra(format!(
                "expected {} structure constants, got {}",
                dim * dim * dim,
                structure.len()
            )));
        }
        if let Some(i) = structure.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        norm.check_dim(dim)?;
        let products = (0..dim * dim)
            .map(|ij| {
                (0..dim)
                    .filter_map(|k| {
                        let v = structure[ij * dim + k];
                        (v != T::zero()).then_some((k, v))
                    })
                    .collect()
            })
            .collect();
        let commutative = (0..dim).all(|i| {
            (0..dim).all(|j| {
                (0..dim).all(|k| {
                    structure[(i * dim + j) * dim + k] == structure[(j * dim + i) * dim + k]
                })
            })
        });
        let mut a = Self {
            dim,
            structure,
            products,
            norm,
            commutative,
            unit: None,
        };
        a.unit = a.find_unit();
        Ok(a)
    }

    pub fn preset(p: Preset) -> Result<Self> {
        match p {
            Preset::Scalar => Self::scalar(),
            Preset::Pointwise { n } => Self::pointwise(n),
            Preset::Matrix { side } => Self::matrix(side),
            Preset::SquareZero => Self::square_zero(),
        }
    }

    /// The one-dimensional algebra of scalars.
    pub fn scalar() -> Result<Self> {
        Self::pointwise(1)
    }

    /// `ℂⁿ` with coordinatewise product and the max norm.
    pub fn pointwise(n: usize) -> Result<Self> {
        let mut c = vec![T::zero(); n * n * n];
        for i in 0..n {
            c[(i * n + i) * n + i] = T::one();
        }
        Self::new(n, c, AlgebraNorm::MaxAbsCoordinate)
    }

    /// `M_side` in the matrix-unit basis with the operator norm.
    pub fn matrix(side: usize) -> Result<Self> {
        let d = side * side;
        let mut c = vec![T::zero(); d * d * d];
        // E_{ab} E_{cd} = δ_{bc} E_{ad}
        for a in 0..side {
            for b in 0..side {
                for e in 0..side {
                    let (i, j, k) = (a * side + b, b * side + e, a * side + e);
                    c[(i * d + j) * d + k] = T::one();
                }
            }
        }
        Self::new(d, c, AlgebraNorm::OperatorNormOnMatrices { side })
    }

    /// `span{b}` with `b² = 0`.
    pub fn square_zero() -> Result<Self> {
        Self::new(1, vec![T::zero()], AlgebraNorm::MaxAbsCoordinate)
    }

    /// Block direct sum normed by `lattice` applied to the summand norms.
    pub fn direct_sum(summands: &[FiniteAlgebra<T>], lattice: &LatticeNormSpec<T>) -> Result<Self> {
        if summands.len() != lattice.index_size() {
            return Err(Error::InvalidAlgebra(format!(
                "{} summands for a lattice on {} indices",
                summands.len(),
                lattice.index_size()
            )));
        }
        let dim: usize = summands.iter().map(|s| s.dim).sum();
        let mut c = vec![T::zero(); dim * dim * dim];
        let mut blocks = Vec::with_capacity(summands.len());
        let mut offset = 0;
        for s in summands {
            let d = s.dim;
            for i in 0..d {
                for j in 0..d {
                    for &(k, v) in &s.products[i * d + j] {
                        c[((offset + i) * dim + offset + j) * dim + offset + k] = v;
                    }
                }
            }
            blocks.push(SumBlock {
                offset,
                dim: d,
                norm: s.norm.clone(),
            });
            offset += d;
        }
        Self::new(
            dim,
            c,
            AlgebraNorm::Sum {
                blocks,
                lattice: lattice.clone(),
            },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> &AlgebraNorm<T> {
        &self.norm
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn unit(&self) -> Option<&[T]> {
        self.unit.as_deref()
    }

    /// Block layout when this algebra is a direct sum.
    pub fn blocks(&self) -> Option<&[SumBlock<T>]> {
        match &self.norm {
            AlgebraNorm::Sum { blocks, .. } => Some(blocks),
            _ => None,
        }
    }

    /// `c[i][j][k]`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> T {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &[(usize, T)] {
        &self.products[i * self.dim + j]
    }

    pub fn basis(&self, i: usize) -> Vec<T> {
        let mut e = vec![T::zero(); self.dim];
        e[i] = T::one();
        e
    }

    pub fn mul(&self, x: &[T], y: &[T]) -> Vec<T> {
        let d = self.dim;
        let mut out = vec![T::zero(); d];
        for (i, &xi) in x.iter().enumerate() {
            if xi == T::zero() {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == T::zero() {
                    continue;
                }
                for &(k, c) in &self.products[i * d + j] {
                    out[k] = out[k] + xi * yj * c;
                }
            }
        }
        out
    }

    pub fn norm(&self, x: &[T]) -> T {
        self.norm.eval(x)
    }

    pub fn dual_norm(&self, phi: &[T]) -> Result<T> {
        self.norm.dual_eval(phi)
    }

    pub fn equivalence(&self) -> Result<Equivalence<T>> {
        self.norm.equivalence(self.dim)
    }

    fn check_associative(&self) -> Result<()> {
        let d = self.dim;
        let scale = self.structure.iter().fold(T::one(), |m, v| m.max(v.abs()));
        let tol = T::tol(STRUCTURE_TOL) * scale * scale;
        for i in 0..d {
            for j in 0..d {
                let bij = self.mul(&self.basis(i), &self.basis(j));
                for k in 0..d {
                    let left = self.mul(&bij, &self.basis(k));
                    let right = self.mul(&self.basis(i), &self.mul(&self.basis(j), &self.basis(k)));
                    if left.iter().zip(&right).any(|(a, b)| (*a - *b).abs() > tol) {
                        return Err(Error::InvalidAlgebra(format!(
                            "not associative on basis triple ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Random check of `‖xy‖ ≤ ‖x‖‖y‖`; Gaussian, sparse and basis samples.
    pub fn check_submultiplicative(&self, samples: usize) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(SUBMULT_SEED);
        let d = self.dim;
        let slack = T::one() + T::tol(STRUCTURE_TOL);
        let check = |x: &[T], y: &[T]| -> Result<()> {
            let lhs = self.norm(&self.mul(x, y));
            let rhs = self.norm(x) * self.norm(y);
            if lhs > rhs * slack + T::tol(1e-12) {
                return Err(Error::InvalidAlgebra(format!(
                    "norm is not submultiplicative: ‖xy‖ = {lhs} > {rhs}"
                )));
            }
            Ok(())
        };
        for i in 0..d {
            for j in 0..d {
                check(&self.basis(i), &self.basis(j))?;
            }
        }
        for s in 0..samples {
            let draw = |rng: &mut ChaCha8Rng| -> Vec<T> {
                (0..d)
                    .map(|_| {
                        let keep = s % 2 == 0 || rng.random::<f64>() < 0.4;
                        let g: f64 = rng.sample(StandardNormal);
                        if keep {
                            T::lit(g)
                        } else {
                            T::zero()
                        }
                    })
                    .collect()
            };
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            check(&x, &y)?;
        }
        Ok(())
    }

    /// Solve `u·bⱼ = bⱼ·u = bⱼ` for all `j` in least squares and keep an exact solution.
    fn find_unit(&self) -> Option<Vec<T>> {
        let d = self.dim;
        let mut a = Matrix::zeros(2 * d * d, d);
        let mut rhs = vec![T::zero(); 2 * d * d];
        for j in 0..d {
            for k in 0..d {
                let row = j * d + k;
                for i in 0..d {
                    a[(row, i)] = self.c(i, j, k);
                    a[(d * d + row, i)] = self.c(j, i, k);
                }
                if j == k {
                    rhs[row] = T::one();
                    rhs[d * d + row] = T::one();
                }
            }
        }
        let u = a.svd().solve(&rhs, T::tol(1e-10));
        let residual = a
            .matvec(&u)
            .iter()
            .zip(&rhs)
            .fold(T::zero(), |m, (p, q)| m.max((*p - *q).abs()));
        (residual <= T::tol(STRUCTURE_TOL)).then_some(u)
    }

    /// Left multiplication `x ↦ a x` as a matrix on coordinates.
    pub fn left_mul_matrix(&self, a: &[T]) -> Matrix<T> {
        let d = self.dim;
        Matrix::from_columns(
            d,
            &(0..d)
                .map(|j| self.mul(a, &self.basis(j)))
                .collect::<Vec<_>>(),
        )
    }
}
