//! E-sums of finitely many finite-dimensional algebras.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::lattice::LatticeNormSpec;
use crate::Scalar;

const PRODUCT_SLACK: f64 = 1e-9;

/// Summands `(Aᵢ)` together with the lattice `E` combining their norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawESum<T>", into = "RawESum<T>")]
#[serde(bound = "T: Scalar")]
pub struct ESumAlgebra<T> {
    summands: Vec<FiniteAlgebra<T>>,
    lattice: LatticeNormSpec<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawESum<T> {
    summands: Vec<FiniteAlgebra<T>>,
    lattice: LatticeNormSpec<T>,
}

impl<T: Scalar> TryFrom<RawESum<T>> for ESumAlgebra<T> {
    type Error = Error;
    fn try_from(r: RawESum<T>) -> Result<Self> {
        Self::new(r.summands, r.lattice)
    }
}

impl<T: Scalar> From<ESumAlgebra<T>> for RawESum<T> {
    fn from(a: ESumAlgebra<T>) -> Self {
        RawESum {
            summands: a.summands,
            lattice: a.lattice,
        }
    }
}

/// Outcome of the unit / approximate-identity bound at finite scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BaiReport<T> {
    /// `‖1_A‖ = ‖χ_I‖_E`.
    pub unit_norm: T,
    /// Worst-case `‖χ_F‖_E` for `|F| = 1, …, |I|`.
    pub chi_norms: Vec<T>,
    /// `max_F ‖χ_F‖_E ≤ 2‖1_A‖`.
    pub holds: bool,
}

impl<T: Scalar> ESumAlgebra<T> {
    pub fn new(summands: Vec<FiniteAlgebra<T>>, lattice: LatticeNormSpec<T>) -> Result<Self> {
        if summands.len() != lattice.index_size() {
            return Err(Error::InvalidAlgebra(format!(
                "{} summands for a lattice on {} indices",
                summands.len(),
                lattice.index_size()
            )));
        }
        Ok(Self { summands, lattice })
    }

    /// `n` copies of one summand.
    pub fn uniform(summand: FiniteAlgebra<T>, lattice: LatticeNormSpec<T>) -> Result<Self> {
        let n = lattice.index_size();
        Self::new(vec![summand; n], lattice)
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn summands(&self) -> &[FiniteAlgebra<T>] {
        &self.summands
    }

    pub fn lattice(&self) -> &LatticeNormSpec<T> {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// `‖πᵢ‖ = sup ‖aᵢ‖/‖a‖ = 1/‖δᵢ‖_E` (attained on elements supported at `i`).
    pub fn projection_norm(&self, i: usize) -> Result<T> {
        self.check_index(i)?;
        Ok(T::one() / self.lattice.delta_norm(i)?)
    }

    /// `‖ιᵢ‖ = ‖δᵢ‖_E`.
    pub fn embedding_norm(&self, i: usize) -> Result<T> {
        self.check_index(i)?;
        self.lattice.delta_norm(i)
    }

    /// The block algebra `⊕ Aᵢ` as a single finite-dimensional algebra.
    pub fn as_finite_algebra(&self) -> Result<FiniteAlgebra<T>> {
        FiniteAlgebra::direct_sum(&self.summands, &self.lattice)
    }

    /// `M = ‖1_A‖` and the check `‖χ_F‖ ≤ 2M` for every subset size.
    pub fn unit_and_bai_bound_check(&self) -> Result<BaiReport<T>> {
        for (i, s) in self.summands.iter().enumerate() {
            match s.unit() {
                Some(u) if (s.norm(u) - T::one()).abs() <= T::tol(1e-9) => {}
                _ => return Err(Error::NotUnital(i)),
            }
        }
        let n = self.len();
        let unit_norm = self.lattice.norm_of_moduli(&vec![T::one(); n]);
        let chi_norms = (1..=n)
            .map(|k| {
                let chi = self.lattice.worst_indicator(k)?;
                Ok(self.lattice.norm_of_moduli(&chi))
            })
            .collect::<Result<Vec<T>>>()?;
        let slack = T::one() + T::tol(1e-12);
        let holds = chi_norms
            .iter()
            .all(|&c| c <= T::lit(2.0) * unit_norm * slack);
        Ok(BaiReport {
            unit_norm,
            chi_norms,
            holds,
        })
    }
}

/// An element `a = (aᵢ)` of an E-sum.
#[derive(Debug, Clone)]
pub struct ESumElement<T> {
    parent: Arc<ESumAlgebra<T>>,
    values: Vec<Vec<T>>,
}

impl<T: Scalar> PartialEq for ESumElement<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) && self.values == other.values
    }
}

impl<T: Scalar> ESumElement<T> {
    pub fn new(parent: &Arc<ESumAlgebra<T>>, values: Vec<Vec<T>>) -> Result<Self> {
        if values.len() != parent.len() {
            return Err(Error::LengthMismatch {
                expected: parent.len(),
                got: values.len(),
            });
        }
        for (v, s) in values.iter().zip(parent.summands()) {
            if v.len() != s.dim() {
                return Err(Error::LengthMismatch {
                    expected: s.dim(),
                    got: v.len(),
                });
            }
        }
        let flat = values.iter().flatten().position(|v| !v.is_finite());
        if let Some(i) = flat {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            parent: Arc::clone(parent),
            values,
        })
    }

    pub fn zero(parent: &Arc<ESumAlgebra<T>>) -> Self {
        let values = parent
            .summands()
            .iter()
            .map(|s| vec![T::zero(); s.dim()])
            .collect();
        Self {
            parent: Arc::clone(parent),
            values,
        }
    }

    /// The unit `(1_{Aᵢ})`, when every summand is unital.
    pub fn unit(parent: &Arc<ESumAlgebra<T>>) -> Result<Self> {
        let values = parent
            .summands()
            .iter()
            .enumerate()
            .map(|(i, s)| s.unit().map(<[T]>::to_vec).ok_or(Error::NotUnital(i)))
            .collect::<Result<_>>()?;
        Ok(Self {
            parent: Arc::clone(parent),
            values,
        })
    }

    pub fn parent(&self) -> &Arc<ESumAlgebra<T>> {
        &self.parent
    }

    pub fn values(&self) -> &[Vec<T>] {
        &self.values
    }

    pub fn summand_norms(&self) -> Vec<T> {
        self.values
            .iter()
            .zip(self.parent.summands())
            .map(|(v, s)| s.norm(v))
            .collect()
    }

    /// `‖a‖ = ‖(‖aᵢ‖)ᵢ‖_E`.
    pub fn esum_norm(&self) -> T {
        self.parent.lattice().norm_of_moduli(&self.summand_norms())
    }

    fn same_parent(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.parent, &other.parent) {
            Ok(())
        } else {
            Err(Error::MismatchedParents)
        }
    }

    /// Coordinatewise product.
    pub fn esum_mul(&self, other: &Self) -> Result<Self> {
        self.same_parent(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.parent.summands())
            .map(|((x, y), s)| s.mul(x, y))
            .collect();
        let out = Self {
            parent: Arc::clone(&self.parent),
            values,
        };
        debug_assert!(
            out.esum_norm()
                <= self.esum_norm() * other.esum_norm() * (T::one() + T::tol(PRODUCT_SLACK))
                    + T::tol(1e-12),
            "E-sum norm failed to be submultiplicative"
        );
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_parent(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x.iter().zip(y).map(|(&a, &b)| a + b).collect())
            .collect();
        Ok(Self {
            parent: Arc::clone(&self.parent),
            values,
        })
    }

    /// `πᵢ(a) = aᵢ`.
    pub fn coordinate_projection(&self, i: usize) -> Result<Vec<T>> {
        self.parent.check_index(i)?;
        Ok(self.values[i].clone())
    }

    /// `ιᵢ(v)`: the element supported at `i` with value `v`.
    pub fn coordinate_embedding(parent: &Arc<ESumAlgebra<T>>, v: &[T], i: usize) -> Result<Self> {
        parent.check_index(i)?;
        let expected = parent.summands()[i].dim();
        if v.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: v.len(),
            });
        }
        let mut out = Self::zero(parent);
        out.values[i] = v.to_vec();
        Ok(out)
    }

    /// `P_F(a)`: zero every coordinate outside `subset`.
    pub fn truncate(&self, subset: &[usize]) -> Result<Self> {
        let mut keep = vec![false; self.values.len()];
        for &i in subset {
            self.parent.check_index(i)?;
            keep[i] = true;
        }
        let values = self
            .values
            .iter()
            .zip(&keep)
            .map(|(v, &k)| {
                if k {
                    v.clone()
                } else {
                    vec![T::zero(); v.len()]
                }
            })
            .collect();
        let out = Self {
            parent: Arc::clone(&self.parent),
            values,
        };
        debug_assert!(out.esum_norm() <= self.esum_norm() * (T::one() + T::tol(1e-12)));
        Ok(out)
    }

    /// Concatenated coordinates in the block basis of [`ESumAlgebra::as_finite_algebra`].
    pub fn flatten(&self) -> Vec<T> {
        self.values.iter().flatten().copied().collect()
    }
}
