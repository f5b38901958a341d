//! Banach sequence lattice norms on a finite index set.
//!
//! A [`LatticeNormSpec`] fixes one solid norm family together with the size of
//! the index set `{0, …, index_size − 1}`. Every family embeds contractively in
//! `ℓ∞`, which is enforced at construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// Largest abscissa probed when bracketing a level of an Orlicz function.
const ORLICZ_SEARCH_HORIZON: f64 = 1e12;

/// Relative tolerance on `λ` for the Luxemburg bisection.
pub const LUXEMBURG_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
#[serde(bound = "T: Scalar")]
pub enum OrliczFamily<T> {
    /// `t ↦ t^p`, `p ≥ 1`.
    Power { p: T },
    /// `t ↦ max(0, (t − a)/(1 − a))`, `0 < a < 1`.
    ShiftedRamp { a: T },
    /// Piecewise-linear interpolation of `(t, φ(t))` knots starting at `(0, 0)`;
    /// extrapolated with the slope of the last segment.
    Table { points: Vec<[T; 2]> },
}

/// An Orlicz function with its degeneracy point `a_φ = sup{t > 0 : φ(t) = 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OrliczFamily<T>", into = "OrliczFamily<T>")]
#[serde(bound = "T: Scalar")]
pub struct OrliczFunction<T> {
    family: OrliczFamily<T>,
    a_phi: T,
}

impl<T: Scalar> TryFrom<OrliczFamily<T>> for OrliczFunction<T> {
    type Error = Error;
    fn try_from(family: OrliczFamily<T>) -> Result<Self> {
        Self::new(family)
    }
}

impl<T: Scalar> From<OrliczFunction<T>> for OrliczFamily<T> {
    fn from(f: OrliczFunction<T>) -> Self {
        f.family
    }
}

impl<T: Scalar> OrliczFunction<T> {
    pub fn new(family: OrliczFamily<T>) -> Result<Self> {
        let a_phi = match &family {
            OrliczFamily::Power { p } => {
                if !(p.is_finite() && *p >= T::one()) {
                    return Err(Error::InvalidOrlicz(format!(
                        "power exponent {p} must be ≥ 1"
                    )));
                }
                T::zero()
            }
            OrliczFamily::ShiftedRamp { a } => {
                if !(*a > T::zero() && *a < T::one()) {
                    return Err(Error::InvalidOrlicz(format!(
                        "ramp shift {a} must lie in (0, 1)"
                    )));
                }
                *a
            }
            OrliczFamily::Table { points } => validate_table(points)?,
        };
        let f = Self { family, a_phi };
        // ‖δᵢ‖ = 1/φ⁻¹(1) ≥ 1 keeps the inclusion into ℓ∞ contractive
        if f.eval(T::one()) < T::one() {
            return Err(Error::InvalidOrlicz(
                "φ(1) < 1 would make the lattice norm smaller than the sup norm".into(),
            ));
        }
        Ok(f)
    }

    pub fn power(p: T) -> Result<Self> {
        Self::new(OrliczFamily::Power { p })
    }

    pub fn shifted_ramp(a: T) -> Result<Self> {
        Self::new(OrliczFamily::ShiftedRamp { a })
    }

    pub fn table(points: Vec<[T; 2]>) -> Result<Self> {
        Self::new(OrliczFamily::Table { points })
    }

    pub fn family(&self) -> &OrliczFamily<T> {
        &self.family
    }

    /// Degeneracy point `sup{t > 0 : φ(t) = 0}` (zero if φ is positive on `(0, ∞)`).
    pub fn a_phi(&self) -> T {
        self.a_phi
    }

    pub fn eval(&self, t: T) -> T {
        match &self.family {
            OrliczFamily::Power { p } => t.powf(*p),
            OrliczFamily::ShiftedRamp { a } => ((t - *a) / (T::one() - *a)).max(T::zero()),
            OrliczFamily::Table { points } => {
                let last = points.len() - 1;
                let seg = points
                    .windows(2)
                    .position(|w| t <= w[1][0])
                    .unwrap_or(last - 1);
                let [t0, v0] = points[seg];
                let [t1, v1] = points[seg + 1];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// `φ⁻¹(s) = inf{t ≥ 0 : φ(t) ≥ s}` by bisection against the evaluator.
    pub fn generalized_inverse(&self, s: T) -> Result<T> {
        if !s.is_finite() || s < T::zero() {
            return Err(Error::InvalidOrlicz(format!(
                "level {s} must be finite and ≥ 0"
            )));
        }
        if s == T::zero() {
            return Ok(T::zero());
        }
        let horizon = T::lit(ORLICZ_SEARCH_HORIZON);
        let mut hi = T::one();
        while self.eval(hi) < s {
            hi = hi * T::lit(2.0);
            if hi > horizon {
                return Err(Error::UnreachableLevel {
                    level: s.to_f64_lossy(),
                });
            }
        }
        let mut lo = T::zero();
        loop {
            let mid = lo + (hi - lo) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                return Ok(hi);
            }
            if self.eval(mid) >= s {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Analytic inverse for the named families; `None` for tables.
    pub fn closed_form_inverse(&self, s: T) -> Option<T> {
        match &self.family {
            OrliczFamily::Power { p } => Some(s.powf(T::one() / *p)),
            OrliczFamily::ShiftedRamp { a } => Some(if s == T::zero() {
                T::zero()
            } else {
                *a + (T::one() - *a) * s
            }),
            OrliczFamily::Table { .. } => None,
        }
    }
}

fn validate_table<T: Scalar>(points: &[[T; 2]]) -> Result<T> {
    if points.len() < 2 {
        return Err(Error::InvalidOrlicz(
            "table needs at least two knots".into(),
        ));
    }
    if points[0] != [T::zero(), T::zero()] {
        return Err(Error::InvalidOrlicz("table must start at (0, 0)".into()));
    }
    for w in points.windows(2) {
        let ([t0, v0], [t1, v1]) = (w[0], w[1]);
        if !(t1.is_finite() && v1.is_finite()) {
            return Err(Error::InvalidOrlicz("non-finite knot".into()));
        }
        if t1 <= t0 {
            return Err(Error::InvalidOrlicz(
                "knot abscissae must increase strictly".into(),
            ));
        }
        if v1 < v0 {
            return Err(Error::InvalidOrlicz("φ must be nondecreasing".into()));
        }
    }
    match points.iter().position(|p| p[1] > T::zero()) {
        Some(k) => Ok(points[k - 1][0]),
        None => Err(Error::InvalidOrlicz("φ vanishes identically".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound = "T: Scalar")]
pub enum NormKind<T> {
    Sup,
    /// `‖x‖ = maxᵢ wᵢ|xᵢ|` with every `wᵢ ≥ 1`.
    WeightedSup {
        weights: Vec<T>,
    },
    Lp {
        p: T,
    },
    /// Luxemburg norm of an Orlicz function.
    Orlicz {
        phi: OrliczFunction<T>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawSpec<T> {
    #[serde(flatten)]
    kind: NormKind<T>,
    #[serde(default)]
    index_size: Option<usize>,
}

/// A solid norm family on `{0, …, index_size − 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec<T>", into = "RawSpec<T>")]
#[serde(bound = "T: Scalar")]
pub struct LatticeNormSpec<T> {
    kind: NormKind<T>,
    index_size: usize,
}

impl<T: Scalar> TryFrom<RawSpec<T>> for LatticeNormSpec<T> {
    type Error = Error;
    fn try_from(raw: RawSpec<T>) -> Result<Self> {
        let size = match (&raw.kind, raw.index_size) {
            (_, Some(n)) => n,
            (NormKind::WeightedSup { weights }, None) => weights.len(),
            _ => return Err(Error::InvalidLattice("missing index_size".into())),
        };
        Self::new(raw.kind, size)
    }
}

impl<T: Scalar> From<LatticeNormSpec<T>> for RawSpec<T> {
    fn from(s: LatticeNormSpec<T>) -> Self {
        RawSpec {
            kind: s.kind,
            index_size: Some(s.index_size),
        }
    }
}

/// Supremum of a separable quadratic form over the positive part of the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSup<T> {
    pub value: T,
    pub maximizer: Vec<T>,
    /// False when the value comes from a local ascent rather than a closed form.
    pub exact: bool,
}

/// How `C_E` behaves when the family is extended to an infinite index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
#[serde(bound = "T: Scalar")]
pub enum CeAsymptotic<T> {
    Bounded { limit: T },
    Divergent { growth: Growth<T> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rate", rename_all = "snake_case")]
#[serde(bound = "T: Scalar")]
pub enum Growth<T> {
    /// `‖χ_F‖ = |F|^exponent`.
    Power { exponent: T },
    /// `‖χ_F‖ = 1/φ⁻¹(1/|F|) → ∞`.
    InverseOrlicz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CeReport<T> {
    pub index_size: usize,
    /// `max_F ‖χ_F‖` over subsets of the configured index set.
    pub horizon_value: T,
    pub asymptotic: CeAsymptotic<T>,
    pub description: String,
}

impl<T: Scalar> LatticeNormSpec<T> {
    pub fn new(kind: NormKind<T>, index_size: usize) -> Result<Self> {
        if index_size == 0 {
            return Err(Error::InvalidLattice("index_size must be positive".into()));
        }
        match &kind {
            NormKind::Sup | NormKind::Orlicz { .. } => {}
            NormKind::WeightedSup { weights } => {
                if weights.len() != index_size {
                    return Err(Error::InvalidLattice(format!(
                        "{} weights for index size {index_size}",
                        weights.len()
                    )));
                }
                if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= T::one())) {
                    return Err(Error::InvalidLattice(format!(
                        "weight {w} must be finite and ≥ 1"
                    )));
                }
            }
            NormKind::Lp { p } => {
                if !(p.is_finite() && *p >= T::one()) {
                    return Err(Error::InvalidLattice(format!(
                        "exponent {p} must be finite and ≥ 1"
                    )));
                }
            }
        }
        Ok(Self { kind, index_size })
    }

    pub fn sup(n: usize) -> Result<Self> {
        Self::new(NormKind::Sup, n)
    }

    pub fn weighted_sup(weights: Vec<T>) -> Result<Self> {
        let n = weights.len();
        Self::new(NormKind::WeightedSup { weights }, n)
    }

    pub fn lp(p: T, n: usize) -> Result<Self> {
        Self::new(NormKind::Lp { p }, n)
    }

    pub fn orlicz(phi: OrliczFunction<T>, n: usize) -> Result<Self> {
        Self::new(NormKind::Orlicz { phi }, n)
    }

    pub fn kind(&self) -> &NormKind<T> {
        &self.kind
    }

    pub fn index_size(&self) -> usize {
        self.index_size
    }

    /// Same family on a different index size (weights are not resizable).
    pub fn with_index_size(&self, n: usize) -> Result<Self> {
        Self::new(self.kind.clone(), n)
    }

    /// Restriction lattice `E|J` for a subset `J` of the index set.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self> {
        if let Some(&i) = subset.iter().find(|&&i| i >= self.index_size) {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.index_size,
            });
        }
        let kind = match &self.kind {
            NormKind::WeightedSup { weights } => NormKind::WeightedSup {
                weights: subset.iter().map(|&i| weights[i]).collect(),
            },
            k => k.clone(),
        };
        Self::new(kind, subset.len())
    }

    /// Permutation-invariant families.
    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            NormKind::WeightedSup { weights } => weights.iter().all(|&w| w == weights[0]),
            _ => true,
        }
    }

    /// `‖x‖_E`; rejects wrong lengths and non-finite entries.
    pub fn norm_eval(&self, x: &[T]) -> Result<T> {
        if x.len() != self.index_size {
            return Err(Error::LengthMismatch {
                expected: self.index_size,
                got: x.len(),
            });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let abs: Vec<T> = x.iter().map(|v| v.abs()).collect();
        Ok(self.norm_of_moduli(&abs))
    }

    /// Lattice norm of a vector of moduli. Length must match; unchecked.
    pub fn norm_of_moduli(&self, a: &[T]) -> T {
        debug_assert_eq!(a.len(), self.index_size);
        match &self.kind {
            NormKind::Sup => max_of(a),
            NormKind::WeightedSup { weights } => a
                .iter()
                .zip(weights)
                .fold(T::zero(), |m, (&v, &w)| m.max(w * v)),
            NormKind::Lp { p } => lp_norm(a, *p),
            NormKind::Orlicz { phi } => luxemburg(phi, a),
        }
    }

    /// `‖δᵢ‖_E`.
    pub fn delta_norm(&self, i: usize) -> Result<T> {
        if i >= self.index_size {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.index_size,
            });
        }
        let mut e = vec![T::zero(); self.index_size];
        e[i] = T::one();
        Ok(self.norm_of_moduli(&e))
    }

    /// Worst-case `‖χ_F‖` over subsets with `|F| = n`, from closed forms.
    pub fn chi_norm(&self, n: usize) -> Result<T> {
        if n == 0 || n > self.index_size {
            return Err(Error::SubsetSize {
                size: n,
                max: self.index_size,
            });
        }
        Ok(match &self.kind {
            NormKind::Sup => T::one(),
            NormKind::WeightedSup { weights } => max_of(weights),
            NormKind::Lp { p } => T::from_usize_lossy(n).powf(T::one() / *p),
            NormKind::Orlicz { phi } => {
                T::one() / phi.generalized_inverse(T::one() / T::from_usize_lossy(n))?
            }
        })
    }

    /// An explicit worst-case indicator of size `n` (the `n` heaviest weights
    /// for weighted sup, the first `n` indices otherwise).
    pub fn worst_indicator(&self, n: usize) -> Result<Vec<T>> {
        if n == 0 || n > self.index_size {
            return Err(Error::SubsetSize {
                size: n,
                max: self.index_size,
            });
        }
        let mut order: Vec<usize> = (0..self.index_size).collect();
        if let NormKind::WeightedSup { weights } = &self.kind {
            order.sort_by(|&i, &j| weights[j].partial_cmp(&weights[i]).unwrap());
        }
        let mut chi = vec![T::zero(); self.index_size];
        for &i in &order[..n] {
            chi[i] = T::one();
        }
        Ok(chi)
    }

    /// `C_E` at the configured horizon plus the analytic verdict on an infinite index set.
    pub fn ce_constant(&self) -> Result<CeReport<T>> {
        let horizon_value = match &self.kind {
            NormKind::WeightedSup { weights } => max_of(weights),
            _ => self.chi_norm(self.index_size)?,
        };
        let (asymptotic, description) = match &self.kind {
            NormKind::Sup => (
                CeAsymptotic::Bounded { limit: T::one() },
                "bounded: C_E = 1".to_string(),
            ),
            NormKind::WeightedSup { weights } => {
                let w = max_of(weights);
                (
                    CeAsymptotic::Bounded { limit: w },
                    format!("bounded: C_E = sup w_i = {w}"),
                )
            }
            NormKind::Lp { p } => (
                CeAsymptotic::Divergent {
                    growth: Growth::Power {
                        exponent: T::one() / *p,
                    },
                },
                format!("divergent: ‖χ_F‖ = |F|^(1/{p})"),
            ),
            NormKind::Orlicz { phi } if phi.a_phi() > T::zero() => {
                let limit = T::one() / phi.a_phi();
                (
                    CeAsymptotic::Bounded { limit },
                    format!("bounded: C_E = 1/a_phi = {limit}"),
                )
            }
            NormKind::Orlicz { .. } => (
                CeAsymptotic::Divergent {
                    growth: Growth::InverseOrlicz,
                },
                "divergent: ‖χ_F‖ = 1/φ⁻¹(1/|F|) → ∞ since a_phi = 0".to_string(),
            ),
        };
        Ok(CeReport {
            index_size: self.index_size,
            horizon_value,
            asymptotic,
            description,
        })
    }

    /// For nonnegative `s`, a point `t ≥ 0` of the unit ball maximizing `⟨s, t⟩`,
    /// together with the maximum (the dual norm `‖s‖_{E*}`).
    pub fn dual_norming(&self, s: &[T]) -> Result<(Vec<T>, T)> {
        debug_assert_eq!(s.len(), self.index_size);
        let n = self.index_size;
        let argmax = || argmax_of(s);
        let t = match &self.kind {
            NormKind::Sup => vec![T::one(); n],
            NormKind::WeightedSup { weights } => weights.iter().map(|&w| T::one() / w).collect(),
            NormKind::Lp { p } => lp_norming(s, *p, argmax()),
            NormKind::Orlicz { phi } => match phi.family() {
                OrliczFamily::Power { p } => lp_norming(s, *p, argmax()),
                OrliczFamily::ShiftedRamp { a } => {
                    let mut t = vec![*a; n];
                    t[argmax()] = T::one();
                    t
                }
                OrliczFamily::Table { .. } => {
                    return Err(Error::Unsupported(
                        "dual norm of a tabulated Orlicz lattice".into(),
                    ))
                }
            },
        };
        let value = s.iter().zip(&t).map(|(&a, &b)| a * b).sum();
        Ok((t, value))
    }

    /// For nonnegative `a`, a functional `s ≥ 0` with `‖s‖_{E*} ≤ 1` and
    /// `⟨s, a⟩ = ‖a‖_E` (up to the Luxemburg tolerance).
    pub fn norming_functional(&self, a: &[T]) -> Result<Vec<T>> {
        debug_assert_eq!(a.len(), self.index_size);
        let n = self.index_size;
        let norm = self.norm_of_moduli(a);
        if norm == T::zero() {
            return Ok(vec![T::zero(); n]);
        }
        let unit_at = |j: usize, v: T| {
            let mut s = vec![T::zero(); n];
            s[j] = v;
            s
        };
        let holder =
            |p: T| -> Vec<T> { a.iter().map(|&v| (v / norm).powf(p - T::one())).collect() };
        Ok(match &self.kind {
            NormKind::Sup => unit_at(argmax_of(a), T::one()),
            NormKind::WeightedSup { weights } => {
                let wa: Vec<T> = a.iter().zip(weights).map(|(&v, &w)| v * w).collect();
                let j = argmax_of(&wa);
                unit_at(j, weights[j])
            }
            NormKind::Lp { p } => holder(*p),
            NormKind::Orlicz { phi } => match phi.family() {
                OrliczFamily::Power { p } => holder(*p),
                OrliczFamily::ShiftedRamp { a: shift } => {
                    // gradient of the Luxemburg norm: the indicator of the active set, rescaled
                    let active: Vec<bool> = a.iter().map(|&v| v / norm > *shift).collect();
                    let mut s: Vec<T> = active
                        .iter()
                        .map(|&on| if on { T::one() } else { T::zero() })
                        .collect();
                    if !active.iter().any(|&on| on) {
                        s = unit_at(argmax_of(a), T::one());
                    }
                    let (_, dual) = self.dual_norming(&s)?;
                    s.iter_mut().for_each(|v| *v = *v / dual);
                    s
                }
                OrliczFamily::Table { .. } => {
                    return Err(Error::Unsupported(
                        "dual norm of a tabulated Orlicz lattice".into(),
                    ))
                }
            },
        })
    }

    /// `‖y‖_{E*}` under the coordinate pairing.
    pub fn dual_norm(&self, y: &[T]) -> Result<T> {
        let s: Vec<T> = y.iter().map(|v| v.abs()).collect();
        self.dual_norming(&s).map(|(_, v)| v)
    }

    /// `sup{Σ|tᵢ|xᵢ² : x ≥ 0, ‖x‖_E ≤ 1}`, which is the operator norm of the
    /// diagonal map `diag(t): E → E*`.
    pub fn quadratic_sup(&self, t: &[T]) -> QuadraticSup<T> {
        let t: Vec<T> = t.iter().map(|v| v.abs()).collect();
        let n = self.index_size;
        let finish = |maximizer: Vec<T>, exact: bool| QuadraticSup {
            value: t.iter().zip(&maximizer).map(|(&a, &x)| a * x * x).sum(),
            maximizer,
            exact,
        };
        let unit = |j: usize| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        };
        let power_case = |p: T| {
            let two = T::lit(2.0);
            if p <= two {
                unit(argmax_of(&t))
            } else {
                // u = x² ranges over the ℓ_{p/2} ball; the dual exponent is p/(p−2)
                let r = p / two;
                let u = lp_norming(&t, r, argmax_of(&t));
                u.iter().map(|v| v.sqrt()).collect()
            }
        };
        match &self.kind {
            NormKind::Sup => finish(vec![T::one(); n], true),
            NormKind::WeightedSup { weights } => {
                finish(weights.iter().map(|&w| T::one() / w).collect(), true)
            }
            NormKind::Lp { p } => finish(power_case(*p), true),
            NormKind::Orlicz { phi } => match phi.family() {
                OrliczFamily::Power { p } => finish(power_case(*p), true),
                OrliczFamily::ShiftedRamp { a } => {
                    let mut x = vec![*a; n];
                    x[argmax_of(&t)] = T::one();
                    finish(x, true)
                }
                OrliczFamily::Table { .. } => {
                    let x = self.quadratic_ascent(&t);
                    finish(x, false)
                }
            },
        }
    }

    /// Coordinate-wise multiplicative hill climbing on the unit sphere.
    fn quadratic_ascent(&self, t: &[T]) -> Vec<T> {
        let n = self.index_size;
        let objective = |x: &[T]| -> T { t.iter().zip(x).map(|(&a, &v)| a * v * v).sum() };
        let normalize = |mut x: Vec<T>| {
            let nx = self.norm_of_moduli(&x);
            if nx > T::zero() {
                x.iter_mut().for_each(|v| *v = *v / nx);
            }
            x
        };
        let mut starts: Vec<Vec<T>> = (0..n)
            .map(|j| {
                let mut e = vec![T::zero(); n];
                e[j] = T::one();
                e
            })
            .collect();
        starts.push(vec![T::one(); n]);
        let mut best = normalize(starts[0].clone());
        let mut best_val = objective(&best);
        for s in starts {
            let mut x = normalize(s.into_iter().map(|v| v.max(T::lit(1e-3))).collect());
            let mut val = objective(&x);
            let mut h = T::lit(0.5);
            while h > T::lit(1e-9) {
                let mut improved = false;
                for j in 0..n {
                    for factor in [T::one() + h, T::one() / (T::one() + h)] {
                        let mut y = x.clone();
                        y[j] = y[j] * factor;
                        let y = normalize(y);
                        let v = objective(&y);
                        if v > val {
                            x = y;
                            val = v;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    h = h / T::lit(2.0);
                }
            }
            if val > best_val {
                best = x;
                best_val = val;
            }
        }
        best
    }
}

fn max_of<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &v| m.max(v))
}

fn argmax_of<T: Scalar>(a: &[T]) -> usize {
    a.iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        })
        .0
}

fn lp_norm<T: Scalar>(a: &[T], p: T) -> T {
    let m = max_of(a);
    if m == T::zero() {
        return m;
    }
    m * a
        .iter()
        .map(|&v| (v / m).powf(p))
        .sum::<T>()
        .powf(T::one() / p)
}

/// Point of the ℓp unit ball norming the nonnegative functional `s`.
fn lp_norming<T: Scalar>(s: &[T], p: T, argmax: usize) -> Vec<T> {
    let n = s.len();
    if p == T::one() || max_of(s) == T::zero() {
        let mut t = vec![T::zero(); n];
        t[argmax] = T::one();
        return t;
    }
    let q = p / (p - T::one());
    let raw: Vec<T> = s.iter().map(|&v| v.powf(q - T::one())).collect();
    let nr = lp_norm(&raw, p);
    raw.into_iter().map(|v| v / nr).collect()
}

fn luxemburg<T: Scalar>(phi: &OrliczFunction<T>, a: &[T]) -> T {
    let m = max_of(a);
    if m == T::zero() {
        return m;
    }
    let support = a.iter().filter(|&&v| v > T::zero()).count();
    let inv1 = phi
        .generalized_inverse(T::one())
        .expect("φ(1) ≥ 1 makes level 1 reachable");
    let inv_n = phi
        .generalized_inverse(T::one() / T::from_usize_lossy(support))
        .expect("levels below 1 are reachable");
    let feasible = |lambda: T| a.iter().map(|&v| phi.eval(v / lambda)).sum::<T>() <= T::one();
    let mut lo = m / inv1;
    let mut hi = m / inv_n;
    let mut grow = T::lit(1e-12);
    while !feasible(hi) {
        hi = hi * (T::one() + grow);
        grow = grow * T::lit(4.0);
    }
    if lo > hi {
        lo = hi;
    }
    if feasible(lo) {
        return lo;
    }
    let tol = T::tol(LUXEMBURG_REL_TOL);
    while hi - lo > tol * hi {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(a: f64, n: usize) -> LatticeNormSpec<f64> {
        LatticeNormSpec::orlicz(OrliczFunction::shifted_ramp(a).unwrap(), n).unwrap()
    }

    #[test]
    fn l2_indicator() {
        let s = LatticeNormSpec::lp(2.0, 4).unwrap();
        assert_eq!(s.norm_eval(&[1.0; 4]).unwrap(), 2.0);
        assert_eq!(s.chi_norm(4).unwrap(), 2.0);
    }

    #[test]
    fn weighted_sup_examples() {
        let s = LatticeNormSpec::weighted_sup(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.norm_eval(&[1.0, 1.0, 1.0]).unwrap(), 3.0);
        let ce = s.ce_constant().unwrap();
        assert_eq!(ce.horizon_value, 3.0);
        assert_eq!(ce.asymptotic, CeAsymptotic::Bounded { limit: 3.0 });
        // worst-case subsets pick the heaviest weights
        assert_eq!(s.worst_indicator(1).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(s.chi_norm(1).unwrap(), 3.0);
    }

    #[test]
    fn ramp_indicator_by_bisection() {
        // closed form 1/(a + (1-a)/n)
        let s = ramp(0.5, 4);
        let got = s.norm_eval(&[1.0; 4]).unwrap();
        assert!((got - 1.6).abs() < 1e-9, "{got}");
        assert!((s.chi_norm(4).unwrap() - 1.6).abs() < 1e-12);
    }

    #[test]
    fn generalized_inverse_examples() {
        let sq = OrliczFunction::<f64>::power(2.0).unwrap();
        assert!((sq.generalized_inverse(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((sq.generalized_inverse(0.25).unwrap() - 0.5).abs() < 1e-15);
        let r = OrliczFunction::<f64>::shifted_ramp(0.5).unwrap();
        assert!((r.generalized_inverse(0.1).unwrap() - 0.55).abs() < 1e-15);
        assert_eq!(r.generalized_inverse(0.0).unwrap(), 0.0);
        assert_eq!(r.a_phi(), 0.5);
    }

    #[test]
    fn orlicz_power_chi() {
        let s = LatticeNormSpec::orlicz(OrliczFunction::<f64>::power(2.0).unwrap(), 9).unwrap();
        assert!((s.chi_norm(9).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn unreachable_level() {
        // flat after reaching 1: levels above 1 are never attained
        let f = OrliczFunction::table(vec![[0.0, 0.0], [1.0, 1.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(
            f.generalized_inverse(2.0),
            Err(Error::UnreachableLevel { .. })
        ));
    }

    #[test]
    fn table_degeneracy_point() {
        let f = OrliczFunction::<f64>::table(vec![[0.0, 0.0], [0.25, 0.0], [1.0, 1.0]]).unwrap();
        assert_eq!(f.a_phi(), 0.25);
        assert!((f.eval(0.625) - 0.5).abs() < 1e-15);
        // matches the ramp with the same shift
        let s = LatticeNormSpec::orlicz(f, 3).unwrap();
        let r = ramp(0.25, 3);
        let x = [0.3, 0.9, 0.1];
        assert!((s.norm_eval(&x).unwrap() - r.norm_eval(&x).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn admissibility_gate() {
        assert!(OrliczFunction::table(vec![[0.0, 0.0], [2.0, 1.0]]).is_err());
        assert!(OrliczFunction::power(0.5).is_err());
        assert!(OrliczFunction::shifted_ramp(1.0).is_err());
        assert!(LatticeNormSpec::weighted_sup(vec![0.5, 2.0]).is_err());
        assert!(LatticeNormSpec::<f64>::lp(0.9, 3).is_err());
        assert!(LatticeNormSpec::<f64>::sup(0).is_err());
    }

    #[test]
    fn norm_eval_errors() {
        let s = LatticeNormSpec::<f64>::sup(3).unwrap();
        assert_eq!(
            s.norm_eval(&[1.0]),
            Err(Error::LengthMismatch {
                expected: 3,
                got: 1
            })
        );
        assert_eq!(s.norm_eval(&[1.0, f64::NAN, 0.0]), Err(Error::NonFinite(1)));
        assert_eq!(s.norm_eval(&[1.0, -4.0, 2.0]).unwrap(), 4.0);
        assert!(s.chi_norm(0).is_err());
        assert!(s.chi_norm(4).is_err());
    }

    #[test]
    fn ce_verdicts() {
        let l2 = LatticeNormSpec::lp(2.0, 16).unwrap().ce_constant().unwrap();
        assert_eq!(l2.horizon_value, 4.0);
        assert_eq!(
            l2.asymptotic,
            CeAsymptotic::Divergent {
                growth: Growth::Power { exponent: 0.5 }
            }
        );
        let r = ramp(0.25, 10).ce_constant().unwrap();
        assert_eq!(r.asymptotic, CeAsymptotic::Bounded { limit: 4.0 });
        let pw = LatticeNormSpec::orlicz(OrliczFunction::power(3.0).unwrap(), 5).unwrap();
        assert_eq!(
            pw.ce_constant().unwrap().asymptotic,
            CeAsymptotic::Divergent {
                growth: Growth::InverseOrlicz
            }
        );
    }

    #[test]
    fn dual_norms() {
        let l3 = LatticeNormSpec::lp(3.0, 3).unwrap();
        let y = [1.0, -2.0, 0.5];
        let q: f64 = 1.5;
        let expect = y
            .iter()
            .map(|v: &f64| v.abs().powf(q))
            .sum::<f64>()
            .powf(1.0 / q);
        assert!((l3.dual_norm(&y).unwrap() - expect).abs() < 1e-12);
        let sup = LatticeNormSpec::sup(3).unwrap();
        assert_eq!(sup.dual_norm(&y).unwrap(), 3.5);
        let (t, v) = ramp(0.5, 3).dual_norming(&[1.0, 2.0, 0.5]).unwrap();
        assert!((ramp(0.5, 3).norm_of_moduli(&t) - 1.0).abs() < 1e-9);
        assert!((v - (0.5 * 3.5 + 0.5 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn norming_functionals_attain_the_norm() {
        let a = [0.3, 1.2, 0.7, 0.0];
        let specs = [
            LatticeNormSpec::sup(4).unwrap(),
            LatticeNormSpec::weighted_sup(vec![1.0, 1.5, 3.0, 2.0]).unwrap(),
            LatticeNormSpec::lp(1.0, 4).unwrap(),
            LatticeNormSpec::lp(2.5, 4).unwrap(),
            ramp(0.25, 4),
            ramp(0.5, 4),
        ];
        for s in &specs {
            let f = s.norming_functional(&a).unwrap();
            let dual = s.dual_norm(&f).unwrap();
            let pairing: f64 = f.iter().zip(&a).map(|(x, y)| x * y).sum();
            assert!(dual <= 1.0 + 1e-12, "{s:?}: dual {dual}");
            let n = s.norm_of_moduli(&a);
            assert!((pairing - n).abs() < 1e-8 * n, "{s:?}: {pairing} vs {n}");
        }
    }

    #[test]
    fn quadratic_sup_closed_forms() {
        let ones = [1.0f64; 4];
        assert_eq!(
            LatticeNormSpec::sup(4).unwrap().quadratic_sup(&ones).value,
            4.0
        );
        assert_eq!(
            LatticeNormSpec::lp(1.5, 4)
                .unwrap()
                .quadratic_sup(&ones)
                .value,
            1.0
        );
        let l4 = LatticeNormSpec::lp(4.0, 4).unwrap().quadratic_sup(&ones);
        assert!(
            (l4.value - 2.0).abs() < 1e-12,
            "n^(1-2/p) = 2, got {}",
            l4.value
        );
        let r = ramp(0.5, 4).quadratic_sup(&ones);
        assert!((r.value - (0.25 * 4.0 + 0.75)).abs() < 1e-15);
        // the tabulated ramp reaches the same supremum by ascent
        let tab = LatticeNormSpec::orlicz(
            OrliczFunction::table(vec![[0.0, 0.0], [0.5, 0.0], [1.0, 1.0]]).unwrap(),
            4,
        )
        .unwrap()
        .quadratic_sup(&ones);
        assert!(!tab.exact);
        assert!((tab.value - 1.75).abs() < 1e-6, "{}", tab.value);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind":"orlicz","phi":{"family":"shifted_ramp","a":0.5},"index_size":4}"#;
        let s: LatticeNormSpec<f64> = serde_json::from_str(text).unwrap();
        assert_eq!(s, ramp(0.5, 4));
        let back: LatticeNormSpec<f64> =
            serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let w: LatticeNormSpec<f64> =
            serde_json::from_str(r#"{"kind":"weighted_sup","weights":[1,2]}"#).unwrap();
        assert_eq!(w.index_size(), 2);
        assert!(serde_json::from_str::<LatticeNormSpec<f64>>(
            r#"{"kind":"lp","p":0.5,"index_size":2}"#
        )
        .is_err());
    }

    #[test]
    fn single_precision_smoke() {
        let s =
            LatticeNormSpec::<f32>::orlicz(OrliczFunction::shifted_ramp(0.5).unwrap(), 4).unwrap();
        assert!((s.norm_eval(&[1.0; 4]).unwrap() - 1.6).abs() < 1e-4);
    }
}
