//! Multivariate Hasse–Schmidt derivations as truncated operator series.
//!
//! A series `D(z) = Σ_i D_i z^i` has coefficients in `End(⋀V)`. The series
//! built here are algebra homomorphisms `⋀V → ⋀V[[z]]`, determined by their
//! restriction to `V`. Coefficients are stored exactly as they appear in the
//! series, with no sign absorbed; the trace kernel applies `(-1)^{|i|}` itself.

mod element_series;
mod multi_index;
mod operator;

use std::collections::BTreeMap;
use std::fmt::Write as _;

pub use element_series::ElementSeries;
pub use multi_index::MultiIndex;
pub use operator::Operator;

use crate::combinatorics::for_each_multiset_permutation;
use crate::error::{Error, Result};
use crate::exterior::{check_dim, Blade, ExteriorElement};
use crate::matrix::Matrix;
use crate::scalars::Scalar;

/// An ordered family `(φ_1, …, φ_m)` of endomorphisms of `K^n`.
///
/// The family length `m` is the number of formal variables of the derived
/// series. Most of the theory uses `m = n`; callers that need a square
/// family check it with [`EndoTuple::require_len`].
#[derive(Clone, PartialEq, Debug)]
pub struct EndoTuple<S> {
    dim: usize,
    maps: Vec<Matrix<S>>,
}

impl<S: Scalar> EndoTuple<S> {
    pub fn new(maps: Vec<Matrix<S>>) -> Result<Self> {
        let first = maps.first().ok_or(Error::EmptyTuple)?;
        let dim = first.ensure_square()?;
        check_dim(dim)?;
        for m in &maps {
            let k = m.ensure_square()?;
            if k != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k,
                });
            }
        }
        Ok(EndoTuple { dim, maps })
    }

    /// `(A, A, …, A)` with `len` copies.
    pub fn repeated(a: &Matrix<S>, len: usize) -> Result<Self> {
        Self::new(vec![a.clone(); len])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn get(&self, k: usize) -> &Matrix<S> {
        &self.maps[k]
    }

    pub fn maps(&self) -> &[Matrix<S>] {
        &self.maps
    }

    pub fn require_len(&self, expected: usize) -> Result<()> {
        if self.len() == expected {
            Ok(())
        } else {
            Err(Error::TupleLength {
                expected,
                found: self.len(),
            })
        }
    }

    /// `(P φ_1 P⁻¹, …, P φ_m P⁻¹)`.
    pub fn conjugate(&self, p: &Matrix<S>) -> Result<Self> {
        if p.ensure_square()? != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.rows(),
            });
        }
        let p_inv = p.inverse()?;
        Self::new(self.maps.iter().map(|m| &(p * m) * &p_inv).collect())
    }

    /// The restriction `1 - (φ_1 z_1 + ⋯ + φ_m z_m)` as a matrix-valued polynomial.
    pub fn linear_restriction(&self) -> BTreeMap<MultiIndex, Matrix<S>> {
        let m = self.len();
        let mut f = BTreeMap::new();
        f.insert(MultiIndex::zero(m), Matrix::identity(self.dim));
        for (k, phi) in self.maps.iter().enumerate() {
            f.insert(MultiIndex::unit(m, k), phi.scale(&-S::one()));
        }
        f
    }
}

/// A truncated series `Σ_{|i| ≤ T} D_i z^i` with `D_i ∈ End(⋀K^n)`.
#[derive(Clone, PartialEq, Debug)]
pub struct OperatorSeries<S> {
    dim: usize,
    vars: usize,
    truncation: u32,
    coeffs: BTreeMap<MultiIndex, Operator<S>>,
}

impl<S: Scalar> OperatorSeries<S> {
    pub fn identity(dim: usize, vars: usize, truncation: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(MultiIndex::zero(vars), Operator::identity(dim));
        OperatorSeries {
            dim,
            vars,
            truncation,
            coeffs,
        }
    }

    /// The unique HS-derivation whose restriction to `V` is `f(z)`.
    ///
    /// Each blade `u_{j1} ∧ ⋯ ∧ u_{jk}` is sent to `f(z)u_{j1} ∧ ⋯ ∧ f(z)u_{jk}`,
    /// expanded and truncated at total degree `truncation`.
    pub fn extend_from_v(
        dim: usize,
        vars: usize,
        f: &BTreeMap<MultiIndex, Matrix<S>>,
        truncation: u32,
    ) -> Result<Self> {
        check_dim(dim)?;
        for (i, m) in f {
            i.ensure_vars(vars)?;
            let k = m.ensure_square()?;
            if k != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k,
                });
            }
        }

        // images of basis vectors: f(z) u_j
        let vector_images: Vec<ElementSeries<S>> = (0..dim)
            .map(|j| {
                let mut s = ElementSeries::zero(dim, vars, truncation);
                for (i, m) in f {
                    s.add_at(i.clone(), &ExteriorElement::from_vector(&m.column(j)), &S::one());
                }
                s
            })
            .collect();

        // Blades in ascending mask order: removing the lowest index gives a
        // smaller mask, and u_j ∧ (rest) carries sign + when j < min(rest).
        let size = 1usize << dim;
        let mut images: Vec<ElementSeries<S>> = Vec::with_capacity(size);
        images.push(ElementSeries::constant(ExteriorElement::one(dim), vars, truncation));
        for mask in 1..size as u32 {
            let (j, rest) = Blade::from_mask(mask).split_first().expect("nonzero mask");
            let img = vector_images[j - 1].wedge(&images[rest.mask() as usize])?;
            images.push(img);
        }

        let mut columns: BTreeMap<MultiIndex, Vec<(Blade, ExteriorElement<S>)>> = BTreeMap::new();
        for (mask, img) in images.into_iter().enumerate() {
            for (i, c) in img.coefficients() {
                columns
                    .entry(i.clone())
                    .or_default()
                    .push((Blade::from_mask(mask as u32), c.clone()));
            }
        }
        let coeffs = columns
            .into_iter()
            .map(|(i, cols)| (i, Operator::from_columns(dim, cols)))
            .filter(|(_, op)| !op.is_zero())
            .collect();
        Ok(OperatorSeries {
            dim,
            vars,
            truncation,
            coeffs,
        })
    }

    /// The HS-derivation with restriction `1 - Σ φ_k z_k`, truncated at `truncation`.
    pub fn from_tuple(tuple: &EndoTuple<S>, truncation: u32) -> Result<Self> {
        Self::extend_from_v(tuple.dim(), tuple.len(), &tuple.linear_restriction(), truncation)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn coefficient(&self, index: &MultiIndex) -> Operator<S> {
        self.coeffs
            .get(index)
            .cloned()
            .unwrap_or_else(|| Operator::zero(self.dim))
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &Operator<S>)> {
        self.coeffs.iter()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.vars != other.vars {
            return Err(Error::MultiIndexLength {
                expected: self.vars,
                found: other.vars,
            });
        }
        if self.truncation != other.truncation {
            return Err(Error::TruncationMismatch {
                left: self.truncation,
                right: other.truncation,
            });
        }
        Ok(())
    }

    /// Cauchy product: coefficient `i` is `Σ_{j+l=i} D_j ∘ E_l`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut coeffs: BTreeMap<MultiIndex, Operator<S>> = BTreeMap::new();
        for (j, d) in &self.coeffs {
            for (l, e) in &other.coeffs {
                if j.degree() + l.degree() > self.truncation {
                    continue;
                }
                coeffs
                    .entry(j.add(l))
                    .or_insert_with(|| Operator::zero(self.dim))
                    .add_composition(d, e, &S::one());
            }
        }
        coeffs.retain(|_, op| !op.is_zero());
        Ok(OperatorSeries {
            dim: self.dim,
            vars: self.vars,
            truncation: self.truncation,
            coeffs,
        })
    }

    /// The series `D` with `self · D = 1` up to the truncation.
    ///
    /// `D_0 = C_0⁻¹` and `D_i = -C_0⁻¹ Σ_{0<j≤i} C_j D_{i-j}`, solved in
    /// increasing degree.
    pub fn inverse(&self) -> Result<Self> {
        let zero = MultiIndex::zero(self.vars);
        let constant = self.coeffs.get(&zero).ok_or(Error::NonInvertibleConstant)?;
        let c0_inv = constant.inverse().map_err(|e| match e {
            Error::Singular | Error::DivisionByZero => Error::NonInvertibleConstant,
            other => other,
        })?;
        let unit_constant = c0_inv == Operator::identity(self.dim);

        let mut out: BTreeMap<MultiIndex, Operator<S>> = BTreeMap::new();
        out.insert(zero, c0_inv.clone());
        for i in MultiIndex::all_up_to(self.vars, self.truncation).into_iter().skip(1) {
            let mut acc = Operator::zero(self.dim);
            for (j, c) in &self.coeffs {
                if j.is_zero() {
                    continue;
                }
                let Some(rest) = i.checked_sub(j) else { continue };
                if let Some(d) = out.get(&rest) {
                    acc.add_composition(c, d, &S::one());
                }
            }
            let d_i = if unit_constant {
                acc.scale(&-S::one())
            } else {
                c0_inv.compose(&acc).scale(&-S::one())
            };
            if !d_i.is_zero() {
                out.insert(i, d_i);
            }
        }
        Ok(OperatorSeries {
            dim: self.dim,
            vars: self.vars,
            truncation: self.truncation,
            coeffs: out,
        })
    }

    /// `D(z)u` as a truncated polynomial.
    pub fn apply(&self, u: &ExteriorElement<S>) -> Result<ElementSeries<S>> {
        self.apply_series(&ElementSeries::constant(u.clone(), self.vars, self.truncation))
    }

    /// `D(z)w(z)`: coefficient `i` is `Σ_{j+l=i} D_j w_l`.
    pub fn apply_series(&self, w: &ElementSeries<S>) -> Result<ElementSeries<S>> {
        if w.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: w.dim(),
            });
        }
        if w.vars() != self.vars {
            return Err(Error::MultiIndexLength {
                expected: self.vars,
                found: w.vars(),
            });
        }
        let mut out = ElementSeries::zero(self.dim, self.vars, self.truncation);
        for (j, d) in &self.coeffs {
            for (l, c) in w.coefficients() {
                if j.degree() + l.degree() > self.truncation {
                    continue;
                }
                d.apply_into(c, &S::one(), out.entry_mut(j.add(l)));
            }
        }
        out.prune();
        Ok(out)
    }

    /// `D(u ∧ v) - D(u) ∧ D(v)`; zero exactly when the Leibniz rule holds on `(u, v)`.
    pub fn leibniz_residual(
        &self,
        u: &ExteriorElement<S>,
        v: &ExteriorElement<S>,
    ) -> Result<ElementSeries<S>> {
        let lhs = self.apply(&u.wedge(v)?)?;
        let rhs = self.apply(u)?.wedge(&self.apply(v)?)?;
        lhs.try_sub(&rhs)
    }

    /// Matrix-valued restriction `D(z)|_V`.
    pub fn restriction_to_v(&self) -> BTreeMap<MultiIndex, Matrix<S>> {
        self.coeffs
            .iter()
            .map(|(i, op)| (i.clone(), op.restriction_to_v()))
            .filter(|(_, m)| !m.is_zero())
            .collect()
    }

    pub fn is_grade_preserving(&self) -> bool {
        self.coeffs.values().all(Operator::is_grade_preserving)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut coeffs = self.coeffs.clone();
        for (i, op) in &other.coeffs {
            let diff = coeffs
                .remove(i)
                .unwrap_or_else(|| Operator::zero(self.dim))
                .try_sub(op)?;
            if !diff.is_zero() {
                coeffs.insert(i.clone(), diff);
            }
        }
        Ok(OperatorSeries {
            coeffs,
            ..self.clone()
        })
    }

    /// One line per stored multi-index, in graded-lex order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, op) in &self.coeffs {
            let _ = writeln!(out, "{i:?} {}", op.dump_blocks());
        }
        out
    }
}

/// Which of the two dual integration-by-parts laws to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IbpForm {
    /// `D(z)u ∧ v = D(z)(u ∧ D̄(z)v)`
    Direct,
    /// `D̄(z)u ∧ v = D̄(z)(u ∧ D(z)v)`
    Dual,
}

/// Left side minus right side of the integration-by-parts law, coefficient by
/// coefficient up to the truncation. `d` and `d_bar` must be mutually inverse.
pub fn integration_by_parts_residual<S: Scalar>(
    d: &OperatorSeries<S>,
    d_bar: &OperatorSeries<S>,
    u: &ExteriorElement<S>,
    v: &ExteriorElement<S>,
    form: IbpForm,
) -> Result<ElementSeries<S>> {
    d.check_compatible(d_bar)?;
    let (outer, inner) = match form {
        IbpForm::Direct => (d, d_bar),
        IbpForm::Dual => (d_bar, d),
    };
    let vars = d.vars();
    let t = d.truncation();
    let lhs = outer
        .apply(u)?
        .wedge(&ElementSeries::constant(v.clone(), vars, t))?;
    let inner_v = inner.apply(v)?;
    let u_wedge = ElementSeries::constant(u.clone(), vars, t).wedge(&inner_v)?;
    let rhs = outer.apply_series(&u_wedge)?;
    lhs.try_sub(&rhs)
}

/// Closed form of `(1 - Σ φ_k z_k)^{-1} = Σ_{r≥0} (Σ φ_k z_k)^r` on `V`:
/// coefficient `i` is the sum of `φ_{w_1} ⋯ φ_{w_r}` over all words `w` with
/// content `i`.
pub fn geometric_restriction<S: Scalar>(
    tuple: &EndoTuple<S>,
    truncation: u32,
) -> BTreeMap<MultiIndex, Matrix<S>> {
    let m = tuple.len();
    let n = tuple.dim();
    let mut out = BTreeMap::new();
    for i in MultiIndex::all_up_to(m, truncation) {
        let word: Vec<usize> = i
            .exponents()
            .iter()
            .enumerate()
            .flat_map(|(k, &e)| std::iter::repeat_n(k, e as usize))
            .collect();
        let mut acc = Matrix::zeros(n, n);
        for_each_multiset_permutation(&word, |w| {
            let mut prod = Matrix::identity(n);
            for &k in w {
                prod = &prod * tuple.get(k);
            }
            acc = &acc + &prod;
        });
        if !acc.is_zero() {
            out.insert(i, acc);
        }
    }
    out
}
