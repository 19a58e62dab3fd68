//! The exterior algebra of `K^n`.
//!
//! A basis blade `u_{i1} ∧ ⋯ ∧ u_{ik}` with `i1 < ⋯ < ik` is stored as a bitmask,
//! bit `i - 1` standing for the basis vector `u_i`. Elements are sparse maps from
//! blades to nonzero coefficients, iterated in ascending mask order.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::Scalar;

pub const MAX_DIM: usize = 16;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Blade(u32);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub fn from_mask(mask: u32) -> Blade {
        Blade(mask)
    }

    /// Blade from strictly increasing 1-based indices.
    pub fn from_indices(indices: &[usize], dim: usize) -> Result<Blade> {
        check_dim(dim)?;
        let mut mask = 0u32;
        let mut last = 0usize;
        for &i in indices {
            if i == 0 || i > dim {
                return Err(Error::BladeIndex { index: i, dim });
            }
            if i <= last {
                return Err(Error::UnsortedBlade);
            }
            last = i;
            mask |= 1 << (i - 1);
        }
        Ok(Blade(mask))
    }

    pub fn basis(index: usize) -> Blade {
        Blade(1 << (index - 1))
    }

    /// `u_1 ∧ ⋯ ∧ u_n`.
    pub fn top(dim: usize) -> Blade {
        Blade(((1u64 << dim) - 1) as u32)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    /// 1-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }

    /// Lowest index and the blade with that index removed.
    pub fn split_first(self) -> Option<(usize, Blade)> {
        if self.0 == 0 {
            return None;
        }
        let low = self.0.trailing_zeros() as usize;
        Some((low + 1, Blade(self.0 & (self.0 - 1))))
    }

    /// All blades of `⋀K^dim`, ascending by mask.
    pub fn all(dim: usize) -> impl Iterator<Item = Blade> {
        (0..(1u32 << dim)).map(Blade)
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Sign picked up when the concatenated index lists of two blades are sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WedgeSign {
    Positive,
    Negative,
    /// The blades share an index, so their wedge vanishes.
    Vanishes,
}

/// Parity of `|{(a, b) : a ∈ left, b ∈ right, a > b}|`.
pub fn sign_of_interleave(left: Blade, right: Blade) -> WedgeSign {
    if left.0 & right.0 != 0 {
        return WedgeSign::Vanishes;
    }
    let mut inversions = 0u32;
    let mut rest = right.0;
    while rest != 0 {
        let b = rest.trailing_zeros();
        // indices of `left` strictly above b
        let above = if b >= 31 { 0 } else { left.0 & !((2u32 << b) - 1) };
        inversions += above.count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        WedgeSign::Positive
    } else {
        WedgeSign::Negative
    }
}

#[derive(Clone, PartialEq)]
pub struct ExteriorElement<S> {
    dim: usize,
    terms: BTreeMap<Blade, S>,
}

impl<S: Scalar> ExteriorElement<S> {
    pub fn zero(dim: usize) -> Self {
        ExteriorElement {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(dim: usize, value: S) -> Self {
        Self::monomial(dim, Blade::SCALAR, value)
    }

    pub fn one(dim: usize) -> Self {
        Self::scalar(dim, S::one())
    }

    pub fn monomial(dim: usize, blade: Blade, coeff: S) -> Self {
        let mut out = Self::zero(dim);
        out.add_term(blade, coeff);
        out
    }

    pub fn blade(dim: usize, blade: Blade) -> Self {
        Self::monomial(dim, blade, S::one())
    }

    /// The basis vector `u_index` (1-based).
    pub fn basis_vector(dim: usize, index: usize) -> Self {
        Self::blade(dim, Blade::basis(index))
    }

    /// Grade-one element with the given coordinates.
    pub fn from_vector(coords: &[S]) -> Self {
        let dim = coords.len();
        let mut out = Self::zero(dim);
        for (i, c) in coords.iter().enumerate() {
            out.add_term(Blade::basis(i + 1), c.clone());
        }
        out
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Blade, S)>) -> Result<Self> {
        check_dim(dim)?;
        let mut out = Self::zero(dim);
        for (blade, coeff) in terms {
            if blade.mask() >> dim != 0 {
                return Err(Error::BladeIndex {
                    index: 32 - blade.mask().leading_zeros() as usize,
                    dim,
                });
            }
            out.add_term(blade, coeff);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &S)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, blade: Blade) -> S {
        self.terms.get(&blade).cloned().unwrap_or_else(S::zero)
    }

    /// Coefficient of `u_1 ∧ ⋯ ∧ u_n`.
    pub fn top_form_coefficient(&self) -> S {
        self.coefficient(Blade::top(self.dim))
    }

    /// Adds `coeff · blade`, dropping the term if it cancels.
    pub fn add_term(&mut self, blade: Blade, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(blade) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, other: &Self, factor: &S) {
        debug_assert_eq!(self.dim, other.dim);
        if factor.is_zero() {
            return;
        }
        for (b, c) in &other.terms {
            self.add_term(*b, c.clone() * factor);
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zero(self.dim);
        out.add_scaled(self, factor);
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &S::one());
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &-S::one());
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = Self::zero(self.dim);
        self.wedge_into(other, &S::one(), &mut out);
        Ok(out)
    }

    /// `out += factor · (self ∧ other)`; dimensions are assumed to agree.
    pub(crate) fn wedge_into(&self, other: &Self, factor: &S, out: &mut Self) {
        for (a, ca) in &self.terms {
            let ca = ca.clone() * factor;
            for (b, cb) in &other.terms {
                match sign_of_interleave(*a, *b) {
                    WedgeSign::Vanishes => {}
                    WedgeSign::Positive => {
                        out.add_term(Blade(a.0 | b.0), ca.clone() * cb);
                    }
                    WedgeSign::Negative => {
                        out.add_term(Blade(a.0 | b.0), -(ca.clone() * cb));
                    }
                }
            }
        }
    }

    pub fn grade_component(&self, grade: usize) -> Self {
        ExteriorElement {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.grade() == grade)
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    /// `Some(k)` when every term has grade `k`; `None` for zero or mixed elements.
    pub fn homogeneous_grade(&self) -> Option<usize> {
        let mut grades = self.terms.keys().map(|b| b.grade());
        let first = grades.next()?;
        grades.all(|g| g == first).then_some(first)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.terms.values().map(S::magnitude).fold(0.0, f64::max)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }
}

impl<S: fmt::Debug> fmt::Debug for ExteriorElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (b, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c:?}){b:?}")?;
        }
        Ok(())
    }
}
