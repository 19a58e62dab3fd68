use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exterior::{Blade, ExteriorElement};
use crate::matrix::Matrix;
use crate::scalars::Scalar;

/// A linear endomorphism of `⋀K^n`, stored column by column: the image of
/// each basis blade. Blades mapping to zero are absent.
#[derive(Clone, PartialEq, Debug)]
pub struct Operator<S> {
    dim: usize,
    columns: BTreeMap<Blade, ExteriorElement<S>>,
}

impl<S: Scalar> Operator<S> {
    pub fn zero(dim: usize) -> Self {
        Operator {
            dim,
            columns: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Operator {
            dim,
            columns: Blade::all(dim)
                .map(|b| (b, ExteriorElement::blade(dim, b)))
                .collect(),
        }
    }

    pub fn from_columns(dim: usize, columns: impl IntoIterator<Item = (Blade, ExteriorElement<S>)>) -> Self {
        Operator {
            dim,
            columns: columns.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn image(&self, blade: Blade) -> ExteriorElement<S> {
        self.columns
            .get(&blade)
            .cloned()
            .unwrap_or_else(|| ExteriorElement::zero(self.dim))
    }

    pub fn columns(&self) -> impl Iterator<Item = (Blade, &ExteriorElement<S>)> {
        self.columns.iter().map(|(b, c)| (*b, c))
    }

    pub fn apply(&self, u: &ExteriorElement<S>) -> ExteriorElement<S> {
        let mut out = ExteriorElement::zero(self.dim);
        self.apply_into(u, &S::one(), &mut out);
        out
    }

    /// `out += factor · self(u)`.
    pub(crate) fn apply_into(&self, u: &ExteriorElement<S>, factor: &S, out: &mut ExteriorElement<S>) {
        for (b, c) in u.terms() {
            if let Some(col) = self.columns.get(&b) {
                out.add_scaled(col, &(c.clone() * factor));
            }
        }
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        Operator::from_columns(
            self.dim,
            rhs.columns.iter().map(|(b, col)| (*b, self.apply(col))),
        )
    }

    /// `self += factor · (left ∘ right)`.
    pub(crate) fn add_composition(&mut self, left: &Self, right: &Self, factor: &S) {
        for (b, col) in &right.columns {
            let entry = self
                .columns
                .entry(*b)
                .or_insert_with(|| ExteriorElement::zero(self.dim));
            left.apply_into(col, factor, entry);
            if entry.is_zero() {
                self.columns.remove(b);
            }
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        Operator::from_columns(self.dim, self.columns.iter().map(|(b, c)| (*b, c.scale(factor))))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut columns = self.columns.clone();
        for (b, c) in &other.columns {
            let entry = columns
                .entry(*b)
                .or_insert_with(|| ExteriorElement::zero(self.dim));
            entry.add_scaled(c, &-S::one());
            if entry.is_zero() {
                columns.remove(b);
            }
        }
        Ok(Operator { dim: self.dim, columns })
    }

    /// Every column maps a grade-`k` blade into `⋀^k`.
    pub fn is_grade_preserving(&self) -> bool {
        self.columns
            .iter()
            .all(|(b, col)| col.terms().all(|(t, _)| t.grade() == b.grade()))
    }

    /// The `n × n` block acting on `⋀^1 = V`.
    pub fn restriction_to_v(&self) -> Matrix<S> {
        let n = self.dim;
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let img = self.image(Blade::basis(j + 1));
            for i in 0..n {
                m.set(i, j, img.coefficient(Blade::basis(i + 1)));
            }
        }
        m
    }

    /// Dense `2^n × 2^n` matrix in the blade basis ordered by mask.
    pub fn to_dense(&self) -> Matrix<S> {
        let size = 1usize << self.dim;
        let mut m = Matrix::zeros(size, size);
        for (b, col) in &self.columns {
            for (t, c) in col.terms() {
                m.set(t.mask() as usize, b.mask() as usize, c.clone());
            }
        }
        m
    }

    pub fn from_dense(dim: usize, m: &Matrix<S>) -> Self {
        Operator::from_columns(
            dim,
            Blade::all(dim).map(|b| {
                let col = m.column(b.mask() as usize);
                let elem = ExteriorElement::from_terms(
                    dim,
                    col.into_iter()
                        .enumerate()
                        .map(|(row, c)| (Blade::from_mask(row as u32), c)),
                )
                .expect("rows are blades of dim");
                (b, elem)
            }),
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        if *self == Self::identity(self.dim) {
            return Ok(self.clone());
        }
        let inv = self.to_dense().inverse()?;
        Ok(Self::from_dense(self.dim, &inv))
    }

    pub fn max_magnitude(&self) -> f64 {
        self.columns
            .values()
            .map(ExteriorElement::max_magnitude)
            .fold(0.0, f64::max)
    }

    /// Renders nonzero grade blocks as `grade-k block: (row,col,value) …`.
    pub fn dump_blocks(&self) -> String {
        let mut blocks: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (b, col) in &self.columns {
            for (t, c) in col.terms() {
                blocks
                    .entry(b.grade())
                    .or_default()
                    .push(format!("({t:?},{b:?},{c})"));
            }
        }
        let mut out = String::new();
        for (k, (grade, triples)) in blocks.iter().enumerate() {
            if k > 0 {
                out.push_str("; ");
            }
            let _ = write!(out, "grade-{grade} block: {}", triples.join(" "));
        }
        out
    }
}
