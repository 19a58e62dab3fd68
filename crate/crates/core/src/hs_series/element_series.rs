use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exterior::ExteriorElement;
use crate::scalars::Scalar;

use super::MultiIndex;

/// A `⋀V`-valued polynomial in `vars` variables, truncated at total degree
/// `truncation`. Zero coefficients are absent.
#[derive(Clone, PartialEq, Debug)]
pub struct ElementSeries<S> {
    dim: usize,
    vars: usize,
    truncation: u32,
    coeffs: BTreeMap<MultiIndex, ExteriorElement<S>>,
}

impl<S: Scalar> ElementSeries<S> {
    pub fn zero(dim: usize, vars: usize, truncation: u32) -> Self {
        ElementSeries {
            dim,
            vars,
            truncation,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(u: ExteriorElement<S>, vars: usize, truncation: u32) -> Self {
        let mut out = Self::zero(u.dim(), vars, truncation);
        out.add_at(MultiIndex::zero(vars), &u, &S::one());
        out
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

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, index: &MultiIndex) -> ExteriorElement<S> {
        self.coeffs
            .get(index)
            .cloned()
            .unwrap_or_else(|| ExteriorElement::zero(self.dim))
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &ExteriorElement<S>)> {
        self.coeffs.iter()
    }

    /// `self[index] += factor · u`, ignoring indices beyond the truncation.
    pub(crate) fn add_at(&mut self, index: MultiIndex, u: &ExteriorElement<S>, factor: &S) {
        if index.degree() > self.truncation || u.is_zero() {
            return;
        }
        let entry = self
            .coeffs
            .entry(index.clone())
            .or_insert_with(|| ExteriorElement::zero(self.dim));
        entry.add_scaled(u, factor);
        if entry.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub(crate) fn entry_mut(&mut self, index: MultiIndex) -> &mut ExteriorElement<S> {
        let dim = self.dim;
        self.coeffs
            .entry(index)
            .or_insert_with(|| ExteriorElement::zero(dim))
    }

    pub(crate) fn prune(&mut self) {
        self.coeffs.retain(|_, c| !c.is_zero());
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

    /// Cauchy product under `∧`, truncated.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.dim, self.vars, self.truncation);
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if i.degree() + j.degree() > self.truncation {
                    continue;
                }
                let slot = out.entry_mut(i.add(j));
                a.wedge_into(b, &S::one(), slot);
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            out.add_at(i.clone(), c, &-S::one());
        }
        Ok(out)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs
            .values()
            .map(ExteriorElement::max_magnitude)
            .fold(0.0, f64::max)
    }
}
