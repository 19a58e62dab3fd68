use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Exponent vector of a monomial `z_1^{i_1} ⋯ z_m^{i_m}`.
///
/// Ordered graded-lexicographically: first by total degree, then by the
/// lexicographic monomial order with `z_1 > z_2 > ⋯ > z_m`, so that within a
/// degree `(1,0,0)` precedes `(0,1,0)` precedes `(0,0,1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(vars: usize) -> Self {
        MultiIndex(vec![0; vars])
    }

    /// `e_k`, with `k` 0-based.
    pub fn unit(vars: usize, k: usize) -> Self {
        let mut e = vec![0; vars];
        e[k] = 1;
        MultiIndex(e)
    }

    /// Square-free index `e_{k1} + ⋯ + e_{kr}` for distinct 0-based slots.
    pub fn indicator(vars: usize, slots: &[usize]) -> Self {
        let mut e = vec![0; vars];
        for &k in slots {
            e[k] += 1;
        }
        MultiIndex(e)
    }

    pub fn vars(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn is_square_free(&self) -> bool {
        self.0.iter().all(|&e| e <= 1)
    }

    pub fn ensure_vars(&self, vars: usize) -> Result<()> {
        if self.vars() == vars {
            Ok(())
        } else {
            Err(Error::MultiIndexLength {
                expected: vars,
                found: self.vars(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.vars(), other.vars());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// All indices of total degree `degree`, in increasing order.
    pub fn all_of_degree(vars: usize, degree: u32) -> Vec<MultiIndex> {
        fn fill(prefix: &mut Vec<u32>, slots: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
            if slots == 1 {
                prefix.push(remaining);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for first in (0..=remaining).rev() {
                prefix.push(first);
                fill(prefix, slots - 1, remaining - first, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if vars == 0 {
            if degree == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        fill(&mut Vec::with_capacity(vars), vars, degree, &mut out);
        out
    }

    /// All indices with `|i| ≤ max_degree`, in increasing order.
    pub fn all_up_to(vars: usize, max_degree: u32) -> Vec<MultiIndex> {
        (0..=max_degree)
            .flat_map(|d| Self::all_of_degree(vars, d))
            .collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}
