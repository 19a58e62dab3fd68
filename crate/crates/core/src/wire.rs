//! JSON interchange forms.
//!
//! Scalars travel as strings (`"p/q"`, or `"p"` for integers) so that no
//! value passes through a binary float on the way in or out. Inputs also
//! accept bare JSON numbers, read as exact decimals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{Blade, ExteriorElement};
use crate::hs_series::{ElementSeries, MultiIndex};
use crate::identities::{DeltaPerturbation, IdentityReport, Residual};
use crate::matrix::Matrix;
use crate::scalars::{Rational, Scalar};
use crate::traces::TraceTensor;

/// A scalar as written in an input document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Text(String),
    Number(serde_json::Number),
}

impl ScalarJson {
    pub fn parse<S: Scalar>(&self) -> Result<S> {
        match self {
            ScalarJson::Text(t) => S::parse(t),
            ScalarJson::Number(n) => Ok(S::from_rational(&Rational::from_decimal_str(&n.to_string())?)),
        }
    }

    pub fn render<S: Scalar>(value: &S) -> Self {
        ScalarJson::Text(value.to_string())
    }
}

pub type MatrixJson = Vec<Vec<ScalarJson>>;

pub fn matrix_from_json<S: Scalar>(rows: &MatrixJson) -> Result<Matrix<S>> {
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(ScalarJson::parse).collect::<Result<Vec<S>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(parsed)
}

pub fn matrix_to_json<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<String>> {
    m.row_vecs()
        .iter()
        .map(|r| r.iter().map(ToString::to_string).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub blade: Vec<usize>,
    pub coeff: ScalarJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

impl ElementJson {
    pub fn from_element<S: Scalar>(u: &ExteriorElement<S>) -> Self {
        ElementJson {
            n: u.dim(),
            terms: u
                .terms()
                .map(|(b, c)| TermJson {
                    blade: b.indices(),
                    coeff: ScalarJson::render(c),
                })
                .collect(),
        }
    }

    pub fn to_element<S: Scalar>(&self) -> Result<ExteriorElement<S>> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((Blade::from_indices(&t.blade, self.n)?, t.coeff.parse()?)))
            .collect::<Result<Vec<(Blade, S)>>>()?;
        ExteriorElement::from_terms(self.n, terms)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorEntryJson {
    pub index: Vec<u32>,
    pub value: ScalarJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub n: usize,
    pub entries: Vec<TensorEntryJson>,
}

impl TensorJson {
    /// Every entry with `|i| ≤ n`, zeros included, in graded-lex order.
    pub fn from_tensor<S: Scalar>(t: &TraceTensor<S>) -> Self {
        TensorJson {
            n: t.dim(),
            entries: t
                .all_entries()
                .into_iter()
                .map(|(i, v)| TensorEntryJson {
                    index: i.exponents().to_vec(),
                    value: ScalarJson::render(&v),
                })
                .collect(),
        }
    }

    pub fn to_tensor<S: Scalar>(&self) -> Result<TraceTensor<S>> {
        let vars = self
            .entries
            .first()
            .map(|e| e.index.len())
            .ok_or(Error::TensorMismatch("tensor has no entries"))?;
        let entries = self
            .entries
            .iter()
            .map(|e| Ok((MultiIndex::new(e.index.clone()), e.value.parse()?)))
            .collect::<Result<Vec<(MultiIndex, S)>>>()?;
        TraceTensor::from_entries(self.n, vars, entries)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTermJson {
    pub index: Vec<u32>,
    pub element: ElementJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResidualJson {
    Scalar(String),
    Matrix(Vec<Vec<String>>),
    Matrices(Vec<Vec<Vec<String>>>),
    Tensor(TensorJson),
    Series(Vec<Vec<SeriesTermJson>>),
}

fn series_to_json<S: Scalar>(s: &ElementSeries<S>) -> Vec<SeriesTermJson> {
    s.coefficients()
        .map(|(i, u)| SeriesTermJson {
            index: i.exponents().to_vec(),
            element: ElementJson::from_element(u),
        })
        .collect()
}

impl ResidualJson {
    pub fn from_residual<S: Scalar>(r: &Residual<S>) -> Self {
        match r {
            Residual::Scalar(s) => ResidualJson::Scalar(s.to_string()),
            Residual::Matrix(m) => ResidualJson::Matrix(matrix_to_json(m)),
            Residual::Matrices(ms) => ResidualJson::Matrices(ms.iter().map(matrix_to_json).collect()),
            Residual::Tensor(t) => ResidualJson::Tensor(TensorJson::from_tensor(t)),
            Residual::Series(ss) => ResidualJson::Series(ss.iter().map(series_to_json).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub identity: String,
    pub n: usize,
    pub is_zero: bool,
    pub residual: ResidualJson,
    pub seed: Option<u64>,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_abs: Option<f64>,
}

impl ReportJson {
    pub fn from_report<S: Scalar>(r: &IdentityReport<S>) -> Self {
        ReportJson {
            identity: r.identity.clone(),
            n: r.n,
            is_zero: r.is_zero,
            residual: ResidualJson::from_residual(&r.residual),
            seed: r.seed,
            mode: S::MODE.to_string(),
            max_abs: r.max_abs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationJson {
    pub index: Vec<u32>,
    pub by: ScalarJson,
}

/// A matrix family plus optional extras used by individual checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub n: usize,
    #[serde(default = "default_mode")]
    pub mode: String,
    pub matrices: Vec<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// `P` for the conjugacy check.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conjugator: Option<MatrixJson>,
    /// Elements for the integration-by-parts check.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u: Option<ElementJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v: Option<ElementJson>,
    /// Shift applied to one δ coefficient of the trilinear star product.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub perturb_delta: Option<PerturbationJson>,
}

fn default_mode() -> String {
    Rational::MODE.to_string()
}

impl InputDocument {
    /// Parses every matrix and checks that each is `n × n`.
    pub fn matrices<S: Scalar>(&self) -> Result<Vec<Matrix<S>>> {
        self.matrices
            .iter()
            .map(|rows| {
                let m = matrix_from_json::<S>(rows)?;
                let k = m.ensure_square()?;
                if k != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        found: k,
                    });
                }
                Ok(m)
            })
            .collect()
    }

    pub fn conjugator<S: Scalar>(&self) -> Result<Option<Matrix<S>>> {
        self.conjugator.as_ref().map(matrix_from_json).transpose()
    }

    pub fn elements<S: Scalar>(&self) -> Result<Option<(ExteriorElement<S>, ExteriorElement<S>)>> {
        match (&self.u, &self.v) {
            (Some(u), Some(v)) => {
                let (u, v) = (u.to_element::<S>()?, v.to_element::<S>()?);
                for w in [&u, &v] {
                    if w.dim() != self.n {
                        return Err(Error::DimensionMismatch {
                            expected: self.n,
                            found: w.dim(),
                        });
                    }
                }
                Ok(Some((u, v)))
            }
            _ => Ok(None),
        }
    }

    pub fn perturbation<S: Scalar>(&self) -> Result<Option<DeltaPerturbation<S>>> {
        self.perturb_delta
            .as_ref()
            .map(|p| {
                Ok(DeltaPerturbation {
                    index: MultiIndex::new(p.index.clone()),
                    by: p.by.parse()?,
                })
            })
            .transpose()
    }

    pub fn from_matrices<S: Scalar>(n: usize, matrices: &[Matrix<S>], seed: Option<u64>) -> Self {
        let to_json = |m: &Matrix<S>| -> MatrixJson {
            m.row_vecs()
                .iter()
                .map(|r| r.iter().map(ScalarJson::render).collect())
                .collect()
        };
        InputDocument {
            n,
            mode: S::MODE.to_string(),
            matrices: matrices.iter().map(to_json).collect(),
            seed,
            conjugator: None,
            u: None,
            v: None,
            perturb_delta: None,
        }
    }
}
