use std::io::Read;

use hs_exterior::random::{self, trial_rng};
use hs_exterior::wire::InputDocument;
use hs_exterior::Rational;

use crate::{Cli, Failure, Mode};

pub const DEFAULT_SEED: u64 = 1;
const DEFAULT_N: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    Thm48,
    Star2,
    Star3,
    Eq17,
    Ibp,
    Conjugacy,
    Trsq,
    ClassicalCh,
}

impl Identity {
    pub const ALL: [Identity; 8] = [
        Identity::Thm48,
        Identity::Star2,
        Identity::Star3,
        Identity::Eq17,
        Identity::Ibp,
        Identity::Conjugacy,
        Identity::Trsq,
        Identity::ClassicalCh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Thm48 => "thm48",
            Identity::Star2 => "star2",
            Identity::Star3 => "star3",
            Identity::Eq17 => "eq17",
            Identity::Ibp => "ibp",
            Identity::Conjugacy => "conjugacy",
            Identity::Trsq => "trsq",
            Identity::ClassicalCh => "classical-ch",
        }
    }

    pub fn parse(name: &str) -> Result<Self, Failure> {
        Self::ALL.into_iter().find(|i| i.name() == name).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|i| i.name()).collect();
            Failure::parse(format!("unknown identity {name:?}; expected one of {}", known.join(", ")))
        })
    }

    /// The dimension this identity is defined on, if fixed.
    fn fixed_dim(self) -> Option<usize> {
        match self {
            Identity::Star2 | Identity::Trsq => Some(2),
            Identity::Star3 | Identity::Eq17 => Some(3),
            _ => None,
        }
    }

    /// Number of matrices the identity consumes on `K^n`.
    pub fn matrix_count(self, n: usize) -> usize {
        match self {
            Identity::Trsq | Identity::ClassicalCh => 1,
            Identity::Eq17 => 2,
            _ => n,
        }
    }
}

/// What the caller intends to do with the document.
#[derive(Clone, Copy, Debug)]
pub enum Purpose {
    Traces,
    Verify(Identity),
}

impl Purpose {
    fn shape(self, n: usize) -> usize {
        match self {
            Purpose::Traces => n,
            Purpose::Verify(id) => id.matrix_count(n),
        }
    }

    fn fixed_dim(self) -> Option<usize> {
        match self {
            Purpose::Traces => None,
            Purpose::Verify(id) => id.fixed_dim(),
        }
    }
}

/// A validated document with the mode and seed already resolved.
pub struct Loaded {
    pub doc: InputDocument,
    pub mode: Mode,
    pub seed: u64,
}

fn read_source(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::parse(format!("reading stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("reading {path}: {e}")))
    }
}

fn parse_mode(text: &str) -> Result<Mode, Failure> {
    match text {
        "rational" => Ok(Mode::Rational),
        "float" => Ok(Mode::Float),
        other => Err(Failure::parse(format!("unknown mode {other:?}"))),
    }
}

pub fn load(cli: &Cli, purpose: Purpose) -> Result<Loaded, Failure> {
    let (doc, generated) = match &cli.input {
        Some(path) => {
            let text = read_source(path)?;
            let doc: InputDocument =
                serde_json::from_str(&text).map_err(|e| Failure::parse(format!("invalid input document: {e}")))?;
            (doc, false)
        }
        None => (generate(cli, purpose)?, true),
    };
    let mode = match cli.mode {
        Some(m) => m,
        None => parse_mode(&doc.mode)?,
    };
    if !generated {
        if let Some(n) = cli.n.filter(|&n| n != doc.n) {
            return Err(Failure::dimension(format!("--n {n} disagrees with document n = {}", doc.n)));
        }
    }
    validate_shape(&doc, purpose)?;
    let seed = doc.seed.or(cli.seed).unwrap_or(DEFAULT_SEED);
    Ok(Loaded { doc, mode, seed })
}

fn validate_shape(doc: &InputDocument, purpose: Purpose) -> Result<(), Failure> {
    if doc.n == 0 || doc.n > hs_exterior::exterior::MAX_DIM {
        return Err(Failure::dimension(format!("n = {} is outside 1..=16", doc.n)));
    }
    if let Some(fixed) = purpose.fixed_dim() {
        if doc.n != fixed {
            return Err(Failure::dimension(format!("this identity needs n = {fixed}, got {}", doc.n)));
        }
    }
    let expected = purpose.shape(doc.n);
    if doc.matrices.len() != expected {
        return Err(Failure::dimension(format!(
            "expected {expected} matrices, got {}",
            doc.matrices.len()
        )));
    }
    Ok(())
}

/// A random rational document for `purpose`, seeded by `--seed`.
fn generate(cli: &Cli, purpose: Purpose) -> Result<InputDocument, Failure> {
    let n = match (purpose.fixed_dim(), cli.n) {
        (Some(fixed), Some(n)) if n != fixed => {
            return Err(Failure::dimension(format!("this identity needs n = {fixed}, got --n {n}")));
        }
        (Some(fixed), _) => fixed,
        (None, Some(n)) => n,
        (None, None) => DEFAULT_N,
    };
    if n == 0 || n > 8 {
        return Err(Failure::dimension(format!("generated inputs need 1 <= n <= 8, got {n}")));
    }
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let mut rng = trial_rng(seed, 0);
    let matrices: Vec<_> = (0..purpose.shape(n))
        .map(|_| random::matrix::<Rational>(&mut rng, n))
        .collect();
    let mut doc = InputDocument::from_matrices(n, &matrices, Some(seed));
    if let Some(m) = cli.mode {
        doc.mode = match m {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
        .to_string();
    }
    Ok(doc)
}
