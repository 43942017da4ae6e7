//! Problem files: a polynomial plus, optionally, its known roots.

use std::path::Path;

use serde::{Deserialize, Serialize};
use simroots::{driver, Complex64, Polynomial};

use crate::error::CliError;

/// On-disk problem description.
///
/// ```json
/// {
///   "label": "z^2 - 1",
///   "coefficients": [[-1, 0], [0, 0], [1, 0]],
///   "known_roots": [[1, 0], [-1, 0]]
/// }
/// ```
///
/// Coefficients are ascending powers, each an `[re, im]` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub coefficients: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_roots: Option<Vec<[f64; 2]>>,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub label: Option<String>,
    pub polynomial: Polynomial,
    pub known_roots: Option<Vec<Complex64>>,
}

pub fn to_complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect()
}

pub fn to_pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|c| [c.re, c.im]).collect()
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::InvalidProblem {
            path: path.to_owned(),
            message: e.to_string(),
        })
    }

    /// Checks the file invariants and builds the monic polynomial.
    pub fn validate(&self) -> Result<Problem, String> {
        if self.coefficients.len() < 2 {
            return Err("need at least two coefficients (degree >= 1)".into());
        }
        if self.coefficients.last() == Some(&[0.0, 0.0]) {
            return Err("leading coefficient is zero".into());
        }
        let finite = |pairs: &[[f64; 2]]| pairs.iter().flatten().all(|v| v.is_finite());
        if !finite(&self.coefficients) {
            return Err("coefficients must be finite".into());
        }
        let polynomial = Polynomial::from_coefficients(&to_complex(&self.coefficients))
            .map_err(|e| e.to_string())?;
        let known_roots = match &self.known_roots {
            None => None,
            Some(roots) => {
                if roots.len() != polynomial.degree() {
                    return Err(format!(
                        "known_roots has {} entries, degree is {}",
                        roots.len(),
                        polynomial.degree()
                    ));
                }
                if !finite(roots) {
                    return Err("known_roots must be finite".into());
                }
                let roots = to_complex(roots);
                driver::check_distinct(&roots).map_err(|e| format!("known_roots: {e}"))?;
                Some(roots)
            }
        };
        Ok(Problem {
            label: self.label.clone(),
            polynomial,
            known_roots,
        })
    }
}

pub fn load_problem(path: &Path) -> Result<Problem, CliError> {
    ProblemFile::load(path)?
        .validate()
        .map_err(|message| CliError::InvalidProblem {
            path: path.to_owned(),
            message,
        })
}
