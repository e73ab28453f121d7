use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob_space::validate_distribution;
use crate::singlet::OutcomeProbs;

/// Discretized local hidden-variable model on `Λ = [0, 1]`.
///
/// `p_response[i][k] = P[X = +1 | A = a_i, λ_k]` and
/// `q_response[j][k] = P[Y = −1 | B = b_j, λ_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvModel {
    /// Cell midpoints `(k + ½)/L`.
    pub lambda_grid: Vec<f64>,
    pub rho: Vec<f64>,
    pub p_response: [Vec<f64>; 2],
    pub q_response: [Vec<f64>; 2],
}

impl LhvModel {
    pub fn new(rho: Vec<f64>, p_response: [Vec<f64>; 2], q_response: [Vec<f64>; 2]) -> Result<Self> {
        let l = rho.len();
        if l == 0 {
            return Err(Error::InvalidArgument("hidden-variable grid is empty".into()));
        }
        validate_distribution(&rho)?;
        for table in p_response.iter().chain(q_response.iter()) {
            if table.len() != l {
                return Err(Error::LengthMismatch {
                    outcomes: l,
                    weights: table.len(),
                });
            }
            for (index, &v) in table.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidProbability { index, value: v });
                }
            }
        }
        Ok(Self {
            lambda_grid: midpoints(l),
            rho,
            p_response,
            q_response,
        })
    }

    /// Uniform `ρ` with all responses equal to `½`.
    pub fn neutral(l: usize) -> Self {
        Self {
            lambda_grid: midpoints(l),
            rho: vec![1.0 / l as f64; l],
            p_response: [vec![0.5; l], vec![0.5; l]],
            q_response: [vec![0.5; l], vec![0.5; l]],
        }
    }

    pub fn grid_size(&self) -> usize {
        self.rho.len()
    }

    /// Splits every cell in two halves that share the parent's responses. The
    /// predicted probabilities are unchanged.
    pub fn refined(&self) -> Self {
        let split = |v: &Vec<f64>| v.iter().flat_map(|&x| [x, x]).collect::<Vec<_>>();
        Self {
            lambda_grid: midpoints(2 * self.grid_size()),
            rho: self.rho.iter().flat_map(|&w| [w / 2.0, w / 2.0]).collect(),
            p_response: [split(&self.p_response[0]), split(&self.p_response[1])],
            q_response: [split(&self.q_response[0]), split(&self.q_response[1])],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Parses and validates a model. The stored grid is recomputed from `rho`.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: LhvModel = serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Self::new(raw.rho, raw.p_response, raw.q_response)
    }
}

fn midpoints(l: usize) -> Vec<f64> {
    (0..l).map(|k| (k as f64 + 0.5) / l as f64).collect()
}

/// `p(x, y | a_i, b_j) = Σ_λ ρ(λ)·P[x | a_i, λ]·P[y | b_j, λ]`, with
/// `(1,1) → p(1−q)`, `(−1,1) → (1−p)(1−q)`, `(1,−1) → pq`, `(−1,−1) → (1−p)q`.
pub fn lhv_predicted_probs(model: &LhvModel, i: usize, j: usize) -> OutcomeProbs {
    predict(&model.rho, &model.p_response[i], &model.q_response[j])
}

pub(crate) fn predict(rho: &[f64], p: &[f64], q: &[f64]) -> OutcomeProbs {
    let mut out = [0.0; 4];
    for ((&w, &p), &q) in rho.iter().zip(p).zip(q) {
        let (wp, wn) = (w * p, w * (1.0 - p));
        out[0] += wp * (1.0 - q);
        out[1] += wn * (1.0 - q);
        out[2] += wp * q;
        out[3] += wn * q;
    }
    OutcomeProbs(out)
}
