//! Simulation designs with noise calibrated to a target R².
//!
//! * `Ex1`: independent 2x2 blocks with correlation -0.4,
//!   `beta = (2,3,2,3,2,3,2,3,0,...)`.
//! * `Ex2`: AR(1) correlation `0.5^|i-j|`, `beta_1 = 3, beta_4 = 1.5, beta_7 = 2`.
//! * `Ex3`: equicorrelated (0.6) predictors except `X_4`, which has
//!   correlation `sqrt(0.5)` with every predictor but `X_5`, and `X_5`, which is
//!   independent of everything; `y = 5X_1 + 5X_2 + 5X_3 - 15 sqrt(0.5) X_4 + X_5 + e`.
//!
//! Every design is sampled through a factor or Cholesky form, so no
//! covariance matrix is ever assembled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DesignMatrix, ResponseVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Example {
    Ex1,
    Ex2,
    Ex3,
}

impl Example {
    pub fn from_number(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Example::Ex1),
            2 => Ok(Example::Ex2),
            3 => Ok(Example::Ex3),
            _ => Err(Error::InvalidParameter(format!("unknown example {k}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Example::Ex1 => 1,
            Example::Ex2 => 2,
            Example::Ex3 => 3,
        }
    }

    /// Nonzero coefficients as `(index, value)`, zero-based.
    pub fn nonzero_coefficients(self) -> Vec<(usize, f64)> {
        match self {
            Example::Ex1 => (0..8).map(|j| (j, if j % 2 == 0 { 2.0 } else { 3.0 })).collect(),
            Example::Ex2 => vec![(0, 3.0), (3, 1.5), (6, 2.0)],
            Example::Ex3 => vec![
                (0, 5.0),
                (1, 5.0),
                (2, 5.0),
                (3, -15.0 * 0.5f64.sqrt()),
                (4, 1.0),
            ],
        }
    }

    /// Smallest admissible `p`.
    pub fn min_p(self) -> usize {
        match self {
            Example::Ex1 => 8,
            Example::Ex2 => 7,
            Example::Ex3 => 5,
        }
    }

    /// Population covariance `Sigma_ij` (zero-based indices).
    pub fn covariance(self, i: usize, j: usize) -> f64 {
        if i == j {
            return 1.0;
        }
        match self {
            Example::Ex1 => {
                if i / 2 == j / 2 {
                    EX1_RHO
                } else {
                    0.0
                }
            }
            Example::Ex2 => EX2_RHO.powi(i.abs_diff(j) as i32),
            Example::Ex3 => match (i.min(j), i.max(j)) {
                (_, 4) | (4, _) => 0.0,
                (3, _) | (_, 3) => (EX3_X4_LOAD_SQ * EX3_RHO).sqrt(),
                _ => EX3_RHO,
            },
        }
    }
}

impl std::fmt::Display for Example {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Example {}", self.number())
    }
}

const EX1_RHO: f64 = -0.4;
const EX2_RHO: f64 = 0.5;
const EX3_RHO: f64 = 0.6;
/// Squared loading of `X_4` on the common factor: `sqrt(5/6) * sqrt(0.6) = sqrt(0.5)`.
const EX3_X4_LOAD_SQ: f64 = 5.0 / 6.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub example: Example,
    pub n: usize,
    pub p: usize,
    pub r2: f64,
    pub seed: u64,
    pub replications: usize,
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r2 > 0.0 && self.r2 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "R^2 must lie in (0, 1), got {}",
                self.r2
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidParameter("n must be at least 2".into()));
        }
        if self.p < self.example.min_p() {
            return Err(Error::InvalidParameter(format!(
                "{} needs p >= {}, got {}",
                self.example,
                self.example.min_p(),
                self.p
            )));
        }
        if self.example == Example::Ex1 && self.p % 2 != 0 {
            return Err(Error::InvalidParameter(
                "Example 1 is built from 2x2 blocks and needs even p".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrueModel {
    pub example: Example,
    pub beta: Vec<f64>,
    pub support: Vec<usize>,
    pub sigma: f64,
    /// `Var(X^T beta) = beta^T Sigma beta`.
    pub sigma_xb_sq: f64,
}

impl TrueModel {
    pub fn p0(&self) -> usize {
        self.support.len()
    }
}

/// Coefficients, support and the noise level that puts the population R²
/// at `spec.r2`.
pub fn make_example(spec: &SimulationSpec) -> Result<TrueModel> {
    spec.validate()?;
    let ex = spec.example;
    let nonzero = ex.nonzero_coefficients();
    let mut beta = vec![0.0; spec.p];
    for &(j, b) in &nonzero {
        beta[j] = b;
    }
    let sigma_xb_sq: f64 = nonzero
        .iter()
        .flat_map(|&(i, bi)| nonzero.iter().map(move |&(j, bj)| bi * bj * ex.covariance(i, j)))
        .sum();
    let sigma = (sigma_xb_sq * (1.0 - spec.r2) / spec.r2).sqrt();
    Ok(TrueModel {
        example: ex,
        beta,
        support: nonzero.iter().map(|&(j, _)| j).collect(),
        sigma,
        sigma_xb_sq,
    })
}

/// Per-replication generator: ChaCha8 keyed by `seed`, one stream per
/// replication, so replications can be drawn in any order.
pub fn replication_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// Draws one `(X, y)` pair for a replication.
pub fn sample_dataset(
    model: &TrueModel,
    spec: &SimulationSpec,
    replication: u64,
) -> Result<(DesignMatrix, ResponseVector)> {
    spec.validate()?;
    if model.beta.len() != spec.p {
        return Err(Error::DimensionMismatch {
            expected: spec.p,
            got: model.beta.len(),
        });
    }
    let (n, p) = (spec.n, spec.p);
    let mut rng = replication_rng(spec.seed, replication);
    let mut values = vec![0.0; n * p];
    let mut y = vec![0.0; n];
    let mut row = vec![0.0; p];
    for i in 0..n {
        sample_row(spec.example, &mut rng, &mut row);
        let mut mean = 0.0;
        for &j in &model.support {
            mean += model.beta[j] * row[j];
        }
        let noise: f64 = rng.sample(StandardNormal);
        y[i] = mean + model.sigma * noise;
        for (j, &v) in row.iter().enumerate() {
            values[j * n + i] = v;
        }
    }
    Ok((
        DesignMatrix::from_column_major(n, p, values)?,
        ResponseVector::new(y)?,
    ))
}

fn sample_row(ex: Example, rng: &mut ChaCha8Rng, row: &mut [f64]) {
    let mut z = || -> f64 { rng.sample(StandardNormal) };
    match ex {
        Example::Ex1 => {
            let c = (1.0 - EX1_RHO * EX1_RHO).sqrt();
            for pair in row.chunks_exact_mut(2) {
                let (a, b) = (z(), z());
                pair[0] = a;
                pair[1] = EX1_RHO * a + c * b;
            }
        }
        Example::Ex2 => {
            let c = (1.0 - EX2_RHO * EX2_RHO).sqrt();
            let mut prev = z();
            row[0] = prev;
            for v in row.iter_mut().skip(1) {
                prev = EX2_RHO * prev + c * z();
                *v = prev;
            }
        }
        Example::Ex3 => {
            let w = z();
            let (a, b) = (EX3_RHO.sqrt(), (1.0 - EX3_RHO).sqrt());
            let (a4, b4) = (EX3_X4_LOAD_SQ.sqrt(), (1.0 - EX3_X4_LOAD_SQ).sqrt());
            for (j, v) in row.iter_mut().enumerate() {
                *v = match j {
                    3 => a4 * w + b4 * z(),
                    4 => z(),
                    _ => a * w + b * z(),
                };
            }
        }
    }
}
