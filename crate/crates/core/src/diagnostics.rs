//! Restricted eigenvalues, restricted correlations and the sufficient
//! conditions of the screening guarantees, by exhaustive enumeration.
//!
//! Every quantity here is an exact max/min over supports, so the functions
//! refuse to run when the number of supports exceeds [`SUPPORT_BUDGET`].
//!
//! Monotonicity is used to shrink the enumeration: by eigenvalue interlacing
//! the extremes of `phi(s)`/`Phi(s)` are attained on supports of size exactly
//! `min(s, p)`, and the largest singular value of a cross-Gram block can only
//! grow when rows or columns are added.

use itertools::Itertools;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ActiveSetState, DesignMatrix, ResponseVector};

pub const SUPPORT_BUDGET: u128 = 1_000_000;

/// Restricted eigenvalues below this fraction of `Phi(1)` count as zero.
const ZERO_EIGENVALUE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictedSpectrum {
    pub s: usize,
    /// `phi(s)`
    pub phi: f64,
    /// `Phi(s)`
    #[serde(rename = "Phi")]
    pub phi_max: f64,
    pub n: usize,
    pub p: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictedCorrelation {
    pub s1: usize,
    pub s2: usize,
    pub theta: f64,
}

/// Outcome of a sufficient-condition check, read as `lhs >= rhs`
/// (strict for the step-count condition).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `None` when `rhs` is zero.
    pub ratio: Option<f64>,
}

impl ConditionCheck {
    fn new(lhs: f64, rhs: f64, strict: bool) -> Self {
        Self {
            holds: if strict { lhs > rhs } else { lhs >= rhs },
            lhs,
            rhs,
            ratio: (rhs != 0.0).then(|| lhs / rhs),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryCheck {
    pub condition: ConditionCheck,
    /// Restricted-isometry form, read as `J / (p0 (1+eta) (1+delta_1)) >= (...)^2 / (1-delta)^5`;
    /// absent when `delta_{p0 J} >= 1`.
    pub simplified: Option<ConditionCheck>,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn check_budget(supports: u128) -> Result<()> {
    if supports > SUPPORT_BUDGET {
        Err(Error::BudgetExceeded {
            supports,
            budget: SUPPORT_BUDGET,
        })
    } else {
        Ok(())
    }
}

/// `X^T X / n`.
pub fn normalized_gram(x: &DesignMatrix) -> DMatrix<f64> {
    let m = x.to_nalgebra();
    m.tr_mul(&m) / x.n() as f64
}

fn principal(gram: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |a, b| gram[(rows[a], cols[b])])
}

fn spectrum_from_gram(gram: &DMatrix<f64>, n: usize, s: usize) -> Result<RestrictedSpectrum> {
    let p = gram.nrows();
    if s == 0 {
        return Err(Error::InvalidParameter("sparsity s must be at least 1".into()));
    }
    let size = s.min(p);
    check_budget(binomial(p, size))?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    if size == 1 {
        for j in 0..p {
            lo = lo.min(gram[(j, j)]);
            hi = hi.max(gram[(j, j)]);
        }
    } else {
        for support in (0..p).combinations(size) {
            let eig = SymmetricEigen::new(principal(gram, &support, &support)).eigenvalues;
            lo = lo.min(eig.min());
            hi = hi.max(eig.max());
        }
    }
    Ok(RestrictedSpectrum {
        s,
        phi: lo.max(0.0),
        phi_max: hi,
        n,
        p,
    })
}

/// `phi(s)` and `Phi(s)`: extreme eigenvalues of `X_M^T X_M / n` over `|M| <= s`.
pub fn restricted_eigenvalues(x: &DesignMatrix, s: usize) -> Result<RestrictedSpectrum> {
    spectrum_from_gram(&normalized_gram(x), x.n(), s)
}

/// Size pairs `(a, b)` that can attain `theta_{s1,s2}`.
fn correlation_shapes(p: usize, s1: usize, s2: usize) -> Vec<(usize, usize)> {
    if s1 + s2 <= p {
        return vec![(s1, s2)];
    }
    (p.saturating_sub(s2)..=s1.min(p))
        .map(|a| (a, p - a))
        .filter(|&(a, b)| a >= 1 && b >= 1)
        .collect()
}

fn correlation_from_gram(gram: &DMatrix<f64>, s1: usize, s2: usize) -> Result<RestrictedCorrelation> {
    let p = gram.nrows();
    if s1 == 0 || s2 == 0 || p < 2 {
        return Ok(RestrictedCorrelation { s1, s2, theta: 0.0 });
    }
    let shapes = correlation_shapes(p, s1, s2);
    let supports: u128 = shapes
        .iter()
        .map(|&(a, b)| binomial(p, a).saturating_mul(binomial(p - a, b)))
        .fold(0u128, u128::saturating_add);
    check_budget(supports)?;
    let mut theta = 0.0f64;
    let mut rest = Vec::with_capacity(p);
    for &(a, b) in &shapes {
        for left in (0..p).combinations(a) {
            rest.clear();
            rest.extend((0..p).filter(|j| !left.contains(j)));
            for right in rest.iter().copied().combinations(b) {
                let block = principal(gram, &left, &right);
                let sigma = if a == 1 || b == 1 {
                    block.norm()
                } else {
                    block.singular_values().max()
                };
                theta = theta.max(sigma);
            }
        }
    }
    Ok(RestrictedCorrelation { s1, s2, theta })
}

/// `theta_{s1,s2}`: largest singular value of `X_{M1}^T X_{M2} / n` over
/// disjoint `M1`, `M2` with `|M1| <= s1`, `|M2| <= s2`.
pub fn restricted_correlation(x: &DesignMatrix, s1: usize, s2: usize) -> Result<RestrictedCorrelation> {
    correlation_from_gram(&normalized_gram(x), s1, s2)
}

/// `delta_s = max(Phi(s) - 1, 1 - phi(s))`.
pub fn restricted_isometry(x: &DesignMatrix, s: usize) -> Result<f64> {
    let spec = restricted_eigenvalues(x, s)?;
    Ok((spec.phi_max - 1.0).max(1.0 - spec.phi))
}

/// Step-count condition for covering the support within `p0 K0` steps:
/// `K0 > 2 ||y||^2 Phi(J) Phi(1) / (n phi(p0 K0 J)^3 J beta_min^2)`.
pub fn check_coverage_condition(
    x: &DesignMatrix,
    y: &ResponseVector,
    beta_min: f64,
    p0: usize,
    j: usize,
    k0: usize,
) -> Result<ConditionCheck> {
    if y.len() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            got: y.len(),
        });
    }
    if p0 == 0 || j == 0 || k0 == 0 {
        return Err(Error::InvalidParameter("p0, J and K0 must be positive".into()));
    }
    if !(beta_min.is_finite() && beta_min >= 0.0) {
        return Err(Error::InvalidParameter("beta_min must be finite and >= 0".into()));
    }
    let gram = normalized_gram(x);
    let n = x.n();
    let phi_big = spectrum_from_gram(&gram, n, p0 * k0 * j)?.phi;
    let phi_j = spectrum_from_gram(&gram, n, j)?.phi_max;
    let phi_1 = spectrum_from_gram(&gram, n, 1)?.phi_max;
    if phi_big <= ZERO_EIGENVALUE * phi_1 {
        return Err(Error::ConditionUndefined(format!(
            "phi({}) = 0",
            p0 * k0 * j
        )));
    }
    let denom = n as f64 * phi_big.powi(3) * j as f64 * beta_min * beta_min;
    let rhs = if denom > 0.0 {
        2.0 * y.norm_sq() * phi_j * phi_1 / denom
    } else {
        f64::INFINITY
    };
    Ok(ConditionCheck::new(k0 as f64, rhs, true))
}

/// Per-step recovery condition:
/// `phi(p0 J)^3 J / (Phi(1) p0) >= (1+eta) (theta_{J,p0} + theta_{J,(p0-1)J} theta_{(p0-1)J,p0} / phi(p0 J))^2`,
/// plus its restricted-isometry simplification.
pub fn check_recovery_condition(x: &DesignMatrix, p0: usize, j: usize, eta: f64) -> Result<RecoveryCheck> {
    if p0 == 0 || j == 0 {
        return Err(Error::InvalidParameter("p0 and J must be positive".into()));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter("eta must be positive".into()));
    }
    let gram = normalized_gram(x);
    let n = x.n();
    let s = p0 * j;
    let spec_s = spectrum_from_gram(&gram, n, s)?;
    let spec_1 = spectrum_from_gram(&gram, n, 1)?;
    if spec_s.phi <= ZERO_EIGENVALUE * spec_1.phi_max {
        return Err(Error::ConditionUndefined(format!("phi({s}) = 0")));
    }
    let theta_a = correlation_from_gram(&gram, j, p0)?.theta;
    let theta_b = correlation_from_gram(&gram, j, (p0 - 1) * j)?.theta;
    let theta_c = correlation_from_gram(&gram, (p0 - 1) * j, p0)?.theta;
    let lhs = spec_s.phi.powi(3) * j as f64 / (spec_1.phi_max * p0 as f64);
    let inner = theta_a + theta_b * theta_c / spec_s.phi;
    let rhs = (1.0 + eta) * inner * inner;
    let condition = ConditionCheck::new(lhs, rhs, false);

    let delta = |spec: &RestrictedSpectrum| (spec.phi_max - 1.0).max(1.0 - spec.phi);
    let delta_s = delta(&spec_s);
    let delta_pj = delta(&spectrum_from_gram(&gram, n, p0 + j)?);
    let delta_1 = delta(&spec_1);
    let simplified = (delta_s < 1.0).then(|| {
        let num = delta_pj * (1.0 + delta_s) + delta_s * delta_s;
        let lhs_sim = num * num / (1.0 - delta_s).powi(5);
        let rhs_sim = j as f64 / (p0 as f64 * (1.0 + eta) * (1.0 + delta_1));
        ConditionCheck::new(rhs_sim, lhs_sim, false)
    });
    Ok(RecoveryCheck {
        condition,
        simplified,
    })
}

/// Smallest eigenvalue of `X_{M1}^T Q_{M2} X_{M1}`, with `Q_{M2}` applied
/// through the projection engine.
pub fn projected_gram_min_eigenvalue(x: &DesignMatrix, m1: &[usize], m2: &[usize]) -> Result<f64> {
    if m1.is_empty() {
        return Err(Error::InvalidParameter("M1 must be non-empty".into()));
    }
    if let Some(&j) = m1.iter().find(|j| m2.contains(j)) {
        return Err(Error::AlreadySelected(j));
    }
    let zero = ResponseVector::new(vec![0.0; x.n()])?;
    let mut state = ActiveSetState::new(x, &zero)?;
    state.add_columns(m2)?;
    let k = m1.len();
    let gram = DMatrix::from_fn(k, k, |a, b| {
        crate::linalg::dot(state.resid_column(m1[a]), state.resid_column(m1[b]))
    });
    Ok(SymmetricEigen::new(gram).eigenvalues.min())
}
