//! BIC-type criterion along a screening path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::screening::{ScreeningPath, SSR_FLOOR};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BicTrace {
    /// `BIC(k)` for `k = 0..=K`.
    pub values: Vec<f64>,
    /// Global minimizer, smallest `k` on ties.
    pub k_hat: usize,
    pub selected_model: Vec<usize>,
}

/// `BIC(k) = n ln(max(SSR_k, eps)) + |M^(k)| ln n` with `eps = 1e-12 ||y||^2`.
///
/// The penalty uses the actual model size `|M^(k)|`, which equals `kJ`
/// except after a final partial step (and for SIS/ISIS paths).
pub fn bic_trace(path: &ScreeningPath, y_norm_sq: f64) -> Result<BicTrace> {
    if !(y_norm_sq > 0.0) {
        return Err(Error::DegenerateResponse);
    }
    if path.n < 2 {
        return Err(Error::InvalidParameter("BIC needs n >= 2".into()));
    }
    let n = path.n as f64;
    let ln_n = n.ln();
    let floor = SSR_FLOOR * y_norm_sq;
    let sizes = path.model_sizes();
    let values: Vec<f64> = std::iter::once(y_norm_sq)
        .chain(path.steps.iter().map(|s| s.ssr_after))
        .zip(&sizes)
        .map(|(ssr, &size)| n * ssr.max(floor).ln() + size as f64 * ln_n)
        .collect();
    let k_hat = values
        .iter()
        .enumerate()
        .fold(0, |best, (k, v)| if *v < values[best] { k } else { best });
    Ok(BicTrace {
        selected_model: path.model_at(k_hat),
        values,
        k_hat,
    })
}
