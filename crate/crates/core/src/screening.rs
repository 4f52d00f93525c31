//! Solution paths for SIS, ISIS, forward regression and greedy forward
//! regression. Forward regression is greedy forward regression with `J = 1`.

use std::cmp::Ordering;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, ActiveSetState, DesignMatrix, ResponseVector};

/// Relative SSR level below which a path is considered saturated.
pub const SSR_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sis,
    Isis,
    Fr,
    Gfr,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sis => "SIS",
            Method::Isis => "ISIS",
            Method::Fr => "FR",
            Method::Gfr => "GFR",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sis" => Ok(Method::Sis),
            "isis" => Ok(Method::Isis),
            "fr" => Ok(Method::Fr),
            "gfr" => Ok(Method::Gfr),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Indices added in this step, by descending selection gain.
    pub chosen: Vec<usize>,
    pub ssr_after: f64,
    /// Selection scores of the chosen columns, measured against the model
    /// before the step (SSR reductions for FR/GFR, `|X_j^T r|` for SIS/ISIS).
    pub gains: Vec<f64>,
    /// SSR reductions realized while the chosen columns were added in order.
    pub realized_gains: Vec<f64>,
    /// Wall time of the step in seconds.
    pub elapsed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningPath {
    pub method: Method,
    /// Variables per step (per-step size for SIS/ISIS).
    pub j: usize,
    pub n: usize,
    pub p: usize,
    pub y_norm_sq: f64,
    pub steps: Vec<StepRecord>,
}

impl ScreeningPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `M^(k)`, the union of the first `k` steps in selection order.
    pub fn model_at(&self, k: usize) -> Vec<usize> {
        self.steps[..k]
            .iter()
            .flat_map(|s| s.chosen.iter().copied())
            .collect()
    }

    /// The final model of the path.
    pub fn selected(&self) -> Vec<usize> {
        self.model_at(self.steps.len())
    }

    /// `|M^(k)|` for `k = 0..=K`.
    pub fn model_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::with_capacity(self.steps.len() + 1);
        sizes.push(0);
        let mut acc = 0;
        for s in &self.steps {
            acc += s.chosen.len();
            sizes.push(acc);
        }
        sizes
    }

    /// `||Q_{M^(k)} y||^2` for `k = 0..=K`.
    pub fn ssr_trace(&self) -> Vec<f64> {
        std::iter::once(self.y_norm_sq)
            .chain(self.steps.iter().map(|s| s.ssr_after))
            .collect()
    }

    /// Cumulative wall time after each step (`k = 0..=K`).
    pub fn cumulative_elapsed(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(0.0);
        let mut acc = 0.0;
        for s in &self.steps {
            acc += s.elapsed;
            out.push(acc);
        }
        out
    }

    /// Smallest `k` with `support ⊆ M^(k)`.
    pub fn first_covering_step(&self, support: &[usize]) -> Option<usize> {
        let mut missing: Vec<usize> = support.to_vec();
        if missing.is_empty() {
            return Some(0);
        }
        for (k, s) in self.steps.iter().enumerate() {
            missing.retain(|t| !s.chosen.contains(t));
            if missing.is_empty() {
                return Some(k + 1);
            }
        }
        None
    }
}

/// Options for [`gfr_path`].
#[derive(Clone, Copy, Debug, Default)]
pub struct GfrOptions {
    /// Upper bound on the number of steps; `None` means `floor(n / J)`.
    pub max_steps: Option<usize>,
}

/// Descending score, ascending index.
#[inline]
fn rank_order(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// Keeps the `k` best `(score, index)` pairs in rank order.
fn top_k(mut scored: Vec<(f64, usize)>, k: usize) -> Vec<(f64, usize)> {
    if k == 0 {
        return Vec::new();
    }
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, rank_order);
        scored.truncate(k);
    }
    scored.sort_unstable_by(rank_order);
    scored
}

/// Greedy forward regression.
///
/// Each step ranks every non-selected, non-degenerate candidate by its SSR
/// reduction against the current model and adds the `J` best together.
/// The path ends once `|M| >= n - J + 1`, after `max_steps` steps, when the
/// SSR drops below `SSR_FLOOR * ||y||^2`, or when no usable candidate is left.
pub fn gfr_path(
    x: &DesignMatrix,
    y: &ResponseVector,
    j: usize,
    opts: GfrOptions,
) -> Result<ScreeningPath> {
    let n = x.n();
    if j == 0 || j > n {
        return Err(Error::InvalidStepSize { j, n });
    }
    let mut state = ActiveSetState::new(x, y)?;
    let max_steps = opts.max_steps.unwrap_or(n / j);
    let y_norm_sq = state.y_norm_sq();
    let mut steps = Vec::new();

    while steps.len() < max_steps
        && state.selected().len() < n + 1 - j
        && state.sum_squared_residuals() > SSR_FLOOR * y_norm_sq
    {
        let start = Instant::now();
        let scored: Vec<(f64, usize)> = (0..x.p())
            .filter(|&c| !state.is_selected(c))
            .map(|c| state.gain_unchecked(c))
            .filter(|g| !g.degenerate)
            .map(|g| (g.gain, g.index))
            .collect();
        if scored.is_empty() {
            break;
        }
        let best = top_k(scored, j);
        let chosen: Vec<usize> = best.iter().map(|&(_, c)| c).collect();
        let added = state.add_columns(&chosen)?;
        steps.push(StepRecord {
            chosen,
            ssr_after: state.sum_squared_residuals(),
            gains: best.iter().map(|&(g, _)| g).collect(),
            realized_gains: added.iter().map(|a| a.realized_gain).collect(),
            elapsed: start.elapsed().as_secs_f64(),
        });
    }

    Ok(ScreeningPath {
        method: if j == 1 { Method::Fr } else { Method::Gfr },
        j,
        n,
        p: x.p(),
        y_norm_sq,
        steps,
    })
}

/// Forward regression: [`gfr_path`] with `J = 1`.
pub fn fr_path(x: &DesignMatrix, y: &ResponseVector, opts: GfrOptions) -> Result<ScreeningPath> {
    gfr_path(x, y, 1, opts)
}

/// Marginal scores `|X_j^T y|`.
pub fn marginal_scores(x: &DesignMatrix, y: &ResponseVector) -> Result<Vec<f64>> {
    if y.len() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            got: y.len(),
        });
    }
    Ok(x.columns().map(|c| dot(c, y.as_slice()).abs()).collect())
}

/// All column indices ordered by `|X_j^T y|`, largest first.
pub fn sis_rank(x: &DesignMatrix, y: &ResponseVector) -> Result<Vec<usize>> {
    let mut scored: Vec<(f64, usize)> = marginal_scores(x, y)?
        .into_iter()
        .enumerate()
        .map(|(j, s)| (s, j))
        .collect();
    scored.sort_unstable_by(rank_order);
    Ok(scored.into_iter().map(|(_, j)| j).collect())
}

/// `floor(n / ln n)`.
pub fn default_sis_size(n: usize) -> usize {
    let n = n as f64;
    (n / n.ln()).floor().max(1.0) as usize
}

/// `floor(ln n - 1)`, at least one step.
pub fn default_isis_steps(n: usize) -> usize {
    ((n as f64).ln() - 1.0).floor().max(1.0) as usize
}

/// Top `d` columns of [`sis_rank`]; `d` defaults to `floor(n / ln n)`.
pub fn sis_select(x: &DesignMatrix, y: &ResponseVector, d: Option<usize>) -> Result<Vec<usize>> {
    let d = d.unwrap_or_else(|| default_sis_size(x.n()));
    if d == 0 || d > x.p() {
        return Err(Error::InvalidParameter(format!(
            "SIS size d = {d} must lie in 1..={}",
            x.p()
        )));
    }
    let mut rank = sis_rank(x, y)?;
    rank.truncate(d);
    Ok(rank)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IsisOptions {
    pub steps: Option<usize>,
    pub per_step: Option<usize>,
}

/// Iterated SIS: after each stage the selected set is refit by least
/// squares and the next stage ranks unselected columns by `|X_j^T r|` on the
/// refit residual `r = Q_M y`.
pub fn isis_path(x: &DesignMatrix, y: &ResponseVector, opts: IsisOptions) -> Result<ScreeningPath> {
    let n = x.n();
    let stages = opts.steps.unwrap_or_else(|| default_isis_steps(n));
    let per_step = opts.per_step.unwrap_or_else(|| default_sis_size(n));
    if stages == 0 || per_step == 0 {
        return Err(Error::InvalidParameter(
            "ISIS needs at least one step of at least one variable".into(),
        ));
    }
    let total = stages * per_step;
    if total > x.p() {
        return Err(Error::InvalidParameter(format!(
            "ISIS selects {total} variables but p = {}",
            x.p()
        )));
    }
    if total > n {
        return Err(Error::ModelTooLarge { size: total, n });
    }
    let mut state = ActiveSetState::new(x, y)?;
    let y_norm_sq = state.y_norm_sq();
    let mut steps = Vec::with_capacity(stages);
    for _ in 0..stages {
        let start = Instant::now();
        let scored: Vec<(f64, usize)> = (0..x.p())
            .filter(|&c| !state.is_selected(c))
            .map(|c| (state.resid_dot(c).abs(), c))
            .collect();
        let best = top_k(scored, per_step);
        let chosen: Vec<usize> = best.iter().map(|&(_, c)| c).collect();
        let added = state.add_columns(&chosen)?;
        steps.push(StepRecord {
            chosen,
            ssr_after: state.sum_squared_residuals(),
            gains: best.iter().map(|&(s, _)| s).collect(),
            realized_gains: added.iter().map(|a| a.realized_gain).collect(),
            elapsed: start.elapsed().as_secs_f64(),
        });
    }
    Ok(ScreeningPath {
        method: if stages == 1 { Method::Sis } else { Method::Isis },
        j: per_step,
        n,
        p: x.p(),
        y_norm_sq,
        steps,
    })
}

/// SIS as a one-step path, so its model can be refit and scored like the
/// others.
pub fn sis_path(x: &DesignMatrix, y: &ResponseVector, d: Option<usize>) -> Result<ScreeningPath> {
    let d = d.unwrap_or_else(|| default_sis_size(x.n()));
    if d == 0 || d > x.p() {
        return Err(Error::InvalidParameter(format!(
            "SIS size d = {d} must lie in 1..={}",
            x.p()
        )));
    }
    isis_path(
        x,
        y,
        IsisOptions {
            steps: Some(1),
            per_step: Some(d),
        },
    )
}
