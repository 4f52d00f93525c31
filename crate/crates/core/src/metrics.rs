//! Monte Carlo scenario runners and their table metrics.
//!
//! * Scenario I runs exactly `p0` steps and reports coverage.
//! * Scenario II runs the whole path and records when the true support is
//!   first covered.
//! * Scenario III picks the model by BIC (FR/GFR) or by the fixed SIS/ISIS
//!   schedules.
//!
//! Replications run in parallel on the ambient rayon pool; every non-timing
//! field depends only on `(seed, replications)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DesignMatrix, ResponseVector};
use crate::screening::{gfr_path, isis_path, sis_path, GfrOptions, IsisOptions, Method};
use crate::select::bic_trace;
use crate::simgen::{make_example, sample_dataset, Example, SimulationSpec, TrueModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Scenario::I),
            "ii" | "2" => Ok(Scenario::II),
            "iii" | "3" => Ok(Scenario::III),
            other => Err(Error::InvalidParameter(format!("unknown scenario `{other}`"))),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::I => "i",
            Scenario::II => "ii",
            Scenario::III => "iii",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub replication: u64,
    pub selected: Vec<usize>,
    /// Smallest `k` with `T ⊆ M^(k)`, if the run ever covers `T`.
    pub steps_to_full_coverage: Option<usize>,
    pub covered: bool,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub model_size: usize,
    /// Steps actually taken by the screening run.
    pub steps_run: usize,
    /// `|M^(k*)|` at first coverage.
    pub size_at_coverage: Option<usize>,
    pub time_total: f64,
    /// Time until coverage, or until the run stopped without it.
    pub time_to_coverage: f64,
    pub time_to_bic: f64,
}

impl ReplicationOutcome {
    fn new(replication: u64, selected: Vec<usize>, support: &[usize]) -> Self {
        let fp = selected.iter().filter(|j| !support.contains(j)).count();
        let fn_ = support.iter().filter(|t| !selected.contains(t)).count();
        Self {
            replication,
            model_size: selected.len(),
            covered: fn_ == 0,
            selected,
            steps_to_full_coverage: None,
            fp,
            fn_,
            steps_run: 0,
            size_at_coverage: None,
            time_total: 0.0,
            time_to_coverage: 0.0,
            time_to_bic: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub example: u8,
    pub scenario: Scenario,
    pub method: Method,
    pub j: usize,
    pub n: usize,
    pub p: usize,
    pub r2: f64,
    pub replications: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub config: ReportConfig,
    pub p0: usize,
    pub cp: f64,
    pub afp: f64,
    pub afn: f64,
    /// Mean size of the reported model over all replications.
    pub ams: f64,
    /// Scenario II: mean steps to coverage over covering replications.
    pub iter: Option<f64>,
    /// Scenario II: mean `|M^(k*)|` over covering replications.
    pub ams_at_coverage: Option<f64>,
    pub time_total: f64,
    pub time_to_coverage: Option<f64>,
    pub time_to_bic: Option<f64>,
    pub outcomes: Vec<ReplicationOutcome>,
}

fn effective_j(method: Method, j: usize) -> usize {
    if method == Method::Fr {
        1
    } else {
        j
    }
}

fn replicate(
    scenario: Scenario,
    method: Method,
    j: usize,
    model: &TrueModel,
    x: &DesignMatrix,
    y: &ResponseVector,
    replication: u64,
) -> Result<ReplicationOutcome> {
    let support = &model.support;
    match (scenario, method) {
        (Scenario::I | Scenario::II, Method::Sis | Method::Isis) => Err(Error::InvalidParameter(
            format!("scenario {scenario} runs FR/GFR only"),
        )),
        (Scenario::I, _) => {
            let path = gfr_path(x, y, j, GfrOptions { max_steps: Some(model.p0()) })?;
            let mut out = ReplicationOutcome::new(replication, path.selected(), support);
            out.steps_run = path.len();
            out.steps_to_full_coverage = path.first_covering_step(support);
            out.time_total = *path.cumulative_elapsed().last().unwrap_or(&0.0);
            out.time_to_coverage = out.time_total;
            Ok(out)
        }
        (Scenario::II, _) => {
            let path = gfr_path(x, y, j, GfrOptions::default())?;
            let elapsed = path.cumulative_elapsed();
            let total = *elapsed.last().unwrap_or(&0.0);
            let k_star = path.first_covering_step(support);
            let selected = match k_star {
                Some(k) => path.model_at(k),
                None => path.selected(),
            };
            let mut out = ReplicationOutcome::new(replication, selected, support);
            out.steps_run = path.len();
            out.steps_to_full_coverage = k_star;
            out.size_at_coverage = k_star.map(|k| path.model_sizes()[k]);
            out.time_total = total;
            out.time_to_coverage = k_star.map_or(total, |k| elapsed[k]);
            Ok(out)
        }
        (Scenario::III, Method::Fr | Method::Gfr) => {
            let path = gfr_path(x, y, j, GfrOptions::default())?;
            let bic = bic_trace(&path, path.y_norm_sq)?;
            let elapsed = path.cumulative_elapsed();
            let mut out = ReplicationOutcome::new(replication, bic.selected_model, support);
            out.steps_run = path.len();
            out.steps_to_full_coverage = path.first_covering_step(support);
            out.time_total = *elapsed.last().unwrap_or(&0.0);
            out.time_to_bic = elapsed[bic.k_hat];
            Ok(out)
        }
        (Scenario::III, Method::Sis) => {
            let path = sis_path(x, y, None)?;
            let mut out = ReplicationOutcome::new(replication, path.selected(), support);
            out.steps_run = path.len();
            out.time_total = *path.cumulative_elapsed().last().unwrap_or(&0.0);
            out.time_to_bic = out.time_total;
            Ok(out)
        }
        (Scenario::III, Method::Isis) => {
            let path = isis_path(x, y, IsisOptions::default())?;
            let mut out = ReplicationOutcome::new(replication, path.selected(), support);
            out.steps_run = path.len();
            out.steps_to_full_coverage = path.first_covering_step(support);
            out.time_total = *path.cumulative_elapsed().last().unwrap_or(&0.0);
            out.time_to_bic = out.time_total;
            Ok(out)
        }
    }
}

/// Runs `spec.replications` replications of a scenario and aggregates them.
pub fn run_scenario(
    spec: &SimulationSpec,
    scenario: Scenario,
    method: Method,
    j: usize,
) -> Result<MetricsReport> {
    let model = make_example(spec)?;
    let j = effective_j(method, j);
    if j == 0 || j > spec.n {
        return Err(Error::InvalidStepSize { j, n: spec.n });
    }
    let outcomes = (0..spec.replications as u64)
        .into_par_iter()
        .map(|rep| {
            let (x, y) = sample_dataset(&model, spec, rep)?;
            replicate(scenario, method, j, &model, &x, &y, rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(spec, scenario, method, j, model.p0(), outcomes))
}

pub fn run_scenario_i(spec: &SimulationSpec, method: Method, j: usize) -> Result<MetricsReport> {
    run_scenario(spec, Scenario::I, method, j)
}

pub fn run_scenario_ii(spec: &SimulationSpec, method: Method, j: usize) -> Result<MetricsReport> {
    run_scenario(spec, Scenario::II, method, j)
}

pub fn run_scenario_iii(spec: &SimulationSpec, method: Method, j: usize) -> Result<MetricsReport> {
    run_scenario(spec, Scenario::III, method, j)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Folds per-replication outcomes (in replication order) into a report.
pub fn aggregate(
    spec: &SimulationSpec,
    scenario: Scenario,
    method: Method,
    j: usize,
    p0: usize,
    outcomes: Vec<ReplicationOutcome>,
) -> MetricsReport {
    let reps = outcomes.len().max(1) as f64;
    let covered = outcomes.iter().filter(|o| o.covered).count() as f64;
    let sum = |f: fn(&ReplicationOutcome) -> usize| outcomes.iter().map(f).sum::<usize>() as f64;
    let (iter, ams_at_coverage, time_to_coverage, time_to_bic) = match scenario {
        Scenario::I => (None, None, None, None),
        Scenario::II => (
            mean(outcomes.iter().filter_map(|o| o.steps_to_full_coverage.map(|k| k as f64))),
            mean(outcomes.iter().filter_map(|o| o.size_at_coverage.map(|s| s as f64))),
            mean(outcomes.iter().map(|o| o.time_to_coverage)),
            None,
        ),
        Scenario::III => (None, None, None, mean(outcomes.iter().map(|o| o.time_to_bic))),
    };
    MetricsReport {
        config: ReportConfig {
            example: spec.example.number(),
            scenario,
            method,
            j,
            n: spec.n,
            p: spec.p,
            r2: spec.r2,
            replications: spec.replications,
            seed: spec.seed,
        },
        p0,
        cp: covered / reps,
        afp: sum(|o| o.fp) / reps,
        afn: sum(|o| o.fn_) / reps,
        ams: sum(|o| o.model_size) / reps,
        iter,
        ams_at_coverage,
        time_total: mean(outcomes.iter().map(|o| o.time_total)).unwrap_or(0.0),
        time_to_coverage,
        time_to_bic,
        outcomes,
    }
}

impl MetricsReport {
    /// Row label in the tables, e.g. `FR` or `GFR(J=2)`.
    pub fn method_label(&self) -> String {
        match self.config.method {
            Method::Gfr if self.config.j > 1 => format!("GFR(J={})", self.config.j),
            Method::Gfr | Method::Fr => "FR".to_string(),
            m => m.name().to_string(),
        }
    }

    /// Binomial standard error of `cp`.
    pub fn cp_standard_error(&self) -> f64 {
        let r = self.config.replications.max(1) as f64;
        (self.cp * (1.0 - self.cp) / r).sqrt()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

/// Aligned text table; one row per report, columns by scenario.
pub fn render_table(reports: &[MetricsReport]) -> String {
    let Some(first) = reports.first() else {
        return String::new();
    };
    let header: &[&str] = match first.config.scenario {
        Scenario::I => &["Method", "p", "R2", "CP", "Time (s)"],
        Scenario::II => &["Method", "p", "R2", "CP", "AMS", "iter", "Time1 (s)", "Time2 (s)"],
        Scenario::III => &["Method", "p", "R2", "CP", "AFP", "AFN", "AMS", "Time3 (s)"],
    };
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let mut row = vec![
                r.method_label(),
                r.config.p.to_string(),
                format!("{:.0}%", r.config.r2 * 100.0),
                format!("{:.4}", r.cp),
            ];
            match r.config.scenario {
                Scenario::I => row.push(format!("{:.4}", r.time_total)),
                Scenario::II => {
                    row.push(fmt_opt(r.ams_at_coverage));
                    row.push(fmt_opt(r.iter));
                    row.push(format!("{:.4}", r.time_total));
                    row.push(fmt_opt(r.time_to_coverage));
                }
                Scenario::III => {
                    row.push(format!("{:.4}", r.afp));
                    row.push(format!("{:.4}", r.afn));
                    row.push(format!("{:.4}", r.ams));
                    row.push(fmt_opt(r.time_to_bic));
                }
            }
            row
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain(std::iter::once(header[c].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let line = |cells: &[String], out: &mut String| {
        let mut s = String::new();
        for (c, cell) in cells.iter().enumerate() {
            if c > 0 {
                s.push_str("  ");
            }
            let _ = write!(s, "{cell:>w$}", w = widths[c]);
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>(), &mut out);
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in &rows {
        line(row, &mut out);
    }
    let _ = writeln!(
        out,
        "{} scenario {}, n = {}, {} replications, seed {}",
        Example::from_number(first.config.example).map_or_else(|_| "?".into(), |e| e.to_string()),
        first.config.scenario,
        first.config.n,
        first.config.replications,
        first.config.seed
    );
    out
}
