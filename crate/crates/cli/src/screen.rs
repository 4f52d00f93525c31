//! `screen`: screening paths, BIC selection and split-sample prediction
//! error on user data.

use std::fmt::Write as _;
use std::fs::File;

use gfr_core::simgen::replication_rng;
use gfr_core::{
    bic_trace, gfr_path, isis_path, least_squares, read_csv, sis_path, BicTrace, Dataset, DesignMatrix, Error,
    GfrOptions, IsisOptions, Method, ResponseVector, ScreeningPath,
};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{Format, ScreenArgs, SelectArg};
use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Method settings shared by the full-data run and every split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenOptions {
    pub method: Method,
    pub j: usize,
    pub d: Option<usize>,
    pub isis_steps: Option<usize>,
    pub isis_per_step: Option<usize>,
    pub max_steps: Option<usize>,
    pub bic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitOptions {
    pub holdout: f64,
    pub splits: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenConfig {
    pub data: String,
    pub response: String,
    #[serde(flatten)]
    pub options: ScreenOptions,
    pub standardize: bool,
    pub split: Option<SplitOptions>,
    pub n: usize,
    pub p: usize,
    pub rows_dropped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathEntry {
    pub step: usize,
    pub chosen: Vec<String>,
    pub ssr: f64,
    pub gains: Vec<f64>,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BicSummary {
    pub values: Vec<f64>,
    pub k_hat: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmseSummary {
    pub mean: f64,
    /// Test-set mean squared prediction error of every split, in split order.
    pub splits: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ScreenConfig,
    pub path: Vec<PathEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bic: Option<BicSummary>,
    pub selected: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pmse: Option<PmseSummary>,
}

/// A screening run on one `(X, y)`: the path, its BIC trace when requested,
/// and the final model.
pub struct Screened {
    pub path: ScreeningPath,
    pub bic: Option<BicTrace>,
    pub selected: Vec<usize>,
}

pub fn run_method(x: &DesignMatrix, y: &ResponseVector, opts: &ScreenOptions) -> Result<Screened> {
    if y.norm_sq() == 0.0 {
        return Err(Error::DegenerateResponse.into());
    }
    let path = match opts.method {
        Method::Fr | Method::Gfr => {
            if opts.method == Method::Fr && opts.j != 1 {
                return Err(CliError::Usage("fr adds one column per step; use gfr for J > 1".into()));
            }
            let path = gfr_path(x, y, opts.j, GfrOptions { max_steps: opts.max_steps })?;
            if path.is_empty() {
                return Err(Error::AllDegenerate.into());
            }
            path
        }
        Method::Sis => sis_path(x, y, opts.d)?,
        Method::Isis => isis_path(
            x,
            y,
            IsisOptions {
                steps: opts.isis_steps,
                per_step: opts.isis_per_step,
            },
        )?,
    };
    let bic = opts.bic.then(|| bic_trace(&path, path.y_norm_sq)).transpose()?;
    let selected = match &bic {
        Some(b) => b.selected_model.clone(),
        None => path.selected(),
    };
    Ok(Screened { path, bic, selected })
}

/// Least-squares fit with intercept on `train`, mean squared error on `test`.
fn refit_pmse(
    x: &DesignMatrix,
    y: &ResponseVector,
    cols: &[usize],
    train: &[usize],
    test: &[usize],
) -> Result<f64> {
    let mut columns = vec![vec![1.0; train.len()]];
    columns.extend(cols.iter().map(|&c| train.iter().map(|&i| x.get(i, c)).collect()));
    let design = DesignMatrix::from_columns(&columns)?;
    let ytr: Vec<f64> = train.iter().map(|&i| y.as_slice()[i]).collect();
    let all: Vec<usize> = (0..columns.len()).collect();
    let coef = least_squares(&design, &all, &ytr)?;
    let sse: f64 = test
        .iter()
        .map(|&i| {
            let pred = coef[0] + cols.iter().zip(&coef[1..]).map(|(&c, b)| b * x.get(i, c)).sum::<f64>();
            (y.as_slice()[i] - pred).powi(2)
        })
        .sum();
    Ok(sse / test.len() as f64)
}

/// Random train/test splits: each split screens the training rows, refits
/// the selected model with an intercept and scores the held-out rows.
pub fn split_pmse(x: &DesignMatrix, y: &ResponseVector, opts: &ScreenOptions, split: &SplitOptions) -> Result<PmseSummary> {
    let n = x.n();
    if !(split.holdout > 0.0 && split.holdout < 1.0) {
        return Err(CliError::Usage(format!("--holdout must lie in (0, 1), got {}", split.holdout)));
    }
    if split.splits == 0 {
        return Err(CliError::Usage("--splits must be positive".into()));
    }
    let n_test = ((split.holdout * n as f64).round() as usize).max(1);
    if n_test + 2 > n {
        return Err(CliError::Usage(format!(
            "holdout {} leaves fewer than 2 training rows out of {n}",
            split.holdout
        )));
    }
    let errors = (0..split.splits as u64)
        .into_par_iter()
        .map(|s| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut replication_rng(split.seed, s));
            let (test, train) = perm.split_at_mut(n_test);
            test.sort_unstable();
            train.sort_unstable();
            let screened = run_method(&x.select_rows(train)?, &y.select_rows(train), opts)?;
            refit_pmse(x, y, &screened.selected, train, test)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(PmseSummary {
        mean: errors.iter().sum::<f64>() / errors.len() as f64,
        splits: errors,
    })
}

pub fn screen_dataset(
    dataset: &Dataset,
    data_label: &str,
    opts: &ScreenOptions,
    split: Option<&SplitOptions>,
) -> Result<RunReport> {
    let y = dataset
        .y
        .as_ref()
        .ok_or_else(|| CliError::Usage("dataset has no response column".into()))?;
    let x = &dataset.x;
    let screened = run_method(x, y, opts)?;
    let pmse = split.map(|s| split_pmse(x, y, opts, s)).transpose()?;
    let name = |j: &usize| dataset.names[*j].clone();
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        config: ScreenConfig {
            data: data_label.to_string(),
            response: dataset.response_name.clone().unwrap_or_default(),
            options: opts.clone(),
            standardize: dataset.standardized,
            split: split.cloned(),
            n: x.n(),
            p: x.p(),
            rows_dropped: dataset.rows_dropped,
        },
        path: screened
            .path
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| PathEntry {
                step: k + 1,
                chosen: s.chosen.iter().map(name).collect(),
                ssr: s.ssr_after,
                gains: s.gains.clone(),
                elapsed_s: s.elapsed,
            })
            .collect(),
        bic: screened.bic.map(|b| BicSummary {
            values: b.values,
            k_hat: b.k_hat,
        }),
        selected: screened.selected.iter().map(name).collect(),
        pmse,
    })
}

pub fn load_dataset(path: &std::path::Path, response: Option<&str>, standardize: bool) -> Result<Dataset> {
    let file = File::open(path).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })?;
    let mut dataset = read_csv(std::io::BufReader::new(file), response)?;
    if standardize {
        dataset.standardize()?;
    }
    Ok(dataset)
}

pub fn cmd_screen(args: &ScreenArgs) -> Result<RunReport> {
    let dataset = load_dataset(&args.data, Some(&args.response), args.standardize)?;
    let opts = ScreenOptions {
        method: args.method.into(),
        j: args.j,
        d: args.d,
        isis_steps: args.isis_steps,
        isis_per_step: args.isis_per_step,
        max_steps: args.max_steps,
        bic: args.select == SelectArg::Bic,
    };
    let split = args.holdout.map(|holdout| SplitOptions {
        holdout,
        splits: args.splits,
        seed: args.split_seed.unwrap_or(args.seed),
    });
    screen_dataset(&dataset, &args.data.display().to_string(), &opts, split.as_ref())
}

pub fn render(report: &RunReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Table => render_table(report),
        Format::Csv => render_csv(report)?,
    })
}

fn render_table(r: &RunReport) -> String {
    let mut s = String::new();
    let c = &r.config;
    let _ = writeln!(s, "{} on {} (n = {}, p = {}, J = {})", c.options.method, c.data, c.n, c.p, c.options.j);
    let _ = writeln!(s, "{:>5}  {:>14}  {:>10}  chosen (gain)", "step", "ssr", "elapsed_s");
    for e in &r.path {
        let chosen: Vec<String> = e.chosen.iter().zip(&e.gains).map(|(v, g)| format!("{v} ({g:.4})")).collect();
        let _ = writeln!(s, "{:>5}  {:>14.6}  {:>10.6}  {}", e.step, e.ssr, e.elapsed_s, chosen.join(", "));
    }
    if let Some(b) = &r.bic {
        let _ = writeln!(s, "BIC minimum at step {} ({:.4})", b.k_hat, b.values[b.k_hat]);
    }
    let _ = writeln!(s, "selected ({}): {}", r.selected.len(), r.selected.join(", "));
    if let Some(p) = &r.pmse {
        let _ = writeln!(s, "PMSE: {:.6} over {} splits", p.mean, p.splits.len());
    }
    s
}

fn render_csv(r: &RunReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "variable", "gain", "ssr", "elapsed_s"])
        .map_err(gfr_core::Error::from)?;
    for e in &r.path {
        for (v, g) in e.chosen.iter().zip(&e.gains) {
            w.write_record([e.step.to_string(), v.clone(), g.to_string(), e.ssr.to_string(), e.elapsed_s.to_string()])
                .map_err(gfr_core::Error::from)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
