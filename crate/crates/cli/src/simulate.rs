//! `simulate`: Monte Carlo scenarios on the built-in designs.

use std::fmt::Write as _;

use gfr_core::{render_table, run_scenario, Example, Method, MetricsReport, SimulationSpec};

use crate::args::{Format, SimulateArgs};
use crate::error::{CliError, Result};

pub fn cmd_simulate(args: &SimulateArgs) -> Result<MetricsReport> {
    let method: Method = args.method.into();
    if method == Method::Fr && args.j != 1 {
        return Err(CliError::Usage("fr adds one column per step; use gfr for J > 1".into()));
    }
    if args.reps == 0 {
        return Err(CliError::Usage("--reps must be positive".into()));
    }
    let spec = SimulationSpec {
        example: Example::from_number(args.example)?,
        n: args.n,
        p: args.p,
        r2: args.r2,
        seed: args.seed,
        replications: args.reps,
    };
    Ok(run_scenario(&spec, args.scenario.into(), method, args.j)?)
}

pub fn render(report: &MetricsReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Table => render_table(std::slice::from_ref(report)),
        Format::Csv => {
            let mut s = String::from(
                "replication,covered,fp,fn,model_size,steps_run,steps_to_full_coverage,time_total,time_to_coverage,time_to_bic\n",
            );
            for o in &report.outcomes {
                let cover = o.steps_to_full_coverage.map(|k| k.to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{}",
                    o.replication,
                    o.covered,
                    o.fp,
                    o.fn_,
                    o.model_size,
                    o.steps_run,
                    cover,
                    o.time_total,
                    o.time_to_coverage,
                    o.time_to_bic
                );
            }
            s
        }
    })
}
