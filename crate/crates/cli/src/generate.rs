//! `generate`: one replication of a built-in design as CSV.

use gfr_core::data::default_names;
use gfr_core::{make_example, sample_dataset, write_csv, Example, SimulationSpec};

use crate::args::GenerateArgs;
use crate::error::Result;

pub fn cmd_generate(args: &GenerateArgs) -> Result<Vec<u8>> {
    let spec = SimulationSpec {
        example: Example::from_number(args.example)?,
        n: args.n,
        p: args.p,
        r2: args.r2,
        seed: args.seed,
        replications: 1,
    };
    let model = make_example(&spec)?;
    let (x, y) = sample_dataset(&model, &spec, args.replication)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &default_names(spec.p), &x, Some((&args.response, &y)))?;
    Ok(buf)
}
