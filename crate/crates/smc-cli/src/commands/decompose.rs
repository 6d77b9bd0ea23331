use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use smc_core::decompose::{bvn_decompose, complete_with_dummies};
use smc_core::format::write_bvn;

use super::{read_instance, read_matching, write_file};

#[derive(Args)]
pub struct DecomposeArgs {
    /// Instance file (smc v1 format), used for dummy padding.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub matching: PathBuf,
    /// Output path for the bvn v1 support; defaults to stdout only.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: DecomposeArgs) -> Result<u8> {
    let inst = read_instance(&args.input)?;
    let mu = read_matching(&args.matching)?;
    let (padded_inst, padded_mu) = complete_with_dummies(&inst, &mu)?;
    let support = bvn_decompose(&padded_mu)?;
    let text = write_bvn(&support);
    if let Some(path) = &args.out {
        write_file(path, &text)?;
    }
    print!("{text}");
    println!("terms={}", support.len());
    if padded_inst.n() != inst.n() {
        println!("padded_n={}", padded_inst.n());
    }
    Ok(0)
}
