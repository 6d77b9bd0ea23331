use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};

use smc_core::format::write_instance;
use smc_core::reduction::{
    compile_app_c, compile_thm6, parse_dimacs_2p2n, suggest_k, welfare_bounds,
};

use super::{parse_rat_arg, write_file};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    /// Exact-stability reduction (needs --alpha and --k or --delta).
    Thm6,
    /// Epsilon-stability reduction (needs --eps and --delta).
    #[value(name = "appC", alias = "appc")]
    AppC,
}

#[derive(Args)]
pub struct ReduceArgs {
    /// DIMACS CNF file; must be 2P2N-3SAT.
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long, value_enum)]
    pub variant: Variant,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub delta: Option<String>,
    /// Accumulator length; derived from --delta when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: ReduceArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&args.cnf)
        .with_context(|| format!("reading formula {}", args.cnf.display()))?;
    let formula = parse_dimacs_2p2n(&text)?;
    let artifact = match args.variant {
        Variant::Thm6 => {
            let alpha = match &args.alpha {
                Some(text) => parse_rat_arg(text)?,
                None => anyhow::bail!("thm6 requires --alpha"),
            };
            let k = match (args.k, &args.delta) {
                (Some(k), _) => k,
                (None, Some(delta)) => suggest_k(&formula, &alpha, &parse_rat_arg(delta)?)?,
                (None, None) => anyhow::bail!("thm6 requires --k or --delta"),
            };
            compile_thm6(&formula, &alpha, k)?
        }
        Variant::AppC => {
            let eps = match &args.eps {
                Some(text) => parse_rat_arg(text)?,
                None => anyhow::bail!("appC requires --eps"),
            };
            let delta = match &args.delta {
                Some(text) => parse_rat_arg(text)?,
                None => anyhow::bail!("appC requires --delta"),
            };
            compile_app_c(&formula, &eps, &delta)?
        }
    };
    artifact.typecheck()?;
    write_file(&args.out, &write_instance(&artifact.instance))?;
    let mut bindings_path = args.out.as_os_str().to_owned();
    bindings_path.push(".bindings");
    let bindings_path = PathBuf::from(bindings_path);
    write_file(&bindings_path, &artifact.bindings_text())?;

    let bounds = welfare_bounds(&artifact);
    println!("instance={}", args.out.display());
    println!("bindings={}", bindings_path.display());
    println!("variant={}", artifact.params.variant_name());
    println!("n={}", artifact.instance.n());
    println!("vars={}", artifact.formula.num_vars());
    println!("clauses={}", artifact.formula.num_clauses());
    println!("sat_lower={}", bounds.sat_lower);
    println!("unsat_upper={}", bounds.unsat_upper);
    println!("separated={}", bounds.separated);
    Ok(0)
}
