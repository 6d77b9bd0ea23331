use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};

use smc_core::format::{write_instance, write_matching};
use smc_core::generators::{
    gen_2x2_example, gen_gap, gen_motivating, gen_nonconvex, gen_random, gen_rotating,
    gen_support_lb, gen_unstable_support, RandomFamily,
};
use smc_core::instance::int;

use super::{parse_rat_arg, write_file};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// The motivating 3x3 example.
    Motivating,
    /// Welfare-gap chain (needs --alpha >= 2 and --k >= 2).
    Gap,
    /// Binary instance with a non-convex stable set.
    Nonconvex,
    /// Ternary instance whose optimum is supported on unstable matchings.
    UnstableSupport,
    /// Linear-support family (needs odd --n and --rho).
    SupportLb,
    /// The 2x2 instance separating optimal integral from optimal stable.
    TwoByTwo,
    /// Cardinal realization of the rotating ordinal counterexample.
    Rotating,
    RandomBinary,
    RandomTernary,
    RandomSymmetricTernary,
    RandomGeneral,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub rho: Option<String>,
    /// Largest numerator for the random general family.
    #[arg(long)]
    pub max: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn required_rat(value: &Option<String>, flag: &str) -> Result<smc_core::Rat> {
    match value {
        Some(text) => parse_rat_arg(text),
        None => anyhow::bail!("this family requires {flag}"),
    }
}

fn required_n(value: Option<usize>) -> Result<usize> {
    value.ok_or_else(|| anyhow::anyhow!("this family requires --n"))
}

pub fn run(args: GenArgs) -> Result<u8> {
    let witness_path = |suffix: &str| {
        let mut name = args.out.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    let (instance, witnesses): (_, Vec<(PathBuf, String)>) = match args.family {
        Family::Motivating => {
            let (inst, witness) = gen_motivating();
            (
                inst,
                vec![(witness_path(".witness"), write_matching(&witness))],
            )
        }
        Family::Gap => {
            let alpha = required_rat(&args.alpha, "--alpha")?;
            let k = args.k.ok_or_else(|| anyhow::anyhow!("gap requires --k"))?;
            let (inst, witness) = gen_gap(&alpha, k)?;
            (
                inst,
                vec![(witness_path(".witness"), write_matching(&witness))],
            )
        }
        Family::Nonconvex => {
            let (inst, mu1, mu2) = gen_nonconvex();
            let n = inst.n();
            (
                inst,
                vec![
                    (
                        witness_path(".witness1"),
                        write_matching(&mu1.to_fractional(n)?),
                    ),
                    (
                        witness_path(".witness2"),
                        write_matching(&mu2.to_fractional(n)?),
                    ),
                ],
            )
        }
        Family::UnstableSupport => {
            let alpha = match &args.alpha {
                Some(text) => parse_rat_arg(text)?,
                None => int(3),
            };
            let (inst, witness) = gen_unstable_support(&alpha)?;
            (
                inst,
                vec![(witness_path(".witness"), write_matching(&witness))],
            )
        }
        Family::SupportLb => {
            let n = required_n(args.n)?;
            let rho = required_rat(&args.rho, "--rho")?;
            let (inst, witness) = gen_support_lb(n, &rho)?;
            (
                inst,
                vec![(witness_path(".witness"), write_matching(&witness))],
            )
        }
        Family::TwoByTwo => (gen_2x2_example(), vec![]),
        Family::Rotating => {
            let (inst, witness) = gen_rotating();
            (
                inst,
                vec![(witness_path(".witness"), write_matching(&witness))],
            )
        }
        Family::RandomBinary => (
            gen_random(required_n(args.n)?, &RandomFamily::Binary, args.seed),
            vec![],
        ),
        Family::RandomTernary => {
            let alpha = required_rat(&args.alpha, "--alpha")?;
            (
                gen_random(
                    required_n(args.n)?,
                    &RandomFamily::Ternary { alpha },
                    args.seed,
                ),
                vec![],
            )
        }
        Family::RandomSymmetricTernary => {
            let alpha = required_rat(&args.alpha, "--alpha")?;
            (
                gen_random(
                    required_n(args.n)?,
                    &RandomFamily::SymmetricTernary { alpha },
                    args.seed,
                ),
                vec![],
            )
        }
        Family::RandomGeneral => {
            let max = args.max.unwrap_or(5);
            (
                gen_random(
                    required_n(args.n)?,
                    &RandomFamily::General { max },
                    args.seed,
                ),
                vec![],
            )
        }
    };
    write_file(&args.out, &write_instance(&instance))?;
    println!("instance={}", args.out.display());
    for (path, text) in witnesses {
        write_file(&path, &text)?;
        println!("witness={}", path.display());
    }
    Ok(0)
}
