use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use num_traits::Zero;

use smc_core::altstab::{
    check_expost_stability, check_fractional_stability, check_strong_stability, ExPostResult,
};
use smc_core::instance::check_stability;
use smc_core::oracle::DEFAULT_ENUM_CAP;
use smc_core::Rat;

use super::{effective_cap, parse_rat_arg, read_instance, read_matching};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Notion {
    Stable,
    EpsStable,
    Strong,
    Fractional,
    Expost,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Instance file (smc v1 format).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub matching: PathBuf,
    #[arg(long, value_enum)]
    pub notion: Notion,
    /// Stability slack for eps-stable (rational p/q).
    #[arg(long)]
    pub eps: Option<String>,
    /// Enumeration cap override for the ex-post check.
    #[arg(long)]
    pub cap: Option<usize>,
}

pub fn run(args: CheckArgs) -> Result<u8> {
    let inst = read_instance(&args.input)?;
    let mu = read_matching(&args.matching)?;
    let violated = match args.notion {
        Notion::Stable | Notion::EpsStable => {
            let eps = match (&args.notion, &args.eps) {
                (Notion::EpsStable, Some(text)) => parse_rat_arg(text)?,
                (Notion::EpsStable, None) => anyhow::bail!("eps-stable requires --eps"),
                _ => Rat::zero(),
            };
            let report = check_stability(&inst, &mu, &eps)?;
            for pair in &report.blocking {
                println!(
                    "blocking {} {} (u={}, v={}, thresholds {}, {})",
                    inst.man_label(pair.man),
                    inst.woman_label(pair.woman),
                    pair.man_utility,
                    pair.woman_utility,
                    pair.man_threshold,
                    pair.woman_threshold,
                );
            }
            !report.is_stable()
        }
        Notion::Strong => {
            let violations = check_strong_stability(&inst, &mu)?;
            for v in &violations {
                println!(
                    "strong-violation ({}, {}, {}, {})",
                    inst.man_label(v.man),
                    inst.woman_label(v.man_engaged_to),
                    inst.man_label(v.other_man),
                    inst.woman_label(v.other_engaged_to),
                );
            }
            !violations.is_empty()
        }
        Notion::Fractional => {
            let violations = check_fractional_stability(&inst, &mu)?;
            for v in &violations {
                println!(
                    "fractional-violation {} {} mass={}",
                    inst.man_label(v.man),
                    inst.woman_label(v.woman),
                    v.mass,
                );
            }
            !violations.is_empty()
        }
        Notion::Expost => {
            let cap = effective_cap(args.cap, DEFAULT_ENUM_CAP);
            match check_expost_stability(&inst, &mu, cap)? {
                ExPostResult::Decomposition(terms) => {
                    for (lambda, m) in &terms {
                        let pairs: Vec<String> = m
                            .pairs()
                            .iter()
                            .map(|&(a, b)| format!("({a},{b})"))
                            .collect();
                        println!("expost-term lambda={lambda} pairs={}", pairs.join(";"));
                    }
                    false
                }
                ExPostResult::NotExPost => {
                    println!("not-expost");
                    true
                }
            }
        }
    };
    if violated {
        println!("result=violated");
        Ok(3)
    } else {
        println!("result=holds");
        Ok(0)
    }
}
