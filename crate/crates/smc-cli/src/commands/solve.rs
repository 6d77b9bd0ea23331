use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, ValueEnum};
use num_traits::Zero;

use smc_core::classic::{approx_heavy_light, blend_eps_stable, solve_binary, SolvedMatching};
use smc_core::format::{write_certificate, write_matching};
use smc_core::lp::{
    solve_exact_milp, solve_exact_thresh_jobs, solve_half_stable, DEFAULT_MILP_CAP,
    DEFAULT_THRESH_CAP,
};
use smc_core::{FractionalMatching, Rat};

use super::{effective_cap, parse_rat_arg, read_instance, write_file};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    ExactThresh,
    ExactMilp,
    Binary,
    HeavyLight,
    Blend,
    HalfStable,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::ExactThresh => "exact-thresh",
            Method::ExactMilp => "exact-milp",
            Method::Binary => "binary",
            Method::HeavyLight => "heavy-light",
            Method::Blend => "blend",
            Method::HalfStable => "half-stable",
        }
    }
}

#[derive(Args)]
pub struct SolveArgs {
    /// Instance file (smc v1 format).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Stability slack for exact-thresh and blend (rational p/q).
    #[arg(long)]
    pub eps: Option<String>,
    /// Enumeration cap override (also via SMC_CAP).
    #[arg(long)]
    pub cap: Option<usize>,
    /// Worker threads for the threshold enumeration.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Resolve ordinal ties in favour of larger joint value (heavy-light).
    #[arg(long)]
    pub ternary_tiebreak: bool,
    /// Output base path; defaults to the input path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit wall-clock timing from the report for byte-identical output.
    #[arg(long)]
    pub no_time: bool,
}

pub fn run(args: SolveArgs) -> Result<u8> {
    let inst = read_instance(&args.input)?;
    let eps = match &args.eps {
        Some(text) => parse_rat_arg(text)?,
        None => Rat::zero(),
    };
    let start = Instant::now();
    let (matching, welfare, subproblems, certificate): (
        FractionalMatching,
        Rat,
        usize,
        Option<String>,
    ) = match args.method {
        Method::ExactThresh => {
            let cap = effective_cap(args.cap, DEFAULT_THRESH_CAP);
            let r = solve_exact_thresh_jobs(&inst, &eps, cap, args.jobs.max(1))?;
            let cert = write_certificate(&r.certificate);
            (
                r.matching,
                r.profile.welfare,
                r.subproblems_solved,
                Some(cert),
            )
        }
        Method::ExactMilp => {
            let cap = effective_cap(args.cap, DEFAULT_MILP_CAP);
            let r = solve_exact_milp(&inst, cap)?;
            let cert = write_certificate(&r.certificate);
            (
                r.matching,
                r.profile.welfare,
                r.subproblems_solved,
                Some(cert),
            )
        }
        Method::HalfStable => {
            let r = solve_half_stable(&inst)?;
            let cert = write_certificate(&r.certificate);
            (
                r.matching,
                r.profile.welfare,
                r.subproblems_solved,
                Some(cert),
            )
        }
        Method::Binary => {
            let r = solve_binary(&inst)?;
            (report_matching(r.matching, inst.n()), r.welfare, 1, None)
        }
        Method::HeavyLight => {
            let r = approx_heavy_light(&inst, args.ternary_tiebreak)?;
            (report_matching(r.matching, inst.n()), r.welfare, 1, None)
        }
        Method::Blend => {
            let r = blend_eps_stable(&inst, &eps)?;
            (report_matching(r.matching, inst.n()), r.welfare, 1, None)
        }
    };
    let elapsed = start.elapsed();

    let base = args.out.clone().unwrap_or_else(|| args.input.clone());
    let matching_path = base.with_extension("matching");
    write_file(&matching_path, &write_matching(&matching))?;
    let certificate_path = match &certificate {
        Some(text) => {
            let path = base.with_extension("certificate");
            write_file(&path, text)?;
            Some(path)
        }
        None => None,
    };

    println!("report v1");
    println!("method={}", args.method.name());
    println!("n={}", inst.n());
    println!("welfare={welfare}");
    println!("subproblems={subproblems}");
    println!("matching={}", matching_path.display());
    match certificate_path {
        Some(path) => println!("certificate={}", path.display()),
        None => println!("certificate=none"),
    }
    if !args.no_time {
        println!("time_ms={}", elapsed.as_millis());
    }
    Ok(0)
}

fn report_matching(matching: SolvedMatching, n: usize) -> FractionalMatching {
    matching.to_fractional(n)
}
