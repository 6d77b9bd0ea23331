use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, ValueEnum};
use num_traits::Zero;

use smc_core::classic::{
    approx_heavy_light, blend_eps_stable, gale_shapley, solve_binary, ProposingSide,
};
use smc_core::decompose::bvn_decompose;
use smc_core::generators::{
    gap_integral_bound, gap_witness_welfare, gen_2x2_example, gen_gap, gen_motivating,
    gen_nonconvex, gen_random, gen_rotating, gen_support_lb, gen_unstable_support,
    support_lb_alpha, RandomFamily,
};
use smc_core::instance::{
    check_stability, int, rat, utilities, welfare_of_pairs, FractionalMatching, Rat, SmcInstance,
};
use smc_core::lp::{solve_exact_thresh, solve_half_stable, DEFAULT_THRESH_CAP};
use smc_core::oracle::best_stable_integral;

use super::write_file;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// All named constructions with their designated checks.
    PaperTables,
    /// Random instances solved by every applicable method.
    Random,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Leave the time column empty for byte-identical output.
    #[arg(long)]
    pub no_time: bool,
}

struct Csv {
    rows: String,
    no_time: bool,
}

impl Csv {
    fn new(no_time: bool) -> Self {
        Csv {
            rows: String::from("instance,method,welfare,ratio,checks_pass,time_ms\n"),
            no_time,
        }
    }

    fn row(
        &mut self,
        instance: &str,
        method: &str,
        welfare: &Rat,
        ratio: Option<Rat>,
        checks_pass: bool,
        elapsed_ms: u128,
    ) {
        let ratio = ratio.map(|r| r.to_string()).unwrap_or_default();
        let time = if self.no_time {
            String::new()
        } else {
            elapsed_ms.to_string()
        };
        let _ = writeln!(
            self.rows,
            "{instance},{method},{welfare},{ratio},{checks_pass},{time}"
        );
    }
}

fn stable(inst: &SmcInstance, mu: &FractionalMatching, eps: &Rat) -> bool {
    check_stability(inst, mu, eps)
        .map(|r| r.is_stable())
        .unwrap_or(false)
}

fn paper_tables(csv: &mut Csv) -> Result<()> {
    // Motivating example: the exact optimum strictly beats every stable
    // integral matching.
    let (inst, witness) = gen_motivating();
    let start = Instant::now();
    let exact = solve_exact_thresh(&inst, &int(0), DEFAULT_THRESH_CAP)?;
    let witness_welfare = utilities(&inst, &witness)?.welfare;
    let checks = witness_welfare == rat(15, 2)
        && stable(&inst, &witness, &int(0))
        && exact.welfare() >= &rat(15, 2)
        && exact.welfare() > &int(7)
        && welfare_of_pairs(&inst, &gale_shapley(&inst, ProposingSide::Men)) == int(7);
    csv.row(
        "motivating",
        "exact-thresh",
        exact.welfare(),
        Some(int(1)),
        checks,
        start.elapsed().as_millis(),
    );

    // Welfare-gap chain at (alpha, k) = (3, 3).
    let (inst, witness) = gen_gap(&int(3), 3)?;
    let start = Instant::now();
    let ww = utilities(&inst, &witness)?.welfare;
    let (_, best_integral) = best_stable_integral(&inst, 9)?;
    let checks = ww == gap_witness_welfare(&int(3), 3)
        && stable(&inst, &witness, &int(0))
        && best_integral <= gap_integral_bound(&int(3), 3);
    let ratio = ww.clone() / &best_integral;
    csv.row(
        "gap-3-3",
        "witness",
        &ww,
        Some(ratio),
        checks,
        start.elapsed().as_millis(),
    );

    // Non-convexity: the midpoint of two stable matchings blocks at
    // (m2, w2).
    let (inst, mu1, mu2) = gen_nonconvex();
    let start = Instant::now();
    let a = mu1.to_fractional(3)?;
    let b = mu2.to_fractional(3)?;
    let mid = FractionalMatching::blend(&a, &b, &rat(1, 2))?;
    let report = check_stability(&inst, &mid, &int(0))?;
    let checks =
        stable(&inst, &a, &int(0)) && stable(&inst, &b, &int(0)) && report.pairs() == vec![(1, 1)];
    let mid_welfare = utilities(&inst, &mid)?.welfare;
    csv.row(
        "nonconvex",
        "midpoint",
        &mid_welfare,
        None,
        checks,
        start.elapsed().as_millis(),
    );

    // Unstable-support instance at alpha = 3.
    let (inst, witness) = gen_unstable_support(&int(3))?;
    let start = Instant::now();
    let exact = solve_exact_thresh(&inst, &int(0), DEFAULT_THRESH_CAP)?;
    let checks = stable(&inst, &witness, &int(0))
        && utilities(&inst, &witness)?.welfare == int(7)
        && exact.welfare() == &int(7)
        && witness.weight(0, 0).is_zero();
    csv.row(
        "unstable-support-3",
        "exact-thresh",
        exact.welfare(),
        Some(int(1)),
        checks,
        start.elapsed().as_millis(),
    );

    // Linear-support family at n = 5.
    let (inst, witness) = gen_support_lb(5, &int(1))?;
    let start = Instant::now();
    let ww = utilities(&inst, &witness)?.welfare;
    let alpha = support_lb_alpha(5, &int(1));
    let support = bvn_decompose(&witness)?;
    let checks = stable(&inst, &witness, &int(0)) && ww > int(4) * &alpha && support.len() == 4;
    csv.row(
        "support-lb-5",
        "witness",
        &ww,
        None,
        checks,
        start.elapsed().as_millis(),
    );

    // The 2x2 separation between optimal integral and optimal stable.
    let inst = gen_2x2_example();
    let start = Instant::now();
    let exact = solve_exact_thresh(&inst, &int(0), DEFAULT_THRESH_CAP)?;
    let optimal = smc_core::classic::optimal_matching(&inst)?;
    let optimal_f = optimal.to_fractional(2)?;
    let checks = exact.welfare() == &int(2)
        && welfare_of_pairs(&inst, &optimal) == int(4)
        && check_stability(&inst, &optimal_f, &int(0))?.pairs() == vec![(1, 0)];
    csv.row(
        "two-by-two",
        "exact-thresh",
        exact.welfare(),
        Some(int(1)),
        checks,
        start.elapsed().as_millis(),
    );

    // Rotating counterexample: stable but strongly unstable.
    let (inst, witness) = gen_rotating();
    let start = Instant::now();
    let profile = utilities(&inst, &witness)?;
    let strong = smc_core::altstab::check_strong_stability(&inst, &witness)?;
    let checks = stable(&inst, &witness, &int(0))
        && profile
            .men
            .iter()
            .chain(profile.women.iter())
            .all(|u| u == &int(1))
        && !strong.is_empty();
    csv.row(
        "rotating",
        "witness",
        &profile.welfare,
        None,
        checks,
        start.elapsed().as_millis(),
    );
    Ok(())
}

fn random_suite(csv: &mut Csv, seed: u64) -> Result<()> {
    for index in 0..12u64 {
        let n = 2 + (index % 4) as usize;
        let family = match index % 3 {
            0 => RandomFamily::Binary,
            1 => RandomFamily::Ternary { alpha: int(3) },
            _ => RandomFamily::General { max: 5 },
        };
        // The dense-valued family keeps its threshold grid desk-scale
        // only up to n = 4.
        let n = if matches!(family, RandomFamily::General { .. }) {
            n.min(4)
        } else {
            n
        };
        let inst = gen_random(n, &family, seed.wrapping_add(index));
        let name = format!("random-{index}");

        let start = Instant::now();
        let exact = solve_exact_thresh(&inst, &int(0), DEFAULT_THRESH_CAP)?;
        let oracle = exact.welfare().clone();
        let checks = stable(&inst, &exact.matching, &int(0));
        csv.row(
            &name,
            "exact-thresh",
            &oracle,
            Some(int(1)),
            checks,
            start.elapsed().as_millis(),
        );

        let ratio_vs = |w: &Rat| -> Option<Rat> {
            if oracle.is_zero() {
                None
            } else {
                Some(w / &oracle)
            }
        };

        let start = Instant::now();
        let hl = approx_heavy_light(&inst, false)?;
        let hl_mu = hl.matching.to_fractional(n);
        let checks = stable(&inst, &hl_mu, &int(0));
        csv.row(
            &name,
            "heavy-light",
            &hl.welfare,
            ratio_vs(&hl.welfare),
            checks,
            start.elapsed().as_millis(),
        );

        let start = Instant::now();
        let blend = blend_eps_stable(&inst, &rat(1, 2))?;
        let blend_mu = blend.matching.to_fractional(n);
        let checks = stable(&inst, &blend_mu, &rat(1, 2));
        csv.row(
            &name,
            "blend-1/2",
            &blend.welfare,
            ratio_vs(&blend.welfare),
            checks,
            start.elapsed().as_millis(),
        );

        let start = Instant::now();
        let half = solve_half_stable(&inst)?;
        let checks = stable(&inst, &half.matching, &rat(1, 2)) && half.welfare() >= &oracle;
        csv.row(
            &name,
            "half-stable",
            half.welfare(),
            ratio_vs(half.welfare()),
            checks,
            start.elapsed().as_millis(),
        );

        if inst.is_binary() {
            let start = Instant::now();
            let report = solve_binary(&inst)?;
            let mu = report.matching.to_fractional(n);
            let checks = stable(&inst, &mu, &int(0)) && report.welfare == oracle;
            csv.row(
                &name,
                "binary",
                &report.welfare,
                ratio_vs(&report.welfare),
                checks,
                start.elapsed().as_millis(),
            );
        }
    }
    Ok(())
}

pub fn run(args: BenchArgs) -> Result<u8> {
    let mut csv = Csv::new(args.no_time);
    match args.suite {
        Suite::PaperTables => paper_tables(&mut csv)?,
        Suite::Random => random_suite(&mut csv, args.seed)?,
    }
    write_file(&args.out, &csv.rows)?;
    println!("csv={}", args.out.display());
    Ok(0)
}
