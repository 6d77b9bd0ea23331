//! Combinatorial algorithms: Gale-Shapley over tie-broken weak orders,
//! exact maximum-weight bipartite matching, the binary-valuation optimal
//! solver, the heavy/light approximation with its ternary tie-break
//! refinement, and the epsilon-stable blend of a stable matching with a
//! welfare-optimal one.

use std::collections::VecDeque;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hungarian::{cell_preference, min_cost_assignment, LexCost};
use crate::instance::{int, utilities, FractionalMatching, IntegralMatching, Rat, SmcInstance};

/// Which side proposes in Gale-Shapley.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposingSide {
    Men,
    Women,
}

/// How weak orders are refined into the strict orders Gale-Shapley needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TieBreak {
    /// value desc, then index asc.
    Index,
    /// value desc, then U+V desc, then index asc.
    JointValueThenIndex,
}

struct GsView<'a> {
    inst: &'a SmcInstance,
    side: ProposingSide,
}

impl<'a> GsView<'a> {
    /// Proposer p's value for receiver r.
    fn value(&self, p: usize, r: usize) -> &'a Rat {
        match self.side {
            ProposingSide::Men => self.inst.u(p, r),
            ProposingSide::Women => self.inst.v(r, p),
        }
    }

    /// Receiver r's value for proposer p.
    fn value_back(&self, p: usize, r: usize) -> &'a Rat {
        match self.side {
            ProposingSide::Men => self.inst.v(p, r),
            ProposingSide::Women => self.inst.u(r, p),
        }
    }

    fn joint(&self, p: usize, r: usize) -> Rat {
        self.value(p, r) + self.value_back(p, r)
    }
}

/// True when `a` strictly precedes `b` in the receiver's tie-broken order.
fn receiver_prefers(view: &GsView, r: usize, a: usize, b: usize, tiebreak: TieBreak) -> bool {
    let (va, vb) = (view.value_back(a, r), view.value_back(b, r));
    if va != vb {
        return va > vb;
    }
    if tiebreak == TieBreak::JointValueThenIndex {
        let (ja, jb) = (view.joint(a, r), view.joint(b, r));
        if ja != jb {
            return ja > jb;
        }
    }
    a < b
}

fn gale_shapley_restricted(
    inst: &SmcInstance,
    side: ProposingSide,
    allowed: impl Fn(usize, usize) -> bool,
    tiebreak: TieBreak,
) -> IntegralMatching {
    let n = inst.n();
    let view = GsView { inst, side };
    // Preference lists over allowed partners, best first.
    let prefs: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            let mut list: Vec<usize> = (0..n)
                .filter(|&r| match side {
                    ProposingSide::Men => allowed(p, r),
                    ProposingSide::Women => allowed(r, p),
                })
                .collect();
            list.sort_by(|&a, &b| {
                view.value(p, b)
                    .cmp(view.value(p, a))
                    .then_with(|| {
                        if tiebreak == TieBreak::JointValueThenIndex {
                            view.joint(p, b).cmp(&view.joint(p, a))
                        } else {
                            std::cmp::Ordering::Equal
                        }
                    })
                    .then(a.cmp(&b))
            });
            list
        })
        .collect();

    let mut next_choice = vec![0usize; n];
    let mut engaged_to: Vec<Option<usize>> = vec![None; n]; // receiver -> proposer
    let mut free: VecDeque<usize> = (0..n).collect();
    while let Some(p) = free.pop_front() {
        let Some(&r) = prefs[p].get(next_choice[p]) else {
            continue; // exhausted list, stays unmatched
        };
        next_choice[p] += 1;
        match engaged_to[r] {
            None => engaged_to[r] = Some(p),
            Some(current) => {
                if receiver_prefers(&view, r, p, current, tiebreak) {
                    engaged_to[r] = Some(p);
                    free.push_back(current);
                } else {
                    free.push_back(p);
                }
            }
        }
    }

    let pairs: Vec<(usize, usize)> = engaged_to
        .iter()
        .enumerate()
        .filter_map(|(r, p)| {
            p.map(|p| match side {
                ProposingSide::Men => (p, r),
                ProposingSide::Women => (r, p),
            })
        })
        .collect();
    IntegralMatching::new(pairs).expect("each receiver holds at most one proposer")
}

/// Deferred acceptance over the full preference lists, with ties broken by
/// ascending agent index. The result is stable for the instance (eps = 0).
pub fn gale_shapley(inst: &SmcInstance, side: ProposingSide) -> IntegralMatching {
    gale_shapley_restricted(inst, side, |_, _| true, TieBreak::Index)
}

/// Exact maximum-weight matching over the allowed cells. Zero-weight cells
/// are never selected; among maximum-weight matchings the lexicographically
/// smallest pair list is returned.
pub fn max_weight_matching(
    weights: &[Vec<Rat>],
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<IntegralMatching> {
    let n = weights.len();
    for (i, row) in weights.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "weight row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, x) in row.iter().enumerate() {
            if x < &Rat::zero() {
                return Err(Error::NegativeValuation { row: i, col: j });
            }
        }
    }
    if n == 0 {
        return Ok(IntegralMatching::empty());
    }
    let selectable = |i: usize, j: usize| allowed(i, j) && !weights[i][j].is_zero();
    let cost: Vec<Vec<LexCost>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if selectable(i, j) {
                        LexCost(-weights[i][j].clone(), -cell_preference(i, j, n))
                    } else {
                        LexCost::zero()
                    }
                })
                .collect()
        })
        .collect();
    let assign = min_cost_assignment(&cost);
    let pairs: Vec<(usize, usize)> = assign
        .iter()
        .enumerate()
        .filter(|&(i, &j)| selectable(i, j))
        .map(|(i, &j)| (i, j))
        .collect();
    IntegralMatching::new(pairs)
}

/// Result matching of an approximation algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolvedMatching {
    Integral(IntegralMatching),
    Fractional(FractionalMatching),
}

impl SolvedMatching {
    pub fn to_fractional(&self, n: usize) -> FractionalMatching {
        match self {
            SolvedMatching::Integral(m) => m
                .to_fractional(n)
                .expect("integral matching fits the instance"),
            SolvedMatching::Fractional(m) => m.clone(),
        }
    }
}

/// Output of the approximation algorithms: the matching, its exact welfare,
/// the extreme non-zero valuations and the ratio the algorithm claims.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxReport {
    pub matching: SolvedMatching,
    pub welfare: Rat,
    pub sigma_max: Option<Rat>,
    pub sigma_min: Option<Rat>,
    pub claimed_ratio: Option<Rat>,
}

fn joint_weights(inst: &SmcInstance) -> Vec<Vec<Rat>> {
    let n = inst.n();
    (0..n)
        .map(|m| (0..n).map(|w| inst.u(m, w) + inst.v(m, w)).collect())
        .collect()
}

fn report_for(
    inst: &SmcInstance,
    matching: SolvedMatching,
    claimed_ratio: Option<Rat>,
) -> ApproxReport {
    let mu = matching.to_fractional(inst.n());
    let welfare = utilities(inst, &mu)
        .expect("matching fits the instance")
        .welfare;
    ApproxReport {
        matching,
        welfare,
        sigma_max: inst.sigma_max(),
        sigma_min: inst.sigma_min(),
        claimed_ratio,
    }
}

/// Optimal stable solver for binary valuations: a maximum-weight matching
/// under weights 2 + 1/n^2 for mutual edges, 1 for one-sided edges and 0
/// otherwise is simultaneously welfare-optimal and stable.
pub fn solve_binary(inst: &SmcInstance) -> Result<ApproxReport> {
    if !inst.is_binary() {
        return Err(Error::NotBinary);
    }
    let n = inst.n();
    let mutual_bonus = int(2) + Rat::new(1.into(), (n as i64 * n as i64).into());
    let gamma: Vec<Vec<Rat>> = (0..n)
        .map(|m| {
            (0..n)
                .map(|w| {
                    let (u, v) = (inst.u(m, w), inst.v(m, w));
                    if u.is_one() && v.is_one() {
                        mutual_bonus.clone()
                    } else if u.is_one() || v.is_one() {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                })
                .collect()
        })
        .collect();
    let matching = max_weight_matching(&gamma, |_, _| true)?;
    Ok(report_for(
        inst,
        SolvedMatching::Integral(matching),
        Some(Rat::one()),
    ))
}

/// Per-edge weight used by [`solve_binary`], exposed for tests.
pub fn binary_gamma_weight(inst: &SmcInstance, m: usize, w: usize) -> Rat {
    let n = inst.n() as i64;
    let (u, v) = (inst.u(m, w), inst.v(m, w));
    if u.is_one() && v.is_one() {
        int(2) + Rat::new(1.into(), (n * n).into())
    } else if u.is_one() || v.is_one() {
        Rat::one()
    } else {
        Rat::zero()
    }
}

/// Two-step stable approximation: deferred acceptance restricted to heavy
/// pairs, then a maximum-welfare completion over light pairs on the agents
/// left unmatched. With `ternary_tiebreak` set, ordinal ties in step one
/// are resolved in favour of pairs with the largest U + V, which improves
/// the guarantee to max(2, alpha) on ternary instances.
pub fn approx_heavy_light(inst: &SmcInstance, ternary_tiebreak: bool) -> Result<ApproxReport> {
    let n = inst.n();
    let tiebreak = if ternary_tiebreak {
        TieBreak::JointValueThenIndex
    } else {
        TieBreak::Index
    };
    let heavy = gale_shapley_restricted(
        inst,
        ProposingSide::Men,
        |m, w| inst.is_heavy(m, w),
        tiebreak,
    );
    let mut man_taken = vec![false; n];
    let mut woman_taken = vec![false; n];
    for &(m, w) in heavy.pairs() {
        man_taken[m] = true;
        woman_taken[w] = true;
    }
    let weights = joint_weights(inst);
    let light = max_weight_matching(&weights, |m, w| {
        inst.is_light(m, w) && !man_taken[m] && !woman_taken[w]
    })?;
    let mut pairs = heavy.pairs().to_vec();
    pairs.extend_from_slice(light.pairs());
    let matching = IntegralMatching::new(pairs)?;

    let claimed_ratio = if ternary_tiebreak && inst.is_ternary() {
        inst.ternary_alpha()
            .map(|alpha| alpha.max(int(2)))
            .or_else(|| {
                // Binary instances: max(2, alpha) degenerates to 2.
                if inst.sigma_max().is_some() {
                    Some(int(2))
                } else {
                    None
                }
            })
    } else {
        match (inst.sigma_max(), inst.sigma_min()) {
            (Some(max), Some(min)) => Some(Rat::one() + max / min),
            _ => None,
        }
    };
    Ok(report_for(
        inst,
        SolvedMatching::Integral(matching),
        claimed_ratio,
    ))
}

/// `(1 - eps) * (men-proposing Gale-Shapley) + eps * (welfare-optimal
/// matching)`: eps-stable with welfare at least eps times the optimum.
/// eps = 1 is accepted and returns the optimum itself, for which
/// 1-stability is vacuous.
pub fn blend_eps_stable(inst: &SmcInstance, epsilon: &Rat) -> Result<ApproxReport> {
    if epsilon < &Rat::zero() || epsilon > &Rat::one() {
        return Err(Error::EpsilonOutOfRange(format!("{epsilon} not in [0, 1]")));
    }
    let n = inst.n();
    let stable = gale_shapley(inst, ProposingSide::Men);
    let optimal = max_weight_matching(&joint_weights(inst), |_, _| true)?;
    let blended = FractionalMatching::blend(
        &stable.to_fractional(n)?,
        &optimal.to_fractional(n)?,
        epsilon,
    )?;
    let claimed_ratio = if epsilon.is_zero() {
        None
    } else {
        Some(Rat::one() / epsilon)
    };
    Ok(report_for(
        inst,
        SolvedMatching::Fractional(blended),
        claimed_ratio,
    ))
}

/// Welfare-optimal matching over all fractional matchings; integral
/// without loss of generality.
pub fn optimal_matching(inst: &SmcInstance) -> Result<IntegralMatching> {
    max_weight_matching(&joint_weights(inst), |_, _| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_motivating, gen_random, RandomFamily};
    use crate::instance::{check_stability, rat, welfare_of_pairs};

    #[test]
    fn gale_shapley_motivating_both_sides() {
        let (inst, _) = gen_motivating();
        let men = gale_shapley(&inst, ProposingSide::Men);
        assert_eq!(men.pairs(), &[(0, 2), (1, 1), (2, 0)]);
        let women = gale_shapley(&inst, ProposingSide::Women);
        assert_eq!(women.pairs(), &[(0, 0), (1, 2), (2, 1)]);
        assert_eq!(welfare_of_pairs(&inst, &men), int(7));
        assert_eq!(welfare_of_pairs(&inst, &women), int(7));
    }

    #[test]
    fn gale_shapley_single_pair() {
        let inst = SmcInstance::new(vec![vec![int(1)]], vec![vec![int(1)]]).unwrap();
        let m = gale_shapley(&inst, ProposingSide::Men);
        assert_eq!(m.pairs(), &[(0, 0)]);
    }

    #[test]
    fn gale_shapley_stable_on_random_instances() {
        for seed in 0..500u64 {
            let n = 2 + (seed % 7) as usize; // up to 8
            let family = match seed % 3 {
                0 => RandomFamily::Binary,
                1 => RandomFamily::Ternary { alpha: int(3) },
                _ => RandomFamily::General { max: 5 },
            };
            let inst = gen_random(n, &family, seed);
            for side in [ProposingSide::Men, ProposingSide::Women] {
                let m = gale_shapley(&inst, side);
                let f = m.to_fractional(n).unwrap();
                assert!(
                    check_stability(&inst, &f, &int(0)).unwrap().is_stable(),
                    "seed {seed} side {side:?}"
                );
            }
        }
    }

    #[test]
    fn max_weight_diagonal_dominance() {
        let w = vec![vec![int(2), int(0)], vec![int(0), int(2)]];
        let m = max_weight_matching(&w, |_, _| true).unwrap();
        assert_eq!(m.pairs(), &[(0, 0), (1, 1)]);
    }

    #[test]
    fn max_weight_tie_broken_lexicographically() {
        let w = vec![vec![int(1), int(1)], vec![int(1), int(1)]];
        let m = max_weight_matching(&w, |_, _| true).unwrap();
        assert_eq!(m.pairs(), &[(0, 0), (1, 1)]);
    }

    #[test]
    fn max_weight_on_2x2_example() {
        let inst = crate::generators::gen_2x2_example();
        let m = optimal_matching(&inst).unwrap();
        assert_eq!(m.pairs(), &[(0, 0), (1, 1)]);
        assert_eq!(welfare_of_pairs(&inst, &m), int(4));
    }

    #[test]
    fn max_weight_agrees_with_enumeration() {
        use crate::oracle::{enumerate_integral, DEFAULT_ENUM_CAP};
        for seed in 0..60u64 {
            let n = 2 + (seed % 4) as usize;
            let inst = gen_random(n, &RandomFamily::General { max: 6 }, seed);
            let best = welfare_of_pairs(&inst, &optimal_matching(&inst).unwrap());
            let brute = enumerate_integral(&inst, true, DEFAULT_ENUM_CAP)
                .unwrap()
                .map(|m| welfare_of_pairs(&inst, &m))
                .max()
                .unwrap();
            assert_eq!(best, brute, "seed {seed}");
        }
    }

    #[test]
    fn binary_identity_instance() {
        let u = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        let inst = SmcInstance::new(u.clone(), u).unwrap();
        let report = solve_binary(&inst).unwrap();
        assert_eq!(report.welfare, int(4));
        assert_eq!(binary_gamma_weight(&inst, 0, 0), rat(9, 4));
    }

    #[test]
    fn binary_one_sided_row() {
        let u = vec![vec![int(1), int(1)], vec![int(0), int(0)]];
        let v = vec![vec![int(0), int(0)], vec![int(0), int(0)]];
        let inst = SmcInstance::new(u, v).unwrap();
        let report = solve_binary(&inst).unwrap();
        assert_eq!(report.welfare, int(1));
        match &report.matching {
            SolvedMatching::Integral(m) => {
                assert_eq!(m.len(), 1);
                assert_eq!(m.pairs()[0].0, 0);
            }
            _ => panic!("binary solver returns an integral matching"),
        }
    }

    #[test]
    fn binary_rejects_nonbinary() {
        let (inst, _) = gen_motivating();
        assert!(matches!(solve_binary(&inst), Err(Error::NotBinary)));
    }

    #[test]
    fn heavy_light_motivating_guarantee() {
        let (inst, _) = gen_motivating();
        let report = approx_heavy_light(&inst, false).unwrap();
        let f = report.matching.to_fractional(3);
        assert!(check_stability(&inst, &f, &int(0)).unwrap().is_stable());
        assert_eq!(report.sigma_max, Some(int(3)));
        assert_eq!(report.sigma_min, Some(int(1)));
        assert_eq!(report.claimed_ratio, Some(int(4)));
        // W(opt) = 8, so the guarantee is welfare >= 2.
        assert!(report.welfare >= int(2));
    }

    #[test]
    fn heavy_light_only_light_pairs() {
        // No heavy pair: step one is empty and the result is the
        // welfare-maximal matching, trivially stable.
        let u = vec![vec![int(2), int(0)], vec![int(3), int(0)]];
        let v = vec![vec![int(0), int(1)], vec![int(0), int(0)]];
        let inst = SmcInstance::new(u, v).unwrap();
        let report = approx_heavy_light(&inst, false).unwrap();
        let best = optimal_matching(&inst).unwrap();
        assert_eq!(report.welfare, welfare_of_pairs(&inst, &best));
        let f = report.matching.to_fractional(2);
        assert!(check_stability(&inst, &f, &int(0)).unwrap().is_stable());
    }

    #[test]
    fn heavy_light_guarantee_on_random_instances() {
        for seed in 0..200u64 {
            let n = 2 + (seed % 5) as usize; // up to 6
            let inst = gen_random(n, &RandomFamily::General { max: 6 }, seed);
            let report = approx_heavy_light(&inst, false).unwrap();
            let f = report.matching.to_fractional(n);
            assert!(
                check_stability(&inst, &f, &int(0)).unwrap().is_stable(),
                "seed {seed}"
            );
            let opt = welfare_of_pairs(&inst, &optimal_matching(&inst).unwrap());
            if let Some(ratio) = &report.claimed_ratio {
                assert!(&report.welfare * ratio >= opt, "seed {seed}");
            } else {
                assert!(opt.is_zero());
            }
        }
    }

    #[test]
    fn ternary_tiebreak_guarantee() {
        let alpha = int(3);
        for seed in 0..120u64 {
            let n = 2 + (seed % 4) as usize; // up to 5
            let inst = gen_random(
                n,
                &RandomFamily::Ternary {
                    alpha: alpha.clone(),
                },
                seed,
            );
            let report = approx_heavy_light(&inst, true).unwrap();
            let f = report.matching.to_fractional(n);
            assert!(
                check_stability(&inst, &f, &int(0)).unwrap().is_stable(),
                "seed {seed}"
            );
            let opt = welfare_of_pairs(&inst, &optimal_matching(&inst).unwrap());
            // W >= min(1/2, 1/alpha) * W(opt) = W(opt) / max(2, alpha).
            assert!(&report.welfare * &alpha >= opt, "seed {seed}");
        }
    }

    #[test]
    fn blend_motivating_half() {
        let (inst, _) = gen_motivating();
        let report = blend_eps_stable(&inst, &rat(1, 2)).unwrap();
        assert_eq!(report.welfare, rat(15, 2));
        let f = report.matching.to_fractional(3);
        assert!(check_stability(&inst, &f, &rat(1, 2)).unwrap().is_stable());
        assert_eq!(report.claimed_ratio, Some(int(2)));
    }

    #[test]
    fn blend_degenerate_endpoints() {
        let (inst, _) = gen_motivating();
        let zero = blend_eps_stable(&inst, &int(0)).unwrap();
        assert_eq!(zero.welfare, int(7));
        let f = zero.matching.to_fractional(3);
        assert!(check_stability(&inst, &f, &int(0)).unwrap().is_stable());
        assert_eq!(zero.claimed_ratio, None);

        let one = blend_eps_stable(&inst, &int(1)).unwrap();
        assert_eq!(one.welfare, int(8));
        assert!(blend_eps_stable(&inst, &rat(3, 2)).is_err());
    }

    #[test]
    fn blend_pairwise_eps_guarantee() {
        let eps = rat(1, 4);
        for seed in 0..100u64 {
            let n = 2 + (seed % 4) as usize;
            let inst = gen_random(n, &RandomFamily::General { max: 5 }, seed);
            let report = blend_eps_stable(&inst, &eps).unwrap();
            let mu = report.matching.to_fractional(n);
            let profile = utilities(&inst, &mu).unwrap();
            let scale = Rat::one() - &eps;
            for m in 0..n {
                for w in 0..n {
                    let ok_man = profile.men[m] >= &scale * inst.u(m, w);
                    let ok_woman = profile.women[w] >= &scale * inst.v(m, w);
                    assert!(ok_man || ok_woman, "seed {seed} pair ({m}, {w})");
                }
            }
        }
    }
}
