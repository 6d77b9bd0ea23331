//! Ordinal stability taxonomy for fractional matchings: strong stability,
//! fractional stability and ex-post stability. The ordinal comparisons use
//! the raw valuations directly (weak orders), never a tie-broken
//! refinement, since ties must not be flagged as strict preferences.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{FractionalMatching, IntegralMatching, Rat, SmcInstance};
use crate::lp::{simplex_solve, Constraint, LinearProgram, Relation, SimplexOutcome};
use crate::oracle::enumerate_integral;

/// A strong-stability violation: both engagements are positive while each
/// agent strictly prefers the other pair's partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongViolation {
    pub man: usize,
    pub man_engaged_to: usize,
    pub other_man: usize,
    pub other_engaged_to: usize,
}

/// Lists all quadruples (m, w', m', w) with mu(m,w') > 0, mu(m',w) > 0,
/// w strictly preferred to w' by m and m strictly preferred to m' by w.
/// Empty iff the matching is strongly stable.
pub fn check_strong_stability(
    inst: &SmcInstance,
    mu: &FractionalMatching,
) -> Result<Vec<StrongViolation>> {
    if inst.n() != mu.n() {
        return Err(Error::DimensionMismatch(format!(
            "instance has n = {} but matching has n = {}",
            inst.n(),
            mu.n()
        )));
    }
    let n = inst.n();
    let mut violations = Vec::new();
    for m in 0..n {
        for w_cur in 0..n {
            if mu.weight(m, w_cur).is_zero() {
                continue;
            }
            for m_other in 0..n {
                if m_other == m {
                    continue;
                }
                for w in 0..n {
                    if w == w_cur || mu.weight(m_other, w).is_zero() {
                        continue;
                    }
                    if inst.u(m, w) > inst.u(m, w_cur) && inst.v(m, w) > inst.v(m_other, w) {
                        violations.push(StrongViolation {
                            man: m,
                            man_engaged_to: w_cur,
                            other_man: m_other,
                            other_engaged_to: w,
                        });
                    }
                }
            }
        }
    }
    Ok(violations)
}

/// A pair whose linear stability mass falls short of one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalViolation {
    pub man: usize,
    pub woman: usize,
    pub mass: Rat,
}

/// For each pair evaluates
/// `sum_{w' weakly preferred to w by m} mu(m,w') +
///  sum_{m' weakly preferred to m by w} mu(m',w) - mu(m,w)`
/// and lists the pairs where it drops below one.
pub fn check_fractional_stability(
    inst: &SmcInstance,
    mu: &FractionalMatching,
) -> Result<Vec<FractionalViolation>> {
    if inst.n() != mu.n() {
        return Err(Error::DimensionMismatch(format!(
            "instance has n = {} but matching has n = {}",
            inst.n(),
            mu.n()
        )));
    }
    let n = inst.n();
    let mut violations = Vec::new();
    for m in 0..n {
        for w in 0..n {
            let mut mass = -mu.weight(m, w).clone();
            for w2 in 0..n {
                if inst.u(m, w2) >= inst.u(m, w) {
                    mass += mu.weight(m, w2);
                }
            }
            for m2 in 0..n {
                if inst.v(m2, w) >= inst.v(m, w) {
                    mass += mu.weight(m2, w);
                }
            }
            if mass < Rat::one() {
                violations.push(FractionalViolation {
                    man: m,
                    woman: w,
                    mass,
                });
            }
        }
    }
    Ok(violations)
}

/// Outcome of the ex-post check: either exact convex weights over stable
/// integral matchings reproducing the input, or a refutation.
#[derive(Debug, Clone)]
pub enum ExPostResult {
    Decomposition(Vec<(Rat, IntegralMatching)>),
    NotExPost,
}

impl ExPostResult {
    pub fn is_expost(&self) -> bool {
        matches!(self, ExPostResult::Decomposition(_))
    }
}

/// Decides whether the matching is a convex combination of stable integral
/// matchings, by enumerating all complete stable integral matchings and
/// solving an exact LP feasibility problem. A convex combination of
/// complete matchings is complete, so incomplete inputs are refuted
/// immediately.
pub fn check_expost_stability(
    inst: &SmcInstance,
    mu: &FractionalMatching,
    cap: usize,
) -> Result<ExPostResult> {
    if inst.n() != mu.n() {
        return Err(Error::DimensionMismatch(format!(
            "instance has n = {} but matching has n = {}",
            inst.n(),
            mu.n()
        )));
    }
    if !mu.is_complete() {
        return Ok(ExPostResult::NotExPost);
    }
    let n = inst.n();
    let stable: Vec<IntegralMatching> = enumerate_integral(inst, true, cap)?
        .filter(|m| {
            let f = m.to_fractional(n).expect("complete matching fits");
            crate::instance::check_stability(inst, &f, &Rat::zero())
                .expect("eps = 0 is valid")
                .is_stable()
        })
        .collect();
    if stable.is_empty() {
        return Ok(ExPostResult::NotExPost);
    }
    // Feasibility: lambda >= 0, sum lambda = 1, sum lambda_s mu_s = mu.
    let k = stable.len();
    let mut constraints = Vec::with_capacity(n * n + 1);
    constraints.push(Constraint {
        coeffs: vec![Rat::one(); k],
        relation: Relation::Eq,
        rhs: Rat::one(),
    });
    for m in 0..n {
        for w in 0..n {
            let coeffs: Vec<Rat> = stable
                .iter()
                .map(|s| {
                    if s.contains(m, w) {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                })
                .collect();
            constraints.push(Constraint {
                coeffs,
                relation: Relation::Eq,
                rhs: mu.weight(m, w).clone(),
            });
        }
    }
    let lp = LinearProgram {
        objective: vec![Rat::zero(); k],
        constraints,
    };
    match simplex_solve(&lp) {
        SimplexOutcome::Optimal(sol) => {
            let terms: Vec<(Rat, IntegralMatching)> = sol
                .values
                .into_iter()
                .zip(stable)
                .filter(|(lambda, _)| !lambda.is_zero())
                .collect();
            Ok(ExPostResult::Decomposition(terms))
        }
        SimplexOutcome::Infeasible => Ok(ExPostResult::NotExPost),
        SimplexOutcome::Unbounded => unreachable!("feasibility program has constant objective"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_motivating, gen_rotating};
    use crate::instance::{check_stability, int, rat};
    use crate::oracle::DEFAULT_ENUM_CAP;

    #[test]
    fn rotating_strong_violation() {
        let (inst, witness) = gen_rotating();
        let violations = check_strong_stability(&inst, &witness).unwrap();
        assert!(violations.contains(&StrongViolation {
            man: 0,
            man_engaged_to: 2,
            other_man: 1,
            other_engaged_to: 1,
        }));
        // ... while the matching is (cardinally) stable.
        assert!(check_stability(&inst, &witness, &int(0))
            .unwrap()
            .is_stable());
    }

    #[test]
    fn integral_stable_matchings_are_strongly_stable() {
        let (inst, _) = gen_motivating();
        let mu1 = IntegralMatching::new(vec![(0, 2), (1, 1), (2, 0)]).unwrap();
        let f = mu1.to_fractional(3).unwrap();
        assert!(check_strong_stability(&inst, &f).unwrap().is_empty());
    }

    #[test]
    fn zero_matching_on_zero_instance_has_no_strong_violation() {
        let u = vec![vec![int(0); 2]; 2];
        let inst = SmcInstance::new(u.clone(), u).unwrap();
        let mu = FractionalMatching::zero(2);
        assert!(check_strong_stability(&inst, &mu).unwrap().is_empty());
    }

    #[test]
    fn motivating_witness_fails_fractional_stability_at_m1_w3() {
        let (inst, witness) = gen_motivating();
        let violations = check_fractional_stability(&inst, &witness).unwrap();
        let hit = violations
            .iter()
            .find(|v| v.man == 0 && v.woman == 2)
            .expect("(m1, w3) must be violated");
        assert_eq!(hit.mass, rat(1, 2));
    }

    #[test]
    fn complete_stable_integral_is_fractionally_stable() {
        let (inst, _) = gen_motivating();
        let mu2 = IntegralMatching::new(vec![(0, 0), (1, 2), (2, 1)]).unwrap();
        let f = mu2.to_fractional(3).unwrap();
        assert!(check_fractional_stability(&inst, &f).unwrap().is_empty());
    }

    #[test]
    fn rotating_witness_is_fractionally_stable() {
        let (inst, witness) = gen_rotating();
        assert!(check_fractional_stability(&inst, &witness)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn expost_accepts_mix_of_stable_matchings() {
        let (inst, _) = gen_motivating();
        let mu1 = IntegralMatching::new(vec![(0, 2), (1, 1), (2, 0)]).unwrap();
        let mu2 = IntegralMatching::new(vec![(0, 0), (1, 2), (2, 1)]).unwrap();
        let mix = FractionalMatching::combine(&[(rat(1, 2), &mu1), (rat(1, 2), &mu2)], 3).unwrap();
        let result = check_expost_stability(&inst, &mix, DEFAULT_ENUM_CAP).unwrap();
        match result {
            ExPostResult::Decomposition(terms) => {
                assert_eq!(terms.len(), 2);
                for (lambda, _) in terms {
                    assert_eq!(lambda, rat(1, 2));
                }
            }
            ExPostResult::NotExPost => panic!("mix of stable matchings is ex-post"),
        }
    }

    #[test]
    fn expost_rejects_motivating_witness() {
        let (inst, witness) = gen_motivating();
        let result = check_expost_stability(&inst, &witness, DEFAULT_ENUM_CAP).unwrap();
        assert!(!result.is_expost());
    }

    #[test]
    fn expost_weight_one_on_itself() {
        let (inst, _) = gen_motivating();
        let mu1 = IntegralMatching::new(vec![(0, 2), (1, 1), (2, 0)]).unwrap();
        let f = mu1.to_fractional(3).unwrap();
        match check_expost_stability(&inst, &f, DEFAULT_ENUM_CAP).unwrap() {
            ExPostResult::Decomposition(terms) => {
                assert_eq!(terms.len(), 1);
                assert_eq!(terms[0].0, int(1));
                assert_eq!(terms[0].1, mu1);
            }
            ExPostResult::NotExPost => panic!("stable integral matching is ex-post"),
        }
    }
}
