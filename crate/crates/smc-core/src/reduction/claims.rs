//! Evaluates the gadget propagation claims on a concrete matching: the
//! variable-gadget alternative, input-to-output connector propagation,
//! clause-to-CA propagation, and CA-to-accumulator forcing. The exact
//! reduction uses exact thresholds; the epsilon variant uses the tolerant
//! thresholds eps, beta eps and 3(beta^2 + 1) eps.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{check_stability, FractionalMatching, Rat};

use super::{ReductionArtifact, ReductionParams};

#[derive(Debug, Clone)]
pub struct VariableClaim {
    pub var: usize,
    /// Both literal men keep their gadget mass (the positive literal's
    /// input edges are forced to ~zero).
    pub cond_men: bool,
    /// Both gadget women keep their mass (the negative literal's inputs
    /// are forced to ~zero).
    pub cond_women: bool,
}

impl VariableClaim {
    pub fn holds(&self) -> bool {
        self.cond_men || self.cond_women
    }
}

#[derive(Debug, Clone)]
pub struct VcClaim {
    pub clause: usize,
    pub position: usize,
    pub input_weight: Rat,
    pub output_weights: Vec<Rat>,
    pub premise: bool,
    pub conclusion: bool,
}

impl VcClaim {
    pub fn holds(&self) -> bool {
        !self.premise || self.conclusion
    }
}

#[derive(Debug, Clone)]
pub struct ClauseClaim {
    pub clause: usize,
    pub ca_weight: Rat,
    pub premise: bool,
    pub conclusion: bool,
}

impl ClauseClaim {
    pub fn holds(&self) -> bool {
        !self.premise || self.conclusion
    }
}

#[derive(Debug, Clone)]
pub struct AccumulatorClaim {
    pub tine_total: Rat,
    pub premise: bool,
    pub conclusion: bool,
}

impl AccumulatorClaim {
    pub fn holds(&self) -> bool {
        !self.premise || self.conclusion
    }
}

/// Full claim evaluation over one matching. Claims are implications about
/// stable matchings, so `all_hold` is vacuously true when the matching is
/// not (eps-)stable.
#[derive(Debug, Clone)]
pub struct ClaimReport {
    pub epsilon: Rat,
    pub stable: bool,
    pub variables: Vec<VariableClaim>,
    pub connectors: Vec<VcClaim>,
    pub clauses: Vec<ClauseClaim>,
    pub accumulator: AccumulatorClaim,
}

impl ClaimReport {
    pub fn all_hold(&self) -> bool {
        !self.stable
            || (self.variables.iter().all(|c| c.holds())
                && self.connectors.iter().all(|c| c.holds())
                && self.clauses.iter().all(|c| c.holds())
                && self.accumulator.holds())
    }
}

/// Evaluates every claim instance on `mu` at tolerance `epsilon` (pass 0
/// for the exact reduction).
pub fn verify_gadget_claims(
    art: &ReductionArtifact,
    mu: &FractionalMatching,
    epsilon: &Rat,
) -> Result<ClaimReport> {
    if mu.n() != art.instance.n() {
        return Err(Error::DimensionMismatch(format!(
            "instance has n = {} but matching has n = {}",
            art.instance.n(),
            mu.n()
        )));
    }
    let one = Rat::one();
    let beta = match &art.params {
        ReductionParams::Thm6 { .. } => None,
        ReductionParams::AppC { beta, .. } => Some(beta.clone()),
    };
    // Threshold triple (input slack, output bound, CA bound).
    let (var_floor, input_bound, output_bound, ca_bound) = match &beta {
        None => (one.clone(), Rat::zero(), Rat::zero(), Rat::zero()),
        Some(b) => (
            &one - epsilon,
            epsilon.clone(),
            b * epsilon,
            (Rat::from_integer(3.into()) * b * b + Rat::from_integer(3.into())) * epsilon,
        ),
    };

    let stable = check_stability(&art.instance, mu, epsilon)?.is_stable();

    let variables = art
        .variables
        .iter()
        .enumerate()
        .map(|(x, g)| {
            let m1_mass =
                mu.weight(g.m1, g.w_bar1) + mu.weight(g.m1, g.w_bar2) + mu.weight(g.m1, g.f1);
            let m2_mass =
                mu.weight(g.m2, g.w_bar1) + mu.weight(g.m2, g.w_bar2) + mu.weight(g.m2, g.f2);
            let w1_mass =
                mu.weight(g.m1, g.w_bar1) + mu.weight(g.m2, g.w_bar1) + mu.weight(g.e3, g.w_bar1);
            let w2_mass =
                mu.weight(g.m1, g.w_bar2) + mu.weight(g.m2, g.w_bar2) + mu.weight(g.e3, g.w_bar2);
            VariableClaim {
                var: x,
                cond_men: m1_mass >= var_floor && m2_mass >= var_floor,
                cond_women: w1_mass >= var_floor && w2_mass >= var_floor,
            }
        })
        .collect();

    let connectors: Vec<VcClaim> = art
        .connectors
        .iter()
        .map(|vc| {
            let input_weight = mu.weight(vc.input.0, vc.input.1).clone();
            let output_weights: Vec<Rat> = vc
                .outputs
                .iter()
                .map(|&(m, w)| mu.weight(m, w).clone())
                .collect();
            let premise = input_weight <= input_bound;
            let conclusion = output_weights.iter().all(|w| w <= &output_bound);
            VcClaim {
                clause: vc.clause,
                position: vc.position,
                input_weight,
                output_weights,
                premise,
                conclusion,
            }
        })
        .collect();

    let clauses: Vec<ClauseClaim> = art
        .clauses
        .iter()
        .enumerate()
        .map(|(ci, g)| {
            let all_outputs_low = art
                .connectors
                .iter()
                .filter(|vc| vc.clause == ci)
                .all(|vc| {
                    vc.outputs
                        .iter()
                        .all(|&(m, w)| mu.weight(m, w) <= &output_bound)
                });
            let ca_weight = mu.weight(g.ca_cell.0, g.ca_cell.1).clone();
            ClauseClaim {
                clause: ci,
                premise: all_outputs_low,
                conclusion: ca_weight <= ca_bound,
                ca_weight,
            }
        })
        .collect();

    let tine_total: Rat = art
        .accumulator
        .tines
        .iter()
        .map(|&(m, w)| mu.weight(m, w))
        .sum();
    let accumulator = match &beta {
        None => {
            let premise = art
                .clauses
                .iter()
                .any(|g| mu.weight(g.ca_cell.0, g.ca_cell.1).is_zero());
            let balanced_full = art
                .accumulator
                .balanced_nontine
                .iter()
                .all(|&(m, w)| mu.weight(m, w) == &one);
            AccumulatorClaim {
                premise,
                conclusion: tine_total == one && balanced_full,
                tine_total,
            }
        }
        Some(_) => {
            let low_cas = art
                .clauses
                .iter()
                .filter(|g| mu.weight(g.ca_cell.0, g.ca_cell.1) <= &ca_bound)
                .count();
            let gamma_cell = art.accumulator.gamma_cell.expect("epsilon accumulator");
            let gamma_weight = mu.weight(gamma_cell.0, gamma_cell.1);
            AccumulatorClaim {
                premise: low_cas >= 2,
                conclusion: tine_total >= &one - epsilon && gamma_weight <= epsilon,
                tine_total,
            }
        }
    };

    Ok(ClaimReport {
        epsilon: epsilon.clone(),
        stable,
        variables,
        connectors,
        clauses,
        accumulator,
    })
}
