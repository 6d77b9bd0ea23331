//! Witness matchings for satisfiable formulas: the closed-form weight
//! patterns that make the compiled instance's accumulator pay out.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{int, rat, FractionalMatching, Rat};

use super::{ReductionArtifact, ReductionParams};

/// Builds the stable (resp. eps-stable) fractional matching associated
/// with a satisfying assignment. The assignment must cover the artifact's
/// effective formula; for the epsilon-stability variant use
/// `Formula2P2N::extend_assignment` to lift an assignment of the original
/// variables to the coupled copies.
///
/// Active literals are chosen as the lowest satisfied position per clause.
/// For the alpha in (3/2, 2) form the accumulator weight pattern requires
/// k >= 3; smaller k is rejected.
pub fn witness_from_assignment(
    art: &ReductionArtifact,
    assignment: &[bool],
) -> Result<FractionalMatching> {
    if assignment.len() != art.formula.num_vars() {
        return Err(Error::ParamDomain(format!(
            "assignment has {} values, expected {}",
            assignment.len(),
            art.formula.num_vars()
        )));
    }
    if !art.formula.is_satisfied_by(assignment) {
        return Err(Error::AssignmentDoesNotSatisfy);
    }
    let n = art.instance.n();
    let mut weights = vec![vec![Rat::zero(); n]; n];
    let half = rat(1, 2);
    let one = Rat::one();

    // Variable gadgets.
    for (x, g) in art.variables.iter().enumerate() {
        if assignment[x] {
            weights[g.m1][g.w_bar1] = half.clone();
            weights[g.e3][g.w_bar1] = half.clone();
            weights[g.e3][g.w_bar2] = half.clone();
            weights[g.m2][g.w_bar2] = half.clone();
            weights[g.e1][g.f1] = one.clone();
            weights[g.e2][g.f2] = one.clone();
        } else {
            weights[g.e3][g.w_bar1] = half.clone();
            weights[g.e3][g.w_bar2] = half.clone();
            weights[g.m1][g.f1] = one.clone();
            weights[g.m2][g.f2] = one.clone();
        }
    }

    // One active literal per clause: the lowest satisfied position.
    let active: Vec<usize> = art
        .formula
        .clauses()
        .iter()
        .map(|clause| {
            clause
                .iter()
                .position(|lit| assignment[lit.var] == lit.positive)
                .expect("assignment satisfies every clause")
        })
        .collect();

    // Clause gadgets and CA-connectors.
    for (ci, g) in art.clauses.iter().enumerate() {
        let mut inactive = (0..3).filter(|&p| p != active[ci]);
        let p1 = inactive.next().expect("two inactive positions");
        let p2 = inactive.next().expect("two inactive positions");
        weights[g.e1][g.w[p1]] = one.clone();
        weights[g.e2][g.w[p2]] = one.clone();
        weights[g.ca_cell.0][g.ca_cell.1] = one.clone();
    }

    // VC-connectors.
    let (alpha, big) = match &art.params {
        ReductionParams::Thm6 { alpha, k } => {
            if alpha < &int(2) && *k < 3 {
                return Err(Error::ParamDomain(
                    "the alpha in (3/2, 2) witness pattern needs k >= 3".into(),
                ));
            }
            (Some(alpha.clone()), alpha >= &int(2))
        }
        ReductionParams::AppC { .. } => (None, true),
    };
    for vc in &art.connectors {
        let is_active = active[vc.clause] == vc.position;
        if !is_active {
            for &(m, w) in &vc.balanced {
                weights[m][w] = one.clone();
            }
            continue;
        }
        match (&alpha, big, vc.literal.positive) {
            // Single woman-heavy edge: both the exact reduction with
            // alpha >= 2 and the epsilon-stability reduction.
            (_, true, true) => {
                weights[vc.input.0][vc.input.1] = half.clone();
            }
            (_, true, false) => {
                weights[vc.input.0][vc.input.1] = half.clone();
                weights[vc.outputs[0].0][vc.outputs[0].1] = half.clone();
            }
            (Some(a), false, true) => {
                let (mxi, wxc) = vc.input;
                let mxc = vc.internal_men[0];
                weights[mxi][wxc] = half.clone();
                weights[mxc][wxc] = &one - a / int(2);
                let (om, ow) = vc.outputs[0];
                weights[om][ow] = &one / a;
            }
            (Some(a), false, false) => {
                let m1 = vc.internal_men[0];
                let m2 = vc.internal_men[1];
                let m3 = vc.internal_men[2];
                let w1 = vc.internal_women[0];
                let w2 = vc.internal_women[1];
                weights[m1][vc.input.1] = half.clone();
                weights[m1][w1] = &one - a / int(2);
                weights[m1][w2] = (a - &one) / int(2);
                weights[m2][w2] = &one - (a * a - a) / int(2);
                weights[m2][vc.outputs[0].1] = int(2) / a - &one;
                weights[m3][w1] = &one / a;
                weights[m3][vc.outputs[1].1] = &one - &one / a;
            }
            (None, false, _) => unreachable!("epsilon variant always takes the big shape"),
        }
    }

    // Accumulator.
    let acc = &art.accumulator;
    match &art.params {
        ReductionParams::AppC { .. } => {
            let (m1, w1) = acc
                .gamma_cell
                .expect("epsilon accumulator has its gamma edge");
            weights[m1][w1] = one.clone();
        }
        ReductionParams::Thm6 { alpha, k } => {
            let a = alpha;
            let k = *k;
            if big {
                let inv = &one / a;
                let slack = &one - int(2) * &inv;
                for i in 1..=k {
                    weights[acc.m[i - 1]][acc.w[i - 1]] = inv.clone();
                }
                for i in 1..k {
                    weights[acc.e2[i - 1]][acc.w[i - 1]] = slack.clone();
                    weights[acc.m[i]][acc.w[i - 1]] = inv.clone();
                    weights[acc.e1[i - 1]][acc.f1[i - 1]] = one.clone();
                }
                for i in 2..=k {
                    weights[acc.m[i - 1]][acc.f3[i - 2]] = slack.clone();
                    weights[acc.e3[i - 2]][acc.f2[i - 2]] = one.clone();
                }
            } else {
                let inv = &one / a;
                weights[acc.m[0]][acc.w[0]] = inv.clone();
                weights[acc.m[1]][acc.w[1]] = a + &inv - int(2);
                for i in 3..=k {
                    weights[acc.m[i - 1]][acc.w[i - 1]] = &one - &inv;
                }
                for i in 1..k {
                    weights[acc.m[i]][acc.w[i - 1]] = &one - &inv;
                }
                weights[acc.m[1]][acc.f2[0]] = int(2) - a;
                weights[acc.e1[0]][acc.f1[0]] = a - &one;
                weights[acc.e2[0]][acc.f2[0]] = a - int(2) * &inv;
                weights[acc.e2[k - 2]][acc.f2[k - 2]] = one.clone();
                for i in 2..k {
                    weights[acc.e1[i - 1]][acc.f1[i - 1]] = int(2) - int(2) * &inv;
                }
                for i in 3..k {
                    weights[acc.e2[i - 2]][acc.f2[i - 2]] = int(2) - int(2) * &inv;
                }
                weights[acc.e1[0]][acc.w[1]] = int(2) - a;
                for i in 2..k {
                    weights[acc.e1[i - 1]][acc.w[i]] = int(2) * &inv - &one;
                    weights[acc.m[i]][acc.f2[i - 2]] = int(2) * &inv - &one;
                }
            }
        }
    }

    FractionalMatching::new(weights)
}

/// Exact welfare contributed by the accumulator's own edges under `mu`.
pub fn accumulator_contribution(art: &ReductionArtifact, mu: &FractionalMatching) -> Rat {
    art.accumulator
        .cells
        .iter()
        .map(|&(m, w)| (art.instance.u(m, w) + art.instance.v(m, w)) * mu.weight(m, w))
        .sum()
}

/// Closed-form accumulator contribution of the witness:
/// `4(k-1)(alpha - 1/2) + 1` for alpha >= 2,
/// `4(k-1)(alpha - 1/2) + 2 alpha^2 - 7 alpha + 7` for alpha in (3/2, 2)
/// (valid for the k >= 3 domain of that pattern), and `gamma` for the
/// epsilon-stability variant.
pub fn accumulator_closed_form(params: &ReductionParams) -> Rat {
    match params {
        ReductionParams::Thm6 { alpha, k } => {
            let base = int(4 * (*k as i64 - 1)) * (alpha - rat(1, 2));
            if alpha >= &int(2) {
                base + int(1)
            } else {
                base + int(2) * alpha * alpha - int(7) * alpha + int(7)
            }
        }
        ReductionParams::AppC { gamma, .. } => gamma.clone(),
    }
}
