//! Exact rational LP core and the exponential exact solvers: threshold
//! enumeration (at most O(n^n) LPs) and binary-variable enumeration
//! (2^(n^2) LPs), plus the polynomial half-stable relaxation.

mod simplex;

pub use simplex::{
    simplex_solve, Constraint, LinearProgram, Relation, SimplexOutcome, SimplexSolution,
};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{rat, utilities, FractionalMatching, Rat, SmcInstance, UtilityProfile};

/// Default size cap for the threshold-enumeration solver.
pub const DEFAULT_THRESH_CAP: usize = 6;
/// Default size cap for the binary-variable enumeration solver.
pub const DEFAULT_MILP_CAP: usize = 4;

/// Per-agent utility lower bounds driving one threshold LP.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ThresholdVector {
    pub men: Vec<Rat>,
    pub women: Vec<Rat>,
}

impl ThresholdVector {
    /// A threshold set is stability-preserving (generalized to eps) when
    /// every pair has theta_m >= (1-eps) U(m,w) or theta_w >= (1-eps) V(m,w).
    pub fn is_stability_preserving(&self, inst: &SmcInstance, epsilon: &Rat) -> bool {
        let scale = Rat::one() - epsilon;
        (0..inst.n()).all(|m| {
            (0..inst.n()).all(|w| {
                self.men[m] >= &scale * inst.u(m, w) || self.women[w] >= &scale * inst.v(m, w)
            })
        })
    }
}

/// Stability certificate attached to a solver result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveCertificate {
    pub epsilon: Rat,
    pub kind: CertificateKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateKind {
    Thresholds(ThresholdVector),
    YAssignment(Vec<Vec<bool>>),
}

impl SolveCertificate {
    /// Checks that the profile meets the certificate and that the
    /// certificate itself forces (eps-)stability.
    pub fn verify(&self, inst: &SmcInstance, profile: &UtilityProfile) -> bool {
        match &self.kind {
            CertificateKind::Thresholds(t) => {
                let met = (0..inst.n()).all(|m| profile.men[m] >= t.men[m])
                    && (0..inst.n()).all(|w| profile.women[w] >= t.women[w]);
                met && t.is_stability_preserving(inst, &self.epsilon)
            }
            CertificateKind::YAssignment(y) => {
                let scale = Rat::one() - &self.epsilon;
                (0..inst.n()).all(|m| {
                    (0..inst.n()).all(|w| {
                        if y[m][w] {
                            profile.men[m] >= &scale * inst.u(m, w)
                        } else {
                            profile.women[w] >= &scale * inst.v(m, w)
                        }
                    })
                })
            }
        }
    }
}

/// Solver output: the optimal matching found, its utilities, the
/// certificate proving stability, and how many LPs were solved.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub matching: FractionalMatching,
    pub profile: UtilityProfile,
    pub certificate: SolveCertificate,
    pub subproblems_solved: usize,
}

impl SolveResult {
    pub fn welfare(&self) -> &Rat {
        &self.profile.welfare
    }
}

/// Builds the threshold LP over the n^2 matching weights: utility rows are
/// substituted into the threshold and objective rows, and vacuous
/// zero-threshold rows are omitted.
pub fn build_opt_thresh(inst: &SmcInstance, theta: &ThresholdVector) -> LinearProgram {
    let n = inst.n();
    let var = |m: usize, w: usize| m * n + w;
    let mut constraints = Vec::new();
    for m in 0..n {
        if theta.men[m].is_zero() {
            continue;
        }
        let mut coeffs = vec![Rat::zero(); n * n];
        for w in 0..n {
            coeffs[var(m, w)] = inst.u(m, w).clone();
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Ge,
            rhs: theta.men[m].clone(),
        });
    }
    for w in 0..n {
        if theta.women[w].is_zero() {
            continue;
        }
        let mut coeffs = vec![Rat::zero(); n * n];
        for m in 0..n {
            coeffs[var(m, w)] = inst.v(m, w).clone();
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Ge,
            rhs: theta.women[w].clone(),
        });
    }
    for m in 0..n {
        let mut coeffs = vec![Rat::zero(); n * n];
        for w in 0..n {
            coeffs[var(m, w)] = Rat::one();
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs: Rat::one(),
        });
    }
    for w in 0..n {
        let mut coeffs = vec![Rat::zero(); n * n];
        for m in 0..n {
            coeffs[var(m, w)] = Rat::one();
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs: Rat::one(),
        });
    }
    let objective = (0..n * n)
        .map(|k| inst.u(k / n, k % n) + inst.v(k / n, k % n))
        .collect();
    LinearProgram {
        objective,
        constraints,
    }
}

/// Completes a men-threshold tuple to the minimal stability-preserving
/// women thresholds: theta_w is the largest (1-eps) V(m,w) among pairs the
/// men thresholds leave uncovered.
fn complete_women(inst: &SmcInstance, men: &[Rat], scale: &Rat) -> Vec<Rat> {
    let n = inst.n();
    (0..n)
        .map(|w| {
            let mut theta = Rat::zero();
            for m in 0..n {
                let su = scale * inst.u(m, w);
                if men[m] < su {
                    let sv = scale * inst.v(m, w);
                    if sv > theta {
                        theta = sv;
                    }
                }
            }
            theta
        })
        .collect()
}

/// Enumerates every threshold tuple with theta_m drawn from the scaled row
/// values of U (plus zero), each completed to the minimal
/// stability-preserving women thresholds. Tuples are yielded in
/// lexicographic order of the men thresholds, deduplicated by value.
pub fn enumerate_thresholds<'a>(
    inst: &'a SmcInstance,
    epsilon: &Rat,
    cap: usize,
) -> Result<impl Iterator<Item = ThresholdVector> + 'a> {
    let n = inst.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if epsilon < &Rat::zero() || epsilon >= &Rat::one() {
        return Err(Error::EpsilonOutOfRange(format!("{epsilon} not in [0, 1)")));
    }
    let scale = Rat::one() - epsilon;
    let candidates: Vec<Vec<Rat>> = (0..n)
        .map(|m| {
            let mut values: Vec<Rat> = (0..n).map(|w| &scale * inst.u(m, w)).collect();
            values.push(Rat::zero());
            values.sort();
            values.dedup();
            values
        })
        .collect();
    let mut odometer = vec![0usize; n];
    let mut done = false;
    let scale2 = scale;
    Ok(std::iter::from_fn(move || {
        if done {
            return None;
        }
        let men: Vec<Rat> = odometer
            .iter()
            .enumerate()
            .map(|(m, &i)| candidates[m][i].clone())
            .collect();
        let women = complete_women(inst, &men, &scale2);
        // Advance the odometer, least-significant position last.
        let mut pos = n;
        loop {
            if pos == 0 {
                done = true;
                break;
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < candidates[pos].len() {
                break;
            }
            odometer[pos] = 0;
        }
        Some(ThresholdVector { men, women })
    }))
}

fn matching_from_values(values: &[Rat], n: usize) -> Result<FractionalMatching> {
    let weights: Vec<Vec<Rat>> = (0..n)
        .map(|m| values[m * n..(m + 1) * n].to_vec())
        .collect();
    FractionalMatching::new(weights)
}

struct Best {
    welfare: Rat,
    tuple_index: usize,
    values: Vec<Rat>,
    theta: ThresholdVector,
}

fn scan_tuples(inst: &SmcInstance, tuples: &[(usize, ThresholdVector)]) -> (Option<Best>, usize) {
    let mut best: Option<Best> = None;
    let mut solved = 0usize;
    for (index, theta) in tuples {
        let lp = build_opt_thresh(inst, theta);
        solved += 1;
        if let SimplexOutcome::Optimal(sol) = simplex_solve(&lp) {
            let better = match &best {
                None => true,
                Some(b) => {
                    sol.objective > b.welfare
                        || (sol.objective == b.welfare && *index < b.tuple_index)
                }
            };
            if better {
                best = Some(Best {
                    welfare: sol.objective,
                    tuple_index: *index,
                    values: sol.values,
                    theta: theta.clone(),
                });
            }
        }
    }
    (best, solved)
}

fn merge_best(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.welfare > x.welfare || (y.welfare == x.welfare && y.tuple_index < x.tuple_index) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Maximizes welfare over every enumerated threshold LP. Ties between
/// equally optimal tuples go to the lexicographically smallest threshold
/// vector, so the result is deterministic and scheduling-independent.
pub fn solve_exact_thresh(inst: &SmcInstance, epsilon: &Rat, cap: usize) -> Result<SolveResult> {
    solve_exact_thresh_jobs(inst, epsilon, cap, 1)
}

/// Parallel variant of [`solve_exact_thresh`]; the answer does not depend
/// on `jobs`.
pub fn solve_exact_thresh_jobs(
    inst: &SmcInstance,
    epsilon: &Rat,
    cap: usize,
    jobs: usize,
) -> Result<SolveResult> {
    let tuples: Vec<(usize, ThresholdVector)> = enumerate_thresholds(inst, epsilon, cap)?
        .enumerate()
        .collect();
    let jobs = jobs.max(1).min(tuples.len().max(1));
    let (best, solved) = if jobs == 1 {
        scan_tuples(inst, &tuples)
    } else {
        let chunk = tuples.len().div_ceil(jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = tuples
                .chunks(chunk)
                .map(|slice| scope.spawn(move || scan_tuples(inst, slice)))
                .collect();
            let mut best = None;
            let mut solved = 0usize;
            for h in handles {
                let (b, s) = h.join().expect("solver thread never panics");
                best = merge_best(best, b);
                solved += s;
            }
            (best, solved)
        })
    };
    let best = best.expect("a stable fractional matching always exists");
    let matching = matching_from_values(&best.values, inst.n())?;
    let profile = utilities(inst, &matching)?;
    Ok(SolveResult {
        matching,
        profile,
        certificate: SolveCertificate {
            epsilon: epsilon.clone(),
            kind: CertificateKind::Thresholds(best.theta),
        },
        subproblems_solved: solved,
    })
}

/// Enumerates the 2^(n^2) binary stability assignments, solving one LP per
/// distinct induced threshold tuple. Exact-stability only.
pub fn solve_exact_milp(inst: &SmcInstance, cap: usize) -> Result<SolveResult> {
    let n = inst.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let cells = n * n;
    assert!(
        cells <= 63,
        "binary enumeration is capped well below 63 cells"
    );
    let mut seen = std::collections::BTreeSet::new();
    let mut best: Option<(Rat, Vec<Rat>, u64)> = None;
    let mut solved = 0usize;
    for mask in 0u64..(1u64 << cells) {
        let y = |m: usize, w: usize| mask >> (m * n + w) & 1 == 1;
        let men: Vec<Rat> = (0..n)
            .map(|m| {
                (0..n)
                    .filter(|&w| y(m, w))
                    .map(|w| inst.u(m, w).clone())
                    .max()
                    .unwrap_or_else(Rat::zero)
            })
            .collect();
        let women: Vec<Rat> = (0..n)
            .map(|w| {
                (0..n)
                    .filter(|&m| !y(m, w))
                    .map(|m| inst.v(m, w).clone())
                    .max()
                    .unwrap_or_else(Rat::zero)
            })
            .collect();
        let theta = ThresholdVector { men, women };
        if !seen.insert(theta.clone()) {
            continue;
        }
        let lp = build_opt_thresh(inst, &theta);
        solved += 1;
        if let SimplexOutcome::Optimal(sol) = simplex_solve(&lp) {
            let better = best.as_ref().is_none_or(|(w, _, _)| &sol.objective > w);
            if better {
                best = Some((sol.objective, sol.values, mask));
            }
        }
    }
    let (_, values, mask) = best.expect("a stable fractional matching always exists");
    let matching = matching_from_values(&values, n)?;
    let profile = utilities(inst, &matching)?;
    let y_matrix: Vec<Vec<bool>> = (0..n)
        .map(|m| (0..n).map(|w| mask >> (m * n + w) & 1 == 1).collect())
        .collect();
    Ok(SolveResult {
        matching,
        profile,
        certificate: SolveCertificate {
            epsilon: Rat::zero(),
            kind: CertificateKind::YAssignment(y_matrix),
        },
        subproblems_solved: solved,
    })
}

/// Relaxes the binary stability variables to [0, 1] and eliminates them:
/// each heavy pair contributes the single linear constraint
/// `V(m,w) u_m + U(m,w) v_w >= U(m,w) V(m,w)`. The optimum is 1/2-stable
/// with welfare at least that of any exactly stable fractional matching.
pub fn solve_half_stable(inst: &SmcInstance) -> Result<SolveResult> {
    let n = inst.n();
    let var = |m: usize, w: usize| m * n + w;
    let mut constraints = Vec::new();
    for m in 0..n {
        for w in 0..n {
            if !inst.is_heavy(m, w) {
                continue;
            }
            let (uv, vw) = (inst.u(m, w), inst.v(m, w));
            let mut coeffs = vec![Rat::zero(); n * n];
            for w2 in 0..n {
                coeffs[var(m, w2)] += vw * inst.u(m, w2);
            }
            for m2 in 0..n {
                coeffs[var(m2, w)] += uv * inst.v(m2, w);
            }
            constraints.push(Constraint {
                coeffs,
                relation: Relation::Ge,
                rhs: uv * vw,
            });
        }
    }
    for m in 0..n {
        let mut coeffs = vec![Rat::zero(); n * n];
        for w in 0..n {
            coeffs[var(m, w)] = Rat::one();
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs: Rat::one(),
        });
    }
    for w in 0..n {
        let mut coeffs = vec![Rat::zero(); n * n];
        for m in 0..n {
            coeffs[var(m, w)] = Rat::one();
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs: Rat::one(),
        });
    }
    let objective = (0..n * n)
        .map(|k| inst.u(k / n, k % n) + inst.v(k / n, k % n))
        .collect();
    let lp = LinearProgram {
        objective,
        constraints,
    };
    let sol = simplex_solve(&lp)
        .optimal()
        .expect("the relaxation is feasible: a stable matching satisfies it");
    let matching = matching_from_values(&sol.values, n)?;
    let profile = utilities(inst, &matching)?;
    let theta = ThresholdVector {
        men: profile.men.clone(),
        women: profile.women.clone(),
    };
    Ok(SolveResult {
        matching,
        profile,
        certificate: SolveCertificate {
            epsilon: rat(1, 2),
            kind: CertificateKind::Thresholds(theta),
        },
        subproblems_solved: 1,
    })
}
