//! Named instance constructions and random instance families, each emitted
//! together with its witness matching where one exists. Witness matchings
//! are built directly from the closed-form weight patterns so downstream
//! tests never have to re-derive them.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{
    int, rat, AgentLabels, FractionalMatching, IntegralMatching, Rat, SmcInstance,
};

/// The 3x3 motivating instance together with the stable fractional witness
/// `1/2 mu2 + 1/2 mu3` of welfare 15/2.
pub fn gen_motivating() -> (SmcInstance, FractionalMatching) {
    let u = vec![
        vec![int(0), int(1), int(2)],
        vec![int(2), int(1), int(0)],
        vec![int(1), int(0), int(3)],
    ];
    let v = vec![
        vec![int(3), int(0), int(1)],
        vec![int(0), int(1), int(2)],
        vec![int(1), int(2), int(0)],
    ];
    let inst = SmcInstance::new(u, v).unwrap();
    let mu2 = IntegralMatching::new(vec![(0, 0), (1, 2), (2, 1)]).unwrap();
    let mu3 = IntegralMatching::new(vec![(0, 0), (1, 1), (2, 2)]).unwrap();
    let witness = FractionalMatching::combine(&[(rat(1, 2), &mu2), (rat(1, 2), &mu3)], 3).unwrap();
    (inst, witness)
}

/// The welfare-gap family: a chain of k man/woman pairs guarded by
/// auxiliary agents, in which every stable integral matching has welfare
/// at most 4k - 6 + alpha while the emitted fractional witness reaches
/// 4k(alpha - 1/2) - 5 alpha + 3.
pub fn gen_gap(alpha: &Rat, k: usize) -> Result<(SmcInstance, FractionalMatching)> {
    if alpha < &int(2) {
        return Err(Error::ParamDomain(format!(
            "gap family needs alpha >= 2, got {alpha}"
        )));
    }
    if k < 2 {
        return Err(Error::ParamDomain(format!(
            "gap family needs k >= 2, got {k}"
        )));
    }
    // Men: m_1..m_k, e1_1..e1_{k-1}, e2_1..e2_{k-1}, e3_2..e3_k.
    // Women: w_1..w_k, f1_2..f1_{k-1}, f2_2..f2_k, f3_2..f3_k, one pad.
    let m_idx = |i: usize| i - 1;
    let e1_idx = |i: usize| k + (i - 1);
    let e2_idx = |i: usize| k + (k - 1) + (i - 1);
    let e3_idx = |i: usize| k + 2 * (k - 1) + (i - 2);
    let w_idx = |i: usize| i - 1;
    let f1_idx = |i: usize| k + (i - 2);
    let f2_idx = |i: usize| k + k.saturating_sub(2) + (i - 2);
    let f3_idx = |i: usize| k + k.saturating_sub(2) + (k - 1) + (i - 2);
    let n = 4 * k - 3;

    let mut men_labels = Vec::with_capacity(n);
    let mut women_labels = Vec::with_capacity(n);
    for i in 1..=k {
        men_labels.push(format!("m{i}"));
    }
    for i in 1..k {
        men_labels.push(format!("e1_{i}"));
    }
    for i in 1..k {
        men_labels.push(format!("e2_{i}"));
    }
    for i in 2..=k {
        men_labels.push(format!("e3_{i}"));
    }
    for i in 1..=k {
        women_labels.push(format!("w{i}"));
    }
    for i in 2..k {
        women_labels.push(format!("f1_{i}"));
    }
    for i in 2..=k {
        women_labels.push(format!("f2_{i}"));
    }
    for i in 2..=k {
        women_labels.push(format!("f3_{i}"));
    }
    women_labels.push("pad_w1".to_string());

    let mut u = vec![vec![Rat::zero(); n]; n];
    let mut v = vec![vec![Rat::zero(); n]; n];
    let set =
        |u_: &mut Vec<Vec<Rat>>, v_: &mut Vec<Vec<Rat>>, m: usize, w: usize, a: Rat, b: Rat| {
            u_[m][w] = a;
            v_[m][w] = b;
        };
    for i in 1..=k {
        set(&mut u, &mut v, m_idx(i), w_idx(i), int(0), alpha.clone());
    }
    for i in 2..=k {
        set(&mut u, &mut v, m_idx(i), f3_idx(i), int(0), alpha.clone());
    }
    for i in 2..k {
        set(&mut u, &mut v, e1_idx(i), f1_idx(i), int(0), alpha.clone());
    }
    for i in 1..k {
        set(
            &mut u,
            &mut v,
            m_idx(i + 1),
            w_idx(i),
            alpha.clone(),
            int(0),
        );
        set(&mut u, &mut v, e2_idx(i), w_idx(i), alpha.clone(), int(0));
        set(&mut u, &mut v, e1_idx(i), w_idx(i), int(1), int(1));
    }
    for i in 2..=k {
        set(&mut u, &mut v, e3_idx(i), f2_idx(i), alpha.clone(), int(0));
        set(&mut u, &mut v, m_idx(i), f2_idx(i), int(1), int(1));
    }
    let inst = SmcInstance::with_labels(
        u,
        v,
        AgentLabels {
            men: men_labels,
            women: women_labels,
        },
    )?;

    let inv_alpha = Rat::one() / alpha;
    let slack = Rat::one() - int(2) * &inv_alpha;
    let mut w = vec![vec![Rat::zero(); n]; n];
    for i in 1..=k {
        w[m_idx(i)][w_idx(i)] = inv_alpha.clone();
    }
    for i in 1..k {
        w[e2_idx(i)][w_idx(i)] = slack.clone();
        w[m_idx(i + 1)][w_idx(i)] = inv_alpha.clone();
    }
    for i in 2..=k {
        w[m_idx(i)][f3_idx(i)] = slack.clone();
        w[e3_idx(i)][f2_idx(i)] = Rat::one();
    }
    for i in 2..k {
        w[e1_idx(i)][f1_idx(i)] = Rat::one();
    }
    let witness = FractionalMatching::new(w)?;
    Ok((inst, witness))
}

/// Closed-form welfare of the [`gen_gap`] witness: 4k(alpha - 1/2) - 5 alpha + 3.
pub fn gap_witness_welfare(alpha: &Rat, k: usize) -> Rat {
    int(4 * k as i64) * (alpha - rat(1, 2)) - int(5) * alpha + int(3)
}

/// Closed-form bound on stable integral welfare in the gap family: 4k - 6 + alpha.
pub fn gap_integral_bound(alpha: &Rat, k: usize) -> Rat {
    int(4 * k as i64 - 6) + alpha
}

/// Binary 3x3 instance whose stable set is non-convex: both returned
/// integral matchings are stable while their midpoint has the blocking
/// pair (m2, w2).
pub fn gen_nonconvex() -> (SmcInstance, IntegralMatching, IntegralMatching) {
    let u = vec![
        vec![int(0), int(0), int(1)],
        vec![int(1), int(1), int(0)],
        vec![int(0), int(1), int(0)],
    ];
    let v = vec![
        vec![int(0), int(1), int(0)],
        vec![int(0), int(1), int(1)],
        vec![int(1), int(0), int(0)],
    ];
    let inst = SmcInstance::new(u, v).unwrap();
    let mu1 = IntegralMatching::new(vec![(0, 2), (1, 0), (2, 1)]).unwrap();
    let mu2 = IntegralMatching::new(vec![(0, 1), (1, 2), (2, 0)]).unwrap();
    (inst, mu1, mu2)
}

/// Ternary 3x3 instance (alpha >= 3) with a stable fractional witness
/// supported entirely on unstable integral matchings; the witness puts
/// weight 0 on (m1, w1), the unique stable integral matching's pair.
pub fn gen_unstable_support(alpha: &Rat) -> Result<(SmcInstance, FractionalMatching)> {
    if alpha < &int(3) {
        return Err(Error::ParamDomain(format!(
            "unstable-support family needs alpha >= 3, got {alpha}"
        )));
    }
    let a = alpha.clone();
    let u = vec![
        vec![int(1), int(0), int(0)],
        vec![int(0), int(1), a.clone()],
        vec![a.clone(), int(0), int(1)],
    ];
    let v = vec![
        vec![int(1), int(0), a.clone()],
        vec![a.clone(), int(1), int(0)],
        vec![int(0), int(0), int(1)],
    ];
    let inst = SmcInstance::new(u, v).unwrap();
    let mu2 = IntegralMatching::new(vec![(0, 1), (1, 2), (2, 0)]).unwrap();
    let mu3 = IntegralMatching::new(vec![(0, 2), (1, 0), (2, 1)]).unwrap();
    let mu5 = IntegralMatching::new(vec![(0, 2), (1, 1), (2, 0)]).unwrap();
    let am1 = alpha - Rat::one();
    let l2 = Rat::one() / (alpha * &am1);
    let l3 = Rat::one() / alpha;
    let l5 = (alpha - int(2)) / &am1;
    let witness = FractionalMatching::combine(&[(l2, &mu2), (l3, &mu3), (l5, &mu5)], 3)?;
    Ok((inst, witness))
}

/// The support-size lower-bound family for odd n: alpha is the smallest
/// integer strictly exceeding max(n + 2, 2n / (rho (n - 1))), and the
/// witness combines (n+1)/2 swap matchings with the optimal matching,
/// giving a stable matching of support (n+3)/2 and welfare > (n-1) alpha.
pub fn gen_support_lb(n: usize, rho: &Rat) -> Result<(SmcInstance, FractionalMatching)> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::ParamDomain(format!(
            "support-lb family needs odd n >= 3, got {n}"
        )));
    }
    if rho <= &Rat::zero() || rho > &Rat::one() {
        return Err(Error::ParamDomain(format!(
            "rho must lie in (0, 1], got {rho}"
        )));
    }
    let bound_a = int(n as i64 + 2);
    let bound_b = int(2 * n as i64) / (rho * int(n as i64 - 1));
    let bound = bound_a.max(bound_b);
    let alpha = bound.floor() + Rat::one();
    let a = alpha.clone();

    let mut u = vec![vec![Rat::zero(); n]; n];
    let mut v = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        u[i][i] = Rat::one();
        v[i][i] = Rat::one();
    }
    let half = (n - 1) / 2;
    for i in 1..=half {
        // 1-based m_{2i}, m_{2i+1}, w_1, w_{2i}, w_{2i+1}.
        u[2 * i - 1][0] = a.clone();
        u[2 * i][2 * i - 1] = a.clone();
        v[2 * i - 1][2 * i] = a.clone();
    }
    v[n - 1][0] = a.clone();
    let inst = SmcInstance::new(u, v)?;

    let mut opt_pairs = vec![(0usize, 0usize)];
    for i in 1..=half {
        opt_pairs.push((2 * i - 1, 2 * i));
        opt_pairs.push((2 * i, 2 * i - 1));
    }
    let mu_opt = IntegralMatching::new(opt_pairs.clone())?;

    let swap = |drop: [(usize, usize); 2], add: [(usize, usize); 2]| -> Result<IntegralMatching> {
        let mut pairs: Vec<(usize, usize)> = opt_pairs
            .iter()
            .copied()
            .filter(|p| !drop.contains(p))
            .collect();
        pairs.extend_from_slice(&add);
        IntegralMatching::new(pairs)
    };
    let mut terms: Vec<(Rat, IntegralMatching)> = Vec::new();
    let inv_alpha = Rat::one() / &alpha;
    for i in 1..=half {
        let mi = swap([(0, 0), (2 * i - 1, 2 * i)], [(0, 2 * i), (2 * i - 1, 0)])?;
        terms.push((inv_alpha.clone(), mi));
    }
    let last = swap([(0, 0), (n - 1, n - 2)], [(0, n - 2), (n - 1, 0)])?;
    terms.push((inv_alpha.clone(), last));
    let lambda_opt = Rat::one() - int(n as i64 + 1) / (int(2) * &alpha);
    terms.push((lambda_opt, mu_opt));
    let borrowed: Vec<(Rat, &IntegralMatching)> =
        terms.iter().map(|(l, m)| (l.clone(), m)).collect();
    let witness = FractionalMatching::combine(&borrowed, n)?;
    Ok((inst, witness))
}

/// Chosen alpha for [`gen_support_lb`], exposed for tests.
pub fn support_lb_alpha(n: usize, rho: &Rat) -> Rat {
    let bound = int(n as i64 + 2).max(int(2 * n as i64) / (rho * int(n as i64 - 1)));
    bound.floor() + Rat::one()
}

/// The 2x2 instance whose unique optimal integral matching is unstable and
/// whose unique optimal stable fractional matching is the anti-diagonal.
pub fn gen_2x2_example() -> SmcInstance {
    let u = vec![vec![int(2), int(0)], vec![int(1), int(0)]];
    let v = vec![vec![int(0), int(0)], vec![int(1), int(2)]];
    SmcInstance::new(u, v).unwrap()
}

/// Cardinal realization of the rotating 3x3 ordinal counterexample: the
/// uniform mix of the three stable integral matchings gives every agent
/// utility exactly 1 and stays stable despite violating strong stability.
pub fn gen_rotating() -> (SmcInstance, FractionalMatching) {
    let u = vec![
        vec![int(2), int(1), int(0)],
        vec![int(0), int(2), int(1)],
        vec![int(1), int(0), int(2)],
    ];
    let v = vec![
        vec![int(0), int(1), int(2)],
        vec![int(2), int(0), int(1)],
        vec![int(1), int(2), int(0)],
    ];
    let inst = SmcInstance::new(u, v).unwrap();
    let m1 = IntegralMatching::new(vec![(0, 0), (1, 1), (2, 2)]).unwrap();
    let m2 = IntegralMatching::new(vec![(0, 2), (1, 0), (2, 1)]).unwrap();
    let m3 = IntegralMatching::new(vec![(0, 1), (1, 2), (2, 0)]).unwrap();
    let third = rat(1, 3);
    let witness = FractionalMatching::combine(
        &[(third.clone(), &m1), (third.clone(), &m2), (third, &m3)],
        3,
    )
    .unwrap();
    (inst, witness)
}

/// Random instance distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RandomFamily {
    Binary,
    Ternary {
        alpha: Rat,
    },
    SymmetricTernary {
        alpha: Rat,
    },
    /// Entries p/q with p in 0..=max and q in 1..=10, uniform.
    General {
        max: u32,
    },
}

/// Deterministic for a fixed seed: same seed, same instance.
pub fn gen_random(n: usize, family: &RandomFamily, seed: u64) -> SmcInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| -> Rat {
        match family {
            RandomFamily::Binary => int(rng.gen_range(0..2)),
            RandomFamily::Ternary { alpha } | RandomFamily::SymmetricTernary { alpha } => {
                match rng.gen_range(0..3) {
                    0 => Rat::zero(),
                    1 => Rat::one(),
                    _ => alpha.clone(),
                }
            }
            RandomFamily::General { max } => {
                let p = rng.gen_range(0..=*max) as i64;
                let q = rng.gen_range(1..=10i64);
                rat(p, q)
            }
        }
    };
    let u: Vec<Vec<Rat>> = (0..n)
        .map(|_| (0..n).map(|_| sample(&mut rng)).collect())
        .collect();
    let v = match family {
        RandomFamily::SymmetricTernary { .. } => u.clone(),
        _ => (0..n)
            .map(|_| (0..n).map(|_| sample(&mut rng)).collect())
            .collect(),
    };
    SmcInstance::new(u, v).expect("sampled valuations are non-negative")
}

/// True when all entries of the witness are non-negative with row and
/// column sums at most one; used by the generator sweep tests.
pub fn witness_is_feasible(mu: &FractionalMatching) -> bool {
    let one = Rat::one();
    (0..mu.n()).all(|i| {
        mu.row_sum(i) <= one
            && mu.col_sum(i) <= one
            && mu.weights()[i].iter().all(|x| !x.is_negative())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{check_stability, utilities, welfare_of_pairs};

    #[test]
    fn motivating_rows_match_edge_labels() {
        let (inst, witness) = gen_motivating();
        assert_eq!(inst.u_matrix()[0], vec![int(0), int(1), int(2)]);
        assert_eq!(inst.v_matrix()[0], vec![int(3), int(0), int(1)]);
        assert_eq!(inst.u_matrix()[2], vec![int(1), int(0), int(3)]);
        let p = utilities(&inst, &witness).unwrap();
        assert_eq!(p.welfare, rat(15, 2));
        assert!(check_stability(&inst, &witness, &int(0))
            .unwrap()
            .is_stable());
    }

    #[test]
    fn gap_witness_welfare_and_utilities() {
        let alpha = int(3);
        let (inst, witness) = gen_gap(&alpha, 3).unwrap();
        let p = utilities(&inst, &witness).unwrap();
        assert_eq!(p.welfare, int(18));
        assert_eq!(p.welfare, gap_witness_welfare(&alpha, 3));
        assert!(check_stability(&inst, &witness, &int(0))
            .unwrap()
            .is_stable());
        // v_{w_i} = 1 for every i, u_{m_i} = 1 for i >= 2; m_1 has no
        // positively valued pair, so u_{m_1} = 0.
        for i in 0..3 {
            assert_eq!(p.women[i], int(1));
        }
        assert_eq!(p.men[0], int(0));
        assert_eq!(p.men[1], int(1));
        assert_eq!(p.men[2], int(1));
    }

    #[test]
    fn gap_feasibility_sweep() {
        for alpha in [int(2), rat(5, 2), int(3), int(10)] {
            for k in 2..=12 {
                let (inst, witness) = gen_gap(&alpha, k).unwrap();
                assert!(witness_is_feasible(&witness), "alpha={alpha} k={k}");
                assert!(
                    check_stability(&inst, &witness, &int(0))
                        .unwrap()
                        .is_stable(),
                    "alpha={alpha} k={k}"
                );
                let p = utilities(&inst, &witness).unwrap();
                assert_eq!(
                    p.welfare,
                    gap_witness_welfare(&alpha, k),
                    "alpha={alpha} k={k}"
                );
            }
        }
    }

    #[test]
    fn gap_rejects_bad_parameters() {
        assert!(gen_gap(&rat(3, 2), 3).is_err());
        assert!(gen_gap(&int(2), 1).is_err());
    }

    #[test]
    fn nonconvex_endpoints_stable() {
        let (inst, mu1, mu2) = gen_nonconvex();
        for m in [&mu1, &mu2] {
            let f = m.to_fractional(3).unwrap();
            assert!(check_stability(&inst, &f, &int(0)).unwrap().is_stable());
        }
        let mid = FractionalMatching::blend(
            &mu1.to_fractional(3).unwrap(),
            &mu2.to_fractional(3).unwrap(),
            &rat(1, 2),
        )
        .unwrap();
        let p = utilities(&inst, &mid).unwrap();
        assert_eq!(p.men[1], rat(1, 2));
        assert_eq!(
            check_stability(&inst, &mid, &int(0)).unwrap().pairs(),
            vec![(1, 1)]
        );
    }

    #[test]
    fn unstable_support_welfares_and_witness() {
        let alpha = int(3);
        let (inst, witness) = gen_unstable_support(&alpha).unwrap();
        let perms: [(Vec<usize>, i64); 6] = [
            (vec![0, 1, 2], 6), // mu1
            (vec![1, 2, 0], 6), // mu2: 2 alpha
            (vec![2, 0, 1], 6), // mu3: 2 alpha
            (vec![0, 2, 1], 5), // mu4: alpha + 2
            (vec![2, 1, 0], 8), // mu5: 2 alpha + 2
            (vec![1, 0, 2], 5), // mu6: alpha + 2
        ];
        for (perm, expected) in &perms {
            let m = IntegralMatching::from_permutation(perm);
            assert_eq!(welfare_of_pairs(&inst, &m), int(*expected));
        }
        let p = utilities(&inst, &witness).unwrap();
        assert_eq!(p.welfare, int(7));
        assert!(check_stability(&inst, &witness, &int(0))
            .unwrap()
            .is_stable());
        assert!(witness.weight(0, 0).is_zero());
        // Every integral matching in the witness support is unstable while
        // the identity is the unique stable one.
        for (perm, _) in &perms {
            let m = IntegralMatching::from_permutation(perm);
            let stable = check_stability(&inst, &m.to_fractional(3).unwrap(), &int(0))
                .unwrap()
                .is_stable();
            assert_eq!(stable, perm == &vec![0, 1, 2]);
        }
    }

    #[test]
    fn support_lb_construction() {
        let (inst, witness) = gen_support_lb(5, &int(1)).unwrap();
        let alpha = support_lb_alpha(5, &int(1));
        assert_eq!(alpha, int(8));
        let p = utilities(&inst, &witness).unwrap();
        assert!(p.welfare > int(4) * &alpha);
        assert!(check_stability(&inst, &witness, &int(0))
            .unwrap()
            .is_stable());
        assert!(witness.is_complete());
        // W(mu_opt) = (n-1) alpha + 2 and W(mu_i) = (n-1) alpha.
        let opt = IntegralMatching::new(vec![(0, 0), (1, 2), (2, 1), (3, 4), (4, 3)]).unwrap();
        assert_eq!(welfare_of_pairs(&inst, &opt), int(4) * &alpha + int(2));
        let m1 = IntegralMatching::new(vec![(0, 2), (1, 0), (2, 1), (3, 4), (4, 3)]).unwrap();
        assert_eq!(welfare_of_pairs(&inst, &m1), int(4) * &alpha);
    }

    #[test]
    fn rotating_witness_utilities() {
        let (inst, witness) = gen_rotating();
        let p = utilities(&inst, &witness).unwrap();
        for x in p.men.iter().chain(p.women.iter()) {
            assert_eq!(x, &int(1));
        }
        assert!(check_stability(&inst, &witness, &int(0))
            .unwrap()
            .is_stable());
    }

    #[test]
    fn random_families_are_seeded_and_shaped() {
        let fam = RandomFamily::Binary;
        let a = gen_random(4, &fam, 7);
        let b = gen_random(4, &fam, 7);
        assert_eq!(a, b);
        assert!(a.is_binary());

        let fam = RandomFamily::Ternary { alpha: int(3) };
        let t = gen_random(5, &fam, 1);
        assert!(t
            .u_matrix()
            .iter()
            .chain(t.v_matrix().iter())
            .flatten()
            .all(|x| x == &int(0) || x == &int(1) || x == &int(3)));

        let fam = RandomFamily::SymmetricTernary { alpha: rat(3, 2) };
        let s = gen_random(4, &fam, 9);
        assert!(s.is_symmetric());
    }
}
