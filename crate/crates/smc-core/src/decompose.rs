//! Birkhoff-von Neumann decomposition of complete fractional matchings
//! into convex combinations of permutation matchings, dummy-agent padding
//! for incomplete matchings, and support-size auditing.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hungarian::max_bipartite_matching;
use crate::instance::{AgentLabels, FractionalMatching, IntegralMatching, Rat, SmcInstance};

/// Convex combination of distinct integral matchings reproducing a
/// complete fractional matching entrywise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BvnSupport {
    terms: Vec<(Rat, IntegralMatching)>,
}

impl BvnSupport {
    pub(crate) fn from_terms(terms: Vec<(Rat, IntegralMatching)>) -> Self {
        BvnSupport { terms }
    }

    pub fn terms(&self) -> &[(Rat, IntegralMatching)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lambda_sum(&self) -> Rat {
        self.terms.iter().map(|(l, _)| l).sum()
    }

    /// Entrywise reconstruction of the combined matching.
    pub fn reconstruct(&self, n: usize) -> Result<FractionalMatching> {
        let borrowed: Vec<(Rat, &IntegralMatching)> =
            self.terms.iter().map(|(l, m)| (l.clone(), m)).collect();
        FractionalMatching::combine(&borrowed, n)
    }
}

/// Lexicographically smallest perfect matching on the positive-support
/// graph, or None when none exists.
fn lex_min_perfect_matching(weights: &[Vec<Rat>]) -> Option<Vec<usize>> {
    let n = weights.len();
    let full_adj = |banned: &Vec<Option<usize>>| -> Vec<Vec<usize>> {
        (0..n)
            .map(|i| match banned[i] {
                Some(j) => vec![j],
                None => (0..n).filter(|&j| !weights[i][j].is_zero()).collect(),
            })
            .collect()
    };
    let mut fixed: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut chosen = None;
        for j in 0..n {
            if weights[i][j].is_zero() || fixed.iter().flatten().any(|&f| f == j) {
                continue;
            }
            fixed[i] = Some(j);
            let adj = full_adj(&fixed);
            let matched = max_bipartite_matching(&adj, n).iter().flatten().count();
            if matched == n {
                chosen = Some(j);
                break;
            }
            fixed[i] = None;
        }
        {
            let j = chosen?;
            fixed[i] = Some(j)
        }
    }
    Some(fixed.into_iter().map(|j| j.unwrap()).collect())
}

/// Greedy Birkhoff-von Neumann extraction: each round finds the
/// lexicographically smallest perfect matching on the positive cells and
/// subtracts the minimum weight along it, zeroing at least one cell.
pub fn bvn_decompose(mu: &FractionalMatching) -> Result<BvnSupport> {
    if !mu.is_complete() {
        return Err(Error::NotDoublyStochastic);
    }
    let mut weights = mu.weights().clone();
    let mut terms: Vec<(Rat, IntegralMatching)> = Vec::new();
    while weights.iter().flatten().any(|x| !x.is_zero()) {
        let perm = lex_min_perfect_matching(&weights)
            .expect("a doubly stochastic matrix has a perfect matching on its support");
        let lambda = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| weights[i][j].clone())
            .min()
            .expect("n >= 1");
        for (i, &j) in perm.iter().enumerate() {
            weights[i][j] -= &lambda;
        }
        terms.push((lambda, IntegralMatching::from_permutation(&perm)));
    }
    if terms.is_empty() {
        // Zero-size matchings cannot be complete, so this only guards n = 0.
        return Err(Error::NotDoublyStochastic);
    }
    Ok(BvnSupport { terms })
}

/// Number of terms produced by [`bvn_decompose`].
pub fn support_size(mu: &FractionalMatching) -> Result<usize> {
    Ok(bvn_decompose(mu)?.len())
}

/// Pads an instance with zero-valuation agents and routes each agent's
/// slack to them so the matching becomes complete; welfare is unchanged.
pub fn complete_with_dummies(
    inst: &SmcInstance,
    mu: &FractionalMatching,
) -> Result<(SmcInstance, FractionalMatching)> {
    if inst.n() != mu.n() {
        return Err(Error::DimensionMismatch(format!(
            "instance has n = {} but matching has n = {}",
            inst.n(),
            mu.n()
        )));
    }
    if mu.is_complete() {
        return Ok((inst.clone(), mu.clone()));
    }
    let n = inst.n();
    let row_slack: Vec<Rat> = (0..n).map(|i| Rat::one() - mu.row_sum(i)).collect();
    let col_slack: Vec<Rat> = (0..n).map(|j| Rat::one() - mu.col_sum(j)).collect();
    let total: Rat = row_slack.iter().sum();
    debug_assert_eq!(total, col_slack.iter().sum::<Rat>());
    let extra = total.ceil().to_integer();
    let extra: usize = extra.try_into().expect("slack is bounded by n");
    let big = n + extra;

    let mut weights = vec![vec![Rat::zero(); big]; big];
    for i in 0..n {
        for j in 0..n {
            weights[i][j] = mu.weight(i, j).clone();
        }
    }
    // Fill dummy columns with men's slack, each column up to capacity one,
    // then dummy rows with women's slack; the dummy-dummy block absorbs the
    // remainder northwest-corner style.
    let fill = |amounts: &[Rat], weights: &mut Vec<Vec<Rat>>, by_row: bool| {
        let mut k = n;
        let mut capacity = Rat::one();
        for (idx, amount) in amounts.iter().enumerate() {
            let mut left = amount.clone();
            while !left.is_zero() {
                let take = if left < capacity {
                    left.clone()
                } else {
                    capacity.clone()
                };
                if by_row {
                    weights[idx][k] += &take;
                } else {
                    weights[k][idx] += &take;
                }
                left -= &take;
                capacity -= &take;
                if capacity.is_zero() {
                    k += 1;
                    capacity = Rat::one();
                }
            }
        }
    };
    fill(&row_slack, &mut weights, true);
    fill(&col_slack, &mut weights, false);
    // Dummy-dummy block: make every dummy row and column sum to one.
    let mut row_need: Vec<Rat> = (n..big)
        .map(|i| Rat::one() - weights[i].iter().sum::<Rat>())
        .collect();
    let mut col_need: Vec<Rat> = (n..big)
        .map(|j| Rat::one() - weights.iter().map(|r| &r[j]).sum::<Rat>())
        .collect();
    let (mut i, mut j) = (0, 0);
    while i < extra && j < extra {
        let take = row_need[i].clone().min(col_need[j].clone());
        weights[n + i][n + j] += &take;
        row_need[i] -= &take;
        col_need[j] -= &take;
        if row_need[i].is_zero() {
            i += 1;
        }
        if j < extra && col_need[j].is_zero() {
            j += 1;
        }
    }

    let mut u = vec![vec![Rat::zero(); big]; big];
    let mut v = vec![vec![Rat::zero(); big]; big];
    for a in 0..n {
        for b in 0..n {
            u[a][b] = inst.u(a, b).clone();
            v[a][b] = inst.v(a, b).clone();
        }
    }
    let labels = AgentLabels {
        men: (0..big)
            .map(|i| {
                if i < n {
                    inst.man_label(i)
                } else {
                    format!("dummy_m{}", i - n + 1)
                }
            })
            .collect(),
        women: (0..big)
            .map(|j| {
                if j < n {
                    inst.woman_label(j)
                } else {
                    format!("dummy_w{}", j - n + 1)
                }
            })
            .collect(),
    };
    let padded_inst = SmcInstance::with_labels(u, v, labels)?;
    let padded_mu = FractionalMatching::new(weights)?;
    debug_assert!(padded_mu.is_complete());
    Ok((padded_inst, padded_mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_motivating, gen_unstable_support};
    use crate::instance::{int, rat, utilities, welfare_of_pairs};
    use proptest::prelude::*;

    #[test]
    fn motivating_witness_has_two_terms() {
        let (_, witness) = gen_motivating();
        let support = bvn_decompose(&witness).unwrap();
        assert_eq!(support.len(), 2);
        assert_eq!(support.lambda_sum(), int(1));
        for (lambda, _) in support.terms() {
            assert_eq!(lambda, &rat(1, 2));
        }
        assert_eq!(support.reconstruct(3).unwrap(), witness);
        assert_eq!(support_size(&witness).unwrap(), 2);
    }

    #[test]
    fn integral_matching_single_term() {
        let m = IntegralMatching::from_permutation(&[2, 0, 1]);
        let f = m.to_fractional(3).unwrap();
        let support = bvn_decompose(&f).unwrap();
        assert_eq!(support.len(), 1);
        assert_eq!(support.terms()[0], (int(1), m));
    }

    #[test]
    fn uniform_two_by_two() {
        let half = rat(1, 2);
        let f = FractionalMatching::new(vec![
            vec![half.clone(), half.clone()],
            vec![half.clone(), half],
        ])
        .unwrap();
        let support = bvn_decompose(&f).unwrap();
        assert_eq!(support.len(), 2);
        for (lambda, _) in support.terms() {
            assert_eq!(lambda, &rat(1, 2));
        }
    }

    #[test]
    fn unstable_support_witness_has_three_terms() {
        let (_, witness) = gen_unstable_support(&int(3)).unwrap();
        assert_eq!(support_size(&witness).unwrap(), 3);
    }

    #[test]
    fn incomplete_matching_rejected() {
        let f = FractionalMatching::new(vec![vec![rat(1, 2)]]).unwrap();
        assert!(matches!(bvn_decompose(&f), Err(Error::NotDoublyStochastic)));
    }

    #[test]
    fn padding_identity_on_complete() {
        let (inst, witness) = gen_motivating();
        let (pi, pm) = complete_with_dummies(&inst, &witness).unwrap();
        assert_eq!(pi, inst);
        assert_eq!(pm, witness);
    }

    #[test]
    fn padding_empty_one_by_one() {
        let inst = SmcInstance::new(vec![vec![int(1)]], vec![vec![int(1)]]).unwrap();
        let mu = FractionalMatching::zero(1);
        let (pi, pm) = complete_with_dummies(&inst, &mu).unwrap();
        assert_eq!(pi.n(), 2);
        assert_eq!(pm.weight(0, 1), &int(1));
        assert_eq!(pm.weight(1, 0), &int(1));
        assert!(pm.is_complete());
        assert_eq!(utilities(&pi, &pm).unwrap().welfare, int(0));
    }

    #[test]
    fn padding_partial_rows() {
        // Row sums (1, 1/2): one dummy column absorbs the half.
        let mu = FractionalMatching::new(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), int(0)]])
            .unwrap();
        let u = vec![vec![int(1), int(2)], vec![int(3), int(4)]];
        let inst = SmcInstance::new(u.clone(), u).unwrap();
        let (pi, pm) = complete_with_dummies(&inst, &mu).unwrap();
        assert_eq!(pi.n(), 3);
        assert!(pm.is_complete());
        assert_eq!(pm.weight(1, 2), &rat(1, 2));
        let before = utilities(&inst, &mu).unwrap().welfare;
        let after = utilities(&pi, &pm).unwrap().welfare;
        assert_eq!(before, after);
    }

    #[test]
    fn welfare_agrees_with_support_expansion() {
        let (inst, witness) = gen_motivating();
        let support = bvn_decompose(&witness).unwrap();
        let via_terms: Rat = support
            .terms()
            .iter()
            .map(|(l, m)| l * welfare_of_pairs(&inst, m))
            .sum();
        assert_eq!(via_terms, utilities(&inst, &witness).unwrap().welfare);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn reconstruction_is_exact(seed in 0u64..1000, n in 2usize..6) {
            // Random complete rational matchings built as convex
            // combinations of random permutations.
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = 2 + (seed % 3) as usize;
            let mut terms = Vec::new();
            let mut perm: Vec<usize> = (0..n).collect();
            for t in 0..k {
                perm.shuffle(&mut rng);
                let lambda = if t + 1 == k { int(2) } else { int(1) };
                terms.push((lambda, IntegralMatching::from_permutation(&perm)));
            }
            let total: Rat = terms.iter().map(|(l, _)| l).sum();
            let normalized: Vec<(Rat, &IntegralMatching)> =
                terms.iter().map(|(l, m)| (l / &total, m)).collect();
            let mu = FractionalMatching::combine(&normalized, n).unwrap();
            prop_assume!(mu.is_complete());
            let support = bvn_decompose(&mu).unwrap();
            prop_assert_eq!(support.reconstruct(n).unwrap(), mu.clone());
            prop_assert_eq!(support.lambda_sum(), int(1));
            // Term count bound and distinctness.
            prop_assert!(support.len() <= n * n - 2 * n + 2);
            let mut seen = std::collections::BTreeSet::new();
            for (lambda, m) in support.terms() {
                prop_assert!(lambda > &int(0));
                prop_assert!(seen.insert(m.clone()), "duplicate support term");
            }
            // Each term uses only positive-support cells.
            let positive = mu.weights().iter().flatten().filter(|x| !x.is_zero()).count();
            prop_assert!(support.len() <= positive);
        }
    }
}
