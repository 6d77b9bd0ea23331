//! Instance and matching data model: valuation matrices, fractional and
//! integral matchings, utilities, exact and epsilon-stability checking and
//! ordinal preference derivation.
//!
//! All arithmetic is exact rational; there is no floating-point path.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// `p/q` as a [`Rat`].
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(p.into(), q.into())
}

/// Integer `p` as a [`Rat`].
pub fn int(p: i64) -> Rat {
    Rat::from_integer(p.into())
}

/// Optional agent names, used by the reduction compiler to bind gadget
/// roles to agent indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentLabels {
    pub men: Vec<String>,
    pub women: Vec<String>,
}

/// A two-sided matching instance with cardinal preferences: `n` men, `n`
/// women and non-negative rational valuation matrices. `u[m][w]` is the
/// value man `m` has for woman `w`; `v[m][w]` is the value woman `w` has
/// for man `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmcInstance {
    n: usize,
    u: Vec<Vec<Rat>>,
    v: Vec<Vec<Rat>>,
    labels: Option<AgentLabels>,
}

impl SmcInstance {
    pub fn new(u: Vec<Vec<Rat>>, v: Vec<Vec<Rat>>) -> Result<Self> {
        let n = u.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("instance must have n >= 1".into()));
        }
        if v.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "U has {} rows but V has {}",
                n,
                v.len()
            )));
        }
        for (name, m) in [("U", &u), ("V", &v)] {
            for (i, row) in m.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "{name} row {i} has {} entries, expected {n}",
                        row.len()
                    )));
                }
                for (j, x) in row.iter().enumerate() {
                    if x < &Rat::zero() {
                        return Err(Error::NegativeValuation { row: i, col: j });
                    }
                }
            }
        }
        Ok(SmcInstance {
            n,
            u,
            v,
            labels: None,
        })
    }

    pub fn with_labels(u: Vec<Vec<Rat>>, v: Vec<Vec<Rat>>, labels: AgentLabels) -> Result<Self> {
        let mut inst = Self::new(u, v)?;
        if labels.men.len() != inst.n || labels.women.len() != inst.n {
            return Err(Error::DimensionMismatch(format!(
                "labels must name {} men and {} women",
                inst.n, inst.n
            )));
        }
        inst.labels = Some(labels);
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// U(m, w): man `m`'s value for woman `w`.
    pub fn u(&self, m: usize, w: usize) -> &Rat {
        &self.u[m][w]
    }

    /// V(m, w): woman `w`'s value for man `m`.
    pub fn v(&self, m: usize, w: usize) -> &Rat {
        &self.v[m][w]
    }

    pub fn u_matrix(&self) -> &Vec<Vec<Rat>> {
        &self.u
    }

    pub fn v_matrix(&self) -> &Vec<Vec<Rat>> {
        &self.v
    }

    pub fn labels(&self) -> Option<&AgentLabels> {
        self.labels.as_ref()
    }

    /// A pair is heavy when both sides value it positively.
    pub fn is_heavy(&self, m: usize, w: usize) -> bool {
        self.u[m][w] > Rat::zero() && self.v[m][w] > Rat::zero()
    }

    /// A pair is light when at least one side values it at zero.
    pub fn is_light(&self, m: usize, w: usize) -> bool {
        !self.is_heavy(m, w)
    }

    fn values(&self) -> impl Iterator<Item = &Rat> {
        self.u.iter().chain(self.v.iter()).flatten()
    }

    /// All entries in {0, 1}.
    pub fn is_binary(&self) -> bool {
        self.values().all(|x| x.is_zero() || x.is_one())
    }

    /// If all entries lie in {0, 1, alpha} for a single alpha > 1, returns
    /// that alpha. Binary instances return `None`.
    pub fn ternary_alpha(&self) -> Option<Rat> {
        let one = Rat::one();
        let mut alpha: Option<Rat> = None;
        for x in self.values() {
            if x.is_zero() || x.is_one() {
                continue;
            }
            if x <= &one {
                return None;
            }
            match &alpha {
                None => alpha = Some(x.clone()),
                Some(a) if a == x => {}
                Some(_) => return None,
            }
        }
        alpha
    }

    /// Entries in {0, 1, alpha}; binary counts as ternary.
    pub fn is_ternary(&self) -> bool {
        self.is_binary() || self.ternary_alpha().is_some()
    }

    pub fn is_symmetric(&self) -> bool {
        self.u == self.v
    }

    /// Largest non-zero valuation, or `None` on an all-zero instance.
    pub fn sigma_max(&self) -> Option<Rat> {
        self.values().filter(|x| !x.is_zero()).max().cloned()
    }

    /// Smallest non-zero valuation, or `None` on an all-zero instance.
    pub fn sigma_min(&self) -> Option<Rat> {
        self.values().filter(|x| !x.is_zero()).min().cloned()
    }

    pub fn man_label(&self, m: usize) -> String {
        match &self.labels {
            Some(l) => l.men[m].clone(),
            None => format!("m{}", m + 1),
        }
    }

    pub fn woman_label(&self, w: usize) -> String {
        match &self.labels {
            Some(l) => l.women[w].clone(),
            None => format!("w{}", w + 1),
        }
    }
}

/// Non-negative weights on man-woman pairs with all row and column sums
/// at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalMatching {
    weights: Vec<Vec<Rat>>,
}

impl FractionalMatching {
    pub fn new(weights: Vec<Vec<Rat>>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("matching must have n >= 1".into()));
        }
        for (i, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "matching row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, x) in row.iter().enumerate() {
                if x < &Rat::zero() {
                    return Err(Error::WeightOutOfRange { row: i, col: j });
                }
            }
        }
        let m = FractionalMatching { weights };
        for i in 0..n {
            if m.row_sum(i) > Rat::one() {
                return Err(Error::SumExceedsOne { index: i });
            }
            if m.col_sum(i) > Rat::one() {
                return Err(Error::SumExceedsOne { index: i });
            }
        }
        Ok(m)
    }

    pub fn zero(n: usize) -> Self {
        FractionalMatching {
            weights: vec![vec![Rat::zero(); n]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, m: usize, w: usize) -> &Rat {
        &self.weights[m][w]
    }

    pub fn weights(&self) -> &Vec<Vec<Rat>> {
        &self.weights
    }

    pub fn row_sum(&self, m: usize) -> Rat {
        self.weights[m].iter().sum()
    }

    pub fn col_sum(&self, w: usize) -> Rat {
        self.weights.iter().map(|row| &row[w]).sum()
    }

    /// All row and column sums are exactly one.
    pub fn is_complete(&self) -> bool {
        let one = Rat::one();
        (0..self.n()).all(|i| self.row_sum(i) == one && self.col_sum(i) == one)
    }

    /// Every entry is zero or one.
    pub fn is_integral(&self) -> bool {
        self.weights
            .iter()
            .flatten()
            .all(|x| x.is_zero() || x.is_one())
    }

    /// Exact convex combination `sum(lambda_t * matching_t)`. The weights
    /// must be non-negative; callers asserting completeness should require
    /// that they sum to one.
    pub fn combine(terms: &[(Rat, &IntegralMatching)], n: usize) -> Result<Self> {
        let mut weights = vec![vec![Rat::zero(); n]; n];
        for (lambda, matching) in terms {
            for &(m, w) in matching.pairs() {
                if m >= n || w >= n {
                    return Err(Error::DimensionMismatch(format!(
                        "pair ({m}, {w}) out of range for n = {n}"
                    )));
                }
                weights[m][w] += lambda;
            }
        }
        FractionalMatching::new(weights)
    }

    /// `(1 - t) * a + t * b`.
    pub fn blend(a: &Self, b: &Self, t: &Rat) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::DimensionMismatch(format!(
                "cannot blend matchings of sizes {} and {}",
                a.n(),
                b.n()
            )));
        }
        let s = Rat::one() - t;
        let weights = (0..a.n())
            .map(|i| {
                (0..a.n())
                    .map(|j| &s * &a.weights[i][j] + t * &b.weights[i][j])
                    .collect()
            })
            .collect();
        FractionalMatching::new(weights)
    }

    /// The integral matching with the same pairs, if every entry is 0/1.
    pub fn to_integral(&self) -> Option<IntegralMatching> {
        if !self.is_integral() {
            return None;
        }
        let mut pairs = Vec::new();
        for (m, row) in self.weights.iter().enumerate() {
            for (w, x) in row.iter().enumerate() {
                if x.is_one() {
                    pairs.push((m, w));
                }
            }
        }
        Some(IntegralMatching::new(pairs).expect("row/column sums <= 1 imply a valid matching"))
    }
}

/// A set of man-woman pairs in which no agent appears twice.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntegralMatching {
    pairs: Vec<(usize, usize)>,
}

impl IntegralMatching {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        for win in pairs.windows(2) {
            if win[0].0 == win[1].0 {
                return Err(Error::DuplicateAgent(format!("man {}", win[0].0)));
            }
        }
        let mut women: Vec<usize> = pairs.iter().map(|&(_, w)| w).collect();
        women.sort_unstable();
        for win in women.windows(2) {
            if win[0] == win[1] {
                return Err(Error::DuplicateAgent(format!("woman {}", win[0])));
            }
        }
        Ok(IntegralMatching { pairs })
    }

    pub fn empty() -> Self {
        IntegralMatching { pairs: Vec::new() }
    }

    /// Complete matching sending man `i` to woman `perm[i]`.
    pub fn from_permutation(perm: &[usize]) -> Self {
        IntegralMatching {
            pairs: perm.iter().enumerate().map(|(m, &w)| (m, w)).collect(),
        }
    }

    /// Pairs in sorted order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn woman_of(&self, m: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(a, _)| a == m).map(|&(_, w)| w)
    }

    pub fn man_of(&self, w: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(_, b)| b == w).map(|&(m, _)| m)
    }

    pub fn contains(&self, m: usize, w: usize) -> bool {
        self.pairs.binary_search(&(m, w)).is_ok()
    }

    pub fn is_complete(&self, n: usize) -> bool {
        self.pairs.len() == n
    }

    pub fn to_fractional(&self, n: usize) -> Result<FractionalMatching> {
        FractionalMatching::combine(&[(Rat::one(), self)], n)
    }
}

/// Per-agent utilities under a fractional matching and their exact sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityProfile {
    pub men: Vec<Rat>,
    pub women: Vec<Rat>,
    pub welfare: Rat,
}

/// u_m = sum_w U(m,w) mu(m,w), v_w = sum_m V(m,w) mu(m,w) and the social
/// welfare, all computed exactly.
pub fn utilities(inst: &SmcInstance, mu: &FractionalMatching) -> Result<UtilityProfile> {
    let n = inst.n();
    if mu.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "instance has n = {n} but matching has n = {}",
            mu.n()
        )));
    }
    let mut men = vec![Rat::zero(); n];
    let mut women = vec![Rat::zero(); n];
    for m in 0..n {
        for w in 0..n {
            let x = mu.weight(m, w);
            if x.is_zero() {
                continue;
            }
            men[m] += inst.u(m, w) * x;
            women[w] += inst.v(m, w) * x;
        }
    }
    let welfare = men.iter().chain(women.iter()).sum();
    Ok(UtilityProfile {
        men,
        women,
        welfare,
    })
}

/// Social welfare of an integral matching: sum of U(m,w) + V(m,w) over
/// its pairs.
pub fn welfare_of_pairs(inst: &SmcInstance, matching: &IntegralMatching) -> Rat {
    matching
        .pairs()
        .iter()
        .map(|&(m, w)| inst.u(m, w) + inst.v(m, w))
        .sum()
}

/// One epsilon-blocking pair together with the utilities and scaled
/// valuations that witnessed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingPair {
    pub man: usize,
    pub woman: usize,
    pub man_utility: Rat,
    pub woman_utility: Rat,
    pub man_threshold: Rat,
    pub woman_threshold: Rat,
}

/// Result of an epsilon-stability check: the exact list of blocking pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingReport {
    pub epsilon: Rat,
    pub blocking: Vec<BlockingPair>,
}

impl BlockingReport {
    pub fn is_stable(&self) -> bool {
        self.blocking.is_empty()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.blocking.iter().map(|b| (b.man, b.woman)).collect()
    }
}

/// Lists every pair (m, w) with u_m < (1-eps) U(m,w) and
/// v_w < (1-eps) V(m,w). All n^2 pairs are checked; zero-value pairs are
/// vacuously non-blocking. eps = 0 is exact stability.
pub fn check_stability(
    inst: &SmcInstance,
    mu: &FractionalMatching,
    epsilon: &Rat,
) -> Result<BlockingReport> {
    if epsilon < &Rat::zero() || epsilon >= &Rat::one() {
        return Err(Error::EpsilonOutOfRange(format!("{epsilon} not in [0, 1)")));
    }
    let profile = utilities(inst, mu)?;
    let scale = Rat::one() - epsilon;
    let mut blocking = Vec::new();
    for m in 0..inst.n() {
        for w in 0..inst.n() {
            let tu = &scale * inst.u(m, w);
            let tv = &scale * inst.v(m, w);
            if profile.men[m] < tu && profile.women[w] < tv {
                blocking.push(BlockingPair {
                    man: m,
                    woman: w,
                    man_utility: profile.men[m].clone(),
                    woman_utility: profile.women[w].clone(),
                    man_threshold: tu,
                    woman_threshold: tv,
                });
            }
        }
    }
    Ok(BlockingReport {
        epsilon: epsilon.clone(),
        blocking,
    })
}

/// Weak total orders derived from the valuations, stored as ranked tiers
/// of equal-value agents, best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalProfile {
    pub men_prefs: Vec<Vec<Vec<usize>>>,
    pub women_prefs: Vec<Vec<Vec<usize>>>,
}

fn tiers_of(values: impl Iterator<Item = Rat>) -> Vec<Vec<usize>> {
    let mut indexed: Vec<(Rat, usize)> = values.enumerate().map(|(i, x)| (x, i)).collect();
    indexed.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut tiers: Vec<Vec<usize>> = Vec::new();
    let mut current: Option<Rat> = None;
    for (x, i) in indexed {
        if current.as_ref() == Some(&x) {
            tiers.last_mut().unwrap().push(i);
        } else {
            tiers.push(vec![i]);
            current = Some(x);
        }
    }
    tiers
}

/// Ordinal preferences consistent with the valuations: w is weakly
/// preferred to w' by m iff U(m,w) >= U(m,w').
pub fn derive_ordinal(inst: &SmcInstance) -> OrdinalProfile {
    let n = inst.n();
    let men_prefs = (0..n)
        .map(|m| tiers_of((0..n).map(|w| inst.u(m, w).clone())))
        .collect();
    let women_prefs = (0..n)
        .map(|w| tiers_of((0..n).map(|m| inst.v(m, w).clone())))
        .collect();
    OrdinalProfile {
        men_prefs,
        women_prefs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_motivating;

    #[test]
    fn utilities_motivating_witness() {
        let (inst, mu) = gen_motivating();
        let p = utilities(&inst, &mu).unwrap();
        assert_eq!(p.men, vec![int(0), rat(1, 2), rat(3, 2)]);
        assert_eq!(p.women, vec![int(3), rat(3, 2), int(1)]);
        assert_eq!(p.welfare, rat(15, 2));
    }

    #[test]
    fn utilities_zero_matching() {
        let (inst, _) = gen_motivating();
        let p = utilities(&inst, &FractionalMatching::zero(3)).unwrap();
        assert!(p.men.iter().all(|x| x.is_zero()));
        assert!(p.women.iter().all(|x| x.is_zero()));
        assert!(p.welfare.is_zero());
    }

    #[test]
    fn welfare_of_mu1_is_seven() {
        let (inst, _) = gen_motivating();
        let mu1 = IntegralMatching::new(vec![(0, 2), (1, 1), (2, 0)]).unwrap();
        assert_eq!(welfare_of_pairs(&inst, &mu1), int(7));
        let p = utilities(&inst, &mu1.to_fractional(3).unwrap()).unwrap();
        assert_eq!(p.welfare, int(7));
    }

    #[test]
    fn welfare_of_empty_matching() {
        let (inst, _) = gen_motivating();
        assert_eq!(welfare_of_pairs(&inst, &IntegralMatching::empty()), int(0));
    }

    #[test]
    fn welfare_of_identity_is_eight() {
        let (inst, _) = gen_motivating();
        let mu3 = IntegralMatching::new(vec![(0, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(welfare_of_pairs(&inst, &mu3), int(8));
    }

    #[test]
    fn integral_round_trips_through_fractional() {
        let m = IntegralMatching::new(vec![(0, 2), (3, 1)]).unwrap();
        let f = m.to_fractional(4).unwrap();
        assert!(f.is_integral());
        assert_eq!(f.to_integral(), Some(m));
        assert_eq!(
            FractionalMatching::zero(2).to_integral(),
            Some(IntegralMatching::empty())
        );
        let half =
            FractionalMatching::new(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]])
                .unwrap();
        assert_eq!(half.to_integral(), None);
    }

    #[test]
    fn motivating_witness_is_stable() {
        let (inst, mu) = gen_motivating();
        let report = check_stability(&inst, &mu, &int(0)).unwrap();
        assert!(report.is_stable());
        // A stable fractional matching is also eps-stable for any eps.
        for eps in [rat(1, 4), rat(1, 2), rat(9, 10)] {
            assert!(check_stability(&inst, &mu, &eps).unwrap().is_stable());
        }
    }

    #[test]
    fn nonconvex_midpoint_blocks_at_m2_w2() {
        let (inst, mu1, mu2) = crate::generators::gen_nonconvex();
        let a = mu1.to_fractional(3).unwrap();
        let b = mu2.to_fractional(3).unwrap();
        let mid = FractionalMatching::blend(&a, &b, &rat(1, 2)).unwrap();
        let report = check_stability(&inst, &mid, &int(0)).unwrap();
        assert_eq!(report.pairs(), vec![(1, 1)]);
    }

    #[test]
    fn epsilon_out_of_range_rejected() {
        let (inst, mu) = gen_motivating();
        assert!(check_stability(&inst, &mu, &int(1)).is_err());
        assert!(check_stability(&inst, &mu, &rat(-1, 2)).is_err());
    }

    #[test]
    fn derive_ordinal_motivating_m1() {
        let (inst, _) = gen_motivating();
        let ord = derive_ordinal(&inst);
        // U row of m1 is [0, 1, 2]: w3 > w2 > w1.
        assert_eq!(ord.men_prefs[0], vec![vec![2], vec![1], vec![0]]);
    }

    #[test]
    fn derive_ordinal_ties() {
        let u = vec![vec![int(0), int(0), int(0)]; 3];
        let inst = SmcInstance::new(u.clone(), u).unwrap();
        let ord = derive_ordinal(&inst);
        assert_eq!(ord.men_prefs[0], vec![vec![0, 1, 2]]);

        let u = vec![
            vec![int(1), int(0), int(1)],
            vec![int(0), int(0), int(0)],
            vec![int(0), int(0), int(0)],
        ];
        let v = vec![vec![int(0); 3]; 3];
        let inst = SmcInstance::new(u, v).unwrap();
        let ord = derive_ordinal(&inst);
        assert_eq!(ord.men_prefs[0], vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn degenerate_single_agent_instance() {
        let inst = SmcInstance::new(vec![vec![int(0)]], vec![vec![int(0)]]).unwrap();
        assert!(inst.is_binary());
        assert_eq!(inst.sigma_max(), None);
        let mu = FractionalMatching::new(vec![vec![int(1)]]).unwrap();
        assert!(check_stability(&inst, &mu, &int(0)).unwrap().is_stable());
    }

    #[test]
    fn classification_predicates() {
        let (motivating, _) = gen_motivating();
        assert!(!motivating.is_binary());
        assert!(motivating.ternary_alpha().is_none()); // values {0,1,2,3}
        assert_eq!(motivating.sigma_max(), Some(int(3)));
        assert_eq!(motivating.sigma_min(), Some(int(1)));

        let (tern, _) = crate::generators::gen_unstable_support(&int(3)).unwrap();
        assert_eq!(tern.ternary_alpha(), Some(int(3)));
        assert!(tern.is_ternary());
        assert!(!tern.is_binary());
    }

    #[test]
    fn scaling_leaves_blocking_pairs_unchanged() {
        let (inst, _) = gen_motivating();
        let mu1 = IntegralMatching::new(vec![(0, 0), (1, 1), (2, 2)]).unwrap();
        let mu = mu1.to_fractional(3).unwrap();
        let before = check_stability(&inst, &mu, &int(0)).unwrap().pairs();
        let factor = rat(7, 3);
        let scale = |m: &Vec<Vec<Rat>>| -> Vec<Vec<Rat>> {
            m.iter()
                .map(|r| r.iter().map(|x| x * &factor).collect())
                .collect()
        };
        let scaled = SmcInstance::new(scale(inst.u_matrix()), scale(inst.v_matrix())).unwrap();
        let after = check_stability(&scaled, &mu, &int(0)).unwrap().pairs();
        assert_eq!(before, after);
    }

    #[test]
    fn integral_blocking_matches_textbook_ordinal_definition() {
        // With valuations distinct per row and per column, the blocking
        // pairs of an integral matching coincide with the ordinal
        // definition applied to derive_ordinal output.
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        for seed in 0..60u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 2 + (seed % 4) as usize;
            let distinct_matrix = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<Rat>> {
                // Entry (i, j) = n * sigma_i(j) + tau_j(i) + 1 is distinct
                // within every row and every column.
                let sigmas: Vec<Vec<usize>> = (0..n)
                    .map(|_| {
                        let mut p: Vec<usize> = (0..n).collect();
                        p.shuffle(rng);
                        p
                    })
                    .collect();
                let taus: Vec<Vec<usize>> = (0..n)
                    .map(|_| {
                        let mut p: Vec<usize> = (0..n).collect();
                        p.shuffle(rng);
                        p
                    })
                    .collect();
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| int((n * sigmas[i][j] + taus[j][i] + 1) as i64))
                            .collect()
                    })
                    .collect()
            };
            let inst =
                SmcInstance::new(distinct_matrix(&mut rng), distinct_matrix(&mut rng)).unwrap();
            let ord = derive_ordinal(&inst);
            // Tiers are singletons under distinctness.
            assert!(ord.men_prefs.iter().flatten().all(|t| t.len() == 1));

            let rank_w =
                |m: usize, w: usize| ord.men_prefs[m].iter().position(|t| t[0] == w).unwrap();
            let rank_m =
                |w: usize, m: usize| ord.women_prefs[w].iter().position(|t| t[0] == m).unwrap();
            let pairs: Vec<(usize, usize)> =
                (0..n - 1).map(|i| (i, (i + seed as usize) % n)).collect();
            let matching = IntegralMatching::new(pairs).unwrap();
            let mu = matching.to_fractional(n).unwrap();
            let report = check_stability(&inst, &mu, &int(0)).unwrap();
            for m in 0..n {
                for w in 0..n {
                    let man_wants = matching
                        .woman_of(m)
                        .is_none_or(|cur| rank_w(m, w) < rank_w(m, cur));
                    let woman_wants = matching
                        .man_of(w)
                        .is_none_or(|cur| rank_m(w, m) < rank_m(w, cur));
                    let textbook = man_wants && woman_wants && !matching.contains(m, w);
                    assert_eq!(
                        report.pairs().contains(&(m, w)),
                        textbook,
                        "seed {seed} pair ({m}, {w})"
                    );
                }
            }
        }
    }

    #[test]
    fn monotonicity_of_eps_stability() {
        use crate::generators::{gen_random, RandomFamily};
        let ladder = [int(0), rat(1, 8), rat(1, 4), rat(1, 2), rat(3, 4)];
        for seed in 0..200u64 {
            let n = 2 + (seed % 5) as usize;
            let inst = gen_random(n, &RandomFamily::General { max: 4 }, seed);
            let perm: Vec<usize> = (0..n).map(|i| (i + seed as usize) % n).collect();
            let mu = IntegralMatching::from_permutation(&perm)
                .to_fractional(n)
                .unwrap();
            let mut was_stable = false;
            for eps in &ladder {
                let stable = check_stability(&inst, &mu, eps).unwrap().is_stable();
                if was_stable {
                    assert!(stable, "stability must be monotone in eps");
                }
                was_stable = stable;
            }
        }
    }
}
