//! Brute-force ground truth for small instances: integral matching
//! enumeration, the optimal stable integral matching, and efficiency
//! ratios against the exact fractional solver.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::{FractionalMatching, IntegralMatching, Rat, SmcInstance};
use crate::lp::solve_exact_thresh;

/// Default cap for complete-matching enumeration (n! leaves).
pub const DEFAULT_ENUM_CAP: usize = 8;
/// Default cap for partial-matching enumeration.
pub const DEFAULT_PARTIAL_CAP: usize = 5;

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Yields all complete matchings in lexicographic permutation order, or
/// all partial matchings (including the empty one) when `complete_only`
/// is false. Caps are enforced with explicit errors.
pub fn enumerate_integral(
    inst: &SmcInstance,
    complete_only: bool,
    cap: usize,
) -> Result<Box<dyn Iterator<Item = IntegralMatching>>> {
    let n = inst.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if complete_only {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut first = true;
        Ok(Box::new(std::iter::from_fn(move || {
            if first {
                first = false;
                return Some(IntegralMatching::from_permutation(&perm));
            }
            if next_permutation(&mut perm) {
                Some(IntegralMatching::from_permutation(&perm))
            } else {
                None
            }
        })))
    } else {
        // Materialized recursion: each man is either unmatched or paired
        // with an unused woman, in ascending order.
        let mut all = Vec::new();
        let mut used = vec![false; n];
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        fn recurse(
            m: usize,
            n: usize,
            used: &mut Vec<bool>,
            pairs: &mut Vec<(usize, usize)>,
            all: &mut Vec<IntegralMatching>,
        ) {
            if m == n {
                all.push(IntegralMatching::new(pairs.clone()).expect("women used once"));
                return;
            }
            recurse(m + 1, n, used, pairs, all);
            for w in 0..n {
                if used[w] {
                    continue;
                }
                used[w] = true;
                pairs.push((m, w));
                recurse(m + 1, n, used, pairs, all);
                pairs.pop();
                used[w] = false;
            }
        }
        recurse(0, n, &mut used, &mut pairs, &mut all);
        Ok(Box::new(all.into_iter()))
    }
}

/// Fast stability test for a complete matching given as a permutation:
/// utilities are direct table lookups, so only comparisons are needed.
fn permutation_is_stable(inst: &SmcInstance, perm: &[usize], inverse: &[usize]) -> bool {
    let n = inst.n();
    for m in 0..n {
        let um = inst.u(m, perm[m]);
        for w in 0..n {
            if inst.u(m, w) > um && inst.v(m, w) > inst.v(inverse[w], w) {
                return false;
            }
        }
    }
    true
}

/// Maximum welfare over stable integral matchings by exhaustive search
/// over complete matchings. Extending a stable partial matching to a
/// complete one preserves stability and never lowers welfare, so complete
/// enumeration suffices.
pub fn best_stable_integral(inst: &SmcInstance, cap: usize) -> Result<(IntegralMatching, Rat)> {
    let n = inst.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<usize>, Rat)> = None;
    loop {
        let mut inverse = vec![0usize; n];
        for (m, &w) in perm.iter().enumerate() {
            inverse[w] = m;
        }
        if permutation_is_stable(inst, &perm, &inverse) {
            let welfare: Rat = perm
                .iter()
                .enumerate()
                .map(|(m, &w)| inst.u(m, w) + inst.v(m, w))
                .sum();
            if best.as_ref().is_none_or(|(_, b)| &welfare > b) {
                best = Some((perm.clone(), welfare));
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (perm, welfare) = best.expect("deferred acceptance shows stable matchings exist");
    Ok((IntegralMatching::from_permutation(&perm), welfare))
}

/// W(mu) / W(mu*), where mu* is the exact solver's optimal (eps-)stable
/// fractional matching. When the optimum is zero every matching is
/// trivially 1-efficient.
pub fn rho_efficiency(
    inst: &SmcInstance,
    mu: &FractionalMatching,
    epsilon: &Rat,
    cap: usize,
) -> Result<Rat> {
    let result = solve_exact_thresh(inst, epsilon, cap)?;
    let welfare = crate::instance::utilities(inst, mu)?.welfare;
    if result.welfare().is_zero() {
        return Ok(Rat::from_integer(1.into()));
    }
    Ok(welfare / result.welfare())
}
