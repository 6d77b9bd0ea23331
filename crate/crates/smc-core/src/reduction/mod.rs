//! Compiles 2P2N-3SAT formulas into hardness instances built from variable
//! gadgets, clause gadgets, variable-clause connectors, an accumulator and
//! clause-accumulator connectors; constructs the witness matching of a
//! satisfying assignment; and verifies the gadget-level propagation claims
//! on arbitrary matchings.

mod claims;
mod compile;
mod formula;
mod witness;

pub use claims::{
    verify_gadget_claims, AccumulatorClaim, ClaimReport, ClauseClaim, VariableClaim, VcClaim,
};
pub use compile::{compile_app_c, compile_thm6};
pub use formula::{parse_dimacs_2p2n, sample_formula_n3, Coupling, Formula2P2N, Lit};
pub use witness::{accumulator_closed_form, accumulator_contribution, witness_from_assignment};

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::{Rat, SmcInstance};

/// Which agent side a binding names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Man,
    Woman,
}

/// Parameters the instance was compiled with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionParams {
    /// Exact-stability reduction with ternary values {0, 1, alpha}.
    Thm6 { alpha: Rat, k: usize },
    /// Epsilon-stability reduction with values {0, 1, beta, gamma}.
    AppC {
        epsilon: Rat,
        delta: Rat,
        beta: Rat,
        gamma: Rat,
    },
}

impl ReductionParams {
    /// True for the alpha >= 2 form of the exact-stability reduction.
    pub fn is_big_alpha(&self) -> bool {
        matches!(self, ReductionParams::Thm6 { alpha, .. } if alpha >= &crate::instance::int(2))
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            ReductionParams::Thm6 { .. } if self.is_big_alpha() => "thm6-big",
            ReductionParams::Thm6 { .. } => "thm6-small",
            ReductionParams::AppC { .. } => "appC",
        }
    }
}

/// Agent indices of one variable gadget (five men, four women).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableGadget {
    pub m1: usize,
    pub m2: usize,
    pub e1: usize,
    pub e2: usize,
    pub e3: usize,
    pub w_bar1: usize,
    pub w_bar2: usize,
    pub f1: usize,
    pub f2: usize,
}

impl VariableGadget {
    /// The two women of the gadget, index 0/1 for the first/second
    /// appearance of the negative literal.
    pub fn w_bar(&self, occurrence: usize) -> usize {
        if occurrence == 0 {
            self.w_bar1
        } else {
            self.w_bar2
        }
    }

    /// The two literal men, index 0/1 for the first/second appearance of
    /// the positive literal.
    pub fn m(&self, occurrence: usize) -> usize {
        if occurrence == 0 {
            self.m1
        } else {
            self.m2
        }
    }
}

/// Agent indices of one clause gadget plus its accumulator woman and
/// CA-connector cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseGadget {
    pub m: usize,
    pub e1: usize,
    pub e2: usize,
    pub w: [usize; 3],
    pub acc_woman: usize,
    pub ca_cell: (usize, usize),
}

/// One variable-clause connector with its input and output edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcConnector {
    pub clause: usize,
    pub position: usize,
    pub literal: Lit,
    /// 0 or 1: which appearance of the literal this connector serves.
    pub occurrence: usize,
    pub input: (usize, usize),
    pub outputs: Vec<(usize, usize)>,
    pub internal_men: Vec<usize>,
    pub internal_women: Vec<usize>,
    pub balanced: Vec<(usize, usize)>,
}

/// Accumulator agents and edges. Agent vectors follow the construction's
/// 1-based ranges: `m`/`w` cover 1..=k, `e1`/`f1` cover 1..=k-1,
/// `f2`/`e3`/`f3` cover 2..=k, and `e2` starts at `e2_start` (1 in the
/// alpha >= 2 form, 2 otherwise).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Accumulator {
    pub m: Vec<usize>,
    pub w: Vec<usize>,
    pub e1: Vec<usize>,
    pub f1: Vec<usize>,
    pub e2: Vec<usize>,
    pub e2_start: usize,
    pub f2: Vec<usize>,
    pub e3: Vec<usize>,
    pub f3: Vec<usize>,
    /// Tine edges (m_1, w^c), one per clause, in clause order.
    pub tines: Vec<(usize, usize)>,
    /// Balanced accumulator edges other than the tines.
    pub balanced_nontine: Vec<(usize, usize)>,
    /// The single gamma-valued edge (m_1, w_1) of the epsilon-stability
    /// accumulator.
    pub gamma_cell: Option<(usize, usize)>,
    /// Every edge the accumulator owns, tines included.
    pub cells: Vec<(usize, usize)>,
}

/// A compiled hardness instance with full gadget-role bindings.
#[derive(Debug, Clone)]
pub struct ReductionArtifact {
    pub instance: SmcInstance,
    /// The effective formula: for the epsilon-stability variant this is
    /// the coupled augmentation of the input.
    pub formula: Formula2P2N,
    pub params: ReductionParams,
    pub variables: Vec<VariableGadget>,
    pub clauses: Vec<ClauseGadget>,
    /// Connectors ordered by (clause, position).
    pub connectors: Vec<VcConnector>,
    pub accumulator: Accumulator,
    pub dummy_men: Vec<usize>,
    pub dummy_women: Vec<usize>,
}

impl ReductionArtifact {
    pub fn connector(&self, clause: usize, position: usize) -> &VcConnector {
        &self.connectors[clause * 3 + position]
    }

    /// Gadget-role name -> agent, covering every non-dummy agent exactly
    /// once.
    pub fn agent_bindings(&self) -> BTreeMap<String, (Side, usize)> {
        let mut map = BTreeMap::new();
        for (x, g) in self.variables.iter().enumerate() {
            let v = x + 1;
            map.insert(format!("var:x{v}:m1"), (Side::Man, g.m1));
            map.insert(format!("var:x{v}:m2"), (Side::Man, g.m2));
            map.insert(format!("var:x{v}:e1"), (Side::Man, g.e1));
            map.insert(format!("var:x{v}:e2"), (Side::Man, g.e2));
            map.insert(format!("var:x{v}:e3"), (Side::Man, g.e3));
            map.insert(format!("var:x{v}:wbar1"), (Side::Woman, g.w_bar1));
            map.insert(format!("var:x{v}:wbar2"), (Side::Woman, g.w_bar2));
            map.insert(format!("var:x{v}:f1"), (Side::Woman, g.f1));
            map.insert(format!("var:x{v}:f2"), (Side::Woman, g.f2));
        }
        for (c, g) in self.clauses.iter().enumerate() {
            let cl = c + 1;
            map.insert(format!("clause:c{cl}:m"), (Side::Man, g.m));
            map.insert(format!("clause:c{cl}:e1"), (Side::Man, g.e1));
            map.insert(format!("clause:c{cl}:e2"), (Side::Man, g.e2));
            for (j, &w) in g.w.iter().enumerate() {
                map.insert(format!("clause:c{cl}:w{}", j + 1), (Side::Woman, w));
            }
            map.insert(format!("acc:wc:c{cl}"), (Side::Woman, g.acc_woman));
        }
        for vc in &self.connectors {
            let tag = format!("vc:c{}:p{}", vc.clause + 1, vc.position + 1);
            for (i, &m) in vc.internal_men.iter().enumerate() {
                map.insert(format!("{tag}:m{}", i + 1), (Side::Man, m));
            }
            for (i, &w) in vc.internal_women.iter().enumerate() {
                map.insert(format!("{tag}:w{}", i + 1), (Side::Woman, w));
            }
        }
        let acc = &self.accumulator;
        for (i, &m) in acc.m.iter().enumerate() {
            map.insert(format!("acc:m{}", i + 1), (Side::Man, m));
        }
        for (i, &w) in acc.w.iter().enumerate() {
            map.insert(format!("acc:w{}", i + 1), (Side::Woman, w));
        }
        for (name, list, side, start) in [
            ("e1", &acc.e1, Side::Man, 1usize),
            ("e2", &acc.e2, Side::Man, acc.e2_start),
            ("e3", &acc.e3, Side::Man, 2),
            ("f1", &acc.f1, Side::Woman, 1),
            ("f2", &acc.f2, Side::Woman, 2),
            ("f3", &acc.f3, Side::Woman, 2),
        ] {
            for (i, &a) in list.iter().enumerate() {
                map.insert(format!("acc:{name}_{}", i + start), (side, a));
            }
        }
        map
    }

    /// Serializes the bindings sidecar (`bindings v1`).
    pub fn bindings_text(&self) -> String {
        let mut out = String::from("bindings v1\n");
        out.push_str(&format!("variant={}\n", self.params.variant_name()));
        match &self.params {
            ReductionParams::Thm6 { alpha, k } => {
                out.push_str(&format!("alpha={alpha}\nk={k}\n"));
            }
            ReductionParams::AppC {
                epsilon,
                delta,
                beta,
                gamma,
            } => {
                out.push_str(&format!(
                    "eps={epsilon}\ndelta={delta}\nbeta={beta}\ngamma={gamma}\n"
                ));
            }
        }
        out.push_str(&format!(
            "n={}\nvars={}\nclauses={}\n",
            self.instance.n(),
            self.formula.num_vars(),
            self.formula.num_clauses()
        ));
        for (name, (side, idx)) in self.agent_bindings() {
            let side = match side {
                Side::Man => "man",
                Side::Woman => "woman",
            };
            out.push_str(&format!("agent {name}={side}:{idx}\n"));
        }
        for (c, g) in self.clauses.iter().enumerate() {
            out.push_str(&format!(
                "cell ca:c{}={},{}\n",
                c + 1,
                g.ca_cell.0,
                g.ca_cell.1
            ));
        }
        for (c, &(m, w)) in self.accumulator.tines.iter().enumerate() {
            out.push_str(&format!("cell tine:c{}={m},{w}\n", c + 1));
        }
        for vc in &self.connectors {
            let tag = format!("vc:c{}:p{}", vc.clause + 1, vc.position + 1);
            out.push_str(&format!("cell {tag}:in={},{}\n", vc.input.0, vc.input.1));
            for (i, &(m, w)) in vc.outputs.iter().enumerate() {
                out.push_str(&format!("cell {tag}:out{}={m},{w}\n", i + 1));
            }
        }
        for &m in &self.dummy_men {
            out.push_str(&format!("dummy man:{m}\n"));
        }
        for &w in &self.dummy_women {
            out.push_str(&format!("dummy woman:{w}\n"));
        }
        out
    }

    /// Checks that every non-zero cell of the compiled instance is exactly
    /// one of man-heavy, woman-heavy or balanced for its variant, and that
    /// the agent bindings form a bijection onto the non-dummy agents.
    pub fn typecheck(&self) -> Result<()> {
        let inst = &self.instance;
        let one = Rat::one();
        let man_heavy: Vec<Rat>;
        let woman_heavy: Vec<Rat>;
        match &self.params {
            ReductionParams::Thm6 { alpha, .. } => {
                man_heavy = vec![alpha.clone()];
                woman_heavy = vec![alpha.clone()];
            }
            ReductionParams::AppC { beta, gamma, .. } => {
                man_heavy = vec![beta.clone()];
                woman_heavy = vec![beta.clone(), gamma.clone(), one.clone()];
            }
        }
        for m in 0..inst.n() {
            for w in 0..inst.n() {
                let (u, v) = (inst.u(m, w), inst.v(m, w));
                if u.is_zero() && v.is_zero() {
                    continue;
                }
                let balanced = u == &one && v == &one;
                let is_man_heavy = v.is_zero() && man_heavy.contains(u);
                let is_woman_heavy = u.is_zero() && woman_heavy.contains(v);
                if !(balanced || is_man_heavy || is_woman_heavy) {
                    return Err(Error::ParamDomain(format!(
                        "cell ({m}, {w}) has values ({u}, {v}) outside the edge taxonomy"
                    )));
                }
            }
        }
        let bindings = self.agent_bindings();
        let mut men_seen = vec![false; inst.n()];
        let mut women_seen = vec![false; inst.n()];
        for (name, (side, idx)) in &bindings {
            let seen = match side {
                Side::Man => &mut men_seen[*idx],
                Side::Woman => &mut women_seen[*idx],
            };
            if *seen {
                return Err(Error::ParamDomain(format!(
                    "binding {name} reuses agent {idx}"
                )));
            }
            *seen = true;
        }
        for &m in &self.dummy_men {
            if men_seen[m] {
                return Err(Error::ParamDomain(format!(
                    "dummy man {m} is bound to a role"
                )));
            }
            men_seen[m] = true;
        }
        for &w in &self.dummy_women {
            if women_seen[w] {
                return Err(Error::ParamDomain(format!(
                    "dummy woman {w} is bound to a role"
                )));
            }
            women_seen[w] = true;
        }
        if men_seen.iter().any(|s| !s) || women_seen.iter().any(|s| !s) {
            return Err(Error::ParamDomain(
                "agent without a gadget role or dummy mark".into(),
            ));
        }
        Ok(())
    }
}

/// Analytic welfare bounds for the artifact's variant; `separated` reports
/// whether the chosen parameters achieve sat_lower > unsat_upper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WelfareBounds {
    pub unsat_upper: Rat,
    pub sat_lower: Rat,
    pub separated: bool,
}

/// Lemma-level bounds: unsatisfiable instances admit stable welfare at
/// most `unsat_upper`, satisfiable ones at least `sat_lower`.
pub fn welfare_bounds(art: &ReductionArtifact) -> WelfareBounds {
    welfare_bounds_for(&art.params, art.formula.num_vars())
}

/// [`welfare_bounds`] from the parameters and (effective) variable count
/// alone, usable for parameter sizing without compiling the instance.
pub fn welfare_bounds_for(params: &ReductionParams, num_vars: usize) -> WelfareBounds {
    let n_vars = Rat::from_integer((num_vars as i64).into());
    let (unsat_upper, sat_lower) = match params {
        ReductionParams::Thm6 { alpha, k } => {
            let k1 = Rat::from_integer((*k as i64 - 1).into());
            (
                crate::instance::int(80) * alpha * &n_vars + crate::instance::int(4) * &k1,
                crate::instance::int(4) * &k1 * (alpha - crate::instance::rat(1, 2)),
            )
        }
        ReductionParams::AppC {
            epsilon,
            beta,
            gamma,
            ..
        } => (
            crate::instance::int(56) * beta * &n_vars + gamma * epsilon,
            gamma.clone(),
        ),
    };
    let separated = sat_lower > unsat_upper;
    WelfareBounds {
        unsat_upper,
        sat_lower,
        separated,
    }
}

fn ceil_to_integer(x: &Rat) -> Rat {
    x.ceil()
}

/// Smallest integer k with k - 1 >= 20 alpha N (alpha - 1/2 - delta) / delta,
/// clamped to the variant's minimum (2 for alpha >= 2, 3 otherwise).
pub fn suggest_k(f: &Formula2P2N, alpha: &Rat, delta: &Rat) -> Result<usize> {
    if delta <= &Rat::zero() {
        return Err(Error::ParamDomain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if alpha <= &crate::instance::rat(3, 2) {
        return Err(Error::ParamDomain(format!(
            "alpha must exceed 3/2, got {alpha}"
        )));
    }
    let n = Rat::from_integer((f.num_vars() as i64).into());
    let q = crate::instance::int(20) * alpha * &n * (alpha - crate::instance::rat(1, 2) - delta)
        / delta;
    let min_k = if alpha >= &crate::instance::int(2) {
        2i64
    } else {
        3
    };
    let k = if q.is_negative() || q.is_zero() {
        min_k
    } else {
        let ceil = ceil_to_integer(&q) + Rat::one();
        let ceil: i64 = ceil.to_integer().try_into().map_err(|_| {
            Error::ParamDomain("suggested k does not fit in a machine integer".into())
        })?;
        ceil.max(min_k)
    };
    Ok(k as usize)
}

/// Smallest integer gamma with gamma >= 56 beta N (1/eps - delta) / (eps delta),
/// where N counts the variables of the coupled augmentation the compiler
/// will build (twice the input formula's).
pub fn suggest_gamma(f: &Formula2P2N, epsilon: &Rat, delta: &Rat) -> Result<Rat> {
    let n_aug = 2 * f.num_vars();
    suggest_gamma_for_n(n_aug, epsilon, delta)
}

pub(crate) fn suggest_gamma_for_n(n_vars: usize, epsilon: &Rat, delta: &Rat) -> Result<Rat> {
    if epsilon <= &Rat::zero() || epsilon > &crate::instance::rat(3, 100) {
        return Err(Error::EpsilonOutOfRange(format!(
            "{epsilon} not in (0, 3/100]"
        )));
    }
    let inv_eps = Rat::one() / epsilon;
    if delta <= &Rat::zero() || delta >= &inv_eps {
        return Err(Error::ParamDomain(format!(
            "delta must lie in (0, 1/eps), got {delta}"
        )));
    }
    let beta = crate::instance::int(2) * (Rat::one() - epsilon);
    let n = Rat::from_integer((n_vars as i64).into());
    let q = crate::instance::int(56) * &beta * &n * (&inv_eps - delta) / (epsilon * delta);
    let gamma = ceil_to_integer(&q).max(Rat::one());
    Ok(gamma)
}
