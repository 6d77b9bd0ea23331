//! Gadget-by-gadget construction of the hardness instances.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{int, rat, AgentLabels, Rat, SmcInstance};

use super::formula::Formula2P2N;
use super::{
    suggest_gamma_for_n, Accumulator, ClauseGadget, ReductionArtifact, ReductionParams,
    VariableGadget, VcConnector,
};

struct Builder {
    men: Vec<String>,
    women: Vec<String>,
    edges: BTreeMap<(usize, usize), (Rat, Rat)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            men: Vec::new(),
            women: Vec::new(),
            edges: BTreeMap::new(),
        }
    }

    fn man(&mut self, label: String) -> usize {
        self.men.push(label);
        self.men.len() - 1
    }

    fn woman(&mut self, label: String) -> usize {
        self.women.push(label);
        self.women.len() - 1
    }

    fn edge(&mut self, m: usize, w: usize, u: Rat, v: Rat) {
        let previous = self.edges.insert((m, w), (u, v));
        assert!(
            previous.is_none(),
            "gadget edges must not collide at ({m}, {w})"
        );
    }

    fn finish(mut self) -> (SmcInstance, Vec<usize>, Vec<usize>) {
        let mut dummy_men = Vec::new();
        let mut dummy_women = Vec::new();
        while self.men.len() < self.women.len() {
            self.men.push(format!("pad.m{}", dummy_men.len() + 1));
            dummy_men.push(self.men.len() - 1);
        }
        while self.women.len() < self.men.len() {
            self.women.push(format!("pad.w{}", dummy_women.len() + 1));
            dummy_women.push(self.women.len() - 1);
        }
        let n = self.men.len();
        let mut u = vec![vec![Rat::zero(); n]; n];
        let mut v = vec![vec![Rat::zero(); n]; n];
        for ((m, w), (a, b)) in self.edges {
            u[m][w] = a;
            v[m][w] = b;
        }
        let inst = SmcInstance::with_labels(
            u,
            v,
            AgentLabels {
                men: self.men,
                women: self.women,
            },
        )
        .expect("compiled valuations are non-negative and square");
        (inst, dummy_men, dummy_women)
    }
}

fn add_variable_gadget(b: &mut Builder, index: usize) -> VariableGadget {
    let tag = format!("x{}", index + 1);
    let m1 = b.man(format!("{tag}.m1"));
    let m2 = b.man(format!("{tag}.m2"));
    let e1 = b.man(format!("{tag}.e1"));
    let e2 = b.man(format!("{tag}.e2"));
    let e3 = b.man(format!("{tag}.e3"));
    let w_bar1 = b.woman(format!("{tag}.wbar1"));
    let w_bar2 = b.woman(format!("{tag}.wbar2"));
    let f1 = b.woman(format!("{tag}.f1"));
    let f2 = b.woman(format!("{tag}.f2"));
    let g = VariableGadget {
        m1,
        m2,
        e1,
        e2,
        e3,
        w_bar1,
        w_bar2,
        f1,
        f2,
    };
    for (m, w) in [
        (g.e1, g.f1),
        (g.m1, g.f1),
        (g.m1, g.w_bar1),
        (g.e3, g.w_bar1),
        (g.e3, g.w_bar2),
        (g.m2, g.w_bar2),
        (g.m2, g.f2),
        (g.e2, g.f2),
        (g.m1, g.w_bar2),
        (g.m2, g.w_bar1),
    ] {
        b.edge(m, w, Rat::one(), Rat::one());
    }
    g
}

fn add_clause_gadget(b: &mut Builder, index: usize) -> (usize, usize, usize, [usize; 3]) {
    let tag = format!("c{}", index + 1);
    let m = b.man(format!("{tag}.m"));
    let e1 = b.man(format!("{tag}.e1"));
    let e2 = b.man(format!("{tag}.e2"));
    let w = [
        b.woman(format!("{tag}.w1")),
        b.woman(format!("{tag}.w2")),
        b.woman(format!("{tag}.w3")),
    ];
    for man in [e1, e2, m] {
        for woman in w {
            b.edge(man, woman, Rat::one(), Rat::one());
        }
    }
    (m, e1, e2, w)
}

/// Tracks which appearance (first or second) of each literal a connector
/// serves.
struct OccurrenceCounter {
    counts: BTreeMap<(usize, bool), usize>,
}

impl OccurrenceCounter {
    fn new() -> Self {
        OccurrenceCounter {
            counts: BTreeMap::new(),
        }
    }

    fn next(&mut self, var: usize, positive: bool) -> usize {
        let e = self.counts.entry((var, positive)).or_insert(0);
        let occ = *e;
        *e += 1;
        occ
    }
}

/// Compiles the exact-stability reduction for ternary values {0, 1, alpha}.
/// The connector and accumulator shapes switch at alpha = 2.
pub fn compile_thm6(f: &Formula2P2N, alpha: &Rat, k: usize) -> Result<ReductionArtifact> {
    if alpha <= &rat(3, 2) {
        return Err(Error::ParamDomain(format!(
            "reduction needs alpha > 3/2, got {alpha}"
        )));
    }
    if k < 2 {
        return Err(Error::ParamDomain(format!(
            "reduction needs k >= 2, got {k}"
        )));
    }
    let big = alpha >= &int(2);
    let a = alpha.clone();
    let mut b = Builder::new();

    let variables: Vec<VariableGadget> = (0..f.num_vars())
        .map(|x| add_variable_gadget(&mut b, x))
        .collect();
    let clause_parts: Vec<(usize, usize, usize, [usize; 3])> = (0..f.num_clauses())
        .map(|c| add_clause_gadget(&mut b, c))
        .collect();

    let mut occurrences = OccurrenceCounter::new();
    let mut connectors = Vec::new();
    for (ci, clause) in f.clauses().iter().enumerate() {
        for (p, lit) in clause.iter().enumerate() {
            let occ = occurrences.next(lit.var, lit.positive);
            let wcj = clause_parts[ci].3[p];
            let tag = format!("vc.c{}.p{}", ci + 1, p + 1);
            let vc = if lit.positive {
                let mxi = variables[lit.var].m(occ);
                if big {
                    b.edge(mxi, wcj, Rat::zero(), a.clone());
                    VcConnector {
                        clause: ci,
                        position: p,
                        literal: *lit,
                        occurrence: occ,
                        input: (mxi, wcj),
                        outputs: vec![(mxi, wcj)],
                        internal_men: vec![],
                        internal_women: vec![],
                        balanced: vec![],
                    }
                } else {
                    let wxc = b.woman(format!("{tag}.w1"));
                    let mxc = b.man(format!("{tag}.m1"));
                    b.edge(mxi, wxc, Rat::zero(), a.clone());
                    b.edge(mxc, wxc, Rat::one(), Rat::one());
                    b.edge(mxc, wcj, Rat::zero(), a.clone());
                    VcConnector {
                        clause: ci,
                        position: p,
                        literal: *lit,
                        occurrence: occ,
                        input: (mxi, wxc),
                        outputs: vec![(mxc, wcj)],
                        internal_men: vec![mxc],
                        internal_women: vec![wxc],
                        balanced: vec![(mxc, wxc)],
                    }
                }
            } else {
                let wbar = variables[lit.var].w_bar(occ);
                if big {
                    let m = b.man(format!("{tag}.m1"));
                    let wxc = b.woman(format!("{tag}.w1"));
                    b.edge(m, wbar, a.clone(), Rat::zero());
                    b.edge(m, wxc, Rat::one(), Rat::one());
                    b.edge(m, wcj, Rat::zero(), a.clone());
                    VcConnector {
                        clause: ci,
                        position: p,
                        literal: *lit,
                        occurrence: occ,
                        input: (m, wbar),
                        outputs: vec![(m, wcj)],
                        internal_men: vec![m],
                        internal_women: vec![wxc],
                        balanced: vec![(m, wxc)],
                    }
                } else {
                    let m1 = b.man(format!("{tag}.m1"));
                    let m2 = b.man(format!("{tag}.m2"));
                    let m3 = b.man(format!("{tag}.m3"));
                    let w1 = b.woman(format!("{tag}.w1"));
                    let w2 = b.woman(format!("{tag}.w2"));
                    let w3 = b.woman(format!("{tag}.w3"));
                    b.edge(m1, wbar, a.clone(), Rat::zero());
                    b.edge(m3, w1, a.clone(), Rat::zero());
                    b.edge(m3, w2, a.clone(), Rat::zero());
                    b.edge(m1, w2, Rat::zero(), a.clone());
                    b.edge(m2, wcj, Rat::zero(), a.clone());
                    b.edge(m3, wcj, Rat::zero(), a.clone());
                    b.edge(m1, w1, Rat::one(), Rat::one());
                    b.edge(m2, w2, Rat::one(), Rat::one());
                    b.edge(m3, w3, Rat::one(), Rat::one());
                    VcConnector {
                        clause: ci,
                        position: p,
                        literal: *lit,
                        occurrence: occ,
                        input: (m1, wbar),
                        outputs: vec![(m2, wcj), (m3, wcj)],
                        internal_men: vec![m1, m2, m3],
                        internal_women: vec![w1, w2, w3],
                        balanced: vec![(m1, w1), (m2, w2), (m3, w3)],
                    }
                }
            };
            connectors.push(vc);
        }
    }

    // Accumulator.
    let acc_m: Vec<usize> = (1..=k).map(|i| b.man(format!("acc.m{i}"))).collect();
    let acc_w: Vec<usize> = (1..=k).map(|i| b.woman(format!("acc.w{i}"))).collect();
    let acc_e1: Vec<usize> = (1..k).map(|i| b.man(format!("acc.e1_{i}"))).collect();
    let acc_f1: Vec<usize> = (1..k).map(|i| b.woman(format!("acc.f1_{i}"))).collect();
    let (acc_e2, e2_start) = if big {
        (
            (1..k)
                .map(|i| b.man(format!("acc.e2_{i}")))
                .collect::<Vec<_>>(),
            1,
        )
    } else {
        (
            (2..=k)
                .map(|i| b.man(format!("acc.e2_{i}")))
                .collect::<Vec<_>>(),
            2,
        )
    };
    let acc_f2: Vec<usize> = (2..=k).map(|i| b.woman(format!("acc.f2_{i}"))).collect();
    let (acc_e3, acc_f3) = if big {
        (
            (2..=k)
                .map(|i| b.man(format!("acc.e3_{i}")))
                .collect::<Vec<_>>(),
            (2..=k)
                .map(|i| b.woman(format!("acc.f3_{i}")))
                .collect::<Vec<_>>(),
        )
    } else {
        (Vec::new(), Vec::new())
    };
    let acc_wc: Vec<usize> = (1..=f.num_clauses())
        .map(|c| b.woman(format!("acc.wc{c}")))
        .collect();

    let mut cells = Vec::new();
    let mut balanced_nontine = Vec::new();
    let mut tines = Vec::new();
    let mut acc_edge = |b: &mut Builder, m: usize, w: usize, u: Rat, v: Rat| {
        b.edge(m, w, u, v);
        cells.push((m, w));
    };
    // Shared pieces: the diagonal woman-heavy chain and the tines.
    for i in 1..=k {
        acc_edge(&mut b, acc_m[i - 1], acc_w[i - 1], Rat::zero(), a.clone());
    }
    for i in 2..=k {
        acc_edge(&mut b, acc_m[i - 1], acc_w[i - 2], a.clone(), Rat::zero());
    }
    for (ci, &wc) in acc_wc.iter().enumerate() {
        let cell = (acc_m[0], wc);
        acc_edge(&mut b, cell.0, cell.1, Rat::one(), Rat::one());
        tines.push(cell);
        let _ = ci;
    }
    for i in 1..k {
        let cell = (acc_e1[i - 1], acc_w[i - 1]);
        acc_edge(&mut b, cell.0, cell.1, Rat::one(), Rat::one());
        balanced_nontine.push(cell);
        acc_edge(&mut b, acc_e1[i - 1], acc_f1[i - 1], Rat::zero(), a.clone());
    }
    for i in 2..=k {
        let cell = (acc_m[i - 1], acc_f2[i - 2]);
        acc_edge(&mut b, cell.0, cell.1, Rat::one(), Rat::one());
        balanced_nontine.push(cell);
    }
    if big {
        for i in 1..k {
            acc_edge(&mut b, acc_e2[i - 1], acc_w[i - 1], a.clone(), Rat::zero());
        }
        for i in 2..=k {
            acc_edge(&mut b, acc_e3[i - 2], acc_f2[i - 2], a.clone(), Rat::zero());
            acc_edge(&mut b, acc_m[i - 1], acc_f3[i - 2], Rat::zero(), a.clone());
        }
    } else {
        for i in 2..=k {
            acc_edge(&mut b, acc_e2[i - 2], acc_f2[i - 2], a.clone(), Rat::zero());
        }
        for i in 3..=k {
            acc_edge(&mut b, acc_m[i - 1], acc_f2[i - 3], a.clone(), Rat::zero());
        }
        for i in 1..k {
            acc_edge(&mut b, acc_e1[i - 1], acc_w[i], Rat::zero(), a.clone());
        }
    }

    // CA-connectors.
    let mut clauses = Vec::new();
    for (ci, &(m, e1, e2, w)) in clause_parts.iter().enumerate() {
        let ca_cell = (m, acc_wc[ci]);
        b.edge(ca_cell.0, ca_cell.1, Rat::zero(), a.clone());
        clauses.push(ClauseGadget {
            m,
            e1,
            e2,
            w,
            acc_woman: acc_wc[ci],
            ca_cell,
        });
    }

    let (instance, dummy_men, dummy_women) = b.finish();
    Ok(ReductionArtifact {
        instance,
        formula: f.clone(),
        params: ReductionParams::Thm6 { alpha: a, k },
        variables,
        clauses,
        connectors,
        accumulator: Accumulator {
            m: acc_m,
            w: acc_w,
            e1: acc_e1,
            f1: acc_f1,
            e2: acc_e2,
            e2_start,
            f2: acc_f2,
            e3: acc_e3,
            f3: acc_f3,
            tines,
            balanced_nontine,
            gamma_cell: None,
            cells,
        },
        dummy_men,
        dummy_women,
    })
}

/// Compiles the epsilon-stability reduction with values {0, 1, beta, gamma}.
/// The input formula is first augmented with coupled copies; beta is
/// 2(1 - eps) and gamma is the smallest integer meeting the sizing
/// inequality for the given delta.
pub fn compile_app_c(f: &Formula2P2N, epsilon: &Rat, delta: &Rat) -> Result<ReductionArtifact> {
    let f = f.augment_coupled();
    let gamma = suggest_gamma_for_n(f.num_vars(), epsilon, delta)?;
    let beta = int(2) * (Rat::one() - epsilon);
    let mut b = Builder::new();

    let variables: Vec<VariableGadget> = (0..f.num_vars())
        .map(|x| add_variable_gadget(&mut b, x))
        .collect();
    let clause_parts: Vec<(usize, usize, usize, [usize; 3])> = (0..f.num_clauses())
        .map(|c| add_clause_gadget(&mut b, c))
        .collect();

    let mut occurrences = OccurrenceCounter::new();
    let mut connectors = Vec::new();
    for (ci, clause) in f.clauses().iter().enumerate() {
        for (p, lit) in clause.iter().enumerate() {
            let occ = occurrences.next(lit.var, lit.positive);
            let wcj = clause_parts[ci].3[p];
            let tag = format!("vc.c{}.p{}", ci + 1, p + 1);
            let vc = if lit.positive {
                let mxi = variables[lit.var].m(occ);
                b.edge(mxi, wcj, Rat::zero(), beta.clone());
                VcConnector {
                    clause: ci,
                    position: p,
                    literal: *lit,
                    occurrence: occ,
                    input: (mxi, wcj),
                    outputs: vec![(mxi, wcj)],
                    internal_men: vec![],
                    internal_women: vec![],
                    balanced: vec![],
                }
            } else {
                let wbar = variables[lit.var].w_bar(occ);
                let m = b.man(format!("{tag}.m1"));
                let wxc = b.woman(format!("{tag}.w1"));
                b.edge(m, wbar, beta.clone(), Rat::zero());
                b.edge(m, wxc, Rat::one(), Rat::one());
                b.edge(m, wcj, Rat::zero(), beta.clone());
                VcConnector {
                    clause: ci,
                    position: p,
                    literal: *lit,
                    occurrence: occ,
                    input: (m, wbar),
                    outputs: vec![(m, wcj)],
                    internal_men: vec![m],
                    internal_women: vec![wxc],
                    balanced: vec![(m, wxc)],
                }
            };
            connectors.push(vc);
        }
    }

    // Accumulator: one man, one gamma-valued woman, one tine per clause.
    let m1 = b.man("acc.m1".into());
    let w1 = b.woman("acc.w1".into());
    let acc_wc: Vec<usize> = (1..=f.num_clauses())
        .map(|c| b.woman(format!("acc.wc{c}")))
        .collect();
    let mut cells = Vec::new();
    let mut tines = Vec::new();
    for &wc in &acc_wc {
        b.edge(m1, wc, Rat::one(), Rat::one());
        tines.push((m1, wc));
        cells.push((m1, wc));
    }
    b.edge(m1, w1, Rat::zero(), gamma.clone());
    cells.push((m1, w1));

    let mut clauses = Vec::new();
    for (ci, &(m, e1, e2, w)) in clause_parts.iter().enumerate() {
        let ca_cell = (m, acc_wc[ci]);
        b.edge(ca_cell.0, ca_cell.1, Rat::zero(), Rat::one());
        clauses.push(ClauseGadget {
            m,
            e1,
            e2,
            w,
            acc_woman: acc_wc[ci],
            ca_cell,
        });
    }

    let (instance, dummy_men, dummy_women) = b.finish();
    Ok(ReductionArtifact {
        instance,
        formula: f,
        params: ReductionParams::AppC {
            epsilon: epsilon.clone(),
            delta: delta.clone(),
            beta,
            gamma,
        },
        variables,
        clauses,
        connectors,
        accumulator: Accumulator {
            m: vec![m1],
            w: vec![w1],
            e2_start: 1,
            tines,
            gamma_cell: Some((m1, w1)),
            cells,
            ..Accumulator::default()
        },
        dummy_men,
        dummy_women,
    })
}
