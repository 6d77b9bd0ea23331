//! Dense two-phase primal simplex over exact rationals with Bland's rule.
//! Small and deterministic; every optimum it reports is attained at a
//! basic (extreme-point) solution, which the support-size audits rely on.

use num_traits::Zero;

use crate::instance::Rat;

/// Constraint relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

/// `maximize objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<Rat>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct SimplexSolution {
    /// Values of the original variables.
    pub values: Vec<Rat>,
    pub objective: Rat,
    /// Columns (in the standard-form layout) that are basic, one per kept row.
    pub basis: Vec<usize>,
    /// Indices of the constraints that survived redundancy elimination,
    /// aligned with `basis`.
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum SimplexOutcome {
    Optimal(SimplexSolution),
    Infeasible,
    Unbounded,
}

impl SimplexOutcome {
    pub fn optimal(self) -> Option<SimplexSolution> {
        match self {
            SimplexOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    /// Equality standard form: every constraint gets rhs >= 0 and, for
    /// inequalities, a slack (+1) or surplus (-1) column appended in row
    /// order. Returns (rows, rhs, total columns).
    pub fn standard_form(&self) -> (Vec<Vec<Rat>>, Vec<Rat>, usize) {
        let nv = self.objective.len();
        let ineq = self
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let total = nv + ineq;
        let mut rows = Vec::with_capacity(self.constraints.len());
        let mut rhs = Vec::with_capacity(self.constraints.len());
        let mut slack_at = nv;
        for c in &self.constraints {
            let mut row = vec![Rat::zero(); total];
            let flip = c.rhs < Rat::zero();
            for (j, a) in c.coeffs.iter().enumerate() {
                row[j] = if flip { -a } else { a.clone() };
            }
            let b = if flip { -c.rhs.clone() } else { c.rhs.clone() };
            let rel = match (c.relation, flip) {
                (Relation::Eq, _) => Relation::Eq,
                (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
                (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
            };
            match rel {
                Relation::Le => {
                    row[slack_at] = Rat::from_integer(1.into());
                    slack_at += 1;
                }
                Relation::Ge => {
                    row[slack_at] = Rat::from_integer((-1).into());
                    slack_at += 1;
                }
                Relation::Eq => {}
            }
            rows.push(row);
            rhs.push(b);
        }
        (rows, rhs, total)
    }
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    /// Original constraint index per tableau row.
    row_ids: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize, reduced: &mut [Rat], value: &mut Rat) {
        let pivot = self.rows[row][col].clone();
        for x in self.rows[row].iter_mut() {
            if !x.is_zero() {
                *x /= &pivot;
            }
        }
        self.rhs[row] /= &pivot;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (dst, src) in self.rows[r].iter_mut().zip(pivot_row.iter()) {
                if !src.is_zero() {
                    *dst -= &factor * src;
                }
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        let factor = reduced[col].clone();
        if !factor.is_zero() {
            for (dst, src) in reduced.iter_mut().zip(pivot_row.iter()) {
                if !src.is_zero() {
                    *dst -= &factor * src;
                }
            }
            *value += &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Maximizes the cost vector with Bland's anti-cycling rule.
    /// Returns the objective value, or None when unbounded.
    fn optimize(&mut self, cost: &[Rat], allowed_cols: usize) -> Option<Rat> {
        let mut reduced = cost.to_vec();
        let mut value = Rat::zero();
        // Eliminate basic columns from the cost row.
        for row in 0..self.rows.len() {
            let b = self.basis[row];
            let factor = reduced[b].clone();
            if factor.is_zero() {
                continue;
            }
            let pivot_row = self.rows[row].clone();
            for (dst, src) in reduced.iter_mut().zip(pivot_row.iter()) {
                if !src.is_zero() {
                    *dst -= &factor * src;
                }
            }
            value += &factor * &self.rhs[row];
        }
        loop {
            // Bland: entering column is the smallest improving index.
            let Some(col) = (0..allowed_cols).find(|&j| reduced[j] > Rat::zero()) else {
                return Some(value);
            };
            // Ratio test; ties leave the row whose basic variable has the
            // smallest index.
            let mut best: Option<(Rat, usize, usize)> = None;
            for row in 0..self.rows.len() {
                let a = &self.rows[row][col];
                if a <= &Rat::zero() {
                    continue;
                }
                let ratio = &self.rhs[row] / a;
                let key = (ratio, self.basis[row], row);
                if best.as_ref().is_none_or(|b| (&key.0, key.1) < (&b.0, b.1)) {
                    best = Some(key);
                }
            }
            let Some((_, _, row)) = best else {
                return None; // unbounded in this column
            };
            self.pivot(row, col, &mut reduced, &mut value);
        }
    }
}

/// Exact rational optimum at an extreme point, or `Infeasible` /
/// `Unbounded` as distinguished results.
pub fn simplex_solve(lp: &LinearProgram) -> SimplexOutcome {
    let nv = lp.objective.len();
    let (mut rows, rhs, width) = lp.standard_form();
    let m = rows.len();

    // Attach artificial columns where no slack can start basic.
    let mut basis = Vec::with_capacity(m);
    let mut artificial_cols = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let slack = (nv..width).find(|&j| row[j] == Rat::from_integer(1.into()));
        match slack {
            Some(j) if rhs[i] >= Rat::zero() => basis.push(j),
            _ => {
                artificial_cols.push(width + artificial_cols.len());
                basis.push(usize::MAX); // fixed below
            }
        }
    }
    let total = width + artificial_cols.len();
    let mut next_artificial = width;
    for row in rows.iter_mut() {
        row.resize(total, Rat::zero());
    }
    for (i, b) in basis.iter_mut().enumerate() {
        if *b == usize::MAX {
            rows[i][next_artificial] = Rat::from_integer(1.into());
            *b = next_artificial;
            next_artificial += 1;
        }
    }

    let mut tableau = Tableau {
        rows,
        rhs,
        basis,
        row_ids: (0..m).collect(),
    };

    if next_artificial > width {
        // Phase 1: maximize minus the artificial sum.
        let mut cost = vec![Rat::zero(); total];
        for col in width..total {
            cost[col] = Rat::from_integer((-1).into());
        }
        let value = tableau
            .optimize(&cost, total)
            .expect("phase one objective is bounded above by zero");
        if !value.is_zero() {
            return SimplexOutcome::Infeasible;
        }
        // Drive leftover artificials out of the basis; a row that cannot
        // pivot on any structural column is redundant and gets dropped.
        let mut row = 0;
        while row < tableau.rows.len() {
            if tableau.basis[row] >= width {
                match (0..width).find(|&j| !tableau.rows[row][j].is_zero()) {
                    Some(col) => {
                        let mut dummy = vec![Rat::zero(); total];
                        let mut dummy_val = Rat::zero();
                        tableau.pivot(row, col, &mut dummy, &mut dummy_val);
                    }
                    None => {
                        tableau.rows.remove(row);
                        tableau.rhs.remove(row);
                        tableau.basis.remove(row);
                        tableau.row_ids.remove(row);
                        continue;
                    }
                }
            }
            row += 1;
        }
        for r in tableau.rows.iter_mut() {
            r.truncate(width);
        }
    }

    // Phase 2.
    let mut cost = vec![Rat::zero(); width];
    cost[..nv].clone_from_slice(&lp.objective);
    match tableau.optimize(&cost, width) {
        None => SimplexOutcome::Unbounded,
        Some(objective) => {
            let mut values = vec![Rat::zero(); nv];
            for (row, &col) in tableau.basis.iter().enumerate() {
                if col < nv {
                    values[col] = tableau.rhs[row].clone();
                }
            }
            SimplexOutcome::Optimal(SimplexSolution {
                values,
                objective,
                basis: tableau.basis,
                rows: tableau.row_ids,
            })
        }
    }
}
