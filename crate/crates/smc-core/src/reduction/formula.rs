//! 2P2N-3SAT formulas: 3-CNF in which every variable appears exactly twice
//! positively and twice negatively, parsed from DIMACS CNF, plus the
//! copy-variable augmentation that guarantees at least two unsatisfied
//! clauses whenever the formula is unsatisfiable.

use crate::error::{Error, Result};

/// A signed literal over a 0-based variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Self {
        Lit {
            var,
            positive: false,
        }
    }
}

/// Records how an augmented formula maps back onto its original.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coupling {
    pub original_vars: usize,
    pub original_clauses: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula2P2N {
    num_vars: usize,
    clauses: Vec<[Lit; 3]>,
    coupling: Option<Coupling>,
}

impl Formula2P2N {
    pub fn new(num_vars: usize, clauses: Vec<[Lit; 3]>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::Not2P2N("formula has no variables".into()));
        }
        if 3 * clauses.len() != 4 * num_vars {
            return Err(Error::Not2P2N(format!(
                "expected 4N/3 = {} clauses for N = {num_vars}, found {}",
                4 * num_vars as f64 as usize / 3,
                clauses.len()
            )));
        }
        let mut pos = vec![0usize; num_vars];
        let mut neg = vec![0usize; num_vars];
        for (ci, clause) in clauses.iter().enumerate() {
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                if clause[a] == clause[b] {
                    return Err(Error::Not2P2N(format!(
                        "clause {} repeats a literal",
                        ci + 1
                    )));
                }
            }
            for lit in clause {
                if lit.var >= num_vars {
                    return Err(Error::Not2P2N(format!(
                        "clause {} uses variable {} beyond N = {num_vars}",
                        ci + 1,
                        lit.var + 1
                    )));
                }
                if lit.positive {
                    pos[lit.var] += 1;
                } else {
                    neg[lit.var] += 1;
                }
            }
        }
        for var in 0..num_vars {
            if pos[var] != 2 || neg[var] != 2 {
                return Err(Error::Not2P2N(format!(
                    "variable {} appears {} times positively and {} negatively, expected 2 and 2",
                    var + 1,
                    pos[var],
                    neg[var]
                )));
            }
        }
        Ok(Formula2P2N {
            num_vars,
            clauses,
            coupling: None,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[Lit; 3]] {
        &self.clauses
    }

    pub fn coupling(&self) -> Option<Coupling> {
        self.coupling
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars
            && self
                .clauses
                .iter()
                .all(|clause| clause.iter().any(|lit| assignment[lit.var] == lit.positive))
    }

    /// Doubles the formula with copy-variables and copy-clauses. The copy
    /// is independent, so satisfiability is preserved in both directions
    /// and an unsatisfiable formula leaves at least two clauses unsatisfied.
    pub fn augment_coupled(&self) -> Formula2P2N {
        let shift = self.num_vars;
        let mut clauses = self.clauses.clone();
        clauses.extend(self.clauses.iter().map(|clause| {
            clause.map(|lit| Lit {
                var: lit.var + shift,
                positive: lit.positive,
            })
        }));
        Formula2P2N {
            num_vars: 2 * self.num_vars,
            clauses,
            coupling: Some(Coupling {
                original_vars: self.num_vars,
                original_clauses: self.clauses.len(),
            }),
        }
    }

    /// Extends an assignment of the original variables to the augmented
    /// formula by giving each copy-variable its coupled value.
    pub fn extend_assignment(&self, base: &[bool]) -> Result<Vec<bool>> {
        let coupling = self
            .coupling
            .ok_or_else(|| Error::ParamDomain("formula has no coupling metadata".into()))?;
        if base.len() != coupling.original_vars {
            return Err(Error::ParamDomain(format!(
                "assignment has {} values, expected {}",
                base.len(),
                coupling.original_vars
            )));
        }
        let mut full = base.to_vec();
        full.extend_from_slice(base);
        Ok(full)
    }
}

/// Parses DIMACS CNF and validates the 2P2N structure.
pub fn parse_dimacs_2p2n(text: &str) -> Result<Formula2P2N> {
    let mut header: Option<(usize, usize)> = None;
    let mut literals: Vec<i64> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("bad DIMACS header '{line}'"),
                });
            }
            let vars = parts[2].parse().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: format!("bad variable count: {e}"),
            })?;
            let clauses = parts[3].parse().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: format!("bad clause count: {e}"),
            })?;
            header = Some((vars, clauses));
            continue;
        }
        for token in line.split_whitespace() {
            let lit: i64 = token.parse().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: format!("bad literal '{token}': {e}"),
            })?;
            literals.push(lit);
        }
    }
    let (num_vars, num_clauses) = header.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing 'p cnf' header".into(),
    })?;
    let mut clauses = Vec::with_capacity(num_clauses);
    let mut current: Vec<Lit> = Vec::new();
    for lit in literals {
        if lit == 0 {
            let clause: [Lit; 3] = current.clone().try_into().map_err(|_| {
                Error::Not2P2N(format!(
                    "clause {} has {} literals, expected 3",
                    clauses.len() + 1,
                    current.len()
                ))
            })?;
            clauses.push(clause);
            current.clear();
        } else {
            let var = lit.unsigned_abs() as usize - 1;
            current.push(Lit {
                var,
                positive: lit > 0,
            });
        }
    }
    if !current.is_empty() {
        return Err(Error::Not2P2N(
            "trailing clause without terminating 0".into(),
        ));
    }
    if clauses.len() != num_clauses {
        return Err(Error::Not2P2N(format!(
            "header declares {num_clauses} clauses, found {}",
            clauses.len()
        )));
    }
    Formula2P2N::new(num_vars, clauses)
}

/// Hand-built satisfiable 2P2N formula over three variables; doubling it
/// with [`Formula2P2N::augment_coupled`] gives the six-variable sibling.
pub fn sample_formula_n3() -> Formula2P2N {
    Formula2P2N::new(
        3,
        vec![
            [Lit::pos(0), Lit::pos(1), Lit::pos(2)],
            [Lit::pos(0), Lit::neg(1), Lit::neg(2)],
            [Lit::neg(0), Lit::pos(1), Lit::neg(2)],
            [Lit::neg(0), Lit::neg(1), Lit::pos(2)],
        ],
    )
    .expect("the sample formula is 2P2N")
}
