//! Linear programs over non-negative variables and an exact/float simplex.

mod lpfile;
mod simplex;

pub use lpfile::write_lp;
pub use simplex::{solve, solve_with_limit, DEFAULT_ITERATION_LIMIT};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable<T> {
    pub name: String,
    pub cost: T,
    pub upper: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub name: String,
    pub terms: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

/// `max` or `min` of `c·x` subject to linear rows and `0 <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<T> {
    pub sense: Sense,
    pub variables: Vec<Variable<T>>,
    pub constraints: Vec<Constraint<T>>,
}

impl<T: Scalar> LpProblem<T> {
    pub fn new(sense: Sense) -> Self {
        LpProblem { sense, variables: Vec::new(), constraints: Vec::new() }
    }

    pub fn add_variable(&mut self, name: impl Into<String>, cost: T) -> usize {
        self.variables.push(Variable { name: name.into(), cost, upper: None });
        self.variables.len() - 1
    }

    pub fn set_upper(&mut self, var: usize, upper: T) {
        self.variables[var].upper = Some(upper);
    }

    /// Adds a row; repeated variables in `terms` are summed.
    pub fn add_constraint(&mut self, name: impl Into<String>, terms: Vec<(usize, T)>, relation: Relation, rhs: T) -> usize {
        let mut merged: Vec<(usize, T)> = Vec::with_capacity(terms.len());
        for (var, coef) in terms {
            assert!(var < self.variables.len(), "constraint references undeclared variable {var}");
            match merged.iter_mut().find(|(v, _)| *v == var) {
                Some((_, c)) => *c = c.clone() + coef,
                None => merged.push((var, coef)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.constraints.push(Constraint { name: name.into(), terms: merged, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.variables.iter().zip(x).fold(T::zero(), |acc, (v, xv)| acc + v.cost.clone() * xv.clone())
    }

    pub fn row_activity(&self, row: usize, x: &[T]) -> T {
        self.constraints[row].terms.iter().fold(T::zero(), |acc, (v, c)| acc + c.clone() * x[*v].clone())
    }

    /// Largest violation of any row or bound by `x` (zero when feasible).
    pub fn primal_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        let mut bump = |v: T| {
            if v > worst {
                worst = v;
            }
        };
        for (j, var) in self.variables.iter().enumerate() {
            bump(-x[j].clone());
            if let Some(u) = &var.upper {
                bump(x[j].clone() - u.clone());
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            let gap = self.row_activity(i, x) - row.rhs.clone();
            match row.relation {
                Relation::Le => bump(gap),
                Relation::Ge => bump(-gap),
                Relation::Eq => bump(gap.abs()),
            }
        }
        worst
    }

    /// `c_j - y·A_j - w_j` per variable.
    pub fn reduced_costs(&self, duals: &[T], bound_duals: &[T]) -> Vec<T> {
        let mut out: Vec<T> = self.variables.iter().zip(bound_duals).map(|(v, w)| v.cost.clone() - w.clone()).collect();
        for (row, y) in self.constraints.iter().zip(duals) {
            for (v, c) in &row.terms {
                out[*v] = out[*v].clone() - c.clone() * y.clone();
            }
        }
        out
    }

    /// `b·y + u·w`.
    pub fn dual_objective(&self, duals: &[T], bound_duals: &[T]) -> T {
        let rows = self.constraints.iter().zip(duals).fold(T::zero(), |acc, (row, y)| acc + row.rhs.clone() * y.clone());
        self.variables.iter().zip(bound_duals).fold(rows, |acc, (v, w)| match &v.upper {
            Some(u) => acc + u.clone() * w.clone(),
            None => acc,
        })
    }

    /// Largest violation of dual feasibility by `(y, w)`: sign conditions on
    /// the multipliers and on the reduced costs.
    pub fn dual_violation(&self, duals: &[T], bound_duals: &[T]) -> T {
        let flip = |v: T| if self.sense == Sense::Maximize { v } else { -v };
        let mut worst = T::zero();
        let mut bump = |v: T| {
            if v > worst {
                worst = v;
            }
        };
        for (row, y) in self.constraints.iter().zip(duals) {
            match row.relation {
                Relation::Le => bump(flip(-y.clone())),
                Relation::Ge => bump(flip(y.clone())),
                Relation::Eq => {}
            }
        }
        for w in bound_duals {
            bump(flip(-w.clone()));
        }
        for rc in self.reduced_costs(duals, bound_duals) {
            bump(flip(rc));
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub objective: T,
    pub x: Vec<T>,
    /// One multiplier per row, signed so that `b·y + u·w` equals the optimum.
    pub duals: Vec<T>,
    /// Multipliers of the upper bounds (zero for unbounded variables).
    pub bound_duals: Vec<T>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    /// Row multipliers `y` with `y·A >= 0` on every column, `y >= 0` on `<=`
    /// rows, `y <= 0` on `>=` rows and `y·b < 0`. Bound rows come last,
    /// one per bounded variable in index order.
    Infeasible { farkas: Vec<T>, bound_farkas: Vec<T> },
    /// Feasible `x` plus a direction improving the objective without limit.
    Unbounded { point: Vec<T>, ray: Vec<T> },
    IterationLimit,
}

impl<T> LpOutcome<T> {
    pub fn optimal(self) -> Option<LpSolution<T>> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}
