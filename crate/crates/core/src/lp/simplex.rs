//! Dense two-phase primal simplex.
//!
//! Every row receives a unit column (a slack, or an artificial for `>=` and
//! `=` rows) so the tableau columns of those unit columns hold `B^-1` and the
//! duals can be read off the objective row. Entering columns follow
//! Dantzig's rule; after a degenerate pivot Bland's rule takes over until the
//! objective moves again, which rules out cycling.

use super::{LpOutcome, LpProblem, LpSolution, Relation, Sense};
use crate::scalar::Scalar;

pub const DEFAULT_ITERATION_LIMIT: usize = 200_000;

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    /// Reduced-cost row: `c_B B^-1 A_j - c_j`.
    obj: Vec<T>,
    obj_value: T,
    iterations: usize,
}

enum Step {
    Optimal,
    Unbounded(usize),
    Limit,
}

impl<T: Scalar> Tableau<T> {
    fn price(&mut self, cost: &[T]) {
        let width = cost.len();
        self.obj = (0..width).map(|j| -cost[j].clone()).collect();
        self.obj_value = T::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if !self.rows[r][j].is_zero() {
                    self.obj[j] = self.obj[j].clone() + cb.clone() * self.rows[r][j].clone();
                }
            }
            self.obj_value = self.obj_value.clone() + cb.clone() * self.rhs[r].clone();
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        let nonzero: Vec<usize> = (0..self.rows[row].len()).filter(|&j| !self.rows[row][j].is_zero()).collect();
        for &j in &nonzero {
            self.rows[row][j] = self.rows[row][j].clone() / p.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / p;
        self.rows[row][col] = T::one();
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let f = self.rows[r][col].clone();
            for &j in &nonzero {
                self.rows[r][j] = self.rows[r][j].clone() - f.clone() * pivot_row[j].clone();
            }
            self.rows[r][col] = T::zero();
            self.rhs[r] = self.rhs[r].clone() - f * pivot_rhs.clone();
            if !T::EXACT && self.rhs[r].is_negligible() {
                self.rhs[r] = T::zero();
            }
        }
        let f = self.obj[col].clone();
        if !f.is_zero() {
            for &j in &nonzero {
                self.obj[j] = self.obj[j].clone() - f.clone() * pivot_row[j].clone();
            }
            self.obj[col] = T::zero();
            self.obj_value = self.obj_value.clone() - f * pivot_rhs;
        }
        self.basis[row] = col;
        self.iterations += 1;
    }

    /// Maximises over columns with `allowed[j]`.
    fn optimise(&mut self, allowed: &[bool], limit: usize) -> Step {
        let mut bland = false;
        loop {
            let mut entering = None;
            for j in 0..allowed.len() {
                if !allowed[j] || !self.obj[j].definitely_lt(&T::zero()) {
                    continue;
                }
                if bland {
                    entering = Some(j);
                    break;
                }
                if entering.is_none_or(|e: usize| self.obj[j] < self.obj[e]) {
                    entering = Some(j);
                }
            }
            let Some(e) = entering else { return Step::Optimal };
            if self.iterations >= limit {
                return Step::Limit;
            }
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][e];
                if a.is_negligible() || a.is_negative() {
                    continue;
                }
                let ratio = self.rhs[r].clone() / a.clone();
                let take = match &leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio.definitely_lt(best_ratio) || (ratio.approx_eq(best_ratio) && self.basis[r] < self.basis[*best])
                    }
                };
                if take {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, ratio)) = leave else { return Step::Unbounded(e) };
            bland = ratio.is_negligible();
            self.pivot(r, e);
        }
    }
}

pub fn solve<T: Scalar>(lp: &LpProblem<T>) -> LpOutcome<T> {
    solve_with_limit(lp, DEFAULT_ITERATION_LIMIT)
}

pub fn solve_with_limit<T: Scalar>(lp: &LpProblem<T>, limit: usize) -> LpOutcome<T> {
    let n = lp.variables.len();
    // Rows: constraints then one `x_j <= u_j` per bounded variable.
    let mut rows: Vec<(Vec<(usize, T)>, Relation, T)> =
        lp.constraints.iter().map(|c| (c.terms.clone(), c.relation, c.rhs.clone())).collect();
    let bounded: Vec<usize> = (0..n).filter(|&j| lp.variables[j].upper.is_some()).collect();
    for &j in &bounded {
        rows.push((vec![(j, T::one())], Relation::Le, lp.variables[j].upper.clone().expect("bounded")));
    }
    let m = rows.len();
    let mut flip = vec![false; m];
    for (i, (terms, rel, rhs)) in rows.iter_mut().enumerate() {
        if rhs.is_negative() {
            flip[i] = true;
            for (_, c) in terms.iter_mut() {
                *c = -c.clone();
            }
            *rhs = -rhs.clone();
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let art_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let width = n + slack_count + art_count;
    let mut table = Tableau {
        rows: vec![vec![T::zero(); width]; m],
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        obj: Vec::new(),
        obj_value: T::zero(),
        iterations: 0,
    };
    let mut unit = vec![0; m];
    let (mut next_slack, mut next_art) = (n, n + slack_count);
    for (i, (terms, rel, rhs)) in rows.into_iter().enumerate() {
        for (j, c) in terms {
            table.rows[i][j] = c;
        }
        match rel {
            Relation::Le => {
                table.rows[i][next_slack] = T::one();
                unit[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                table.rows[i][next_slack] = -T::one();
                next_slack += 1;
                table.rows[i][next_art] = T::one();
                unit[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                table.rows[i][next_art] = T::one();
                unit[i] = next_art;
                next_art += 1;
            }
        }
        table.basis.push(unit[i]);
        table.rhs.push(rhs);
    }
    let is_art = |j: usize| j >= n + slack_count;
    let read_duals = |table: &Tableau<T>, cost: &[T]| -> Vec<T> {
        (0..m).map(|i| table.obj[unit[i]].clone() + cost[unit[i]].clone()).collect()
    };
    let orient = |y: Vec<T>, negate: bool| -> (Vec<T>, Vec<T>) {
        let mut rows: Vec<T> = y.into_iter().enumerate().map(|(i, v)| if flip[i] != negate { -v } else { v }).collect();
        let tail = rows.split_off(lp.constraints.len());
        let mut bound_duals = vec![T::zero(); n];
        for (&j, w) in bounded.iter().zip(tail) {
            bound_duals[j] = w;
        }
        (rows, bound_duals)
    };

    if art_count > 0 {
        let cost: Vec<T> = (0..width).map(|j| if is_art(j) { -T::one() } else { T::zero() }).collect();
        table.price(&cost);
        let allowed = vec![true; width];
        match table.optimise(&allowed, limit) {
            Step::Limit => return LpOutcome::IterationLimit,
            Step::Unbounded(_) => unreachable!("phase one is bounded by zero"),
            Step::Optimal => {}
        }
        if table.obj_value.definitely_lt(&T::zero()) {
            let y = read_duals(&table, &cost);
            let mut farkas: Vec<T> = y.into_iter().enumerate().map(|(i, v)| if flip[i] { -v } else { v }).collect();
            let bound_farkas = farkas.split_off(lp.constraints.len());
            return LpOutcome::Infeasible { farkas, bound_farkas };
        }
        // Drive artificials out of the basis where a real column can replace them.
        for r in 0..m {
            if !is_art(table.basis[r]) {
                continue;
            }
            if let Some(j) = (0..n + slack_count).find(|&j| !table.rows[r][j].is_negligible()) {
                table.pivot(r, j);
            }
        }
    }

    let negate = lp.sense == Sense::Minimize;
    let cost: Vec<T> = (0..width)
        .map(|j| match lp.variables.get(j) {
            Some(v) if negate => -v.cost.clone(),
            Some(v) => v.cost.clone(),
            None => T::zero(),
        })
        .collect();
    table.price(&cost);
    let allowed: Vec<bool> = (0..width).map(|j| !is_art(j)).collect();
    let step = table.optimise(&allowed, limit);
    let mut x = vec![T::zero(); n];
    for (r, &b) in table.basis.iter().enumerate() {
        if b < n {
            x[b] = table.rhs[r].clone();
        }
    }
    match step {
        Step::Limit => LpOutcome::IterationLimit,
        Step::Unbounded(e) => {
            let mut ray = vec![T::zero(); n];
            if e < n {
                ray[e] = T::one();
            }
            for (r, &b) in table.basis.iter().enumerate() {
                if b < n {
                    ray[b] = -table.rows[r][e].clone();
                }
            }
            LpOutcome::Unbounded { point: x, ray }
        }
        Step::Optimal => {
            let (duals, bound_duals) = orient(read_duals(&table, &cost), negate);
            let objective = lp.objective_value(&x);
            LpOutcome::Optimal(LpSolution { objective, x, duals, bound_duals, iterations: table.iterations })
        }
    }
}
