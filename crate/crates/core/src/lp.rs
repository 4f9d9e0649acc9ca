//! Exact linear programming.
//!
//! A dense-tableau, two-phase primal simplex over [`Rational`]. Pivoting
//! uses Bland's rule (lowest-index entering column, lowest-index leaving
//! basic variable among ratio-test ties) so degenerate problems terminate,
//! and the result is a deterministic function of the input.
//!
//! Column layout of the internal standard form, which is also the index
//! space of [`Optimum::basis`]:
//!
//! 1. `0..num_vars`: the structural variables (the positive part, for free
//!    variables);
//! 2. one negative-part column per free variable, in variable order;
//! 3. one slack or surplus column per inequality row, in row order;
//! 4. one artificial column per `>=` or `=` row (after sign normalisation).

use num_traits::{One, Signed, Zero};

use crate::error::LpError;
use crate::game::dot;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self { coeffs, relation, rhs }
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        self.relation.holds(&dot(&self.coeffs, x), &self.rhs)
    }
}

/// `optimize objective . x + objective_offset` subject to `constraints`,
/// with `x_k >= 0` wherever `nonneg[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub objective_offset: Rational,
    pub constraints: Vec<Constraint>,
    pub nonneg: Vec<bool>,
}

impl LpProblem {
    /// A problem with all variables non-negative and no constraints yet.
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let num_vars = objective.len();
        Self {
            num_vars,
            sense,
            objective,
            objective_offset: Rational::zero(),
            constraints: Vec::new(),
            nonneg: vec![true; num_vars],
        }
    }

    pub fn with_offset(mut self, offset: Rational) -> Self {
        self.objective_offset = offset;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.nonneg[var] = false;
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.objective.len() != self.num_vars {
            return Err(LpError::Malformed(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.num_vars
            )));
        }
        if self.nonneg.len() != self.num_vars {
            return Err(LpError::Malformed("sign vector length differs from num_vars".into()));
        }
        if let Some((r, c)) = self
            .constraints
            .iter()
            .enumerate()
            .find(|(_, c)| c.coeffs.len() != self.num_vars)
        {
            return Err(LpError::Malformed(format!(
                "constraint {r} has {} coefficients for {} variables",
                c.coeffs.len(),
                self.num_vars
            )));
        }
        Ok(())
    }

    /// Exact feasibility check by substitution.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().zip(&self.nonneg).all(|(v, &nn)| !nn || !v.is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x) + &self.objective_offset
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    /// Objective value including the offset.
    pub value: Rational,
    pub assignment: Vec<Rational>,
    /// Basic column of each remaining tableau row (see the module docs).
    pub basis: Vec<usize>,
    /// One multiplier per constraint with `value - offset = duals . rhs`;
    /// the reduced costs `objective - A^T duals` are `<= 0` (maximize) or
    /// `>= 0` (minimize) on non-negative variables and zero on free ones.
    pub duals: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpSolution {
    Optimal(Optimum),
    Infeasible,
    Unbounded,
}

impl LpSolution {
    pub fn optimum(&self) -> Option<&Optimum> {
        match self {
            LpSolution::Optimal(o) => Some(o),
            _ => None,
        }
    }

    pub fn into_optimum(self) -> Option<Optimum> {
        match self {
            LpSolution::Optimal(o) => Some(o),
            _ => None,
        }
    }
}

/// Solves `problem` exactly.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.validate()?;
    Ok(Tableau::build(problem).run(problem))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    /// Constraint rows, each `width` coefficients followed by the rhs.
    rows: Vec<Vec<Rational>>,
    /// Original constraint index of each remaining row.
    origin: Vec<usize>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// Phase-two cost of every column (maximisation form).
    costs: Vec<Rational>,
    /// Reduced costs followed by minus the current objective value.
    objective: Vec<Rational>,
    /// Identity column of each original row in the initial tableau.
    unit_col: Vec<usize>,
    /// Whether the row was negated to make its rhs non-negative.
    negated: Vec<bool>,
    free_vars: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn build(p: &LpProblem) -> Self {
        let n = p.num_vars;
        let free_vars: Vec<usize> = (0..n).filter(|&k| !p.nonneg[k]).collect();
        let mut relations = Vec::with_capacity(p.constraints.len());
        let mut negated = Vec::with_capacity(p.constraints.len());
        for c in &p.constraints {
            let neg = c.rhs.is_negative();
            negated.push(neg);
            relations.push(if neg { c.relation.flipped() } else { c.relation });
        }
        let n_slack = relations.iter().filter(|r| **r != Relation::Eq).count();
        let n_art = relations.iter().filter(|r| **r != Relation::Le).count();
        let slack_start = n + free_vars.len();
        let art_start = slack_start + n_slack;
        let width = art_start + n_art;

        let mut kinds = vec![ColumnKind::Structural; slack_start];
        kinds.extend(std::iter::repeat_n(ColumnKind::Slack, n_slack));
        kinds.extend(std::iter::repeat_n(ColumnKind::Artificial, n_art));

        let sign = match p.sense {
            Sense::Maximize => Rational::one(),
            Sense::Minimize => -Rational::one(),
        };
        let mut costs = vec![Rational::zero(); width];
        for (cost, obj) in costs.iter_mut().zip(&p.objective) {
            *cost = obj * &sign;
        }
        for (f, &k) in free_vars.iter().enumerate() {
            costs[n + f] = -&costs[k];
        }

        let mut rows = Vec::with_capacity(p.constraints.len());
        let mut basis = Vec::with_capacity(p.constraints.len());
        let mut unit_col = Vec::with_capacity(p.constraints.len());
        let (mut next_slack, mut next_art) = (slack_start, art_start);
        for (r, c) in p.constraints.iter().enumerate() {
            let flip = if negated[r] { -Rational::one() } else { Rational::one() };
            let mut row = vec![Rational::zero(); width + 1];
            for (cell, coeff) in row.iter_mut().zip(&c.coeffs) {
                *cell = coeff * &flip;
            }
            for (f, &k) in free_vars.iter().enumerate() {
                row[n + f] = -&row[k];
            }
            row[width] = &c.rhs * &flip;
            match relations[r] {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    unit_col.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    unit_col.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    unit_col.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }

        Self {
            origin: (0..rows.len()).collect(),
            rows,
            basis,
            kinds,
            costs,
            objective: Vec::new(),
            unit_col,
            negated,
            free_vars,
            width,
        }
    }

    fn run(mut self, p: &LpProblem) -> LpSolution {
        if self.kinds.contains(&ColumnKind::Artificial) {
            let phase1: Vec<Rational> = self
                .kinds
                .iter()
                .map(|k| match k {
                    ColumnKind::Artificial => -Rational::one(),
                    _ => Rational::zero(),
                })
                .collect();
            self.price(&phase1);
            let bounded = self.iterate(true);
            debug_assert!(bounded, "phase one is bounded above by zero");
            if self.objective[self.width].is_positive() {
                // Negative optimum of -sum(artificials): no feasible point.
                return LpSolution::Infeasible;
            }
            self.expel_artificials();
        }
        let costs = self.costs.clone();
        self.price(&costs);
        if !self.iterate(false) {
            return LpSolution::Unbounded;
        }
        LpSolution::Optimal(self.extract(p))
    }

    /// Recomputes the reduced-cost row for `costs` at the current basis.
    fn price(&mut self, costs: &[Rational]) {
        let mut obj: Vec<Rational> = costs.iter().cloned().chain([Rational::zero()]).collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (o, a) in obj.iter_mut().zip(row) {
                if !a.is_zero() {
                    *o -= cb * a;
                }
            }
        }
        self.objective = obj;
    }

    /// Bland-rule pivoting until optimal (`true`) or unbounded (`false`).
    fn iterate(&mut self, phase_one: bool) -> bool {
        loop {
            let entering = (0..self.width).find(|&j| {
                (phase_one || self.kinds[j] != ColumnKind::Artificial) && self.objective[j].is_positive()
            });
            let Some(col) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = &row[col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / a;
                let better = match &leaving {
                    None => true,
                    Some((best_r, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r]),
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        for v in self.rows[pr].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[pr]);
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r == pr {
                continue;
            }
            eliminate(row, &pivot_row, pc);
        }
        eliminate(&mut self.objective, &pivot_row, pc);
        self.rows[pr] = pivot_row;
        self.basis[pr] = pc;
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are linearly dependent on the others and are dropped.
    fn expel_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.kinds[self.basis[r]] != ColumnKind::Artificial {
                r += 1;
                continue;
            }
            let replacement =
                (0..self.width).find(|&j| self.kinds[j] != ColumnKind::Artificial && !self.rows[r][j].is_zero());
            match replacement {
                Some(col) => {
                    self.pivot(r, col);
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                    self.origin.remove(r);
                }
            }
        }
    }

    fn extract(&self, p: &LpProblem) -> Optimum {
        let n = p.num_vars;
        let mut values = vec![Rational::zero(); self.width];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            values[b] = row[self.width].clone();
        }
        let mut assignment: Vec<Rational> = values[..n].to_vec();
        for (f, &k) in self.free_vars.iter().enumerate() {
            assignment[k] -= &values[n + f];
        }

        let mut duals = vec![Rational::zero(); p.constraints.len()];
        for &orig in &self.origin {
            let u = self.unit_col[orig];
            let mut pi = &self.costs[u] - &self.objective[u];
            if self.negated[orig] {
                pi = -pi;
            }
            if p.sense == Sense::Minimize {
                pi = -pi;
            }
            duals[orig] = pi;
        }

        Optimum {
            value: p.objective_at(&assignment),
            assignment,
            basis: self.basis.clone(),
            duals,
        }
    }
}

fn eliminate(row: &mut [Rational], pivot_row: &[Rational], pc: usize) {
    let factor = row[pc].clone();
    if factor.is_zero() {
        return;
    }
    for (v, p) in row.iter_mut().zip(pivot_row) {
        if !p.is_zero() {
            *v -= &factor * p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn optimum(p: &LpProblem) -> Optimum {
        solve_lp(p).unwrap().into_optimum().expect("optimal")
    }

    #[test]
    fn box_maximum() {
        let mut p = LpProblem::new(Sense::Maximize, v(&[1, 1]));
        p.constrain(v(&[1, 0]), Relation::Le, int(1));
        p.constrain(v(&[0, 1]), Relation::Le, int(1));
        let o = optimum(&p);
        assert_eq!(o.value, int(2));
        assert_eq!(o.assignment, v(&[1, 1]));
        assert_eq!(o.duals, v(&[1, 1]));
    }

    #[test]
    fn minimum_of_lower_bounds() {
        let mut p = LpProblem::new(Sense::Minimize, v(&[1]));
        p.constrain(v(&[1]), Relation::Ge, rat(1, 3));
        p.constrain(v(&[1]), Relation::Ge, rat(2, 5));
        let o = optimum(&p);
        assert_eq!(o.value, rat(2, 5));
        assert_eq!(o.duals, vec![int(0), int(1)]);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut p = LpProblem::new(Sense::Maximize, v(&[1]));
        p.constrain(v(&[1]), Relation::Le, int(1));
        p.constrain(v(&[1]), Relation::Ge, int(2));
        assert_eq!(solve_lp(&p).unwrap(), LpSolution::Infeasible);

        let mut p = LpProblem::new(Sense::Maximize, v(&[1, 0]));
        p.constrain(v(&[1, -1]), Relation::Le, int(1));
        assert_eq!(solve_lp(&p).unwrap(), LpSolution::Unbounded);
    }

    #[test]
    fn free_variables_and_negative_rhs() {
        // min x s.t. x >= -3, x free
        let mut p = LpProblem::new(Sense::Minimize, v(&[1]));
        p.set_free(0);
        p.constrain(v(&[1]), Relation::Ge, int(-3));
        let o = optimum(&p);
        assert_eq!(o.value, int(-3));
        assert_eq!(o.assignment, v(&[-3]));
        assert_eq!(o.duals, v(&[1]));

        // max x + y s.t. -x - y >= -4, x - y = 1
        let mut p = LpProblem::new(Sense::Maximize, v(&[1, 1]));
        p.constrain(v(&[-1, -1]), Relation::Ge, int(-4));
        p.constrain(v(&[1, -1]), Relation::Eq, int(1));
        let o = optimum(&p);
        assert_eq!(o.value, int(4));
        assert_eq!(o.assignment, vec![rat(5, 2), rat(3, 2)]);
        assert!(p.is_feasible(&o.assignment));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut p = LpProblem::new(Sense::Maximize, v(&[1, 2]));
        p.constrain(v(&[1, 1]), Relation::Eq, int(1));
        p.constrain(v(&[2, 2]), Relation::Eq, int(2));
        let o = optimum(&p);
        assert_eq!(o.value, int(2));
        assert_eq!(o.basis.len(), 1);
        // Duals still certify the optimum.
        let rhs_dot: Rational = o.duals.iter().zip([int(1), int(2)]).map(|(d, b)| d * b).sum();
        assert_eq!(rhs_dot, o.value);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the textbook largest-coefficient rule.
        let mut p = LpProblem::new(Sense::Maximize, vec![rat(3, 4), int(-150), rat(1, 50), int(-6)]);
        p.constrain(vec![rat(1, 4), int(-60), rat(-1, 25), int(9)], Relation::Le, int(0));
        p.constrain(vec![rat(1, 2), int(-90), rat(-1, 50), int(3)], Relation::Le, int(0));
        p.constrain(v(&[0, 0, 1, 0]), Relation::Le, int(1));
        let o = optimum(&p);
        assert_eq!(o.value, rat(1, 20));
    }

    #[test]
    fn offset_is_added() {
        let mut p = LpProblem::new(Sense::Maximize, v(&[1])).with_offset(rat(1, 2));
        p.constrain(v(&[1]), Relation::Le, int(1));
        assert_eq!(optimum(&p).value, rat(3, 2));
    }

    #[test]
    fn malformed_input_is_rejected() {
        let mut p = LpProblem::new(Sense::Maximize, v(&[1, 1]));
        p.constrain(v(&[1]), Relation::Le, int(1));
        assert!(matches!(solve_lp(&p), Err(LpError::Malformed(_))));
    }

    #[test]
    fn deterministic() {
        let mut p = LpProblem::new(Sense::Maximize, v(&[1, 1, 1]));
        p.constrain(v(&[1, 1, 0]), Relation::Le, int(1));
        p.constrain(v(&[0, 1, 1]), Relation::Le, int(1));
        p.constrain(v(&[1, 0, 1]), Relation::Le, int(1));
        assert_eq!(solve_lp(&p).unwrap(), solve_lp(&p).unwrap());
    }
}
