//! Min-max strategies of the zero-sum game `(D, -D)` with `D = (R - C) / 2`.

use num_traits::{One, Zero};

use crate::error::SolverAnomaly;
use crate::game::{BimatrixGame, MixedStrategy, Profile};
use crate::lp::{solve_lp, LpProblem, Relation, Sense};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSumSolution {
    /// Row player's max-min strategy for `D`.
    pub x: MixedStrategy,
    /// Column player's min-max strategy for `D`.
    pub y: MixedStrategy,
    /// Value of `D` to the row player.
    pub value: Rational,
}

impl ZeroSumSolution {
    pub fn profile(&self) -> Profile {
        Profile::new(self.x.clone(), self.y.clone())
    }
}

/// Exact Nash equilibrium of `(D, -D)` for `D = (R - C) / 2`.
pub fn ks_zero_sum(game: &BimatrixGame) -> Result<ZeroSumSolution, SolverAnomaly> {
    solve_zero_sum(&game.zero_sum_matrix())
}

/// Solves the zero-sum game with row-player payoff matrix `d`: one LP for
/// each player, with the value as a free variable.
pub fn solve_zero_sum(d: &[Vec<Rational>]) -> Result<ZeroSumSolution, SolverAnomaly> {
    let rows = d.len();
    let cols = d[0].len();

    // max v  s.t.  sum_i x_i D_ij >= v  for all j,  sum x = 1
    let mut objective = vec![Rational::zero(); rows + 1];
    objective[rows] = Rational::one();
    let mut row_lp = LpProblem::new(Sense::Maximize, objective);
    row_lp.set_free(rows);
    for j in 0..cols {
        let mut coeffs: Vec<Rational> = d.iter().map(|r| r[j].clone()).collect();
        coeffs.push(-Rational::one());
        row_lp.constrain(coeffs, Relation::Ge, Rational::zero());
    }
    row_lp.constrain(simplex_row(rows), Relation::Eq, Rational::one());

    // min w  s.t.  sum_j D_ij y_j <= w  for all i,  sum y = 1
    let mut objective = vec![Rational::zero(); cols + 1];
    objective[cols] = Rational::one();
    let mut col_lp = LpProblem::new(Sense::Minimize, objective);
    col_lp.set_free(cols);
    for r in d {
        let mut coeffs = r.clone();
        coeffs.push(-Rational::one());
        col_lp.constrain(coeffs, Relation::Le, Rational::zero());
    }
    col_lp.constrain(simplex_row(cols), Relation::Eq, Rational::one());

    let (x, v) = strategy_and_value(&row_lp, rows, "row")?;
    let (y, w) = strategy_and_value(&col_lp, cols, "column")?;
    if v != w {
        return Err(SolverAnomaly(format!("min-max mismatch: row value {v}, column value {w}")));
    }
    Ok(ZeroSumSolution { x, y, value: v })
}

fn simplex_row(len: usize) -> Vec<Rational> {
    let mut row = vec![Rational::one(); len];
    row.push(Rational::zero());
    row
}

fn strategy_and_value(lp: &LpProblem, len: usize, side: &str) -> Result<(MixedStrategy, Rational), SolverAnomaly> {
    let opt = solve_lp(lp)
        .map_err(|e| SolverAnomaly(e.to_string()))?
        .into_optimum()
        .ok_or_else(|| SolverAnomaly(format!("{side} min-max LP has no optimum")))?;
    let mut probs = opt.assignment;
    let value = probs.pop().expect("value variable");
    debug_assert_eq!(probs.len(), len);
    let strategy = MixedStrategy::new(probs).map_err(|e| SolverAnomaly(e.to_string()))?;
    Ok((strategy, value))
}
