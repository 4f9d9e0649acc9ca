//! Executable versions of the inequalities behind the `2/3 - z` bound:
//! big/small/other column partitions, bad-row diagnostics, matching-pennies
//! detection and the shifted column strategies `y_imp` and `y(t)`.
//!
//! For a fixed `z`, a column `j` is *big* for row `i` when
//! `R[i][j] >= 2/3 + 2z`, *small* when `C[i][j] >= 2/3 + 2z` and *other*
//! otherwise. Row `i` is *q-bad* against `y` when `R_i . y = 2/3 + 2z - q z`;
//! it is *bad* when `q < 3`.

use num_traits::{One, Signed, Zero};

use crate::error::{AnalysisError, GameError};
use crate::game::{BimatrixGame, MixedStrategy, Profile};
use crate::rational::{int, rat, Rational};

/// `2/3 + 2z`
pub fn big_threshold(z: &Rational) -> Rational {
    rat(2, 3) + z * int(2)
}

/// `1/3 + z`: a cell with both payoffs at least this is a pure `(2/3 - z)`-WSNE.
pub fn pure_threshold(z: &Rational) -> Rational {
    rat(1, 3) + z
}

fn check_z(z: &Rational) -> Result<(), AnalysisError> {
    if z.is_negative() || *z >= rat(1, 6) {
        return Err(AnalysisError::ZOutOfRange(z.clone()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnPartition {
    pub row: usize,
    pub z: Rational,
    pub big: Vec<usize>,
    pub small: Vec<usize>,
    pub other: Vec<usize>,
    /// Columns that are both big and small. They appear in `big` and in
    /// `small`; a non-empty list means the game has a pure `(2/3 - z)`-WSNE.
    pub overlap: Vec<usize>,
}

impl ColumnPartition {
    pub fn is_partition(&self) -> bool {
        self.overlap.is_empty()
    }
}

pub fn partition_columns(game: &BimatrixGame, i: usize, z: &Rational) -> Result<ColumnPartition, AnalysisError> {
    check_z(z)?;
    game.check_row(i)?;
    let threshold = big_threshold(z);
    let mut p = ColumnPartition {
        row: i,
        z: z.clone(),
        big: Vec::new(),
        small: Vec::new(),
        other: Vec::new(),
        overlap: Vec::new(),
    };
    for j in 0..game.cols() {
        let big = *game.r(i, j) >= threshold;
        let small = *game.c(i, j) >= threshold;
        if big {
            p.big.push(j);
        }
        if small {
            p.small.push(j);
        }
        if big && small {
            p.overlap.push(j);
        }
        if !big && !small {
            p.other.push(j);
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadRowReport {
    pub row: usize,
    pub row_payoff: Rational,
    pub col_payoff: Rational,
    pub q: Rational,
    pub is_bad: bool,
    /// `R_i . y <= 2/3 + 2z` and `R_i . y - C_i . y <= 3z`. Both follow from
    /// the KS profile when it is not already a `(2/3 - z)`-WSNE and the game
    /// has no pure one; `q >= 0` relies on the first.
    pub within_ks_bounds: bool,
    pub partition: ColumnPartition,
    pub mass_big: Rational,
    pub mass_small: Rational,
    pub mass_other: Rational,
}

pub fn bad_row_report(game: &BimatrixGame, i: usize, y: &MixedStrategy, z: &Rational) -> Result<BadRowReport, AnalysisError> {
    if z.is_zero() {
        return Err(AnalysisError::ZeroZ);
    }
    let partition = partition_columns(game, i, z)?;
    let row_payoff = game.payoff_row(i, y)?;
    let col_payoff = crate::game::dot(&game.col_matrix()[i], y.probs());
    let q = (big_threshold(z) - &row_payoff) / z;
    let within_ks_bounds = row_payoff <= big_threshold(z) && &row_payoff - &col_payoff <= z * int(3);
    Ok(BadRowReport {
        row: i,
        is_bad: q < int(3),
        within_ks_bounds,
        mass_big: y.mass(&partition.big),
        mass_small: y.mass(&partition.small),
        mass_other: y.mass(&partition.other),
        row_payoff,
        col_payoff,
        q,
        partition,
    })
}

/// Slacks of the three mass inequalities for a bad row; each holds iff its
/// slack is non-negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassBoundsCheck {
    pub holds: bool,
    /// `2qz / (1/3 - 2z) - mass_other`
    pub other_slack: Rational,
    /// `mass_big - (1/3 + z - qz - (1/3 + z) mass_other) / (2/3 - z)`
    pub big_slack: Rational,
    /// `mass_small - (1/3 - 2z - qz - (1/3 + z) mass_other) / (2/3 - z)`
    pub small_slack: Rational,
}

/// Upper bound on the other-column mass of a q-bad row (Markov bound).
pub fn other_mass_bound(q: &Rational, z: &Rational) -> Rational {
    int(2) * q * z / (rat(1, 3) - z * int(2))
}

/// Lower bound on the big-column mass of a q-bad row.
pub fn big_mass_bound(q: &Rational, z: &Rational, mass_other: &Rational) -> Rational {
    (pure_threshold(z) - q * z - pure_threshold(z) * mass_other) / (rat(2, 3) - z)
}

/// Lower bound on the small-column mass of a q-bad row.
pub fn small_mass_bound(q: &Rational, z: &Rational, mass_other: &Rational) -> Rational {
    (rat(1, 3) - z * int(2) - q * z - pure_threshold(z) * mass_other) / (rat(2, 3) - z)
}

/// Evaluates the three mass inequalities for the row in `report`. The
/// inequalities are only guaranteed for a bad row of a KS profile in a game
/// without a pure `(2/3 - z)`-WSNE; the caller attests that.
pub fn check_proposition8(report: &BadRowReport) -> MassBoundsCheck {
    let z = &report.partition.z;
    let q = &report.q;
    let other_slack = other_mass_bound(q, z) - &report.mass_other;
    let big_slack = &report.mass_big - big_mass_bound(q, z, &report.mass_other);
    let small_slack = &report.mass_small - small_mass_bound(q, z, &report.mass_other);
    MassBoundsCheck {
        holds: !other_slack.is_negative() && !big_slack.is_negative() && !small_slack.is_negative(),
        other_slack,
        big_slack,
        small_slack,
    }
}

/// First cell (row-major) with both payoffs `>= 1/3 + z`, i.e. a pure
/// `(2/3 - z)`-WSNE that the bad-row analysis assumes away.
pub fn pure_wsne_cell(game: &BimatrixGame, z: &Rational) -> Option<(usize, usize)> {
    let t = pure_threshold(z);
    (0..game.rows())
        .flat_map(|i| (0..game.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| *game.r(i, j) >= t && *game.c(i, j) >= t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum AppendixAVerdict {
    /// The game has a cell with both payoffs `>= 1/3 + z`; nothing is checked.
    HypothesisViolated { row: usize, col: usize },
    Checked(AppendixACheck),
}

impl AppendixAVerdict {
    pub fn holds(&self) -> Option<bool> {
        match self {
            AppendixAVerdict::HypothesisViolated { .. } => None,
            AppendixAVerdict::Checked(c) => Some(c.holds),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppendixACheck {
    pub row: usize,
    /// Other columns with `R + C >= 1 + 3z`.
    pub sum_violations: Vec<usize>,
    /// The mass inequalities, evaluated only when the row is bad.
    pub mass_bounds: Option<MassBoundsCheck>,
    pub holds: bool,
}

/// Cell-wise `R[i][j] + C[i][j] < 1 + 3z` on the other columns of row `i`,
/// plus the three mass inequalities when `i` is bad against `y`.
pub fn check_appendix_a(game: &BimatrixGame, i: usize, y: &MixedStrategy, z: &Rational) -> Result<AppendixAVerdict, AnalysisError> {
    if let Some((row, col)) = pure_wsne_cell(game, z) {
        return Ok(AppendixAVerdict::HypothesisViolated { row, col });
    }
    let report = bad_row_report(game, i, y, z)?;
    let cap = int(1) + z * int(3);
    let sum_violations: Vec<usize> = report
        .partition
        .other
        .iter()
        .copied()
        .filter(|&j| game.r(i, j) + game.c(i, j) >= cap)
        .collect();
    let mass_bounds = report.is_bad.then(|| check_proposition8(&report));
    let holds = sum_violations.is_empty() && mass_bounds.as_ref().is_none_or(|m| m.holds);
    Ok(AppendixAVerdict::Checked(AppendixACheck {
        row: i,
        sum_violations,
        mass_bounds,
        holds,
    }))
}

/// Row-side findings for a KS profile `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SideReanalysis {
    /// Some supported row is not a `(2/3 - z)`-best response, so the
    /// inequalities below are guaranteed.
    pub applicable: bool,
    /// A supported row with `R_i . y < 3z` and `C_i . y < 3z`.
    pub low_payoff_row: Option<usize>,
    /// Rows with `R_i . y > 2/3 + 2z` or `R_i . y - C_i . y > 3z`.
    pub payoff_cap_violations: Vec<usize>,
    /// Bad rows with `C_i . y < 2/3 - z - qz`.
    pub col_payoff_violations: Vec<usize>,
    /// Bad rows failing a mass inequality.
    pub mass_violations: Vec<usize>,
    /// `(i, j)` with `j` other for `i` and `R + C >= 1 + 3z`.
    pub sum_violations: Vec<(usize, usize)>,
    pub bad_rows: Vec<usize>,
}

impl SideReanalysis {
    pub fn holds(&self) -> bool {
        !self.applicable
            || (self.low_payoff_row.is_some()
                && self.payoff_cap_violations.is_empty()
                && self.col_payoff_violations.is_empty()
                && self.mass_violations.is_empty()
                && self.sum_violations.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsReanalysis {
    /// Set when the game has a pure `(2/3 - z)`-WSNE cell; the sides are
    /// then left unchecked.
    pub pure_cell: Option<(usize, usize)>,
    pub row_side: SideReanalysis,
    /// The same checks on the transposed game with `(y, x)`.
    pub col_side: SideReanalysis,
}

impl KsReanalysis {
    pub fn applicable(&self) -> bool {
        self.pure_cell.is_none() && (self.row_side.applicable || self.col_side.applicable)
    }

    pub fn holds(&self) -> bool {
        self.pure_cell.is_some() || (self.row_side.holds() && self.col_side.holds())
    }
}

/// Checks every inequality of the KS reanalysis on a min-max profile of
/// `(D, -D)`, for both players.
pub fn ks_reanalysis(game: &BimatrixGame, profile: &Profile, z: &Rational) -> Result<KsReanalysis, AnalysisError> {
    if z.is_zero() {
        return Err(AnalysisError::ZeroZ);
    }
    check_z(z)?;
    game.check_profile(profile)?;
    if let Some(cell) = pure_wsne_cell(game, z) {
        return Ok(KsReanalysis {
            pure_cell: Some(cell),
            row_side: SideReanalysis::default(),
            col_side: SideReanalysis::default(),
        });
    }
    let row_side = side_reanalysis(game, &profile.row, &profile.col, z)?;
    let col_side = side_reanalysis(&game.transpose(), &profile.col, &profile.row, z)?;
    Ok(KsReanalysis {
        pure_cell: None,
        row_side,
        col_side,
    })
}

fn side_reanalysis(game: &BimatrixGame, x: &MixedStrategy, y: &MixedStrategy, z: &Rational) -> Result<SideReanalysis, AnalysisError> {
    let r_y = game.row_payoffs_against(y)?;
    let c_y: Vec<Rational> = game.col_matrix().iter().map(|row| crate::game::dot(row, y.probs())).collect();
    let best = crate::game::max_of(&r_y);
    let target = rat(2, 3) - z;
    let three_z = z * int(3);
    let support = x.support();
    let mut out = SideReanalysis {
        applicable: support.iter().any(|&i| &best - &r_y[i] > target),
        low_payoff_row: support.iter().copied().find(|&i| r_y[i] < three_z && c_y[i] < three_z),
        ..SideReanalysis::default()
    };
    for i in 0..game.rows() {
        if r_y[i] > big_threshold(z) || &r_y[i] - &c_y[i] > three_z {
            out.payoff_cap_violations.push(i);
        }
        let report = bad_row_report(game, i, y, z)?;
        let cap = int(1) + &three_z;
        for &j in &report.partition.other {
            if game.r(i, j) + game.c(i, j) >= cap {
                out.sum_violations.push((i, j));
            }
        }
        if report.is_bad {
            out.bad_rows.push(i);
            if c_y[i] < &target - &report.q * z {
                out.col_payoff_violations.push(i);
            }
            if !check_proposition8(&report).holds {
                out.mass_violations.push(i);
            }
        }
    }
    Ok(out)
}

/// Rows `(i, i2)` and columns `(j, j2)` with `j` big for `i` and small for
/// `i2`, and `j2` big for `i2` and small for `i`. The lexicographically
/// smallest quadruple is returned. Membership depends only on the game and
/// `z`, so no strategy is involved.
pub fn find_matching_pennies(game: &BimatrixGame, z: &Rational) -> Option<(usize, usize, usize, usize)> {
    let t = big_threshold(z);
    let big: Vec<Vec<bool>> = game.row_matrix().iter().map(|row| row.iter().map(|v| *v >= t).collect()).collect();
    let small: Vec<Vec<bool>> = game.col_matrix().iter().map(|row| row.iter().map(|v| *v >= t).collect()).collect();
    let (rows, cols) = (game.rows(), game.cols());
    for i in 0..rows {
        for i2 in (0..rows).filter(|&k| k != i) {
            for j in (0..cols).filter(|&j| big[i][j] && small[i2][j]) {
                if let Some(j2) = (0..cols).find(|&j2| j2 != j && big[i2][j2] && small[i][j2]) {
                    return Some((i, i2, j, j2));
                }
            }
        }
    }
    None
}

/// Uniform play on the two rows and two columns of a matching-pennies
/// quadruple; a `(2/3 - z)`-WSNE.
pub fn matching_pennies_profile(
    game: &BimatrixGame,
    quad: (usize, usize, usize, usize),
    z: &Rational,
) -> Result<Profile, AnalysisError> {
    let (i, i2, j, j2) = quad;
    game.check_row(i)?;
    game.check_row(i2)?;
    game.check_col(j)?;
    game.check_col(j2)?;
    let t = big_threshold(z);
    let ok = i != i2 && j != j2 && *game.r(i, j) >= t && *game.c(i2, j) >= t && *game.r(i2, j2) >= t && *game.c(i, j2) >= t;
    if !ok {
        return Err(AnalysisError::NotMatchingPennies {
            row: i,
            row2: i2,
            col: j,
            col2: j2,
        });
    }
    Ok(Profile::new(
        MixedStrategy::uniform_on(game.rows(), &[i, i2])?,
        MixedStrategy::uniform_on(game.cols(), &[j, j2])?,
    ))
}

/// The row with the largest payoff against `y` (lowest index on ties) and
/// that payoff.
pub fn worst_row(game: &BimatrixGame, y: &MixedStrategy) -> Result<(usize, Rational), GameError> {
    let payoffs = game.row_payoffs_against(y)?;
    let mut best = 0;
    for (i, p) in payoffs.iter().enumerate() {
        if *p > payoffs[best] {
            best = i;
        }
    }
    Ok((best, payoffs[best].clone()))
}

/// `y_imp`: the mass of the worst row's big columns moved onto its small
/// columns, proportionally to `y`.
pub fn improvement_strategy(game: &BimatrixGame, y: &MixedStrategy, z: &Rational) -> Result<MixedStrategy, AnalysisError> {
    if z.is_zero() {
        return Err(AnalysisError::ZeroZ);
    }
    let (ibar, _) = worst_row(game, y)?;
    let p = partition_columns(game, ibar, z)?;
    if !p.overlap.is_empty() {
        return Err(AnalysisError::Overlap {
            row: ibar,
            columns: p.overlap,
        });
    }
    let mass_big = y.mass(&p.big);
    let mass_small = y.mass(&p.small);
    if mass_small.is_zero() {
        return Err(AnalysisError::NoSmallMass { row: ibar });
    }
    let scale = Rational::one() + mass_big / mass_small;
    let mut probs = y.probs().to_vec();
    for &j in &p.big {
        probs[j] = Rational::zero();
    }
    for &j in &p.small {
        probs[j] = &probs[j] * &scale;
    }
    Ok(MixedStrategy::new(probs)?)
}

/// `y(t) = (1 - t) y + t y_imp`
pub fn mixed_improvement(y: &MixedStrategy, y_imp: &MixedStrategy, t: &Rational) -> Result<MixedStrategy, AnalysisError> {
    if t.is_negative() || *t > Rational::one() {
        return Err(AnalysisError::TOutOfRange(t.clone()));
    }
    if y.len() != y_imp.len() {
        return Err(GameError::StrategyLength {
            side: "column",
            expected: y.len(),
            found: y_imp.len(),
        }
        .into());
    }
    let s = Rational::one() - t;
    let probs = y.probs().iter().zip(y_imp.probs()).map(|(a, b)| &s * a + t * b).collect();
    Ok(MixedStrategy::new(probs)?)
}

/// Mass of `y` on the nine intersections of row `ibar`'s partition (first
/// letter) with row `i`'s partition (second letter).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionMass {
    pub bb: Rational,
    pub bs: Rational,
    pub bo: Rational,
    pub sb: Rational,
    pub ss: Rational,
    pub so: Rational,
    pub ob: Rational,
    pub os: Rational,
    pub oo: Rational,
}

impl IntersectionMass {
    /// The nine masses in the order `bb, bs, bo, sb, ss, so, ob, os, oo`.
    pub fn to_array(&self) -> [Rational; 9] {
        [
            self.bb.clone(),
            self.bs.clone(),
            self.bo.clone(),
            self.sb.clone(),
            self.ss.clone(),
            self.so.clone(),
            self.ob.clone(),
            self.os.clone(),
            self.oo.clone(),
        ]
    }

    pub fn total(&self) -> Rational {
        self.to_array().iter().sum()
    }

    /// Upper bound on `R_i . y_imp`:
    /// `(1 + (bb+bs+bo)/(sb+ss+so)) (sb + (1/3+z) ss + (2/3+2z) so) + ob + (1/3+z) os + (2/3+2z) oo`.
    /// `None` when `sb + ss + so = 0`.
    pub fn improved_payoff_bound(&self, z: &Rational) -> Option<Rational> {
        let small = &self.sb + &self.ss + &self.so;
        if small.is_zero() {
            return None;
        }
        let big = &self.bb + &self.bs + &self.bo;
        let (low, mid) = (pure_threshold(z), big_threshold(z));
        let factor = Rational::one() + big / small;
        Some(factor * (&self.sb + &low * &self.ss + &mid * &self.so) + &self.ob + low * &self.os + mid * &self.oo)
    }
}

pub fn intersection_mass(
    game: &BimatrixGame,
    i: usize,
    ibar: usize,
    y: &MixedStrategy,
    z: &Rational,
) -> Result<IntersectionMass, AnalysisError> {
    game.check_len(y, game.cols(), "column")?;
    let pi = partition_columns(game, i, z)?;
    let pbar = partition_columns(game, ibar, z)?;
    for p in [&pi, &pbar] {
        if !p.overlap.is_empty() {
            return Err(AnalysisError::Overlap {
                row: p.row,
                columns: p.overlap.clone(),
            });
        }
    }
    let m = |a: &[usize], b: &[usize]| -> Rational { a.iter().filter(|j| b.contains(j)).map(|&j| y[j].clone()).sum() };
    Ok(IntersectionMass {
        bb: m(&pbar.big, &pi.big),
        bs: m(&pbar.big, &pi.small),
        bo: m(&pbar.big, &pi.other),
        sb: m(&pbar.small, &pi.big),
        ss: m(&pbar.small, &pi.small),
        so: m(&pbar.small, &pi.other),
        ob: m(&pbar.other, &pi.big),
        os: m(&pbar.other, &pi.small),
        oo: m(&pbar.other, &pi.other),
    })
}
