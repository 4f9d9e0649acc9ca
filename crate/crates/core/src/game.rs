//! Bimatrix games, mixed strategies and well-supported regret.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::GameError;
use crate::rational::{is_in_unit_interval, Rational};

/// A two-player game given by row-player payoffs `R` and column-player
/// payoffs `C`, both `rows x cols` and with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BimatrixGame {
    rows: usize,
    cols: usize,
    row_payoffs: Vec<Vec<Rational>>,
    col_payoffs: Vec<Vec<Rational>>,
}

impl BimatrixGame {
    /// Builds a game, rejecting ragged or mismatched matrices and entries
    /// outside `[0, 1]`. Use [`normalize_game`] for arbitrary payoffs.
    pub fn new(row_payoffs: Vec<Vec<Rational>>, col_payoffs: Vec<Vec<Rational>>) -> Result<Self, GameError> {
        let (rows, cols) = check_shape(&row_payoffs, &col_payoffs)?;
        for (which, matrix) in [("R", &row_payoffs), ("C", &col_payoffs)] {
            for (i, row) in matrix.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if !is_in_unit_interval(v) {
                        return Err(GameError::OutOfRange {
                            matrix: which,
                            row: i,
                            col: j,
                            value: v.clone(),
                        });
                    }
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            row_payoffs,
            col_payoffs,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `R[i][j]`
    pub fn r(&self, i: usize, j: usize) -> &Rational {
        &self.row_payoffs[i][j]
    }

    /// `C[i][j]`
    pub fn c(&self, i: usize, j: usize) -> &Rational {
        &self.col_payoffs[i][j]
    }

    pub fn row_matrix(&self) -> &[Vec<Rational>] {
        &self.row_payoffs
    }

    pub fn col_matrix(&self) -> &[Vec<Rational>] {
        &self.col_payoffs
    }

    /// `R_i . y`
    pub fn payoff_row(&self, i: usize, y: &MixedStrategy) -> Result<Rational, GameError> {
        self.check_row(i)?;
        self.check_len(y, self.cols, "column")?;
        Ok(dot(&self.row_payoffs[i], y.probs()))
    }

    /// `C_j^T . x`
    pub fn payoff_col(&self, j: usize, x: &MixedStrategy) -> Result<Rational, GameError> {
        self.check_col(j)?;
        self.check_len(x, self.rows, "row")?;
        Ok(x.probs()
            .iter()
            .zip(&self.col_payoffs)
            .filter(|(p, _)| !p.is_zero())
            .fold(Rational::zero(), |acc, (p, row)| acc + p * &row[j]))
    }

    /// Payoff of every row against `y`.
    pub fn row_payoffs_against(&self, y: &MixedStrategy) -> Result<Vec<Rational>, GameError> {
        self.check_len(y, self.cols, "column")?;
        Ok(self.row_payoffs.iter().map(|row| dot(row, y.probs())).collect())
    }

    /// Payoff of every column against `x`.
    pub fn col_payoffs_against(&self, x: &MixedStrategy) -> Result<Vec<Rational>, GameError> {
        self.check_len(x, self.rows, "row")?;
        let mut out = vec![Rational::zero(); self.cols];
        for (p, row) in x.probs().iter().zip(&self.col_payoffs) {
            if p.is_zero() {
                continue;
            }
            for (acc, c) in out.iter_mut().zip(row) {
                *acc += p * c;
            }
        }
        Ok(out)
    }

    /// Best-response payoff minus the payoff of row `i` against `y`.
    pub fn regret_row(&self, i: usize, y: &MixedStrategy) -> Result<Rational, GameError> {
        self.check_row(i)?;
        let payoffs = self.row_payoffs_against(y)?;
        Ok(max_of(&payoffs) - &payoffs[i])
    }

    /// Best-response payoff minus the payoff of column `j` against `x`.
    pub fn regret_col(&self, j: usize, x: &MixedStrategy) -> Result<Rational, GameError> {
        self.check_col(j)?;
        let payoffs = self.col_payoffs_against(x)?;
        Ok(max_of(&payoffs) - &payoffs[j])
    }

    /// `D = (R - C) / 2`, the payoff matrix of the associated zero-sum game.
    pub fn zero_sum_matrix(&self) -> Vec<Vec<Rational>> {
        let half = Rational::new(1.into(), 2.into());
        self.row_payoffs
            .iter()
            .zip(&self.col_payoffs)
            .map(|(r, c)| r.iter().zip(c).map(|(a, b)| (a - b) * &half).collect())
            .collect()
    }

    /// The same game seen from the column player: `(C^T, R^T)`.
    pub fn transpose(&self) -> BimatrixGame {
        let t = |m: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
            (0..self.cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
        };
        BimatrixGame {
            rows: self.cols,
            cols: self.rows,
            row_payoffs: t(&self.col_payoffs),
            col_payoffs: t(&self.row_payoffs),
        }
    }

    pub fn check_profile(&self, profile: &Profile) -> Result<(), GameError> {
        self.check_len(&profile.row, self.rows, "row")?;
        self.check_len(&profile.col, self.cols, "column")
    }

    pub(crate) fn check_row(&self, i: usize) -> Result<(), GameError> {
        if i >= self.rows {
            return Err(GameError::IndexOutOfRange {
                side: "row",
                index: i,
                len: self.rows,
            });
        }
        Ok(())
    }

    pub(crate) fn check_col(&self, j: usize) -> Result<(), GameError> {
        if j >= self.cols {
            return Err(GameError::IndexOutOfRange {
                side: "column",
                index: j,
                len: self.cols,
            });
        }
        Ok(())
    }

    pub(crate) fn check_len(&self, s: &MixedStrategy, expected: usize, side: &'static str) -> Result<(), GameError> {
        if s.len() != expected {
            return Err(GameError::StrategyLength {
                side,
                expected,
                found: s.len(),
            });
        }
        Ok(())
    }
}

fn check_shape(r: &[Vec<Rational>], c: &[Vec<Rational>]) -> Result<(usize, usize), GameError> {
    let rows = r.len();
    let cols = r.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(GameError::Empty);
    }
    if r.iter().any(|row| row.len() != cols) {
        return Err(GameError::Ragged);
    }
    if c.len() != rows || c.iter().any(|row| row.len() != cols) {
        return Err(GameError::ShapeMismatch);
    }
    Ok((rows, cols))
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(_, w)| !w.is_zero())
        .fold(Rational::zero(), |acc, (v, w)| acc + v * w)
}

pub(crate) fn max_of(values: &[Rational]) -> Rational {
    values
        .iter()
        .max()
        .cloned()
        .expect("non-empty payoff vector")
}

/// Affine map `v -> (v - offset) / scale` applied by [`normalize_game`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub offset: Rational,
    /// Zero for a constant matrix, in which case everything maps to 0.
    pub scale: Rational,
}

impl AffineMap {
    pub fn apply(&self, v: &Rational) -> Rational {
        if self.scale.is_zero() {
            Rational::zero()
        } else {
            (v - &self.offset) / &self.scale
        }
    }

    /// Maps a normalized payoff back to original units.
    pub fn invert(&self, v: &Rational) -> Rational {
        v * &self.scale + &self.offset
    }

    fn fit(matrix: &[Vec<Rational>]) -> Self {
        let min = matrix.iter().flatten().min().cloned().unwrap_or_default();
        let max = matrix.iter().flatten().max().cloned().unwrap_or_default();
        AffineMap {
            scale: &max - &min,
            offset: min,
        }
    }
}

/// A game rescaled into `[0, 1]` together with the maps that did it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedGame {
    pub game: BimatrixGame,
    pub row_map: AffineMap,
    pub col_map: AffineMap,
}

/// Rescales each payoff matrix independently onto `[0, 1]` with
/// `v -> (v - min) / (max - min)`. A constant matrix becomes all zeros.
pub fn normalize_game(r_raw: &[Vec<Rational>], c_raw: &[Vec<Rational>]) -> Result<NormalizedGame, GameError> {
    check_shape(r_raw, c_raw)?;
    let row_map = AffineMap::fit(r_raw);
    let col_map = AffineMap::fit(c_raw);
    let map_all = |m: &[Vec<Rational>], f: &AffineMap| -> Vec<Vec<Rational>> {
        m.iter().map(|row| row.iter().map(|v| f.apply(v)).collect()).collect()
    };
    let game = BimatrixGame::new(map_all(r_raw, &row_map), map_all(c_raw, &col_map))?;
    Ok(NormalizedGame { game, row_map, col_map })
}

/// A probability vector over one player's pure strategies.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedStrategy(Vec<Rational>);

impl MixedStrategy {
    /// Validates non-negativity and that the entries sum to exactly 1.
    pub fn new(probs: Vec<Rational>) -> Result<Self, GameError> {
        if probs.is_empty() {
            return Err(GameError::InvalidStrategy("empty probability vector".into()));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(GameError::InvalidStrategy(format!("negative probability {p}")));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(GameError::InvalidStrategy(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self(probs))
    }

    pub fn pure(len: usize, index: usize) -> Result<Self, GameError> {
        if index >= len {
            return Err(GameError::IndexOutOfRange {
                side: "strategy",
                index,
                len,
            });
        }
        let mut probs = vec![Rational::zero(); len];
        probs[index] = Rational::one();
        Ok(Self(probs))
    }

    /// Uniform over `support`, zero elsewhere.
    pub fn uniform_on(len: usize, support: &[usize]) -> Result<Self, GameError> {
        if support.is_empty() {
            return Err(GameError::InvalidStrategy("empty support".into()));
        }
        let mut probs = vec![Rational::zero(); len];
        let share = Rational::new(1.into(), (support.len() as i64).into());
        for &k in support {
            if k >= len {
                return Err(GameError::IndexOutOfRange {
                    side: "strategy",
                    index: k,
                    len,
                });
            }
            if !probs[k].is_zero() {
                return Err(GameError::InvalidStrategy(format!("duplicate support index {k}")));
            }
            probs[k] = share.clone();
        }
        Ok(Self(probs))
    }

    pub fn uniform(len: usize) -> Result<Self, GameError> {
        Self::uniform_on(len, &(0..len).collect::<Vec<_>>())
    }

    pub fn probs(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_probs(self) -> Vec<Rational> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices with strictly positive probability, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_positive())
            .map(|(k, _)| k)
            .collect()
    }

    /// Probability mass on a set of indices.
    pub fn mass(&self, indices: &[usize]) -> Rational {
        indices.iter().map(|&k| &self.0[k]).sum()
    }
}

impl std::ops::Index<usize> for MixedStrategy {
    type Output = Rational;

    fn index(&self, k: usize) -> &Rational {
        &self.0[k]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    pub row: MixedStrategy,
    pub col: MixedStrategy,
}

impl Profile {
    pub fn new(row: MixedStrategy, col: MixedStrategy) -> Self {
        Self { row, col }
    }

    pub fn pure(game: &BimatrixGame, i: usize, j: usize) -> Result<Self, GameError> {
        Ok(Self {
            row: MixedStrategy::pure(game.rows(), i)?,
            col: MixedStrategy::pure(game.cols(), j)?,
        })
    }
}

/// Which procedure produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    /// Best pure profile.
    Pure,
    /// Best profile on a 2x2 support.
    TwoByTwo,
    /// LP improvement of the zero-sum (KS) profile.
    KsImproved,
    /// Supplied by a caller, e.g. a profile read from disk.
    Given,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Pure => "Pure",
            Source::TwoByTwo => "TwoByTwo",
            Source::KsImproved => "KsImproved",
            Source::Given => "Given",
        })
    }
}

/// A profile together with its exact well-supported approximation quality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WsneCertificate {
    pub profile: Profile,
    /// Largest regret over all supported pure strategies of both players.
    pub epsilon: Rational,
    /// `(row, regret)` for each row in the row player's support.
    pub row_regrets: Vec<(usize, Rational)>,
    /// `(column, regret)` for each column in the column player's support.
    pub col_regrets: Vec<(usize, Rational)>,
    pub source: Source,
}

impl WsneCertificate {
    /// Recomputes epsilon from the stored profile and compares bit-exactly.
    pub fn is_consistent(&self, game: &BimatrixGame) -> bool {
        epsilon_wsne_tagged(game, &self.profile, self.source).is_ok_and(|c| c == *self)
    }
}

/// Smallest `eps` such that `profile` is an `eps`-well-supported Nash
/// equilibrium of `game`.
pub fn epsilon_wsne(game: &BimatrixGame, profile: &Profile) -> Result<WsneCertificate, GameError> {
    epsilon_wsne_tagged(game, profile, Source::Given)
}

pub fn epsilon_wsne_tagged(game: &BimatrixGame, profile: &Profile, source: Source) -> Result<WsneCertificate, GameError> {
    game.check_profile(profile)?;
    let row_pay = game.row_payoffs_against(&profile.col)?;
    let col_pay = game.col_payoffs_against(&profile.row)?;
    let row_best = max_of(&row_pay);
    let col_best = max_of(&col_pay);
    let row_regrets: Vec<_> = profile
        .row
        .support()
        .into_iter()
        .map(|i| (i, &row_best - &row_pay[i]))
        .collect();
    let col_regrets: Vec<_> = profile
        .col
        .support()
        .into_iter()
        .map(|j| (j, &col_best - &col_pay[j]))
        .collect();
    let epsilon = row_regrets
        .iter()
        .chain(&col_regrets)
        .map(|(_, r)| r)
        .max()
        .cloned()
        .unwrap_or_default();
    Ok(WsneCertificate {
        profile: profile.clone(),
        epsilon,
        row_regrets,
        col_regrets,
        source,
    })
}

/// Expected-payoff approximation: the larger of the two players' gains from
/// switching to a best response.
pub fn epsilon_nash(game: &BimatrixGame, profile: &Profile) -> Result<Rational, GameError> {
    game.check_profile(profile)?;
    let row_pay = game.row_payoffs_against(&profile.col)?;
    let col_pay = game.col_payoffs_against(&profile.row)?;
    let row_value = dot(&row_pay, profile.row.probs());
    let col_value = dot(&col_pay, profile.col.probs());
    Ok(std::cmp::max(max_of(&row_pay) - row_value, max_of(&col_pay) - col_value))
}
