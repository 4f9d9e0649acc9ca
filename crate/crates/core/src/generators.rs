//! Fixture games and seeded random games.
//!
//! The two fixtures are the two small hard instances for the zero-sum
//! approach: [`figure2_game`] contains a matching-pennies sub-game next to
//! an all-zero row, and [`figure1_game`] is the 2x2 shifting example. Both
//! are reconstructed from their zero-sum images `D = (R - C) / 2`.

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GeneratorError;
use crate::game::BimatrixGame;
use crate::rational::{int, rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameKind {
    Figure1,
    Figure2,
    /// Entries `k / 10^6`, uniform.
    RandomUniform,
    /// Entries uniform on `{0, 1/d, ..., d/d}`.
    RandomRationalGrid,
    /// Grid game with one cell that is both a row and a column maximum.
    PureNePlanted,
    /// Grid game with an embedded matching-pennies sub-game.
    MatchingPenniesPlanted,
    /// Grid game built from "big", "small" and near-zero cells so that no
    /// cell has both payoffs at least 1/3: there is no pure
    /// `(2/3 - z)`-WSNE for any small `z`.
    NoPureWsne,
}

impl GameKind {
    pub const ALL: [GameKind; 7] = [
        GameKind::Figure1,
        GameKind::Figure2,
        GameKind::RandomUniform,
        GameKind::RandomRationalGrid,
        GameKind::PureNePlanted,
        GameKind::MatchingPenniesPlanted,
        GameKind::NoPureWsne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::Figure1 => "figure1",
            GameKind::Figure2 => "figure2",
            GameKind::RandomUniform => "random-uniform",
            GameKind::RandomRationalGrid => "random-grid",
            GameKind::PureNePlanted => "pure-ne",
            GameKind::MatchingPenniesPlanted => "matching-pennies",
            GameKind::NoPureWsne => "no-pure-wsne",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameSpecSeed {
    pub kind: GameKind,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
    pub grid_denominator: u32,
}

impl GameSpecSeed {
    pub fn grid(rows: usize, cols: usize, seed: u64, grid_denominator: u32) -> Self {
        Self {
            kind: GameKind::RandomRationalGrid,
            rows,
            cols,
            seed,
            grid_denominator,
        }
    }

    pub fn with_kind(mut self, kind: GameKind) -> Self {
        self.kind = kind;
        self
    }
}

/// 3x2 game: rows `T`, `M` form a matching-pennies pair with payoffs
/// `(1, 1/3)` and `(1/3, 1)` crosswise, row `B` is all zeros.
pub fn figure2_game() -> BimatrixGame {
    let third = rat(1, 3);
    let r = vec![
        vec![int(1), third.clone()],
        vec![third.clone(), int(1)],
        vec![int(0), int(0)],
    ];
    let c = vec![
        vec![third.clone(), int(1)],
        vec![int(1), third],
        vec![int(0), int(0)],
    ];
    BimatrixGame::new(r, c).expect("fixture is valid")
}

/// 2x2 game `R = [[1, 1/3 - d], [1/3 - d, 1]]`, `C = [[1/3 - d, 1], [1, 1/3 - d]]`.
pub fn figure1_game(delta: &Rational) -> Result<BimatrixGame, GeneratorError> {
    figure1_padded(delta, 0)
}

/// [`figure1_game`] with `zero_rows` extra all-zero rows appended.
pub fn figure1_padded(delta: &Rational, zero_rows: usize) -> Result<BimatrixGame, GeneratorError> {
    if delta.is_negative() || *delta >= rat(1, 3) {
        return Err(GeneratorError::DeltaOutOfRange(delta.clone()));
    }
    let low = rat(1, 3) - delta;
    let mut r = vec![vec![int(1), low.clone()], vec![low.clone(), int(1)]];
    let mut c = vec![vec![low.clone(), int(1)], vec![int(1), low]];
    for _ in 0..zero_rows {
        r.push(vec![int(0), int(0)]);
        c.push(vec![int(0), int(0)]);
    }
    Ok(BimatrixGame::new(r, c).expect("fixture is valid"))
}

/// Deterministic game from a seed.
pub fn random_game(spec: &GameSpecSeed) -> Result<BimatrixGame, GeneratorError> {
    if spec.rows == 0 || spec.cols == 0 {
        return Err(GeneratorError::EmptyDims);
    }
    if spec.grid_denominator == 0 {
        return Err(GeneratorError::ZeroDenominator);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (rows, cols) = (spec.rows, spec.cols);
    let d = i64::from(spec.grid_denominator);
    let (r, c) = match spec.kind {
        GameKind::Figure1 => return figure1_game(&Rational::zero()),
        GameKind::Figure2 => return Ok(figure2_game()),
        GameKind::RandomUniform => (
            grid_matrix(&mut rng, rows, cols, 1_000_000),
            grid_matrix(&mut rng, rows, cols, 1_000_000),
        ),
        GameKind::RandomRationalGrid => (grid_matrix(&mut rng, rows, cols, d), grid_matrix(&mut rng, rows, cols, d)),
        GameKind::PureNePlanted => {
            let mut r = grid_matrix(&mut rng, rows, cols, d);
            let mut c = grid_matrix(&mut rng, rows, cols, d);
            let (i, j) = (rng.gen_range(0..rows), rng.gen_range(0..cols));
            r[i][j] = int(1);
            c[i][j] = int(1);
            (r, c)
        }
        GameKind::MatchingPenniesPlanted => {
            if rows < 2 || cols < 2 {
                return Err(GeneratorError::TooSmall {
                    kind: "matching-pennies",
                    rows: 2,
                    cols: 2,
                });
            }
            let mut r = grid_matrix(&mut rng, rows, cols, d);
            let mut c = grid_matrix(&mut rng, rows, cols, d);
            let is: Vec<usize> = (0..rows).collect::<Vec<_>>().choose_multiple(&mut rng, 2).copied().collect();
            let js: Vec<usize> = (0..cols).collect::<Vec<_>>().choose_multiple(&mut rng, 2).copied().collect();
            let (i, i2, j, j2) = (is[0], is[1], js[0], js[1]);
            // j in B_i and S_i2; j2 in B_i2 and S_i.
            r[i][j] = int(1);
            c[i2][j] = int(1);
            r[i2][j2] = int(1);
            c[i][j2] = int(1);
            (r, c)
        }
        GameKind::NoPureWsne => {
            if rows < 2 || cols < 2 {
                return Err(GeneratorError::TooSmall {
                    kind: "no-pure-wsne",
                    rows: 2,
                    cols: 2,
                });
            }
            no_pure_wsne(&mut rng, rows, cols, d.max(12))
        }
    };
    Ok(BimatrixGame::new(r, c).expect("generated entries lie in [0, 1]"))
}

fn grid_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, d: i64) -> Vec<Vec<Rational>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rat(rng.gen_range(0..=d), d)).collect())
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Cell {
    Big,
    Small,
    Low,
}

/// Every row gets a column-payoff-1 cell and every column a row-payoff-1
/// cell; no cell has both payoffs `>= 1/3`. Hence every cell leaves one
/// player a regret above 2/3.
fn no_pure_wsne(rng: &mut ChaCha8Rng, rows: usize, cols: usize, d: i64) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let mut kinds = vec![vec![Cell::Low; cols]; rows];
    for row in kinds.iter_mut() {
        for cell in row.iter_mut() {
            *cell = match rng.gen_range(0..5) {
                0 | 1 => Cell::Big,
                2 | 3 => Cell::Small,
                _ => Cell::Low,
            };
        }
    }
    let offset = rng.gen_range(0..cols);
    let anchor_col: Vec<usize> = (0..rows).map(|i| (i + offset) % cols).collect();
    let mut anchor_row = Vec::with_capacity(cols);
    for j in 0..cols {
        let candidates: Vec<usize> = (0..rows).filter(|&i| anchor_col[i] != j).collect();
        anchor_row.push(*candidates.choose(rng).expect("rows >= 2 with distinct anchors"));
    }

    let below_third = (d - 1) / 3; // largest k with k/d < 1/3
    let high_lo = (9 * d) / 10;
    let mid_lo = d / 4;
    let low_hi = d / 6;
    let mut r = vec![vec![Rational::zero(); cols]; rows];
    let mut c = vec![vec![Rational::zero(); cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            let (rv, cv) = match kinds[i][j] {
                Cell::Big => (rng.gen_range(high_lo..=d), rng.gen_range(mid_lo.min(below_third)..=below_third)),
                Cell::Small => (rng.gen_range(mid_lo.min(below_third)..=below_third), rng.gen_range(high_lo..=d)),
                Cell::Low => (rng.gen_range(0..=low_hi), rng.gen_range(0..=low_hi)),
            };
            r[i][j] = rat(rv, d);
            c[i][j] = rat(cv, d);
        }
    }
    for (i, &j) in anchor_col.iter().enumerate() {
        r[i][j] = rat(rng.gen_range(mid_lo.min(below_third)..=below_third), d);
        c[i][j] = int(1);
    }
    for (j, &i) in anchor_row.iter().enumerate() {
        r[i][j] = int(1);
        c[i][j] = rat(rng.gen_range(mid_lo.min(below_third)..=below_third), d);
    }
    (r, c)
}
