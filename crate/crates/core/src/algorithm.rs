//! The three-procedure solver.
//!
//! Each procedure produces a certified profile; [`solve`] returns the best
//! of the three. All procedures always run.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{GameError, SolverAnomaly};
use crate::game::{epsilon_wsne_tagged, BimatrixGame, MixedStrategy, Profile, Source, WsneCertificate};
use crate::lp::{solve_lp, LpProblem, Relation, Sense};
use crate::rational::Rational;
use crate::zerosum::ks_zero_sum;

/// Row and column supports on which to look for a good profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportPair {
    row_support: Vec<usize>,
    col_support: Vec<usize>,
}

impl SupportPair {
    /// Sorts and validates both supports against the game shape.
    pub fn new(game: &BimatrixGame, mut row_support: Vec<usize>, mut col_support: Vec<usize>) -> Result<Self, GameError> {
        for (support, len, side) in [
            (&mut row_support, game.rows(), "row"),
            (&mut col_support, game.cols(), "column"),
        ] {
            support.sort_unstable();
            support.dedup();
            if support.is_empty() {
                return Err(GameError::InvalidSupport(format!("empty {side} support")));
            }
            if let Some(&k) = support.iter().find(|&&k| k >= len) {
                return Err(GameError::IndexOutOfRange { side, index: k, len });
            }
        }
        Ok(Self {
            row_support,
            col_support,
        })
    }

    pub fn row_support(&self) -> &[usize] {
        &self.row_support
    }

    pub fn col_support(&self) -> &[usize] {
        &self.col_support
    }
}

/// Column strategy on `col_support` minimising the largest regret of any row
/// in `row_support`, and that regret.
///
/// `min eps  s.t.  R_i' . y - R_i . y <= eps  (i in S_r, i' any row)`, with
/// `y` a distribution on `S_c`. The optimum may leave members of `S_c` unused.
pub fn best_response_lp_row(game: &BimatrixGame, pair: &SupportPair) -> Result<(MixedStrategy, Rational), SolverAnomaly> {
    best_response_lp(
        game.cols(),
        game.rows(),
        &pair.row_support,
        &pair.col_support,
        |own, other| game.r(own, other),
    )
}

/// Mirror image of [`best_response_lp_row`]: a row strategy on `row_support`
/// minimising the largest regret of any column in `col_support`.
pub fn best_response_lp_col(game: &BimatrixGame, pair: &SupportPair) -> Result<(MixedStrategy, Rational), SolverAnomaly> {
    best_response_lp(
        game.rows(),
        game.cols(),
        &pair.col_support,
        &pair.row_support,
        |own, other| game.c(other, own),
    )
}

/// Same optimum as [`best_response_lp_row`]. Column supports of size one or
/// two are solved directly on the segment `[0, 1]`, larger ones by the LP.
pub fn best_response_row(game: &BimatrixGame, pair: &SupportPair) -> Result<(MixedStrategy, Rational), SolverAnomaly> {
    if pair.col_support.len() <= 2 {
        Ok(best_response_segment(
            game.cols(),
            game.rows(),
            &pair.row_support,
            &pair.col_support,
            |own, other| game.r(own, other),
        ))
    } else {
        best_response_lp_row(game, pair)
    }
}

/// Same optimum as [`best_response_lp_col`]; see [`best_response_row`].
pub fn best_response_col(game: &BimatrixGame, pair: &SupportPair) -> Result<(MixedStrategy, Rational), SolverAnomaly> {
    if pair.row_support.len() <= 2 {
        Ok(best_response_segment(
            game.rows(),
            game.cols(),
            &pair.col_support,
            &pair.row_support,
            |own, other| game.c(other, own),
        ))
    } else {
        best_response_lp_col(game, pair)
    }
}

/// The LP restricted to one or two mixed strategies. With `y = (1 - p, p)`
/// every constraint is a line `a + b p <= eps`, so the optimum is the
/// minimum over `[0, 1]` of the upper envelope of those lines and 0. That
/// minimum sits where the decreasing part of the envelope meets the
/// increasing part: `p* = max_k min_l x_kl` over lines `k` with negative
/// and `l` with positive slope, clamped to `[0, 1]`.
fn best_response_segment<'g>(
    mixed_len: usize,
    own_count: usize,
    checked: &[usize],
    mixed_support: &[usize],
    payoff: impl Fn(usize, usize) -> &'g Rational,
) -> (MixedStrategy, Rational) {
    let mut probs = vec![Rational::zero(); mixed_len];
    if let [k] = mixed_support {
        let best = (0..own_count).map(|d| payoff(d, *k)).max().expect("non-empty game");
        let eps = checked.iter().map(|&own| best - payoff(own, *k)).max().expect("non-empty support");
        probs[*k] = Rational::one();
        return (MixedStrategy::new(probs).expect("pure strategy"), eps);
    }
    let (k0, k1) = (mixed_support[0], mixed_support[1]);
    let mut falling: Vec<(Rational, Rational)> = Vec::new();
    let mut rising: Vec<(Rational, Rational)> = Vec::new();
    let mut flat = Rational::zero();
    for &own in checked {
        for deviation in (0..own_count).filter(|&d| d != own) {
            let a = payoff(deviation, k0) - payoff(own, k0);
            let b = payoff(deviation, k1) - payoff(own, k1) - &a;
            if a <= Rational::zero() && &a + &b <= Rational::zero() {
                continue;
            }
            if b.is_negative() {
                falling.push((a, b));
            } else if b.is_positive() {
                rising.push((a, b));
            } else {
                flat = std::cmp::max(flat, a);
            }
        }
    }
    let p = if falling.is_empty() {
        Rational::zero()
    } else if rising.is_empty() {
        Rational::one()
    } else {
        let crossing = falling
            .iter()
            .map(|(ak, bk)| {
                rising
                    .iter()
                    .map(|(al, bl)| (al - ak) / (bk - bl))
                    .min()
                    .expect("rising lines present")
            })
            .max()
            .expect("falling lines present");
        crossing.clamp(Rational::zero(), Rational::one())
    };
    let eps = falling
        .iter()
        .chain(&rising)
        .map(|(a, b)| a + b * &p)
        .fold(flat, std::cmp::max);
    probs[k0] = Rational::one() - &p;
    probs[k1] = p;
    (MixedStrategy::new(probs).expect("point of the segment"), eps)
}

/// Shared encoding. `payoff(own, other)` is the payoff of the deviating
/// player's pure strategy `own` against the opponent's pure strategy `other`;
/// the LP chooses the opponent's mixed strategy over `mixed_support`.
fn best_response_lp<'g>(
    mixed_len: usize,
    own_count: usize,
    checked: &[usize],
    mixed_support: &[usize],
    payoff: impl Fn(usize, usize) -> &'g Rational,
) -> Result<(MixedStrategy, Rational), SolverAnomaly> {
    let s = mixed_support.len();
    let mut objective = vec![Rational::zero(); s + 1];
    objective[s] = Rational::one();
    let mut lp = LpProblem::new(Sense::Minimize, objective);
    // eps >= 0 is implied by the i' = i constraints, which are omitted.
    for &own in checked {
        for deviation in (0..own_count).filter(|&d| d != own) {
            let mut coeffs: Vec<Rational> = mixed_support
                .iter()
                .map(|&k| payoff(deviation, k) - payoff(own, k))
                .collect();
            if coeffs.iter().all(|c| !num_traits::Signed::is_positive(c)) {
                // Never binding: the left-hand side is <= 0 <= eps.
                continue;
            }
            coeffs.push(-Rational::one());
            lp.constrain(coeffs, Relation::Le, Rational::zero());
        }
    }
    let mut sum = vec![Rational::one(); s];
    sum.push(Rational::zero());
    lp.constrain(sum, Relation::Eq, Rational::one());

    let opt = solve_lp(&lp)
        .map_err(|e| SolverAnomaly(e.to_string()))?
        .into_optimum()
        .ok_or_else(|| SolverAnomaly("support LP has no optimum".into()))?;
    let mut probs = vec![Rational::zero(); mixed_len];
    for (&k, p) in mixed_support.iter().zip(&opt.assignment) {
        probs[k] = p.clone();
    }
    let strategy = MixedStrategy::new(probs).map_err(|e| SolverAnomaly(e.to_string()))?;
    Ok((strategy, opt.value))
}

/// Result of the two support LPs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestOnSupports {
    /// Certificate for `(x*, y*)` with its realised epsilon.
    pub certificate: WsneCertificate,
    pub eps_x: Rational,
    pub eps_y: Rational,
}

impl BestOnSupports {
    /// `max(eps_x, eps_y)`; never below the realised epsilon.
    pub fn lp_bound(&self) -> Rational {
        std::cmp::max(&self.eps_x, &self.eps_y).clone()
    }
}

/// Solves both support LPs and certifies the resulting profile. The
/// realised epsilon is at most the LP bound, and the LP bound is at most the
/// epsilon of any profile whose supports are exactly `pair`.
pub fn best_on_supports(game: &BimatrixGame, pair: &SupportPair, source: Source) -> Result<BestOnSupports, SolverAnomaly> {
    let (y, eps_y) = best_response_row(game, pair)?;
    let (x, eps_x) = best_response_col(game, pair)?;
    let certificate =
        epsilon_wsne_tagged(game, &Profile::new(x, y), source).map_err(|e| SolverAnomaly(e.to_string()))?;
    let out = BestOnSupports {
        certificate,
        eps_x,
        eps_y,
    };
    if out.certificate.epsilon > out.lp_bound() {
        return Err(SolverAnomaly(format!(
            "realised epsilon {} exceeds LP bound {}",
            out.certificate.epsilon,
            out.lp_bound()
        )));
    }
    Ok(out)
}

/// What one procedure found. `certificate` is `None` when the procedure
/// does not apply to the game's shape, which counts as epsilon 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcedureOutcome {
    pub procedure: Source,
    pub certificate: Option<WsneCertificate>,
}

impl ProcedureOutcome {
    pub fn epsilon(&self) -> Rational {
        self.certificate
            .as_ref()
            .map_or_else(Rational::one, |c| c.epsilon.clone())
    }

    pub fn is_applicable(&self) -> bool {
        self.certificate.is_some()
    }
}

/// Best pure profile; ties go to the lowest `(i, j)`.
pub fn procedure_pure(game: &BimatrixGame) -> ProcedureOutcome {
    let col_max_r: Vec<&Rational> = (0..game.cols())
        .map(|j| (0..game.rows()).map(|i| game.r(i, j)).max().unwrap())
        .collect();
    let row_max_c: Vec<&Rational> = (0..game.rows())
        .map(|i| (0..game.cols()).map(|j| game.c(i, j)).max().unwrap())
        .collect();
    let mut best: Option<(Rational, usize, usize)> = None;
    for (i, &row_max) in row_max_c.iter().enumerate() {
        for (j, &col_max) in col_max_r.iter().enumerate() {
            let eps_r = col_max - game.r(i, j);
            let eps_c = row_max - game.c(i, j);
            let eps = std::cmp::max(eps_r, eps_c);
            if best.as_ref().is_none_or(|(b, _, _)| eps < *b) {
                best = Some((eps, i, j));
            }
        }
    }
    let (_, i, j) = best.expect("non-empty game");
    let profile = Profile::pure(game, i, j).expect("indices in range");
    let certificate = epsilon_wsne_tagged(game, &profile, Source::Pure).expect("shape checked");
    ProcedureOutcome {
        procedure: Source::Pure,
        certificate: Some(certificate),
    }
}

/// All 2x2 support pairs in lexicographic order.
pub fn two_by_two_pairs(game: &BimatrixGame) -> Vec<SupportPair> {
    let pairs = |n: usize| -> Vec<[usize; 2]> {
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| [a, b]))
            .collect()
    };
    let row_pairs = pairs(game.rows());
    let col_pairs = pairs(game.cols());
    row_pairs
        .iter()
        .flat_map(|r| {
            col_pairs.iter().map(move |c| SupportPair {
                row_support: r.to_vec(),
                col_support: c.to_vec(),
            })
        })
        .collect()
}

const PAIR_CHUNK: usize = 64;

/// Best profile over all 2x2 support pairs (the LPs may also settle on a
/// smaller sub-support). Inapplicable when either player has one strategy.
///
/// Pairs are evaluated in parallel chunks; the scan stops after the first
/// chunk that contains an exact equilibrium. The result is the lowest-index
/// pair attaining the minimum, independent of thread count.
pub fn procedure_2x2(game: &BimatrixGame) -> Result<ProcedureOutcome, SolverAnomaly> {
    let mut best: Option<WsneCertificate> = None;
    if game.rows() >= 2 && game.cols() >= 2 {
        let pairs = two_by_two_pairs(game);
        for chunk in pairs.chunks(PAIR_CHUNK) {
            let results: Vec<WsneCertificate> = chunk
                .par_iter()
                .map(|pair| best_on_supports(game, pair, Source::TwoByTwo).map(|b| b.certificate))
                .collect::<Result<_, _>>()?;
            for cert in results {
                if best.as_ref().is_none_or(|b| cert.epsilon < b.epsilon) {
                    best = Some(cert);
                }
            }
            if best.as_ref().is_some_and(|b| b.epsilon.is_zero()) {
                break;
            }
        }
    }
    Ok(ProcedureOutcome {
        procedure: Source::TwoByTwo,
        certificate: best,
    })
}

/// Re-optimises the zero-sum min-max profile on its own supports.
pub fn procedure_ks_improved(game: &BimatrixGame) -> Result<ProcedureOutcome, SolverAnomaly> {
    let ks = ks_zero_sum(game)?;
    let pair = SupportPair::new(game, ks.x.support(), ks.y.support()).map_err(|e| SolverAnomaly(e.to_string()))?;
    let best = best_on_supports(game, &pair, Source::KsImproved)?;
    Ok(ProcedureOutcome {
        procedure: Source::KsImproved,
        certificate: Some(best.certificate),
    })
}

/// Outcomes of all three procedures and the selected certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub pure: ProcedureOutcome,
    pub two_by_two: ProcedureOutcome,
    pub ks_improved: ProcedureOutcome,
    pub best: WsneCertificate,
}

impl SolveReport {
    pub fn outcomes(&self) -> [&ProcedureOutcome; 3] {
        [&self.pure, &self.two_by_two, &self.ks_improved]
    }
}

pub fn solve_detailed(game: &BimatrixGame) -> Result<SolveReport, SolverAnomaly> {
    let pure = procedure_pure(game);
    let two_by_two = procedure_2x2(game)?;
    let ks_improved = procedure_ks_improved(game)?;
    // Ties go to the earlier procedure.
    let mut best = pure.certificate.as_ref().expect("pure always applies");
    for outcome in [&two_by_two, &ks_improved] {
        if let Some(cert) = &outcome.certificate {
            if cert.epsilon < best.epsilon {
                best = cert;
            }
        }
    }
    if !best.is_consistent(game) {
        return Err(SolverAnomaly("certificate failed re-verification".into()));
    }
    let best = best.clone();
    Ok(SolveReport {
        pure,
        two_by_two,
        ks_improved,
        best,
    })
}

/// Returns a `(2/3 - 0.005913759)`-well-supported Nash equilibrium.
pub fn solve(game: &BimatrixGame) -> Result<WsneCertificate, SolverAnomaly> {
    solve_detailed(game).map(|r| r.best)
}
