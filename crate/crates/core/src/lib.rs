//! Approximate well-supported Nash equilibria of bimatrix games.
//!
//! The solver combines three procedures, each certified in exact rational
//! arithmetic, and always returns a `(2/3 - 0.005913759)`-well-supported
//! equilibrium:
//!
//! - [`algorithm::procedure_pure`]: the best pure profile;
//! - [`algorithm::procedure_2x2`]: the best profile on any 2x2 support pair;
//! - [`algorithm::procedure_ks_improved`]: the zero-sum min-max profile of
//!   `D = (R - C) / 2`, improved by re-optimising both strategies on its
//!   supports.
//!
//! [`prooflab`] rebuilds the parameterised linear programs that certify the
//! constant and searches for the witness `(z, t0, t1)`; [`analysis`] turns
//! the supporting inequalities into runtime checks.

pub mod algorithm;
pub mod analysis;
pub mod error;
pub mod game;
pub mod generators;
pub mod lp;
pub mod prooflab;
pub mod rational;
pub mod zerosum;

pub use algorithm::{solve, solve_detailed, SolveReport, SupportPair};
pub use error::{AnalysisError, GameError, GeneratorError, LpError, ProofLabError, SolverAnomaly};
pub use game::{epsilon_wsne, normalize_game, BimatrixGame, MixedStrategy, Profile, Source, WsneCertificate};
pub use lp::{solve_lp, LpProblem, LpSolution, Optimum, Relation, Sense};
pub use rational::{parse_rational, Rational};
pub use zerosum::{ks_zero_sum, ZeroSumSolution};

/// The additive improvement over 2/3 guaranteed by [`solve`]: `5913759 / 10^9`.
pub fn improvement_z() -> Rational {
    rational::rat(5_913_759, 1_000_000_000)
}

/// `2/3 - 5913759/10^9`, the worst-case epsilon of [`solve`].
pub fn guaranteed_epsilon() -> Rational {
    rational::rat(2, 3) - improvement_z()
}
