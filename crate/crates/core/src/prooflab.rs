//! The parameterised linear program `LP(z, t, k)` that bounds the payoff
//! of any row against the shifted strategy `y(t)`, and the grid search for
//! a witness `(z, t0, t1)` with `Sol(LP(z, t0, 0)) <= 2/3 - z` and
//! `Sol(LP(z, t1, 1)) <= 2/3 - z`.
//!
//! Variables, in order: the nine masses `bb, bs, bo, sb, ss, so, ob, os, oo`
//! (row `ibar`'s partition first, row `i`'s second), then `q` (row `i`) and
//! `qbar` (the worst row `ibar`).

use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::analysis::{bad_row_report, intersection_mass, IntersectionMass};
use crate::error::{AnalysisError, ProofLabError, SolverAnomaly};
use crate::game::{BimatrixGame, MixedStrategy};
use crate::lp::{solve_lp, LpProblem, LpSolution, Optimum, Relation, Sense};
use crate::rational::{int, rat, to_decimal_string, to_exact_string, Rational};

pub const NUM_VARS: usize = 11;
pub const BB: usize = 0;
pub const BS: usize = 1;
pub const BO: usize = 2;
pub const SB: usize = 3;
pub const SS: usize = 4;
pub const SO: usize = 5;
pub const OB: usize = 6;
pub const OS: usize = 7;
pub const OO: usize = 8;
pub const Q: usize = 9;
pub const QBAR: usize = 10;

pub const VARIABLE_NAMES: [&str; NUM_VARS] = ["bb", "bs", "bo", "sb", "ss", "so", "ob", "os", "oo", "q", "qbar"];

/// Which of the two cross masses is forced to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// `k = 0`: `bs = 0`.
    BsZero,
    /// `k = 1`: `sb = 0`.
    SbZero,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::BsZero, Branch::SbZero];

    pub fn k(self) -> u8 {
        match self {
            Branch::BsZero => 0,
            Branch::SbZero => 1,
        }
    }

    pub fn from_k(k: u8) -> Option<Self> {
        match k {
            0 => Some(Branch::BsZero),
            1 => Some(Branch::SbZero),
            _ => None,
        }
    }

    fn zeroed_var(self) -> usize {
        match self {
            Branch::BsZero => BS,
            Branch::SbZero => SB,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::BsZero => write!(f, "k=0 (bs=0)"),
            Branch::SbZero => write!(f, "k=1 (sb=0)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLpParams {
    pub z: Rational,
    pub t: Rational,
    pub k: Branch,
}

impl ProofLpParams {
    pub fn new(z: Rational, t: Rational, k: Branch) -> Result<Self, ProofLabError> {
        check_z(&z)?;
        if t.is_negative() || t > Rational::one() {
            return Err(ProofLabError::TOutOfRange(t));
        }
        Ok(Self { z, t, k })
    }
}

/// `z >= 0` and `5z + (1/3 + z) 6z / (1/3 - 2z) < 1/3`, which keeps the
/// denominator of `phi(z, qbar)` positive for every `qbar <= 3`.
pub fn is_valid_z(z: &Rational) -> bool {
    let gap = rat(1, 3) - z * int(2);
    !z.is_negative() && gap.is_positive() && z * int(5) + (rat(1, 3) + z) * int(6) * z / gap < rat(1, 3)
}

fn check_z(z: &Rational) -> Result<(), ProofLabError> {
    if is_valid_z(z) {
        Ok(())
    } else {
        Err(ProofLabError::ZOutOfRange(z.clone()))
    }
}

/// `phi(z, qbar) = 1 + (1/3 + z + qbar z) / (1/3 - 2z - qbar z - (1/3 + z) 2 qbar z / (1/3 - 2z))`
pub fn phi(z: &Rational, qbar: &Rational) -> Result<Rational, ProofLabError> {
    let gap = rat(1, 3) - z * int(2);
    if z.is_negative() || !gap.is_positive() {
        return Err(ProofLabError::ZOutOfRange(z.clone()));
    }
    let third_z = rat(1, 3) + z;
    let denominator = &gap - qbar * z - &third_z * int(2) * qbar * z / &gap;
    if !denominator.is_positive() {
        return Err(ProofLabError::PhiDenominator {
            z: Box::new(z.clone()),
            qbar: Box::new(qbar.clone()),
        });
    }
    Ok(Rational::one() + (third_z + qbar * z) / denominator)
}

/// Builds `LP(z, t, k)`. The mass inequalities are multiplied through by
/// their (positive) denominators; the feasible set is unchanged.
pub fn build_proof_lp(params: &ProofLpParams) -> Result<LpProblem, ProofLabError> {
    let z = &params.z;
    let t = &params.t;
    check_z(z)?;
    let phi3 = phi(z, &int(3))?;
    let third_z = rat(1, 3) + z;
    let mid = rat(2, 3) + z * int(2);
    let two_thirds_z = rat(2, 3) - z;
    let gap = rat(1, 3) - z * int(2);
    let s = Rational::one() - t;

    let mut objective = vec![Rational::zero(); NUM_VARS];
    objective[Q] = -(&s * z);
    objective[SB] = t * &phi3;
    objective[SS] = t * &phi3 * &third_z;
    objective[SO] = t * &phi3 * &mid;
    objective[OB] = t.clone();
    objective[OS] = t * &third_z;
    objective[OO] = t * &mid;
    let mut lp = LpProblem::new(Sense::Maximize, objective).with_offset(&s * &mid);

    let row = |entries: &[(usize, Rational)]| -> Vec<Rational> {
        let mut coeffs = vec![Rational::zero(); NUM_VARS];
        for (v, c) in entries {
            coeffs[*v] += c;
        }
        coeffs
    };
    let mass_lower = |masses: [usize; 3], badness: usize, others: [usize; 3], rhs: Rational| {
        let mut entries: Vec<(usize, Rational)> = masses.iter().map(|&v| (v, two_thirds_z.clone())).collect();
        entries.push((badness, z.clone()));
        entries.extend(others.iter().map(|&v| (v, third_z.clone())));
        (row(&entries), rhs)
    };
    let ibar_other = [OB, OS, OO];
    let i_other = [BO, SO, OO];
    // (7), (8): big-mass lower bounds for ibar and i.
    for (masses, badness, others) in [([BB, BS, BO], QBAR, ibar_other), ([BB, SB, OB], Q, i_other)] {
        let (c, rhs) = mass_lower(masses, badness, others, third_z.clone());
        lp.constrain(c, Relation::Ge, rhs);
    }
    // (9), (10): small-mass lower bounds.
    for (masses, badness, others) in [([SB, SS, SO], QBAR, ibar_other), ([BS, SS, OS], Q, i_other)] {
        let (c, rhs) = mass_lower(masses, badness, others, gap.clone());
        lp.constrain(c, Relation::Ge, rhs);
    }
    // (11), (12): other-mass upper bounds.
    for (others, badness) in [(ibar_other, QBAR), (i_other, Q)] {
        let mut entries: Vec<(usize, Rational)> = others.iter().map(|&v| (v, gap.clone())).collect();
        entries.push((badness, -(z * int(2))));
        lp.constrain(row(&entries), Relation::Le, Rational::zero());
    }
    // (13)
    lp.constrain(row(&[(params.k.zeroed_var(), int(1))]), Relation::Eq, Rational::zero());
    // (14), (15)
    lp.constrain(row(&[(QBAR, int(1))]), Relation::Le, int(3));
    lp.constrain(row(&[(QBAR, int(1)), (Q, int(-1))]), Relation::Le, Rational::zero());
    // (16)
    let sum: Vec<(usize, Rational)> = (BB..=OO).map(|v| (v, int(1))).collect();
    lp.constrain(row(&sum), Relation::Eq, int(1));
    Ok(lp)
}

/// Solves `LP(z, t, k)` and returns the optimal vertex.
pub fn solve_proof_lp(params: &ProofLpParams) -> Result<Optimum, ProofLabError> {
    let lp = build_proof_lp(params)?;
    match solve_lp(&lp).map_err(|e| SolverAnomaly(e.to_string()))? {
        LpSolution::Optimal(opt) => Ok(opt),
        other => Err(SolverAnomaly(format!(
            "LP(z={}, t={}, {}) is {:?}",
            params.z,
            params.t,
            params.k,
            std::mem::discriminant(&other)
        ))
        .into()),
    }
}

/// `Sol(LP(z, t, k))`
pub fn sol(params: &ProofLpParams) -> Result<Rational, ProofLabError> {
    Ok(solve_proof_lp(params)?.value)
}

/// Grid `t = 0, step, 2 step, ...` up to and including `max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TGrid {
    pub step: Rational,
    pub max: Rational,
}

impl Default for TGrid {
    fn default() -> Self {
        Self {
            step: rat(1, 1000),
            max: rat(1, 5),
        }
    }
}

impl TGrid {
    pub fn points(&self) -> Result<Vec<Rational>, ProofLabError> {
        if !self.step.is_positive() {
            return Err(ProofLabError::TOutOfRange(self.step.clone()));
        }
        if self.max.is_negative() || self.max > Rational::one() {
            return Err(ProofLabError::TOutOfRange(self.max.clone()));
        }
        let mut out = Vec::new();
        let mut t = Rational::zero();
        while t <= self.max {
            out.push(t.clone());
            t += &self.step;
        }
        Ok(out)
    }
}

/// Minimum of `Sol(LP(z, t, k))` over the grid and the earliest `t`
/// attaining it.
pub fn find_t(z: &Rational, k: Branch, grid: &TGrid) -> Result<(Rational, Rational), ProofLabError> {
    check_z(z)?;
    let points = grid.points()?;
    let sols: Vec<Rational> = points
        .par_iter()
        .map(|t| sol(&ProofLpParams::new(z.clone(), t.clone(), k)?))
        .collect::<Result<_, _>>()?;
    let mut best = 0;
    for (idx, s) in sols.iter().enumerate() {
        if *s < sols[best] {
            best = idx;
        }
    }
    Ok((sols[best].clone(), points[best].clone()))
}

/// Outcome of the t-search at one `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZEvaluation {
    pub z: Rational,
    pub sol_k0: Rational,
    pub t0: Rational,
    pub sol_k1: Rational,
    pub t1: Rational,
}

impl ZEvaluation {
    /// Both branch minima are at most `2/3 - z`.
    pub fn accepted(&self) -> bool {
        let target = rat(2, 3) - &self.z;
        self.sol_k0 <= target && self.sol_k1 <= target
    }

    pub fn into_report(self) -> WitnessReport {
        WitnessReport {
            verified: self.accepted(),
            z: self.z,
            t0: self.t0,
            t1: self.t1,
            sol_k0: self.sol_k0,
            sol_k1: self.sol_k1,
        }
    }
}

pub fn evaluate_z(z: &Rational, grid: &TGrid) -> Result<ZEvaluation, ProofLabError> {
    let (sol_k0, t0) = find_t(z, Branch::BsZero, grid)?;
    let (sol_k1, t1) = find_t(z, Branch::SbZero, grid)?;
    Ok(ZEvaluation {
        z: z.clone(),
        sol_k0,
        t0,
        sol_k1,
        t1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub z: Rational,
    /// Grid minimiser for `k = 0` (`bs = 0`).
    pub t0: Rational,
    /// Grid minimiser for `k = 1` (`sb = 0`).
    pub t1: Rational,
    pub sol_k0: Rational,
    pub sol_k1: Rational,
    pub verified: bool,
}

impl WitnessReport {
    pub fn target(&self) -> Rational {
        rat(2, 3) - &self.z
    }

    /// `key: value` lines with exact rationals and decimal renderings.
    pub fn render(&self, places: usize) -> String {
        let line = |key: &str, v: &Rational| format!("{key}: {} ({})\n", to_exact_string(v), to_decimal_string(v, places));
        let mut out = String::new();
        out += &line("z", &self.z);
        out += &line("t0", &self.t0);
        out += &line("t1", &self.t1);
        out += &line("sol_k0", &self.sol_k0);
        out += &line("sol_k1", &self.sol_k1);
        out += &line("target", &self.target());
        out += &format!("verified: {}\n", self.verified);
        out
    }
}

/// Grid `z_lo, z_lo + step, ...` up to and including `z_hi`.
pub fn z_grid(z_lo: &Rational, z_hi: &Rational, z_step: &Rational) -> Result<Vec<Rational>, ProofLabError> {
    if !z_step.is_positive() {
        return Err(ProofLabError::ZOutOfRange(z_step.clone()));
    }
    let mut out = Vec::new();
    let mut z = z_lo.clone();
    while z <= *z_hi {
        out.push(z.clone());
        z += z_step;
    }
    Ok(out)
}

/// Scans `z` upwards and keeps the last accepted value with its `t` pair.
pub fn find_witness(z_lo: &Rational, z_hi: &Rational, z_step: &Rational, grid: &TGrid) -> Result<Option<WitnessReport>, ProofLabError> {
    find_witness_with(z_lo, z_hi, z_step, grid, |_| {})
}

/// [`find_witness`] with a callback on every evaluated `z`.
pub fn find_witness_with(
    z_lo: &Rational,
    z_hi: &Rational,
    z_step: &Rational,
    grid: &TGrid,
    mut on_eval: impl FnMut(&ZEvaluation),
) -> Result<Option<WitnessReport>, ProofLabError> {
    let mut best = None;
    for z in z_grid(z_lo, z_hi, z_step)? {
        let eval = evaluate_z(&z, grid)?;
        on_eval(&eval);
        if eval.accepted() {
            best = Some(eval.into_report());
        }
    }
    Ok(best)
}

/// A point of `LP(z, t, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLpVariables {
    pub masses: IntersectionMass,
    pub q: Rational,
    pub qbar: Rational,
}

impl ProofLpVariables {
    pub fn from_assignment(values: &[Rational]) -> Self {
        assert_eq!(values.len(), NUM_VARS, "LP(z, t, k) has eleven variables");
        let v = |k: usize| values[k].clone();
        Self {
            masses: IntersectionMass {
                bb: v(BB),
                bs: v(BS),
                bo: v(BO),
                sb: v(SB),
                ss: v(SS),
                so: v(SO),
                ob: v(OB),
                os: v(OS),
                oo: v(OO),
            },
            q: v(Q),
            qbar: v(QBAR),
        }
    }

    /// The point describing row `i` against the worst row `ibar` under `y`:
    /// the nine intersection masses and both q-values.
    pub fn from_instance(
        game: &BimatrixGame,
        i: usize,
        ibar: usize,
        y: &MixedStrategy,
        z: &Rational,
    ) -> Result<Self, AnalysisError> {
        Ok(Self {
            masses: intersection_mass(game, i, ibar, y, z)?,
            q: bad_row_report(game, i, y, z)?.q,
            qbar: bad_row_report(game, ibar, y, z)?.q,
        })
    }

    pub fn to_vec(&self) -> Vec<Rational> {
        let mut v = self.masses.to_array().to_vec();
        v.push(self.q.clone());
        v.push(self.qbar.clone());
        v
    }

    /// Branches whose fixing constraint this point satisfies.
    pub fn branches(&self) -> Vec<Branch> {
        let mut out = Vec::new();
        if self.masses.bs.is_zero() {
            out.push(Branch::BsZero);
        }
        if self.masses.sb.is_zero() {
            out.push(Branch::SbZero);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::improvement_z;

    fn degenerate_point(z: &Rational) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); NUM_VARS];
        v[BB] = (rat(1, 3) + z) / (rat(2, 3) - z);
        v[SS] = (rat(1, 3) - z * int(2)) / (rat(2, 3) - z);
        v
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(&int(0), &int(3)).unwrap(), int(2));
        assert_eq!(phi(&int(0), &int(0)).unwrap(), int(2));
        let z = improvement_z();
        let v = phi(&z, &int(3)).unwrap();
        assert!(v > rat(23404, 10000) && v < rat(23405, 10000), "{v}");
        assert!(matches!(phi(&rat(1, 6), &int(0)), Err(ProofLabError::ZOutOfRange(_))));
        assert!(matches!(phi(&rat(1, 10), &int(3)), Err(ProofLabError::PhiDenominator { .. })));
    }

    #[test]
    fn z_validity() {
        assert!(is_valid_z(&int(0)));
        assert!(is_valid_z(&improvement_z()));
        assert!(is_valid_z(&rat(26, 1000)));
        assert!(!is_valid_z(&rat(27, 1000)));
        assert!(!is_valid_z(&rat(-1, 1000)));
        assert!(ProofLpParams::new(int(0), rat(3, 2), Branch::BsZero).is_err());
    }

    #[test]
    fn lp_shape() {
        let z = improvement_z();
        let lp = build_proof_lp(&ProofLpParams::new(z.clone(), int(0), Branch::BsZero).unwrap()).unwrap();
        assert_eq!(lp.num_vars, NUM_VARS);
        assert_eq!(lp.constraints.len(), 10);
        assert!(lp.nonneg.iter().all(|&b| b));
        let mut expected = vec![Rational::zero(); NUM_VARS];
        expected[Q] = -z.clone();
        assert_eq!(lp.objective, expected);
        assert_eq!(lp.objective_offset, rat(2, 3) + z.clone() * int(2));
        let later = build_proof_lp(&ProofLpParams::new(z, rat(1, 2), Branch::BsZero).unwrap()).unwrap();
        assert_eq!(lp.constraints, later.constraints);
    }

    #[test]
    fn degenerate_sol_at_t_zero() {
        for z in [int(0), rat(1, 1000), improvement_z()] {
            for k in Branch::BOTH {
                let params = ProofLpParams::new(z.clone(), int(0), k).unwrap();
                let lp = build_proof_lp(&params).unwrap();
                let point = degenerate_point(&z);
                assert!(lp.is_feasible(&point));
                assert_eq!(lp.objective_at(&point), rat(2, 3) + z.clone() * int(2));
                assert_eq!(sol(&params).unwrap(), rat(2, 3) + z.clone() * int(2));
            }
        }
    }

    #[test]
    fn optimal_vertex_respects_phi_bound() {
        let z = improvement_z();
        let phi3 = phi(&z, &int(3)).unwrap();
        for t in [rat(12, 100), rat(168, 1000), rat(1, 2)] {
            for k in Branch::BOTH {
                let opt = solve_proof_lp(&ProofLpParams::new(z.clone(), t.clone(), k).unwrap()).unwrap();
                let p = ProofLpVariables::from_assignment(&opt.assignment);
                let small = &p.masses.sb + &p.masses.ss + &p.masses.so;
                assert!(small.is_positive());
                let big = &p.masses.bb + &p.masses.bs + &p.masses.bo;
                assert!(Rational::one() + big / small <= phi3);
            }
        }
    }

    #[test]
    fn tightening_never_increases_sol() {
        let z = improvement_z();
        let params = ProofLpParams::new(z, rat(1, 10), Branch::SbZero).unwrap();
        let base = sol(&params).unwrap();
        let mut lp = build_proof_lp(&params).unwrap();
        let mut c = vec![Rational::zero(); NUM_VARS];
        c[QBAR] = int(1);
        lp.constrain(c, Relation::Ge, rat(1, 2));
        let tightened = solve_lp(&lp).unwrap().into_optimum().unwrap().value;
        assert!(tightened <= base);
    }

    #[test]
    fn single_point_grid() {
        let z = rat(1, 1000);
        let grid = TGrid {
            step: rat(1, 10),
            max: int(0),
        };
        let (best, t) = find_t(&z, Branch::BsZero, &grid).unwrap();
        assert_eq!(t, int(0));
        assert_eq!(best, rat(2, 3) + z * int(2));
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(TGrid::default().points().unwrap().len(), 201);
        let zs = z_grid(&rat(1, 10), &rat(3, 10), &rat(1, 10)).unwrap();
        assert_eq!(zs, vec![rat(1, 10), rat(2, 10), rat(3, 10)]);
        assert!(z_grid(&rat(2, 10), &rat(1, 10), &rat(1, 10)).unwrap().is_empty());
    }

    #[test]
    fn empty_z_range_has_no_witness() {
        let grid = TGrid::default();
        assert_eq!(find_witness(&rat(2, 1000), &rat(1, 1000), &rat(1, 1000), &grid).unwrap(), None);
    }

    #[test]
    fn witness_z_passes_at_published_t() {
        let z = improvement_z();
        let target = rat(2, 3) - &z;
        let t0 = sol(&ProofLpParams::new(z.clone(), rat(12, 100), Branch::BsZero).unwrap()).unwrap();
        let t1 = sol(&ProofLpParams::new(z.clone(), rat(168, 1000), Branch::BsZero).unwrap()).unwrap();
        let s0 = sol(&ProofLpParams::new(z.clone(), rat(12, 100), Branch::SbZero).unwrap()).unwrap();
        let s1 = sol(&ProofLpParams::new(z, rat(168, 1000), Branch::SbZero).unwrap()).unwrap();
        assert!((t0 <= target || t1 <= target) && (s0 <= target || s1 <= target));
    }

    #[test]
    fn report_renders_both_forms() {
        let report = WitnessReport {
            z: improvement_z(),
            t0: rat(12, 100),
            t1: rat(168, 1000),
            sol_k0: rat(1, 2),
            sol_k1: rat(1, 3),
            verified: true,
        };
        let text = report.render(12);
        assert!(text.contains("z: 5913759/1000000000 (0.005913759)"));
        assert!(text.contains("t0: 3/25 (0.12)"));
        assert!(text.contains("verified: true"));
    }
}
