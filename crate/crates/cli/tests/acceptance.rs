//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach stdout.
//!
//! Tolerances: every comparison is exact rational arithmetic; no criterion
//! uses a floating-point tolerance.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wsne_cli::{parse_game, parse_profile, serialize_game, serialize_profile};
use wsne_core::algorithm::{best_on_supports, procedure_2x2, two_by_two_pairs};
use wsne_core::analysis::{
    big_mass_bound, find_matching_pennies, improvement_strategy, ks_reanalysis, matching_pennies_profile,
    mixed_improvement, other_mass_bound, pure_wsne_cell, small_mass_bound, worst_row,
};
use wsne_core::generators::{figure1_game, figure1_padded, figure2_game, random_game, GameKind, GameSpecSeed};
use wsne_core::prooflab::{build_proof_lp, evaluate_z, phi, sol, solve_proof_lp, Branch, ProofLpParams, ProofLpVariables};
use wsne_core::rational::{int, rat};
use wsne_core::{
    epsilon_wsne, guaranteed_epsilon, improvement_z, ks_zero_sum, parse_rational, solve, solve_lp, BimatrixGame,
    LpProblem, LpSolution, MixedStrategy, Profile, Rational, Relation, Sense, Source,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn wsne_bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wsne"))
        .args(args)
        .output()
        .expect("wsne binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 output"))
}

fn report_value(output: &str, key: &str) -> Option<String> {
    output
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|rest| rest.strip_prefix(": ")))
        .map(str::to_string)
}

fn report_rational(output: &str, key: &str) -> Result<Rational, String> {
    let text = report_value(output, key).ok_or_else(|| format!("missing key `{key}`"))?;
    parse_rational(&text).map_err(|e| format!("{key}: {e}"))
}

fn write_temp(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("wsne-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join(name);
    std::fs::write(&path, text).expect("temp file");
    path
}

fn grid_game(rows: usize, cols: usize, seed: u64) -> BimatrixGame {
    random_game(&GameSpecSeed::grid(rows, cols, seed, 12)).expect("valid spec")
}

// 1
fn witness_reproduction() -> Outcome {
    let z_star = rat(5_913_759, 1_000_000_000);
    let lo = &z_star - rat(2, 1_000_000_000);
    let hi = rat(5_913_760, 1_000_000_000);
    let (code, out) = wsne_bin(&[
        "prove-witness",
        "--z-lo",
        &lo.to_string(),
        "--z-hi",
        &hi.to_string(),
        "--z-step",
        "1/1000000000",
        "--format",
        "exact",
    ]);
    ensure(code == 0, || format!("exit code {code}"))?;
    let z = report_rational(&out, "z")?;
    ensure(z == z_star, || format!("witness z = {z}"))?;
    let target = rat(2, 3) - &z;
    let (t0, t1) = (report_rational(&out, "t0")?, report_rational(&out, "t1")?);
    let (s0, s1) = (report_rational(&out, "sol_k0")?, report_rational(&out, "sol_k1")?);
    ensure(s0 <= target && s1 <= target, || format!("Sol values {s0}, {s1} exceed {target}"))?;
    let mut ts = [t0.clone(), t1.clone()];
    ts.sort();
    ensure(ts == [rat(3, 25), rat(21, 125)], || format!("t values {t0}, {t1}"))?;
    Ok(format!("z = {z}, k=0 at t = {t0}, k=1 at t = {t1}"))
}

// 2
fn witness_failure_boundary() -> Outcome {
    let z = rat(5_913_760, 1_000_000_000);
    let eval = evaluate_z(&z, &Default::default()).map_err(|e| e.to_string())?;
    ensure(!eval.accepted(), || "z = 0.005913760 has a witness".into())?;
    let target = rat(2, 3) - &z;
    let failing: Vec<&str> = [("k=0", &eval.sol_k0), ("k=1", &eval.sol_k1)]
        .into_iter()
        .filter(|(_, s)| **s > target)
        .map(|(k, _)| k)
        .collect();
    let (code, _) = wsne_bin(&["prove-witness", "--z", "5913760/1000000000"]);
    ensure(code == 1, || format!("CLI exit code {code}, expected 1"))?;
    Ok(format!("no t on the grid works for {}", failing.join(", ")))
}

// 3
fn degenerate_sol_identity() -> Outcome {
    for z in [int(0), rat(1, 1000), improvement_z()] {
        let expected = rat(2, 3) + &z * int(2);
        let a = rat(2, 3) - &z;
        let mut point = vec![Rational::zero(); 11];
        point[0] = (rat(1, 3) + &z) / &a;
        point[4] = (rat(1, 3) - &z * int(2)) / &a;
        for k in Branch::BOTH {
            let params = ProofLpParams::new(z.clone(), int(0), k).map_err(|e| e.to_string())?;
            let value = sol(&params).map_err(|e| e.to_string())?;
            ensure(value == expected, || format!("Sol({z}, 0, {k}) = {value}"))?;
            let lp = build_proof_lp(&params).map_err(|e| e.to_string())?;
            ensure(lp.is_feasible(&point), || format!("constructed point infeasible at z = {z}, {k}"))?;
            ensure(lp.objective_at(&point) == expected, || format!("constructed point misses the optimum at z = {z}"))?;
        }
    }
    Ok("Sol(z, 0, k) = 2/3 + 2z at z in {0, 1/1000, 5913759/10^9}, optimum attained".into())
}

// 4
fn phi_goldens() -> Outcome {
    let phi0 = phi(&int(0), &int(3)).map_err(|e| e.to_string())?;
    ensure(phi0 == int(2), || format!("phi(0, 3) = {phi0}"))?;
    for z in [int(0), improvement_z(), rat(1, 50)] {
        let values: Vec<Rational> = (0..=6)
            .map(|h| phi(&z, &rat(h, 2)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        // At z = 0 qbar only enters through qbar * z, so phi is flat there.
        let monotone = if z.is_zero() {
            values.windows(2).all(|w| w[0] == w[1])
        } else {
            values.windows(2).all(|w| w[0] < w[1])
        };
        ensure(monotone, || format!("phi(z = {z}, .) not monotone"))?;
    }
    Ok("phi(0, 3) = 2; constant in qbar at z = 0, strictly increasing at z = 5913759/10^9 and 1/50".into())
}

// 5
fn solve_fuzz() -> Outcome {
    let bound = guaranteed_epsilon();
    let mut worst = Rational::zero();
    for seed in 0..1000u64 {
        let rows = 2 + (seed % 11) as usize;
        let cols = 2 + (seed / 11 % 11) as usize;
        let game = grid_game(rows, cols, seed);
        let cert = solve(&game).map_err(|e| format!("seed {seed}: {e}"))?;
        let check = epsilon_wsne(&game, &cert.profile).map_err(|e| e.to_string())?;
        ensure(check.epsilon == cert.epsilon, || format!("seed {seed}: certificate does not re-verify"))?;
        ensure(cert.epsilon <= bound, || format!("seed {seed}: epsilon {} exceeds bound", cert.epsilon))?;
        worst = worst.max(cert.epsilon);
    }
    Ok(format!("1000 games, worst epsilon {worst}"))
}

/// Smallest max-regret over the rows of `support` when the opponent mixes
/// two strategies on a 1/40 grid. `payoff(i, j)` is the payoff to the
/// regret-bearing player.
fn grid_min_regret(
    support: &[usize],
    opp: (usize, usize),
    all: usize,
    payoff: impl Fn(usize, usize) -> Rational,
) -> Rational {
    (0..=40)
        .map(|k| {
            let p = rat(k, 40);
            let value = |i: usize| &p * payoff(i, opp.0) + (Rational::one() - &p) * payoff(i, opp.1);
            let best = (0..all).map(value).max().expect("non-empty");
            support.iter().map(|&i| &best - value(i)).max().expect("non-empty")
        })
        .min()
        .expect("non-empty grid")
}

// 6
fn support_lp_vs_grid() -> Outcome {
    let mut pairs = 0;
    for seed in 0..50u64 {
        let game = grid_game(3, 3, 1000 + seed);
        for pair in two_by_two_pairs(&game) {
            let (rs, cs) = (pair.row_support(), pair.col_support());
            let best = best_on_supports(&game, &pair, Source::TwoByTwo).map_err(|e| e.to_string())?;
            // Regrets are taken over the whole declared supports, so the
            // two players' grids separate.
            let row_side = grid_min_regret(rs, (cs[0], cs[1]), 3, |i, j| game.r(i, j).clone());
            let col_side = grid_min_regret(cs, (rs[0], rs[1]), 3, |j, i| game.c(i, j).clone());
            let grid = row_side.max(col_side);
            let eps = best.certificate.epsilon;
            ensure(eps <= grid, || format!("seed {seed} {rs:?}x{cs:?}: {eps} > grid optimum {grid}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} support pairs, LP optimum never above the 1/40 grid"))
}

// 7
fn crosswise_fixture_suite() -> Outcome {
    let game = figure2_game();
    let z = improvement_z();
    let ks = Profile::new(MixedStrategy::pure(3, 2).unwrap(), MixedStrategy::uniform(2).unwrap());
    let eps = epsilon_wsne(&game, &ks).map_err(|e| e.to_string())?.epsilon;
    ensure(eps == rat(2, 3), || format!("KS profile epsilon {eps}"))?;
    let two = procedure_2x2(&game).map_err(|e| e.to_string())?.epsilon();
    ensure(two.is_zero(), || format!("2x2 procedure epsilon {two}"))?;
    let quad = find_matching_pennies(&game, &z).ok_or("no matching pennies found")?;
    ensure(quad == (0, 1, 0, 1), || format!("quadruple {quad:?}"))?;
    let mp = matching_pennies_profile(&game, quad, &z).map_err(|e| e.to_string())?;
    let mp_eps = epsilon_wsne(&game, &mp).map_err(|e| e.to_string())?.epsilon;
    ensure(mp_eps <= rat(2, 3) - &z, || format!("matching pennies epsilon {mp_eps}"))?;

    let game_path = write_temp("figure2.game", &serialize_game(&game));
    let profile_path = write_temp("figure2-ks.profile", &serialize_profile(&ks));
    let (g, p) = (game_path.to_str().unwrap(), profile_path.to_str().unwrap());
    let (code, out) = wsne_bin(&["solve", g, "--format", "exact"]);
    ensure(code == 0, || format!("solve exit {code}"))?;
    ensure(report_value(&out, "source").as_deref() == Some("TwoByTwo"), || "solve source".into())?;
    ensure(report_rational(&out, "epsilon")?.is_zero(), || "solve epsilon".into())?;
    let (code, _) = wsne_bin(&["verify", g, p, "--bound", "2/3"]);
    ensure(code == 0, || format!("verify --bound 2/3 exit {code}"))?;
    let (code, _) = wsne_bin(&["verify", g, p, "--bound", "0.6"]);
    ensure(code == 1, || format!("verify --bound 0.6 exit {code}"))?;
    Ok(format!("KS eps 2/3, 2x2 eps 0, quadruple {quad:?} with eps {mp_eps}, CLI exits 0/1"))
}

/// All-but-tight games: near-zero rows with `R = C` first, then a
/// crosswise 2x2 core with big payoffs near 1 and small ones just under
/// 1/3. The min-max profile then often plays a near-zero row, leaving a
/// supported strategy that is not a `(2/3 - z)`-best response.
fn near_tight_game(seed: u64) -> BimatrixGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Vec::new();
    let mut c = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let row: Vec<Rational> = (0..2).map(|_| rat(rng.gen_range(0..=3), 1200)).collect();
        r.push(row.clone());
        c.push(row);
    }
    for k in 0..2 {
        let big = rng.gen_range(1190..=1200);
        let small = rng.gen_range(385..=399);
        let (mut rr, mut cc) = ([0; 2], [0; 2]);
        rr[k] = big;
        rr[1 - k] = small;
        cc[k] = rng.gen_range(small..=399);
        cc[1 - k] = rng.gen_range(big..=1200);
        r.push(rr.iter().map(|&v| rat(v, 1200)).collect());
        c.push(cc.iter().map(|&v| rat(v, 1200)).collect());
    }
    BimatrixGame::new(r, c).expect("entries lie in [0, 1]")
}

// 8
fn ks_reanalysis_properties() -> Outcome {
    let z = improvement_z();
    let (mut kept, mut applicable) = (0, 0);
    for seed in 0..200u64 {
        let game = match seed % 4 {
            0 | 2 => near_tight_game(2000 + seed),
            1 => random_game(
                &GameSpecSeed::grid(2 + (seed % 5) as usize, 2 + (seed / 5 % 5) as usize, 2000 + seed, 12)
                    .with_kind(GameKind::NoPureWsne),
            )
            .map_err(|e| e.to_string())?,
            _ => grid_game(2 + (seed % 5) as usize, 2 + (seed / 5 % 5) as usize, 2000 + seed),
        };
        if pure_wsne_cell(&game, &z).is_some() {
            continue;
        }
        kept += 1;
        let profile = ks_zero_sum(&game).map_err(|e| e.to_string())?.profile();
        let re = ks_reanalysis(&game, &profile, &z).map_err(|e| e.to_string())?;
        if re.applicable() {
            applicable += 1;
        }
        ensure(re.holds(), || format!("seed {seed}: {re:?}"))?;
    }
    ensure(applicable > 0, || "no game exercised the inequalities".into())?;
    Ok(format!(
        "{kept} of 200 games have no pure WSNE; {applicable} KS profiles support a non-best response; all inequalities hold"
    ))
}

/// Value of the zero-sum game `d` by the textbook reduction: shift `d` to
/// be positive, then `min 1.u  s.t.  d^T u >= 1, u >= 0` has optimum
/// `1 / (value + shift)`.
fn dual_lp_value(d: &[Vec<Rational>]) -> Result<Rational, String> {
    let shift = Rational::one() - d.iter().flatten().min().expect("non-empty").clone();
    let rows = d.len();
    let mut lp = LpProblem::new(Sense::Minimize, vec![Rational::one(); rows]);
    for j in 0..d[0].len() {
        lp.constrain(d.iter().map(|r| &r[j] + &shift).collect(), Relation::Ge, Rational::one());
    }
    let opt = solve_lp(&lp).map_err(|e| e.to_string())?.into_optimum().ok_or("dual LP not optimal")?;
    Ok(Rational::one() / opt.value - shift)
}

// 9
fn zero_sum_correctness() -> Outcome {
    for seed in 0..200u64 {
        let game = grid_game(2 + (seed % 5) as usize, 2 + (seed / 5 % 5) as usize, 3000 + seed);
        let d = game.zero_sum_matrix();
        let s = ks_zero_sum(&game).map_err(|e| e.to_string())?;
        let col_values: Vec<Rational> = (0..d[0].len())
            .map(|j| d.iter().zip(s.x.probs()).map(|(r, p)| &r[j] * p).sum())
            .collect();
        let row_values: Vec<Rational> = d
            .iter()
            .map(|r| r.iter().zip(s.y.probs()).map(|(a, p)| a * p).sum())
            .collect();
        let guaranteed = col_values.into_iter().min().unwrap();
        let conceded = row_values.into_iter().max().unwrap();
        ensure(guaranteed == s.value && conceded == s.value, || format!("seed {seed}: min-max gap"))?;
        let dual = dual_lp_value(&d)?;
        ensure(dual == s.value, || format!("seed {seed}: dual LP value {dual} vs {}", s.value))?;
    }
    let pennies = BimatrixGame::new(
        vec![vec![int(1), int(0)], vec![int(0), int(1)]],
        vec![vec![int(0), int(1)], vec![int(1), int(0)]],
    )
    .unwrap();
    let s = ks_zero_sum(&pennies).map_err(|e| e.to_string())?;
    let uniform = MixedStrategy::uniform(2).unwrap();
    ensure(s.value.is_zero() && s.x == uniform && s.y == uniform, || format!("matching pennies: {s:?}"))?;
    Ok("200 games: min-max equality and dual LP value exact; matching pennies value 0, uniform".into())
}

/// Solves the square system `a x = b` exactly; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (pivot_row, pivot_b) = (a[col].clone(), b[col].clone());
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &pivot_row[col];
                for (cell, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *cell -= &f * p;
                }
                b[r] -= &f * &pivot_b;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Best objective over all basic feasible solutions, `None` if there are none.
fn vertex_enumeration(lp: &LpProblem) -> Option<Rational> {
    let n = lp.num_vars;
    let mut rows: Vec<(Vec<Rational>, Rational)> = lp.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs.clone())).collect();
    for k in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[k] = Rational::one();
        rows.push((e, Rational::zero()));
    }
    let mut best: Option<Rational> = None;
    let m = rows.len();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let chosen: Vec<&(Vec<Rational>, Rational)> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| &rows[i]).collect();
        let Some(x) = solve_square(chosen.iter().map(|r| r.0.clone()).collect(), chosen.iter().map(|r| r.1.clone()).collect())
        else {
            continue;
        };
        if lp.is_feasible(&x) {
            let v = lp.objective_at(&x);
            best = Some(match (best, lp.sense) {
                (None, _) => v,
                (Some(b), Sense::Maximize) => b.max(v),
                (Some(b), Sense::Minimize) => b.min(v),
            });
        }
    }
    best
}

// 10
fn lp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut optimal, mut infeasible) = (0, 0);
    for case in 0..100 {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=4);
        let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
        let small = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        let mut lp = LpProblem::new(sense, (0..n).map(|_| small(&mut rng)).collect());
        for _ in 0..m {
            let relation = match rng.gen_range(0..10) {
                0..=4 => Relation::Le,
                5..=8 => Relation::Ge,
                _ => Relation::Eq,
            };
            let coeffs = (0..n).map(|_| small(&mut rng)).collect();
            let rhs = match relation {
                Relation::Le => rng.gen_range(0..=12),
                Relation::Ge => rng.gen_range(-8..=2),
                Relation::Eq => rng.gen_range(0..=4),
            };
            lp.constrain(coeffs, relation, rat(rhs, rng.gen_range(1..=2)));
        }
        // A box keeps every problem bounded, so optima sit at vertices.
        for k in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[k] = Rational::one();
            lp.constrain(e, Relation::Le, int(rng.gen_range(1..=5)));
        }
        let expected = vertex_enumeration(&lp);
        match (solve_lp(&lp).map_err(|e| e.to_string())?, expected) {
            (LpSolution::Optimal(opt), Some(v)) => {
                ensure(opt.value == v, || format!("case {case}: simplex {} vs enumeration {v}", opt.value))?;
                ensure(lp.is_feasible(&opt.assignment), || format!("case {case}: optimum infeasible"))?;
                optimal += 1;
            }
            (LpSolution::Infeasible, None) => infeasible += 1,
            (got, want) => return Err(format!("case {case}: simplex {got:?}, enumeration {want:?}")),
        }
    }
    Ok(format!("100 LPs: {optimal} optimal matched vertex enumeration, {infeasible} infeasible agreed"))
}

/// Column masses `(big, small, other)` for a q-bad row, strictly inside
/// the mass bounds.
fn row_marginal(z: &Rational, q: &Rational, other_frac: &Rational, big_frac: &Rational) -> Option<[Rational; 3]> {
    let other = other_frac * other_mass_bound(q, z);
    let lb_big = big_mass_bound(q, z, &other).max(Rational::zero());
    let lb_small = small_mass_bound(q, z, &other).max(Rational::zero());
    let slack = Rational::one() - &other - &lb_big - &lb_small;
    if !slack.is_positive() {
        return None;
    }
    let big = lb_big + big_frac * slack;
    let small = Rational::one() - &other - &big;
    Some([big, small, other])
}

/// North-west corner coupling of two `(big, small, other)` marginals; the
/// staircase never uses both `(big, small)` and `(small, big)`.
fn couple(a: &[Rational; 3], b: &[Rational; 3]) -> Vec<(usize, usize, Rational)> {
    let (mut a, mut b) = (a.clone(), b.clone());
    let (mut i, mut j) = (0, 0);
    let mut cells = Vec::new();
    while i < 3 && j < 3 {
        let m = a[i].clone().min(b[j].clone());
        if m.is_positive() {
            cells.push((i, j, m.clone()));
        }
        a[i] -= &m;
        b[j] -= &m;
        if a[i].is_zero() {
            i += 1;
        } else {
            j += 1;
        }
    }
    cells
}

/// A two-row game with one column per coupled cell and `y` equal to the
/// cell masses. Row payoffs interpolate between the class floors and caps
/// to hit `R_r . y = 2/3 + 2z - q_r z` exactly.
fn realize(z: &Rational, cells: &[(usize, usize, Rational)], qs: [&Rational; 2]) -> Option<(BimatrixGame, MixedStrategy)> {
    let big = rat(2, 3) + z * int(2);
    let low = rat(1, 3) + z;
    let gap = z / int(100);
    let floor = |k: usize| if k == 0 { big.clone() } else { Rational::zero() };
    let cap = |k: usize| match k {
        0 => Rational::one(),
        1 => &low - &gap,
        _ => &big - &gap,
    };
    let mut r = vec![Vec::new(), Vec::new()];
    let mut c = vec![Vec::new(), Vec::new()];
    for row in 0..2 {
        let class = |cell: &(usize, usize, Rational)| if row == 0 { cell.0 } else { cell.1 };
        let target = &big - qs[row] * z;
        let lo: Rational = cells.iter().map(|cell| floor(class(cell)) * &cell.2).sum();
        let hi: Rational = cells.iter().map(|cell| cap(class(cell)) * &cell.2).sum();
        if target < lo || target > hi {
            return None;
        }
        let lambda = (target - &lo) / (hi - lo);
        for cell in cells {
            let k = class(cell);
            r[row].push(floor(k) + &lambda * (cap(k) - floor(k)));
            c[row].push(if k == 1 { Rational::one() } else { Rational::zero() });
        }
    }
    let y = MixedStrategy::new(cells.iter().map(|cell| cell.2.clone()).collect()).ok()?;
    Some((BimatrixGame::new(r, c).ok()?, y))
}

// 11
fn improved_strategy_bound() -> Outcome {
    let ts = [int(0), rat(3, 25), rat(21, 125), rat(1, 5)];
    let q_pairs = [(rat(1, 2), rat(1, 2)), (int(1), int(2)), (int(2), int(3)), (int(3), int(3))];
    let shapes = [(rat(1, 2), rat(1, 4), rat(1, 2), rat(3, 4)), (int(0), rat(3, 4), rat(1, 2), rat(1, 4))];
    let mut instances = 0;
    let mut checks = 0;
    'outer: for z in [improvement_z(), rat(1, 1000), rat(1, 100)] {
        for (qbar, q) in &q_pairs {
            for (o0, b0, o1, b1) in &shapes {
                if instances == 20 {
                    break 'outer;
                }
                let m0 = row_marginal(&z, qbar, o0, b0).ok_or("no marginal for the worst row")?;
                let m1 = row_marginal(&z, q, o1, b1).ok_or("no marginal for the second row")?;
                let (game, y) = realize(&z, &couple(&m0, &m1), [qbar, q]).ok_or("marginals not realisable")?;
                ensure(pure_wsne_cell(&game, &z).is_none(), || "instance has a pure WSNE".into())?;
                let (ibar, _) = worst_row(&game, &y).map_err(|e| e.to_string())?;
                let y_imp = improvement_strategy(&game, &y, &z).map_err(|e| e.to_string())?;
                for t in &ts {
                    let y_t = mixed_improvement(&y, &y_imp, t).map_err(|e| e.to_string())?;
                    let (i, top) = worst_row(&game, &y_t).map_err(|e| e.to_string())?;
                    let point = ProofLpVariables::from_instance(&game, i, ibar, &y, &z).map_err(|e| e.to_string())?;
                    let branches = point.branches();
                    ensure(!branches.is_empty(), || "neither bs nor sb is zero".into())?;
                    for k in branches {
                        let params = ProofLpParams::new(z.clone(), t.clone(), k).map_err(|e| e.to_string())?;
                        let lp = build_proof_lp(&params).map_err(|e| e.to_string())?;
                        ensure(lp.is_feasible(&point.to_vec()), || format!("z = {z}, t = {t}, {k}: hypotheses fail"))?;
                        let bound = solve_proof_lp(&params).map_err(|e| e.to_string())?.value;
                        ensure(top <= bound, || format!("z = {z}, t = {t}, {k}: {top} > Sol {bound}"))?;
                        checks += 1;
                    }
                }
                instances += 1;
            }
        }
    }
    ensure(instances == 20, || format!("only {instances} instances built"))?;
    Ok(format!("20 instances, {checks} (t, k) checks of max_i R_i.y(t) <= Sol"))
}

// 12
fn serialization_round_trip() -> Outcome {
    let mut games = vec![figure2_game(), figure1_padded(&rat(1, 10), 3).unwrap()];
    games.extend([int(0), rat(1, 7), rat(1, 3) - rat(1, 1000)].iter().map(|d| figure1_game(d).unwrap()));
    for seed in 0..100u64 {
        let kind = [
            GameKind::RandomUniform,
            GameKind::RandomRationalGrid,
            GameKind::PureNePlanted,
            GameKind::MatchingPenniesPlanted,
            GameKind::NoPureWsne,
        ][(seed % 5) as usize];
        let min = if matches!(kind, GameKind::MatchingPenniesPlanted | GameKind::NoPureWsne) { 2 } else { 1 };
        let (rows, cols) = (min + (seed % 6) as usize, min + (seed / 6 % 6) as usize);
        let spec = GameSpecSeed::grid(rows, cols, seed, 7 + seed as u32).with_kind(kind);
        games.push(random_game(&spec).map_err(|e| e.to_string())?);
    }
    for (n, game) in games.iter().enumerate() {
        let text = serialize_game(game);
        let back = parse_game(&text, false).map_err(|e| format!("game {n}: {e}"))?;
        ensure(back.game == *game, || format!("game {n} changed"))?;
        ensure(serialize_game(&back.game) == text, || format!("game {n} text changed"))?;
        let profile = solve(game).map_err(|e| e.to_string())?.profile;
        let back = parse_profile(&serialize_profile(&profile)).map_err(|e| format!("profile {n}: {e}"))?;
        ensure(back == profile, || format!("profile {n} changed"))?;
    }
    Ok(format!("{} games and their solved profiles round-trip exactly", games.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("witness reproduction", witness_reproduction),
        ("witness failure boundary", witness_failure_boundary),
        ("degenerate Sol identity", degenerate_sol_identity),
        ("phi goldens and monotonicity", phi_goldens),
        ("solve() bound on 1000 random games", solve_fuzz),
        ("support LPs vs grid brute force", support_lp_vs_grid),
        ("two-row crosswise fixture", crosswise_fixture_suite),
        ("KS reanalysis inequalities", ks_reanalysis_properties),
        ("zero-sum solver", zero_sum_correctness),
        ("LP solver vs vertex enumeration", lp_oracle),
        ("improved strategy below Sol", improved_strategy_bound),
        ("serialization round trip", serialization_round_trip),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let n = n + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &n.to_string()) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {n:>2}: {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n:>2}: {name}: {why} [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
