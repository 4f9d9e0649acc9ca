//! Subcommand implementations. Each returns its report text and exit code
//! so that tests can drive them without a process.

use std::io::Read;
use std::path::{Path, PathBuf};

use thiserror::Error;
use wsne_core::algorithm::{solve_detailed, ProcedureOutcome};
use wsne_core::analysis::{
    bad_row_report, check_appendix_a, check_proposition8, find_matching_pennies, improvement_strategy, ks_reanalysis,
    matching_pennies_profile, mixed_improvement, pure_wsne_cell, worst_row, AppendixAVerdict, SideReanalysis,
};
use wsne_core::game::{epsilon_wsne, AffineMap};
use wsne_core::generators::{figure1_game, random_game, GameKind, GameSpecSeed};
use wsne_core::prooflab::{evaluate_z, find_witness_with, z_grid, TGrid, ZEvaluation};
use wsne_core::rational::rat;
use wsne_core::{
    guaranteed_epsilon, improvement_z, ks_zero_sum, BimatrixGame, Profile, Rational, WsneCertificate,
};

use crate::gamefile::{parse_game, serialize_game, FormatError, LoadedGame};
use crate::profile::parse_profile;
use crate::report::{NumberFormat, Report};
use crate::{Cli, Command, EXIT_ANOMALY, EXIT_BOUND_EXCEEDED, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("internal error: {0}")]
    Anomaly(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Anomaly(_) => EXIT_ANOMALY,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: u8,
}

fn anomaly(e: impl std::fmt::Display) -> CliError {
    CliError::Anomaly(e.to_string())
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(anomaly)?
            .install(|| dispatch(cli.command, cli.format)),
        None => dispatch(cli.command, cli.format),
    }
}

fn dispatch(command: Command, format: NumberFormat) -> Result<Outcome, CliError> {
    match command {
        Command::Solve { game, normalize, bound } => cmd_solve(&game, normalize, bound, format),
        Command::Verify {
            game,
            profile,
            normalize,
            bound,
        } => cmd_verify(&game, &profile, normalize, bound, format),
        Command::Analyze {
            game,
            profile,
            normalize,
            z,
            t,
        } => cmd_analyze(&game, profile.as_deref(), normalize, z, t, format),
        Command::ProveWitness {
            z,
            z_lo,
            z_hi,
            z_step,
            t_step,
            t_max,
            verbose,
        } => {
            let grid = TGrid {
                step: t_step.unwrap_or_else(|| TGrid::default().step),
                max: t_max.unwrap_or_else(|| TGrid::default().max),
            };
            let range = match z {
                Some(z) => WitnessRange {
                    lo: z.clone(),
                    hi: z,
                    step: z_step.unwrap_or_else(default_z_step),
                },
                None => WitnessRange {
                    lo: z_lo.unwrap_or_else(|| rat(59137, 10_000_000)),
                    hi: z_hi.unwrap_or_else(|| rat(59138, 10_000_000)),
                    step: z_step.unwrap_or_else(default_z_step),
                },
            };
            cmd_prove_witness(&range, &grid, verbose, format)
        }
        Command::Generate {
            kind,
            rows,
            cols,
            seed,
            denominator,
            delta,
        } => cmd_generate(kind, rows, cols, seed, denominator, delta),
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(io)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

fn load_game(path: &Path, normalize: bool) -> Result<LoadedGame, CliError> {
    parse_game(&read_input(path)?, normalize).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

fn load_profile(path: &Path, game: &BimatrixGame) -> Result<Profile, CliError> {
    let profile = parse_profile(&read_input(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })?;
    game.check_profile(&profile)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(profile)
}

fn header(report: &mut Report, loaded: &LoadedGame) {
    report.text("game", format!("{}x{}", loaded.game.rows(), loaded.game.cols()));
    if let Some((row_map, col_map)) = &loaded.normalization {
        let mut map = |key: &str, m: &AffineMap| {
            report.number(format!("{key}_offset"), &m.offset).number(format!("{key}_scale"), &m.scale);
        };
        map("normalize_r", row_map);
        map("normalize_c", col_map);
    }
}

fn certificate(report: &mut Report, cert: &WsneCertificate) {
    report.text("source", cert.source);
    report.number("epsilon", &cert.epsilon);
    report.numbers("row_strategy", cert.profile.row.probs());
    report.numbers("col_strategy", cert.profile.col.probs());
    let (rows, row_regrets): (Vec<usize>, Vec<Rational>) = cert.row_regrets.iter().cloned().unzip();
    let (cols, col_regrets): (Vec<usize>, Vec<Rational>) = cert.col_regrets.iter().cloned().unzip();
    report.indices("row_support", &rows).numbers("row_regrets", &row_regrets);
    report.indices("col_support", &cols).numbers("col_regrets", &col_regrets);
}

fn bound_check(report: &mut Report, epsilon: &Rational, bound: Option<Rational>) -> u8 {
    let bound = bound.unwrap_or_else(guaranteed_epsilon);
    let ok = *epsilon <= bound;
    report.number("bound", &bound).text("within_bound", ok);
    if ok {
        EXIT_OK
    } else {
        EXIT_BOUND_EXCEEDED
    }
}

pub fn cmd_solve(path: &Path, normalize: bool, bound: Option<Rational>, format: NumberFormat) -> Result<Outcome, CliError> {
    let loaded = load_game(path, normalize)?;
    let result = solve_detailed(&loaded.game).map_err(anomaly)?;
    let mut report = Report::new(format);
    header(&mut report, &loaded);
    certificate(&mut report, &result.best);
    let mut procedure = |key: &str, outcome: &ProcedureOutcome| {
        if outcome.is_applicable() {
            report.number(key, &outcome.epsilon());
        } else {
            report.text(key, "n/a");
        }
    };
    procedure("eps_pure", &result.pure);
    procedure("eps_two_by_two", &result.two_by_two);
    procedure("eps_ks_improved", &result.ks_improved);
    let exit_code = bound_check(&mut report, &result.best.epsilon, bound);
    Ok(Outcome {
        output: report.to_string(),
        exit_code,
    })
}

pub fn cmd_verify(
    game_path: &Path,
    profile_path: &Path,
    normalize: bool,
    bound: Option<Rational>,
    format: NumberFormat,
) -> Result<Outcome, CliError> {
    let loaded = load_game(game_path, normalize)?;
    let profile = load_profile(profile_path, &loaded.game)?;
    let cert = epsilon_wsne(&loaded.game, &profile).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut report = Report::new(format);
    header(&mut report, &loaded);
    certificate(&mut report, &cert);
    let exit_code = bound_check(&mut report, &cert.epsilon, bound);
    Ok(Outcome {
        output: report.to_string(),
        exit_code,
    })
}

pub fn cmd_analyze(
    game_path: &Path,
    profile_path: Option<&Path>,
    normalize: bool,
    z: Option<Rational>,
    t: Option<Rational>,
    format: NumberFormat,
) -> Result<Outcome, CliError> {
    let loaded = load_game(game_path, normalize)?;
    let game = &loaded.game;
    let z = z.unwrap_or_else(improvement_z);
    if z <= Rational::from_integer(0.into()) || z >= rat(1, 6) {
        return Err(CliError::Usage(format!("--z must lie in (0, 1/6), got {z}")));
    }
    let (profile, is_ks) = match profile_path {
        Some(p) => (load_profile(p, game)?, false),
        None => (ks_zero_sum(game).map_err(anomaly)?.profile(), true),
    };
    let usage = |e: wsne_core::AnalysisError| CliError::Usage(e.to_string());

    let mut report = Report::new(format);
    header(&mut report, &loaded);
    report.number("z", &z).text("profile", if is_ks { "zero-sum min-max" } else { "given" });
    report.numbers("row_strategy", profile.row.probs()).numbers("col_strategy", profile.col.probs());
    let epsilon = epsilon_wsne(game, &profile).map_err(anomaly)?.epsilon;
    report.number("epsilon", &epsilon);
    match pure_wsne_cell(game, &z) {
        Some((i, j)) => report.indices("pure_wsne_cell", &[i, j]),
        None => report.text("pure_wsne_cell", "-"),
    };

    let transposed = game.transpose();
    for (side, g, against) in [("row", game, &profile.col), ("col", &transposed, &profile.row)] {
        let (worst, payoff) = worst_row(g, against).map_err(anomaly)?;
        report.text(format!("{side}.worst"), worst).number(format!("{side}.worst_payoff"), &payoff);
        for i in 0..g.rows() {
            let key = |name: &str| format!("{side}.{i}.{name}");
            let rep = bad_row_report(g, i, against, &z).map_err(usage)?;
            report.number(key("payoff"), &rep.row_payoff).number(key("q"), &rep.q).text(key("bad"), rep.is_bad);
            report
                .indices(key("big"), &rep.partition.big)
                .indices(key("small"), &rep.partition.small)
                .indices(key("other"), &rep.partition.other)
                .indices(key("overlap"), &rep.partition.overlap);
            report
                .number(key("mass_big"), &rep.mass_big)
                .number(key("mass_small"), &rep.mass_small)
                .number(key("mass_other"), &rep.mass_other);
            if rep.is_bad {
                let check = check_proposition8(&rep);
                report
                    .text(key("mass_bounds"), if check.holds { "holds" } else { "violated" })
                    .number(key("other_slack"), &check.other_slack)
                    .number(key("big_slack"), &check.big_slack)
                    .number(key("small_slack"), &check.small_slack);
            }
            let verdict = match check_appendix_a(g, i, against, &z).map_err(usage)? {
                AppendixAVerdict::HypothesisViolated { .. } => "hypothesis-violated",
                AppendixAVerdict::Checked(c) if c.holds => "holds",
                AppendixAVerdict::Checked(_) => "violated",
            };
            report.text(key("other_sum_check"), verdict);
        }
        let shifted = format!("{side}.improved");
        match improvement_strategy(g, against, &z) {
            Ok(imp) => {
                report.numbers(&shifted, imp.probs());
                if let Some(t) = &t {
                    let mixed = mixed_improvement(against, &imp, t).map_err(usage)?;
                    let (_, top) = worst_row(g, &mixed).map_err(anomaly)?;
                    report.numbers(format!("{side}.mixed"), mixed.probs()).number(format!("{side}.mixed_worst_payoff"), &top);
                }
            }
            Err(e) => {
                report.text(&shifted, format!("unavailable ({e})"));
            }
        }
    }

    match find_matching_pennies(game, &z) {
        Some(quad) => {
            let (i, i2, j, j2) = quad;
            let mp = matching_pennies_profile(game, quad, &z).map_err(anomaly)?;
            let eps = epsilon_wsne(game, &mp).map_err(anomaly)?.epsilon;
            report.indices("matching_pennies", &[i, i2, j, j2]).number("matching_pennies_epsilon", &eps);
        }
        None => {
            report.text("matching_pennies", "-");
        }
    }

    let mut exit_code = EXIT_OK;
    if is_ks {
        let ks = ks_reanalysis(game, &profile, &z).map_err(usage)?;
        report.text("ks_checks_applicable", ks.applicable());
        if ks.applicable() {
            let holds = ks.holds();
            report.text("ks_checks", if holds { "holds" } else { "violated" });
            side_summary(&mut report, "row", &ks.row_side);
            side_summary(&mut report, "col", &ks.col_side);
            if !holds {
                exit_code = EXIT_BOUND_EXCEEDED;
            }
        }
    }
    Ok(Outcome {
        output: report.to_string(),
        exit_code,
    })
}

fn side_summary(report: &mut Report, side: &str, s: &SideReanalysis) {
    let key = |name: &str| format!("ks.{side}.{name}");
    report.text(key("applicable"), s.applicable);
    if !s.applicable {
        return;
    }
    match s.low_payoff_row {
        Some(i) => report.text(key("low_payoff"), i),
        None => report.text(key("low_payoff"), "missing"),
    };
    report
        .indices(key("bad"), &s.bad_rows)
        .indices(key("payoff_cap_violations"), &s.payoff_cap_violations)
        .indices(key("col_payoff_violations"), &s.col_payoff_violations)
        .indices(key("mass_violations"), &s.mass_violations)
        .text(key("sum_violations"), s.sum_violations.len());
}

fn default_z_step() -> Rational {
    rat(1, 1_000_000_000)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessRange {
    pub lo: Rational,
    pub hi: Rational,
    pub step: Rational,
}

pub fn cmd_prove_witness(range: &WitnessRange, grid: &TGrid, verbose: bool, format: NumberFormat) -> Result<Outcome, CliError> {
    let usage = |e: wsne_core::ProofLabError| match e {
        wsne_core::ProofLabError::Anomaly(a) => anomaly(a),
        other => CliError::Usage(other.to_string()),
    };
    let zs = z_grid(&range.lo, &range.hi, &range.step).map_err(usage)?;
    if zs.is_empty() {
        return Err(CliError::Usage(format!("empty z range [{}, {}]", range.lo, range.hi)));
    }
    grid.points().map_err(usage)?;
    let mut report = Report::new(format);
    report
        .number("z_lo", &range.lo)
        .number("z_hi", &range.hi)
        .number("z_step", &range.step)
        .number("t_step", &grid.step)
        .number("t_max", &grid.max)
        .text("z_points", zs.len());
    let mut evals: Vec<ZEvaluation> = Vec::new();
    let witness = if zs.len() == 1 {
        let eval = evaluate_z(&zs[0], grid).map_err(usage)?;
        evals.push(eval.clone());
        eval.accepted().then(|| eval.into_report())
    } else {
        find_witness_with(&range.lo, &range.hi, &range.step, grid, |e| {
            if verbose {
                evals.push(e.clone());
            }
        })
        .map_err(usage)?
    };
    if verbose || zs.len() == 1 {
        for (n, e) in evals.iter().enumerate() {
            let key = |name: &str| format!("eval.{n}.{name}");
            report
                .number(key("z"), &e.z)
                .number(key("sol_k0"), &e.sol_k0)
                .number(key("t0"), &e.t0)
                .number(key("sol_k1"), &e.sol_k1)
                .number(key("t1"), &e.t1)
                .text(key("accepted"), e.accepted());
        }
    }
    let exit_code = match &witness {
        Some(w) => {
            report
                .text("witness", "found")
                .number("z", &w.z)
                .number("t0", &w.t0)
                .number("t1", &w.t1)
                .number("sol_k0", &w.sol_k0)
                .number("sol_k1", &w.sol_k1)
                .number("target", &w.target())
                .text("t0_branch", "k=0 (bs=0)")
                .text("t1_branch", "k=1 (sb=0)")
                .text("verified", w.verified);
            EXIT_OK
        }
        None => {
            report.text("witness", "none");
            EXIT_BOUND_EXCEEDED
        }
    };
    Ok(Outcome {
        output: report.to_string(),
        exit_code,
    })
}

pub fn cmd_generate(
    kind: GameKind,
    rows: usize,
    cols: usize,
    seed: u64,
    denominator: u32,
    delta: Option<Rational>,
) -> Result<Outcome, CliError> {
    let usage = |e: wsne_core::GeneratorError| CliError::Usage(e.to_string());
    let game = match (kind, delta) {
        (GameKind::Figure1, Some(delta)) => figure1_game(&delta).map_err(usage)?,
        (_, Some(_)) => return Err(CliError::Usage("--delta only applies to --kind figure1".into())),
        (kind, None) => random_game(&GameSpecSeed {
            kind,
            rows,
            cols,
            seed,
            grid_denominator: denominator,
        })
        .map_err(usage)?,
    };
    Ok(Outcome {
        output: serialize_game(&game),
        exit_code: EXIT_OK,
    })
}
