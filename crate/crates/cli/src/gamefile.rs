//! Plain-text game files.
//!
//! ```text
//! wsne-game v1
//! 3 2
//! 1 1/3
//! 1/3 1
//! 0 0
//! ---
//! 1/3 1
//! 1 1/3
//! 0 0
//! ```
//!
//! Entries are `p/q` fractions, integers or decimal literals, all read
//! exactly. Blank lines and lines starting with `#` are ignored.

use std::fmt;

use wsne_core::game::{normalize_game, AffineMap};
use wsne_core::rational::{is_in_unit_interval, parse_rational, to_exact_string};
use wsne_core::{BimatrixGame, Rational};

pub const GAME_HEADER: &str = "wsne-game v1";
const SEPARATOR: &str = "---";

/// Parse error with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for FormatError {}

/// A parsed game and, when `--normalize` rescaled it, the maps from the
/// original payoffs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedGame {
    pub game: BimatrixGame,
    pub normalization: Option<(AffineMap, AffineMap)>,
}

/// Content lines with their 1-based line numbers.
pub(crate) struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last_line: 0,
        }
    }

    pub(crate) fn next_content(&mut self, what: &str) -> Result<(usize, &'a str), FormatError> {
        for (idx, line) in self.inner.by_ref() {
            self.last_line = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Ok((idx + 1, line));
        }
        Err(FormatError {
            line: self.last_line + 1,
            column: 1,
            message: format!("unexpected end of input, expected {what}"),
        })
    }

    pub(crate) fn expect_end(&mut self) -> Result<(), FormatError> {
        match self.next_content("") {
            Ok((line, text)) => Err(FormatError {
                line,
                column: first_column(text),
                message: "unexpected content after the last block".into(),
            }),
            Err(_) => Ok(()),
        }
    }
}

fn first_column(text: &str) -> usize {
    text.len() - text.trim_start().len() + 1
}

/// Whitespace-separated tokens with their 1-based columns.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(idx),
            (true, Some(s)) => {
                out.push((s, &line[s..idx]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

pub(crate) fn expect_header(lines: &mut Lines<'_>, header: &str) -> Result<(), FormatError> {
    let (line, text) = lines.next_content("a header")?;
    if text.trim() != header {
        return Err(FormatError {
            line,
            column: first_column(text),
            message: format!("expected header `{header}`"),
        });
    }
    Ok(())
}

pub(crate) fn parse_dims(lines: &mut Lines<'_>) -> Result<(usize, usize), FormatError> {
    let (line, text) = lines.next_content("a `<rows> <cols>` line")?;
    let toks = tokens(text);
    if toks.len() != 2 {
        return Err(FormatError {
            line,
            column: first_column(text),
            message: format!("expected `<rows> <cols>`, found {} fields", toks.len()),
        });
    }
    let mut dims = [0usize; 2];
    for (slot, (column, tok)) in dims.iter_mut().zip(&toks) {
        *slot = match tok.parse::<usize>() {
            Ok(v) if v > 0 => v,
            _ => {
                return Err(FormatError {
                    line,
                    column: *column,
                    message: format!("`{tok}` is not a positive integer"),
                })
            }
        };
    }
    Ok((dims[0], dims[1]))
}

/// Parses one line of exactly `len` rationals.
pub(crate) fn parse_vector(lines: &mut Lines<'_>, len: usize, what: &str) -> Result<(usize, Vec<(usize, Rational)>), FormatError> {
    let (line, text) = lines.next_content(what)?;
    let toks = tokens(text);
    if toks.len() != len {
        return Err(FormatError {
            line,
            column: first_column(text),
            message: format!("expected {len} entries in {what}, found {}", toks.len()),
        });
    }
    let values = toks
        .into_iter()
        .map(|(column, tok)| {
            parse_rational(tok)
                .map(|v| (column, v))
                .map_err(|e| FormatError {
                    line,
                    column,
                    message: e.to_string(),
                })
        })
        .collect::<Result<_, _>>()?;
    Ok((line, values))
}

fn parse_matrix(
    lines: &mut Lines<'_>,
    rows: usize,
    cols: usize,
    name: &str,
    normalize: bool,
) -> Result<Vec<Vec<Rational>>, FormatError> {
    let mut matrix = Vec::with_capacity(rows);
    for i in 0..rows {
        let (line, entries) = parse_vector(lines, cols, &format!("row {i} of {name}"))?;
        let mut row = Vec::with_capacity(cols);
        for (column, v) in entries {
            if !normalize && !is_in_unit_interval(&v) {
                return Err(FormatError {
                    line,
                    column,
                    message: format!("{name} entry {v} lies outside [0, 1] (use --normalize to rescale)"),
                });
            }
            row.push(v);
        }
        matrix.push(row);
    }
    Ok(matrix)
}

/// Parses a game file. Without `normalize`, entries outside `[0, 1]` are
/// errors; with it, each matrix is rescaled onto `[0, 1]`.
pub fn parse_game(text: &str, normalize: bool) -> Result<LoadedGame, FormatError> {
    let mut lines = Lines::new(text);
    expect_header(&mut lines, GAME_HEADER)?;
    let (rows, cols) = parse_dims(&mut lines)?;
    let r = parse_matrix(&mut lines, rows, cols, "R", normalize)?;
    let (line, text_line) = lines.next_content("the `---` separator")?;
    if text_line.trim() != SEPARATOR {
        return Err(FormatError {
            line,
            column: first_column(text_line),
            message: format!("expected `{SEPARATOR}` between R and C"),
        });
    }
    let c = parse_matrix(&mut lines, rows, cols, "C", normalize)?;
    lines.expect_end()?;
    let invalid = |e: wsne_core::GameError| FormatError {
        line: 2,
        column: 1,
        message: e.to_string(),
    };
    if normalize {
        let n = normalize_game(&r, &c).map_err(invalid)?;
        Ok(LoadedGame {
            game: n.game,
            normalization: Some((n.row_map, n.col_map)),
        })
    } else {
        Ok(LoadedGame {
            game: BimatrixGame::new(r, c).map_err(invalid)?,
            normalization: None,
        })
    }
}

/// Canonical text of a game; [`parse_game`] reads it back exactly.
pub fn serialize_game(game: &BimatrixGame) -> String {
    let mut out = format!("{GAME_HEADER}\n{} {}\n", game.rows(), game.cols());
    let block = |out: &mut String, m: &[Vec<Rational>]| {
        for row in m {
            let cells: Vec<String> = row.iter().map(to_exact_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    };
    block(&mut out, game.row_matrix());
    out.push_str(SEPARATOR);
    out.push('\n');
    block(&mut out, game.col_matrix());
    out
}
