//! Plain-text strategy profiles.
//!
//! ```text
//! wsne-profile v1
//! 3 2
//! 0 0 1
//! 1/2 1/2
//! ```

use wsne_core::rational::to_exact_string;
use wsne_core::{MixedStrategy, Profile};

use crate::gamefile::{expect_header, parse_dims, parse_vector, FormatError, Lines};

pub const PROFILE_HEADER: &str = "wsne-profile v1";

pub fn parse_profile(text: &str) -> Result<Profile, FormatError> {
    let mut lines = Lines::new(text);
    expect_header(&mut lines, PROFILE_HEADER)?;
    let (rows, cols) = parse_dims(&mut lines)?;
    let mut strategy = |len: usize, what: &str| -> Result<MixedStrategy, FormatError> {
        let (line, entries) = parse_vector(&mut lines, len, what)?;
        let column = entries.first().map_or(1, |(c, _)| *c);
        MixedStrategy::new(entries.into_iter().map(|(_, v)| v).collect()).map_err(|e| FormatError {
            line,
            column,
            message: e.to_string(),
        })
    };
    let x = strategy(rows, "the row strategy")?;
    let y = strategy(cols, "the column strategy")?;
    lines.expect_end()?;
    Ok(Profile::new(x, y))
}

pub fn serialize_profile(profile: &Profile) -> String {
    let line = |s: &MixedStrategy| s.probs().iter().map(to_exact_string).collect::<Vec<_>>().join(" ");
    format!(
        "{PROFILE_HEADER}\n{} {}\n{}\n{}\n",
        profile.row.len(),
        profile.col.len(),
        line(&profile.row),
        line(&profile.col)
    )
}
