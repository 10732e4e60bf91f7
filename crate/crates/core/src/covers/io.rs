use std::io::Write;

use super::{CoverKind, CoverRecord, GeneralizedAssignment};
use crate::error::{Error, Result};

/// One cover per line: `N` space-separated tokens from `{0, 1, *}`, then
/// `| TRUE`, `| FALSE` or `| TRIVIAL`.
pub fn write_covers<W: Write>(covers: &[CoverRecord], mut w: W) -> Result<()> {
    for c in covers {
        writeln!(w, "{} | {}", c.assignment.to_tokens(), c.kind.label())?;
    }
    Ok(())
}

pub fn read_covers(text: &str) -> Result<Vec<(GeneralizedAssignment, CoverKind)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| Error::Parse { line: i + 1, message: m.to_string() };
        let (values, label) = line.split_once('|').ok_or_else(|| err("missing '|'"))?;
        let assignment = GeneralizedAssignment::parse(values).map_err(|_| err("bad value token"))?;
        let kind = match label.trim() {
            "TRUE" => CoverKind::True,
            "FALSE" => CoverKind::False,
            "TRIVIAL" => CoverKind::Trivial,
            "UNKNOWN" => CoverKind::Unknown,
            other => return Err(err(&format!("unknown label {other:?}"))),
        };
        out.push((assignment, kind));
    }
    Ok(out)
}
