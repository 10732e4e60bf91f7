use std::fmt::Write as _;
use std::io::Write;

use super::{Assignment, Formula, Lit};
use crate::error::{Error, Result};

/// Non-fatal findings while reading DIMACS text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// The header declared a different clause count than the body holds.
    ClauseCountMismatch { declared: usize, found: usize },
    /// A clause contains both `x` and `!x`; kept as is.
    Tautology { line: usize },
    /// A literal was repeated inside a clause; the repeat was dropped.
    DuplicateLiteral { line: usize, literal: i64 },
}

#[derive(Debug, Clone)]
pub struct Parsed {
    pub formula: Formula,
    pub warnings: Vec<ParseWarning>,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Reads a DIMACS CNF document.
///
/// Comment lines start with `c`. Clauses are zero-terminated and may span
/// lines. The declared variable count is authoritative; a differing clause
/// count is reported as a warning and the body wins. A trailing `%` line
/// (as found in SATLIB benchmark files) ends the body.
pub fn parse_dimacs(text: &str) -> Result<Parsed> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut warnings = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut current_start = 0usize;
    let mut tautology = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_error(line_no, "duplicate header"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(parse_error(line_no, format!("malformed header {line:?}")));
            }
            let n = fields[2]
                .parse::<usize>()
                .map_err(|_| parse_error(line_no, format!("bad variable count {:?}", fields[2])))?;
            let m = fields[3]
                .parse::<usize>()
                .map_err(|_| parse_error(line_no, format!("bad clause count {:?}", fields[3])))?;
            header = Some((n, m));
            continue;
        }
        let (num_vars, _) = header.ok_or_else(|| parse_error(line_no, "clause before header"))?;
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| parse_error(line_no, format!("bad literal {token:?}")))?;
            if value == 0 {
                if current.is_empty() {
                    return Err(parse_error(line_no, "empty clause"));
                }
                if tautology {
                    warnings.push(ParseWarning::Tautology { line: current_start });
                }
                clauses.push(std::mem::take(&mut current));
                tautology = false;
                continue;
            }
            if value.unsigned_abs() as usize > num_vars {
                return Err(parse_error(
                    line_no,
                    format!("literal {value} exceeds declared variable count {num_vars}"),
                ));
            }
            if current.is_empty() {
                current_start = line_no;
            }
            let lit = Lit::from_dimacs(value);
            if current.contains(&lit) {
                warnings.push(ParseWarning::DuplicateLiteral { line: line_no, literal: value });
                continue;
            }
            if current.contains(&!lit) {
                tautology = true;
            }
            current.push(lit);
        }
    }

    let (num_vars, declared) = header.ok_or_else(|| parse_error(text.lines().count().max(1), "missing header"))?;
    if !current.is_empty() {
        return Err(parse_error(current_start, "unterminated clause"));
    }
    if declared != clauses.len() {
        warnings.push(ParseWarning::ClauseCountMismatch { declared, found: clauses.len() });
    }
    for w in &warnings {
        log::warn!("dimacs: {w:?}");
    }
    Ok(Parsed { formula: Formula::new(num_vars, clauses)?, warnings })
}

/// Renders a formula as DIMACS: header line, then one clause per line with
/// space-separated literals and a `0` terminator.
pub fn render_dimacs(f: &Formula) -> String {
    let mut out = String::with_capacity(16 + f.num_literals() * 6);
    writeln!(out, "p cnf {} {}", f.num_vars(), f.num_clauses()).unwrap();
    for clause in f.clauses() {
        for lit in clause {
            write!(out, "{} ", lit.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

pub fn write_dimacs<W: Write>(f: &Formula, mut w: W) -> std::io::Result<()> {
    w.write_all(render_dimacs(f).as_bytes())
}

/// Reads a model given as whitespace-separated signed literals. An optional
/// leading `v`/`s` token per line and a `0` terminator are accepted.
/// Variables not mentioned default to false.
pub fn parse_model(text: &str, num_vars: usize) -> Result<Assignment> {
    let mut values = vec![false; num_vars];
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('s') || line.starts_with('c') {
            continue;
        }
        for token in line.split_whitespace() {
            if token == "v" {
                continue;
            }
            let value: i64 = token.parse().map_err(|_| parse_error(idx + 1, format!("bad literal {token:?}")))?;
            if value == 0 {
                continue;
            }
            let var = value.unsigned_abs() as usize;
            if var > num_vars {
                return Err(parse_error(idx + 1, format!("literal {value} out of range")));
            }
            values[var - 1] = value > 0;
        }
    }
    Ok(Assignment::new(values))
}
