//! Diagram CSV: header `dim,birth,death`, one row per pair sorted by
//! `(dim, birth, death)`, essential deaths written as `inf`.

use std::path::Path;

use super::{PersistenceDiagram, PersistencePair};
use crate::error::{Error, Result};
use crate::fmt::g17;

const HEADER: &str = "dim,birth,death";

pub fn format_diagram(d: &PersistenceDiagram) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for p in d.pairs() {
        out.push_str(&format!("{},{},{}\n", p.dim, g17(p.birth), g17(p.death)));
    }
    out
}

pub fn write_diagram(d: &PersistenceDiagram, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_diagram(d))?;
    Ok(())
}

fn parse_value(tok: &str, line: usize, allow_inf: bool) -> Result<f64> {
    let bad = |reason: String| Error::MalformedCsv { line, reason };
    if tok == "inf" {
        return if allow_inf { Ok(f64::INFINITY) } else { Err(bad("birth cannot be inf".into())) };
    }
    // Rust's float parser also accepts spellings like "NaN" and "infinity".
    if !tok.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'+' | b'-' | b'.' | b'e' | b'E')) {
        return Err(bad(format!("unknown token {tok:?}")));
    }
    tok.parse::<f64>().map_err(|_| bad(format!("unknown token {tok:?}")))
}

pub fn parse_diagram(text: &str) -> Result<PersistenceDiagram> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(Error::MalformedCsv { line: 1, reason: format!("expected header {HEADER:?}") }),
    }
    let mut pairs = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::MalformedCsv { line, reason: format!("expected 3 fields, got {}", fields.len()) });
        }
        let dim: usize = fields[0]
            .parse()
            .ok()
            .filter(|&d| d <= 2)
            .ok_or_else(|| Error::MalformedCsv { line, reason: format!("bad dimension {:?}", fields[0]) })?;
        let birth = parse_value(fields[1], line, false)?;
        let death = parse_value(fields[2], line, true)?;
        if death <= birth {
            return Err(Error::MalformedCsv { line, reason: "death must exceed birth".into() });
        }
        pairs.push(PersistencePair::new(dim, birth, death));
    }
    Ok(PersistenceDiagram::new(pairs))
}

pub fn read_diagram(path: impl AsRef<Path>) -> Result<PersistenceDiagram> {
    parse_diagram(&std::fs::read_to_string(path)?)
}
