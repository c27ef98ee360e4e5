//! Plain-text graph files, JSON-lines query streams and transcripts.
//!
//! Graph file: first line `|V|`, then one `i j` edge per line (0-based).
//! Weighted file: first line `|V|`, then `i j w` for every pair; weights are
//! written in shortest round-trip form, so reading back is exact.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::histogram::DataHistogram;
use crate::online::AnswerRecord;
use crate::query::{LinearQuery, QueryTag};
use crate::universe::Universe;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(Error::from))
        .filter(|r| !matches!(r, Ok((_, l)) if l.trim().is_empty()))
}

fn read_header(lines: &mut impl Iterator<Item = Result<(usize, String)>>) -> Result<usize> {
    let (no, line) = lines.next().ok_or_else(|| parse_err(1, "missing vertex count"))??;
    line.trim().parse().map_err(|_| parse_err(no, format!("bad vertex count {:?}", line.trim())))
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, no: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(no, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(no, format!("bad {what} {tok:?}")))
}

pub fn read_graph(reader: impl BufRead) -> Result<DataHistogram> {
    let mut lines = content_lines(reader);
    let v = read_header(&mut lines)?;
    let mut edges = Vec::new();
    for item in lines {
        let (no, line) = item?;
        let mut toks = line.split_whitespace();
        let i: usize = parse_field(toks.next(), no, "vertex")?;
        let j: usize = parse_field(toks.next(), no, "vertex")?;
        if toks.next().is_some() {
            return Err(parse_err(no, "expected two vertices"));
        }
        edges.push((i, j));
    }
    DataHistogram::from_edges(v, &edges)
}

pub fn write_graph(g: &DataHistogram, mut w: impl Write) -> Result<()> {
    let v = g.universe().require_graph()?;
    writeln!(w, "{v}")?;
    for (i, j) in g.edges() {
        writeln!(w, "{i} {j}")?;
    }
    Ok(())
}

/// Reads `|V|` and one weight per pair.
pub fn read_weighted(reader: impl BufRead) -> Result<(usize, Vec<f64>)> {
    let mut lines = content_lines(reader);
    let v = read_header(&mut lines)?;
    let u = Universe::graph(v)?;
    let mut weights = vec![None; u.size()];
    for item in lines {
        let (no, line) = item?;
        let mut toks = line.split_whitespace();
        let i: usize = parse_field(toks.next(), no, "vertex")?;
        let j: usize = parse_field(toks.next(), no, "vertex")?;
        let x: f64 = parse_field(toks.next(), no, "weight")?;
        let e = u.pair_index(i, j).map_err(|e| parse_err(no, e.to_string()))?;
        if weights[e].replace(x).is_some() {
            return Err(parse_err(no, format!("pair {{{i}, {j}}} listed twice")));
        }
    }
    let weights = weights
        .into_iter()
        .enumerate()
        .map(|(e, w)| w.ok_or_else(|| Error::Validation(format!("weighted graph has no entry for pair index {e}"))))
        .collect::<Result<Vec<f64>>>()?;
    Ok((v, weights))
}

pub fn write_weighted(vertex_count: usize, weights: &[f64], mut w: impl Write) -> Result<()> {
    let u = Universe::graph(vertex_count)?;
    if weights.len() != u.size() {
        return Err(Error::DimensionMismatch { expected: u.size(), got: weights.len() });
    }
    writeln!(w, "{vertex_count}")?;
    for (e, i, j) in u.pairs() {
        writeln!(w, "{i} {j} {}", weights[e])?;
    }
    Ok(())
}

/// Query stream, one `{"type":"cut",...}` or `{"type":"rank1",...}` per line.
pub fn read_queries(reader: impl BufRead, universe: &Universe) -> Result<Vec<LinearQuery>> {
    content_lines(reader)
        .map(|item| {
            let (no, line) = item?;
            let tag: QueryTag = serde_json::from_str(&line).map_err(|e| parse_err(no, e.to_string()))?;
            LinearQuery::from_tag(&tag, universe).map_err(|e| parse_err(no, e.to_string()))
        })
        .collect()
}

pub fn write_queries<'a>(tags: impl IntoIterator<Item = &'a QueryTag>, mut w: impl Write) -> Result<()> {
    for tag in tags {
        serde_json::to_writer(&mut w, tag)?;
        writeln!(w)?;
    }
    Ok(())
}

/// One record per line; internal fields are dropped unless `include_internal`.
pub fn write_transcript(records: &[AnswerRecord], include_internal: bool, mut w: impl Write) -> Result<()> {
    for r in records {
        if include_internal {
            serde_json::to_writer(&mut w, r)?;
        } else {
            serde_json::to_writer(&mut w, &r.public())?;
        }
        writeln!(w)?;
    }
    Ok(())
}
