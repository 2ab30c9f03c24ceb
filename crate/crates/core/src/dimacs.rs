//! Extended DIMACS shortest-path format.
//!
//! ```text
//! c comment
//! p sp <n> <m>
//! a <u> <v> <w>
//! ```
//!
//! Vertices are 1-based in the file and 0-based in memory. Weights are signed.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, WeightBound};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} {tok:?}")))
}

pub fn parse(text: &str, bound: WeightBound) -> Result<DirectedGraph> {
    read(text.as_bytes(), bound)
}

pub fn read<R: BufRead>(reader: R, bound: WeightBound) -> Result<DirectedGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize, i64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let mut toks = line.split_whitespace();
        match toks.next() {
            None | Some("c") => continue,
            Some(t) if t.starts_with('c') => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(lineno, "duplicate problem line"));
                }
                let kind: String = field(toks.next(), lineno, "problem kind")?;
                if kind != "sp" {
                    return Err(parse_err(lineno, format!("expected problem kind \"sp\", got {kind:?}")));
                }
                let n = field(toks.next(), lineno, "vertex count")?;
                let m = field(toks.next(), lineno, "edge count")?;
                header = Some((n, m));
                edges.reserve(m);
            }
            Some("a") => {
                let (n, _) = header.ok_or_else(|| parse_err(lineno, "arc line before the problem line"))?;
                let u: usize = field(toks.next(), lineno, "tail")?;
                let v: usize = field(toks.next(), lineno, "head")?;
                let w: i64 = field(toks.next(), lineno, "weight")?;
                for x in [u, v] {
                    if x == 0 || x > n {
                        return Err(parse_err(lineno, format!("vertex {x} outside 1..={n}")));
                    }
                }
                edges.push((u - 1, v - 1, w));
            }
            Some(t) => return Err(parse_err(lineno, format!("unknown line type {t:?}"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens"));
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "missing problem line \"p sp <n> <m>\""))?;
    if edges.len() != m {
        return Err(parse_err(0, format!("header declares {m} arcs but {} were read", edges.len())));
    }
    DirectedGraph::with_bound(n, edges, bound)
}

pub fn write(g: &DirectedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p sp {} {}", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(out, "a {} {} {}", e.tail + 1, e.head + 1, e.weight);
    }
    out
}
