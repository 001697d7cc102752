//! Readers for the plain-text graph, pair, vertex and tree files.
//!
//! Graph files hold one edge per line as `u v w` (non-negative integer
//! labels, positive weight). Pair files hold `u v` per line and vertex files
//! one label per line. In all of them blank lines and lines starting with `#`
//! are skipped. Tree files are the JSON lines written by `sample`.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use schursample_core::EdgeId;
use serde::Deserialize;

use crate::CliError;

/// Reads a file, or stdin when the path is `-`.
pub fn read_source(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            None
        } else {
            Some((i + 1, t.split_whitespace().collect()))
        }
    })
}

fn parse_label(tok: &str, line: usize) -> Result<u64, CliError> {
    tok.parse()
        .map_err(|_| CliError::Parse(format!("line {line}: {tok:?} is not a non-negative integer label")))
}

fn expect_fields(fields: &[&str], count: usize, what: &str, line: usize) -> Result<(), CliError> {
    if fields.len() == count {
        Ok(())
    } else {
        Err(CliError::Parse(format!(
            "line {line}: expected {what}, found {} fields",
            fields.len()
        )))
    }
}

pub fn parse_graph(text: &str) -> Result<Vec<(u64, u64, f64)>, CliError> {
    data_lines(text)
        .map(|(line, f)| {
            expect_fields(&f, 3, "`u v w`", line)?;
            let w: f64 = f[2]
                .parse()
                .map_err(|_| CliError::Parse(format!("line {line}: {:?} is not a number", f[2])))?;
            Ok((parse_label(f[0], line)?, parse_label(f[1], line)?, w))
        })
        .collect()
}

pub fn parse_pairs(text: &str) -> Result<Vec<(u64, u64)>, CliError> {
    data_lines(text)
        .map(|(line, f)| {
            expect_fields(&f, 2, "`u v`", line)?;
            Ok((parse_label(f[0], line)?, parse_label(f[1], line)?))
        })
        .collect()
}

pub fn parse_vertices(text: &str) -> Result<Vec<u64>, CliError> {
    data_lines(text)
        .map(|(line, f)| {
            expect_fields(&f, 1, "one vertex label", line)?;
            parse_label(f[0], line)
        })
        .collect()
}

#[derive(Deserialize)]
struct TreeLine {
    edges: Vec<usize>,
}

/// Edge sets from JSON lines with an `"edges"` array of edge indices.
pub fn parse_trees(text: &str) -> Result<Vec<Vec<EdgeId>>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let t: TreeLine = serde_json::from_str(l).map_err(|e| CliError::Parse(format!("line {}: {e}", i + 1)))?;
            Ok(t.edges.into_iter().map(EdgeId::Original).collect())
        })
        .collect()
}
