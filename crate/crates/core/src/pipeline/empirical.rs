//! Loading observed comparison datasets.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::ComparisonGraph;
use crate::population::{Group, Individual, Population};

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)?)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn check_header(path: &Path, header: &csv::StringRecord, expected: &[&str], optional: usize) -> Result<()> {
    let got: Vec<&str> = header.iter().collect();
    let required = &expected[..expected.len() - optional];
    if got != required && got != expected {
        return Err(parse_error(
            path,
            1,
            format!("expected header `{}`, found `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

/// Reads a node file with header `id,group,score`.
///
/// Ids must be exactly `0..n` in any order. The score is the node's true
/// skill; observed nodes have no perception bias.
pub fn load_nodes(path: &Path) -> Result<Population> {
    let mut rdr = reader(path)?;
    check_header(path, rdr.headers()?, &["id", "group", "score"], 0)?;
    let mut rows: Vec<Option<(Group, f64)>> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        if record.len() != 3 {
            return Err(parse_error(path, line, format!("expected 3 fields, found {}", record.len())));
        }
        let id: usize = record[0]
            .parse()
            .map_err(|_| parse_error(path, line, format!("invalid id `{}`", &record[0])))?;
        let group: Group = record[1]
            .parse()
            .map_err(|_| parse_error(path, line, format!("invalid group `{}`", &record[1])))?;
        let score: f64 = record[2]
            .parse()
            .map_err(|_| parse_error(path, line, format!("invalid score `{}`", &record[2])))?;
        if !score.is_finite() {
            return Err(parse_error(path, line, "score must be finite"));
        }
        if id >= rows.len() {
            rows.resize(id + 1, None);
        }
        if rows[id].is_some() {
            return Err(parse_error(path, line, format!("duplicate node id {id}")));
        }
        rows[id] = Some((group, score));
    }
    if rows.is_empty() {
        return Err(parse_error(path, 1, "no nodes"));
    }
    if let Some(missing) = rows.iter().position(Option::is_none) {
        return Err(parse_error(
            path,
            0,
            format!("node ids must be 0..{}; id {missing} is missing", rows.len()),
        ));
    }
    let individuals = rows
        .into_iter()
        .enumerate()
        .map(|(id, row)| {
            let (group, score) = row.expect("checked above");
            Individual {
                id,
                group,
                skill: score,
                perceived: score,
            }
        })
        .collect();
    Population::new(individuals)
}

/// Reads an edge file with header `winner,loser` or `winner,loser,count`.
pub fn load_edges(path: &Path, n: usize) -> Result<ComparisonGraph> {
    let mut rdr = reader(path)?;
    let has_count = rdr.headers()?.len() == 3;
    check_header(path, rdr.headers()?, &["winner", "loser", "count"], 1)?;
    let width = if has_count { 3 } else { 2 };
    let mut graph = ComparisonGraph::new(n);
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        if record.len() != width {
            return Err(parse_error(
                path,
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let node = |k: usize| -> Result<usize> {
            let id: usize = record[k]
                .parse()
                .map_err(|_| parse_error(path, line, format!("invalid node id `{}`", &record[k])))?;
            if id >= n {
                return Err(parse_error(path, line, format!("unknown node id {id}")));
            }
            Ok(id)
        };
        let (winner, loser) = (node(0)?, node(1)?);
        if winner == loser {
            return Err(parse_error(path, line, format!("self-comparison of node {winner}")));
        }
        let count: u64 = if has_count {
            record[2]
                .parse()
                .map_err(|_| parse_error(path, line, format!("invalid count `{}`", &record[2])))?
        } else {
            1
        };
        if count == 0 {
            return Err(parse_error(path, line, "count must be positive"));
        }
        graph.record_many(winner, loser, count)?;
    }
    if graph.is_empty() {
        return Err(parse_error(path, 1, "no comparisons"));
    }
    Ok(graph)
}

/// Loads a node file and its edge file.
pub fn load_empirical(nodes: &Path, edges: &Path) -> Result<(Population, ComparisonGraph)> {
    let population = load_nodes(nodes)?;
    let graph = load_edges(edges, population.len())?;
    Ok((population, graph))
}
