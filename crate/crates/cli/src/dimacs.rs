//! DIMACS-style minimum-cost flow text, for cross-checking networks against
//! external solvers.
//!
//! ```text
//! c comment
//! p min <vertices> <arcs>
//! n <vertex> <balance>                      (nonzero balances only)
//! a <tail> <head> <lower> <upper> <cost>
//! ```
//!
//! Vertices are numbered from 1, so vertex `v` of a [`Network`] is written
//! as `v + 1`. A balance is outflow minus inflow, i.e. supply is positive.

use std::fmt::Write as _;
use std::io::{self, Write};

use allocflow_core::network::{Arc, Network};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing problem line")]
    MissingProblem,
    #[error("expected {expected} arcs, found {found}")]
    ArcCount { expected: usize, found: usize },
    #[error("{0}")]
    Network(#[from] allocflow_core::Error),
}

pub fn write_network(net: &Network, out: &mut impl Write) -> io::Result<()> {
    out.write_all(to_string(net).as_bytes())
}

pub fn to_string(net: &Network) -> String {
    let mut s = String::new();
    if let Some(layout) = net.layout() {
        let _ = writeln!(
            s,
            "c allocation network: {} treatments, {} recipients",
            layout.treatments, layout.recipients
        );
        let _ = writeln!(
            s,
            "c vertex 1 = source, 2..={} treatments, {}..={} recipients, {} = sink",
            layout.treatments + 1,
            layout.treatments + 2,
            layout.treatments + layout.recipients + 1,
            layout.vertex_count()
        );
    }
    let _ = writeln!(s, "p min {} {}", net.vertex_count(), net.arcs().len());
    for (v, &b) in net.balance().iter().enumerate() {
        if b != 0 {
            let _ = writeln!(s, "n {} {}", v + 1, b);
        }
    }
    for arc in net.arcs() {
        let _ = writeln!(s, "a {} {} {} {} {}", arc.tail + 1, arc.head + 1, arc.lower, arc.upper, arc.cost);
    }
    s
}

pub fn parse_network(text: &str) -> Result<Network, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut balance = Vec::new();
    let mut arcs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let syntax = |message: &str| DimacsError::Syntax { line, message: message.to_string() };
        let int = |s: &str| s.parse::<i64>().map_err(|_| syntax("bad integer"));
        let vertex = |s: &str, count: usize| match s.parse::<usize>() {
            Ok(v) if (1..=count).contains(&v) => Ok(v - 1),
            _ => Err(syntax("bad vertex")),
        };
        match fields.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if fields.len() != 4 || fields[1] != "min" || header.is_some() {
                    return Err(syntax("expected `p min <vertices> <arcs>` once"));
                }
                let v = fields[2].parse().map_err(|_| syntax("bad vertex count"))?;
                let a = fields[3].parse().map_err(|_| syntax("bad arc count"))?;
                header = Some((v, a));
                balance = vec![0; v];
            }
            Some("n") => {
                let (count, _) = header.ok_or(DimacsError::MissingProblem)?;
                if fields.len() != 3 {
                    return Err(syntax("expected `n <vertex> <balance>`"));
                }
                balance[vertex(fields[1], count)?] = int(fields[2])?;
            }
            Some("a") => {
                let (count, _) = header.ok_or(DimacsError::MissingProblem)?;
                if fields.len() != 6 {
                    return Err(syntax("expected `a <tail> <head> <lower> <upper> <cost>`"));
                }
                arcs.push(Arc {
                    tail: vertex(fields[1], count)?,
                    head: vertex(fields[2], count)?,
                    lower: int(fields[3])?,
                    upper: int(fields[4])?,
                    cost: int(fields[5])?,
                });
            }
            Some(_) => return Err(syntax("unknown line type")),
        }
    }
    let (vertices, expected) = header.ok_or(DimacsError::MissingProblem)?;
    if arcs.len() != expected {
        return Err(DimacsError::ArcCount { expected, found: arcs.len() });
    }
    Ok(Network::new(vertices, arcs, balance)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use allocflow_core::network::build_network;
    use allocflow_core::ProblemInstance;

    #[test]
    fn writes_allocation_network() {
        let instance = ProblemInstance::new(&[vec![3.0, 1.0]], vec![1, 1], 1).unwrap();
        let text = to_string(&build_network(&instance).unwrap());
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('c')).collect();
        assert_eq!(
            body,
            vec!["p min 5 5", "n 1 1", "n 5 -1", "a 1 2 0 1 0", "a 1 3 0 1 0", "a 2 4 0 1 -3", "a 3 4 0 1 -1", "a 4 5 1 1 0"]
        );
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_network("a 1 2 0 1 0\n").unwrap_err(), DimacsError::MissingProblem);
        assert!(matches!(parse_network("p min 2 1\na 1 3 0 1 0\n"), Err(DimacsError::Syntax { line: 2, .. })));
        assert!(matches!(parse_network("p min 2 2\na 1 2 0 1 0\n"), Err(DimacsError::ArcCount { .. })));
        assert!(matches!(parse_network("p min 2 0\nn 1 1\n"), Err(DimacsError::Network(_))));
        assert!(matches!(parse_network("x\n"), Err(DimacsError::Syntax { .. })));
    }
}
