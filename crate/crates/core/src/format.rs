//! Text formats: `.rmcif` instances and `.sol` solution records.
//!
//! ```text
//! c <comment>
//! p rmcif <n> <m> <K> <F>
//! a <tail> <head> <capacity>        (m lines)
//! s <k> <c_1> ... <c_m>             (K lines, k = 1..K)
//! ```
//!
//! A solution file starts with `o <variant> <solver> <robust_cost> <seconds>
//! <seed>` followed by `x <tail> <head> <value>` for every arc with a nonzero
//! value, in arc order.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Arc, Instance, IntegerFlow, ModelError, Network, ScenarioSet, SolutionRecord, SolverTag, Variant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("missing problem line")]
    MissingProblemLine,
    #[error("duplicate problem line")]
    DuplicateProblemLine,
    #[error("duplicate arc {0} -> {1}")]
    DuplicateArc(usize, usize),
    #[error("vertex index {0} out of range 1..{1}")]
    IndexOutOfRange(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("expected {expected} arc lines, found {found}")]
    ArcCount { expected: usize, found: usize },
    #[error("expected {expected} scenario lines, found {found}")]
    ScenarioCount { expected: usize, found: usize },
    #[error("scenario line {found} out of order, expected {expected}")]
    ScenarioOrder { expected: usize, found: usize },
    #[error("scenario length mismatch: {got} costs for {expected} arcs")]
    ScenarioLengthMismatch { expected: usize, got: usize },
    #[error("F exceeds maximum flow: F = {flow_value}, maximum flow = {max_flow}")]
    FlowValueExceedsMaxFlow { flow_value: i64, max_flow: i64 },
    #[error("unknown arc {0} -> {1}")]
    UnknownArc(usize, usize),
    #[error(transparent)]
    Model(ModelError),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn malformed(line: usize, what: impl Into<String>) -> ParseError {
    err(line, ParseErrorKind::Malformed(what.into()))
}

fn number<T: std::str::FromStr>(line: usize, token: Option<&str>, what: &str) -> Result<T, ParseError> {
    let token = token.ok_or_else(|| malformed(line, format!("missing {what}")))?;
    token.parse().map_err(|_| malformed(line, format!("bad {what} `{token}`")))
}

struct Header {
    line: usize,
    n: usize,
    m: usize,
    k: usize,
    flow_value: i64,
}

/// Parses and validates an `.rmcif` instance.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<Header> = None;
    let mut arcs: Vec<Arc> = Vec::new();
    let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
    let mut costs: Vec<Vec<i64>> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let mut tokens = raw.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        if tag == "c" {
            continue;
        }
        if tag != "p" && header.is_none() {
            return Err(err(line, ParseErrorKind::MissingProblemLine));
        }
        match tag {
            "p" => {
                if header.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateProblemLine));
                }
                if tokens.next() != Some("rmcif") {
                    return Err(malformed(line, "expected `p rmcif`"));
                }
                let n: usize = number(line, tokens.next(), "vertex count")?;
                let m = number(line, tokens.next(), "arc count")?;
                let k: usize = number(line, tokens.next(), "scenario count")?;
                let flow_value = number(line, tokens.next(), "flow value")?;
                if n < 2 {
                    return Err(err(line, ParseErrorKind::Model(ModelError::TooFewVertices(n))));
                }
                if k == 0 {
                    return Err(err(line, ParseErrorKind::Model(ModelError::NoScenarios)));
                }
                if flow_value < 0 {
                    return Err(err(line, ParseErrorKind::Model(ModelError::NegativeFlowValue(flow_value))));
                }
                header = Some(Header { line, n, m, k, flow_value });
            }
            "a" => {
                let h = header.as_ref().expect("checked above");
                if !costs.is_empty() {
                    return Err(malformed(line, "arc line after scenario lines"));
                }
                if arcs.len() == h.m {
                    return Err(err(line, ParseErrorKind::ArcCount { expected: h.m, found: h.m + 1 }));
                }
                let tail: usize = number(line, tokens.next(), "tail")?;
                let head: usize = number(line, tokens.next(), "head")?;
                let capacity: i64 = number(line, tokens.next(), "capacity")?;
                for v in [tail, head] {
                    if v < 1 || v > h.n {
                        return Err(err(line, ParseErrorKind::IndexOutOfRange(v, h.n)));
                    }
                }
                if tail == head {
                    return Err(err(line, ParseErrorKind::SelfLoop(tail)));
                }
                if capacity < 0 {
                    return Err(err(
                        line,
                        ParseErrorKind::Model(ModelError::NegativeCapacity { arc: arcs.len() + 1, capacity }),
                    ));
                }
                if pairs.insert((tail, head), arcs.len()).is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateArc(tail, head)));
                }
                arcs.push(Arc { tail: tail - 1, head: head - 1, capacity });
            }
            "s" => {
                let h = header.as_ref().expect("checked above");
                if arcs.len() != h.m {
                    return Err(err(line, ParseErrorKind::ArcCount { expected: h.m, found: arcs.len() }));
                }
                let k: usize = number(line, tokens.next(), "scenario index")?;
                if k != costs.len() + 1 || k > h.k {
                    return Err(err(line, ParseErrorKind::ScenarioOrder { expected: costs.len() + 1, found: k }));
                }
                let row = tokens
                    .enumerate()
                    .map(|(i, t)| {
                        let c: i64 = t.parse().map_err(|_| malformed(line, format!("bad cost `{t}`")))?;
                        if c < 0 {
                            return Err(err(
                                line,
                                ParseErrorKind::Model(ModelError::NegativeCost { scenario: k, arc: i + 1, cost: c }),
                            ));
                        }
                        Ok(c)
                    })
                    .collect::<Result<Vec<i64>, _>>()?;
                if row.len() != h.m {
                    return Err(err(line, ParseErrorKind::ScenarioLengthMismatch { expected: h.m, got: row.len() }));
                }
                costs.push(row);
            }
            other => return Err(malformed(line, format!("unknown record `{other}`"))),
        }
    }

    let h = header.ok_or_else(|| err(last_line.max(1), ParseErrorKind::MissingProblemLine))?;
    let eof = last_line.max(1);
    if arcs.len() != h.m {
        return Err(err(eof, ParseErrorKind::ArcCount { expected: h.m, found: arcs.len() }));
    }
    if costs.len() != h.k {
        return Err(err(eof, ParseErrorKind::ScenarioCount { expected: h.k, found: costs.len() }));
    }
    let m = arcs.len();
    let network = Network::new(h.n, arcs).map_err(|e| err(h.line, ParseErrorKind::Model(e)))?;
    let scenarios = ScenarioSet::new(costs, m).map_err(|e| err(h.line, ParseErrorKind::Model(e)))?;
    Instance::new(network, scenarios, h.flow_value).map_err(|e| match e {
        ModelError::FlowValueExceedsMaxFlow { flow_value, max_flow } => {
            err(h.line, ParseErrorKind::FlowValueExceedsMaxFlow { flow_value, max_flow })
        }
        other => err(h.line, ParseErrorKind::Model(other)),
    })
}

/// Canonical `.rmcif` text: no comments, single spaces, LF endings.
pub fn write_instance(instance: &Instance) -> String {
    let net = instance.network();
    let mut out = String::new();
    writeln!(
        out,
        "p rmcif {} {} {} {}",
        net.vertex_count(),
        net.arc_count(),
        instance.scenario_count(),
        instance.flow_value()
    )
    .unwrap();
    for arc in net.arcs() {
        writeln!(out, "a {} {} {}", arc.tail + 1, arc.head + 1, arc.capacity).unwrap();
    }
    for (k, costs) in instance.scenarios().iter().enumerate() {
        write!(out, "s {}", k + 1).unwrap();
        for c in costs {
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Renders a `.sol` file.
pub fn write_solution(network: &Network, record: &SolutionRecord) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "o {} {} {} {:.6} {}",
        record.variant, record.solver, record.robust_cost, record.elapsed_seconds, record.seed
    )
    .unwrap();
    for (arc, &x) in network.arcs().iter().zip(record.flow.values()) {
        if x != 0 {
            writeln!(out, "x {} {} {}", arc.tail + 1, arc.head + 1, x).unwrap();
        }
    }
    out
}

/// Parses a `.sol` file against the instance's network. Arc values are not
/// checked for feasibility.
pub fn parse_solution(network: &Network, text: &str) -> Result<SolutionRecord, ParseError> {
    let index: HashMap<(usize, usize), usize> =
        network.arcs().iter().enumerate().map(|(i, a)| ((a.tail + 1, a.head + 1), i)).collect();
    let mut record: Option<SolutionRecord> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            None | Some("c") => {}
            Some("o") => {
                let variant = tokens.next().and_then(Variant::parse).ok_or_else(|| malformed(line, "bad variant"))?;
                let solver = tokens.next().and_then(SolverTag::parse).ok_or_else(|| malformed(line, "bad solver"))?;
                let robust_cost = number(line, tokens.next(), "robust cost")?;
                let elapsed_seconds = number(line, tokens.next(), "seconds")?;
                let seed = number(line, tokens.next(), "seed")?;
                record = Some(SolutionRecord {
                    variant,
                    solver,
                    robust_cost,
                    flow: IntegerFlow::zero(network.arc_count()),
                    elapsed_seconds,
                    seed,
                });
            }
            Some("x") => {
                let rec = record.as_mut().ok_or_else(|| malformed(line, "arc value before `o` line"))?;
                let tail: usize = number(line, tokens.next(), "tail")?;
                let head: usize = number(line, tokens.next(), "head")?;
                let value: i64 = number(line, tokens.next(), "value")?;
                let a = *index.get(&(tail, head)).ok_or_else(|| err(line, ParseErrorKind::UnknownArc(tail, head)))?;
                rec.flow.values_mut()[a] = value;
            }
            Some(other) => return Err(malformed(line, format!("unknown record `{other}`"))),
        }
    }
    record.ok_or_else(|| malformed(1, "missing `o` line"))
}
