//! Text formats: graphs, divisors, tree decompositions, trace exports,
//! and scan reports.
//!
//! Graph files are line based, UTF-8, `#` comments:
//!
//! ```text
//! vertex <id>
//! edge <idA> <idB> <length>
//! ```
//!
//! Divisor files hold `chip <vertexId> <integer>` lines; vertex ids may be
//! lattice points in the `e{i}@{j}/{m}` naming scheme. Decomposition
//! files are a `roots <id> ...` line followed by three graph blocks, each
//! opened by a `tree <1|2|3>` line. Parsers report line and column
//! numbers; serializers emit sorted, stable output so identical inputs
//! produce byte-identical files.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::burning::{BurnResult, ReductionTrace};
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::model::{Divisor, Model};
use crate::trees::{ScanGonality, ScanReport, TreeDecomposition};

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Split a line into whitespace tokens with 1-based column positions.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut column = 1;
    for piece in line.split_inclusive(char::is_whitespace) {
        let token = piece.trim_end_matches(char::is_whitespace);
        if !token.is_empty() {
            out.push((column, token));
        }
        column += piece.chars().count();
    }
    out
}

/// Strip a `#` comment.
fn content(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parse the graph text format.
pub fn parse_graph(text: &str) -> Result<MetricGraph> {
    parse_graph_named(text, None)
}

pub fn parse_graph_named(text: &str, name: Option<&str>) -> Result<MetricGraph> {
    let mut vertices: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String, u32)> = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let number = number + 1;
        let line = content(raw);
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        match toks[0].1 {
            "vertex" => {
                if toks.len() != 2 {
                    return Err(parse_error(number, toks[0].0, "expected: vertex <id>"));
                }
                vertices.push(toks[1].1.to_owned());
            }
            "edge" => {
                if toks.len() != 4 {
                    return Err(parse_error(
                        number,
                        toks[0].0,
                        "expected: edge <idA> <idB> <length>",
                    ));
                }
                let length: i64 = toks[3].1.parse().map_err(|_| {
                    parse_error(number, toks[3].0, format!("bad length {:?}", toks[3].1))
                })?;
                if length < 1 {
                    return Err(parse_error(
                        number,
                        toks[3].0,
                        format!("length must be a positive integer, got {length}"),
                    ));
                }
                edges.push((toks[1].1.to_owned(), toks[2].1.to_owned(), length as u32));
            }
            other => {
                return Err(parse_error(
                    number,
                    toks[0].0,
                    format!("unknown directive {other:?}"),
                ));
            }
        }
    }
    let edge_refs: Vec<(&str, &str, u32)> = edges
        .iter()
        .map(|(a, b, l)| (a.as_str(), b.as_str(), *l))
        .collect();
    MetricGraph::new(name, &vertices, &edge_refs)
}

/// Serialize a graph: sorted vertex lines, then edges in stored order.
pub fn graph_to_text(graph: &MetricGraph) -> String {
    let mut out = String::new();
    for id in graph.vertex_ids() {
        out.push_str(&format!("vertex {id}\n"));
    }
    for e in graph.edges() {
        out.push_str(&format!(
            "edge {} {} {}\n",
            graph.vertex_id(e.a),
            graph.vertex_id(e.b),
            e.length
        ));
    }
    out
}

/// Parse a divisor file against a model.
pub fn parse_divisor(text: &str, model: &Arc<Model>) -> Result<Divisor> {
    let mut divisor = model.zero_divisor();
    for (number, raw) in text.lines().enumerate() {
        let number = number + 1;
        let line = content(raw);
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        if toks[0].1 != "chip" || toks.len() != 3 {
            return Err(parse_error(
                number,
                toks[0].0,
                "expected: chip <vertexId> <integer>",
            ));
        }
        let vertex = model.vertex_index(toks[1].1).map_err(|_| {
            parse_error(
                number,
                toks[1].0,
                format!("unknown model vertex {:?}", toks[1].1),
            )
        })?;
        let amount: i64 = toks[2].1.parse().map_err(|_| {
            parse_error(number, toks[2].0, format!("bad chip count {:?}", toks[2].1))
        })?;
        divisor.chips_mut()[vertex] += amount;
    }
    Ok(divisor)
}

/// Serialize a divisor: one `chip` line per support vertex, index order.
pub fn divisor_to_text(divisor: &Divisor) -> String {
    let model = divisor.model();
    let mut out = String::new();
    for v in divisor.support() {
        out.push_str(&format!("chip {} {}\n", model.vertex_id(v), divisor.chips()[v]));
    }
    out
}

/// Parse a decomposition file: `roots` line plus three `tree` blocks.
pub fn parse_decomposition(text: &str) -> Result<TreeDecomposition> {
    let mut roots: Option<Vec<String>> = None;
    let mut blocks: Vec<Vec<String>> = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let number = number + 1;
        let line = content(raw);
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        match toks[0].1 {
            "roots" => {
                if toks.len() < 4 {
                    return Err(parse_error(
                        number,
                        toks[0].0,
                        "a decomposition needs at least 3 roots",
                    ));
                }
                roots = Some(toks[1..].iter().map(|(_, t)| (*t).to_owned()).collect());
            }
            "tree" => {
                if blocks.len() == 3 {
                    return Err(parse_error(number, toks[0].0, "more than three tree blocks"));
                }
                blocks.push(Vec::new());
            }
            "vertex" | "edge" => match blocks.last_mut() {
                Some(block) => block.push(raw.to_owned()),
                None => {
                    return Err(parse_error(
                        number,
                        toks[0].0,
                        "graph lines must follow a `tree` line",
                    ))
                }
            },
            other => {
                return Err(parse_error(
                    number,
                    toks[0].0,
                    format!("unknown directive {other:?}"),
                ));
            }
        }
    }
    let roots = roots.ok_or_else(|| parse_error(1, 1, "missing roots line"))?;
    if blocks.len() != 3 {
        return Err(parse_error(
            1,
            1,
            format!("expected three tree blocks, got {}", blocks.len()),
        ));
    }
    let mut trees = Vec::new();
    for block in &blocks {
        trees.push(parse_graph(&block.join("\n"))?);
    }
    TreeDecomposition::new(roots, [trees[0].clone(), trees[1].clone(), trees[2].clone()])
}

pub fn decomposition_to_text(decomposition: &TreeDecomposition) -> String {
    let mut out = format!("roots {}\n", decomposition.roots().join(" "));
    for (i, tree) in decomposition.trees().iter().enumerate() {
        out.push_str(&format!("tree {}\n", i + 1));
        out.push_str(&graph_to_text(tree));
    }
    out
}

fn chip_map(divisor: &Divisor) -> BTreeMap<String, i64> {
    let model = divisor.model();
    divisor
        .support()
        .into_iter()
        .map(|v| (model.vertex_id(v).to_owned(), divisor.chips()[v]))
        .collect()
}

#[derive(Serialize)]
struct TraceJson {
    source: String,
    initial: BTreeMap<String, i64>,
    #[serde(rename = "debtSteps")]
    debt_steps: Vec<DebtStepJson>,
    steps: Vec<StepJson>,
    #[serde(rename = "final")]
    final_divisor: BTreeMap<String, i64>,
}

#[derive(Serialize)]
struct DebtStepJson {
    fired: Vec<String>,
    divisor: BTreeMap<String, i64>,
}

#[derive(Serialize)]
struct StepJson {
    #[serde(rename = "burntOrder")]
    burnt_order: Vec<String>,
    divisor: BTreeMap<String, i64>,
}

/// Trace as stable JSON: `steps[]` with `burntOrder[]` and the divisor
/// after each firing; debt-clearing firings listed separately.
pub fn trace_to_json(trace: &ReductionTrace) -> String {
    let model = trace.initial.model();
    let id = |v: usize| model.vertex_id(v).to_owned();
    let doc = TraceJson {
        source: id(trace.q),
        initial: chip_map(&trace.initial),
        debt_steps: trace
            .debt_steps
            .iter()
            .map(|s| DebtStepJson {
                fired: s.fired.iter().map(|&v| id(v)).collect(),
                divisor: chip_map(&s.after),
            })
            .collect(),
        steps: trace
            .steps
            .iter()
            .map(|s| StepJson {
                burnt_order: s.burn.burn_order().into_iter().map(id).collect(),
                divisor: chip_map(&s.after),
            })
            .collect(),
        final_divisor: chip_map(&trace.final_divisor),
    };
    serde_json::to_string_pretty(&doc).expect("trace serializes")
}

fn dot_frame(divisor: &Divisor, burnt: Option<&BurnResult>, source: usize) -> String {
    let model = divisor.model();
    let mut out = String::from("graph trace {\n  node [shape=circle];\n");
    for v in 0..model.vertex_count() {
        let id = model.vertex_id(v);
        let chips = divisor.chips()[v];
        let shaded = burnt.map_or(v == source, |b| b.is_burnt(v));
        let fill = if shaded {
            ", style=filled, fillcolor=gray80"
        } else {
            ""
        };
        out.push_str(&format!(
            "  \"{id}\" [label=\"{id}\\n{chips}\"{fill}];\n"
        ));
    }
    for &(a, b) in model.unit_edges() {
        out.push_str(&format!(
            "  \"{}\" -- \"{}\";\n",
            model.vertex_id(a as usize),
            model.vertex_id(b as usize)
        ));
    }
    out.push_str("}\n");
    out
}

/// Trace as DOT frames, one per step: frame 0 is the initial divisor with
/// only the source shaded; each later frame shades that step's burnt set
/// and shows the chips after its firing; the last frame is the reduced
/// divisor, fully burnt.
pub fn trace_to_dot_frames(trace: &ReductionTrace) -> Vec<(String, String)> {
    let mut frames = Vec::new();
    frames.push((
        "step_000.dot".to_owned(),
        dot_frame(&trace.initial, None, trace.q),
    ));
    for (i, step) in trace.steps.iter().enumerate() {
        frames.push((
            format!("step_{:03}.dot", i + 1),
            dot_frame(&step.after, Some(&step.burn), trace.q),
        ));
    }
    let final_burn = crate::burning::dhar_burn_at(&trace.final_divisor, trace.q)
        .expect("final divisor is effective away from q");
    frames.push((
        format!("step_{:03}.dot", trace.steps.len() + 1),
        dot_frame(&trace.final_divisor, Some(&final_burn), trace.q),
    ));
    frames
}

fn scan_fields(report: &ScanReport) -> Vec<[String; 5]> {
    report
        .rows
        .iter()
        .map(|row| {
            let lengths = row
                .lengths
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let gonality = match &row.gonality {
                ScanGonality::Exact { value, .. } => value.to_string(),
                ScanGonality::AtMost { bound, .. } => format!("<={bound}"),
            };
            let mut flags = Vec::new();
            if row.low_gonality {
                flags.push("low-gonality");
            }
            if row.girth_maximal {
                flags.push("max-girth");
            }
            let flag = if flags.is_empty() {
                "-".to_owned()
            } else {
                flags.join(";")
            };
            [
                lengths,
                row.girth.to_string(),
                gonality,
                row.gonality.witness().to_owned(),
                flag,
            ]
        })
        .collect()
}

/// Scan report as TSV with the `lengths,girth,gonality,witness,flag`
/// header.
pub fn scan_to_tsv(report: &ScanReport) -> String {
    let mut out = String::from("lengths\tgirth\tgonality\twitness\tflag\n");
    for fields in scan_fields(report) {
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    out
}

/// Scan report as CSV (fields with commas are double-quoted).
pub fn scan_to_csv(report: &ScanReport) -> String {
    let quote = |s: &str| {
        if s.contains(',') || s.contains('"') {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_owned()
        }
    };
    let mut out = String::from("lengths,girth,gonality,witness,flag\n");
    for fields in scan_fields(report) {
        let quoted: Vec<String> = fields.iter().map(|f| quote(f)).collect();
        out.push_str(&quoted.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::model::Model;

    #[test]
    fn parse_simple_path() {
        let g = parse_graph("edge a b 1\nedge b c 1\n").unwrap();
        assert_eq!(g.genus(), 0);
        assert_eq!(g.vertex_count(), 3);
    }

    #[test]
    fn k33_round_trips() {
        let g = corpus::k33();
        let text = graph_to_text(&g);
        let parsed = parse_graph(&text).unwrap();
        assert_eq!(parsed, g);
        assert_eq!(graph_to_text(&parsed), text);
    }

    #[test]
    fn loop_edge_is_rejected_with_location() {
        let err = parse_graph("edge a a 1\n").unwrap_err();
        assert!(matches!(err, Error::LoopEdge { .. }));
        let err = parse_graph("edge a b 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_graph("edgy a b 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 1, .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored()  {
        let g = parse_graph("# a path\n\nedge a b 2 # long edge\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.total_length(), 2);
    }

    #[test]
    fn divisor_round_trip_with_lattice_points() {
        let m = Model::refine(&corpus::k33(), 2).unwrap();
        let d = m.divisor(&[("u1", 2), ("e0@1/2", 1), ("w3", -1)]).unwrap();
        let text = divisor_to_text(&d);
        let parsed = parse_divisor(&text, &m).unwrap();
        assert_eq!(parsed, d);
    }

    #[test]
    fn divisor_rejects_unknown_vertices() {
        let m = Model::refine(&corpus::k33(), 1).unwrap();
        assert!(parse_divisor("chip nope 1\n", &m).is_err());
        // Lattice names only exist at matching refinement.
        assert!(parse_divisor("chip e0@1/2 1\n", &m).is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let d = crate::trees::find_tree_decomposition(&corpus::k33(), 3)
            .unwrap()
            .unwrap();
        let text = decomposition_to_text(&d);
        let parsed = parse_decomposition(&text).unwrap();
        assert_eq!(parsed.roots(), d.roots());
        assert_eq!(decomposition_to_text(&parsed), text);
    }

    #[test]
    fn trace_json_has_stable_shape() {
        let m = Model::refine(&corpus::k33(), 1).unwrap();
        let d = m.divisor(&[("u1", 1), ("u2", 1), ("u3", 1)]).unwrap();
        let trace = crate::burning::q_reduce(&d, "w1").unwrap();
        let json = trace_to_json(&trace);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["source"], "w1");
        assert_eq!(value["final"]["w1"], 3);
        assert_eq!(value["steps"].as_array().unwrap().len(), 1);
        assert!(value["steps"][0]["burntOrder"].as_array().unwrap().len() >= 1);
    }

    #[test]
    fn dot_frames_cover_all_steps() {
        let m = Model::refine(&corpus::k33(), 1).unwrap();
        let d = m.divisor(&[("u1", 1), ("u2", 1), ("u3", 1)]).unwrap();
        let trace = crate::burning::q_reduce(&d, "w1").unwrap();
        let frames = trace_to_dot_frames(&trace);
        assert_eq!(frames.len(), trace.steps.len() + 2);
        assert!(frames[0].1.contains("style=filled"));
        assert!(frames.last().unwrap().1.contains("gray80"));
    }
}
