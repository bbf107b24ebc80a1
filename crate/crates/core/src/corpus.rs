//! Built-in graph corpus.
//!
//! Each constructor documents its edge ordering, since edge indices are the
//! stable `e{i}` identifiers that lattice-point names are derived from.
//! All constructors default to unit lengths; the `*_with_lengths` variants
//! override lengths edge by edge, in the documented order.

use crate::error::{Error, Result};
use crate::graph::MetricGraph;

/// Complete bipartite graph K3,3 on parts `{u1,u2,u3}` and `{w1,w2,w3}`.
///
/// Edge order is row-major: `u1w1, u1w2, u1w3, u2w1, ..., u3w3`.
pub fn k33() -> MetricGraph {
    k33_with_lengths(&[1; 9]).unwrap()
}

pub fn k33_with_lengths(lengths: &[u32]) -> Result<MetricGraph> {
    let us = ["u1", "u2", "u3"];
    let ws = ["w1", "w2", "w3"];
    let mut edges = Vec::new();
    for u in us {
        for w in ws {
            edges.push((u, w));
        }
    }
    build("k33", &edges, lengths)
}

/// The planar genus-4 "wheel": inner triangle `i1 i2 i3`, outer triangle
/// `o1 o2 o3`, and three spokes `i_j o_j`.
///
/// Edge order: inner rim (`i1i2, i2i3, i3i1`), outer rim
/// (`o1o2, o2o3, o3o1`), spokes (`i1o1, i2o2, i3o3`). The two rims take one
/// length each; the spokes are individually settable.
pub fn wheel4(rim_inner: u32, rim_outer: u32, spoke1: u32, spoke2: u32, spoke3: u32) -> MetricGraph {
    wheel4_with_lengths(&[
        rim_inner, rim_inner, rim_inner, rim_outer, rim_outer, rim_outer, spoke1, spoke2, spoke3,
    ])
    .unwrap()
}

pub fn wheel4_with_lengths(lengths: &[u32]) -> Result<MetricGraph> {
    let edges = [
        ("i1", "i2"),
        ("i2", "i3"),
        ("i3", "i1"),
        ("o1", "o2"),
        ("o2", "o3"),
        ("o3", "o1"),
        ("i1", "o1"),
        ("i2", "o2"),
        ("i3", "o3"),
    ];
    build("wheel4", &edges, lengths)
}

/// Petersen graph: outer pentagon `p0..p4`, inner pentagram `q0..q4`
/// (`q_j q_{j+2}`), spokes `p_j q_j`.
///
/// Edge order: outer cycle, spokes, inner pentagram.
pub fn petersen() -> MetricGraph {
    petersen_with_lengths(&[1; 15]).unwrap()
}

pub fn petersen_with_lengths(lengths: &[u32]) -> Result<MetricGraph> {
    let mut edges: Vec<(String, String)> = Vec::new();
    for j in 0..5 {
        edges.push((format!("p{j}"), format!("p{}", (j + 1) % 5)));
    }
    for j in 0..5 {
        edges.push((format!("p{j}"), format!("q{j}")));
    }
    for j in 0..5 {
        edges.push((format!("q{j}"), format!("q{}", (j + 2) % 5)));
    }
    let borrowed: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    build("petersen", &borrowed, lengths)
}

/// Heawood graph on `h00..h13`: the 14-cycle plus chords `h_i h_{i+5}` for
/// even `i`.
///
/// Edge order: cycle edges `h00h01 .. h13h00`, then the seven chords in
/// increasing `i`.
pub fn heawood() -> MetricGraph {
    heawood_with_lengths(&[1; 21]).unwrap()
}

pub fn heawood_with_lengths(lengths: &[u32]) -> Result<MetricGraph> {
    let v = |i: usize| format!("h{:02}", i % 14);
    let mut edges: Vec<(String, String)> = Vec::new();
    for i in 0..14 {
        edges.push((v(i), v(i + 1)));
    }
    for i in (0..14).step_by(2) {
        edges.push((v(i), v(i + 5)));
    }
    let borrowed: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    build("heawood", &borrowed, lengths)
}

/// Pappus graph on `p00..p17`: the 18-cycle plus the nine chords of the
/// LCF word `[5,7,-7,7,-7,-5]^3`.
///
/// Edge order: cycle edges `p00p01 .. p17p00`, then chords sorted by their
/// smaller endpoint.
pub fn pappus() -> MetricGraph {
    pappus_with_lengths(&[1; 27]).unwrap()
}

pub fn pappus_with_lengths(lengths: &[u32]) -> Result<MetricGraph> {
    let v = |i: i64| format!("p{:02}", i.rem_euclid(18));
    let mut edges: Vec<(String, String)> = Vec::new();
    for i in 0..18 {
        edges.push((v(i), v(i + 1)));
    }
    let word = [5i64, 7, -7, 7, -7, -5];
    let mut chords: Vec<(i64, i64)> = Vec::new();
    for i in 0..18i64 {
        let j = (i + word[(i % 6) as usize]).rem_euclid(18);
        let pair = (i.min(j), i.max(j));
        if !chords.contains(&pair) {
            chords.push(pair);
        }
    }
    chords.sort();
    for (a, b) in chords {
        edges.push((v(a), v(b)));
    }
    let borrowed: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    build("pappus", &borrowed, lengths)
}

/// Look up a corpus graph by name. `wheel4` accepts an optional argument
/// list `wheel4(ri,ro,s1,s2,s3)`; every other name takes unit lengths.
pub fn by_name(spec: &str) -> Result<MetricGraph> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("wheel4(") {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Invalid(format!("malformed corpus name {spec:?}")))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::Invalid(
                "wheel4 takes five lengths: rim-inner, rim-outer, spoke1, spoke2, spoke3".into(),
            ));
        }
        let mut lens = [0u32; 5];
        for (slot, part) in lens.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| Error::Invalid(format!("bad length {part:?}")))?;
        }
        return Ok(wheel4(lens[0], lens[1], lens[2], lens[3], lens[4]));
    }
    match spec {
        "k33" => Ok(k33()),
        "wheel4" => Ok(wheel4(1, 1, 1, 1, 1)),
        "petersen" => Ok(petersen()),
        "heawood" => Ok(heawood()),
        "pappus" => Ok(pappus()),
        other => Err(Error::Invalid(format!(
            "unknown corpus graph {other:?} (try k33, wheel4, petersen, heawood, pappus)"
        ))),
    }
}

/// Names accepted by [`by_name`], for help text.
pub const NAMES: [&str; 5] = ["k33", "wheel4", "petersen", "heawood", "pappus"];

fn build<S: AsRef<str>>(name: &str, edges: &[(S, S)], lengths: &[u32]) -> Result<MetricGraph> {
    if lengths.len() != edges.len() {
        return Err(Error::Invalid(format!(
            "{name} needs {} edge lengths, got {}",
            edges.len(),
            lengths.len()
        )));
    }
    let list: Vec<(&str, &str, u32)> = edges
        .iter()
        .zip(lengths)
        .map(|((a, b), &len)| (a.as_ref(), b.as_ref(), len))
        .collect();
    MetricGraph::new(Some(name), &[] as &[&str], &list)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_are_right() {
        for (g, v, e) in [
            (k33(), 6, 9),
            (wheel4(1, 1, 1, 1, 1), 6, 9),
            (petersen(), 10, 15),
            (heawood(), 14, 21),
            (pappus(), 18, 27),
        ] {
            assert_eq!(g.vertex_count(), v);
            assert_eq!(g.edge_count(), e);
        }
    }

    #[test]
    fn cubic_corpus_is_cubic() {
        for g in [k33(), petersen(), heawood(), pappus()] {
            for v in 0..g.vertex_count() {
                assert_eq!(g.valence(v), 3, "{:?} vertex {}", g.name(), v);
            }
        }
    }

    #[test]
    fn by_name_parses_wheel_arguments() {
        let g = by_name("wheel4(1,1,1,2,3)").unwrap();
        assert_eq!(g.total_length(), 12);
        assert!(by_name("nosuch").is_err());
        assert!(by_name("wheel4(1,2)").is_err());
    }
}
