//! Readers for DIMACS `.col`, TSPLIB `.tsp` and plain edge lists, a graph
//! dump format, and result-record files.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Graph, TspInstance};

pub const SCHEMA_VERSION: u32 = 1;

/// The 14-city `burma14` TSPLIB instance (GEO coordinates).
pub const BURMA14_TSP: &str = include_str!("../data/burma14.tsp");

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("{what} `{tok}` is not a non-negative integer")))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("`{tok}` is not a number")))
}

/// Parses a DIMACS `.col` graph. Ids are 1-based in the file and 0-based in
/// the result. Unknown line types are skipped with a warning.
pub fn parse_dimacs_col(text: &str) -> Result<Graph> {
    let mut num_nodes: Option<usize> = None;
    let mut declared_edges = 0;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        let Some(kind) = toks.next() else { continue };
        match kind {
            "c" => {}
            "p" => {
                if num_nodes.is_some() {
                    return Err(Error::parse(line, "second problem line"));
                }
                let fmt = toks.next().ok_or_else(|| Error::parse(line, "problem line without format"))?;
                if !matches!(fmt, "edge" | "edges" | "col") {
                    log::warn!("line {line}: unusual problem format `{fmt}`");
                }
                let n = toks.next().ok_or_else(|| Error::parse(line, "problem line without node count"))?;
                let m = toks.next().ok_or_else(|| Error::parse(line, "problem line without edge count"))?;
                num_nodes = Some(parse_usize(n, line, "node count")?);
                declared_edges = parse_usize(m, line, "edge count")?;
            }
            "e" => {
                let n = num_nodes.ok_or_else(|| Error::parse(line, "edge before the problem line"))?;
                let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
                    return Err(Error::parse(line, "edge line needs two endpoints"));
                };
                let u = parse_usize(a, line, "node id")?;
                let v = parse_usize(b, line, "node id")?;
                for id in [u, v] {
                    if id == 0 || id > n {
                        return Err(Error::parse(line, format!("node id {id} outside 1..={n}")));
                    }
                }
                if u == v {
                    return Err(Error::parse(line, format!("self-loop on node {u}")));
                }
                edges.push((u - 1, v - 1));
            }
            other => log::warn!("line {line}: skipping unknown line type `{other}`"),
        }
    }
    let n = num_nodes.ok_or_else(|| Error::parse(0, "missing `p edge N M` problem line"))?;
    let g = Graph::new(n, edges)?;
    if g.num_edges() != declared_edges {
        log::info!(
            "problem line declares {declared_edges} edges, {} distinct edges read",
            g.num_edges()
        );
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeListOptions {
    /// Integer ids start at 1.
    pub one_based: bool,
    /// Relabel ids `0..k` in order of first appearance, so only nodes that
    /// occur in some non-loop edge exist. Tokens may then be arbitrary labels.
    pub compact: bool,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            one_based: false,
            compact: true,
        }
    }
}

/// Parses whitespace-separated `u v` pairs. Lines starting with `#` or `%`
/// are comments; self-loops are dropped with a warning.
pub fn parse_edge_list(text: &str, options: EdgeListOptions) -> Result<Graph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut max_id = 0usize;
    let mut loops = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') || body.starts_with('%') {
            continue;
        }
        let mut toks = body.split_whitespace();
        let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
            return Err(Error::parse(line, "expected two endpoints"));
        };
        if a == b {
            loops += 1;
            continue;
        }
        let (u, v) = if options.compact {
            let mut id = |t: &str| {
                let next = ids.len();
                *ids.entry(t.to_string()).or_insert(next)
            };
            (id(a), id(b))
        } else {
            let conv = |t: &str| -> Result<usize> {
                let x = parse_usize(t, line, "node id")?;
                if options.one_based {
                    x.checked_sub(1)
                        .ok_or_else(|| Error::parse(line, "id 0 in a 1-based edge list"))
                } else {
                    Ok(x)
                }
            };
            (conv(a)?, conv(b)?)
        };
        max_id = max_id.max(u).max(v);
        if u == v {
            loops += 1;
            continue;
        }
        edges.push((u, v));
    }
    if loops > 0 {
        log::warn!("dropped {loops} self-loops");
    }
    if edges.is_empty() {
        return Err(Error::InvalidInstance("edge list contains no edges".into()));
    }
    let n = if options.compact { ids.len() } else { max_id + 1 };
    Graph::new(n, edges)
}

/// Writes a graph as DIMACS `.col` text with optional `c` comment lines.
pub fn write_dimacs_col(graph: &Graph, comments: &[&str]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("c {c}\n"));
    }
    out.push_str(&format!("p edge {} {}\n", graph.num_nodes(), graph.num_edges()));
    for &(u, v) in graph.edges() {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}

/// Writes the internal graph dump: `graph N M` then `u v w` per edge.
pub fn write_graph_dump(graph: &Graph) -> String {
    let mut out = format!("graph {} {}\n", graph.num_nodes(), graph.num_edges());
    for (u, v, w) in graph.weighted_edges() {
        out.push_str(&format!("{u} {v} {w:?}\n"));
    }
    out
}

pub fn parse_graph_dump(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty graph dump"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 || h[0] != "graph" {
        return Err(Error::parse(1, "expected `graph N M` header"));
    }
    let n = parse_usize(h[1], 1, "node count")?;
    let m = parse_usize(h[2], 1, "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for (idx, l) in lines {
        let line = idx + 1;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 3 {
            return Err(Error::parse(line, "expected `u v w`"));
        }
        edges.push((
            parse_usize(t[0], line, "node id")?,
            parse_usize(t[1], line, "node id")?,
            parse_f64(t[2], line)?,
        ));
    }
    if edges.len() != m {
        return Err(Error::parse(0, format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::with_weights(n, edges)
}

/// TSPLIB geographic distance between two `DDD.MM` coordinate pairs
/// `(latitude, longitude)`.
pub fn geo_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    // The format fixes this truncated value; the exact constant shifts some distances.
    #[allow(clippy::approx_constant)]
    const PI: f64 = 3.141592;
    const RRR: f64 = 6378.388;
    let rad = |x: f64| {
        let deg = x.trunc();
        let min = x - deg;
        PI * (deg + 5.0 * min / 3.0) / 180.0
    };
    let (lat_a, lon_a) = (rad(a.0), rad(a.1));
    let (lat_b, lon_b) = (rad(b.0), rad(b.1));
    let q1 = (lon_a - lon_b).cos();
    let q2 = (lat_a - lat_b).cos();
    let q3 = (lat_a + lat_b).cos();
    (RRR * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0).trunc()
}

/// TSPLIB `EUC_2D`: Euclidean distance rounded to the nearest integer.
pub fn euc2d_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt().round()
}

/// Parses a TSPLIB file with `EDGE_WEIGHT_TYPE` `GEO`, `EUC_2D` or
/// `EXPLICIT` (`FULL_MATRIX`, `LOWER_DIAG_ROW`, `UPPER_ROW`).
pub fn parse_tsplib(text: &str) -> Result<TspInstance> {
    let mut name = String::from("tsp");
    let mut dim: Option<usize> = None;
    let mut weight_type = String::new();
    let mut weight_format = String::new();
    let mut coords: Vec<(f64, f64)> = Vec::new();
    let mut numbers: Vec<f64> = Vec::new();
    #[derive(PartialEq)]
    enum Section {
        Header,
        Coords,
        Weights,
        Skip,
    }
    let mut section = Section::Header;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() {
            continue;
        }
        if body == "EOF" {
            break;
        }
        let upper = body.to_ascii_uppercase();
        if upper.ends_with("_SECTION") {
            section = match upper.as_str() {
                "NODE_COORD_SECTION" => Section::Coords,
                "EDGE_WEIGHT_SECTION" => Section::Weights,
                _ => Section::Skip,
            };
            continue;
        }
        if let Some((key, value)) = body.split_once(':') {
            if !key.trim().chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-') {
                let value = value.trim();
                match key.trim().to_ascii_uppercase().as_str() {
                    "NAME" => name = value.to_string(),
                    "DIMENSION" => dim = Some(parse_usize(value, line, "dimension")?),
                    "EDGE_WEIGHT_TYPE" => weight_type = value.to_ascii_uppercase(),
                    "EDGE_WEIGHT_FORMAT" => weight_format = value.to_ascii_uppercase(),
                    "TYPE" if !value.eq_ignore_ascii_case("TSP") => {
                        return Err(Error::parse(line, format!("unsupported problem type {value}")))
                    }
                    _ => {}
                }
                section = Section::Header;
                continue;
            }
        }
        match section {
            Section::Coords => {
                let t: Vec<&str> = body.split_whitespace().collect();
                if t.len() < 3 {
                    return Err(Error::parse(line, "coordinate line needs `id x y`"));
                }
                coords.push((parse_f64(t[1], line)?, parse_f64(t[2], line)?));
            }
            Section::Weights => {
                for t in body.split_whitespace() {
                    numbers.push(parse_f64(t, line)?);
                }
            }
            Section::Skip => {}
            Section::Header => return Err(Error::parse(line, format!("unexpected line `{body}`"))),
        }
    }
    let n = dim.ok_or_else(|| Error::parse(0, "missing DIMENSION"))?;
    let mut d = vec![vec![0.0; n]; n];
    match weight_type.as_str() {
        "GEO" | "EUC_2D" => {
            if coords.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "DIMENSION is {n} but {} coordinates were given",
                    coords.len()
                )));
            }
            let f = if weight_type == "GEO" { geo_distance } else { euc2d_distance };
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        d[i][j] = f(coords[i], coords[j]);
                    }
                }
            }
        }
        "EXPLICIT" => {
            let expected = match weight_format.as_str() {
                "FULL_MATRIX" => n * n,
                "LOWER_DIAG_ROW" => n * (n + 1) / 2,
                "UPPER_ROW" => n * (n - 1) / 2,
                other => {
                    return Err(Error::InvalidInstance(format!(
                        "unsupported EDGE_WEIGHT_FORMAT `{other}`"
                    )))
                }
            };
            if numbers.len() != expected {
                return Err(Error::InvalidInstance(format!(
                    "{weight_format} with DIMENSION {n} needs {expected} weights, found {}",
                    numbers.len()
                )));
            }
            let mut it = numbers.into_iter();
            match weight_format.as_str() {
                "FULL_MATRIX" => {
                    for row in d.iter_mut() {
                        for x in row.iter_mut() {
                            *x = it.next().unwrap();
                        }
                    }
                }
                "LOWER_DIAG_ROW" => {
                    for i in 0..n {
                        for j in 0..=i {
                            let x = it.next().unwrap();
                            d[i][j] = x;
                            d[j][i] = x;
                        }
                    }
                }
                _ => {
                    for i in 0..n {
                        for j in i + 1..n {
                            let x = it.next().unwrap();
                            d[i][j] = x;
                            d[j][i] = x;
                        }
                    }
                }
            }
        }
        "" => return Err(Error::parse(0, "missing EDGE_WEIGHT_TYPE")),
        other => {
            return Err(Error::InvalidInstance(format!(
                "unsupported EDGE_WEIGHT_TYPE `{other}`"
            )))
        }
    }
    TspInstance::from_distances(name, &d)
}

/// One solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub instance: String,
    pub method: String,
    pub run_id: usize,
    pub seed: u64,
    pub sweeps: usize,
    pub best_energy: f64,
    pub wrong_edges: usize,
    pub error_rate: f64,
    pub wall_time: f64,
    /// Tour optimality gap, for TSP runs.
    pub gap: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ResultFile {
    schema_version: u32,
    records: Vec<ResultRecord>,
}

fn ser<E: std::fmt::Display>(e: E) -> Error {
    Error::Serialization(e.to_string())
}

pub fn results_to_csv(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(ser)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(ser)?).map_err(ser)?;
    Ok(format!("# schema_version={SCHEMA_VERSION}\n{body}"))
}

pub fn results_from_csv(text: &str) -> Result<Vec<ResultRecord>> {
    let (first, body) = text.split_once('\n').unwrap_or((text, ""));
    let version = first
        .strip_prefix("# schema_version=")
        .ok_or_else(|| Error::parse(1, "missing schema_version header"))?;
    if version.trim() != SCHEMA_VERSION.to_string() {
        return Err(Error::parse(1, format!("unsupported schema version {version}")));
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    r.deserialize().map(|x| x.map_err(ser)).collect()
}

pub fn results_to_json(records: &[ResultRecord]) -> Result<String> {
    serde_json::to_string_pretty(&ResultFile {
        schema_version: SCHEMA_VERSION,
        records: records.to_vec(),
    })
    .map_err(ser)
}

pub fn results_from_json(text: &str) -> Result<Vec<ResultRecord>> {
    let f: ResultFile = serde_json::from_str(text).map_err(ser)?;
    if f.schema_version != SCHEMA_VERSION {
        return Err(Error::Serialization(format!(
            "unsupported schema version {}",
            f.schema_version
        )));
    }
    Ok(f.records)
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`; returns both paths.
pub fn write_results(records: &[ResultRecord], dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to write".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_text(&csv_path, &results_to_csv(records)?)?;
    write_text(&json_path, &results_to_json(records)?)?;
    Ok((csv_path, json_path))
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRecord>> {
    let text = read_text(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        results_from_json(&text)
    } else {
        results_from_csv(&text)
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a graph by extension: `.col` as DIMACS, `.graph` as a dump, anything
/// else as an edge list with default options.
pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = read_text(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("col") => parse_dimacs_col(&text),
        Some("graph") => parse_graph_dump(&text),
        _ => parse_edge_list(&text, EdgeListOptions::default()),
    }
}

pub fn read_tsp(path: &Path) -> Result<TspInstance> {
    parse_tsplib(&read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dimacs_basic() {
        let text = "c sample\np edge 4 4\ne 1 2\ne 2 3\ne 3 2\ne 4 1\nn 1 5\n";
        let g = parse_dimacs_col(text).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (4, 3));
        assert_eq!(g.edges()[2], (0, 3));
    }

    #[test]
    fn dimacs_errors_carry_lines() {
        let err = parse_dimacs_col("p edge 3 1\ne 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_dimacs_col("p edge 3 1\ne 1 4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_dimacs_col("p edge 3 1\ne 1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_dimacs_col("e 1 2\n").is_err());
        assert!(parse_dimacs_col("c only\n").is_err());
    }

    #[test]
    fn edge_list_modes() {
        let text = "# comment\n10 20\n20 30\n30 10\n20 10\n7 7\n";
        let g = parse_edge_list(text, EdgeListOptions::default()).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (3, 3));
        let g = parse_edge_list("1 2\n2 3\n", EdgeListOptions { one_based: true, compact: false }).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (3, 2));
        let g = parse_edge_list("0 5\n", EdgeListOptions { one_based: false, compact: false }).unwrap();
        assert_eq!(g.num_nodes(), 6);
        let g = parse_edge_list("paperA paperB\npaperB paperC\n", EdgeListOptions::default()).unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert!(parse_edge_list("", EdgeListOptions::default()).is_err());
        let err = parse_edge_list("1 2\n3\n", EdgeListOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn tsplib_explicit_formats() {
        let full = "NAME: t3\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 2 4\n2 0 3\n4 3 0\nEOF\n";
        let t = parse_tsplib(full).unwrap();
        assert_eq!(t.num_cities(), 3);
        assert_eq!(t.max_weight(), 1.0);
        assert_eq!(t.weight(1, 2), 0.75);
        assert_eq!(t.raw_distance(0, 2), 4.0);
        let lower = "NAME: t3\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: LOWER_DIAG_ROW\nEDGE_WEIGHT_SECTION\n0\n2 0\n4 3 0\nEOF\n";
        assert_eq!(parse_tsplib(lower).unwrap().normalized_matrix(), t.normalized_matrix());
        let bad = full.replace("DIMENSION: 3", "DIMENSION: 4");
        assert!(parse_tsplib(&bad).is_err());
        let att = full.replace("EXPLICIT", "ATT");
        assert!(matches!(parse_tsplib(&att), Err(Error::InvalidInstance(m)) if m.contains("ATT")));
    }

    #[test]
    fn results_roundtrip() {
        let recs: Vec<ResultRecord> = (0..3)
            .map(|i| ResultRecord {
                instance: "myciel3".into(),
                method: "vectorized-gibbs".into(),
                run_id: i,
                seed: 100 + i as u64,
                sweeps: 1000,
                best_energy: i as f64,
                wrong_edges: i,
                error_rate: i as f64 / 20.0,
                wall_time: 0.01,
                gap: if i == 1 { Some(0.5) } else { None },
            })
            .collect();
        let csv = results_to_csv(&recs).unwrap();
        assert!(csv.starts_with("# schema_version=1\ninstance,method,run_id"));
        assert_eq!(results_from_csv(&csv).unwrap(), recs);
        let json = results_to_json(&recs).unwrap();
        assert!(json.contains("\"schema_version\": 1"));
        assert_eq!(results_from_json(&json).unwrap(), recs);
        let dir = tempfile::tempdir().unwrap();
        let (c, j) = write_results(&recs, dir.path(), "r").unwrap();
        assert_eq!(read_results(&c).unwrap(), recs);
        assert_eq!(read_results(&j).unwrap(), recs);
        assert!(write_results(&[], dir.path(), "e").is_err());
    }

    proptest! {
        #[test]
        fn graph_dump_roundtrip(n in 2usize..30, raw in proptest::collection::vec((0usize..30, 0usize..30, 1u32..100), 0..60)) {
            let edges: Vec<_> = raw
                .into_iter()
                .map(|(u, v, w)| (u % n, v % n, w as f64 / 7.0))
                .filter(|(u, v, _)| u != v)
                .collect();
            let g = Graph::with_weights(n, edges).unwrap();
            prop_assert_eq!(parse_graph_dump(&write_graph_dump(&g)).unwrap(), g);
        }

        #[test]
        fn dimacs_roundtrip(n in 2usize..30, raw in proptest::collection::vec((0usize..30, 0usize..30), 0..60)) {
            let edges: Vec<_> = raw.into_iter().map(|(u, v)| (u % n, v % n)).filter(|(u, v)| u != v).collect();
            let g = Graph::new(n, edges).unwrap();
            prop_assert_eq!(parse_dimacs_col(&write_dimacs_col(&g, &["roundtrip"])).unwrap(), g);
        }
    }
}
