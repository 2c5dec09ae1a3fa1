//! Pajek `.net` / `.clu` reading and writing, and edge-list CSV export.
//!
//! Only undirected networks are supported. Vertices are numbered `1..=n` in
//! ascending order of node id (left side first for two-mode networks), and
//! the node id is written as the vertex label, so a write → read → write
//! cycle reproduces the file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{BipartiteGraph, Node, NodeAttrs, Partition, WeightedGraph};

/// A network read from a `.net` file.
#[derive(Debug, Clone, PartialEq)]
pub enum PajekNetwork {
    OneMode(WeightedGraph),
    TwoMode(BipartiteGraph),
}

fn sorted_by_id(nodes: &[Node]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].id.cmp(&nodes[b].id));
    order
}

/// Node indices of `g` in `.net` vertex order.
pub fn vertex_order(g: &WeightedGraph) -> Vec<usize> {
    sorted_by_id(g.nodes())
}

fn label(id: &str) -> Result<String> {
    if id.contains('"') || id.contains('\n') || id.contains('\r') {
        return Err(Error::InvalidArgument(format!(
            "node id `{id}` cannot be written as a Pajek label"
        )));
    }
    Ok(format!("\"{id}\""))
}

fn write_edges(out: &mut String, mut edges: Vec<(usize, usize, f64)>) {
    edges.sort_by_key(|e| (e.0, e.1));
    out.push_str("*Edges\n");
    for (u, v, w) in edges {
        let _ = writeln!(out, "{u} {v} {w}");
    }
}

/// `.net` text of a one-mode network.
pub fn net_string(g: &WeightedGraph) -> Result<String> {
    let order = vertex_order(g);
    let mut number = vec![0usize; g.node_count()];
    let mut out = String::new();
    let _ = writeln!(out, "*Vertices {}", g.node_count());
    for (k, &i) in order.iter().enumerate() {
        number[i] = k + 1;
        let _ = writeln!(out, "{} {}", k + 1, label(&g.node(i).id)?);
    }
    let edges = g
        .edges()
        .map(|e| {
            let (a, b) = (number[e.u], number[e.v]);
            (a.min(b), a.max(b), e.weight)
        })
        .collect();
    write_edges(&mut out, edges);
    Ok(out)
}

/// `.net` text of a two-mode network, with the `*Vertices n n_left` header.
pub fn bipartite_net_string(b: &BipartiteGraph) -> Result<String> {
    let left = sorted_by_id(b.left());
    let right = sorted_by_id(b.right());
    let nl = left.len();
    let mut lnum = vec![0usize; nl];
    let mut rnum = vec![0usize; right.len()];
    let mut out = String::new();
    let _ = writeln!(out, "*Vertices {} {}", nl + right.len(), nl);
    for (k, &i) in left.iter().enumerate() {
        lnum[i] = k + 1;
        let _ = writeln!(out, "{} {}", k + 1, label(&b.left()[i].id)?);
    }
    for (k, &i) in right.iter().enumerate() {
        rnum[i] = nl + k + 1;
        let _ = writeln!(out, "{} {}", nl + k + 1, label(&b.right()[i].id)?);
    }
    let edges = b
        .edges()
        .map(|e| (lnum[e.u], rnum[e.v], e.weight))
        .collect();
    write_edges(&mut out, edges);
    Ok(out)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_net(g: &WeightedGraph, path: &Path) -> Result<()> {
    write_file(path, &net_string(g)?)
}

pub fn write_bipartite_net(b: &BipartiteGraph, path: &Path) -> Result<()> {
    write_file(path, &bipartite_net_string(b)?)
}

/// Lines that carry content, with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn keyword(line: &str) -> String {
    line.split_whitespace()
        .next()
        .unwrap_or("")
        .to_ascii_lowercase()
}

/// Splits a vertex line into its number and label; the label is either a
/// quoted string or the next whitespace-delimited token.
fn vertex_line(line: &str) -> Option<(&str, Option<&str>)> {
    let line = line.trim_start();
    let end = line.find(char::is_whitespace).unwrap_or(line.len());
    let (num, rest) = line.split_at(end);
    let rest = rest.trim_start();
    if rest.is_empty() {
        return Some((num, None));
    }
    if let Some(body) = rest.strip_prefix('"') {
        let close = body.find('"')?;
        return Some((num, Some(&body[..close])));
    }
    Some((num, rest.split_whitespace().next()))
}

#[derive(PartialEq)]
enum Section {
    None,
    Vertices,
    Edges,
}

/// Parses `.net` text. `source` only labels error messages.
pub fn parse_net(text: &str, source: &Path) -> Result<PajekNetwork> {
    let err = |line: usize, msg: String| Error::parse(source, line, msg);
    let mut section = Section::None;
    let mut n = 0usize;
    let mut n_left: Option<usize> = None;
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut edges: Vec<(usize, usize, usize, f64)> = Vec::new();
    let mut seen_vertices = false;

    for (ln, line) in content_lines(text) {
        if line.starts_with('*') {
            let kw = keyword(line);
            match kw.as_str() {
                "*vertices" => {
                    if seen_vertices {
                        return Err(err(ln, "second *Vertices section".into()));
                    }
                    seen_vertices = true;
                    let nums: Vec<&str> = line.split_whitespace().skip(1).collect();
                    let parse = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|_| err(ln, format!("invalid vertex count `{s}`")))
                    };
                    match nums.as_slice() {
                        [a] => n = parse(a)?,
                        [a, b] => {
                            n = parse(a)?;
                            let l = parse(b)?;
                            if l > n {
                                return Err(err(ln, format!("{l} left vertices exceed {n}")));
                            }
                            n_left = Some(l);
                        }
                        _ => return Err(err(ln, "expected `*Vertices n [n_left]`".into())),
                    }
                    labels = vec![None; n];
                    section = Section::Vertices;
                }
                "*edges" => {
                    if !seen_vertices {
                        return Err(err(ln, "*Edges before *Vertices".into()));
                    }
                    section = Section::Edges;
                }
                "*arcs" | "*arcslist" => {
                    return Err(Error::DirectedUnsupported {
                        line: ln,
                        section: line.to_string(),
                    })
                }
                "*matrix" => return Err(err(ln, "*Matrix sections are not supported".into())),
                "*edgeslist" => {
                    return Err(err(ln, "*Edgeslist sections are not supported".into()))
                }
                _ => return Err(err(ln, format!("unknown section `{line}`"))),
            }
            continue;
        }
        match section {
            Section::None => return Err(err(ln, "content before *Vertices".into())),
            Section::Vertices => {
                let (num, lab) =
                    vertex_line(line).ok_or_else(|| err(ln, "unterminated label".into()))?;
                let i = num
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1 && i <= n)
                    .ok_or_else(|| err(ln, format!("malformed vertex index `{num}`")))?;
                if labels[i - 1].is_some() {
                    return Err(err(ln, format!("vertex {i} listed twice")));
                }
                labels[i - 1] = Some(lab.unwrap_or(num).to_string());
            }
            Section::Edges => {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() < 2 {
                    return Err(err(ln, "expected `u v [weight]`".into()));
                }
                let idx = |s: &str| {
                    s.parse::<usize>()
                        .ok()
                        .filter(|&i| i >= 1 && i <= n)
                        .ok_or_else(|| err(ln, format!("malformed vertex index `{s}`")))
                };
                let (u, v) = (idx(f[0])?, idx(f[1])?);
                let w = match f.get(2) {
                    None => 1.0,
                    Some(s) => s
                        .parse::<f64>()
                        .map_err(|_| err(ln, format!("invalid weight `{s}`")))?,
                };
                edges.push((ln, u, v, w));
            }
        }
    }
    if !seen_vertices {
        return Err(err(1, "missing *Vertices section".into()));
    }
    let labels: Vec<String> = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.unwrap_or_else(|| (i + 1).to_string()))
        .collect();
    let at = |ln: usize| move |e: Error| err(ln, e.to_string());

    match n_left {
        None => {
            let mut g = WeightedGraph::new();
            for l in &labels {
                g.add_node(l, l, NodeAttrs::default()).map_err(at(0))?;
            }
            for (ln, u, v, w) in edges {
                g.add_edge_idx(u - 1, v - 1, w).map_err(at(ln))?;
            }
            Ok(PajekNetwork::OneMode(g))
        }
        Some(nl) => {
            let mut b = BipartiteGraph::new();
            for l in &labels[..nl] {
                b.add_left(l, l, NodeAttrs::default()).map_err(at(0))?;
            }
            for l in &labels[nl..] {
                b.add_right(l, l, NodeAttrs::default()).map_err(at(0))?;
            }
            for (ln, u, v, w) in edges {
                let (l, r) = if u <= nl && v > nl {
                    (u, v)
                } else if v <= nl && u > nl {
                    (v, u)
                } else {
                    return Err(err(ln, format!("edge {u} {v} does not join the two modes")));
                };
                b.add_edge_idx(l - 1, r - nl - 1, w).map_err(at(ln))?;
            }
            Ok(PajekNetwork::TwoMode(b))
        }
    }
}

pub fn read_net(path: &Path) -> Result<PajekNetwork> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("vec"))
    {
        return Err(Error::InvalidArgument(format!(
            "{}: Pajek vector files are not supported",
            path.display()
        )));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_net(&text, path)
}

/// `p` (indexed like `g`) reordered to `.net` vertex order.
pub fn partition_in_net_order(g: &WeightedGraph, p: &Partition) -> Result<Partition> {
    if p.len() != g.node_count() {
        return Err(Error::InvalidArgument(format!(
            "partition of {} entries for {} nodes",
            p.len(),
            g.node_count()
        )));
    }
    Ok(Partition::new(
        vertex_order(g)
            .into_iter()
            .map(|i| p.assignment[i])
            .collect(),
    ))
}

pub fn clu_string(p: &Partition) -> String {
    let mut out = format!("*Vertices {}\n", p.len());
    for c in &p.assignment {
        let _ = writeln!(out, "{c}");
    }
    out
}

/// Writes `p` for a network with `vertices` vertices.
pub fn write_clu(p: &Partition, vertices: usize, path: &Path) -> Result<()> {
    if p.len() != vertices {
        return Err(Error::InvalidArgument(format!(
            "partition of {} entries for {vertices} vertices",
            p.len()
        )));
    }
    write_file(path, &clu_string(p))
}

pub fn parse_clu(text: &str, source: &Path) -> Result<Partition> {
    let err = |line: usize, msg: String| Error::parse(source, line, msg);
    let mut lines = content_lines(text);
    let (ln, head) = lines
        .next()
        .ok_or_else(|| err(1, "missing *Vertices header".into()))?;
    let n = match head.split_whitespace().collect::<Vec<_>>().as_slice() {
        [kw, n] if kw.eq_ignore_ascii_case("*vertices") => n
            .parse::<usize>()
            .map_err(|_| err(ln, format!("invalid vertex count `{n}`")))?,
        _ => return Err(err(ln, "expected `*Vertices n`".into())),
    };
    let mut assignment = Vec::with_capacity(n);
    for (ln, line) in lines {
        let c = line
            .parse::<u32>()
            .map_err(|_| err(ln, format!("invalid cluster `{line}`")))?;
        assignment.push(c);
    }
    if assignment.len() != n {
        return Err(err(
            ln,
            format!("header announces {n} vertices, found {}", assignment.len()),
        ));
    }
    Ok(Partition::new(assignment))
}

pub fn read_clu(path: &Path) -> Result<Partition> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_clu(&text, path)
}

/// `source,target,weight` rows with `source < target` by id, sorted.
pub fn edge_list_csv(g: &WeightedGraph) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Validation(e.to_string());
    w.write_record(["source", "target", "weight"]).map_err(io)?;
    for (a, b, wt) in g.canonical_edges() {
        w.write_record([a, b, wt.to_string()]).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Validation(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_edge_list_csv(g: &WeightedGraph, path: &Path) -> Result<()> {
    write_file(path, &edge_list_csv(g)?)
}
