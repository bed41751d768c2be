//! Regular graphs, multigraphs, BFS distances and balls.
//!
//! Vertices are `0..n`. A distance of `None` means the two vertices lie in
//! different components (infinite distance).

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unordered edge stored with `lo < hi` (or `lo == hi` for a loop in a multigraph).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub lo: usize,
    pub hi: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Edge { lo: a, hi: b }
        } else {
            Edge { lo: b, hi: a }
        }
    }

    pub fn endpoints(&self) -> [usize; 2] {
        [self.lo, self.hi]
    }

    pub fn is_loop(&self) -> bool {
        self.lo == self.hi
    }
}

/// Anything BFS can walk. Neighbor lists may repeat a vertex (parallel
/// edges) and a loop at `v` lists `v` twice.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;
    fn neighbors(&self, v: usize) -> &[usize];
}

/// A simple `d`-regular graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl RegularGraph {
    /// Validates simplicity and regularity. Requires `n >= d >= 3`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("parallel edge at vertex {v}")));
            }
        }
        let d = adj.first().map_or(0, Vec::len);
        if let Some((v, list)) = adj.iter().enumerate().find(|(_, l)| l.len() != d) {
            return Err(Error::InvalidGraph(format!(
                "not regular: vertex 0 has degree {d} but vertex {v} has degree {}",
                list.len()
            )));
        }
        if d < 3 || n < d {
            return Err(Error::InvalidGraph(format!("need n >= d >= 3, got n = {n}, d = {d}")));
        }
        Ok(Self::from_sorted_adjacency(n, d, adj))
    }

    fn from_sorted_adjacency(n: usize, d: usize, adj: Vec<Vec<usize>>) -> Self {
        let mut edges = Vec::with_capacity(n * d / 2);
        for (v, list) in adj.iter().enumerate() {
            for &w in list {
                if v < w {
                    edges.push(Edge::new(v, w));
                }
            }
        }
        RegularGraph { n, d, adj, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// Canonical edges, sorted.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.adj[a].binary_search(&b).is_ok()
    }

    /// Bitmask of neighbors per vertex; only for `n <= 64`.
    pub fn neighbor_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64);
        self.adj.iter().map(|l| l.iter().fold(0u64, |m, &w| m | (1u64 << w))).collect()
    }

    /// The same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: perm.len() });
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (perm[e.lo], perm[e.hi])).collect();
        Self::from_edges(self.n, &edges)
    }

    pub fn is_connected(&self) -> bool {
        bfs_distances(self, &[0]).iter().all(Option::is_some)
    }

    /// Largest finite distance; `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut diam = 0;
        for v in 0..self.n {
            for dv in bfs_distances(self, &[v]) {
                diam = diam.max(dv?);
            }
        }
        Some(diam)
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        check_vertex(self.n, v)
    }
}

impl Adjacency for RegularGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }
}

/// Multigraph produced by collapsing a pairing; loops and parallel edges allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl MultiGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut list = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for v in [a, b] {
                check_vertex(n, v)?;
            }
            adj[a].push(b);
            adj[b].push(a);
            list.push(Edge::new(a, b));
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
        }
        list.sort_unstable();
        Ok(MultiGraph { n, adj, edges: list })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges with multiplicity, sorted.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|e| !e.is_loop()) && self.edges.windows(2).all(|w| w[0] != w[1])
    }

    /// The simple regular graph this multigraph represents, if it is one.
    pub fn to_regular(&self) -> Result<RegularGraph> {
        if !self.is_simple() {
            return Err(Error::InvalidGraph("multigraph has loops or parallel edges".into()));
        }
        let pairs: Vec<_> = self.edges.iter().map(|e| (e.lo, e.hi)).collect();
        RegularGraph::from_edges(self.n, &pairs)
    }
}

impl Adjacency for MultiGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }
}

fn check_vertex(n: usize, v: usize) -> Result<()> {
    if v < n {
        Ok(())
    } else {
        Err(Error::VertexOutOfRange { vertex: v, n })
    }
}

/// Multi-source BFS. Entry `v` is `dist(v, sources)`, or `None` if unreachable.
pub fn bfs_distances<G: Adjacency + ?Sized>(g: &G, sources: &[usize]) -> Vec<Option<usize>> {
    let n = g.vertex_count();
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap() + 1;
        for &w in g.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(dv);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// BFS truncated at radius `radius`; vertices farther away stay `None`.
pub fn bfs_within<G: Adjacency + ?Sized>(g: &G, sources: &[usize], radius: usize) -> Vec<Option<usize>> {
    let n = g.vertex_count();
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap();
        if dv == radius {
            continue;
        }
        for &w in g.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn dist<G: Adjacency + ?Sized>(g: &G, v: usize, w: usize) -> Result<Option<usize>> {
    let n = g.vertex_count();
    check_vertex(n, v)?;
    check_vertex(n, w)?;
    Ok(bfs_distances(g, &[v])[w])
}

pub fn dist_set<G: Adjacency + ?Sized>(g: &G, v: usize, s: &[usize]) -> Result<Option<usize>> {
    let n = g.vertex_count();
    check_vertex(n, v)?;
    if s.is_empty() {
        return Err(Error::EmptySet("target set"));
    }
    for &w in s {
        check_vertex(n, w)?;
    }
    Ok(bfs_distances(g, s)[v])
}

pub fn dist_edge<G: Adjacency + ?Sized>(g: &G, v: usize, e: Edge) -> Result<Option<usize>> {
    dist_set(g, v, &e.endpoints())
}

/// `min(dv[lo], dv[hi])` from a precomputed distance vector.
pub fn edge_distance(dist_from: &[Option<usize>], e: Edge) -> Option<usize> {
    match (dist_from[e.lo], dist_from[e.hi]) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// `{v : dist(v, s) <= radius}`, sorted. Empty for empty `s` or negative radius.
pub fn ball<G: Adjacency + ?Sized>(g: &G, s: &[usize], radius: i64) -> Result<Vec<usize>> {
    let n = g.vertex_count();
    for &w in s {
        check_vertex(n, w)?;
    }
    if s.is_empty() || radius < 0 {
        return Ok(Vec::new());
    }
    let dist = bfs_within(g, s, radius as usize);
    Ok((0..n).filter(|&v| dist[v].is_some()).collect())
}

/// `ball(s, radius) \ ball(s, radius - 1)`, sorted.
pub fn boundary<G: Adjacency + ?Sized>(g: &G, s: &[usize], radius: i64) -> Result<Vec<usize>> {
    let n = g.vertex_count();
    for &w in s {
        check_vertex(n, w)?;
    }
    if s.is_empty() || radius < 0 {
        return Ok(Vec::new());
    }
    let dist = bfs_within(g, s, radius as usize);
    Ok((0..n).filter(|&v| dist[v] == Some(radius as usize)).collect())
}

/// Sizes `|ball(s, r)|` for `r = 0..=max_radius`, from one BFS.
pub fn ball_profile<G: Adjacency + ?Sized>(g: &G, s: &[usize], max_radius: usize) -> Vec<usize> {
    let dist = bfs_within(g, s, max_radius);
    let mut counts = vec![0usize; max_radius + 1];
    for d in dist.into_iter().flatten() {
        counts[d] += 1;
    }
    let mut acc = 0;
    counts
        .into_iter()
        .map(|c| {
            acc += c;
            acc
        })
        .collect()
}

/// `1 + d((d-1)^r - 1)/(d-2)`: the size of a radius-`r` ball in the `d`-regular tree.
pub fn tree_ball_size(d: usize, r: usize) -> f64 {
    let d = d as f64;
    1.0 + d * ((d - 1.0).powi(r as i32) - 1.0) / (d - 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Indexing {
    ZeroBased,
    OneBased,
}

impl Indexing {
    fn offset(self) -> usize {
        match self {
            Indexing::ZeroBased => 0,
            Indexing::OneBased => 1,
        }
    }
}

/// Parses `u v` lines. `#` starts a comment; blank lines are skipped. An
/// optional header `p n d` before the first edge fixes `n` and the expected
/// degree; without it `n` is one more than the largest vertex index.
pub fn parse_edge_list(text: &str, indexing: Indexing) -> Result<RegularGraph> {
    let off = indexing.offset();
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks: Vec<&str> = line.split_whitespace().collect();
        let is_header = toks[0] == "p";
        if is_header {
            toks.remove(0);
        }
        if toks.len() != 2 {
            return Err(Error::Parse { line: line_no, msg: format!("expected two integers, found {:?}", line) });
        }
        let parse = |t: &str| {
            t.parse::<usize>()
                .map_err(|e| Error::Parse { line: line_no, msg: format!("bad integer {t:?}: {e}") })
        };
        let (a, b) = (parse(toks[0])?, parse(toks[1])?);
        if is_header {
            if header.is_some() || !edges.is_empty() {
                return Err(Error::Parse { line: line_no, msg: "header must precede all edges".into() });
            }
            header = Some((a, b, line_no));
            continue;
        }
        if a < off || b < off {
            return Err(Error::Parse { line: line_no, msg: format!("index below {off} in a {off}-based list") });
        }
        edges.push((a - off, b - off, line_no));
    }
    let n = match header {
        Some((n, _, _)) => n,
        None => edges.iter().map(|&(a, b, _)| a.max(b) + 1).max().unwrap_or(0),
    };
    let mut seen = std::collections::HashMap::new();
    let mut degree = vec![0usize; n];
    for &(a, b, line) in &edges {
        if a >= n || b >= n {
            return Err(Error::Parse { line, msg: format!("vertex index out of range for n = {n}") });
        }
        if a == b {
            return Err(Error::Parse { line, msg: format!("self-loop at vertex {}", a + off) });
        }
        if let Some(prev) = seen.insert(Edge::new(a, b), line) {
            return Err(Error::Parse { line, msg: format!("duplicate edge (first seen on line {prev})") });
        }
        degree[a] += 1;
        degree[b] += 1;
    }
    if let Some((_, d, line)) = header {
        if let Some(v) = (0..n).find(|&v| degree[v] != d) {
            return Err(Error::Parse {
                line,
                msg: format!("header declares degree {d} but vertex {} has degree {}", v + off, degree[v]),
            });
        }
    }
    let pairs: Vec<_> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
    RegularGraph::from_edges(n, &pairs)
}

/// Canonical edge list: header line `p n d`, then edges in sorted order.
pub fn write_edge_list(g: &RegularGraph, indexing: Indexing) -> String {
    let off = indexing.offset();
    let mut out = String::new();
    writeln!(out, "p {} {}", g.n(), g.d()).unwrap();
    for e in g.edges() {
        writeln!(out, "{} {}", e.lo + off, e.hi + off).unwrap();
    }
    out
}

/// A few small named graphs used across tests, examples and the CLI.
pub mod named {
    use super::RegularGraph;

    pub fn complete(n: usize) -> RegularGraph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        RegularGraph::from_edges(n, &edges).expect("complete graph")
    }

    pub fn petersen() -> RegularGraph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        RegularGraph::from_edges(10, &edges).expect("petersen")
    }

    pub fn complete_bipartite(m: usize) -> RegularGraph {
        let mut edges = Vec::new();
        for a in 0..m {
            for b in 0..m {
                edges.push((a, m + b));
            }
        }
        RegularGraph::from_edges(2 * m, &edges).expect("complete bipartite")
    }

    /// Disjoint union of `copies` copies of `g`.
    pub fn disjoint_copies(g: &RegularGraph, copies: usize) -> RegularGraph {
        let n = g.n();
        let mut edges = Vec::new();
        for c in 0..copies {
            for e in g.edges() {
                edges.push((c * n + e.lo, c * n + e.hi));
            }
        }
        RegularGraph::from_edges(n * copies, &edges).expect("disjoint union")
    }

    /// Circulant graph on `n` vertices with the given offsets (each offset `< n/2`).
    pub fn circulant(n: usize, offsets: &[usize]) -> RegularGraph {
        let mut edges = Vec::new();
        for v in 0..n {
            for &o in offsets {
                edges.push((v, (v + o) % n));
            }
        }
        RegularGraph::from_edges(n, &edges).expect("circulant")
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distances_on_k4() {
        let k4 = complete(4);
        assert_eq!(dist(&k4, 0, 0).unwrap(), Some(0));
        assert_eq!(dist(&k4, 0, 2).unwrap(), Some(1));
        assert!(matches!(dist(&k4, 0, 4), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn disconnected_is_infinite() {
        let two = disjoint_copies(&complete(4), 2);
        assert_eq!(dist(&two, 0, 5).unwrap(), None);
        assert!(!two.is_connected());
        assert_eq!(two.diameter(), None);
    }

    #[test]
    fn edge_and_set_distances() {
        let p = petersen();
        // 0-1 is an edge; vertex 2 is adjacent to 1.
        let e = Edge::new(0, 1);
        assert_eq!(dist_edge(&p, 2, e).unwrap(), Some(1));
        assert_eq!(dist_edge(&p, 0, e).unwrap(), Some(0));
        let all: Vec<usize> = (0..10).collect();
        for v in 0..10 {
            assert_eq!(dist_set(&p, v, &all).unwrap(), Some(0));
        }
        assert_eq!(dist_set(&p, 0, &[]), Err(Error::EmptySet("target set")));
    }

    #[test]
    fn balls_and_boundaries() {
        let k4 = complete(4);
        assert_eq!(ball(&k4, &[1], 1).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(ball(&k4, &[1, 3], 0).unwrap(), vec![1, 3]);
        assert!(ball(&k4, &[], 3).unwrap().is_empty());
        assert!(ball(&k4, &[0], -1).unwrap().is_empty());
        assert_eq!(boundary(&k4, &[0], 1).unwrap(), vec![1, 2, 3]);
        assert!(boundary(&k4, &[0], 2).unwrap().is_empty());
        let p = petersen();
        assert_eq!(ball_profile(&p, &[0], 3), vec![1, 4, 10, 10]);
    }

    #[test]
    fn edge_list_roundtrip_and_errors() {
        let k4_text = "# K4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";
        let g = parse_edge_list(k4_text, Indexing::ZeroBased).unwrap();
        assert_eq!((g.n(), g.d()), (4, 3));
        let saved = write_edge_list(&g, Indexing::OneBased);
        let back = parse_edge_list(&saved, Indexing::OneBased).unwrap();
        assert_eq!(back, g);
        assert_eq!(write_edge_list(&back, Indexing::OneBased), saved);

        let deg2 = "0 1\n0 2\n0 3\n1 2\n1 3\n";
        assert!(matches!(parse_edge_list(deg2, Indexing::ZeroBased), Err(Error::InvalidGraph(_))));
        let looped = "0 1\n2 2\n";
        assert!(matches!(parse_edge_list(looped, Indexing::ZeroBased), Err(Error::Parse { line: 2, .. })));
        let dup = "0 1\n1 0\n";
        assert!(matches!(parse_edge_list(dup, Indexing::ZeroBased), Err(Error::Parse { line: 2, .. })));
        let junk = "0 1\n0 x\n";
        assert!(matches!(parse_edge_list(junk, Indexing::ZeroBased), Err(Error::Parse { line: 2, .. })));
        let bad_header = "p 4 4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";
        assert!(matches!(parse_edge_list(bad_header, Indexing::ZeroBased), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn multigraph_simplicity() {
        let m = MultiGraph::from_edges(2, &[(0, 0), (0, 1), (1, 1)]).unwrap();
        assert!(!m.is_simple());
        assert_eq!(m.degree(0), 3);
        let m = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        assert!(!m.is_simple());
    }

    fn circulant_strategy() -> impl Strategy<Value = RegularGraph> {
        (9usize..30).prop_map(|n| circulant(n, &[1, 2, 4]))
    }

    proptest! {
        #[test]
        fn ball_monotone_and_capped(g in circulant_strategy(), v in 0usize..9, r in 1i64..6) {
            let small = ball(&g, &[v], r - 1).unwrap();
            let big = ball(&g, &[v], r).unwrap();
            prop_assert!(small.iter().all(|x| big.binary_search(x).is_ok()));
            prop_assert!(big.len() as f64 <= tree_ball_size(g.d(), r as usize) + 1e-9);
        }

        #[test]
        fn triangle_inequality(g in circulant_strategy(), a in 0usize..9, b in 0usize..9, c in 0usize..9) {
            let dab = dist(&g, a, b).unwrap().unwrap();
            let dbc = dist(&g, b, c).unwrap().unwrap();
            let dac = dist(&g, a, c).unwrap().unwrap();
            prop_assert!(dac <= dab + dbc);
            prop_assert_eq!(dab, dist(&g, b, a).unwrap().unwrap());
        }
    }
}
