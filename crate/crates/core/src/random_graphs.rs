//! Configuration-model sampling of uniform `d`-regular graphs and BFS
//! exploration statistics.
//!
//! Points are `v * d + k` for vertex `v` and slot `k < d`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs_within, Adjacency, MultiGraph, RegularGraph};

/// A perfect matching on the `n * d` points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    n: usize,
    d: usize,
    partner: Vec<usize>,
}

impl Pairing {
    pub fn from_pairs(n: usize, d: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        check_nd(n, d)?;
        let total = n * d;
        let mut partner = vec![usize::MAX; total];
        for &(a, b) in pairs {
            if a >= total || b >= total || a == b {
                return Err(Error::InvalidParameter(format!("bad point pair ({a}, {b})")));
            }
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::InvalidParameter(format!("point matched twice in ({a}, {b})")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        if partner.iter().any(|&p| p == usize::MAX) {
            return Err(Error::InvalidParameter("pairing is not perfect".into()));
        }
        Ok(Pairing { n, d, partner })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn partner(&self, point: usize) -> usize {
        self.partner[point]
    }

    /// Pairs `(a, b)` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.partner.len()).filter(|&a| a < self.partner[a]).map(|a| (a, self.partner[a])).collect()
    }
}

fn check_nd(n: usize, d: usize) -> Result<()> {
    if (n * d) % 2 == 1 {
        return Err(Error::InvalidParameter(format!("n * d = {} is odd", n * d)));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    Ok(())
}

fn check_regular_params(n: usize, d: usize) -> Result<()> {
    check_nd(n, d)?;
    if d < 3 || n < d {
        return Err(Error::InvalidParameter(format!("need n >= d >= 3, got n = {n}, d = {d}")));
    }
    Ok(())
}

/// Uniform perfect matching on `points`, appended to `out` as pairs.
/// Consumes `points`. Stops early and returns `false` as soon as `reject`
/// returns true for a newly formed pair.
fn random_matching<R: Rng + ?Sized>(
    points: &mut Vec<usize>,
    rng: &mut R,
    mut reject: impl FnMut(usize, usize) -> bool,
    out: &mut Vec<(usize, usize)>,
) -> bool {
    while let Some(a) = points.pop() {
        let i = rng.gen_range(0..points.len());
        let b = points.swap_remove(i);
        if reject(a, b) {
            return false;
        }
        out.push((a.min(b), a.max(b)));
    }
    true
}

/// Uniform perfect matching on `[n] x [d]`.
pub fn sample_pairing<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Pairing> {
    check_nd(n, d)?;
    let mut points: Vec<usize> = (0..n * d).collect();
    let mut pairs = Vec::with_capacity(n * d / 2);
    random_matching(&mut points, rng, |_, _| false, &mut pairs);
    Pairing::from_pairs(n, d, &pairs)
}

/// Collapse each vertex's `d` points onto the vertex.
pub fn collapse(p: &Pairing) -> MultiGraph {
    let edges: Vec<(usize, usize)> = p.pairs().into_iter().map(|(a, b)| (a / p.d, b / p.d)).collect();
    MultiGraph::from_edges(p.n, &edges).expect("points are in range")
}

pub fn is_simple(m: &MultiGraph) -> bool {
    m.is_simple()
}

/// `ceil(100 * e^{(d^2 - 1)/4})`.
pub fn default_max_rejects(d: usize) -> usize {
    let d = d as f64;
    (100.0 * ((d * d - 1.0) / 4.0).exp()).ceil() as usize
}

#[derive(Debug, Clone)]
pub struct SampledGraph {
    pub graph: RegularGraph,
    /// Pairings rejected before the accepted one.
    pub rejections: usize,
}

/// Uniform element of `G(n, d)` by rejection from the configuration model.
///
/// Pairs are revealed one at a time and the attempt is abandoned at the
/// first loop or repeated edge, which leaves the accepted distribution
/// unchanged.
pub fn sample_simple_regular<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
    max_rejects: Option<usize>,
) -> Result<SampledGraph> {
    check_regular_params(n, d)?;
    let budget = max_rejects.unwrap_or_else(|| default_max_rejects(d));
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let mut points: Vec<usize> = Vec::with_capacity(n * d);
    let mut pairs = Vec::with_capacity(n * d / 2);
    for rejections in 0..=budget {
        adj.iter_mut().for_each(Vec::clear);
        points.clear();
        points.extend(0..n * d);
        pairs.clear();
        let ok = random_matching(
            &mut points,
            rng,
            |a, b| {
                let (v, w) = (a / d, b / d);
                if v == w || adj[v].contains(&w) {
                    return true;
                }
                adj[v].push(w);
                adj[w].push(v);
                false
            },
            &mut pairs,
        );
        if ok {
            let edges: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a / d, b / d)).collect();
            let graph = RegularGraph::from_edges(n, &edges)?;
            return Ok(SampledGraph { graph, rejections });
        }
    }
    Err(Error::Resource {
        what: "sample_simple_regular",
        detail: format!(
            "{budget} pairings rejected for n = {n}, d = {d}; expected about e^{{(d^2-1)/4}} = {:.1} per success",
            (((d * d) as f64 - 1.0) / 4.0).exp()
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationLevel {
    pub radius: usize,
    pub ball: usize,
    pub boundary: usize,
    /// Boundary vertices joined to the previous ball by exactly one edge
    /// (edges counted with multiplicity).
    pub unique: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationTrace {
    pub seeds: Vec<usize>,
    pub levels: Vec<ExplorationLevel>,
}

/// BFS levels `1..=max_radius` from `seeds`, with `|B|`, `|∂B|` and the
/// edge-unique part of each boundary.
pub fn explore<G: Adjacency + ?Sized>(g: &G, seeds: &[usize], max_radius: usize) -> Result<ExplorationTrace> {
    let n = g.vertex_count();
    if seeds.is_empty() {
        return Err(Error::EmptySet("seed set"));
    }
    if let Some(&v) = seeds.iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let dist = bfs_within(g, seeds, max_radius);
    let mut seeds_sorted = seeds.to_vec();
    seeds_sorted.sort_unstable();
    seeds_sorted.dedup();
    let mut ball = seeds_sorted.len();
    let mut levels = Vec::with_capacity(max_radius);
    for r in 1..=max_radius {
        let mut boundary = 0;
        let mut unique = 0;
        for v in (0..n).filter(|&v| dist[v] == Some(r)) {
            boundary += 1;
            let into_prev = g.neighbors(v).iter().filter(|&&w| matches!(dist[w], Some(x) if x < r)).count();
            if into_prev == 1 {
                unique += 1;
            }
        }
        ball += boundary;
        levels.push(ExplorationLevel { radius: r, ball, boundary, unique });
    }
    Ok(ExplorationTrace { seeds: seeds_sorted, levels })
}

/// `max(0, 1 - ((2e/(1-θ)) * a / (n - 2r))^{((1-θ)/2) a})`, a lower bound on
/// `P[|Δ(R,1)| >= θ|A|]` given a prefix matching supported on `R`.
pub fn lemma52_bound(theta: f64, a_size: usize, n: usize, r_size: usize) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("theta = {theta} not in (0, 1)")));
    }
    if 2 * r_size >= n {
        return Err(Error::InvalidParameter(format!("|R| = {r_size} must be below n/2 = {}", n as f64 / 2.0)));
    }
    let base = 2.0 * std::f64::consts::E / (1.0 - theta) * a_size as f64 / (n - 2 * r_size) as f64;
    if base >= 1.0 {
        return Ok(0.0);
    }
    let exponent = (1.0 - theta) / 2.0 * a_size as f64;
    Ok((1.0 - base.powf(exponent)).max(0.0))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub frequency: f64,
    pub std_error: f64,
    pub trials: usize,
    pub successes: usize,
    pub a_size: usize,
    pub bound: f64,
}

/// Empirical `P[|Δ(R,1)| >= θ|A|]` over uniform completions of `prefix`
/// (pairs of points, all owned by vertices of `r_set`).
pub fn lemma52_montecarlo<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    r_set: &[usize],
    prefix: &[(usize, usize)],
    theta: f64,
    trials: usize,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    check_regular_params(n, d)?;
    let mut in_r = vec![false; n];
    for &v in r_set {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        in_r[v] = true;
    }
    let r_size = in_r.iter().filter(|&&b| b).count();
    let mut used = vec![false; n * d];
    for &(a, b) in prefix {
        for p in [a, b] {
            if p >= n * d {
                return Err(Error::InvalidParameter(format!("point {p} out of range")));
            }
            if used[p] {
                return Err(Error::InvalidParameter(format!("point {p} matched twice in prefix")));
            }
            if !in_r[p / d] {
                return Err(Error::Precondition(format!("prefix touches vertex {} outside R", p / d)));
            }
            used[p] = true;
        }
        if a == b {
            return Err(Error::InvalidParameter(format!("point {a} paired with itself")));
        }
    }
    let a_size = (0..n * d).filter(|&p| in_r[p / d] && !used[p]).count();
    let bound = lemma52_bound(theta, a_size, n, r_size)?;
    let free: Vec<usize> = (0..n * d).filter(|&p| !used[p]).collect();
    let r_vertices: Vec<usize> = (0..n).filter(|&v| in_r[v]).collect();
    let mut successes = 0;
    let mut pairs = Vec::with_capacity(n * d / 2);
    let mut points = Vec::with_capacity(free.len());
    for _ in 0..trials {
        pairs.clear();
        pairs.extend_from_slice(prefix);
        points.clear();
        points.extend_from_slice(&free);
        random_matching(&mut points, rng, |_, _| false, &mut pairs);
        let edges: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a / d, b / d)).collect();
        let m = MultiGraph::from_edges(n, &edges)?;
        let trace = explore(&m, &r_vertices, 1)?;
        if trace.levels[0].unique as f64 >= theta * a_size as f64 {
            successes += 1;
        }
    }
    let frequency = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
    let std_error = if trials == 0 { 0.0 } else { (frequency * (1.0 - frequency) / trials as f64).sqrt() };
    Ok(MonteCarloEstimate { frequency, std_error, trials, successes, a_size, bound })
}
