//! Jump edges near a vertex set and the scale at which each nonzero
//! coordinate first sees enough of them.

use serde::{Deserialize, Serialize};

use super::encode::BinaryField;
use crate::constants::scale_weight;
use crate::error::{Error, Result};
use crate::graph::{bfs_distances, Edge, RegularGraph};
use crate::logscalar::LogScalar;

/// Largest graph the certifier will index (it keeps all pairwise distances).
pub const CERTIFY_VERTEX_LIMIT: usize = 4096;

/// All-pairs distances plus, per coordinate, the edges where it jumps.
#[derive(Debug, Clone)]
pub struct JumpIndex {
    n: usize,
    d: usize,
    dist: Vec<u32>,
    ends: Vec<(usize, usize)>,
    jumps: Vec<Vec<usize>>,
}

impl JumpIndex {
    pub fn new(g: &RegularGraph, f: &BinaryField) -> Result<Self> {
        let n = g.n();
        if f.n != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.n });
        }
        if n > CERTIFY_VERTEX_LIMIT {
            return Err(Error::SizeLimit {
                what: "certifier",
                size: n,
                max: CERTIFY_VERTEX_LIMIT,
                hint: "certify a smaller graph",
            });
        }
        let mut dist = vec![u32::MAX; n * n];
        for v in 0..n {
            for (w, d) in bfs_distances(g, &[v]).into_iter().enumerate() {
                if let Some(d) = d {
                    dist[v * n + w] = d as u32;
                }
            }
        }
        let ends: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.lo, e.hi)).collect();
        let jumps = (0..f.k)
            .map(|j| (0..ends.len()).filter(|&id| f.get(ends[id].0, j) != f.get(ends[id].1, j)).collect())
            .collect();
        Ok(Self { n, d: g.d(), dist, ends, jumps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn dist(&self, v: usize, w: usize) -> u32 {
        self.dist[v * self.n + w]
    }

    /// `dist(v, e)`, the distance to the nearer endpoint.
    pub fn edge_dist(&self, v: usize, e: usize) -> u32 {
        let (a, b) = self.ends[e];
        self.dist(v, a).min(self.dist(v, b))
    }

    pub fn jumps(&self, j: usize) -> &[usize] {
        &self.jumps[j]
    }

    /// `E(v, j; ℓ)` as ascending edge ids.
    pub fn near_jumps(&self, v: usize, j: usize, level: usize) -> Vec<usize> {
        self.jumps[j].iter().copied().filter(|&e| (self.edge_dist(v, e) as usize) < level).collect()
    }

    /// `E(S, j; ℓ)` as ascending edge ids.
    pub fn near_jumps_set(&self, s: &[usize], j: usize, level: usize) -> Vec<usize> {
        self.jumps[j]
            .iter()
            .copied()
            .filter(|&e| s.iter().any(|&v| (self.edge_dist(v, e) as usize) < level))
            .collect()
    }

    pub fn edge(&self, e: usize) -> Edge {
        Edge::new(self.ends[e].0, self.ends[e].1)
    }
}

/// Edges within distance `ℓ − 1` of `S` on which coordinate `j` changes.
pub fn jump_edges(g: &RegularGraph, f: &BinaryField, j: usize, s: &[usize], level: usize) -> Result<Vec<Edge>> {
    if s.is_empty() {
        return Err(Error::EmptySet("vertex set"));
    }
    if level == 0 {
        return Err(Error::InvalidParameter("ℓ must be a positive integer".into()));
    }
    if j >= f.k || f.n != g.n() {
        return Err(Error::DimensionMismatch { expected: f.k, got: j });
    }
    s.iter().try_for_each(|&v| g.check_vertex(v))?;
    let from = bfs_distances(g, s);
    Ok(g.edges()
        .iter()
        .filter(|e| f.get(e.lo, j) != f.get(e.hi, j))
        .filter(|e| crate::graph::edge_distance(&from, **e).is_some_and(|d| d < level))
        .copied()
        .collect())
}

/// `(α a_ℓ / 6)(d−1)^{ℓ−1}`, scaled by `|S|`.
pub fn jump_threshold(alpha: LogScalar, d: usize, level: usize, set_size: usize) -> LogScalar {
    alpha * LogScalar::from(scale_weight(level) / 6.0)
        * LogScalar::from((d - 1) as f64).powi(level as i64 - 1)
        * LogScalar::from(set_size)
}

/// `α(d−1)^{ℓ−1}|S| <= 3n/4`.
fn fits_three_quarters(alpha: LogScalar, d: usize, n: usize, level: usize, size: usize) -> bool {
    let grown = alpha * LogScalar::from((d - 1) as f64).powi(level as i64 - 1) * LogScalar::from(size);
    grown <= LogScalar::from(0.75 * n as f64) * LogScalar::from(1.0 + crate::logscalar::COUNT_REL_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub v: usize,
    pub j: usize,
    pub level: usize,
    /// `|E(v, j; level)|`.
    pub count: usize,
}

/// `V_σ(j; ℓ)`: vertices with `f(v)_j = σ` whose scale is `ℓ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleClass {
    pub j: usize,
    pub level: usize,
    pub sign: i8,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleIndex {
    pub levels: Vec<LevelEntry>,
    pub classes: Vec<ScaleClass>,
    /// `(v, j)` with `α(d−1)^{ℓ_{v,j}−1} > 3n/4`.
    pub vertex_bound_failures: Vec<(usize, usize)>,
    /// Classes with `α(d−1)^{ℓ−1}|V_σ(j;ℓ)| > 3n/4`.
    pub class_bound_failures: Vec<(usize, usize, i8)>,
}

impl ScaleIndex {
    pub fn level_of(&self, v: usize, j: usize) -> Option<usize> {
        self.levels.binary_search_by(|e| (e.v, e.j).cmp(&(v, j))).ok().map(|i| self.levels[i].level)
    }

    pub fn max_level(&self) -> usize {
        self.levels.iter().map(|e| e.level).max().unwrap_or(0)
    }

    /// Both growth bounds hold; a failure is evidence against part A at `α`.
    pub fn bounds_hold(&self) -> bool {
        self.vertex_bound_failures.is_empty() && self.class_bound_failures.is_empty()
    }
}

/// `ℓ_{v,j} = min{ℓ >= 1 : |E(v,j;ℓ)| >= (α a_ℓ/6)(d−1)^{ℓ−1}}` for every
/// nonzero entry, searched up to `ℓ = n`; the classes `V_±(j;ℓ)`; and the
/// two growth bounds on them.
pub fn scale_index(g: &RegularGraph, f: &BinaryField, alpha: LogScalar) -> Result<ScaleIndex> {
    scale_index_with(&JumpIndex::new(g, f)?, f, alpha)
}

pub fn scale_index_with(idx: &JumpIndex, f: &BinaryField, alpha: LogScalar) -> Result<ScaleIndex> {
    let (n, d) = (idx.n(), idx.d());
    let mut levels = Vec::new();
    let mut vertex_bound_failures = Vec::new();
    let mut hist = vec![0usize; n + 1];
    for v in 0..n {
        for j in 0..f.k {
            if f.get(v, j) == 0 {
                continue;
            }
            hist.iter_mut().for_each(|h| *h = 0);
            for &e in idx.jumps(j) {
                let r = idx.edge_dist(v, e) as usize;
                if r < n {
                    hist[r] += 1;
                }
            }
            let mut cum = 0;
            let mut found = None;
            for level in 1..=n {
                cum += hist[level - 1];
                if jump_threshold(alpha, d, level, 1).count_meets(cum) {
                    found = Some(level);
                    break;
                }
            }
            let Some(level) = found else {
                return Err(Error::Falsified {
                    lemma: "scale index",
                    detail: format!("no scale ℓ <= {n} for vertex {v}, coordinate {j}; part A fails at α = {alpha}"),
                });
            };
            if !fits_three_quarters(alpha, d, n, level, 1) {
                vertex_bound_failures.push((v, j));
            }
            levels.push(LevelEntry { v, j, level, count: cum });
        }
    }
    let mut classes: Vec<ScaleClass> = Vec::new();
    let mut keyed: Vec<(usize, usize, i8, usize)> =
        levels.iter().map(|e| (e.j, e.level, -f.get(e.v, e.j), e.v)).collect();
    keyed.sort_unstable();
    for (j, level, neg_sign, v) in keyed {
        match classes.last_mut() {
            Some(c) if c.j == j && c.level == level && c.sign == -neg_sign => c.vertices.push(v),
            _ => classes.push(ScaleClass { j, level, sign: -neg_sign, vertices: vec![v] }),
        }
    }
    let class_bound_failures = classes
        .iter()
        .filter(|c| !fits_three_quarters(alpha, d, n, c.level, c.vertices.len()))
        .map(|c| (c.j, c.level, c.sign))
        .collect();
    Ok(ScaleIndex { levels, classes, vertex_bound_failures, class_bound_failures })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpWitness {
    pub level: usize,
    pub count: usize,
    pub threshold: LogScalar,
    /// `min{ℓ : α(d−1)^ℓ|S| >= 3n/4}`, capped at `n`.
    pub search_limit: usize,
}

/// Smallest `ℓ₀` with `|E(S,j;ℓ₀)| >= (α a_{ℓ₀}/6)(d−1)^{ℓ₀−1}|S|`, searched
/// up to the first `ℓ` with `α(d−1)^ℓ|S| >= 3n/4`.
pub fn lemma43_witness(g: &RegularGraph, f: &BinaryField, j: usize, s: &[usize], alpha: LogScalar) -> Result<JumpWitness> {
    if s.is_empty() {
        return Err(Error::EmptySet("vertex set"));
    }
    if j >= f.k {
        return Err(Error::DimensionMismatch { expected: f.k, got: j });
    }
    s.iter().try_for_each(|&v| g.check_vertex(v))?;
    let value = f.get(s[0], j);
    if value == 0 || s.iter().any(|&v| f.get(v, j) != value) {
        return Err(Error::Precondition("f(·)_j must be equal and nonzero on S".into()));
    }
    let nonpos = (0..f.n).filter(|&v| f.get(v, j) <= 0).count();
    let nonneg = (0..f.n).filter(|&v| f.get(v, j) >= 0).count();
    if 2 * nonpos.min(nonneg) < f.n {
        return Err(Error::Precondition(format!("coordinate {j} has no empirical median at 0")));
    }
    let (n, d) = (g.n(), g.d());
    let quarter = LogScalar::from(0.75 * n as f64);
    let grow = |l: usize| alpha * LogScalar::from((d - 1) as f64).powi(l as i64) * LogScalar::from(s.len());
    let search_limit = (1..=n).find(|&l| grow(l) >= quarter).unwrap_or(n);
    let from = bfs_distances(g, s);
    let mut hist = vec![0usize; n + 1];
    for e in g.edges().iter().filter(|e| f.get(e.lo, j) != f.get(e.hi, j)) {
        if let Some(r) = crate::graph::edge_distance(&from, *e) {
            hist[r.min(n)] += 1;
        }
    }
    let mut cum = 0;
    for level in 1..=search_limit {
        cum += hist[level - 1];
        let threshold = jump_threshold(alpha, d, level, s.len());
        if threshold.count_meets(cum) {
            return Ok(JumpWitness { level, count: cum, threshold, search_limit });
        }
    }
    Err(Error::Falsified {
        lemma: "jump-edge witness",
        detail: format!("no ℓ <= {search_limit} has enough jump edges near S for coordinate {j}"),
    })
}
