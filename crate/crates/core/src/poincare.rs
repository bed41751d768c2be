//! Nonlinear Poincaré ratios of vector fields on regular graphs.
//!
//! For `f: V → (R^k, ‖·‖)` and `p >= 1` the ratio is
//! `(1/n²) Σ_{v,w} ‖f(v) − f(w)‖^p` over `(1/|E|) Σ_{vw∈E} ‖f(v) − f(w)‖^p`,
//! the outer sum over ordered pairs with `v = w` included. Every field gives
//! a lower bound on the Poincaré constant; the searches here try to push
//! that bound up to the supremum.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constants::{poincare_gamma, ConstParams};
use crate::error::{Error, Result};
use crate::graph::{bfs_distances, RegularGraph};
use crate::logscalar::LogScalar;
use crate::norms::{eval_norm, UncondNorm};
use crate::rng::RngState;
use crate::spectral::second_eigenvector;

/// A map `V → R^k`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub n: usize,
    pub k: usize,
    pub values: Vec<f64>,
}

impl VectorField {
    pub fn new(n: usize, k: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("field dimension must be positive".into()));
        }
        if values.len() != n * k {
            return Err(Error::DimensionMismatch { expected: n * k, got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("field entries must be finite".into()));
        }
        Ok(Self { n, k, values })
    }

    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Self::new(values.len(), 1, values)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.first().map(|r| r.len()).ok_or(Error::EmptySet("field rows"))?;
        if let Some(r) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, got: r.len() });
        }
        Self::new(rows.len(), k, rows.concat())
    }

    pub fn at(&self, v: usize) -> &[f64] {
        &self.values[v * self.k..(v + 1) * self.k]
    }

    pub fn is_constant(&self) -> bool {
        (1..self.n).all(|v| self.at(v) == self.at(0))
    }

    pub fn translated(&self, shift: &[f64]) -> Self {
        let values = self.values.chunks(self.k).flat_map(|row| row.iter().zip(shift).map(|(a, b)| a + b)).collect();
        Self { values, ..self.clone() }
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * t).collect(), ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareQuery {
    pub norm: UncondNorm,
    pub p: f64,
}

impl PoincareQuery {
    pub fn new(norm: UncondNorm, p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p = {p} must be finite and at least 1")));
        }
        norm.validate()?;
        Ok(Self { norm, p })
    }

    pub fn scalar_l2() -> Self {
        Self { norm: UncondNorm::lq(2.0).expect("2 is a valid exponent"), p: 2.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioReport {
    pub numerator: f64,
    pub denominator: f64,
    /// `+∞` when a non-constant field is constant along every edge.
    pub ratio: f64,
    pub field: VectorField,
}

fn check_field(g: &RegularGraph, f: &VectorField) -> Result<()> {
    if f.n != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: f.n });
    }
    Ok(())
}

/// `Σ_{v<w} ‖f(v)−f(w)‖^p` and `Σ_{edges} ‖f(v)−f(w)‖^p`.
fn raw_sums(g: &RegularGraph, f: &VectorField, query: &PoincareQuery) -> Result<(f64, f64)> {
    let mut diff = vec![0.0; f.k];
    let mut term = |a: usize, b: usize| -> Result<f64> {
        diff.iter_mut().zip(f.at(a).iter().zip(f.at(b))).for_each(|(d, (x, y))| *d = x - y);
        Ok(eval_norm(&query.norm, &diff)?.powf(query.p))
    };
    let mut pairs = 0.0;
    for v in 0..f.n {
        for w in v + 1..f.n {
            pairs += term(v, w)?;
        }
    }
    let mut edges = 0.0;
    for e in g.edges() {
        edges += term(e.lo, e.hi)?;
    }
    Ok((pairs, edges))
}

fn ratio_from_sums(n: usize, m: usize, pairs: f64, edges: f64) -> (f64, f64, f64) {
    let numerator = 2.0 * pairs / (n * n) as f64;
    let denominator = edges / m as f64;
    let ratio = if denominator > 0.0 { numerator / denominator } else { f64::INFINITY };
    (numerator, denominator, ratio)
}

/// Both sides evaluated literally. A constant field is rejected.
pub fn poincare_ratio(g: &RegularGraph, f: &VectorField, query: &PoincareQuery) -> Result<RatioReport> {
    check_field(g, f)?;
    if f.is_constant() {
        return Err(Error::Degenerate("constant field has zero Poincaré numerator".into()));
    }
    let (pairs, edges) = raw_sums(g, f, query)?;
    let (numerator, denominator, ratio) = ratio_from_sums(g.n(), g.edges().len(), pairs, edges);
    Ok(RatioReport { numerator, denominator, ratio, field: f.clone() })
}

/// The scalar `L2`, `p = 2` constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarGamma {
    /// `d/(d − λ2)`, attained by the second eigenvector.
    pub certified: f64,
    /// `d/(2(d − λ2))`, the alternative closed form; reported, not certified.
    pub half_form: f64,
    pub lambda2: f64,
    /// Ratio of the second eigenvector itself, as a check on `certified`.
    pub eigenvector_ratio: f64,
}

/// `d/(d − λ2)`; infinite when `g` is disconnected.
pub fn gamma_scalar_l2_exact(g: &RegularGraph) -> Result<ScalarGamma> {
    let d = g.d() as f64;
    if !g.is_connected() {
        return Ok(ScalarGamma {
            certified: f64::INFINITY,
            half_form: f64::INFINITY,
            lambda2: d,
            eigenvector_ratio: f64::INFINITY,
        });
    }
    let (lambda2, vector) = second_eigenvector(g)?;
    let report = poincare_ratio(g, &VectorField::scalar(vector)?, &PoincareQuery::scalar_l2())?;
    Ok(ScalarGamma {
        certified: d / (d - lambda2),
        half_form: d / (2.0 * (d - lambda2)),
        lambda2,
        eigenvector_ratio: report.ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Total proposals over all restarts.
    pub budget: usize,
    pub restarts: usize,
    pub initial_temperature: f64,
    pub final_temperature: f64,
    /// Exact recomputation period, which also recenters and rescales.
    pub refresh_every: usize,
}

impl SearchOptions {
    pub fn with_budget(budget: usize) -> Self {
        Self {
            budget,
            restarts: (budget / 25_000).clamp(1, 8),
            initial_temperature: 1e-2,
            final_temperature: 1e-10,
            refresh_every: 500,
        }
    }
}

struct Annealer<'a> {
    g: &'a RegularGraph,
    query: &'a PoincareQuery,
    field: VectorField,
    pairs: f64,
    edges: f64,
    diff: Vec<f64>,
}

impl<'a> Annealer<'a> {
    fn new(g: &'a RegularGraph, query: &'a PoincareQuery, field: VectorField) -> Result<Self> {
        let (pairs, edges) = raw_sums(g, &field, query)?;
        let k = field.k;
        Ok(Self { g, query, field, pairs, edges, diff: vec![0.0; k] })
    }

    fn ratio_of(&self, pairs: f64, edges: f64) -> f64 {
        ratio_from_sums(self.g.n(), self.g.edges().len(), pairs, edges).2
    }

    fn ratio(&self) -> f64 {
        self.ratio_of(self.pairs, self.edges)
    }

    fn term(&mut self, row: &[f64], w: usize) -> Result<f64> {
        let other = self.field.at(w);
        self.diff.iter_mut().zip(row.iter().zip(other)).for_each(|(d, (x, y))| *d = x - y);
        Ok(eval_norm(&self.query.norm, &self.diff)?.powf(self.query.p))
    }

    /// Contributions of vertex `v` placed at `row`.
    fn contributions(&mut self, v: usize, row: &[f64]) -> Result<(f64, f64)> {
        let mut pairs = 0.0;
        for w in (0..self.field.n).filter(|&w| w != v) {
            pairs += self.term(row, w)?;
        }
        let mut edges = 0.0;
        for i in 0..self.g.d() {
            let w = self.g.adjacency()[v][i];
            edges += self.term(row, w)?;
        }
        Ok((pairs, edges))
    }

    /// Recenter, rescale to unit sup, and recompute the sums exactly.
    fn refresh(&mut self) -> Result<()> {
        let (n, k) = (self.field.n, self.field.k);
        let mut mean = vec![0.0; k];
        for v in 0..n {
            mean.iter_mut().zip(self.field.at(v)).for_each(|(m, x)| *m += x / n as f64);
        }
        let neg: Vec<f64> = mean.iter().map(|m| -m).collect();
        let centered = self.field.translated(&neg);
        let spread = centered.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.field = if spread > 0.0 { centered.scaled(1.0 / spread) } else { centered };
        let (pairs, edges) = raw_sums(self.g, &self.field, self.query)?;
        self.pairs = pairs;
        self.edges = edges;
        Ok(())
    }

    fn run<R: Rng + ?Sized>(&mut self, steps: usize, opts: &SearchOptions, rng: &mut R) -> Result<VectorField> {
        self.refresh()?;
        let (n, k) = (self.field.n, self.field.k);
        let mut best = (self.ratio(), self.field.clone());
        let mut sigma = 0.5f64;
        let cooling = (opts.final_temperature / opts.initial_temperature).ln() / steps.max(1) as f64;
        let mut row = vec![0.0; k];
        for step in 0..steps {
            let temperature = opts.initial_temperature * (cooling * step as f64).exp();
            let v = rng.gen_range(0..n);
            let c = rng.gen_range(0..k);
            row.copy_from_slice(self.field.at(v));
            let (old_p, old_e) = self.contributions(v, &row)?;
            let z: f64 = rng.sample(StandardNormal);
            row[c] += sigma * z;
            let (new_p, new_e) = self.contributions(v, &row)?;
            let (pairs, edges) = (self.pairs - old_p + new_p, self.edges - old_e + new_e);
            let current = self.ratio();
            let proposed = self.ratio_of(pairs, edges);
            let accept = proposed >= current
                || (current.is_finite() && rng.gen::<f64>() < ((proposed - current) / (temperature * current)).exp());
            if accept {
                self.field.values[v * k + c] = row[c];
                self.pairs = pairs;
                self.edges = edges;
                sigma = (sigma * 1.5).min(2.0);
            } else {
                sigma = (sigma * 1.5f64.powf(-0.25)).max(1e-12);
            }
            if (step + 1) % opts.refresh_every == 0 {
                self.refresh()?;
            }
            if self.ratio() > best.0 {
                best = (self.ratio(), self.field.clone());
            }
        }
        Ok(best.1)
    }
}

/// Multi-restart simulated annealing over `k`-dimensional fields. Returns
/// the best field found, re-evaluated exactly, and never a field worse than
/// its own starting point. Deterministic given `seed`.
pub fn gamma_search(
    g: &RegularGraph,
    query: &PoincareQuery,
    k: usize,
    opts: &SearchOptions,
    seed: RngState,
) -> Result<RatioReport> {
    if opts.budget == 0 || opts.restarts == 0 {
        return Err(Error::InvalidParameter("search budget and restarts must be positive".into()));
    }
    if k == 0 || g.n() < 2 {
        return Err(Error::InvalidParameter("need k >= 1 and at least two vertices".into()));
    }
    let steps = (opts.budget / opts.restarts).max(1);
    let results: Vec<Result<RatioReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..opts.restarts)
            .map(|r| {
                scope.spawn(move || -> Result<RatioReport> {
                    let mut rng = seed.split(r as u64).rng();
                    let init = loop {
                        let values = (0..g.n() * k).map(|_| rng.sample(StandardNormal)).collect();
                        let f = VectorField::new(g.n(), k, values)?;
                        if !f.is_constant() {
                            break f;
                        }
                    };
                    let start = poincare_ratio(g, &init, query)?;
                    let found = Annealer::new(g, query, init)?.run(steps, opts, &mut rng)?;
                    let end = poincare_ratio(g, &found, query)?;
                    Ok(if end.ratio >= start.ratio { end } else { start })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
    });
    let mut best: Option<RatioReport> = None;
    for r in results {
        let r = r?;
        if best.as_ref().map_or(true, |b| r.ratio > b.ratio) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Continue annealing from a given field; the result is at least as good
/// as `init`.
pub fn gamma_search_from(
    g: &RegularGraph,
    query: &PoincareQuery,
    init: &VectorField,
    opts: &SearchOptions,
    seed: RngState,
) -> Result<RatioReport> {
    let start = poincare_ratio(g, init, query)?;
    let found = Annealer::new(g, query, init.clone())?.run(opts.budget, opts, &mut seed.rng())?;
    let end = poincare_ratio(g, &found, query)?;
    Ok(if end.ratio >= start.ratio { end } else { start })
}

/// Mean graph distance, both over all `n²` ordered pairs and over `v ≠ w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceSummary {
    pub mean_with_diagonal: f64,
    pub mean_off_diagonal: f64,
    pub diameter: usize,
}

fn all_distances(g: &RegularGraph) -> Result<Vec<Vec<usize>>> {
    (0..g.n())
        .map(|v| {
            bfs_distances(g, &[v])
                .into_iter()
                .map(|d| d.ok_or_else(|| Error::Precondition("graph must be connected".into())))
                .collect()
        })
        .collect()
}

pub fn distance_summary(g: &RegularGraph) -> Result<DistanceSummary> {
    let dist = all_distances(g)?;
    let total: usize = dist.iter().flatten().sum();
    let diameter = dist.iter().flatten().copied().max().unwrap_or(0);
    let n = g.n() as f64;
    let off = if g.n() > 1 { total as f64 / (n * (n - 1.0)) } else { 0.0 };
    Ok(DistanceSummary { mean_with_diagonal: total as f64 / (n * n), mean_off_diagonal: off, diameter })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Embedding {
    pub field: VectorField,
    pub q: f64,
    /// `max ‖Δf‖/dist` after rescaling so that `min ‖Δf‖/dist = 1`.
    pub distortion: f64,
    pub max_edge_stretch: f64,
    /// Poincaré ratio of the embedding at `p = 1` in `ℓ_q^k`.
    pub ratio: f64,
    /// `mean distance / max edge stretch`, a weaker bound implied by the
    /// non-contraction side.
    pub stretch_bound: f64,
    pub scales: usize,
    pub trials_per_scale: usize,
}

/// Random-subset embedding into `ℓ_q^k`. Coordinate `(j, t)` is the distance
/// to a random set of density `2^{−j−1}`, truncated at `2^{j+1}`. Scales run
/// over `0..=⌈log₂ diam⌉`, with `⌈ln n⌉` sets per scale by default. Pairs
/// left unseparated get a singleton-distance coordinate.
pub fn bourgain_style_embedding<R: Rng + ?Sized>(
    g: &RegularGraph,
    q: f64,
    scales: Option<usize>,
    trials: Option<usize>,
    rng: &mut R,
) -> Result<Embedding> {
    let norm = UncondNorm::lq(q)?;
    let dist = all_distances(g)?;
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two vertices".into()));
    }
    let diam = dist.iter().flatten().copied().max().unwrap_or(1).max(1);
    let scales = scales.unwrap_or_else(|| (diam as f64).log2().ceil() as usize + 1).max(1);
    let trials = trials.unwrap_or_else(|| (n as f64).ln().ceil() as usize).max(1);
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for j in 0..scales {
        let density = 0.5f64.powi(j as i32 + 1);
        let cap = 2f64.powi(j as i32 + 1);
        for _ in 0..trials {
            let set: Vec<usize> = (0..n).filter(|_| rng.gen::<f64>() < density).collect();
            let col = if set.is_empty() {
                vec![cap; n]
            } else {
                bfs_distances(g, &set).into_iter().map(|d| (d.unwrap_or(usize::MAX) as f64).min(cap)).collect()
            };
            columns.push(col);
        }
    }
    let separated = |cols: &[Vec<f64>], v: usize, w: usize| cols.iter().any(|c| c[v] != c[w]);
    for v in 0..n {
        for w in v + 1..n {
            if !separated(&columns, v, w) {
                columns.push(dist[v].iter().map(|&x| x as f64).collect());
            }
        }
    }
    let k = columns.len();
    let mut values = vec![0.0; n * k];
    for (c, col) in columns.iter().enumerate() {
        for v in 0..n {
            values[v * k + c] = col[v];
        }
    }
    let raw = VectorField::new(n, k, values)?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut diff = vec![0.0; k];
    for v in 0..n {
        for w in v + 1..n {
            diff.iter_mut().zip(raw.at(v).iter().zip(raw.at(w))).for_each(|(d, (a, b))| *d = a - b);
            let s = eval_norm(&norm, &diff)? / dist[v][w] as f64;
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    let field = raw.scaled(1.0 / lo);
    let query = PoincareQuery::new(norm.clone(), 1.0)?;
    let ratio = poincare_ratio(g, &field, &query)?.ratio;
    let mut max_edge_stretch = 0.0f64;
    for e in g.edges() {
        diff.iter_mut().zip(field.at(e.lo).iter().zip(field.at(e.hi))).for_each(|(d, (a, b))| *d = a - b);
        max_edge_stretch = max_edge_stretch.max(eval_norm(&norm, &diff)?);
    }
    let mean = distance_summary(g)?.mean_with_diagonal;
    Ok(Embedding {
        field,
        q,
        distortion: hi / lo,
        max_edge_stretch,
        ratio,
        stretch_bound: mean / max_edge_stretch,
        scales,
        trials_per_scale: trials,
    })
}

/// Unconditionality and cotype constants in the bi-Lipschitz application.
pub const UC_CONSTANT: f64 = 20.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UcRow {
    pub n: usize,
    pub d: usize,
    pub q: f64,
    pub mean_distance: f64,
    pub edge_mean_distance: f64,
    /// `20 Γ(q)` with `C = K = 20`: any `D < 20` embedding into such a
    /// space forces `mean_distance <= 20 Γ(q)`.
    pub distortion_times_gamma: LogScalar,
    /// Whether this `q` is ruled out by the chain.
    pub excluded: bool,
    /// Smallest `q` the chain does not rule out, `(mean / (20 Γ|_{q=1}))^{1/10}`.
    pub q_floor: f64,
}

/// Average distances and the implied cotype lower bound for each graph and `q`.
pub fn uc_experiment(graphs: &[RegularGraph], q_grid: &[f64], template: &ConstParams) -> Result<Vec<UcRow>> {
    let mut rows = Vec::new();
    for g in graphs {
        let mean = distance_summary(g)?.mean_with_diagonal;
        let base = ConstParams { q: 2.0, c: UC_CONSTANT, k_uncond: UC_CONSTANT, d: g.d(), ..*template };
        // Γ is q¹⁰ times a q-free factor.
        let gamma_at_one = poincare_gamma(&base)? / LogScalar::from(2.0).powi(10);
        let q_floor = ((mean.ln() - UC_CONSTANT.ln() - gamma_at_one.ln_abs()) / 10.0).exp();
        for &q in q_grid {
            let gamma = poincare_gamma(&ConstParams { q, ..base })?;
            let bound = gamma * LogScalar::from(UC_CONSTANT);
            rows.push(UcRow {
                n: g.n(),
                d: g.d(),
                q,
                mean_distance: mean,
                edge_mean_distance: 1.0,
                distortion_times_gamma: bound,
                excluded: bound < LogScalar::from(mean),
                q_floor,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use crate::random_graphs::sample_simple_regular;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn k4_example() {
        let g = named::complete(4);
        let f = VectorField::scalar(vec![1.0, 1.0, -1.0, -1.0]).unwrap();
        let r = poincare_ratio(&g, &f, &PoincareQuery::scalar_l2()).unwrap();
        assert_abs_diff_eq!(r.numerator, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.denominator, 8.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.ratio, 0.75, epsilon = 1e-15);
        let constant = VectorField::scalar(vec![2.0; 4]).unwrap();
        assert!(matches!(poincare_ratio(&g, &constant, &PoincareQuery::scalar_l2()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn duplicated_columns_keep_ratio() {
        let g = named::petersen();
        let l1 = PoincareQuery::new(UncondNorm::lq(1.0).unwrap(), 1.0).unwrap();
        let col: Vec<f64> = (0..10).map(|i| (i * i % 7) as f64).collect();
        let one = poincare_ratio(&g, &VectorField::scalar(col.clone()).unwrap(), &l1).unwrap();
        let rows: Vec<Vec<f64>> = col.iter().map(|&x| vec![x, x]).collect();
        let two = poincare_ratio(&g, &VectorField::from_rows(&rows).unwrap(), &l1).unwrap();
        assert_abs_diff_eq!(two.numerator, 2.0 * one.numerator, epsilon = 1e-12);
        assert_abs_diff_eq!(two.denominator, 2.0 * one.denominator, epsilon = 1e-12);
        assert_abs_diff_eq!(two.ratio, one.ratio, epsilon = 1e-12);
    }

    #[test]
    fn indicator_is_finite() {
        let g = named::petersen();
        let mut f = vec![-0.1; 10];
        f[3] = 0.9;
        let r = poincare_ratio(&g, &VectorField::scalar(f).unwrap(), &PoincareQuery::scalar_l2()).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
    }

    #[test]
    fn scalar_closed_form() {
        let k4 = gamma_scalar_l2_exact(&named::complete(4)).unwrap();
        assert_abs_diff_eq!(k4.certified, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(k4.half_form, 0.375, epsilon = 1e-12);
        assert_abs_diff_eq!(k4.eigenvector_ratio, 0.75, epsilon = 1e-10);
        let p = gamma_scalar_l2_exact(&named::petersen()).unwrap();
        assert_abs_diff_eq!(p.certified, 1.5, epsilon = 1e-10);
        assert_abs_diff_eq!(p.eigenvector_ratio, 1.5, epsilon = 1e-10);
        let b = gamma_scalar_l2_exact(&named::complete_bipartite(3)).unwrap();
        assert_abs_diff_eq!(b.certified, 1.0, epsilon = 1e-10);
        let split = gamma_scalar_l2_exact(&named::disjoint_copies(&named::complete(4), 2)).unwrap();
        assert!(split.certified.is_infinite());
    }

    #[test]
    fn search_matches_eigen_oracle_on_petersen() {
        let g = named::petersen();
        let r = gamma_search(&g, &PoincareQuery::scalar_l2(), 1, &SearchOptions::with_budget(40_000), RngState::new(7))
            .unwrap();
        assert!(r.ratio >= 1.5 - 1e-6, "{}", r.ratio);
        assert!(r.ratio <= 1.5 + 1e-9);
    }

    #[test]
    fn search_is_deterministic_and_monotone() {
        let g = named::complete_bipartite(3);
        let q = PoincareQuery::new(UncondNorm::lq(1.0).unwrap(), 1.5).unwrap();
        let opts = SearchOptions::with_budget(3000);
        let a = gamma_search(&g, &q, 2, &opts, RngState::new(3)).unwrap();
        let b = gamma_search(&g, &q, 2, &opts, RngState::new(3)).unwrap();
        assert_eq!(a.ratio, b.ratio);
        let init = VectorField::from_rows(&(0..6).map(|v| vec![v as f64, (v % 2) as f64]).collect::<Vec<_>>()).unwrap();
        let start = poincare_ratio(&g, &init, &q).unwrap().ratio;
        assert!(gamma_search_from(&g, &q, &init, &SearchOptions::with_budget(50), RngState::new(1)).unwrap().ratio >= start);
    }

    #[test]
    fn k4_l1_matches_grid_maximum() {
        let g = named::complete(4);
        let q = PoincareQuery::new(UncondNorm::lq(1.0).unwrap(), 1.0).unwrap();
        let mut grid_best = 0.0f64;
        for code in 0..81usize {
            let f: Vec<f64> = (0..4).map(|i| ((code / 3usize.pow(i)) % 3) as f64 - 1.0).collect();
            let f = VectorField::scalar(f).unwrap();
            if !f.is_constant() {
                grid_best = grid_best.max(poincare_ratio(&g, &f, &q).unwrap().ratio);
            }
        }
        let found = gamma_search(&g, &q, 1, &SearchOptions::with_budget(5000), RngState::new(2)).unwrap();
        assert!(found.ratio >= grid_best - 1e-9, "{} vs {}", found.ratio, grid_best);
    }

    #[test]
    fn embedding_contract() {
        let g = named::petersen();
        let e = bourgain_style_embedding(&g, 2.0, None, Some(30), &mut RngState::new(5).rng()).unwrap();
        assert!(e.distortion <= 3.0, "{}", e.distortion);
        let norm = UncondNorm::lq(2.0).unwrap();
        for v in 0..10 {
            for w in v + 1..10 {
                let diff: Vec<f64> = e.field.at(v).iter().zip(e.field.at(w)).map(|(a, b)| a - b).collect();
                let d = crate::graph::dist(&g, v, w).unwrap().unwrap() as f64;
                assert!(eval_norm(&norm, &diff).unwrap() >= d * (1.0 - 1e-12));
            }
        }
        assert!(e.field.k >= e.scales * e.trials_per_scale);
    }

    #[test]
    fn embedding_lower_bound_on_sampled_graph() {
        let mut rng = RngState::new(11).rng();
        let g = sample_simple_regular(512, 6, &mut rng, None).unwrap().graph;
        let e = bourgain_style_embedding(&g, 2.0, None, Some(2), &mut rng).unwrap();
        assert!(e.ratio >= e.stretch_bound * (1.0 - 1e-12), "{} < {}", e.ratio, e.stretch_bound);
    }

    #[test]
    fn distances() {
        let p = distance_summary(&named::petersen()).unwrap();
        // 10 vertices: 3 at distance 1, 6 at distance 2 from each.
        assert_abs_diff_eq!(p.mean_off_diagonal, 150.0 / 90.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.mean_with_diagonal, 1.5, epsilon = 1e-15);
        assert_eq!(distance_summary(&named::complete(4)).unwrap().mean_off_diagonal, 1.0);
        let mut rng = RngState::new(4).rng();
        let means: Vec<f64> = [64, 256, 1024]
            .iter()
            .map(|&n| distance_summary(&sample_simple_regular(n, 6, &mut rng, None).unwrap().graph).unwrap().mean_off_diagonal)
            .collect();
        assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
    }

    #[test]
    fn uc_rows() {
        let rows = uc_experiment(&[named::petersen()], &[2.0, 4.0], &ConstParams::paper(3)).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| !r.excluded && r.q_floor < 1e-6));
        assert!(rows[1].distortion_times_gamma > rows[0].distortion_times_gamma);
    }

    fn small_field() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5f64..5.0, 20)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn translation_and_scale_invariance(values in small_field(), shift in prop::collection::vec(-10f64..10.0, 2), t in 0.01f64..50.0, p in 1f64..3.0) {
            let g = named::petersen();
            let f = VectorField::new(10, 2, values).unwrap();
            prop_assume!(!f.is_constant());
            let q = PoincareQuery::new(UncondNorm::lq(3.0).unwrap(), p).unwrap();
            let base = poincare_ratio(&g, &f, &q).unwrap().ratio;
            let moved = poincare_ratio(&g, &f.translated(&shift), &q).unwrap().ratio;
            let grown = poincare_ratio(&g, &f.scaled(t), &q).unwrap().ratio;
            prop_assert!((moved - base).abs() <= 1e-9 * base);
            prop_assert!((grown - base).abs() <= 1e-9 * base);
        }

        #[test]
        fn norm_domination(values in small_field(), p in 1f64..3.0) {
            // ‖·‖₂ <= ‖·‖₁ <= √2 ‖·‖₂ on R².
            let g = named::petersen();
            let f = VectorField::new(10, 2, values).unwrap();
            prop_assume!(!f.is_constant());
            let a = poincare_ratio(&g, &f, &PoincareQuery::new(UncondNorm::lq(2.0).unwrap(), p).unwrap()).unwrap().ratio;
            let b = poincare_ratio(&g, &f, &PoincareQuery::new(UncondNorm::lq(1.0).unwrap(), p).unwrap()).unwrap().ratio;
            let c = 2f64.sqrt().powf(2.0 * p);
            prop_assert!(b <= a * c * (1.0 + 1e-12) && a <= b * c * (1.0 + 1e-12));
        }
    }
}
