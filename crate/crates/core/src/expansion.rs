//! Checking, falsifying and fitting the long-range expansion property.
//!
//! Part A asks that balls grow like `α(d−1)^ℓ|S|` until they cover `3n/4`.
//! Part B asks that for each admissible `(S, ℓ)` some vertex of `S` sees few
//! of the edges that are popular among `S` at radius `ℓ − 1`.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{paper_alpha, paper_l, PAPER_EPS};
use crate::error::{Error, Result};
use crate::graph::{ball, ball_profile, bfs_within, Edge, RegularGraph};
use crate::logscalar::LogScalar;
use crate::spectral::{cheeger_exact, friedman_check, CHEEGER_EXACT_LIMIT};

/// Largest `n` for exhaustive subset scans.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpanParams {
    pub alpha: LogScalar,
    pub eps: f64,
    pub l: LogScalar,
}

impl ExpanParams {
    pub fn new(alpha: LogScalar, eps: f64, l: LogScalar) -> Result<Self> {
        if !(alpha.is_positive() && alpha <= LogScalar::ONE) {
            return Err(Error::InvalidParameter(format!("α = {alpha} not in (0, 1]")));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!("ε = {eps} not in (0, 1]")));
        }
        if l < LogScalar::ONE {
            return Err(Error::InvalidParameter(format!("L = {l} must be at least 1")));
        }
        Ok(Self { alpha, eps, l })
    }

    /// `α(d)`, `ε = 0.2`, `L = 24/α(d)`.
    pub fn paper(d: usize) -> Self {
        Self { alpha: paper_alpha(d), eps: PAPER_EPS, l: paper_l(d) }
    }

    /// `L(d−1−ε)^ℓ`.
    pub fn popularity_threshold(&self, d: usize, radius: usize) -> LogScalar {
        self.l * LogScalar::from((d - 1) as f64 - self.eps).powi(radius as i64)
    }

    /// `α(d−1)^{ℓ−1}|S| <= 3n/4`.
    pub fn part_b_admissible(&self, n: usize, d: usize, radius: usize, set_size: usize) -> bool {
        let grown = self.alpha * LogScalar::from((d - 1) as f64).powi(radius as i64 - 1) * LogScalar::from(set_size);
        grown <= LogScalar::from(0.75 * n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Sampled,
    SufficientCondition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// Sampled search found no violation.
    NotFalsified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `|B(S,ℓ)| < min{3n/4, α(d−1)^ℓ|S|}`.
    BallTooSmall { set: Vec<usize>, radius: usize, ball: usize, threshold: LogScalar },
    /// Every `v ∈ S` sees more than `threshold` popular edges.
    CrowdedPopularEdges {
        set: Vec<usize>,
        radius: usize,
        threshold: LogScalar,
        popular: Vec<Edge>,
        /// Popular edges within `ℓ − 1` of each vertex of `set`.
        seen: Vec<usize>,
    },
    /// Part-B instance passes at this vertex.
    Vertex { vertex: usize, seen: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanVerdict {
    pub part: Part,
    pub mode: Mode,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    /// `(S, ℓ)` instances examined.
    pub instances: u64,
    pub note: Option<String>,
}

impl ExpanVerdict {
    fn new(part: Part, mode: Mode, outcome: Outcome) -> Self {
        Self { part, mode, outcome, witness: None, instances: 0, note: None }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }
}

fn require_exhaustive(g: &RegularGraph, what: &'static str) -> Result<()> {
    if g.n() > EXHAUSTIVE_LIMIT {
        return Err(Error::SizeLimit { what, size: g.n(), max: EXHAUSTIVE_LIMIT, hint: "use the sampled mode" });
    }
    Ok(())
}

fn check_alpha(alpha: LogScalar) -> Result<()> {
    if !(alpha.is_positive() && alpha <= LogScalar::ONE) {
        return Err(Error::InvalidParameter(format!("α = {alpha} not in (0, 1]")));
    }
    Ok(())
}

/// `min{3n/4, α(d−1)^ℓ|S|}`.
pub fn part_a_threshold(n: usize, d: usize, alpha: LogScalar, radius: usize, set_size: usize) -> LogScalar {
    let grown = alpha * LogScalar::from((d - 1) as f64).powi(radius as i64) * LogScalar::from(set_size);
    grown.min(LogScalar::from(0.75 * n as f64))
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

fn expand(masks: &[u64], set: u64) -> u64 {
    bits(set).fold(set, |acc, v| acc | masks[v])
}

/// Nonempty subsets of `[n]` ordered by size, then by rank.
fn subsets_by_size(n: usize) -> impl Iterator<Item = u64> {
    (1..=n).flat_map(move |k| {
        let limit = 1u64 << n;
        let mut cur = (1u64 << k) - 1;
        std::iter::from_fn(move || {
            if cur >= limit {
                return None;
            }
            let out = cur;
            // Gosper's hack: next subset with the same popcount.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            cur = (((r ^ cur) >> 2) / c) | r;
            Some(out)
        })
    })
}

fn mask_to_set(m: u64) -> Vec<usize> {
    bits(m).collect()
}

/// Ball sizes `|B(S,ℓ)|` for `ℓ = 1..=max_radius` from a bitmask.
fn mask_profile(masks: &[u64], set: u64, max_radius: usize, out: &mut Vec<usize>) {
    out.clear();
    let mut b = set;
    for _ in 0..max_radius {
        let next = expand(masks, b);
        b = next;
        out.push(b.count_ones() as usize);
    }
}

/// Exhaustive part A over all nonempty `S` and `ℓ ∈ [1, n]`. A failure
/// carries the witness with smallest `|S|`, then subset rank, then `ℓ`.
#[allow(non_snake_case)]
pub fn partA_check_exact(g: &RegularGraph, alpha: LogScalar) -> Result<ExpanVerdict> {
    require_exhaustive(g, "partA_check_exact")?;
    check_alpha(alpha)?;
    let (n, d) = (g.n(), g.d());
    let masks = g.neighbor_masks();
    let mut verdict = ExpanVerdict::new(Part::A, Mode::Exact, Outcome::Pass);
    let mut profile = Vec::with_capacity(n);
    for s in subsets_by_size(n) {
        let size = s.count_ones() as usize;
        mask_profile(&masks, s, n, &mut profile);
        for (i, &b) in profile.iter().enumerate() {
            verdict.instances += 1;
            let thr = part_a_threshold(n, d, alpha, i + 1, size);
            if !thr.count_meets(b) {
                verdict.outcome = Outcome::Fail;
                verdict.witness =
                    Some(Witness::BallTooSmall { set: mask_to_set(s), radius: i + 1, ball: b, threshold: thr });
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

fn random_probe<R: Rng + ?Sized>(g: &RegularGraph, rng: &mut R) -> Vec<usize> {
    let n = g.n();
    let roll: f64 = rng.gen();
    if roll < 0.25 {
        vec![rng.gen_range(0..n)]
    } else if roll < 0.5 {
        let center = rng.gen_range(0..n);
        let radius = rng.gen_range(0..=3);
        ball(g, &[center], radius).expect("center in range")
    } else {
        let k = rng.gen_range(1..=n);
        let mut s = sample(rng, n, k).into_vec();
        s.sort_unstable();
        s
    }
}

/// Falsification search for part A: singletons, BFS balls and random subsets
/// (one quarter, one quarter, one half). A violation is a definitive `Fail`;
/// otherwise the outcome is `NotFalsified`.
#[allow(non_snake_case)]
pub fn partA_check_sampled<R: Rng + ?Sized>(
    g: &RegularGraph,
    alpha: LogScalar,
    trials: usize,
    rng: &mut R,
) -> Result<ExpanVerdict> {
    check_alpha(alpha)?;
    let (n, d) = (g.n(), g.d());
    let mut verdict = ExpanVerdict::new(Part::A, Mode::Sampled, Outcome::NotFalsified);
    for _ in 0..trials {
        let s = random_probe(g, rng);
        let profile = ball_profile(g, &s, n);
        for radius in 1..=n {
            verdict.instances += 1;
            let b = profile[radius];
            let thr = part_a_threshold(n, d, alpha, radius, s.len());
            if !thr.count_meets(b) {
                verdict.outcome = Outcome::Fail;
                verdict.witness = Some(Witness::BallTooSmall { set: s, radius, ball: b, threshold: thr });
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

/// Largest `α <= 1` for which exhaustive part A passes.
#[allow(non_snake_case)]
pub fn partA_fit_alpha(g: &RegularGraph) -> Result<LogScalar> {
    require_exhaustive(g, "partA_fit_alpha")?;
    let n = g.n();
    let ln_dm1 = ((g.d() - 1) as f64).ln();
    let cap = 0.75 * n as f64;
    let masks = g.neighbor_masks();
    let mut best = 0.0f64;
    let mut profile = Vec::with_capacity(n);
    for s in subsets_by_size(n) {
        let ln_s = (s.count_ones() as f64).ln();
        mask_profile(&masks, s, n, &mut profile);
        for (i, &b) in profile.iter().enumerate() {
            if (b as f64) < cap {
                best = best.min((b as f64).ln() - (i + 1) as f64 * ln_dm1 - ln_s);
            }
        }
    }
    Ok(LogScalar::from_ln(best))
}

/// Estimate of the largest passing `α` from every singleton plus `trials`
/// random probes. Only sets actually probed constrain it, so this is an
/// upper estimate of the exhaustive value.
#[allow(non_snake_case)]
pub fn partA_fit_alpha_sampled<R: Rng + ?Sized>(g: &RegularGraph, trials: usize, rng: &mut R) -> Result<LogScalar> {
    let n = g.n();
    let ln_dm1 = ((g.d() - 1) as f64).ln();
    let cap = 0.75 * n as f64;
    let mut best = 0.0f64;
    let mut fold = |s: &[usize]| {
        let ln_s = (s.len() as f64).ln();
        let profile = ball_profile(g, s, n);
        for (radius, &b) in profile.iter().enumerate().skip(1) {
            if (b as f64) < cap {
                best = best.min((b as f64).ln() - radius as f64 * ln_dm1 - ln_s);
            }
        }
    };
    for v in 0..n {
        fold(&[v]);
    }
    for _ in 0..trials {
        fold(&random_probe(g, rng));
    }
    Ok(LogScalar::from_ln(best))
}

/// Edge ids incident to each vertex.
fn incident_edges(g: &RegularGraph) -> Vec<Vec<usize>> {
    let mut inc = vec![Vec::with_capacity(g.d()); g.n()];
    for (id, e) in g.edges().iter().enumerate() {
        inc[e.lo].push(id);
        inc[e.hi].push(id);
    }
    inc
}

/// Ids of edges within distance `radius − 1` of `v`, i.e. incident to the
/// ball of radius `radius − 1`.
fn near_edges(g: &RegularGraph, inc: &[Vec<usize>], v: usize, radius: usize, stamp: &mut [u32], tag: u32) -> Vec<usize> {
    let dist = bfs_within(g, &[v], radius - 1);
    let mut out = Vec::new();
    for (w, dw) in dist.iter().enumerate() {
        if dw.is_some() {
            for &id in &inc[w] {
                if stamp[id] != tag {
                    stamp[id] = tag;
                    out.push(id);
                }
            }
        }
    }
    out
}

/// Per-vertex near-edge lists for `s` at `radius`, plus per-edge counts.
struct PopularityTable {
    near: Vec<Vec<usize>>,
    counts: Vec<usize>,
}

fn popularity(g: &RegularGraph, s: &[usize], radius: usize) -> PopularityTable {
    let inc = incident_edges(g);
    let mut stamp = vec![0u32; g.edges().len()];
    let mut counts = vec![0usize; g.edges().len()];
    let near: Vec<Vec<usize>> = s
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let ids = near_edges(g, &inc, v, radius, &mut stamp, i as u32 + 1);
            ids.iter().for_each(|&id| counts[id] += 1);
            ids
        })
        .collect();
    PopularityTable { near, counts }
}

/// Slack used to step just above an integer level.
const ABOVE: f64 = 1e-9;

/// Smallest popularity threshold `τ` at which some vertex sees at most `τ`
/// edges of `T = {e : count(e) >= τ}`. Between consecutive integers `x − 1`
/// and `x` the set `T` is fixed, so the candidates in increasing order are
/// the open interval `(x − 1, x)` and then `τ = x`; passing is monotone in
/// `τ`. An open-interval answer is returned as `(x − 1)(1 + 1e−9)`.
fn min_passing_threshold(table: &PopularityTable, set_size: usize) -> f64 {
    // Candidate 2x − 1 is the interval (x − 1, x), candidate 2x is τ = x.
    let passes = |cand: usize| {
        let x = (cand + 1) / 2;
        let slack = if cand % 2 == 1 { x - 1 } else { x };
        table.near.iter().any(|ids| ids.iter().filter(|&&id| table.counts[id] >= x).count() <= slack)
    };
    let (mut lo, mut hi) = (1usize, 2 * (set_size + 1) - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let x = (lo + 1) / 2;
    if lo % 2 == 1 {
        (x - 1) as f64 * (1.0 + ABOVE)
    } else {
        x as f64
    }
}

fn validate_set(g: &RegularGraph, s: &[usize]) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Err(Error::EmptySet("S"));
    }
    for &v in s {
        g.check_vertex(v)?;
    }
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// One part-B instance. Requires `α(d−1)^{ℓ−1}|S| <= 3n/4`.
#[allow(non_snake_case)]
pub fn partB_check_instance(g: &RegularGraph, s: &[usize], radius: usize, params: &ExpanParams) -> Result<ExpanVerdict> {
    let s = validate_set(g, s)?;
    if radius == 0 {
        return Err(Error::InvalidParameter("ℓ must be a positive integer".into()));
    }
    if !params.part_b_admissible(g.n(), g.d(), radius, s.len()) {
        return Err(Error::Precondition(format!(
            "α(d−1)^(ℓ−1)|S| exceeds 3n/4 at ℓ = {radius}, |S| = {}",
            s.len()
        )));
    }
    let thr = params.popularity_threshold(g.d(), radius);
    let mut verdict = ExpanVerdict::new(Part::B, Mode::Exact, Outcome::Pass);
    verdict.instances = 1;
    // No edge is near more than |S| vertices of S, so T is empty.
    if !thr.count_meets(s.len()) {
        verdict.witness = Some(Witness::Vertex { vertex: s[0], seen: 0 });
        verdict.note = Some("threshold exceeds |S|; T is empty".into());
        return Ok(verdict);
    }
    let table = popularity(g, &s, radius);
    let popular: Vec<bool> = table.counts.iter().map(|&c| c > 0 && thr.count_meets(c)).collect();
    let seen: Vec<usize> = table.near.iter().map(|ids| ids.iter().filter(|&&id| popular[id]).count()).collect();
    if let Some(i) = seen.iter().position(|&c| thr.count_within(c)) {
        verdict.witness = Some(Witness::Vertex { vertex: s[i], seen: seen[i] });
        return Ok(verdict);
    }
    verdict.outcome = Outcome::Fail;
    verdict.witness = Some(Witness::CrowdedPopularEdges {
        set: s,
        radius,
        threshold: thr,
        popular: g.edges().iter().zip(&popular).filter(|(_, &p)| p).map(|(e, _)| *e).collect(),
        seen,
    });
    Ok(verdict)
}

/// Smallest `L >= 1` at which the part-B instance `(S, ℓ)` passes for the
/// given `ε`.
#[allow(non_snake_case)]
pub fn partB_min_l(g: &RegularGraph, s: &[usize], radius: usize, eps: f64) -> Result<LogScalar> {
    let s = validate_set(g, s)?;
    if radius == 0 {
        return Err(Error::InvalidParameter("ℓ must be a positive integer".into()));
    }
    let table = popularity(g, &s, radius);
    let tau = min_passing_threshold(&table, s.len());
    let growth = LogScalar::from((g.d() - 1) as f64 - eps).powi(radius as i64);
    Ok((LogScalar::from(tau) / growth).max(LogScalar::ONE))
}

/// Part B over every nonempty `S` and every admissible `ℓ <= n`.
#[allow(non_snake_case)]
pub fn partB_check_exact(g: &RegularGraph, params: &ExpanParams) -> Result<ExpanVerdict> {
    require_exhaustive(g, "partB_check_exact")?;
    let (n, d) = (g.n(), g.d());
    let mut verdict = ExpanVerdict::new(Part::B, Mode::Exact, Outcome::Pass);
    for radius in 1..=n {
        let admissible_sizes: Vec<usize> =
            (1..=n).filter(|&k| params.part_b_admissible(n, d, radius, k)).collect();
        let Some(&max_size) = admissible_sizes.last() else { break };
        let thr = params.popularity_threshold(d, radius);
        if !thr.count_meets(max_size) {
            // T is empty for every admissible S at this radius.
            verdict.instances += admissible_sizes.iter().map(|&k| binomial(n, k)).sum::<u64>();
            continue;
        }
        for s in subsets_by_size(n).take_while(|m| m.count_ones() as usize <= max_size) {
            let set = mask_to_set(s);
            let v = partB_check_instance(g, &set, radius, params)?;
            verdict.instances += 1;
            if v.failed() {
                verdict.outcome = Outcome::Fail;
                verdict.witness = v.witness;
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Spectral sufficient condition: for `d >= 6`, `λ(G) <= 2.1√(d−1)` gives
/// part B at `α(d)`, `ε = 0.2`, `L = 24/α(d)`.
#[allow(non_snake_case)]
pub fn partB_spectral_sufficient(g: &RegularGraph) -> Result<ExpanVerdict> {
    if g.d() < 6 {
        return Err(Error::InvalidParameter(format!("the spectral condition needs d >= 6, got {}", g.d())));
    }
    let f = friedman_check(g, 0.0)?;
    let outcome = if f.passes_strong { Outcome::Pass } else { Outcome::Inconclusive };
    let mut verdict = ExpanVerdict::new(Part::B, Mode::SufficientCondition, outcome);
    verdict.note = Some(format!(
        "λ(G) = {:.6} vs 2.1√(d−1) = {:.6}; parameters α(d), ε = 0.2, L = 24/α(d)",
        f.lambda, f.strong_threshold
    ));
    Ok(verdict)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoubleCountReport {
    pub popular_edges: usize,
    /// `|S| d/(L(d−2)) ((d−1)/(d−1−ε))^ℓ`.
    pub bound: LogScalar,
    pub holds: bool,
}

/// `|T| <= |S| d/(L(d−2)) ((d−1)/(d−1−ε))^ℓ`.
pub fn fact510_bound_check(g: &RegularGraph, s: &[usize], radius: usize, params: &ExpanParams) -> Result<DoubleCountReport> {
    let s = validate_set(g, s)?;
    if radius == 0 {
        return Err(Error::InvalidParameter("ℓ must be a positive integer".into()));
    }
    let d = g.d() as f64;
    let thr = params.popularity_threshold(g.d(), radius);
    let popular_edges = if !thr.count_meets(s.len()) {
        0
    } else {
        popularity(g, &s, radius).counts.iter().filter(|&&c| c > 0 && thr.count_meets(c)).count()
    };
    let bound = LogScalar::from(s.len()) * LogScalar::from(d / (d - 2.0)) / params.l
        * LogScalar::from((d - 1.0) / (d - 1.0 - params.eps)).powi(radius as i64);
    Ok(DoubleCountReport { popular_edges, bound, holds: bound.count_within(popular_edges) })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheegerGrowthReport {
    pub delta: f64,
    /// `⌈log_{1.0016}(3/(4δ))⌉`.
    pub ell_star: usize,
    /// `(1.0016/(d−1))^{ℓ*}`.
    pub gamma: LogScalar,
    pub h: f64,
    pub hypothesis_holds: bool,
    pub exhaustive: bool,
    pub sets_checked: u64,
    pub conclusion_holds: bool,
    pub witness: Option<Witness>,
}

/// `ℓ*(δ)` and `γ(δ)` at degree `d`.
pub fn cheeger_growth_parameters(delta: f64, d: usize) -> Result<(usize, LogScalar)> {
    if !(delta > 0.0 && delta < 0.75) {
        return Err(Error::InvalidParameter(format!("δ = {delta} not in (0, 3/4)")));
    }
    let ell_star = ((3.0 / (4.0 * delta)).ln() / 1.0016f64.ln()).ceil() as usize;
    let gamma = LogScalar::from(1.0016 / (d - 1) as f64).powi(ell_star as i64);
    Ok((ell_star, gamma))
}

const CHEEGER_GROWTH_SAMPLES: usize = 4096;

/// Ball growth for every `A` with `|A| >= δn` under `h(G) >= 0.0048d`:
/// `|B(A,ℓ)| >= min{3n/4, γ(d−1)^ℓ|A|}` for `ℓ` up to `max(n, ℓ*+1)`.
/// Exhaustive for `n <= 20`; `4096` seeded random sets for `n <= 24`.
pub fn lemcheeger_check(g: &RegularGraph, delta: f64) -> Result<CheegerGrowthReport> {
    let (n, d) = (g.n(), g.d());
    let (ell_star, gamma) = cheeger_growth_parameters(delta, d)?;
    if n > CHEEGER_EXACT_LIMIT {
        return Err(Error::Precondition(format!(
            "h(G) >= 0.0048d cannot be verified exactly for n = {n} > {CHEEGER_EXACT_LIMIT}"
        )));
    }
    let h = cheeger_exact(g)?.value;
    let hypothesis_holds = h >= 0.0048 * d as f64;
    let max_radius = n.max(ell_star + 1);
    let min_size = (delta * n as f64).ceil() as usize;
    let masks = g.neighbor_masks();
    let mut report = CheegerGrowthReport {
        delta,
        ell_star,
        gamma,
        h,
        hypothesis_holds,
        exhaustive: n <= EXHAUSTIVE_LIMIT,
        sets_checked: 0,
        conclusion_holds: true,
        witness: None,
    };
    let mut profile = Vec::new();
    let mut check = |s: u64, report: &mut CheegerGrowthReport| {
        let size = s.count_ones() as usize;
        report.sets_checked += 1;
        mask_profile(&masks, s, max_radius, &mut profile);
        for (i, &b) in profile.iter().enumerate() {
            let thr = part_a_threshold(n, d, gamma, i + 1, size);
            if !thr.count_meets(b) {
                report.conclusion_holds = false;
                report.witness = Some(Witness::BallTooSmall { set: mask_to_set(s), radius: i + 1, ball: b, threshold: thr });
                return false;
            }
        }
        true
    };
    if report.exhaustive {
        for s in subsets_by_size(n).skip_while(|m| (m.count_ones() as usize) < min_size.max(1)) {
            if !check(s, &mut report) {
                break;
            }
        }
    } else {
        let mut rng = crate::rng::RngState::new(0).rng();
        for _ in 0..CHEEGER_GROWTH_SAMPLES {
            let k = rng.gen_range(min_size.max(1)..=n);
            let s = sample(&mut rng, n, k).into_iter().fold(0u64, |m, v| m | 1 << v);
            if !check(s, &mut report) {
                break;
            }
        }
    }
    Ok(report)
}
