//! Mutual supports, the dyadic dichotomy, and the final recombination into
//! a Poincaré inequality for one concrete field.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encode::{binary_encode, median_translate, BinaryField};
use super::greedy::{const_params, greedy_for_class, GreedyFamily};
use super::scales::{scale_index_with, JumpIndex, ScaleIndex};
use crate::constants::{
    binary_poincare, dichotomy_fraction, edge_fraction, extrapolated_bound, recombination_fraction, real_field_bound,
    scale_weight,
};
use crate::error::{Error, Result};
use crate::expansion::{partA_fit_alpha, partA_fit_alpha_sampled, partB_min_l, ExpanParams, EXHAUSTIVE_LIMIT};
use crate::graph::RegularGraph;
use crate::logscalar::LogScalar;
use crate::norms::{eval_norm, prop33_check, RestrictedFamily, UncondNorm};
use crate::poincare::VectorField;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSupport {
    pub edge: usize,
    /// `J(v, ℓ, e)`.
    pub coords: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSupport {
    pub v: usize,
    pub level: usize,
    /// `J(v, ℓ)`.
    pub coords: Vec<usize>,
    /// Edges with nonempty `J(v, ℓ, e)`, ascending.
    pub edges: Vec<EdgeSupport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Supports {
    /// Sorted by `(v, level)`.
    pub entries: Vec<VertexSupport>,
    /// Largest `|{v : j ∈ J(v, ℓ, e)}|` over `(j, ℓ, e)`.
    pub max_share: usize,
    /// `(j, ℓ, e, count)` above `2L̃(d−1−ε)^ℓ`.
    pub share_failures: Vec<(usize, usize, usize, usize)>,
}

impl Supports {
    pub fn get(&self, v: usize, level: usize) -> Option<&VertexSupport> {
        self.entries.binary_search_by(|s| (s.v, s.level).cmp(&(v, level))).ok().map(|i| &self.entries[i])
    }
}

/// Everything the recombination needs from the scale and greedy stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleLedger {
    pub params: ExpanParams,
    pub scales: ScaleIndex,
    pub families: Vec<GreedyFamily>,
    pub supports: Supports,
}

impl ScaleLedger {
    pub fn levels(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.scales.classes.iter().map(|c| c.level).collect();
        l.sort_unstable();
        l.dedup();
        l
    }

    /// Every kept edge lies within distance `ℓ − 1` of its vertex,
    /// rechecked from scratch with a BFS per vertex.
    pub fn distances_consistent(&self, g: &RegularGraph) -> bool {
        self.families.iter().all(|fam| {
            fam.selected.iter().all(|s| {
                let from = crate::graph::bfs_distances(g, &[s.v]);
                s.edges.iter().all(|&e| {
                    crate::graph::edge_distance(&from, g.edges()[e]).is_some_and(|d| d < fam.level)
                })
            })
        })
    }
}

/// Scales, greedy families and supports for `f` at `params`.
pub fn build_ledger(g: &RegularGraph, f: &BinaryField, params: &ExpanParams) -> Result<ScaleLedger> {
    let idx = JumpIndex::new(g, f)?;
    build_ledger_with(&idx, f, params)
}

fn build_ledger_with(idx: &JumpIndex, f: &BinaryField, params: &ExpanParams) -> Result<ScaleLedger> {
    let scales = scale_index_with(idx, f, params.alpha)?;
    let families = scales.classes.iter().map(|c| greedy_for_class(idx, c, params)).collect::<Result<Vec<_>>>()?;
    let supports = supports_from(idx, f, &scales, &families, params)?;
    Ok(ScaleLedger { params: *params, scales, families, supports })
}

fn supports_from(
    idx: &JumpIndex,
    f: &BinaryField,
    scales: &ScaleIndex,
    families: &[GreedyFamily],
    params: &ExpanParams,
) -> Result<Supports> {
    let mut entries: Vec<VertexSupport> = Vec::new();
    for e in &scales.levels {
        match entries.iter_mut().rev().find(|s| s.v == e.v && s.level == e.level) {
            Some(s) => s.coords.push(e.j),
            None => entries.push(VertexSupport { v: e.v, level: e.level, coords: vec![e.j], edges: Vec::new() }),
        }
    }
    entries.sort_by_key(|s| (s.v, s.level));
    entries.iter_mut().for_each(|s| s.coords.sort_unstable());
    let mut pairs: Vec<(usize, usize, usize, usize)> = Vec::new();
    for fam in families {
        for sel in &fam.selected {
            pairs.extend(sel.edges.iter().map(|&e| (sel.v, fam.level, e, fam.j)));
        }
    }
    pairs.sort_unstable();
    for (v, level, e, j) in pairs {
        let i = entries.binary_search_by(|s| (s.v, s.level).cmp(&(v, level))).expect("support entry");
        let s = &mut entries[i];
        match s.edges.last_mut() {
            Some(es) if es.edge == e => es.coords.push(j),
            _ => s.edges.push(EdgeSupport { edge: e, coords: vec![j] }),
        }
    }
    // |{v : j ∈ J(v, ℓ, e)}| sums the multiplicities of both sign classes.
    let mut share: Vec<(usize, usize, usize)> = Vec::new();
    for fam in families {
        for sel in &fam.selected {
            share.extend(sel.edges.iter().map(|&e| (fam.j, fam.level, e)));
        }
    }
    share.sort_unstable();
    let d = idx.d();
    let lt = crate::constants::ltilde(&const_params(params, d, 2.0, 1.0))?;
    let mut max_share = 0;
    let mut share_failures = Vec::new();
    let mut i = 0;
    while i < share.len() {
        let mut end = i;
        while end < share.len() && share[end] == share[i] {
            end += 1;
        }
        let (j, level, e) = share[i];
        let count = end - i;
        max_share = max_share.max(count);
        let bound = LogScalar::from(2.0) * lt * LogScalar::from((d - 1) as f64 - params.eps).powi(level as i64);
        if !bound.count_within(count) {
            share_failures.push((j, level, e, count));
        }
        i = end;
    }
    debug_assert!(entries.iter().all(|s| s.coords.iter().all(|&j| f.get(s.v, j) != 0)));
    Ok(Supports { entries, max_share, share_failures })
}

/// `J(v, ℓ)` and `J(v, ℓ, e)` from a built ledger.
pub fn mutual_supports(ledger: &ScaleLedger) -> &Supports {
    &ledger.supports
}

fn indicator(k: usize, coords: &[usize]) -> Vec<f64> {
    let mut x = vec![0.0; k];
    coords.iter().for_each(|&j| x[j] = 1.0);
    x
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpreadReport {
    pub v: usize,
    pub level: usize,
    pub b: i32,
    /// Edges with `‖χ_{J(v,ℓ,e)}‖ >= c a_ℓ 2^b`.
    pub qualifying: usize,
    /// `c a_ℓ (d−1)^ℓ`.
    pub needed: LogScalar,
    pub holds: bool,
}

/// Counts edges `e` with `‖χ_{J(v,ℓ,e)}‖ >= c a_ℓ 2^b` and compares with
/// `c a_ℓ (d−1)^ℓ`, `c = α²/(48d(d−1))`. Needs `‖χ_{J(v,ℓ)}‖ >= 2^b`.
pub fn lemma49_check(
    ledger: &ScaleLedger,
    d: usize,
    k: usize,
    nm: &UncondNorm,
    v: usize,
    level: usize,
    b: i32,
) -> Result<EdgeSpreadReport> {
    let support = ledger.supports.get(v, level).ok_or(Error::EmptySet("J(v, ℓ)"))?;
    let whole = eval_norm(nm, &indicator(k, &support.coords))?;
    let two_b = LogScalar::from(2.0).powi(b as i64);
    if LogScalar::from(whole) < two_b {
        return Err(Error::Precondition(format!("‖χ_J(v,ℓ)‖ = {whole} is below 2^{b}")));
    }
    let c = edge_fraction(&const_params(&ledger.params, d, 2.0, 1.0))?;
    let a = LogScalar::from(scale_weight(level));
    let edge_thr = c * a * two_b;
    let mut qualifying = 0;
    for es in &support.edges {
        if LogScalar::from(eval_norm(nm, &indicator(k, &es.coords))?) >= edge_thr {
            qualifying += 1;
        }
    }
    let needed = c * a * LogScalar::from((d - 1) as f64).powi(level as i64);
    Ok(EdgeSpreadReport { v, level, b, qualifying, needed, holds: needed.count_meets(qualifying) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `M(b, ℓ)` is empty; counted as branch (i).
    Vacuous,
    First,
    Second,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub b: i32,
    pub level: usize,
    pub m_size: usize,
    pub first_count: usize,
    /// `|M| / a_ℓ²`.
    pub first_needed: LogScalar,
    pub first_holds: bool,
    pub second_count: usize,
    /// `ĉ a_ℓ |M|`.
    pub second_needed: LogScalar,
    pub second_holds: bool,
    pub branch: Branch,
    /// Almost-disjoint support bound checks on the edges behind branch (ii).
    pub support_bound_checked: usize,
    pub support_bound_failed: usize,
}

struct Evaluated<'a> {
    ledger: &'a ScaleLedger,
    f: &'a BinaryField,
    nm: &'a UncondNorm,
    d: usize,
    edge_norms: Vec<f64>,
    ends: Vec<(usize, usize)>,
}

impl<'a> Evaluated<'a> {
    fn new(g: &RegularGraph, f: &'a BinaryField, nm: &'a UncondNorm, ledger: &'a ScaleLedger) -> Result<Self> {
        let ends: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.lo, e.hi)).collect();
        let edge_norms = ends
            .iter()
            .map(|&(a, b)| {
                let diff: Vec<f64> = f.at(a).iter().zip(f.at(b)).map(|(x, y)| (x - y) as f64).collect();
                eval_norm(nm, &diff)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { ledger, f, nm, d: g.d(), edge_norms, ends })
    }

    fn support_norm(&self, s: &VertexSupport) -> Result<f64> {
        eval_norm(self.nm, &indicator(self.f.k, &s.coords))
    }

    fn edges_at_least(&self, thr: LogScalar) -> usize {
        self.edge_norms.iter().filter(|&&x| LogScalar::from(x) >= thr).count()
    }

    fn dichotomy(&self, b: i32, level: usize, q: f64, c_cot: f64) -> Result<DichotomyReport> {
        let params = &self.ledger.params;
        let cp = const_params(params, self.d, q, c_cot);
        let chat = dichotomy_fraction(&cp)?;
        let c = edge_fraction(&cp)?;
        let a = LogScalar::from(scale_weight(level));
        let two_b = LogScalar::from(2.0).powi(b as i64);
        let members: Vec<&VertexSupport> = self
            .ledger
            .supports
            .entries
            .iter()
            .filter(|s| s.level == level)
            .map(|s| Ok((s, self.support_norm(s)?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|(_, x)| LogScalar::from(*x) >= two_b)
            .map(|(s, _)| s)
            .collect();
        let m_size = members.len();
        let growth = LogScalar::from((self.d - 1) as f64 / ((self.d - 1) as f64 - params.eps)).powf(level as f64 / q);
        let first_thr = chat * a * two_b;
        let second_thr = chat * a.powi(3) * two_b * growth;
        let first_count = self.edges_at_least(first_thr);
        let second_count = self.edges_at_least(second_thr);
        let first_needed = LogScalar::from(m_size) / a.powi(2);
        let second_needed = chat * a * LogScalar::from(m_size);
        let first_holds = first_needed.count_meets(first_count);
        let second_holds = second_needed.count_meets(second_count);
        let branch = match (m_size, first_holds, second_holds) {
            (0, _, _) => Branch::Vacuous,
            (_, true, _) => Branch::First,
            (_, false, true) => Branch::Second,
            _ => Branch::Neither,
        };
        let mut report = DichotomyReport {
            b,
            level,
            m_size,
            first_count,
            first_needed,
            first_holds,
            second_count,
            second_needed,
            second_holds,
            branch,
            support_bound_checked: 0,
            support_bound_failed: 0,
        };
        if branch == Branch::Second {
            // Edges e shared by many E_v, E_v = {e : ‖χ_{J(v,ℓ,e)}‖ >= c a_ℓ 2^b}.
            let edge_thr = c * a * two_b;
            let mut holders: Vec<(usize, &[usize])> = Vec::new();
            for s in &members {
                for es in &s.edges {
                    if LogScalar::from(eval_norm(self.nm, &indicator(self.f.k, &es.coords))?) >= edge_thr {
                        holders.push((es.edge, &es.coords));
                    }
                }
            }
            holders.sort_by_key(|h| h.0);
            let crowd = c / LogScalar::from(4.0) * a.powi(3) * LogScalar::from((self.d - 1) as f64).powi(level as i64);
            let mut i = 0;
            while i < holders.len() {
                let e = holders[i].0;
                let end = i + holders[i..].iter().take_while(|h| h.0 == e).count();
                if crowd.count_meets(end - i) {
                    let sets: Vec<Vec<usize>> = holders[i..end].iter().map(|h| h.1.to_vec()).collect();
                    let (w, w2) = self.ends[e];
                    let x: Vec<f64> =
                        self.f.at(w).iter().zip(self.f.at(w2)).map(|(p, r)| ((p - r) as f64).abs()).collect();
                    let mut fam = RestrictedFamily { x, sets, delta: 1.0 };
                    let floor = fam
                        .projections()
                        .iter()
                        .map(|p| eval_norm(self.nm, p))
                        .collect::<Result<Vec<f64>>>()?
                        .into_iter()
                        .fold(f64::INFINITY, f64::min);
                    fam.x.iter_mut().for_each(|v| *v /= floor);
                    fam.delta = fam.max_overlap() as f64 / fam.sets.len() as f64;
                    report.support_bound_checked += 1;
                    if !prop33_check(self.nm, &fam, q, c_cot)?.holds {
                        report.support_bound_failed += 1;
                    }
                }
                i = end;
            }
        }
        Ok(report)
    }

    /// Dyadic levels `⌊log₂ ‖χ_{J(v,ℓ)}‖⌋` attained at scale `ℓ`.
    fn dyadic_levels(&self, level: usize) -> Result<Vec<i32>> {
        let mut bs = Vec::new();
        for s in self.ledger.supports.entries.iter().filter(|s| s.level == level) {
            bs.push(self.support_norm(s)?.log2().floor() as i32);
        }
        bs.sort_unstable();
        bs.dedup();
        Ok(bs)
    }
}

/// Both branch predicates at `(b, ℓ)`, with branch (ii) backed by the
/// almost-disjoint support bound on each edge behind it.
pub fn dichotomy_check(
    ledger: &ScaleLedger,
    g: &RegularGraph,
    f: &BinaryField,
    nm: &UncondNorm,
    b: i32,
    level: usize,
    q: f64,
    c: f64,
) -> Result<DichotomyReport> {
    Evaluated::new(g, f, nm, ledger)?.dichotomy(b, level, q, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamMode {
    Paper,
    Fitted,
    Given,
}

/// The field as certified: real inputs are median-translated and encoded.
#[derive(Debug, Clone)]
pub enum CertInput {
    Binary(BinaryField),
    Real(VectorField),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodingSummary {
    pub delta: f64,
    pub m: usize,
    pub encoded_dim: usize,
    pub mass_holds: bool,
    pub edges_hold: bool,
}

/// A binary field and norm ready for the pipeline.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub binary: BinaryField,
    pub norm: UncondNorm,
    /// Median-translated real field, when the input was real.
    pub real: Option<VectorField>,
    pub median_shift: Option<Vec<f64>>,
    pub encoding: Option<EncodingSummary>,
    pub source_norm: UncondNorm,
}

pub fn prepare(g: &RegularGraph, input: &CertInput, nm: &UncondNorm) -> Result<Prepared> {
    match input {
        CertInput::Binary(f) => {
            if f.n != g.n() {
                return Err(Error::DimensionMismatch { expected: g.n(), got: f.n });
            }
            if f.is_zero() {
                return Err(Error::Precondition("f must not be identically zero".into()));
            }
            let bad = f.median_violations();
            if !bad.is_empty() {
                return Err(Error::Precondition(format!("0 is not an empirical median in coordinates {bad:?}")));
            }
            Ok(Prepared {
                binary: f.clone(),
                norm: nm.clone(),
                real: None,
                median_shift: None,
                encoding: None,
                source_norm: nm.clone(),
            })
        }
        CertInput::Real(f) => {
            if f.is_constant() {
                return Err(Error::Degenerate("f must be non-constant".into()));
            }
            let (shifted, med) = median_translate(f)?;
            let enc = binary_encode(g, &shifted, nm)?;
            let summary = EncodingSummary {
                delta: enc.delta,
                m: enc.m,
                encoded_dim: enc.field.k,
                mass_holds: enc.mass_holds,
                edges_hold: enc.edges_hold,
            };
            Ok(Prepared {
                binary: enc.field,
                norm: enc.lifted_norm,
                real: Some(shifted),
                median_shift: Some(med),
                encoding: Some(summary),
                source_norm: nm.clone(),
            })
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedParams {
    pub params: ExpanParams,
    /// `α` from the exhaustive fit rather than sampled probes.
    pub alpha_exact: bool,
    pub alpha_probes: usize,
    /// Doublings of `L` before every greedy selection succeeded.
    pub l_doublings: usize,
}

/// Largest `α` from part A, then the least `L` (up to doubling) at which the
/// greedy selection runs through on this field, at fixed `ε`.
pub fn fit_params<R: Rng + ?Sized>(
    g: &RegularGraph,
    f: &BinaryField,
    eps: f64,
    probes: usize,
    rng: &mut R,
) -> Result<FittedParams> {
    let alpha_exact = g.n() <= EXHAUSTIVE_LIMIT;
    let alpha = if alpha_exact { partA_fit_alpha(g)? } else { partA_fit_alpha_sampled(g, probes, rng)? };
    let alpha = alpha.min(LogScalar::ONE);
    let idx = JumpIndex::new(g, f)?;
    let scales = scale_index_with(&idx, f, alpha)?;
    let mut l = LogScalar::ONE;
    for class in &scales.classes {
        l = l.max(partB_min_l(g, &class.vertices, class.level, eps)?);
    }
    for l_doublings in 0..64 {
        let params = ExpanParams::new(alpha, eps, l)?;
        match build_ledger_with(&idx, f, &params) {
            Ok(_) => return Ok(FittedParams { params, alpha_exact, alpha_probes: probes, l_doublings }),
            Err(Error::Falsified { lemma: "part B", .. }) => l = l * LogScalar::from(2.0),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Resource { what: "fit_params", detail: "L doubled 64 times without a passing selection".into() })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySummary {
    pub j: usize,
    pub level: usize,
    pub sign: i8,
    pub vertices: usize,
    pub wholesale: bool,
    pub crossover: u64,
    pub min_kept: usize,
    pub large_enough: bool,
    pub shares_ok: bool,
    pub max_multiplicity: usize,
    pub multiplicity_bound: LogScalar,
    pub multiplicity_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleRecombination {
    pub level: usize,
    /// `Σ_v ‖P_{J(v,ℓ)} f(v)‖`.
    pub mass: f64,
    /// `4 Σ_edges ‖Δf‖`.
    pub edge_side: f64,
    /// `(c′/a_ℓ) · mass`.
    pub needed: LogScalar,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Extrapolation {
    pub p: f64,
    /// `Σ_v ‖f(v)‖^p`.
    pub vertex_side: f64,
    /// `Σ_edges ‖Δf‖^p`.
    pub edge_side: f64,
    pub ratio: f64,
    /// `(3Π/2)^p d^{p−1} max{2,p}^p`.
    pub bound: LogScalar,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealBound {
    pub ratio: f64,
    /// `3Π/2`.
    pub bound: LogScalar,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckFailure {
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertReport {
    pub mode: ParamMode,
    pub params: ExpanParams,
    pub fitted: Option<FittedParams>,
    pub q: f64,
    pub c: f64,
    pub p: f64,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub median_shift: Option<Vec<f64>>,
    pub encoding: Option<EncodingSummary>,
    pub scale_entries: usize,
    pub max_level: usize,
    pub families: Vec<FamilySummary>,
    pub support_max_share: usize,
    pub edge_spread_checked: usize,
    pub edge_spread_failed: usize,
    pub dichotomy: Vec<DichotomyReport>,
    pub per_scale: Vec<ScaleRecombination>,
    /// `Σ_v ‖f(v)‖ <= Σ_ℓ Σ_v ‖P_{J(v,ℓ)} f(v)‖`.
    pub triangle_holds: bool,
    pub vertex_sum: f64,
    pub edge_sum: f64,
    pub ratio: f64,
    pub pi: LogScalar,
    /// `4/c′`, the constant the recombination actually produces.
    pub four_over_cprime: LogScalar,
    pub bound_holds: bool,
    pub real_bound: Option<RealBound>,
    pub extrapolation: Option<Extrapolation>,
    /// Selection-time sharing and final multiplicity bounds all hold.
    pub p2_holds: bool,
    pub ledger_consistent: bool,
    pub failures: Vec<CheckFailure>,
}

impl CertReport {
    pub fn all_hold(&self) -> bool {
        self.failures.is_empty()
    }
}

fn fail(failures: &mut Vec<CheckFailure>, check: &str, detail: String) {
    failures.push(CheckFailure { check: check.to_string(), detail });
}

fn norm_sums(g: &RegularGraph, f: &VectorField, nm: &UncondNorm, p: f64) -> Result<(f64, f64)> {
    let vs = (0..f.n).map(|v| eval_norm(nm, f.at(v)).map(|x| x.powf(p))).sum::<Result<f64>>()?;
    let mut es = 0.0;
    for e in g.edges() {
        let diff: Vec<f64> = f.at(e.lo).iter().zip(f.at(e.hi)).map(|(a, b)| a - b).collect();
        es += eval_norm(nm, &diff)?.powf(p);
    }
    Ok((vs, es))
}

/// Full pipeline on a prepared field at explicit parameters.
pub fn certify_prepared(
    g: &RegularGraph,
    prep: &Prepared,
    q: f64,
    c: f64,
    params: &ExpanParams,
    p: f64,
) -> Result<CertReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p = {p} must be finite and at least 1")));
    }
    let f = &prep.binary;
    let nm = &prep.norm;
    let d = g.d();
    let cp = const_params(params, d, q, c);
    let pi = binary_poincare(&cp)?;
    let cprime = recombination_fraction(&cp)?;
    let idx = JumpIndex::new(g, f)?;
    let ledger = build_ledger_with(&idx, f, params)?;
    let ev = Evaluated::new(g, f, nm, &ledger)?;
    let mut failures = Vec::new();

    for &(v, j) in &ledger.scales.vertex_bound_failures {
        fail(&mut failures, "scale growth", format!("α(d−1)^(ℓ−1) > 3n/4 at vertex {v}, coordinate {j}"));
    }
    for &(j, level, sign) in &ledger.scales.class_bound_failures {
        fail(&mut failures, "class growth", format!("α(d−1)^(ℓ−1)|V| > 3n/4 for j = {j}, ℓ = {level}, sign {sign}"));
    }
    let mut families = Vec::new();
    for fam in &ledger.families {
        if !fam.large_enough() {
            fail(&mut failures, "family size", format!("a thinned family is too small at j = {}, ℓ = {}", fam.j, fam.level));
        }
        if !fam.shares_ok() || !fam.multiplicity_ok {
            fail(&mut failures, "family sharing", format!("edge multiplicity {} at j = {}, ℓ = {}", fam.max_multiplicity, fam.j, fam.level));
        }
        families.push(FamilySummary {
            j: fam.j,
            level: fam.level,
            sign: fam.sign,
            vertices: fam.selected.len(),
            wholesale: fam.wholesale,
            crossover: fam.crossover,
            min_kept: fam.selected.iter().map(|s| s.edges.len()).min().unwrap_or(0),
            large_enough: fam.large_enough(),
            shares_ok: fam.shares_ok(),
            max_multiplicity: fam.max_multiplicity,
            multiplicity_bound: fam.multiplicity_bound,
            multiplicity_ok: fam.multiplicity_ok,
        });
    }
    for &(j, level, e, count) in &ledger.supports.share_failures {
        fail(&mut failures, "support sharing", format!("{count} vertices share coordinate {j} on edge {e} at ℓ = {level}"));
    }

    let mut edge_spread_checked = 0;
    let mut edge_spread_failed = 0;
    for s in &ledger.supports.entries {
        let b = ev.support_norm(s)?.log2().floor() as i32;
        let r = lemma49_check(&ledger, d, f.k, nm, s.v, s.level, b)?;
        edge_spread_checked += 1;
        if !r.holds {
            edge_spread_failed += 1;
        }
    }
    if edge_spread_failed > 0 {
        fail(&mut failures, "edge spread", format!("{edge_spread_failed} of {edge_spread_checked} (v, ℓ) pairs"));
    }

    let edge_sum: f64 = ev.edge_norms.iter().sum();
    let mut dichotomy = Vec::new();
    let mut per_scale = Vec::new();
    let mut scale_total = 0.0;
    for level in ledger.levels() {
        for b in ev.dyadic_levels(level)? {
            let r = ev.dichotomy(b, level, q, c)?;
            if r.branch == Branch::Neither {
                fail(&mut failures, "dichotomy", format!("neither branch at b = {b}, ℓ = {level}"));
            }
            if r.support_bound_failed > 0 {
                fail(&mut failures, "support bound", format!("{} edges at b = {b}, ℓ = {level}", r.support_bound_failed));
            }
            dichotomy.push(r);
        }
        let mut mass = 0.0;
        for s in ledger.supports.entries.iter().filter(|s| s.level == level) {
            mass += ev.support_norm(s)?;
        }
        scale_total += mass;
        let needed = cprime / LogScalar::from(scale_weight(level)) * LogScalar::from(mass);
        let edge_side = 4.0 * edge_sum;
        let holds = LogScalar::from(edge_side) >= needed;
        if !holds {
            fail(&mut failures, "scale recombination", format!("ℓ = {level}"));
        }
        per_scale.push(ScaleRecombination { level, mass, edge_side, needed, holds });
    }
    let binary_field = f.to_field();
    let (vertex_sum, _) = norm_sums(g, &binary_field, nm, 1.0)?;
    let triangle_holds = vertex_sum <= scale_total * (1.0 + 1e-12);
    if !triangle_holds {
        fail(&mut failures, "scale decomposition", format!("{vertex_sum} > {scale_total}"));
    }
    let ratio = if edge_sum > 0.0 { vertex_sum / edge_sum } else { f64::INFINITY };
    let bound_holds = LogScalar::from(ratio) <= pi;
    if !bound_holds {
        fail(&mut failures, "binary Poincaré bound", format!("ratio {ratio} exceeds Π = {pi}"));
    }
    let real_bound = match &prep.real {
        Some(rf) => {
            let (vs, es) = norm_sums(g, rf, &prep.source_norm, 1.0)?;
            let ratio = if es > 0.0 { vs / es } else { f64::INFINITY };
            let bound = real_field_bound(&cp)?;
            let holds = LogScalar::from(ratio) <= bound;
            if !holds {
                fail(&mut failures, "real-field bound", format!("ratio {ratio} exceeds 3Π/2"));
            }
            Some(RealBound { ratio, bound, holds })
        }
        None => None,
    };
    let extrapolation = if p > 1.0 {
        let field = prep.real.clone().unwrap_or(binary_field);
        let (vertex_side, edge_side) = norm_sums(g, &field, &prep.source_norm, p)?;
        let ratio = if edge_side > 0.0 { vertex_side / edge_side } else { f64::INFINITY };
        let bound = extrapolated_bound(&cp, p)?;
        let holds = LogScalar::from(ratio) <= bound;
        if !holds {
            fail(&mut failures, "extrapolated bound", format!("ratio {ratio} exceeds the p = {p} bound"));
        }
        Some(Extrapolation { p, vertex_side, edge_side, ratio, bound, holds })
    } else {
        None
    };
    let p2_holds = ledger.families.iter().all(|f| f.shares_ok() && f.multiplicity_ok);
    let ledger_consistent = ledger.distances_consistent(g);
    if !ledger_consistent {
        fail(&mut failures, "ledger distances", "a kept edge is farther than ℓ − 1 from its vertex".into());
    }
    Ok(CertReport {
        mode: ParamMode::Given,
        params: *params,
        fitted: None,
        q,
        c,
        p,
        n: g.n(),
        d,
        k: f.k,
        median_shift: prep.median_shift.clone(),
        encoding: prep.encoding.clone(),
        scale_entries: ledger.scales.levels.len(),
        max_level: ledger.scales.max_level(),
        families,
        support_max_share: ledger.supports.max_share,
        edge_spread_checked,
        edge_spread_failed,
        dichotomy,
        per_scale,
        triangle_holds,
        vertex_sum,
        edge_sum,
        ratio,
        pi,
        four_over_cprime: LogScalar::from(4.0) / cprime,
        bound_holds,
        real_bound,
        extrapolation,
        p2_holds,
        ledger_consistent,
        failures,
    })
}

/// Median-translate and encode when needed, then run the pipeline.
pub fn certify(
    g: &RegularGraph,
    input: &CertInput,
    nm: &UncondNorm,
    q: f64,
    c: f64,
    params: &ExpanParams,
    p: f64,
) -> Result<CertReport> {
    certify_prepared(g, &prepare(g, input, nm)?, q, c, params, p)
}

/// Paper parameters at degree `d`, or parameters fitted to this instance.
pub fn certify_mode<R: Rng + ?Sized>(
    g: &RegularGraph,
    input: &CertInput,
    nm: &UncondNorm,
    q: f64,
    c: f64,
    mode: ParamMode,
    p: f64,
    probes: usize,
    rng: &mut R,
) -> Result<CertReport> {
    let prep = prepare(g, input, nm)?;
    let (params, fitted) = match mode {
        ParamMode::Paper | ParamMode::Given => (ExpanParams::paper(g.d()), None),
        ParamMode::Fitted => {
            let fit = fit_params(g, &prep.binary, crate::constants::PAPER_EPS, probes, rng)?;
            (fit.params, Some(fit))
        }
    };
    let mut report = certify_prepared(g, &prep, q, c, &params, p)?;
    report.mode = if mode == ParamMode::Given { ParamMode::Paper } else { mode };
    report.fitted = fitted;
    Ok(report)
}
