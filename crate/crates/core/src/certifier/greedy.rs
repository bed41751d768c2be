//! Thinning jump-edge families so that no edge serves too many vertices.

use serde::{Deserialize, Serialize};

use super::encode::BinaryField;
use super::scales::{scale_index_with, JumpIndex, ScaleClass};
use crate::constants::{ltilde, scale_weight, ConstParams};
use crate::error::{Error, Result};
use crate::expansion::ExpanParams;
use crate::graph::RegularGraph;
use crate::logscalar::LogScalar;

pub(crate) fn const_params(params: &ExpanParams, d: usize, q: f64, c: f64) -> ConstParams {
    ConstParams { q, c, d, alpha: params.alpha, eps: params.eps, l: params.l, ..ConstParams::default() }
}

/// `ln((α a_ℓ/12)(d−1)^{ℓ−1}) − ln(L(d−1−ε)^ℓ)`, positive past the crossover.
fn crossover_margin(params: &ExpanParams, d: usize, level: u64) -> f64 {
    let l = level as f64;
    let ln_dm1 = ((d - 1) as f64).ln();
    let ln_shrunk = ((d - 1) as f64 - params.eps).ln();
    params.alpha.ln_abs() - 12f64.ln() + (6.0 / std::f64::consts::PI.powi(2)).ln() - 2.0 * l.ln()
        + (l - 1.0) * ln_dm1
        - params.l.ln_abs()
        - l * ln_shrunk
}

/// Least `ℓ₀` such that `L(d−1−ε)^ℓ < (α a_ℓ/12)(d−1)^{ℓ−1}` for every
/// `ℓ >= ℓ₀`. Below it families are kept whole.
pub fn greedy_crossover(params: &ExpanParams, d: usize) -> u64 {
    let ln_ratio = ((d - 1) as f64).ln() - ((d - 1) as f64 - params.eps).ln();
    // The margin is convex in ℓ and increasing from 2/ln ρ on.
    let turn = ((2.0 / ln_ratio).ceil() as u64).max(1);
    let mut hi = turn;
    while crossover_margin(params, d, hi) <= 0.0 {
        hi = hi.saturating_mul(2);
    }
    let mut lo = turn;
    if crossover_margin(params, d, lo) <= 0.0 {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if crossover_margin(params, d, mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo = hi;
    }
    while lo > 1 && crossover_margin(params, d, lo - 1) > 0.0 {
        lo -= 1;
    }
    lo
}

/// `8(d−1−ε)/ε · ln(20dL/(αε))`, an a priori cap on the crossover.
pub fn crossover_cap(params: &ExpanParams, d: usize) -> f64 {
    let inner = LogScalar::from(20.0 * d as f64) * params.l / (params.alpha * LogScalar::from(params.eps));
    8.0 * ((d - 1) as f64 - params.eps) / params.eps * inner.ln_abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selected {
    pub v: usize,
    /// Thinned family, ascending edge ids.
    pub edges: Vec<usize>,
    /// `|edges| >= (α a_ℓ/12)(d−1)^{ℓ−1}`.
    pub large_enough: bool,
    /// Largest count of remaining vertices sharing one kept edge.
    pub max_share: usize,
    /// `max_share <= L(d−1−ε)^ℓ`.
    pub share_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyFamily {
    pub j: usize,
    pub level: usize,
    pub sign: i8,
    pub crossover: u64,
    /// Below the crossover: every family is the full `E(v,j;ℓ)`.
    pub wholesale: bool,
    /// Families in selection order.
    pub selected: Vec<Selected>,
    pub max_multiplicity: usize,
    /// `L̃(d−1−ε)^ℓ`.
    pub multiplicity_bound: LogScalar,
    pub multiplicity_ok: bool,
}

impl GreedyFamily {
    pub fn large_enough(&self) -> bool {
        self.selected.iter().all(|s| s.large_enough)
    }

    pub fn shares_ok(&self) -> bool {
        self.selected.iter().all(|s| s.share_ok)
    }

    pub fn family_of(&self, v: usize) -> Option<&[usize]> {
        self.selected.iter().find(|s| s.v == v).map(|s| s.edges.as_slice())
    }
}

fn multiplicities(edge_count: usize, selected: &[Selected]) -> Vec<usize> {
    let mut mult = vec![0usize; edge_count];
    for s in selected {
        s.edges.iter().for_each(|&e| mult[e] += 1);
    }
    mult
}

pub(crate) fn greedy_for_class(idx: &JumpIndex, class: &ScaleClass, params: &ExpanParams) -> Result<GreedyFamily> {
    greedy_with_crossover(idx, class, params, greedy_crossover(params, idx.d()))
}

/// Same as [`greedy_for_class`] with the crossover fixed by the caller, so
/// the selection loop can be exercised at levels small graphs reach.
pub(crate) fn greedy_with_crossover(
    idx: &JumpIndex,
    class: &ScaleClass,
    params: &ExpanParams,
    crossover: u64,
) -> Result<GreedyFamily> {
    if class.vertices.is_empty() {
        return Err(Error::EmptySet("scale class"));
    }
    let (d, level, j) = (idx.d(), class.level, class.j);
    let shrunk = LogScalar::from((d - 1) as f64 - params.eps).powi(level as i64);
    let popular = params.l * shrunk;
    let keep = params.alpha
        * LogScalar::from(scale_weight(level) / 12.0)
        * LogScalar::from((d - 1) as f64).powi(level as i64 - 1);
    let lt = ltilde(&const_params(params, d, 2.0, 1.0))?;
    let multiplicity_bound = lt * shrunk;
    let families: Vec<Vec<usize>> = class.vertices.iter().map(|&v| idx.near_jumps(v, j, level)).collect();
    let wholesale = (level as u64) < crossover;
    let mut selected = Vec::with_capacity(families.len());
    if wholesale {
        let mut count = vec![0usize; idx.edge_count()];
        families.iter().flatten().for_each(|&e| count[e] += 1);
        for (&v, fam) in class.vertices.iter().zip(&families) {
            let max_share = fam.iter().map(|&e| count[e]).max().unwrap_or(0);
            selected.push(Selected {
                v,
                edges: fam.clone(),
                large_enough: keep.count_meets(fam.len()),
                max_share,
                share_ok: true,
            });
        }
    } else {
        let mut count = vec![0usize; idx.edge_count()];
        families.iter().flatten().for_each(|&e| count[e] += 1);
        let mut remaining: Vec<usize> = (0..families.len()).collect();
        while !remaining.is_empty() {
            let crowded = |e: usize| count[e] > 0 && popular.count_meets(count[e]);
            let pick = remaining
                .iter()
                .position(|&i| popular.count_within(families[i].iter().filter(|&&e| crowded(e)).count()));
            let Some(pos) = pick else {
                return Err(Error::Falsified {
                    lemma: "part B",
                    detail: format!(
                        "no admissible vertex among {} remaining in class j = {j}, ℓ = {level}, sign {}",
                        remaining.len(),
                        class.sign
                    ),
                });
            };
            let i = remaining.remove(pos);
            let kept: Vec<usize> = families[i].iter().copied().filter(|&e| !crowded(e)).collect();
            let max_share = kept.iter().map(|&e| count[e]).max().unwrap_or(0);
            selected.push(Selected {
                v: class.vertices[i],
                large_enough: keep.count_meets(kept.len()),
                share_ok: popular.count_within(max_share),
                max_share,
                edges: kept,
            });
            families[i].iter().for_each(|&e| count[e] -= 1);
        }
    }
    let max_multiplicity = multiplicities(idx.edge_count(), &selected).into_iter().max().unwrap_or(0);
    Ok(GreedyFamily {
        j,
        level,
        sign: class.sign,
        crossover,
        wholesale,
        selected,
        max_multiplicity,
        multiplicity_bound,
        multiplicity_ok: multiplicity_bound.count_within(max_multiplicity),
    })
}

/// Thinned families `Ẽ(v, j)` for every `v ∈ V_σ(j; ℓ)`, with the per-vertex
/// size check, the sharing check at selection time, and the final
/// multiplicity bound. Ties go to the lowest vertex index.
pub fn greedy_disjointify(
    g: &RegularGraph,
    f: &BinaryField,
    j: usize,
    level: usize,
    sign: i8,
    params: &ExpanParams,
) -> Result<GreedyFamily> {
    let idx = JumpIndex::new(g, f)?;
    let scales = scale_index_with(&idx, f, params.alpha)?;
    let class = scales
        .classes
        .iter()
        .find(|c| c.j == j && c.level == level && c.sign == sign)
        .ok_or(Error::EmptySet("V_σ(j; ℓ)"))?;
    greedy_for_class(&idx, class, params)
}
