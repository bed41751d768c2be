//! Composable 1-unconditional norms, exact Rademacher cotype constants,
//! restricted cotype, q-concavity, and the almost-disjoint support bound.

use rand::Rng;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent in `[1, ∞]`. Serialized as a number, or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(q: f64) -> Result<Self> {
        if q.is_nan() || q < 1.0 {
            return Err(Error::InvalidParameter(format!("norm exponent {q} must lie in [1, ∞]")));
        }
        Ok(Exponent(q))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let q = match Raw::deserialize(d)? {
            Raw::Num(x) => x,
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => f64::INFINITY,
            Raw::Text(t) => return Err(de::Error::custom(format!("bad exponent {t:?}"))),
        };
        Exponent::new(q).map_err(de::Error::custom)
    }
}

/// Expression tree for a 1-unconditional norm on `R^k`.
///
/// `Lq` without a dimension accepts any length. Inside `BlockCompose`,
/// blocks of unknown dimension share the leftover coordinates equally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum UncondNorm {
    Lq {
        q: Exponent,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    WeightedLq {
        q: Exponent,
        weights: Vec<f64>,
    },
    BlockCompose {
        outer: Box<UncondNorm>,
        inner: Vec<UncondNorm>,
    },
}

impl UncondNorm {
    pub fn lq(q: f64) -> Result<Self> {
        Ok(UncondNorm::Lq { q: Exponent::new(q)?, dim: None })
    }

    pub fn lq_dim(q: f64, dim: usize) -> Result<Self> {
        Ok(UncondNorm::Lq { q: Exponent::new(q)?, dim: Some(dim) })
    }

    pub fn sup() -> Self {
        UncondNorm::Lq { q: Exponent::INFINITY, dim: None }
    }

    pub fn weighted(q: f64, weights: Vec<f64>) -> Result<Self> {
        let nm = UncondNorm::WeightedLq { q: Exponent::new(q)?, weights };
        nm.validate()?;
        Ok(nm)
    }

    pub fn block(outer: UncondNorm, inner: Vec<UncondNorm>) -> Result<Self> {
        let nm = UncondNorm::BlockCompose { outer: Box::new(outer), inner };
        nm.validate()?;
        Ok(nm)
    }

    /// `X(ℓ₁^m)`: `k` blocks of `ℓ₁^m` combined by `base`.
    pub fn lifted(base: UncondNorm, k: usize, m: usize) -> Result<Self> {
        let inner = (0..k).map(|_| UncondNorm::Lq { q: Exponent(1.0), dim: Some(m) }).collect();
        Self::block(base, inner)
    }

    /// Fixed dimension, when the tree pins one down.
    pub fn dim(&self) -> Option<usize> {
        match self {
            UncondNorm::Lq { dim, .. } => *dim,
            UncondNorm::WeightedLq { weights, .. } => Some(weights.len()),
            UncondNorm::BlockCompose { inner, .. } => inner.iter().map(|b| b.dim()).sum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            UncondNorm::Lq { .. } => Ok(()),
            UncondNorm::WeightedLq { weights, .. } => {
                if weights.is_empty() {
                    return Err(Error::InvalidParameter("weighted norm needs at least one weight".into()));
                }
                if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
                    return Err(Error::InvalidParameter(format!("weight {w} must be positive and finite")));
                }
                Ok(())
            }
            UncondNorm::BlockCompose { outer, inner } => {
                if inner.is_empty() {
                    return Err(Error::InvalidParameter("block composition needs at least one block".into()));
                }
                if let Some(k) = outer.dim() {
                    if k != inner.len() {
                        return Err(Error::DimensionMismatch { expected: k, got: inner.len() });
                    }
                }
                outer.validate()?;
                inner.iter().try_for_each(|b| b.validate())
            }
        }
    }

    /// Block lengths for a vector of length `k`.
    fn block_sizes(inner: &[UncondNorm], k: usize) -> Result<Vec<usize>> {
        let known: usize = inner.iter().filter_map(|b| b.dim()).sum();
        let free = inner.iter().filter(|b| b.dim().is_none()).count();
        if known > k || (free == 0 && known != k) {
            return Err(Error::DimensionMismatch { expected: known, got: k });
        }
        let rest = k - known;
        if free > 0 && rest % free != 0 {
            return Err(Error::DimensionMismatch { expected: known + free * (rest / free + 1), got: k });
        }
        Ok(inner.iter().map(|b| b.dim().unwrap_or(if free > 0 { rest / free } else { 0 })).collect())
    }
}

fn lq_value(q: f64, y: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = y.clone().fold(0.0f64, |m, x| m.max(x.abs()));
    if q.is_infinite() || max == 0.0 {
        return max;
    }
    if q == 1.0 {
        return y.map(f64::abs).sum();
    }
    if q == 2.0 {
        return max * y.map(|x| (x / max) * (x / max)).sum::<f64>().sqrt();
    }
    max * y.map(|x| (x.abs() / max).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// `‖y‖` under `nm`.
pub fn eval_norm(nm: &UncondNorm, y: &[f64]) -> Result<f64> {
    if let Some(k) = nm.dim() {
        if k != y.len() {
            return Err(Error::DimensionMismatch { expected: k, got: y.len() });
        }
    }
    match nm {
        UncondNorm::Lq { q, .. } => Ok(lq_value(q.0, y.iter().copied())),
        UncondNorm::WeightedLq { q, weights } => {
            nm.validate()?;
            if q.is_infinite() {
                Ok(y.iter().zip(weights).fold(0.0f64, |m, (x, w)| m.max(w * x.abs())))
            } else {
                let q = q.0;
                let s: f64 = y.iter().zip(weights).map(|(x, w)| w * x.abs().powf(q)).sum();
                Ok(s.powf(1.0 / q))
            }
        }
        UncondNorm::BlockCompose { outer, inner } => {
            let sizes = UncondNorm::block_sizes(inner, y.len())?;
            let mut start = 0;
            let mut block_norms = Vec::with_capacity(inner.len());
            for (b, len) in inner.iter().zip(sizes) {
                block_norms.push(eval_norm(b, &y[start..start + len])?);
                start += len;
            }
            eval_norm(outer, &block_norms)
        }
    }
}

/// Best constant for one family: `(Σ‖x_i‖^q / E‖Σ r_i x_i‖^q)^{1/q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotypeConstant {
    pub raw: f64,
    /// `max(1, raw)`, usable as a cotype certificate.
    pub certificate: f64,
    pub rademacher_average: f64,
    pub sum_of_powers: f64,
    pub exact: bool,
    /// Sign patterns drawn, for estimates.
    pub samples: Option<usize>,
}

/// Largest family for exhaustive sign enumeration.
pub const COTYPE_EXACT_LIMIT: usize = 20;
/// Largest family for the all-subsets restricted cotype scan.
pub const RESTRICTED_EXACT_LIMIT: usize = 16;

fn check_family(xs: &[Vec<f64>]) -> Result<usize> {
    let k = xs.first().map(|x| x.len()).ok_or(Error::EmptySet("vector family"))?;
    if let Some(x) = xs.iter().find(|x| x.len() != k) {
        return Err(Error::DimensionMismatch { expected: k, got: x.len() });
    }
    Ok(k)
}

fn check_cotype_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("cotype exponent {q} must be finite and at least 1")));
    }
    Ok(())
}

/// `E‖Σ_{i ∈ members} r_i x_i‖^q` by enumerating signs (one sign pinned,
/// since `r` and `−r` give the same norm).
fn rademacher_average(nm: &UncondNorm, xs: &[Vec<f64>], members: &[usize], q: f64) -> Result<f64> {
    let k = xs[members[0]].len();
    let mut sum = vec![0.0; k];
    for &i in members {
        sum.iter_mut().zip(&xs[i]).for_each(|(s, x)| *s += x);
    }
    let free = members.len() - 1;
    let mut signs = vec![1.0f64; members.len()];
    let mut total = eval_norm(nm, &sum)?.powf(q);
    for step in 1u64..(1u64 << free) {
        // Gray code: flip the sign of member `bit + 1`.
        let bit = step.trailing_zeros() as usize + 1;
        let i = members[bit];
        let s = signs[bit];
        sum.iter_mut().zip(&xs[i]).for_each(|(acc, x)| *acc -= 2.0 * s * x);
        signs[bit] = -s;
        total += eval_norm(nm, &sum)?.powf(q);
    }
    Ok(total / (1u64 << free) as f64)
}

fn constant_from(avg: f64, powers: f64, q: f64, exact: bool, samples: Option<usize>) -> Result<CotypeConstant> {
    if avg <= 0.0 {
        return Err(Error::Degenerate("every Rademacher sum vanishes".into()));
    }
    let raw = (powers / avg).powf(1.0 / q);
    Ok(CotypeConstant { raw, certificate: raw.max(1.0), rademacher_average: avg, sum_of_powers: powers, exact, samples })
}

/// Exact best constant by full sign enumeration, `m <= 20`.
pub fn cotype_constant_exact(nm: &UncondNorm, xs: &[Vec<f64>], q: f64) -> Result<CotypeConstant> {
    check_family(xs)?;
    check_cotype_q(q)?;
    if xs.len() > COTYPE_EXACT_LIMIT {
        return Err(Error::SizeLimit {
            what: "cotype_constant_exact",
            size: xs.len(),
            max: COTYPE_EXACT_LIMIT,
            hint: "use cotype_constant_sampled for an estimate",
        });
    }
    let members: Vec<usize> = (0..xs.len()).collect();
    let avg = rademacher_average(nm, xs, &members, q)?;
    let powers = xs.iter().map(|x| eval_norm(nm, x).map(|v| v.powf(q))).sum::<Result<f64>>()?;
    constant_from(avg, powers, q, true, None)
}

/// Monte Carlo estimate of the same constant; flagged `exact: false`.
pub fn cotype_constant_sampled<R: Rng + ?Sized>(
    nm: &UncondNorm,
    xs: &[Vec<f64>],
    q: f64,
    samples: usize,
    rng: &mut R,
) -> Result<CotypeConstant> {
    let k = check_family(xs)?;
    check_cotype_q(q)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let mut total = 0.0;
    let mut sum = vec![0.0; k];
    for _ in 0..samples {
        sum.iter_mut().for_each(|s| *s = 0.0);
        for x in xs {
            let r = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            sum.iter_mut().zip(x).for_each(|(s, xi)| *s += r * xi);
        }
        total += eval_norm(nm, &sum)?.powf(q);
    }
    let powers = xs.iter().map(|x| eval_norm(nm, x).map(|v| v.powf(q))).sum::<Result<f64>>()?;
    constant_from(total / samples as f64, powers, q, false, Some(samples))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictedCotypeVerdict {
    pub exact: bool,
    pub holds: bool,
    pub subsets_checked: usize,
    /// `min_{A′} C^q E‖Σ r y‖^q / Σ‖y‖^q`; at least 1 when the check holds.
    pub worst_ratio: f64,
    pub witness: Option<Vec<usize>>,
}

const REL_TOL: f64 = 1e-12;

fn restricted_ratio(nm: &UncondNorm, family: &[Vec<f64>], members: &[usize], q: f64, cq: f64) -> Result<Option<f64>> {
    let powers: f64 = members.iter().map(|&i| eval_norm(nm, &family[i]).map(|v| v.powf(q))).sum::<Result<f64>>()?;
    if powers == 0.0 {
        return Ok(None);
    }
    Ok(Some(cq * rademacher_average(nm, family, members, q)? / powers))
}

/// `E‖Σ_{α∈A′} r_α y_α‖^q >= C^{−q} Σ_{α∈A′} ‖y_α‖^q` for every nonempty
/// `A′`, with signs enumerated over `A′`. Exhaustive for `|A| <= 16`,
/// otherwise `subset_budget` random subsets.
pub fn restricted_cotype_check<R: Rng + ?Sized>(
    nm: &UncondNorm,
    family: &[Vec<f64>],
    q: f64,
    c: f64,
    subset_budget: usize,
    rng: &mut R,
) -> Result<RestrictedCotypeVerdict> {
    check_family(family)?;
    check_cotype_q(q)?;
    let cq = c.powf(q);
    let m = family.len();
    let exact = m <= RESTRICTED_EXACT_LIMIT;
    let mut verdict =
        RestrictedCotypeVerdict { exact, holds: true, subsets_checked: 0, worst_ratio: f64::INFINITY, witness: None };
    let visit = |members: Vec<usize>, verdict: &mut RestrictedCotypeVerdict| -> Result<()> {
        verdict.subsets_checked += 1;
        if let Some(r) = restricted_ratio(nm, family, &members, q, cq)? {
            if r < verdict.worst_ratio {
                verdict.worst_ratio = r;
                if r < 1.0 - REL_TOL {
                    verdict.holds = false;
                    verdict.witness = Some(members);
                }
            }
        }
        Ok(())
    };
    if exact {
        for mask in 1u64..(1u64 << m) {
            let members: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            visit(members, &mut verdict)?;
        }
    } else {
        for _ in 0..subset_budget {
            let mut members: Vec<usize> = (0..m).filter(|_| rng.gen::<bool>()).collect();
            if members.is_empty() {
                members.push(rng.gen_range(0..m));
            }
            if members.len() > COTYPE_EXACT_LIMIT {
                members.truncate(COTYPE_EXACT_LIMIT);
            }
            visit(members, &mut verdict)?;
        }
    }
    Ok(verdict)
}

/// Largest best constant over all nonempty subfamilies, floored at 1.
pub fn restricted_cotype_constant(nm: &UncondNorm, family: &[Vec<f64>], q: f64) -> Result<f64> {
    check_family(family)?;
    check_cotype_q(q)?;
    let m = family.len();
    if m > RESTRICTED_EXACT_LIMIT {
        return Err(Error::SizeLimit {
            what: "restricted_cotype_constant",
            size: m,
            max: RESTRICTED_EXACT_LIMIT,
            hint: "split the family",
        });
    }
    let mut worst: f64 = 1.0;
    for mask in 1u64..(1u64 << m) {
        let members: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        if let Some(r) = restricted_ratio(nm, family, &members, q, 1.0)? {
            worst = worst.max((1.0 / r).powf(1.0 / q));
        }
    }
    Ok(worst)
}

/// Base vector with index sets and their overlap parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictedFamily {
    pub x: Vec<f64>,
    pub sets: Vec<Vec<usize>>,
    pub delta: f64,
}

impl RestrictedFamily {
    /// Largest number of index sets sharing one coordinate.
    pub fn max_overlap(&self) -> usize {
        let mut count = vec![0usize; self.x.len()];
        for set in &self.sets {
            for &j in set {
                if j < count.len() {
                    count[j] += 1;
                }
            }
        }
        count.into_iter().max().unwrap_or(0)
    }

    /// `P_{J_i}(x)` for each set.
    pub fn projections(&self) -> Vec<Vec<f64>> {
        self.sets
            .iter()
            .map(|set| {
                let mut p = vec![0.0; self.x.len()];
                set.iter().for_each(|&j| p[j] = self.x[j]);
                p
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportBoundReport {
    /// `‖x‖^q`.
    pub lhs: f64,
    /// `C^{−q} δ^{−1} 2^{−(2q+5)}`.
    pub rhs: f64,
    pub holds: bool,
    pub min_projection_norm: f64,
    pub max_overlap: usize,
}

/// `‖x‖^q >= C^{−q} δ^{−1} 2^{−(2q+5)}` under `‖P_{J_i}x‖ >= 1` and overlap
/// at most `δm`. The restricted cotype hypothesis on the projections is the
/// caller's responsibility.
pub fn prop33_check(nm: &UncondNorm, fam: &RestrictedFamily, q: f64, c: f64) -> Result<SupportBoundReport> {
    check_cotype_q(q)?;
    let k = fam.x.len();
    let m = fam.sets.len();
    let mut problems = Vec::new();
    if m == 0 {
        problems.push("no index sets".to_string());
    }
    if fam.x.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        problems.push("x must be finite and nonnegative".to_string());
    }
    if let Some(j) = fam.sets.iter().flatten().find(|&&j| j >= k) {
        problems.push(format!("index {j} out of range for dimension {k}"));
    }
    if !(fam.delta > 0.0 && fam.delta <= 1.0) {
        problems.push(format!("δ = {} not in (0, 1]", fam.delta));
    }
    if !problems.is_empty() {
        return Err(Error::Precondition(problems.join("; ")));
    }
    let max_overlap = fam.max_overlap();
    if max_overlap as f64 > fam.delta * m as f64 * (1.0 + REL_TOL) {
        problems.push(format!("a coordinate lies in {max_overlap} sets, above δm = {}", fam.delta * m as f64));
    }
    let mut min_projection_norm = f64::INFINITY;
    for (i, p) in fam.projections().iter().enumerate() {
        let v = eval_norm(nm, p)?;
        min_projection_norm = min_projection_norm.min(v);
        if v < 1.0 - REL_TOL {
            problems.push(format!("‖P_J x‖ = {v} < 1 for set {i}"));
        }
    }
    if !problems.is_empty() {
        return Err(Error::Precondition(problems.join("; ")));
    }
    let lhs = eval_norm(nm, &fam.x)?.powf(q);
    let rhs = c.powf(-q) / fam.delta * 2f64.powf(-(2.0 * q + 5.0));
    Ok(SupportBoundReport { lhs, rhs, holds: lhs >= rhs * (1.0 - REL_TOL), min_projection_norm, max_overlap })
}

/// Smallest `M` with `‖(Σ|x_i|^q)^{1/q}‖ >= M⁻¹ (Σ‖x_i‖^q)^{1/q}` on this
/// family. `q = ∞` is rejected.
pub fn q_concavity_check(nm: &UncondNorm, xs: &[Vec<f64>], q: f64) -> Result<f64> {
    let k = check_family(xs)?;
    check_cotype_q(q)?;
    let mut lattice = vec![0.0; k];
    for x in xs {
        lattice.iter_mut().zip(x).for_each(|(s, v)| *s += v.abs().powf(q));
    }
    lattice.iter_mut().for_each(|s| *s = s.powf(1.0 / q));
    let lhs = eval_norm(nm, &lattice)?;
    let rhs = xs.iter().map(|x| eval_norm(nm, x).map(|v| v.powf(q))).sum::<Result<f64>>()?.powf(1.0 / q);
    if lhs == 0.0 {
        return Err(Error::Degenerate("every vector is zero".into()));
    }
    Ok(rhs / lhs)
}
