//! Log-space evaluation of the named constants and the identities among them.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logscalar::LogScalar;

/// `⌊(7/15)·10⁸⌋ + 1`.
pub const L0: u64 = 700_000_000 / 15 + 1;

/// `a_i = 6/(π² i²)`; these sum to 1 over `i >= 1`.
pub fn scale_weight(i: usize) -> f64 {
    assert!(i >= 1, "scale weights start at i = 1");
    6.0 / (PI * PI * (i as f64) * (i as f64))
}

/// `d^{-10¹¹ ln d}`, held as its logarithm `-10¹¹ (ln d)²`.
pub fn paper_alpha(d: usize) -> LogScalar {
    let ln_d = (d as f64).ln();
    LogScalar::from_ln(-1e11 * ln_d * ln_d)
}

pub const PAPER_EPS: f64 = 0.2;

/// `24 / α(d)`.
pub fn paper_l(d: usize) -> LogScalar {
    LogScalar::from(24.0) / paper_alpha(d)
}

/// Parameter record shared by every constant; each constant reads the
/// fields its formula uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstParams {
    pub q: f64,
    /// Cotype constant.
    pub c: f64,
    /// Unconditionality constant.
    pub k_uncond: f64,
    pub d: usize,
    pub alpha: LogScalar,
    pub eps: f64,
    pub l: LogScalar,
    /// Index for `a_i`.
    pub i: usize,
    /// `d / (d − λ2)`, needed by the baseline bounds.
    pub gap_ratio: Option<f64>,
}

impl Default for ConstParams {
    fn default() -> Self {
        Self {
            q: 2.0,
            c: 1.0,
            k_uncond: 1.0,
            d: 3,
            alpha: LogScalar::ONE,
            eps: 1.0,
            l: LogScalar::ONE,
            i: 1,
            gap_ratio: None,
        }
    }
}

impl ConstParams {
    /// The paper's `α(d)`, `ε = 0.2`, `L = 24/α(d)` at degree `d`.
    pub fn paper(d: usize) -> Self {
        Self { d, alpha: paper_alpha(d), eps: PAPER_EPS, l: paper_l(d), ..Self::default() }
    }

    fn check_q(&self) -> Result<()> {
        if self.q.is_nan() || self.q < 2.0 {
            return Err(Error::InvalidParameter(format!("q = {} must be at least 2", self.q)));
        }
        Ok(())
    }

    fn check_c(&self) -> Result<()> {
        if self.c.is_nan() || self.c < 1.0 {
            return Err(Error::InvalidParameter(format!("C = {} must be at least 1", self.c)));
        }
        Ok(())
    }

    fn check_d(&self) -> Result<()> {
        if self.d < 3 {
            return Err(Error::InvalidParameter(format!("d = {} must be at least 3", self.d)));
        }
        Ok(())
    }

    fn check_expan(&self) -> Result<()> {
        self.check_d()?;
        if !(self.alpha.is_positive() && self.alpha <= LogScalar::ONE) {
            return Err(Error::InvalidParameter(format!("α = {} not in (0, 1]", self.alpha)));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParameter(format!("ε = {} not in (0, 1]", self.eps)));
        }
        if self.l < LogScalar::ONE {
            return Err(Error::InvalidParameter(format!("L = {} must be at least 1", self.l)));
        }
        Ok(())
    }

    fn gap(&self) -> Result<f64> {
        match self.gap_ratio {
            Some(g) if g >= 1.0 && g.is_finite() => Ok(g),
            Some(g) => Err(Error::InvalidParameter(format!("d/(d − λ2) = {g} must be finite and at least 1"))),
            None => Err(Error::InvalidParameter("baseline bounds need d/(d − λ2)".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantId {
    Gamma,
    Pi,
    Ltilde,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "chat")]
    Chat,
    #[serde(rename = "cprime")]
    Cprime,
    #[serde(rename = "alpha_d")]
    AlphaD,
    #[serde(rename = "eps_d")]
    EpsD,
    #[serde(rename = "L_d")]
    LD,
    #[serde(rename = "eta")]
    Eta,
    L0,
    K,
    #[serde(rename = "a_i")]
    AI,
    #[serde(rename = "OS_bound_i")]
    OsBoundI,
    #[serde(rename = "OS_bound_ii")]
    OsBoundII,
}

impl ConstantId {
    pub const ALL: [ConstantId; 15] = [
        ConstantId::Gamma,
        ConstantId::Pi,
        ConstantId::Ltilde,
        ConstantId::C,
        ConstantId::Chat,
        ConstantId::Cprime,
        ConstantId::AlphaD,
        ConstantId::EpsD,
        ConstantId::LD,
        ConstantId::Eta,
        ConstantId::L0,
        ConstantId::K,
        ConstantId::AI,
        ConstantId::OsBoundI,
        ConstantId::OsBoundII,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ConstantId::Gamma => "Gamma",
            ConstantId::Pi => "Pi",
            ConstantId::Ltilde => "Ltilde",
            ConstantId::C => "c",
            ConstantId::Chat => "chat",
            ConstantId::Cprime => "cprime",
            ConstantId::AlphaD => "alpha_d",
            ConstantId::EpsD => "eps_d",
            ConstantId::LD => "L_d",
            ConstantId::Eta => "eta",
            ConstantId::L0 => "L0",
            ConstantId::K => "K",
            ConstantId::AI => "a_i",
            ConstantId::OsBoundI => "OS_bound_i",
            ConstantId::OsBoundII => "OS_bound_ii",
        }
    }
}

impl fmt::Display for ConstantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstantId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ConstantId::ALL.iter().copied().find(|id| id.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ConstantId::ALL.iter().map(|id| id.name()).collect();
            Error::InvalidParameter(format!("unknown constant {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

fn ln2_pow(e: f64) -> LogScalar {
    LogScalar::from_ln(e * LN_2)
}

fn pos(x: f64) -> LogScalar {
    LogScalar::from(x)
}

/// `2(20dL/(αε))⁸`.
pub fn ltilde(p: &ConstParams) -> Result<LogScalar> {
    p.check_expan()?;
    let inner = pos(20.0 * p.d as f64) * p.l / (p.alpha * pos(p.eps));
    Ok(pos(2.0) * inner.powi(8))
}

/// `α²/(48d(d−1))`.
pub fn edge_fraction(p: &ConstParams) -> Result<LogScalar> {
    p.check_expan()?;
    let d = p.d as f64;
    Ok(p.alpha.powi(2) / pos(48.0 * d * (d - 1.0)))
}

/// `α³/(2¹⁵ d³ C L̃^{1/q})`.
pub fn dichotomy_fraction(p: &ConstParams) -> Result<LogScalar> {
    p.check_q()?;
    p.check_c()?;
    let lt = ltilde(p)?;
    Ok(p.alpha.powi(3) / (ln2_pow(15.0) * pos(p.d as f64).powi(3) * pos(p.c) * lt.powf(1.0 / p.q)))
}

/// `ĉ²(ε/(10qd))¹⁰`.
pub fn recombination_fraction(p: &ConstParams) -> Result<LogScalar> {
    let chat = dichotomy_fraction(p)?;
    Ok(chat.powi(2) * pos(p.eps / (10.0 * p.q * p.d as f64)).powi(10))
}

/// `2¹¹³ q¹⁰ C² d²⁴ L⁸ / (α¹⁴ ε¹⁸)`.
pub fn binary_poincare(p: &ConstParams) -> Result<LogScalar> {
    p.check_q()?;
    p.check_c()?;
    p.check_expan()?;
    Ok(ln2_pow(113.0)
        * pos(p.q).powi(10)
        * pos(p.c).powi(2)
        * pos(p.d as f64).powi(24)
        * p.l.powi(8)
        / (p.alpha.powi(14) * pos(p.eps).powi(18)))
}

/// `2¹¹⁵ q¹⁰ C² K³ d²⁵ L⁸ / (α¹⁴ ε¹⁸)`.
pub fn poincare_gamma(p: &ConstParams) -> Result<LogScalar> {
    if p.k_uncond.is_nan() || p.k_uncond < 1.0 {
        return Err(Error::InvalidParameter(format!("K = {} must be at least 1", p.k_uncond)));
    }
    let pi = binary_poincare(p)?;
    Ok(pi * pos(4.0) * pos(p.k_uncond).powi(3) * pos(p.d as f64))
}

/// `3Π/2`, the bound for real-valued fields at `p = 1`.
pub fn real_field_bound(p: &ConstParams) -> Result<LogScalar> {
    Ok(binary_poincare(p)? * pos(1.5))
}

/// `(3Π/2)^p d^{p−1} max{2,p}^p` for `p > 1`.
pub fn extrapolated_bound(params: &ConstParams, p: f64) -> Result<LogScalar> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must be at least 1")));
    }
    if p == 1.0 {
        return real_field_bound(params);
    }
    let base = real_field_bound(params)?;
    Ok(base.powf(p) * pos(params.d as f64).powf(p - 1.0) * pos(p.max(2.0)).powf(p))
}

/// `1/(12² e³ (d−1)^{2L₀+2})`.
pub fn eta(d: usize) -> LogScalar {
    let ln = -(144f64.ln() + 3.0 + (2.0 * L0 as f64 + 2.0) * ((d - 1) as f64).ln());
    LogScalar::from_ln(ln)
}

/// `((d − 2.1√(d−1))/2)(1.5 − 1.05√(d−1)/d)^{L₀−1}`.
pub fn free_point_growth(d: usize) -> LogScalar {
    let df = d as f64;
    let root = (df - 1.0).sqrt();
    pos((df - 2.1 * root) / 2.0) * pos(1.5 - 1.05 * root / df).powf((L0 - 1) as f64)
}

/// `2^{3616q+450} q^{384q+104} C^{129q+4} (d/(d−λ2))⁸`.
pub fn baseline_general(p: &ConstParams) -> Result<LogScalar> {
    p.check_q()?;
    p.check_c()?;
    let q = p.q;
    Ok(ln2_pow(3616.0 * q + 450.0)
        * pos(q).powf(384.0 * q + 104.0)
        * pos(p.c).powf(129.0 * q + 4.0)
        * pos(p.gap()?).powi(8))
}

/// `q⁶⁴ 2^{576q+234} (d/(d−λ2))⁸`.
pub fn baseline_concave(p: &ConstParams) -> Result<LogScalar> {
    p.check_q()?;
    let q = p.q;
    Ok(pos(q).powi(64) * ln2_pow(576.0 * q + 234.0) * pos(p.gap()?).powi(8))
}

pub fn eval_constant(id: ConstantId, p: &ConstParams) -> Result<LogScalar> {
    match id {
        ConstantId::Gamma => poincare_gamma(p),
        ConstantId::Pi => binary_poincare(p),
        ConstantId::Ltilde => ltilde(p),
        ConstantId::C => edge_fraction(p),
        ConstantId::Chat => dichotomy_fraction(p),
        ConstantId::Cprime => recombination_fraction(p),
        ConstantId::AlphaD => {
            p.check_d()?;
            Ok(paper_alpha(p.d))
        }
        ConstantId::EpsD => Ok(pos(PAPER_EPS)),
        ConstantId::LD => {
            p.check_d()?;
            Ok(paper_l(p.d))
        }
        ConstantId::Eta => {
            p.check_d()?;
            Ok(eta(p.d))
        }
        ConstantId::L0 => Ok(pos(L0 as f64)),
        ConstantId::K => {
            p.check_d()?;
            Ok(free_point_growth(p.d))
        }
        ConstantId::AI => {
            if p.i == 0 {
                return Err(Error::InvalidParameter("a_i needs i >= 1".into()));
            }
            Ok(pos(scale_weight(p.i)))
        }
        ConstantId::OsBoundI => baseline_general(p),
        ConstantId::OsBoundII => baseline_concave(p),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecombinationRow {
    pub q: f64,
    pub d: usize,
    pub c: f64,
    pub ln_four_over_cprime: f64,
    pub ln_pi: f64,
    pub rel_diff: f64,
    pub equal: bool,
    /// `4/c′ <= Π`, the direction the final summation needs.
    pub dominated: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub recombination: Vec<RecombinationRow>,
    pub recombination_equal: bool,
    pub recombination_dominated: bool,
    /// `(d, ln K(d))` for `d` in `6..=20`.
    pub free_point_growth: Vec<(usize, f64)>,
    pub free_point_growth_ok: bool,
    pub scale_weight_sum: f64,
    pub scale_weight_sum_ok: bool,
    pub q_homogeneity_diff: f64,
    pub q_homogeneity_ok: bool,
    pub eps_d: f64,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.recombination_equal && self.free_point_growth_ok && self.scale_weight_sum_ok && self.q_homogeneity_ok
    }
}

pub const IDENTITY_REL_TOL: f64 = 1e-9;
pub const SCALE_SUM_TERMS: usize = 1_000_000;

/// `Σ_{i<=n} a_i`, summed smallest-first with compensation.
pub fn scale_weight_partial_sum(n: usize) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for i in (1..=n).rev() {
        let y = scale_weight(i) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Recombination identity over the grid `q ∈ {2,3,5,10}`, `d ∈ {3,6,10}`,
/// `C ∈ {1,20}` at `α = 1`, `ε = 0.2`, `L = 24`; growth constant for
/// `d >= 6`; partial sums of `a_i`; `q¹⁰` homogeneity of `Γ`.
pub fn identity_checks() -> Result<IdentityReport> {
    let mut recombination = Vec::new();
    for q in [2.0, 3.0, 5.0, 10.0] {
        for d in [3, 6, 10] {
            for c in [1.0, 20.0] {
                let p = ConstParams { q, c, d, alpha: LogScalar::ONE, eps: 0.2, l: pos(24.0), ..Default::default() };
                let lhs = pos(4.0) / recombination_fraction(&p)?;
                let rhs = binary_poincare(&p)?;
                let rel_diff = (lhs.ln_abs() - rhs.ln_abs()).exp() - 1.0;
                recombination.push(RecombinationRow {
                    q,
                    d,
                    c,
                    ln_four_over_cprime: lhs.ln_abs(),
                    ln_pi: rhs.ln_abs(),
                    rel_diff,
                    equal: rel_diff.abs() <= IDENTITY_REL_TOL,
                    dominated: lhs <= rhs,
                });
            }
        }
    }
    let free_point_growth: Vec<(usize, f64)> = (6..=20).map(|d| (d, free_point_growth(d).ln_abs())).collect();
    let k_floor = 3500f64.ln();
    let scale_weight_sum = scale_weight_partial_sum(SCALE_SUM_TERMS);

    let base = ConstParams { q: 3.0, c: 2.0, k_uncond: 1.5, d: 6, alpha: pos(0.5), eps: 0.2, l: pos(10.0), ..Default::default() };
    let doubled = ConstParams { q: 6.0, ..base };
    let g1 = poincare_gamma(&base)?.ln_abs();
    let g2 = poincare_gamma(&doubled)?.ln_abs();
    let q_homogeneity_diff = g2 - g1;

    Ok(IdentityReport {
        recombination_equal: recombination.iter().all(|r| r.equal),
        recombination_dominated: recombination.iter().all(|r| r.dominated),
        recombination,
        free_point_growth_ok: free_point_growth.iter().all(|&(_, l)| l >= k_floor),
        free_point_growth,
        scale_weight_sum_ok: (scale_weight_sum - 1.0).abs() <= 2e-6 && scale_weight_sum <= 1.0,
        scale_weight_sum,
        q_homogeneity_ok: (q_homogeneity_diff - 10.0 * LN_2).abs() <= 1e-12 * g2.abs().max(1.0),
        q_homogeneity_diff,
        eps_d: PAPER_EPS,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineRow {
    pub q: f64,
    pub ln_gamma: f64,
    pub ln_baseline_general: f64,
    pub ln_baseline_concave: f64,
    /// `ln(general bound) / ln Γ`.
    pub log_ratio: f64,
}

/// `ln Γ` against both baseline bounds along `q_grid`, other parameters from
/// `template` (which must carry `gap_ratio`).
pub fn baseline_comparison(q_grid: &[f64], template: &ConstParams) -> Result<Vec<BaselineRow>> {
    q_grid
        .iter()
        .map(|&q| {
            let p = ConstParams { q, ..*template };
            let ln_gamma = poincare_gamma(&p)?.ln_abs();
            let ln_general = baseline_general(&p)?.ln_abs();
            Ok(BaselineRow {
                q,
                ln_gamma,
                ln_baseline_general: ln_general,
                ln_baseline_concave: baseline_concave(&p)?.ln_abs(),
                log_ratio: ln_general / ln_gamma,
            })
        })
        .collect()
}
