//! `{−1,0,1}`-valued fields, empirical medians, and the unary sign-run
//! encoding of a real field into `X(ℓ₁^m)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::RegularGraph;
use crate::norms::{eval_norm, UncondNorm};
use crate::poincare::VectorField;

/// A map `V → {−1,0,1}^k`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryField {
    pub n: usize,
    pub k: usize,
    pub values: Vec<i8>,
}

impl BinaryField {
    pub fn new(n: usize, k: usize, values: Vec<i8>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("field dimension must be positive".into()));
        }
        if values.len() != n * k {
            return Err(Error::DimensionMismatch { expected: n * k, got: values.len() });
        }
        if let Some(x) = values.iter().find(|x| !(-1..=1).contains(*x)) {
            return Err(Error::InvalidParameter(format!("entry {x} is not in {{-1, 0, 1}}")));
        }
        Ok(Self { n, k, values })
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let k = rows.first().map(|r| r.len()).ok_or(Error::EmptySet("field rows"))?;
        if let Some(r) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, got: r.len() });
        }
        Self::new(rows.len(), k, rows.concat())
    }

    /// Rounds each entry of a real field; only exact `−1, 0, 1` are accepted.
    pub fn from_field(f: &VectorField) -> Result<Self> {
        let values = f
            .values
            .iter()
            .map(|&x| match x {
                x if x == 0.0 => Ok(0),
                x if x == 1.0 => Ok(1),
                x if x == -1.0 => Ok(-1),
                x => Err(Error::InvalidParameter(format!("entry {x} is not in {{-1, 0, 1}}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(f.n, f.k, values)
    }

    pub fn at(&self, v: usize) -> &[i8] {
        &self.values[v * self.k..(v + 1) * self.k]
    }

    pub fn get(&self, v: usize, j: usize) -> i8 {
        self.values[v * self.k + j]
    }

    pub fn row(&self, v: usize) -> Vec<f64> {
        self.at(v).iter().map(|&x| x as f64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0)
    }

    pub fn support(&self, v: usize) -> Vec<usize> {
        (0..self.k).filter(|&j| self.get(v, j) != 0).collect()
    }

    pub fn to_field(&self) -> VectorField {
        VectorField { n: self.n, k: self.k, values: self.values.iter().map(|&x| x as f64).collect() }
    }

    /// Columns where fewer than `n/2` entries are `>= 0` or `<= 0`.
    pub fn median_violations(&self) -> Vec<usize> {
        median_violations(&self.to_field())
    }
}

/// Columns `j` with `min(|{f_j >= 0}|, |{f_j <= 0}|) < n/2`.
pub fn median_violations(f: &VectorField) -> Vec<usize> {
    (0..f.k)
        .filter(|&j| {
            let nonneg = (0..f.n).filter(|&v| f.at(v)[j] >= 0.0).count();
            let nonpos = (0..f.n).filter(|&v| f.at(v)[j] <= 0.0).count();
            2 * nonneg.min(nonpos) < f.n
        })
        .collect()
}

/// Coordinatewise lower median (the `⌈n/2⌉`-th smallest value).
pub fn lower_median(f: &VectorField) -> Vec<f64> {
    (0..f.k)
        .map(|j| {
            let mut col: Vec<f64> = (0..f.n).map(|v| f.at(v)[j]).collect();
            col.sort_by(f64::total_cmp);
            col[(f.n - 1) / 2]
        })
        .collect()
}

/// `f` minus its lower median, after which `0` is an empirical median.
pub fn median_translate(f: &VectorField) -> Result<(VectorField, Vec<f64>)> {
    if f.n == 0 {
        return Err(Error::EmptySet("vertex set"));
    }
    let med = lower_median(f);
    let neg: Vec<f64> = med.iter().map(|m| -m).collect();
    let shifted = f.translated(&neg);
    let bad = median_violations(&shifted);
    if !bad.is_empty() {
        return Err(Error::Precondition(format!("median translation left columns {bad:?} unbalanced")));
    }
    Ok((shifted, med))
}

/// Largest accepted `k·m` for the encoded dimension.
pub const ENCODED_DIM_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinaryEncoding {
    /// A quarter of the smallest nonzero gap within a coordinate.
    pub delta: f64,
    pub m: usize,
    pub field: BinaryField,
    /// `‖(‖y_1‖₁, …, ‖y_k‖₁)‖_X` on `k` blocks of length `m`.
    pub lifted_norm: UncondNorm,
    /// `Σ_v ‖f(v)‖`.
    pub source_mass: f64,
    /// `δ Σ_v ‖f̃(v)‖`.
    pub encoded_mass: f64,
    /// `Σ_edges ‖Δf‖`.
    pub source_edges: f64,
    /// `δ Σ_edges ‖Δf̃‖`.
    pub encoded_edges: f64,
    /// `encoded_mass >= source_mass`.
    pub mass_holds: bool,
    /// `encoded_edges <= 3/2 · source_edges`.
    pub edges_hold: bool,
}

const SANDWICH_TOL: f64 = 1e-12;

/// Unary encoding: coordinate `j` of `f(v)` becomes `⌈|f(v)_j|/δ⌉` copies of
/// its sign followed by zeros, in a block of length `m = ⌈max|f|/δ⌉`.
pub fn binary_encode(g: &RegularGraph, f: &VectorField, nm: &UncondNorm) -> Result<BinaryEncoding> {
    if f.n != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: f.n });
    }
    if f.is_constant() {
        return Err(Error::Degenerate("a constant field has no coordinate gap".into()));
    }
    let (n, k) = (f.n, f.k);
    let mut min_gap = f64::INFINITY;
    for j in 0..k {
        let mut col: Vec<f64> = (0..n).map(|v| f.at(v)[j]).collect();
        col.sort_by(f64::total_cmp);
        col.dedup();
        min_gap = col.windows(2).map(|w| w[1] - w[0]).fold(min_gap, f64::min);
    }
    let delta = min_gap / 4.0;
    let max_abs = f.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let m = ((max_abs / delta).ceil() as usize).max(1);
    if k.saturating_mul(m) > ENCODED_DIM_LIMIT {
        return Err(Error::SizeLimit {
            what: "binary_encode",
            size: k.saturating_mul(m),
            max: ENCODED_DIM_LIMIT,
            hint: "quantize the field to a coarser grid",
        });
    }
    let mut values = vec![0i8; n * k * m];
    for v in 0..n {
        for j in 0..k {
            let x = f.at(v)[j];
            let run = (x.abs() / delta).ceil() as usize;
            let sign = if x > 0.0 { 1 } else { -1 };
            let base = v * k * m + j * m;
            values[base..base + run.min(m)].iter_mut().for_each(|e| *e = sign);
        }
    }
    let field = BinaryField::new(n, k * m, values)?;
    let lifted_norm = UncondNorm::lifted(nm.clone(), k, m)?;

    let source_mass = (0..n).map(|v| eval_norm(nm, f.at(v))).sum::<Result<f64>>()?;
    let encoded_mass = delta * (0..n).map(|v| eval_norm(&lifted_norm, &field.row(v))).sum::<Result<f64>>()?;
    let mut source_edges = 0.0;
    let mut encoded_edges = 0.0;
    for e in g.edges() {
        let d: Vec<f64> = f.at(e.lo).iter().zip(f.at(e.hi)).map(|(a, b)| a - b).collect();
        source_edges += eval_norm(nm, &d)?;
        let de: Vec<f64> = field.at(e.lo).iter().zip(field.at(e.hi)).map(|(a, b)| (a - b) as f64).collect();
        encoded_edges += eval_norm(&lifted_norm, &de)?;
    }
    encoded_edges *= delta;
    Ok(BinaryEncoding {
        delta,
        m,
        field,
        lifted_norm,
        source_mass,
        encoded_mass,
        source_edges,
        encoded_edges,
        mass_holds: encoded_mass >= source_mass * (1.0 - SANDWICH_TOL),
        edges_hold: encoded_edges <= 1.5 * source_edges * (1.0 + SANDWICH_TOL),
    })
}
