//! Adjacency spectra, Cheeger constants and the spectral facts used for
//! random regular graphs.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{lanczos_extremal, symmetric_eigen, Extremal, LanczosOptions, SymMatrix};
use crate::error::{Error, Result};
use crate::graph::RegularGraph;

/// Largest `n` handled by the dense solver.
pub const DENSE_LIMIT: usize = 4096;
/// Largest `n` for the exhaustive Cheeger scan.
pub const CHEEGER_EXACT_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMethod {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub method: SpectralMethod,
    /// All eigenvalues, ascending (dense method only).
    pub eigenvalues: Option<Vec<f64>>,
    pub lambda1: f64,
    /// Second largest eigenvalue by value, with multiplicity.
    pub lambda2: f64,
    pub lambda_min: f64,
    /// `max(|λ2|, |λn|)`.
    pub lambda: f64,
    /// Residual bound on `lambda2` and `lambda_min` (0 for the dense method).
    pub residual: f64,
}

/// `y = A x`.
pub fn apply_adjacency(g: &RegularGraph, x: &[f64], y: &mut [f64]) {
    for (v, out) in g.adjacency().iter().zip(y.iter_mut()) {
        *out = v.iter().map(|&w| x[w]).sum();
    }
}

pub fn adjacency_matrix(g: &RegularGraph) -> SymMatrix {
    let mut a = SymMatrix::zeros(g.n());
    for e in g.edges() {
        a.set(e.lo, e.hi, 1.0);
    }
    a
}

/// Full spectrum for `n <= DENSE_LIMIT`, extremal pairs on `1^⊥` otherwise.
pub fn eigen_summary(g: &RegularGraph, tol: f64) -> Result<SpectralSummary> {
    if g.n() <= DENSE_LIMIT {
        dense_summary(g)
    } else {
        lanczos_summary(g, tol)
    }
}

pub fn dense_summary(g: &RegularGraph) -> Result<SpectralSummary> {
    let values = symmetric_eigen(&adjacency_matrix(g), false)?.values;
    let n = values.len();
    let lambda2 = values[n - 2];
    let lambda_min = values[0];
    Ok(SpectralSummary {
        method: SpectralMethod::Dense,
        lambda1: values[n - 1],
        lambda2,
        lambda_min,
        lambda: lambda2.abs().max(lambda_min.abs()),
        residual: 0.0,
        eigenvalues: Some(values),
    })
}

/// `λ2` and `λn` as the extremal eigenvalues of `A` on `1^⊥`, which holds
/// for every regular graph since `1` is an eigenvector for `d`.
pub fn lanczos_summary(g: &RegularGraph, tol: f64) -> Result<SpectralSummary> {
    let ext = extremal_on_mean_zero(g, tol)?;
    Ok(SpectralSummary {
        method: SpectralMethod::Lanczos,
        eigenvalues: None,
        lambda1: g.d() as f64,
        lambda2: ext.max.value,
        lambda_min: ext.min.value,
        lambda: ext.max.value.abs().max(ext.min.value.abs()),
        residual: ext.max.residual.max(ext.min.residual),
    })
}

pub fn extremal_on_mean_zero(g: &RegularGraph, tol: f64) -> Result<Extremal> {
    let n = g.n();
    let ones = vec![1.0 / (n as f64).sqrt(); n];
    lanczos_extremal(n, |x, y| apply_adjacency(g, x, y), &[ones], LanczosOptions { tol, ..Default::default() })
}

/// Eigenvector for `λ2`, unit norm and orthogonal to `1`.
pub fn second_eigenvector(g: &RegularGraph) -> Result<(f64, Vec<f64>)> {
    if g.n() <= DENSE_LIMIT {
        let e = symmetric_eigen(&adjacency_matrix(g), true)?;
        let n = g.n();
        let vecs = e.vectors.expect("vectors requested");
        // Inside a repeated top eigenvalue pick a vector orthogonal to 1.
        let mut v = vecs[n - 2].clone();
        let mean = v.iter().sum::<f64>() / n as f64;
        if mean.abs() > 1e-9 {
            let top = &vecs[n - 1];
            let c: f64 = v.iter().sum::<f64>() / top.iter().sum::<f64>();
            v.iter_mut().zip(top).for_each(|(x, t)| *x -= c * t);
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= nv);
        }
        Ok((e.values[n - 2], v))
    } else {
        let ext = extremal_on_mean_zero(g, 1e-10)?;
        Ok((ext.max.value, ext.max.vector))
    }
}

/// `numerator / denominator` with the witness attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheegerValue {
    pub cut_edges: usize,
    pub set_size: usize,
    pub value: f64,
    pub witness: Vec<usize>,
    pub exact: bool,
}

fn better(cut: usize, size: usize, best: &Option<(usize, usize, u64)>) -> bool {
    match best {
        None => true,
        Some((bc, bs, _)) => (cut as u128) * (*bs as u128) < (*bc as u128) * (size as u128),
    }
}

/// `h(G) = min_{0 < |S| <= n/2} |∂S| / |S|` by a Gray-code scan of all subsets.
pub fn cheeger_exact(g: &RegularGraph) -> Result<CheegerValue> {
    let n = g.n();
    if n > CHEEGER_EXACT_LIMIT {
        return Err(Error::SizeLimit {
            what: "cheeger_exact",
            size: n,
            max: CHEEGER_EXACT_LIMIT,
            hint: "use cheeger_upper for a heuristic upper bound",
        });
    }
    let masks = g.neighbor_masks();
    let d = g.d() as i64;
    let mut set: u64 = 0;
    let mut cut: i64 = 0;
    let mut best: Option<(usize, usize, u64)> = None;
    for i in 1u64..(1u64 << n) {
        let v = i.trailing_zeros() as usize;
        let inside = (masks[v] & set).count_ones() as i64;
        if set >> v & 1 == 0 {
            cut += d - 2 * inside;
        } else {
            cut -= d - 2 * inside;
        }
        set ^= 1 << v;
        let size = set.count_ones() as usize;
        if 2 * size <= n && better(cut as usize, size, &best) {
            best = Some((cut as usize, size, set));
        }
    }
    let (cut_edges, set_size, mask) = best.expect("n >= 3 so some subset qualifies");
    Ok(CheegerValue {
        cut_edges,
        set_size,
        value: cut_edges as f64 / set_size as f64,
        witness: (0..n).filter(|&v| mask >> v & 1 == 1).collect(),
        exact: true,
    })
}

fn cut_size(g: &RegularGraph, inside: &[bool]) -> usize {
    g.edges().iter().filter(|e| inside[e.lo] != inside[e.hi]).count()
}

/// Upper bound on `h(G)`: sweep cuts along the second eigenvector, then along
/// random BFS orders from `restarts` seeds.
pub fn cheeger_upper<R: Rng + ?Sized>(g: &RegularGraph, restarts: usize, rng: &mut R) -> Result<CheegerValue> {
    let n = g.n();
    let (_, fiedler) = second_eigenvector(g)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fiedler[a].total_cmp(&fiedler[b]));
    let mut orders = vec![order.clone(), order.into_iter().rev().collect()];
    for _ in 0..restarts {
        let start = rng.gen_range(0..n);
        let mut seen = vec![false; n];
        let mut bfs = vec![start];
        seen[start] = true;
        let mut head = 0;
        while bfs.len() < n {
            if head == bfs.len() {
                let rest: Vec<usize> = (0..n).filter(|&v| !seen[v]).collect();
                let v = *rest.choose(rng).expect("unseen vertex remains");
                seen[v] = true;
                bfs.push(v);
            }
            let v = bfs[head];
            head += 1;
            let mut nbrs = g.adjacency()[v].clone();
            nbrs.shuffle(rng);
            for w in nbrs {
                if !seen[w] {
                    seen[w] = true;
                    bfs.push(w);
                }
            }
        }
        orders.push(bfs);
    }
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    for order in &orders {
        let mut inside = vec![false; n];
        let mut cut: i64 = 0;
        for (k, &v) in order.iter().take(n / 2).enumerate() {
            let into = g.adjacency()[v].iter().filter(|&&w| inside[w]).count() as i64;
            cut += g.d() as i64 - 2 * into;
            inside[v] = true;
            let size = k + 1;
            let is_better = match &best {
                None => true,
                Some((bc, bs, _)) => (cut as u128) * (*bs as u128) < (*bc as u128) * (size as u128),
            };
            if is_better {
                best = Some((cut as usize, size, order[..size].to_vec()));
            }
        }
    }
    let (cut_edges, set_size, mut witness) = best.expect("n >= 3");
    witness.sort_unstable();
    let mut inside = vec![false; n];
    witness.iter().for_each(|&v| inside[v] = true);
    debug_assert_eq!(cut_size(g, &inside), cut_edges);
    Ok(CheegerValue { cut_edges, set_size, value: cut_edges as f64 / set_size as f64, witness, exact: false })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheegerSandwich {
    pub lambda2: f64,
    pub lower: f64,
    pub h: f64,
    pub h_exact: bool,
    pub upper: f64,
    /// `None` when `h` is only an upper bound.
    pub lower_holds: Option<bool>,
    pub upper_holds: bool,
    pub lower_slack: f64,
    pub upper_slack: f64,
}

impl CheegerSandwich {
    pub fn holds(&self) -> bool {
        self.upper_holds && self.lower_holds.unwrap_or(true)
    }
}

const SANDWICH_TOL: f64 = 1e-9;

/// `(d − λ2)/2 <= h(G) <= √(2d(d − λ2))`, with `h` exact for small `n`.
pub fn cheeger_sandwich_check(g: &RegularGraph) -> Result<CheegerSandwich> {
    let s = eigen_summary(g, 1e-10)?;
    let h = if g.n() <= CHEEGER_EXACT_LIMIT {
        cheeger_exact(g)?
    } else {
        cheeger_upper(g, 8, &mut crate::rng::RngState::new(0).rng())?
    };
    let d = g.d() as f64;
    let gap = (d - s.lambda2).max(0.0);
    let lower = gap / 2.0;
    let upper = (2.0 * d * gap).sqrt();
    Ok(CheegerSandwich {
        lambda2: s.lambda2,
        lower,
        h: h.value,
        h_exact: h.exact,
        upper,
        lower_holds: h.exact.then_some(lower <= h.value + SANDWICH_TOL),
        upper_holds: h.value <= upper + SANDWICH_TOL,
        lower_slack: h.value - lower,
        upper_slack: upper - h.value,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FriedmanReport {
    pub method: SpectralMethod,
    pub lambda: f64,
    pub lambda2: f64,
    pub residual: f64,
    pub ramanujan_threshold: f64,
    pub passes: bool,
    /// `2.1√(d−1)`.
    pub strong_threshold: f64,
    pub passes_strong: bool,
    /// Same threshold applied to `λ2` alone; differs from `passes_strong`
    /// only when the bottom of the spectrum dominates.
    pub lambda2_passes_strong: bool,
}

/// Dense solver up to this size, Lanczos above.
const FRIEDMAN_DENSE_LIMIT: usize = 300;

/// `λ(G) <= 2√(d−1) + slack`, alongside the `2.1√(d−1)` threshold.
/// The Lanczos residual is added to `λ(G)` before comparing.
pub fn friedman_check(g: &RegularGraph, slack: f64) -> Result<FriedmanReport> {
    let s = if g.n() <= FRIEDMAN_DENSE_LIMIT { dense_summary(g)? } else { lanczos_summary(g, 1e-8)? };
    Ok(friedman_from_summary(g.d(), &s, slack))
}

pub fn friedman_from_summary(d: usize, s: &SpectralSummary, slack: f64) -> FriedmanReport {
    let root = ((d - 1) as f64).sqrt();
    let ramanujan_threshold = 2.0 * root + slack;
    let strong_threshold = 2.1 * root;
    let lam = s.lambda + s.residual;
    FriedmanReport {
        method: s.method,
        lambda: s.lambda,
        lambda2: s.lambda2,
        residual: s.residual,
        ramanujan_threshold,
        passes: lam <= ramanujan_threshold,
        strong_threshold,
        passes_strong: lam <= strong_threshold,
        lambda2_passes_strong: s.lambda2 + s.residual <= strong_threshold,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkSumReport {
    pub steps: usize,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

const UNIT_TOL: f64 = 1e-9;

/// `‖Σ_{k=1}^ℓ A^k y‖² <= 4(4.41(d−1))^ℓ` for unit mean-zero `y`, given
/// `λ(G)` (or computing it).
pub fn walk_sum_bound_check(
    g: &RegularGraph,
    y: &[f64],
    steps: usize,
    lambda: Option<f64>,
) -> Result<WalkSumReport> {
    let n = g.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    let norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::Precondition(format!("‖y‖ = {norm}, expected 1")));
    }
    let sum: f64 = y.iter().sum();
    if sum.abs() > UNIT_TOL * (n as f64).sqrt() {
        return Err(Error::Precondition(format!("Σ y = {sum:.3e}, expected 0")));
    }
    let lam = match lambda {
        Some(l) => l,
        None => friedman_check(g, 0.0)?.lambda,
    };
    let d = g.d() as f64;
    if lam > 2.1 * (d - 1.0).sqrt() {
        return Err(Error::Precondition(format!("λ(G) = {lam} exceeds 2.1√(d−1)")));
    }
    let mut power = y.to_vec();
    let mut next = vec![0.0; n];
    let mut acc = vec![0.0; n];
    for _ in 0..steps {
        apply_adjacency(g, &power, &mut next);
        std::mem::swap(&mut power, &mut next);
        acc.iter_mut().zip(&power).for_each(|(a, p)| *a += p);
    }
    let value: f64 = acc.iter().map(|x| x * x).sum();
    let bound = 4.0 * (4.41 * (d - 1.0)).powi(steps as i32);
    Ok(WalkSumReport { steps, value, bound, holds: value <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::{complete, complete_bipartite, disjoint_copies, petersen};
    use crate::random_graphs::sample_simple_regular;
    use crate::rng::RngState;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_spectra() {
        let k4 = dense_summary(&complete(4)).unwrap();
        assert_abs_diff_eq!(k4.lambda1, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k4.lambda2, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k4.lambda, 1.0, epsilon = 1e-12);

        let p = dense_summary(&petersen()).unwrap();
        let ev = p.eigenvalues.as_ref().unwrap();
        assert_eq!(ev.iter().filter(|x| (*x - 1.0).abs() < 1e-9).count(), 5);
        assert_eq!(ev.iter().filter(|x| (*x + 2.0).abs() < 1e-9).count(), 4);
        assert_abs_diff_eq!(p.lambda, 2.0, epsilon = 1e-12);

        let k33 = dense_summary(&complete_bipartite(3)).unwrap();
        assert_abs_diff_eq!(k33.lambda, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_identities_on_sampled_graph() {
        let g = sample_simple_regular(60, 5, &mut RngState::new(3).rng(), None).unwrap().graph;
        let s = dense_summary(&g).unwrap();
        let ev = s.eigenvalues.unwrap();
        assert!(ev.iter().sum::<f64>().abs() < 1e-6 * 60.0);
        let sq: f64 = ev.iter().map(|x| x * x).sum();
        assert!((sq - 300.0).abs() < 1e-6 * 300.0);
        assert!(ev.iter().all(|x| x.abs() <= 5.0 + 1e-9));
        assert!(s.lambda < 5.0);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        for (seed, n, d) in [(1, 40, 3), (2, 120, 4), (3, 250, 6)] {
            let g = sample_simple_regular(n, d, &mut RngState::new(seed).rng(), None).unwrap().graph;
            let a = dense_summary(&g).unwrap();
            let b = lanczos_summary(&g, 1e-9).unwrap();
            assert_abs_diff_eq!(a.lambda2, b.lambda2, epsilon = 1e-7);
            assert_abs_diff_eq!(a.lambda, b.lambda, epsilon = 1e-7);
        }
        // Disconnected: λ2 = d on 1^⊥.
        let two = disjoint_copies(&complete(4), 2);
        let b = lanczos_summary(&two, 1e-10).unwrap();
        assert_abs_diff_eq!(b.lambda2, 3.0, epsilon = 1e-8);
    }

    #[test]
    fn cheeger_values() {
        let k4 = cheeger_exact(&complete(4)).unwrap();
        assert_eq!((k4.cut_edges, k4.set_size), (4, 2));
        let p = cheeger_exact(&petersen()).unwrap();
        assert_abs_diff_eq!(p.value, 1.0);
        // The minimizer is a 5-set inducing a 5-cycle.
        assert_eq!(p.set_size, 5);
        let two = cheeger_exact(&disjoint_copies(&complete(4), 2)).unwrap();
        assert_eq!(two.value, 0.0);
        let big = sample_simple_regular(26, 3, &mut RngState::new(1).rng(), None).unwrap().graph;
        assert!(matches!(cheeger_exact(&big), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn cheeger_upper_dominates_exact() {
        for seed in 0..10 {
            let g = sample_simple_regular(16, 3, &mut RngState::new(seed).rng(), None).unwrap().graph;
            let exact = cheeger_exact(&g).unwrap();
            let up = cheeger_upper(&g, 4, &mut RngState::new(seed).rng()).unwrap();
            assert!(up.value >= exact.value - 1e-12);
        }
    }

    #[test]
    fn sandwich_on_named_graphs() {
        let k4 = cheeger_sandwich_check(&complete(4)).unwrap();
        assert_abs_diff_eq!(k4.lower, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(k4.upper, 24f64.sqrt(), epsilon = 1e-9);
        assert!(k4.holds());
        let p = cheeger_sandwich_check(&petersen()).unwrap();
        assert_abs_diff_eq!(p.lower, 1.0, epsilon = 1e-9);
        assert!(p.holds());
    }

    #[test]
    fn friedman_thresholds() {
        let k33 = friedman_check(&complete_bipartite(3), 0.1).unwrap();
        assert!(!k33.passes && !k33.passes_strong);
        let k4 = friedman_check(&complete(4), 0.0).unwrap();
        assert!(k4.passes_strong);
    }

    #[test]
    fn walk_sums() {
        let k4 = complete(4);
        let s = 0.5f64.sqrt();
        let r = walk_sum_bound_check(&k4, &[s, -s, 0.0, 0.0], 1, None).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.bound, 35.28, epsilon = 1e-9);
        assert!(r.holds);

        let p = petersen();
        let (_, y) = second_eigenvector(&p).unwrap();
        let r = walk_sum_bound_check(&p, &y, 3, None).unwrap();
        // A y = y, so the walk sum is 3y.
        assert_abs_diff_eq!(r.value, 9.0, epsilon = 1e-9);
        assert!(r.holds);

        assert!(matches!(walk_sum_bound_check(&k4, &[1.0, 0.0, 0.0, 0.0], 1, None), Err(Error::Precondition(_))));
        let k33 = complete_bipartite(3);
        let y = [s, -s, 0.0, 0.0, 0.0, 0.0];
        assert!(matches!(walk_sum_bound_check(&k33, &y, 1, None), Err(Error::Precondition(_))));
    }
}
