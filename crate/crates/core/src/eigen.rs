//! Symmetric eigensolvers: dense Householder tridiagonalization followed by
//! implicit-shift QL, and Lanczos with full reorthogonalization for the two
//! extremal eigenpairs on a deflated subspace.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RngState;

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Reads the upper triangle of `data` and mirrors it.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        let mut m = Self { n, data };
        for i in 0..n {
            for j in 0..i {
                m.data[i * n + j] = m.data[j * n + i];
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
        self.data[j * self.n + i] = x;
    }
}

/// Eigenvalues ascending; `vectors[i]` is the unit eigenvector of `values[i]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

const QL_MAX_SWEEPS: usize = 60;

/// Full eigendecomposition of a dense symmetric matrix.
pub fn symmetric_eigen(a: &SymMatrix, want_vectors: bool) -> Result<Eigen> {
    let n = a.n;
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: want_vectors.then(Vec::new) });
    }
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| a.data[i * n..(i + 1) * n].to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e, want_vectors);
    tridiagonal_ql(&mut d, &mut e, if want_vectors { Some(&mut v) } else { None })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| order.iter().map(|&c| (0..n).map(|r| v[r][c]).collect()).collect());
    Ok(Eigen { values, vectors })
}

/// Householder reduction to tridiagonal form. On return `d` is the diagonal,
/// `e[1..]` the subdiagonal, and `v` the accumulated orthogonal transform
/// when `accumulate` is set.
fn tridiagonalize(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[n - 1][j];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for x in e[..i].iter_mut() {
                *x = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for j in 0..n {
            d[j] = v[j][j];
        }
        e[0] = 0.0;
        return;
    }
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on a symmetric tridiagonal matrix with diagonal `d` and
/// subdiagonal `e[1..]`. Overwrites `d` with the eigenvalues (unsorted) and
/// rotates the columns of `v` when given.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut v: Option<&mut Vec<Vec<f64>>>) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > QL_MAX_SWEEPS {
                    return Err(Error::Resource {
                        what: "tridiagonal QL",
                        detail: format!("no convergence at index {l}; off-diagonal {:.3e}", e[l].abs()),
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for x in d[l + 2..].iter_mut() {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for row in v.iter_mut() {
                            let h = row[i + 1];
                            row[i + 1] = s * row[i] + c * h;
                            row[i] = c * row[i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigen-decomposition of the tridiagonal matrix with diagonal `alpha` and
/// off-diagonal `beta` (`beta.len() == alpha.len() - 1`).
pub fn tridiagonal_eigen(alpha: &[f64], beta: &[f64], want_vectors: bool) -> Result<Eigen> {
    let n = alpha.len();
    if beta.len() + 1 != n.max(1) {
        return Err(Error::DimensionMismatch { expected: n.saturating_sub(1), got: beta.len() });
    }
    let mut d = alpha.to_vec();
    let mut e = vec![0.0; n];
    e[1..].copy_from_slice(beta);
    let mut v: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    tridiagonal_ql(&mut d, &mut e, if want_vectors { Some(&mut v) } else { None })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| order.iter().map(|&c| (0..n).map(|r| v[r][c]).collect()).collect());
    Ok(Eigen { values, vectors })
}

/// An extremal Ritz pair with its residual norm `‖Ax − θx‖`.
#[derive(Debug, Clone)]
pub struct RitzPair {
    pub value: f64,
    pub residual: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Extremal {
    pub max: RitzPair,
    pub min: RitzPair,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 1000, seed: 0x1a9c_205 }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthogonalize(w: &mut [f64], against: &[f64]) {
    let c = dot(w, against);
    for (x, y) in w.iter_mut().zip(against) {
        *x -= c * y;
    }
}

/// Largest and smallest eigenpairs of the symmetric operator `apply`
/// restricted to the orthogonal complement of the unit vectors `deflate`.
///
/// Stops once both Ritz residuals are at most `tol`, or when the Krylov space
/// is exhausted (then the pairs are exact).
pub fn lanczos_extremal(
    n: usize,
    apply: impl Fn(&[f64], &mut [f64]),
    deflate: &[Vec<f64>],
    opts: LanczosOptions,
) -> Result<Extremal> {
    let dim = n.saturating_sub(deflate.len());
    if dim == 0 {
        return Err(Error::Degenerate("deflated subspace is empty".into()));
    }
    let mut rng = RngState::new(opts.seed).rng();
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    for u in deflate {
        orthogonalize(&mut q, u);
    }
    let nq = norm(&q);
    if nq == 0.0 {
        return Err(Error::Degenerate("start vector vanished after deflation".into()));
    }
    q.iter_mut().for_each(|x| *x /= nq);

    let limit = opts.max_iter.min(dim);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut best: Option<Extremal>;

    loop {
        let k = basis.len();
        apply(&basis[k - 1], &mut w);
        let a = dot(&w, &basis[k - 1]);
        alpha.push(a);
        // Two passes of classical Gram-Schmidt keep the basis orthogonal.
        for _ in 0..2 {
            for u in deflate {
                orthogonalize(&mut w, u);
            }
            for b in &basis {
                orthogonalize(&mut w, b);
            }
        }
        let b = norm(&w);
        let exhausted = k >= limit || b <= 1e-12 * (1.0 + a.abs());

        if exhausted || k % 10 == 0 || k == 1 {
            let t = tridiagonal_eigen(&alpha, &beta, true)?;
            let vecs = t.vectors.as_ref().expect("vectors requested");
            let res_scale = if exhausted && b <= 1e-12 * (1.0 + a.abs()) { 0.0 } else { b };
            let pair = |idx: usize| {
                let s = &vecs[idx];
                let mut x = vec![0.0; n];
                for (coef, qv) in s.iter().zip(&basis) {
                    for (xi, qi) in x.iter_mut().zip(qv) {
                        *xi += coef * qi;
                    }
                }
                RitzPair { value: t.values[idx], residual: (res_scale * s[k - 1]).abs(), vector: x }
            };
            let ext = Extremal { max: pair(k - 1), min: pair(0), iterations: k };
            let done = ext.max.residual <= opts.tol && ext.min.residual <= opts.tol;
            if done || (exhausted && res_scale == 0.0) {
                return Ok(ext);
            }
            best = Some(ext);
            if exhausted {
                break;
            }
        }
        beta.push(b);
        let next: Vec<f64> = w.iter().map(|x| x / b).collect();
        basis.push(next);
    }
    let best = best.expect("at least one Ritz evaluation");
    Err(Error::Resource {
        what: "lanczos_extremal",
        detail: format!(
            "{} iterations; best residuals {:.3e} (max), {:.3e} (min) above tol {:.1e}",
            best.iterations, best.max.residual, best.min.residual, opts.tol
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use proptest::prelude::*;

    fn matvec(a: &SymMatrix, x: &[f64]) -> Vec<f64> {
        (0..a.n()).map(|i| (0..a.n()).map(|j| a.get(i, j) * x[j]).sum()).collect()
    }

    #[test]
    fn diagonal_and_two_by_two() {
        let a = SymMatrix::from_rows(3, vec![3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        let e = symmetric_eigen(&a, false).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
        let b = SymMatrix::from_rows(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = symmetric_eigen(&b, true).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn path_laplacian_closed_form() {
        // Tridiagonal (−1, 2, −1) of size n has eigenvalues 2 − 2cos(kπ/(n+1)).
        let n = 9;
        let alpha = vec![2.0; n];
        let beta = vec![-1.0; n - 1];
        let e = tridiagonal_eigen(&alpha, &beta, false).unwrap();
        for (k, &x) in e.values.iter().enumerate() {
            let expect = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert_abs_diff_eq!(x, expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn lanczos_matches_dense_on_deflated_space() {
        // A = P B P + 100 u uᵀ with u = ones/√n and P the projector onto u^⊥, so
        // the spectrum on u^⊥ is everything but the top eigenvalue 100.
        let n = 40;
        let mut rng = RngState::new(11).rng();
        let u = vec![1.0 / (n as f64).sqrt(); n];
        let mut b = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let x = rng.gen::<f64>() - 0.5;
                b[i][j] = x;
                b[j][i] = x;
            }
        }
        let p = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 } - u[i] * u[j];
        let pb: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| p(i, k) * b[k][j]).sum()).collect()).collect();
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let x: f64 = (0..n).map(|k| pb[i][k] * p(k, j)).sum();
                a.set(i, j, x + 100.0 * u[i] * u[j]);
            }
        }
        let dense = symmetric_eigen(&a, false).unwrap().values;
        let ext = lanczos_extremal(
            n,
            |x, y| y.copy_from_slice(&matvec(&a, x)),
            &[u],
            LanczosOptions { tol: 1e-10, ..Default::default() },
        )
        .unwrap();
        assert_abs_diff_eq!(ext.max.value, dense[n - 2], epsilon = 1e-9);
        assert_abs_diff_eq!(ext.min.value, dense[0], epsilon = 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn eigenpairs_reconstruct(n in 1usize..12, seed in any::<u64>()) {
            let mut rng = RngState::new(seed).rng();
            let mut a = SymMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    a.set(i, j, rng.gen_range(-2.0..2.0));
                }
            }
            let e = symmetric_eigen(&a, true).unwrap();
            let trace: f64 = (0..n).map(|i| a.get(i, i)).sum();
            prop_assert!((e.values.iter().sum::<f64>() - trace).abs() < 1e-10);
            for (lam, v) in e.values.iter().zip(e.vectors.as_ref().unwrap()) {
                let av = matvec(&a, v);
                let r: f64 = av.iter().zip(v).map(|(x, y)| (x - lam * y).powi(2)).sum::<f64>().sqrt();
                prop_assert!(r < 1e-10, "residual {}", r);
                prop_assert!((norm(v) - 1.0).abs() < 1e-10);
            }
            let vals_only = symmetric_eigen(&a, false).unwrap().values;
            for (x, y) in vals_only.iter().zip(&e.values) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
