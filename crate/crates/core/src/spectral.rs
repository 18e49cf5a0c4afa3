//! Second-smallest eigenvalue of the symmetric normalized Laplacian
//! `N = D^{-1/2} (D - A) D^{-1/2}` and the spectral lower bound on temporal
//! conductance derived from it.
//!
//! The eigensolver is a Lanczos iteration with full reorthogonalization that
//! runs in the orthogonal complement of the known null vector `D^{1/2} 1`.
//! Nodes with zero volume are dropped from the operator; when the remaining
//! support splits into several components the result is exactly zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{eta, AggregatedGraph, NormalizationConfig};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigResult {
    pub lambda2: f64,
    /// `||N x - lambda2 x|| / ||x||` for the returned Ritz vector.
    pub residual: f64,
    pub iterations: usize,
}

impl EigResult {
    fn exact_zero() -> Self {
        EigResult { lambda2: 0.0, residual: 0.0, iterations: 0 }
    }
}

/// Which Laplacian a [`LaplacianView`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    Unnormalized,
    Normalized,
}

/// Matrix-free Laplacian of an aggregated graph restricted to its support.
#[derive(Debug)]
pub struct LaplacianView<'a> {
    source: &'a AggregatedGraph,
    kind: LaplacianKind,
    support: Vec<usize>,
    local: Vec<usize>,
    inv_sqrt_vol: Vec<f64>,
}

impl<'a> LaplacianView<'a> {
    pub fn new(source: &'a AggregatedGraph, kind: LaplacianKind) -> Self {
        let support = source.support();
        let mut local = vec![usize::MAX; source.node_count()];
        for (i, &u) in support.iter().enumerate() {
            local[u] = i;
        }
        let inv_sqrt_vol = support.iter().map(|&u| source.volume(u).sqrt().recip()).collect();
        LaplacianView { source, kind, support, local, inv_sqrt_vol }
    }

    /// Dimension of the operator (number of positive-volume nodes).
    pub fn dim(&self) -> usize {
        self.support.len()
    }

    /// Original node index of each operator row.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// `y = L x` for the selected Laplacian.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, &u) in self.support.iter().enumerate() {
            let mut acc = 0.0;
            match self.kind {
                LaplacianKind::Normalized => {
                    for (v, w) in self.source.neighbors(u) {
                        let j = self.local[v];
                        acc += w * self.inv_sqrt_vol[j] * x[j];
                    }
                    y[i] = x[i] - self.inv_sqrt_vol[i] * acc;
                }
                LaplacianKind::Unnormalized => {
                    for (v, w) in self.source.neighbors(u) {
                        acc += w * x[self.local[v]];
                    }
                    y[i] = self.source.volume(u) * x[i] - acc;
                }
            }
        }
    }

    /// Unit null vector of the normalized Laplacian, `D^{1/2} 1 / ||.||`.
    fn null_vector(&self) -> Vec<f64> {
        let mut q: Vec<f64> = self.support.iter().map(|&u| self.source.volume(u).sqrt()).collect();
        normalize(&mut q);
        q
    }
}

/// Second-smallest eigenvalue of the normalized Laplacian of `ag`.
pub fn lambda2(ag: &AggregatedGraph, tol: f64) -> Result<EigResult> {
    if ag.node_count() < 2 {
        return Err(Error::invalid("lambda2 needs at least two nodes"));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let view = LaplacianView::new(ag, LaplacianKind::Normalized);
    if view.dim() < 2 || support_components(ag, &view) > 1 {
        return Ok(EigResult::exact_zero());
    }
    lanczos_smallest(&view, tol, 10 * ag.node_count())
}

fn support_components(ag: &AggregatedGraph, view: &LaplacianView<'_>) -> usize {
    let (count, _) = ag.components();
    // isolated nodes each form one component of their own
    count - (ag.node_count() - view.dim())
}

/// Lower bound `eta * lambda2 / 2` on the temporal conductance of any node set
/// over the interval of `ag`.
pub fn cheeger_lower_bound(ag: &AggregatedGraph, cfg: &NormalizationConfig, tol: f64) -> Result<f64> {
    let eig = lambda2(ag, tol)?;
    Ok(eta(ag.interval(), cfg) * eig.lambda2 / 2.0)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        a.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            w.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
        }
    }
}

fn random_unit_orthogonal(rng: &mut ChaCha8Rng, dim: usize, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(&mut v, basis);
        if normalize(&mut v) > 1e-8 {
            return Some(v);
        }
    }
    None
}

fn lanczos_smallest(view: &LaplacianView<'_>, tol: f64, max_iter: usize) -> Result<EigResult> {
    let dim = view.dim();
    let target = dim - 1; // dimension of the complement of the null vector
    let mut rng = ChaCha8Rng::seed_from_u64(0x0001_a2c0_5eed ^ dim as u64);

    // basis[0] is the deflated null vector; Krylov vectors follow
    let mut basis = vec![view.null_vector()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new(); // betas[j] couples q_j and q_{j+1}

    let mut q = random_unit_orthogonal(&mut rng, dim, &basis)
        .ok_or(Error::EigenNotConverged { iterations: 0, residual: f64::NAN })?;
    let mut w = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;

    for j in 0..max_iter.max(target) {
        basis.push(q.clone());
        view.apply(&q, &mut w);
        let alpha = dot(&w, &q);
        alphas.push(alpha);
        orthogonalize(&mut w, &basis);
        let m = alphas.len();

        let beta = norm(&w);
        let (theta, s) = smallest_tridiagonal_eigenpair(&alphas, &betas);
        let estimate = (beta * s[m - 1]).abs();
        let exhausted = m >= target;
        let breakdown = beta <= 1e-10 * (1.0 + alpha.abs());

        if estimate <= 0.5 * tol || exhausted {
            let residual = ritz_residual(view, &basis[1..], &s, theta);
            last_residual = residual;
            if residual <= tol {
                return Ok(EigResult { lambda2: theta.clamp(0.0, 2.0), residual, iterations: j + 1 });
            }
            if exhausted {
                break;
            }
        }

        if breakdown {
            // invariant subspace found: restart in the remaining complement
            betas.push(0.0);
            match random_unit_orthogonal(&mut rng, dim, &basis) {
                Some(next) => q = next,
                None => break,
            }
        } else {
            betas.push(beta);
            q = w.iter().map(|x| x / beta).collect();
        }
    }
    Err(Error::EigenNotConverged { iterations: alphas.len(), residual: last_residual })
}

fn ritz_residual(view: &LaplacianView<'_>, krylov: &[Vec<f64>], s: &[f64], theta: f64) -> f64 {
    let dim = view.dim();
    let mut x = vec![0.0; dim];
    for (qk, &sk) in krylov.iter().zip(s) {
        x.iter_mut().zip(qk).for_each(|(xi, qi)| *xi += sk * qi);
    }
    let xn = normalize(&mut x);
    if xn == 0.0 {
        return f64::INFINITY;
    }
    let mut y = vec![0.0; dim];
    view.apply(&x, &mut y);
    y.iter().zip(&x).map(|(yi, xi)| (yi - theta * xi).powi(2)).sum::<f64>().sqrt()
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`
/// (Sturm sequence count).
fn sturm_count(alphas: &[f64], betas: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..alphas.len() {
        let b2 = if i == 0 { 0.0 } else { betas[i - 1] * betas[i - 1] };
        d = alphas[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (1.0 + x.abs());
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue and unit eigenvector of the tridiagonal matrix with
/// diagonal `alphas` and off-diagonal `betas` (`betas.len() >= alphas.len() - 1`).
fn smallest_tridiagonal_eigenpair(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let off = |i: usize| if i < m - 1 { betas[i].abs() } else { 0.0 };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m {
        let r = off(i) + if i > 0 { off(i - 1) } else { 0.0 };
        lo = lo.min(alphas[i] - r);
        hi = hi.max(alphas[i] + r);
    }
    // bisection for the smallest eigenvalue
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alphas, &betas[..m - 1], mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let s = inverse_iteration(alphas, &betas[..m - 1], theta);
    (theta, s)
}

/// Eigenvector for an accurate eigenvalue estimate via two steps of inverse
/// iteration, solving the shifted tridiagonal system with partial pivoting.
fn inverse_iteration(alphas: &[f64], betas: &[f64], theta: f64) -> Vec<f64> {
    let m = alphas.len();
    if m == 1 {
        return vec![1.0];
    }
    let scale = alphas.iter().chain(betas).fold(1.0f64, |a, &b| a.max(b.abs()));
    let shift = theta - 1e-13 * scale;
    let mut x: Vec<f64> = (0..m).map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64).collect();
    normalize(&mut x);
    for _ in 0..3 {
        x = solve_tridiagonal(alphas, betas, shift, &x);
        normalize(&mut x);
    }
    x
}

fn solve_tridiagonal(alphas: &[f64], betas: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let m = alphas.len();
    // rows hold (sub, diag, super, super2) after pivoting
    let mut sub: Vec<f64> = (0..m).map(|i| if i > 0 { betas[i - 1] } else { 0.0 }).collect();
    let mut diag: Vec<f64> = alphas.iter().map(|a| a - shift).collect();
    let mut sup: Vec<f64> = (0..m).map(|i| if i + 1 < m { betas[i] } else { 0.0 }).collect();
    let mut sup2 = vec![0.0; m];
    let mut b = rhs.to_vec();
    let tiny = 1e-300;
    for i in 0..m - 1 {
        // eliminate sub[i+1] using row i, pivoting if row i+1 is larger
        if sub[i + 1].abs() > diag[i].abs() {
            // swap rows i and i+1
            let (d0, s0, s20, b0) = (diag[i], sup[i], sup2[i], b[i]);
            diag[i] = sub[i + 1];
            sup[i] = diag[i + 1];
            sup2[i] = sup[i + 1];
            b[i] = b[i + 1];
            sub[i + 1] = d0;
            diag[i + 1] = s0;
            sup[i + 1] = s20;
            b[i + 1] = b0;
        }
        let piv = if diag[i].abs() < tiny { tiny } else { diag[i] };
        let f = sub[i + 1] / piv;
        diag[i + 1] -= f * sup[i];
        sup[i + 1] -= f * sup2[i];
        b[i + 1] -= f * b[i];
        sub[i + 1] = 0.0;
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut acc = b[i];
        if i + 1 < m {
            acc -= sup[i] * x[i + 1];
        }
        if i + 2 < m {
            acc -= sup2[i] * x[i + 2];
        }
        let piv = if diag[i].abs() < tiny { tiny } else { diag[i] };
        x[i] = acc / piv;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Interval;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> AggregatedGraph {
        AggregatedGraph::from_edges(Interval::single(0), n, edges).unwrap()
    }

    fn complete(n: usize) -> AggregatedGraph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v, 1.0));
            }
        }
        graph(n, &e)
    }

    #[test]
    fn complete_graph_spectrum() {
        for n in [2, 3, 4, 7, 12] {
            let r = lambda2(&complete(n), DEFAULT_TOLERANCE).unwrap();
            let expect = n as f64 / (n as f64 - 1.0);
            assert!((r.lambda2 - expect).abs() < 1e-8, "K{n}: {} vs {expect}", r.lambda2);
            assert!(r.residual <= DEFAULT_TOLERANCE);
        }
    }

    #[test]
    fn path_p3() {
        let r = lambda2(&graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]), DEFAULT_TOLERANCE).unwrap();
        assert!((r.lambda2 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn disconnected_is_zero() {
        let g = graph(6, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]);
        assert_eq!(lambda2(&g, DEFAULT_TOLERANCE).unwrap().lambda2, 0.0);
        assert_eq!(cheeger_lower_bound(&g, &NormalizationConfig::default(), 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn isolated_nodes_are_excluded() {
        // K4 plus two isolated nodes behaves like K4
        let mut e = Vec::new();
        for u in 0..4 {
            for v in u + 1..4 {
                e.push((u, v, 1.0));
            }
        }
        let g = graph(6, &e);
        let r = lambda2(&g, DEFAULT_TOLERANCE).unwrap();
        assert!((r.lambda2 - 4.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn too_small_is_error() {
        let g = graph(1, &[]);
        assert!(matches!(lambda2(&g, 1e-8), Err(Error::InvalidArgument(_))));
        assert_eq!(lambda2(&graph(3, &[]), 1e-8).unwrap().lambda2, 0.0);
    }

    #[test]
    fn cheeger_bounds() {
        let cfg = NormalizationConfig::default();
        let k4 = cheeger_lower_bound(&complete(4), &cfg, 1e-8).unwrap();
        assert!((k4 - 2.0 / 3.0).abs() < 1e-8);
        let p3 = cheeger_lower_bound(&graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]), &cfg, 1e-8).unwrap();
        assert!((p3 - 0.5).abs() < 1e-8);
    }

    #[test]
    fn tridiagonal_smallest() {
        // 1D Laplacian tridiag(-1, 2, -1) of size 5: smallest = 2 - 2 cos(pi/6)
        let a = vec![2.0; 5];
        let b = vec![-1.0; 4];
        let (theta, s) = smallest_tridiagonal_eigenpair(&a, &b);
        let expect = 2.0 - 2.0 * (std::f64::consts::PI / 6.0).cos();
        assert!((theta - expect).abs() < 1e-13);
        // residual of the eigenvector
        for i in 0..5 {
            let mut y = a[i] * s[i];
            if i > 0 {
                y += b[i - 1] * s[i - 1];
            }
            if i < 4 {
                y += b[i] * s[i + 1];
            }
            assert!((y - theta * s[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn block_diagonal_tridiagonal() {
        let a = vec![3.0, 3.0, 0.5, 2.0];
        let b = vec![1.0, 0.0, 0.2];
        let (theta, s) = smallest_tridiagonal_eigenpair(&a, &b);
        let lower = 1.25 - (0.75f64.powi(2) + 0.04).sqrt();
        assert!((theta - lower).abs() < 1e-12);
        assert!(s[0].abs() < 1e-8 && s[1].abs() < 1e-8);
    }
}
