//! Truncated spectral decomposition of symmetrically normalized adjacency
//! matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::graph::Snapshot;

/// Above this many nodes the dense eigensolver is replaced by subspace iteration.
pub(crate) const DENSE_LIMIT: usize = 800;

const OVERSAMPLE: usize = 10;
const MAX_ITERS: usize = 500;
const TOL: f64 = 1e-10;

/// `D^{-1/2} A D^{-1/2}` in compressed sparse row form. Isolated nodes have
/// empty rows.
pub(crate) struct NormalizedAdjacency {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl NormalizedAdjacency {
    pub(crate) fn from_snapshot(snap: &Snapshot) -> Self {
        let n = snap.num_nodes();
        let mut degree = vec![0usize; n];
        for &(u, v) in snap.edges() {
            degree[u.index()] += 1;
            degree[v.index()] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        for p in 0..n {
            row_ptr[p + 1] = row_ptr[p] + degree[p];
        }
        let mut fill = row_ptr.clone();
        let mut cols = vec![0usize; row_ptr[n]];
        let mut vals = vec![0f64; row_ptr[n]];
        for &(u, v) in snap.edges() {
            let (u, v) = (u.index(), v.index());
            let w = 1.0 / ((degree[u] * degree[v]) as f64).sqrt();
            cols[fill[u]] = v;
            vals[fill[u]] = w;
            fill[u] += 1;
            cols[fill[v]] = u;
            vals[fill[v]] = w;
            fill[v] += 1;
        }
        // Edges are sorted, but each row receives entries from two passes.
        for p in 0..n {
            let (lo, hi) = (row_ptr[p], row_ptr[p + 1]);
            let mut row: Vec<(usize, f64)> = cols[lo..hi].iter().copied().zip(vals[lo..hi].iter().copied()).collect();
            row.sort_by_key(|e| e.0);
            for (k, (c, w)) in row.into_iter().enumerate() {
                cols[lo + k] = c;
                vals[lo + k] = w;
            }
        }
        NormalizedAdjacency { n, row_ptr, cols, vals }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] = self.vals[k];
            }
        }
        m
    }

    fn mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, x.ncols());
        for c in 0..x.ncols() {
            let col = x.column(c);
            for r in 0..self.n {
                let mut acc = 0.0;
                for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                    acc += self.vals[k] * col[self.cols[k]];
                }
                out[(r, c)] = acc;
            }
        }
        out
    }
}

/// Order eigenpairs by decreasing magnitude, breaking ties by signed value
/// then original position.
fn top_by_magnitude(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .abs()
            .total_cmp(&values[a].abs())
            .then(values[b].total_cmp(&values[a]))
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order
}

/// Top-`k` eigenpairs (by |λ|) of the operator. Returns eigenvalues and an
/// `n × k` matrix of orthonormal eigenvectors.
pub(crate) fn top_eigenpairs(op: &NormalizedAdjacency, k: usize, seed: u64) -> (Vec<f64>, DMatrix<f64>) {
    if op.n <= DENSE_LIMIT {
        dense_top(op, k)
    } else {
        subspace_top(op, k, seed)
    }
}

fn dense_top(op: &NormalizedAdjacency, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(op.to_dense());
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = top_by_magnitude(&values, k);
    let vecs = DMatrix::from_fn(op.n, k, |r, c| eig.eigenvectors[(r, order[c])]);
    (order.iter().map(|&i| values[i]).collect(), vecs)
}

fn orthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

/// Block subspace iteration with Rayleigh–Ritz extraction.
pub(crate) fn subspace_top(op: &NormalizedAdjacency, k: usize, seed: u64) -> (Vec<f64>, DMatrix<f64>) {
    let n = op.n;
    let block = (k + OVERSAMPLE).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = DMatrix::from_fn(n, block, |_, _| StandardNormal.sample(&mut rng));
    let mut q = orthonormalize(start);
    let mut prev: Option<Vec<f64>> = None;
    let mut ritz = (Vec::new(), DMatrix::zeros(block, block));

    for it in 0..MAX_ITERS {
        q = orthonormalize(op.mul(&q));
        if it % 5 == 4 || it + 1 == MAX_ITERS {
            let t = q.transpose() * op.mul(&q);
            let t = (&t + t.transpose()) * 0.5;
            let eig = SymmetricEigen::new(t);
            let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            let order = top_by_magnitude(&values, k);
            let top: Vec<f64> = order.iter().map(|&i| values[i]).collect();
            let converged = prev
                .as_ref()
                .is_some_and(|p| p.iter().zip(&top).all(|(a, b)| (a - b).abs() <= TOL * b.abs().max(1.0)));
            let vecs = DMatrix::from_fn(block, k, |r, c| eig.eigenvectors[(r, order[c])]);
            ritz = (top.clone(), vecs);
            prev = Some(top);
            if converged {
                break;
            }
        }
    }
    let (values, small) = ritz;
    (values, &q * small)
}

/// Rank-`dim` spectral coordinates: eigenvectors scaled by `sqrt(|λ|)`.
pub(crate) fn spectral_coordinates(snap: &Snapshot, dim: usize, seed: u64) -> DMatrix<f64> {
    let op = NormalizedAdjacency::from_snapshot(snap);
    let (values, mut vecs) = top_eigenpairs(&op, dim, seed);
    for (c, lambda) in values.iter().enumerate() {
        let s = lambda.abs().sqrt();
        vecs.column_mut(c).scale_mut(s);
    }
    vecs
}
