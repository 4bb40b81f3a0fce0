//! Dense real linear algebra helpers: sorted SVDs, thresholded ranks, kernels.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Singular values in descending order (padded with zeros up to `ncols`) and
/// the full `ncols × ncols` matrix of right singular vectors, columns ordered
/// to match.
pub fn right_svd(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (m, n) = a.shape();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    // Pad with zero rows so that the thin SVD returns a square V.
    let rows = m.max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m, n)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let sigma = order.iter().map(|&i| s[i]).collect();
    let v = DMatrix::from_fn(n, n, |r, c| vt[(order[c], r)]);
    (sigma, v)
}

/// Absolute singular-value cutoff for a relative tolerance. Entries of every
/// operator here are O(1), so the scale is floored at one.
pub fn cutoff(sigma: &[f64], rel: f64) -> f64 {
    let smax = sigma.first().copied().unwrap_or(0.0);
    rel * smax.max(1.0)
}

pub fn rank_of(sigma: &[f64], rel: f64) -> usize {
    let cut = cutoff(sigma, rel);
    sigma.iter().filter(|&&s| s > cut).count()
}

/// Rank with a loud failure when a singular value sits inside the window
/// `[cutoff/10, 10·cutoff]`.
pub fn strict_rank(sigma: &[f64], rel: f64, context: &'static str) -> Result<usize> {
    let cut = cutoff(sigma, rel);
    if let Some(&s) = sigma.iter().find(|&&s| s >= cut / 10.0 && s <= cut * 10.0) {
        return Err(Error::RankAmbiguity {
            context,
            sigma: s,
            cutoff: cut,
        });
    }
    Ok(sigma.iter().filter(|&&s| s > cut).count())
}

/// The `dim` right singular vectors belonging to the smallest singular values.
pub fn trailing_right_vectors(v: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    let n = v.ncols();
    v.columns(n - dim, dim).into_owned()
}

/// Orthonormal basis (as columns) of the numerical kernel of `a`.
pub fn kernel(a: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let (sigma, v) = right_svd(a);
    let r = rank_of(&sigma, rel);
    trailing_right_vectors(&v, a.ncols() - r)
}

/// Orthonormal basis of the kernel with a prescribed dimension.
pub fn kernel_of_dim(a: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    let (_, v) = right_svd(a);
    trailing_right_vectors(&v, dim)
}

/// Minimum-norm least-squares solution of `a x = b`, discarding singular
/// values below `rel · σ_max`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rel: f64) -> DVector<f64> {
    let n = a.ncols();
    if a.nrows() == 0 || n == 0 {
        return DVector::zeros(n);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return DVector::zeros(n);
    }
    svd.solve(b, rel * smax).expect("u and v_t requested")
}

/// Stack matrices with equal column count on top of one another.
pub fn vstack(blocks: &[DMatrix<f64>], ncols: usize) -> DMatrix<f64> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, ncols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), ncols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Smallest and largest singular values of a square matrix (0, 0 when empty).
pub fn extreme_singular_values(a: &DMatrix<f64>) -> (f64, f64) {
    if a.is_empty() {
        return (0.0, 0.0);
    }
    let s = a.clone().singular_values();
    (s.min(), s.max())
}
