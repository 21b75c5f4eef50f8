//! Symmetric tridiagonal eigen-routines.
//!
//! The reduced-basis operators here are tridiagonal (Hamming basis) or thin
//! banded (conditional Hamming basis), so a tridiagonal QL solver plus Sturm
//! bisection covers the hot paths far faster than a general dense
//! eigendecomposition. Dense symmetric input is reduced with nalgebra's
//! Householder tridiagonalization first.

use nalgebra::{DMatrix, DVector};

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below `x`,
/// by Sturm sequence count. `diag` has length n, `off` length n-1.
pub fn sturm_count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut count = 0usize;
    let mut q = 1.0f64;
    for i in 0..n {
        let esq = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        let denom = if q.abs() < f64::MIN_POSITIVE {
            f64::MIN_POSITIVE.copysign(q)
        } else {
            q
        };
        q = diag[i] - x - esq / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin_bounds(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i < n - 1 {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// k-th smallest eigenvalue (k = 0 is the ground value) by bisection.
pub fn tridiag_kth_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin_bounds(diag, off);
    for _ in 0..140 {
        let mid = 0.5 * (lo + hi);
        if sturm_count_below(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        let scale = lo.abs().max(hi.abs()).max(1.0);
        if hi - lo <= 1e-16 * scale {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Two lowest eigenvalues of a symmetric tridiagonal matrix.
pub fn tridiag_lowest_two(diag: &[f64], off: &[f64]) -> (f64, f64) {
    (
        tridiag_kth_eigenvalue(diag, off, 0),
        tridiag_kth_eigenvalue(diag, off, 1),
    )
}

/// Two lowest eigenvalues of a dense symmetric matrix
/// (Householder reduction, then Sturm bisection).
pub fn symmetric_lowest_two(mat: &DMatrix<f64>) -> (f64, f64) {
    let n = mat.nrows();
    if n == 1 {
        return (mat[(0, 0)], f64::INFINITY);
    }
    let (diag, off) = mat.clone().symmetric_tridiagonalize().unpack_tridiagonal();
    let d: Vec<f64> = diag.iter().copied().collect();
    let e: Vec<f64> = off.iter().copied().collect();
    tridiag_lowest_two(&d, &e)
}

/// Full eigendecomposition of a symmetric tridiagonal matrix by implicit-shift
/// QL (the classic EISPACK `tql2`), with eigenvector rotations accumulated into
/// `z` (pass the identity, or the Householder Q of a prior reduction).
/// Returns eigenvalues in ascending order with matching eigenvector columns.
pub fn tridiag_eigen_with_q(
    mut d: Vec<f64>,
    off: &[f64],
    mut z: DMatrix<f64>,
) -> (DVector<f64>, DMatrix<f64>) {
    let n = d.len();
    assert_eq!(off.len(), n.saturating_sub(1));
    assert_eq!(z.nrows(), n);
    let mut e = vec![0.0f64; n];
    e[..n - 1].copy_from_slice(off);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 60, "tql2 failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // sort ascending, carrying eigenvector columns along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| d[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        vecs.set_column(new, &z.column(old));
    }
    (vals, vecs)
}

/// Eigendecomposition of a symmetric tridiagonal matrix given by its diagonals.
pub fn tridiag_eigen(diag: &[f64], off: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let n = diag.len();
    tridiag_eigen_with_q(diag.to_vec(), off, DMatrix::identity(n, n))
}

/// Eigendecomposition of a dense symmetric matrix
/// (Householder reduction followed by tridiagonal QL).
pub fn symmetric_eigen(mat: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = mat.nrows();
    if n == 1 {
        return (DVector::from_element(1, mat[(0, 0)]), DMatrix::identity(1, 1));
    }
    let tri = mat.clone().symmetric_tridiagonalize();
    let q = tri.q();
    let (diag, off) = tri.unpack_tridiagonal();
    let d: Vec<f64> = diag.iter().copied().collect();
    let e: Vec<f64> = off.iter().copied().collect();
    tridiag_eigen_with_q(d, &e, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_tridiag(n: usize, rng: &mut StdRng) -> (Vec<f64>, Vec<f64>) {
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let e: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
        (d, e)
    }

    fn tridiag_to_dense(d: &[f64], e: &[f64]) -> DMatrix<f64> {
        let n = d.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = d[i];
            if i < n - 1 {
                m[(i + 1, i)] = e[i];
                m[(i, i + 1)] = e[i];
            }
        }
        m
    }

    #[test]
    fn tql2_matches_nalgebra_on_random_tridiagonals() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in [2usize, 3, 5, 17, 40] {
            let (d, e) = random_tridiag(n, &mut rng);
            let dense = tridiag_to_dense(&d, &e);
            let (vals, vecs) = tridiag_eigen(&d, &e);
            let reference = dense.clone().symmetric_eigen();
            let mut ref_vals: Vec<f64> = reference.eigenvalues.iter().copied().collect();
            ref_vals.sort_by(f64::total_cmp);
            for i in 0..n {
                assert_abs_diff_eq!(vals[i], ref_vals[i], epsilon = 1e-10);
            }
            // residual check ||A v - lambda v||
            for i in 0..n {
                let v = vecs.column(i);
                let resid = &dense * v - vals[i] * v;
                assert!(resid.norm() < 1e-9, "residual {}", resid.norm());
            }
        }
    }

    #[test]
    fn sturm_bisection_matches_ql() {
        let mut rng = StdRng::seed_from_u64(11);
        for n in [2usize, 6, 31] {
            let (d, e) = random_tridiag(n, &mut rng);
            let (vals, _) = tridiag_eigen(&d, &e);
            let (e0, e1) = tridiag_lowest_two(&d, &e);
            assert_abs_diff_eq!(e0, vals[0], epsilon = 1e-12);
            assert_abs_diff_eq!(e1, vals[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn dense_path_matches_on_symmetric_matrix() {
        let mut rng = StdRng::seed_from_u64(3);
        let n = 24;
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let sym = (&a + a.transpose()).scale(0.5);
        let (vals, vecs) = symmetric_eigen(&sym);
        for i in 0..n {
            let v = vecs.column(i);
            let resid = &sym * v - vals[i] * v;
            assert!(resid.norm() < 1e-9);
            if i > 0 {
                assert!(vals[i] >= vals[i - 1]);
            }
        }
        let (e0, e1) = symmetric_lowest_two(&sym);
        assert_abs_diff_eq!(e0, vals[0], epsilon = 1e-11);
        assert_abs_diff_eq!(e1, vals[1], epsilon = 1e-11);
    }
}
