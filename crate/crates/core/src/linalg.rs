//! Dense helpers built on LAPACK's SVD and symmetric eigensolver.
//!
//! Every rank decision in the crate goes through [`RANK_CUTOFF`]: a singular
//! value counts as zero when it is at most `RANK_CUTOFF` times the largest
//! singular value of the same matrix.

use nalgebra::{DMatrix, DVector};

pub const RANK_CUTOFF: f64 = 1e-10;

/// Singular values (nonincreasing) with full singular bases.
struct FullSvd {
    /// `m x m`.
    u: DMatrix<f64>,
    values: DVector<f64>,
    /// `n x n`, columns are right singular vectors; the first
    /// `values.len()` correspond to `values`.
    v: DMatrix<f64>,
}

fn full_svd(a: &DMatrix<f64>) -> FullSvd {
    let (m, n) = a.shape();
    let mut data = a.as_slice().to_vec();
    let mut values = vec![0.0; m.min(n)];
    let mut u = DMatrix::zeros(m, m);
    let mut vt = DMatrix::zeros(n, n);
    let (mi, ni) = (m as i32, n as i32);
    let mut info = 0;
    let mut query = [0.0];
    // SAFETY: every buffer is sized as dgesvd requires for JOBU = JOBVT = 'A'.
    unsafe {
        lapack::dgesvd(
            b'A',
            b'A',
            mi,
            ni,
            &mut data,
            mi,
            &mut values,
            u.as_mut_slice(),
            mi,
            vt.as_mut_slice(),
            ni,
            &mut query,
            -1,
            &mut info,
        );
    }
    let lwork = query[0] as i32;
    let mut work = vec![0.0; lwork as usize];
    unsafe {
        lapack::dgesvd(
            b'A',
            b'A',
            mi,
            ni,
            &mut data,
            mi,
            &mut values,
            u.as_mut_slice(),
            mi,
            vt.as_mut_slice(),
            ni,
            &mut work,
            lwork,
            &mut info,
        );
    }
    assert_eq!(info, 0, "dgesvd failed to converge");
    FullSvd {
        u,
        values: DVector::from_vec(values),
        v: vt.transpose(),
    }
}

fn singular_values(a: &DMatrix<f64>) -> DVector<f64> {
    let (m, n) = a.shape();
    let mut data = a.as_slice().to_vec();
    let mut values = vec![0.0; m.min(n)];
    let (mi, ni) = (m as i32, n as i32);
    let mut info = 0;
    let mut query = [0.0];
    let (mut u, mut vt) = ([0.0], [0.0]);
    // SAFETY: JOBU = JOBVT = 'N' leaves `u` and `vt` untouched.
    unsafe {
        lapack::dgesvd(
            b'N',
            b'N',
            mi,
            ni,
            &mut data,
            mi,
            &mut values,
            &mut u,
            1,
            &mut vt,
            1,
            &mut query,
            -1,
            &mut info,
        );
    }
    let lwork = query[0] as i32;
    let mut work = vec![0.0; lwork as usize];
    unsafe {
        lapack::dgesvd(
            b'N',
            b'N',
            mi,
            ni,
            &mut data,
            mi,
            &mut values,
            &mut u,
            1,
            &mut vt,
            1,
            &mut work,
            lwork,
            &mut info,
        );
    }
    assert_eq!(info, 0, "dgesvd failed to converge");
    DVector::from_vec(values)
}

fn threshold(values: &DVector<f64>) -> f64 {
    values.iter().cloned().fold(0.0, f64::max) * RANK_CUTOFF
}

/// Largest singular value. Zero for empty matrices.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    singular_values(a).iter().cloned().fold(0.0, f64::max)
}

pub fn frobenius_norm(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn entrywise_abs(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.map(f64::abs)
}

pub fn rank(a: &DMatrix<f64>) -> usize {
    if a.is_empty() {
        return 0;
    }
    let values = singular_values(a);
    let cut = threshold(&values);
    if cut == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > cut).count()
}

/// Orthonormal basis (as columns) of the right null space of `a`.
pub fn null_space(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let svd = full_svd(a);
    let cut = threshold(&svd.values);
    let keep: Vec<usize> = (0..n)
        .filter(|&i| cut == 0.0 || svd.values.get(i).is_none_or(|&s| s <= cut))
        .collect();
    DMatrix::from_fn(n, keep.len(), |r, c| svd.v[(r, keep[c])])
}

/// Orthonormal basis (as columns) of the column space of `a`.
pub fn range_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.nrows();
    if a.is_empty() {
        return DMatrix::zeros(m, 0);
    }
    let svd = full_svd(a);
    let cut = threshold(&svd.values);
    let keep: Vec<usize> = (0..svd.values.len())
        .filter(|&i| cut > 0.0 && svd.values[i] > cut)
        .collect();
    DMatrix::from_fn(m, keep.len(), |r, c| svd.u[(r, keep[c])])
}

/// Minimum-norm least-squares solution of `a x = b` via the truncated
/// pseudo-inverse.
pub fn pinv_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return DVector::zeros(n);
    }
    let svd = full_svd(a);
    let cut = threshold(&svd.values);
    let mut x = DVector::zeros(n);
    if cut == 0.0 {
        return x;
    }
    for (k, &sigma) in svd.values.iter().enumerate() {
        if sigma > cut {
            let coeff = svd.u.column(k).dot(b) / sigma;
            x.axpy(coeff, &svd.v.column(k), 1.0);
        }
    }
    x
}

/// Minimum-norm least-squares solution of `a x = b` together with an
/// orthonormal basis of the null space of `a`, from a single SVD.
pub fn pinv_solve_with_null_space(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.ncols();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    if a.nrows() == 0 {
        return (DVector::zeros(n), DMatrix::identity(n, n));
    }
    let svd = full_svd(a);
    let cut = threshold(&svd.values);
    let mut x = DVector::zeros(n);
    let mut null = Vec::new();
    for i in 0..n {
        let sigma = svd.values.get(i).copied().unwrap_or(0.0);
        if cut > 0.0 && sigma > cut {
            let coeff = svd.u.column(i).dot(b) / sigma;
            x.axpy(coeff, &svd.v.column(i), 1.0);
        } else {
            null.push(i);
        }
    }
    let basis = DMatrix::from_fn(n, null.len(), |r, c| svd.v[(r, null[c])]);
    (x, basis)
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted
/// ascending and eigenvectors as matching columns.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let mut vectors = a.clone();
    let mut values = vec![0.0; n];
    let ni = n as i32;
    let mut info = 0;
    let mut query = [0.0];
    // SAFETY: `vectors` is n x n column-major and `values` holds n entries.
    unsafe {
        lapack::dsyev(
            b'V',
            b'L',
            ni,
            vectors.as_mut_slice(),
            ni,
            &mut values,
            &mut query,
            -1,
            &mut info,
        );
    }
    let lwork = query[0] as i32;
    let mut work = vec![0.0; lwork as usize];
    unsafe {
        lapack::dsyev(
            b'V',
            b'L',
            ni,
            vectors.as_mut_slice(),
            ni,
            &mut values,
            &mut work,
            lwork,
            &mut info,
        );
    }
    assert_eq!(info, 0, "dsyev failed to converge");
    (values, vectors)
}

/// `[[0, b], [b^T, 0]]`.
pub fn symmetrize_bipartite(b: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, n) = b.shape();
    let mut out = DMatrix::zeros(m + n, m + n);
    out.view_mut((0, m), (m, n)).copy_from(b);
    out.view_mut((m, 0), (n, m)).copy_from(&b.transpose());
    out
}
