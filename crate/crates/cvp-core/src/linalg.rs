//! Small dense linear-algebra helpers shared by the solver modules.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value threshold for rank decisions.
pub const RANK_REL_TOL: f64 = 1e-12;

/// Smallest eigenvalue of a symmetric matrix; `+inf` for the empty matrix.
pub fn sym_min_eig(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Spectral norm (largest absolute eigenvalue) of a symmetric matrix.
pub fn sym_spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0, |acc, &v| acc.max(v.abs()))
}

/// Principal submatrix on the given (sorted or unsorted) index set.
pub fn submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

/// Rows `rows`, columns `cols` of `m`.
pub fn slice(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

/// Outcome of a rank-revealing solve of `a x = b`.
pub struct RankSolve {
    /// Minimum-norm solution of the consistent part.
    pub particular: DVector<f64>,
    /// Orthonormal basis of the null space of `a`.
    pub null_basis: Vec<DVector<f64>>,
    /// Numerical rank at [`RANK_REL_TOL`].
    pub rank: usize,
    /// Residual `‖a x − b‖` of the particular solution.
    pub residual: f64,
}

/// Minimum-norm solve via SVD with an orthonormal null-space basis.
pub fn rank_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> RankSolve {
    let n = a.ncols();
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let vt = svd.v_t.as_ref().expect("svd with v_t");
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let tol = smax.max(f64::MIN_POSITIVE) * RANK_REL_TOL;
    let mut x = DVector::zeros(n);
    let mut rank = 0;
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv > tol {
            rank += 1;
            let coeff = u.column(k).dot(b) / sv;
            x += vt.row(k).transpose() * coeff;
        }
    }
    // one step of iterative refinement through the same factors
    let defect = b - a * &x;
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv > tol {
            let coeff = u.column(k).dot(&defect) / sv;
            x += vt.row(k).transpose() * coeff;
        }
    }
    let mut null_basis = Vec::new();
    for k in 0..vt.nrows() {
        if k >= svd.singular_values.len() || svd.singular_values[k] <= tol {
            null_basis.push(vt.row(k).transpose());
        }
    }
    // v_t from nalgebra only carries min(m,n) rows; recover the remaining
    // null directions for wide matrices by Gram-Schmidt against the rows.
    if null_basis.len() + rank < n {
        let mut basis: Vec<DVector<f64>> = (0..vt.nrows())
            .map(|k| vt.row(k).transpose())
            .collect();
        for j in 0..n {
            let mut v = DVector::zeros(n);
            v[j] = 1.0;
            for b in &basis {
                let d = b.dot(&v);
                v -= b * d;
            }
            let norm = v.norm();
            if norm > 1e-10 {
                v /= norm;
                basis.push(v.clone());
                null_basis.push(v);
            }
            if basis.len() == n {
                break;
            }
        }
    }
    let residual = (a * &x - b).norm();
    RankSolve {
        particular: x,
        null_basis,
        rank,
        residual,
    }
}

/// Orthonormal basis of the null space of `a` (possibly 0×d).
pub fn null_space(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let d = a.ncols();
    if a.nrows() == 0 {
        return (0..d)
            .map(|j| {
                let mut v = DVector::zeros(d);
                v[j] = 1.0;
                v
            })
            .collect();
    }
    rank_solve(a, &DVector::zeros(a.nrows())).null_basis
}

/// Orthonormal basis of the affine hull directions of a point set, at
/// absolute singular-value tolerance `tol`. Its length is the affine rank.
pub fn affine_basis(points: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    if points.len() <= 1 {
        return Vec::new();
    }
    let d = points[0].len();
    let mut diffs = DMatrix::zeros(points.len() - 1, d);
    for (r, p) in points[1..].iter().enumerate() {
        diffs.set_row(r, &(p - &points[0]).transpose());
    }
    let svd = diffs.svd(false, true);
    let vt = svd.v_t.as_ref().expect("svd with v_t");
    let mut basis = Vec::new();
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv > tol {
            basis.push(vt.row(k).transpose());
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_solve_recovers_exact_solution() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let b = DVector::from_row_slice(&[4.0, 9.0]);
        let s = rank_solve(&a, &b);
        assert_eq!(s.rank, 2);
        assert!((s.particular[0] - 2.0).abs() < 1e-14);
        assert!((s.particular[1] - 3.0).abs() < 1e-14);
        assert!(s.null_basis.is_empty());
    }

    #[test]
    fn rank_solve_singular_reports_null_basis() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_row_slice(&[1.0, 1.0]);
        let s = rank_solve(&a, &b);
        assert_eq!(s.rank, 1);
        assert_eq!(s.null_basis.len(), 1);
        assert!(s.residual < 1e-12);
        // min-norm solution is (1/2, 1/2)
        assert!((s.particular[0] - 0.5).abs() < 1e-14);
        assert!((s.particular[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn null_space_of_row_constraints() {
        // single row (1, 1, 1): null space is 2-dimensional
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let ns = null_space(&a);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(v.sum().abs() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_rank_of_segment_is_one() {
        let pts = vec![
            DVector::from_row_slice(&[0.0, 0.0]),
            DVector::from_row_slice(&[1.0, 1.0]),
            DVector::from_row_slice(&[0.5, 0.5]),
        ];
        let basis = affine_basis(&pts, 1e-9);
        assert_eq!(basis.len(), 1);
        // the direction is ±(1,1)/√2
        assert!((basis[0][0].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }
}
