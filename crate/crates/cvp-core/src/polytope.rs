//! Bounded polyhedra given by inequality rows `a·x ≥ b`, with brute-force
//! vertex enumeration and exact optimization of linear and positive
//! semidefinite quadratic objectives over the vertex hull.
//!
//! The feasible regions arising here have at most n dimensions and a few
//! dozen rows, so enumerating row subsets is both exact and fast enough.

use nalgebra::{DMatrix, DVector};

/// Feasibility slack for vertex acceptance (rows are normalized).
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Two vertices closer than this (per coordinate) are considered equal.
pub const VERTEX_DEDUP_TOL: f64 = 1e-9;

/// `{ x : aᵢ · x ≥ bᵢ }` with unit-norm rows.
#[derive(Debug, Clone)]
pub struct Polytope {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl Polytope {
    pub fn new(rows: Vec<(DVector<f64>, f64)>, dim: usize) -> Self {
        let mut a = DMatrix::zeros(rows.len(), dim);
        let mut b = DVector::zeros(rows.len());
        for (r, (coeffs, rhs)) in rows.into_iter().enumerate() {
            assert_eq!(coeffs.len(), dim);
            let norm = coeffs.norm();
            let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
            a.set_row(r, &(coeffs * scale).transpose());
            b[r] = rhs * scale;
        }
        Self { a, b }
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn row_coeff(&self, row: usize, col: usize) -> f64 {
        self.a[(row, col)]
    }

    pub fn row_rhs(&self, row: usize) -> f64 {
        self.b[row]
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        let ax = &self.a * x;
        (0..self.rows()).all(|i| ax[i] >= self.b[i] - tol)
    }

    /// Worst violation of `x` over all rows (≤ 0 inside).
    pub fn violation(&self, x: &DVector<f64>) -> f64 {
        let ax = &self.a * x;
        (0..self.rows())
            .map(|i| self.b[i] - ax[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// All vertices, deduplicated and sorted lexicographically.
    ///
    /// Every vertex of a bounded polytope is the solution of `dim` active
    /// rows, so enumerating row subsets finds them all. An empty result for
    /// a bounded region means the region is empty.
    pub fn vertices(&self) -> Vec<DVector<f64>> {
        let d = self.dim();
        let m = self.rows();
        let mut found: Vec<DVector<f64>> = Vec::new();
        if d == 0 {
            // zero-dimensional region: the single point is feasible iff all
            // rows have b <= 0
            if (0..m).all(|i| self.b[i] <= FEASIBILITY_TOL) {
                found.push(DVector::zeros(0));
            }
            return found;
        }
        if m < d {
            return found;
        }
        let mut subset: Vec<usize> = (0..d).collect();
        loop {
            let sub_a = DMatrix::from_fn(d, d, |r, c| self.a[(subset[r], c)]);
            let sub_b = DVector::from_fn(d, |r, _| self.b[subset[r]]);
            if let Some(x) = sub_a.clone().full_piv_lu().solve(&sub_b) {
                let residual = (&sub_a * &x - &sub_b).norm();
                if residual < 1e-7 && self.contains(&x, FEASIBILITY_TOL) {
                    let dup = found
                        .iter()
                        .any(|v| (v - &x).amax() <= VERTEX_DEDUP_TOL);
                    if !dup {
                        found.push(x);
                    }
                }
            }
            if !next_combination(&mut subset, m) {
                break;
            }
        }
        found.sort_by(lex_cmp);
        found
    }
}

fn lex_cmp(p: &DVector<f64>, q: &DVector<f64>) -> std::cmp::Ordering {
    for i in 0..p.len() {
        match p[i].partial_cmp(&q[i]).unwrap_or(std::cmp::Ordering::Equal) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Advances `subset` to the next k-combination of `0..m`. Returns false when
/// exhausted.
fn next_combination(subset: &mut [usize], m: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < m - (k - i) {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Indices of the vertices minimizing (or maximizing) `c·x`, with the
/// optimal value. Ties within `tie_tol` are all reported.
pub fn linear_optimum(
    vertices: &[DVector<f64>],
    c: &DVector<f64>,
    maximize: bool,
    tie_tol: f64,
) -> Option<(f64, Vec<usize>)> {
    if vertices.is_empty() {
        return None;
    }
    let vals: Vec<f64> = vertices.iter().map(|v| c.dot(v)).collect();
    let best = vals
        .iter()
        .copied()
        .fold(if maximize { f64::NEG_INFINITY } else { f64::INFINITY }, |acc, v| {
            if maximize {
                acc.max(v)
            } else {
                acc.min(v)
            }
        });
    let idx = (0..vertices.len())
        .filter(|&i| (vals[i] - best).abs() <= tie_tol)
        .collect();
    Some((best, idx))
}

/// Exact minimum of the convex quadratic λᵀHλ (H PSD on the relevant cone)
/// over the probability simplex, by enumerating active sets.
///
/// Returns the optimal value and weights. Also correct as a maximizer search
/// when `maximize` is set (the candidates are all feasible, and the optimum
/// is stationary on the face spanned by its support).
pub fn quadratic_over_simplex(h: &DMatrix<f64>, maximize: bool) -> (f64, DVector<f64>) {
    let k = h.nrows();
    assert!(k >= 1);
    assert!(k <= 24, "simplex QP support enumeration capped at 24 vertices");
    let mut best_val = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    let mut best = DVector::zeros(k);
    for mask in 1u32..(1 << k) {
        let support: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
        let p = support.len();
        // stationarity of λᵀHλ − μ(Σλ − 1) on the face: 2 H_P λ = μ 1, Σλ = 1
        let mut kkt = DMatrix::zeros(p + 1, p + 1);
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                kkt[(r, c)] = 2.0 * h[(i, j)];
            }
            kkt[(r, p)] = -1.0;
            kkt[(p, r)] = 1.0;
        }
        let mut rhs = DVector::zeros(p + 1);
        rhs[p] = 1.0;
        let sol = match kkt.full_piv_lu().solve(&rhs) {
            Some(s) => s,
            None => continue,
        };
        if !sol.iter().all(|v| v.is_finite()) {
            continue;
        }
        if (0..p).any(|i| sol[i] < -1e-9) {
            continue;
        }
        let mut lambda = DVector::zeros(k);
        for (r, &i) in support.iter().enumerate() {
            lambda[i] = sol[r].max(0.0);
        }
        let scale = lambda.sum();
        if scale <= 0.0 {
            continue;
        }
        lambda /= scale;
        let val = lambda.dot(&(h * &lambda));
        let better = if maximize { val > best_val } else { val < best_val };
        if better {
            best_val = val;
            best = lambda;
        }
    }
    (best_val, best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(coeffs: &[f64], rhs: f64) -> (DVector<f64>, f64) {
        (DVector::from_row_slice(coeffs), rhs)
    }

    #[test]
    fn unit_square_vertices() {
        let p = Polytope::new(
            vec![
                row(&[1.0, 0.0], 0.0),
                row(&[0.0, 1.0], 0.0),
                row(&[-1.0, 0.0], -1.0),
                row(&[0.0, -1.0], -1.0),
            ],
            2,
        );
        let v = p.vertices();
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], DVector::from_row_slice(&[0.0, 0.0]));
        assert_eq!(v[3], DVector::from_row_slice(&[1.0, 1.0]));
    }

    #[test]
    fn wedge_two_point_region() {
        // φ-region for the wedge on support {0,1}: ρ1(φ) ≥ 0 reads
        // 1 + φ2 − 2φ1 ≥ 0 and ρ2(φ) ≥ 1/2 reads 1/4 + φ1 − 2φ2 ≥ 0.
        let p = Polytope::new(
            vec![
                row(&[-2.0, 1.0], -1.0),
                row(&[1.0, -2.0], -0.25),
                row(&[1.0, 0.0], 0.0),
                row(&[0.0, 1.0], 0.0),
            ],
            2,
        );
        let v = p.vertices();
        let expect = [
            [0.0, 0.0],
            [0.0, 0.125],
            [0.5, 0.0],
            [0.75, 0.5],
        ];
        assert_eq!(v.len(), expect.len());
        for e in expect {
            assert!(
                v.iter().any(|x| (x[0] - e[0]).abs() < 1e-9 && (x[1] - e[1]).abs() < 1e-9),
                "missing vertex {e:?}"
            );
        }
    }

    #[test]
    fn empty_region_has_no_vertices() {
        let p = Polytope::new(vec![row(&[1.0], 1.0), row(&[-1.0], 0.0)], 1);
        assert!(p.vertices().is_empty());
    }

    #[test]
    fn linear_optimum_reports_ties() {
        let verts = vec![
            DVector::from_row_slice(&[0.0, 0.0]),
            DVector::from_row_slice(&[1.0, 0.0]),
            DVector::from_row_slice(&[0.0, 1.0]),
        ];
        let c = DVector::from_row_slice(&[1.0, 1.0]);
        let (val, idx) = linear_optimum(&verts, &c, true, 1e-9).unwrap();
        assert_eq!(val, 1.0);
        assert_eq!(idx, vec![1, 2]);
    }

    #[test]
    fn simplex_quadratic_minimum_interior() {
        // H = diag(1, 1): minimum of λ1² + λ2² on the simplex is 1/2 at the
        // midpoint.
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let (val, lam) = quadratic_over_simplex(&h, false);
        assert!((val - 0.5).abs() < 1e-12);
        assert!((lam[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn simplex_quadratic_maximum_at_vertex() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let (val, lam) = quadratic_over_simplex(&h, true);
        assert!((val - 2.0).abs() < 1e-12);
        assert!((lam[0] - 1.0).abs() < 1e-9);
    }
}
