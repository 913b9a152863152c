//! Domain types for finite causal variational problems.
//!
//! A problem instance is a finite point space together with a symmetric
//! nonnegative Lagrangian matrix L, a positive multiplier s, and optionally
//! an external potential and initial data. The inner action of a nonnegative
//! weight vector ρ under a potential φ is
//!
//! ```text
//!     S[ρ, φ] = ρᵀ L ρ + 2 Σᵢ (φᵢ − s) ρᵢ ,
//! ```
//!
//! and stationarity on the support of ρ reads (Lρ)ᵢ + φᵢ = s, with
//! (Lρ)ᵢ + φᵢ ≥ s everywhere else.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Weights below this threshold count as zero when forming supports.
pub const SUPPORT_EPSILON: f64 = 1e-12;
/// Euler-Lagrange residual tolerance for exact (enumeration) outputs.
pub const EL_TOLERANCE_EXACT: f64 = 1e-9;
/// Euler-Lagrange residual tolerance for iterative outputs.
pub const EL_TOLERANCE_ITERATIVE: f64 = 1e-6;
/// Absolute action gap below which minimizers count as tied.
pub const ACTION_TIE_TOLERANCE: f64 = 1e-9;
/// Support-enumeration cap for the exact solver.
pub const EXACT_SOLVER_MAX_N: usize = 16;
/// Relative factor for positive-semidefiniteness tolerances.
pub const PSD_TOLERANCE_FACTOR: f64 = 1e-10;

/// A finite point space with distinct string labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSpace {
    labels: Vec<String>,
}

impl PointSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Space with labels `p0 .. p{n-1}`.
    pub fn with_size(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("p{i}")).collect())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Symmetric nonnegative Lagrangian with strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianMatrix {
    entries: DMatrix<f64>,
}

impl LagrangianMatrix {
    /// Validates symmetry (exact, bit-equal), nonnegativity and the positive
    /// diagonal. No silent symmetrization is performed.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::NotSquare {
                rows: n,
                row: 0,
                cols: entries.ncols(),
            });
        }
        for i in 0..n {
            let diag = entries[(i, i)];
            if !diag.is_finite() || diag <= 0.0 {
                return Err(Error::NonpositiveDiagonal(i));
            }
            for j in 0..n {
                let v = entries[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NegativeEntry(i, j));
                }
                if j > i && entries[(i, j)] != entries[(j, i)] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    row: i,
                    cols: r.len(),
                });
            }
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(m)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// L applied to a weight vector: (Lρ)ᵢ = Σⱼ L(i,j) ρⱼ.
    pub fn apply(&self, weights: &DVector<f64>) -> DVector<f64> {
        &self.entries * weights
    }

    pub fn submatrix(&self, idx: &[usize]) -> DMatrix<f64> {
        linalg::submatrix(&self.entries, idx)
    }

    pub fn spectral_norm(&self) -> f64 {
        linalg::sym_spectral_norm(&self.entries)
    }

    /// PSD tolerance scaled to this matrix: 1e−10 · ‖L‖.
    pub fn psd_tolerance(&self) -> f64 {
        PSD_TOLERANCE_FACTOR * self.spectral_norm().max(1.0)
    }

    /// Smallest eigenvalue of the principal submatrix on `idx`.
    pub fn min_eig_on(&self, idx: &[usize]) -> f64 {
        linalg::sym_min_eig(&self.submatrix(idx))
    }
}

/// Nonnegative weight vector over the point space.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    weights: DVector<f64>,
}

impl Measure {
    pub fn new(weights: DVector<f64>) -> Result<Self> {
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NegativeWeight(i));
            }
        }
        Ok(Self { weights })
    }

    pub fn from_slice(weights: &[f64]) -> Result<Self> {
        Self::new(DVector::from_row_slice(weights))
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            weights: DVector::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    /// Total volume ρ(I).
    pub fn total(&self) -> f64 {
        self.weights.sum()
    }

    /// Indices with weight above [`SUPPORT_EPSILON`].
    pub fn support(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.weights[i] > SUPPORT_EPSILON)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.support().is_empty()
    }
}

/// Signed weight vector (test measures for quadratic-form conditions).
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure {
    weights: DVector<f64>,
}

impl SignedMeasure {
    pub fn new(weights: DVector<f64>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }
}

/// Nonnegative external potential.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    values: DVector<f64>,
}

impl Potential {
    pub fn new(values: DVector<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NegativePotential(i));
            }
        }
        Ok(Self { values })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(DVector::from_row_slice(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: DVector::zeros(n),
        }
    }

    pub fn constant(c: f64, n: usize) -> Result<Self> {
        Self::new(DVector::from_element(n, c))
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }
}

/// Initial data: a measure ρ₀ and a closed index set I₀.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    rho0: Measure,
    set: Vec<usize>,
}

impl InitialData {
    pub fn new(rho0: Measure, set: &[usize]) -> Result<Self> {
        let n = rho0.n();
        let mut set: Vec<usize> = set.to_vec();
        set.sort_unstable();
        set.dedup();
        if let Some(&bad) = set.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        Ok(Self { rho0, set })
    }

    pub fn measure_only(rho0: Measure) -> Self {
        Self { rho0, set: Vec::new() }
    }

    pub fn rho0(&self) -> &Measure {
        &self.rho0
    }

    pub fn set(&self) -> &[usize] {
        &self.set
    }

    /// supp ρ₀ ∪ I₀, sorted.
    pub fn enclosure(&self) -> Vec<usize> {
        let mut e = self.rho0.support();
        e.extend_from_slice(&self.set);
        e.sort_unstable();
        e.dedup();
        e
    }
}

/// A complete problem: space, Lagrangian, multiplier, optional potential and
/// initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    space: PointSpace,
    lagrangian: LagrangianMatrix,
    s: f64,
    potential: Option<Potential>,
    initial: Option<InitialData>,
}

impl ProblemInstance {
    pub fn new(space: PointSpace, lagrangian: LagrangianMatrix, s: f64) -> Result<Self> {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::NonpositiveMultiplier(s));
        }
        if space.n() != lagrangian.n() {
            return Err(Error::DimensionMismatch {
                what: "lagrangian",
                expected: space.n(),
                found: lagrangian.n(),
            });
        }
        Ok(Self {
            space,
            lagrangian,
            s,
            potential: None,
            initial: None,
        })
    }

    pub fn with_potential(mut self, phi: Potential) -> Result<Self> {
        check_dim("potential", self.n(), phi.n())?;
        self.potential = Some(phi);
        Ok(self)
    }

    pub fn with_initial(mut self, initial: InitialData) -> Result<Self> {
        check_dim("initial measure", self.n(), initial.rho0().n())?;
        self.initial = Some(initial);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn lagrangian(&self) -> &LagrangianMatrix {
        &self.lagrangian
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn potential(&self) -> Option<&Potential> {
        self.potential.as_ref()
    }

    pub fn initial(&self) -> Option<&InitialData> {
        self.initial.as_ref()
    }

    /// The stored potential, or φ ≡ 0.
    pub fn potential_or_zero(&self) -> Potential {
        self.potential
            .clone()
            .unwrap_or_else(|| Potential::zeros(self.n()))
    }

    /// The stored initial data, or (0, ∅).
    pub fn initial_or_empty(&self) -> InitialData {
        self.initial
            .clone()
            .unwrap_or_else(|| InitialData::measure_only(Measure::zeros(self.n())))
    }
}

/// One solution of the inner variational principle, with diagnostics.
#[derive(Debug, Clone)]
pub struct SolutionRecord {
    pub rho: Measure,
    pub phi: Potential,
    pub action: f64,
    pub el_sup_residual: f64,
    /// Smallest eigenvalue of L restricted to supp ρ (+inf when empty).
    pub psd_min_eigenvalue: f64,
    /// Dimension of the equal-action family through this solution.
    pub degeneracy_dim: usize,
    pub certified_global: bool,
}

/// Per-point Euler-Lagrange diagnostics.
#[derive(Debug, Clone)]
pub struct ElReport {
    /// (Lρ)ᵢ + φᵢ − s for every point.
    pub per_point: DVector<f64>,
    /// max(on-support |residual|, off-support violation of (Lρ)+φ ≥ s).
    pub sup_residual: f64,
    /// Smallest eigenvalue of L restricted to supp ρ.
    pub psd_min_eigenvalue: f64,
}

fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

/// Validates a raw square matrix as a Lagrangian.
pub fn validate_lagrangian(rows: &[Vec<f64>]) -> Result<LagrangianMatrix> {
    LagrangianMatrix::from_rows(rows)
}

/// Inner action ρᵀLρ + 2 Σᵢ (φᵢ − s) ρᵢ.
pub fn action_value(rho: &Measure, phi: &Potential, instance: &ProblemInstance) -> Result<f64> {
    check_dim("measure", instance.n(), rho.n())?;
    check_dim("potential", instance.n(), phi.n())?;
    let l_rho = instance.lagrangian().apply(rho.weights());
    let quad = rho.weights().dot(&l_rho);
    let linear: f64 = (0..instance.n())
        .map(|i| (phi.values()[i] - instance.s()) * rho.weights()[i])
        .sum();
    Ok(quad + 2.0 * linear)
}

/// Euler-Lagrange residuals of (ρ, φ).
pub fn el_residuals(rho: &Measure, phi: &Potential, instance: &ProblemInstance) -> Result<ElReport> {
    check_dim("measure", instance.n(), rho.n())?;
    check_dim("potential", instance.n(), phi.n())?;
    let s = instance.s();
    let l_rho = instance.lagrangian().apply(rho.weights());
    let per_point = DVector::from_fn(instance.n(), |i, _| l_rho[i] + phi.values()[i] - s);
    let support = rho.support();
    let mut sup = 0.0f64;
    for &i in &support {
        sup = sup.max(per_point[i].abs());
    }
    for i in 0..instance.n() {
        sup = sup.max(-per_point[i]);
    }
    let psd_min_eigenvalue = instance.lagrangian().min_eig_on(&support);
    Ok(ElReport {
        per_point,
        sup_residual: sup,
        psd_min_eigenvalue,
    })
}

/// Rescales (ρ, φ, s) by λ > 0; the action scales by λ² and minimizer status
/// is preserved.
pub fn rescale(
    rho: &Measure,
    phi: &Potential,
    s: f64,
    lambda: f64,
) -> Result<(Measure, Potential, f64)> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::NonpositiveLambda(lambda));
    }
    let rho = Measure::new(rho.weights() * lambda)?;
    let phi = Potential::new(phi.values() * lambda)?;
    Ok((rho, phi, s * lambda))
}

/// A-priori volume bound: any ρ with nonpositive action has total volume at
/// most 2·s·n/δ with δ = ½·minᵢ L(i,i) (each point is its own covering
/// neighborhood on a finite space).
pub fn apriori_volume_bound(instance: &ProblemInstance) -> f64 {
    let l = instance.lagrangian().entries();
    let min_diag = (0..instance.n())
        .map(|i| l[(i, i)])
        .fold(f64::INFINITY, f64::min);
    let delta = 0.5 * min_diag;
    2.0 * instance.s() * instance.n() as f64 / delta
}

#[cfg(test)]
pub(crate) mod test_fixtures {
    use super::*;

    /// The three-point causal wedge with multiplier 1.
    pub fn wedge() -> ProblemInstance {
        let space = PointSpace::with_size(3).unwrap();
        let l = LagrangianMatrix::from_rows(&[
            vec![1.0, 0.5, 0.0],
            vec![0.5, 1.0, 0.5],
            vec![0.0, 0.5, 1.0],
        ])
        .unwrap();
        ProblemInstance::new(space, l, 1.0).unwrap()
    }

    /// Three points where positivity extends by one dimension but not two.
    pub fn asym_three_point() -> ProblemInstance {
        let space = PointSpace::with_size(3).unwrap();
        let l = LagrangianMatrix::from_rows(&[
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 2.0],
            vec![1.0, 2.0, 1.0],
        ])
        .unwrap();
        ProblemInstance::new(space, l, 1.0).unwrap()
    }

    /// Constant Lagrangian L ≡ 1 on n points.
    pub fn constant_lagrangian(n: usize) -> ProblemInstance {
        let space = PointSpace::with_size(n).unwrap();
        let l = LagrangianMatrix::new(DMatrix::from_element(n, n, 1.0)).unwrap();
        ProblemInstance::new(space, l, 1.0).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_fixtures::*;
    use super::*;

    #[test]
    fn validate_accepts_wedge_and_identity() {
        assert!(validate_lagrangian(&[
            vec![1.0, 0.5, 0.0],
            vec![0.5, 1.0, 0.5],
            vec![0.0, 0.5, 1.0],
        ])
        .is_ok());
        for n in 1..6 {
            let eye: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            assert!(validate_lagrangian(&eye).is_ok());
        }
    }

    #[test]
    fn validate_rejects_negative_entry_with_index() {
        let err = validate_lagrangian(&[vec![1.0, -0.1], vec![-0.1, 1.0]]).unwrap_err();
        match err {
            Error::NegativeEntry(0, 1) => {}
            other => panic!("expected NegativeEntry(0,1), got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_asymmetry_and_bad_diagonal() {
        let err = validate_lagrangian(&[vec![1.0, 0.2], vec![0.3, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric(0, 1)));
        let err = validate_lagrangian(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NonpositiveDiagonal(0)));
    }

    #[test]
    fn action_of_wedge_case_iii_optimum() {
        let inst = wedge();
        let rho = Measure::from_slice(&[0.25, 0.5, 0.75]).unwrap();
        let phi = Potential::from_slice(&[0.5, 0.0, 0.0]).unwrap();
        let a = action_value(&rho, &phi, &inst).unwrap();
        assert!((a - (-11.0 / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn action_of_zero_measure_is_zero() {
        let inst = wedge();
        let rho = Measure::zeros(3);
        for phi in [
            Potential::zeros(3),
            Potential::from_slice(&[1.0, 2.0, 3.0]).unwrap(),
        ] {
            assert_eq!(action_value(&rho, &phi, &inst).unwrap(), 0.0);
        }
    }

    #[test]
    fn action_of_three_point_example_minimizer() {
        let inst = asym_three_point();
        let rho = Measure::from_slice(&[1.0, 0.0, 0.0]).unwrap();
        let phi = Potential::zeros(3);
        assert_eq!(action_value(&rho, &phi, &inst).unwrap(), -1.0);
    }

    #[test]
    fn el_residuals_vanish_for_wedge_closed_forms() {
        let inst = wedge();
        // maximal-volume optimum
        let rho = Measure::from_slice(&[0.5, 0.5, 0.5]).unwrap();
        let phi = Potential::from_slice(&[0.25, 0.0, 0.25]).unwrap();
        let rep = el_residuals(&rho, &phi, &inst).unwrap();
        assert_eq!(rep.sup_residual, 0.0);
        assert!(rep.per_point.iter().all(|&r| r == 0.0));
        // localized single-point solution
        let rho = Measure::from_slice(&[0.0, 0.5, 0.0]).unwrap();
        let phi = Potential::from_slice(&[0.75, 0.5, 0.75]).unwrap();
        let rep = el_residuals(&rho, &phi, &inst).unwrap();
        assert_eq!(rep.sup_residual, 0.0);
        assert!(rep.per_point.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn el_residuals_wedge_solutions_exact_in_sixteenths() {
        // Integer cross-check: all quantities are multiples of 1/16, so f64
        // arithmetic is exact and the residual must be exactly zero.
        let l16: [[i64; 3]; 3] = [[16, 8, 0], [8, 16, 8], [0, 8, 16]];
        let cases: [([i64; 3], [i64; 3]); 2] = [
            ([8, 8, 8], [4, 0, 4]),   // (1/2,1/2,1/2), (1/4,0,1/4)
            ([0, 8, 0], [12, 8, 12]), // (0,1/2,0), (3/4,1/2,3/4)
        ];
        for (rho16, phi16) in cases {
            for i in 0..3 {
                let lrho256: i64 = (0..3).map(|j| l16[i][j] * rho16[j]).sum();
                // (Lρ + φ − 1) in units of 1/256
                let residual256 = lrho256 + phi16[i] * 16 - 256;
                if rho16[i] > 0 {
                    assert_eq!(residual256, 0);
                } else {
                    assert!(residual256 >= 0);
                }
            }
        }
    }

    #[test]
    fn el_residuals_zero_measure_zero_potential() {
        let inst = wedge();
        let rep = el_residuals(&Measure::zeros(3), &Potential::zeros(3), &inst).unwrap();
        assert!(rep.per_point.iter().all(|&r| r == -1.0));
        assert_eq!(rep.sup_residual, 1.0);
        assert_eq!(rep.psd_min_eigenvalue, f64::INFINITY);
    }

    #[test]
    fn rescale_normalizes_multiplier() {
        let rho = Measure::from_slice(&[1.0, 2.0]).unwrap();
        let phi = Potential::from_slice(&[0.5, 0.0]).unwrap();
        let (_, _, s) = rescale(&rho, &phi, 2.0, 0.5).unwrap();
        assert_eq!(s, 1.0);
        let (r1, p1, s1) = rescale(&rho, &phi, 2.0, 1.0).unwrap();
        assert_eq!((r1, p1, s1), (rho.clone(), phi.clone(), 2.0));
        assert!(matches!(
            rescale(&rho, &phi, 1.0, 0.0),
            Err(Error::NonpositiveLambda(_))
        ));
    }

    #[test]
    fn rescale_scales_action_quadratically() {
        let inst = wedge();
        let rho = Measure::from_slice(&[0.5, 0.5, 0.5]).unwrap();
        let phi = Potential::from_slice(&[0.25, 0.0, 0.25]).unwrap();
        let base = action_value(&rho, &phi, &inst).unwrap();
        assert!((base - (-1.25)).abs() < 1e-15);
        let (r3, p3, s3) = rescale(&rho, &phi, 1.0, 3.0).unwrap();
        let scaled_inst = ProblemInstance::new(
            inst.space().clone(),
            inst.lagrangian().clone(),
            s3,
        )
        .unwrap();
        let scaled = action_value(&r3, &p3, &scaled_inst).unwrap();
        assert!((scaled - 9.0 * base).abs() < 1e-12);
        assert!((scaled - (-45.0 / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn apriori_bound_values() {
        assert_eq!(apriori_volume_bound(&wedge()), 12.0);
        let one = ProblemInstance::new(
            PointSpace::with_size(1).unwrap(),
            LagrangianMatrix::from_rows(&[vec![2.0]]).unwrap(),
            1.0,
        )
        .unwrap();
        assert_eq!(apriori_volume_bound(&one), 2.0);
        assert_eq!(apriori_volume_bound(&constant_lagrangian(4)), 16.0);
    }

    #[test]
    fn instance_rejects_nonpositive_multiplier() {
        let space = PointSpace::with_size(1).unwrap();
        let l = LagrangianMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(matches!(
            ProblemInstance::new(space, l, 0.0),
            Err(Error::NonpositiveMultiplier(_))
        ));
    }

    #[test]
    fn support_respects_epsilon() {
        let m = Measure::from_slice(&[0.0, 1e-13, 0.5]).unwrap();
        assert_eq!(m.support(), vec![2]);
    }
}
