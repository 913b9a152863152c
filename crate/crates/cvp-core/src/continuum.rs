//! Discretized heat-kernel Lagrangians on the unit circle.
//!
//! The kernel is the cosine series 1/(2π) + (1/π) Σₖ e^{−k²} cos(k(x−y)),
//! truncated at K = 27 (later terms underflow double precision). The
//! modified variant removes the k = 1 term exactly, which makes the
//! frequency-1 modes degenerate up to grid aliasing.
//!
//! Discrete measures carry point masses, so the matrix holds plain kernel
//! values: (Lρ)ᵢ = Σⱼ L(xᵢ, xⱼ) ρⱼ is already the integral of the kernel
//! against ρ. The uniform density dρ = c·dx corresponds to the weight
//! vector with c·2π/n at every sample point.
//!
//! Because the matrices are circulant, their eigenvalues are aliasing sums
//! of the series coefficients. Computing them on the Fourier side is exact
//! for the truncated kernel and resolves magnitudes (such as the
//! frequency-1 aliasing level ~e^{−(n−1)²}) far below what a dense
//! eigensolver can distinguish from rounding noise.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::{LagrangianMatrix, Measure, PointSpace, Potential, ProblemInstance, SignedMeasure};

/// Truncation index of the kernel series; e^{−28²} underflows f64.
pub const KERNEL_TRUNCATION: usize = 27;

/// Uniform sampling of the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleDiscretization {
    n: usize,
}

impl CircleDiscretization {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewCirclePoints { n, min: 3 });
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sample angle xₖ = 2πk/n.
    pub fn angle(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.n as f64
    }

    /// Mass of one cell of the uniform quadrature, 2π/n.
    pub fn cell_mass(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n as f64
    }
}

/// Series coefficients a₀ = 1/(2π), aₖ = e^{−k²}/π; the modified kernel has
/// a₁ = 0 exactly.
fn coefficients(modified: bool) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    let mut a = Vec::with_capacity(KERNEL_TRUNCATION + 1);
    a.push(1.0 / (2.0 * pi));
    for k in 1..=KERNEL_TRUNCATION {
        a.push((-((k * k) as f64)).exp() / pi);
    }
    if modified {
        a[1] = 0.0;
    }
    a
}

fn kernel_value(theta: f64, a: &[f64]) -> f64 {
    let mut v = a[0];
    for (k, &ak) in a.iter().enumerate().skip(1) {
        if ak != 0.0 {
            v += ak * (k as f64 * theta).cos();
        }
    }
    v
}

fn build_circulant(disc: &CircleDiscretization, modified: bool) -> Result<LagrangianMatrix> {
    let n = disc.n();
    let a = coefficients(modified);
    // evaluate one half-period and mirror, so the matrix is exactly
    // symmetric and circulant
    let mut first_row = vec![0.0f64; n];
    for (d, slot) in first_row.iter_mut().enumerate() {
        let dm = d.min(n - d);
        let mut v = kernel_value(disc.angle(dm), &a);
        if v.abs() < 1e-14 {
            v = 0.0; // float dust from truncation; the exact kernel is >= 0
        }
        if v < 0.0 {
            return Err(Error::NegativeEntry(0, d));
        }
        *slot = v;
    }
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| first_row[(n + i - j) % n]);
    LagrangianMatrix::new(m)
}

/// Heat-kernel Lagrangian on n uniform circle points.
pub fn heat_kernel_circle(disc: &CircleDiscretization) -> LagrangianMatrix {
    build_circulant(disc, false).expect("heat kernel values are positive")
}

/// Modified kernel with the frequency-1 term removed (needs n ≥ 5 so the
/// frequency-1 modes are resolved).
pub fn modified_heat_kernel_circle(disc: &CircleDiscretization) -> Result<LagrangianMatrix> {
    if disc.n() < 5 {
        return Err(Error::TooFewCirclePoints {
            n: disc.n(),
            min: 5,
        });
    }
    build_circulant(disc, true)
}

/// Eigenvalues of the circulant kernel matrix indexed by grid frequency
/// m = 0..n−1, computed as aliasing sums of the series coefficients:
/// λₘ = Σₖ aₖ · (n/2) · (#{k ≡ m} + #{k ≡ −m mod n}).
///
/// Exact for the truncated kernel; in particular the frequency-±1
/// eigenvalues of the modified kernel come out at the aliasing level
/// ~(n/2)·e^{−(n−1)²}/π instead of drowning in eigensolver noise.
pub fn circulant_eigenvalues(disc: &CircleDiscretization, modified: bool) -> Vec<f64> {
    let n = disc.n();
    let a = coefficients(modified);
    let mut lam = vec![0.0f64; n];
    for (m, l) in lam.iter_mut().enumerate() {
        let mut s = 0.0;
        for (k, &ak) in a.iter().enumerate() {
            if ak == 0.0 {
                continue;
            }
            let r = k % n;
            let mut weight = 0.0;
            if r == m {
                weight += 0.5;
            }
            if (n - r) % n == m {
                weight += 0.5;
            }
            s += ak * weight * n as f64;
        }
        *l = s;
    }
    lam
}

/// Degenerate modes of the discretized kernel: grid frequencies whose
/// principal series coefficient vanishes identically, so their eigenvalue is
/// pure aliasing. For the modified kernel this is the frequency-±1 pair
/// (dimension 2); for the unmodified kernel on n ≤ 2K+1 points there are
/// none. Returns the dimension and an orthonormal basis of the modes.
pub fn degenerate_modes(disc: &CircleDiscretization, modified: bool) -> (usize, Vec<SignedMeasure>) {
    let n = disc.n();
    let a = coefficients(modified);
    let mut basis = Vec::new();
    let half = n / 2;
    for m in 0..=half {
        // principal coefficient of frequency m: smallest k ≡ ±m (mod n)
        let mut principal = 0.0;
        for (k, &ak) in a.iter().enumerate() {
            if k % n == m || (n - k % n) % n == m {
                principal = ak;
                break;
            }
        }
        if principal != 0.0 || m > KERNEL_TRUNCATION.min(half) {
            continue;
        }
        let cos_mode = DVector::from_fn(n, |j, _| (m as f64 * disc.angle(j)).cos());
        let norm = cos_mode.norm();
        basis.push(SignedMeasure::new(cos_mode / norm));
        if m != 0 && (m != half || n % 2 == 1) {
            let sin_mode = DVector::from_fn(n, |j, _| (m as f64 * disc.angle(j)).sin());
            let norm = sin_mode.norm();
            basis.push(SignedMeasure::new(sin_mode / norm));
        }
    }
    (basis.len(), basis)
}

/// The discrete counterpart of the uniform density (1−C) dx under the
/// constant potential φ ≡ C: every weight is (1−C)·2π/n.
pub fn uniform_solution_reference(disc: &CircleDiscretization, c: f64) -> Result<Measure> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::COutOfRange(c));
    }
    let w = (1.0 - c) * disc.cell_mass();
    Measure::new(DVector::from_element(disc.n(), w))
}

/// Assembles a full problem instance for the circle (labels c0..c{n−1},
/// multiplier 1, optional constant potential).
pub fn circle_instance(
    disc: &CircleDiscretization,
    modified: bool,
    phi_const: Option<f64>,
) -> Result<ProblemInstance> {
    let n = disc.n();
    let lagrangian = if modified {
        modified_heat_kernel_circle(disc)?
    } else {
        heat_kernel_circle(disc)
    };
    let space = PointSpace::new((0..n).map(|k| format!("c{k}")).collect())?;
    let mut instance = ProblemInstance::new(space, lagrangian, 1.0)?;
    if let Some(c) = phi_const {
        instance = instance.with_potential(Potential::constant(c, n)?)?;
    }
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::el_residuals;

    #[test]
    fn quadrature_row_sums_are_one() {
        // the kernel integrates to 1 and cosines cancel on uniform grids
        for n in [16usize, 64] {
            let disc = CircleDiscretization::new(n).unwrap();
            let l = heat_kernel_circle(&disc);
            for i in 0..n {
                let qsum: f64 = l.entries().row(i).iter().sum::<f64>() * disc.cell_mass();
                assert!((qsum - 1.0).abs() < 1e-12, "row {i} of n={n}: {qsum}");
            }
        }
    }

    #[test]
    fn matrix_is_exactly_circulant_and_symmetric() {
        let disc = CircleDiscretization::new(12).unwrap();
        let l = heat_kernel_circle(&disc);
        let e = l.entries();
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(e[(i, j)], e[((i + 1) % 12, (j + 1) % 12)]);
                assert_eq!(e[(i, j)], e[(j, i)]);
            }
        }
    }

    #[test]
    fn heat_kernel_psd_and_fourier_positive() {
        let disc = CircleDiscretization::new(64).unwrap();
        let l = heat_kernel_circle(&disc);
        // truncation makes unused frequencies exactly zero, so dense
        // eigenvalues sit at rounding level; PSD within tolerance is the
        // checkable statement
        let min_eig = l.min_eig_on(&(0..64).collect::<Vec<_>>());
        assert!(min_eig >= -l.psd_tolerance());
        let lam = circulant_eigenvalues(&disc, false);
        for (m, &v) in lam.iter().enumerate() {
            let freq = m.min(64 - m);
            if freq <= 26 {
                assert!(v > 0.0, "frequency {freq} should be positive, got {v}");
            }
        }
    }

    #[test]
    fn modified_kernel_two_aliasing_eigenvalues() {
        let disc = CircleDiscretization::new(16).unwrap();
        let lam = circulant_eigenvalues(&disc, true);
        let below: Vec<usize> = (0..16).filter(|&m| lam[m].abs() < 1e-90).collect();
        assert_eq!(below, vec![1, 15]);
        for (m, &v) in lam.iter().enumerate() {
            if m != 1 && m != 15 {
                assert!(v > 0.0, "frequency {m}: {v}");
            }
        }
        let (dim, basis) = degenerate_modes(&disc, true);
        assert_eq!(dim, 2);
        assert_eq!(basis.len(), 2);
        let (dim0, _) = degenerate_modes(&disc, false);
        assert_eq!(dim0, 0);
    }

    #[test]
    fn modified_kernel_requires_five_points() {
        let disc = CircleDiscretization::new(4).unwrap();
        assert!(matches!(
            modified_heat_kernel_circle(&disc),
            Err(Error::TooFewCirclePoints { .. })
        ));
    }

    #[test]
    fn uniform_reference_satisfies_el_equations() {
        let disc = CircleDiscretization::new(64).unwrap();
        let inst = circle_instance(&disc, false, Some(0.5)).unwrap();
        let rho = uniform_solution_reference(&disc, 0.5).unwrap();
        // (1 − 1/2) · 2π/64 per point, total mass π
        let expected = std::f64::consts::PI / 64.0;
        assert!((rho.weights()[0] - expected).abs() < 1e-15);
        assert!((rho.total() - std::f64::consts::PI).abs() < 1e-12);
        let phi = inst.potential_or_zero();
        let rep = el_residuals(&rho, &phi, &inst).unwrap();
        assert!(rep.sup_residual <= 1e-10, "residual {}", rep.sup_residual);
    }

    #[test]
    fn uniform_reference_mass_and_range() {
        let disc = CircleDiscretization::new(64).unwrap();
        let rho = uniform_solution_reference(&disc, 0.0).unwrap();
        assert!((rho.total() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(uniform_solution_reference(&disc, 1.0).is_err());
        assert!(uniform_solution_reference(&disc, -0.1).is_err());
        // a nearly saturating potential still gives a certified minimizer
        let inst = circle_instance(&disc, false, Some(0.99)).unwrap();
        let rho = uniform_solution_reference(&disc, 0.99).unwrap();
        assert!((rho.total() - 0.02 * std::f64::consts::PI).abs() < 1e-12);
        let ok =
            crate::solver::verify_global_minimizer(&rho, &inst.potential_or_zero(), &inst)
                .unwrap();
        assert!(ok);
    }

    #[test]
    fn modified_family_members_have_equal_action() {
        let disc = CircleDiscretization::new(16).unwrap();
        let inst = circle_instance(&disc, true, None).unwrap();
        let phi = Potential::zeros(16);
        let mut actions = Vec::new();
        for (alpha, beta) in [(0.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.5, 0.5), (-0.3, 0.2)] {
            let w = DVector::from_fn(16, |j, _| {
                (1.0 + alpha * disc.angle(j).cos() + beta * disc.angle(j).sin())
                    * disc.cell_mass()
            });
            let rho = Measure::new(w.map(|v| v.max(0.0))).unwrap();
            let rep = el_residuals(&rho, &phi, &inst).unwrap();
            assert!(rep.sup_residual <= 1e-8);
            actions.push(crate::model::action_value(&rho, &phi, &inst).unwrap());
        }
        for a in &actions {
            assert!((a - actions[0]).abs() < 1e-8);
        }
    }
}
