//! Admissibility of initial data and the initial value problem.
//!
//! Initial data (ρ₀, I₀) is admissible iff Lρ₀ ≤ s on supp ρ₀ ∪ I₀ and L is
//! PSD on that set. A solution of the initial value problem for a potential
//! φ is a global minimizer ρ of the inner action with (a) ρ ≥ ρ₀,
//! (b) Lρ + φ ≡ s on I₀ and (c) L PSD on I₀ ∪ supp ρ.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{
    InitialData, Measure, Potential, ProblemInstance, SolutionRecord, ACTION_TIE_TOLERANCE,
    EL_TOLERANCE_EXACT, EXACT_SOLVER_MAX_N, SUPPORT_EPSILON,
};
use crate::solver;

/// Outcome of the admissibility test.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// max of Lρ₀ over supp ρ₀ ∪ I₀ (−inf when that set is empty).
    pub lrho0_max: f64,
    /// Smallest eigenvalue of L restricted to supp ρ₀ ∪ I₀.
    pub psd_min_eig: f64,
    /// Index witnessing a violation of Lρ₀ ≤ s, when one exists.
    pub violating_index: Option<usize>,
}

/// Checks the two admissibility conditions.
pub fn check_admissible(
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<AdmissibilityReport> {
    if initial.rho0().n() != instance.n() {
        return Err(Error::DimensionMismatch {
            what: "initial measure",
            expected: instance.n(),
            found: initial.rho0().n(),
        });
    }
    let s = instance.s();
    let enclosure = initial.enclosure();
    let l_rho0 = instance.lagrangian().apply(initial.rho0().weights());
    let mut lrho0_max = f64::NEG_INFINITY;
    let mut violating_index = None;
    for &i in &enclosure {
        if l_rho0[i] > lrho0_max {
            lrho0_max = l_rho0[i];
        }
        if l_rho0[i] > s + EL_TOLERANCE_EXACT && violating_index.is_none() {
            violating_index = Some(i);
        }
    }
    let psd_min_eig = instance.lagrangian().min_eig_on(&enclosure);
    let admissible = lrho0_max <= s + EL_TOLERANCE_EXACT
        && psd_min_eig >= -instance.lagrangian().psd_tolerance();
    Ok(AdmissibilityReport {
        admissible,
        lrho0_max,
        psd_min_eig,
        violating_index,
    })
}

/// True iff all distinct points of `subset` are space-like separated
/// (L(x,y) = 0 exactly).
pub fn is_totally_spacelike(subset: &[usize], instance: &ProblemInstance) -> bool {
    let l = instance.lagrangian().entries();
    for (a, &i) in subset.iter().enumerate() {
        for &j in subset.iter().skip(a + 1) {
            if i != j && l[(i, j)] != 0.0 {
                return false;
            }
        }
    }
    true
}

/// The potential that makes ρ₀ a certified minimizer: s − Lρ₀ on
/// supp ρ₀ ∪ I₀ and 2s elsewhere.
pub fn canonical_initial_potential(
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<Potential> {
    let report = check_admissible(initial, instance)?;
    if !report.admissible {
        return Err(Error::NotAdmissible);
    }
    let s = instance.s();
    let enclosure = initial.enclosure();
    let l_rho0 = instance.lagrangian().apply(initial.rho0().weights());
    let values = DVector::from_fn(instance.n(), |i, _| {
        if enclosure.contains(&i) {
            (s - l_rho0[i]).max(0.0)
        } else {
            2.0 * s
        }
    });
    Potential::new(values)
}

/// Solves the initial value problem for the given potential: global
/// minimizers filtered by conditions (a)-(c). Degenerate support families
/// are searched for a member meeting the constraints, so solutions inside
/// flat families are found. An empty list means φ admits no solution.
pub fn solve_ivp(
    initial: &InitialData,
    phi: &Potential,
    instance: &ProblemInstance,
) -> Result<Vec<SolutionRecord>> {
    let n = instance.n();
    if n > EXACT_SOLVER_MAX_N {
        return Err(Error::TooManyPoints {
            n,
            max: EXACT_SOLVER_MAX_N,
        });
    }
    if initial.rho0().n() != n || phi.n() != n {
        return Err(Error::DimensionMismatch {
            what: "initial data or potential",
            expected: n,
            found: initial.rho0().n().min(phi.n()),
        });
    }
    let s = instance.s();
    let rho0 = initial.rho0();
    let psd_tol = instance.lagrangian().psd_tolerance();

    let mut solutions: Vec<(Vec<usize>, solver::SupportSolution)> = Vec::new();
    let mut min_action = 0.0f64;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sol = solver::solve_on_support(instance, phi, &support)?;
        if sol.feasible {
            let m = sol.measure(n);
            let action = crate::model::action_value(&m, phi, instance)?;
            if action < min_action {
                min_action = action;
            }
            solutions.push((support, sol));
        }
    }

    let mut records: Vec<SolutionRecord> = Vec::new();
    for (support, sol) in solutions {
        let m = sol.measure(n);
        let action = crate::model::action_value(&m, phi, instance)?;
        if action > min_action + ACTION_TIE_TOLERANCE {
            continue;
        }
        let candidate = if satisfies_initial(&m, initial, phi, instance) {
            Some(m)
        } else {
            seek_constrained_member(&sol, &support, initial, phi, instance)
                .filter(|member| satisfies_initial(member, initial, phi, instance))
        };
        if let Some(member) = candidate {
            let action = crate::model::action_value(&member, phi, instance)?;
            if action > min_action + ACTION_TIE_TOLERANCE {
                continue;
            }
            let mut check_set = initial.set().to_vec();
            check_set.extend(member.support());
            check_set.sort_unstable();
            check_set.dedup();
            if instance.lagrangian().min_eig_on(&check_set) < -psd_tol {
                continue;
            }
            records.push(solver::make_record(
                member,
                phi,
                instance,
                sol.family_dim,
                EL_TOLERANCE_EXACT,
            ));
        }
    }
    // the zero measure solves the problem when it is minimal, the initial
    // measure vanishes and Lρ + φ ≡ s holds on I₀
    if 0.0 <= min_action + ACTION_TIE_TOLERANCE
        && rho0.is_zero()
        && initial
            .set()
            .iter()
            .all(|&i| (phi.values()[i] - s).abs() <= EL_TOLERANCE_EXACT)
        && instance.lagrangian().min_eig_on(initial.set()) >= -psd_tol
        && (0..n).all(|i| phi.values()[i] >= s - EL_TOLERANCE_EXACT)
    {
        records.push(solver::make_record(
            Measure::zeros(n),
            phi,
            instance,
            0,
            EL_TOLERANCE_EXACT,
        ));
    }
    records.sort_by(|a, b| {
        a.rho
            .support()
            .cmp(&b.rho.support())
            .then_with(|| lex_cmp(a.rho.weights(), b.rho.weights()))
    });
    records.dedup_by(|a, b| (a.rho.weights() - b.rho.weights()).amax() <= 1e-9);
    Ok(records)
}

/// Conditions (a) and (b) of the initial value problem.
fn satisfies_initial(
    m: &Measure,
    initial: &InitialData,
    phi: &Potential,
    instance: &ProblemInstance,
) -> bool {
    let rho0 = initial.rho0();
    for i in 0..m.n() {
        if m.weights()[i] < rho0.weights()[i] - SUPPORT_EPSILON {
            return false;
        }
    }
    let l_rho = instance.lagrangian().apply(m.weights());
    initial
        .set()
        .iter()
        .all(|&i| (l_rho[i] + phi.values()[i] - instance.s()).abs() <= EL_TOLERANCE_EXACT)
}

/// Searches the equal-action family on a support for a member with ρ ≥ ρ₀,
/// ρ ≥ 0, the off-support minimum condition, and Lρ + φ ≡ s on I₀, by
/// minimizing a convex penalty over the null coordinates.
fn seek_constrained_member(
    sol: &solver::SupportSolution,
    support: &[usize],
    initial: &InitialData,
    phi: &Potential,
    instance: &ProblemInstance,
) -> Option<Measure> {
    if sol.family_basis.is_empty() {
        return None;
    }
    let n = instance.n();
    let s = instance.s();
    let k = sol.family_basis.len();
    // work in full-space coordinates; directions vanish off the support
    let basis: Vec<DVector<f64>> = sol
        .family_basis
        .iter()
        .map(|b| b.weights().clone())
        .collect();
    let x0 = sol.measure(n).weights().clone();
    let lower = initial.rho0().weights();
    let off: Vec<usize> = (0..n).filter(|i| !support.contains(i)).collect();
    let l = instance.lagrangian().entries();

    let nmat = nalgebra::DMatrix::from_columns(&basis);
    let l_n = l * &nmat;
    let mut c = DVector::zeros(k);
    let lip = {
        let mut t = 1.0 + linalg::sym_spectral_norm(&(l_n.transpose() * &l_n));
        t *= 2.0;
        t.max(1.0)
    };
    for _ in 0..20_000 {
        let x = &x0 + &nmat * &c;
        let lx = l * &x;
        let mut grad = DVector::zeros(k);
        for i in 0..n {
            let short = (x[i] - lower[i].max(0.0)).min(0.0);
            if short < 0.0 {
                for j in 0..k {
                    grad[j] += 2.0 * short * nmat[(i, j)];
                }
            }
        }
        for &i in &off {
            let slack = (lx[i] + phi.values()[i] - s).min(0.0);
            if slack < 0.0 {
                for j in 0..k {
                    grad[j] += 2.0 * slack * l_n[(i, j)];
                }
            }
        }
        for &i in initial.set().iter() {
            if support.contains(&i) {
                continue;
            }
            let eq = lx[i] + phi.values()[i] - s;
            for j in 0..k {
                grad[j] += 2.0 * eq * l_n[(i, j)];
            }
        }
        if grad.norm() <= 1e-14 {
            break;
        }
        c -= grad / lip;
    }
    let x = (&x0 + &nmat * &c).map(|v| v.max(0.0));
    Measure::new(x).ok()
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_fixtures::*;

    fn wedge_initial() -> InitialData {
        InitialData::measure_only(Measure::from_slice(&[0.0, 0.5, 0.0]).unwrap())
    }

    #[test]
    fn wedge_initial_data_is_admissible() {
        let inst = wedge();
        let report = check_admissible(&wedge_initial(), &inst).unwrap();
        assert!(report.admissible);
        assert!((report.lrho0_max - 0.5).abs() < 1e-15);
        assert!(report.psd_min_eig > 0.0);
        assert!(report.violating_index.is_none());
    }

    #[test]
    fn constant_lagrangian_mass_above_one_is_inadmissible() {
        let inst = constant_lagrangian(3);
        let initial =
            InitialData::measure_only(Measure::from_slice(&[0.5, 0.5, 0.5]).unwrap());
        let report = check_admissible(&initial, &inst).unwrap();
        assert!(!report.admissible);
        assert!((report.lrho0_max - 1.5).abs() < 1e-12);
        assert!(report.violating_index.is_some());
    }

    #[test]
    fn spacelike_set_with_zero_measure_is_admissible() {
        let inst = wedge();
        let initial = InitialData::new(Measure::zeros(3), &[0, 2]).unwrap();
        assert!(is_totally_spacelike(&[0, 2], &inst));
        let report = check_admissible(&initial, &inst).unwrap();
        assert!(report.admissible);
    }

    #[test]
    fn spacelike_classification() {
        let inst = wedge();
        assert!(is_totally_spacelike(&[0, 2], &inst));
        assert!(!is_totally_spacelike(&[0, 1], &inst));
        for i in 0..3 {
            assert!(is_totally_spacelike(&[i], &inst));
        }
    }

    #[test]
    fn canonical_potential_for_wedge() {
        let inst = wedge();
        let phi = canonical_initial_potential(&wedge_initial(), &inst).unwrap();
        assert_eq!(phi.values().as_slice(), &[2.0, 0.5, 2.0]);
        let rho0 = wedge_initial().rho0().clone();
        assert!(crate::solver::verify_global_minimizer(&rho0, &phi, &inst).unwrap());
    }

    #[test]
    fn canonical_potential_for_zero_measure() {
        let inst = wedge();
        let initial = InitialData::measure_only(Measure::zeros(3));
        let phi = canonical_initial_potential(&initial, &inst).unwrap();
        assert_eq!(phi.values().as_slice(), &[2.0, 2.0, 2.0]);
        let records = crate::solver::minimize_exact(&inst, &phi).unwrap();
        assert_eq!(records.len(), 1);
        assert!(records[0].rho.is_zero());
    }

    #[test]
    fn canonical_potential_three_point_example() {
        let inst = asym_three_point();
        let initial =
            InitialData::measure_only(Measure::from_slice(&[1.0, 0.0, 0.0]).unwrap());
        let phi = canonical_initial_potential(&initial, &inst).unwrap();
        assert_eq!(phi.values().as_slice(), &[0.0, 2.0, 2.0]);
    }

    #[test]
    fn ivp_wedge_with_maximal_potential() {
        let inst = wedge();
        let phi = Potential::from_slice(&[0.25, 0.0, 0.25]).unwrap();
        let records = solve_ivp(&wedge_initial(), &phi, &inst).unwrap();
        assert_eq!(records.len(), 1);
        for i in 0..3 {
            assert!((records[0].rho.weights()[i] - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn ivp_wedge_with_zero_potential_is_empty() {
        // the unconstrained minimizer for φ = 0 is (1, 0, 1), violating
        // ρ ≥ ρ₀ at the middle point
        let inst = wedge();
        let phi = Potential::zeros(3);
        let records = solve_ivp(&wedge_initial(), &phi, &inst).unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn ivp_constant_lagrangian_family() {
        let inst = constant_lagrangian(3);
        let initial =
            InitialData::measure_only(Measure::from_slice(&[0.0, 0.4, 0.0]).unwrap());
        let phi = Potential::constant(0.2, 3).unwrap();
        let records = solve_ivp(&initial, &phi, &inst).unwrap();
        assert!(!records.is_empty());
        for r in &records {
            assert!((r.rho.total() - 0.8).abs() < 1e-8);
            assert!(r.rho.weights()[1] >= 0.4 - 1e-9);
        }
        // at least one record carries the degenerate family
        assert!(records.iter().any(|r| r.degeneracy_dim > 0));
    }

    #[test]
    fn ivp_zero_solution_when_potential_is_high() {
        let inst = wedge();
        let initial = InitialData::measure_only(Measure::zeros(3));
        let phi = Potential::constant(2.0, 3).unwrap();
        let records = solve_ivp(&initial, &phi, &inst).unwrap();
        assert_eq!(records.len(), 1);
        assert!(records[0].rho.is_zero());
    }
}
