//! Minimization of the inner action over nonnegative measures.
//!
//! The exact path enumerates candidate supports: on a support S the
//! stationarity conditions read L_S ρ_S = s·1 − φ_S, and a candidate is kept
//! when the solved weights are nonnegative and the off-support minimum
//! condition (Lρ)ᵢ + φᵢ ≥ s holds. Since every global minimizer satisfies
//! these conditions on its own support, the minimum over all candidates (and
//! ρ = 0) is the global minimum. Singular support systems are solved in the
//! minimum-norm sense; the equal-action null family is reported and, when the
//! minimum-norm representative is infeasible, a feasible family member is
//! recovered by convex penalty descent so degenerate optima are not lost.
//!
//! The iterative path is projected gradient descent on the nonnegative
//! orthant with deterministic restarts.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{
    action_value, el_residuals, Measure, Potential, ProblemInstance, SignedMeasure,
    SolutionRecord, ACTION_TIE_TOLERANCE, EL_TOLERANCE_EXACT, EL_TOLERANCE_ITERATIVE,
    EXACT_SOLVER_MAX_N, SUPPORT_EPSILON,
};

/// Stationary solution of the inner action on a fixed support.
#[derive(Debug, Clone)]
pub struct SupportSolution {
    /// Requested support (sorted).
    pub support: Vec<usize>,
    /// Weights on the support; a feasible family member when the system is
    /// degenerate and the minimum-norm solution leaves the cone.
    pub rho_on_support: DVector<f64>,
    /// Dimension of the equal-action family through this solution, after
    /// intersecting the null space of L_S with the active-constraint
    /// lineality.
    pub family_dim: usize,
    /// Orthonormal directions spanning the reported family, embedded in the
    /// full space.
    pub family_basis: Vec<SignedMeasure>,
    /// Weights nonnegative and off-support minimum condition satisfied.
    pub feasible: bool,
}

impl SupportSolution {
    /// Full-length measure, clamping roundoff negatives to zero.
    pub fn measure(&self, n: usize) -> Measure {
        let mut w = DVector::zeros(n);
        for (k, &i) in self.support.iter().enumerate() {
            w[i] = self.rho_on_support[k].max(0.0);
        }
        Measure::new(w).expect("clamped weights are nonnegative")
    }
}

/// Solves the stationarity system on `support`.
pub fn solve_on_support(
    instance: &ProblemInstance,
    phi: &Potential,
    support: &[usize],
) -> Result<SupportSolution> {
    let n = instance.n();
    if phi.n() != n {
        return Err(Error::DimensionMismatch {
            what: "potential",
            expected: n,
            found: phi.n(),
        });
    }
    let mut support: Vec<usize> = support.to_vec();
    support.sort_unstable();
    support.dedup();
    if support.is_empty() {
        return Err(Error::DimensionMismatch {
            what: "support",
            expected: 1,
            found: 0,
        });
    }
    if let Some(&bad) = support.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    let s = instance.s();
    let l_s = instance.lagrangian().submatrix(&support);
    let b = DVector::from_fn(support.len(), |k, _| s - phi.values()[support[k]]);
    let solve = linalg::rank_solve(&l_s, &b);
    debug_assert_eq!(solve.rank + solve.null_basis.len(), support.len());
    let consistent = solve.residual <= 1e-9 * b.norm().max(1.0);

    let off: Vec<usize> = (0..n).filter(|i| !support.contains(i)).collect();
    let l_off = linalg::slice(instance.lagrangian().entries(), &off, &support);
    let phi_off = DVector::from_fn(off.len(), |k, _| phi.values()[off[k]]);

    let mut rho_s = solve.particular.clone();
    let mut feasible = false;
    if consistent {
        if violation(&rho_s, &l_off, &phi_off, s) <= EL_TOLERANCE_EXACT {
            feasible = true;
        } else if !solve.null_basis.is_empty() {
            if let Some(repaired) =
                repair_feasibility(&rho_s, &solve.null_basis, &l_off, &phi_off, s)
            {
                rho_s = repaired;
                feasible = true;
            }
        }
    }

    let (family_dim, family_basis) = if consistent {
        family_on_support(instance, &support, &rho_s, &solve.null_basis, &l_off, &phi_off, s)
    } else {
        (0, Vec::new())
    };

    Ok(SupportSolution {
        support,
        rho_on_support: rho_s,
        family_dim,
        family_basis,
        feasible,
    })
}

/// Worst constraint violation of a support vector: negativity of weights or
/// failure of the off-support minimum condition.
fn violation(rho_s: &DVector<f64>, l_off: &DMatrix<f64>, phi_off: &DVector<f64>, s: f64) -> f64 {
    let mut v = rho_s.iter().fold(0.0f64, |acc, &w| acc.max(-w));
    if l_off.nrows() > 0 {
        let lr = l_off * rho_s;
        for k in 0..l_off.nrows() {
            v = v.max(s - lr[k] - phi_off[k]);
        }
    }
    v
}

/// Gradient descent on the convex penalty
/// ‖min(0, x)‖² + ‖min(0, L_off x + φ_off − s)‖² over the null family.
fn repair_feasibility(
    x0: &DVector<f64>,
    null_basis: &[DVector<f64>],
    l_off: &DMatrix<f64>,
    phi_off: &DVector<f64>,
    s: f64,
) -> Option<DVector<f64>> {
    let k = null_basis.len();
    let nmat = DMatrix::from_columns(null_basis);
    let l_off_n = l_off * &nmat;
    let lip = 2.0 * (1.0 + linalg::sym_spectral_norm(&(l_off_n.transpose() * &l_off_n))).max(1.0);
    let mut c = DVector::zeros(k);
    for _ in 0..5_000 {
        let x = x0 + &nmat * &c;
        if violation(&x, l_off, phi_off, s) <= 0.5 * EL_TOLERANCE_EXACT {
            return Some(x);
        }
        let neg_x = x.map(|v| v.min(0.0));
        let mut grad = nmat.transpose() * &neg_x * 2.0;
        if l_off.nrows() > 0 {
            let slack = (l_off * &x + phi_off).map(|v| (v - s).min(0.0));
            grad += l_off_n.transpose() * &slack * 2.0;
        }
        let gnorm = grad.norm();
        if gnorm <= 1e-14 {
            break;
        }
        c -= grad / lip;
    }
    let x = x0 + &nmat * &c;
    if violation(&x, l_off, phi_off, s) <= EL_TOLERANCE_EXACT {
        Some(x)
    } else {
        None
    }
}

/// Null directions of L_S that keep the active constraints: zero weights stay
/// zero and active off-support equalities stay equalities. These directions
/// leave the action unchanged.
fn family_on_support(
    instance: &ProblemInstance,
    support: &[usize],
    rho_s: &DVector<f64>,
    null_basis: &[DVector<f64>],
    l_off: &DMatrix<f64>,
    phi_off: &DVector<f64>,
    s: f64,
) -> (usize, Vec<SignedMeasure>) {
    let n = instance.n();
    if null_basis.is_empty() {
        return (0, Vec::new());
    }
    let k = null_basis.len();
    let nmat = DMatrix::from_columns(null_basis);
    let mut constraint_rows: Vec<DVector<f64>> = Vec::new();
    for (idx, &w) in rho_s.iter().enumerate() {
        if w <= SUPPORT_EPSILON {
            let mut row = DVector::zeros(support.len());
            row[idx] = 1.0;
            constraint_rows.push(row);
        }
    }
    if l_off.nrows() > 0 {
        let lr = l_off * rho_s;
        for r in 0..l_off.nrows() {
            if (lr[r] + phi_off[r] - s).abs() <= EL_TOLERANCE_EXACT {
                constraint_rows.push(l_off.row(r).transpose());
            }
        }
    }
    let combos = if constraint_rows.is_empty() {
        (0..k)
            .map(|j| {
                let mut e = DVector::zeros(k);
                e[j] = 1.0;
                e
            })
            .collect::<Vec<_>>()
    } else {
        let mut cn = DMatrix::zeros(constraint_rows.len(), k);
        for (r, row) in constraint_rows.iter().enumerate() {
            cn.set_row(r, &(row.transpose() * &nmat));
        }
        linalg::null_space(&cn)
    };
    let basis: Vec<SignedMeasure> = combos
        .iter()
        .map(|q| {
            let dir_s = &nmat * q;
            let mut full = DVector::zeros(n);
            for (idx, &i) in support.iter().enumerate() {
                full[i] = dir_s[idx];
            }
            SignedMeasure::new(full)
        })
        .collect();
    (basis.len(), basis)
}

/// Builds a full diagnostic record for (ρ, φ).
pub(crate) fn make_record(
    rho: Measure,
    phi: &Potential,
    instance: &ProblemInstance,
    degeneracy_dim: usize,
    el_tolerance: f64,
) -> SolutionRecord {
    let action = action_value(&rho, phi, instance).expect("dimensions checked");
    let report = el_residuals(&rho, phi, instance).expect("dimensions checked");
    let psd_tol = instance.lagrangian().psd_tolerance();
    let support = rho.support();
    // Criterion (iii) of the sufficiency theorem, evaluated after off-support
    // canonicalization: on the support the potential must stay below s.
    let support_matches = support.iter().all(|&i| phi.values()[i] <= instance.s() + el_tolerance);
    let certified_global = report.sup_residual <= el_tolerance
        && report.psd_min_eigenvalue >= -psd_tol
        && support_matches;
    SolutionRecord {
        rho,
        phi: phi.clone(),
        action,
        el_sup_residual: report.sup_residual,
        psd_min_eigenvalue: report.psd_min_eigenvalue,
        degeneracy_dim,
        certified_global,
    }
}

/// Exact global minimization by support enumeration (n ≤ 16).
///
/// Returns every global minimizer found, sorted by support then weights;
/// degenerate families are represented by one feasible member with
/// `degeneracy_dim` set.
pub fn minimize_exact(instance: &ProblemInstance, phi: &Potential) -> Result<Vec<SolutionRecord>> {
    let n = instance.n();
    if n > EXACT_SOLVER_MAX_N {
        return Err(Error::TooManyPoints {
            n,
            max: EXACT_SOLVER_MAX_N,
        });
    }
    if phi.n() != n {
        return Err(Error::DimensionMismatch {
            what: "potential",
            expected: n,
            found: phi.n(),
        });
    }
    let masks: Vec<u32> = (1u32..(1 << n)).collect();
    let mut candidates: Vec<(Vec<usize>, SupportSolution)> = masks
        .par_iter()
        .filter_map(|&mask| {
            let support: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let sol = solve_on_support(instance, phi, &support).ok()?;
            sol.feasible.then_some((support, sol))
        })
        .collect();
    candidates.sort_by(|a, b| a.0.cmp(&b.0));

    let mut records: Vec<SolutionRecord> = Vec::new();
    for (_, sol) in candidates {
        let measure = sol.measure(n);
        records.push(make_record(
            measure,
            phi,
            instance,
            sol.family_dim,
            EL_TOLERANCE_EXACT,
        ));
    }
    let min_action = records
        .iter()
        .map(|r| r.action)
        .fold(f64::INFINITY, f64::min)
        .min(0.0);
    if 0.0 <= min_action + ACTION_TIE_TOLERANCE {
        records.push(make_record(
            Measure::zeros(n),
            phi,
            instance,
            0,
            EL_TOLERANCE_EXACT,
        ));
    }
    records.retain(|r| r.action <= min_action + ACTION_TIE_TOLERANCE);
    records.sort_by(|a, b| {
        a.rho
            .support()
            .cmp(&b.rho.support())
            .then_with(|| lex_cmp(a.rho.weights(), b.rho.weights()))
    });
    records.dedup_by(|a, b| (a.rho.weights() - b.rho.weights()).amax() <= 1e-9);
    Ok(records)
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

/// Settings for [`minimize_iterative`].
#[derive(Debug, Clone)]
pub struct IterativeConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
}

impl Default for IterativeConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 100_000,
            grad_tol: 1e-10,
            seed: 0x1db7,
        }
    }
}

/// Result of the projected-gradient solver.
#[derive(Debug, Clone)]
pub struct IterativeOutcome {
    pub record: SolutionRecord,
    /// Projected-gradient norm of the reported iterate.
    pub pg_residual: f64,
    /// Whether the gradient tolerance was met within the iteration budget.
    pub converged: bool,
}

/// Projected gradient descent on the nonnegative orthant, step 1/(2‖L‖),
/// restarted from ρ = 0, the uniform vector and scaled random vectors. The
/// best iterate is selected by action, with norm as tie-break (degenerate
/// directions leave the action flat, and the minimum-norm representative is
/// the canonical one).
pub fn minimize_iterative(
    instance: &ProblemInstance,
    phi: &Potential,
    config: &IterativeConfig,
) -> Result<IterativeOutcome> {
    let n = instance.n();
    if phi.n() != n {
        return Err(Error::DimensionMismatch {
            what: "potential",
            expected: n,
            found: phi.n(),
        });
    }
    let l = instance.lagrangian();
    let s = instance.s();
    let norm = l.spectral_norm().max(f64::MIN_POSITIVE);
    let step = 1.0 / (2.0 * norm);
    let max_row_sum = (0..n)
        .map(|i| l.entries().row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(f64::MIN_POSITIVE, f64::max);

    let mut starts: Vec<DVector<f64>> = vec![
        DVector::zeros(n),
        DVector::from_element(n, s / max_row_sum),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let scale = crate::model::apriori_volume_bound(instance) / n as f64;
    for _ in 0..config.restarts {
        starts.push(DVector::from_fn(n, |_, _| rng.gen::<f64>() * scale));
    }

    let mut best: Option<(f64, f64, DVector<f64>, f64, bool)> = None;
    for start in starts {
        let mut rho = start;
        let mut pg_norm = f64::INFINITY;
        let mut converged = false;
        for _ in 0..config.max_iters {
            let grad = (l.apply(&rho) + phi.values() - DVector::from_element(n, s)) * 2.0;
            let next = (&rho - &grad * step).map(|v| v.max(0.0));
            pg_norm = (&rho - &next).norm() / step;
            rho = next;
            if pg_norm <= config.grad_tol {
                converged = true;
                break;
            }
        }
        let action = {
            let m = Measure::new(rho.clone()).expect("projection keeps weights nonnegative");
            action_value(&m, phi, instance)?
        };
        let nrm = rho.norm();
        let better = match &best {
            None => true,
            Some((ba, bn, _, _, _)) => {
                let tie = 1e-12 * (1.0 + ba.abs());
                action < ba - tie || ((action - ba).abs() <= tie && nrm < bn - 1e-12)
            }
        };
        if better {
            best = Some((action, nrm, rho.clone(), pg_norm, converged));
        }
    }
    let (_, _, rho, pg_residual, converged) = best.expect("at least one start");
    let measure = Measure::new(rho).expect("nonnegative by projection");
    let mut record = make_record(measure, phi, instance, 0, EL_TOLERANCE_ITERATIVE);
    // A KKT point of a convex instance is a global minimizer; otherwise the
    // iterative path cannot certify globality.
    let globally_psd = linalg::sym_min_eig(l.entries()) >= -l.psd_tolerance();
    record.certified_global = record.certified_global && globally_psd && converged;
    Ok(IterativeOutcome {
        record,
        pg_residual,
        converged,
    })
}

/// Sufficiency check: EL residuals within tolerance, L PSD on the support,
/// and supp ρ = { i : φᵢ ≤ s } exactly as index sets.
pub fn verify_global_minimizer(
    rho: &Measure,
    phi: &Potential,
    instance: &ProblemInstance,
) -> Result<bool> {
    let report = el_residuals(rho, phi, instance)?;
    let psd_tol = instance.lagrangian().psd_tolerance();
    let support = rho.support();
    let sublevel: Vec<usize> = (0..instance.n())
        .filter(|&i| phi.values()[i] <= instance.s())
        .collect();
    Ok(report.sup_residual <= EL_TOLERANCE_EXACT
        && report.psd_min_eigenvalue >= -psd_tol
        && support == sublevel)
}

/// Replaces the potential off the support by the constant 2s; the minimizer
/// property of ρ is preserved.
pub fn canonicalize_potential(
    rho: &Measure,
    phi: &Potential,
    instance: &ProblemInstance,
) -> Result<Potential> {
    if rho.n() != instance.n() || phi.n() != instance.n() {
        return Err(Error::DimensionMismatch {
            what: "canonicalize",
            expected: instance.n(),
            found: rho.n().min(phi.n()),
        });
    }
    let support = rho.support();
    let values = DVector::from_fn(instance.n(), |i, _| {
        if support.contains(&i) {
            phi.values()[i]
        } else {
            2.0 * instance.s()
        }
    });
    Potential::new(values)
}

/// Restricts a minimizer to `subset`, compensating the removed mass in the
/// potential: (χ_J ρ, φ + L(χ_{I∖J} ρ)).
pub fn localize(
    rho: &Measure,
    phi: &Potential,
    subset: &[usize],
    instance: &ProblemInstance,
) -> Result<(Measure, Potential)> {
    let n = instance.n();
    if rho.n() != n || phi.n() != n {
        return Err(Error::DimensionMismatch {
            what: "localize",
            expected: n,
            found: rho.n().min(phi.n()),
        });
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    let inside = DVector::from_fn(n, |i, _| {
        if subset.contains(&i) {
            rho.weights()[i]
        } else {
            0.0
        }
    });
    let outside = rho.weights() - &inside;
    let new_phi = phi.values() + instance.lagrangian().apply(&outside);
    Ok((Measure::new(inside)?, Potential::new(new_phi)?))
}

/// Tests whether positivity of the solution operator extends by the
/// one-dimensional direction ν supported in K ∖ supp ρ, where
/// K = { i : (Lρ)ᵢ + φᵢ = s }. Returns the verdict and the smallest
/// eigenvalue of the extended symmetric form.
pub fn extended_positivity_check(
    rho: &Measure,
    phi: &Potential,
    nu: &Measure,
    instance: &ProblemInstance,
) -> Result<(bool, f64)> {
    let n = instance.n();
    if rho.n() != n || phi.n() != n || nu.n() != n {
        return Err(Error::DimensionMismatch {
            what: "extended positivity",
            expected: n,
            found: rho.n().min(phi.n()).min(nu.n()),
        });
    }
    let nu_support = nu.support();
    if nu_support.is_empty() {
        return Err(Error::NuZero);
    }
    let report = el_residuals(rho, phi, instance)?;
    let support = rho.support();
    for &i in &nu_support {
        let in_k = report.per_point[i].abs() <= EL_TOLERANCE_EXACT;
        if !in_k || support.contains(&i) {
            return Err(Error::NuNotInK(i));
        }
    }
    let l = instance.lagrangian().entries();
    let nu_total = nu.total();
    let l_nu = instance.lagrangian().apply(nu.weights());
    let m = support.len();
    let mut form = DMatrix::zeros(m + 1, m + 1);
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            form[(r, c)] = (rho.weights()[i] * rho.weights()[j]).sqrt() * l[(i, j)];
        }
        form[(r, m)] = rho.weights()[i].sqrt() * l_nu[i] / nu_total.sqrt();
        form[(m, r)] = form[(r, m)];
    }
    form[(m, m)] = nu.weights().dot(&l_nu) / nu_total;
    let min_eig = linalg::sym_min_eig(&form);
    Ok((min_eig >= -instance.lagrangian().psd_tolerance(), min_eig))
}
