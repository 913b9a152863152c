//! Uniqueness structures: dependent sets, the domain of dependence, definite
//! sets, solution germs and the maximal optimal solution.
//!
//! A subset Ω enclosing the initial data is certified dependent when the
//! quadratic form μ ↦ μᵀLμ is strictly positive on the signed measures
//! supported in Ω with (Lμ)ᵢ = 0 on supp ρ₀ ∪ I₀. The criterion is
//! sufficient only: a failed certificate means "not certified", not "not
//! dependent". Certification is monotone under shrinking, so the maximal
//! certified sets determine the domain of dependence as their intersection.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{
    InitialData, LagrangianMatrix, Measure, PointSpace, ProblemInstance,
    EL_TOLERANCE_EXACT, EXACT_SOLVER_MAX_N,
};
use crate::optimizer::{self, ProblemTag};

/// Subset-enumeration cap (2ⁿ subsets are tested).
pub const SUBSET_ENUM_MAX_N: usize = EXACT_SOLVER_MAX_N;

/// Certificate for the dependence criterion on a subset.
#[derive(Debug, Clone)]
pub struct DependenceCertificate {
    pub subset: Vec<usize>,
    /// Minimum of μᵀLμ over unit μ supported on the subset with Lμ ≡ 0 on
    /// the initial-data enclosure; +inf when only μ = 0 qualifies.
    pub constrained_min_eig: f64,
    pub certified_dependent: bool,
}

/// A definite set together with its unique maximal-volume optimum.
#[derive(Debug, Clone)]
pub struct SolutionGerm {
    pub subset: Vec<usize>,
    pub rho: Measure,
    pub volume: f64,
}

/// Minimum eigenvalue of the quadratic form μ ↦ μᵀLμ on
/// { μ supported on `subset` : (Lμ)ᵢ = 0 for all i ∈ `anchor` }.
/// Returns +inf when the subspace is trivial.
pub fn constrained_quadratic_min(
    subset: &[usize],
    anchor: &[usize],
    instance: &ProblemInstance,
) -> f64 {
    if subset.is_empty() {
        return f64::INFINITY;
    }
    let rows = linalg::slice(instance.lagrangian().entries(), anchor, subset);
    let basis = linalg::null_space(&rows);
    if basis.is_empty() {
        return f64::INFINITY;
    }
    let nmat = DMatrix::from_columns(&basis);
    let l_sub = instance.lagrangian().submatrix(subset);
    let reduced = nmat.transpose() * l_sub * &nmat;
    linalg::sym_min_eig(&reduced)
}

/// Applies the sufficient dependence criterion to `subset`.
pub fn certify_dependent(
    subset: &[usize],
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<DependenceCertificate> {
    let mut subset: Vec<usize> = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    let enclosure = initial.enclosure();
    if let Some(&missing) = enclosure.iter().find(|i| !subset.contains(i)) {
        return Err(Error::DoesNotEncloseInitialData(missing));
    }
    let constrained_min_eig = constrained_quadratic_min(&subset, &enclosure, instance);
    let certified_dependent = constrained_min_eig > instance.lagrangian().psd_tolerance();
    Ok(DependenceCertificate {
        subset,
        constrained_min_eig,
        certified_dependent,
    })
}

fn subset_from_mask(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// All maximal certified-dependent sets, sorted lexicographically.
///
/// Certification is monotone under shrinking, so a certified set is maximal
/// iff no one-point extension certifies.
pub fn maximal_dependent_sets(
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<Vec<Vec<usize>>> {
    let n = instance.n();
    if n > SUBSET_ENUM_MAX_N {
        return Err(Error::TooManyPoints {
            n,
            max: SUBSET_ENUM_MAX_N,
        });
    }
    let enclosure_mask: u32 = initial.enclosure().iter().fold(0, |m, &i| m | (1 << i));
    let masks: Vec<u32> = (0u32..(1 << n))
        .filter(|m| m & enclosure_mask == enclosure_mask)
        .collect();
    let certified: Vec<bool> = masks
        .par_iter()
        .map(|&mask| {
            let subset = subset_from_mask(mask, n);
            certify_dependent(&subset, initial, instance)
                .map(|c| c.certified_dependent)
                .unwrap_or(false)
        })
        .collect();
    let lookup: std::collections::HashMap<u32, bool> =
        masks.iter().copied().zip(certified.iter().copied()).collect();
    let mut maximal: Vec<Vec<usize>> = Vec::new();
    for (&mask, &ok) in masks.iter().zip(certified.iter()) {
        if !ok {
            continue;
        }
        let extendable = (0..n).any(|p| {
            mask >> p & 1 == 0 && lookup.get(&(mask | (1 << p))).copied().unwrap_or(false)
        });
        if !extendable {
            maximal.push(subset_from_mask(mask, n));
        }
    }
    maximal.sort();
    Ok(maximal)
}

/// Intersection of all maximal dependent sets. Errors with
/// [`Error::NoDependentSet`] when nothing certifies (distinct from an empty
/// intersection).
pub fn domain_of_dependence(
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<Vec<usize>> {
    let maximal = maximal_dependent_sets(initial, instance)?;
    if maximal.is_empty() {
        return Err(Error::NoDependentSet);
    }
    let mut intersection: Vec<usize> = maximal[0].clone();
    for set in &maximal[1..] {
        intersection.retain(|i| set.contains(i));
    }
    Ok(intersection)
}

/// Definiteness check: (i) L strictly positive definite on the subset and
/// (ii) Lρ ≤ s on the subset for every solution of the initial value
/// problem there. Condition (ii) is checked over the finitely many
/// per-support polytope vertices (the constraint is affine per support, so
/// extremes occur at vertices); that sweep is the implemented surrogate for
/// the quantification over all solutions.
pub fn certify_definite(
    subset: &[usize],
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<bool> {
    let mut subset: Vec<usize> = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    let enclosure = initial.enclosure();
    if let Some(&missing) = enclosure.iter().find(|i| !subset.contains(i)) {
        return Err(Error::DoesNotEncloseInitialData(missing));
    }
    if subset.is_empty() {
        return Ok(true);
    }
    if instance.lagrangian().min_eig_on(&subset) <= instance.lagrangian().psd_tolerance() {
        return Ok(false);
    }
    let (sub_instance, sub_initial) = restrict(instance, initial, &subset)?;
    let solutions = optimizer::vertex_solutions(&sub_initial, &sub_instance)?;
    let s = instance.s();
    for (m, _) in solutions {
        let l_rho = sub_instance.lagrangian().apply(m.weights());
        if l_rho.iter().any(|&v| v > s + EL_TOLERANCE_EXACT) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Problem instance and initial data restricted to a subset of points.
fn restrict(
    instance: &ProblemInstance,
    initial: &InitialData,
    subset: &[usize],
) -> Result<(ProblemInstance, InitialData)> {
    let labels: Vec<String> = subset
        .iter()
        .map(|&i| instance.space().labels()[i].clone())
        .collect();
    let space = PointSpace::new(labels)?;
    let l = LagrangianMatrix::new(instance.lagrangian().submatrix(subset))?;
    let sub_instance = ProblemInstance::new(space, l, instance.s())?;
    let rho0 = Measure::new(DVector::from_fn(subset.len(), |k, _| {
        initial.rho0().weights()[subset[k]]
    }))?;
    let set: Vec<usize> = initial
        .set()
        .iter()
        .filter_map(|i| subset.iter().position(|j| j == i))
        .collect();
    let sub_initial = InitialData::new(rho0, &set)?;
    Ok((sub_instance, sub_initial))
}

/// The unique maximal-volume action optimum on a definite subset, embedded
/// into the full space.
fn optimal_on_subset(
    subset: &[usize],
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<Measure> {
    if subset.is_empty() {
        return Ok(Measure::zeros(instance.n()));
    }
    let (sub_instance, sub_initial) = restrict(instance, initial, subset)?;
    let result = optimizer::optimize(ProblemTag::D, &sub_initial, &sub_instance)?;
    let best = result.solutions.first().ok_or(Error::NotAdmissible)?;
    let mut w = DVector::zeros(instance.n());
    for (k, &i) in subset.iter().enumerate() {
        w[i] = best.rho.weights()[k];
    }
    Measure::new(w)
}

/// Enumerates definite subsets, computes their optima, and keeps the pairs
/// satisfying the germ implication against every other definite optimum:
/// larger-or-equal volume forces pointwise domination. Sorted by volume.
pub fn solution_germs(
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<Vec<SolutionGerm>> {
    let n = instance.n();
    if n > SUBSET_ENUM_MAX_N {
        return Err(Error::TooManyPoints {
            n,
            max: SUBSET_ENUM_MAX_N,
        });
    }
    let enclosure_mask: u32 = initial.enclosure().iter().fold(0, |m, &i| m | (1 << i));
    let mut optima: Vec<(Vec<usize>, Measure)> = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask & enclosure_mask != enclosure_mask {
            continue;
        }
        let subset = subset_from_mask(mask, n);
        if !certify_definite(&subset, initial, instance)? {
            continue;
        }
        if let Ok(m) = optimal_on_subset(&subset, initial, instance) {
            optima.push((subset, m));
        }
    }
    let mut germs: Vec<SolutionGerm> = Vec::new();
    for (subset, rho) in &optima {
        let volume = rho.total();
        let is_germ = optima.iter().all(|(other, other_rho)| {
            if other == subset {
                return true;
            }
            let other_volume = other_rho.total();
            if other_volume >= volume - 1e-12 {
                (0..n).all(|i| other_rho.weights()[i] >= rho.weights()[i] - 1e-9)
            } else {
                true
            }
        });
        if is_germ {
            germs.push(SolutionGerm {
                subset: subset.clone(),
                rho: rho.clone(),
                volume,
            });
        }
    }
    germs.sort_by(|a, b| {
        a.volume
            .partial_cmp(&b.volume)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.subset.cmp(&b.subset))
    });
    // one germ per volume: equal volumes force equal measures, keep one
    germs.dedup_by(|a, b| {
        (a.volume - b.volume).abs() <= 1e-12
            && (a.rho.weights() - b.rho.weights()).amax() <= 1e-9
    });
    Ok(germs)
}

/// The germ measure of maximal volume. On a finite space the volume set is
/// finite, so the limit of volume-maximizing germ sequences is attained.
pub fn maximal_optimal_solution(
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<Measure> {
    let germs = solution_germs(initial, instance)?;
    germs
        .last()
        .map(|g| g.rho.clone())
        .ok_or(Error::NoGerms)
}
