//! Optimal-potential problems over the solution set of the initial value
//! problem.
//!
//! For a candidate support T ⊇ supp ρ₀ the stationarity equalities determine
//! ρ_T = L_T⁻¹(s·1 − φ_T), an affine map of the on-support potential values.
//! The solution set restricted to T is therefore a polytope in φ_T:
//! φ_T ≥ 0, ρ_T(φ) ≥ ρ₀, and (Lρ)ᵢ ≤ s on I₀ ∖ T. Off-support potential
//! values are fixed to 2s throughout (this loses no generality for the
//! objectives below and collapses families that vary only off the support).
//!
//! Per support:
//!   A  minimize the action −(s−φ_T)ᵀL_T⁻¹(s−φ_T): concave, attained at
//!      polytope vertices;
//!   B  minimize the peak of the canonicalized potential: a linear program
//!      after epigraph reformulation;
//!   C  maximize the volume 1ᵀρ(φ): a linear program;
//!   D  restrict to the maximal-volume face and maximize the action, i.e.
//!      minimize the convex quadratic ρᵀLρ over the face.
//!
//! Results are merged across supports by objective value with deterministic
//! ordering.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ivp;
use crate::linalg;
use crate::model::{
    InitialData, Measure, Potential, ProblemInstance, SolutionRecord, ACTION_TIE_TOLERANCE,
    EL_TOLERANCE_EXACT, EXACT_SOLVER_MAX_N,
};
use crate::polytope::Polytope;
use crate::solver;

/// Family-dimension tolerance for affine ranks of optimal faces.
const FACE_RANK_TOL: f64 = 1e-7;

/// The four notions of an optimal external potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemTag {
    /// Minimize the action.
    A,
    /// Minimize the maximum of the (canonicalized) potential.
    B,
    /// Maximize the volume.
    C,
    /// Maximize the action among maximal-volume solutions.
    D,
}

impl std::str::FromStr for ProblemTag {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Self::A),
            "B" | "b" => Ok(Self::B),
            "C" | "c" => Ok(Self::C),
            "D" | "d" => Ok(Self::D),
            other => Err(format!("unknown problem tag {other:?}, expected A|B|C|D")),
        }
    }
}

impl std::fmt::Display for ProblemTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
            Self::D => "D",
        };
        f.write_str(c)
    }
}

/// The feasible potentials on a fixed support, with the affine map to the
/// solution measure.
pub struct SolutionPolytope {
    /// Candidate support T (sorted), a superset of supp ρ₀.
    pub support: Vec<usize>,
    /// Feasible region in φ_T coordinates.
    pub region: Polytope,
    l_inv: DMatrix<f64>,
    instance_n: usize,
    s: f64,
    initial_set_outside: Vec<usize>,
    l_out_rows: DMatrix<f64>,
}

impl SolutionPolytope {
    /// Solution weights on the support for given on-support potential values.
    pub fn rho_of(&self, phi_t: &DVector<f64>) -> DVector<f64> {
        &self.l_inv * (DVector::from_element(self.support.len(), self.s) - phi_t)
    }

    /// Full-length measure for given on-support potential values.
    pub fn measure_of(&self, phi_t: &DVector<f64>) -> Measure {
        let rho_t = self.rho_of(phi_t);
        let mut w = DVector::zeros(self.instance_n);
        for (k, &i) in self.support.iter().enumerate() {
            w[i] = rho_t[k].max(0.0);
        }
        Measure::new(w).expect("clamped weights are nonnegative")
    }

    /// Canonicalized full-length potential: φ_T on the support, s − Lρ on
    /// I₀ ∖ T, and 2s elsewhere.
    pub fn potential_of(&self, phi_t: &DVector<f64>) -> Potential {
        let rho_t = self.rho_of(phi_t);
        let mut values = DVector::from_element(self.instance_n, 2.0 * self.s);
        for (k, &i) in self.support.iter().enumerate() {
            values[i] = phi_t[k].max(0.0);
        }
        if !self.initial_set_outside.is_empty() {
            let l_rho = &self.l_out_rows * &rho_t;
            for (k, &i) in self.initial_set_outside.iter().enumerate() {
                values[i] = (self.s - l_rho[k]).max(0.0);
            }
        }
        Potential::new(values).expect("clamped values are nonnegative")
    }
}

/// Builds the feasible potential polytope on `support`.
///
/// Errors with [`Error::SingularSupportMatrix`] when L restricted to the
/// support is not invertible; callers fall back to sampling for such
/// supports. The off-support minimum condition is vacuous under the
/// canonicalized value 2s and contributes no rows.
pub fn feasible_region(
    support: &[usize],
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<SolutionPolytope> {
    let n = instance.n();
    let mut support: Vec<usize> = support.to_vec();
    support.sort_unstable();
    support.dedup();
    if let Some(&bad) = support.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    for &i in &initial.rho0().support() {
        if !support.contains(&i) {
            return Err(Error::DoesNotEncloseInitialData(i));
        }
    }
    let d = support.len();
    let s = instance.s();
    let l_t = instance.lagrangian().submatrix(&support);
    let l_inv = l_t
        .clone()
        .try_inverse()
        .ok_or(Error::SingularSupportMatrix)?;
    // reject numerically singular inversions as well
    if (&l_t * &l_inv - DMatrix::<f64>::identity(d, d)).amax() > 1e-6 {
        return Err(Error::SingularSupportMatrix);
    }

    let mut rows: Vec<(DVector<f64>, f64)> = Vec::new();
    for k in 0..d {
        let mut e = DVector::zeros(d);
        e[k] = 1.0;
        rows.push((e, 0.0)); // φ_k ≥ 0
    }
    let rho_const = &l_inv * DVector::from_element(d, s);
    for k in 0..d {
        // ρ_k(φ) = rho_const_k − (L⁻¹φ)_k ≥ ρ0_k
        let coeffs = -l_inv.row(k).transpose();
        let rhs = initial.rho0().weights()[support[k]] - rho_const[k];
        rows.push((coeffs, rhs));
    }
    let initial_set_outside: Vec<usize> = initial
        .set()
        .iter()
        .copied()
        .filter(|i| !support.contains(i))
        .collect();
    let l_out_rows = linalg::slice(instance.lagrangian().entries(), &initial_set_outside, &support);
    for k in 0..initial_set_outside.len() {
        // (Lρ(φ))ᵢ ≤ s so the equality potential s − Lρ stays nonnegative
        let row = l_out_rows.row(k).transpose();
        let base = row.dot(&rho_const); // (Lρ)ᵢ at φ = 0
        let coeffs = (row.transpose() * &l_inv).transpose(); // gradient wrt φ (Lρ decreases)
        rows.push((coeffs, base - s));
    }
    Ok(SolutionPolytope {
        support,
        region: Polytope::new(rows, d),
        l_inv,
        instance_n: n,
        s,
        initial_set_outside,
        l_out_rows,
    })
}

/// Result of one optimal-potential problem.
#[derive(Debug)]
pub struct OptimizationResult {
    pub problem: ProblemTag,
    /// Optimal action (A, D), peak potential (B) or volume (C).
    pub optimum: f64,
    /// All optimal solutions found, deduplicated and sorted.
    pub solutions: Vec<SolutionRecord>,
    /// Affine dimension of the optimal face.
    pub family_dim: usize,
    /// Orthonormal directions of the optimal face in stacked (ρ, φ)
    /// coordinates; empty when the face is a point.
    pub family_basis: Vec<DVector<f64>>,
    /// Whether the optimal measure (not the potential) is a single point.
    pub unique: bool,
    pub notes: Vec<String>,
}

/// Solves one of the problems A-D for admissible initial data.
pub fn optimize(
    problem: ProblemTag,
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<OptimizationResult> {
    optimize_directed(problem, initial, instance, false)
}

/// One candidate optimum contributed by a support (or by the zero measure).
struct Candidate {
    value: f64,
    measure: Measure,
    potential: Potential,
    certified: bool,
    note: Option<String>,
}

pub(crate) fn optimize_directed(
    problem: ProblemTag,
    initial: &InitialData,
    instance: &ProblemInstance,
    reversed: bool,
) -> Result<OptimizationResult> {
    let n = instance.n();
    if n > EXACT_SOLVER_MAX_N {
        return Err(Error::TooManyPoints {
            n,
            max: EXACT_SOLVER_MAX_N,
        });
    }
    let report = ivp::check_admissible(initial, instance)?;
    if !report.admissible {
        return Err(Error::NotAdmissible);
    }
    if problem == ProblemTag::D {
        return optimize_volume_then_action(initial, instance, reversed);
    }

    let mut notes = Vec::new();
    let mut candidates = collect_candidates(problem, initial, instance, &mut notes)?;
    if candidates.is_empty() {
        return Err(Error::NotAdmissible);
    }
    // A and B minimize, C maximizes; `reversed` flips the direction
    let maximize = matches!(problem, ProblemTag::C) != reversed;
    finish(problem, &mut candidates, maximize, notes, instance)
}

/// Gathers per-support optimal-face vertices (plus the zero measure when
/// eligible) with their objective values.
fn collect_candidates(
    problem: ProblemTag,
    initial: &InitialData,
    instance: &ProblemInstance,
    notes: &mut Vec<String>,
) -> Result<Vec<Candidate>> {
    let n = instance.n();
    let s = instance.s();
    let psd_tol = instance.lagrangian().psd_tolerance();
    let rho0_mask: u32 = initial
        .rho0()
        .support()
        .iter()
        .fold(0, |m, &i| m | (1 << i));
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut saw_singular = false;

    for mask in 1u32..(1 << n) {
        if mask & rho0_mask != rho0_mask {
            continue;
        }
        let support: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        // supports on which L is not PSD cannot carry minimizers
        let mut with_initial = support.clone();
        with_initial.extend_from_slice(initial.set());
        with_initial.sort_unstable();
        with_initial.dedup();
        if instance.lagrangian().min_eig_on(&with_initial) < -psd_tol {
            continue;
        }
        let poly = match feasible_region(&support, initial, instance) {
            Ok(p) => p,
            Err(Error::SingularSupportMatrix) => {
                saw_singular = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        let verts = poly.region.vertices();
        if verts.is_empty() {
            continue;
        }
        match problem {
            ProblemTag::A => {
                for v in &verts {
                    let m = poly.measure_of(v);
                    let action = -m.weights().dot(&instance.lagrangian().apply(m.weights()));
                    candidates.push(Candidate {
                        value: action,
                        measure: m,
                        potential: poly.potential_of(v),
                        certified: true,
                        note: None,
                    });
                }
            }
            ProblemTag::C => {
                for v in &verts {
                    let m = poly.measure_of(v);
                    candidates.push(Candidate {
                        value: m.total(),
                        measure: m,
                        potential: poly.potential_of(v),
                        certified: true,
                        note: None,
                    });
                }
            }
            ProblemTag::B => {
                let full_support = support.len() == n;
                for v in epigraph_vertices(&poly, s) {
                    let phi_t = v.rows(0, support.len()).into_owned();
                    // evaluate the peak from the projection, not the epigraph
                    // coordinate (which can sit above max φ at cap vertices)
                    let peak = phi_t.iter().fold(0.0f64, |m, &p| m.max(p));
                    let m = poly.measure_of(&phi_t);
                    // off-support values are canonicalized to 2s and count
                    // towards the peak
                    let value = if full_support { peak } else { 2.0 * s };
                    candidates.push(Candidate {
                        value,
                        measure: m,
                        potential: poly.potential_of(&phi_t),
                        certified: true,
                        note: None,
                    });
                }
            }
            ProblemTag::D => unreachable!("handled separately"),
        }
    }

    if let Some(c) = zero_candidate(problem, initial, instance) {
        candidates.push(c);
    }
    if saw_singular {
        notes.push(
            "degenerate supports skipped by the polytope construction; sampled fallback \
             solutions are uncertified"
                .to_string(),
        );
        candidates.extend(sampled_fallback(problem, initial, instance)?);
    }
    Ok(candidates)
}

/// Vertices of the epigraph polytope for problem B: variables (φ_T, z) with
/// z ≥ φ_k, z ≥ 0 and a harmless upper cap 2s + 1 to keep the region
/// bounded.
fn epigraph_vertices(poly: &SolutionPolytope, s: f64) -> Vec<DVector<f64>> {
    let d = poly.support.len();
    let mut rows: Vec<(DVector<f64>, f64)> = Vec::new();
    for r in 0..poly.region.rows() {
        let mut coeffs = DVector::zeros(d + 1);
        for c in 0..d {
            coeffs[c] = poly.region.row_coeff(r, c);
        }
        rows.push((coeffs, poly.region.row_rhs(r)));
    }
    for k in 0..d {
        let mut coeffs = DVector::zeros(d + 1);
        coeffs[k] = -1.0;
        coeffs[d] = 1.0;
        rows.push((coeffs, 0.0));
    }
    let mut z_low = DVector::zeros(d + 1);
    z_low[d] = 1.0;
    rows.push((z_low, 0.0));
    let mut z_high = DVector::zeros(d + 1);
    z_high[d] = -1.0;
    rows.push((z_high, -(2.0 * s + 1.0)));
    Polytope::new(rows, d + 1).vertices()
}

/// The zero measure as a candidate, eligible when ρ₀ = 0 and the remaining
/// initial-set conditions hold. Its potential is s on I₀ and 2s elsewhere.
fn zero_candidate(
    problem: ProblemTag,
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Option<Candidate> {
    if !initial.rho0().is_zero() {
        return None;
    }
    let n = instance.n();
    let s = instance.s();
    if instance.lagrangian().min_eig_on(initial.set()) < -instance.lagrangian().psd_tolerance() {
        return None;
    }
    let values = DVector::from_fn(n, |i, _| {
        if initial.set().contains(&i) {
            s
        } else {
            2.0 * s
        }
    });
    let phi = Potential::new(values).ok()?;
    let value = match problem {
        ProblemTag::A | ProblemTag::D => 0.0,
        ProblemTag::C => 0.0,
        ProblemTag::B => {
            if initial.set().len() == n {
                s
            } else {
                2.0 * s
            }
        }
    };
    Some(Candidate {
        value,
        measure: Measure::zeros(n),
        potential: phi,
        certified: true,
        note: None,
    })
}

/// Fallback for degenerate supports: sample a few potentials, take the IVP
/// solutions they admit, and score them under the objective. Heuristic by
/// construction, hence flagged uncertified.
fn sampled_fallback(
    problem: ProblemTag,
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<Vec<Candidate>> {
    let n = instance.n();
    let s = instance.s();
    let mut sampled: Vec<Potential> = vec![Potential::zeros(n)];
    if let Ok(canon) = ivp::canonical_initial_potential(initial, instance) {
        sampled.push(canon);
    }
    if let Ok(half) = Potential::constant(s / 2.0, n) {
        sampled.push(half);
    }
    let mut out = Vec::new();
    for phi in sampled {
        for record in ivp::solve_ivp(initial, &phi, instance)? {
            let canonical = solver::canonicalize_potential(&record.rho, &phi, instance)?;
            let value = match problem {
                ProblemTag::A | ProblemTag::D => record.action,
                ProblemTag::C => record.rho.total(),
                ProblemTag::B => peak_potential(&record.rho, &canonical),
            };
            out.push(Candidate {
                value,
                measure: record.rho,
                potential: canonical,
                certified: false,
                note: Some("sampled from a degenerate support family".to_string()),
            });
        }
    }
    Ok(out)
}

fn peak_potential(rho: &Measure, canonical_phi: &Potential) -> f64 {
    let _ = rho;
    canonical_phi.values().iter().fold(0.0f64, |m, &v| m.max(v))
}

/// Sorts candidates, keeps the optimal tie class, and assembles the result.
fn finish(
    problem: ProblemTag,
    candidates: &mut Vec<Candidate>,
    maximize: bool,
    mut notes: Vec<String>,
    instance: &ProblemInstance,
) -> Result<OptimizationResult> {
    let best = candidates
        .iter()
        .map(|c| c.value)
        .fold(if maximize { f64::NEG_INFINITY } else { f64::INFINITY }, |a, v| {
            if maximize {
                a.max(v)
            } else {
                a.min(v)
            }
        });
    candidates.retain(|c| (c.value - best).abs() <= tie_tol(problem));
    let mut solutions: Vec<SolutionRecord> = Vec::new();
    let mut keys: Vec<(DVector<f64>, DVector<f64>)> = Vec::new();
    candidates.sort_by(|a, b| {
        lex_cmp(a.measure.weights(), b.measure.weights())
            .then_with(|| lex_cmp(a.potential.values(), b.potential.values()))
    });
    for c in candidates.iter() {
        let dup = keys.iter().any(|(m, p)| {
            (m - c.measure.weights()).amax() <= 1e-9 && (p - c.potential.values()).amax() <= 1e-9
        });
        if dup {
            continue;
        }
        keys.push((c.measure.weights().clone(), c.potential.values().clone()));
        let mut record = solver::make_record(
            c.measure.clone(),
            &c.potential,
            instance,
            0,
            EL_TOLERANCE_EXACT,
        );
        record.certified_global = record.certified_global && c.certified;
        if let Some(note) = &c.note {
            if !notes.contains(note) {
                notes.push(note.clone());
            }
        }
        solutions.push(record);
    }

    let (family_dim, family_basis) = optimal_face(problem, &solutions, instance);
    let mut distinct_measures = 0usize;
    let mut seen: Vec<&DVector<f64>> = Vec::new();
    for r in &solutions {
        if !seen.iter().any(|m| (*m - r.rho.weights()).amax() <= 1e-9) {
            seen.push(r.rho.weights());
            distinct_measures += 1;
        }
    }
    if problem == ProblemTag::B {
        notes.push(
            "off-support potential values are canonicalized to 2s; potential families \
             varying only off the support are reported collapsed"
                .to_string(),
        );
    }
    Ok(OptimizationResult {
        problem,
        optimum: best,
        solutions,
        family_dim,
        family_basis,
        unique: distinct_measures == 1,
        notes,
    })
}

fn tie_tol(problem: ProblemTag) -> f64 {
    match problem {
        ProblemTag::A | ProblemTag::D => ACTION_TIE_TOLERANCE,
        ProblemTag::B | ProblemTag::C => 1e-9,
    }
}

/// Affine dimension and direction basis of the optimal solution set, in
/// stacked (ρ, φ) coordinates. Linear objectives (B, C) have faces as
/// optimal sets, so the span of the tied vertices is the answer; for the
/// concave problem (A) tied vertices may be isolated, so the hull midpoint
/// must re-achieve the optimum for a positive dimension to be reported.
fn optimal_face(
    problem: ProblemTag,
    solutions: &[SolutionRecord],
    instance: &ProblemInstance,
) -> (usize, Vec<DVector<f64>>) {
    if solutions.len() <= 1 {
        return (0, Vec::new());
    }
    let joint: Vec<DVector<f64>> = solutions
        .iter()
        .map(|r| {
            let mut v = DVector::zeros(2 * instance.n());
            v.rows_mut(0, instance.n()).copy_from(r.rho.weights());
            v.rows_mut(instance.n(), instance.n())
                .copy_from(r.phi.values());
            v
        })
        .collect();
    let basis = linalg::affine_basis(&joint, FACE_RANK_TOL);
    if basis.is_empty() {
        return (0, basis);
    }
    match problem {
        ProblemTag::B | ProblemTag::C => (basis.len(), basis),
        ProblemTag::A | ProblemTag::D => {
            // tied optima of a (possibly strictly) concave objective form a
            // face only if midpoints stay optimal
            let k = solutions.len() as f64;
            let mut mid_rho = DVector::zeros(instance.n());
            for r in solutions {
                mid_rho += r.rho.weights() / k;
            }
            let mid_action = -mid_rho.dot(&instance.lagrangian().apply(&mid_rho));
            let opt = solutions[0].action;
            if (mid_action - opt).abs() <= ACTION_TIE_TOLERANCE {
                (basis.len(), basis)
            } else {
                (0, Vec::new())
            }
        }
    }
}

/// Problem D: maximal volume first, then maximal action on that face.
fn optimize_volume_then_action(
    initial: &InitialData,
    instance: &ProblemInstance,
    reversed: bool,
) -> Result<OptimizationResult> {
    let volume = optimize_directed(ProblemTag::C, initial, instance, false)?;
    let v_max = volume.optimum;
    let n = instance.n();
    let psd_tol = instance.lagrangian().psd_tolerance();
    let rho0_mask: u32 = initial
        .rho0()
        .support()
        .iter()
        .fold(0, |m, &i| m | (1 << i));
    let mut notes = volume.notes.clone();
    let mut candidates: Vec<Candidate> = Vec::new();

    for mask in 1u32..(1 << n) {
        if mask & rho0_mask != rho0_mask {
            continue;
        }
        let support: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let mut with_initial = support.clone();
        with_initial.extend_from_slice(initial.set());
        with_initial.sort_unstable();
        with_initial.dedup();
        if instance.lagrangian().min_eig_on(&with_initial) < -psd_tol {
            continue;
        }
        let poly = match feasible_region(&support, initial, instance) {
            Ok(p) => p,
            Err(Error::SingularSupportMatrix) => continue,
            Err(e) => return Err(e),
        };
        let verts = poly.region.vertices();
        if verts.is_empty() {
            continue;
        }
        let tied: Vec<&DVector<f64>> = verts
            .iter()
            .filter(|v| (poly.measure_of(v).total() - v_max).abs() <= 1e-9)
            .collect();
        if tied.is_empty() {
            continue;
        }
        // minimize ρᵀLρ over the maximal-volume face = conv(tied vertices);
        // maximizing instead probes the reversed direction
        let measures: Vec<Measure> = tied.iter().map(|v| poly.measure_of(v)).collect();
        let k = measures.len();
        let mut h = DMatrix::zeros(k, k);
        for a in 0..k {
            let la = instance.lagrangian().apply(measures[a].weights());
            for b in 0..k {
                h[(a, b)] = measures[b].weights().dot(&la);
            }
        }
        let (quad, lambda) = crate::polytope::quadratic_over_simplex(&h, reversed);
        let mut phi_t = DVector::zeros(support.len());
        for (i, v) in tied.iter().enumerate() {
            phi_t += (*v) * lambda[i];
        }
        let m = poly.measure_of(&phi_t);
        candidates.push(Candidate {
            value: -quad,
            measure: m,
            potential: poly.potential_of(&phi_t),
            certified: true,
            note: None,
        });
    }
    if candidates.is_empty() {
        // fall back to the zero measure when it is the unique max-volume
        // solution
        if let Some(c) = zero_candidate(ProblemTag::D, initial, instance) {
            if (0.0 - v_max).abs() <= 1e-9 {
                candidates.push(c);
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::NotAdmissible);
    }
    // D maximizes the action; reversed minimizes it
    finish(ProblemTag::D, &mut candidates, !reversed, {
        notes.push(format!("maximal volume {v_max:.16e}"));
        notes
    }, instance)
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

/// Every (measure, canonicalized potential) pair arising at a vertex of some
/// support polytope: the finite sweep standing in for "all solutions of the
/// initial value problem" in definiteness checks.
pub(crate) fn vertex_solutions(
    initial: &InitialData,
    instance: &ProblemInstance,
) -> Result<Vec<(Measure, Potential)>> {
    let n = instance.n();
    if n > EXACT_SOLVER_MAX_N {
        return Err(Error::TooManyPoints {
            n,
            max: EXACT_SOLVER_MAX_N,
        });
    }
    let rho0_mask: u32 = initial
        .rho0()
        .support()
        .iter()
        .fold(0, |m, &i| m | (1 << i));
    let mut out = Vec::new();
    if initial.rho0().is_zero() {
        if let Some(c) = zero_candidate(ProblemTag::C, initial, instance) {
            out.push((c.measure, c.potential));
        }
    }
    for mask in 1u32..(1 << n) {
        if mask & rho0_mask != rho0_mask {
            continue;
        }
        let support: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let poly = match feasible_region(&support, initial, instance) {
            Ok(p) => p,
            Err(Error::SingularSupportMatrix) => continue,
            Err(e) => return Err(e),
        };
        for v in poly.region.vertices() {
            out.push((poly.measure_of(&v), poly.potential_of(&v)));
        }
    }
    Ok(out)
}
