//! Shared test utilities: the brute-force grid oracle and seeded random
//! instance generators. The oracle evaluates the action on a regular grid
//! and never touches the solver path it cross-checks.

use cvp_core::{
    apriori_volume_bound, LagrangianMatrix, Measure, PointSpace, Potential, ProblemInstance,
};
use nalgebra::DVector;
use rand::Rng;

/// Brute-force minimum of the action over the grid
/// {0, h, 2h, ...}ⁿ ∩ [0, bound]ⁿ. The innermost coordinate is minimized
/// analytically over its grid values (the slice is a quadratic in one
/// variable), which keeps n = 4 tractable.
pub fn grid_minimum(instance: &ProblemInstance, phi: &Potential, h: f64) -> f64 {
    let n = instance.n();
    let bound = apriori_volume_bound(instance);
    let m = (bound / h).floor() as usize + 1;
    let l = instance.lagrangian().entries();
    let s = instance.s();
    let last = n - 1;
    let a = l[(last, last)];

    let mut idx = vec![0usize; n - 1];
    let mut x = DVector::zeros(n);
    let mut best = f64::INFINITY;
    loop {
        for (k, &i) in idx.iter().enumerate() {
            x[k] = i as f64 * h;
        }
        // action over the slice: q + b t + a t², t the last coordinate
        let mut q = 0.0;
        let mut b = 2.0 * (phi.values()[last] - s);
        for r in 0..last {
            b += 2.0 * l[(r, last)] * x[r];
            q += 2.0 * (phi.values()[r] - s) * x[r];
            for c in 0..last {
                q += l[(r, c)] * x[r] * x[c];
            }
        }
        let mut candidates = vec![0usize, m - 1];
        let t_star = -b / (2.0 * a);
        if t_star > 0.0 && t_star < bound {
            let k = (t_star / h).floor() as usize;
            candidates.push(k.min(m - 1));
            candidates.push((k + 1).min(m - 1));
        }
        for k in candidates {
            let t = k as f64 * h;
            let v = q + b * t + a * t * t;
            if v < best {
                best = v;
            }
        }
        // odometer over the outer coordinates
        let mut carry = true;
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < m {
                carry = false;
                break;
            }
            *slot = 0;
        }
        if n == 1 || carry {
            break;
        }
    }
    best
}

/// Lipschitz slack for comparing the exact minimum against the grid minimum:
/// the exact minimizer lies within h/2 per coordinate of a grid point inside
/// the oracle box.
pub fn grid_slack(instance: &ProblemInstance, phi: &Potential, h: f64) -> f64 {
    let n = instance.n() as f64;
    let bound = apriori_volume_bound(instance);
    let l = instance.lagrangian();
    let row_max = (0..instance.n())
        .map(|i| l.entries().row(i).iter().sum::<f64>())
        .fold(0.0f64, f64::max);
    let phi_max = phi.values().iter().fold(0.0f64, |m, &v| m.max(v));
    let grad_bound = 2.0 * (row_max * bound * n + phi_max + instance.s());
    grad_bound * n * h / 2.0 + l.spectral_norm() * n * h * h / 4.0
}

/// Random instance with Lagrangian entries from a nonnegative grid
/// (diagonal in {2, 2.5, 3}, off-diagonal in {0, 0.5, 1, 1.5}) and an
/// 0.25-grid potential in [0, 2]ⁿ.
pub fn random_grid_instance<R: Rng>(rng: &mut R, n: usize) -> (ProblemInstance, Potential) {
    let diag_choices = [2.0, 2.5, 3.0];
    let off_choices = [0.0, 0.5, 1.0, 1.5];
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        rows[i][i] = diag_choices[rng.gen_range(0..diag_choices.len())];
        for j in i + 1..n {
            let v = off_choices[rng.gen_range(0..off_choices.len())];
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    let l = LagrangianMatrix::from_rows(&rows).unwrap();
    let space = PointSpace::with_size(n).unwrap();
    let instance = ProblemInstance::new(space, l, 1.0).unwrap();
    let phi = Potential::new(DVector::from_fn(n, |_, _| {
        0.25 * rng.gen_range(0..=8) as f64
    }))
    .unwrap();
    (instance, phi)
}

/// Random instance with continuous entries, biased towards positive
/// definiteness by a diagonal boost.
pub fn random_smooth_instance<R: Rng>(rng: &mut R, n: usize) -> (ProblemInstance, Potential) {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = rng.gen_range(0.0..0.6);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    for (i, row) in rows.iter_mut().enumerate() {
        let off_sum: f64 = row.iter().sum();
        row[i] = off_sum + rng.gen_range(0.5..2.0);
    }
    let l = LagrangianMatrix::from_rows(&rows).unwrap();
    let space = PointSpace::with_size(n).unwrap();
    let instance = ProblemInstance::new(space, l, 1.0).unwrap();
    let phi = Potential::new(DVector::from_fn(n, |_, _| rng.gen_range(0.0..1.5))).unwrap();
    (instance, phi)
}

/// Random nonnegative measure with entries in [0, scale).
pub fn random_measure<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Measure {
    Measure::new(DVector::from_fn(n, |_, _| rng.gen_range(0.0..scale))).unwrap()
}
