//! Collision avoidance by minimal modification of the nominal field.
//!
//! With `h_ij = ‖P(ξ_i − ξ_j)‖² − R²`, where `P` keeps only the physical
//! coordinates, each robot projects its field onto the half-spaces
//! `(ξ_j − ξ_i)ᵀ Pᵀ χ̃_i ≤ (α/4) h_ij³` for nearby robots `j`. Constraints
//! only involve physical slots, so virtual components pass through unchanged.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SafetyConfig {
    /// Safety distance `R`.
    pub radius: f64,
    /// Barrier gain `α`.
    pub alpha: f64,
    /// Constraints engage for robots within `activation_scale · R`.
    pub activation_scale: f64,
    pub qp_tolerance: f64,
    pub qp_max_iters: usize,
}

impl SafetyConfig {
    pub fn new(radius: f64, alpha: f64, activation_scale: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("safety radius {radius} must be > 0")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("safety alpha {alpha} must be > 0")));
        }
        if !(activation_scale >= 1.0 && activation_scale.is_finite()) {
            return Err(Error::Config(format!(
                "activation scale {activation_scale} must be >= 1"
            )));
        }
        Ok(Self {
            radius,
            alpha,
            activation_scale,
            qp_tolerance: 1e-9,
            qp_max_iters: 10_000,
        })
    }
}

/// `‖P(ξ_i − ξ_j)‖² − R²`, with `P` the projection on the first `n` slots.
pub fn h_pair(xi_i: &[f64], xi_j: &[f64], n: usize, radius: f64) -> f64 {
    physical_dist_sq(xi_i, xi_j, n) - radius * radius
}

fn physical_dist_sq(a: &[f64], b: &[f64], n: usize) -> f64 {
    a[..n].iter().zip(&b[..n]).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Half-space `aᵀx ≤ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub a: Vec<f64>,
    pub b: f64,
}

impl HalfSpace {
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.b - dot(&self.a, x)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean projection of a point onto an intersection of half-spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub x: Vec<f64>,
    pub multipliers: Vec<f64>,
    pub feasible: bool,
}

/// Largest active-set size solved by exhaustive enumeration.
pub const ENUMERATION_LIMIT: usize = 6;

/// Projects `point` onto `{x : aᵀx ≤ b for every row}`. Up to
/// [`ENUMERATION_LIMIT`] rows are solved exactly by enumerating active sets;
/// larger systems use cyclic dual coordinate ascent.
pub fn project(point: &[f64], rows: &[HalfSpace], tol: f64, max_iters: usize) -> Projection {
    let zero = vec![0.0; rows.len()];
    if rows.iter().all(|r| r.slack(point) >= 0.0) {
        return Projection {
            x: point.to_vec(),
            multipliers: zero,
            feasible: true,
        };
    }
    if rows.len() <= ENUMERATION_LIMIT {
        if let Some(p) = enumerate_active_sets(point, rows, tol) {
            return p;
        }
    }
    dual_ascent(point, rows, tol, max_iters)
}

/// Exact projection by trying every subset of rows as the active set and
/// keeping the KKT point with the smallest objective.
pub fn enumerate_active_sets(point: &[f64], rows: &[HalfSpace], tol: f64) -> Option<Projection> {
    let m = rows.len();
    let mut best: Option<(f64, Projection)> = None;
    for mask in 0u32..(1u32 << m) {
        let active: Vec<usize> = (0..m).filter(|k| mask & (1 << k) != 0).collect();
        let q = active.len();
        let mut lambda = vec![0.0; m];
        if q > 0 {
            let gram = DMatrix::from_fn(q, q, |r, c| dot(&rows[active[r]].a, &rows[active[c]].a));
            let rhs = DVector::from_fn(q, |r, _| -rows[active[r]].slack(point));
            let Some(sol) = gram.lu().solve(&rhs) else {
                continue;
            };
            if sol.iter().any(|l| !l.is_finite() || *l < -tol) {
                continue;
            }
            for (r, &k) in active.iter().enumerate() {
                lambda[k] = sol[r].max(0.0);
            }
        }
        let x = apply_multipliers(point, rows, &lambda);
        if rows.iter().any(|r| r.slack(&x) < -tol * (1.0 + r.b.abs())) {
            continue;
        }
        let obj = x.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        if best.as_ref().is_none_or(|(o, _)| obj < *o) {
            best = Some((
                obj,
                Projection {
                    x,
                    multipliers: lambda,
                    feasible: true,
                },
            ));
        }
    }
    best.map(|(_, p)| p)
}

fn apply_multipliers(point: &[f64], rows: &[HalfSpace], lambda: &[f64]) -> Vec<f64> {
    let mut x = point.to_vec();
    for (r, l) in rows.iter().zip(lambda) {
        if *l != 0.0 {
            for (xi, ai) in x.iter_mut().zip(&r.a) {
                *xi -= l * ai;
            }
        }
    }
    x
}

/// Cyclic coordinate ascent on the dual (Hildreth's method). Converges to the
/// projection when the polytope is non-empty.
fn dual_ascent(point: &[f64], rows: &[HalfSpace], tol: f64, max_iters: usize) -> Projection {
    let mut lambda = vec![0.0; rows.len()];
    let mut x = point.to_vec();
    let norms: Vec<f64> = rows.iter().map(|r| dot(&r.a, &r.a)).collect();
    for _ in 0..max_iters {
        let mut change: f64 = 0.0;
        for (k, r) in rows.iter().enumerate() {
            if norms[k] == 0.0 {
                continue;
            }
            let next = (lambda[k] - r.slack(&x) / norms[k]).max(0.0);
            let delta = next - lambda[k];
            if delta != 0.0 {
                for (xi, ai) in x.iter_mut().zip(&r.a) {
                    *xi -= delta * ai;
                }
                lambda[k] = next;
                change = change.max(delta.abs() * norms[k].sqrt());
            }
        }
        if change <= tol {
            break;
        }
    }
    let feasible = rows.iter().all(|r| r.slack(&x) >= -tol.sqrt() * (1.0 + r.b.abs()));
    Projection {
        x,
        multipliers: lambda,
        feasible,
    }
}

/// Largest violation among stationarity, primal feasibility, dual
/// feasibility and complementary slackness.
pub fn kkt_residual(point: &[f64], rows: &[HalfSpace], p: &Projection) -> f64 {
    let recon = apply_multipliers(point, rows, &p.multipliers);
    let mut worst = recon
        .iter()
        .zip(&p.x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    for (r, l) in rows.iter().zip(&p.multipliers) {
        let s = r.slack(&p.x);
        worst = worst.max((-s).max(0.0)).max((-l).max(0.0)).max((l * s).abs());
    }
    worst
}

/// Result of one robot's projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Qp2Outcome {
    pub chi: Vec<f64>,
    /// Constraints in the activation set.
    pub active: usize,
    /// Constraints with a positive multiplier.
    pub binding: usize,
    /// `‖χ̃ − χ‖`.
    pub modification: f64,
    pub infeasible: bool,
}

/// Constraint rows of robot `i` against every other robot within the
/// activation radius, on the physical slots only.
pub fn qp2_rows(xi_i: &[f64], others: &[&[f64]], n: usize, cfg: &SafetyConfig) -> Vec<HalfSpace> {
    let reach = (cfg.activation_scale * cfg.radius).powi(2);
    others
        .iter()
        .filter(|xj| physical_dist_sq(xi_i, xj, n) <= reach)
        .map(|xj| {
            let h = h_pair(xi_i, xj, n, cfg.radius);
            HalfSpace {
                a: (0..n).map(|d| xj[d] - xi_i[d]).collect(),
                b: 0.25 * cfg.alpha * h * h * h,
            }
        })
        .collect()
}

/// Distributed projection of robot `i`'s nominal field `chi` given the
/// states of the other robots. Robots outside the activation radius are
/// ignored. When the constraints are inconsistent the physical velocity is
/// set to zero.
pub fn qp2_solve(xi_i: &[f64], chi: &[f64], others: &[&[f64]], n: usize, cfg: &SafetyConfig) -> Qp2Outcome {
    let rows = qp2_rows(xi_i, others, n, cfg);
    let p = project(&chi[..n], &rows, cfg.qp_tolerance, cfg.qp_max_iters);
    let mut out = chi.to_vec();
    let infeasible = !p.feasible;
    if infeasible {
        out[..n].iter_mut().for_each(|v| *v = 0.0);
    } else {
        out[..n].copy_from_slice(&p.x);
    }
    let modification = out[..n]
        .iter()
        .zip(&chi[..n])
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Qp2Outcome {
        chi: out,
        active: rows.len(),
        binding: p.multipliers.iter().filter(|l| **l > 0.0).count(),
        modification,
        infeasible,
    }
}

/// Centralized projection of all fields jointly under the pairwise
/// constraints `(ξ_j − ξ_i)ᵀPᵀχ̃_i + (ξ_i − ξ_j)ᵀPᵀχ̃_j ≤ (α/2) h_ij³`.
pub fn qp1_solve(states: &[Vec<f64>], chis: &[Vec<f64>], n: usize, cfg: &SafetyConfig) -> Result<Vec<Vec<f64>>> {
    if states.len() != chis.len() {
        return Err(Error::DimensionMismatch {
            expected: states.len(),
            got: chis.len(),
            context: "nominal fields",
        });
    }
    let rows = qp1_rows(states, n, cfg);
    let point: Vec<f64> = chis.iter().flat_map(|c| c[..n].iter().copied()).collect();
    let p = project(&point, &rows, cfg.qp_tolerance, cfg.qp_max_iters);
    if !p.feasible {
        return Err(Error::Config("centralized safety program is infeasible".into()));
    }
    Ok(chis
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut out = c.clone();
            out[..n].copy_from_slice(&p.x[i * n..(i + 1) * n]);
            out
        })
        .collect())
}

/// Pairwise rows of the centralized program over the stacked physical
/// components.
pub fn qp1_rows(states: &[Vec<f64>], n: usize, cfg: &SafetyConfig) -> Vec<HalfSpace> {
    let reach = (cfg.activation_scale * cfg.radius).powi(2);
    let big_n = states.len();
    let mut rows = Vec::new();
    for i in 0..big_n {
        for j in i + 1..big_n {
            if physical_dist_sq(&states[i], &states[j], n) > reach {
                continue;
            }
            let h = h_pair(&states[i], &states[j], n, cfg.radius);
            let mut a = vec![0.0; big_n * n];
            for d in 0..n {
                let diff = states[j][d] - states[i][d];
                a[i * n + d] = diff;
                a[j * n + d] = -diff;
            }
            rows.push(HalfSpace {
                a,
                b: 0.5 * cfg.alpha * h * h * h,
            });
        }
    }
    rows
}

/// Pairwise safety values.
#[derive(Debug, Clone, PartialEq)]
pub struct SafetyReport {
    /// `(i, j, h_ij)` for `i < j`, 1-indexed.
    pub pairs: Vec<(usize, usize, f64)>,
    pub violations: Vec<(usize, usize, f64)>,
}

impl SafetyReport {
    pub fn h_min(&self) -> Option<f64> {
        self.pairs.iter().map(|p| p.2).reduce(f64::min)
    }
}

/// All pairwise `h_ij`; pairs with `h_ij < −tol` are reported as violations.
pub fn safety_monitor(states: &[Vec<f64>], n: usize, radius: f64, tol: f64) -> SafetyReport {
    let mut pairs = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            pairs.push((i + 1, j + 1, h_pair(&states[i], &states[j], n, radius)));
        }
    }
    let violations = pairs.iter().copied().filter(|p| p.2 < -tol).collect();
    SafetyReport { pairs, violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SafetyConfig {
        SafetyConfig::new(1.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_pair(&[0.0, 0.0, 1.0], &[0.0, 0.0, -3.0], 2, 1.0), -1.0);
        assert_eq!(h_pair(&[0.0, 0.0, 0.0], &[2.0, 0.0, 0.0], 2, 1.0), 3.0);
        assert_eq!(h_pair(&[0.0, 0.0, 0.0], &[0.0, 1.5, 9.0], 2, 1.5), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(SafetyConfig::new(0.0, 1.0, 1.0).is_err());
        assert!(SafetyConfig::new(1.0, -1.0, 1.0).is_err());
        assert!(SafetyConfig::new(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn far_robots_leave_field_unchanged() {
        let chi = vec![1.0, 0.0, 0.7];
        let other = [10.0, 0.0, 0.0];
        let out = qp2_solve(&[0.0, 0.0, 0.0], &chi, &[&other], 2, &cfg());
        assert_eq!(out.chi, chi);
        assert_eq!(out.active, 0);
    }

    #[test]
    fn single_halfspace_projection() {
        let xi_i = [0.0, 0.0, 0.3];
        let xi_j = [1.5, 0.0, -2.0];
        let chi = vec![2.0, 1.0, 0.7];
        let c = cfg();
        let out = qp2_solve(&xi_i, &chi, &[&xi_j], 2, &c);
        let a = [1.5, 0.0];
        let h: f64 = 1.5 * 1.5 - 1.0;
        let b = 0.25 * h.powi(3);
        let viol = a[0] * chi[0] + a[1] * chi[1] - b;
        assert!(viol > 0.0);
        let na = a[0] * a[0] + a[1] * a[1];
        let expected = [chi[0] - viol / na * a[0], chi[1] - viol / na * a[1]];
        assert!((out.chi[0] - expected[0]).abs() < 1e-12);
        assert!((out.chi[1] - expected[1]).abs() < 1e-12);
        assert_eq!(out.chi[2], chi[2]);
        assert_eq!(out.binding, 1);
    }

    #[test]
    fn dual_ascent_agrees_with_enumeration() {
        let rows = vec![
            HalfSpace { a: vec![1.0, 0.2], b: 0.1 },
            HalfSpace { a: vec![0.3, 1.0], b: -0.2 },
            HalfSpace { a: vec![-1.0, 0.5], b: 0.4 },
        ];
        let point = [2.0, 1.5];
        let exact = enumerate_active_sets(&point, &rows, 1e-12).unwrap();
        let iter = dual_ascent(&point, &rows, 1e-13, 100_000);
        assert!(iter.feasible);
        for d in 0..2 {
            assert!((exact.x[d] - iter.x[d]).abs() < 1e-8);
        }
        assert!(kkt_residual(&point, &rows, &exact) < 1e-10);
    }

    #[test]
    fn inconsistent_rows_zero_the_physical_velocity() {
        // Overlapping robots on both sides: a·x ≤ b and −a·x ≤ b with b < 0.
        let xi_i = [0.0, 0.0, 1.0];
        let left = [-0.5, 0.0, 0.0];
        let right = [0.5, 0.0, 0.0];
        let out = qp2_solve(&xi_i, &[1.0, 1.0, 0.4], &[&left, &right], 2, &cfg());
        assert!(out.infeasible);
        assert_eq!(out.chi, vec![0.0, 0.0, 0.4]);
    }

    #[test]
    fn monitor_examples() {
        let r = safety_monitor(&[vec![0.0, 0.0, 0.0], vec![3.0, 0.0, 0.0]], 2, 1.0, 1e-9);
        assert!(r.violations.is_empty());
        let r = safety_monitor(&[vec![0.0, 0.0, 0.0], vec![0.5, 0.0, 0.0]], 2, 1.0, 1e-9);
        assert_eq!(r.violations, vec![(1, 2, 0.25 - 1.0)]);
        let r = safety_monitor(&[vec![0.0, 0.0, 0.0]], 2, 1.0, 1e-9);
        assert!(r.pairs.is_empty() && r.h_min().is_none());
    }
}
