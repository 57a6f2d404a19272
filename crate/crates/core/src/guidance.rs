//! Saturated heading control of a Dubins-car-like vehicle following the
//! coordinating field.
//!
//! The vehicle state is `(p₁, p₂, p₃, θ)` with `ṗ₁ = v cos θ`,
//! `ṗ₂ = v sin θ`, `ṗ₃ = u_z`, `θ̇ = u_θ`. The vertical and virtual rates are
//! copied from the field rescaled so that its planar part has length `v`;
//! the turn rate tracks the planar orientation of the field.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::coordination::Mailbox;
use crate::error::{Error, Result};
use crate::field::{jacobian_from_jet, FieldConfig};
use crate::geometry::DesiredSet;
use crate::topology::CommGraph;

/// Rotation by `+π/2`.
pub const E: [[f64; 2]; 2] = [[0.0, -1.0], [1.0, 0.0]];

fn rot90(u: [f64; 2]) -> [f64; 2] {
    [-u[1], u[0]]
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuidanceConfig {
    /// Constant airspeed.
    pub v: f64,
    pub k_theta: f64,
    pub sat_a: f64,
    pub sat_b: f64,
    /// Smallest admissible `χ₁² + χ₂²`.
    pub gamma_floor: f64,
}

impl GuidanceConfig {
    pub fn new(v: f64, k_theta: f64, sat_a: f64, sat_b: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("airspeed {v} must be > 0")));
        }
        if !(k_theta > 0.0 && k_theta.is_finite()) {
            return Err(Error::InvalidGain(format!("k_theta = {k_theta} must be > 0")));
        }
        if !(sat_a < 0.0 && sat_b > 0.0) {
            return Err(Error::Config(format!(
                "saturation bounds [{sat_a}, {sat_b}] must satisfy a < 0 < b"
            )));
        }
        Ok(Self {
            v,
            k_theta,
            sat_a,
            sat_b,
            gamma_floor: 1e-6,
        })
    }
}

/// Wraps an angle to `(−π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Planar part of the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Planar {
    /// First two entries of `χ/‖χ‖`.
    pub chi_p: [f64; 2],
    /// `χ_p/‖χ_p‖ = (χ₁, χ₂)/√(χ₁² + χ₂²)`.
    pub unit: [f64; 2],
    /// `√(χ₁² + χ₂²)`.
    pub planar_norm: f64,
}

/// Fails when `χ₁² + χ₂² ≤ gamma_floor`.
pub fn planar_component(chi: &[f64], gamma_floor: f64, robot: usize) -> Result<Planar> {
    let planar_sq = chi[0] * chi[0] + chi[1] * chi[1];
    if !(planar_sq > gamma_floor) {
        return Err(Error::SingularHeading {
            robot,
            planar_sq,
            floor: gamma_floor,
        });
    }
    let full = chi.iter().map(|c| c * c).sum::<f64>().sqrt();
    let planar_norm = planar_sq.sqrt();
    Ok(Planar {
        chi_p: [chi[0] / full, chi[1] / full],
        unit: [chi[0] / planar_norm, chi[1] / planar_norm],
        planar_norm,
    })
}

/// Clamps `x` to `[a, b]`.
pub fn saturate(x: f64, a: f64, b: f64) -> f64 {
    x.clamp(a, b)
}

/// Rotation rate of the planar field orientation,
/// `θ̇_d = −χ̂_pᵀ E χ̇_p / ‖χ_p‖`.
pub fn theta_dot_desired(chi_p: [f64; 2], chi_p_dot: [f64; 2]) -> Result<f64> {
    let norm = chi_p[0].hypot(chi_p[1]);
    if norm == 0.0 {
        return Err(Error::SingularHeading {
            robot: 0,
            planar_sq: 0.0,
            floor: 0.0,
        });
    }
    let unit = [chi_p[0] / norm, chi_p[1] / norm];
    let e_dot = [
        E[0][0] * chi_p_dot[0] + E[0][1] * chi_p_dot[1],
        E[1][0] * chi_p_dot[0] + E[1][1] * chi_p_dot[1],
    ];
    Ok(-dot2(unit, e_dot) / norm)
}

/// Signed angle from `chi_p_unit` to `h_unit`, in `(−π, π]`.
pub fn signed_angle(h_unit: [f64; 2], chi_p_unit: [f64; 2]) -> f64 {
    let s = dot2(h_unit, rot90(chi_p_unit));
    let c = dot2(h_unit, chi_p_unit);
    let sigma = s.atan2(c);
    if sigma == -PI {
        PI
    } else {
        sigma
    }
}

/// `min(−a − d, b − d)`: heading gains below this bound never saturate when
/// `|θ̇_d| ≤ d`.
pub fn corollary1_gain_bound(d: f64, a: f64, b: f64) -> Result<f64> {
    let limit = (-a).min(b);
    if !(d >= 0.0 && d < limit) {
        return Err(Error::NoValidGain { d, limit });
    }
    Ok((-a - d).min(b - d))
}

/// `d/dt (χ/‖χ‖) = (I − χ̂χ̂ᵀ) χ̇ / ‖χ‖`.
pub fn normalized_rate(chi: &[f64], chi_dot: &[f64]) -> Vec<f64> {
    let norm = chi.iter().map(|c| c * c).sum::<f64>().sqrt();
    let proj: f64 = chi.iter().zip(chi_dot).map(|(a, b)| a * b).sum::<f64>() / (norm * norm);
    chi.iter()
        .zip(chi_dot)
        .map(|(c, d)| (d - proj * c) / norm)
        .collect()
}

/// `χ̇_p`: the first two entries of [`normalized_rate`].
pub fn planar_rate(chi: &[f64], chi_dot: &[f64]) -> [f64; 2] {
    let r = normalized_rate(chi, chi_dot);
    [r[0], r[1]]
}

/// `ċ_m = −Σ_{j∈N_i} (ẇ^{[i]}_m − ẇ^{[j]}_m)` from the rates held in the
/// mailbox.
pub fn consensus_rate(i: usize, own_w_dot: &[f64], mailbox: &Mailbox) -> Result<Vec<f64>> {
    let mut c = vec![0.0; own_w_dot.len()];
    for (j, msg) in mailbox.iter() {
        let wd = msg
            .and_then(|m| m.w_dot.as_ref())
            .ok_or(Error::MissingNeighbor { robot: i, neighbor: j })?;
        for (m, cm) in c.iter_mut().enumerate() {
            *cm -= own_w_dot[m] - wd[m];
        }
    }
    Ok(c)
}

/// Time derivative of robot `i`'s coordinating field given its own state
/// rate and the rate of its consensus values:
/// `χ̇ = J(χ_uncoordinated) ξ̇ + k_c ⊙ ċ`.
pub fn field_rate(
    set: &DesiredSet,
    cfg: &FieldConfig,
    xi: &[f64],
    xi_dot: &[f64],
    c_dot: &[f64],
) -> Result<Vec<f64>> {
    set.check_state(xi)?;
    cfg.check(set)?;
    let jet = set.jet(&xi[set.ambient_dim()..]);
    let jac = jacobian_from_jet(&jet, cfg, xi);
    let mut rate: Vec<f64> = (&jac * DVector::from_column_slice(xi_dot)).iter().copied().collect();
    let n = set.ambient_dim();
    for (m, (kc, cd)) in cfg.gains.k_c.iter().zip(c_dot).enumerate() {
        rate[n + m] += kc * cd;
    }
    Ok(rate)
}

/// Jacobian of robot `i`'s coordination components with respect to
/// `ζ = (x^{[i]}, w_{·1}, …, w_{·k})`, of shape `(n+k) × (n + kN)`. Row
/// `n+m` holds `−b_iᵀL` in the block of parameter `m`; all other rows are
/// zero.
pub fn coordination_jacobian(graph: &CommGraph, i: usize, n: usize, k: usize) -> Result<DMatrix<f64>> {
    graph.neighbors(i)?;
    let big_n = graph.vertex_count();
    let lap = graph.laplacian();
    let mut jac = DMatrix::zeros(n + k, n + k * big_n);
    for m in 0..k {
        for j in 0..big_n {
            jac[(n + m, n + m * big_n + j)] = -lap[(i - 1, j)];
        }
    }
    Ok(jac)
}

/// Full Jacobian of robot `i`'s coordinating field with respect to `ζ`.
pub fn coordinating_field_jacobian(
    set: &DesiredSet,
    cfg: &FieldConfig,
    graph: &CommGraph,
    i: usize,
    xi: &[f64],
) -> Result<DMatrix<f64>> {
    set.check_state(xi)?;
    cfg.check(set)?;
    let (n, k) = (set.ambient_dim(), set.param_count());
    let big_n = graph.vertex_count();
    let jet = set.jet(&xi[n..]);
    let local = jacobian_from_jet(&jet, cfg, xi);
    let mut jac = coordination_jacobian(graph, i, n, k)?;
    for m in 0..k {
        jac.row_mut(n + m).scale_mut(cfg.gains.k_c[m]);
    }
    for r in 0..n + k {
        for c in 0..n {
            jac[(r, c)] = local[(r, c)];
        }
        for l in 0..k {
            jac[(r, n + l * big_n + (i - 1))] += local[(r, n + l)];
        }
    }
    Ok(jac)
}

/// `χ̇_p = F (I − χ̂χ̂ᵀ) J ζ̇ / ‖χ‖` with the dense Jacobian over `ζ`.
pub fn jacobian_chain(
    set: &DesiredSet,
    cfg: &FieldConfig,
    graph: &CommGraph,
    i: usize,
    xi: &[f64],
    chi: &[f64],
    zeta_dot: &[f64],
) -> Result<[f64; 2]> {
    let jac = coordinating_field_jacobian(set, cfg, graph, i, xi)?;
    if zeta_dot.len() != jac.ncols() {
        return Err(Error::DimensionMismatch {
            expected: jac.ncols(),
            got: zeta_dot.len(),
            context: "generalized velocity ζ̇",
        });
    }
    let chi_dot: Vec<f64> = (&jac * DVector::from_column_slice(zeta_dot)).iter().copied().collect();
    Ok(planar_rate(chi, &chi_dot))
}

/// Control inputs of one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct DubinsInputs {
    pub u_theta: f64,
    pub u_z: f64,
    pub w_dot: Vec<f64>,
    pub theta_dot_d: f64,
    pub sigma: f64,
    /// Turn-rate command before saturation.
    pub raw_u_theta: f64,
}

impl DubinsInputs {
    pub fn saturated(&self) -> bool {
        self.raw_u_theta != self.u_theta
    }
}

/// Rates that do not depend on the heading: `u_z` and the virtual rates,
/// `v χ_q / √(χ₁² + χ₂²)`.
pub fn scaled_rates(chi: &[f64], cfg: &GuidanceConfig, robot: usize) -> Result<(f64, Vec<f64>)> {
    let p = planar_component(chi, cfg.gamma_floor, robot)?;
    let s = cfg.v / p.planar_norm;
    Ok((s * chi[2], chi[3..].iter().map(|c| s * c).collect()))
}

/// `u_θ = Sat_a^b(θ̇_d − k_θ ĥᵀEχ̂_p)` together with the rescaled vertical
/// and virtual rates.
pub fn dubins_step_inputs(
    chi: &[f64],
    chi_p_dot: [f64; 2],
    heading: f64,
    cfg: &GuidanceConfig,
    robot: usize,
) -> Result<DubinsInputs> {
    let p = planar_component(chi, cfg.gamma_floor, robot)?;
    let (u_z, w_dot) = scaled_rates(chi, cfg, robot)?;
    let theta_dot_d = theta_dot_desired(p.chi_p, chi_p_dot)?;
    let h = [heading.cos(), heading.sin()];
    let sigma = signed_angle(h, p.unit);
    let raw = theta_dot_d - cfg.k_theta * dot2(h, rot90(p.unit));
    Ok(DubinsInputs {
        u_theta: saturate(raw, cfg.sat_a, cfg.sat_b),
        u_z,
        w_dot,
        theta_dot_d,
        sigma,
        raw_u_theta: raw,
    })
}

/// `½‖ĥ − χ̂_p‖²`.
pub fn heading_lyapunov(heading: f64, unit: [f64; 2]) -> f64 {
    let dx = heading.cos() - unit[0];
    let dy = heading.sin() - unit[1];
    0.5 * (dx * dx + dy * dy)
}
