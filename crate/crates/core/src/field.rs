//! Guiding vector fields on the generalized state `ξ = (x, w)`.
//!
//! The uncoordinated field splits into a propagation term, tangent to the
//! lifted desired set, and a convergence term `−Σ k_j φ_j ∇φ_j`. Both are
//! evaluated through the closed forms; [`wedge`] gives the general
//! construction the closed forms expand.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{DesiredSet, GainSet, Jet};

/// Gains plus, for surfaces, the last two entries `(v_{n+1}, v_{n+2})` of the
/// extra vector `v`. The first `n` entries of `v` are always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub gains: GainSet,
    tail: Option<[f64; 2]>,
    desired_speeds: Option<[f64; 2]>,
}

impl FieldConfig {
    pub fn path(gains: GainSet) -> Self {
        Self {
            gains,
            tail: None,
            desired_speeds: None,
        }
    }

    /// Surface field whose on-surface parametric speeds are `speeds`: the
    /// tail is `((−1)^{n+1} ẇ₂*, (−1)^n ẇ₁*)`.
    pub fn surface_with_speeds(gains: GainSet, n: usize, speeds: [f64; 2]) -> Result<Self> {
        let sign = parity(n);
        let tail = [-sign * speeds[1], sign * speeds[0]];
        let mut cfg = Self::surface_with_tail(gains, tail)?;
        cfg.desired_speeds = Some(speeds);
        Ok(cfg)
    }

    pub fn surface_with_tail(gains: GainSet, tail: [f64; 2]) -> Result<Self> {
        if tail[0] == 0.0 && tail[1] == 0.0 {
            return Err(Error::DegeneratePropagation);
        }
        if !tail.iter().all(|v| v.is_finite()) {
            return Err(Error::Config("extra vector tail must be finite".into()));
        }
        Ok(Self {
            gains,
            tail: Some(tail),
            desired_speeds: None,
        })
    }

    pub fn extra_vector_tail(&self) -> Option<[f64; 2]> {
        self.tail
    }

    pub fn desired_speeds(&self) -> Option<[f64; 2]> {
        self.desired_speeds
    }

    /// Virtual entries of the propagation term: `(−1)^n` for paths and
    /// `((−1)^n v_{n+2}, (−1)^{n+1} v_{n+1})` for surfaces.
    pub fn propagation_rates(&self, n: usize) -> Vec<f64> {
        let s = parity(n);
        match self.tail {
            None => vec![s],
            Some([v1, v2]) => vec![s * v2, -s * v1],
        }
    }

    pub fn param_count(&self) -> usize {
        if self.tail.is_some() {
            2
        } else {
            1
        }
    }

    pub(crate) fn check(&self, set: &DesiredSet) -> Result<()> {
        let (n, k) = (set.ambient_dim(), set.param_count());
        if self.param_count() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: self.param_count(),
                context: "field parameter count",
            });
        }
        if self.gains.k_phi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.gains.k_phi.len(),
                context: "k_phi gains",
            });
        }
        if self.gains.k_c.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: self.gains.k_c.len(),
                context: "coordination gains",
            });
        }
        Ok(())
    }
}

fn parity(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// A field value with its parts kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldValue {
    pub vector: Vec<f64>,
    pub propagation: Vec<f64>,
    pub convergence: Vec<f64>,
    /// Coordination contribution (zero on physical slots).
    pub coordination: Vec<f64>,
}

/// Generalized cross product of `m` vectors in `ℝ^{m+1}`: the unique vector
/// `u` with `⟨u, y⟩ = det[y; v₁; …; v_m]` for every `y`.
pub fn wedge(vectors: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = vectors.len();
    if m == 0 {
        return Err(Error::InvalidSize("wedge needs at least one vector".into()));
    }
    for v in vectors {
        if v.len() != m + 1 {
            return Err(Error::DimensionMismatch {
                expected: m + 1,
                got: v.len(),
                context: "wedge operand",
            });
        }
    }
    let mut out = vec![0.0; m + 1];
    for (q, slot) in out.iter_mut().enumerate() {
        let minor = DMatrix::from_fn(m, m, |r, c| {
            let col = if c < q { c } else { c + 1 };
            vectors[r][col]
        });
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        *slot = sign * minor.determinant();
    }
    Ok(out)
}

/// Uncoordinated field evaluated from a precomputed jet.
pub(crate) fn field_from_jet(jet: &Jet, cfg: &FieldConfig, xi: &[f64]) -> FieldValue {
    let n = jet.value.len();
    let k = jet.param_count();
    let rates = cfg.propagation_rates(n);
    let mut propagation = vec![0.0; n + k];
    let mut convergence = vec![0.0; n + k];
    for j in 0..n {
        let kphi = cfg.gains.k_phi[j] * (xi[j] - jet.value[j]);
        let mut p = 0.0;
        for m in 0..k {
            p += rates[m] * jet.d1[m][j];
            convergence[n + m] += kphi * jet.d1[m][j];
        }
        propagation[j] = p;
        convergence[j] = -kphi;
    }
    propagation[n..].copy_from_slice(&rates);
    let vector = propagation
        .iter()
        .zip(&convergence)
        .map(|(a, b)| a + b)
        .collect();
    FieldValue {
        vector,
        propagation,
        convergence,
        coordination: vec![0.0; n + k],
    }
}

/// Adds `k_c ⊙ c` to the virtual slots.
pub(crate) fn add_coordination(value: &mut FieldValue, k_c: &[f64], c: &[f64]) {
    let n = value.vector.len() - c.len();
    for (m, (kc, cm)) in k_c.iter().zip(c).enumerate() {
        value.coordination[n + m] = kc * cm;
        value.vector[n + m] += kc * cm;
    }
}

/// Path-following field (`k = 1`): entries `(−1)^n f′_j − k_jφ_j` and
/// `(−1)^n + Σ k_lφ_l f′_l`.
pub fn path_field(set: &DesiredSet, cfg: &FieldConfig, xi: &[f64]) -> Result<FieldValue> {
    if set.param_count() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: set.param_count(),
            context: "path field parameter count",
        });
    }
    guiding_field(set, cfg, xi)
}

/// Surface-navigation field (`k = 2`).
pub fn surface_field(set: &DesiredSet, cfg: &FieldConfig, xi: &[f64]) -> Result<FieldValue> {
    if set.param_count() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: set.param_count(),
            context: "surface field parameter count",
        });
    }
    guiding_field(set, cfg, xi)
}

/// Path or surface field depending on the set's parameter count.
pub fn guiding_field(set: &DesiredSet, cfg: &FieldConfig, xi: &[f64]) -> Result<FieldValue> {
    set.check_state(xi)?;
    cfg.check(set)?;
    let jet = set.jet(&xi[set.ambient_dim()..]);
    Ok(field_from_jet(&jet, cfg, xi))
}

/// `(0, …, 0, c₁[, c₂])` in `ℝ^{n+k}`.
pub fn coordination_term(n: usize, c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n + c.len()];
    out[n..].copy_from_slice(c);
    out
}

/// Coordinating field `χ = χ_pf + k_c (0, …, 0, c)` (per parameter for
/// surfaces).
pub fn combined_field(
    set: &DesiredSet,
    cfg: &FieldConfig,
    xi: &[f64],
    c: &[f64],
) -> Result<FieldValue> {
    if c.len() != set.param_count() {
        return Err(Error::DimensionMismatch {
            expected: set.param_count(),
            got: c.len(),
            context: "coordination values",
        });
    }
    let mut value = guiding_field(set, cfg, xi)?;
    add_coordination(&mut value, &cfg.gains.k_c, c);
    Ok(value)
}

/// Lower bound on the norm of the uncoordinated field: the norm of the
/// virtual part of the propagation term.
pub fn field_norm_floor(cfg: &FieldConfig) -> f64 {
    match cfg.tail {
        None => 1.0,
        Some([a, b]) => a.hypot(b),
    }
}

/// Jacobian of the uncoordinated field with respect to the robot's own
/// `ξ = (x, w)`.
pub(crate) fn jacobian_from_jet(jet: &Jet, cfg: &FieldConfig, xi: &[f64]) -> DMatrix<f64> {
    let n = jet.value.len();
    let k = jet.param_count();
    let rates = cfg.propagation_rates(n);
    let kp = &cfg.gains.k_phi;
    let mut jac = DMatrix::zeros(n + k, n + k);
    for j in 0..n {
        let phi = xi[j] - jet.value[j];
        jac[(j, j)] = -kp[j];
        for m in 0..k {
            jac[(n + m, j)] = kp[j] * jet.d1[m][j];
        }
        for l in 0..k {
            let mut d = kp[j] * jet.d1[l][j];
            for m in 0..k {
                d += rates[m] * jet.d2(l, m)[j];
                jac[(n + m, n + l)] +=
                    kp[j] * (phi * jet.d2(l, m)[j] - jet.d1[l][j] * jet.d1[m][j]);
            }
            jac[(j, n + l)] = d;
        }
    }
    jac
}

/// Jacobian of [`guiding_field`] with respect to the robot's own state.
pub fn field_jacobian(set: &DesiredSet, cfg: &FieldConfig, xi: &[f64]) -> Result<DMatrix<f64>> {
    set.check_state(xi)?;
    cfg.check(set)?;
    let jet = set.jet(&xi[set.ambient_dim()..]);
    Ok(jacobian_from_jet(&jet, cfg, xi))
}
