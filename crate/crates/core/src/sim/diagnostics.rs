//! Error vectors and the Lyapunov function of the team.
//!
//! With per-robot gain matrices `K_i`, the composite error stacks every `Φ_i`
//! and, per parameter, the edge errors `Dᵀw̃`. The Lyapunov function is
//! `V = ½ (Σ_i Φ_iᵀK_iΦ_i + Σ_m k_cm ‖Dᵀw̃_m‖²)` and, along single-integrator
//! trajectories with continuous communication,
//! `V̇ = −‖KΦ‖² − Σ_m ‖F_mᵀKΦ − k_cm L w̃_m‖²`.

use crate::coordination::coordination_error;
use crate::sim::Scenario;

/// Errors and Lyapunov quantities at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSet {
    /// `Φ_i` per robot.
    pub phi: Vec<Vec<f64>>,
    /// Per parameter, per edge `w_head − w_tail − Δ`.
    pub coord_err: Vec<Vec<f64>>,
    /// `‖e‖`.
    pub composite_norm: f64,
    pub v: f64,
    /// Closed-form `V̇`.
    pub v_dot: f64,
    /// `‖KΦ‖²`, the bound `V̇ ≤ −‖KΦ‖²`.
    pub k_phi_sq: f64,
}

/// Evaluates the diagnostics at per-robot generalized states.
pub fn lyapunov(scenario: &Scenario, states: &[Vec<f64>]) -> DiagnosticSet {
    let n = scenario.ambient_dim();
    let k = scenario.param_count();
    let big_n = states.len();
    let mut phi = Vec::with_capacity(big_n);
    let mut weighted = Vec::with_capacity(big_n);
    let mut projected = Vec::with_capacity(big_n);
    let mut v = 0.0;
    let mut k_phi_sq = 0.0;
    let mut err_sq = 0.0;
    for (robot, xi) in scenario.robots.iter().zip(states) {
        let jet = robot.set.jet(&xi[n..]);
        let kp = &robot.field.gains.k_phi;
        let p: Vec<f64> = (0..n).map(|j| xi[j] - jet.value[j]).collect();
        let kphi: Vec<f64> = (0..n).map(|j| kp[j] * p[j]).collect();
        v += 0.5 * p.iter().zip(&kphi).map(|(a, b)| a * b).sum::<f64>();
        k_phi_sq += kphi.iter().map(|x| x * x).sum::<f64>();
        err_sq += p.iter().map(|x| x * x).sum::<f64>();
        projected.push(
            (0..k)
                .map(|m| (0..n).map(|j| jet.d1[m][j] * kphi[j]).sum::<f64>())
                .collect::<Vec<f64>>(),
        );
        weighted.push(kphi);
        phi.push(p);
    }
    let edges = scenario.graph.edges();
    let mut coord_err = Vec::with_capacity(k);
    let mut v_dot = -k_phi_sq;
    for m in 0..k {
        let w: Vec<f64> = states.iter().map(|xi| xi[n + m]).collect();
        let e = coordination_error(&scenario.graph, &w, &scenario.coordination.deltas[m]);
        let kc0 = scenario.robots[0].field.gains.k_c[m];
        v += 0.5 * kc0 * e.iter().map(|x| x * x).sum::<f64>();
        err_sq += e.iter().map(|x| x * x).sum::<f64>();
        // L w̃ = D (Dᵀ w̃).
        let mut lw = vec![0.0; big_n];
        for (&(h, t), ek) in edges.iter().zip(&e) {
            lw[h - 1] += ek;
            lw[t - 1] -= ek;
        }
        for i in 0..big_n {
            let kc = scenario.robots[i].field.gains.k_c[m];
            let r = projected[i][m] - kc * lw[i];
            v_dot -= r * r;
        }
        coord_err.push(e);
    }
    DiagnosticSet {
        phi,
        coord_err,
        composite_norm: err_sq.sqrt(),
        v,
        v_dot,
        k_phi_sq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::presets;

    #[test]
    fn zero_at_the_target() {
        let sc = presets::scaled_sim1(4, 1).build().unwrap();
        let n = sc.ambient_dim();
        let spacing = std::f64::consts::PI / 4.0;
        let states: Vec<Vec<f64>> = (0..4)
            .map(|i| sc.robots[i].set.lift(&[1.0 + i as f64 * spacing]))
            .collect();
        let d = lyapunov(&sc, &states);
        assert!(d.v.abs() < 1e-24 && d.v_dot.abs() < 1e-20, "{d:?}");
        assert!(d.composite_norm < 1e-12);
        assert_eq!(d.phi.len(), 4);
        assert_eq!(d.phi[0].len(), n);
    }
}
