//! Fixed-step closed-loop integration.

use std::cell::RefCell;

use nalgebra::DVector;

use crate::coordination::{consensus, Mailboxes, Network};
use crate::error::{Error, Result};
use crate::field::{add_coordination, field_from_jet, jacobian_from_jet};
use crate::guidance::{
    consensus_rate, dubins_step_inputs, heading_lyapunov, normalize_angle, planar_component, planar_rate,
    scaled_rates, DubinsInputs, GuidanceConfig,
};
use crate::safety::{h_pair, qp2_solve, safety_monitor, Qp2Outcome};
use crate::sim::diagnostics::lyapunov;
use crate::sim::integrator;
use crate::sim::telemetry::Frame;
use crate::sim::{Model, Scenario};

/// Physical speed below which a constrained robot counts as stalled.
const DEADLOCK_SPEED: f64 = 1e-6;
/// Nominal speed above which a stall is reported.
const DEADLOCK_NOMINAL: f64 = 1e-3;
/// Tolerance of the pairwise safety monitor.
const SAFETY_TOL: f64 = 1e-9;
/// Heading perturbation when the initial heading is antipodal to the field.
const ANTIPODAL_NUDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// Communication is held between exchanges or lossy.
    BeyondTheory,
    /// The initial heading was antipodal to the field and was perturbed.
    HeadingPerturbed,
    SafetyViolation,
    QpInfeasible,
    Deadlock,
    /// The sign of σ during a saturation period breaks the convergence
    /// condition.
    SaturationSign,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::BeyondTheory => "beyond_theory",
            EventKind::HeadingPerturbed => "heading_perturbed",
            EventKind::SafetyViolation => "safety_violation",
            EventKind::QpInfeasible => "qp_infeasible",
            EventKind::Deadlock => "deadlock",
            EventKind::SaturationSign => "saturation_sign",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    /// Robots involved, 1-based.
    pub robots: Vec<usize>,
    pub detail: String,
}

/// Per-step monitors accumulated over a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunStats {
    pub steps: usize,
    /// Largest one-step increase of `V`.
    pub max_lyapunov_increase: f64,
    /// Smallest pairwise safety value over all steps.
    pub h_min: Option<f64>,
    /// Largest `|θ̇_d|` seen by any vehicle.
    pub max_theta_dot_d: f64,
    /// Steps on which some vehicle's turn rate was clipped.
    pub saturated_steps: usize,
    /// Largest one-step increase of `½‖ĥ − χ̂_p‖²` over steps without
    /// saturation.
    pub max_heading_lyapunov_increase: f64,
    /// `σ` per vehicle at the end of the run.
    pub final_sigma: Vec<f64>,
    pub qp_infeasible: usize,
    /// Largest number of constraints in one robot's program.
    pub max_active: usize,
    /// Largest violation of the centralized pairwise constraints by the
    /// distributed solutions.
    pub max_qp1_violation: f64,
}

/// Result of [`integrate`]. On a runtime failure `abort` holds the error
/// and `frames` ends with the last good state.
#[derive(Debug)]
pub struct Run {
    pub frames: Vec<Frame>,
    pub stats: RunStats,
    pub events: Vec<Event>,
    pub abort: Option<Error>,
}

/// Per-vehicle quantities of one Dubins evaluation.
#[derive(Debug, Clone)]
struct VehicleEval {
    inputs: DubinsInputs,
    chi_p: [f64; 2],
    chi_p_dot: [f64; 2],
    unit: [f64; 2],
}

/// One evaluation of the closed loop.
#[derive(Debug, Clone)]
struct Eval {
    dy: Vec<f64>,
    /// Applied coordinating field per robot (after the safety filter).
    chis: Vec<Vec<f64>>,
    qp: Vec<Option<Qp2Outcome>>,
    vehicles: Vec<VehicleEval>,
}

struct Engine<'a> {
    sc: &'a Scenario,
    n: usize,
    k: usize,
    fresh: bool,
    /// Mailboxes refilled with exact values on every fresh evaluation.
    scratch: RefCell<Mailboxes>,
}

impl<'a> Engine<'a> {
    fn eval(&self, t: f64, y: &[f64], held: &Mailboxes) -> Result<Eval> {
        if self.fresh {
            let xis = self.sc.states(y);
            let ws: Vec<&[f64]> = xis.iter().map(|x| &x[self.n..]).collect();
            let mut boxes = self.scratch.borrow_mut();
            boxes.refresh(t, &ws, None);
            match &self.sc.model {
                Model::SingleIntegrator => self.eval_single(y, &boxes),
                Model::Dubins(g) => {
                    let w_dot = self.virtual_rates(y, &boxes, g)?;
                    boxes.refresh(t, &ws, Some(&w_dot));
                    self.eval_dubins(y, &boxes, g)
                }
            }
        } else {
            match &self.sc.model {
                Model::SingleIntegrator => self.eval_single(y, held),
                Model::Dubins(g) => self.eval_dubins(y, held, g),
            }
        }
    }

    /// Coordinating fields from the given mailboxes, before any filter.
    fn fields(&self, xis: &[&[f64]], boxes: &Mailboxes) -> Result<Vec<(Vec<f64>, crate::geometry::Jet)>> {
        let n = self.n;
        xis.iter()
            .enumerate()
            .map(|(i0, xi)| {
                let robot = &self.sc.robots[i0];
                let jet = robot.set.jet(&xi[n..]);
                let mut value = field_from_jet(&jet, &robot.field, xi);
                let c = consensus(&self.sc.graph, i0 + 1, &xi[n..], &boxes.boxes[i0], &self.sc.coordination)?;
                add_coordination(&mut value, &robot.field.gains.k_c, &c);
                Ok((value.vector, jet))
            })
            .collect()
    }

    fn eval_single(&self, y: &[f64], boxes: &Mailboxes) -> Result<Eval> {
        let xis = self.sc.states(y);
        let nominal = self.fields(&xis, boxes)?;
        let mut chis = Vec::with_capacity(xis.len());
        let mut qp = Vec::with_capacity(xis.len());
        for (i0, (chi, _)) in nominal.into_iter().enumerate() {
            match &self.sc.safety {
                Some(cfg) => {
                    let others: Vec<&[f64]> = xis
                        .iter()
                        .enumerate()
                        .filter(|(j0, _)| *j0 != i0)
                        .map(|(_, x)| *x)
                        .collect();
                    let out = qp2_solve(xis[i0], &chi, &others, self.n, cfg);
                    chis.push(out.chi.clone());
                    qp.push(Some(out));
                }
                None => {
                    chis.push(chi);
                    qp.push(None);
                }
            }
        }
        Ok(Eval {
            dy: chis.concat(),
            chis,
            qp,
            vehicles: Vec::new(),
        })
    }

    /// Virtual-coordinate rates `v χ_w / ‖χ_p‖` of every vehicle.
    fn virtual_rates(&self, y: &[f64], boxes: &Mailboxes, g: &GuidanceConfig) -> Result<Vec<Vec<f64>>> {
        let xis = self.sc.states(y);
        self.fields(&xis, boxes)?
            .iter()
            .enumerate()
            .map(|(i0, (chi, _))| Ok(scaled_rates(chi, g, i0 + 1)?.1))
            .collect()
    }

    fn eval_dubins(&self, y: &[f64], boxes: &Mailboxes, g: &GuidanceConfig) -> Result<Eval> {
        let (n, k) = (self.n, self.k);
        let xis = self.sc.states(y);
        let block = self.sc.block();
        let headings: Vec<f64> = y.chunks(block).map(|c| c[block - 1]).collect();
        let fields = self.fields(&xis, boxes)?;
        let mut dy = Vec::with_capacity(y.len());
        let mut chis = Vec::with_capacity(xis.len());
        let mut vehicles = Vec::with_capacity(xis.len());
        for (i0, ((chi, jet), xi)) in fields.into_iter().zip(&xis).enumerate() {
            let robot = &self.sc.robots[i0];
            let theta = headings[i0];
            let (u_z, w_dot) = scaled_rates(&chi, g, i0 + 1)?;
            let mut xi_dot = vec![g.v * theta.cos(), g.v * theta.sin(), u_z];
            xi_dot.extend_from_slice(&w_dot);
            let c_dot = consensus_rate(i0 + 1, &w_dot, &boxes.boxes[i0])?;
            let jac = jacobian_from_jet(&jet, &robot.field, xi);
            let mut chi_dot: Vec<f64> = (&jac * DVector::from_column_slice(&xi_dot)).iter().copied().collect();
            for m in 0..k {
                chi_dot[n + m] += robot.field.gains.k_c[m] * c_dot[m];
            }
            let chi_p_dot = planar_rate(&chi, &chi_dot);
            let inputs = dubins_step_inputs(&chi, chi_p_dot, theta, g, i0 + 1)?;
            let p = planar_component(&chi, g.gamma_floor, i0 + 1)?;
            dy.extend_from_slice(&xi_dot);
            dy.push(inputs.u_theta);
            vehicles.push(VehicleEval {
                inputs,
                chi_p: p.chi_p,
                chi_p_dot,
                unit: p.unit,
            });
            chis.push(chi);
        }
        Ok(Eval {
            dy,
            chis,
            qp: Vec::new(),
            vehicles,
        })
    }

    /// Mailboxes filled with exact values at time `t`, rates included for
    /// vehicles.
    fn exact_mailboxes(&self, t: f64, y: &[f64]) -> Result<Mailboxes> {
        let (xis, _) = self.sc.unpack(y);
        let ws: Vec<Vec<f64>> = xis.iter().map(|x| x[self.n..].to_vec()).collect();
        let mut boxes = Mailboxes::snapshot(&self.sc.graph, t, &ws, None);
        if let Model::Dubins(g) = &self.sc.model {
            let w_dot = self.virtual_rates(y, &boxes, g)?;
            boxes.refresh(t, &ws, Some(&w_dot));
        }
        Ok(boxes)
    }

    fn broadcast(&self, network: &mut Network, boxes: &mut Mailboxes, t: f64, y: &[f64]) -> Result<()> {
        let (xis, _) = self.sc.unpack(y);
        let ws: Vec<Vec<f64>> = xis.iter().map(|x| x[self.n..].to_vec()).collect();
        match &self.sc.model {
            Model::SingleIntegrator => network.exchange(boxes, t, &ws, None),
            Model::Dubins(g) => {
                let exact = Mailboxes::snapshot(&self.sc.graph, t, &ws, None);
                let w_dot = self.virtual_rates(y, &exact, g)?;
                network.exchange(boxes, t, &ws, Some(&w_dot));
            }
        }
        Ok(())
    }

    fn frame(&self, t: f64, y: &[f64], ev: &Eval, flags: Vec<String>) -> Frame {
        let (states, headings) = self.sc.unpack(y);
        let d = lyapunov(self.sc, &states);
        let h_min = self
            .sc
            .report_radius()
            .and_then(|r| safety_monitor(&states, self.n, r, SAFETY_TOL).h_min());
        let inputs = if ev.vehicles.is_empty() {
            ev.chis.clone()
        } else {
            ev.vehicles
                .iter()
                .map(|v| {
                    let mut row = vec![v.inputs.u_theta, v.inputs.u_z];
                    row.extend_from_slice(&v.inputs.w_dot);
                    row.extend([
                        v.inputs.theta_dot_d,
                        v.inputs.sigma,
                        v.chi_p[0],
                        v.chi_p[1],
                        v.chi_p_dot[0],
                        v.chi_p_dot[1],
                    ]);
                    row
                })
                .collect()
        };
        Frame {
            t,
            states,
            headings: headings.map(|h| h.into_iter().map(normalize_angle).collect()),
            phi: d.phi,
            coord_err: d.coord_err,
            composite_norm: d.composite_norm,
            v: d.v,
            v_dot: self.sc.rate_identity_applies().then_some(d.v_dot),
            h_min,
            inputs,
            flags,
        }
    }
}

/// Largest violation of the pairwise centralized constraints by the applied
/// fields.
fn qp1_violation(sc: &Scenario, xis: &[Vec<f64>], chis: &[Vec<f64>], n: usize) -> f64 {
    let Some(cfg) = &sc.safety else { return 0.0 };
    let reach = (cfg.activation_scale * cfg.radius).powi(2);
    let mut worst: f64 = 0.0;
    for i in 0..xis.len() {
        for j in i + 1..xis.len() {
            let d: Vec<f64> = (0..n).map(|q| xis[j][q] - xis[i][q]).collect();
            if d.iter().map(|x| x * x).sum::<f64>() > reach {
                continue;
            }
            let h = h_pair(&xis[i], &xis[j], n, cfg.radius);
            let lhs: f64 = (0..n).map(|q| d[q] * (chis[i][q] - chis[j][q])).sum();
            worst = worst.max(lhs - 0.5 * cfg.alpha * h * h * h);
        }
    }
    worst
}

/// Records events with a per-key latch so a persisting condition is logged
/// once until it clears.
struct EventLog {
    events: Vec<Event>,
    latched: std::collections::HashSet<(EventKind, Vec<usize>)>,
    pending: Vec<String>,
}

impl EventLog {
    fn new() -> Self {
        Self {
            events: Vec::new(),
            latched: Default::default(),
            pending: Vec::new(),
        }
    }

    fn raise(&mut self, t: f64, kind: EventKind, robots: Vec<usize>, detail: String) {
        if self.latched.insert((kind, robots.clone())) {
            if !self.pending.iter().any(|p| p == kind.name()) {
                self.pending.push(kind.name().to_string());
            }
            self.events.push(Event { t, kind, robots, detail });
        }
    }

    fn clear(&mut self, kind: EventKind, robots: Vec<usize>) {
        self.latched.remove(&(kind, robots));
    }

    fn take_flags(&mut self) -> Vec<String> {
        std::mem::take(&mut self.pending)
    }
}

/// Integrates the scenario over its duration.
pub fn integrate(scenario: &Scenario) -> Result<Run> {
    scenario.validate()?;
    let sc = scenario;
    let n = sc.ambient_dim();
    let mut network = Network::new(sc.step, sc.comm.interval, sc.comm.packet_loss, sc.comm.seed)?;
    let engine = Engine {
        sc,
        n,
        k: sc.param_count(),
        fresh: network.is_fresh(),
        scratch: RefCell::new(Mailboxes::empty(&sc.graph)),
    };
    let mut log = EventLog::new();
    let mut stats = RunStats::default();
    let mut frames = Vec::new();
    let h = sc.step;
    let steps = sc.step_count();
    let mut y = sc.initial_state();
    let block = sc.block();

    if !engine.fresh {
        log.raise(
            0.0,
            EventKind::BeyondTheory,
            Vec::new(),
            format!(
                "neighbor values held for {} steps with packet loss {}",
                network.steps_per_exchange, network.packet_loss
            ),
        );
    }

    let mut boxes = engine.exact_mailboxes(0.0, &y)?;
    let mut cur = engine.eval(0.0, &y, &boxes)?;
    if let Model::Dubins(_) = &sc.model {
        let mut nudged = false;
        for (i0, v) in cur.vehicles.iter().enumerate() {
            if v.inputs.sigma == std::f64::consts::PI {
                y[i0 * block + block - 1] += ANTIPODAL_NUDGE;
                nudged = true;
                log.raise(
                    0.0,
                    EventKind::HeadingPerturbed,
                    vec![i0 + 1],
                    format!("initial heading antipodal to the field; perturbed by {ANTIPODAL_NUDGE} rad"),
                );
            }
        }
        if nudged {
            boxes = engine.exact_mailboxes(0.0, &y)?;
            cur = engine.eval(0.0, &y, &boxes)?;
        }
    }

    let (xis0, _) = sc.unpack(&y);
    let mut v_prev = lyapunov(sc, &xis0).v;
    if let Some(r) = sc.report_radius() {
        stats.h_min = safety_monitor(&xis0, n, r, SAFETY_TOL).h_min();
    }
    frames.push(engine.frame(0.0, &y, &cur, log.take_flags()));

    let mut abort = None;
    for s in 0..steps {
        let t = s as f64 * h;
        if !engine.fresh && s > 0 && network.is_exchange_step(s) {
            if let Err(e) = engine.broadcast(&mut network, &mut boxes, t, &y) {
                abort = Some(e);
                break;
            }
            match engine.eval(t, &y, &boxes) {
                Ok(ev) => cur = ev,
                Err(e) => {
                    abort = Some(e);
                    break;
                }
            }
        }
        let (xis, _) = sc.unpack(&y);
        monitor_step(sc, &engine, t, &xis, &cur, &mut stats, &mut log);

        let next = integrator::step(sc.integrator, t, &y, h, Some(cur.dy.clone()), |tt, yy| {
            engine.eval(tt, yy, &boxes).map(|e| e.dy)
        });
        let y_next = match next {
            Ok(v) => v,
            Err(e) => {
                abort = Some(e);
                break;
            }
        };
        let t_next = (s + 1) as f64 * h;
        if y_next.iter().any(|v| !v.is_finite()) {
            abort = Some(Error::NonFinite { t: t_next });
            break;
        }
        let ev_next = match engine.eval(t_next, &y_next, &boxes) {
            Ok(ev) => ev,
            Err(e) => {
                abort = Some(e);
                break;
            }
        };

        let (xis_next, _) = sc.unpack(&y_next);
        let v_next = lyapunov(sc, &xis_next).v;
        stats.max_lyapunov_increase = stats.max_lyapunov_increase.max(v_next - v_prev);
        v_prev = v_next;

        if !cur.vehicles.is_empty() {
            let (_, th0) = sc.unpack(&y);
            let (_, th1) = sc.unpack(&y_next);
            let (th0, th1) = (th0.unwrap_or_default(), th1.unwrap_or_default());
            let saturated = cur.vehicles.iter().any(|v| v.inputs.saturated());
            if !saturated {
                for (i0, (a, b)) in cur.vehicles.iter().zip(&ev_next.vehicles).enumerate() {
                    let before = heading_lyapunov(th0[i0], a.unit);
                    let after = heading_lyapunov(th1[i0], b.unit);
                    stats.max_heading_lyapunov_increase = stats.max_heading_lyapunov_increase.max(after - before);
                }
            }
        }

        if let Some(r) = sc.report_radius() {
            let report = safety_monitor(&xis_next, n, r, SAFETY_TOL);
            if let Some(hm) = report.h_min() {
                stats.h_min = Some(stats.h_min.map_or(hm, |m: f64| m.min(hm)));
            }
            if sc.safety.is_some() {
                for &(i, j, hv) in &report.violations {
                    log.raise(t_next, EventKind::SafetyViolation, vec![i, j], format!("h = {hv:.3e}"));
                }
            }
        }

        y = y_next;
        cur = ev_next;
        stats.steps = s + 1;
        if (s + 1) % sc.decimation == 0 || s + 1 == steps {
            frames.push(engine.frame(t_next, &y, &cur, log.take_flags()));
        }
    }

    if abort.is_some() {
        let t_last = stats.steps as f64 * h;
        if frames.last().is_none_or(|f| f.t != t_last) {
            frames.push(engine.frame(t_last, &y, &cur, log.take_flags()));
        }
    }
    stats.final_sigma = cur.vehicles.iter().map(|v| v.inputs.sigma).collect();
    Ok(Run {
        frames,
        stats,
        events: log.events,
        abort,
    })
}

fn monitor_step(
    sc: &Scenario,
    engine: &Engine,
    t: f64,
    xis: &[Vec<f64>],
    cur: &Eval,
    stats: &mut RunStats,
    log: &mut EventLog,
) {
    let n = engine.n;
    if sc.safety.is_some() {
        stats.max_qp1_violation = stats.max_qp1_violation.max(qp1_violation(sc, xis, &cur.chis, n));
        for (i0, qp) in cur.qp.iter().enumerate() {
            let Some(qp) = qp else { continue };
            stats.max_active = stats.max_active.max(qp.active);
            if qp.infeasible {
                stats.qp_infeasible += 1;
                log.raise(
                    t,
                    EventKind::QpInfeasible,
                    vec![i0 + 1],
                    format!("{} constraints inconsistent; physical velocity zeroed", qp.active),
                );
            } else {
                log.clear(EventKind::QpInfeasible, vec![i0 + 1]);
            }
            let speed = cur.chis[i0][..n].iter().map(|v| v * v).sum::<f64>().sqrt();
            let nominal = speed + qp.modification;
            if qp.binding > 0 && speed < DEADLOCK_SPEED && nominal > DEADLOCK_NOMINAL {
                log.raise(
                    t,
                    EventKind::Deadlock,
                    vec![i0 + 1],
                    format!("physical speed {speed:.2e} with {} binding constraints", qp.binding),
                );
            } else if speed >= DEADLOCK_SPEED {
                log.clear(EventKind::Deadlock, vec![i0 + 1]);
            }
        }
    }
    if let Model::Dubins(g) = &sc.model {
        let mut any_saturated = false;
        for (i0, v) in cur.vehicles.iter().enumerate() {
            stats.max_theta_dot_d = stats.max_theta_dot_d.max(v.inputs.theta_dot_d.abs());
            if !v.inputs.saturated() {
                continue;
            }
            any_saturated = true;
            let sigma = v.inputs.sigma;
            let upper = v.inputs.u_theta == g.sat_b;
            let ok = if upper { sigma >= 0.0 } else { sigma <= 0.0 };
            if !ok {
                log.raise(
                    t,
                    EventKind::SaturationSign,
                    vec![i0 + 1],
                    format!(
                        "{} saturation with sigma = {sigma:.4}",
                        if upper { "upper" } else { "lower" }
                    ),
                );
            } else {
                log.clear(EventKind::SaturationSign, vec![i0 + 1]);
            }
        }
        if any_saturated {
            stats.saturated_steps += 1;
        }
    }
}
