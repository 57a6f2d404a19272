//! Closed-loop simulation of a robot team, its diagnostics and the shipped
//! scenario presets.

pub mod config;
pub mod diagnostics;
mod engine;
pub mod integrator;
pub mod presets;
pub mod telemetry;

pub use engine::{integrate, Event, EventKind, Run, RunStats};
pub use integrator::Integrator;

use crate::coordination::CoordinationSpec;
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::geometry::DesiredSet;
use crate::guidance::GuidanceConfig;
use crate::safety::SafetyConfig;
use crate::topology::CommGraph;

/// One robot: its desired set, field settings and initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Robot {
    pub set: DesiredSet,
    pub field: FieldConfig,
    /// Initial generalized state `(x, w)`.
    pub initial: Vec<f64>,
    /// Initial heading for the Dubins model.
    pub heading: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// `ξ̇ = χ`.
    SingleIntegrator,
    /// Constant-speed vehicle with saturated turn rate.
    Dubins(GuidanceConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommSettings {
    /// Time between neighbor broadcasts.
    pub interval: f64,
    pub packet_loss: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub robots: Vec<Robot>,
    pub graph: CommGraph,
    pub coordination: CoordinationSpec,
    pub safety: Option<SafetyConfig>,
    /// Radius used to report `h` when the safety filter is off.
    pub monitor_radius: Option<f64>,
    pub model: Model,
    pub comm: CommSettings,
    pub duration: f64,
    pub step: f64,
    pub integrator: Integrator,
    /// Record every `decimation`-th step.
    pub decimation: usize,
}

impl Scenario {
    pub fn robot_count(&self) -> usize {
        self.robots.len()
    }

    /// Physical dimension `n`, shared by all robots.
    pub fn ambient_dim(&self) -> usize {
        self.robots[0].set.ambient_dim()
    }

    /// Parameter count `k`, shared by all robots.
    pub fn param_count(&self) -> usize {
        self.robots[0].set.param_count()
    }

    pub fn is_dubins(&self) -> bool {
        matches!(self.model, Model::Dubins(_))
    }

    /// Entries per robot in the stacked state.
    pub(crate) fn block(&self) -> usize {
        self.ambient_dim() + self.param_count() + usize::from(self.is_dubins())
    }

    /// Radius of the reported pairwise safety values, if any.
    pub fn report_radius(&self) -> Option<f64> {
        self.safety.as_ref().map(|s| s.radius).or(self.monitor_radius)
    }

    pub fn step_count(&self) -> usize {
        (self.duration / self.step).round() as usize
    }

    /// Continuous communication, so the consensus values equal `−L w̃`.
    pub fn fresh_communication(&self) -> bool {
        (self.comm.interval / self.step).round() as usize <= 1 && self.comm.packet_loss == 0.0
    }

    /// The closed-form Lyapunov rate holds: single integrators, no safety
    /// filter, continuous communication, and identical coordination gains
    /// and propagation rates across robots.
    pub fn rate_identity_applies(&self) -> bool {
        let n = self.ambient_dim();
        let first = &self.robots[0].field;
        matches!(self.model, Model::SingleIntegrator)
            && self.safety.is_none()
            && self.fresh_communication()
            && self.robots.iter().all(|r| {
                r.field.gains.k_c == first.gains.k_c
                    && r.field.propagation_rates(n) == first.propagation_rates(n)
            })
    }

    pub fn validate(&self) -> Result<()> {
        if self.robots.is_empty() {
            return Err(Error::InvalidSize("scenario has no robots".into()));
        }
        let (n, k) = (self.ambient_dim(), self.param_count());
        if self.graph.vertex_count() != self.robots.len() {
            return Err(Error::DimensionMismatch {
                expected: self.robots.len(),
                got: self.graph.vertex_count(),
                context: "graph vertex count",
            });
        }
        for r in &self.robots {
            if r.set.ambient_dim() != n || r.set.param_count() != k {
                return Err(Error::Config(format!(
                    "all robots must share n = {n} and k = {k}; `{}` has n = {}, k = {}",
                    r.set.label(),
                    r.set.ambient_dim(),
                    r.set.param_count()
                )));
            }
            r.field.check(&r.set)?;
            r.set.check_state(&r.initial)?;
            if r.initial.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config("initial state must be finite".into()));
            }
        }
        if self.coordination.param_count() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: self.coordination.param_count(),
                context: "coordination parameters",
            });
        }
        for d in &self.coordination.deltas {
            if d.len() != self.graph.edge_count() {
                return Err(Error::DimensionMismatch {
                    expected: self.graph.edge_count(),
                    got: d.len(),
                    context: "per-edge differences",
                });
            }
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!("step {} must be > 0", self.step)));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::Config(format!("duration {} must be >= 0", self.duration)));
        }
        if self.decimation == 0 {
            return Err(Error::Config("decimation must be >= 1".into()));
        }
        if let Model::Dubins(_) = self.model {
            if n != 3 {
                return Err(Error::Config(format!(
                    "the Dubins model needs n = 3 physical coordinates, got {n}"
                )));
            }
            if self.safety.is_some() {
                return Err(Error::Config(
                    "the safety filter applies to single-integrator robots only".into(),
                ));
            }
            if self.robots.iter().any(|r| r.heading.is_none()) {
                return Err(Error::Config("every Dubins robot needs an initial heading".into()));
            }
        }
        crate::coordination::Network::new(
            self.step,
            self.comm.interval,
            self.comm.packet_loss,
            self.comm.seed,
        )?;
        Ok(())
    }

    /// Stacked initial state.
    pub(crate) fn initial_state(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.block() * self.robots.len());
        for r in &self.robots {
            y.extend_from_slice(&r.initial);
            if self.is_dubins() {
                y.push(r.heading.unwrap_or(0.0));
            }
        }
        y
    }

    /// Per-robot generalized states borrowed from a stacked state.
    pub(crate) fn states<'y>(&self, y: &'y [f64]) -> Vec<&'y [f64]> {
        let nk = self.ambient_dim() + self.param_count();
        y.chunks(self.block()).map(|c| &c[..nk]).collect()
    }

    /// Per-robot generalized states and headings from a stacked state.
    pub(crate) fn unpack(&self, y: &[f64]) -> (Vec<Vec<f64>>, Option<Vec<f64>>) {
        let b = self.block();
        let nk = self.ambient_dim() + self.param_count();
        let xis = y.chunks(b).map(|c| c[..nk].to_vec()).collect();
        let headings = self
            .is_dubins()
            .then(|| y.chunks(b).map(|c| c[nk]).collect());
        (xis, headings)
    }
}
