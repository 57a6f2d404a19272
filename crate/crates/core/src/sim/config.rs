//! Scenario files.
//!
//! A scenario is a TOML document with a `name`, an optional `description`
//! and the sections `[run]`, `[graph]`, `[[robots]]`, `[coordination]`,
//! `[safety]` and `[guidance]`:
//!
//! ```toml
//! name = "two-circles"
//!
//! [run]
//! duration = 20.0      # seconds
//! step = 0.001         # default 1e-3
//! integrator = "rk4"   # or "euler"
//! decimate = 10        # record every 10th step
//! seed = 7             # random initial states and packet loss
//!
//! [graph]
//! cycle = 2            # or: vertices = 2, edges = [[1, 2]]
//!
//! [[robots]]
//! count = 2
//! set = { catalog = "circle", params = [5.0] }
//! # set = { expressions = ["5*cos(w)", "5*sin(w)"] }
//! k_phi = 1.0          # or one value per coordinate
//! initial = { random = { w_min = -3.14, w_max = 3.14, offset = 2.0 } }
//! # initial = { xi = [[5.0, 0.0, 0.0], [0.0, 5.0, 1.57]] }
//!
//! [coordination]
//! k_c = 10.0
//! reference_spacing = [3.14159]   # w*_i = (i - 1) * spacing
//! # reference = [[0.0], [3.14]]   # w*_i per robot
//! # deltas = [{ edge = [1, 2], values = [-3.14] }]
//! # desired_speeds = [-1.0, -1.0] # surfaces
//! # comm_interval = 0.1           # default: the step
//! # packet_loss = 0.0
//!
//! [safety]
//! enabled = true
//! radius = 1.0
//! alpha = 1.0
//! activation_scale = 1.0
//!
//! [guidance]
//! model = "single_integrator"     # or "dubins"
//! # v = 15.0, k_theta = 1.0, sat = [-0.5, 0.5], gamma_floor = 1e-6
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coordination::{check_cycle_feasibility, CoordinationSpec};
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::geometry::{DesiredSet, GainSet};
use crate::guidance::GuidanceConfig;
use crate::safety::SafetyConfig;
use crate::sim::{CommSettings, Integrator, Model, Robot, Scenario};
use crate::topology::CommGraph;

fn default_step() -> f64 {
    1e-3
}

fn default_decimate() -> usize {
    10
}

fn default_count() -> usize {
    1
}

fn default_true() -> bool {
    true
}

fn default_one() -> f64 {
    1.0
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

fn is_true(v: &bool) -> bool {
    *v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub run: RunSection,
    pub graph: GraphSection,
    pub robots: Vec<RobotGroup>,
    #[serde(default)]
    pub coordination: CoordinationSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safety: Option<SafetySection>,
    #[serde(default)]
    pub guidance: GuidanceSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub duration: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default = "default_decimate")]
    pub decimate: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
}

/// A scalar applied to every entry, or one value per entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gains {
    All(f64),
    Each(Vec<f64>),
}

impl Gains {
    fn expand(&self, len: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            Gains::All(v) => Ok(vec![*v; len]),
            Gains::Each(v) if v.len() == len => Ok(v.clone()),
            Gains::Each(v) => Err(Error::Config(format!(
                "{what} needs 1 or {len} values, got {}",
                v.len()
            ))),
        }
    }

    fn scale(&mut self, factor: f64) {
        match self {
            Gains::All(v) => *v *= factor,
            Gains::Each(v) => v.iter_mut().for_each(|x| *x *= factor),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expressions: Option<Vec<String>>,
    /// Parameter count of an expression set (1 or 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param_count: Option<usize>,
}

impl SetSpec {
    pub fn catalog(name: &str, params: &[f64]) -> Self {
        Self {
            catalog: Some(name.to_string()),
            params: params.to_vec(),
            expressions: None,
            param_count: None,
        }
    }

    pub fn expressions(components: &[&str], param_count: usize) -> Self {
        Self {
            catalog: None,
            params: Vec::new(),
            expressions: Some(components.iter().map(|s| s.to_string()).collect()),
            param_count: (param_count != 1).then_some(param_count),
        }
    }

    pub fn build(&self) -> Result<DesiredSet> {
        match (&self.catalog, &self.expressions) {
            (Some(name), None) => DesiredSet::catalog(name, &self.params),
            (None, Some(exprs)) => {
                if !self.params.is_empty() {
                    return Err(Error::Config("`params` applies to catalog sets only".into()));
                }
                DesiredSet::from_expressions(self.param_count.unwrap_or(1), exprs)
            }
            _ => Err(Error::Config(
                "a set needs exactly one of `catalog` or `expressions`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomInit {
    /// Range of the initial virtual coordinates, or of their offset from
    /// the reference when `around_reference` is set.
    pub w_min: f64,
    pub w_max: f64,
    /// Physical coordinates are `f(w)` plus a uniform offset in
    /// `[−offset, offset]` per axis.
    pub offset: f64,
    #[serde(default, skip_serializing_if = "is_default")]
    pub around_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    /// Explicit generalized states `(x, w)`, one per robot in the group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<Vec<f64>>>,
    /// Headings for the Dubins model; random when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomInit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotGroup {
    #[serde(default = "default_count")]
    pub count: usize,
    pub set: SetSpec,
    pub k_phi: Gains,
    pub initial: InitialSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDelta {
    pub edge: [usize; 2],
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordinationSection {
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub enabled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_c: Option<Gains>,
    /// `w*_i = (i − 1) · spacing`, one spacing per parameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_spacing: Option<Vec<f64>>,
    /// `w*_i` per robot.
    #[serde(default, alias = "delta_reference", skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<EdgeDelta>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub desired_speeds: Option<[f64; 2]>,
    #[serde(default, alias = "comm_interval_s", skip_serializing_if = "Option::is_none")]
    pub comm_interval: Option<f64>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub packet_loss: f64,
}

impl Default for CoordinationSection {
    fn default() -> Self {
        Self {
            enabled: true,
            k_c: None,
            reference_spacing: None,
            reference: None,
            deltas: None,
            desired_speeds: None,
            comm_interval: None,
            packet_loss: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetySection {
    #[serde(default = "default_true")]
    pub enabled: bool,
    #[serde(alias = "R")]
    pub radius: f64,
    #[serde(default = "default_one")]
    pub alpha: f64,
    #[serde(default = "default_one")]
    pub activation_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    SingleIntegrator,
    Dubins,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GuidanceSection {
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sat: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_floor: Option<f64>,
}

/// Parameters a sweep may vary.
pub const SWEEP_PARAMETERS: &[&str] = &[
    "k_c",
    "k_phi",
    "step",
    "duration",
    "k_theta",
    "v",
    "alpha",
    "radius",
    "comm_interval",
    "packet_loss",
];

impl ScenarioConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn robot_count(&self) -> usize {
        self.robots.iter().map(|g| g.count).sum()
    }

    pub fn build_graph(&self) -> Result<CommGraph> {
        let g = &self.graph;
        match (g.cycle, g.vertices, &g.edges) {
            (Some(n), None, None) => CommGraph::cycle(n),
            (None, Some(n), Some(edges)) => CommGraph::new(n, edges.iter().map(|e| (e[0], e[1])).collect()),
            (None, Some(n), None) => CommGraph::edgeless(n),
            _ => Err(Error::Config(
                "[graph] takes either `cycle = N` or `vertices` with optional `edges`".into(),
            )),
        }
    }

    /// Sets a named parameter on every robot.
    pub fn apply_override(&mut self, parameter: &str, value: f64) -> Result<()> {
        match parameter {
            "k_c" => self.coordination.k_c = Some(Gains::All(value)),
            "k_phi" => self.robots.iter_mut().for_each(|g| g.k_phi = Gains::All(value)),
            "step" => self.run.step = value,
            "duration" => self.run.duration = value,
            "k_theta" => self.guidance.k_theta = Some(value),
            "v" => self.guidance.v = Some(value),
            "alpha" => self.safety_mut()?.alpha = value,
            "radius" => self.safety_mut()?.radius = value,
            "comm_interval" => self.coordination.comm_interval = Some(value),
            "packet_loss" => self.coordination.packet_loss = value,
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep parameter `{other}`; expected one of {}",
                    SWEEP_PARAMETERS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Multiplies every `k_phi` by `factor`.
    pub fn scale_k_phi(&mut self, factor: f64) {
        self.robots.iter_mut().for_each(|g| g.k_phi.scale(factor));
    }

    fn safety_mut(&mut self) -> Result<&mut SafetySection> {
        self.safety
            .as_mut()
            .ok_or_else(|| Error::Config("scenario has no [safety] section".into()))
    }

    /// Per-robot references `w*_i`, when given.
    pub fn references(&self, k: usize) -> Result<Option<Vec<Vec<f64>>>> {
        let c = &self.coordination;
        let big_n = self.robot_count();
        match (&c.reference_spacing, &c.reference) {
            (Some(_), Some(_)) => Err(Error::Config(
                "give either `reference_spacing` or `reference`, not both".into(),
            )),
            (Some(sp), None) => {
                if sp.len() != k {
                    return Err(Error::Config(format!(
                        "reference_spacing needs {k} values, got {}",
                        sp.len()
                    )));
                }
                Ok(Some(
                    (0..big_n)
                        .map(|i| sp.iter().map(|s| i as f64 * s).collect())
                        .collect(),
                ))
            }
            (None, Some(r)) => {
                if r.len() != big_n || r.iter().any(|w| w.len() != k) {
                    return Err(Error::Config(format!(
                        "reference needs {big_n} entries of {k} values"
                    )));
                }
                Ok(Some(r.clone()))
            }
            (None, None) => Ok(None),
        }
    }

    pub fn coordination_spec(&self, graph: &CommGraph, k: usize) -> Result<CoordinationSpec> {
        let refs = self.references(k)?;
        let c = &self.coordination;
        match (refs, &c.deltas) {
            (Some(_), Some(_)) => Err(Error::Config(
                "give either a reference or explicit deltas, not both".into(),
            )),
            (Some(r), None) => {
                let per_param: Vec<Vec<f64>> = (0..k).map(|m| r.iter().map(|w| w[m]).collect()).collect();
                CoordinationSpec::from_reference(graph, &per_param)
            }
            (None, Some(list)) => {
                let mut deltas = vec![vec![f64::NAN; graph.edge_count()]; k];
                for d in list {
                    let (i, j) = (d.edge[0], d.edge[1]);
                    let (idx, head) = graph
                        .edge_index(i, j)
                        .ok_or_else(|| Error::Config(format!("({i},{j}) is not an edge of the graph")))?;
                    if d.values.len() != k {
                        return Err(Error::Config(format!(
                            "delta for ({i},{j}) needs {k} values, got {}",
                            d.values.len()
                        )));
                    }
                    for m in 0..k {
                        let v = if head { d.values[m] } else { -d.values[m] };
                        let slot = &mut deltas[m][idx];
                        if slot.is_finite() && (*slot - v).abs() > 1e-9 {
                            return Err(Error::InfeasibleDeltas(format!(
                                "({i},{j}) and ({j},{i}) are not antisymmetric"
                            )));
                        }
                        *slot = v;
                    }
                }
                if let Some(k0) = deltas.iter().flat_map(|d| d.iter().position(|v| v.is_nan())).next() {
                    let (h, t) = graph.edges()[k0];
                    return Err(Error::Config(format!("no delta given for edge ({h},{t})")));
                }
                for d in &deltas {
                    check_cycle_feasibility(graph, d, 1e-9)?;
                }
                Ok(CoordinationSpec { deltas })
            }
            (None, None) => Ok(CoordinationSpec {
                deltas: vec![vec![0.0; graph.edge_count()]; k],
            }),
        }
    }

    fn guidance_config(&self) -> Result<GuidanceConfig> {
        let g = &self.guidance;
        let missing = |key: &str| Error::Config(format!("the Dubins model needs guidance.{key}"));
        let sat = g.sat.ok_or_else(|| missing("sat"))?;
        let mut cfg = GuidanceConfig::new(
            g.v.ok_or_else(|| missing("v"))?,
            g.k_theta.ok_or_else(|| missing("k_theta"))?,
            sat[0],
            sat[1],
        )?;
        if let Some(f) = g.gamma_floor {
            cfg.gamma_floor = f;
        }
        Ok(cfg)
    }

    /// Builds and validates the scenario.
    pub fn build(&self) -> Result<Scenario> {
        let graph = self.build_graph()?;
        let big_n = self.robot_count();
        if graph.vertex_count() != big_n {
            return Err(Error::DimensionMismatch {
                expected: big_n,
                got: graph.vertex_count(),
                context: "graph vertex count",
            });
        }
        let model = match self.guidance.model {
            ModelKind::SingleIntegrator => Model::SingleIntegrator,
            ModelKind::Dubins => Model::Dubins(self.guidance_config()?),
        };
        let mut sets = Vec::with_capacity(big_n);
        for g in &self.robots {
            let set = g.set.build()?;
            sets.extend(std::iter::repeat_n(set, g.count));
        }
        let first = sets.first().ok_or_else(|| Error::Config("no robots".into()))?;
        let (n, k) = (first.ambient_dim(), first.param_count());
        if let Some(s) = sets.iter().find(|s| s.param_count() != k || s.ambient_dim() != n) {
            return Err(Error::Config(format!(
                "all robots must share n = {n} and k = {k}; `{}` differs",
                s.label()
            )));
        }
        let coordination = self.coordination_spec(&graph, k)?;
        let k_c = if self.coordination.enabled {
            self.coordination
                .k_c
                .as_ref()
                .ok_or_else(|| Error::Config("coordination.k_c is required".into()))?
                .expand(k, "k_c")?
        } else {
            vec![0.0; k]
        };
        let references = self.references(k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.run.seed);
        let mut robots = Vec::with_capacity(big_n);
        let mut idx = 0;
        for g in &self.robots {
            let k_phi = g.k_phi.expand(n, "k_phi")?;
            let gains = if self.coordination.enabled {
                GainSet::new(k_phi, k_c.clone())?
            } else {
                GainSet::uncoupled(k_phi, k)?
            };
            let field = match k {
                1 => FieldConfig::path(gains),
                _ => {
                    let speeds = self.coordination.desired_speeds.ok_or_else(|| {
                        Error::Config("surfaces need coordination.desired_speeds".into())
                    })?;
                    FieldConfig::surface_with_speeds(gains, n, speeds)?
                }
            };
            for member in 0..g.count {
                let set = sets[idx].clone();
                let initial = match (&g.initial.xi, &g.initial.random) {
                    (Some(xs), None) => xs
                        .get(member)
                        .cloned()
                        .ok_or_else(|| Error::Config(format!("initial.xi needs {} states", g.count)))?,
                    (None, Some(r)) => {
                        let base: Vec<f64> = (0..k).map(|_| rng.gen_range(r.w_min..=r.w_max)).collect();
                        let w: Vec<f64> = if r.around_reference {
                            let refs = references.as_ref().ok_or_else(|| {
                                Error::Config("around_reference needs a coordination reference".into())
                            })?;
                            refs[idx].iter().zip(&base).map(|(a, b)| a + b).collect()
                        } else {
                            base
                        };
                        let mut xi = set.lift(&w);
                        for x in xi[..n].iter_mut() {
                            *x += rng.gen_range(-r.offset..=r.offset);
                        }
                        xi
                    }
                    _ => {
                        return Err(Error::Config(
                            "initial takes exactly one of `xi` or `random`".into(),
                        ))
                    }
                };
                let heading = match (&model, &g.initial.heading) {
                    (Model::SingleIntegrator, _) => None,
                    (_, Some(h)) => Some(
                        *h.get(member)
                            .ok_or_else(|| Error::Config(format!("initial.heading needs {} values", g.count)))?,
                    ),
                    (_, None) => Some(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)),
                };
                robots.push(Robot {
                    set,
                    field: field.clone(),
                    initial,
                    heading,
                });
                idx += 1;
            }
        }
        let (safety, monitor_radius) = match &self.safety {
            Some(s) if s.enabled => (Some(SafetyConfig::new(s.radius, s.alpha, s.activation_scale)?), None),
            Some(s) => (None, Some(s.radius)),
            None => (None, None),
        };
        let scenario = Scenario {
            name: self.name.clone(),
            robots,
            graph,
            coordination,
            safety,
            monitor_radius,
            model,
            comm: CommSettings {
                interval: self.coordination.comm_interval.unwrap_or(self.run.step),
                packet_loss: self.coordination.packet_loss,
                seed: self.run.seed,
            },
            duration: self.run.duration,
            step: self.run.step,
            integrator: self.run.integrator,
            decimation: self.run.decimate,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_CIRCLES: &str = r#"
name = "two"

[run]
duration = 1.0
seed = 3

[graph]
cycle = 2

[[robots]]
count = 2
set = { catalog = "circle", params = [5.0] }
k_phi = 1.0
initial = { random = { w_min = -1.0, w_max = 1.0, offset = 2.0 } }

[coordination]
k_c = 2.0
reference_spacing = [3.0]
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = ScenarioConfig::from_toml(TWO_CIRCLES).unwrap();
        assert_eq!(cfg.run.step, 1e-3);
        assert_eq!(cfg.run.decimate, 10);
        let sc = cfg.build().unwrap();
        assert_eq!(sc.robot_count(), 2);
        assert_eq!(sc.coordination.deltas[0].len(), 1);
        assert_eq!(sc.robots[0].field.gains.k_c, vec![2.0]);
        assert!(sc.fresh_communication());
        // Same seed, same initial states.
        assert_eq!(cfg.build().unwrap().robots[1].initial, sc.robots[1].initial);
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ScenarioConfig::from_toml(TWO_CIRCLES).unwrap();
        let again = ScenarioConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn alternate_key_names() {
        let src = TWO_CIRCLES.replace("reference_spacing = [3.0]", "delta_reference = [[0.0], [3.0]]\ncomm_interval_s = 0.01")
            + "\n[safety]\nR = 0.5\n";
        let cfg = ScenarioConfig::from_toml(&src).unwrap();
        assert_eq!(cfg.coordination.reference, Some(vec![vec![0.0], vec![3.0]]));
        assert_eq!(cfg.coordination.comm_interval, Some(0.01));
        assert_eq!(cfg.safety.unwrap().radius, 0.5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = TWO_CIRCLES.replace("seed = 3", "seed = 3\nbogus = 1");
        assert!(ScenarioConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn infeasible_explicit_deltas() {
        let src = TWO_CIRCLES
            .replace("cycle = 2", "cycle = 3")
            .replace("count = 2", "count = 3")
            .replace(
                "reference_spacing = [3.0]",
                "deltas = [{ edge = [1, 2], values = [0.5] }, { edge = [2, 3], values = [0.0] }, { edge = [3, 1], values = [0.0] }]",
            );
        let err = ScenarioConfig::from_toml(&src).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::InfeasibleDeltas(_)), "{err}");
    }

    #[test]
    fn overrides() {
        let mut cfg = ScenarioConfig::from_toml(TWO_CIRCLES).unwrap();
        cfg.apply_override("k_c", 7.0).unwrap();
        assert_eq!(cfg.build().unwrap().robots[0].field.gains.k_c, vec![7.0]);
        assert!(cfg.apply_override("alpha", 1.0).is_err());
        assert!(cfg.apply_override("nope", 1.0).is_err());
    }
}
