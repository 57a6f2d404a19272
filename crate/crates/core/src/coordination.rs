//! Desired parametric differences, consensus on virtual coordinates, and the
//! simulated message exchange between neighbors.
//!
//! Differences are stored per parameter and per edge in the graph's edge
//! orientation: `Δ_k = Δ^{[head, tail]}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::topology::CommGraph;

/// Per-parameter, per-edge desired differences.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinationSpec {
    /// `deltas[m][k]` for parameter `m` and edge `k`.
    pub deltas: Vec<Vec<f64>>,
}

impl CoordinationSpec {
    /// Differences derived from reference values `w*` (one list per
    /// parameter).
    pub fn from_reference(graph: &CommGraph, references: &[Vec<f64>]) -> Result<Self> {
        let deltas = references
            .iter()
            .map(|r| deltas_from_reference(graph, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { deltas })
    }

    /// Differences given directly, validated for cycle feasibility.
    pub fn from_deltas(graph: &CommGraph, deltas: Vec<Vec<f64>>) -> Result<Self> {
        for d in &deltas {
            if d.len() != graph.edge_count() {
                return Err(Error::DimensionMismatch {
                    expected: graph.edge_count(),
                    got: d.len(),
                    context: "per-edge differences",
                });
            }
            check_cycle_feasibility(graph, d, 1e-9)?;
        }
        Ok(Self { deltas })
    }

    pub fn param_count(&self) -> usize {
        self.deltas.len()
    }

    /// `Δ^{[i,j]}` for parameter `m`; `None` when `i` and `j` are not adjacent.
    pub fn delta(&self, graph: &CommGraph, m: usize, i: usize, j: usize) -> Option<f64> {
        graph
            .edge_index(i, j)
            .map(|(k, head)| if head { self.deltas[m][k] } else { -self.deltas[m][k] })
    }
}

/// `Δ_k = w*_{head} − w*_{tail}`.
pub fn deltas_from_reference(graph: &CommGraph, w_star: &[f64]) -> Result<Vec<f64>> {
    if w_star.len() != graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.vertex_count(),
            got: w_star.len(),
            context: "reference configuration",
        });
    }
    Ok(graph
        .edges()
        .iter()
        .map(|&(h, t)| w_star[h - 1] - w_star[t - 1])
        .collect())
}

/// Converts a list of `(i, j, Δ^{[i,j]})` entries to per-edge differences.
/// Both orientations may be listed; they must be antisymmetric.
pub fn deltas_from_pairs(graph: &CommGraph, pairs: &[(usize, usize, f64)]) -> Result<Vec<f64>> {
    let mut out: Vec<Option<f64>> = vec![None; graph.edge_count()];
    for &(i, j, d) in pairs {
        let (k, head) = graph.edge_index(i, j).ok_or_else(|| {
            Error::InfeasibleDeltas(format!("({i}, {j}) is not an edge of the graph"))
        })?;
        let oriented = if head { d } else { -d };
        match out[k] {
            Some(prev) if (prev - oriented).abs() > 1e-9 => {
                return Err(Error::InfeasibleDeltas(format!(
                    "Δ[{i},{j}] = {d} is not the negative of Δ[{j},{i}] = {}",
                    if head { -prev } else { prev }
                )))
            }
            _ => out[k] = Some(oriented),
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(k, d)| {
            d.ok_or_else(|| {
                let (h, t) = graph.edges()[k];
                Error::InfeasibleDeltas(format!("no difference given for edge ({h}, {t})"))
            })
        })
        .collect()
}

/// Every cycle of the graph must have zero signed sum of differences.
pub fn check_cycle_feasibility(graph: &CommGraph, deltas: &[f64], tol: f64) -> Result<()> {
    for cycle in graph.cycle_basis() {
        let sum: f64 = cycle.iter().map(|&(k, s)| s * deltas[k]).sum();
        if sum.abs() > tol {
            let edges: Vec<String> = cycle
                .iter()
                .map(|&(k, _)| {
                    let (h, t) = graph.edges()[k];
                    format!("({h},{t})")
                })
                .collect();
            return Err(Error::InfeasibleDeltas(format!(
                "cycle {} has difference sum {sum}",
                edges.join(" ")
            )));
        }
    }
    Ok(())
}

/// Per-edge coordination error `w_head − w_tail − Δ_k` for one parameter.
pub fn coordination_error(graph: &CommGraph, w: &[f64], deltas: &[f64]) -> Vec<f64> {
    graph
        .edges()
        .iter()
        .zip(deltas)
        .map(|(&(h, t), d)| w[h - 1] - w[t - 1] - d)
        .collect()
}

/// A neighbor's broadcast: its virtual coordinates and, when guidance needs
/// them, their rates.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub w: Vec<f64>,
    pub w_dot: Option<Vec<f64>>,
    /// Time the message was received.
    pub stamp: f64,
}

/// Latest messages held by one robot, one slot per neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct Mailbox {
    neighbors: Vec<usize>,
    /// Edge index joining each neighbor and its orientation sign
    /// (`+1` when the owner is the head).
    links: Vec<(usize, f64)>,
    slots: Vec<Option<Message>>,
}

impl Mailbox {
    pub fn empty(graph: &CommGraph, i: usize) -> Result<Self> {
        let neighbors = graph.neighbors(i)?.to_vec();
        let links = neighbors
            .iter()
            .map(|&j| {
                let (k, head) = graph.edge_index(i, j).expect("adjacent vertices share an edge");
                (k, if head { 1.0 } else { -1.0 })
            })
            .collect();
        let slots = vec![None; neighbors.len()];
        Ok(Self {
            neighbors,
            links,
            slots,
        })
    }

    pub fn neighbors(&self) -> &[usize] {
        &self.neighbors
    }

    pub fn get(&self, j: usize) -> Option<&Message> {
        let idx = self.neighbors.binary_search(&j).ok()?;
        self.slots[idx].as_ref()
    }

    /// Stores a message from `j`; messages from non-neighbors are ignored.
    pub fn deliver(&mut self, j: usize, msg: Message) -> bool {
        match self.neighbors.binary_search(&j) {
            Ok(idx) => {
                self.slots[idx] = Some(msg);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Option<&Message>)> {
        self.neighbors
            .iter()
            .copied()
            .zip(self.slots.iter().map(|s| s.as_ref()))
    }
}

/// All robots' mailboxes.
#[derive(Debug, Clone, PartialEq)]
pub struct Mailboxes {
    pub boxes: Vec<Mailbox>,
}

impl Mailboxes {
    pub fn empty(graph: &CommGraph) -> Self {
        let boxes = (1..=graph.vertex_count())
            .map(|i| Mailbox::empty(graph, i).expect("vertex in range"))
            .collect();
        Self { boxes }
    }

    /// Mailboxes holding the exact current values of every neighbor.
    pub fn snapshot<W: AsRef<[f64]>>(graph: &CommGraph, t: f64, w: &[W], w_dot: Option<&[Vec<f64>]>) -> Self {
        let mut boxes = Self::empty(graph);
        boxes.refresh(t, w, w_dot);
        boxes
    }

    /// Overwrites every slot with the exact current values.
    pub fn refresh<W: AsRef<[f64]>>(&mut self, t: f64, w: &[W], w_dot: Option<&[Vec<f64>]>) {
        self.deliver_all(t, w, w_dot, |_, _| true);
    }

    fn deliver_all<W: AsRef<[f64]>>(
        &mut self,
        t: f64,
        w: &[W],
        w_dot: Option<&[Vec<f64>]>,
        mut accept: impl FnMut(usize, usize) -> bool,
    ) {
        for (i0, mailbox) in self.boxes.iter_mut().enumerate() {
            for idx in 0..mailbox.neighbors.len() {
                let j = mailbox.neighbors[idx];
                if !accept(i0 + 1, j) {
                    continue;
                }
                let wj = w[j - 1].as_ref();
                let dj = w_dot.map(|d| d[j - 1].as_slice());
                match &mut mailbox.slots[idx] {
                    // Reuse the slot's buffers when the shapes match.
                    Some(msg) if msg.w.len() == wj.len() && msg.w_dot.as_ref().map(Vec::len) == dj.map(<[f64]>::len) => {
                        msg.w.copy_from_slice(wj);
                        if let (Some(buf), Some(d)) = (msg.w_dot.as_mut(), dj) {
                            buf.copy_from_slice(d);
                        }
                        msg.stamp = t;
                    }
                    slot => {
                        *slot = Some(Message {
                            w: wj.to_vec(),
                            w_dot: dj.map(<[f64]>::to_vec),
                            stamp: t,
                        })
                    }
                }
            }
        }
    }
}

/// `c^{[i]}_m = −Σ_{j∈N_i} (w^{[i]}_m − w^{[j]}_m − Δ^{[i,j]}_m)` for every
/// parameter `m`, using the values held in robot `i`'s mailbox.
pub fn consensus(
    graph: &CommGraph,
    i: usize,
    own_w: &[f64],
    mailbox: &Mailbox,
    spec: &CoordinationSpec,
) -> Result<Vec<f64>> {
    debug_assert_eq!(mailbox.neighbors(), graph.neighbors(i)?);
    let mut c = vec![0.0; own_w.len()];
    for ((&j, &(k, sign)), msg) in mailbox.neighbors.iter().zip(&mailbox.links).zip(&mailbox.slots) {
        let msg = msg.as_ref().ok_or(Error::MissingNeighbor {
            robot: i,
            neighbor: j,
        })?;
        for (m, cm) in c.iter_mut().enumerate() {
            *cm -= own_w[m] - msg.w[m] - sign * spec.deltas[m][k];
        }
    }
    Ok(c)
}

/// Delivery schedule and loss model for neighbor broadcasts.
#[derive(Debug, Clone)]
pub struct Network {
    /// Steps between exchanges (1 = every step).
    pub steps_per_exchange: usize,
    pub packet_loss: f64,
    rng: ChaCha8Rng,
}

impl Network {
    /// `comm_interval` is rounded to a whole number of integration steps.
    pub fn new(step: f64, comm_interval: f64, packet_loss: f64, seed: u64) -> Result<Self> {
        if !(comm_interval >= step * (1.0 - 1e-9)) {
            return Err(Error::Config(format!(
                "communication interval {comm_interval} is shorter than the step {step}"
            )));
        }
        if !(0.0..=1.0).contains(&packet_loss) {
            return Err(Error::Config(format!(
                "packet loss {packet_loss} must lie in [0, 1]"
            )));
        }
        let steps_per_exchange = ((comm_interval / step).round() as usize).max(1);
        Ok(Self {
            steps_per_exchange,
            packet_loss,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Continuous exchange: values are read fresh at every evaluation.
    pub fn is_fresh(&self) -> bool {
        self.steps_per_exchange == 1 && self.packet_loss == 0.0
    }

    pub fn is_exchange_step(&self, step_index: usize) -> bool {
        step_index.is_multiple_of(self.steps_per_exchange)
    }

    /// Broadcasts every robot's values to its neighbors, dropping each
    /// delivery independently with probability `packet_loss`.
    pub fn exchange<W: AsRef<[f64]>>(
        &mut self,
        boxes: &mut Mailboxes,
        t: f64,
        w: &[W],
        w_dot: Option<&[Vec<f64>]>,
    ) {
        let p = self.packet_loss;
        let rng = &mut self.rng;
        boxes.deliver_all(t, w, w_dot, |_, _| p == 0.0 || rng.gen::<f64>() >= p);
    }
}
