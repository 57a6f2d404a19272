//! Built-in scenarios.
//!
//! `sim1` to `sim4` are the four simulations and `exp1`, `exp2` the two
//! flight experiments, with their stated parameters. Initial states are
//! seeded pseudo-random placements; the full-scale teams start with virtual
//! coordinates within ±1 of their references. `sim1_scaled` and `torus8` are smaller
//! versions used by the property suites.

use std::f64::consts::{PI, TAU};

use crate::sim::config::{
    CoordinationSection, Gains, GraphSection, GuidanceSection, InitialSpec, ModelKind, RandomInit, RobotGroup,
    RunSection, ScenarioConfig, SetSpec,
};
use crate::sim::Integrator;

/// Preset names in listing order.
pub const NAMES: &[&str] = &["sim1", "sim2", "sim3", "sim4", "exp1", "exp2", "sim1_scaled", "torus8"];

/// Airspeed assumed for the flight experiments, in m/s.
pub const ASSUMED_AIRSPEED: f64 = 15.0;
/// Turn-rate limits assumed for the flight experiments, in rad/s.
pub const ASSUMED_TURN_LIMITS: [f64; 2] = [-0.8, 0.8];
/// Number of reference points of the letter pattern.
pub const LETTER_POINTS: usize = 67;

pub fn by_name(name: &str) -> Option<ScenarioConfig> {
    Some(match name {
        "sim1" => sim1(),
        "sim2" => sim2(),
        "sim3" => sim3(),
        "sim4" => sim4(),
        "exp1" => exp1(),
        "exp2" => exp2(),
        "sim1_scaled" => scaled_sim1(10, 1),
        "torus8" => torus_team(8, 1),
        _ => return None,
    })
}

pub fn all() -> Vec<ScenarioConfig> {
    NAMES.iter().map(|n| by_name(n).expect("listed preset")).collect()
}

fn run(duration: f64, seed: u64) -> RunSection {
    RunSection {
        duration,
        step: 1e-3,
        integrator: Integrator::Rk4,
        decimate: 10,
        seed,
    }
}

fn random(w_min: f64, w_max: f64, offset: f64) -> InitialSpec {
    InitialSpec {
        xi: None,
        heading: None,
        random: Some(RandomInit {
            w_min,
            w_max,
            offset,
            around_reference: false,
        }),
    }
}

/// Virtual coordinates within `±jitter` of the reference.
fn near_reference(jitter: f64, offset: f64) -> InitialSpec {
    InitialSpec {
        xi: None,
        heading: None,
        random: Some(RandomInit {
            w_min: -jitter,
            w_max: jitter,
            offset,
            around_reference: true,
        }),
    }
}

fn group(count: usize, set: SetSpec, k_phi: Gains, initial: InitialSpec) -> RobotGroup {
    RobotGroup {
        count,
        set,
        k_phi,
        initial,
    }
}

fn coordination(k_c: Gains) -> CoordinationSection {
    CoordinationSection {
        k_c: Some(k_c),
        ..CoordinationSection::default()
    }
}

/// Bent figure-eight team with spacing `T/(2N)`, `T = 2π`.
fn bent_infinity_team(name: &str, n: usize, k_c: f64, duration: f64, seed: u64, initial: InitialSpec) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        description: format!("{n} robots on the bent figure-eight with w*_i = (i-1) T/(2N)"),
        run: run(duration, seed),
        graph: GraphSection {
            cycle: Some(n),
            ..GraphSection::default()
        },
        robots: vec![group(
            n,
            SetSpec::catalog("bent_infinity", &[]),
            Gains::All(1.0),
            initial,
        )],
        coordination: CoordinationSection {
            reference_spacing: Some(vec![TAU / (2.0 * n as f64)]),
            ..coordination(Gains::All(k_c))
        },
        safety: None,
        guidance: GuidanceSection::default(),
    }
}

pub fn sim1() -> ScenarioConfig {
    bent_infinity_team("sim1", 50, 300.0, 60.0, 1, near_reference(1.0, 10.0))
}

/// `sim1` with `n` robots and `k_c = 50`, 40 s.
pub fn scaled_sim1(n: usize, seed: u64) -> ScenarioConfig {
    bent_infinity_team("sim1_scaled", n, 50.0, 40.0, seed, random(-PI, PI, 20.0))
}

pub fn sim2() -> ScenarioConfig {
    let n = 3;
    ScenarioConfig {
        name: "sim2".into(),
        description: "three robots on an open 3D Lissajous curve".into(),
        run: run(100.0, 2),
        graph: GraphSection {
            cycle: Some(n),
            ..GraphSection::default()
        },
        robots: vec![group(
            n,
            SetSpec::catalog("lissajous3d", &[2f64.sqrt(), 4.1, 7.1, 0.1, 0.7, 0.0]),
            Gains::All(1.0),
            random(-PI, PI, 1.0),
        )],
        coordination: CoordinationSection {
            reference_spacing: Some(vec![TAU / n as f64]),
            ..coordination(Gains::All(1.0))
        },
        safety: None,
        guidance: GuidanceSection::default(),
    }
}

pub fn sim3() -> ScenarioConfig {
    let (a, b) = (10.0, 5.0);
    let n = 21;
    let init = || random(-PI, PI, 5.0);
    ScenarioConfig {
        name: "sim3".into(),
        description: "21 robots on a circle, an ellipse and a smaller concentric circle".into(),
        run: run(60.0, 3),
        graph: GraphSection {
            cycle: Some(n),
            ..GraphSection::default()
        },
        robots: vec![
            group(7, SetSpec::catalog("circle", &[a]), Gains::All(1.0), init()),
            group(7, SetSpec::catalog("ellipse", &[a, b]), Gains::All(1.0), init()),
            group(7, SetSpec::catalog("circle", &[b]), Gains::All(1.0), init()),
        ],
        coordination: CoordinationSection {
            reference_spacing: Some(vec![TAU / n as f64]),
            ..coordination(Gains::All(100.0))
        },
        safety: None,
        guidance: GuidanceSection::default(),
    }
}

/// Torus `(2, 1)` team maneuvering with `ẇ* = (−1, −1)`.
fn torus_scenario(
    name: &str,
    description: String,
    n: usize,
    reference: CoordinationSection,
    initial: InitialSpec,
    seed: u64,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        description,
        run: run(60.0, seed),
        graph: GraphSection {
            cycle: Some(n),
            ..GraphSection::default()
        },
        robots: vec![group(
            n,
            SetSpec::catalog("torus", &[2.0, 1.0]),
            Gains::All(1.0),
            initial,
        )],
        coordination: CoordinationSection {
            desired_speeds: Some([-1.0, -1.0]),
            ..reference
        },
        safety: None,
        guidance: GuidanceSection::default(),
    }
}

pub fn sim4() -> ScenarioConfig {
    torus_scenario(
        "sim4",
        "67 robots on a torus forming the letters ICRA while maneuvering".into(),
        LETTER_POINTS,
        CoordinationSection {
            reference: Some(letter_grid(LETTER_POINTS).into_iter().map(|p| p.to_vec()).collect()),
            ..coordination(Gains::All(10.0))
        },
        near_reference(1.0, 2.0),
        4,
    )
}

/// `n` robots equally spaced in both parameters on the `sim4` torus, 40 s.
pub fn torus_team(n: usize, seed: u64) -> ScenarioConfig {
    let mut cfg = torus_scenario(
        "torus8",
        format!("{n} robots on a torus, equally spaced in both parameters"),
        n,
        CoordinationSection {
            reference_spacing: Some(vec![TAU / n as f64; 2]),
            ..coordination(Gains::All(10.0))
        },
        random(-PI, PI, 2.0),
        seed,
    );
    cfg.run.duration = 40.0;
    cfg
}

fn flight() -> GuidanceSection {
    GuidanceSection {
        model: ModelKind::Dubins,
        v: Some(ASSUMED_AIRSPEED),
        k_theta: Some(1.0),
        sat: Some(ASSUMED_TURN_LIMITS),
        gamma_floor: None,
    }
}

fn flight_run(seed: u64) -> RunSection {
    RunSection {
        duration: 300.0,
        step: 0.01,
        integrator: Integrator::Rk4,
        decimate: 10,
        seed,
    }
}

/// Two vehicles in tight formation on the 225 m figure-eight.
pub fn exp1() -> ScenarioConfig {
    ScenarioConfig {
        name: "exp1".into(),
        description: "two fixed-wing vehicles flying in formation on a bent figure-eight".into(),
        run: flight_run(5),
        graph: GraphSection {
            cycle: Some(2),
            ..GraphSection::default()
        },
        robots: vec![group(
            2,
            SetSpec::catalog("lissajous_flight", &[]),
            Gains::Each(vec![0.002, 0.002, 0.0025]),
            random(-PI, PI, 50.0),
        )],
        coordination: CoordinationSection {
            reference_spacing: Some(vec![0.0]),
            comm_interval: Some(0.1),
            ..coordination(Gains::All(0.01))
        },
        safety: None,
        guidance: flight(),
    }
}

/// Two vehicles meeting on the flight torus with `ẇ₂* = 2ẇ₁* = 0.01`.
pub fn exp2() -> ScenarioConfig {
    ScenarioConfig {
        name: "exp2".into(),
        description: "two fixed-wing vehicles meeting on a torus".into(),
        run: flight_run(6),
        graph: GraphSection {
            cycle: Some(2),
            ..GraphSection::default()
        },
        robots: vec![group(
            2,
            SetSpec::catalog("torus_flight", &[100.0, 5.0, 50.0]),
            Gains::All(0.003),
            random(-PI, PI, 20.0),
        )],
        coordination: CoordinationSection {
            reference_spacing: Some(vec![0.0, 0.0]),
            desired_speeds: Some([0.005, 0.01]),
            comm_interval: Some(0.1),
            ..coordination(Gains::Each(vec![0.01, 0.01]))
        },
        safety: None,
        guidance: flight(),
    }
}

/// Letter strokes in a unit box, as polylines.
fn letter_strokes() -> Vec<Vec<Vec<[f64; 2]>>> {
    let arc = |cx: f64, cy: f64, rx: f64, ry: f64, from: f64, to: f64, segs: usize| -> Vec<[f64; 2]> {
        (0..=segs)
            .map(|s| {
                let a = from + (to - from) * s as f64 / segs as f64;
                [cx + rx * a.cos(), cy + ry * a.sin()]
            })
            .collect()
    };
    let i = vec![
        vec![[0.2, 1.0], [0.8, 1.0]],
        vec![[0.5, 1.0], [0.5, 0.0]],
        vec![[0.2, 0.0], [0.8, 0.0]],
    ];
    let c = vec![arc(0.5, 0.5, 0.5, 0.5, PI / 4.0, 7.0 * PI / 4.0, 24)];
    let mut bowl = vec![[0.0, 1.0], [0.55, 1.0]];
    bowl.extend(arc(0.55, 0.75, 0.25, 0.25, PI / 2.0, -PI / 2.0, 12).into_iter().skip(1));
    bowl.push([0.0, 0.5]);
    let r = vec![vec![[0.0, 0.0], [0.0, 1.0]], bowl, vec![[0.35, 0.5], [0.8, 0.0]]];
    let a = vec![vec![[0.0, 0.0], [0.5, 1.0], [1.0, 0.0]], vec![[0.25, 0.5], [0.75, 0.5]]];
    vec![i, c, r, a]
}

fn polyline_length(p: &[[f64; 2]]) -> f64 {
    p.windows(2)
        .map(|s| ((s[1][0] - s[0][0]).powi(2) + (s[1][1] - s[0][1]).powi(2)).sqrt())
        .sum()
}

/// Point at arc-length fraction `u ∈ [0, 1]` of a polyline.
fn polyline_point(p: &[[f64; 2]], u: f64) -> [f64; 2] {
    let mut left = u * polyline_length(p);
    let last = p.len() - 2;
    for (idx, s) in p.windows(2).enumerate() {
        let len = ((s[1][0] - s[0][0]).powi(2) + (s[1][1] - s[0][1]).powi(2)).sqrt();
        if left <= len || idx == last {
            let f = if len > 0.0 { (left / len).min(1.0) } else { 0.0 };
            return [s[0][0] + f * (s[1][0] - s[0][0]), s[0][1] + f * (s[1][1] - s[0][1])];
        }
        left -= len;
    }
    p[p.len() - 1]
}

/// Reference points `(w₁*, w₂*)` spelling "ICRA": the letter strokes are
/// resampled by arc length to `count` points, letter height maps to
/// `w₁ ∈ [−1, 1]` and the four letters are laid out along
/// `w₂ ∈ [−2.8, 2.8]`.
pub fn letter_grid(count: usize) -> Vec<[f64; 2]> {
    let letters = letter_strokes();
    let strokes: Vec<(usize, &Vec<[f64; 2]>)> = letters
        .iter()
        .enumerate()
        .flat_map(|(l, s)| s.iter().map(move |p| (l, p)))
        .collect();
    let lengths: Vec<f64> = strokes.iter().map(|(_, p)| polyline_length(p)).collect();
    let total: f64 = lengths.iter().sum();
    let mut alloc: Vec<usize> = lengths
        .iter()
        .map(|l| ((count as f64 * l / total).round() as usize).max(1))
        .collect();
    // Settle rounding on the longest strokes.
    let mut order: Vec<usize> = (0..alloc.len()).collect();
    order.sort_by(|&a, &b| lengths[b].total_cmp(&lengths[a]));
    let mut cursor = 0;
    while alloc.iter().sum::<usize>() != count {
        let idx = order[cursor % order.len()];
        if alloc.iter().sum::<usize>() < count {
            alloc[idx] += 1;
        } else if alloc[idx] > 1 {
            alloc[idx] -= 1;
        }
        cursor += 1;
    }
    let width = 1.1;
    let pitch = (5.6 - width) / 3.0;
    let mut points = Vec::with_capacity(count);
    for ((letter, poly), &p) in strokes.iter().zip(&alloc) {
        for j in 0..p {
            let u = (j as f64 + 0.5) / p as f64;
            let [x, y] = polyline_point(poly, u);
            let w2 = -2.8 + *letter as f64 * pitch + width * x;
            let w1 = -1.0 + 2.0 * y;
            points.push([w1, w2]);
        }
    }
    points
}
