//! Deterministic SVG trajectory plots.
//!
//! Planar scenarios get one panel; 3D scenarios get the three axis
//! projections side by side. Desired paths are drawn in magenta, robot
//! traces in a fixed palette, with a square at the start and a circle at
//! the end of each trace.

use std::fmt::Write;

use crate::sim::telemetry::Frame;
use crate::sim::Scenario;

const PANEL: f64 = 360.0;
const MARGIN: f64 = 30.0;
const PALETTE: &[&str] = &[
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];
/// Samples per desired path drawn.
const PATH_SAMPLES: usize = 400;

struct Bounds {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Bounds {
    fn new() -> Self {
        Self {
            lo: [f64::INFINITY; 2],
            hi: [f64::NEG_INFINITY; 2],
        }
    }

    fn add(&mut self, p: [f64; 2]) {
        for d in 0..2 {
            if p[d].is_finite() {
                self.lo[d] = self.lo[d].min(p[d]);
                self.hi[d] = self.hi[d].max(p[d]);
            }
        }
    }

    /// Maps to panel pixels with equal scaling on both axes.
    fn map(&self, p: [f64; 2], x0: f64) -> (f64, f64) {
        let span = (self.hi[0] - self.lo[0]).max(self.hi[1] - self.lo[1]).max(1e-9);
        let s = (PANEL - 2.0 * MARGIN) / span;
        let cx = 0.5 * (self.lo[0] + self.hi[0]);
        let cy = 0.5 * (self.lo[1] + self.hi[1]);
        (x0 + PANEL / 2.0 + s * (p[0] - cx), PANEL / 2.0 - s * (p[1] - cy))
    }
}

/// Desired paths sampled over one period of the parameter (`[0, 2π]`);
/// surfaces are not drawn.
fn desired_paths(scenario: &Scenario) -> Vec<Vec<Vec<f64>>> {
    if scenario.param_count() != 1 {
        return Vec::new();
    }
    let mut seen: Vec<&str> = Vec::new();
    let mut out = Vec::new();
    for r in &scenario.robots {
        if seen.contains(&r.set.label()) {
            continue;
        }
        seen.push(r.set.label());
        out.push(
            (0..=PATH_SAMPLES)
                .map(|s| r.set.eval(&[std::f64::consts::TAU * s as f64 / PATH_SAMPLES as f64]))
                .collect(),
        );
    }
    out
}

pub fn trajectories(scenario: &Scenario, frames: &[Frame]) -> String {
    let n = scenario.ambient_dim();
    let panels: Vec<(usize, usize)> = match n {
        1 => vec![(0, 0)],
        2 => vec![(0, 1)],
        _ => vec![(0, 1), (0, 2), (1, 2)],
    };
    let paths = desired_paths(scenario);
    let width = PANEL * panels.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" viewBox="0 0 {width} {PANEL}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{PANEL}" fill="white"/>"#);
    for (pi, &(a, b)) in panels.iter().enumerate() {
        let x0 = PANEL * pi as f64;
        let pick = |v: &[f64]| [v[a], if a == b { 0.0 } else { v[b] }];
        let mut bounds = Bounds::new();
        for f in frames {
            for s in &f.states {
                bounds.add(pick(s));
            }
        }
        for p in &paths {
            for q in p {
                bounds.add(pick(q));
            }
        }
        let _ = writeln!(
            svg,
            r#"<rect x="{x0}" y="0" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">x{} / x{}</text>"#,
            x0 + PANEL / 2.0,
            MARGIN / 2.0,
            a + 1,
            b + 1
        );
        for p in &paths {
            let pts: Vec<String> = p
                .iter()
                .map(|q| {
                    let (x, y) = bounds.map(pick(q), x0);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                svg,
                r##"<polyline points="{}" fill="none" stroke="#ff00ff" stroke-width="1"/>"##,
                pts.join(" ")
            );
        }
        let robots = frames.first().map_or(0, |f| f.states.len());
        for i in 0..robots {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = frames.iter().map(|f| bounds.map(pick(&f.states[i]), x0)).collect();
            let line: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1"/>"#,
                line.join(" ")
            );
            if let (Some(s), Some(e)) = (pts.first(), pts.last()) {
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.2}" y="{:.2}" width="6" height="6" fill="{color}"/>"#,
                    s.0 - 3.0,
                    s.1 - 3.0
                );
                let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#, e.0, e.1);
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}
