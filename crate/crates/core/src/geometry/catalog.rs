//! Built-in parametric paths and surfaces with hand-derived derivatives.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::Jet;

/// Catalog entries. Curves take one parameter, surfaces two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CatalogSet {
    /// `f(w) = w · d`.
    Line { direction: Vec<f64> },
    /// `(cx + a cos w, cy + b sin w)`; a circle when `a = b`.
    Ellipse { a: f64, b: f64, cx: f64, cy: f64 },
    /// Horizontal circle `(a cos w, a sin w, z)`.
    Circle3d { a: f64, z: f64 },
    /// Self-intersecting bent figure-eight.
    BentInfinity,
    /// `x_j = cos(n_j w) + m_j`.
    Lissajous3d { freq: [f64; 3], offset: [f64; 3] },
    /// `(a cos w, a cos(2w + π/2), −c cos 2w)`.
    LissajousFlight { a: f64, c: f64 },
    /// `r (cos w1 cos w2, cos w1 sin w2, sin w1)`.
    Sphere { r: f64 },
    /// `((R + r cos w1) cos w2, (R + r cos w1) sin w2, r sin w1)`.
    Torus { major: f64, minor: f64 },
    /// `((R + r cos w2) cos w1, (R + r cos w2) sin w1, r sin w2 + z)`.
    TorusFlight { major: f64, minor: f64, z: f64 },
}

impl CatalogSet {
    pub fn ambient_dim(&self) -> usize {
        match self {
            CatalogSet::Line { direction } => direction.len(),
            CatalogSet::Ellipse { .. } => 2,
            _ => 3,
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            CatalogSet::Sphere { .. } | CatalogSet::Torus { .. } | CatalogSet::TorusFlight { .. } => {
                2
            }
            _ => 1,
        }
    }

    pub(super) fn jet(&self, w: &[f64]) -> Jet {
        match self {
            CatalogSet::Line { direction } => {
                let n = direction.len();
                Jet::curve(
                    direction.iter().map(|d| d * w[0]).collect(),
                    direction.clone(),
                    vec![0.0; n],
                )
            }
            &CatalogSet::Ellipse { a, b, cx, cy } => {
                let (s, c) = w[0].sin_cos();
                Jet::curve(
                    vec![cx + a * c, cy + b * s],
                    vec![-a * s, b * c],
                    vec![-a * c, -b * s],
                )
            }
            &CatalogSet::Circle3d { a, z } => {
                let (s, c) = w[0].sin_cos();
                Jet::curve(
                    vec![a * c, a * s, z],
                    vec![-a * s, a * c, 0.0],
                    vec![-a * c, -a * s, 0.0],
                )
            }
            CatalogSet::BentInfinity => bent_infinity(w[0]),
            CatalogSet::Lissajous3d { freq, offset } => {
                let mut f = vec![0.0; 3];
                let mut d1 = vec![0.0; 3];
                let mut d2 = vec![0.0; 3];
                for j in 0..3 {
                    let (s, c) = (freq[j] * w[0]).sin_cos();
                    f[j] = c + offset[j];
                    d1[j] = -freq[j] * s;
                    d2[j] = -freq[j] * freq[j] * c;
                }
                Jet::curve(f, d1, d2)
            }
            &CatalogSet::LissajousFlight { a, c } => {
                let (s1, c1) = w[0].sin_cos();
                let (s2p, c2p) = (2.0 * w[0] + FRAC_PI_2).sin_cos();
                let (s2, c2) = (2.0 * w[0]).sin_cos();
                Jet::curve(
                    vec![a * c1, a * c2p, -c * c2],
                    vec![-a * s1, -2.0 * a * s2p, 2.0 * c * s2],
                    vec![-a * c1, -4.0 * a * c2p, 4.0 * c * c2],
                )
            }
            &CatalogSet::Sphere { r } => {
                let (s1, c1) = w[0].sin_cos();
                let (s2, c2) = w[1].sin_cos();
                Jet::surface(
                    vec![r * c1 * c2, r * c1 * s2, r * s1],
                    [
                        vec![-r * s1 * c2, -r * s1 * s2, r * c1],
                        vec![-r * c1 * s2, r * c1 * c2, 0.0],
                    ],
                    [
                        vec![-r * c1 * c2, -r * c1 * s2, -r * s1],
                        vec![r * s1 * s2, -r * s1 * c2, 0.0],
                        vec![-r * c1 * c2, -r * c1 * s2, 0.0],
                    ],
                )
            }
            &CatalogSet::Torus { major, minor } => {
                let (s1, c1) = w[0].sin_cos();
                let (s2, c2) = w[1].sin_cos();
                let rho = major + minor * c1;
                Jet::surface(
                    vec![rho * c2, rho * s2, minor * s1],
                    [
                        vec![-minor * s1 * c2, -minor * s1 * s2, minor * c1],
                        vec![-rho * s2, rho * c2, 0.0],
                    ],
                    [
                        vec![-minor * c1 * c2, -minor * c1 * s2, -minor * s1],
                        vec![minor * s1 * s2, -minor * s1 * c2, 0.0],
                        vec![-rho * c2, -rho * s2, 0.0],
                    ],
                )
            }
            &CatalogSet::TorusFlight { major, minor, z } => {
                let (s1, c1) = w[0].sin_cos();
                let (s2, c2) = w[1].sin_cos();
                let rho = major + minor * c2;
                Jet::surface(
                    vec![rho * c1, rho * s1, minor * s2 + z],
                    [
                        vec![-rho * s1, rho * c1, 0.0],
                        vec![-minor * s2 * c1, -minor * s2 * s1, minor * c2],
                    ],
                    [
                        vec![-rho * c1, -rho * s1, 0.0],
                        vec![minor * s2 * s1, -minor * s2 * c1, 0.0],
                        vec![-minor * c2 * c1, -minor * c2 * s1, -minor * s2],
                    ],
                )
            }
        }
    }
}

fn bent_infinity(w: f64) -> Jet {
    let (s, c) = w.sin_cos();
    let (s2, c2) = (2.0 * w).sin_cos();
    // g = 0.5 (1 − 0.5 sin² w) ∈ [0.25, 0.5]
    let g = 0.375 + 0.125 * c2;
    let g1 = -0.25 * s2;
    let g2 = -0.5 * c2;
    let r = g.sqrt();
    let r1 = g1 / (2.0 * r);
    let r2 = g2 / (2.0 * r) - g1 * g1 / (4.0 * r * r * r);
    Jet::curve(
        vec![15.0 * s2, 30.0 * s * r, 3.0 + 5.0 * c2],
        vec![30.0 * c2, 30.0 * (c * r + s * r1), -10.0 * s2],
        vec![
            -60.0 * s2,
            30.0 * (-s * r + 2.0 * c * r1 + s * r2),
            -20.0 * c2,
        ],
    )
}
