//! Parametric desired sets, surface functions and the error vector Φ.
//!
//! A desired set maps `k ∈ {1, 2}` parameters to a point of `ℝⁿ`. A robot's
//! generalized coordinate is `ξ = (x, w) ∈ ℝ^{n+k}` and the surface
//! functions are `φ_j(ξ) = x_j − f_j(w)`.

mod catalog;
pub mod expr;

pub use catalog::CatalogSet;

use crate::error::{Error, Result};
use expr::Expr;

/// Value and derivatives of a desired set at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: Vec<f64>,
    /// `d1[m][j] = ∂f_j/∂w_m`.
    pub d1: Vec<Vec<f64>>,
    /// Upper triangle of the Hessian per component: `[∂₁₁]` for curves,
    /// `[∂₁₁, ∂₁₂, ∂₂₂]` for surfaces.
    d2: Vec<Vec<f64>>,
}

impl Jet {
    fn curve(value: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>) -> Self {
        Self {
            value,
            d1: vec![d1],
            d2: vec![d2],
        }
    }

    fn surface(value: Vec<f64>, d1: [Vec<f64>; 2], d2: [Vec<f64>; 3]) -> Self {
        let [a, b] = d1;
        let [p, q, r] = d2;
        Self {
            value,
            d1: vec![a, b],
            d2: vec![p, q, r],
        }
    }

    pub fn param_count(&self) -> usize {
        self.d1.len()
    }

    /// `∂²f/∂w_l∂w_m` (0-based indices, symmetric).
    pub fn d2(&self, l: usize, m: usize) -> &[f64] {
        let (a, b) = if l <= m { (l, m) } else { (m, l) };
        let idx = match (a, b) {
            (0, 0) => 0,
            (0, 1) => 1,
            (1, 1) => 2,
            _ => panic!("second partial ({l},{m}) out of range"),
        };
        &self.d2[idx]
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ExprSet {
    value: Vec<Expr>,
    d1: Vec<Vec<Expr>>,
    d2: Vec<Vec<Expr>>,
}

impl ExprSet {
    fn jet(&self, w: &[f64]) -> Jet {
        let ev = |es: &Vec<Expr>| es.iter().map(|e| e.eval(w)).collect::<Vec<_>>();
        Jet {
            value: ev(&self.value),
            d1: self.d1.iter().map(ev).collect(),
            d2: self.d2.iter().map(ev).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum SetKind {
    Catalog(CatalogSet),
    Expr(ExprSet),
}

/// A parametric path (`k = 1`) or surface (`k = 2`) in `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesiredSet {
    label: String,
    n: usize,
    k: usize,
    kind: SetKind,
}

impl DesiredSet {
    /// Looks up a catalog entry by name.
    ///
    /// | name | params | set |
    /// |---|---|---|
    /// | `line` | direction `d` (≥1 values) | `w·d` |
    /// | `circle` | `a` or `a, cx, cy` | `(cx + a cos w, cy + a sin w)` |
    /// | `ellipse` | `a, b` or `a, b, cx, cy` | `(cx + a cos w, cy + b sin w)` |
    /// | `circle3d` | `a, z` | `(a cos w, a sin w, z)` |
    /// | `bent_infinity` | none | `(15 sin 2w, 30 sin w √(0.5(1−0.5 sin²w)), 5 + 5 cos 2w − 2)` |
    /// | `lissajous3d` | `nx, ny, nz, mx, my, mz` | `cos(n w) + m` per axis |
    /// | `lissajous_flight` | none or `a, c` (225, 20) | `(a cos w, a cos(2w+π/2), −c cos 2w)` |
    /// | `sphere` | none or `r` | unit-sphere parametrization scaled by `r` |
    /// | `torus` | `R, r` | `((R + r cos w1) cos w2, (R + r cos w1) sin w2, r sin w1)` |
    /// | `torus_flight` | none or `R, r, z` (100, 5, 50) | `((R + r cos w2) cos w1, (R + r cos w2) sin w1, r sin w2 + z)` |
    pub fn catalog(name: &str, params: &[f64]) -> Result<Self> {
        let count_err = |expected: &str| Error::ParameterCount {
            name: name.to_string(),
            expected: expected.to_string(),
            got: params.len(),
        };
        let set = match name {
            "line" => {
                if params.is_empty() {
                    return Err(count_err(">= 1"));
                }
                CatalogSet::Line {
                    direction: params.to_vec(),
                }
            }
            "circle" => match *params {
                [a] => CatalogSet::Ellipse {
                    a,
                    b: a,
                    cx: 0.0,
                    cy: 0.0,
                },
                [a, cx, cy] => CatalogSet::Ellipse { a, b: a, cx, cy },
                _ => return Err(count_err("1 or 3")),
            },
            "ellipse" => match *params {
                [a, b] => CatalogSet::Ellipse {
                    a,
                    b,
                    cx: 0.0,
                    cy: 0.0,
                },
                [a, b, cx, cy] => CatalogSet::Ellipse { a, b, cx, cy },
                _ => return Err(count_err("2 or 4")),
            },
            "circle3d" => match *params {
                [a, z] => CatalogSet::Circle3d { a, z },
                _ => return Err(count_err("2")),
            },
            "bent_infinity" => match *params {
                [] => CatalogSet::BentInfinity,
                _ => return Err(count_err("0")),
            },
            "lissajous3d" => match *params {
                [nx, ny, nz, mx, my, mz] => CatalogSet::Lissajous3d {
                    freq: [nx, ny, nz],
                    offset: [mx, my, mz],
                },
                _ => return Err(count_err("6")),
            },
            "lissajous_flight" => match *params {
                [] => CatalogSet::LissajousFlight { a: 225.0, c: 20.0 },
                [a, c] => CatalogSet::LissajousFlight { a, c },
                _ => return Err(count_err("0 or 2")),
            },
            "sphere" => match *params {
                [] => CatalogSet::Sphere { r: 1.0 },
                [r] => CatalogSet::Sphere { r },
                _ => return Err(count_err("0 or 1")),
            },
            "torus" => match *params {
                [major, minor] => CatalogSet::Torus { major, minor },
                _ => return Err(count_err("2")),
            },
            "torus_flight" => match *params {
                [] => CatalogSet::TorusFlight {
                    major: 100.0,
                    minor: 5.0,
                    z: 50.0,
                },
                [major, minor, z] => CatalogSet::TorusFlight { major, minor, z },
                _ => return Err(count_err("0 or 3")),
            },
            other => return Err(Error::UnknownSet(other.to_string())),
        };
        if matches!(set, CatalogSet::BentInfinity) {
            // The square-root argument 0.5(1 − 0.5 sin² w) stays in [0.25, 0.5].
            debug_assert!((0..=64).all(|i| {
                let s = (i as f64 * 0.1).sin();
                let g = 0.5 * (1.0 - 0.5 * s * s);
                (0.25..=0.5).contains(&g)
            }));
        }
        let label = if params.is_empty() {
            name.to_string()
        } else {
            let ps: Vec<String> = params.iter().map(|p| p.to_string()).collect();
            format!("{name}({})", ps.join(", "))
        };
        Ok(Self::from_catalog_set(label, set))
    }

    pub fn from_catalog_set(label: impl Into<String>, set: CatalogSet) -> Self {
        Self {
            label: label.into(),
            n: set.ambient_dim(),
            k: set.param_count(),
            kind: SetKind::Catalog(set),
        }
    }

    /// Builds a set from one expression per ambient coordinate. Curves use
    /// the variable `w`, surfaces `w1` and `w2`. Derivatives are formed
    /// symbolically once here.
    pub fn from_expressions(param_count: usize, components: &[String]) -> Result<Self> {
        let vars: &[&str] = match param_count {
            1 => &["w"],
            2 => &["w1", "w2"],
            k => {
                return Err(Error::Config(format!(
                    "expression sets need 1 or 2 parameters, got {k}"
                )))
            }
        };
        if components.is_empty() {
            return Err(Error::Config("expression set has no components".into()));
        }
        let value = components
            .iter()
            .map(|s| expr::parse(s, vars))
            .collect::<Result<Vec<_>>>()?;
        let d1: Vec<Vec<Expr>> = (0..param_count)
            .map(|m| value.iter().map(|e| e.derivative(m)).collect())
            .collect();
        let d2: Vec<Vec<Expr>> = if param_count == 1 {
            vec![d1[0].iter().map(|e| e.derivative(0)).collect()]
        } else {
            vec![
                d1[0].iter().map(|e| e.derivative(0)).collect(),
                d1[0].iter().map(|e| e.derivative(1)).collect(),
                d1[1].iter().map(|e| e.derivative(1)).collect(),
            ]
        };
        Ok(Self {
            label: format!("expr[{}]", components.join("; ")),
            n: components.len(),
            k: param_count,
            kind: SetKind::Expr(ExprSet { value, d1, d2 }),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of physical coordinates `n`.
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Number of parameters `k`.
    pub fn param_count(&self) -> usize {
        self.k
    }

    pub fn state_dim(&self) -> usize {
        self.n + self.k
    }

    pub fn jet(&self, w: &[f64]) -> Jet {
        debug_assert_eq!(w.len(), self.k);
        match &self.kind {
            SetKind::Catalog(c) => c.jet(w),
            SetKind::Expr(e) => e.jet(w),
        }
    }

    pub fn eval(&self, w: &[f64]) -> Vec<f64> {
        self.jet(w).value
    }

    /// The point `(f(w), w)` of the lifted desired set.
    pub fn lift(&self, w: &[f64]) -> Vec<f64> {
        let mut xi = self.eval(w);
        xi.extend_from_slice(w);
        xi
    }

    pub(crate) fn check_state(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.state_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.state_dim(),
                got: xi.len(),
                context: "generalized state",
            });
        }
        Ok(())
    }
}

/// Per-robot gains: `k_phi` (one per surface function) and the coordination
/// gains `k_c` (one per parameter).
#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    pub k_phi: Vec<f64>,
    pub k_c: Vec<f64>,
}

impl GainSet {
    /// All gains must be finite and strictly positive.
    pub fn new(k_phi: Vec<f64>, k_c: Vec<f64>) -> Result<Self> {
        for (name, v) in k_phi
            .iter()
            .map(|v| ("k_phi", v))
            .chain(k_c.iter().map(|v| ("k_c", v)))
        {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidGain(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(Self { k_phi, k_c })
    }

    /// Gains with the coordination term switched off (`k_c = 0`).
    pub fn uncoupled(k_phi: Vec<f64>, param_count: usize) -> Result<Self> {
        let mut g = Self::new(k_phi, vec![1.0; param_count])?;
        g.k_c.iter_mut().for_each(|k| *k = 0.0);
        Ok(g)
    }
}

/// `Φ(ξ)` with `Φ_j = x_j − f_j(w)`.
pub fn phi(set: &DesiredSet, xi: &[f64]) -> Result<Vec<f64>> {
    set.check_state(xi)?;
    let n = set.ambient_dim();
    let f = set.eval(&xi[n..]);
    Ok(xi[..n].iter().zip(&f).map(|(x, f)| x - f).collect())
}

/// `∇φ_j ∈ ℝ^{n+k}` for 1-based `j`: the unit vector `e_j` on the physical
/// slots and `−∂f_j/∂w_m` on the virtual ones.
pub fn grad_phi(set: &DesiredSet, xi: &[f64], j: usize) -> Result<Vec<f64>> {
    set.check_state(xi)?;
    let n = set.ambient_dim();
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    let jet = set.jet(&xi[n..]);
    Ok(grad_phi_from_jet(&jet, n, j - 1))
}

pub(crate) fn grad_phi_from_jet(jet: &Jet, n: usize, j0: usize) -> Vec<f64> {
    let mut g = vec![0.0; n + jet.param_count()];
    g[j0] = 1.0;
    for (m, d) in jet.d1.iter().enumerate() {
        g[n + m] = -d[j0];
    }
    g
}

/// Largest absolute gap between analytic first/second partials and central
/// finite differences with step `h`.
pub fn check_derivatives(set: &DesiredSet, w: &[f64], h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let k = set.param_count();
    let jet = set.jet(w);
    let mut worst: f64 = 0.0;
    for m in 0..k {
        let mut wp = w.to_vec();
        let mut wm = w.to_vec();
        wp[m] += h;
        wm[m] -= h;
        let jp = set.jet(&wp);
        let jm = set.jet(&wm);
        for j in 0..set.ambient_dim() {
            let fd = (jp.value[j] - jm.value[j]) / (2.0 * h);
            worst = worst.max((fd - jet.d1[m][j]).abs());
            for l in 0..k {
                let fd2 = (jp.d1[l][j] - jm.d1[l][j]) / (2.0 * h);
                worst = worst.max((fd2 - jet.d2(l, m)[j]).abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle() -> DesiredSet {
        DesiredSet::catalog("circle", &[1.0]).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&circle(), &[1.0, 0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(phi(&circle(), &[2.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        let sphere = DesiredSet::catalog("sphere", &[]).unwrap();
        assert_eq!(
            phi(&sphere, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
        assert!(phi(&circle(), &[1.0, 0.0]).is_err());
    }

    #[test]
    fn grad_phi_examples() {
        assert_eq!(
            grad_phi(&circle(), &[1.0, 0.0, 0.0], 1).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        assert_eq!(
            grad_phi(&circle(), &[1.0, 0.0, 0.0], 2).unwrap(),
            vec![0.0, 1.0, -1.0]
        );
        let torus = DesiredSet::catalog("torus", &[2.0, 1.0]).unwrap();
        let xi = torus.lift(&[0.0, 0.0]);
        assert_eq!(
            grad_phi(&torus, &xi, 3).unwrap(),
            vec![0.0, 0.0, 1.0, -1.0, 0.0]
        );
        assert!(grad_phi(&circle(), &[1.0, 0.0, 0.0], 3).is_err());
        assert!(grad_phi(&circle(), &[1.0, 0.0, 0.0], 0).is_err());
    }

    #[test]
    fn catalog_values() {
        let b = DesiredSet::catalog("bent_infinity", &[]).unwrap();
        let w: f64 = 0.7;
        let f = b.eval(&[w]);
        let s = w.sin();
        assert!((f[0] - 15.0 * (2.0 * w).sin()).abs() < 1e-12);
        assert!((f[1] - 30.0 * s * (0.5 * (1.0 - 0.5 * s * s)).sqrt()).abs() < 1e-12);
        assert!((f[2] - (5.0 + 5.0 * (2.0 * w).cos() - 2.0)).abs() < 1e-12);

        let c = DesiredSet::catalog("circle", &[10.0]).unwrap();
        let f = c.eval(&[0.4]);
        assert!((f[0] - 10.0 * 0.4f64.cos()).abs() < 1e-12);
        assert!((f[1] - 10.0 * 0.4f64.sin()).abs() < 1e-12);

        let t = DesiredSet::catalog("torus", &[2.0, 1.0]).unwrap();
        let (w1, w2) = (0.3f64, -1.1f64);
        let f = t.eval(&[w1, w2]);
        assert!((f[0] - (2.0 + w1.cos()) * w2.cos()).abs() < 1e-12);
        assert!((f[1] - (2.0 + w1.cos()) * w2.sin()).abs() < 1e-12);
        assert!((f[2] - w1.sin()).abs() < 1e-12);
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(
            DesiredSet::catalog("nope", &[]),
            Err(Error::UnknownSet(_))
        ));
        assert!(matches!(
            DesiredSet::catalog("torus", &[1.0]),
            Err(Error::ParameterCount { .. })
        ));
        assert!(DesiredSet::catalog("line", &[]).is_err());
    }

    #[test]
    fn derivative_checks() {
        assert!(check_derivatives(&DesiredSet::catalog("circle", &[1.0]).unwrap(), &[0.3], 1e-5) < 1e-6);
        let line = DesiredSet::catalog("line", &[1.0, 2.0]).unwrap();
        for w in [-3.0, 0.0, 17.5] {
            assert!(check_derivatives(&line, &[w], 1e-3) < 1e-10);
        }
        let torus = DesiredSet::catalog("torus", &[2.0, 1.0]).unwrap();
        assert!(check_derivatives(&torus, &[0.1, 0.2], 1e-5) < 1e-6);
    }

    #[test]
    fn expression_sets_match_catalog() {
        let from_expr = DesiredSet::from_expressions(
            1,
            &[
                "15*sin(2*w)".into(),
                "30*sin(w)*sqrt(0.5*(1-0.5*sin(w)^2))".into(),
                "5+5*cos(2*w)-2".into(),
            ],
        )
        .unwrap();
        let cat = DesiredSet::catalog("bent_infinity", &[]).unwrap();
        for i in 0..50 {
            let w = -PI + 0.13 * i as f64;
            let a = from_expr.jet(&[w]);
            let b = cat.jet(&[w]);
            for j in 0..3 {
                assert!((a.value[j] - b.value[j]).abs() < 1e-12);
                assert!((a.d1[0][j] - b.d1[0][j]).abs() < 1e-11);
                assert!((a.d2(0, 0)[j] - b.d2(0, 0)[j]).abs() < 1e-10);
            }
        }
        let torus_expr = DesiredSet::from_expressions(
            2,
            &[
                "(2+cos(w1))*cos(w2)".into(),
                "(2+cos(w1))*sin(w2)".into(),
                "sin(w1)".into(),
            ],
        )
        .unwrap();
        let torus = DesiredSet::catalog("torus", &[2.0, 1.0]).unwrap();
        let (a, b) = (torus_expr.jet(&[0.4, 2.2]), torus.jet(&[0.4, 2.2]));
        for j in 0..3 {
            for (l, m) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                assert!((a.d2(l, m)[j] - b.d2(l, m)[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gain_validation() {
        assert!(GainSet::new(vec![1.0, 1.0], vec![1.0]).is_ok());
        assert!(GainSet::new(vec![1.0, 0.0], vec![1.0]).is_err());
        assert!(GainSet::new(vec![1.0], vec![-1.0]).is_err());
        let g = GainSet::uncoupled(vec![1.0], 2).unwrap();
        assert_eq!(g.k_c, vec![0.0, 0.0]);
    }
}
