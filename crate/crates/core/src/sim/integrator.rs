//! Fixed-step explicit integrators.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Euler,
    #[default]
    Rk4,
}

/// Advances `y` by one step of size `h`. `f(t, y)` returns the derivative;
/// the first stage may be supplied precomputed as `k1`.
pub fn step<E>(
    method: Integrator,
    t: f64,
    y: &[f64],
    h: f64,
    k1: Option<Vec<f64>>,
    mut f: impl FnMut(f64, &[f64]) -> Result<Vec<f64>, E>,
) -> Result<Vec<f64>, E> {
    let k1 = match k1 {
        Some(k) => k,
        None => f(t, y)?,
    };
    match method {
        Integrator::Euler => Ok(axpy(y, h, &k1)),
        Integrator::Rk4 => {
            let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
            let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
            let k4 = f(t + h, &axpy(y, h, &k3))?;
            Ok(y
                .iter()
                .enumerate()
                .map(|(i, yi)| yi + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect())
        }
    }
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_: f64, y: &[f64]) -> Result<Vec<f64>, ()> {
        Ok(vec![-y[0]])
    }

    #[test]
    fn orders_of_accuracy() {
        for (method, order) in [(Integrator::Euler, 1.0), (Integrator::Rk4, 4.0)] {
            let err = |h: f64| {
                let steps = (1.0 / h).round() as usize;
                let mut y = vec![1.0];
                for s in 0..steps {
                    y = step(method, s as f64 * h, &y, h, None, decay).unwrap();
                }
                (y[0] - (-1.0f64).exp()).abs()
            };
            let ratio = err(0.02) / err(0.01);
            let observed = ratio.log2();
            assert!((observed - order).abs() < 0.2, "{method:?}: {observed}");
        }
    }

    #[test]
    fn time_dependent_stages() {
        // y' = t has exact RK4 integral t²/2.
        let y = step(Integrator::Rk4, 1.0, &[0.5], 0.5, None, |t, _| Ok::<_, ()>(vec![t])).unwrap();
        assert!((y[0] - 1.125).abs() < 1e-15);
    }
}
