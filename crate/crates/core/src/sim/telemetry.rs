//! Recorded frames and their CSV form.
//!
//! `telemetry.csv` is in long format, one row per robot per frame:
//! `t, robot, x1..xn, w1[, w2][, theta], phi1..phin, V, hmin, <inputs>`.
//! `diagnostics.csv` has one row per frame with the composite error, the
//! Lyapunov value and rate, the minimum safety value and every edge error.
//! Floats are written with 17 significant digits so they re-read exactly.

use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub t: f64,
    /// Generalized state `(x, w)` per robot.
    pub states: Vec<Vec<f64>>,
    /// Heading per robot (Dubins model), wrapped to `(−π, π]`.
    pub headings: Option<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
    /// Per parameter, per edge coordination error.
    pub coord_err: Vec<Vec<f64>>,
    pub composite_norm: f64,
    pub v: f64,
    /// Closed-form Lyapunov rate, when it applies to the scenario.
    pub v_dot: Option<f64>,
    pub h_min: Option<f64>,
    /// Per-robot control quantities; see [`input_names`].
    pub inputs: Vec<Vec<f64>>,
    /// Names of the events raised since the previous frame.
    pub flags: Vec<String>,
}

impl Frame {
    pub fn max_phi_norm(&self) -> f64 {
        self.phi
            .iter()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn max_coord_err(&self) -> f64 {
        self.coord_err
            .iter()
            .flatten()
            .map(|e| e.abs())
            .fold(0.0, f64::max)
    }
}

/// Column names of the per-robot inputs. Single integrators record the
/// applied field; Dubins vehicles record their commands and heading terms.
pub fn input_names(n: usize, k: usize, dubins: bool) -> Vec<String> {
    if dubins {
        let mut names = vec!["u_theta".to_string(), "u_z".to_string()];
        names.extend((1..=k).map(|m| format!("wdot{m}")));
        names.extend(
            ["theta_dot_d", "sigma", "chip1", "chip2", "chipdot1", "chipdot2"]
                .iter()
                .map(|s| s.to_string()),
        );
        names
    } else {
        (1..=n + k).map(|q| format!("chi{q}")).collect()
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

/// Header of `telemetry.csv`.
pub fn telemetry_header(n: usize, k: usize, dubins: bool) -> Vec<String> {
    let mut h = vec!["t".to_string(), "robot".to_string()];
    h.extend((1..=n).map(|j| format!("x{j}")));
    h.extend((1..=k).map(|m| format!("w{m}")));
    if dubins {
        h.push("theta".into());
    }
    h.extend((1..=n).map(|j| format!("phi{j}")));
    h.push("V".into());
    h.push("hmin".into());
    h.extend(input_names(n, k, dubins));
    h
}

pub fn write_telemetry<W: Write>(out: W, frames: &[Frame], n: usize, k: usize, dubins: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("writing telemetry: {e}"));
    w.write_record(telemetry_header(n, k, dubins)).map_err(io)?;
    for f in frames {
        for (i, xi) in f.states.iter().enumerate() {
            let mut row = vec![fmt(f.t), (i + 1).to_string()];
            row.extend(xi.iter().map(|v| fmt(*v)));
            if dubins {
                row.push(fmt(f.headings.as_ref().map_or(f64::NAN, |h| h[i])));
            }
            row.extend(f.phi[i].iter().map(|v| fmt(*v)));
            row.push(fmt(f.v));
            row.push(fmt_opt(f.h_min));
            row.extend(f.inputs[i].iter().map(|v| fmt(*v)));
            w.write_record(&row).map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::Config(format!("writing telemetry: {e}")))?;
    Ok(())
}

/// Header of `diagnostics.csv`.
pub fn diagnostics_header(k: usize, edges: &[(usize, usize)]) -> Vec<String> {
    let mut h: Vec<String> = ["t", "composite_error", "V", "V_dot", "hmin", "max_phi", "max_coord_err"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for m in 1..=k {
        h.extend(edges.iter().map(|(a, b)| format!("e{m}_{a}_{b}")));
    }
    h
}

pub fn write_diagnostics<W: Write>(out: W, frames: &[Frame], k: usize, edges: &[(usize, usize)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("writing diagnostics: {e}"));
    w.write_record(diagnostics_header(k, edges)).map_err(io)?;
    for f in frames {
        let mut row = vec![
            fmt(f.t),
            fmt(f.composite_norm),
            fmt(f.v),
            fmt_opt(f.v_dot),
            fmt_opt(f.h_min),
            fmt(f.max_phi_norm()),
            fmt(f.max_coord_err()),
        ];
        row.extend(f.coord_err.iter().flatten().map(|v| fmt(*v)));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing diagnostics: {e}")))?;
    Ok(())
}

/// Re-reads `telemetry.csv` into frames. Coordination errors, composite
/// norms and rates are not part of this file and come back empty.
pub fn read_telemetry<R: Read>(input: R, n: usize, k: usize, dubins: bool) -> Result<Vec<Frame>> {
    let mut r = csv::Reader::from_reader(input);
    let bad = |msg: String| Error::Config(format!("reading telemetry: {msg}"));
    let header: Vec<String> = r
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    if header != telemetry_header(n, k, dubins) {
        return Err(bad("unexpected header".into()));
    }
    let n_inputs = input_names(n, k, dubins).len();
    let mut frames: Vec<Frame> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let parse = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}"))) };
        let vals: Vec<&str> = rec.iter().collect();
        let t = parse(vals[0])?;
        let mut pos = 2;
        let mut take = |count: usize| -> Result<Vec<f64>> {
            let out = vals[pos..pos + count].iter().map(|s| parse(s)).collect();
            pos += count;
            out
        };
        let xi = take(n + k)?;
        let heading = if dubins { Some(take(1)?[0]) } else { None };
        let phi = take(n)?;
        let v = take(1)?[0];
        let h_raw = vals[2 + n + k + usize::from(dubins) + n + 1];
        let h_min = if h_raw.is_empty() { None } else { Some(parse(h_raw)?) };
        let start = 2 + n + k + usize::from(dubins) + n + 2;
        let inputs = vals[start..start + n_inputs]
            .iter()
            .map(|s| parse(s))
            .collect::<Result<Vec<_>>>()?;
        let new_frame = frames.last().is_none_or(|f| f.t != t);
        if new_frame {
            frames.push(Frame {
                t,
                states: Vec::new(),
                headings: dubins.then(Vec::new),
                phi: Vec::new(),
                coord_err: Vec::new(),
                composite_norm: f64::NAN,
                v,
                v_dot: None,
                h_min,
                inputs: Vec::new(),
                flags: Vec::new(),
            });
        }
        let f = frames.last_mut().expect("frame pushed");
        f.states.push(xi);
        if let (Some(hs), Some(h)) = (f.headings.as_mut(), heading) {
            hs.push(h);
        }
        f.phi.push(phi);
        f.inputs.push(inputs);
    }
    Ok(frames)
}
