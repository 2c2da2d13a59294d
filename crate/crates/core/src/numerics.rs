//! Uniform output grids and fixed-step Runge–Kutta integration.

use crate::moments::MomentSystem;
use crate::{GpaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Odes,
    Simulation,
    Comparison,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

/// Values of named quantities on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    pub kind: SourceKind,
    pub times: Vec<f64>,
    pub columns: Vec<Series>,
}

impl DataSet {
    pub fn column(&self, label: &str) -> Option<&Series> {
        self.columns.iter().find(|s| s.label == label)
    }
}

/// Number of grid points `floor(stop / step) + 1`, tolerant of the
/// representation error in quotients such as `3.0 / 0.001`.
pub fn grid_len(stop_time: f64, step_size: f64) -> usize {
    let q = stop_time / step_size;
    let r = q.round();
    let steps = if (q - r).abs() <= 1e-9 * r.max(1.0) { r } else { q.floor() };
    steps as usize + 1
}

pub fn grid(stop_time: f64, step_size: f64) -> Vec<f64> {
    (0..grid_len(stop_time, step_size))
        .map(|j| j as f64 * step_size)
        .collect()
}

/// Classic fourth-order Runge–Kutta with `density` internal steps per grid
/// interval. Returns one column per unknown.
pub fn integrate_rk4(
    sys: &MomentSystem,
    init: &[f64],
    stop_time: f64,
    step_size: f64,
    density: u64,
) -> Result<DataSet> {
    assert_eq!(init.len(), sys.len(), "initial state length");
    let times = grid(stop_time, step_size);
    let states = rk4(|x, out| sys.eval_rhs(x, out), init, &times, step_size, density)?;
    let columns = sys
        .names
        .iter()
        .enumerate()
        .map(|(i, label)| Series {
            label: label.clone(),
            values: states.iter().map(|s| s[i]).collect(),
        })
        .collect();
    Ok(DataSet {
        kind: SourceKind::Odes,
        times,
        columns,
    })
}

/// States at every grid time, integrating `x' = f(x)`.
pub fn rk4(
    f: impl Fn(&[f64], &mut [f64]),
    init: &[f64],
    times: &[f64],
    step_size: f64,
    density: u64,
) -> Result<Vec<Vec<f64>>> {
    let n = init.len();
    let h = step_size / density.max(1) as f64;
    let mut x = init.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut out = Vec::with_capacity(times.len());
    out.push(x.clone());
    for (j, _) in times.iter().enumerate().skip(1) {
        for s in 0..density.max(1) {
            f(&x, &mut k1);
            for i in 0..n {
                tmp[i] = x[i] + 0.5 * h * k1[i];
            }
            f(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = x[i] + 0.5 * h * k2[i];
            }
            f(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = x[i] + h * k3[i];
            }
            f(&tmp, &mut k4);
            for i in 0..n {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if x.iter().any(|v| !v.is_finite()) {
                let time = (j - 1) as f64 * step_size + (s + 1) as f64 * h;
                return Err(GpaError::NonFinite { time });
            }
        }
        out.push(x.clone());
    }
    Ok(out)
}
