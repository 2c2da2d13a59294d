use std::collections::HashMap;

use crate::moments::gaussian::gaussian_moment;
use crate::moments::{MomentIndex, MomentSystem, Mode, Unknown};
use crate::numerics::{DataSet, SourceKind};
use crate::{GpaError, Result};

/// Raw-moment series of one analysis, looked up by monomial.
///
/// Closure and simulation results store moments directly; linear-noise
/// results derive them from means and covariances under the Gaussian
/// approximation.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub kind: SourceKind,
    pub times: Vec<f64>,
    names: Vec<String>,
    values: HashMap<MomentIndex, Vec<f64>>,
    gaussian: Option<Gaussian>,
}

#[derive(Debug, Clone)]
struct Gaussian {
    /// Per grid point: means, then the upper-triangular covariances.
    states: Vec<Vec<f64>>,
    dims: usize,
}

impl Gaussian {
    fn moment(&self, m: &MomentIndex) -> Vec<f64> {
        let n = self.dims;
        self.states
            .iter()
            .map(|s| {
                let cov = |i: usize, j: usize| {
                    let (i, j) = (i.min(j), i.max(j));
                    s[n + i * n - i * (i + 1) / 2 + j]
                };
                gaussian_moment(m, &s[..n], &cov)
            })
            .collect()
    }
}

impl MomentTable {
    /// Table over the trajectory of an integrated moment system.
    pub fn from_system(sys: &MomentSystem, data: &DataSet, dim_names: Vec<String>) -> Self {
        match sys.mode {
            Mode::Closure { .. } => {
                let values = sys
                    .unknowns
                    .iter()
                    .zip(&data.columns)
                    .filter_map(|(u, s)| match u {
                        Unknown::Moment(m) => Some((m.clone(), s.values.clone())),
                        Unknown::Covariance(..) => None,
                    })
                    .collect();
                MomentTable {
                    kind: data.kind,
                    times: data.times.clone(),
                    names: dim_names,
                    values,
                    gaussian: None,
                }
            }
            Mode::Lna => {
                let states = (0..data.times.len())
                    .map(|j| data.columns.iter().map(|c| c.values[j]).collect())
                    .collect();
                MomentTable {
                    kind: data.kind,
                    times: data.times.clone(),
                    gaussian: Some(Gaussian {
                        states,
                        dims: dim_names.len(),
                    }),
                    names: dim_names,
                    values: HashMap::new(),
                }
            }
        }
    }

    /// Table whose columns are raw moments in the order of `moments`.
    pub fn from_moments(moments: &[MomentIndex], data: &DataSet, dim_names: Vec<String>) -> Self {
        MomentTable {
            kind: data.kind,
            times: data.times.clone(),
            names: dim_names,
            values: moments
                .iter()
                .cloned()
                .zip(data.columns.iter().map(|c| c.values.clone()))
                .collect(),
            gaussian: None,
        }
    }

    pub fn dim_names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn get(&mut self, m: &MomentIndex) -> Result<&[f64]> {
        if m.is_one() {
            let len = self.times.len();
            return Ok(self.values.entry(m.clone()).or_insert_with(|| vec![1.0; len]));
        }
        if !self.values.contains_key(m) {
            let Some(g) = &self.gaussian else {
                return Err(GpaError::MissingMoment(m.label(&self.names)));
            };
            let series = g.moment(m);
            self.values.insert(m.clone(), series);
        }
        Ok(&self.values[m])
    }
}
