//! Gillespie simulation of the aggregated CTMC.
//!
//! Replication `r` draws from a ChaCha8 stream selected by `r` under the
//! master seed, and replications are summed in fixed-size chunks merged in
//! replication order, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::moments::MomentIndex;
use crate::numerics::{grid, DataSet, Series, SourceKind};
use crate::semantics::{StateIndex, TransitionClass};
use crate::{GpaError, Result};

const CHUNK: usize = 64;

pub fn replication_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// Compact form of the transition classes for repeated evaluation.
struct Compiled<'a> {
    classes: &'a [TransitionClass],
    jumps: Vec<Vec<(usize, i64)>>,
}

impl<'a> Compiled<'a> {
    fn new(classes: &'a [TransitionClass]) -> Self {
        let jumps = classes
            .iter()
            .map(|c| {
                c.jump
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| **l != 0)
                    .map(|(d, l)| (d, *l))
                    .collect()
            })
            .collect();
        Compiled { classes, jumps }
    }
}

/// Exact propensities of every class at an integer state.
pub fn propensities(classes: &[TransitionClass], state: &[i64]) -> Vec<f64> {
    let x: Vec<f64> = state.iter().map(|v| *v as f64).collect();
    classes.iter().map(|c| c.rate.eval(&x)).collect()
}

/// One SSA path sampled at `times` with the càdlàg convention: the value at
/// `t_j` is the state after the last jump at or before `t_j`.
pub fn simulate_replication(
    classes: &[TransitionClass],
    init: &[i64],
    times: &[f64],
    rng: &mut impl Rng,
) -> Result<Vec<Vec<i64>>> {
    let compiled = Compiled::new(classes);
    let mut path = Vec::with_capacity(times.len());
    simulate(&compiled, init, times, rng, |s| path.push(s.to_vec()))?;
    Ok(path)
}

fn simulate(
    sim: &Compiled,
    init: &[i64],
    times: &[f64],
    rng: &mut impl Rng,
    mut record: impl FnMut(&[i64]),
) -> Result<()> {
    let mut state = init.to_vec();
    let mut x: Vec<f64> = state.iter().map(|v| *v as f64).collect();
    let mut props = vec![0.0; sim.classes.len()];
    let mut t = 0.0;
    let mut next = 0;
    while next < times.len() {
        let mut total = 0.0;
        for (k, (p, c)) in props.iter_mut().zip(sim.classes).enumerate() {
            *p = c.rate.eval(&x);
            if !(*p >= 0.0 && p.is_finite()) {
                return Err(GpaError::BadPropensity {
                    class: k + 1,
                    value: *p,
                    time: t,
                });
            }
            total += *p;
        }
        let t_next = if total > 0.0 {
            let u: f64 = rng.random();
            t - (1.0 - u).ln() / total
        } else {
            f64::INFINITY
        };
        while next < times.len() && times[next] < t_next {
            record(&state);
            next += 1;
        }
        if next == times.len() {
            break;
        }
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = props.len() - 1;
        for (k, p) in props.iter().enumerate() {
            acc += p;
            if target < acc {
                chosen = k;
                break;
            }
        }
        // Guard against rounding selecting a class with zero propensity.
        while props[chosen] == 0.0 {
            chosen -= 1;
        }
        for &(d, l) in &sim.jumps[chosen] {
            state[d] += l;
            x[d] = state[d] as f64;
        }
        t = t_next;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub stop_time: f64,
    pub step_size: f64,
    pub replications: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

/// Replication-averaged raw moments on the output grid, one column per
/// requested monomial, labelled with [`MomentIndex::label`].
pub fn run_simulation(
    classes: &[TransitionClass],
    idx: &StateIndex,
    cfg: &SimulationConfig,
    moments: &[MomentIndex],
) -> Result<DataSet> {
    let times = grid(cfg.stop_time, cfg.step_size);
    let sim = Compiled::new(classes);
    let width = moments.len();
    let cells = times.len() * width;
    let reps = cfg.replications as usize;
    let chunks: Vec<(usize, usize)> = (0..reps)
        .step_by(CHUNK)
        .map(|s| (s, (s + CHUNK).min(reps)))
        .collect();

    let run_chunk = |&(start, end): &(usize, usize)| -> Result<Vec<f64>> {
        let mut sums = vec![0.0; cells];
        for r in start..end {
            let mut rng = replication_rng(cfg.seed, r as u64);
            let mut j = 0;
            simulate(&sim, &idx.initial, &times, &mut rng, |s| {
                for (m, slot) in moments.iter().zip(&mut sums[j * width..(j + 1) * width]) {
                    *slot += m.eval_int(s);
                }
                j += 1;
            })?;
        }
        Ok(sums)
    };

    let partials: Vec<Result<Vec<f64>>> = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| GpaError::Unsupported(format!("cannot start worker threads: {e}")))?
            .install(|| chunks.par_iter().map(run_chunk).collect()),
        None => chunks.par_iter().map(run_chunk).collect(),
    };
    let mut totals = vec![0.0; cells];
    for p in partials {
        for (t, v) in totals.iter_mut().zip(p?) {
            *t += v;
        }
    }

    let names = idx.names();
    let columns = moments
        .iter()
        .enumerate()
        .map(|(i, m)| Series {
            label: m.label(&names),
            values: (0..times.len())
                .map(|j| totals[j * width + i] / reps as f64)
                .collect(),
        })
        .collect();
    Ok(DataSet {
        kind: SourceKind::Simulation,
        times,
        columns,
    })
}
