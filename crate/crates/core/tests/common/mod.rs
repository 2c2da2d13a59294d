//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

/// Explicit CTMC over integer count vectors.
pub struct Ctmc {
    pub states: Vec<Vec<i64>>,
    /// Outgoing `(target, rate)` per state.
    pub transitions: Vec<Vec<(usize, f64)>>,
}

impl Ctmc {
    /// Breadth-first state space of `step` from `init`.
    pub fn explore(init: Vec<i64>, step: impl Fn(&[i64]) -> Vec<(Vec<i64>, f64)>) -> Self {
        let mut index = HashMap::new();
        let mut states = vec![init.clone()];
        index.insert(init, 0);
        let mut transitions = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let mut out = Vec::new();
            for (t, r) in step(&states[i].clone()) {
                if r <= 0.0 {
                    continue;
                }
                let j = *index.entry(t.clone()).or_insert_with(|| {
                    states.push(t);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                });
                out.push((j, r));
            }
            if transitions.len() <= i {
                transitions.resize(i + 1, Vec::new());
            }
            transitions[i] = out;
        }
        transitions.resize(states.len(), Vec::new());
        Ctmc { states, transitions }
    }

    /// Transient distributions at `times` (ascending, starting at 0) by
    /// uniformization, started in state 0.
    pub fn transient(&self, times: &[f64]) -> Vec<Vec<f64>> {
        let n = self.states.len();
        let exit: Vec<f64> = self.transitions.iter().map(|t| t.iter().map(|(_, r)| r).sum()).collect();
        let lambda = exit.iter().cloned().fold(0.0, f64::max).max(1e-12) * 1.05;
        let mut p = vec![0.0; n];
        p[0] = 1.0;
        let mut out = Vec::with_capacity(times.len());
        let mut now = 0.0;
        for &t in times {
            let mut remaining = t - now;
            // Keep each uniformization window short so the Poisson weights stay tame.
            while remaining > 1e-15 {
                let dt = remaining.min(2.0 / lambda);
                p = self.uniformize(&p, dt, lambda, &exit);
                remaining -= dt;
            }
            now = t;
            out.push(p.clone());
        }
        out
    }

    fn uniformize(&self, p0: &[f64], dt: f64, lambda: f64, exit: &[f64]) -> Vec<f64> {
        let n = p0.len();
        let lt = lambda * dt;
        let mut weight = (-lt).exp();
        let mut term = p0.to_vec();
        let mut acc: Vec<f64> = term.iter().map(|v| v * weight).collect();
        let mut total = weight;
        let mut k = 0;
        while 1.0 - total > 1e-15 && k < 1000 {
            k += 1;
            let mut next = vec![0.0; n];
            for i in 0..n {
                next[i] += term[i] * (1.0 - exit[i] / lambda);
                for &(j, r) in &self.transitions[i] {
                    next[j] += term[i] * r / lambda;
                }
            }
            term = next;
            weight *= lt / k as f64;
            total += weight;
            for i in 0..n {
                acc[i] += weight * term[i];
            }
        }
        acc
    }

    pub fn expect(&self, p: &[f64], f: impl Fn(&[i64]) -> f64) -> f64 {
        self.states.iter().zip(p).map(|(s, w)| w * f(s)).sum()
    }
}

/// Processor/resource aggregated CTMC over `(P0, P1, R0, R1)`.
pub fn processor_resource(m: i64, n: i64, r1: f64, q: f64, r2: f64, s: f64) -> Ctmc {
    Ctmc::explore(vec![m, 0, n, 0], |x| {
        vec![
            (vec![x[0] - 1, x[1] + 1, x[2] - 1, x[3] + 1], (r1 * x[0] as f64).min(r2 * x[2] as f64)),
            (vec![x[0] + 1, x[1] - 1, x[2], x[3]], q * x[1] as f64),
            (vec![x[0], x[1], x[2] + 1, x[3] - 1], s * x[3] as f64),
        ]
    })
}

pub fn processor_resource_model(m: i64, n: i64, r1: f64, q: f64, r2: f64, s: f64) -> String {
    format!(
        "r1 = {r1}; q = {q}; r2 = {r2}; s = {s}; m = {m}; n = {n};
         Processor0 = (acquire, r1).Processor1; Processor1 = (task, q).Processor0;
         Resource0 = (acquire, r2).Resource1; Resource1 = (reset, s).Resource0;
         Processors{{Processor0[m]}} <acquire> Resources{{Resource0[n]}}"
    )
}

/// Client/server rates `[r_req, r_break, r_think, r_data, r_reset]`.
pub const MODEL_A: [f64; 5] = [2.0, 0.1, 0.2, 1.0, 2.0];
pub const MODEL_B: [f64; 5] = [2.0, 0.3, 0.35, 2.0, 0.05];

pub fn client_server_model(r: [f64; 5], c: i64, s: i64) -> String {
    let [r_req, r_break, r_think, r_data, r_reset] = r;
    format!(
        "r_req = {r_req}; r_break = {r_break}; r_think = {r_think}; r_data = {r_data}; r_reset = {r_reset};
         c = {c}; s = {s};
         Client = (request, r_req).Client_waiting;
         Client_waiting = (data, r_data).Client_think;
         Client_think = (think, r_think).Client;
         Server = (request, r_req).Server_get + (break, r_break).Server_broken;
         Server_get = (data, r_data).Server;
         Server_broken = (reset, r_reset).Server;
         Clients{{Client[c]}} <request, data> Servers{{Server[s]}}"
    )
}

/// The client/server vector field written out by hand, over
/// `(C, C_w, C_t, S, S_g, S_b)`.
pub fn client_server_field(r: [f64; 5], v: &[f64]) -> [f64; 6] {
    let [rq, rb, rt, rd, rr] = r;
    let req = v[3].min(v[0]) * rq;
    let data = v[1].min(v[4]) * rd;
    [
        -req + v[2] * rt,
        -data + req,
        -v[2] * rt + data,
        -req - v[3] * rb + data + v[5] * rr,
        -data + req,
        -v[5] * rr + v[3] * rb,
    ]
}

/// Client/server transition table: jump vectors and rates.
pub fn client_server_classes(r: [f64; 5], v: &[f64]) -> Vec<([i64; 6], f64)> {
    let [rq, rb, rt, rd, rr] = r;
    vec![
        ([-1, 1, 0, -1, 1, 0], v[0].min(v[3]) * rq),
        ([0, -1, 1, 1, -1, 0], v[1].min(v[4]) * rd),
        ([1, 0, -1, 0, 0, 0], v[2] * rt),
        ([0, 0, 0, -1, 0, 1], v[3] * rb),
        ([0, 0, 0, 1, 0, -1], v[5] * rr),
    ]
}

/// Zeros of `v_C - v_S` from the hand-written client/server mean ODEs,
/// integrated with a fine fixed-step RK4.
pub fn client_server_crossings(r: [f64; 5], c: f64, s: f64, stop_time: f64) -> Vec<f64> {
    let h = 1e-4;
    let mut v = [c, 0.0, 0.0, s, 0.0, 0.0];
    let mut out = Vec::new();
    let add = |x: &[f64; 6], k: &[f64; 6], a: f64| std::array::from_fn::<f64, 6, _>(|j| x[j] + a * k[j]);
    for i in 0..(stop_time / h).round() as usize {
        let k1 = client_server_field(r, &v);
        let k2 = client_server_field(r, &add(&v, &k1, h / 2.0));
        let k3 = client_server_field(r, &add(&v, &k2, h / 2.0));
        let k4 = client_server_field(r, &add(&v, &k3, h));
        let next: [f64; 6] = std::array::from_fn(|j| v[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        let (d0, d1) = (v[0] - v[3], next[0] - next[3]);
        if d0 != 0.0 && (d0 < 0.0) != (d1 < 0.0) {
            out.push(i as f64 * h + h * d0 / (d0 - d1));
        }
        v = next;
    }
    out
}
