//! Counting-process semantics of grouped models.
//!
//! A model is represented by the counts of each derivative in each group.
//! Every aggregated CTMC transition is a [`TransitionClass`]: a jump vector
//! over those counts plus a symbolic rate function. Cooperation follows
//! bounded capacity: the rate of a shared action is the minimum of the two
//! sides' apparent rates, and is shared between the individual synchronising
//! transitions in proportion to their local fluxes.

pub mod derivatives;
pub mod rate;

use std::fmt::Write;
use std::ops::Range;

use crate::lang::validate::{System, ValidatedModel};
use derivatives::{explore_derivatives, DerivativeGraph};
pub use rate::RateExpr;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dim {
    pub group: String,
    pub derivative: String,
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.group, self.derivative)
    }
}

#[derive(Debug, Clone)]
pub struct GroupInfo {
    pub label: String,
    pub dims: Range<usize>,
    pub graph: DerivativeGraph,
}

/// Bijection between (group, derivative) pairs and count-vector positions.
#[derive(Debug, Clone)]
pub struct StateIndex {
    pub dims: Vec<Dim>,
    pub initial: Vec<i64>,
    pub total_population: i64,
    pub groups: Vec<GroupInfo>,
}

impl StateIndex {
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim_of(&self, group: &str, derivative: &str) -> Option<usize> {
        self.dims
            .iter()
            .position(|d| d.group == group && d.derivative == derivative)
    }

    pub fn group(&self, label: &str) -> Option<&GroupInfo> {
        self.groups.iter().find(|g| g.label == label)
    }

    /// `group:derivative` for every dimension.
    pub fn names(&self) -> Vec<String> {
        self.dims.iter().map(Dim::to_string).collect()
    }

    /// Initial counts as reals.
    pub fn initial_f64(&self) -> Vec<f64> {
        self.initial.iter().map(|&n| n as f64).collect()
    }
}

/// Dimensions ordered by group declaration, then breadth-first derivative
/// discovery from the group's initial members.
pub fn build_state_index(vm: &ValidatedModel) -> StateIndex {
    let mut dims = Vec::new();
    let mut initial = Vec::new();
    let mut groups = Vec::new();
    for (label, members) in vm.system.groups() {
        let starts: Vec<String> = members.iter().map(|(c, _)| c.clone()).collect();
        let graph = explore_derivatives(vm, &starts);
        let start = dims.len();
        for d in &graph.derivatives {
            dims.push(Dim {
                group: label.to_string(),
                derivative: d.name.clone(),
            });
            let count = members
                .iter()
                .find(|(c, _)| *c == d.name)
                .map_or(0, |(_, n)| *n as i64);
            initial.push(count);
        }
        groups.push(GroupInfo {
            label: label.to_string(),
            dims: start..dims.len(),
            graph,
        });
    }
    let total_population = initial.iter().sum();
    StateIndex {
        dims,
        initial,
        total_population,
        groups,
    }
}

/// One aggregated transition: firing adds `jump` to the count vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionClass {
    pub action: String,
    pub jump: Vec<i64>,
    pub rate: RateExpr,
}

/// Actions in order of first appearance over the dimensions.
fn actions_in_order(idx: &StateIndex) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for g in &idx.groups {
        for d in &g.graph.derivatives {
            for t in &d.transitions {
                if !out.contains(&t.action) {
                    out.push(t.action.clone());
                }
            }
        }
    }
    out
}

/// Total rate at which the subsystem `node` offers `action`.
pub fn apparent_rate(node: &System, action: &str, idx: &StateIndex) -> RateExpr {
    match node {
        System::Group { label, .. } => {
            let g = idx.group(label).expect("group indexed");
            let mut terms = Vec::new();
            for (offset, d) in g.graph.derivatives.iter().enumerate() {
                let r: f64 = d
                    .transitions
                    .iter()
                    .filter(|t| t.action == action)
                    .map(|t| t.rate)
                    .sum();
                if r > 0.0 {
                    terms.push((g.dims.start + offset, r));
                }
            }
            RateExpr::linear(terms)
        }
        System::Coop {
            left,
            actions,
            right,
        } => {
            let l = apparent_rate(left, action, idx);
            let r = apparent_rate(right, action, idx);
            if actions.iter().any(|a| a == action) {
                RateExpr::min(l, r)
            } else {
                RateExpr::sum(l, r)
            }
        }
    }
}

struct Candidate {
    jump: Vec<i64>,
    rate: RateExpr,
}

fn candidates(node: &System, action: &str, idx: &StateIndex) -> Vec<Candidate> {
    match node {
        System::Group { label, .. } => {
            let g = idx.group(label).expect("group indexed");
            let mut out = Vec::new();
            for (offset, d) in g.graph.derivatives.iter().enumerate() {
                for t in d.transitions.iter().filter(|t| t.action == action) {
                    let mut jump = vec![0; idx.len()];
                    jump[g.dims.start + offset] -= 1;
                    jump[g.dims.start + t.target] += 1;
                    out.push(Candidate {
                        jump,
                        rate: RateExpr::linear(vec![(g.dims.start + offset, t.rate)]),
                    });
                }
            }
            out
        }
        System::Coop {
            left,
            actions,
            right,
        } => {
            let mut l = candidates(left, action, idx);
            let r = candidates(right, action, idx);
            if !actions.iter().any(|a| a == action) {
                l.extend(r);
                return l;
            }
            if l.is_empty() || r.is_empty() {
                return Vec::new();
            }
            let al = apparent_rate(left, action, idx);
            let ar = apparent_rate(right, action, idx);
            let shared = RateExpr::min(al.clone(), ar.clone());
            let mut out = Vec::new();
            for cl in &l {
                for cr in &r {
                    let jump = cl.jump.iter().zip(&cr.jump).map(|(a, b)| a + b).collect();
                    let rate = RateExpr::product(
                        vec![
                            RateExpr::ratio(cl.rate.clone(), al.clone()),
                            RateExpr::ratio(cr.rate.clone(), ar.clone()),
                        ],
                        shared.clone(),
                    );
                    out.push(Candidate { jump, rate });
                }
            }
            out
        }
    }
}

/// All aggregated transitions of the model, grouped by action in order of
/// first appearance. Identical classes are kept separate.
pub fn enumerate_transition_classes(vm: &ValidatedModel, idx: &StateIndex) -> Vec<TransitionClass> {
    let mut out = Vec::new();
    for action in actions_in_order(idx) {
        for c in candidates(&vm.system, &action, idx) {
            out.push(TransitionClass {
                action: action.clone(),
                jump: c.jump,
                rate: c.rate,
            });
        }
    }
    out
}

/// True iff every class rate is free of rational prefactors.
pub fn is_split_free(classes: &[TransitionClass]) -> bool {
    classes.iter().all(|c| !c.rate.contains_ratio())
}

/// `f(v) = Σ_k f^k(v) l^k` with like terms merged.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub rows: Vec<RateExpr>,
}

impl VectorField {
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.eval(x)).collect()
    }
}

pub fn build_vector_field(classes: &[TransitionClass], idx: &StateIndex) -> VectorField {
    let rows = (0..idx.len())
        .map(|i| {
            let mut linear: Vec<(usize, f64)> = Vec::new();
            let mut others: Vec<(RateExpr, f64)> = Vec::new();
            for c in classes {
                let l = c.jump[i];
                if l == 0 {
                    continue;
                }
                let (k, core) = c.rate.split_scale();
                let coef = k * l as f64;
                if let RateExpr::Linear(t) = core {
                    linear.extend(t.iter().map(|(d, v)| (*d, v * coef)));
                } else if let Some(entry) = others.iter_mut().find(|(e, _)| e == core) {
                    entry.1 += coef;
                } else {
                    others.push((core.clone(), coef));
                }
            }
            let mut row = RateExpr::linear(linear);
            for (e, coef) in others {
                if coef != 0.0 {
                    row = RateExpr::sum(row, RateExpr::scale(coef, e));
                }
            }
            row
        })
        .collect();
    VectorField { rows }
}

/// One line per class: `k: action l=[..] rate=<expr>`.
pub fn dump_classes(classes: &[TransitionClass], idx: &StateIndex) -> String {
    let names = idx.names();
    let mut out = String::new();
    for (k, c) in classes.iter().enumerate() {
        let l: Vec<String> = c.jump.iter().map(i64::to_string).collect();
        let _ = writeln!(
            out,
            "{}: {} l=[{}] rate={}",
            k + 1,
            c.action,
            l.join(", "),
            c.rate.display(&names)
        );
    }
    out
}
