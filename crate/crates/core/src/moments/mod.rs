//! Moment ODE systems: min-closure of the raw-moment hierarchy and the
//! linear noise approximation.

mod closure;
pub mod expr;
pub mod gaussian;
mod lna;
pub mod monomial;
mod switch;

use std::collections::HashMap;
use std::fmt::Write;

use crate::lang::ast::{CommandKind, MomentExpr};
use crate::semantics::{RateExpr, StateIndex};
pub use closure::generate_moment_odes;
pub use expr::{Expr, Terms};
pub use lna::generate_lna_odes;
pub use monomial::{all_moments, binomial, MomentIndex};
pub use switch::{collect_min_terms, MinTerm};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Unknown {
    Moment(MomentIndex),
    /// Covariance of two dimensions, stored with `i <= j`.
    Covariance(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Closure { order: u32 },
    Lna,
}

#[derive(Debug, Clone)]
pub struct MomentSystem {
    pub mode: Mode,
    pub unknowns: Vec<Unknown>,
    pub rhs: Vec<Expr>,
    /// Display names of the unknowns.
    pub names: Vec<String>,
    index: HashMap<Unknown, usize>,
}

impl MomentSystem {
    fn new(mode: Mode, unknowns: Vec<Unknown>, rhs: Vec<Expr>, dim_names: &[String]) -> Self {
        let names = unknowns
            .iter()
            .map(|u| match u {
                Unknown::Moment(m) => m.label(dim_names),
                Unknown::Covariance(i, j) => format!("Cov[{},{}]", dim_names[*i], dim_names[*j]),
            })
            .collect();
        let index = unknowns.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        MomentSystem {
            mode,
            unknowns,
            rhs,
            names,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    pub fn index_of(&self, u: &Unknown) -> Option<usize> {
        self.index.get(u).copied()
    }

    pub fn moment_index(&self, m: &MomentIndex) -> Option<usize> {
        self.index_of(&Unknown::Moment(m.clone()))
    }

    pub fn covariance_index(&self, i: usize, j: usize) -> Option<usize> {
        self.index_of(&Unknown::Covariance(i.min(j), i.max(j)))
    }

    /// Deterministic start: raw moments are products of the initial counts
    /// and covariances vanish.
    pub fn initial_state(&self, idx: &StateIndex) -> Vec<f64> {
        let x0 = idx.initial_f64();
        self.unknowns
            .iter()
            .map(|u| match u {
                Unknown::Moment(m) => m.eval(&x0),
                Unknown::Covariance(..) => 0.0,
            })
            .collect()
    }

    pub fn eval_rhs(&self, x: &[f64], out: &mut [f64]) {
        for (o, e) in out.iter_mut().zip(&self.rhs) {
            *o = e.eval(x);
        }
    }

    /// One `d/dt <unknown> = <expr>` line per unknown.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (name, e) in self.names.iter().zip(&self.rhs) {
            let _ = writeln!(out, "d/dt {name} = {}", e.display(&self.names));
        }
        out
    }
}

/// A class rate with every count replaced by its mean unknown.
pub(crate) fn rate_at(r: &RateExpr, var: &impl Fn(usize) -> usize) -> Expr {
    match r {
        RateExpr::Const(c) => Expr::Const(*c),
        RateExpr::Linear(t) => {
            let mut terms = Terms::new();
            for (d, c) in t {
                terms.add(Expr::Var(var(*d)), *c);
            }
            terms.build()
        }
        RateExpr::Min(a, b) => Expr::Min(Box::new(rate_at(a, var)), Box::new(rate_at(b, var))),
        RateExpr::Scale(c, e) => Expr::scale(*c, rate_at(e, var)),
        RateExpr::Sum(es) => {
            let mut terms = Terms::new();
            for e in es {
                terms.add(rate_at(e, var), 1.0);
            }
            terms.build()
        }
        RateExpr::Mul(es) => Expr::mul(es.iter().map(|e| rate_at(e, var)).collect()),
        RateExpr::Ratio(n, d) => Expr::Ratio(Box::new(rate_at(n, var)), Box::new(rate_at(d, var))),
    }
}

/// Highest raw-moment order needed to evaluate the given commands.
pub fn required_order<'a>(commands: impl IntoIterator<Item = &'a CommandKind>) -> u32 {
    fn expr_order(e: &MomentExpr) -> u32 {
        match e {
            MomentExpr::Number(_) | MomentExpr::Param(_) => 0,
            MomentExpr::Expectation(ms) => ms
                .iter()
                .map(|m| m.factors.iter().map(|(_, a)| a).sum::<u32>())
                .max()
                .unwrap_or(0),
            MomentExpr::Variance(_) | MomentExpr::Covariance(..) => 2,
            MomentExpr::Central {
                order, standardised, ..
            } => {
                if *standardised {
                    (*order).max(2)
                } else {
                    *order
                }
            }
            MomentExpr::Binary { left, right, .. } => expr_order(left).max(expr_order(right)),
        }
    }
    commands
        .into_iter()
        .map(|c| match c {
            CommandKind::Plot(es) => es.iter().map(expr_order).max().unwrap_or(0),
            CommandKind::PlotSwitchpoints(k) => u32::try_from(*k).unwrap_or(u32::MAX),
        })
        .max()
        .unwrap_or(0)
        .max(1)
}
