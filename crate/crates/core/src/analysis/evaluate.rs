use std::collections::{BTreeMap, BTreeSet};

use super::table::MomentTable;
use crate::lang::ast::{BinOp, GcPair, Moment, MomentExpr};
use crate::lang::printer;
use crate::moments::{binomial, MomentIndex};
use crate::numerics::Series;
use crate::semantics::StateIndex;
use crate::{GpaError, Result};

/// Name resolution for moment expressions.
#[derive(Debug, Clone, Copy)]
pub struct Scope<'a> {
    pub idx: &'a StateIndex,
    pub parameters: &'a BTreeMap<String, f64>,
}

impl Scope<'_> {
    pub fn dim(&self, p: &GcPair) -> Result<usize> {
        self.idx
            .dim_of(&p.group, &p.component)
            .ok_or_else(|| GpaError::MissingMoment(format!("E[{p}]")))
    }

    fn moment(&self, m: &Moment) -> Result<MomentIndex> {
        let factors = m
            .factors
            .iter()
            .map(|(p, a)| Ok((self.dim(p)?, *a)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MomentIndex::new(factors))
    }

    fn sum(&self, pairs: &[GcPair]) -> Result<Vec<usize>> {
        pairs.iter().map(|p| self.dim(p)).collect()
    }
}

/// Raw moments read by [`evaluate_expression`] for `e`.
pub fn needed_moments(e: &MomentExpr, scope: Scope, out: &mut BTreeSet<MomentIndex>) -> Result<()> {
    match e {
        MomentExpr::Number(_) | MomentExpr::Param(_) => {}
        MomentExpr::Expectation(ms) => {
            for m in ms {
                out.insert(scope.moment(m)?);
            }
        }
        MomentExpr::Variance(ps) => {
            let dims = scope.sum(ps)?;
            for &a in &dims {
                out.insert(MomentIndex::dim(a));
                for &b in &dims {
                    out.insert(MomentIndex::new([(a, 1), (b, 1)]));
                }
            }
        }
        MomentExpr::Covariance(a, b) => {
            let (a, b) = (scope.dim(a)?, scope.dim(b)?);
            out.insert(MomentIndex::dim(a));
            out.insert(MomentIndex::dim(b));
            out.insert(MomentIndex::new([(a, 1), (b, 1)]));
        }
        MomentExpr::Central {
            pair,
            order,
            standardised,
        } => {
            let d = scope.dim(pair)?;
            let top = if *standardised { (*order).max(2) } else { *order };
            for j in 1..=top {
                out.insert(MomentIndex::new([(d, j)]));
            }
        }
        MomentExpr::Binary { left, right, .. } => {
            needed_moments(left, scope, out)?;
            needed_moments(right, scope, out)?;
        }
    }
    Ok(())
}

fn zip(a: Vec<f64>, b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.into_iter().zip(b).map(|(x, y)| f(x, *y)).collect()
}

fn variance(table: &mut MomentTable, dims: &[usize]) -> Result<Vec<f64>> {
    let mut mean = vec![0.0; table.len()];
    let mut square = vec![0.0; table.len()];
    for &a in dims {
        mean = zip(mean, table.get(&MomentIndex::dim(a))?, |x, y| x + y);
        for &b in dims {
            square = zip(square, table.get(&MomentIndex::new([(a, 1), (b, 1)]))?, |x, y| x + y);
        }
    }
    Ok(zip(square, &mean, |s, m| s - m * m))
}

fn central(table: &mut MomentTable, d: usize, n: u32) -> Result<Vec<f64>> {
    let mean = table.get(&MomentIndex::dim(d))?.to_vec();
    let mut out = vec![0.0; table.len()];
    for j in 0..=n {
        let c = binomial(n, j) as f64 * if (n - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let raw = table.get(&MomentIndex::new([(d, j)]))?;
        for ((o, r), m) in out.iter_mut().zip(raw).zip(&mean) {
            *o += c * r * m.powi((n - j) as i32);
        }
    }
    Ok(out)
}

fn divide(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        f64::NAN
    } else {
        a / b
    }
}

/// Values of `e` at every grid point. Division by zero yields NaN at that
/// point only.
pub fn evaluate_values(e: &MomentExpr, table: &mut MomentTable, scope: Scope) -> Result<Vec<f64>> {
    let len = table.len();
    Ok(match e {
        MomentExpr::Number(v) => vec![*v; len],
        MomentExpr::Param(p) => {
            let v = *scope
                .parameters
                .get(p)
                .ok_or_else(|| GpaError::Unsupported(format!("undefined parameter {p}")))?;
            vec![v; len]
        }
        MomentExpr::Expectation(ms) => {
            let mut out = vec![0.0; len];
            for m in ms {
                out = zip(out, table.get(&scope.moment(m)?)?, |x, y| x + y);
            }
            out
        }
        MomentExpr::Variance(ps) => variance(table, &scope.sum(ps)?)?,
        MomentExpr::Covariance(a, b) => {
            let (a, b) = (scope.dim(a)?, scope.dim(b)?);
            let ea = table.get(&MomentIndex::dim(a))?.to_vec();
            let eb = table.get(&MomentIndex::dim(b))?.to_vec();
            let eab = table.get(&MomentIndex::new([(a, 1), (b, 1)]))?.to_vec();
            (0..len).map(|j| eab[j] - ea[j] * eb[j]).collect()
        }
        MomentExpr::Central {
            pair,
            order,
            standardised,
        } => {
            let d = scope.dim(pair)?;
            let c = central(table, d, *order)?;
            if *standardised {
                let var = variance(table, &[d])?;
                let half = f64::from(*order) / 2.0;
                zip(c, &var, |c, v| divide(c, v.powf(half)))
            } else {
                c
            }
        }
        MomentExpr::Binary { op, left, right } => {
            let l = evaluate_values(left, table, scope)?;
            let r = evaluate_values(right, table, scope)?;
            match op {
                BinOp::Add => zip(l, &r, |a, b| a + b),
                BinOp::Sub => zip(l, &r, |a, b| a - b),
                BinOp::Mul => zip(l, &r, |a, b| a * b),
                BinOp::Div => zip(l, &r, divide),
                BinOp::Pow => zip(l, &r, f64::powf),
            }
        }
    })
}

/// Evaluated series labelled with the printed expression.
pub fn evaluate_expression(e: &MomentExpr, table: &mut MomentTable, scope: Scope) -> Result<Series> {
    Ok(Series {
        label: printer::expression(e),
        values: evaluate_values(e, table, scope)?,
    })
}
