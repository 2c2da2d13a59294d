use super::{all_moments, rate_at, Expr, MomentIndex, MomentSystem, Mode, Terms, Unknown};
use crate::semantics::{RateExpr, StateIndex, TransitionClass};
use crate::{GpaError, Result};

/// Raw-moment ODEs of orders `1..=p` closed by `E[min(A, B)] ≈ min(E[A], E[B])`.
///
/// For each monomial `m` the exact generator gives
/// `d/dt E[m(N)] = Σ_k E[f^k(N) (m(N + l^k) - m(N))]`; the expectation of each
/// product `f^k · N^β` is closed by pushing `N^β` inside every `min` and
/// evaluating degree-zero prefactors at the means.
pub fn generate_moment_odes(classes: &[TransitionClass], idx: &StateIndex, p: u32) -> Result<MomentSystem> {
    if p < 1 {
        return Err(GpaError::InvalidOrder(p));
    }
    let moments = all_moments(idx.len(), p);
    let unknowns: Vec<Unknown> = moments.iter().cloned().map(Unknown::Moment).collect();
    let position: std::collections::HashMap<&MomentIndex, usize> =
        moments.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let var = |m: &MomentIndex| position[m];
    let mean = |d: usize| position[&MomentIndex::dim(d)];

    let rhs = moments
        .iter()
        .map(|m| {
            let mut terms = Terms::new();
            for c in classes {
                for (beta, coef) in m.shift_difference(&c.jump) {
                    terms.add(close(&c.rate, &beta, &var, &mean), coef as f64);
                }
            }
            terms.build()
        })
        .collect();
    Ok(MomentSystem::new(
        Mode::Closure { order: p },
        unknowns,
        rhs,
        &idx.names(),
    ))
}

/// Closed approximation of `E[f(N) · N^β]`.
fn close(
    f: &RateExpr,
    beta: &MomentIndex,
    var: &impl Fn(&MomentIndex) -> usize,
    mean: &impl Fn(usize) -> usize,
) -> Expr {
    let moment = |m: MomentIndex| {
        if m.is_one() {
            Expr::Const(1.0)
        } else {
            Expr::Var(var(&m))
        }
    };
    match f {
        RateExpr::Const(c) => Expr::scale(*c, moment(beta.clone())),
        RateExpr::Linear(t) => {
            let mut terms = Terms::new();
            for (d, c) in t {
                terms.add(moment(beta.times_dim(*d)), *c);
            }
            terms.build()
        }
        RateExpr::Min(a, b) => Expr::Min(
            Box::new(close(a, beta, var, mean)),
            Box::new(close(b, beta, var, mean)),
        ),
        RateExpr::Scale(c, e) => Expr::scale(*c, close(e, beta, var, mean)),
        RateExpr::Sum(es) => {
            let mut terms = Terms::new();
            for e in es {
                terms.add(close(e, beta, var, mean), 1.0);
            }
            terms.build()
        }
        RateExpr::Mul(es) => {
            // Degree-zero prefactors followed by the degree-one rate.
            let (last, prefactors) = es.split_last().expect("non-empty product");
            let mut factors: Vec<Expr> = prefactors.iter().map(|e| rate_at(e, mean)).collect();
            factors.push(close(last, beta, var, mean));
            Expr::mul(factors)
        }
        RateExpr::Ratio(..) => Expr::mul(vec![rate_at(f, mean), moment(beta.clone())]),
    }
}
