use super::{rate_at, Expr, MomentIndex, MomentSystem, Mode, Terms, Unknown};
use crate::semantics::{is_split_free, RateExpr, StateIndex, TransitionClass};
use crate::{GpaError, Result};

/// Mean ODEs plus the covariance ODEs of the linear noise approximation,
/// `dC/dt = C Dfᵀ + Df C + Σ_k f^k l^k (l^k)ᵀ`, for unnormalised counts.
///
/// `Df` is piecewise constant: the gradient of `min(a, b)` follows `a`
/// when `a ≤ b` and `b` otherwise.
pub fn generate_lna_odes(classes: &[TransitionClass], idx: &StateIndex) -> Result<MomentSystem> {
    if !is_split_free(classes) {
        return Err(GpaError::NotSplitFree);
    }
    let n = idx.len();
    let mut unknowns: Vec<Unknown> = (0..n).map(|d| Unknown::Moment(MomentIndex::dim(d))).collect();
    for i in 0..n {
        for j in i..n {
            unknowns.push(Unknown::Covariance(i, j));
        }
    }
    let cov = |i: usize, j: usize| {
        let (i, j) = (i.min(j), i.max(j));
        // Row-major upper triangle after the n means.
        n + i * n - i * (i + 1) / 2 + j
    };
    let mean = |d: usize| d;

    let rates: Vec<Expr> = classes.iter().map(|c| rate_at(&c.rate, &mean)).collect();
    let grads: Vec<Vec<(usize, Expr)>> = classes.iter().map(|c| gradient(&c.rate, &mean)).collect();

    let mut rhs = Vec::with_capacity(unknowns.len());
    for i in 0..n {
        let mut terms = Terms::new();
        for (c, r) in classes.iter().zip(&rates) {
            terms.add(r.clone(), c.jump[i] as f64);
        }
        rhs.push(terms.build());
    }
    for i in 0..n {
        for j in i..n {
            let mut terms = Terms::new();
            for ((c, r), g) in classes.iter().zip(&rates).zip(&grads) {
                let (li, lj) = (c.jump[i] as f64, c.jump[j] as f64);
                if li == 0.0 && lj == 0.0 {
                    continue;
                }
                // (Df C)_ij + (C Dfᵀ)_ij restricted to class k.
                for (m, dm) in g {
                    terms.add(Expr::mul(vec![dm.clone(), Expr::Var(cov(*m, j))]), li);
                    terms.add(Expr::mul(vec![dm.clone(), Expr::Var(cov(*m, i))]), lj);
                }
                terms.add(r.clone(), li * lj);
            }
            rhs.push(terms.build());
        }
    }
    Ok(MomentSystem::new(Mode::Lna, unknowns, rhs, &idx.names()))
}

/// Partial derivatives of a split-free rate, as expressions of the means.
fn gradient(r: &RateExpr, mean: &impl Fn(usize) -> usize) -> Vec<(usize, Expr)> {
    match r {
        RateExpr::Const(_) => Vec::new(),
        RateExpr::Linear(t) => t.iter().map(|(d, c)| (*d, Expr::Const(*c))).collect(),
        RateExpr::Scale(c, e) => gradient(e, mean)
            .into_iter()
            .map(|(d, g)| (d, Expr::scale(*c, g)))
            .collect(),
        RateExpr::Sum(es) => merge(es.iter().map(|e| (gradient(e, mean), None)).collect()),
        RateExpr::Min(a, b) => {
            let (ea, eb) = (rate_at(a, mean), rate_at(b, mean));
            let le = Expr::Le(Box::new(ea.clone()), Box::new(eb.clone()));
            let gt = Expr::Gt(Box::new(ea), Box::new(eb));
            merge(vec![(gradient(a, mean), Some(le)), (gradient(b, mean), Some(gt))])
        }
        RateExpr::Mul(_) | RateExpr::Ratio(..) => unreachable!("split-free rates have no prefactors"),
    }
}

type Gradient = Vec<(usize, Expr)>;

/// Sum gradients, each optionally gated by an indicator.
fn merge(parts: Vec<(Gradient, Option<Expr>)>) -> Gradient {
    let mut by_dim: std::collections::BTreeMap<usize, Terms> = Default::default();
    for (g, gate) in parts {
        for (d, e) in g {
            let e = match &gate {
                Some(ind) => Expr::mul(vec![ind.clone(), e]),
                None => e,
            };
            by_dim.entry(d).or_default().add(e, 1.0);
        }
    }
    by_dim.into_iter().map(|(d, t)| (d, t.build())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_model, validate};
    use crate::semantics::{build_state_index, enumerate_transition_classes};

    const CS: &str = "
r_req = 2.0; r_break = 0.1; r_think = 0.2; r_data = 1.0; r_reset = 2.0; c = 100; s = 50;
Client = (request, r_req).Client_waiting;
Client_waiting = (data, r_data).Client_think;
Client_think = (think, r_think).Client;
Server = (request, r_req).Server_get + (break, r_break).Server_broken;
Server_get = (data, r_data).Server;
Server_broken = (reset, r_reset).Server;
Clients{Client[c]} <request, data> Servers{Server[s]}
";

    fn system(src: &str) -> (StateIndex, Result<MomentSystem>) {
        let vm = validate(&parse_model(src).unwrap()).unwrap();
        let idx = build_state_index(&vm);
        let classes = enumerate_transition_classes(&vm, &idx);
        let sys = generate_lna_odes(&classes, &idx);
        (idx, sys)
    }

    #[test]
    fn layout_and_initial_state() {
        let (idx, sys) = system(CS);
        let sys = sys.unwrap();
        assert_eq!(sys.len(), 6 + 21);
        let x0 = sys.initial_state(&idx);
        assert_eq!(&x0[..6], &[100.0, 0.0, 0.0, 50.0, 0.0, 0.0]);
        assert!(x0[6..].iter().all(|v| *v == 0.0));
        assert_eq!(sys.covariance_index(3, 3), Some(6 + 6 + 5 + 4));
        assert_eq!(sys.names[sys.covariance_index(0, 3).unwrap()], "Cov[Clients:Client,Servers:Server]");
    }

    #[test]
    fn diffusion_at_start() {
        let (idx, sys) = system(CS);
        let sys = sys.unwrap();
        let x0 = sys.initial_state(&idx);
        let mut out = vec![0.0; sys.len()];
        sys.eval_rhs(&x0, &mut out);
        // Zero covariance leaves only Σ f^k l l^T: request 100 and break 5.
        assert!((out[sys.covariance_index(3, 3).unwrap()] - 105.0).abs() < 1e-12);
        assert!((out[sys.covariance_index(0, 3).unwrap()] - 100.0).abs() < 1e-12);
    }

    #[test]
    fn server_variance_switches_on_indicator() {
        let (_, sys) = system(CS);
        let sys = sys.unwrap();
        let ss = sys.covariance_index(3, 3).unwrap();
        let cs = sys.covariance_index(0, 3).unwrap();
        let mut x = vec![0.0; sys.len()];
        x[0] = 10.0;
        x[3] = 20.0;
        x[ss] = 1.0;
        x[cs] = 0.0;
        let mut with_client_min = vec![0.0; sys.len()];
        sys.eval_rhs(&x, &mut with_client_min);
        // min(2 C, 2 S) follows C here, so C_SS does not feed back through request.
        let base = with_client_min[ss];
        x[ss] = 2.0;
        let mut out = vec![0.0; sys.len()];
        sys.eval_rhs(&x, &mut out);
        // Only break contributes -2 * 0.1 per unit of C_SS.
        assert!((out[ss] - base - (-0.2)).abs() < 1e-12);
    }

    #[test]
    fn ties_follow_left_argument() {
        let (_, sys) = system(CS);
        let sys = sys.unwrap();
        let ss = sys.covariance_index(3, 3).unwrap();
        let mut x = vec![0.0; sys.len()];
        x[0] = 20.0;
        x[3] = 20.0;
        let mut a = vec![0.0; sys.len()];
        sys.eval_rhs(&x, &mut a);
        x[ss] = 1.0;
        let mut b = vec![0.0; sys.len()];
        sys.eval_rhs(&x, &mut b);
        // Left argument is the client side, so C_SS enters only through break.
        assert!((b[ss] - a[ss] + 0.2).abs() < 1e-12);
    }

    #[test]
    fn non_split_free_is_refused() {
        let src = "A = (a, 1).B; B = (a, 2).A; R = (a, 1).R; G{A[2] | B[3]} <a> H{R[1]}";
        let (_, sys) = system(src);
        assert!(matches!(sys, Err(GpaError::NotSplitFree)));
    }
}
