//! Symbolic rate functions over count vectors.

use crate::lang::printer::number;

/// Rate function of the counts. Every expression built by this crate is
/// non-negative and homogeneous of degree one on the non-negative orthant,
/// except `Ratio` factors, which are homogeneous of degree zero.
#[derive(Debug, Clone, PartialEq)]
pub enum RateExpr {
    Const(f64),
    /// `Σ c_i · x_i`, sorted by dimension, no zero coefficients.
    Linear(Vec<(usize, f64)>),
    Min(Box<RateExpr>, Box<RateExpr>),
    Scale(f64, Box<RateExpr>),
    Sum(Vec<RateExpr>),
    Mul(Vec<RateExpr>),
    /// Quotient with `0/0 = 0`; only produced for models that are not
    /// split-free.
    Ratio(Box<RateExpr>, Box<RateExpr>),
}

impl RateExpr {
    pub fn zero() -> Self {
        RateExpr::Const(0.0)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RateExpr::Const(c) => *c == 0.0,
            RateExpr::Linear(t) => t.is_empty(),
            _ => false,
        }
    }

    pub fn linear(mut terms: Vec<(usize, f64)>) -> Self {
        terms.sort_by_key(|(d, _)| *d);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (d, c) in terms {
            match merged.last_mut() {
                Some((ld, lc)) if *ld == d => *lc += c,
                _ => merged.push((d, c)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        RateExpr::Linear(merged)
    }

    pub fn sum(a: RateExpr, b: RateExpr) -> Self {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        match (a, b) {
            (RateExpr::Linear(mut x), RateExpr::Linear(y)) => {
                x.extend(y);
                RateExpr::linear(x)
            }
            (RateExpr::Sum(mut xs), RateExpr::Sum(ys)) => {
                xs.extend(ys);
                RateExpr::Sum(xs)
            }
            (RateExpr::Sum(mut xs), y) => {
                xs.push(y);
                RateExpr::Sum(xs)
            }
            (x, RateExpr::Sum(mut ys)) => {
                ys.insert(0, x);
                RateExpr::Sum(ys)
            }
            (x, y) => RateExpr::Sum(vec![x, y]),
        }
    }

    /// `min(a, b)`; an identically zero side makes the whole term zero.
    pub fn min(a: RateExpr, b: RateExpr) -> Self {
        if a.is_zero() || b.is_zero() {
            return RateExpr::zero();
        }
        RateExpr::Min(Box::new(a), Box::new(b))
    }

    pub fn scale(c: f64, x: RateExpr) -> Self {
        if c == 1.0 {
            return x;
        }
        if c == 0.0 {
            return RateExpr::zero();
        }
        match x {
            RateExpr::Const(k) => RateExpr::Const(c * k),
            RateExpr::Linear(t) => RateExpr::Linear(t.into_iter().map(|(d, k)| (d, c * k)).collect()),
            RateExpr::Scale(k, inner) => RateExpr::scale(c * k, *inner),
            other => RateExpr::Scale(c, Box::new(other)),
        }
    }

    /// Product of degree-zero factors and one degree-one rate.
    pub fn product(factors: Vec<RateExpr>, rate: RateExpr) -> Self {
        let mut c = 1.0;
        let mut rest = Vec::new();
        for f in factors {
            match f {
                RateExpr::Const(k) => c *= k,
                other => rest.push(other),
            }
        }
        if rest.is_empty() {
            return RateExpr::scale(c, rate);
        }
        rest.push(rate);
        RateExpr::scale(c, RateExpr::Mul(rest))
    }

    /// Split off a leading constant factor.
    pub fn split_scale(&self) -> (f64, &RateExpr) {
        match self {
            RateExpr::Scale(c, inner) => (*c, inner),
            other => (1.0, other),
        }
    }

    /// `num / den`, folded to a constant when the two are proportional.
    pub fn ratio(num: RateExpr, den: RateExpr) -> Self {
        if num == den {
            return RateExpr::Const(1.0);
        }
        let (cn, n) = num.split_scale();
        let (cd, d) = den.split_scale();
        if n == d {
            return RateExpr::Const(cn / cd);
        }
        if let (RateExpr::Linear(a), RateExpr::Linear(b)) = (n, d) {
            if a.len() == b.len() && !a.is_empty() {
                let k = a[0].1 / b[0].1;
                let proportional = a
                    .iter()
                    .zip(b)
                    .all(|((da, ca), (db, cb))| da == db && (ca - k * cb).abs() <= 1e-12 * ca.abs());
                if proportional {
                    return RateExpr::Const(cn * k / cd);
                }
            }
        }
        RateExpr::Ratio(Box::new(num), Box::new(den))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            RateExpr::Const(c) => *c,
            RateExpr::Linear(t) => t.iter().map(|(d, c)| c * x[*d]).sum(),
            RateExpr::Min(a, b) => a.eval(x).min(b.eval(x)),
            RateExpr::Scale(c, e) => c * e.eval(x),
            RateExpr::Sum(es) => es.iter().map(|e| e.eval(x)).sum(),
            RateExpr::Mul(es) => es.iter().map(|e| e.eval(x)).product(),
            RateExpr::Ratio(n, d) => {
                let den = d.eval(x);
                if den == 0.0 {
                    0.0
                } else {
                    n.eval(x) / den
                }
            }
        }
    }

    pub fn contains_ratio(&self) -> bool {
        match self {
            RateExpr::Const(_) | RateExpr::Linear(_) => false,
            RateExpr::Ratio(..) => true,
            RateExpr::Min(a, b) => a.contains_ratio() || b.contains_ratio(),
            RateExpr::Scale(_, e) => e.contains_ratio(),
            RateExpr::Sum(es) | RateExpr::Mul(es) => es.iter().any(RateExpr::contains_ratio),
        }
    }

    pub fn contains_min(&self) -> bool {
        match self {
            RateExpr::Const(_) | RateExpr::Linear(_) => false,
            RateExpr::Min(..) => true,
            RateExpr::Ratio(a, b) => a.contains_min() || b.contains_min(),
            RateExpr::Scale(_, e) => e.contains_min(),
            RateExpr::Sum(es) | RateExpr::Mul(es) => es.iter().any(RateExpr::contains_min),
        }
    }

    /// Render with dimension names, e.g. `min(2*Clients:Client, 2*Servers:Server)`.
    pub fn display(&self, names: &[String]) -> String {
        match self {
            RateExpr::Const(c) => number(*c),
            RateExpr::Linear(t) if t.is_empty() => "0".to_string(),
            RateExpr::Linear(t) => t
                .iter()
                .map(|(d, c)| coefficient(*c, &names[*d]))
                .collect::<Vec<_>>()
                .join(" + "),
            RateExpr::Min(a, b) => format!("min({}, {})", a.display(names), b.display(names)),
            RateExpr::Scale(c, e) => coefficient(*c, &e.display_factor(names)),
            RateExpr::Sum(es) => es.iter().map(|e| e.display(names)).collect::<Vec<_>>().join(" + "),
            RateExpr::Mul(es) => es
                .iter()
                .map(|e| e.display_factor(names))
                .collect::<Vec<_>>()
                .join("*"),
            RateExpr::Ratio(n, d) => format!("{}/{}", n.display_factor(names), d.display_factor(names)),
        }
    }

    fn display_factor(&self, names: &[String]) -> String {
        match self {
            RateExpr::Linear(t) if t.len() > 1 => format!("({})", self.display(names)),
            RateExpr::Sum(_) | RateExpr::Ratio(..) | RateExpr::Mul(_) => format!("({})", self.display(names)),
            _ => self.display(names),
        }
    }
}

fn coefficient(c: f64, body: &str) -> String {
    if c == 1.0 {
        body.to_string()
    } else {
        format!("{}*{body}", number(c))
    }
}
