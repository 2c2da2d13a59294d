//! Right-hand-side expressions of generated ODE systems.

use crate::lang::printer::number;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Scale(f64, Box<Expr>),
    Sum(Vec<Expr>),
    Mul(Vec<Expr>),
    Min(Box<Expr>, Box<Expr>),
    /// Quotient with `0/0 = 0`.
    Ratio(Box<Expr>, Box<Expr>),
    /// 1 when left ≤ right, else 0.
    Le(Box<Expr>, Box<Expr>),
    /// 1 when left > right, else 0.
    Gt(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn scale(c: f64, e: Expr) -> Expr {
        if c == 1.0 {
            return e;
        }
        match e {
            Expr::Const(k) => Expr::Const(c * k),
            Expr::Scale(k, inner) => Expr::scale(c * k, *inner),
            other => Expr::Scale(c, Box::new(other)),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut c = 1.0;
        let mut rest = Vec::new();
        for f in factors {
            match f {
                Expr::Const(k) => c *= k,
                Expr::Scale(k, inner) => {
                    c *= k;
                    rest.push(*inner);
                }
                other => rest.push(other),
            }
        }
        let body = match rest.len() {
            0 => return Expr::Const(c),
            1 => rest.pop().expect("one factor"),
            _ => Expr::Mul(rest),
        };
        Expr::scale(c, body)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Scale(c, e) => c * e.eval(x),
            Expr::Sum(es) => es.iter().map(|e| e.eval(x)).sum(),
            Expr::Mul(es) => es.iter().map(|e| e.eval(x)).product(),
            Expr::Min(a, b) => a.eval(x).min(b.eval(x)),
            Expr::Ratio(n, d) => {
                let den = d.eval(x);
                if den == 0.0 {
                    0.0
                } else {
                    n.eval(x) / den
                }
            }
            Expr::Le(a, b) => f64::from(u8::from(a.eval(x) <= b.eval(x))),
            Expr::Gt(a, b) => f64::from(u8::from(a.eval(x) > b.eval(x))),
        }
    }

    /// Visit this node and all descendants, parents first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Scale(_, e) => e.walk(f),
            Expr::Sum(es) | Expr::Mul(es) => es.iter().for_each(|e| e.walk(f)),
            Expr::Min(a, b) | Expr::Ratio(a, b) | Expr::Le(a, b) | Expr::Gt(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Var(i) = e {
                out.push(*i);
            }
        });
        out
    }

    pub fn display(&self, names: &[String]) -> String {
        match self {
            Expr::Const(c) => number(*c),
            Expr::Var(i) => names[*i].clone(),
            Expr::Scale(c, e) => format!("{}*{}", number(*c), e.display_factor(names)),
            Expr::Sum(es) => {
                let mut s = String::new();
                for (i, e) in es.iter().enumerate() {
                    match e {
                        Expr::Scale(c, inner) if *c < 0.0 && i > 0 => {
                            s.push_str(" - ");
                            if *c != -1.0 {
                                s.push_str(&number(-c));
                                s.push('*');
                            }
                            s.push_str(&inner.display_factor(names));
                        }
                        _ => {
                            if i > 0 {
                                s.push_str(" + ");
                            }
                            s.push_str(&e.display(names));
                        }
                    }
                }
                s
            }
            Expr::Mul(es) => es
                .iter()
                .map(|e| e.display_factor(names))
                .collect::<Vec<_>>()
                .join("*"),
            Expr::Min(a, b) => format!("min({}, {})", a.display(names), b.display(names)),
            Expr::Ratio(a, b) => format!("{}/{}", a.display_factor(names), b.display_factor(names)),
            Expr::Le(a, b) => format!("[{} <= {}]", a.display(names), b.display(names)),
            Expr::Gt(a, b) => format!("[{} > {}]", a.display(names), b.display(names)),
        }
    }

    fn display_factor(&self, names: &[String]) -> String {
        match self {
            Expr::Sum(_) | Expr::Ratio(..) | Expr::Scale(..) => format!("({})", self.display(names)),
            _ => self.display(names),
        }
    }
}

/// Accumulates a linear combination of expressions, merging structurally
/// equal terms.
#[derive(Debug, Default)]
pub struct Terms {
    constant: (f64, f64),
    vars: std::collections::BTreeMap<usize, (f64, f64)>,
    others: Vec<(Expr, f64, f64)>,
}

impl Terms {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, e: Expr, coef: f64) {
        if coef == 0.0 {
            return;
        }
        match e {
            Expr::Const(c) => {
                self.constant.0 += coef * c;
                self.constant.1 += (coef * c).abs();
            }
            Expr::Var(i) => {
                let slot = self.vars.entry(i).or_default();
                slot.0 += coef;
                slot.1 += coef.abs();
            }
            Expr::Scale(c, inner) => self.add(*inner, coef * c),
            Expr::Sum(es) => es.into_iter().for_each(|e| self.add(e, coef)),
            other => match self.others.iter_mut().find(|(x, _, _)| *x == other) {
                Some(slot) => {
                    slot.1 += coef;
                    slot.2 += coef.abs();
                }
                None => self.others.push((other, coef, coef.abs())),
            },
        }
    }

    pub fn build(self) -> Expr {
        // Cancelled coefficients are dropped relative to their magnitude.
        let keep = |(c, mag): (f64, f64)| c != 0.0 && c.abs() > 1e-12 * mag;
        let mut parts = Vec::new();
        for (i, slot) in self.vars {
            if keep(slot) {
                parts.push(Expr::scale(slot.0, Expr::Var(i)));
            }
        }
        if keep(self.constant) {
            parts.push(Expr::Const(self.constant.0));
        }
        for (e, c, mag) in self.others {
            if keep((c, mag)) {
                parts.push(Expr::scale(c, e));
            }
        }
        match parts.len() {
            0 => Expr::Const(0.0),
            1 => parts.pop().expect("one term"),
            _ => Expr::Sum(parts),
        }
    }
}
