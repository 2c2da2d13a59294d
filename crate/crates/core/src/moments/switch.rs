use super::{Expr, MomentSystem, Unknown};

/// A `min` occurrence in a closed system; its switch points are the zeros
/// of `left - right`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinTerm {
    pub id: usize,
    pub left: Expr,
    pub right: Expr,
    pub max_order: u32,
}

impl MinTerm {
    /// `min#<id>(<left>|<right>)`
    pub fn label(&self, names: &[String]) -> String {
        format!(
            "min#{}({}|{})",
            self.id,
            self.left.display(names),
            self.right.display(names)
        )
    }

    pub fn difference(&self, x: &[f64]) -> f64 {
        self.left.eval(x) - self.right.eval(x)
    }
}

fn order_of(sys: &MomentSystem, e: &Expr) -> u32 {
    e.vars()
        .into_iter()
        .map(|v| match &sys.unknowns[v] {
            Unknown::Moment(m) => m.order(),
            Unknown::Covariance(..) => 2,
        })
        .max()
        .unwrap_or(0)
}

/// Structurally distinct `min` nodes whose arguments only involve unknowns
/// of order at most `max_order`, in order of first occurrence.
pub fn collect_min_terms(sys: &MomentSystem, max_order: u32) -> Vec<MinTerm> {
    let mut out: Vec<MinTerm> = Vec::new();
    for rhs in &sys.rhs {
        rhs.walk(&mut |e| {
            if let Expr::Min(a, b) = e {
                let order = order_of(sys, a).max(order_of(sys, b));
                if order > max_order || a == b {
                    return;
                }
                if out.iter().any(|t| t.left == **a && t.right == **b) {
                    return;
                }
                out.push(MinTerm {
                    id: out.len() + 1,
                    left: (**a).clone(),
                    right: (**b).clone(),
                    max_order: order,
                });
            }
        });
    }
    out
}
