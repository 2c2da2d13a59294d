use super::table::MomentTable;
use crate::moments::{collect_min_terms, MomentSystem, Unknown};
use crate::numerics::Series;
use crate::Result;

/// Difference series `left - right` of one min term, with its zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSeries {
    pub series: Series,
    pub crossings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchPointReport {
    pub terms: Vec<SwitchSeries>,
}

/// Zeros of `d` by linear interpolation across sign changes. A run of exact
/// zeros counts once, at its first point.
pub fn crossings(times: &[f64], d: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for j in 0..d.len() {
        if d[j].is_nan() {
            continue;
        }
        if d[j] == 0.0 {
            if j == 0 || d[j - 1] != 0.0 {
                out.push(times[j]);
            }
            continue;
        }
        if j > 0 && d[j - 1] != 0.0 && !d[j - 1].is_nan() && (d[j - 1] < 0.0) != (d[j] < 0.0) {
            let (t0, t1) = (times[j - 1], times[j]);
            out.push(t0 + d[j - 1] / (d[j - 1] - d[j]) * (t1 - t0));
        }
    }
    out
}

/// Evaluate the min terms of `inventory` whose arguments have order at most
/// `order` along the moments in `table`.
pub fn switch_points(inventory: &MomentSystem, order: u32, table: &mut MomentTable) -> Result<SwitchPointReport> {
    let terms = collect_min_terms(inventory, order);
    let mut x = vec![0.0; inventory.len()];
    let mut report = Vec::with_capacity(terms.len());
    for term in &terms {
        let mut vars = term.left.vars();
        vars.extend(term.right.vars());
        vars.sort_unstable();
        vars.dedup();
        let mut columns = Vec::with_capacity(vars.len());
        for &v in &vars {
            let Unknown::Moment(m) = &inventory.unknowns[v] else {
                unreachable!("closure systems hold raw moments only");
            };
            columns.push(table.get(m)?.to_vec());
        }
        let values: Vec<f64> = (0..table.len())
            .map(|j| {
                for (v, c) in vars.iter().zip(&columns) {
                    x[*v] = c[j];
                }
                term.difference(&x)
            })
            .collect();
        report.push(SwitchSeries {
            crossings: crossings(&table.times, &values),
            series: Series {
                label: term.label(&inventory.names),
                values,
            },
        });
    }
    Ok(SwitchPointReport { terms: report })
}
