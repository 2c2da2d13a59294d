//! Raw moments of a multivariate normal distribution.

use std::collections::HashMap;

use super::MomentIndex;

/// `E[Π X_d^{a_d}]` for `X ~ N(mean, cov)` by the recursion
/// `E[X_a M] = μ_a E[M] + Σ_b Cov(a, b) ∂_b E[M]`.
pub fn gaussian_moment(m: &MomentIndex, mean: &[f64], cov: &impl Fn(usize, usize) -> f64) -> f64 {
    let mut memo = HashMap::new();
    moment(m, mean, cov, &mut memo)
}

fn moment(
    m: &MomentIndex,
    mean: &[f64],
    cov: &impl Fn(usize, usize) -> f64,
    memo: &mut HashMap<MomentIndex, f64>,
) -> f64 {
    if m.is_one() {
        return 1.0;
    }
    if let Some(v) = memo.get(m) {
        return *v;
    }
    let a = m.factors()[0].0;
    let rest = m.without_one(a).expect("factor present");
    let mut v = mean[a] * moment(&rest, mean, cov, memo);
    for &(b, e) in rest.factors() {
        let c = cov(a, b);
        if c != 0.0 {
            let reduced = rest.without_one(b).expect("factor present");
            v += e as f64 * c * moment(&reduced, mean, cov, memo);
        }
    }
    memo.insert(m.clone(), v);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_moments() {
        let (mu, s2) = (1.5, 0.7);
        let cov = |_: usize, _: usize| s2;
        let m = |k| gaussian_moment(&MomentIndex::new([(0, k)]), &[mu], &cov);
        assert!((m(2) - (mu * mu + s2)).abs() < 1e-12);
        assert!((m(3) - (mu.powi(3) + 3.0 * mu * s2)).abs() < 1e-12);
        assert!((m(4) - (mu.powi(4) + 6.0 * mu * mu * s2 + 3.0 * s2 * s2)).abs() < 1e-12);
    }

    #[test]
    fn bivariate_cross_moment() {
        let mean = [1.0, 2.0];
        let c = [[1.0, 0.5], [0.5, 2.0]];
        let cov = |i: usize, j: usize| c[i][j];
        let xy = gaussian_moment(&MomentIndex::new([(0, 1), (1, 1)]), &mean, &cov);
        assert!((xy - 2.5).abs() < 1e-12);
        // E[X^2 Y] = μ_y(μ_x² + σ_x²) + 2 μ_x σ_xy
        let x2y = gaussian_moment(&MomentIndex::new([(0, 2), (1, 1)]), &mean, &cov);
        assert!((x2y - (2.0 * 2.0 + 2.0 * 0.5)).abs() < 1e-12);
    }
}
