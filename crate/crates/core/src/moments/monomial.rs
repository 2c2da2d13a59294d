use std::collections::BTreeMap;

/// A monomial `Π x_d^{a_d}` in the counts, identifying a raw moment.
/// Stored sorted by dimension with positive exponents; the empty monomial
/// is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MomentIndex(Vec<(usize, u32)>);

impl MomentIndex {
    pub fn one() -> Self {
        MomentIndex(Vec::new())
    }

    pub fn dim(d: usize) -> Self {
        MomentIndex(vec![(d, 1)])
    }

    pub fn new(factors: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut map: BTreeMap<usize, u32> = BTreeMap::new();
        for (d, a) in factors {
            *map.entry(d).or_default() += a;
        }
        MomentIndex(map.into_iter().filter(|(_, a)| *a > 0).collect())
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|(_, a)| a).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &MomentIndex) -> MomentIndex {
        MomentIndex::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn times_dim(&self, d: usize) -> MomentIndex {
        self.mul(&MomentIndex::dim(d))
    }

    pub fn exponent(&self, d: usize) -> u32 {
        self.0.iter().find(|(x, _)| *x == d).map_or(0, |(_, a)| *a)
    }

    /// Remove one power of `d`; `None` if `d` does not occur.
    pub fn without_one(&self, d: usize) -> Option<MomentIndex> {
        if self.exponent(d) == 0 {
            return None;
        }
        Some(MomentIndex(
            self.0
                .iter()
                .map(|&(x, a)| if x == d { (x, a - 1) } else { (x, a) })
                .filter(|(_, a)| *a > 0)
                .collect(),
        ))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0.iter().map(|&(d, a)| x[d].powi(a as i32)).product()
    }

    pub fn eval_int(&self, x: &[i64]) -> f64 {
        self.0
            .iter()
            .map(|&(d, a)| (x[d] as f64).powi(a as i32))
            .product()
    }

    /// `m(x + l) - m(x)` expanded into monomials with integer coefficients.
    pub fn shift_difference(&self, jump: &[i64]) -> Vec<(MomentIndex, i64)> {
        // Multiply out Π_d (x_d + l_d)^{a_d} one factor at a time.
        let mut poly: BTreeMap<MomentIndex, i64> = BTreeMap::new();
        poly.insert(MomentIndex::one(), 1);
        for &(d, a) in &self.0 {
            let l = jump[d];
            let mut next: BTreeMap<MomentIndex, i64> = BTreeMap::new();
            for b in 0..=a {
                let coef = binomial(a, b) * l.pow(a - b);
                if coef == 0 {
                    continue;
                }
                let power = MomentIndex::new([(d, b)]);
                for (m, c) in &poly {
                    *next.entry(m.mul(&power)).or_default() += c * coef;
                }
            }
            poly = next;
        }
        *poly.entry(self.clone()).or_default() -= 1;
        poly.into_iter().filter(|(_, c)| *c != 0).collect()
    }

    /// `E[G:P^2 H:Q]`-style label.
    pub fn label(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(d, a)| {
                if a == 1 {
                    names[d].clone()
                } else {
                    format!("{}^{a}", names[d])
                }
            })
            .collect();
        format!("E[{}]", parts.join(" "))
    }
}

pub fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Every monomial of order 1..=p over `n` dimensions, graded
/// lexicographically: by order, then by the non-decreasing sequence of
/// dimensions.
pub fn all_moments(n: usize, p: u32) -> Vec<MomentIndex> {
    let mut out = Vec::new();
    for order in 1..=p {
        let mut seq = vec![0usize; order as usize];
        if n == 0 {
            break;
        }
        loop {
            out.push(MomentIndex::new(seq.iter().map(|&d| (d, 1))));
            // Next non-decreasing sequence in lexicographic order.
            let mut i = seq.len();
            while i > 0 && seq[i - 1] == n - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            seq[i - 1] += 1;
            let v = seq[i - 1];
            for s in seq.iter_mut().skip(i) {
                *s = v;
            }
        }
    }
    out
}
