use std::cmp::Ordering;
use std::fmt;

/// A monomial over the state variables, stored as a dense exponent vector:
/// `exps[i]` is the power of `x_{i+1}`.
///
/// Monomials compare in graded lexicographic order (total degree first,
/// then the exponent vector), so any collection of them has one
/// deterministic ordering.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    /// The constant monomial `1` over `n_vars` variables.
    pub fn constant(n_vars: usize) -> Self {
        Monomial {
            exps: vec![0; n_vars],
        }
    }

    /// The unit monomial `x_{i+1}` (`i` is 0-based).
    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(
            i < n_vars,
            "variable index {i} out of range for {n_vars} variables"
        );
        let mut exps = vec![0; n_vars];
        exps[i] = 1;
        Monomial { exps }
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn n_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// `Some(i)` when the monomial is exactly the state variable `x_{i+1}`.
    pub fn as_var(&self) -> Option<usize> {
        let mut hit = None;
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 if hit.is_none() => hit = Some(i),
                _ => return None,
            }
        }
        hit
    }

    /// Exponent-wise product. Panics when the variable counts differ.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.n_vars(),
            other.n_vars(),
            "cannot multiply monomials over {} and {} variables",
            self.n_vars(),
            other.n_vars()
        );
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Power rule: d/dx_{i+1} of the monomial, as `(coefficient, reduced
    /// monomial)`, or `None` when the variable does not occur.
    pub fn partial(&self, i: usize) -> Option<(u32, Self)> {
        assert!(
            i < self.exps.len(),
            "variable index {i} out of range for {} variables",
            self.exps.len()
        );
        let e = self.exps[i];
        if e == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[i] = e - 1;
        Some((e, Monomial { exps }))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(
            x.len(),
            self.exps.len(),
            "point has {} coordinates, monomial has {} variables",
            x.len(),
            self.exps.len()
        );
        self.exps
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(exps: &[u32]) -> Monomial {
        Monomial::from_exponents(exps.to_vec())
    }

    #[test]
    fn constructors() {
        assert_eq!(Monomial::constant(3).exponents(), &[0, 0, 0]);
        assert_eq!(Monomial::var(4, 2).exponents(), &[0, 0, 1, 0]);
        assert!(Monomial::constant(2).is_constant());
        assert_eq!(Monomial::var(4, 3).as_var(), Some(3));
        assert_eq!(m(&[1, 1, 0, 0]).as_var(), None);
        assert_eq!(m(&[0, 2, 0, 0]).as_var(), None);
    }

    #[test]
    fn product_adds_exponents() {
        let a = m(&[1, 1, 0, 0]);
        let b = m(&[3, 0, 0, 0]);
        assert_eq!(a.mul(&b), m(&[4, 1, 0, 0]));
        assert_eq!(b.mul(&b), m(&[6, 0, 0, 0]));
        assert_eq!(a.mul(&Monomial::constant(4)), a);
    }

    #[test]
    #[should_panic(expected = "cannot multiply")]
    fn product_rejects_mixed_dimensions() {
        let _ = m(&[1, 0]).mul(&m(&[1, 0, 0]));
    }

    #[test]
    fn partial_applies_power_rule() {
        assert_eq!(m(&[3, 0, 0, 0]).partial(0), Some((3, m(&[2, 0, 0, 0]))));
        assert_eq!(m(&[1, 1, 1, 0]).partial(2), Some((1, m(&[1, 1, 0, 0]))));
        assert_eq!(m(&[10, 0, 0, 0]).partial(0), Some((10, m(&[9, 0, 0, 0]))));
        assert_eq!(m(&[4, 2, 0, 0]).partial(1), Some((2, m(&[4, 1, 0, 0]))));
        assert_eq!(m(&[3, 0, 0, 0]).partial(1), None);
        assert_eq!(Monomial::constant(4).partial(0), None);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn partial_rejects_bad_index() {
        let _ = m(&[1, 0]).partial(2);
    }

    #[test]
    fn eval_multiplies_powers() {
        let x = [2.0, 3.0, -1.0, 0.5];
        assert_eq!(m(&[3, 0, 0, 0]).eval(&x), 8.0);
        assert_eq!(m(&[1, 1, 1, 0]).eval(&x), -6.0);
        assert_eq!(Monomial::constant(4).eval(&x), 1.0);
        assert_eq!(m(&[0, 0, 0, 2]).eval(&x), 0.25);
    }

    #[test]
    fn graded_lex_order() {
        // degree dominates
        assert!(m(&[0, 2, 0, 0]) < m(&[3, 0, 0, 0]));
        // equal degree: lexicographic on the exponent vector
        assert!(m(&[0, 2, 0, 0]) < m(&[1, 1, 0, 0]));
        assert!(m(&[1, 3, 0, 0]) < m(&[2, 2, 0, 0]));
        assert!(m(&[2, 2, 0, 0]) < m(&[4, 0, 1, 0]));
        let mut v = vec![m(&[4, 0, 1, 0]), m(&[1, 3, 0, 0]), m(&[2, 2, 0, 0])];
        v.sort();
        assert_eq!(
            v,
            vec![m(&[1, 3, 0, 0]), m(&[2, 2, 0, 0]), m(&[4, 0, 1, 0])]
        );
    }

    #[test]
    fn display_forms() {
        assert_eq!(Monomial::constant(3).to_string(), "1");
        assert_eq!(m(&[1, 0, 0, 0]).to_string(), "x1");
        assert_eq!(m(&[3, 1, 0, 0]).to_string(), "x1^3*x2");
        assert_eq!(m(&[0, 0, 0, 10]).to_string(), "x4^10");
    }

    proptest! {
        // Independent derivative oracle: central finite differences on eval.
        #[test]
        fn partial_matches_finite_differences(
            exps in proptest::collection::vec(0u32..5, 1..6),
            seed in proptest::collection::vec(-1.0f64..1.0, 6),
            var in 0usize..6,
        ) {
            let n = exps.len();
            let var = var % n;
            let mono = Monomial::from_exponents(exps);
            let x: Vec<f64> = seed.into_iter().take(n).collect();
            let h = 1e-5;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[var] += h;
            xm[var] -= h;
            let fd = (mono.eval(&xp) - mono.eval(&xm)) / (2.0 * h);
            let analytic = match mono.partial(var) {
                None => 0.0,
                Some((c, reduced)) => c as f64 * reduced.eval(&x),
            };
            prop_assert!(
                (fd - analytic).abs() <= 1e-6 * (1.0 + analytic.abs()),
                "fd {} vs analytic {}", fd, analytic
            );
        }

        #[test]
        fn product_eval_is_eval_product(
            a in proptest::collection::vec(0u32..4, 1..5),
            b in proptest::collection::vec(0u32..4, 1..5),
            seed in proptest::collection::vec(-2.0f64..2.0, 5),
        ) {
            let n = a.len().min(b.len());
            let ma = Monomial::from_exponents(a[..n].to_vec());
            let mb = Monomial::from_exponents(b[..n].to_vec());
            let x: Vec<f64> = seed.into_iter().take(n).collect();
            let lhs = ma.mul(&mb).eval(&x);
            let rhs = ma.eval(&x) * mb.eval(&x);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }
}
