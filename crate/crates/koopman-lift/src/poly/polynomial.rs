use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use super::{Monomial, ParamAssignment, ParamLinForm, ParamNames, Rational, UnboundParam};

/// A polynomial in the state variables whose coefficients are
/// [`ParamLinForm`]s. The term map is canonical: no monomial maps to the
/// zero form, so equal polynomials are structurally equal.
///
/// Terms iterate in graded lexicographic order of their monomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParamPolynomial {
    n_vars: usize,
    terms: BTreeMap<Monomial, ParamLinForm>,
}

impl ParamPolynomial {
    pub fn zero(n_vars: usize) -> Self {
        ParamPolynomial {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    /// Single-term polynomial `form * mono`.
    pub fn term(mono: Monomial, form: ParamLinForm) -> Self {
        let mut p = Self::zero(mono.n_vars());
        p.add_term(mono, form);
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &ParamLinForm)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    /// Coefficient form of `mono`, if the term is present.
    pub fn coefficient(&self, mono: &Monomial) -> Option<&ParamLinForm> {
        self.terms.get(mono)
    }

    /// Merge `form * mono` into the polynomial, keeping the map canonical.
    pub fn add_term(&mut self, mono: Monomial, form: ParamLinForm) {
        assert_eq!(
            mono.n_vars(),
            self.n_vars,
            "monomial over {} variables added to polynomial over {}",
            mono.n_vars(),
            self.n_vars
        );
        if form.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(form);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_scaled(&form, Rational::from_integer(1));
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            self.n_vars, other.n_vars,
            "cannot add polynomials over {} and {} variables",
            self.n_vars, other.n_vars
        );
        let mut out = self.clone();
        for (mono, form) in &other.terms {
            out.add_term(mono.clone(), form.clone());
        }
        out
    }

    pub fn eval(&self, x: &[f64], params: &ParamAssignment) -> Result<f64, UnboundParam> {
        assert_eq!(
            x.len(),
            self.n_vars,
            "point has {} coordinates, polynomial has {} variables",
            x.len(),
            self.n_vars
        );
        let mut acc = 0.0;
        for (mono, form) in &self.terms {
            acc += form.eval(params)? * mono.eval(x);
        }
        Ok(acc)
    }

    pub fn render(&self, names: &ParamNames) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (mono, form) in &self.terms {
            let coeff = if form.len() == 1 {
                form.render(names)
            } else {
                format!("({})", form.render(names))
            };
            if mono.is_constant() {
                parts.push(coeff);
            } else {
                parts.push(format!("{coeff}*{mono}"));
            }
        }
        parts.join(" + ")
    }
}

impl fmt::Display for ParamPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&ParamNames::default()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ParamId;
    use proptest::prelude::*;

    fn rat(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn m(exps: &[u32]) -> Monomial {
        Monomial::from_exponents(exps.to_vec())
    }

    #[test]
    fn add_merges_and_cancels() {
        let a = ParamPolynomial::term(m(&[3, 0]), ParamLinForm::param(ParamId::linear(0)));
        let b = ParamPolynomial::term(m(&[3, 0]), ParamLinForm::term(ParamId::linear(0), rat(-1)));
        assert!(a.add(&b).is_zero());

        let c = ParamPolynomial::term(m(&[0, 1]), ParamLinForm::param(ParamId::linear(1)));
        let sum = a.add(&c);
        assert_eq!(sum.n_terms(), 2);
        assert_eq!(
            sum.coefficient(&m(&[3, 0])),
            Some(&ParamLinForm::param(ParamId::linear(0)))
        );
    }

    #[test]
    fn add_with_zero_is_identity() {
        let p = ParamPolynomial::term(m(&[1, 1]), ParamLinForm::param(ParamId::poly(1, vec![1])));
        assert_eq!(p.add(&ParamPolynomial::zero(2)), p);
    }

    #[test]
    fn zero_forms_are_not_stored() {
        let mut p = ParamPolynomial::zero(2);
        p.add_term(m(&[1, 0]), ParamLinForm::zero());
        assert!(p.is_zero());
        assert_eq!(p.coefficient(&m(&[1, 0])), None);
    }

    #[test]
    fn eval_linear_plus_cubic() {
        // a_2 * x2 + alpha2_3 * x1^3 at x = (1, 1) with a_2 = -0.5, alpha2_3 = -0.2
        let mut p = ParamPolynomial::zero(2);
        p.add_term(m(&[0, 1]), ParamLinForm::param(ParamId::linear(1)));
        p.add_term(m(&[3, 0]), ParamLinForm::param(ParamId::poly(1, vec![3])));
        let mut params = ParamAssignment::new();
        params.bind(ParamId::linear(1), -0.5);
        params.bind(ParamId::poly(1, vec![3]), -0.2);
        let v = p.eval(&[1.0, 1.0], &params).unwrap();
        assert!((v - (-0.7)).abs() < 1e-15);
        // and at x = (2, 1): -0.5 - 0.2 * 8 = -2.1
        let v = p.eval(&[2.0, 1.0], &params).unwrap();
        assert!((v - (-2.1)).abs() < 1e-15);
    }

    #[test]
    fn eval_names_the_unbound_parameter() {
        let p = ParamPolynomial::term(m(&[3, 0]), ParamLinForm::param(ParamId::poly(1, vec![3])));
        let err = p.eval(&[1.0, 1.0], &ParamAssignment::new()).unwrap_err();
        assert_eq!(err.0, ParamId::poly(1, vec![3]));
    }

    #[test]
    fn terms_iterate_in_graded_lex_order() {
        let mut p = ParamPolynomial::zero(4);
        p.add_term(m(&[4, 0, 1, 0]), ParamLinForm::param(ParamId::linear(0)));
        p.add_term(m(&[1, 3, 0, 0]), ParamLinForm::param(ParamId::linear(1)));
        p.add_term(m(&[2, 2, 0, 0]), ParamLinForm::param(ParamId::linear(2)));
        let order: Vec<&Monomial> = p.monomials().collect();
        assert_eq!(
            order,
            vec![&m(&[1, 3, 0, 0]), &m(&[2, 2, 0, 0]), &m(&[4, 0, 1, 0])]
        );
    }

    #[test]
    fn render_readable() {
        let mut p = ParamPolynomial::zero(2);
        p.add_term(m(&[0, 1]), ParamLinForm::param(ParamId::linear(1)));
        p.add_term(m(&[3, 0]), ParamLinForm::param(ParamId::poly(1, vec![3])));
        assert_eq!(p.render(&ParamNames::default()), "a_2*x2 + alpha2_3*x1^3");
        assert_eq!(ParamPolynomial::zero(2).render(&ParamNames::default()), "0");
    }

    proptest! {
        // Evaluation is a homomorphism: eval(p + q) == eval(p) + eval(q).
        #[test]
        fn eval_respects_addition(
            monos in proptest::collection::vec(
                proptest::collection::vec(0u32..4, 3),
                1..5,
            ),
            coeffs in proptest::collection::vec(-3i64..4, 1..5),
            x in proptest::collection::vec(-1.5f64..1.5, 3),
        ) {
            let mut params = ParamAssignment::new();
            params.bind(ParamId::linear(0), 0.75);
            params.bind(ParamId::linear(1), -0.5);

            let mut p = ParamPolynomial::zero(3);
            let mut q = ParamPolynomial::zero(3);
            for (i, exps) in monos.iter().enumerate() {
                let c = coeffs[i % coeffs.len()];
                let mono = Monomial::from_exponents(exps.clone());
                p.add_term(mono.clone(), ParamLinForm::term(ParamId::linear(0), rat(c)));
                q.add_term(mono, ParamLinForm::term(ParamId::linear(1), rat(c + 1)));
            }
            let sum = p.add(&q);
            let lhs = sum.eval(&x, &params).unwrap();
            let rhs = p.eval(&x, &params).unwrap() + q.eval(&x, &params).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + rhs.abs()));
        }
    }
}
