use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Exact scalar multiplier attached to a parameter inside a linear form.
pub type Rational = num_rational::Rational64;

/// Identity of a system coefficient.
///
/// `Linear(i)` is the coefficient of `x_{i+1}` in its own equation.
/// `Poly { state, exps }` is the coefficient of the nonlinear term of
/// equation `state + 1` whose predecessor exponents are `exps`
/// (`exps.len() == state`, covering `x_1 .. x_state`). Identity is
/// structural; display names can be overridden via [`ParamNames`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ParamId {
    Linear(usize),
    Poly { state: usize, exps: Vec<u32> },
}

impl ParamId {
    pub fn linear(state: usize) -> Self {
        ParamId::Linear(state)
    }

    pub fn poly(state: usize, exps: Vec<u32>) -> Self {
        ParamId::Poly { state, exps }
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamId::Linear(i) => write!(f, "a_{}", i + 1),
            ParamId::Poly { state, exps } => {
                write!(f, "alpha{}_", state + 1)?;
                for e in exps {
                    write!(f, "{e}")?;
                }
                Ok(())
            }
        }
    }
}

/// Evaluation was attempted with no numeric value for this parameter.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parameter {0} has no numeric binding")]
pub struct UnboundParam(pub ParamId);

/// Numeric values for parameters. Partial bindings are fine; evaluation
/// fails only when it actually touches an unbound parameter.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamAssignment {
    values: BTreeMap<ParamId, f64>,
}

impl ParamAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, id: ParamId, value: f64) {
        self.values.insert(id, value);
    }

    pub fn get(&self, id: &ParamId) -> Option<f64> {
        self.values.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ParamId, f64)> {
        self.values.iter().map(|(id, &v)| (id, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Display-name overrides for parameters. Lookup falls back to the
/// structural name (`a_2`, `alpha2_3`, ...).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamNames {
    overrides: BTreeMap<ParamId, String>,
}

impl ParamNames {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, id: ParamId, name: impl Into<String>) {
        self.overrides.insert(id, name.into());
    }

    pub fn name(&self, id: &ParamId) -> String {
        match self.overrides.get(id) {
            Some(s) => s.clone(),
            None => id.to_string(),
        }
    }

    pub fn get_override(&self, id: &ParamId) -> Option<&str> {
        self.overrides.get(id).map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ParamId, &str)> {
        self.overrides.iter().map(|(id, s)| (id, s.as_str()))
    }
}

/// A linear combination of parameters with exact rational multipliers.
///
/// Kept canonical: zero multipliers are never stored, so structural
/// equality is semantic equality. Parameters never multiply each other
/// anywhere in this crate; the type cannot even express a product, which
/// is what keeps lifted dynamics linear in the parameters.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ParamLinForm {
    terms: BTreeMap<ParamId, Rational>,
}

impl ParamLinForm {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The form `1 * id`.
    pub fn param(id: ParamId) -> Self {
        Self::term(id, Rational::from_integer(1))
    }

    /// The form `c * id`; collapses to zero when `c == 0`.
    pub fn term(id: ParamId, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if c != Rational::from_integer(0) {
            terms.insert(id, c);
        }
        ParamLinForm { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ParamId, Rational)> {
        self.terms.iter().map(|(id, &c)| (id, c))
    }

    /// Multiplier of `id`, zero when absent.
    pub fn coefficient(&self, id: &ParamId) -> Rational {
        self.terms
            .get(id)
            .copied()
            .unwrap_or_else(|| Rational::from_integer(0))
    }

    pub fn scale(&self, c: Rational) -> Self {
        if c == Rational::from_integer(0) {
            return Self::zero();
        }
        ParamLinForm {
            terms: self
                .terms
                .iter()
                .map(|(id, &m)| (id.clone(), m * c))
                .collect(),
        }
    }

    /// `self += c * other`, dropping any multiplier that cancels to zero.
    pub fn add_scaled(&mut self, other: &Self, c: Rational) {
        if c == Rational::from_integer(0) {
            return;
        }
        for (id, &m) in &other.terms {
            let entry = self
                .terms
                .entry(id.clone())
                .or_insert_with(|| Rational::from_integer(0));
            *entry += m * c;
            if *entry == Rational::from_integer(0) {
                self.terms.remove(id);
            }
        }
    }

    /// `c1 * f1 + c2 * f2`.
    pub fn combine(c1: Rational, f1: &Self, c2: Rational, f2: &Self) -> Self {
        let mut out = f1.scale(c1);
        out.add_scaled(f2, c2);
        out
    }

    pub fn eval(&self, params: &ParamAssignment) -> Result<f64, UnboundParam> {
        let mut acc = 0.0;
        for (id, &c) in &self.terms {
            let v = params.get(id).ok_or_else(|| UnboundParam(id.clone()))?;
            acc += rational_to_f64(c) * v;
        }
        Ok(acc)
    }

    /// Compact rendering in the style of `3a_1`, `a_1+a_2`, `2alpha2_3`.
    pub fn render(&self, names: &ParamNames) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (id, &c) in &self.terms {
            let negative = c < Rational::from_integer(0);
            let mag = if negative { -c } else { c };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push(if negative { '-' } else { '+' });
            }
            if mag != Rational::from_integer(1) {
                if *mag.denom() == 1 {
                    out.push_str(&mag.numer().to_string());
                } else {
                    out.push_str(&format!("{}/{}", mag.numer(), mag.denom()));
                }
            }
            out.push_str(&names.name(id));
        }
        out
    }
}

impl fmt::Display for ParamLinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&ParamNames::default()))
    }
}

impl std::ops::Add for &ParamLinForm {
    type Output = ParamLinForm;

    fn add(self, rhs: &ParamLinForm) -> ParamLinForm {
        ParamLinForm::combine(
            Rational::from_integer(1),
            self,
            Rational::from_integer(1),
            rhs,
        )
    }
}

pub(crate) fn rational_to_f64(c: Rational) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn param_display_names() {
        assert_eq!(ParamId::linear(0).to_string(), "a_1");
        assert_eq!(ParamId::linear(3).to_string(), "a_4");
        assert_eq!(ParamId::poly(1, vec![3]).to_string(), "alpha2_3");
        assert_eq!(ParamId::poly(2, vec![0, 2]).to_string(), "alpha3_02");
        assert_eq!(ParamId::poly(3, vec![1, 1, 1]).to_string(), "alpha4_111");
    }

    #[test]
    fn name_overrides() {
        let mut names = ParamNames::new();
        names.set(ParamId::linear(0), "decay");
        assert_eq!(names.name(&ParamId::linear(0)), "decay");
        assert_eq!(names.name(&ParamId::linear(1)), "a_2");
    }

    #[test]
    fn combine_adds_like_terms() {
        let a1 = ParamLinForm::param(ParamId::linear(0));
        let a2 = ParamLinForm::param(ParamId::linear(1));
        let sum = ParamLinForm::combine(rat(1), &a1, rat(1), &a2);
        assert_eq!(sum.coefficient(&ParamId::linear(0)), rat(1));
        assert_eq!(sum.coefficient(&ParamId::linear(1)), rat(1));
        assert_eq!(sum.render(&ParamNames::default()), "a_1+a_2");

        let tripled = ParamLinForm::combine(rat(3), &a1, rat(0), &a2);
        assert_eq!(tripled.render(&ParamNames::default()), "3a_1");
    }

    #[test]
    fn cancellation_restores_canonical_zero() {
        let f = ParamLinForm::combine(
            rat(2),
            &ParamLinForm::param(ParamId::poly(1, vec![3])),
            rat(5),
            &ParamLinForm::param(ParamId::linear(2)),
        );
        let zero = ParamLinForm::combine(rat(1), &f, rat(-1), &f);
        assert!(zero.is_zero());
        assert_eq!(zero, ParamLinForm::zero());
        assert_eq!(zero.render(&ParamNames::default()), "0");
    }

    #[test]
    fn eval_is_linear() {
        let mut params = ParamAssignment::new();
        params.bind(ParamId::linear(0), -0.5);
        params.bind(ParamId::linear(1), 2.0);
        let f = ParamLinForm::combine(
            rat(3),
            &ParamLinForm::param(ParamId::linear(0)),
            rat(1),
            &ParamLinForm::param(ParamId::linear(1)),
        );
        assert_eq!(f.eval(&params).unwrap(), 0.5);
        assert_eq!(ParamLinForm::zero().eval(&params).unwrap(), 0.0);
    }

    #[test]
    fn eval_reports_missing_parameter() {
        let params = ParamAssignment::new();
        let f = ParamLinForm::param(ParamId::poly(1, vec![3]));
        let err = f.eval(&params).unwrap_err();
        assert_eq!(err, UnboundParam(ParamId::poly(1, vec![3])));
        assert_eq!(err.to_string(), "parameter alpha2_3 has no numeric binding");
    }

    #[test]
    fn render_multipliers() {
        let names = ParamNames::default();
        let id = ParamId::poly(1, vec![3]);
        assert_eq!(
            ParamLinForm::term(id.clone(), rat(2)).render(&names),
            "2alpha2_3"
        );
        assert_eq!(
            ParamLinForm::term(id.clone(), rat(-1)).render(&names),
            "-alpha2_3"
        );
        assert_eq!(
            ParamLinForm::term(id.clone(), Rational::new(3, 2)).render(&names),
            "3/2alpha2_3"
        );
        assert_eq!(ParamLinForm::term(id, rat(0)).render(&names), "0");
    }

    #[test]
    fn scale_by_zero_is_zero() {
        let f = ParamLinForm::param(ParamId::linear(0));
        assert!(f.scale(rat(0)).is_zero());
        let mut g = f.clone();
        g.add_scaled(&f, rat(-1));
        assert!(g.is_zero());
    }
}
