//! Lower-triangular polynomial systems:
//!
//! ```text
//! dx_i/dt = a_i x_i + f_i(x_1, ..., x_{i-1})   (+ g_i(x) u for driven runs)
//! ```
//!
//! with `f_1 = 0` and each `f_i` polynomial in the *preceding* states
//! only. This triangular shape is what guarantees the Lie-derivative
//! closure of the state monomials is finite.

use std::fmt;

use crate::expr::InputExpr;
use crate::poly::{
    Monomial, ParamAssignment, ParamId, ParamLinForm, ParamNames, ParamPolynomial, UnboundParam,
};

/// A concrete system: dimensions, nonlinear terms, optional input map,
/// plus parameter values and display names.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    n_x: usize,
    f: Vec<ParamPolynomial>,
    input: Option<Vec<Vec<InputExpr>>>,
    params: ParamAssignment,
    names: ParamNames,
}

impl SystemSpec {
    pub fn builder(n_x: usize) -> SystemBuilder {
        SystemBuilder::new(n_x)
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    /// Nonlinear part of equation `i` (0-based).
    pub fn f(&self, i: usize) -> &ParamPolynomial {
        &self.f[i]
    }

    /// Parameter identity of the linear coefficient of equation `i`.
    pub fn linear_param(&self, i: usize) -> ParamId {
        assert!(i < self.n_x);
        ParamId::linear(i)
    }

    /// Input map `g` as rows of expressions, `n_x` rows by `n_u` columns.
    pub fn input(&self) -> Option<&[Vec<InputExpr>]> {
        self.input.as_deref()
    }

    pub fn n_u(&self) -> usize {
        self.input.as_ref().map_or(0, |g| g[0].len())
    }

    pub fn params(&self) -> &ParamAssignment {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamAssignment {
        &mut self.params
    }

    pub fn names(&self) -> &ParamNames {
        &self.names
    }

    /// Check the triangular structure. Violations come back as a report,
    /// one entry per offending term.
    pub fn validate(&self) -> Result<(), StructureReport> {
        let mut violations = Vec::new();
        for (i, poly) in self.f.iter().enumerate() {
            for (mono, _) in poly.iter() {
                if i == 0 {
                    violations.push(StructureViolation {
                        state: 0,
                        monomial: mono.clone(),
                        kind: ViolationKind::FirstStateNotLinear,
                    });
                    continue;
                }
                let bad: Vec<usize> = (i..self.n_x).filter(|&k| mono.exponent(k) > 0).collect();
                if !bad.is_empty() {
                    violations.push(StructureViolation {
                        state: i,
                        monomial: mono.clone(),
                        kind: ViolationKind::DependsOnLaterState { vars: bad },
                    });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(StructureReport { violations })
        }
    }

    /// Numeric right-hand side at one point (autonomous part only).
    pub fn eval_rhs(&self, x: &[f64]) -> Result<Vec<f64>, UnboundParam> {
        assert_eq!(
            x.len(),
            self.n_x,
            "point dimension {} != n_x {}",
            x.len(),
            self.n_x
        );
        let mut out = Vec::with_capacity(self.n_x);
        for i in 0..self.n_x {
            let a = ParamLinForm::param(ParamId::linear(i)).eval(&self.params)?;
            out.push(a * x[i] + self.f[i].eval(x, &self.params)?);
        }
        Ok(out)
    }

    /// Bind all coefficients to numbers once, for use in integration loops.
    pub fn compile(&self) -> Result<NumericSystem, UnboundParam> {
        let mut linear = Vec::with_capacity(self.n_x);
        let mut terms = Vec::with_capacity(self.n_x);
        for i in 0..self.n_x {
            linear.push(
                self.params
                    .get(&ParamId::linear(i))
                    .ok_or(UnboundParam(ParamId::linear(i)))?,
            );
            let mut row = Vec::with_capacity(self.f[i].n_terms());
            for (mono, form) in self.f[i].iter() {
                row.push((form.eval(&self.params)?, mono.clone()));
            }
            terms.push(row);
        }
        Ok(NumericSystem {
            n_x: self.n_x,
            linear,
            terms,
            input: self.input.clone(),
        })
    }
}

/// Incremental construction of a [`SystemSpec`].
///
/// Each nonlinear term gets the canonical parameter for its equation and
/// exponent pattern; adding the same exponents twice accumulates the
/// multiplier on that one parameter.
pub struct SystemBuilder {
    n_x: usize,
    f: Vec<ParamPolynomial>,
    input: Option<Vec<Vec<InputExpr>>>,
    params: ParamAssignment,
    names: ParamNames,
}

impl SystemBuilder {
    pub fn new(n_x: usize) -> Self {
        assert!(n_x >= 1, "a system needs at least one state");
        SystemBuilder {
            n_x,
            f: (0..n_x).map(|_| ParamPolynomial::zero(n_x)).collect(),
            input: None,
            params: ParamAssignment::new(),
            names: ParamNames::new(),
        }
    }

    /// Bind the linear coefficient `a_{i+1}`.
    pub fn linear(mut self, i: usize, value: Option<f64>) -> Self {
        assert!(i < self.n_x, "state index {i} out of range");
        if let Some(v) = value {
            self.params.bind(ParamId::linear(i), v);
        }
        self
    }

    /// Add the nonlinear term with exponent vector `exps` (full length
    /// `n_x`) to equation `state`, optionally binding its coefficient.
    pub fn term(mut self, state: usize, exps: &[u32], value: Option<f64>) -> Self {
        assert!(state < self.n_x, "state index {state} out of range");
        assert_eq!(
            exps.len(),
            self.n_x,
            "exponent vector has length {}, expected {}",
            exps.len(),
            self.n_x
        );
        let id = ParamId::poly(state, exps[..state].to_vec());
        if let Some(v) = value {
            self.params.bind(id.clone(), v);
        }
        self.f[state].add_term(
            Monomial::from_exponents(exps.to_vec()),
            ParamLinForm::param(id),
        );
        self
    }

    /// Override the display name of a parameter.
    pub fn name(mut self, id: ParamId, name: impl Into<String>) -> Self {
        self.names.set(id, name);
        self
    }

    /// Attach an input map: `n_x` rows, one expression per input channel.
    pub fn input(mut self, g: Vec<Vec<InputExpr>>) -> Self {
        self.input = Some(g);
        self
    }

    /// Finish and check triangularity.
    pub fn build(self) -> Result<SystemSpec, StructureReport> {
        let spec = self.build_unchecked();
        spec.validate()?;
        Ok(spec)
    }

    /// Finish without the triangularity check. Input map shape is still
    /// enforced; this exists so invalid structures can be constructed and
    /// fed to the validator or to closure-cap tests.
    pub fn build_unchecked(self) -> SystemSpec {
        if let Some(g) = &self.input {
            assert_eq!(g.len(), self.n_x, "input map must have n_x rows");
            let n_u = g.first().map_or(0, Vec::len);
            assert!(n_u >= 1, "input map needs at least one channel");
            for row in g {
                assert_eq!(row.len(), n_u, "input map rows must have equal length");
                for e in row {
                    if let Some(v) = e.max_var() {
                        assert!(v < self.n_x, "input map references x{}", v + 1);
                    }
                }
            }
        }
        SystemSpec {
            n_x: self.n_x,
            f: self.f,
            input: self.input,
            params: self.params,
            names: self.names,
        }
    }
}

/// Numeric view of a system with all coefficients bound.
#[derive(Clone, Debug)]
pub struct NumericSystem {
    n_x: usize,
    linear: Vec<f64>,
    terms: Vec<Vec<(f64, Monomial)>>,
    input: Option<Vec<Vec<InputExpr>>>,
}

impl NumericSystem {
    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_u(&self) -> usize {
        self.input.as_ref().map_or(0, |g| g[0].len())
    }

    pub fn has_input(&self) -> bool {
        self.input.is_some()
    }

    /// Autonomous right-hand side, written into `out`.
    pub fn rhs_autonomous(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n_x {
            let mut v = self.linear[i] * x[i];
            for (c, mono) in &self.terms[i] {
                v += c * mono.eval(x);
            }
            out[i] = v;
        }
    }

    /// Full right-hand side with input contribution `g(x) u`.
    pub fn rhs(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        self.rhs_autonomous(x, out);
        if let Some(g) = &self.input {
            for i in 0..self.n_x {
                for (j, e) in g[i].iter().enumerate() {
                    out[i] += e.eval(x) * u[j];
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// The first equation must be purely linear.
    FirstStateNotLinear,
    /// A term of `f_i` involves `x_i` or a later state.
    DependsOnLaterState { vars: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureViolation {
    /// Offending equation, 0-based.
    pub state: usize,
    pub monomial: Monomial,
    pub kind: ViolationKind,
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::FirstStateNotLinear => write!(
                f,
                "equation 1 must be purely linear, but has the term {}",
                self.monomial
            ),
            ViolationKind::DependsOnLaterState { vars } => {
                let list: Vec<String> = vars.iter().map(|v| format!("x{}", v + 1)).collect();
                write!(
                    f,
                    "equation {} term {} depends on {}; only x1..x{} are allowed",
                    self.state + 1,
                    self.monomial,
                    list.join(", "),
                    self.state
                )
            }
        }
    }
}

/// All triangularity violations found in one pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub violations: Vec<StructureViolation>,
}

impl fmt::Display for StructureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for StructureReport {}
