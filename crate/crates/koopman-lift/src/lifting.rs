//! Closure of the state monomials under the Lie derivative.
//!
//! For a triangular polynomial system the time derivative of any state
//! monomial is again a polynomial in finitely many monomials, so seeding
//! a worklist with `x_1 .. x_n` and appending every unseen monomial of
//! every derivative reaches a fixpoint. The resulting list is the lifted
//! coordinate set on which the dynamics are exactly linear.

use std::collections::HashMap;

use thiserror::Error;

use crate::poly::{Monomial, ParamLinForm, ParamPolynomial, Rational};
use crate::system::SystemSpec;

/// Safety cap on the observable count, far above anything a desk-scale
/// system produces. Hitting it means the system was not validated or
/// the cap was set unreasonably low.
pub const DEFAULT_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error(
        "observable cap {cap} exceeded while closing the lifting \
         ({discovered} monomials discovered, {processed} processed)"
    )]
    CapExceeded {
        cap: usize,
        discovered: usize,
        processed: usize,
    },
}

/// Time derivative of a monomial along the system flow:
/// `d/dt m = sum_i (dm/dx_i) * (a_i x_i + f_i)`.
///
/// Every term of the result carries exactly one parameter, so the
/// coefficients stay linear forms; parameters never multiply.
pub fn lie_derivative(m: &Monomial, spec: &SystemSpec) -> ParamPolynomial {
    assert_eq!(
        m.n_vars(),
        spec.n_x(),
        "monomial over {} variables, system has {} states",
        m.n_vars(),
        spec.n_x()
    );
    let mut out = ParamPolynomial::zero(spec.n_x());
    for i in 0..spec.n_x() {
        let Some((j, reduced)) = m.partial(i) else {
            continue;
        };
        let j = Rational::from_integer(j as i64);
        // a_i x_i contributes j * a_i on m itself
        out.add_term(m.clone(), ParamLinForm::term(spec.linear_param(i), j));
        // each term of f_i shifts the monomial
        for (mono, form) in spec.f(i).iter() {
            out.add_term(reduced.mul(mono), form.scale(j));
        }
    }
    out
}

/// The closed set of observables, states first, then discovery order.
///
/// Ties among the new monomials of a single derivative are broken by
/// graded lexicographic order. The whole construction is symbolic: it
/// never reads parameter values, so re-binding parameters (zero values
/// included) cannot change the set.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftingSet {
    n_x: usize,
    observables: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    introduced_by: Vec<usize>,
}

impl LiftingSet {
    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[Monomial] {
        &self.observables
    }

    pub fn observable(&self, k: usize) -> &Monomial {
        &self.observables[k]
    }

    /// Position of a monomial in the lifted coordinates.
    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.index.contains_key(m)
    }

    /// Index of the state equation whose closure introduced observable `k`.
    pub fn introduced_by(&self, k: usize) -> usize {
        self.introduced_by[k]
    }

    /// Evaluate every observable at a state point.
    pub fn lift(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(
            x.len(),
            self.n_x,
            "point dimension {} != n_x {}",
            x.len(),
            self.n_x
        );
        self.observables.iter().map(|m| m.eval(x)).collect()
    }

    /// Group observables by introducing state: `W_i` contains `x_{i+1}`
    /// first, then everything its closure added, in discovery order.
    pub fn decompose_per_state(&self) -> Vec<Vec<Monomial>> {
        let mut sets = vec![Vec::new(); self.n_x];
        for (k, m) in self.observables.iter().enumerate() {
            sets[self.introduced_by[k]].push(m.clone());
        }
        sets
    }

    pub(crate) fn from_parts(
        n_x: usize,
        observables: Vec<Monomial>,
        introduced_by: Vec<usize>,
    ) -> Self {
        let index = observables
            .iter()
            .enumerate()
            .map(|(k, m)| (m.clone(), k))
            .collect();
        LiftingSet {
            n_x,
            observables,
            index,
            introduced_by,
        }
    }
}

/// Run the worklist closure. `cap` bounds the observable count;
/// [`DEFAULT_CAP`] is a reasonable choice. The system is assumed
/// validated: non-triangular ones generally never close and hit the cap.
pub fn compute_lifting(spec: &SystemSpec, cap: usize) -> Result<LiftingSet, LiftError> {
    let n = spec.n_x();
    let mut observables: Vec<Monomial> = (0..n).map(|i| Monomial::var(n, i)).collect();
    let mut introduced_by: Vec<usize> = (0..n).collect();
    let mut index: HashMap<Monomial, usize> = observables
        .iter()
        .enumerate()
        .map(|(k, m)| (m.clone(), k))
        .collect();

    if observables.len() > cap {
        return Err(LiftError::CapExceeded {
            cap,
            discovered: observables.len(),
            processed: 0,
        });
    }

    // Appending while scanning by index is exactly FIFO processing, and
    // ParamPolynomial iterates its monomials in graded-lex order, which
    // settles the order of the new monomials within one derivative.
    let mut cursor = 0;
    while cursor < observables.len() {
        let owner = introduced_by[cursor];
        let derivative = lie_derivative(&observables[cursor], spec);
        for (mono, _) in derivative.iter() {
            if index.contains_key(mono) {
                continue;
            }
            if observables.len() == cap {
                return Err(LiftError::CapExceeded {
                    cap,
                    discovered: observables.len() + 1,
                    processed: cursor,
                });
            }
            index.insert(mono.clone(), observables.len());
            observables.push(mono.clone());
            introduced_by.push(owner);
        }
        cursor += 1;
    }

    Ok(LiftingSet {
        n_x: n,
        observables,
        index,
        introduced_by,
    })
}
