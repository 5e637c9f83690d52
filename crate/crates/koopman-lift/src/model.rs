//! The lifted linear model: system matrix A over symbolic parameters,
//! observable Jacobian, optional input matrix, and numeric realizations.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::InputExpr;
use crate::lifting::{lie_derivative, LiftingSet};
use crate::poly::{Monomial, ParamLinForm, UnboundParam};
use crate::system::{NumericSystem, SystemSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(
        "derivative of {observable} contains {monomial}, which the lifting \
         does not cover; the lifting was not closed for this system"
    )]
    BrokenClosure {
        observable: Monomial,
        monomial: Monomial,
    },
    #[error("order lists {got} observables, the model has {expected}")]
    OrderLength { expected: usize, got: usize },
    #[error("order entry {position} ({monomial}) is not an observable of this model")]
    UnknownObservable { position: usize, monomial: Monomial },
    #[error("order lists {monomial} more than once")]
    DuplicateObservable { monomial: Monomial },
    #[error(
        "order places {monomial} at position {to}; state observables must \
         stay at their own positions (expected {from})"
    )]
    MovesState {
        monomial: Monomial,
        from: usize,
        to: usize,
    },
}

/// Exact linear dynamics on the lifted coordinates: `dz/dt = A z`, with
/// `B(x) u` appended when the system carries an input map.
///
/// Row `k` of `A` holds the coordinates of the time derivative of
/// observable `k` in the observable basis, entries as linear forms over
/// the system parameters. The first `n_x` lifted coordinates are the
/// states themselves, so `x = C z` with `C = [I 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KoopmanModel {
    spec: SystemSpec,
    lifting: LiftingSet,
    /// per row: (column, entry) pairs sorted by column; absent means zero
    a_rows: Vec<Vec<(usize, ParamLinForm)>>,
    /// per row: (state, scale, monomial) triples — the entry of the
    /// observable Jacobian at (row, state) is scale * monomial
    jacobian: Vec<Vec<(usize, u32, Monomial)>>,
    /// input matrix as expressions in the states, one row per observable
    b_sym: Option<Vec<Vec<InputExpr>>>,
}

impl KoopmanModel {
    /// Assemble the model for a lifting closed with respect to `spec`.
    /// Fails when some derivative leaves the observable span, which means
    /// the lifting was computed for a different system.
    pub fn build(spec: SystemSpec, lifting: LiftingSet) -> Result<Self, ModelError> {
        assert_eq!(
            spec.n_x(),
            lifting.n_x(),
            "system has {} states, lifting covers {}",
            spec.n_x(),
            lifting.n_x()
        );

        let mut a_rows = Vec::with_capacity(lifting.len());
        for obs in lifting.observables() {
            let derivative = lie_derivative(obs, &spec);
            let mut row = Vec::with_capacity(derivative.n_terms());
            for (mono, form) in derivative.iter() {
                let Some(col) = lifting.position(mono) else {
                    return Err(ModelError::BrokenClosure {
                        observable: obs.clone(),
                        monomial: mono.clone(),
                    });
                };
                row.push((col, form.clone()));
            }
            row.sort_by_key(|(col, _)| *col);
            a_rows.push(row);
        }

        let jacobian: Vec<Vec<(usize, u32, Monomial)>> = lifting
            .observables()
            .iter()
            .map(|obs| {
                (0..spec.n_x())
                    .filter_map(|i| obs.partial(i).map(|(scale, mono)| (i, scale, mono)))
                    .collect()
            })
            .collect();

        let b_sym = spec
            .input()
            .map(|g| build_input_matrix(&jacobian, g, lifting.len()));

        Ok(KoopmanModel {
            spec,
            lifting,
            a_rows,
            jacobian,
            b_sym,
        })
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn lifting(&self) -> &LiftingSet {
        &self.lifting
    }

    /// Number of lifted coordinates.
    pub fn dim(&self) -> usize {
        self.lifting.len()
    }

    pub fn n_x(&self) -> usize {
        self.spec.n_x()
    }

    pub fn n_u(&self) -> usize {
        self.spec.n_u()
    }

    /// Entry of the symbolic system matrix; `None` is a structural zero.
    pub fn a_entry(&self, row: usize, col: usize) -> Option<&ParamLinForm> {
        let r = &self.a_rows[row];
        r.binary_search_by_key(&col, |(c, _)| *c)
            .ok()
            .map(|k| &r[k].1)
    }

    /// Nonzero entries of one row of A, sorted by column.
    pub fn a_row(&self, row: usize) -> &[(usize, ParamLinForm)] {
        &self.a_rows[row]
    }

    /// Jacobian row: (state, scale, monomial) triples for observable `row`.
    pub fn jacobian_row(&self, row: usize) -> &[(usize, u32, Monomial)] {
        &self.jacobian[row]
    }

    /// Symbolic input matrix rows, present when the system has an input map.
    pub fn b_sym(&self) -> Option<&Vec<Vec<InputExpr>>> {
        self.b_sym.as_ref()
    }

    /// The state-selection matrix `C = [I 0]` with `x = C z`.
    pub fn c_matrix(&self) -> Array2<f64> {
        let mut c = Array2::zeros((self.n_x(), self.dim()));
        for i in 0..self.n_x() {
            c[[i, i]] = 1.0;
        }
        c
    }

    /// Re-express the model on the same observables in a new order. The
    /// order must be a bijection on the observable set that keeps every
    /// state at its own position; dynamics are unchanged (the new A is the
    /// permutation conjugate of the old one).
    pub fn reorder(&self, order: &[Monomial]) -> Result<KoopmanModel, ModelError> {
        let n_f = self.dim();
        if order.len() != n_f {
            return Err(ModelError::OrderLength {
                expected: n_f,
                got: order.len(),
            });
        }
        let mut old_of = Vec::with_capacity(n_f);
        let mut taken = vec![false; n_f];
        for (pos, mono) in order.iter().enumerate() {
            let Some(old) = self.lifting.position(mono) else {
                return Err(ModelError::UnknownObservable {
                    position: pos,
                    monomial: mono.clone(),
                });
            };
            if taken[old] {
                return Err(ModelError::DuplicateObservable {
                    monomial: mono.clone(),
                });
            }
            taken[old] = true;
            if old < self.n_x() && pos != old {
                return Err(ModelError::MovesState {
                    monomial: mono.clone(),
                    from: old,
                    to: pos,
                });
            }
            old_of.push(old);
        }

        let mut new_of = vec![0usize; n_f];
        for (new, &old) in old_of.iter().enumerate() {
            new_of[old] = new;
        }

        let observables: Vec<Monomial> = order.to_vec();
        let introduced_by = old_of
            .iter()
            .map(|&old| self.lifting.introduced_by(old))
            .collect();
        let lifting = LiftingSet::from_parts(self.n_x(), observables, introduced_by);

        let a_rows = old_of
            .iter()
            .map(|&old| {
                let mut row: Vec<(usize, ParamLinForm)> = self.a_rows[old]
                    .iter()
                    .map(|(col, form)| (new_of[*col], form.clone()))
                    .collect();
                row.sort_by_key(|(col, _)| *col);
                row
            })
            .collect();
        let jacobian = old_of
            .iter()
            .map(|&old| self.jacobian[old].clone())
            .collect();
        let b_sym = self
            .b_sym
            .as_ref()
            .map(|b| old_of.iter().map(|&old| b[old].clone()).collect());

        Ok(KoopmanModel {
            spec: self.spec.clone(),
            lifting,
            a_rows,
            jacobian,
            b_sym,
        })
    }

    /// Bind all parameters and produce the numeric model.
    pub fn to_numeric(&self) -> Result<NumericModel, UnboundParam> {
        let n_f = self.dim();
        let params = self.spec.params();
        let mut a = Array2::zeros((n_f, n_f));
        for (row, entries) in self.a_rows.iter().enumerate() {
            for (col, form) in entries {
                a[[row, *col]] = form.eval(params)?;
            }
        }
        let jacobian = self
            .jacobian
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(i, scale, mono)| (*i, f64::from(*scale), mono.clone()))
                    .collect()
            })
            .collect();
        Ok(NumericModel {
            lifting: self.lifting.clone(),
            a,
            jacobian,
            b: self.b_sym.clone(),
            system: self.spec.compile()?,
        })
    }
}

/// Input matrix rows: the Jacobian row dotted with the input map,
/// `B[k][u] = sum_i dphi_k/dx_i * g[i][u]`, folded into readable form.
fn build_input_matrix(
    jacobian: &[Vec<(usize, u32, Monomial)>],
    g: &[Vec<InputExpr>],
    n_f: usize,
) -> Vec<Vec<InputExpr>> {
    let n_u = g[0].len();
    let mut b = Vec::with_capacity(n_f);
    for jac_row in jacobian.iter().take(n_f) {
        let row: Vec<InputExpr> = (0..n_u)
            .map(|u| {
                let mut terms: Vec<InputExpr> = jac_row
                    .iter()
                    .map(|(i, scale, mono)| {
                        InputExpr::Prod(vec![
                            InputExpr::Const(f64::from(*scale)),
                            monomial_expr(mono),
                            g[*i][u].clone(),
                        ])
                    })
                    .collect();
                let sum = match terms.len() {
                    0 => InputExpr::Const(0.0),
                    1 => terms.pop().unwrap(),
                    _ => InputExpr::Sum(terms),
                };
                sum.simplify()
            })
            .collect();
        b.push(row);
    }
    b
}

fn monomial_expr(m: &Monomial) -> InputExpr {
    let factors: Vec<InputExpr> = m
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| match e {
            1 => InputExpr::Var(i),
            e => InputExpr::Pow(Box::new(InputExpr::Var(i)), e),
        })
        .collect();
    match factors.len() {
        0 => InputExpr::Const(1.0),
        1 => factors.into_iter().next().unwrap(),
        _ => InputExpr::Prod(factors),
    }
}

/// The model with parameters bound: dense A, evaluable B, and the residual
/// machinery cross-checking the embedding against the original system.
#[derive(Debug, Clone)]
pub struct NumericModel {
    lifting: LiftingSet,
    a: Array2<f64>,
    jacobian: Vec<Vec<(usize, f64, Monomial)>>,
    b: Option<Vec<Vec<InputExpr>>>,
    system: NumericSystem,
}

impl NumericModel {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_x(&self) -> usize {
        self.lifting.n_x()
    }

    pub fn n_u(&self) -> usize {
        self.b.as_ref().map_or(0, |b| b[0].len())
    }

    pub fn has_input(&self) -> bool {
        self.b.is_some()
    }

    pub fn a(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn lifting(&self) -> &LiftingSet {
        &self.lifting
    }

    /// The compiled right-hand side of the original system.
    pub fn system(&self) -> &NumericSystem {
        &self.system
    }

    /// Evaluate the input matrix at a state point.
    /// Panics if the model has no input map.
    pub fn eval_b_x(&self, x: &[f64]) -> Array2<f64> {
        let b = self.b.as_ref().expect("model has no input map");
        let mut out = Array2::zeros((self.dim(), self.n_u()));
        for (k, row) in b.iter().enumerate() {
            for (u, expr) in row.iter().enumerate() {
                out[[k, u]] = expr.eval(x);
            }
        }
        out
    }

    /// Evaluate the input matrix with the scheduling variable read off the
    /// lifted state: every `x_i` inside B comes from coordinate `i` of `z`,
    /// which is valid because the states head the observable list.
    pub fn eval_b_z(&self, z: &[f64]) -> Array2<f64> {
        assert!(
            z.len() >= self.n_x(),
            "lifted point has {} coordinates, need at least {}",
            z.len(),
            self.n_x()
        );
        self.eval_b_x(&z[..self.n_x()])
    }

    /// Infinity norm of `J(x) f(x) - A Phi(x)`: how far the lifted linear
    /// dynamics are from the chain rule at one point. Exact embeddings
    /// leave floating-point noise only.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.residual_parts(x).0
    }

    /// Residual relative to `1 + max-abs of A Phi(x)`, the scale-aware form.
    /// Overflowed evaluations report as unbounded rather than `inf / inf`.
    pub fn residual_relative(&self, x: &[f64]) -> f64 {
        let (abs, scale) = self.residual_parts(x);
        if abs.is_finite() && scale.is_finite() {
            abs / scale
        } else {
            f64::INFINITY
        }
    }

    fn residual_parts(&self, x: &[f64]) -> (f64, f64) {
        let phi = self.lifting.lift(x);
        let mut f = vec![0.0; self.n_x()];
        self.system.rhs_autonomous(x, &mut f);
        let mut worst = 0.0f64;
        let mut a_phi_max = 0.0f64;
        for k in 0..self.dim() {
            let mut lhs = 0.0;
            for (i, scale, mono) in &self.jacobian[k] {
                lhs += scale * mono.eval(x) * f[*i];
            }
            let mut rhs = 0.0;
            for (j, p) in phi.iter().enumerate() {
                rhs += self.a[[k, j]] * p;
            }
            if !lhs.is_finite() || !rhs.is_finite() {
                // an overflowed row certifies nothing at this point, and
                // inf - inf would turn into a NaN that f64::max ignores
                return (f64::INFINITY, f64::INFINITY);
            }
            worst = worst.max((lhs - rhs).abs());
            a_phi_max = a_phi_max.max(rhs.abs());
        }
        (worst, 1.0 + a_phi_max)
    }

    /// Evaluate the residual at seeded uniform random points in a centered
    /// box. Identical configurations give identical reports.
    pub fn residual_sweep(&self, config: &SweepConfig) -> SweepReport {
        assert!(
            config.box_radius >= 0.0,
            "box radius must be nonnegative, got {}",
            config.box_radius
        );
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut max_absolute = 0.0f64;
        let mut max_relative = 0.0f64;
        let mut worst_point = Vec::new();
        for _ in 0..config.samples {
            let x: Vec<f64> = (0..self.n_x())
                .map(|_| rng.gen_range(-config.box_radius..=config.box_radius))
                .collect();
            let (abs, scale) = self.residual_parts(&x);
            // overflowed evaluations cannot certify anything — count them
            // as unbounded residuals rather than letting NaN slip through
            let rel = if abs.is_finite() && scale.is_finite() {
                abs / scale
            } else {
                f64::INFINITY
            };
            max_absolute = max_absolute.max(abs);
            if rel > max_relative || worst_point.is_empty() {
                max_relative = rel;
                worst_point = x;
            }
        }
        SweepReport {
            samples: config.samples,
            max_absolute,
            max_relative,
            worst_point,
            tolerance: config.tolerance,
        }
    }
}

/// Configuration of a random-state residual sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub samples: usize,
    pub seed: u64,
    pub box_radius: f64,
    /// bound on the relative residual for [`SweepReport::passed`]
    pub tolerance: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            samples: 1000,
            seed: 42,
            box_radius: 1.0,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub samples: usize,
    pub max_absolute: f64,
    /// max over samples of residual / (1 + max-abs of A Phi)
    pub max_relative: f64,
    pub worst_point: Vec<f64>,
    pub tolerance: f64,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.max_relative <= self.tolerance
    }
}
