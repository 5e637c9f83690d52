//! Shared fixtures: the fourth-order reference system, its published
//! matrix tables, and a seeded random-system generator.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use koopman_lift::{InputExpr, Monomial, ParamId, ParamLinForm, Rational, SystemSpec};

pub fn m(exps: &[u32]) -> Monomial {
    Monomial::from_exponents(exps.to_vec())
}

pub fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("specs")
        .join(name)
}

/// The four-state cascade used throughout: dx1 = a1 x1, dx2 = a2 x2 +
/// c x1^3, dx3 = a3 x3 + c x1 x2 + c x2^2, dx4 = a4 x4 + c x1 x2 x3,
/// with every a = -0.5 and every c = -0.2.
pub fn fourth_order() -> SystemSpec {
    SystemSpec::builder(4)
        .linear(0, Some(-0.5))
        .linear(1, Some(-0.5))
        .linear(2, Some(-0.5))
        .linear(3, Some(-0.5))
        .term(1, &[3, 0, 0, 0], Some(-0.2))
        .term(2, &[1, 1, 0, 0], Some(-0.2))
        .term(2, &[0, 2, 0, 0], Some(-0.2))
        .term(3, &[1, 1, 1, 0], Some(-0.2))
        .build()
        .expect("the cascade is lower triangular")
}

/// [`fourth_order`] with the input map g = (1, x1, x2^2, sin x3).
pub fn fourth_order_with_input() -> SystemSpec {
    SystemSpec::builder(4)
        .linear(0, Some(-0.5))
        .linear(1, Some(-0.5))
        .linear(2, Some(-0.5))
        .linear(3, Some(-0.5))
        .term(1, &[3, 0, 0, 0], Some(-0.2))
        .term(2, &[1, 1, 0, 0], Some(-0.2))
        .term(2, &[0, 2, 0, 0], Some(-0.2))
        .term(3, &[1, 1, 1, 0], Some(-0.2))
        .input(vec![
            vec![InputExpr::Const(1.0)],
            vec![InputExpr::Var(0)],
            vec![InputExpr::parse("x2^2").unwrap()],
            vec![InputExpr::parse("sin(x3)").unwrap()],
        ])
        .build()
        .expect("the cascade is lower triangular")
}

/// The publication ordering of the 19 observables: states first, then
/// closure monomials grouped by the state equation that spawned them.
pub fn grouped_order() -> Vec<Monomial> {
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [3, 0, 0, 0],
        [1, 1, 0, 0],
        [0, 2, 0, 0],
        [4, 0, 0, 0],
        [3, 1, 0, 0],
        [6, 0, 0, 0],
        [1, 1, 1, 0],
        [4, 0, 1, 0],
        [2, 2, 0, 0],
        [1, 3, 0, 0],
        [5, 1, 0, 0],
        [4, 2, 0, 0],
        [8, 0, 0, 0],
        [7, 1, 0, 0],
        [10, 0, 0, 0],
    ]
    .iter()
    .map(|e| m(e))
    .collect()
}

fn r(k: i64) -> Rational {
    Rational::from_integer(k)
}

fn form(entries: &[(ParamId, i64)]) -> ParamLinForm {
    let mut f = ParamLinForm::zero();
    for (id, k) in entries {
        f.add_scaled(&ParamLinForm::param(id.clone()), r(*k));
    }
    f
}

/// Every nonzero entry of the lifted A matrix in the grouped ordering,
/// as `(row, col, coefficient)` with 0-based indices. Entries absent
/// from this table are structural zeros.
pub fn expected_a_entries() -> Vec<(usize, usize, ParamLinForm)> {
    let a = |i: usize| ParamId::linear(i);
    let c23 = ParamId::poly(1, vec![3]);
    let c311 = ParamId::poly(2, vec![1, 1]);
    let c302 = ParamId::poly(2, vec![0, 2]);
    let c4111 = ParamId::poly(3, vec![1, 1, 1]);

    vec![
        (0, 0, form(&[(a(0), 1)])),
        (1, 1, form(&[(a(1), 1)])),
        (1, 4, form(&[(c23.clone(), 1)])),
        (2, 2, form(&[(a(2), 1)])),
        (2, 5, form(&[(c311.clone(), 1)])),
        (2, 6, form(&[(c302.clone(), 1)])),
        (3, 3, form(&[(a(3), 1)])),
        (3, 10, form(&[(c4111.clone(), 1)])),
        (4, 4, form(&[(a(0), 3)])),
        (5, 5, form(&[(a(0), 1), (a(1), 1)])),
        (5, 7, form(&[(c23.clone(), 1)])),
        (6, 6, form(&[(a(1), 2)])),
        (6, 8, form(&[(c23.clone(), 2)])),
        (7, 7, form(&[(a(0), 4)])),
        (8, 8, form(&[(a(0), 3), (a(1), 1)])),
        (8, 9, form(&[(c23.clone(), 1)])),
        (9, 9, form(&[(a(0), 6)])),
        (10, 10, form(&[(a(0), 1), (a(1), 1), (a(2), 1)])),
        (10, 11, form(&[(c23.clone(), 1)])),
        (10, 12, form(&[(c311.clone(), 1)])),
        (10, 13, form(&[(c302.clone(), 1)])),
        (11, 11, form(&[(a(0), 4), (a(2), 1)])),
        (11, 14, form(&[(c311, 1)])),
        (11, 15, form(&[(c302, 1)])),
        (12, 12, form(&[(a(0), 2), (a(1), 2)])),
        (12, 14, form(&[(c23.clone(), 2)])),
        (13, 13, form(&[(a(0), 1), (a(1), 3)])),
        (13, 15, form(&[(c23.clone(), 3)])),
        (14, 14, form(&[(a(0), 5), (a(1), 1)])),
        (14, 16, form(&[(c23.clone(), 1)])),
        (15, 15, form(&[(a(0), 4), (a(1), 2)])),
        (15, 17, form(&[(c23.clone(), 2)])),
        (16, 16, form(&[(a(0), 8)])),
        (17, 17, form(&[(a(0), 7), (a(1), 1)])),
        (17, 18, form(&[(c23, 1)])),
        (18, 18, form(&[(a(0), 10)])),
    ]
}

/// The published Jacobian dPhi/dx in the grouped ordering: per row, the
/// nonzero `(state, scale, reduced monomial)` entries in state order.
pub fn expected_jacobian() -> Vec<Vec<(usize, u32, Monomial)>> {
    let rows: Vec<Vec<(usize, u32, [u32; 4])>> = vec![
        vec![(0, 1, [0, 0, 0, 0])],
        vec![(1, 1, [0, 0, 0, 0])],
        vec![(2, 1, [0, 0, 0, 0])],
        vec![(3, 1, [0, 0, 0, 0])],
        vec![(0, 3, [2, 0, 0, 0])],
        vec![(0, 1, [0, 1, 0, 0]), (1, 1, [1, 0, 0, 0])],
        vec![(1, 2, [0, 1, 0, 0])],
        vec![(0, 4, [3, 0, 0, 0])],
        vec![(0, 3, [2, 1, 0, 0]), (1, 1, [3, 0, 0, 0])],
        vec![(0, 6, [5, 0, 0, 0])],
        vec![
            (0, 1, [0, 1, 1, 0]),
            (1, 1, [1, 0, 1, 0]),
            (2, 1, [1, 1, 0, 0]),
        ],
        vec![(0, 4, [3, 0, 1, 0]), (2, 1, [4, 0, 0, 0])],
        vec![(0, 2, [1, 2, 0, 0]), (1, 2, [2, 1, 0, 0])],
        vec![(0, 1, [0, 3, 0, 0]), (1, 3, [1, 2, 0, 0])],
        vec![(0, 5, [4, 1, 0, 0]), (1, 1, [5, 0, 0, 0])],
        vec![(0, 4, [3, 2, 0, 0]), (1, 2, [4, 1, 0, 0])],
        vec![(0, 8, [7, 0, 0, 0])],
        vec![(0, 7, [6, 1, 0, 0]), (1, 1, [7, 0, 0, 0])],
        vec![(0, 10, [9, 0, 0, 0])],
    ];
    rows.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|(state, scale, exps)| (state, scale, m(&exps)))
                .collect()
        })
        .collect()
}

/// Seeded lower-triangular systems: up to 5 states, up to 3 monomials
/// per state over earlier states only, per-variable degree up to 3,
/// every parameter bound. Identical seeds give identical corpora.
pub fn random_corpus(count: usize, seed: u64) -> Vec<SystemSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=5);
            let mut builder = SystemSpec::builder(n);
            for i in 0..n {
                builder = builder.linear(i, Some(rng.gen_range(-1.0..=-0.1)));
                if i == 0 {
                    continue;
                }
                for _ in 0..rng.gen_range(0..=3) {
                    let mut exps = vec![0u32; n];
                    for e in exps.iter_mut().take(i) {
                        *e = rng.gen_range(0..=3);
                    }
                    let magnitude = rng.gen_range(0.05..=0.5);
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    builder = builder.term(i, &exps, Some(sign * magnitude));
                }
            }
            builder.build().expect("generated systems are triangular")
        })
        .collect()
}
