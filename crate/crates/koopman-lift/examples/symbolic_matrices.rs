//! Assemble the lifted system matrices symbolically: every entry of A
//! is a sum of the original parameters, never a floating-point value.

use koopman_lift::io::{parse_order, render_symbolic};
use koopman_lift::{compute_lifting, KoopmanModel, SystemSpec, DEFAULT_CAP};

fn main() {
    let spec = SystemSpec::builder(4)
        .linear(0, Some(-0.5))
        .linear(1, Some(-0.5))
        .linear(2, Some(-0.5))
        .linear(3, Some(-0.5))
        .term(1, &[3, 0, 0, 0], Some(-0.2))
        .term(2, &[1, 1, 0, 0], Some(-0.2))
        .term(2, &[0, 2, 0, 0], Some(-0.2))
        .term(3, &[1, 1, 1, 0], Some(-0.2))
        .build()
        .unwrap();
    let lifting = compute_lifting(&spec, DEFAULT_CAP).unwrap();
    let model = KoopmanModel::build(spec, lifting).unwrap();

    // the discovery order is canonical; re-display with the states
    // first and the closure monomials grouped per state equation
    let order = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/specs/grouped_order.txt"
    ));
    let wanted = parse_order(order, model.n_x()).unwrap();
    let model = model.reorder(&wanted).unwrap();

    print!("{}", render_symbolic(&model));
}
