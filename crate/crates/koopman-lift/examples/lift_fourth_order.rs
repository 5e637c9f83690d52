//! Build the fourth-order triangular cascade in code and close it into
//! a finite observable set.
//!
//! Each nonlinear term seeds a monomial observable; differentiating
//! observables along the flow keeps producing monomials until the set
//! closes. For this cascade that happens after 19 observables.

use koopman_lift::{compute_lifting, SystemSpec, DEFAULT_CAP};

fn main() {
    // x1' = a1 x1
    // x2' = a2 x2 + c x1^3
    // x3' = a3 x3 + c x1 x2 + c x2^2
    // x4' = a4 x4 + c x1 x2 x3
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
        .expect("lower-triangular by construction");

    let lifting = compute_lifting(&spec, DEFAULT_CAP).expect("closes");

    println!("{} observables close the cascade:", lifting.len());
    for (k, obs) in lifting.observables().iter().enumerate() {
        println!("  z{:<2} = {obs}", k + 1);
    }

    println!();
    println!("grouped by the state equation that spawned them:");
    for (i, set) in lifting.decompose_per_state().iter().enumerate() {
        let names: Vec<String> = set.iter().map(|m| m.to_string()).collect();
        println!("  W{}: {}", i + 1, names.join(", "));
    }
}
