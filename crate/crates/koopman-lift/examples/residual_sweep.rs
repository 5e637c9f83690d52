//! Certify exactness algebraically. At any state x the chain rule gives
//! d/dt Phi(x) = J(x) f(x); an exact lifting satisfies J(x) f(x) =
//! A Phi(x) identically, so the residual between the two sides is
//! floating-point noise — at every point, not just along trajectories.

use koopman_lift::io::parse_spec;
use koopman_lift::{compute_lifting, KoopmanModel, SweepConfig, DEFAULT_CAP};

fn main() {
    let text = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/specs/fourth_order.json"
    ));
    let doc = parse_spec(text).unwrap();
    let lifting = compute_lifting(&doc.system, DEFAULT_CAP).unwrap();
    let numeric = KoopmanModel::build(doc.system, lifting)
        .unwrap()
        .to_numeric()
        .unwrap();

    let config = SweepConfig {
        samples: 2000,
        seed: 7,
        box_radius: 1.5,
        tolerance: 1e-12,
    };
    let report = numeric.residual_sweep(&config);
    println!("{} random states in [-1.5, 1.5]^4", report.samples);
    println!("max absolute residual: {:.3e}", report.max_absolute);
    println!("max relative residual: {:.3e}", report.max_relative);
    println!("within 1e-12: {}", report.passed());

    let x = [0.3, -1.2, 0.8, 2.0];
    println!();
    println!(
        "single point {:?}: |J(x)f(x) - A Phi(x)| = {:.3e}",
        x,
        numeric.residual(&x)
    );
}
