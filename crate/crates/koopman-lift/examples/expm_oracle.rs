//! Propagate the lifted system with the matrix exponential instead of
//! RK4. For an exact embedding with zero input, z(t) = exp(A t) z(0)
//! solves the lifted dynamics in closed form, so it doubles as an
//! integrator-free oracle for the nonlinear trajectory.

use koopman_lift::io::parse_spec;
use koopman_lift::{
    compare, compute_lifting, expm_propagate, integrate_nonlinear, InputSignal, KoopmanModel,
    DEFAULT_CAP,
};

fn main() {
    let text = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/specs/fourth_order.json"
    ));
    let doc = parse_spec(text).unwrap();
    let sim = doc.sim.clone().unwrap();

    let lifting = compute_lifting(&doc.system, DEFAULT_CAP).unwrap();
    let model = KoopmanModel::build(doc.system.clone(), lifting).unwrap();
    let numeric = model.to_numeric().unwrap();
    let system = doc.system.compile().unwrap();

    let x = integrate_nonlinear(&system, &sim.x0, &InputSignal::zero(0), sim.h, sim.t_end).unwrap();
    let z0 = numeric.lifting().lift(&sim.x0);
    let z = expm_propagate(numeric.a(), &z0, sim.h, sim.t_end).unwrap();

    let report = compare(&x, &z.project(doc.system.n_x())).unwrap();
    println!(
        "sup |x(t) - C exp(A t) z0| over [0, {}] = {:.3e}",
        sim.t_end, report.sup
    );
    println!("final state, both ways:");
    println!("  RK4  {:?}", x.last());
    println!("  expm {:?}", &z.last()[..doc.system.n_x()]);
}
