//! Parse system files and surface their diagnostics with positions.

use koopman_lift::io::parse_spec;

fn main() {
    let good = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/specs/fourth_order_input.json"
    ));
    let doc = parse_spec(good).expect("the shipped file is valid");
    println!(
        "parsed: {} states, {} input channels",
        doc.system.n_x(),
        doc.system.n_u()
    );
    if let Some(sim) = &doc.sim {
        println!(
            "sim defaults: h = {}, T = {}, x0 = {:?}",
            sim.h, sim.t_end, sim.x0
        );
    }

    // upward coupling (state 2 reading x3) breaks lower-triangularity;
    // the parser rejects it and points at the offending term
    let broken = r#"{
  "n_x": 3,
  "states": [
    { "a": -1 },
    { "a": -1, "terms": [ { "coeff": 1, "exponents": [0, 0, 1] } ] },
    { "a": -1 }
  ]
}"#;
    println!();
    println!("a forward-coupled file is rejected:");
    for d in parse_spec(broken).expect_err("must not parse") {
        println!("  {d}");
    }
}
