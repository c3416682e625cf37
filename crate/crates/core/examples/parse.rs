//! Parse an `.imm` immersion spec, print it back, evaluate jets, and show a
//! located parse error.
//!
//! `cargo run --example parse`

use rectifying::exprdsl::{eval_spec, parse_immersion};

const SOURCE: &str = "\
# torus of revolution
dim 2 -> 3
vars u, v
const R = 2
const r = 1
x = [(R + r*cos(v))*cos(u), (R + r*cos(v))*sin(u), r*sin(v)]
u in [0, 2*pi]
v in [-1, 1]
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = parse_immersion(SOURCE)?;
    println!("variables: {:?}, constants: {:?}", spec.var_names, spec.constants);
    let printed = spec.to_source();
    println!("--- printed ---\n{printed}");
    assert_eq!(parse_immersion(&printed)?, spec);

    let jets = eval_spec(&spec, &[0.5, 0.2], 2)?;
    for (i, j) in jets.iter().enumerate() {
        println!("x{i} = {:+.6}  grad = {:?}", j.value(), j.gradient());
    }

    let broken = "dim 1 -> 2\nx = [cos(s), sin(s) +]\ns in [0, 1]\n";
    match parse_immersion(broken) {
        Ok(_) => unreachable!(),
        Err(e) => println!("error: {e}"),
    }
    Ok(())
}
