//! Frenet apparatus of a helix and of a constructed rectifying curve.
//!
//! `cargo run --example frenet`

use rectifying::immersion::{builtin_by_name, helix};
use rectifying::rectify::{frenet, frenet_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = helix(3.0, 4.0)?;
    let f = frenet(&h, 1.0)?;
    println!("helix(3, 4): kappa = {:.12}, tau = {:.12}", f.kappa, f.tau);

    let curve = builtin_by_name("rectifying_curve:c=1,base=small_circle")?;
    let report = frenet_table(&curve, &curve.default_grid(), 1e-8, 1)?;
    print!("{}", report.to_text());

    // a great-circle base collapses to a straight line
    let line = builtin_by_name("rectifying_curve:c=1,base=circle")?;
    match frenet(&line, 1.0) {
        Ok(_) => println!("unexpected Frenet frame"),
        Err(e) => println!("{e}"),
    }
    Ok(())
}
