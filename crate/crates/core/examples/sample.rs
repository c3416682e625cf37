//! Grid sampling with per-point residuals, computed on several threads.
//!
//! `cargo run --example sample`

use rectifying::immersion::builtin_by_name;
use rectifying::rectify::{analyze_grid, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cone = builtin_by_name("cone:base=small_circle")?;
    let points = analyze_grid(&cone, &cone.default_grid(), &Tolerances::default(), 4)?;
    println!("{:>8} {:>8} {:>12} {:>12} {:>12}", "s", "u2", "|x^T|", "|x^N|", "concurrency");
    for p in points.iter().step_by(10) {
        println!(
            "{:>8.4} {:>8.4} {:>12.4e} {:>12.4e} {:>12.4e}",
            p.point[0], p.point[1], p.rho, p.nu, p.concurrency
        );
    }
    Ok(())
}
