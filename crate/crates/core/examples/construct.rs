//! Build a rectifying submanifold over a spherical ellipse and check the
//! position vector against the first normal space.
//!
//! `cargo run --example construct`

use rectifying::geometry::snapshot;
use rectifying::immersion::{construct_rectifying, rectifying_spec, BaseFamily, DEFAULT_T_RANGE};
use rectifying::rectify::{position_split, rectifying_residual};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = 1.5;
    let family = BaseFamily::Ellipse { a: 1.0, b: 0.5, d: 0.8 };
    let base = family.factor(4)?;
    let x = construct_rectifying(c, &base, DEFAULT_T_RANGE)?;
    println!("{}: n = {}, m = {}", x.label(), x.chart_dim(), x.ambient_dim());

    for p in x.default_grid().points().iter().step_by(20) {
        let snap = snapshot(&x, p)?;
        let split = position_split(&snap);
        println!(
            "s = {:.4}  |x^T| = {:.12}  |x^N| = {:.12}  residual = {:.2e}",
            p[0],
            split.rho,
            split.nu,
            rectifying_residual(&snap)
        );
    }

    println!("--- .imm source ---");
    print!("{}", rectifying_spec(c, family, 5, DEFAULT_T_RANGE)?.to_source());
    Ok(())
}
