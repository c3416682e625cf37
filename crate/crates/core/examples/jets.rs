//! Truncated Taylor jets: derivatives to third order in one pass.
//!
//! `cargo run --example jets`

use rectifying::jets::{Jet, MAX_ORDER};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // f(x, y) = exp(x) sin(y) / (1 + x^2) at (0.3, 1.1)
    let v = Jet::seed(&[0.3, 1.1], MAX_ORDER)?;
    let (x, y) = (&v[0], &v[1]);
    let f = (&x.exp()? * &y.sin()).div(&(&(x * x) + 1.0))?;

    println!("f        = {:.12}", f.value());
    println!("f_x      = {:.12}", f.partial(&[0])?);
    println!("f_y      = {:.12}", f.partial(&[1])?);
    println!("f_xy     = {:.12}", f.partial(&[0, 1])?);
    println!("f_yyy    = {:.12}", f.partial(&[1, 1, 1])?);

    // closed form of f_yyy = -exp(x) cos(y) / (1 + x^2)
    let exact = -(0.3f64).exp() * (1.1f64).cos() / (1.0 + 0.09);
    println!("exact    = {exact:.12}");
    Ok(())
}
