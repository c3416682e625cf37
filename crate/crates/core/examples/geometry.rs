//! Fundamental forms, curvature by two routes, and the Codazzi residual on
//! a torus.
//!
//! `cargo run --example geometry`

use rectifying::geometry::{curvature, first_normal_space, shape_operator, snapshot};
use rectifying::immersion::torus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (big, small) = (2.0, 1.0);
    let t = torus(big, small)?;
    let p = [0.4, 0.7];
    let snap = snapshot(&t, &p)?;
    println!("metric g = {:.6}", snap.metric);
    println!("h_uu = {:?}", snap.h[0][0]);
    println!("h_vv = {:?}", snap.h[1][1]);

    let nsp = first_normal_space(&snap);
    println!("dim Im h = {}", nsp.dim);
    let xi = nsp.basis[0].clone();
    let a = shape_operator(&snap, &xi)?;
    println!("principal curvatures along {:?}: {:?}", xi, a.symmetric_eigenvalues().as_slice());

    let curv = curvature(&t, &p)?;
    let e = [1.0, 0.0];
    let f = [0.0, 1.0];
    let k = curv.sectional(&e, &f)?;
    let exact = p[1].cos() / (small * (big + small * p[1].cos()));
    println!("K = {k:.12} (closed form {exact:.12})");
    println!("Gauss equation residual   {:.3e}", curv.gauss_residual());
    println!("Codazzi equation residual {:.3e}", snap.codazzi_residual());
    Ok(())
}
