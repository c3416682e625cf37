//! Full verification report of a constructed example against a sphere.
//!
//! `cargo run --example verify`

use rectifying::immersion::builtin_by_name;
use rectifying::rectify::{classify, structure_report, ReportOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = ReportOptions::default();

    let x = builtin_by_name("rectifying:c=0.7,base=twisted_ellipse,m=5")?;
    let report = structure_report(&x, &x.default_grid(), &opts)?;
    print!("{}", report.to_text());

    let sphere = builtin_by_name("sphere")?;
    let report = classify(&sphere, &sphere.default_grid(), &opts)?;
    println!("\nsphere: {}", report.classification.summary);
    println!("sphere concurrency check: {:?}", report.check("concurrency").map(|c| c.verdict));
    Ok(())
}
