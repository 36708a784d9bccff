//! Exact integer check that a degree-n trigonometric polynomial cannot
//! have 2n vanishing derivatives at a point: the determinant of the
//! flatness system factors as (n!)^3 W^2 with W the Vandermonde product
//! prod_{i<j} (j^2 - i^2), which never vanishes. Cross-checked against
//! a dense fraction-free (Bareiss) determinant of the 2n x 2n system.
//!
//! Run with: cargo run --example vandermonde

use tvkit::bounds::{vandermonde_dense_determinant, vandermonde_system_check};

fn main() -> tvkit::Result<()> {
    println!("n   W = prod (j^2 - i^2)        Delta = (n!)^3 W^2                 dense agrees");
    for n in 1..=8 {
        let c = vandermonde_system_check(n)?;
        let dense = vandermonde_dense_determinant(n)?;
        println!(
            "{n}   {:<26} {:<34} {}",
            c.w.to_string(),
            c.delta.to_string(),
            dense == c.delta
        );
        assert!(c.nonzero);
    }
    println!("\nnonzero determinants force flatness order <= 2n - 1, hence alpha >= 1/(2n)");
    Ok(())
}
