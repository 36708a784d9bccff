//! Shift-modulus exponents for trigonometric polynomials.
//!
//! A degree-n trigonometric polynomial can have at most 2n - 1 vanishing
//! derivatives at a point (the flatness system's determinant is a
//! nonzero Vandermonde product), so the modulus exponent never drops
//! below 1/(2n). Generic maps sit at 1/2; a maximally flattened map
//! realizes the worst case.
//!
//! Run with: cargo run --example trig_modulus

use tvkit::bounds::trig_modulus_experiment;
use tvkit::funcspace::{local_order, Side, TrigPolynomial};
use tvkit::tvmetrics::ModulusCurve;

fn main() -> tvkit::Result<()> {
    let grid = ModulusCurve::geometric_grid(1e-4, 1e-2, 12)?;

    // generic degree-2 map: critical points have order 2
    let f = TrigPolynomial::new(vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 0.5])?;
    let (_, fit) = trig_modulus_experiment(&f, &grid, 1e-7)?;
    println!("f = cos x + 0.5 sin 2x (n = 2)");
    println!(
        "  fitted alpha = {:.4}  (flatness floor 1/(2n) = 0.25)\n",
        fit.alpha
    );

    // adversarial map: -4 cos x + cos 2x has f' = f'' = f''' = 0 at the
    // origin, the deepest flatness a degree-2 map allows
    let flat = TrigPolynomial::new(vec![0.0, -4.0, 1.0], vec![0.0, 0.0, 0.0])?;
    let (m, k) = local_order(&flat, 0.0, Side::Right)?;
    println!("flattened map -4 cos x + cos 2x: local order {m} (K = {k}) at x = 0");
    let (_, fit) = trig_modulus_experiment(&flat, &grid, 1e-7)?;
    println!("  fitted alpha = {:.4}  (expected near 1/4)", fit.alpha);
    Ok(())
}
