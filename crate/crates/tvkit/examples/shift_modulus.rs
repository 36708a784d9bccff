//! The shift modulus delta(u): total variation between the law of f(X)
//! and the same law translated by u. Its power-law growth C u^alpha is
//! the smoothness input of the TV bound machinery.
//!
//! For f = x^m on Lebesgue [0, 1] the modulus is exactly 2 u^{1/m}; for
//! f = x^2 under a Gaussian the exponent 1/2 appears in the fit.
//!
//! Run with: cargo run --example shift_modulus

use tvkit::besov::fit_smoothness;
use tvkit::funcspace::Polynomial;
use tvkit::measures::DensityModel;
use tvkit::tvmetrics::{modulus_curve, shift_modulus, ModulusCurve};

fn main() -> tvkit::Result<()> {
    // exact identity on the unit interval
    let model = DensityModel::lebesgue_on(0.0, 1.0)?;
    println!("f = x^m on Lebesgue[0,1]: delta(u) vs 2 u^(1/m)");
    for m in 1..=4usize {
        let f = Polynomial::monomial(1.0, m);
        let u = 0.01;
        let d = shift_modulus(&f, &model, u, 1e-10)?;
        println!(
            "  m={m}: delta(0.01) = {:.12}, exact {:.12}",
            d.value,
            2.0 * u.powf(1.0 / m as f64)
        );
    }

    // fitted exponent for the chi-squared law
    let f = Polynomial::monomial(1.0, 2);
    let gauss = DensityModel::standard_gaussian();
    let grid = ModulusCurve::geometric_grid(1e-4, 1e-1, 15)?;
    let curve = modulus_curve(&f, &gauss, &grid, 1e-9)?;
    println!("\nf = x^2 under N(0,1):");
    for (u, d) in curve.u_grid.iter().zip(&curve.delta_values).step_by(3) {
        println!("  delta({u:.1e}) = {d:.8}");
    }
    let fit = fit_smoothness(&curve, (1e-4, 1e-1))?;
    println!(
        "  fitted: delta(u) ~ {:.4} u^{:.4} (rms log residual {:.1e})",
        fit.constant_c, fit.alpha, fit.residual
    );
    Ok(())
}
