//! The smoothing-decomposition bound calculator and the exponent
//! experiments.
//!
//! Given shift-modulus certificates delta_f(u) <= C_f u^alpha and
//! delta_g(u) <= C_g u^alpha, adding independent Gaussian noise xi =
//! sigma nu and comparing the smoothed laws exactly yields
//!
//!   TV(f(X), g(X)) <= C ||f - g||_1^{alpha/(alpha+1)},
//!   C = (C_f + C_g)^{1/(alpha+1)} (E|nu|^alpha + sqrt(pi/2)),
//!
//! clamped at 2. The three diagnostic terms delta_1 (smoothing of f),
//! delta_2 (smoothing of g) and delta_3 (exact Gaussian comparison) are
//! reported at the reference noise level sigma_opt.

use num_bigint::BigInt;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::besov::{fit_smoothness, BesovEstimate};
use crate::error::{Error, Result};
use crate::funcspace::{MultiPoly, TrigPolynomial};
use crate::measures::{ChiPowerDensity, DensityModel, Pushforward};
use crate::quad::gauss_hermite;
use crate::rng::{self, Rng};
use crate::tvmetrics::{
    l1_distance_mc, l1_distance_multi, modulus_curve_of_density, shift_modulus_pushforward,
    tv_histogram_mc, ModulusCurve, TVResult,
};

pub use crate::tvmetrics::smoothed_comparison;

/// E|nu|^alpha for standard Gaussian nu:
/// 2^{alpha/2} Gamma((alpha+1)/2) / sqrt(pi), via log-Gamma.
pub fn gaussian_abs_moment(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Input(format!(
            "moment exponent must be positive, got {alpha}"
        )));
    }
    let ln = 0.5 * alpha * std::f64::consts::LN_2 + libm::lgamma(0.5 * (alpha + 1.0))
        - 0.5 * std::f64::consts::PI.ln();
    Ok(ln.exp())
}

/// Full output of the smoothing bound.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub alpha: f64,
    pub c_f: f64,
    pub c_g: f64,
    /// E|nu|^alpha.
    pub abs_moment: f64,
    /// Reference noise level ((C_f + C_g) l1)^{1/(1+alpha)}.
    pub sigma_opt: f64,
    /// (C_f + C_g)^{1/(alpha+1)} (E|nu|^alpha + sqrt(pi/2)).
    pub constant_c: f64,
    pub l1: f64,
    pub raw_bound: f64,
    /// min(2, raw_bound).
    pub clamped_bound: f64,
    /// C_f sigma^alpha E|nu|^alpha at sigma_opt.
    pub delta1_bound: f64,
    pub delta2_bound: f64,
    /// (2 / (sigma sqrt(2 pi))) l1 at sigma_opt.
    pub delta3_bound: f64,
    /// Set when l1 = 0 (sigma_opt degenerates to 0).
    pub degenerate: bool,
}

/// Evaluate the smoothing bound for certified constants (c_f, c_g) with
/// exponent `alpha` at L1 distance `l1`.
pub fn smoothing_bound(c_f: f64, c_g: f64, alpha: f64, l1: f64) -> Result<BoundReport> {
    if c_f < 0.0 || c_g < 0.0 || l1 < 0.0 {
        return Err(Error::Input("constants and l1 must be non-negative".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::Input(format!("alpha must be positive, got {alpha}")));
    }
    let abs_moment = gaussian_abs_moment(alpha)?;
    let sum = c_f + c_g;
    let constant_c =
        sum.powf(1.0 / (alpha + 1.0)) * (abs_moment + (std::f64::consts::PI / 2.0).sqrt());
    if l1 == 0.0 {
        return Ok(BoundReport {
            alpha,
            c_f,
            c_g,
            abs_moment,
            sigma_opt: 0.0,
            constant_c,
            l1,
            raw_bound: 0.0,
            clamped_bound: 0.0,
            delta1_bound: 0.0,
            delta2_bound: 0.0,
            delta3_bound: 0.0,
            degenerate: true,
        });
    }
    let raw_bound = constant_c * l1.powf(alpha / (alpha + 1.0));
    let sigma_opt = (sum * l1).powf(1.0 / (1.0 + alpha));
    let smooth = sigma_opt.powf(alpha) * abs_moment;
    let delta3_bound = (2.0 / (sigma_opt * (2.0 * std::f64::consts::PI).sqrt())) * l1;
    Ok(BoundReport {
        alpha,
        c_f,
        c_g,
        abs_moment,
        sigma_opt,
        constant_c,
        l1,
        raw_bound,
        clamped_bound: raw_bound.min(2.0),
        delta1_bound: c_f * smooth,
        delta2_bound: c_g * smooth,
        delta3_bound,
        degenerate: false,
    })
}

/// Best decomposition value over sigma: min of
/// (C_f + C_g) E sigma^alpha + sqrt(2/pi) l1 / sigma. The raw bound
/// always dominates this minimum, which is what makes it a valid TV
/// bound for any noise level.
pub fn best_decomposition_sum(c_f: f64, c_g: f64, alpha: f64, l1: f64) -> Result<f64> {
    let e = gaussian_abs_moment(alpha)?;
    let s = c_f + c_g;
    if s == 0.0 || l1 == 0.0 {
        return Ok(0.0);
    }
    let b = (2.0 / std::f64::consts::PI).sqrt() * l1;
    let sigma = (b / (alpha * s * e)).powf(1.0 / (1.0 + alpha));
    Ok(s * e * sigma.powf(alpha) + b / sigma)
}

/// Inverse standard normal CDF (Acklam's rational approximation,
/// |relative error| < 1.2e-8; good enough for direction lattices).
fn norm_ppf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -norm_ppf(1.0 - p)
    }
}

/// sup over unit directions e of the L2(P) norm of the directional
/// derivative of `f` under the standard Gaussian.
///
/// The quadratic form e -> integral (d_e f)^2 dP is assembled once from
/// Gauss-Hermite tensor integrals of the partial-derivative products
/// (exact for polynomials at the given order), then maximized over a
/// quasi-uniform direction grid that doubles until the sup moves by
/// less than 1e-4.
pub fn directional_grad_norm(f: &MultiPoly, n_directions: usize, quad_order: usize) -> Result<f64> {
    let d = f.dim();
    if d > 6 {
        return Err(Error::Unsupported(format!(
            "directional norm limited to d <= 6, got {d}"
        )));
    }
    let order = quad_order.max(f.total_degree() as usize + 1);
    let partials: Vec<MultiPoly> = (0..d).map(|i| f.partial(i)).collect::<Result<_>>()?;

    // gram matrix M_ij = E[d_i f * d_j f]
    let (nodes, weights) = gauss_hermite(order);
    let sqrt2 = std::f64::consts::SQRT_2;
    let norm = std::f64::consts::PI.sqrt().powi(d as i32);
    let mut gram = vec![0.0f64; d * d];
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0f64; d];
    let mut grad = vec![0.0f64; d];
    'outer: loop {
        let mut w = 1.0;
        for k in 0..d {
            w *= weights[idx[k]];
            x[k] = sqrt2 * nodes[idx[k]];
        }
        for (k, p) in partials.iter().enumerate() {
            grad[k] = p.eval(&x)?;
        }
        for i in 0..d {
            for j in 0..d {
                gram[i * d + j] += w * grad[i] * grad[j];
            }
        }
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < order {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == d {
                break 'outer;
            }
        }
    }
    for v in gram.iter_mut() {
        *v /= norm;
    }

    let form = |e: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += e[i] * gram[i * d + j] * e[j];
            }
        }
        acc
    };

    let mut n = n_directions.max(if d == 1 { 1 } else { 64 });
    let mut last = grid_sup(&form, d, n);
    loop {
        if d == 1 {
            break;
        }
        n *= 2;
        let next = grid_sup(&form, d, n);
        let moved = (next.sqrt() - last.sqrt()).abs();
        last = next.max(last);
        if moved < 1e-4 || n > 1 << 20 {
            break;
        }
    }
    Ok(last.max(0.0).sqrt())
}

/// Sup of a quadratic form over n quasi-uniform unit directions.
fn grid_sup(form: &dyn Fn(&[f64]) -> f64, d: usize, n: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    match d {
        1 => best = form(&[1.0]),
        2 => {
            for i in 0..n {
                let th = std::f64::consts::PI * i as f64 / n as f64;
                best = best.max(form(&[th.cos(), th.sin()]));
            }
        }
        3 => {
            // Fibonacci sphere
            let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
            for i in 0..n {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let th = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
                best = best.max(form(&[r * th.cos(), r * th.sin(), z]));
            }
        }
        _ => {
            // Kronecker lattice mapped through the normal quantile
            let mut alphas = vec![0.0f64; d];
            let mut g = 1.0f64;
            // generalized golden ratios
            for _ in 0..8 {
                g = (1.0 + g).powf(1.0 / (d as f64 + 1.0));
            }
            for (k, a) in alphas.iter_mut().enumerate() {
                *a = (1.0 / g.powi(k as i32 + 1)).fract();
            }
            let mut e = vec![0.0f64; d];
            for i in 0..n {
                let mut norm2 = 0.0;
                for k in 0..d {
                    let u = ((i as f64 + 0.5) * alphas[k])
                        .fract()
                        .clamp(1e-9, 1.0 - 1e-9);
                    e[k] = norm_ppf(u);
                    norm2 += e[k] * e[k];
                }
                if norm2 > 0.0 {
                    let s = norm2.sqrt();
                    for v in e.iter_mut() {
                        *v /= s;
                    }
                    best = best.max(form(&e));
                }
            }
        }
    }
    best
}

/// Monte Carlo configuration for distribution comparisons.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McConfig {
    pub n_samples: usize,
    pub n_bins: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_samples: 400_000,
            n_bins: 512,
            seed: 7,
        }
    }
}

/// One point of a rate experiment: measured TV, L1 distance, and the
/// log-log coordinates for slope regression. The multiplicative
/// constant of the rate estimate is not computable from the certificate
/// machinery; only the exponent is tested downstream.
#[derive(Debug, Clone)]
pub struct RatePoint {
    pub tv: TVResult,
    pub l1: f64,
    pub log_l1: f64,
    pub log_tv: f64,
    /// True when f = g (the point carries no rate information).
    pub excluded: bool,
}

/// Measure (TV, L1) for a pair of multivariate polynomials under the
/// standard Gaussian, by histogram Monte Carlo and Gauss-Hermite / MC
/// quadrature.
pub fn rate_point(f: &MultiPoly, g: &MultiPoly, mc: &McConfig) -> Result<RatePoint> {
    if f.dim() != g.dim() {
        return Err(Error::Input(
            "rate point needs maps of equal dimension".into(),
        ));
    }
    let d = f.dim();
    let h = f.sub(g)?;
    if h.terms().is_empty() {
        return Ok(RatePoint {
            tv: TVResult {
                value: 0.0,
                method: crate::tvmetrics::TvMethod::MonteCarlo,
                error_estimate: 0.0,
            },
            l1: 0.0,
            log_l1: f64::NEG_INFINITY,
            log_tv: f64::NEG_INFINITY,
            excluded: true,
        });
    }

    let l1 = if d <= 3 {
        l1_distance_multi(f, g, 64)?
    } else {
        l1_distance_mc(f, g, mc.n_samples, mc.seed ^ 0x9e37_79b9_7f4a_7c15)?.0
    };

    // deterministic range scan before the comparison pass
    let range = {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut r = rng::substream(mc.seed, 2);
        let mut x = vec![0.0f64; d];
        for _ in 0..20_000 {
            for xi in x.iter_mut() {
                *xi = rng::standard_normal(&mut r);
            }
            let vf = f.eval(&x)?;
            let vg = g.eval(&x)?;
            lo = lo.min(vf.min(vg));
            hi = hi.max(vf.max(vg));
        }
        let pad = 0.05 * (hi - lo).max(1e-12);
        (lo - pad, hi + pad)
    };

    let fx = sampler_of(f.clone());
    let gx = sampler_of(g.clone());
    let tv = tv_histogram_mc(fx, gx, mc.n_samples, mc.n_bins, range, mc.seed)?;
    Ok(RatePoint {
        tv,
        l1,
        log_l1: l1.ln(),
        log_tv: tv.value.max(1e-300).ln(),
        excluded: false,
    })
}

/// Sampler for f(X), X standard Gaussian in the polynomial's dimension.
pub fn sampler_of(f: MultiPoly) -> impl FnMut(&mut Rng) -> f64 {
    let d = f.dim();
    let mut x = vec![0.0f64; d];
    move |r: &mut Rng| {
        for xi in x.iter_mut() {
            *xi = rng::standard_normal(r);
        }
        f.eval(&x).expect("dimension fixed at construction")
    }
}

/// Sampler for f(X) with X drawn from (the normalized version of)
/// `model`.
pub fn poly_sampler(
    f: crate::funcspace::Polynomial,
    model: DensityModel,
) -> impl FnMut(&mut Rng) -> f64 {
    move |r: &mut Rng| f.eval(model.sample(r))
}

/// Sampler for r^m with r = |X|, X standard Gaussian in R^d.
pub fn radial_sampler(d: u32, m: f64) -> impl FnMut(&mut Rng) -> f64 {
    move |r: &mut Rng| {
        let mut s = 0.0;
        for _ in 0..d {
            let x = rng::standard_normal(r);
            s += x * x;
        }
        s.sqrt().powf(m)
    }
}

/// Exact integer data of the flatness system determinant for degree-n
/// trigonometric polynomials: W = prod_{i<j} (j^2 - i^2) and
/// Delta = (n!)^3 W^2. Delta != 0 bounds the number of vanishing
/// derivatives at a point by 2n - 1.
#[derive(Debug, Clone)]
pub struct VandermondeCheck {
    pub n: u32,
    pub w: BigInt,
    pub delta: BigInt,
    pub nonzero: bool,
}

impl Serialize for VandermondeCheck {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // big integers as decimal strings
        let mut s = serializer.serialize_struct("VandermondeCheck", 4)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("w", &self.w.to_string())?;
        s.serialize_field("delta", &self.delta.to_string())?;
        s.serialize_field("nonzero", &self.nonzero)?;
        s.end()
    }
}

pub fn vandermonde_system_check(n: u32) -> Result<VandermondeCheck> {
    if n == 0 {
        return Err(Error::Input("need n >= 1".into()));
    }
    if n > 12 {
        return Err(Error::Unsupported(format!(
            "exact check limited to n <= 12, got {n}"
        )));
    }
    let mut w = BigInt::from(1);
    for i in 1..=n as i64 {
        for j in (i + 1)..=n as i64 {
            w *= BigInt::from(j * j - i * i);
        }
    }
    let mut fact = BigInt::from(1);
    for k in 2..=n as i64 {
        fact *= BigInt::from(k);
    }
    let delta = fact.pow(3) * w.pow(2);
    let nonzero = delta != BigInt::from(0);
    Ok(VandermondeCheck {
        n,
        w,
        delta,
        nonzero,
    })
}

/// Independent evaluation of the same determinant from the dense 2n x 2n
/// system matrix (rows sum_k k^{2l-1} b_k and sum_k k^{2l} a_k), by
/// fraction-free Bareiss elimination over the integers.
pub fn vandermonde_dense_determinant(n: u32) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Input("need n >= 1".into()));
    }
    if n > 12 {
        return Err(Error::Unsupported(format!(
            "exact check limited to n <= 12, got {n}"
        )));
    }
    let n = n as usize;
    let size = 2 * n;
    let mut mat = vec![vec![BigInt::from(0); size]; size];
    for l in 1..=n {
        for k in 1..=n {
            // odd derivatives constrain the sine coefficients
            mat[l - 1][k - 1] = BigInt::from(k as i64).pow(2 * l as u32 - 1);
            // even derivatives constrain the cosine coefficients
            mat[n + l - 1][n + k - 1] = BigInt::from(k as i64).pow(2 * l as u32);
        }
    }
    Ok(bareiss_determinant(mat))
}

fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k] == BigInt::from(0) {
            // pivot search
            let Some(swap) = (k + 1..n).find(|&r| m[r][k] != BigInt::from(0)) else {
                return BigInt::from(0);
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Shift-modulus experiment for a trigonometric polynomial under the
/// standard Gaussian: the pushforward is decomposed over the truncated
/// support, delta(u) is measured on the grid and a power law is fitted
/// over the full grid window.
///
/// A degree-n map has at most 2n - 1 vanishing derivatives at any point,
/// so the fitted exponent is expected at or above 1/(2n) generically.
pub fn trig_modulus_experiment(
    f: &TrigPolynomial,
    u_grid: &[f64],
    tol: f64,
) -> Result<(ModulusCurve, BesovEstimate)> {
    if f.is_constant() {
        return Err(Error::Input(
            "modulus experiment needs a non-constant map".into(),
        ));
    }
    let model = DensityModel::standard_gaussian();
    let pf = Pushforward::new(f.clone(), model.clone())?;
    let mut delta_values = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        delta_values.push(shift_modulus_pushforward(&pf, u, tol)?.value);
    }
    let curve = ModulusCurve {
        u_grid: u_grid.to_vec(),
        delta_values,
        map_desc: crate::funcspace::RealMap::describe(f),
        model_desc: model.describe(),
        mass: 1.0,
    };
    let window = (
        curve.u_grid.iter().cloned().fold(f64::INFINITY, f64::min),
        curve
            .u_grid
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max),
    );
    let fit = fit_smoothness(&curve, window)?;
    Ok((curve, fit))
}

/// Radial experiment: the law of r^m for r = |X|, X standard Gaussian in
/// R^d, has shift-modulus exponent min(1, d/m). Measured by quadrature
/// on the closed-form density.
pub fn radial_modulus_experiment(
    d: u32,
    m: f64,
    u_grid: &[f64],
    tol: f64,
) -> Result<(ModulusCurve, BesovEstimate)> {
    let q = ChiPowerDensity::new(d, m)?;
    let curve = modulus_curve_of_density(&q, &format!("radial d={d} m={m}"), u_grid, tol)?;
    let window = (
        curve.u_grid.iter().cloned().fold(f64::INFINITY, f64::min),
        curve
            .u_grid
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max),
    );
    let fit = fit_smoothness(&curve, window)?;
    Ok((curve, fit))
}
