//! Constructive shift-modulus constants.
//!
//! For a strictly monotone convex (or concave) piece with local order
//! (m, K) at its anchor endpoint, the Lebesgue-source shift modulus
//! satisfies delta(u) <= 2 C u^{1/m} with
//!
//!   C = sup over the value range of |f^{-1}(x) - anchor| / |x - f(anchor)|^{1/m},
//!
//! whose limit at the anchor is K^{-1/m}. For a Lipschitz source density
//! with sup bound A and constant L the modulus obeys
//! delta(u) <= [3A + L(b-a)] C u^{1/m}. Summing these per-piece bounds
//! over a partition at the roots of f' and f'', plus unit-segment tail
//! sums that converge under Gaussian decay, yields a certified global
//! pair (alpha, C_total) with delta(u) <= C_total u^alpha for u in (0, 1].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{monotone_convex_decomposition, MonotonePiece, Polynomial, RealMap, Side};
use crate::measures::{invert_monotone_on, DensityModel};
use crate::tvmetrics::ModulusCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EstimateKind {
    Certified,
    Fitted,
}

/// A smoothness statement delta(u) <= C u^alpha, either certified by
/// construction or fitted from a measured curve.
#[derive(Debug, Clone, Serialize)]
pub struct BesovEstimate {
    pub alpha: f64,
    pub constant_c: f64,
    pub kind: EstimateKind,
    /// RMS log-residual of the fit (0 for certified estimates).
    pub residual: f64,
}

/// Per-piece data of a partition certificate.
#[derive(Debug, Clone, Serialize)]
pub struct PieceConstants {
    pub a: f64,
    pub b: f64,
    pub order_m: u32,
    pub order_k: f64,
    pub sup_a: f64,
    pub lipschitz_l: f64,
    pub modulus_c: f64,
    /// [3 A + L (b - a)] * C for this piece.
    pub contribution: f64,
}

/// The partition-and-sum certificate: central pieces between the
/// outermost derivative roots, unit-segment tails on both sides, and the
/// recorded truncation remainder.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionCertificate {
    pub breakpoints: Vec<f64>,
    pub central: Vec<PieceConstants>,
    pub right_tail: Vec<PieceConstants>,
    pub left_tail: Vec<PieceConstants>,
    pub alpha: f64,
    /// Sum over central pieces (C_1).
    pub central_constant: f64,
    /// Right tail sum (C_2), truncation included.
    pub right_constant: f64,
    /// Left tail sum (C_3), truncation included.
    pub left_constant: f64,
    pub truncation_bound: f64,
    /// C_1 + C_2 + C_3 with the truncation remainders folded in.
    pub total_constant: f64,
}

impl PartitionCertificate {
    pub fn estimate(&self) -> BesovEstimate {
        BesovEstimate {
            alpha: self.alpha,
            constant_c: self.total_constant,
            kind: EstimateKind::Certified,
            residual: 0.0,
        }
    }
}

/// The sharp monotone-piece constant: sup over the value range of
/// |f^{-1}(x) - anchor| / |x - f(anchor)|^{1/m}.
///
/// The sup is evaluated on a geometric grid refined toward the anchor
/// value (where the ratio is an indeterminate form) together with its
/// analytic limit K^{-1/m}. The grid has 10^4 points spanning relative
/// offsets 1e-12 .. 1 of the value range.
pub fn modulus_constant<M: RealMap + ?Sized>(map: &M, piece: &MonotonePiece) -> Result<f64> {
    if !piece.is_bounded() {
        return Err(Error::Input(
            "modulus constant needs a bounded piece; split tails into segments first".into(),
        ));
    }
    let m = piece.local_order_m as f64;
    let k = piece.local_constant_k;
    if !(k > 0.0) {
        return Err(Error::Input(
            "piece carries no positive local constant".into(),
        ));
    }
    let anchor = piece.anchor_point();
    let v_anchor = map.eval(anchor);
    let other = match piece.anchor {
        Side::Left => piece.b,
        Side::Right => piece.a,
    };
    let v_other = map.eval(other);
    let span = v_other - v_anchor;
    if span == 0.0 {
        return Err(Error::Input("piece has an empty value range".into()));
    }
    let increasing = map.eval(piece.b) >= map.eval(piece.a);

    let mut sup = k.powf(-1.0 / m);
    let n = 10_000;
    for j in 0..n {
        // offsets from 1e-12 to 1 of the range, geometric toward the anchor
        let s = 10f64.powf(-12.0 * (1.0 - j as f64 / (n - 1) as f64));
        let x = v_anchor + s * span;
        let inv = invert_monotone_on(map, piece.a, piece.b, increasing, x);
        let ratio = (inv - anchor).abs() / (x - v_anchor).abs().powf(1.0 / m);
        if ratio.is_finite() {
            sup = sup.max(ratio);
        }
    }
    Ok(sup)
}

/// The Lipschitz-source modulus bound [3A + L (b - a)] C u^{1/m} for a
/// single monotone piece, with A and L taken as the model's sup and
/// derivative bounds over the piece.
pub fn lipschitz_modulus_bound<M: RealMap + ?Sized>(
    map: &M,
    model: &DensityModel,
    piece: &MonotonePiece,
    u: f64,
) -> Result<f64> {
    if u < 0.0 {
        return Err(Error::Input(format!("modulus bound needs u >= 0, got {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let a = model.sup_density_on(piece.a, piece.b);
    let l = model.lipschitz_on(piece.a, piece.b);
    let c = modulus_constant(map, piece)?;
    let m = piece.local_order_m as f64;
    Ok((3.0 * a + l * (piece.b - piece.a)) * c * u.powf(1.0 / m))
}

fn piece_constants<M: RealMap + ?Sized>(
    map: &M,
    model: &DensityModel,
    piece: &MonotonePiece,
) -> Result<PieceConstants> {
    let sup_a = model.sup_density_on(piece.a, piece.b);
    let lipschitz_l = model.lipschitz_on(piece.a, piece.b);
    let modulus_c = modulus_constant(map, piece)?;
    let contribution = (3.0 * sup_a + lipschitz_l * (piece.b - piece.a)) * modulus_c;
    Ok(PieceConstants {
        a: piece.a,
        b: piece.b,
        order_m: piece.local_order_m,
        order_k: piece.local_constant_k,
        sup_a,
        lipschitz_l,
        modulus_c,
        contribution,
    })
}

/// Certified global modulus constant for a polynomial under a Gaussian
/// model: partition at the roots of f' and f'', per-piece Lipschitz
/// bounds in the central zone, unit-segment sums on the tails truncated
/// once a segment's bound falls below tail_tol * 2^{-j}.
///
/// Returns a certificate with alpha = 1 / max piece order and
/// delta(u) <= total_constant * u^alpha for u in (0, 1].
pub fn certified_modulus_constant(
    f: &Polynomial,
    model: &DensityModel,
    tail_tol: f64,
) -> Result<PartitionCertificate> {
    if !(tail_tol > 0.0) {
        return Err(Error::Input(format!(
            "tail tolerance must be positive, got {tail_tol}"
        )));
    }
    if !model.is_gaussian() {
        return Err(Error::Input(
            "tail summation relies on Gaussian decay; got a non-Gaussian model".into(),
        ));
    }
    if f.is_constant() {
        return Err(Error::Input("cannot certify a constant map".into()));
    }

    let breakpoints = f.decomposition_breakpoints(f64::NEG_INFINITY, f64::INFINITY)?;
    let (x_lo, x_hi) = match (breakpoints.first(), breakpoints.last()) {
        (Some(&first), Some(&last)) => (first, last),
        _ => {
            let c = model.center();
            (c, c)
        }
    };

    let mut m_max = 1u32;
    let mut central = Vec::new();
    if x_lo < x_hi {
        for piece in monotone_convex_decomposition(f, x_lo, x_hi)? {
            let pc = piece_constants(f, model, &piece)?;
            m_max = m_max.max(pc.order_m);
            central.push(pc);
        }
    }
    // + 0.0 turns the empty sum's -0.0 into +0.0 for clean reports
    let central_constant: f64 = central.iter().map(|p| p.contribution).sum::<f64>() + 0.0;

    let mut truncation_bound = 0.0;
    let mut sum_tail = |start: f64, dir: f64| -> Result<(Vec<PieceConstants>, f64)> {
        let mut rows = Vec::new();
        let mut total = 0.0;
        let mut prev = f64::INFINITY;
        for j in 0..600u32 {
            let (a, b) = if dir > 0.0 {
                (start + j as f64, start + j as f64 + 1.0)
            } else {
                (start - j as f64 - 1.0, start - j as f64)
            };
            let pieces = monotone_convex_decomposition(f, a, b)?;
            let mut seg = 0.0f64;
            let mut seg_m = 1u32;
            let mut seg_k = 0.0f64;
            let mut seg_c = 0.0f64;
            let mut seg_a = 0.0f64;
            let mut seg_l = 0.0f64;
            for piece in &pieces {
                let pc = piece_constants(f, model, piece)?;
                m_max = m_max.max(pc.order_m);
                seg += pc.contribution;
                seg_m = seg_m.max(pc.order_m);
                seg_k = pc.order_k;
                seg_c = seg_c.max(pc.modulus_c);
                seg_a = seg_a.max(pc.sup_a);
                seg_l = seg_l.max(pc.lipschitz_l);
            }
            rows.push(PieceConstants {
                a,
                b,
                order_m: seg_m,
                order_k: seg_k,
                sup_a: seg_a,
                lipschitz_l: seg_l,
                modulus_c: seg_c,
                contribution: seg,
            });
            total += seg;
            if seg < tail_tol * 0.5f64.powi(j as i32) {
                // Gaussian decay makes later segments shrink at least
                // geometrically; record the remainder conservatively
                let ratio = if prev.is_finite() && prev > 0.0 {
                    (seg / prev).min(0.5)
                } else {
                    0.5
                };
                let rem = seg * ratio / (1.0 - ratio);
                total += rem;
                truncation_bound += rem;
                break;
            }
            prev = seg;
        }
        Ok((rows, total))
    };

    let (right_tail, right_constant) = sum_tail(x_hi, 1.0)?;
    let (left_tail, left_constant) = sum_tail(x_lo, -1.0)?;

    Ok(PartitionCertificate {
        breakpoints,
        central,
        right_tail,
        left_tail,
        alpha: 1.0 / m_max as f64,
        central_constant,
        right_constant,
        left_constant,
        truncation_bound,
        total_constant: central_constant + right_constant + left_constant,
    })
}

/// Least-squares power-law fit log delta = log C + alpha log u over the
/// points of `curve` inside `window`. Saturated points (delta at the
/// 2 * mass ceiling) and non-positive values are excluded; at least 8
/// usable points are required.
pub fn fit_smoothness(curve: &ModulusCurve, window: (f64, f64)) -> Result<BesovEstimate> {
    let ceiling = 2.0 * curve.mass * (1.0 - 1e-9);
    let pts: Vec<(f64, f64)> = curve
        .u_grid
        .iter()
        .zip(&curve.delta_values)
        .filter(|(&u, &d)| u >= window.0 && u <= window.1 && d > 0.0 && d < ceiling)
        .map(|(&u, &d)| (u.ln(), d.ln()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::Input(format!(
            "need at least 8 usable points in the window, found {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Err(Error::Numeric(
            "degenerate u-grid for the power-law fit".into(),
        ));
    }
    let alpha = (n * sxy - sx * sy) / denom;
    let log_c = (sy - alpha * sx) / n;
    let residual = (pts
        .iter()
        .map(|&(x, y)| {
            let r = y - (log_c + alpha * x);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(BesovEstimate {
        alpha,
        constant_c: log_c.exp(),
        kind: EstimateKind::Fitted,
        residual,
    })
}

/// Check a certified estimate against a measured curve: delta(u) must
/// stay below C u^alpha with the stated slack on every grid point.
pub fn verify_certified(curve: &ModulusCurve, est: &BesovEstimate, slack: f64) -> bool {
    curve
        .u_grid
        .iter()
        .zip(&curve.delta_values)
        .all(|(&u, &d)| d <= est.constant_c * u.powf(est.alpha) + slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::monotone_convex_decomposition;
    use crate::measures::norm_cdf;
    use crate::tvmetrics::{modulus_curve, shift_modulus};

    fn single_piece(f: &Polynomial, lo: f64, hi: f64) -> MonotonePiece {
        let pieces = monotone_convex_decomposition(f, lo, hi).unwrap();
        assert_eq!(pieces.len(), 1, "expected one piece on [{lo}, {hi}]");
        pieces[0]
    }

    #[test]
    fn square_on_unit_interval_has_unit_constant() {
        let f = Polynomial::monomial(1.0, 2);
        let p = single_piece(&f, 0.0, 1.0);
        let c = modulus_constant(&f, &p).unwrap();
        assert!((c - 1.0).abs() < 1e-9, "got {c}");
    }

    #[test]
    fn identity_has_unit_constant() {
        let f = Polynomial::new(vec![0.0, 1.0]);
        let p = single_piece(&f, 0.0, 1.0);
        let c = modulus_constant(&f, &p).unwrap();
        assert!((c - 1.0).abs() < 1e-9, "got {c}");
    }

    #[test]
    fn curved_map_sup_at_left_limit() {
        // f = 2x + x^2 on [0,1]: inverse sqrt(1+x) - 1, ratio
        // (sqrt(1+x)-1)/x decreasing with sup 1/2 at the anchor
        let f = Polynomial::new(vec![0.0, 2.0, 1.0]);
        let p = single_piece(&f, 0.0, 1.0);
        assert_eq!(p.local_order_m, 1);
        assert!((p.local_constant_k - 2.0).abs() < 1e-12);
        let c = modulus_constant(&f, &p).unwrap();
        assert!((c - 0.5).abs() < 1e-9, "got {c}");
    }

    #[test]
    fn power_maps_modulus_identity_on_lebesgue() {
        // measured delta(u) = 2 u^{1/m} exactly for f = x^m on [0,1]
        let model = DensityModel::lebesgue_on(0.0, 1.0).unwrap();
        for m in 1..=5u32 {
            let f = Polynomial::monomial(1.0, m as usize);
            let piece = single_piece(&f, 0.0, 1.0);
            let c = modulus_constant(&f, &piece).unwrap();
            assert!((c - 1.0).abs() < 1e-9, "m={m} constant {c}");
            for &u in &[1e-4, 1e-2, 0.3] {
                let d = shift_modulus(&f, &model, u, 1e-10).unwrap().value;
                let exact = 2.0 * u.powf(1.0 / m as f64);
                assert!((d - exact).abs() < 1e-8, "m={m}, u={u}: {d} vs {exact}");
                assert!(d <= 2.0 * c * u.powf(1.0 / m as f64) + 1e-8);
            }
        }
    }

    #[test]
    fn lipschitz_bound_example_values() {
        // f = x^2 on [0,1], standard Gaussian restricted:
        // A = phi(0), L = phi(1), C = 1 -> bound(0.01) = (3A + L) * 0.1
        let f = Polynomial::monomial(1.0, 2);
        let gauss = DensityModel::standard_gaussian();
        let model = DensityModel::restricted(gauss, 0.0, 1.0).unwrap();
        let p = single_piece(&f, 0.0, 1.0);
        let b = lipschitz_modulus_bound(&f, &model, &p, 0.01).unwrap();
        let want = (3.0 * 0.3989422804014327 + 0.24197072451914337) * 0.1;
        assert!((b - want).abs() < 1e-9, "{b} vs {want}");
        assert_eq!(lipschitz_modulus_bound(&f, &model, &p, 0.0).unwrap(), 0.0);
        assert!(lipschitz_modulus_bound(&f, &model, &p, -0.1).is_err());
    }

    #[test]
    fn lipschitz_bound_dominates_uniform_case() {
        // Lebesgue on [0,1]: A = 1, L = 0; measured delta = 2 sqrt(u)
        let f = Polynomial::monomial(1.0, 2);
        let model = DensityModel::lebesgue_on(0.0, 1.0).unwrap();
        let p = single_piece(&f, 0.0, 1.0);
        let b = lipschitz_modulus_bound(&f, &model, &p, 0.04).unwrap();
        assert!((b - 0.6).abs() < 1e-9, "got {b}");
        let measured = shift_modulus(&f, &model, 0.04, 1e-10).unwrap().value;
        assert!((measured - 0.4).abs() < 1e-8);
        assert!(measured <= b);
    }

    #[test]
    fn certificate_for_identity_map() {
        let f = Polynomial::new(vec![0.0, 1.0]);
        let model = DensityModel::standard_gaussian();
        let cert = certified_modulus_constant(&f, &model, 1e-6).unwrap();
        assert_eq!(cert.alpha, 1.0);
        // sharp constant sqrt(2/pi): the certificate must dominate it
        let sharp = (2.0 / std::f64::consts::PI).sqrt();
        assert!(
            cert.total_constant >= sharp,
            "certified {}",
            cert.total_constant
        );
        // and the measured modulus obeys the certificate on a grid
        for &u in &[1e-3, 1e-2, 0.1, 1.0] {
            let d = 2.0 * (2.0 * norm_cdf(u / 2.0) - 1.0);
            assert!(d <= cert.total_constant * u + 1e-9);
        }
    }

    #[test]
    fn certificate_alpha_tracks_worst_order() {
        let model = DensityModel::standard_gaussian();
        let sq = certified_modulus_constant(&Polynomial::monomial(1.0, 2), &model, 1e-6).unwrap();
        assert!((sq.alpha - 0.5).abs() < 1e-12);
        let cube = certified_modulus_constant(&Polynomial::monomial(1.0, 3), &model, 1e-6).unwrap();
        assert!((cube.alpha - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn certificate_dominates_measured_chi_square() {
        let f = Polynomial::monomial(1.0, 2);
        let model = DensityModel::standard_gaussian();
        let cert = certified_modulus_constant(&f, &model, 1e-6).unwrap();
        let grid = ModulusCurve::geometric_grid(1e-4, 1.0, 12).unwrap();
        let curve = modulus_curve(&f, &model, &grid, 1e-8).unwrap();
        assert!(verify_certified(&curve, &cert.estimate(), 1e-6));
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let grid = ModulusCurve::geometric_grid(1e-4, 1e-1, 12).unwrap();
        let curve = ModulusCurve {
            delta_values: grid.iter().map(|&u| 2.0 * u.sqrt()).collect(),
            u_grid: grid,
            map_desc: "test".into(),
            model_desc: "test".into(),
            mass: 1.0,
        };
        let est = fit_smoothness(&curve, (0.0, 1.0)).unwrap();
        assert!((est.alpha - 0.5).abs() < 1e-12);
        assert!((est.constant_c - 2.0).abs() < 1e-12);
        assert!(est.residual < 1e-12);
    }

    #[test]
    fn fit_excludes_saturated_points() {
        let grid = ModulusCurve::geometric_grid(1e-3, 10.0, 16).unwrap();
        let curve = ModulusCurve {
            delta_values: grid.iter().map(|&u| (5.0 * u).min(2.0)).collect(),
            u_grid: grid,
            map_desc: "test".into(),
            model_desc: "test".into(),
            mass: 1.0,
        };
        let est = fit_smoothness(&curve, (0.0, 0.3)).unwrap();
        assert!((est.alpha - 1.0).abs() < 1e-9);
        assert!((est.constant_c - 5.0).abs() < 1e-9);
    }

    #[test]
    fn fit_needs_eight_points() {
        let curve = ModulusCurve {
            u_grid: vec![0.1, 0.2, 0.3],
            delta_values: vec![0.1, 0.2, 0.3],
            map_desc: "test".into(),
            model_desc: "test".into(),
            mass: 1.0,
        };
        assert!(fit_smoothness(&curve, (0.0, 1.0)).is_err());
    }
}
