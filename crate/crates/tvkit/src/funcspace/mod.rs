//! Models of the maps under study (univariate polynomials, trigonometric
//! polynomials, multivariate monomial polynomials) and their
//! decomposition into monotone convex-or-concave pieces at the roots of
//! the first two derivatives.

mod multipoly;
mod polynomial;
mod trig;

pub use multipoly::MultiPoly;
pub use polynomial::Polynomial;
pub use trig::TrigPolynomial;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Convex,
    Concave,
}

/// Which endpoint of a piece the local-order expansion is anchored at.
/// The anchor is the endpoint where |f'| attains its minimum over the
/// piece, i.e. the only place the derivative may vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// An interval on which the map is strictly monotone with constant
/// convexity. `b` may be +inf (and `a` -inf) for tail pieces of an
/// unbounded decomposition.
///
/// `(local_order_m, local_constant_k)` describe the leading behaviour at
/// the anchor endpoint: |f(x) - f(anchor)| ~ K |x - anchor|^m.
#[derive(Debug, Clone, Copy)]
pub struct MonotonePiece {
    pub a: f64,
    pub b: f64,
    pub direction: Direction,
    pub shape: Shape,
    pub local_order_m: u32,
    pub local_constant_k: f64,
    pub anchor: Side,
    pub tail: bool,
}

impl MonotonePiece {
    pub fn anchor_point(&self) -> f64 {
        match self.anchor {
            Side::Left => self.a,
            Side::Right => self.b,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

/// A univariate map smooth enough to be decomposed into monotone convex
/// pieces. Implemented by [`Polynomial`] (exact Sturm isolation of the
/// derivative roots) and [`TrigPolynomial`] (sign-scan isolation).
pub trait RealMap {
    fn eval(&self, x: f64) -> f64;
    /// Value of the `order`-th derivative at x (order 0 = the map).
    fn derivative_at(&self, x: f64, order: u32) -> f64;
    /// Magnitude scale of the `order`-th derivative at x, for relative
    /// zero tests.
    fn derivative_scale(&self, x: f64, order: u32) -> f64;
    /// Upper bound on the order scanned by [`local_order`].
    fn max_local_order(&self) -> u32;
    /// Breakpoints of the decomposition: all roots of f' and f'' inside
    /// (lo, hi), sorted, duplicates merged.
    fn decomposition_breakpoints(&self, lo: f64, hi: f64) -> Result<Vec<f64>>;
    fn describe(&self) -> String;
}

/// Leading local behaviour of `f` at `point`: the smallest m >= 1 with
/// f^(m)(point) != 0, and K = |f^(m)(point)| / m!.
///
/// Exact zeros of derivatives are decided relative to the magnitude of
/// the evaluated terms (threshold 1e-12), so constructed rational
/// coefficients behave as in exact arithmetic.
pub fn local_order<M: RealMap + ?Sized>(map: &M, point: f64, _toward: Side) -> Result<(u32, f64)> {
    let mut factorial = 1.0f64;
    for k in 1..=map.max_local_order() {
        factorial *= k as f64;
        let v = map.derivative_at(point, k);
        let scale = map.derivative_scale(point, k).max(1e-300);
        if v.abs() > 1e-12 * scale {
            return Ok((k, v.abs() / factorial));
        }
    }
    Err(Error::Internal(format!(
        "all derivatives up to order {} vanish at {point} for {}",
        map.max_local_order(),
        map.describe()
    )))
}

/// Decompose `map` on [lo, hi] into monotone convex-or-concave pieces.
///
/// Breakpoints are exactly the merged roots of f' and f'' inside the
/// interval. Infinite endpoints are truncated just beyond the last
/// critical point (all pieces outside carry constant monotonicity and
/// convexity) and the outermost pieces keep their infinite ends, flagged
/// as tails.
pub fn monotone_convex_decomposition<M: RealMap + ?Sized>(
    map: &M,
    lo: f64,
    hi: f64,
) -> Result<Vec<MonotonePiece>> {
    if lo >= hi {
        return Err(Error::Input(format!(
            "empty decomposition domain [{lo}, {hi}]"
        )));
    }
    let breakpoints = map.decomposition_breakpoints(lo, hi)?;

    // probe bounds for infinite ends: just beyond the outermost breakpoint
    let probe_lo = if lo.is_finite() {
        lo
    } else {
        breakpoints.first().copied().unwrap_or(0.0) - 1.0
    };
    let probe_hi = if hi.is_finite() {
        hi
    } else {
        breakpoints.last().copied().unwrap_or(0.0) + 1.0
    };

    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(lo);
    edges.extend(breakpoints.iter().copied());
    edges.push(hi);

    let mut pieces = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a >= b {
            continue;
        }
        let pa = a.max(probe_lo);
        let pb = b.min(probe_hi);
        let mid = 0.5 * (pa + pb);
        let d1 = map.derivative_at(mid, 1);
        let d2 = map.derivative_at(mid, 2);
        let direction = if d1 >= 0.0 {
            Direction::Increasing
        } else {
            Direction::Decreasing
        };
        let shape = if d2 >= 0.0 {
            Shape::Convex
        } else {
            Shape::Concave
        };
        let anchor = match (direction, shape) {
            (Direction::Increasing, Shape::Convex) | (Direction::Decreasing, Shape::Concave) => {
                Side::Left
            }
            _ => Side::Right,
        };
        let tail = !a.is_finite() || !b.is_finite();
        let anchor_pt = match anchor {
            Side::Left => pa,
            Side::Right => pb,
        };
        let (m, k) = local_order(
            map,
            anchor_pt,
            if anchor == Side::Left {
                Side::Right
            } else {
                Side::Left
            },
        )?;
        pieces.push(MonotonePiece {
            a,
            b,
            direction,
            shape,
            local_order_m: m,
            local_constant_k: k,
            anchor,
            tail,
        });
    }
    if pieces.is_empty() {
        return Err(Error::Internal("decomposition produced no pieces".into()));
    }
    Ok(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_splits_at_origin() {
        let f = Polynomial::monomial(1.0, 3);
        let pieces = monotone_convex_decomposition(&f, -1.0, 1.0).unwrap();
        assert_eq!(pieces.len(), 2);
        assert!(pieces[0].b.abs() < 1e-12);
        assert_eq!(pieces[0].direction, Direction::Increasing);
        assert_eq!(pieces[0].shape, Shape::Concave);
        assert_eq!(pieces[0].anchor, Side::Right);
        assert_eq!(pieces[0].local_order_m, 3);
        assert!((pieces[0].local_constant_k - 1.0).abs() < 1e-12);
        assert_eq!(pieces[1].shape, Shape::Convex);
        assert_eq!(pieces[1].anchor, Side::Left);
    }

    #[test]
    fn parabola_two_pieces() {
        let f = Polynomial::monomial(1.0, 2);
        let pieces = monotone_convex_decomposition(&f, -2.0, 2.0).unwrap();
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].direction, Direction::Decreasing);
        assert_eq!(pieces[0].anchor, Side::Right);
        assert_eq!(pieces[0].local_order_m, 2);
        assert!((pieces[1].local_constant_k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_single_piece() {
        let f = Polynomial::new(vec![1.0, 2.0]);
        let pieces = monotone_convex_decomposition(&f, -5.0, 5.0).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].local_order_m, 1);
        assert!((pieces[0].local_constant_k - 2.0).abs() < 1e-12);
    }

    #[test]
    fn local_order_examples() {
        let f = Polynomial::monomial(1.0, 2);
        let (m, k) = local_order(&f, 0.0, Side::Right).unwrap();
        assert_eq!((m, k), (2, 1.0));

        let f = Polynomial::monomial(3.0, 4);
        let (m, k) = local_order(&f, 0.0, Side::Right).unwrap();
        assert_eq!((m, k), (4, 3.0));

        let f = Polynomial::new(vec![0.0, -7.0, 1.0]);
        let (m, k) = local_order(&f, 0.0, Side::Right).unwrap();
        assert_eq!(m, 1);
        assert!((k - 7.0).abs() < 1e-12);
    }

    #[test]
    fn taylor_ratio_matches_local_order() {
        // |f(x) - f(a)| ~ K (x-a)^m near the anchor, within 10% at
        // x = a + 1e-6 (b - a)
        let f = Polynomial::new(vec![0.0, 0.0, -1.0, 1.0]); // x^3 - x^2
        let pieces = monotone_convex_decomposition(&f, -1.0, 2.0).unwrap();
        for p in &pieces {
            if !p.is_bounded() {
                continue;
            }
            let a = p.anchor_point();
            let toward: f64 = if p.anchor == Side::Left { 1.0 } else { -1.0 };
            let dx = 1e-6 * (p.b - p.a);
            let x = a + toward * dx;
            let lhs = (f.eval(x) - f.eval(a)).abs();
            let rhs = p.local_constant_k * dx.powi(p.local_order_m as i32);
            assert!(
                (lhs / rhs - 1.0).abs() < 0.1,
                "piece [{}, {}] ratio {}",
                p.a,
                p.b,
                lhs / rhs
            );
        }
    }

    #[test]
    fn unbounded_domain_tail_pieces() {
        let f = Polynomial::new(vec![0.0, -1.0, 0.0, 1.0]); // x^3 - x
        let pieces = monotone_convex_decomposition(&f, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!(pieces.first().unwrap().tail);
        assert!(pieces.last().unwrap().tail);
        assert!(pieces.first().unwrap().a.is_infinite());
        // breakpoints: f' roots at +-1/sqrt(3), f'' root at 0
        assert_eq!(pieces.len(), 4);
    }
}
