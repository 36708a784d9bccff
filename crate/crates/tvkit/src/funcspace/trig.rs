//! Trigonometric polynomials f(x) = sum_k (a_k cos kx + b_k sin kx).

use super::RealMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
}

impl TrigPolynomial {
    /// Build from cosine coefficients a_0..a_n and sine coefficients
    /// b_0..b_n. Requires equal lengths and b_0 = 0 (sin 0x contributes
    /// nothing).
    pub fn new(cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<Self> {
        if cos_coeffs.len() != sin_coeffs.len() {
            return Err(Error::Input(format!(
                "cos/sin coefficient lists must match: {} vs {}",
                cos_coeffs.len(),
                sin_coeffs.len()
            )));
        }
        if cos_coeffs.is_empty() {
            return Err(Error::Input("empty trigonometric polynomial".into()));
        }
        if sin_coeffs[0] != 0.0 {
            return Err(Error::Input(
                "sin coefficient at k = 0 must be exactly 0".into(),
            ));
        }
        Ok(Self {
            cos_coeffs,
            sin_coeffs,
        })
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin_coeffs
    }

    /// Largest k with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        (0..self.cos_coeffs.len())
            .rev()
            .find(|&k| self.cos_coeffs[k] != 0.0 || self.sin_coeffs[k] != 0.0)
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = self.cos_coeffs[0];
        for k in 1..self.cos_coeffs.len() {
            let kx = k as f64 * x;
            acc += self.cos_coeffs[k] * kx.cos() + self.sin_coeffs[k] * kx.sin();
        }
        acc
    }

    /// Exact coefficient-level derivative: structure is preserved,
    /// cos <-> sin swap with factor k.
    pub fn derivative(&self) -> TrigPolynomial {
        let n = self.cos_coeffs.len();
        let mut cos_d = vec![0.0; n];
        let mut sin_d = vec![0.0; n];
        for k in 1..n {
            cos_d[k] = k as f64 * self.sin_coeffs[k];
            sin_d[k] = -(k as f64) * self.cos_coeffs[k];
        }
        TrigPolynomial {
            cos_coeffs: cos_d,
            sin_coeffs: sin_d,
        }
    }
}

impl RealMap for TrigPolynomial {
    fn eval(&self, x: f64) -> f64 {
        TrigPolynomial::eval(self, x)
    }

    fn derivative_at(&self, x: f64, order: u32) -> f64 {
        let mut p = self.clone();
        for _ in 0..order {
            p = p.derivative();
        }
        p.eval(x)
    }

    fn derivative_scale(&self, _x: f64, order: u32) -> f64 {
        let mut acc = 0.0;
        for k in 1..self.cos_coeffs.len() {
            let amp = self.cos_coeffs[k].abs() + self.sin_coeffs[k].abs();
            acc += amp * (k as f64).powi(order as i32);
        }
        acc
    }

    fn max_local_order(&self) -> u32 {
        2 * self.degree() as u32 + 2
    }

    fn decomposition_breakpoints(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Input(
                "trigonometric decomposition requires a bounded interval".into(),
            ));
        }
        if self.is_constant() {
            return Err(Error::Input(
                "cannot decompose a constant trigonometric polynomial".into(),
            ));
        }
        let d1 = self.derivative();
        let d2 = d1.derivative();
        let mut pts = scan_roots(&d1, lo, hi);
        pts.extend(scan_roots(&d2, lo, hi));
        pts.sort_by(f64::total_cmp);
        let merge_tol = 1e-9 * (hi - lo).max(1.0);
        pts.dedup_by(|a, b| (*a - *b).abs() <= merge_tol);
        pts.retain(|&r| r > lo + merge_tol && r < hi - merge_tol);
        Ok(pts)
    }

    fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (k, &c) in self.cos_coeffs.iter().enumerate() {
            if c != 0.0 {
                parts.push(if k == 0 {
                    format!("{c}")
                } else {
                    format!("{c}*cos({k}x)")
                });
            }
        }
        for (k, &c) in self.sin_coeffs.iter().enumerate() {
            if c != 0.0 {
                parts.push(format!("{c}*sin({k}x)"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Sign-change scan plus bisection. A trig polynomial of degree n has at
/// most 2n zeros per period, so a grid of ~40 samples per potential
/// oscillation separates them for the coefficient ranges used here.
fn scan_roots(p: &TrigPolynomial, lo: f64, hi: f64) -> Vec<f64> {
    let n = p.degree().max(1);
    let step = std::f64::consts::PI / (40.0 * (n as f64 + 1.0));
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = p.eval(x0);
    let scale = p.derivative_scale(0.0, 0).max(1e-300);
    while x0 < hi {
        let x1 = (x0 + step).min(hi);
        let f1 = p.eval(x1);
        if f0 == 0.0 || (f0.abs() <= 1e-14 * scale) {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            roots.push(bisect(p, x0, x1));
        }
        x0 = x1;
        f0 = f1;
        if x1 >= hi {
            break;
        }
    }
    roots
}

fn bisect(p: &TrigPolynomial, mut a: f64, mut b: f64) -> f64 {
    let mut fa = p.eval(a);
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = p.eval(mid);
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}
