//! Univariate real polynomials with exact coefficient-level calculus and
//! Sturm-sequence real root isolation.
//!
//! Coefficients are stored in ascending order: `coeffs[k]` multiplies x^k.
//! (Sources that write f(x) = sum a_k x^{m-k} index descending; reverse
//! the list when importing such data.)

use super::RealMap;
use crate::error::{Error, Result};

/// Threshold below which a Sturm-chain remainder is treated as the
/// exact zero that ends the chain (the gcd stage at a multiple root).
/// Chains are renormalized to unit max-coefficient at every step, and
/// division noise accumulates to ~1e-13 across a degree-8 cascade, so
/// the cut sits three orders above that. Distinct roots closer than the
/// corresponding ~1e-5 resolution alias as multiple roots, which the
/// downstream merge tolerance already treats as one root.
const CHAIN_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Build from ascending coefficients; trailing zeros are trimmed so
    /// the leading coefficient is nonzero (the zero polynomial keeps a
    /// single 0 entry).
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// Monomial c * x^k.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sum of |c_k x^k|; the natural scale of `eval` at x, used for
    /// relative zero tests.
    pub fn eval_scale(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        let mut xp = 1.0;
        for &c in &self.coeffs {
            acc += (c * xp).abs();
            xp *= x.abs();
        }
        acc
    }

    /// Exact coefficient-level derivative.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::zero();
        }
        let d: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Polynomial::new(d)
    }

    /// k-th derivative evaluated at x.
    pub fn derivative_at(&self, x: f64, order: u32) -> f64 {
        let mut p = self.clone();
        for _ in 0..order {
            p = p.derivative();
        }
        p.eval(x)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![0.0; n];
        for (i, &v) in self.coeffs.iter().enumerate() {
            c[i] += v;
        }
        for (i, &v) in other.coeffs.iter().enumerate() {
            c[i] += v;
        }
        Polynomial::new(c)
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }

    /// Cauchy bound: every real root lies in [-B, B].
    pub fn cauchy_bound(&self) -> f64 {
        let lead = *self.coeffs.last().expect("nonempty");
        if lead == 0.0 {
            return 1.0;
        }
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len() - 1)
            .fold(0.0f64, |acc, &c| acc.max((c / lead).abs()));
        1.0 + m
    }

    /// All distinct real roots in [lo, hi] (infinite endpoints are
    /// clipped to the Cauchy bound), ascending, multiplicities collapsed.
    ///
    /// Isolation counts roots by Sturm sign variations, then each
    /// isolating interval is narrowed by count-preserving bisection and
    /// polished with Newton on the appropriate derivative.
    pub fn real_roots(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if self.is_zero() {
            return Err(Error::Input(
                "real_roots of the identically-zero polynomial".into(),
            ));
        }
        if self.degree() == 0 {
            return Ok(vec![]);
        }
        let bound = self.cauchy_bound() * (1.0 + 1e-9) + 1e-9;
        let lo = lo.max(-bound);
        let hi = hi.min(bound);
        if lo >= hi {
            return Ok(vec![]);
        }

        let chain = sturm_chain(self);
        // nudge the left end so a root exactly at `lo` is counted
        let pad = 1e-9 * (1.0 + lo.abs());
        let va = sign_variations(&chain, lo - pad);
        let vb = sign_variations(&chain, hi);
        let total = va.saturating_sub(vb);
        if total == 0 {
            return Ok(vec![]);
        }

        let mut roots = Vec::new();
        let mut stack = vec![(lo - pad, hi, total)];
        while let Some((a, b, count)) = stack.pop() {
            if count == 0 {
                continue;
            }
            let width_tol = 1e-11 * (1.0 + a.abs().max(b.abs()));
            if count == 1 {
                roots.push(self.refine_root(&chain, a, b));
                continue;
            }
            if b - a <= width_tol {
                // cluster narrower than resolution: one representative
                roots.push(0.5 * (a + b));
                continue;
            }
            let mid = 0.5 * (a + b);
            let vm = sign_variations(&chain, mid);
            let left = sign_variations(&chain, a).saturating_sub(vm);
            let right = count.saturating_sub(left);
            stack.push((a, mid, left));
            stack.push((mid, b, right));
        }
        roots.sort_by(f64::total_cmp);
        // collapse anything the refinement landed on twice
        let merge_tol = 1e-9 * bound.max(1.0);
        roots.dedup_by(|a, b| (*a - *b).abs() <= merge_tol);
        let lo_clip = lo;
        let hi_clip = hi;
        Ok(roots
            .into_iter()
            .map(|r| r.clamp(lo_clip, hi_clip))
            .collect())
    }

    /// Narrow an interval known to contain exactly one distinct root.
    ///
    /// Sturm counts lose reliability once the chain values fall under
    /// the sign threshold (for a root of multiplicity mu that happens in
    /// a band of half-width ~(1e-12 scale)^{1/mu}), so bisection stops
    /// at a moderate width. The multiplicity is then estimated from the
    /// Newton ratio f f'' / f'^2 -> (mu-1)/mu a safe distance away, and
    /// the root is polished on the (mu-1)-th derivative, where it is
    /// simple and Newton reaches machine precision.
    fn refine_root(&self, chain: &[Polynomial], mut a: f64, mut b: f64) -> f64 {
        let va = sign_variations(chain, a);
        for _ in 0..60 {
            let width_tol = 1e-8 * (1.0 + a.abs().max(b.abs()));
            if b - a <= width_tol {
                break;
            }
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let vm = sign_variations(chain, mid);
            if va.saturating_sub(vm) >= 1 {
                b = mid;
            } else {
                a = mid;
            }
        }
        let x0 = 0.5 * (a + b);
        let leash = 1e-3 * (1.0 + x0.abs());

        let multiplicity = self.multiplicity_estimate(x0).min(self.degree());
        let mut p = self.clone();
        for _ in 0..multiplicity.saturating_sub(1) {
            p = p.derivative();
        }
        let d = p.derivative();
        let mut y = x0;
        for _ in 0..60 {
            let dy = d.eval(y);
            if dy == 0.0 {
                break;
            }
            let step = p.eval(y) / dy;
            let yn = y - step;
            if (yn - x0).abs() > leash {
                break;
            }
            y = yn;
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + y.abs()) {
                break;
            }
        }
        // accept the polish only if it still annihilates the original
        // polynomial at its noise floor
        let noise = 64.0 * f64::EPSILON * self.eval_scale(y).max(f64::MIN_POSITIVE);
        let band = (y - x0)
            .abs()
            .powi(multiplicity as i32)
            .max(f64::MIN_POSITIVE);
        if self.eval(y).abs() <= noise.max(band * self.eval_scale(y)) {
            y
        } else {
            x0
        }
    }

    /// Estimate the multiplicity of the root near x0 from the Newton
    /// ratio f f'' / f'^2, evaluated just outside the floating-point
    /// noise band.
    fn multiplicity_estimate(&self, x0: f64) -> usize {
        if self.degree() <= 1 {
            return 1;
        }
        let d1 = self.derivative();
        let d2 = d1.derivative();
        let off = 1e-4 * (1.0 + x0.abs());
        let mut best = 1usize;
        let mut best_resid = f64::INFINITY;
        for side in [1.0, -1.0] {
            let x = x0 + side * off;
            let f = self.eval(x);
            let fp = d1.eval(x);
            let fpp = d2.eval(x);
            if fp == 0.0 {
                continue;
            }
            let ratio = f * fpp / (fp * fp);
            if !ratio.is_finite() || ratio >= 1.0 {
                continue;
            }
            let mu = (1.0 / (1.0 - ratio)).round();
            if mu >= 1.0 && mu <= self.degree() as f64 {
                let resid = (1.0 / (1.0 - ratio) - mu).abs();
                if resid < best_resid {
                    best_resid = resid;
                    best = mu as usize;
                }
            }
        }
        // trust the estimate only when the ratio sits close to a
        // multiplicity plateau on at least one side
        if best_resid < 0.2 {
            best
        } else {
            1
        }
    }
}

impl RealMap for Polynomial {
    fn eval(&self, x: f64) -> f64 {
        Polynomial::eval(self, x)
    }

    fn derivative_at(&self, x: f64, order: u32) -> f64 {
        Polynomial::derivative_at(self, x, order)
    }

    fn derivative_scale(&self, x: f64, order: u32) -> f64 {
        let mut p = self.clone();
        for _ in 0..order {
            p = p.derivative();
        }
        p.eval_scale(x)
    }

    fn max_local_order(&self) -> u32 {
        self.degree() as u32
    }

    fn decomposition_breakpoints(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if self.is_constant() {
            return Err(Error::Input(
                "cannot decompose a constant polynomial".into(),
            ));
        }
        let d1 = self.derivative();
        let d2 = d1.derivative();
        let mut pts = Vec::new();
        let mut bound = 1.0f64;
        if !d1.is_constant() && !d1.is_zero() {
            pts.extend(d1.real_roots(lo, hi)?);
            bound = bound.max(d1.cauchy_bound());
        }
        if !d2.is_constant() && !d2.is_zero() {
            pts.extend(d2.real_roots(lo, hi)?);
            bound = bound.max(d2.cauchy_bound());
        }
        pts.sort_by(f64::total_cmp);
        // f' and f'' share roots at inflection-critical points; keep one
        let merge_tol = 1e-9 * bound;
        pts.dedup_by(|a, b| (*a - *b).abs() <= merge_tol);
        let edge_tol = merge_tol;
        pts.retain(|&r| r > lo + edge_tol && r < hi - edge_tol);
        Ok(pts)
    }

    fn describe(&self) -> String {
        format!("{self}")
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(k, &c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{k}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Negated-remainder Sturm chain, renormalized to unit max coefficient
/// at each step so the zero threshold stays meaningful in f64.
fn sturm_chain(p: &Polynomial) -> Vec<Polynomial> {
    let mut chain = Vec::new();
    let norm = |q: &Polynomial| -> Polynomial {
        let m = q.coeffs().iter().fold(0.0f64, |a, &c| a.max(c.abs()));
        if m > 0.0 {
            q.scale(1.0 / m)
        } else {
            q.clone()
        }
    };
    chain.push(norm(p));
    let d = p.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(norm(&d));
    loop {
        let n = chain.len();
        let rem = poly_rem(&chain[n - 2], &chain[n - 1]);
        let maxc = rem.coeffs().iter().fold(0.0f64, |a, &c| a.max(c.abs()));
        if maxc <= CHAIN_EPS {
            break;
        }
        chain.push(norm(&rem.scale(-1.0)));
        if chain.last().map(|q| q.degree()) == Some(0) {
            break;
        }
    }
    chain
}

/// Remainder of a / b with small coefficients swept to zero.
fn poly_rem(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let db = b.degree();
    let lead_b = b.coeffs()[db];
    let mut r: Vec<f64> = a.coeffs().to_vec();
    while r.len() > db.max(1) && r.len() > db && !(db == 0) {
        let dr = r.len() - 1;
        if dr < db {
            break;
        }
        let q = r[dr] / lead_b;
        for j in 0..=db {
            r[dr - db + j] -= q * b.coeffs()[j];
        }
        r.pop();
        while r.len() > 1 && r.last().map(|c| c.abs() <= CHAIN_EPS) == Some(true) {
            r.pop();
        }
    }
    if db == 0 {
        return Polynomial::zero();
    }
    Polynomial::new(r)
}

fn sign_variations(chain: &[Polynomial], x: f64) -> usize {
    let mut count = 0;
    let mut last: i32 = 0;
    for p in chain {
        let v = p.eval(x);
        let scale = p.eval_scale(x).max(1e-300);
        let s: i32 = if v.abs() <= 1e-12 * scale {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        };
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}
