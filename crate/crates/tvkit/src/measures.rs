//! One-dimensional reference densities and exact pushforward densities
//! q = density of P f^{-1} for piecewise monotone maps.
//!
//! On a piece where f is strictly monotone, the pushforward density at a
//! non-critical value t is p(x)/|f'(x)| summed over the preimages x of
//! t. At a critical value of local order m the density blows up like
//! |t - t_c|^{1/m - 1}; the blowup is integrable and is declared to the
//! quadrature engine as a [`PowerSingularity`].

use crate::error::{Error, Result};
use crate::funcspace::{monotone_convex_decomposition, MonotonePiece, Polynomial, RealMap};
use crate::quad::{integrate_piecewise, PowerSingularity, QuadResult};

/// Standard Gaussian density.
pub fn gaussian_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard Gaussian CDF via erfc (accurate in both tails).
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Gaussian supports are truncated at mean +- 8 sigma; the neglected
/// tail mass 2 Phi(-8) ~ 1.2e-15 sits below every tolerance used here.
pub const GAUSSIAN_SUPPORT_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone)]
enum Kind {
    StandardGaussian,
    Gaussian {
        mean: f64,
        sigma: f64,
    },
    LebesgueOn {
        a: f64,
        b: f64,
    },
    Restricted {
        base: Box<DensityModel>,
        a: f64,
        b: f64,
    },
}

/// A reference density p with analytically known sup bound A and
/// Lipschitz constant L.
///
/// `restricted(base, a, b)` is the plain restriction of `base` to
/// [a, b]: a sub-probability measure, deliberately NOT renormalized, so
/// that partition arguments can sum per-piece contributions.
#[derive(Debug, Clone)]
pub struct DensityModel {
    kind: Kind,
    sup_bound: f64,
    lipschitz: f64,
    support: (f64, f64),
}

impl DensityModel {
    pub fn standard_gaussian() -> Self {
        let s = GAUSSIAN_SUPPORT_SIGMAS;
        Self {
            kind: Kind::StandardGaussian,
            sup_bound: gaussian_pdf(0.0),
            lipschitz: gaussian_pdf(1.0),
            support: (-s, s),
        }
    }

    pub fn gaussian(mean: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !mean.is_finite() {
            return Err(Error::Input(format!(
                "gaussian needs sigma > 0, got mean {mean}, sigma {sigma}"
            )));
        }
        let s = GAUSSIAN_SUPPORT_SIGMAS * sigma;
        Ok(Self {
            kind: Kind::Gaussian { mean, sigma },
            sup_bound: gaussian_pdf(0.0) / sigma,
            lipschitz: gaussian_pdf(1.0) / (sigma * sigma),
            support: (mean - s, mean + s),
        })
    }

    pub fn lebesgue_on(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Input(format!(
                "lebesgue needs a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self {
            kind: Kind::LebesgueOn { a, b },
            sup_bound: 1.0,
            lipschitz: 0.0,
            support: (a, b),
        })
    }

    pub fn restricted(base: DensityModel, a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Input(format!(
                "restriction needs a < b, got [{a}, {b}]"
            )));
        }
        let lo = a.max(base.support.0);
        let hi = b.min(base.support.1);
        if lo >= hi {
            return Err(Error::Input(format!(
                "restriction [{a}, {b}] misses the support of {}",
                base.describe()
            )));
        }
        let sup = base.sup_density_on(lo, hi);
        let lip = base.lipschitz_on(lo, hi);
        Ok(Self {
            kind: Kind::Restricted {
                base: Box::new(base),
                a,
                b,
            },
            sup_bound: sup,
            lipschitz: lip,
            support: (lo, hi),
        })
    }

    /// p(x); zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::StandardGaussian => gaussian_pdf(x),
            Kind::Gaussian { mean, sigma } => gaussian_pdf((x - mean) / sigma) / sigma,
            Kind::LebesgueOn { a, b } => {
                if x >= *a && x <= *b {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Restricted { base, a, b } => {
                if x >= *a && x <= *b {
                    base.density(x)
                } else {
                    0.0
                }
            }
        }
    }

    /// Effective support (Gaussians truncated at 8 sigma).
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// A = sup of the density.
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// L with |p(x) - p(y)| <= L |x - y| on the support.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Sup of the density over [lo, hi] (analytic for Gaussians).
    pub fn sup_density_on(&self, lo: f64, hi: f64) -> f64 {
        match &self.kind {
            Kind::StandardGaussian => gaussian_interval_sup(lo, hi, 0.0, 1.0),
            Kind::Gaussian { mean, sigma } => gaussian_interval_sup(lo, hi, *mean, *sigma),
            Kind::LebesgueOn { a, b } => {
                if hi < *a || lo > *b {
                    0.0
                } else {
                    1.0
                }
            }
            Kind::Restricted { base, a, b } => {
                let l = lo.max(*a);
                let h = hi.min(*b);
                if l > h {
                    0.0
                } else {
                    base.sup_density_on(l, h)
                }
            }
        }
    }

    /// Sup of |p'| over [lo, hi] (analytic for Gaussians; 0 for Lebesgue).
    pub fn lipschitz_on(&self, lo: f64, hi: f64) -> f64 {
        match &self.kind {
            Kind::StandardGaussian => gaussian_interval_lip(lo, hi, 0.0, 1.0),
            Kind::Gaussian { mean, sigma } => gaussian_interval_lip(lo, hi, *mean, *sigma),
            Kind::LebesgueOn { .. } => 0.0,
            Kind::Restricted { base, a, b } => {
                let l = lo.max(*a);
                let h = hi.min(*b);
                if l > h {
                    0.0
                } else {
                    base.lipschitz_on(l, h)
                }
            }
        }
    }

    /// Measure of [lo, hi].
    pub fn mass_on(&self, lo: f64, hi: f64) -> f64 {
        if lo >= hi {
            return 0.0;
        }
        match &self.kind {
            Kind::StandardGaussian => norm_cdf(hi) - norm_cdf(lo),
            Kind::Gaussian { mean, sigma } => {
                norm_cdf((hi - mean) / sigma) - norm_cdf((lo - mean) / sigma)
            }
            Kind::LebesgueOn { a, b } => (hi.min(*b) - lo.max(*a)).max(0.0),
            Kind::Restricted { base, a, b } => base.mass_on(lo.max(*a), hi.min(*b)),
        }
    }

    /// Total mass (1 for probability models, b - a for Lebesgue, less
    /// for restrictions).
    pub fn total_mass(&self) -> f64 {
        match &self.kind {
            Kind::StandardGaussian | Kind::Gaussian { .. } => 1.0,
            Kind::LebesgueOn { a, b } => b - a,
            Kind::Restricted { .. } => self.mass_on(self.support.0, self.support.1),
        }
    }

    /// The model translated by dx (used by the argument-shift modulus).
    pub fn translate(&self, dx: f64) -> DensityModel {
        match &self.kind {
            Kind::StandardGaussian => DensityModel::gaussian(dx, 1.0).expect("valid"),
            Kind::Gaussian { mean, sigma } => {
                DensityModel::gaussian(mean + dx, *sigma).expect("valid")
            }
            Kind::LebesgueOn { a, b } => DensityModel::lebesgue_on(a + dx, b + dx).expect("valid"),
            Kind::Restricted { base, a, b } => {
                DensityModel::restricted(base.translate(dx), a + dx, b + dx).expect("valid")
            }
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.kind, Kind::StandardGaussian | Kind::Gaussian { .. })
    }

    /// Draw from the normalized version of the model (restrictions
    /// sample the base by rejection into [a, b]).
    pub fn sample(&self, rng: &mut crate::rng::Rng) -> f64 {
        match &self.kind {
            Kind::StandardGaussian => crate::rng::standard_normal(rng),
            Kind::Gaussian { mean, sigma } => mean + sigma * crate::rng::standard_normal(rng),
            Kind::LebesgueOn { a, b } => a + (b - a) * crate::rng::uniform(rng),
            Kind::Restricted { base, a, b } => loop {
                let x = base.sample(rng);
                if x >= *a && x <= *b {
                    return x;
                }
            },
        }
    }

    /// Center of the model (mean for Gaussians, midpoint otherwise).
    pub fn center(&self) -> f64 {
        match &self.kind {
            Kind::StandardGaussian => 0.0,
            Kind::Gaussian { mean, .. } => *mean,
            Kind::LebesgueOn { a, b } => 0.5 * (a + b),
            Kind::Restricted { a, b, .. } => 0.5 * (a + b),
        }
    }

    /// CLI-style spec string.
    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::StandardGaussian => "gauss".into(),
            Kind::Gaussian { mean, sigma } => format!("gauss:{mean},{sigma}"),
            Kind::LebesgueOn { a, b } => format!("lebesgue:{a},{b}"),
            Kind::Restricted { base, a, b } => format!("restrict:{a},{b}:{}", base.describe()),
        }
    }
}

fn gaussian_interval_sup(lo: f64, hi: f64, mean: f64, sigma: f64) -> f64 {
    let zl = (lo - mean) / sigma;
    let zr = (hi - mean) / sigma;
    let z = if zl <= 0.0 && zr >= 0.0 {
        0.0
    } else if zl > 0.0 {
        zl
    } else {
        zr
    };
    gaussian_pdf(z) / sigma
}

fn gaussian_interval_lip(lo: f64, hi: f64, mean: f64, sigma: f64) -> f64 {
    // |p'(x)| = |z| phi(z) / sigma^2 peaks at |z| = 1
    let zl = (lo - mean) / sigma;
    let zr = (hi - mean) / sigma;
    let g = |z: f64| z.abs() * gaussian_pdf(z);
    let mut best = g(zl).max(g(zr));
    if zl <= 1.0 && zr >= 1.0 {
        best = best.max(g(1.0));
    }
    if zl <= -1.0 && zr >= -1.0 {
        best = best.max(g(-1.0));
    }
    best / (sigma * sigma)
}

/// A density on the value line that the TV quadrature knows how to
/// integrate: evaluation plus the bookkeeping of kinks and integrable
/// singularities.
///
/// `eval_at(base, delta)` evaluates at t = base + delta without forming
/// the sum when the implementation can do better; quadrature near a
/// singular point c hands in (c, ±s^m) where s^m may be smaller than
/// one ulp of c, and densities blowing up like a power of the distance
/// to c need that distance exactly.
pub trait LineDensity {
    fn eval(&self, t: f64) -> f64;
    fn eval_at(&self, base: f64, delta: f64) -> f64 {
        self.eval(base + delta)
    }
    fn support(&self) -> (f64, f64);
    /// Points where the density (or its derivative) jumps; used as
    /// forced quadrature breakpoints.
    fn kinks(&self) -> Vec<f64>;
    fn singularities(&self) -> Vec<PowerSingularity>;
    fn mass(&self) -> f64;
}

impl LineDensity for DensityModel {
    fn eval(&self, t: f64) -> f64 {
        self.density(t)
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn kinks(&self) -> Vec<f64> {
        vec![self.support.0, self.support.1]
    }

    fn singularities(&self) -> Vec<PowerSingularity> {
        vec![]
    }

    fn mass(&self) -> f64 {
        self.total_mass()
    }
}

/// A piece of a pushforward with cached value range.
#[derive(Debug, Clone)]
struct ValuedPiece {
    a: f64,
    b: f64,
    vlo: f64,
    vhi: f64,
    increasing: bool,
}

/// Local expansion of the map at a piece anchor: f(x0 + sign h) - v0 as
/// a polynomial in h >= 0 with folded sign, valid up to h_cap.
///
/// Inverting this expansion instead of the raw map keeps full relative
/// precision in the distance to the critical value, where direct
/// evaluation of f(x) - t collapses at one ulp of v0.
#[derive(Debug, Clone)]
struct AnchoredPiece {
    x0: f64,
    v0: f64,
    sign: f64,
    /// coeffs[k-1] = sign^k f^(k)(x0) / k!
    coeffs: Vec<f64>,
    h_cap: f64,
    dt_cap: f64,
}

impl AnchoredPiece {
    fn expansion(&self, h: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * h + c;
        }
        acc * h
    }

    fn expansion_deriv(&self, h: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * h + c * (k as f64 + 1.0);
        }
        acc
    }

    /// Solve expansion(h) = dt for h in [0, h_cap] (the expansion is
    /// monotone there).
    fn invert(&self, dt: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, self.h_cap);
        let rising = self.dt_cap > 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.expansion(mid);
            if (v < dt) == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut h = 0.5 * (lo + hi);
        for _ in 0..4 {
            let d = self.expansion_deriv(h);
            if d == 0.0 {
                break;
            }
            let hn = h - (self.expansion(h) - dt) / d;
            if hn < 0.0 || hn > self.h_cap {
                break;
            }
            h = hn;
        }
        h
    }
}

/// Exact pushforward density of `model` under `map`.
#[derive(Debug, Clone)]
pub struct Pushforward<M: RealMap = Polynomial> {
    map: M,
    model: DensityModel,
    pieces: Vec<MonotonePiece>,
    valued: Vec<ValuedPiece>,
    anchored: Vec<AnchoredPiece>,
    critical_values: Vec<f64>,
    singularities: Vec<PowerSingularity>,
    value_support: (f64, f64),
}

impl<M: RealMap> Pushforward<M> {
    pub fn new(map: M, model: DensityModel) -> Result<Self> {
        let (lo, hi) = model.support();
        let pieces = monotone_convex_decomposition(&map, lo, hi)?;
        Self::from_pieces(map, model, pieces)
    }

    /// Build from an externally supplied decomposition (e.g. a single
    /// piece of a larger partition). Pieces are clipped to the model
    /// support.
    pub fn from_pieces(map: M, model: DensityModel, pieces: Vec<MonotonePiece>) -> Result<Self> {
        let (lo, hi) = model.support();
        let mut valued = Vec::new();
        let mut anchored = Vec::new();
        let mut critical_values = Vec::new();
        let mut singularities = Vec::new();
        let mut vmin = f64::INFINITY;
        let mut vmax = f64::NEG_INFINITY;
        for p in &pieces {
            let a = p.a.max(lo);
            let b = p.b.min(hi);
            if a >= b {
                continue;
            }
            let va = map.eval(a);
            let vb = map.eval(b);
            let (vlo, vhi) = if va <= vb { (va, vb) } else { (vb, va) };
            vmin = vmin.min(vlo);
            vmax = vmax.max(vhi);
            critical_values.push(va);
            critical_values.push(vb);
            let anchor_pt = p.anchor_point().clamp(a, b);
            if p.local_order_m >= 2 {
                singularities.push(PowerSingularity {
                    location: map.eval(anchor_pt),
                    order: p.local_order_m as f64,
                });
            }
            // local expansion at the anchor for ulp-safe inversion near
            // the critical value (truncated Taylor; exact for polynomials)
            let sign: f64 = match p.anchor {
                crate::funcspace::Side::Left => 1.0,
                crate::funcspace::Side::Right => -1.0,
            };
            let h_cap = (b - a).min(0.35);
            let n_terms = map.max_local_order().max(1);
            let mut coeffs = Vec::with_capacity(n_terms as usize);
            let mut factorial = 1.0f64;
            for k in 1..=n_terms {
                factorial *= k as f64;
                coeffs.push(sign.powi(k as i32) * map.derivative_at(anchor_pt, k) / factorial);
            }
            let mut ap = AnchoredPiece {
                x0: anchor_pt,
                v0: map.eval(anchor_pt),
                sign,
                coeffs,
                h_cap,
                dt_cap: 0.0,
            };
            ap.dt_cap = ap.expansion(h_cap);
            anchored.push(ap);
            valued.push(ValuedPiece {
                a,
                b,
                vlo,
                vhi,
                increasing: va <= vb,
            });
        }
        if valued.is_empty() {
            return Err(Error::Input(
                "map decomposition does not intersect the model support".into(),
            ));
        }
        critical_values.sort_by(f64::total_cmp);
        critical_values.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
        Ok(Self {
            map,
            model,
            pieces,
            valued,
            anchored,
            critical_values,
            singularities,
            value_support: (vmin, vmax),
        })
    }

    pub fn map(&self) -> &M {
        &self.map
    }

    pub fn model(&self) -> &DensityModel {
        &self.model
    }

    pub fn pieces(&self) -> &[MonotonePiece] {
        &self.pieces
    }

    /// Sorted images of piece endpoints (quadrature breakpoints).
    pub fn critical_values(&self) -> &[f64] {
        &self.critical_values
    }

    /// All preimages of t inside the support, one per piece whose value
    /// range contains t, deduplicated at shared piece endpoints.
    pub fn preimages(&self, t: f64) -> Vec<f64> {
        let mut xs = Vec::new();
        for vp in &self.valued {
            if t < vp.vlo || t > vp.vhi {
                continue;
            }
            xs.push(invert_monotone(&self.map, vp, t));
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-10 * (1.0 + a.abs()));
        xs
    }

    /// q(t) = sum over preimages of p(x) / |f'(x)|.
    ///
    /// Returns +inf at a critical value (integrable blowup); the
    /// quadrature engine never samples there.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_anchored(t, 0.0)
    }

    /// Anchored evaluation at t = base + delta. When base sits on a
    /// piece anchor value, the preimage is found by inverting the local
    /// expansion in the exact distance dt = (base - v0) + delta, which
    /// stays accurate even when |delta| is far below one ulp of base.
    fn eval_anchored(&self, base: f64, delta: f64) -> f64 {
        let mut contributions: Vec<(f64, f64)> = Vec::new();
        for (vp, ap) in self.valued.iter().zip(&self.anchored) {
            let base_off = base - ap.v0;
            if base_off.abs() <= 64.0 * f64::EPSILON * (1.0 + ap.v0.abs()) {
                let dt = base_off + delta;
                if dt == 0.0 {
                    // exactly the anchor value: blowup if f' vanishes
                    if ap.coeffs[0] == 0.0 {
                        return f64::INFINITY;
                    }
                    contributions.push((ap.x0, self.model.density(ap.x0) / ap.coeffs[0].abs()));
                    continue;
                }
                if (dt > 0.0) == (ap.dt_cap > 0.0) && dt.abs() <= ap.dt_cap.abs() {
                    let h = ap.invert(dt);
                    let x = ap.x0 + ap.sign * h;
                    let p = self.model.density(x);
                    if p > 0.0 {
                        let d = ap.expansion_deriv(h).abs();
                        if d == 0.0 {
                            return f64::INFINITY;
                        }
                        contributions.push((x, p / d));
                    }
                    continue;
                }
                if dt.abs() <= ap.dt_cap.abs() {
                    // wrong side of the anchor: no preimage in this piece
                    continue;
                }
            }
            let t = base + delta;
            if t < vp.vlo || t > vp.vhi {
                continue;
            }
            let x = invert_monotone(&self.map, vp, t);
            let p = self.model.density(x);
            if p == 0.0 {
                continue;
            }
            let d = self.map.derivative_at(x, 1).abs();
            if d == 0.0 {
                return f64::INFINITY;
            }
            contributions.push((x, p / d));
        }
        contributions.sort_by(|a, b| a.0.total_cmp(&b.0));
        contributions.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-10 * (1.0 + a.0.abs()));
        contributions.iter().map(|c| c.1).sum()
    }

    /// Total mass of the pushforward by singularity-aware quadrature.
    pub fn mass_quadrature(&self, tol: f64) -> Result<QuadResult> {
        let (lo, hi) = self.value_support;
        integrate_piecewise(
            &|b, d| {
                let v = self.eval_anchored(b, d);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            lo,
            hi,
            &self.critical_values,
            &self.singularities,
            tol,
        )
    }
}

impl<M: RealMap> LineDensity for Pushforward<M> {
    fn eval(&self, t: f64) -> f64 {
        Pushforward::eval(self, t)
    }

    fn eval_at(&self, base: f64, delta: f64) -> f64 {
        self.eval_anchored(base, delta)
    }

    fn support(&self) -> (f64, f64) {
        self.value_support
    }

    fn kinks(&self) -> Vec<f64> {
        self.critical_values.clone()
    }

    fn singularities(&self) -> Vec<PowerSingularity> {
        self.singularities.clone()
    }

    fn mass(&self) -> f64 {
        self.model.mass_on(
            self.valued
                .iter()
                .map(|v| v.a)
                .fold(f64::INFINITY, f64::min),
            self.valued
                .iter()
                .map(|v| v.b)
                .fold(f64::NEG_INFINITY, f64::max),
        )
    }
}

/// Bisection plus Newton polish for f(x) = t on a monotone piece.
fn invert_monotone<M: RealMap>(map: &M, vp: &ValuedPiece, t: f64) -> f64 {
    invert_monotone_on(map, vp.a, vp.b, vp.increasing, t)
}

/// Solve f(x) = t for monotone f on [a, b].
pub(crate) fn invert_monotone_on<M: RealMap + ?Sized>(
    map: &M,
    pa: f64,
    pb: f64,
    incr: bool,
    t: f64,
) -> f64 {
    let (mut a, mut b) = (pa, pb);
    for _ in 0..48 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = map.eval(mid);
        let go_right = if incr { fm < t } else { fm > t };
        if go_right {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..4 {
        let d = map.derivative_at(x, 1);
        if d.abs() < 1e-14 {
            break;
        }
        let xn = x - (map.eval(x) - t) / d;
        if xn < pa || xn > pb {
            break;
        }
        x = xn;
    }
    x.clamp(pa, pb)
}

/// Convenience point evaluation of the pushforward density (builds the
/// decomposition; use [`Pushforward`] directly for repeated queries).
pub fn pushforward_density(map: &Polynomial, model: &DensityModel, t: f64) -> Result<f64> {
    Ok(Pushforward::new(map.clone(), model.clone())?.eval(t))
}

/// Preimage solver matching the decomposition contract (one solution per
/// piece whose value range contains t).
pub fn preimages(
    map: &Polynomial,
    pieces: &[MonotonePiece],
    model: &DensityModel,
    t: f64,
) -> Vec<f64> {
    match Pushforward::from_pieces(map.clone(), model.clone(), pieces.to_vec()) {
        Ok(pf) => pf.preimages(t),
        Err(_) => vec![],
    }
}

/// `base` translated by `offset` in value: eval(t) = base(t - offset).
pub struct Shifted<'a, D: LineDensity + ?Sized> {
    pub base: &'a D,
    pub offset: f64,
}

impl<'a, D: LineDensity + ?Sized> LineDensity for Shifted<'a, D> {
    fn eval(&self, t: f64) -> f64 {
        self.base.eval(t - self.offset)
    }

    fn eval_at(&self, base: f64, delta: f64) -> f64 {
        // keep the fine offset out of the cancellation-prone subtraction
        self.base.eval_at(base - self.offset, delta)
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support();
        (lo + self.offset, hi + self.offset)
    }

    fn kinks(&self) -> Vec<f64> {
        self.base
            .kinks()
            .into_iter()
            .map(|k| k + self.offset)
            .collect()
    }

    fn singularities(&self) -> Vec<PowerSingularity> {
        self.base
            .singularities()
            .into_iter()
            .map(|s| PowerSingularity {
                location: s.location + self.offset,
                order: s.order,
            })
            .collect()
    }

    fn mass(&self) -> f64 {
        self.base.mass()
    }
}

/// Gaussian smoothing of a pushforward: the law of f(X) + sigma * nu.
///
/// Evaluated in x-space as integral of p(x) phi_sigma(t - f(x)) dx with
/// forced breakpoints at the preimages of t (the bump centers), so the
/// adaptive rule cannot miss narrow bumps when sigma is small.
pub struct Smoothed<'a, M: RealMap> {
    base: &'a Pushforward<M>,
    sigma: f64,
    inner_tol: f64,
}

impl<'a, M: RealMap> Smoothed<'a, M> {
    pub fn new(base: &'a Pushforward<M>, sigma: f64, inner_tol: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Input(format!(
                "smoothing needs sigma > 0, got {sigma}"
            )));
        }
        Ok(Self {
            base,
            sigma,
            inner_tol,
        })
    }
}

impl<'a, M: RealMap> LineDensity for Smoothed<'a, M> {
    fn eval(&self, t: f64) -> f64 {
        let s = self.sigma;
        let model = self.base.model();
        let (lo, hi) = model.support();
        let mut hints: Vec<f64> = Vec::new();
        for target in [t - 4.0 * s, t, t + 4.0 * s] {
            hints.extend(self.base.preimages(target));
        }
        hints.retain(|&x| x > lo && x < hi);
        hints.sort_by(f64::total_cmp);
        hints.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
        let mut edges = vec![lo];
        edges.extend(hints);
        edges.push(hi);
        let f = |x: f64| model.density(x) * gaussian_pdf((t - self.base.map().eval(x)) / s) / s;
        let mut acc = 0.0;
        for w in edges.windows(2) {
            if w[0] >= w[1] {
                continue;
            }
            if let Ok(r) = crate::quad::integrate_adaptive(&f, w[0], w[1], self.inner_tol) {
                acc += r.value;
            }
        }
        acc
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support();
        (lo - 8.0 * self.sigma, hi + 8.0 * self.sigma)
    }

    fn kinks(&self) -> Vec<f64> {
        // smoothing removes kinks; keep the base critical values as
        // subdivision hints since curvature concentrates there
        self.base.kinks()
    }

    fn singularities(&self) -> Vec<PowerSingularity> {
        vec![]
    }

    fn mass(&self) -> f64 {
        self.base.mass()
    }
}

/// Closed-form density of (chi_d)^m: the law of r^m where r = |X| for a
/// standard Gaussian X in R^d. Used by the radial experiments where the
/// pushforward is not available through a one-dimensional map.
#[derive(Debug, Clone)]
pub struct ChiPowerDensity {
    dim: u32,
    power: f64,
    log_norm: f64,
    support_hi: f64,
}

impl ChiPowerDensity {
    pub fn new(dim: u32, power: f64) -> Result<Self> {
        if dim == 0 || !(power > 0.0) {
            return Err(Error::Input(format!(
                "chi power needs d >= 1, m > 0; got d={dim}, m={power}"
            )));
        }
        let d = dim as f64;
        // chi pdf: 2^{1 - d/2} r^{d-1} e^{-r^2/2} / Gamma(d/2)
        let log_norm = (1.0 - 0.5 * d) * std::f64::consts::LN_2 - libm::lgamma(0.5 * d);
        let r_hi = d.sqrt() + 8.0;
        Ok(Self {
            dim,
            power,
            log_norm,
            support_hi: r_hi.powf(power),
        })
    }

    fn chi_pdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let d = self.dim as f64;
        (self.log_norm + (d - 1.0) * r.ln() - 0.5 * r * r).exp()
    }
}

impl LineDensity for ChiPowerDensity {
    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.support_hi {
            return 0.0;
        }
        let m = self.power;
        let r = t.powf(1.0 / m);
        self.chi_pdf(r) * t.powf(1.0 / m - 1.0) / m
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.support_hi)
    }

    fn kinks(&self) -> Vec<f64> {
        vec![0.0, self.support_hi]
    }

    fn singularities(&self) -> Vec<PowerSingularity> {
        // q(t) ~ t^{d/m - 1} near zero: integrable blowup when d < m
        let ratio = self.dim as f64 / self.power;
        if ratio < 1.0 {
            vec![PowerSingularity {
                location: 0.0,
                order: 1.0 / ratio,
            }]
        } else {
            vec![]
        }
    }

    fn mass(&self) -> f64 {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_values() {
        let g = DensityModel::standard_gaussian();
        assert!((g.density(0.0) - 0.3989422804014327).abs() < 1e-15);
        let u = DensityModel::lebesgue_on(0.0, 1.0).unwrap();
        assert_eq!(u.density(0.5), 1.0);
        assert_eq!(u.density(2.0), 0.0);
    }

    #[test]
    fn gaussian_constants_match_closed_forms() {
        let g = DensityModel::standard_gaussian();
        assert!((g.sup_bound() - 0.3989422804014327).abs() < 1e-15);
        assert!((g.lipschitz() - 0.24197072451914337).abs() < 1e-15);
        let h = DensityModel::gaussian(1.0, 2.0).unwrap();
        assert!((h.sup_bound() - 0.3989422804014327 / 2.0).abs() < 1e-15);
        assert!((h.lipschitz() - 0.24197072451914337 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn sup_and_lipschitz_bound_samples() {
        let g = DensityModel::standard_gaussian();
        let (lo, hi) = g.support();
        let n = 10_000;
        let mut prev = g.density(lo);
        for i in 1..=n {
            let x0 = lo + (hi - lo) * (i - 1) as f64 / n as f64;
            let x1 = lo + (hi - lo) * i as f64 / n as f64;
            let v = g.density(x1);
            assert!(v <= g.sup_bound() + 1e-12);
            assert!(
                (v - prev).abs() <= g.lipschitz() * (x1 - x0) + 1e-12,
                "at {x0}"
            );
            prev = v;
        }
    }

    #[test]
    fn restricted_is_not_renormalized() {
        let g = DensityModel::standard_gaussian();
        let r = DensityModel::restricted(g.clone(), 0.0, 1.0).unwrap();
        assert_eq!(r.density(0.5), g.density(0.5));
        assert_eq!(r.density(-0.5), 0.0);
        let m = r.total_mass();
        assert!((m - (norm_cdf(1.0) - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn chi_square_density_at_one() {
        // law of X^2 is chi-squared(1): q(1) = phi(1)
        let f = Polynomial::monomial(1.0, 2);
        let pf = Pushforward::new(f, DensityModel::standard_gaussian()).unwrap();
        assert!((pf.eval(1.0) - 0.24197072451914337).abs() < 1e-13);
    }

    #[test]
    fn identity_map_reproduces_model() {
        let f = Polynomial::new(vec![0.0, 1.0]);
        let g = DensityModel::standard_gaussian();
        let pf = Pushforward::new(f, g.clone()).unwrap();
        for t in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            assert!((pf.eval(t) - g.density(t)).abs() < 1e-12, "at {t}");
        }
    }

    #[test]
    fn cube_on_unit_interval() {
        // f = x^3 on Lebesgue[0,1]: q(1/8) = 1/(3 * (1/2)^2) = 4/3
        let f = Polynomial::monomial(1.0, 3);
        let pf = Pushforward::new(f, DensityModel::lebesgue_on(0.0, 1.0).unwrap()).unwrap();
        assert!((pf.eval(0.125) - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn preimage_examples() {
        let f = Polynomial::monomial(1.0, 2);
        let pf = Pushforward::new(f, DensityModel::lebesgue_on(-3.0, 3.0).unwrap()).unwrap();
        let xs = pf.preimages(4.0);
        assert_eq!(xs.len(), 2);
        assert!((xs[0] + 2.0).abs() < 1e-10 && (xs[1] - 2.0).abs() < 1e-10);
        assert!(pf.preimages(-1.0).is_empty());

        // x^3 - x at t = 0 -> {-1, 0, 1}
        let f = Polynomial::new(vec![0.0, -1.0, 0.0, 1.0]);
        let pf = Pushforward::new(f, DensityModel::lebesgue_on(-2.0, 2.0).unwrap()).unwrap();
        let xs = pf.preimages(0.0);
        assert_eq!(xs.len(), 3);
        assert!((xs[0] + 1.0).abs() < 1e-9 && xs[1].abs() < 1e-9 && (xs[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mass_conservation_chi_square() {
        let f = Polynomial::monomial(1.0, 2);
        let pf = Pushforward::new(f, DensityModel::standard_gaussian()).unwrap();
        let m = pf.mass_quadrature(1e-9).unwrap();
        assert!((m.value - 1.0).abs() < 1e-6, "mass {}", m.value);
    }

    #[test]
    fn chi_square_cdf_oracle() {
        // integral of q over [0, t] = 2 Phi(sqrt t) - 1
        let f = Polynomial::monomial(1.0, 2);
        let pf = Pushforward::new(f, DensityModel::standard_gaussian()).unwrap();
        for t in [0.1, 0.5, 1.0, 2.0, 4.0] {
            let r = integrate_piecewise(
                &|b, d| {
                    let v = pf.eval_at(b, d);
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                },
                0.0,
                t,
                &[],
                &pf.singularities(),
                1e-9,
            )
            .unwrap();
            let want = 2.0 * norm_cdf(t.sqrt()) - 1.0;
            assert!(
                (r.value - want).abs() < 1e-6,
                "t={t}: {} vs {want}",
                r.value
            );
        }
    }

    #[test]
    fn monotone_pushforward_density_decreasing() {
        // convex increasing map, Lebesgue source: q is non-increasing
        let f = Polynomial::monomial(1.0, 2);
        let pf = Pushforward::new(f, DensityModel::lebesgue_on(0.0, 1.0).unwrap()).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..=50 {
            let t = i as f64 / 50.0;
            let v = pf.eval(t);
            assert!(v <= prev + 1e-12, "q not decreasing at {t}");
            prev = v;
        }
    }

    #[test]
    fn chi_power_matches_chi_square() {
        // d=1, m=2 is chi-squared(1)
        let q = ChiPowerDensity::new(1, 2.0).unwrap();
        let chi2 = |t: f64| (-0.5 * t).exp() / (2.0 * std::f64::consts::PI * t).sqrt();
        for t in [0.1, 0.5, 1.0, 2.0] {
            assert!((q.eval(t) - chi2(t)).abs() < 1e-12, "at {t}");
        }
        // d=2, m=2 is chi-squared(2), the exponential with rate 1/2
        let q = ChiPowerDensity::new(2, 2.0).unwrap();
        assert!((q.eval(1.0) - 0.5 * (-0.5f64).exp()).abs() < 1e-12);
    }
}
