//! Command handlers and the named experiment suites.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;

use super::parse::{parse_density, parse_grid, parse_polynomial, parse_trig};
use super::report::{slope_fit, write_report, ExperimentReport, OutputFormat, Provenance};
use crate::besov::{certified_modulus_constant, fit_smoothness, verify_certified};
use crate::bounds::{
    radial_modulus_experiment, radial_sampler, smoothed_comparison, smoothing_bound,
    trig_modulus_experiment, vandermonde_dense_determinant, vandermonde_system_check,
};
use crate::error::{Error, Result};
use crate::funcspace::Polynomial;
use crate::measures::{DensityModel, Pushforward, Smoothed};
use crate::rng;
use crate::tvmetrics::{
    l1_distance, modulus_curve, shift_modulus_pushforward, tv_histogram_mc, tv_quadrature,
};

/// The named experiment suites exposed by `tvkit experiment`.
pub fn experiment_suites() -> &'static [&'static str] {
    &[
        "gauss-poly",
        "trig-poly",
        "radial",
        "theorem1-audit",
        "vandermonde",
    ]
}

#[derive(Debug, Args)]
pub struct OutputOpts {
    /// Output directory root (a fresh subdirectory is created per run).
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub format: OutputFormat,
}

fn finish(
    mut report: ExperimentReport,
    started: Instant,
    command: &str,
    out: &OutputOpts,
) -> Result<()> {
    report.wall_clock_secs = started.elapsed().as_secs_f64();
    let dir = write_report(&out.out, command, out.format, &report)?;
    println!(
        "{command}: wrote {} ({} rows) in {:.3} s",
        dir.display(),
        report.rows.len(),
        report.wall_clock_secs
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct PushforwardArgs {
    /// Polynomial coefficients, ascending ("0,0,1" is x^2).
    #[arg(long)]
    pub poly: String,
    #[arg(long, default_value = "gauss")]
    pub density: String,
    /// Number of tabulation points over the value range.
    #[arg(long, default_value_t = 256)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn run_pushforward(a: PushforwardArgs) -> Result<()> {
    let started = Instant::now();
    let f = parse_polynomial(&a.poly)?;
    let model = parse_density(&a.density)?;
    let pf = Pushforward::new(f, model)?;
    let mass = pf.mass_quadrature(a.tol)?;
    use crate::measures::LineDensity;
    let (lo, hi) = pf.support();

    let mut report = ExperimentReport::new(
        "pushforward",
        Provenance::new("pushforward", None, &[("tol", a.tol)]),
        &["t", "density"],
    );
    for i in 0..a.points {
        // interior sampling avoids evaluating exactly at critical values
        let t = lo + (hi - lo) * (i as f64 + 0.5) / a.points as f64;
        let q = pf.eval(t);
        report.push_row(vec![t, if q.is_finite() { q } else { f64::MAX }]);
    }
    report.notes.push(format!(
        "mass = {} (quadrature error {})",
        mass.value, mass.error
    ));
    finish(report, started, "pushforward", &a.output)
}

#[derive(Debug, Args)]
pub struct TvArgs {
    /// First polynomial (ascending coefficients).
    #[arg(long)]
    pub f: String,
    /// Second polynomial.
    #[arg(long)]
    pub g: String,
    #[arg(long, default_value = "gauss")]
    pub density: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Monte Carlo cross-check sample count (0 disables).
    #[arg(long, default_value_t = 0)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 512)]
    pub bins: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn run_tv(a: TvArgs) -> Result<()> {
    let started = Instant::now();
    let f = parse_polynomial(&a.f)?;
    let g = parse_polynomial(&a.g)?;
    let model = parse_density(&a.density)?;
    let pf = Pushforward::new(f.clone(), model.clone())?;
    let pg = Pushforward::new(g.clone(), model.clone())?;
    let tv = tv_quadrature(&pf, &pg, a.tol)?;
    let l1 = l1_distance(&f, &g, &model, a.tol.min(1e-9))?;

    let mut report = ExperimentReport::new(
        "tv",
        Provenance::new(
            "tv",
            (a.mc_samples > 0).then_some(a.seed),
            &[("tol", a.tol)],
        ),
        &["tv_quadrature", "quad_error", "tv_mc", "mc_error", "l1"],
    );
    let (tv_mc, mc_err) = if a.mc_samples > 0 {
        use crate::measures::LineDensity;
        let (flo, fhi) = pf.support();
        let (glo, ghi) = pg.support();
        let range = (flo.min(glo), fhi.max(ghi));
        let r = tv_histogram_mc(
            crate::bounds::poly_sampler(f.clone(), model.clone()),
            crate::bounds::poly_sampler(g.clone(), model.clone()),
            a.mc_samples,
            a.bins,
            range,
            a.seed,
        )?;
        (r.value, r.error_estimate)
    } else {
        (f64::NAN, f64::NAN)
    };
    report.push_row(vec![tv.value, tv.error_estimate, tv_mc, mc_err, l1]);
    finish(report, started, "tv", &a.output)
}

#[derive(Debug, Args)]
pub struct ModulusArgs {
    /// Polynomial coefficients (exclusive with --trig).
    #[arg(long, conflicts_with = "trig")]
    pub poly: Option<String>,
    /// Trigonometric polynomial "cos=...;sin=...".
    #[arg(long)]
    pub trig: Option<String>,
    #[arg(long, default_value = "gauss")]
    pub density: String,
    /// Shift grid lo:hi:points (geometric).
    #[arg(long, default_value = "1e-4:1:30")]
    pub u: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn run_modulus(a: ModulusArgs) -> Result<()> {
    let started = Instant::now();
    let grid = parse_grid(&a.u)?;
    let model = parse_density(&a.density)?;
    let (curve, desc) = if let Some(spec) = &a.poly {
        let f = parse_polynomial(spec)?;
        (modulus_curve(&f, &model, &grid, a.tol)?, spec.clone())
    } else if let Some(spec) = &a.trig {
        if !model.is_gaussian() {
            return Err(Error::Input(
                "trig modulus runs under the Gaussian model".into(),
            ));
        }
        let f = parse_trig(spec)?;
        let (curve, _) = trig_modulus_experiment(&f, &grid, a.tol)?;
        (curve, spec.clone())
    } else {
        return Err(Error::Input("modulus needs --poly or --trig".into()));
    };
    let window = (grid[0], grid[grid.len() - 1]);
    let fit = fit_smoothness(&curve, window)?;

    let mut report = ExperimentReport::new(
        "modulus",
        Provenance::new("modulus", None, &[("tol", a.tol)]),
        &["u", "delta"],
    );
    for (u, d) in curve.u_grid.iter().zip(&curve.delta_values) {
        report.push_row(vec![*u, *d]);
    }
    report.slopes.push(super::report::SlopeFit {
        name: "log delta vs log u".into(),
        slope: fit.alpha,
        stderr: fit.residual,
        intercept: fit.constant_c.ln(),
    });
    report.notes.push(format!(
        "map {desc}: fitted alpha = {:.6}, C = {:.6}, rms log residual {:.3e}",
        fit.alpha, fit.constant_c, fit.residual
    ));
    finish(report, started, "modulus", &a.output)
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub poly: String,
    #[arg(long, default_value = "gauss")]
    pub density: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tail_tol: f64,
    /// Verification grid for measured delta(u) <= C u^alpha.
    #[arg(long, default_value = "1e-4:1:30")]
    pub u: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn run_certify(a: CertifyArgs) -> Result<()> {
    let started = Instant::now();
    let f = parse_polynomial(&a.poly)?;
    let model = parse_density(&a.density)?;
    let cert = certified_modulus_constant(&f, &model, a.tail_tol)?;
    let grid = parse_grid(&a.u)?;
    let curve = modulus_curve(&f, &model, &grid, a.tol)?;
    let est = cert.estimate();
    let ok = verify_certified(&curve, &est, 1e-6);

    let mut report = ExperimentReport::new(
        "certify",
        Provenance::new("certify", None, &[("tail_tol", a.tail_tol), ("tol", a.tol)]),
        &["u", "delta", "certified_bound", "slack"],
    );
    for (u, d) in curve.u_grid.iter().zip(&curve.delta_values) {
        let b = est.constant_c * u.powf(est.alpha);
        report.push_row(vec![*u, *d, b, b - d]);
    }
    report.notes.push(format!(
        "alpha = {}, C_total = {}, verified on grid: {ok}",
        est.alpha, est.constant_c
    ));
    report.extra = serde_json::to_value(&cert)
        .map_err(|e| Error::Internal(format!("certificate serialization: {e}")))?;
    if !ok {
        report
            .notes
            .push("WARNING: measured modulus exceeded the certificate somewhere".into());
    }
    finish(report, started, "certify", &a.output)
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub g: String,
    #[arg(long, default_value = "gauss")]
    pub density: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tail_tol: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn run_bound(a: BoundArgs) -> Result<()> {
    let started = Instant::now();
    let f = parse_polynomial(&a.f)?;
    let g = parse_polynomial(&a.g)?;
    let model = parse_density(&a.density)?;
    let cert_f = certified_modulus_constant(&f, &model, a.tail_tol)?;
    let cert_g = certified_modulus_constant(&g, &model, a.tail_tol)?;
    let alpha = cert_f.alpha.min(cert_g.alpha);
    let l1 = l1_distance(&f, &g, &model, a.tol.min(1e-9))?;
    let bound = smoothing_bound(cert_f.total_constant, cert_g.total_constant, alpha, l1)?;

    let pf = Pushforward::new(f.clone(), model.clone())?;
    let pg = Pushforward::new(g.clone(), model.clone())?;
    let tv = tv_quadrature(&pf, &pg, a.tol)?;
    let (d1, d2, d3) = if bound.degenerate {
        (0.0, 0.0, 0.0)
    } else {
        let s1 = Smoothed::new(&pf, bound.sigma_opt, a.tol * 1e-3)?;
        let s2 = Smoothed::new(&pg, bound.sigma_opt, a.tol * 1e-3)?;
        (
            tv_quadrature(&pf, &s1, a.tol)?.value,
            tv_quadrature(&pg, &s2, a.tol)?.value,
            smoothed_comparison(&f, &g, &model, bound.sigma_opt, a.tol)?,
        )
    };

    let mut report = ExperimentReport::new(
        "bound",
        Provenance::new("bound", None, &[("tail_tol", a.tail_tol), ("tol", a.tol)]),
        &[
            "tv_measured",
            "delta1_measured",
            "delta2_measured",
            "delta3_exact",
            "decomposition_sum",
            "clamped_bound",
            "l1",
        ],
    );
    report.push_row(vec![
        tv.value,
        d1,
        d2,
        d3,
        d1 + d2 + d3,
        bound.clamped_bound,
        l1,
    ]);
    report.extra = serde_json::to_value(&bound)
        .map_err(|e| Error::Internal(format!("bound serialization: {e}")))?;
    report.notes.push(format!(
        "chain: {:.6} <= {:.6} <= {:.6}",
        tv.value,
        d1 + d2 + d3,
        bound.clamped_bound
    ));
    finish(report, started, "bound", &a.output)
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// One of: gauss-poly, trig-poly, radial, theorem1-audit, vandermonde.
    pub suite: String,
    /// Polynomial degree for gauss-poly / theorem1-audit.
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Coefficient perturbation grid lo:hi:points.
    #[arg(long, default_value = "1e-4:1e-1:10")]
    pub deltas: String,
    /// Shift grid for trig-poly / radial.
    #[arg(long, default_value = "1e-4:1e-2:12")]
    pub u: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 400_000)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 1024)]
    pub bins: usize,
    /// Largest n for the vandermonde suite.
    #[arg(long, default_value_t = 8)]
    pub n_max: u32,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn run_experiment(a: ExperimentArgs) -> Result<()> {
    match a.suite.as_str() {
        "gauss-poly" => suite_gauss_poly(a),
        "trig-poly" => suite_trig_poly(a),
        "radial" => suite_radial(a),
        "theorem1-audit" => suite_theorem1_audit(a),
        "vandermonde" => suite_vandermonde(a),
        other => Err(Error::Input(format!(
            "unknown suite '{other}'; available: {}",
            experiment_suites().join(", ")
        ))),
    }
}

/// Rate experiment for f = x^m vs g = f + delta under the standard
/// Gaussian: slope of log TV against log delta sandwiched between the
/// certified exponent 1/(m+1) and the sharp coefficient rate 1/m.
fn suite_gauss_poly(a: ExperimentArgs) -> Result<()> {
    let started = Instant::now();
    if a.m == 0 {
        return Err(Error::Input("need m >= 1".into()));
    }
    let deltas = parse_grid(&a.deltas)?;
    let model = DensityModel::standard_gaussian();
    let f = Polynomial::monomial(1.0, a.m as usize);
    let pf = Pushforward::new(f.clone(), model.clone())?;

    let mut report = ExperimentReport::new(
        "gauss-poly",
        Provenance::new("experiment gauss-poly", Some(a.seed), &[("tol", a.tol)]),
        &[
            "delta",
            "l1",
            "tv_quadrature",
            "tv_mc",
            "mc_error",
            "slack_vs_mc",
        ],
    );
    let mut log_d = Vec::new();
    let mut log_tv = Vec::new();
    for (i, &delta) in deltas.iter().enumerate() {
        // g = f + delta: the pushforward shifts by delta in value
        let tvq = shift_modulus_pushforward(&pf, delta, a.tol)?;
        let tv_mc = mc_cross_check(&f, delta, &model, &a, i as u64)?;
        report.push_row(vec![
            delta,
            delta,
            tvq.value,
            tv_mc.value,
            tv_mc.error_estimate,
            (tvq.value - tv_mc.value).abs(),
        ]);
        log_d.push(delta.ln());
        log_tv.push(tvq.value.max(1e-300).ln());
    }
    report
        .slopes
        .push(slope_fit("log tv vs log delta", &log_d, &log_tv)?);
    let lo = 1.0 / (a.m as f64 + 1.0) - 0.05;
    let hi = 1.0 / a.m as f64 + 0.1;
    report.notes.push(format!(
        "expected slope range [{lo:.4}, {hi:.4}] for m = {}",
        a.m
    ));
    finish(report, started, "experiment-gauss-poly", &a.output)
}

/// Monte Carlo TV between f(X) and f(X) + delta, compared in
/// square-root-signed coordinates when the map has even order so the
/// histogram sees bounded densities.
fn mc_cross_check(
    f: &Polynomial,
    delta: f64,
    model: &DensityModel,
    a: &ExperimentArgs,
    case: u64,
) -> Result<crate::tvmetrics::TVResult> {
    let m = f.degree().max(1) as f64;
    let transform = move |y: f64| y.signum() * y.abs().powf(1.0 / m);
    let fa = f.clone();
    let fb = f.clone();
    let ma = model.clone();
    let mb = model.clone();
    let sampler_a = move |r: &mut rng::Rng| transform(fa.eval(sample_model(&ma, r)));
    let sampler_b = move |r: &mut rng::Rng| transform(fb.eval(sample_model(&mb, r)) + delta);
    let (lo, hi) = model.support();
    let vr = value_range_estimate(f, lo, hi, delta);
    let range = (transform(vr.0), transform(vr.1));
    tv_histogram_mc(
        sampler_a,
        sampler_b,
        a.mc_samples,
        a.bins,
        range,
        a.seed ^ (case << 32),
    )
}

fn value_range_estimate(f: &Polynomial, lo: f64, hi: f64, pad: f64) -> (f64, f64) {
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for i in 0..=400 {
        let x = lo + (hi - lo) * i as f64 / 400.0;
        let v = f.eval(x);
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    (vmin - pad.abs() - 1e-9, vmax + pad.abs() + 1e-9)
}

fn sample_model(model: &DensityModel, r: &mut rng::Rng) -> f64 {
    model.sample(r)
}

fn suite_trig_poly(a: ExperimentArgs) -> Result<()> {
    let started = Instant::now();
    let grid = parse_grid(&a.u)?;
    // default benchmark map: cos x + 0.5 sin 2x (degree 2)
    let f = crate::funcspace::TrigPolynomial::new(vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 0.5])?;
    let (curve, fit) = trig_modulus_experiment(&f, &grid, a.tol)?;
    let n = f.degree() as f64;

    let mut report = ExperimentReport::new(
        "trig-poly",
        Provenance::new("experiment trig-poly", None, &[("tol", a.tol)]),
        &["u", "delta"],
    );
    for (u, d) in curve.u_grid.iter().zip(&curve.delta_values) {
        report.push_row(vec![*u, *d]);
    }
    report.slopes.push(super::report::SlopeFit {
        name: "log delta vs log u".into(),
        slope: fit.alpha,
        stderr: fit.residual,
        intercept: fit.constant_c.ln(),
    });
    report.notes.push(format!(
        "degree n = {n}: fitted alpha = {:.4}, flatness floor 1/(2n) = {:.4}",
        fit.alpha,
        1.0 / (2.0 * n)
    ));
    finish(report, started, "experiment-trig-poly", &a.output)
}

fn suite_radial(a: ExperimentArgs) -> Result<()> {
    let started = Instant::now();
    let grid = parse_grid(&a.u)?;
    let cases: [(u32, f64); 3] = [(1, 2.0), (2, 2.0), (3, 1.0)];

    let mut report = ExperimentReport::new(
        "radial",
        Provenance::new("experiment radial", Some(a.seed), &[("tol", a.tol)]),
        &[
            "d",
            "m",
            "fitted_alpha",
            "expected_alpha",
            "mc_delta_mid",
            "quad_delta_mid",
        ],
    );
    for (i, &(d, m)) in cases.iter().enumerate() {
        let (curve, fit) = radial_modulus_experiment(d, m, &grid, a.tol)?;
        let expected = (d as f64 / m).min(1.0);
        // one-point Monte Carlo cross-check in the middle of the grid
        let mid = curve.u_grid[curve.u_grid.len() / 2];
        let quad_mid = curve.delta_values[curve.u_grid.len() / 2];
        let base = radial_sampler(d, m);
        let mut shifted = radial_sampler(d, m);
        let shifted = move |r: &mut rng::Rng| shifted(r) + mid;
        let hi = ((d as f64).sqrt() + 6.0).powf(m) + mid;
        let mc = tv_histogram_mc(
            base,
            shifted,
            a.mc_samples.max(100_000),
            a.bins,
            (0.0, hi),
            a.seed ^ ((i as u64) << 16),
        )?;
        report.push_row(vec![d as f64, m, fit.alpha, expected, mc.value, quad_mid]);
    }
    report
        .notes
        .push("fitted exponents should match min(1, d/m) within 0.1".into());
    finish(report, started, "experiment-radial", &a.output)
}

/// Full chain audit: measured TV <= measured delta1 + delta2 + delta3
/// at sigma_opt <= min(2, C l1^{alpha/(alpha+1)}) with certified
/// constants, for f = x^m, g = f + delta.
fn suite_theorem1_audit(a: ExperimentArgs) -> Result<()> {
    let started = Instant::now();
    if a.m == 0 {
        return Err(Error::Input("need m >= 1".into()));
    }
    let deltas = parse_grid(&a.deltas)?;
    let model = DensityModel::standard_gaussian();
    let f = Polynomial::monomial(1.0, a.m as usize);
    let cert = certified_modulus_constant(&f, &model, 1e-6)?;
    let pf = Pushforward::new(f.clone(), model.clone())?;

    let mut report = ExperimentReport::new(
        "theorem1-audit",
        Provenance::new("experiment theorem1-audit", Some(a.seed), &[("tol", a.tol)]),
        &[
            "delta",
            "tv_measured",
            "delta1",
            "delta2",
            "delta3_exact",
            "decomposition_sum",
            "clamped_bound",
            "chain_ok",
        ],
    );
    let mut all_ok = true;
    for &delta in &deltas {
        let g = f.add(&Polynomial::constant(delta));
        let l1 = delta;
        let bound = smoothing_bound(cert.total_constant, cert.total_constant, cert.alpha, l1)?;
        let tv = shift_modulus_pushforward(&pf, delta, a.tol)?;
        let pg = Pushforward::new(g.clone(), model.clone())?;
        let s1 = Smoothed::new(&pf, bound.sigma_opt, a.tol * 1e-2)?;
        let s2 = Smoothed::new(&pg, bound.sigma_opt, a.tol * 1e-2)?;
        let d1 = tv_quadrature(&pf, &s1, a.tol)?.value;
        let d2 = tv_quadrature(&pg, &s2, a.tol)?.value;
        let d3 = smoothed_comparison(&f, &g, &model, bound.sigma_opt, a.tol)?;
        let sum = d1 + d2 + d3;
        let slack = 1e-5;
        let ok = tv.value <= sum + slack && sum <= bound.clamped_bound + slack;
        all_ok &= ok;
        report.push_row(vec![
            delta,
            tv.value,
            d1,
            d2,
            d3,
            sum,
            bound.clamped_bound,
            if ok { 1.0 } else { 0.0 },
        ]);
    }
    report.notes.push(format!(
        "certified alpha = {}, C = {}; every chain link holds: {all_ok}",
        cert.alpha, cert.total_constant
    ));
    finish(report, started, "experiment-theorem1-audit", &a.output)
}

fn suite_vandermonde(a: ExperimentArgs) -> Result<()> {
    let started = Instant::now();
    let mut report = ExperimentReport::new(
        "vandermonde",
        Provenance::new("experiment vandermonde", None, &[]),
        &["n", "nonzero", "dense_agrees", "delta_digits"],
    );
    let mut details = Vec::new();
    for n in 1..=a.n_max {
        let c = vandermonde_system_check(n)?;
        let dense = vandermonde_dense_determinant(n)?;
        let agrees = dense == c.delta;
        report.push_row(vec![
            n as f64,
            if c.nonzero { 1.0 } else { 0.0 },
            if agrees { 1.0 } else { 0.0 },
            c.delta.to_string().len() as f64,
        ]);
        details.push(serde_json::to_value(&c).map_err(|e| Error::Internal(e.to_string()))?);
    }
    report.extra = serde_json::Value::Array(details);
    report.notes.push(format!(
        "all determinants nonzero up to n = {}: flatness order stays below 2n",
        a.n_max
    ));
    finish(report, started, "experiment-vandermonde", &a.output)
}
