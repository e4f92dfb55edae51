//! Brute-force checks of the analytic approximations: 2D quadrature of the
//! rate integrals, a Monte-Carlo check of the type-I change of variables, and
//! a scan of Taylor versus exact mismatch.

use std::cell::Cell;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dispersion::{OpticalMode, Polarization};
use crate::error::{Error, Result};
use crate::numeric::{integrate_panels, sinc2, Quadrature};
use crate::phasematch::{delta_kz_exact, taylor_type1, taylor_type2, PhaseMatchSetup, PmKind};
use crate::rates::{integral_i, type2_geometry, DetectionWindow, TYPE1_DELTA_FACTOR};

/// Sinc² lobes covered past the exact-phase-matching locus.
pub const LOBES_PAST_LOCUS: usize = 8;
/// Lobes resolved one panel each on either side of the locus.
const RESOLVED_LOBES: usize = 64;
/// Angle cap for the Taylor audit when the window is extrapolated.
pub const AUDIT_THETA_CAP: f64 = 0.1;

/// Panel counts and tolerances for the 2D quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Minimum number of outer (frequency) panels.
    pub n_omega: usize,
    /// Minimum number of panels for the inner (transverse) integral.
    pub n_q: usize,
    pub max_depth: usize,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            n_omega: 32,
            n_q: 32,
            max_depth: 12,
            rel_tol: 1e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_omega < 16 || self.n_q < 16 || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "quadrature spec needs grid sizes ≥ 16 and tolerance > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        QuadratureSpec {
            n_omega: 2 * self.n_omega,
            n_q: 2 * self.n_q,
            ..*self
        }
    }
}

/// Breakpoints on [lo, hi]: lobe edges `centre + j·spacing` for |j| ≤ lobes,
/// the extra `kinks`, and a uniform fill so there are at least `n_fill` panels.
fn breakpoints(
    lo: f64,
    hi: f64,
    centre: f64,
    spacing: f64,
    lobes: usize,
    kinks: &[f64],
    n_fill: usize,
) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    let n = lobes as i64;
    for j in -n..=n {
        let p = centre + j as f64 * spacing;
        if p > lo && p < hi {
            pts.push(p);
        }
    }
    for &k in kinks {
        if k > lo && k < hi {
            pts.push(k);
        }
    }
    for i in 1..n_fill {
        pts.push(lo + (hi - lo) * i as f64 / n_fill as f64);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (hi - lo).abs());
    pts
}

/// Panel quadrature to a tolerance relative to the whole integral rather
/// than to each panel.
fn panels<F: Fn(f64) -> f64>(f: &F, pts: &[f64], spec: &QuadratureSpec) -> Quadrature {
    let rough = integrate_panels(f, pts, spec.rel_tol, 0.0, 0).value;
    let n = pts.len().saturating_sub(1).max(1) as f64;
    let abs_tol = spec.rel_tol * rough.abs() / n;
    integrate_panels(f, pts, 0.0, abs_tol, spec.max_depth)
}

/// Runs an outer integral whose integrand itself integrates, tracking
/// convergence of every inner call.
fn nested<F: Fn(f64, &Cell<bool>) -> f64>(
    outer: &[f64],
    spec: &QuadratureSpec,
    inner: F,
    what: &'static str,
) -> Result<f64> {
    let ok = Cell::new(true);
    let q = panels(&|x| inner(x, &ok), outer, spec);
    if !q.converged || !ok.get() || !q.value.is_finite() {
        return Err(Error::NonConverged {
            what,
            estimate: q.value,
            error: q.error,
        });
    }
    Ok(q.value)
}

/// Type-I rate integral by 2D quadrature of the polar form
/// (1/3√3)·((2π)³/2)·∫∫ q³Ω sinc²((βΩ² − αq²)l/2) dq dΩ over the window:
/// Ω up to the spectral edge, q up to k_p θ_max / 3 and at most
/// [`LOBES_PAST_LOCUS`] lobes past the locus.
pub fn integral_i_type1_numeric(
    setup: &PhaseMatchSetup,
    window: &DetectionWindow,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    integral_i(setup, window)?;
    let t = taylor_type1(setup)?;
    let (blue, red) = window.spectral_bounds(setup.pump_nm);
    let omega_m = blue.min(red);
    let u_cap = (t.k_p * window.theta_max / 3.0).powi(2);
    if omega_m <= 0.0 || u_cap == 0.0 {
        return Ok(0.0);
    }
    let (alpha, beta, l) = (t.alpha, t.beta, setup.length_cm);
    // u = q², q³dq = u du / 2
    let du = 2.0 * PI / (alpha * l);
    let kinks = [
        (alpha * u_cap / beta).sqrt(),
        (alpha * (u_cap - LOBES_PAST_LOCUS as f64 * du) / beta)
            .max(0.0)
            .sqrt(),
    ];
    let outer = breakpoints(0.0, omega_m, 0.0, 1.0, 0, &kinks, spec.n_omega);
    let inner = |w: f64, ok: &Cell<bool>| {
        let u0 = beta * w * w / alpha;
        let ub = (u0 + LOBES_PAST_LOCUS as f64 * du).min(u_cap);
        let pts = breakpoints(0.0, ub, u0, du, RESOLVED_LOBES, &[], spec.n_q);
        let q = panels(
            &|u| 0.5 * u * sinc2((beta * w * w - alpha * u) * l / 2.0),
            &pts,
            spec,
        );
        if !q.converged {
            ok.set(false);
        }
        w * q.value
    };
    let v = nested(&outer, spec, inner, "type-I quadrature")?;
    Ok(TYPE1_DELTA_FACTOR * (2.0 * PI).powi(3) / 2.0 * v)
}

/// Type-II rate integral by quadrature over (Ω₊, q₊) with the Ω₋ and q₋
/// range lengths as weights.
pub fn integral_i_type2_numeric(
    setup: &PhaseMatchSetup,
    window: &DetectionWindow,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    let g = type2_geometry(setup, window)?;
    if g.omega_max == 0.0 {
        return Ok(0.0);
    }
    let l = setup.length_cm;
    let a = SQRT_2 * g.omega_m;
    let b = SQRT_2 * g.q_m;
    let (bp, ap) = (g.beta_plus, g.alpha_plus);
    let wq = 2.0 * PI / (ap.abs() * l);
    let s = (bp / ap).abs();
    let outer = breakpoints(0.0, a, 0.0, 1.0, 0, &[b / s], spec.n_omega);
    let inner = |w: f64, ok: &Cell<bool>| {
        let q0 = bp * w / ap;
        let pts = breakpoints(-b, b, q0, wq, RESOLVED_LOBES, &[0.0], spec.n_q);
        let q = panels(
            &|q| 2.0 * (b - q.abs()) * sinc2((bp * w - ap * q) * l / 2.0),
            &pts,
            spec,
        );
        if !q.converged {
            ok.set(false);
        }
        2.0 * (a - w) * q.value
    };
    // the integrand is even under (Ω₊, q₊) → (−Ω₊, −q₊)
    let v = nested(&outer, spec, inner, "type-II quadrature")?;
    Ok(2.0 * PI / (l * g.gamma.abs()) * 2.0 * v)
}

pub fn integral_i_numeric(
    setup: &PhaseMatchSetup,
    window: &DetectionWindow,
    spec: &QuadratureSpec,
) -> Result<f64> {
    match setup.pm_type.kind() {
        PmKind::TypeI => integral_i_type1_numeric(setup, window, spec),
        PmKind::TypeII => integral_i_type2_numeric(setup, window, spec),
    }
}

/// Orthonormal basis of the plane x₁ + x₂ + x₃ = 0.
const BASIS_A: [f64; 3] = [
    -0.408_248_290_463_863,
    -0.408_248_290_463_863,
    0.816_496_580_927_726,
];
const BASIS_B: [f64; 3] = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0];

fn from_plane(a: f64, b: f64) -> [f64; 3] {
    [0, 1, 2].map(|i| a * BASIS_A[i] + b * BASIS_B[i])
}

/// Test function for [`jacobian_mc_check`], evaluated on the conservation
/// manifold (three frequencies, three 2D transverse vectors).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum McTestFunction {
    /// Indicator of |Ω₁|,|Ω₂|,|q₁ₓ|,|q₁ᵧ|,|q₂ₓ|,|q₂ᵧ| ≤ 1.
    Box,
    /// A skewed Gaussian.
    Gaussian,
}

impl McTestFunction {
    fn eval(self, w: [f64; 3], q: [[f64; 2]; 3]) -> f64 {
        match self {
            McTestFunction::Box => {
                let inside = [w[0], w[1], q[0][0], q[0][1], q[1][0], q[1][1]]
                    .iter()
                    .all(|x| x.abs() <= 1.0);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            McTestFunction::Gaussian => {
                let r2: f64 = w.iter().map(|x| x * x).sum::<f64>()
                    + q.iter().map(|v| v[0] * v[0] + v[1] * v[1]).sum::<f64>();
                (-0.5 * r2).exp() * (1.0 + 0.5 * (w[0] - 0.7 * q[1][0] + 0.3 * q[2][1]).sin())
            }
        }
    }

    /// Half-width of the sampling box in the original coordinates.
    fn extent(self) -> f64 {
        match self {
            McTestFunction::Box => 1.0,
            McTestFunction::Gaussian => 3.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobianReport {
    pub test_function: McTestFunction,
    pub n_samples: usize,
    pub seed: u64,
    /// Integral with photon 3 eliminated, over (Ω₁, Ω₂, q₁, q₂).
    pub original: f64,
    pub original_se: f64,
    /// The same integral in polar (Ω_Σ, φ_Ω, q_Σ, φ_q, φ_A, φ_B) with the
    /// Jacobian Ω_Σ q_Σ³ cos φ_q sin φ_q and the 1/(3√3) factor.
    pub polar: f64,
    pub polar_se: f64,
    pub rel_discrepancy: f64,
    /// |original − polar| in combined standard errors.
    pub z_score: f64,
}

fn mean_se(sum: f64, sum2: f64, n: usize, volume: f64) -> (f64, f64) {
    let n = n as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    (volume * mean, volume * (var / n).sqrt())
}

/// Monte-Carlo comparison of the type-I variable change; needs ≥ 1e5 samples.
pub fn jacobian_mc_check(
    n_samples: usize,
    test_function: McTestFunction,
    seed: u64,
) -> Result<JacobianReport> {
    if n_samples < 100_000 {
        return Err(Error::InvalidInput(format!(
            "jacobian check needs ≥ 1e5 samples, got {n_samples}"
        )));
    }
    let f = test_function;
    let e = f.extent();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n_samples {
        let mut x = [0.0; 6];
        for v in &mut x {
            *v = rng.gen_range(-e..e);
        }
        let w = [x[0], x[1], -x[0] - x[1]];
        let q = [[x[2], x[3]], [x[4], x[5]], [-x[2] - x[4], -x[3] - x[5]]];
        let v = f.eval(w, q);
        s += v;
        s2 += v * v;
    }
    let (original, original_se) = mean_se(s, s2, n_samples, (2.0 * e).powi(6));

    // radii covering the sampling box: ΣΩᵢ² ≤ 6e², Σ|qᵢ|² ≤ 12e²
    let r_w = 6f64.sqrt() * e;
    let r_q = 12f64.sqrt() * e;
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n_samples {
        let ws = rng.gen_range(0.0..r_w);
        let pw = rng.gen_range(0.0..2.0 * PI);
        let qs = rng.gen_range(0.0..r_q);
        let pq = rng.gen_range(0.0..FRAC_PI_2);
        let pa = rng.gen_range(0.0..2.0 * PI);
        let pb = rng.gen_range(0.0..2.0 * PI);
        let w = from_plane(ws * pw.cos(), ws * pw.sin());
        let (qa, qb) = (qs * pq.cos(), qs * pq.sin());
        let qx = from_plane(qa * pa.cos(), qb * pb.cos());
        let qy = from_plane(qa * pa.sin(), qb * pb.sin());
        let q = [[qx[0], qy[0]], [qx[1], qy[1]], [qx[2], qy[2]]];
        let jac = ws * qs.powi(3) * pq.cos() * pq.sin();
        let v = jac * f.eval(w, q);
        s += v;
        s2 += v * v;
    }
    let volume = r_w * 2.0 * PI * r_q * FRAC_PI_2 * (2.0 * PI) * (2.0 * PI);
    let (p, p_se) = mean_se(s, s2, n_samples, volume);
    let polar = TYPE1_DELTA_FACTOR * p;
    let polar_se = TYPE1_DELTA_FACTOR * p_se;
    Ok(JacobianReport {
        test_function,
        n_samples,
        seed,
        original,
        original_se,
        polar,
        polar_se,
        rel_discrepancy: (polar - original).abs() / original.abs(),
        z_score: (polar - original).abs() / original_se.hypot(polar_se),
    })
}

/// Taylor-versus-exact mismatch statistics over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorAudit {
    pub points: usize,
    /// max and median |Δk_Taylor − Δk_exact| / (2π/l).
    pub max_dev: f64,
    pub median_dev: f64,
    /// max and median of the same difference over the size of the Taylor
    /// terms at that point.
    pub max_rel_dev: f64,
    pub median_rel_dev: f64,
    /// Angular bound actually scanned, rad.
    pub theta_scanned: f64,
    pub omega_scanned: f64,
}

/// Grid for [`taylor_audit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditGrid {
    pub n_omega: usize,
    /// Points across the phase-matching band at each frequency.
    pub n_band: usize,
    /// Points per angular variable.
    pub n_angle: usize,
    /// Half-width of the scanned band in sinc² lobes.
    pub band_lobes: f64,
}

impl Default for AuditGrid {
    fn default() -> Self {
        AuditGrid {
            n_omega: 16,
            n_band: 5,
            n_angle: 4,
            band_lobes: 1.0,
        }
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn modes_for(
    setup: &PhaseMatchSetup,
    w: [f64; 3],
    q: [[f64; 2]; 3],
    pols: [Polarization; 3],
) -> [OpticalMode; 3] {
    let w0 = setup.omega_0();
    [0, 1, 2].map(|i| OpticalMode {
        omega: w0 + w[i],
        polarization: pols[i],
        q: q[i],
    })
}

fn grid(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
}

/// Scans the main phase-matching band inside the window and compares the
/// Taylor mismatch with [`delta_kz_exact`]. Windows flagged as extrapolated
/// are scanned only up to [`AUDIT_THETA_CAP`].
pub fn taylor_audit(
    setup: &PhaseMatchSetup,
    window: &DetectionWindow,
    grid_spec: &AuditGrid,
) -> Result<TaylorAudit> {
    if grid_spec.n_omega == 0 || grid_spec.n_band == 0 || grid_spec.n_angle == 0 {
        return Err(Error::InvalidInput("audit grid sizes must be ≥ 1".into()));
    }
    let l = setup.length_cm;
    let scale = 2.0 * PI / l;
    let theta = if window.extrapolated_geometry {
        window.theta_max.min(AUDIT_THETA_CAP)
    } else {
        window.theta_max
    };
    let (blue, red) = window.spectral_bounds(setup.pump_nm);
    let omega_bound = blue.min(red);
    let mut dev = Vec::new();
    let mut rel = Vec::new();
    let mut push = |taylor: f64, exact: f64, size: f64| {
        let d = (taylor - exact).abs();
        dev.push(d / scale);
        if size > 0.0 {
            rel.push(d / size);
        }
    };
    let pols = setup.pm_type.generated();
    let n = grid_spec.n_angle;
    let omega_scanned;
    match setup.pm_type.kind() {
        PmKind::TypeI => {
            let t = taylor_type1(setup)?;
            let q_cap = t.k_p * theta / 3.0;
            let ratio = t.beta / t.alpha;
            let slope = ratio.max(0.0).sqrt();
            let w_max = if slope > 0.0 {
                omega_bound.min(q_cap / slope)
            } else {
                omega_bound
            };
            omega_scanned = w_max;
            let du = grid_spec.band_lobes * 2.0 * PI / (t.alpha * l);
            for w_s in grid(grid_spec.n_omega, 0.0, w_max) {
                let u0 = ratio * w_s * w_s;
                let (u_lo, u_hi) = ((u0 - du).max(0.0), (u0 + du).min(q_cap * q_cap));
                if u_hi <= u_lo {
                    continue;
                }
                for u in grid(grid_spec.n_band, u_lo, u_hi) {
                    let q_s = u.sqrt();
                    for pw in grid(n, 0.0, 2.0 * PI) {
                        let w = from_plane(w_s * pw.cos(), w_s * pw.sin());
                        for pq in grid(n, 0.0, FRAC_PI_2) {
                            let (qa, qb) = (q_s * pq.cos(), q_s * pq.sin());
                            for pa in grid(n, 0.0, 2.0 * PI) {
                                for pb in grid(n, 0.0, 2.0 * PI) {
                                    let qx = from_plane(qa * pa.cos(), qb * pb.cos());
                                    let qy = from_plane(qa * pa.sin(), qb * pb.sin());
                                    let q = [[qx[0], qy[0]], [qx[1], qy[1]], [qx[2], qy[2]]];
                                    let exact =
                                        delta_kz_exact(setup, &modes_for(setup, w, q, pols))?;
                                    let taylor = t.delta_kz(w_s, q_s);
                                    push(
                                        taylor,
                                        exact,
                                        t.beta.abs() * w_s * w_s + t.alpha * q_s * q_s,
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        PmKind::TypeII => {
            let t = taylor_type2(setup)?;
            let q_m = t.k_p * theta;
            let s = (t.beta_plus / t.alpha_plus).abs();
            let w_max = omega_bound.min(q_m / s);
            omega_scanned = w_max;
            let dq = grid_spec.band_lobes * 2.0 * PI / (t.alpha_plus.abs() * l);
            let beta = |p| {
                if p == Polarization::Ordinary {
                    t.beta_o
                } else {
                    t.beta_e
                }
            };
            let slope = |p| if p == t.single { t.alpha_e } else { 0.0 };
            let gamma_y = |p| {
                if p == Polarization::Ordinary {
                    t.gamma_oy
                } else {
                    t.gamma_ey
                }
            };
            // photons 0 and 1 form the pair; photon 2 is eliminated by conservation
            let order = {
                let mut o = pols;
                o.sort_by_key(|p| *p != t.pair);
                o
            };
            let a = SQRT_2 * omega_bound;
            for wp in grid(grid_spec.n_omega, -SQRT_2 * w_max, SQRT_2 * w_max) {
                let q0 = t.beta_plus * wp / t.alpha_plus;
                for qp in grid(grid_spec.n_band, q0 - dq, q0 + dq) {
                    for wm in grid(n, -(a - wp.abs()), a - wp.abs()) {
                        for qm in grid(n, -q_m, q_m) {
                            for qy1 in grid(n, -q_m / SQRT_2, q_m / SQRT_2) {
                                for qy2 in grid(n, -q_m / SQRT_2, q_m / SQRT_2) {
                                    let w1 = (wp + wm) / SQRT_2;
                                    let w2 = (wp - wm) / SQRT_2;
                                    let w = [w1, w2, -w1 - w2];
                                    let qx1 = (qp + qm) / SQRT_2;
                                    let qx2 = (qp - qm) / SQRT_2;
                                    let q = [[qx1, qy1], [qx2, qy2], [-qx1 - qx2, -qy1 - qy2]];
                                    let modes = modes_for(setup, w, q, order);
                                    if modes
                                        .iter()
                                        .any(|m| m.q[0].hypot(m.q[1]) > theta * t.k_p / 3.0)
                                    {
                                        continue;
                                    }
                                    let exact = delta_kz_exact(setup, &modes)?;
                                    let mut taylor = 0.0;
                                    let mut size = 0.0;
                                    for i in 0..3 {
                                        let p = order[i];
                                        let terms = [
                                            beta(p) * w[i],
                                            slope(p) * q[i][0],
                                            0.5 * gamma_y(p) * q[i][1] * q[i][1],
                                        ];
                                        taylor += terms.iter().sum::<f64>();
                                        size += terms.iter().map(|x| x.abs()).sum::<f64>();
                                    }
                                    // constant part: k_p − Σk_i(ω₀) vanishes at phase matching
                                    push(taylor, exact, size);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let points = dev.len();
    if points == 0 {
        return Err(Error::EmptyWindow(
            "no audit points inside the window".into(),
        ));
    }
    let max_dev = dev.iter().copied().fold(0.0, f64::max);
    let max_rel_dev = rel.iter().copied().fold(0.0, f64::max);
    Ok(TaylorAudit {
        points,
        max_dev,
        median_dev: median(&mut dev),
        max_rel_dev,
        median_rel_dev: median(&mut rel),
        theta_scanned: theta,
        omega_scanned,
    })
}

/// Closed form against numeric quadrature plus the Taylor audit for one
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub config_id: String,
    pub closed_form: f64,
    pub numeric: f64,
    pub ratio: f64,
    /// Relative change of the numeric value under grid doubling.
    pub self_convergence: f64,
    pub max_taylor_dev: f64,
    pub median_taylor_dev: f64,
    pub max_taylor_rel_dev: f64,
    pub median_taylor_rel_dev: f64,
}

pub fn audit_config(
    config_id: impl Into<String>,
    setup: &PhaseMatchSetup,
    window: &DetectionWindow,
    spec: &QuadratureSpec,
    audit_grid: &AuditGrid,
) -> Result<AuditReport> {
    let closed_form = integral_i(setup, window)?.value;
    let numeric = integral_i_numeric(setup, window, spec)?;
    let refined = integral_i_numeric(setup, window, &spec.doubled())?;
    let audit = taylor_audit(setup, window, audit_grid)?;
    Ok(AuditReport {
        config_id: config_id.into(),
        closed_form,
        numeric,
        ratio: closed_form / numeric,
        self_convergence: (refined - numeric).abs() / refined.abs(),
        max_taylor_dev: audit.max_dev,
        median_taylor_dev: audit.median_dev,
        max_taylor_rel_dev: audit.max_rel_dev,
        median_taylor_rel_dev: audit.median_rel_dev,
    })
}
