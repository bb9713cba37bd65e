//! Adaptive Gauss-Kronrod integration on `(0, ∞)` and on the upper half-plane.
//!
//! One-dimensional integrals use the 7/15-point Gauss-Kronrod pair with
//! QUADPACK-style error rescaling, bisecting the worst interval first.
//! Half-lines are mapped onto `[0, 1)` through `t = a·exp(x/(1-x))`, so the
//! rule only ever sees a finite interval.
//!
//! Half-plane integrals are iterated in polar coordinates `(r, θ)`: an outer
//! adaptive rule over `θ ∈ (0, π)` whose nodes each run an inner adaptive
//! radial integral. The radial integral is split at the function's shift,
//! continued in `u = ln r` up to a truncation radius `R`, and closed with a
//! power-law tail model `R² h(R e^{iθ}) / κ` taken from the decay hint. An
//! extra annulus `[R, 2R]` is always integrated; the change it causes is
//! folded into the error estimate and triggers radius growth when large.

use std::ops::{Add, Mul, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfplane::HalfPlaneFunction;
use crate::par;

/// Values the adaptive rules can integrate.
pub trait QuadValue:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// What to do when an integral exhausts its subdivision budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ErrorPolicy {
    /// Report `QuadratureFailure`.
    #[default]
    Strict,
    /// Return the best estimate with `converged = false`.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Radius where the half-plane tail model takes over. `None` picks one
    /// from the decay hint.
    pub halfplane_truncation_radius: Option<f64>,
    pub halfplane_inner_radius: f64,
    pub policy: ErrorPolicy,
    /// Run outer half-plane nodes on the rayon pool (ignored without the
    /// `parallel` feature).
    pub parallel: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            halfplane_truncation_radius: None,
            halfplane_inner_radius: 0.0,
            policy: ErrorPolicy::Strict,
            parallel: true,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "rel_tol = {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "abs_tol = {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::ParameterOutOfRange("max_subdivisions = 0".into()));
        }
        if let Some(r) = self.halfplane_truncation_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::ParameterOutOfRange(format!("radius = {r}")));
            }
        }
        if !(self.halfplane_inner_radius >= 0.0 && self.halfplane_inner_radius.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "inner radius = {}",
                self.halfplane_inner_radius
            )));
        }
        Ok(())
    }

    /// Same config with lenient failure handling; used for nested integrals.
    pub fn lenient(&self) -> Self {
        Self {
            policy: ErrorPolicy::Lenient,
            ..self.clone()
        }
    }

    pub fn sequential(&self) -> Self {
        Self {
            parallel: false,
            ..self.clone()
        }
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            rel: self.rel_tol,
            abs: self.abs_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult<V> {
    pub value: V,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    pub converged: bool,
}

impl<V: QuadValue> IntegralResult<V> {
    fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            subdivisions_used: self.subdivisions_used + other.subdivisions_used,
            converged: self.converged && other.converged,
        }
    }

    /// Applies the error policy: strict results must have converged.
    pub fn checked(self, policy: ErrorPolicy) -> Result<Self> {
        let magnitude = self.value.magnitude();
        if !magnitude.is_finite() || !self.error_estimate.is_finite() {
            return Err(Error::NonFinite("integrand".into()));
        }
        if policy == ErrorPolicy::Strict && !self.converged {
            return Err(Error::QuadratureFailure {
                value: magnitude,
                error_estimate: self.error_estimate,
                subdivisions: self.subdivisions_used,
            });
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy)]
struct Tolerance {
    rel: f64,
    abs: f64,
}

impl Tolerance {
    fn scaled(self, rel_factor: f64, abs_factor: f64) -> Self {
        Self {
            rel: self.rel * rel_factor,
            abs: self.abs * abs_factor,
        }
    }
}

// 7-point Gauss / 15-point Kronrod abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const POINTS_PER_RULE: usize = 15;

/// Abscissae in the order `gk15_apply` expects: centre, then `(c - h x_j,
/// c + h x_j)` for each Kronrod node.
fn gk15_nodes(a: f64, b: f64, out: &mut Vec<f64>) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    out.push(centre);
    for &x in &XGK[..7] {
        out.push(centre - half * x);
        out.push(centre + half * x);
    }
}

struct RuleOutput<V> {
    value: V,
    error: f64,
    resabs: f64,
}

fn gk15_apply<V: QuadValue>(a: f64, b: f64, vals: &[V]) -> RuleOutput<V> {
    debug_assert_eq!(vals.len(), POINTS_PER_RULE);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();
    let fc = vals[0];
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = WGK[7] * fc.magnitude();
    for j in 0..7 {
        let f1 = vals[1 + 2 * j];
        let f2 = vals[2 + 2 * j];
        let pair = f1 + f2;
        res_k = res_k + pair * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + pair * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        res_asc +=
            WGK[j] * ((vals[1 + 2 * j] - mean).magnitude() + (vals[2 + 2 * j] - mean).magnitude());
    }
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).magnitude();
    if res_asc != 0.0 && error != 0.0 {
        let scale = (200.0 * error / res_asc).powf(1.5);
        error = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    RuleOutput {
        value,
        error,
        resabs: res_abs,
    }
}

#[derive(Clone, Copy)]
struct Piece<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    resabs: f64,
    frozen: bool,
}

impl<V: QuadValue> Piece<V> {
    fn new(a: f64, b: f64, vals: &[V]) -> Self {
        let out = gk15_apply(a, b, vals);
        let width = (b - a).abs();
        let frozen = width <= 1e3 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        Self {
            a,
            b,
            value: out.value,
            error: out.error,
            resabs: out.resabs,
            frozen,
        }
    }
}

/// Adaptive bisection on `[a, b]`. `batch` evaluates the integrand at a
/// slice of abscissae and must preserve order.
fn adaptive<V, B>(
    a: f64,
    b: f64,
    batch: &B,
    tol: Tolerance,
    max_subdivisions: usize,
) -> IntegralResult<V>
where
    V: QuadValue,
    B: Fn(&[f64]) -> Vec<V>,
{
    let mut nodes = Vec::with_capacity(2 * POINTS_PER_RULE);
    gk15_nodes(a, b, &mut nodes);
    let vals = batch(&nodes);
    let mut pieces = vec![Piece::new(a, b, &vals)];
    let mut converged = false;
    loop {
        let mut total = V::default();
        let mut error = 0.0;
        let mut resabs = 0.0;
        for p in &pieces {
            total = total + p.value;
            error += p.error;
            resabs += p.resabs;
        }
        if !total.magnitude().is_finite() || !error.is_finite() {
            return IntegralResult {
                value: total,
                error_estimate: f64::INFINITY,
                subdivisions_used: pieces.len(),
                converged: false,
            };
        }
        let target = tol
            .abs
            .max(tol.rel * total.magnitude())
            .max(100.0 * f64::EPSILON * resabs);
        if error <= target {
            converged = true;
        }
        if converged || pieces.len() >= max_subdivisions {
            return IntegralResult {
                value: total,
                error_estimate: error,
                subdivisions_used: pieces.len(),
                converged,
            };
        }
        let worst = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.frozen)
            .max_by(|(_, x), (_, y)| x.error.total_cmp(&y.error))
            .map(|(i, _)| i);
        let Some(idx) = worst else {
            return IntegralResult {
                value: total,
                error_estimate: error,
                subdivisions_used: pieces.len(),
                converged: false,
            };
        };
        let Piece { a: lo, b: hi, .. } = pieces[idx];
        let mid = 0.5 * (lo + hi);
        nodes.clear();
        gk15_nodes(lo, mid, &mut nodes);
        gk15_nodes(mid, hi, &mut nodes);
        let vals = batch(&nodes);
        let left = Piece::new(lo, mid, &vals[..POINTS_PER_RULE]);
        let right = Piece::new(mid, hi, &vals[POINTS_PER_RULE..]);
        pieces[idx] = left;
        pieces.insert(idx + 1, right);
    }
}

fn adaptive_seq<V, F>(
    f: &F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_subdivisions: usize,
) -> IntegralResult<V>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    adaptive(
        a,
        b,
        &|xs: &[f64]| xs.iter().map(|&x| f(x)).collect(),
        tol,
        max_subdivisions,
    )
}

// Past this many e-folds the mapped variable leaves the comfortable f64 range.
const MAX_LOG_SPAN: f64 = 690.0;

/// `∫_lo^∞ f`, with `t = lo·exp(x/(1-x))`.
fn upper_half_line<V, F>(
    f: &F,
    lo: f64,
    tol: Tolerance,
    max_subdivisions: usize,
) -> IntegralResult<V>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let mapped = |x: f64| {
        let one_minus = 1.0 - x;
        let u = x / one_minus;
        if !(u < MAX_LOG_SPAN) {
            return V::default();
        }
        let t = lo * u.exp();
        f(t) * (t / (one_minus * one_minus))
    };
    adaptive_seq(&mapped, 0.0, 1.0, tol, max_subdivisions)
}

/// `∫_0^hi f`, with `t = hi·exp(-x/(1-x))`.
fn lower_half_line<V, F>(
    f: &F,
    hi: f64,
    tol: Tolerance,
    max_subdivisions: usize,
) -> IntegralResult<V>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let mapped = |x: f64| {
        let one_minus = 1.0 - x;
        let u = x / one_minus;
        if !(u < MAX_LOG_SPAN) {
            return V::default();
        }
        let t = hi * (-u).exp();
        if t <= 0.0 {
            return V::default();
        }
        f(t) * (t / (one_minus * one_minus))
    };
    adaptive_seq(&mapped, 0.0, 1.0, tol, max_subdivisions)
}

fn segment_with_tolerance<V, F>(
    f: &F,
    lo: f64,
    hi: f64,
    tol: Tolerance,
    max_subdivisions: usize,
) -> IntegralResult<V>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    if hi.is_finite() {
        if lo == 0.0 {
            lower_half_line(f, hi, tol, max_subdivisions)
        } else {
            adaptive_seq(f, lo, hi, tol, max_subdivisions)
        }
    } else if lo > 0.0 {
        upper_half_line(f, lo, tol, max_subdivisions)
    } else {
        let split = 1.0;
        let head = if lo == 0.0 {
            lower_half_line(f, split, tol, max_subdivisions)
        } else {
            adaptive_seq(f, lo, split, tol, max_subdivisions)
        };
        head.combine(upper_half_line(f, split, tol, max_subdivisions))
    }
}

/// `∫_lo^hi f(t) dt` where `hi` may be `f64::INFINITY` and `lo` may be `0`.
///
/// Intervals touching `0` or `∞` are mapped exponentially onto `[0, 1)`, so
/// integrable algebraic endpoint behaviour becomes exponential decay.
pub fn integrate_segment<V, F>(
    f: F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    cfg.validate()?;
    if !(lo.is_finite() && lo < hi) || hi.is_nan() {
        return Err(Error::ParameterOutOfRange(format!(
            "integration interval [{lo}, {hi}]"
        )));
    }
    segment_with_tolerance(&f, lo, hi, cfg.tolerance(), cfg.max_subdivisions).checked(cfg.policy)
}

/// Geometry the half-plane integrator needs from the decay hint.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialGeometry {
    /// Length scale below which the integrand is integrated directly in `r`.
    pub shift: f64,
    /// Largest structural length; the tail model is trusted well beyond it.
    pub scale: f64,
    /// Tail exponent: `r² h(r e^{iθ}) ~ r^{-κ}`.
    pub kappa: f64,
}

impl RadialGeometry {
    fn default_radius(&self, rel_tol: f64) -> f64 {
        let order = (self.kappa + 2.0).max(1.0);
        let factor = (100.0 * order / rel_tol).clamp(1e3, 1e14);
        self.scale.max(self.shift) * factor
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct PolarSample<V> {
    main: V,
    // value with the [R, 2R] annulus minus value without it
    shift: V,
    inner_error: f64,
}

impl<V: QuadValue> Add for PolarSample<V> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            main: self.main + o.main,
            shift: self.shift + o.shift,
            inner_error: self.inner_error + o.inner_error,
        }
    }
}

impl<V: QuadValue> Sub for PolarSample<V> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            main: self.main - o.main,
            shift: self.shift - o.shift,
            inner_error: self.inner_error - o.inner_error,
        }
    }
}

impl<V: QuadValue> Mul<f64> for PolarSample<V> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self {
            main: self.main * s,
            shift: self.shift * s,
            inner_error: self.inner_error * s,
        }
    }
}

impl<V: QuadValue> QuadValue for PolarSample<V> {
    fn magnitude(self) -> f64 {
        self.main.magnitude()
    }
}

const MAX_RADIUS_GROWTH: usize = 12;

/// `(1/π) ∫_𝕌 h dA`, integrated as described in the module docs.
pub(crate) fn polar_integral<V, H>(
    h: &H,
    geom: RadialGeometry,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<V>>
where
    V: QuadValue,
    H: Fn(Complex64) -> V + Sync,
{
    cfg.validate()?;
    let with_tail = geom.kappa > 0.0;
    if !with_tail && cfg.halfplane_truncation_radius.is_none() {
        return Err(Error::ParameterOutOfRange(
            "non-decaying integrand needs an explicit truncation radius".into(),
        ));
    }
    let mut radius = cfg
        .halfplane_truncation_radius
        .unwrap_or_else(|| geom.default_radius(cfg.rel_tol));
    let inner_radius = cfg.halfplane_inner_radius;
    if inner_radius >= radius {
        return Err(Error::ParameterOutOfRange(format!(
            "inner radius {inner_radius} is not below the truncation radius {radius}"
        )));
    }
    let outer_tol = cfg.tolerance().scaled(1.0, std::f64::consts::PI);
    let inner_tol = cfg.tolerance().scaled(0.1, 0.01);

    let mut growth = 0;
    loop {
        let failures = AtomicUsize::new(0);
        let sample = |theta: f64| -> PolarSample<V> {
            let dir = Complex64::from_polar(1.0, theta);
            let split = geom.shift.clamp(inner_radius, 0.5 * radius);
            let mut main = V::default();
            let mut inner_error = 0.0;
            let note = |res: &IntegralResult<V>| {
                if !res.converged {
                    failures.fetch_add(1, Ordering::Relaxed);
                }
            };
            if split > inner_radius {
                let near = |r: f64| h(dir * r) * r;
                let res = adaptive_seq(&near, inner_radius, split, inner_tol, cfg.max_subdivisions);
                note(&res);
                main = main + res.value;
                inner_error += res.error_estimate;
            }
            let log_part = |u: f64| {
                let r = u.exp();
                h(dir * r) * (r * r)
            };
            let res = adaptive_seq(
                &log_part,
                split.ln(),
                radius.ln(),
                inner_tol,
                cfg.max_subdivisions,
            );
            note(&res);
            main = main + res.value;
            inner_error += res.error_estimate;
            if !with_tail {
                return PolarSample {
                    main,
                    shift: V::default(),
                    inner_error,
                };
            }
            let tail_at = |r: f64| h(dir * r) * (r * r / geom.kappa);
            let tail_r = tail_at(radius);
            let annulus = adaptive_seq(
                &log_part,
                radius.ln(),
                (2.0 * radius).ln(),
                inner_tol,
                cfg.max_subdivisions,
            );
            note(&annulus);
            let tail_2r = tail_at(2.0 * radius);
            let extension = annulus.value + tail_2r;
            PolarSample {
                main: main + extension,
                shift: extension - tail_r,
                inner_error: inner_error + annulus.error_estimate,
            }
        };
        let batch = |thetas: &[f64]| par::map(thetas, cfg.parallel, |&t| sample(t));
        let outer = adaptive(
            0.0,
            std::f64::consts::PI,
            &batch,
            outer_tol,
            cfg.max_subdivisions,
        );
        let scale = std::f64::consts::FRAC_1_PI;
        let tail_change = outer.value.shift.magnitude() * scale;
        let value = outer.value.main * scale;
        let error = (outer.error_estimate + outer.value.inner_error.abs()) * scale + tail_change;
        let target = cfg.abs_tol.max(cfg.rel_tol * value.magnitude());
        let tail_ok = !with_tail || tail_change <= 0.25 * target;
        if tail_ok || growth >= MAX_RADIUS_GROWTH || cfg.halfplane_truncation_radius.is_some() {
            let converged =
                outer.converged && failures.load(Ordering::Relaxed) == 0 && error <= target;
            return IntegralResult {
                value,
                error_estimate: error,
                subdivisions_used: outer.subdivisions_used,
                converged,
            }
            .checked(cfg.policy);
        }
        radius *= 4.0;
        growth += 1;
    }
}

fn bergman_geometry(
    f: &HalfPlaneFunction,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<RadialGeometry> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!(
            "p = {p}, expected 1 <= p < ∞"
        )));
    }
    let hint = f.decay();
    let kappa = p * hint.power - 2.0;
    if kappa <= 0.0 && cfg.halfplane_truncation_radius.is_none() {
        return Err(Error::NonIntegrableAtInfinity {
            power: hint.power,
            p,
        });
    }
    Ok(RadialGeometry {
        shift: hint.shift,
        scale: hint.scale,
        kappa,
    })
}

/// `||f||_p^p = (1/π) ∫_𝕌 |f|^p dA`.
pub fn bergman_norm_pow(
    f: &HalfPlaneFunction,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<f64>> {
    let geom = bergman_geometry(f, p, cfg)?;
    let h = |z: Complex64| f.eval_complex(z).norm().powf(p);
    polar_integral(&h, geom, cfg)
}

/// `||f||_p`; the root is taken once, after integrating `|f|^p`.
pub fn bergman_norm_p(
    f: &HalfPlaneFunction,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<f64>> {
    let pow = bergman_norm_pow(f, p, cfg)?;
    let value = pow.value.max(0.0).powf(1.0 / p);
    let error_estimate = if pow.value > 0.0 {
        value * pow.error_estimate / (p * pow.value)
    } else {
        pow.error_estimate.powf(1.0 / p)
    };
    Ok(IntegralResult {
        value,
        error_estimate,
        ..pow
    })
}

/// `⟨f, g⟩ = (1/π) ∫_𝕌 f · conj(g) dA`.
pub fn pairing(
    f: &HalfPlaneFunction,
    g: &HalfPlaneFunction,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<Complex64>> {
    let (hf, hg) = (f.decay(), g.decay());
    let kappa = hf.power + hg.power - 2.0;
    if kappa <= 0.0 && cfg.halfplane_truncation_radius.is_none() {
        return Err(Error::NonIntegrableAtInfinity {
            power: hf.power + hg.power,
            p: 1.0,
        });
    }
    let geom = RadialGeometry {
        shift: hf.shift.min(hg.shift),
        scale: hf.scale.max(hg.scale),
        kappa,
    };
    let h = |z: Complex64| f.eval_complex(z) * g.eval_complex(z).conj();
    polar_integral(&h, geom, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate_segment(|_t: f64| 1.0, 1.0, 2.0, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        assert!(r.converged);
    }

    #[test]
    fn gamma_two_on_half_line() {
        let r = integrate_segment(|t: f64| t * (-t).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn rational_antiderivative() {
        // d/dt [ln(1+t) + 1/(1+t)] = t/(1+t)^2
        let exact = 1.5f64.ln() - 1.0 / 6.0;
        let r = integrate_segment(|t: f64| t / ((1.0 + t) * (1.0 + t)), 1.0, 2.0, &cfg()).unwrap();
        assert!((r.value - exact).abs() < 1e-13);
        assert!((exact - 0.238_798_4).abs() < 1e-7);
    }

    #[test]
    fn endpoint_singularity_at_zero() {
        let r = integrate_segment(|t: f64| t.powf(-0.5), 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn complex_integrand() {
        let r =
            integrate_segment(|t: f64| Complex64::new(t.cos(), t.sin()), 0.5, 3.0, &cfg()).unwrap();
        let exact = Complex64::new(3f64.sin() - 0.5f64.sin(), 0.5f64.cos() - 3f64.cos());
        assert!((r.value - exact).norm() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tight = QuadratureConfig {
            max_subdivisions: 2,
            ..cfg()
        };
        let err = integrate_segment(|t: f64| (1.0 / t).sin(), 1e-3, 1.0, &tight).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
        let lenient =
            integrate_segment(|t: f64| (1.0 / t).sin(), 1e-3, 1.0, &tight.lenient()).unwrap();
        assert!(!lenient.converged);
        assert_eq!(lenient.subdivisions_used, 2);
    }

    #[test]
    fn converged_error_within_target() {
        let r = integrate_segment(|t: f64| (-t * t).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert!(r.converged);
        assert!(r.error_estimate <= 1e-12f64.max(1e-8 * r.value.abs()));
        assert!((r.value - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_interval_and_config() {
        assert!(integrate_segment(|_t: f64| 1.0, 2.0, 1.0, &cfg()).is_err());
        let bad = QuadratureConfig {
            rel_tol: 0.0,
            ..cfg()
        };
        assert!(integrate_segment(|_t: f64| 1.0, 0.0, 1.0, &bad).is_err());
    }
}
