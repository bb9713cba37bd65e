//! Points, sectors and the function families used on the upper half-plane.
//!
//! All complex powers go through the principal logarithm, `Arg ∈ (-π, π]`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// A point `x + iy` with `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) || y <= 0.0 {
            return Err(Error::InvalidPoint(format!("{x} + {y}i")));
        }
        Ok(Self { x, y })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::from_complex(Complex64::from_polar(r, theta))
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn modulus(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Principal argument; always in `(0, π)` on the half-plane.
    pub fn arg(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl fmt::Display for HalfPlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.x, self.y)
    }
}

impl FromStr for HalfPlanePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_complex(parse_complex(s)?)
    }
}

/// Parses `a+bi` / `a-bi`. The sign between the parts is mandatory.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidPoint(format!("cannot parse {s:?}; expected the form a+bi"));
    let s = s.trim();
    let body = s.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im = match &body[split..] {
        "+" => 1.0,
        "-" => -1.0,
        part => part.parse().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// Asymptotic information used to choose half-plane quadrature geometry.
///
/// `|f(z)| ~ |z|^{-power}` at infinity; `shift` is the smallest length on
/// which the function has structure and `scale` the largest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayHint {
    pub power: f64,
    pub shift: f64,
    pub scale: f64,
}

impl DecayHint {
    pub fn new(power: f64, shift: f64) -> Self {
        Self {
            power,
            shift,
            scale: shift,
        }
    }

    pub fn with_scale(self, scale: f64) -> Self {
        Self { scale, ..self }
    }
}

pub type Evaluator = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// An evaluable function on the upper half-plane.
#[derive(Clone)]
pub struct HalfPlaneFunction {
    label: String,
    evaluator: Evaluator,
    decay: DecayHint,
    known_norms: Vec<(f64, f64)>,
}

impl fmt::Debug for HalfPlaneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HalfPlaneFunction")
            .field("label", &self.label)
            .field("decay", &self.decay)
            .field("known_norms", &self.known_norms)
            .finish()
    }
}

impl HalfPlaneFunction {
    pub fn new<F>(label: impl Into<String>, decay: DecayHint, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            evaluator: Arc::new(f),
            decay,
            known_norms: Vec::new(),
        }
    }

    /// `(z + shift·i)^{-exp}`.
    pub fn rational_power(shift: f64, exp: f64) -> Result<Self> {
        if !(shift > 0.0 && shift.is_finite() && exp.is_finite()) {
            return Err(Error::FunctionSpec(format!(
                "ratpow needs shift > 0 (got {shift}) and finite exp"
            )));
        }
        let f = Self::new(
            format!("ratpow:shift={shift},exp={exp}"),
            DecayHint::new(exp, shift),
            move |z| principal_power(z + Complex64::new(0.0, shift), -exp),
        );
        Ok(f.with_closed_form_norms(shift, exp))
    }

    pub fn zero() -> Self {
        Self::new("zero", DecayHint::new(2.0, 1.0), |_| {
            Complex64::new(0.0, 0.0)
        })
    }

    fn with_closed_form_norms(mut self, shift: f64, exp: f64) -> Self {
        for p in [1.0, 2.0, 3.0, 4.0] {
            if let Some(pow) = rational_power_norm_pow(shift, exp, p) {
                self.known_norms.push((p, pow.powf(1.0 / p)));
            }
        }
        self
    }

    pub fn with_known_norm(mut self, p: f64, norm: f64) -> Self {
        self.known_norms.retain(|&(q, _)| q != p);
        self.known_norms.push((p, norm));
        self
    }

    pub fn known_norm(&self, p: f64) -> Option<f64> {
        self.known_norms
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, v)| v)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn decay(&self) -> DecayHint {
        self.decay
    }

    pub fn with_decay(mut self, decay: DecayHint) -> Self {
        self.decay = decay;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn eval(&self, z: HalfPlanePoint) -> Complex64 {
        (self.evaluator)(z.to_complex())
    }

    /// Evaluation without the half-plane check, for quadrature inner loops.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        (self.evaluator)(z)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let inner = self.evaluator.clone();
        let norms = self
            .known_norms
            .iter()
            .map(|&(p, v)| (p, v * c.norm()))
            .collect();
        Self {
            label: format!("({c})*{}", self.label),
            evaluator: Arc::new(move |z| c * inner(z)),
            decay: self.decay,
            known_norms: norms,
        }
    }

    /// `a·f + b·g`.
    pub fn linear_combination(a: Complex64, f: &Self, b: Complex64, g: &Self) -> Self {
        let (fe, ge) = (f.evaluator.clone(), g.evaluator.clone());
        let (df, dg) = (f.decay, g.decay);
        let decay = DecayHint {
            power: df.power.min(dg.power),
            shift: df.shift.min(dg.shift),
            scale: df.scale.max(dg.scale),
        };
        Self::new(
            format!("({a})*{}+({b})*{}", f.label, g.label),
            decay,
            move |z| a * fe(z) + b * ge(z),
        )
    }

    /// `z ↦ f(z/s)`.
    pub fn dilated(&self, s: f64) -> Self {
        let inner = self.evaluator.clone();
        let d = self.decay;
        Self::new(
            format!("{}(z/{s})", self.label),
            DecayHint {
                power: d.power,
                shift: d.shift * s,
                scale: d.scale * s,
            },
            move |z| inner(z / s),
        )
    }
}

/// `w^e` on the principal branch, written out as `exp(e (ln|w| + i Arg w))`.
pub fn principal_power(w: Complex64, e: f64) -> Complex64 {
    Complex64::from_polar(w.norm().powf(e), e * w.arg())
}

/// Closed form of `||(z + δi)^{-s}||_p^p`, when finite.
///
/// Integrating in `x` first gives `∫_ℝ (x² + a²)^{-q} dx = a^{1-2q} √π Γ(q-½)/Γ(q)`
/// with `q = ps/2`, and the remaining `∫_δ^∞ a^{1-2q} da = δ^{2-2q}/(2q-2)`.
pub fn rational_power_norm_pow(shift: f64, exp: f64, p: f64) -> Option<f64> {
    let q = 0.5 * p * exp;
    if !(q > 1.0) || !(shift > 0.0) {
        return None;
    }
    let ratio = (ln_gamma(q - 0.5) - ln_gamma(q)).exp();
    Some(ratio / PI.sqrt() * shift.powf(2.0 - 2.0 * q) / (2.0 * q - 2.0))
}

/// The extremal family `f_ε(z) = (z + εi)^{-(2/p + ε)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub p: f64,
    pub epsilon: f64,
}

impl TestFunction {
    pub fn new(p: f64, epsilon: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!("test function p = {p}")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "test function eps = {epsilon}"
            )));
        }
        Ok(Self { p, epsilon })
    }

    /// `2/p + ε`.
    pub fn exponent(&self) -> f64 {
        2.0 / self.p + self.epsilon
    }

    fn shifted(&self, z: HalfPlanePoint) -> Complex64 {
        z.to_complex() + Complex64::new(0.0, self.epsilon)
    }

    pub fn eval(&self, z: HalfPlanePoint) -> Complex64 {
        principal_power(self.shifted(z), -self.exponent())
    }

    /// `φ_ε(z) = conj(z + εi) / |z + εi|`, a unit vector with `Arg ∈ (-π, 0)`.
    pub fn phase(&self, z: HalfPlanePoint) -> Complex64 {
        let w = self.shifted(z);
        w.conj() / w.norm()
    }

    /// The modulus family member equal to `|f_ε|`: `g_{pε, ε}`.
    pub fn modulus(&self) -> ModulusFunction {
        ModulusFunction {
            lambda: self.p * self.epsilon,
            delta: self.epsilon,
            p: self.p,
        }
    }

    pub fn to_function(&self) -> HalfPlaneFunction {
        let tf = *self;
        let shift = Complex64::new(0.0, tf.epsilon);
        let e = tf.exponent();
        HalfPlaneFunction::new(
            format!("test:p={},eps={}", tf.p, tf.epsilon),
            DecayHint::new(e, tf.epsilon),
            move |z| principal_power(z + shift, -e),
        )
        .with_closed_form_norms(tf.epsilon, e)
    }
}

/// `g_{λ,δ}(z) = |z + δi|^{-(2+λ)/p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusFunction {
    pub lambda: f64,
    pub delta: f64,
    pub p: f64,
}

impl ModulusFunction {
    pub fn new(lambda: f64, delta: f64, p: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite() && delta > 0.0 && delta.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "modulus family needs lambda > 0 and delta > 0 (got {lambda}, {delta})"
            )));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "modulus family p = {p}"
            )));
        }
        Ok(Self { lambda, delta, p })
    }

    pub fn exponent(&self) -> f64 {
        (2.0 + self.lambda) / self.p
    }

    pub fn eval(&self, z: HalfPlanePoint) -> f64 {
        let w = z.to_complex() + Complex64::new(0.0, self.delta);
        w.norm().powf(-self.exponent())
    }

    /// Closed-form bracket for `||g_{λ,δ}||_p^p`:
    /// `[(1/2)^{2+λ}, 2^{(2+λ)/2}] / (λ δ^λ)`.
    pub fn norm_bounds(&self) -> (f64, f64) {
        let base = 1.0 / (self.lambda * self.delta.powf(self.lambda));
        let lower = 0.5f64.powf(2.0 + self.lambda) * base;
        let upper = 2f64.powf(0.5 * (2.0 + self.lambda)) * base;
        (lower, upper)
    }

    pub fn to_function(&self) -> HalfPlaneFunction {
        let g = *self;
        let shift = Complex64::new(0.0, g.delta);
        let e = g.exponent();
        HalfPlaneFunction::new(
            format!("gmod:lambda={},delta={},p={}", g.lambda, g.delta, g.p),
            DecayHint::new(e, g.delta),
            move |z| Complex64::new((z + shift).norm().powf(-e), 0.0),
        )
        .with_closed_form_norms(g.delta, e)
    }
}

/// Angular sector of the half-plane, optionally truncated to `|z| ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub arg_lo: f64,
    pub arg_hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
    pub truncated: bool,
}

impl Sector {
    pub fn new(
        arg_lo: f64,
        arg_hi: f64,
        lo_open: bool,
        hi_open: bool,
        truncated: bool,
    ) -> Result<Self> {
        let in_range = |a: f64| a > -PI && a <= PI;
        if !(in_range(arg_lo) && in_range(arg_hi) && arg_lo < arg_hi) {
            return Err(Error::ParameterOutOfRange(format!(
                "sector bounds [{arg_lo}, {arg_hi}]"
            )));
        }
        Ok(Self {
            arg_lo,
            arg_hi,
            lo_open,
            hi_open,
            truncated,
        })
    }

    pub fn contains(&self, z: HalfPlanePoint) -> bool {
        let arg = z.arg();
        let above = if self.lo_open {
            arg > self.arg_lo
        } else {
            arg >= self.arg_lo
        };
        let below = if self.hi_open {
            arg < self.arg_hi
        } else {
            arg <= self.arg_hi
        };
        above && below && (!self.truncated || z.modulus() >= 1.0)
    }
}

/// The three pointwise comparisons between `f_ε` and its phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SectorCase {
    /// `|Re f_ε| ≥ |Re φ_ε| |f_ε|` on `A_(0, π/2]`, for `p > 2`, `2/p + ε ≤ 1`.
    I,
    /// `|Im f_ε| > C(p) |Im φ_ε| |f_ε|` on `A_[π/4, π/2]`, for `1 < p ≤ 2`, `1 < 2/p + ε < 2`.
    II,
    /// `|Re f_ε| > |Re φ_ε| |f_ε|` on `A_[π/2, π/2 + θ₀]`, for `p = 1`.
    III,
}

impl SectorCase {
    /// Checks the case's hypotheses on `(p, ε, θ₀)`.
    pub fn check_parameters(self, tf: &TestFunction, theta0: Option<f64>) -> Result<()> {
        let s = tf.exponent();
        let fail = |why: String| Err(Error::ParameterOutOfRange(why));
        match self {
            SectorCase::I => {
                if !(tf.p > 2.0 && s <= 1.0) {
                    return fail(format!(
                        "case I needs p > 2 and 2/p + eps <= 1 (p = {}, 2/p + eps = {s})",
                        tf.p
                    ));
                }
            }
            SectorCase::II => {
                if !(tf.p > 1.0 && tf.p <= 2.0 && s > 1.0 && s < 2.0) {
                    return fail(format!(
                        "case II needs 1 < p <= 2 and 1 < 2/p + eps < 2 (p = {}, 2/p + eps = {s})",
                        tf.p
                    ));
                }
            }
            SectorCase::III => {
                let Some(t0) = theta0 else {
                    return fail("case III needs theta0".into());
                };
                if tf.p != 1.0 {
                    return fail(format!("case III needs p = 1 (p = {})", tf.p));
                }
                if !(t0 > 0.0 && t0 < PI / 16.0) {
                    return fail(format!("case III needs 0 < theta0 < pi/16 (theta0 = {t0})"));
                }
                if !((2.0 + tf.epsilon) * (FRAC_PI_2 + t0) < 1.25 * PI) {
                    return fail(format!(
                        "case III needs (2 + eps)(pi/2 + theta0) < 5 pi/4 (eps = {}, theta0 = {t0})",
                        tf.epsilon
                    ));
                }
            }
        }
        Ok(())
    }

    /// Unique case whose `(p, ε)` hypotheses hold; case III also needs `θ₀`.
    pub fn admissible(tf: &TestFunction, theta0: Option<f64>) -> Option<Self> {
        [SectorCase::I, SectorCase::II, SectorCase::III]
            .into_iter()
            .find(|c| c.check_parameters(tf, theta0).is_ok())
    }

    /// The (untruncated) sector on which the case is stated.
    pub fn sector(self, theta0: Option<f64>) -> Sector {
        match self {
            SectorCase::I => Sector {
                arg_lo: 0.0,
                arg_hi: FRAC_PI_2,
                lo_open: true,
                hi_open: false,
                truncated: false,
            },
            SectorCase::II => Sector {
                arg_lo: FRAC_PI_4,
                arg_hi: FRAC_PI_2,
                lo_open: false,
                hi_open: false,
                truncated: false,
            },
            SectorCase::III => Sector {
                arg_lo: FRAC_PI_2,
                arg_hi: FRAC_PI_2 + theta0.unwrap_or(0.0),
                lo_open: false,
                hi_open: false,
                truncated: false,
            },
        }
    }

    /// `C(p) = min{sin(aπ/2), √2/2}` with `a` the midpoint of `(2/p + ε, 2)`.
    pub fn case_two_constant(tf: &TestFunction) -> f64 {
        let a = 0.5 * (tf.exponent() + 2.0);
        (a * FRAC_PI_2).sin().min(0.5 * SQRT_2)
    }

    /// Left and right sides of the case's inequality at `z`.
    pub fn sides(
        self,
        tf: &TestFunction,
        z: HalfPlanePoint,
        theta0: Option<f64>,
    ) -> Result<(f64, f64)> {
        self.check_parameters(tf, theta0)?;
        if !self.sector(theta0).contains(z) {
            return Err(Error::ParameterOutOfRange(format!(
                "{z} is outside the sector of case {self:?}"
            )));
        }
        let f = tf.eval(z);
        let phi = tf.phase(z);
        let modulus = f.norm();
        Ok(match self {
            SectorCase::I | SectorCase::III => (f.re.abs(), phi.re.abs() * modulus),
            SectorCase::II => (
                f.im.abs(),
                Self::case_two_constant(tf) * phi.im.abs() * modulus,
            ),
        })
    }

    /// Whether the inequality holds at `z` (non-strict for case I, strict otherwise).
    pub fn holds(self, tf: &TestFunction, z: HalfPlanePoint, theta0: Option<f64>) -> Result<bool> {
        let (lhs, rhs) = self.sides(tf, z, theta0)?;
        Ok(match self {
            SectorCase::I => lhs >= rhs,
            SectorCase::II | SectorCase::III => lhs > rhs,
        })
    }
}

/// Named function families addressable from the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionSpec {
    Test(TestFunction),
    Modulus(ModulusFunction),
    RationalPower { shift: f64, exp: f64 },
}

impl FunctionSpec {
    pub fn to_function(&self) -> Result<HalfPlaneFunction> {
        Ok(match self {
            FunctionSpec::Test(tf) => tf.to_function(),
            FunctionSpec::Modulus(g) => g.to_function(),
            FunctionSpec::RationalPower { shift, exp } => {
                HalfPlaneFunction::rational_power(*shift, *exp)?
            }
        })
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Test(tf) => write!(f, "test:p={},eps={}", tf.p, tf.epsilon),
            FunctionSpec::Modulus(g) => {
                write!(f, "gmod:lambda={},delta={},p={}", g.lambda, g.delta, g.p)
            }
            FunctionSpec::RationalPower { shift, exp } => {
                write!(f, "ratpow:shift={shift},exp={exp}")
            }
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::FunctionSpec(format!("{s:?}: {why}"));
        let (family, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| bad("missing family prefix"))?;
        let mut params = std::collections::BTreeMap::new();
        for item in rest.split(',').filter(|x| !x.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            let v: f64 = v.trim().parse().map_err(|_| bad("non-numeric value"))?;
            params.insert(k.trim().to_string(), v);
        }
        let mut take = |key: &str| {
            params
                .remove(key)
                .ok_or_else(|| bad(&format!("missing {key}")))
        };
        let spec = match family.trim() {
            "test" => FunctionSpec::Test(TestFunction::new(take("p")?, take("eps")?)?),
            "gmod" => FunctionSpec::Modulus(ModulusFunction::new(
                take("lambda")?,
                take("delta")?,
                take("p")?,
            )?),
            "ratpow" => {
                let (shift, exp) = (take("shift")?, take("exp")?);
                if !(shift > 0.0) {
                    return Err(bad("shift must be positive"));
                }
                FunctionSpec::RationalPower { shift, exp }
            }
            other => return Err(bad(&format!("unknown family {other:?}"))),
        };
        if let Some(extra) = params.keys().next() {
            return Err(bad(&format!("unknown parameter {extra:?}")));
        }
        Ok(spec)
    }
}
