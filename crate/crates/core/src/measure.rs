//! Positive σ-finite measures on `(0, ∞)` built from atoms and density
//! segments.
//!
//! Convergence at `0` and `∞` is decided from declared endpoint exponents
//! (`density(t) ~ c·t^a`), never from numeric extrapolation. A segment that
//! reaches `0` or `∞` without the matching exponent cannot be used for
//! moments.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_segment, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(location: f64, weight: f64) -> Result<Self> {
        if !(location > 0.0 && location.is_finite()) {
            return Err(Error::InvalidMeasure(format!(
                "atom location {location} must be positive"
            )));
        }
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::InvalidMeasure(format!(
                "atom weight {weight} must be non-negative"
            )));
        }
        Ok(Self { location, weight })
    }
}

/// Density of a segment.
///
/// The parametric family `c·t^a·exp(-b·t^k)` covers constants, powers and
/// exponentials, and is closed under `t ↦ 1/t` push-forward.
#[derive(Clone)]
pub enum Density {
    Parametric { c: f64, a: f64, b: f64, k: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Parametric { c, a, b, k } => write!(f, "{c}·t^{a}·exp(-{b}·t^{k})"),
            Density::Custom(_) => f.write_str("<custom density>"),
        }
    }
}

impl Density {
    pub fn constant(c: f64) -> Self {
        Self::parametric(c, 0.0, 0.0, 1.0)
    }

    pub fn power(c: f64, a: f64) -> Self {
        Self::parametric(c, a, 0.0, 1.0)
    }

    /// `c·e^{-b t}`.
    pub fn exponential(c: f64, b: f64) -> Self {
        Self::parametric(c, 0.0, b, 1.0)
    }

    pub fn parametric(c: f64, a: f64, b: f64, k: f64) -> Self {
        Density::Parametric { c, a, b, k }
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Density::Custom(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Density::Parametric { c, a, b, k } => {
                if c == 0.0 {
                    0.0
                } else if b == 0.0 {
                    if a == 0.0 {
                        c
                    } else {
                        c * t.powf(a)
                    }
                } else {
                    c * (a * t.ln() - b * t.powf(k)).exp()
                }
            }
            Density::Custom(ref f) => f(t),
        }
    }

    /// `t^alpha · density(t)`, combined before exponentiation so that
    /// neither factor overflows on its own.
    pub fn eval_weighted(&self, t: f64, alpha: f64) -> f64 {
        match *self {
            Density::Parametric { c, a, b, k } => {
                if c == 0.0 {
                    0.0
                } else if b == 0.0 {
                    c * t.powf(a + alpha)
                } else {
                    c * ((a + alpha) * t.ln() - b * t.powf(k)).exp()
                }
            }
            Density::Custom(ref f) => {
                let d = f(t);
                if d == 0.0 {
                    0.0
                } else {
                    t.powf(alpha) * d
                }
            }
        }
    }

    /// `ln(t^alpha · density(t))`, for products whose factors overflow.
    pub fn ln_eval_weighted(&self, t: f64, alpha: f64) -> f64 {
        match *self {
            Density::Parametric { c, a, b, k } => {
                let tail = if b == 0.0 { 0.0 } else { b * t.powf(k) };
                c.ln() + (a + alpha) * t.ln() - tail
            }
            Density::Custom(ref f) => f(t).ln() + alpha * t.ln(),
        }
    }

    /// Density of the push-forward under `t ↦ 1/t`: `u(1/t)/t²`.
    pub fn inverted(&self) -> Self {
        match *self {
            Density::Parametric { c, a, b, k } => Density::Parametric {
                c,
                a: -a - 2.0,
                b,
                k: -k,
            },
            Density::Custom(ref f) => {
                let f = f.clone();
                Density::custom(move |t| f(1.0 / t) / (t * t))
            }
        }
    }

    fn is_zero(&self) -> bool {
        matches!(*self, Density::Parametric { c, .. } if c == 0.0)
    }

    /// Endpoint exponents read off the closed form, when there is one.
    pub fn natural_exponents(&self) -> Option<EndpointExponents> {
        let Density::Parametric { a, b, k, .. } = *self else {
            return None;
        };
        let (low, high) = if b == 0.0 || k == 0.0 {
            (a, a)
        } else if b > 0.0 && k > 0.0 {
            (a, f64::NEG_INFINITY)
        } else if b > 0.0 && k < 0.0 {
            (f64::INFINITY, a)
        } else {
            // b < 0: exponential growth on one side
            if k > 0.0 {
                (a, f64::INFINITY)
            } else {
                (f64::NEG_INFINITY, a)
            }
        };
        Some(EndpointExponents {
            low: Some(low),
            high: Some(high),
        })
    }
}

/// `density(t) ~ c·t^low` as `t → 0⁺` and `~ c·t^high` as `t → ∞`.
/// Infinite values stand for faster-than-any-power vanishing (`+∞` at `0`,
/// `-∞` at `∞`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EndpointExponents {
    pub low: Option<f64>,
    pub high: Option<f64>,
}

impl EndpointExponents {
    fn inverted(self) -> Self {
        Self {
            low: self.high.map(|h| -h - 2.0),
            high: self.low.map(|l| -l - 2.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DensitySegment {
    pub lower: f64,
    pub upper: f64,
    pub density: Density,
    pub exponents: EndpointExponents,
}

const POSITIVITY_SAMPLES: usize = 33;

impl DensitySegment {
    /// A segment on `[lower, upper]`; `upper` may be infinite.
    pub fn new(lower: f64, upper: f64, density: Density) -> Result<Self> {
        if !(lower >= 0.0 && lower.is_finite()) || upper.is_nan() || !(lower < upper) {
            return Err(Error::InvalidMeasure(format!(
                "segment bounds [{lower}, {upper}]"
            )));
        }
        let seg = Self {
            lower,
            upper,
            density,
            exponents: EndpointExponents::default(),
        };
        for t in seg.sample_points() {
            let v = seg.density.eval(t);
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidMeasure(format!("density is {v} at t = {t}")));
            }
        }
        Ok(seg)
    }

    pub fn with_exponents(mut self, low: Option<f64>, high: Option<f64>) -> Self {
        self.exponents = EndpointExponents { low, high };
        self
    }

    /// Fills the endpoint exponents from the density's closed form.
    pub fn with_natural_exponents(mut self) -> Self {
        if let Some(e) = self.density.natural_exponents() {
            self.exponents = e;
        }
        self
    }

    pub fn touches_zero(&self) -> bool {
        self.lower == 0.0
    }

    pub fn touches_infinity(&self) -> bool {
        self.upper == f64::INFINITY
    }

    fn sample_points(&self) -> Vec<f64> {
        let n = POSITIVITY_SAMPLES;
        if self.upper.is_finite() && self.lower > 0.0 {
            let (lo, hi) = (self.lower.ln(), self.upper.ln());
            (0..n)
                .map(|i| (lo + (hi - lo) * (i as f64 + 0.5) / n as f64).exp())
                .collect()
        } else {
            let lo = if self.lower > 0.0 {
                self.lower.ln()
            } else {
                (self.upper.min(1.0)).ln() - 20.0
            };
            let hi = if self.upper.is_finite() {
                self.upper.ln()
            } else {
                self.lower.max(1.0).ln() + 20.0
            };
            (0..n)
                .map(|i| (lo + (hi - lo) * (i as f64 + 0.5) / n as f64).exp())
                .filter(|&t| t > self.lower && t < self.upper)
                .collect()
        }
    }

    fn clipped(&self, lo: f64, hi: f64) -> Option<Self> {
        let lower = self.lower.max(lo);
        let upper = self.upper.min(hi);
        (lower < upper).then(|| Self {
            lower,
            upper,
            density: self.density.clone(),
            exponents: EndpointExponents {
                low: if lower == 0.0 {
                    self.exponents.low
                } else {
                    None
                },
                high: if upper.is_infinite() {
                    self.exponents.high
                } else {
                    None
                },
            },
        })
    }

    fn inverted(&self) -> Self {
        let lower = if self.upper.is_infinite() {
            0.0
        } else {
            1.0 / self.upper
        };
        let upper = if self.lower == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.lower
        };
        Self {
            lower,
            upper,
            density: self.density.inverted(),
            exponents: self.exponents.inverted(),
        }
    }
}

/// Value of `∫ t^α dμ(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite {
        value: f64,
        error: f64,
    },
    /// Divergence proven from endpoint exponents.
    Divergent,
}

impl Moment {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Moment::Finite { value, .. } => Some(value),
            Moment::Divergent => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Moment::Finite { .. })
    }

    /// The value, with `+∞` standing in for divergence.
    pub fn as_f64(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Moment::Finite { value, error } => write!(f, "{value} (err {error:.2e})"),
            Moment::Divergent => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Inconclusive,
}

impl fmt::Display for Boundedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A positive measure on `(0, ∞)`.
#[derive(Debug, Clone, Default)]
pub struct Measure {
    atoms: Vec<Atom>,
    segments: Vec<DensitySegment>,
}

impl Measure {
    pub fn new(atoms: Vec<Atom>, segments: Vec<DensitySegment>) -> Result<Self> {
        let mut locations: Vec<f64> = atoms.iter().map(|a| a.location).collect();
        locations.sort_by(f64::total_cmp);
        if locations.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMeasure(
                "atom locations must be distinct".into(),
            ));
        }
        Ok(Self { atoms, segments })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn atom(location: f64, weight: f64) -> Result<Self> {
        Self::new(vec![Atom::new(location, weight)?], Vec::new())
    }

    pub fn segment(segment: DensitySegment) -> Self {
        Self {
            atoms: Vec::new(),
            segments: vec![segment],
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[DensitySegment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.iter().all(|a| a.weight == 0.0)
            && self.segments.iter().all(|s| s.density.is_zero())
    }

    /// `μ₁ ⊎ μ₂`; atoms at a shared location merge their weights.
    pub fn union(&self, other: &Measure) -> Measure {
        let mut atoms = self.atoms.clone();
        for a in &other.atoms {
            match atoms.iter_mut().find(|b| b.location == a.location) {
                Some(b) => b.weight += a.weight,
                None => atoms.push(*a),
            }
        }
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        Measure { atoms, segments }
    }

    /// Smallest and largest points of the support (ignoring zero weights).
    pub fn support_bounds(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for a in self.atoms.iter().filter(|a| a.weight > 0.0) {
            lo = lo.min(a.location);
            hi = hi.max(a.location);
        }
        for s in self.segments.iter().filter(|s| !s.density.is_zero()) {
            lo = lo.min(s.lower);
            hi = hi.max(s.upper);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// `∫_0^∞ t^α dμ(t)`.
    pub fn moment(&self, alpha: f64, cfg: &QuadratureConfig) -> Result<Moment> {
        if !alpha.is_finite() {
            return Err(Error::ParameterOutOfRange(format!(
                "moment exponent {alpha}"
            )));
        }
        let mut value = 0.0;
        let mut error = 0.0;
        for a in &self.atoms {
            if a.weight > 0.0 {
                value += a.weight * a.location.powf(alpha);
            }
        }
        let mut divergent = false;
        for (i, s) in self.segments.iter().enumerate() {
            if s.density.is_zero() {
                continue;
            }
            match endpoint_verdict(i, s, alpha)? {
                Verdict::Divergent => divergent = true,
                Verdict::Convergent => {}
            }
        }
        if divergent {
            return Ok(Moment::Divergent);
        }
        for s in self.segments.iter().filter(|s| !s.density.is_zero()) {
            let density = &s.density;
            let r = integrate_segment(
                |t: f64| density.eval_weighted(t, alpha),
                s.lower,
                s.upper,
                cfg,
            )?;
            value += r.value;
            error += r.error_estimate;
        }
        Ok(Moment::Finite { value, error })
    }

    /// `∫ t^{2/p - 1} dμ`, the `A^p` operator norm of `H_μ` (or `+∞`).
    pub fn theoretical_norm(&self, p: f64, cfg: &QuadratureConfig) -> Result<Moment> {
        check_p(p)?;
        self.moment(2.0 / p - 1.0, cfg)
    }

    /// `∫ t^{1 - 2/p} dμ`, the `A^p` operator norm of the adjoint `H*_μ`.
    pub fn quasi_norm(&self, p: f64, cfg: &QuadratureConfig) -> Result<Moment> {
        check_p(p)?;
        self.moment(1.0 - 2.0 / p, cfg)
    }

    /// Restriction to the closed interval `[lo, hi]` (`hi` may be `∞`).
    pub fn restrict(&self, lo: f64, hi: f64) -> Measure {
        Measure {
            atoms: self
                .atoms
                .iter()
                .filter(|a| a.location >= lo && a.location <= hi)
                .copied()
                .collect(),
            segments: self
                .segments
                .iter()
                .filter_map(|s| s.clipped(lo, hi))
                .collect(),
        }
    }

    /// Restriction to `[δ, 1/δ]`.
    pub fn truncate(&self, delta: f64) -> Result<Measure> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "truncation delta = {delta}, expected 0 < delta < 1"
            )));
        }
        Ok(self.restrict(delta, 1.0 / delta))
    }

    /// Push-forward under `t ↦ 1/t`.
    pub fn pushforward_inverse(&self) -> Measure {
        Measure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: 1.0 / a.location,
                    weight: a.weight,
                })
                .collect(),
            segments: self.segments.iter().map(DensitySegment::inverted).collect(),
        }
    }

    /// Decides whether `∫ t^{2/p-1} dμ < ∞` from endpoint exponents.
    pub fn classify(&self, p: f64) -> Boundedness {
        let alpha = 2.0 / p - 1.0;
        let mut missing = false;
        for (i, s) in self.segments.iter().enumerate() {
            if s.density.is_zero() {
                continue;
            }
            match endpoint_verdict(i, s, alpha) {
                Ok(Verdict::Divergent) => return Boundedness::Unbounded,
                Ok(Verdict::Convergent) => {}
                Err(_) => missing = true,
            }
        }
        if missing {
            Boundedness::Inconclusive
        } else {
            Boundedness::Bounded
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(format!(
            "p = {p}, expected 1 <= p < ∞"
        )))
    }
}

enum Verdict {
    Convergent,
    Divergent,
}

/// `∫ t^α ρ(t) dt` near an open endpoint converges iff the exponent sum
/// stays on the integrable side of `-1`.
fn endpoint_verdict(index: usize, s: &DensitySegment, alpha: f64) -> Result<Verdict> {
    let mut verdict = Verdict::Convergent;
    if s.touches_zero() {
        let low = s.exponents.low.ok_or(Error::MissingExponentMetadata {
            segment: index,
            endpoint: "0",
        })?;
        if !(low + alpha > -1.0) {
            verdict = Verdict::Divergent;
        }
    }
    if s.touches_infinity() {
        let high = s.exponents.high.ok_or(Error::MissingExponentMetadata {
            segment: index,
            endpoint: "infinity",
        })?;
        if !(high + alpha < -1.0) {
            verdict = Verdict::Divergent;
        }
    }
    Ok(verdict)
}

// ---------------------------------------------------------------------------
// JSON document form

#[derive(Serialize, Deserialize)]
struct MeasureDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema_version: Option<u32>,
    #[serde(default)]
    atoms: Vec<AtomDoc>,
    #[serde(default)]
    segments: Vec<SegmentDoc>,
}

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    t: f64,
    w: f64,
}

#[derive(Serialize, Deserialize)]
struct SegmentDoc {
    lo: f64,
    hi: ExtReal,
    density: DensityDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exp_lo: Option<ExtReal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exp_hi: Option<ExtReal>,
}

#[derive(Serialize, Deserialize)]
struct DensityDoc {
    kind: String,
    params: Vec<f64>,
}

/// A real that may be written as `"inf"`, `"+inf"` or `"-inf"`.
#[derive(Clone, Copy)]
struct ExtReal(f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal(v)),
            Raw::Text(t) => match t.trim() {
                "inf" | "+inf" | "infinity" => Ok(ExtReal(f64::INFINITY)),
                "-inf" | "-infinity" => Ok(ExtReal(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number or \"inf\", got {other:?}"
                ))),
            },
        }
    }
}

impl DensityDoc {
    fn from_density(d: &Density) -> Result<Self> {
        let Density::Parametric { c, a, b, k } = *d else {
            return Err(Error::InvalidMeasure(
                "custom densities cannot be serialized".into(),
            ));
        };
        let (kind, params) = if b == 0.0 && a == 0.0 {
            ("const", vec![c])
        } else if b == 0.0 {
            ("power", vec![c, a])
        } else if a == 0.0 && k == 1.0 {
            ("exp", vec![c, b])
        } else {
            ("expr", vec![c, a, b, k])
        };
        Ok(Self {
            kind: kind.into(),
            params,
        })
    }

    fn to_density(&self) -> Result<Density> {
        let p = &self.params;
        let want = |n: usize| {
            if p.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidMeasure(format!(
                    "density kind {:?} takes {n} params, got {}",
                    self.kind,
                    p.len()
                )))
            }
        };
        Ok(match self.kind.as_str() {
            "const" => {
                want(1)?;
                Density::constant(p[0])
            }
            "power" => {
                want(2)?;
                Density::power(p[0], p[1])
            }
            "exp" => {
                want(2)?;
                Density::exponential(p[0], p[1])
            }
            "expr" => {
                want(4)?;
                Density::parametric(p[0], p[1], p[2], p[3])
            }
            other => {
                return Err(Error::InvalidMeasure(format!(
                    "unknown density kind {other:?}"
                )))
            }
        })
    }
}

impl TryFrom<&Measure> for MeasureDoc {
    type Error = Error;

    fn try_from(m: &Measure) -> Result<Self> {
        Ok(MeasureDoc {
            schema_version: Some(1),
            atoms: m
                .atoms
                .iter()
                .map(|a| AtomDoc {
                    t: a.location,
                    w: a.weight,
                })
                .collect(),
            segments: m
                .segments
                .iter()
                .map(|s| {
                    Ok(SegmentDoc {
                        lo: s.lower,
                        hi: ExtReal(s.upper),
                        density: DensityDoc::from_density(&s.density)?,
                        exp_lo: s.exponents.low.map(ExtReal),
                        exp_hi: s.exponents.high.map(ExtReal),
                    })
                })
                .collect::<Result<_>>()?,
        })
    }
}

impl TryFrom<MeasureDoc> for Measure {
    type Error = Error;

    fn try_from(doc: MeasureDoc) -> Result<Self> {
        let atoms = doc
            .atoms
            .iter()
            .map(|a| Atom::new(a.t, a.w))
            .collect::<Result<Vec<_>>>()?;
        let segments = doc
            .segments
            .iter()
            .map(|s| {
                let seg = DensitySegment::new(s.lo, s.hi.0, s.density.to_density()?)?;
                Ok(seg.with_exponents(s.exp_lo.map(|e| e.0), s.exp_hi.map(|e| e.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        Measure::new(atoms, segments)
    }
}

impl Serialize for Measure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureDoc::try_from(self)
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MeasureDoc::deserialize(d)?;
        Measure::try_from(doc).map_err(serde::de::Error::custom)
    }
}
