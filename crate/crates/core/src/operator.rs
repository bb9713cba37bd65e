//! The Hausdorff operator `H_μ f(z) = ∫ (1/t) f(z/t) dμ(t)`, its truncation
//! to `[δ, 1/δ]`, and the quasi-Hausdorff operator
//! `H*_μ f(z) = ∫ t f(tz) dμ(t)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::halfplane::{DecayHint, HalfPlaneFunction, HalfPlanePoint};
use crate::measure::{Boundedness, Density, Measure, Moment};
use crate::quadrature::{integrate_segment, pairing, IntegralResult, QuadratureConfig};

/// Message carried by [`Error::DivergentIntegral`] when the moment
/// condition fails and no truncation was given.
pub const DIVERGENT_MOMENT: &str = "moment diverges; supply a truncation delta";

const UNBOUNDED_SUPPORT_FACTOR: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct HausdorffOperator {
    mu: Measure,
    p: f64,
    truncation: Option<f64>,
}

impl HausdorffOperator {
    pub fn new(mu: Measure, p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "p = {p}, expected 1 <= p < ∞"
            )));
        }
        Ok(Self {
            mu,
            p,
            truncation: None,
        })
    }

    /// `H*_μ` on `A^p`, realised as `H_ν` with `ν` the push-forward of `μ`
    /// under `t ↦ 1/t`.
    pub fn quasi(mu: &Measure, p: f64) -> Result<Self> {
        Self::new(mu.pushforward_inverse(), p)
    }

    pub fn with_truncation(mut self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "truncation delta = {delta}, expected 0 < delta < 1"
            )));
        }
        self.truncation = Some(delta);
        Ok(self)
    }

    pub fn measure(&self) -> &Measure {
        &self.mu
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    /// The measure actually integrated against: `μ` or `μ|[δ, 1/δ]`.
    pub fn effective_measure(&self) -> Measure {
        match self.truncation {
            Some(delta) => self.mu.restrict(delta, 1.0 / delta),
            None => self.mu.clone(),
        }
    }

    pub fn classify(&self) -> Boundedness {
        match self.truncation {
            Some(_) => Boundedness::Bounded,
            None => self.mu.classify(self.p),
        }
    }

    /// `∫ t^{2/p-1} dμ` over the effective measure.
    pub fn theoretical_norm(&self, cfg: &QuadratureConfig) -> Result<Moment> {
        self.effective_measure().theoretical_norm(self.p, cfg)
    }

    fn ensure_defined(&self) -> Result<Measure> {
        if self.classify() == Boundedness::Unbounded {
            return Err(Error::DivergentIntegral(DIVERGENT_MOMENT.into()));
        }
        Ok(self.effective_measure())
    }

    /// `H_μ f(z)`. Atoms are summed exactly; density segments are
    /// integrated in `t`.
    pub fn apply(
        &self,
        f: &HalfPlaneFunction,
        z: HalfPlanePoint,
        cfg: &QuadratureConfig,
    ) -> Result<IntegralResult<Complex64>> {
        let mu = self.ensure_defined()?;
        apply_measure(&mu, f, z.to_complex(), cfg)
    }

    /// `z ↦ H_μ f(z)` as a half-plane function. Inner integrals that miss
    /// their tolerance still return their best estimate.
    pub fn as_function(
        &self,
        f: &HalfPlaneFunction,
        cfg: &QuadratureConfig,
    ) -> Result<HalfPlaneFunction> {
        let mu = self.ensure_defined()?;
        let decay = propagate_decay(&mu, f.decay());
        let inner = cfg.lenient();
        let g = f.clone();
        let label = match self.truncation {
            Some(delta) => format!("H^{delta}[{}]", f.label()),
            None => format!("H[{}]", f.label()),
        };
        Ok(HalfPlaneFunction::new(
            label,
            decay,
            move |z| match apply_measure(&mu, &g, z, &inner) {
                Ok(r) => r.value,
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            },
        ))
    }
}

fn apply_measure(
    mu: &Measure,
    f: &HalfPlaneFunction,
    z: Complex64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<Complex64>> {
    let mut value = Complex64::new(0.0, 0.0);
    for a in mu.atoms() {
        if a.weight > 0.0 {
            value += f.eval_complex(z / a.location) * (a.weight / a.location);
        }
    }
    let mut result = IntegralResult {
        value,
        error_estimate: 0.0,
        subdivisions_used: 0,
        converged: true,
    };
    for s in mu.segments() {
        let density = &s.density;
        let r = integrate_segment(
            |t: f64| weighted(density, t, -1.0, || f.eval_complex(z / t)),
            s.lower,
            s.upper,
            cfg,
        )?;
        result.value += r.value;
        result.error_estimate += r.error_estimate;
        result.subdivisions_used += r.subdivisions_used;
        result.converged &= r.converged;
    }
    Ok(result)
}

/// `t^alpha ρ(t) v`, where `v` is only evaluated when the weight is nonzero.
/// Near `t = 0` or `t = ∞` the weight can overflow while `v` underflows, so
/// the product then goes through logarithms.
fn weighted(density: &Density, t: f64, alpha: f64, v: impl FnOnce() -> Complex64) -> Complex64 {
    let w = density.eval_weighted(t, alpha);
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let v = v();
    if v == Complex64::new(0.0, 0.0) {
        return v;
    }
    if w.is_finite() {
        return v * w;
    }
    let m = v.norm();
    v / m * (density.ln_eval_weighted(t, alpha) + m.ln()).exp()
}

/// `f(z/t)` varies on the length scale `t·shift`, so the support of `μ`
/// stretches both lengths of the hint.
fn propagate_decay(mu: &Measure, hint: DecayHint) -> DecayHint {
    let Some((lo, hi)) = mu.support_bounds() else {
        return hint;
    };
    let shift = if lo > 0.0 {
        hint.shift * lo
    } else {
        hint.shift / UNBOUNDED_SUPPORT_FACTOR
    };
    let scale = if hi.is_finite() {
        hint.scale * hi
    } else {
        hint.scale * UNBOUNDED_SUPPORT_FACTOR
    };
    DecayHint::new(hint.power, shift.min(scale)).with_scale(scale.max(shift))
}

/// `H*_μ f(z)` through the push-forward: `H_ν f(z)` with `ν = μ∘(1/t)`.
pub fn apply_quasi(
    mu: &Measure,
    p: f64,
    f: &HalfPlaneFunction,
    z: HalfPlanePoint,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<Complex64>> {
    HausdorffOperator::quasi(mu, p)?.apply(f, z, cfg)
}

/// `H*_μ f(z) = ∫ t f(tz) dμ(t)` by direct quadrature, without the
/// push-forward.
pub fn apply_quasi_direct(
    mu: &Measure,
    p: f64,
    f: &HalfPlaneFunction,
    z: HalfPlanePoint,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<Complex64>> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!(
            "p = {p}, expected 1 <= p < ∞"
        )));
    }
    if mu.pushforward_inverse().classify(p) == Boundedness::Unbounded {
        return Err(Error::DivergentIntegral(DIVERGENT_MOMENT.into()));
    }
    let z = z.to_complex();
    let mut value = Complex64::new(0.0, 0.0);
    for a in mu.atoms() {
        if a.weight > 0.0 {
            value += f.eval_complex(z * a.location) * (a.weight * a.location);
        }
    }
    let mut result = IntegralResult {
        value,
        error_estimate: 0.0,
        subdivisions_used: 0,
        converged: true,
    };
    for s in mu.segments() {
        let density = &s.density;
        let r = integrate_segment(
            |t: f64| weighted(density, t, 1.0, || f.eval_complex(z * t)),
            s.lower,
            s.upper,
            cfg,
        )?;
        result.value += r.value;
        result.error_estimate += r.error_estimate;
        result.subdivisions_used += r.subdivisions_used;
        result.converged &= r.converged;
    }
    Ok(result)
}

/// Both sides of `⟨H_μ f, g⟩ = ⟨f, H*_μ g⟩` in `A²`.
pub fn adjoint_pairing_check(
    mu: &Measure,
    f: &HalfPlaneFunction,
    g: &HalfPlaneFunction,
    cfg: &QuadratureConfig,
) -> Result<(IntegralResult<Complex64>, IntegralResult<Complex64>)> {
    let inner = QuadratureConfig {
        rel_tol: cfg.rel_tol * 1e-2,
        abs_tol: cfg.abs_tol * 1e-2,
        ..cfg.clone()
    };
    let hf = HausdorffOperator::new(mu.clone(), 2.0)?.as_function(f, &inner)?;
    let hg = HausdorffOperator::quasi(mu, 2.0)?.as_function(g, &inner)?;
    let lhs = pairing(&hf, g, cfg)?;
    let rhs = pairing(f, &hg, cfg)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::DensitySegment;
    use crate::quadrature::bergman_norm_p;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn f2() -> HalfPlaneFunction {
        HalfPlaneFunction::rational_power(1.0, 2.0).unwrap()
    }

    fn i() -> HalfPlanePoint {
        HalfPlanePoint::new(0.0, 1.0).unwrap()
    }

    fn uniform_1_2() -> Measure {
        Measure::segment(DensitySegment::new(1.0, 2.0, Density::constant(1.0)).unwrap())
    }

    #[test]
    fn identity_atom_is_exact() {
        let op = HausdorffOperator::new(Measure::atom(1.0, 1.0).unwrap(), 2.0).unwrap();
        for (x, y) in [(0.0, 1.0), (-3.0, 0.01), (5.5, 20.0)] {
            let z = HalfPlanePoint::new(x, y).unwrap();
            assert_eq!(op.apply(&f2(), z, &cfg()).unwrap().value, f2().eval(z));
        }
    }

    #[test]
    fn single_atom_example() {
        let op = HausdorffOperator::new(Measure::atom(2.0, 1.0).unwrap(), 2.0).unwrap();
        let v = op.apply(&f2(), i(), &cfg()).unwrap().value;
        assert!((v - Complex64::new(-2.0 / 9.0, 0.0)).norm() < 1e-15, "{v}");
    }

    #[test]
    fn uniform_segment_example() {
        let op = HausdorffOperator::new(uniform_1_2(), 2.0).unwrap();
        let v = op.apply(&f2(), i(), &cfg()).unwrap().value;
        let exact = -(1.5f64.ln() - 1.0 / 6.0);
        assert!((v.re - exact).abs() < 1e-8 && v.im.abs() < 1e-8, "{v}");
        assert!((exact + 0.23880).abs() < 1e-5);
    }

    #[test]
    fn quasi_examples() {
        let id = Measure::atom(1.0, 1.0).unwrap();
        assert_eq!(
            apply_quasi(&id, 2.0, &f2(), i(), &cfg()).unwrap().value,
            f2().eval(i())
        );
        let two = Measure::atom(2.0, 1.0).unwrap();
        for v in [
            apply_quasi(&two, 2.0, &f2(), i(), &cfg()).unwrap().value,
            apply_quasi_direct(&two, 2.0, &f2(), i(), &cfg())
                .unwrap()
                .value,
        ] {
            assert!((v - Complex64::new(-2.0 / 9.0, 0.0)).norm() < 1e-15, "{v}");
        }
    }

    #[test]
    fn quasi_routes_agree_on_densities() {
        let tight = QuadratureConfig::with_tolerances(1e-13, 1e-15);
        let mu = uniform_1_2().union(&Measure::atom(0.7, 0.3).unwrap());
        let z = HalfPlanePoint::new(0.4, 0.9).unwrap();
        let a = apply_quasi(&mu, 2.0, &f2(), z, &tight).unwrap().value;
        let b = apply_quasi_direct(&mu, 2.0, &f2(), z, &tight)
            .unwrap()
            .value;
        assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn additivity_in_measure() {
        let m1 = uniform_1_2();
        let m2 = Measure::atom(3.0, 0.5).unwrap();
        let z = HalfPlanePoint::new(-0.3, 0.7).unwrap();
        let v = |m: Measure| {
            HausdorffOperator::new(m, 2.0)
                .unwrap()
                .apply(&f2(), z, &cfg())
                .unwrap()
                .value
        };
        let sum = v(m1.union(&m2));
        let parts = v(m1) + v(m2);
        assert!((sum - parts).norm() < 1e-12);
    }

    #[test]
    fn divergent_measure_needs_truncation() {
        let lebesgue = Measure::segment(
            DensitySegment::new(0.0, f64::INFINITY, Density::constant(1.0))
                .unwrap()
                .with_exponents(Some(0.0), Some(0.0)),
        );
        let op = HausdorffOperator::new(lebesgue, 2.0).unwrap();
        assert!(matches!(
            op.apply(&f2(), i(), &cfg()),
            Err(Error::DivergentIntegral(_))
        ));
        assert!(op.as_function(&f2(), &cfg()).is_err());
        let op = op.with_truncation(0.5).unwrap();
        let v = op.apply(&f2(), i(), &cfg()).unwrap().value;
        assert!(v.norm() > 0.0);
        assert!(op.clone().with_truncation(1.0).is_err());
    }

    #[test]
    fn as_function_linearity() {
        let g = HalfPlaneFunction::rational_power(2.0, 3.0).unwrap();
        let (a, b) = (Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25));
        let op = HausdorffOperator::new(uniform_1_2(), 2.0).unwrap();
        let lhs = op
            .as_function(
                &HalfPlaneFunction::linear_combination(a, &f2(), b, &g),
                &cfg(),
            )
            .unwrap();
        let hf = op.as_function(&f2(), &cfg()).unwrap();
        let hg = op.as_function(&g, &cfg()).unwrap();
        for (x, y) in [(0.0, 1.0), (1.0, 0.2), (-4.0, 3.0)] {
            let z = HalfPlanePoint::new(x, y).unwrap();
            let d = lhs.eval(z) - (a * hf.eval(z) + b * hg.eval(z));
            assert!(d.norm() < 1e-10, "{d}");
        }
    }

    #[test]
    fn dilation_norm_on_single_atom() {
        let c = QuadratureConfig::with_tolerances(1e-9, 1e-14);
        for (s, p) in [(2.0, 2.0), (0.5, 1.5), (4.0, 4.0)] {
            let op = HausdorffOperator::new(Measure::atom(s, 1.0).unwrap(), p).unwrap();
            let h = op.as_function(&f2(), &c).unwrap();
            let n_h = bergman_norm_p(&h, p, &c).unwrap().value;
            let n_f = bergman_norm_p(&f2(), p, &c).unwrap().value;
            let expected = s.powf(2.0 / p - 1.0);
            assert!(
                (n_h / n_f - expected).abs() < 1e-6 * expected,
                "s={s} p={p}: {}",
                n_h / n_f
            );
        }
    }

    #[test]
    fn empty_measure_pairs_to_zero() {
        let (lhs, rhs) = adjoint_pairing_check(&Measure::empty(), &f2(), &f2(), &cfg()).unwrap();
        assert_eq!(lhs.value, Complex64::new(0.0, 0.0));
        assert_eq!(rhs.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn atom_pairing_identity() {
        let c = QuadratureConfig::with_tolerances(1e-7, 1e-12);
        let (lhs, rhs) =
            adjoint_pairing_check(&Measure::atom(2.0, 1.0).unwrap(), &f2(), &f2(), &c).unwrap();
        assert!(
            (lhs.value - rhs.value).norm() <= 1e-5 * lhs.value.norm(),
            "{} vs {}",
            lhs.value,
            rhs.value
        );
    }

    #[test]
    fn decay_hint_follows_support() {
        let op = HausdorffOperator::new(uniform_1_2(), 2.0).unwrap();
        let h = op.as_function(&f2(), &cfg()).unwrap();
        assert_eq!(h.decay().power, 2.0);
        assert_eq!(h.decay().shift, 1.0);
        assert_eq!(h.decay().scale, 2.0);
    }
}
