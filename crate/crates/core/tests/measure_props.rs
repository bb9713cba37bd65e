use hausdorff_bergman::harness::random_measure;
use hausdorff_bergman::{Boundedness, Density, DensitySegment, Measure, QuadratureConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::with_tolerances(1e-12, 1e-15)
}

fn moment(mu: &Measure, alpha: f64) -> f64 {
    mu.moment(alpha, &cfg()).unwrap().value().unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn half_line(a: f64, b: f64) -> Measure {
    Measure::segment(
        DensitySegment::new(0.0, f64::INFINITY, Density::parametric(1.0, a, b, 1.0))
            .unwrap()
            .with_natural_exponents(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moment_is_linear(seed in any::<u64>(), alpha in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m1, m2) = (random_measure(&mut rng), random_measure(&mut rng));
        let joint = moment(&m1.union(&m2), alpha);
        prop_assert!(close(joint, moment(&m1, alpha) + moment(&m2, alpha), 1e-10));
    }

    #[test]
    fn truncation_is_monotone(seed in any::<u64>(), alpha in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_measure(&mut rng);
        let full = moment(&mu, alpha);
        let mut last = 0.0;
        for delta in [0.9, 0.6, 0.4, 0.25, 0.1, 0.01] {
            let m = moment(&mu.truncate(delta).unwrap(), alpha);
            prop_assert!(m >= last - 1e-12 * full.max(1.0));
            prop_assert!(m <= full + 1e-10 * full.max(1.0));
            last = m;
        }
    }

    #[test]
    fn pushforward_is_an_involution(seed in any::<u64>(), p in 1.0f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_measure(&mut rng);
        let back = mu.pushforward_inverse().pushforward_inverse();
        for alpha in [-1.0, 0.0, 1.0, 2.0 / p - 1.0] {
            prop_assert!(close(moment(&back, alpha), moment(&mu, alpha), 1e-10));
        }
    }

    #[test]
    fn pushforward_negates_the_exponent(seed in any::<u64>(), alpha in -1.5f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_measure(&mut rng);
        let nu = mu.pushforward_inverse();
        prop_assert!(close(moment(&nu, alpha), moment(&mu, -alpha), 1e-9));
    }

    #[test]
    fn bounded_means_finite(a in -0.9f64..2.0, b in 0.2f64..3.0, p in 1.0f64..6.0) {
        let mu = half_line(a, b);
        if mu.classify(p) == Boundedness::Bounded {
            let m = mu.theoretical_norm(p, &QuadratureConfig::default()).unwrap();
            prop_assert!(m.value().is_some_and(f64::is_finite));
        }
    }
}

#[test]
fn half_line_pushforward_moments() {
    // ∫ t^α t^a e^{-t} dt = Γ(a + α + 1)
    let mu = half_line(0.5, 1.0);
    let nu = mu.pushforward_inverse();
    let m = nu
        .moment(0.7, &QuadratureConfig::default())
        .unwrap()
        .value()
        .unwrap();
    let exact = statrs::function::gamma::gamma(0.5 - 0.7 + 1.0);
    assert!((m - exact).abs() < 1e-7 * exact, "{m} vs {exact}");
}
