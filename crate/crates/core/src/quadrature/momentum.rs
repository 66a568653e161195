//! Integration over balls and shells in momentum space.

use super::{integrate_radial_with, Estimate, QuadValue, QuadratureSpec, RadialDomain, SphereRule};
use crate::error::Result;
use crate::Vec3;

/// Integrates `f` over the shell `domain.lo <= |k| <= domain.hi`.
///
/// The radial integral of `r^2 * sum_a w_a f(r n_a)` is adaptive; the
/// angular rule is fixed by `spec.angular_order`. The reported error covers
/// the radial discretization only.
pub fn integrate_momentum<F: FnMut(Vec3) -> f64>(
    f: F,
    domain: &RadialDomain,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    let rule = SphereRule::new(spec.angular_order);
    integrate_momentum_with(f, domain, &rule, spec)
}

/// Vector-valued version with a caller-supplied sphere rule.
pub fn integrate_momentum_with<T: QuadValue, F: FnMut(Vec3) -> T>(
    mut f: F,
    domain: &RadialDomain,
    rule: &SphereRule,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>> {
    let est = integrate_radial_with(
        |r| {
            let mut acc = T::zero();
            for (d, w) in rule.directions.iter().zip(&rule.weights) {
                let k = [r * d[0], r * d[1], r * d[2]];
                acc.add_scaled(w * r * r, &f(k));
            }
            acc
        },
        domain,
        spec,
    )?;
    Ok(Estimate {
        evals: est.evals * rule.len(),
        ..est
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> RadialDomain {
        RadialDomain::new(0.0, 1.0)
    }

    #[test]
    fn ball_volume() {
        let e = integrate_momentum(|_| 1.0, &unit(), &QuadratureSpec::default()).unwrap();
        assert!((e.value - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn coulomb_weight() {
        let e = integrate_momentum(
            |k| 1.0 / crate::vec3::norm(&k),
            &unit(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((e.value - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn angular_second_moment() {
        let e = integrate_momentum(
            |k| k[2] * k[2] / crate::vec3::dot(&k, &k),
            &unit(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((e.value - 4.0 * PI / 9.0).abs() < 1e-12);
    }

    #[test]
    fn shell_above_cut() {
        let d = unit().above(0.5);
        let e = integrate_momentum(|_| 1.0, &d, &QuadratureSpec::default()).unwrap();
        assert!((e.value - 4.0 * PI / 3.0 * (1.0 - 0.125)).abs() < 1e-12);
    }
}
