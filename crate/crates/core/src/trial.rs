//! Scalar reduction of the trial-state energy for the binding lower bound.
//!
//! The trial state is built from the hydrogen ground state
//! `u(x) = (alpha^3 / 8 pi)^{1/2} exp(-alpha |x| / 2)` of `-Delta - alpha/|x|`
//! together with
//!
//! ```text
//! Lambda  = 2 P . P_f R Gamma1 u
//! Upsilon = 2 chi_(alpha, inf)(H_f) R P . A+ Omega u,    R = (H_f + P_f^2)^{-1}
//! ```
//!
//! Only `||d_i u||^2 = alpha^2 / 12` survives from the spatial factor, so both
//! star norms reduce to radial integrals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::amplitudes::{
    resolvent_aplus_component, resolvent_pf_gamma1_component, star_weight, weighted_norm_sq,
    SpinorPair,
};
use crate::coefficients::{check_alpha, SelfEnergyCoefficients};
use crate::cutoff::CutoffProfile;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_radial_with, Estimate, QuadratureSpec, RadialDomain};
use crate::vec3::norm;

/// `||d u / d x_1||^2 = alpha^2 / 12` (virial theorem plus isotropy).
pub fn hydrogen_gradient_norm_sq(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok(alpha * alpha / 12.0)
}

fn radial(
    cutoff: &CutoffProfile,
    domain: &RadialDomain,
    spec: &QuadratureSpec,
    prefactor: f64,
    f: impl Fn(f64) -> f64,
) -> Result<Estimate<f64>> {
    let e = integrate_radial_with(
        |t: f64| {
            let z = cutoff.value(t);
            z * z * f(t)
        },
        domain,
        spec,
    )?;
    Ok(Estimate {
        value: prefactor * e.value,
        error: prefactor * e.error,
        evals: e.evals,
    })
}

/// `||Lambda||_*^2 = alpha^2 (2/3pi) int t^2 zeta^2 / (1+t)^3 dt`.
pub fn lambda_star_norm_sq(
    cutoff: &CutoffProfile,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    let g = hydrogen_gradient_norm_sq(alpha)?;
    // 4 ||d_i u||^2 sum_i ||R P_f^i Gamma1||_*^2, radially reduced.
    radial(
        cutoff,
        &RadialDomain::from_cutoff(cutoff),
        spec,
        4.0 * g * 2.0 / PI,
        |t| t * t / (1.0 + t).powi(3),
    )
}

/// `||Lambda||_*^2` from 3D quadrature of the three amplitudes `R P_f^i Gamma1`.
pub fn lambda_star_norm_sq_from_amplitudes(
    cutoff: &CutoffProfile,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    let g = hydrogen_gradient_norm_sq(alpha)?;
    let domain = RadialDomain::from_cutoff(cutoff);
    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
        evals: 0,
    };
    for i in 1..=3 {
        let amp = resolvent_pf_gamma1_component(i, SpinorPair::up(), cutoff)?;
        let e = weighted_norm_sq(&amp, &domain, |k| star_weight(norm(k)), spec)?;
        total.value += 4.0 * g * e.value;
        total.error += 4.0 * g * e.error;
        total.evals += e.evals;
    }
    Ok(total)
}

/// Star norm of `Upsilon`, with a flag for an empty infrared-restricted range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpsilonNorm {
    pub value: f64,
    pub error: f64,
    /// True when `alpha` lies beyond the cutoff support, so the restricted
    /// integral is over an empty range and the value is 0.
    pub empty_range: bool,
}

/// `||Upsilon||_*^2 = alpha^2 (2/3pi) int zeta^2 / (1+t) dt`, over `t > alpha`
/// when `exact_ir`, over `t > 0` otherwise.
pub fn upsilon_star_norm_sq(
    cutoff: &CutoffProfile,
    alpha: f64,
    spec: &QuadratureSpec,
    exact_ir: bool,
) -> Result<UpsilonNorm> {
    let g = hydrogen_gradient_norm_sq(alpha)?;
    let full = RadialDomain::from_cutoff(cutoff);
    let domain = if exact_ir { full.above(alpha) } else { full };
    if domain.is_empty() {
        return Ok(UpsilonNorm {
            value: 0.0,
            error: 0.0,
            empty_range: exact_ir && !cutoff.is_zero(),
        });
    }
    let e = radial(cutoff, &domain, spec, 4.0 * g * 2.0 / PI, |t| {
        1.0 / (1.0 + t)
    })?;
    Ok(UpsilonNorm {
        value: e.value,
        error: e.error,
        empty_range: false,
    })
}

/// `||Upsilon||_*^2` from 3D quadrature of the amplitudes `R A+_i Omega`.
pub fn upsilon_star_norm_sq_from_amplitudes(
    cutoff: &CutoffProfile,
    alpha: f64,
    spec: &QuadratureSpec,
    exact_ir: bool,
) -> Result<Estimate<f64>> {
    let g = hydrogen_gradient_norm_sq(alpha)?;
    let full = RadialDomain::from_cutoff(cutoff);
    let domain = if exact_ir { full.above(alpha) } else { full };
    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
        evals: 0,
    };
    if domain.is_empty() {
        return Ok(total);
    }
    for i in 1..=3 {
        let amp = resolvent_aplus_component(i, SpinorPair::up(), cutoff)?;
        let e = weighted_norm_sq(&amp, &domain, |k| star_weight(norm(k)), spec)?;
        total.value += 4.0 * g * e.value;
        total.error += 4.0 * g * e.error;
        total.evals += e.evals;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStateReport {
    pub alpha: f64,
    pub lambda_star_sq: f64,
    pub upsilon_star_sq_exact: f64,
    pub upsilon_star_sq_asymptotic: f64,
    pub upsilon_empty_range: bool,
    /// Second-order self-energy minus `binding_estimate`.
    pub trial_energy: f64,
    /// `alpha^2/4 + alpha ||Lambda||_*^2 + alpha ||Upsilon||_*^2` (exact IR).
    pub binding_estimate: f64,
    pub hydrogen_gradient_sq: f64,
    /// `(binding_estimate - alpha^2/4) / alpha^3`.
    pub extracted_alpha3_coeff: f64,
}

/// Trial report using precomputed self-energy coefficients.
pub fn trial_binding_energy_with(
    coefficients: &SelfEnergyCoefficients,
    cutoff: &CutoffProfile,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<TrialStateReport> {
    check_alpha(alpha, false)?;
    let lambda = lambda_star_norm_sq(cutoff, alpha, spec)?.value;
    let exact = upsilon_star_norm_sq(cutoff, alpha, spec, true)?;
    let asym = upsilon_star_norm_sq(cutoff, alpha, spec, false)?;
    let quarter = alpha * alpha / 4.0;
    let binding = quarter + alpha * lambda + alpha * exact.value;
    Ok(TrialStateReport {
        alpha,
        lambda_star_sq: lambda,
        upsilon_star_sq_exact: exact.value,
        upsilon_star_sq_asymptotic: asym.value,
        upsilon_empty_range: exact.empty_range,
        trial_energy: coefficients.expansion(alpha)? - binding,
        binding_estimate: binding,
        hydrogen_gradient_sq: hydrogen_gradient_norm_sq(alpha)?,
        extracted_alpha3_coeff: (binding - quarter) / alpha.powi(3),
    })
}

pub fn trial_binding_energy(
    cutoff: &CutoffProfile,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<TrialStateReport> {
    let c = SelfEnergyCoefficients::compute(cutoff, spec)?;
    trial_binding_energy_with(&c, cutoff, alpha, spec)
}

/// Reports for each coupling; self-energy coefficients are computed once.
pub fn binding_sweep(
    cutoff: &CutoffProfile,
    alphas: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<TrialStateReport>> {
    if alphas.is_empty() {
        return Err(Error::InvalidInput("no coupling values given".into()));
    }
    for &a in alphas {
        check_alpha(a, false)?;
    }
    let c = SelfEnergyCoefficients::compute(cutoff, spec)?;
    alphas
        .iter()
        .map(|&a| trial_binding_energy_with(&c, cutoff, a, spec))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{binding_orbital_coefficient, binding_zeeman_coefficient};
    use crate::quadrature::integrate_radial;
    use std::f64::consts::LN_2;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn sharp() -> CutoffProfile {
        CutoffProfile::sharp(1.0).unwrap()
    }

    #[test]
    fn hydrogen_gradient_by_radial_integral() {
        for alpha in [1.0f64, 0.3, 0.01] {
            // u' = -(alpha/2) u, one third of |grad u|^2 per axis.
            let c = alpha.powi(3) / (8.0 * PI);
            let e = integrate_radial(
                |r| 4.0 * PI * r * r * c * (alpha / 2.0).powi(2) * (-alpha * r).exp() / 3.0,
                0.0,
                80.0 / alpha,
                &spec(),
            )
            .unwrap();
            let v = hydrogen_gradient_norm_sq(alpha).unwrap();
            assert!((e.value - v).abs() < 1e-10 * v.max(1e-300));
        }
        assert_eq!(hydrogen_gradient_norm_sq(1.0).unwrap(), 1.0 / 12.0);
        assert_eq!(
            hydrogen_gradient_norm_sq(0.2).unwrap(),
            4.0 * hydrogen_gradient_norm_sq(0.1).unwrap()
        );
        assert!(hydrogen_gradient_norm_sq(0.0).is_err());
    }

    #[test]
    fn lambda_closed_form_and_dual_path() {
        let a = 0.01;
        let v = lambda_star_norm_sq(&sharp(), a, &spec()).unwrap().value;
        let exact = a * a * 2.0 / (3.0 * PI) * (LN_2 - 0.625);
        assert!((v - exact).abs() < 1e-14);
        let z = binding_zeeman_coefficient(&sharp(), &spec()).unwrap().value;
        assert!((v - a * a * z).abs() < 1e-15);
        let amp = lambda_star_norm_sq_from_amplitudes(&sharp(), a, &spec())
            .unwrap()
            .value;
        assert!((amp - v).abs() < 1e-8 * v);
        assert_eq!(
            lambda_star_norm_sq(&CutoffProfile::zero(), a, &spec())
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn upsilon_closed_forms() {
        let a = 0.01;
        let exact = upsilon_star_norm_sq(&sharp(), a, &spec(), true).unwrap();
        let want = a * a * 2.0 / (3.0 * PI) * (LN_2 - 1.01f64.ln());
        assert!((exact.value - want).abs() < 1e-14);
        let asym = upsilon_star_norm_sq(&sharp(), a, &spec(), false).unwrap();
        let f = binding_orbital_coefficient(&sharp(), &spec())
            .unwrap()
            .value;
        assert!((asym.value - a * a * f).abs() < 1e-15);
        assert!(exact.value <= asym.value);
        let amp = upsilon_star_norm_sq_from_amplitudes(&sharp(), a, &spec(), true)
            .unwrap()
            .value;
        assert!((amp - exact.value).abs() < 1e-8 * exact.value);
        let z = upsilon_star_norm_sq(&CutoffProfile::zero(), a, &spec(), true).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn infrared_restriction_beyond_support() {
        let c = CutoffProfile::sharp(0.05).unwrap();
        let u = upsilon_star_norm_sq(&c, 0.06, &spec(), true).unwrap();
        assert_eq!(u.value, 0.0);
        assert!(u.empty_range);
        assert!(
            !upsilon_star_norm_sq(&c, 0.06, &spec(), false)
                .unwrap()
                .empty_range
        );
    }

    #[test]
    fn infrared_difference_is_cubic() {
        // |exact - asymptotic| / alpha^3 stays bounded and tends to 2/3pi.
        let mut ratios = vec![];
        for a in [1e-3f64, 3e-3, 1e-2, 3e-2, 1e-1] {
            let e = upsilon_star_norm_sq(&sharp(), a, &spec(), true)
                .unwrap()
                .value;
            let s = upsilon_star_norm_sq(&sharp(), a, &spec(), false)
                .unwrap()
                .value;
            ratios.push((s - e) / a.powi(3));
        }
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        assert!(hi / lo < 1.1, "{ratios:?}");
        assert!((ratios[0] - 2.0 / (3.0 * PI)).abs() < 1e-3);
    }
}
