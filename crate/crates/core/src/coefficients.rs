//! Scalar coefficients: the normal-ordering constant, the two alpha^3
//! binding coefficients, and the ingredients of the second-order
//! self-energy expansion
//!
//! ```text
//! Sigma0 = -alpha ||G1||_*^2
//!          + alpha^2 (2 ||A- G1||^2 - ||G2||_*^2 + ||G1||_*^2 ||G1||^2) + O(alpha^3)
//! ```
//!
//! All norms use the spin-up ground spinor `(1, 0)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::amplitudes::{self, SpinorPair};
use crate::cutoff::{CutoffDescriptor, CutoffProfile};
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_radial_with, Estimate, QuadratureSpec, RadialDomain, TwoPhotonMethod,
};

/// Largest coupling accepted by the expansions.
pub const MAX_ALPHA: f64 = 0.1;

fn radial(
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
    prefactor: f64,
    f: impl Fn(f64) -> f64,
) -> Result<Estimate<f64>> {
    let e = integrate_radial_with(
        |r: f64| {
            let z = cutoff.value(r);
            z * z * f(r)
        },
        &RadialDomain::from_cutoff(cutoff),
        spec,
    )?;
    Ok(Estimate {
        value: prefactor * e.value,
        error: prefactor * e.error,
        evals: e.evals,
    })
}

/// `c_no = (2/pi) int r zeta(r)^2 dr`.
pub fn normal_ordering_constant(
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    radial(cutoff, spec, 2.0 / PI, |r| r)
}

/// `F1 = (2/3pi) int zeta(t)^2 / (1 + t) dt`.
pub fn binding_orbital_coefficient(
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    radial(cutoff, spec, 2.0 / (3.0 * PI), |t| 1.0 / (1.0 + t))
}

/// `F1_Zeeman = (2/3pi) int t^2 zeta(t)^2 / (1 + t)^3 dt`.
pub fn binding_zeeman_coefficient(
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    radial(cutoff, spec, 2.0 / (3.0 * PI), |t| {
        t * t / (1.0 + t).powi(3)
    })
}

/// `||G1||_*^2` by 3D quadrature of the closed-form amplitude.
pub fn gamma1_star_norm_sq(cutoff: &CutoffProfile, spec: &QuadratureSpec) -> Result<Estimate<f64>> {
    amplitudes::star_norm_sq(&amplitudes::gamma1(SpinorPair::up(), cutoff), spec)
}

/// `||G1||^2` by 3D quadrature of the closed-form amplitude.
pub fn gamma1_l2_norm_sq(cutoff: &CutoffProfile, spec: &QuadratureSpec) -> Result<Estimate<f64>> {
    amplitudes::l2_norm_sq(&amplitudes::gamma1(SpinorPair::up(), cutoff), spec)
}

/// Radial reduction of `||G1||_*^2`: the polarization- and spin-summed
/// `|sigma.B+ Omega|^2` is `zeta^2 |k| / (2 pi^2)` in every direction, giving
/// `(2/pi) int r^2 zeta^2 / (1 + r) dr`.
pub fn gamma1_star_norm_sq_radial(
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    radial(cutoff, spec, 2.0 / PI, |r| r * r / (1.0 + r))
}

/// Radial reduction of `||G1||^2 = (2/pi) int r zeta^2 / (1 + r)^2 dr`.
pub fn gamma1_l2_norm_sq_radial(
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    radial(cutoff, spec, 2.0 / PI, |r| r / (1.0 + r).powi(2))
}

/// `||A- G1||^2` summed over Cartesian components, for spinor `(a, b)`.
///
/// Each component integrates `eps^i_lambda (k x eps_lambda)^j`, whose
/// polarization sum `e_{ijl} k_l` is odd in `k`, so the exact value is 0;
/// the quadrature returns it to rounding.
pub fn a_minus_gamma1_norm_sq_for(
    spinor: SpinorPair,
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    let e = amplitudes::a_minus_gamma1(spinor, cutoff, spec)?;
    let v: f64 = e.value.iter().map(|x| x * x).sum();
    let n = v.sqrt();
    Ok(Estimate {
        value: v,
        error: 2.0 * n * e.error + e.error * e.error,
        evals: e.evals,
    })
}

pub fn a_minus_gamma1_norm_sq(
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    a_minus_gamma1_norm_sq_for(SpinorPair::up(), cutoff, spec)
}

/// `||G2||_*^2` with its error estimate and the method used.
pub fn gamma2_star_norm_sq(
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
) -> Result<(Estimate<f64>, TwoPhotonMethod)> {
    let e = amplitudes::gamma2_star_norm_sq(&amplitudes::gamma2(SpinorPair::up(), cutoff), spec)?;
    Ok((
        Estimate {
            value: e.value,
            error: e.error,
            evals: e.evals as usize,
        },
        e.method,
    ))
}

/// The four norms entering the second-order self-energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfEnergyCoefficients {
    pub gamma1_star_sq: f64,
    pub gamma1_l2_sq: f64,
    pub a_minus_gamma1_sq: f64,
    pub gamma2_star_sq: f64,
}

impl SelfEnergyCoefficients {
    pub fn compute(cutoff: &CutoffProfile, spec: &QuadratureSpec) -> Result<Self> {
        Ok(SelfEnergyCoefficients {
            gamma1_star_sq: gamma1_star_norm_sq(cutoff, spec)?.value,
            gamma1_l2_sq: gamma1_l2_norm_sq(cutoff, spec)?.value,
            a_minus_gamma1_sq: a_minus_gamma1_norm_sq(cutoff, spec)?.value,
            gamma2_star_sq: gamma2_star_norm_sq(cutoff, spec)?.0.value,
        })
    }

    /// Coefficient of `alpha^2`.
    pub fn second_order(&self) -> f64 {
        2.0 * self.a_minus_gamma1_sq - self.gamma2_star_sq + self.gamma1_star_sq * self.gamma1_l2_sq
    }

    /// `-alpha ||G1||_*^2 + alpha^2 * second_order()`, for `alpha` in `[0, 0.1]`.
    pub fn expansion(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha, true)?;
        Ok(-alpha * self.gamma1_star_sq + alpha * alpha * self.second_order())
    }
}

pub(crate) fn check_alpha(alpha: f64, allow_zero: bool) -> Result<()> {
    let lower_ok = if allow_zero {
        alpha >= 0.0
    } else {
        alpha > 0.0
    };
    if !(lower_ok && alpha <= MAX_ALPHA) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in {}0, {MAX_ALPHA}], got {alpha}",
            if allow_zero { "[" } else { "(" }
        )));
    }
    Ok(())
}

/// Second-order self-energy at coupling `alpha`; evaluates all four norms.
pub fn self_energy_expansion(
    cutoff: &CutoffProfile,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_alpha(alpha, true)?;
    SelfEnergyCoefficients::compute(cutoff, spec)?.expansion(alpha)
}

/// `alpha^2/4 + (F1 + F1_Zeeman) alpha^3`.
pub fn binding_expansion(f_orbital: f64, f_zeeman: f64, alpha: f64) -> f64 {
    alpha * alpha / 4.0 + (f_orbital + f_zeeman) * alpha.powi(3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub name: String,
    pub value: f64,
    pub error: f64,
    pub method: String,
}

impl CoefficientEntry {
    fn new(name: &str, e: Estimate<f64>, method: &str) -> Self {
        CoefficientEntry {
            name: name.to_string(),
            value: e.value,
            error: e.error,
            method: method.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientReport {
    pub cutoff: CutoffDescriptor,
    pub c_no: CoefficientEntry,
    pub f_orbital: CoefficientEntry,
    pub f_zeeman: CoefficientEntry,
    pub gamma1_star_sq: CoefficientEntry,
    pub gamma1_l2_sq: CoefficientEntry,
    pub a_minus_gamma1_sq: CoefficientEntry,
    pub gamma2_star_sq: CoefficientEntry,
    pub quadrature: QuadratureSpec,
}

impl CoefficientReport {
    pub fn compute(cutoff: &CutoffProfile, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let radial_method = "adaptive-gk15";
        let momentum_method = format!("gk15 x sphere({})", spec.angular_order);
        let (g2, g2_method) = gamma2_star_norm_sq(cutoff, spec)?;
        let g2_method = match g2_method {
            TwoPhotonMethod::MonteCarlo => format!("stratified-mc({})", spec.mc_samples),
            _ => format!(
                "tensor(panels={},nodes={},sphere={})",
                spec.tensor_radial_panels, spec.tensor_nodes_per_panel, spec.angular_order
            ),
        };
        Ok(CoefficientReport {
            cutoff: cutoff.descriptor(),
            c_no: CoefficientEntry::new(
                "c_no",
                normal_ordering_constant(cutoff, spec)?,
                radial_method,
            ),
            f_orbital: CoefficientEntry::new(
                "F_orbital",
                binding_orbital_coefficient(cutoff, spec)?,
                radial_method,
            ),
            f_zeeman: CoefficientEntry::new(
                "F_zeeman",
                binding_zeeman_coefficient(cutoff, spec)?,
                radial_method,
            ),
            gamma1_star_sq: CoefficientEntry::new(
                "gamma1_star_sq",
                gamma1_star_norm_sq(cutoff, spec)?,
                &momentum_method,
            ),
            gamma1_l2_sq: CoefficientEntry::new(
                "gamma1_l2_sq",
                gamma1_l2_norm_sq(cutoff, spec)?,
                &momentum_method,
            ),
            a_minus_gamma1_sq: CoefficientEntry::new(
                "a_minus_gamma1_sq",
                a_minus_gamma1_norm_sq(cutoff, spec)?,
                &momentum_method,
            ),
            gamma2_star_sq: CoefficientEntry::new("gamma2_star_sq", g2, &g2_method),
            quadrature: spec.clone(),
        })
    }

    /// Entries in a fixed order.
    pub fn entries(&self) -> [&CoefficientEntry; 7] {
        [
            &self.c_no,
            &self.f_orbital,
            &self.f_zeeman,
            &self.gamma1_star_sq,
            &self.gamma1_l2_sq,
            &self.a_minus_gamma1_sq,
            &self.gamma2_star_sq,
        ]
    }

    pub fn self_energy_coefficients(&self) -> SelfEnergyCoefficients {
        SelfEnergyCoefficients {
            gamma1_star_sq: self.gamma1_star_sq.value,
            gamma1_l2_sq: self.gamma1_l2_sq.value,
            a_minus_gamma1_sq: self.a_minus_gamma1_sq.value,
            gamma2_star_sq: self.gamma2_star_sq.value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn sharp(l: f64) -> CutoffProfile {
        CutoffProfile::sharp(l).unwrap()
    }

    #[test]
    fn closed_forms_sharp() {
        let s = spec();
        let c1 = normal_ordering_constant(&sharp(1.0), &s).unwrap().value;
        assert!((c1 - 1.0 / PI).abs() < 1e-13);
        let c2 = normal_ordering_constant(&sharp(2.0), &s).unwrap().value;
        assert!((c2 - 4.0 / PI).abs() < 1e-12);
        assert!((c2 - 4.0 * c1).abs() < 1e-12);
        let f = binding_orbital_coefficient(&sharp(1.0), &s).unwrap().value;
        assert!((f - 2.0 / (3.0 * PI) * LN_2).abs() < 1e-13);
        assert!((f - 0.147_090_4).abs() < 1e-7);
        let f3 = binding_orbital_coefficient(&sharp(3.0), &s).unwrap().value;
        assert!((f3 - 2.0 / (3.0 * PI) * 4f64.ln()).abs() < 1e-12);
        let z = binding_zeeman_coefficient(&sharp(1.0), &s).unwrap().value;
        assert!((z - 2.0 / (3.0 * PI) * (LN_2 - 0.625)).abs() < 1e-13);
        assert!((z - 0.014_461_3).abs() < 1e-7);
        let z2 = binding_zeeman_coefficient(&sharp(2.0), &s).unwrap().value;
        assert!(z2 > z);
    }

    #[test]
    fn zero_cutoff_gives_zero() {
        let s = spec();
        let z = CutoffProfile::zero();
        assert_eq!(normal_ordering_constant(&z, &s).unwrap().value, 0.0);
        assert_eq!(binding_orbital_coefficient(&z, &s).unwrap().value, 0.0);
        assert_eq!(binding_zeeman_coefficient(&z, &s).unwrap().value, 0.0);
        assert_eq!(gamma1_star_norm_sq(&z, &s).unwrap().value, 0.0);
        assert_eq!(gamma1_l2_norm_sq(&z, &s).unwrap().value, 0.0);
        assert_eq!(a_minus_gamma1_norm_sq(&z, &s).unwrap().value, 0.0);
        assert_eq!(gamma2_star_norm_sq(&z, &s).unwrap().0.value, 0.0);
    }

    #[test]
    fn dual_path_gamma1() {
        let s = spec();
        for cut in [
            sharp(1.0),
            CutoffProfile::smoothed_plateau(1.0, 0.1).unwrap(),
            CutoffProfile::gaussian_bump(2.5, 1.25).unwrap(),
        ] {
            let a = gamma1_star_norm_sq(&cut, &s).unwrap().value;
            let b = gamma1_star_norm_sq_radial(&cut, &s).unwrap().value;
            assert!(((a - b) / b).abs() < 1e-9, "{}: {a} vs {b}", cut.label());
            let a = gamma1_l2_norm_sq(&cut, &s).unwrap().value;
            let b = gamma1_l2_norm_sq_radial(&cut, &s).unwrap().value;
            assert!(((a - b) / b).abs() < 1e-9, "{}: {a} vs {b}", cut.label());
        }
        let exact = 2.0 / PI * (LN_2 - 0.5);
        let r = gamma1_star_norm_sq_radial(&sharp(1.0), &s).unwrap().value;
        assert!((r - exact).abs() < 1e-13);
    }

    #[test]
    fn orbital_dominates_zeeman() {
        let s = spec();
        for cut in [
            sharp(0.3),
            sharp(5.0),
            CutoffProfile::smoothed_plateau(2.0, 0.4).unwrap(),
            CutoffProfile::gaussian_bump(1.0, 0.5).unwrap(),
        ] {
            let f = binding_orbital_coefficient(&cut, &s).unwrap().value;
            let z = binding_zeeman_coefficient(&cut, &s).unwrap().value;
            assert!(f > z && z > 0.0);
        }
    }

    #[test]
    fn expansion_structure() {
        let c = SelfEnergyCoefficients {
            gamma1_star_sq: 0.12,
            gamma1_l2_sq: 0.12,
            a_minus_gamma1_sq: 0.0,
            gamma2_star_sq: 0.05,
        };
        assert_eq!(c.expansion(0.0).unwrap(), 0.0);
        let a = 1e-2;
        let v = c.expansion(a).unwrap();
        assert_eq!(v, -a * 0.12 + a * a * (0.12 * 0.12 - 0.05));
        assert!(((c.expansion(1e-8).unwrap() / -1e-8) - 0.12).abs() < 1e-8);
        assert!(c.expansion(0.2).is_err());
        assert!(c.expansion(-0.01).is_err());
        let b = binding_expansion(0.1, 0.01, 0.01);
        assert_eq!(
            ((b - 0.01f64.powi(2) / 4.0) / 0.01f64.powi(3) * 1e6).round(),
            110000.0
        );
        assert_eq!(binding_expansion(0.1, 0.01, 0.0), 0.0);
    }

    #[test]
    fn report_is_reproducible() {
        let s = QuadratureSpec {
            angular_order: 3,
            tensor_radial_panels: 4,
            tensor_nodes_per_panel: 3,
            ..spec()
        };
        let a = CoefficientReport::compute(&sharp(1.0), &s).unwrap();
        let b = CoefficientReport::compute(&sharp(1.0), &s).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(a.entries().iter().all(|e| e.value >= 0.0 && e.error >= 0.0));
    }
}
