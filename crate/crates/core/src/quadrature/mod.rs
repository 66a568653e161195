//! Deterministic integration with explicit error estimates.
//!
//! - [`integrate_radial`]: adaptive Gauss-Kronrod (7/15) with initial
//!   geometric grading toward the lower endpoint, so integrable endpoint
//!   singularities like `r^{-1/2}` converge.
//! - [`integrate_momentum`]: radial adaptive rule times a fixed product
//!   rule on the sphere ([`SphereRule`]).
//! - [`integrate_two_photon`]: tensor product of two ball rules when the
//!   node budget allows, otherwise radially stratified Monte Carlo on
//!   counter-based ChaCha streams.

mod gauss;
mod momentum;
mod radial;
mod sphere;
mod two_photon;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gauss::{gauss_legendre, gauss_legendre_on};
pub use momentum::{integrate_momentum, integrate_momentum_with};
pub use radial::{integrate_radial, integrate_radial_with};
pub use sphere::SphereRule;
pub use two_photon::{
    integrate_two_photon, monte_carlo_two_photon, tensor_two_photon, uses_tensor, BallRule,
    TwoPhotonEstimate, TwoPhotonMethod, MAX_TENSOR_ANGULAR_ORDER,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of subintervals kept by the adaptive radial rule.
    pub max_subdivisions: usize,
    /// Order `n` of the sphere rule: `n` Gauss-Legendre nodes in `cos(theta)`
    /// times `2n` equispaced azimuths, exact for spherical harmonics of degree
    /// `<= 2n - 1`.
    pub angular_order: usize,
    pub mc_samples: u64,
    pub mc_seed: u64,
    /// Radial panels of the two-photon tensor rule (geometric toward 0).
    pub tensor_radial_panels: usize,
    pub tensor_nodes_per_panel: usize,
    /// Largest number of node pairs the tensor rule may visit.
    pub tensor_max_pairs: u64,
    pub two_photon_method: TwoPhotonMethod,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
            angular_order: 8,
            mc_samples: 1_000_000,
            mc_seed: 0x5eed,
            tensor_radial_panels: 8,
            tensor_nodes_per_panel: 6,
            tensor_max_pairs: 400_000_000,
            two_photon_method: TwoPhotonMethod::Auto,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return bad("abs_tol must be positive");
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return bad("rel_tol must be positive");
        }
        if self.max_subdivisions == 0 {
            return bad("max_subdivisions must be positive");
        }
        if self.angular_order == 0 {
            return bad("angular_order must be positive");
        }
        if self.mc_samples == 0 {
            return bad("mc_samples must be positive");
        }
        if self.tensor_radial_panels == 0 || self.tensor_nodes_per_panel == 0 {
            return bad("tensor rule sizes must be positive");
        }
        Ok(())
    }

    /// Same spec with both tolerances replaced by `tol`.
    pub fn with_tol(&self, tol: f64) -> Self {
        QuadratureSpec {
            abs_tol: tol,
            rel_tol: tol,
            ..self.clone()
        }
    }
}

/// Value with an error estimate and the number of integrand evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evals: usize,
}

/// Integrand values: anything that forms a real vector space with a norm.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add_scaled(&mut self, s: f64, x: &Self);
    fn magnitude(&self) -> f64;

    fn scaled(&self, s: f64) -> Self {
        let mut z = Self::zero();
        z.add_scaled(s, self);
        z
    }

    fn distance(&self, other: &Self) -> f64 {
        let mut d = *self;
        d.add_scaled(-1.0, other);
        d.magnitude()
    }
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn add_scaled(&mut self, s: f64, x: &Self) {
        *self += s * x;
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for crate::C64 {
    fn zero() -> Self {
        crate::C64::new(0.0, 0.0)
    }
    #[inline]
    fn add_scaled(&mut self, s: f64, x: &Self) {
        *self += x * s;
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    #[inline]
    fn add_scaled(&mut self, s: f64, x: &Self) {
        for (a, b) in self.iter_mut().zip(x) {
            *a += s * b;
        }
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Radial integration domain `[lo, hi]` with interior points where the
/// integrand is not smooth.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDomain {
    pub lo: f64,
    pub hi: f64,
    pub breakpoints: Vec<f64>,
}

impl RadialDomain {
    pub fn new(lo: f64, hi: f64) -> Self {
        RadialDomain {
            lo,
            hi,
            breakpoints: vec![],
        }
    }

    /// `[0, uv_extent]` with the profile's breakpoints.
    pub fn from_cutoff(c: &crate::cutoff::CutoffProfile) -> Self {
        RadialDomain {
            lo: 0.0,
            hi: c.support_extent(),
            breakpoints: c.breakpoints(),
        }
    }

    /// Restricts the lower end to `max(lo, cut)`.
    pub fn above(&self, cut: f64) -> Self {
        let lo = self.lo.max(cut).min(self.hi);
        RadialDomain {
            lo,
            hi: self.hi,
            breakpoints: self
                .breakpoints
                .iter()
                .copied()
                .filter(|&b| b > lo && b < self.hi)
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    /// Sorted interior breakpoints strictly inside `(lo, hi)`.
    pub(crate) fn interior(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .filter(|&x| x > self.lo && x < self.hi)
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Panels graded geometrically toward `lo`: `levels` dyadic panels plus
    /// the innermost one, split again at the interior breakpoints.
    pub(crate) fn graded_panels(&self, levels: usize) -> Vec<(f64, f64)> {
        if self.is_empty() {
            return vec![];
        }
        let len = self.hi - self.lo;
        let mut cuts: Vec<f64> = (1..=levels)
            .map(|k| self.lo + len * 0.5f64.powi(k as i32))
            .collect();
        cuts.extend(self.interior());
        cuts.push(self.lo);
        cuts.push(self.hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| (w[0], w[1]))
            .collect()
    }
}
