//! Integration over pairs of photon momenta `(k1, k2)` in a product of balls.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{gauss_legendre_on, CompensatedSum, QuadratureSpec, RadialDomain, SphereRule};
use crate::error::{Error, Result};
use crate::Vec3;

/// Highest angular order for which the tensor rule is chosen automatically.
pub const MAX_TENSOR_ANGULAR_ORDER: usize = 12;

/// Radial strata per photon in the Monte Carlo branch.
const MC_STRATA: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoPhotonMethod {
    /// Tensor rule when feasible, Monte Carlo otherwise.
    Auto,
    /// Tensor rule or an error.
    Tensor,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonEstimate {
    pub value: f64,
    /// Tensor branch: difference to a coarser rule. Monte Carlo: standard error.
    pub error: f64,
    pub method: TwoPhotonMethod,
    pub evals: u64,
}

/// Quadrature nodes for a single ball (or shell): Gauss-Legendre on radial
/// panels graded geometrically toward the inner radius, times a [`SphereRule`].
#[derive(Debug, Clone)]
pub struct BallRule {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl BallRule {
    pub fn new(
        domain: &RadialDomain,
        panels: usize,
        per_panel: usize,
        angular_order: usize,
    ) -> Self {
        let sphere = SphereRule::new(angular_order);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if domain.is_empty() {
            return BallRule { points, weights };
        }
        for (a, b) in domain.graded_panels(panels.saturating_sub(1)) {
            let (r, wr) = gauss_legendre_on(per_panel, a, b);
            for (r, wr) in r.iter().zip(&wr) {
                for (d, wa) in sphere.directions.iter().zip(&sphere.weights) {
                    points.push([r * d[0], r * d[1], r * d[2]]);
                    weights.push(wr * wa * r * r);
                }
            }
        }
        BallRule { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `sum_{i,j} w_i w_j f(k_i, k_j)` for a symmetric `f`, visiting each
    /// unordered pair once.
    pub fn symmetric_pair_sum<F: FnMut(usize, usize) -> f64>(&self, mut f: F) -> f64 {
        let mut total = CompensatedSum::default();
        for i in 0..self.len() {
            let mut row = self.weights[i] * f(i, i);
            for j in 0..i {
                row += 2.0 * self.weights[j] * f(i, j);
            }
            total.add(self.weights[i] * row);
        }
        total.value()
    }
}

fn tensor_rules(domain: &RadialDomain, spec: &QuadratureSpec) -> (BallRule, BallRule) {
    let fine = BallRule::new(
        domain,
        spec.tensor_radial_panels,
        spec.tensor_nodes_per_panel,
        spec.angular_order,
    );
    let coarse = BallRule::new(
        domain,
        spec.tensor_radial_panels,
        spec.tensor_nodes_per_panel.saturating_sub(1).max(1),
        spec.angular_order.saturating_sub(1).max(1),
    );
    (fine, coarse)
}

fn tensor_pairs(domain: &RadialDomain, spec: &QuadratureSpec) -> u64 {
    let panels = domain
        .graded_panels(spec.tensor_radial_panels.saturating_sub(1))
        .len() as u64;
    let n = panels * spec.tensor_nodes_per_panel as u64 * 2 * (spec.angular_order as u64).pow(2);
    n.saturating_mul(n)
}

/// Tensor-rule evaluation. `pair_sum` receives a [`BallRule`] and must return
/// `sum_{i,j} w_i w_j f(k_i, k_j)`; it is called on the working rule and on
/// one coarser rule, whose difference is the error estimate.
pub fn tensor_two_photon<S: FnMut(&BallRule) -> f64>(
    mut pair_sum: S,
    domain: &RadialDomain,
    spec: &QuadratureSpec,
) -> Result<TwoPhotonEstimate> {
    spec.validate()?;
    let pairs = tensor_pairs(domain, spec);
    if pairs > spec.tensor_max_pairs {
        return Err(Error::Infeasible(format!(
            "tensor two-photon rule needs {pairs} node pairs, budget is {}",
            spec.tensor_max_pairs
        )));
    }
    let (fine, coarse) = tensor_rules(domain, spec);
    let value = pair_sum(&fine);
    let rough = pair_sum(&coarse);
    if !value.is_finite() {
        return Err(Error::Domain("two-photon integrand is not finite".into()));
    }
    Ok(TwoPhotonEstimate {
        value,
        error: (value - rough).abs(),
        method: TwoPhotonMethod::Tensor,
        evals: ((fine.len().pow(2) + coarse.len().pow(2)) / 2) as u64,
    })
}

/// Whether [`integrate_two_photon`] would take the tensor branch.
pub fn uses_tensor(domain: &RadialDomain, spec: &QuadratureSpec) -> Result<bool> {
    match spec.two_photon_method {
        TwoPhotonMethod::MonteCarlo => Ok(false),
        TwoPhotonMethod::Tensor => {
            if tensor_pairs(domain, spec) > spec.tensor_max_pairs {
                Err(Error::Infeasible(format!(
                    "tensor two-photon rule exceeds the budget of {} node pairs and Monte Carlo fallback is disabled",
                    spec.tensor_max_pairs
                )))
            } else {
                Ok(true)
            }
        }
        TwoPhotonMethod::Auto => Ok(spec.angular_order <= MAX_TENSOR_ANGULAR_ORDER
            && tensor_pairs(domain, spec) <= spec.tensor_max_pairs),
    }
}

/// Integrates a photon-exchange-symmetric `f(k1, k2)` over `domain x domain`.
pub fn integrate_two_photon<F: FnMut(&Vec3, &Vec3) -> f64>(
    mut f: F,
    domain: &RadialDomain,
    spec: &QuadratureSpec,
) -> Result<TwoPhotonEstimate> {
    spec.validate()?;
    if uses_tensor(domain, spec)? {
        tensor_two_photon(
            |rule| rule.symmetric_pair_sum(|i, j| f(&rule.points[i], &rule.points[j])),
            domain,
            spec,
        )
    } else {
        monte_carlo_two_photon(f, domain, spec)
    }
}

/// Radially stratified Monte Carlo. Each photon's radius is uniform in one
/// of `MC_STRATA` equal slices and its direction uniform on the sphere, so
/// the weight `r1^2 r2^2 f` stays bounded for integrands as singular as
/// `1/(|k1||k2|)`. Stratum `s` draws from `ChaCha8(mc_seed)` on stream `s`,
/// so results do not depend on evaluation order.
pub fn monte_carlo_two_photon<F: FnMut(&Vec3, &Vec3) -> f64>(
    mut f: F,
    domain: &RadialDomain,
    spec: &QuadratureSpec,
) -> Result<TwoPhotonEstimate> {
    spec.validate()?;
    if domain.is_empty() {
        return Ok(TwoPhotonEstimate {
            value: 0.0,
            error: 0.0,
            method: TwoPhotonMethod::MonteCarlo,
            evals: 0,
        });
    }
    let h = (domain.hi - domain.lo) / MC_STRATA as f64;
    let per_stratum = (spec.mc_samples / (MC_STRATA * MC_STRATA) as u64).max(2);
    let jacobian = (h * 4.0 * PI).powi(2);
    let mut value = CompensatedSum::default();
    let mut variance = CompensatedSum::default();
    for s1 in 0..MC_STRATA {
        for s2 in 0..MC_STRATA {
            let stream = (s1 * MC_STRATA + s2) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.mc_seed);
            rng.set_stream(stream);
            let mut sum = CompensatedSum::default();
            let mut sum_sq = CompensatedSum::default();
            for _ in 0..per_stratum {
                let r1 = domain.lo + h * (s1 as f64 + rng.random::<f64>());
                let r2 = domain.lo + h * (s2 as f64 + rng.random::<f64>());
                let k1 = scaled_direction(&mut rng, r1);
                let k2 = scaled_direction(&mut rng, r2);
                let w = r1 * r1 * r2 * r2 * f(&k1, &k2);
                if !w.is_finite() {
                    return Err(Error::Domain("two-photon integrand is not finite".into()));
                }
                sum.add(w);
                sum_sq.add(w * w);
            }
            let n = per_stratum as f64;
            let mean = sum.value() / n;
            let var = (sum_sq.value() / n - mean * mean).max(0.0) * n / (n - 1.0);
            value.add(jacobian * mean);
            variance.add(jacobian * jacobian * var / n);
        }
    }
    Ok(TwoPhotonEstimate {
        value: value.value(),
        error: variance.value().sqrt(),
        method: TwoPhotonMethod::MonteCarlo,
        evals: per_stratum * (MC_STRATA * MC_STRATA) as u64,
    })
}

fn scaled_direction(rng: &mut ChaCha8Rng, r: f64) -> Vec3 {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    [r * s * phi.cos(), r * s * phi.sin(), r * z]
}
