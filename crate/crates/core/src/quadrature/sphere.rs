//! Product rule on the unit sphere.

use std::f64::consts::PI;

use super::gauss::gauss_legendre;
use crate::Vec3;

/// `n` Gauss-Legendre nodes in `cos(theta)` times `2n` azimuths at
/// `phi_m = (m + 1/2) pi / n`.
///
/// Exact for spherical harmonics of degree `<= 2n - 1`. The node set is
/// invariant under `k -> -k` and under each coordinate reflection, so odd
/// integrands cancel to rounding, and no node lies on the `k3` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "sphere rule order must be positive");
        let (z, wz) = gauss_legendre(order);
        let nphi = 2 * order;
        let dphi = 2.0 * PI / nphi as f64;
        let mut directions = Vec::with_capacity(order * nphi);
        let mut weights = Vec::with_capacity(order * nphi);
        for (ct, w) in z.iter().zip(&wz) {
            let st = (1.0 - ct * ct).sqrt();
            for m in 0..nphi {
                let phi = (m as f64 + 0.5) * dphi;
                directions.push([st * phi.cos(), st * phi.sin(), *ct]);
                weights.push(w * dphi);
            }
        }
        SphereRule {
            directions,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        let order = ((self.len() / 2) as f64).sqrt().round() as usize;
        2 * order - 1
    }
}
