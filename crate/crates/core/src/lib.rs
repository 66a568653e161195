//! Numerical laboratory for the spin-1/2 Pauli-Fierz model of hydrogen.
//!
//! The crate evaluates the closed-form perturbative coefficients of the
//! self-energy and binding energy, builds the explicit one- and two-photon
//! amplitudes of the ground-state expansion, and solves a discretized,
//! photon-number-truncated fiber Hamiltonian `T(p)` to cross-check the
//! expansions nonperturbatively.
//!
//! Units: atomic units with `hbar = c = 1` and electron mass `1/2`; the
//! coupling is the fine-structure constant `alpha`.
//!
//! Module map:
//! - [`cutoff`]: ultraviolet form factors.
//! - [`quadrature`]: radial, 3D momentum and 6D two-photon integration.
//! - [`amplitudes`]: closed-form photon amplitudes, norms and inner products.
//! - [`coefficients`]: scalar coefficients and the self-energy expansion.
//! - [`fock`]: discrete photon modes and the truncated spin x Fock basis.
//! - [`fiber`]: assembly and ground state of the fiber operator.
//! - [`trial`]: trial-state reduction of the binding energy.
//! - [`identities`]: batch verification of the orthogonality and scaling identities.
//! - [`output`]: CSV tables with lossless number formatting.

pub mod amplitudes;
pub mod coefficients;
pub mod cutoff;
pub mod error;
pub mod fiber;
pub mod fock;
pub mod identities;
pub mod output;
pub mod quadrature;
pub mod trial;

pub use error::{Error, Result};

pub use num_complex::Complex64 as C64;

/// A momentum-space vector.
pub type Vec3 = [f64; 3];

pub(crate) mod vec3 {
    use super::Vec3;

    #[inline]
    pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    #[inline]
    pub fn norm(a: &Vec3) -> f64 {
        dot(a, a).sqrt()
    }

    #[inline]
    pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[inline]
    pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }
}
