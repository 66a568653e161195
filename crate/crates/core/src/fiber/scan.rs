//! Coupling scans of the fiber ground-state energy, polynomial fits of
//! `E / alpha`, and the pull-through bound on photon amplitudes.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{assemble, ground_state, mode_radius, SolverSpec};
use crate::coefficients::{check_alpha, SelfEnergyCoefficients};
use crate::cutoff::CutoffProfile;
use crate::error::{Error, Result};
use crate::fock::{build_grid, GridSpec, StateVector, TruncatedFockSpace};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub energy_numeric: f64,
    /// Same solve on the grid with one radial panel fewer, if there is one.
    pub energy_coarse: Option<f64>,
    pub energy_expansion: f64,
    pub nf_expectation: f64,
    pub grid_err_estimate: f64,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    pub grid: GridSpec,
    pub max_photons: usize,
    pub dimension: usize,
    pub coefficients: SelfEnergyCoefficients,
    /// Rayleigh-Schrodinger `(e1, e2)` on the fine grid.
    pub discrete_coefficients: (f64, f64),
    /// `sum_j g_j^2` on the fine grid (continuum value: `c_no`).
    pub discarded_constant: f64,
}

impl ScanTable {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.alpha).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy_numeric).collect()
    }

    /// Coarse-grid energies, when every row has one.
    pub fn coarse_energies(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.energy_coarse).collect()
    }
}

/// Ground-state energy at `p = 0` for each coupling, plus the same on the next
/// coarser grid for a discretization error estimate.
pub fn self_energy_scan(
    cutoff: &CutoffProfile,
    alphas: &[f64],
    grid: &GridSpec,
    max_photons: usize,
    solver: &SolverSpec,
    quad: &QuadratureSpec,
) -> Result<ScanTable> {
    if alphas.is_empty() {
        return Err(Error::InvalidInput("no coupling values given".into()));
    }
    for &a in alphas {
        check_alpha(a, false)?;
    }
    let coefficients = SelfEnergyCoefficients::compute(cutoff, quad)?;
    let fine = Arc::new(TruncatedFockSpace::new(
        build_grid(grid, cutoff)?,
        max_photons,
    )?);
    let coarse = match grid.coarser() {
        Some(g) => Some(Arc::new(TruncatedFockSpace::new(
            build_grid(&g, cutoff)?,
            max_photons,
        )?)),
        None => None,
    };
    let probe = assemble([0.0; 3], alphas[0], fine.clone(), cutoff)?;
    let discrete_coefficients = probe.perturbative_coefficients()?;
    let discarded_constant = probe.discarded_constant();
    drop(probe);

    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let op = assemble([0.0; 3], alpha, fine.clone(), cutoff)?;
        let gs = ground_state(&op, solver)?;
        let energy_coarse = match &coarse {
            Some(s) => {
                let op_c = assemble([0.0; 3], alpha, s.clone(), cutoff)?;
                Some(ground_state(&op_c, solver)?.energy)
            }
            None => None,
        };
        rows.push(ScanRow {
            alpha,
            energy_numeric: gs.energy,
            energy_coarse,
            energy_expansion: coefficients.expansion(alpha)?,
            nf_expectation: gs.state.number_expectation()?,
            grid_err_estimate: energy_coarse.map_or(f64::NAN, |c| (gs.energy - c).abs()),
            residual: gs.residual,
            converged: gs.converged,
        });
    }
    Ok(ScanTable {
        rows,
        grid: *grid,
        max_photons,
        dimension: fine.dimension(),
        coefficients,
        discrete_coefficients,
        discarded_constant,
    })
}

/// Least-squares fit `E / alpha = c_0 + c_1 alpha + ... + c_d alpha^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub coefficients: Vec<f64>,
    /// Standard errors from the residual variance; zero for exact fits.
    pub standard_errors: Vec<f64>,
    pub rms_residual: f64,
}

impl SlopeFit {
    /// `s` in `E ~ -s alpha`.
    pub fn slope(&self) -> f64 {
        -self.coefficients[0]
    }

    pub fn slope_error(&self) -> f64 {
        self.standard_errors[0]
    }
}

pub fn fit_slope(alphas: &[f64], energies: &[f64], degree: usize) -> Result<SlopeFit> {
    let n = alphas.len();
    if n != energies.len() || n < degree + 1 {
        return Err(Error::InvalidInput(format!(
            "need at least {} matching points for degree {degree}",
            degree + 1
        )));
    }
    if alphas.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::InvalidInput("couplings must be positive".into()));
    }
    let a = DMatrix::from_fn(n, degree + 1, |i, j| alphas[i].powi(j as i32));
    let b = DVector::from_fn(n, |i, _| energies[i] / alphas[i]);
    let svd = a.clone().svd(true, true);
    let c = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::Domain(format!("least squares failed: {e}")))?;
    let res = &a * &c - &b;
    let ssr = res.norm_squared();
    let dof = n.saturating_sub(degree + 1);
    let sigma2 = if dof > 0 { ssr / dof as f64 } else { 0.0 };
    let ata = a.transpose() * &a;
    let cov = ata
        .try_inverse()
        .ok_or_else(|| Error::Domain("singular fit matrix".into()))?;
    Ok(SlopeFit {
        coefficients: c.iter().copied().collect(),
        standard_errors: (0..=degree)
            .map(|j| (sigma2 * cov[(j, j)]).sqrt())
            .collect(),
        rms_residual: (ssr / n as f64).sqrt(),
    })
}

/// Photon amplitudes of a ground state against the envelope
/// `zeta(r) (alpha / r^{3/2} + sqrt(alpha) / r^{1/2})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullThroughReport {
    pub alpha: f64,
    /// Smallest constant `c` with `amplitude_j <= c * envelope_j` on every mode.
    pub constant: f64,
    /// `amplitude_j / envelope_j` per mode (NaN where the envelope vanishes).
    pub ratios: Vec<f64>,
    /// Largest amplitude on modes outside the cutoff support (should be 0).
    pub outside_support: f64,
    /// Every amplitude is zero (e.g. `alpha = 0`); the bound holds for any `c`.
    pub trivially_satisfied: bool,
}

/// `amplitude_j = sqrt(<N_j> / w_j)`: the continuum `||a(k, lambda) psi||`
/// sampled at the node.
pub fn pull_through_check(
    state: &StateVector,
    alpha: f64,
    cutoff: &CutoffProfile,
) -> Result<PullThroughReport> {
    check_alpha(alpha, true)?;
    let occ = state.mode_occupations()?;
    let norm = state.norm_sq();
    let space = &state.space;
    let mut ratios = Vec::with_capacity(occ.len());
    let mut constant: f64 = 0.0;
    let mut outside: f64 = 0.0;
    let mut largest: f64 = 0.0;
    for (j, n) in occ.iter().enumerate() {
        let w = space.grid.modes[j].weight;
        let amp = (n.max(0.0) / norm / w).sqrt();
        largest = largest.max(amp);
        let r = mode_radius(space, j);
        let env = cutoff.value(r) * (alpha / r.powf(1.5) + alpha.sqrt() / r.sqrt());
        if amp == 0.0 {
            ratios.push(if env > 0.0 { 0.0 } else { f64::NAN });
        } else if env > 0.0 {
            let q = amp / env;
            constant = constant.max(q);
            ratios.push(q);
        } else {
            outside = outside.max(amp);
            ratios.push(f64::NAN);
        }
    }
    Ok(PullThroughReport {
        alpha,
        constant,
        ratios,
        outside_support: outside,
        trivially_satisfied: largest == 0.0,
    })
}
