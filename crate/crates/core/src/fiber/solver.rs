//! Lowest eigenpair of the fiber operator: block Davidson with a diagonal
//! (Jacobi) preconditioner, two-pass Gram-Schmidt and thick restart. The
//! ground state of `T(p)` is a Kramers pair, hence the default block of two.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{inner, norm_c, FiberOperator};
use crate::error::{Error, Result};
use crate::fock::StateVector;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preconditioner {
    /// `(diag(T) - theta)^{-1}` applied to the residual.
    Jacobi,
    /// Plain residual expansion (a block Lanczos-like iteration).
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    /// Convergence when `||T x - theta x|| <= residual_tol * max(1, max|diag|)`.
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub block_size: usize,
    /// Subspace size that triggers a thick restart.
    pub max_subspace: usize,
    pub preconditioner: Preconditioner,
    /// Seed of the start-vector perturbation.
    pub seed: u64,
    pub start_noise: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            residual_tol: 1e-9,
            max_iterations: 400,
            block_size: 2,
            max_subspace: 40,
            preconditioner: Preconditioner::Jacobi,
            seed: 0x5eed,
            start_noise: 1e-3,
        }
    }
}

impl SolverSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidInput("residual_tol must be positive".into()));
        }
        if self.block_size == 0 || self.max_subspace < 3 * self.block_size {
            return Err(Error::InvalidInput(
                "need block_size >= 1 and max_subspace >= 3 * block_size".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.start_noise >= 0.0 && self.start_noise.is_finite()) {
            return Err(Error::InvalidInput("start_noise must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// Residual norm of the returned vector.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    pub matvecs: usize,
    /// Lowest Ritz values of the final subspace, ascending (one per block vector).
    pub ritz_values: Vec<f64>,
}

impl GroundState {
    /// Turns an unconverged result into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                what: "fiber ground state".into(),
                estimate: self.energy,
                error: self.residual,
            })
        }
    }
}

struct Basis {
    v: Vec<Vec<C64>>,
    w: Vec<Vec<C64>>,
}

impl Basis {
    /// Orthonormalizes `c` against the basis (two passes) and appends it with
    /// its image. Returns false when `c` is numerically dependent.
    fn push(&mut self, op: &FiberOperator, mut c: Vec<C64>, matvecs: &mut usize) -> bool {
        let n0 = norm_c(&c);
        if n0 == 0.0 || !n0.is_finite() {
            return false;
        }
        for _ in 0..2 {
            for b in &self.v {
                let h = inner(b, &c);
                for (ci, bi) in c.iter_mut().zip(b) {
                    *ci -= h * bi;
                }
            }
        }
        let n = norm_c(&c);
        if n <= 1e-10 * n0 {
            return false;
        }
        c.iter_mut().for_each(|z| *z /= n);
        self.w.push(op.apply_vec(&c));
        *matvecs += 1;
        self.v.push(c);
        true
    }

    fn combine(set: &[Vec<C64>], y: &DMatrix<C64>, col: usize) -> Vec<C64> {
        let n = set[0].len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, s) in set.iter().enumerate() {
            let c = y[(i, col)];
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, x) in out.iter_mut().zip(s) {
                *o += c * x;
            }
        }
        out
    }
}

/// Ritz pairs of the projected operator, ascending.
fn rayleigh_ritz(basis: &Basis) -> (Vec<f64>, DMatrix<C64>) {
    let m = basis.v.len();
    let mut g = DMatrix::<C64>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let h = inner(&basis.v[i], &basis.w[j]);
            g[(i, j)] = h;
            g[(j, i)] = h.conj();
        }
        g[(i, i)] = C64::new(g[(i, i)].re, 0.0);
    }
    let eig = g.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Lowest eigenpair of `op`. An unconverged run is returned with
/// `converged = false` and the best residual found.
pub fn ground_state(op: &FiberOperator, spec: &SolverSpec) -> Result<GroundState> {
    spec.validate()?;
    let n = op.dimension();
    let nev = spec.block_size.min(n);
    let diag = op.diagonal();
    let scale = diag.iter().fold(1.0f64, |a, d| a.max(d.abs()));
    let tol = spec.residual_tol * scale;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut basis = Basis {
        v: vec![],
        w: vec![],
    };
    let mut matvecs = 0;
    for b in 0..nev {
        let mut x: Vec<C64> = (0..n)
            .map(|_| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * spec.start_noise
            })
            .collect();
        // Vacuum times spin b, slightly perturbed.
        x[b] += C64::new(1.0, 0.0);
        basis.push(op, x, &mut matvecs);
    }
    if basis.v.is_empty() {
        return Err(Error::InvalidInput("empty Fock space".into()));
    }

    let mut best: Option<(f64, Vec<C64>, f64)> = None;
    let mut ritz = vec![];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < spec.max_iterations {
        iterations += 1;
        let (vals, vecs) = rayleigh_ritz(&basis);
        let k = nev.min(vals.len());
        ritz = vals[..k].to_vec();
        let mut residuals = Vec::with_capacity(k);
        let mut ritz_x = Vec::with_capacity(k);
        let mut ritz_w = Vec::with_capacity(k);
        for b in 0..k {
            let x = Basis::combine(&basis.v, &vecs, b);
            let w = Basis::combine(&basis.w, &vecs, b);
            let r: Vec<C64> = w.iter().zip(&x).map(|(wi, xi)| wi - xi * vals[b]).collect();
            residuals.push(r);
            ritz_x.push(x);
            ritz_w.push(w);
        }
        let rn0 = norm_c(&residuals[0]);
        if best.as_ref().is_none_or(|b| rn0 < b.2) {
            best = Some((vals[0], ritz_x[0].clone(), rn0));
        }
        if residuals.iter().all(|r| norm_c(r) <= tol) {
            converged = true;
            break;
        }

        if basis.v.len() + k > spec.max_subspace {
            // Thick restart on the lowest Ritz vectors.
            let keep = (2 * k).min(vals.len());
            let mut v = ritz_x.clone();
            let mut w = ritz_w.clone();
            for b in k..keep {
                v.push(Basis::combine(&basis.v, &vecs, b));
                w.push(Basis::combine(&basis.w, &vecs, b));
            }
            basis = Basis { v, w };
        }

        let mut added = 0;
        for b in 0..k {
            let r = &residuals[b];
            if norm_c(r) <= tol {
                continue;
            }
            let t: Vec<C64> = match spec.preconditioner {
                Preconditioner::Jacobi => r
                    .iter()
                    .zip(&diag)
                    .map(|(ri, d)| {
                        let s = d - vals[b];
                        let s = if s.abs() < 1e-8 {
                            1e-8f64.copysign(s)
                        } else {
                            s
                        };
                        ri / s
                    })
                    .collect(),
                Preconditioner::None => r.clone(),
            };
            // An exact diagonal makes the Jacobi step parallel to the Ritz
            // vector; the plain residual still extends the space then.
            if basis.push(op, t, &mut matvecs) || basis.push(op, r.clone(), &mut matvecs) {
                added += 1;
            }
        }
        if added == 0 {
            break;
        }
    }

    let (_, x, _) = best.expect("at least one iteration");
    let w = op.apply_vec(&x);
    let rq = inner(&x, &w).re / inner(&x, &x).re;
    let residual = norm_c(
        &w.iter()
            .zip(&x)
            .map(|(wi, xi)| wi - xi * rq)
            .collect::<Vec<_>>(),
    ) / norm_c(&x);
    let nx = norm_c(&x);
    let state = StateVector::new(op.space.clone(), x.iter().map(|z| z / nx).collect())?;
    Ok(GroundState {
        energy: rq,
        state,
        residual,
        converged: converged || residual <= tol,
        iterations,
        matvecs,
        ritz_values: ritz,
    })
}

/// All eigenvalues of the dense matrix, ascending.
pub fn dense_eigenvalues(op: &FiberOperator) -> Result<Vec<f64>> {
    let m = op.to_dense()?;
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cutoff::CutoffProfile;
    use crate::fiber::assemble;
    use crate::fock::{build_grid, GridSpec, TruncatedFockSpace};

    fn small(alpha: f64, p: [f64; 3], n: usize) -> FiberOperator {
        let cut = CutoffProfile::sharp(1.0).unwrap();
        let grid = build_grid(&GridSpec::new(1, 1), &cut).unwrap();
        let s = Arc::new(TruncatedFockSpace::new(grid, n).unwrap());
        assemble(p, alpha, s, &cut).unwrap()
    }

    #[test]
    fn matches_dense_oracle() {
        for (alpha, p) in [(0.02, [0.0; 3]), (0.05, [0.0; 3]), (0.05, [0.1, 0.0, 0.2])] {
            let op = small(alpha, p, 2);
            let dense = dense_eigenvalues(&op).unwrap();
            let gs = ground_state(&op, &SolverSpec::default()).unwrap();
            assert!(gs.converged);
            assert!(
                (gs.energy - dense[0]).abs() < 1e-12,
                "{} vs {}",
                gs.energy,
                dense[0]
            );
            assert!(gs.residual < 1e-8);
            assert!((gs.state.norm_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kramers_pair_at_zero_momentum() {
        let op = small(0.05, [0.0; 3], 2);
        let dense = dense_eigenvalues(&op).unwrap();
        assert!((dense[0] - dense[1]).abs() < 1e-12);
        let gs = ground_state(&op, &SolverSpec::default()).unwrap();
        assert_eq!(gs.ritz_values.len(), 2);
        assert!((gs.ritz_values[1] - dense[1]).abs() < 1e-10);
    }

    #[test]
    fn unpreconditioned_agrees() {
        let op = small(0.03, [0.0; 3], 2);
        let a = ground_state(&op, &SolverSpec::default()).unwrap();
        let spec = SolverSpec {
            preconditioner: Preconditioner::None,
            max_iterations: 2000,
            ..SolverSpec::default()
        };
        let b = ground_state(&op, &spec).unwrap();
        assert!(b.converged);
        assert!((a.energy - b.energy).abs() < 1e-11);
    }

    #[test]
    fn deterministic_for_seed() {
        let op = small(0.04, [0.0; 3], 2);
        let a = ground_state(&op, &SolverSpec::default()).unwrap();
        let b = ground_state(&op, &SolverSpec::default()).unwrap();
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn unconverged_is_flagged() {
        let op = small(0.05, [0.0; 3], 3);
        let spec = SolverSpec {
            max_iterations: 1,
            residual_tol: 1e-15,
            ..SolverSpec::default()
        };
        let gs = ground_state(&op, &spec).unwrap();
        assert!(!gs.converged);
        assert!(gs.residual.is_finite());
        assert!(matches!(
            gs.require_converged(),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn rejects_bad_spec() {
        let op = small(0.05, [0.0; 3], 1);
        let spec = SolverSpec {
            block_size: 0,
            ..SolverSpec::default()
        };
        assert!(ground_state(&op, &spec).is_err());
    }
}
