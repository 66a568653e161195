//! The fiber operator `T(p)` on a truncated discrete Fock space, its ground
//! state, and diagnostics on the solution.
//!
//! Expanding the normal-ordered square and using `eps_j . k_j = 0`,
//!
//! ```text
//! T(p) = (p - P_f)^2 + H_f
//!        + sqrt(alpha) (L + L^+)
//!        + alpha sum_i [A+_i A+_i + A-_i A-_i + 2 A+_i A-_i]
//! L    = -2 (p - P_f) . A+ + sigma . B+
//! ```
//!
//! with `A+_i = sum_j g_j eps_j^i a_j^+`, `B+ = -i sum_j g_j (k_j x eps_j) a_j^+`
//! and the discrete coupling `g_j = zeta(|k_j|) sqrt(w_j) / (2 pi |k_j|^{1/2})`.
//! Normal ordering drops the same-mode contraction `alpha sum_j g_j^2`, the
//! discrete version of `alpha c_no` (see [`FiberOperator::discarded_constant`]).
//!
//! The operator is stored factored: three real sparse raising maps `A+_i` on
//! occupations (spin untouched) plus the spin-block raising map `L`. Products
//! are taken inside the truncated space, which equals the projection of the
//! full products because every intermediate state has at most `N` photons.

mod ladder;
mod scan;
mod solver;

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{form_factor, polarizations};
use crate::cutoff::CutoffProfile;
use crate::error::{Error, Result};
use crate::fock::{StateVector, TruncatedFockSpace};
use crate::vec3::{cross, dot, norm, sub};
use crate::{Vec3, C64};

pub use ladder::{BlockLadder, Ladder};
pub use scan::{
    fit_slope, pull_through_check, self_energy_scan, PullThroughReport, ScanRow, ScanTable,
    SlopeFit,
};
pub use solver::{dense_eigenvalues, ground_state, GroundState, Preconditioner, SolverSpec};

/// Nonzero counts per operator group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyCounts {
    pub diagonal: usize,
    /// Spin blocks of `L` (each a 2x2 complex block).
    pub linear_blocks: usize,
    /// Entries of each `A+_i`.
    pub raising: [usize; 3],
}

#[derive(Debug, Clone)]
pub struct FiberOperator {
    pub p: Vec3,
    pub alpha: f64,
    pub space: Arc<TruncatedFockSpace>,
    /// `(p - P_f)^2 + H_f` per occupation.
    diag: Vec<f64>,
    raise: [Ladder; 3],
    linear: BlockLadder,
    couplings: Vec<f64>,
    pub counts: AssemblyCounts,
}

/// Builds `T(p)` on `space` for coupling `alpha > 0`.
pub fn assemble(
    p: Vec3,
    alpha: f64,
    space: Arc<TruncatedFockSpace>,
    cutoff: &CutoffProfile,
) -> Result<FiberOperator> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    assemble_unchecked(p, alpha, space, cutoff)
}

/// As [`assemble`] but also accepts `alpha = 0` (the free operator).
pub fn assemble_unchecked(
    p: Vec3,
    alpha: f64,
    space: Arc<TruncatedFockSpace>,
    cutoff: &CutoffProfile,
) -> Result<FiberOperator> {
    if !(alpha >= 0.0 && alpha.is_finite()) || !p.iter().all(|c| c.is_finite()) {
        return Err(Error::InvalidInput(
            "alpha and p must be finite, alpha >= 0".into(),
        ));
    }
    if space.grid.cutoff != cutoff.descriptor() {
        return Err(Error::InvalidInput(
            "the Fock space grid was built for a different cutoff".into(),
        ));
    }
    let modes = &space.grid.modes;
    let m = modes.len();
    let mut couplings = Vec::with_capacity(m);
    let mut a_vec = Vec::with_capacity(m);
    let mut curl = Vec::with_capacity(m);
    for mode in modes {
        let r = mode.radius();
        let g = form_factor(cutoff, r) * mode.weight.sqrt();
        let eps = polarizations(&mode.k)[mode.lambda];
        let c = cross(&mode.k, &eps);
        couplings.push(g);
        a_vec.push([g * eps[0], g * eps[1], g * eps[2]]);
        curl.push([g * c[0], g * c[1], g * c[2]]);
    }

    let occ = space.occupations();
    let diag: Vec<f64> = occ
        .iter()
        .map(|o| {
            let d = sub(&p, &space.field_momentum(o));
            dot(&d, &d) + space.field_energy(o)
        })
        .collect();

    let top = space.max_photons;
    let sources = if top == 0 {
        0
    } else {
        space.sector(top - 1).end
    };
    let mut raise = [
        Ladder::new(sources),
        Ladder::new(sources),
        Ladder::new(sources),
    ];
    let mut linear = BlockLadder::new(sources);
    for src in 0..sources {
        let o = occ[src];
        let shift = sub(&p, &space.field_momentum(&o));
        for j in 0..m {
            if couplings[j] == 0.0 {
                continue;
            }
            let target = o.with(j).expect("source sectors are below the truncation");
            let tgt = space
                .index_of_occupation(&target)
                .expect("raised occupation lies in the space");
            let f = ((o.count(j) + 1) as f64).sqrt();
            for i in 0..3 {
                if a_vec[j][i] != 0.0 {
                    raise[i].push(src, tgt, f * a_vec[j][i]);
                }
            }
            // -2 (p - P_f) . a_j + sigma . (-i curl_j)
            let orb = -2.0 * dot(&shift, &a_vec[j]);
            let c = curl[j];
            let i = C64::new(0.0, 1.0);
            let block = [
                C64::new(orb, 0.0) - i * c[2],
                -i * C64::new(c[0], -c[1]),
                -i * C64::new(c[0], c[1]),
                C64::new(orb, 0.0) + i * c[2],
            ];
            linear.push(src, tgt, block.map(|z| z * f));
        }
        for l in raise.iter_mut() {
            l.finish_source();
        }
        linear.finish_source();
    }
    let counts = AssemblyCounts {
        diagonal: diag.len() * 2,
        linear_blocks: linear.nnz(),
        raising: [raise[0].nnz(), raise[1].nnz(), raise[2].nnz()],
    };
    Ok(FiberOperator {
        p,
        alpha,
        space,
        diag,
        raise,
        linear,
        couplings,
        counts,
    })
}

impl FiberOperator {
    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    /// Diagonal of the free part, per basis index.
    pub fn free_diagonal(&self) -> Vec<f64> {
        self.diag.iter().flat_map(|&d| [d, d]).collect()
    }

    /// Exact diagonal of the full operator, per basis index.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = self.free_diagonal();
        // 2 alpha A+_i A-_i contributes 2 alpha sum_i |<m|A+_i|m'>|^2 on the diagonal.
        let mut extra = vec![0.0; self.diag.len()];
        for l in &self.raise {
            l.add_squared_column_sums(&mut extra);
        }
        for (k, e) in extra.iter().enumerate() {
            d[2 * k] += 2.0 * self.alpha * e;
            d[2 * k + 1] += 2.0 * self.alpha * e;
        }
        d
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.apply_parts(x, 1.0, self.alpha.sqrt(), self.alpha, y);
    }

    /// `y = c0 H0 x + c1 (L + L^+) x + c2 V2 x`, where `H0` is the free part
    /// and `V2 = sum_i [A+_i A+_i + 2 A+_i A-_i + A-_i A-_i]`.
    pub fn apply_parts(&self, x: &[C64], c0: f64, c1: f64, c2: f64, y: &mut [C64]) {
        let n = self.dimension();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        for (k, d) in self.diag.iter().enumerate() {
            y[2 * k] = x[2 * k] * (c0 * d);
            y[2 * k + 1] = x[2 * k + 1] * (c0 * d);
        }
        if c1 != 0.0 {
            self.linear.apply_hermitian_sum(c1, x, y);
        }
        if c2 == 0.0 {
            return;
        }
        let zero = C64::new(0.0, 0.0);
        let mut down = vec![zero; n];
        let mut up = vec![zero; n];
        let mut tmp = vec![zero; n];
        for l in &self.raise {
            down.fill(zero);
            up.fill(zero);
            l.lower(1.0, x, &mut down);
            l.raise(1.0, x, &mut up);
            // A+ (A+ x + 2 A- x) + A- (A- x)
            for k in 0..n {
                tmp[k] = up[k] + down[k] * 2.0;
            }
            l.raise(c2, &tmp, y);
            l.lower(c2, &down, y);
        }
    }

    pub fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        self.apply(x, &mut y);
        y
    }

    /// Dense matrix, for small spaces.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let n = self.dimension();
        if n > 6000 {
            return Err(Error::Infeasible(format!("dense matrix of dimension {n}")));
        }
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            e[c] = C64::new(1.0, 0.0);
            let col = self.apply_vec(&e);
            for r in 0..n {
                m[(r, c)] = col[r];
            }
            e[c] = C64::new(0.0, 0.0);
        }
        Ok(m)
    }

    /// `max |<u, T v> - <T u, v>|` over a few seeded random pairs, relative
    /// to `||T u|| ||v|| + ||u|| ||T v||`.
    pub fn hermiticity_residual(&self, seed: u64) -> f64 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = self.dimension();
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let mut draw = || -> Vec<C64> {
                (0..n)
                    .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect()
            };
            let u = draw();
            let v = draw();
            let tu = self.apply_vec(&u);
            let tv = self.apply_vec(&v);
            let a = inner(&u, &tv);
            let b = inner(&tu, &v);
            let scale = norm_c(&tu) * norm_c(&v) + norm_c(&u) * norm_c(&tv);
            worst = worst.max((a - b).norm() / scale);
        }
        worst
    }

    /// `sum_j g_j^2`: coefficient of `alpha` removed by normal ordering.
    pub fn discarded_constant(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum()
    }

    /// `<psi, T psi> / <psi, psi>`.
    pub fn rayleigh_quotient(&self, x: &[C64]) -> f64 {
        inner(x, &self.apply_vec(x)).re / inner(x, x).re
    }

    /// Rayleigh-Schrodinger coefficients `(e1, e2)` of the lowest level at
    /// `p = 0` in this truncated space: `E = e1 alpha + e2 alpha^2 + O(alpha^3)`.
    /// The alpha-independent pieces of the operator are used, so `self.alpha`
    /// is irrelevant. Two photons suffice for `e2` to be exact on the grid.
    pub fn perturbative_coefficients(&self) -> Result<(f64, f64)> {
        if self.p.iter().any(|&c| c != 0.0) {
            return Err(Error::InvalidInput(
                "perturbative coefficients need p = 0".into(),
            ));
        }
        let n = self.dimension();
        let zero = C64::new(0.0, 0.0);
        let v1 = |x: &[C64]| {
            let mut y = vec![zero; n];
            self.apply_parts(x, 0.0, 1.0, 0.0, &mut y);
            y
        };
        let v2 = |x: &[C64]| {
            let mut y = vec![zero; n];
            self.apply_parts(x, 0.0, 0.0, 1.0, &mut y);
            y
        };
        // Reduced resolvent: H0^{-1} off the vacuum pair.
        let resolve = |mut r: Vec<C64>| {
            r[0] = zero;
            r[1] = zero;
            for (k, d) in self.diag.iter().enumerate().skip(1) {
                r[2 * k] /= *d;
                r[2 * k + 1] /= *d;
            }
            r
        };
        // psi[n] is the coefficient of sqrt(alpha)^n; e[n] likewise.
        let mut psi: Vec<Vec<C64>> = vec![vec![zero; n]];
        psi[0][0] = C64::new(1.0, 0.0);
        let mut e = vec![0.0];
        for order in 1..=4 {
            let mut en = v1(&psi[order - 1])[0];
            if order >= 2 {
                en += v2(&psi[order - 2])[0];
            }
            e.push(en.re);
            if order == 4 {
                break;
            }
            // H0 psi_n = -V1 psi_{n-1} - V2 psi_{n-2} + sum_k E_k psi_{n-k}
            let mut rhs: Vec<C64> = v1(&psi[order - 1]).iter().map(|z| -z).collect();
            if order >= 2 {
                for (r, z) in rhs.iter_mut().zip(v2(&psi[order - 2])) {
                    *r -= z;
                }
            }
            for k in 1..=order {
                for (r, z) in rhs.iter_mut().zip(&psi[order - k]) {
                    *r += z * e[k];
                }
            }
            psi.push(resolve(rhs));
        }
        Ok((e[2], e[4]))
    }

    /// The discretized trial vector `Omega(spin) + sqrt(alpha) Gamma1`, with
    /// `Gamma1 = -(H_f + P_f^2)^{-1} L Omega`.
    pub fn first_order_trial(&self, spin: usize) -> Result<StateVector> {
        let mut x = vec![C64::new(0.0, 0.0); self.dimension()];
        x[spin] = C64::new(1.0, 0.0);
        let mut y = vec![C64::new(0.0, 0.0); self.dimension()];
        self.linear.raise(1.0, &x, &mut y);
        let s = self.alpha.sqrt();
        for (k, d) in self.diag.iter().enumerate().skip(1) {
            for sp in 0..2 {
                x[2 * k + sp] = -y[2 * k + sp] * (s / d);
            }
        }
        StateVector::new(self.space.clone(), x)
    }
}

pub(crate) fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn norm_c(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Radius of a mode; re-exported for diagnostics.
pub(crate) fn mode_radius(space: &TruncatedFockSpace, j: usize) -> f64 {
    norm(&space.grid.modes[j].k)
}
