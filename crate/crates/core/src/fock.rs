//! Discrete photon modes and the truncated spin x Fock basis.
//!
//! A continuum amplitude `a_lambda(k)` corresponds to `a_j / sqrt(w_j)` on
//! mode `j = (k_j, w_j, lambda_j)`, so `int |k| |a(k) psi|^2 dk` becomes
//! `sum_j |k_j| ||a_j psi||^2`.
//!
//! Basis elements are (multiset of mode indices, spin). Multisets are stored
//! sorted; sectors of equal photon number are contiguous and ordered
//! lexicographically inside a sector. The basis index is
//! `2 * occupation_index + spin` with spin 0 = up, 1 = down. Amplitudes use
//! the symmetric-tensor normalization: the state `|m>` is normalized, and
//! `a_j^+ |m> = sqrt(n_j + 1) |m + j>`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cutoff::{CutoffDescriptor, CutoffProfile};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_on, RadialDomain, SphereRule};
use crate::vec3::norm;
use crate::{Vec3, C64};

/// Largest supported photon-number truncation.
pub const MAX_PHOTONS: usize = 3;

/// One photon mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: Vec3,
    /// Volume weight of the momentum node (`r^2 dr dOmega`).
    pub weight: f64,
    /// Polarization: 0 for `eps_1`, 1 for `eps_2`.
    pub lambda: usize,
}

impl Mode {
    pub fn radius(&self) -> f64 {
        norm(&self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    /// Radial panels, graded geometrically toward 0: breakpoints at
    /// `L 2^{-(P-1)}, ..., L/2, L`.
    pub radial_panels: usize,
    pub nodes_per_panel: usize,
    /// Order `n` of the sphere rule (`2 n^2` directions).
    pub angular_order: usize,
    pub max_modes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            radial_panels: 2,
            nodes_per_panel: 4,
            angular_order: 2,
            max_modes: 4096,
        }
    }
}

impl GridSpec {
    pub fn new(radial_panels: usize, angular_order: usize) -> Self {
        GridSpec {
            radial_panels,
            angular_order,
            ..Default::default()
        }
    }

    /// Mode count for a cutoff without breakpoints; each breakpoint adds a panel.
    pub fn mode_count(&self) -> usize {
        2 * self.radial_panels * self.nodes_per_panel * 2 * self.angular_order * self.angular_order
    }

    /// The same grid with one radial panel fewer (for refinement estimates).
    pub fn coarser(&self) -> Option<Self> {
        (self.radial_panels > 1).then(|| GridSpec {
            radial_panels: self.radial_panels - 1,
            ..*self
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    pub modes: Vec<Mode>,
    pub spec: GridSpec,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub cutoff: CutoffDescriptor,
}

/// Builds the mode grid over the cutoff ball: Gauss-Legendre radial nodes on
/// graded panels times a [`SphereRule`], two polarizations per node.
///
/// Modes are ordered by radial node, then direction, then polarization.
/// Panels follow the geometric grading and are further split at the
/// cutoff's breakpoints.
pub fn build_grid(spec: &GridSpec, cutoff: &CutoffProfile) -> Result<ModeGrid> {
    if spec.radial_panels == 0 || spec.nodes_per_panel == 0 || spec.angular_order == 0 {
        return Err(Error::InvalidInput("grid sizes must be positive".into()));
    }
    if cutoff.is_zero() {
        return Err(Error::InvalidInput(
            "cannot build a mode grid for a cutoff with empty support".into(),
        ));
    }
    let panels = RadialDomain::from_cutoff(cutoff).graded_panels(spec.radial_panels - 1);
    let count = 4 * panels.len() * spec.nodes_per_panel * spec.angular_order * spec.angular_order;
    if count > spec.max_modes {
        return Err(Error::Infeasible(format!(
            "grid has {count} modes, cap is {}",
            spec.max_modes
        )));
    }
    let sphere = SphereRule::new(spec.angular_order);
    let mut modes = Vec::with_capacity(count);
    let mut radial_nodes = 0;
    for (a, b) in panels {
        let (r, wr) = gauss_legendre_on(spec.nodes_per_panel, a, b);
        for (r, wr) in r.iter().zip(&wr) {
            radial_nodes += 1;
            for (d, wa) in sphere.directions.iter().zip(&sphere.weights) {
                let k = [r * d[0], r * d[1], r * d[2]];
                let weight = wr * wa * r * r;
                for lambda in 0..2 {
                    modes.push(Mode { k, weight, lambda });
                }
            }
        }
    }
    Ok(ModeGrid {
        modes,
        spec: *spec,
        radial_nodes,
        angular_nodes: sphere.len(),
        cutoff: cutoff.descriptor(),
    })
}

impl ModeGrid {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `sum_j w_j` over the first polarization: the discrete ball volume.
    pub fn volume(&self) -> f64 {
        self.modes
            .iter()
            .filter(|m| m.lambda == 0)
            .map(|m| m.weight)
            .sum()
    }

    /// Rows `k1,k2,k3,w,lambda` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k1,k2,k3,w,lambda\n");
        for m in &self.modes {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                m.k[0],
                m.k[1],
                m.k[2],
                m.weight,
                m.lambda + 1
            ));
        }
        s
    }
}

/// A sorted multiset of at most [`MAX_PHOTONS`] mode indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation {
    len: u8,
    modes: [u32; MAX_PHOTONS],
}

impl Occupation {
    pub const VACUUM: Occupation = Occupation {
        len: 0,
        modes: [0; MAX_PHOTONS],
    };

    pub fn from_modes(modes: &[usize]) -> Result<Self> {
        if modes.len() > MAX_PHOTONS {
            return Err(Error::InvalidInput(format!(
                "at most {MAX_PHOTONS} photons are supported"
            )));
        }
        let mut o = Occupation::VACUUM;
        let mut v: Vec<usize> = modes.to_vec();
        v.sort_unstable();
        for (i, m) in v.iter().enumerate() {
            o.modes[i] = *m as u32;
        }
        o.len = v.len() as u8;
        Ok(o)
    }

    pub fn photons(&self) -> usize {
        self.len as usize
    }

    pub fn modes(&self) -> &[u32] {
        &self.modes[..self.len as usize]
    }

    /// Occupation number of mode `j`.
    pub fn count(&self, j: usize) -> usize {
        self.modes().iter().filter(|&&m| m as usize == j).count()
    }

    /// `self + {j}`, or `None` at the size limit.
    pub fn with(&self, j: usize) -> Option<Occupation> {
        if self.photons() >= MAX_PHOTONS {
            return None;
        }
        let mut o = *self;
        let pos = self.modes().partition_point(|&m| (m as usize) <= j);
        for i in (pos..self.photons()).rev() {
            o.modes[i + 1] = o.modes[i];
        }
        o.modes[pos] = j as u32;
        o.len += 1;
        Some(o)
    }

    /// Lexicographic key; shorter sequences never compare against longer
    /// ones because sectors are stored separately.
    fn key(&self) -> &[u32] {
        self.modes()
    }
}

/// Spin x (photon number <= N) Fock space over a [`ModeGrid`].
#[derive(Debug, Clone)]
pub struct TruncatedFockSpace {
    pub grid: ModeGrid,
    pub max_photons: usize,
    occupations: Vec<Occupation>,
    /// `sector_start[n]..sector_start[n+1]` are the occupations with `n` photons.
    sector_start: Vec<usize>,
}

fn multiset_count(modes: usize, n: usize) -> usize {
    // C(modes + n - 1, n)
    let mut c: u128 = 1;
    for i in 0..n {
        c = c * (modes + i) as u128 / (i + 1) as u128;
    }
    c as usize
}

impl TruncatedFockSpace {
    /// Largest basis dimension accepted by [`TruncatedFockSpace::new`].
    pub const MAX_DIMENSION: usize = 4_000_000;

    pub fn new(grid: ModeGrid, max_photons: usize) -> Result<Self> {
        if max_photons > MAX_PHOTONS {
            return Err(Error::InvalidInput(format!(
                "max_photons must be at most {MAX_PHOTONS}, got {max_photons}"
            )));
        }
        let m = grid.len();
        let dim = Self::dimension_for(m, max_photons);
        if dim > Self::MAX_DIMENSION {
            return Err(Error::Infeasible(format!(
                "Fock basis of dimension {dim} exceeds the cap {}",
                Self::MAX_DIMENSION
            )));
        }
        let mut occupations = Vec::with_capacity(dim / 2);
        let mut sector_start = vec![0];
        let mut current = vec![Occupation::VACUUM];
        for _n in 0..=max_photons {
            occupations.extend_from_slice(&current);
            sector_start.push(occupations.len());
            // Next sector: append modes >= last mode, keeping lexicographic order.
            let mut next = Vec::new();
            for o in &current {
                let start = o.modes().last().map_or(0, |&l| l as usize);
                for j in start..m {
                    if let Some(x) = o.with(j) {
                        next.push(x);
                    }
                }
            }
            current = next;
        }
        Ok(TruncatedFockSpace {
            grid,
            max_photons,
            occupations,
            sector_start,
        })
    }

    /// `2 * sum_{n<=N} C(M + n - 1, n)`.
    pub fn dimension_for(modes: usize, max_photons: usize) -> usize {
        2 * (0..=max_photons)
            .map(|n| multiset_count(modes, n))
            .sum::<usize>()
    }

    pub fn dimension(&self) -> usize {
        2 * self.occupations.len()
    }

    pub fn occupation_count(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupation(&self, index: usize) -> &Occupation {
        &self.occupations[index]
    }

    pub fn occupations(&self) -> &[Occupation] {
        &self.occupations
    }

    /// Occupation indices of the `n`-photon sector.
    pub fn sector(&self, n: usize) -> std::ops::Range<usize> {
        self.sector_start[n]..self.sector_start[n + 1]
    }

    /// Basis indices of the `n`-photon sector.
    pub fn sector_basis(&self, n: usize) -> std::ops::Range<usize> {
        let r = self.sector(n);
        2 * r.start..2 * r.end
    }

    pub fn index_of_occupation(&self, o: &Occupation) -> Option<usize> {
        let n = o.photons();
        if n > self.max_photons {
            return None;
        }
        let r = self.sector(n);
        self.occupations[r.clone()]
            .binary_search_by(|x| x.key().cmp(o.key()))
            .ok()
            .map(|i| r.start + i)
    }

    pub fn basis_index(&self, o: &Occupation, spin: usize) -> Option<usize> {
        self.index_of_occupation(o).map(|i| 2 * i + spin)
    }

    /// `(occupation, spin)` of a basis index.
    pub fn basis_element(&self, index: usize) -> (&Occupation, usize) {
        (&self.occupations[index / 2], index % 2)
    }

    /// Photon momentum `P_f` of an occupation.
    pub fn field_momentum(&self, o: &Occupation) -> Vec3 {
        let mut p = [0.0; 3];
        for &j in o.modes() {
            let k = self.grid.modes[j as usize].k;
            for i in 0..3 {
                p[i] += k[i];
            }
        }
        p
    }

    /// Field energy `H_f` of an occupation.
    pub fn field_energy(&self, o: &Occupation) -> f64 {
        o.modes()
            .iter()
            .map(|&j| self.grid.modes[j as usize].radius())
            .sum()
    }
}

/// Complex amplitudes over the basis of a [`TruncatedFockSpace`].
#[derive(Debug, Clone)]
pub struct StateVector {
    pub space: Arc<TruncatedFockSpace>,
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(space: Arc<TruncatedFockSpace>, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.dimension() {
            return Err(Error::InvalidInput(format!(
                "state has {} amplitudes, space dimension is {}",
                amplitudes.len(),
                space.dimension()
            )));
        }
        Ok(StateVector { space, amplitudes })
    }

    pub fn zeros(space: Arc<TruncatedFockSpace>) -> Self {
        let n = space.dimension();
        StateVector {
            space,
            amplitudes: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `||Pi_n psi||^2` for `n = 0..=N`.
    pub fn sector_norms_sq(&self) -> Vec<f64> {
        (0..=self.space.max_photons)
            .map(|n| {
                self.amplitudes[self.space.sector_basis(n)]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum()
            })
            .collect()
    }

    fn normalized_weights(&self) -> Result<f64> {
        let n = self.norm_sq();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput(
                "expectation of a zero-norm state".into(),
            ));
        }
        Ok(n)
    }

    /// `sum_b |psi_b|^2 f(occupation_b) / ||psi||^2`.
    fn occupation_expectation<T, F>(&self, zero: T, mut f: F) -> Result<T>
    where
        T: std::ops::AddAssign + std::ops::Mul<f64, Output = T> + Copy,
        F: FnMut(&Occupation) -> T,
    {
        let n = self.normalized_weights()?;
        let mut acc = zero;
        for (i, o) in self.space.occupations.iter().enumerate() {
            let p = self.amplitudes[2 * i].norm_sqr() + self.amplitudes[2 * i + 1].norm_sqr();
            if p != 0.0 {
                acc += f(o) * (p / n);
            }
        }
        Ok(acc)
    }

    pub fn number_expectation(&self) -> Result<f64> {
        self.occupation_expectation(0.0, |o| o.photons() as f64)
    }

    pub fn field_energy_expectation(&self) -> Result<f64> {
        self.occupation_expectation(0.0, |o| self.space.field_energy(o))
    }

    pub fn field_momentum_expectation(&self) -> Result<Vec3> {
        let mut p = [0.0; 3];
        for i in 0..3 {
            p[i] = self.occupation_expectation(0.0, |o| self.space.field_momentum(o)[i])?;
        }
        Ok(p)
    }

    /// `<a_j^+ a_j> = ||a_j psi||^2 / ||psi||^2`.
    pub fn mode_occupation(&self, j: usize) -> Result<f64> {
        if j >= self.space.grid.len() {
            return Err(Error::InvalidInput(format!("mode index {j} out of range")));
        }
        self.occupation_expectation(0.0, |o| o.count(j) as f64)
    }

    /// All mode occupations in one pass.
    pub fn mode_occupations(&self) -> Result<Vec<f64>> {
        let n = self.normalized_weights()?;
        let mut occ = vec![0.0; self.space.grid.len()];
        for (i, o) in self.space.occupations.iter().enumerate() {
            let p = self.amplitudes[2 * i].norm_sqr() + self.amplitudes[2 * i + 1].norm_sqr();
            if p != 0.0 {
                for &j in o.modes() {
                    occ[j as usize] += p / n;
                }
            }
        }
        Ok(occ)
    }
}

/// The vacuum with spin `spin` (0 up, 1 down).
pub fn vacuum_state(space: Arc<TruncatedFockSpace>, spin: usize) -> Result<StateVector> {
    if spin > 1 {
        return Err(Error::InvalidInput(format!(
            "spin index must be 0 or 1, got {spin}"
        )));
    }
    let mut s = StateVector::zeros(space);
    s.amplitudes[spin] = C64::new(1.0, 0.0);
    Ok(s)
}
