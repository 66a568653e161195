//! Closed-form photon amplitudes of the ground-state expansion.
//!
//! A one-photon amplitude is a function `(k, lambda) -> C^2`, the two
//! entries being the spin-up and spin-down components. With the form factor
//! `g(k) = zeta(|k|) / (2 pi |k|^{1/2})` and polarization vectors
//! `eps_lambda(k)`:
//!
//! - `sigma.B+ Omega(a,b)`: `-i g sigma.(k x eps_lambda) (a,b)`
//! - `Gamma1`:             `-(|k| + |k|^2)^{-1} sigma.B+ Omega(a,b)`
//! - `(A+)^(i) Omega`:     `g eps_lambda^i (a,b)`
//! - `R (A+)^(i) Omega`:   the same divided by `|k| + |k|^2`
//! - `P_f^(i) Gamma1`:     `k_i Gamma1`
//! - `R P_f^(i) Gamma1`:   `k_i Gamma1 / (|k| + |k|^2)`
//!
//! where `R = (H_f + P_f^2)^{-1}`. Two-photon amplitudes are functions of
//! `((k1, l1), (k2, l2))` symmetric under exchange, normalized so that
//! `||psi||^2 = sum_{l1,l2} int int |psi|^2` over ordered pairs.
//!
//! Polarization index `lambda` is `0` for `eps_1` and `1` for `eps_2`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::cutoff::CutoffProfile;
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_momentum_with, monte_carlo_two_photon, tensor_two_photon, uses_tensor, BallRule,
    Estimate, QuadratureSpec, RadialDomain, SphereRule, TwoPhotonEstimate,
};
use crate::vec3::{cross, dot, norm};
use crate::{Vec3, C64};

pub type Spinor = [C64; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Electron spin state `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinorPair {
    pub a: C64,
    pub b: C64,
}

impl SpinorPair {
    pub fn new(a: C64, b: C64) -> Self {
        SpinorPair { a, b }
    }

    pub fn up() -> Self {
        SpinorPair::new(C64::new(1.0, 0.0), ZERO)
    }

    pub fn down() -> Self {
        SpinorPair::new(ZERO, C64::new(1.0, 0.0))
    }

    pub fn norm_sq(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero spinor".into()));
        }
        Ok(SpinorPair::new(self.a / n, self.b / n))
    }

    pub fn scaled(&self, mu: C64) -> Self {
        SpinorPair::new(mu * self.a, mu * self.b)
    }

    pub fn as_array(&self) -> Spinor {
        [self.a, self.b]
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &SpinorPair) -> C64 {
        self.a.conj() * other.a + self.b.conj() * other.b
    }
}

/// Polarization vectors `(eps_1, eps_2)` of a nonzero photon momentum.
///
/// `eps_1 = (k2, -k1, 0) / sqrt(k1^2 + k2^2)`, `eps_2 = k/|k| x eps_1`.
/// On the `k3` axis, where the formula is `0/0`, `eps_1 = (1,0,0)` and
/// `eps_2 = (0,1,0)`.
pub fn polarization_vectors(k: &Vec3) -> Result<[Vec3; 2]> {
    if !(k.iter().all(|c| c.is_finite())) || norm(k) == 0.0 {
        return Err(Error::Domain(format!(
            "polarization vectors need a finite nonzero momentum, got {k:?}"
        )));
    }
    Ok(polarizations(k))
}

/// Unchecked version of [`polarization_vectors`] for `k != 0`.
#[inline]
pub(crate) fn polarizations(k: &Vec3) -> [Vec3; 2] {
    let rho2 = k[0] * k[0] + k[1] * k[1];
    if rho2 == 0.0 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    }
    let rho = rho2.sqrt();
    let kk = (rho2 + k[2] * k[2]).sqrt();
    [
        [k[1] / rho, -k[0] / rho, 0.0],
        [
            k[0] * k[2] / (kk * rho),
            k[1] * k[2] / (kk * rho),
            -rho / kk,
        ],
    ]
}

/// `zeta(r) / (2 pi r^{1/2})`, taken as 0 at `r = 0`.
#[inline]
pub fn form_factor(cutoff: &CutoffProfile, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    cutoff.value(r) / (2.0 * PI * r.sqrt())
}

/// `|k| + |k|^2`, the one-photon value of `H_f + P_f^2`.
#[inline]
pub fn star_weight(r: f64) -> f64 {
    r + r * r
}

/// `(sigma . v) chi` for a real vector `v`.
#[inline]
pub fn sigma_dot_real(v: &Vec3, chi: &Spinor) -> Spinor {
    let off = C64::new(v[0], -v[1]);
    [
        chi[0] * v[2] + off * chi[1],
        off.conj() * chi[0] - chi[1] * v[2],
    ]
}

/// `(sigma . v) chi` for a complex vector `v`.
#[inline]
pub fn sigma_dot(v: &[C64; 3], chi: &Spinor) -> Spinor {
    [
        v[2] * chi[0] + (v[0] - I * v[1]) * chi[1],
        (v[0] + I * v[1]) * chi[0] - v[2] * chi[1],
    ]
}

#[inline]
fn spinor_scale(s: C64, x: &Spinor) -> Spinor {
    [s * x[0], s * x[1]]
}

#[inline]
fn spinor_inner(x: &Spinor, y: &Spinor) -> C64 {
    x[0].conj() * y[0] + x[1].conj() * y[1]
}

#[inline]
fn spinor_norm_sq(x: &Spinor) -> f64 {
    x[0].norm_sqr() + x[1].norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnePhotonLabel {
    SigmaBPlusVacuum,
    Gamma1,
    /// `(A+)^(i) Omega(a,b)`, Cartesian index `i` in `1..=3`.
    AplusVacuum(usize),
    /// `(H_f + P_f^2)^{-1} (A+)^(i) Omega(a,b)`.
    ResolventAplus(usize),
    /// `(P_f)^(i) Gamma1`.
    PfGamma1(usize),
    /// `(H_f + P_f^2)^{-1} (P_f)^(i) Gamma1`.
    ResolventPfGamma1(usize),
}

impl OnePhotonLabel {
    fn component(&self) -> Option<usize> {
        match *self {
            OnePhotonLabel::AplusVacuum(i)
            | OnePhotonLabel::ResolventAplus(i)
            | OnePhotonLabel::PfGamma1(i)
            | OnePhotonLabel::ResolventPfGamma1(i) => Some(i),
            _ => None,
        }
    }
}

/// A one-photon amplitude: pure closed-form evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePhotonAmplitude {
    pub label: OnePhotonLabel,
    pub spinor: SpinorPair,
    pub cutoff: CutoffProfile,
}

impl OnePhotonAmplitude {
    pub fn new(label: OnePhotonLabel, spinor: SpinorPair, cutoff: &CutoffProfile) -> Result<Self> {
        if let Some(i) = label.component() {
            if !(1..=3).contains(&i) {
                return Err(Error::InvalidInput(format!(
                    "Cartesian component must be 1, 2 or 3, got {i}"
                )));
            }
        }
        Ok(OnePhotonAmplitude {
            label,
            spinor,
            cutoff: cutoff.clone(),
        })
    }

    /// Value at `(k, lambda)`; zero at `k = 0` and outside the cutoff ball.
    pub fn evaluate(&self, k: &Vec3, lambda: usize) -> Spinor {
        let r = norm(k);
        let g = form_factor(&self.cutoff, r);
        if g == 0.0 {
            return [ZERO; 2];
        }
        let eps = polarizations(k)[lambda];
        let chi = self.spinor.as_array();
        let sigma_b = || spinor_scale(-I * g, &sigma_dot_real(&cross(k, &eps), &chi));
        let gamma1 = || spinor_scale(C64::new(-1.0 / star_weight(r), 0.0), &sigma_b());
        match self.label {
            OnePhotonLabel::SigmaBPlusVacuum => sigma_b(),
            OnePhotonLabel::Gamma1 => gamma1(),
            OnePhotonLabel::AplusVacuum(i) => spinor_scale(C64::new(g * eps[i - 1], 0.0), &chi),
            OnePhotonLabel::ResolventAplus(i) => {
                spinor_scale(C64::new(g * eps[i - 1] / star_weight(r), 0.0), &chi)
            }
            OnePhotonLabel::PfGamma1(i) => spinor_scale(C64::new(k[i - 1], 0.0), &gamma1()),
            OnePhotonLabel::ResolventPfGamma1(i) => {
                spinor_scale(C64::new(k[i - 1] / star_weight(r), 0.0), &gamma1())
            }
        }
    }

    /// The four components in the order `(up l1, up l2, down l1, down l2)`.
    pub fn components(&self, k: &Vec3) -> [C64; 4] {
        let l1 = self.evaluate(k, 0);
        let l2 = self.evaluate(k, 1);
        [l1[0], l2[0], l1[1], l2[1]]
    }
}

pub fn sigma_b_plus_vacuum(spinor: SpinorPair, cutoff: &CutoffProfile) -> OnePhotonAmplitude {
    OnePhotonAmplitude {
        label: OnePhotonLabel::SigmaBPlusVacuum,
        spinor,
        cutoff: cutoff.clone(),
    }
}

pub fn gamma1(spinor: SpinorPair, cutoff: &CutoffProfile) -> OnePhotonAmplitude {
    OnePhotonAmplitude {
        label: OnePhotonLabel::Gamma1,
        spinor,
        cutoff: cutoff.clone(),
    }
}

pub fn aplus_vacuum_component(
    i: usize,
    spinor: SpinorPair,
    cutoff: &CutoffProfile,
) -> Result<OnePhotonAmplitude> {
    OnePhotonAmplitude::new(OnePhotonLabel::AplusVacuum(i), spinor, cutoff)
}

pub fn resolvent_aplus_component(
    i: usize,
    spinor: SpinorPair,
    cutoff: &CutoffProfile,
) -> Result<OnePhotonAmplitude> {
    OnePhotonAmplitude::new(OnePhotonLabel::ResolventAplus(i), spinor, cutoff)
}

pub fn pf_gamma1_component(
    i: usize,
    spinor: SpinorPair,
    cutoff: &CutoffProfile,
) -> Result<OnePhotonAmplitude> {
    OnePhotonAmplitude::new(OnePhotonLabel::PfGamma1(i), spinor, cutoff)
}

pub fn resolvent_pf_gamma1_component(
    i: usize,
    spinor: SpinorPair,
    cutoff: &CutoffProfile,
) -> Result<OnePhotonAmplitude> {
    OnePhotonAmplitude::new(OnePhotonLabel::ResolventPfGamma1(i), spinor, cutoff)
}

/// `sum_lambda int_domain w(k) <v(k,lambda), u(k,lambda)> dk`.
pub fn weighted_inner<W: Fn(&Vec3) -> f64>(
    v: &OnePhotonAmplitude,
    u: &OnePhotonAmplitude,
    domain: &RadialDomain,
    weight: W,
    spec: &QuadratureSpec,
) -> Result<Estimate<C64>> {
    if v.cutoff != u.cutoff {
        return Err(Error::InvalidInput(
            "inner products need amplitudes with the same cutoff".into(),
        ));
    }
    let rule = SphereRule::new(spec.angular_order);
    integrate_momentum_with(
        |k| {
            let w = weight(&k);
            let mut acc = ZERO;
            for lambda in 0..2 {
                acc += spinor_inner(&v.evaluate(&k, lambda), &u.evaluate(&k, lambda));
            }
            acc * w
        },
        domain,
        &rule,
        spec,
    )
}

/// `sum_lambda int w(k) |v(k,lambda)|^2 dk`.
pub fn weighted_norm_sq<W: Fn(&Vec3) -> f64>(
    v: &OnePhotonAmplitude,
    domain: &RadialDomain,
    weight: W,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    let rule = SphereRule::new(spec.angular_order);
    integrate_momentum_with(
        |k| {
            let w = weight(&k);
            (0..2)
                .map(|l| spinor_norm_sq(&v.evaluate(&k, l)))
                .sum::<f64>()
                * w
        },
        domain,
        &rule,
        spec,
    )
}

fn star(k: &Vec3) -> f64 {
    star_weight(norm(k))
}

pub fn l2_inner(
    v: &OnePhotonAmplitude,
    u: &OnePhotonAmplitude,
    spec: &QuadratureSpec,
) -> Result<Estimate<C64>> {
    weighted_inner(v, u, &RadialDomain::from_cutoff(&v.cutoff), |_| 1.0, spec)
}

/// `<v, (H_f + P_f^2) u>`.
pub fn star_inner(
    v: &OnePhotonAmplitude,
    u: &OnePhotonAmplitude,
    spec: &QuadratureSpec,
) -> Result<Estimate<C64>> {
    weighted_inner(v, u, &RadialDomain::from_cutoff(&v.cutoff), star, spec)
}

pub fn l2_norm_sq(v: &OnePhotonAmplitude, spec: &QuadratureSpec) -> Result<Estimate<f64>> {
    weighted_norm_sq(v, &RadialDomain::from_cutoff(&v.cutoff), |_| 1.0, spec)
}

pub fn star_norm_sq(v: &OnePhotonAmplitude, spec: &QuadratureSpec) -> Result<Estimate<f64>> {
    weighted_norm_sq(v, &RadialDomain::from_cutoff(&v.cutoff), star, spec)
}

/// Per-(k, lambda) data entering the two-photon source terms.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PhotonNode {
    pub k: Vec3,
    /// `g eps_lambda`
    pub a_vec: [Vec3; 2],
    /// `g k x eps_lambda`; the magnetic amplitude is `-i` times this.
    pub curl: [Vec3; 2],
    pub gamma1: [Spinor; 2],
}

impl PhotonNode {
    pub fn new(k: &Vec3, cutoff: &CutoffProfile, chi: &Spinor) -> Self {
        let r = norm(k);
        let g = form_factor(cutoff, r);
        if g == 0.0 {
            return PhotonNode {
                k: *k,
                a_vec: [[0.0; 3]; 2],
                curl: [[0.0; 3]; 2],
                gamma1: [[ZERO; 2]; 2],
            };
        }
        let eps = polarizations(k);
        let mut node = PhotonNode {
            k: *k,
            a_vec: [[0.0; 3]; 2],
            curl: [[0.0; 3]; 2],
            gamma1: [[ZERO; 2]; 2],
        };
        for l in 0..2 {
            node.a_vec[l] = [g * eps[l][0], g * eps[l][1], g * eps[l][2]];
            let c = cross(k, &eps[l]);
            node.curl[l] = [g * c[0], g * c[1], g * c[2]];
            // Gamma1 = -(-i sigma.curl chi) / w = i sigma.curl chi / w
            let s = sigma_dot_real(&node.curl[l], chi);
            node.gamma1[l] = spinor_scale(I / star_weight(r), &s);
        }
        node
    }
}

/// The three ordered source terms `(sigma.B+ Gamma1, 2 A+.P_f Gamma1, A+.A+ Omega)`
/// with the new photon `x1` and the existing one `x2`, before symmetrization.
#[inline]
pub(crate) fn ordered_terms(
    x1: &PhotonNode,
    l1: usize,
    x2: &PhotonNode,
    l2: usize,
    chi: &Spinor,
) -> [Spinor; 3] {
    let g2 = &x2.gamma1[l2];
    let magnetic = spinor_scale(-I, &sigma_dot_real(&x1.curl[l1], g2));
    let orbital = spinor_scale(C64::new(2.0 * dot(&x1.a_vec[l1], &x2.k), 0.0), g2);
    let pair = spinor_scale(C64::new(dot(&x1.a_vec[l1], &x2.a_vec[l2]), 0.0), chi);
    [magnetic, orbital, pair]
}

#[inline]
fn ordered_sum(x1: &PhotonNode, l1: usize, x2: &PhotonNode, l2: usize, chi: &Spinor) -> Spinor {
    let t = ordered_terms(x1, l1, x2, l2, chi);
    [t[0][0] + t[1][0] + t[2][0], t[0][1] + t[1][1] + t[2][1]]
}

/// `|k1| + |k2| + |k1 + k2|^2`, the two-photon value of `H_f + P_f^2`.
#[inline]
pub fn two_photon_weight(k1: &Vec3, k2: &Vec3) -> f64 {
    let s = [k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]];
    norm(k1) + norm(k2) + dot(&s, &s)
}

/// `Gamma2 = -(H_f + P_f^2)^{-1} (sigma.B+ Gamma1 + 2 A+.P_f Gamma1 + A+.A+ Omega(a,b))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonAmplitude {
    pub spinor: SpinorPair,
    pub cutoff: CutoffProfile,
}

pub fn gamma2(spinor: SpinorPair, cutoff: &CutoffProfile) -> TwoPhotonAmplitude {
    TwoPhotonAmplitude {
        spinor,
        cutoff: cutoff.clone(),
    }
}

impl TwoPhotonAmplitude {
    /// Symmetrized source terms `(t(x1,x2) + t(x2,x1)) / sqrt 2`, one per term.
    pub fn source_terms(&self, k1: &Vec3, l1: usize, k2: &Vec3, l2: usize) -> [Spinor; 3] {
        let chi = self.spinor.as_array();
        let n1 = PhotonNode::new(k1, &self.cutoff, &chi);
        let n2 = PhotonNode::new(k2, &self.cutoff, &chi);
        let a = ordered_terms(&n1, l1, &n2, l2, &chi);
        let b = ordered_terms(&n2, l2, &n1, l1, &chi);
        let mut out = [[ZERO; 2]; 3];
        for t in 0..3 {
            for s in 0..2 {
                out[t][s] = (a[t][s] + b[t][s]) * FRAC_1_SQRT_2;
            }
        }
        out
    }

    pub fn evaluate(&self, k1: &Vec3, l1: usize, k2: &Vec3, l2: usize) -> Spinor {
        let d = two_photon_weight(k1, k2);
        if d == 0.0 {
            return [ZERO; 2];
        }
        let t = self.source_terms(k1, l1, k2, l2);
        let mut out = [ZERO; 2];
        for s in 0..2 {
            out[s] = -(t[0][s] + t[1][s] + t[2][s]) / d;
        }
        out
    }
}

/// `sum_{l1,l2} |S|^2 / D` at one pair of nodes, `S` the symmetrized source.
#[inline]
fn gamma2_star_density(n1: &PhotonNode, n2: &PhotonNode, chi: &Spinor) -> f64 {
    let d = two_photon_weight(&n1.k, &n2.k);
    if d == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for l1 in 0..2 {
        for l2 in 0..2 {
            let a = ordered_sum(n1, l1, n2, l2, chi);
            let b = ordered_sum(n2, l2, n1, l1, chi);
            acc += 0.5 * ((a[0] + b[0]).norm_sqr() + (a[1] + b[1]).norm_sqr());
        }
    }
    acc / d
}

/// Same integral as [`gamma2_star_density`] after using the exchange symmetry
/// of the measure: `(|u(x1,x2)|^2 + Re <u(x1,x2), u(x2,x1)>) / D`, not
/// symmetric pointwise.
#[inline]
fn gamma2_star_density_ordered(n1: &PhotonNode, n2: &PhotonNode, chi: &Spinor) -> f64 {
    let d = two_photon_weight(&n1.k, &n2.k);
    if d == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for l1 in 0..2 {
        for l2 in 0..2 {
            let a = ordered_sum(n1, l1, n2, l2, chi);
            let b = ordered_sum(n2, l2, n1, l1, chi);
            acc += spinor_norm_sq(&a) + spinor_inner(&a, &b).re;
        }
    }
    acc / d
}

/// `||Gamma2||_*^2` by the route [`crate::quadrature::integrate_two_photon`]
/// would choose.
pub fn gamma2_star_norm_sq(
    amp: &TwoPhotonAmplitude,
    spec: &QuadratureSpec,
) -> Result<TwoPhotonEstimate> {
    let domain = RadialDomain::from_cutoff(&amp.cutoff);
    if uses_tensor(&domain, spec)? {
        gamma2_star_norm_sq_tensor(amp, spec, false)
    } else {
        gamma2_star_norm_sq_mc(amp, spec)
    }
}

/// Tensor-rule evaluation; `ordered` selects the unsymmetrized integrand.
pub fn gamma2_star_norm_sq_tensor(
    amp: &TwoPhotonAmplitude,
    spec: &QuadratureSpec,
    ordered: bool,
) -> Result<TwoPhotonEstimate> {
    let domain = RadialDomain::from_cutoff(&amp.cutoff);
    let chi = amp.spinor.as_array();
    tensor_two_photon(
        |rule: &BallRule| {
            let nodes: Vec<PhotonNode> = rule
                .points
                .iter()
                .map(|k| PhotonNode::new(k, &amp.cutoff, &chi))
                .collect();
            if ordered {
                let mut total = crate::quadrature::CompensatedSum::default();
                for i in 0..nodes.len() {
                    let mut row = 0.0;
                    for j in 0..nodes.len() {
                        row += rule.weights[j]
                            * gamma2_star_density_ordered(&nodes[i], &nodes[j], &chi);
                    }
                    total.add(rule.weights[i] * row);
                }
                total.value()
            } else {
                rule.symmetric_pair_sum(|i, j| gamma2_star_density(&nodes[i], &nodes[j], &chi))
            }
        },
        &domain,
        spec,
    )
}

/// Stratified Monte Carlo evaluation.
pub fn gamma2_star_norm_sq_mc(
    amp: &TwoPhotonAmplitude,
    spec: &QuadratureSpec,
) -> Result<TwoPhotonEstimate> {
    let domain = RadialDomain::from_cutoff(&amp.cutoff);
    let chi = amp.spinor.as_array();
    monte_carlo_two_photon(
        |k1, k2| {
            let n1 = PhotonNode::new(k1, &amp.cutoff, &chi);
            let n2 = PhotonNode::new(k2, &amp.cutoff, &chi);
            gamma2_star_density(&n1, &n2, &chi)
        },
        &domain,
        spec,
    )
}

/// `A- Gamma1`: the zero-photon vector with Cartesian components
/// `sum_lambda int g eps_lambda^i Gamma1(k, lambda) dk` in `C^2`.
///
/// Returns the components as `[re up, im up, re down, im down]` for `i = 1, 2, 3`.
pub fn a_minus_gamma1(
    spinor: SpinorPair,
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
) -> Result<Estimate<[f64; 12]>> {
    let chi = spinor.as_array();
    let rule = SphereRule::new(spec.angular_order);
    integrate_momentum_with(
        |k| a_minus_gamma1_density(&k, cutoff, &chi),
        &RadialDomain::from_cutoff(cutoff),
        &rule,
        spec,
    )
}

/// Integrand of [`a_minus_gamma1`] at one momentum, summed over polarizations.
pub fn a_minus_gamma1_density(k: &Vec3, cutoff: &CutoffProfile, chi: &Spinor) -> [f64; 12] {
    let node = PhotonNode::new(k, cutoff, chi);
    let mut out = [0.0; 12];
    for l in 0..2 {
        for i in 0..3 {
            let a = node.a_vec[l][i];
            for s in 0..2 {
                let v = node.gamma1[l][s] * a;
                out[4 * i + 2 * s] += v.re;
                out[4 * i + 2 * s + 1] += v.im;
            }
        }
    }
    out
}
