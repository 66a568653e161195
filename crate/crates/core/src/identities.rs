//! Numerical certification of the vanishing inner products between one-photon
//! amplitudes and of the exact scaling laws of `Gamma1`, `A- Gamma1` and
//! `Gamma2` in the spinor.
//!
//! Every vanishing family comes with a negative control: a nearby product that
//! does not vanish, evaluated with the same rules. A control that comes out
//! zero means the quadrature cannot tell the identity from noise, and the
//! control fails.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{
    self, aplus_vacuum_component, gamma1, gamma2, pf_gamma1_component, resolvent_aplus_component,
    resolvent_pf_gamma1_component, star_weight, weighted_inner, weighted_norm_sq,
    OnePhotonAmplitude, SpinorPair,
};
use crate::cutoff::CutoffProfile;
use crate::error::{Error, Result};
use crate::quadrature::{QuadratureSpec, RadialDomain};
use crate::vec3::norm;
use crate::{Vec3, C64};

/// Relative size a negative control must exceed.
pub const CONTROL_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// `|value| <= tolerance * scale`.
    Vanishes,
    /// `|value| > CONTROL_THRESHOLD * scale` (negative control).
    NonZero,
    /// `value` is a deviation `|lhs - rhs|`; `<= tolerance * scale`.
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub family: String,
    pub name: String,
    pub parameters: String,
    pub value: f64,
    pub reference_scale: f64,
    pub tolerance: f64,
    pub expectation: Expectation,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl IdentityReport {
    fn judged(
        family: &str,
        name: String,
        parameters: String,
        value: f64,
        scale: f64,
        tolerance: f64,
        expectation: Expectation,
    ) -> Self {
        let status = if !(value.is_finite() && scale.is_finite()) {
            Status::Inconclusive
        } else {
            let ok = match expectation {
                Expectation::Vanishes | Expectation::Equal => value.abs() <= tolerance * scale,
                Expectation::NonZero => value.abs() > CONTROL_THRESHOLD * scale,
            };
            if ok {
                Status::Pass
            } else {
                Status::Fail
            }
        };
        IdentityReport {
            family: family.to_string(),
            name,
            parameters,
            value,
            reference_scale: scale,
            tolerance,
            expectation,
            status,
            message: None,
        }
    }

    fn inconclusive(
        family: &str,
        name: String,
        parameters: String,
        tolerance: f64,
        e: &Error,
    ) -> Self {
        IdentityReport {
            family: family.to_string(),
            name,
            parameters,
            value: f64::NAN,
            reference_scale: f64::NAN,
            tolerance,
            expectation: Expectation::Vanishes,
            status: Status::Inconclusive,
            message: Some(e.to_string()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn all_passed(reports: &[IdentityReport]) -> bool {
    !reports.is_empty() && reports.iter().all(IdentityReport::passed)
}

/// Fixed-width text table, one line per report.
pub fn render_table(reports: &[IdentityReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<6} {:<14} {:<34} {:>12} {:>12} {:>8}",
        "status", "family", "name", "value", "scale", "tol"
    );
    for r in reports {
        let status = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONC",
        };
        let _ = writeln!(
            s,
            "{:<6} {:<14} {:<34} {:>12.3e} {:>12.3e} {:>8.0e}",
            status, r.family, r.name, r.value, r.reference_scale, r.tolerance
        );
    }
    s
}

fn spinor_label(s: &SpinorPair) -> String {
    let [a, b] = s.as_array();
    format!("({:.4}{:+.4}i, {:.4}{:+.4}i)", a.re, a.im, b.re, b.im)
}

/// `count` unit spinors: `(1,0)`, `(0,1)`, then seeded random ones.
pub fn spinor_samples(count: usize, seed: u64) -> Vec<SpinorPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![SpinorPair::up(), SpinorPair::down()];
    while out.len() < count {
        let mut c = || {
            C64::new(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            )
        };
        let s = SpinorPair::new(c(), c());
        if let Ok(s) = s.normalized() {
            out.push(s);
        }
    }
    out.truncate(count);
    out
}

/// Pairs `(tilde, plain)`: `(down, up)`, `(up, up)`, then consecutive samples.
pub fn spinor_pairs(samples: &[SpinorPair]) -> Vec<(SpinorPair, SpinorPair)> {
    let mut out = vec![
        (SpinorPair::down(), SpinorPair::up()),
        (SpinorPair::up(), SpinorPair::up()),
    ];
    let n = samples.len();
    for k in 0..n {
        out.push((samples[k], samples[(k + 1) % n]));
    }
    out
}

/// `<v, w u>` over `domain` with the reference scale `||v||_|w| ||u||_|w|`.
fn product(
    v: &OnePhotonAmplitude,
    u: &OnePhotonAmplitude,
    domain: &RadialDomain,
    weight: &dyn Fn(&Vec3) -> f64,
    spec: &QuadratureSpec,
) -> Result<(C64, f64)> {
    let ip = weighted_inner(v, u, domain, weight, spec)?;
    let nv = weighted_norm_sq(v, domain, |k| weight(k).abs(), spec)?;
    let nu = weighted_norm_sq(u, domain, |k| weight(k).abs(), spec)?;
    Ok((ip.value, (nv.value * nu.value).sqrt()))
}

type Amp<'a> = Box<dyn Fn(usize, SpinorPair) -> Result<OnePhotonAmplitude> + 'a>;
type IndexedWeight<'a> = Box<dyn Fn(usize, &Vec3) -> f64 + 'a>;

/// One vanishing product `<left_i(tilde), w_i right_i(plain)>`, i = 1..3, and
/// its non-vanishing control built the same way.
struct Family<'a> {
    family: &'static str,
    name: &'static str,
    left: Amp<'a>,
    right: Amp<'a>,
    weight: IndexedWeight<'a>,
    control_left: Amp<'a>,
    control_right: Amp<'a>,
    control_weight: IndexedWeight<'a>,
    domain: RadialDomain,
    /// Judge `sum_i` instead of each `i`.
    summed: bool,
}

fn run_family(
    f: &Family<'_>,
    pairs: &[(SpinorPair, SpinorPair)],
    spec: &QuadratureSpec,
    tol: f64,
    out: &mut Vec<IdentityReport>,
) {
    let eval = |left: &Amp<'_>, right: &Amp<'_>, w: &IndexedWeight<'_>, i, t, s| {
        let v = left(i, t)?;
        let u = right(i, s)?;
        product(&v, &u, &f.domain, &|k: &Vec3| w(i, k), spec)
    };
    let mut control: Option<(f64, f64)> = None;
    let mut control_err: Option<Error> = None;
    for (t, s) in pairs {
        let params = format!("tilde={} plain={}", spinor_label(t), spinor_label(s));
        let mut sum = Ok((C64::new(0.0, 0.0), 0.0));
        for i in 1..=3 {
            let r = eval(&f.left, &f.right, &f.weight, i, *t, *s);
            if f.summed {
                sum = match (sum, r) {
                    (Ok((a, sa)), Ok((b, sb))) => Ok((a + b, sa + sb)),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                };
            } else {
                let name = format!("{} i={i}", f.name);
                out.push(match r {
                    Ok((v, scale)) => IdentityReport::judged(
                        f.family,
                        name,
                        params.clone(),
                        v.norm(),
                        scale,
                        tol,
                        Expectation::Vanishes,
                    ),
                    Err(e) => IdentityReport::inconclusive(f.family, name, params.clone(), tol, &e),
                });
            }
            match eval(
                &f.control_left,
                &f.control_right,
                &f.control_weight,
                i,
                *t,
                *s,
            ) {
                Ok((v, scale)) if scale > 0.0 => {
                    let better = control.is_none_or(|(b, bs)| v.norm() / scale > b / bs);
                    if better {
                        control = Some((v.norm(), scale));
                    }
                }
                Ok(_) => {}
                Err(e) => control_err = Some(e),
            }
        }
        if f.summed {
            let name = format!("{} sum_i", f.name);
            out.push(match sum {
                Ok((v, scale)) => IdentityReport::judged(
                    f.family,
                    name,
                    params,
                    v.norm(),
                    scale,
                    tol,
                    Expectation::Vanishes,
                ),
                Err(e) => IdentityReport::inconclusive(f.family, name, params, tol, &e),
            });
        }
    }
    let name = format!("{} control", f.name);
    let params = format!("max over {} spinor pairs and i", pairs.len());
    out.push(match (control, control_err) {
        (_, Some(e)) => IdentityReport::inconclusive(f.family, name, params, tol, &e),
        (Some((v, scale)), None) => {
            IdentityReport::judged(f.family, name, params, v, scale, tol, Expectation::NonZero)
        }
        (None, None) => {
            IdentityReport::judged(f.family, name, params, 0.0, 0.0, tol, Expectation::NonZero)
        }
    });
}

/// Vanishing products between one-photon amplitudes over the spinor pairs,
/// each family followed by its negative control. `ir_alpha` is the infrared
/// threshold of the restricted `Lambda`-`Upsilon` product.
///
/// Families (tilde spinor on the left):
/// - `ra_rpg`: `<R A+_i Omega, R P_f^i Gamma1>_*`; control shifts the `A` index.
/// - `g1_pg1`: `<Gamma1, P_f^i Gamma1>` plain and star; control uses `|k_i|`.
/// - `a_g1`: `<A+_i Omega, Gamma1>`; control weights by `|k| k_{i+1}`.
/// - `pa_lambda`: `sum_i <A+_i Omega, R P_f^i Gamma1>`; control shifts the index.
/// - `lambda_upsilon`: `sum_i <R P_f^i Gamma1, R A+_i Omega>_*` over `|k| > alpha`;
///   control shifts the index.
pub fn verify_orthogonality_suite(
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
    samples: &[SpinorPair],
    tol: f64,
    ir_alpha: f64,
) -> Result<Vec<IdentityReport>> {
    if samples.is_empty() {
        return Err(Error::InvalidInput(
            "need at least one spinor sample".into(),
        ));
    }
    if cutoff.is_zero() {
        return Err(Error::InvalidInput(
            "identities are trivial for the zero cutoff".into(),
        ));
    }
    if !(tol > 0.0) || !(ir_alpha > 0.0) {
        return Err(Error::InvalidInput(
            "tolerance and alpha must be positive".into(),
        ));
    }
    let pairs = spinor_pairs(samples);
    let full = RadialDomain::from_cutoff(cutoff);
    let c = cutoff;
    let next = |i: usize| i % 3 + 1;
    let star = |_: usize, k: &Vec3| star_weight(norm(k));
    let plain = |_: usize, _: &Vec3| 1.0;
    let g1 = move |_: usize, s: SpinorPair| Ok(gamma1(s, c));
    let ra = move |i: usize, s: SpinorPair| resolvent_aplus_component(i, s, c);
    let rpg = move |i: usize, s: SpinorPair| resolvent_pf_gamma1_component(i, s, c);
    let pg = move |i: usize, s: SpinorPair| pf_gamma1_component(i, s, c);
    let a = move |i: usize, s: SpinorPair| aplus_vacuum_component(i, s, c);

    let families = [
        Family {
            family: "ra_rpg",
            name: "star",
            left: Box::new(ra),
            right: Box::new(rpg),
            weight: Box::new(star),
            control_left: Box::new(move |i, s| ra(next(i), s)),
            control_right: Box::new(rpg),
            control_weight: Box::new(star),
            domain: full.clone(),
            summed: false,
        },
        Family {
            family: "g1_pg1",
            name: "plain",
            left: Box::new(g1),
            right: Box::new(pg),
            weight: Box::new(plain),
            control_left: Box::new(g1),
            control_right: Box::new(g1),
            control_weight: Box::new(|i, k: &Vec3| k[i - 1].abs()),
            domain: full.clone(),
            summed: false,
        },
        Family {
            family: "g1_pg1",
            name: "star",
            left: Box::new(g1),
            right: Box::new(pg),
            weight: Box::new(star),
            control_left: Box::new(g1),
            control_right: Box::new(g1),
            control_weight: Box::new(|i, k: &Vec3| k[i - 1].abs() * star_weight(norm(k))),
            domain: full.clone(),
            summed: false,
        },
        Family {
            family: "a_g1",
            name: "plain",
            left: Box::new(a),
            right: Box::new(g1),
            weight: Box::new(plain),
            control_left: Box::new(a),
            control_right: Box::new(g1),
            control_weight: Box::new(move |i, k: &Vec3| norm(k) * k[next(i) - 1]),
            domain: full.clone(),
            summed: false,
        },
        Family {
            family: "pa_lambda",
            name: "plain",
            left: Box::new(a),
            right: Box::new(rpg),
            weight: Box::new(plain),
            control_left: Box::new(a),
            control_right: Box::new(move |i, s| rpg(next(i), s)),
            control_weight: Box::new(plain),
            domain: full.clone(),
            summed: true,
        },
        Family {
            family: "lambda_upsilon",
            name: "star",
            left: Box::new(rpg),
            right: Box::new(ra),
            weight: Box::new(star),
            control_left: Box::new(rpg),
            control_right: Box::new(move |i, s| ra(next(i), s)),
            control_weight: Box::new(star),
            domain: full.above(ir_alpha),
            summed: true,
        },
    ];
    let mut out = vec![];
    for f in &families {
        run_family(f, &pairs, spec, tol, &mut out);
    }
    Ok(out)
}

/// A spinor field sampled at finitely many sites: `(site weight, spinor)`.
pub type SpinorField = Vec<(f64, SpinorPair)>;

fn field_norm_sq(g: &SpinorField) -> f64 {
    g.iter().map(|(w, s)| w * s.norm_sq()).sum()
}

/// Single site `(1, (1,0))` and a two-site field with seeded random spinors.
pub fn default_fields(seed: u64) -> Vec<SpinorField> {
    let s = spinor_samples(4, seed);
    vec![
        vec![(1.0, SpinorPair::up())],
        vec![
            (0.7, s[2].scaled(C64::new(1.3, -0.4))),
            (1.9, s[3].scaled(C64::new(0.2, 0.8))),
        ],
    ]
}

fn relative(lhs: f64, rhs: f64) -> (f64, f64) {
    ((lhs - rhs).abs(), lhs.abs().max(rhs.abs()))
}

/// Exact scaling identities of the amplitudes in the spinor.
pub fn verify_scaling_suite(
    cutoff: &CutoffProfile,
    spec: &QuadratureSpec,
    fields: &[SpinorField],
    tol: f64,
    seed: u64,
) -> Result<Vec<IdentityReport>> {
    if fields.is_empty() || fields.iter().any(|g| g.is_empty()) {
        return Err(Error::InvalidInput(
            "need at least one non-empty spinor field".into(),
        ));
    }
    if fields
        .iter()
        .flatten()
        .any(|(w, _)| !(*w > 0.0 && w.is_finite()))
    {
        return Err(Error::InvalidInput("site weights must be positive".into()));
    }
    if cutoff.is_zero() {
        return Err(Error::InvalidInput(
            "identities are trivial for the zero cutoff".into(),
        ));
    }
    let mut out = vec![];
    let fam = "scaling";
    let star_ref = amplitudes::star_norm_sq(&gamma1(SpinorPair::up(), cutoff), spec)?.value;
    let l2_ref = amplitudes::l2_norm_sq(&gamma1(SpinorPair::up(), cutoff), spec)?.value;
    let am_ref = crate::coefficients::a_minus_gamma1_norm_sq(cutoff, spec)?.value;
    // Cauchy-Schwarz scale for the (vanishing) A- Gamma1 norms.
    let am_scale =
        (crate::coefficients::normal_ordering_constant(cutoff, spec)?.value * l2_ref).sqrt();

    // Spinor independence of ||Gamma1||_* for unit spinors.
    for s in spinor_samples(4, seed) {
        let v = amplitudes::star_norm_sq(&gamma1(s, cutoff), spec)?.value;
        let (d, sc) = relative(v.sqrt(), star_ref.sqrt());
        out.push(IdentityReport::judged(
            fam,
            "star norm spinor-independent".into(),
            spinor_label(&s),
            d,
            sc,
            tol,
            Expectation::Equal,
        ));
    }

    for (n, g) in fields.iter().enumerate() {
        let gn = field_norm_sq(g).sqrt();
        let params = format!("field {n} ({} sites, |g|={gn:.6})", g.len());
        let mut star_sq = 0.0;
        let mut l2_sq = 0.0;
        let mut am_sq = 0.0;
        for (w, s) in g {
            star_sq += w * amplitudes::star_norm_sq(&gamma1(*s, cutoff), spec)?.value;
            l2_sq += w * amplitudes::l2_norm_sq(&gamma1(*s, cutoff), spec)?.value;
            am_sq += w * crate::coefficients::a_minus_gamma1_norm_sq_for(*s, cutoff, spec)?.value;
        }
        let (d, sc) = relative(star_sq.sqrt(), star_ref.sqrt() * gn);
        out.push(IdentityReport::judged(
            fam,
            "star norm of field".into(),
            params.clone(),
            d,
            sc,
            tol,
            Expectation::Equal,
        ));
        let (d, sc) = relative(l2_sq.sqrt(), l2_ref.sqrt() * gn);
        out.push(IdentityReport::judged(
            fam,
            "L2 norm of field".into(),
            params.clone(),
            d,
            sc,
            tol,
            Expectation::Equal,
        ));
        let (d, _) = relative(am_sq.sqrt(), am_ref.sqrt() * gn);
        out.push(IdentityReport::judged(
            fam,
            "A- Gamma1 norm of field".into(),
            params.clone(),
            d,
            am_scale * gn,
            tol,
            Expectation::Equal,
        ));
    }

    // Linearity g -> Gamma1(g) and homogeneity of Gamma2, at sampled points.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let ext = cutoff.support_extent();
    let mut point = || -> Vec3 {
        loop {
            let k = [
                (rng.random::<f64>() * 2.0 - 1.0) * ext,
                (rng.random::<f64>() * 2.0 - 1.0) * ext,
                (rng.random::<f64>() * 2.0 - 1.0) * ext,
            ];
            if norm(&k) < ext && norm(&k) > 1e-3 * ext {
                return k;
            }
        }
    };
    let s = spinor_samples(6, seed);
    let (c1, c2) = (C64::new(0.6, -1.1), C64::new(-0.3, 0.45));
    let combo = SpinorPair::new(
        c1 * s[2].as_array()[0] + c2 * s[3].as_array()[0],
        c1 * s[2].as_array()[1] + c2 * s[3].as_array()[1],
    );
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for _ in 0..64 {
        let k = point();
        for l in 0..2 {
            let lhs = gamma1(combo, cutoff).evaluate(&k, l);
            let a = gamma1(s[2], cutoff).evaluate(&k, l);
            let b = gamma1(s[3], cutoff).evaluate(&k, l);
            for m in 0..2 {
                let rhs = c1 * a[m] + c2 * b[m];
                dev = dev.max((lhs[m] - rhs).norm());
                scale = scale.max(lhs[m].norm().max(rhs.norm()));
            }
        }
    }
    out.push(IdentityReport::judged(
        fam,
        "Gamma1 linear in spinor".into(),
        "64 points, 2 polarizations".into(),
        dev,
        scale,
        tol,
        Expectation::Equal,
    ));

    let mu = C64::new(-0.8, 1.7);
    let base = gamma2(s[4], cutoff);
    let scaled = gamma2(s[4].scaled(mu), cutoff);
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for _ in 0..64 {
        let (k1, k2) = (point(), point());
        for (l1, l2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let lhs = scaled.evaluate(&k1, l1, &k2, l2);
            let rhs = base.evaluate(&k1, l1, &k2, l2);
            for m in 0..2 {
                dev = dev.max((lhs[m] - mu * rhs[m]).norm());
                scale = scale.max(lhs[m].norm());
            }
        }
    }
    out.push(IdentityReport::judged(
        fam,
        "Gamma2 homogeneous in spinor".into(),
        format!("mu={mu}, 64 point pairs"),
        dev,
        scale,
        tol,
        Expectation::Equal,
    ));
    Ok(out)
}
