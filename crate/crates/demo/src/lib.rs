//! WebAssembly bindings behind `www/index.html`.
//!
//! The plain functions return Rust values and are what the native tests
//! exercise; the `#[wasm_bindgen]` wrappers hand them to JavaScript as typed
//! arrays or JSON strings. Only the cheap radial quantities are exposed: the
//! two-photon coefficient and the fiber eigensolve are too slow for a page.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use pf_core::coefficients::{
    binding_orbital_coefficient, binding_zeeman_coefficient, gamma1_l2_norm_sq_radial,
    gamma1_star_norm_sq_radial, normal_ordering_constant,
};
use pf_core::cutoff::{CutoffKind, CutoffProfile};
use pf_core::quadrature::QuadratureSpec;
use pf_core::trial::{binding_sweep, TrialStateReport};

pub fn profile(kind: &str, uv_extent: f64, param: f64) -> Result<CutoffProfile, String> {
    let (kind, params) = match kind {
        "sharp" => (CutoffKind::Sharp, vec![]),
        "smoothed-plateau" => (CutoffKind::SmoothedPlateau, vec![param]),
        "gaussian-bump" => (CutoffKind::GaussianBump, vec![param]),
        other => return Err(format!("unknown cutoff kind {other:?}")),
    };
    let c = CutoffProfile::new(kind, uv_extent, params).map_err(|e| e.to_string())?;
    if c.is_zero() {
        return Err("cutoff has empty support".into());
    }
    Ok(c)
}

/// `points` samples of `zeta` on `[0, 1.25 uv_extent]`, interleaved `r, zeta(r)`.
pub fn sample_cutoff(c: &CutoffProfile, points: usize) -> Vec<f64> {
    let n = points.max(2);
    let top = 1.25 * c.support_extent();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let r = top * i as f64 / (n - 1) as f64;
        out.push(r);
        out.push(c.value(r));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficients {
    pub c_no: f64,
    pub f_orbital: f64,
    pub f_zeeman: f64,
    /// `F_orbital + F_zeeman`, the alpha^3 binding coefficient.
    pub alpha3: f64,
    pub gamma1_star_sq: f64,
    pub gamma1_l2_sq: f64,
}

pub fn radial_coefficients(c: &CutoffProfile) -> Result<Coefficients, String> {
    let s = QuadratureSpec::default();
    let v = |r: pf_core::error::Result<pf_core::quadrature::Estimate<f64>>| {
        r.map(|e| e.value).map_err(|e| e.to_string())
    };
    let f_orbital = v(binding_orbital_coefficient(c, &s))?;
    let f_zeeman = v(binding_zeeman_coefficient(c, &s))?;
    Ok(Coefficients {
        c_no: v(normal_ordering_constant(c, &s))?,
        f_orbital,
        f_zeeman,
        alpha3: f_orbital + f_zeeman,
        gamma1_star_sq: v(gamma1_star_norm_sq_radial(c, &s))?,
        gamma1_l2_sq: v(gamma1_l2_norm_sq_radial(c, &s))?,
    })
}

pub fn sweep(c: &CutoffProfile, alphas: &[f64]) -> Result<Vec<TrialStateReport>, String> {
    binding_sweep(c, alphas, &QuadratureSpec::default()).map_err(|e| e.to_string())
}

fn js_err(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen]
pub fn cutoff_curve(
    kind: &str,
    uv_extent: f64,
    param: f64,
    points: usize,
) -> Result<Vec<f64>, JsValue> {
    Ok(sample_cutoff(
        &profile(kind, uv_extent, param).map_err(js_err)?,
        points,
    ))
}

/// JSON object with the fields of [`Coefficients`].
#[wasm_bindgen]
pub fn coefficients(kind: &str, uv_extent: f64, param: f64) -> Result<String, JsValue> {
    let c = profile(kind, uv_extent, param).map_err(js_err)?;
    let r = radial_coefficients(&c).map_err(js_err)?;
    Ok(serde_json::to_string(&r).expect("plain struct serializes"))
}

/// JSON array of trial-state reports, one per coupling.
#[wasm_bindgen]
pub fn binding(
    kind: &str,
    uv_extent: f64,
    param: f64,
    alphas: Vec<f64>,
) -> Result<String, JsValue> {
    let c = profile(kind, uv_extent, param).map_err(js_err)?;
    let r = sweep(&c, &alphas).map_err(js_err)?;
    Ok(serde_json::to_string(&r).expect("reports serialize"))
}
