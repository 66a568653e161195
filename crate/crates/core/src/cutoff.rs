//! Ultraviolet form factors `zeta(|k|)`.
//!
//! Three families are provided:
//!
//! - `sharp`: indicator of `[0, uv_extent]`. Not C¹; it exists so that
//!   coefficient integrals have elementary closed forms.
//! - `smoothed-plateau`: equal to 1 up to `uv_extent - width`, then a cubic
//!   ramp `1 - 3s² + 2s³` down to 0 at `uv_extent`. C¹ everywhere.
//! - `gaussian-bump`: `exp(-r²/2σ²) (1 - (r/Λ)²)²` on `[0, Λ]`, zero beyond.
//!   The polynomial window makes value and slope vanish at `Λ`.
//!
//! A profile with `uv_extent == 0` is identically zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffKind {
    Sharp,
    SmoothedPlateau,
    GaussianBump,
}

impl CutoffKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CutoffKind::Sharp => "sharp",
            CutoffKind::SmoothedPlateau => "smoothed-plateau",
            CutoffKind::GaussianBump => "gaussian-bump",
        }
    }
}

/// Serialized form: `{"kind":"sharp","uv_extent":1.0,"params":[]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffDescriptor {
    pub kind: CutoffKind,
    pub uv_extent: f64,
    #[serde(default)]
    pub params: Vec<f64>,
}

/// A validated ultraviolet cutoff profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CutoffDescriptor", into = "CutoffDescriptor")]
pub struct CutoffProfile {
    kind: CutoffKind,
    uv_extent: f64,
    params: Vec<f64>,
}

impl TryFrom<CutoffDescriptor> for CutoffProfile {
    type Error = Error;

    fn try_from(d: CutoffDescriptor) -> Result<Self> {
        CutoffProfile::new(d.kind, d.uv_extent, d.params)
    }
}

impl From<CutoffProfile> for CutoffDescriptor {
    fn from(p: CutoffProfile) -> Self {
        CutoffDescriptor {
            kind: p.kind,
            uv_extent: p.uv_extent,
            params: p.params,
        }
    }
}

impl CutoffProfile {
    pub fn new(kind: CutoffKind, uv_extent: f64, params: Vec<f64>) -> Result<Self> {
        if !uv_extent.is_finite() || uv_extent < 0.0 {
            return Err(Error::InvalidInput(format!(
                "uv_extent must be finite and nonnegative, got {uv_extent}"
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(
                "cutoff parameters must be finite".into(),
            ));
        }
        match kind {
            CutoffKind::Sharp => {
                if !params.is_empty() {
                    return Err(Error::InvalidInput(
                        "sharp cutoff takes no parameters".into(),
                    ));
                }
            }
            CutoffKind::SmoothedPlateau => match params.as_slice() {
                [w] if *w > 0.0 && *w <= uv_extent => {}
                [w] => {
                    return Err(Error::InvalidInput(format!(
                        "smoothing width must lie in (0, uv_extent], got {w}"
                    )))
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "smoothed-plateau takes exactly one parameter (width)".into(),
                    ))
                }
            },
            CutoffKind::GaussianBump => match params.as_slice() {
                [s] if *s > 0.0 => {}
                [s] => {
                    return Err(Error::InvalidInput(format!(
                        "gaussian width must be positive, got {s}"
                    )))
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "gaussian-bump takes exactly one parameter (sigma)".into(),
                    ))
                }
            },
        }
        Ok(CutoffProfile {
            kind,
            uv_extent,
            params,
        })
    }

    pub fn sharp(uv_extent: f64) -> Result<Self> {
        Self::new(CutoffKind::Sharp, uv_extent, vec![])
    }

    pub fn smoothed_plateau(uv_extent: f64, width: f64) -> Result<Self> {
        Self::new(CutoffKind::SmoothedPlateau, uv_extent, vec![width])
    }

    pub fn gaussian_bump(uv_extent: f64, sigma: f64) -> Result<Self> {
        Self::new(CutoffKind::GaussianBump, uv_extent, vec![sigma])
    }

    /// The identically vanishing profile.
    pub fn zero() -> Self {
        CutoffProfile {
            kind: CutoffKind::Sharp,
            uv_extent: 0.0,
            params: vec![],
        }
    }

    pub fn kind(&self) -> CutoffKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// `sup { r : zeta(r) != 0 }`.
    pub fn support_extent(&self) -> f64 {
        self.uv_extent
    }

    pub fn is_zero(&self) -> bool {
        self.uv_extent == 0.0
    }

    /// Whether the profile is C¹ with compact support. The sharp indicator is not.
    pub fn is_conforming(&self) -> bool {
        self.kind != CutoffKind::Sharp
    }

    /// Points in `(0, uv_extent)` where the profile is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            CutoffKind::SmoothedPlateau if !self.is_zero() => {
                let start = self.uv_extent - self.params[0];
                if start > 0.0 {
                    vec![start]
                } else {
                    vec![]
                }
            }
            _ => vec![],
        }
    }

    /// Evaluates `zeta(r)`; negative `r` is a domain error.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::Domain(format!("cutoff evaluated at r = {r}")));
        }
        Ok(self.value(r))
    }

    /// Unchecked evaluation for `r >= 0`, used in quadrature inner loops.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        let extent = self.uv_extent;
        if extent == 0.0 || r > extent {
            return 0.0;
        }
        match self.kind {
            CutoffKind::Sharp => 1.0,
            CutoffKind::SmoothedPlateau => {
                let width = self.params[0];
                let start = extent - width;
                if r <= start {
                    1.0
                } else {
                    let s = (r - start) / width;
                    1.0 - s * s * (3.0 - 2.0 * s)
                }
            }
            CutoffKind::GaussianBump => {
                let sigma = self.params[0];
                let x = r / extent;
                let window = 1.0 - x * x;
                (-0.5 * r * r / (sigma * sigma)).exp() * window * window
            }
        }
    }

    pub fn descriptor(&self) -> CutoffDescriptor {
        self.clone().into()
    }

    /// Short human-readable label, e.g. `sharp(1)`.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            format!("{}({})", self.kind.as_str(), self.uv_extent)
        } else {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            format!(
                "{}({};{})",
                self.kind.as_str(),
                self.uv_extent,
                ps.join(",")
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_profiles() -> Vec<CutoffProfile> {
        vec![
            CutoffProfile::sharp(1.0).unwrap(),
            CutoffProfile::smoothed_plateau(1.0, 0.1).unwrap(),
            CutoffProfile::smoothed_plateau(2.0, 2.0).unwrap(),
            CutoffProfile::gaussian_bump(2.5, 1.0).unwrap(),
            CutoffProfile::zero(),
        ]
    }

    #[test]
    fn sharp_values() {
        let p = CutoffProfile::sharp(1.0).unwrap();
        assert_eq!(p.evaluate(0.5).unwrap(), 1.0);
        assert_eq!(p.evaluate(2.0).unwrap(), 0.0);
        assert!(!p.is_conforming());
    }

    #[test]
    fn negative_radius_is_domain_error() {
        let p = CutoffProfile::sharp(1.0).unwrap();
        assert!(matches!(p.evaluate(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn smoothed_ramp_interior_and_monotone() {
        let p = CutoffProfile::smoothed_plateau(1.0, 0.1).unwrap();
        // s = 0.7: 1 - 3(0.49) + 2(0.343) = 0.216
        let v = p.evaluate(0.97).unwrap();
        assert!((v - 0.216).abs() < 1e-12);
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(p.evaluate(0.9).unwrap(), 1.0);
        assert_eq!(p.evaluate(1.0).unwrap(), 0.0);
        let mid = p.evaluate(0.95).unwrap();
        assert!((mid - 0.5).abs() < 1e-12);
        let n = 2000;
        let mut prev = p.value(0.9);
        for i in 1..=n {
            let r = 0.9 + 0.1 * i as f64 / n as f64;
            let v = p.value(r);
            assert!(v < prev, "not strictly decreasing at r = {r}");
            prev = v;
        }
    }

    #[test]
    fn support_extents() {
        assert_eq!(CutoffProfile::sharp(1.0).unwrap().support_extent(), 1.0);
        assert_eq!(
            CutoffProfile::gaussian_bump(2.5, 1.0)
                .unwrap()
                .support_extent(),
            2.5
        );
        assert_eq!(
            CutoffProfile::smoothed_plateau(1.0, 0.1)
                .unwrap()
                .support_extent(),
            1.0
        );
    }

    #[test]
    fn c1_profiles_have_consistent_difference_quotients() {
        // Central differences at h and h/2 must agree to O(h) when the
        // derivative exists; a jump would make them diverge like 1/h.
        for p in [
            CutoffProfile::smoothed_plateau(1.0, 0.1).unwrap(),
            CutoffProfile::gaussian_bump(2.5, 1.0).unwrap(),
        ] {
            let h = 1e-4;
            let extent = p.support_extent();
            for i in 1..400 {
                let r = extent * i as f64 / 399.0;
                let d1 = (p.value(r + h) - p.value((r - h).max(0.0))) / (2.0 * h);
                let d2 = (p.value(r + h / 2.0) - p.value((r - h / 2.0).max(0.0))) / h;
                assert!(
                    (d1 - d2).abs() < 0.05,
                    "{} at r={r}: {d1} vs {d2}",
                    p.label()
                );
            }
        }
        // Control: the sharp indicator fails the same check at its edge.
        let s = CutoffProfile::sharp(1.0).unwrap();
        let h = 1e-4;
        let r = 1.0 + h / 4.0;
        let d1 = (s.value(r + h) - s.value(r - h)) / (2.0 * h);
        let d2 = (s.value(r + h / 2.0) - s.value(r - h / 2.0)) / h;
        assert!((d1 - d2).abs() > 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CutoffProfile::sharp(-1.0).is_err());
        assert!(CutoffProfile::smoothed_plateau(1.0, 0.0).is_err());
        assert!(CutoffProfile::smoothed_plateau(1.0, 1.5).is_err());
        assert!(CutoffProfile::gaussian_bump(1.0, -2.0).is_err());
        assert!(CutoffProfile::new(CutoffKind::Sharp, 1.0, vec![0.3]).is_err());
    }

    #[test]
    fn json_fragment_round_trip_and_unknown_kind() {
        let p: CutoffProfile =
            serde_json::from_str(r#"{"kind":"sharp","uv_extent":1.0,"params":[]}"#).unwrap();
        assert_eq!(p, CutoffProfile::sharp(1.0).unwrap());
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"kind":"sharp","uv_extent":1.0,"params":[]}"#
        );
        let q: CutoffProfile =
            serde_json::from_str(r#"{"kind":"smoothed-plateau","uv_extent":1.0,"params":[0.1]}"#)
                .unwrap();
        assert_eq!(q.kind(), CutoffKind::SmoothedPlateau);
        assert!(serde_json::from_str::<CutoffProfile>(
            r#"{"kind":"lorentzian","uv_extent":1.0,"params":[]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<CutoffProfile>(
            r#"{"kind":"sharp","uv_extent":1.0,"params":[],"extra":1}"#
        )
        .is_err());
        assert!(serde_json::from_str::<CutoffProfile>(
            r#"{"kind":"smoothed-plateau","uv_extent":1.0,"params":[]}"#
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn values_in_unit_interval_and_compact(r in 0.0f64..10.0, i in 0usize..5) {
            let p = &all_profiles()[i];
            let v = p.evaluate(r).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            if r > p.support_extent() {
                prop_assert_eq!(v, 0.0);
            }
            // Pure function: bit-identical on repetition.
            prop_assert_eq!(v.to_bits(), p.evaluate(r).unwrap().to_bits());
        }
    }
}
