//! Poincaré-disc primitives.
//!
//! Normalization: `p(a, b) = artanh |(a - b) / (1 - conj(b) a)|`, without the
//! factor one half. The matching infinitesimal form is `|v| / (1 - |a|^2)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// A point of the open unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "C64", into = "C64")]
pub struct UnitDiscPoint(C64);

impl UnitDiscPoint {
    pub fn new(value: C64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite(format!("{value}")));
        }
        if value.norm_sqr() >= 1.0 {
            return Err(Error::OutsideDisc(format!("{value}")));
        }
        Ok(Self(value))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(C64::new(x, 0.0))
    }

    pub fn value(self) -> C64 {
        self.0
    }
}

impl TryFrom<C64> for UnitDiscPoint {
    type Error = Error;
    fn try_from(value: C64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<UnitDiscPoint> for C64 {
    fn from(p: UnitDiscPoint) -> C64 {
        p.0
    }
}

/// `λ ↦ rotation · (λ - center) / (1 - conj(center) λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscAutomorphism {
    rotation: C64,
    center: C64,
}

impl DiscAutomorphism {
    pub fn new(rotation: C64, center: C64) -> Result<Self> {
        if (rotation.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular(format!("{rotation}")));
        }
        if center.norm_sqr() >= 1.0 || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::OutsideDisc(format!("{center}")));
        }
        Ok(Self { rotation, center })
    }

    pub fn identity() -> Self {
        Self { rotation: C64::new(1.0, 0.0), center: C64::new(0.0, 0.0) }
    }

    /// The automorphism sending `center` to zero with positive derivative there.
    pub fn to_origin(center: C64) -> Result<Self> {
        Self::new(C64::new(1.0, 0.0), center)
    }

    pub fn rotation(&self) -> C64 {
        self.rotation
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    pub fn apply(&self, lambda: C64) -> C64 {
        self.rotation * (lambda - self.center) / (1.0 - self.center.conj() * lambda)
    }

    pub fn derivative(&self, lambda: C64) -> C64 {
        let d = 1.0 - self.center.conj() * lambda;
        self.rotation * (1.0 - self.center.norm_sqr()) / (d * d)
    }

    /// `μ ↦ conj(rotation)·μ` followed by the Möbius map centered at `-rotation·center`.
    pub fn inverse(&self) -> Self {
        // a(λ) = r (λ - c)/(1 - c̄ λ)  ⇒  a⁻¹(μ) = (r̄μ + c)/(1 + c̄ r̄ μ)
        //                              = r̄ (μ - (-r c)) / (1 - conj(-r c) μ)
        Self { rotation: self.rotation.conj(), center: -self.rotation * self.center }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let center = other.inverse().apply(self.inverse().apply(C64::new(0.0, 0.0)));
        let probe = if (center - 0.5).norm() > 0.25 { C64::new(0.5, 0.0) } else { C64::new(-0.5, 0.0) };
        let value = self.apply(other.apply(probe));
        let rotation = value * (1.0 - center.conj() * probe) / (probe - center);
        Self { rotation: rotation / rotation.norm(), center }
    }
}

/// `|(a - b) / (1 - conj(b) a)|`.
pub fn mobius_modulus(a: C64, b: C64) -> f64 {
    ((a - b) / (1.0 - b.conj() * a)).norm()
}

/// Poincaré distance on raw complex numbers; callers guarantee `|a|, |b| < 1`.
pub fn poincare_distance_raw(a: C64, b: C64) -> f64 {
    let num = (a - b).norm_sqr();
    if num == 0.0 {
        return 0.0;
    }
    let den = (1.0 - b.conj() * a).norm_sqr();
    let x = (num / den).sqrt().min(1.0);
    // 1 - x^2 computed without cancellation.
    let one_minus = (1.0 - a.norm_sqr()) * (1.0 - b.norm_sqr()) / den;
    if one_minus <= 0.0 {
        return f64::INFINITY;
    }
    (1.0 + x).ln() - 0.5 * one_minus.ln()
}

pub fn poincare_distance(a: UnitDiscPoint, b: UnitDiscPoint) -> f64 {
    poincare_distance_raw(a.0, b.0)
}

pub fn poincare_metric_raw(a: C64, v: C64) -> f64 {
    v.norm() / (1.0 - a.norm_sqr())
}

pub fn poincare_metric(a: UnitDiscPoint, v: C64) -> f64 {
    poincare_metric_raw(a.0, v)
}

/// Inverse of [`poincare_distance`] from the origin: the radius `r` with `p(0, r) = d`.
pub fn tanh_radius(d: f64) -> f64 {
    d.tanh()
}

/// Checks the Schwarz–Pick contraction `p(h(a), h(b)) <= p(a, b) + 1e-9` on every pair.
pub fn schwarz_pick_check<H>(h: H, pairs: &[(UnitDiscPoint, UnitDiscPoint)]) -> bool
where
    H: Fn(C64) -> C64,
{
    pairs.iter().all(|&(a, b)| {
        let (ha, hb) = (h(a.0), h(b.0));
        if ha.norm() >= 1.0 || hb.norm() >= 1.0 {
            return false;
        }
        poincare_distance_raw(ha, hb) <= poincare_distance_raw(a.0, b.0) + 1e-9
    })
}
