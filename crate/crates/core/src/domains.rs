//! Supported model domains in C^2.
//!
//! Exponent convention: `Ellipsoid { q1, q2 }` is `{|z1|^q1 + |z2|^q2 < 1}`; the
//! exponent stored is the one actually applied to `|z_j|`. The half-exponent
//! notation `E(p1/2, p2/2)` found in the literature corresponds to `q_j = p_j`,
//! so `E(1/2, 1/2)` is the diamond (`q = (1, 1)`), `E(1, 1)` the ball
//! (`q = (2, 2)`), and `E(1, 1/2)` is `Ellipsoid { q1: 2, q2: 1 }`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub z1: C64,
    pub z2: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tangent2 {
    pub x1: C64,
    pub x2: C64,
}

fn finite(c: C64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { z1: C64 { re: 0.0, im: 0.0 }, z2: C64 { re: 0.0, im: 0.0 } };

    pub fn new(z1: C64, z2: C64) -> Self {
        Self { z1, z2 }
    }

    pub fn real(x1: f64, x2: f64) -> Self {
        Self::new(C64::new(x1, 0.0), C64::new(x2, 0.0))
    }

    pub fn checked(z1: C64, z2: C64) -> Result<Self> {
        let p = Self::new(z1, z2);
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NonFinite(p.to_string()))
        }
    }

    pub fn is_finite(&self) -> bool {
        finite(self.z1) && finite(self.z2)
    }

    pub fn as_array(&self) -> [C64; 2] {
        [self.z1, self.z2]
    }

    pub fn from_array(a: [C64; 2]) -> Self {
        Self::new(a[0], a[1])
    }

    pub fn norm(&self) -> f64 {
        (self.z1.norm_sqr() + self.z2.norm_sqr()).sqrt()
    }

    pub fn l1(&self) -> f64 {
        self.z1.norm() + self.z2.norm()
    }

    pub fn as_tangent(&self) -> Tangent2 {
        Tangent2::new(self.z1, self.z2)
    }
}

impl Tangent2 {
    pub fn new(x1: C64, x2: C64) -> Self {
        Self { x1, x2 }
    }

    pub fn real(x1: f64, x2: f64) -> Self {
        Self::new(C64::new(x1, 0.0), C64::new(x2, 0.0))
    }

    pub fn checked(x1: C64, x2: C64) -> Result<Self> {
        let t = Self::new(x1, x2);
        if finite(x1) && finite(x2) {
            Ok(t)
        } else {
            Err(Error::NonFinite(t.to_string()))
        }
    }

    pub fn as_array(&self) -> [C64; 2] {
        [self.x1, self.x2]
    }

    pub fn from_array(a: [C64; 2]) -> Self {
        Self::new(a[0], a[1])
    }

    pub fn norm(&self) -> f64 {
        (self.x1.norm_sqr() + self.x2.norm_sqr()).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.x1 == C64::new(0.0, 0.0) && self.x2 == C64::new(0.0, 0.0)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.x1 * c, self.x2 * c)
    }

    /// Unit vector with the same complex line, rotated so that the larger
    /// component is real and positive. Returns it with the original norm.
    pub fn canonical(&self) -> (Self, f64) {
        let n = self.norm();
        let pivot = if self.x1.norm() >= self.x2.norm() { self.x1 } else { self.x2 };
        let phase = pivot.conj() / pivot.norm();
        (Self::new(self.x1 * phase / n, self.x2 * phase / n), n)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.z1 + o.z1, self.z2 + o.z2)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.z1 - o.z1, self.z2 - o.z2)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, t: f64) -> Point2 {
        Point2::new(self.z1 * t, self.z2 * t)
    }
}

impl Add<Tangent2> for Point2 {
    type Output = Point2;
    fn add(self, o: Tangent2) -> Point2 {
        Point2::new(self.z1 + o.x1, self.z2 + o.x2)
    }
}

impl Add for Tangent2 {
    type Output = Tangent2;
    fn add(self, o: Tangent2) -> Tangent2 {
        Tangent2::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for Tangent2 {
    type Output = Tangent2;
    fn sub(self, o: Tangent2) -> Tangent2 {
        Tangent2::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Mul<f64> for Tangent2 {
    type Output = Tangent2;
    fn mul(self, t: f64) -> Tangent2 {
        Tangent2::new(self.x1 * t, self.x2 * t)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.z1, self.z2)
    }
}

impl fmt::Display for Tangent2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.x1, self.x2)
    }
}

/// One of the supported domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    /// The unit disc embedded as the slice `{z2 = 0}`.
    Disc,
    Ball2,
    Ellipsoid { q1: f64, q2: f64 },
    Diamond,
}

impl DomainSpec {
    /// Convex ellipsoid; exponents below 1 are rejected.
    pub fn ellipsoid(q1: f64, q2: f64) -> Result<Self> {
        if !(q1.is_finite() && q2.is_finite()) || q1 < 1.0 || q2 < 1.0 {
            return Err(Error::InvalidDomain(format!(
                "ellipsoid exponents ({q1}, {q2}) must be finite and >= 1 (convex instances only)"
            )));
        }
        Ok(Self::Ellipsoid { q1, q2 })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Ellipsoid { q1, q2 } => Self::ellipsoid(q1, q2).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Exponents `(q1, q2)` for the ellipsoid family; `None` for the disc.
    pub fn exponents(&self) -> Option<[f64; 2]> {
        match *self {
            Self::Disc => None,
            Self::Ball2 => Some([2.0, 2.0]),
            Self::Diamond => Some([1.0, 1.0]),
            Self::Ellipsoid { q1, q2 } => Some([q1, q2]),
        }
    }

    /// Collapses `Ellipsoid{1,1}` to `Diamond` and `Ellipsoid{2,2}` to `Ball2`.
    pub fn normalized(&self) -> Self {
        match *self {
            Self::Ellipsoid { q1, q2 } if q1 == 1.0 && q2 == 1.0 => Self::Diamond,
            Self::Ellipsoid { q1, q2 } if q1 == 2.0 && q2 == 2.0 => Self::Ball2,
            other => other,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Self::Disc => "disc".into(),
            Self::Ball2 => "ball".into(),
            Self::Diamond => "diamond".into(),
            Self::Ellipsoid { q1, q2 } => format!("ellipsoid({q1},{q2})"),
        }
    }

    /// Whether `self` is a subset of `other`. Larger exponents give larger
    /// ellipsoids, and the disc slice lies in every supported domain.
    pub fn is_subset_of(&self, other: &DomainSpec) -> bool {
        match (self.exponents(), other.exponents()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(p), Some(q)) => p[0] <= q[0] && p[1] <= q[1],
        }
    }

    /// The defining functional `ρ`, with the domain being `{ρ < 1}`.
    pub fn defining(&self, z: &Point2) -> f64 {
        defining_raw(self, z.z1, z.z2)
    }

    pub fn boundary_gap(&self, z: &Point2) -> f64 {
        1.0 - self.defining(z)
    }

    pub fn contains(&self, z: &Point2) -> bool {
        z.is_finite() && self.boundary_gap(z) > 0.0
    }

    pub fn require(&self, z: &Point2) -> Result<()> {
        if !z.is_finite() {
            return Err(Error::NonFinite(z.to_string()));
        }
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { domain: self.name(), point: z.to_string() })
        }
    }

    /// Largest `t > 0` with `z + t v` on the boundary (`z` inside, `v != 0`).
    pub fn ray_exit(&self, z: &Point2, v: &Tangent2) -> f64 {
        let mut hi = 1.0;
        while self.defining(&(*z + *v * hi)) < 1.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return f64::INFINITY;
            }
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.defining(&(*z + *v * mid)) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Euclidean distance from `z` to the complement, estimated by minimizing
    /// ray exits over a direction grid (exact for the disc and the ball).
    pub fn euclid_boundary_distance(&self, z: &Point2) -> f64 {
        match *self {
            Self::Disc => 1.0 - z.z1.norm(),
            Self::Ball2 => 1.0 - z.norm(),
            Self::Diamond => (1.0 - z.l1()) / std::f64::consts::SQRT_2,
            _ => {
                let mut best = f64::INFINITY;
                let n = 24;
                for a in 0..=n {
                    let eta = std::f64::consts::FRAC_PI_2 * a as f64 / n as f64;
                    for b in 0..n {
                        for c in 0..n {
                            let v = Tangent2::new(
                                C64::from_polar(eta.cos(), std::f64::consts::TAU * b as f64 / n as f64),
                                C64::from_polar(eta.sin(), std::f64::consts::TAU * c as f64 / n as f64),
                            );
                            best = best.min(self.ray_exit(z, &v));
                        }
                    }
                }
                // grid spacing bound: be conservative by a few percent
                0.9 * best
            }
        }
    }
}

/// Uniform point of `{ρ <= level}` by rejection from the bounding box.
pub fn random_point<R: rand::Rng + ?Sized>(domain: &DomainSpec, rng: &mut R, level: f64) -> Point2 {
    loop {
        let z1 = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let z2 = match domain {
            DomainSpec::Disc => C64::new(0.0, 0.0),
            _ => C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        };
        let p = Point2::new(z1, z2);
        if domain.defining(&p) <= level {
            return p;
        }
    }
}

/// Uniform unit vector of C^2 (or of the `z1` axis for the disc).
pub fn random_unit_tangent<R: rand::Rng + ?Sized>(domain: &DomainSpec, rng: &mut R) -> Tangent2 {
    loop {
        let mut v = [0.0f64; 4];
        for x in v.iter_mut() {
            // Box-Muller keeps the direction distribution rotation invariant.
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen();
            *x = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        }
        if matches!(domain, DomainSpec::Disc) {
            v[2] = 0.0;
            v[3] = 0.0;
        }
        let t = Tangent2::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]));
        let n = t.norm();
        if n > 1e-6 {
            return t * (1.0 / n);
        }
    }
}

pub(crate) fn defining_raw(d: &DomainSpec, z1: C64, z2: C64) -> f64 {
    match *d {
        DomainSpec::Disc => {
            if z2 == C64::new(0.0, 0.0) {
                z1.norm()
            } else {
                f64::INFINITY
            }
        }
        DomainSpec::Ball2 => z1.norm_sqr() + z2.norm_sqr(),
        DomainSpec::Diamond => z1.norm() + z2.norm(),
        DomainSpec::Ellipsoid { q1, q2 } => pow_abs(z1, q1) + pow_abs(z2, q2),
    }
}

#[inline]
pub(crate) fn pow_abs(z: C64, q: f64) -> f64 {
    if q == 1.0 {
        z.norm()
    } else if q == 2.0 {
        z.norm_sqr()
    } else {
        z.norm().powf(q)
    }
}

#[derive(Serialize, Deserialize)]
struct DomainJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q2: Option<f64>,
}

impl Serialize for DomainSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (kind, q) = match *self {
            Self::Disc => ("disc", None),
            Self::Ball2 => ("ball", Some([2.0, 2.0])),
            Self::Diamond => ("diamond", Some([1.0, 1.0])),
            Self::Ellipsoid { q1, q2 } => ("ellipsoid", Some([q1, q2])),
        };
        DomainJson { kind: kind.into(), q1: q.map(|q| q[0]), q2: q.map(|q| q[1]) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DomainSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DomainJson::deserialize(d)?;
        j.kind.parse::<DomainSpec>().and_then(|base| match base {
            DomainSpec::Ellipsoid { .. } => match (j.q1, j.q2) {
                (Some(q1), Some(q2)) => DomainSpec::ellipsoid(q1, q2),
                _ => Err(Error::InvalidDomain("ellipsoid needs q1 and q2".into())),
            },
            other => Ok(other),
        })
        .map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for DomainSpec {
    type Err = Error;

    /// Accepts `disc`, `ball`, `diamond`, `ellipsoid` (exponents defaulted to
    /// `(2, 1)`), or `ellipsoid:q1,q2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "disc" => Ok(Self::Disc),
            "ball" | "ball2" => Ok(Self::Ball2),
            "diamond" => Ok(Self::Diamond),
            "ellipsoid" => Ok(Self::Ellipsoid { q1: 2.0, q2: 1.0 }),
            _ => {
                let rest = s
                    .strip_prefix("ellipsoid:")
                    .ok_or_else(|| Error::InvalidDomain(format!("unknown domain '{s}'")))?;
                let qs: Vec<f64> = rest
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
                    .collect::<Result<_>>()?;
                if qs.len() != 2 {
                    return Err(Error::InvalidDomain(format!("expected two exponents in '{s}'")));
                }
                Self::ellipsoid(qs[0], qs[1])
            }
        }
    }
}

/// `z ↦ (ω1 c1(z_σ(1)), ω2 c2(z_σ(2)))`: rotations, optional conjugations and
/// an optional swap of the coordinates. Every such map is a bijection of the diamond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondSymmetry {
    pub omega: [C64; 2],
    pub conj: [bool; 2],
    pub swap: bool,
}

impl DiamondSymmetry {
    pub fn new(omega1: C64, omega2: C64, conj1: bool, conj2: bool, swap: bool) -> Result<Self> {
        for w in [omega1, omega2] {
            if (w.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::NotUnimodular(format!("{w}")));
            }
        }
        Ok(Self { omega: [omega1, omega2], conj: [conj1, conj2], swap })
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        Self { omega: [one, one], conj: [false, false], swap: false }
    }

    fn map_pair(&self, a: [C64; 2]) -> [C64; 2] {
        let src = if self.swap { [a[1], a[0]] } else { a };
        let mut out = [C64::new(0.0, 0.0); 2];
        for j in 0..2 {
            let v = if self.conj[j] { src[j].conj() } else { src[j] };
            out[j] = self.omega[j] * v;
        }
        out
    }

    pub fn apply(&self, z: &Point2) -> Point2 {
        Point2::from_array(self.map_pair(z.as_array()))
    }

    /// The real differential, which coincides with the map itself.
    pub fn push_tangent(&self, x: &Tangent2) -> Tangent2 {
        Tangent2::from_array(self.map_pair(x.as_array()))
    }

    /// Holomorphic when no coordinate is conjugated, antiholomorphic when both are.
    pub fn is_known_isometry(&self) -> bool {
        self.conj[0] == self.conj[1]
    }

    /// Row-major real 4x4 matrix acting on `(Re z1, Im z1, Re z2, Im z2)`.
    pub fn real_matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for col in 0..4 {
            let mut e = [C64::new(0.0, 0.0); 2];
            if col % 2 == 0 {
                e[col / 2] = C64::new(1.0, 0.0);
            } else {
                e[col / 2] = C64::new(0.0, 1.0);
            }
            let img = self.map_pair(e);
            let v = [img[0].re, img[0].im, img[1].re, img[1].im];
            for row in 0..4 {
                m[row][col] = v[row];
            }
        }
        m
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn symmetries_preserve_l1(
            r1 in 0.0..1.0f64, t1 in 0.0..6.3f64, r2 in 0.0..1.0f64, t2 in 0.0..6.3f64,
            w1 in 0.0..6.3f64, w2 in 0.0..6.3f64, c1: bool, c2: bool, sw: bool,
        ) {
            let z = Point2::new(C64::from_polar(r1 * 0.5, t1), C64::from_polar(r2 * 0.5, t2));
            let s = DiamondSymmetry::new(C64::from_polar(1.0, w1), C64::from_polar(1.0, w2), c1, c2, sw).unwrap();
            let img = s.apply(&z);
            prop_assert!((img.l1() - z.l1()).abs() < 1e-15);
            prop_assert!(DomainSpec::Diamond.contains(&img));
        }

        #[test]
        fn contains_agrees_with_gap(a in -1.2..1.2f64, b in -1.2..1.2f64, c in -1.2..1.2f64, d in -1.2..1.2f64, k in 0usize..4) {
            let dom = [DomainSpec::Diamond, DomainSpec::Ball2, DomainSpec::Ellipsoid { q1: 2.0, q2: 1.0 }, DomainSpec::Ellipsoid { q1: 1.5, q2: 3.0 }][k];
            let z = Point2::new(C64::new(a, b), C64::new(c, d));
            prop_assert_eq!(dom.contains(&z), dom.boundary_gap(&z) > 0.0);
        }
    }
}
