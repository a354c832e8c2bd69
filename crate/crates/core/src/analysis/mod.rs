//! Indicatrix geometry and the isometry-rigidity harness.

mod indicatrix;
mod rigidity;

pub use indicatrix::*;
pub use rigidity::*;

use crate::extremal::Interpolant;
use crate::metrics::{kappa, kappa_ball, kappa_ellipsoid_detailed};
use crate::{DomainSpec, Point2, Result, Tangent2};

/// `κ_D(z; X)`, reusing the extremal of a nearby problem on ellipsoids.
pub(crate) fn kappa_hinted(
    domain: &DomainSpec,
    z: &Point2,
    x: &Tangent2,
    hint: Option<&Interpolant>,
) -> Result<(f64, Option<Interpolant>)> {
    match domain.normalized() {
        DomainSpec::Ball2 => Ok((kappa_ball(z, x)?, None)),
        DomainSpec::Ellipsoid { q1, q2 } => {
            let (r, it) = kappa_ellipsoid_detailed(q1, q2, z, x, hint)?;
            Ok((r.value, it))
        }
        _ => Ok((kappa(domain, z, x)?.value, None)),
    }
}

/// Van der Corput radical inverse of `k` in base `b`.
fn radical_inverse(mut k: u64, b: u64) -> f64 {
    let mut inv = 1.0 / b as f64;
    let mut x = 0.0;
    while k > 0 {
        x += (k % b) as f64 * inv;
        k /= b;
        inv /= b as f64;
    }
    x
}

/// `n` unit vectors of C^2 from the Halton sequence in bases 2, 3, 5 mapped by
/// `(u, s, t) ↦ (√u e^{2πis}, √(1-u) e^{2πit})`, which is uniform on the sphere.
pub fn halton_directions(n: usize) -> Vec<Tangent2> {
    use std::f64::consts::TAU;
    (1..=n as u64)
        .map(|k| {
            let u = radical_inverse(k, 2);
            let s = radical_inverse(k, 3);
            let t = radical_inverse(k, 5);
            Tangent2::new(
                crate::C64::from_polar(u.sqrt(), TAU * s),
                crate::C64::from_polar((1.0 - u).sqrt(), TAU * t),
            )
        })
        .collect()
}

pub(crate) fn to_real(x: &Tangent2) -> [f64; 4] {
    [x.x1.re, x.x1.im, x.x2.re, x.x2.im]
}

pub(crate) fn from_real(v: &[f64; 4]) -> Tangent2 {
    Tangent2::new(crate::C64::new(v[0], v[1]), crate::C64::new(v[2], v[3]))
}
