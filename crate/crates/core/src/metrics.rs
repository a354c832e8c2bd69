//! Closed forms, the quasieffective formula for the diamond, and certified
//! Kobayashi distances and metrics on the supported domains.

use serde::{Deserialize, Serialize};

use crate::competitor::{Competitor, CompetitorFamily};
use crate::extremal::{self, ExtremalSolution, Interpolant, Problem};
use crate::hyperbolic::{poincare_distance_raw, poincare_metric_raw};
use crate::optimize::circle_max;
use crate::oracle::{self, Budget, SandwichCertificate};
use crate::{DomainSpec, Error, Point2, Result, Tangent2, C64};

/// Which branch produced a metric value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Achiever {
    /// The circle supremum over linear competitors `z1 + ω z2`.
    MDiamond,
    /// Pullback through `(z1, z2) ↦ (z1, z2²)` from `E{1,2}`.
    #[serde(rename = "Pull_E_half_1")]
    PullE12,
    /// Pullback through `(z1, z2) ↦ (z1², z2)` from `E{2,1}`.
    #[serde(rename = "Pull_E_1_half")]
    PullE21,
    /// Pullback through `(z1, z2) ↦ (z1², z2²)` from the ball.
    #[serde(rename = "Pull_Ball")]
    PullBall,
    ClosedForm,
    /// Two-sided solution over the explicit extremal family.
    Extremal,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    Competitor { competitor: Competitor },
    Sandwich { sandwich: SandwichCertificate },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub value: f64,
    pub achiever: Achiever,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl MetricResult {
    fn closed(value: f64) -> Self {
        Self { value, achiever: Achiever::ClosedForm, certificate: None }
    }
}

fn require_in(domain: &DomainSpec, z: &Point2) -> Result<()> {
    domain.validate()?;
    domain.require(z)
}

/// `sup_{|ω|=1} |X1 + ω X2| / (1 - |z1 + ω z2|²)` and the maximizing angle of `ω`.
pub fn m_diamond_with_angle(z: &Point2, x: &Tangent2) -> Result<(f64, f64)> {
    require_in(&DomainSpec::Diamond, z)?;
    let f = |th: f64| {
        let w = C64::from_polar(1.0, th);
        poincare_metric_raw(z.z1 + w * z.z2, x.x1 + w * x.x2)
    };
    let (th, v) = circle_max(f, 720, 1e-10);
    Ok((v, th))
}

pub fn m_diamond(z: &Point2, x: &Tangent2) -> Result<f64> {
    Ok(m_diamond_with_angle(z, x)?.0)
}

/// Kobayashi–Royden metric of the unit ball of C^2.
pub fn kappa_ball(z: &Point2, x: &Tangent2) -> Result<f64> {
    require_in(&DomainSpec::Ball2, z)?;
    let d = 1.0 - z.norm().powi(2);
    let inner = x.x1 * z.z1.conj() + x.x2 * z.z2.conj();
    Ok((x.norm().powi(2) / d + inner.norm_sqr() / (d * d)).sqrt())
}

/// Kobayashi distance of the unit ball of C^2.
pub fn ball_distance(w: &Point2, z: &Point2) -> Result<f64> {
    require_in(&DomainSpec::Ball2, w)?;
    require_in(&DomainSpec::Ball2, z)?;
    let inner = w.z1 * z.z1.conj() + w.z2 * z.z2.conj();
    let num = (1.0 - w.norm().powi(2)) * (1.0 - z.norm().powi(2));
    let den = (1.0 - inner).norm_sqr();
    // 1 - num/den computed as (den - num)/den, with den - num = |w - z|² - |w|²|z|² + |<w,z>|²
    let diff = (*w - *z).as_tangent().norm().powi(2) - w.norm().powi(2) * z.norm().powi(2) + inner.norm_sqr();
    let t = (diff.max(0.0) / den).sqrt().min(1.0);
    let _ = num;
    Ok(t.atanh())
}

const EXTREMAL_GAP: f64 = 1e-9;

fn extremal_metric(q: [f64; 2], z: &Point2, x: &Tangent2, hint: Option<&Interpolant>) -> (ExtremalSolution, f64) {
    let (xc, n) = x.canonical();
    let problem = Problem::Tangent(*z, xc);
    if let Some(h) = hint {
        if let Some(s) = extremal::solve_warm(q, &problem, h, EXTREMAL_GAP) {
            return (s, n);
        }
    }
    (extremal::solve(q, &problem, EXTREMAL_GAP), n)
}

/// `κ` of `E{q1, q2}` together with the interpolating extremal, for warm starts.
pub fn kappa_ellipsoid_detailed(q1: f64, q2: f64, z: &Point2, x: &Tangent2, hint: Option<&Interpolant>) -> Result<(MetricResult, Option<Interpolant>)> {
    let domain = DomainSpec::ellipsoid(q1, q2)?;
    require_in(&domain, z)?;
    if x.is_zero() {
        return Ok((MetricResult::closed(0.0), None));
    }
    if domain.normalized() == DomainSpec::Ball2 {
        return Ok((MetricResult::closed(kappa_ball(z, x)?), None));
    }
    let (sol, n) = extremal_metric([q1, q2], z, x, hint);
    if sol.gap() <= EXTREMAL_GAP {
        let (up, it) = sol.upper.expect("finite gap");
        let value = n * 0.5 * (sol.lower + up);
        let cert = Certificate::Competitor { competitor: Competitor::lempert_dual(sol.dual) };
        return Ok((MetricResult { value, achiever: Achiever::Extremal, certificate: Some(cert) }, Some(it)));
    }
    let s = oracle::sandwich(&domain, &Problem::Tangent(*z, *x), &Budget::default())?;
    if !s.certified {
        return Err(Error::Uncertified { width: s.width, target: 2e-4 });
    }
    Ok((MetricResult { value: s.midpoint(), achiever: Achiever::Oracle, certificate: Some(Certificate::Sandwich { sandwich: s }) }, None))
}

/// `κ` of `E{q1, q2}` through the extremal family (no closed-form shortcut),
/// with the interpolating extremal; `None` when the two-sided gap does not close.
pub fn ellipsoid_extremal(q1: f64, q2: f64, z: &Point2, x: &Tangent2) -> Result<Option<(f64, Interpolant)>> {
    let domain = DomainSpec::ellipsoid(q1, q2)?;
    require_in(&domain, z)?;
    if x.is_zero() {
        return Err(Error::Precondition("tangent vector is zero".into()));
    }
    let (sol, n) = extremal_metric([q1, q2], z, x, None);
    Ok(match sol.upper {
        Some((up, it)) if sol.gap() <= EXTREMAL_GAP => Some((n * 0.5 * (sol.lower + up), it)),
        _ => None,
    })
}

/// Kobayashi–Royden metric of the convex ellipsoid `{|z1|^q1 + |z2|^q2 < 1}`.
pub fn kappa_ellipsoid(q1: f64, q2: f64, z: &Point2, x: &Tangent2) -> Result<MetricResult> {
    Ok(kappa_ellipsoid_detailed(q1, q2, z, x, None)?.0)
}

/// Every ingredient of the quasieffective formula at `(z; X)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branches {
    pub m: f64,
    /// Pulled-back values from `E{1,2}`, `E{2,1}` and the ball; `None` when a
    /// square-rooted coordinate vanishes.
    pub pull_e12: Option<f64>,
    pub pull_e21: Option<f64>,
    pub pull_ball: Option<f64>,
    /// Whether each component of the diamond extremal through `(z; X)` is zero-free.
    pub zero_free: [bool; 2],
    /// The diamond metric from the two-sided extremal solution.
    pub extremal: f64,
}

/// Zero-free test for the `j`-th component of an extremal member; zeros
/// within `1e-3` of the circle count as boundary zeros.
pub fn component_zero_free(disc: &crate::extremal::ExtremalDisc, j: usize) -> bool {
    disc.a[j].norm() > 0.0 && (disc.r[j] == 0 || disc.alpha[j].norm() > 1.0 - 1e-3)
}

fn sqrt_pull(z: &Point2, x: &Tangent2, roots: [bool; 2]) -> Option<(Point2, Tangent2)> {
    let mut pz = z.as_array();
    let mut px = x.as_array();
    for j in 0..2 {
        if roots[j] {
            if z.as_array()[j].norm() == 0.0 {
                return None;
            }
            let r = z.as_array()[j].sqrt();
            pz[j] = r;
            px[j] = x.as_array()[j] / (2.0 * r);
        }
    }
    Some((Point2::from_array(pz), Tangent2::from_array(px)))
}

pub fn quasieffective_branches(z: &Point2, x: &Tangent2) -> Result<Branches> {
    let m = m_diamond(z, x)?;
    let pull = |roots: [bool; 2], q: [f64; 2]| -> Result<Option<f64>> {
        match sqrt_pull(z, x, roots) {
            None => Ok(None),
            Some((pz, px)) => {
                let dom = DomainSpec::Ellipsoid { q1: q[0], q2: q[1] };
                if !dom.contains(&pz) {
                    return Ok(None);
                }
                Ok(Some(kappa_ellipsoid(q[0], q[1], &pz, &px)?.value))
            }
        }
    };
    let pull_e12 = pull([false, true], [1.0, 2.0])?;
    let pull_e21 = pull([true, false], [2.0, 1.0])?;
    let pull_ball = pull([true, true], [2.0, 2.0])?;
    let (sol, n) = extremal_metric([1.0, 1.0], z, x, None);
    let (extremal, zero_free) = match &sol.upper {
        Some((up, it)) if sol.gap() <= EXTREMAL_GAP => {
            (n * 0.5 * (sol.lower + up), [component_zero_free(&it.disc, 0), component_zero_free(&it.disc, 1)])
        }
        _ => {
            let s = oracle::sandwich(&DomainSpec::Diamond, &Problem::Tangent(*z, *x), &Budget::default())?;
            (s.midpoint(), [false, false])
        }
    };
    Ok(Branches { m, pull_e12, pull_e21, pull_ball, zero_free, extremal })
}

impl Branches {
    /// `max(m, min over admissible pullbacks)`, where a pullback is admissible
    /// when the diamond extremal is zero-free in every square-rooted coordinate.
    pub fn formula(&self) -> (f64, Achiever) {
        let zf = self.zero_free;
        let cands = [
            (self.pull_e12, zf[1], Achiever::PullE12),
            (self.pull_e21, zf[0], Achiever::PullE21),
            (self.pull_ball, zf[0] && zf[1], Achiever::PullBall),
        ];
        let mut best: Option<(f64, Achiever)> = None;
        for (v, ok, a) in cands {
            if let (Some(v), true) = (v, ok) {
                if best.is_none_or(|b| v < b.0) {
                    best = Some((v, a));
                }
            }
        }
        match best {
            Some((v, a)) if v > self.m => (v, a),
            _ => (self.m, Achiever::MDiamond),
        }
    }

    /// Every branch value with its tag, in the fixed tie-breaking order.
    pub fn all(&self) -> Vec<(f64, Achiever)> {
        let mut out = vec![(self.m, Achiever::MDiamond)];
        for (v, a) in [(self.pull_e12, Achiever::PullE12), (self.pull_e21, Achiever::PullE21), (self.pull_ball, Achiever::PullBall)] {
            if let Some(v) = v {
                out.push((v, a));
            }
        }
        out
    }
}

/// Relative tolerance for matching a branch value against the extremal solution.
const BRANCH_TOL: f64 = 1e-7;

/// Kobayashi–Royden metric of the diamond by the quasieffective formula.
pub fn kappa_diamond(z: &Point2, x: &Tangent2) -> Result<MetricResult> {
    require_in(&DomainSpec::Diamond, z)?;
    if x.is_zero() {
        return Ok(MetricResult { value: 0.0, achiever: Achiever::MDiamond, certificate: None });
    }
    if z.z1.norm() == 0.0 && z.z2.norm() == 0.0 {
        let one = C64::new(1.0, 0.0);
        let w = if x.x1.norm() > 0.0 && x.x2.norm() > 0.0 { x.x1 * x.x2.conj() / (x.x1.norm() * x.x2.norm()) } else { one };
        let comp = Competitor::linear_sum(one, w / w.norm())?;
        return Ok(MetricResult {
            value: x.x1.norm() + x.x2.norm(),
            achiever: Achiever::MDiamond,
            certificate: Some(Certificate::Competitor { competitor: comp }),
        });
    }
    let b = quasieffective_branches(z, x)?;
    let (mut value, mut achiever) = b.formula();
    let tol = BRANCH_TOL * (1.0 + b.extremal);
    if (value - b.extremal).abs() > tol {
        // zero pattern ambiguous: take the branch that the extremal solution singles out
        for (v, a) in b.all() {
            if (v - b.extremal).abs() <= tol {
                value = v;
                achiever = a;
                break;
            }
        }
    }
    if (value - b.extremal).abs() > tol {
        value = b.extremal;
        achiever = Achiever::Extremal;
    }
    let certificate = if achiever == Achiever::MDiamond {
        let (_, th) = m_diamond_with_angle(z, x)?;
        Some(Certificate::Competitor { competitor: Competitor::linear_sum(C64::new(1.0, 0.0), C64::from_polar(1.0, th))? })
    } else {
        None
    };
    Ok(MetricResult { value, achiever, certificate })
}

/// Kobayashi–Royden metric on any supported domain.
pub fn kappa(domain: &DomainSpec, z: &Point2, x: &Tangent2) -> Result<MetricResult> {
    require_in(domain, z)?;
    match domain.normalized() {
        DomainSpec::Disc => {
            if x.x2.norm() != 0.0 {
                return Err(Error::Precondition("tangent must lie along the disc slice".into()));
            }
            Ok(MetricResult::closed(poincare_metric_raw(z.z1, x.x1)))
        }
        DomainSpec::Ball2 => Ok(MetricResult::closed(kappa_ball(z, x)?)),
        DomainSpec::Diamond => kappa_diamond(z, x),
        DomainSpec::Ellipsoid { q1, q2 } => kappa_ellipsoid(q1, q2, z, x),
    }
}

/// A certified Kobayashi distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub certified: bool,
    pub achiever: Achiever,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SandwichCertificate>,
}

impl DistanceResult {
    fn exact(value: f64) -> Self {
        Self { value, lower: value, upper: value, width: 0.0, certified: true, achiever: Achiever::ClosedForm, certificate: None }
    }

    pub fn require_certified(self, target: f64) -> Result<Self> {
        if self.certified && self.width < target {
            Ok(self)
        } else {
            Err(Error::Uncertified { width: self.width, target })
        }
    }
}

/// Closed forms on the diamond: `k((z1,0),(w1,0)) = p(z1,w1)`, `k((z1,0),(0,z2)) = p(-|z1|,|z2|)` and
/// `k((z1,0),(z1,z2)) = p(0, |z2|/(1-|z1|))`, with the coordinates' roles swappable.
pub fn diamond_closed_form(w: &Point2, z: &Point2) -> Option<f64> {
    let zero = C64::new(0.0, 0.0);
    for (a, b) in [(w, z), (z, w)] {
        for swap in [false, true] {
            let (a1, a2, b1, b2) = if swap { (a.z2, a.z1, b.z2, b.z1) } else { (a.z1, a.z2, b.z1, b.z2) };
            if a2 == zero && b2 == zero {
                return Some(poincare_distance_raw(a1, b1));
            }
            if a2 == zero && b1 == zero {
                return Some(poincare_distance_raw(C64::new(-a1.norm(), 0.0), C64::new(b2.norm(), 0.0)));
            }
            if a2 == zero && a1 == b1 {
                return Some(poincare_distance_raw(C64::new(0.0, 0.0), C64::new(b2.norm() / (1.0 - a1.norm()), 0.0)));
            }
        }
    }
    None
}

pub fn kobayashi_distance_with(domain: &DomainSpec, w: &Point2, z: &Point2, budget: &Budget) -> Result<DistanceResult> {
    require_in(domain, w)?;
    require_in(domain, z)?;
    if w == z {
        return Ok(DistanceResult::exact(0.0));
    }
    match domain.normalized() {
        DomainSpec::Disc => return Ok(DistanceResult::exact(poincare_distance_raw(w.z1, z.z1))),
        DomainSpec::Ball2 => return Ok(DistanceResult::exact(ball_distance(w, z)?)),
        DomainSpec::Diamond => {
            if let Some(v) = diamond_closed_form(w, z) {
                return Ok(DistanceResult::exact(v));
            }
        }
        _ => {}
    }
    let s = oracle::sandwich(domain, &Problem::Pair(*w, *z), budget)?;
    let achiever = match (&s.lower_witness, &s.upper_witness) {
        (_, Some(u)) if matches!(u.disc, oracle::DiscWitness::Polynomial { .. }) && s.width < 1e-5 => Achiever::Extremal,
        (_, Some(u)) if matches!(u.disc, oracle::DiscWitness::ExtremalMember { .. }) => Achiever::Extremal,
        _ => Achiever::Oracle,
    };
    Ok(DistanceResult {
        value: s.midpoint(),
        lower: s.lower,
        upper: s.upper,
        width: s.width,
        certified: s.certified,
        achiever,
        certificate: Some(s),
    })
}

/// Kobayashi distance on a supported (convex) domain, certified to width `2e-4`.
pub fn kobayashi_distance(domain: &DomainSpec, w: &Point2, z: &Point2) -> Result<DistanceResult> {
    kobayashi_distance_with(domain, w, z, &Budget::default())
}

/// `sup p(F(w), F(z))` over the given competitor families.
pub fn caratheodory_lower_bound(domain: &DomainSpec, w: &Point2, z: &Point2, families: &[CompetitorFamily]) -> Result<(f64, Competitor)> {
    require_in(domain, w)?;
    require_in(domain, z)?;
    if w == z {
        let c = Competitor::linear_sum(C64::new(1.0, 0.0), C64::new(1.0, 0.0))?;
        return Ok((0.0, c));
    }
    oracle::lower_bound(domain, &Problem::Pair(*w, *z), families)
}

/// `sup |F'(z)X| / (1 - |F(z)|²)` over the given competitor families.
pub fn caratheodory_metric_lower_bound(domain: &DomainSpec, z: &Point2, x: &Tangent2, families: &[CompetitorFamily]) -> Result<(f64, Competitor)> {
    require_in(domain, z)?;
    oracle::lower_bound(domain, &Problem::Tangent(*z, *x), families)
}
