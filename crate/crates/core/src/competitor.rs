//! Holomorphic maps from a domain into the unit disc, used as Carathéodory
//! competitors and as left inverses of complex geodesics.

use serde::{Deserialize, Serialize};

use crate::extremal::{self, ExtremalDisc, Problem};
use crate::hyperbolic::poincare_distance_raw;
use crate::optimize::circle_max;
use crate::{DiscAutomorphism, DomainSpec, Error, Point2, Result, Tangent2, C64};

/// The underlying map before the optional disc automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum CompetitorKind {
    /// `z ↦ τ1 z1 + τ2 z2` with unimodular `τ_j`.
    LinearSum { tau1: C64, tau2: C64 },
    /// `v ↦ v_other / (1 - τ v_axis)` with unimodular `τ` and `axis ∈ {1, 2}`.
    AxisQuotient { tau: C64, axis: u8 },
    /// The holomorphic left inverse of an extremal disc of a convex ellipsoid.
    LempertDual { disc: ExtremalDisc },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Competitor {
    pub kind: CompetitorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post: Option<DiscAutomorphism>,
}

/// A parametrized family of competitors, optimized as a whole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CompetitorFamily {
    LinearSum,
    AxisQuotient,
    LempertDual,
}

fn unimodular(t: C64) -> Result<()> {
    if (t.norm() - 1.0).abs() > 1e-12 || !t.re.is_finite() {
        Err(Error::NotUnimodular(format!("{t}")))
    } else {
        Ok(())
    }
}

impl Competitor {
    pub fn linear_sum(tau1: C64, tau2: C64) -> Result<Self> {
        unimodular(tau1)?;
        unimodular(tau2)?;
        Ok(Self { kind: CompetitorKind::LinearSum { tau1, tau2 }, post: None })
    }

    pub fn axis_quotient(tau: C64, axis: u8) -> Result<Self> {
        unimodular(tau)?;
        if axis != 1 && axis != 2 {
            return Err(Error::InvalidCompetitor(format!("axis must be 1 or 2, got {axis}")));
        }
        Ok(Self { kind: CompetitorKind::AxisQuotient { tau, axis }, post: None })
    }

    pub fn lempert_dual(disc: ExtremalDisc) -> Self {
        Self { kind: CompetitorKind::LempertDual { disc }, post: None }
    }

    pub fn with_post(mut self, post: DiscAutomorphism) -> Self {
        self.post = Some(match self.post {
            Some(prev) => post.compose(&prev),
            None => post,
        });
        self
    }

    /// The largest supported domain the competitor is known to map into the disc.
    pub fn native_domain(&self) -> DomainSpec {
        match self.kind {
            CompetitorKind::LinearSum { .. } | CompetitorKind::AxisQuotient { .. } => DomainSpec::Diamond,
            CompetitorKind::LempertDual { disc } => {
                DomainSpec::Ellipsoid { q1: disc.q[0], q2: disc.q[1] }.normalized()
            }
        }
    }

    pub fn is_valid_for(&self, domain: &DomainSpec) -> bool {
        domain.is_subset_of(&self.native_domain())
    }

    pub fn require_valid_for(&self, domain: &DomainSpec) -> Result<()> {
        if self.is_valid_for(domain) {
            Ok(())
        } else {
            Err(Error::InvalidCompetitor(format!(
                "competitor for {} does not map {} into the disc",
                self.native_domain().name(),
                domain.name()
            )))
        }
    }

    fn raw_jet(&self, z: &Point2, x: Option<&Tangent2>) -> Result<(C64, C64)> {
        let zero = C64::new(0.0, 0.0);
        match self.kind {
            CompetitorKind::LinearSum { tau1, tau2 } => {
                let d = x.map_or(zero, |x| tau1 * x.x1 + tau2 * x.x2);
                Ok((tau1 * z.z1 + tau2 * z.z2, d))
            }
            CompetitorKind::AxisQuotient { tau, axis } => {
                let (va, vo, xa, xo) = if axis == 1 {
                    (z.z1, z.z2, x.map(|x| x.x1), x.map(|x| x.x2))
                } else {
                    (z.z2, z.z1, x.map(|x| x.x2), x.map(|x| x.x1))
                };
                let den = 1.0 - tau * va;
                if den.norm() == 0.0 {
                    return Err(Error::InvalidCompetitor("pole of the axis quotient".into()));
                }
                let d = match (xa, xo) {
                    (Some(xa), Some(xo)) => xo / den + vo * tau * xa / (den * den),
                    _ => zero,
                };
                Ok((vo / den, d))
            }
            CompetitorKind::LempertDual { disc } => {
                let unit = Tangent2::new(zero, zero);
                disc.left_inverse_jet(z, x.unwrap_or(&unit), None)
                    .ok_or_else(|| Error::InvalidCompetitor(format!("left-inverse root not found at {z}")))
            }
        }
    }

    pub fn eval(&self, z: &Point2) -> Result<C64> {
        let (v, _) = self.raw_jet(z, None)?;
        Ok(match self.post {
            Some(a) => a.apply(v),
            None => v,
        })
    }

    /// `(F(z), dF(z)[X])`.
    pub fn jet(&self, z: &Point2, x: &Tangent2) -> Result<(C64, C64)> {
        let (v, d) = self.raw_jet(z, Some(x))?;
        Ok(match self.post {
            Some(a) => (a.apply(v), a.derivative(v) * d),
            None => (v, d),
        })
    }

    /// `p(F(w), F(z))`.
    pub fn pair_value(&self, w: &Point2, z: &Point2) -> Result<f64> {
        Ok(poincare_distance_raw(self.eval(w)?, self.eval(z)?))
    }

    /// `|F'(z)X| / (1 - |F(z)|²)`.
    pub fn tangent_value(&self, z: &Point2, x: &Tangent2) -> Result<f64> {
        let (v, d) = self.jet(z, x)?;
        Ok(d.norm() / (1.0 - v.norm_sqr()))
    }

    pub fn problem_value(&self, problem: &Problem) -> Result<f64> {
        match problem {
            Problem::Pair(w, z) => self.pair_value(w, z),
            Problem::Tangent(z, x) => self.tangent_value(z, x),
        }
    }

    /// Largest `|F|` over `n` random points of `domain`, drawn from `rng`.
    pub fn sampled_sup<R: rand::Rng + ?Sized>(&self, domain: &DomainSpec, n: usize, rng: &mut R) -> Result<f64> {
        let mut sup: f64 = 0.0;
        for _ in 0..n {
            let z = crate::domains::random_point(domain, rng, 1.0 - 1e-9);
            sup = sup.max(self.eval(&z)?.norm());
        }
        Ok(sup)
    }
}

const GRID: usize = 720;
const ANGLE_TOL: f64 = 1e-10;

impl CompetitorFamily {
    pub const ALL: [CompetitorFamily; 3] = [Self::LinearSum, Self::AxisQuotient, Self::LempertDual];

    /// Whether every member maps `domain` into the disc.
    pub fn applies_to(&self, domain: &DomainSpec) -> bool {
        match self {
            Self::LinearSum | Self::AxisQuotient => domain.is_subset_of(&DomainSpec::Diamond),
            Self::LempertDual => true,
        }
    }

    /// Best member for `problem` on `domain`, with its value.
    pub fn best(&self, domain: &DomainSpec, problem: &Problem) -> Result<(f64, Competitor)> {
        if !self.applies_to(domain) {
            return Err(Error::InvalidCompetitor(format!("{self:?} family does not map {} into the disc", domain.name())));
        }
        let one = C64::new(1.0, 0.0);
        match self {
            Self::LinearSum => {
                let score = |th: f64| {
                    let c = Competitor::linear_sum(one, C64::from_polar(1.0, th)).expect("unimodular");
                    c.problem_value(problem).unwrap_or(f64::NEG_INFINITY)
                };
                let (th, v) = circle_max(score, GRID, ANGLE_TOL);
                Ok((v, Competitor::linear_sum(one, C64::from_polar(1.0, th))?))
            }
            Self::AxisQuotient => {
                let mut best: Option<(f64, Competitor)> = None;
                for axis in [1u8, 2] {
                    let score = |th: f64| {
                        let c = Competitor::axis_quotient(C64::from_polar(1.0, th), axis).expect("unimodular");
                        c.problem_value(problem).unwrap_or(f64::NEG_INFINITY)
                    };
                    let (th, v) = circle_max(score, GRID, ANGLE_TOL);
                    if best.as_ref().is_none_or(|b| v > b.0) {
                        best = Some((v, Competitor::axis_quotient(C64::from_polar(1.0, th), axis)?));
                    }
                }
                Ok(best.expect("two axes"))
            }
            Self::LempertDual => {
                let q = domain.exponents().unwrap_or([2.0, 2.0]);
                // the two-sided solver escapes local maxima of the plain dual search
                let (canonical, scale) = match problem {
                    Problem::Tangent(z, x) if !x.is_zero() => {
                        let (u, n) = x.canonical();
                        (Problem::Tangent(*z, u), n)
                    }
                    other => (*other, 1.0),
                };
                let sol = extremal::solve(q, &canonical, 1e-9);
                let c = Competitor::lempert_dual(sol.dual);
                let v = c.problem_value(problem).unwrap_or(scale * sol.lower);
                Ok((v, c))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_non_unimodular_coefficients() {
        assert!(Competitor::linear_sum(c(1.0, 0.0), c(0.5, 0.0)).is_err());
        assert!(Competitor::axis_quotient(c(0.0, 1.0), 3).is_err());
    }

    #[test]
    fn diamond_competitors_map_into_the_disc() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for th in [0.0, 1.0, 2.5, -2.0] {
            let tau = C64::from_polar(1.0, th);
            for comp in [
                Competitor::linear_sum(c(1.0, 0.0), tau).unwrap(),
                Competitor::axis_quotient(tau, 1).unwrap(),
                Competitor::axis_quotient(tau, 2).unwrap(),
            ] {
                assert!(comp.sampled_sup(&DomainSpec::Diamond, 1000, &mut rng).unwrap() < 1.0);
            }
        }
    }

    #[test]
    fn validity_follows_domain_inclusion() {
        let l = Competitor::linear_sum(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(l.is_valid_for(&DomainSpec::Diamond));
        assert!(l.is_valid_for(&DomainSpec::Disc));
        assert!(!l.is_valid_for(&DomainSpec::Ball2));
        let d = Competitor::lempert_dual(ExtremalDisc::linear([2.0, 2.0], [c(0.6, 0.0), c(0.0, 0.8)]));
        assert!(d.is_valid_for(&DomainSpec::Ball2));
        assert!(d.is_valid_for(&DomainSpec::Diamond));
        assert!(!d.is_valid_for(&DomainSpec::Ellipsoid { q1: 4.0, q2: 2.0 }));
    }

    #[test]
    fn jet_matches_finite_difference() {
        let z = Point2::new(c(0.2, 0.1), c(-0.1, 0.3));
        let x = Tangent2::new(c(0.4, -0.2), c(0.1, 0.5));
        let post = DiscAutomorphism::new(C64::from_polar(1.0, 0.7), c(0.2, -0.3)).unwrap();
        for comp in [
            Competitor::linear_sum(c(0.0, 1.0), c(1.0, 0.0)).unwrap().with_post(post),
            Competitor::axis_quotient(C64::from_polar(1.0, 2.0), 2).unwrap().with_post(post),
        ] {
            let h = 1e-7;
            let (v, d) = comp.jet(&z, &x).unwrap();
            let v1 = comp.eval(&(z + x * h)).unwrap();
            assert!(((v1 - v) / h - d).norm() < 1e-5);
        }
    }

    #[test]
    fn axis_quotient_attains_vertical_formula() {
        // k((z1,0),(z1,z2)) = p(0, |z2| / (1 - |z1|)).
        let w = Point2::real(0.5, 0.0);
        let z = Point2::real(0.5, 0.2);
        let (v, _) = CompetitorFamily::AxisQuotient.best(&DomainSpec::Diamond, &Problem::Pair(w, z)).unwrap();
        assert!((v - 0.4f64.atanh()).abs() < 1e-12);
    }

    #[test]
    fn linear_sum_attains_axis_formula() {
        let w = Point2::new(C64::from_polar(0.5, 0.3), c(0.0, 0.0));
        let z = Point2::new(c(0.0, 0.0), C64::from_polar(0.3, -1.2));
        let (v, _) = CompetitorFamily::LinearSum.best(&DomainSpec::Diamond, &Problem::Pair(w, z)).unwrap();
        assert!((v - poincare_distance_raw(c(-0.5, 0.0), c(0.3, 0.0))).abs() < 1e-12);
    }

    #[test]
    fn families_refuse_larger_domains() {
        let p = Problem::Pair(Point2::real(0.1, 0.0), Point2::real(0.0, 0.1));
        assert!(CompetitorFamily::LinearSum.best(&DomainSpec::Ball2, &p).is_err());
    }
}
