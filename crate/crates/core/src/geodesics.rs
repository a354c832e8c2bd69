//! The parametric complex geodesics of the diamond, their linear left
//! inverses, and real geodesics obtained by splicing two complex ones.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::hyperbolic::poincare_distance_raw;
use crate::metrics::{kappa, kobayashi_distance};
use crate::optimize::circle_max;
use crate::{Competitor, DiscAutomorphism, DomainSpec, Error, Point2, Result, Tangent2, UnitDiscPoint, C64};

/// Radius and size of the boundary grid used to check that a geodesic maps into the diamond.
pub const VALIDITY_RADIUS: f64 = 0.999;
pub const VALIDITY_GRID: usize = 256;
/// Largest residual accepted for `F ∘ f = id`.
pub const LEFT_INVERSE_TOL: f64 = 1e-8;

/// `f_j(λ) = a_j ((λ - α_j)/(1 - conj(α_j) λ))^{r_j} ((1 - conj(α_j) λ)/(1 - conj(α0) λ))²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParams {
    pub a: [C64; 2],
    pub alpha: [C64; 2],
    pub r: [u8; 2],
    pub alpha0: C64,
}

fn finite(c: C64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

impl GeodesicParams {
    /// Checks the parameter ranges only; use [`GeodesicParams::validate`] for the
    /// mapping-into-the-diamond check.
    pub fn new(a: [C64; 2], alpha: [C64; 2], r: [u8; 2], alpha0: C64) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidGeodesic(m));
        if !a.iter().chain(alpha.iter()).all(|&c| finite(c)) || !finite(alpha0) {
            return bad("non-finite parameter".into());
        }
        if alpha0.norm() > 1.0 {
            return bad(format!("|alpha0| = {} > 1", alpha0.norm()));
        }
        for j in 0..2 {
            if r[j] > 1 {
                return bad(format!("r{} = {} is not a bit", j + 1, r[j]));
            }
            let m = alpha[j].norm();
            if m > 1.0 || (r[j] == 1 && m >= 1.0) {
                return bad(format!("|alpha{}| = {m} out of range for r = {}", j + 1, r[j]));
            }
        }
        Ok(Self { a, alpha, r, alpha0 })
    }

    /// `λ ↦ (c1 λ, c2 λ)`, a geodesic through the origin when `|c1| + |c2| = 1`.
    pub fn linear(c1: C64, c2: C64) -> Result<Self> {
        let zero = C64::new(0.0, 0.0);
        Self::new([c1, c2], [zero, zero], [1, 1], zero)
    }

    /// Indices (1-based) with `r_j = 1`.
    pub fn zero_set(&self) -> Vec<usize> {
        (0..2).filter(|&j| self.r[j] == 1).map(|j| j + 1).collect()
    }

    pub fn has_full_zero_set(&self) -> bool {
        self.r == [1, 1]
    }

    pub fn eval(&self, lambda: C64) -> Point2 {
        let d0 = 1.0 - self.alpha0.conj() * lambda;
        let f = |j: usize| {
            let dj = 1.0 - self.alpha[j].conj() * lambda;
            let q = dj / d0;
            let base = self.a[j] * q * q;
            if self.r[j] == 1 {
                self.a[j] * (lambda - self.alpha[j]) * dj / (d0 * d0)
            } else {
                base
            }
        };
        Point2::new(f(0), f(1))
    }

    pub fn derivative(&self, lambda: C64) -> Tangent2 {
        let d0 = 1.0 - self.alpha0.conj() * lambda;
        let f = self.eval(lambda).as_array();
        let d = |j: usize| {
            let al = self.alpha[j];
            let dj = 1.0 - al.conj() * lambda;
            let num = if self.r[j] == 1 { dj - al.conj() * (lambda - al) } else { -2.0 * al.conj() * dj };
            self.a[j] * num / (d0 * d0) + f[j] * 2.0 * self.alpha0.conj() / d0
        };
        Tangent2::new(d(0), d(1))
    }

    /// `μ ↦ f((μ + c)/(1 + conj(c) μ))`, again in the family, with base point `f(c)`.
    pub fn precompose(&self, c: C64) -> Result<Self> {
        if c.norm() >= 1.0 {
            return Err(Error::OutsideDisc(format!("{c}")));
        }
        let m = |al: C64| (al - c) / (1.0 - c.conj() * al);
        let d0 = 1.0 - self.alpha0.conj() * c;
        let mut a = self.a;
        let mut alpha = self.alpha;
        for j in 0..2 {
            let al = self.alpha[j];
            let dj = 1.0 - al.conj() * c;
            let ratio = dj / d0;
            a[j] *= ratio * ratio;
            if self.r[j] == 1 {
                a[j] *= (1.0 - al * c.conj()) / dj;
            }
            alpha[j] = m(al);
        }
        Self::new(a, alpha, self.r, m(self.alpha0))
    }

    /// `max (|f1| + |f2|)` over `n` points of the circle of radius `radius`.
    pub fn boundary_max(&self, n: usize, radius: f64) -> f64 {
        (0..n)
            .map(|k| self.eval(C64::from_polar(radius, TAU * k as f64 / n as f64)).l1())
            .fold(0.0, f64::max)
    }

    pub fn is_valid(&self) -> bool {
        self.boundary_max(VALIDITY_GRID, VALIDITY_RADIUS) < 1.0
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.boundary_max(VALIDITY_GRID, VALIDITY_RADIUS);
        if m < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidGeodesic(format!("|f1| + |f2| reaches {m} on |λ| = {VALIDITY_RADIUS}")))
        }
    }

    /// A random geodesic with zero set `{1, 2}`: zeros `α_j` with `|α_j| ≤ max_alpha`,
    /// random phases, and moduli of `a_j` chosen so that `|f1| + |f2| = 1` on the circle.
    pub fn random_full_zero_set<R: Rng + ?Sized>(rng: &mut R, max_alpha: f64) -> Self {
        let mut alpha = [C64::new(0.0, 0.0); 2];
        let mut t = [0.0; 2];
        for j in 0..2 {
            alpha[j] = C64::from_polar(max_alpha * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
            t[j] = rng.gen_range(0.05..1.0);
        }
        let big_a: f64 = (0..2).map(|j| t[j] * (1.0 + alpha[j].norm_sqr())).sum();
        let big_b: C64 = (0..2).map(|j| t[j] * alpha[j]).sum();
        let b2 = big_b.norm_sqr();
        // k solves k² |B|² - k A + 1 = 0 (the root with |kB| < 1)
        let k = if b2 < 1e-300 { 1.0 / big_a } else { 2.0 / (big_a + (big_a * big_a - 4.0 * b2).sqrt()) };
        let a = [0, 1].map(|j| C64::from_polar(k * t[j], rng.gen_range(0.0..TAU)));
        Self { a, alpha, r: [1, 1], alpha0: k * big_b }
    }
}

/// `f(λ)` for `λ` in the open disc.
pub fn evaluate_geodesic(g: &GeodesicParams, lambda: UnitDiscPoint) -> Point2 {
    g.eval(lambda.value())
}

/// Sunflower sample of `n` points in the disc of radius `0.95`.
fn disc_samples(n: usize) -> Vec<C64> {
    let golden = TAU * (1.0 - 1.0 / 1.618_033_988_749_895);
    (0..n).map(|k| C64::from_polar(0.95 * ((k as f64 + 0.5) / n as f64).sqrt(), golden * k as f64)).collect()
}

fn line_samples(n: usize) -> Vec<f64> {
    (0..n).map(|k| -0.95 + 1.9 * k as f64 / (n.max(2) - 1) as f64).collect()
}

const FIT_NODES: [(f64, f64); 3] = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)];
const SEARCH_PROBES: [(f64, f64); 4] = [(-0.6, 0.3), (0.2, -0.7), (-0.4, -0.4), (0.7, 0.6)];

/// The post-composition `φ` with `φ(v_k) = λ_k` at the first two fit nodes
/// (`λ = 0` and `λ = 0.5`), i.e. `φ = rotation ∘ (to origin at v_0)`.
fn fit_post(values: [C64; 2]) -> Option<DiscAutomorphism> {
    let to0 = DiscAutomorphism::to_origin(values[0]).ok()?;
    let u = to0.apply(values[1]);
    if u.norm() < 1e-14 {
        return None;
    }
    let rot = C64::new(FIT_NODES[1].0, FIT_NODES[1].1) / u;
    DiscAutomorphism::new(rot / rot.norm(), C64::new(0.0, 0.0)).ok().map(|r| r.compose(&to0))
}

/// Fit `φ ∘ (z1 + ω z2)` to `f` on the fit nodes; the residual is taken over
/// the third node and the probes of every geodesic in `targets`.
fn fit_linear(omega: C64, targets: &[GeodesicParams]) -> Option<(Competitor, f64)> {
    let lin = Competitor::linear_sum(C64::new(1.0, 0.0), omega).ok()?;
    let first = &targets[0];
    let v = |g: &GeodesicParams, l: (f64, f64)| lin.eval(&g.eval(C64::new(l.0, l.1))).ok();
    let post = fit_post([v(first, FIT_NODES[0])?, v(first, FIT_NODES[1])?])?;
    let f = lin.with_post(post);
    let mut res: f64 = 0.0;
    for g in targets {
        for l in FIT_NODES.iter().chain(SEARCH_PROBES.iter()) {
            let lam = C64::new(l.0, l.1);
            res = res.max((f.eval(&g.eval(lam)).ok()? - lam).norm());
        }
    }
    Some((f, res))
}

fn search_linear(targets: &[GeodesicParams]) -> (Competitor, f64) {
    let score = |th: f64| fit_linear(C64::from_polar(1.0, th), targets).map_or(-f64::INFINITY, |(_, r)| -r);
    let (th, _) = circle_max(score, 720, 1e-12);
    let fallback = Competitor::linear_sum(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).expect("unimodular");
    let (f, _) = fit_linear(C64::from_polar(1.0, th), targets).unwrap_or((fallback, f64::INFINITY));
    let res = targets.iter().map(|g| verify_left_inverse(&f, GeodesicRef::Complex(g), 64)).fold(0.0, f64::max);
    (f, res)
}

/// A linear left inverse `φ ∘ (z1 + ω z2)` of a geodesic with zero set `{1, 2}`.
pub fn left_inverse_for(g: &GeodesicParams) -> Result<Competitor> {
    if !g.has_full_zero_set() {
        return Err(Error::Precondition(format!("zero set is {:?}, not [1, 2]", g.zero_set())));
    }
    let (f, res) = search_linear(std::slice::from_ref(g));
    if res > LEFT_INVERSE_TOL {
        return Err(Error::NoLinearLeftInverse { residual: res });
    }
    Ok(f)
}

/// A single linear left inverse `φ ∘ (z1 + ω z2)` for every geodesic in `targets`, if one exists.
pub fn common_linear_left_inverse(targets: &[GeodesicParams]) -> Option<Competitor> {
    if targets.is_empty() {
        return None;
    }
    let (f, res) = search_linear(targets);
    (res <= LEFT_INVERSE_TOL).then_some(f)
}

/// What a left inverse is checked against.
#[derive(Debug, Clone, Copy)]
pub enum GeodesicRef<'a> {
    Complex(&'a GeodesicParams),
    Real(&'a RealGeodesic),
}

/// `max |F(f(λ)) - λ|` over `samples` points of the disc, or `max |F(γ(s)) - s|`
/// over `samples` points of `(-0.95, 0.95)`; infinite if `F` cannot be evaluated.
pub fn verify_left_inverse(f: &Competitor, target: GeodesicRef<'_>, samples: usize) -> f64 {
    let err = |p: Point2, l: C64| f.eval(&p).map_or(f64::INFINITY, |v| (v - l).norm());
    match target {
        GeodesicRef::Complex(g) => disc_samples(samples).into_iter().map(|l| err(g.eval(l), l)).fold(0.0, f64::max),
        GeodesicRef::Real(c) => {
            line_samples(samples).into_iter().map(|s| err(c.eval(s), C64::new(s, 0.0))).fold(0.0, f64::max)
        }
    }
}

/// `γ(t) = negative(t)` for `t ≤ 0` and `positive(t)` for `t ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealGeodesic {
    pub negative: GeodesicParams,
    pub positive: GeodesicParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_inverse: Option<Competitor>,
}

impl RealGeodesic {
    /// The real trace `t ↦ f(t)` of a complex geodesic.
    pub fn trace(f: GeodesicParams, left_inverse: Option<Competitor>) -> Self {
        Self { negative: f, positive: f, left_inverse }
    }

    pub fn eval(&self, t: f64) -> Point2 {
        let g = if t <= 0.0 { &self.negative } else { &self.positive };
        g.eval(C64::new(t, 0.0))
    }
}

/// Splice `f` on `(-1, 0]` with `g` on `[0, 1)`; both must pass through the same
/// base point and share a left inverse.
pub fn splice_real_geodesic(f: &GeodesicParams, g: &GeodesicParams, left_inverse: Option<Competitor>) -> Result<RealGeodesic> {
    let zero = C64::new(0.0, 0.0);
    let (wf, wg) = (f.eval(zero), g.eval(zero));
    if (wf - wg).as_tangent().norm() > 1e-10 {
        return Err(Error::Precondition(format!("base points differ: {wf} vs {wg}")));
    }
    let targets = [*f, *g];
    let common = match left_inverse {
        Some(c) => {
            let res = targets.iter().map(|h| verify_left_inverse(&c, GeodesicRef::Complex(h), 64)).fold(0.0, f64::max);
            if res > LEFT_INVERSE_TOL {
                return Err(Error::NoLinearLeftInverse { residual: res });
            }
            c
        }
        None => common_linear_left_inverse(&targets).ok_or(Error::NoLinearLeftInverse { residual: f64::INFINITY })?,
    };
    Ok(RealGeodesic { negative: *f, positive: *g, left_inverse: Some(common) })
}

/// Worst defects of a real geodesic on a sample grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealGeodesicReport {
    /// `max |k_△(γ(t), γ(s)) - p(t, s)|` over grid pairs.
    pub distance_defect: f64,
    /// `max |F(γ(s)) - s|`, absent without an attached left inverse.
    pub left_inverse_residual: Option<f64>,
    pub pairs: usize,
}

impl RealGeodesicReport {
    /// Distances agree to `distance_tol` and the witness (if any) to [`LEFT_INVERSE_TOL`].
    pub fn passes(&self, distance_tol: f64) -> bool {
        self.distance_defect < distance_tol && self.left_inverse_residual.is_none_or(|r| r < LEFT_INVERSE_TOL)
    }
}

/// Compares `k_△(γ(t), γ(s))` with `p(t, s)` for all pairs of `grid`.
pub fn validate_real_geodesic(gamma: &RealGeodesic, grid: &[f64]) -> Result<RealGeodesicReport> {
    let mut defect: f64 = 0.0;
    let mut pairs = 0;
    for (i, &t) in grid.iter().enumerate() {
        for &s in &grid[i + 1..] {
            let d = kobayashi_distance(&DomainSpec::Diamond, &gamma.eval(t), &gamma.eval(s))?;
            let d = d.require_certified(2e-4)?;
            defect = defect.max((d.value - poincare_distance_raw(C64::new(t, 0.0), C64::new(s, 0.0))).abs());
            pairs += 1;
        }
    }
    let left_inverse_residual = gamma.left_inverse.map(|f| verify_left_inverse(&f, GeodesicRef::Real(gamma), 101));
    Ok(RealGeodesicReport { distance_defect: defect, left_inverse_residual, pairs })
}

/// Whether `κ_D(w; t Xf + (1 - t) Xg) = 1` (to `1e-6`) for `t` on a 21-point grid of `[0, 1]`.
pub fn common_left_inverse_criterion(w: &Point2, xf: &Tangent2, xg: &Tangent2, domain: &DomainSpec) -> Result<bool> {
    const TOL: f64 = 1e-6;
    for x in [xf, xg] {
        let k = kappa(domain, w, x)?.value;
        if (k - 1.0).abs() > TOL {
            return Err(Error::Precondition(format!("tangent {x} has metric {k}, expected 1")));
        }
    }
    for i in 1..20 {
        let t = i as f64 / 20.0;
        let x = *xf * t + *xg * (1.0 - t);
        let k = kappa(domain, w, &x)?.value;
        if (k - 1.0).abs() > TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn axis(j: usize) -> GeodesicParams {
        let z = c(0.0, 0.0);
        let mut a = [z, z];
        a[j] = c(1.0, 0.0);
        let mut r = [1, 1];
        r[1 - j] = 0;
        GeodesicParams::new(a, [z, z], r, z).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let p = evaluate_geodesic(&axis(0), UnitDiscPoint::real(0.3).unwrap());
        assert_eq!(p, Point2::real(0.3, 0.0));
        let p = evaluate_geodesic(&axis(1), UnitDiscPoint::real(-0.7).unwrap());
        assert_eq!(p, Point2::real(0.0, -0.7));
        assert!(UnitDiscPoint::real(1.0).is_err());
    }

    #[test]
    fn parameter_checks() {
        let z = c(0.0, 0.0);
        assert!(GeodesicParams::new([z, z], [c(1.0, 0.0), z], [1, 1], z).is_err());
        assert!(GeodesicParams::new([z, z], [c(1.0, 0.0), z], [0, 1], z).is_ok());
        assert!(GeodesicParams::new([z, z], [z, z], [2, 1], z).is_err());
        assert!(GeodesicParams::linear(c(0.7, 0.0), c(0.4, 0.0)).unwrap().validate().is_err());
    }

    #[test]
    fn random_geodesics_map_into_the_diamond() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = GeodesicParams::random_full_zero_set(&mut rng, 0.9);
            g.validate().unwrap();
            let on_circle = g.boundary_max(64, 1.0);
            assert!((on_circle - 1.0).abs() < 1e-12);
            for _ in 0..1000 {
                let l = C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
                assert!(g.eval(l * 0.999_999).l1() < 1.0);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut g = GeodesicParams::random_full_zero_set(&mut rng, 0.8);
        for r in [[1, 1], [1, 0], [0, 0]] {
            g.r = r;
            let l = c(0.2, -0.3);
            let h = 1e-6;
            let fd = (g.eval(l + h) - g.eval(l - h)).as_tangent() * (0.5 / h);
            assert!((fd - g.derivative(l)).norm() < 1e-8);
        }
    }

    #[test]
    fn precompose_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in [[1, 1], [0, 1], [1, 0]] {
            let mut g = GeodesicParams::random_full_zero_set(&mut rng, 0.8);
            g.r = r;
            let cc = c(0.3, -0.5);
            let h = g.precompose(cc).unwrap();
            for mu in [c(0.0, 0.0), c(0.4, 0.1), c(-0.2, 0.7)] {
                let lam = (mu + cc) / (1.0 + cc.conj() * mu);
                assert!((h.eval(mu) - g.eval(lam)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn left_inverse_examples() {
        assert!(matches!(left_inverse_for(&axis(0)), Err(Error::Precondition(_))));
        let g = GeodesicParams::linear(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        let f = left_inverse_for(&g).unwrap();
        assert!(verify_left_inverse(&f, GeodesicRef::Complex(&g), 64) < 1e-12);
        let sum = Competitor::linear_sum(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(verify_left_inverse(&sum, GeodesicRef::Complex(&g), 64) < 1e-12);
    }

    #[test]
    fn left_inverse_of_random_geodesics() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let g = GeodesicParams::random_full_zero_set(&mut rng, 0.9);
            let f = left_inverse_for(&g).unwrap();
            assert!(verify_left_inverse(&f, GeodesicRef::Complex(&g), 256) < LEFT_INVERSE_TOL);
        }
    }

    #[test]
    fn partial_zero_set_geodesic_can_still_have_a_linear_left_inverse() {
        // zero set {1}; z2 - z1 is a left inverse, but left_inverse_for only accepts zero set {1, 2}
        let s: f64 = 0.4;
        let k = 1.0 / (1.0 + s).powi(2);
        let g = GeodesicParams::new([c(-k, 0.0), c(s * k, 0.0)], [c(s, 0.0), c(-1.0, 0.0)], [1, 0], c(0.0, 0.0)).unwrap();
        g.validate().unwrap();
        let f = common_linear_left_inverse(&[g]).unwrap();
        assert!((f.eval(&g.eval(c(0.3, 0.2))).unwrap() - c(0.3, 0.2)).norm() < 1e-8);
        assert!(matches!(left_inverse_for(&g), Err(Error::Precondition(_))));
    }

    #[test]
    fn example_real_geodesic() {
        let gamma = RealGeodesic {
            negative: axis(0),
            positive: axis(1),
            left_inverse: Some(Competitor::linear_sum(c(1.0, 0.0), c(1.0, 0.0)).unwrap()),
        };
        assert!(verify_left_inverse(&gamma.left_inverse.unwrap(), GeodesicRef::Real(&gamma), 101) < 1e-12);
        let diff = Competitor::linear_sum(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!(verify_left_inverse(&diff, GeodesicRef::Real(&gamma), 101) >= 1.0 - 1e-2);
        let grid: Vec<f64> = (-4..=4).map(|k| k as f64 * 0.2).collect();
        let report = validate_real_geodesic(&gamma, &grid).unwrap();
        assert!(report.passes(1e-6), "{report:?}");
    }

    #[test]
    fn splices() {
        let spliced = splice_real_geodesic(&axis(0), &axis(1), None).unwrap();
        let grid = [-0.6, -0.2, 0.0, 0.3, 0.7];
        assert!(validate_real_geodesic(&spliced, &grid).unwrap().passes(2e-4));
        let diag = GeodesicParams::linear(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        let spliced = splice_real_geodesic(&diag, &axis(1), None).unwrap();
        assert!(validate_real_geodesic(&spliced, &grid).unwrap().passes(2e-4));
        let same = splice_real_geodesic(&diag, &diag, None).unwrap();
        assert!(validate_real_geodesic(&same, &grid).unwrap().passes(2e-4));
        let antipodal = GeodesicParams::new([c(0.0, 0.0), c(-1.0, 0.0)], [c(0.0, 0.0); 2], [0, 1], c(0.0, 0.0)).unwrap();
        assert!(splice_real_geodesic(&axis(1), &antipodal, None).is_err());
        let flipped = GeodesicParams::new([c(0.0, 0.0), c(-1.0, 0.0)], [c(0.0, 0.0); 2], [1, 1], c(0.0, 0.0)).unwrap();
        assert!(splice_real_geodesic(&axis(0), &flipped, None).is_ok());
        let moved = axis(0).precompose(c(0.2, 0.0)).unwrap();
        assert!(matches!(splice_real_geodesic(&moved, &axis(1), None), Err(Error::Precondition(_))));
    }

    #[test]
    fn criterion_examples() {
        let o = Point2::ORIGIN;
        let (e1, e2) = (Tangent2::real(1.0, 0.0), Tangent2::real(0.0, 1.0));
        assert!(common_left_inverse_criterion(&o, &e1, &e2, &DomainSpec::Diamond).unwrap());
        assert!(!common_left_inverse_criterion(&o, &e1, &Tangent2::real(-1.0, 0.0), &DomainSpec::Diamond).unwrap());
        let u = Tangent2::real(0.6, 0.8);
        assert!(!common_left_inverse_criterion(&o, &e1, &u, &DomainSpec::Ball2).unwrap());
        assert!(common_left_inverse_criterion(&o, &e1, &Tangent2::real(2.0, 0.0), &DomainSpec::Diamond).is_err());
    }

    #[test]
    fn json_shape() {
        let g = GeodesicParams::linear(c(0.5, 0.0), c(0.0, 0.5)).unwrap();
        let v: serde_json::Value = serde_json::to_value(g).unwrap();
        assert_eq!(v["a"][1], serde_json::json!([0.0, 0.5]));
        assert_eq!(v["r"], serde_json::json!([1, 1]));
        assert_eq!(v["alpha0"], serde_json::json!([0.0, 0.0]));
        let back: GeodesicParams = serde_json::from_value(v).unwrap();
        assert_eq!(back, g);
    }
}
