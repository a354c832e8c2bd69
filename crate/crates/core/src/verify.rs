//! Verification suites: each check reports what it measures, the measured
//! value and the tolerance it is held to.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    classify_flatness, halton_directions, rigidity_experiment, sample_indicatrix, step_experiments, CandidateIsometry,
    CertifiedPairs, Flatness, RigidityConfig, ACCEPT_DEFECT, CHORD_HALF_WIDTH, REJECT_DEFECT,
};
use crate::extremal::Problem;
use crate::geodesics::{
    common_left_inverse_criterion, common_linear_left_inverse, left_inverse_for, splice_real_geodesic,
    validate_real_geodesic, verify_left_inverse, GeodesicParams, GeodesicRef,
};
use crate::hyperbolic::poincare_distance_raw;
use crate::metrics::{kobayashi_distance, quasieffective_branches};
use crate::oracle::{sandwich, Budget};
use crate::{DomainSpec, Point2, Result, Tangent2, C64};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Formulas,
    Geodesics,
    Indicatrix,
    Rigidity,
    All,
}

impl std::str::FromStr for Suite {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formulas" => Ok(Self::Formulas),
            "geodesics" => Ok(Self::Geodesics),
            "indicatrix" => Ok(Self::Indicatrix),
            "rigidity" => Ok(Self::Rigidity),
            "all" => Ok(Self::All),
            _ => Err(crate::Error::Parse(format!("unknown suite '{s}'"))),
        }
    }
}

/// Whether a check passes when the measured value is below or above the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The identity or property being checked.
    pub anchor: String,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: &str, anchor: &str, measured: f64, tolerance: f64, bound: Bound) -> Self {
        let passed = match bound {
            Bound::Below => measured < tolerance,
            Bound::Above => measured > tolerance,
        };
        Self { name: name.into(), anchor: anchor.into(), measured, tolerance, bound, passed, detail: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Side of the `(t, s)` grid for the closed-form identities.
    pub grid: usize,
    /// Directions per indicatrix sample.
    pub directions: usize,
    /// Random base points per strictly convex domain.
    pub base_points: usize,
    /// Random geodesics in the geodesics suite.
    pub geodesics: usize,
    /// Certified pairs per candidate in the rigidity suite.
    pub pairs: usize,
    /// Random real-linear candidates in the rigidity suite.
    pub random_linear: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 0, grid: 20, directions: 1000, base_points: 5, geodesics: 100, pairs: 500, random_linear: 1000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub suite: Suite,
    pub config: VerifyConfig,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Grid `0.95 (i + 1/2)/n`, `i < n`.
pub fn open_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.95 * (i as f64 + 0.5) / n as f64).collect()
}

/// Largest `|sandwich midpoint − closed form|` over the pairs, and the largest width.
fn sandwich_agreement<I>(pairs: I) -> Result<(f64, f64)>
where
    I: IntoIterator<Item = (Point2, Point2, f64)>,
{
    let mut err: f64 = 0.0;
    let mut width: f64 = 0.0;
    for (w, z, exact) in pairs {
        let s = sandwich(&DomainSpec::Diamond, &Problem::Pair(w, z), &Budget::default())?;
        width = width.max(if s.certified { s.width } else { f64::INFINITY });
        err = err.max((s.midpoint() - exact).abs());
    }
    Ok((err, width))
}

pub fn formulas(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let g = open_grid(cfg.grid);
    let p = |a: f64, b: f64| poincare_distance_raw(C64::new(a, 0.0), C64::new(b, 0.0));
    let axis = g.iter().flat_map(|&t| g.iter().map(move |&s| (Point2::real(t, 0.0), Point2::real(0.0, s), p(-t, s))));
    let (e1, w1) = sandwich_agreement(axis)?;
    let vertical = g
        .iter()
        .flat_map(|&t| g.iter().filter(move |&&s| s < 1.0 - t).map(move |&s| (Point2::real(t, 0.0), Point2::real(t, s), p(0.0, s / (1.0 - t)))));
    let (e2, w2) = sandwich_agreement(vertical)?;
    let mut origin: f64 = 0.0;
    for u in halton_directions(cfg.directions) {
        let (k, _) = quasieffective_branches(&Point2::ORIGIN, &u)?.formula();
        origin = origin.max((k - (u.x1.norm() + u.x2.norm())).abs());
    }
    Ok(vec![
        Check::new("axis distance identity", "k((t,0),(0,s)) = p(-t,s)", e1, 2e-4, Bound::Below)
            .with_detail(format!("max certified width {w1:.3e}")),
        Check::new("axis distance certified", "sandwich width", w1, 2e-4, Bound::Below),
        Check::new("vertical distance identity", "k((t,0),(t,s)) = p(0,s/(1-t))", e2, 2e-4, Bound::Below)
            .with_detail(format!("max certified width {w2:.3e}")),
        Check::new("vertical distance certified", "sandwich width", w2, 2e-4, Bound::Below),
        Check::new("indicatrix at the origin", "kappa(0;u) = |u1|+|u2|", origin, 1e-6, Bound::Below),
    ])
}

/// Pairs of linear geodesics through the origin: the first `n/2` lie in one
/// face of the indicatrix (common left inverse), the rest in different faces.
pub fn constructed_face_pairs(n: usize, seed: u64) -> Vec<(GeodesicParams, GeodesicParams, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let same = k < n / 2;
            let (a, b) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
            let s1: f64 = rng.gen_range(0.1..0.9);
            let mut s2 = rng.gen_range(0.1..0.9);
            if (s1 - s2).abs() < 0.05 {
                s2 = if s1 < 0.5 { s1 + 0.3 } else { s1 - 0.3 };
            }
            let f = GeodesicParams::linear(C64::from_polar(s1, a), C64::from_polar(1.0 - s1, b)).expect("valid");
            let (a2, b2) = if same {
                (a, b)
            } else {
                let shift = rng.gen_range(0.3..TAU - 0.3);
                if rng.gen::<bool>() { (a + shift, b) } else { (a, b + shift) }
            };
            let g = GeodesicParams::linear(C64::from_polar(s2, a2), C64::from_polar(1.0 - s2, b2)).expect("valid");
            (f, g, same)
        })
        .collect()
}

pub fn geodesics(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut residual: f64 = 0.0;
    let mut realize: f64 = 0.0;
    for _ in 0..cfg.geodesics {
        let g = GeodesicParams::random_full_zero_set(&mut rng, 0.9);
        let f = left_inverse_for(&g)?;
        residual = residual.max(verify_left_inverse(&f, GeodesicRef::Complex(&g), 64));
        for _ in 0..5 {
            let s = C64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..TAU));
            let z = C64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..TAU));
            let d = kobayashi_distance(&DomainSpec::Diamond, &g.eval(s), &g.eval(z))?.require_certified(2e-4)?;
            realize = realize.max((d.value - poincare_distance_raw(s, z)).abs());
        }
    }
    let mut mismatches = 0usize;
    let grid = [-0.7, -0.3, 0.0, 0.4, 0.8];
    for (f, g, same) in constructed_face_pairs(50, cfg.seed) {
        let criterion =
            common_left_inverse_criterion(&Point2::ORIGIN, &f.derivative(C64::new(0.0, 0.0)), &g.derivative(C64::new(0.0, 0.0)), &DomainSpec::Diamond)?;
        let ok = if same {
            criterion
                && splice_real_geodesic(&f, &g, None)
                    .and_then(|gamma| validate_real_geodesic(&gamma, &grid))
                    .is_ok_and(|r| r.passes(2e-4))
        } else {
            !criterion && common_linear_left_inverse(&[f, g]).is_none()
        };
        mismatches += usize::from(!ok);
    }
    Ok(vec![
        Check::new("linear left inverses", "(z1 + w z2) o f = id up to an automorphism", residual, 1e-8, Bound::Below),
        Check::new("geodesics are extremal", "k(f(s), f(z)) = p(s, z)", realize, 2e-4, Bound::Below),
        Check::new("common left inverse criterion", "criterion <=> common left inverse", mismatches as f64, 0.5, Bound::Below),
    ])
}

fn random_base_points(domain: &DomainSpec, n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| crate::domains::random_point(domain, &mut rng, 0.85)).collect()
}

/// Directions at the origin of the diamond whose FLAT flag disagrees with the
/// face prediction, ignoring a band of width one chord around the axes.
pub fn diamond_face_mismatches(directions: usize) -> Result<(usize, usize)> {
    let s = sample_indicatrix(&DomainSpec::Diamond, &Point2::ORIGIN, directions)?;
    let d = classify_flatness(&s)?;
    let mut bad = 0;
    let mut flat = 0;
    for (i, det) in d.iter().enumerate() {
        let b = s.boundary_point(i);
        let reach = CHORD_HALF_WIDTH * s.radii[i] / std::f64::consts::SQRT_2;
        let m = b.x1.norm().min(b.x2.norm());
        flat += usize::from(det.flag == Flatness::Flat);
        if m > 1.5 * reach {
            let face = Tangent2::new(b.x1 / b.x1.norm(), -b.x2 / b.x2.norm()) * std::f64::consts::FRAC_1_SQRT_2;
            let along = (face.x1.conj() * det.flat_direction.x1 + face.x2.conj() * det.flat_direction.x2).re.abs();
            bad += usize::from(det.flag != Flatness::Flat || along < 1.0 - 1e-3);
        } else if m < 0.5 * reach {
            bad += usize::from(det.flag == Flatness::Flat);
        }
    }
    Ok((bad, flat))
}

pub fn indicatrix(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let (bad, flat) = diamond_face_mismatches(cfg.directions)?;
    let mut checks = vec![Check::new("diamond flat along faces", "I(0) is the diamond", bad as f64, 0.5, Bound::Below)
        .with_detail(format!("{flat} FLAT directions of {}", cfg.directions))];
    for (name, domain) in [("ball", DomainSpec::Ball2), ("E{2,1}", DomainSpec::Ellipsoid { q1: 2.0, q2: 1.0 })] {
        let mut flats = 0usize;
        let mut inconclusive = 0usize;
        for p in random_base_points(&domain, cfg.base_points, cfg.seed) {
            let s = sample_indicatrix(&domain, &p, cfg.directions)?;
            for det in classify_flatness(&s)? {
                flats += usize::from(det.flag == Flatness::Flat);
                inconclusive += usize::from(det.flag == Flatness::Inconclusive);
            }
        }
        checks.push(
            Check::new(&format!("{name} strictly convex"), "no flat directions", flats as f64, 0.5, Bound::Below)
                .with_detail(format!("{inconclusive} INCONCLUSIVE directions")),
        );
    }
    Ok(checks)
}

pub fn rigidity(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let rc = RigidityConfig { pairs: cfg.pairs, seed: cfg.seed, rotation_grid: 2, random_linear: cfg.random_linear };
    let report = rigidity_experiment(&rc)?;
    let family = report.candidates.iter().filter(|c| c.family_match.is_some());
    let others = report.candidates.iter().filter(|c| c.family_match.is_none());
    let family_defect = family.clone().map(|c| c.defect).fold(0.0, f64::max);
    let family_pairs = family.clone().map(|c| c.evaluated).min().unwrap_or(0);
    let reject = others.clone().map(|c| c.defect).fold(f64::INFINITY, f64::min);
    let off_axis = others
        .clone()
        .filter_map(|c| c.witness)
        .all(|(w, z)| [w.z1, w.z2, z.z1, z.z2].iter().all(|v| v.norm() >= crate::analysis::OFF_AXIS));
    let half = CandidateIsometry::half_conjugation(2)?;
    let axes = CertifiedPairs::on_axes(50, cfg.seed)?;
    let on_axes = crate::analysis::isometry_defect_on(&half, &axes, None)?.defect;
    let steps_ok = family.clone().all(|c| {
        let s = c.steps;
        s.origin_fixed && s.axes_preserved && s.moduli_preserved && s.rays_linear
    });
    let h = step_experiments(&half, 50, cfg.seed);
    let half_steps = h.origin_fixed && h.axes_preserved && h.moduli_preserved;
    Ok(vec![
        Check::new("family members are isometries", "rotations and conjugations", family_defect, ACCEPT_DEFECT, Bound::Below)
            .with_detail(format!("at least {family_pairs} certified pairs each")),
        Check::new("non-family candidates rejected", "rigidity", reject, REJECT_DEFECT, Bound::Above).with_detail(format!(
            "{} candidates; witnesses off the axes: {off_axis}",
            report.candidates.len() - family.count()
        )),
        Check::new("witnesses off the axes", "off-axis witness pairs", f64::from(u8::from(!off_axis)), 0.5, Bound::Below),
        Check::new("half conjugation isometric on the axes", "axes preserved", on_axes, ACCEPT_DEFECT, Bound::Below),
        Check::new("structural steps", "origin, axes, moduli, rays", f64::from(u8::from(!(steps_ok && half_steps))), 0.5, Bound::Below),
    ])
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let checks = match suite {
        Suite::Formulas => formulas(cfg)?,
        Suite::Geodesics => geodesics(cfg)?,
        Suite::Indicatrix => indicatrix(cfg)?,
        Suite::Rigidity => rigidity(cfg)?,
        Suite::All => {
            let mut all = formulas(cfg)?;
            all.extend(geodesics(cfg)?);
            all.extend(indicatrix(cfg)?);
            all.extend(rigidity(cfg)?);
            all
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { schema_version: SCHEMA_VERSION, suite, config: cfg.clone(), checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig { seed: 3, grid: 4, directions: 40, base_points: 1, geodesics: 3, pairs: 10, random_linear: 5 }
    }

    #[test]
    fn small_suites_pass() {
        for suite in [Suite::Formulas, Suite::Geodesics, Suite::Indicatrix, Suite::Rigidity] {
            let r = run_suite(suite, &small()).unwrap();
            assert!(r.passed, "{:#?}", r.checks);
        }
    }

    #[test]
    fn face_pairs_split_evenly() {
        let p = constructed_face_pairs(10, 1);
        assert_eq!(p.iter().filter(|x| x.2).count(), 5);
        for (f, g, _) in p {
            f.validate().unwrap();
            g.validate().unwrap();
        }
    }
}
