//! Candidate isometries of the diamond and the numerical experiments that
//! separate the rotation/conjugation family from everything else.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{halton_directions, kappa_hinted};
use crate::metrics::kobayashi_distance;
use crate::optimize::circle_max;
use crate::{DiamondSymmetry, DomainSpec, Error, Point2, Result, Tangent2, C64};

/// Sandwich width required of every distance entering a defect.
pub const CERTIFIED_WIDTH: f64 = 2e-4;
/// Family members must stay below this defect.
pub const ACCEPT_DEFECT: f64 = 5e-4;
/// Rejection threshold for non-family candidates; see [`calibrate_rejection`].
pub const REJECT_DEFECT: f64 = 1e-2;
/// Sampled points keep `|z_j| ≥ OFF_AXIS` in both coordinates.
pub const OFF_AXIS: f64 = 0.05;

type Matrix = [[f64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CandidateIsometry {
    Symmetry { symmetry: DiamondSymmetry },
    /// Conjugation of one coordinate (`1` or `2`), identity on the other.
    HalfConjugation { coordinate: u8 },
    /// Row-major matrix acting on `(Re z1, Im z1, Re z2, Im z2)`.
    GeneralRealLinear { matrix: Matrix },
}

fn apply_matrix(m: &Matrix, v: [f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| (0..4).map(|j| m[i][j] * v[j]).sum())
}

fn real4(a: [C64; 2]) -> [f64; 4] {
    [a[0].re, a[0].im, a[1].re, a[1].im]
}

fn complex2(v: [f64; 4]) -> [C64; 2] {
    [C64::new(v[0], v[1]), C64::new(v[2], v[3])]
}

impl CandidateIsometry {
    pub fn half_conjugation(coordinate: u8) -> Result<Self> {
        if coordinate != 1 && coordinate != 2 {
            return Err(Error::Precondition(format!("coordinate must be 1 or 2, got {coordinate}")));
        }
        Ok(Self::HalfConjugation { coordinate })
    }

    pub fn matrix(&self) -> Matrix {
        match self {
            Self::Symmetry { symmetry } => symmetry.real_matrix(),
            Self::HalfConjugation { coordinate } => {
                let one = C64::new(1.0, 0.0);
                let c = *coordinate == 1;
                DiamondSymmetry::new(one, one, c, !c, false).expect("unimodular").real_matrix()
            }
            Self::GeneralRealLinear { matrix } => *matrix,
        }
    }

    pub fn apply(&self, z: &Point2) -> Point2 {
        Point2::from_array(complex2(apply_matrix(&self.matrix(), real4(z.as_array()))))
    }

    /// The real differential, equal to the map itself.
    pub fn push(&self, x: &Tangent2) -> Tangent2 {
        Tangent2::from_array(complex2(apply_matrix(&self.matrix(), real4(x.as_array()))))
    }

    /// `sup (|F1| + |F2|)` over the closed diamond, attained on the circles
    /// `(e^{iθ}, 0)` and `(0, e^{iθ})` since the gauge is convex.
    pub fn diamond_sup(&self) -> f64 {
        let m = self.matrix();
        let g = |v: [f64; 4]| {
            let w = complex2(apply_matrix(&m, v));
            w[0].norm() + w[1].norm()
        };
        let (_, a) = circle_max(|t| g([t.cos(), t.sin(), 0.0, 0.0]), 360, 1e-12);
        let (_, b) = circle_max(|t| g([0.0, 0.0, t.cos(), t.sin()]), 360, 1e-12);
        a.max(b)
    }

    /// Maps the diamond into itself.
    pub fn is_admissible(&self) -> bool {
        self.diamond_sup() <= 1.0 + 1e-12
    }

    /// Every one of `n` random points of the diamond lands in the diamond.
    pub fn sampled_admissible<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> bool {
        (0..n).all(|_| DomainSpec::Diamond.contains(&self.apply(&crate::domains::random_point(&DomainSpec::Diamond, rng, 1.0))))
    }

    /// The member `z ↦ (ω1 z_σ1, ω2 z_σ2)` or `(ω1 conj z_σ1, ω2 conj z_σ2)`
    /// whose matrix agrees to `1e-6`, if any.
    pub fn isometry_family_match(&self) -> Option<DiamondSymmetry> {
        let m = self.matrix();
        for swap in [false, true] {
            for conj in [false, true] {
                let src = |j: usize| if swap { 1 - j } else { j };
                let omega: [C64; 2] = std::array::from_fn(|j| {
                    let w = C64::new(m[2 * j][2 * src(j)], m[2 * j + 1][2 * src(j)]);
                    if w.norm() > 0.0 { w / w.norm() } else { C64::new(1.0, 0.0) }
                });
                let s = DiamondSymmetry::new(omega[0], omega[1], conj, conj, swap).ok()?;
                let r = s.real_matrix();
                let err = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (r[i][j] - m[i][j]).abs()).fold(0.0, f64::max);
                if err < 1e-6 {
                    return Some(s);
                }
            }
        }
        None
    }

    pub fn label(&self) -> String {
        match self {
            Self::Symmetry { symmetry: s } => {
                let c = |b: bool| if b { "conj " } else { "" };
                let (a, b) = if s.swap { ("z2", "z1") } else { ("z1", "z2") };
                format!("(e^{{{:.4}i}} {}{a}, e^{{{:.4}i}} {}{b})", s.omega[0].arg(), c(s.conj[0]), s.omega[1].arg(), c(s.conj[1]))
            }
            Self::HalfConjugation { coordinate } => format!("half conjugation of z{coordinate}"),
            Self::GeneralRealLinear { .. } => "real-linear".to_string(),
        }
    }
}

/// A random real-linear map with Gaussian entries, scaled so that it maps the
/// diamond onto a set touching the boundary from inside.
pub fn random_admissible_real_linear<R: Rng + ?Sized>(rng: &mut R) -> CandidateIsometry {
    use std::f64::consts::TAU;
    let mut gauss = || {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    };
    let mut matrix = [[0.0; 4]; 4];
    for row in matrix.iter_mut() {
        for x in row.iter_mut() {
            *x = gauss();
        }
    }
    let sup = CandidateIsometry::GeneralRealLinear { matrix }.diamond_sup();
    let s = (1.0 - 1e-12) / sup;
    for row in matrix.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    CandidateIsometry::GeneralRealLinear { matrix }
}

/// The eight discrete classes (swap × conjugation pattern) with rotations on a
/// `grid × grid` lattice of angles `2πk/grid + 0.3`.
pub fn symmetry_candidates(grid: usize) -> Vec<CandidateIsometry> {
    let angles: Vec<f64> = (0..grid).map(|k| std::f64::consts::TAU * k as f64 / grid as f64 + 0.3).collect();
    let mut out = Vec::new();
    for swap in [false, true] {
        for conj in [[false, false], [true, true], [true, false], [false, true]] {
            for &a in &angles {
                for &b in &angles {
                    let s = DiamondSymmetry::new(C64::from_polar(1.0, a), C64::from_polar(1.0, b), conj[0], conj[1], swap)
                        .expect("unimodular");
                    out.push(CandidateIsometry::Symmetry { symmetry: s });
                }
            }
        }
    }
    out
}

fn off_axis_point<R: Rng + ?Sized>(rng: &mut R) -> Point2 {
    loop {
        let z = crate::domains::random_point(&DomainSpec::Diamond, rng, 0.85);
        if z.z1.norm() >= OFF_AXIS && z.z2.norm() >= OFF_AXIS {
            return z;
        }
    }
}

/// Pairs of points of the diamond with their certified Kobayashi distance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifiedPairs {
    pub pairs: Vec<(Point2, Point2)>,
    /// `None` where the distance could not be certified.
    pub distances: Vec<Option<f64>>,
}

fn certified_distance(w: &Point2, z: &Point2) -> Result<Option<f64>> {
    let d = kobayashi_distance(&DomainSpec::Diamond, w, z)?;
    Ok((d.certified && d.width < CERTIFIED_WIDTH).then_some(d.value))
}

impl CertifiedPairs {
    pub fn from_pairs(pairs: Vec<(Point2, Point2)>) -> Result<Self> {
        let distances = pairs.iter().map(|(w, z)| certified_distance(w, z)).collect::<Result<_>>()?;
        Ok(Self { pairs, distances })
    }

    /// `n` pairs with both coordinates of both points off the axes.
    pub fn off_axis(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_pairs((0..n).map(|_| (off_axis_point(&mut rng), off_axis_point(&mut rng))).collect())
    }

    /// `n` pairs `((t e^{ia}, 0), (0, s e^{ib}))` on the axes.
    pub fn on_axes(n: usize, seed: u64) -> Result<Self> {
        use std::f64::consts::TAU;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zero = C64::new(0.0, 0.0);
        let pairs = (0..n)
            .map(|_| {
                let w = Point2::new(C64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..TAU)), zero);
                let z = Point2::new(zero, C64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..TAU)));
                (w, z)
            })
            .collect();
        Self::from_pairs(pairs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryDefect {
    /// `max |k(F w, F z) - k(w, z)|` over the evaluated pairs.
    pub defect: f64,
    pub witness: Option<(Point2, Point2)>,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Defect of `F` on a pair set; stops at the first pair exceeding `stop_above`.
pub fn isometry_defect_on(f: &CandidateIsometry, set: &CertifiedPairs, stop_above: Option<f64>) -> Result<IsometryDefect> {
    let mut out = IsometryDefect { defect: 0.0, witness: None, evaluated: 0, skipped: 0 };
    for ((w, z), d0) in set.pairs.iter().zip(&set.distances) {
        let (fw, fz) = (f.apply(w), f.apply(z));
        if !DomainSpec::Diamond.contains(&fw) || !DomainSpec::Diamond.contains(&fz) {
            return Err(Error::Precondition(format!("{} leaves the diamond", f.label())));
        }
        let d1 = certified_distance(&fw, &fz)?;
        match (d0, d1) {
            (Some(a), Some(b)) => {
                out.evaluated += 1;
                let e = (a - b).abs();
                if e > out.defect || out.witness.is_none() {
                    out.defect = out.defect.max(e);
                    out.witness = Some((*w, *z));
                }
                if stop_above.is_some_and(|t| e > t) {
                    break;
                }
            }
            _ => out.skipped += 1,
        }
    }
    let total = out.evaluated + out.skipped;
    if total > 0 && out.skipped * 10 > total {
        return Err(Error::InsufficientCertification { skipped: out.skipped, total });
    }
    Ok(out)
}

/// Defect of `F` over `pair_budget` seeded off-axis pairs.
pub fn isometry_defect(f: &CandidateIsometry, pair_budget: usize, seed: u64) -> Result<IsometryDefect> {
    if !f.is_admissible() {
        return Err(Error::Precondition(format!("{} does not map the diamond into itself", f.label())));
    }
    isometry_defect_on(f, &CertifiedPairs::off_axis(pair_budget, seed)?, None)
}

/// `max |κ_G(F(w); dF·X) - 1|` over `n` boundary points `X` of `I_D(w)`.
pub fn indicatrix_image_check(f: &CandidateIsometry, d: &DomainSpec, g: &DomainSpec, w: &Point2, n: usize) -> Result<f64> {
    let fw = f.apply(w);
    g.require(&fw)?;
    let mut defect: f64 = 0.0;
    for u in halton_directions(n) {
        let (k, _) = kappa_hinted(d, w, &u, None)?;
        let x = u * (1.0 / k);
        let (kg, _) = kappa_hinted(g, &fw, &f.push(&x), None)?;
        defect = defect.max((kg - 1.0).abs());
    }
    Ok(defect)
}

/// Pass/fail of the structural steps for one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    /// `F(0) = 0`.
    pub origin_fixed: bool,
    /// Each axis goes onto an axis, moduli preserved; `swapped` records the permutation.
    pub axes_preserved: bool,
    pub swapped: bool,
    /// `|F_σ(j)(z)| = |z_j|` at random points.
    pub moduli_preserved: bool,
    /// `F(t z) = t dF(0) z` on rays.
    pub rays_linear: bool,
}

const STEP_TOL: f64 = 1e-9;

/// Runs the four structural checks on `F` with `samples` random points.
pub fn step_experiments(f: &CandidateIsometry, samples: usize, seed: u64) -> StepReport {
    use std::f64::consts::TAU;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = C64::new(0.0, 0.0);
    let origin_fixed = f.apply(&Point2::ORIGIN).norm() < STEP_TOL;
    let axis_image = |j: usize, p: C64| {
        let a = if j == 0 { Point2::new(p, zero) } else { Point2::new(zero, p) };
        f.apply(&a).as_array()
    };
    let mut axes = [[true; 2]; 2];
    for _ in 0..samples {
        let p = C64::from_polar(rng.gen_range(0.05..0.95), rng.gen_range(0.0..TAU));
        for j in 0..2 {
            let img = axis_image(j, p);
            for k in 0..2 {
                let on = img[1 - k].norm() < STEP_TOL && (img[k].norm() - p.norm()).abs() < STEP_TOL;
                axes[j][k] &= on;
            }
        }
    }
    let straight = axes[0][0] && axes[1][1];
    let crossed = axes[0][1] && axes[1][0];
    let axes_preserved = straight || crossed;
    let swapped = crossed && !straight;
    let mut moduli_preserved = true;
    for _ in 0..samples {
        let z = crate::domains::random_point(&DomainSpec::Diamond, &mut rng, 0.95);
        let fz = f.apply(&z).as_array();
        let zz = z.as_array();
        let src = |j: usize| if swapped { 1 - j } else { j };
        moduli_preserved &= (0..2).all(|j| (fz[j].norm() - zz[src(j)].norm()).abs() < STEP_TOL);
    }
    let h = 1e-6;
    let mut rays_linear = true;
    for _ in 0..samples {
        let z = crate::domains::random_point(&DomainSpec::Diamond, &mut rng, 0.95);
        let f0 = f.apply(&Point2::ORIGIN);
        let dz = (f.apply(&(z * h)) - f0).as_tangent() * (1.0 / h);
        let t = rng.gen_range(0.0..1.0);
        let lhs = (f.apply(&(z * t)) - f0).as_tangent();
        rays_linear &= (lhs - dz * t).norm() < 1e-7;
    }
    StepReport { origin_fixed, axes_preserved, swapped, moduli_preserved, rays_linear }
}

/// Largest and median defect of a half conjugation on `n` off-axis pairs, the
/// data the rejection threshold is frozen from.
pub fn calibrate_rejection(n: usize, seed: u64) -> Result<(f64, f64, IsometryDefect)> {
    let set = CertifiedPairs::off_axis(n, seed)?;
    let f = CandidateIsometry::half_conjugation(2)?;
    let mut each: Vec<f64> = Vec::with_capacity(n);
    for (i, p) in set.pairs.iter().enumerate() {
        let one = CertifiedPairs { pairs: vec![*p], distances: vec![set.distances[i]] };
        each.push(isometry_defect_on(&f, &one, None)?.defect);
    }
    each.sort_by(f64::total_cmp);
    let total = isometry_defect_on(&f, &set, None)?;
    Ok((each[n - 1], each[n / 2], total))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidityConfig {
    pub pairs: usize,
    pub seed: u64,
    pub rotation_grid: usize,
    pub random_linear: usize,
}

impl Default for RigidityConfig {
    fn default() -> Self {
        Self { pairs: 500, seed: 0, rotation_grid: 2, random_linear: 1000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateReport {
    pub label: String,
    pub candidate: CandidateIsometry,
    pub defect: f64,
    pub witness: Option<(Point2, Point2)>,
    pub evaluated: usize,
    pub skipped: usize,
    pub family_match: Option<DiamondSymmetry>,
    pub accepted: bool,
    pub rejected: bool,
    pub steps: StepReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidityReport {
    pub accept_threshold: f64,
    pub reject_threshold: f64,
    pub pairs: usize,
    pub seed: u64,
    pub candidates: Vec<CandidateReport>,
    /// Every accepted candidate matched a family member, every other candidate
    /// was rejected with a witness.
    pub consistent: bool,
    pub note: String,
}

/// Runs every candidate (symmetry classes, both half conjugations and random
/// real-linear maps) against one shared set of certified off-axis pairs.
/// Non-family candidates stop at their first pair above the rejection threshold.
pub fn rigidity_experiment(cfg: &RigidityConfig) -> Result<RigidityReport> {
    let set = CertifiedPairs::off_axis(cfg.pairs, cfg.seed)?;
    let mut candidates = symmetry_candidates(cfg.rotation_grid);
    candidates.push(CandidateIsometry::half_conjugation(1)?);
    candidates.push(CandidateIsometry::half_conjugation(2)?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    for _ in 0..cfg.random_linear {
        candidates.push(random_admissible_real_linear(&mut rng));
    }
    let mut reports = Vec::with_capacity(candidates.len());
    for c in candidates {
        let family_match = c.isometry_family_match();
        let stop = if family_match.is_some() { None } else { Some(REJECT_DEFECT) };
        let d = isometry_defect_on(&c, &set, stop)?;
        reports.push(CandidateReport {
            label: c.label(),
            candidate: c,
            defect: d.defect,
            witness: d.witness,
            evaluated: d.evaluated,
            skipped: d.skipped,
            family_match,
            accepted: d.defect < ACCEPT_DEFECT && d.evaluated + d.skipped == set.pairs.len(),
            rejected: d.defect > REJECT_DEFECT,
            steps: step_experiments(&c, 50, cfg.seed),
        });
    }
    let consistent = reports.iter().all(|r| if r.family_match.is_some() { r.accepted } else { r.rejected && r.witness.is_some() });
    Ok(RigidityReport {
        accept_threshold: ACCEPT_DEFECT,
        reject_threshold: REJECT_DEFECT,
        pairs: cfg.pairs,
        seed: cfg.seed,
        candidates: reports,
        consistent,
        note: "property-based check over a finite candidate set of real-linear maps; \
               not a proof of rigidity among all C^1 maps"
            .to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn family_matching() {
        for cand in symmetry_candidates(2) {
            let CandidateIsometry::Symmetry { symmetry } = cand else { unreachable!() };
            assert_eq!(cand.isometry_family_match().is_some(), symmetry.is_known_isometry());
            assert!(cand.is_admissible());
        }
        assert!(CandidateIsometry::half_conjugation(1).unwrap().isometry_family_match().is_none());
        assert!(CandidateIsometry::half_conjugation(3).is_err());
    }

    #[test]
    fn random_linear_maps_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let f = random_admissible_real_linear(&mut rng);
            assert!(f.is_admissible());
            assert!(f.sampled_admissible(10_000, &mut rng));
            assert!((f.diamond_sup() - 1.0).abs() < 1e-9);
            assert!(f.isometry_family_match().is_none());
        }
    }

    #[test]
    fn steps_for_identity_swap_and_half_conjugation() {
        let id = CandidateIsometry::Symmetry { symmetry: DiamondSymmetry::identity() };
        let s = step_experiments(&id, 30, 1);
        assert!(s.origin_fixed && s.axes_preserved && !s.swapped && s.moduli_preserved && s.rays_linear);
        let sw = DiamondSymmetry::new(c(0.0, 1.0), C64::from_polar(1.0, 2.0), false, false, true).unwrap();
        let s = step_experiments(&CandidateIsometry::Symmetry { symmetry: sw }, 30, 1);
        assert!(s.origin_fixed && s.axes_preserved && s.swapped && s.moduli_preserved && s.rays_linear);
        let s = step_experiments(&CandidateIsometry::half_conjugation(2).unwrap(), 30, 1);
        assert!(s.origin_fixed && s.axes_preserved && s.moduli_preserved && s.rays_linear);
    }

    #[test]
    fn indicatrix_images() {
        let d = DomainSpec::Diamond;
        let id = CandidateIsometry::Symmetry { symmetry: DiamondSymmetry::identity() };
        let w = Point2::new(c(0.2, 0.0), c(0.1, 0.1));
        assert!(indicatrix_image_check(&id, &d, &d, &w, 10).unwrap() < 1e-6);
        let conj = DiamondSymmetry::new(c(1.0, 0.0), c(1.0, 0.0), true, true, false).unwrap();
        let conj = CandidateIsometry::Symmetry { symmetry: conj };
        assert!(indicatrix_image_check(&conj, &d, &d, &Point2::ORIGIN, 50).unwrap() < 1e-6);
        assert!(indicatrix_image_check(&conj, &d, &d, &w, 10).unwrap() < 1e-6);
        let half = CandidateIsometry::half_conjugation(2).unwrap();
        assert!(indicatrix_image_check(&half, &d, &d, &w, 20).unwrap() > 1e-4);
    }

    #[test]
    fn defects_on_small_pair_sets() {
        let id = CandidateIsometry::Symmetry { symmetry: DiamondSymmetry::identity() };
        assert!(isometry_defect(&id, 5, 7).unwrap().defect < 1e-9);
        let half = CandidateIsometry::half_conjugation(2).unwrap();
        let axes = CertifiedPairs::on_axes(10, 7).unwrap();
        assert!(isometry_defect_on(&half, &axes, None).unwrap().defect < ACCEPT_DEFECT);
        let r = isometry_defect(&half, 20, 7).unwrap();
        assert!(r.defect > REJECT_DEFECT, "{r:?}");
        let (w, z) = r.witness.unwrap();
        assert!([w.z1, w.z2, z.z1, z.z2].iter().all(|v| v.norm() >= OFF_AXIS));
    }
}
