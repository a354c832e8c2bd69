//! Sampling the Kobayashi indicatrix and classifying its boundary as flat or
//! strictly convex direction by direction.

use serde::{Deserialize, Serialize};

use super::{from_real, halton_directions, kappa_hinted, to_real};
use crate::extremal::Interpolant;
use crate::optimize::NelderMead;
use crate::{DomainSpec, Error, Point2, Result, Tangent2};

/// Half-width of the tested chords, relative to the unit direction.
pub const CHORD_HALF_WIDTH: f64 = 0.05;
/// A chord counts as flat when its midpoint has `κ ≥ 1 - FLAT_SLACK`.
pub const FLAT_SLACK: f64 = 1e-6;
/// Flat chords must be longer than this.
pub const MIN_FLAT_CHORD: f64 = 1e-2;
/// Strict convexity: every tested chord has `1 - κ(mid) ≥ STRICT_GAP · (d/r)²`,
/// with `d` the chord length and `r` the radius in the tested direction.
pub const STRICT_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Flatness {
    Flat,
    Strict,
    Inconclusive,
}

/// Boundary points `radius · direction` of `I_D(center)` along unit directions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndicatrixSample {
    pub domain: DomainSpec,
    pub center: Point2,
    pub directions: Vec<Tangent2>,
    pub radii: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flatness_flags: Vec<Flatness>,
    #[serde(skip)]
    hints: Vec<Option<Interpolant>>,
}

/// Outcome of the flatness test in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatnessDetail {
    pub flag: Flatness,
    /// `1 - κ(midpoint)` of the flattest chord found.
    pub gap: f64,
    /// Length of that chord.
    pub chord: f64,
    /// Unit vector from one chord end to the other.
    pub flat_direction: Tangent2,
    /// Smallest `gap / (d/r)²` over the tested chords.
    pub min_ratio: f64,
}

fn nearest(dirs: &[[f64; 4]], v: &[f64; 4]) -> Option<usize> {
    let d = |a: &[f64; 4]| (0..4).map(|i| (a[i] - v[i]).powi(2)).sum::<f64>();
    (0..dirs.len()).min_by(|&i, &j| d(&dirs[i]).total_cmp(&d(&dirs[j])))
}

/// Samples `I_D(p)` along `n` low-discrepancy directions; `radius = 1/κ_D(p; u)`.
pub fn sample_indicatrix(domain: &DomainSpec, p: &Point2, n: usize) -> Result<IndicatrixSample> {
    domain.validate()?;
    domain.require(p)?;
    if domain.normalized() == DomainSpec::Disc {
        return Err(Error::Precondition("the indicatrix of the disc slice is one-dimensional".into()));
    }
    let directions = halton_directions(n);
    let mut radii = Vec::with_capacity(n);
    let mut hints: Vec<Option<Interpolant>> = Vec::with_capacity(n);
    let mut done: Vec<[f64; 4]> = Vec::with_capacity(n);
    for u in &directions {
        let ru = to_real(u);
        let hint = nearest(&done, &ru).and_then(|i| hints[i]);
        let (k, it) = kappa_hinted(domain, p, u, hint.as_ref())?;
        radii.push(1.0 / k);
        hints.push(it.or(hint));
        done.push(ru);
    }
    Ok(IndicatrixSample { domain: *domain, center: *p, directions, radii, flatness_flags: Vec::new(), hints })
}

impl IndicatrixSample {
    pub fn boundary_point(&self, i: usize) -> Tangent2 {
        self.directions[i] * self.radii[i]
    }

    /// Runs [`classify_flatness`] and stores the flags.
    pub fn classify(&mut self) -> Result<Vec<FlatnessDetail>> {
        let details = classify_flatness(self)?;
        self.flatness_flags = details.iter().map(|d| d.flag).collect();
        Ok(details)
    }

    /// One CSV row per direction: `x1_re, x1_im, x2_re, x2_im, radius, flag`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["x1_re", "x1_im", "x2_re", "x2_im", "radius", "flag"]).map_err(io)?;
        for (i, u) in self.directions.iter().enumerate() {
            let flag = match self.flatness_flags.get(i) {
                Some(Flatness::Flat) => "FLAT",
                Some(Flatness::Strict) => "STRICT",
                Some(Flatness::Inconclusive) => "INCONCLUSIVE",
                None => "",
            };
            let mut rec: Vec<String> = to_real(u).iter().map(|v| format!("{v:.17e}")).collect();
            rec.push(format!("{:.17e}", self.radii[i]));
            rec.push(flag.to_string());
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

struct Chord {
    gap: f64,
    length: f64,
    direction: [f64; 4],
}

struct Probe<'a> {
    domain: &'a DomainSpec,
    center: &'a Point2,
    hint: Option<Interpolant>,
}

impl Probe<'_> {
    fn kappa(&self, x: &[f64; 4]) -> Result<f64> {
        Ok(kappa_hinted(self.domain, self.center, &from_real(x), self.hint.as_ref())?.0)
    }

    fn chord(&self, u: &[f64; 4], v: &[f64; 4], h: f64) -> Result<Chord> {
        let xp: [f64; 4] = std::array::from_fn(|i| u[i] + h * v[i]);
        let xm: [f64; 4] = std::array::from_fn(|i| u[i] - h * v[i]);
        let (kp, km) = (self.kappa(&xp)?, self.kappa(&xm)?);
        let bp: [f64; 4] = std::array::from_fn(|i| xp[i] / kp);
        let bm: [f64; 4] = std::array::from_fn(|i| xm[i] / km);
        let mid: [f64; 4] = std::array::from_fn(|i| 0.5 * (bp[i] + bm[i]));
        let length = (0..4).map(|i| (bp[i] - bm[i]).powi(2)).sum::<f64>().sqrt();
        let direction = normalize(std::array::from_fn(|i| bp[i] - bm[i]));
        Ok(Chord { gap: 1.0 - self.kappa(&mid)?, length, direction })
    }
}

fn normalize(v: [f64; 4]) -> [f64; 4] {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / n)
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| a[i] * b[i]).sum()
}

/// Orthonormal basis of the complement of the unit vector `u` in R^4.
fn complement(u: &[f64; 4]) -> [[f64; 4]; 3] {
    let mut out: Vec<[f64; 4]> = vec![*u];
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| u[i].abs().total_cmp(&u[j].abs()));
    for &k in &order {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        for b in &out {
            let c = dot(&e, b);
            for i in 0..4 {
                e[i] -= c * b[i];
            }
        }
        if e.iter().map(|x| x * x).sum::<f64>() > 1e-6 {
            out.push(normalize(e));
        }
        if out.len() == 4 {
            break;
        }
    }
    [out[1], out[2], out[3]]
}

fn sphere2(a: f64, b: f64) -> [f64; 3] {
    [a.cos() * b.cos(), a.sin() * b.cos(), b.sin()]
}

fn combine(basis: &[[f64; 4]; 3], c: [f64; 3]) -> [f64; 4] {
    normalize(std::array::from_fn(|i| (0..3).map(|k| c[k] * basis[k][i]).sum()))
}

fn classify_direction(probe: &Probe<'_>, u: &[f64; 4], radius: f64) -> Result<FlatnessDetail> {
    let basis = complement(u);
    let rel = |c: &Chord| c.gap / (c.length / radius).powi(2);
    // Near an axis a full-width chord swings the small coordinate's phase far
    // out of the quadratic regime, so the model uses shorter chords there.
    let small = u[0].hypot(u[1]).min(u[2].hypot(u[3]));
    let hm = (0.25 * small).clamp(0.01, CHORD_HALF_WIDTH);
    // quadratic model of the midpoint gap on the tangent sphere from six chords
    let mut q = [[0.0; 3]; 3];
    let mut min_ratio = f64::INFINITY;
    let mut diag = [0.0; 3];
    for i in 0..3 {
        let c = probe.chord(u, &basis[i], hm)?;
        min_ratio = min_ratio.min(rel(&c));
        diag[i] = c.gap;
        q[i][i] = c.gap;
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let v = normalize(std::array::from_fn(|k| basis[i][k] + basis[j][k]));
            let c = probe.chord(u, &v, hm)?;
            min_ratio = min_ratio.min(rel(&c));
            q[i][j] = c.gap - 0.5 * (diag[i] + diag[j]);
            q[j][i] = q[i][j];
        }
    }
    let model = |x: &[f64]| {
        let c = sphere2(x[0], x[1]);
        (0..3).map(|i| (0..3).map(|j| c[i] * q[i][j] * c[j]).sum::<f64>()).sum::<f64>()
    };
    let nm = NelderMead { max_evals: 400, ftol: 1e-16, xtol: 1e-9 };
    let starts = [[0.0, 0.0], [std::f64::consts::FRAC_PI_2, 0.0], [0.0, 1.2]];
    let best = starts
        .iter()
        .map(|s| nm.minimize(model, s, &[0.4, 0.4]))
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("three starts");
    let mut v = combine(&basis, sphere2(best.x[0], best.x[1]));
    let mut c = probe.chord(u, &v, CHORD_HALF_WIDTH)?;
    min_ratio = min_ratio.min(rel(&c));
    // comfortably strict; otherwise refine, as a coarse model can miss a face
    if min_ratio >= 10.0 * STRICT_GAP {
        return Ok(FlatnessDetail {
            flag: Flatness::Strict,
            gap: c.gap,
            chord: c.length,
            flat_direction: from_real(&c.direction),
            min_ratio,
        });
    }
    // refine on the true gap around the model's flattest direction
    let around = {
        let b2 = complement(&v);
        // b2 spans v's complement; keep the two directions tangent to the boundary
        let t: Vec<[f64; 4]> = b2.iter().map(|w| {
            let c = dot(w, u);
            normalize(std::array::from_fn(|i| w[i] - c * u[i]))
        }).filter(|w| w.iter().all(|x| x.is_finite())).collect();
        [t[0], {
            let c = dot(&t[1], &t[0]);
            normalize(std::array::from_fn(|i| t[1][i] - c * t[0][i]))
        }]
    };
    let base = v;
    let dir = |x: &[f64]| normalize(std::array::from_fn(|i| base[i] + x[0] * around[0][i] + x[1] * around[1][i]));
    let nm = NelderMead { max_evals: 60, ftol: 1e-14, xtol: 1e-6 };
    let r = nm.minimize(|x| probe.chord(u, &dir(x), CHORD_HALF_WIDTH).map_or(f64::INFINITY, |c| c.gap), &[0.0, 0.0], &[0.05, 0.05]);
    if r.value < c.gap {
        v = dir(&r.x);
        c = probe.chord(u, &v, CHORD_HALF_WIDTH)?;
    }
    min_ratio = min_ratio.min(rel(&c));
    let flag = if c.gap <= FLAT_SLACK && c.length > MIN_FLAT_CHORD {
        Flatness::Flat
    } else if min_ratio >= STRICT_GAP {
        Flatness::Strict
    } else {
        Flatness::Inconclusive
    };
    Ok(FlatnessDetail { flag, gap: c.gap, chord: c.length, flat_direction: from_real(&c.direction), min_ratio })
}

/// Per-direction FLAT / STRICT / INCONCLUSIVE classification of a sample.
///
/// Around each boundary point `b = r·u` chords between the boundary points in
/// directions `u ± h v` (`v ⊥ u`) are tested. FLAT: some chord longer than
/// [`MIN_FLAT_CHORD`] has its midpoint on the boundary to [`FLAT_SLACK`].
/// STRICT: every tested chord's midpoint lies inside by at least
/// [`STRICT_GAP`]`·(d/r)²`.
pub fn classify_flatness(sample: &IndicatrixSample) -> Result<Vec<FlatnessDetail>> {
    let n = sample.directions.len();
    (0..n)
        .map(|i| {
            let probe = Probe { domain: &sample.domain, center: &sample.center, hint: sample.hints.get(i).copied().flatten() };
            classify_direction(&probe, &to_real(&sample.directions[i]), sample.radii[i])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_at_origin_reproduces_its_gauge() {
        let s = sample_indicatrix(&DomainSpec::Diamond, &Point2::ORIGIN, 200).unwrap();
        for (u, r) in s.directions.iter().zip(&s.radii) {
            assert!((r - 1.0 / (u.x1.norm() + u.x2.norm())).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_at_origin_is_round_and_strict() {
        let mut s = sample_indicatrix(&DomainSpec::Ball2, &Point2::ORIGIN, 100).unwrap();
        assert!(s.radii.iter().all(|r| (r - 1.0).abs() < 1e-12));
        let d = s.classify().unwrap();
        assert!(d.iter().all(|d| d.flag == Flatness::Strict), "{:?}", d.iter().find(|d| d.flag != Flatness::Strict));
    }

    #[test]
    fn ellipsoid_radius_along_the_second_axis() {
        let e21 = DomainSpec::Ellipsoid { q1: 2.0, q2: 1.0 };
        let (k, _) = kappa_hinted(&e21, &Point2::ORIGIN, &Tangent2::real(0.0, 1.0), None).unwrap();
        assert!((1.0 / k - 1.0).abs() < 1e-9);
    }

    #[test]
    fn diamond_faces_are_flat() {
        let mut s = sample_indicatrix(&DomainSpec::Diamond, &Point2::ORIGIN, 60).unwrap();
        let d = s.classify().unwrap();
        for (i, det) in d.iter().enumerate() {
            let b = s.boundary_point(i);
            let reach = CHORD_HALF_WIDTH * s.radii[i] / std::f64::consts::SQRT_2;
            let m = b.x1.norm().min(b.x2.norm());
            if m > 1.5 * reach {
                assert_eq!(det.flag, Flatness::Flat, "{i}: {det:?}");
                let face = Tangent2::new(b.x1 / b.x1.norm(), -b.x2 / b.x2.norm()) * std::f64::consts::FRAC_1_SQRT_2;
                assert!(dot(&to_real(&face), &to_real(&det.flat_direction)).abs() > 1.0 - 1e-3);
            }
            if m < 0.5 * reach {
                assert_ne!(det.flag, Flatness::Flat);
            }
        }
    }

    #[test]
    fn csv_has_one_row_per_direction() {
        let mut s = sample_indicatrix(&DomainSpec::Ball2, &Point2::real(0.2, 0.1), 5).unwrap();
        s.classify().unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.lines().nth(1).unwrap().ends_with(",STRICT"));
    }
}
