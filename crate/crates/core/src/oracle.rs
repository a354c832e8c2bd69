//! Brute-force upper bounds for the Lempert function and the Kobayashi–Royden
//! metric through polynomial analytic discs, and two-sided certificates.
//!
//! A candidate disc interpolates the data at free nodes: `f(σ) = w`,
//! `f(ζ) = z` for distances (`σ` real, `ζ` complex), or `f(σ) = z`,
//! `f'(σ) = s X` for the metric. The two lowest coefficients are eliminated
//! by these constraints, the rest are optimized by Nelder–Mead under a
//! quadratic penalty on the boundary values of the defining functional. The
//! winning disc is then shrunk, `λ ↦ f(rλ)`, until it is admissible on a fine
//! boundary sample; because `ρ ∘ f` is subharmonic the boundary maximum is
//! monotone in `r`, so a bisection on `r` suffices.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::competitor::{Competitor, CompetitorFamily};
use crate::domains::defining_raw;
use crate::extremal::{self, ExtremalDisc, Interpolant, Problem};
use crate::hyperbolic::poincare_distance_raw;
use crate::optimize::{bisect_last_true, NelderMead};
use crate::{DomainSpec, Error, Point2, Result, Tangent2, C64};

pub const MAX_DEGREE: usize = 6;
/// Boundary samples used while optimizing (coarse and fine rounds).
const COARSE_SAMPLES: usize = 128;
pub const SEARCH_SAMPLES: usize = 512;
/// Boundary samples of the final admissibility check.
pub const FINAL_SAMPLES: usize = 4096;
/// Required margin `1 - max ρ` of an admissible disc.
pub const MARGIN: f64 = 1e-6;
const PENALTY_LEVEL: f64 = 1.0 - 2e-6;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A polynomial map `𝔻 → C^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDisc {
    pub coefficients: [Vec<C64>; 2],
}

fn horner(c: &[C64], l: C64) -> C64 {
    c.iter().rev().fold(ZERO, |acc, k| acc * l + k)
}

fn horner_derivative(c: &[C64], l: C64) -> C64 {
    let mut acc = ZERO;
    for k in (1..c.len()).rev() {
        acc = acc * l + c[k] * k as f64;
    }
    acc
}

impl AnalyticDisc {
    pub fn new(c1: Vec<C64>, c2: Vec<C64>) -> Result<Self> {
        let d = Self { coefficients: [c1, c2] };
        if d.coefficients.iter().any(|c| c.is_empty()) {
            return Err(Error::NoAdmissibleDisc("empty coefficient list".into()));
        }
        if d.degree() > MAX_DEGREE {
            return Err(Error::NoAdmissibleDisc(format!("degree {} exceeds {MAX_DEGREE}", d.degree())));
        }
        Ok(d)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn eval(&self, l: C64) -> Point2 {
        Point2::new(horner(&self.coefficients[0], l), horner(&self.coefficients[1], l))
    }

    pub fn derivative(&self, l: C64) -> Tangent2 {
        Tangent2::new(horner_derivative(&self.coefficients[0], l), horner_derivative(&self.coefficients[1], l))
    }

    /// `λ ↦ f(rλ)`.
    pub fn dilate(&self, r: f64) -> Self {
        let scale = |c: &Vec<C64>| c.iter().enumerate().map(|(k, v)| v * r.powi(k as i32)).collect();
        Self { coefficients: [scale(&self.coefficients[0]), scale(&self.coefficients[1])] }
    }

    /// Maximum of the defining functional over `n` equally spaced points of `|λ| = r`.
    pub fn boundary_max(&self, domain: &DomainSpec, n: usize, r: f64) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for k in 0..n {
            let p = self.eval(C64::from_polar(r, TAU * k as f64 / n as f64));
            m = m.max(defining_raw(domain, p.z1, p.z2));
        }
        m
    }

    /// Admissible when `ρ ∘ f ≤ 1 - 1e-6` on `n` boundary samples.
    pub fn is_admissible(&self, domain: &DomainSpec, n: usize) -> bool {
        self.boundary_max(domain, n, 1.0) <= 1.0 - MARGIN
    }

    pub fn from_extremal(disc: &ExtremalDisc) -> Option<Self> {
        let [a, b] = disc.polynomial_coeffs()?;
        Self::new(a, b).ok()
    }
}

/// The disc of an upper witness: a polynomial, or a member of the explicit
/// extremal family precomposed with `λ ↦ radius·λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DiscWitness {
    Polynomial { disc: AnalyticDisc },
    ExtremalMember { member: ExtremalDisc, radius: f64 },
}

impl DiscWitness {
    pub fn eval(&self, l: C64) -> Point2 {
        match self {
            Self::Polynomial { disc } => disc.eval(l),
            Self::ExtremalMember { member, radius } => Point2::from_array(member.eval(l * *radius)),
        }
    }

    pub fn derivative(&self, l: C64) -> Tangent2 {
        match self {
            Self::Polynomial { disc } => disc.derivative(l),
            Self::ExtremalMember { member, radius } => Tangent2::from_array(member.derivative(l * *radius)) * *radius,
        }
    }

    pub fn dilate(&self, r: f64) -> Self {
        match self {
            Self::Polynomial { disc } => Self::Polynomial { disc: disc.dilate(r) },
            Self::ExtremalMember { member, radius } => Self::ExtremalMember { member: *member, radius: radius * r },
        }
    }

    pub fn boundary_max(&self, domain: &DomainSpec, n: usize, r: f64) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for k in 0..n {
            let p = self.eval(C64::from_polar(r, TAU * k as f64 / n as f64));
            m = m.max(defining_raw(domain, p.z1, p.z2));
        }
        m
    }

    pub fn as_polynomial(&self) -> Option<&AnalyticDisc> {
        match self {
            Self::Polynomial { disc } => Some(disc),
            Self::ExtremalMember { .. } => None,
        }
    }
}

impl From<AnalyticDisc> for DiscWitness {
    fn from(disc: AnalyticDisc) -> Self {
        Self::Polynomial { disc }
    }
}

/// Interpolation nodes of an upper-bound disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Nodes {
    /// `f(sigma) = w`, `f(zeta) = z`.
    Pair { sigma: C64, zeta: C64 },
    /// `f(sigma) = z`, `f'(sigma) = scale · X`.
    Tangent { sigma: C64, scale: C64 },
}

/// An analytic disc with nodes, re-checkable from its JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperWitness {
    pub disc: DiscWitness,
    pub nodes: Nodes,
}

impl UpperWitness {
    /// The bound the witness certifies, ignoring admissibility.
    pub fn value(&self) -> f64 {
        match self.nodes {
            Nodes::Pair { sigma, zeta } => poincare_distance_raw(sigma, zeta),
            Nodes::Tangent { sigma, scale } => 1.0 / (scale.norm() * (1.0 - sigma.norm_sqr())),
        }
    }

    /// Re-checks admissibility on the fine boundary sample and the
    /// interpolation conditions, returning the certified bound.
    pub fn verify(&self, domain: &DomainSpec, problem: &Problem) -> Result<f64> {
        let bm = self.disc.boundary_max(domain, FINAL_SAMPLES, 1.0);
        if bm > 1.0 - MARGIN + 1e-12 {
            return Err(Error::NoAdmissibleDisc(format!("boundary maximum {bm} exceeds 1 - {MARGIN}")));
        }
        let res = match (self.nodes, problem) {
            (Nodes::Pair { sigma, zeta }, Problem::Pair(w, z)) => {
                if sigma.norm() >= 1.0 || zeta.norm() >= 1.0 {
                    return Err(Error::NoAdmissibleDisc("node outside the disc".into()));
                }
                (self.disc.eval(sigma) - *w).as_tangent().norm() + (self.disc.eval(zeta) - *z).as_tangent().norm()
            }
            (Nodes::Tangent { sigma, scale }, Problem::Tangent(z, x)) => {
                if sigma.norm() >= 1.0 {
                    return Err(Error::NoAdmissibleDisc("node outside the disc".into()));
                }
                (self.disc.eval(sigma) - *z).as_tangent().norm() + (self.disc.derivative(sigma) - x.scale(scale)).norm()
            }
            _ => return Err(Error::Precondition("witness kind does not match the problem".into())),
        };
        if res > 1e-9 {
            return Err(Error::NoAdmissibleDisc(format!("interpolation residual {res:.3e}")));
        }
        Ok(self.value())
    }
}

/// Search effort of the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_degree: usize,
    pub restarts: usize,
    pub seed: u64,
    pub width_target: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_degree: 4, restarts: 4, seed: 0, width_target: 2e-4 }
    }
}

/// Raw optimizer coordinates: nodes first, then coefficients `c_2 … c_d` of both components.
struct Layout {
    degree: usize,
    /// Forces the second component to vanish (the disc slice).
    slice: bool,
}

impl Layout {
    fn node_len(&self) -> usize {
        3
    }

    fn len(&self) -> usize {
        self.node_len() + 4 * (self.degree - 1)
    }

    fn tail(&self, x: &[f64]) -> [Vec<C64>; 2] {
        let mut out = [vec![ZERO; self.degree + 1], vec![ZERO; self.degree + 1]];
        let mut i = self.node_len();
        for k in 2..=self.degree {
            for (j, comp) in out.iter_mut().enumerate() {
                if !(self.slice && j == 1) {
                    comp[k] = C64::new(x[i], x[i + 1]);
                }
                i += 2;
            }
        }
        out
    }

    /// Builds the interpolating disc and its nodes from raw coordinates.
    fn build(&self, x: &[f64], problem: &Problem) -> (AnalyticDisc, Nodes) {
        let mut c = self.tail(x);
        let sigma = C64::new(x[0].tanh(), 0.0);
        match problem {
            Problem::Pair(w, z) => {
                let zeta = squash(x[1], x[2]);
                let (w, z) = (w.as_array(), z.as_array());
                for j in 0..2 {
                    let rs = horner(&c[j], sigma);
                    let rz = horner(&c[j], zeta);
                    let c1 = (z[j] - w[j] - rz + rs) / (zeta - sigma);
                    c[j][1] = c1;
                    c[j][0] = w[j] - c1 * sigma - rs;
                }
                (AnalyticDisc { coefficients: c }, Nodes::Pair { sigma, zeta })
            }
            Problem::Tangent(z, v) => {
                let scale = C64::from_polar(x[1].exp(), x[2]);
                let (z, v) = (z.as_array(), v.as_array());
                for j in 0..2 {
                    let r = horner(&c[j], sigma);
                    let dr = horner_derivative(&c[j], sigma);
                    let c1 = scale * v[j] - dr;
                    c[j][1] = c1;
                    c[j][0] = z[j] - c1 * sigma - r;
                }
                (AnalyticDisc { coefficients: c }, Nodes::Tangent { sigma, scale })
            }
        }
    }

    fn encode(&self, disc: &AnalyticDisc, nodes: &Nodes) -> Vec<f64> {
        let mut x = vec![0.0; self.len()];
        match *nodes {
            Nodes::Pair { sigma, zeta } => {
                x[0] = sigma.re.clamp(-0.999_999, 0.999_999).atanh();
                let (a, b) = unsquash(zeta);
                x[1] = a;
                x[2] = b;
            }
            Nodes::Tangent { sigma, scale } => {
                x[0] = sigma.re.clamp(-0.999_999, 0.999_999).atanh();
                x[1] = scale.norm().ln();
                x[2] = scale.arg();
            }
        }
        let mut i = self.node_len();
        for k in 2..=self.degree {
            for j in 0..2 {
                let v = disc.coefficients[j].get(k).copied().unwrap_or(ZERO);
                x[i] = v.re;
                x[i + 1] = v.im;
                i += 2;
            }
        }
        x
    }
}

fn squash(a: f64, b: f64) -> C64 {
    let v = C64::new(a, b);
    let n = v.norm();
    if n == 0.0 {
        ZERO
    } else {
        v * (n.tanh() / n)
    }
}

fn unsquash(z: C64) -> (f64, f64) {
    let n = z.norm().min(1.0 - 1e-12);
    if n == 0.0 {
        (0.0, 0.0)
    } else {
        let v = z / z.norm() * n.atanh();
        (v.re, v.im)
    }
}

/// Rotates nodes so that `σ` is real, keeping the witness equivalent.
fn normalize_rotation(disc: &AnalyticDisc, nodes: &Nodes) -> (AnalyticDisc, Nodes) {
    let sigma = match nodes {
        Nodes::Pair { sigma, .. } | Nodes::Tangent { sigma, .. } => *sigma,
    };
    if sigma.im == 0.0 {
        return (disc.clone(), *nodes);
    }
    // g(λ) = f(e^{iθ} λ) with θ = arg σ; nodes become e^{-iθ}·nodes.
    let rot = if sigma.norm() > 0.0 { sigma / sigma.norm() } else { C64::new(1.0, 0.0) };
    let rc = |c: &Vec<C64>| c.iter().enumerate().map(|(k, v)| v * rot.powi(k as i32)).collect();
    let g = AnalyticDisc { coefficients: [rc(&disc.coefficients[0]), rc(&disc.coefficients[1])] };
    let n = match *nodes {
        Nodes::Pair { sigma, zeta } => Nodes::Pair { sigma: C64::new(sigma.norm(), 0.0), zeta: zeta * rot.conj() },
        Nodes::Tangent { sigma, scale } => Nodes::Tangent { sigma: C64::new(sigma.norm(), 0.0), scale: scale * rot },
    };
    (g, n)
}

/// Shrinks a disc until it is admissible on the fine sample; `None` if even
/// the smallest radius compatible with the nodes fails.
pub fn repair(domain: &DomainSpec, disc: &DiscWitness, nodes: &Nodes) -> Option<UpperWitness> {
    let ok = |r: f64| disc.boundary_max(domain, FINAL_SAMPLES, r) <= 1.0 - MARGIN;
    let node_max = match nodes {
        Nodes::Pair { sigma, zeta } => sigma.norm().max(zeta.norm()),
        Nodes::Tangent { sigma, .. } => sigma.norm(),
    };
    if node_max >= 1.0 {
        return None;
    }
    let r = if ok(1.0) {
        1.0
    } else {
        let lo = node_max * (1.0 + 1e-12) + 1e-300;
        if !ok(lo) {
            return None;
        }
        bisect_last_true(ok, lo, 1.0, 60)
    };
    let nodes = match *nodes {
        Nodes::Pair { sigma, zeta } => Nodes::Pair { sigma: sigma / r, zeta: zeta / r },
        Nodes::Tangent { sigma, scale } => Nodes::Tangent { sigma: sigma / r, scale: scale * r },
    };
    Some(UpperWitness { disc: disc.dilate(r), nodes })
}

fn objective(layout: &Layout, domain: &DomainSpec, problem: &Problem, samples: &[C64], mu: f64, x: &[f64]) -> f64 {
    let (disc, nodes) = layout.build(x, problem);
    let w = UpperWitness { disc: disc.into(), nodes };
    let v = w.value();
    if !v.is_finite() {
        return f64::INFINITY;
    }
    let mut pen = 0.0;
    for &l in samples {
        let p = w.disc.eval(l);
        let e = defining_raw(domain, p.z1, p.z2) - PENALTY_LEVEL;
        if e > 0.0 {
            pen += e * e;
        }
    }
    v + mu * pen
}

fn circle(n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(1.0, TAU * k as f64 / n as f64)).collect()
}

/// One penalty-method run from `x0` at fixed degree.
fn penalty_run(layout: &Layout, domain: &DomainSpec, problem: &Problem, x0: Vec<f64>) -> Option<UpperWitness> {
    let coarse = circle(COARSE_SAMPLES);
    let fine = circle(SEARCH_SAMPLES);
    let nm = NelderMead { max_evals: 600 * layout.len(), ftol: 1e-13, xtol: 1e-11 };
    let mut x = x0;
    let mut mu = 10.0;
    let mut best: Option<UpperWitness> = None;
    while mu <= 1e8 {
        let samples = if mu < 1e4 { &coarse } else { &fine };
        let step: Vec<f64> = (0..x.len()).map(|i| if i < 3 { 0.05 } else { 0.02 }).collect();
        let m = nm.minimize_restarted(|y: &[f64]| objective(layout, domain, problem, samples, mu, y), &x, &step, 2);
        x = m.x;
        mu *= 10.0;
    }
    let (disc, nodes) = layout.build(&x, problem);
    if let Some(w) = repair(domain, &disc.into(), &nodes) {
        best = Some(w);
    }
    best
}

fn better(a: Option<UpperWitness>, b: Option<UpperWitness>) -> Option<UpperWitness> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.value() < a.value() { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Inscribed radius, measured along unit `e`, of the complex line through `c` in `domain`.
fn slice_radius(domain: &DomainSpec, c: &Point2, e: &Tangent2) -> f64 {
    (0..16)
        .map(|k| domain.ray_exit(c, &e.scale(C64::from_polar(1.0, TAU * k as f64 / 16.0))))
        .fold(f64::INFINITY, f64::min)
}

/// The flat disc in the complex line of the data.
fn segment_start(domain: &DomainSpec, problem: &Problem) -> (AnalyticDisc, Nodes) {
    match problem {
        Problem::Pair(w, z) => {
            let u = *z - *w;
            let un = u.as_tangent().norm();
            let e = u.as_tangent() * (1.0 / un);
            let m = *w + u.as_tangent() * 0.5;
            let rho = 0.999 * slice_radius(domain, &m, &e);
            let s = (0.5 * un / rho).min(0.95);
            let c1 = e * (0.5 * un / s);
            let disc = AnalyticDisc { coefficients: [vec![m.z1, c1.x1], vec![m.z2, c1.x2]] };
            (disc, Nodes::Pair { sigma: C64::new(-s, 0.0), zeta: C64::new(s, 0.0) })
        }
        Problem::Tangent(z, x) => {
            let xn = x.norm();
            let e = *x * (1.0 / xn);
            let rho = 0.999 * slice_radius(domain, z, &e);
            let disc = AnalyticDisc { coefficients: [vec![z.z1, e.x1 * rho], vec![z.z2, e.x2 * rho]] };
            (disc, Nodes::Tangent { sigma: ZERO, scale: C64::new(rho / xn, 0.0) })
        }
    }
}

fn is_trivial(problem: &Problem) -> bool {
    match problem {
        Problem::Pair(w, z) => w == z,
        Problem::Tangent(_, x) => x.is_zero(),
    }
}

fn check_inputs(domain: &DomainSpec, problem: &Problem) -> Result<()> {
    domain.validate()?;
    match problem {
        Problem::Pair(w, z) => {
            domain.require(w)?;
            domain.require(z)
        }
        Problem::Tangent(z, x) => {
            domain.require(z)?;
            if matches!(domain, DomainSpec::Disc) && x.x2 != ZERO {
                return Err(Error::Precondition("tangent must lie along the disc slice".into()));
            }
            Ok(())
        }
    }
}

fn restart_seed(seed: u64, degree: usize, k: usize) -> u64 {
    seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(1 + k as u64)) ^ ((degree as u64) << 56)
}

/// Best upper witness over degrees `1..=max_degree` and `restarts` random
/// restarts per degree, optionally warm-started from `seeds`.
pub fn optimize_upper(
    domain: &DomainSpec,
    problem: &Problem,
    max_degree: usize,
    restarts: usize,
    seed: u64,
    seeds: &[(AnalyticDisc, Nodes)],
) -> Result<UpperWitness> {
    check_inputs(domain, problem)?;
    if max_degree == 0 || max_degree > MAX_DEGREE {
        return Err(Error::Precondition(format!("degree must be in 1..={MAX_DEGREE}")));
    }
    if is_trivial(problem) {
        return Err(Error::Precondition("degenerate problem has value 0".into()));
    }
    let (seg_disc, seg_nodes) = segment_start(domain, problem);
    let mut best = repair(domain, &seg_disc.clone().into(), &seg_nodes);
    let slice = matches!(domain, DomainSpec::Disc);
    let mut starts: Vec<(AnalyticDisc, Nodes)> = vec![(seg_disc, seg_nodes)];
    starts.extend(seeds.iter().map(|(d, n)| normalize_rotation(d, n)));
    for degree in 2..=max_degree.max(2) {
        let layout = Layout { degree, slice };
        let mut inits: Vec<Vec<f64>> = starts.iter().map(|(d, n)| layout.encode(d, n)).collect();
        if let Some(b) = &best {
            if let Some(p) = b.disc.as_polynomial() {
                let (d, n) = normalize_rotation(p, &b.nodes);
                inits.push(layout.encode(&d, &n));
            }
        }
        let base = inits.last().cloned().expect("nonempty");
        for k in 0..restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, degree, k));
            let mut x = base.clone();
            for (i, v) in x.iter_mut().enumerate() {
                *v += if i < 3 { rng.gen_range(-0.5..0.5) } else { rng.gen_range(-0.15..0.15) };
            }
            inits.push(x);
        }
        let results: Vec<Option<UpperWitness>> =
            inits.into_par_iter().map(|x0| penalty_run(&layout, domain, problem, x0)).collect();
        for r in results {
            best = better(best, r);
        }
        if degree >= max_degree {
            break;
        }
    }
    best.ok_or_else(|| Error::NoAdmissibleDisc("no admissible interpolating disc found".into()))
}

/// Upper bound for the Lempert function `l_D(w, z)`.
pub fn lempert_upper(domain: &DomainSpec, w: &Point2, z: &Point2, degree: usize, restarts: usize, seed: u64) -> Result<(f64, UpperWitness)> {
    let problem = Problem::Pair(*w, *z);
    if w == z {
        check_inputs(domain, &problem)?;
        let disc = AnalyticDisc { coefficients: [vec![w.z1], vec![w.z2]] };
        return Ok((0.0, UpperWitness { disc: disc.into(), nodes: Nodes::Pair { sigma: ZERO, zeta: ZERO } }));
    }
    let wit = optimize_upper(domain, &problem, degree, restarts, seed, &[])?;
    Ok((wit.value(), wit))
}

/// Upper bound for the Kobayashi–Royden metric `κ_D(z; X)`.
pub fn kappa_upper(domain: &DomainSpec, z: &Point2, x: &Tangent2, degree: usize, restarts: usize, seed: u64) -> Result<(f64, UpperWitness)> {
    if x.is_zero() {
        return Err(Error::Precondition("tangent vector must be nonzero".into()));
    }
    let wit = optimize_upper(domain, &Problem::Tangent(*z, *x), degree, restarts, seed, &[])?;
    Ok((wit.value(), wit))
}

/// Polynomial upper witness from an interpolating member of the extremal
/// family, shrunk slightly to gain the admissibility margin.
pub fn witness_from_interpolant(domain: &DomainSpec, problem: &Problem, it: &Interpolant) -> Option<UpperWitness> {
    if it.residual > 1e-10 {
        return None;
    }
    let disc = match AnalyticDisc::from_extremal(&it.disc) {
        Some(mut d) => {
            if matches!(domain, DomainSpec::Disc) {
                d.coefficients[1] = vec![ZERO];
            }
            DiscWitness::Polynomial { disc: d }
        }
        None => DiscWitness::ExtremalMember { member: it.disc, radius: 1.0 },
    };
    let nodes = match problem {
        Problem::Pair(..) => Nodes::Pair { sigma: it.sigma, zeta: it.second },
        Problem::Tangent(..) => Nodes::Tangent { sigma: it.sigma, scale: it.second },
    };
    let w = repair(domain, &disc, &nodes)?;
    w.verify(domain, problem).ok()?;
    Some(w)
}

/// Two-sided bound with its witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichCertificate {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub certified: bool,
    pub lower_witness: Option<Competitor>,
    pub upper_witness: Option<UpperWitness>,
}

impl SandwichCertificate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    fn new(lower: f64, lw: Option<Competitor>, upper: Option<UpperWitness>, target: f64) -> Self {
        let up = upper.as_ref().map_or(f64::INFINITY, |u| u.value());
        let width = up - lower;
        Self { lower, upper: up, width, certified: width < target, lower_witness: lw, upper_witness: upper }
    }

    fn exact(value: f64) -> Self {
        Self { lower: value, upper: value, width: 0.0, certified: true, lower_witness: None, upper_witness: None }
    }
}

/// Best Carathéodory-type lower bound of each family applicable to `domain`.
pub fn family_bounds(domain: &DomainSpec, problem: &Problem, families: &[CompetitorFamily]) -> Result<Vec<(f64, Competitor)>> {
    let mut out = Vec::new();
    for fam in families {
        if fam.applies_to(domain) {
            out.push(fam.best(domain, problem)?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidCompetitor(format!("no competitor family applies to {}", domain.name())));
    }
    Ok(out)
}

fn best_of(bounds: &[(f64, Competitor)]) -> (f64, Competitor) {
    let mut best = bounds[0];
    for b in &bounds[1..] {
        if b.0 > best.0 {
            best = *b;
        }
    }
    best
}

/// Best Carathéodory-type lower bound over every family applicable to `domain`.
pub fn lower_bound(domain: &DomainSpec, problem: &Problem, families: &[CompetitorFamily]) -> Result<(f64, Competitor)> {
    Ok(best_of(&family_bounds(domain, problem, families)?))
}

/// Lower bound from the competitor families and an analytic-disc upper
/// bound, escalating the oracle budget until the width target is met.
pub fn sandwich(domain: &DomainSpec, problem: &Problem, budget: &Budget) -> Result<SandwichCertificate> {
    check_inputs(domain, problem)?;
    if is_trivial(problem) {
        return Ok(SandwichCertificate::exact(0.0));
    }
    let mut bounds = family_bounds(domain, problem, &[CompetitorFamily::LinearSum, CompetitorFamily::AxisQuotient])
        .unwrap_or_default();
    let q = domain.exponents().unwrap_or([2.0, 2.0]);
    let ext = extremal::solve(q, problem, 1e-7);
    bounds.push((ext.lower, Competitor::lempert_dual(ext.dual)));
    let (lower, lw) = best_of(&bounds);
    let mut upper = ext.upper.as_ref().and_then(|(_, it)| witness_from_interpolant(domain, problem, it));
    let width = |u: &Option<UpperWitness>| u.as_ref().map_or(f64::INFINITY, |u| u.value() - lower);
    if width(&upper) < budget.width_target {
        return Ok(SandwichCertificate::new(lower, Some(lw), upper, budget.width_target));
    }
    let seeds: Vec<(AnalyticDisc, Nodes)> =
        upper.iter().filter_map(|u| u.disc.as_polynomial().map(|p| (p.clone(), u.nodes))).collect();
    let mut degree = 2;
    let mut restarts = budget.restarts.clamp(1, 2);
    loop {
        let wit = optimize_upper(domain, problem, degree.min(budget.max_degree), restarts, budget.seed, &seeds);
        if let Ok(w) = wit {
            upper = better(upper, Some(w));
        }
        if width(&upper) < budget.width_target || (degree >= budget.max_degree && restarts >= budget.restarts) {
            break;
        }
        if degree < budget.max_degree {
            degree += 1;
        } else {
            restarts = budget.restarts;
        }
    }
    Ok(SandwichCertificate::new(lower, Some(lw), upper, budget.width_target))
}
