//! Explicit extremal discs of convex complex ellipsoids `E{q1, q2}` and their
//! holomorphic left inverses.
//!
//! Every complex geodesic of `{|z1|^q1 + |z2|^q2 < 1}` can be reparametrized
//! (pole parameter moved to the origin) to
//!
//! ```text
//! f_j(λ) = a_j (λ - α_j)^{r_j} (1 - conj(α_j) λ)^{s_j - r_j},   s_j = 2 / q_j,
//! ```
//!
//! with `u_j = |a_j|^{q_j}` subject to `Σ u_j α_j = 0` and
//! `Σ u_j (1 + |α_j|²) = 1`, which is exactly the condition `ρ(f(λ)) = 1` on
//! the unit circle. The companion map
//!
//! ```text
//! h_j(λ) = c_j (λ - α_j)^{1 - r_j} (1 - conj(α_j) λ)^{1 + r_j - s_j},
//! c_j = (q_j / 2) u_j^{1 - 1/q_j} e^{-i arg a_j},
//! ```
//!
//! satisfies `h(λ) = λ ∂ρ(f(λ))` on the circle. For `z` in the domain the
//! function `g(λ) = Σ (z_j - f_j(λ)) h_j(λ)` then winds once around the origin
//! along the circle (convexity of `ρ`), so it has exactly one zero `F(z)` in the
//! disc. `F` is holomorphic, maps the domain into the disc and satisfies
//! `F ∘ f = id`. Maximizing Carathéodory quantities of `F` over the family
//! recovers the Kobayashi distance and metric exactly.

use std::cell::Cell;
use std::ops::Range;
use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::hyperbolic::poincare_distance_raw;
use crate::optimize::NelderMead;
use crate::{Point2, Tangent2, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
fn cpow(w: C64, e: f64) -> C64 {
    if e == 0.0 {
        ONE
    } else if e == 1.0 {
        w
    } else if e == 2.0 {
        w * w
    } else if e == -1.0 {
        w.inv()
    } else {
        w.powf(e)
    }
}

/// A member of the extremal family, normalized so that the pole parameter is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalDisc {
    pub q: [f64; 2],
    pub r: [u8; 2],
    pub a: [C64; 2],
    pub alpha: [C64; 2],
    /// Coefficients `c_j` of the dual map.
    pub c: [C64; 2],
}

/// Shape coordinates of the family: weight split `t`, zero spread `β`,
/// zero direction `φ`, and the phases `θ_j` of `a_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub t: f64,
    pub beta: f64,
    pub phi: f64,
    pub theta: [f64; 2],
}

impl Shape {
    pub fn max_beta(t: f64) -> f64 {
        let a = if t > 0.0 { 1.0 / t } else { f64::INFINITY };
        let b = if t < 1.0 { 1.0 / (1.0 - t) } else { f64::INFINITY };
        a.min(b)
    }

    /// Maps unconstrained optimizer coordinates onto the admissible shape set.
    pub fn from_unconstrained(x: &[f64]) -> Self {
        let t = 0.5 * (1.0 + x[0].sin());
        let beta = (1.0 - 1e-9) * Self::max_beta(t) * 0.5 * (1.0 + x[1].sin());
        Self { t, beta, phi: x[2], theta: [x[3], x[4]] }
    }

    pub fn to_unconstrained(&self) -> [f64; 5] {
        let x0 = (2.0 * self.t - 1.0).clamp(-1.0, 1.0).asin();
        let bm = (1.0 - 1e-9) * Self::max_beta(self.t);
        let x1 = (2.0 * self.beta / bm - 1.0).clamp(-1.0, 1.0).asin();
        [x0, x1, self.phi, self.theta[0], self.theta[1]]
    }
}

impl ExtremalDisc {
    pub fn from_shape(q: [f64; 2], r: [u8; 2], s: &Shape) -> Self {
        let k = 1.0 / (1.0 + s.beta * s.beta * s.t * (1.0 - s.t));
        let u = [k * s.t, k * (1.0 - s.t)];
        let dir = C64::from_polar(1.0, s.phi);
        let alpha = [dir * (s.beta * (1.0 - s.t)), -dir * (s.beta * s.t)];
        let mut a = [ZERO; 2];
        let mut c = [ZERO; 2];
        for j in 0..2 {
            let ph = C64::from_polar(1.0, s.theta[j]);
            a[j] = ph * u[j].powf(1.0 / q[j]);
            c[j] = ph.conj() * (0.5 * q[j] * u[j].powf(1.0 - 1.0 / q[j]));
        }
        Self { q, r, a, alpha, c }
    }

    pub fn linear(q: [f64; 2], a: [C64; 2]) -> Self {
        // f(λ) = (a1 λ, a2 λ), admissible when Σ|a_j|^{q_j} = 1.
        let mut c = [ZERO; 2];
        for j in 0..2 {
            let u = a[j].norm().powf(q[j]);
            let ph = if a[j].norm() > 0.0 { a[j] / a[j].norm() } else { ONE };
            c[j] = ph.conj() * (0.5 * q[j] * u.powf(1.0 - 1.0 / q[j]));
        }
        Self { q, r: [1, 1], a, alpha: [ZERO; 2], c }
    }

    fn exps(&self, j: usize) -> (f64, f64) {
        let s = 2.0 / self.q[j];
        let r = self.r[j] as f64;
        (s - r, 1.0 + r - s)
    }

    pub fn eval(&self, lambda: C64) -> [C64; 2] {
        let mut out = [ZERO; 2];
        for j in 0..2 {
            let (ef, _) = self.exps(j);
            let m = 1.0 - self.alpha[j].conj() * lambda;
            let l = if self.r[j] == 1 { lambda - self.alpha[j] } else { ONE };
            out[j] = self.a[j] * l * cpow(m, ef);
        }
        out
    }

    pub fn derivative(&self, lambda: C64) -> [C64; 2] {
        let mut out = [ZERO; 2];
        for j in 0..2 {
            let (ef, _) = self.exps(j);
            let ab = self.alpha[j].conj();
            let m = 1.0 - ab * lambda;
            let mp = cpow(m, ef);
            let dm = if ef == 0.0 { ZERO } else { mp * ef / m * (-ab) };
            out[j] = if self.r[j] == 1 {
                self.a[j] * (mp + (lambda - self.alpha[j]) * dm)
            } else {
                self.a[j] * dm
            };
        }
        out
    }

    /// `g(λ) = Σ (z_j - f_j(λ)) h_j(λ)` and its λ-derivative.
    fn g_and_dg(&self, z: &[C64; 2], lambda: C64) -> (C64, C64, [C64; 2]) {
        let mut g = ZERO;
        let mut dg = ZERO;
        let mut h = [ZERO; 2];
        for j in 0..2 {
            let (ef, eh) = self.exps(j);
            let ab = self.alpha[j].conj();
            let m = 1.0 - ab * lambda;
            let l = lambda - self.alpha[j];
            let mf = cpow(m, ef);
            let mh = cpow(m, eh);
            let dmf = if ef == 0.0 { ZERO } else { mf * ef / m * (-ab) };
            let dmh = if eh == 0.0 { ZERO } else { mh * eh / m * (-ab) };
            let (f, df, hj, dh) = if self.r[j] == 1 {
                (self.a[j] * l * mf, self.a[j] * (mf + l * dmf), self.c[j] * mh, self.c[j] * dmh)
            } else {
                (self.a[j] * mf, self.a[j] * dmf, self.c[j] * l * mh, self.c[j] * (mh + l * dmh))
            };
            g += (z[j] - f) * hj;
            dg += -df * hj + (z[j] - f) * dh;
            h[j] = hj;
        }
        (g, dg, h)
    }

    fn newton(&self, z: &[C64; 2], start: C64) -> Option<(C64, C64, [C64; 2])> {
        let mut lambda = start;
        for _ in 0..60 {
            let (g, dg, h) = self.g_and_dg(z, lambda);
            if dg.norm() == 0.0 || !dg.re.is_finite() {
                return None;
            }
            let step = g / dg;
            lambda -= step;
            if !(lambda.re.is_finite() && lambda.im.is_finite()) || lambda.norm() > 4.0 {
                return None;
            }
            if step.norm() < 1e-15 * (1.0 + lambda.norm()) {
                let (_, dg, h2) = self.g_and_dg(z, lambda);
                let _ = h;
                return if lambda.norm() < 1.0 { Some((lambda, dg, h2)) } else { None };
            }
        }
        None
    }

    fn contour_guess(&self, z: &[C64; 2], n: usize, radius: f64) -> Option<C64> {
        let mut acc = ZERO;
        for k in 0..n {
            let l = C64::from_polar(radius, TAU * (k as f64 + 0.5) / n as f64);
            let (g, dg, _) = self.g_and_dg(z, l);
            if g.norm() == 0.0 {
                return Some(l);
            }
            acc += l * l * dg / g;
        }
        let guess = acc / n as f64;
        if guess.re.is_finite() && guess.im.is_finite() {
            Some(guess)
        } else {
            None
        }
    }

    /// Solves `F(z)`; returns the root together with `g'` and `h` at the root.
    fn solve(&self, z: &[C64; 2], hint: Option<C64>) -> Option<(C64, C64, [C64; 2])> {
        if let Some(h) = hint {
            if let Some(s) = self.newton(z, h) {
                return Some(s);
            }
        }
        if let Some(s) = self.newton(z, ZERO) {
            return Some(s);
        }
        for (n, rad) in [(128, 1.0), (512, 1.0), (512, 0.999)] {
            if let Some(guess) = self.contour_guess(z, n, rad) {
                let guess = if guess.norm() >= 1.0 { guess / guess.norm() * 0.999 } else { guess };
                if let Some(s) = self.newton(z, guess) {
                    return Some(s);
                }
            }
        }
        None
    }

    /// The left inverse `F(z)`.
    pub fn left_inverse(&self, z: &Point2) -> Option<C64> {
        self.solve(&z.as_array(), None).map(|s| s.0)
    }

    pub fn left_inverse_hinted(&self, z: &Point2, hint: Option<C64>) -> Option<C64> {
        self.solve(&z.as_array(), hint).map(|s| s.0)
    }

    /// `(F(z), dF(z)[X])`.
    pub fn left_inverse_jet(&self, z: &Point2, x: &Tangent2, hint: Option<C64>) -> Option<(C64, C64)> {
        let (lambda, dg, h) = self.solve(&z.as_array(), hint)?;
        let num = h[0] * x.x1 + h[1] * x.x2;
        Some((lambda, -num / dg))
    }

    /// Zero-free in the open disc for component `j` (`r_j = 0`, `a_j ≠ 0`),
    /// with `|α_j|` kept away from the circle by `margin` when `r_j = 1`.
    pub fn component_zero_free(&self, j: usize) -> bool {
        self.r[j] == 0 && self.a[j].norm() > 0.0
    }

    /// Polynomial coefficients when every exponent `s_j - r_j` is a
    /// nonnegative integer (the case `q_j ∈ {1, 2}`).
    pub fn polynomial_coeffs(&self) -> Option<[Vec<C64>; 2]> {
        let mut out: [Vec<C64>; 2] = [Vec::new(), Vec::new()];
        for j in 0..2 {
            let (ef, _) = self.exps(j);
            if ef < 0.0 || ef.fract() != 0.0 {
                return None;
            }
            let mut p = vec![self.a[j]];
            if self.r[j] == 1 {
                p = poly_mul(&p, &[-self.alpha[j], ONE]);
            }
            for _ in 0..(ef as usize) {
                p = poly_mul(&p, &[ONE, -self.alpha[j].conj()]);
            }
            out[j] = p;
        }
        Some(out)
    }

    /// `max_{|λ|=1} ρ(f(λ))` on `n` samples; equals 1 for admissible members.
    pub fn boundary_defining_max(&self, n: usize) -> f64 {
        (0..n)
            .map(|k| {
                let v = self.eval(C64::from_polar(1.0, TAU * k as f64 / n as f64));
                v[0].norm().powf(self.q[0]) + v[1].norm().powf(self.q[1])
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            out[i + k] += x * y;
        }
    }
    out
}

/// A Carathéodory-type extremal problem on a pair of points or a tangent vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Problem {
    Pair(Point2, Point2),
    Tangent(Point2, Tangent2),
}

/// Evaluates the lower-bound quantity of one family member.
pub struct Evaluator {
    hints: [Cell<Option<C64>>; 2],
}

impl Default for Evaluator {
    fn default() -> Self {
        Self { hints: [Cell::new(None), Cell::new(None)] }
    }
}

impl Evaluator {
    pub fn value(&self, disc: &ExtremalDisc, problem: &Problem) -> Option<f64> {
        match problem {
            Problem::Pair(w, z) => {
                let fw = disc.left_inverse_hinted(w, self.hints[0].get())?;
                let fz = disc.left_inverse_hinted(z, self.hints[1].get())?;
                self.hints[0].set(Some(fw));
                self.hints[1].set(Some(fz));
                Some(poincare_distance_raw(fw, fz))
            }
            Problem::Tangent(z, x) => {
                let (fz, d) = disc.left_inverse_jet(z, x, self.hints[0].get())?;
                self.hints[0].set(Some(fz));
                Some(d.norm() / (1.0 - fz.norm_sqr()))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualSolution {
    pub value: f64,
    pub disc: ExtremalDisc,
    pub shape: Shape,
}

pub const STRATA: [[u8; 2]; 4] = [[1, 1], [1, 0], [0, 1], [0, 0]];

fn problem_phases(problem: &Problem) -> [f64; 2] {
    let (u, v) = match problem {
        Problem::Pair(w, z) => (z.z1 - w.z1, z.z2 - w.z2),
        Problem::Tangent(_, x) => (x.x1, x.x2),
    };
    let arg = |c: C64| if c.norm() > 0.0 { c.arg() } else { 0.0 };
    [arg(u), arg(v)]
}

/// Maximizes the lower-bound quantity over the extremal family of `E{q}`.
pub fn maximize(q: [f64; 2], problem: &Problem) -> DualSolution {
    maximize_with(q, problem, &STRATA, 2)
}

pub fn maximize_with(q: [f64; 2], problem: &Problem, strata: &[[u8; 2]], starts_per_stratum: usize) -> DualSolution {
    maximize_all(q, problem, strata, 0..starts_per_stratum, 2).remove(0)
}

/// Local optima of the dual search, best first; the top `polished` are refined.
pub fn maximize_all(q: [f64; 2], problem: &Problem, strata: &[[u8; 2]], starts: Range<usize>, polished: usize) -> Vec<DualSolution> {
    let nm = NelderMead { max_evals: 1500, ftol: 1e-14, xtol: 1e-10 };
    let ph = problem_phases(problem);
    let mut candidates: Vec<(f64, [u8; 2], Vec<f64>)> = Vec::new();
    for &r in strata {
        let ev = Evaluator::default();
        let objective = |x: &[f64]| -> f64 {
            let shape = Shape::from_unconstrained(x);
            let disc = ExtremalDisc::from_shape(q, r, &shape);
            match ev.value(&disc, problem) {
                Some(v) if v.is_finite() => -v,
                _ => f64::INFINITY,
            }
        };
        let start_points: Vec<[f64; 5]> = [
            [0.0, -FRAC_PI_2 + 0.6, 0.0, ph[0], ph[1]],
            [0.4, 0.0, FRAC_PI_2, ph[0], ph[1] + 0.5],
            [-0.4, 0.5, -1.5, ph[0] + 0.3, ph[1]],
            [0.9, -0.5, 2.5, ph[0] - 0.5, ph[1] - 0.3],
            [-1.0, 1.0, 0.8, ph[0] + 1.5, ph[1] - 1.5],
            [0.2, 1.2, -2.8, ph[0] - 2.0, ph[1] + 2.5],
        ]
        .into_iter()
        .skip(starts.start)
        .take(starts.len().max(1))
        .collect();
        for s in start_points {
            let m = nm.minimize(&objective, &s, &[0.4, 0.6, 0.8, 0.6, 0.6]);
            candidates.push((-m.value, r, m.x));
        }
    }
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let polish = NelderMead { max_evals: 3000, ftol: 1e-15, xtol: 1e-11 };
    let mut out = Vec::new();
    for (i, (v, r, x)) in candidates.into_iter().enumerate() {
        if i >= polished {
            let shape = Shape::from_unconstrained(&x);
            out.push(DualSolution { value: v, disc: ExtremalDisc::from_shape(q, r, &shape), shape });
            continue;
        }
        let ev = Evaluator::default();
        let objective = |x: &[f64]| -> f64 {
            let shape = Shape::from_unconstrained(x);
            let disc = ExtremalDisc::from_shape(q, r, &shape);
            match ev.value(&disc, problem) {
                Some(v) if v.is_finite() => -v,
                _ => f64::INFINITY,
            }
        };
        let m = polish.minimize_restarted(&objective, &x, &[0.05; 5], 4);
        let shape = Shape::from_unconstrained(&m.x);
        let disc = ExtremalDisc::from_shape(q, r, &shape);
        let value = Evaluator::default().value(&disc, problem).unwrap_or(f64::NEG_INFINITY);
        out.push(DualSolution { value, disc, shape });
    }
    out.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// Interpolation nodes of a family member: `f(σ) = w, f(ζ) = z` for pairs,
/// `f(σ) = z, f'(σ) = s X` for tangents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interpolant {
    pub disc: ExtremalDisc,
    pub shape: Shape,
    pub sigma: C64,
    /// `ζ` for pairs, `s` for tangents.
    pub second: C64,
    pub residual: f64,
}

impl Interpolant {
    /// `p(σ, ζ)` resp. `1 / (|s| (1 - |σ|²))`: an upper bound because the
    /// member is an analytic disc in the closed domain interpolating the data.
    pub fn value(&self, problem: &Problem) -> f64 {
        match problem {
            Problem::Pair(..) => poincare_distance_raw(self.sigma, self.second),
            Problem::Tangent(..) => 1.0 / (self.second.norm() * (1.0 - self.sigma.norm_sqr())),
        }
    }
}

impl Shape {
    /// Shape of `λ ↦ f(e^{it} λ)`.
    pub fn rotated(&self, r: [u8; 2], t: f64) -> Self {
        Self {
            t: self.t,
            beta: self.beta,
            phi: self.phi - t,
            theta: [self.theta[0] + r[0] as f64 * t, self.theta[1] + r[1] as f64 * t],
        }
    }
}

fn interp_residual(q: [f64; 2], r: [u8; 2], problem: &Problem, x: &[f64]) -> Option<Vec<f64>> {
    let disc = ExtremalDisc::from_shape(q, r, &Shape::from_unconstrained(&x[..5]));
    let sigma = C64::new(x[5].tanh(), 0.0);
    let mut out = Vec::with_capacity(8);
    match problem {
        Problem::Pair(w, z) => {
            let v = C64::new(x[6], x[7]);
            let zeta = if v.norm() > 0.0 { v * (v.norm().tanh() / v.norm()) } else { ZERO };
            let fw = disc.eval(sigma);
            let fz = disc.eval(zeta);
            for d in [fw[0] - w.z1, fw[1] - w.z2, fz[0] - z.z1, fz[1] - z.z2] {
                out.push(d.re);
                out.push(d.im);
            }
        }
        Problem::Tangent(z, xv) => {
            let s = C64::from_polar(x[6].exp(), x[7]);
            let f = disc.eval(sigma);
            let df = disc.derivative(sigma);
            for d in [f[0] - z.z1, f[1] - z.z2, df[0] - s * xv.x1, df[1] - s * xv.x2] {
                out.push(d.re);
                out.push(d.im);
            }
        }
    }
    out.iter().all(|v| v.is_finite()).then_some(out)
}

fn interp_decode(q: [f64; 2], r: [u8; 2], problem: &Problem, x: &[f64], residual: f64) -> Interpolant {
    let shape = Shape::from_unconstrained(&x[..5]);
    let disc = ExtremalDisc::from_shape(q, r, &shape);
    let sigma = C64::new(x[5].tanh(), 0.0);
    let second = match problem {
        Problem::Pair(..) => {
            let v = C64::new(x[6], x[7]);
            if v.norm() > 0.0 {
                v * (v.norm().tanh() / v.norm())
            } else {
                ZERO
            }
        }
        Problem::Tangent(..) => C64::from_polar(x[6].exp(), x[7]),
    };
    Interpolant { disc, shape, sigma, second, residual }
}

/// Solves for a family member of stratum `r` through the data, starting
/// from `shape` with node guesses `(σ, second)`.
pub fn interpolate(q: [f64; 2], r: [u8; 2], problem: &Problem, shape: &Shape, sigma: C64, second: C64) -> Interpolant {
    let t = if sigma.norm() > 0.0 { sigma.arg() } else { 0.0 };
    let rot = C64::from_polar(1.0, -t);
    let shape = shape.rotated(r, t);
    let mut x0 = shape.to_unconstrained().to_vec();
    x0.push(sigma.norm().min(0.999_999).atanh());
    match problem {
        Problem::Pair(..) => {
            let zeta = second * rot;
            let n = zeta.norm().min(0.999_999);
            let v = if n > 0.0 { zeta / zeta.norm() * n.atanh() } else { ZERO };
            x0.push(v.re);
            x0.push(v.im);
        }
        Problem::Tangent(..) => {
            let s = second * rot.conj();
            x0.push(s.norm().max(1e-12).ln());
            x0.push(s.arg());
        }
    }
    let (x, res) = crate::optimize::levenberg_marquardt(|x| interp_residual(q, r, problem, x), &x0, 100, 1e-14);
    interp_decode(q, r, problem, &x, res)
}

/// Interpolating member seeded from a dual optimum; falls back to the other strata.
pub fn interpolate_from_dual(q: [f64; 2], problem: &Problem, sol: &DualSolution) -> Option<Interpolant> {
    let (sigma, second) = match problem {
        Problem::Pair(w, z) => (sol.disc.left_inverse(w)?, sol.disc.left_inverse(z)?),
        Problem::Tangent(z, x) => {
            let (s, d) = sol.disc.left_inverse_jet(z, x, None)?;
            // f'(σ) = X / F'(z)X along the geodesic
            (s, if d.norm() > 0.0 { d.inv() } else { C64::new(1.0, 0.0) })
        }
    };
    let mut best: Option<Interpolant> = None;
    let mut strata = vec![sol.disc.r];
    strata.extend(STRATA.iter().copied().filter(|r| *r != sol.disc.r));
    for r in strata {
        let cand = interpolate(q, r, problem, &sol.shape, sigma, second);
        let good = cand.residual < 1e-12;
        if best.as_ref().is_none_or(|b| cand.residual < b.residual) {
            best = Some(cand);
        }
        if good {
            break;
        }
    }
    best
}

/// Both halves of the extremal problem: the best left inverse found (a lower
/// bound) and an interpolating member of the family (an upper bound).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremalSolution {
    pub lower: f64,
    pub dual: ExtremalDisc,
    pub upper: Option<(f64, Interpolant)>,
}

impl ExtremalSolution {
    pub fn gap(&self) -> f64 {
        self.upper.as_ref().map_or(f64::INFINITY, |u| u.0 - self.lower)
    }
}

fn absorb(sol: &mut ExtremalSolution, problem: &Problem, dual: &DualSolution) {
    if dual.value > sol.lower {
        sol.lower = dual.value;
        sol.dual = dual.disc;
    }
    if let Some(it) = interpolate_from_dual(sol.dual.q, problem, dual) {
        if it.residual < 1e-12 {
            let up = it.value(problem);
            // the interpolant's own left inverse is a competitor too
            if let Some(v) = Evaluator::default().value(&it.disc, problem) {
                if v > sol.lower && v <= up + 1e-9 {
                    sol.lower = v;
                    sol.dual = it.disc;
                }
            }
            if sol.upper.as_ref().is_none_or(|u| up < u.0) {
                sol.upper = Some((up, it));
            }
        }
    }
}

/// Solves the extremal problem on `E{q}`: local optima of the dual search
/// seed interpolation attempts until the two bounds agree to `gap_target`.
pub fn solve(q: [f64; 2], problem: &Problem, gap_target: f64) -> ExtremalSolution {
    let mut sol: Option<ExtremalSolution> = None;
    for starts in [0..2, 2..6] {
        let cands = maximize_all(q, problem, &STRATA, starts, 2);
        for c in &cands {
            let s = sol.get_or_insert(ExtremalSolution { lower: c.value, dual: c.disc, upper: None });
            absorb(s, problem, c);
            if s.gap() <= gap_target {
                return sol.expect("set above");
            }
        }
    }
    sol.expect("nonempty candidate list")
}

/// Re-solves a nearby problem starting from a previous interpolant. Returns
/// `None` unless the new member closes the gap to `gap_target`.
pub fn solve_warm(q: [f64; 2], problem: &Problem, prev: &Interpolant, gap_target: f64) -> Option<ExtremalSolution> {
    let it = interpolate(q, prev.disc.r, problem, &prev.shape, prev.sigma, prev.second);
    if it.residual >= 1e-12 {
        return None;
    }
    let up = it.value(problem);
    let low = Evaluator::default().value(&it.disc, problem)?;
    if (up - low).abs() > gap_target || low > up + 1e-9 {
        return None;
    }
    Some(ExtremalSolution { lower: low, dual: it.disc, upper: Some((up, it)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::poincare_distance_raw;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_shapes() -> Vec<Shape> {
        vec![
            Shape { t: 0.3, beta: 0.7, phi: 0.4, theta: [0.2, -1.0] },
            Shape { t: 0.6, beta: 1.2, phi: -2.0, theta: [1.0, 2.0] },
            Shape { t: 0.5, beta: 0.0, phi: 0.0, theta: [0.0, 0.5] },
            Shape { t: 0.9, beta: 1.05, phi: 1.0, theta: [3.0, 0.1] },
        ]
    }

    #[test]
    fn family_members_touch_the_boundary_everywhere() {
        for q in [[1.0, 1.0], [2.0, 1.0], [1.0, 2.0], [2.0, 2.0], [1.5, 3.0]] {
            for r in STRATA {
                for s in sample_shapes() {
                    let d = ExtremalDisc::from_shape(q, r, &s);
                    for k in 0..64 {
                        let v = d.eval(C64::from_polar(1.0, TAU * k as f64 / 64.0));
                        let rho = v[0].norm().powf(q[0]) + v[1].norm().powf(q[1]);
                        assert!((rho - 1.0).abs() < 1e-12, "q={q:?} r={r:?} rho={rho}");
                    }
                }
            }
        }
    }

    #[test]
    fn left_inverse_inverts_the_disc() {
        for q in [[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [1.5, 3.0]] {
            for r in STRATA {
                for s in sample_shapes() {
                    if r == [0, 0] && s.beta == 0.0 {
                        // constant map
                        continue;
                    }
                    let d = ExtremalDisc::from_shape(q, r, &s);
                    for k in 0..12 {
                        let l = C64::from_polar(0.8 * (k as f64 + 1.0) / 12.0, 0.9 * k as f64);
                        let f = d.eval(l);
                        let back = d.left_inverse(&Point2::from_array(f)).unwrap_or_else(|| panic!("q={q:?} r={r:?} s={s:?} l={l}"));
                        assert!((back - l).norm() < 1e-10, "q={q:?} r={r:?} {back} vs {l}");
                    }
                }
            }
        }
    }

    #[test]
    fn left_inverse_maps_into_the_disc() {
        // Dense sample of the diamond; F must land strictly inside the unit disc.
        let d = ExtremalDisc::from_shape([1.0, 1.0], [0, 1], &sample_shapes()[1]);
        for i in 0..20 {
            for k in 0..20 {
                let r1 = 0.95 * i as f64 / 20.0;
                let r2 = (0.99 - r1) * k as f64 / 20.0;
                let z = Point2::new(C64::from_polar(r1, 0.3 * k as f64), C64::from_polar(r2, 1.1 * i as f64));
                let v = d.left_inverse(&z).unwrap();
                assert!(v.norm() < 1.0);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let d = ExtremalDisc::from_shape([2.0, 1.0], [1, 0], &sample_shapes()[0]);
        let l = c(0.2, -0.3);
        let h = 1e-6;
        let num = d.eval(l + h);
        let den = d.eval(l - h);
        let der = d.derivative(l);
        for j in 0..2 {
            assert!(((num[j] - den[j]) / (2.0 * h) - der[j]).norm() < 1e-8);
        }
        let z = Point2::new(c(0.2, 0.1), c(-0.3, 0.2));
        let x = Tangent2::new(c(0.3, -0.1), c(0.5, 0.4));
        let (f0, df) = d.left_inverse_jet(&z, &x, None).unwrap();
        let f1 = d.left_inverse(&(z + x * h)).unwrap();
        assert!(((f1 - f0) / h - df).norm() < 1e-5);
    }

    #[test]
    fn linear_member_of_diamond_is_linear_sum() {
        let a = [C64::from_polar(0.3, 0.5), C64::from_polar(0.7, -1.0)];
        let d = ExtremalDisc::linear([1.0, 1.0], a);
        let z = Point2::new(c(0.1, 0.2), c(-0.3, 0.1));
        let expected = z.z1 * (a[0].conj() / a[0].norm()) + z.z2 * (a[1].conj() / a[1].norm());
        assert!((d.left_inverse(&z).unwrap() - expected).norm() < 1e-13);
    }

    #[test]
    fn polynomial_expansion_agrees() {
        for q in [[1.0, 1.0], [2.0, 1.0], [2.0, 2.0]] {
            for r in STRATA {
                let d = ExtremalDisc::from_shape(q, r, &sample_shapes()[0]);
                let p = d.polynomial_coeffs().unwrap();
                assert!(p[0].len() <= 3 && p[1].len() <= 3);
                let l = c(0.3, 0.4);
                let v = d.eval(l);
                for j in 0..2 {
                    let pv = p[j].iter().rev().fold(ZERO, |acc, k| acc * l + k);
                    assert!((pv - v[j]).norm() < 1e-14);
                }
            }
        }
        assert!(ExtremalDisc::from_shape([1.5, 1.0], [1, 1], &sample_shapes()[0]).polynomial_coeffs().is_none());
    }

    #[test]
    fn maximization_recovers_ball_closed_form() {
        // k_B(w,z) = artanh sqrt(1 - (1-|w|²)(1-|z|²)/|1-<w,z>|²)
        let w = Point2::new(c(0.2, -0.1), c(0.3, 0.25));
        let z = Point2::new(c(-0.4, 0.1), c(0.1, -0.5));
        let inner = w.z1 * z.z1.conj() + w.z2 * z.z2.conj();
        let t = (1.0 - (1.0 - w.norm().powi(2)) * (1.0 - z.norm().powi(2)) / (1.0 - inner).norm_sqr()).sqrt();
        let exact = t.atanh();
        let sol = maximize([2.0, 2.0], &Problem::Pair(w, z));
        assert!((sol.value - exact).abs() < 1e-9, "{} vs {exact}", sol.value);
    }

    #[test]
    fn maximization_recovers_diamond_axis_formula() {
        let w = Point2::real(0.5, 0.0);
        let z = Point2::real(0.0, 0.3);
        let exact = poincare_distance_raw(c(-0.5, 0.0), c(0.3, 0.0));
        let sol = maximize([1.0, 1.0], &Problem::Pair(w, z));
        assert!((sol.value - exact).abs() < 1e-9, "{} vs {exact}", sol.value);
        let w = Point2::real(0.5, 0.0);
        let z = Point2::real(0.5, 0.2);
        let sol = maximize([1.0, 1.0], &Problem::Pair(w, z));
        assert!((sol.value - 0.4f64.atanh()).abs() < 1e-9, "{}", sol.value);
    }

    #[test]
    fn interpolating_member_closes_the_gap() {
        let cases = [
            ([1.0, 1.0], Problem::Pair(Point2::real(0.5, 0.0), Point2::real(0.0, 0.3))),
            ([1.0, 1.0], Problem::Pair(Point2::new(c(0.2, 0.1), c(-0.3, 0.2)), Point2::new(c(-0.1, 0.4), c(0.2, 0.0)))),
            ([2.0, 1.0], Problem::Pair(Point2::new(c(0.2, 0.1), c(-0.3, 0.2)), Point2::new(c(-0.1, 0.4), c(0.2, 0.0)))),
            ([1.0, 1.0], Problem::Tangent(Point2::new(c(0.2, 0.1), c(0.1, -0.3)), Tangent2::new(c(1.0, 0.0), c(-0.5, 0.5)))),
            ([2.0, 2.0], Problem::Tangent(Point2::new(c(0.2, 0.1), c(0.1, -0.3)), Tangent2::new(c(1.0, 0.0), c(-0.5, 0.5)))),
        ];
        for (q, p) in cases {
            let sol = maximize(q, &p);
            let it = interpolate_from_dual(q, &p, &sol).unwrap();
            assert!(it.residual < 1e-12, "{q:?} {p:?} residual {}", it.residual);
            let up = it.value(&p);
            assert!((up - sol.value).abs() < 1e-8 * (1.0 + up), "{q:?} {p:?} {up} vs {}", sol.value);
        }
    }

    #[test]
    fn maximization_recovers_ball_metric() {
        let z = Point2::new(c(0.3, 0.1), c(-0.2, 0.4));
        let x = Tangent2::new(c(0.5, -0.2), c(0.1, 0.7));
        let nz = 1.0 - z.norm().powi(2);
        let inner = x.x1 * z.z1.conj() + x.x2 * z.z2.conj();
        let exact = (x.norm().powi(2) / nz + inner.norm_sqr() / (nz * nz)).sqrt();
        let sol = maximize([2.0, 2.0], &Problem::Tangent(z, x));
        assert!((sol.value - exact).abs() < 1e-9 * exact, "{} vs {exact}", sol.value);
    }
}
