//! Small derivative-free optimizers shared by the metric and oracle modules.

use std::f64::consts::TAU;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[a, b]`, to interval width `tol`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Supremum of a `2π`-periodic function: coarse grid of `grid` points, then
/// golden-section refinement around the best few grid maxima to angle tolerance `tol`.
pub fn circle_max<F: FnMut(f64) -> f64>(mut f: F, grid: usize, tol: f64) -> (f64, f64) {
    let h = TAU / grid as f64;
    let vals: Vec<f64> = (0..grid).map(|k| f(k as f64 * h)).collect();
    let mut peaks: Vec<usize> = (0..grid)
        .filter(|&k| {
            let prev = vals[(k + grid - 1) % grid];
            let next = vals[(k + 1) % grid];
            vals[k] >= prev && vals[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap_or(std::cmp::Ordering::Equal));
    peaks.truncate(3);
    let mut best = (0.0, f64::NEG_INFINITY);
    for (k, v) in vals.iter().enumerate() {
        if *v > best.1 {
            best = (k as f64 * h, *v);
        }
    }
    for k in peaks {
        let centre = k as f64 * h;
        let (t, v) = golden_max(&mut f, centre - h, centre + h, tol);
        if v > best.1 {
            best = (t.rem_euclid(TAU), v);
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_evals: usize,
    pub ftol: f64,
    pub xtol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_evals: 4000, ftol: 1e-13, xtol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

impl NelderMead {
    /// Minimizes `f` starting from a simplex around `x0` with per-axis `step`.
    /// Uses the dimension-adaptive coefficients of Gao and Han.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64], step: &[f64]) -> Minimum {
        let n = x0.len();
        let nf = n as f64;
        let (alpha, beta, gamma, delta) = if n >= 2 {
            (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
        } else {
            (1.0, 2.0, 0.5, 0.5)
        };
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = eval(x0, &mut evals);
        simplex.push((x0.to_vec(), v0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step[i];
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        loop {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let fspread = (simplex[n].1 - simplex[0].1).abs();
            let xspread = simplex
                .iter()
                .skip(1)
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if evals >= self.max_evals
                || (fspread <= self.ftol * (1.0 + simplex[0].1.abs()) && xspread <= self.xtol)
                || xspread <= 1e-15
            {
                break;
            }
            let mut centroid = vec![0.0; n];
            for (x, _) in simplex.iter().take(n) {
                for k in 0..n {
                    centroid[k] += x[k] / nf;
                }
            }
            let worst = simplex[n].clone();
            let along = |t: f64| -> Vec<f64> {
                (0..n).map(|k| centroid[k] + t * (worst.0[k] - centroid[k])).collect()
            };
            let xr = along(-alpha);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(-alpha * beta);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let xc = along(-alpha * gamma);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(gamma);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for item in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = (0..n).map(|k| best[k] + delta * (item.0[k] - best[k])).collect();
                let v = eval(&x, &mut evals);
                *item = (x, v);
            }
        }
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let (x, value) = simplex.swap_remove(0);
        Minimum { x, value, evals }
    }

    /// Repeated restarts from the incumbent with a shrinking simplex until no progress.
    pub fn minimize_restarted<F: FnMut(&[f64]) -> f64>(
        &self,
        mut f: F,
        x0: &[f64],
        step: &[f64],
        rounds: usize,
    ) -> Minimum {
        let mut best = self.minimize(&mut f, x0, step);
        let mut total = best.evals;
        let mut scale = 0.3;
        for _ in 1..rounds {
            let s: Vec<f64> = step.iter().map(|v| v * scale).collect();
            let next = self.minimize(&mut f, &best.x, &s);
            total += next.evals;
            let improved = next.value < best.value - 1e-15 * (1.0 + best.value.abs());
            if next.value <= best.value {
                best = next;
            }
            if !improved {
                break;
            }
            scale *= 0.3;
        }
        best.evals = total;
        best
    }
}

/// Largest `t` in `[lo, hi]` with `ok(t)`, assuming `ok` is monotone (true then false).
pub fn bisect_last_true<F: FnMut(f64) -> bool>(mut ok: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Levenberg–Marquardt on a residual map with a central-difference Jacobian.
/// Returns the final point and its residual norm.
pub fn levenberg_marquardt<F: FnMut(&[f64]) -> Option<Vec<f64>>>(mut res: F, x0: &[f64], max_iter: usize, tol: f64) -> (Vec<f64>, f64) {
    let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = x0.to_vec();
    let mut r = match res(&x) {
        Some(r) => r,
        None => return (x, f64::INFINITY),
    };
    let mut nr = norm(&r);
    let mut damping = 1e-3;
    let n = x.len();
    for _ in 0..max_iter {
        if nr < tol {
            break;
        }
        let h = 1e-7;
        let mut jac = vec![vec![0.0; n]; r.len()];
        for k in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let (Some(rp), Some(rm)) = (res(&xp), res(&xm)) else {
                return (x, nr);
            };
            for i in 0..r.len() {
                jac[i][k] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for i in 0..r.len() {
            for a in 0..n {
                jtr[a] -= jac[i][a] * r[i];
                for b in 0..n {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut m = jtj.clone();
            for a in 0..n {
                m[a][a] += damping * (1.0 + jtj[a][a]);
            }
            if let Some(step) = solve_linear(m, jtr.clone()) {
                let xn: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
                if let Some(rn) = res(&xn) {
                    let nn = norm(&rn);
                    if nn < nr {
                        x = xn;
                        r = rn;
                        nr = nn;
                        damping = (damping * 0.2).max(1e-12);
                        improved = true;
                        break;
                    }
                }
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (x, nr)
}
