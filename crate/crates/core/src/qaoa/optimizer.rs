//! Gradient-free minimizers driven by an objective callback.
//!
//! The callback returns `ControlFlow::Break(())` to stop the run on the spot
//! (used for early stopping on the first ground-state sample).

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

pub type Objective<'a> = dyn FnMut(&[f64]) -> ControlFlow<(), f64> + 'a;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    /// Best point seen.
    pub x: Vec<f64>,
    pub fun: f64,
    pub evaluations: usize,
    /// The callback asked to stop.
    pub interrupted: bool,
}

pub trait Optimizer {
    /// Minimize from `x0` using at most `budget` evaluations.
    fn minimize(&self, x0: &[f64], budget: usize, f: &mut Objective<'_>) -> OptimizeResult;
}

/// Wraps an objective with a budget, best-point tracking and break handling.
struct Tracker<'a, 'b> {
    f: &'a mut Objective<'b>,
    budget: usize,
    evaluations: usize,
    best_x: Vec<f64>,
    best_f: f64,
    interrupted: bool,
}

impl<'a, 'b> Tracker<'a, 'b> {
    fn new(f: &'a mut Objective<'b>, x0: &[f64], budget: usize) -> Self {
        Self {
            f,
            budget,
            evaluations: 0,
            best_x: x0.to_vec(),
            best_f: f64::INFINITY,
            interrupted: false,
        }
    }

    /// `None` once the budget is spent or the callback broke off.
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.interrupted || self.evaluations >= self.budget {
            return None;
        }
        self.evaluations += 1;
        match (self.f)(x) {
            ControlFlow::Break(()) => {
                self.interrupted = true;
                self.best_x = x.to_vec();
                None
            }
            ControlFlow::Continue(v) => {
                let v = if v.is_nan() { f64::INFINITY } else { v };
                if v < self.best_f {
                    self.best_f = v;
                    self.best_x = x.to_vec();
                }
                Some(v)
            }
        }
    }

    fn finish(self) -> OptimizeResult {
        OptimizeResult {
            x: self.best_x,
            fun: self.best_f,
            evaluations: self.evaluations,
            interrupted: self.interrupted,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Powell's constrained optimization by linear approximations, without
/// constraints: a simplex of `n + 1` points defines a linear model, steps
/// minimize it inside a trust region of radius `rho`, and `rho` shrinks from
/// `rho_begin` to `rho_end` as the model stops paying off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cobyla {
    pub rho_begin: f64,
    pub rho_end: f64,
}

impl Default for Cobyla {
    fn default() -> Self {
        Self {
            rho_begin: 1.0,
            rho_end: 1e-4,
        }
    }
}

const ALPHA: f64 = 0.25;
const BETA: f64 = 2.1;
const GAMMA: f64 = 0.5;
const DELTA: f64 = 1.1;

impl Optimizer for Cobyla {
    fn minimize(&self, x0: &[f64], budget: usize, f: &mut Objective<'_>) -> OptimizeResult {
        let n = x0.len();
        let mut t = Tracker::new(f, x0, budget);
        if n == 0 {
            t.eval(x0);
            return t.finish();
        }
        let mut rho = self.rho_begin;
        // Base vertex, displacements d_j of the other vertices, and the rows
        // s_j of the inverse with s_j · d_k = δ_jk.
        let mut base = x0.to_vec();
        let Some(mut f_base) = t.eval(&base) else {
            return t.finish();
        };
        let mut d: Vec<Vec<f64>> = vec![vec![0.0; n]; n];
        let mut s: Vec<Vec<f64>> = vec![vec![0.0; n]; n];
        let mut fv = vec![0.0; n];
        for j in 0..n {
            d[j][j] = rho;
            s[j][j] = 1.0 / rho;
            let mut x = base.clone();
            x[j] += rho;
            match t.eval(&x) {
                Some(v) => fv[j] = v,
                None => return t.finish(),
            }
        }
        let mut force_geometry = false;
        loop {
            // Make the lowest vertex the base.
            if let Some(l) = (0..n).filter(|&j| fv[j] < f_base).min_by(|&a, &b| fv[a].total_cmp(&fv[b])) {
                let shift = d[l].clone();
                for i in 0..n {
                    base[i] += shift[i];
                }
                for (j, dj) in d.iter_mut().enumerate() {
                    if j == l {
                        dj.iter_mut().for_each(|v| *v = -*v);
                    } else {
                        dj.iter_mut().zip(&shift).for_each(|(v, sh)| *v -= sh);
                    }
                }
                let mut sl = vec![0.0; n];
                for sj in &s {
                    sl.iter_mut().zip(sj).for_each(|(a, b)| *a -= b);
                }
                s[l] = sl;
                std::mem::swap(&mut fv[l], &mut f_base);
            }

            let parsig = ALPHA * rho;
            let pareta = BETA * rho;
            let vsig: Vec<f64> = s.iter().map(|sj| 1.0 / norm(sj)).collect();
            let veta: Vec<f64> = d.iter().map(|dj| norm(dj)).collect();
            let acceptable = (0..n).all(|j| vsig[j] >= parsig && veta[j] <= pareta);
            let g: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| (fv[j] - f_base) * s[j][i]).sum())
                .collect();

            if force_geometry && !acceptable {
                force_geometry = false;
                // Replace the vertex that most spoils the simplex shape.
                let mut jdrop = None;
                let mut worst = pareta;
                for j in 0..n {
                    if veta[j] > worst {
                        jdrop = Some(j);
                        worst = veta[j];
                    }
                }
                if jdrop.is_none() {
                    let mut worst = parsig;
                    for j in 0..n {
                        if vsig[j] < worst {
                            jdrop = Some(j);
                            worst = vsig[j];
                        }
                    }
                }
                let j = jdrop.expect("unacceptable simplex has an offending vertex");
                let scale = GAMMA * rho * vsig[j];
                let mut dx: Vec<f64> = s[j].iter().map(|v| scale * v).collect();
                if dot(&g, &dx) > 0.0 {
                    dx.iter_mut().for_each(|v| *v = -*v);
                }
                let x: Vec<f64> = base.iter().zip(&dx).map(|(a, b)| a + b).collect();
                let Some(v) = t.eval(&x) else {
                    return t.finish();
                };
                replace_vertex(&mut d, &mut s, j, dx);
                fv[j] = v;
                continue;
            }

            let gnorm = norm(&g);
            let mut shrink = true;
            if gnorm.is_finite() && gnorm > 0.0 {
                let dx: Vec<f64> = g.iter().map(|v| -rho * v / gnorm).collect();
                let x: Vec<f64> = base.iter().zip(&dx).map(|(a, b)| a + b).collect();
                let Some(v) = t.eval(&x) else {
                    return t.finish();
                };
                let predicted = rho * gnorm;
                let actual = f_base - v;
                let mut jdrop = None;
                let mut ratio = if actual <= 0.0 { 1.0 } else { 0.0 };
                let mut sigbar = vec![0.0; n];
                for j in 0..n {
                    let c = dot(&s[j], &dx).abs();
                    if c > ratio {
                        jdrop = Some(j);
                        ratio = c;
                    }
                    sigbar[j] = c * vsig[j];
                }
                let mut edgmax = DELTA * rho;
                let mut far = None;
                for j in 0..n {
                    if sigbar[j] >= parsig || sigbar[j] >= vsig[j] {
                        let edge = if actual > 0.0 {
                            norm(&dx.iter().zip(&d[j]).map(|(a, b)| a - b).collect::<Vec<_>>())
                        } else {
                            veta[j]
                        };
                        if edge > edgmax {
                            far = Some(j);
                            edgmax = edge;
                        }
                    }
                }
                if far.is_some() {
                    jdrop = far;
                }
                if let Some(j) = jdrop {
                    replace_vertex(&mut d, &mut s, j, dx);
                    fv[j] = v;
                    shrink = !(actual > 0.0 && actual >= 0.1 * predicted);
                }
            }
            if !shrink {
                continue;
            }
            if !acceptable {
                force_geometry = true;
                continue;
            }
            if rho > self.rho_end {
                rho *= 0.5;
                if rho <= 1.5 * self.rho_end {
                    rho = self.rho_end;
                }
                continue;
            }
            return t.finish();
        }
    }
}

fn replace_vertex(d: &mut [Vec<f64>], s: &mut [Vec<f64>], j: usize, dx: Vec<f64>) {
    let pivot = dot(&s[j], &dx);
    let sj: Vec<f64> = s[j].iter().map(|v| v / pivot).collect();
    for (k, sk) in s.iter_mut().enumerate() {
        if k != j {
            let c = dot(sk, &dx);
            sk.iter_mut().zip(&sj).for_each(|(a, b)| *a -= c * b);
        }
    }
    s[j] = sj;
    d[j] = dx;
}

/// Downhill simplex with the standard reflection, expansion, contraction
/// and shrink coefficients (1, 2, ½, ½).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMead {
    /// Edge length of the start simplex.
    pub initial_step: f64,
    pub x_tol: f64,
    pub f_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            initial_step: 0.5,
            x_tol: 1e-4,
            f_tol: 1e-4,
        }
    }
}

impl Optimizer for NelderMead {
    fn minimize(&self, x0: &[f64], budget: usize, f: &mut Objective<'_>) -> OptimizeResult {
        let n = x0.len();
        let mut t = Tracker::new(f, x0, budget);
        let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let mut x = x0.to_vec();
            if j > 0 {
                x[j - 1] += self.initial_step;
            }
            let Some(v) = t.eval(&x) else {
                return t.finish();
            };
            pts.push((x, v));
        }
        let along = |c: &[f64], x: &[f64], k: f64| -> Vec<f64> {
            c.iter().zip(x).map(|(ci, xi)| ci + k * (xi - ci)).collect()
        };
        loop {
            pts.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread_f = pts.iter().map(|p| (p.1 - pts[0].1).abs()).fold(0.0, f64::max);
            let spread_x = pts
                .iter()
                .flat_map(|p| p.0.iter().zip(&pts[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if n == 0 || (spread_f <= self.f_tol && spread_x <= self.x_tol) {
                return t.finish();
            }
            let mut centroid = vec![0.0; n];
            for p in &pts[..n] {
                centroid.iter_mut().zip(&p.0).for_each(|(c, x)| *c += x / n as f64);
            }
            let worst = pts[n].clone();
            let xr = along(&centroid, &worst.0, -1.0);
            let Some(fr) = t.eval(&xr) else {
                return t.finish();
            };
            if fr < pts[0].1 {
                let xe = along(&centroid, &worst.0, -2.0);
                let Some(fe) = t.eval(&xe) else {
                    return t.finish();
                };
                pts[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < pts[n - 1].1 {
                pts[n] = (xr, fr);
                continue;
            }
            let (xc, outside) = if fr < worst.1 {
                (along(&centroid, &xr, 0.5), true)
            } else {
                (along(&centroid, &worst.0, 0.5), false)
            };
            let Some(fc) = t.eval(&xc) else {
                return t.finish();
            };
            if (outside && fc <= fr) || (!outside && fc < worst.1) {
                pts[n] = (xc, fc);
                continue;
            }
            let best = pts[0].0.clone();
            for p in pts.iter_mut().skip(1) {
                p.0 = along(&best, &p.0, 0.5);
                let Some(v) = t.eval(&p.0) else {
                    return t.finish();
                };
                p.1 = v;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OptimizerKind {
    Cobyla(Cobyla),
    NelderMead(NelderMead),
}

impl Default for OptimizerKind {
    fn default() -> Self {
        OptimizerKind::Cobyla(Cobyla::default())
    }
}

impl Optimizer for OptimizerKind {
    fn minimize(&self, x0: &[f64], budget: usize, f: &mut Objective<'_>) -> OptimizeResult {
        match self {
            OptimizerKind::Cobyla(o) => o.minimize(x0, budget, f),
            OptimizerKind::NelderMead(o) => o.minimize(x0, budget, f),
        }
    }
}

/// Run `opt` repeatedly, each time from the best point so far, until the
/// budget is spent or the callback breaks off.
pub fn minimize_with_restarts(
    opt: &dyn Optimizer,
    x0: &[f64],
    budget: usize,
    f: &mut Objective<'_>,
) -> OptimizeResult {
    let mut total = OptimizeResult {
        x: x0.to_vec(),
        fun: f64::INFINITY,
        evaluations: 0,
        interrupted: false,
    };
    while total.evaluations < budget {
        let r = opt.minimize(&total.x.clone(), budget - total.evaluations, f);
        total.evaluations += r.evaluations;
        if r.interrupted {
            total.x = r.x;
            total.interrupted = true;
            break;
        }
        if r.fun < total.fun {
            total.fun = r.fun;
            total.x = r.x;
        }
        if r.evaluations == 0 {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, v)| (i as f64 + 1.0) * (v - 0.3 * i as f64).powi(2))
            .sum()
    }

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    fn run(opt: &dyn Optimizer, x0: &[f64], budget: usize, g: fn(&[f64]) -> f64) -> OptimizeResult {
        opt.minimize(x0, budget, &mut |x: &[f64]| ControlFlow::Continue(g(x)))
    }

    #[test]
    fn cobyla_minimizes_quadratic() {
        let r = run(&Cobyla::default(), &[1.0, -2.0, 0.5, 2.0], 2000, quadratic);
        for (i, v) in r.x.iter().enumerate() {
            assert!((v - 0.3 * i as f64).abs() < 1e-3, "{:?}", r.x);
        }
        assert!(r.fun < 1e-6);
    }

    #[test]
    fn cobyla_on_rosenbrock() {
        let opt = Cobyla { rho_begin: 0.5, rho_end: 1e-6 };
        let r = run(&opt, &[-1.2, 1.0], 20_000, rosenbrock);
        assert!(r.fun < 1e-4, "{r:?}");
    }

    #[test]
    fn nelder_mead_minimizes() {
        let r = run(&NelderMead { x_tol: 1e-8, f_tol: 1e-10, ..NelderMead::default() }, &[-1.2, 1.0], 5000, rosenbrock);
        assert!(r.fun < 1e-6, "{r:?}");
        let r = run(&NelderMead::default(), &[1.0, -2.0, 0.5], 5000, quadratic);
        assert!(r.fun < 1e-4);
    }

    #[test]
    fn budget_is_respected() {
        for opt in [OptimizerKind::default(), OptimizerKind::NelderMead(NelderMead::default())] {
            let mut calls = 0;
            let r = opt.minimize(&[3.0, 3.0, 3.0], 17, &mut |x: &[f64]| {
                calls += 1;
                ControlFlow::Continue(rosenbrock(x) + x[2].powi(2))
            });
            assert_eq!(calls, r.evaluations);
            assert!(calls <= 17);
        }
    }

    #[test]
    fn break_stops_immediately() {
        let mut calls = 0;
        let r = Cobyla::default().minimize(&[0.0; 4], 1000, &mut |_x: &[f64]| {
            calls += 1;
            if calls == 7 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(calls as f64)
            }
        });
        assert!(r.interrupted);
        assert_eq!(r.evaluations, 7);
        assert_eq!(calls, 7);
    }

    #[test]
    fn restarts_use_the_whole_budget() {
        let mut calls = 0usize;
        let r = minimize_with_restarts(&Cobyla::default(), &[0.5, 0.5], 300, &mut |x: &[f64]| {
            calls += 1;
            ControlFlow::Continue(quadratic(x))
        });
        assert_eq!(r.evaluations, 300);
        assert_eq!(calls, 300);
        assert!(r.fun < 1e-6);
    }

    #[test]
    fn flat_objective_terminates() {
        let r = run(&Cobyla::default(), &[0.1, 0.2], 10_000, |_| 0.0);
        assert!(r.evaluations < 200);
        assert_eq!(r.fun, 0.0);
    }
}
