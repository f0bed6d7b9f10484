//! Generalized simulated annealing with Tsallis visiting and acceptance
//! distributions, alternating annealing chains with an optional local
//! search, in the formulation popularized by SciPy's `dual_annealing`.

use std::f64::consts::PI;
use std::ops::ControlFlow;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::rng::Rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaConfig {
    /// Visiting parameter `q_v`.
    pub visit: f64,
    /// Acceptance parameter `q_a`.
    pub accept: f64,
    pub max_iterations: usize,
    pub initial_temperature: f64,
    /// Re-anneal once the temperature falls below this fraction of the start.
    pub restart_temp_ratio: f64,
    pub max_evaluations: u64,
    pub seed: u64,
    pub local_search: bool,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            visit: 1.01,
            accept: 0.9,
            max_iterations: 1000,
            initial_temperature: 5230.0,
            restart_temp_ratio: 2e-5,
            max_evaluations: 10_000_000,
            seed: 0,
            local_search: true,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.visit > 1.0 && self.visit <= 3.0) {
            return Err(Error::InvalidConfig(format!("visit {} is outside (1, 3]", self.visit)));
        }
        if !(self.accept.is_finite() && self.accept != 1.0) {
            return Err(Error::InvalidConfig(format!("accept {} is not usable", self.accept)));
        }
        if self.max_iterations == 0 || self.max_evaluations == 0 {
            return Err(Error::InvalidConfig("iteration and evaluation limits must be positive".into()));
        }
        if !(self.initial_temperature > 0.0) || !(self.restart_temp_ratio > 0.0 && self.restart_temp_ratio < 1.0) {
            return Err(Error::InvalidConfig("temperatures must be positive".into()));
        }
        Ok(())
    }
}

/// Objective on the box `[0, 1]^dim`. `Break` ends the run at once.
pub trait AnnealObjective {
    fn eval(&mut self, y: &[f64]) -> ControlFlow<(), f64>;

    /// Refine `(y, e)`; the default does nothing.
    fn local_search(&mut self, y: &[f64], e: f64) -> ControlFlow<(), (f64, Vec<f64>)> {
        ControlFlow::Continue((e, y.to_vec()))
    }

    /// Called after every completed annealing iteration.
    fn end_iteration(&mut self) {}
}

impl<F: FnMut(&[f64]) -> ControlFlow<(), f64>> AnnealObjective for F {
    fn eval(&mut self, y: &[f64]) -> ControlFlow<(), f64> {
        self(y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealResult {
    pub x: Vec<f64>,
    pub fun: f64,
    pub iterations: usize,
    pub interrupted: bool,
}

const TAIL_LIMIT: f64 = 1e8;
const MIN_VISIT_BOUND: f64 = 1e-10;

/// Tsallis visiting distribution on `[0, 1]^dim` with wrap-around.
struct Visiting {
    q: f64,
    factor4_p: f64,
    factor6: f64,
}

impl Visiting {
    fn new(q: f64) -> Self {
        let factor2 = ((4.0 - q) * (q - 1.0).ln()).exp();
        let factor3 = ((2.0 - q) * 2f64.ln() / (q - 1.0)).exp();
        let factor4_p = PI.sqrt() * factor2 / (factor3 * (3.0 - q));
        let factor5 = 1.0 / (q - 1.0) - 0.5;
        let d1 = 2.0 - factor5;
        let factor6 = PI * (1.0 - factor5) / (PI * (1.0 - factor5)).sin() / libm::lgamma(d1).exp();
        Self { q, factor4_p, factor6 }
    }

    fn draw(&self, temperature: f64, rng: &mut Rng) -> f64 {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let q = self.q;
        let factor1 = (temperature.ln() / (q - 1.0)).exp();
        let factor4 = self.factor4_p * factor1;
        let sigma = (-(q - 1.0) * (self.factor6 / factor4).ln() / (3.0 - q)).exp();
        let den = ((q - 1.0) * y.abs().ln() / (3.0 - q)).exp();
        x * sigma / den
    }

    fn clip(v: f64, rng: &mut Rng) -> f64 {
        if v > TAIL_LIMIT || v.is_nan() {
            TAIL_LIMIT * rng.gen::<f64>()
        } else if v < -TAIL_LIMIT {
            -TAIL_LIMIT * rng.gen::<f64>()
        } else {
            v
        }
    }

    fn wrap(v: f64) -> f64 {
        let w = (v % 1.0 + 1.0) % 1.0;
        if w.abs() < MIN_VISIT_BOUND {
            w + MIN_VISIT_BOUND
        } else {
            w
        }
    }

    /// `step < dim` moves every coordinate, otherwise only `step - dim`.
    fn visit(&self, x: &[f64], step: usize, temperature: f64, rng: &mut Rng) -> Vec<f64> {
        let dim = x.len();
        let mut out = x.to_vec();
        if step < dim {
            let draws: Vec<f64> = (0..dim).map(|_| self.draw(temperature, rng)).collect();
            let upper: f64 = rng.gen();
            let lower: f64 = rng.gen();
            for (o, d) in out.iter_mut().zip(draws) {
                let v = if d > TAIL_LIMIT || d.is_nan() {
                    TAIL_LIMIT * upper
                } else if d < -TAIL_LIMIT {
                    -TAIL_LIMIT * lower
                } else {
                    d
                };
                *o = Self::wrap(*o + v);
            }
        } else {
            let i = step - dim;
            let v = Self::clip(self.draw(temperature, rng), rng);
            out[i] = Self::wrap(out[i] + v);
        }
        out
    }
}

struct State {
    current: Vec<f64>,
    current_e: f64,
    best: Vec<f64>,
    best_e: f64,
}

/// Minimize over `[0, 1]^dim`. Returns the best point seen.
pub fn generalized_annealing<O: AnnealObjective + ?Sized>(
    dim: usize,
    config: &SaConfig,
    rng: &mut Rng,
    objective: &mut O,
) -> Result<AnnealResult> {
    config.validate()?;
    if dim == 0 {
        return Err(Error::InvalidConfig("annealing needs at least one variable".into()));
    }
    let visiting = Visiting::new(config.visit);
    let mut evaluations = 0u64;
    let mut iterations = 0usize;

    macro_rules! eval {
        ($y:expr) => {{
            evaluations += 1;
            match objective.eval($y) {
                ControlFlow::Continue(v) => v,
                ControlFlow::Break(()) => {
                    return Ok(AnnealResult {
                        x: $y.to_vec(),
                        fun: f64::NEG_INFINITY,
                        iterations,
                        interrupted: true,
                    })
                }
            }
        }};
    }

    let start: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
    let e0 = eval!(&start);
    let mut st = State {
        current: start.clone(),
        current_e: e0,
        best: start,
        best_e: e0,
    };
    // Strategy-chain memory.
    let mut emin = st.current_e;
    let mut xmin = st.current.clone();
    let mut not_improved = 0usize;
    let mut not_improved_max = 1000usize;

    let temperature_restart = config.initial_temperature * config.restart_temp_ratio;
    let t1 = ((config.visit - 1.0) * 2f64.ln()).exp() - 1.0;
    let qa = config.accept;

    'outer: loop {
        for i in 0..config.max_iterations {
            let s = i as f64 + 2.0;
            let t2 = ((config.visit - 1.0) * s.ln()).exp() - 1.0;
            let temperature = config.initial_temperature * t1 / t2;
            if iterations >= config.max_iterations {
                break 'outer;
            }
            if temperature < temperature_restart {
                let y: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
                let e = eval!(&y);
                st.current = y;
                st.current_e = e;
                continue 'outer;
            }

            // Annealing chain.
            let t_step = temperature / (i as f64 + 1.0);
            not_improved += 1;
            let mut improved = i == 0;
            for j in 0..2 * dim {
                let y = visiting.visit(&st.current, j, temperature, rng);
                let e = eval!(&y);
                if e < st.current_e {
                    st.current = y.clone();
                    st.current_e = e;
                    if e < st.best_e {
                        st.best = y;
                        st.best_e = e;
                        improved = true;
                        not_improved = 0;
                    }
                } else {
                    let r: f64 = rng.gen();
                    let base = 1.0 - (1.0 - qa) * (e - st.current_e) / t_step;
                    let p = if base <= 0.0 { 0.0 } else { (base.ln() / (1.0 - qa)).exp() };
                    if r <= p {
                        st.current = y;
                        st.current_e = e;
                        xmin = st.current.clone();
                    }
                    if not_improved >= not_improved_max && (j == 0 || st.current_e < emin) {
                        emin = st.current_e;
                        xmin = st.current.clone();
                    }
                }
                if evaluations >= config.max_evaluations {
                    break 'outer;
                }
            }

            if config.local_search {
                if improved {
                    let (e, y) = match objective.local_search(&st.best, st.best_e) {
                        ControlFlow::Continue(v) => v,
                        ControlFlow::Break(()) => {
                            return Ok(AnnealResult {
                                x: st.best,
                                fun: f64::NEG_INFINITY,
                                iterations,
                                interrupted: true,
                            })
                        }
                    };
                    if e < st.best_e {
                        not_improved = 0;
                        st.best = y.clone();
                        st.best_e = e;
                        st.current = y;
                        st.current_e = e;
                    }
                }
                if not_improved >= not_improved_max {
                    let (e, y) = match objective.local_search(&xmin, emin) {
                        ControlFlow::Continue(v) => v,
                        ControlFlow::Break(()) => {
                            return Ok(AnnealResult {
                                x: xmin,
                                fun: f64::NEG_INFINITY,
                                iterations,
                                interrupted: true,
                            })
                        }
                    };
                    xmin = y.clone();
                    emin = e;
                    not_improved = 0;
                    not_improved_max = dim;
                    if e < st.best_e {
                        st.best = y.clone();
                        st.best_e = e;
                        st.current = y;
                        st.current_e = e;
                    }
                }
            }
            iterations += 1;
            objective.end_iteration();
        }
        if iterations >= config.max_iterations {
            break;
        }
    }
    Ok(AnnealResult {
        x: st.best,
        fun: st.best_e,
        iterations,
        interrupted: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn visiting_constants_are_finite() {
        for q in [1.01, 1.5, 2.0, 2.62, 2.9] {
            let v = Visiting::new(q);
            assert!(v.factor4_p.is_finite() && v.factor6.is_finite(), "q={q}");
        }
    }

    #[test]
    fn visits_stay_in_the_box() {
        let mut rng = rng_from_seed(1);
        let v = Visiting::new(1.01);
        let x = vec![0.5; 6];
        for step in 0..12 {
            for t in [5230.0, 10.0, 0.1, 1e-3] {
                let y = v.visit(&x, step, t, &mut rng);
                assert!(y.iter().all(|&c| (0.0..=1.0).contains(&c)), "{y:?}");
                if step >= 6 {
                    let moved = y.iter().zip(&x).filter(|(a, b)| a != b).count();
                    assert!(moved <= 1);
                }
            }
        }
    }

    #[test]
    fn minimizes_a_smooth_bowl() {
        let cfg = SaConfig {
            visit: 2.62,
            accept: -5.0,
            max_iterations: 1000,
            local_search: false,
            ..SaConfig::default()
        };
        let mut f = |y: &[f64]| ControlFlow::Continue(y.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>());
        let r = generalized_annealing(3, &cfg, &mut rng_from_seed(4), &mut f).unwrap();
        assert!(r.fun < 1e-3, "{r:?}");
        assert_eq!(r.iterations, 1000);
    }

    #[test]
    fn counts_every_call() {
        let mut calls = 0u64;
        let cfg = SaConfig {
            max_iterations: 25,
            ..SaConfig::default()
        };
        let mut f = |y: &[f64]| {
            calls += 1;
            ControlFlow::Continue(y.iter().sum::<f64>())
        };
        let r = generalized_annealing(4, &cfg, &mut rng_from_seed(2), &mut f).unwrap();
        // One start point plus 2·dim visits per iteration.
        assert_eq!(calls, 1 + 25 * 8);
        assert!(!r.interrupted);
    }

    #[test]
    fn break_interrupts() {
        let mut calls = 0;
        let mut f = |_y: &[f64]| {
            calls += 1;
            if calls == 10 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(1.0)
            }
        };
        let r = generalized_annealing(3, &SaConfig::default(), &mut rng_from_seed(0), &mut f).unwrap();
        assert!(r.interrupted);
        assert_eq!(calls, 10);
    }

    #[test]
    fn rejects_bad_visit() {
        let cfg = SaConfig { visit: 1.0, ..SaConfig::default() };
        let mut f = |_y: &[f64]| ControlFlow::Continue(0.0);
        assert!(generalized_annealing(2, &cfg, &mut rng_from_seed(0), &mut f).is_err());
    }
}
