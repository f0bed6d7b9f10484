//! Where two fitted runtime lines meet.
//!
//! A method's runtime at size `M` is modeled as its cost divided by a clock
//! rate, one cost unit per tick: `ln t(M) = intercept + slope·M − ln(clock·1s)`.

use serde::{Deserialize, Serialize};

use crate::fit::ScalingFit;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Clocks {
    pub cpu_hz: f64,
    pub qpu_hz: f64,
}

impl Default for Clocks {
    fn default() -> Self {
        Self {
            cpu_hz: 1e9,
            qpu_hz: 1e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Crossover {
    /// The lines meet at `m`. `low`/`high` bound it over the slope ± stderr
    /// corners; `None` means that side is unbounded.
    At { m: f64, low: Option<f64>, high: Option<f64> },
    /// The quantum line never drops below the classical one.
    Unbounded,
    /// The lines coincide.
    Everywhere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverEstimate {
    pub cpu_clock_hz: f64,
    pub qpu_clock_hz: f64,
    pub cpu_slope: f64,
    pub qpu_slope: f64,
    pub crossover: Crossover,
}

impl CrossoverEstimate {
    pub fn m(&self) -> Option<f64> {
        match self.crossover {
            Crossover::At { m, .. } => Some(m),
            _ => None,
        }
    }
}

/// Intersection of the classical and quantum runtime lines.
pub fn estimate_crossover(cpu: &ScalingFit, qpu: &ScalingFit, clocks: Clocks) -> CrossoverEstimate {
    let offset_c = cpu.intercept - clocks.cpu_hz.ln();
    let offset_q = qpu.intercept - clocks.qpu_hz.ln();
    let gap = offset_q - offset_c;
    let diff = cpu.slope - qpu.slope;
    let crossover = if diff > 0.0 {
        let mut low = Some(f64::INFINITY);
        let mut high = Some(f64::NEG_INFINITY);
        for sc in [-1.0, 1.0] {
            for sq in [-1.0, 1.0] {
                let d = (cpu.slope + sc * cpu.slope_stderr) - (qpu.slope + sq * qpu.slope_stderr);
                if d > 0.0 {
                    let m = gap / d;
                    low = low.map(|l| l.min(m));
                    high = high.map(|h| h.max(m));
                } else if gap > 0.0 {
                    high = None;
                } else if gap < 0.0 {
                    low = None;
                }
            }
        }
        let m = gap / diff;
        Crossover::At {
            m,
            low: low.map(|l| l.min(m)),
            high: high.map(|h| h.max(m)),
        }
    } else if diff == 0.0 && gap == 0.0 {
        Crossover::Everywhere
    } else {
        Crossover::Unbounded
    };
    CrossoverEstimate {
        cpu_clock_hz: clocks.cpu_hz,
        qpu_clock_hz: clocks.qpu_hz,
        cpu_slope: cpu.slope,
        qpu_slope: qpu.slope,
        crossover,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(slope: f64, intercept: f64, stderr: f64) -> ScalingFit {
        ScalingFit {
            points: Vec::new(),
            slope,
            slope_stderr: stderr,
            intercept,
            intercept_stderr: 0.0,
            r_squared: 1.0,
            fit_start_m: 0,
            used: 0,
        }
    }

    const EQUAL: Clocks = Clocks { cpu_hz: 1.0, qpu_hz: 1.0 };

    #[test]
    fn identical_lines_meet_everywhere() {
        let f = line(0.1, 2.0, 0.01);
        assert_eq!(estimate_crossover(&f, &f, EQUAL).crossover, Crossover::Everywhere);
    }

    #[test]
    fn common_intercept_meets_at_zero() {
        let e = estimate_crossover(&line(0.2, 3.0, 0.0), &line(0.1, 3.0, 0.0), EQUAL);
        assert_eq!(e.m(), Some(0.0));
    }

    #[test]
    fn flatter_classical_never_crosses() {
        let e = estimate_crossover(&line(0.1, 0.0, 0.0), &line(0.2, 0.0, 0.0), Clocks::default());
        assert_eq!(e.crossover, Crossover::Unbounded);
        let e = estimate_crossover(&line(0.1, 0.0, 0.0), &line(0.1, 1.0, 0.0), EQUAL);
        assert_eq!(e.crossover, Crossover::Unbounded);
    }

    #[test]
    fn clock_normalization() {
        // 10^6 faster classical clock: the quantum line starts ln(10^6) higher.
        let e = estimate_crossover(&line(0.2, 0.0, 0.0), &line(0.1, 0.0, 0.0), Clocks::default());
        let want = 1e6f64.ln() / 0.1;
        assert!((e.m().unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn interval_from_corners() {
        let e = estimate_crossover(&line(0.2, 0.0, 0.02), &line(0.1, 5.0, 0.01), EQUAL);
        match e.crossover {
            Crossover::At { m, low, high } => {
                assert!((m - 50.0).abs() < 1e-9);
                assert!((low.unwrap() - 5.0 / 0.13).abs() < 1e-9);
                assert!((high.unwrap() - 5.0 / 0.07).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn uncertain_slopes_leave_the_interval_open() {
        let e = estimate_crossover(&line(0.2, 0.0, 0.08), &line(0.1, 5.0, 0.05), EQUAL);
        match e.crossover {
            Crossover::At { low, high, .. } => {
                assert!(low.is_some());
                assert!(high.is_none());
            }
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn monotone_in_qpu_clock(
            ac in 0.05f64..1.0, dq in 0.01f64..0.9, bc in -10.0f64..10.0, bq in -10.0f64..10.0,
            f1 in 1.0f64..1e9, ratio in 1.0f64..1e3,
        ) {
            let cpu = line(ac, bc, 0.0);
            let qpu = line(ac * (1.0 - dq), bq, 0.0);
            let slow = estimate_crossover(&cpu, &qpu, Clocks { cpu_hz: 1e9, qpu_hz: f1 });
            let fast = estimate_crossover(&cpu, &qpu, Clocks { cpu_hz: 1e9, qpu_hz: f1 * ratio });
            prop_assert!(fast.m().unwrap() <= slow.m().unwrap());
        }

        #[test]
        fn lines_are_equal_at_the_crossover(
            ac in 0.05f64..1.0, dq in 0.01f64..0.9, bc in -10.0f64..10.0, bq in -10.0f64..10.0,
        ) {
            let cpu = line(ac, bc, 0.0);
            let qpu = line(ac * (1.0 - dq), bq, 0.0);
            let clocks = Clocks::default();
            let m = estimate_crossover(&cpu, &qpu, clocks).m().unwrap();
            let tc = cpu.predict_ln(m) - clocks.cpu_hz.ln();
            let tq = qpu.predict_ln(m) - clocks.qpu_hz.ln();
            prop_assert!((tc - tq).abs() < 1e-9 * (1.0 + tc.abs()));
        }
    }
}
