use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack when checking that a span is a whole number of steps.
const GRID_SLACK: f64 = 1e-9;

/// Uniform time grid `t_k = k·dt`, `k = 0..=steps`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be positive, got {dt}")));
        }
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(Error::InvalidGrid(format!("t_max must be non-negative, got {t_max}")));
        }
        let ratio = t_max / dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > GRID_SLACK * ratio.max(1.0) {
            return Err(Error::InvalidGrid(format!("t_max {t_max} is not a multiple of dt {dt}")));
        }
        Ok(Self { dt, steps: steps as usize })
    }

    pub fn with_steps(dt: f64, steps: usize) -> Result<Self> {
        Self::new(dt * steps as f64, dt)
    }

    /// Recovers the grid from sample times, which must start at zero and be
    /// evenly spaced.
    pub fn from_times(times: &[f64]) -> Result<Self> {
        match times {
            [] => Err(Error::InvalidGrid("no samples".into())),
            [t0] if *t0 == 0.0 => Ok(Self { dt: 1.0, steps: 0 }),
            [t0, t1, ..] => {
                if t0.abs() > GRID_SLACK {
                    return Err(Error::InvalidGrid(format!("grid starts at {t0}, not 0")));
                }
                let dt = t1 - t0;
                let grid = Self::with_steps(dt, times.len() - 1)?;
                grid.check_times(times)?;
                Ok(grid)
            }
            [t0] => Err(Error::InvalidGrid(format!("grid starts at {t0}, not 0"))),
        }
    }

    pub fn check_times(&self, times: &[f64]) -> Result<()> {
        if times.len() != self.len() {
            return Err(Error::InvalidGrid(format!("{} samples for {} grid points", times.len(), self.len())));
        }
        for (k, &t) in times.iter().enumerate() {
            if (t - self.time(k)).abs() > GRID_SLACK * self.t_max().max(1.0) {
                return Err(Error::InvalidGrid(format!("sample {k} at {t} breaks uniform spacing {}", self.dt)));
            }
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_max(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.dt * k as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}
