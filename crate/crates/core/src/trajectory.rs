//! Tip trajectories sampled on a fixed time cadence.

use serde::{Deserialize, Serialize};

/// Whether tip positions are lattice sites or real numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionKind {
    Lattice,
    Continuum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Horizon,
    EventBudget,
    ResourceLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TipSample {
    pub t: f64,
    pub left_tip: f64,
    pub right_tip: f64,
    pub n_particles: u64,
    pub q_estimate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TipTrajectory {
    pub kind: PositionKind,
    pub samples: Vec<TipSample>,
    pub stop: StopReason,
    /// Accepted births over the run.
    pub births: u64,
    /// Proposals drawn, including rejected ones.
    pub proposals: u64,
}

impl TipTrajectory {
    pub fn new(kind: PositionKind) -> Self {
        TipTrajectory {
            kind,
            samples: Vec::new(),
            stop: StopReason::Horizon,
            births: 0,
            proposals: 0,
        }
    }

    pub fn last(&self) -> Option<&TipSample> {
        self.samples.last()
    }

    /// The latest sample at or before `t`.
    pub fn at(&self, t: f64) -> Option<&TipSample> {
        let i = self.samples.partition_point(|s| s.t <= t);
        if i == 0 {
            None
        } else {
            Some(&self.samples[i - 1])
        }
    }

    /// Distance travelled by the left tip, `X_t = -left_tip`.
    pub fn displacement(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t, -s.left_tip)).collect()
    }

    pub fn times_strictly_increasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[0].t < w[1].t)
    }
}

/// Emits sample times `0, Δ, 2Δ, ...` below the horizon, then the horizon.
#[derive(Clone, Debug)]
pub(crate) struct Cadence {
    interval: f64,
    horizon: f64,
    k: u64,
    done: bool,
}

impl Cadence {
    pub fn new(interval: f64, horizon: f64) -> Self {
        Cadence {
            interval,
            horizon,
            k: 0,
            done: false,
        }
    }

    /// Next pending sample time, if any.
    pub fn peek(&self) -> Option<f64> {
        if self.done {
            return None;
        }
        let t = self.k as f64 * self.interval;
        Some(if t < self.horizon { t } else { self.horizon })
    }

    pub fn advance(&mut self) {
        let t = self.k as f64 * self.interval;
        if t >= self.horizon {
            self.done = true;
        }
        self.k += 1;
    }

    /// Pops every sample time strictly before `t_next` (and not past the
    /// horizon), calling `record` for each.
    pub fn drain_before(&mut self, t_next: f64, mut record: impl FnMut(f64)) {
        while let Some(s) = self.peek() {
            if s < t_next {
                record(s);
                self.advance();
            } else {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cadence_ends_at_horizon() {
        let mut c = Cadence::new(0.5, 1.2);
        let mut ts = vec![];
        c.drain_before(f64::INFINITY, |t| ts.push(t));
        assert_eq!(ts, vec![0.0, 0.5, 1.0, 1.2]);
        let mut c = Cadence::new(0.5, 1.0);
        let mut ts = vec![];
        c.drain_before(f64::INFINITY, |t| ts.push(t));
        assert_eq!(ts, vec![0.0, 0.5, 1.0]);
        let mut c = Cadence::new(0.5, 0.0);
        let mut ts = vec![];
        c.drain_before(f64::INFINITY, |t| ts.push(t));
        assert_eq!(ts, vec![0.0]);
    }
}
