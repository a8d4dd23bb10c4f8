use super::stepper::StepperState;
use crate::error::{Error, Result};

/// Integrate with step `tau` until `t_end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub t_end: f64,
    pub tau: f64,
}

/// Piecewise-constant step sizes with strictly increasing segment ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("schedule has no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.tau > 0.0) || !s.tau.is_finite() {
                return Err(Error::InvalidSchedule(format!("segment {i}: tau must be positive")));
            }
            if !s.t_end.is_finite() {
                return Err(Error::InvalidSchedule(format!("segment {i}: t_end is not finite")));
            }
            if i > 0 && s.t_end <= segments[i - 1].t_end {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i}: t_end {} does not exceed the previous end {}",
                    s.t_end,
                    segments[i - 1].t_end
                )));
            }
        }
        Ok(Self { segments })
    }

    pub fn uniform(t_end: f64, tau: f64) -> Result<Self> {
        Self::new(vec![Segment { t_end, tau }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn t_end(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.t_end)
    }

    /// The same schedule cut off at `t_max` (segments beyond it are dropped).
    pub fn truncated(&self, t_max: f64) -> Result<Self> {
        let mut out = Vec::new();
        for s in &self.segments {
            if s.t_end < t_max {
                out.push(*s);
            } else {
                out.push(Segment { t_end: t_max, tau: s.tau });
                break;
            }
        }
        Self::new(out)
    }

    /// Number of steps in each segment when starting from `t0`.
    pub fn step_counts(&self, t0: f64) -> Result<Vec<u64>> {
        let mut start = t0;
        let mut counts = Vec::with_capacity(self.segments.len());
        for (i, s) in self.segments.iter().enumerate() {
            if s.t_end <= start {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i} ends at {} which is not after {start}",
                    s.t_end
                )));
            }
            let n = (s.t_end - start) / s.tau;
            let rounded = n.round();
            if (n - rounded).abs() > 1e-6 * rounded.max(1.0) || rounded < 1.0 {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i}: length {} is not a whole number of steps of {}",
                    s.t_end - start,
                    s.tau
                )));
            }
            counts.push(rounded as u64);
            start = s.t_end;
        }
        Ok(counts)
    }
}

/// Runs `state` through `schedule`, calling `observer` on the initial state
/// and after every step. A change of step size restarts the history.
pub fn run_schedule<F>(state: &mut StepperState, schedule: &Schedule, mut observer: F) -> Result<()>
where
    F: FnMut(&StepperState) -> Result<()>,
{
    let counts = schedule.step_counts(state.t())?;
    observer(state)?;
    for (seg, n) in schedule.segments().iter().zip(counts) {
        state.set_tau(seg.tau)?;
        for _ in 0..n {
            state.step()?;
            observer(state)?;
        }
    }
    Ok(())
}
