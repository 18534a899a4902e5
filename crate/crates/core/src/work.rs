//! Effort budgets measured either in deterministic work units or in
//! wall-clock time.

use std::time::{Duration, Instant};

/// A budget that is exhausted once the work counter passes `work_limit`
/// or, when no work limit is set, once `time_limit` has elapsed.
#[derive(Clone, Debug)]
pub struct Budget {
    work_limit: Option<u64>,
    time_limit: Option<Duration>,
    start: Instant,
    work: u64,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::new(None, None)
    }

    pub fn new(work_limit: Option<u64>, time_limit: Option<Duration>) -> Self {
        Self {
            work_limit,
            time_limit,
            start: Instant::now(),
            work: 0,
        }
    }

    pub fn charge(&mut self, units: u64) {
        self.work = self.work.saturating_add(units);
    }

    pub fn work(&self) -> u64 {
        self.work
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn is_deterministic(&self) -> bool {
        self.work_limit.is_some()
    }

    pub fn exhausted(&self) -> bool {
        match (self.work_limit, self.time_limit) {
            (Some(w), _) => self.work >= w,
            (None, Some(t)) => self.start.elapsed() >= t,
            (None, None) => false,
        }
    }

    /// Remaining work units (`u64::MAX` without a work limit).
    pub fn remaining(&self) -> u64 {
        self.work_limit.map_or(u64::MAX, |w| w.saturating_sub(self.work))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn work_limit_takes_precedence() {
        let mut b = Budget::new(Some(10), Some(Duration::ZERO));
        assert!(!b.exhausted());
        b.charge(7);
        assert_eq!(b.remaining(), 3);
        b.charge(3);
        assert!(b.exhausted());
        assert!(!Budget::unlimited().exhausted());
        assert!(Budget::new(None, Some(Duration::ZERO)).exhausted());
    }
}
