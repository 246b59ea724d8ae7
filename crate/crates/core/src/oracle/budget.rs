//! Sliding-window call budgets shared by a pool of API keys.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::clock::SimulatedClock;

/// At most `calls_per_window` calls per key in any `(t - window_seconds, t]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateLimit {
    pub calls_per_window: u32,
    pub window_seconds: f64,
}

impl RateLimit {
    /// Friends lookups: 15 calls per 15 minutes.
    pub const FRIENDS: RateLimit = RateLimit { calls_per_window: 15, window_seconds: 900.0 };
    /// Profile lookups: 900 calls per 15 minutes.
    pub const PROFILES: RateLimit = RateLimit { calls_per_window: 900, window_seconds: 900.0 };
}

/// Per-key log of the calls still inside the window.
#[derive(Clone, Debug)]
pub struct RateBudget {
    limit: RateLimit,
    keys: Vec<VecDeque<f64>>,
}

impl RateBudget {
    pub fn new(limit: RateLimit, key_count: usize) -> Self {
        assert!(key_count > 0, "at least one key");
        assert!(limit.calls_per_window > 0, "at least one call per window");
        Self { limit, keys: vec![VecDeque::new(); key_count] }
    }

    pub fn limit(&self) -> RateLimit {
        self.limit
    }

    pub fn key_count(&self) -> usize {
        self.keys.len()
    }

    fn expire(&mut self, now: f64) {
        let horizon = now - self.limit.window_seconds;
        for calls in &mut self.keys {
            while calls.front().is_some_and(|&t| t <= horizon) {
                calls.pop_front();
            }
        }
    }

    /// Calls charged to `key` within the window ending at `now`.
    pub fn load(&mut self, key: usize, now: f64) -> usize {
        self.expire(now);
        self.keys[key].len()
    }

    /// Least-loaded key that still has budget at `now`; lowest index wins ties.
    fn pick(&self) -> Option<usize> {
        let cap = self.limit.calls_per_window as usize;
        self.keys
            .iter()
            .enumerate()
            .filter(|(_, calls)| calls.len() < cap)
            .min_by_key(|&(i, calls)| (calls.len(), i))
            .map(|(i, _)| i)
    }

    /// Charges one call, first waiting on `clock` for the earliest window
    /// expiry if every key is exhausted. Returns the key used and the calls
    /// it has left in the current window.
    pub fn acquire(&mut self, clock: &mut SimulatedClock) -> (usize, u32) {
        self.expire(clock.now());
        let key = match self.pick() {
            Some(k) => k,
            None => {
                let release = self.keys.iter().filter_map(|c| c.front()).fold(f64::INFINITY, |a, &b| a.min(b))
                    + self.limit.window_seconds;
                clock.advance_to(release);
                self.expire(clock.now());
                self.pick().expect("a key frees up at the earliest expiry")
            }
        };
        self.keys[key].push_back(clock.now());
        let remaining = self.limit.calls_per_window - self.keys[key].len() as u32;
        (key, remaining)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteenth_call_waits_for_window() {
        let mut clock = SimulatedClock::default();
        let mut b = RateBudget::new(RateLimit::FRIENDS, 1);
        for i in 0..15 {
            let (key, left) = b.acquire(&mut clock);
            assert_eq!((key, left), (0, 14 - i));
            assert_eq!(clock.now(), 0.0);
        }
        let (_, left) = b.acquire(&mut clock);
        assert_eq!(clock.now(), 900.0);
        assert_eq!(left, 14);
    }

    #[test]
    fn spreads_over_least_loaded_keys() {
        let mut clock = SimulatedClock::default();
        let mut b = RateBudget::new(RateLimit { calls_per_window: 2, window_seconds: 10.0 }, 3);
        let keys: Vec<usize> = (0..6).map(|_| b.acquire(&mut clock).0).collect();
        assert_eq!(keys, vec![0, 1, 2, 0, 1, 2]);
        assert_eq!(clock.now(), 0.0);
        b.acquire(&mut clock);
        assert_eq!(clock.now(), 10.0);
    }

    #[test]
    fn staggered_calls_release_one_at_a_time() {
        let mut clock = SimulatedClock::default();
        let mut b = RateBudget::new(RateLimit { calls_per_window: 2, window_seconds: 10.0 }, 1);
        b.acquire(&mut clock);
        clock.advance(4.0);
        b.acquire(&mut clock);
        b.acquire(&mut clock);
        assert_eq!(clock.now(), 10.0);
        b.acquire(&mut clock);
        assert_eq!(clock.now(), 14.0);
    }
}
