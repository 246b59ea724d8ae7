/// Simulated wall clock in seconds. Only moves forward, and only when told to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulatedClock {
    now: f64,
}

impl SimulatedClock {
    pub fn starting_at(now: f64) -> Self {
        Self { now }
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn advance(&mut self, seconds: f64) {
        if seconds > 0.0 {
            self.now += seconds;
        }
    }

    /// Moves to `t` unless the clock is already past it.
    pub fn advance_to(&mut self, t: f64) {
        if t > self.now {
            self.now = t;
        }
    }
}

impl Default for SimulatedClock {
    fn default() -> Self {
        Self::starting_at(0.0)
    }
}
