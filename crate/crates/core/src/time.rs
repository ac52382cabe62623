// SPDX-License-Identifier: Apache-2.0

//! Simulation clock.
//!
//! Time is kept as an integer count of microseconds so that every instant has
//! an exact six-decimal representation in seconds. Exported traces therefore
//! parse back to the very values the simulator produced.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

const MICROS_PER_SECOND: f64 = 1_000_000.0;

/// A point on (or a span of) the simulated clock, in whole microseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_micros(micros: u64) -> Self {
        SimTime(micros)
    }

    /// Rounds to the nearest microsecond. Negative and NaN inputs clamp to zero.
    pub fn from_secs_f64(seconds: f64) -> Self {
        if seconds.is_nan() || seconds <= 0.0 {
            return SimTime::ZERO;
        }
        SimTime((seconds * MICROS_PER_SECOND).round() as u64)
    }

    pub const fn as_micros(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / MICROS_PER_SECOND
    }

    pub fn saturating_sub(self, other: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(other.0))
    }

    pub fn checked_sub(self, other: SimTime) -> Option<SimTime> {
        self.0.checked_sub(other.0).map(SimTime)
    }
}

impl Add for SimTime {
    type Output = SimTime;

    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl Sub for SimTime {
    type Output = SimTime;

    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

/// Formats as seconds with exactly six decimals, e.g. `12.000500`.
impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}", self.0 / 1_000_000, self.0 % 1_000_000)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_six_decimals() {
        assert_eq!(SimTime::from_micros(0).to_string(), "0.000000");
        assert_eq!(SimTime::from_micros(12_000_500).to_string(), "12.000500");
        assert_eq!(SimTime::from_secs_f64(1.5).to_string(), "1.500000");
    }

    #[test]
    fn seconds_round_trip_through_text() {
        for micros in [0u64, 1, 999_999, 1_000_001, 123_456_789_012] {
            let t = SimTime::from_micros(micros);
            let parsed: f64 = t.to_string().parse().unwrap();
            assert_eq!(parsed, t.as_secs_f64());
            assert_eq!(SimTime::from_secs_f64(parsed), t);
        }
    }

    #[test]
    fn negative_clamps() {
        assert_eq!(SimTime::from_secs_f64(-3.0), SimTime::ZERO);
        assert_eq!(SimTime::from_secs_f64(f64::NAN), SimTime::ZERO);
    }
}
