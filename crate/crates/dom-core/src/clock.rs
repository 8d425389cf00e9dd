//! Time source abstraction. Live runs use a wall clock; scripted runs use a
//! logical clock so traces and reports replay byte-identically.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

pub trait Clock: Send + Sync {
    /// Milliseconds since the start of the run (wall) or a monotone tick
    /// counter (logical).
    fn now_ms(&self) -> u64;
}

pub struct WallClock {
    start: Instant,
}

impl WallClock {
    pub fn new() -> Self {
        WallClock {
            start: Instant::now(),
        }
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }
}

/// Advances by one tick per observation.
#[derive(Default)]
pub struct LogicalClock {
    ticks: AtomicU64,
}

impl LogicalClock {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Clock for LogicalClock {
    fn now_ms(&self) -> u64 {
        self.ticks.fetch_add(1, Ordering::Relaxed)
    }
}
