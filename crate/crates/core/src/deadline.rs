use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("wall-clock budget exhausted")]
pub struct Timeout;

/// Optional wall-clock budget shared by the long-running phases.
#[derive(Clone, Copy, Debug, Default)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub const NONE: Deadline = Deadline(None);

    pub fn after(budget: Duration) -> Self {
        Deadline(Some(Instant::now() + budget))
    }

    pub fn from_millis(ms: Option<u64>) -> Self {
        ms.map_or(Self::NONE, |ms| Self::after(Duration::from_millis(ms)))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }

    pub fn check(&self) -> Result<(), Timeout> {
        if self.expired() {
            Err(Timeout)
        } else {
            Ok(())
        }
    }
}
