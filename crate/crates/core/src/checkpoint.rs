//! Where scans emit records.

use std::iter::Peekable;

use crate::error::Result;
use crate::sieve::{primes_up_to, PrimeStream, SieveConfig};

/// Which `x` values a scan reports at.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckpointPolicy {
    /// Every power of 10 plus a geometric grid with the given ratio, and the
    /// limit itself.
    Grid { ratio: f64 },
    /// One record per prime.
    Dense,
    /// Exactly these points (sorted and deduplicated before use).
    Explicit(Vec<u64>),
}

impl Default for CheckpointPolicy {
    fn default() -> Self {
        CheckpointPolicy::Grid { ratio: 1.1 }
    }
}

impl CheckpointPolicy {
    /// The sorted checkpoint list within `[start, limit]`, or `None` for
    /// per-prime emission.
    pub fn points(&self, start: u64, limit: u64) -> Option<Vec<u64>> {
        let mut pts = match self {
            CheckpointPolicy::Dense => return None,
            CheckpointPolicy::Explicit(v) => v
                .iter()
                .copied()
                .filter(|&x| x >= start && x <= limit)
                .collect(),
            CheckpointPolicy::Grid { ratio } => geometric_grid(start, limit, *ratio),
        };
        pts.sort_unstable();
        pts.dedup();
        Some(pts)
    }
}

fn geometric_grid(start: u64, limit: u64, ratio: f64) -> Vec<u64> {
    let mut pts = Vec::new();
    if start > limit {
        return pts;
    }
    let ratio = if ratio > 1.0 { ratio } else { 1.1 };
    let mut x = start;
    while x <= limit {
        pts.push(x);
        let next = (x as f64 * ratio).ceil() as u64;
        x = next.max(x + 1);
    }
    let mut p = 1u64;
    while p <= limit {
        if p >= start {
            pts.push(p);
        }
        match p.checked_mul(10) {
            Some(q) => p = q,
            None => break,
        }
    }
    pts.push(limit);
    pts
}

/// Walks the prime stream from checkpoint to checkpoint.
#[derive(Debug)]
pub(crate) struct CheckpointWalker {
    primes: Peekable<PrimeStream>,
    points: Option<Vec<u64>>,
    idx: usize,
}

impl CheckpointWalker {
    pub(crate) fn new(sieve: &SieveConfig, policy: &CheckpointPolicy, start: u64) -> Result<Self> {
        Ok(CheckpointWalker {
            primes: primes_up_to(sieve)?.peekable(),
            points: policy.points(start, sieve.limit),
            idx: 0,
        })
    }

    /// Feeds every prime up to the next checkpoint to `feed` and returns that
    /// checkpoint. In dense mode each prime is its own checkpoint.
    pub(crate) fn advance(&mut self, mut feed: impl FnMut(u64)) -> Option<u64> {
        match &self.points {
            None => {
                let p = self.primes.next()?;
                feed(p);
                Some(p)
            }
            Some(points) => {
                let x = *points.get(self.idx)?;
                self.idx += 1;
                while let Some(&p) = self.primes.peek() {
                    if p > x {
                        break;
                    }
                    feed(p);
                    self.primes.next();
                }
                Some(x)
            }
        }
    }
}

/// Whether `x` is an exact power of ten.
pub fn is_power_of_ten(mut x: u64) -> bool {
    if x == 0 {
        return false;
    }
    while x % 10 == 0 {
        x /= 10;
    }
    x == 1
}
