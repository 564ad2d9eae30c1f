//! Prime streams and totient tables.
//!
//! [`primes_up_to`] is a segmented sieve of Eratosthenes over odd numbers;
//! segments are independent, so a batch of them is sieved on the current
//! rayon pool and delivered in index order. [`totient_table`] is a linear
//! (smallest-prime-factor) sieve producing exact φ(n) and ω(n).

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 22;
pub const MIN_SEGMENT_SIZE: usize = 1024;
pub const MAX_SEGMENT_SIZE: usize = 1 << 30;
/// Largest stream limit; base primes stay below 10^6.
pub const MAX_STREAM_LIMIT: u64 = 1_000_000_000_000;
/// Largest totient table (φ as u32, ω as u8: about 5 bytes per entry).
pub const MAX_TABLE_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    pub limit: u64,
    pub segment_size: usize,
}

impl SieveConfig {
    pub fn new(limit: u64) -> Self {
        SieveConfig {
            limit,
            segment_size: DEFAULT_SEGMENT_SIZE,
        }
    }

    pub fn with_segment_size(mut self, segment_size: usize) -> Self {
        self.segment_size = segment_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.segment_size < MIN_SEGMENT_SIZE || self.segment_size > MAX_SEGMENT_SIZE {
            return Err(Error::Config(format!(
                "segment size {} outside [{MIN_SEGMENT_SIZE}, {MAX_SEGMENT_SIZE}]",
                self.segment_size
            )));
        }
        if self.limit > MAX_STREAM_LIMIT {
            return Err(Error::Config(format!(
                "prime limit {} exceeds the stream ceiling {MAX_STREAM_LIMIT}",
                self.limit
            )));
        }
        Ok(())
    }
}

/// Plain odd-only sieve, used for the base primes.
fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    // index i stands for 2i + 1
    let half = (limit + 1) / 2;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend(
        composite
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    out
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Odd primes in `[lo, hi)`, with `lo` odd and base primes covering √hi.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    debug_assert!(lo % 2 == 1);
    let len = ((hi - lo + 1) / 2) as usize;
    let mut composite = vec![false; len];
    for &p in base.iter().skip(1) {
        let pp = p * p;
        if pp >= hi {
            break;
        }
        let mut start = if pp >= lo { pp } else { lo.div_ceil(p) * p };
        if start % 2 == 0 {
            start += p;
        }
        let mut j = ((start - lo) / 2) as usize;
        let step = p as usize;
        while j < len {
            composite[j] = true;
            j += step;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| lo + 2 * i as u64)
        .collect()
}

/// Ordered stream of the primes up to a limit.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    limit: u64,
    span: u64,
    base: Vec<u64>,
    /// next odd number not yet sieved
    next_lo: u64,
    emitted_two: bool,
    buffer: Vec<u64>,
    pos: usize,
}

impl PrimeStream {
    fn refill(&mut self) -> bool {
        if self.next_lo > self.limit {
            return false;
        }
        let batch = rayon::current_num_threads().max(1) as u64;
        let end = self.limit + 1;
        let starts: Vec<u64> = (0..batch)
            .map(|i| self.next_lo + i * self.span)
            .take_while(|&lo| lo < end)
            .collect();
        self.next_lo = starts.last().map_or(end, |&lo| lo + self.span);
        let span = self.span;
        let base = &self.base;
        let segment = |&lo: &u64| sieve_segment(lo, (lo + span).min(end), base);
        let parts: Vec<Vec<u64>> = if starts.len() > 1 {
            starts.par_iter().map(segment).collect()
        } else {
            starts.iter().map(segment).collect()
        };
        self.buffer.clear();
        for part in parts {
            self.buffer.extend(part);
        }
        self.pos = 0;
        true
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if !self.emitted_two {
            self.emitted_two = true;
            return Some(2);
        }
        loop {
            if let Some(&p) = self.buffer.get(self.pos) {
                self.pos += 1;
                return Some(p);
            }
            if !self.refill() {
                return None;
            }
        }
    }
}

/// The primes `<= config.limit` in increasing order. Calling it again gives
/// a fresh stream from the start.
pub fn primes_up_to(config: &SieveConfig) -> Result<PrimeStream> {
    config.validate()?;
    let limit = config.limit;
    let span = (config.segment_size as u64) & !1;
    let base = small_primes(isqrt(limit));
    Ok(PrimeStream {
        limit,
        span,
        base,
        next_lo: 3,
        emitted_two: limit < 2,
        buffer: Vec::new(),
        pos: 0,
    })
}

/// Exact φ(n) and ω(n) for `1 <= n <= limit`.
#[derive(Debug, Clone)]
pub struct TotientTable {
    limit: u64,
    phi: Vec<u32>,
    omega: Vec<u8>,
}

impl TotientTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// φ(n); panics outside `1..=limit`.
    #[inline]
    pub fn phi(&self, n: u64) -> u64 {
        assert!(n >= 1 && n <= self.limit, "n = {n} outside table");
        self.phi[n as usize] as u64
    }

    #[inline]
    pub fn omega(&self, n: u64) -> u32 {
        assert!(n >= 1 && n <= self.limit, "n = {n} outside table");
        self.omega[n as usize] as u32
    }

    /// φ values for `1..=limit`, index 0 holding φ(1).
    pub fn phi_slice(&self) -> &[u32] {
        &self.phi[1..]
    }

    pub fn omega_slice(&self) -> &[u8] {
        &self.omega[1..]
    }
}

/// Linear sieve for φ and ω up to `limit`.
pub fn totient_table(limit: u64) -> Result<TotientTable> {
    if limit < 1 {
        return Err(Error::Config("totient table limit must be at least 1".into()));
    }
    if limit > MAX_TABLE_LIMIT {
        return Err(Error::Config(format!(
            "totient table limit {limit} exceeds the memory ceiling {MAX_TABLE_LIMIT}"
        )));
    }
    let n = limit as usize;
    let mut phi = vec![0u32; n + 1];
    let mut omega = vec![0u8; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    phi[1] = 1;
    for i in 2..=n {
        if phi[i] == 0 {
            phi[i] = (i - 1) as u32;
            omega[i] = 1;
            primes.push(i as u32);
        }
        for &p in &primes {
            let p = p as usize;
            let ip = i * p;
            if ip > n {
                break;
            }
            if i % p == 0 {
                phi[ip] = phi[i] * p as u32;
                omega[ip] = omega[i];
                break;
            }
            phi[ip] = phi[i] * (p as u32 - 1);
            omega[ip] = omega[i] + 1;
        }
    }
    Ok(TotientTable { limit, phi, omega })
}

/// φ(n) by trial division, for small moduli.
pub fn totient_of(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
