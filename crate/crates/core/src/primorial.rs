//! Running statistics of the primorials N_k = 2·3···p_k, with certified
//! verdicts on
//!
//! * the Nicolas inequality `N_k/φ(N_k) > e^γ ln ln N_k`,
//! * the Rosser–Schoenfeld bound `N/φ(N) < e^γ ln ln N + 2.5/ln ln N`,
//! * the double-log gap `|ln ln p_k − ln ln ln N_k|` and its scaled ratio,
//! * the prime-power tail `T(p_k) = Σ_{p>p_k} Σ_{n≥2} 1/(n p^n)`.
//!
//! All comparisons are made in log scale where the logs are defined:
//! `ln(N_k/φ(N_k)) = Σ_{p≤p_k} −ln(1 − 1/p)` against `γ + ln ln ln N_k`.

use std::iter::Peekable;

use crate::checkpoint::CheckpointPolicy;
use crate::constants::{n_tail_bound, prime_tail_bound, PrimeZetaTable, ScanConstants};
use crate::error::{Error, Result};
use crate::mertens::reciprocal;
use crate::rigor::{certified_compare, CompensatedSum, ErrorTracked, Verdict, UNIT_ROUNDOFF};
use crate::sieve::{primes_up_to, PrimeStream, SieveConfig};

const U: f64 = UNIT_ROUNDOFF;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanBound {
    /// All k with p_k ≤ this prime bound.
    PMax(u64),
    /// The first k primorials.
    KMax(u64),
}

#[derive(Debug, Clone)]
pub struct PrimorialConfig {
    pub bound: ScanBound,
    /// Grid over p used to flag checkpoint records (the largest p_k at or
    /// below each grid point).
    pub checkpoints: CheckpointPolicy,
    /// Exponent B in the ratio `diff · (ln ln N_k)^{B+1}`.
    pub prop6_b: f64,
    pub constants: ScanConstants,
    pub segment_size: usize,
}

impl PrimorialConfig {
    pub fn new(bound: ScanBound, constants: ScanConstants) -> Self {
        PrimorialConfig {
            bound,
            checkpoints: CheckpointPolicy::default(),
            prop6_b: 1.0,
            constants,
            segment_size: crate::sieve::DEFAULT_SEGMENT_SIZE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop6 {
    /// |ln ln p_k − ln ln ln N_k|.
    pub diff: ErrorTracked,
    /// diff · (ln ln N_k)^{B+1}.
    pub ratio: ErrorTracked,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimorialRecord {
    pub k: u64,
    pub p_k: u64,
    /// ln N_k = ϑ(p_k).
    pub log_n: ErrorTracked,
    pub loglog_n: ErrorTracked,
    /// ln(N_k/φ(N_k)) = Σ_{p≤p_k} −ln(1 − 1/p).
    pub lhs_log: ErrorTracked,
    /// Σ_{p≤p_k} 1/p.
    pub mertens_partial: ErrorTracked,
    pub nicolas: Verdict,
    /// `None` for k = 1, where ln ln N_k < 0.
    pub rosser_schoenfeld: Option<Verdict>,
    /// `None` for k < 3.
    pub prop6: Option<Prop6>,
    /// T(p_k), with the n > n_max part folded into the bound.
    pub tail: ErrorTracked,
    pub tail_times_log_n: ErrorTracked,
    /// 1/ln ln N_k and 1/ln N_k, the shapes compared in the tail argument.
    pub inv_loglog_n: f64,
    pub inv_log_n: f64,
    /// p_k is the largest prime at or below some checkpoint.
    pub checkpoint: bool,
}

/// Nicolas inequality at k; `Holds` means `N_k/φ(N_k) > e^γ ln ln N_k`.
///
/// Compared in log scale when ln N_k > 1; otherwise (k = 1) in ratio
/// scale, where the right side is negative.
pub fn nicolas_verdict(r: &PrimorialRecord, c: &ScanConstants) -> Result<Verdict> {
    if r.log_n.lo() > 1.0 {
        let rhs = c.gamma.add(r.loglog_n.ln()?)?;
        Ok(certified_compare(r.lhs_log, rhs))
    } else {
        let lhs = r.lhs_log.exp()?;
        let rhs = c.exp_gamma.mul(r.loglog_n)?;
        Ok(certified_compare(lhs, rhs))
    }
}

/// Upper bound `N/φ(N) < e^γ ln ln N + 2.5/ln ln N`; `Holds` means the bound
/// holds, `Fails` flags an exception.
pub fn rosser_schoenfeld_check(r: &PrimorialRecord, c: &ScanConstants) -> Result<Verdict> {
    let l = r.loglog_n;
    if !(l.lo() > 0.0) {
        return Err(Error::Domain("ln ln N must be positive"));
    }
    let rhs = c.exp_gamma.mul(l)?.add(ErrorTracked::exact(2.5).div(l)?)?;
    Ok(certified_compare(rhs, r.lhs_log.exp()?))
}

/// The double-log gap and its scaled ratio; needs both double logs positive
/// (k ≥ 3).
pub fn prop6_diagnostic(r: &PrimorialRecord, b: f64) -> Result<Prop6> {
    let llp = ErrorTracked::from_u64(r.p_k).ln()?.ln()?;
    if !(llp.lo() > 0.0 && r.loglog_n.lo() > 0.0) {
        return Err(Error::Domain("double logarithms not positive"));
    }
    let lll = r.loglog_n.ln()?;
    if !(lll.lo() > 0.0) {
        return Err(Error::Domain("triple logarithm not positive"));
    }
    let diff = llp.sub(lll)?.abs();
    let ratio = diff.mul(r.loglog_n.powf(b + 1.0)?)?;
    Ok(Prop6 { diff, ratio })
}

/// Σ_{n=2}^{n_max} p^{-n}/n in binary64, with its bound.
pub fn prime_power_series(p: u64, n_max: u32) -> ErrorTracked {
    let x = 1.0 / p as f64;
    let mut terms = [0.0f64; 128];
    let first = x * x;
    let mut pw = first;
    let mut n_stop = 1;
    for n in 2..=n_max.min(127) {
        terms[n as usize] = pw / n as f64;
        n_stop = n;
        if pw < first * 1e-34 {
            break;
        }
        pw *= x;
    }
    let mut s = 0.0;
    for n in (2..=n_stop).rev() {
        s += terms[n as usize];
    }
    // x^{n+1}/((n+1)(1−x)) bounds the dropped terms n_stop < n <= n_max
    let dropped = if n_stop < n_max {
        let k = n_stop as f64 + 1.0;
        (pw * x / (k * (1.0 - x))).next_up() * 2.0
    } else {
        0.0
    };
    let err = ((3.0 * n_stop as f64 + 4.0) * U * s).next_up() + dropped;
    ErrorTracked::new(s, err.next_up()).expect("finite series")
}

/// `−ln(1 − 1/p) = ln(1 + 1/(p − 1))`.
fn log_factor(p: u64) -> ErrorTracked {
    let v = (1.0 / (p - 1) as f64).ln_1p();
    ErrorTracked::new(v, (3.0 * U * v).next_up()).expect("finite")
}

/// Bound on `Σ_{p>y} Σ_{n>n_max} 1/(n p^n)`.
fn n_tail(y: u64, theta_y_lower: f64, n_max: u32) -> f64 {
    let s = n_max + 1;
    let denom = s as f64 * (1.0 - 1.0 / (y as f64 + 1.0));
    (prime_tail_bound(y, s, theta_y_lower) / denom * (1.0 + 1e-12)).next_up()
}

/// T(p_k) = Σ_{n=2}^{n_max} (P(n) − Σ_{p≤p_k} p^{-n})/n plus the n-tail bound.
pub fn prime_power_tail(p_k: u64, n_max: u32, zeta: &PrimeZetaTable) -> Result<ErrorTracked> {
    if p_k < 2 || n_max < 2 {
        return Err(Error::Config("prime_power_tail needs p_k >= 2 and n_max >= 2".into()));
    }
    let total = zeta.weighted_sum(n_max)?.to_tracked();
    let mut partial = CompensatedSum::new();
    let mut theta = CompensatedSum::new();
    for p in primes_up_to(&SieveConfig::new(p_k))? {
        partial.push_tracked(prime_power_series(p, n_max));
        theta.push_tracked(ErrorTracked::from_u64(p).ln()?);
    }
    let t = total.sub(partial.total())?;
    ErrorTracked::new(t.value(), (t.err() + n_tail(p_k, theta.total().lo(), n_max)).next_up())
}

/// Per-n power sums S(n) = Σ_{p≤x} p^{-n}, n = 2..=n_max, accumulated
/// separately. Summing n-major instead of prime-major gives an independent
/// route to Σ_p Σ_n p^{-n}/n.
#[derive(Debug, Clone)]
pub struct PowerSums {
    n_max: u32,
    sums: Vec<CompensatedSum>,
    dropped: f64,
}

impl PowerSums {
    pub fn new(n_max: u32) -> Self {
        assert!(n_max >= 2);
        PowerSums {
            n_max,
            sums: (2..=n_max).map(|_| CompensatedSum::new()).collect(),
            dropped: 0.0,
        }
    }

    pub fn push(&mut self, p: u64) {
        let x = 1.0 / p as f64;
        let mut pw = x * x;
        for (i, sum) in self.sums.iter_mut().enumerate() {
            let n = i as f64 + 2.0;
            if pw < 1e-40 {
                // remaining p^{-m}, m >= n, sum to at most 2·pw
                self.dropped = (self.dropped + 2.0 * pw).next_up();
                break;
            }
            sum.push_tracked(ErrorTracked::new(pw, (2.0 * n * U * pw).next_up()).unwrap());
            pw *= x;
        }
    }

    pub fn sum(&self, n: u32) -> ErrorTracked {
        self.sums[(n - 2) as usize].total()
    }

    /// Σ_{n=2}^{n_max} S(n)/n.
    pub fn weighted(&self) -> Result<ErrorTracked> {
        let mut acc = ErrorTracked::ZERO;
        for n in (2..=self.n_max).rev() {
            acc = acc.add(self.sum(n).div(ErrorTracked::exact(n as f64))?)?;
        }
        ErrorTracked::new(acc.value(), (acc.err() + self.dropped).next_up())
    }
}

/// The power-series identity at one record:
/// `ln(N_k/φ(N_k)) = Σ 1/p + Σ_{n=2}^{n_max} S(n)/n + (n > n_max remainder)`.
/// The returned comparison is `Indeterminate` exactly when the two sides
/// agree within their combined bounds.
pub fn power_series_identity(r: &PrimorialRecord, sums: &PowerSums) -> Result<Verdict> {
    let rhs = r.mertens_partial.add(sums.weighted()?)?;
    let rhs = ErrorTracked::new(rhs.value(), rhs.err() + n_tail_bound(sums.n_max))?;
    Ok(certified_compare(r.lhs_log, rhs))
}

/// Upper limit for p_k given k (Rosser's bound for k ≥ 6).
fn p_upper_for_k(k: u64) -> u64 {
    if k < 6 {
        return 13;
    }
    let kf = k as f64;
    (kf * (kf.ln() + kf.ln().ln())).ceil() as u64 + 1
}

/// One record per k; see [`primorial_scan`].
#[derive(Debug)]
pub struct PrimorialScan {
    primes: Peekable<PrimeStream>,
    k_max: Option<u64>,
    k: u64,
    log_n: CompensatedSum,
    lhs: CompensatedSum,
    recip: CompensatedSum,
    power: CompensatedSum,
    n_tail: f64,
    points: Vec<u64>,
    point_idx: usize,
    config: PrimorialConfig,
}

impl PrimorialScan {
    fn step(&mut self, p: u64) -> Result<PrimorialRecord> {
        self.k += 1;
        self.log_n.push_tracked(ErrorTracked::from_u64(p).ln()?);
        self.lhs.push_tracked(log_factor(p));
        self.recip.push_tracked(reciprocal(p));
        self.power
            .push_tracked(prime_power_series(p, self.config.constants.n_max));

        let next = self.primes.peek().copied().unwrap_or(u64::MAX);
        while self.point_idx < self.points.len() && self.points[self.point_idx] < p {
            self.point_idx += 1;
        }
        let checkpoint =
            self.point_idx < self.points.len() && self.points[self.point_idx] < next;

        let c = &self.config.constants;
        let log_n = self.log_n.total();
        let loglog_n = log_n.ln()?;
        let t = c.power_series_total.sub(self.power.total())?;
        let tail = ErrorTracked::new(t.value(), (t.err() + self.n_tail).next_up())?;
        let mut r = PrimorialRecord {
            k: self.k,
            p_k: p,
            log_n,
            loglog_n,
            lhs_log: self.lhs.total(),
            mertens_partial: self.recip.total(),
            nicolas: certified_compare(ErrorTracked::ZERO, ErrorTracked::ZERO),
            rosser_schoenfeld: None,
            prop6: None,
            tail,
            tail_times_log_n: tail.mul(log_n)?,
            inv_loglog_n: 1.0 / loglog_n.value(),
            inv_log_n: 1.0 / log_n.value(),
            checkpoint,
        };
        r.nicolas = nicolas_verdict(&r, c)?;
        if r.loglog_n.lo() > 0.0 {
            r.rosser_schoenfeld = Some(rosser_schoenfeld_check(&r, c)?);
        }
        if self.k >= 3 {
            r.prop6 = Some(prop6_diagnostic(&r, self.config.prop6_b)?);
        }
        Ok(r)
    }
}

impl Iterator for PrimorialScan {
    type Item = Result<PrimorialRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.k_max.is_some_and(|m| self.k >= m) {
            return None;
        }
        let p = self.primes.next()?;
        Some(self.step(p))
    }
}

/// Streams one [`PrimorialRecord`] per k in increasing order.
pub fn primorial_scan(config: &PrimorialConfig) -> Result<PrimorialScan> {
    let (p_max, k_max) = match config.bound {
        ScanBound::PMax(p) => {
            if p < 2 {
                return Err(Error::Config("primorial scan needs p_max >= 2".into()));
            }
            (p, None)
        }
        ScanBound::KMax(k) => {
            if k < 1 {
                return Err(Error::Config("primorial scan needs k_max >= 1".into()));
            }
            (p_upper_for_k(k), Some(k))
        }
    };
    let sieve = SieveConfig::new(p_max).with_segment_size(config.segment_size);
    let points = config
        .checkpoints
        .points(2, p_max)
        .unwrap_or_default();
    // The n-tail bound at y = 2 dominates every later one.
    let n_tail = n_tail(2, 2f64.ln() * (1.0 - 1e-15), config.constants.n_max);
    Ok(PrimorialScan {
        primes: primes_up_to(&sieve)?.peekable(),
        k_max,
        k: 0,
        log_n: CompensatedSum::new(),
        lhs: CompensatedSum::new(),
        recip: CompensatedSum::new(),
        power: CompensatedSum::new(),
        n_tail,
        points,
        point_idx: 0,
        config: config.clone(),
    })
}
