//! Distribution of n/φ(n) over a totient table: the density of
//! `{n ≤ N : n/φ(n) ≥ t}`, its leading-order prediction, the exception count
//! for `φ(n)/n ≤ c0 / ln ln ln n`, and the normal order of ω(n).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rigor::{certified_compare, ErrorTracked, Outcome};
use crate::sieve::TotientTable;

const CHUNK: usize = 1 << 16;

/// A density threshold t ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// num/den, compared exactly.
    Rational { num: u64, den: u64 },
    /// An irrational or computed threshold; comparisons may be indeterminate.
    Tracked(ErrorTracked),
}

impl Threshold {
    pub fn rational(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Config("threshold denominator is zero".into()));
        }
        let g = crate::sieve::gcd(num, den);
        Ok(Threshold::Rational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn value(&self) -> f64 {
        match *self {
            Threshold::Rational { num, den } => num as f64 / den as f64,
            Threshold::Tracked(t) => t.value(),
        }
    }

    fn lo(&self) -> f64 {
        match *self {
            Threshold::Rational { .. } => self.value(),
            Threshold::Tracked(t) => t.lo(),
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Threshold::Rational { num, den: 1 } => write!(f, "{num}"),
            Threshold::Rational { num, den } => write!(f, "{num}/{den}"),
            Threshold::Tracked(t) => write!(f, "{}", t.value()),
        }
    }
}

/// Accepts `3`, `3/2` and terminating decimals like `1.25`, all exactly.
impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse threshold {s:?}"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            return Threshold::rational(n, d);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() || frac.len() > 18 {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Threshold::rational(num, den)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRecord {
    pub t: Threshold,
    pub n_limit: u64,
    /// #{n ≤ n_limit : n/φ(n) ≥ t}, certified.
    pub count: u64,
    /// Comparisons that could not be decided (tracked thresholds only).
    pub indeterminate: u64,
    pub density: f64,
    pub prediction_as_written: f64,
    pub prediction_consistent: f64,
}

/// Which closed form of the large-t density to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// `exp(−e^{−γ t})`, which tends to 1 as t grows.
    AsWritten,
    /// `exp(−e^{t e^{−γ}})`, the form that yields 1/ln N at
    /// t = e^γ ln ln ln N.
    Consistent,
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Leading term of the density prediction.
pub fn weingartner_prediction(t: f64, formula: Formula) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain("prediction needs t > 0"));
    }
    Ok(match formula {
        Formula::AsWritten => (-(-EULER_GAMMA * t).exp()).exp(),
        Formula::Consistent => (-(t * (-EULER_GAMMA).exp()).exp()).exp(),
    })
}

fn check_table(table: &TotientTable, n_limit: u64) -> Result<()> {
    if n_limit > table.limit() {
        return Err(Error::TableTooSmall {
            requested: n_limit,
            available: table.limit(),
        });
    }
    Ok(())
}

/// Outcome of `n/φ(n) ≥ t` for one n.
fn at_least(n: u64, phi: u64, t: &Threshold) -> Outcome {
    match *t {
        Threshold::Rational { num, den } => {
            if n as u128 * den as u128 >= num as u128 * phi as u128 {
                Outcome::Holds
            } else {
                Outcome::Fails
            }
        }
        Threshold::Tracked(t) => {
            let ratio = ErrorTracked::rounded(n as f64 / phi as f64);
            certified_compare(ratio, t).outcome
        }
    }
}

/// Counts `n ≤ n_limit` with `n/φ(n) ≥ t`.
pub fn density_estimate(table: &TotientTable, t: Threshold, n_limit: u64) -> Result<DensityRecord> {
    if n_limit < 1 {
        return Err(Error::Config("density needs n_limit >= 1".into()));
    }
    if !(t.lo() >= 1.0) {
        return Err(Error::Domain("density threshold must be at least 1"));
    }
    check_table(table, n_limit)?;
    let phi = &table.phi_slice()[..n_limit as usize];
    let (count, indeterminate) = phi
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let base = (c * CHUNK) as u64 + 1;
            let mut hit = 0u64;
            let mut unsure = 0u64;
            for (i, &f) in chunk.iter().enumerate() {
                match at_least(base + i as u64, f as u64, &t) {
                    Outcome::Holds => hit += 1,
                    Outcome::Indeterminate => unsure += 1,
                    Outcome::Fails => {}
                }
            }
            (hit, unsure)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(DensityRecord {
        t,
        n_limit,
        count,
        indeterminate,
        density: count as f64 / n_limit as f64,
        prediction_as_written: weingartner_prediction(t.value(), Formula::AsWritten)?,
        prediction_consistent: weingartner_prediction(t.value(), Formula::Consistent)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem4Report {
    pub n_limit: u64,
    pub c0: f64,
    /// n in [16, n_limit] with `φ(n)/n ≤ c0 / ln ln ln n`, certified.
    pub count: u64,
    pub indeterminate: u64,
    /// count / (n_limit − 15).
    pub fraction: f64,
    /// The smallest exceptions, at most [`FIRST_EXCEPTIONS`] of them.
    pub first_exceptions: Vec<u64>,
}

pub const FIRST_EXCEPTIONS: usize = 20;

fn triple_log_threshold(n: u64, c0: f64) -> Result<ErrorTracked> {
    let lll = ErrorTracked::from_u64(n).ln()?.ln()?.ln()?;
    ErrorTracked::exact(c0).div(lll)
}

/// Exceptions to `φ(n)/n > c0 / ln ln ln n` on `[16, n_limit]`.
pub fn theorem4_exceptions(table: &TotientTable, n_limit: u64, c0: f64) -> Result<Theorem4Report> {
    if n_limit < 16 {
        return Err(Error::Config("exception count needs n_limit >= 16".into()));
    }
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::Domain("c0 must be positive"));
    }
    check_table(table, n_limit)?;
    let starts: Vec<u64> = (16..=n_limit).step_by(CHUNK).collect();
    let parts: Vec<Result<(u64, u64, Vec<u64>)>> = starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + CHUNK as u64 - 1).min(n_limit);
            let mut count = 0;
            let mut unsure = 0;
            let mut first = Vec::new();
            for n in lo..=hi {
                let ratio = ErrorTracked::rounded(table.phi(n) as f64 / n as f64);
                let v = certified_compare(triple_log_threshold(n, c0)?, ratio);
                match v.outcome {
                    Outcome::Fails => {}
                    // ratio ≤ threshold
                    Outcome::Holds => {
                        count += 1;
                        if first.len() < FIRST_EXCEPTIONS {
                            first.push(n);
                        }
                    }
                    Outcome::Indeterminate => unsure += 1,
                }
            }
            Ok((count, unsure, first))
        })
        .collect();
    let mut count = 0;
    let mut indeterminate = 0;
    let mut first_exceptions = Vec::new();
    for part in parts {
        let (c, u, f) = part?;
        count += c;
        indeterminate += u;
        let room = FIRST_EXCEPTIONS - first_exceptions.len();
        first_exceptions.extend(f.into_iter().take(room));
    }
    Ok(Theorem4Report {
        n_limit,
        c0,
        count,
        indeterminate,
        fraction: count as f64 / (n_limit - 15) as f64,
        first_exceptions,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaReport {
    pub n_limit: u64,
    /// Σ_{n≤N} ω(n).
    pub sum: u64,
    pub mean_omega: f64,
    pub loglog_plus_b1: f64,
    pub max_omega: u8,
    /// Smallest n attaining the maximum.
    pub argmax: u64,
}

/// Mean and maximum of ω(n) for n ≤ n_limit.
pub fn omega_normal_order(table: &TotientTable, n_limit: u64, b1: f64) -> Result<OmegaReport> {
    if n_limit < 3 {
        return Err(Error::Config("omega report needs n_limit >= 3".into()));
    }
    check_table(table, n_limit)?;
    let omega = &table.omega_slice()[..n_limit as usize];
    let sum = omega
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(|&w| w as u64).sum::<u64>())
        .sum();
    let (max_omega, argmax) = omega
        .iter()
        .enumerate()
        .fold((0u8, 1u64), |(m, a), (i, &w)| {
            if w > m {
                (w, i as u64 + 1)
            } else {
                (m, a)
            }
        });
    Ok(OmegaReport {
        n_limit,
        sum,
        mean_omega: sum as f64 / n_limit as f64,
        loglog_plus_b1: (n_limit as f64).ln().ln() + b1,
        max_omega,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::totient_table;

    #[test]
    fn parse_thresholds() {
        assert_eq!("2".parse::<Threshold>().unwrap(), Threshold::Rational { num: 2, den: 1 });
        assert_eq!("1.5".parse::<Threshold>().unwrap(), Threshold::Rational { num: 3, den: 2 });
        assert_eq!("6/4".parse::<Threshold>().unwrap(), Threshold::Rational { num: 3, den: 2 });
        for bad in ["", ".", "x", "1/0", "-1", "1e3"] {
            assert!(bad.parse::<Threshold>().is_err(), "{bad}");
        }
    }

    #[test]
    fn small_density_examples() {
        let t = totient_table(1000).unwrap();
        let r = density_estimate(&t, Threshold::rational(2, 1).unwrap(), 100).unwrap();
        assert_eq!((r.count, r.density), (50, 0.5));
        let r = density_estimate(&t, Threshold::rational(1, 1).unwrap(), 1000).unwrap();
        assert_eq!(r.density, 1.0);
        assert!(density_estimate(&t, Threshold::rational(1, 2).unwrap(), 10).is_err());
        assert_eq!(
            density_estimate(&t, Threshold::rational(2, 1).unwrap(), 1001).unwrap_err(),
            Error::TableTooSmall { requested: 1001, available: 1000 }
        );
    }

    #[test]
    fn tracked_threshold_agrees_off_coincidences() {
        let t = totient_table(10_000).unwrap();
        let e = ErrorTracked::rounded(std::f64::consts::E);
        let r = density_estimate(&t, Threshold::Tracked(e), 10_000).unwrap();
        let brute = (1..=10_000u64)
            .filter(|&n| n as f64 / t.phi(n) as f64 >= std::f64::consts::E)
            .count() as u64;
        assert_eq!(r.indeterminate, 0);
        assert_eq!(r.count, brute);
    }

    #[test]
    fn prediction_forms() {
        let n_log = std::f64::consts::E.exp();
        let t = EULER_GAMMA.exp() * n_log.ln().ln();
        let p = weingartner_prediction(t, Formula::Consistent).unwrap();
        assert!((p * n_log - 1.0).abs() < 1e-12);
        assert!((weingartner_prediction(2.0, Formula::Consistent).unwrap() - 0.046).abs() < 1e-3);
        assert!(weingartner_prediction(200.0, Formula::AsWritten).unwrap() > 0.999_999);
        assert!(weingartner_prediction(0.0, Formula::AsWritten).is_err());
    }

    #[test]
    fn omega_small() {
        let t = totient_table(100).unwrap();
        let r = omega_normal_order(&t, 30, 0.2615).unwrap();
        assert_eq!(r.sum, 43);
        assert_eq!((r.max_omega, r.argmax), (3, 30));
    }

    #[test]
    fn theorem4_with_large_c0_counts_everything() {
        let t = totient_table(10_000).unwrap();
        let r = theorem4_exceptions(&t, 10_000, 1.0).unwrap();
        assert_eq!(r.count, 10_000 - 15);
        assert_eq!(&r.first_exceptions[..3], &[16, 17, 18]);
        assert!(theorem4_exceptions(&t, 15, 1.0).is_err());
    }
}
