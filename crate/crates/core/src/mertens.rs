//! Mertens sums Σ_{p≤x} 1/p at checkpoints, with the residual
//! R(x) = Σ 1/p − ln ln x − B₁ tested against three bands, and the
//! arithmetic-progression variant.

use crate::checkpoint::{CheckpointPolicy, CheckpointWalker};
use crate::error::{Error, Result};
use crate::rigor::{certified_compare, CompensatedSum, ErrorTracked, Verdict};
use crate::sieve::{gcd, totient_of, SieveConfig};
use crate::theta::pi;

#[derive(Debug, Clone)]
pub struct MertensConfig {
    pub limit: u64,
    pub checkpoints: CheckpointPolicy,
    /// Constant `c` of the elementary band `c / ln x`.
    pub elementary_c: f64,
    pub b1: ErrorTracked,
    pub segment_size: usize,
}

impl MertensConfig {
    pub fn new(limit: u64, b1: ErrorTracked) -> Self {
        MertensConfig {
            limit,
            checkpoints: CheckpointPolicy::default(),
            elementary_c: 1.0,
            b1,
            segment_size: crate::sieve::DEFAULT_SEGMENT_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MertensRecord {
    pub x: u64,
    pub sum_recip: ErrorTracked,
    /// R(x) = Σ_{p≤x} 1/p − ln ln x − B₁.
    pub residual: ErrorTracked,
    pub dusart_band: f64,
    pub rh_band: f64,
    pub elementary_band: f64,
    /// `Holds` when |R(x)| is strictly inside the band.
    pub within_dusart: Verdict,
    pub within_rh: Verdict,
    pub within_elementary: Verdict,
}

/// `1/(10 ln²x) + 4/(15 ln³x)`.
pub fn dusart_band(x: u64) -> Result<ErrorTracked> {
    let l = ErrorTracked::from_u64(x).ln()?;
    let l2 = l.square()?;
    let l3 = l2.mul(l)?;
    let a = ErrorTracked::exact(1.0).div(l2.scale(10.0)?)?;
    let b = ErrorTracked::exact(4.0).div(l3.scale(15.0)?)?;
    a.add(b)
}

/// `(3 ln x + 4) / (8π √x)`.
pub fn rh_band(x: u64) -> Result<ErrorTracked> {
    let xf = ErrorTracked::from_u64(x);
    let num = xf.ln()?.scale(3.0)?.add(ErrorTracked::exact(4.0))?;
    num.div(pi().scale(8.0)?.mul(xf.sqrt()?)?)
}

/// `c / ln x`.
pub fn elementary_band(x: u64, c: f64) -> Result<ErrorTracked> {
    ErrorTracked::exact(c).div(ErrorTracked::from_u64(x).ln()?)
}

pub(crate) fn reciprocal(p: u64) -> ErrorTracked {
    ErrorTracked::rounded(1.0 / p as f64)
}

pub(crate) fn log_log(x: u64) -> Result<ErrorTracked> {
    ErrorTracked::from_u64(x).ln()?.ln()
}

fn record(x: u64, sum: ErrorTracked, cfg: &MertensConfig) -> Result<MertensRecord> {
    let residual = sum.sub(log_log(x)?)?.sub(cfg.b1)?;
    let r = residual.abs();
    let dusart = dusart_band(x)?;
    let rh = rh_band(x)?;
    let elementary = elementary_band(x, cfg.elementary_c)?;
    Ok(MertensRecord {
        x,
        sum_recip: sum,
        residual,
        dusart_band: dusart.value(),
        rh_band: rh.value(),
        elementary_band: elementary.value(),
        within_dusart: certified_compare(dusart, r),
        within_rh: certified_compare(rh, r),
        within_elementary: certified_compare(elementary, r),
    })
}

#[derive(Debug)]
pub struct MertensScan {
    walker: CheckpointWalker,
    acc: CompensatedSum,
    config: MertensConfig,
}

impl Iterator for MertensScan {
    type Item = Result<MertensRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        let acc = &mut self.acc;
        let x = self.walker.advance(|p| acc.push_tracked(reciprocal(p)))?;
        Some(record(x, self.acc.total(), &self.config))
    }
}

/// Mertens records at the configured checkpoints, starting at x = 2.
pub fn mertens_scan(config: &MertensConfig) -> Result<MertensScan> {
    if config.limit < 3 {
        return Err(Error::Config("mertens scan needs limit >= 3".into()));
    }
    let sieve = SieveConfig::new(config.limit).with_segment_size(config.segment_size);
    Ok(MertensScan {
        walker: CheckpointWalker::new(&sieve, &config.checkpoints, 2)?,
        acc: CompensatedSum::new(),
        config: config.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApRecord {
    pub x: u64,
    /// Σ 1/p over p ≤ x with p ≡ a (mod q).
    pub sum: ErrorTracked,
    /// sum − ln ln x / φ(q).
    pub centered: ErrorTracked,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApScan {
    pub q: u64,
    pub a: u64,
    pub records: Vec<ApRecord>,
    /// Centered value at the last checkpoint; an empirical estimate of B_{a,q}.
    pub estimate: f64,
    /// max − min of the centered values over checkpoints in (limit/10, limit].
    pub spread: f64,
}

/// Mertens sums restricted to the progression `p ≡ a (mod q)`.
pub fn mertens_ap_scan(
    q: u64,
    a: u64,
    limit: u64,
    checkpoints: &CheckpointPolicy,
) -> Result<ApScan> {
    if q < 3 {
        return Err(Error::Config(format!("modulus {q} must be at least 3")));
    }
    let a = a % q;
    if gcd(a, q) != 1 {
        return Err(Error::InvalidResidue { a, q });
    }
    if limit < q {
        return Err(Error::Config(format!("limit {limit} is below the modulus {q}")));
    }
    let phi_q = ErrorTracked::from_u64(totient_of(q));
    let mut walker = CheckpointWalker::new(&SieveConfig::new(limit), checkpoints, 2)?;
    let mut acc = CompensatedSum::new();
    let mut records = Vec::new();
    loop {
        let Some(x) = walker.advance(|p| {
            if p % q == a {
                acc.push_tracked(reciprocal(p));
            }
        }) else {
            break;
        };
        let sum = acc.total();
        let centered = sum.sub(log_log(x)?.div(phi_q)?)?;
        records.push(ApRecord { x, sum, centered });
    }
    let estimate = records.last().map_or(0.0, |r| r.centered.value());
    let tail = records.iter().filter(|r| r.x > limit / 10).map(|r| r.centered.value());
    let (lo, hi) = tail.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let spread = if hi >= lo { hi - lo } else { 0.0 };
    Ok(ApScan {
        q,
        a,
        records,
        estimate,
        spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::Outcome;

    // B₁ ± 1e-15 is plenty for these small checks.
    fn b1() -> ErrorTracked {
        ErrorTracked::new(0.261_497_212_847_642_8, 1e-15).unwrap()
    }

    fn at(limit: u64, xs: Vec<u64>) -> Vec<MertensRecord> {
        let mut cfg = MertensConfig::new(limit, b1());
        cfg.checkpoints = CheckpointPolicy::Explicit(xs);
        mertens_scan(&cfg).unwrap().map(Result::unwrap).collect()
    }

    #[test]
    fn small_sums() {
        let r = at(10, vec![3, 10]);
        assert!((r[0].sum_recip.value() - 5.0 / 6.0).abs() <= r[0].sum_recip.err());
        let s10 = 0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0;
        assert!((r[1].sum_recip.value() - s10).abs() <= r[1].sum_recip.err() + 1e-16);
        assert!((r[1].residual.value() - 0.0807).abs() < 1e-4);
    }

    #[test]
    fn band_formulas() {
        let l = 1e6f64.ln();
        let d = dusart_band(1_000_000).unwrap().value();
        assert!((d - (1.0 / (10.0 * l * l) + 4.0 / (15.0 * l * l * l))).abs() < 1e-15);
        assert!((d - 6.3e-4).abs() < 2e-5);
        let rh = rh_band(1_000_000).unwrap().value();
        assert!((rh - (3.0 * l + 4.0) / (8.0 * std::f64::consts::PI * 1000.0)).abs() < 1e-15);
        assert!((elementary_band(100, 1.0).unwrap().value() - 1.0 / 100f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn elementary_band_holds_from_ten() {
        let cfg = MertensConfig::new(100_000, b1());
        for r in mertens_scan(&cfg).unwrap().map(Result::unwrap) {
            if r.x >= 10 {
                assert_eq!(r.within_elementary.outcome, Outcome::Holds, "x={}", r.x);
            }
        }
    }

    #[test]
    fn ap_rejects_bad_arguments() {
        let g = CheckpointPolicy::default();
        assert_eq!(
            mertens_ap_scan(4, 2, 100, &g).unwrap_err(),
            Error::InvalidResidue { a: 2, q: 4 }
        );
        assert!(mertens_ap_scan(2, 1, 100, &g).is_err());
        assert!(mertens_ap_scan(7, 1, 5, &g).is_err());
    }

    #[test]
    fn ap_single_term() {
        let s = mertens_ap_scan(3, 2, 4, &CheckpointPolicy::Explicit(vec![4])).unwrap();
        assert_eq!(s.records.len(), 1);
        assert_eq!(s.records[0].sum.value(), 0.5);
    }
}
