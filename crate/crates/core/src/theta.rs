//! Chebyshev's ϑ(x) = Σ_{p≤x} ln p and E(x) = x − ϑ(x) at checkpoints, with
//! the fixed-constant Chebyshev band `a·x < ϑ(x) < b·x` and the conditional
//! band `|ϑ(x) − x| < √x ln²x / (8π)`.

use crate::checkpoint::{CheckpointPolicy, CheckpointWalker};
use crate::error::{Error, Result};
use crate::rigor::{certified_compare, CompensatedSum, ErrorTracked, Verdict};
use crate::sieve::SieveConfig;

#[derive(Debug, Clone)]
pub struct ThetaConfig {
    pub limit: u64,
    pub checkpoints: CheckpointPolicy,
    /// Lower Chebyshev constant `a`.
    pub cheb_a: f64,
    /// Upper Chebyshev constant `b`.
    pub cheb_b: f64,
    /// Chebyshev flags are only evaluated from here on.
    pub cheb_from: u64,
    /// Exponent for the reported ratio `|E(x)|·ln^B x / x`.
    pub wirsing_b: Option<f64>,
    pub segment_size: usize,
}

impl ThetaConfig {
    pub fn new(limit: u64) -> Self {
        ThetaConfig {
            limit,
            checkpoints: CheckpointPolicy::default(),
            cheb_a: 0.8,
            cheb_b: 1.2,
            cheb_from: 100,
            wirsing_b: None,
            segment_size: crate::sieve::DEFAULT_SEGMENT_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRecord {
    pub x: u64,
    pub theta: ErrorTracked,
    /// E(x) = x − ϑ(x), signed.
    pub e_abs: ErrorTracked,
    /// √x ln²x / (8π).
    pub rh_bound: ErrorTracked,
    /// `Holds` when |E(x)| is inside the band, `Fails` when it is outside.
    pub rh_band_ok: Verdict,
    pub chebyshev_lo_ok: Option<bool>,
    pub chebyshev_hi_ok: Option<bool>,
    pub wirsing_ratio: Option<f64>,
}

pub(crate) fn pi() -> ErrorTracked {
    ErrorTracked::rounded(std::f64::consts::PI)
}

/// √x ln²x / (8π).
pub fn rh_theta_bound(x: u64) -> Result<ErrorTracked> {
    let xf = ErrorTracked::from_u64(x);
    let ln = xf.ln()?;
    xf.sqrt()?.mul(ln.square()?)?.div(pi().scale(8.0)?)
}

fn record(x: u64, theta: ErrorTracked, cfg: &ThetaConfig) -> Result<ThetaRecord> {
    let xf = ErrorTracked::from_u64(x);
    let e = xf.sub(theta)?;
    let rh_bound = rh_theta_bound(x)?;
    let rh_band_ok = certified_compare(rh_bound, e.abs());
    let (lo, hi) = if x >= cfg.cheb_from {
        let lo = certified_compare(theta, xf.scale(cfg.cheb_a)?).holds();
        let hi = certified_compare(xf.scale(cfg.cheb_b)?, theta).holds();
        (Some(lo), Some(hi))
    } else {
        (None, None)
    };
    let wirsing_ratio = cfg
        .wirsing_b
        .map(|b| e.value().abs() * (x as f64).ln().powf(b) / x as f64);
    Ok(ThetaRecord {
        x,
        theta,
        e_abs: e,
        rh_bound,
        rh_band_ok,
        chebyshev_lo_ok: lo,
        chebyshev_hi_ok: hi,
        wirsing_ratio,
    })
}

/// Single left-to-right pass; see [`theta_scan`].
#[derive(Debug)]
pub struct ThetaScan {
    walker: CheckpointWalker,
    acc: CompensatedSum,
    config: ThetaConfig,
}

impl Iterator for ThetaScan {
    type Item = Result<ThetaRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        let acc = &mut self.acc;
        let mut failure = None;
        let x = self.walker.advance(|p| match ErrorTracked::from_u64(p).ln() {
            Ok(l) => acc.push_tracked(l),
            Err(e) => failure = Some(e),
        })?;
        if let Some(e) = failure {
            return Some(Err(e));
        }
        Some(record(x, self.acc.total(), &self.config))
    }
}

/// ϑ(x) records at the configured checkpoints up to `config.limit`.
pub fn theta_scan(config: &ThetaConfig) -> Result<ThetaScan> {
    if config.limit < 2 {
        return Err(Error::Config("theta scan needs limit >= 2".into()));
    }
    let sieve = SieveConfig::new(config.limit).with_segment_size(config.segment_size);
    Ok(ThetaScan {
        walker: CheckpointWalker::new(&sieve, &config.checkpoints, 2)?,
        acc: CompensatedSum::new(),
        config: config.clone(),
    })
}

/// ϑ(x) alone.
pub fn theta_at(x: u64) -> Result<ErrorTracked> {
    let mut acc = CompensatedSum::new();
    for p in crate::sieve::primes_up_to(&SieveConfig::new(x))? {
        acc.push_tracked(ErrorTracked::from_u64(p).ln()?);
    }
    Ok(acc.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::Outcome;

    fn at(limit: u64, xs: Vec<u64>) -> Vec<ThetaRecord> {
        let mut cfg = ThetaConfig::new(limit);
        cfg.checkpoints = CheckpointPolicy::Explicit(xs);
        theta_scan(&cfg).unwrap().map(Result::unwrap).collect()
    }

    #[test]
    fn theta_at_two_ten_hundred() {
        let r = at(100, vec![2, 10, 100]);
        assert_eq!(r[0].theta.value(), 2f64.ln());
        assert!((r[0].e_abs.value() - (2.0 - 2f64.ln())).abs() < 1e-15);
        let t10 = 2f64.ln() + 3f64.ln() + 5f64.ln() + 7f64.ln();
        assert!((r[1].theta.value() - t10).abs() <= r[1].theta.err() + 1e-15);
        assert!((r[1].theta.value() - 5.3471).abs() < 1e-4);
        let t100: f64 = (2..=100u64)
            .filter(|&n| (2..n).all(|d| n % d != 0))
            .map(|p| (p as f64).ln())
            .sum();
        assert!((r[2].theta.value() - t100).abs() < 1e-12);
        assert!((r[2].theta.value() - 83.728).abs() < 1e-3);
        assert_eq!(r[2].chebyshev_lo_ok, Some(true));
        assert_eq!(r[2].chebyshev_hi_ok, Some(true));
        assert_eq!(r[1].chebyshev_lo_ok, None);
    }

    #[test]
    fn dense_mode_emits_every_prime() {
        let mut cfg = ThetaConfig::new(30);
        cfg.checkpoints = CheckpointPolicy::Dense;
        let xs: Vec<u64> = theta_scan(&cfg).unwrap().map(|r| r.unwrap().x).collect();
        assert_eq!(xs, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn band_verdict_direction() {
        // E(x) is far inside the band at 10^4.
        let r = at(10_000, vec![10_000]);
        assert_eq!(r[0].rh_band_ok.outcome, Outcome::Holds);
        assert!(r[0].rh_band_ok.margin > 0.0);
    }

    #[test]
    fn wirsing_ratio_reported_when_asked() {
        let mut cfg = ThetaConfig::new(1000);
        cfg.checkpoints = CheckpointPolicy::Explicit(vec![1000]);
        cfg.wirsing_b = Some(2.0);
        let r = theta_scan(&cfg).unwrap().next().unwrap().unwrap();
        let e = r.e_abs.value().abs();
        let expected = e * 1000f64.ln().powi(2) / 1000.0;
        assert!((r.wirsing_ratio.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_tiny_limit() {
        assert!(theta_scan(&ThetaConfig::new(1)).is_err());
    }
}
