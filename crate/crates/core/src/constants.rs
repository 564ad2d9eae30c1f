//! High-precision constants: γ, the prime zeta values P(s), and the Mertens
//! constant B₁ rebuilt from them through `B₁ = γ − Σ_{n≥2} P(n)/n`.
//!
//! This is the only module that works in arbitrary precision (MPFR through
//! `rug`, [`WORKING_PRECISION`] bits). Everything it hands to the scans goes
//! out as an [`ErrorTracked`] whose bound covers truncation, working
//! precision, and the final rounding to binary64.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Round;
use rug::ops::PowAssign;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::rigor::{CompensatedSum, ErrorTracked};
use crate::sieve::{primes_up_to, SieveConfig};

/// Working precision in bits (about 57 decimal digits).
pub const WORKING_PRECISION: u32 = 192;

/// γ to 60 decimals.
pub const EULER_GAMMA_DIGITS: &str =
    "0.577215664901532860606512090082402431042159335939923598805767";

/// Meissel–Mertens constant to 50 decimals, for reference output only.
pub const MERTENS_REFERENCE_DIGITS: &str =
    "0.26149721284764278375542683860869585905156664826120";

pub const DEFAULT_ZETA_LIMIT: u64 = 10_000_000;
pub const DEFAULT_N_MAX: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Embedded literal with its source.
    Quoted(&'static str),
    /// Direct prime summation.
    Computed { prime_limit: u64, n_max: u32 },
    /// Obtained from other constants.
    Derived(&'static str),
}

#[derive(Debug, Clone)]
pub struct ConstantValue {
    pub name: String,
    pub value: Float,
    /// Bound on `|value − true constant|`.
    pub tail_bound: f64,
    pub provenance: Provenance,
}

impl ConstantValue {
    /// Decimal expansion rounded to `significant` significant digits.
    pub fn digits(&self, significant: usize) -> String {
        format_decimal(&self.value, significant)
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// The value as a binary64 enclosure.
    pub fn to_tracked(&self) -> ErrorTracked {
        let v = self.value.to_f64();
        let conv = Float::with_val(WORKING_PRECISION, &self.value - v)
            .abs()
            .to_f64_round(Round::Up);
        let err = (conv + self.tail_bound).next_up();
        ErrorTracked::new(v, err).expect("constant enclosure is finite")
    }
}

/// Decimal rendering of `x` with `significant` digits, without exponent.
pub fn format_decimal(x: &Float, significant: usize) -> String {
    let significant = significant.max(1);
    let (neg, digits, exp) = x.to_sign_string_exp(10, Some(significant));
    let sign = if neg { "-" } else { "" };
    let Some(exp) = exp else {
        // zero, or a special value
        return format!("{sign}{digits}");
    };
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    if exp <= 0 {
        format!("{sign}0.{}{digits}", "0".repeat((-exp) as usize))
    } else {
        let e = exp as usize;
        if digits.len() <= e {
            format!("{sign}{digits}{}", "0".repeat(e - digits.len()))
        } else {
            format!("{sign}{}.{}", &digits[..e], &digits[e..])
        }
    }
}

fn float(x: impl Into<f64>) -> Float {
    Float::with_val(WORKING_PRECISION, x.into())
}

fn parse(literal: &str) -> Float {
    Float::with_val(
        WORKING_PRECISION,
        Float::parse(literal).expect("valid decimal literal"),
    )
}

/// γ from the embedded literal.
pub fn euler_gamma() -> ConstantValue {
    ConstantValue {
        name: "gamma".into(),
        value: parse(EULER_GAMMA_DIGITS),
        tail_bound: 1e-59,
        provenance: Provenance::Quoted("Euler–Mascheroni constant, standard tables"),
    }
}

/// e^γ, from the literal.
pub fn exp_gamma() -> ConstantValue {
    let g = euler_gamma();
    let value = Float::with_val(WORKING_PRECISION, g.value.exp_ref());
    // d(e^x) = e^x dx, plus one working-precision rounding
    let tail_bound = 2.0 * g.tail_bound + 1e-54;
    ConstantValue {
        name: "exp_gamma".into(),
        value,
        tail_bound,
        provenance: Provenance::Derived("exp of the gamma literal"),
    }
}

/// Quoted value of B₁; the reconstruction is [`compute_b1`].
pub fn mertens_reference() -> ConstantValue {
    ConstantValue {
        name: "B1_reference".into(),
        value: parse(MERTENS_REFERENCE_DIGITS),
        tail_bound: 1e-49,
        provenance: Provenance::Quoted("Meissel–Mertens constant, standard tables"),
    }
}

/// Even-index Bernoulli numbers B_2 .. B_20 as (numerator, denominator).
const BERNOULLI: [(i64, i64); 10] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
    (43867, 798),
    (-174611, 330),
];

/// γ recomputed by Euler–Maclaurin on the harmonic numbers:
/// `γ = H_N − ln N − 1/(2N) + Σ_k B_{2k} / (2k N^{2k})` with N = 1000.
/// Independent of [`EULER_GAMMA_DIGITS`]; used as its self-test.
pub fn gamma_by_euler_maclaurin() -> Float {
    const N: u32 = 1000;
    let prec = WORKING_PRECISION + 32;
    let mut h = Float::with_val(prec, 0);
    for j in (1..=N).rev() {
        h += Float::with_val(prec, 1) / j;
    }
    let n = Float::with_val(prec, N);
    let mut g = h - Float::with_val(prec, n.ln_ref());
    g -= Float::with_val(prec, 1) / (2 * N);
    let n2 = Float::with_val(prec, N * N);
    let mut npow = n2.clone();
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let two_k = 2 * (k as i64 + 1);
        let term = Float::with_val(prec, num) / Float::with_val(prec, den * two_k) / &npow;
        g += term;
        npow *= &n2;
    }
    Float::with_val(WORKING_PRECISION, g)
}

/// Upper constant in `ϑ(x) < b·x`, valid for all x > 0 (Rosser–Schoenfeld).
pub const THETA_UPPER_CONSTANT: f64 = 1.01624;

/// Bound on `Σ_{p>y} p^{-s}` for `y >= 2`, given a lower bound on ϑ(y).
///
/// Partial summation against ϑ with `f(t) = t^{-s}/ln t` and `ϑ(t) < b·t`:
/// `Σ_{p>y} p^{-s} <= (b·y − ϑ(y))·f(y) + b·y^{1−s}/((s−1) ln y)`.
/// The second term is the leading-order prime tail; the first is the
/// correction for ϑ(y) falling short of b·y.
pub fn prime_tail_bound(y: u64, s: u32, theta_y_lower: f64) -> f64 {
    let p = WORKING_PRECISION;
    let b = THETA_UPPER_CONSTANT;
    let ln_y = Float::with_val(p, float(y as f64).ln_ref());
    let mut y_pow = Float::with_val(p, &ln_y * (1.0 - s as f64));
    y_pow.exp_mut(); // y^{1-s}
    let lead = Float::with_val(p, &y_pow * b) / Float::with_val(p, &ln_y * (s as f64 - 1.0));
    let gap = (Float::with_val(p, y) * b - theta_y_lower.max(0.0)).max(&float(0.0));
    let corr = gap * y_pow / y / &ln_y;
    Float::with_val(p, lead + corr).to_f64_round(Round::Up) * (1.0 + 1e-12)
}

/// Lower bound on ϑ(y) from a compensated sum of `ln p`.
fn theta_lower(theta: &CompensatedSum) -> f64 {
    theta.total().lo()
}

/// Bound on working-precision rounding over `ops` operations on values of
/// magnitude at most 1.
fn rounding_slack(ops: u64) -> f64 {
    let ulp = 2f64.powi(-(WORKING_PRECISION as i32) + 1);
    (ops as f64 + 8.0) * ulp
}

/// The prime tail is one-sided, so the partial sum is moved to the middle
/// of `[partial, partial + tail]`.
fn centred(partial: Float, tail: f64, slack: f64) -> (Float, f64) {
    let half = tail / 2.0;
    let value = partial + half;
    (value, (half + slack).next_up())
}

/// P(s) = Σ_p p^{-s} from the primes up to `prime_limit` and a bound on the
/// rest; the value is the midpoint of the enclosure.
pub fn prime_zeta(s: u32, prime_limit: u64) -> Result<ConstantValue> {
    if s < 2 {
        return Err(Error::Divergent(s));
    }
    if prime_limit < 2 {
        return Err(Error::Config("prime_zeta needs prime_limit >= 2".into()));
    }
    let cutoff_bits = WORKING_PRECISION + 8;
    let mut acc = float(0.0);
    let mut term = float(0.0);
    let mut count = 0u64;
    let mut theta = CompensatedSum::new();
    for p in primes_up_to(&SieveConfig::new(prime_limit))? {
        theta.push_tracked(ErrorTracked::rounded(p as f64).ln()?);
        // p^{-s} < 2^{-cutoff} from here on
        if s as f64 * (p as f64).log2() > cutoff_bits as f64 + 1.0 {
            continue;
        }
        term.assign(p);
        term.pow_assign(-(s as i32));
        acc += &term;
        count += 1;
    }
    let dropped = prime_limit as f64 * 2f64.powi(-(cutoff_bits as i32));
    let tail = prime_tail_bound(prime_limit, s, theta_lower(&theta));
    let (value, tail_bound) = centred(acc, tail, rounding_slack(2 * count) + dropped);
    Ok(ConstantValue {
        name: format!("P({s})"),
        value,
        tail_bound,
        provenance: Provenance::Computed {
            prime_limit,
            n_max: s,
        },
    })
}

/// P(2) .. P(n_max) from a single pass over the primes.
#[derive(Debug, Clone)]
pub struct PrimeZetaTable {
    prime_limit: u64,
    n_max: u32,
    theta_lower: f64,
    // index n - 2
    values: Vec<Float>,
    tail_bounds: Vec<f64>,
}

impl PrimeZetaTable {
    pub fn prime_limit(&self) -> u64 {
        self.prime_limit
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Certified lower bound on ϑ(prime_limit) from the same pass.
    pub fn theta_lower(&self) -> f64 {
        self.theta_lower
    }

    pub fn get(&self, s: u32) -> Option<ConstantValue> {
        let i = s.checked_sub(2)? as usize;
        Some(ConstantValue {
            name: format!("P({s})"),
            value: self.values.get(i)?.clone(),
            tail_bound: self.tail_bounds[i],
            provenance: Provenance::Computed {
                prime_limit: self.prime_limit,
                n_max: self.n_max,
            },
        })
    }

    /// Σ_{n=2}^{n_max} P(n)/n, the double sum Σ_p Σ_n 1/(n p^n) truncated at
    /// `n_max`. The bound covers the prime tails only.
    pub fn weighted_sum(&self, n_max: u32) -> Result<ConstantValue> {
        if n_max < 2 || n_max > self.n_max {
            return Err(Error::Config(format!(
                "n_max {n_max} outside the table range 2..={}",
                self.n_max
            )));
        }
        let mut acc = float(0.0);
        let mut tail = 0.0f64;
        for n in 2..=n_max {
            let i = (n - 2) as usize;
            acc += Float::with_val(WORKING_PRECISION, &self.values[i] / n);
            tail = (tail + self.tail_bounds[i] / n as f64).next_up();
        }
        tail = (tail + rounding_slack(2 * n_max as u64)).next_up();
        Ok(ConstantValue {
            name: format!("sum_P(n)/n,n<={n_max}"),
            value: acc,
            tail_bound: tail,
            provenance: Provenance::Computed {
                prime_limit: self.prime_limit,
                n_max,
            },
        })
    }
}

pub fn prime_zeta_table(prime_limit: u64, n_max: u32) -> Result<PrimeZetaTable> {
    if n_max < 2 {
        return Err(Error::Divergent(n_max));
    }
    if prime_limit < 2 {
        return Err(Error::Config("prime zeta table needs prime_limit >= 2".into()));
    }
    let len = (n_max - 1) as usize;
    let mut acc: Vec<Float> = (0..len).map(|_| float(0.0)).collect();
    let cutoff = Float::with_val(WORKING_PRECISION, 1) >> (WORKING_PRECISION + 8);
    let mut r = float(0.0);
    let mut pw = float(0.0);
    let mut count = 0u64;
    let mut theta = CompensatedSum::new();
    for p in primes_up_to(&SieveConfig::new(prime_limit))? {
        theta.push_tracked(ErrorTracked::rounded(p as f64).ln()?);
        r.assign(p);
        r.recip_mut();
        pw.assign(&r * &r);
        for slot in acc.iter_mut() {
            *slot += &pw;
            if pw < cutoff {
                break;
            }
            pw *= &r;
        }
        count += 1;
    }
    let dropped = count as f64 * 2f64.powi(-(WORKING_PRECISION as i32 + 7));
    let slack = rounding_slack(2 * count) + dropped;
    let (values, tail_bounds) = acc
        .into_iter()
        .zip(2..=n_max)
        .map(|(v, s)| centred(v, prime_tail_bound(prime_limit, s, theta_lower(&theta)), slack))
        .unzip();
    Ok(PrimeZetaTable {
        prime_limit,
        n_max,
        theta_lower: theta_lower(&theta),
        values,
        tail_bounds,
    })
}

/// Bound on `Σ_{n>n_max} P(n)/n`, using `P(n) <= 2^{1−n}`.
pub fn n_tail_bound(n_max: u32) -> f64 {
    (2f64.powi(2 - n_max as i32) / (n_max as f64 + 1.0)).next_up()
}

fn zeta_cache() -> &'static Mutex<HashMap<(u64, u32), Arc<PrimeZetaTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<PrimeZetaTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cached [`prime_zeta_table`]; tables are immutable once built.
pub fn shared_zeta_table(prime_limit: u64, n_max: u32) -> Result<Arc<PrimeZetaTable>> {
    if let Some(t) = zeta_cache().lock().unwrap().get(&(prime_limit, n_max)) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(prime_zeta_table(prime_limit, n_max)?);
    zeta_cache()
        .lock()
        .unwrap()
        .entry((prime_limit, n_max))
        .or_insert_with(|| Arc::clone(&table));
    Ok(table)
}

/// B₁ = γ − Σ_{n=2}^{n_max} P(n)/n.
pub fn compute_b1(prime_limit: u64, n_max: u32) -> Result<ConstantValue> {
    if prime_limit < 1000 {
        return Err(Error::Config("compute_b1 needs prime_limit >= 1000".into()));
    }
    if n_max < 2 {
        return Err(Error::Config("compute_b1 needs n_max >= 2".into()));
    }
    let table = shared_zeta_table(prime_limit, n_max)?;
    b1_from_table(&table, n_max)
}

fn b1_from_table(table: &PrimeZetaTable, n_max: u32) -> Result<ConstantValue> {
    let gamma = euler_gamma();
    let series = table.weighted_sum(n_max)?;
    let value = Float::with_val(WORKING_PRECISION, &gamma.value - &series.value);
    let tail_bound =
        (series.tail_bound + n_tail_bound(n_max) + gamma.tail_bound + rounding_slack(1)).next_up();
    Ok(ConstantValue {
        name: "B1".into(),
        value,
        tail_bound,
        provenance: Provenance::Computed {
            prime_limit: table.prime_limit,
            n_max,
        },
    })
}

/// Binary64 enclosures of the constants the scans consume.
#[derive(Debug, Clone, Copy)]
pub struct ScanConstants {
    pub gamma: ErrorTracked,
    pub exp_gamma: ErrorTracked,
    pub b1: ErrorTracked,
    /// Σ_{n=2}^{n_max} P(n)/n; its bound covers the prime tails only, the
    /// n > n_max part is accounted for by the consumer.
    pub power_series_total: ErrorTracked,
    pub n_max: u32,
    pub zeta_limit: u64,
}

impl ScanConstants {
    pub fn compute(zeta_limit: u64, n_max: u32) -> Result<Self> {
        if zeta_limit < 1000 {
            return Err(Error::Config("zeta limit must be at least 1000".into()));
        }
        let table = shared_zeta_table(zeta_limit, n_max)?;
        let b1 = b1_from_table(&table, n_max)?;
        let total = table.weighted_sum(n_max)?;
        Ok(ScanConstants {
            gamma: euler_gamma().to_tracked(),
            exp_gamma: exp_gamma().to_tracked(),
            b1: b1.to_tracked(),
            power_series_total: total.to_tracked(),
            n_max,
            zeta_limit,
        })
    }

    pub fn standard() -> Result<Self> {
        Self::compute(DEFAULT_ZETA_LIMIT, DEFAULT_N_MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_literal_matches_series_to_40_digits() {
        let lit = euler_gamma().value;
        let series = gamma_by_euler_maclaurin();
        let diff = Float::with_val(WORKING_PRECISION, &lit - &series).abs();
        assert!(diff < 1e-40, "diff {diff}");
        assert_eq!(euler_gamma().digits(10), "0.5772156649");
    }

    #[test]
    fn exp_gamma_leading_digits() {
        assert_eq!(exp_gamma().digits(8), "1.7810724");
    }

    #[test]
    fn formatting() {
        assert_eq!(format_decimal(&float(0.25), 5), "0.25");
        assert_eq!(format_decimal(&float(1234.5), 6), "1234.5");
        assert_eq!(format_decimal(&float(1234.0), 2), "1200");
        assert_eq!(format_decimal(&float(0.00123), 2), "0.0012");
        assert_eq!(format_decimal(&float(-2.5), 3), "-2.5");
        assert_eq!(format_decimal(&float(0.0), 3), "0");
    }

    #[test]
    fn single_prime_zeta() {
        let p = prime_zeta(2, 2).unwrap();
        // enclosure [1/4, 1/4 + tail] must contain P(2) = 0.452247...
        let lo = p.to_f64() - p.tail_bound;
        assert!((lo - 0.25).abs() < 1e-15);
        assert!(p.to_f64() + p.tail_bound >= 0.452247);
    }

    #[test]
    fn large_s_dominated_by_two() {
        let p = prime_zeta(40, 1000).unwrap();
        let rest = p.to_f64() - 2f64.powi(-40);
        assert!(rest > 0.0 && rest < 2.0 * 3f64.powi(-40));
    }

    #[test]
    fn divergent_and_bad_limits() {
        assert_eq!(prime_zeta(1, 100).unwrap_err(), Error::Divergent(1));
        assert!(prime_zeta(2, 1).is_err());
        assert!(compute_b1(999, 64).is_err());
        assert!(compute_b1(1000, 1).is_err());
    }

    #[test]
    fn table_agrees_with_single_values() {
        let table = prime_zeta_table(5000, 12).unwrap();
        for s in 2..=12 {
            let a = table.get(s).unwrap();
            let b = prime_zeta(s, 5000).unwrap();
            let d = Float::with_val(WORKING_PRECISION, &a.value - &b.value).abs();
            assert!(d < 1e-50, "s={s}: {d}");
        }
        assert!(table.get(13).is_none());
        assert!(table.get(1).is_none());
    }

    #[test]
    fn strictly_decreasing_in_s() {
        let table = prime_zeta_table(10_000, 64).unwrap();
        for s in 2..64 {
            assert!(table.get(s).unwrap().value > table.get(s + 1).unwrap().value);
        }
    }

    #[test]
    fn tail_bound_covers_prime_sums() {
        // Σ_{y<p<=10^6} p^{-s} must stay below the bound at y.
        let primes: Vec<u64> = primes_up_to(&SieveConfig::new(1_000_000)).unwrap().collect();
        let theta_at = |y: u64| -> f64 {
            primes.iter().take_while(|&&p| p <= y).map(|&p| (p as f64).ln()).sum::<f64>() * (1.0 - 1e-12)
        };
        for s in [2u32, 3, 5, 10, 20, 64] {
            let mut suffix = vec![0.0f64; primes.len() + 1];
            for i in (0..primes.len()).rev() {
                suffix[i] = suffix[i + 1] + (primes[i] as f64).powi(-(s as i32));
            }
            for y in 2u64..3000 {
                let idx = primes.partition_point(|&p| p <= y);
                let bound = prime_tail_bound(y, s, theta_at(y));
                assert!(suffix[idx] <= bound, "s={s} y={y}: {} > {bound}", suffix[idx]);
            }
        }
    }

    #[test]
    fn tracked_conversion_encloses() {
        let g = euler_gamma();
        let t = g.to_tracked();
        let exact = Float::with_val(WORKING_PRECISION, &g.value - t.value()).abs();
        assert!(exact <= t.err());
        assert!(t.err() < 1e-16);
    }

    #[test]
    fn n_tail_is_negligible_at_64() {
        assert!(n_tail_bound(64) < 1e-20);
    }
}
