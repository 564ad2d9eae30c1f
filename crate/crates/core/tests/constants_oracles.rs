//! Constants against closed forms evaluated independently with MPFR:
//! P(s) = Σ_k μ(k)/k · ln ζ(ks) and B₁ = γ + Σ_{k≥2} μ(k)/k · ln ζ(k).

use phiscan_core::constants::{
    compute_b1, euler_gamma, exp_gamma, mertens_reference, n_tail_bound, prime_zeta,
    prime_zeta_table, MERTENS_REFERENCE_DIGITS,
};
use rug::float::Constant;
use rug::Float;

const PREC: u32 = 256;

fn mobius(mut n: u64) -> i32 {
    let mut m = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            m = -m;
        }
        p += 1;
    }
    if n > 1 {
        -m
    } else {
        m
    }
}

fn ln_zeta(s: u64) -> Float {
    Float::with_val(PREC, s).zeta().ln()
}

fn prime_zeta_oracle(s: u64) -> Float {
    let mut acc = Float::with_val(PREC, 0);
    // ln ζ(ks) ~ 2^{-ks}, negligible once ks > 300
    let mut k = 1;
    while k * s <= 300 {
        let mu = mobius(k);
        if mu != 0 {
            acc += ln_zeta(k * s) * mu / k as f64;
        }
        k += 1;
    }
    acc
}

fn gamma_oracle() -> Float {
    Float::with_val(PREC, Constant::Euler)
}

fn b1_oracle() -> Float {
    let mut acc = gamma_oracle();
    for k in 2..=300u64 {
        let mu = mobius(k);
        if mu != 0 {
            acc += ln_zeta(k) * mu / k as f64;
        }
    }
    acc
}

fn abs_diff(a: &Float, b: &Float) -> f64 {
    Float::with_val(PREC, a - b).abs().to_f64()
}

#[test]
fn gamma_and_exp_gamma_literals() {
    let g = euler_gamma();
    assert!(abs_diff(&g.value, &gamma_oracle()) < 1e-58);
    let eg = exp_gamma();
    assert!(abs_diff(&eg.value, &gamma_oracle().exp()) <= eg.tail_bound);
}

#[test]
fn mertens_reference_literal() {
    let reference = mertens_reference();
    let oracle = b1_oracle();
    assert!(abs_diff(&reference.value, &oracle) < 1e-49, "{}", oracle);
    assert!(MERTENS_REFERENCE_DIGITS.starts_with("0.2614972128"));
}

#[test]
fn prime_zeta_enclosures() {
    for s in [2u32, 3, 5, 10, 30] {
        let oracle = prime_zeta_oracle(s as u64);
        for limit in [100u64, 10_000, 1_000_000] {
            let p = prime_zeta(s, limit).unwrap();
            let d = abs_diff(&p.value, &oracle);
            assert!(d <= p.tail_bound, "P({s}) limit {limit}: off by {d:e}, bound {:e}", p.tail_bound);
        }
    }
}

#[test]
fn weighted_series_encloses_oracle() {
    let table = prime_zeta_table(100_000, 64).unwrap();
    for n_max in [2u32, 8, 64] {
        let mut oracle = Float::with_val(PREC, 0);
        for n in 2..=n_max as u64 {
            oracle += prime_zeta_oracle(n) / n as f64;
        }
        let w = table.weighted_sum(n_max).unwrap();
        assert!(abs_diff(&w.value, &oracle) <= w.tail_bound);
    }
}

#[test]
fn b1_reconstruction_from_primes_to_ten_million() {
    let b1 = compute_b1(10_000_000, 64).unwrap();
    let quoted = Float::with_val(PREC, Float::parse("0.2614972128").unwrap());
    let d = abs_diff(&b1.value, &quoted);
    assert!(d <= 5e-9 + b1.tail_bound, "off by {d:e}, bound {:e}", b1.tail_bound);
    // the enclosure itself must hold the true constant
    assert!(abs_diff(&b1.value, &b1_oracle()) <= b1.tail_bound);
    assert!(b1.tail_bound < 1e-8);
}

#[test]
fn b1_enclosure_at_small_limits() {
    let oracle = b1_oracle();
    for (limit, n_max) in [(1000u64, 2u32), (1000, 10), (50_000, 30)] {
        let b1 = compute_b1(limit, n_max).unwrap();
        // the n-tail is one-sided and already inside the bound
        assert!(abs_diff(&b1.value, &oracle) <= b1.tail_bound);
        assert!(b1.tail_bound >= n_tail_bound(n_max));
    }
}
