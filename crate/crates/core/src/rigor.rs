//! Error-tracked scalar arithmetic.
//!
//! Every quantity that feeds an inequality verdict is carried as an
//! [`ErrorTracked`]: a binary64 value together with an absolute bound on its
//! distance from the exact mathematical quantity. Bounds are propagated
//! forward a priori, and each operation adds one rounding term `u·|value|`
//! (two for libm transcendentals, which are assumed faithful to within one
//! ulp). All bound arithmetic is rounded upward with `next_up`, so the
//! bounds themselves never lose to rounding.
//!
//! [`certified_compare`] turns two tracked values into a [`Verdict`]; when
//! the enclosures overlap the outcome is [`Outcome::Indeterminate`] instead
//! of a guess.

use std::fmt;

use crate::error::{Error, Result};

/// Unit roundoff of binary64, `2^-53`.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

const U: f64 = UNIT_ROUNDOFF;

/// Relative error allowed for one libm call (`ln`, `exp`, `ln_1p`, ...).
const LIBM_U: f64 = 2.0 * UNIT_ROUNDOFF;

#[inline]
fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.next_up()
    }
}

#[inline]
fn add_up(a: f64, b: f64) -> f64 {
    up(a + b)
}

#[inline]
fn mul_up(a: f64, b: f64) -> f64 {
    up(a * b)
}

/// `a / b` rounded upward, for `a >= 0` and `b > 0`.
#[inline]
fn div_up(a: f64, b: f64) -> f64 {
    up(a / b)
}

/// Error-free transformation of `a + b`: returns `(s, e)` with `s = fl(a + b)`
/// and `s + e = a + b` exactly.
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = if a.abs() >= b.abs() {
        (a - s) + b
    } else {
        (b - s) + a
    };
    (s, e)
}

/// A binary64 value with a rigorous absolute error bound.
///
/// The exact quantity the value stands for lies in `[value - err, value + err]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTracked {
    value: f64,
    err: f64,
}

impl ErrorTracked {
    pub const ZERO: ErrorTracked = ErrorTracked {
        value: 0.0,
        err: 0.0,
    };

    /// An exactly representable input.
    pub fn exact(value: f64) -> Self {
        debug_assert!(value.is_finite());
        ErrorTracked { value, err: 0.0 }
    }

    pub fn new(value: f64, err: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite("value"));
        }
        if !(err.is_finite() && err >= 0.0) {
            return Err(Error::InvalidBound(err));
        }
        Ok(ErrorTracked { value, err })
    }

    /// The result of a single correctly rounded operation on exact inputs.
    pub fn rounded(value: f64) -> Self {
        debug_assert!(value.is_finite());
        ErrorTracked {
            value,
            err: mul_up(U, value.abs()),
        }
    }

    /// An integer, exact when it fits in 53 bits.
    pub fn from_u64(n: u64) -> Self {
        if n <= (1u64 << 53) {
            Self::exact(n as f64)
        } else {
            Self::rounded(n as f64)
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn lo(&self) -> f64 {
        (self.value - self.err).next_down()
    }

    pub fn hi(&self) -> f64 {
        (self.value + self.err).next_up()
    }

    /// Whether `x` lies inside the enclosure.
    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.err
    }

    fn finish(value: f64, err: f64, what: &'static str) -> Result<Self> {
        if value.is_finite() && err.is_finite() {
            Ok(ErrorTracked { value, err })
        } else {
            Err(Error::NonFinite(what))
        }
    }

    pub fn add(self, rhs: Self) -> Result<Self> {
        let value = self.value + rhs.value;
        let err = add_up(add_up(self.err, rhs.err), mul_up(U, value.abs()));
        Self::finish(value, err, "addition")
    }

    pub fn sub(self, rhs: Self) -> Result<Self> {
        self.add(rhs.neg())
    }

    pub fn neg(self) -> Self {
        ErrorTracked {
            value: -self.value,
            err: self.err,
        }
    }

    pub fn abs(self) -> Self {
        ErrorTracked {
            value: self.value.abs(),
            err: self.err,
        }
    }

    pub fn mul(self, rhs: Self) -> Result<Self> {
        let value = self.value * rhs.value;
        let prop = add_up(
            add_up(
                mul_up(self.value.abs(), rhs.err),
                mul_up(rhs.value.abs(), self.err),
            ),
            mul_up(self.err, rhs.err),
        );
        let err = add_up(prop, mul_up(U, value.abs()));
        Self::finish(value, err, "multiplication")
    }

    /// Multiplication by an exactly representable constant.
    pub fn scale(self, c: f64) -> Result<Self> {
        self.mul(Self::exact(c))
    }

    pub fn div(self, rhs: Self) -> Result<Self> {
        let b = rhs.value.abs();
        let gap = b - rhs.err;
        if !(gap > 0.0) {
            return Err(Error::Domain("divisor interval contains zero"));
        }
        let value = self.value / rhs.value;
        let num = add_up(mul_up(self.value.abs(), rhs.err), mul_up(b, self.err));
        let den = (b * gap.next_down()).next_down();
        let err = add_up(div_up(num, den), mul_up(U, value.abs()));
        Self::finish(value, err, "division")
    }

    pub fn recip(self) -> Result<Self> {
        Self::exact(1.0).div(self)
    }

    /// Natural logarithm; fails when the enclosure reaches zero.
    pub fn ln(self) -> Result<Self> {
        let gap = self.value - self.err;
        if !(gap > 0.0) {
            return Err(Error::LogDomain {
                lo: gap,
                hi: self.value + self.err,
            });
        }
        let value = self.value.ln();
        let err = add_up(
            div_up(self.err, gap.next_down()),
            mul_up(LIBM_U, value.abs()),
        );
        Self::finish(value, err, "logarithm")
    }

    pub fn exp(self) -> Result<Self> {
        let value = self.value.exp();
        if !value.is_finite() {
            return Err(Error::NonFinite("exponential"));
        }
        let widen = mul_up(self.err.exp_m1(), 1.0 + LIBM_U);
        let err = add_up(
            mul_up(mul_up(value, 1.0 + LIBM_U), widen),
            mul_up(LIBM_U, value),
        );
        Self::finish(value, err, "exponential")
    }

    pub fn sqrt(self) -> Result<Self> {
        if self.value - self.err < 0.0 {
            return Err(Error::Domain("square root of an interval reaching below zero"));
        }
        let value = self.value.sqrt();
        let prop = if self.err == 0.0 {
            0.0
        } else {
            div_up(self.err, value.next_down())
        };
        let err = add_up(prop, mul_up(U, value));
        Self::finish(value, err, "square root")
    }

    /// `self^e` for an exact exponent, through `exp(e·ln self)`.
    pub fn powf(self, e: f64) -> Result<Self> {
        self.ln()?.scale(e)?.exp()
    }

    /// `self^2`, computed as a product.
    pub fn square(self) -> Result<Self> {
        self.mul(self)
    }
}

impl fmt::Display for ErrorTracked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} ± {:e}", self.value, self.err)
    }
}

/// `a + b` with one rounding term.
pub fn et_add(a: ErrorTracked, b: ErrorTracked) -> Result<ErrorTracked> {
    a.add(b)
}

/// `ln a`; errors when the enclosure of `a` touches zero.
pub fn et_log(a: ErrorTracked) -> Result<ErrorTracked> {
    a.ln()
}

/// Streaming compensated (Neumaier) summation with an a-posteriori bound.
///
/// The per-step errors of the running sum are captured exactly by the
/// error-free transformation; the only approximations left are the
/// accumulation of those corrections (bounded step by step) and the final
/// fold of the correction into the sum (computed exactly by a second
/// error-free transformation). Input errors add on top.
#[derive(Debug, Clone, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    comp_err: f64,
    input_err: f64,
    terms: u64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        let (s, q) = two_sum(self.sum, x);
        self.sum = s;
        if q != 0.0 {
            self.comp += q;
            self.comp_err = add_up(self.comp_err, mul_up(U, self.comp.abs()));
        }
        self.terms += 1;
    }

    #[inline]
    pub fn push_tracked(&mut self, x: ErrorTracked) {
        self.push(x.value);
        if x.err != 0.0 {
            self.input_err = add_up(self.input_err, x.err);
        }
    }

    pub fn len(&self) -> u64 {
        self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms == 0
    }

    /// The current sum; the accumulator keeps running.
    pub fn total(&self) -> ErrorTracked {
        let (value, fold) = two_sum(self.sum, self.comp);
        let err = add_up(add_up(fold.abs(), self.comp_err), self.input_err);
        ErrorTracked { value, err }
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl Extend<ErrorTracked> for CompensatedSum {
    fn extend<I: IntoIterator<Item = ErrorTracked>>(&mut self, iter: I) {
        for x in iter {
            self.push_tracked(x);
        }
    }
}

/// Compensated sum of exact terms, in the given order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> Result<ErrorTracked> {
    let mut acc = CompensatedSum::new();
    for t in terms {
        if !t.is_finite() {
            return Err(Error::NonFinite("summand"));
        }
        acc.push(t);
    }
    let total = acc.total();
    if total.value.is_finite() && total.err.is_finite() {
        Ok(total)
    } else {
        Err(Error::NonFinite("compensated sum"))
    }
}

/// Three-valued outcome of a certified comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Holds,
    Fails,
    Indeterminate,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Holds => "Holds",
            Outcome::Fails => "Fails",
            Outcome::Indeterminate => "Indeterminate",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of comparing `lhs > rhs` with certified margins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// `lhs - rhs` in the compared scale.
    pub margin: f64,
    pub margin_err: f64,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn fails(&self) -> bool {
        self.outcome == Outcome::Fails
    }
}

/// Decides `lhs > rhs`. `Holds` and `Fails` are only returned when the
/// margin clears its own error bound.
pub fn certified_compare(lhs: ErrorTracked, rhs: ErrorTracked) -> Verdict {
    let margin = lhs.value - rhs.value;
    let margin_err = add_up(add_up(lhs.err, rhs.err), mul_up(U, margin.abs()));
    let outcome = if margin > margin_err {
        Outcome::Holds
    } else if margin < -margin_err {
        Outcome::Fails
    } else {
        Outcome::Indeterminate
    };
    Verdict {
        outcome,
        margin,
        margin_err,
    }
}
