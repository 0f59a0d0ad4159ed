//! Validated interval arithmetic on binary64 endpoints.
//!
//! Every primitive is evaluated in round-to-nearest and the result is pushed
//! outward by one unit in the last place (`next_down` on the lower endpoint,
//! `next_up` on the upper one). Round-to-nearest is within half an ulp of the
//! exact result, so the nudged interval always contains the exact image.
//! Elementary functions come from the platform math library, which is
//! accurate to within one ulp; their endpoints receive the same one-ulp
//! widening.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by interval operations whose domain is violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("divisor {0} contains zero")]
    DivisionByZero(Interval),
    #[error("{func} is undefined on {arg}")]
    Domain { func: &'static str, arg: Interval },
    #[error("invalid interval endpoints [{0}, {1}]")]
    Invalid(f64, f64),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
}

/// A closed interval `[lo, hi]` guaranteed to contain some exact real value.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[inline(always)]
fn dn(x: f64) -> f64 {
    x.next_down()
}

#[inline(always)]
fn up(x: f64) -> f64 {
    x.next_up()
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Interval with the given endpoints. Panics if `lo > hi` or either is NaN.
    #[inline]
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// Checked constructor.
    pub fn try_new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError::Invalid(lo, hi))
        }
    }

    /// Degenerate interval `[x, x]`; exact because `x` is representable.
    #[inline]
    pub const fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Enclosure of an integer; exact up to 2^53.
    #[inline]
    pub fn from_u64(n: u64) -> Self {
        let x = n as f64;
        if n <= (1u64 << 53) {
            Interval::point(x)
        } else {
            Interval { lo: dn(x), hi: up(x) }
        }
    }

    /// Enclosure of a signed integer; exact up to 2^53 in magnitude.
    #[inline]
    pub fn from_i64(n: i64) -> Self {
        if n < 0 {
            -Interval::from_u64(n.unsigned_abs())
        } else {
            Interval::from_u64(n as u64)
        }
    }

    /// Enclosure of the rational `a / b` (with `b != 0`).
    pub fn ratio(a: i64, b: i64) -> Self {
        Interval::from_i64(a) / Interval::from_i64(b)
    }

    /// Enclosure of a decimal literal such as `"0.5772156649015328606"`.
    ///
    /// Parsing is correctly rounded, so widening by one ulp on each side
    /// captures the exact decimal value whatever its length.
    pub fn from_decimal(s: &str) -> Result<Self, IntervalError> {
        let x: f64 = s
            .trim()
            .parse()
            .map_err(|_| IntervalError::UnknownConstant(s.to_string()))?;
        if !x.is_finite() {
            return Err(IntervalError::UnknownConstant(s.to_string()));
        }
        Ok(Interval { lo: dn(x), hi: up(x) })
    }

    /// Enclosure of the real number nearest to binary64 `x`, widened by one
    /// ulp each side (for quantities known only to double precision).
    pub fn around(x: f64) -> Self {
        Interval { lo: dn(x), hi: up(x) }
    }

    #[inline]
    pub fn width(self) -> f64 {
        // Distinct binary64 values never have a zero difference.
        let d = self.hi - self.lo;
        if d == 0.0 {
            0.0
        } else {
            up(d)
        }
    }

    #[inline]
    pub fn mid(self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    /// Largest absolute value of an element.
    #[inline]
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    #[inline]
    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_interval(self, other: Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    #[inline]
    pub fn intersects(self, other: Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    #[inline]
    pub fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.lo > 0.0
    }

    #[inline]
    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    /// Pointwise maximum: encloses `max(x, y)` for `x ∈ self`, `y ∈ other`.
    #[inline]
    pub fn max(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Pointwise minimum.
    #[inline]
    pub fn min(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    /// Enclosure of `|x|`.
    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval {
                lo: 0.0,
                hi: self.mag(),
            }
        }
    }

    /// The symmetric interval `[-r, r]` for `r = self.mag()`.
    pub fn symmetric(self) -> Interval {
        let r = self.mag();
        Interval { lo: -r, hi: r }
    }

    /// Enclosure of `x²` (tighter than `x * x` when `x` straddles zero).
    #[inline]
    pub fn sqr(self) -> Interval {
        if self.lo >= 0.0 {
            Interval {
                lo: dn(self.lo * self.lo).max(0.0),
                hi: up(self.hi * self.hi),
            }
        } else if self.hi <= 0.0 {
            Interval {
                lo: dn(self.hi * self.hi).max(0.0),
                hi: up(self.lo * self.lo),
            }
        } else {
            let m = self.mag();
            Interval {
                lo: 0.0,
                hi: up(m * m),
            }
        }
    }

    /// Enclosure of `1/x`; errors if `0 ∈ x`.
    pub fn recip(self) -> Result<Interval, IntervalError> {
        Interval::ONE.checked_div(self)
    }

    /// Enclosure of `self / rhs`; errors if `0 ∈ rhs`.
    pub fn checked_div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if rhs.contains_zero() {
            return Err(IntervalError::DivisionByZero(rhs));
        }
        let q = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let (lo, hi) = min_max4(q);
        Ok(Interval {
            lo: dn(lo),
            hi: up(hi),
        })
    }

    /// Natural logarithm. Panics outside the domain; see [`elementary`] for
    /// a checked variant.
    pub fn ln(self) -> Interval {
        self.try_ln().expect("ln domain")
    }

    pub fn try_ln(self) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::Domain {
                func: "log",
                arg: self,
            });
        }
        Ok(Interval {
            lo: dn(self.lo.ln()),
            hi: up(self.hi.ln()),
        })
    }

    /// `ln(1 + x)`, accurate for small `x`.
    pub fn ln_1p(self) -> Interval {
        assert!(self.lo > -1.0, "ln_1p domain: {self}");
        Interval {
            lo: dn(self.lo.ln_1p()),
            hi: up(self.hi.ln_1p()),
        }
    }

    pub fn exp(self) -> Interval {
        Interval {
            lo: dn(self.lo.exp()).max(0.0),
            hi: up(self.hi.exp()),
        }
    }

    /// Square root. Panics if the interval has negative elements.
    pub fn sqrt(self) -> Interval {
        self.try_sqrt().expect("sqrt domain")
    }

    pub fn try_sqrt(self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::Domain {
                func: "sqrt",
                arg: self,
            });
        }
        Ok(Interval {
            lo: dn(self.lo.sqrt()).max(0.0),
            hi: up(self.hi.sqrt()),
        })
    }

    /// `self^e` for a positive base and an interval exponent.
    ///
    /// `x^y` is monotone in each variable separately when `x > 0`, so the
    /// extremes over the box lie at its corners.
    pub fn pow(self, e: Interval) -> Interval {
        self.try_pow(e).expect("pow domain")
    }

    pub fn try_pow(self, e: Interval) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::Domain {
                func: "pow",
                arg: self,
            });
        }
        if self.lo == self.hi {
            let a = self.lo.powf(e.lo);
            let b = if e.lo == e.hi { a } else { self.lo.powf(e.hi) };
            return Ok(Interval {
                lo: dn(a.min(b)).max(0.0),
                hi: up(a.max(b)),
            });
        }
        let c = [
            self.lo.powf(e.lo),
            self.lo.powf(e.hi),
            self.hi.powf(e.lo),
            self.hi.powf(e.hi),
        ];
        let (lo, hi) = min_max4(c);
        Ok(Interval {
            lo: dn(lo).max(0.0),
            hi: up(hi),
        })
    }

    /// `self^r` for a binary64 exponent.
    pub fn powf(self, r: f64) -> Interval {
        self.pow(Interval::point(r))
    }

    /// Integer power by repeated multiplication.
    pub fn powi(self, n: i32) -> Interval {
        if n < 0 {
            return Interval::ONE / self.powi(-n);
        }
        let mut result = Interval::ONE;
        let mut base = self;
        let mut k = n as u32;
        // Even powers are nonnegative; squaring keeps that visible.
        while k > 0 {
            if k & 1 == 1 {
                result = if result == Interval::ONE {
                    base
                } else {
                    result * base
                };
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        result
    }
}

#[inline(always)]
fn min_max4(v: [f64; 4]) -> (f64, f64) {
    let lo = v[0].min(v[1]).min(v[2].min(v[3]));
    let hi = v[0].max(v[1]).max(v[2].max(v[3]));
    (lo, hi)
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: dn(self.lo + rhs.lo),
            hi: up(self.hi + rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: dn(self.lo - rhs.hi),
            hi: up(self.hi - rhs.lo),
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        if self.lo >= 0.0 && rhs.lo >= 0.0 {
            return Interval {
                lo: dn(self.lo * rhs.lo).max(0.0),
                hi: up(self.hi * rhs.hi),
            };
        }
        let (lo, hi) = min_max4([
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ]);
        Interval {
            lo: dn(lo),
            hi: up(hi),
        }
    }
}

/// Division for denominators known to exclude zero. Panics otherwise; use
/// [`Interval::checked_div`] on untrusted input.
impl Div for Interval {
    type Output = Interval;
    #[inline]
    fn div(self, rhs: Interval) -> Interval {
        match self.checked_div(rhs) {
            Ok(q) => q,
            Err(e) => panic!("{e}"),
        }
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for Interval {
            type Output = Interval;
            #[inline]
            fn $m(self, rhs: f64) -> Interval {
                $tr::$m(self, Interval::point(rhs))
            }
        }
        impl $tr<Interval> for f64 {
            type Output = Interval;
            #[inline]
            fn $m(self, rhs: Interval) -> Interval {
                $tr::$m(Interval::point(self), rhs)
            }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign for Interval {
    #[inline]
    fn add_assign(&mut self, rhs: Interval) {
        *self = *self + rhs;
    }
}

impl SubAssign for Interval {
    #[inline]
    fn sub_assign(&mut self, rhs: Interval) {
        *self = *self - rhs;
    }
}

impl MulAssign for Interval {
    #[inline]
    fn mul_assign(&mut self, rhs: Interval) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        let mut acc = BlockSum::new();
        for x in iter {
            acc.add(x);
        }
        acc.total()
    }
}

/// Interval accumulator that adds terms into fixed-size blocks before
/// folding them into the running total. The block partial sums are small
/// relative to the total, which keeps the outward-rounding drift of long
/// sums low; the fold order is fixed, so results are reproducible.
#[derive(Clone, Copy, Debug)]
pub struct BlockSum {
    total: Interval,
    block: Interval,
    count: u32,
}

impl BlockSum {
    /// Terms per block.
    pub const BLOCK: u32 = 1 << 16;

    pub fn new() -> Self {
        BlockSum {
            total: Interval::ZERO,
            block: Interval::ZERO,
            count: 0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: Interval) {
        self.block += x;
        self.count += 1;
        if self.count == Self::BLOCK {
            self.flush();
        }
    }

    #[inline]
    pub fn flush(&mut self) {
        if self.count > 0 {
            self.total += self.block;
            self.block = Interval::ZERO;
            self.count = 0;
        }
    }

    /// Current value of the sum.
    pub fn total(&self) -> Interval {
        if self.count > 0 {
            self.total + self.block
        } else {
            self.total
        }
    }
}

impl Default for BlockSum {
    fn default() -> Self {
        Self::new()
    }
}

/// The elementary functions available through [`elementary`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Elementary {
    Log,
    Exp,
    Sqrt,
    /// `x ↦ x^r` for a real exponent enclosed by the interval.
    Pow(Interval),
}

/// Checked evaluation of an elementary function on an interval.
pub fn elementary(x: Interval, f: Elementary) -> Result<Interval, IntervalError> {
    match f {
        Elementary::Log => x.try_ln(),
        Elementary::Exp => Ok(x.exp()),
        Elementary::Sqrt => x.try_sqrt(),
        Elementary::Pow(r) => x.try_pow(r),
    }
}

/// Fundamental constants as validated enclosures.
pub mod consts {
    use super::Interval;

    /// π: `std::f64::consts::PI` is the binary64 value just below π.
    pub const PI: Interval = Interval {
        lo: std::f64::consts::PI,
        hi: 3.1415926535897936,
    };

    /// e: the binary64 value 2.718281828459045 lies below e.
    pub const E: Interval = Interval {
        lo: std::f64::consts::E,
        hi: 2.7182818284590455,
    };

    /// Euler's constant 0.5772156649015328606065120900824024310421…
    pub const EULER_GAMMA: Interval = Interval {
        lo: 0.5772156649015328,
        hi: 0.5772156649015329,
    };

    /// log 2 = 0.693147180559945309417…
    pub const LN_2: Interval = Interval {
        lo: 0.6931471805599453,
        hi: 0.6931471805599454,
    };

    /// log 10 = 2.302585092994045684017…
    pub const LN_10: Interval = Interval {
        lo: 2.302585092994045,
        hi: 2.3025850929940459,
    };

    /// √2 = 1.414213562373095048801…
    pub const SQRT_2: Interval = Interval {
        lo: 1.4142135623730950,
        hi: 1.4142135623730951,
    };

    pub fn pi() -> Interval {
        PI
    }

    pub fn pi_sq() -> Interval {
        PI.sqr()
    }

    /// ζ(2) = π²/6.
    pub fn zeta2() -> Interval {
        PI.sqr() / 6.0
    }

    /// ζ(4) = π⁴/90.
    pub fn zeta4() -> Interval {
        PI.powi(4) / 90.0
    }

    /// ζ(6) = π⁶/945.
    pub fn zeta6() -> Interval {
        PI.powi(6) / 945.0
    }

    /// 6/π², the density of squarefree integers.
    pub fn six_over_pi_sq() -> Interval {
        6.0 / PI.sqr()
    }

    /// θ = 1 − 1/log(10¹²) = 1 − 1/(12 log 10).
    pub fn theta() -> Interval {
        1.0 - 1.0 / (12.0 * LN_10)
    }
}

/// Look up a fundamental constant by name.
pub fn const_catalog(id: &str) -> Result<Interval, IntervalError> {
    Ok(match id {
        "pi" => consts::PI,
        "e" => consts::E,
        "gamma" => consts::EULER_GAMMA,
        "log2" => consts::LN_2,
        "log10" => consts::LN_10,
        "sqrt2" => consts::SQRT_2,
        "theta" => consts::theta(),
        "zeta2" => consts::zeta2(),
        _ => return Err(IntervalError::UnknownConstant(id.to_string())),
    })
}
