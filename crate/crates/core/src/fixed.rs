//! Exact fixed-point accumulation of interval sums.
//!
//! Long sums of interval terms lose accuracy because every interval
//! addition rounds outward. Here each term is converted once to the grid
//! `2^{−96} ℤ` (lower endpoint rounded down, upper rounded up) and the sums
//! are then exact `i128` additions. Each term costs at most `2^{−96}` extra
//! width, so a million terms add less than `10^{−22}`.

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Fractional bits of the fixed-point grid.
pub const FRAC_BITS: i32 = 96;
const SCALE: f64 = 79228162514264337593543950336.0; // 2^96
const INV_SCALE: f64 = 1.0 / SCALE;
/// Converted magnitudes must stay below 2^30; sums are overflow-checked.
const LIMIT: f64 = 1073741824.0;

/// An interval `[lo, hi] · 2^{−96}` with integer endpoints.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Fixed {
    pub lo: i128,
    pub hi: i128,
}

#[inline]
fn floor_scaled(x: f64) -> i128 {
    // Scaling by a power of two is exact; floor of an exact value is exact.
    (x * SCALE).floor() as i128
}

#[inline]
fn ceil_scaled(x: f64) -> i128 {
    (x * SCALE).ceil() as i128
}

/// Largest binary64 value ≤ v.
#[inline]
fn i128_down(v: i128) -> f64 {
    let f = v as f64;
    if (f as i128) > v {
        f.next_down()
    } else {
        f
    }
}

/// Smallest binary64 value ≥ v.
#[inline]
fn i128_up(v: i128) -> f64 {
    let f = v as f64;
    if (f as i128) < v {
        f.next_up()
    } else {
        f
    }
}

impl Fixed {
    pub const ZERO: Fixed = Fixed { lo: 0, hi: 0 };

    /// Outward conversion of an interval. Errors if a magnitude exceeds 2^30.
    #[inline]
    pub fn from_interval(x: Interval) -> Result<Fixed> {
        if !(x.lo.abs() < LIMIT && x.hi.abs() < LIMIT) {
            return Err(Error::Resource(format!(
                "fixed-point term {x} outside the supported magnitude 2^30"
            )));
        }
        Ok(Fixed {
            lo: floor_scaled(x.lo),
            hi: ceil_scaled(x.hi),
        })
    }

    /// Exact enclosure of an integer.
    pub fn from_int(n: i64) -> Fixed {
        let v = (n as i128) << FRAC_BITS;
        Fixed { lo: v, hi: v }
    }

    /// Outward conversion back to binary64 endpoints.
    #[inline]
    pub fn to_interval(self) -> Interval {
        Interval::new(i128_down(self.lo) * INV_SCALE, i128_up(self.hi) * INV_SCALE)
    }

    #[inline]
    pub fn checked_add(self, o: Fixed) -> Option<Fixed> {
        Some(Fixed {
            lo: self.lo.checked_add(o.lo)?,
            hi: self.hi.checked_add(o.hi)?,
        })
    }

    /// In-place sum; errors on `i128` overflow.
    #[inline]
    pub fn add_assign_checked(&mut self, o: Fixed) -> Result<()> {
        *self = self
            .checked_add(o)
            .ok_or_else(|| Error::Resource("fixed-point accumulator overflow".into()))?;
        Ok(())
    }

    #[inline]
    pub fn neg(self) -> Fixed {
        Fixed {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// Exact difference `self − o`.
    #[inline]
    pub fn sub(self, o: Fixed) -> Fixed {
        Fixed {
            lo: self.lo - o.hi,
            hi: self.hi - o.lo,
        }
    }

    /// Multiply by a small integer.
    #[inline]
    pub fn mul_int(self, k: i64) -> Fixed {
        let a = self.lo * k as i128;
        let b = self.hi * k as i128;
        Fixed {
            lo: a.min(b),
            hi: a.max(b),
        }
    }
}

/// `[⌊a·2^96/b⌋, ⌈a·2^96/b⌉]` exactly, for `a / b < 2^30` and `b < 2^96`.
pub fn fixed_ratio(a: u128, b: u128) -> Fixed {
    assert!(b > 0 && b < (1u128 << 96), "fixed_ratio denominator out of range");
    let mut q = a / b;
    assert!(q < (1u128 << 30), "fixed_ratio quotient out of range");
    let mut r = a % b;
    for _ in 0..3 {
        r <<= 32;
        q = (q << 32) | (r / b);
        r %= b;
    }
    let lo = q as i128;
    Fixed {
        lo,
        hi: lo + (r != 0) as i128,
    }
}

/// An exact decimal constant `m · 10^{−k}`, parsed from a string such as
/// `"16.7682417501771"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decimal {
    pub mantissa: i128,
    pub exponent: u32,
}

impl Decimal {
    pub fn parse(s: &str) -> Result<Decimal> {
        let s = s.trim();
        let bad = || Error::Format(format!("not a plain decimal: `{s}`"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 30 {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let m: i128 = digits.parse().map_err(|_| bad())?;
        Ok(Decimal {
            mantissa: if neg { -m } else { m },
            exponent: frac.len() as u32,
        })
    }

    /// Enclosure as an interval.
    pub fn to_interval(self) -> Interval {
        let m = Interval::new(i128_down(self.mantissa), i128_up(self.mantissa));
        m / Interval::point(10f64.powi(self.exponent as i32))
    }
}
