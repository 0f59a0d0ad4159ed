//! Interval arithmetic checked against exact rational arithmetic and
//! rational series for `log` and `exp`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rational::*;
use proptest::prelude::*;
use selberg_explicit::interval::{const_catalog, consts, elementary, Elementary};
use selberg_explicit::Interval;

/// Minimal helpers over `BigRational` so the oracle needs no extra crates.
mod rational {
    use super::*;

    pub fn q(x: f64) -> BigRational {
        BigRational::from_float(x).expect("finite")
    }

    pub fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    pub fn encloses(iv: Interval, lo: &BigRational, hi: &BigRational) -> bool {
        q(iv.lo) <= *lo && *hi <= q(iv.hi)
    }
}

/// `[lo, hi]` bracketing `ln x` for rational `x ∈ [1/2, 2]` via
/// `ln x = 2 atanh((x−1)/(x+1))`.
fn ln_bracket(x: &BigRational) -> (BigRational, BigRational) {
    let y = (x - int(1)) / (x + int(1));
    let y2 = &y * &y;
    let mut term = y.clone();
    let mut sum = int(0);
    let n = 60;
    for k in 0..n {
        sum += &term / int(2 * k + 1);
        term *= &y2;
    }
    // Remainder: |Σ_{k≥n} y^{2k+1}/(2k+1)| ≤ |y|^{2n+1}/(1 − y²).
    let rem = (if term < int(0) { -term } else { term }) / (int(1) - y2);
    let two = int(2);
    (&two * (&sum - &rem), &two * (&sum + &rem))
}

/// `[lo, hi]` bracketing `exp x` for rational `|x| ≤ 1`.
fn exp_bracket(x: &BigRational) -> (BigRational, BigRational) {
    let mut term = int(1);
    let mut sum = int(0);
    let n = 40;
    for k in 0..n {
        sum += &term;
        term = term * x / int(k + 1);
    }
    // Remainder ≤ 3 |x|^n / n!.
    let rem = (if term < int(0) { -term } else { term }) * int(3);
    (&sum - &rem, &sum + &rem)
}

fn point(x: f64) -> Interval {
    Interval::point(x)
}

#[test]
fn arithmetic_examples() {
    let a = Interval::new(1.0, 2.0) + Interval::new(3.0, 4.0);
    assert!(a.contains_interval(Interval::new(4.0, 6.0)));
    // At most one outward rounding step per endpoint.
    assert!(a.lo >= 4f64.next_down() && a.hi <= 6f64.next_up());
    let m = Interval::new(-1.0, 2.0) * Interval::new(3.0, 4.0);
    assert!(m.contains(-4.0) && m.contains(8.0) && m.lo > -4.0 - 1e-14 && m.hi < 8.0 + 1e-14);
    let third = Interval::ONE / Interval::new(3.0, 3.0);
    assert!(encloses(third, &(int(1) / int(3)), &(int(1) / int(3))));
    let ulp = (1.0f64 / 3.0).next_up() - 1.0 / 3.0;
    // `width` itself rounds up.
    assert!(third.width() <= (2.0 * ulp).next_up());
}

#[test]
fn division_by_zero_interval_is_an_error() {
    assert!(Interval::ONE.checked_div(Interval::new(-1.0, 1.0)).is_err());
    assert!(Interval::new(0.0, 2.0).recip().is_err());
}

#[test]
fn elementary_examples() {
    let l = elementary(Interval::ONE, Elementary::Log).unwrap();
    assert!(l.contains(0.0) && l.width() <= f64::EPSILON);
    let s = elementary(point(4.0), Elementary::Sqrt).unwrap();
    assert!(s.contains(2.0));
    let theta = consts::theta();
    let p = elementary(point(2.0), Elementary::Pow(theta)).unwrap();
    // 2^θ with θ = 1 − 1/(12 ln 10): ln 2^θ = θ ln 2.
    let exact = (2f64.ln() * (1.0 - 1.0 / (12.0 * 10f64.ln()))).exp();
    assert!((p.mid() - exact).abs() < 1e-14, "{p}");
    assert!((p.mid() - 1.950452).abs() < 1e-6, "{p}");
    assert!(elementary(point(-1.0), Elementary::Log).is_err());
    assert!(elementary(point(-1.0), Elementary::Sqrt).is_err());
}

#[test]
fn constant_catalog() {
    let g = const_catalog("gamma").unwrap();
    assert!(g.contains(0.5772156649015328606));
    assert!(g.width() <= 4.0 * f64::EPSILON);
    // θ = 1 − 1/(12 ln 10) with ln 10 = 3 ln 2 + ln(5/4) from the series oracle.
    let (l2lo, l2hi) = ln_bracket(&int(2));
    let (l54lo, l54hi) = ln_bracket(&(int(5) / int(4)));
    let l10lo = int(3) * l2lo + l54lo;
    let l10hi = int(3) * l2hi + l54hi;
    let th_lo = int(1) - int(1) / (int(12) * &l10lo);
    let th_hi = int(1) - int(1) / (int(12) * &l10hi);
    let theta = const_catalog("theta").unwrap();
    assert!(encloses(theta, &th_lo, &th_hi), "{theta}");
    assert!((theta.mid() - 0.963801).abs() < 1e-5);
    let pi = const_catalog("pi").unwrap();
    assert!(pi.contains(std::f64::consts::PI) && pi.width() <= 4.0 * f64::EPSILON);
    assert!((pi.lo - 3.14159265358979).abs() < 1e-14);
    assert!(const_catalog("tau").is_err());
}

#[test]
fn hull_contains_width() {
    let h = Interval::new(0.0, 1.0).hull(Interval::new(2.0, 3.0));
    assert_eq!((h.lo, h.hi), (0.0, 3.0));
    assert!(Interval::new(0.0, 1.0).contains(0.5));
    assert_eq!(Interval::ONE.width(), 0.0);
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1.0..1.0f64, 1e-8..1e-3f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn basic_ops_enclose_exact_results(a in finite(), b in finite()) {
        let (x, y) = (point(a), point(b));
        let (qa, qb) = (q(a), q(b));
        let s = &qa + &qb;
        prop_assert!(encloses(x + y, &s, &s));
        let d = &qa - &qb;
        prop_assert!(encloses(x - y, &d, &d));
        let p = &qa * &qb;
        prop_assert!(encloses(x * y, &p, &p));
        if b != 0.0 {
            let r = &qa / &qb;
            prop_assert!(encloses(x / y, &r, &r));
        }
    }

    #[test]
    fn sqrt_encloses(a in 0.0..1e12f64) {
        let s = point(a).sqrt();
        prop_assert!(q(s.lo) * q(s.lo) <= q(a));
        prop_assert!(q(a) <= q(s.hi) * q(s.hi));
    }

    #[test]
    fn ln_encloses(a in 0.5..2.0f64) {
        let (lo, hi) = ln_bracket(&q(a));
        prop_assert!(encloses(point(a).ln(), &lo, &hi));
    }

    #[test]
    fn exp_encloses(a in -1.0..1.0f64) {
        let (lo, hi) = exp_bracket(&q(a));
        prop_assert!(encloses(point(a).exp(), &lo, &hi));
    }

    #[test]
    fn inclusion_monotone(a in -100.0..100.0f64, da in 0.0..5.0f64, b in 0.5..100.0f64, db in 0.0..5.0f64) {
        let x = Interval::new(a, a + da / 2.0);
        let xx = Interval::new(a - da, a + da);
        let y = Interval::new(b, b + db / 2.0);
        let yy = Interval::new(b, b + db);
        prop_assert!((xx + yy).contains_interval(x + y));
        prop_assert!((xx - yy).contains_interval(x - y));
        prop_assert!((xx * yy).contains_interval(x * y));
        prop_assert!((xx / yy).contains_interval(x / y));
        prop_assert!(yy.ln().contains_interval(y.ln()));
        prop_assert!(yy.sqrt().contains_interval(y.sqrt()));
    }
}
