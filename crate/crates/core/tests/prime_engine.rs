//! The segmented sieve against trial division and textbook values.

use proptest::prelude::*;
use selberg_explicit::interval::consts;
use selberg_explicit::primes::{coprime_filter, mobius, mult_value, sieve_segment, ArithTable};
use selberg_explicit::{Error, Interval};

/// μ(n) by trial division, independent of the sieve.
fn mu_trial(mut n: u64) -> i8 {
    let mut sign = 1i8;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn same_fields(a: &ArithTable, b: &ArithTable, lo: u64, hi: u64) {
    for n in lo..hi {
        assert_eq!(a.mu(n), b.mu(n), "mu({n})");
        assert_eq!(a.is_prime(n), b.is_prime(n), "prime({n})");
        assert_eq!(a.is_squarefree(n), b.is_squarefree(n), "squarefree({n})");
        assert_eq!(a.lpf(n), b.lpf(n), "lpf({n})");
        assert_eq!(a.primes_of(n), b.primes_of(n), "primes_of({n})");
    }
}

#[test]
fn textbook_mobius_values() {
    let t = sieve_segment(1, 11).unwrap();
    let mu: Vec<i8> = (1..=10).map(|n| t.mu(n)).collect();
    assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    assert_eq!(sieve_segment(1, 31).unwrap().mu(30), -1);
}

#[test]
fn sieve_matches_trial_division() {
    let t = sieve_segment(1, 20_001).unwrap();
    for n in 1..=20_000u64 {
        assert_eq!(t.mu(n), mu_trial(n), "n = {n}");
        assert_eq!(t.mu(n), mobius(n));
        assert_eq!(t.mu(n) == 0, !t.is_squarefree(n));
    }
    // A segment far from the origin.
    let lo = 999_000_000;
    let t = sieve_segment(lo, lo + 2000).unwrap();
    for n in lo..lo + 2000 {
        assert_eq!(t.mu(n), mu_trial(n), "n = {n}");
    }
}

#[test]
fn squarefree_count_to_a_million() {
    let t = sieve_segment(1, 1_000_001).unwrap();
    let count = (1..=1_000_000u64).filter(|&n| t.is_squarefree(n)).count();
    // Independent count by inclusion–exclusion: Σ_d μ(d) ⌊N/d²⌋.
    let n = 1_000_000i64;
    let oracle: i64 = (1..=1000i64).map(|d| mu_trial(d as u64) as i64 * (n / (d * d))).sum();
    assert_eq!(count as i64, oracle);
    assert_eq!(count, 607_926);
    assert!((count as f64 / 1e6 - consts::six_over_pi_sq().mid()).abs() < 0.001);
}

#[test]
fn mertens_smoke_bound() {
    let t = sieve_segment(1, 1_000_001).unwrap();
    let mut m = 0i64;
    for n in 1..=1_000_000u64 {
        m += t.mu(n) as i64;
        assert!((m.abs() as f64) <= (n as f64).sqrt(), "M({n}) = {m}");
    }
}

#[test]
fn segments_concatenate() {
    let whole = sieve_segment(1, 30_001).unwrap();
    for (lo, hi) in [(1u64, 7_777u64), (7_777, 20_000), (20_000, 30_001)] {
        let part = sieve_segment(lo, hi).unwrap();
        same_fields(&part, &whole, lo, hi);
    }
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seg.bin");
    let t = sieve_segment(5_000, 9_000).unwrap();
    t.write_cache(&path).unwrap();
    let back = ArithTable::read_cache(&path).unwrap();
    assert_eq!((back.lo(), back.hi()), (5_000, 9_000));
    same_fields(&t, &back, 5_000, 9_000);
    std::fs::write(&path, b"garbage").unwrap();
    assert!(matches!(ArithTable::read_cache(&path), Err(Error::Format(_))));
}

#[test]
fn invalid_ranges() {
    assert!(matches!(sieve_segment(0, 10), Err(Error::Domain(_))));
    assert!(sieve_segment(10, 10).is_err());
    assert!(sieve_segment(1, 1_000_000_002).is_err());
}

#[test]
fn multiplicative_values() {
    let m6 = mult_value(6);
    assert_eq!((m6.phi, m6.kappa), (2, 12));
    let half = Interval::point(0.5);
    let p = mult_value(2).phi_s(half);
    assert!(p.contains(2f64.sqrt() - 1.0) || (p.mid() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    assert!((p.mid() - 0.414214).abs() < 1e-6);
    let one = mult_value(1);
    assert_eq!(one.phi_s(half), Interval::ONE);
    assert_eq!(one.kappa_s(Interval::point(0.3)), Interval::ONE);
    // At s = 1 the generalized values agree with the integers.
    for n in [12u64, 30, 97, 360] {
        let m = mult_value(n);
        assert!(m.phi_s(Interval::ONE).contains(m.phi as f64));
        assert!(m.kappa_s(Interval::ONE).contains(m.kappa as f64));
    }
}

#[test]
fn coprimality() {
    assert!(coprime_filter(9, 2));
    assert!(!coprime_filter(6, 2));
    for q in 1..50 {
        assert!(coprime_filter(1, q));
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplicative_on_coprime_pairs(a in 1u64..10_000, b in 1u64..10_000) {
        prop_assume!(gcd(a, b) == 1);
        prop_assert_eq!(mobius(a * b), mobius(a) * mobius(b));
        let (ma, mb, mab) = (mult_value(a), mult_value(b), mult_value(a * b));
        prop_assert_eq!(mab.kappa, ma.kappa * mb.kappa);
        prop_assert_eq!(mab.phi, ma.phi * mb.phi);
    }
}
