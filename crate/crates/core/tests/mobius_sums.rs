//! The m-family, weighted sums and scans against brute-force enumeration and
//! exact identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selberg_explicit::euler::{default_catalog, zeta_point};
use selberg_explicit::interval::consts;
use selberg_explicit::mobius::{integral_m_check, m_family, threshold_scan, weighted_sum, MKind, Weight};
use selberg_explicit::primes::mobius;
use selberg_explicit::{Error, Interval};

/// `Σ_{n≤X,(n,q)=1} μ(n)/n · log^k(X/n)` in plain binary64.
fn brute(x: f64, q: u64, k: i32) -> f64 {
    (1..=x.floor() as u64)
        .filter(|&n| num_integer::gcd(n, q) == 1)
        .map(|n| mobius(n) as f64 / n as f64 * (x / n as f64).ln().powi(k))
        .sum()
}

#[test]
fn m_family_examples() {
    let c = m_family(MKind::MCheck, 1.0, 1).unwrap();
    assert!(c.contains(0.0) && c.width() < 1e-20);
    let m = m_family(MKind::M, 3.0, 1).unwrap();
    assert!(m.contains(1.0 / 6.0) || (m.mid() - 1.0 / 6.0).abs() < 1e-15);
    let cc = m_family(MKind::MCheckCheck, 3.0, 1).unwrap();
    let want = 3f64.ln().powi(2) - 0.5 * 1.5f64.ln().powi(2);
    assert!((cc.mid() - want).abs() < 1e-14 && (want - 1.124748).abs() < 1e-6);
    let t = m_family(MKind::MTilde, 4.0, 1).unwrap();
    let want = 4f64.ln() - 2f64.ln() / 3.0 - (4.0f64 / 3.0).ln() / 4.0;
    assert!((t.mid() - want).abs() < 1e-14 && (want - 1.08332).abs() < 1e-5);
    assert!(matches!(m_family(MKind::M, 2e8, 1), Err(Error::Resource(_))));
}

#[test]
fn m_family_matches_brute_force() {
    for &(x, q) in &[(10.5, 1u64), (99.0, 2), (1000.0, 3), (2345.6, 6)] {
        for (kind, k) in [(MKind::M, 0), (MKind::MCheck, 1), (MKind::MCheckCheck, 2)] {
            let v = m_family(kind, x, q).unwrap();
            let b = brute(x, q, k);
            assert!((v.mid() - b).abs() < 1e-9 * (1.0 + b.abs()), "{kind:?} X={x} q={q}: {v} vs {b}");
        }
    }
}

#[test]
fn integral_identity() {
    // ∫_1^X m̌_q(s) ds/s = ½ m̌̌_q(X), and likewise for m̃, m̃̃.
    for x in [10.0, 100.0, 1000.0] {
        for q in [1u64, 2, 3] {
            let lhs = integral_m_check(x, q, false).unwrap();
            let rhs = m_family(MKind::MCheckCheck, x, q).unwrap() / 2.0;
            assert!(lhs.intersects(rhs), "check X={x} q={q}: {lhs} vs {rhs}");
            let lhs = integral_m_check(x, q, true).unwrap();
            let rhs = m_family(MKind::MTildeTilde, x, q).unwrap() / 2.0;
            assert!(lhs.intersects(rhs), "tilde X={x} q={q}: {lhs} vs {rhs}");
        }
    }
}

/// The divisors of `q^∞` up to `limit`.
fn smooth_divisors(q: u64, limit: u64) -> Vec<u64> {
    let primes: Vec<u64> = (2..=q).filter(|&p| q % p == 0 && (2..p).all(|r| p % r != 0)).collect();
    let mut out = vec![1u64];
    for p in primes {
        let mut next = Vec::new();
        for &d in &out {
            let mut e = d;
            while e <= limit {
                next.push(e);
                e *= p;
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

#[test]
fn coprimality_unfolding_identity() {
    // Σ_{n≤X,(n,q)=1} μ(n) h(n)/n = Σ_{d|q^∞, d≤X} (1/d) Σ_{n≤X/d} μ(n) h(dn)/n
    // with h(n) = log^k(X/n).
    for q in [2u64, 6] {
        for x in [37.0, 500.0, 9999.5] {
            for (kind, k) in [(MKind::M, 0), (MKind::MCheck, 1), (MKind::MCheckCheck, 2)] {
                let lhs = m_family(kind, x, q).unwrap();
                let mut rhs = Interval::ZERO;
                for d in smooth_divisors(q, x.floor() as u64) {
                    let y = x / d as f64;
                    if y >= 1.0 {
                        rhs += m_family(kind, y, 1).unwrap() / Interval::from_u64(d);
                    }
                }
                assert!(lhs.intersects(rhs), "q={q} X={x} k={k}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn check_function_literature_bound() {
    // |m̌(X) − 1| ≤ 1/√X.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut xs: Vec<f64> = vec![1.5, 2.0, 3.0, 10.0, 100.0, 1e6];
    xs.extend((0..24).map(|_| 10f64.powf(rng.gen_range(0.2..6.0))));
    for x in xs {
        let d = (m_family(MKind::MCheck, x, 1).unwrap() - 1.0).abs();
        let bound = Interval::point(x).sqrt().recip().unwrap();
        assert!(d.hi <= bound.hi, "X={x}: |m̌−1| = {d} > {bound}");
    }
}

#[test]
fn double_tilde_main_term() {
    // |m̃̃₁(X) − 2ζ(2)(log X − 𝔞₁)| ≤ 4 e^{γ/2−1} P_{1/2}/√X for X < 10^{12},
    // 𝔞₁ = Σ_p log p/(p(p−1)) + γ, P_{1/2} = ζ(3/2) ∏_p (1+1/((√p−1)(p+1)))(1−p^{−3/2}).
    let cat = default_catalog();
    let g = consts::EULER_GAMMA;
    let a1 = cat.total("mertens_log") + g;
    let p_half = zeta_point(Interval::point(1.5)).unwrap() * cat.total("delta_half_reduced");
    let c = 4.0 * (g / 2.0 - 1.0).exp() * p_half;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..12 {
        let x = 10f64.powf(rng.gen_range(3.0..6.0));
        let tt = m_family(MKind::MTildeTilde, x, 1).unwrap();
        let main = 2.0 * consts::zeta2() * (Interval::point(x).ln() - a1);
        let err = (tt - main).abs();
        let env = c / Interval::point(x).sqrt();
        assert!(err.hi <= env.hi, "X={x}: {err} vs {env}");
    }
}

#[test]
fn weighted_sum_examples() {
    let s = weighted_sum(Weight::InvL, 10.0, 1, 0, None).unwrap();
    let want = 1.0 + 0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 6.0 + 1.0 / 7.0 + 0.1;
    assert!((s.mid() - want).abs() < 1e-14 && (want - 2.442857).abs() < 1e-6);
    let nu = weighted_sum(Weight::Nu, 1.0, 1, 0, None).unwrap();
    assert!(nu.contains(1.0) && nu.width() < 1e-20);
    let p = weighted_sum(Weight::InvPhi, 5.0, 2, 0, None).unwrap();
    assert!(p.contains(1.75) || (p.mid() - 1.75).abs() < 1e-15);
    // With a log: Σ_{ℓ≤6} μ²(ℓ)/ℓ log(6/ℓ).
    let l = weighted_sum(Weight::InvL, 6.0, 1, 1, None).unwrap();
    let want: f64 = [1u64, 2, 3, 5, 6].iter().map(|&n| (6.0 / n as f64).ln() / n as f64).sum();
    assert!((l.mid() - want).abs() < 1e-14);
}

#[test]
fn scans_stay_below_program_constants() {
    let r = threshold_scan("sq_half", 1, 10.0, 1e5, Some("1.4256628496167")).unwrap();
    assert_eq!(r.certified, Some(true), "{r:?}");
    assert!(r.bound.hi <= 1.4256628496167);
    let r = threshold_scan("sumvar1log", 2, 10.0, 1e5, Some("0.694356698566237")).unwrap();
    assert_eq!(r.certified, Some(true), "{r:?}");
}

#[test]
fn degenerate_scan_is_a_point_evaluation() {
    let x0 = 1234.5;
    let r = threshold_scan("sq_half", 1, x0, x0, None).unwrap();
    let direct = weighted_sum(Weight::SqrtPhiHalf, x0, 1, 1, None).unwrap() / Interval::point(x0).ln().sqr();
    assert!(r.bound.intersects(direct), "{} vs {direct}", r.bound);
    assert!(r.bound.hi - direct.lo < 1e-9);
    assert!(matches!(threshold_scan("sq_half", 1, 10.0, 2e6, None), Err(Error::Resource(_))));
}
