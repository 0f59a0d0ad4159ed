//! Prime products and sums: published enclosures, ζ identities and local
//! factors evaluated by hand.

use selberg_explicit::euler::{
    catalog, default_catalog, delta_input, eval_catalog, eval_catalog_all, local_factor_product, local_factor_sum,
    zeta_point, zeta_sandwich, Kind, Rational, SignMode,
};
use selberg_explicit::interval::consts;
use selberg_explicit::{Error, Interval};

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi)
}

#[test]
fn zeta_values() {
    let z2 = zeta_point(Interval::point(2.0)).unwrap();
    assert!(z2.intersects(consts::zeta2()) && (z2.mid() - 1.6449340668).abs() < 1e-10);
    assert!(z2.width() < 1e-10);
    let z32 = zeta_point(Interval::point(1.5)).unwrap();
    // ζ(3/2) = 2.612375348685488343…
    assert!(z32.contains(2.612375348685488), "{z32}");
    // The crude integral sandwich with many more terms must agree.
    let s = zeta_sandwich(Interval::point(1.5), 2_000_000).unwrap();
    assert!(s.contains_interval(Interval::point(2.612375348685488)) && s.intersects(z32));
    let z4 = zeta_point(Interval::point(4.0)).unwrap();
    assert!(z4.intersects(consts::zeta4()));
    assert!(zeta_point(Interval::point(1.001)).is_err());
}

#[test]
fn f_constant_is_zeta_ratio() {
    let f = default_catalog().total("F_prod");
    let ratio = zeta_point(Interval::point(1.5)).unwrap() / zeta_point(Interval::point(3.0)).unwrap();
    assert!(f.intersects(ratio), "{f} vs {ratio}");
}

#[test]
fn published_enclosures() {
    let cat = default_catalog();
    for (id, lo, hi) in [
        ("I_prod", 1.94359643387259, 1.94359649909918),
        ("twin_inverse", 0.660161800282638, 0.660161816820513),
        ("mertens_log", 0.755366607315099, 0.755366626776258),
        ("b_log", 1.13992197915589, 1.13992201807822),
        ("D_prod", 15.0333977306198, 15.0337644348976),
    ] {
        let t = cat.total(id);
        assert!(t.intersects(iv(lo, hi)), "{id}: {t} vs [{lo}, {hi}]");
        assert!(t.is_finite());
    }
}

#[test]
fn i_product_matches_zeta_identity() {
    // ∏_p (1 + 1/(p(p−1))) = ζ(2)ζ(3)/ζ(6).
    let z = |s: f64| zeta_point(Interval::point(s)).unwrap();
    let identity = z(2.0) * z(3.0) / z(6.0);
    let t = eval_catalog("I_prod", None).unwrap().total;
    let widened = Interval::new(
        t.lo - 4.0 * f64::EPSILON * t.lo.abs(),
        t.hi + 4.0 * f64::EPSILON * t.hi.abs(),
    );
    assert!(widened.contains_interval(identity), "{t} vs {identity}");
    assert!(t.width() < 1e-7);
}

#[test]
fn twin_square_matches_identity() {
    // ∏_p (1 + 1/(p−1)²) = Σ_n μ²(n)/φ(n)² by multiplicativity. A partial sum
    // of positive terms is a lower bound, and the omitted tail is O(1/N).
    let t = eval_catalog("twin_sq", Some(1_000_000)).unwrap().total;
    let n_max = 200_000u64;
    let table = selberg_explicit::primes::sieve_segment(1, n_max + 1).unwrap();
    let mut s = 0.0f64;
    for n in 1..=n_max {
        if table.is_squarefree(n) {
            let phi = table.phi_squarefree(n) as f64;
            s += 1.0 / (phi * phi);
        }
    }
    assert!(t.hi >= s, "{t} vs partial {s}");
    assert!(t.mid() - s < 1e-3, "{t} vs partial {s}");
}

#[test]
fn larger_cutoff_never_widens_nonnegative_products() {
    let small = eval_catalog_all(100_000).unwrap();
    let large = eval_catalog_all(400_000).unwrap();
    for spec in catalog() {
        let (a, b) = (small.total(spec.id), large.total(spec.id));
        assert!(a.intersects(b), "{}: {a} vs {b}", spec.id);
        if spec.kind == Kind::Product && spec.sign == SignMode::Nonnegative {
            assert!(b.width() <= a.width() * (1.0 + 1e-9), "{}: {a} vs {b}", spec.id);
        }
    }
}

#[test]
fn catalog_tails_are_reported() {
    let t = eval_catalog("twin_inverse", Some(50_000)).unwrap();
    assert_eq!(t.cutoff, 50_000);
    assert!(t.total.contains_interval(t.partial) || t.total.intersects(t.partial));
    assert!(t.tail_width() > 0.0);
    assert!(matches!(eval_catalog("no_such_constant", None), Err(Error::Domain(_))));
}

#[test]
fn local_factors_by_hand() {
    assert_eq!(local_factor_product("p_alpha_half", 1).unwrap(), Interval::ONE);
    let r2 = 2f64.sqrt();
    let p = local_factor_product("p_alpha_half", 2).unwrap();
    assert!((p.mid() - (1.0 + r2 / (3.0 - r2))).abs() < 1e-14 && (p.mid() - 1.8918).abs() < 1e-4);
    // A₂ = 1.
    assert!(local_factor_product("A_q", 2).unwrap().contains(1.0));
    // A₃ = 1 + 1/(3√3 − 3 − √3 + 2).
    let r3 = 3f64.sqrt();
    let a3 = local_factor_product("A_q", 3).unwrap();
    assert!((a3.mid() - (1.0 + 1.0 / (3.0 * r3 - 3.0 - r3 + 2.0))).abs() < 1e-14);
    // Σ_{p|6} log p/(p−1) = log 2 + log 3 / 2.
    let m = local_factor_sum("mertens_q", 6).unwrap();
    assert!((m.mid() - (2f64.ln() + 3f64.ln() / 2.0)).abs() < 1e-14);
    assert_eq!(local_factor_sum("mertens_q", 1).unwrap(), Interval::ZERO);
}

#[test]
fn delta_input_cases() {
    let g = consts::EULER_GAMMA;
    let one = Rational::from_integer(1);
    let a11 = delta_input(one, one).unwrap();
    assert!(a11.intersects(g) && (a11.mid() - 0.57722).abs() < 1e-5);
    let third = Rational::new(1, 3);
    let a = delta_input(one, third).unwrap();
    let other = 3.0 * (-(0.5772156649015329 / 3.0) - 1.0f64).exp();
    assert!((a.mid() - other.max(0.5772156649015329)).abs() < 1e-13, "{a}");
    assert!(matches!(
        delta_input(Rational::from_integer(2), Rational::from_integer(5)),
        Err(Error::Domain(_))
    ));
}
