//! The kernel h_q: pointwise routes, the moment sweep against the per-divisor
//! integral, kernel bounds and tails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selberg_explicit::hq::{
    hq_eval, hq_eval_identity, hq_integral, hq_integral_with, hq_tail_bound, kernel_bound, sv_constant, sv_stored,
    sweep_segment, SweepOptions, SweepState,
};
use selberg_explicit::interval::consts;
use selberg_explicit::Error;

#[test]
fn value_at_one_is_zeta_two() {
    let h = hq_eval(1.0, 1).unwrap();
    assert!(h.contains_interval(consts::zeta2()) || h.intersects(consts::zeta2()), "{h}");
    assert!(h.contains(std::f64::consts::PI.powi(2) / 6.0));
    assert!(h.width() < 1e-12);
}

#[test]
fn pointwise_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let s = rng.gen_range(1.0..5000.0);
        for v in [1u64, 2] {
            let a = hq_eval(s, v).unwrap();
            let b = hq_eval_identity(s, v).unwrap();
            assert!(a.intersects(b), "s={s} v={v}: {a} vs {b}");
        }
    }
}

#[test]
fn sweep_state_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for v in [1u64, 2] {
        let mut points: Vec<f64> = (0..50).map(|_| rng.gen_range(1.0..1e4)).collect();
        points.sort_by(f64::total_cmp);
        let mut state = SweepState::new(1e4, v).unwrap();
        for s in points {
            state.advance_to(s, false).unwrap();
            let sweep = state.h_current();
            let direct = hq_eval(s, v).unwrap();
            assert!(sweep.intersects(direct), "s={s} v={v}: {sweep} vs {direct}");
        }
    }
}

#[test]
fn integral_is_additive_across_routes() {
    // Per-divisor integral on [1, a] plus the moment sweep on [a, b] against
    // the per-divisor integral on [1, b].
    for v in [1u64, 2] {
        let a = hq_integral(1e3, v).unwrap().value;
        let ab = sweep_segment(1e3, 1e4, v).unwrap();
        let b = hq_integral(1e4, v).unwrap().value;
        assert!((a + ab).intersects(b), "v={v}: {a} + {ab} vs {b}");
        // And the sweep from 1 on its own.
        let whole = sweep_segment(1.0, 1e4, v).unwrap();
        assert!(whole.intersects(b), "v={v}: {whole} vs {b}");
    }
}

#[test]
fn empty_integral_is_zero() {
    for v in [1u64, 2] {
        let i = hq_integral(1.0, v).unwrap();
        assert!(i.value.contains(0.0) && i.value.width() < 1e-15);
    }
    assert!(matches!(hq_integral(2e8, 1), Err(Error::Resource(_))));
    assert!(matches!(hq_integral(0.5, 1), Err(Error::Domain(_))));
}

#[test]
fn kernel_bound_conformance() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut points = vec![1.0, 2.0, 10.0, 50.0, 500.0, 1e4];
    points.extend((0..40).map(|_| 10f64.powf(rng.gen_range(0.0..5.0))));
    for v in [1u64, 2] {
        for &s in &points {
            let h = hq_eval(s, v).unwrap().abs();
            let b = kernel_bound(s, v).unwrap();
            assert!(h.hi <= b.hi, "s={s} v={v}: |h| = {h} > {b}");
        }
    }
    // The v = 2 table entries as printed.
    for s in [50.0f64, 500.0] {
        let h = hq_eval(s, 2).unwrap().abs();
        assert!(h.hi <= (4.99703 * s.ln() + 9.57182) / s);
    }
}

#[test]
fn tail_bounds() {
    let t = hq_tail_bound(1e12, 1).unwrap();
    assert!(t.hi <= 0.000033536 / (12.0 * 10f64.ln()) * (1.0 + 1e-12));
    assert!(hq_tail_bound(20.0, 2).unwrap().hi >= hq_tail_bound(100.0, 2).unwrap().hi);
    assert!(hq_tail_bound(20.0, 2).unwrap().is_finite());
    // Ψ′₁ Ω + 2 T₁⁽⁴⁾/log(10¹²) at X = 10⁸.
    let (x, big) = (1e8f64, 1e12f64);
    let psi = 3.83717 + 4.89606 / x.ln();
    let omega = x.ln() / x - big.ln() / big + 1.0 / x - 1.0 / big;
    let want = psi * omega + 2.0 * 0.000033536 / big.ln();
    let t = hq_tail_bound(x, 1).unwrap();
    assert!((t.mid() - want).abs() < 1e-12 * want, "{t} vs {want}");
    assert!(hq_tail_bound(10.0, 1).is_err());
}

#[test]
fn checkpoint_resume_gives_the_same_integral() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hq.ckpt");
    let x = 2e4;
    let plain = hq_integral(x, 2).unwrap();
    let opts = SweepOptions {
        checkpoint: Some(path.clone()),
        checkpoint_every: 0,
        max_events: plain.events / 3,
    };
    assert!(matches!(hq_integral_with(x, 2, &opts), Err(Error::Resource(_))));
    assert!(path.exists());
    let resumed = hq_integral_with(
        x,
        2,
        &SweepOptions {
            checkpoint: Some(path.clone()),
            ..SweepOptions::default()
        },
    )
    .unwrap();
    assert!(resumed.resumed);
    assert_eq!(resumed.events, plain.events);
    assert!(resumed.value.intersects(plain.value));
    assert!((resumed.value.mid() - plain.value.mid()).abs() < 1e-12);
    // A checkpoint for another modulus is refused.
    assert!(matches!(
        hq_integral_with(x, 1, &SweepOptions { checkpoint: Some(path), ..SweepOptions::default() }),
        Err(Error::Config(_))
    ));
}

#[test]
fn sv_at_a_million_contains_the_stored_value() {
    for v in [1u64, 2] {
        let wide = sv_constant(v, 1e6).unwrap();
        let stored = sv_stored(v).unwrap();
        assert!(wide.intersects(stored), "v={v}: {wide} vs {stored}");
        assert!(wide.width() >= stored.width());
    }
    let s1 = sv_constant(1, 1e6).unwrap();
    assert!((s1.mid() - 0.60731).abs() < 1e-3, "{s1}");
    assert!(sv_constant(1, 1e5).is_err());
}

#[test]
fn stored_sv_values() {
    let s1 = sv_stored(1).unwrap();
    let s2 = sv_stored(2).unwrap();
    assert!(s1.lo > 0.60731 && s1.hi < 0.60732, "{s1}");
    assert!(s2.lo > 1.4728 && s2.hi < 1.4729, "{s2}");
    // 𝔰₁ = γ − (6/π²) ∫ h₁/s, so it is within the kernel integral's reach of γ.
    assert!((s1 - consts::EULER_GAMMA).abs().hi < 0.05);
}
