//! The JSON produced behind the exported functions, checked natively.

use esieve_web::{constant_json, mobius_json, sigma_json, MAX_WEB_CUTOFF};
use selberg_explicit::Error;

#[test]
fn constant_at_browser_cutoff_contains_reference() {
    let r = constant_json("twin_inverse", 100_000).unwrap();
    let (lo, hi) = (r["lo"].as_f64().unwrap(), r["hi"].as_f64().unwrap());
    assert!(lo <= 0.660161816820513 && hi >= 0.660161800282638, "[{lo}, {hi}]");
    assert!(matches!(constant_json("twin_inverse", MAX_WEB_CUTOFF + 1), Err(Error::Resource(_))));
    assert!(matches!(constant_json("nope", 1000), Err(Error::Domain(_))));
}

#[test]
fn sigma_and_mobius() {
    let s = sigma_json(2.0, 1).unwrap();
    let want = 2f64.ln().powi(2);
    assert!(s["lo"].as_f64().unwrap() <= want * (1.0 + 1e-15) && s["hi"].as_f64().unwrap() >= want * (1.0 - 1e-15));
    assert!(sigma_json(1e4, 1).is_err());
    let m = mobius_json("m", 3.0, 1).unwrap();
    assert!((m["lo"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
    assert!(mobius_json("m_bogus", 3.0, 1).is_err());
}
