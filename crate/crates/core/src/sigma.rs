//! The quadratic form `Σ_v(U)` and its residual against the asymptotic
//! `v/φ(v)·log U − 𝔰_v`.
//!
//! ```text
//! Σ_v(U) = Σ_{d,e ≤ U, (de,v)=1} μ(d)μ(e)/[d,e] · log(U/d) · log(U/e)
//! ```
//!
//! Two evaluations are available: the literal double sum (exact lcm, for
//! small U) and the decomposition
//!
//! ```text
//! Σ_v(U) = Σ_{ℓ≤U,(ℓ,v)=1} μ²(ℓ)/ℓ · Σ_{d≤U/ℓ,(d,ℓv)=1} μ(d)/d² · m̌_{ℓdv}(U/(ℓd))²,
//! ```
//!
//! which needs only prefix tables of `μ(n)/n` and `μ(n) log n / n`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::fixed::Fixed;
use crate::hq::sv_stored;
use crate::inputs::inputs;
use crate::interval::Interval;
use crate::mobius::{floor_div, MobiusPrefix};
use crate::primes::{mult_value, prime_divisors, sieve_segment, ArithTable};

/// Largest U for the pairwise sum.
pub const PAIRWISE_CAP: f64 = 2000.0;
/// Largest U for the decomposition.
pub const DECOMPOSITION_CAP: f64 = 1e6;

/// Evaluation method for `Σ_v(U)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pairwise,
    Decomposition,
}

impl Method {
    pub fn from_name(s: &str) -> Result<Method> {
        match s {
            "pairwise" => Ok(Method::Pairwise),
            "decomposition" => Ok(Method::Decomposition),
            _ => domain(format!("unknown method `{s}` (pairwise|decomposition)")),
        }
    }
}

/// One evaluation of `Σ_v(U)`.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaResult {
    #[serde(rename = "U")]
    pub u: f64,
    pub v: u64,
    pub value: Interval,
    pub method: Method,
    /// `Σ_v(U) − v/φ(v) log U + 𝔰_v` (v ∈ {1, 2} only).
    pub residual: Option<Interval>,
}

/// Outcome of [`residual_check`].
#[derive(Clone, Debug, Serialize)]
pub struct ResidualCheck {
    #[serde(rename = "U")]
    pub u: f64,
    pub v: u64,
    pub residual: Interval,
    /// `C_v U^{−1/3}`.
    pub bound: Interval,
    pub pass: bool,
}

fn check_args(u: f64, v: u64, cap: f64) -> Result<()> {
    if v == 0 {
        return domain("v must be positive");
    }
    if !(u > 1.0) || !u.is_finite() {
        return domain(format!("Σ_v(U) needs U > 1, got {u}"));
    }
    if u > cap {
        return Err(Error::Resource(format!("U = {u} exceeds the cap {cap:e} for this method")));
    }
    Ok(())
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The literal double sum. With `symmetric`, only `d ≤ e` is visited and
/// off-diagonal terms are doubled.
pub fn sigma_pairwise(u: f64, v: u64, symmetric: bool) -> Result<Interval> {
    check_args(u, v, PAIRWISE_CAP)?;
    let n = u.floor() as u64;
    let t = sieve_segment(1, n + 1)?;
    let ln_u = Interval::point(u).ln();
    let ds: Vec<(u64, i8, Interval)> = (1..=n)
        .filter(|&d| t.mu(d) != 0 && t.coprime_to(d, v))
        .map(|d| (d, t.mu(d), (ln_u - Interval::from_u64(d).ln()).max(Interval::ZERO)))
        .collect();
    let mut acc = Fixed::ZERO;
    for (i, &(d, mu_d, ld)) in ds.iter().enumerate() {
        let start = if symmetric { i } else { 0 };
        for &(e, mu_e, le) in &ds[start..] {
            let lcm = d / gcd(d, e) * e;
            let mut term = Interval::from_i64((mu_d * mu_e) as i64) / Interval::from_u64(lcm) * ld * le;
            if symmetric && e != d {
                term = term * 2.0;
            }
            acc.add_assign_checked(Fixed::from_interval(term)?)?;
        }
    }
    Ok(acc.to_interval())
}

/// Shared tables for repeated decomposition evaluations up to `u_max`.
pub struct SigmaEngine {
    u_max: f64,
    prefix: MobiusPrefix,
    table: ArithTable,
}

impl SigmaEngine {
    pub fn new(u_max: f64) -> Result<SigmaEngine> {
        if !(u_max > 1.0) {
            return domain("u_max must exceed 1");
        }
        if u_max > DECOMPOSITION_CAP {
            return Err(Error::Resource(format!(
                "U = {u_max} exceeds the decomposition cap {DECOMPOSITION_CAP:e}"
            )));
        }
        let n = u_max.floor() as u64;
        Ok(SigmaEngine {
            u_max,
            prefix: MobiusPrefix::new(n)?,
            table: sieve_segment(1, n + 1)?,
        })
    }

    /// `Σ_v(U)` by the decomposition.
    pub fn decomposition(&self, u: f64, v: u64) -> Result<Interval> {
        check_args(u, v, self.u_max)?;
        let t = &self.table;
        let ln_u = Interval::point(u).ln();
        let v_primes = prime_divisors(v);
        let mut primes: Vec<u64> = Vec::with_capacity(16);
        let mut acc = Fixed::ZERO;
        for l in 1..=u.floor() as u64 {
            if t.mu(l) == 0 || !t.coprime_to(l, v) {
                continue;
            }
            let mut inner = Fixed::ZERO;
            for d in 1..=floor_div(u, l) {
                let mu_d = t.mu(d);
                if mu_d == 0 || !t.coprime_to(d, l * v) {
                    continue;
                }
                primes.clear();
                primes.extend(t.primes_of(l).iter().map(|&p| p as u64));
                primes.extend(t.primes_of(d).iter().map(|&p| p as u64));
                primes.extend_from_slice(&v_primes);
                let m = self.prefix.m_check_coprime(u, ln_u, l * d, &primes);
                let term = Interval::from_i64(mu_d as i64) / Interval::from_u64(d * d) * m.sqr();
                inner.add_assign_checked(Fixed::from_interval(term)?)?;
            }
            let term = inner.to_interval() / Interval::from_u64(l);
            acc.add_assign_checked(Fixed::from_interval(term)?)?;
        }
        Ok(acc.to_interval())
    }
}

/// `Σ_v(U)` by the chosen method, with the residual for v ∈ {1, 2}.
pub fn sigma_direct(u: f64, v: u64, method: Method) -> Result<SigmaResult> {
    let value = match method {
        Method::Pairwise => sigma_pairwise(u, v, true)?,
        Method::Decomposition => {
            check_args(u, v, DECOMPOSITION_CAP)?;
            SigmaEngine::new(u)?.decomposition(u, v)?
        }
    };
    let residual = if v == 1 || v == 2 {
        Some(residual_of(value, u, v, sv_stored(v)?))
    } else {
        None
    };
    Ok(SigmaResult {
        u,
        v,
        value,
        method,
        residual,
    })
}

/// `value − v/φ(v) log U + 𝔰_v`.
pub fn residual_of(value: Interval, u: f64, v: u64, sv: Interval) -> Interval {
    let m = mult_value(v);
    value - Interval::from_u64(v) / Interval::from_u64(m.phi) * Interval::point(u).ln() + sv
}

/// `C_v U^{−1/3}`.
pub fn residual_bound(u: f64, v: u64) -> Interval {
    inputs().barrier(v) * Interval::point(u).powf(-1.0 / 3.0)
}

/// Compare the residual at U with `C_v U^{−1/3}`, using the given 𝔰_v.
/// Passes iff the upper end of `|residual|` is at most the lower end of the
/// bound.
pub fn residual_check_with(engine: &SigmaEngine, u: f64, v: u64, sv: Interval) -> Result<ResidualCheck> {
    if v != 1 && v != 2 {
        return domain(format!("residual constants are tabulated for v ∈ {{1,2}}, not {v}"));
    }
    let value = engine.decomposition(u, v)?;
    let residual = residual_of(value, u, v, sv);
    let bound = residual_bound(u, v);
    Ok(ResidualCheck {
        u,
        v,
        residual,
        bound,
        pass: residual.abs().hi <= bound.lo,
    })
}

/// [`residual_check_with`] using 𝔰_v from the stored kernel integral.
pub fn residual_check(u: f64, v: u64) -> Result<ResidualCheck> {
    check_args(u, v, DECOMPOSITION_CAP)?;
    let engine = SigmaEngine::new(u)?;
    residual_check_with(&engine, u, v, sv_stored(v)?)
}

/// `points` log-spaced values of U in `[from, to]`.
pub fn log_grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if !(from > 1.0 && to >= from) || points == 0 {
        return domain("grid needs 1 < from ≤ to and at least one point");
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let (a, b) = (from.ln(), to.ln());
    Ok((0..points)
        .map(|i| {
            if i == 0 {
                from
            } else if i + 1 == points {
                to
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

/// Decomposition values over a log-spaced grid.
pub fn sigma_sweep(from: f64, to: f64, points: usize, v: u64) -> Result<Vec<SigmaResult>> {
    let grid = log_grid(from, to, points)?;
    let engine = SigmaEngine::new(to)?;
    let sv = if v == 1 || v == 2 { Some(sv_stored(v)?) } else { None };
    grid.into_iter()
        .map(|u| {
            let value = engine.decomposition(u, v)?;
            Ok(SigmaResult {
                u,
                v,
                value,
                method: Method::Decomposition,
                residual: sv.map(|s| residual_of(value, u, v, s)),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let s = sigma_pairwise(2.0, 1, true).unwrap();
        assert!(s.contains(2f64.ln().powi(2)) || (s.mid() - 2f64.ln().powi(2)).abs() < 1e-15);
        let s3 = sigma_pairwise(3.0, 1, true).unwrap();
        let (l3, l32) = (3f64.ln(), 1.5f64.ln());
        let want = l3 * l3 - l3 * l32 + 0.5 * l32 * l32;
        assert!((s3.mid() - want).abs() < 1e-14, "{s3} vs {want}");
    }

    #[test]
    fn methods_agree() {
        let engine = SigmaEngine::new(500.0).unwrap();
        for v in [1u64, 2] {
            for &u in &[2.0, 10.0, 77.7, 500.0] {
                let a = sigma_pairwise(u, v, true).unwrap();
                let b = engine.decomposition(u, v).unwrap();
                assert!(a.intersects(b), "U={u} v={v}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn symmetric_equals_full() {
        for &u in &[5.0, 60.0, 100.0] {
            let a = sigma_pairwise(u, 1, true).unwrap();
            let b = sigma_pairwise(u, 1, false).unwrap();
            assert!(a.intersects(b));
        }
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(10.0, 1e5, 200).unwrap();
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 10.0);
        assert_eq!(g[199], 1e5);
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(sigma_pairwise(3000.0, 1, true), Err(Error::Resource(_))));
        assert!(matches!(sigma_pairwise(1.0, 1, true), Err(Error::Domain(_))));
    }
}
