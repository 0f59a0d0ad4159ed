//! Euler products and prime sums with rigorous tail bounds, ζ at real
//! points, the finite q-local factors, and the auxiliary inputs A(a, d) and
//! E(a, v).
//!
//! Every infinite prime product or sum is evaluated as an exact-interval
//! partial result over `p ≤ P₀` plus an enclosure of the remainder. For a
//! catalog entry with local term `t(p)` the remainder is controlled by a
//! registered majorant `|t(p)| ≤ C (log p)^k p^{−β}` (for products the
//! majorant bounds `|log(1 + t(p))|`). Sums of the majorant over primes are
//! bounded with the Rosser–Schoenfeld inequality `π(x) < 1.25506 x / log x`:
//! for a decreasing `f`,
//!
//! ```text
//! Σ_{p > P} f(p) ≤ ∫_P^∞ π(x)(−f′(x)) dx ≤ (1.25506 / log P)(P f(P) + ∫_P^∞ f).
//! ```
//!
//! Products whose local factor is `1 + p^{−s} + …` are accelerated: the
//! factor is multiplied by `(1 − p^{−s})^k` and the result by `ζ(s)^k`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::interval::{consts, BlockSum, Interval};
use crate::primes::{for_each_prime_block, prime_divisors};

/// Default prime cutoff P₀ for catalog evaluation.
pub const DEFAULT_CUTOFF: u64 = 10_000_000;
/// Number of integers past P₀ whose primes are used to spot-check majorants.
pub const CHECK_WINDOW: u64 = 10_000;
/// Primes from this point on are checked against the registered majorant.
pub const CHECK_FROM: u64 = 10_000;
/// Rosser–Schoenfeld: π(x) < 1.25506 x / log x for x > 1.
const ROSSER_SCHOENFELD: f64 = 1.25506;
/// Default number of explicit terms in the Euler–Maclaurin ζ evaluation.
pub const ZETA_TERMS: u64 = 1000;

// ---------------------------------------------------------------------------
// ζ at real points
// ---------------------------------------------------------------------------

fn check_zeta_arg(s: Interval) -> Result<()> {
    if !(s.lo >= 1.01) || !s.is_finite() {
        // The tail N^{1−s}/(s−1) must be below ~1e−10 for the default width.
        let eps = (s.lo - 1.0).max(f64::MIN_POSITIVE);
        let need = (1e-10 * eps).powf(-1.0 / eps);
        return domain(format!(
            "ζ(s) needs s ≥ 1.01, got {s}; a direct partial sum would need N ≈ {need:.3e} terms"
        ));
    }
    Ok(())
}

fn partial_zeta(s: Interval, n: u64) -> BlockSum {
    let mut acc = BlockSum::new();
    let neg = -s;
    // Add the small terms first.
    for k in (1..n).rev() {
        acc.add(Interval::from_u64(k).pow(neg));
    }
    acc
}

/// ζ(s) for real `s ≥ 1.01` by Euler–Maclaurin summation with
/// [`ZETA_TERMS`] explicit terms.
pub fn zeta_point(s: Interval) -> Result<Interval> {
    zeta_with_terms(s, ZETA_TERMS)
}

/// ζ(s) with `n` explicit terms:
/// `Σ_{k<n} k^{−s} + n^{1−s}/(s−1) + n^{−s}/2 + s n^{−s−1}/12 + R`.
///
/// `x ↦ x^{−s}` is completely monotone, so the Euler–Maclaurin remainder
/// after the B₂ term lies between 0 and the B₄ term
/// `f‴(n)/720 = −s(s+1)(s+2) n^{−s−3}/720`.
pub fn zeta_with_terms(s: Interval, n: u64) -> Result<Interval> {
    check_zeta_arg(s)?;
    if n < 2 {
        return domain("ζ evaluation needs at least two terms");
    }
    let acc = partial_zeta(s, n);
    let nn = Interval::from_u64(n);
    let n_s = nn.pow(-s);
    let tail = nn * n_s / (s - 1.0) + n_s / 2.0 + s * n_s / nn / 12.0;
    let b4 = -(s * (s + 1.0) * (s + 2.0)) * n_s / nn.powi(3) / 720.0;
    let rem = Interval::new(b4.lo.min(0.0), 0.0);
    Ok(acc.total() + tail + rem)
}

/// ζ(s) by the plain integral sandwich
/// `∫_n^∞ x^{−s} dx ≤ Σ_{k≥n} k^{−s} ≤ ∫_n^∞ x^{−s} dx + n^{−s}`.
/// Much wider than [`zeta_point`]; kept as an independent cross-check.
pub fn zeta_sandwich(s: Interval, n: u64) -> Result<Interval> {
    check_zeta_arg(s)?;
    let acc = partial_zeta(s, n);
    let nn = Interval::from_u64(n);
    let n_s = nn.pow(-s);
    let integral = nn * n_s / (s - 1.0);
    Ok(acc.total() + Interval::new(integral.lo, (integral + n_s).hi))
}

// ---------------------------------------------------------------------------
// Catalog of prime products and sums
// ---------------------------------------------------------------------------

/// Whether a catalog entry is a product `∏(1 + t(p))` or a sum `Σ t(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Product,
    Sum,
}

/// Sign information used for the tail: nonnegative terms give a one-sided
/// remainder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignMode {
    Nonnegative,
    Signed,
}

/// How the majorant is summed beyond the cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailMode {
    /// Over primes, via the Rosser–Schoenfeld bound.
    Primes,
    /// Over all real x > P₀ (the integral ∫_{P₀}^∞), valid because the
    /// majorant is decreasing; wider than [`TailMode::Primes`].
    Integers,
}

/// Quantities of one prime shared by all local terms.
#[derive(Clone, Copy, Debug)]
pub struct PrimeData {
    pub p: Interval,
    /// √p
    pub sp: Interval,
    pub lnp: Interval,
    /// p^θ
    pub pth: Interval,
    /// p^{1/3}
    pub p13: Interval,
}

impl PrimeData {
    pub fn new(p: u64) -> Self {
        let pi = Interval::from_u64(p);
        PrimeData {
            p: pi,
            sp: pi.sqrt(),
            lnp: pi.ln(),
            pth: pi.pow(consts::theta()),
            p13: pi.pow(Interval::ratio(1, 3)),
        }
    }

    /// p^{3/2}
    fn p32(&self) -> Interval {
        self.p * self.sp
    }

    /// A_p = 1 + (p − 2)/(p^{3/2} − p − √p + 2).
    pub fn a_p(&self) -> Interval {
        1.0 + self.a_p_minus_one()
    }

    fn a_p_minus_one(&self) -> Interval {
        (self.p - 2.0) / (self.p32() - self.p - self.sp + 2.0)
    }

    /// p^{1−θ}
    fn p1th(&self) -> Interval {
        self.p / self.pth
    }
}

/// A registered prime product or sum.
#[derive(Clone, Copy)]
pub struct ProductSpec {
    pub id: &'static str,
    pub description: &'static str,
    pub kind: Kind,
    pub sign: SignMode,
    /// Smallest prime included.
    pub first_prime: u64,
    /// Local term: the summand, or `factor − 1` for products (including any
    /// acceleration factor).
    pub local_term: fn(&PrimeData) -> Interval,
    /// Majorant constant C.
    pub majorant: f64,
    /// Power k of log p in the majorant.
    pub log_power: u32,
    /// Tail exponent β > 1 as a rational (numerator, denominator).
    pub beta: (i64, i64),
    /// Acceleration: the product is multiplied by ζ(s)^k with
    /// s = numerator/denominator.
    pub accel: Option<((i64, i64), i32)>,
}

impl std::fmt::Debug for ProductSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductSpec")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("sign", &self.sign)
            .field("majorant", &self.majorant)
            .field("log_power", &self.log_power)
            .field("beta", &self.beta)
            .finish()
    }
}

impl ProductSpec {
    fn beta_interval(&self) -> Interval {
        Interval::ratio(self.beta.0, self.beta.1)
    }

    /// Contribution of prime `p` in the log domain for products.
    fn log_term(&self, d: &PrimeData) -> Interval {
        let t = (self.local_term)(d);
        match self.kind {
            Kind::Product => t.ln_1p(),
            Kind::Sum => t,
        }
    }

    /// Lower bound of the majorant C (log p)^k p^{−β} at `p`.
    fn majorant_at(&self, d: &PrimeData) -> f64 {
        let m = self.majorant * d.lnp.powi(self.log_power as i32) * d.p.pow(-self.beta_interval());
        m.lo
    }

    /// Enclosure of the accelerating factor ζ(s)^k (1 if none).
    fn accel_factor(&self) -> Result<Interval> {
        match self.accel {
            None => Ok(Interval::ONE),
            Some(((a, b), k)) => Ok(zeta_point(Interval::ratio(a, b))?.powi(k)),
        }
    }
}

/// Upper bound for Σ_{p > P} C (log p)^k p^{−β}, or for the corresponding
/// integral over (P, ∞) when `mode` is [`TailMode::Integers`].
pub fn majorant_tail(c: f64, k: u32, beta: Interval, p0: u64, mode: TailMode) -> Result<f64> {
    if !(beta.lo > 1.0) || k > 1 {
        return domain(format!("tail needs β > 1 and k ≤ 1 (β = {beta}, k = {k})"));
    }
    let p = Interval::from_u64(p0);
    let lp = p.ln();
    let bm1 = beta - 1.0;
    if k as f64 >= beta.lo * lp.lo {
        return domain("majorant is not decreasing beyond the cutoff");
    }
    let p1b = p.pow(-bm1);
    // ∫_P^∞ (log x)^k x^{−β} dx
    let integral = if k == 0 {
        p1b / bm1
    } else {
        p1b * (lp / bm1 + 1.0 / bm1.sqr())
    };
    let bound = match mode {
        TailMode::Integers => c * integral,
        TailMode::Primes => {
            let f_p = lp.powi(k as i32) * p.pow(-beta);
            c * ROSSER_SCHOENFELD * (p * f_p + integral) / lp
        }
    };
    Ok(bound.hi)
}

/// Partial value, tail enclosure and total of one catalog entry.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailBound {
    /// Value with the tail omitted (including any acceleration factor).
    pub partial: Interval,
    /// Enclosure of the remainder: additive for sums, multiplicative
    /// (a factor around 1) for products.
    pub tail: Interval,
    /// Validated enclosure of the full constant.
    pub total: Interval,
    pub cutoff: u64,
}

impl TailBound {
    /// Width added by the tail.
    pub fn tail_width(&self) -> f64 {
        (self.total.width() - self.partial.width()).max(0.0)
    }
}

macro_rules! spec {
    ($id:expr, $desc:expr, $kind:ident, $sign:ident, $first:expr, $c:expr, $k:expr, $beta:expr, $accel:expr, $f:expr) => {
        ProductSpec {
            id: $id,
            description: $desc,
            kind: Kind::$kind,
            sign: SignMode::$sign,
            first_prime: $first,
            local_term: $f,
            majorant: $c,
            log_power: $k,
            beta: $beta,
            accel: $accel,
        }
    };
}

/// `(1 + x)(1 − y) − 1` written without the cancellation of `x − y`.
#[inline]
fn accel(x: Interval, y: Interval) -> Interval {
    x - y * (1.0 + x)
}

static CATALOG: &[ProductSpec] = &[
    spec!("mertens_log", "Σ_p log p/(p(p−1))", Sum, Nonnegative, 2, 1.001, 1, (2, 1), None,
        |d| d.lnp / (d.p * (d.p - 1.0))),
    spec!("b_log", "Σ_p 2 log p/(p²−1)", Sum, Nonnegative, 2, 2.001, 1, (2, 1), None,
        |d| 2.0 * d.lnp / (d.p.sqr() - 1.0)),
    spec!("delta_half_reduced", "∏_p (1+1/((√p−1)(p+1)))(1−p^{−3/2}); P_{1/2} = ζ(3/2)·this",
        Product, Signed, 2, 1.02, 0, (2, 1), None,
        |d| accel(1.0 / ((d.sp - 1.0) * (d.p + 1.0)), 1.0 / d.p32())),
    spec!("delta_theta_reduced", "∏_p (1+1/((p^θ−1)(p+1)))(1−p^{−1−θ}); P_θ = ζ(1+θ)·this",
        Product, Signed, 2, 0.02, 0, (2, 1), None,
        |d| accel(1.0 / ((d.pth - 1.0) * (d.p + 1.0)), 1.0 / (d.p * d.pth))),
    spec!("G_prod", "∏_p (1+(A_p−1)/p)", Product, Signed, 2, 1.01, 0, (2, 1), Some(((3, 2), 1)),
        |d| accel(d.a_p_minus_one() / d.p, 1.0 / d.p32())),
    spec!("G_sum", "Σ_p log p (p−1−(p−2)A_p)/((A_p+p−1)(p−1))", Sum, Signed, 2, 1.01, 1, (3, 2), None,
        |d| {
            let am1 = d.a_p_minus_one();
            // p − 1 − (p − 2)A_p = 1 − (p − 2)(A_p − 1)
            d.lnp * (1.0 - (d.p - 2.0) * am1) / ((am1 + d.p) * (d.p - 1.0))
        }),
    spec!("G_delta", "∏_p (1+(p(A_p−1)+A_p p^{1/3}+1)/((p−1)p^{2/3}))", Product, Nonnegative, 2, 1.24, 0, (7, 6), None,
        |d| (d.p * d.a_p_minus_one() + d.a_p() * d.p13 + 1.0) / ((d.p - 1.0) * d.p13.sqr())),
    spec!("I_prod", "∏_p (1+1/(p(p−1)))", Product, Nonnegative, 2, 1.001, 0, (2, 1), None,
        |d| 1.0 / (d.p * (d.p - 1.0))),
    spec!("I_err", "∏_p (1+(2p−1)/((√p−1)(p−1)²))", Product, Nonnegative, 2, 2.03, 0, (3, 2), None,
        |d| (2.0 * d.p - 1.0) / ((d.sp - 1.0) * (d.p - 1.0).sqr())),
    spec!("H_prod", "∏_{p≥3} (1+1/(p(p−2)))", Product, Nonnegative, 3, 1.001, 0, (2, 1), None,
        |d| 1.0 / (d.p * (d.p - 2.0))),
    spec!("H_err", "∏_{p≥3} (1+2/((√p−1)(p−2)))", Product, Nonnegative, 3, 2.03, 0, (3, 2), None,
        |d| 2.0 / ((d.sp - 1.0) * (d.p - 2.0))),
    spec!("twin_inverse", "∏_{p≥3} (1−1/(p−1)²)", Product, Signed, 3, 1.001, 0, (2, 1), None,
        |d| -1.0 / (d.p - 1.0).sqr()),
    spec!("D_prod", "∏_p (1+2/(p(√p−1)))", Product, Nonnegative, 2, 2.03, 0, (3, 2), None,
        |d| 2.0 / (d.p * (d.sp - 1.0))),
    spec!("D_delta", "∏_p (1+(2√p+p^{1/3}−1)/(p^{2/3}(√p−1)²))", Product, Nonnegative, 2, 2.26, 0, (7, 6), None,
        |d| (2.0 * d.sp + d.p13 - 1.0) / (d.p13.sqr() * (d.sp - 1.0).sqr())),
    spec!("D_sum", "−Σ_p (2√p−3) log p/((p−2√p+2)(p−1))", Sum, Signed, 2, 2.02, 1, (3, 2), None,
        |d| -(2.0 * d.sp - 3.0) * d.lnp / ((d.p - 2.0 * d.sp + 2.0) * (d.p - 1.0))),
    spec!("F_delta", "∏_p (1+(p^{1/6}+1)/(p^{5/6}(√p−1)))", Product, Nonnegative, 2, 1.23, 0, (7, 6), None,
        |d| {
            let p16 = d.p13.sqrt();
            (p16 + 1.0) / ((d.p / p16) * (d.sp - 1.0))
        }),
    spec!("F_sum", "−Σ_p (√p−2) log p/((p−√p+1)(p−1))", Sum, Signed, 2, 1.001, 1, (3, 2), None,
        |d| -(d.sp - 2.0) * d.lnp / ((d.p - d.sp + 1.0) * (d.p - 1.0))),
    spec!("F_prod", "∏_p (1+p^{−3/2}) = ζ(3/2)/ζ(3)", Product, Signed, 2, 1.001, 0, (3, 1), Some(((3, 2), 1)),
        |d| -1.0 / d.p.powi(3)),
    spec!("tau_prod2", "∏_p (1+1/(p^{2−2θ}(p^θ−1)²))", Product, Nonnegative, 2, 1.001, 0, (2, 1), None,
        |d| 1.0 / (d.p1th().sqr() * (d.pth - 1.0).sqr())),
    spec!("tau_prod3", "∏_p (1+1/(p^{3/2−2θ}(p^θ−1)²))", Product, Signed, 2, 2.0, 0, (123, 50), Some(((3, 2), 1)),
        |d| {
            let x = d.sp * d.p / d.pth.sqr() * (d.pth - 1.0).sqr();
            accel(1.0 / x, 1.0 / d.p32())
        }),
    spec!("J_prod", "∏_p (1+(2p^{1−θ}−p^{1−2θ}−1)/(p^{2−2θ}(p^θ−1)²))", Product, Nonnegative, 2, 2.001, 0, (49, 25), None,
        |d| {
            let p1th = d.p1th();
            let num = 2.0 * p1th - p1th / d.pth - 1.0;
            num / (p1th.sqr() * (d.pth - 1.0).sqr())
        }),
    spec!("J_sum", "−Σ_p log p (2p^{1−θ}−p^{1−2θ}−2)/((p^{1−2θ}(p^θ−1)²+1)(p−1))", Sum, Signed, 2, 2.002, 1, (49, 25), None,
        |d| {
            let p1th = d.p1th();
            let p12th = p1th / d.pth;
            -d.lnp * (2.0 * p1th - p12th - 2.0) / ((p12th * (d.pth - 1.0).sqr() + 1.0) * (d.p - 1.0))
        }),
    spec!("J_err", "∏_p (1+(2p^θ−1)/((√p−1)(p^θ−1)²))", Product, Nonnegative, 2, 2.03, 0, (73, 50), None,
        |d| (2.0 * d.pth - 1.0) / ((d.sp - 1.0) * (d.pth - 1.0).sqr())),
    spec!("twin_sq", "∏_p (1+1/(p−1)²) = Σ_n μ²(n)/φ(n)²", Product, Signed, 2, 2.001, 0, (3, 1), Some(((2, 1), 1)),
        |d| accel(1.0 / (d.p - 1.0).sqr(), 1.0 / d.p.sqr())),
];

/// All registered catalog entries.
pub fn catalog() -> &'static [ProductSpec] {
    CATALOG
}

/// Look up a catalog entry.
pub fn catalog_spec(id: &str) -> Result<&'static ProductSpec> {
    CATALOG
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::Domain(format!("unknown catalog id `{id}`")))
}

/// Evaluated catalog entries for one cutoff.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogValues {
    pub cutoff: u64,
    pub tail_mode: TailMode,
    values: BTreeMap<&'static str, TailBound>,
}

impl CatalogValues {
    /// The evaluated entry `id`; panics if `id` was not evaluated.
    pub fn get(&self, id: &str) -> TailBound {
        *self
            .values
            .get(id)
            .unwrap_or_else(|| panic!("catalog entry `{id}` not evaluated"))
    }

    /// Full-constant enclosure of `id`.
    pub fn total(&self, id: &str) -> Interval {
        self.get(id).total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, TailBound)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }
}

struct Accum<'a> {
    spec: &'a ProductSpec,
    sum: BlockSum,
}

/// Evaluate the entries `specs` in one pass over the primes up to `cutoff`.
pub fn eval_specs(specs: &[&ProductSpec], cutoff: u64, mode: TailMode) -> Result<CatalogValues> {
    if cutoff < 2 * CHECK_FROM {
        return domain(format!("catalog cutoff must be at least {}", 2 * CHECK_FROM));
    }
    let mut acc: Vec<Accum> = specs
        .iter()
        .map(|s| Accum {
            spec: s,
            sum: BlockSum::new(),
        })
        .collect();
    let mut failure: Option<String> = None;
    for_each_prime_block(2, cutoff + CHECK_WINDOW + 1, |block| {
        if failure.is_some() {
            return;
        }
        for &p in block {
            let d = PrimeData::new(p);
            for a in acc.iter_mut() {
                if p < a.spec.first_prime {
                    continue;
                }
                let t = a.spec.log_term(&d);
                if p >= CHECK_FROM {
                    let m = a.spec.majorant_at(&d);
                    let bad_sign = a.spec.sign == SignMode::Nonnegative && t.hi < 0.0;
                    if !(t.mag() <= m) || bad_sign {
                        failure = Some(format!(
                            "majorant check for `{}` fails at p = {p}: |term| ≤ {:e}, majorant {:e}",
                            a.spec.id,
                            t.mag(),
                            m
                        ));
                        return;
                    }
                }
                if p <= cutoff {
                    a.sum.add(t);
                }
            }
        }
    });
    if let Some(msg) = failure {
        return Err(Error::Domain(msg));
    }
    let mut values = BTreeMap::new();
    for a in acc {
        let s = a.spec;
        let t = majorant_tail(s.majorant, s.log_power, s.beta_interval(), cutoff, mode)?;
        let range = match s.sign {
            SignMode::Nonnegative => Interval::new(0.0, t),
            SignMode::Signed => Interval::new(-t, t),
        };
        let partial_sum = a.sum.total();
        let tb = match s.kind {
            Kind::Sum => TailBound {
                partial: partial_sum,
                tail: range,
                total: partial_sum + range,
                cutoff,
            },
            Kind::Product => {
                let f = s.accel_factor()?;
                let partial = partial_sum.exp() * f;
                let tail = range.exp();
                TailBound {
                    partial,
                    tail,
                    total: partial * tail,
                    cutoff,
                }
            }
        };
        values.insert(s.id, tb);
    }
    Ok(CatalogValues {
        cutoff,
        tail_mode: mode,
        values,
    })
}

/// Evaluate one catalog entry.
pub fn eval_catalog(id: &str, cutoff: Option<u64>) -> Result<TailBound> {
    let spec = catalog_spec(id)?;
    let cutoff = cutoff.unwrap_or(DEFAULT_CUTOFF);
    Ok(eval_specs(&[spec], cutoff, TailMode::Primes)?.get(id))
}

/// Evaluate the whole catalog at one cutoff with prime tails.
pub fn eval_catalog_all(cutoff: u64) -> Result<CatalogValues> {
    let specs: Vec<&ProductSpec> = CATALOG.iter().collect();
    eval_specs(&specs, cutoff, TailMode::Primes)
}

/// The whole catalog at [`DEFAULT_CUTOFF`], computed once per process.
pub fn default_catalog() -> &'static CatalogValues {
    static CELL: OnceLock<CatalogValues> = OnceLock::new();
    CELL.get_or_init(|| eval_catalog_all(DEFAULT_CUTOFF).expect("catalog evaluation"))
}

// ---------------------------------------------------------------------------
// q-local factors
// ---------------------------------------------------------------------------

/// A finite local factor: the per-prime value for `p | q`.
#[derive(Clone, Copy)]
pub struct LocalFactor {
    pub id: &'static str,
    pub description: &'static str,
    pub kind: Kind,
    pub at: fn(&PrimeData) -> Interval,
}

const DELTA_NUM: i64 = 1;
const DELTA_DEN: i64 = 3;

fn delta() -> Interval {
    Interval::ratio(DELTA_NUM, DELTA_DEN)
}

static LOCAL_FACTORS: &[LocalFactor] = &[
    LocalFactor { id: "p_alpha_half", description: "(p+1)/(p+1−√p)", kind: Kind::Product,
        at: |d| (d.p + 1.0) / (d.p + 1.0 - d.sp) },
    LocalFactor { id: "p_alpha_theta", description: "(p+1)/(p+1−p^{1−θ})", kind: Kind::Product,
        at: |d| (d.p + 1.0) / (d.p + 1.0 - d.p1th()) },
    LocalFactor { id: "A_q", description: "1+(p−2)/(p^{3/2}−p−√p+2)", kind: Kind::Product,
        at: |d| d.a_p() },
    LocalFactor { id: "j_q", description: "1−A_p/(p−1+A_p)", kind: Kind::Product,
        at: |d| { let a = d.a_p(); 1.0 - a / (d.p - 1.0 + a) } },
    LocalFactor { id: "k_q", description: "1+(2(p−1)−A_p(p+p^δ))/((p−1)p^{1−δ}+A_p(p+p^δ)−p+1), δ=1/3", kind: Kind::Product,
        at: |d| {
            let a = d.a_p();
            let pd = d.p13;
            let num = 2.0 * (d.p - 1.0) - a * (d.p + pd);
            let den = (d.p - 1.0) * d.p.pow(1.0 - delta()) + a * (d.p + pd) - d.p + 1.0;
            1.0 + num / den
        } },
    LocalFactor { id: "kk_q", description: "1−(p+1)/(p²−p^{3/2}+√p+1)", kind: Kind::Product,
        at: |d| 1.0 - (d.p + 1.0) / (d.p.sqr() - d.p32() + d.sp + 1.0) },
    LocalFactor { id: "ll_q", description: "1+(p^{1−δ}−2p^{1/2−δ}−1)/(p^{2−2δ}−p^{3/2−2δ}+p^{1/2−δ}), δ=1/3", kind: Kind::Product,
        at: |d| {
            let dl = delta();
            let num = d.p.pow(1.0 - dl) - 2.0 * d.p.pow(0.5 - dl) - 1.0;
            let den = d.p.pow(2.0 - 2.0 * dl) - d.p.pow(1.5 - 2.0 * dl) + d.p.pow(0.5 - dl);
            1.0 + num / den
        } },
    LocalFactor { id: "u_q", description: "1−p/(p²−p+1)", kind: Kind::Product,
        at: |d| 1.0 - d.p / (d.p.sqr() - d.p + 1.0) },
    LocalFactor { id: "v_q", description: "1+(p²−4p+2)/((√p−1)(p−1)²+2p−1)", kind: Kind::Product,
        at: |d| 1.0 + (d.p.sqr() - 4.0 * d.p + 2.0) / ((d.sp - 1.0) * (d.p - 1.0).sqr() + 2.0 * d.p - 1.0) },
    LocalFactor { id: "f_q", description: "1−1/(p−2√p+2)", kind: Kind::Product,
        at: |d| 1.0 - 1.0 / (d.p - 2.0 * d.sp + 2.0) },
    LocalFactor { id: "h_q", description: "1+(p−4√p−p^δ+2)/((√p−1)²p^{1−δ}+p^δ+2√p−1), δ=1/3", kind: Kind::Product,
        at: |d| {
            let pd = d.p13;
            let num = d.p - 4.0 * d.sp - pd + 2.0;
            let den = (d.sp - 1.0).sqr() * d.p.pow(1.0 - delta()) + pd + 2.0 * d.sp - 1.0;
            1.0 + num / den
        } },
    LocalFactor { id: "x_q", description: "1−(p−1)/(p^{2−2θ}(p^θ−1)²+2p^{1−θ}−p^{1−2θ}−1)", kind: Kind::Product,
        at: |d| {
            let p1th = d.p1th();
            let den = p1th.sqr() * (d.pth - 1.0).sqr() + 2.0 * p1th - p1th / d.pth - 1.0;
            1.0 - (d.p - 1.0) / den
        } },
    LocalFactor { id: "y_q", description: "1+(p^{2θ}−4p^θ+2)/((√p−1)(p^θ−1)²+2p^θ−1)", kind: Kind::Product,
        at: |d| 1.0 + (d.pth.sqr() - 4.0 * d.pth + 2.0) / ((d.sp - 1.0) * (d.pth - 1.0).sqr() + 2.0 * d.pth - 1.0) },
    LocalFactor { id: "tau2_q", description: "1−1/(p^{2−2θ}(p^θ−1)²+1)", kind: Kind::Product,
        at: |d| 1.0 - 1.0 / (d.p1th().sqr() * (d.pth - 1.0).sqr() + 1.0) },
    LocalFactor { id: "tau3_q", description: "1−1/(p^{3/2−2θ}(p^θ−1)²+1)", kind: Kind::Product,
        at: |d| 1.0 - 1.0 / (d.p32() / d.pth.sqr() * (d.pth - 1.0).sqr() + 1.0) },
    LocalFactor { id: "mertens_q", description: "Σ_{p|q} log p/(p−1)", kind: Kind::Sum,
        at: |d| d.lnp / (d.p - 1.0) },
    LocalFactor { id: "sg_q", description: "Σ_{p|q} log p·A_p/(A_p+p−1)", kind: Kind::Sum,
        at: |d| { let a = d.a_p(); d.lnp * a / (a + d.p - 1.0) } },
    LocalFactor { id: "ff_q", description: "Σ_{p|q} log p/(p−√p+1)", kind: Kind::Sum,
        at: |d| d.lnp / (d.p - d.sp + 1.0) },
    LocalFactor { id: "ss_q", description: "Σ_{p|q} log p/(p^{1−2θ}(p^θ−1)²+1)", kind: Kind::Sum,
        at: |d| d.lnp / (d.p1th() / d.pth * (d.pth - 1.0).sqr() + 1.0) },
    LocalFactor { id: "G2_q", description: "Σ_{p|q} log p/(p−2√p+2)", kind: Kind::Sum,
        at: |d| d.lnp / (d.p - 2.0 * d.sp + 2.0) },
];

/// All registered q-local factors.
pub fn local_factors() -> &'static [LocalFactor] {
    LOCAL_FACTORS
}

fn local(id: &str) -> Result<&'static LocalFactor> {
    LOCAL_FACTORS
        .iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::Domain(format!("unknown local factor `{id}`")))
}

/// `∏_{p|q}` of the local factor `id` (1 for q = 1).
pub fn local_factor_product(id: &str, q: u64) -> Result<Interval> {
    let f = local(id)?;
    if f.kind != Kind::Product {
        return domain(format!("`{id}` is a local sum; use local_factor_sum"));
    }
    if q == 0 {
        return domain("q must be positive");
    }
    Ok(prime_divisors(q)
        .into_iter()
        .fold(Interval::ONE, |acc, p| acc * (f.at)(&PrimeData::new(p))))
}

/// `Σ_{p|q}` of the local summand `id` (0 for q = 1).
pub fn local_factor_sum(id: &str, q: u64) -> Result<Interval> {
    let f = local(id)?;
    if f.kind != Kind::Sum {
        return domain(format!("`{id}` is a local product; use local_factor_product"));
    }
    if q == 0 {
        return domain("q must be positive");
    }
    Ok(prime_divisors(q)
        .into_iter()
        .fold(Interval::ZERO, |acc, p| acc + (f.at)(&PrimeData::new(p))))
}

// ---------------------------------------------------------------------------
// A(a, d) and E(a, v)
// ---------------------------------------------------------------------------

/// A rational parameter.
pub type Rational = Ratio<i64>;

fn rat(r: Rational) -> Interval {
    Interval::ratio(*r.numer(), *r.denom())
}

/// The constant A(a, d) bounding the δ-smoothing factor.
///
/// - `a = 1, 0 < d ≤ 1`: `max(γ, 1/(d e^{γd+1}))`;
/// - `d + 1 = a`: `max(1, 1/|a−1|, ζ(a) − 1/(a−1))`;
/// - `0 < d < a < d + 1`: `max(1, (l^{d−a+1}/d^d)^{1/(a−1)}, ζ(a) − 1/(a−1))`
///   with `l = (d−a+1)/(|ζ(a)||a−1|)`;
/// - `d = a`: 1.
///
/// Any other pair is rejected.
pub fn delta_input(a: Rational, d: Rational) -> Result<Interval> {
    let one = Rational::from_integer(1);
    let zero = Rational::from_integer(0);
    let g = consts::EULER_GAMMA;
    if a == one {
        if zero < d && d <= one {
            let di = rat(d);
            return Ok(g.max(1.0 / (di * (g * di + 1.0).exp())));
        }
        return domain(format!("A(1, d) needs 0 < d ≤ 1, got d = {d}"));
    }
    let ai = rat(a);
    let di = rat(d);
    let zeta_a = || -> Result<Interval> {
        if a < Rational::new(101, 100) {
            return domain(format!("A(a, d) needs ζ(a) with a ≥ 1.01, got a = {a}"));
        }
        zeta_point(ai)
    };
    if d + one == a {
        let z = zeta_a()? - 1.0 / (ai - 1.0);
        return Ok(Interval::ONE.max(1.0 / (ai - 1.0).abs()).max(z));
    }
    if zero < d && d < a && a < d + one {
        let z = zeta_a()?;
        let e = di - ai + 1.0;
        let l1 = e / z.abs() / (ai - 1.0).abs();
        let middle = (l1.pow(e) / di.pow(di)).pow(1.0 / (ai - 1.0));
        return Ok(Interval::ONE.max(middle).max(z - 1.0 / (ai - 1.0)));
    }
    if d == a {
        return Ok(Interval::ONE);
    }
    domain(format!("A(a, d) is not defined for a = {a}, d = {d}"))
}

/// The error constant E(a, v) for v ∈ {1, 2}, the maximum of three
/// candidate bounds.
pub fn error_constant(a: Interval, v: u64) -> Result<Interval> {
    if v != 1 && v != 2 {
        return domain(format!("E(a, v) is defined for v ∈ {{1, 2}}, got {v}"));
    }
    let half = a - 0.5;
    let am1 = a - 1.0;
    if !half.is_positive() || am1.contains_zero() {
        return domain(format!("E(a, v) needs a > 1/2 and a ≠ 1, got {a}"));
    }
    let pi2 = consts::pi_sq();
    let za = zeta_point(a)?;
    let z2a = zeta_point(2.0 * a)?;
    let ratio = am1.abs() / half;
    let exponent = 2.0 / am1;
    let (e1, e2, e3) = if v == 1 {
        let e1 = 0.43 * (1.0 + ratio);
        let e2 = (za / z2a - 6.0 / (am1.sqr() * pi2)).abs();
        let base = 3.0 * z2a / (half * pi2 * (za * am1).abs());
        (e1, e2, ratio * base.pow(exponent))
    } else {
        let c = (consts::SQRT_2 - 1.0) / consts::SQRT_2;
        let two_a = Interval::point(2.0).pow(a);
        let e1 = 0.12 * (1.0 + ratio);
        let e2 = c * (two_a / (two_a + 1.0) * za / z2a - Interval::ratio(2, 3) * 6.0 / (am1.sqr() * pi2)).abs();
        let base = 3.0 * (two_a + 1.0) * z2a
            / (half * Interval::point(2.0).pow(am1) * 3.0 * pi2 * (za * am1).abs());
        (e1, e2, c * ratio * base.pow(exponent))
    };
    Ok(e1.max(e2).max(e3))
}
