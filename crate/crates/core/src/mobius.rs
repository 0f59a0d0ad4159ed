//! The m-family of Möbius averages, weighted squarefree sums and the
//! threshold scans that certify the scan-based constants.
//!
//! With `(n, q) = 1` throughout:
//!
//! ```text
//! m_q(X)  = Σ_{n≤X} μ(n)/n            m̌_q(X)  = Σ_{n≤X} μ(n)/n · log(X/n)
//! m̌̌_q(X) = Σ_{n≤X} μ(n)/n · log²(X/n)
//! m̃_q(X)  = Σ_{n≤X} μ(n)/κ(n) · log(X/n)
//! m̃̃_q(X) = Σ_{n≤X} μ(n)/κ(n) · log²(X/n)
//! ```
//!
//! Sums are accumulated exactly on a fixed-point grid (see [`crate::fixed`]),
//! so the only width comes from the individual terms.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::euler::eval_catalog;
use crate::fixed::{fixed_ratio, Decimal, Fixed};
use crate::interval::{consts, Interval};
use crate::primes::{prime_divisors, sieve_segment, ArithTable, DEFAULT_SEGMENT, MAX_N};

/// Largest X accepted by [`m_family`] and [`weighted_sum`].
pub const M_CAP: f64 = 1e8;
/// Default upper limit for threshold scans.
pub const SCAN_CAP: f64 = 1e6;
/// Squarefree ℓ up to this bound get high-precision weights in scans.
pub const HP_LIMIT: u64 = 10_000;

/// Calls `f` with consecutive sieve tables covering `[lo, hi]`.
pub(crate) fn for_each_table(lo: u64, hi: u64, mut f: impl FnMut(&ArithTable) -> Result<()>) -> Result<()> {
    let mut a = lo.max(1);
    while a <= hi {
        let b = (a + DEFAULT_SEGMENT).min(hi + 1);
        let t = sieve_segment(a, b)?;
        f(&t)?;
        a = b;
    }
    Ok(())
}

/// ⌊y/m⌋ for real `y ≥ 0` and integer `m ≥ 1`, exact.
pub fn floor_div(y: f64, m: u64) -> u64 {
    debug_assert!(y >= 0.0 && m >= 1);
    let mut n = (y / m as f64).floor() as u64;
    // Products below 2^53 are exact, so the comparisons are exact.
    while n > 0 && (n as f64) * (m as f64) > y {
        n -= 1;
    }
    while ((n + 1) as f64) * (m as f64) <= y {
        n += 1;
    }
    n
}

fn check_x(x: f64, what: &str) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("{what}: X must be a positive real, got {x}"));
    }
    if x > M_CAP {
        return Err(Error::Resource(format!("{what}: X = {x} exceeds the cap {M_CAP:e}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// The m-family
// ---------------------------------------------------------------------------

/// Members of the m-family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MKind {
    M,
    MCheck,
    MCheckCheck,
    MTilde,
    MTildeTilde,
}

impl MKind {
    pub fn from_name(s: &str) -> Result<MKind> {
        Ok(match s {
            "m" => MKind::M,
            "m_check" => MKind::MCheck,
            "m_checkcheck" => MKind::MCheckCheck,
            "m_tilde" => MKind::MTilde,
            "m_tildetilde" => MKind::MTildeTilde,
            _ => return domain(format!("unknown m-family member `{s}`")),
        })
    }

    fn log_power(self) -> i32 {
        match self {
            MKind::M => 0,
            MKind::MCheck | MKind::MTilde => 1,
            MKind::MCheckCheck | MKind::MTildeTilde => 2,
        }
    }

    fn kappa(self) -> bool {
        matches!(self, MKind::MTilde | MKind::MTildeTilde)
    }
}

/// Enclosure of an m-family member at real `X` with coprimality to `q`.
pub fn m_family(kind: MKind, x: f64, q: u64) -> Result<Interval> {
    check_x(x, "m_family")?;
    if q == 0 {
        return domain("q must be positive");
    }
    let n_max = x.floor() as u64;
    let ln_x = Interval::point(x).ln();
    let mut acc = Fixed::ZERO;
    for_each_table(1, n_max, |t| {
        for n in t.lo()..t.hi() {
            let mu = t.mu(n);
            if mu == 0 || !t.coprime_to(n, q) {
                continue;
            }
            let den = if kind.kappa() {
                t.kappa_squarefree(n)
            } else {
                n
            };
            let mut term = Interval::from_i64(mu as i64) / Interval::from_u64(den);
            let p = kind.log_power();
            if p > 0 {
                let l = ln_x - Interval::from_u64(n).ln();
                term = term * l.max(Interval::ZERO).powi(p);
            }
            acc.add_assign_checked(Fixed::from_interval(term)?)?;
        }
        Ok(())
    })?;
    Ok(acc.to_interval())
}

/// Prefix tables `M₁(N) = Σ_{n≤N} μ(n)/n` and `M₂(N) = Σ_{n≤N} μ(n) log n / n`,
/// from which `m̌(Y) = M₁(⌊Y⌋) log Y − M₂(⌊Y⌋)`.
#[derive(Clone, Debug)]
pub struct MobiusPrefix {
    m1: Vec<Interval>,
    m2: Vec<Interval>,
    ln: Vec<Interval>,
}

impl MobiusPrefix {
    /// Tables for `N ≤ n_max`.
    pub fn new(n_max: u64) -> Result<MobiusPrefix> {
        if n_max as f64 > M_CAP {
            return Err(Error::Resource(format!("prefix table size {n_max} exceeds the cap")));
        }
        let len = n_max as usize + 1;
        let mut m1 = Vec::with_capacity(len);
        let mut m2 = Vec::with_capacity(len);
        let mut ln = Vec::with_capacity(len);
        m1.push(Interval::ZERO);
        m2.push(Interval::ZERO);
        ln.push(Interval::ZERO);
        let (mut a1, mut a2) = (Fixed::ZERO, Fixed::ZERO);
        for_each_table(1, n_max, |t| {
            for n in t.lo()..t.hi() {
                let l = Interval::from_u64(n).ln();
                ln.push(l);
                let mu = t.mu(n);
                if mu != 0 {
                    let c = Interval::from_i64(mu as i64) / Interval::from_u64(n);
                    a1.add_assign_checked(Fixed::from_interval(c)?)?;
                    a2.add_assign_checked(Fixed::from_interval(c * l)?)?;
                }
                m1.push(a1.to_interval());
                m2.push(a2.to_interval());
            }
            Ok(())
        })?;
        Ok(MobiusPrefix { m1, m2, ln })
    }

    pub fn n_max(&self) -> u64 {
        (self.m1.len() - 1) as u64
    }

    /// log n from the table.
    #[inline]
    pub fn ln(&self, n: u64) -> Interval {
        self.ln[n as usize]
    }

    /// `m̌(y/m)` without coprimality, given `ln_y = log y`.
    #[inline]
    pub fn m_check_scaled(&self, y: f64, ln_y: Interval, m: u64) -> Interval {
        let n = floor_div(y, m);
        if n == 0 {
            return Interval::ZERO;
        }
        let l = ln_y - self.ln_big(m);
        self.m1[n as usize] * l - self.m2[n as usize]
    }

    fn ln_big(&self, m: u64) -> Interval {
        if (m as usize) < self.ln.len() {
            self.ln[m as usize]
        } else {
            Interval::from_u64(m).ln()
        }
    }

    /// `m̌_q(y/m)` with `(n, q) = 1`, through the identity
    /// `m̌_q(Y) = Σ_{e | q^∞, e ≤ Y} m̌(Y/e)/e`; `q_primes` are the primes of q.
    pub fn m_check_coprime(&self, y: f64, ln_y: Interval, m: u64, q_primes: &[u64]) -> Interval {
        let mut acc = Interval::ZERO;
        let limit = floor_div(y, m);
        self.divisor_walk(q_primes, 1, limit, &mut |e| {
            acc += self.m_check_scaled(y, ln_y, m * e) / Interval::from_u64(e);
        });
        acc
    }

    fn divisor_walk(&self, primes: &[u64], e: u64, limit: u64, f: &mut impl FnMut(u64)) {
        match primes.split_first() {
            None => f(e),
            Some((&p, rest)) => {
                let mut cur = e;
                loop {
                    self.divisor_walk(rest, cur, limit, f);
                    match cur.checked_mul(p) {
                        Some(next) if next <= limit => cur = next,
                        _ => break,
                    }
                }
            }
        }
    }
}

/// `∫_1^X m̌_q(s) ds/s` (or the m̃ version when `tilde` is set), integrated
/// exactly piece by piece: on `[n, n+1)` the integrand is `M₁ log s − M₂`,
/// whose integral in `L = log s` is `δ (M₁ (L_a + L_b)/2 − M₂)` with
/// `δ = log(1 + 1/n)`.
pub fn integral_m_check(x: f64, q: u64, tilde: bool) -> Result<Interval> {
    check_x(x, "integral_m_check")?;
    if x < 1.0 {
        return domain("integral_m_check needs X ≥ 1");
    }
    let n_max = x.floor() as u64;
    let ln_x = Interval::point(x).ln();
    let (mut m1, mut m2) = (Fixed::ZERO, Fixed::ZERO);
    let mut total = Fixed::ZERO;
    for_each_table(1, n_max, |t| {
        for n in t.lo()..t.hi() {
            let ln_n = Interval::from_u64(n).ln();
            let mu = t.mu(n);
            if mu != 0 && t.coprime_to(n, q) {
                let den = if tilde { t.kappa_squarefree(n) } else { n };
                let c = Interval::from_i64(mu as i64) / Interval::from_u64(den);
                m1.add_assign_checked(Fixed::from_interval(c)?)?;
                m2.add_assign_checked(Fixed::from_interval(c * ln_n)?)?;
            }
            let (la, lb, delta) = if n == n_max {
                (ln_n, ln_x, ln_x - ln_n)
            } else {
                let d = Interval::from_u64(n).recip().unwrap().ln_1p();
                (ln_n, ln_n + d, d)
            };
            let delta = delta.max(Interval::ZERO);
            let piece = delta * (m1.to_interval() * (la + lb) / 2.0 - m2.to_interval());
            total.add_assign_checked(Fixed::from_interval(piece)?)?;
        }
        Ok(())
    })?;
    Ok(total.to_interval())
}

// ---------------------------------------------------------------------------
// Weighted squarefree sums
// ---------------------------------------------------------------------------

/// Multiplicative weights on squarefree ℓ (each is `∏_{p|ℓ}` of a factor).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// 1/ℓ
    InvL,
    /// 1/φ(ℓ)
    InvPhi,
    /// A_ℓ/φ(ℓ)
    APhi,
    /// 1/(√ℓ φ_{1/2}(ℓ))
    SqrtPhiHalf,
    /// 1/φ(ℓ)²
    InvPhiSq,
    /// ℓ²/φ(ℓ)²
    LSqPhiSq,
    /// ν(ℓ)/ℓ with ν(2) = 1, ν(p) = p/(p−2)
    Nu,
    /// 1/φ_{1/2}(ℓ)²
    InvPhiHalfSq,
    /// ℓ/φ_{1/2}(ℓ)²
    LPhiHalfSq,
    /// ℓ^{2θ−2}/φ_θ(ℓ)²
    Theta,
}

impl Weight {
    pub const ALL: [Weight; 10] = [
        Weight::InvL,
        Weight::InvPhi,
        Weight::APhi,
        Weight::SqrtPhiHalf,
        Weight::InvPhiSq,
        Weight::LSqPhiSq,
        Weight::Nu,
        Weight::InvPhiHalfSq,
        Weight::LPhiHalfSq,
        Weight::Theta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Weight::InvL => "inv_l",
            Weight::InvPhi => "inv_phi",
            Weight::APhi => "a_phi",
            Weight::SqrtPhiHalf => "sqrt_phi_half",
            Weight::InvPhiSq => "inv_phi_sq",
            Weight::LSqPhiSq => "l_sq_phi_sq",
            Weight::Nu => "nu",
            Weight::InvPhiHalfSq => "inv_phi_half_sq",
            Weight::LPhiHalfSq => "l_phi_half_sq",
            Weight::Theta => "theta",
        }
    }

    pub fn from_name(s: &str) -> Result<Weight> {
        Weight::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown weight `{s}`")))
    }

    /// The factor at a prime.
    pub fn at_prime(self, p: u64) -> Interval {
        let pi = Interval::from_u64(p);
        match self {
            Weight::InvL => pi.recip().unwrap(),
            Weight::InvPhi => (pi - 1.0).recip().unwrap(),
            Weight::APhi => {
                let sp = pi.sqrt();
                let a = 1.0 + (pi - 2.0) / (pi * sp - pi - sp + 2.0);
                a / (pi - 1.0)
            }
            Weight::SqrtPhiHalf => 1.0 / (pi - pi.sqrt()),
            Weight::InvPhiSq => 1.0 / (pi - 1.0).sqr(),
            Weight::LSqPhiSq => (pi / (pi - 1.0)).sqr(),
            Weight::Nu => {
                if p == 2 {
                    Interval::point(0.5)
                } else {
                    1.0 / (pi - 2.0)
                }
            }
            Weight::InvPhiHalfSq => 1.0 / (pi.sqrt() - 1.0).sqr(),
            Weight::LPhiHalfSq => pi / (pi.sqrt() - 1.0).sqr(),
            Weight::Theta => {
                let pth = pi.pow(consts::theta());
                1.0 / ((pi / pth).sqr() * (pth - 1.0).sqr())
            }
        }
    }

    /// The weight of squarefree ℓ with prime factors `primes`.
    pub fn at(self, primes: &[u32]) -> Interval {
        primes
            .iter()
            .fold(Interval::ONE, |acc, &p| acc * self.at_prime(p as u64))
    }
}

/// `Σ_{ℓ≤X, (ℓ,q)=1} μ²(ℓ) w(ℓ) log^k(arg/ℓ)` with `arg = X` by default.
pub fn weighted_sum(w: Weight, x: f64, q: u64, k: u32, arg: Option<f64>) -> Result<Interval> {
    check_x(x, "weighted_sum")?;
    if q == 0 {
        return domain("q must be positive");
    }
    let arg = arg.unwrap_or(x);
    if k > 0 && !(arg > 0.0) {
        return domain("log argument must be positive");
    }
    let ln_arg = Interval::point(arg).ln();
    let mut acc = Fixed::ZERO;
    for_each_table(1, x.floor() as u64, |t| {
        for n in t.lo()..t.hi() {
            if t.mu(n) == 0 || !t.coprime_to(n, q) {
                continue;
            }
            let mut term = w.at(t.primes_of(n));
            if k > 0 {
                term = term * (ln_arg - Interval::from_u64(n).ln()).powi(k as i32);
            }
            acc.add_assign_checked(Fixed::from_interval(term)?)?;
        }
        Ok(())
    })?;
    Ok(acc.to_interval())
}

// ---------------------------------------------------------------------------
// Threshold scans
// ---------------------------------------------------------------------------

/// Normalisers of a weighted sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalizer {
    One,
    InvLog,
    InvLog2,
    InvX,
    X,
    InvSqrtX,
}

/// A scan: `sup_{X ∈ [lo, hi]} normalizer(X) · S(X)` where
/// `S(X) = Σ_{ℓ≤X,(ℓ,v)=1} μ²(ℓ) w(ℓ) log^k(X/ℓ)`, or, when `complement`
/// is set, `S(X) = Σ_{ℓ>X}` of the same weight.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanSpec {
    pub id: &'static str,
    pub description: &'static str,
    pub weight: Weight,
    pub log_power: u32,
    pub normalizer: Normalizer,
    pub complement: bool,
    /// Smallest X for which the bound is claimed.
    pub lower: f64,
}

static SCANS: &[ScanSpec] = &[
    ScanSpec {
        id: "sq_half",
        description: "1/log²X · Σ μ²(ℓ)/(√ℓ φ_{1/2}(ℓ)) log(X/ℓ)",
        weight: Weight::SqrtPhiHalf,
        log_power: 1,
        normalizer: Normalizer::InvLog2,
        complement: false,
        lower: 10.0,
    },
    ScanSpec {
        id: "sumvar1log",
        description: "1/log²X · Σ μ²(ℓ) A_ℓ/φ(ℓ) log(X/ℓ)",
        weight: Weight::APhi,
        log_power: 1,
        normalizer: Normalizer::InvLog2,
        complement: false,
        lower: 10.0,
    },
    ScanSpec {
        id: "sumvarp",
        description: "X · Σ_{ℓ>X} μ²(ℓ)/φ(ℓ)²",
        weight: Weight::InvPhiSq,
        log_power: 0,
        normalizer: Normalizer::X,
        complement: true,
        lower: 20.0,
    },
    ScanSpec {
        id: "ss1",
        description: "1/X · Σ μ²(ℓ) ℓ²/φ(ℓ)²",
        weight: Weight::LSqPhiSq,
        log_power: 0,
        normalizer: Normalizer::InvX,
        complement: false,
        lower: 4e5,
    },
    ScanSpec {
        id: "sum_half",
        description: "1/log X · Σ μ²(ℓ)/φ_{1/2}(ℓ)²",
        weight: Weight::InvPhiHalfSq,
        log_power: 0,
        normalizer: Normalizer::InvLog,
        complement: false,
        lower: 20.0,
    },
    ScanSpec {
        id: "sum2_half",
        description: "1/X · Σ μ²(ℓ) ℓ/φ_{1/2}(ℓ)²",
        weight: Weight::LPhiHalfSq,
        log_power: 0,
        normalizer: Normalizer::InvX,
        complement: false,
        lower: 1.0,
    },
];

/// The registered scans.
pub fn scan_specs() -> &'static [ScanSpec] {
    SCANS
}

pub fn scan_spec(id: &str) -> Result<&'static ScanSpec> {
    SCANS
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::Domain(format!("unknown scan `{id}`")))
}

/// Outcome of a threshold scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub id: &'static str,
    pub v: u64,
    pub x_lo: f64,
    pub x_hi: f64,
    /// `[lower, upper]`: `upper` bounds the supremum; `lower` is attained
    /// (or approached) inside the range.
    pub bound: Interval,
    /// Left end of the piece where the largest upper bound occurred.
    pub argmax: f64,
    pub pieces: u64,
    /// Target constant, if one was checked.
    pub target: Option<f64>,
    /// Whether every piece was proven ≤ target.
    pub certified: Option<bool>,
    /// Pieces that needed exact rational comparison.
    pub exact_checks: u64,
    /// First X at which the target could not be certified.
    pub violation: Option<f64>,
}

/// High-precision weights ℓ^a/φ_{1/2}(ℓ)² for small ℓ.
struct HpWeights {
    /// √p · 2^K rounded down.
    sqrt: HashMap<u32, BigUint>,
}

const HP_BITS: u64 = 160;

impl HpWeights {
    fn new() -> Self {
        HpWeights {
            sqrt: HashMap::new(),
        }
    }

    fn weight(&mut self, l: u64, primes: &[u32], with_l: bool) -> Fixed {
        let one = BigUint::from(1u32) << HP_BITS;
        let mut den_lo = BigUint::from(1u32);
        let mut den_hi = BigUint::from(1u32);
        for &p in primes {
            let s = self
                .sqrt
                .entry(p)
                .or_insert_with(|| (BigUint::from(p) << (2 * HP_BITS)).sqrt())
                .clone();
            // √p − 1 ∈ [s − 2^K, s + 1 − 2^K] · 2^{−K}
            let lo = &s - &one;
            let hi = &s + 1u32 - &one;
            den_lo *= &lo * &lo;
            den_hi *= &hi * &hi;
        }
        let shift = 96 + 2 * HP_BITS * primes.len() as u64;
        let num = BigUint::from(if with_l { l } else { 1 }) << shift;
        let lo = &num / &den_hi;
        let (hi, r) = num.div_rem(&den_lo);
        let hi = if r.bits() != 0 { hi + 1u32 } else { hi };
        Fixed {
            lo: i128::try_from(&lo).expect("weight fits"),
            hi: i128::try_from(&hi).expect("weight fits"),
        }
    }
}

fn scan_weight(spec: &ScanSpec, n: u64, primes: &[u32], hp: &mut HpWeights) -> Result<Fixed> {
    match spec.weight {
        Weight::InvPhiSq | Weight::LSqPhiSq => {
            let phi: u128 = primes.iter().map(|&p| p as u128 - 1).product();
            let num: u128 = if spec.weight == Weight::LSqPhiSq {
                (n as u128) * (n as u128)
            } else {
                1
            };
            Ok(fixed_ratio(num, phi * phi))
        }
        Weight::InvPhiHalfSq | Weight::LPhiHalfSq if n <= HP_LIMIT => {
            Ok(hp.weight(n, primes, spec.weight == Weight::LPhiHalfSq))
        }
        w => Fixed::from_interval(w.at(primes)),
    }
}

/// `Σ_{ℓ,(ℓ,v)=1} μ²(ℓ)/φ(ℓ)²` over all ℓ, from the catalog product
/// `∏_p (1 + 1/(p−1)²)` divided by the local factors at `p | v`.
pub fn inv_phi_sq_total(v: u64) -> Result<Interval> {
    let t = eval_catalog("twin_sq", Some(2_000_000))?.total;
    Ok(prime_divisors(v).into_iter().fold(t, |acc, p| {
        acc / (1.0 + 1.0 / (Interval::from_u64(p) - 1.0).sqr())
    }))
}

/// Validated sup of a scan over `[x_lo, x_hi]`, optionally certifying that
/// it stays ≤ `target` (a decimal string, compared exactly where needed).
pub fn threshold_scan(
    id: &str,
    v: u64,
    x_lo: f64,
    x_hi: f64,
    target: Option<&str>,
) -> Result<ScanResult> {
    threshold_scan_with_cap(id, v, x_lo, x_hi, target, SCAN_CAP)
}

/// [`threshold_scan`] with an explicit range cap.
pub fn threshold_scan_with_cap(
    id: &str,
    v: u64,
    x_lo: f64,
    x_hi: f64,
    target: Option<&str>,
    cap: f64,
) -> Result<ScanResult> {
    let spec = scan_spec(id)?;
    if v == 0 {
        return domain("v must be positive");
    }
    if !(1.0 <= x_lo && x_lo <= x_hi) {
        return domain(format!("scan range [{x_lo}, {x_hi}] must satisfy 1 ≤ lo ≤ hi"));
    }
    if x_hi > cap || x_hi > MAX_N as f64 {
        return Err(Error::Resource(format!("scan end {x_hi:e} exceeds the cap {cap:e}")));
    }
    let supported = matches!(
        (spec.log_power, spec.normalizer, spec.complement),
        (1, Normalizer::InvLog2, false)
            | (0, Normalizer::InvLog, false)
            | (0, Normalizer::InvX, false)
            | (0, Normalizer::X, true)
    );
    if !supported {
        return domain(format!("no supremum rule for scan `{id}`"));
    }
    if spec.normalizer == Normalizer::InvLog2 && x_lo <= 1.0 || spec.normalizer == Normalizer::InvLog && x_lo <= 1.0 {
        return domain("logarithmic normalisers need X > 1");
    }
    let target = target.map(Decimal::parse).transpose()?;
    let target_iv = target.map(|d| d.to_interval());
    let total = if spec.complement {
        Some(inv_phi_sq_total(v)?)
    } else {
        None
    };
    let mut hp = HpWeights::new();
    let (mut s0, mut s1) = (Fixed::ZERO, Fixed::ZERO);
    let mut upper = f64::NEG_INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut argmax = x_lo;
    let mut pieces = 0u64;
    let mut exact_checks = 0u64;
    let mut violation: Option<f64> = None;
    let n_hi = x_hi.floor() as u64;
    for_each_table(1, n_hi, |t| {
        for n in t.lo()..t.hi() {
            if t.mu(n) != 0 && t.coprime_to(n, v) {
                let w = scan_weight(spec, n, t.primes_of(n), &mut hp)?;
                s0.add_assign_checked(w)?;
                if spec.log_power == 1 {
                    let wl = w.to_interval() * Interval::from_u64(n).ln();
                    s1.add_assign_checked(Fixed::from_interval(wl)?)?;
                }
            }
            // Piece [a, b] ⊆ [n, n+1) ∩ [x_lo, x_hi] on which S is constant.
            let a = (n as f64).max(x_lo);
            let b = ((n + 1) as f64).min(x_hi);
            if a > b || a >= (n + 1) as f64 {
                continue;
            }
            pieces += 1;
            let s0i = s0.to_interval();
            let (up, lo) = match spec.normalizer {
                Normalizer::InvLog2 => {
                    let s1i = s1.to_interval();
                    let la = Interval::point(a).ln();
                    let lb = Interval::point(b).ln();
                    let f = |l: Interval| (s0i * l - s1i) / l.sqr();
                    let fa = f(la);
                    let mut up = fa.hi.max(f(lb).hi);
                    if s1i.lo > 0.0 {
                        let lstar = 2.0 * s1i / s0i;
                        if lstar.hi >= la.lo && lstar.lo <= lb.hi {
                            up = up.max((s0i.sqr() / (4.0 * s1i)).hi);
                        }
                    }
                    (up, fa.lo)
                }
                Normalizer::InvLog => {
                    let r = s0i / Interval::point(a).ln();
                    (r.hi, r.lo)
                }
                Normalizer::InvX => {
                    let r = s0i / Interval::point(a);
                    (r.hi, r.lo)
                }
                Normalizer::X => {
                    let rest = total.unwrap() - s0i;
                    ((Interval::point(b) * rest).hi, (Interval::point(a) * rest).lo)
                }
                _ => unreachable!(),
            };
            if up > upper {
                upper = up;
                argmax = a;
            }
            lower = lower.max(lo);
            if let (Some(c), Some(civ)) = (target, target_iv) {
                if violation.is_none() && !(up <= civ.lo) {
                    // Inconclusive in binary64: compare exactly where the
                    // form allows it (S/X at an integer X).
                    let ok = if spec.normalizer == Normalizer::InvX && a == n as f64 {
                        exact_checks += 1;
                        let lhs = BigInt::from(s0.hi) * BigInt::from(10u32).pow(c.exponent);
                        let rhs = BigInt::from(c.mantissa) * BigInt::from(n) * (BigInt::from(1u32) << 96);
                        lhs <= rhs
                    } else {
                        false
                    };
                    if !ok {
                        violation = Some(a);
                    }
                }
            }
        }
        Ok(())
    })?;
    Ok(ScanResult {
        id: spec.id,
        v,
        x_lo,
        x_hi,
        bound: Interval::new(lower.min(upper), upper),
        argmax,
        pieces,
        target: target_iv.map(|c| c.mid()),
        certified: target.map(|_| violation.is_none()),
        exact_checks,
        violation,
    })
}
