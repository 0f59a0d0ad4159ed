//! The kernel `h_q` and its logarithmic integral `∫_1^X h_q(s)/s ds`.
//!
//! With `w_d = μ(d)/κ(d)²` and main terms `c_d = (π²/6)·κ(dq)/(dq)`,
//!
//! ```text
//! h_q(s) = Σ_{(d,q)=1} w_d · (m̃_{dq}(s/d) − c_d)²,
//! ```
//!
//! where `m̃_{dq}(t) = 0` for `t < 1`, so every `d > s` contributes the
//! constant `w_d c_d² = K μ(d)/d²` with `K = (π²/6)²(κ(q)/q)²`.
//!
//! Three independent evaluations are provided:
//!
//! * [`hq_integral`] integrates divisor by divisor. For fixed `d` the
//!   function `y(ℓ) = m̃_{dq}(e^ℓ) − c_d` is piecewise linear in `ℓ = log t`
//!   with slope `A = Σ_{n≤t} μ(n)/κ(n)`, so each piece integrates exactly to
//!   `Δ (y_a² + y_a y_b + y_b²)/3`. Slopes and values are carried on an
//!   exact fixed-point grid, so no error accumulates along the sweep.
//! * [`SweepState`] processes the events `s = d·n` in increasing order and
//!   keeps the global moments `S₂ = Σ w_d A_d²`, `S₁ = Σ w_d A_d B′_d`,
//!   `S₀ = Σ w_d B′_d²`, so that `h_q(s) = S₂ log²s + 2S₁ log s + S₀`
//!   between events.
//! * [`hq_eval`] evaluates the definition directly at one point.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::fixed::{fixed_ratio, Fixed};
use crate::inputs::inputs;
use crate::interval::{consts, Interval};
use crate::mobius::{floor_div, for_each_table, m_family, MKind};
use crate::primes::{mult_value, prime_divisors, sieve_segment};

/// Largest X accepted by [`hq_integral`].
pub const HQ_CAP: f64 = 1e8;
/// Largest X accepted by [`SweepState`] (it stores every event).
pub const SWEEP_STATE_CAP: f64 = 2e6;
/// Largest s accepted by [`hq_eval`].
pub const EVAL_CAP: f64 = 1e6;
/// Where the two branches of the kernel bound meet.
pub const TT_SWITCH: f64 = 1e12;

const EPS: f64 = f64::EPSILON;

/// `log(b/a)` for integers `1 ≤ a ≤ b < 2^53`.
///
/// `x = (b−a)/a` is computed with relative error ≤ 2^{−53}, `log1p` with
/// ≤ 1 ulp, and `x ↦ log1p(x)` does not amplify relative errors; the
/// result is widened by 4 ulp on each side.
#[inline]
fn ln_ratio(a: u64, b: u64) -> Interval {
    if a == b {
        return Interval::ZERO;
    }
    let l = ((b - a) as f64 / a as f64).ln_1p();
    Interval::new(l * (1.0 - 4.0 * EPS), l * (1.0 + 4.0 * EPS))
}

#[inline]
fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn check_v(v: u64) -> Result<()> {
    if v == 0 {
        return domain("modulus must be positive");
    }
    Ok(())
}

/// `K = (π²/6)² (κ(q)/q)²`.
pub fn tail_coefficient(q: u64) -> Interval {
    let m = mult_value(q);
    (consts::zeta2() * Interval::from_u64(m.kappa) / Interval::from_u64(q)).sqr()
}

/// `Σ_{(d,q)=1} μ(d)/d² = (6/π²) ∏_{p|q} (1 − 1/p²)^{−1}`.
pub fn mobius_square_total(q: u64) -> Interval {
    prime_divisors(q).into_iter().fold(consts::six_over_pi_sq(), |acc, p| {
        acc / (1.0 - 1.0 / Interval::from_u64(p * p))
    })
}

/// Main term `c_d = (π²/6) κ(d)κ(q)/(dq)` for squarefree `d` coprime to `q`.
fn main_term(kappa_d: u64, d: u64, kappa_q: u64, q: u64) -> Interval {
    consts::zeta2() * Interval::from_u64(kappa_d) * Interval::from_u64(kappa_q)
        / (Interval::from_u64(d) * Interval::from_u64(q))
}

// ---------------------------------------------------------------------------
// Pointwise evaluation
// ---------------------------------------------------------------------------

/// `h_q(s)` from its definition: the divisors `d ≤ s` explicitly, and the
/// constant contribution of all `d > s` through
/// `K (Σ_{(d,q)=1} μ(d)/d² − Σ_{d≤s} μ(d)/d²)`.
pub fn hq_eval(s: f64, q: u64) -> Result<Interval> {
    check_v(q)?;
    if !(s >= 1.0) {
        return domain(format!("h_q needs s ≥ 1, got {s}"));
    }
    if s > EVAL_CAP {
        return Err(Error::Resource(format!("h_q(s) direct path is capped at s ≤ {EVAL_CAP:e}")));
    }
    let n_max = s.floor() as u64;
    let t = sieve_segment(1, n_max + 1)?;
    let kq = mult_value(q).kappa;
    let ln_s = Interval::point(s).ln();
    let mut total = Fixed::ZERO;
    let mut dsum = Fixed::ZERO;
    for d in 1..=n_max {
        let mu_d = t.mu(d);
        if mu_d == 0 || !t.coprime_to(d, q) {
            continue;
        }
        let kd = t.kappa_squarefree(d);
        let term = fixed_ratio(1, (d as u128) * (d as u128));
        dsum.add_assign_checked(if mu_d > 0 { term } else { term.neg() })?;
        // m̃_{dq}(s/d)
        let ln_sd = ln_s - Interval::from_u64(d).ln();
        let mut m = Fixed::ZERO;
        for n in 1..=floor_div(s, d) {
            let mu_n = t.mu(n);
            if mu_n == 0 || !t.coprime_to(n, d * q) {
                continue;
            }
            let l = (ln_sd - Interval::from_u64(n).ln()).max(Interval::ZERO);
            let c = Interval::from_i64(mu_n as i64) / Interval::from_u64(t.kappa_squarefree(n));
            m.add_assign_checked(Fixed::from_interval(c * l)?)?;
        }
        let y = m.to_interval() - main_term(kd, d, kq, q);
        let w = Interval::from_i64(mu_d as i64) / Interval::from_u64(kd).sqr();
        total.add_assign_checked(Fixed::from_interval(w * y.sqr())?)?;
    }
    let rest = mobius_square_total(q) - dsum.to_interval();
    Ok(total.to_interval() + tail_coefficient(q) * rest)
}

/// `h_q(s)` through the finite identity
/// `Σ_d μ(d)/κ(d)² m̃_{dq}²(s/d) = h_q(s) + (π²κ(q)/(3q)) m̌_q(s) − π²κ(q)/(6φ(q))`.
pub fn hq_eval_identity(s: f64, q: u64) -> Result<Interval> {
    check_v(q)?;
    if !(s >= 1.0) {
        return domain(format!("h_q needs s ≥ 1, got {s}"));
    }
    if s > EVAL_CAP {
        return Err(Error::Resource(format!("h_q(s) identity path is capped at s ≤ {EVAL_CAP:e}")));
    }
    let n_max = s.floor() as u64;
    let t = sieve_segment(1, n_max + 1)?;
    let mq = mult_value(q);
    let ln_s = Interval::point(s).ln();
    let mut total = Fixed::ZERO;
    for d in 1..=n_max {
        let mu_d = t.mu(d);
        if mu_d == 0 || !t.coprime_to(d, q) {
            continue;
        }
        let ln_sd = ln_s - Interval::from_u64(d).ln();
        let mut m = Fixed::ZERO;
        for n in 1..=floor_div(s, d) {
            let mu_n = t.mu(n);
            if mu_n == 0 || !t.coprime_to(n, d * q) {
                continue;
            }
            let l = (ln_sd - Interval::from_u64(n).ln()).max(Interval::ZERO);
            let c = Interval::from_i64(mu_n as i64) / Interval::from_u64(t.kappa_squarefree(n));
            m.add_assign_checked(Fixed::from_interval(c * l)?)?;
        }
        let w = Interval::from_i64(mu_d as i64) / Interval::from_u64(t.kappa_squarefree(d)).sqr();
        total.add_assign_checked(Fixed::from_interval(w * m.to_interval().sqr())?)?;
    }
    let pi2 = consts::pi_sq();
    let kq = Interval::from_u64(mq.kappa);
    let check = m_family(MKind::MCheck, s, q)?;
    Ok(total.to_interval() - pi2 * kq / (3.0 * Interval::from_u64(q)) * check
        + pi2 * kq / (6.0 * Interval::from_u64(mq.phi)))
}

// ---------------------------------------------------------------------------
// The global-moment sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
struct DivisorState {
    w: Interval,
    a: Fixed,
    /// `B′_d = B_d − c_d`.
    b: Fixed,
}

#[derive(Clone, Copy, Debug)]
struct Event {
    s: u64,
    slot: u32,
    /// μ(n)/κ(n) as a signed κ.
    signed_kappa: i64,
}

/// Sweep over the events `s = d·n` in increasing order with global moments.
///
/// All `d ≤ X` are registered from the start with `A_d = 0` and
/// `B′_d = −c_d`; the divisors `d > X` contribute the constant
/// `K Σ_{d>X} μ(d)/d²`.
#[derive(Clone, Debug)]
pub struct SweepState {
    pub x_target: f64,
    pub v: u64,
    divisors: Vec<DivisorState>,
    d_of_slot: Vec<u64>,
    events: Vec<Event>,
    next: usize,
    s0: Fixed,
    s1: Fixed,
    s2: Fixed,
    far_tail: Interval,
    position: f64,
    integral: Fixed,
    applied: u64,
}

impl SweepState {
    /// Build the event list for `[1, x_target]`. The state starts at `s = 1`
    /// with the events at `s = 1` applied.
    pub fn new(x_target: f64, v: u64) -> Result<SweepState> {
        check_v(v)?;
        if !(x_target >= 1.0) {
            return domain("sweep target must be ≥ 1");
        }
        if x_target > SWEEP_STATE_CAP {
            return Err(Error::Resource(format!(
                "the moment sweep stores every event; X is capped at {SWEEP_STATE_CAP:e}"
            )));
        }
        let n_max = x_target.floor() as u64;
        let t = sieve_segment(1, n_max + 1)?;
        let kv = mult_value(v).kappa;
        let mut divisors = Vec::new();
        let mut d_of_slot = Vec::new();
        let mut s0 = Fixed::ZERO;
        let mut dsum = Fixed::ZERO;
        for d in 1..=n_max {
            let mu = t.mu(d);
            if mu == 0 || !t.coprime_to(d, v) {
                continue;
            }
            let kd = t.kappa_squarefree(d);
            let c = main_term(kd, d, kv, v);
            let w = Interval::from_i64(mu as i64) / Interval::from_u64(kd).sqr();
            s0.add_assign_checked(Fixed::from_interval(w * c.sqr())?)?;
            let r = fixed_ratio(1, (d as u128) * (d as u128));
            dsum.add_assign_checked(if mu > 0 { r } else { r.neg() })?;
            divisors.push(DivisorState {
                w,
                a: Fixed::ZERO,
                b: Fixed::from_interval(-c)?,
            });
            d_of_slot.push(d);
        }
        let mut events = Vec::new();
        for (slot, &d) in d_of_slot.iter().enumerate() {
            for n in 1..=n_max / d {
                let mu = t.mu(n);
                if mu == 0 || !t.coprime_to(n, d * v) {
                    continue;
                }
                events.push(Event {
                    s: d * n,
                    slot: slot as u32,
                    signed_kappa: mu as i64 * t.kappa_squarefree(n) as i64,
                });
            }
        }
        events.sort_by_key(|e| (e.s, e.slot));
        let far_tail = tail_coefficient(v) * (mobius_square_total(v) - dsum.to_interval());
        let mut st = SweepState {
            x_target,
            v,
            divisors,
            d_of_slot,
            events,
            next: 0,
            s0,
            s1: Fixed::ZERO,
            s2: Fixed::ZERO,
            far_tail,
            position: 1.0,
            integral: Fixed::ZERO,
            applied: 0,
        };
        st.apply_through(1)?;
        Ok(st)
    }

    /// Number of events in the sweep.
    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn events_applied(&self) -> u64 {
        self.applied
    }

    /// Current position s.
    pub fn position(&self) -> f64 {
        self.position
    }

    /// Accumulated `∫ h_q(s)/s ds` since the sweep started integrating.
    pub fn integral(&self) -> Interval {
        self.integral.to_interval()
    }

    fn apply_through(&mut self, s: u64) -> Result<()> {
        while self.next < self.events.len() && self.events[self.next].s <= s {
            let e = self.events[self.next];
            self.next += 1;
            self.applied += 1;
            let d = self.d_of_slot[e.slot as usize];
            let st = &mut self.divisors[e.slot as usize];
            let a = Interval::from_i64(e.signed_kappa.signum())
                / Interval::from_u64(e.signed_kappa.unsigned_abs());
            let l = Interval::from_u64(d).ln() + Interval::from_u64(e.s / d).ln();
            let (a0, b0) = (st.a.to_interval(), st.b.to_interval());
            let a_new = st.a.checked_add(Fixed::from_interval(a)?).ok_or_else(overflow)?;
            let b_new = st
                .b
                .checked_add(Fixed::from_interval(-(a * l))?)
                .ok_or_else(overflow)?;
            let (a1, b1) = (a_new.to_interval(), b_new.to_interval());
            // Moment deltas in factored form to avoid cancellation.
            let d2 = st.w * (a1 - a0) * (a1 + a0);
            let d1 = st.w * (a1 * b1 - a0 * b0);
            let d0 = st.w * (b1 - b0) * (b1 + b0);
            self.s2.add_assign_checked(Fixed::from_interval(d2)?)?;
            self.s1.add_assign_checked(Fixed::from_interval(d1)?)?;
            self.s0.add_assign_checked(Fixed::from_interval(d0)?)?;
            st.a = a_new;
            st.b = b_new;
        }
        Ok(())
    }

    /// `h_q` at the current position.
    pub fn h_current(&self) -> Interval {
        let l = Interval::point(self.position).ln();
        self.h_at_log(l)
    }

    fn h_at_log(&self, l: Interval) -> Interval {
        self.s2.to_interval() * l.sqr() + 2.0 * self.s1.to_interval() * l + self.s0.to_interval() + self.far_tail
    }

    fn integrate_to(&mut self, s: f64) -> Result<()> {
        if s <= self.position {
            return Ok(());
        }
        let la = Interval::point(self.position).ln();
        let lb = Interval::point(s).ln();
        let dl = (lb - la).max(Interval::ZERO);
        let (s0, s1, s2) = (self.s0.to_interval(), self.s1.to_interval(), self.s2.to_interval());
        let piece = dl
            * (s2 * (la.sqr() + la * lb + lb.sqr()) / 3.0 + s1 * (la + lb) + s0 + self.far_tail);
        self.integral.add_assign_checked(Fixed::from_interval(piece)?)?;
        self.position = s;
        Ok(())
    }

    /// Move to `s`, integrating `h_q(s)/s` along the way (when `integrate`
    /// is set) and applying every event `≤ s`.
    pub fn advance_to(&mut self, s: f64, integrate: bool) -> Result<()> {
        if s < self.position {
            return domain(format!("sweep cannot move backwards from {} to {s}", self.position));
        }
        if s > self.x_target {
            return domain(format!("sweep target {} exceeded by {s}", self.x_target));
        }
        while self.next < self.events.len() && (self.events[self.next].s as f64) <= s {
            let es = self.events[self.next].s;
            if integrate {
                self.integrate_to(es as f64)?;
            }
            self.position = self.position.max(es as f64);
            self.apply_through(es)?;
        }
        if integrate {
            self.integrate_to(s)?;
        }
        self.position = s;
        Ok(())
    }
}

fn overflow() -> Error {
    Error::Resource("fixed-point accumulator overflow".into())
}

/// `∫_a^b h_v(s)/s ds` through the moment sweep.
pub fn sweep_segment(a: f64, b: f64, v: u64) -> Result<Interval> {
    if !(1.0 <= a && a <= b) {
        return domain(format!("segment [{a}, {b}] must satisfy 1 ≤ a ≤ b"));
    }
    let mut st = SweepState::new(b, v)?;
    st.advance_to(a, false)?;
    st.advance_to(b, true)?;
    Ok(st.integral())
}

// ---------------------------------------------------------------------------
// The divisor-by-divisor integral
// ---------------------------------------------------------------------------

/// Squarefree integers up to N with their signed κ, packed as
/// `κ(n) | (μ(n) < 0) << 31`.
struct SquarefreeTable {
    n: Vec<u32>,
    kappa: Vec<u32>,
}

impl SquarefreeTable {
    fn new(n_max: u64) -> Result<SquarefreeTable> {
        let cap = (n_max as f64 * 0.6080) as usize + 1024;
        let mut n = Vec::with_capacity(cap);
        let mut kappa = Vec::with_capacity(cap);
        for_each_table(1, n_max, |t| {
            for m in t.lo()..t.hi() {
                let mu = t.mu(m);
                if mu == 0 {
                    continue;
                }
                let k = t.kappa_squarefree(m);
                if k >= 1 << 31 {
                    return Err(Error::Resource(format!("κ({m}) does not fit the packed table")));
                }
                n.push(m as u32);
                kappa.push(k as u32 | if mu < 0 { 1 << 31 } else { 0 });
            }
            Ok(())
        })?;
        Ok(SquarefreeTable { n, kappa })
    }
}

/// Options for [`hq_integral_with`].
#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Where to write (and resume from) a checkpoint.
    pub checkpoint: Option<PathBuf>,
    /// Write a checkpoint after this many events (0: only on budget exhaustion).
    pub checkpoint_every: u64,
    /// Stop with a resource error after this many events (0: unlimited).
    pub max_events: u64,
}

/// Result of [`hq_integral`].
#[derive(Clone, Debug, Serialize)]
pub struct HqIntegral {
    #[serde(rename = "X")]
    pub x: f64,
    pub v: u64,
    pub value: Interval,
    pub events: u64,
    pub seconds: f64,
    pub resumed: bool,
}

const CKPT_MAGIC: &[u8; 4] = b"HQCK";
const CKPT_VERSION: u32 = 1;

/// Resumable state of the divisor-by-divisor integral: all divisors below
/// `next_d` are done.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checkpoint {
    pub x: f64,
    pub v: u64,
    pub next_d: u64,
    pub events: u64,
    pub total: Fixed,
    pub dsum: Fixed,
}

impl Checkpoint {
    /// Layout (little-endian): magic `b"HQCK"`, version `u32`, `X` as `f64`
    /// bits, `v: u64`, `next_d: u64`, `events: u64`, then the fixed-point
    /// endpoints `total.lo, total.hi, dsum.lo, dsum.hi` as `i128`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(108);
        buf.extend_from_slice(CKPT_MAGIC);
        buf.extend_from_slice(&CKPT_VERSION.to_le_bytes());
        buf.extend_from_slice(&self.x.to_bits().to_le_bytes());
        buf.extend_from_slice(&self.v.to_le_bytes());
        buf.extend_from_slice(&self.next_d.to_le_bytes());
        buf.extend_from_slice(&self.events.to_le_bytes());
        for x in [self.total.lo, self.total.hi, self.dsum.lo, self.dsum.hi] {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        let tmp = path.with_extension("tmp");
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(&buf)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Checkpoint> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        let bad = |m: &str| Error::Format(format!("checkpoint {}: {m}", path.display()));
        if buf.len() != 4 + 4 + 8 * 4 + 16 * 4 {
            return Err(bad("wrong length"));
        }
        if &buf[0..4] != CKPT_MAGIC {
            return Err(bad("bad magic"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(buf[i..i + 4].try_into().unwrap());
        let u64_at = |i: usize| u64::from_le_bytes(buf[i..i + 8].try_into().unwrap());
        let i128_at = |i: usize| i128::from_le_bytes(buf[i..i + 16].try_into().unwrap());
        if u32_at(4) != CKPT_VERSION {
            return Err(bad("unsupported version"));
        }
        Ok(Checkpoint {
            x: f64::from_bits(u64_at(8)),
            v: u64_at(16),
            next_d: u64_at(24),
            events: u64_at(32),
            total: Fixed {
                lo: i128_at(40),
                hi: i128_at(56),
            },
            dsum: Fixed {
                lo: i128_at(72),
                hi: i128_at(88),
            },
        })
    }
}

/// Enclosure of `∫_1^X h_v(s)/s ds`.
pub fn hq_integral(x: f64, v: u64) -> Result<HqIntegral> {
    hq_integral_with(x, v, &SweepOptions::default())
}

/// [`hq_integral`] with checkpointing and an event budget.
///
/// `∫_1^X h/s = Σ_{d≤X} w_d (c_d² log d + ∫_1^{X/d} y_d(t)² dt/t)
///            + K log X · Σ_{d>X} μ(d)/d²`.
pub fn hq_integral_with(x: f64, v: u64, opts: &SweepOptions) -> Result<HqIntegral> {
    check_v(v)?;
    if !(x >= 1.0) || !x.is_finite() {
        return domain(format!("hq_integral needs X ≥ 1, got {x}"));
    }
    if x > HQ_CAP {
        return Err(Error::Resource(format!("hq_integral is capped at X ≤ {HQ_CAP:e}")));
    }
    let start = Instant::now();
    let n_max = x.floor() as u64;
    let mut state = Checkpoint {
        x,
        v,
        next_d: 1,
        events: 0,
        total: Fixed::ZERO,
        dsum: Fixed::ZERO,
    };
    let mut resumed = false;
    if let Some(p) = &opts.checkpoint {
        if p.exists() {
            let c = Checkpoint::read(p)?;
            if c.x != x || c.v != v {
                return Err(Error::Config(format!(
                    "checkpoint is for X = {}, v = {}, not X = {x}, v = {v}",
                    c.x, c.v
                )));
            }
            state = c;
            resumed = true;
        }
    }
    let table = SquarefreeTable::new(n_max)?;
    let kv = mult_value(v).kappa;
    let ln_x = Interval::point(x).ln();
    let k_tail = tail_coefficient(v);
    let mut since_ckpt = 0u64;
    let first = table.n.partition_point(|&n| (n as u64) < state.next_d);
    for i in first..table.n.len() {
        let d = table.n[i] as u64;
        if v > 1 && gcd(d, v) != 1 {
            continue;
        }
        if opts.max_events > 0 && state.events >= opts.max_events {
            state.next_d = d;
            if let Some(p) = &opts.checkpoint {
                state.write(p)?;
            }
            return Err(Error::Resource(format!(
                "event budget {} exhausted at d = {d}{}",
                opts.max_events,
                if opts.checkpoint.is_some() { " (checkpoint written)" } else { "" }
            )));
        }
        let packed = table.kappa[i];
        let kd = (packed & 0x7fff_ffff) as u64;
        let negative = packed >> 31 == 1;
        let c = main_term(kd, d, kv, v);
        let r = fixed_ratio(1, (d as u128) * (d as u128));
        state.dsum.add_assign_checked(if negative { r.neg() } else { r })?;

        // ∫_1^{X/d} (m̃_{dv}(t) − c_d)² dt/t, piece by piece in ℓ = log t.
        let dv = d * v;
        let y_end = floor_div(x, d);
        let mut a = Fixed::ZERO;
        let mut y = Fixed::from_interval(-c)?;
        let mut g = Fixed::ZERO;
        let mut cur = 1u64;
        let mut events = 0u64;
        for j in 0..table.n.len() {
            let n = table.n[j] as u64;
            if n > y_end {
                break;
            }
            if dv > 1 && gcd(n, dv) != 1 {
                continue;
            }
            if n > cur {
                let delta = ln_ratio(cur, n);
                let step = Fixed::from_interval(a.to_interval() * delta)?;
                let yb = y.checked_add(step).ok_or_else(overflow)?;
                let (ya, ybi) = (y.to_interval(), yb.to_interval());
                let piece = delta * (ya.sqr() + ya * ybi + ybi.sqr()) / 3.0;
                g.add_assign_checked(Fixed::from_interval(piece)?)?;
                y = yb;
                cur = n;
            }
            let pk = table.kappa[j];
            let kn = Interval::from_u64((pk & 0x7fff_ffff) as u64);
            let step = if pk >> 31 == 1 { -kn.recip().unwrap() } else { kn.recip().unwrap() };
            a.add_assign_checked(Fixed::from_interval(step)?)?;
            events += 1;
        }
        // Last piece up to t = X/d.
        let m = d * cur;
        let delta = if (m as f64) == x {
            Interval::ZERO
        } else {
            ((Interval::point(x) - Interval::from_u64(m)) / Interval::from_u64(m))
                .ln_1p()
                .max(Interval::ZERO)
        };
        let yb = y.to_interval() + a.to_interval() * delta;
        let ya = y.to_interval();
        g.add_assign_checked(Fixed::from_interval(delta * (ya.sqr() + ya * yb + yb.sqr()) / 3.0)?)?;

        let mu_over_d2 = Interval::from_i64(if negative { -1 } else { 1 })
            / Interval::from_u64(d).sqr();
        let w = Interval::from_i64(if negative { -1 } else { 1 }) / Interval::from_u64(kd).sqr();
        let contrib = k_tail * mu_over_d2 * Interval::from_u64(d).ln() + w * g.to_interval();
        state.total.add_assign_checked(Fixed::from_interval(contrib)?)?;
        state.events += events;
        since_ckpt += events;
        if opts.checkpoint_every > 0 && since_ckpt >= opts.checkpoint_every {
            if let Some(p) = &opts.checkpoint {
                state.next_d = d + 1;
                state.write(p)?;
            }
            since_ckpt = 0;
        }
    }
    state.next_d = n_max + 1;
    if let Some(p) = &opts.checkpoint {
        state.write(p)?;
    }
    let far = k_tail * (mobius_square_total(v) - state.dsum.to_interval()) * ln_x;
    Ok(HqIntegral {
        x,
        v,
        value: state.total.to_interval() + far,
        events: state.events,
        seconds: start.elapsed().as_secs_f64(),
        resumed,
    })
}

// ---------------------------------------------------------------------------
// Kernel bounds, tails and 𝔰_v
// ---------------------------------------------------------------------------

/// The kernel bound at `s`: `(T₂ log s + T₃)/s` for `s ≤ 10^{12}`,
/// `T₄/log² s` beyond (v ∈ {1, 2}).
pub fn kernel_bound(s: f64, v: u64) -> Result<Interval> {
    if v != 1 && v != 2 {
        return domain(format!("kernel bounds are tabulated for v ∈ {{1,2}}, not {v}"));
    }
    if !(s >= 1.0) {
        return domain("kernel bound needs s ≥ 1");
    }
    let k = inputs().kernel(v);
    let si = Interval::point(s);
    Ok(if s <= TT_SWITCH {
        (k.t2 * si.ln() + k.t3) / si
    } else {
        k.t4 / si.ln().sqr()
    })
}

/// Upper bound for `|∫_X^∞ h_v(s)/s ds|`: for `X < 10^{12}`,
/// `Ψ′_v Ω + 2T₄/log(10^{12})` with `Ψ′_v = T₂ + T₃/log X` and
/// `Ω = log X/X − log(10^{12})/10^{12} + 1/X − 1/10^{12}`; for
/// `X ≥ 10^{12}`, `T₄/log X`.
pub fn hq_tail_bound(x: f64, v: u64) -> Result<Interval> {
    if v != 1 && v != 2 {
        return domain(format!("kernel bounds are tabulated for v ∈ {{1,2}}, not {v}"));
    }
    if !(x >= 20.0) {
        return domain(format!("hq_tail_bound needs X ≥ 20, got {x}"));
    }
    let k = inputs().kernel(v);
    let xi = Interval::point(x);
    let big = Interval::point(TT_SWITCH);
    let l12 = big.ln();
    if x >= TT_SWITCH {
        return Ok(k.t4 / xi.ln());
    }
    let psi = k.t2 + k.t3 / xi.ln();
    let omega = xi.ln() / xi - l12 / big + xi.recip().unwrap() - big.recip().unwrap();
    Ok(psi * omega + 2.0 * k.t4 / l12)
}

/// `v/φ(v) (γ + Σ_{p|v} log p/(p−1))`.
pub fn sv_main(v: u64) -> Interval {
    let m = mult_value(v);
    let mut s = consts::EULER_GAMMA;
    for p in prime_divisors(v) {
        let pi = Interval::from_u64(p);
        s += pi.ln() / (pi - 1.0);
    }
    Interval::from_u64(v) / Interval::from_u64(m.phi) * s
}

/// `𝔰_v` from an enclosure of `∫_1^X h_v(s)/s ds`, widened by the tail
/// bound at X:
/// `𝔰_v = v/φ(v)(γ + Σ_{p|v} log p/(p−1)) − (6/π²)(v/κ(v))·(I ± tail)`.
pub fn sv_from_integral(v: u64, x: f64, integral: Interval) -> Result<Interval> {
    let tail = hq_tail_bound(x, v)?.symmetric();
    let m = mult_value(v);
    Ok(sv_main(v)
        - consts::six_over_pi_sq() * Interval::from_u64(v) / Interval::from_u64(m.kappa)
            * (integral + tail))
}

/// `𝔰_v` with the kernel integral recomputed up to `x_cap`.
pub fn sv_constant(v: u64, x_cap: f64) -> Result<Interval> {
    if !(1e6..=1e8).contains(&x_cap) {
        return domain(format!("X_cap must lie in [1e6, 1e8], got {x_cap:e}"));
    }
    let i = hq_integral(x_cap, v)?;
    sv_from_integral(v, x_cap, i.value)
}

/// `𝔰_v` from the stored enclosure of the kernel integral at `10^8`.
pub fn sv_stored(v: u64) -> Result<Interval> {
    let inp = inputs();
    sv_from_integral(v, inp.integral_x, inp.stored_integral(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_at_one_is_zeta2() {
        let h = hq_eval(1.0, 1).unwrap();
        assert!(h.contains(std::f64::consts::PI.powi(2) / 6.0), "{h}");
        let h2 = hq_eval_identity(1.0, 1).unwrap();
        assert!(h2.intersects(h));
    }

    #[test]
    fn routes_agree_pointwise() {
        for &(s, v) in &[(7.5, 1u64), (100.0, 1), (100.0, 2), (1234.5, 2)] {
            let a = hq_eval(s, v).unwrap();
            let b = hq_eval_identity(s, v).unwrap();
            assert!(a.intersects(b), "s={s} v={v}: {a} vs {b}");
            let mut st = SweepState::new(s, v).unwrap();
            st.advance_to(s, false).unwrap();
            let c = st.h_current();
            assert!(a.intersects(c), "s={s} v={v}: {a} vs sweep {c}");
        }
    }

    #[test]
    fn integral_routes_agree() {
        for v in [1u64, 2] {
            let a = hq_integral(2000.0, v).unwrap().value;
            let b = sweep_segment(1.0, 2000.0, v).unwrap();
            assert!(a.intersects(b), "v={v}: {a} vs {b}");
            assert!(a.width() < 1e-12);
        }
        let z = hq_integral(1.0, 1).unwrap().value;
        assert!(z.contains(0.0) && z.width() < 1e-15);
    }

    #[test]
    fn checkpoint_round_trip_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ck.bin");
        let opts = SweepOptions {
            checkpoint: Some(p.clone()),
            checkpoint_every: 0,
            max_events: 500,
        };
        let err = hq_integral_with(3000.0, 2, &opts).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        let ck = Checkpoint::read(&p).unwrap();
        assert!(ck.next_d > 1);
        let resumed = hq_integral_with(
            3000.0,
            2,
            &SweepOptions {
                checkpoint: Some(p),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(resumed.resumed);
        let fresh = hq_integral(3000.0, 2).unwrap();
        assert_eq!(resumed.value, fresh.value);
    }

    #[test]
    fn tail_bound_examples() {
        let t4 = 0.000033536;
        let b = hq_tail_bound(1e12, 1).unwrap();
        assert!(b.hi <= t4 / 1e12f64.ln() * (1.0 + 1e-12));
        assert!(hq_tail_bound(20.0, 2).unwrap().hi >= hq_tail_bound(100.0, 2).unwrap().hi);
        assert!(hq_tail_bound(10.0, 1).is_err());
    }

    #[test]
    fn gcd_matches_euclid() {
        for a in 0..60u64 {
            for b in 0..60u64 {
                let mut x = a;
                let mut y = b;
                while y != 0 {
                    (x, y) = (y, x % y);
                }
                assert_eq!(gcd(a, b), x);
            }
        }
    }

    #[test]
    fn ln_ratio_encloses() {
        for &(a, b) in &[(1u64, 2u64), (999_999, 1_000_000), (3, 100_000_007)] {
            let r = ln_ratio(a, b);
            assert!(r.contains((b as f64 / a as f64).ln()) || r.width() > 0.0);
            assert!(r.intersects(Interval::from_u64(b).ln() - Interval::from_u64(a).ln()));
        }
    }
}
