//! Segmented sieving of the Möbius function, squarefree and prime flags,
//! least prime factors and distinct-prime factor lists, together with the
//! multiplicative functions φ, κ, φ_s and κ_s.
//!
//! All per-integer data is exact; intervals only appear when a real power
//! `p^s` is involved.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::interval::Interval;

/// Largest integer the sieve accepts (exclusive upper end `10^9 + 1`).
pub const MAX_N: u64 = 1_000_000_000;
/// Default segment length.
pub const DEFAULT_SEGMENT: u64 = 1 << 22;
/// Hard limit on a single segment, a memory budget of roughly 1.5 GB.
pub const MAX_SEGMENT: u64 = 1 << 26;

/// All primes `p ≤ limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Calls `f` on every block of consecutive primes in `[lo, hi)`, in
/// increasing order. Uses a segmented sieve with a fixed window.
pub fn for_each_prime_block(lo: u64, hi: u64, mut f: impl FnMut(&[u64])) {
    const WINDOW: u64 = 1 << 20;
    let lo = lo.max(2);
    if hi <= lo {
        return;
    }
    let base = primes_up_to(isqrt(hi - 1));
    let mut mark = vec![false; WINDOW as usize];
    let mut block = Vec::with_capacity(WINDOW as usize / 8);
    let mut a = lo;
    while a < hi {
        let b = (a + WINDOW).min(hi);
        let len = (b - a) as usize;
        mark[..len].fill(true);
        for &p in &base {
            let p = p as u64;
            if p * p >= b {
                break;
            }
            let mut m = (a.div_ceil(p) * p).max(p * p);
            while m < b {
                mark[(m - a) as usize] = false;
                m += p;
            }
        }
        block.clear();
        block.extend((0..len).filter(|&i| mark[i]).map(|i| a + i as u64));
        if !block.is_empty() {
            f(&block);
        }
        a = b;
    }
}

/// Sieve output for the integers of `[lo, hi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArithTable {
    lo: u64,
    hi: u64,
    mu: Vec<i8>,
    lpf: Vec<u32>,
    /// `offsets[i]..offsets[i+1]` indexes the distinct primes of `lo + i`.
    offsets: Vec<u32>,
    primes: Vec<u32>,
}

/// Sieve `[lo, hi)`: μ, squarefree and prime flags, least prime factor and
/// the sorted list of distinct prime divisors of every integer.
pub fn sieve_segment(lo: u64, hi: u64) -> Result<ArithTable> {
    if lo < 1 || hi <= lo || hi > MAX_N + 1 {
        return domain(format!(
            "sieve range [{lo}, {hi}) must satisfy 1 ≤ lo < hi ≤ {}",
            MAX_N + 1
        ));
    }
    if hi - lo > MAX_SEGMENT {
        return Err(Error::Resource(format!(
            "segment of {} integers exceeds the limit {MAX_SEGMENT}",
            hi - lo
        )));
    }
    let len = (hi - lo) as usize;
    let mut rem: Vec<u32> = (lo..hi).map(|n| n as u32).collect();
    let mut count = vec![0u8; len];
    let mut squarefree = vec![true; len];
    let base = primes_up_to(isqrt(hi - 1));

    for &p in &base {
        let p64 = p as u64;
        let mut m = lo.div_ceil(p64) * p64;
        while m < hi {
            let i = (m - lo) as usize;
            count[i] += 1;
            let mut r = rem[i] / p;
            if r % p == 0 {
                squarefree[i] = false;
                while r % p == 0 {
                    r /= p;
                }
            }
            rem[i] = r;
            m += p64;
        }
    }

    let mut offsets = Vec::with_capacity(len + 1);
    let mut total = 0u32;
    offsets.push(0);
    for i in 0..len {
        total += count[i] as u32 + (rem[i] > 1) as u32;
        offsets.push(total);
    }
    let mut primes = vec![0u32; total as usize];
    let mut fill = vec![0u8; len];
    for &p in &base {
        let p64 = p as u64;
        let mut m = lo.div_ceil(p64) * p64;
        while m < hi {
            let i = (m - lo) as usize;
            primes[(offsets[i] + fill[i] as u32) as usize] = p;
            fill[i] += 1;
            m += p64;
        }
    }
    let mut mu = vec![0i8; len];
    let mut lpf = vec![0u32; len];
    for i in 0..len {
        if rem[i] > 1 {
            primes[(offsets[i] + fill[i] as u32) as usize] = rem[i];
        }
        let (a, b) = (offsets[i] as usize, offsets[i + 1] as usize);
        if b > a {
            lpf[i] = primes[a];
        }
        if squarefree[i] {
            mu[i] = if (b - a) % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(ArithTable {
        lo,
        hi,
        mu,
        lpf,
        offsets,
        primes,
    })
}

impl ArithTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    #[inline]
    fn idx(&self, n: u64) -> usize {
        debug_assert!(self.lo <= n && n < self.hi, "{n} outside table");
        (n - self.lo) as usize
    }

    /// μ(n).
    #[inline]
    pub fn mu(&self, n: u64) -> i8 {
        self.mu[self.idx(n)]
    }

    /// μ over the whole table, indexed from `lo`.
    pub fn mu_slice(&self) -> &[i8] {
        &self.mu
    }

    #[inline]
    pub fn is_squarefree(&self, n: u64) -> bool {
        self.mu(n) != 0
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        let i = self.idx(n);
        self.offsets[i + 1] - self.offsets[i] == 1 && self.lpf[i] as u64 == n
    }

    /// Least prime factor (0 for n = 1).
    #[inline]
    pub fn lpf(&self, n: u64) -> u32 {
        self.lpf[self.idx(n)]
    }

    /// Sorted distinct prime divisors of `n`.
    #[inline]
    pub fn primes_of(&self, n: u64) -> &[u32] {
        let i = self.idx(n);
        &self.primes[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// κ(n) = n ∏_{p|n}(1 + 1/p) for squarefree n, i.e. ∏ (p + 1).
    #[inline]
    pub fn kappa_squarefree(&self, n: u64) -> u64 {
        self.primes_of(n).iter().map(|&p| p as u64 + 1).product()
    }

    /// φ(n) for squarefree n, i.e. ∏ (p − 1).
    #[inline]
    pub fn phi_squarefree(&self, n: u64) -> u64 {
        self.primes_of(n).iter().map(|&p| p as u64 - 1).product()
    }

    /// True iff `n` has no prime factor dividing `q`.
    #[inline]
    pub fn coprime_to(&self, n: u64, q: u64) -> bool {
        q == 1 || self.primes_of(n).iter().all(|&p| q % p as u64 != 0)
    }

    /// Write the table to a binary cache file.
    ///
    /// Layout (all integers little-endian): magic `b"SMUC"`, format version
    /// `u32`, `lo: u64`, `hi: u64`, then one flag byte per integer
    /// (bits 0–1: μ + 1, bit 2: squarefree, bit 3: prime), `lpf` as `u32`
    /// per integer, the factor-list offsets (`len + 1` × `u32`) and the
    /// factor lists themselves (`u32` each).
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut out = Vec::with_capacity(self.len() * 16 + 32);
        out.extend_from_slice(CACHE_MAGIC);
        out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        out.extend_from_slice(&self.lo.to_le_bytes());
        out.extend_from_slice(&self.hi.to_le_bytes());
        for n in self.lo..self.hi {
            let m = self.mu(n);
            let flags = ((m + 1) as u8) | ((m != 0) as u8) << 2 | (self.is_prime(n) as u8) << 3;
            out.push(flags);
        }
        for &l in &self.lpf {
            out.extend_from_slice(&l.to_le_bytes());
        }
        for &o in &self.offsets {
            out.extend_from_slice(&o.to_le_bytes());
        }
        for &p in &self.primes {
            out.extend_from_slice(&p.to_le_bytes());
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(&out)?;
        Ok(())
    }

    /// Read a table written by [`ArithTable::write_cache`].
    pub fn read_cache(path: &Path) -> Result<ArithTable> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        let mut r = ByteReader { buf: &buf, pos: 0 };
        if r.take(4)? != CACHE_MAGIC {
            return Err(Error::Format("bad sieve cache magic".into()));
        }
        let version = r.u32()?;
        if version != CACHE_VERSION {
            return Err(Error::Format(format!("unsupported cache version {version}")));
        }
        let lo = r.u64()?;
        let hi = r.u64()?;
        if lo < 1 || hi <= lo || hi - lo > MAX_SEGMENT {
            return Err(Error::Format(format!("bad cache range [{lo}, {hi})")));
        }
        let len = (hi - lo) as usize;
        let flags = r.take(len)?.to_vec();
        let lpf = (0..len).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let offsets = (0..=len).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let total = *offsets.last().unwrap() as usize;
        let primes = (0..total).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let mu = flags.iter().map(|&f| (f & 3) as i8 - 1).collect();
        Ok(ArithTable {
            lo,
            hi,
            mu,
            lpf,
            offsets,
            primes,
        })
    }
}

const CACHE_MAGIC: &[u8; 4] = b"SMUC";
const CACHE_VERSION: u32 = 1;

pub(crate) struct ByteReader<'a> {
    pub buf: &'a [u8],
    pub pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Format("unexpected end of file".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Distinct prime factorisation by trial division: `(p, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Distinct prime divisors of `n`.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// μ(n) by trial division.
pub fn mobius(n: u64) -> i8 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The arithmetic data of one integer: exact φ(n), κ(n), and interval
/// evaluations of φ_s(n) = n^s ∏_{p|n}(1 − p^{−s}) and
/// κ_s(n) = n^s ∏_{p|n}(1 + p^{−s}).
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativeValue {
    pub n: u64,
    pub phi: u64,
    pub kappa: u64,
    factors: Vec<(u64, u32)>,
}

impl MultiplicativeValue {
    /// φ_s(n).
    pub fn phi_s(&self, s: Interval) -> Interval {
        self.generalized(s, -1.0)
    }

    /// κ_s(n).
    pub fn kappa_s(&self, s: Interval) -> Interval {
        self.generalized(s, 1.0)
    }

    fn generalized(&self, s: Interval, sign: f64) -> Interval {
        let mut acc = Interval::ONE;
        for &(p, e) in &self.factors {
            let pe = Interval::from_u64(p).pow(s);
            // p^{e s}(1 ± p^{−s}) = p^{(e−1)s}(p^s ± 1)
            let mut f = pe + sign;
            if e > 1 {
                f *= Interval::from_u64(p).pow(s * (e - 1) as f64);
            }
            acc *= f;
        }
        acc
    }
}

/// Exact φ and κ of `n` plus access to φ_s, κ_s.
pub fn mult_value(n: u64) -> MultiplicativeValue {
    assert!(n >= 1, "mult_value needs n ≥ 1");
    let factors = factorize(n);
    let mut phi = 1u64;
    let mut kappa = 1u64;
    for &(p, e) in &factors {
        let pe1 = p.pow(e - 1);
        phi *= pe1 * (p - 1);
        kappa *= pe1 * (p + 1);
    }
    MultiplicativeValue {
        n,
        phi,
        kappa,
        factors,
    }
}

/// True iff gcd(n, q) = 1.
#[inline]
pub fn coprime_filter(n: u64, q: u64) -> bool {
    num_integer::gcd(n, q) == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_mobius_values() {
        let t = sieve_segment(1, 11).unwrap();
        let mu: Vec<i8> = (1..11).map(|n| t.mu(n)).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
        assert_eq!(sieve_segment(1, 31).unwrap().mu(30), -1);
        assert_eq!(t.lpf(1), 0);
        assert_eq!(t.lpf(9), 3);
        assert!(t.is_prime(7) && !t.is_prime(9) && !t.is_prime(1));
    }

    #[test]
    fn squarefree_count_to_a_million() {
        let t = sieve_segment(1, 1_000_001).unwrap();
        let c = (1..=1_000_000u64).filter(|&n| t.is_squarefree(n)).count();
        // Brute force: n is squarefree iff no k² (k ≥ 2) divides it.
        let mut sqf = vec![true; 1_000_001];
        let mut k = 2usize;
        while k * k <= 1_000_000 {
            let mut m = k * k;
            while m <= 1_000_000 {
                sqf[m] = false;
                m += k * k;
            }
            k += 1;
        }
        let brute = (1..=1_000_000).filter(|&n| sqf[n]).count();
        assert_eq!(c, brute);
        assert_eq!(c, 607926);
        let mut m = 0i64;
        for n in 1..=1_000_000u64 {
            m += t.mu(n) as i64;
            assert!((m * m) as u64 <= n, "Mertens bound fails at {n}");
        }
    }

    #[test]
    fn segments_concatenate() {
        let whole = sieve_segment(1, 5000).unwrap();
        let mut a = 1;
        for b in [700u64, 2311, 2312, 5000] {
            let part = sieve_segment(a, b).unwrap();
            for n in a..b {
                assert_eq!(part.mu(n), whole.mu(n));
                assert_eq!(part.lpf(n), whole.lpf(n));
                assert_eq!(part.primes_of(n), whole.primes_of(n));
                assert_eq!(part.is_prime(n), whole.is_prime(n));
            }
            a = b;
        }
    }

    #[test]
    fn multiplicative_values() {
        let v = mult_value(6);
        assert_eq!((v.phi, v.kappa), (2, 12));
        let half = Interval::point(0.5);
        assert!(mult_value(2).phi_s(half).contains(2f64.sqrt() - 1.0));
        let one = mult_value(1);
        assert_eq!(one.phi_s(half), Interval::ONE);
        assert_eq!(one.kappa_s(half), Interval::ONE);
        // s = 1 agrees with the exact integers, also for prime powers.
        for n in [12u64, 45, 97, 360] {
            let v = mult_value(n);
            assert!(v.phi_s(Interval::ONE).contains(v.phi as f64));
            assert!(v.kappa_s(Interval::ONE).contains(v.kappa as f64));
        }
    }

    #[test]
    fn coprimality() {
        assert!(coprime_filter(9, 2));
        assert!(!coprime_filter(6, 2));
        assert!((1..50).all(|q| coprime_filter(1, q)));
    }

    #[test]
    fn cache_round_trip() {
        let t = sieve_segment(1000, 3000).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seg.bin");
        t.write_cache(&path).unwrap();
        assert_eq!(ArithTable::read_cache(&path).unwrap(), t);
        std::fs::write(&path, b"junk").unwrap();
        assert!(ArithTable::read_cache(&path).is_err());
    }

    #[test]
    fn prime_blocks() {
        let mut v = Vec::new();
        for_each_prime_block(1, 100, |b| v.extend_from_slice(b));
        assert_eq!(v.len(), 25);
        let mut c = 0;
        for_each_prime_block(1, 10_000_000, |b| c += b.len());
        assert_eq!(c, 664579);
    }
}
