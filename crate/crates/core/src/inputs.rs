//! Literal inputs imported from the literature and from long machine runs.
//!
//! All such numbers live in `inputs.toml`, compiled into the crate. This
//! module parses that file into typed enclosures and exposes a SHA-256 hash
//! of its bytes so that reports can record exactly which inputs they used.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// The raw contents of the inputs file.
pub const INPUTS_TOML: &str = include_str!("inputs.toml");

#[derive(Debug, Deserialize)]
struct RawInputs {
    literature: RawLiterature,
    kernel: BTreeMap<String, RawKernel>,
    program: BTreeMap<String, String>,
    barrier: RawBarrier,
    integral: RawIntegral,
    reference: BTreeMap<String, [String; 2]>,
}

#[derive(Debug, Deserialize)]
struct RawLiterature {
    cc1: String,
    cc2: String,
    ram: String,
    ram_v2: String,
    inv_check: String,
    check_from: String,
    inv_checkcheck: String,
    gamma: String,
}

#[derive(Debug, Deserialize)]
struct RawKernel {
    t2: String,
    t3: String,
    t4: String,
}

#[derive(Debug, Deserialize)]
struct RawBarrier {
    c1: String,
    c2: String,
}

#[derive(Debug, Deserialize)]
struct RawIntegral {
    x: String,
    v1: [String; 2],
    v2: [String; 2],
}

/// Kernel bounds for one modulus: |h_v(s)| ≤ (T2 log s + T3)/s, and T4 for
/// the logarithmic tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelBounds {
    pub t2: Interval,
    pub t3: Interval,
    pub t4: Interval,
}

impl KernelBounds {
    /// Ψ_v = T2 + T3 / log 20.
    pub fn psi(&self) -> Interval {
        self.t2 + self.t3 / Interval::point(20.0).ln()
    }
}

/// Scan-certified upper bounds for one modulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProgramConstants {
    pub sq_half: Interval,
    pub sumvar1log: Interval,
    pub sumvarp: Interval,
    pub ss1: Interval,
    pub sum_half: Interval,
    pub sum2_half: Interval,
}

/// Parsed literal inputs.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub cc1: Interval,
    pub cc2: Interval,
    pub ram: Interval,
    pub ram_v2: Interval,
    pub inv_check: Interval,
    pub check_from: f64,
    pub inv_checkcheck: Interval,
    pub gamma: Interval,
    kernel: [KernelBounds; 2],
    program: [ProgramConstants; 2],
    barrier: [Interval; 2],
    /// Upper end X of the stored kernel integrals.
    pub integral_x: f64,
    integral: [Interval; 2],
    reference: BTreeMap<String, Interval>,
}

fn dec(s: &str) -> Result<Interval> {
    Interval::from_decimal(s).map_err(|e| Error::Format(format!("inputs: {e}")))
}

fn pair(p: &[String; 2]) -> Result<Interval> {
    let lo = dec(&p[0])?;
    let hi = dec(&p[1])?;
    Interval::try_new(lo.lo, hi.hi).map_err(|e| Error::Format(format!("inputs: {e}")))
}

fn check_v(v: u64) -> usize {
    assert!(v == 1 || v == 2, "modulus v must be 1 or 2, got {v}");
    (v - 1) as usize
}

impl Inputs {
    /// Parse an inputs document.
    pub fn parse(text: &str) -> Result<Inputs> {
        let raw: RawInputs =
            toml::from_str(text).map_err(|e| Error::Format(format!("inputs: {e}")))?;
        let kernel_for = |key: &str| -> Result<KernelBounds> {
            let k = raw
                .kernel
                .get(key)
                .ok_or_else(|| Error::Format(format!("inputs: missing [kernel.{key}]")))?;
            Ok(KernelBounds {
                t2: dec(&k.t2)?,
                t3: dec(&k.t3)?,
                t4: dec(&k.t4)?,
            })
        };
        let prog = |name: &str| -> Result<Interval> {
            raw.program
                .get(name)
                .ok_or_else(|| Error::Format(format!("inputs: missing program.{name}")))
                .and_then(|s| dec(s))
        };
        let program_for = |suffix: &str| -> Result<ProgramConstants> {
            Ok(ProgramConstants {
                sq_half: prog(&format!("sq_half_{suffix}"))?,
                sumvar1log: prog(&format!("sumvar1log_{suffix}"))?,
                sumvarp: prog(&format!("sumvarp_{suffix}"))?,
                ss1: prog(&format!("ss1_{suffix}"))?,
                sum_half: prog(&format!("sum_half_{suffix}"))?,
                sum2_half: prog(&format!("sum2_half_{suffix}"))?,
            })
        };
        let mut reference = BTreeMap::new();
        for (k, v) in &raw.reference {
            reference.insert(k.clone(), pair(v)?);
        }
        let lit = &raw.literature;
        Ok(Inputs {
            cc1: dec(&lit.cc1)?,
            cc2: dec(&lit.cc2)?,
            ram: dec(&lit.ram)?,
            ram_v2: dec(&lit.ram_v2)?,
            inv_check: dec(&lit.inv_check)?,
            check_from: dec(&lit.check_from)?.mid(),
            inv_checkcheck: dec(&lit.inv_checkcheck)?,
            gamma: dec(&lit.gamma)?,
            kernel: [kernel_for("v1")?, kernel_for("v2")?],
            program: [program_for("v1")?, program_for("v2")?],
            barrier: [dec(&raw.barrier.c1)?, dec(&raw.barrier.c2)?],
            integral_x: dec(&raw.integral.x)?.mid(),
            integral: [pair(&raw.integral.v1)?, pair(&raw.integral.v2)?],
            reference,
        })
    }

    /// Kernel bounds T2, T3, T4 for v ∈ {1, 2}.
    pub fn kernel(&self, v: u64) -> KernelBounds {
        self.kernel[check_v(v)]
    }

    /// Scan-certified constants for v ∈ {1, 2}.
    pub fn program(&self, v: u64) -> ProgramConstants {
        self.program[check_v(v)]
    }

    /// Residual constant C_v with |Ξ_v(U)| ≤ C_v U^{−1/3} on [1, 10^7].
    pub fn barrier(&self, v: u64) -> Interval {
        self.barrier[check_v(v)]
    }

    /// Stored enclosure of ∫_1^{integral_x} h_v(s)/s ds.
    pub fn stored_integral(&self, v: u64) -> Interval {
        self.integral[check_v(v)]
    }

    /// Published enclosure of a catalog constant, if one is recorded.
    pub fn reference(&self, id: &str) -> Option<Interval> {
        self.reference.get(id).copied()
    }

    /// All recorded reference enclosures, sorted by id.
    pub fn references(&self) -> impl Iterator<Item = (&str, Interval)> {
        self.reference.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// The compiled-in inputs.
pub fn inputs() -> &'static Inputs {
    static CELL: OnceLock<Inputs> = OnceLock::new();
    CELL.get_or_init(|| Inputs::parse(INPUTS_TOML).expect("bundled inputs.toml is valid"))
}

/// Lower-case hex SHA-256 of the bundled inputs file.
pub fn inputs_hash() -> String {
    let digest = Sha256::digest(INPUTS_TOML.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_inputs_parse() {
        let inp = inputs();
        assert!(inp.cc1.contains(1.044));
        assert!(inp.kernel(1).t4.contains(0.000033536));
        assert!(inp.kernel(2).t2.contains(4.99703));
        assert!(inp.program(1).sq_half.contains(1.4256628496167));
        assert!(inp.barrier(2).contains(1.4731118309395));
        assert!(inp.stored_integral(1).contains(-0.0495100109));
        assert_eq!(inp.integral_x, 1e8);
        assert!(inp.reference("I_prod").unwrap().contains(1.94359645));
        assert!(inp.gamma.contains(0.5772156649015329));
    }

    #[test]
    fn hash_is_stable_hex() {
        let h = inputs_hash();
        assert_eq!(h.len(), 64);
        assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
        assert_eq!(h, inputs_hash());
    }

    #[test]
    fn psi_matches_formula() {
        let k = inputs().kernel(1);
        let want = 3.83717 + 4.89606 / 20f64.ln();
        assert!(k.psi().contains(want) || (k.psi().mid() - want).abs() < 1e-12);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(matches!(Inputs::parse("nope = 1"), Err(Error::Format(_))));
    }
}
