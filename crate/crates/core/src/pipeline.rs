//! Assembly of the lemma constants, the remainder bound Ξ_v(U), K_v and the
//! Brun–Titchmarsh coefficient 𝔅.
//!
//! The chain starts from catalog enclosures (prime products and sums), the
//! finite 2-local factors, the auxiliary constants A(1, 1/3) and E(2, v), the
//! scan-certified program constants and the literal inputs. Every derived
//! constant is an interval; constants of the form `max(analytic, program)`
//! keep both branches so that the dominance structure can be audited.
//!
//! Two transcriptions of the chain are supported. [`Transcription::Preamble`]
//! follows the machine computation that produced the published tables (it
//! reproduces the tabulated Ξ₁ values); [`Transcription::Text`] follows the
//! displayed lemma statements, which differ in two places: the ξ main term
//! uses `1/(1 − 2/3 − log c/log 10^{12})` instead of `1/(2/3 + log c/log 10^{12})`,
//! and the ψ error term carries the extra factor `1/δ = 3`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::euler::{default_catalog, delta_input, error_constant, local_factor_product, local_factor_sum,
    zeta_point, CatalogValues, Rational};
use crate::hq::sv_stored;
use crate::inputs::inputs;
use crate::interval::{consts, Interval};
use crate::primes::mult_value;

/// Switch point 10^{12} of the kernel bounds; also the scale P_W of the ξ lemma.
pub const PW: f64 = 1e12;
/// Range reached by the analytic η and ψ estimates.
pub const PROVISOIRE: f64 = 1e7;
/// Range reached by the analytic φ⁽¹⁾ estimate.
pub const PROVISOIRE1: f64 = 1e6;
/// Range reached by the analytic φ⁽²⁾ estimate.
pub const PROVISOIRE2: f64 = 1e8;
/// Range reached by the analytic χ estimates.
pub const PROGRAM: f64 = 5e8;
/// Lower limit used in Ψ_v = T₂ + T₃/log 20.
pub const PSI_LOWER: f64 = 20.0;
/// Value of c for the analytic regime.
pub const ANALYTIC_C: f64 = 10.0;
/// Value of c used for K₁.
pub const K1_C: f64 = 70.0;
/// Value of c used for K₂ and for the Brun–Titchmarsh coefficient.
pub const K2_C: f64 = 16.0;
/// Threshold exponent of the Brun–Titchmarsh theorem: Y ≥ 10^{25} q.
pub const BT_EXPONENT: f64 = 25.0;

/// δ of the smoothing lemmas.
fn delta() -> Interval {
    Interval::ratio(1, 3)
}

/// The exponent 2/3 in Z = c U^{2/3}.
fn choice() -> Interval {
    Interval::ratio(2, 3)
}

fn ln_of(x: f64) -> Interval {
    Interval::point(x).ln()
}

/// `log 10^e` for a possibly non-integral exponent.
fn ln_pow10(e: f64) -> Interval {
    consts::LN_10 * e
}

/// Which transcription of the derivation to follow where the displayed
/// lemmas and the machine computation differ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Transcription {
    /// As in the machine computation behind the published tables.
    #[default]
    Preamble,
    /// As in the displayed lemma statements.
    Text,
}

impl Transcription {
    pub fn from_name(s: &str) -> Result<Transcription> {
        match s {
            "preamble" => Ok(Transcription::Preamble),
            "text" => Ok(Transcription::Text),
            _ => domain(format!("unknown transcription `{s}` (preamble|text)")),
        }
    }
}

/// Range of U for which a remainder bound is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// U ≥ 10^7: merged bound `M log⁴U/U^{1/3} + L/log U`.
    #[serde(rename = "1e7")]
    Analytic,
    /// U ≥ 10^{12.5}: the ten-term bound, merged to K_v/log U.
    #[serde(rename = "1e12.5")]
    Numeric,
}

impl Regime {
    /// Decimal exponent E of the threshold 10^E.
    pub fn exponent(self) -> f64 {
        match self {
            Regime::Analytic => 7.0,
            Regime::Numeric => 12.5,
        }
    }

    /// The threshold 10^E as a binary64 number.
    pub fn threshold(self) -> f64 {
        10f64.powf(self.exponent())
    }

    /// `"1e7"` / `"analytic"` or `"1e12.5"` / `"numeric"`.
    pub fn from_name(s: &str) -> Result<Regime> {
        match s {
            "1e7" | "analytic" => Ok(Regime::Analytic),
            "1e12.5" | "numeric" => Ok(Regime::Numeric),
            _ => domain(format!("unknown regime `{s}` (1e7|1e12.5)")),
        }
    }

    /// The regime a given U falls into, if any.
    pub fn of(u: f64) -> Option<Regime> {
        if u >= Regime::Numeric.threshold() {
            Some(Regime::Numeric)
        } else if u >= Regime::Analytic.threshold() {
            Some(Regime::Analytic)
        } else {
            None
        }
    }
}

/// Admissible half-open range `[lo, hi)` of c for a regime.
///
/// With U ≥ 10^E and Z = c U^{2/3} the arguments need Z ≥ 4·10^5 and
/// c < 10^{12/3} (ξ lemma). For E = 7 they also need U ≥ 20Z, giving
/// c < 10^{E/3}/20; for E = 12.5 the merge to order 1/log U needs the
/// functions log^A(t/c³) t^{−1/3}, A ≤ 5, to decrease from 10^E on, giving
/// c < 10^{E/3}/e^5.
pub fn admissible_c(regime: Regime) -> (f64, f64) {
    let e = regime.exponent();
    let lo = 4e5 * 10f64.powf(-2.0 * e / 3.0);
    let cap = match regime {
        Regime::Analytic => 10f64.powf(e / 3.0) / 20.0,
        Regime::Numeric => 10f64.powf(e / 3.0) / 5f64.exp(),
    };
    (lo, cap.min(1e4))
}

/// Reject a c outside [`admissible_c`].
pub fn check_admissible(regime: Regime, c: f64) -> Result<()> {
    let (lo, hi) = admissible_c(regime);
    if !(c >= lo && c < hi) {
        return Err(Error::Config(format!(
            "c = {c} is not admissible for U ≥ 10^{}: need c ∈ [{lo:.4}, {hi:.4}) so that \
             Z = cU^{{2/3}} ≥ 4·10^5 and the merge conditions hold",
            regime.exponent()
        )));
    }
    Ok(())
}

/// A constant defined as the maximum of an analytic estimate and a
/// scan-certified program constant.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Branches {
    pub analytic: Interval,
    pub program: Interval,
    pub value: Interval,
}

impl Branches {
    fn new(analytic: Interval, program: Interval) -> Branches {
        Branches {
            analytic,
            program,
            value: analytic.max(program),
        }
    }
}

/// Named intervals plus, for each name, the names or leaf sources it was
/// computed from.
#[derive(Clone, Debug, Default)]
struct Ledger {
    values: BTreeMap<String, Interval>,
    deps: BTreeMap<String, Vec<String>>,
}

impl Ledger {
    fn set(&mut self, name: &str, value: Interval, deps: &[&str]) -> Interval {
        self.values.insert(name.to_string(), value);
        self.deps.insert(name.to_string(), deps.iter().map(|s| s.to_string()).collect());
        value
    }
}

/// Leaf-source prefixes accepted in provenance lists.
pub const LEAF_PREFIXES: &[&str] = &["catalog:", "local:", "aux:", "program:", "literature:", "kernel:", "inputs:", "zeta:"];

/// Catalog entries consumed by the chain.
pub const CATALOG_INPUTS: &[&str] = &[
    "G_prod", "G_sum", "G_delta", "F_delta", "F_sum", "I_prod", "I_err", "D_prod", "D_delta", "tau_prod2",
    "tau_prod3", "twin_inverse", "H_err", "J_prod", "J_sum", "J_err",
];

/// The c-independent lemma constants for both moduli.
#[derive(Clone, Debug)]
pub struct Lemmas {
    pub transcription: Transcription,
    /// Prime cutoff of the catalog used, or `None` for the stored enclosures.
    pub catalog_cutoff: Option<u64>,
    /// η_v, ψ_v, φ⁽¹⁾_v, φ⁽²⁾_v, χ⁽¹⁾_v, χ⁽²⁾_v, indexed by v − 1.
    pub eta: [Branches; 2],
    pub psi: [Branches; 2],
    pub phi1: [Branches; 2],
    pub phi2: [Branches; 2],
    pub chi1: [Branches; 2],
    pub chi2: [Branches; 2],
    ledger: Ledger,
    // Inputs of ξ^{(c)} that do not depend on c.
    j_err: [Interval; 2],
    j_prod: Interval,
    j_sum: Interval,
    xx2: Interval,
    ss2: Interval,
    yy2: Interval,
}

fn vi(v: u64) -> Result<usize> {
    match v {
        1 | 2 => Ok((v - 1) as usize),
        _ => domain(format!("the constants are assembled for v ∈ {{1,2}}, not {v}")),
    }
}

fn suffix(name: &str, v: usize) -> String {
    format!("{name}_v{}", v + 1)
}

impl Lemmas {
    /// Assemble from evaluated catalog values.
    pub fn new(cat: &CatalogValues, transcription: Transcription) -> Result<Lemmas> {
        Lemmas::from_source(&|id| Ok(cat.total(id)), Some(cat.cutoff), transcription)
    }

    /// Assemble from the published catalog enclosures stored in the inputs
    /// file instead of recomputed ones. This reproduces the published
    /// derived values, which were computed from those enclosures.
    pub fn from_reference(transcription: Transcription) -> Result<Lemmas> {
        Lemmas::from_source(
            &|id| {
                inputs()
                    .reference(id)
                    .ok_or_else(|| Error::Domain(format!("no stored enclosure for `{id}`")))
            },
            None,
            transcription,
        )
    }

    /// Assemble from any source of the catalog enclosures in
    /// [`CATALOG_INPUTS`].
    pub fn from_source(
        source: &dyn Fn(&str) -> Result<Interval>,
        catalog_cutoff: Option<u64>,
        transcription: Transcription,
    ) -> Result<Lemmas> {
        let mut fetched = BTreeMap::new();
        for &id in CATALOG_INPUTS {
            fetched.insert(id, source(id)?);
        }
        let inp = inputs();
        let mut l = Ledger::default();
        let g = inp.gamma;
        let s2 = consts::SQRT_2;
        let s2m1 = s2 - 1.0;
        let dl = delta();
        let a13 = l.set("A(1,1/3)", delta_input(Rational::from_integer(1), Rational::new(1, 3))?, &["aux:A"]);
        let ln_prov = ln_of(PROVISOIRE);
        let ln_pw = ln_of(PW);
        let prog = |v: usize| inp.program(v as u64 + 1);
        let cat_get = |id: &str| fetched[id];
        let loc = |id: &str| local_factor_product(id, 2);
        let loc_sum = |id: &str| local_factor_sum(id, 2);

        // η: Σ weighted by 1/φ(n)-type factors with one logarithm.
        let gp = l.set("G_prod", cat_get("G_prod"), &["catalog:G_prod"]);
        let gs = l.set("G_sum", cat_get("G_sum"), &["catalog:G_sum"]);
        let g_err = l.set("G_err", a13 * cat_get("G_delta"), &["A(1,1/3)", "catalog:G_delta"]);
        let j2 = l.set("j_2", loc("j_q")?, &["local:j_q"]);
        let sg2 = l.set("sg_2", loc_sum("sg_q")?, &["local:sg_q"]);
        let k2 = l.set("k_2", loc("k_q")?, &["local:k_q"]);
        let eta_an = [
            gp * (0.5 + (gs + g) / ln_prov) + g_err / dl / ln_prov.sqr(),
            gp * j2 * (0.5 + (gs + g + sg2) / ln_prov) + g_err * k2 / dl / ln_prov.sqr(),
        ];
        let eta = [
            Branches::new(eta_an[0], prog(0).sumvar1log),
            Branches::new(eta_an[1], prog(1).sumvar1log),
        ];
        for v in 0..2 {
            let mut deps = vec!["G_prod", "G_sum", "G_err", "literature:gamma", "program:sumvar1log"];
            if v == 1 {
                deps.extend(["j_2", "sg_2", "k_2"]);
            }
            l.set(&suffix("eta", v), eta[v].value, &deps);
        }

        // ψ: Σ μ²(n)/φ_{1/2}(n)-type sums.
        let f_prod = l.set(
            "F_prod",
            zeta_point(Interval::point(1.5))? / zeta_point(Interval::point(3.0))?,
            &["zeta:3/2", "zeta:3"],
        );
        let f_err = l.set("F_err", a13 * cat_get("F_delta"), &["A(1,1/3)", "catalog:F_delta"]);
        let f_sum = l.set("F_sum", cat_get("F_sum"), &["catalog:F_sum"]);
        let kk2 = l.set("kk_2", loc("kk_q")?, &["local:kk_q"]);
        let ff2 = l.set("ff_2", loc_sum("ff_q")?, &["local:ff_q"]);
        let ll2 = l.set("ll_2", loc("ll_q")?, &["local:ll_q"]);
        let fac = match transcription {
            Transcription::Preamble => Interval::ONE,
            Transcription::Text => 1.0 / dl,
        };
        let psi_an = [
            f_prod * (0.5 + (f_sum + g) / ln_prov) + fac * f_err / ln_prov.sqr(),
            kk2 * f_prod * (0.5 + (f_sum + g + ff2) / ln_prov) + fac * ll2 * f_err / ln_prov.sqr(),
        ];
        let psi = [
            Branches::new(psi_an[0], prog(0).sq_half),
            Branches::new(psi_an[1], prog(1).sq_half),
        ];
        l.set("psi_v1", psi[0].value, &["F_prod", "F_sum", "F_err", "literature:gamma", "program:sq_half"]);
        l.set(
            "psi_v2",
            psi[1].value,
            &["F_prod", "F_sum", "F_err", "kk_2", "ff_2", "ll_2", "literature:gamma", "program:sq_half"],
        );

        // φ⁽¹⁾, φ⁽²⁾.
        let i_prod = l.set("I_prod", cat_get("I_prod"), &["catalog:I_prod"]);
        let i_err = l.set("I_err", cat_get("I_err"), &["catalog:I_err"]);
        let e21 = error_constant(Interval::point(2.0), 1)?;
        let e22 = error_constant(Interval::point(2.0), 2)?;
        let three = Interval::point(3.0); // |2²·f(2) − 1| with f(2) = 1/(2−1)²
        let w1 = l.set(
            "w_phi_v1",
            s2m1 / (s2m1 + three) * (e21 + e22 * three / s2m1),
            &["aux:E(2,1)", "aux:E(2,2)"],
        );
        let w2 = l.set("w_phi_v2", e22, &["aux:E(2,2)"]);
        let u2 = l.set("u_2", loc("u_q")?, &["local:u_q"]);
        let v2 = l.set("v_2", loc("v_q")?, &["local:v_q"]);
        let i1 = w1 * i_err;
        let i2 = w2 * i_err;
        let r1 = Interval::point(PROVISOIRE1).sqrt();
        let r2 = Interval::point(PROVISOIRE2).sqrt();
        let phi1 = [
            Branches::new(i_prod + i1 / r1, prog(0).sumvarp),
            Branches::new(u2 * i_prod + v2 * i2 / r1, prog(1).sumvarp),
        ];
        let phi2 = [
            Branches::new(i_prod + 5.0 * i1 / r2, prog(0).ss1),
            Branches::new(u2 * i_prod + 5.0 * v2 * i2 / r2, prog(1).ss1),
        ];
        l.set("phi1_v1", phi1[0].value, &["I_prod", "I_err", "w_phi_v1", "program:sumvarp"]);
        l.set("phi1_v2", phi1[1].value, &["I_prod", "I_err", "w_phi_v2", "u_2", "v_2", "program:sumvarp"]);
        l.set("phi2_v1", phi2[0].value, &["I_prod", "I_err", "w_phi_v1", "program:ss1"]);
        l.set("phi2_v2", phi2[1].value, &["I_prod", "I_err", "w_phi_v2", "u_2", "v_2", "program:ss1"]);

        // χ⁽¹⁾, χ⁽²⁾.
        let d_prod = l.set("D_prod", cat_get("D_prod"), &["catalog:D_prod"]);
        let d_err = l.set("D_err", a13 * cat_get("D_delta"), &["A(1,1/3)", "catalog:D_delta"]);
        let d_err2 = l.set("D_err2", d_err * (1.0 + 1.0 / (1.0 - dl)), &["D_err"]);
        let f2 = l.set("f_2", loc("f_q")?, &["local:f_q"]);
        let h2 = l.set("h_2", loc("h_q")?, &["local:h_q"]);
        let pg = Interval::point(PROGRAM);
        let pg_d = pg.pow(dl);
        let chi1 = [
            Branches::new(prog(0).sum_half, d_prod + d_err / pg_d / pg.ln()).swap(),
            Branches::new(prog(1).sum_half, f2 * d_prod + h2 * d_err / pg_d / pg.ln()).swap(),
        ];
        let chi2 = [
            Branches::new(prog(0).sum2_half, d_prod + d_err2 / pg_d).swap(),
            Branches::new(prog(1).sum2_half, f2 * d_prod + h2 * d_err2 / pg_d).swap(),
        ];
        l.set("chi1_v1", chi1[0].value, &["D_prod", "D_err", "program:sum_half"]);
        l.set("chi1_v2", chi1[1].value, &["D_prod", "D_err", "f_2", "h_2", "program:sum_half"]);
        l.set("chi2_v1", chi2[0].value, &["D_prod", "D_err2", "program:sum2_half"]);
        l.set("chi2_v2", chi2[1].value, &["D_prod", "D_err2", "f_2", "h_2", "program:sum2_half"]);

        // τ.
        let p2 = l.set("tau_prod2", cat_get("tau_prod2"), &["catalog:tau_prod2"]);
        let p3 = l.set("tau_prod3", cat_get("tau_prod3"), &["catalog:tau_prod3"]);
        let t22 = l.set("tau2_2", loc("tau2_q")?, &["local:tau2_q"]);
        let t23 = l.set("tau3_2", loc("tau3_q")?, &["local:tau3_q"]);
        let e = consts::E;
        let tw = 4.0 / e / ln_pw + 16.0 / e.sqr() / ln_pw.sqr();
        l.set("tau_v1", p2 + tw * p3, &["tau_prod2", "tau_prod3"]);
        l.set("tau_v2", t22 * p2 + tw * t23 * p3, &["tau_prod2", "tau_prod3", "tau2_2", "tau3_2"]);

        // T⁽¹⁾.
        let (cc1, cc2) = (inp.cc1, inp.cc2);
        let r = 2.0 * cc2 / cc1 / s2 / s2m1;
        let (p1v, p2v) = (psi[0].value, psi[1].value);
        l.set(
            "T1_v1",
            2.0 * cc1 * (r + 1.0) * (p1v * p2v + p1v.sqr()),
            &["psi_v1", "psi_v2", "literature:cc1", "literature:cc2"],
        );
        l.set("T1_v2", 2.0 * cc2 * s2 / s2m1 * p2v.sqr(), &["psi_v2", "literature:cc2"]);

        // Υ⁽¹⁾ (both moduli use η₂).
        let (ram, ram2) = (inp.ram, inp.ram_v2);
        let e2 = eta[1].value;
        l.set(
            "Upsilon1_v1",
            2.0 * ram * ram2 * e2 + 2.0 * ram * e2,
            &["eta_v2", "literature:ram", "literature:ram_v2"],
        );
        l.set("Upsilon1_v2", 2.0 * ram * ram2 * e2, &["eta_v2", "literature:ram", "literature:ram_v2"]);

        // Υ⁽²⁾.
        let twin = l.set("twin_inverse", cat_get("twin_inverse"), &["catalog:twin_inverse"]);
        let h_v2 = l.set("h_parity_v2", cc2 * cat_get("H_err"), &["literature:cc2", "catalog:H_err"]);
        l.set("Upsilon2_v1", twin * s2 * h_v2, &["twin_inverse", "h_parity_v2"]);
        l.set("Upsilon2_v2", 4.0 * twin * h_v2, &["twin_inverse", "h_parity_v2"]);

        // Υ⁽³⁾.
        l.set("Upsilon3_v1", phi1[0].value * phi2[0].value, &["phi1_v1", "phi2_v1"]);
        l.set("Upsilon3_v2", 4.0 * phi1[1].value * phi2[1].value, &["phi1_v2", "phi2_v2"]);

        // ω and Υ⁽⁴⁾.
        let c11 = chi1[0].value * chi2[0].value;
        let c22 = chi1[1].value * chi2[1].value;
        let om1 = l.set("omega_v1", 1.0 / c11, &["chi1_v1", "chi2_v1"]);
        let om2 = l.set("omega_v2", s2m1.sqr() / (4.0 * c22), &["chi1_v2", "chi2_v2"]);
        // Υ⁽⁴⁾ = (1 + ω)·χ⁽¹⁾χ⁽²⁾·k_v. With ω at its optimal value the
        // product ω·χ⁽¹⁾χ⁽²⁾·k_v is exactly 1 (v = 1) or 1/2 (v = 2); using
        // that avoids the dependency blow-up of evaluating it in intervals.
        let k2v = 2.0 / s2m1.sqr();
        debug_assert!((om1 * c11).contains(1.0) && (om2 * c22 * k2v).contains(0.5));
        l.set("Upsilon4_v1", c11 + 1.0, &["omega_v1", "chi1_v1", "chi2_v1"]);
        l.set("Upsilon4_v2", c22 * k2v + 0.5, &["omega_v2", "chi1_v2", "chi2_v2"]);

        // Kernel constants and Ψ_v.
        for v in 0..2 {
            let k = inp.kernel(v as u64 + 1);
            l.set(&suffix("T2", v), k.t2, &["kernel:T2"]);
            l.set(&suffix("T3", v), k.t3, &["kernel:T3"]);
            l.set(&suffix("T4", v), k.t4, &["kernel:T4"]);
            let name2 = suffix("T2", v);
            let name3 = suffix("T3", v);
            l.set(
                &suffix("Psi", v),
                k.t2 + k.t3 / ln_of(PSI_LOWER),
                &[name2.as_str(), name3.as_str()],
            );
        }

        // c-independent inputs of ξ^{(c)}.
        let th = consts::theta();
        let two = Interval::point(2.0);
        let fth = 1.0 / (two.pow(1.0 - 2.0 * th) * (two.pow(th) - 1.0).sqr());
        let a = (2.0 * fth - 1.0).abs();
        let wj1 = s2m1 / (s2m1 + a) * (cc1 + cc2 * a / s2m1);
        let j_err = cat_get("J_err");
        l.set("j_v1", wj1 * j_err, &["literature:cc1", "literature:cc2", "catalog:J_err"]);
        l.set("j_v2", cc2 * j_err, &["literature:cc2", "catalog:J_err"]);
        let j_prod = l.set("J_prod", cat_get("J_prod"), &["catalog:J_prod"]);
        let j_sum = l.set("J_sum", cat_get("J_sum") + g, &["catalog:J_sum", "literature:gamma"]);
        let xx2 = l.set("x_2", loc("x_q")?, &["local:x_q"]);
        let ss2 = l.set("ss_2", loc_sum("ss_q")?, &["local:ss_q"]);
        let yy2 = l.set("y_2", loc("y_q")?, &["local:y_q"]);

        Ok(Lemmas {
            transcription,
            catalog_cutoff,
            eta,
            psi,
            phi1,
            phi2,
            chi1,
            chi2,
            j_err: [wj1 * j_err, cc2 * j_err],
            j_prod,
            j_sum,
            xx2,
            ss2,
            yy2,
            ledger: l,
        })
    }

    /// A named c-independent constant (e.g. `"Upsilon1_v2"`, `"T1_v1"`).
    pub fn get(&self, name: &str) -> Result<Interval> {
        self.ledger
            .values
            .get(name)
            .copied()
            .ok_or_else(|| Error::Domain(format!("no lemma constant named `{name}`")))
    }

    fn named(&self, name: &str, v: usize) -> Interval {
        self.ledger.values[&suffix(name, v)]
    }

    /// ξ^{(c)}_v, the constant of the log-weighted sum over Z-smooth ranges.
    pub fn xi_c(&self, v: u64, c: f64) -> Result<Interval> {
        let vi = vi(v)?;
        if !(c > 0.0 && c < 1e4) {
            return domain(format!("ξ^(c) needs 0 < c < 10^4, got {c}"));
        }
        let ln_pw = ln_of(PW);
        let ln_c = ln_of(c);
        let ch = choice();
        let kk = 0.5;
        let ci = Interval::point(c);
        let lll = ln_pw * (1.0 - ch) - ln_c;
        let sq = ln_pw * (1.0 / kk - ch) - ln_c;
        let w = 1.0 / ci.sqrt() / (ln_pw * ch / 2.0).exp()
            + 4.0 / (kk * sq)
            + 4.0 / ((ln_c * (kk / 2.0)).exp() * (ln_pw * ch * (kk / 2.0)).exp() * lll);
        let den = 1.0 - ch - ln_c / ln_pw;
        let jv = if vi == 0 { self.j_err[0] } else { self.yy2 * self.j_err[1] };
        let y = jv * w / lll / den;
        let t = match self.transcription {
            Transcription::Preamble => 1.0 / (ln_c / ln_pw + ch),
            Transcription::Text => 1.0 / den,
        };
        let x = if vi == 0 {
            self.j_prod * (t + self.j_sum / ln_pw)
        } else {
            self.xx2 * self.j_prod * (t + (self.j_sum + self.ss2) / ln_pw)
        };
        Ok(x + y)
    }

    /// Υ⁽⁵⁾_{c,v} = (1 + 1/ω_v)/389² · τ_v · ξ^{(c)}_v (· 2^{2θ}/(2^θ−1)² for v = 2).
    pub fn upsilon5(&self, v: u64, c: f64) -> Result<Interval> {
        let vi = vi(v)?;
        let xi = self.xi_c(v, c)?;
        let om = self.named("omega", vi);
        let tau = self.named("tau", vi);
        let base = (1.0 + 1.0 / om) / inputs().inv_check.sqr() * tau * xi;
        Ok(if vi == 0 {
            base
        } else {
            let th = consts::theta();
            let two = Interval::point(2.0);
            base * two.pow(2.0 * th) / (two.pow(th) - 1.0).sqr()
        })
    }

    /// The ten terms of the |Ξ_v(U)| majorant at `log U = ln_u`, with
    /// Z = c U^{2/3}. The last term is included only when U ≥ 10^{12}.
    pub fn xi_terms(&self, ln_u: Interval, v: u64, c: f64) -> Result<[Interval; 10]> {
        let vi = vi(v)?;
        let ln_c = ln_of(c);
        let ci = Interval::point(c);
        let sc = ci.sqrt();
        let r = 3.0; // 1/(1 − 2/3)
        let lc = ln_u - r * ln_c;
        if !lc.is_positive() {
            return domain("the Ξ majorant needs U > c³");
        }
        let u13 = (ln_u / 3.0).exp();
        let pi2 = consts::pi_sq();
        let fv = Interval::from_u64(v) / Interval::from_u64(mult_value(v).kappa);
        let t1 = self.named("T1", vi);
        let y1 = self.named("Upsilon1", vi);
        let y2 = self.named("Upsilon2", vi);
        let y3 = self.named("Upsilon3", vi);
        let y4 = self.named("Upsilon4", vi);
        let psi = self.named("Psi", vi);
        let t4 = self.named("T4", vi);
        let ch = choice();
        let y5 = if ln_u.lo >= ln_of(PW).hi {
            self.upsilon5(v, c)? / ln_u
        } else {
            Interval::ZERO
        };
        Ok([
            t1 * lc.powi(4) / (r.powi(4) * sc * u13),
            2.0 * y1 * lc.sqr() / (r * r * sc * u13),
            6.0 * ci / r * psi * fv / pi2 * lc / u13,
            y4 * ln_u / (r * u13),
            6.0 * ci * psi * fv / (pi2 * u13),
            y2 / (sc * u13),
            ci * y3 / u13,
            y4 / u13,
            12.0 * t4 * fv / (pi2 * (1.0 - ch - ln_c / ln_u)) / ln_u,
            y5,
        ])
    }

    /// `Alt_Merge1 + Alt_Merge2`: the coefficient M with
    /// `|Ξ_v(U)| ≤ M log⁴U/U^{1/3} + L/log U` for U ≥ 10^7.
    pub fn merge_coefficient(&self, v: u64, c: f64) -> Result<Interval> {
        let vi = vi(v)?;
        let ld = ln_pow10(Regime::Analytic.exponent());
        let ci = Interval::point(c);
        let sc = ci.sqrt();
        let pi2 = consts::pi_sq();
        let fv = Interval::from_u64(v) / Interval::from_u64(mult_value(v).kappa);
        let om = 1.0 - choice();
        let psi = self.named("Psi", vi);
        let y4 = self.named("Upsilon4", vi);
        let m1 = self.named("T1", vi) * om.powi(4) / sc
            + 2.0 * self.named("Upsilon1", vi) * om.sqr() / sc / ld.sqr()
            + 6.0 * om * ci * psi * fv / pi2 / ld.powi(3)
            + om * y4 / ld.powi(3);
        let m2 = (6.0 / pi2 * ci * psi * fv
            + self.named("Upsilon2", vi) / sc
            + ci * self.named("Upsilon3", vi)
            + y4)
            / ld.powi(4);
        Ok(m1 + m2)
    }

    /// `MergeLog`: the coefficient L of the 1/log U term for U ≥ 10^7.
    pub fn merge_log(&self, v: u64, c: f64) -> Result<Interval> {
        let vi = vi(v)?;
        let ld = ln_pow10(Regime::Analytic.exponent());
        let fv = Interval::from_u64(v) / Interval::from_u64(mult_value(v).kappa);
        let den = 1.0 - choice() - ln_of(c) / ld;
        Ok(12.0 * self.named("T4", vi) / den / consts::pi_sq() * fv + self.upsilon5(v, c)?)
    }

    /// Upper bound for |Ξ_v(U)|; see [`xi_bound`].
    pub fn xi_bound(&self, u: f64, v: u64, c: f64) -> Result<XiBound> {
        vi(v)?;
        let regime = Regime::of(u).ok_or_else(|| {
            Error::Domain(format!("Ξ_v(U) bounds need U ≥ 10^7, got {u:e}"))
        })?;
        check_admissible(regime, c)?;
        let ln_u = ln_of(u);
        match regime {
            Regime::Numeric => {
                let terms = self.xi_terms(ln_u, v, c)?;
                let value = terms.iter().fold(Interval::ZERO, |a, &t| a + t);
                Ok(XiBound {
                    u,
                    v,
                    c,
                    regime,
                    value,
                    terms: terms.to_vec(),
                    merge: None,
                    merge_log: None,
                    k_v: Some(self.k_v(v, c)?),
                })
            }
            Regime::Analytic => {
                let m = self.merge_coefficient(v, c)?;
                let lg = self.merge_log(v, c)?;
                let a = m * ln_u.powi(4) / (ln_u / 3.0).exp();
                let b = lg / ln_u;
                Ok(XiBound {
                    u,
                    v,
                    c,
                    regime,
                    value: a + b,
                    terms: vec![a, b],
                    merge: Some(m),
                    merge_log: Some(lg),
                    k_v: None,
                })
            }
        }
    }

    /// The ten-term bound at U = 10^{12.5} exactly.
    pub fn numerical(&self, v: u64, c: f64) -> Result<Interval> {
        check_admissible(Regime::Numeric, c)?;
        let terms = self.xi_terms(ln_pow10(Regime::Numeric.exponent()), v, c)?;
        Ok(terms.iter().fold(Interval::ZERO, |a, &t| a + t))
    }

    /// K_v = (ten-term bound at 10^{12.5}) · log 10^{12.5}.
    pub fn k_v(&self, v: u64, c: f64) -> Result<Interval> {
        Ok(self.numerical(v, c)? * ln_pow10(Regime::Numeric.exponent()))
    }

    /// The Brun–Titchmarsh chain with Ξ₂(√Y) bounded at this c.
    pub fn brun_titchmarsh(&self, y: f64, q: u64, c: f64) -> Result<BrunTitchmarsh> {
        if q == 0 {
            return domain("q must be positive");
        }
        let ex = BT_EXPONENT;
        if !(y >= 10f64.powf(ex) * q as f64) || !y.is_finite() {
            return domain(format!("Brun–Titchmarsh bound needs Y ≥ 10^{ex}·q, got Y = {y:e}, q = {q}"));
        }
        let pi2 = consts::pi_sq();
        let iota = 2.0 * (1.0 - 4.0 / pi2);
        let s2 = sv_stored(2)?;
        let s2_lo = Interval::point(s2.lo);
        let xi2 = self.numerical(2, c)?;
        let l25 = ln_pow10(ex);
        let brun = 4.0 * (-s2_lo / 2.0 + xi2 / 2.0 + 4.0 * (4.0 / pi2 + iota / ln_pow10(ex / 4.0).exp()).sqr());
        let constant_prime = (brun + l25.sqr() / (l25 / 2.0).exp()) / 2.0;
        let coefficient = -constant_prime;
        let phi = Interval::from_u64(mult_value(q).phi);
        let lyq = Interval::point(y).ln() - Interval::from_u64(q).ln();
        let factor = 1.0 - Interval::point(coefficient.lo) / lyq;
        let bound = 2.0 * Interval::point(y) / (phi * lyq) * factor;
        Ok(BrunTitchmarsh {
            y,
            q,
            c,
            iota,
            s2_lower: s2.lo,
            xi2,
            brun,
            coefficient,
            factor,
            bound,
        })
    }

    /// Provenance of every named constant: its direct inputs.
    pub fn provenance(&self) -> &BTreeMap<String, Vec<String>> {
        &self.ledger.deps
    }
}

impl Branches {
    /// Build from (program, analytic) argument order.
    fn swap(self) -> Branches {
        Branches::new(self.program, self.analytic)
    }
}

/// A bound for |Ξ_v(U)|.
#[derive(Clone, Debug, Serialize)]
pub struct XiBound {
    #[serde(rename = "U")]
    pub u: f64,
    pub v: u64,
    pub c: f64,
    pub regime: Regime,
    pub value: Interval,
    /// The ten terms (numeric regime) or the two merged terms (analytic).
    pub terms: Vec<Interval>,
    /// Coefficient of log⁴U/U^{1/3} (analytic regime).
    pub merge: Option<Interval>,
    /// Coefficient of 1/log U (analytic regime).
    pub merge_log: Option<Interval>,
    /// K_v (numeric regime).
    pub k_v: Option<Interval>,
}

/// The explicit Brun–Titchmarsh inequality
/// `π(X+Y; q, a) − π(X; q, a) ≤ 2Y/(φ(q) log(Y/q)) · (1 − 𝔅/log(Y/q))`.
#[derive(Clone, Debug, Serialize)]
pub struct BrunTitchmarsh {
    #[serde(rename = "Y")]
    pub y: f64,
    pub q: u64,
    pub c: f64,
    /// ι = 2(1 − 4/π²).
    pub iota: Interval,
    /// Lower endpoint of 𝔰₂ used in the chain.
    pub s2_lower: f64,
    /// Bound for Ξ₂(√Y).
    pub xi2: Interval,
    /// The second-order coefficient before the √Y absorption.
    pub brun: Interval,
    /// 𝔅; the certified value is its lower endpoint.
    pub coefficient: Interval,
    /// `1 − 𝔅/log(Y/q)` with 𝔅 at its lower endpoint.
    pub factor: Interval,
    /// The right-hand side of the inequality.
    pub bound: Interval,
}

/// Every constant for one (v, regime, c), with provenance.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsReport {
    pub v: u64,
    pub regime: Regime,
    pub c: f64,
    pub transcription: Transcription,
    pub catalog_cutoff: Option<u64>,
    pub entries: BTreeMap<String, Interval>,
    /// The two branches of each max-defined constant.
    pub branches: BTreeMap<String, Branches>,
    /// Ξ bound at the regime threshold.
    pub xi_bound: XiBound,
    pub brun_titchmarsh: BrunTitchmarsh,
    pub provenance: BTreeMap<String, Vec<String>>,
}

/// Assemble the report for (v, regime, c) from the given lemmas.
pub fn assemble_with(lemmas: &Lemmas, v: u64, regime: Regime, c: f64) -> Result<ConstantsReport> {
    let vi = vi(v)?;
    check_admissible(regime, c)?;
    let mut entries = BTreeMap::new();
    let mut provenance = BTreeMap::new();
    let names = [
        "T1", "Upsilon1", "Upsilon2", "Upsilon3", "Upsilon4", "omega", "tau", "Psi", "T2", "T3", "T4",
        "eta", "psi", "phi1", "phi2", "chi1", "chi2",
    ];
    let mut pending: Vec<String> = names.iter().map(|n| suffix(n, vi)).collect();
    // Include the transitive inputs so that the provenance graph is closed.
    while let Some(n) = pending.pop() {
        if entries.contains_key(&n) {
            continue;
        }
        entries.insert(n.clone(), lemmas.ledger.values[&n]);
        let deps = lemmas.ledger.deps[&n].clone();
        for d in &deps {
            if lemmas.ledger.values.contains_key(d) {
                pending.push(d.clone());
            }
        }
        provenance.insert(n, deps);
    }
    let xi_name = suffix("xi_c", vi);
    let xi_deps: Vec<String> = if vi == 0 {
        vec!["J_prod", "J_sum", "j_v1"]
    } else {
        vec!["J_prod", "J_sum", "j_v2", "x_2", "ss_2", "y_2"]
    }
    .into_iter()
    .map(String::from)
    .collect();
    for d in &xi_deps {
        let mut stack = vec![d.clone()];
        while let Some(n) = stack.pop() {
            if entries.contains_key(&n) {
                continue;
            }
            entries.insert(n.clone(), lemmas.ledger.values[&n]);
            let deps = lemmas.ledger.deps[&n].clone();
            stack.extend(deps.iter().filter(|x| lemmas.ledger.values.contains_key(*x)).cloned());
            provenance.insert(n, deps);
        }
    }
    entries.insert(xi_name.clone(), lemmas.xi_c(v, c)?);
    provenance.insert(xi_name.clone(), xi_deps);
    let y5 = suffix("Upsilon5", vi);
    entries.insert(y5.clone(), lemmas.upsilon5(v, c)?);
    provenance.insert(
        y5.clone(),
        vec![suffix("omega", vi), suffix("tau", vi), xi_name, "literature:inv_check".into()],
    );
    let sv_name = suffix("s", vi);
    entries.insert(sv_name.clone(), sv_stored(v)?);
    provenance.insert(sv_name, vec!["inputs:integral".into(), "T2".into(), "T3".into(), "T4".into()]
        .into_iter()
        .map(|s: String| if s.starts_with('T') { suffix(&s, vi) } else { s })
        .collect());

    let xi_bound = lemmas.xi_bound(regime.threshold(), v, c)?;
    let mut xi_deps: Vec<String> = ["T1", "Upsilon1", "Upsilon2", "Upsilon3", "Upsilon4", "Psi", "T4"]
        .iter()
        .map(|n| suffix(n, vi))
        .collect();
    xi_deps.push(y5);
    entries.insert("Xi_bound".into(), xi_bound.value);
    provenance.insert("Xi_bound".into(), xi_deps.clone());
    if let Some(k) = xi_bound.k_v {
        entries.insert("K_v".into(), k);
        provenance.insert("K_v".into(), vec!["Xi_bound".into()]);
    }
    if let Some(m) = xi_bound.merge {
        entries.insert("Merge".into(), m);
        provenance.insert("Merge".into(), xi_deps.clone());
    }
    if let Some(m) = xi_bound.merge_log {
        entries.insert("MergeLog".into(), m);
        provenance.insert("MergeLog".into(), vec![suffix("T4", vi), suffix("Upsilon5", vi)]);
    }

    // The coefficient uses the report's c in the numeric regime and the
    // default c₂ otherwise.
    let bt_c = if regime == Regime::Numeric { c } else { K2_C };
    let bt = lemmas.brun_titchmarsh(10f64.powf(BT_EXPONENT), 1, bt_c)?;
    entries.insert("iota".into(), bt.iota);
    entries.insert("Brun".into(), bt.brun);
    entries.insert("B".into(), bt.coefficient);
    provenance.insert("iota".into(), vec![]);
    provenance.insert("Brun".into(), vec!["s_v2".into(), "Xi2_numeric".into(), "iota".into()]);
    provenance.insert("B".into(), vec!["Brun".into()]);
    if !entries.contains_key("s_v2") {
        entries.insert("s_v2".into(), sv_stored(2)?);
        provenance.insert("s_v2".into(), vec!["inputs:integral".into(), "T2_v2".into(), "T3_v2".into(), "T4_v2".into()]);
        for n in ["T2_v2", "T3_v2", "T4_v2"] {
            entries.insert(n.into(), lemmas.ledger.values[n]);
            provenance.insert(n.into(), lemmas.ledger.deps[n].clone());
        }
    }
    entries.insert("Xi2_numeric".into(), bt.xi2);
    provenance.insert("Xi2_numeric".into(), vec!["lemmas:v2".into()]);

    let branches = [
        ("eta", lemmas.eta[vi]),
        ("psi", lemmas.psi[vi]),
        ("phi1", lemmas.phi1[vi]),
        ("phi2", lemmas.phi2[vi]),
        ("chi1", lemmas.chi1[vi]),
        ("chi2", lemmas.chi2[vi]),
    ]
    .into_iter()
    .map(|(n, b)| (suffix(n, vi), b))
    .collect();

    Ok(ConstantsReport {
        v,
        regime,
        c,
        transcription: lemmas.transcription,
        catalog_cutoff: lemmas.catalog_cutoff,
        entries,
        branches,
        xi_bound,
        brun_titchmarsh: bt,
        provenance,
    })
}

/// The lemma constants from the default catalog, preamble transcription.
pub fn default_lemmas() -> Result<Lemmas> {
    Lemmas::new(default_catalog(), Transcription::Preamble)
}

/// [`assemble_with`] on the default catalog and the preamble transcription.
pub fn assemble(v: u64, regime: Regime, c: f64) -> Result<ConstantsReport> {
    assemble_with(&default_lemmas()?, v, regime, c)
}

/// Upper bound for |Ξ_v(U)| for U ≥ 10^7: the merged form
/// `M log⁴U/U^{1/3} + L/log U` below 10^{12.5}, the ten-term majorant from
/// 10^{12.5} on (where K_v is also reported).
pub fn xi_bound(u: f64, v: u64, c: f64) -> Result<XiBound> {
    default_lemmas()?.xi_bound(u, v, c)
}

/// The Brun–Titchmarsh coefficient and bound with c = 16.
pub fn brun_titchmarsh(y: f64, q: u64) -> Result<BrunTitchmarsh> {
    default_lemmas()?.brun_titchmarsh(y, q, K2_C)
}

/// `∫_1^Z du/(u^m log^n(X/u))`: exact for m = 1, the upper bound
/// `(1/(m−1))(log^{−n}(X/√Z) + log^{−n}(X/Z) Z^{−(m−1)/2})` for m > 1, n > 0.
/// Z = 1 gives the empty integral 0.
pub fn log_integral_bound(z: f64, x: f64, m: f64, n: f64) -> Result<Interval> {
    if !(m >= 1.0) || !(z >= 1.0) || !(z < x) || !x.is_finite() || !n.is_finite() {
        return domain(format!("need m ≥ 1 and 1 ≤ Z < X, got Z = {z}, X = {x}, m = {m}"));
    }
    if z == 1.0 {
        return Ok(Interval::ZERO);
    }
    let lx = ln_of(x);
    let lxz = lx - ln_of(z);
    if m == 1.0 {
        if n == 1.0 {
            return Ok((lx / lxz).ln());
        }
        let k = n - 1.0;
        return Ok((lxz.pow(Interval::point(-k)) - lx.pow(Interval::point(-k))) / k);
    }
    if !(n > 0.0) {
        return domain(format!("the bound for m > 1 needs n > 0, got n = {n}"));
    }
    let ni = Interval::point(-n);
    let lxs = lx - ln_of(z) / 2.0;
    let zk = (ln_of(z) * ((m - 1.0) / 2.0)).exp();
    Ok((lxs.pow(ni) + lxz.pow(ni) / zk) / (m - 1.0))
}
