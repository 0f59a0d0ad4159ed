//! Regression suites for `esieve verify`: each row recomputes a quantity
//! and compares it against its published enclosure or an identity.

use serde::Serialize;
use serde_json::json;

use selberg_explicit::euler::{default_catalog, eval_catalog_all};
use selberg_explicit::hq::{hq_eval, hq_integral, kernel_bound, sv_constant, sv_stored, sweep_segment};
use selberg_explicit::inputs::inputs;
use selberg_explicit::interval::consts;
use selberg_explicit::mobius::{integral_m_check, m_family, scan_specs, threshold_scan, MKind};
use selberg_explicit::pipeline::{default_lemmas, Lemmas, Transcription, K1_C, K2_C};
use selberg_explicit::sigma::{log_grid, residual_check_with, sigma_pairwise, SigmaEngine};
use selberg_explicit::{Interval, Result};

use crate::commands::parallel_map;
use crate::report::{render, Outcome, RunConfig};
use crate::Suite;

/// One verification row.
#[derive(Debug, Serialize)]
pub struct Row {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

type Check = fn(&RunConfig) -> Result<(bool, String)>;

const DESK: &[(&str, Check)] = &[
    ("catalog_references", catalog_references),
    ("published_c_table", published_c_table),
    ("sv_digits", sv_digits),
    ("kernel_additivity_1e6", kernel_additivity),
    ("residual_grid_1e5", residual_grid),
    ("program_scans_1e6", program_scans),
    ("oracle_equivalence", oracle_equivalence),
    ("identities", identities),
    ("pipeline_signs", pipeline_signs),
];

const NIGHTLY: &[(&str, Check)] = &[("kernel_integral_1e8", kernel_integral_1e8)];

/// Run a suite; the exit code is 1 if any row fails or errors.
pub fn run(suite: Suite, config: &RunConfig) -> Result<Outcome> {
    let mut checks: Vec<(&str, Check)> = DESK.to_vec();
    if suite == Suite::Nightly {
        checks.extend_from_slice(NIGHTLY);
    }
    let indices: Vec<usize> = (0..checks.len()).collect();
    let rows = parallel_map(&indices, config.threads, |i| {
        let (name, check) = checks[i];
        Ok(match check(config) {
            Ok((pass, detail)) => Row { name, pass, detail },
            Err(e) => Row {
                name,
                pass: false,
                detail: format!("error: {e}"),
            },
        })
    })?;
    let passed = rows.iter().filter(|r| r.pass).count();
    let all = passed == rows.len();
    let rendered = render(
        json!({ "suite": suite, "passed": passed, "total": rows.len(), "ok": all, "rows": rows }),
        config,
    )?;
    Ok(Outcome {
        rendered,
        exit_code: if all { 0 } else { 1 },
    })
}

fn catalog_references(config: &RunConfig) -> Result<(bool, String)> {
    let owned;
    let cat = match config.cutoff {
        Some(p0) => {
            owned = eval_catalog_all(p0)?;
            &owned
        }
        None => default_catalog(),
    };
    let (mut hits, mut misses) = (0, Vec::new());
    for (id, r) in inputs().references() {
        if cat.iter().any(|(c, _)| c == id) {
            if cat.total(id).intersects(r) {
                hits += 1;
            } else {
                misses.push(id.to_string());
            }
        }
    }
    Ok((
        hits >= 15 && misses.is_empty(),
        format!("{hits} references intersect at P₀ = {}; misses {misses:?}", cat.cutoff),
    ))
}

fn published_c_table(_: &RunConfig) -> Result<(bool, String)> {
    let table: &[(f64, f64)] = &[
        (0.5, 12.48749),
        (6.0, 1.42087),
        (7.0, 1.25199),
        (10.0, 0.94685),
        (15.0, 0.71185),
        (16.0, 0.68307),
        (17.0, 0.65787),
        (38.0, 0.45734),
        (39.0, 0.45419),
        (50.0, 0.43225),
        (60.0, 0.42499),
        (70.0, 0.42425),
        (80.0, 0.42747),
        (98.0, 0.43908),
    ];
    let l = Lemmas::from_reference(Transcription::Preamble)?;
    let mut bad = Vec::new();
    for &(c, printed) in table {
        let n = l.numerical(1, c)?;
        if (n.hi * 1e5).ceil() / 1e5 != printed {
            bad.push(c);
        }
    }
    Ok((bad.is_empty(), format!("{} table entries, mismatches at c = {bad:?}", table.len())))
}

fn sv_digits(_: &RunConfig) -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (v, prefix) in [(1u64, "0.6073"), (2, "1.4728")] {
        let stored = sv_stored(v)?;
        let wide = sv_constant(v, 1e6)?;
        let ok = format!("{:.8}", stored.lo).starts_with(prefix) && wide.intersects(stored);
        pass &= ok;
        parts.push(format!("𝔰_{v}: stored {stored}, from X = 10^6 {wide}"));
    }
    Ok((pass, parts.join("; ")))
}

fn kernel_additivity(_: &RunConfig) -> Result<(bool, String)> {
    let mut pass = true;
    for v in [1u64, 2] {
        let a = hq_integral(1e5, v)?.value;
        let ab = sweep_segment(1e5, 1e6, v)?;
        let b = hq_integral(1e6, v)?.value;
        pass &= (a + ab).intersects(b);
    }
    Ok((pass, "per-divisor [1,10^5] + sweep [10^5,10^6] vs per-divisor [1,10^6]".into()))
}

fn residual_grid(_: &RunConfig) -> Result<(bool, String)> {
    let engine = SigmaEngine::new(1e5)?;
    let grid = log_grid(10.0, 1e5, 200)?;
    let mut fails = Vec::new();
    for v in [1u64, 2] {
        let sv = sv_stored(v)?;
        for &u in &grid {
            if !residual_check_with(&engine, u, v, sv)?.pass {
                fails.push((v, u));
            }
        }
    }
    Ok((fails.is_empty(), format!("200 points per v, violations {fails:?}")))
}

fn program_scans(_: &RunConfig) -> Result<(bool, String)> {
    let mut fails = Vec::new();
    for spec in scan_specs() {
        for v in [1u64, 2] {
            let p = inputs().program(v);
            let target = match spec.id {
                "sq_half" => p.sq_half,
                "sumvar1log" => p.sumvar1log,
                "sumvarp" => p.sumvarp,
                "ss1" => p.ss1,
                "sum_half" => p.sum_half,
                _ => p.sum2_half,
            };
            let r = threshold_scan(spec.id, v, spec.lower.max(10.0), 1e6, Some(&target.hi.to_string()))?;
            if r.certified != Some(true) {
                fails.push(format!("{}_v{v}", spec.id));
            }
        }
    }
    Ok((fails.is_empty(), format!("{} scans to 10^6, uncertified {fails:?}", 2 * scan_specs().len())))
}

fn oracle_equivalence(_: &RunConfig) -> Result<(bool, String)> {
    let engine = SigmaEngine::new(1000.0)?;
    let mut bad = Vec::new();
    for v in [1u64, 2] {
        for u in [2.0, 10.0, 50.0, 100.0, 500.0, 1000.0] {
            if !sigma_pairwise(u, v, true)?.intersects(engine.decomposition(u, v)?) {
                bad.push((u, v));
            }
        }
    }
    Ok((bad.is_empty(), format!("pairwise vs decomposition, disagreements {bad:?}")))
}

fn identities(_: &RunConfig) -> Result<(bool, String)> {
    let mut pass = true;
    for x in [10.0, 100.0, 1000.0] {
        for q in [1u64, 2, 3] {
            pass &= integral_m_check(x, q, false)?.intersects(m_family(MKind::MCheckCheck, x, q)? / 2.0);
            pass &= integral_m_check(x, q, true)?.intersects(m_family(MKind::MTildeTilde, x, q)? / 2.0);
        }
    }
    pass &= hq_eval(1.0, 1)?.contains_interval(consts::zeta2());
    for v in [1u64, 2] {
        for k in 0..=40 {
            let s = 10f64.powf(k as f64 * 0.125);
            pass &= hq_eval(s, v)?.abs().hi <= kernel_bound(s, v)?.hi;
        }
    }
    Ok((pass, "integral identities, h₁(1) ⊇ ζ(2), kernel bound on 82 samples".into()))
}

fn pipeline_signs(_: &RunConfig) -> Result<(bool, String)> {
    let l = default_lemmas()?;
    let k1 = l.k_v(1, K1_C)?;
    let k2 = l.k_v(2, K2_C)?;
    let bt = l.brun_titchmarsh(1e25, 1, K2_C)?;
    let pass = [k1, k2].iter().all(|k| k.is_finite() && k.is_positive())
        && bt.coefficient.lo > 0.0
        && bt.factor.lo > 0.0
        && bt.factor.hi < 1.0;
    Ok((pass, format!("K₁ = {k1}, K₂ = {k2}, 𝔅 = {}", bt.coefficient)))
}

fn kernel_integral_1e8(_: &RunConfig) -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();
    for v in [1u64, 2] {
        let r = hq_integral(1e8, v)?;
        let stored: Interval = inputs().stored_integral(v);
        pass &= r.value.intersects(stored);
        parts.push(format!("v={v}: {} vs {stored} ({:.0} s)", r.value, r.seconds));
    }
    Ok((pass, parts.join("; ")))
}
