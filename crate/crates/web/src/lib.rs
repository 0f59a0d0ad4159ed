//! WebAssembly front end: three interval computations exported to
//! JavaScript, each returning a JSON string `{"lo":…,"hi":…,…}` or throwing
//! the error message.
//!
//! The operations are the cheap ones (a catalog constant at a modest prime
//! cutoff, Σ_v(U) by the pairwise oracle, the Möbius family); the kernel
//! integral and long scans belong to the native `esieve` binary.

use serde_json::json;
use wasm_bindgen::prelude::*;

use selberg_explicit::euler::eval_catalog;
use selberg_explicit::mobius::{m_family, MKind};
use selberg_explicit::sigma::sigma_pairwise;
use selberg_explicit::Result;

/// Largest prime cutoff accepted from the browser.
pub const MAX_WEB_CUTOFF: u64 = 2_000_000;
/// Largest U accepted for the pairwise oracle.
pub const MAX_WEB_U: f64 = 2_000.0;

fn to_js(r: Result<serde_json::Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

/// Catalog constant `id` with primes up to `cutoff`, plus its tail enclosure.
pub fn constant_json(id: &str, cutoff: u64) -> Result<serde_json::Value> {
    if cutoff > MAX_WEB_CUTOFF {
        return Err(selberg_explicit::Error::Resource(format!(
            "cutoff {cutoff} exceeds the in-browser limit {MAX_WEB_CUTOFF}"
        )));
    }
    let t = eval_catalog(id, Some(cutoff))?;
    Ok(json!({ "id": id, "cutoff": cutoff, "lo": t.total.lo, "hi": t.total.hi, "tail": t.tail }))
}

/// Σ_v(U) by direct pairwise summation.
pub fn sigma_json(u: f64, v: u64) -> Result<serde_json::Value> {
    if u > MAX_WEB_U {
        return Err(selberg_explicit::Error::Resource(format!(
            "U = {u} exceeds the in-browser limit {MAX_WEB_U}"
        )));
    }
    let s = sigma_pairwise(u, v, true)?;
    Ok(json!({ "U": u, "v": v, "lo": s.lo, "hi": s.hi }))
}

/// A member of the Möbius family (`m`, `m_check`, `m_checkcheck`, `m_tilde`,
/// `m_tildetilde`) at X, restricted to n coprime to q.
pub fn mobius_json(kind: &str, x: f64, q: u64) -> Result<serde_json::Value> {
    let value = m_family(MKind::from_name(kind)?, x, q)?;
    Ok(json!({ "kind": kind, "X": x, "q": q, "lo": value.lo, "hi": value.hi }))
}

/// Exported: see [`constant_json`].
#[wasm_bindgen]
pub fn constant(id: &str, cutoff: u32) -> std::result::Result<String, JsError> {
    to_js(constant_json(id, cutoff as u64))
}

/// Exported: see [`sigma_json`].
#[wasm_bindgen]
pub fn sigma(u: f64, v: u32) -> std::result::Result<String, JsError> {
    to_js(sigma_json(u, v as u64))
}

/// Exported: see [`mobius_json`].
#[wasm_bindgen]
pub fn mobius(kind: &str, x: f64, q: u32) -> std::result::Result<String, JsError> {
    to_js(mobius_json(kind, x, q as u64))
}
