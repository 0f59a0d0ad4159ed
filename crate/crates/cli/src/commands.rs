//! Subcommand implementations. Each produces a JSON result object that
//! [`crate::report::render`] wraps with the reproducibility header.

use std::path::PathBuf;

use serde_json::{json, Value};

use selberg_explicit::euler::{catalog, catalog_spec, default_catalog, eval_catalog, eval_catalog_all, CatalogValues};
use selberg_explicit::hq::{hq_eval, hq_eval_identity, hq_integral_with, hq_tail_bound, kernel_bound, sv_from_integral, SweepOptions};
use selberg_explicit::inputs::inputs;
use selberg_explicit::interval::const_catalog;
use selberg_explicit::mobius::{m_family, scan_spec, threshold_scan, weighted_sum, MKind, Weight};
use selberg_explicit::pipeline::{assemble_with, default_lemmas, Lemmas, Regime, Transcription, K1_C, K2_C};
use selberg_explicit::sigma::{log_grid, residual_bound, residual_check, residual_of, sigma_direct, Method, SigmaEngine, SigmaResult};
use selberg_explicit::{Error, Result};

use crate::report::{render, Format, Outcome, RunConfig};
use crate::{Cli, Command, Source};

/// Pairwise evaluation is used up to this U unless a method is requested.
const PAIRWISE_DEFAULT_MAX: f64 = 1000.0;

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("result serializes")
}

fn ok(result: Value, config: &RunConfig) -> Result<Outcome> {
    Ok(Outcome {
        rendered: render(result, config)?,
        exit_code: 0,
    })
}

/// Dispatch one parsed command line.
pub fn run(cli: &Cli, config: &RunConfig) -> Result<Outcome> {
    match &cli.command {
        Command::Constant { id, all } => constant(id.as_deref(), *all, config),
        Command::Sum { name, x, q, k, arg } => sum(name, *x, *q, *k, *arg, config),
        Command::Scan { id, v, from, to, target, program } => {
            scan(id, *v, *from, *to, target.as_deref(), *program, config)
        }
        Command::Hq { v, x, s, checkpoint_every, max_events } => {
            hq(*v, *x, *s, *checkpoint_every, *max_events, config)
        }
        Command::Sigma { v, u, method, residual, sweep, from, to, points } => {
            if *sweep {
                sigma_sweep(*v, *from, *to, *points, config)
            } else {
                let u = u.ok_or_else(|| Error::Config("--U is required without --sweep".into()))?;
                sigma(*v, u, method.as_deref(), *residual, config)
            }
        }
        Command::Pipeline { v, regime, c, transcription, source } => {
            pipeline(*v, regime, *c, transcription, *source, config)
        }
        Command::Bt { y, q, c } => {
            let bt = lemmas(Source::Computed, Transcription::Preamble, config)?.brun_titchmarsh(*y, *q, *c)?;
            ok(to_value(&bt), config)
        }
        Command::Verify { suite } => crate::verify::run(*suite, config),
    }
}

fn catalog_values(config: &RunConfig) -> Result<std::borrow::Cow<'static, CatalogValues>> {
    Ok(match config.cutoff {
        Some(p0) => std::borrow::Cow::Owned(eval_catalog_all(p0)?),
        None => std::borrow::Cow::Borrowed(default_catalog()),
    })
}

fn constant(id: Option<&str>, all: bool, config: &RunConfig) -> Result<Outcome> {
    let references = inputs();
    if all {
        let values = catalog_values(config)?;
        let entries: Vec<Value> = catalog()
            .iter()
            .map(|spec| {
                let t = values.get(spec.id);
                let reference = references.reference(spec.id);
                json!({
                    "id": spec.id,
                    "lo": t.total.lo,
                    "hi": t.total.hi,
                    "reference": reference,
                    "intersects_reference": reference.map(|r| r.intersects(t.total)),
                })
            })
            .collect();
        return ok(json!({ "cutoff": values.cutoff, "entries": entries }), config);
    }
    let id = id.ok_or_else(|| Error::Config("give a constant id or --all".into()))?;
    if catalog_spec(id).is_ok() {
        let t = eval_catalog(id, config.cutoff)?;
        let reference = references.reference(id);
        ok(
            json!({
                "id": id,
                "lo": t.total.lo,
                "hi": t.total.hi,
                "partial": t.partial,
                "tail": t.tail,
                "cutoff": t.cutoff,
                "reference": reference,
                "intersects_reference": reference.map(|r| r.intersects(t.total)),
            }),
            config,
        )
    } else {
        let c = const_catalog(id).map_err(|_| Error::Domain(format!("unknown constant `{id}`")))?;
        ok(json!({ "id": id, "lo": c.lo, "hi": c.hi }), config)
    }
}

fn sum(name: &str, x: f64, q: u64, k: u32, arg: Option<f64>, config: &RunConfig) -> Result<Outcome> {
    let value = if let Ok(kind) = MKind::from_name(name) {
        if k != 0 || arg.is_some() {
            return Err(Error::Config(format!("--k and --arg do not apply to `{name}`")));
        }
        m_family(kind, x, q)?
    } else if let Ok(w) = Weight::from_name(name) {
        weighted_sum(w, x, q, k, arg)?
    } else {
        return Err(Error::Domain(format!("unknown sum `{name}`")));
    };
    ok(
        json!({ "name": name, "X": x, "q": q, "k": k, "arg": arg, "lo": value.lo, "hi": value.hi }),
        config,
    )
}

/// Upper end of the stored program constant for (id, v), printed shortest
/// round-trip so that it is itself a valid decimal upper bound.
fn program_target(id: &str, v: u64) -> Result<String> {
    if v != 1 && v != 2 {
        return Err(Error::Domain(format!("program constants exist for v ∈ {{1, 2}}, not {v}")));
    }
    let p = inputs().program(v);
    let iv = match id {
        "sq_half" => p.sq_half,
        "sumvar1log" => p.sumvar1log,
        "sumvarp" => p.sumvarp,
        "ss1" => p.ss1,
        "sum_half" => p.sum_half,
        "sum2_half" => p.sum2_half,
        _ => return Err(Error::Domain(format!("unknown scan `{id}`"))),
    };
    Ok(format!("{}", iv.hi))
}

fn scan(
    id: &str,
    v: u64,
    from: f64,
    to: f64,
    target: Option<&str>,
    program: bool,
    config: &RunConfig,
) -> Result<Outcome> {
    let spec = scan_spec(id)?;
    let program_value = if program { Some(program_target(id, v)?) } else { None };
    let target = target.or(program_value.as_deref());
    let r = threshold_scan(id, v, from, to, target)?;
    let mut out = to_value(&r);
    out["description"] = json!(spec.description);
    out["claimed_from"] = json!(spec.lower);
    ok(out, config)
}

fn checkpoint_path(x: f64, v: u64, config: &RunConfig) -> Option<PathBuf> {
    config
        .checkpoint
        .clone()
        .or_else(|| config.cache_dir.as_ref().map(|d| d.join(format!("hq_v{v}_X{x:e}.ckpt"))))
}

fn hq(
    v: u64,
    x: Option<f64>,
    s: Option<f64>,
    checkpoint_every: u64,
    max_events: u64,
    config: &RunConfig,
) -> Result<Outcome> {
    if let Some(s) = s {
        let value = hq_eval(s, v)?;
        let identity = hq_eval_identity(s, v)?;
        let bound = kernel_bound(s, v)?;
        return ok(
            json!({
                "s": s,
                "v": v,
                "value": value,
                "identity_route": identity,
                "routes_agree": value.intersects(identity),
                "kernel_bound": bound,
                "within_bound": value.abs().hi <= bound.hi,
            }),
            config,
        );
    }
    let x = x.ok_or_else(|| Error::Config("give --X or --s".into()))?;
    let checkpoint = checkpoint_path(x, v, config);
    if let Some(dir) = checkpoint.as_ref().and_then(|p| p.parent()) {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let opts = SweepOptions {
        checkpoint: checkpoint.clone(),
        checkpoint_every,
        max_events,
    };
    let r = hq_integral_with(x, v, &opts)?;
    let tail = hq_tail_bound(x, v).ok();
    let sv = if v == 1 || v == 2 { sv_from_integral(v, x, r.value).ok() } else { None };
    let mut out = to_value(&r);
    out["tail"] = json!(tail);
    out["sv"] = json!(sv);
    out["checkpoint"] = json!(checkpoint);
    out["stored_integral"] = if (v == 1 || v == 2) && x == inputs().integral_x {
        json!(inputs().stored_integral(v))
    } else {
        Value::Null
    };
    ok(out, config)
}

fn sigma(v: u64, u: f64, method: Option<&str>, residual: bool, config: &RunConfig) -> Result<Outcome> {
    let method = match method {
        Some(m) => Method::from_name(m)?,
        None if u <= PAIRWISE_DEFAULT_MAX => Method::Pairwise,
        None => Method::Decomposition,
    };
    let r = sigma_direct(u, v, method)?;
    let mut out = to_value(&r);
    if residual {
        out["residual_check"] = to_value(&residual_check(u, v)?);
    }
    ok(out, config)
}

fn sigma_sweep(v: u64, from: f64, to: f64, points: usize, config: &RunConfig) -> Result<Outcome> {
    let grid = log_grid(from, to, points)?;
    let engine = SigmaEngine::new(to)?;
    let sv = if v == 1 || v == 2 { Some(selberg_explicit::hq::sv_stored(v)?) } else { None };
    let eval = |u: f64| -> Result<SigmaResult> {
        let value = engine.decomposition(u, v)?;
        Ok(SigmaResult {
            u,
            v,
            value,
            method: Method::Decomposition,
            residual: sv.map(|s| residual_of(value, u, v, s)),
        })
    };
    let rows = parallel_map(&grid, config.threads, eval)?;
    if config.format == Format::Csv {
        let mut out = String::from("U,v,lo,hi,residual_lo,residual_hi,bound\n");
        for r in &rows {
            let (rl, rh) = r.residual.map_or((String::new(), String::new()), |x| (x.lo.to_string(), x.hi.to_string()));
            let bound = if sv.is_some() { residual_bound(r.u, v).hi.to_string() } else { String::new() };
            out.push_str(&format!("{},{},{},{},{rl},{rh},{bound}\n", r.u, r.v, r.value.lo, r.value.hi));
        }
        return Ok(Outcome { rendered: out, exit_code: 0 });
    }
    ok(json!({ "v": v, "from": from, "to": to, "points": points, "rows": rows }), config)
}

/// Map `f` over `items` on `threads` scoped threads, keeping input order.
pub fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    f: impl Fn(T) -> Result<R> + Sync,
) -> Result<Vec<R>>
where
    T: Copy,
{
    let threads = threads.clamp(1, items.len().max(1));
    let chunk = items.len().div_ceil(threads).max(1);
    let parts: Vec<Result<Vec<R>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| scope.spawn(|| c.iter().map(|&t| f(t)).collect::<Result<Vec<R>>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(items.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn lemmas(source: Source, transcription: Transcription, config: &RunConfig) -> Result<Lemmas> {
    match (source, config.cutoff) {
        (Source::Reference, _) => Lemmas::from_reference(transcription),
        (Source::Computed, None) if transcription == Transcription::Preamble => default_lemmas(),
        (Source::Computed, _) => Lemmas::new(&*catalog_values(config)?, transcription),
    }
}

fn pipeline(
    v: u64,
    regime: &str,
    c: Option<f64>,
    transcription: &str,
    source: Source,
    config: &RunConfig,
) -> Result<Outcome> {
    let regime = Regime::from_name(regime)?;
    let transcription = Transcription::from_name(transcription)?;
    let c = c.unwrap_or(match (regime, v) {
        (Regime::Analytic, _) => 10.0,
        (Regime::Numeric, 1) => K1_C,
        (Regime::Numeric, _) => K2_C,
    });
    let l = lemmas(source, transcription, config)?;
    let mut out = to_value(&assemble_with(&l, v, regime, c)?);
    out["source"] = to_value(&source);
    ok(out, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use selberg_explicit::Interval;

    #[test]
    fn parallel_map_keeps_order() {
        let items: Vec<u64> = (0..37).collect();
        for threads in [1, 2, 5, 64] {
            let out = parallel_map(&items, threads, |x| Ok(x * x)).unwrap();
            assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
        }
    }

    #[test]
    fn program_targets_are_upper_bounds() {
        let t: f64 = program_target("sq_half", 1).unwrap().parse().unwrap();
        assert!(t >= 1.4256628496167);
        assert!(program_target("nope", 1).is_err());
        assert!(program_target("sq_half", 3).is_err());
    }

    #[test]
    fn interval_json_shape() {
        let v = to_value(&Interval::new(1.0, 2.0));
        assert_eq!(v, json!({ "lo": 1.0, "hi": 2.0 }));
    }
}
