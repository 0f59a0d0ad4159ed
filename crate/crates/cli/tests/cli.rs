//! End-to-end runs of the `esieve` binary: report shape, exit-code contract,
//! determinism, caching and the desk verification suite.

use std::process::{Command, Output};

use serde_json::Value;

fn esieve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esieve"))
        .args(args)
        .env_remove("ESIEVE_CACHE_DIR")
        .output()
        .expect("run esieve")
}

fn json(args: &[&str]) -> Value {
    let out = esieve(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn code(args: &[&str]) -> i32 {
    esieve(args).status.code().expect("exit code")
}

#[test]
fn constant_report_encloses_published_range() {
    let r = json(&["constant", "I_prod", "--json"]);
    assert_eq!(r["id"], "I_prod");
    let (lo, hi) = (r["lo"].as_f64().unwrap(), r["hi"].as_f64().unwrap());
    assert!(lo <= 1.94359649909918 && hi >= 1.94359643387259, "[{lo}, {hi}]");
    assert!(hi - lo < 1e-7);
    assert_eq!(r["intersects_reference"], true);
    // Reproducibility header.
    assert_eq!(r["inputs_hash"], selberg_explicit::inputs::inputs_hash());
    assert_eq!(r["config"]["command"], "constant");
    assert_eq!(r["config"]["argv"][1], "I_prod");
    let pi = json(&["constant", "pi"]);
    assert!(pi["lo"].as_f64().unwrap() <= std::f64::consts::PI && pi["hi"].as_f64().unwrap() >= std::f64::consts::PI);
}

#[test]
fn sigma_at_two_encloses_log_squared() {
    let r = json(&["sigma", "--U", "2", "--v", "1"]);
    let want = 2f64.ln().powi(2);
    let (lo, hi) = (r["value"]["lo"].as_f64().unwrap(), r["value"]["hi"].as_f64().unwrap());
    assert!(lo <= want * (1.0 + 1e-15) && hi >= want * (1.0 - 1e-15), "[{lo}, {hi}] vs {want}");
    assert_eq!(r["method"], "pairwise");
    let d = json(&["sigma", "--U", "500", "--v", "2", "--method", "decomposition", "--residual"]);
    assert_eq!(d["residual_check"]["pass"], true);
}

#[test]
fn exit_code_contract() {
    assert_eq!(code(&["sigma", "--U", "2", "--v", "1", "--no-such-flag"]), 64);
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["--help"]), 0);
    // Domain: unknown constant, v = 0.
    assert_eq!(code(&["constant", "no_such_constant"]), 2);
    assert_eq!(code(&["sigma", "--U", "10", "--v", "0"]), 2);
    // Configuration: inadmissible c; CSV for a non-table command.
    assert_eq!(code(&["pipeline", "--v", "1", "--regime", "analytic", "--c", "70"]), 2);
    assert_eq!(code(&["constant", "pi", "--format", "csv"]), 2);
    // Resource: past the caps.
    assert_eq!(code(&["hq", "--X", "3e8", "--v", "1"]), 3);
    assert_eq!(code(&["scan", "sq_half", "--v", "1", "--from", "10", "--to", "1e7"]), 3);
}

fn without_timestamp(out: &Output) -> Value {
    let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn identical_config_gives_identical_json() {
    for args in [
        &["constant", "twin_inverse", "--cutoff", "100000"][..],
        &["sigma", "--sweep", "--v", "2", "--from", "10", "--to", "1000", "--points", "20", "--threads", "2"][..],
        &["sum", "m_checkcheck", "--X", "3"][..],
    ] {
        let (a, b) = (esieve(args), esieve(args));
        assert!(a.status.success());
        assert_eq!(without_timestamp(&a), without_timestamp(&b), "{args:?}");
        // Byte-identical once the timestamp line is dropped.
        let strip = |o: &Output| {
            String::from_utf8_lossy(&o.stdout)
                .lines()
                .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(&a), strip(&b));
    }
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let base = ["sigma", "--sweep", "--v", "1", "--from", "10", "--to", "5000", "--points", "33"];
    let one = json(&[&base[..], &["--threads", "1"]].concat());
    let four = json(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one["rows"], four["rows"]);
    assert_eq!(one["rows"].as_array().unwrap().len(), 33);
    let csv = esieve(&[&base[..], &["--format", "csv"]].concat());
    let text = String::from_utf8(csv.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "U,v,lo,hi,residual_lo,residual_hi,bound");
    assert_eq!(lines.len(), 34);
    assert_eq!(lines[1].split(',').count(), 7);
}

#[test]
fn kernel_integral_cached_via_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_esieve"))
            .args(["hq", "--X", "20000", "--v", "2"])
            .env("ESIEVE_CACHE_DIR", dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    let first = run();
    assert_eq!(first["resumed"], false);
    assert!(std::fs::read_dir(dir.path()).unwrap().count() == 1);
    let second = run();
    assert_eq!(second["resumed"], true);
    assert_eq!(first["value"], second["value"]);
    assert_eq!(first["events"], second["events"]);
    assert_eq!(second["config"]["cache_dir"], dir.path().to_str().unwrap());
}

#[test]
fn scans_pipeline_and_bt() {
    let s = json(&["scan", "sumvar1log", "--v", "2", "--from", "10", "--to", "1e5", "--program"]);
    assert_eq!(s["certified"], true);
    assert!(s["bound"]["hi"].as_f64().unwrap() <= 0.694356698566237);
    let p = json(&["pipeline", "--v", "2", "--source", "reference"]);
    assert_eq!(p["source"], "reference");
    assert!(p["entries"]["K_v"]["lo"].as_f64().unwrap() > 0.0);
    let bt = json(&["bt", "--Y", "1e25"]);
    assert!(bt["coefficient"]["lo"].as_f64().unwrap() > 0.0);
    let f = &bt["factor"];
    assert!(f["lo"].as_f64().unwrap() > 0.0 && f["hi"].as_f64().unwrap() < 1.0);
    let m = json(&["sum", "inv_l", "--X", "10"]);
    assert!((m["lo"].as_f64().unwrap() - 2.442857142857143).abs() < 1e-12);
    let h = json(&["hq", "--s", "1", "--v", "1"]);
    assert_eq!(h["routes_agree"], true);
    assert_eq!(h["within_bound"], true);
}

#[test]
fn text_format_is_line_oriented() {
    let out = esieve(&["constant", "gamma", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("id: gamma")));
    assert!(text.lines().any(|l| l.starts_with("inputs_hash: ")));
}

#[test]
fn desk_suite_passes() {
    let out = esieve(&["verify", "--suite", "desk", "--threads", "2"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    for row in r["rows"].as_array().unwrap() {
        assert_eq!(row["pass"], true, "{row}");
    }
    assert_eq!(r["ok"], true);
    assert_eq!(out.status.code(), Some(0));
}
