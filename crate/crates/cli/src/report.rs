//! Run configuration and report rendering.

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use selberg_explicit::inputs::inputs_hash;
use selberg_explicit::{Error, Result};

use crate::Cli;

/// Environment variable naming the cache directory (kernel-integral
/// checkpoints are kept there when no explicit `--checkpoint` is given).
pub const CACHE_ENV: &str = "ESIEVE_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Everything that determines a run; serialized into every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub argv: Vec<String>,
    pub cutoff: Option<u64>,
    pub threads: usize,
    pub format: Format,
    pub checkpoint: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(cli: &Cli, argv: &[String]) -> RunConfig {
        let command = format!("{:?}", cli.command)
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or_default()
            .to_lowercase();
        RunConfig {
            command,
            argv: argv.to_vec(),
            cutoff: cli.global.cutoff,
            threads: cli.global.threads.max(1),
            format: if cli.global.json { Format::Json } else { cli.global.format },
            checkpoint: cli.global.checkpoint.clone(),
            cache_dir: std::env::var_os(CACHE_ENV).map(PathBuf::from),
        }
    }
}

/// A rendered report and the process exit code.
pub struct Outcome {
    pub rendered: String,
    pub exit_code: u8,
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Wrap a result object with the reproducibility header.
pub fn envelope(result: Value, config: &RunConfig) -> Value {
    let mut obj = match result {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
    obj.insert("inputs_hash".into(), Value::String(inputs_hash()));
    obj.insert("timestamp".into(), Value::from(timestamp()));
    Value::Object(obj)
}

/// Render a JSON report in the configured format. CSV is reserved for
/// tables and handled by the caller.
pub fn render(result: Value, config: &RunConfig) -> Result<String> {
    let report = envelope(result, config);
    match config.format {
        Format::Json => Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
        Format::Text => {
            let mut out = String::new();
            if let Value::Object(m) = &report {
                for (k, v) in m {
                    if k == "config" {
                        continue;
                    }
                    out.push_str(&format!("{k}: {}\n", text_value(v)));
                }
            }
            Ok(out)
        }
        Format::Csv => Err(Error::Config(format!(
            "CSV output is only available for sweep tables, not `{}`",
            config.command
        ))),
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::Object(m) if m.len() == 2 && m.contains_key("lo") && m.contains_key("hi") => {
            format!("[{}, {}]", m["lo"], m["hi"])
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
