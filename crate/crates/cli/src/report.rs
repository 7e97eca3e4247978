use std::process::ExitCode;
use std::time::Duration;

use clap::ValueEnum;
use peelkit_core::interval::Enclosure;
use peelkit_core::{scalar, Error};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

/// A finished command: named outputs plus whether its checks held.
pub struct Outcome {
    pub outputs: Map<String, Value>,
    pub verified: bool,
}

impl Outcome {
    pub fn new() -> Self {
        Outcome { outputs: Map::new(), verified: true }
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.outputs.insert(key.to_string(), value.into());
    }
}

pub enum Failure {
    Input(String),
    Verification(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::StateBudget { .. } | Error::TooLarge { .. } => Failure::Resource(e.to_string()),
            Error::Certification(_) => Failure::Verification(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl Failure {
    fn parts(&self) -> (&'static str, &str, u8) {
        match self {
            Failure::Verification(m) => ("verification", m, 1),
            Failure::Input(m) => ("input", m, 2),
            Failure::Resource(m) => ("resource", m, 3),
        }
    }
}

/// `{"enclosure": [lo, hi], "approx": ...}` with exact rational strings.
pub fn enclosure(e: &Enclosure) -> Value {
    json!({
        "enclosure": [scalar::to_string(&e.lo), scalar::to_string(&e.hi)],
        "approx": format!("{:.6} (approximate)", e.midpoint_f64()),
    })
}

fn text(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Object(o) if o.contains_key("enclosure") => {
            let ends = o["enclosure"].as_array().map(|a| a.iter().map(text).collect::<Vec<_>>().join(", "));
            format!("[{}]  ~ {}", ends.unwrap_or_default(), text(&o["approx"]))
        }
        Value::Object(o) if o.contains_key("check") => {
            let mark = if o["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
            format!("[{mark}] {}: {} ({})", text(&o["suite"]), text(&o["check"]), text(&o["detail"]))
        }
        other => other.to_string(),
    }
}

pub fn emit(format: OutputFormat, argv: &[String], elapsed: Duration, result: Result<Outcome, Failure>) -> ExitCode {
    let ms = elapsed.as_millis() as u64;
    match result {
        Ok(outcome) => {
            let verdict = if outcome.verified { "pass" } else { "fail" };
            match format {
                OutputFormat::Json => {
                    let body = json!({
                        "command": argv,
                        "outputs": outcome.outputs,
                        "verdict": verdict,
                        "elapsed_ms": ms,
                    });
                    println!("{}", serde_json::to_string_pretty(&body).expect("json value"));
                }
                OutputFormat::Text => {
                    for (k, v) in &outcome.outputs {
                        let nested = |x: &Value| x.is_array() || x.is_object();
                        let rows = v.as_array().filter(|items| items.iter().any(nested));
                        if let Some(items) = rows {
                            println!("{k}:");
                            for item in items {
                                println!("  {}", text(item));
                            }
                        } else {
                            println!("{k}: {}", text(v));
                        }
                    }
                    println!("verdict: {verdict}");
                }
            }
            ExitCode::from(if outcome.verified { 0 } else { 1 })
        }
        Err(f) => {
            let (kind, message, code) = f.parts();
            match format {
                OutputFormat::Json => {
                    let body = json!({
                        "command": argv,
                        "error": {"kind": kind, "message": message},
                        "exit_code": code,
                        "elapsed_ms": ms,
                    });
                    println!("{}", serde_json::to_string_pretty(&body).expect("json value"));
                }
                OutputFormat::Text => eprintln!("error ({kind}): {message}"),
            }
            ExitCode::from(code)
        }
    }
}
