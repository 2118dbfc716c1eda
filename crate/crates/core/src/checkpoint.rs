//! Versioned plain-text checkpoints: a config echo plus the parameter and
//! Adam moment arrays.
//!
//! Floats are written with 17 significant digits, which is enough for an
//! exact f64 round trip, so parse-then-serialize reproduces a checkpoint
//! byte for byte.

use std::collections::HashMap;
use std::path::Path;

use crate::model::{ModelParams, RunConfig};
use crate::{Error, Result};

const HEADER: &str = "qmoe checkpoint v1";

fn float_field(value: f64) -> String {
    format!("{value:.16e}")
}

fn array_line(name: &str, values: &[f64]) -> String {
    let joined: Vec<String> = values.iter().map(|&v| float_field(v)).collect();
    format!("{name} = {}", joined.join(" "))
}

/// Render a checkpoint document.
pub fn write_checkpoint(config: &RunConfig, params: &ModelParams) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str("[config]\n");
    for (key, value) in config.to_kv() {
        out.push_str(&format!("{key} = {value}\n"));
    }
    out.push_str("[state]\n");
    out.push_str(&format!("step_count = {}\n", params.step_count));
    out.push_str(&array_line("theta", &params.theta));
    out.push('\n');
    out.push_str(&array_line("adam_m", &params.adam_m));
    out.push('\n');
    out.push_str(&array_line("adam_v", &params.adam_v));
    out.push('\n');
    out
}

pub fn save_checkpoint(path: &Path, config: &RunConfig, params: &ModelParams) -> Result<()> {
    std::fs::write(path, write_checkpoint(config, params))?;
    Ok(())
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Data(format!("checkpoint: {}", msg.into()))
}

fn parse_float_array(value: &str, name: &str) -> Result<Vec<f64>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(' ')
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| bad(format!("invalid float '{tok}' in {name}")))
        })
        .collect()
}

/// Parse a checkpoint document back into its config and parameter state.
pub fn parse_checkpoint(text: &str) -> Result<(RunConfig, ModelParams)> {
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(bad(format!("missing '{HEADER}' header")));
    }
    if lines.next() != Some("[config]") {
        return Err(bad("expected [config] section"));
    }

    let mut config = RunConfig::default();
    let mut state_lines: HashMap<&str, &str> = HashMap::new();
    let mut in_state = false;
    for line in lines {
        if line == "[state]" {
            in_state = true;
            continue;
        }
        let (key, value) = line
            .split_once(" = ")
            .ok_or_else(|| bad(format!("malformed line '{line}'")))?;
        if in_state {
            if state_lines.insert(key, value).is_some() {
                return Err(bad(format!("duplicate state field '{key}'")));
            }
        } else {
            config
                .set_kv(key, value)
                .map_err(|e| bad(format!("config echo: {e}")))?;
        }
    }
    if !in_state {
        return Err(bad("missing [state] section"));
    }

    let step_count: u64 = state_lines
        .get("step_count")
        .ok_or_else(|| bad("missing step_count"))?
        .parse()
        .map_err(|_| bad("invalid step_count"))?;
    let theta = parse_float_array(state_lines.get("theta").ok_or_else(|| bad("missing theta"))?, "theta")?;
    let adam_m = parse_float_array(
        state_lines.get("adam_m").ok_or_else(|| bad("missing adam_m"))?,
        "adam_m",
    )?;
    let adam_v = parse_float_array(
        state_lines.get("adam_v").ok_or_else(|| bad("missing adam_v"))?,
        "adam_v",
    )?;

    let params = ModelParams {
        theta,
        adam_m,
        adam_v,
        step_count,
    };
    params.validate().map_err(|e| bad(e.to_string()))?;
    config.validate().map_err(|e| bad(e.to_string()))?;
    Ok((config, params))
}

pub fn load_checkpoint(path: &Path) -> Result<(RunConfig, ModelParams)> {
    let text = std::fs::read_to_string(path)?;
    parse_checkpoint(&text)
}
