//! `key=value` overrides addressed by dotted paths into the scenario schema,
//! e.g. `rss.response_time_s=0.3` or `actors.0.behavior.decel=7`.

use toml::Value;

use super::IoError;
use crate::harness::ScenarioSpec;

/// Parse `value` as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn unknown(key: &str) -> IoError {
    IoError::Invalid(format!("unknown override key `{key}`"))
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), IoError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(unknown(key));
    }
    let mut cur = root;
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Table(t) => {
                if last {
                    t.insert((*part).to_string(), value);
                    return Ok(());
                }
                t.get_mut(*part).ok_or_else(|| unknown(key))?
            }
            Value::Array(a) => {
                let idx: usize = part.parse().map_err(|_| unknown(key))?;
                let slot = a.get_mut(idx).ok_or_else(|| unknown(key))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(unknown(key)),
        };
    }
    unreachable!("loop returns on the last segment")
}

/// Apply `key=value` overrides to a scenario. Keys the schema does not know
/// are rejected by name.
pub fn apply_overrides(spec: &ScenarioSpec, overrides: &[String]) -> Result<ScenarioSpec, IoError> {
    if overrides.is_empty() {
        return Ok(spec.clone());
    }
    let mut root = Value::try_from(spec).map_err(|e| IoError::Invalid(format!("scenario does not serialize: {e}")))?;
    let mut keys = Vec::with_capacity(overrides.len());
    for ov in overrides {
        let (key, raw) = ov
            .split_once('=')
            .ok_or_else(|| IoError::Invalid(format!("override `{ov}` is not of the form key=value")))?;
        let key = key.trim();
        set_path(&mut root, key, parse_value(raw.trim()))?;
        keys.push(key);
    }
    root.try_into::<ScenarioSpec>().map_err(|e| {
        let msg = e.message().to_string();
        // an inserted leaf the schema rejects is reported by its full key
        match keys.iter().find(|k| msg.contains(&format!("unknown field `{}`", k.rsplit('.').next().unwrap_or(k)))) {
            Some(k) => unknown(k),
            None => IoError::Invalid(format!("override: {msg}")),
        }
    })
}
