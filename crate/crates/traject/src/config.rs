//! Scenario configuration files.
//!
//! A config is a TOML document with optional top-level `scenario` and `seed`
//! keys and a `[params]` table holding the scenario's parameters. Unknown keys
//! are errors at every level.

use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig<P> {
    scenario: Option<String>,
    seed: Option<u64>,
    params: Option<P>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<P> {
    pub params: P,
    pub seed: Option<u64>,
}

/// Parses `text` for the scenario `name`. Errors carry the TOML location and
/// the offending key.
pub fn parse<P: DeserializeOwned>(text: &str, name: &str) -> Result<Loaded<P>, String> {
    let raw: RawConfig<P> = toml::from_str(text).map_err(|e| e.to_string())?;
    if let Some(s) = &raw.scenario {
        if s != name {
            return Err(format!("config is for scenario `{s}` but `{name}` was requested"));
        }
    }
    let params = match raw.params {
        Some(p) => p,
        None => toml::from_str("").map_err(|e| format!("missing [params] table: {e}"))?,
    };
    Ok(Loaded { params, seed: raw.seed })
}
