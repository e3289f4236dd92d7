//! Scenario runner: loads a TOML config, runs one scenario, and writes its
//! result tables, plot data and a run manifest.

pub mod config;
pub mod output;
pub mod scenarios;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use output::OutputFile;
use scenarios::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScenarioName {
    Bernoulli,
    Scattering,
    Flipper,
    Decay,
    SternGerlach,
    Epr,
    TwoSlit,
    Bigbang,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 8] = [
        ScenarioName::Bernoulli,
        ScenarioName::Scattering,
        ScenarioName::Flipper,
        ScenarioName::Decay,
        ScenarioName::SternGerlach,
        ScenarioName::Epr,
        ScenarioName::TwoSlit,
        ScenarioName::Bigbang,
    ];

    pub fn as_str(self) -> &'static str {
        with_scenario!(self, S => S::NAME)
    }
}

/// Why a run produced no results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// The config or invocation is invalid; nothing was computed.
    Schema(String),
    /// The computation or the output writing failed.
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Schema(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Schema(m) => write!(f, "invalid configuration: {m}"),
            Failure::Runtime(m) => write!(f, "run failed: {m}"),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a, P> {
    tool: &'static str,
    version: &'static str,
    scenario: &'static str,
    seed: Option<u64>,
    created_unix_seconds: u64,
    files: Vec<&'a str>,
    params: &'a P,
}

/// Runs `name` with the TOML `config_text` and writes every output into
/// `out_dir`. Returns the written paths, manifest last.
pub fn run_scenario(
    name: ScenarioName,
    config_text: &str,
    seed_override: Option<u64>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, Failure> {
    with_scenario!(name, S => execute::<S>(config_text, seed_override, out_dir))
}

fn execute<S: Scenario>(config_text: &str, seed_override: Option<u64>, out_dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let loaded = config::parse::<S::Params>(config_text, S::NAME).map_err(Failure::Schema)?;
    let seed = seed_override.or(loaded.seed);
    let needs_seed = S::needs_seed(&loaded.params);
    if needs_seed && seed.is_none() {
        return Err(Failure::Schema(format!(
            "scenario `{}` needs a seed: set `seed` in the config or pass --seed",
            S::NAME
        )));
    }
    let mut files =
        S::run(&loaded.params, seed.unwrap_or(0)).map_err(|e| Failure::Runtime(format!("{e:#}")))?;
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario: S::NAME,
        seed: if needs_seed { seed } else { None },
        created_unix_seconds: created,
        files: files.iter().map(|f| f.name.as_str()).collect(),
        params: &loaded.params,
    };
    let manifest = toml::to_string(&manifest).map_err(|e| Failure::Runtime(e.to_string()))?;
    files.push(OutputFile { name: format!("{}_manifest.toml", S::NAME), contents: manifest });
    output::write_atomic(out_dir, &files).map_err(|e| Failure::Runtime(format!("{e:#}")))
}

/// Every scenario with its parameters and defaults.
pub fn list_scenarios() -> String {
    let mut out = String::new();
    for name in ScenarioName::ALL {
        with_scenario!(name, S => describe::<S>(&mut out));
    }
    out
}

fn describe<S: Scenario>(out: &mut String) {
    let template = toml::Table::try_from(S::template()).expect("scenario parameters serialize to a table");
    let _ = writeln!(out, "{}", S::NAME);
    let _ = writeln!(out, "  {}", S::SUMMARY);
    let _ = writeln!(out, "  seed: {}", S::SEED);
    let _ = writeln!(out, "  [params]");
    let width = S::DOCS.iter().map(|d| d.name.len()).max().unwrap_or(0);
    for d in S::DOCS {
        let value = template.get(d.name).map(|v| v.to_string()).unwrap_or_default();
        let status = if S::REQUIRED.contains(&d.name) {
            format!("required, e.g. {value}")
        } else {
            format!("default {value}")
        };
        let _ = writeln!(out, "    {:width$}  {}  ({status})", d.name, d.doc);
    }
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn doc_keys<S: Scenario>() -> (BTreeSet<String>, BTreeSet<String>) {
        let template = toml::Table::try_from(S::template()).unwrap();
        (template.keys().cloned().collect(), S::DOCS.iter().map(|d| d.name.to_string()).collect())
    }

    #[test]
    fn every_parameter_is_documented() {
        for name in ScenarioName::ALL {
            let (keys, docs) = with_scenario!(name, S => doc_keys::<S>());
            assert_eq!(keys, docs, "{}", name.as_str());
        }
    }

    fn template_config<S: Scenario>() -> String {
        format!("scenario = \"{}\"\nseed = 3\n\n[params]\n{}", S::NAME, toml::to_string(&S::template()).unwrap())
    }

    #[test]
    fn templates_run() {
        let dir = tempfile::tempdir().unwrap();
        for name in ScenarioName::ALL {
            let text = with_scenario!(name, S => template_config::<S>());
            let paths = run_scenario(name, &text, None, dir.path()).unwrap_or_else(|e| panic!("{}: {e}", name.as_str()));
            let manifest = paths.last().unwrap();
            assert!(manifest.ends_with(format!("{}_manifest.toml", name.as_str())));
            // the manifest's params table is itself a valid config
            let back = std::fs::read_to_string(manifest).unwrap();
            let table: toml::Table = back.parse().unwrap();
            assert_eq!(table["scenario"].as_str(), Some(name.as_str()));
        }
    }

    #[test]
    fn missing_seed_is_a_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_scenario(ScenarioName::Bernoulli, "", None, dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
        assert!(run_scenario(ScenarioName::Epr, "", None, dir.path()).is_ok());
    }

    #[test]
    fn runtime_errors_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_scenario(ScenarioName::Bigbang, "[params]\nn_particles = 0\n", Some(1), dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
