//! Matrix of experiments fanned out over worker threads. Each experiment
//! builds its own problem instance and writes into its own directory.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::config::{Config, Overrides};
use crate::error::CliError;
use crate::experiment::{run_experiment, Summary};

pub const BENCH_SUMMARY_FILE: &str = "bench_summary.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchEntry {
    pub name: String,
    #[serde(flatten)]
    pub config: Config,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    /// Worker threads; 0 picks the available parallelism.
    #[serde(default)]
    pub threads: usize,
    pub experiments: Vec<BenchEntry>,
}

#[derive(Debug, Serialize)]
pub struct BenchOutcome {
    pub name: String,
    pub out: PathBuf,
    pub summary: Option<Summary>,
    pub error: Option<String>,
    pub exit_code: i32,
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg: BenchConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.check_names()?;
        Ok(cfg)
    }

    fn check_names(&self) -> Result<(), CliError> {
        if self.experiments.is_empty() {
            return Err(CliError::Config("bench needs at least one experiment".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.experiments {
            let ok = !e.name.is_empty() && e.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
            if !ok || e.name.starts_with('.') {
                return Err(CliError::Config(format!("experiment name '{}' is not a plain directory name", e.name)));
            }
            if !seen.insert(e.name.as_str()) {
                return Err(CliError::Config(format!("duplicate experiment name '{}'", e.name)));
            }
        }
        Ok(())
    }

    /// Applies the overrides (except `out`, which is the matrix root) and
    /// validates every entry before anything runs.
    pub fn prepare(&mut self, o: &Overrides) -> Result<(), CliError> {
        let inner = Overrides { out: None, ..o.clone() };
        for e in &mut self.experiments {
            e.config.apply(&inner);
            e.config.validate().map_err(|err| match err {
                CliError::Config(msg) => CliError::Config(format!("experiment '{}': {msg}", e.name)),
                other => other,
            })?;
        }
        Ok(())
    }
}

/// Runs every experiment under `root/<name>` and returns the outcomes in
/// config order.
pub fn run_bench(cfg: &BenchConfig, root: &Path) -> Vec<BenchOutcome> {
    let threads = match cfg.threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        t => t,
    }
    .min(cfg.experiments.len())
    .max(1);
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<BenchOutcome>>> = cfg.experiments.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(entry) = cfg.experiments.get(i) else { break };
                let out = root.join(&entry.name);
                let outcome = match run_experiment(&entry.config, &out) {
                    Ok(summary) => {
                        let exit_code = if summary.any_safeguard() { crate::error::EXIT_SAFEGUARD } else { 0 };
                        BenchOutcome { name: entry.name.clone(), out, summary: Some(summary), error: None, exit_code }
                    }
                    Err(e) => BenchOutcome {
                        name: entry.name.clone(),
                        out,
                        summary: None,
                        error: Some(e.to_string()),
                        exit_code: e.exit_code(),
                    },
                };
                *slots[i].lock().expect("slot lock") = Some(outcome);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every experiment ran")).collect()
}
