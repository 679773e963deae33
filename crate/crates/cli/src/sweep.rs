//! One-parameter sweeps over a base scenario.

use std::fs;
use std::path::{Path, PathBuf};

use nlheat::Execution;

use crate::config::{override_key, parse_config, ScenarioConfig, SWEEPABLE};
use crate::csvio::{fmt_float, table_csv};
use crate::error::CliError;
use crate::run::{run_scenario, RunManifest};

pub const SUMMARY_FILE: &str = "summary.csv";

/// Scalars copied into the summary, in column order.
pub const SUMMARY_SCALARS: &[&str] = &[
    "steps",
    "final_t",
    "final_mass",
    "mass_drift",
    "final_energy",
    "final_mu",
    "final_grad_l2",
    "gs_mu",
    "gs_pde_sup",
    "shoot_amplitude",
    "shoot_pde_sup",
    "lambda",
    "p",
    "c_gn",
];

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: String,
    pub manifest: RunManifest,
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub key: String,
    pub rows: Vec<SweepRow>,
    pub summary_path: PathBuf,
}

impl SweepSummary {
    /// Exit code of the first failing scenario, 0 if all succeeded.
    pub fn exit_code(&self) -> i32 {
        self.rows
            .iter()
            .map(|r| r.manifest.exit_code())
            .find(|&c| c != 0)
            .unwrap_or(0)
    }

    pub fn column(&self, scalar: &str) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.manifest.scalar(scalar)).collect()
    }
}

/// Run `base_text` once per value of `key`. Scenario `i` writes into
/// `out/<key>_<i>`; the summary goes to `out/summary.csv`.
pub fn sweep(
    base_text: &str,
    key: &str,
    values: &[String],
    out: &Path,
    exec: Execution,
) -> Result<SweepSummary, CliError> {
    if !SWEEPABLE.contains(&key) {
        return Err(CliError::Usage(format!(
            "`{key}` cannot be swept; choose one of {}",
            SWEEPABLE.join(", ")
        )));
    }
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one value".into()));
    }

    let mut configs: Vec<ScenarioConfig> = Vec::with_capacity(values.len());
    let mut issues = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let dir = out.join(format!("{key}_{i:03}"));
        let text = override_key(base_text, key, v);
        let text = override_key(&text, "output_dir", &dir.display().to_string());
        match parse_config(&text) {
            Ok(c) => configs.push(c),
            Err(errs) => issues.extend(errs.into_iter().map(|mut e| {
                e.message = format!("{} (sweep value `{v}`)", e.message);
                e
            })),
        }
    }
    if !issues.is_empty() {
        return Err(CliError::Config(issues));
    }
    if configs[0].tasks.is_empty() {
        return Err(CliError::Usage("the base config lists no tasks".into()));
    }
    fs::create_dir_all(out).map_err(CliError::io(out))?;

    let manifests = exec.map(&configs, |c| match run_scenario(c) {
        Ok(m) => m,
        Err(f) => f.manifest,
    });
    let rows: Vec<SweepRow> = values
        .iter()
        .cloned()
        .zip(manifests)
        .map(|(value, manifest)| SweepRow { value, manifest })
        .collect();

    let mut header = vec![key, "status", "exit_code", "termination"];
    header.extend_from_slice(SUMMARY_SCALARS);
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let m = &r.manifest;
            let mut row = vec![
                r.value.clone(),
                if m.exit_code() == 0 { "ok".into() } else { "failed".into() },
                m.exit_code().to_string(),
                m.termination.clone().unwrap_or_default(),
            ];
            row.extend(
                SUMMARY_SCALARS
                    .iter()
                    .map(|s| m.scalar(s).map(fmt_float).unwrap_or_default()),
            );
            row
        })
        .collect();
    let summary_path = out.join(SUMMARY_FILE);
    fs::write(&summary_path, table_csv(&header, &table)).map_err(CliError::io(&summary_path))?;
    Ok(SweepSummary {
        key: key.to_string(),
        rows,
        summary_path,
    })
}
