//! On-disk artifacts for a batch: per-run and aggregate CSVs, a JSON
//! summary and a manifest recording the effective configuration.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ConfigFile, SimulationConfig};
use crate::engine::BatchResult;
use crate::metrics::{write_batch_csv, write_run_csv, write_social_csv, Counter};

/// Paths written by [`write_batch_artifacts`], rooted at the directory it was given.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Artifacts {
    pub manifest: PathBuf,
    pub batch_csv: PathBuf,
    pub summary_json: PathBuf,
    pub run_csvs: Vec<PathBuf>,
    pub social_csv: PathBuf,
}

impl Artifacts {
    pub fn all_paths(&self) -> impl Iterator<Item = &PathBuf> {
        [
            &self.manifest,
            &self.batch_csv,
            &self.summary_json,
            &self.social_csv,
        ]
        .into_iter()
        .chain(&self.run_csvs)
    }
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    version: &'a str,
    seed: u64,
    runs: usize,
    horizon_days: u32,
    not_served_total_mean: f64,
    not_served_daily_mean: Vec<f64>,
    run_seeds: Vec<u64>,
}

/// Manifest text: the effective config as TOML, usable again via `--config`.
/// Crate version and replicate count go in leading comments.
pub fn manifest_text(cfg: &SimulationConfig, runs: usize) -> String {
    format!(
        "# siot-sim run manifest\n# version = {}\n# runs = {}\n\n{}",
        crate::VERSION,
        runs,
        ConfigFile::from_config(cfg).to_toml()
    )
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes every artifact of `batch` into `dir` (created if missing).
pub fn write_batch_artifacts(
    dir: &Path,
    cfg: &SimulationConfig,
    batch: &BatchResult,
) -> io::Result<Artifacts> {
    fs::create_dir_all(dir)?;
    let runs_dir = dir.join("runs");
    fs::create_dir_all(&runs_dir)?;

    let manifest = dir.join("manifest.toml");
    fs::write(&manifest, manifest_text(cfg, batch.runs.len()))?;

    let batch_csv = dir.join("batch.csv");
    let mut w = create(&batch_csv)?;
    write_batch_csv(&batch.aggregate, &mut w)?;
    w.flush()?;

    let width = batch.runs.len().saturating_sub(1).to_string().len().max(3);
    let mut run_csvs = Vec::with_capacity(batch.runs.len());
    for (i, r) in batch.runs.iter().enumerate() {
        let path = runs_dir.join(format!("run_{i:0width$}.csv"));
        let mut w = create(&path)?;
        write_run_csv(&r.daily, &mut w)?;
        w.flush()?;
        run_csvs.push(path);
    }

    let social_csv = dir.join("social_run0.csv");
    let mut w = create(&social_csv)?;
    write_social_csv(&batch.runs[0].final_social_sizes, &mut w)?;
    w.flush()?;

    let series = batch.aggregate.mean_series(Counter::NotServed);
    let summary = Summary {
        version: crate::VERSION,
        seed: cfg.seed,
        runs: batch.runs.len(),
        horizon_days: cfg.horizon_days,
        not_served_total_mean: series.iter().sum(),
        not_served_daily_mean: series,
        run_seeds: batch.runs.iter().map(|r| r.seed).collect(),
    };
    let summary_json = dir.join("summary.json");
    let mut w = create(&summary_json)?;
    serde_json::to_writer_pretty(&mut w, &summary).map_err(io::Error::other)?;
    writeln!(w)?;
    w.flush()?;

    Ok(Artifacts {
        manifest,
        batch_csv,
        summary_json,
        run_csvs,
        social_csv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{MobilityMode, Network};
    use crate::engine::{run_batch, Execution};

    #[test]
    fn artifacts_exist_and_manifest_round_trips() {
        let cfg = SimulationConfig {
            population: 30,
            network: Network::Regular,
            mobility: MobilityMode::Stationary,
            horizon_days: 1,
            ..Default::default()
        };
        let batch = run_batch(&cfg, 2, Execution::Serial).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let a = write_batch_artifacts(dir.path(), &cfg, &batch).unwrap();
        assert!(a.all_paths().all(|p| p.exists()));
        assert_eq!(a.run_csvs.len(), 2);

        let text = fs::read_to_string(&a.manifest).unwrap();
        let mut back = SimulationConfig::default();
        assert!(text.contains("# runs = 2"));
        let file = ConfigFile::parse(&text).unwrap();
        file.apply_to(&mut back);
        assert_eq!(back, cfg);
    }
}
