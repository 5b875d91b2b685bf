//! Artifact files: CSV series, JSON reports and the manifest listing them.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use greenvqs::greens::{Algorithm, GreensKind, GreensSeries};
use greenvqs::spectral::{Pole, Spectrum};
use greenvqs::vqs::VqsTrajectory;
use greenvqs::TimeGrid;
use num_complex::Complex64;
use serde::Serialize;

pub const MANIFEST: &str = "manifest.json";

pub fn series_file(kind: GreensKind) -> String {
    format!("greens_{}.csv", kind.name())
}

pub fn reference_file(kind: GreensKind) -> String {
    format!("reference_{}.csv", kind.name())
}

/// Directory of output files; remembers what it wrote for the manifest.
pub struct Bundle {
    dir: PathBuf,
    files: BTreeSet<String>,
}

impl Bundle {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: BTreeSet::new() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.insert(name.to_string());
        self.dir.join(name)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> anyhow::Result<()> {
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    fn write_rows(&mut self, name: &str, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> anyhow::Result<()> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|x| x.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_series(&mut self, name: &str, series: &GreensSeries) -> anyhow::Result<()> {
        let header = ["t", "re", "im"].map(String::from);
        let rows = series.times().into_iter().zip(series.values()).map(|(t, v)| vec![t, v.re, v.im]);
        self.write_rows(name, &header, rows)
    }

    pub fn write_spectrum(&mut self, name: &str, s: &Spectrum) -> anyhow::Result<()> {
        let header = ["omega", "re", "im"].map(String::from);
        let rows = s.omegas.iter().zip(&s.values).map(|(w, v)| vec![*w, v.re, v.im]);
        self.write_rows(name, &header, rows)
    }

    pub fn write_trajectory(&mut self, name: &str, traj: &VqsTrajectory) -> anyhow::Result<()> {
        let mut header = vec!["t".to_string(), "theta0".to_string()];
        header.extend((0..traj.ansatz.n_parameters()).map(|k| format!("theta{}", k + 1)));
        let rows = traj.times().into_iter().enumerate().map(|(k, t)| {
            let mut row = vec![t, traj.theta0[k]];
            row.extend(&traj.theta[k]);
            row
        });
        self.write_rows(name, &header, rows)
    }

    /// Writes the manifest last, listing every file written so far.
    pub fn finish(mut self, command: &str, config: serde_json::Value) -> anyhow::Result<PathBuf> {
        let manifest = serde_json::json!({
            "tool": "greenvqs",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
            "files": self.files.iter().collect::<Vec<_>>(),
        });
        self.write_json(MANIFEST, &manifest)?;
        Ok(self.dir)
    }
}

/// Reads a `t,re,im` series back, rebuilding its grid.
pub fn read_series(path: &Path, kind: GreensKind) -> anyhow::Result<GreensSeries> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> anyhow::Result<f64> {
            record
                .get(i)
                .with_context(|| format!("{}: row {} too short", path.display(), line + 2))?
                .parse::<f64>()
                .with_context(|| format!("{}: row {} is not numeric", path.display(), line + 2))
        };
        times.push(field(0)?);
        values.push(Complex64::new(field(1)?, field(2)?));
    }
    if times.len() < 2 {
        bail!("{} holds fewer than two samples", path.display());
    }
    let grid = TimeGrid::from_times(&times)?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(GreensSeries::new(label, kind, Algorithm::Exact, &grid, values)?)
}

pub fn read_poles(path: &Path) -> anyhow::Result<Vec<Pole>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}
