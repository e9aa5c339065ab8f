use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use super::{CliError, CommandKind};
use crate::dynamics::{replay, DriftModel, LabeledPath, NoiseRecord, NoiseStep};
use crate::Configuration;

pub const MANIFEST: &str = "manifest.json";

/// Round-trip float formatting (17 significant digits).
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Written next to the outputs of every run. Keys are emitted in a fixed
/// order (struct order, maps sorted).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: CommandKind,
    pub config: RunConfig,
    pub config_hash: String,
    pub complete: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub wall_time_seconds: f64,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{} is not a run manifest: {e}", path.display())))
    }

    pub fn output(&self, name: &str) -> Option<&OutputEntry> {
        self.outputs.iter().find(|o| o.path == name)
    }
}

/// SHA-256 of the canonical JSON of `config`, without the output directory.
pub fn config_hash(config: &RunConfig) -> String {
    let mut c = config.clone();
    c.out = None;
    let bytes = serde_json::to_vec(&c).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output directory with the files written so far.
pub struct Outputs {
    dir: PathBuf,
    pub entries: Vec<OutputEntry>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), entries: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
        self.entries.push(OutputEntry { path: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(())
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(&row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.write(name, &bytes)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn manifest(&self, manifest: &RunManifest) -> Result<PathBuf, CliError> {
        let path = self.dir.join(MANIFEST);
        let mut bytes = serde_json::to_vec_pretty(manifest).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Header `[prefix.., x]` or `[prefix.., x, y]`.
pub fn coord_header<'a>(prefix: &[&'a str], dim: usize) -> Vec<&'a str> {
    let mut h = prefix.to_vec();
    h.extend(["x", "y"].iter().take(dim));
    h
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        let header = r.headers().map_err(|e| CliError::Io(e.to_string()))?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize, CliError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Invalid(format!("missing column '{name}'")))
    }

    pub fn dim(&self) -> usize {
        if self.header.iter().any(|h| h == "y") {
            2
        } else {
            1
        }
    }
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T, CliError> {
    s.parse().map_err(|_| CliError::Invalid(format!("bad number '{s}' in csv")))
}

fn coords_of(t: &Table, row: &[String], dim: usize) -> Result<[f64; 2], CliError> {
    let mut out = [0.0; 2];
    for (c, name) in ["x", "y"].iter().take(dim).enumerate() {
        out[c] = num(&row[t.column(name)?])?;
    }
    Ok(out)
}

/// Configurations of `samples.csv`, one per replica in replica order.
pub fn read_samples(path: &Path) -> Result<Vec<Configuration>, CliError> {
    let t = Table::read(path)?;
    let dim = t.dim();
    let rep = t.column("replica")?;
    let mut out: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for row in &t.rows {
        let xy = coords_of(&t, row, dim)?;
        out.entry(num(&row[rep])?).or_default().extend_from_slice(&xy[..dim]);
    }
    out.into_values()
        .map(|c| Configuration::from_flat(dim, c).map_err(|e| CliError::Invalid(e.to_string())))
        .collect()
}

/// Paths of an `evolve` run, with noise records rebuilt by replaying
/// `noise.csv` when `with_noise` is set.
pub fn read_paths(manifest_path: &Path, with_noise: bool) -> Result<Vec<LabeledPath>, CliError> {
    let manifest = RunManifest::read(manifest_path)?;
    if manifest.command != CommandKind::Evolve {
        return Err(CliError::Invalid(format!("{} is not an evolve manifest", manifest_path.display())));
    }
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let model = manifest.config.drift_model()?;
    let seed = manifest.config.seed();
    let t = Table::read(&dir.join("trajectory.csv"))?;
    let dim = t.dim();
    let (rep, time) = (t.column("replica")?, t.column("time")?);
    let mut grouped: BTreeMap<u64, (Vec<f64>, Vec<Vec<f64>>)> = BTreeMap::new();
    let mut last: Option<(u64, String)> = None;
    for row in &t.rows {
        let r: u64 = num(&row[rep])?;
        let entry = grouped.entry(r).or_default();
        if last.as_ref() != Some(&(r, row[time].clone())) {
            entry.0.push(num(&row[time])?);
            entry.1.push(Vec::new());
            last = Some((r, row[time].clone()));
        }
        let xy = coords_of(&t, row, dim)?;
        entry.1.last_mut().expect("pushed").extend_from_slice(&xy[..dim]);
    }
    let mut noise = if with_noise { Some(read_noise(&dir.join("noise.csv"))?) } else { None };
    grouped
        .into_iter()
        .map(|(replica, (times, states))| {
            let positions = states
                .into_iter()
                .map(|c| Configuration::from_flat(dim, c).map_err(|e| CliError::Invalid(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let record = match noise.as_mut() {
                Some(all) => {
                    let steps = all.remove(&replica).unwrap_or_default();
                    Some(rebuild_record(&model, positions[0].coords(), steps)?)
                }
                None => None,
            };
            Ok(LabeledPath {
                model,
                seed,
                replica,
                times,
                positions,
                noise: record,
                diagnostics: Default::default(),
            })
        })
        .collect()
}

type RawSteps = Vec<(f64, f64, Vec<f64>)>;

fn read_noise(path: &Path) -> Result<BTreeMap<u64, RawSteps>, CliError> {
    let t = Table::read(path)?;
    let dim = if t.header.iter().any(|h| h == "dy") { 2 } else { 1 };
    let (rep, step, tc, dtc) = (t.column("replica")?, t.column("step")?, t.column("t")?, t.column("dt")?);
    let (dx, dy) = (t.column("dx")?, if dim == 2 { Some(t.column("dy")?) } else { None });
    let mut out: BTreeMap<u64, RawSteps> = BTreeMap::new();
    let mut last: Option<(u64, String)> = None;
    for row in &t.rows {
        let r: u64 = num(&row[rep])?;
        let steps = out.entry(r).or_default();
        if last.as_ref() != Some(&(r, row[step].clone())) {
            steps.push((num(&row[tc])?, num(&row[dtc])?, Vec::new()));
            last = Some((r, row[step].clone()));
        }
        let inc = &mut steps.last_mut().expect("pushed").2;
        inc.push(num(&row[dx])?);
        if let Some(dy) = dy {
            inc.push(num(&row[dy])?);
        }
    }
    Ok(out)
}

fn rebuild_record(model: &DriftModel, initial: &[f64], steps: RawSteps) -> Result<NoiseRecord, CliError> {
    let schedule: Vec<(f64, Vec<f64>)> = steps.iter().map(|(_, dt, inc)| (*dt, inc.clone())).collect();
    let states = replay(model, initial, &schedule)?;
    Ok(NoiseRecord {
        initial: initial.to_vec(),
        steps: steps
            .into_iter()
            .zip(states)
            .map(|((t, dt, increments), state)| NoiseStep { t, dt, increments, state })
            .collect(),
    })
}
