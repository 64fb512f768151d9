//! Content-addressed persistence under a data directory.
//!
//! Blobs live in `blobs/<sha256>`; `index.json` maps app ids, report ids,
//! wireframe refs and jobs onto them. Every file is written to a temporary
//! name and renamed into place.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use reprolint_core::appsim::{AppModel, ModelError};
use reprolint_core::canon::to_canonical_json;
use reprolint_core::graph::{ExecutionGraph, GraphError};
use reprolint_core::quality::{render_json, QualityReport};

use crate::settings::Overrides;

pub const INDEX_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store i/o at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("corrupt index: {0}")]
    CorruptIndex(String),
    #[error("blob {0} is missing")]
    MissingBlob(String),
    #[error("blob {0} does not match its hash")]
    Tampered(String),
    #[error("stored app model is invalid: {0}")]
    Model(#[from] ModelError),
    #[error("stored graph is invalid: {0}")]
    Graph(#[from] GraphError),
    #[error("stored report is invalid: {0}")]
    Report(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Queued,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JobRecord {
    pub job_id: String,
    pub status: JobStatus,
    /// Blob holding the report text.
    pub report_ref: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels_ref: Option<String>,
    pub app_id: String,
    pub config: Overrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result_ref: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AppEntry {
    pub app_id: String,
    pub app_name: String,
    pub graph_ref: String,
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Index {
    version: u32,
    apps: BTreeMap<String, AppEntry>,
    reports: BTreeSet<String>,
    wireframes: BTreeMap<String, String>,
    jobs: BTreeMap<String, JobRecord>,
    next_job: u64,
}

pub struct Store {
    root: PathBuf,
    index: Mutex<Index>,
}

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn is_hash(s: &str) -> bool {
    s.len() == 64
        && s.bytes()
            .all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase())
}

fn write_atomic(dir: &Path, target: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(target))?;
    tmp.persist(target).map_err(|e| StoreError::Io {
        path: target.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

impl Store {
    /// Opens (or creates) the store at `root`. Jobs left queued or running
    /// by an earlier process are marked failed.
    pub fn open(root: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let root = root.into();
        let blobs = root.join("blobs");
        fs::create_dir_all(&blobs).map_err(io_err(&blobs))?;
        let path = root.join("index.json");
        let mut index = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str::<Index>(&text)
                .map_err(|e| StoreError::CorruptIndex(e.to_string()))?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Index {
                version: INDEX_VERSION,
                ..Index::default()
            },
            Err(e) => return Err(io_err(&path)(e)),
        };
        if index.version != INDEX_VERSION {
            return Err(StoreError::CorruptIndex(format!(
                "unsupported version {}",
                index.version
            )));
        }
        let mut interrupted = false;
        for job in index.jobs.values_mut() {
            if matches!(job.status, JobStatus::Queued | JobStatus::Running) {
                job.status = JobStatus::Failed;
                job.error = Some("interrupted by a restart".into());
                interrupted = true;
            }
        }
        let store = Store {
            root,
            index: Mutex::new(index),
        };
        if interrupted {
            store.save(&store.index.lock().unwrap())?;
        }
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn save(&self, index: &Index) -> Result<(), StoreError> {
        let text = to_canonical_json(index).map_err(|e| StoreError::CorruptIndex(e.to_string()))?;
        write_atomic(&self.root, &self.root.join("index.json"), text.as_bytes())
    }

    fn update<T>(&self, f: impl FnOnce(&mut Index) -> T) -> Result<T, StoreError> {
        let mut index = self.index.lock().unwrap();
        let out = f(&mut index);
        self.save(&index)?;
        Ok(out)
    }

    fn blob_path(&self, hash: &str) -> PathBuf {
        self.root.join("blobs").join(hash)
    }

    pub fn put_blob(&self, bytes: &[u8]) -> Result<String, StoreError> {
        let hash = content_hash(bytes);
        let path = self.blob_path(&hash);
        if !path.exists() {
            write_atomic(&self.root.join("blobs"), &path, bytes)?;
        }
        Ok(hash)
    }

    pub fn get_blob(&self, hash: &str) -> Result<Vec<u8>, StoreError> {
        if !is_hash(hash) {
            return Err(StoreError::MissingBlob(hash.to_string()));
        }
        let path = self.blob_path(hash);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::MissingBlob(hash.to_string()))
            }
            Err(e) => return Err(io_err(&path)(e)),
        };
        if content_hash(&bytes) != hash {
            return Err(StoreError::Tampered(hash.to_string()));
        }
        Ok(bytes)
    }

    fn get_text(&self, hash: &str) -> Result<String, StoreError> {
        String::from_utf8(self.get_blob(hash)?).map_err(|_| StoreError::Tampered(hash.to_string()))
    }

    /// Stores a model with its execution graph. The app id is the hash of
    /// the model's canonical JSON.
    pub fn add_app(
        &self,
        model: &AppModel,
        graph: &ExecutionGraph,
    ) -> Result<AppEntry, StoreError> {
        let doc = to_canonical_json(model.doc()).map_err(|e| StoreError::Report(e.to_string()))?;
        let app_id = self.put_blob(doc.as_bytes())?;
        let graph_ref = self.put_blob(graph.to_cache_json().as_bytes())?;
        let entry = AppEntry {
            app_id: app_id.clone(),
            app_name: model.app_name().to_string(),
            graph_ref,
            vertices: graph.vertices.len(),
            edges: graph.edges.len(),
        };
        self.update(|ix| {
            ix.apps.insert(app_id, entry.clone());
        })?;
        Ok(entry)
    }

    pub fn apps(&self) -> Vec<AppEntry> {
        self.index.lock().unwrap().apps.values().cloned().collect()
    }

    pub fn app_entry(&self, app_id: &str) -> Option<AppEntry> {
        self.index.lock().unwrap().apps.get(app_id).cloned()
    }

    /// The stored model, re-validated.
    pub fn app_model(&self, app_id: &str) -> Result<Option<AppModel>, StoreError> {
        if self.app_entry(app_id).is_none() {
            return Ok(None);
        }
        Ok(Some(AppModel::from_json(&self.get_text(app_id)?)?))
    }

    pub fn app_graph(&self, app_id: &str) -> Result<Option<ExecutionGraph>, StoreError> {
        let Some(entry) = self.app_entry(app_id) else {
            return Ok(None);
        };
        Ok(Some(ExecutionGraph::from_cache_json(
            &self.get_text(&entry.graph_ref)?,
        )?))
    }

    /// Stores the machine report and its wireframes; returns the report id
    /// (the hash of the machine report).
    pub fn put_report(&self, report: &QualityReport) -> Result<String, StoreError> {
        let id = self.put_blob(render_json(report).as_bytes())?;
        let mut refs = Vec::new();
        for r in report.wireframe_refs() {
            if let Some(svg) = report.wireframes.get(r) {
                refs.push((r.to_string(), self.put_blob(svg.as_bytes())?));
            }
        }
        self.update(|ix| {
            ix.reports.insert(id.clone());
            ix.wireframes.extend(refs);
        })?;
        Ok(id)
    }

    pub fn report_json(&self, id: &str) -> Result<Option<String>, StoreError> {
        if !self.index.lock().unwrap().reports.contains(id) {
            return Ok(None);
        }
        self.get_text(id).map(Some)
    }

    /// The stored report with its wireframes attached.
    pub fn report(&self, id: &str) -> Result<Option<QualityReport>, StoreError> {
        let Some(json) = self.report_json(id)? else {
            return Ok(None);
        };
        let mut report: QualityReport =
            serde_json::from_str(&json).map_err(|e| StoreError::Report(e.to_string()))?;
        let refs: Vec<String> = report
            .wireframe_refs()
            .into_iter()
            .map(str::to_string)
            .collect();
        for r in refs {
            if let Some(svg) = self.wireframe(&r)? {
                report.wireframes.insert(r, svg);
            }
        }
        Ok(Some(report))
    }

    pub fn wireframe(&self, wireframe_ref: &str) -> Result<Option<String>, StoreError> {
        let hash = self
            .index
            .lock()
            .unwrap()
            .wireframes
            .get(wireframe_ref)
            .cloned();
        hash.map(|h| self.get_text(&h)).transpose()
    }

    pub fn create_job(
        &self,
        report: &str,
        labels: Option<&str>,
        app_id: &str,
        config: Overrides,
    ) -> Result<JobRecord, StoreError> {
        let report_ref = self.put_blob(report.as_bytes())?;
        let labels_ref = labels.map(|l| self.put_blob(l.as_bytes())).transpose()?;
        self.update(|ix| {
            ix.next_job += 1;
            let job = JobRecord {
                job_id: format!("job-{:06}", ix.next_job),
                status: JobStatus::Queued,
                report_ref,
                labels_ref,
                app_id: app_id.to_string(),
                config,
                result_ref: None,
                error: None,
            };
            ix.jobs.insert(job.job_id.clone(), job.clone());
            job
        })
    }

    pub fn job(&self, id: &str) -> Option<JobRecord> {
        self.index.lock().unwrap().jobs.get(id).cloned()
    }

    pub fn job_inputs(&self, job: &JobRecord) -> Result<(String, Option<String>), StoreError> {
        let report = self.get_text(&job.report_ref)?;
        let labels = job
            .labels_ref
            .as_deref()
            .map(|r| self.get_text(r))
            .transpose()?;
        Ok((report, labels))
    }

    pub fn set_job_status(
        &self,
        id: &str,
        status: JobStatus,
        result_ref: Option<String>,
        error: Option<String>,
    ) -> Result<(), StoreError> {
        self.update(|ix| {
            if let Some(job) = ix.jobs.get_mut(id) {
                job.status = status;
                job.result_ref = result_ref;
                job.error = error;
            }
        })
    }
}
