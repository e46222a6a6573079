//! Append-only CSV store of clique-number results.
//!
//! Layout: a version line `# paley-results v1`, the CSV header, then one row
//! per recorded run. The witness clique is stored as a JSON array in a quoted
//! field. Writers hold an exclusive lock on the file while they check for an
//! existing exact row and append.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const VERSION_LINE: &str = "# paley-results v1";
pub const DEFAULT_PATH: &str = "paley-results.csv";
pub const ENV_VAR: &str = "PALEY_STORE";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreRow {
    pub q: u64,
    pub p: u64,
    pub r: u32,
    pub omega: u64,
    pub exact: bool,
    pub method: String,
    /// JSON array of vertex labels.
    pub witness: String,
    pub timestamp: String,
    pub version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store i/o: {0}")]
    Io(#[from] io::Error),
    #[error("store format: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: expected version line {VERSION_LINE:?}")]
    Version { path: String },
}

pub struct ResultsStore {
    path: PathBuf,
}

#[derive(Debug, PartialEq, Eq)]
pub enum RecordOutcome {
    Appended,
    /// An exact row for this q already exists.
    KeptExisting,
}

impl ResultsStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        ResultsStore { path: path.into() }
    }

    /// `explicit`, else `$PALEY_STORE`, else `paley-results.csv`.
    pub fn locate(explicit: Option<&Path>) -> Self {
        let path = explicit
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(ENV_VAR).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_PATH));
        Self::new(path)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn load(&self) -> Result<Vec<StoreRow>, StoreError> {
        match File::open(&self.path) {
            Ok(mut f) => {
                f.lock_shared()?;
                let rows = self.parse(&mut f);
                f.unlock()?;
                rows
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e.into()),
        }
    }

    fn parse(&self, f: &mut File) -> Result<Vec<StoreRow>, StoreError> {
        f.seek(SeekFrom::Start(0))?;
        let mut reader = BufReader::new(f);
        let mut first = String::new();
        if reader.read_line(&mut first)? == 0 {
            return Ok(Vec::new());
        }
        if first.trim_end() != VERSION_LINE {
            return Err(StoreError::Version {
                path: self.path.display().to_string(),
            });
        }
        let mut rest = String::new();
        reader.read_to_string(&mut rest)?;
        let mut csv = csv::Reader::from_reader(rest.as_bytes());
        Ok(csv.deserialize().collect::<Result<Vec<StoreRow>, _>>()?)
    }

    /// Best known row for `q`: an exact row if any, else the largest omega.
    pub fn best(&self, q: u64) -> Result<Option<StoreRow>, StoreError> {
        Ok(self
            .load()?
            .into_iter()
            .filter(|r| r.q == q)
            .max_by_key(|r| (r.exact, r.omega)))
    }

    pub fn exact(&self, q: u64) -> Result<Option<StoreRow>, StoreError> {
        Ok(self.best(q)?.filter(|r| r.exact))
    }

    /// Appends `row` unless an exact row for the same q is already present.
    pub fn record(&self, row: &StoreRow) -> Result<RecordOutcome, StoreError> {
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&self.path)?;
        f.lock()?;
        let outcome = self.record_locked(&mut f, row);
        f.unlock()?;
        outcome
    }

    fn record_locked(&self, f: &mut File, row: &StoreRow) -> Result<RecordOutcome, StoreError> {
        let existing = self.parse(f)?;
        if existing.iter().any(|r| r.q == row.q && r.exact) {
            return Ok(RecordOutcome::KeptExisting);
        }
        let mut out = Vec::new();
        {
            let mut w = csv::WriterBuilder::new()
                .has_headers(f.metadata()?.len() == 0)
                .from_writer(&mut out);
            w.serialize(row)?;
            w.flush()?;
        }
        if f.metadata()?.len() == 0 {
            f.write_all(format!("{VERSION_LINE}\n").as_bytes())?;
        }
        f.write_all(&out)?;
        f.sync_data()?;
        Ok(RecordOutcome::Appended)
    }
}
