//! Review verdicts and their append-only log.

use chrono::{DateTime, Utc};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

/// Snapshot after this many appended records.
pub const SNAPSHOT_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ReviewStatus {
    Open,
    Accepted,
    Rejected,
    /// Free-text state such as "under review".
    Custom(String),
}

impl ReviewStatus {
    /// "open", "accepted" and "rejected" (any case) are the fixed states;
    /// any other non-empty label is custom.
    pub fn parse(label: &str) -> Option<ReviewStatus> {
        let trimmed = label.trim();
        if trimmed.is_empty() {
            return None;
        }
        Some(match trimmed.to_ascii_lowercase().as_str() {
            "open" => ReviewStatus::Open,
            "accepted" => ReviewStatus::Accepted,
            "rejected" => ReviewStatus::Rejected,
            _ => ReviewStatus::Custom(label.to_string()),
        })
    }
}

impl Serialize for ReviewStatus {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ReviewStatus::Open => s.serialize_str("open"),
            ReviewStatus::Accepted => s.serialize_str("accepted"),
            ReviewStatus::Rejected => s.serialize_str("rejected"),
            ReviewStatus::Custom(label) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("custom", label)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for ReviewStatus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Label(String),
            Custom { custom: String },
        }
        match Raw::deserialize(d)? {
            Raw::Label(l) => {
                ReviewStatus::parse(&l).ok_or_else(|| de::Error::custom("empty status"))
            }
            Raw::Custom { custom } if !custom.trim().is_empty() => Ok(ReviewStatus::Custom(custom)),
            Raw::Custom { .. } => Err(de::Error::custom("empty custom status")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub finding_id: String,
    pub status: ReviewStatus,
    #[serde(default)]
    pub comment: Option<String>,
    pub updated_at: DateTime<Utc>,
    #[serde(default)]
    pub reviewer: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    /// Log length covered by `records`.
    log_offset: u64,
    records: Vec<ReviewRecord>,
}

/// Append-only JSON-lines log with a periodic snapshot. The latest record
/// per finding wins; older ones stay in the log as history.
#[derive(Debug)]
pub struct ReviewLog {
    log_path: PathBuf,
    snapshot_path: PathBuf,
    file: File,
    current: BTreeMap<String, ReviewRecord>,
    since_snapshot: usize,
}

impl ReviewLog {
    /// Opens `<dir>/reviews.jsonl`, creating it when missing. A torn last
    /// line (crash mid-append) is ignored.
    pub fn open(dir: &Path) -> io::Result<ReviewLog> {
        let log_path = dir.join("reviews.jsonl");
        let snapshot_path = dir.join("reviews.snapshot.json");
        let mut current = BTreeMap::new();
        let mut offset = 0;
        if let Ok(text) = std::fs::read_to_string(&snapshot_path) {
            match serde_json::from_str::<Snapshot>(&text) {
                Ok(s) => {
                    offset = s.log_offset;
                    current.extend(s.records.into_iter().map(|r| (r.finding_id.clone(), r)));
                }
                Err(e) => log::warn!(
                    "ignoring unreadable snapshot {}: {e}",
                    snapshot_path.display()
                ),
            }
        }
        let mut file = OpenOptions::new()
            .create(true)
            .read(true)
            .append(true)
            .open(&log_path)?;
        let len = file.metadata()?.len();
        if offset > len {
            log::warn!(
                "snapshot of {} is ahead of the log; replaying from start",
                log_path.display()
            );
            offset = 0;
            current.clear();
        }
        file.seek(SeekFrom::Start(offset))?;
        let mut reader = BufReader::new(&file);
        let mut line = String::new();
        let mut since_snapshot = 0;
        loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                break;
            }
            if !line.ends_with('\n') {
                log::warn!("ignoring torn record at end of {}", log_path.display());
                break;
            }
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<ReviewRecord>(&line) {
                Ok(r) => {
                    current.insert(r.finding_id.clone(), r);
                    since_snapshot += 1;
                }
                Err(e) => log::warn!("skipping bad review record in {}: {e}", log_path.display()),
            }
        }
        Ok(ReviewLog {
            log_path,
            snapshot_path,
            file,
            current,
            since_snapshot,
        })
    }

    pub fn get(&self, finding_id: &str) -> Option<&ReviewRecord> {
        self.current.get(finding_id)
    }

    pub fn records(&self) -> impl Iterator<Item = &ReviewRecord> {
        self.current.values()
    }

    pub fn status(&self, finding_id: &str) -> ReviewStatus {
        self.get(finding_id)
            .map_or(ReviewStatus::Open, |r| r.status.clone())
    }

    pub fn is_rejected(&self, finding_id: &str) -> bool {
        matches!(self.get(finding_id), Some(r) if r.status == ReviewStatus::Rejected)
    }

    /// Appends one record as a single write and syncs it to disk.
    pub fn append(&mut self, record: ReviewRecord) -> io::Result<()> {
        let mut line = serde_json::to_vec(&record).map_err(io::Error::other)?;
        line.push(b'\n');
        self.file.write_all(&line)?;
        self.file.sync_data()?;
        self.current.insert(record.finding_id.clone(), record);
        self.since_snapshot += 1;
        if self.since_snapshot >= SNAPSHOT_EVERY {
            self.snapshot()?;
        }
        Ok(())
    }

    /// Writes the current state to a temp file and renames it over the snapshot.
    pub fn snapshot(&mut self) -> io::Result<()> {
        let snap = Snapshot {
            log_offset: self.file.metadata()?.len(),
            records: self.current.values().cloned().collect(),
        };
        let tmp = self.snapshot_path.with_extension("json.tmp");
        {
            let mut f = File::create(&tmp)?;
            f.write_all(&serde_json::to_vec(&snap).map_err(io::Error::other)?)?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, &self.snapshot_path)?;
        self.since_snapshot = 0;
        Ok(())
    }

    pub fn log_path(&self) -> &Path {
        &self.log_path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, status: ReviewStatus) -> ReviewRecord {
        ReviewRecord {
            finding_id: id.into(),
            status,
            comment: None,
            updated_at: Utc::now(),
            reviewer: None,
        }
    }

    #[test]
    fn status_json_shapes() {
        assert_eq!(
            serde_json::to_string(&ReviewStatus::Rejected).unwrap(),
            "\"rejected\""
        );
        let custom = ReviewStatus::Custom("under review".into());
        let json = serde_json::to_string(&custom).unwrap();
        assert_eq!(json, r#"{"custom":"under review"}"#);
        assert_eq!(serde_json::from_str::<ReviewStatus>(&json).unwrap(), custom);
        assert_eq!(
            serde_json::from_str::<ReviewStatus>("\"under review\"").unwrap(),
            custom
        );
        assert_eq!(
            serde_json::from_str::<ReviewStatus>("\"Accepted\"").unwrap(),
            ReviewStatus::Accepted
        );
        assert!(serde_json::from_str::<ReviewStatus>("\"\"").is_err());
        assert!(serde_json::from_str::<ReviewStatus>("42").is_err());
        assert!(serde_json::from_str::<ReviewStatus>(r#"{"other":"x"}"#).is_err());
    }

    #[test]
    fn latest_write_wins_and_history_is_kept() {
        let dir = tempfile::tempdir().unwrap();
        let mut log = ReviewLog::open(dir.path()).unwrap();
        log.append(record("f1", ReviewStatus::Accepted)).unwrap();
        log.append(record("f1", ReviewStatus::Rejected)).unwrap();
        assert!(log.is_rejected("f1"));
        drop(log);
        let log = ReviewLog::open(dir.path()).unwrap();
        assert_eq!(log.status("f1"), ReviewStatus::Rejected);
        assert_eq!(log.status("f2"), ReviewStatus::Open);
        let text = std::fs::read_to_string(dir.path().join("reviews.jsonl")).unwrap();
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn torn_tail_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let mut log = ReviewLog::open(dir.path()).unwrap();
        log.append(record("f1", ReviewStatus::Accepted)).unwrap();
        drop(log);
        let mut f = OpenOptions::new()
            .append(true)
            .open(dir.path().join("reviews.jsonl"))
            .unwrap();
        f.write_all(br#"{"finding_id":"f1","status":"rejec"#)
            .unwrap();
        let log = ReviewLog::open(dir.path()).unwrap();
        assert_eq!(log.status("f1"), ReviewStatus::Accepted);
    }

    #[test]
    fn snapshot_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let mut log = ReviewLog::open(dir.path()).unwrap();
        for i in 0..SNAPSHOT_EVERY + 3 {
            log.append(record(&format!("f{i}"), ReviewStatus::Accepted))
                .unwrap();
        }
        assert!(dir.path().join("reviews.snapshot.json").exists());
        log.append(record("f0", ReviewStatus::Custom("under review".into())))
            .unwrap();
        drop(log);
        let log = ReviewLog::open(dir.path()).unwrap();
        assert_eq!(log.records().count(), SNAPSHOT_EVERY + 3);
        assert_eq!(
            log.status("f0"),
            ReviewStatus::Custom("under review".into())
        );
        let lines = std::fs::read_to_string(dir.path().join("reviews.jsonl"))
            .unwrap()
            .lines()
            .count();
        assert_eq!(lines, SNAPSHOT_EVERY + 4);
    }
}
