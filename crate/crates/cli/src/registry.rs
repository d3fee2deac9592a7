//! npm-style registry dump parsing, record caching and point-in-time
//! snapshot construction.
//!
//! The parser accepts newline-delimited JSON (one package document per line)
//! as well as the `{"rows": [{"doc": ...}, ...]}` wrapper emitted by bulk
//! document exports; either form may be gzip-compressed, detected by magic
//! bytes. Only runtime `dependencies` are extracted: dev, peer and optional
//! dependency maps do not propagate install-time failure and are ignored.
//! Edges are name-level; semver range strings are discarded entirely.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read, Write};

use chrono::{DateTime, NaiveDate};
use depnet_core::DependencyGraph;
use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid registry data: {0}")]
    Format(String),
}

/// One version of a package: version string, release time and the names of
/// its runtime dependencies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VersionEntry {
    pub version: String,
    /// Milliseconds since the Unix epoch, UTC.
    pub release_time_ms: i64,
    /// Sorted, deduplicated dependency package names.
    pub dependencies: Vec<String>,
}

/// A package and its version history, sorted by release time (ties by
/// version string, ascending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackageRecord {
    pub name: String,
    pub versions: Vec<VersionEntry>,
}

impl PackageRecord {
    /// Latest version released at or before the cutoff. With equal release
    /// times the lexicographically greatest version string wins, which the
    /// sort order delivers for free.
    pub fn latest_at(&self, cutoff_ms: i64) -> Option<&VersionEntry> {
        let qualifying = self
            .versions
            .partition_point(|v| v.release_time_ms <= cutoff_ms);
        qualifying.checked_sub(1).map(|i| &self.versions[i])
    }
}

/// Point-in-time selector; the cutoff is inclusive.
#[derive(Clone, Copy, Debug)]
pub struct SnapshotSpec {
    pub cutoff_ms: i64,
}

/// Everything non-fatal the parser skipped, with enough detail to audit.
#[derive(Clone, Debug, Default)]
pub struct IngestStats {
    pub lines: u64,
    pub records: u64,
    pub parse_errors: Vec<LineError>,
    pub docs_without_name: u64,
    pub versions_without_time: u64,
    pub versions_with_bad_time: u64,
    /// Repeated package documents; the last occurrence wins.
    pub duplicate_names: u64,
}

#[derive(Clone, Debug)]
pub struct LineError {
    pub line: u64,
    pub message: String,
}

/// Wraps the reader in a gzip decoder when the stream starts with the gzip
/// magic bytes.
pub fn maybe_gzip<'a, R: BufRead + 'a>(mut reader: R) -> std::io::Result<Box<dyn BufRead + 'a>> {
    let head = reader.fill_buf()?;
    if head.len() >= 2 && head[0] == 0x1f && head[1] == 0x8b {
        Ok(Box::new(BufReader::new(GzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

/// Parses a registry dump into package records sorted by name.
///
/// Malformed lines are collected rather than fatal; documents without a
/// `name` are skipped and counted; versions without a parseable release
/// time are dropped and counted.
pub fn parse_registry_dump(reader: impl Read) -> Result<(Vec<PackageRecord>, IngestStats), RegistryError> {
    let mut reader = maybe_gzip(BufReader::new(reader))?;
    let mut stats = IngestStats::default();
    let mut records: Vec<PackageRecord> = Vec::new();

    let mut first_line = String::new();
    reader.read_line(&mut first_line)?;

    let is_wrapper = |v: &Value| v.get("rows").is_some_and(Value::is_array);
    match serde_json::from_str::<Value>(first_line.trim()) {
        Ok(value) if is_wrapper(&value) => {
            // Single-line wrapper document.
            collect_rows(&value, &mut records, &mut stats);
        }
        Ok(value) => {
            stats.lines = 1;
            absorb_document(&value, &mut records, &mut stats);
            parse_ndjson_lines(reader, 2, &mut records, &mut stats)?;
        }
        Err(first_err) => {
            // Either a wrapper spread over several lines or a damaged first
            // line of NDJSON; buffering settles it.
            let mut rest = String::new();
            reader.read_to_string(&mut rest)?;
            let whole = format!("{first_line}{rest}");
            match serde_json::from_str::<Value>(&whole) {
                Ok(value) if is_wrapper(&value) => {
                    collect_rows(&value, &mut records, &mut stats);
                }
                _ => {
                    if !first_line.trim().is_empty() {
                        stats.parse_errors.push(LineError {
                            line: 1,
                            message: first_err.to_string(),
                        });
                    }
                    stats.lines = 1;
                    parse_ndjson_lines(
                        std::io::Cursor::new(rest),
                        2,
                        &mut records,
                        &mut stats,
                    )?;
                }
            }
        }
    }

    finalize_records(&mut records, &mut stats);
    Ok((records, stats))
}

fn parse_ndjson_lines(
    reader: impl BufRead,
    first_line_number: u64,
    records: &mut Vec<PackageRecord>,
    stats: &mut IngestStats,
) -> Result<(), RegistryError> {
    for (offset, line) in reader.lines().enumerate() {
        let line_number = first_line_number + offset as u64;
        let line = line?;
        stats.lines = line_number;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        // Bulk exports sometimes leave the wrapper's row separators behind.
        let trimmed = trimmed.strip_suffix(',').unwrap_or(trimmed);
        match serde_json::from_str::<Value>(trimmed) {
            Ok(value) => absorb_document(&value, records, stats),
            Err(err) => stats.parse_errors.push(LineError {
                line: line_number,
                message: err.to_string(),
            }),
        }
    }
    Ok(())
}

fn collect_rows(value: &Value, records: &mut Vec<PackageRecord>, stats: &mut IngestStats) {
    let rows = value
        .get("rows")
        .and_then(Value::as_array)
        .expect("caller checked the rows array");
    for (i, row) in rows.iter().enumerate() {
        stats.lines = i as u64 + 1;
        absorb_document(row, records, stats);
    }
}

/// Extracts one package record from a document, unwrapping a `doc` envelope
/// when the outer object is a bulk-export row rather than the package
/// document itself.
fn absorb_document(value: &Value, records: &mut Vec<PackageRecord>, stats: &mut IngestStats) {
    let doc = match (value.get("name"), value.get("doc")) {
        (None, Some(inner)) if inner.is_object() => inner,
        _ => value,
    };
    let Some(name) = doc.get("name").and_then(Value::as_str) else {
        stats.docs_without_name += 1;
        return;
    };
    let empty = serde_json::Map::new();
    let times = doc
        .get("time")
        .and_then(Value::as_object)
        .unwrap_or(&empty);
    let versions = doc
        .get("versions")
        .and_then(Value::as_object)
        .unwrap_or(&empty);

    let mut entries: Vec<VersionEntry> = Vec::with_capacity(versions.len());
    for (version, vdoc) in versions {
        // `time` also carries non-version keys like "created"; only keys
        // that name a version matter here.
        let Some(stamp) = times.get(version).and_then(Value::as_str) else {
            stats.versions_without_time += 1;
            continue;
        };
        let Some(release_time_ms) = parse_timestamp(stamp) else {
            stats.versions_with_bad_time += 1;
            continue;
        };
        let dependencies: Vec<String> = match vdoc.get("dependencies").and_then(Value::as_object) {
            Some(deps) => {
                let set: BTreeSet<&str> = deps.keys().map(String::as_str).collect();
                set.into_iter().map(str::to_owned).collect()
            }
            None => Vec::new(),
        };
        entries.push(VersionEntry {
            version: version.clone(),
            release_time_ms,
            dependencies,
        });
    }
    entries.sort_by(|a, b| {
        a.release_time_ms
            .cmp(&b.release_time_ms)
            .then_with(|| a.version.cmp(&b.version))
    });
    records.push(PackageRecord {
        name: name.to_owned(),
        versions: entries,
    });
    stats.records += 1;
}

/// Name-sorts the records and drops all but the last occurrence of a name.
fn finalize_records(records: &mut Vec<PackageRecord>, stats: &mut IngestStats) {
    // Stable sort keeps occurrence order within a name; the later document
    // replaces the earlier one.
    records.sort_by(|a, b| a.name.cmp(&b.name));
    let mut deduped: Vec<PackageRecord> = Vec::with_capacity(records.len());
    for record in records.drain(..) {
        match deduped.last_mut() {
            Some(last) if last.name == record.name => {
                stats.duplicate_names += 1;
                *last = record;
            }
            _ => deduped.push(record),
        }
    }
    stats.records = deduped.len() as u64;
    *records = deduped;
}

/// RFC 3339 / ISO-8601 timestamp to epoch milliseconds.
pub fn parse_timestamp(s: &str) -> Option<i64> {
    DateTime::parse_from_rfc3339(s)
        .ok()
        .map(|t| t.timestamp_millis())
}

/// Parses a snapshot cutoff: either a full RFC 3339 timestamp or a bare
/// `YYYY-MM-DD` date, which is taken inclusively as the end of that day
/// (23:59:59.999 UTC).
pub fn parse_cutoff(s: &str) -> Result<i64, RegistryError> {
    if let Some(ms) = parse_timestamp(s) {
        return Ok(ms);
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_milli_opt(23, 59, 59, 999))
        .map(|dt| dt.and_utc().timestamp_millis())
        .ok_or_else(|| {
            RegistryError::Format(format!(
                "cannot parse cutoff {s:?}; expected RFC 3339 or YYYY-MM-DD"
            ))
        })
}

/// UTC year of an epoch-millisecond timestamp.
pub fn year_of(ms: i64) -> i32 {
    use chrono::Datelike;
    DateTime::from_timestamp_millis(ms)
        .map(|t| t.year())
        .unwrap_or(0)
}

/// Node and edge material for one snapshot.
#[derive(Clone, Debug)]
pub struct SnapshotEdges {
    /// Sorted package names present in the snapshot; positions are node ids.
    pub labels: Vec<String>,
    /// Name-level dependency edges resolved against `labels`.
    pub edges: Vec<(u32, u32)>,
    /// Dependency names that point outside the snapshot, dropped.
    pub dropped_unresolved: u64,
}

impl SnapshotEdges {
    pub fn into_graph(self) -> depnet_core::Result<DependencyGraph> {
        DependencyGraph::from_index_edges_with_labels(self.labels, self.edges)
    }
}

/// Selects, per package, the latest version at or before the cutoff and
/// emits one edge per dependency that resolves to another snapshot member.
/// Packages without a qualifying version are absent from the snapshot.
pub fn snapshot_edges(records: &[PackageRecord], spec: SnapshotSpec) -> SnapshotEdges {
    let mut present: Vec<(&PackageRecord, &VersionEntry)> = records
        .iter()
        .filter_map(|r| r.latest_at(spec.cutoff_ms).map(|v| (r, v)))
        .collect();
    present.sort_by(|a, b| a.0.name.cmp(&b.0.name));
    let labels: Vec<String> = present.iter().map(|(r, _)| r.name.clone()).collect();
    let mut edges = Vec::new();
    let mut dropped = 0u64;
    for (source, (_, version)) in present.iter().enumerate() {
        for dep in &version.dependencies {
            match labels.binary_search(dep) {
                Ok(target) => edges.push((source as u32, target as u32)),
                Err(_) => dropped += 1,
            }
        }
    }
    // One edge per distinct name pair, even if a caller hands records with
    // repeated dependency entries.
    edges.sort_unstable();
    edges.dedup();
    SnapshotEdges {
        labels,
        edges,
        dropped_unresolved: dropped,
    }
}

/// The current-state network: every package at its newest version.
pub fn latest_edges(records: &[PackageRecord]) -> SnapshotEdges {
    snapshot_edges(records, SnapshotSpec { cutoff_ms: i64::MAX })
}

#[derive(Serialize, Deserialize)]
struct VersionWire(String, i64, Vec<String>);

#[derive(Serialize, Deserialize)]
struct RecordWire {
    name: String,
    versions: Vec<VersionWire>,
}

/// Writes records as the line-JSON cache format so multi-gigabyte raw dumps
/// only need parsing once.
pub fn write_cache(mut w: impl Write, records: &[PackageRecord]) -> std::io::Result<()> {
    for record in records {
        let wire = RecordWire {
            name: record.name.clone(),
            versions: record
                .versions
                .iter()
                .map(|v| {
                    VersionWire(v.version.clone(), v.release_time_ms, v.dependencies.clone())
                })
                .collect(),
        };
        serde_json::to_writer(&mut w, &wire)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads the cache format back; errors are fatal since the cache is ours.
pub fn read_cache(reader: impl Read) -> Result<Vec<PackageRecord>, RegistryError> {
    let reader = maybe_gzip(BufReader::new(reader))?;
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let wire: RecordWire = serde_json::from_str(&line)
            .map_err(|e| RegistryError::Format(format!("cache line {}: {e}", i + 1)))?;
        records.push(PackageRecord {
            name: wire.name,
            versions: wire
                .versions
                .into_iter()
                .map(|VersionWire(version, release_time_ms, dependencies)| VersionEntry {
                    version,
                    release_time_ms,
                    dependencies,
                })
                .collect(),
        });
    }
    records.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(s: &str) -> i64 {
        parse_timestamp(s).unwrap()
    }

    /// Three packages: Q and R exist since 2012 with no dependencies; P has
    /// v1 (2013, depends on Q) and v2 (2015, depends on Q and R).
    pub(crate) fn pqr() -> Vec<PackageRecord> {
        let no_deps = |name: &str, stamp: &str| PackageRecord {
            name: name.into(),
            versions: vec![VersionEntry {
                version: "1.0.0".into(),
                release_time_ms: ms(stamp),
                dependencies: vec![],
            }],
        };
        vec![
            PackageRecord {
                name: "P".into(),
                versions: vec![
                    VersionEntry {
                        version: "1.0.0".into(),
                        release_time_ms: ms("2013-05-01T00:00:00Z"),
                        dependencies: vec!["Q".into()],
                    },
                    VersionEntry {
                        version: "2.0.0".into(),
                        release_time_ms: ms("2015-03-01T00:00:00Z"),
                        dependencies: vec!["Q".into(), "R".into()],
                    },
                ],
            },
            no_deps("Q", "2012-01-01T00:00:00Z"),
            no_deps("R", "2012-01-01T00:00:00Z"),
        ]
    }

    #[test]
    fn single_line_document() {
        let line = r#"{"name":"a","versions":{"1.0.0":{"dependencies":{"b":"^1.0.0"}}},"time":{"1.0.0":"2014-01-01T00:00:00Z"}}"#;
        let (records, stats) = parse_registry_dump(line.as_bytes()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].name, "a");
        assert_eq!(records[0].versions.len(), 1);
        assert_eq!(records[0].versions[0].dependencies, vec!["b"]);
        assert!(stats.parse_errors.is_empty());
    }

    #[test]
    fn version_without_time_is_dropped() {
        let line = r#"{"name":"a","versions":{"1.0.0":{}},"time":{}}"#;
        let (records, stats) = parse_registry_dump(line.as_bytes()).unwrap();
        assert_eq!(records[0].versions.len(), 0);
        assert_eq!(stats.versions_without_time, 1);
    }

    #[test]
    fn two_packages_without_dependencies() {
        let dump = concat!(
            r#"{"name":"a","versions":{"1.0.0":{}},"time":{"1.0.0":"2014-01-01T00:00:00Z"}}"#,
            "\n",
            r#"{"name":"b","versions":{"1.0.0":{}},"time":{"1.0.0":"2014-01-02T00:00:00Z"}}"#,
        );
        let (records, _) = parse_registry_dump(dump.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| r.versions[0].dependencies.is_empty()));
    }

    #[test]
    fn malformed_lines_are_collected_not_fatal() {
        let dump = concat!(
            r#"{"name":"a","versions":{"1.0.0":{}},"time":{"1.0.0":"2014-01-01T00:00:00Z"}}"#,
            "\n",
            "{this is not json}\n",
            r#"{"name":"b","versions":{},"time":{}}"#,
        );
        let (records, stats) = parse_registry_dump(dump.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(stats.parse_errors.len(), 1);
        assert_eq!(stats.parse_errors[0].line, 2);
    }

    #[test]
    fn document_without_name_is_counted() {
        let dump = r#"{"versions":{},"time":{}}"#;
        let (records, stats) = parse_registry_dump(dump.as_bytes()).unwrap();
        assert!(records.is_empty());
        assert_eq!(stats.docs_without_name, 1);
    }

    #[test]
    fn bad_timestamp_drops_version() {
        let dump = r#"{"name":"a","versions":{"1.0.0":{},"2.0.0":{}},"time":{"1.0.0":"not a date","2.0.0":"2014-01-01T00:00:00Z"}}"#;
        let (records, stats) = parse_registry_dump(dump.as_bytes()).unwrap();
        assert_eq!(stats.versions_with_bad_time, 1);
        assert_eq!(records[0].versions.len(), 1);
        assert_eq!(records[0].versions[0].version, "2.0.0");
    }

    #[test]
    fn rows_wrapper_single_and_multi_line() {
        let doc = r#"{"name":"a","versions":{"1.0.0":{}},"time":{"1.0.0":"2014-01-01T00:00:00Z"}}"#;
        let single = format!(r#"{{"total_rows":1,"rows":[{{"id":"a","doc":{doc}}}]}}"#);
        let (records, _) = parse_registry_dump(single.as_bytes()).unwrap();
        assert_eq!(records.len(), 1);

        let multi = format!(
            "{{\"total_rows\":1,\n\"rows\":[\n{{\"id\":\"a\",\"doc\":{doc}}}\n]}}\n"
        );
        let (records, _) = parse_registry_dump(multi.as_bytes()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].name, "a");
    }

    #[test]
    fn gzip_input_is_detected() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        let doc = r#"{"name":"a","versions":{"1.0.0":{}},"time":{"1.0.0":"2014-01-01T00:00:00Z"}}"#;
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(doc.as_bytes()).unwrap();
        let compressed = enc.finish().unwrap();
        let (records, _) = parse_registry_dump(&compressed[..]).unwrap();
        assert_eq!(records.len(), 1);
    }

    #[test]
    fn duplicate_documents_last_wins() {
        let dump = concat!(
            r#"{"name":"a","versions":{"1.0.0":{}},"time":{"1.0.0":"2014-01-01T00:00:00Z"}}"#,
            "\n",
            r#"{"name":"a","versions":{"2.0.0":{}},"time":{"2.0.0":"2015-01-01T00:00:00Z"}}"#,
        );
        let (records, stats) = parse_registry_dump(dump.as_bytes()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(stats.duplicate_names, 1);
        assert_eq!(records[0].versions[0].version, "2.0.0");
    }

    #[test]
    fn version_ordering_breaks_time_ties_lexicographically() {
        let dump = r#"{"name":"a","versions":{"1.0.0":{},"1.0.1":{},"0.9.0":{}},"time":{"1.0.0":"2014-01-01T00:00:00Z","1.0.1":"2014-01-01T00:00:00Z","0.9.0":"2013-01-01T00:00:00Z"}}"#;
        let (records, _) = parse_registry_dump(dump.as_bytes()).unwrap();
        let latest = records[0].latest_at(i64::MAX).unwrap();
        assert_eq!(latest.version, "1.0.1");
    }

    #[test]
    fn snapshot_follows_last_existing_version_rule() {
        let records = pqr();
        let cutoff = parse_cutoff("2014-12-31").unwrap();
        let snap = snapshot_edges(&records, SnapshotSpec { cutoff_ms: cutoff });
        assert_eq!(snap.labels, vec!["P", "Q", "R"]);
        // P's latest 2014 version is v1, which depends only on Q.
        assert_eq!(snap.edges, vec![(0, 1)]);
        assert_eq!(snap.dropped_unresolved, 0);
    }

    #[test]
    fn snapshot_before_all_releases_is_empty() {
        let records = pqr();
        let cutoff = parse_cutoff("2010-01-01").unwrap();
        let snap = snapshot_edges(&records, SnapshotSpec { cutoff_ms: cutoff });
        assert!(snap.labels.is_empty());
        assert!(snap.edges.is_empty());
    }

    #[test]
    fn unresolved_dependency_is_dropped_and_counted() {
        let mut records = pqr();
        records[0].versions[0].dependencies = vec!["X".into()];
        let cutoff = parse_cutoff("2014-12-31").unwrap();
        let snap = snapshot_edges(&records, SnapshotSpec { cutoff_ms: cutoff });
        assert!(snap.edges.is_empty());
        assert_eq!(snap.dropped_unresolved, 1);
    }

    #[test]
    fn latest_takes_newest_versions() {
        let snap = latest_edges(&pqr());
        assert_eq!(snap.edges, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn cache_round_trips_exactly() {
        let records = pqr();
        let mut buf = Vec::new();
        write_cache(&mut buf, &records).unwrap();
        let back = read_cache(&buf[..]).unwrap();
        assert_eq!(records, back);
    }

    #[test]
    fn cutoff_parsing() {
        assert_eq!(
            parse_cutoff("2014-12-31").unwrap(),
            parse_timestamp("2014-12-31T23:59:59.999Z").unwrap()
        );
        assert_eq!(
            parse_cutoff("2014-12-31T12:00:00Z").unwrap(),
            parse_timestamp("2014-12-31T12:00:00Z").unwrap()
        );
        assert!(parse_cutoff("yesterday").is_err());
        assert_eq!(year_of(parse_cutoff("2014-12-31").unwrap()), 2014);
    }
}
