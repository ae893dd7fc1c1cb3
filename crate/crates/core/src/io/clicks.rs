//! Click files.
//!
//! ```text
//! {"format":"pqf-clicks","m":4,"n":2,"version":1}
//! @unitary 3f1c...e9
//! 0101
//! 1001
//! 1000 counts:2,0,0,0
//! ```
//!
//! The first line is a JSON header. Each `@unitary <sha256>` line opens the
//! records of one interferometer, stored as `unitaries/<sha256>.json` next to
//! the click file or inline in the header. A record is one character per
//! detector. Records with multiply occupied modes carry the full occupation
//! vector after `counts:`. Blank lines and lines starting with `#` are skipped.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use super::unitary_file::{unitary_hash, write_unitary, UnitaryFile};
use crate::engine::ExperimentPlan;
use crate::error::{Error, Result};
use crate::linalg::{FockPattern, Unitary};
use crate::samplers::ClickRecord;

pub const CLICK_FORMAT: &str = "pqf-clicks";
pub const UNITARY_DIR: &str = "unitaries";
const VERSION: u32 = 1;
const SECTION: &str = "@unitary";
const COUNTS: &str = "counts:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickHeader {
    pub format: String,
    pub version: u32,
    pub m: usize,
    pub n: usize,
    /// Free-form description of the source.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub device: serde_json::Value,
    /// The plan that produced simulated data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<ExperimentPlan>,
    /// Unitaries carried in the file, by hash.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inline: BTreeMap<String, UnitaryFile>,
}

impl ClickHeader {
    pub fn new(m: usize, n: usize) -> Self {
        Self {
            format: CLICK_FORMAT.into(),
            version: VERSION,
            m,
            n,
            device: serde_json::Value::Null,
            plan: None,
            inline: BTreeMap::new(),
        }
    }
}

/// Records of one interferometer.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickBatch {
    pub reference: String,
    pub unitary: Unitary,
    pub records: Vec<ClickRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClickData {
    pub header: ClickHeader,
    pub batches: Vec<ClickBatch>,
}

impl ClickData {
    pub fn groups(&self) -> impl Iterator<Item = &[ClickRecord]> {
        self.batches.iter().map(|b| b.records.as_slice())
    }

    pub fn record_count(&self) -> usize {
        self.batches.iter().map(|b| b.records.len()).sum()
    }
}

/// One record line for `pattern`.
pub fn format_record(pattern: &FockPattern) -> String {
    let occ = pattern.occupations();
    let mut line: String = occ.iter().map(|&s| if s > 0 { '1' } else { '0' }).collect();
    if !pattern.is_collision_free() {
        line.push(' ');
        line.push_str(COUNTS);
        line.push_str(&occ.iter().map(u16::to_string).collect::<Vec<_>>().join(","));
    }
    line
}

/// Parse one record line of a file with `m` modes and `n` injected photons.
pub fn parse_record(line: &str, m: usize, n: usize, lineno: usize) -> Result<FockPattern> {
    let parse_err = |message: String| Error::Parse { line: lineno, message };
    let (bits, counts) = match line.split_once(' ') {
        Some((bits, rest)) => {
            let rest = rest.trim();
            let list = rest
                .strip_prefix(COUNTS)
                .ok_or_else(|| parse_err(format!("unexpected field {rest:?}")))?;
            (bits, Some(list))
        }
        None => (line, None),
    };
    if bits.len() != m {
        return Err(parse_err(format!("record has {} detectors, expected {m}", bits.len())));
    }
    let clicks: Vec<u16> = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(parse_err(format!("unexpected character {other:?}"))),
        })
        .collect::<Result<_>>()?;
    let occ = match counts {
        None => clicks,
        Some(list) => {
            let occ: Vec<u16> = list
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<u16>()
                        .map_err(|e| parse_err(format!("bad count {v:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            if occ.len() != m {
                return Err(parse_err(format!(
                    "counts list has {} entries, expected {m}",
                    occ.len()
                )));
            }
            if occ.iter().zip(&clicks).any(|(&s, &c)| (s > 0) != (c == 1)) {
                return Err(Error::CorruptRecord {
                    line: lineno,
                    message: "counts disagree with clicks".into(),
                });
            }
            occ
        }
    };
    let pattern = FockPattern::new(occ);
    if pattern.total() > n {
        return Err(Error::CorruptRecord {
            line: lineno,
            message: format!("{} photons detected but only {n} injected", pattern.total()),
        });
    }
    Ok(pattern)
}

/// Write click data to `out`. Unitaries must be stored separately or inline.
pub fn render_clicks(out: &mut impl Write, header: &ClickHeader, batches: &[(&Unitary, &[ClickRecord])]) -> Result<()> {
    let io = |e| Error::io("<output>", e);
    writeln!(out, "{}", serde_json::to_string(&serde_json::to_value(header)?)?).map_err(io)?;
    for (u, records) in batches {
        if u.dim() != header.m {
            return Err(Error::Shape(format!(
                "unitary is {}x{0}, header says m = {}",
                u.dim(),
                header.m
            )));
        }
        writeln!(out, "{SECTION} {}", unitary_hash(u)).map_err(io)?;
        for r in *records {
            if r.pattern.modes() != header.m {
                return Err(Error::Shape(format!("record has {} modes", r.pattern.modes())));
            }
            writeln!(out, "{}", format_record(&r.pattern)).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

/// Write a click file and store its unitaries under [`UNITARY_DIR`] next to it,
/// except those carried inline in the header.
pub fn write_clicks(path: &Path, header: &ClickHeader, batches: &[(&Unitary, &[ClickRecord])]) -> Result<()> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let udir = dir.join(UNITARY_DIR);
    for (u, _) in batches {
        let hash = unitary_hash(u);
        if !header.inline.contains_key(&hash) {
            std::fs::create_dir_all(&udir).map_err(|e| Error::io(&udir, e))?;
            let upath = udir.join(format!("{hash}.json"));
            if !upath.exists() {
                write_unitary(u, &upath)?;
            }
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    render_clicks(&mut BufWriter::new(file), header, batches).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Read and validate a click file.
pub fn ingest_clicks(path: &Path) -> Result<ClickData> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_clicks(BufReader::new(file), &dir)
}

fn resolve(header: &ClickHeader, reference: &str, dir: &Path) -> Result<Unitary> {
    let u = match header.inline.get(reference) {
        Some(f) => f.to_unitary()?,
        None => {
            let path: PathBuf = dir.join(UNITARY_DIR).join(format!("{reference}.json"));
            if !path.is_file() {
                return Err(Error::MissingUnitary {
                    reference: reference.into(),
                    path,
                });
            }
            super::unitary_file::read_unitary(&path)?
        }
    };
    if u.dim() != header.m {
        return Err(Error::Shape(format!(
            "unitary {reference} is {}x{0}, header says m = {}",
            u.dim(),
            header.m
        )));
    }
    if unitary_hash(&u) != reference {
        warn!("unitary {reference} does not match its content hash");
    }
    Ok(u)
}

/// Parse click data from `reader`, resolving unitary files relative to `dir`.
pub fn parse_clicks(reader: impl BufRead, dir: &Path) -> Result<ClickData> {
    let mut lines = reader.lines().enumerate();
    let read_err = |e| Error::io(dir, e);
    let header: ClickHeader = loop {
        match lines.next() {
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "missing header".into(),
                })
            }
            Some((i, line)) => {
                let line = line.map_err(read_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                break serde_json::from_str(&line).map_err(|e| Error::Parse {
                    line: i + 1,
                    message: format!("bad header: {e}"),
                })?;
            }
        }
    };
    if header.format != CLICK_FORMAT || header.version != VERSION {
        return Err(Error::Parse {
            line: 1,
            message: format!("unsupported format {:?} version {}", header.format, header.version),
        });
    }
    if header.n > header.m {
        return Err(Error::Parse {
            line: 1,
            message: format!("n = {} exceeds m = {}", header.n, header.m),
        });
    }

    let mut batches: Vec<ClickBatch> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut current: Option<usize> = None;
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(read_err)?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix(SECTION) {
            let reference = rest.trim();
            if reference.is_empty() {
                return Err(Error::Parse {
                    line: lineno,
                    message: "section without unitary reference".into(),
                });
            }
            let slot = match index.get(reference) {
                Some(&k) => k,
                None => {
                    let unitary = resolve(&header, reference, dir)?;
                    batches.push(ClickBatch {
                        reference: reference.into(),
                        unitary,
                        records: Vec::new(),
                    });
                    index.insert(reference.into(), batches.len() - 1);
                    batches.len() - 1
                }
            };
            current = Some(slot);
            continue;
        }
        let slot = current.ok_or_else(|| Error::Parse {
            line: lineno,
            message: "record before the first @unitary line".into(),
        })?;
        let pattern = parse_record(line, header.m, header.n, lineno)?;
        batches[slot].records.push(ClickRecord::new(slot, pattern, header.n)?);
    }
    Ok(ClickData { header, batches })
}
