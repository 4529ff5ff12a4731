use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::textproc::RawCaption;

/// Reads one JSON object per line. Blank lines are skipped; errors carry the
/// 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_jsonl_from(BufReader::new(file), path)
}

pub fn read_jsonl_from<T: DeserializeOwned, R: BufRead>(reader: R, path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_owned(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

/// A line of a references-only file: the batch format with the candidate optional.
#[derive(Debug, Clone, Deserialize)]
pub struct ReferenceRecord {
    #[serde(default)]
    pub image_id: Option<String>,
    pub references: Vec<RawCaption>,
}

#[derive(Deserialize)]
struct CocoAnnotations {
    annotations: Vec<CocoCaption>,
}

#[derive(Deserialize)]
struct CocoCaption {
    caption: String,
}

/// Loads a flat list of captions for corpus statistics.
///
/// * `*.jsonl`: batch or reference records; every reference (and candidate,
///   when present) counts as a caption.
/// * `*.json`: COCO-style `{"annotations": [{"caption": ...}, ...]}`.
/// * anything else: one caption per non-blank line.
pub fn load_captions(path: &Path) -> Result<Vec<RawCaption>> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    match ext {
        "jsonl" => {
            #[derive(Deserialize)]
            struct Line {
                #[serde(default)]
                candidate: Option<RawCaption>,
                #[serde(default)]
                references: Vec<RawCaption>,
            }
            let lines: Vec<Line> = read_jsonl(path)?;
            Ok(lines.into_iter().flat_map(|l| l.references.into_iter().chain(l.candidate)).collect())
        }
        "json" => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            let parsed: CocoAnnotations = serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Parse {
                path: path.to_owned(),
                line: e.line(),
                message: e.to_string(),
            })?;
            Ok(parsed.annotations.into_iter().map(|a| RawCaption(a.caption)).collect())
        }
        _ => {
            let mut text = String::new();
            File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map_err(|e| Error::io(path, e))?;
            Ok(text.lines().filter(|l| !l.trim().is_empty()).map(RawCaption::from).collect())
        }
    }
}
