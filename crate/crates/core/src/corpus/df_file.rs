//! Flat-file persistence for [`DfTable`].
//!
//! ```text
//! # cider-eval df-table v1
//! num_images=2
//! max_n=4
//! 1<TAB>a<TAB>1
//! 2<TAB>a b<TAB>1
//! ```
//!
//! Entry lines are `arity<TAB>space-joined tokens<TAB>df`. Lines starting with
//! `#` and blank lines are ignored; entries may appear in any order. Writers
//! emit entries sorted by arity then key so output is byte-stable.

use rustc_hash::FxHashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::{DfProvenance, DfTable, NGramKey};
use crate::error::{Error, Result};

const MAGIC: &str = "# cider-eval df-table v1";

pub fn write_df<W: Write>(table: &DfTable, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "num_images={}", table.num_images())?;
    writeln!(out, "max_n={}", table.max_n())?;
    let mut entries: Vec<_> = table.iter().collect();
    entries.sort_unstable_by(|a, b| a.0.cmp(b.0));
    for (k, d) in entries {
        writeln!(out, "{}\t{}\t{}", k.arity(), k, d)?;
    }
    Ok(())
}

pub fn save_df(table: &DfTable, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_df(table, &mut buf).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Loads a table written by [`save_df`]. The provenance is set to the file path.
pub fn load_df(path: &Path) -> Result<DfTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_df(&text, path)
}

fn parse_df(text: &str, path: &Path) -> Result<DfTable> {
    let err = |line: usize, message: String| Error::Parse { path: path.to_owned(), line, message };

    let mut saw_magic = false;
    let mut num_images: Option<usize> = None;
    let mut max_n: Option<usize> = None;
    let mut df: FxHashMap<NGramKey, u32> = FxHashMap::default();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if line.trim_end() == MAGIC {
                saw_magic = true;
            } else if line.starts_with("# cider-eval df-table") {
                return Err(err(lineno, format!("unsupported table version `{line}`")));
            }
            continue;
        }
        if let Some(v) = line.strip_prefix("num_images=") {
            num_images = Some(v.trim().parse().map_err(|_| err(lineno, format!("bad num_images `{v}`")))?);
            continue;
        }
        if let Some(v) = line.strip_prefix("max_n=") {
            max_n = Some(v.trim().parse().map_err(|_| err(lineno, format!("bad max_n `{v}`")))?);
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(n), Some(tokens), Some(d), None) = (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(err(lineno, "expected `n<TAB>tokens<TAB>df`".into()));
        };
        let n: usize = n.parse().map_err(|_| err(lineno, format!("bad arity `{n}`")))?;
        let d: u32 = d.trim().parse().map_err(|_| err(lineno, format!("bad document frequency `{d}`")))?;
        let key = NGramKey::parse(tokens).ok_or_else(|| err(lineno, "empty n-gram".into()))?;
        if key.arity() != n {
            return Err(err(lineno, format!("arity {n} does not match `{key}`")));
        }
        if df.insert(key, d).is_some() {
            return Err(err(lineno, format!("duplicate n-gram `{tokens}`")));
        }
    }

    if !saw_magic {
        return Err(err(1, format!("missing header `{MAGIC}`")));
    }
    let num_images = num_images.ok_or_else(|| err(0, "missing num_images= line".into()))?;
    // older writers omitted max_n; infer it from the longest stored key
    let max_n = max_n.unwrap_or_else(|| df.keys().map(NGramKey::arity).max().unwrap_or(4));
    DfTable::from_parts(df, num_images, max_n, DfProvenance::File { path: path.display().to_string() })
        .map_err(|e| err(0, e.to_string()))
}
