//! Versioned text cache of enumeration results.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{BallQuery, LatticeElement};
use crate::error::{Error, Result};
use crate::quaternion::{Quat, QuaternionAlgebra};

pub const CACHE_FORMAT: &str = "spectral-gap-enumeration v1";

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn algebra_fingerprint(alg: &QuaternionAlgebra) -> String {
    let text = format!(
        "minpoly={:?};p={:?};q={:?};d={}",
        alg.field().min_poly(),
        alg.p().coords(),
        alg.q().coords(),
        alg.split_places()
    );
    hex(&Sha256::digest(text.as_bytes()))
}

fn header_lines(alg: &QuaternionAlgebra, query: &BallQuery) -> [String; 4] {
    [
        CACHE_FORMAT.to_string(),
        format!("algebra {}", algebra_fingerprint(alg)),
        format!("ideal {}", query.ideal),
        format!("query {}", query.describe()),
    ]
}

/// SHA-256 of the cache header; used as the file name.
pub fn cache_key(alg: &QuaternionAlgebra, query: &BallQuery) -> String {
    hex(&Sha256::digest(header_lines(alg, query).join("\n").as_bytes()))
}

pub fn write_cache(path: &Path, alg: &QuaternionAlgebra, query: &BallQuery, elems: &[LatticeElement]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for line in header_lines(alg, query) {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "count {}", elems.len())?;
    for e in elems {
        let row: Vec<String> = e.quat.flat().iter().map(|c| c.to_string()).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a cache file; `Ok(None)` if the header belongs to a different query.
pub fn read_cache(path: &Path, alg: &QuaternionAlgebra, query: &BallQuery) -> Result<Option<Vec<LatticeElement>>> {
    let r = BufReader::new(fs::File::open(path)?);
    let mut lines = r.lines();
    for expected in header_lines(alg, query) {
        match lines.next().transpose()? {
            Some(line) if line == expected => {}
            Some(_) => return Ok(None),
            None => return Err(Error::Cache(format!("{}: truncated header", path.display()))),
        }
    }
    let count: usize = lines
        .next()
        .transpose()?
        .and_then(|l| l.strip_prefix("count ").and_then(|c| c.parse().ok()))
        .ok_or_else(|| Error::Cache(format!("{}: missing count line", path.display())))?;
    let width = 4 * alg.degree();
    let mut out = Vec::with_capacity(count);
    for line in lines {
        let line = line?;
        let row: std::result::Result<Vec<i128>, _> = line.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        if row.len() != width {
            return Err(Error::Cache(format!("{}: row of width {}", path.display(), row.len())));
        }
        out.push(LatticeElement::new(alg, Quat::from_flat(alg.degree(), &row)));
    }
    if out.len() != count {
        return Err(Error::Cache(format!(
            "{}: expected {count} rows, found {}",
            path.display(),
            out.len()
        )));
    }
    Ok(Some(out))
}

/// Directory of cache files named by [`cache_key`].
#[derive(Clone, Debug)]
pub struct EnumerationCache {
    dir: PathBuf,
}

impl EnumerationCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(EnumerationCache { dir })
    }

    pub fn path_for(&self, alg: &QuaternionAlgebra, query: &BallQuery) -> PathBuf {
        self.dir.join(format!("{}.enum", cache_key(alg, query)))
    }

    pub fn load_or_compute<F>(&self, alg: &QuaternionAlgebra, query: &BallQuery, compute: F) -> Result<Vec<LatticeElement>>
    where
        F: FnOnce() -> Result<Vec<LatticeElement>>,
    {
        let path = self.path_for(alg, query);
        if path.exists() {
            if let Some(hit) = read_cache(&path, alg, query)? {
                return Ok(hit);
            }
        }
        let elems = compute()?;
        write_cache(&path, alg, query, &elems)?;
        Ok(elems)
    }
}
