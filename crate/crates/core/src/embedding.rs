//! Embedding sets and their on-disk formats.
//!
//! The text format is one word per line followed by space-separated
//! decimals, optionally preceded by a word2vec-style `V n` header. The
//! binary format is little-endian:
//!
//! ```text
//! magic "GYROEMB1" | u32 V | u32 n | V × (u32 len, utf-8 word) | V·n × f64
//! ```

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{raw, PoincarePoint};

pub const BINARY_MAGIC: &[u8; 8] = b"GYROEMB1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Poincare,
    Euclidean,
}

impl std::str::FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poincare" => Ok(Space::Poincare),
            "euclidean" => Ok(Space::Euclidean),
            other => Err(Error::InvalidConfig(format!("unknown space {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordClass {
    Specific,
    Neutral,
}

/// Counters for the repairs applied while building a set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    /// Poincaré rows with norm ≥ 1 that were pulled back into the ball.
    pub projected_rows: usize,
    /// Repeated words whose later rows were dropped.
    pub duplicate_words: usize,
}

/// Vocabulary-indexed vectors, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    dim: usize,
    space: Space,
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f64>,
    partition: Option<Vec<WordClass>>,
}

impl EmbeddingSet {
    pub fn new(dim: usize, space: Space) -> Self {
        Self {
            dim,
            space,
            words: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
            partition: None,
        }
    }

    /// Builds a set from `(word, row)` pairs, applying the load-time rules:
    /// non-finite values are rejected, Poincaré rows outside the ball are
    /// projected, and the first occurrence of a duplicated word wins.
    pub fn from_rows<I, S>(dim: usize, space: Space, rows: I) -> Result<(Self, LoadReport)>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut set = Self::new(dim, space);
        let mut report = LoadReport::default();
        for (word, row) in rows {
            match set.insert(word.into(), row)? {
                Inserted::Projected => report.projected_rows += 1,
                Inserted::Duplicate => report.duplicate_words += 1,
                Inserted::Plain => {}
            }
        }
        Ok((set, report))
    }

    fn insert(&mut self, word: String, mut row: Vec<f64>) -> Result<Inserted> {
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: row.len(),
            });
        }
        if let Some(index) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if self.index.contains_key(&word) {
            return Ok(Inserted::Duplicate);
        }
        let mut outcome = Inserted::Plain;
        if self.space == Space::Poincare && raw::norm(&row) >= 1.0 {
            row = raw::project(row);
            outcome = Inserted::Projected;
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.vectors.extend_from_slice(&row);
        if let Some(p) = self.partition.as_mut() {
            p.push(WordClass::Neutral);
        }
        Ok(outcome)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.index_of(word).map(|i| self.row(i))
    }

    /// The ball point for `word`. Fails for words not in the vocabulary.
    pub fn point(&self, word: &str) -> Result<PoincarePoint> {
        let v = self
            .vector(word)
            .ok_or_else(|| Error::MissingWord(word.to_string()))?;
        PoincarePoint::new(v.to_vec())
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words
            .iter()
            .enumerate()
            .map(move |(i, w)| (w.as_str(), self.row(i)))
    }

    /// Overwrites the row of an existing word.
    pub fn set_row(&mut self, i: usize, row: &[f64]) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: row.len(),
            });
        }
        self.vectors[i * self.dim..(i + 1) * self.dim].copy_from_slice(row);
        Ok(())
    }

    /// Marks the listed words as gender-specific and everything else as
    /// neutral. Listed words missing from the vocabulary are ignored.
    pub fn set_partition<S: AsRef<str>>(&mut self, specific: &[S]) {
        let mut classes = vec![WordClass::Neutral; self.len()];
        for w in specific {
            if let Some(i) = self.index_of(w.as_ref()) {
                classes[i] = WordClass::Specific;
            }
        }
        self.partition = Some(classes);
    }

    pub fn partition(&self) -> Option<&[WordClass]> {
        self.partition.as_deref()
    }

    pub fn class_of(&self, word: &str) -> Option<WordClass> {
        let i = self.index_of(word)?;
        self.partition.as_ref().map(|p| p[i])
    }

    /// Words classed neutral, in vocabulary order. Empty without a partition.
    pub fn neutral_words(&self) -> Vec<&str> {
        match &self.partition {
            Some(p) => self
                .words
                .iter()
                .zip(p)
                .filter(|(_, c)| **c == WordClass::Neutral)
                .map(|(w, _)| w.as_str())
                .collect(),
            None => Vec::new(),
        }
    }
}

enum Inserted {
    Plain,
    Projected,
    Duplicate,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Reads an embedding file, detecting the binary format by its magic bytes.
pub fn load_embeddings(path: impl AsRef<Path>, space: Space) -> Result<EmbeddingSet> {
    let (set, report) = load_embeddings_with_report(path.as_ref(), space)?;
    if report.projected_rows > 0 {
        log::warn!(
            "{}: projected {} row(s) with norm >= 1 into the ball",
            path.as_ref().display(),
            report.projected_rows
        );
    }
    if report.duplicate_words > 0 {
        log::warn!(
            "{}: dropped {} duplicate word(s); first occurrence kept",
            path.as_ref().display(),
            report.duplicate_words
        );
    }
    Ok(set)
}

pub fn load_embeddings_with_report(path: &Path, space: Space) -> Result<(EmbeddingSet, LoadReport)> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 8];
    let mut filled = 0;
    while filled < magic.len() {
        let n = file.read(&mut magic[filled..]).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        filled += n;
    }
    drop(file);
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    if filled == 8 && &magic == BINARY_MAGIC {
        read_binary(BufReader::new(file), path, space)
    } else {
        read_text(BufReader::new(file), path, space)
    }
}

/// Parses the text format from any reader; `path` is only used in errors.
pub fn read_text<R: BufRead>(reader: R, path: &Path, space: Space) -> Result<(EmbeddingSet, LoadReport)> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut set: Option<EmbeddingSet> = None;
    let mut report = LoadReport::default();
    let mut rows_seen = 0usize;

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if set.is_none() && header.is_none() && rows_seen == 0 && fields.len() == 2 {
            if let (Ok(v), Ok(n)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                header = Some((v, n, line_no));
                continue;
            }
        }
        if fields.len() < 2 {
            return Err(parse_err(path, line_no, "expected a word followed by at least one value"));
        }
        let dim = fields.len() - 1;
        let target = set.get_or_insert_with(|| EmbeddingSet::new(dim, space));
        if dim != target.dim {
            return Err(parse_err(
                path,
                line_no,
                format!("expected {} values, found {dim}", target.dim),
            ));
        }
        let mut row = Vec::with_capacity(dim);
        for tok in &fields[1..] {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("not a number: {tok:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, line_no, format!("non-finite value {tok:?}")));
            }
            row.push(v);
        }
        rows_seen += 1;
        match target.insert(fields[0].to_string(), row)? {
            Inserted::Projected => report.projected_rows += 1,
            Inserted::Duplicate => report.duplicate_words += 1,
            Inserted::Plain => {}
        }
    }

    let set = set.ok_or(Error::EmptyEmbedding)?;
    if let Some((v, n, line)) = header {
        if v != rows_seen || n != set.dim {
            return Err(parse_err(
                path,
                line,
                format!("header says {v} x {n}, file has {rows_seen} x {}", set.dim),
            ));
        }
    }
    Ok((set, report))
}

fn read_u32<R: Read>(r: &mut R, path: &Path) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|e| Error::io(path, e))?;
    Ok(u32::from_le_bytes(b))
}

fn read_binary<R: Read>(mut r: R, path: &Path, space: Space) -> Result<(EmbeddingSet, LoadReport)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
    let v = read_u32(&mut r, path)? as usize;
    let n = read_u32(&mut r, path)? as usize;
    if v == 0 {
        return Err(Error::EmptyEmbedding);
    }
    let mut words = Vec::with_capacity(v);
    for i in 0..v {
        let len = read_u32(&mut r, path)? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf).map_err(|e| Error::io(path, e))?;
        let w = String::from_utf8(buf)
            .map_err(|_| parse_err(path, i + 1, "word is not valid UTF-8"))?;
        words.push(w);
    }
    let mut rows = Vec::with_capacity(v);
    let mut b = [0u8; 8];
    for w in words {
        let mut row = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut b).map_err(|e| Error::io(path, e))?;
            row.push(f64::from_le_bytes(b));
        }
        rows.push((w, row));
    }
    EmbeddingSet::from_rows(n, space, rows)
}

fn check_saveable(emb: &EmbeddingSet) -> Result<()> {
    if emb.is_empty() {
        return Err(Error::EmptyEmbedding);
    }
    if let Some(bad) = emb
        .words()
        .iter()
        .find(|w| w.is_empty() || w.chars().any(char::is_whitespace))
    {
        return Err(Error::InvalidWord(bad.clone()));
    }
    Ok(())
}

/// Writes the text format. Values use the shortest representation that
/// parses back to the same `f64`.
pub fn save_embeddings(emb: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    check_saveable(emb)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_text(emb, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_text<W: Write>(emb: &EmbeddingSet, w: &mut W) -> std::io::Result<()> {
    for (word, row) in emb.rows() {
        w.write_all(word.as_bytes())?;
        for v in row {
            write!(w, " {v:?}")?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_embeddings_binary(emb: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    check_saveable(emb)?;
    let too_big = |what: &str| Error::InvalidConfig(format!("{what} does not fit the binary format"));
    let v = u32::try_from(emb.len()).map_err(|_| too_big("vocabulary size"))?;
    let n = u32::try_from(emb.dim()).map_err(|_| too_big("dimension"))?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&v.to_le_bytes())?;
        w.write_all(&n.to_le_bytes())?;
        for word in emb.words() {
            w.write_all(&(word.len() as u32).to_le_bytes())?;
            w.write_all(word.as_bytes())?;
        }
        for x in &emb.vectors {
            w.write_all(&x.to_le_bytes())?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Parses a word list: one entry per line, `#` starts a comment line, blank
/// lines are skipped, case is preserved, duplicates are dropped.
pub fn parse_word_list(text: &str) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for line in text.lines() {
        let entry = line.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        if seen.insert(entry.to_string()) {
            out.push(entry.to_string());
        } else {
            log::warn!("duplicate word list entry {entry:?} ignored");
        }
    }
    out
}

pub fn load_word_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_word_list(&text))
}

/// Parses word pairs separated by whitespace or `:`. Same comment and
/// duplicate rules as [`parse_word_list`].
pub fn parse_pairs(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let entry = line.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = entry
            .split(|c: char| c == ':' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let [a, b] = parts[..] else {
            return Err(parse_err(path, i + 1, format!("expected two words, found {}", parts.len())));
        };
        let pair = (a.to_string(), b.to_string());
        if seen.insert(pair.clone()) {
            out.push(pair);
        } else {
            log::warn!("duplicate pair {a}:{b} ignored");
        }
    }
    Ok(out)
}

pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pairs(&text, path)
}
