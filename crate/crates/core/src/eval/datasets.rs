//! Parsers for the benchmark file formats.
//!
//! * similarity: `word1<TAB>word2<TAB>score` (whitespace also accepted; a
//!   header line with a non-numeric score is skipped)
//! * analogy: `a b c d` quadruples, `:` lines open a new section
//! * SemBias: four `a:b` pairs per line, optionally followed by a column
//!   such as `def,ster,none,none` naming the role of each pair; without it
//!   the pairs are taken in that order

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityPair {
    pub w1: String,
    pub w2: String,
    pub score: f64,
}

pub fn parse_similarity(text: &str, path: &Path) -> Result<Vec<SimilarityPair>> {
    let mut out = Vec::new();
    for (n, line) in content_lines(text) {
        let fields: Vec<&str> = if line.contains('\t') {
            line.split('\t').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        if fields.len() < 3 {
            return Err(parse_err(path, n, "expected word1, word2 and a score"));
        }
        match fields[2].parse::<f64>() {
            Ok(score) if score.is_finite() => out.push(SimilarityPair {
                w1: fields[0].to_string(),
                w2: fields[1].to_string(),
                score,
            }),
            _ if out.is_empty() => continue,
            _ => return Err(parse_err(path, n, format!("bad score {:?}", fields[2]))),
        }
    }
    Ok(out)
}

pub fn load_similarity(path: impl AsRef<Path>) -> Result<Vec<SimilarityPair>> {
    let path = path.as_ref();
    parse_similarity(&read(path)?, path)
}

/// `w1 : w2 :: w3 : gold`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalogyQuery {
    pub w1: String,
    pub w2: String,
    pub w3: String,
    pub gold: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub section: Option<String>,
}

impl AnalogyQuery {
    pub fn new(w1: &str, w2: &str, w3: &str, gold: &str) -> Self {
        Self {
            w1: w1.into(),
            w2: w2.into(),
            w3: w3.into(),
            gold: gold.into(),
            section: None,
        }
    }

    pub(crate) fn sort_key(&self) -> String {
        format!("{} {} {} {}", self.w1, self.w2, self.w3, self.gold)
    }
}

/// `m1 : f1 :: m2 : f2` for every ordered pair of distinct pairs.
pub fn analogies_from_pairs(pairs: &[(String, String)]) -> Vec<AnalogyQuery> {
    let mut out = Vec::new();
    for (i, (m1, f1)) in pairs.iter().enumerate() {
        for (j, (m2, f2)) in pairs.iter().enumerate() {
            if i != j {
                out.push(AnalogyQuery::new(m1, f1, m2, f2));
            }
        }
    }
    out
}

pub fn parse_analogies(text: &str, path: &Path) -> Result<Vec<AnalogyQuery>> {
    let mut out = Vec::new();
    let mut section = None;
    for (n, line) in content_lines(text) {
        if let Some(name) = line.strip_prefix(':') {
            section = Some(name.trim().to_string());
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let [a, b, c, d] = f[..] else {
            return Err(parse_err(path, n, format!("expected 4 words, found {}", f.len())));
        };
        let mut q = AnalogyQuery::new(a, b, c, d);
        q.section = section.clone();
        out.push(q);
    }
    Ok(out)
}

pub fn load_analogies(path: impl AsRef<Path>) -> Result<Vec<AnalogyQuery>> {
    let path = path.as_ref();
    parse_analogies(&read(path)?, path)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemBiasInstance {
    pub def_pair: (String, String),
    pub ster_pair: (String, String),
    pub none_pair_1: (String, String),
    pub none_pair_2: (String, String),
}

impl SemBiasInstance {
    /// Candidate pairs in tie-break order: definition, stereotype, none, none.
    pub fn candidates(&self) -> [&(String, String); 4] {
        [&self.def_pair, &self.ster_pair, &self.none_pair_1, &self.none_pair_2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Def,
    Ster,
    None,
}

fn parse_roles(col: &str, path: &Path, n: usize) -> Result<[Role; 4]> {
    let roles: Vec<Role> = col
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|r| match r.to_ascii_lowercase().as_str() {
            "def" | "definition" => Ok(Role::Def),
            "ster" | "stereotype" => Ok(Role::Ster),
            "none" => Ok(Role::None),
            other => Err(parse_err(path, n, format!("unknown role {other:?}"))),
        })
        .collect::<Result<_>>()?;
    let roles: [Role; 4] = roles
        .try_into()
        .map_err(|_| parse_err(path, n, "label column must name exactly 4 roles"))?;
    let count = |r| roles.iter().filter(|x| **x == r).count();
    if count(Role::Def) != 1 || count(Role::Ster) != 1 || count(Role::None) != 2 {
        return Err(parse_err(path, n, "labels must be one def, one ster and two none"));
    }
    Ok(roles)
}

pub fn parse_sembias(text: &str, path: &Path) -> Result<Vec<SemBiasInstance>> {
    let mut out = Vec::new();
    for (n, line) in content_lines(text) {
        let cols: Vec<&str> = line.split('\t').map(str::trim).filter(|c| !c.is_empty()).collect();
        if cols.len() != 4 && cols.len() != 5 {
            return Err(parse_err(path, n, format!("expected 4 pairs and an optional label, found {} columns", cols.len())));
        }
        let mut pairs = Vec::with_capacity(4);
        for c in &cols[..4] {
            let (a, b) = c
                .split_once(':')
                .ok_or_else(|| parse_err(path, n, format!("pair {c:?} is not of the form a:b")))?;
            pairs.push((a.trim().to_string(), b.trim().to_string()));
        }
        let roles = match cols.get(4) {
            Some(label) => parse_roles(label, path, n)?,
            None => [Role::Def, Role::Ster, Role::None, Role::None],
        };
        let mut def = None;
        let mut ster = None;
        let mut nones = Vec::new();
        for (pair, role) in pairs.into_iter().zip(roles) {
            match role {
                Role::Def => def = Some(pair),
                Role::Ster => ster = Some(pair),
                Role::None => nones.push(pair),
            }
        }
        let mut nones = nones.into_iter();
        out.push(SemBiasInstance {
            def_pair: def.expect("validated roles"),
            ster_pair: ster.expect("validated roles"),
            none_pair_1: nones.next().expect("validated roles"),
            none_pair_2: nones.next().expect("validated roles"),
        });
    }
    Ok(out)
}

pub fn load_sembias(path: impl AsRef<Path>) -> Result<Vec<SemBiasInstance>> {
    let path = path.as_ref();
    parse_sembias(&read(path)?, path)
}
