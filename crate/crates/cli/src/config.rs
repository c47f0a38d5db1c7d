//! Strict key-value configuration with named sections.
//!
//! ```text
//! # comments and blank lines are skipped
//! [problem]
//! gamma = 0.6
//! beta = 0.75
//! t_end = 1.0
//! interval = 0 1
//! coefficients = constant 1 0
//! data = example71-1d
//!
//! [sweep]
//! p = 2 3 4 5 6 7 8
//! times = 1.0
//!
//! [output]
//! dir = out
//! ```
//!
//! Unknown sections or keys are errors: a typo must not silently fall
//! back to a default.

use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    /// section -> ordered (key, value) pairs
    pub sections: BTreeMap<String, Vec<(String, String)>>,
    /// the raw text as parsed (hashed into the manifest)
    pub text: String,
}

pub fn parse(text: &str) -> Result<RawConfig, String> {
    let mut out = RawConfig {
        text: text.to_string(),
        ..Default::default()
    };
    let mut current: Option<String> = None;
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| format!("line {}: malformed section header", lineno + 1))?;
            let name = name.trim().to_string();
            if name.is_empty() {
                return Err(format!("line {}: empty section name", lineno + 1));
            }
            out.sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
        let section = current
            .clone()
            .ok_or_else(|| format!("line {}: key outside any [section]", lineno + 1))?;
        let key = key.trim().to_string();
        let entries = out.sections.get_mut(&section).unwrap();
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(format!("line {}: duplicate key `{key}`", lineno + 1));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Typed view over one section that records which keys were consumed and
/// rejects leftovers.
pub struct Section<'a> {
    name: &'a str,
    entries: Vec<(String, String)>,
    used: Vec<bool>,
}

impl<'a> Section<'a> {
    pub fn new(raw: &RawConfig, name: &'a str) -> Section<'a> {
        let entries = raw.sections.get(name).cloned().unwrap_or_default();
        let used = vec![false; entries.len()];
        Section {
            name,
            entries,
            used,
        }
    }

    pub fn get(&mut self, key: &str) -> Option<&str> {
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if k == key {
                self.used[i] = true;
                return Some(v);
            }
        }
        None
    }

    pub fn f64(&mut self, key: &str) -> Result<Option<f64>, String> {
        let name = self.name;
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| format!("[{name}] {key}: `{v}` is not a number")),
        }
    }

    pub fn usize(&mut self, key: &str) -> Result<Option<usize>, String> {
        let name = self.name;
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| format!("[{name}] {key}: `{v}` is not an integer")),
        }
    }

    pub fn f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>, String> {
        let name = self.name;
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| format!("[{name}] {key}: `{t}` is not a number"))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    pub fn usize_list(&mut self, key: &str) -> Result<Option<Vec<usize>>, String> {
        let name = self.name;
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| format!("[{name}] {key}: `{t}` is not an integer"))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    /// Error out if any key in the section was never consumed.
    pub fn finish(self) -> Result<(), String> {
        for (i, (k, _)) in self.entries.iter().enumerate() {
            if !self.used[i] {
                return Err(format!("[{}] unknown key `{k}`", self.name));
            }
        }
        Ok(())
    }
}

/// Reject sections nobody claimed.
pub fn check_sections(raw: &RawConfig, known: &[&str]) -> Result<(), String> {
    for name in raw.sections.keys() {
        if !known.contains(&name.as_str()) {
            return Err(format!("unknown section [{name}]"));
        }
    }
    Ok(())
}

/// FNV-1a over the config text; recorded in the run manifest.
pub fn config_hash(text: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
