//! Line-oriented config text: `[scenario]` sections of `key = value` lines.
//! `#` starts a comment; blank lines are ignored.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

pub fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with('[') {
            if body != "[scenario]" {
                return Err(Error::config(line, format!("unknown section header `{body}`")));
            }
            sections.push(Section {
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(Error::config(line, format!("expected `key = value`, got `{body}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::config(line, format!("invalid key `{key}`")));
        }
        if value.is_empty() {
            return Err(Error::config(line, format!("empty value for `{key}`")));
        }
        let Some(section) = sections.last_mut() else {
            return Err(Error::config(line, "key outside a [scenario] section"));
        };
        if let Some(prev) = section.get(key) {
            return Err(Error::config(
                line,
                format!("duplicate key `{key}` (first set on line {})", prev.line),
            ));
        }
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    if sections.is_empty() {
        return Err(Error::config(0, "no [scenario] section found"));
    }
    Ok(sections)
}

/// Rebuilds config text from the `# key = value` lines of an artifact header.
/// Metadata lines (`#!`) and the CSV payload are skipped.
pub fn provenance_config(artifact: &str) -> String {
    let mut out = String::from("[scenario]\n");
    for line in artifact.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            out.push_str(rest);
            out.push('\n');
        } else if !line.starts_with('#') {
            break;
        }
    }
    out
}
