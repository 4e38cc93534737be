//! `key = value` experiment files with one `[section]` per subcommand.
//!
//! Keys are long flag names (`-` or `_` both accepted). The file is turned
//! into flag arguments placed ahead of the real command line, so flags given
//! on the command line win.

use std::collections::BTreeMap;
use std::fmt;

use clap::Command;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Entries grouped by section name, in file order.
pub type Sections = BTreeMap<String, Vec<Entry>>;

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

fn unquote(v: &str) -> &str {
    let v = v.trim();
    if v.len() >= 2 && ((v.starts_with('"') && v.ends_with('"')) || (v.starts_with('\'') && v.ends_with('\''))) {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

pub fn parse(text: &str, known_sections: &[&str]) -> Result<Sections, ConfigError> {
    let mut sections = Sections::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') || s.starts_with(';') {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, "unterminated section header"))?
                .trim();
            if !known_sections.contains(&name) {
                return Err(err(
                    line,
                    format!("unknown section [{name}], expected one of: {}", known_sections.join(", ")),
                ));
            }
            if sections.contains_key(name) {
                return Err(err(line, format!("section [{name}] appears twice")));
            }
            sections.insert(name.to_string(), Vec::new());
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', got '{s}'")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(err(line, "empty key"));
        }
        let section = current
            .as_ref()
            .ok_or_else(|| err(line, format!("key '{key}' appears before any [section]")))?;
        let entries = sections.get_mut(section).unwrap();
        if entries.iter().any(|e| e.key == key) {
            return Err(err(line, format!("duplicate key '{key}' in [{section}]")));
        }
        entries.push(Entry {
            line,
            key: key.to_string(),
            value: unquote(value).to_string(),
        });
    }
    Ok(sections)
}

/// Converts entries into `--flag[=value]` arguments for `leaf`, checking each
/// one against the command definition so bad values report their line.
pub fn to_args(entries: &[Entry], section: &str, leaf: &Command) -> Result<Vec<String>, ConfigError> {
    let mut out = Vec::new();
    for e in entries {
        let wanted = e.key.replace('_', "-");
        let arg = leaf
            .get_arguments()
            .find(|a| a.get_long().is_some_and(|l| l == wanted || l == e.key))
            .filter(|a| a.get_long() != Some("config"))
            .ok_or_else(|| err(e.line, format!("unknown key '{}' in [{section}]", e.key)))?;
        let long = arg.get_long().unwrap();
        let token = if arg.get_action().takes_values() {
            format!("--{long}={}", e.value)
        } else {
            match e.value.as_str() {
                "true" | "yes" | "1" => format!("--{long}"),
                "false" | "no" | "0" => continue,
                other => {
                    return Err(err(e.line, format!("key '{}' expects true or false, got '{other}'", e.key)));
                }
            }
        };
        if let Err(clap_err) = leaf.clone().try_get_matches_from([leaf.get_name(), token.as_str()]) {
            let detail = clap_err.to_string();
            let first = detail.lines().next().unwrap_or("").trim_start_matches("error: ");
            return Err(err(e.line, format!("key '{}': {first}", e.key)));
        }
        out.push(token);
    }
    Ok(out)
}
