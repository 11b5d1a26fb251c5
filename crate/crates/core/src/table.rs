//! Line-oriented plain-text tables shared by every on-disk format.
//!
//! ```text
//! # comment
//! genus: 2                  <- header entry (before any section)
//! [twist_a1]                <- section header
//! b1: b1,a1                 <- keyed entry
//! 1.0,0.0,0.0,1.0           <- bare row (matrix blocks)
//! ```
//!
//! Blank lines and `#` comments are ignored; whitespace around tokens is
//! insignificant. Interpretation of the values is left to the caller.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing header key `{0}`")]
    MissingKey(String),
    #[error("missing section `{0}`")]
    MissingSection(String),
    #[error("bad value for `{key}`: {message}")]
    BadValue { key: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Line {
    Entry { key: String, value: String, line: usize },
    Row { values: String, line: usize },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub name: String,
    pub lines: Vec<Line>,
}

impl Section {
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.lines.iter().filter_map(|l| match l {
            Line::Entry { key, value, .. } => Some((key.as_str(), value.as_str())),
            Line::Row { .. } => None,
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().filter_map(|l| match l {
            Line::Row { values, .. } => Some(values.as_str()),
            Line::Entry { .. } => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TableFile {
    pub header: Section,
    pub sections: Vec<Section>,
}

impl TableFile {
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut file = TableFile::default();
        let mut current: Option<Section> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| TableError::Syntax {
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(TableError::Syntax {
                        line: line_no,
                        message: "empty section name".into(),
                    });
                }
                if let Some(done) = current.take() {
                    file.sections.push(done);
                }
                current = Some(Section {
                    name: name.to_string(),
                    lines: Vec::new(),
                });
                continue;
            }
            let parsed = match line.split_once(':') {
                Some((key, value)) => {
                    let key = key.trim();
                    if key.is_empty() {
                        return Err(TableError::Syntax {
                            line: line_no,
                            message: "empty key".into(),
                        });
                    }
                    Line::Entry {
                        key: key.to_string(),
                        value: value.trim().to_string(),
                        line: line_no,
                    }
                }
                None => Line::Row {
                    values: line.to_string(),
                    line: line_no,
                },
            };
            match current.as_mut() {
                Some(section) => section.lines.push(parsed),
                None => file.header.lines.push(parsed),
            }
        }
        if let Some(done) = current.take() {
            file.sections.push(done);
        }
        Ok(file)
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.entries().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn require_header(&self, key: &str) -> Result<&str, TableError> {
        self.header_value(key)
            .ok_or_else(|| TableError::MissingKey(key.to_string()))
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let write_lines = |out: &mut String, lines: &[Line]| {
            for l in lines {
                match l {
                    Line::Entry { key, value, .. } => {
                        let _ = writeln!(out, "{key}: {value}");
                    }
                    Line::Row { values, .. } => {
                        let _ = writeln!(out, "{values}");
                    }
                }
            }
        };
        write_lines(&mut out, &self.header.lines);
        for s in &self.sections {
            let _ = writeln!(out, "[{}]", s.name);
            write_lines(&mut out, &s.lines);
        }
        out
    }
}

/// Parses a comma-separated list of floats.
pub fn parse_floats(values: &str) -> Result<Vec<f64>, String> {
    values
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|e| format!("`{tok}` is not a number ({e})"))
        })
        .collect()
}

/// Builds an entry line for rendering.
pub fn entry(key: impl Into<String>, value: impl Into<String>) -> Line {
    Line::Entry {
        key: key.into(),
        value: value.into(),
        line: 0,
    }
}

pub fn row(values: impl Into<String>) -> Line {
    Line::Row {
        values: values.into(),
        line: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_sections_and_rows() {
        let text = "# hi\ngenus: 2\n\n[twist_a1]\nb1: b1,a1   # trailing\n[block]\n1,2\n3,4\n";
        let t = TableFile::parse(text).unwrap();
        assert_eq!(t.header_value("genus"), Some("2"));
        assert_eq!(t.sections.len(), 2);
        let tw = t.section("twist_a1").unwrap();
        assert_eq!(tw.entries().collect::<Vec<_>>(), vec![("b1", "b1,a1")]);
        assert_eq!(t.section("block").unwrap().rows().count(), 2);
    }

    #[test]
    fn rejects_broken_section_header() {
        assert!(matches!(
            TableFile::parse("[oops\n"),
            Err(TableError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn render_reparses_identically() {
        let text = "genus: 2\n[s]\na: 1\n1,2\n";
        let t = TableFile::parse(text).unwrap();
        let again = TableFile::parse(&t.render()).unwrap();
        assert_eq!(t.render(), again.render());
    }
}
