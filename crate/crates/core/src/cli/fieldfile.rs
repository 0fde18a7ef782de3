//! Field files: TOML (or JSON when the text starts with `{`) documents with
//! keys `dim`, `coords`, `frame`, and optional `box`, `tol`, `name`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::field::{FieldError, FieldSpec, FrameEntry, GridBox};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub coords: Vec<String>,
    /// `[[lo…], [hi…]]`.
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub frame: Vec<FrameEntry>,
}

/// An input problem located in a file, printed as `file:line:column: message`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub file: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
            if let Some(col) = self.column {
                write!(f, ":{col}")?;
            }
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for InputError {}

impl InputError {
    pub fn plain(file: &str, message: impl Into<String>) -> Self {
        Self {
            file: file.to_string(),
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

impl FieldFile {
    pub fn parse(text: &str, file: &str) -> Result<Self, InputError> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| InputError {
                file: file.to_string(),
                line: Some(e.line()),
                column: Some(e.column()),
                message: e.to_string(),
            })
        } else {
            toml::from_str(text).map_err(|e| {
                let (line, column) = e
                    .span()
                    .map(|s| line_col(text, s.start))
                    .map_or((None, None), |(l, c)| (Some(l), Some(c)));
                InputError {
                    file: file.to_string(),
                    line,
                    column,
                    message: e.message().to_string(),
                }
            })
        }
    }

    pub fn read(path: &Path) -> Result<(Self, String), InputError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError::plain(&name, format!("cannot read: {e}")))?;
        Ok((Self::parse(&text, &name)?, text))
    }

    pub fn domain(&self) -> Result<Option<GridBox>, String> {
        let Some(b) = &self.bounds else {
            return Ok(None);
        };
        if b.len() != 2 || b.iter().any(|row| row.len() != self.dim) {
            return Err(format!("`box` must be [[lo; {0}], [hi; {0}]]", self.dim));
        }
        Ok(Some(GridBox {
            lo: b[0].clone(),
            hi: b[1].clone(),
        }))
    }

    /// Builds the field, mapping expression errors back to `text`.
    pub fn to_spec(&self, text: &str, file: &str, tol: f64) -> Result<FieldSpec, InputError> {
        let mut spec = FieldSpec::new(self.dim, self.coords.clone(), self.frame.clone())
            .map_err(|e| self.locate(e, text, file))?
            .with_tol(tol);
        if let Some(name) = &self.name {
            spec = spec.with_name(name.clone());
        }
        if let Some(domain) = self.domain().map_err(|m| InputError::plain(file, m))? {
            spec = spec.with_domain(domain);
        }
        Ok(spec)
    }

    fn locate(&self, err: FieldError, text: &str, file: &str) -> InputError {
        let FieldError::Parse {
            entry,
            component,
            source,
        } = &err
        else {
            return InputError::plain(file, err.to_string());
        };
        let m = self.dim;
        let (part, idx) = if *component < m {
            ("vector", *component)
        } else {
            ("covector", component - m)
        };
        let expr = component_text(&self.frame[*entry], *component, m);
        let message = format!("frame[{entry}].{part}[{idx}] = {expr:?}: {source}");
        // Locate the quoted expression; the first occurrence is reported.
        let quoted = format!("\"{expr}\"");
        match text.find(&quoted) {
            Some(at) => {
                let offset = at + 1 + source.position().unwrap_or(0);
                let (line, column) = line_col(text, offset);
                InputError {
                    file: file.to_string(),
                    line: Some(line),
                    column: Some(column),
                    message,
                }
            }
            None => InputError::plain(file, message),
        }
    }

    /// TOML text of this file preceded by `#` comment lines.
    pub fn to_toml(&self, comments: &[&str]) -> String {
        let mut out = String::new();
        for c in comments {
            if c.is_empty() {
                out.push_str("#\n");
            } else {
                out.push_str(&format!("# {c}\n"));
            }
        }
        out.push('\n');
        out.push_str(&toml::to_string(self).expect("field files serialize"));
        out
    }
}

fn component_text(entry: &FrameEntry, component: usize, m: usize) -> &str {
    if component < m {
        &entry.vector[component]
    } else {
        &entry.covector[component - m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
name = "demo"
dim = 2
coords = ["x", "y"]
box = [[-1.0, -1.0], [1.0, 1.0]]

[[frame]]
vector = ["1", "0"]
covector = ["0", "i"]

[[frame]]
vector = ["0", "1"]
covector = ["-i", "w + 1"]
"#;

    #[test]
    fn expression_errors_point_into_the_file() {
        let f = FieldFile::parse(SAMPLE, "demo.field").unwrap();
        let err = f.to_spec(SAMPLE, "demo.field", 1e-9).unwrap_err();
        assert_eq!(err.line, Some(13));
        assert_eq!(err.column, Some(20));
        assert!(err.to_string().starts_with("demo.field:13:20: frame[1].covector[1]"));
    }

    #[test]
    fn toml_and_json_agree() {
        let text = SAMPLE.replace("w + 1", "0");
        let f = FieldFile::parse(&text, "a").unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(FieldFile::parse(&json, "b").unwrap(), f);
        let again = FieldFile::parse(&f.to_toml(&["comment"]), "c").unwrap();
        assert_eq!(again, f);
        assert_eq!(f.domain().unwrap().unwrap().lo, vec![-1.0, -1.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = FieldFile::parse("dim = 1\ncoords = [\"x\"]\nfram = []\n", "bad").unwrap_err();
        assert!(err.line.is_some());
    }
}
