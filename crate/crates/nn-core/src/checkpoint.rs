//! The parameter checkpoint container.
//!
//! A checkpoint is a versioned, line-oriented text file holding named
//! tensors plus free-form string metadata. The layout is:
//!
//! ```text
//! nn-checkpoint v1
//! meta <key> <value until end of line>
//! tensor <name> <rows> <cols>
//! <row 0: cols entries separated by single spaces>
//! …
//! tensor <name> <rows> <cols>
//! …
//! end
//! ```
//!
//! Entries are written with Rust's shortest-round-trip `f64` formatting and
//! parsed back with `str::parse`, which reproduces the original bits
//! exactly (including negative zero, infinities and NaN). Files always use
//! `\n` line endings, so saving the same checkpoint twice yields identical
//! bytes.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::matrix::Matrix;

const HEADER: &str = "nn-checkpoint v1";

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("checkpoint I/O error")]
    Io(#[from] std::io::Error),
    #[error("malformed checkpoint at line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// An ordered collection of named tensors and metadata entries.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Checkpoint {
    meta: Vec<(String, String)>,
    tensors: Vec<(String, Matrix)>,
}

impl Checkpoint {
    pub fn new() -> Checkpoint {
        Checkpoint::default()
    }

    /// Adds or replaces a metadata entry. Keys must be single tokens;
    /// values must not contain line breaks. Violations are programmer
    /// errors and panic.
    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        assert!(
            !key.is_empty() && !key.contains(char::is_whitespace),
            "meta key {key:?} must be a single token"
        );
        assert!(
            !value.contains('\n') && !value.contains('\r'),
            "meta value for {key:?} must be a single line"
        );
        if let Some(entry) = self.meta.iter_mut().find(|(k, _)| k == key) {
            entry.1 = value;
        } else {
            self.meta.push((key.to_string(), value));
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn meta_entries(&self) -> &[(String, String)] {
        &self.meta
    }

    /// Appends a named tensor. Names must be single tokens and unique;
    /// violations panic (the writer controls the names).
    pub fn push_tensor(&mut self, name: &str, tensor: Matrix) {
        assert!(
            !name.is_empty() && !name.contains(char::is_whitespace),
            "tensor name {name:?} must be a single token"
        );
        assert!(
            self.tensor(name).is_none(),
            "duplicate tensor name {name:?}"
        );
        self.tensors.push((name.to_string(), tensor));
    }

    pub fn tensor(&self, name: &str) -> Option<&Matrix> {
        self.tensors.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn tensors(&self) -> &[(String, Matrix)] {
        &self.tensors
    }

    pub fn write_to(&self, out: &mut impl Write) -> Result<(), CheckpointError> {
        writeln!(out, "{HEADER}")?;
        for (key, value) in &self.meta {
            writeln!(out, "meta {key} {value}")?;
        }
        for (name, tensor) in &self.tensors {
            writeln!(out, "tensor {name} {} {}", tensor.rows(), tensor.cols())?;
            for r in 0..tensor.rows() {
                let mut line = String::new();
                for (c, v) in tensor.row(r).iter().enumerate() {
                    if c > 0 {
                        line.push(' ');
                    }
                    line.push_str(&format!("{v}"));
                }
                writeln!(out, "{line}")?;
            }
        }
        writeln!(out, "end")?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        let mut buffer = Vec::new();
        self.write_to(&mut buffer)?;
        std::fs::write(path, buffer)?;
        Ok(())
    }

    pub fn read_from(input: impl BufRead) -> Result<Checkpoint, CheckpointError> {
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            None => return Err(malformed(1, "empty file")),
            Some((_, line)) => line?,
        };
        if header != HEADER {
            return Err(malformed(
                1,
                format!("expected header {HEADER:?}, got {header:?}"),
            ));
        }

        let mut checkpoint = Checkpoint::new();
        let mut saw_end = false;
        while let Some((idx, line)) = lines.next() {
            let line_no = idx + 1;
            let line = line?;
            if line == "end" {
                saw_end = true;
                break;
            }
            if let Some(rest) = line.strip_prefix("meta ") {
                let (key, value) = rest
                    .split_once(' ')
                    .ok_or_else(|| malformed(line_no, "meta needs a key and a value"))?;
                if key.is_empty() {
                    return Err(malformed(line_no, "empty meta key"));
                }
                if checkpoint.meta(key).is_some() {
                    return Err(malformed(line_no, format!("duplicate meta key {key:?}")));
                }
                checkpoint.meta.push((key.to_string(), value.to_string()));
            } else if let Some(rest) = line.strip_prefix("tensor ") {
                let fields: Vec<&str> = rest.split(' ').collect();
                if fields.len() != 3 {
                    return Err(malformed(line_no, "tensor needs: name rows cols"));
                }
                let name = fields[0];
                if checkpoint.tensor(name).is_some() {
                    return Err(malformed(line_no, format!("duplicate tensor {name:?}")));
                }
                let rows: usize = fields[1]
                    .parse()
                    .map_err(|_| malformed(line_no, format!("bad row count {:?}", fields[1])))?;
                let cols: usize = fields[2]
                    .parse()
                    .map_err(|_| malformed(line_no, format!("bad column count {:?}", fields[2])))?;
                let mut tensor = Matrix::zeros(rows, cols);
                for r in 0..rows {
                    let (row_idx, row_line) = lines
                        .next()
                        .ok_or_else(|| malformed(line_no, "file ends inside a tensor"))?;
                    let row_line = row_line?;
                    let mut count = 0;
                    for (c, token) in row_line.split_whitespace().enumerate() {
                        if c >= cols {
                            count = c + 1;
                            break;
                        }
                        let value: f64 = token
                            .parse()
                            .map_err(|_| malformed(row_idx + 1, format!("bad entry {token:?}")))?;
                        tensor.set(r, c, value);
                        count = c + 1;
                    }
                    if count != cols {
                        return Err(malformed(
                            row_idx + 1,
                            format!("expected {cols} entries, got {count}"),
                        ));
                    }
                }
                checkpoint.tensors.push((name.to_string(), tensor));
            } else {
                return Err(malformed(line_no, format!("unrecognized line {line:?}")));
            }
        }
        if !saw_end {
            return Err(malformed(0, "missing end marker"));
        }
        Ok(checkpoint)
    }

    pub fn load(path: &Path) -> Result<Checkpoint, CheckpointError> {
        let file = std::fs::File::open(path)?;
        Checkpoint::read_from(std::io::BufReader::new(file))
    }
}

fn malformed(line: usize, message: impl Into<String>) -> CheckpointError {
    CheckpointError::Malformed {
        line,
        message: message.into(),
    }
}
