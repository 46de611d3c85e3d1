//! Plain-text matrix files.
//!
//! ```text
//! # comment
//! matrix A 2 1
//! 1.0
//! 1.0
//! matrix B 1 2
//! 1.0 0.0
//! matrix C 2 2
//! 2.0 1.0
//! 2.0 1.0
//! ```
//!
//! Values are written in Rust's shortest round-trip decimal form, so reading
//! back a written file reproduces every entry bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::transforms::ProblemInstance;

/// Named matrices in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InstanceFile {
    pub matrices: Vec<(String, DenseMatrix)>,
}

impl InstanceFile {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        Self {
            matrices: vec![
                ("A".to_owned(), inst.a().clone()),
                ("B".to_owned(), inst.b().clone()),
                ("C".to_owned(), inst.c().clone()),
            ],
        }
    }

    pub fn push(&mut self, name: impl Into<String>, m: DenseMatrix) {
        self.matrices.push((name.into(), m));
    }

    pub fn get(&self, name: &str) -> Option<&DenseMatrix> {
        self.matrices.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn to_instance(&self) -> Result<ProblemInstance> {
        let pick = |name: &str| {
            self.get(name).cloned().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("missing matrix {name}"),
            })
        };
        ProblemInstance::new(pick("A")?, pick("B")?, pick("C")?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut file = InstanceFile::default();
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        while let Some((lineno, header)) = lines.next() {
            let parts: Vec<&str> = header.split_whitespace().collect();
            let (name, rows, cols) = match parts.as_slice() {
                ["matrix", name, r, c] => (*name, parse_count(r, lineno)?, parse_count(c, lineno)?),
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("expected `matrix <name> <rows> <cols>`, got `{header}`"),
                    })
                }
            };
            if file.get(name).is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("duplicate matrix {name}"),
                });
            }
            let mut data = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                let (ln, row) = lines.next().ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: format!("matrix {name}: expected {rows} rows, found {r}"),
                })?;
                let before = data.len();
                for tok in row.split_whitespace() {
                    let v: f64 = tok.parse().map_err(|_| Error::Parse {
                        line: ln,
                        message: format!("invalid number `{tok}`"),
                    })?;
                    if !v.is_finite() {
                        return Err(Error::Parse {
                            line: ln,
                            message: format!("non-finite value `{tok}`"),
                        });
                    }
                    data.push(v);
                }
                if data.len() - before != cols {
                    return Err(Error::Parse {
                        line: ln,
                        message: format!("matrix {name}: expected {cols} values, found {}", data.len() - before),
                    });
                }
            }
            let m = DenseMatrix::from_row_major(rows, cols, data).map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            file.push(name, m);
        }
        Ok(file)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, m) in &self.matrices {
            out.push_str(&render_matrix(name, m));
        }
        out
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

fn parse_count(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid dimension `{tok}`"),
    })
}

/// Shortest decimal text that parses back to exactly `v`.
pub fn format_value(v: f64) -> String {
    format!("{v:?}")
}

/// One `matrix <name> <rows> <cols>` block.
pub fn render_matrix(name: &str, m: &DenseMatrix) -> String {
    let mut out = format!("matrix {name} {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&v| format_value(v)).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn read_instance(path: &Path) -> Result<ProblemInstance> {
    InstanceFile::read(path)?.to_instance()
}
