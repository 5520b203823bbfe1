//! Tabulated values and their CSV / JSON encodings.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::config::Format;

/// A table of real or complex values over named grid coordinates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Grid {
    pub coords: Vec<String>,
    pub rows: Vec<GridRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub at: Vec<f64>,
    pub re: f64,
    pub im: f64,
}

impl Grid {
    pub fn new<S: Into<String>>(coords: impl IntoIterator<Item = S>) -> Self {
        Self {
            coords: coords.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, at: Vec<f64>, re: f64, im: f64) {
        debug_assert_eq!(at.len(), self.coords.len());
        self.rows.push(GridRow { at, re, im });
    }

    pub fn columns(&self) -> Vec<String> {
        let mut c = self.coords.clone();
        c.push("re".into());
        c.push("im".into());
        c
    }
}

#[derive(Serialize)]
struct JsonGrid {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// 17 significant digits: enough to round-trip every `f64`.
fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn emit_grid<W: Write + ?Sized>(grid: &Grid, format: Format, out: &mut W) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", grid.columns().join(","))?;
            for row in &grid.rows {
                let mut fields: Vec<String> = row.at.iter().map(|v| number(*v)).collect();
                fields.push(number(row.re));
                fields.push(number(row.im));
                writeln!(out, "{}", fields.join(","))?;
            }
        }
        Format::Json => {
            let doc = JsonGrid {
                columns: grid.columns(),
                rows: grid
                    .rows
                    .iter()
                    .map(|r| {
                        let mut v = r.at.clone();
                        v.push(r.re);
                        v.push(r.im);
                        v
                    })
                    .collect(),
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Encodes a grid into a string.
pub fn grid_to_string(grid: &Grid, format: Format) -> String {
    let mut buf = Vec::new();
    emit_grid(grid, format, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}
