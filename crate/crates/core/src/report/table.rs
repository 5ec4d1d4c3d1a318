use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Marker written on the first metadata line of every CSV this tool emits.
pub const GENERATOR: &str = concat!("covert-cusum ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

/// A labeled rectangular result set, serialized as CSV with `#` metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    /// Ordered `key: value` pairs written as comment lines.
    pub metadata: Vec<(String, String)>,
}

/// Fixed 17-significant-digit rendering, exact on round trip.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl CurveTable {
    pub fn new(columns: Vec<Column>) -> Self {
        CurveTable {
            columns,
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.metadata.push((key.into(), value.into()));
        self
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::domain(
                "CurveTable",
                format!("row arity {} != {} columns", row.len(), self.columns.len()),
            ));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Uniform arity and nondecreasing first column.
    pub fn validate(&self) -> Result<()> {
        if self.rows.iter().any(|r| r.len() != self.columns.len()) {
            return Err(Error::domain("CurveTable", "ragged rows"));
        }
        let ordered = self.rows.windows(2).all(|w| w[0][0] <= w[1][0]);
        if !ordered {
            return Err(Error::domain("CurveTable", "rows not ordered by first column"));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        self.validate()?;
        let mut out = String::new();
        let _ = writeln!(out, "# generator: {GENERATOR}");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let units: Vec<&str> = self.columns.iter().map(|c| c.unit.as_str()).collect();
        let _ = writeln!(out, "# units: {}", units.join(","));

        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| format_real(v)))
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    /// Parse CSV written by [`CurveTable::to_csv`]. Anything else, and tables
    /// without data rows, are rejected.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut units = None;
        let mut generator = None;
        for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
            let Some((k, v)) = line.trim().split_once(':') else {
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            match k {
                "generator" => generator = Some(v.to_string()),
                "units" => units = Some(v.to_string()),
                _ => metadata.push((k.to_string(), v.to_string())),
            }
        }
        match generator {
            Some(g) if g.starts_with("covert-cusum") => {}
            _ => return Err(Error::Parse("missing covert-cusum generator line".into())),
        }

        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .clone();
        let units: Vec<String> = units
            .map(|u| u.split(',').map(str::to_string).collect())
            .unwrap_or_default();
        let columns = headers
            .iter()
            .enumerate()
            .map(|(i, name)| Column::new(name, units.get(i).cloned().unwrap_or_default()))
            .collect();
        let mut table = CurveTable {
            columns,
            rows: Vec::new(),
            metadata,
        };
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let row = rec
                .iter()
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("not a number: {f:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            table.push_row(row).map_err(|e| Error::Parse(e.to_string()))?;
        }
        if table.rows.is_empty() {
            return Err(Error::Parse("table has no data rows".into()));
        }
        Ok(table)
    }
}
