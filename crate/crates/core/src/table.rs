//! Labelled numeric tables and their CSV form.
//!
//! Every CSV starts with `# key=value` provenance lines, then one column
//! name row, then data. Integral values below 2^53 print as integers; all
//! other numbers print in scientific notation with 17 significant digits
//! (`{:.16e}`), which round-trips every `f64` exactly. Non-finite values
//! print as `nan`, `inf` or `-inf`.

use crate::error::{Error, Result};

pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if v.fract() == 0.0 && v.abs() < 9.007_199_254_740_992e15 {
        format!("{}", v as i64)
    } else {
        format!("{:.16e}", v)
    }
}

/// Reads the leading `# key=value` lines. Lines without `=` are ignored.
pub fn parse_provenance(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map(str::trim)
        .take_while(|l| l.starts_with('#') || l.is_empty())
        .filter_map(|l| l.trim_start_matches('#').trim().split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

/// An `(x, y1..yk)` table with a provenance block.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    name: String,
    x_label: String,
    x: Vec<f64>,
    columns: Vec<(String, Vec<f64>)>,
    provenance: Vec<(String, String)>,
}

impl SeriesTable {
    pub fn new(name: impl Into<String>, x_label: impl Into<String>, x: Vec<f64>) -> Result<Self> {
        if let Some(w) = x.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::Config(format!(
                "table x values must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self {
            name: name.into(),
            x_label: x_label.into(),
            x,
            columns: Vec::new(),
            provenance: Vec::new(),
        })
    }

    pub fn push_column(&mut self, label: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let label = label.into();
        if values.len() != self.x.len() {
            return Err(Error::Config(format!(
                "column `{label}` has {} rows, table `{}` has {}",
                values.len(),
                self.name,
                self.x.len()
            )));
        }
        self.columns.push((label, values));
        Ok(())
    }

    pub fn with_provenance(mut self, entries: &[(String, String)]) -> Self {
        self.provenance.extend_from_slice(entries);
        self
    }

    pub fn add_provenance(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.provenance.push((key.into(), value.into()));
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn x_label(&self) -> &str {
        &self.x_label
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| v.as_slice())
    }

    pub fn provenance(&self) -> &[(String, String)] {
        &self.provenance
    }

    pub fn provenance_value(&self, key: &str) -> Option<&str> {
        self.provenance
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# table={}\n", self.name));
        for (k, v) in &self.provenance {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.x_label);
        for (label, _) in &self.columns {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for (i, x) in self.x.iter().enumerate() {
            out.push_str(&format_number(*x));
            for (_, values) in &self.columns {
                out.push(',');
                out.push_str(&format_number(values[i]));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_ragged_and_unordered_tables() {
        assert!(SeriesTable::new("t", "x", vec![0.0, 0.0]).is_err());
        assert!(SeriesTable::new("t", "x", vec![1.0, 0.5]).is_err());
        let mut t = SeriesTable::new("t", "x", vec![0.0, 1.0]).unwrap();
        assert!(t.push_column("y", vec![1.0]).is_err());
        assert!(t.push_column("y", vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn csv_layout() {
        let mut t = SeriesTable::new("demo", "x", vec![0.0, 0.5]).unwrap();
        t.push_column("y", vec![1.0, f64::NAN]).unwrap();
        t.add_provenance("seed", "42");
        let csv = t.to_csv();
        assert_eq!(
            csv,
            "# table=demo\n# seed=42\nx,y\n0,1\n5.0000000000000000e-1,nan\n"
        );
        let prov = parse_provenance(&csv);
        assert_eq!(prov[0], ("table".to_string(), "demo".to_string()));
        assert_eq!(prov[1], ("seed".to_string(), "42".to_string()));
    }

    proptest! {
        #[test]
        fn numbers_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let text = format_number(v);
            let back: f64 = text.parse().unwrap();
            prop_assert_eq!(back, v);
        }
    }
}
