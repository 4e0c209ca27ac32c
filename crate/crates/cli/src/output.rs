//! Artifacts with provenance headers, rendered as CSV or JSON.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn value(&self) -> Value {
        match self {
            Cell::F(v) => json!(v),
            Cell::I(v) => json!(v),
            Cell::S(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

/// Seventeen significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone)]
pub enum Body {
    Table { columns: Vec<String>, rows: Vec<Vec<Cell>> },
    Json(Value),
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    /// Short description of the emitted quantities.
    pub quantities: String,
    pub notes: Vec<(String, Cell)>,
    pub body: Body,
}

impl Artifact {
    pub fn table(name: &str, quantities: &str, columns: &[&str], rows: Vec<Vec<Cell>>) -> Self {
        Artifact {
            name: name.into(),
            quantities: quantities.into(),
            notes: vec![],
            body: Body::Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows },
        }
    }

    pub fn json(name: &str, quantities: &str, v: Value) -> Self {
        Artifact { name: name.into(), quantities: quantities.into(), notes: vec![], body: Body::Json(v) }
    }

    pub fn note(mut self, key: &str, v: impl Into<Cell>) -> Self {
        self.notes.push((key.into(), v.into()));
        self
    }
}

#[derive(Debug, Clone)]
pub struct Provenance {
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
}

pub fn render(a: &Artifact, p: &Provenance, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let Body::Table { columns, rows } = &a.body else {
                return Err(CliError::Config(format!("{} output is JSON only; use --format json", a.name)));
            };
            let mut out = String::new();
            out.push_str(&format!("# fermigas {}\n# config_sha256 {}\n# seed {}\n", p.version, p.config_sha256, p.seed));
            out.push_str(&format!("# quantities: {}\n", a.quantities));
            for (k, v) in &a.notes {
                out.push_str(&format!("# {k} = {}\n", v.text()));
            }
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(columns).map_err(|e| CliError::Config(e.to_string()))?;
            for r in rows {
                w.write_record(r.iter().map(Cell::text)).map_err(|e| CliError::Config(e.to_string()))?;
            }
            out.push_str(&String::from_utf8(w.into_inner().map_err(|e| CliError::Config(e.to_string()))?).expect("utf8"));
            Ok(out)
        }
        Format::Json => {
            let prov = json!({
                "version": p.version,
                "config_sha256": p.config_sha256,
                "seed": p.seed,
                "quantities": a.quantities,
            });
            let notes: Map<String, Value> = a.notes.iter().map(|(k, v)| (k.clone(), v.value())).collect();
            let mut obj = match &a.body {
                Body::Table { columns, rows } => {
                    let rows: Vec<Value> = rows.iter().map(|r| Value::Array(r.iter().map(Cell::value).collect())).collect();
                    json!({ "columns": columns, "rows": rows })
                }
                Body::Json(Value::Object(m)) => Value::Object(m.clone()),
                Body::Json(v) => json!({ "data": v }),
            };
            let m = obj.as_object_mut().expect("object");
            m.insert("provenance".into(), prov);
            if !notes.is_empty() {
                m.insert("notes".into(), Value::Object(notes));
            }
            Ok(serde_json::to_string_pretty(&obj).expect("serializable") + "\n")
        }
    }
}

/// Writes to stdout, to a file, or into a directory as `<name>.<ext>`.
pub fn emit(a: &Artifact, p: &Provenance, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = render(a, p, format)?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let io = |e: std::io::Error, path: &Path| CliError::Config(format!("cannot write {}: {e}", path.display()));
    match out {
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Config(e.to_string()))?;
        }
        Some(path) => {
            let is_dir = path.is_dir() || path.as_os_str().to_string_lossy().ends_with('/');
            let target = if is_dir {
                fs::create_dir_all(path).map_err(|e| io(e, path))?;
                path.join(format!("{}.{ext}", a.name))
            } else {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent).map_err(|e| io(e, parent))?;
                }
                path.to_path_buf()
            };
            fs::write(&target, text).map_err(|e| io(e, &target))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance { version: "0".into(), config_sha256: "abc".into(), seed: 3 }
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-30, -2.5e200] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(0.6), "5.9999999999999998e-1");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let a = Artifact::table("t", "x", &["a", "b"], vec![vec![1.5.into(), "u".into()]]).note("n", 2usize);
        let s = render(&a, &prov(), Format::Csv).unwrap();
        assert!(s.starts_with("# fermigas 0\n# config_sha256 abc\n# seed 3\n"));
        assert!(s.contains("# n = 2\n"));
        assert!(s.ends_with("a,b\n1.5000000000000000e0,u\n"));
    }

    #[test]
    fn json_object_keeps_fields() {
        let a = Artifact::json("p", "x", json!({"k": 1}));
        let v: Value = serde_json::from_str(&render(&a, &prov(), Format::Json).unwrap()).unwrap();
        assert_eq!(v["k"], 1);
        assert_eq!(v["provenance"]["seed"], 3);
        assert!(render(&a, &prov(), Format::Csv).is_err());
    }
}
