//! Tabular results and their csv, json and text renderings.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use treeshift::numerics::{Integer, Interval, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Scalar,
    /// Rendered as a `lo`/`hi` pair.
    Interval,
}

#[derive(Clone, Debug)]
pub enum Field {
    Null,
    Int(i64),
    Big(Integer),
    /// Always written as `num/den`.
    Rat(Rational),
    Iv(Interval),
    /// A natural logarithm (or a ratio of one), converted by `--log2`.
    Log(Interval),
    Text(String),
    Bool(bool),
}

pub fn rational_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Rewrites `d.ddde-N` as a positional decimal when the exponent is moderate.
pub fn plain_decimal(s: &str) -> String {
    let Some((mant, exp)) = s.split_once('e') else {
        return s.to_string();
    };
    let Ok(exp) = exp.parse::<i32>() else {
        return s.to_string();
    };
    if !(-30..=60).contains(&exp) {
        return s.to_string();
    }
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mant),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int}{frac}");
    let point = int.len() as i32 + exp;
    let body = if point <= 0 {
        format!("0.{}{digits}", "0".repeat((-point) as usize))
    } else if point as usize >= digits.len() {
        format!("{digits}{}", "0".repeat(point as usize - digits.len()))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

fn interval_pair(x: &Interval) -> (String, String) {
    let digits = x.full_digits();
    (plain_decimal(&x.lo_string(digits)), plain_decimal(&x.hi_string(digits)))
}

fn interval_text(x: &Interval) -> String {
    let (lo, hi) = interval_pair(x);
    format!("[{lo}, {hi}]")
}

pub fn interval_json(x: &Interval) -> Value {
    let (lo, hi) = interval_pair(x);
    json!({ "lo": lo, "hi": hi })
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub columns: Vec<(String, Kind)>,
    pub rows: Vec<Vec<Field>>,
    /// Extra top-level JSON members.
    pub meta: Map<String, Value>,
    /// Verification verdict; `false` maps to exit status 1.
    pub ok: bool,
    /// Lines sent to standard error after the report.
    pub diagnostics: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, columns: &[(&str, Kind)]) -> Self {
        Self {
            command,
            columns: columns.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
            rows: Vec::new(),
            meta: Map::new(),
            ok: true,
            diagnostics: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.meta.insert(key.to_string(), value);
    }
}

/// Applies `--log2` to every logarithmic field.
pub struct Renderer {
    pub log2: bool,
}

impl Renderer {
    fn convert(&self, f: &Field) -> Field {
        match f {
            Field::Log(x) if self.log2 => Field::Log(x / &Interval::ln2(x.prec())),
            other => other.clone(),
        }
    }

    fn scalar_text(f: &Field) -> String {
        match f {
            Field::Null => String::new(),
            Field::Int(v) => v.to_string(),
            Field::Big(z) => z.to_string(),
            Field::Rat(q) => rational_string(q),
            Field::Iv(x) | Field::Log(x) => interval_text(x),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
        }
    }

    fn json_value(f: &Field) -> Value {
        match f {
            Field::Null => Value::Null,
            Field::Int(v) => json!(v),
            // Big counts and rationals stay strings so no digits are lost.
            Field::Big(z) => json!(z.to_string()),
            Field::Rat(q) => json!(rational_string(q)),
            Field::Iv(x) | Field::Log(x) => interval_json(x),
            Field::Text(s) => json!(s),
            Field::Bool(b) => json!(b),
        }
    }

    pub fn render(&self, report: &Report, format: Format) -> Result<Vec<u8>, String> {
        let rows: Vec<Vec<Field>> = report
            .rows
            .iter()
            .map(|r| r.iter().map(|f| self.convert(f)).collect())
            .collect();
        match format {
            Format::Csv => self.csv(report, &rows),
            Format::Json => {
                let mut top = Map::new();
                top.insert("command".into(), json!(report.command));
                top.insert("ok".into(), json!(report.ok));
                top.insert("log_base".into(), json!(if self.log2 { "2" } else { "e" }));
                for (k, v) in &report.meta {
                    top.insert(k.clone(), v.clone());
                }
                let objs: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        Value::Object(
                            report
                                .columns
                                .iter()
                                .zip(r)
                                .map(|((name, _), f)| (name.clone(), Self::json_value(f)))
                                .collect(),
                        )
                    })
                    .collect();
                top.insert("rows".into(), Value::Array(objs));
                let mut out = serde_json::to_vec_pretty(&Value::Object(top)).map_err(|e| e.to_string())?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Text => Ok(self.text(report, &rows).into_bytes()),
        }
    }

    fn csv(&self, report: &Report, rows: &[Vec<Field>]) -> Result<Vec<u8>, String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = Vec::new();
        for (name, kind) in &report.columns {
            match kind {
                Kind::Scalar => header.push(name.clone()),
                Kind::Interval => {
                    header.push(format!("{name}.lo"));
                    header.push(format!("{name}.hi"));
                }
            }
        }
        w.write_record(&header).map_err(|e| e.to_string())?;
        for row in rows {
            let mut rec = Vec::with_capacity(header.len());
            for ((_, kind), f) in report.columns.iter().zip(row) {
                match (kind, f) {
                    (Kind::Interval, Field::Iv(x) | Field::Log(x)) => {
                        let (lo, hi) = interval_pair(x);
                        rec.push(lo);
                        rec.push(hi);
                    }
                    (Kind::Interval, Field::Rat(q)) => {
                        rec.push(rational_string(q));
                        rec.push(rational_string(q));
                    }
                    (Kind::Interval, other) => {
                        let s = Self::scalar_text(other);
                        rec.push(s.clone());
                        rec.push(s);
                    }
                    (Kind::Scalar, other) => rec.push(Self::scalar_text(other)),
                }
            }
            w.write_record(&rec).map_err(|e| e.to_string())?;
        }
        w.into_inner().map_err(|e| e.to_string())
    }

    fn text(&self, report: &Report, rows: &[Vec<Field>]) -> String {
        let header: Vec<String> = report.columns.iter().map(|(n, _)| n.clone()).collect();
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(Self::scalar_text).collect())
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain(std::iter::once(header[i].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: &[String]| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = String::new();
        out.push_str(&line(&header));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r));
            out.push('\n');
        }
        for (k, v) in &report.meta {
            out.push_str(&format!("# {k}: {}\n", text_meta(v)));
        }
        if self.log2 {
            out.push_str("# logarithms in base 2\n");
        }
        out
    }
}

fn text_meta(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("t", &[("n", Kind::Scalar), ("r", Kind::Scalar), ("h", Kind::Interval)]);
        r.push(vec![
            Field::Int(3),
            Field::Rat(Rational::from((25, 41))),
            Field::Log(Interval::ln2(64)),
        ]);
        r
    }

    #[test]
    fn csv_splits_intervals() {
        let out = Renderer { log2: false }.render(&sample(), Format::Csv).unwrap();
        let s = String::from_utf8(out).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("n,r,h.lo,h.hi"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..2], &["3", "25/41"]);
        assert!(row[2].starts_with("0.6931471805599453"));
        assert!(row[2] <= row[3]);
    }

    #[test]
    fn log2_converts_only_logs() {
        let out = Renderer { log2: true }.render(&sample(), Format::Json).unwrap();
        let v: Value = serde_json::from_slice(&out).unwrap();
        let h = &v["rows"][0]["h"];
        let lo: f64 = h["lo"].as_str().unwrap().parse().unwrap();
        let hi: f64 = h["hi"].as_str().unwrap().parse().unwrap();
        assert!(lo <= 1.0 && 1.0 <= hi, "{h}");
        assert_eq!(v["rows"][0]["r"], "25/41");
        assert_eq!(v["log_base"], "2");
    }

    #[test]
    fn decimals_are_positional() {
        assert_eq!(plain_decimal("5.0888e-1"), "0.50888");
        assert_eq!(plain_decimal("-1.25e-3"), "-0.00125");
        assert_eq!(plain_decimal("4.1410e0"), "4.1410");
        assert_eq!(plain_decimal("2.306e3"), "2306");
        assert_eq!(plain_decimal("1.5e2"), "150");
        assert_eq!(plain_decimal("0"), "0");
        assert_eq!(plain_decimal("1.0e-400"), "1.0e-400");
    }

    #[test]
    fn rationals_keep_unit_denominator() {
        assert_eq!(rational_string(&Rational::from(5)), "5/1");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("o.txt");
        std::fs::write(&p, "old").unwrap();
        write_atomic(&p, b"new").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "new");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
