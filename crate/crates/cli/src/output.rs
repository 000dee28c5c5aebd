use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::Value;

use crate::error::CliError;

/// Every float is written with 17 significant digits so it round-trips.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Compact JSON whose floats use [`fmt_f64`].
struct RoundTrip;

impl Formatter for RoundTrip {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            CompactFormatter.write_null(writer)
        }
    }
}

pub fn to_json(doc: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, RoundTrip);
    serde::Serialize::serialize(doc, &mut ser)
        .expect("serializing a Value into memory cannot fail");
    let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
    s.push('\n');
    s
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Number(n) => {
            let text = match (n.as_i64(), n.as_u64(), n.as_f64()) {
                (Some(i), _, _) => i.to_string(),
                (_, Some(u), _) => u.to_string(),
                (_, _, Some(f)) => fmt_f64(f),
                _ => n.to_string(),
            };
            out.push((prefix.to_string(), text));
        }
    }
}

/// A JSON document as a two-column `key,value` table with dotted keys.
pub fn to_key_value_csv(doc: &Value) -> Result<String, CliError> {
    let mut rows = Vec::new();
    flatten("", doc, &mut rows);
    let mut table = Table::new(&["key", "value"]);
    for (k, v) in rows {
        table.push_text(vec![k, v]);
    }
    table.finish()
}

/// CSV with `\n` line endings and [`fmt_f64`] floats.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer
            .write_record(header)
            .expect("writing to memory cannot fail");
        Self { writer }
    }

    pub fn push(&mut self, row: &[f64]) {
        self.push_text(row.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn push_text(&mut self, row: Vec<String>) {
        self.writer
            .write_record(&row)
            .expect("writing to memory cannot fail");
    }

    pub fn finish(self) -> Result<String, CliError> {
        let bytes = self
            .writer
            .into_inner()
            .map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut file =
        File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
