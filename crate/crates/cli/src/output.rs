//! Deterministic JSON/CSV emission and atomic file writes.
//!
//! Every float is printed as `{:.16e}` (17 significant digits), the same
//! string in both formats, so values round-trip exactly and CSV/JSON
//! encodings of one run carry identical numerics.

use std::io::Write;
use std::path::Path;

use crate::config::CliError;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Flat JSON object with insertion-ordered, pre-rendered values.
#[derive(Debug, Clone, Default)]
pub struct JsonObject {
    fields: Vec<(String, String)>,
}

impl JsonObject {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn raw(mut self, key: &str, rendered: String) -> Self {
        self.fields.push((key.to_string(), rendered));
        self
    }

    pub fn num(self, key: &str, value: f64) -> Self {
        self.raw(key, fmt_f64(value))
    }

    pub fn opt_num(self, key: &str, value: Option<f64>) -> Self {
        match value {
            Some(v) => self.num(key, v),
            None => self.raw(key, "null".into()),
        }
    }

    pub fn int(self, key: &str, value: u64) -> Self {
        self.raw(key, value.to_string())
    }

    pub fn boolean(self, key: &str, value: bool) -> Self {
        self.raw(key, if value { "true" } else { "false" }.into())
    }

    pub fn string(self, key: &str, value: &str) -> Self {
        self.raw(key, format!("\"{}\"", json_escape(value)))
    }

    pub fn object(self, key: &str, value: JsonObject) -> Self {
        let rendered = value.render();
        self.raw(key, rendered)
    }

    pub fn render(&self) -> String {
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("\"{}\":{}", json_escape(k), v))
            .collect();
        format!("{{{}}}", body.join(","))
    }
}

pub fn render_json_array(items: &[JsonObject]) -> String {
    let mut out = String::from("[\n");
    for (i, item) in items.iter().enumerate() {
        out.push_str("  ");
        out.push_str(&item.render());
        if i + 1 < items.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}

/// RFC-4180-style CSV: header row, `,` separator, LF endings; fields here are
/// numeric or simple tokens, so no quoting is ever needed.
pub fn render_csv(header: &[&str], rows: &[Vec<String>], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Write through a temp file and rename, so failed runs leave no partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Emit to the chosen sink: file (atomic) or stdout.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
