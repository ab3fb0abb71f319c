//! Deterministic numeric formatting for reports: every real is rendered in
//! scientific notation with 12 significant digits, so identical inputs
//! produce byte-identical output.

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

/// Format a real with 12 significant digits. Negative zero collapses to zero.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

struct Sig12Formatter;

impl Formatter for Sig12Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        writer.write_all(sig12(value).as_bytes())
    }
}

/// Serialize a JSON value compactly with [`sig12`] real formatting.
pub fn to_json_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig12Formatter);
    value
        .serialize(&mut ser)
        .expect("serializing an in-memory JSON value cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
