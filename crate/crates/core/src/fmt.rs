//! Float formatting shared by the JSON and CSV writers.
//!
//! Every double leaves the process with 17 significant digits, which is
//! enough to round-trip any `f64` exactly.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

/// Formats a double with 17 significant digits (`1.2345678901234567e-3`).
pub fn f64_17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

#[derive(Default)]
struct Digits17(CompactFormatter);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            self.0.write_null(writer)
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as compact JSON with 17-significant-digit doubles.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> crate::Result<String> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, Digits17::default());
    value.serialize(&mut ser)?;
    String::from_utf8(out).map_err(|e| crate::Error::Format(e.to_string()))
}

/// Writes `value` as JSON (plus a trailing newline) to `path`.
pub fn write_json<T: Serialize + ?Sized>(path: &std::path::Path, value: &T) -> crate::Result<()> {
    let mut text = to_json(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, -0.0, f64::MIN_POSITIVE] {
            let s = f64_17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(f64_17(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn json_uses_fixed_digits() {
        let s = to_json(&vec![0.1f64, 2.0]).unwrap();
        assert_eq!(s, "[1.0000000000000001e-1,2.0000000000000000e0]");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, 2.0]);
    }
}
