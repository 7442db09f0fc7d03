//! Deterministic JSON output: floats serialized in scientific notation with
//! 17 significant digits, so identical inputs give byte-identical output.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

pub struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.7e}")
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser).expect("serialization cannot fail");
    String::from_utf8(out).expect("json is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(to_json_string(&1.0f64), "1.0000000000000000e0");
        assert_eq!(to_json_string(&0.0f64), "0.0000000000000000e0");
        assert_eq!(to_json_string(&-0.5f64), "-5.0000000000000000e-1");
        let third = 1.0f64 / 3.0;
        assert_eq!(to_json_string(&third), "3.3333333333333331e-1");
    }

    #[test]
    fn round_trips_to_same_double() {
        for x in [1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 6.02214076e23] {
            let s = to_json_string(&x);
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back, x);
        }
    }
}
