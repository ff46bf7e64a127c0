use std::io::Write;

use crate::{Error, Result};

/// A record that knows its CSV header and row rendering. Floating-point
/// fields are rendered with enough significant digits to round-trip.
pub trait CsvRecord {
    fn header() -> &'static str;
    fn row(&self) -> String;
}

/// Render a float with at least 10 significant digits, deterministically.
pub fn fmt_f64(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v:.12e}")
    }
}

/// Write header plus one row per record; byte output is a pure function of
/// the records.
pub fn emit_csv<T: CsvRecord>(records: &[T], path: &str) -> Result<()> {
    let mut out = String::new();
    out.push_str(T::header());
    out.push('\n');
    for r in records {
        out.push_str(&r.row());
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    file.write_all(out.as_bytes()).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rec(f64, u64);

    impl CsvRecord for Rec {
        fn header() -> &'static str {
            "x,count"
        }
        fn row(&self) -> String {
            format!("{},{}", fmt_f64(self.0), self.1)
        }
    }

    #[test]
    fn header_only_and_row_counts() {
        let dir = std::env::temp_dir();
        let path = dir.join("dstc_csv_test.csv");
        let path = path.to_str().unwrap();

        emit_csv::<Rec>(&[], path).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, "x,count\n");

        emit_csv(&[Rec(0.5, 3)], path).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().count(), 2);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn deterministic_bytes_and_precision() {
        let dir = std::env::temp_dir();
        let a = dir.join("dstc_csv_a.csv");
        let b = dir.join("dstc_csv_b.csv");
        let recs = vec![Rec(1.0 / 3.0, 1), Rec(2.5e-11, 2)];
        emit_csv(&recs, a.to_str().unwrap()).unwrap();
        emit_csv(&recs, b.to_str().unwrap()).unwrap();
        let ta = std::fs::read(&a).unwrap();
        let tb = std::fs::read(&b).unwrap();
        assert_eq!(ta, tb);
        let text = String::from_utf8(ta).unwrap();
        // 10+ significant digits survive
        assert!(text.contains("3.333333333333e-1"));
        std::fs::remove_file(a).ok();
        std::fs::remove_file(b).ok();
    }

    #[test]
    fn io_failure_carries_path() {
        let err = emit_csv::<Rec>(&[], "/nonexistent-dir/x.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
