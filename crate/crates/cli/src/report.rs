//! Check reports and their JSON encoding.

use std::io;

use finsler::Point;
use serde::ser::Serialize;
use serde::Serialize as DeriveSerialize;
use serde_json::ser::Formatter;

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct WorstSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct CheckReport {
    pub check: String,
    pub max_abs_defect: f64,
    pub samples_used: usize,
    pub pass: bool,
    pub worst_sample: Option<WorstSample>,
}

impl CheckReport {
    /// `pass` is `max_abs_defect < tolerance`, so NaN never passes.
    pub fn new(
        check: impl Into<String>,
        max_abs_defect: f64,
        samples_used: usize,
        tolerance: f64,
        worst: Option<Point>,
    ) -> Self {
        CheckReport {
            check: check.into(),
            max_abs_defect,
            samples_used,
            pass: max_abs_defect < tolerance,
            worst_sample: worst.map(|p| WorstSample { x: p.x, y: p.y }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct Report {
    pub config: RunConfig,
    pub reports: Vec<CheckReport>,
}

impl Report {
    pub fn new(config: RunConfig, mut reports: Vec<CheckReport>) -> Self {
        reports.sort_by(|a, b| a.check.cmp(&b.check));
        Report { config, reports }
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

/// Compact JSON with every float written to 17 significant digits.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` as one line of JSON; non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_is_strict() {
        assert!(CheckReport::new("c", 0.5e-6, 1, 1e-6, None).pass);
        assert!(!CheckReport::new("c", 1e-6, 1, 1e-6, None).pass);
        assert!(!CheckReport::new("c", f64::NAN, 1, 1e-6, None).pass);
    }

    #[test]
    fn floats_have_seventeen_digits() {
        let r = CheckReport::new(
            "euler",
            0.1,
            3,
            1e-6,
            Some(Point::new(vec![0.0, 1.5], vec![1.0, -2.0])),
        );
        let s = to_json(&r);
        assert!(
            s.contains("\"max_abs_defect\":1.0000000000000001e-1"),
            "{s}"
        );
        assert!(
            s.contains("\"x\":[0.0000000000000000e0,1.5000000000000000e0]"),
            "{s}"
        );
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["max_abs_defect"].as_f64(), Some(0.1));
        assert_eq!(back["samples_used"].as_u64(), Some(3));
        let nan = to_json(&CheckReport::new("euler", f64::NAN, 3, 1e-6, None));
        assert!(nan.contains("\"max_abs_defect\":null"), "{nan}");
    }
}
