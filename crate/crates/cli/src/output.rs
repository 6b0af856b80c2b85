//! Reports, CSV grid dumps and atomic file writes.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use pso_core::matops::CMat;
use pso_core::psocheck::{CheckEntry, Verdict};
use serde::Serialize;

use crate::checks::CheckId;

#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub verdict: Verdict,
    pub max_residual: f64,
    pub tolerance: f64,
    pub witness: Option<String>,
    pub wall_time_ms: u64,
    pub certifies: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl CheckRecord {
    pub fn new(id: CheckId, entry: CheckEntry, wall_time_ms: u64) -> Self {
        Self {
            id: entry.id,
            verdict: entry.verdict,
            max_residual: entry.max_residual,
            tolerance: entry.tolerance,
            witness: entry.witness,
            wall_time_ms,
            certifies: id.certifies(),
            failures: entry.failures,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub version: &'static str,
    pub model: String,
    pub checks: Vec<CheckRecord>,
    pub overall: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Set when a check could not be completed; later checks were skipped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn overall_of(checks: &[CheckRecord]) -> Verdict {
        if checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if checks.iter().all(|c| c.verdict == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn first_non_passing(&self) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.verdict != Verdict::Pass)
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV of `(Re lambda, Im lambda, Re/Im of every Theta entry)`, row-major in
/// the entries.
pub fn theta_csv(rows: &[(Complex64, CMat<f64>)]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let m = rows.first().map_or(0, |(_, t)| t.nrows());
    let mut header = vec!["re_lambda".to_string(), "im_lambda".to_string()];
    for r in 1..=m {
        for c in 1..=m {
            header.push(format!("re_theta_{r}_{c}"));
            header.push(format!("im_theta_{r}_{c}"));
        }
    }
    w.write_record(&header)?;
    for (l, t) in rows {
        let mut rec = vec![sig17(l.re), sig17(l.im)];
        for r in 0..m {
            for c in 0..m {
                rec.push(sig17(t[(r, c)].re));
                rec.push(sig17(t[(r, c)].im));
            }
        }
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(sig17(0.1), "1.0000000000000001e-1");
        assert_eq!(sig17(-2.0).parse::<f64>().unwrap(), -2.0);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![(
            Complex64::new(0.0, 1.0),
            CMat::from_element(1, 1, Complex64::new(0.5, -0.25)),
        )];
        let text = String::from_utf8(theta_csv(&rows).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "re_lambda,im_lambda,re_theta_1_1,im_theta_1_1"
        );
        let vals: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(vals, vec![0.0, 1.0, 0.5, -0.25]);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
