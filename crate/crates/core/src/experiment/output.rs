//! CSV aggregates and JSON-lines trial records.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{PointResult, TrialOutcome};

pub const CSV_HEADER: [&str; 10] = [
    "L", "p", "q", "N", "trials", "failures", "p_L", "ci_low", "ci_high", "seed",
];

pub fn write_csv<W: Write>(out: W, rows: &[PointResult]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> csv::Result<Vec<PointResult>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// One JSON line per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    #[serde(rename = "L")]
    pub size: usize,
    pub p: f64,
    pub q: f64,
    #[serde(rename = "N")]
    pub cycles: usize,
    #[serde(flatten)]
    pub trial: TrialOutcome,
}

pub fn write_jsonl<W: Write>(mut out: W, point: &PointResult, trials: &[TrialOutcome]) -> io::Result<()> {
    for t in trials {
        let rec = TrialRecord {
            size: point.size,
            p: point.p,
            q: point.q,
            cycles: point.cycles,
            trial: t.clone(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> PointResult {
        PointResult {
            size: 6,
            p: 0.2,
            q: 0.2,
            cycles: 1,
            trials: 100,
            failures: 7,
            p_l: 0.07,
            ci_low: 0.03,
            ci_high: 0.13,
            seed: 9,
            syndrome_failures: 0,
        }
    }

    #[test]
    fn csv_header_and_round_trip() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[row()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), vec![row()]);
    }
}
