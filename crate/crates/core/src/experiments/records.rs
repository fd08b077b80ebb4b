use std::io::Write;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::{Error, Result};

/// One Monte Carlo block as persisted in the trial file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub block: u64,
    pub delta1: f64,
    pub delta2: f64,
    pub bits1: usize,
    pub bits2: usize,
    pub wraps1: usize,
    pub wraps2: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub mode: String,
    #[serde(rename = "D1")]
    pub d1: f64,
    #[serde(rename = "D2")]
    pub d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcdfRow {
    pub source: u8,
    #[serde(rename = "D")]
    pub d: f64,
    pub prob: f64,
}

pub const TRIAL_HEADER: [&str; 7] = ["block", "delta1", "delta2", "bits1", "bits2", "wraps1", "wraps2"];
pub const REGION_HEADER: [&str; 3] = ["mode", "D1", "D2"];
pub const CCDF_HEADER: [&str; 3] = ["source", "D", "prob"];

fn render<T: Serialize>(header: &[&str], rows: &[T]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn parse<T: DeserializeOwned>(header: &[&str], text: &str) -> Result<Vec<T>> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    if text.is_empty() {
        return Err(perr(1, "missing header row".into()));
    }
    if !text.ends_with('\n') {
        return Err(perr(text.lines().count(), "last row is not newline-terminated".into()));
    }
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let got = r.headers().map_err(|e| perr(1, e.to_string()))?;
    if got.iter().ne(header.iter().copied()) {
        return Err(perr(
            1,
            format!("header must be {}, got {}", header.join(","), got.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut out = Vec::new();
    for (k, row) in r.deserialize().enumerate() {
        out.push(row.map_err(|e: csv::Error| perr(k + 2, e.to_string()))?);
    }
    Ok(out)
}

fn finite_nonneg(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

pub fn render_trials(rows: &[TrialRecord]) -> String {
    render(&TRIAL_HEADER, rows)
}

pub fn parse_trials(text: &str) -> Result<Vec<TrialRecord>> {
    let rows: Vec<TrialRecord> = parse(&TRIAL_HEADER, text)?;
    for (k, r) in rows.iter().enumerate() {
        if !(finite_nonneg(r.delta1) && finite_nonneg(r.delta2)) {
            return Err(Error::Parse {
                line: k + 2,
                msg: "distortions must be finite and nonnegative".into(),
            });
        }
    }
    Ok(rows)
}

pub fn render_region(rows: &[RegionRow]) -> String {
    render(&REGION_HEADER, rows)
}

pub fn parse_region(text: &str) -> Result<Vec<RegionRow>> {
    let rows: Vec<RegionRow> = parse(&REGION_HEADER, text)?;
    for (k, r) in rows.iter().enumerate() {
        if r.mode.is_empty() || !(finite_nonneg(r.d1) && finite_nonneg(r.d2)) {
            return Err(Error::Parse {
                line: k + 2,
                msg: "rows need a label and finite nonnegative distortions".into(),
            });
        }
    }
    Ok(rows)
}

pub fn render_ccdf(rows: &[CcdfRow]) -> String {
    render(&CCDF_HEADER, rows)
}

pub fn parse_ccdf(text: &str) -> Result<Vec<CcdfRow>> {
    let rows: Vec<CcdfRow> = parse(&CCDF_HEADER, text)?;
    for (k, r) in rows.iter().enumerate() {
        if !(r.source == 1 || r.source == 2) || !r.d.is_finite() || !(0.0..=1.0).contains(&r.prob) {
            return Err(Error::Parse {
                line: k + 2,
                msg: "source must be 1 or 2, D finite and prob in [0, 1]".into(),
            });
        }
    }
    Ok(rows)
}

/// Writes `text` to `path`, reporting failures with the path.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trial_schema() {
        let r = TrialRecord {
            block: 3,
            delta1: 0.25,
            delta2: 1e-7,
            bits1: 256,
            bits2: 512,
            wraps1: 0,
            wraps2: 4,
        };
        let text = render_trials(&[r]);
        assert_eq!(text, "block,delta1,delta2,bits1,bits2,wraps1,wraps2\n3,0.25,1e-7,256,512,0,4\n");
        assert_eq!(parse_trials(&text).unwrap(), vec![r]);
        assert_eq!(render_trials(&[]), "block,delta1,delta2,bits1,bits2,wraps1,wraps2\n");
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let h = "block,delta1,delta2,bits1,bits2,wraps1,wraps2\n";
        assert!(parse_trials("").is_err());
        assert!(parse_trials(&h[..h.len() - 1]).is_err());
        assert!(parse_trials("block,delta2,delta1,bits1,bits2,wraps1,wraps2\n").is_err());
        assert!(parse_trials(&format!("{h}1,0.5,0.5,1,1,0,0")).is_err());
        assert!(parse_trials(&format!("{h}1,0.5,0.5,1,1,0\n")).is_err());
        assert!(parse_trials(&format!("{h}1,-0.5,0.5,1,1,0,0\n")).is_err());
        assert!(parse_trials(&format!("{h}1,NaN,0.5,1,1,0,0\n")).is_err());
        let e = parse_trials(&format!("{h}1,0.5,0.5,1,1,0,0\nx,0.5,0.5,1,1,0,0\n")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        assert!(parse_ccdf("source,D,prob\n3,0.1,0.5\n").is_err());
        assert!(parse_ccdf("source,D,prob\n1,0.1,1.5\n").is_err());
        assert!(parse_region("mode,D1,D2\n,0.1,0.5\n").is_err());
    }

    #[test]
    fn region_and_ccdf_schemas() {
        let rows = vec![
            RegionRow { mode: "frontier".into(), d1: 0.25, d2: 0.14453125 },
            RegionRow { mode: "case1".into(), d1: 0.372, d2: 0.198 },
        ];
        let text = render_region(&rows);
        assert!(text.starts_with("mode,D1,D2\nfrontier,0.25,0.14453125\n"));
        assert_eq!(parse_region(&text).unwrap(), rows);
        let c = vec![CcdfRow { source: 2, d: 0.5, prob: 0.125 }];
        let text = render_ccdf(&c);
        assert_eq!(text, "source,D,prob\n2,0.5,0.125\n");
        assert_eq!(parse_ccdf(&text).unwrap(), c);
    }

    proptest! {
        #[test]
        fn trials_round_trip(rows in prop::collection::vec(
            (any::<u64>(), 0.0..1e6f64, 0.0..1e6f64, 0..4096usize, 0..4096usize, 0..256usize, 0..256usize),
            0..20,
        )) {
            let recs: Vec<TrialRecord> = rows
                .into_iter()
                .map(|(block, delta1, delta2, bits1, bits2, wraps1, wraps2)| TrialRecord {
                    block, delta1, delta2, bits1, bits2, wraps1, wraps2,
                })
                .collect();
            prop_assert_eq!(parse_trials(&render_trials(&recs)).unwrap(), recs);
        }
    }
}
