//! Serializable run summary and its JSON/CSV renderings.

use std::io::Write;

use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::region::Bounds;
use crate::search::{EigenvalueEstimate, SearchOutcome};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueRecord {
    pub re: f64,
    pub im: f64,
    #[serde(rename = "box")]
    pub box_half_side: f64,
    pub indicator: f64,
    pub boundary: bool,
}

impl From<&EigenvalueEstimate> for EigenvalueRecord {
    fn from(e: &EigenvalueEstimate) -> Self {
        Self {
            re: e.value.re,
            im: e.value.im,
            box_half_side: e.box_half_side,
            indicator: e.indicator_value,
            boundary: e.boundary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub eigenvalues: Vec<EigenvalueRecord>,
    /// Seconds; only filled in on request so that repeated runs can be
    /// compared byte for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    pub factorizations_built: usize,
    pub node_solves: usize,
    pub regions_tested: usize,
    pub region: Bounds,
    pub config: Config,
}

impl RunReport {
    pub fn new(outcome: &SearchOutcome, region: Bounds, config: Config) -> Self {
        Self {
            eigenvalues: outcome.estimates.iter().map(EigenvalueRecord::from).collect(),
            wall_time: None,
            factorizations_built: outcome.counters.factorizations,
            node_solves: outcome.counters.node_solves,
            regions_tested: outcome.counters.regions,
            region,
            config,
        }
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| Error::Io(e.into()))?;
        writeln!(out)?;
        Ok(())
    }

    /// One row per eigenvalue under the header `re,im,box,indicator,boundary`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.eigenvalues.is_empty() {
            w.write_record(["re", "im", "box", "indicator", "boundary"])
                .map_err(csv_error)?;
        }
        for e in &self.eigenvalues {
            w.serialize(e).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cache::CounterSnapshot;
    use crate::linalg::C64;

    fn outcome() -> SearchOutcome {
        SearchOutcome {
            estimates: vec![EigenvalueEstimate {
                value: C64::new(1.0, -0.5),
                box_half_side: 3.0e-10,
                indicator_value: 0.99,
                depth: 31,
                boundary: false,
            }],
            counters: CounterSnapshot {
                factorizations: 1,
                bases: 1,
                node_solves: 80,
                regions: 10,
            },
            regions: Vec::new(),
            shifts: vec![C64::new(0.0, 0.0)],
        }
    }

    fn bounds() -> Bounds {
        Bounds::new(0.0, 2.0, -1.0, 1.0).unwrap()
    }

    #[test]
    fn json_field_names() {
        let report = RunReport::new(&outcome(), bounds(), Config::default());
        let mut buf = Vec::new();
        report.write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let e = &v["eigenvalues"][0];
        assert_eq!(e["re"], 1.0);
        assert_eq!(e["im"], -0.5);
        assert_eq!(e["box"], 3.0e-10);
        assert_eq!(e["boundary"], false);
        assert_eq!(v["factorizations_built"], 1);
        assert_eq!(v["node_solves"], 80);
        assert_eq!(v["regions_tested"], 10);
        assert_eq!(v["config"]["m"], 50);
        assert!(v.get("wall_time").is_none());
    }

    #[test]
    fn floats_round_trip() {
        let mut o = outcome();
        o.estimates[0].value = C64::new(0.1 + 0.2, 1.0 / 3.0);
        let report = RunReport::new(&o, bounds(), Config::default());
        let mut buf = Vec::new();
        report.write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["eigenvalues"][0]["re"].as_f64().unwrap(), 0.1 + 0.2);
        assert_eq!(v["eigenvalues"][0]["im"].as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn csv_layout() {
        let report = RunReport::new(&outcome(), bounds(), Config::default());
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("re,im,box,indicator,boundary"));
        assert_eq!(lines.next(), Some("1.0,-0.5,3e-10,0.99,false"));
        assert_eq!(lines.next(), None);

        let mut empty = outcome();
        empty.estimates.clear();
        let mut buf = Vec::new();
        RunReport::new(&empty, bounds(), Config::default()).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "re,im,box,indicator,boundary\n");
    }
}
