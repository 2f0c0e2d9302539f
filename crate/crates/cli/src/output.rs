use std::io::Write;

use groupest::protocols::ProtocolReport;
use groupest::CoefficientVector;
use serde::Serialize;

/// Rounds to 15 significant digits so JSON and CSV carry the same numbers.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Serialize)]
pub struct Coefficients {
    pub labels: Vec<u32>,
    pub values: Vec<f64>,
}

impl From<&CoefficientVector> for Coefficients {
    fn from(v: &CoefficientVector) -> Self {
        Coefficients {
            labels: v.labels().iter().map(|l| l.0).collect(),
            values: v.values().iter().copied().map(round15).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Record {
    #[serde(rename = "N")]
    pub n: u32,
    pub min_cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    pub asymptote: f64,
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Coefficients>,
}

impl Record {
    pub fn from_report(r: &ProtocolReport, with_coefficients: bool) -> Self {
        Record {
            n: r.n,
            min_cost: round15(r.result.min_cost),
            fidelity: r.result.fidelity.map(round15),
            asymptote: round15(r.asymptote),
            ratio: round15(r.ratio),
            coefficients: with_coefficients.then(|| Coefficients::from(&r.result.coefficients)),
        }
    }
}

pub fn write_records<W: Write>(out: W, records: &[Record], format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => write_json(out, records),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["N", "min_cost", "fidelity", "asymptote", "ratio"])?;
            for r in records {
                w.write_record([
                    r.n.to_string(),
                    r.min_cost.to_string(),
                    r.fidelity.map(|f| f.to_string()).unwrap_or_default(),
                    r.asymptote.to_string(),
                    r.ratio.to_string(),
                ])?;
            }
            w.flush()
        }
    }
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}
