//! JSON and CSV serialization of [`RunReport`].
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly. JSON is one compact document. CSV is one
//! row per step, scan point, outcome or population, depending on the
//! command:
//!
//! | command          | header |
//! |------------------|--------|
//! | `exact`          | `outcome,populations,numerator,denominator,value` |
//! | `simulate`       | `outcome,p_hat,stderr,n,expected` |
//! | `drain`          | `step,population,p_1..p_8,remaining_1..remaining_8,p_ab` |
//! | `quantum`        | `theta,lhs,rhs,violated` (theta in degrees) |
//! | `entropy`        | `population,omega,entropy,entropy_ratio` |
//! | `counterexample` | `population,omega` |

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use super::{Format, ReportError, Results, RunReport};
use crate::model::{outcome_populations, OUTCOME_AB};

struct SignificantDigits;

impl serde_json::ser::Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", num(value))
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits);
    value.serialize(&mut ser).expect("report types serialize infallibly");
    String::from_utf8(buf).expect("serde_json emits utf-8")
}

pub fn to_json(report: &RunReport) -> String {
    json_string(report)
}

/// The `results` object alone, in the same encoding as [`to_json`].
pub fn results_json(report: &RunReport) -> String {
    json_string(&report.results)
}

fn headers(results: &Results) -> Vec<String> {
    let fixed = |h: &[&str]| h.iter().map(|s| s.to_string()).collect();
    match results {
        Results::Exact(_) => fixed(&["outcome", "populations", "numerator", "denominator", "value"]),
        Results::Simulate(_) => fixed(&["outcome", "p_hat", "stderr", "n", "expected"]),
        Results::Drain(_) => {
            let mut h = vec!["step".to_string(), "population".to_string()];
            h.extend((1..=8).map(|i| format!("p_{i}")));
            h.extend((1..=8).map(|i| format!("remaining_{i}")));
            h.push("p_ab".into());
            h
        }
        Results::Quantum(_) => fixed(&["theta", "lhs", "rhs", "violated"]),
        Results::Entropy(_) => fixed(&["population", "omega", "entropy", "entropy_ratio"]),
        Results::Counterexample(_) => fixed(&["population", "omega"]),
    }
}

fn rows(results: &Results) -> Vec<Vec<String>> {
    match results {
        Results::Exact(e) => e
            .probabilities
            .iter()
            .map(|p| {
                let pops: Vec<String> = p.populations.indices().iter().map(|i| i.to_string()).collect();
                vec![
                    p.outcome.to_string(),
                    pops.join(" "),
                    p.exact.numerator.to_string(),
                    p.exact.denominator.to_string(),
                    num(p.value),
                ]
            })
            .collect(),
        Results::Simulate(s) => s
            .estimates
            .iter()
            .map(|e| {
                vec![
                    e.outcome.to_string(),
                    num(e.p_hat),
                    num(e.stderr),
                    e.n.to_string(),
                    num(e.expected),
                ]
            })
            .collect(),
        Results::Drain(d) => {
            let ab = outcome_populations(OUTCOME_AB);
            d.trajectory
                .iter()
                .map(|r| {
                    let mut row = vec![r.step.to_string(), r.population.index().to_string()];
                    row.extend(r.conditional_probabilities.iter().map(|&p| num(p)));
                    let rem = r.remaining.map(|t| t.counts()).unwrap_or_default();
                    row.extend(rem.iter().map(|c| c.to_string()));
                    let p_ab: f64 = ab.iter().map(|p| r.conditional_probabilities[p.index() - 1]).sum();
                    row.push(num(p_ab));
                    row
                })
                .collect()
        }
        Results::Quantum(q) => q
            .scan
            .iter()
            .map(|p| vec![num(p.theta), num(p.lhs), num(p.rhs), p.violated.to_string()])
            .collect(),
        Results::Entropy(e) => (0..8)
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    num(e.omegas.omegas()[i]),
                    num(e.entropies[i]),
                    e.entropy_ratios.map(|r| num(r[i])).unwrap_or_default(),
                ]
            })
            .collect(),
        Results::Counterexample(c) => match &c.found {
            Some(f) => f
                .omegas
                .omegas()
                .iter()
                .enumerate()
                .map(|(i, w)| vec![(i + 1).to_string(), num(*w)])
                .collect(),
            None => Vec::new(),
        },
    }
}

pub fn to_csv(report: &RunReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // Writing into a Vec cannot fail.
    w.write_record(headers(&report.results)).unwrap();
    for row in rows(&report.results) {
        w.write_record(row).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

pub fn emit(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
    }
}

/// Writes to `out`, or stdout when `None`.
pub fn write_report(report: &RunReport, format: Format, out: Option<&Path>) -> Result<(), ReportError> {
    let mut text = emit(report, format);
    if format == Format::Json {
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| ReportError::Io(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| ReportError::Io(format!("stdout: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{run, DrainResults, PartialConfig};
    use crate::reservoir::DivergenceReport;

    fn report(json: &str) -> RunReport {
        run(&PartialConfig::from_json(json).unwrap().resolve().unwrap()).unwrap()
    }

    #[test]
    fn number_format() {
        assert_eq!(num(0.25), "2.5000000000000000e-1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        for json in [
            r#"{"command":"exact","table":[1,2,3,4,5,6,7,8]}"#,
            r#"{"command":"quantum","samples":1000,"steps":2,"axes":{"spacing_deg":33}}"#,
            r#"{"command":"drain","table":[2,1,0,0,0,0,0,1],"ensemble":3}"#,
            r#"{"command":"entropy","omegas":[1,0.5,2,3,1,1,0.25,9]}"#,
            r#"{"command":"counterexample","samples":100}"#,
            r#"{"command":"simulate","samples":100}"#,
        ] {
            let r = report(json);
            let text = to_json(&r);
            let back: RunReport = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r, "{json}");
            assert_eq!(to_json(&back), text, "{json}");
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
            assert_eq!(keys, ["config", "meta", "results"]);
        }
    }

    #[test]
    fn empty_trajectory_csv_is_header_only() {
        let mut r = report(r#"{"command":"drain","table":[1,0,0,0,0,0,0,0],"ensemble":1}"#);
        r.results = Results::Drain(DrainResults {
            trajectory: vec![],
            final_probability: 0.0,
            divergence: DivergenceReport {
                draws: 0,
                infinite_probability: 0.0,
                per_seed: vec![],
                mean_max_deviation: 0.0,
            },
        });
        let csv = to_csv(&r);
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("step,population,p_1,"));
        assert!(csv.trim_end().ends_with("remaining_8,p_ab"));
    }

    #[test]
    fn quantum_scan_csv() {
        let r = report(r#"{"command":"quantum","samples":10,"steps":3,"axes":{"spacing_deg":30}}"#);
        let csv = to_csv(&r);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "theta,lhs,rhs,violated");
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(fields[0], "6.0000000000000000e1");
        assert!((fields[1].parse::<f64>().unwrap() - 0.375).abs() < 1e-12);
        assert_eq!(fields[3], "true");
    }

    #[test]
    fn drain_csv_rows() {
        let r = report(r#"{"command":"drain","table":[2,1,0,0,0,0,0,0],"ensemble":2}"#);
        let csv = to_csv(&r);
        assert_eq!(csv.lines().count(), 4);
        let last = csv.lines().last().unwrap();
        assert!(last.starts_with("3,"));
        assert!(last.contains("1.0000000000000000e0"));
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let r = report(r#"{"command":"exact"}"#);
        let err = write_report(&r, Format::Json, Some(Path::new("/nonexistent-dir/x/y.json"))).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
