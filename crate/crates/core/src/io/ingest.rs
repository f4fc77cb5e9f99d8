use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::surv::{Observation, Sample};

/// Rows read and rows skipped during ingestion.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub rows_read: usize,
    /// `(line, reason)` of each skipped row.
    pub rejected: Vec<(u64, String)>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub labels: [String; 2],
    pub sample1: Sample,
    pub sample2: Sample,
    pub summary: IngestSummary,
}

fn is_missing(s: &str) -> bool {
    matches!(s, "" | "NA" | "na" | "NaN" | ".")
}

/// Reads two samples from a headed CSV file.
///
/// Rows with a missing time or status (`NA`, empty, `.`) are skipped and
/// reported in the summary; any other malformed value is an error naming the
/// line.
pub fn ingest_csv(path: &Path, config: &AnalysisConfig) -> Result<Dataset> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Input(format!("cannot open {}: {e}", path.display())))?;
    ingest_reader(file, path, config)
}

pub fn ingest_reader<R: Read>(reader: R, path: &Path, config: &AnalysisConfig) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Input(format!(
                "{}: no column {name:?} (columns: {})",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
    };
    let (gi, ti, si) = (
        column(&config.group_column)?,
        column(&config.time_column)?,
        column(&config.status_column)?,
    );

    let parse_err = |line: u64, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };

    let mut labels: Vec<String> = Vec::new();
    let mut rows: Vec<(usize, Observation)> = Vec::new();
    let mut summary = IngestSummary::default();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        summary.rows_read += 1;
        let field = |i: usize| record.get(i).unwrap_or("");
        let (group, time, status) = (field(gi), field(ti), field(si));

        if is_missing(time) || is_missing(status) {
            summary.rejected.push((line, "missing time or status".into()));
            continue;
        }
        if group.is_empty() {
            return Err(parse_err(line, "empty group label".into()));
        }
        let t: f64 = time
            .parse()
            .map_err(|_| parse_err(line, format!("time {time:?} is not a number")))?;
        if !t.is_finite() || t < 0.0 {
            return Err(parse_err(line, format!("time {time} must be a nonnegative number")));
        }
        let event = match status {
            "1" => true,
            "0" => false,
            other => {
                return Err(parse_err(
                    line,
                    format!("status {other:?} must be 1 (event) or 0 (censored)"),
                ))
            }
        };
        let idx = match labels.iter().position(|l| l == group) {
            Some(i) => i,
            None => {
                labels.push(group.to_string());
                labels.len() - 1
            }
        };
        rows.push((idx, Observation::new(t, event)?));
    }

    if labels.len() > 2 {
        return Err(Error::Input(format!(
            "{}: expected two groups in column {:?}, found {}: {}",
            path.display(),
            config.group_column,
            labels.len(),
            labels.join(", ")
        )));
    }

    let order: [String; 2] = match (&config.group1, &config.group2) {
        (Some(a), Some(b)) => {
            if let Some(extra) = labels.iter().find(|l| *l != a && *l != b) {
                return Err(Error::Input(format!(
                    "{}: group label {extra:?} is neither {a:?} nor {b:?} (found: {})",
                    path.display(),
                    labels.join(", ")
                )));
            }
            [a.clone(), b.clone()]
        }
        _ => match labels.as_slice() {
            [a, b] => [a.clone(), b.clone()],
            _ => {
                return Err(Error::Input(format!(
                    "{}: expected two groups, found {}",
                    path.display(),
                    if labels.is_empty() { "none".to_string() } else { labels.join(", ") }
                )))
            }
        },
    };

    let collect = |label: &str| -> Result<Sample> {
        let obs: Vec<Observation> = rows
            .iter()
            .filter(|(i, _)| labels[*i] == label)
            .map(|(_, o)| *o)
            .collect();
        if obs.is_empty() {
            return Err(Error::Input(format!(
                "{}: group {label:?} has no usable rows",
                path.display()
            )));
        }
        Sample::new(obs)
    };
    let sample1 = collect(&order[0])?;
    let sample2 = collect(&order[1])?;
    Ok(Dataset {
        labels: order,
        sample1,
        sample2,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> AnalysisConfig {
        AnalysisConfig {
            input: "mem.csv".into(),
            ..Default::default()
        }
    }

    fn ingest(text: &str, config: &AnalysisConfig) -> Result<Dataset> {
        ingest_reader(text.as_bytes(), Path::new("mem.csv"), config)
    }

    #[test]
    fn three_rows_two_groups() {
        let d = ingest("group,time,status\nA,1,1\nB,2,0\nA,3,0\n", &cfg()).unwrap();
        assert_eq!(d.labels, ["A".to_string(), "B".to_string()]);
        assert_eq!((d.sample1.len(), d.sample2.len()), (2, 1));
        assert_eq!(d.summary.rows_read, 3);
    }

    #[test]
    fn status_two_names_the_line() {
        let err = ingest("group,time,status\nA,1,1\nB,2,2\n", &cfg()).unwrap_err();
        match &err {
            Error::Parse { line, .. } => assert_eq!(*line, 3),
            other => panic!("{other:?}"),
        }
        assert_eq!(err.category(), "input");
    }

    #[test]
    fn three_labels_are_listed() {
        let msg = ingest("group,time,status\nA,1,1\nB,2,0\nC,3,1\n", &cfg())
            .unwrap_err()
            .to_string();
        assert!(msg.contains("A, B, C"), "{msg}");
    }

    #[test]
    fn configured_order_and_empty_group() {
        let c = AnalysisConfig {
            group1: Some("B".into()),
            group2: Some("A".into()),
            ..cfg()
        };
        let d = ingest("group,time,status\nA,1,1\nB,2,0\nA,3,0\n", &c).unwrap();
        assert_eq!(d.sample1.len(), 1);
        assert!(ingest("group,time,status\nA,1,1\n", &c).is_err());
    }

    #[test]
    fn missing_values_are_skipped_and_counted() {
        let d = ingest("group,time,status\nA,1,1\nA,NA,1\nB,2,\nB,4,1\n", &cfg()).unwrap();
        assert_eq!(d.summary.rejected.len(), 2);
        assert_eq!(d.summary.rejected[0].0, 3);
        assert_eq!(d.sample1.len() + d.sample2.len(), 2);
    }

    #[test]
    fn negative_time_rejected() {
        assert!(ingest("group,time,status\nA,-1,1\nB,2,0\n", &cfg()).is_err());
        assert!(ingest("group,time,status\nA,x,1\nB,2,0\n", &cfg()).is_err());
    }
}
