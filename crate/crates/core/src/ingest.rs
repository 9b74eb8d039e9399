//! CSV panels: one ISO-8601 date column and numeric value columns sharing it.

use std::path::Path;

use chrono::NaiveDate;
use crate::error::{Error, IngestError, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset {
    /// Where the panel was read from.
    pub source: String,
    pub dates: Vec<NaiveDate>,
    pub series: Vec<TimeSeries>,
}

impl PanelDataset {
    pub fn labels(&self) -> Vec<&str> {
        self.series.iter().map(TimeSeries::display_label).collect()
    }
}

/// Accepts `YYYY-MM-DD` and `YYYY-MM` (first of the month).
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .or_else(|| NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d").ok())
}

fn is_missing(s: &str) -> bool {
    matches!(s.to_ascii_lowercase().as_str(), "" | "na" | "nan" | "null" | "n/a")
}

/// Read `path`, taking dates from `date_column` and one series per entry of
/// `value_columns` (all other columns when `None`). Row numbers in errors are
/// file line numbers, the header being line 1.
pub fn ingest_csv(path: &Path, date_column: &str, value_columns: Option<&[String]>) -> Result<PanelDataset> {
    if value_columns.is_some_and(|v| v.is_empty()) {
        return Err(Error::invalid("no value columns selected"));
    }
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| IngestError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    for h in &header {
        if !seen.insert(h) {
            return Err(IngestError::DuplicateLabel(h.clone()).into());
        }
    }
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let date_idx = find(date_column)?;
    let selected: Vec<String> = match value_columns {
        Some(cols) => cols.to_vec(),
        None => header.iter().filter(|h| *h != date_column).cloned().collect(),
    };
    if selected.is_empty() {
        return Err(Error::invalid("file has no value columns"));
    }
    let mut labels = std::collections::BTreeSet::new();
    for c in &selected {
        if !labels.insert(c) {
            return Err(IngestError::DuplicateLabel(c.clone()).into());
        }
    }
    let idx: Vec<usize> = selected.iter().map(|c| find(c)).collect::<Result<_, _>>()?;

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); selected.len()];
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| IngestError::Csv(e.to_string()))?;
        let raw_date = record.get(date_idx).unwrap_or("");
        let date = parse_date(raw_date).ok_or_else(|| IngestError::MalformedDate {
            row,
            value: raw_date.to_string(),
        })?;
        if dates.last().is_some_and(|&d| date <= d) {
            return Err(IngestError::NonMonotoneDate {
                row,
                value: raw_date.to_string(),
            }
            .into());
        }
        dates.push(date);
        for ((col, &j), out) in selected.iter().zip(&idx).zip(&mut values) {
            let cell = record.get(j).unwrap_or("");
            if is_missing(cell) {
                return Err(IngestError::MissingValue { row, column: col.clone() }.into());
            }
            let v: f64 = cell.parse().map_err(|_| IngestError::NonNumeric {
                row,
                column: col.clone(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(IngestError::MissingValue { row, column: col.clone() }.into());
            }
            out.push(v);
        }
    }
    if dates.is_empty() {
        return Err(IngestError::Empty.into());
    }
    let series = selected
        .into_iter()
        .zip(values)
        .map(|(label, v)| TimeSeries::new(v)?.with_label(label).with_timestamps(dates.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(PanelDataset {
        source: path.display().to_string(),
        dates,
        series,
    })
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_selected_columns() {
        let f = file("date,a,b,c\n1990-01-01,1,2,3\n1990-02-01,4,5,6\n1990-03-01,7,8,9\n");
        let p = ingest_csv(f.path(), "date", Some(&["c".into(), "a".into()])).unwrap();
        assert_eq!(p.labels(), vec!["c", "a"]);
        assert_eq!(p.series[0].values(), &[3.0, 6.0, 9.0]);
        assert_eq!(p.dates[2], NaiveDate::from_ymd_opt(1990, 3, 1).unwrap());
        let all = ingest_csv(f.path(), "date", None).unwrap();
        assert_eq!(all.series.len(), 3);
    }

    #[test]
    fn month_only_dates() {
        let f = file("month,x\n2000-01,1\n2000-02,2\n");
        let p = ingest_csv(f.path(), "month", None).unwrap();
        assert_eq!(p.dates[1], NaiveDate::from_ymd_opt(2000, 2, 1).unwrap());
    }

    #[test]
    fn nan_cell_names_row_and_column() {
        let f = file("date,a,b\n1990-01-01,1,2\n1990-02-01,NaN,5\n");
        let err = ingest_csv(f.path(), "date", None).unwrap_err();
        match err {
            Error::Ingestion(IngestError::MissingValue { row, column }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "a");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn typed_failures() {
        let empty_sel: Vec<String> = vec![];
        let f = file("date,a\n1990-01-01,1\n");
        assert!(matches!(
            ingest_csv(f.path(), "date", Some(&empty_sel)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            ingest_csv(Path::new("/nonexistent/panel.csv"), "date", None),
            Err(Error::Ingestion(IngestError::Io { .. }))
        ));
        let bad_date = file("date,a\n1990-13-01,1\n");
        assert!(matches!(
            ingest_csv(bad_date.path(), "date", None),
            Err(Error::Ingestion(IngestError::MalformedDate { row: 2, .. }))
        ));
        let backwards = file("date,a\n1990-02-01,1\n1990-01-01,2\n");
        assert!(matches!(
            ingest_csv(backwards.path(), "date", None),
            Err(Error::Ingestion(IngestError::NonMonotoneDate { row: 3, .. }))
        ));
        let text = file("date,a\n1990-01-01,abc\n");
        assert!(matches!(
            ingest_csv(text.path(), "date", None),
            Err(Error::Ingestion(IngestError::NonNumeric { .. }))
        ));
        let dup = file("date,a,a\n1990-01-01,1,2\n");
        assert!(matches!(
            ingest_csv(dup.path(), "date", None),
            Err(Error::Ingestion(IngestError::DuplicateLabel(_)))
        ));
        let missing = file("date,a\n1990-01-01,1\n");
        assert!(matches!(
            ingest_csv(missing.path(), "date", Some(&["zz".into()])),
            Err(Error::Ingestion(IngestError::MissingColumn(_)))
        ));
        let header_only = file("date,a\n");
        assert!(matches!(
            ingest_csv(header_only.path(), "date", None),
            Err(Error::Ingestion(IngestError::Empty))
        ));
    }

    #[test]
    fn fourteen_monthly_columns() {
        let mut text = String::from("date");
        for c in 0..14 {
            text.push_str(&format!(",c{c}"));
        }
        text.push('\n');
        for y in 1990..=2014 {
            for m in 1..=12 {
                text.push_str(&format!("{y}-{m:02}-01"));
                for c in 0..14 {
                    text.push_str(&format!(",{}", 100 + c + m));
                }
                text.push('\n');
            }
        }
        let f = file(&text);
        let p = ingest_csv(f.path(), "date", None).unwrap();
        assert_eq!(p.series.len(), 14);
        assert!(p.series.iter().all(|s| s.len() == 300));
    }
}
