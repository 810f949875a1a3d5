//! Dataset ingestion. CSV files carry a header and put the label last; JSON
//! files hold `{"classes": [[[x, ...], ...], ...], "labels": [...]}`.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;
use tsvm_core::LabeledDataset;

use crate::error::CliError;

/// A training set together with the label text of each class.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub data: LabeledDataset,
    pub labels: Vec<String>,
}

/// Query points, with the label column when the file had one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Points {
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDataset {
    #[serde(default)]
    d: Option<usize>,
    classes: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('{')
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Other(anyhow::anyhow!("cannot read {}: {e}", path.display())))
}

/// Load a labeled dataset from CSV or JSON.
pub fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    let text = read(path)?;
    let name = path.display().to_string();
    if is_json(path, &text) {
        parse_json_dataset(&name, &text)
    } else {
        parse_csv_dataset(&name, &text)
    }
}

pub fn parse_json_dataset(name: &str, text: &str) -> Result<Dataset, CliError> {
    let raw: JsonDataset = serde_json::from_str(text)
        .map_err(|e| CliError::parse(name, e.line() as u64, e.column(), e.to_string()))?;
    let k = raw.classes.len();
    let labels = match raw.labels {
        Some(l) if l.len() != k => {
            return Err(CliError::parse(
                name,
                1,
                1,
                format!("{} labels for {k} classes", l.len()),
            ))
        }
        Some(l) => l,
        None => (0..k).map(|i| i.to_string()).collect(),
    };
    let data =
        LabeledDataset::new(raw.classes).map_err(|e| CliError::parse(name, 1, 1, e.to_string()))?;
    if let Some(d) = raw.d.filter(|&d| d != data.d()) {
        return Err(CliError::parse(
            name,
            1,
            1,
            format!("declared d = {d}, points have {}", data.d()),
        ));
    }
    Ok(Dataset { data, labels })
}

struct Table {
    header: Vec<String>,
    /// (line, fields)
    rows: Vec<(u64, Vec<String>)>,
}

fn read_table(name: &str, text: &str) -> Result<Table, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(1, |p| p.line());
        CliError::parse(name, line, 1, e.to_string())
    };
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec.iter().map(String::from).collect()));
    }
    Ok(Table { header, rows })
}

fn number(name: &str, line: u64, col: usize, field: &str) -> Result<f64, CliError> {
    match field.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(_) => Err(CliError::parse(
            name,
            line,
            col,
            format!("non-finite value {field:?}"),
        )),
        Err(_) => Err(CliError::parse(
            name,
            line,
            col,
            format!("expected a number, found {field:?}"),
        )),
    }
}

/// Class index per label: contiguous integers keep their order, anything
/// else is numbered by first appearance.
fn class_map(labels: &[String]) -> (Vec<usize>, Vec<String>) {
    let ints: Option<Vec<i64>> = labels.iter().map(|l| l.parse().ok()).collect();
    if let Some(ints) = ints {
        let lo = ints.iter().copied().min().unwrap_or(0);
        let hi = ints.iter().copied().max().unwrap_or(-1);
        let mut seen = vec![false; (hi - lo + 1).max(0) as usize];
        ints.iter().for_each(|&v| seen[(v - lo) as usize] = true);
        if seen.iter().all(|&s| s) {
            let names = (lo..=hi).map(|v| v.to_string()).collect();
            return (ints.iter().map(|&v| (v - lo) as usize).collect(), names);
        }
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut names = Vec::new();
    let classes = labels
        .iter()
        .map(|l| {
            *index.entry(l.as_str()).or_insert_with(|| {
                names.push(l.clone());
                names.len() - 1
            })
        })
        .collect();
    (classes, names)
}

pub fn parse_csv_dataset(name: &str, text: &str) -> Result<Dataset, CliError> {
    let table = read_table(name, text)?;
    if table.header.len() < 2 {
        return Err(CliError::parse(
            name,
            1,
            1,
            "need at least one coordinate column and a label column",
        ));
    }
    if table.rows.is_empty() {
        return Err(CliError::parse(name, 1, 1, "no data rows"));
    }
    let d = table.header.len() - 1;
    let mut points = Vec::with_capacity(table.rows.len());
    let mut labels = Vec::with_capacity(table.rows.len());
    for (line, fields) in &table.rows {
        let x = fields[..d]
            .iter()
            .enumerate()
            .map(|(c, f)| number(name, *line, c + 1, f))
            .collect::<Result<Vec<_>, _>>()?;
        if fields[d].is_empty() {
            return Err(CliError::parse(name, *line, d + 1, "empty label"));
        }
        points.push(x);
        labels.push(fields[d].clone());
    }
    let (class_of, names) = class_map(&labels);
    let mut classes = vec![Vec::new(); names.len()];
    for (x, c) in points.into_iter().zip(class_of) {
        classes[c].push(x);
    }
    let data =
        LabeledDataset::new(classes).map_err(|e| CliError::parse(name, 1, 1, e.to_string()))?;
    Ok(Dataset {
        data,
        labels: names,
    })
}

/// Load query points of dimension `d`. A CSV may carry one extra, label
/// column; a JSON dataset is flattened in class order.
pub fn load_points(path: &Path, d: usize) -> Result<Points, CliError> {
    let text = read(path)?;
    let name = path.display().to_string();
    if text.trim().is_empty() {
        return Ok(Points::default());
    }
    if is_json(path, &text) {
        let ds = parse_json_dataset(&name, &text)?;
        if ds.data.d() != d {
            return Err(CliError::Dimension(format!(
                "model has d = {d}, points have {}",
                ds.data.d()
            )));
        }
        let mut pts = Points {
            rows: Vec::new(),
            labels: Some(Vec::new()),
        };
        for (c, _, x) in ds.data.iter() {
            pts.rows.push(x.to_vec());
            pts.labels.as_mut().unwrap().push(ds.labels[c].clone());
        }
        return Ok(pts);
    }
    parse_csv_points(&name, &text, d)
}

pub fn parse_csv_points(name: &str, text: &str, d: usize) -> Result<Points, CliError> {
    let table = read_table(name, text)?;
    let width = table.header.len();
    let labeled = match width {
        w if w == d => false,
        w if w == d + 1 => true,
        _ => {
            return Err(CliError::Dimension(format!(
                "model has d = {d}, {name} has {width} columns"
            )))
        }
    };
    let mut pts = Points {
        rows: Vec::with_capacity(table.rows.len()),
        labels: labeled.then(Vec::new),
    };
    for (line, fields) in &table.rows {
        let x = fields[..d]
            .iter()
            .enumerate()
            .map(|(c, f)| number(name, *line, c + 1, f))
            .collect::<Result<Vec<_>, _>>()?;
        pts.rows.push(x);
        if let Some(l) = pts.labels.as_mut() {
            l.push(fields[d].clone());
        }
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_labels_keep_order() {
        let ds = parse_csv_dataset("t", "x,y,label\n0,0,2\n1,0,1\n0,1,2\n").unwrap();
        assert_eq!(ds.labels, vec!["1", "2"]);
        assert_eq!(ds.data.class(0), &[vec![1.0, 0.0]]);
        assert_eq!(ds.data.class(1).len(), 2);
    }

    #[test]
    fn string_labels_by_first_appearance() {
        let ds = parse_csv_dataset("t", "x,label\n0,b\n1,a\n2,b\n5,c\n").unwrap();
        assert_eq!(ds.labels, vec!["b", "a", "c"]);
        assert_eq!(ds.data.class(0), &[vec![0.0], vec![2.0]]);
    }

    #[test]
    fn gaps_fall_back_to_first_appearance() {
        let ds = parse_csv_dataset("t", "x,label\n0,3\n1,1\n").unwrap();
        assert_eq!(ds.labels, vec!["3", "1"]);
    }

    #[test]
    fn bad_number_reports_position() {
        let e = parse_csv_dataset("t", "x,y,label\n0,0,a\n1,zz,b\n").unwrap_err();
        match e {
            CliError::Parse { line, column, .. } => assert_eq!((line, column), (3, 2)),
            other => panic!("{other:?}"),
        }
        assert_eq!(e_code("x,label\n0,a\n1,2,b\n"), 3);
    }

    fn e_code(text: &str) -> u8 {
        parse_csv_dataset("t", text).unwrap_err().exit_code()
    }

    #[test]
    fn json_dataset() {
        let ds = parse_json_dataset(
            "t",
            r#"{"classes": [[[0, 0]], [[1, 1]]], "labels": ["p", "q"]}"#,
        )
        .unwrap();
        assert_eq!(ds.labels, vec!["p", "q"]);
        let e = parse_json_dataset("t", "{\n  \"classes\": [[[0]], [[1]]],\n  \"extra\": 1\n}")
            .unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 3, .. }), "{e:?}");
    }

    #[test]
    fn points_with_and_without_labels() {
        let p = parse_csv_points("t", "x,y\n1,2\n", 2).unwrap();
        assert_eq!(p.rows, vec![vec![1.0, 2.0]]);
        assert!(p.labels.is_none());
        let p = parse_csv_points("t", "x,y,l\n1,2,a\n", 2).unwrap();
        assert_eq!(p.labels, Some(vec!["a".to_string()]));
        assert!(matches!(
            parse_csv_points("t", "x\n1\n", 2),
            Err(CliError::Dimension(_))
        ));
    }
}
