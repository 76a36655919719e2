//! Readers for the text inputs: outcome matrices, baseline allocations,
//! capacity specs and grouped observations.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;
use std::{fs, io};

use allocflow_core::stats::GroupedOutcomes;
use allocflow_core::Allocation;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn open(path: &Path) -> Result<fs::File, InputError> {
    fs::File::open(path).map_err(|source| InputError::Io { path: path.display().to_string(), source })
}

/// Headerless CSV, one row per recipient and one column per treatment.
pub fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>, InputError> {
    parse_matrix(open(path)?, &path.display().to_string())
}

pub fn parse_matrix(reader: impl Read, name: &str) -> Result<Vec<Vec<f64>>, InputError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|source| InputError::Csv { path: name.to_string(), source })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| InputError::Parse {
                    path: name.to_string(),
                    line,
                    message: format!("not a number: {field:?}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// One treatment index per line; blank lines and `#` comments are skipped.
pub fn read_baseline(path: &Path) -> Result<Allocation, InputError> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|source| InputError::Io { path: path.display().to_string(), source })?;
    parse_baseline(&text, &path.display().to_string())
}

pub fn parse_baseline(text: &str, name: &str) -> Result<Allocation, InputError> {
    let mut assignment = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let j = line.parse::<usize>().map_err(|_| InputError::Parse {
            path: name.to_string(),
            line: n + 1,
            message: format!("not a treatment index: {line:?}"),
        })?;
        assignment.push(j);
    }
    Ok(Allocation::new(assignment))
}

/// Either one capacity for every treatment or an explicit list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CapacitySpec {
    Uniform(i64),
    PerTreatment(Vec<i64>),
}

impl CapacitySpec {
    pub fn parse_list(text: &str) -> Result<Self, InputError> {
        text.split(',')
            .map(|s| {
                s.trim().parse::<i64>().map_err(|_| InputError::Invalid(format!("bad capacity {s:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(CapacitySpec::PerTreatment)
    }

    /// Capacities for `treatments` treatments.
    pub fn resolve(&self, treatments: usize) -> Vec<i64> {
        match self {
            CapacitySpec::Uniform(m) => vec![*m; treatments],
            CapacitySpec::PerTreatment(v) => v.clone(),
        }
    }
}

/// CSV with columns `group,arm,outcome`. A header row is recognised by a
/// non-numeric outcome field on the first line. Groups and arms keep the
/// order of their first appearance.
pub fn read_grouped(path: &Path) -> Result<GroupedOutcomes, InputError> {
    parse_grouped(open(path)?, &path.display().to_string())
}

pub fn parse_grouped(reader: impl Read, name: &str) -> Result<GroupedOutcomes, InputError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut group_index: HashMap<String, usize> = HashMap::new();
    let mut arm_index: Vec<HashMap<String, usize>> = Vec::new();
    let mut groups: Vec<Vec<Vec<f64>>> = Vec::new();
    for (n, record) in csv.records().enumerate() {
        let record = record.map_err(|source| InputError::Csv { path: name.to_string(), source })?;
        let line = record.position().map_or(n + 1, |p| p.line() as usize);
        let bad = |message: String| InputError::Parse { path: name.to_string(), line, message };
        if record.len() != 3 {
            return Err(bad(format!("expected 3 fields (group,arm,outcome), found {}", record.len())));
        }
        let value = match record[2].parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            Ok(_) => return Err(bad(format!("outcome is not finite: {:?}", &record[2]))),
            Err(_) if n == 0 => continue,
            Err(_) => return Err(bad(format!("not a number: {:?}", &record[2]))),
        };
        let g = *group_index.entry(record[0].to_string()).or_insert_with(|| {
            groups.push(Vec::new());
            arm_index.push(HashMap::new());
            groups.len() - 1
        });
        let arms = &mut groups[g];
        let a = *arm_index[g].entry(record[1].to_string()).or_insert_with(|| {
            arms.push(Vec::new());
            arms.len() - 1
        });
        arms[a].push(value);
    }
    GroupedOutcomes::new(&groups).map_err(|e| InputError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_parsing() {
        let rows = parse_matrix("1, 2.5\n-3,4e-1\n\n".as_bytes(), "m").unwrap();
        assert_eq!(rows, vec![vec![1.0, 2.5], vec![-3.0, 0.4]]);
        let err = parse_matrix("1,2\n3,x\n".as_bytes(), "m").unwrap_err();
        assert!(err.to_string().contains("m:2"), "{err}");
        // ragged rows are passed through for the instance to reject
        assert_eq!(parse_matrix("1,2\n3\n".as_bytes(), "m").unwrap().len(), 2);
    }

    #[test]
    fn baseline_parsing() {
        assert_eq!(parse_baseline("0\n1\n\n# note\n2 # tail\n", "b").unwrap().assignment, vec![0, 1, 2]);
        assert!(parse_baseline("0\n-1\n", "b").unwrap_err().to_string().contains("b:2"));
    }

    #[test]
    fn capacity_lists() {
        assert_eq!(CapacitySpec::parse_list("1,2, 0").unwrap(), CapacitySpec::PerTreatment(vec![1, 2, 0]));
        assert!(CapacitySpec::parse_list("1,,2").is_err());
        assert_eq!(CapacitySpec::Uniform(3).resolve(2), vec![3, 3]);
    }

    #[test]
    fn grouped_parsing() {
        let text = "group,arm,outcome\ng1,a,1\ng1,b,5\ng1,a,3\ng2,x,0\ng1,b,7\ng2,y,2\n";
        let data = parse_grouped(text.as_bytes(), "g").unwrap();
        assert_eq!(data.groups().len(), 2);
        assert_eq!(data.groups()[0].sizes(), &[2, 2]);
        assert_eq!(data.groups()[0].values(), &[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(allocflow_core::stats::avg_abs_difference(&data).unwrap(), 3.0);

        let no_header = parse_grouped("g,a,1\ng,b,2\n".as_bytes(), "g").unwrap();
        assert_eq!(no_header.groups()[0].sizes(), &[1, 1]);
        assert!(parse_grouped("g,a,1\ng,b,oops\n".as_bytes(), "g").is_err());
        assert!(parse_grouped("g,a\n".as_bytes(), "g").is_err());
    }
}
