//! Input parsing and output sinks.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use crate::error::CliError;

/// Stdout or a file, chosen by `--out`.
pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Reads a file, or stdin for `-` / no path.
pub fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            File::open(p)
                .and_then(|mut f| f.read_to_string(&mut text))
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", p.display())))?;
        }
        _ => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    Ok(text)
}

/// Numeric table parsed from CSV text.
///
/// `#` lines are comments; a first row that is not numeric is a header.
/// A column named `i` (the output of `sample`) is dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: usize,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_table(text: &str) -> Result<Table, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut drop_first = false;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("malformed CSV: {e}")))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if line == 0 && rows.is_empty() => {
                drop_first = record.get(0) == Some("i");
            }
            Err(_) => {
                return Err(CliError::input(format!(
                    "non-numeric CSV row {}: {:?}",
                    line + 1,
                    record.iter().collect::<Vec<_>>()
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::input("input contains no data rows"));
    }
    if drop_first {
        for r in &mut rows {
            r.remove(0);
        }
    }
    let columns = rows[0].len();
    Ok(Table { columns, rows })
}

impl Table {
    /// `(x, y)` pairs from the last two columns.
    pub fn pairs(&self) -> Result<Vec<(f64, f64)>, CliError> {
        if self.columns < 2 {
            return Err(CliError::input("expected paired data with columns x, y"));
        }
        let k = self.columns;
        let pairs: Vec<(f64, f64)> = self.rows.iter().map(|r| (r[k - 2], r[k - 1])).collect();
        if let Some(p) = pairs.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0) || !x.is_finite() || !y.is_finite()) {
            return Err(CliError::input(format!("pairs must be positive and finite, found {p:?}")));
        }
        Ok(pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_output_round_trips() {
        let t = parse_table("# {\"n\":2}\ni,x,y\n0,1.5,2\n1,3,0.25\n").unwrap();
        assert_eq!(t.columns, 2);
        assert_eq!(t.pairs().unwrap(), vec![(1.5, 2.0), (3.0, 0.25)]);
    }

    #[test]
    fn one_column_with_header() {
        let t = parse_table("ratio\n1\n2\n\n3\n").unwrap();
        assert_eq!(t.columns, 1);
        assert_eq!(t.rows.len(), 3);
        assert!(t.pairs().is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_table("").is_err());
        assert!(parse_table("1,2\nx,y\n").is_err());
        assert!(parse_table("1,2\n3\n").is_err());
        assert!(parse_table("x,y\n1,-2\n").unwrap().pairs().is_err());
    }
}
