//! CSV ingestion with row/column-addressed errors.

use std::path::Path;

use nalgebra::DMatrix;

use crate::CliError;

/// A numeric table with its header.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub data: DMatrix<f64>,
}

impl Table {
    /// Column index from a 0-based index or a header name.
    pub fn column(&self, key: &str) -> Result<usize, CliError> {
        if let Some(i) = self.headers.iter().position(|h| h == key) {
            return Ok(i);
        }
        match key.parse::<usize>() {
            Ok(i) if i < self.headers.len() => Ok(i),
            _ => Err(CliError::Usage(format!("no column '{key}' (have {})", self.headers.join(", ")))),
        }
    }
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Reads a headed numeric CSV. Rows are numbered from 1 after the header,
/// columns from 1.
pub fn read_numeric_csv(path: &Path) -> Result<Table, CliError> {
    let mut rdr = reader(path)?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let d = headers.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| CliError::Input(format!("{}: row {row}: {e}", path.display())))?;
        if rec.len() != d {
            return Err(CliError::Input(format!(
                "{}: row {row}: expected {d} fields, found {}",
                path.display(),
                rec.len()
            )));
        }
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                CliError::Input(format!(
                    "{}: row {row}, column {} ({}): not a number: '{cell}'",
                    path.display(),
                    j + 1,
                    headers[j]
                ))
            })?;
            if !v.is_finite() {
                return Err(CliError::Input(format!(
                    "{}: row {row}, column {} ({}): non-finite value",
                    path.display(),
                    j + 1,
                    headers[j]
                )));
            }
            values.push(v);
        }
        rows += 1;
    }
    Ok(Table { headers, data: DMatrix::from_row_slice(rows, d, &values) })
}

/// Reads an `id,x,y` locations file, keeping row order.
pub fn read_coords_csv(path: &Path) -> Result<Vec<[f64; 2]>, CliError> {
    let t = read_numeric_csv(path)?;
    let want = ["id", "x", "y"];
    if t.headers != want {
        return Err(CliError::Input(format!(
            "{}: expected header id,x,y, found {}",
            path.display(),
            t.headers.join(",")
        )));
    }
    Ok((0..t.data.nrows()).map(|i| [t.data[(i, 1)], t.data[(i, 2)]]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_table() {
        let f = tmp("a,b\n1,2\n3.5,-4e-1\n");
        let t = read_numeric_csv(f.path()).unwrap();
        assert_eq!(t.headers, ["a", "b"]);
        assert_eq!(t.data.nrows(), 2);
        assert_eq!(t.data[(1, 1)], -0.4);
        assert_eq!(t.column("b").unwrap(), 1);
        assert_eq!(t.column("0").unwrap(), 0);
        assert!(t.column("c").is_err());
    }

    #[test]
    fn errors_name_the_cell() {
        let e = read_numeric_csv(tmp("a,b\n1,2\n3\n").path()).unwrap_err().to_string();
        assert!(e.contains("row 2") && e.contains("expected 2 fields"), "{e}");
        let e = read_numeric_csv(tmp("a,b\n1,2\n3,x\n").path()).unwrap_err().to_string();
        assert!(e.contains("row 2, column 2 (b)"), "{e}");
        let e = read_numeric_csv(tmp("a,b\n1,NaN\n").path()).unwrap_err().to_string();
        assert!(e.contains("row 1, column 2"), "{e}");
    }

    #[test]
    fn coords_header_checked() {
        assert!(read_coords_csv(tmp("id,x,y\n1,0,0\n2,1,0\n").path()).unwrap().len() == 2);
        assert!(read_coords_csv(tmp("x,y\n0,0\n").path()).is_err());
    }
}
