//! CSV ingestion and export.
//!
//! Dialect: header row, comma separator, `.` decimals, unquoted numerics.
//! Rows with an empty or `NA` cell are dropped and counted; any other
//! non-numeric cell is an error.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::linalg::{DesignMatrix, ResponseVector};

#[derive(Clone, Debug)]
pub struct Dataset {
    /// Predictor names, in column order of `x`.
    pub names: Vec<String>,
    pub response_name: Option<String>,
    pub x: DesignMatrix,
    pub y: Option<ResponseVector>,
    pub standardized: bool,
    pub rows_dropped: usize,
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("na") || c.eq_ignore_ascii_case("nan")
}

/// Reads a CSV table. With `response = Some(name)` that column becomes `y`
/// and is excluded from the predictors.
pub fn read_csv<R: Read>(reader: R, response: Option<&str>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let response_col = match response {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Data(format!("response column `{name}` not found")))?,
        ),
        None => None,
    };
    let predictor_cols: Vec<usize> = (0..header.len()).filter(|&c| Some(c) != response_col).collect();
    if predictor_cols.is_empty() {
        return Err(Error::EmptyDesign);
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); predictor_cols.len()];
    let mut y = Vec::new();
    let mut rows_dropped = 0;
    let mut row = Vec::with_capacity(header.len());
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::Data(format!(
                "row {} has {} cells, header has {}",
                line + 2,
                record.len(),
                header.len()
            )));
        }
        if record.iter().any(is_missing) {
            rows_dropped += 1;
            continue;
        }
        row.clear();
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                Error::Data(format!(
                    "non-numeric cell `{cell}` in column `{}` at row {}",
                    header[c],
                    line + 2
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "non-finite cell in column `{}` at row {}",
                    header[c],
                    line + 2
                )));
            }
            row.push(v);
        }
        for (dst, &c) in columns.iter_mut().zip(&predictor_cols) {
            dst.push(row[c]);
        }
        if let Some(rc) = response_col {
            y.push(row[rc]);
        }
    }
    let x = DesignMatrix::from_columns(&columns)?;
    Ok(Dataset {
        names: predictor_cols.iter().map(|&c| header[c].clone()).collect(),
        response_name: response.map(str::to_string),
        x,
        y: response_col.map(|_| ResponseVector::new(y)).transpose()?,
        standardized: false,
        rows_dropped,
    })
}

/// Writes predictors followed by the response (if any) with full `f64`
/// round-trip precision.
pub fn write_csv<W: Write>(
    writer: W,
    names: &[String],
    x: &DesignMatrix,
    response: Option<(&str, &ResponseVector)>,
) -> Result<()> {
    if names.len() != x.p() {
        return Err(Error::DimensionMismatch {
            expected: x.p(),
            got: names.len(),
        });
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
    if let Some((name, _)) = response {
        header.push(name);
    }
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for i in 0..x.n() {
        record.clear();
        record.extend((0..x.p()).map(|j| x.get(i, j).to_string()));
        if let Some((_, y)) = response {
            record.push(y.as_slice()[i].to_string());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Default names `X1..Xp`.
pub fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("X{j}")).collect()
}

/// Centers and scales a vector to mean 0 and standard deviation 1 with
/// divisor `n`; constant vectors are only centered.
pub fn standardize_in_place(v: &mut [f64]) {
    let n = v.len() as f64;
    if v.is_empty() {
        return;
    }
    let mean = v.iter().sum::<f64>() / n;
    v.iter_mut().for_each(|x| *x -= mean);
    let sd = (v.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    if sd > 0.0 {
        v.iter_mut().for_each(|x| *x /= sd);
    }
}

impl Dataset {
    /// Standardizes every predictor and the response.
    pub fn standardize(&mut self) -> Result<()> {
        let (n, p) = (self.x.n(), self.x.p());
        let mut values = self.x.as_column_major().to_vec();
        for col in values.chunks_exact_mut(n) {
            standardize_in_place(col);
        }
        self.x = DesignMatrix::from_column_major(n, p, values)?;
        if let Some(y) = self.y.take() {
            let mut v = y.into_inner();
            standardize_in_place(&mut v);
            self.y = Some(ResponseVector::new(v)?);
        }
        self.standardized = true;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_response_and_drops_missing_rows() {
        let text = "a,y,b\n1,2,3\n4,,6\n7,8,NA\n-1.5,0.25,1e-3\n";
        let d = read_csv(text.as_bytes(), Some("y")).unwrap();
        assert_eq!(d.names, vec!["a", "b"]);
        assert_eq!(d.rows_dropped, 2);
        assert_eq!(d.x.n(), 2);
        assert_eq!(d.x.column(1), &[3.0, 1e-3]);
        assert_eq!(d.y.unwrap().as_slice(), &[2.0, 0.25]);
    }

    #[test]
    fn rejects_non_numeric_and_unknown_response() {
        assert!(matches!(
            read_csv("a,y\n1,x\n".as_bytes(), Some("y")),
            Err(Error::Data(_))
        ));
        assert!(matches!(
            read_csv("a,y\n1,2\n".as_bytes(), Some("z")),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn round_trip_is_exact() {
        let x = DesignMatrix::from_columns(&[vec![0.1, 1.0 / 3.0], vec![-2e-17, 12345.678901234]]).unwrap();
        let y = ResponseVector::new(vec![std::f64::consts::PI, -0.0]).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &default_names(2), &x, Some(("y", &y))).unwrap();
        let d = read_csv(buf.as_slice(), Some("y")).unwrap();
        assert_eq!(d.x, x);
        assert_eq!(d.y.unwrap(), y);
    }

    #[test]
    fn standardization_uses_population_divisor() {
        let mut v = vec![1.0, 2.0, 3.0, 4.0];
        standardize_in_place(&mut v);
        let mean: f64 = v.iter().sum::<f64>() / 4.0;
        let var: f64 = v.iter().map(|x| x * x).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-15 && (var - 1.0).abs() < 1e-12);
        let mut c = vec![5.0; 3];
        standardize_in_place(&mut c);
        assert_eq!(c, vec![0.0; 3]);
    }
}
