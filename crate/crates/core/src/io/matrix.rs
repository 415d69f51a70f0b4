use std::path::Path;

use nalgebra::DMatrix;

use super::{content_lines, format_value, header, parse_err, parse_usizes, parse_value, Field};
use crate::error::Result;
use crate::scalar::Scalar;

pub(crate) fn format_rows<T: Scalar>(m: &DMatrix<T>, out: &mut String) {
    for row in m.row_iter() {
        let values: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        out.push_str(&values.join(" "));
        out.push('\n');
    }
}

pub fn format_matrix<T: Scalar>(m: &DMatrix<T>) -> String {
    let mut out = format!("shape: {} {}\nfield: {}\n", m.nrows(), m.ncols(), Field::of::<T>().name());
    format_rows(m, &mut out);
    out
}

/// Reads `rows` lines of `cols` values each.
pub(crate) fn parse_rows<'a, T: Scalar>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    rows: usize,
    cols: usize,
    field: Field,
) -> Result<DMatrix<T>> {
    let mut values = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (i, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("matrix ends after {r} of {rows} rows")))?;
        let row = line
            .split_whitespace()
            .map(|t| parse_value::<T>(t, field, i + 1))
            .collect::<Result<Vec<T>>>()?;
        if row.len() != cols {
            return Err(parse_err(i + 1, format!("row has {} values, expected {cols}", row.len())));
        }
        values.extend(row);
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

pub fn parse_matrix<T: Scalar>(text: &str) -> Result<DMatrix<T>> {
    let mut lines = content_lines(text);
    let (line, shape) = header(lines.next(), "shape")?;
    let shape = parse_usizes(shape, line)?;
    let [rows, cols] = shape[..] else {
        return Err(parse_err(line, "shape needs two integers"));
    };
    let (line, field) = header(lines.next(), "field")?;
    let field = Field::parse(field, line)?;
    field.check_into::<T>()?;
    let m = parse_rows(&mut lines, rows, cols, field)?;
    if let Some((i, _)) = lines.next() {
        return Err(parse_err(i + 1, "trailing data after matrix"));
    }
    Ok(m)
}

pub fn read_matrix<T: Scalar>(path: &Path) -> Result<DMatrix<T>> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn write_matrix<T: Scalar>(path: &Path, m: &DMatrix<T>) -> Result<()> {
    Ok(std::fs::write(path, format_matrix(m))?)
}
