use std::path::Path;

use super::{content_lines, format_value, header, parse_err, parse_usizes, parse_value, Field};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::tensor::DenseTensor;

pub(crate) const MAGIC: &[u8; 4] = b"TENB";

/// Values per line in text output.
const PER_LINE: usize = 8;

pub fn format_tensor<T: Scalar>(x: &DenseTensor<T>) -> String {
    let dims: Vec<String> = x.dims().iter().map(|d| d.to_string()).collect();
    let mut out = format!("dims: {}\nfield: {}\n", dims.join(" "), Field::of::<T>().name());
    for chunk in x.data().chunks(PER_LINE) {
        let values: Vec<String> = chunk.iter().map(|&v| format_value(v)).collect();
        out.push_str(&values.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_tensor<T: Scalar>(text: &str) -> Result<DenseTensor<T>> {
    let mut lines = content_lines(text);
    let (line, dims) = header(lines.next(), "dims")?;
    let dims = parse_usizes(dims, line)?;
    let (line, field) = header(lines.next(), "field")?;
    let field = Field::parse(field, line)?;
    field.check_into::<T>()?;
    let mut values = Vec::new();
    for (i, l) in lines {
        for token in l.split_whitespace() {
            values.push(parse_value::<T>(token, field, i + 1)?);
        }
    }
    let expected: usize = dims.iter().product();
    if values.len() != expected {
        return Err(parse_err(0, format!("dims {dims:?} need {expected} values, found {}", values.len())));
    }
    DenseTensor::new(dims, values)
}

pub fn read_tensor<T: Scalar>(path: &Path) -> Result<DenseTensor<T>> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        return tensor_from_bytes(&bytes);
    }
    parse_tensor(&String::from_utf8_lossy(&bytes))
}

pub fn write_tensor<T: Scalar>(path: &Path, x: &DenseTensor<T>) -> Result<()> {
    Ok(std::fs::write(path, format_tensor(x))?)
}

pub fn tensor_to_bytes<T: Scalar>(x: &DenseTensor<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 4 * x.order() + 16 * x.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(x.order() as u32).to_le_bytes());
    out.extend_from_slice(&u32::from(T::IS_COMPLEX).to_le_bytes());
    for &d in x.dims() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for &v in x.data() {
        let (re, im) = v.to_parts();
        out.extend_from_slice(&re.to_le_bytes());
        if T::IS_COMPLEX {
            out.extend_from_slice(&im.to_le_bytes());
        }
    }
    out
}

pub fn tensor_from_bytes<T: Scalar>(bytes: &[u8]) -> Result<DenseTensor<T>> {
    if !bytes.starts_with(MAGIC) {
        return Err(parse_err(0, "missing TENB magic"));
    }
    let word = |k: usize| -> Result<u32> {
        bytes
            .get(4 + 4 * k..8 + 4 * k)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
            .ok_or_else(|| parse_err(0, "truncated binary header"))
    };
    let order = word(0)? as usize;
    let field = match word(1)? {
        0 => Field::Real,
        1 => Field::Complex,
        f => return Err(parse_err(0, format!("unknown field flag {f}"))),
    };
    field.check_into::<T>()?;
    let dims = (0..order).map(|k| word(2 + k).map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
    let start = 12 + 4 * order;
    let width = if field == Field::Complex { 16 } else { 8 };
    let count: usize = dims.iter().product();
    let payload = &bytes[start.min(bytes.len())..];
    if payload.len() != count * width {
        return Err(parse_err(0, format!("payload has {} bytes, expected {}", payload.len(), count * width)));
    }
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().unwrap());
    let values = payload
        .chunks(width)
        .map(|c| if width == 16 { T::from_parts(f(&c[..8]), f(&c[8..])) } else { T::from_re(f(c)) })
        .collect();
    DenseTensor::new(dims, values)
}

pub fn read_tensor_binary<T: Scalar>(path: &Path) -> Result<DenseTensor<T>> {
    tensor_from_bytes(&std::fs::read(path)?)
}

pub fn write_tensor_binary<T: Scalar>(path: &Path, x: &DenseTensor<T>) -> Result<()> {
    Ok(std::fs::write(path, tensor_to_bytes(x))?)
}
