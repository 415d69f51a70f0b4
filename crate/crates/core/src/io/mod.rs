//! Text and binary file formats for tensors, matrices and model descriptors.
//!
//! Tensor text (`.ten`):
//!
//! ```text
//! dims: 2 3 2
//! field: real
//! 1.0 2.5 -3.0 ...
//! ```
//!
//! Values follow the vectorization order (last index fastest). Complex values
//! are written `a+bi`. The binary form starts with `TENB`, then little-endian
//! `u32` order, `u32` field flag (0 real, 1 complex), one `u32` per dim and the
//! `f64` payload (real and imaginary parts interleaved for complex).
//!
//! Matrix text: `shape: R C`, `field: ...`, then `R` rows of `C` values.
//!
//! Model descriptor (`.mdl`): `family:` and `field:` header lines followed by
//! named blocks. `matrix NAME R C` is followed by `R` rows; `tensor NAME I1 ..
//! IN` by the values in vectorization order. Lines starting with `#` are
//! comments. Block names per family:
//!
//! | family     | blocks                                                   |
//! |------------|----------------------------------------------------------|
//! | `parafac`  | `factor1..factorN`, optional `weights` (1 x R)           |
//! | `tucker`   | `core`, `factor1..factorK`                               |
//! | `confac`   | `factor1..factorN`, `constraint1..constraintK`           |
//! | `paratuck` | `factor1..factorN1`, `constraint1..constraintN1`, `input`|

mod matrix;
mod model;
mod tensor;

pub use matrix::{format_matrix, parse_matrix, read_matrix, write_matrix};
pub use model::{format_model, parse_descriptor, parse_model, read_model, write_model, AnyModel, Descriptor, Family};
pub use tensor::{
    format_tensor, parse_tensor, read_tensor, read_tensor_binary, tensor_from_bytes, tensor_to_bytes, write_tensor,
    write_tensor_binary,
};

use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn of<T: Scalar>() -> Field {
        if T::IS_COMPLEX {
            Field::Complex
        } else {
            Field::Real
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }

    fn parse(s: &str, line: usize) -> Result<Field> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(parse_err(line, format!("unknown field `{other}`"))),
        }
    }

    /// Errors when values of this field cannot be stored in `T`.
    fn check_into<T: Scalar>(self) -> Result<()> {
        if self == Field::Complex && !T::IS_COMPLEX {
            return Err(Error::Unsupported("complex data read into a real field".into()));
        }
        Ok(())
    }
}

/// Field declared by a text file (`.ten`, matrix or `.mdl`), or by the
/// binary tensor header.
pub fn detect_field(path: &Path) -> Result<Field> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(tensor::MAGIC) {
        return match bytes.get(8..12) {
            Some(flag) if flag == [1, 0, 0, 0] => Ok(Field::Complex),
            Some(_) => Ok(Field::Real),
            None => Err(parse_err(0, "truncated binary header")),
        };
    }
    let text = String::from_utf8_lossy(&bytes);
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.trim().strip_prefix("field:") {
            return Field::parse(rest.trim(), i + 1);
        }
    }
    Err(parse_err(0, "missing `field:` line"))
}

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Shortest round-trip representation; complex as `a+bi`.
pub(crate) fn format_value<T: Scalar>(v: T) -> String {
    let (re, im) = v.to_parts();
    if T::IS_COMPLEX {
        let sign = if im.is_sign_negative() { '-' } else { '+' };
        format!("{re:?}{sign}{:?}i", im.abs())
    } else {
        format!("{re:?}")
    }
}

pub(crate) fn parse_value<T: Scalar>(token: &str, field: Field, line: usize) -> Result<T> {
    match field {
        Field::Real => token
            .parse::<f64>()
            .map(T::from_re)
            .map_err(|e| parse_err(line, format!("bad value `{token}`: {e}"))),
        Field::Complex => token
            .parse::<num_complex::Complex64>()
            .map(|c| T::from_parts(c.re, c.im))
            .map_err(|e| parse_err(line, format!("bad complex value `{token}`: {e}"))),
    }
}

/// `key: value` header line.
pub(crate) fn header<'a>(line: Option<(usize, &'a str)>, key: &str) -> Result<(usize, &'a str)> {
    let (i, text) = line.ok_or_else(|| parse_err(0, format!("missing `{key}:` line")))?;
    let rest = text
        .trim()
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(':'))
        .ok_or_else(|| parse_err(i + 1, format!("expected `{key}:`")))?;
    Ok((i + 1, rest.trim()))
}

pub(crate) fn parse_usizes(s: &str, line: usize) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| parse_err(line, format!("bad integer `{t}`: {e}"))))
        .collect()
}

/// Non-empty, non-comment lines with 0-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    })
}
